//! The A(1)-modules `N_σ` spanned by monomials of total degree `σ` in `F2[x2, x3]`.

use crate::algebra::Sq;
use crate::module::{A1Module, ModuleBuilder};

pub fn monomial_label(i: u32, j: u32) -> String {
    let part = |name: &str, e: u32| match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    };
    let s = format!("{}{}", part("x2", i), part("x3", j));
    if s.is_empty() {
        "1".to_string()
    } else {
        s
    }
}

/// Degree `2i + 3j` of `x2^i x3^j`.
pub fn monomial_degree(i: u32, j: u32) -> i32 {
    (2 * i + 3 * j) as i32
}

fn sq1(i: u32, j: u32) -> Option<(u32, u32)> {
    (i > 0 && j % 2 == 0).then(|| (i - 1, j + 1))
}

fn sq2(i: u32, j: u32) -> Option<(u32, u32)> {
    (i > 1 && matches!(j % 4, 0 | 1)).then(|| (i - 2, j + 2))
}

/// `N_σ`: one basis monomial in each degree `2σ..=3σ`.
pub fn build_n(sigma: u32) -> A1Module {
    let mut b = ModuleBuilder::new();
    for j in 0..=sigma {
        let i = sigma - j;
        b.add_basis(&monomial_label(i, j), monomial_degree(i, j)).unwrap();
    }
    for j in 0..=sigma {
        let i = sigma - j;
        let from = monomial_label(i, j);
        for (s, f) in [(Sq::Sq1, sq1 as fn(u32, u32) -> Option<(u32, u32)>), (Sq::Sq2, sq2)] {
            if let Some((a, c)) = f(i, j) {
                b.set_action(s, &from, &[monomial_label(a, c).as_str()]).unwrap();
            }
        }
    }
    b.build().expect("N_sigma satisfies the A(1) relations")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margolis::{margolis_homology, Operator, Side};

    #[test]
    fn n2_structure() {
        let n = build_n(2);
        let x22 = n.element("x2^2").unwrap();
        assert_eq!(n.act(Sq::Sq2, &x22), n.element("x3^2").unwrap());
        assert_eq!(n.act(Sq::Sq1, &x22), n.element("x2x3").unwrap());
    }

    #[test]
    fn q0_homology_of_n() {
        for sigma in 0..=8u32 {
            let h = margolis_homology(&build_n(sigma), Operator::Q0, Side::Module);
            if sigma % 2 == 0 {
                assert_eq!(h.dim_table(), [(3 * sigma as i32, 1)].into());
            } else {
                assert!(h.is_zero());
            }
        }
    }
}
