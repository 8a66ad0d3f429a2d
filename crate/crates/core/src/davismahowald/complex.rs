//! The exact complex `0 <- F2 <- Υ1 <- Υ1⊗N_1 <- Υ1⊗N_2 <- ...` and its
//! splitting `Υ1⊗N_σ = A_σ ⊕ B_σ`.

use serde::{Deserialize, Serialize};

use super::polynomial::{build_n, monomial_label};
use crate::algebra::Sq;
use crate::f2linalg::{self, Subspace};
use crate::module::{tensor, A1Module, Element, GradedMap, ModuleError};
use crate::structure::seagull;

/// Whether a summand generator spans a copy of A(1) or of Υ1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummandType {
    Free,
    Upsilon1,
}

#[derive(Clone, Debug)]
pub struct SummandGenerator {
    /// Exponents `(i, j)` of the monomial `x2^i x3^j` in `1 ⊗ x2^i x3^j`.
    pub monomial: (u32, u32),
    pub kind: SummandType,
    pub element: Element,
}

#[derive(Clone, Debug)]
pub struct DmStage {
    pub sigma: u32,
    /// `Υ1 ⊗ N_σ`.
    pub module: A1Module,
    pub a_generators: Vec<SummandGenerator>,
    pub b_generators: Vec<SummandGenerator>,
    /// `∂_σ` into the previous stage (into F2 when `σ = 0`).
    pub boundary: GradedMap,
}

#[derive(Clone, Debug)]
pub struct DmComplex {
    pub f2: A1Module,
    pub stages: Vec<DmStage>,
}

/// `1 ⊗ x2^i x3^j` inside `Υ1 ⊗ N_{i+j}`.
pub fn unit_tensor(module: &A1Module, i: u32, j: u32) -> Element {
    module.element(&format!("y0⊗{}", monomial_label(i, j))).expect("monomial present")
}

/// Generators of `A_σ` (free on each).
pub fn a_generators(sigma: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (0..2 * (sigma / 4)).map(|j| (sigma - 2 * j, 2 * j)).collect();
    if sigma % 4 == 3 {
        out.push((1, sigma - 1));
    }
    out
}

/// Generators of `B_σ` with their summand types.
pub fn b_generators(sigma: u32) -> Vec<((u32, u32), SummandType)> {
    match sigma % 4 {
        0 => vec![((0, sigma), SummandType::Upsilon1)],
        1 => vec![((1, sigma - 1), SummandType::Free)],
        2 => vec![((2, sigma - 2), SummandType::Free), ((0, sigma), SummandType::Upsilon1)],
        _ => vec![((3, sigma - 3), SummandType::Free)],
    }
}

fn boundary_of(prev: &A1Module, sigma: u32, (i, j): (u32, u32), is_a: bool) -> Element {
    let u = |a: u32, b: u32| unit_tensor(prev, a, b);
    if is_a {
        return if (i as i64 - sigma as i64).rem_euclid(4) == 0 {
            u(i - 3, j + 2)
        } else {
            prev.zero_element(3 * sigma as i32 - i as i32)
        };
    }
    match sigma % 4 {
        0 => prev.act_letters(&[Sq::Sq1, Sq::Sq2, Sq::Sq1, Sq::Sq2], &u(3, sigma - 4)),
        1 => prev.act(Sq::Sq2, &u(0, sigma - 1)),
        2 if i > 0 => prev.act(Sq::Sq2, &u(1, sigma - 2)),
        2 => prev.act_letters(&[Sq::Sq2, Sq::Sq2], &u(1, sigma - 2)),
        _ => prev.act(Sq::Sq2, &u(2, sigma - 3)).add(&u(0, sigma - 1)),
    }
}

/// Builds the stages `σ = 0..=max_sigma` with their boundary maps.
pub fn build_dm_complex(max_sigma: u32) -> Result<DmComplex, ModuleError> {
    let f2 = A1Module::f2();
    let y1 = seagull(1);
    let mut stages: Vec<DmStage> = Vec::new();
    for sigma in 0..=max_sigma {
        let module = tensor(&y1, &build_n(sigma));
        let mk = |(m, kind): ((u32, u32), SummandType)| SummandGenerator {
            monomial: m,
            kind,
            element: unit_tensor(&module, m.0, m.1),
        };
        let a: Vec<SummandGenerator> = a_generators(sigma).into_iter().map(|m| mk((m, SummandType::Free))).collect();
        let b: Vec<SummandGenerator> = b_generators(sigma).into_iter().map(mk).collect();
        let boundary = if sigma == 0 {
            let g = unit_tensor(&module, 0, 0);
            module.map_from_generators(&f2, 0, &[(g, f2.basis_element(0, 0))])?
        } else {
            let prev = &stages[sigma as usize - 1].module;
            let mut images = Vec::new();
            for g in &a {
                images.push((g.element.clone(), boundary_of(prev, sigma, g.monomial, true)));
            }
            for g in &b {
                images.push((g.element.clone(), boundary_of(prev, sigma, g.monomial, false)));
            }
            module.map_from_generators(prev, 0, &images)?
        };
        stages.push(DmStage { sigma, module, a_generators: a, b_generators: b, boundary });
    }
    Ok(DmComplex { f2, stages })
}

/// The A(1)-submodule generated by some elements, degree by degree.
pub fn generated_submodule(m: &A1Module, gens: &[Element]) -> Vec<(i32, Subspace)> {
    let mut out = Vec::new();
    for k in m.space().degrees() {
        let mut vs = Vec::new();
        for g in gens {
            for w in crate::algebra::Word::all() {
                if g.degree + w.degree() == k {
                    vs.push(m.act_word(w, g).vector);
                }
            }
        }
        out.push((k, Subspace::from_spanning(m.dim(k), &vs)));
    }
    out
}

impl DmComplex {
    /// `∂_{σ-1} ∘ ∂_σ = 0` for every `σ >= 1`.
    pub fn is_complex(&self) -> bool {
        self.stages.windows(2).all(|w| w[1].boundary.then(&w[0].boundary).is_zero())
    }

    /// Degrees in which the augmented complex fails to be exact at stage `σ`
    /// (`None` stands for the augmentation `F2`), for `σ < max_sigma`.
    pub fn exactness_failures(&self, max_degree: i32) -> Vec<(Option<u32>, i32)> {
        let mut out = Vec::new();
        let d0 = &self.stages[0];
        if f2linalg::image(&d0.boundary.block(0)).dim() != 1 {
            out.push((None, 0));
        }
        for s in 0..self.stages.len().saturating_sub(1) {
            let here = &self.stages[s];
            let next = &self.stages[s + 1];
            for k in here.module.lo()..=max_degree.min(here.module.hi()) {
                let ker = here.boundary.kernel(k);
                let im = f2linalg::image(&next.boundary.block(k));
                if ker != im {
                    out.push((Some(s as u32), k));
                }
            }
        }
        out
    }

    /// Checks that `A_σ` and `B_σ` are direct summands of the stated types
    /// and that `∂` carries `A_σ` into `A_{σ-1}` and `B_σ` into `B_{σ-1}`.
    pub fn split_failures(&self) -> Vec<(u32, &'static str)> {
        let mut out = Vec::new();
        for st in &self.stages {
            let m = &st.module;
            let part = |gs: &[SummandGenerator]| -> Vec<(i32, Subspace)> {
                generated_submodule(m, &gs.iter().map(|g| g.element.clone()).collect::<Vec<_>>())
            };
            let a = part(&st.a_generators);
            let b = part(&st.b_generators);
            let expected: usize = st
                .a_generators
                .iter()
                .chain(&st.b_generators)
                .map(|g| match g.kind {
                    SummandType::Free => 8,
                    SummandType::Upsilon1 => 4,
                })
                .sum();
            let total: usize = a.iter().zip(&b).map(|((_, x), (_, y))| x.sum(y).dim()).sum();
            let separate: usize = a.iter().chain(&b).map(|(_, x)| x.dim()).sum();
            if total != m.total_dim() || separate != expected || expected != m.total_dim() {
                out.push((st.sigma, "summands do not split the module"));
            }
            if st.sigma == 0 {
                continue;
            }
            let prev = &self.stages[st.sigma as usize - 1];
            let pm = &prev.module;
            let pa = generated_submodule(pm, &prev.a_generators.iter().map(|g| g.element.clone()).collect::<Vec<_>>());
            let pb = generated_submodule(pm, &prev.b_generators.iter().map(|g| g.element.clone()).collect::<Vec<_>>());
            let inside = |gs: &[SummandGenerator], target: &[(i32, Subspace)]| {
                gs.iter().all(|g| {
                    let v = st.boundary.apply(&g.element);
                    target.iter().find(|(k, _)| *k == v.degree).is_none_or(|(_, s)| s.contains(&v.vector))
                })
            };
            if !inside(&st.a_generators, &pa) {
                out.push((st.sigma, "boundary does not preserve A"));
            }
            if !inside(&st.b_generators, &pb) {
                out.push((st.sigma, "boundary does not preserve B"));
            }
        }
        out
    }
}
