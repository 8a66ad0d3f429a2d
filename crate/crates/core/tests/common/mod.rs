#![allow(dead_code)]

use std::collections::BTreeMap;

use a1_core::algebra::{Sq, Word};
use a1_core::davismahowald::spectral::{d2_with, perturb_representatives, DualQ0Homology};
use a1_core::f2linalg::{self, BitMatrix, BitVec, Subspace};
use a1_core::module::{direct_sum, direct_sum_all, suspend, tensor, TensorIndex};
use a1_core::structure::{realize, seagull, FlockDescriptor, SeagullSpec};
use a1_core::A1Module;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_invertible(n: usize, rng: &mut impl Rng) -> BitMatrix {
    loop {
        let mut a = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, rng.gen());
            }
        }
        if a.is_invertible() {
            return a;
        }
    }
}

pub fn random_automorphism(m: &A1Module, rng: &mut impl Rng) -> A1Module {
    if m.is_zero() {
        return m.clone();
    }
    let p: BTreeMap<i32, BitMatrix> = m.space().degrees().map(|k| (k, random_invertible(m.dim(k), rng))).collect();
    m.change_basis(&p).unwrap()
}

/// Exact seagulls of length <= `max_len` at shifts in `lo..=hi`, plus free summands.
pub fn random_descriptor(rng: &mut impl Rng, max_len: u32, lo: i32, hi: i32, with_free: bool) -> FlockDescriptor {
    let count = rng.gen_range(1..=4);
    let seagulls = (0..count).map(|_| SeagullSpec::exact(rng.gen_range(lo..=hi), rng.gen_range(1..=max_len))).collect();
    let mut free = BTreeMap::new();
    if with_free {
        for _ in 0..rng.gen_range(0..=2) {
            *free.entry(rng.gen_range(lo..=hi)).or_insert(0) += 1;
        }
    }
    FlockDescriptor::new(seagulls, free, None)
}

/// A flock (no free summands) in a scrambled basis.
pub fn random_flock(rng: &mut impl Rng) -> A1Module {
    let d = random_descriptor(rng, 4, 0, 12, false);
    random_automorphism(&realize(&d).unwrap(), rng)
}

/// A reduced, connective, Q0-local module: a flock with a seagull at 0.
pub fn random_connective_reduced(rng: &mut impl Rng) -> A1Module {
    let mut d = random_descriptor(rng, 4, 0, 10, false);
    d.seagulls.push(SeagullSpec::exact(0, rng.gen_range(1..=3)));
    let d = FlockDescriptor::new(d.seagulls, BTreeMap::new(), None);
    random_automorphism(&realize(&d).unwrap(), rng)
}

/// Small modules built from seagulls, F2 and A(1) by sums, tensors and suspensions.
pub fn random_small_module(rng: &mut impl Rng) -> A1Module {
    let leaf = |rng: &mut ChaCha8Rng| -> A1Module {
        let m = match rng.gen_range(0..4) {
            0 => A1Module::f2(),
            1 => A1Module::free(),
            _ => seagull(rng.gen_range(1..=3)),
        };
        suspend(&m, rng.gen_range(-4..=6))
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let a = leaf(&mut r);
    let b = leaf(&mut r);
    let m = match r.gen_range(0..3) {
        0 => a,
        1 => direct_sum(&a, &b),
        _ => tensor(&a, &b),
    };
    random_automorphism(&m, rng)
}

pub type Check = Result<(), String>;

/// The defining relations `Sq1Sq1 = 0`, `Sq2Sq2 = Sq1Sq2Sq1` and their
/// consequences `Sq1Sq2Sq2 = Sq2Sq2Sq1 = 0`, `Sq1Sq2Sq1Sq2 = Sq2Sq1Sq2Sq1`,
/// as matrix identities on every degree of `m`.
pub fn check_relations(m: &A1Module) -> Check {
    use Sq::{Sq1, Sq2};
    let pairs: [(&[Sq], &[Sq]); 5] = [
        (&[Sq1, Sq1], &[]),
        (&[Sq2, Sq2], &[Sq1, Sq2, Sq1]),
        (&[Sq1, Sq2, Sq2], &[]),
        (&[Sq2, Sq2, Sq1], &[]),
        (&[Sq1, Sq2, Sq1, Sq2], &[Sq2, Sq1, Sq2, Sq1]),
    ];
    for k in m.space().degrees() {
        for (l, r) in pairs {
            let lhs = m.letters_matrix(l, k);
            let rhs = if r.is_empty() { BitMatrix::zeros(lhs.rows(), lhs.cols()) } else { m.letters_matrix(r, k) };
            if lhs != rhs {
                return Err(format!("{l:?} != {r:?} on degree {k}"));
            }
        }
    }
    Ok(())
}

/// Derives the consequences from the two defining relations by rewriting
/// and compares with the multiplication table.
pub fn check_algebra_relations() -> Check {
    use Sq::{Sq1, Sq2};
    let w = a1_core::algebra::reduce_letters;
    // Sq1(Sq2Sq2) = Sq1(Sq1Sq2Sq1) = 0 and (Sq2Sq2)Sq1 = Sq1Sq2(Sq1Sq1) = 0.
    if w(&[Sq1, Sq2, Sq2]) != w(&[Sq1, Sq1, Sq2, Sq1]) || w(&[Sq1, Sq2, Sq2]).is_some() {
        return Err("Sq1Sq2Sq2 != 0".into());
    }
    if w(&[Sq2, Sq2, Sq1]) != w(&[Sq1, Sq2, Sq1, Sq1]) || w(&[Sq2, Sq2, Sq1]).is_some() {
        return Err("Sq2Sq2Sq1 != 0".into());
    }
    // Sq2Sq2Sq2 = (Sq1Sq2Sq1)Sq2 = Sq2(Sq1Sq2Sq1).
    let a = w(&[Sq1, Sq2, Sq1, Sq2]);
    let b = w(&[Sq2, Sq1, Sq2, Sq1]);
    if a != b || a != w(&[Sq2, Sq2, Sq2]) || a.is_none() {
        return Err("Sq1Sq2Sq1Sq2 != Sq2Sq1Sq2Sq1".into());
    }
    if w(&[Sq2, Sq2]) != w(&[Sq1, Sq2, Sq1]) || w(&[Sq1, Sq1]).is_some() {
        return Err("defining relations fail".into());
    }
    Ok(())
}

/// `im(Sq2) ∩ ker(Sq1) = im(Sq2Sq1Sq2)` in every degree.
pub fn check_sq2_kernel_lemma(m: &A1Module) -> Check {
    for k in m.space().degrees() {
        let im2 = f2linalg::image(&m.sq(Sq::Sq2, k - 2));
        let ker1 = f2linalg::kernel(&m.sq(Sq::Sq1, k));
        let lhs = im2.intersect(&ker1);
        let rhs = f2linalg::image(&m.word_matrix(Word::SQ2SQ1SQ2, k - 5));
        if lhs != rhs {
            return Err(format!("degree {k}: {} vs {}", lhs.dim(), rhs.dim()));
        }
    }
    Ok(())
}

/// `Sq1 x = 0` for every `x` in the bottom degree 0.
pub fn check_sq1_bottom_lemma(m: &A1Module) -> Check {
    if m.lo() != 0 {
        return Err(format!("module is not connective at 0 (lo = {})", m.lo()));
    }
    if !m.sq(Sq::Sq1, 0).is_zero() {
        return Err("Sq1 is nonzero on degree 0".into());
    }
    Ok(())
}

/// d2 computed from perturbed representatives agrees with d2 computed from
/// the canonical ones after change of coordinates; and right multiplication
/// by Sq2Sq1Sq2 preserves dual Q0-cycles and Q0-boundaries.
pub fn check_d2_independence(m: &A1Module, rng: &mut impl Rng) -> Check {
    let h = DualQ0Homology::compute(m);
    let base = d2_with(h.clone());
    let alt = perturb_representatives(&h, || rng.gen());
    let moved = d2_with(alt.clone());
    for (&k, reps) in &alt.classes {
        for (c, v) in reps.iter().enumerate() {
            let via_base = base.block(k).apply(&h.coordinates(k, v));
            let image = moved.block(k).col(c);
            // Express the alternative target basis in base coordinates.
            let target_reps = alt.classes.get(&(k - 5)).cloned().unwrap_or_default();
            let mut via_alt = BitVec::zeros(h.dim(k - 5));
            for r in image.ones() {
                via_alt.add_assign(&h.coordinates(k - 5, &target_reps[r]));
            }
            if via_base != via_alt {
                return Err(format!("d2 depends on representatives in degree {k}"));
            }
        }
    }
    let dual = h.dual.as_module();
    for d in dual.space().degrees() {
        let cycles = f2linalg::kernel(&dual.sq(Sq::Sq1, d));
        let boundaries = f2linalg::image(&dual.sq(Sq::Sq1, d - 1));
        let theta = dual.word_matrix(Word::SQ2SQ1SQ2, d);
        let target_cycles = f2linalg::kernel(&dual.sq(Sq::Sq1, d + 5));
        let target_boundaries = f2linalg::image(&dual.sq(Sq::Sq1, d + 4));
        for v in cycles.basis() {
            if !target_cycles.contains(&theta.apply(v)) {
                return Err(format!("cycle in dual degree {d} not sent to a cycle"));
            }
        }
        for v in boundaries.basis() {
            if !target_boundaries.contains(&theta.apply(v)) {
                return Err(format!("boundary in dual degree {d} not sent to a boundary"));
            }
        }
    }
    Ok(())
}

/// Every A(1)-map `f : N ⊗ M -> F2` satisfies
/// `f(Sq2Sq1Sq2 n ⊗ m) = f(n ⊗ Sq2Sq1Sq2 m)`.
pub fn check_tensor_symmetry(n: &A1Module, m: &A1Module) -> Check {
    let t = tensor(n, m);
    let idx = TensorIndex::new(n, m);
    let dim0 = t.dim(0);
    if dim0 == 0 {
        return Ok(());
    }
    let hit = Subspace::from_spanning(
        dim0,
        &[t.sq(Sq::Sq1, -1).col_vectors(), t.sq(Sq::Sq2, -2).col_vectors()].concat(),
    );
    let maps = hit.annihilator();
    let theta = Word::SQ2SQ1SQ2;
    for p in n.space().degrees() {
        let q = -p - 5;
        for i in 0..n.dim(p) {
            for j in 0..m.dim(q) {
                let mut left = BitVec::zeros(dim0);
                for r in n.word_matrix(theta, p).col(i).ones() {
                    left.flip(idx.index(p + 5, r, q, j));
                }
                let mut right = BitVec::zeros(dim0);
                for r in m.word_matrix(theta, q).col(j).ones() {
                    right.flip(idx.index(p, i, q + 5, r));
                }
                for f in maps.basis() {
                    if f.dot(&left) != f.dot(&right) {
                        return Err(format!("asymmetry at n in degree {p}, m in degree {q}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Dimensions of `A ⊗ B` by direct convolution of the dimension tables.
pub fn convolve_dims(a: &A1Module, b: &A1Module) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for (p, x) in a.dim_table() {
        for (q, y) in b.dim_table() {
            if x * y > 0 {
                *out.entry(p + q).or_insert(0) += x * y;
            }
        }
    }
    out.retain(|_, v| *v > 0);
    out
}

pub fn flock(parts: &[(u32, i32)]) -> A1Module {
    direct_sum_all(&parts.iter().map(|&(n, k)| suspend(&seagull(n), k)).collect::<Vec<_>>())
}
