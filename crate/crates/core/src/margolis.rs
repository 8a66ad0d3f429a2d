//! Margolis homology for Q0 = Sq1 and Q1 = Sq2Sq1 + Sq1Sq2.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Sq;
use crate::exec::Execution;
use crate::f2linalg::{self, BitVec};
use crate::module::{dualize, A1Module, GradedMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    Q0,
    Q1,
}

impl Operator {
    pub fn degree(self) -> i32 {
        match self {
            Operator::Q0 => 1,
            Operator::Q1 => 3,
        }
    }

    /// Degrees lost at the top of a module truncated at `D`.
    fn slack(self) -> i32 {
        match self {
            Operator::Q0 => 1,
            Operator::Q1 => 5,
        }
    }
}

/// Whether homology is taken on `M` or on its dual `M_*` (right action).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Module,
    Dual,
}

pub fn q0_map(m: &A1Module) -> GradedMap {
    m.sq_map(Sq::Sq1).clone()
}

pub fn q1_map(m: &A1Module) -> GradedMap {
    let a = m.sq_map(Sq::Sq1).then(m.sq_map(Sq::Sq2));
    let b = m.sq_map(Sq::Sq2).then(m.sq_map(Sq::Sq1));
    a.add(&b)
}

pub fn operator_map(m: &A1Module, op: Operator) -> GradedMap {
    match op {
        Operator::Q0 => q0_map(m),
        Operator::Q1 => q1_map(m),
    }
}

/// Homology `ker Q / im Q` degree by degree, with representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MargolisHomology {
    pub operator: Operator,
    pub side: Side,
    /// Degrees `[lo, hi]` in which the answer is exact.
    pub reliable: Option<(i32, i32)>,
    /// Representatives of a basis of homology in each nonzero degree.
    pub representatives: BTreeMap<i32, Vec<BitVec>>,
}

impl MargolisHomology {
    pub fn dim(&self, k: i32) -> usize {
        self.representatives.get(&k).map_or(0, |v| v.len())
    }

    pub fn total_dim(&self) -> usize {
        self.representatives.values().map(|v| v.len()).sum()
    }

    pub fn dim_table(&self) -> BTreeMap<i32, usize> {
        self.representatives.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// Degrees in which homology of `m` is exact.
pub fn reliable_range(m: &A1Module, op: Operator) -> Option<(i32, i32)> {
    if m.is_zero() {
        return None;
    }
    let hi = m.reliable_hi(op.slack());
    (m.lo() <= hi).then_some((m.lo(), hi))
}

pub fn margolis_homology(m: &A1Module, op: Operator, side: Side) -> MargolisHomology {
    margolis_homology_with(m, op, side, Execution::default())
}

pub fn margolis_homology_with(m: &A1Module, op: Operator, side: Side, exec: Execution) -> MargolisHomology {
    match side {
        Side::Module => {
            let reliable = reliable_range(m, op);
            let representatives = match reliable {
                Some((lo, hi)) => homology_in_range(m, op, lo, hi, exec),
                None => BTreeMap::new(),
            };
            MargolisHomology { operator: op, side, reliable, representatives }
        }
        Side::Dual => {
            let d = dualize(m);
            let reliable = reliable_range(m, op).map(|(lo, hi)| (-hi, -lo));
            let representatives = match reliable {
                Some((lo, hi)) => homology_in_range(d.as_module(), op, lo, hi, exec),
                None => BTreeMap::new(),
            };
            MargolisHomology { operator: op, side, reliable, representatives }
        }
    }
}

fn homology_in_range(m: &A1Module, op: Operator, lo: i32, hi: i32, exec: Execution) -> BTreeMap<i32, Vec<BitVec>> {
    let q = operator_map(m, op);
    let per_degree = exec.map_range(lo, hi, |k| {
        let cycles = q.kernel(k);
        let boundaries = f2linalg::image(&q.block(k - op.degree()));
        let reps = f2linalg::complement_vectors(&boundaries, cycles.basis());
        (k, reps)
    });
    per_degree.into_iter().filter(|(_, r)| !r.is_empty()).collect()
}

/// Result of testing whether `H(M; Q1)` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Q0LocalVerdict {
    pub local: bool,
    pub first_failure: Option<i32>,
    pub reliable: Option<(i32, i32)>,
}

pub fn is_q0_local(m: &A1Module) -> Q0LocalVerdict {
    let h = margolis_homology(m, Operator::Q1, Side::Module);
    let first_failure = h.representatives.keys().next().copied();
    Q0LocalVerdict { local: first_failure.is_none(), first_failure, reliable: h.reliable }
}

/// A basis of `M` adapted to Sq1: pairs `(b, Sq1 b)` and Sq1-homology classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct A0Decomposition {
    /// `(degree of b, b, Sq1 b)`.
    pub pairs: Vec<(i32, BitVec, BitVec)>,
    pub trivial: Vec<(i32, BitVec)>,
}

pub fn a0_decompose(m: &A1Module) -> A0Decomposition {
    let q = q0_map(m);
    let mut pairs = Vec::new();
    let mut trivial = Vec::new();
    for k in m.space().degrees() {
        let n = m.dim(k);
        let ker = q.kernel(k);
        let units: Vec<BitVec> = (0..n).map(|i| BitVec::unit(n, i)).collect();
        for b in f2linalg::complement_vectors(&ker, &units) {
            let image = q.block(k).apply(&b);
            pairs.push((k, b, image));
        }
        let boundaries = f2linalg::image(&q.block(k - 1));
        for r in f2linalg::complement_vectors(&boundaries, ker.basis()) {
            trivial.push((k, r));
        }
    }
    A0Decomposition { pairs, trivial }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_module_is_acyclic() {
        let f = A1Module::free();
        assert!(margolis_homology(&f, Operator::Q0, Side::Module).is_zero());
        assert!(margolis_homology(&f, Operator::Q1, Side::Module).is_zero());
        let d = a0_decompose(&f);
        assert_eq!(d.pairs.len(), 4);
        assert!(d.trivial.is_empty());
    }

    #[test]
    fn trivial_module() {
        let h = margolis_homology(&A1Module::f2(), Operator::Q1, Side::Module);
        assert_eq!(h.dim_table(), BTreeMap::from([(0, 1)]));
        assert!(!is_q0_local(&A1Module::f2()).local);
    }
}
