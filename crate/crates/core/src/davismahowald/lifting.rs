//! Obstructions to extending an A(1)-action to the full Steenrod algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::spectral::{d2, default_cutoff, D2Pair};
use crate::algebra::{Sq, Word};
use crate::f2linalg::{BitMatrix, BitVec, Echelon};
use crate::margolis::is_q0_local;
use crate::module::A1Module;
use crate::structure::{classify, localize_q0, SeagullSpec, StructureError};

/// Outcome of the single-relation Sq4 solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sq4Result {
    /// A solution `S4_k : M_k -> M_{k+4}` for every degree.
    Feasible { solution: BTreeMap<i32, BitMatrix> },
    /// The system `Sq1 S4 + S4 Sq1 = Sq2Sq1Sq2` first fails in source degree `degree`.
    Infeasible { degree: i32 },
}

impl Sq4Result {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Sq4Result::Feasible { .. })
    }
}

/// Searches for `S4` with `Sq1 S4 + S4 Sq1 = Sq2Sq1Sq2` on `m`.
pub fn sq4_solver(m: &A1Module) -> Sq4Result {
    if m.is_zero() {
        return Sq4Result::Feasible { solution: BTreeMap::new() };
    }
    let (lo, hi) = (m.lo(), m.hi());
    // Variable layout: S4_k[r, c] for k in lo..=hi-4, row-major.
    let mut offsets = BTreeMap::new();
    let mut n = 0;
    for k in lo..=hi - 4 {
        offsets.insert(k, n);
        n += m.dim(k + 4) * m.dim(k);
    }
    let var = |k: i32, r: usize, c: usize| offsets.get(&k).map(|&o| o + r * m.dim(k) + c);
    let mut ech = Echelon::new(n + 1);
    for k in lo..=hi - 5 {
        let (src, tgt) = (m.dim(k), m.dim(k + 5));
        if src == 0 || tgt == 0 {
            continue;
        }
        let s1_hi = m.sq(Sq::Sq1, k + 4);
        let s1_lo = m.sq(Sq::Sq1, k);
        let theta = m.word_matrix(Word::SQ2SQ1SQ2, k);
        for r in 0..tgt {
            for c in 0..src {
                let mut row = BitVec::zeros(n + 1);
                // (Sq1 S4_k)[r, c] = sum_j Sq1[r, j] S4_k[j, c]
                for j in 0..m.dim(k + 4) {
                    if s1_hi.get(r, j) {
                        row.flip(var(k, j, c).unwrap());
                    }
                }
                // (S4_{k+1} Sq1)[r, c] = sum_j S4_{k+1}[r, j] Sq1[j, c]
                for j in 0..m.dim(k + 1) {
                    if s1_lo.get(j, c) {
                        row.flip(var(k + 1, r, j).unwrap());
                    }
                }
                if theta.get(r, c) {
                    row.flip(n);
                }
                let reduced = ech.reduce(&row);
                if reduced.first_one() == Some(n) {
                    return Sq4Result::Infeasible { degree: k };
                }
                ech.insert(reduced);
            }
        }
    }
    let mut x = BitVec::zeros(n);
    for (p, row) in ech.pivot_rows() {
        if row.get(n) {
            x.set(*p, true);
        }
    }
    let mut solution = BTreeMap::new();
    for (&k, _) in &offsets {
        let mut s = BitMatrix::zeros(m.dim(k + 4), m.dim(k));
        for r in 0..m.dim(k + 4) {
            for c in 0..m.dim(k) {
                s.set(r, c, x.get(var(k, r, c).unwrap()));
            }
        }
        solution.insert(k, s);
    }
    Sq4Result::Feasible { solution }
}

/// Checks a candidate `S4` against the relation in every degree.
pub fn satisfies_sq4_relation(m: &A1Module, solution: &BTreeMap<i32, BitMatrix>) -> bool {
    if m.is_zero() {
        return true;
    }
    let s4 = |k: i32| solution.get(&k).cloned().unwrap_or_else(|| BitMatrix::zeros(m.dim(k + 4), m.dim(k)));
    (m.lo()..=m.hi()).all(|k| {
        let lhs = m.sq(Sq::Sq1, k + 4).mul(&s4(k)).add(&s4(k + 1).mul(&m.sq(Sq::Sq1, k)));
        lhs == m.word_matrix(Word::SQ2SQ1SQ2, k)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftOutcome {
    NoLift,
    Lifts,
    Inconclusive,
}

/// Evidence gathered by the individual detectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftEvidence {
    /// `source · Sq2Sq1Sq2 = target` on nonzero dual Q0-homology classes.
    D2Witness(D2Pair),
    /// `L0 M` has a seagull of finite length.
    FiniteSeagull { spec: SeagullSpec, cutoff: i32 },
    /// `M` is Q0-local and every seagull in its flock is infinite (or there are none).
    InfiniteFlock { flock: String },
    Sq4 { feasible: bool, obstruction_degree: Option<i32> },
    /// A detector could not run.
    Skipped { detector: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftVerdict {
    pub outcome: LiftOutcome,
    pub evidence: Vec<LiftEvidence>,
}

/// Runs the d2, classification and Sq4 detectors. `cutoff` bounds the
/// localization `L0 M`; by default it is 24 degrees past the top of `m`.
pub fn lift_check(m: &A1Module, cutoff: Option<i32>) -> Result<LiftVerdict, StructureError> {
    let mut evidence = Vec::new();
    let mut outcome = None;

    let pairs = d2(m).pairs();
    if !pairs.is_empty() {
        outcome.get_or_insert(LiftOutcome::NoLift);
    }
    evidence.extend(pairs.into_iter().map(LiftEvidence::D2Witness));

    if !m.is_zero() {
        let cutoff = cutoff.unwrap_or_else(|| default_cutoff(m));
        match localize_q0(m, cutoff) {
            Ok(loc) => {
                for s in loc.report.descriptor.seagulls.iter().filter(|s| s.length.is_exact()) {
                    outcome.get_or_insert(LiftOutcome::NoLift);
                    evidence.push(LiftEvidence::FiniteSeagull { spec: *s, cutoff: loc.cutoff });
                }
            }
            Err(e @ StructureError::InvalidCutoff { .. }) => {
                evidence.push(LiftEvidence::Skipped { detector: "localization".into(), reason: e.to_string() });
            }
            Err(e) => return Err(e),
        }
    }

    if is_q0_local(m).local {
        let report = classify(m)?;
        if report.descriptor.seagulls.iter().all(|s| !s.length.is_exact()) {
            outcome.get_or_insert(LiftOutcome::Lifts);
            evidence.push(LiftEvidence::InfiniteFlock { flock: report.descriptor.to_string() });
        }
    }

    let sq4 = sq4_solver(m);
    let obstruction_degree = match &sq4 {
        Sq4Result::Infeasible { degree } => Some(*degree),
        Sq4Result::Feasible { .. } => None,
    };
    evidence.push(LiftEvidence::Sq4 { feasible: sq4.is_feasible(), obstruction_degree });
    if !sq4.is_feasible() {
        outcome.get_or_insert(LiftOutcome::NoLift);
    }

    Ok(LiftVerdict { outcome: outcome.unwrap_or(LiftOutcome::Inconclusive), evidence })
}
