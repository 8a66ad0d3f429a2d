//! The h0-localized Davis–Mahowald spectral sequence: E1 from dual
//! Q0-homology, the closed d2 formula, E3, and localized Ext.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Word;
use crate::f2linalg::{self, BitMatrix, BitVec, Subspace};
use crate::margolis::{margolis_homology, q0_map, Operator, Side};
use crate::module::{dualize, A1Module, DualModule, Element};
use crate::structure::{localize_q0, FlockDescriptor, SeagullLength, StructureError};

/// A basis of `H(M_*; Q0)`, with classes indexed by the `M`-degree they pair with.
#[derive(Clone, Debug)]
pub struct DualQ0Homology {
    pub dual: DualModule,
    /// `M`-degrees `[lo, hi]` in which the homology is exact.
    pub reliable: Option<(i32, i32)>,
    /// Keyed by `M`-degree `k`; vectors live in dual degree `-k`.
    pub classes: BTreeMap<i32, Vec<BitVec>>,
}

impl DualQ0Homology {
    pub fn compute(m: &A1Module) -> Self {
        let h = margolis_homology(m, Operator::Q0, Side::Dual);
        let classes = h.representatives.into_iter().map(|(d, v)| (-d, v)).collect();
        DualQ0Homology { dual: dualize(m), reliable: h.reliable.map(|(lo, hi)| (-hi, -lo)), classes }
    }

    pub fn dim(&self, k: i32) -> usize {
        self.classes.get(&k).map_or(0, |v| v.len())
    }

    pub fn label(&self, k: i32, i: usize) -> String {
        self.dual.as_module().space().describe(-k, &self.classes[&k][i])
    }

    /// Coordinates of a dual cycle in the chosen basis, modulo `im Q0`.
    pub fn coordinates(&self, k: i32, v: &BitVec) -> BitVec {
        let dm = self.dual.as_module();
        let reps = self.classes.get(&k).cloned().unwrap_or_default();
        let q = q0_map(dm);
        let boundaries = f2linalg::image(&q.block(-k - 1));
        let mut vectors = reps.clone();
        vectors.extend(boundaries.basis().iter().cloned());
        let x = f2linalg::coordinates(&vectors, v).expect("dual cycle lies in span of classes and boundaries");
        x.slice(0, reps.len())
    }
}

/// One basis record of the localized E1 page: the family `h0^s x3^σ [b_*]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Record {
    pub sigma: u32,
    /// `M`-degree of the class.
    pub degree: i32,
    pub index: usize,
    pub label: String,
    pub stem: i32,
    /// Every record is an h0-tower after localization.
    pub h0_tower: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedE1 {
    pub max_sigma: u32,
    pub reliable: Option<(i32, i32)>,
    pub records: Vec<E1Record>,
}

impl LocalizedE1 {
    pub fn stems(&self, sigma: u32) -> Vec<i32> {
        self.records.iter().filter(|r| r.sigma == sigma).map(|r| r.stem).collect()
    }
}

fn records_from(h: &DualQ0Homology, max_sigma: u32, keep: impl Fn(i32, usize) -> bool) -> Vec<E1Record> {
    let mut out = Vec::new();
    for sigma in (0..=max_sigma).step_by(2) {
        for (&k, reps) in &h.classes {
            for i in 0..reps.len() {
                if keep(k, i) {
                    out.push(E1Record {
                        sigma,
                        degree: k,
                        index: i,
                        label: h.label(k, i),
                        stem: 2 * sigma as i32 + k,
                        h0_tower: true,
                    });
                }
            }
        }
    }
    out
}

/// The localized E1 page through filtration `max_sigma`.
pub fn e1_page(m: &A1Module, max_sigma: u32) -> LocalizedE1 {
    let h = DualQ0Homology::compute(m);
    LocalizedE1 { max_sigma, reliable: h.reliable, records: records_from(&h, max_sigma, |_, _| true) }
}

/// `d2` on dual Q0-homology: `[b_*] ↦ [b_* Sq2Sq1Sq2]`, from `M`-degree `k`
/// to `k - 5`. Independent of `σ`.
#[derive(Clone, Debug)]
pub struct D2Map {
    pub homology: DualQ0Homology,
    /// Matrix `H_k -> H_{k-5}` keyed by the source degree `k`.
    pub blocks: BTreeMap<i32, BitMatrix>,
}

/// A nonzero d2 entry: `source · Sq2Sq1Sq2` has a nonzero `target` coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct D2Pair {
    pub source_degree: i32,
    pub source: String,
    pub target_degree: i32,
    pub target: String,
}

impl D2Map {
    pub fn block(&self, k: i32) -> BitMatrix {
        self.blocks.get(&k).cloned().unwrap_or_else(|| BitMatrix::zeros(self.homology.dim(k - 5), self.homology.dim(k)))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|b| b.is_zero())
    }

    pub fn pairs(&self) -> Vec<D2Pair> {
        let mut out = Vec::new();
        for (&k, b) in &self.blocks {
            for c in 0..b.cols() {
                for r in b.col(c).ones() {
                    out.push(D2Pair {
                        source_degree: k,
                        source: self.homology.label(k, c),
                        target_degree: k - 5,
                        target: self.homology.label(k - 5, r),
                    });
                }
            }
        }
        out
    }

    /// Applies d2 to an arbitrary dual Q0-cycle in `M`-degree `k`.
    pub fn image_of_cycle(&self, k: i32, v: &BitVec) -> BitVec {
        let dm = self.homology.dual.as_module();
        let y = self.homology.dual.act_right(&Element::new(-k, v.clone()), Word::SQ2SQ1SQ2);
        debug_assert!(dm.act(crate::algebra::Sq::Sq1, &y).is_zero());
        self.homology.coordinates(k - 5, &y.vector)
    }
}

/// Computes d2 with the margolis module's representatives.
pub fn d2(m: &A1Module) -> D2Map {
    d2_with(DualQ0Homology::compute(m))
}

/// Computes d2 from a given choice of homology representatives.
pub fn d2_with(homology: DualQ0Homology) -> D2Map {
    let mut map = D2Map { homology, blocks: BTreeMap::new() };
    let keys: Vec<i32> = map.homology.classes.keys().copied().collect();
    for k in keys {
        if map.homology.dim(k - 5) == 0 {
            continue;
        }
        let reps = map.homology.classes[&k].clone();
        let cols: Vec<BitVec> = reps.iter().map(|v| map.image_of_cycle(k, v)).collect();
        let block = BitMatrix::from_cols(map.homology.dim(k - 5), &cols);
        map.blocks.insert(k, block);
    }
    map
}

/// Dimension of the E3 page in each `(σ, M-degree)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E3Page {
    pub max_sigma: u32,
    pub reliable: Option<(i32, i32)>,
    /// `(σ, k, dim)` for nonzero entries.
    pub entries: Vec<(u32, i32, usize)>,
}

impl E3Page {
    pub fn dim(&self, sigma: u32, k: i32) -> usize {
        self.entries.iter().find(|e| e.0 == sigma && e.1 == k).map_or(0, |e| e.2)
    }

    pub fn stems(&self, sigma: u32) -> Vec<i32> {
        self.entries.iter().filter(|e| e.0 == sigma).map(|e| 2 * sigma as i32 + e.1).collect()
    }

    pub fn total_dim(&self, sigma: u32) -> usize {
        self.entries.iter().filter(|e| e.0 == sigma).map(|e| e.2).sum()
    }
}

/// Homology of d2: `ker D_k` at `σ = 0` and `ker D_k / im D_{k+5}` above.
pub fn e3_page(m: &A1Module, max_sigma: u32) -> E3Page {
    let d = d2(m);
    let h = &d.homology;
    let mut entries = Vec::new();
    for sigma in (0..=max_sigma).step_by(2) {
        for &k in h.classes.keys() {
            let ker = f2linalg::kernel(&d.block(k)).dim();
            let im = if sigma == 0 { 0 } else { d.block(k + 5).rank() };
            let dim = ker - im;
            if dim > 0 {
                entries.push((sigma, k, dim));
            }
        }
    }
    E3Page { max_sigma, reliable: h.reliable, entries }
}

/// Tower stems of `h0^{-1} Ext_{A(1)}(Υ_n)`, or of `Υ∞` through `bound`.
pub fn seagull_localized_ext(n: Option<u32>, bound: i32) -> Vec<i32> {
    match n {
        Some(n) => (0..n as i32).map(|j| 4 * j).collect(),
        None => (0..).map(|j| 4 * j).take_while(|&s| s <= bound).collect(),
    }
}

/// h0-towers per stem, assembled from the classification of `L0 M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedExt {
    pub cutoff: i32,
    pub descriptor: FlockDescriptor,
    /// Stems through which the tower counts are certain.
    pub reliable_through: i32,
    pub towers: BTreeMap<i32, usize>,
}

impl LocalizedExt {
    pub fn stems(&self) -> Vec<i32> {
        self.towers.keys().copied().collect()
    }
}

/// Default cutoff for localizing `m`: 24 degrees past its top, capped by
/// its own truncation.
pub fn default_cutoff(m: &A1Module) -> i32 {
    let lo = if m.is_zero() { 0 } else { m.lo() };
    let hi = if m.is_zero() { 0 } else { m.hi() };
    let c = (hi + 24).max(lo + 24);
    m.truncated_above().map_or(c, |t| c.min(t))
}

pub fn localized_ext(m: &A1Module, cutoff: i32) -> Result<LocalizedExt, StructureError> {
    let loc = localize_q0(m, cutoff)?;
    let descriptor = loc.report.descriptor.clone();
    let horizon = loc.report.horizon.unwrap_or(loc.cutoff - 6);
    let mut reliable_through = horizon;
    for s in &descriptor.seagulls {
        if let SeagullLength::AtLeast(n) = s.length {
            reliable_through = reliable_through.min(s.shift + 4 * n as i32 - 1);
        }
    }
    let mut towers = BTreeMap::new();
    for s in &descriptor.seagulls {
        let stems = match s.length {
            SeagullLength::Exact(n) => seagull_localized_ext(Some(n), 0),
            SeagullLength::AtLeast(_) => seagull_localized_ext(None, reliable_through - s.shift),
        };
        for t in stems {
            let stem = s.shift + t;
            if stem <= reliable_through {
                *towers.entry(stem).or_insert(0) += 1;
            }
        }
    }
    Ok(LocalizedExt { cutoff: loc.cutoff, descriptor, reliable_through, towers })
}

/// A Q0-homology basis re-chosen by adding random boundaries and mixing
/// classes within each degree; used to test representative independence.
pub fn perturb_representatives(h: &DualQ0Homology, mut coin: impl FnMut() -> bool) -> DualQ0Homology {
    let dm = h.dual.as_module();
    let q = q0_map(dm);
    let mut classes = BTreeMap::new();
    for (&k, reps) in &h.classes {
        let boundaries: Subspace = f2linalg::image(&q.block(-k - 1));
        let mut out = Vec::new();
        for (i, v) in reps.iter().enumerate() {
            let mut w = v.clone();
            for b in boundaries.basis() {
                if coin() {
                    w.add_assign(b);
                }
            }
            for u in &reps[..i] {
                if coin() {
                    w.add_assign(u);
                }
            }
            out.push(w);
        }
        classes.insert(k, out);
    }
    DualQ0Homology { dual: h.dual.clone(), reliable: h.reliable, classes }
}
