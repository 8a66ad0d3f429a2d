//! Minimal free resolutions over A(0) and A(1), Ext charts and h0-towers.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, Sq, Word};
use crate::f2linalg::{self, BitMatrix, BitVec};
use crate::module::A1Module;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("internal degree {max_t} exceeds the truncation degree {cutoff}")]
    TruncationTooTight { max_t: i32, cutoff: i32 },
    #[error("h0-tower count in stem {stem} did not stabilize for s in {from}..{to}")]
    NotStabilized { stem: i32, from: u32, to: u32 },
}

/// A free module over A(0) or A(1) on generators of nondecreasing degree.
#[derive(Clone, Debug)]
pub struct FreeModule {
    algebra: Algebra,
    gens: Vec<i32>,
    lo: i32,
    bases: Vec<Vec<(usize, Word)>>,
    index: Vec<HashMap<(usize, Word), usize>>,
}

impl FreeModule {
    fn new(algebra: Algebra, lo: i32) -> Self {
        FreeModule { algebra, gens: Vec::new(), lo, bases: Vec::new(), index: Vec::new() }
    }

    pub fn generator_degrees(&self) -> &[i32] {
        &self.gens
    }

    fn compute_basis(&self, t: i32) -> Vec<(usize, Word)> {
        let mut out = Vec::new();
        for (g, &d) in self.gens.iter().enumerate() {
            for w in self.algebra.words() {
                if d + w.degree() == t {
                    out.push((g, w));
                }
            }
        }
        out
    }

    /// Caches bases for degrees `lo..=hi`; called once the generators are final.
    fn finalize(&mut self, hi: i32) {
        self.bases = (self.lo..=hi).map(|t| self.compute_basis(t)).collect();
        self.index = self.bases.iter().map(|b| b.iter().enumerate().map(|(i, &x)| (x, i)).collect()).collect();
    }

    pub fn basis(&self, t: i32) -> &[(usize, Word)] {
        if t < self.lo {
            return &[];
        }
        self.bases.get((t - self.lo) as usize).map(|b| b.as_slice()).unwrap_or(&[])
    }

    pub fn dim(&self, t: i32) -> usize {
        self.basis(t).len()
    }

    fn act(&self, s: Sq, t: i32, v: &BitVec) -> BitVec {
        let target = t + s.degree();
        let mut out = BitVec::zeros(self.dim(target));
        for i in v.ones() {
            let (g, w) = self.basis(t)[i];
            if let Some(w2) = w.left_mul(s) {
                let j = self.index[(target - self.lo) as usize][&(g, w2)];
                out.flip(j);
            }
        }
        out
    }
}

enum Target<'a> {
    Module(&'a A1Module),
    Free(&'a FreeModule),
}

impl Target<'_> {
    fn dim(&self, t: i32) -> usize {
        match self {
            Target::Module(m) => m.dim(t),
            Target::Free(f) => f.dim(t),
        }
    }

    fn act_word(&self, w: Word, t: i32, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        let mut deg = t;
        for &s in w.letters().iter().rev() {
            v = match self {
                Target::Module(m) => m.sq(s, deg).apply(&v),
                Target::Free(f) => f.act(s, deg, &v),
            };
            deg += s.degree();
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub free: FreeModule,
    /// `d(g)` for each generator, in the target's degree `|g|`.
    pub images: Vec<BitVec>,
}

/// A minimal free resolution `... -> F_1 -> F_0 -> M`, computed for
/// homological degrees `s <= max_s` and internal degrees `t <= max_t`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub algebra: Algebra,
    pub module: A1Module,
    pub max_s: u32,
    pub max_t: i32,
    pub stages: Vec<Stage>,
}

impl Resolution {
    fn lo(&self) -> i32 {
        if self.module.is_zero() {
            0
        } else {
            self.module.lo()
        }
    }

    fn target(&self, s: usize) -> Target<'_> {
        if s == 0 {
            Target::Module(&self.module)
        } else {
            Target::Free(&self.stages[s - 1].free)
        }
    }

    /// Matrix of `d_s : (F_s)_t -> (F_{s-1})_t` (or to `M_t` when `s = 0`).
    pub fn differential(&self, s: usize, t: i32) -> BitMatrix {
        let stage = &self.stages[s];
        let target = self.target(s);
        let cols: Vec<BitVec> = stage
            .free
            .basis(t)
            .iter()
            .map(|&(g, w)| target.act_word(w, stage.free.gens[g], &stage.images[g]))
            .collect();
        BitMatrix::from_cols(target.dim(t), &cols)
    }

    pub fn generators(&self, s: usize) -> &[i32] {
        &self.stages[s].free.gens
    }

    pub fn chart(&self) -> ExtChart {
        let mut dims = BTreeMap::new();
        for (s, stage) in self.stages.iter().enumerate() {
            for &t in &stage.free.gens {
                *dims.entry((s as u32, t)).or_insert(0) += 1;
            }
        }
        ExtChart { algebra: self.algebra, max_s: self.max_s, max_t: self.max_t, dims }
    }

    /// `d_{s-1} ∘ d_s = 0` in every computed bidegree.
    pub fn is_complex(&self) -> bool {
        (1..self.stages.len()).all(|s| {
            (self.lo()..=self.max_t).all(|t| self.differential(s - 1, t).mul(&self.differential(s, t)).is_zero())
        })
    }

    /// Exactness: `d_0` is onto and `im d_s = ker d_{s-1}` in every computed bidegree.
    pub fn is_exact(&self) -> bool {
        (0..self.stages.len()).all(|s| {
            (self.lo()..=self.max_t).all(|t| {
                let rank = self.differential(s, t).rank();
                let expected = if s == 0 {
                    self.module.dim(t)
                } else {
                    let d = self.differential(s - 1, t);
                    d.cols() - d.rank()
                };
                rank == expected
            })
        })
    }

    /// No generator maps onto a generator of the previous stage.
    pub fn is_minimal(&self) -> bool {
        (1..self.stages.len()).all(|s| {
            let prev = &self.stages[s - 1].free;
            self.stages[s].images.iter().zip(&self.stages[s].free.gens).all(|(v, &t)| {
                v.ones().all(|i| prev.basis(t)[i].1 != Word::ONE)
            })
        })
    }
}

/// Resolves `m` over `algebra` through `(max_s, max_t)`.
pub fn resolve(m: &A1Module, algebra: Algebra, max_s: u32, max_t: i32) -> Result<Resolution, ResolutionError> {
    if let Some(cutoff) = m.truncated_above() {
        if max_t > cutoff {
            return Err(ResolutionError::TruncationTooTight { max_t, cutoff });
        }
    }
    let lo = if m.is_zero() { 0 } else { m.lo() };
    let mut res = Resolution { algebra, module: m.clone(), max_s, max_t, stages: Vec::new() };
    for s in 0..=max_s as usize {
        let mut stage = Stage { free: FreeModule::new(algebra, lo), images: Vec::new() };
        for t in lo..=max_t {
            let cycles = if s == 0 {
                f2linalg::Subspace::full(m.dim(t))
            } else {
                f2linalg::kernel(&res.differential(s - 1, t))
            };
            if cycles.dim() == 0 {
                continue;
            }
            let target = res.target(s);
            let cols: Vec<BitVec> = stage
                .free
                .compute_basis(t)
                .iter()
                .map(|&(g, w)| target.act_word(w, stage.free.gens[g], &stage.images[g]))
                .collect();
            let image = f2linalg::Subspace::from_spanning(cycles.ambient(), &cols);
            for v in f2linalg::complement_vectors(&image, cycles.basis()) {
                stage.free.gens.push(t);
                stage.images.push(v);
            }
        }
        stage.free.finalize(max_t + 6);
        res.stages.push(stage);
    }
    Ok(res)
}

/// Generator counts of a minimal resolution: `dim Ext^{s,t}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtChart {
    pub algebra: Algebra,
    pub max_s: u32,
    pub max_t: i32,
    #[serde(with = "pairs")]
    pub dims: BTreeMap<(u32, i32), usize>,
}

mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<(u32, i32), usize>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(&(a, b), &c)| (a, b, c)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(u32, i32), usize>, D::Error> {
        let v: Vec<(u32, i32, usize)> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|(a, b, c)| ((a, b), c)).collect())
    }
}

impl ExtChart {
    pub fn dim(&self, s: u32, t: i32) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    /// Internal degrees of the generators in filtration `s`, with multiplicity.
    pub fn degrees_at(&self, s: u32) -> Vec<i32> {
        let mut out = Vec::new();
        for (&(s2, t), &n) in &self.dims {
            if s2 == s {
                out.extend(std::iter::repeat_n(t, n));
            }
        }
        out
    }
}

pub fn ext_dims(m: &A1Module, algebra: Algebra, max_s: u32, max_t: i32) -> Result<ExtChart, ResolutionError> {
    Ok(resolve(m, algebra, max_s, max_t)?.chart())
}

/// Default stabilization rule: start at `s = (stem - bottom) + 8` and
/// require `window` consecutive equal values.
pub const DEFAULT_WINDOW: u32 = 4;
pub const STABLE_OFFSET: i32 = 8;

/// Number of h0-towers in each stem `bottom..=max_stem` of `Ext_{A(1)}(M)`.
pub fn h0_tower_count(m: &A1Module, max_stem: i32, window: u32) -> Result<BTreeMap<i32, usize>, ResolutionError> {
    let lo = if m.is_zero() { 0 } else { m.lo() };
    let start = |d: i32| ((d - lo) + STABLE_OFFSET).max(0) as u32;
    let max_s = start(max_stem) + window - 1;
    let max_t = max_s as i32 + max_stem;
    let chart = ext_dims(m, Algebra::A1, max_s, max_t)?;
    let mut out = BTreeMap::new();
    for d in lo..=max_stem {
        let s0 = start(d);
        let values: Vec<usize> = (s0..s0 + window).map(|s| chart.dim(s, s as i32 + d)).collect();
        if values.windows(2).any(|w| w[0] != w[1]) {
            return Err(ResolutionError::NotStabilized { stem: d, from: s0, to: s0 + window - 1 });
        }
        if values[0] > 0 {
            out.insert(d, values[0]);
        }
    }
    Ok(out)
}
