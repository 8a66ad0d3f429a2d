//! Seagull modules, free summands and the classification of bounded-below
//! Q0-local modules as flocks (direct sums of suspended seagulls).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Sq, Word};
use crate::exec::Execution;
use crate::f2linalg::{self, BitMatrix, BitVec, Echelon};
use crate::margolis::is_q0_local;
use crate::module::{self, direct_sum_all, suspend, tensor, A1Module, Element, GradedMap, ModuleBuilder, ModuleError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("module is not Q0-local: H(M; Q1) is nonzero in degree {degree}")]
    NotQ0Local { degree: i32 },
    #[error("decomposition failed in degree {degree}: {reason}")]
    DecompositionFailed { degree: i32, reason: String },
    #[error("cutoff {cutoff} is too small (need at least {minimum})")]
    InvalidCutoff { cutoff: i32, minimum: i32 },
    #[error("cannot compare flocks known through different cutoffs ({left:?} vs {right:?})")]
    IncomparableCutoffs { left: Option<i32>, right: Option<i32> },
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// The seagull `Υ_n`: generators `y_{4j}` (`0 <= j < n`) spanning
/// `y, Sq2 y, Sq1Sq2 y, Sq2Sq1Sq2 y` with `Sq1 y_{4j} = Sq2Sq1Sq2 y_{4(j-1)}`.
pub fn seagull(n: u32) -> A1Module {
    seagull_builder(n as i32, None).build().expect("seagulls are modules")
}

/// `Υ∞` truncated above degree `d`.
pub fn seagull_inf(d: i32) -> A1Module {
    let n = if d < 0 { 0 } else { d / 4 + 1 };
    seagull_builder(n, Some(d)).build().expect("truncated seagulls are modules")
}

fn seagull_builder(n: i32, cutoff: Option<i32>) -> ModuleBuilder {
    let mut b = ModuleBuilder::new();
    let fits = |deg: i32| cutoff.is_none_or(|d| deg <= d);
    let names = |j: i32| {
        let g = 4 * j;
        [(format!("y{g}"), g), (format!("Sq2y{g}"), g + 2), (format!("Sq1Sq2y{g}"), g + 3), (format!("Sq2Sq1Sq2y{g}"), g + 5)]
    };
    for j in 0..n {
        for (l, deg) in names(j) {
            if fits(deg) {
                b.add_basis(&l, deg).unwrap();
            }
        }
    }
    for j in 0..n {
        let [y, s2, s12, top] = names(j);
        let mut act = |s: Sq, from: &(String, i32), to: &(String, i32)| {
            if fits(to.1) {
                b.set_action(s, &from.0, &[to.0.as_str()]).unwrap();
            }
        };
        act(Sq::Sq2, &y, &s2);
        act(Sq::Sq1, &s2, &s12);
        act(Sq::Sq2, &s12, &top);
        if j > 0 {
            let prev_top = names(j - 1)[3].clone();
            act(Sq::Sq1, &y, &prev_top);
        }
    }
    if let Some(d) = cutoff {
        b.truncate_above(d);
    }
    b
}

/// Length of a seagull in a decomposition; `AtLeast` marks seagulls that
/// may continue past the degrees a truncated input determines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeagullLength {
    Exact(u32),
    AtLeast(u32),
}

impl SeagullLength {
    pub fn count(self) -> u32 {
        match self {
            SeagullLength::Exact(n) | SeagullLength::AtLeast(n) => n,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, SeagullLength::Exact(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeagullSpec {
    pub shift: i32,
    pub length: SeagullLength,
}

impl SeagullSpec {
    pub fn exact(shift: i32, n: u32) -> Self {
        SeagullSpec { shift, length: SeagullLength::Exact(n) }
    }

    pub fn at_least(shift: i32, n: u32) -> Self {
        SeagullSpec { shift, length: SeagullLength::AtLeast(n) }
    }

    pub fn top_generator(&self) -> i32 {
        self.shift + 4 * (self.length.count() as i32 - 1)
    }
}

/// The isomorphism type of a flock up to free summands, with the free ranks
/// that were split off (keyed by generator degree).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FlockDescriptor {
    pub seagulls: Vec<SeagullSpec>,
    pub free_ranks: BTreeMap<i32, usize>,
    pub cutoff: Option<i32>,
}

impl FlockDescriptor {
    pub fn new(mut seagulls: Vec<SeagullSpec>, free_ranks: BTreeMap<i32, usize>, cutoff: Option<i32>) -> Self {
        seagulls.sort();
        free_ranks.iter().for_each(|(_, &r)| debug_assert!(r > 0));
        FlockDescriptor { seagulls, free_ranks, cutoff }
    }

    pub fn free_rank(&self) -> usize {
        self.free_ranks.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.seagulls.is_empty()
    }
}

impl fmt::Display for FlockDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .seagulls
            .iter()
            .map(|s| match s.length {
                SeagullLength::Exact(n) => format!("Σ^{} Υ{}", s.shift, n),
                SeagullLength::AtLeast(n) => format!("Σ^{} Υ≥{}", s.shift, n),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" ⊕ "))?;
        }
        for (k, r) in &self.free_ranks {
            write!(f, " ⊕ free[{k}]^{r}")?;
        }
        Ok(())
    }
}

/// `M` with its free summands removed.
#[derive(Clone, Debug)]
pub struct Stripped {
    pub reduced: A1Module,
    pub free_ranks: BTreeMap<i32, usize>,
    /// Inclusion of the reduced summand into the input module.
    pub inclusion: GradedMap,
}

/// Splits off free summands and returns the reduced complement and the
/// free ranks by generator degree. For a module truncated at `D`, only free
/// summands generated in degrees `<= D - 6` are visible.
pub fn strip_free(m: &A1Module) -> (A1Module, BTreeMap<i32, usize>) {
    let s = strip_free_detailed(m);
    (s.reduced, s.free_ranks)
}

pub fn strip_free_detailed(m: &A1Module) -> Stripped {
    let mut cur = m.clone();
    let mut incl = GradedMap::identity(m.dims());
    let mut free_ranks = BTreeMap::new();
    if m.is_zero() {
        return Stripped { reduced: cur, free_ranks, inclusion: incl };
    }
    let limit = m.reliable_hi(6);
    for k in m.lo()..=limit {
        loop {
            let t = cur.word_matrix(Word::TOP, k);
            let Some(c) = (0..t.cols()).find(|&c| !t.col(c).is_zero()) else { break };
            let p = t.col(c).first_one().unwrap();
            let (sub, inc) = split_free(&cur, k, p).expect("the annihilated complement is a submodule");
            debug_assert_eq!(sub.total_dim() + 8, cur.total_dim());
            incl = inc.then(&incl);
            cur = sub;
            *free_ranks.entry(k).or_insert(0) += 1;
        }
    }
    Stripped { reduced: cur, free_ranks, inclusion: incl }
}

/// The complement of a free summand `A(1)·x` (`x` in degree `k`, with
/// coordinate `p` of `Sq2Sq1Sq2Sq1 x` nonzero): the largest submodule on
/// which the functional `e_p^*` on degree `k + 6` vanishes after any
/// operation. It is the kernel of the A(1)-linear retraction onto `A(1)·x`.
fn split_free(m: &A1Module, k: i32, p: usize) -> Result<(A1Module, GradedMap), ModuleError> {
    let mut bases = BTreeMap::new();
    for j in m.space().degrees() {
        let n = m.dim(j);
        let words: Vec<Word> = Word::all().filter(|w| j + w.degree() == k + 6).collect();
        if words.is_empty() {
            bases.insert(j, (0..n).map(|i| BitVec::unit(n, i)).collect());
            continue;
        }
        let rows: Vec<BitVec> = words.iter().map(|&w| m.word_matrix(w, j).row(p)).collect();
        let c = f2linalg::kernel(&BitMatrix::from_rows(n, &rows));
        bases.insert(j, c.basis().to_vec());
    }
    m.submodule(&bases)
}

/// Explicit generators of one seagull summand: `generators[j]` lies in
/// degree `shift + 4j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeagullWitness {
    pub spec: SeagullSpec,
    pub generators: Vec<Element>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub descriptor: FlockDescriptor,
    /// Witness generators in the coordinates of the input module.
    pub witnesses: Vec<SeagullWitness>,
    /// Highest degree at which the induction ran.
    pub horizon: Option<i32>,
    pub log: Vec<String>,
}

#[derive(Clone, Debug)]
struct Tracked {
    shift: i32,
    gens: Vec<BitVec>,
}

impl Tracked {
    fn top_generator(&self) -> i32 {
        self.shift + 4 * (self.gens.len() as i32 - 1)
    }

    fn generator_at(&self, d: i32) -> Option<&BitVec> {
        if d < self.shift || (d - self.shift) % 4 != 0 {
            return None;
        }
        self.gens.get(((d - self.shift) / 4) as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Y,
    Sq2Y,
    Sq1Sq2Y,
    Top,
}

impl Kind {
    fn offset(self) -> i32 {
        match self {
            Kind::Y => 0,
            Kind::Sq2Y => 2,
            Kind::Sq1Sq2Y => 3,
            Kind::Top => 5,
        }
    }

    fn word(self) -> Word {
        match self {
            Kind::Y => Word::ONE,
            Kind::Sq2Y => Word::SQ2,
            Kind::Sq1Sq2Y => Word::SQ1SQ2,
            Kind::Top => Word::SQ2SQ1SQ2,
        }
    }
}

struct Entry {
    seagull: usize,
    kind: Kind,
    generator_degree: i32,
    vector: BitVec,
}

/// Images in degree `j` of the flock basis carried by the tracked seagulls.
fn entries(m: &A1Module, seagulls: &[Tracked], j: i32) -> Vec<Entry> {
    let mut out = Vec::new();
    for (s, t) in seagulls.iter().enumerate() {
        for kind in [Kind::Y, Kind::Sq2Y, Kind::Sq1Sq2Y, Kind::Top] {
            let g = j - kind.offset();
            if let Some(y) = t.generator_at(g) {
                let e = m.act_word(kind.word(), &Element::new(g, y.clone()));
                out.push(Entry { seagull: s, kind, generator_degree: g, vector: e.vector });
            }
        }
    }
    out
}

fn fail(degree: i32, reason: &str) -> StructureError {
    StructureError::DecompositionFailed { degree, reason: reason.to_string() }
}

/// Degree-by-degree construction of a flock basis of a reduced Q0-local
/// module, run through degree `horizon`.
fn decompose_reduced(m: &A1Module, horizon: i32, log: &mut Vec<String>) -> Result<Vec<Tracked>, StructureError> {
    let mut seagulls: Vec<Tracked> = Vec::new();
    if m.is_zero() {
        return Ok(seagulls);
    }
    for k in m.lo()..=horizon {
        let n = m.dim(k);
        if n == 0 {
            continue;
        }
        let mut ech = Echelon::new(n);
        for e in entries(m, &seagulls, k) {
            if !ech.insert(e.vector) {
                return Err(fail(k, "images of lower generators are dependent"));
            }
        }
        let sq1 = m.sq(Sq::Sq1, k).into_owned();
        let ker = f2linalg::kernel(&sq1);
        let opened: Vec<BitVec> = ker.basis().iter().filter(|v| ech.insert((*v).clone())).cloned().collect();
        let rest: Vec<BitVec> = (0..n).map(|i| BitVec::unit(n, i)).filter(|u| ech.insert(u.clone())).collect();

        for b0 in rest {
            let mut b = b0;
            let above = entries(m, &seagulls, k + 1);
            let vectors: Vec<BitVec> = above.iter().map(|e| e.vector.clone()).collect();
            let coords = f2linalg::coordinates(&vectors, &sq1.apply(&b))
                .ok_or_else(|| fail(k, "Sq1 of a new generator leaves the submodule generated below"))?;
            let mut hits = Vec::new();
            for i in coords.ones() {
                let e = &above[i];
                match e.kind {
                    Kind::Sq1Sq2Y => {
                        let y = seagulls[e.seagull].generator_at(e.generator_degree).unwrap().clone();
                        b.add_assign(&m.act_word(Word::SQ2, &Element::new(e.generator_degree, y)).vector);
                    }
                    Kind::Top => hits.push(e.seagull),
                    _ => return Err(fail(k, "Sq1 of a new generator has a component outside im(Sq1) + im(Sq2Sq1Sq2)")),
                }
            }
            let mut available = Vec::new();
            for s in hits {
                match seagulls[s].generator_at(k) {
                    Some(y) => b.add_assign(y),
                    None => available.push(s),
                }
            }
            let &p = available
                .iter()
                .min_by_key(|&&s| (seagulls[s].shift, s))
                .ok_or_else(|| fail(k, "no available seagull to extend"))?;
            let shift = seagulls[p].shift;
            let mut gens = Vec::new();
            for d in (shift..k).step_by(4) {
                let mut x = BitVec::zeros(m.dim(d));
                for &q in &available {
                    if let Some(y) = seagulls[q].generator_at(d) {
                        x.add_assign(y);
                    }
                }
                gens.push(x);
            }
            gens.push(b);
            log.push(format!(
                "degree {k}: extended the seagull from degree {shift} (hit {} available tops)",
                available.len()
            ));
            seagulls[p].gens = gens;
        }
        for b in opened {
            log.push(format!("degree {k}: opened a seagull"));
            seagulls.push(Tracked { shift: k, gens: vec![b] });
        }
    }
    for j in m.lo()..=horizon + 5 {
        let mut ech = Echelon::new(m.dim(j));
        let es = entries(m, &seagulls, j);
        let count = es.len();
        if !es.into_iter().all(|e| ech.insert(e.vector)) {
            return Err(fail(j, "flock basis is dependent"));
        }
        if j <= horizon && count != m.dim(j) {
            return Err(fail(j, "flock basis does not span"));
        }
    }
    Ok(seagulls)
}

/// Classifies a bounded-below Q0-local module.
///
/// A module truncated at `D` is handled through degree `D - 6`: free
/// summands are visible there and every decision of the induction depends
/// only on genuine degrees. Seagulls whose next generator would lie past
/// that horizon are reported as `AtLeast`.
pub fn classify(m: &A1Module) -> Result<DecompositionReport, StructureError> {
    let verdict = is_q0_local(m);
    if let Some(degree) = verdict.first_failure {
        return Err(StructureError::NotQ0Local { degree });
    }
    let stripped = strip_free_detailed(m);
    let mut log: Vec<String> =
        stripped.free_ranks.iter().map(|(k, r)| format!("degree {k}: split off {r} free summand(s)")).collect();
    let r = &stripped.reduced;
    let horizon = match m.truncated_above() {
        Some(d) => d - 6,
        None => r.hi(),
    };
    let tracked = decompose_reduced(r, horizon, &mut log)?;
    let mut witnesses = Vec::new();
    for t in &tracked {
        let n = t.gens.len() as u32;
        let exact = m.truncated_above().is_none() || t.top_generator() + 4 <= horizon;
        let spec = if exact { SeagullSpec::exact(t.shift, n) } else { SeagullSpec::at_least(t.shift, n) };
        let generators = t
            .gens
            .iter()
            .enumerate()
            .map(|(j, y)| stripped.inclusion.apply(&Element::new(t.shift + 4 * j as i32, y.clone())))
            .collect();
        witnesses.push(SeagullWitness { spec, generators });
    }
    witnesses.sort_by(|a, b| a.spec.cmp(&b.spec));
    let descriptor = FlockDescriptor::new(
        witnesses.iter().map(|w| w.spec).collect(),
        stripped.free_ranks.clone(),
        m.truncated_above(),
    );
    let horizon = (!m.is_zero()).then_some(horizon);
    Ok(DecompositionReport { descriptor, witnesses, horizon, log })
}

/// Classifies several modules, in parallel when enabled.
pub fn classify_batch(modules: &[A1Module], exec: Execution) -> Vec<Result<DecompositionReport, StructureError>> {
    exec.map(modules, classify)
}

#[derive(Clone, Debug)]
pub struct Localization {
    /// `Υ∞ ⊗ M`, truncated at `cutoff`.
    pub module: A1Module,
    pub report: DecompositionReport,
    pub cutoff: i32,
}

/// Q0-localization `L0 M = Υ∞ ⊗ M`, classified through `cutoff`.
pub fn localize_q0(m: &A1Module, cutoff: i32) -> Result<Localization, StructureError> {
    let lo = if m.is_zero() { 0 } else { m.lo() };
    let minimum = lo + 6;
    if cutoff < minimum {
        return Err(StructureError::InvalidCutoff { cutoff, minimum });
    }
    let l = tensor(&seagull_inf(cutoff - lo), m);
    let l = module::truncate(&l, cutoff);
    let report = classify(&l)?;
    let cutoff = l.truncated_above().unwrap_or(cutoff);
    Ok(Localization { module: l, report, cutoff })
}

/// Horizon of the classification of a module truncated at `d`.
pub fn horizon_for(cutoff: Option<i32>) -> Option<i32> {
    cutoff.map(|d| d - 6)
}

/// Compares the flock parts of two Q0-local modules, ignoring free summands.
pub fn stably_equivalent(a: &A1Module, b: &A1Module) -> Result<bool, StructureError> {
    let da = classify(a)?.descriptor;
    let db = classify(b)?.descriptor;
    descriptors_stably_equal(&da, &db)
}

pub fn descriptors_stably_equal(a: &FlockDescriptor, b: &FlockDescriptor) -> Result<bool, StructureError> {
    if a.cutoff == b.cutoff {
        return Ok(a.seagulls == b.seagulls);
    }
    let h = [horizon_for(a.cutoff), horizon_for(b.cutoff)].into_iter().flatten().min().unwrap();
    let decided = |d: &FlockDescriptor| -> Result<Vec<SeagullSpec>, StructureError> {
        let mut out = Vec::new();
        for s in d.seagulls.iter().filter(|s| s.shift <= h) {
            if !s.length.is_exact() || s.top_generator() + 4 > h {
                return Err(StructureError::IncomparableCutoffs { left: a.cutoff, right: b.cutoff });
            }
            out.push(*s);
        }
        Ok(out)
    };
    Ok(decided(a)? == decided(b)?)
}

/// A module with the given flock descriptor: suspended seagulls (truncated
/// `Υ∞` for `AtLeast` entries) plus free summands.
pub fn realize(d: &FlockDescriptor) -> Result<A1Module, StructureError> {
    let mut parts = Vec::new();
    for s in &d.seagulls {
        let part = match s.length {
            SeagullLength::Exact(n) => suspend(&seagull(n), s.shift),
            SeagullLength::AtLeast(_) => {
                let c = d.cutoff.ok_or(StructureError::InvalidCutoff { cutoff: i32::MIN, minimum: s.shift })?;
                suspend(&seagull_inf(c - s.shift), s.shift)
            }
        };
        parts.push(part);
    }
    for (&k, &r) in &d.free_ranks {
        for _ in 0..r {
            parts.push(suspend(&A1Module::free(), k));
        }
    }
    let mut m = direct_sum_all(&parts);
    if let Some(c) = d.cutoff {
        m = module::truncate(&m, c);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margolis::{margolis_homology, Operator, Side};

    #[test]
    fn seagull_two_degrees() {
        let y = seagull(2);
        let degrees: Vec<i32> = y.dim_table().keys().copied().collect();
        assert_eq!(degrees, vec![0, 2, 3, 4, 5, 6, 7, 9]);
        let h = margolis_homology(&y, Operator::Q0, Side::Module);
        assert_eq!(h.dim_table(), BTreeMap::from([(0, 1), (9, 1)]));
    }

    #[test]
    fn classify_single_seagull() {
        let r = classify(&seagull(3)).unwrap();
        assert_eq!(r.descriptor.seagulls, vec![SeagullSpec::exact(0, 3)]);
        assert!(r.descriptor.free_ranks.is_empty());
    }

    #[test]
    fn free_module_strips() {
        let (red, ranks) = strip_free(&A1Module::free());
        assert!(red.is_zero());
        assert_eq!(ranks, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn infinite_seagull_is_open_ended() {
        let r = classify(&seagull_inf(22)).unwrap();
        assert_eq!(r.descriptor.seagulls, vec![SeagullSpec::at_least(0, 5)]);
    }
}
