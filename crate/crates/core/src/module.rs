//! Graded vector spaces, graded maps and finite (or truncated) A(1)-modules.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Sq, Word};
use crate::exec::Execution;
use crate::f2linalg::{self, BitMatrix, BitVec, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("{op} {label} has degree {label_degree} but target `{target}` has degree {target_degree}")]
    DegreeMismatch { op: String, label: String, label_degree: i32, target: String, target_degree: i32 },
    #[error("action of {op} on `{0}` declared twice", op = .1)]
    DuplicateAction(String, String),
    #[error("basis element `{label}` in degree {degree} lies above the truncation degree {cutoff}")]
    AboveTruncation { label: String, degree: i32, cutoff: i32 },
    #[error("matrix of {op} from degree {degree} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch { op: String, degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("relation {relation} fails on degree {degree}")]
    RelationViolation { degree: i32, relation: Relation },
    #[error("vectors in degree {degree} do not span a submodule")]
    NotASubmodule { degree: i32 },
    #[error("generator images do not define an A(1)-linear map (degree {degree})")]
    InconsistentMap { degree: i32 },
    #[error("generators do not span the source in degree {degree}")]
    NotGenerated { degree: i32 },
    #[error("change of basis in degree {degree} is not invertible")]
    NotInvertible { degree: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// Sq1 Sq1 = 0
    Sq1Sq1,
    /// Sq2 Sq2 = Sq1 Sq2 Sq1
    Sq2Sq2,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::Sq1Sq1 => f.write_str("Sq1Sq1 = 0"),
            Relation::Sq2Sq2 => f.write_str("Sq2Sq2 = Sq1Sq2Sq1"),
        }
    }
}

/// Dimensions of a graded space, starting at degree `lo`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dims {
    lo: i32,
    dims: Vec<usize>,
}

impl Dims {
    pub fn dim(&self, k: i32) -> usize {
        if k < self.lo {
            return 0;
        }
        self.dims.get((k - self.lo) as usize).copied().unwrap_or(0)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }
}

/// A graded F2-vector space with a labelled basis in each degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GradedSpace {
    lo: i32,
    labels: Vec<Vec<String>>,
}

impl GradedSpace {
    /// Builds a space from labels per degree starting at `lo`; empty
    /// degrees at either end are trimmed.
    pub fn new(lo: i32, labels: Vec<Vec<String>>) -> Self {
        let first = labels.iter().position(|l| !l.is_empty());
        let Some(first) = first else { return GradedSpace::default() };
        let last = labels.iter().rposition(|l| !l.is_empty()).unwrap();
        GradedSpace { lo: lo + first as i32, labels: labels[first..=last].to_vec() }
    }

    pub fn zero() -> Self {
        GradedSpace::default()
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.labels.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self, k: i32) -> usize {
        self.labels(k).len()
    }

    pub fn labels(&self, k: i32) -> &[String] {
        if k < self.lo {
            return &[];
        }
        self.labels.get((k - self.lo) as usize).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(|l| l.len()).sum()
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dims(&self) -> Dims {
        Dims { lo: self.lo, dims: self.labels.iter().map(|l| l.len()).collect() }
    }

    /// Nonzero dimensions by degree.
    pub fn dim_table(&self) -> BTreeMap<i32, usize> {
        self.degrees().filter(|&k| self.dim(k) > 0).map(|k| (k, self.dim(k))).collect()
    }

    pub fn find_label(&self, label: &str) -> Option<(i32, usize)> {
        for k in self.degrees() {
            if let Some(i) = self.labels(k).iter().position(|l| l == label) {
                return Some((k, i));
            }
        }
        None
    }

    /// Human-readable name of a vector: its basis labels joined by `+`.
    pub fn describe(&self, k: i32, v: &BitVec) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        v.ones().map(|i| self.labels(k)[i].as_str()).collect::<Vec<_>>().join("+")
    }
}

/// A homogeneous element of a graded space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    pub degree: i32,
    pub vector: BitVec,
}

impl Element {
    pub fn new(degree: i32, vector: BitVec) -> Self {
        Element { degree, vector }
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero()
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(self.degree, other.degree, "adding elements of different degrees");
        Element { degree: self.degree, vector: self.vector.add(&other.vector) }
    }
}

/// A degree-shifting linear map between graded spaces; the block for
/// source degree `k` is a `dim target(k + shift) x dim source(k)` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedMap {
    source: Dims,
    target: Dims,
    shift: i32,
    blocks: Vec<BitMatrix>,
}

impl GradedMap {
    pub fn from_fn(source: Dims, target: Dims, shift: i32, mut f: impl FnMut(i32) -> BitMatrix) -> Self {
        let blocks = (source.lo()..=source.hi()).map(&mut f).collect();
        GradedMap { source, target, shift, blocks }
    }

    pub fn zero(source: Dims, target: Dims, shift: i32) -> Self {
        let (s, t) = (source.clone(), target.clone());
        Self::from_fn(source, target, shift, |k| BitMatrix::zeros(t.dim(k + shift), s.dim(k)))
    }

    pub fn identity(space: Dims) -> Self {
        let s = space.clone();
        Self::from_fn(space.clone(), space, 0, |k| BitMatrix::identity(s.dim(k)))
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn source(&self) -> &Dims {
        &self.source
    }

    pub fn target(&self) -> &Dims {
        &self.target
    }

    pub fn block(&self, k: i32) -> Cow<'_, BitMatrix> {
        if k >= self.source.lo() && k <= self.source.hi() {
            Cow::Borrowed(&self.blocks[(k - self.source.lo()) as usize])
        } else {
            Cow::Owned(BitMatrix::zeros(self.target.dim(k + self.shift), self.source.dim(k)))
        }
    }

    pub fn apply(&self, e: &Element) -> Element {
        Element::new(e.degree + self.shift, self.block(e.degree).apply(&e.vector))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GradedMap) -> GradedMap {
        let shift = self.shift + other.shift;
        GradedMap::from_fn(self.source.clone(), other.target.clone(), shift, |k| {
            other.block(k + self.shift).mul(&self.block(k))
        })
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        assert_eq!(self.shift, other.shift, "adding maps of different degree");
        GradedMap::from_fn(self.source.clone(), self.target.clone(), self.shift, |k| {
            self.block(k).add(&other.block(k))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn kernel(&self, k: i32) -> Subspace {
        f2linalg::kernel(&self.block(k))
    }

    pub fn image(&self, k: i32) -> Subspace {
        f2linalg::image(&self.block(k - self.shift))
    }
}

/// A finite A(1)-module, or the quotient `M / M_{>D}` of a bounded-below
/// module when `truncated_above` is `Some(D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct A1Module {
    space: GradedSpace,
    sq1: GradedMap,
    sq2: GradedMap,
    truncated_above: Option<i32>,
}

impl A1Module {
    /// Validates shapes and the defining relations and returns the module.
    pub fn new(
        space: GradedSpace,
        mut sq1: impl FnMut(i32) -> BitMatrix,
        mut sq2: impl FnMut(i32) -> BitMatrix,
        truncated_above: Option<i32>,
    ) -> Result<Self, ModuleError> {
        let dims = space.dims();
        let mut blocks = [Vec::new(), Vec::new()];
        for k in space.degrees() {
            for (slot, op) in [Sq::Sq1, Sq::Sq2].into_iter().enumerate() {
                let m = if op == Sq::Sq1 { sq1(k) } else { sq2(k) };
                let expected = (dims.dim(k + op.degree()), dims.dim(k));
                if (m.rows(), m.cols()) != expected {
                    return Err(ModuleError::ShapeMismatch {
                        op: op.name().to_string(),
                        degree: k,
                        expected,
                        found: (m.rows(), m.cols()),
                    });
                }
                blocks[slot].push(m);
            }
        }
        let [b1, b2] = blocks;
        let module = A1Module {
            sq1: GradedMap { source: dims.clone(), target: dims.clone(), shift: 1, blocks: b1 },
            sq2: GradedMap { source: dims.clone(), target: dims, shift: 2, blocks: b2 },
            space,
            truncated_above,
        };
        if let Some(d) = truncated_above {
            if !module.space.is_zero() && module.hi() > d {
                let k = module.hi();
                return Err(ModuleError::AboveTruncation {
                    label: module.space.labels(k)[0].clone(),
                    degree: k,
                    cutoff: d,
                });
            }
        }
        module.check_relations(Execution::default())?;
        Ok(module)
    }

    fn from_parts(space: GradedSpace, sq1: GradedMap, sq2: GradedMap, truncated_above: Option<i32>) -> Self {
        A1Module { space, sq1, sq2, truncated_above }
    }

    /// Checks Sq1Sq1 = 0 and Sq2Sq2 = Sq1Sq2Sq1 on every degree.
    pub fn check_relations(&self, exec: Execution) -> Result<(), ModuleError> {
        let failures = exec.map_range(self.lo(), self.hi(), |k| {
            if !self.letters_matrix(&[Sq::Sq1, Sq::Sq1], k).is_zero() {
                return Some((k, Relation::Sq1Sq1));
            }
            let lhs = self.letters_matrix(&[Sq::Sq2, Sq::Sq2], k);
            let rhs = self.letters_matrix(&[Sq::Sq1, Sq::Sq2, Sq::Sq1], k);
            if lhs != rhs {
                return Some((k, Relation::Sq2Sq2));
            }
            None
        });
        match failures.into_iter().flatten().next() {
            Some((degree, relation)) => Err(ModuleError::RelationViolation { degree, relation }),
            None => Ok(()),
        }
    }

    pub fn zero() -> Self {
        A1Module::new(GradedSpace::zero(), |_| unreachable!(), |_| unreachable!(), None).unwrap()
    }

    /// F2 concentrated in degree 0.
    pub fn f2() -> Self {
        let space = GradedSpace::new(0, vec![vec!["1".to_string()]]);
        A1Module::new(space, |_| BitMatrix::zeros(0, 1), |_| BitMatrix::zeros(0, 1), None).unwrap()
    }

    /// The free module A(1) on one generator in degree 0.
    pub fn free() -> Self {
        let mut labels = vec![Vec::new(); 7];
        for w in Word::all() {
            labels[w.degree() as usize].push(w.name());
        }
        let space = GradedSpace::new(0, labels);
        let index = |w: Word| -> (i32, usize) {
            let k = w.degree();
            (k, Word::all().filter(|v| v.degree() == k && v.index() < w.index()).count())
        };
        let dims = space.dims();
        let dims = &dims;
        let action = |s: Sq| {
            move |k: i32| {
                let mut m = BitMatrix::zeros(dims.dim(k + s.degree()), dims.dim(k));
                for w in Word::all().filter(|w| w.degree() == k) {
                    if let Some(t) = w.left_mul(s) {
                        m.set(index(t).1, index(w).1, true);
                    }
                }
                m
            }
        };
        A1Module::new(space.clone(), action(Sq::Sq1), action(Sq::Sq2), None).unwrap()
    }

    /// An A(0)-module given by `sq1` blocks, with Sq2 acting as zero.
    pub fn with_trivial_sq2(space: GradedSpace, sq1: impl FnMut(i32) -> BitMatrix) -> Result<Self, ModuleError> {
        let dims = space.dims();
        A1Module::new(space, sq1, |k| BitMatrix::zeros(dims.dim(k + 2), dims.dim(k)), None)
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn lo(&self) -> i32 {
        self.space.lo()
    }

    pub fn hi(&self) -> i32 {
        self.space.hi()
    }

    pub fn dim(&self, k: i32) -> usize {
        self.space.dim(k)
    }

    pub fn total_dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn is_zero(&self) -> bool {
        self.space.is_zero()
    }

    pub fn dims(&self) -> Dims {
        self.space.dims()
    }

    pub fn dim_table(&self) -> BTreeMap<i32, usize> {
        self.space.dim_table()
    }

    pub fn truncated_above(&self) -> Option<i32> {
        self.truncated_above
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated_above.is_some()
    }

    pub fn labels(&self, k: i32) -> &[String] {
        self.space.labels(k)
    }

    pub fn sq_map(&self, s: Sq) -> &GradedMap {
        match s {
            Sq::Sq1 => &self.sq1,
            Sq::Sq2 => &self.sq2,
        }
    }

    pub fn sq(&self, s: Sq, k: i32) -> Cow<'_, BitMatrix> {
        self.sq_map(s).block(k)
    }

    /// Matrix of a product of generators (left to right) on degree `k`.
    pub fn letters_matrix(&self, letters: &[Sq], k: i32) -> BitMatrix {
        let mut m = BitMatrix::identity(self.dim(k));
        let mut deg = k;
        for &s in letters.iter().rev() {
            m = self.sq(s, deg).mul(&m);
            deg += s.degree();
        }
        m
    }

    pub fn word_matrix(&self, w: Word, k: i32) -> BitMatrix {
        self.letters_matrix(w.letters(), k)
    }

    /// The graded map given by a basis word.
    pub fn word_map(&self, w: Word) -> GradedMap {
        GradedMap::from_fn(self.dims(), self.dims(), w.degree(), |k| self.word_matrix(w, k))
    }

    pub fn act(&self, s: Sq, e: &Element) -> Element {
        self.sq_map(s).apply(e)
    }

    pub fn act_letters(&self, letters: &[Sq], e: &Element) -> Element {
        let mut e = e.clone();
        for &s in letters.iter().rev() {
            e = self.act(s, &e);
        }
        e
    }

    pub fn act_word(&self, w: Word, e: &Element) -> Element {
        self.act_letters(w.letters(), e)
    }

    pub fn basis_element(&self, k: i32, i: usize) -> Element {
        Element::new(k, BitVec::unit(self.dim(k), i))
    }

    pub fn zero_element(&self, k: i32) -> Element {
        Element::new(k, BitVec::zeros(self.dim(k)))
    }

    pub fn element(&self, label: &str) -> Option<Element> {
        self.space.find_label(label).map(|(k, i)| self.basis_element(k, i))
    }

    pub fn describe(&self, e: &Element) -> String {
        self.space.describe(e.degree, &e.vector)
    }

    /// Highest degree `k` such that degrees `k..k+slack` are all genuine.
    pub fn reliable_hi(&self, slack: i32) -> i32 {
        match self.truncated_above {
            Some(d) => self.hi().min(d - slack),
            None => self.hi(),
        }
    }

    /// Applies an invertible change of basis `p[k]` in each degree: the new
    /// basis of degree `k` is given by the columns of `p[k]`. Degrees not
    /// present in `p` keep their basis.
    pub fn change_basis(&self, p: &BTreeMap<i32, BitMatrix>) -> Result<A1Module, ModuleError> {
        let mut inv = BTreeMap::new();
        for (&k, m) in p {
            if m.rows() != self.dim(k) || !m.is_invertible() {
                return Err(ModuleError::NotInvertible { degree: k });
            }
            inv.insert(k, m.inverse().unwrap());
        }
        let fwd = |k: i32| p.get(&k).cloned().unwrap_or_else(|| BitMatrix::identity(self.dim(k)));
        let back = |k: i32| inv.get(&k).cloned().unwrap_or_else(|| BitMatrix::identity(self.dim(k)));
        let conj = |s: Sq| move |k: i32| back(k + s.degree()).mul(&self.sq(s, k)).mul(&fwd(k));
        let labels: Vec<Vec<String>> = self
            .space
            .degrees()
            .map(|k| {
                let f = fwd(k);
                (0..self.dim(k)).map(|c| self.space.describe(k, &f.col(c))).collect()
            })
            .collect();
        A1Module::new(GradedSpace::new(self.lo(), labels), conj(Sq::Sq1), conj(Sq::Sq2), self.truncated_above)
    }

    /// The submodule with the given basis in each degree, with its inclusion map.
    pub fn submodule(&self, bases: &BTreeMap<i32, Vec<BitVec>>) -> Result<(A1Module, GradedMap), ModuleError> {
        let basis = |k: i32| bases.get(&k).cloned().unwrap_or_default();
        let labels: Vec<Vec<String>> =
            self.space.degrees().map(|k| basis(k).iter().map(|v| self.space.describe(k, v)).collect()).collect();
        let space = GradedSpace::new(self.lo(), labels);
        let mut maps = Vec::new();
        for s in [Sq::Sq1, Sq::Sq2] {
            let mut blocks = Vec::new();
            for k in space.degrees() {
                let src = basis(k);
                let tgt = basis(k + s.degree());
                let mut m = BitMatrix::zeros(space.dim(k + s.degree()), space.dim(k));
                for (c, v) in src.iter().enumerate() {
                    let image = self.sq(s, k).apply(v);
                    let x = f2linalg::coordinates(&tgt, &image).ok_or(ModuleError::NotASubmodule { degree: k })?;
                    for r in x.ones() {
                        m.set(r, c, true);
                    }
                }
                blocks.push(m);
            }
            maps.push(GradedMap { source: space.dims(), target: space.dims(), shift: s.degree(), blocks });
        }
        let sq2 = maps.pop().unwrap();
        let sq1 = maps.pop().unwrap();
        let sub = A1Module::from_parts(space.clone(), sq1, sq2, self.truncated_above);
        let incl = GradedMap::from_fn(space.dims(), self.dims(), 0, |k| BitMatrix::from_cols(self.dim(k), &basis(k)));
        Ok((sub, incl))
    }

    /// Checks that a degree-preserving or shifting map commutes with Sq1 and Sq2.
    pub fn is_linear_map(&self, target: &A1Module, f: &GradedMap) -> bool {
        [Sq::Sq1, Sq::Sq2].iter().all(|&s| {
            self.space.degrees().all(|k| {
                let lhs = target.sq(s, k + f.shift()).mul(&f.block(k));
                let rhs = f.block(k + s.degree()).mul(&self.sq(s, k));
                lhs == rhs
            })
        })
    }

    /// The A(1)-linear map `self -> target` (raising degree by `shift`)
    /// determined by the images of a generating set.
    pub fn map_from_generators(
        &self,
        target: &A1Module,
        shift: i32,
        images: &[(Element, Element)],
    ) -> Result<GradedMap, ModuleError> {
        let mut src: HashMap<i32, Vec<BitVec>> = HashMap::new();
        let mut tgt: HashMap<i32, Vec<BitVec>> = HashMap::new();
        for (g, v) in images {
            assert_eq!(g.degree + shift, v.degree, "generator image has the wrong degree");
            for w in Word::all() {
                let k = g.degree + w.degree();
                if self.dim(k) == 0 {
                    continue;
                }
                src.entry(k).or_default().push(self.act_word(w, g).vector);
                tgt.entry(k).or_default().push(target.act_word(w, v).vector);
            }
        }
        let mut blocks = BTreeMap::new();
        for k in self.space.degrees() {
            let n = self.dim(k);
            let m = target.dim(k + shift);
            if n == 0 {
                continue;
            }
            let s = src.remove(&k).unwrap_or_default();
            let t = tgt.remove(&k).unwrap_or_default();
            let chosen = independent_columns(&s, n);
            if chosen.len() < n {
                return Err(ModuleError::NotGenerated { degree: k });
            }
            let basis = BitMatrix::from_cols(n, &chosen.iter().map(|&i| s[i].clone()).collect::<Vec<_>>());
            let values = BitMatrix::from_cols(m, &chosen.iter().map(|&i| t[i].clone()).collect::<Vec<_>>());
            let block = values.mul(&basis.inverse().expect("chosen columns are a basis"));
            for (sv, tv) in s.iter().zip(&t) {
                if block.apply(sv) != *tv {
                    return Err(ModuleError::InconsistentMap { degree: k });
                }
            }
            blocks.insert(k, block);
        }
        let dims = self.dims();
        let tdims = target.dims();
        Ok(GradedMap::from_fn(dims.clone(), tdims.clone(), shift, |k| {
            blocks.remove(&k).unwrap_or_else(|| BitMatrix::zeros(tdims.dim(k + shift), dims.dim(k)))
        }))
    }
}

/// Indices of a maximal independent subset of `vectors`, chosen greedily.
fn independent_columns(vectors: &[BitVec], ambient: usize) -> Vec<usize> {
    let mut ech = f2linalg::Echelon::new(ambient);
    (0..vectors.len()).filter(|&i| ech.insert(vectors[i].clone())).collect()
}

/// Incrementally assembles a module from labelled basis elements and actions.
#[derive(Clone, Debug, Default)]
pub struct ModuleBuilder {
    basis: Vec<(String, i32)>,
    index: HashMap<String, usize>,
    actions: HashMap<(Sq, usize), Vec<usize>>,
    truncated_above: Option<i32>,
}

impl ModuleBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_basis(&mut self, label: &str, degree: i32) -> Result<(), ModuleError> {
        if self.index.contains_key(label) {
            return Err(ModuleError::DuplicateLabel(label.to_string()));
        }
        self.index.insert(label.to_string(), self.basis.len());
        self.basis.push((label.to_string(), degree));
        Ok(())
    }

    pub fn degree_of(&self, label: &str) -> Option<i32> {
        self.index.get(label).map(|&i| self.basis[i].1)
    }

    /// Declares `s(source) = sum of targets`; an empty target list means zero.
    pub fn set_action(&mut self, s: Sq, source: &str, targets: &[&str]) -> Result<(), ModuleError> {
        let &si = self.index.get(source).ok_or_else(|| ModuleError::UnknownLabel(source.to_string()))?;
        let sd = self.basis[si].1;
        let mut ts = Vec::new();
        for t in targets {
            let &ti = self.index.get(*t).ok_or_else(|| ModuleError::UnknownLabel(t.to_string()))?;
            let td = self.basis[ti].1;
            if td != sd + s.degree() {
                return Err(ModuleError::DegreeMismatch {
                    op: s.name().to_string(),
                    label: source.to_string(),
                    label_degree: sd,
                    target: t.to_string(),
                    target_degree: td,
                });
            }
            ts.push(ti);
        }
        if self.actions.insert((s, si), ts).is_some() {
            return Err(ModuleError::DuplicateAction(source.to_string(), s.name().to_string()));
        }
        Ok(())
    }

    pub fn truncate_above(&mut self, d: i32) {
        self.truncated_above = Some(d);
    }

    pub fn build(&self) -> Result<A1Module, ModuleError> {
        if let Some(d) = self.truncated_above {
            if let Some((l, k)) = self.basis.iter().find(|(_, k)| *k > d) {
                return Err(ModuleError::AboveTruncation { label: l.clone(), degree: *k, cutoff: d });
            }
        }
        let lo = self.basis.iter().map(|b| b.1).min().unwrap_or(0);
        let hi = self.basis.iter().map(|b| b.1).max().unwrap_or(-1);
        let mut labels = vec![Vec::new(); (hi - lo + 1).max(0) as usize];
        let mut position = vec![0usize; self.basis.len()];
        for (i, (l, k)) in self.basis.iter().enumerate() {
            let slot = &mut labels[(k - lo) as usize];
            position[i] = slot.len();
            slot.push(l.clone());
        }
        let space = GradedSpace::new(lo, labels);
        let dims = space.dims();
        let action = |s: Sq| {
            let dims = &dims;
            let position = &position;
            move |k: i32| {
                let mut m = BitMatrix::zeros(dims.dim(k + s.degree()), dims.dim(k));
                for (i, (_, d)) in self.basis.iter().enumerate() {
                    if *d != k {
                        continue;
                    }
                    if let Some(ts) = self.actions.get(&(s, i)) {
                        for &t in ts {
                            let r = position[t];
                            m.set(r, position[i], !m.get(r, position[i]));
                        }
                    }
                }
                m
            }
        };
        A1Module::new(space.clone(), action(Sq::Sq1), action(Sq::Sq2), self.truncated_above)
    }
}

fn disambiguate(taken: &mut std::collections::HashSet<String>, label: &str) -> String {
    let mut l = label.to_string();
    while taken.contains(&l) {
        l.push('\'');
    }
    taken.insert(l.clone());
    l
}

/// Direct sum; labels of the second summand that collide get primes appended.
/// If either summand is truncated, the sum is truncated at the lower cutoff.
pub fn direct_sum(a: &A1Module, b: &A1Module) -> A1Module {
    let cutoff = match (a.truncated_above, b.truncated_above) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let (a, b) = match cutoff {
        Some(d) => (truncate(a, d), truncate(b, d)),
        None => (a.clone(), b.clone()),
    };
    if a.is_zero() {
        return A1Module { truncated_above: cutoff, ..b };
    }
    if b.is_zero() {
        return A1Module { truncated_above: cutoff, ..a };
    }
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    let mut taken = std::collections::HashSet::new();
    let mut labels = Vec::new();
    for k in lo..=hi {
        labels.push(a.labels(k).iter().map(|x| disambiguate(&mut taken, x)).collect::<Vec<_>>());
    }
    for (i, k) in (lo..=hi).enumerate() {
        for x in b.labels(k) {
            let name = disambiguate(&mut taken, x);
            labels[i].push(name);
        }
    }
    let space = GradedSpace::new(lo, labels);
    let block = |s: Sq| {
        let (a, b) = (&a, &b);
        move |k: i32| {
            let t = k + s.degree();
            let (ma, mb) = (a.sq(s, k), b.sq(s, k));
            let mut m = BitMatrix::zeros(a.dim(t) + b.dim(t), a.dim(k) + b.dim(k));
            for r in 0..ma.rows() {
                for c in ma.row(r).ones() {
                    m.set(r, c, true);
                }
            }
            for r in 0..mb.rows() {
                for c in mb.row(r).ones() {
                    m.set(a.dim(t) + r, a.dim(k) + c, true);
                }
            }
            m
        }
    };
    A1Module::new(space, block(Sq::Sq1), block(Sq::Sq2), cutoff).expect("direct sum of modules is a module")
}

/// Direct sum of several modules, in order.
pub fn direct_sum_all(parts: &[A1Module]) -> A1Module {
    parts.iter().fold(A1Module::zero(), |acc, m| direct_sum(&acc, m))
}

/// Suspension `Σ^k M`.
pub fn suspend(m: &A1Module, k: i32) -> A1Module {
    let space = GradedSpace { lo: m.lo() + k, labels: m.space.labels.clone() };
    let move_map = |g: &GradedMap| GradedMap {
        source: Dims { lo: g.source.lo + k, dims: g.source.dims.clone() },
        target: Dims { lo: g.target.lo + k, dims: g.target.dims.clone() },
        shift: g.shift,
        blocks: g.blocks.clone(),
    };
    if m.is_zero() {
        return A1Module { truncated_above: m.truncated_above.map(|d| d + k), ..m.clone() };
    }
    A1Module::from_parts(space, move_map(&m.sq1), move_map(&m.sq2), m.truncated_above.map(|d| d + k))
}

/// The quotient `M / M_{>d}`, marked as truncated at `d`.
pub fn truncate(m: &A1Module, d: i32) -> A1Module {
    let cutoff = Some(m.truncated_above.map_or(d, |e| e.min(d)));
    if m.is_zero() || m.hi() <= d {
        return A1Module { truncated_above: cutoff, ..m.clone() };
    }
    let labels: Vec<Vec<String>> = (m.lo()..=d).map(|k| m.labels(k).to_vec()).collect();
    let space = GradedSpace::new(m.lo(), labels);
    let dims = space.dims();
    let cut = |s: Sq| {
        let dims = dims.clone();
        move |k: i32| {
            if k + s.degree() > d {
                BitMatrix::zeros(0, dims.dim(k))
            } else {
                m.sq(s, k).into_owned()
            }
        }
    };
    A1Module::new(space.clone(), cut(Sq::Sq1), cut(Sq::Sq2), cutoff).expect("quotient of a module is a module")
}

/// Position of `a_i ⊗ b_j` (with `a_i` in degree `p`) inside degree `p + q` of `A ⊗ B`.
pub struct TensorIndex {
    a: Dims,
    b: Dims,
}

impl TensorIndex {
    pub fn new(a: &A1Module, b: &A1Module) -> Self {
        TensorIndex { a: a.dims(), b: b.dims() }
    }

    pub fn dim(&self, d: i32) -> usize {
        (self.a.lo()..=self.a.hi()).map(|p| self.a.dim(p) * self.b.dim(d - p)).sum()
    }

    pub fn index(&self, p: i32, i: usize, q: i32, j: usize) -> usize {
        let d = p + q;
        let offset: usize = (self.a.lo()..p).map(|p2| self.a.dim(p2) * self.b.dim(d - p2)).sum();
        offset + i * self.b.dim(q) + j
    }
}

/// Tensor product with the diagonal action
/// `Sq1(x⊗y) = Sq1x⊗y + x⊗Sq1y`, `Sq2(x⊗y) = Sq2x⊗y + Sq1x⊗Sq1y + x⊗Sq2y`.
pub fn tensor(a: &A1Module, b: &A1Module) -> A1Module {
    tensor_with(a, b, Execution::default())
}

pub fn tensor_with(a: &A1Module, b: &A1Module, exec: Execution) -> A1Module {
    if a.is_zero() || b.is_zero() {
        let cutoff = match (a.truncated_above, b.truncated_above) {
            (None, None) => None,
            _ => Some(tensor_cutoff(a, b).unwrap_or(0)),
        };
        return A1Module { truncated_above: cutoff, ..A1Module::zero() };
    }
    let cutoff = tensor_cutoff(a, b);
    let lo = a.lo() + b.lo();
    let mut hi = a.hi() + b.hi();
    if let Some(c) = cutoff {
        hi = hi.min(c);
    }
    let idx = TensorIndex::new(a, b);
    let labels: Vec<Vec<String>> = exec.map_range(lo, hi, |d| {
        let mut l = Vec::with_capacity(idx.dim(d));
        for p in a.lo()..=a.hi() {
            for x in a.labels(p) {
                for y in b.labels(d - p) {
                    l.push(format!("{x}⊗{y}"));
                }
            }
        }
        l
    });
    let space = GradedSpace::new(lo, labels);
    let dims = space.dims();
    let build = |s: Sq| {
        let blocks = exec.map_range(lo, hi, |d| {
            let t = d + s.degree();
            let mut m = BitMatrix::zeros(dims.dim(t), dims.dim(d));
            if dims.dim(t) == 0 {
                return m;
            }
            // Terms s_a x ⊗ s_b y with (s_a, s_b) from the Cartan formula.
            let terms: &[(&[Sq], &[Sq])] = match s {
                Sq::Sq1 => &[(&[Sq::Sq1], &[]), (&[], &[Sq::Sq1])],
                Sq::Sq2 => &[(&[Sq::Sq2], &[]), (&[Sq::Sq1], &[Sq::Sq1]), (&[], &[Sq::Sq2])],
            };
            for p in a.lo()..=a.hi() {
                let q = d - p;
                if a.dim(p) == 0 || b.dim(q) == 0 {
                    continue;
                }
                for &(la, lb) in terms {
                    let da: i32 = la.iter().map(|x| x.degree()).sum();
                    let db: i32 = lb.iter().map(|x| x.degree()).sum();
                    let (pa, qb) = (p + da, q + db);
                    if a.dim(pa) == 0 || b.dim(qb) == 0 {
                        continue;
                    }
                    let ma = a.letters_matrix(la, p);
                    let mb = b.letters_matrix(lb, q);
                    for i in 0..a.dim(p) {
                        let ci = ma.col(i);
                        if ci.is_zero() {
                            continue;
                        }
                        for j in 0..b.dim(q) {
                            let cj = mb.col(j);
                            let col = idx.index(p, i, q, j);
                            for r in ci.ones() {
                                for c in cj.ones() {
                                    let row = idx.index(pa, r, qb, c);
                                    m.set(row, col, !m.get(row, col));
                                }
                            }
                        }
                    }
                }
            }
            m
        });
        GradedMap { source: dims.clone(), target: dims.clone(), shift: s.degree(), blocks }
    };
    let module = A1Module::from_parts(space.clone(), build(Sq::Sq1), build(Sq::Sq2), cutoff);
    debug_assert!(module.check_relations(exec).is_ok());
    module
}

/// Degree through which `A ⊗ B` is known when a factor is truncated.
pub fn tensor_cutoff(a: &A1Module, b: &A1Module) -> Option<i32> {
    let ca = a.truncated_above.map(|d| d + if b.is_zero() { 0 } else { b.lo() });
    let cb = b.truncated_above.map(|d| d + if a.is_zero() { 0 } else { a.lo() });
    match (ca, cb) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// The dual `M_* = Hom(M, F2)` with `(M_*)_{-k} = (M_k)^*`.
///
/// Its right action `(x·θ)(v) = x(θ·v)` is stored as the left module whose
/// Sq1 and Sq2 are the transposes; because the antipode of A(1) fixes Sq1
/// and Sq2, this is the usual left dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualModule {
    module: A1Module,
    source_truncated_above: Option<i32>,
}

fn dual_label(l: &str) -> String {
    match l.strip_suffix('*') {
        Some(s) => s.to_string(),
        None => format!("{l}*"),
    }
}

pub fn dualize(m: &A1Module) -> DualModule {
    if m.is_zero() {
        return DualModule { module: A1Module::zero(), source_truncated_above: m.truncated_above };
    }
    let lo = -m.hi();
    let labels: Vec<Vec<String>> =
        (lo..=-m.lo()).map(|k| m.labels(-k).iter().map(|l| dual_label(l)).collect()).collect();
    let space = GradedSpace::new(lo, labels);
    let tr = |s: Sq| move |k: i32| m.sq(s, -k - s.degree()).transpose();
    let module = A1Module::new(space, tr(Sq::Sq1), tr(Sq::Sq2), None).expect("dual of a module is a module");
    DualModule { module, source_truncated_above: m.truncated_above }
}

impl DualModule {
    /// The left-module view: degree `-k` holds functionals on `M_k`.
    pub fn as_module(&self) -> &A1Module {
        &self.module
    }

    pub fn into_module(self) -> A1Module {
        self.module
    }

    pub fn source_truncated_above(&self) -> Option<i32> {
        self.source_truncated_above
    }

    /// Right action `x·θ`: letters of `θ` are applied left to right.
    pub fn act_right(&self, x: &Element, theta: Word) -> Element {
        let mut e = x.clone();
        for &s in theta.letters() {
            e = self.module.act(s, &e);
        }
        e
    }

    /// Evaluates a functional of dual degree `-k` on an element of `M_k`.
    pub fn evaluate(x: &Element, v: &Element) -> bool {
        assert_eq!(x.degree, -v.degree, "functional and vector live in different degrees");
        x.vector.dot(&v.vector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upsilon1() -> A1Module {
        let mut b = ModuleBuilder::new();
        for (l, d) in [("g0", 0), ("g2", 2), ("g3", 3), ("g5", 5)] {
            b.add_basis(l, d).unwrap();
        }
        b.set_action(Sq::Sq2, "g0", &["g2"]).unwrap();
        b.set_action(Sq::Sq1, "g2", &["g3"]).unwrap();
        b.set_action(Sq::Sq2, "g3", &["g5"]).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn free_module_dims() {
        let f = A1Module::free();
        assert_eq!(f.dim_table(), BTreeMap::from([(0, 1), (1, 1), (2, 1), (3, 2), (4, 1), (5, 1), (6, 1)]));
        let top = f.act_word(Word::TOP, &f.basis_element(0, 0));
        assert!(!top.is_zero());
    }

    #[test]
    fn relation_violation_is_reported() {
        let mut b = ModuleBuilder::new();
        for (l, d) in [("a", 0), ("b", 2), ("c", 4)] {
            b.add_basis(l, d).unwrap();
        }
        b.set_action(Sq::Sq2, "a", &["b"]).unwrap();
        b.set_action(Sq::Sq2, "b", &["c"]).unwrap();
        assert_eq!(b.build(), Err(ModuleError::RelationViolation { degree: 0, relation: Relation::Sq2Sq2 }));
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let mut b = ModuleBuilder::new();
        b.add_basis("a", 0).unwrap();
        b.add_basis("b", 3).unwrap();
        assert!(matches!(b.set_action(Sq::Sq2, "a", &["b"]), Err(ModuleError::DegreeMismatch { .. })));
    }

    #[test]
    fn upsilon1_sums_and_suspensions() {
        let u = upsilon1();
        let s = direct_sum(&u, &suspend(&u, 3));
        assert_eq!(s.dim_table(), BTreeMap::from([(0, 1), (2, 1), (3, 2), (5, 2), (6, 1), (8, 1)]));
        assert_eq!(suspend(&suspend(&u, 2), 3), suspend(&u, 5));
    }

    #[test]
    fn tensor_with_unit() {
        let f = A1Module::free();
        assert_eq!(tensor(&f, &A1Module::f2()).dim_table(), f.dim_table());
    }

    #[test]
    fn tensor_sequential_matches_parallel() {
        let u = upsilon1();
        let f = A1Module::free();
        let a = direct_sum(&u, &f);
        assert_eq!(tensor_with(&a, &u, Execution::Sequential), tensor_with(&a, &u, Execution::Parallel));
    }

    #[test]
    fn dual_pairing() {
        let u = upsilon1();
        let d = dualize(&u);
        assert_eq!(d.as_module().lo(), -5);
        let g5 = d.as_module().element("g5*").unwrap();
        let pushed = d.act_right(&g5, Word::SQ2SQ1SQ2);
        assert_eq!(pushed, d.as_module().element("g0*").unwrap());
        assert_eq!(dualize(d.as_module()).into_module(), u);
    }

    #[test]
    fn truncation_keeps_relations() {
        let u = upsilon1();
        let t = truncate(&u, 3);
        assert_eq!(t.hi(), 3);
        assert_eq!(t.truncated_above(), Some(3));
    }

    #[test]
    fn map_from_generators_on_free() {
        let f = A1Module::free();
        let u = upsilon1();
        let g = f.basis_element(0, 0);
        let v = u.element("g0").unwrap();
        let map = f.map_from_generators(&u, 0, &[(g.clone(), v)]).unwrap();
        assert!(f.is_linear_map(&u, &map));
        // Sq1 g0 = 0 in Υ1, so a map out of Υ1 sending g0 to the free generator is not linear.
        let bad = u.map_from_generators(&f, 0, &[(u.element("g0").unwrap(), g)]);
        assert!(bad.is_err());
    }
}
