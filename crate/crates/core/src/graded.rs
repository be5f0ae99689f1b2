//! Rationally graded chain complexes over GF(2) on a finite degree window.
//!
//! A complex only carries generators inside its window. Anything computed at
//! a degree whose neighbours fall outside the window is flagged as edge data
//! instead of being reported as a result.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec, Gf2Error, SpanBasis};
use crate::grading::Grading;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("block at degree {degree} is {found:?}, expected {expected:?}")]
    BlockShape {
        degree: Grading,
        found: (usize, usize),
        expected: (usize, usize),
    },
    #[error("differential does not square to zero at degree {0}")]
    NotSquareZero(Grading),
    #[error("vector at degree {0} is not a cycle")]
    NotACycle(Grading),
    #[error("involution rejected: {0}")]
    BadInvolution(String),
    #[error("basis at degree {0} does not span a subcomplex")]
    NotSubcomplex(Grading),
    #[error("differential raises the filtration at generator '{label}' (level {from} to {to})")]
    FiltrationViolation { label: String, from: i64, to: i64 },
    #[error("filtration levels missing or misaligned at degree {0}")]
    FiltrationShape(Grading),
    #[error("maps {0} and {1} of the sequence do not compose")]
    NonComposing(usize, usize),
    #[error("map is not a chain map at degree {0}")]
    NotChainMap(Grading),
    #[error(transparent)]
    Linear(#[from] Gf2Error),
}

/// Closed degree window `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: Grading,
    pub hi: Grading,
}

impl Window {
    pub fn new(lo: impl Into<Grading>, hi: impl Into<Grading>) -> Self {
        let (lo, hi) = (lo.into(), hi.into());
        assert!(lo <= hi, "empty window [{lo}, {hi}]");
        Window { lo, hi }
    }

    pub fn contains(&self, d: Grading) -> bool {
        self.lo <= d && d <= self.hi
    }

    /// Degree `d` is interior when every degree within `reach` of it is inside.
    pub fn is_interior(&self, d: Grading, reach: i64) -> bool {
        d - reach >= self.lo && d + reach <= self.hi
    }

    /// The window seen through `d -> k - d`.
    pub fn dual(&self, k: Grading) -> Window {
        Window {
            lo: k - self.hi,
            hi: k - self.lo,
        }
    }

    pub fn widen(&self, by: i64) -> Window {
        Window {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }
}

/// Basis labels grouped by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedSpace {
    degrees: BTreeMap<Grading, Vec<String>>,
}

impl GradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a generator and returns its index within its degree.
    pub fn push(&mut self, degree: Grading, label: impl Into<String>) -> usize {
        let v = self.degrees.entry(degree).or_default();
        v.push(label.into());
        v.len() - 1
    }

    pub fn from_dims(dims: &[(Grading, usize)]) -> Self {
        let mut s = Self::new();
        for &(d, n) in dims {
            for i in 0..n {
                s.push(d, format!("g{d}_{i}"));
            }
        }
        s
    }

    pub fn dim(&self, d: Grading) -> usize {
        self.degrees.get(&d).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = Grading> + '_ {
        self.degrees.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d)
    }

    pub fn labels(&self, d: Grading) -> &[String] {
        self.degrees.get(&d).map_or(&[], Vec::as_slice)
    }

    /// Label lookup table: label to (degree, index).
    pub fn index(&self) -> HashMap<&str, (Grading, usize)> {
        let mut out = HashMap::new();
        for (d, labels) in &self.degrees {
            for (i, l) in labels.iter().enumerate() {
                out.insert(l.as_str(), (*d, i));
            }
        }
        out
    }

    pub fn labels_unique(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.degrees.values().flatten().all(|l| seen.insert(l.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.total_dim() == 0
    }
}

/// A homogeneous linear map between graded spaces, stored as one block per
/// source degree. Missing blocks are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub shift: Grading,
    blocks: BTreeMap<Grading, BitMatrix>,
}

impl GradedMap {
    pub fn zero(shift: Grading) -> Self {
        GradedMap {
            shift,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let mut m = Self::zero(Grading::ZERO);
        for d in space.degrees() {
            m.set_block(d, BitMatrix::identity(space.dim(d)));
        }
        m
    }

    pub fn set_block(&mut self, source_degree: Grading, block: BitMatrix) {
        if block.is_zero() {
            self.blocks.remove(&source_degree);
        } else {
            self.blocks.insert(source_degree, block);
        }
    }

    pub fn block(&self, source_degree: Grading) -> Option<&BitMatrix> {
        self.blocks.get(&source_degree)
    }

    pub fn block_or_zero(&self, d: Grading, src: &GradedSpace, tgt: &GradedSpace) -> BitMatrix {
        match self.blocks.get(&d) {
            Some(b) => b.clone(),
            None => BitMatrix::zeros(tgt.dim(d + self.shift), src.dim(d)),
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = (Grading, &BitMatrix)> {
        self.blocks.iter().map(|(d, b)| (*d, b))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Checks every block against the shapes dictated by `src` and `tgt`.
    pub fn check_shapes(&self, src: &GradedSpace, tgt: &GradedSpace) -> Result<(), ComplexError> {
        for (d, b) in &self.blocks {
            let expected = (tgt.dim(*d + self.shift), src.dim(*d));
            if (b.rows(), b.cols()) != expected {
                return Err(ComplexError::BlockShape {
                    degree: *d,
                    found: (b.rows(), b.cols()),
                    expected,
                });
            }
        }
        Ok(())
    }

    pub fn apply(&self, d: Grading, v: &BitVec, tgt: &GradedSpace) -> BitVec {
        match self.blocks.get(&d) {
            Some(b) => b.mul_vec(v),
            None => BitVec::zeros(tgt.dim(d + self.shift)),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GradedMap, src: &GradedSpace, mid: &GradedSpace, tgt: &GradedSpace) -> GradedMap {
        let mut out = GradedMap::zero(first.shift + self.shift);
        for (d, f) in &first.blocks {
            let m = *d + first.shift;
            if let Some(g) = self.blocks.get(&m) {
                debug_assert_eq!(g.cols(), mid.dim(m));
                debug_assert_eq!(f.cols(), src.dim(*d));
                let _ = tgt;
                out.set_block(*d, g.mul(f));
            }
        }
        out
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        assert_eq!(self.shift, other.shift, "adding maps of different degree");
        let mut out = self.clone();
        for (d, b) in &other.blocks {
            let sum = match out.blocks.get(d) {
                Some(a) => a.add(b),
                None => b.clone(),
            };
            out.set_block(*d, sum);
        }
        out
    }

    /// Keeps only blocks whose source and target degrees satisfy `keep`.
    pub fn filter_degrees(&self, mut keep: impl FnMut(Grading, Grading) -> bool) -> GradedMap {
        let mut out = GradedMap::zero(self.shift);
        for (d, b) in &self.blocks {
            if keep(*d, *d + self.shift) {
                out.set_block(*d, b.clone());
            }
        }
        out
    }
}

/// Per-degree outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// The degree touches the window boundary, so the check is not conclusive.
    Edge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCheck {
    pub degree: Grading,
    pub status: Status,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeReport {
    pub checks: Vec<DegreeCheck>,
}

impl DegreeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<Grading> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.degree)
            .collect()
    }

    pub fn status(&self, d: Grading) -> Option<Status> {
        self.checks.iter().find(|c| c.degree == d).map(|c| c.status)
    }
}

/// A graded complex with a degree -1 differential, truncated to a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub space: GradedSpace,
    pub diff: GradedMap,
    pub window: Window,
}

impl GradedComplex {
    pub fn new(space: GradedSpace, diff: GradedMap, window: Window) -> Result<Self, ComplexError> {
        assert_eq!(diff.shift, Grading::int(-1), "differential must have degree -1");
        diff.check_shapes(&space, &space)?;
        Ok(GradedComplex { space, diff, window })
    }

    pub fn empty(window: Window) -> Self {
        GradedComplex {
            space: GradedSpace::new(),
            diff: GradedMap::zero(Grading::int(-1)),
            window,
        }
    }

    /// The differential out of degree `d`.
    pub fn d(&self, d: Grading) -> BitMatrix {
        self.diff.block_or_zero(d, &self.space, &self.space)
    }

    pub fn is_interior(&self, d: Grading) -> bool {
        self.window.is_interior(d, 1)
    }

    /// Checks `∂∘∂ = 0` out of each degree. Degrees whose image two steps down
    /// leaves the window are reported as edge.
    pub fn verify_square_zero(&self) -> DegreeReport {
        let mut checks = Vec::new();
        for d in self.space.degrees() {
            let status = if !self.window.contains(d - 2) {
                Status::Edge
            } else if self.d(d - 1).mul(&self.d(d)).is_zero() {
                Status::Pass
            } else {
                Status::Fail
            };
            checks.push(DegreeCheck { degree: d, status });
        }
        DegreeReport { checks }
    }

    pub fn homology(&self) -> Result<Homology, ComplexError> {
        if let Some(d) = self.verify_square_zero().failures().first() {
            return Err(ComplexError::NotSquareZero(*d));
        }
        let degrees: Vec<Grading> = self.space.degrees().collect();
        let per: Vec<HomologyDegree> = degrees.par_iter().map(|&d| self.homology_at(d)).collect();
        Ok(Homology {
            window: self.window,
            degrees: per.into_iter().map(|h| (h.degree, h)).collect(),
        })
    }

    fn homology_at(&self, d: Grading) -> HomologyDegree {
        let n = self.space.dim(d);
        let cycles = self.d(d).kernel_basis();
        let mut basis = SpanBasis::new(n);
        let into = self.d(d + 1);
        for c in into.columns() {
            basis.insert(&c);
        }
        let boundary_rank = basis.rank();
        let mut reps = Vec::new();
        for z in &cycles {
            if basis.insert(z) {
                reps.push(z.clone());
            }
        }
        HomologyDegree {
            degree: d,
            dim: reps.len(),
            edge: !self.is_interior(d),
            reps,
            boundary_rank,
            basis,
        }
    }

    /// Dual complex: degree `d` becomes `k - d` and the differential is transposed.
    pub fn dualize(&self, k: Grading) -> GradedComplex {
        let mut space = GradedSpace::new();
        for d in self.space.degrees() {
            for l in self.space.labels(d) {
                space.push(k - d, l.clone());
            }
        }
        let mut diff = GradedMap::zero(Grading::int(-1));
        for (d, b) in self.diff.blocks() {
            // ∂: C_d -> C_{d-1} dualizes to C*_{k-d+1} -> C*_{k-d}.
            diff.set_block(k - (d - 1), b.transpose());
        }
        GradedComplex {
            space,
            diff,
            window: self.window.dual(k),
        }
    }

    /// Whether `v` at degree `d` is a cycle.
    pub fn is_cycle(&self, d: Grading, v: &BitVec) -> bool {
        self.diff.apply(d, v, &self.space).is_zero()
    }
}

/// Checks `∂_tgt ∘ f = f ∘ ∂_src` degree by degree.
pub fn verify_chain_map(f: &GradedMap, src: &GradedComplex, tgt: &GradedComplex) -> DegreeReport {
    let mut checks = Vec::new();
    let mut degrees: BTreeSet<Grading> = src.space.degrees().collect();
    degrees.extend(src.space.degrees().map(|d| d + 1));
    for d in degrees {
        let s = d + f.shift;
        let status = if !(src.window.contains(d)
            && src.window.contains(d - 1)
            && tgt.window.contains(s)
            && tgt.window.contains(s - 1))
        {
            Status::Edge
        } else {
            let left = tgt.d(s).mul(&f.block_or_zero(d, &src.space, &tgt.space));
            let right = f
                .block_or_zero(d - 1, &src.space, &tgt.space)
                .mul(&src.d(d));
            if left == right {
                Status::Pass
            } else {
                Status::Fail
            }
        };
        if src.space.dim(d) > 0 {
            checks.push(DegreeCheck { degree: d, status });
        }
    }
    DegreeReport { checks }
}

/// Homology at one degree, with explicit representative cycles.
#[derive(Clone, Debug)]
pub struct HomologyDegree {
    pub degree: Grading,
    pub dim: usize,
    pub edge: bool,
    pub reps: Vec<BitVec>,
    boundary_rank: usize,
    basis: SpanBasis,
}

impl HomologyDegree {
    /// Coordinates of a cycle's class with respect to `reps`.
    pub fn classify(&self, cycle: &BitVec) -> Option<BitVec> {
        let coords = self.basis.coordinates(cycle)?;
        Some(coords.slice(self.boundary_rank, self.boundary_rank + self.dim))
    }

    pub fn is_boundary(&self, cycle: &BitVec) -> bool {
        self.classify(cycle).is_some_and(|c| c.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct Homology {
    pub window: Window,
    degrees: BTreeMap<Grading, HomologyDegree>,
}

impl Homology {
    pub fn empty(window: Window) -> Self {
        Homology {
            window,
            degrees: BTreeMap::new(),
        }
    }

    pub fn at(&self, d: Grading) -> Option<&HomologyDegree> {
        self.degrees.get(&d)
    }

    pub fn dim(&self, d: Grading) -> usize {
        self.degrees.get(&d).map_or(0, |h| h.dim)
    }

    pub fn is_reliable(&self, d: Grading) -> bool {
        self.window.is_interior(d, 1)
    }

    pub fn degrees(&self) -> impl Iterator<Item = &HomologyDegree> {
        self.degrees.values()
    }

    /// `(degree, dimension, edge)` rows for every degree carrying generators.
    pub fn table(&self) -> Vec<(Grading, usize, bool)> {
        self.degrees.values().map(|h| (h.degree, h.dim, h.edge)).collect()
    }

    /// Nonzero interior dimensions.
    pub fn interior_dims(&self) -> BTreeMap<Grading, usize> {
        self.degrees
            .values()
            .filter(|h| !h.edge && h.dim > 0)
            .map(|h| (h.degree, h.dim))
            .collect()
    }

    pub fn space(&self) -> GradedSpace {
        let mut s = GradedSpace::new();
        for h in self.degrees.values() {
            for i in 0..h.dim {
                s.push(h.degree, format!("h{}_{i}", h.degree));
            }
        }
        s
    }

    pub fn total_interior_dim(&self) -> usize {
        self.interior_dims().values().sum()
    }
}

/// A map between homology groups induced by a chain map.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub shift: Grading,
    pub blocks: BTreeMap<Grading, BitMatrix>,
    /// Source degrees whose block is computed from interior data on both ends.
    pub reliable: BTreeSet<Grading>,
}

impl InducedMap {
    pub fn block(&self, d: Grading, src: &Homology, tgt: &Homology) -> BitMatrix {
        self.blocks
            .get(&d)
            .cloned()
            .unwrap_or_else(|| BitMatrix::zeros(tgt.dim(d + self.shift), src.dim(d)))
    }

    /// Whether the block out of `d` is nonzero.
    pub fn is_nonzero_at(&self, d: Grading) -> bool {
        self.blocks.get(&d).is_some_and(|b| !b.is_zero())
    }

    /// Every reliable block is zero.
    pub fn vanishes(&self) -> bool {
        self.blocks
            .iter()
            .all(|(d, b)| !self.reliable.contains(d) || b.is_zero())
    }

    pub fn compose(&self, first: &InducedMap, src: &Homology, mid: &Homology, tgt: &Homology) -> InducedMap {
        let mut blocks = BTreeMap::new();
        let mut reliable = BTreeSet::new();
        for h in src.degrees() {
            let d = h.degree;
            let m = d + first.shift;
            let b = self.block(m, mid, tgt).mul(&first.block(d, src, mid));
            if !b.is_zero() {
                blocks.insert(d, b);
            }
            if first.reliable.contains(&d) && (self.reliable.contains(&m) || mid.dim(m) == 0) {
                reliable.insert(d);
            }
        }
        InducedMap {
            shift: first.shift + self.shift,
            blocks,
            reliable,
        }
    }
}

/// Map on homology induced by `f`. Interior classes must map to cycles.
pub fn induced_map(
    f: &GradedMap,
    src: &GradedComplex,
    hs: &Homology,
    tgt: &GradedComplex,
    ht: &Homology,
) -> Result<InducedMap, ComplexError> {
    f.check_shapes(&src.space, &tgt.space)?;
    let mut blocks = BTreeMap::new();
    let mut reliable = BTreeSet::new();
    for h in hs.degrees() {
        let d = h.degree;
        let t = d + f.shift;
        let ok = hs.is_reliable(d) && ht.is_reliable(t);
        let rows = ht.dim(t);
        let mut m = BitMatrix::zeros(rows, h.dim);
        for (j, r) in h.reps.iter().enumerate() {
            let y = f.apply(d, r, &tgt.space);
            if y.is_zero() {
                continue;
            }
            let coords = ht.at(t).and_then(|ht_t| ht_t.classify(&y));
            match coords {
                Some(c) => {
                    for i in c.support() {
                        m.set(i, j, true);
                    }
                }
                None if ok => return Err(ComplexError::NotACycle(t)),
                None => {}
            }
        }
        if ok {
            reliable.insert(d);
        }
        if !m.is_zero() {
            blocks.insert(d, m);
        }
    }
    Ok(InducedMap {
        shift: f.shift,
        blocks,
        reliable,
    })
}

/// One link `src -> tgt` of a candidate exact sequence of homology groups.
#[derive(Clone, Copy)]
pub struct SequenceMap<'a> {
    pub map: &'a InducedMap,
    pub src: &'a Homology,
    pub tgt: &'a Homology,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JunctionCheck {
    /// Index of the map whose target is the middle group.
    pub junction: usize,
    pub degree: Grading,
    pub status: Status,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactnessReport {
    pub checks: Vec<JunctionCheck>,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<(usize, Grading)> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| (c.junction, c.degree))
            .collect()
    }

    pub fn interior_checks(&self) -> usize {
        self.checks.iter().filter(|c| c.status != Status::Edge).count()
    }
}

/// Verifies `im f = ker g` at every junction `A -f-> B -g-> C` of the sequence.
pub fn check_exactness(seq: &[SequenceMap<'_>]) -> Result<ExactnessReport, ComplexError> {
    let mut checks = Vec::new();
    for k in 0..seq.len().saturating_sub(1) {
        let (f, g) = (seq[k], seq[k + 1]);
        if !std::ptr::eq(f.tgt, g.src) {
            return Err(ComplexError::NonComposing(k, k + 1));
        }
        let b = f.tgt;
        let mut degrees: BTreeSet<Grading> = b.degrees().map(|h| h.degree).collect();
        degrees.extend(f.src.degrees().map(|h| h.degree + f.map.shift));
        for d in degrees {
            if b.dim(d) == 0 {
                continue;
            }
            let a_deg = d - f.map.shift;
            let c_deg = d + g.map.shift;
            let reliable = b.is_reliable(d)
                && (f.src.is_reliable(a_deg) || f.src.dim(a_deg) == 0 && f.src.window.contains(a_deg))
                && (g.tgt.is_reliable(c_deg) || g.tgt.dim(c_deg) == 0 && g.tgt.window.contains(c_deg));
            let status = if !reliable {
                Status::Edge
            } else {
                let fb = f.map.block(a_deg, f.src, b);
                let gb = g.map.block(d, b, g.tgt);
                let composite_zero = gb.mul(&fb).is_zero();
                if composite_zero && fb.rank() + gb.rank() == b.dim(d) {
                    Status::Pass
                } else {
                    Status::Fail
                }
            };
            checks.push(JunctionCheck {
                junction: k,
                degree: d,
                status,
            });
        }
    }
    Ok(ExactnessReport { checks })
}

/// The long exact sequence of a short exact sequence `0 -> A -> B -> C -> 0`.
pub struct LongExactSequence {
    pub ha: Homology,
    pub hb: Homology,
    pub hc: Homology,
    pub incl: InducedMap,
    pub quot: InducedMap,
    pub connecting: InducedMap,
}

impl LongExactSequence {
    pub fn check(&self) -> Result<ExactnessReport, ComplexError> {
        check_exactness(&[
            SequenceMap {
                map: &self.incl,
                src: &self.ha,
                tgt: &self.hb,
            },
            SequenceMap {
                map: &self.quot,
                src: &self.hb,
                tgt: &self.hc,
            },
            SequenceMap {
                map: &self.connecting,
                src: &self.hc,
                tgt: &self.ha,
            },
            SequenceMap {
                map: &self.incl,
                src: &self.ha,
                tgt: &self.hb,
            },
        ])
    }
}

/// Builds the long exact sequence of `0 -> a -incl-> b -quot-> c -> 0`,
/// including the connecting map obtained by lifting through `quot`.
pub fn ses_long_exact_sequence(
    a: &GradedComplex,
    b: &GradedComplex,
    c: &GradedComplex,
    incl: &GradedMap,
    quot: &GradedMap,
) -> Result<LongExactSequence, ComplexError> {
    let ha = a.homology()?;
    let hb = b.homology()?;
    let hc = c.homology()?;
    let incl_h = induced_map(incl, a, &ha, b, &hb)?;
    let quot_h = induced_map(quot, b, &hb, c, &hc)?;
    let shift = -quot.shift - 1;
    let mut blocks = BTreeMap::new();
    let mut reliable = BTreeSet::new();
    for h in hc.degrees() {
        let k = h.degree;
        let bdeg = k - quot.shift;
        let adeg = bdeg - 1;
        let ok = hc.is_reliable(k) && ha.is_reliable(adeg) && b.window.contains(bdeg) && b.window.contains(adeg);
        let mut m = BitMatrix::zeros(ha.dim(adeg), h.dim);
        if ok {
            let q = quot.block_or_zero(bdeg, &b.space, &c.space);
            let i = incl.block_or_zero(adeg, &a.space, &b.space);
            for (j, z) in h.reps.iter().enumerate() {
                let lift = q.solve(z)?.ok_or(ComplexError::NotSubcomplex(bdeg))?;
                let bd = b.diff.apply(bdeg, &lift, &b.space);
                let pre = i.solve(&bd)?.ok_or(ComplexError::NotSubcomplex(adeg))?;
                let Some(at) = ha.at(adeg) else {
                    continue;
                };
                let class = at.classify(&pre).ok_or(ComplexError::NotACycle(adeg))?;
                for r in class.support() {
                    m.set(r, j, true);
                }
            }
            reliable.insert(k);
        }
        if !m.is_zero() {
            blocks.insert(k, m);
        }
    }
    Ok(LongExactSequence {
        ha,
        hb,
        hc,
        incl: incl_h,
        quot: quot_h,
        connecting: InducedMap {
            shift,
            blocks,
            reliable,
        },
    })
}

/// A subcomplex presented by a basis inside a parent complex.
#[derive(Clone, Debug)]
pub struct SubComplex {
    pub complex: GradedComplex,
    /// Degree-0 inclusion into the parent.
    pub inclusion: GradedMap,
    spans: BTreeMap<Grading, SpanBasis>,
}

impl SubComplex {
    /// Spans `basis[d]` in each degree; the differential is restricted by
    /// solving in the sub-basis one degree down.
    pub fn from_basis(parent: &GradedComplex, basis: BTreeMap<Grading, Vec<BitVec>>) -> Result<Self, ComplexError> {
        let mut space = GradedSpace::new();
        let mut spans = BTreeMap::new();
        let mut inclusion = GradedMap::zero(Grading::ZERO);
        for (d, vs) in &basis {
            let labels = parent.space.labels(*d);
            for v in vs {
                let name: Vec<&str> = v.support().iter().map(|&i| labels[i].as_str()).collect();
                space.push(*d, name.join("+"));
            }
            let span = SpanBasis::from_vectors(parent.space.dim(*d), vs.iter());
            if span.rank() != vs.len() {
                return Err(ComplexError::NotSubcomplex(*d));
            }
            spans.insert(*d, span);
            inclusion.set_block(*d, BitMatrix::from_columns(parent.space.dim(*d), vs));
        }
        let mut diff = GradedMap::zero(Grading::int(-1));
        for (d, vs) in &basis {
            let lower = *d - 1;
            if !parent.window.contains(lower) || space.dim(lower) == 0 {
                for v in vs {
                    if parent.space.dim(lower) > 0 && !parent.diff.apply(*d, v, &parent.space).is_zero() {
                        return Err(ComplexError::NotSubcomplex(lower));
                    }
                }
                continue;
            }
            let span = &spans[&lower];
            let mut block = BitMatrix::zeros(space.dim(lower), vs.len());
            for (j, v) in vs.iter().enumerate() {
                let image = parent.diff.apply(*d, v, &parent.space);
                let coords = span.coordinates(&image).ok_or(ComplexError::NotSubcomplex(lower))?;
                for i in coords.support() {
                    block.set(i, j, true);
                }
            }
            diff.set_block(*d, block);
        }
        let complex = GradedComplex::new(space, diff, parent.window)?;
        Ok(SubComplex {
            complex,
            inclusion,
            spans,
        })
    }

    /// Coordinates of a parent vector in the sub-basis, when it lies in the subcomplex.
    pub fn coordinates(&self, d: Grading, v: &BitVec) -> Option<BitVec> {
        match self.spans.get(&d) {
            Some(s) => s.coordinates(v),
            None => v.is_zero().then(|| BitVec::zeros(0)),
        }
    }

    /// Restricts a map between parents to a map between subcomplexes.
    pub fn restrict_map(
        &self,
        f: &GradedMap,
        tgt: &SubComplex,
        tgt_parent: &GradedSpace,
    ) -> Result<GradedMap, ComplexError> {
        let mut out = GradedMap::zero(f.shift);
        for d in self.complex.space.degrees() {
            let t = d + f.shift;
            let incl = self.inclusion.block(d).expect("basis block");
            let mut block = BitMatrix::zeros(tgt.complex.space.dim(t), self.complex.space.dim(d));
            for j in 0..incl.cols() {
                let image = f.apply(d, &incl.column(j), tgt_parent);
                if image.is_zero() {
                    continue;
                }
                let coords = tgt.coordinates(t, &image).ok_or(ComplexError::NotSubcomplex(t))?;
                for i in coords.support() {
                    block.set(i, j, true);
                }
            }
            out.set_block(d, block);
        }
        Ok(out)
    }
}

fn check_involution(c: &GradedComplex, j: &GradedMap) -> Result<(), ComplexError> {
    if j.shift != Grading::ZERO {
        return Err(ComplexError::BadInvolution("involution must have degree 0".into()));
    }
    j.check_shapes(&c.space, &c.space)?;
    for d in c.space.degrees() {
        let b = j.block_or_zero(d, &c.space, &c.space);
        if b.mul(&b) != BitMatrix::identity(c.space.dim(d)) {
            return Err(ComplexError::BadInvolution(format!("does not square to the identity at degree {d}")));
        }
    }
    let report = verify_chain_map(j, c, c);
    if let Some(d) = report.failures().first() {
        return Err(ComplexError::BadInvolution(format!("not a chain map at degree {d}")));
    }
    Ok(())
}

fn id_plus(c: &GradedComplex, j: &GradedMap, d: Grading) -> BitMatrix {
    j.block_or_zero(d, &c.space, &c.space)
        .add(&BitMatrix::identity(c.space.dim(d)))
}

/// The subcomplex of chains fixed by the involution `j`.
pub fn invariant_subcomplex(c: &GradedComplex, j: &GradedMap) -> Result<SubComplex, ComplexError> {
    check_involution(c, j)?;
    let basis = c
        .space
        .degrees()
        .map(|d| (d, id_plus(c, j, d).kernel_basis()))
        .collect();
    SubComplex::from_basis(c, basis)
}

/// The subcomplex `(id + j) C`.
pub fn image_subcomplex(c: &GradedComplex, j: &GradedMap) -> Result<SubComplex, ComplexError> {
    check_involution(c, j)?;
    let basis = c
        .space
        .degrees()
        .map(|d| (d, id_plus(c, j, d).column_space_basis()))
        .collect();
    SubComplex::from_basis(c, basis)
}

/// The map `id + j` as a chain map from `c` onto the image subcomplex.
pub fn id_plus_onto_image(c: &GradedComplex, j: &GradedMap, image: &SubComplex) -> Result<GradedMap, ComplexError> {
    let mut out = GradedMap::zero(Grading::ZERO);
    for d in c.space.degrees() {
        let m = id_plus(c, j, d);
        let mut block = BitMatrix::zeros(image.complex.space.dim(d), c.space.dim(d));
        for (col, v) in m.columns().iter().enumerate() {
            let coords = image.coordinates(d, v).ok_or(ComplexError::NotSubcomplex(d))?;
            for i in coords.support() {
                block.set(i, col, true);
            }
        }
        out.set_block(d, block);
    }
    Ok(out)
}

/// Mapping cone of a degree-0 chain map `f: a -> b`: `Cone_n = A_{n-1} ⊕ B_n`.
///
/// Returns the cone, the inclusion `b -> cone` and the projection `cone -> a`
/// of degree -1.
pub fn mapping_cone(
    f: &GradedMap,
    a: &GradedComplex,
    b: &GradedComplex,
) -> Result<(GradedComplex, GradedMap, GradedMap), ComplexError> {
    assert_eq!(f.shift, Grading::ZERO, "mapping cone needs a degree-0 map");
    let mut degrees: BTreeSet<Grading> = b.space.degrees().collect();
    degrees.extend(a.space.degrees().map(|d| d + 1));
    let mut space = GradedSpace::new();
    for &n in &degrees {
        for l in a.space.labels(n - 1) {
            space.push(n, format!("cone:{l}"));
        }
        for l in b.space.labels(n) {
            space.push(n, l.clone());
        }
    }
    let window = Window {
        lo: a.window.lo.max(b.window.lo - 1) + 1,
        hi: (a.window.hi + 1).min(b.window.hi),
    };
    let mut diff = GradedMap::zero(Grading::int(-1));
    let mut incl = GradedMap::zero(Grading::ZERO);
    let mut proj = GradedMap::zero(Grading::int(-1));
    for &n in &degrees {
        let (an, bn) = (a.space.dim(n - 1), b.space.dim(n));
        let (am, bm) = (a.space.dim(n - 2), b.space.dim(n - 1));
        let mut block = BitMatrix::zeros(am + bm, an + bn);
        let da = a.d(n - 1);
        let fa = f.block_or_zero(n - 1, &a.space, &b.space);
        let db = b.d(n);
        for (r, c) in da.entries() {
            block.set(r, c, true);
        }
        for (r, c) in fa.entries() {
            block.set(am + r, c, true);
        }
        for (r, c) in db.entries() {
            block.set(am + r, an + c, true);
        }
        diff.set_block(n, block);
        let mut ib = BitMatrix::zeros(an + bn, bn);
        for i in 0..bn {
            ib.set(an + i, i, true);
        }
        incl.set_block(n, ib);
        let mut pa = BitMatrix::zeros(an, an + bn);
        for i in 0..an {
            pa.set(i, i, true);
        }
        proj.set_block(n, pa);
    }
    let cone = GradedComplex::new(space, diff, window)?;
    Ok((cone, incl, proj))
}

/// A complex with an integer filtration level per generator.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub complex: GradedComplex,
    levels: BTreeMap<Grading, Vec<i64>>,
}

impl FilteredComplex {
    /// Rejects level tables that do not match the space and differentials
    /// that raise the level of any generator.
    pub fn new(complex: GradedComplex, levels: BTreeMap<Grading, Vec<i64>>) -> Result<Self, ComplexError> {
        for d in complex.space.degrees() {
            if levels.get(&d).map_or(0, Vec::len) != complex.space.dim(d) {
                return Err(ComplexError::FiltrationShape(d));
            }
        }
        for (d, b) in complex.diff.blocks() {
            let src = &levels[&d];
            let tgt = &levels[&(d - 1)];
            for (r, c) in b.entries() {
                if tgt[r] > src[c] {
                    return Err(ComplexError::FiltrationViolation {
                        label: complex.space.labels(d)[c].clone(),
                        from: src[c],
                        to: tgt[r],
                    });
                }
            }
        }
        Ok(FilteredComplex { complex, levels })
    }

    pub fn levels(&self, d: Grading) -> &[i64] {
        self.levels.get(&d).map_or(&[], Vec::as_slice)
    }

    /// Largest filtration drop a differential can make: the top level in
    /// some degree minus the bottom level one degree lower.
    fn max_drop(&self) -> Option<i64> {
        self.levels
            .iter()
            .filter_map(|(d, lv)| {
                let top = lv.iter().max()?;
                let bottom = self.levels.get(&(*d - 1))?.iter().min()?;
                Some(top - bottom)
            })
            .max()
    }

    /// Basis of `{ x ∈ F_p C_d : ∂x ∈ F_q C_{d-1} }`, in `C_d` coordinates.
    fn z(&self, d: Grading, p: i64, q: i64) -> Vec<BitVec> {
        let lv = self.levels(d);
        let n = lv.len();
        let cols: Vec<usize> = (0..n).filter(|&i| lv[i] <= p).collect();
        if cols.is_empty() {
            return Vec::new();
        }
        let lower = self.levels(d - 1);
        let rows: Vec<usize> = (0..lower.len()).filter(|&i| lower[i] > q).collect();
        let m = self.complex.d(d).select(&rows, &cols);
        m.kernel_basis()
            .into_iter()
            .map(|k| {
                let mut v = BitVec::zeros(n);
                for i in k.support() {
                    v.set(cols[i], true);
                }
                v
            })
            .collect()
    }

    /// `Z_r^p` at degree `d`, with `Z_{-1}^p = F_p`.
    fn z_r(&self, d: Grading, r: i64, p: i64) -> Vec<BitVec> {
        if r < 0 {
            self.z(d, p, i64::MAX)
        } else {
            self.z(d, p, p - r)
        }
    }

    /// `B_r^p = Z_{r-1}^{p-1} + ∂ Z_{r-1}^{p+r-1}` at degree `d`.
    fn b_r(&self, d: Grading, r: i64, p: i64) -> Vec<BitVec> {
        let mut out = self.z_r(d, r - 1, p - 1);
        let upper = d + 1;
        for v in self.z_r(upper, r - 1, p + r - 1) {
            out.push(self.complex.diff.apply(upper, &v, &self.complex.space));
        }
        out
    }

    pub fn spectral_sequence(&self, max_page: usize) -> SpectralSequence {
        if self.levels.values().all(|lv| lv.is_empty()) {
            return SpectralSequence {
                pages: vec![],
                collapse_page: Some(1),
                complete: true,
                window: self.complex.window,
            };
        }
        let drop = self.max_drop().unwrap_or(0).max(0);
        // d_r lowers the filtration by r, so pages past `drop` carry no differential.
        let span = drop as usize;
        let last = max_page.min(span + 1);
        let degrees: Vec<Grading> = self.complex.space.degrees().collect();
        let pages: Vec<SpectralPage> = (0..=last)
            .into_par_iter()
            .map(|r| self.page(r as i64, &degrees))
            .collect();
        let nonzero: Vec<usize> = pages.iter().filter(|p| p.has_nonzero_differential()).map(|p| p.r).collect();
        let collapse_page = match nonzero.last() {
            Some(&r) if r == last && last < span + 1 => None,
            Some(&r) => Some(r + 1),
            None => Some(1),
        };
        SpectralSequence {
            pages,
            collapse_page,
            complete: last > span,
            window: self.complex.window,
        }
    }

    fn page(&self, r: i64, degrees: &[Grading]) -> SpectralPage {
        let mut dims = BTreeMap::new();
        let mut ranks = BTreeMap::new();
        let window = self.complex.window;
        for &d in degrees {
            let n = self.complex.space.dim(d);
            let present: BTreeSet<i64> = self.levels(d).iter().copied().collect();
            for &p in &present {
                let z = self.z_r(d, r, p);
                let b = self.b_r(d, r, p);
                let z_rank = SpanBasis::from_vectors(n, z.iter()).rank();
                let mut zb = SpanBasis::from_vectors(n, b.iter());
                let b_rank = zb.rank();
                let dim = z_rank - b_rank;
                for v in self.z_r(d, r + 1, p) {
                    zb.insert(&v);
                }
                let rank = z_rank - zb.rank();
                if dim > 0 {
                    dims.insert((d, p), dim);
                }
                if rank > 0 {
                    ranks.insert((d, p), rank);
                }
            }
        }
        SpectralPage {
            r: r as usize,
            dims,
            diff_ranks: ranks,
            window,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: usize,
    /// `dim E_r` at (total degree, filtration level).
    pub dims: BTreeMap<(Grading, i64), usize>,
    /// Rank of `d_r` out of (total degree, filtration level).
    pub diff_ranks: BTreeMap<(Grading, i64), usize>,
    window: Window,
}

impl SpectralPage {
    pub fn total_dim(&self, d: Grading) -> usize {
        self.dims.iter().filter(|((g, _), _)| *g == d).map(|(_, n)| n).sum()
    }

    pub fn is_reliable(&self, d: Grading) -> bool {
        self.window.is_interior(d, 1)
    }

    /// Whether `d_r` is nonzero out of some degree where both ends are interior.
    pub fn has_nonzero_differential(&self) -> bool {
        self.diff_ranks
            .keys()
            .any(|(d, _)| self.is_reliable(*d) && self.is_reliable(*d - 1))
    }

    /// Total rank of `d_r` out of degree `d`.
    pub fn differential_rank(&self, d: Grading) -> usize {
        self.diff_ranks.iter().filter(|((g, _), _)| *g == d).map(|(_, n)| n).sum()
    }

    pub fn degrees(&self) -> BTreeSet<Grading> {
        self.dims.keys().map(|(d, _)| *d).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub pages: Vec<SpectralPage>,
    /// First page `r >= 1` from which every interior differential vanishes, when known.
    pub collapse_page: Option<usize>,
    /// Whether the computed pages reach past the filtration length.
    pub complete: bool,
    pub window: Window,
}

impl SpectralSequence {
    pub fn nonzero_pages(&self) -> Vec<usize> {
        self.pages
            .iter()
            .filter(|p| p.has_nonzero_differential())
            .map(|p| p.r)
            .collect()
    }

    pub fn last(&self) -> Option<&SpectralPage> {
        self.pages.last()
    }
}
