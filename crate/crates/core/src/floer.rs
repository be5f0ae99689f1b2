//! Floer data: critical manifolds, moduli operators, and the assembled
//! check / hat / bar complexes with their exact-sequence and cobordism maps.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::BitMatrix;
use crate::graded::{
    verify_chain_map, ComplexError, DegreeReport, GradedComplex, GradedMap, GradedSpace, Status, Window,
};
use crate::grading::Grading;
use crate::pin2::Involution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FloerError {
    #[error("duplicate manifold id '{0}'")]
    DuplicateManifold(String),
    #[error("manifold '{0}': {1}")]
    Manifold(String, String),
    #[error("{what}[{index}]: unknown manifold '{id}'")]
    UnknownManifold { what: String, index: usize, id: String },
    #[error("{what}[{index}]: unknown cell '{cell}' on manifold '{manifold}'")]
    UnknownCell {
        what: String,
        index: usize,
        manifold: String,
        cell: String,
    },
    #[error("{what}[{index}]: class {class} cannot join {source_kind} to {target_kind}")]
    ClassKind {
        what: String,
        index: usize,
        class: OpClass,
        source_kind: Kind,
        target_kind: Kind,
    },
    #[error("{what}[{index}]: declared shift {declared} but class {class} requires {expected}")]
    ShiftMismatch {
        what: String,
        index: usize,
        class: OpClass,
        declared: Grading,
        expected: Grading,
    },
    #[error("{what}[{index}]: entry {source_cell} -> {target_cell} moves grading by {actual}, declared {declared}")]
    EntryShift {
        what: String,
        index: usize,
        source_cell: String,
        target_cell: String,
        actual: Grading,
        declared: Grading,
    },
    #[error("{what}[{index}]: repeated entry {source_cell} -> {target_cell}")]
    DuplicateEntry {
        what: String,
        index: usize,
        source_cell: String,
        target_cell: String,
    },
    #[error("grading denominators differ: {0} vs {1}")]
    DenominatorMismatch(i64, i64),
    #[error("grading {value} of '{id}' is not a multiple of 1/{denominator}")]
    OffLattice { id: String, value: Grading, denominator: i64 },
    #[error("irreducible manifolds have no modified grading")]
    IrreducibleModified,
    #[error("involution: {0}")]
    Involution(String),
    #[error("filtration level missing for manifold '{0}'")]
    MissingLevel(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Irreducible,
    BoundaryStable,
    BoundaryUnstable,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Irreducible => "irreducible",
            Kind::BoundaryStable => "boundary_stable",
            Kind::BoundaryUnstable => "boundary_unstable",
        }
    }

    fn part(self) -> usize {
        match self {
            Kind::Irreducible => O,
            Kind::BoundaryStable => S,
            Kind::BoundaryUnstable => U,
        }
    }

    /// Stable and unstable swap under orientation reversal.
    pub fn dual(self) -> Kind {
        match self {
            Kind::Irreducible => Kind::Irreducible,
            Kind::BoundaryStable => Kind::BoundaryUnstable,
            Kind::BoundaryUnstable => Kind::BoundaryStable,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "irreducible" => Ok(Kind::Irreducible),
            "boundary_stable" => Ok(Kind::BoundaryStable),
            "boundary_unstable" => Ok(Kind::BoundaryUnstable),
            _ => Err(format!("unknown kind '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpClass {
    Oo,
    Os,
    Uo,
    Us,
    BarSs,
    BarSu,
    BarUs,
    BarUu,
}

impl OpClass {
    pub const ALL: [OpClass; 8] = [
        OpClass::Oo,
        OpClass::Os,
        OpClass::Uo,
        OpClass::Us,
        OpClass::BarSs,
        OpClass::BarSu,
        OpClass::BarUs,
        OpClass::BarUu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpClass::Oo => "oo",
            OpClass::Os => "os",
            OpClass::Uo => "uo",
            OpClass::Us => "us",
            OpClass::BarSs => "bar_ss",
            OpClass::BarSu => "bar_su",
            OpClass::BarUs => "bar_us",
            OpClass::BarUu => "bar_uu",
        }
    }

    /// Source and target kinds allowed for this class.
    pub fn kinds(self) -> (Kind, Kind) {
        use Kind::*;
        match self {
            OpClass::Oo => (Irreducible, Irreducible),
            OpClass::Os => (Irreducible, BoundaryStable),
            OpClass::Uo => (BoundaryUnstable, Irreducible),
            OpClass::Us => (BoundaryUnstable, BoundaryStable),
            OpClass::BarSs => (BoundaryStable, BoundaryStable),
            OpClass::BarSu => (BoundaryStable, BoundaryUnstable),
            OpClass::BarUs => (BoundaryUnstable, BoundaryStable),
            OpClass::BarUu => (BoundaryUnstable, BoundaryUnstable),
        }
    }

    /// Grading shift of an operator of this class inside a map of flavor
    /// degree `delta` (the differentials have `delta = -1`).
    pub fn expected_shift(self, delta: Grading) -> Grading {
        match self {
            OpClass::BarSu => delta + 1,
            OpClass::BarUs => delta - 1,
            _ => delta,
        }
    }

    /// The class of the transposed operator after orientation reversal.
    pub fn dual(self) -> OpClass {
        match self {
            OpClass::Os => OpClass::Uo,
            OpClass::Uo => OpClass::Os,
            OpClass::BarSs => OpClass::BarUu,
            OpClass::BarUu => OpClass::BarSs,
            c => c,
        }
    }
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        OpClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown operator class '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerInfo {
    pub tower: String,
    pub index: i64,
    /// Sign of the eigenvalue, `1` or `-1`.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalManifold {
    pub id: String,
    pub kind: Kind,
    pub base_grading: Grading,
    /// Integer-graded from 0 to the manifold's dimension.
    pub local: GradedComplex,
    pub tower: Option<TowerInfo>,
}

impl CriticalManifold {
    pub fn dim(&self) -> i64 {
        self.local.space.degrees().last().and_then(|d| d.as_integer()).unwrap_or(0)
    }

    /// Local degree and index of a cell.
    pub fn cell(&self, label: &str) -> Option<(Grading, usize)> {
        self.local
            .space
            .degrees()
            .find_map(|d| self.local.space.labels(d).iter().position(|l| l == label).map(|i| (d, i)))
    }

    pub fn cells(&self) -> Vec<(Grading, String)> {
        self.local
            .space
            .degrees()
            .flat_map(|d| self.local.space.labels(d).iter().map(move |l| (d, l.clone())))
            .collect()
    }

    fn check(&self) -> Result<(), FloerError> {
        let bad = |msg: &str| Err(FloerError::Manifold(self.id.clone(), msg.to_string()));
        match (self.kind, &self.tower) {
            (Kind::Irreducible, Some(_)) => return bad("irreducible manifolds carry no tower data"),
            (Kind::BoundaryStable | Kind::BoundaryUnstable, None) => {
                return bad("reducible manifolds need tower data")
            }
            _ => {}
        }
        if let Some(t) = &self.tower {
            if t.sign != 1 && t.sign != -1 {
                return bad("tower sign must be 1 or -1");
            }
        }
        for d in self.local.space.degrees() {
            match d.as_integer() {
                Some(n) if n >= 0 => {}
                _ => return bad("local degrees must be non-negative integers"),
            }
        }
        if !self.local.space.labels_unique() {
            return bad("duplicate cell label");
        }
        for (d, b) in self.local.diff.blocks() {
            if self.local.space.dim(d - 1) == 0 && !b.is_zero() {
                return bad("local differential leaves the complex");
            }
        }
        let sq = self.local.diff.compose(&self.local.diff, &self.local.space, &self.local.space, &self.local.space);
        if !sq.is_zero() {
            return bad("local complex does not square to zero");
        }
        Ok(())
    }
}

/// A component operator given by cell-to-cell entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliOperator {
    pub class: OpClass,
    pub source: String,
    pub target: String,
    /// Declared shift in the unmodified grading.
    pub shift: Grading,
    /// `(source cell, target cell)` pairs with coefficient 1.
    pub entries: Vec<(String, String)>,
}

impl ModuliOperator {
    pub fn new(
        class: OpClass,
        source: impl Into<String>,
        target: impl Into<String>,
        shift: impl Into<Grading>,
        entries: &[(&str, &str)],
    ) -> Self {
        ModuliOperator {
            class,
            source: source.into(),
            target: target.into(),
            shift: shift.into(),
            entries: entries.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    /// The operator as a map between the two local complexes.
    pub fn local_map(&self, src: &CriticalManifold, tgt: &CriticalManifold) -> Option<GradedMap> {
        let local = self.shift - (tgt.base_grading - src.base_grading);
        let mut blocks: BTreeMap<Grading, BitMatrix> = BTreeMap::new();
        for (a, b) in &self.entries {
            let (da, ia) = src.cell(a)?;
            let (db, ib) = tgt.cell(b)?;
            if db - da != local {
                return None;
            }
            blocks
                .entry(da)
                .or_insert_with(|| BitMatrix::zeros(tgt.local.space.dim(db), src.local.space.dim(da)))
                .flip(ib, ia);
        }
        let mut m = GradedMap::zero(local);
        for (d, b) in blocks {
            m.set_block(d, b);
        }
        Some(m)
    }
}

/// Operators of a cobordism map (or a module operator) of a fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismOps {
    pub degree: Grading,
    pub ops: Vec<ModuliOperator>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleOps {
    pub q: Option<CobordismOps>,
    pub v: Option<CobordismOps>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub name: String,
    pub b1: u32,
    pub rokhlin_times8: Option<i64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloerData {
    pub manifolds: Vec<CriticalManifold>,
    pub operators: Vec<ModuliOperator>,
    pub grading_denominator: i64,
    pub metadata: Metadata,
    pub involution: Option<Involution>,
    pub module: ModuleOps,
    /// Energy level per manifold id.
    pub filtration: Option<BTreeMap<String, i64>>,
}

impl Default for FloerData {
    fn default() -> Self {
        FloerData {
            manifolds: Vec::new(),
            operators: Vec::new(),
            grading_denominator: 1,
            metadata: Metadata::default(),
            involution: None,
            module: ModuleOps::default(),
            filtration: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Check,
    Hat,
    Bar,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Check, Flavor::Hat, Flavor::Bar];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Check => "check",
            Flavor::Hat => "hat",
            Flavor::Bar => "bar",
        }
    }

    /// Summands as (part, offset from the unmodified grading).
    fn parts(self) -> [(usize, i64); 2] {
        match self {
            Flavor::Check => [(O, 0), (S, 0)],
            Flavor::Hat => [(O, 0), (U, 0)],
            Flavor::Bar => [(S, 0), (U, -1)],
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown flavor '{s}'"))
    }
}

const O: usize = 0;
const S: usize = 1;
const U: usize = 2;

#[derive(Clone, Debug)]
struct Slot {
    part: usize,
    base: Grading,
    /// Local degree to the manifold's first index in its part at that degree.
    offsets: BTreeMap<Grading, usize>,
    cells: HashMap<String, (Grading, usize)>,
}

impl Slot {
    fn global(&self, cell: &str) -> Option<(Grading, usize)> {
        let (d, i) = self.cells.get(cell)?;
        Some((self.base + *d, self.offsets[d] + i))
    }
}

/// All cells of a data set, sorted into irreducible / stable / unstable parts,
/// in the unmodified grading.
#[derive(Clone, Debug)]
pub struct Cells {
    parts: [GradedSpace; 3],
    slots: HashMap<String, Slot>,
    order: Vec<String>,
}

impl Cells {
    fn new(data: &FloerData) -> Self {
        let mut parts: [GradedSpace; 3] = Default::default();
        let mut slots = HashMap::new();
        for m in &data.manifolds {
            let part = m.kind.part();
            let mut offsets = BTreeMap::new();
            let mut cells = HashMap::new();
            for d in m.local.space.degrees() {
                let g = m.base_grading + d;
                offsets.insert(d, parts[part].dim(g));
                for (i, l) in m.local.space.labels(d).iter().enumerate() {
                    parts[part].push(g, format!("{}:{}", m.id, l));
                    cells.insert(l.clone(), (d, i));
                }
            }
            slots.insert(
                m.id.clone(),
                Slot {
                    part,
                    base: m.base_grading,
                    offsets,
                    cells,
                },
            );
        }
        Cells {
            parts,
            slots,
            order: data.manifolds.iter().map(|m| m.id.clone()).collect(),
        }
    }
}

/// Accumulates entries of a homogeneous map between two graded spaces.
struct MapBuilder<'a> {
    shift: Grading,
    src: &'a GradedSpace,
    tgt: &'a GradedSpace,
    blocks: BTreeMap<Grading, BitMatrix>,
}

impl<'a> MapBuilder<'a> {
    fn new(shift: Grading, src: &'a GradedSpace, tgt: &'a GradedSpace) -> Self {
        MapBuilder {
            shift,
            src,
            tgt,
            blocks: BTreeMap::new(),
        }
    }

    fn flip(&mut self, d: Grading, row: usize, col: usize) {
        let (rows, cols) = (self.tgt.dim(d + self.shift), self.src.dim(d));
        self.blocks
            .entry(d)
            .or_insert_with(|| BitMatrix::zeros(rows, cols))
            .flip(row, col);
    }

    fn add_block(&mut self, d: Grading, row0: usize, col0: usize, b: &BitMatrix) {
        for (r, c) in b.entries() {
            self.flip(d, row0 + r, col0 + c);
        }
    }

    fn finish(self) -> GradedMap {
        let mut m = GradedMap::zero(self.shift);
        for (d, b) in self.blocks {
            m.set_block(d, b);
        }
        m
    }
}

/// Operator class maps between the parts of two cell sets.
#[derive(Clone, Debug)]
struct ClassMaps {
    maps: BTreeMap<OpClass, GradedMap>,
    delta: Grading,
}

impl ClassMaps {
    fn get(&self, c: OpClass) -> GradedMap {
        self.maps
            .get(&c)
            .cloned()
            .unwrap_or_else(|| GradedMap::zero(c.expected_shift(self.delta)))
    }

    fn build(
        what: &str,
        ops: &[ModuliOperator],
        src: &Cells,
        src_data: &FloerData,
        tgt: &Cells,
        tgt_data: &FloerData,
        delta: Grading,
    ) -> Result<ClassMaps, FloerError> {
        let kinds_src: HashMap<&str, Kind> = src_data.manifolds.iter().map(|m| (m.id.as_str(), m.kind)).collect();
        let kinds_tgt: HashMap<&str, Kind> = tgt_data.manifolds.iter().map(|m| (m.id.as_str(), m.kind)).collect();
        let mut builders: BTreeMap<OpClass, MapBuilder> = BTreeMap::new();
        for (index, op) in ops.iter().enumerate() {
            let unknown = |id: &str| FloerError::UnknownManifold {
                what: what.to_string(),
                index,
                id: id.to_string(),
            };
            let sk = *kinds_src.get(op.source.as_str()).ok_or_else(|| unknown(&op.source))?;
            let tk = *kinds_tgt.get(op.target.as_str()).ok_or_else(|| unknown(&op.target))?;
            if op.class.kinds() != (sk, tk) {
                return Err(FloerError::ClassKind {
                    what: what.to_string(),
                    index,
                    class: op.class,
                    source_kind: sk,
                    target_kind: tk,
                });
            }
            let expected = op.class.expected_shift(delta);
            if op.shift != expected {
                return Err(FloerError::ShiftMismatch {
                    what: what.to_string(),
                    index,
                    class: op.class,
                    declared: op.shift,
                    expected,
                });
            }
            let (ss, ts) = (&src.slots[&op.source], &tgt.slots[&op.target]);
            let b = builders
                .entry(op.class)
                .or_insert_with(|| MapBuilder::new(expected, &src.parts[ss.part], &tgt.parts[ts.part]));
            let mut seen = BTreeSet::new();
            for (a, c) in &op.entries {
                let cell_err = |m: &str, cell: &str| FloerError::UnknownCell {
                    what: what.to_string(),
                    index,
                    manifold: m.to_string(),
                    cell: cell.to_string(),
                };
                let (ga, ia) = ss.global(a).ok_or_else(|| cell_err(&op.source, a))?;
                let (gc, ic) = ts.global(c).ok_or_else(|| cell_err(&op.target, c))?;
                if gc - ga != op.shift {
                    return Err(FloerError::EntryShift {
                        what: what.to_string(),
                        index,
                        source_cell: a.clone(),
                        target_cell: c.clone(),
                        actual: gc - ga,
                        declared: op.shift,
                    });
                }
                if !seen.insert((a, c)) {
                    return Err(FloerError::DuplicateEntry {
                        what: what.to_string(),
                        index,
                        source_cell: a.clone(),
                        target_cell: c.clone(),
                    });
                }
                b.flip(ga, ic, ia);
            }
        }
        Ok(ClassMaps {
            maps: builders.into_iter().map(|(c, b)| (c, b.finish())).collect(),
            delta,
        })
    }
}

/// Flavor layout: which parts occupy each flavor degree, and where.
#[derive(Clone, Debug)]
pub struct Layout {
    pub flavor: Flavor,
    pub space: GradedSpace,
    pub window: Window,
    starts: BTreeMap<Grading, [usize; 2]>,
}

impl Layout {
    fn new(flavor: Flavor, cells: &Cells, window: Window) -> Self {
        let mut space = GradedSpace::new();
        let mut starts = BTreeMap::new();
        let mut degrees = BTreeSet::new();
        for (p, off) in flavor.parts() {
            degrees.extend(cells.parts[p].degrees().map(|g| g + off));
        }
        for e in degrees.into_iter().filter(|e| window.contains(*e)) {
            let mut st = [0; 2];
            for (k, (p, off)) in flavor.parts().into_iter().enumerate() {
                st[k] = space.dim(e);
                for l in cells.parts[p].labels(e - off) {
                    space.push(e, l.clone());
                }
            }
            starts.insert(e, st);
        }
        Layout {
            flavor,
            space,
            window,
            starts,
        }
    }

    fn slot(&self, part: usize) -> Option<(usize, i64)> {
        self.flavor
            .parts()
            .into_iter()
            .enumerate()
            .find(|(_, (p, _))| *p == part)
            .map(|(k, (_, off))| (k, off))
    }
}

/// Places part-to-part component maps into a map between two flavor layouts.
fn place(src: &Layout, tgt: &Layout, shift: Grading, comps: &[(usize, usize, &GradedMap)]) -> GradedMap {
    let mut b = MapBuilder::new(shift, &src.space, &tgt.space);
    for &(ps, pt, m) in comps {
        let (ks, offs) = src.slot(ps).expect("source part in layout");
        let (kt, offt) = tgt.slot(pt).expect("target part in layout");
        for (g, block) in m.blocks() {
            let e = g + offs;
            let t = e + shift;
            debug_assert_eq!(g + m.shift + offt, t, "component shift disagrees with flavor degree");
            let (Some(ss), Some(ts)) = (src.starts.get(&e), tgt.starts.get(&t)) else {
                continue;
            };
            b.add_block(e, ts[kt], ss[ks], block);
        }
    }
    b.finish()
}

/// The three assembled differentials and their ingredients, for one data set.
#[derive(Clone, Debug)]
pub struct Assembly<'a> {
    pub data: &'a FloerData,
    cells: Cells,
    local: [GradedMap; 3],
    ops: ClassMaps,
    /// `∂^u_o ∂̄^s_u`, `∂^u_s ∂̄^s_u`, `∂̄^s_u ∂^o_s`, `∂̄^s_u ∂^u_s`.
    uo_su: GradedMap,
    us_su: GradedMap,
    su_os: GradedMap,
    su_us: GradedMap,
}

pub struct Ijp {
    pub i: GradedMap,
    pub j: GradedMap,
    pub p: GradedMap,
}

/// Check, hat and bar components of a cobordism map.
#[derive(Clone, Debug)]
pub struct FlavorMaps {
    pub check: GradedMap,
    pub hat: GradedMap,
    pub bar: GradedMap,
}

impl FlavorMaps {
    pub fn get(&self, f: Flavor) -> &GradedMap {
        match f {
            Flavor::Check => &self.check,
            Flavor::Hat => &self.hat,
            Flavor::Bar => &self.bar,
        }
    }
}

impl FloerData {
    pub fn manifold(&self, id: &str) -> Option<&CriticalManifold> {
        self.manifolds.iter().find(|m| m.id == id)
    }

    /// Structural checks that do not need assembly.
    pub fn check_structure(&self) -> Result<(), FloerError> {
        let mut ids = BTreeSet::new();
        for m in &self.manifolds {
            if !ids.insert(m.id.as_str()) {
                return Err(FloerError::DuplicateManifold(m.id.clone()));
            }
            m.check()?;
            if !m.base_grading.on_lattice(self.grading_denominator) {
                return Err(FloerError::OffLattice {
                    id: m.id.clone(),
                    value: m.base_grading,
                    denominator: self.grading_denominator,
                });
            }
        }
        Ok(())
    }

    pub fn assemble(&self) -> Result<Assembly<'_>, FloerError> {
        self.check_structure()?;
        let cells = Cells::new(self);
        let ops = ClassMaps::build("operators", &self.operators, &cells, self, &cells, self, Grading::int(-1))?;
        let mut local: [MapBuilder; 3] = [0, 1, 2].map(|p| MapBuilder::new(Grading::int(-1), &cells.parts[p], &cells.parts[p]));
        for m in &self.manifolds {
            let slot = &cells.slots[&m.id];
            for (d, b) in m.local.diff.blocks() {
                let g = slot.base + d;
                let row0 = slot.offsets.get(&(d - 1)).copied().unwrap_or(0);
                local[slot.part].add_block(g, row0, slot.offsets[&d], b);
            }
        }
        let local = local.map(MapBuilder::finish);
        let p = &cells.parts;
        let su = ops.get(OpClass::BarSu);
        let uo_su = ops.get(OpClass::Uo).compose(&su, &p[S], &p[U], &p[O]);
        let us_su = ops.get(OpClass::Us).compose(&su, &p[S], &p[U], &p[S]);
        let su_os = su.compose(&ops.get(OpClass::Os), &p[O], &p[S], &p[U]);
        let su_us = su.compose(&ops.get(OpClass::Us), &p[U], &p[S], &p[U]);
        Ok(Assembly {
            data: self,
            cells,
            local,
            ops,
            uo_su,
            us_su,
            su_os,
            su_us,
        })
    }

    pub fn assemble_complex(&self, flavor: Flavor, window: Window) -> Result<GradedComplex, FloerError> {
        self.assemble()?.complex(flavor, window)
    }

    /// Orientation reversal: gradings `gr -> -1 - b1 - gr`, stable and
    /// unstable swapped, all maps transposed.
    pub fn dual(&self) -> FloerData {
        let k = Grading::int(-1 - self.metadata.b1 as i64);
        let manifolds = self
            .manifolds
            .iter()
            .map(|m| {
                let dim = m.dim();
                CriticalManifold {
                    id: m.id.clone(),
                    kind: m.kind.dual(),
                    base_grading: k - m.base_grading - dim,
                    local: m.local.dualize(Grading::int(dim)),
                    tower: m.tower.as_ref().map(|t| TowerInfo {
                        tower: t.tower.clone(),
                        index: -t.index,
                        sign: -t.sign,
                    }),
                }
            })
            .collect();
        let dual_ops = |ops: &[ModuliOperator]| -> Vec<ModuliOperator> {
            ops.iter()
                .map(|op| ModuliOperator {
                    class: op.class.dual(),
                    source: op.target.clone(),
                    target: op.source.clone(),
                    shift: op.shift,
                    entries: op.entries.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
                })
                .collect()
        };
        let dual_cob = |c: &Option<CobordismOps>| {
            c.as_ref().map(|c| CobordismOps {
                degree: c.degree,
                ops: dual_ops(&c.ops),
            })
        };
        let mut notes = self.metadata.notes.clone();
        notes.push("orientation reversed".into());
        FloerData {
            manifolds,
            operators: dual_ops(&self.operators),
            grading_denominator: self.grading_denominator,
            metadata: Metadata {
                name: format!("dual({})", self.metadata.name),
                b1: self.metadata.b1,
                rokhlin_times8: self.metadata.rokhlin_times8.map(|r| -r),
                notes,
            },
            involution: self.involution.clone(),
            module: ModuleOps {
                q: dual_cob(&self.module.q),
                v: dual_cob(&self.module.v),
            },
            filtration: self
                .filtration
                .as_ref()
                .map(|f| f.iter().map(|(k, v)| (k.clone(), -v)).collect()),
        }
    }

    /// Validation report over the window. Never aborts.
    pub fn validate(&self, window: Window) -> ValidationReport {
        let mut report = ValidationReport::default();
        let asm = match self.assemble() {
            Ok(a) => a,
            Err(e) => {
                report.push("structure", Status::Fail, e.to_string());
                return report;
            }
        };
        report.push("structure", Status::Pass, String::new());
        let mut complexes = BTreeMap::new();
        for flavor in Flavor::ALL {
            match asm.complex(flavor, window) {
                Ok(c) => {
                    report.push_degrees(&format!("square_zero[{flavor}]"), &c.verify_square_zero());
                    complexes.insert(flavor, c);
                }
                Err(e) => report.push(&format!("square_zero[{flavor}]"), Status::Fail, e.to_string()),
            }
        }
        for (k, m) in &self.module_ops() {
            match asm.cobordism(&asm, m, window) {
                Ok(maps) => {
                    for (flavor, c) in &complexes {
                        let r = verify_chain_map(maps.get(*flavor), c, c);
                        report.push_degrees(&format!("module[{k}]:chain_map[{flavor}]"), &r);
                    }
                }
                Err(e) => report.push(&format!("module[{k}]"), Status::Fail, e.to_string()),
            }
        }
        for id in asm.identities() {
            let (name, src_flavor, src_part, comp) = (id.name, id.flavor, id.source_part, id.map);
            let layout_off = src_flavor.parts().into_iter().find(|(p, _)| *p == src_part).unwrap().1;
            let mut fails = Vec::new();
            for (g, b) in comp.blocks() {
                let e = g + layout_off;
                if window.contains(e) && window.contains(e - 2) && !b.is_zero() {
                    fails.push(e);
                }
            }
            if fails.is_empty() {
                report.push(&name, Status::Pass, String::new());
            } else {
                let degs: Vec<String> = fails.iter().map(|d| d.to_string()).collect();
                report.push(&name, Status::Fail, format!("nonzero out of degree {}", degs.join(", ")));
            }
        }
        if complexes.len() == 3 {
            let ijp = asm.ijp(window);
            let (bar, check, hat) = (&complexes[&Flavor::Bar], &complexes[&Flavor::Check], &complexes[&Flavor::Hat]);
            report.push_degrees("chain_map[i]", &verify_chain_map(&ijp.i, bar, check));
            report.push_degrees("chain_map[j]", &verify_chain_map(&ijp.j, check, hat));
            report.push_degrees("chain_map[p]", &verify_chain_map(&ijp.p, hat, bar));
        }
        if let Some(inv) = &self.involution {
            match asm.equivariance(inv) {
                Ok(bad) if bad.is_empty() => report.push("involution", Status::Pass, String::new()),
                Ok(bad) => report.push("involution", Status::Fail, format!("does not commute with {}", bad.join(", "))),
                Err(e) => report.push("involution", Status::Fail, e.to_string()),
            }
        }
        report.warnings = asm.obstruction_warnings();
        report
    }

    fn module_ops(&self) -> Vec<(&'static str, &CobordismOps)> {
        let mut v = Vec::new();
        if let Some(q) = &self.module.q {
            v.push(("q", q));
        }
        if let Some(x) = &self.module.v {
            v.push(("v", x));
        }
        v
    }
}

/// A named component of a squared differential.
pub struct ComponentIdentity {
    pub name: String,
    pub flavor: Flavor,
    source_part: usize,
    pub map: GradedMap,
}

impl<'a> Assembly<'a> {
    pub fn layout(&self, flavor: Flavor, window: Window) -> Layout {
        Layout::new(flavor, &self.cells, window)
    }

    /// `(source part, target part, component)` of each flavor differential.
    fn differential_components(&self, flavor: Flavor) -> Vec<(usize, usize, GradedMap)> {
        let op = |c| self.ops.get(c);
        match flavor {
            Flavor::Check => vec![
                (O, O, self.local[O].add(&op(OpClass::Oo))),
                (S, O, self.uo_su.clone()),
                (O, S, op(OpClass::Os)),
                (S, S, self.local[S].add(&op(OpClass::BarSs)).add(&self.us_su)),
            ],
            Flavor::Hat => vec![
                (O, O, self.local[O].add(&op(OpClass::Oo))),
                (U, O, op(OpClass::Uo)),
                (O, U, self.su_os.clone()),
                (U, U, self.local[U].add(&op(OpClass::BarUu)).add(&self.su_us)),
            ],
            Flavor::Bar => vec![
                (S, S, self.local[S].add(&op(OpClass::BarSs))),
                (U, S, op(OpClass::BarUs)),
                (S, U, op(OpClass::BarSu)),
                (U, U, self.local[U].add(&op(OpClass::BarUu))),
            ],
        }
    }

    pub fn complex(&self, flavor: Flavor, window: Window) -> Result<GradedComplex, FloerError> {
        let layout = self.layout(flavor, window);
        let comps = self.differential_components(flavor);
        let refs: Vec<(usize, usize, &GradedMap)> = comps.iter().map(|(a, b, m)| (*a, *b, m)).collect();
        let diff = place(&layout, &layout, Grading::int(-1), &refs);
        Ok(GradedComplex::new(layout.space, diff, window)?)
    }

    /// The twelve components of the three squared differentials, each of
    /// which must vanish.
    pub fn identities(&self) -> Vec<ComponentIdentity> {
        let p = &self.cells.parts;
        let mut out = Vec::new();
        for flavor in Flavor::ALL {
            let comps = self.differential_components(flavor);
            let [a, b] = flavor.parts().map(|(p, _)| p);
            let off = |q: usize| flavor.parts().into_iter().find(|(x, _)| *x == q).unwrap().1;
            let get = |s: usize, t: usize| comps.iter().find(|(x, y, _)| *x == s && *y == t).map(|c| &c.2).unwrap();
            let names = |p: usize| match p {
                O => "o",
                S => "s",
                _ => "u",
            };
            for s in [a, b] {
                for t in [a, b] {
                    let mut sum = GradedMap::zero(Grading::int(-2 + off(s) - off(t)));
                    for m in [a, b] {
                        sum = sum.add(&get(m, t).compose(get(s, m), &p[s], &p[m], &p[t]));
                    }
                    out.push(ComponentIdentity {
                        name: format!("identity[{flavor}:{}->{}]", names(s), names(t)),
                        flavor,
                        source_part: s,
                        map: sum,
                    });
                }
            }
        }
        out
    }

    /// The maps `i: bar -> check`, `j: check -> hat`, `p: hat -> bar`.
    pub fn ijp(&self, window: Window) -> Ijp {
        let bar = self.layout(Flavor::Bar, window);
        let check = self.layout(Flavor::Check, window);
        let hat = self.layout(Flavor::Hat, window);
        let op = |c| self.ops.get(c);
        let id_s = GradedMap::identity(&self.cells.parts[S]);
        let id_o = GradedMap::identity(&self.cells.parts[O]);
        let id_u = GradedMap::identity(&self.cells.parts[U]);
        let (uo, us, su, os) = (op(OpClass::Uo), op(OpClass::Us), op(OpClass::BarSu), op(OpClass::Os));
        let i = place(&bar, &check, Grading::ZERO, &[(S, S, &id_s), (U, O, &uo), (U, S, &us)]);
        let j = place(&check, &hat, Grading::ZERO, &[(O, O, &id_o), (S, U, &su)]);
        let p = place(&hat, &bar, Grading::int(-1), &[(O, S, &os), (U, S, &us), (U, U, &id_u)]);
        Ijp { i, j, p }
    }

    /// Assembles a cobordism map from `self` (source) to `tgt`.
    pub fn cobordism(&self, tgt: &Assembly<'_>, cob: &CobordismOps, window: Window) -> Result<FlavorMaps, FloerError> {
        if self.data.grading_denominator != tgt.data.grading_denominator {
            return Err(FloerError::DenominatorMismatch(
                self.data.grading_denominator,
                tgt.data.grading_denominator,
            ));
        }
        let m = ClassMaps::build("ops", &cob.ops, &self.cells, self.data, &tgt.cells, tgt.data, cob.degree)?;
        let (ps, pt) = (&self.cells.parts, &tgt.cells.parts);
        let mm = |c| m.get(c);
        let su_src = self.ops.get(OpClass::BarSu);
        let su_tgt = tgt.ops.get(OpClass::BarSu);
        let msu = mm(OpClass::BarSu);
        let s_to_o = mm(OpClass::Uo)
            .compose(&su_src, &ps[S], &ps[U], &pt[O])
            .add(&tgt.ops.get(OpClass::Uo).compose(&msu, &ps[S], &pt[U], &pt[O]));
        let s_to_s = mm(OpClass::BarSs)
            .add(&mm(OpClass::Us).compose(&su_src, &ps[S], &ps[U], &pt[S]))
            .add(&tgt.ops.get(OpClass::Us).compose(&msu, &ps[S], &pt[U], &pt[S]));
        let o_to_u = msu
            .compose(&self.ops.get(OpClass::Os), &ps[O], &ps[S], &pt[U])
            .add(&su_tgt.compose(&mm(OpClass::Os), &ps[O], &pt[S], &pt[U]));
        let u_to_u = mm(OpClass::BarUu)
            .add(&msu.compose(&self.ops.get(OpClass::Us), &ps[U], &ps[S], &pt[U]))
            .add(&su_tgt.compose(&mm(OpClass::Us), &ps[U], &pt[S], &pt[U]));
        let d = cob.degree;
        let lay = |a: &Assembly<'_>, f| a.layout(f, window);
        let check = place(
            &lay(self, Flavor::Check),
            &lay(tgt, Flavor::Check),
            d,
            &[(O, O, &mm(OpClass::Oo)), (O, S, &mm(OpClass::Os)), (S, O, &s_to_o), (S, S, &s_to_s)],
        );
        let hat = place(
            &lay(self, Flavor::Hat),
            &lay(tgt, Flavor::Hat),
            d,
            &[(O, O, &mm(OpClass::Oo)), (U, O, &mm(OpClass::Uo)), (O, U, &o_to_u), (U, U, &u_to_u)],
        );
        let bar = place(
            &lay(self, Flavor::Bar),
            &lay(tgt, Flavor::Bar),
            d,
            &[
                (S, S, &mm(OpClass::BarSs)),
                (U, S, &mm(OpClass::BarUs)),
                (S, U, &msu),
                (U, U, &mm(OpClass::BarUu)),
            ],
        );
        Ok(FlavorMaps { check, hat, bar })
    }

    /// The module operators `Q` and `V` as maps of each flavor complex.
    pub fn module_maps(&self, window: Window) -> Result<(Option<FlavorMaps>, Option<FlavorMaps>), FloerError> {
        let q = self.data.module.q.as_ref().map(|q| self.cobordism(self, q, window)).transpose()?;
        let v = self.data.module.v.as_ref().map(|v| self.cobordism(self, v, window)).transpose()?;
        Ok((q, v))
    }

    /// The involution on each part, in the unmodified grading.
    fn involution_parts(&self, inv: &Involution) -> Result<[GradedMap; 3], FloerError> {
        let mut b: [MapBuilder; 3] = [0, 1, 2].map(|p| MapBuilder::new(Grading::ZERO, &self.cells.parts[p], &self.cells.parts[p]));
        for id in &self.cells.order {
            let slot = &self.cells.slots[id];
            let img_id = inv.manifold_image(id);
            let img = self
                .cells
                .slots
                .get(img_id)
                .ok_or_else(|| FloerError::Involution(format!("'{id}' maps to unknown manifold '{img_id}'")))?;
            if img.part != slot.part {
                return Err(FloerError::Involution(format!("'{id}' and '{img_id}' have different kinds")));
            }
            let mut cells: Vec<&String> = slot.cells.keys().collect();
            cells.sort();
            for c in cells {
                let (ti, tc) = inv.cell_image(id, c);
                if ti != img_id {
                    return Err(FloerError::Involution(format!("cell {id}:{c} leaves the image manifold")));
                }
                let (g, i) = slot.global(c).unwrap();
                let (h, k) = img
                    .global(tc)
                    .ok_or_else(|| FloerError::Involution(format!("cell {id}:{c} maps to unknown cell {ti}:{tc}")))?;
                if g != h {
                    return Err(FloerError::Involution(format!("cell {id}:{c} changes grading")));
                }
                b[slot.part].flip(g, k, i);
            }
        }
        Ok(b.map(MapBuilder::finish))
    }

    /// The involution as a degree-0 map on a flavor complex.
    pub fn involution(&self, flavor: Flavor, window: Window) -> Result<Option<GradedMap>, FloerError> {
        let Some(inv) = &self.data.involution else {
            return Ok(None);
        };
        let parts = self.involution_parts(inv)?;
        let layout = self.layout(flavor, window);
        let [a, b] = flavor.parts().map(|(p, _)| p);
        Ok(Some(place(&layout, &layout, Grading::ZERO, &[(a, a, &parts[a]), (b, b, &parts[b])])))
    }

    /// Operator classes (and local differentials) that fail to commute with
    /// the involution.
    pub fn equivariance(&self, inv: &Involution) -> Result<Vec<String>, FloerError> {
        let j = self.involution_parts(inv)?;
        let p = &self.cells.parts;
        let mut bad = Vec::new();
        for part in [O, S, U] {
            let sq = j[part].compose(&j[part], &p[part], &p[part], &p[part]);
            if sq != GradedMap::identity(&p[part]) {
                bad.push(format!("involution squared on {}", ["o", "s", "u"][part]));
            }
            let l = &self.local[part];
            if l.compose(&j[part], &p[part], &p[part], &p[part]) != j[part].compose(l, &p[part], &p[part], &p[part]) {
                bad.push(format!("local differential on {}", ["o", "s", "u"][part]));
            }
        }
        let mut check = |name: String, m: &GradedMap, s: usize, t: usize| {
            if m.compose(&j[s], &p[s], &p[s], &p[t]) != j[t].compose(m, &p[s], &p[t], &p[t]) {
                bad.push(name);
            }
        };
        for c in OpClass::ALL {
            let (sk, tk) = c.kinds();
            check(c.name().to_string(), &self.ops.get(c), sk.part(), tk.part());
        }
        for (name, cob) in self.data.module_ops() {
            let m = ClassMaps::build(name, &cob.ops, &self.cells, self.data, &self.cells, self.data, cob.degree)?;
            for c in OpClass::ALL {
                let (sk, tk) = c.kinds();
                check(format!("{name}.{c}"), &m.get(c), sk.part(), tk.part());
            }
        }
        Ok(bad)
    }

    /// Filtration levels of a flavor's generators.
    pub fn levels(&self, flavor: Flavor, window: Window) -> Result<Option<BTreeMap<Grading, Vec<i64>>>, FloerError> {
        let Some(f) = &self.data.filtration else {
            return Ok(None);
        };
        let layout = self.layout(flavor, window);
        let mut out = BTreeMap::new();
        for d in layout.space.degrees() {
            let mut v = Vec::new();
            for l in layout.space.labels(d) {
                let id = l.split_once(':').map_or(l.as_str(), |(m, _)| m);
                v.push(*f.get(id).ok_or_else(|| FloerError::MissingLevel(id.to_string()))?);
            }
            out.insert(d, v);
        }
        Ok(Some(out))
    }

    /// Boundary-obstructed operators with no completing operator out of
    /// their unstable end.
    pub fn obstruction_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let has_out: BTreeSet<&str> = self
            .data
            .operators
            .iter()
            .filter(|o| matches!(o.class, OpClass::Uo | OpClass::Us))
            .map(|o| o.source.as_str())
            .collect();
        for (k, op) in self.data.operators.iter().enumerate() {
            if op.class == OpClass::BarSu && !has_out.contains(op.target.as_str()) {
                out.push(format!(
                    "operators[{k}]: boundary-obstructed {} -> {} has no completing operator; strata may be missing",
                    op.source, op.target
                ));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    fn push(&mut self, check: &str, status: Status, detail: String) {
        self.findings.push(Finding {
            check: check.to_string(),
            status,
            detail,
        });
    }

    fn push_degrees(&mut self, check: &str, r: &DegreeReport) {
        let fails = r.failures();
        if fails.is_empty() {
            self.push(check, Status::Pass, String::new());
        } else {
            let degs: Vec<String> = fails.iter().map(|d| d.to_string()).collect();
            self.push(check, Status::Fail, format!("fails at degree {}", degs.join(", ")));
        }
    }

    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&Finding> {
        self.findings.iter().filter(|f| f.status == Status::Fail).collect()
    }
}

/// Relative grading between reducibles over one critical point, from the
/// eigenvalue count `i` and the signs of the two eigenvalues.
pub fn reducible_tower_grading(i: i64, sign1: i8, sign2: i8) -> i64 {
    match (sign1 > 0, sign2 > 0) {
        (true, false) => 2 * i - 1,
        (false, true) => 2 * i + 1,
        _ => 2 * i,
    }
}

/// `gr - o(minus) + o(plus)` with `o = 1` on boundary-unstable manifolds.
pub fn modified_grading(gr: Grading, kind_minus: Kind, kind_plus: Kind) -> Result<Grading, FloerError> {
    let o = |k| match k {
        Kind::Irreducible => Err(FloerError::IrreducibleModified),
        Kind::BoundaryStable => Ok(0),
        Kind::BoundaryUnstable => Ok(1),
    };
    Ok(gr - o(kind_minus)? + o(kind_plus)?)
}

pub fn absolute_grading(gr_z: i64, dim: u64, c1_sq: Grading, iota: i64, sigma: i64) -> Grading {
    Grading::int(-gr_z + dim as i64 - iota) + c1_sq.quarter() - Grading::new(sigma, 4)
}

/// `(chi + sigma - b1) / 2`; integral for geometric input.
pub fn iota_characteristic(chi: i64, sigma: i64, b1_y: u64) -> Grading {
    Grading::new(chi + sigma - b1_y as i64, 2)
}

pub fn relative_grading_sum(gr_ab: Grading, gr_bc: Grading) -> Grading {
    gr_ab + gr_bc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(id: &str, kind: Kind, base: i64) -> CriticalManifold {
        let mut space = GradedSpace::new();
        space.push(Grading::ZERO, "p");
        CriticalManifold {
            id: id.into(),
            kind,
            base_grading: Grading::int(base),
            local: GradedComplex::new(space, GradedMap::zero(Grading::int(-1)), Window::new(-1, 1)).unwrap(),
            tower: (kind != Kind::Irreducible).then(|| TowerInfo {
                tower: "t".into(),
                index: 0,
                sign: if kind == Kind::BoundaryStable { 1 } else { -1 },
            }),
        }
    }

    fn w() -> Window {
        Window::new(-10, 10)
    }

    #[test]
    fn empty_and_single_point() {
        let d = FloerData::default();
        for f in Flavor::ALL {
            assert!(d.assemble_complex(f, w()).unwrap().space.is_empty());
        }
        let d = FloerData {
            manifolds: vec![point("a", Kind::Irreducible, 3)],
            ..Default::default()
        };
        let c = d.assemble_complex(Flavor::Check, w()).unwrap();
        assert_eq!(c.space.total_dim(), 1);
        assert_eq!(c.space.dim(Grading::int(3)), 1);
        assert!(c.diff.is_zero());
        let ijp = d.assemble().unwrap().ijp(w());
        assert!(ijp.i.is_zero() && ijp.p.is_zero());
        assert!(d.validate(w()).passed());
    }

    #[test]
    fn bar_uses_modified_grading() {
        let d = FloerData {
            manifolds: vec![point("s", Kind::BoundaryStable, 0), point("u", Kind::BoundaryUnstable, 1)],
            ..Default::default()
        };
        let bar = d.assemble_complex(Flavor::Bar, w()).unwrap();
        assert_eq!(bar.space.dim(Grading::ZERO), 2);
        let hat = d.assemble_complex(Flavor::Hat, w()).unwrap();
        assert_eq!(hat.space.dim(Grading::int(1)), 1);
    }

    #[test]
    fn class_kind_rejected() {
        let d = FloerData {
            manifolds: vec![point("a", Kind::BoundaryStable, 1), point("b", Kind::BoundaryStable, 0)],
            operators: vec![ModuliOperator::new(OpClass::Oo, "a", "b", -1, &[("p", "p")])],
            ..Default::default()
        };
        assert!(matches!(d.assemble(), Err(FloerError::ClassKind { index: 0, .. })));
        let r = d.validate(w());
        assert!(!r.passed());
        assert!(r.failures()[0].detail.contains("class oo"));
    }

    #[test]
    fn shift_audit() {
        let d = FloerData {
            manifolds: vec![point("s", Kind::BoundaryStable, 1), point("u", Kind::BoundaryUnstable, 1)],
            operators: vec![ModuliOperator::new(OpClass::BarSu, "s", "u", -1, &[("p", "p")])],
            ..Default::default()
        };
        assert!(matches!(d.assemble(), Err(FloerError::ShiftMismatch { .. })));
        let d = FloerData {
            operators: vec![ModuliOperator::new(OpClass::BarSu, "s", "u", 0, &[("p", "p")])],
            ..d
        };
        let r = d.validate(w());
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!(r.warnings.len(), 1);
        let d = FloerData {
            operators: vec![ModuliOperator::new(OpClass::BarSu, "s", "nope", 0, &[("p", "p")])],
            ..d
        };
        assert!(matches!(d.assemble(), Err(FloerError::UnknownManifold { .. })));
    }

    #[test]
    fn boundary_obstructed_composite_enters_check() {
        // o --os--> s --su--> u --uo--> o': the check differential on s picks up uo∘su.
        let d = FloerData {
            manifolds: vec![
                point("s", Kind::BoundaryStable, 2),
                point("u", Kind::BoundaryUnstable, 2),
                point("o", Kind::Irreducible, 1),
            ],
            operators: vec![
                ModuliOperator::new(OpClass::BarSu, "s", "u", 0, &[("p", "p")]),
                ModuliOperator::new(OpClass::Uo, "u", "o", -1, &[("p", "p")]),
            ],
            ..Default::default()
        };
        let c = d.assemble_complex(Flavor::Check, w()).unwrap();
        assert_eq!(c.d(Grading::int(2)), BitMatrix::identity(1));
        let r = d.validate(w());
        assert!(r.passed(), "{:?}", r.failures());
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn tower_grading_examples() {
        assert_eq!(reducible_tower_grading(2, 1, 1), 4);
        assert_eq!(reducible_tower_grading(2, 1, -1), 3);
        assert_eq!(reducible_tower_grading(-2, -1, 1), -3);
        let u = Kind::BoundaryUnstable;
        let s = Kind::BoundaryStable;
        assert_eq!(modified_grading(Grading::int(1), u, s).unwrap(), Grading::ZERO);
        assert_eq!(modified_grading(Grading::int(5), s, s).unwrap(), Grading::int(5));
        assert_eq!(modified_grading(Grading::int(5), u, u).unwrap(), Grading::int(5));
        assert!(modified_grading(Grading::ZERO, Kind::Irreducible, s).is_err());
    }

    #[test]
    fn absolute_grading_examples() {
        assert_eq!(absolute_grading(0, 0, Grading::ZERO, 0, 0), Grading::ZERO);
        assert_eq!(absolute_grading(0, 0, Grading::ZERO, 0, -8), Grading::int(2));
        let g = absolute_grading(0, 2, Grading::int(-4), 1, -3);
        assert_eq!(g, Grading::new(3, 4));
        assert_eq!(g.fract(), Grading::new(-4 + 3, 4).fract());
        assert_eq!(iota_characteristic(0, 0, 0), Grading::ZERO);
        assert_eq!(iota_characteristic(8, -8, 0), Grading::ZERO);
        assert_eq!(iota_characteristic(2, 0, 0), Grading::int(1));
        assert!(!iota_characteristic(1, 0, 0).is_integer());
        assert_eq!(relative_grading_sum(Grading::ZERO, Grading::new(1, 3)), Grading::new(1, 3));
        assert_eq!(relative_grading_sum(Grading::int(3), Grading::int(4)), Grading::int(7));
    }

    #[test]
    fn parse_names() {
        for c in OpClass::ALL {
            assert_eq!(c.name().parse::<OpClass>().unwrap(), c);
            assert_eq!(c.dual().dual(), c);
        }
        assert_eq!("boundary_stable".parse::<Kind>().unwrap(), Kind::BoundaryStable);
        assert!("x".parse::<Flavor>().is_err());
    }
}
