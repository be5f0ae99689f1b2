//! Builtin Floer data sets and random complexes for property tests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::floer::{
    absolute_grading, iota_characteristic, reducible_tower_grading, relative_grading_sum, CobordismOps,
    CriticalManifold, FloerData, Kind, Metadata, ModuleOps, ModuliOperator, OpClass, TowerInfo,
};
use crate::gf2::BitMatrix;
use crate::graded::{ComplexError, FilteredComplex, GradedComplex, GradedMap, GradedSpace, Window};
use crate::grading::Grading;
use crate::pin2::Involution;

/// Levels are generated this far beyond the requested window.
pub const MARGIN: i64 = 8;

/// Largest generator count accepted by the random generators.
pub const RANDOM_SIZE_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("window [{lo}, {hi}] is too small to hold one tower level")]
    WindowTooSmall { lo: Grading, hi: Grading },
    #[error("'{0}' is a cobordism fixture, not a Floer data set")]
    NotData(String),
    #[error("size {0} exceeds the cap of {RANDOM_SIZE_CAP}")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelName {
    S3,
    Poincare,
    S1xS2,
    T3,
    FlatBundle,
    HantzscheWendt,
    MinusE8Cobordism,
}

impl ModelName {
    pub const ALL: [ModelName; 7] = [
        ModelName::S3,
        ModelName::Poincare,
        ModelName::S1xS2,
        ModelName::T3,
        ModelName::FlatBundle,
        ModelName::HantzscheWendt,
        ModelName::MinusE8Cobordism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelName::S3 => "s3",
            ModelName::Poincare => "poincare",
            ModelName::S1xS2 => "s1xs2",
            ModelName::T3 => "t3",
            ModelName::FlatBundle => "flat_bundle",
            ModelName::HantzscheWendt => "hantzsche_wendt",
            ModelName::MinusE8Cobordism => "minus_e8_cobordism",
        }
    }

    /// The models that are Floer data sets.
    pub fn data_models() -> impl Iterator<Item = ModelName> {
        Self::ALL.into_iter().filter(|m| *m != ModelName::MinusE8Cobordism)
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelName {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelOptions {
    pub involution: bool,
    pub module: bool,
    pub filtration: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            involution: true,
            module: true,
            filtration: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub name: ModelName,
    pub window: Window,
    pub options: ModelOptions,
}

impl ModelSpec {
    pub fn new(name: ModelName, window: Window) -> Self {
        ModelSpec {
            name,
            window,
            options: ModelOptions::default(),
        }
    }
}

/// Cell labels of the equivariant sphere.
pub const SPHERE_CELLS: [&str; 6] = ["e0+", "e0-", "e1+", "e1-", "e2+", "e2-"];

fn cell(a: usize, plus: bool) -> &'static str {
    SPHERE_CELLS[2 * a + usize::from(!plus)]
}

/// The six-cell sphere with `∂e1± = e0+ + e0-`, `∂e2± = e1+ + e1-`, and the
/// antipodal swap as `(cell, image)` pairs.
pub fn local_sphere_complex(equivariant: bool) -> (GradedComplex, Vec<(&'static str, &'static str)>) {
    let mut space = GradedSpace::new();
    for l in SPHERE_CELLS {
        space.push(Grading::int((l.as_bytes()[1] - b'0') as i64), l);
    }
    let ones = BitMatrix::from_rows_u8(&[&[1, 1], &[1, 1]]);
    let mut diff = GradedMap::zero(Grading::int(-1));
    diff.set_block(Grading::int(1), ones.clone());
    diff.set_block(Grading::int(2), ones);
    let c = GradedComplex::new(space, diff, Window::new(-1, 3)).expect("sphere blocks");
    let swaps = if equivariant {
        (0..3).flat_map(|a| [(cell(a, true), cell(a, false)), (cell(a, false), cell(a, true))]).collect()
    } else {
        Vec::new()
    };
    (c, swaps)
}

fn local_point() -> GradedComplex {
    let mut space = GradedSpace::new();
    space.push(Grading::ZERO, "p");
    GradedComplex::new(space, GradedMap::zero(Grading::int(-1)), Window::new(-1, 1)).expect("point")
}

fn tower(name: &str, index: i64, kind: Kind) -> Option<TowerInfo> {
    Some(TowerInfo {
        tower: name.to_string(),
        index,
        sign: if kind == Kind::BoundaryStable { 1 } else { -1 },
    })
}

fn sphere(id: String, kind: Kind, base: Grading, t: Option<TowerInfo>) -> CriticalManifold {
    CriticalManifold {
        id,
        kind,
        base_grading: base,
        local: local_sphere_complex(true).0,
        tower: t,
    }
}

fn point(id: String, kind: Kind, base: Grading, t: Option<TowerInfo>) -> CriticalManifold {
    CriticalManifold {
        id,
        kind,
        base_grading: base,
        local: local_point(),
        tower: t,
    }
}

fn antipodal(inv: &mut Involution, id: &str) {
    for (a, b) in local_sphere_complex(true).1 {
        inv.cell_map.insert((id.into(), a.into()), (id.into(), b.into()));
    }
}

fn kind_at(level: i64) -> Kind {
    if level >= 0 {
        Kind::BoundaryStable
    } else {
        Kind::BoundaryUnstable
    }
}

fn bar_class(sk: Kind, tk: Kind) -> OpClass {
    match (sk, tk) {
        (Kind::BoundaryStable, Kind::BoundaryStable) => OpClass::BarSs,
        (Kind::BoundaryStable, _) => OpClass::BarSu,
        (_, Kind::BoundaryStable) => OpClass::BarUs,
        _ => OpClass::BarUu,
    }
}

/// Cellwise identity between two spheres (or two points).
fn cellwise(src: &CriticalManifold, tgt: &CriticalManifold, shift: Grading) -> ModuliOperator {
    let cells: Vec<(String, String)> = src.cells().into_iter().map(|(_, l)| (l.clone(), l)).collect();
    ModuliOperator {
        class: bar_class(src.kind, tgt.kind),
        source: src.id.clone(),
        target: tgt.id.clone(),
        shift,
        entries: cells,
    }
}

/// The conjugate pair `A(e±) = e+`, `ȷAȷ(e±) = e-` between two spheres,
/// keeping the local degree. Their sum is the all-ones map in each degree.
fn conjugate_pair(src: &CriticalManifold, tgt: &CriticalManifold, shift: Grading) -> [ModuliOperator; 2] {
    let make = |plus: bool| ModuliOperator {
        class: bar_class(src.kind, tgt.kind),
        source: src.id.clone(),
        target: tgt.id.clone(),
        shift,
        entries: (0..3)
            .flat_map(|a| [true, false].map(|s| (cell(a, s).to_string(), cell(a, plus).to_string())))
            .collect(),
    };
    [make(true), make(false)]
}

/// Tower levels whose cells (local degrees 0..=2 above `base(k)`) can meet
/// the window widened by the margin.
fn levels(window: Window, base: impl Fn(i64) -> Grading) -> Vec<i64> {
    let lo = window.lo - MARGIN;
    let hi = window.hi + MARGIN;
    let start = lo.floor() / 4 - 2;
    let end = hi.ceil() / 4 + 2;
    (start..=end).filter(|&k| base(k) + 2 >= lo && base(k) <= hi).collect()
}

fn check_window(w: Window) -> Result<(), ModelError> {
    if w.hi - w.lo < Grading::int(4) {
        return Err(ModelError::WindowTooSmall { lo: w.lo, hi: w.hi });
    }
    Ok(())
}

/// Either a Floer data set or the cobordism fixture.
#[derive(Clone, Debug)]
pub enum Generated {
    Data(Box<FloerData>),
    Cobordism(Box<CobordismFixture>),
}

pub fn generate(spec: &ModelSpec) -> Result<Generated, ModelError> {
    check_window(spec.window)?;
    let w = spec.window;
    let o = spec.options;
    let data = match spec.name {
        ModelName::S3 => s3_like("s3", Grading::ZERO, Some(0), w, o, &[]),
        ModelName::Poincare => s3_like("poincare", Grading::int(-2), Some(-8), w, o, &[]),
        ModelName::HantzscheWendt => s3_like(
            "hantzsche_wendt",
            Grading::ZERO,
            None,
            w,
            o,
            &["absolute shift of the reducible tower not determined; placed at 0"],
        ),
        ModelName::S1xS2 => s1xs2(w, o),
        ModelName::T3 => t3(w, o),
        ModelName::FlatBundle => flat_bundle(w, o),
        ModelName::MinusE8Cobordism => return Ok(Generated::Cobordism(Box::new(minus_e8_cobordism(w)?))),
    };
    Ok(Generated::Data(Box::new(data)))
}

/// Generates a Floer data set, rejecting the cobordism fixture.
pub fn generate_data(spec: &ModelSpec) -> Result<FloerData, ModelError> {
    match generate(spec)? {
        Generated::Data(d) => Ok(*d),
        Generated::Cobordism(_) => Err(ModelError::NotData(spec.name.to_string())),
    }
}

pub fn model(name: ModelName, window: Window) -> Result<FloerData, ModelError> {
    generate_data(&ModelSpec::new(name, window))
}

fn finish(
    mut data: FloerData,
    inv: Involution,
    module: ModuleOps,
    filtration: BTreeMap<String, i64>,
    o: ModelOptions,
) -> FloerData {
    data.involution = o.involution.then_some(inv);
    data.module = if o.module { module } else { ModuleOps::default() };
    data.filtration = o.filtration.then_some(filtration);
    data
}

/// Base grading of level `k` of a single quaternionic tower whose bottom
/// stable sphere sits at `shift`.
fn tower_base(k: i64, shift: Grading) -> Grading {
    // Same-sign neighbours differ by 4; the crossing from the stable level 0
    // down to the unstable level -1 drops by 3.
    if k >= 0 {
        relative_grading_sum(shift, Grading::int(k * reducible_tower_grading(2, 1, 1)))
    } else {
        let first = shift - reducible_tower_grading(2, 1, -1);
        relative_grading_sum(first, Grading::int((k + 1) * reducible_tower_grading(2, 1, 1)))
    }
}

fn sphere_id(tower: &str, k: i64) -> String {
    format!("{tower}[{k}]")
}

/// One tower of spheres. Stable levels sit at `shift + 4k`, unstable ones at
/// `shift + 4k + 1`.
fn s3_like(
    name: &str,
    shift: Grading,
    rokhlin_times8: Option<i64>,
    w: Window,
    o: ModelOptions,
    notes: &[&str],
) -> FloerData {
    let ks = levels(w, |k| tower_base(k, shift));
    let mut data = FloerData {
        metadata: Metadata {
            name: name.to_string(),
            b1: 0,
            rokhlin_times8,
            notes: notes.iter().map(|s| s.to_string()).collect(),
        },
        ..Default::default()
    };
    let mut inv = Involution::default();
    let mut filtration = BTreeMap::new();
    for &k in &ks {
        let kind = kind_at(k);
        let id = sphere_id("t", k);
        data.manifolds
            .push(sphere(id.clone(), kind, tower_base(k, shift), tower("t", k, kind)));
        antipodal(&mut inv, &id);
        filtration.insert(id, k);
    }
    let module = sphere_tower_module(&data, &[("t", &ks)]);
    finish(data, inv, module, filtration, o)
}

/// Cellular `Q` inside each sphere and `V` from each level to the one below.
fn sphere_tower_module(data: &FloerData, towers: &[(&str, &[i64])]) -> ModuleOps {
    let mut q = Vec::new();
    let mut v = Vec::new();
    for (t, ks) in towers {
        for &k in ks.iter() {
            let m = data.manifold(&sphere_id(t, k)).unwrap();
            q.push(ModuliOperator {
                class: bar_class(m.kind, m.kind),
                source: m.id.clone(),
                target: m.id.clone(),
                shift: Grading::int(-1),
                entries: (1..3)
                    .flat_map(|a| [true, false].map(|s| (cell(a, s).to_string(), cell(a - 1, s).to_string())))
                    .collect(),
            });
            if let Some(n) = data.manifold(&sphere_id(t, k - 1)) {
                v.push(cellwise(m, n, n.base_grading - m.base_grading));
            }
        }
    }
    ModuleOps {
        q: Some(CobordismOps {
            degree: Grading::int(-1),
            ops: q,
        }),
        v: Some(CobordismOps {
            degree: Grading::int(-4),
            ops: v,
        }),
    }
}

/// Two towers `B0`, `B1`, with a conjugate pair from `B1[i]` to `B0[i]`.
fn s1xs2(w: Window, o: ModelOptions) -> FloerData {
    let base = |t: i64, k: i64| {
        let stable = Grading::int(4 * k - 1 + t);
        if k >= 0 {
            stable
        } else {
            stable + 1
        }
    };
    let ks: Vec<i64> = levels(w, |k| base(0, k).min(base(1, k)));
    let mut data = FloerData {
        metadata: Metadata {
            name: "s1xs2".into(),
            b1: 1,
            rokhlin_times8: None,
            notes: vec!["towers B0 and B1 correspond to the two generators of the homology of the circle".into()],
        },
        ..Default::default()
    };
    let mut inv = Involution::default();
    let mut filtration = BTreeMap::new();
    for &k in &ks {
        for t in 0..2 {
            let kind = kind_at(k);
            let tname = format!("B{t}");
            let id = sphere_id(&tname, k);
            data.manifolds.push(sphere(id.clone(), kind, base(t, k), tower(&tname, k, kind)));
            antipodal(&mut inv, &id);
            filtration.insert(id, 2 * k + t);
        }
    }
    for &k in &ks {
        let src = data.manifold(&sphere_id("B1", k)).unwrap().clone();
        let tgt = data.manifold(&sphere_id("B0", k)).unwrap().clone();
        data.operators.extend(conjugate_pair(&src, &tgt, Grading::int(-1)));
    }
    let module = sphere_tower_module(&data, &[("B0", &ks), ("B1", &ks)]);
    finish(data, inv, module, filtration, o)
}

/// Critical points of the perfect Morse function on the torus, with their
/// Morse index: x (0), y1..y3 (1), z1..z3 (2), w (3).
fn t3_points() -> Vec<(String, i64)> {
    let mut v = vec![("x".to_string(), 0)];
    v.extend((1..=3).map(|b| (format!("y{b}"), 1)));
    v.extend((1..=3).map(|a| (format!("z{a}"), 2)));
    v.push(("w".to_string(), 3));
    v
}

fn t3(w: Window, o: ModelOptions) -> FloerData {
    let base = |index: i64, i: i64| {
        let g = 4 * i - 3 + index + if index == 0 { 2 } else { 0 };
        Grading::int(if i >= 0 { g } else { g + 1 })
    };
    let ks: Vec<i64> = levels(w, |i| base(1, i));
    let mut data = FloerData {
        metadata: Metadata {
            name: "t3".into(),
            b1: 3,
            rokhlin_times8: None,
            notes: vec![
                "critical points named by Morse index: x index 0, y index 1, z index 2, w index 3".into(),
                "the realized hat group is R{-4} tensored with H1 + H2".into(),
            ],
        },
        ..Default::default()
    };
    let mut inv = Involution::default();
    let mut filtration = BTreeMap::new();
    let points = t3_points();
    for &i in &ks {
        for (p, index) in &points {
            let kind = kind_at(i);
            let id = sphere_id(p, i);
            data.manifolds.push(sphere(id.clone(), kind, base(*index, i), tower(p, i, kind)));
            antipodal(&mut inv, &id);
            filtration.insert(id, 4 * i + index);
        }
    }
    let minus1 = Grading::int(-1);
    for &i in &ks {
        let get = |p: &str| data.manifold(&sphere_id(p, i)).unwrap().clone();
        let (x, w) = (get("x"), get("w"));
        let mut ops = Vec::new();
        for a in 1..=3 {
            let z = get(&format!("z{a}"));
            ops.extend(conjugate_pair(&w, &z, minus1));
            for b in (1..=3).filter(|&b| b != a) {
                ops.extend(conjugate_pair(&z, &get(&format!("y{b}")), minus1));
            }
        }
        for b in 1..=3 {
            let y = get(&format!("y{b}"));
            for s in [true, false] {
                ops.push(ModuliOperator {
                    class: bar_class(y.kind, x.kind),
                    source: y.id.clone(),
                    target: x.id.clone(),
                    shift: minus1,
                    entries: vec![(cell(2, s).to_string(), cell(0, s).to_string())],
                });
            }
        }
        ops.push(cellwise(&w, &x, minus1));
        data.operators.extend(ops);
    }
    finish(data, inv, ModuleOps::default(), filtration, o)
}

/// Per level `i`: spheres `C0[i]` at `4i+2`, `C1[i]` at `4i`, and conjugate
/// point pairs `b{0,1}[2i+1]` at `4i+3`, `b{0,1}[2i]` at `4i+1`.
fn flat_bundle(w: Window, o: ModelOptions) -> FloerData {
    let up = |i: i64| if i >= 0 { 0 } else { 1 };
    let g = |i: i64| Grading::int(4 * i + 2 + up(i));
    let ks: Vec<i64> = levels(w, |i| g(i) - 2);
    let mut data = FloerData {
        metadata: Metadata {
            name: "flat_bundle".into(),
            b1: 1,
            rokhlin_times8: None,
            notes: vec!["two spin maxima C0, C1 and two conjugate pairs of minima b0, b1".into()],
        },
        ..Default::default()
    };
    let mut inv = Involution::default();
    let mut filtration = BTreeMap::new();
    for &i in &ks {
        let kind = kind_at(i);
        let c0 = sphere_id("C0", i);
        let c1 = sphere_id("C1", i);
        data.manifolds.push(sphere(c0.clone(), kind, g(i), tower("C0", i, kind)));
        data.manifolds.push(sphere(c1.clone(), kind, g(i) - 2, tower("C1", i, kind)));
        antipodal(&mut inv, &c0);
        antipodal(&mut inv, &c1);
        filtration.insert(c0.clone(), 4 * i + 3);
        filtration.insert(c1.clone(), 4 * i + 1);
        for (k, at, level, from) in [(2 * i + 1, g(i) + 1, 4 * i + 2, c0), (2 * i, g(i) - 1, 4 * i, c1)] {
            let pair = [sphere_id("b0", k), sphere_id("b1", k)];
            for (s, id) in pair.iter().enumerate() {
                data.manifolds.push(point(id.clone(), kind, at, tower(&format!("b{s}"), k, kind)));
                filtration.insert(id.clone(), level);
                data.operators.push(ModuliOperator {
                    class: bar_class(kind, kind),
                    source: from.clone(),
                    target: id.clone(),
                    shift: Grading::int(-1),
                    entries: vec![(cell(2, s == 0).to_string(), "p".to_string())],
                });
            }
            inv.swap_manifolds(&pair[0], &pair[1]);
        }
    }
    finish(data, inv, ModuleOps::default(), filtration, o)
}

/// A cobordism between two builtin data sets, with topological data.
#[derive(Clone, Debug)]
pub struct CobordismFixture {
    pub name: String,
    pub src: FloerData,
    pub tgt: FloerData,
    pub ops: CobordismOps,
    pub chi: i64,
    pub sigma: i64,
    pub b2: u64,
    pub c1_sq: Grading,
}

impl CobordismFixture {
    /// The degree predicted from the topology of the cobordism.
    pub fn predicted_degree(&self) -> Grading {
        let iota = iota_characteristic(self.chi, self.sigma, self.src.metadata.b1 as u64);
        absolute_grading(0, 0, self.c1_sq, iota.as_integer().expect("integral index"), self.sigma)
    }
}

/// Levelwise map sending level `k` of `src` cellwise to level `k + step` of `tgt`.
fn level_shift_ops(src: &FloerData, tgt: &FloerData, step: i64, degree: Grading) -> Vec<ModuliOperator> {
    let mut ops = Vec::new();
    for m in &src.manifolds {
        let (t, k) = m.id.split_once('[').expect("tower id");
        let k: i64 = k.trim_end_matches(']').parse().expect("level");
        if let Some(n) = tgt.manifold(&sphere_id(t, k + step)) {
            let op = cellwise(m, n, n.base_grading - m.base_grading);
            debug_assert_eq!(op.shift, op.class.expected_shift(degree));
            ops.push(op);
        }
    }
    ops
}

/// The negative definite E8 plumbing with a ball removed, from S³ to the
/// Poincaré sphere.
pub fn minus_e8_cobordism(w: Window) -> Result<CobordismFixture, ModelError> {
    check_window(w)?;
    let src = model(ModelName::S3, w)?;
    let tgt = model(ModelName::Poincare, w)?;
    let mut fx = CobordismFixture {
        name: "minus_e8_cobordism".into(),
        ops: CobordismOps {
            degree: Grading::ZERO,
            ops: Vec::new(),
        },
        src,
        tgt,
        chi: 8,
        sigma: -8,
        b2: 8,
        c1_sq: Grading::ZERO,
    };
    let degree = fx.predicted_degree();
    fx.ops = CobordismOps {
        degree,
        ops: level_shift_ops(&fx.src, &fx.tgt, 1, degree),
    };
    Ok(fx)
}

/// Cellwise identity operators of a data set onto itself.
pub fn identity_cobordism(data: &FloerData) -> CobordismOps {
    CobordismOps {
        degree: Grading::ZERO,
        ops: data
            .manifolds
            .iter()
            .map(|m| {
                let mut op = cellwise(m, m, Grading::ZERO);
                if m.kind == Kind::Irreducible {
                    op.class = OpClass::Oo;
                }
                op
            })
            .collect(),
    }
}

/// Two composable cobordism maps and the declared operators of the composite.
#[derive(Clone, Debug)]
pub struct CompositeFixture {
    pub name: String,
    pub first: CobordismOps,
    pub second: CobordismOps,
    pub composite: CobordismOps,
    /// Data sets: source, middle, target.
    pub src: FloerData,
    pub mid: FloerData,
    pub tgt: FloerData,
}

pub fn composite_fixtures(w: Window) -> Result<Vec<CompositeFixture>, ModelError> {
    let e8 = minus_e8_cobordism(w)?;
    let s3 = e8.src.clone();
    let p = e8.tgt.clone();
    let mut out = vec![
        CompositeFixture {
            name: "id_after_e8".into(),
            first: e8.ops.clone(),
            second: identity_cobordism(&p),
            composite: e8.ops.clone(),
            src: s3.clone(),
            mid: p.clone(),
            tgt: p.clone(),
        },
        CompositeFixture {
            name: "e8_after_id".into(),
            first: identity_cobordism(&s3),
            second: e8.ops.clone(),
            composite: e8.ops.clone(),
            src: s3.clone(),
            mid: s3.clone(),
            tgt: p,
        },
    ];
    let v = s3.module.v.clone().expect("V on S3");
    let q = s3.module.q.clone().expect("Q on S3");
    let v2 = CobordismOps {
        degree: Grading::int(-8),
        ops: level_shift_ops(&s3, &s3, -2, Grading::int(-8)),
    };
    let q2 = CobordismOps {
        degree: Grading::int(-2),
        ops: s3
            .manifolds
            .iter()
            .map(|m| ModuliOperator {
                class: bar_class(m.kind, m.kind),
                source: m.id.clone(),
                target: m.id.clone(),
                shift: Grading::int(-2),
                entries: [true, false]
                    .map(|s| (cell(2, s).to_string(), cell(0, s).to_string()))
                    .to_vec(),
            })
            .collect(),
    };
    for (name, op, sq) in [("v_after_v", v, v2), ("q_after_q", q, q2)] {
        out.push(CompositeFixture {
            name: name.into(),
            first: op.clone(),
            second: op,
            composite: sq,
            src: s3.clone(),
            mid: s3.clone(),
            tgt: s3.clone(),
        });
    }
    Ok(out)
}

/// A data set with one operator entry toggled.
#[derive(Clone, Debug)]
pub struct Corruption {
    pub label: String,
    pub data: FloerData,
}

type OpsField = fn(&mut FloerData) -> Option<&mut Vec<ModuliOperator>>;

/// Every data set obtained by adding or removing a single entry of a
/// differential or module operator, keeping gradings consistent with the
/// operator's declared shift.
pub fn single_entry_corruptions(data: &FloerData) -> Vec<Corruption> {
    let mut out = Vec::new();
    let targets: [(String, OpsField); 3] = [
        ("operators".to_string(), |d| Some(&mut d.operators)),
        ("module.q".to_string(), |d| d.module.q.as_mut().map(|c| &mut c.ops)),
        ("module.v".to_string(), |d| d.module.v.as_mut().map(|c| &mut c.ops)),
    ];
    let mut scratch = data.clone();
    for (what, get) in &targets {
        let Some(ops) = get(&mut scratch).cloned() else {
            continue;
        };
        for (k, op) in ops.iter().enumerate() {
            let (Some(src), Some(tgt)) = (data.manifold(&op.source), data.manifold(&op.target)) else {
                continue;
            };
            for (_, a) in src.cells() {
                for (_, b) in tgt.cells() {
                    let mut bad = data.clone();
                    let entries = &mut get(&mut bad).expect("present")[k].entries;
                    let pair = (a.clone(), b.clone());
                    let verb = match entries.iter().position(|e| *e == pair) {
                        Some(i) => {
                            entries.remove(i);
                            "remove"
                        }
                        None => {
                            entries.push(pair);
                            "add"
                        }
                    };
                    if consistent(&bad) {
                        out.push(Corruption {
                            label: format!("{what}[{k}] {verb} {a} -> {b}"),
                            data: bad,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Structure and every operator's entry gradings check out.
fn consistent(data: &FloerData) -> bool {
    let Ok(asm) = data.assemble() else {
        return false;
    };
    let everywhere = Window::new(i64::from(i32::MIN), i64::from(i32::MAX));
    [&data.module.q, &data.module.v]
        .into_iter()
        .flatten()
        .all(|ops| asm.cobordism(&asm, ops, everywhere).is_ok())
}

/// A random complex: elementary one- and two-term pieces, conjugated by
/// random invertible matrices in each degree. Degrees lie in `0..spread`.
pub fn generate_random_complex(seed: u64, size: usize, spread: i64) -> Result<GradedComplex, ModelError> {
    Ok(random_pieces(seed, size, spread)?.0)
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> (BitMatrix, BitMatrix) {
    loop {
        let mut m = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, rng.gen());
            }
        }
        if let Ok(inv) = m.inverse() {
            return (m, inv);
        }
    }
}

fn random_pieces(seed: u64, size: usize, spread: i64) -> Result<(GradedComplex, ChaCha8Rng), ModelError> {
    if size > RANDOM_SIZE_CAP {
        return Err(ModelError::TooLarge(size));
    }
    let spread = spread.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut space = GradedSpace::new();
    let mut pairs = Vec::new();
    let mut left = size;
    while left > 0 {
        let d = rng.gen_range(0..spread);
        if left >= 2 && d > 0 && rng.gen_bool(0.5) {
            let top = space.push(Grading::int(d), format!("g{}", space.total_dim()));
            let bottom = space.push(Grading::int(d - 1), format!("g{}", space.total_dim()));
            pairs.push((d, top, bottom));
            left -= 2;
        } else {
            space.push(Grading::int(d), format!("g{}", space.total_dim()));
            left -= 1;
        }
    }
    let mut blocks: BTreeMap<i64, BitMatrix> = BTreeMap::new();
    for (d, top, bottom) in pairs {
        let g = Grading::int(d);
        blocks
            .entry(d)
            .or_insert_with(|| BitMatrix::zeros(space.dim(g - 1), space.dim(g)))
            .set(bottom, top, true);
    }
    let mut change = BTreeMap::new();
    for d in space.degrees().collect::<Vec<_>>() {
        change.insert(d, random_invertible(&mut rng, space.dim(d)));
    }
    let mut diff = GradedMap::zero(Grading::int(-1));
    for (d, b) in blocks {
        let g = Grading::int(d);
        let (p_low, _) = &change[&(g - 1)];
        let (_, p_inv) = &change[&g];
        diff.set_block(g, p_low.mul(&b).mul(p_inv));
    }
    let window = Window::new(-1, spread);
    let c = GradedComplex::new(space, diff, window).expect("random blocks");
    Ok((c, rng))
}

/// A random complex with a filtration: each generator sits at least as high
/// as everything in its boundary.
pub fn generate_random_filtered(seed: u64, size: usize, spread: i64) -> Result<FilteredComplex, ModelError> {
    let (c, mut rng) = random_pieces(seed, size, spread)?;
    let mut levels: BTreeMap<Grading, Vec<i64>> = BTreeMap::new();
    for d in c.space.degrees() {
        let below = levels.get(&(d - 1)).cloned().unwrap_or_default();
        let dm = c.d(d);
        let v = (0..c.space.dim(d))
            .map(|j| {
                let floor = dm.column(j).support().iter().map(|&i| below[i]).max().unwrap_or(0);
                floor + rng.gen_range(0..3)
            })
            .collect();
        levels.insert(d, v);
    }
    match FilteredComplex::new(c, levels) {
        Ok(f) => Ok(f),
        Err(ComplexError::FiltrationViolation { .. }) => unreachable!("levels dominate boundaries"),
        Err(e) => panic!("{e}"),
    }
}
