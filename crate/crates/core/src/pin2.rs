//! The conjugation involution: invariant chains, the Gysin sequence, the
//! module structure over `F[[V]][Q]/(Q^3)`, and the invariants alpha, beta, gamma.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::gf2::BitMatrix;
use crate::floer::{Assembly, CobordismOps, FloerData, FloerError, Flavor};
use crate::graded::{
    check_exactness, id_plus_onto_image, image_subcomplex, induced_map, invariant_subcomplex, ses_long_exact_sequence,
    verify_chain_map, ComplexError, DegreeReport, ExactnessReport, GradedComplex, GradedMap, Homology, InducedMap,
    SequenceMap, Status, SubComplex, Window,
};
use crate::grading::Grading;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Pin2Error {
    #[error("data carries no involution")]
    NoInvolution,
    #[error("data carries no {0} operator")]
    NoModuleOp(&'static str),
    #[error("b1 = {0}: not a rational homology sphere")]
    NotQhs(u32),
    #[error("bar homology has dimension {dim} in degree {degree}; not a standard module")]
    NotStandard { degree: Grading, dim: usize },
    #[error("inconclusive window: {0}")]
    Inconclusive(String),
    #[error("relation {relation} fails on the class of degree {degree}")]
    Relation { relation: &'static str, degree: Grading },
    #[error(transparent)]
    Floer(#[from] FloerError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// An involution on manifold ids and cells. Unlisted cells map to the
/// same label on the image manifold; unlisted manifolds are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Involution {
    pub manifold_map: BTreeMap<String, String>,
    pub cell_map: BTreeMap<(String, String), (String, String)>,
}

impl Involution {
    pub fn manifold_image<'a>(&'a self, id: &'a str) -> &'a str {
        self.manifold_map.get(id).map_or(id, String::as_str)
    }

    pub fn cell_image<'a>(&'a self, id: &'a str, cell: &'a str) -> (&'a str, &'a str) {
        match self.cell_map.get(&(id.to_string(), cell.to_string())) {
            Some((m, c)) => (m.as_str(), c.as_str()),
            None => (self.manifold_image(id), cell),
        }
    }

    /// Both maps square to the identity.
    pub fn is_involutive(&self) -> bool {
        self.manifold_map
            .iter()
            .all(|(a, b)| self.manifold_image(b) == a.as_str())
            && self.cell_map.iter().all(|((m, c), (n, d))| self.cell_image(n, d) == (m.as_str(), c.as_str()))
    }

    pub fn swap_cells(&mut self, m: &str, a: &str, n: &str, b: &str) {
        self.cell_map.insert((m.into(), a.into()), (n.into(), b.into()));
        self.cell_map.insert((n.into(), b.into()), (m.into(), a.into()));
    }

    pub fn swap_manifolds(&mut self, a: &str, b: &str) {
        self.manifold_map.insert(a.into(), b.into());
        self.manifold_map.insert(b.into(), a.into());
    }
}

/// A flavor complex with its involution and the two subcomplexes it defines.
#[derive(Clone, Debug)]
pub struct Pin2Complex {
    pub flavor: Flavor,
    pub total: GradedComplex,
    pub j: GradedMap,
    pub invariant: SubComplex,
    pub image: SubComplex,
}

impl Pin2Complex {
    pub fn new(asm: &Assembly<'_>, flavor: Flavor, window: Window) -> Result<Self, Pin2Error> {
        let inv = asm.data.involution.as_ref().ok_or(Pin2Error::NoInvolution)?;
        if !inv.is_involutive() {
            return Err(ComplexError::BadInvolution("does not square to the identity on labels".into()).into());
        }
        let total = asm.complex(flavor, window)?;
        let j = asm.involution(flavor, window)?.ok_or(Pin2Error::NoInvolution)?;
        let invariant = invariant_subcomplex(&total, &j)?;
        let image = image_subcomplex(&total, &j)?;
        Ok(Pin2Complex {
            flavor,
            total,
            j,
            invariant,
            image,
        })
    }

    /// Restricts a ȷ-equivariant map of total complexes to invariant chains.
    pub fn restrict(&self, f: &GradedMap, tgt: &Pin2Complex) -> Result<GradedMap, Pin2Error> {
        Ok(self.invariant.restrict_map(f, &tgt.invariant, &tgt.total.space)?)
    }

    /// Levels of invariant basis vectors: the largest level in their support.
    pub fn invariant_levels(&self, levels: &BTreeMap<Grading, Vec<i64>>) -> BTreeMap<Grading, Vec<i64>> {
        let mut out = BTreeMap::new();
        for d in self.invariant.complex.space.degrees() {
            let incl = self.invariant.inclusion.block(d).expect("inclusion block");
            let lv = &levels[&d];
            let v = (0..incl.cols())
                .map(|c| incl.column(c).support().iter().map(|&i| lv[i]).max().unwrap_or(0))
                .collect();
            out.insert(d, v);
        }
        out
    }

    /// Checks that the inclusion of the image into the invariant chains
    /// induces an isomorphism on interior homology.
    pub fn image_quasi_isomorphism(&self) -> Result<bool, Pin2Error> {
        let id = GradedMap::identity(&self.total.space);
        let incl = self.image.restrict_map(&id, &self.invariant, &self.total.space)?;
        let hi = self.image.complex.homology()?;
        let hv = self.invariant.complex.homology()?;
        let m = induced_map(&incl, &self.image.complex, &hi, &self.invariant.complex, &hv)?;
        for h in hv.degrees() {
            let d = h.degree;
            if !hv.is_reliable(d) {
                continue;
            }
            if hi.dim(d) != h.dim || m.block(d, &hi, &hv).rank() != h.dim {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exactness of the Gysin sequence from `0 -> C^inv -> C -> (1+ȷ)C -> 0`.
pub fn gysin_sequence(data: &FloerData, flavor: Flavor, window: Window) -> Result<ExactnessReport, Pin2Error> {
    if data.manifolds.is_empty() {
        return Ok(ExactnessReport::default());
    }
    let asm = data.assemble()?;
    let pc = Pin2Complex::new(&asm, flavor, window)?;
    let quot = id_plus_onto_image(&pc.total, &pc.j, &pc.image)?;
    let les = ses_long_exact_sequence(
        &pc.invariant.complex,
        &pc.total,
        &pc.image.complex,
        &pc.invariant.inclusion,
        &quot,
    )?;
    Ok(les.check()?)
}

/// Homology of the three flavors with the maps `i`, `j`, `p` between them.
pub struct IjpHomology {
    pub bar: Homology,
    pub check: Homology,
    pub hat: Homology,
    pub i: InducedMap,
    pub j: InducedMap,
    pub p: InducedMap,
}

impl IjpHomology {
    /// Exactness at each of the three groups of the triangle.
    pub fn exactness(&self) -> Result<ExactnessReport, Pin2Error> {
        Ok(check_exactness(&[
            SequenceMap {
                map: &self.i,
                src: &self.bar,
                tgt: &self.check,
            },
            SequenceMap {
                map: &self.j,
                src: &self.check,
                tgt: &self.hat,
            },
            SequenceMap {
                map: &self.p,
                src: &self.hat,
                tgt: &self.bar,
            },
            SequenceMap {
                map: &self.i,
                src: &self.bar,
                tgt: &self.check,
            },
        ])?)
    }
}

/// The pair sequence on total chains, or on invariant chains when `invariant`.
pub fn ijp_homology(data: &FloerData, window: Window, invariant: bool) -> Result<IjpHomology, Pin2Error> {
    let asm = data.assemble()?;
    let maps = asm.ijp(window);
    let (cb, cc, ch, i, j, p) = if invariant {
        let b = Pin2Complex::new(&asm, Flavor::Bar, window)?;
        let c = Pin2Complex::new(&asm, Flavor::Check, window)?;
        let h = Pin2Complex::new(&asm, Flavor::Hat, window)?;
        let i = b.restrict(&maps.i, &c)?;
        let j = c.restrict(&maps.j, &h)?;
        let p = h.restrict(&maps.p, &b)?;
        (b.invariant.complex, c.invariant.complex, h.invariant.complex, i, j, p)
    } else {
        let b = asm.complex(Flavor::Bar, window)?;
        let c = asm.complex(Flavor::Check, window)?;
        let h = asm.complex(Flavor::Hat, window)?;
        (b, c, h, maps.i, maps.j, maps.p)
    };
    let bar = cb.homology()?;
    let check = cc.homology()?;
    let hat = ch.homology()?;
    let i = induced_map(&i, &cb, &bar, &cc, &check)?;
    let j = induced_map(&j, &cc, &check, &ch, &hat)?;
    let p = induced_map(&p, &ch, &hat, &cb, &bar)?;
    Ok(IjpHomology {
        bar,
        check,
        hat,
        i,
        j,
        p,
    })
}

/// A cobordism map on homology, with both homologies.
pub struct CobordismHomology {
    pub src: Homology,
    pub tgt: Homology,
    pub map: InducedMap,
    /// Whether the chain-level map commutes with the differentials.
    pub chain_map: DegreeReport,
}

/// The map induced on one flavor by cobordism operators from `src` to `tgt`.
pub fn cobordism_homology(
    src: &FloerData,
    tgt: &FloerData,
    ops: &CobordismOps,
    flavor: Flavor,
    window: Window,
    invariant: bool,
) -> Result<CobordismHomology, Pin2Error> {
    let a = src.assemble()?;
    let b = tgt.assemble()?;
    let maps = a.cobordism(&b, ops, window)?;
    let f = maps.get(flavor);
    let (cs, ct, f) = if invariant {
        let ps = Pin2Complex::new(&a, flavor, window)?;
        let pt = Pin2Complex::new(&b, flavor, window)?;
        let g = ps.restrict(f, &pt)?;
        (ps.invariant.complex, pt.invariant.complex, g)
    } else {
        (a.complex(flavor, window)?, b.complex(flavor, window)?, f.clone())
    };
    let chain_map = verify_chain_map(&f, &cs, &ct);
    if let Some(d) = chain_map.failures().first() {
        return Err(ComplexError::NotChainMap(*d).into());
    }
    let hs = cs.homology()?;
    let ht = ct.homology()?;
    let map = induced_map(&f, &cs, &hs, &ct, &ht)?;
    Ok(CobordismHomology {
        src: hs,
        tgt: ht,
        map,
        chain_map,
    })
}

/// Homology with the actions of `Q` (degree -1) and `V` (degree -4).
#[derive(Clone, Debug)]
pub struct RModule {
    pub homology: Homology,
    pub q: InducedMap,
    pub v: InducedMap,
}

impl RModule {
    /// `Q^k` applied to the class basis at degree `d`.
    pub fn q_power(&self, k: usize, d: Grading) -> BitMatrix {
        let h = &self.homology;
        let mut m = BitMatrix::identity(h.dim(d));
        let mut deg = d;
        for _ in 0..k {
            m = self.q.block(deg, h, h).mul(&m);
            deg = deg - 1;
        }
        m
    }

    /// Whether `Q^k` out of degree `d` only touches reliable degrees.
    pub fn q_power_reliable(&self, k: usize, d: Grading) -> bool {
        (0..=k as i64).all(|s| self.homology.is_reliable(d - s))
    }
}

/// The module structure on the invariant homology of a flavor.
pub fn induced_module(data: &FloerData, flavor: Flavor, window: Window) -> Result<RModule, Pin2Error> {
    let asm = data.assemble()?;
    let pc = Pin2Complex::new(&asm, flavor, window)?;
    let (q, v) = asm.module_maps(window)?;
    let q = q.ok_or(Pin2Error::NoModuleOp("Q"))?;
    let v = v.ok_or(Pin2Error::NoModuleOp("V"))?;
    module_from_maps(&pc, q.get(flavor), v.get(flavor))
}

fn module_from_maps(pc: &Pin2Complex, q: &GradedMap, v: &GradedMap) -> Result<RModule, Pin2Error> {
    let c = &pc.invariant.complex;
    let h = c.homology()?;
    let q = induced_map(&pc.restrict(q, pc)?, c, &h, c, &h)?;
    let v = induced_map(&pc.restrict(v, pc)?, c, &h, c, &h)?;
    let module = RModule { homology: h, q, v };
    for hd in module.homology.degrees() {
        let d = hd.degree;
        if module.q_power_reliable(3, d) && !module.q_power(3, d).is_zero() {
            return Err(Pin2Error::Relation {
                relation: "Q^3 = 0",
                degree: d,
            });
        }
        let hh = &module.homology;
        let rel = [d, d - 1, d - 4, d - 5].iter().all(|x| hh.is_reliable(*x));
        if rel {
            let qv = module.q.block(d - 4, hh, hh).mul(&module.v.block(d, hh, hh));
            let vq = module.v.block(d - 1, hh, hh).mul(&module.q.block(d, hh, hh));
            if qv != vq {
                return Err(Pin2Error::Relation {
                    relation: "QV = VQ",
                    degree: d,
                });
            }
        }
    }
    Ok(module)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StandardModuleParams {
    pub alpha: Grading,
    pub beta: Grading,
    pub gamma: Grading,
}

impl std::fmt::Display for StandardModuleParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "alpha={} beta={} gamma={}", self.alpha, self.beta, self.gamma)
    }
}

/// Position of a bar class in the standard module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TowerType {
    /// In the image of `Q^2`.
    Q2,
    /// In the image of `Q` but not of `Q^2`.
    Q,
    /// Not in the image of `Q`.
    V,
}

/// One interior bar class with its type and whether `i_*` kills it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarClass {
    pub degree: Grading,
    pub tower: TowerType,
    pub maps_nonzero: bool,
}

/// Types every interior bar class and records its image under `i_*`.
pub fn bar_classes(data: &FloerData, window: Window) -> Result<Vec<BarClass>, Pin2Error> {
    if data.metadata.b1 != 0 {
        return Err(Pin2Error::NotQhs(data.metadata.b1));
    }
    let asm = data.assemble()?;
    let bar = Pin2Complex::new(&asm, Flavor::Bar, window)?;
    let check = Pin2Complex::new(&asm, Flavor::Check, window)?;
    let (q, v) = asm.module_maps(window)?;
    let q = q.ok_or(Pin2Error::NoModuleOp("Q"))?;
    let v = v.ok_or(Pin2Error::NoModuleOp("V"))?;
    let module = module_from_maps(&bar, &q.bar, &v.bar)?;
    let ijp = asm.ijp(window);
    let i_inv = bar.restrict(&ijp.i, &check)?;
    let hto = check.invariant.complex.homology()?;
    let hb = &module.homology;
    let i_star = induced_map(&i_inv, &bar.invariant.complex, hb, &check.invariant.complex, &hto)?;
    let mut out = Vec::new();
    for h in hb.degrees() {
        let d = h.degree;
        if !hb.is_reliable(d) || h.dim == 0 {
            continue;
        }
        if h.dim > 1 {
            return Err(Pin2Error::NotStandard { degree: d, dim: h.dim });
        }
        if !i_star.reliable.contains(&d) {
            continue;
        }
        let in_image = |k: usize| -> Option<bool> {
            let src = d + k as i64;
            if !module.q_power_reliable(k, src) {
                return None;
            }
            Some(!module.q_power(k, src).is_zero())
        };
        let tower = match (in_image(2), in_image(1)) {
            (Some(true), _) => TowerType::Q2,
            (Some(false), Some(true)) => TowerType::Q,
            (Some(false), Some(false)) => TowerType::V,
            _ => continue,
        };
        out.push(BarClass {
            degree: d,
            tower,
            maps_nonzero: i_star.is_nonzero_at(d),
        });
    }
    Ok(out)
}

/// Reads off `(alpha, beta, gamma)` from the image of `i_*` in the invariant
/// check homology. Each tower type must show both killed and surviving
/// classes inside the window, otherwise the minimum is not determined.
pub fn classify_image_i(data: &FloerData, window: Window) -> Result<StandardModuleParams, Pin2Error> {
    let classes = bar_classes(data, window)?;
    let mut mins = BTreeMap::new();
    for t in [TowerType::Q2, TowerType::Q, TowerType::V] {
        let of_type: Vec<&BarClass> = classes.iter().filter(|c| c.tower == t).collect();
        let lowest_hit = of_type.iter().filter(|c| c.maps_nonzero).map(|c| c.degree).min();
        let highest_killed = of_type.iter().filter(|c| !c.maps_nonzero).map(|c| c.degree).max();
        match (lowest_hit, highest_killed) {
            (Some(lo), Some(hi)) if hi < lo => {
                mins.insert(t, lo);
            }
            (Some(_), Some(_)) => {
                return Err(Pin2Error::NotStandard {
                    degree: highest_killed.unwrap(),
                    dim: 1,
                })
            }
            _ => {
                return Err(Pin2Error::Inconclusive(format!(
                    "{t:?}-type classes in the window do not bracket the lowest degree of the image"
                )))
            }
        }
    }
    Ok(StandardModuleParams {
        alpha: mins[&TowerType::Q2].half(),
        beta: (mins[&TowerType::Q] - 1).half(),
        gamma: (mins[&TowerType::V] - 2).half(),
    })
}

#[derive(Clone, Debug)]
pub struct InvariantCase {
    pub name: String,
    pub params: StandardModuleParams,
    pub dual: Option<StandardModuleParams>,
    pub rokhlin_times8: Option<i64>,
}

#[derive(Clone, Debug, Default)]
pub struct PropertyReport {
    pub checks: Vec<(String, Status)>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, s)| *s != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, s)| *s == Status::Fail)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

/// `x + mu` is an even integer, with `mu = rokhlin_times8 / 8`.
fn rokhlin_congruent(x: Grading, rokhlin_times8: i64) -> bool {
    let s = x + Grading::new(rokhlin_times8, 8);
    s.as_integer().is_some_and(|n| n.rem_euclid(2) == 0)
}

/// Ordering, orientation reversal and the Rokhlin congruence.
pub fn check_invariant_properties(cases: &[InvariantCase]) -> PropertyReport {
    let mut r = PropertyReport::default();
    let status = |ok: bool| if ok { Status::Pass } else { Status::Fail };
    for c in cases {
        let p = c.params;
        r.checks
            .push((format!("{}: ordering", c.name), status(p.alpha >= p.beta && p.beta >= p.gamma)));
        if let Some(d) = c.dual {
            let ok = d.alpha == -p.gamma && d.beta == -p.beta && d.gamma == -p.alpha;
            r.checks.push((format!("{}: orientation reversal", c.name), status(ok)));
        }
        if let Some(r8) = c.rokhlin_times8 {
            let ok = [p.alpha, p.beta, p.gamma].iter().all(|x| rokhlin_congruent(*x, r8));
            r.checks.push((format!("{}: rokhlin", c.name), status(ok)));
        }
    }
    r
}

/// Degrees of the invariant homology of a flavor, for reporting.
pub fn invariant_homology(data: &FloerData, flavor: Flavor, window: Window) -> Result<Homology, Pin2Error> {
    let asm = data.assemble()?;
    if data.manifolds.is_empty() {
        return Ok(Homology::empty(window));
    }
    let pc = Pin2Complex::new(&asm, flavor, window)?;
    Ok(pc.invariant.complex.homology()?)
}

/// Degrees where a set of classes is nonzero, a helper for table checks.
pub fn nonzero_degrees(h: &Homology) -> BTreeSet<Grading> {
    h.interior_dims().into_keys().collect()
}
