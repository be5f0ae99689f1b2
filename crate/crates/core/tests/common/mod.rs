#![allow(dead_code)]

use std::collections::BTreeMap;

use pinfloer::Grading;

/// Submodules and quotients of `F[V^-1, V]][Q]/(Q^3)`, generated by `1` in
/// degree `top`. Elements are `Q^j V^k` in degree `top - j - 4k`.
#[derive(Clone, Copy, Debug)]
pub enum Piece {
    /// The whole Laurent module.
    Laurent,
    /// `Q` times the Laurent module.
    QLaurent,
    /// Laurent module modulo the span of `1`.
    LaurentModOne,
    /// `Q` times the Laurent module, modulo the span of `Q`.
    QLaurentModQ,
    /// `F[[V]][Q]/(Q^3)`.
    Ring,
    /// `Q` times the ring.
    QRing,
}

impl Piece {
    pub fn dim(self, top: i64, d: i64) -> usize {
        let off = top - d;
        let j = off.rem_euclid(4);
        if j == 3 {
            return 0;
        }
        let k = (off - j) / 4;
        let ok = match self {
            Piece::Laurent => true,
            Piece::QLaurent => j >= 1,
            Piece::LaurentModOne => d > top,
            Piece::QLaurentModQ => j >= 1 && d > top - 1,
            Piece::Ring => k >= 0,
            Piece::QRing => k >= 0 && j >= 1,
        };
        usize::from(ok)
    }
}

/// Sum of pieces tensored with graded vector spaces: `(piece, top, mult)`.
pub fn expected(parts: &[(Piece, i64, usize)], d: i64) -> usize {
    parts.iter().map(|&(p, top, m)| m * p.dim(top, d)).sum()
}

/// Compares interior homology against the oracle at every interior degree.
pub fn compare(
    label: &str,
    got: &BTreeMap<Grading, usize>,
    interior: impl Iterator<Item = i64>,
    parts: &[(Piece, i64, usize)],
) -> Result<(), String> {
    for d in interior {
        let have = got.get(&Grading::int(d)).copied().unwrap_or(0);
        let want = expected(parts, d);
        if have != want {
            return Err(format!("{label}: degree {d} has dim {have}, expected {want}"));
        }
    }
    Ok(())
}

/// Homology dimensions by enumerating every kernel and image vector.
pub fn brute_force_homology(c: &pinfloer::GradedComplex) -> BTreeMap<Grading, usize> {
    use std::collections::BTreeSet;
    let vec_of = |bits: u64, n: usize| pinfloer::BitVec::from_bools(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
    let mut out = BTreeMap::new();
    for d in c.space.degrees() {
        let n = c.space.dim(d);
        let down = c.d(d);
        let kernel = (0u64..1 << n).filter(|&b| down.mul_vec(&vec_of(b, n)).is_zero()).count();
        let up = c.d(d + 1);
        let m = up.cols();
        let image: BTreeSet<Vec<usize>> = (0u64..1 << m).map(|b| up.mul_vec(&vec_of(b, m)).support()).collect();
        let dim = kernel.trailing_zeros() - image.len().trailing_zeros();
        out.insert(d, dim as usize);
    }
    out
}
