mod common;

use common::brute_force_homology;
use pinfloer::models::{generate_random_complex, generate_random_filtered, single_entry_corruptions};
use pinfloer::{model, BitMatrix, BitVec, GradedComplex, GradedMap, GradedSpace, Grading, ModelName, Window};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, bits: &[bool]) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, bits[r * cols + c]);
        }
    }
    m
}

fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| matrix(r, c, &bits))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn random_complex_matches_enumeration(seed in any::<u64>(), size in 0usize..=12, spread in 1i64..=5) {
        let c = generate_random_complex(seed, size, spread).unwrap();
        prop_assert!(c.verify_square_zero().passed());
        let h = c.homology().unwrap();
        for (d, n) in brute_force_homology(&c) {
            prop_assert!(h.is_reliable(d));
            prop_assert_eq!(h.dim(d), n, "degree {}", d);
        }
    }

    #[test]
    fn two_term_complex_matches_enumeration(m in arb_matrix(6)) {
        // Any matrix is a differential from degree 1 to degree 0.
        let space = GradedSpace::from_dims(&[(Grading::ZERO, m.rows()), (Grading::int(1), m.cols())]);
        let mut diff = GradedMap::zero(Grading::int(-1));
        diff.set_block(Grading::int(1), m);
        let c = GradedComplex::new(space, diff, Window::new(-1, 2)).unwrap();
        let h = c.homology().unwrap();
        for (d, n) in brute_force_homology(&c) {
            prop_assert_eq!(h.dim(d), n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rank_nullity_and_transpose(m in arb_matrix(64)) {
        let rank = m.rank();
        let kernel = m.kernel_basis();
        prop_assert_eq!(rank + kernel.len(), m.cols());
        prop_assert_eq!(m.transpose().rank(), rank);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        prop_assert_eq!(m.rref().1.len(), rank);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_matches_image_count(m in arb_matrix(8)) {
        let n = m.cols();
        let mut image = std::collections::BTreeSet::new();
        for b in 0u32..1 << n {
            let v = BitVec::from_bools(&(0..n).map(|i| b >> i & 1 == 1).collect::<Vec<_>>());
            image.insert(m.mul_vec(&v).support());
        }
        prop_assert_eq!(1usize << m.rank(), image.len());
    }

    #[test]
    fn spectral_sequence_abuts_to_homology(seed in any::<u64>(), size in 1usize..=16, spread in 1i64..=5) {
        let f = generate_random_filtered(seed, size, spread).unwrap();
        let ss = f.spectral_sequence(64);
        prop_assert!(ss.complete);
        let h = f.complex.homology().unwrap();
        let last = ss.last().unwrap();
        for d in f.complex.space.degrees() {
            prop_assert_eq!(last.total_dim(d), h.dim(d), "degree {}", d);
        }
        // E_1 is the homology of the associated graded, so it is at least H.
        for d in f.complex.space.degrees() {
            prop_assert!(ss.pages[1].total_dim(d) >= h.dim(d));
        }
    }
}

#[test]
fn validate_rejects_every_single_entry_corruption() {
    let w = Window::new(-4, 4);
    for name in ModelName::data_models() {
        let data = model(name, w).unwrap();
        assert!(data.validate(w).passed(), "{name}");
        let corruptions = single_entry_corruptions(&data);
        assert!(!corruptions.is_empty(), "{name}");
        for c in corruptions {
            assert!(!c.data.validate(w).passed(), "{name}: {} accepted", c.label);
        }
    }
}
