//! Fixtures shared by the benchmarks.

use pinfloer::{model, BitMatrix, FloerData, ModelName, Window};

/// Deterministic dense-ish matrix from a xorshift stream.
pub fn matrix(rows: usize, cols: usize, seed: u64) -> BitMatrix {
    let mut s = seed | 1;
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            if s & 1 == 1 {
                m.set(r, c, true);
            }
        }
    }
    m
}

pub fn fixture(name: ModelName, half_width: i64) -> (FloerData, Window) {
    let w = Window::new(-half_width, half_width);
    (model(name, w).expect("builtin model"), w)
}
