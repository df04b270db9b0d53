//! Shared inputs for the criterion benchmarks.

use std::f64::consts::TAU;

/// `n` evenly spaced phases over one period, closing point included.
pub fn phase_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect(),
    }
}
