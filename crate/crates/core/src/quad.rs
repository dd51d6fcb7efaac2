//! Adaptive wrapper around tanh-sinh quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use quadrature::double_exponential;

use crate::error::{Error, Result};

const MAX_PIECES: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Piece {
    let out = double_exponential::integrate(f, a, b, tol);
    let err = if out.integral.is_finite() { out.error_estimate } else { f64::INFINITY };
    Piece { a, b, value: out.integral, err }
}

/// ∫_a^b f with absolute error target `tol`; the piece with the largest error estimate
/// is bisected until the total estimate meets the target.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    heap.push(piece(f, a, b, tol));
    loop {
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let value: f64 = heap.iter().map(|p| p.value).sum();
        if value.is_finite() && err <= tol.max(1e-13 * value.abs()) {
            return Ok(value);
        }
        if heap.len() >= MAX_PIECES {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}]: estimate {value} with error {err}"
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::Quadrature(format!("interval collapsed near {m}")));
        }
        let sub = tol / (heap.len() + 2) as f64;
        heap.push(piece(f, worst.a, m, sub));
        heap.push(piece(f, m, worst.b, sub));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_integrals() {
        let v = integrate(&|x: f64| x * x, 0.0, 1.0, 1e-14).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-13);
        let v = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v = integrate(&|x: f64| x.ln().abs(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }
}
