//! Seeded samplers for states, unitaries and channels.
//!
//! Every randomized suite draws from [`rng`] so a single `u64` seed reproduces
//! a run exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{DensityOperator, KrausChannel};
use crate::matcore::{self, CMatrix};

pub type QbRng = ChaCha8Rng;

/// Weight of `𝟙/d` mixed into "full-rank" samples, keeping the smallest
/// eigenvalue at least `FULL_RANK_FLOOR / d`.
pub const FULL_RANK_FLOOR: f64 = 0.05;

pub fn rng(seed: u64) -> QbRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for case `index` of a suite.
pub fn case_rng(seed: u64, index: u64) -> QbRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-random unitary (QR of a Ginibre matrix with phases fixed).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    isometry(rng, d, d)
}

/// Haar-random isometry with `rows ≥ cols`.
fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let qr = ginibre(rng, rows, cols).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..cols {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..rows {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Hilbert–Schmidt random density operator.
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = ginibre(rng, d, d);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityOperator::new(w.unscale(tr), matcore::CHECK_TOL).expect("Ginibre samples are states")
}

/// Density operator with smallest eigenvalue bounded below by `FULL_RANK_FLOOR / d`.
pub fn full_rank_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    density(rng, d).mixed_with_identity(FULL_RANK_FLOOR)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let v = ginibre(rng, d, 1);
    DensityOperator::pure(v.as_slice()).expect("nonzero sample")
}

/// Random channel with `n_kraus` operators drawn from a Haar isometry.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, d: usize, n_kraus: usize) -> KrausChannel {
    let v = isometry(rng, d * n_kraus, d);
    let kraus = (0..n_kraus)
        .map(|l| v.rows(l * d, d).into_owned())
        .collect();
    KrausChannel::new(kraus, 1e-10).expect("isometry blocks are trace preserving")
}

/// Random stochastic matrix with `n` outcomes, columns summing to one.
pub fn stochastic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> matcore::RMatrix {
    let mut m = matcore::RMatrix::from_fn(n, n, |_, _| rng.gen_range(0.05..1.0));
    for mut col in m.column_iter_mut() {
        let s = col.sum();
        col /= s;
    }
    m
}

/// Random probability vector with entries bounded away from zero.
pub fn probability<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}
