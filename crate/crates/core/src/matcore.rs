//! Dense matrix arithmetic and matrix functions.
//!
//! Hilbert-space operators are stored as [`CMatrix`] and quasiprobability
//! objects as [`RMatrix`]. Sizes are small (d ≤ 8, so d² ≤ 64), which keeps
//! every routine here a straightforward O(n³) dense algorithm.
//!
//! Two eigen-routes are provided and deliberately kept separate:
//!
//! * [`hermitian_eig`] and the PSD functions built on it ([`psd_sqrt`],
//!   [`psd_power`]) act on Hermitian operators;
//! * [`principal_power`] acts on general real matrices with a real,
//!   nonnegative spectrum through a complex Schur form and a triangular
//!   matrix function, so it never assumes diagonalizability.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Hermiticity / PSD / normalization checks.
pub const CHECK_TOL: f64 = 1e-10;
/// Agreement between a QPR computation and its Hilbert-space oracle.
pub const ORACLE_TOL: f64 = 1e-8;
/// Eigenvalues below this fraction of the largest one count as zero.
pub const RANK_THRESHOLD: f64 = 1e-12;

/// Largest supported Hilbert dimension.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub check: f64,
    pub oracle: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            check: CHECK_TOL,
            oracle: ORACLE_TOL,
            rank: RANK_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix is singular (smallest eigenvalue {eigenvalue:e})")]
    Singular { eigenvalue: f64 },
    #[error("spectrum is not real and nonnegative (eigenvalue {re:e}{im:+e}i)")]
    SpectrumNotNonnegative { re: f64, im: f64 },
    #[error("negative power of a singular matrix (smallest eigenvalue {eigenvalue:e})")]
    SingularForNegativePower { eigenvalue: f64 },
    #[error("zero eigenvalue is defective (nilpotent part {norm:e}); no principal power")]
    DefectiveZeroEigenvalue { norm: f64 },
    #[error("discarded imaginary residue {residue:e} exceeds tolerance")]
    ComplexResidue { residue: f64 },
    #[error("non-finite entry produced")]
    NonFinite,
}

pub type Result<T, E = MatError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    HermitianEigen,
    GeneralSchur,
}

/// Eigenvalues plus the factors that reassemble the decomposed matrix.
///
/// For [`SpectrumMethod::HermitianEigen`] `vectors` is the unitary
/// eigenvector matrix and `triangular` is `None`; for
/// [`SpectrumMethod::GeneralSchur`] `vectors` is the unitary Schur basis and
/// `triangular` the upper-triangular factor.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: CMatrix,
    pub triangular: Option<CMatrix>,
    pub method: SpectrumMethod,
}

impl Spectrum {
    pub fn reassemble(&self) -> CMatrix {
        match &self.triangular {
            Some(t) => &self.vectors * t * self.vectors.adjoint(),
            None => {
                let diag =
                    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
                &self.vectors * diag * self.vectors.adjoint()
            }
        }
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_imag(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_diff");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn max_diff_real(a: &RMatrix, b: &RMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_diff_real");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Entrywise comparison; matrices of different shape are never equal.
pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_diff(a, b) <= tol
}

pub fn approx_eq_real(a: &RMatrix, b: &RMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_diff_real(a, b) <= tol
}

pub fn is_finite(m: &RMatrix) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// Tr[AB] without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

fn ensure_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(MatError::NotSquare { rows, cols });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(h: &CMatrix, tol: f64) -> Result<Spectrum> {
    ensure_square(h.nrows(), h.ncols())?;
    let deviation = hermiticity_defect(h);
    if deviation > tol {
        return Err(MatError::NotHermitian { deviation });
    }
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(hermitian_part(h), f64::EPSILON, 1000 * n.max(1))
        .ok_or(MatError::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    let spectrum = Spectrum {
        eigenvalues: order.iter().map(|&i| c(eig.eigenvalues[i], 0.0)).collect(),
        vectors,
        triangular: None,
        method: SpectrumMethod::HermitianEigen,
    };

    let residual = max_diff(&spectrum.reassemble(), h);
    if residual > 10.0 * tol * max_abs(h).max(1.0) {
        return Err(MatError::NoConvergence);
    }
    Ok(spectrum)
}

/// Complex Schur decomposition `A = Q T Q†`.
pub fn schur(a: &CMatrix) -> Result<Spectrum> {
    ensure_square(a.nrows(), a.ncols())?;
    let n = a.nrows();
    let (q, mut t) = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(MatError::NoConvergence)?
        .unpack();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(Spectrum {
        eigenvalues: (0..n).map(|i| t[(i, i)]).collect(),
        vectors: q,
        triangular: Some(t),
        method: SpectrumMethod::GeneralSchur,
    })
}

/// Real power of a Hermitian positive-semidefinite operator.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero. Negative powers require
/// every eigenvalue to exceed `RANK_THRESHOLD` times the largest one.
pub fn psd_power(h: &CMatrix, r: f64, tol: f64) -> Result<CMatrix> {
    psd_power_with(h, r, tol, SingularPolicy::Error)
}

/// [`psd_power`] with an explicit policy for the kernel under negative powers.
pub fn psd_power_with(h: &CMatrix, r: f64, tol: f64, policy: SingularPolicy) -> Result<CMatrix> {
    let spec = hermitian_eig(h, tol)?;
    let n = h.nrows();
    let lambda: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
    if let Some(&min) = lambda.first() {
        if min < -tol {
            return Err(MatError::NotPsd { eigenvalue: min });
        }
    }
    let largest = lambda.last().copied().unwrap_or(0.0).max(0.0);
    let cut = RANK_THRESHOLD * largest;
    let mut scaled = spec.vectors.clone();
    for (j, &l) in lambda.iter().enumerate() {
        let l = l.max(0.0);
        let f = if r == 0.0 {
            1.0
        } else if l <= cut {
            if r < 0.0 && policy == SingularPolicy::Error {
                return Err(MatError::Singular { eigenvalue: l });
            }
            0.0
        } else {
            l.powf(r)
        };
        for i in 0..n {
            scaled[(i, j)] *= f;
        }
    }
    let out = scaled * spec.vectors.adjoint();
    Ok(hermitian_part(&out))
}

pub fn psd_sqrt(h: &CMatrix, tol: f64) -> Result<CMatrix> {
    psd_power(h, 0.5, tol)
}

pub fn psd_inv_sqrt(h: &CMatrix, tol: f64) -> Result<CMatrix> {
    psd_power(h, -0.5, tol)
}

/// What to do with the zero part of the spectrum under a negative power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularPolicy {
    Error,
    /// Map the zero eigenspace to zero (a pseudo-inverse power on the support).
    PseudoInverse,
}

/// Principal real power of a real matrix whose spectrum is real and
/// nonnegative.
pub fn principal_power(m: &RMatrix, r: f64, tol: f64) -> Result<RMatrix> {
    principal_power_with(m, r, tol, SingularPolicy::Error)
}

pub fn principal_power_with(
    m: &RMatrix,
    r: f64,
    tol: f64,
    policy: SingularPolicy,
) -> Result<RMatrix> {
    ensure_square(m.nrows(), m.ncols())?;
    let n = m.nrows();
    if !is_finite(m) {
        return Err(MatError::NonFinite);
    }
    if n == 0 || r == 0.0 {
        return Ok(RMatrix::identity(n, n));
    }

    let spec = schur(&to_complex(m))?;
    let mut q = spec.vectors;
    let mut t = spec
        .triangular
        .expect("schur always yields a triangular factor");

    let scale = spec
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()));
    let slack = tol * scale.max(1.0);
    for z in &spec.eigenvalues {
        if z.im.abs() > slack || z.re < -slack {
            return Err(MatError::SpectrumNotNonnegative { re: z.re, im: z.im });
        }
    }
    let zero_cut = RANK_THRESHOLD * scale;
    let is_zero = |z: Complex64| z.re < zero_cut.max(f64::MIN_POSITIVE);

    // Bubble the zero cluster to the bottom-right of the Schur form.
    let mut sorted = false;
    while !sorted {
        sorted = true;
        for k in 0..n.saturating_sub(1) {
            if is_zero(t[(k, k)]) && !is_zero(t[(k + 1, k + 1)]) {
                swap_schur_pair(&mut t, &mut q, k);
                sorted = false;
            }
        }
    }
    let k = (0..n).take_while(|&i| !is_zero(t[(i, i)])).count();
    let zeros = n - k;

    if zeros > 0 {
        if r < 0.0 && policy == SingularPolicy::Error {
            let eigenvalue = (k..n).map(|i| t[(i, i)].re).fold(f64::INFINITY, f64::min);
            return Err(MatError::SingularForNegativePower { eigenvalue });
        }
        let t22 = t.view((k, k), (zeros, zeros));
        let norm = t22.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if norm > slack {
            return Err(MatError::DefectiveZeroEigenvalue { norm });
        }
    }

    let mut f = CMatrix::zeros(n, n);
    if k > 0 {
        let t11 = t.view((0, 0), (k, k)).into_owned();
        let f11 = triangular_power(&t11, r)?;
        if zeros > 0 {
            let t12 = t.view((0, k), (k, zeros)).into_owned();
            let t22 = t.view((k, k), (zeros, zeros)).into_owned();
            let rhs = &f11 * &t12;
            let f12 = triangular_sylvester(&t11, &t22, &rhs);
            f.view_mut((0, k), (k, zeros)).copy_from(&f12);
        }
        f.view_mut((0, 0), (k, k)).copy_from(&f11);
    }

    let out = &q * f * q.adjoint();
    let residue = max_imag(&out);
    if residue > slack {
        return Err(MatError::ComplexResidue { residue });
    }
    let real = out.map(|z| z.re);
    if !is_finite(&real) {
        return Err(MatError::NonFinite);
    }
    Ok(real)
}

/// Swap diagonal entries k and k+1 of an upper-triangular Schur factor,
/// updating the unitary basis so that `Q T Q†` is unchanged.
fn swap_schur_pair(t: &mut CMatrix, q: &mut CMatrix, k: usize) {
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let x0 = t[(k, k + 1)];
    let x1 = b - a;
    let norm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    if norm == 0.0 {
        return;
    }
    let (g0, g1) = (x0 / norm, x1 / norm);
    let n = t.nrows();
    for col in 0..n {
        let (u, v) = (t[(k, col)], t[(k + 1, col)]);
        t[(k, col)] = g0.conj() * u + g1.conj() * v;
        t[(k + 1, col)] = -g1 * u + g0 * v;
    }
    for row in 0..n {
        let (u, v) = (t[(row, k)], t[(row, k + 1)]);
        t[(row, k)] = u * g0 + v * g1;
        t[(row, k + 1)] = -u * g1.conj() + v * g0.conj();
    }
    for row in 0..q.nrows() {
        let (u, v) = (q[(row, k)], q[(row, k + 1)]);
        q[(row, k)] = u * g0 + v * g1;
        q[(row, k + 1)] = -u * g1.conj() + v * g0.conj();
    }
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
}

/// Power of an upper-triangular matrix whose eigenvalues lie in the open
/// right half-plane. Repeated eigenvalues are fine.
fn triangular_power(t: &CMatrix, r: f64) -> Result<CMatrix> {
    let twice = 2.0 * r;
    if (r - r.round()).abs() < 1e-15 {
        return Ok(triangular_int_power(t, r.round() as i64));
    }
    if (twice - twice.round()).abs() < 1e-15 {
        let root = triangular_sqrt(t);
        return Ok(triangular_int_power(&root, twice.round() as i64));
    }
    let log = triangular_log(t)?;
    Ok(matrix_exp(&log.scale(r)))
}

fn triangular_int_power(t: &CMatrix, p: i64) -> CMatrix {
    let base = if p < 0 {
        triangular_inverse(t)
    } else {
        t.clone()
    };
    let n = t.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut sq = base;
    let mut e = p.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    result
}

/// Björck–Hammarling recurrence for the principal square root.
fn triangular_sqrt(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let mut r = CMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

fn triangular_inverse(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let mut x = CMatrix::zeros(n, n);
    for j in 0..n {
        x[(j, j)] = t[(j, j)].inv();
        for i in (0..j).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in i + 1..=j {
                s += t[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -s / t[(i, i)];
        }
    }
    x
}

/// Principal logarithm by inverse scaling and squaring.
fn triangular_log(t: &CMatrix) -> Result<CMatrix> {
    let n = t.nrows();
    let id = CMatrix::identity(n, n);
    let mut a = t.clone();
    let mut halvings = 0;
    while (&a - &id).norm() > 0.2 {
        a = triangular_sqrt(&a);
        halvings += 1;
        if halvings > 100 {
            return Err(MatError::NoConvergence);
        }
    }
    let x = &a - &id;
    let mut sum = CMatrix::zeros(n, n);
    let mut term = x.clone();
    for m in 1..400 {
        let contribution = term.scale(1.0 / m as f64);
        let size = contribution.norm();
        if m % 2 == 1 {
            sum += contribution;
        } else {
            sum -= contribution;
        }
        if size < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
        term = &term * &x;
    }
    Ok(sum.scale(2f64.powi(halvings)))
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn matrix_exp(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(0.5f64.powi(squarings));
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for m in 1..60 {
        term = (&term * &b).scale(1.0 / m as f64);
        sum += &term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Solves `A X - X B = C` for upper-triangular A and B with disjoint spectra.
fn triangular_sylvester(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> CMatrix {
    let (k, m) = c.shape();
    let mut x = CMatrix::zeros(k, m);
    for j in 0..m {
        let mut rhs: Vec<Complex64> = (0..k).map(|i| c[(i, j)]).collect();
        for l in 0..j {
            for (i, v) in rhs.iter_mut().enumerate() {
                *v += x[(i, l)] * b[(l, j)];
            }
        }
        for i in (0..k).rev() {
            let mut s = rhs[i];
            for p in i + 1..k {
                s -= a[(i, p)] * x[(p, j)];
            }
            x[(i, j)] = s / (a[(i, i)] - b[(j, j)]);
        }
    }
    x
}

/// Partial trace over the second factor; composite index is `a * dim_b + b`.
pub fn partial_trace_b(w: &CMatrix, dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    ensure_square(w.nrows(), w.ncols())?;
    if w.nrows() != dim_a * dim_b {
        return Err(MatError::DimensionMismatch {
            expected: dim_a * dim_b,
            found: w.nrows(),
        });
    }
    let mut out = CMatrix::zeros(dim_a, dim_a);
    for a in 0..dim_a {
        for ap in 0..dim_a {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..dim_b {
                acc += w[(a * dim_b + b, ap * dim_b + b)];
            }
            out[(a, ap)] = acc;
        }
    }
    Ok(out)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
