//! Hilbert-space side: states, POVMs, channels, adjoints and the Petz map.
//!
//! Everything here is the oracle against which the quasiprobability
//! computations are checked. Composite systems use the ordering
//! `|a⟩ ⊗ |b⟩ ↦ a * d_b + b` (ancilla fastest).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use thiserror::Error;

use crate::matcore::{
    self, c, hermiticity_defect, kron, max_abs, partial_trace_b, psd_power, psd_power_with,
    CMatrix, MatError, SingularPolicy, MAX_DIM, RANK_THRESHOLD,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("Kraus operators are not trace preserving (deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },
    #[error("dilation unitary is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("bad ancilla: {0}")]
    BadAncilla(String),
    #[error("POVM is invalid: {0}")]
    BadPovm(String),
    #[error("posterior is rank-deficient and no regularization was allowed")]
    SingularPosterior,
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Mat(#[from] MatError),
}

pub type Result<T, E = HilbertError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates hermiticity, unit trace and positivity within `tol`.
    pub fn new(matrix: CMatrix, tol: f64) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || d != matrix.ncols() || d > MAX_DIM {
            return Err(HilbertError::NotDensity(format!(
                "shape {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(HilbertError::NotDensity("non-finite entry".into()));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > tol {
            return Err(HilbertError::NotDensity(format!(
                "not Hermitian ({herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > tol {
            return Err(HilbertError::NotDensity(format!("trace {tr}")));
        }
        let spec = matcore::hermitian_eig(&matrix, tol)?;
        let min = spec.eigenvalues[0].re;
        if min < -tol {
            return Err(HilbertError::NotDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityOperator {
            matrix: matcore::hermitian_part(&matrix),
        })
    }

    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(ket);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(HilbertError::NotDensity("zero vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(&v * v.adjoint(), matcore::CHECK_TOL)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn d(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `(1-ε)ρ + ε𝟙/d`
    pub fn mixed_with_identity(&self, eps: f64) -> Self {
        let d = self.d();
        let id = CMatrix::identity(d, d).unscale(d as f64);
        DensityOperator {
            matrix: self.matrix.scale(1.0 - eps) + id.scale(eps),
        }
    }
}

/// Computational-basis and ± pure qubit states.
pub fn ket0() -> DensityOperator {
    DensityOperator::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
}

pub fn ket1() -> DensityOperator {
    DensityOperator::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
}

pub fn ket_plus() -> DensityOperator {
    DensityOperator::pure(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
}

pub fn ket_minus() -> DensityOperator {
    DensityOperator::pure(&[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]).unwrap()
}

/// Angles of the mixed qubit `sin²ω |ψ⟩⟨ψ| + cos²ω |ψ⊥⟩⟨ψ⊥|` with
/// `|ψ⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and
/// `|ψ⊥⟩ = -e^{-iφ} sin(θ/2)|0⟩ + cos(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitStateParams {
    pub omega: f64,
    pub theta: f64,
    pub phi: f64,
}

impl QubitStateParams {
    pub fn new(omega: f64, theta: f64, phi: f64) -> Self {
        QubitStateParams { omega, theta, phi }
    }
}

pub fn qubit_state(p: QubitStateParams) -> DensityOperator {
    let (ct, st) = ((p.theta / 2.0).cos(), (p.theta / 2.0).sin());
    let phase = Complex64::from_polar(1.0, p.phi);
    let psi = nalgebra::DVector::from_vec(vec![c(ct, 0.0), phase * st]);
    let perp = nalgebra::DVector::from_vec(vec![-phase.conj() * st, c(ct, 0.0)]);
    let w = p.omega.sin().powi(2);
    let m = (&psi * psi.adjoint()).scale(w) + (&perp * perp.adjoint()).scale(1.0 - w);
    DensityOperator {
        matrix: matcore::hermitian_part(&m),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    pub effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let d = effects
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| HilbertError::BadPovm("no effects".into()))?;
        let mut sum = CMatrix::zeros(d, d);
        for e in &effects {
            if e.shape() != (d, d) {
                return Err(HilbertError::BadPovm("effects differ in shape".into()));
            }
            let spec = matcore::hermitian_eig(e, tol)?;
            if spec.eigenvalues[0].re < -tol {
                return Err(HilbertError::BadPovm("effect is not positive".into()));
            }
            sum += e;
        }
        let deviation = max_abs(&(sum - CMatrix::identity(d, d)));
        if deviation > tol {
            return Err(HilbertError::BadPovm(format!(
                "effects sum to identity only within {deviation:e}"
            )));
        }
        Ok(Povm { effects })
    }

    pub fn computational(d: usize) -> Self {
        let effects = (0..d)
            .map(|k| {
                let mut m = CMatrix::zeros(d, d);
                m[(k, k)] = c(1.0, 0.0);
                m
            })
            .collect();
        Povm { effects }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    d: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let d = kraus.first().map(|k| k.nrows()).unwrap_or(0);
        if d == 0 || d > MAX_DIM {
            return Err(HilbertError::DimensionMismatch {
                expected: 2,
                found: d,
            });
        }
        let mut completeness = CMatrix::zeros(d, d);
        for k in &kraus {
            if k.shape() != (d, d) {
                return Err(HilbertError::DimensionMismatch {
                    expected: d,
                    found: k.nrows().max(k.ncols()),
                });
            }
            completeness += k.adjoint() * k;
        }
        let deviation = max_abs(&(completeness - CMatrix::identity(d, d)));
        if deviation.is_nan() || deviation > tol {
            return Err(HilbertError::NotTracePreserving { deviation });
        }
        Ok(KrausChannel { d, kraus })
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel {
            d,
            kraus: vec![CMatrix::identity(d, d)],
        }
    }

    pub fn unitary(u: &CMatrix, tol: f64) -> Result<Self> {
        check_unitary(u, tol)?;
        Self::new(vec![u.clone()], tol)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    fn check_dim(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.d || m.ncols() != self.d {
            return Err(HilbertError::DimensionMismatch {
                expected: self.d,
                found: m.nrows(),
            });
        }
        Ok(())
    }

    /// `Σ κ X κ†` on an arbitrary operator.
    pub fn apply_op(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_dim(x)?;
        Ok(self
            .kraus
            .iter()
            .fold(CMatrix::zeros(self.d, self.d), |acc, k| {
                acc + k * x * k.adjoint()
            }))
    }

    /// `Σ κ† X κ`
    pub fn adjoint_op(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_dim(x)?;
        Ok(self
            .kraus
            .iter()
            .fold(CMatrix::zeros(self.d, self.d), |acc, k| {
                acc + k.adjoint() * x * k
            }))
    }

    /// Unitality defect `max |E[𝟙] - 𝟙|`.
    pub fn unitality_defect(&self) -> f64 {
        let id = CMatrix::identity(self.d, self.d);
        max_abs(&(self.apply_op(&id).expect("dimension matches") - id))
    }
}

pub fn apply(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    let out = ch.apply_op(rho.matrix())?;
    Ok(DensityOperator {
        matrix: matcore::hermitian_part(&out),
    })
}

pub fn adjoint_apply(ch: &KrausChannel, sigma: &CMatrix) -> Result<CMatrix> {
    ch.adjoint_op(sigma)
}

fn check_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(HilbertError::NotUnitary {
            deviation: f64::INFINITY,
        });
    }
    let n = u.nrows();
    let deviation = max_abs(&(u * u.adjoint() - CMatrix::identity(n, n)));
    if deviation.is_nan() || deviation > tol {
        return Err(HilbertError::NotUnitary { deviation });
    }
    Ok(())
}

/// Global unitary on system ⊗ ancilla plus the ancilla state.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationSpec {
    pub u: CMatrix,
    pub beta: DensityOperator,
}

/// Kraus form of `ρ ↦ Tr_B[U (ρ ⊗ β) U†]`.
///
/// With `β = Σ_j λ_j |b_j⟩⟨b_j|` the operators are
/// `κ_{ij} = √λ_j (𝟙 ⊗ ⟨i|) U (𝟙 ⊗ |b_j⟩)`; ancilla weights below the rank
/// threshold are dropped.
pub fn channel_from_dilation(spec: &DilationSpec, tol: f64) -> Result<KrausChannel> {
    check_unitary(&spec.u, tol)?;
    let db = spec.beta.d();
    let total = spec.u.nrows();
    if !total.is_multiple_of(db) {
        return Err(HilbertError::BadAncilla(format!(
            "ancilla dimension {db} does not divide {total}"
        )));
    }
    let da = total / db;
    let eig = matcore::hermitian_eig(spec.beta.matrix(), tol)?;
    let largest = eig.eigenvalues.last().map(|z| z.re).unwrap_or(0.0);
    let mut kraus = Vec::new();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let lambda = lambda.re;
        if lambda <= RANK_THRESHOLD * largest {
            continue;
        }
        let b = eig.vectors.column(j);
        let w = lambda.sqrt();
        for i in 0..db {
            let mut k = CMatrix::zeros(da, da);
            for row in 0..da {
                for col in 0..da {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for bb in 0..db {
                        acc += spec.u[(row * db + i, col * db + bb)] * b[bb];
                    }
                    k[(row, col)] = acc * w;
                }
            }
            kraus.push(k);
        }
    }
    KrausChannel::new(kraus, tol.max(1e-10))
}

/// Direct evaluation of `Tr_B[U (ρ ⊗ β) U†]`, used to cross-check the Kraus form.
pub fn dilate_and_trace(spec: &DilationSpec, rho: &CMatrix) -> Result<CMatrix> {
    let db = spec.beta.d();
    let da = rho.nrows();
    let joint = &spec.u * kron(rho, spec.beta.matrix()) * spec.u.adjoint();
    Ok(partial_trace_b(&joint, da, db)?)
}

/// The Petz recovery map `√γ E†[E[γ]^{-½} ● E[γ]^{-½}] √γ`, kept as its three
/// factor maps.
#[derive(Debug, Clone)]
pub struct PetzMap {
    pub channel: KrausChannel,
    /// The prior actually used (after any regularization).
    pub prior: DensityOperator,
    pub sqrt_prior: CMatrix,
    pub inv_sqrt_posterior: CMatrix,
    /// `Some(ε)` when the prior had to be mixed with 𝟙/d.
    pub eps_used: Option<f64>,
}

impl PetzMap {
    pub fn apply_op(&self, x: &CMatrix) -> Result<CMatrix> {
        let inner = &self.inv_sqrt_posterior * x * &self.inv_sqrt_posterior;
        let back = self.channel.adjoint_op(&inner)?;
        Ok(&self.sqrt_prior * back * &self.sqrt_prior)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self.apply_op(rho.matrix())?;
        Ok(DensityOperator {
            matrix: matcore::hermitian_part(&out),
        })
    }
}

/// Builds the Petz map. If `E[γ]` is rank-deficient the prior is replaced by
/// `(1-ε)γ + ε𝟙/d`; with `eps == 0` that case is an error.
pub fn petz_hilbert(
    ch: &KrausChannel,
    prior: &DensityOperator,
    eps: f64,
    tol: f64,
) -> Result<PetzMap> {
    if prior.d() != ch.d() {
        return Err(HilbertError::DimensionMismatch {
            expected: ch.d(),
            found: prior.d(),
        });
    }
    match petz_exact(ch, prior, tol) {
        Err(HilbertError::SingularPosterior) if eps > 0.0 => {
            let mut map = petz_exact(ch, &prior.mixed_with_identity(eps), tol)?;
            map.eps_used = Some(eps);
            Ok(map)
        }
        other => other,
    }
}

/// Petz map with `E[γ]^{-½}` taken as a pseudo-inverse root on the support
/// of the posterior. No regularization is applied.
pub fn petz_hilbert_pinv(ch: &KrausChannel, prior: &DensityOperator, tol: f64) -> Result<PetzMap> {
    let posterior = matcore::hermitian_part(&ch.apply_op(prior.matrix())?);
    Ok(PetzMap {
        channel: ch.clone(),
        prior: prior.clone(),
        sqrt_prior: psd_power(prior.matrix(), 0.5, tol)?,
        inv_sqrt_posterior: psd_power_with(&posterior, -0.5, tol, SingularPolicy::PseudoInverse)?,
        eps_used: None,
    })
}

fn petz_exact(ch: &KrausChannel, prior: &DensityOperator, tol: f64) -> Result<PetzMap> {
    let posterior = ch.apply_op(prior.matrix())?;
    let inv_sqrt_posterior = match psd_power(&matcore::hermitian_part(&posterior), -0.5, tol) {
        Ok(m) => m,
        Err(MatError::Singular { .. }) => return Err(HilbertError::SingularPosterior),
        Err(e) => return Err(e.into()),
    };
    Ok(PetzMap {
        channel: ch.clone(),
        prior: prior.clone(),
        sqrt_prior: psd_power(prior.matrix(), 0.5, tol)?,
        inv_sqrt_posterior,
        eps_used: None,
    })
}

/// Names accepted by [`builtin_gate`] and [`builtin_channel`].
pub const BUILTIN_NAMES: [&str; 9] = [
    "identity",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "hadamard",
    "ry_pi3",
    "half_swap",
    "full_swap",
    "u_eg",
];

/// Exact matrix of a builtin gate. Two-qubit gates act on system ⊗ ancilla.
pub fn builtin_gate(name: &str) -> Result<CMatrix> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let r2 = FRAC_1_SQRT_2;
    let s3 = 3f64.sqrt();
    let m = match name {
        "identity" => CMatrix::identity(2, 2),
        "pauli_x" => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        "pauli_y" => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        "pauli_z" => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        "hadamard" => CMatrix::from_row_slice(2, 2, &[o, o, o, -o]).scale(r2),
        // (i/2)[[√3, -1], [1, √3]]
        "ry_pi3" => CMatrix::from_row_slice(2, 2, &[c(s3, 0.), -o, o, c(s3, 0.)]) * (i * 0.5),
        "half_swap" => {
            let q = c(r2, 0.0);
            CMatrix::from_row_slice(4, 4, &[o, z, z, z, z, q, q, z, z, q, -q, z, z, z, z, o])
        }
        "full_swap" => {
            CMatrix::from_row_slice(4, 4, &[o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o])
        }
        "u_eg" => {
            // ¼[[i(√3+2i), 0, 3i, 0], [0, i(√3+2i), 0, 3i], [-3i, 0, 2+i√3, 0], [0, -3i, 0, 2+i√3]]
            let a = i * c(s3, 2.0);
            let b = c(0.0, 3.0);
            let d = c(2.0, s3);
            CMatrix::from_row_slice(4, 4, &[a, z, b, z, z, a, z, b, -b, z, d, z, z, -b, z, d])
                .scale(0.25)
        }
        other => return Err(HilbertError::UnknownBuiltin(other.to_string())),
    };
    Ok(m)
}

pub fn builtin_gates() -> Vec<(&'static str, CMatrix)> {
    BUILTIN_NAMES
        .iter()
        .map(|&n| (n, builtin_gate(n).expect("catalog names are valid")))
        .collect()
}

/// Channel for a builtin name. Single-qubit gates give unitary channels;
/// two-qubit gates are dilations with `ancilla` (default `|1⟩⟨1|`).
pub fn builtin_channel(name: &str, ancilla: Option<&DensityOperator>) -> Result<KrausChannel> {
    let u = builtin_gate(name)?;
    let tol = matcore::CHECK_TOL;
    if u.nrows() == 2 {
        if ancilla.is_some() {
            return Err(HilbertError::BadAncilla(format!(
                "`{name}` is a single-qubit gate and takes no ancilla"
            )));
        }
        return KrausChannel::unitary(&u, tol);
    }
    let beta = ancilla.cloned().unwrap_or_else(ket1);
    if beta.d() != 2 {
        return Err(HilbertError::BadAncilla("ancilla must be a qubit".into()));
    }
    channel_from_dilation(&DilationSpec { u, beta }, tol)
}
