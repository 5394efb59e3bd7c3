//! Quasiprobability side: morphisms from Hilbert-space objects, M-matrices,
//! QPR adjoints and the Petz map, plus classical Bayes for contrast.
//!
//! Matrices act on column vectors: `S[(a', a)]` is the weight from input `a`
//! to output `a'`, so `S · v` is the image of `v` and columns sum to one.

use nalgebra::DVector;
use thiserror::Error;

use crate::frames::{FrameError, RepKind, Representation, StructureCoefficients};
use crate::hilbert::{self, DensityOperator, HilbertError, KrausChannel};
use crate::matcore::{
    self, max_diff_real, principal_power, principal_power_with, psd_power, trace_of_product,
    CMatrix, MatError, RMatrix, SingularPolicy, RANK_THRESHOLD,
};

pub type RVector = DVector<f64>;

/// Column sums must match one to this tolerance for a retrodiction to be
/// accepted.
pub const STOCHASTIC_TOL: f64 = 1e-9;
/// The prior must be reproduced to this tolerance.
pub const FIXED_POINT_TOL: f64 = 1e-8;
/// Maximum allowed `|result(ε) - result(10ε)|` before a regularized result is flagged.
pub const EXTRAPOLATION_TOL: f64 = 1e-6;
/// Largest ε tried when escalating a regularization.
pub const MAX_EPS: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QprError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("representation mismatch: `{left}` vs `{right}`")]
    RepMismatch { left: String, right: String },
    #[error("no closed-form adjoint for {0} representations")]
    UnsupportedKind(&'static str),
    #[error("posterior is singular and no regularization succeeded")]
    SingularPosterior,
    #[error("state is rank-deficient; negative powers are undefined")]
    SingularState,
    #[error("imaginary residue {residue:e} exceeds tolerance")]
    ComplexResidue { residue: f64 },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

pub type Result<T, E = QprError> = std::result::Result<T, E>;

fn same_rep(left: &str, right: &str) -> Result<()> {
    if left != right {
        return Err(QprError::RepMismatch {
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok(())
}

fn same_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(QprError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// State quasiprobabilities `v_a = Tr[ρ F_a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiVector {
    pub rep: String,
    pub entries: RVector,
}

impl QuasiVector {
    pub fn new(rep: impl Into<String>, entries: Vec<f64>) -> Self {
        QuasiVector {
            rep: rep.into(),
            entries: RVector::from_vec(entries),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.sum()
    }

    pub fn min(&self) -> f64 {
        self.entries.min()
    }
}

/// Effect coordinates `v̄_a = Tr[E G_a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    pub rep: String,
    pub entries: RVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiStochasticMatrix {
    pub rep: String,
    pub entries: RMatrix,
}

impl QuasiStochasticMatrix {
    pub fn new(rep: impl Into<String>, entries: RMatrix) -> Self {
        QuasiStochasticMatrix {
            rep: rep.into(),
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn column_sum_defect(&self) -> f64 {
        self.entries
            .column_iter()
            .map(|col| (col.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn row_sum_defect(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|row| (row.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_bistochastic(&self, tol: f64) -> bool {
        self.column_sum_defect() <= tol && self.row_sum_defect() <= tol
    }

    pub fn apply(&self, v: &QuasiVector) -> Result<QuasiVector> {
        same_rep(&self.rep, &v.rep)?;
        same_len(self.entries.ncols(), v.len())?;
        Ok(QuasiVector {
            rep: self.rep.clone(),
            entries: &self.entries * &v.entries,
        })
    }

    pub fn transpose(&self) -> Self {
        QuasiStochasticMatrix::new(self.rep.clone(), self.entries.transpose())
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.min()
    }
}

/// `(M_α)_{ij} = Σ_{xy} v_x v_y ξ_{ixjy}`, equivalently `Tr[F_i α G_j α]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrix {
    pub rep: String,
    pub entries: RMatrix,
    /// Largest imaginary part discarded when forming `entries`.
    pub imag_residue: f64,
}

/// Rank-one correction with identical rows, `K_{ij} = (Σ_a S_{ja} - 1) / d`.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    pub entries: RMatrix,
}

impl KMatrix {
    pub fn max_abs(&self) -> f64 {
        matcore::max_abs_real(&self.entries)
    }
}

fn check_operator(rep: &Representation, m: &CMatrix) -> Result<()> {
    if m.nrows() != rep.d() || m.ncols() != rep.d() {
        return Err(QprError::DimensionMismatch {
            expected: rep.d(),
            found: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}

pub fn state_to_qpr(rho: &CMatrix, rep: &Representation) -> Result<QuasiVector> {
    check_operator(rep, rho)?;
    let entries = rep
        .frame
        .ops
        .iter()
        .map(|f| trace_of_product(rho, f).re)
        .collect();
    Ok(QuasiVector::new(rep.id(), entries))
}

pub fn povm_to_qpr(effect: &CMatrix, rep: &Representation) -> Result<DualVector> {
    check_operator(rep, effect)?;
    let entries = rep
        .dual
        .ops
        .iter()
        .map(|g| trace_of_product(effect, g).re)
        .collect();
    Ok(DualVector {
        rep: rep.id().to_string(),
        entries: RVector::from_vec(entries),
    })
}

/// `α = Σ_x v_x G_x`
pub fn reconstruct_state(v: &QuasiVector, rep: &Representation) -> Result<CMatrix> {
    same_rep(rep.id(), &v.rep)?;
    same_len(rep.n(), v.len())?;
    let d = rep.d();
    Ok(rep
        .dual
        .ops
        .iter()
        .zip(v.entries.iter())
        .fold(CMatrix::zeros(d, d), |acc, (g, &x)| acc + g.scale(x)))
}

/// QPR image of a linear map: `S_{a'a} = Tr[F_{a'} f(G_a)]`.
pub fn morph_map<F>(rep: &Representation, f: F) -> Result<QuasiStochasticMatrix>
where
    F: Fn(&CMatrix) -> Result<CMatrix, HilbertError>,
{
    let n = rep.n();
    let mut s = RMatrix::zeros(n, n);
    for (a, g) in rep.dual.ops.iter().enumerate() {
        let image = f(g)?;
        check_operator(rep, &image)?;
        for (b, fr) in rep.frame.ops.iter().enumerate() {
            s[(b, a)] = trace_of_product(fr, &image).re;
        }
    }
    Ok(QuasiStochasticMatrix::new(rep.id(), s))
}

pub fn channel_to_qpr(ch: &KrausChannel, rep: &Representation) -> Result<QuasiStochasticMatrix> {
    same_len(rep.d(), ch.d())?;
    morph_map(rep, |g| ch.apply_op(g))
}

/// QPR image of the Hilbert adjoint `E†`.
pub fn hilbert_adjoint_qpr(ch: &KrausChannel, rep: &Representation) -> Result<RMatrix> {
    same_len(rep.d(), ch.d())?;
    Ok(morph_map(rep, |g| ch.adjoint_op(g))?.entries)
}

pub fn born(v: &QuasiVector, vbar: &DualVector) -> Result<f64> {
    same_rep(&v.rep, &vbar.rep)?;
    same_len(v.len(), vbar.entries.len())?;
    Ok(v.entries.dot(&vbar.entries))
}

/// Contracts a quasi-vector twice against the structure coefficients.
pub fn x_matrix(v: &QuasiVector, xi: &StructureCoefficients) -> Result<MMatrix> {
    same_rep(&xi.frame_id, &v.rep)?;
    let n = xi.n;
    same_len(n, v.len())?;
    let mut entries = RMatrix::zeros(n, n);
    let mut imag_residue: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for x in 0..n {
                let vx = v.entries[x];
                if vx == 0.0 {
                    continue;
                }
                for y in 0..n {
                    acc += xi.get(i, x, j, y) * (vx * v.entries[y]);
                }
            }
            imag_residue = imag_residue.max(acc.im.abs());
            entries[(i, j)] = acc.re;
        }
    }
    let scale = matcore::max_abs_real(&entries).max(1.0);
    if imag_residue > 1e-8 * scale {
        return Err(QprError::ComplexResidue {
            residue: imag_residue,
        });
    }
    Ok(MMatrix {
        rep: v.rep.clone(),
        entries,
        imag_residue,
    })
}

/// `Tr[F_i α G_j α]` evaluated directly from an operator.
pub fn m_direct(alpha: &CMatrix, rep: &Representation) -> Result<MMatrix> {
    check_operator(rep, alpha)?;
    let n = rep.n();
    let right: Vec<CMatrix> = rep.dual.ops.iter().map(|g| g * alpha).collect();
    let mut entries = RMatrix::zeros(n, n);
    let mut imag_residue: f64 = 0.0;
    for (i, f) in rep.frame.ops.iter().enumerate() {
        let left = f * alpha;
        for (j, r) in right.iter().enumerate() {
            let z = trace_of_product(&left, r);
            imag_residue = imag_residue.max(z.im.abs());
            entries[(i, j)] = z.re;
        }
    }
    Ok(MMatrix {
        rep: rep.id().to_string(),
        entries,
        imag_residue,
    })
}

pub fn k_matrix(s: &QuasiStochasticMatrix, d: usize) -> KMatrix {
    let n = s.n();
    let row: Vec<f64> = s
        .entries
        .row_iter()
        .map(|r| (r.sum() - 1.0) / d as f64)
        .collect();
    KMatrix {
        entries: RMatrix::from_fn(n, n, |_, j| row[j]),
    }
}

/// Closed-form QPR adjoint: `Sᵀ` for normal representations, `Sᵀ + K` for SIC.
pub fn adjoint_qpr(s: &QuasiStochasticMatrix, kind: RepKind, d: usize) -> Result<RMatrix> {
    match kind {
        RepKind::Nqpr { .. } => Ok(s.entries.transpose()),
        RepKind::Sic => Ok(s.entries.transpose() + k_matrix(s, d).entries),
        RepKind::Custom => Err(QprError::UnsupportedKind("custom")),
    }
}

/// Adjoint for any representation. Custom frames fall back to morphing the
/// Hilbert adjoint, which requires the channel.
pub fn adjoint_for(
    s: &QuasiStochasticMatrix,
    rep: &Representation,
    ch: Option<&KrausChannel>,
) -> Result<RMatrix> {
    same_rep(rep.id(), &s.rep)?;
    match (rep.kind(), ch) {
        (RepKind::Custom, Some(ch)) => hilbert_adjoint_qpr(ch, rep),
        (kind, _) => adjoint_qpr(s, kind, rep.d()),
    }
}

/// General retrodictor `X_γ^{½} · adj · X_post^{-½}`.
pub fn table_retrodictor(
    adj: &RMatrix,
    x_prior: &RMatrix,
    x_post: &RMatrix,
    tol: f64,
    policy: SingularPolicy,
) -> Result<RMatrix, MatError> {
    let left = principal_power(x_prior, 0.5, tol)?;
    let right = principal_power_with(x_post, -0.5, tol, policy)?;
    Ok(left * adj * right)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PetzOptions {
    /// Starting regularization weight; zero forbids regularization.
    pub eps: f64,
    /// Spectrum tolerance for the matrix roots.
    pub tol: f64,
}

impl Default for PetzOptions {
    fn default() -> Self {
        PetzOptions {
            eps: 1e-8,
            tol: matcore::CHECK_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PetzRoute {
    /// Both roots exist as stated.
    Direct,
    /// Posterior root taken on its support only.
    PseudoInverse,
    /// Prior mixed with the maximally mixed state.
    Regularized,
}

impl PetzRoute {
    pub fn tag(&self) -> &'static str {
        match self {
            PetzRoute::Direct => "direct",
            PetzRoute::PseudoInverse => "pseudo-inverse",
            PetzRoute::Regularized => "regularized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PetzQpr {
    pub matrix: QuasiStochasticMatrix,
    pub route: PetzRoute,
    /// Prior the returned matrix retrodicts against.
    pub prior_used: QuasiVector,
    pub eps_used: Option<f64>,
    /// `max |result(ε) - result(10ε)|` for regularized results.
    pub extrapolation_gap: Option<f64>,
    /// Deviation between the pseudo-inverse and regularized results when both exist.
    pub pinv_eps_gap: Option<f64>,
    /// Set when one of the gaps above exceeds [`EXTRAPOLATION_TOL`].
    pub flagged: bool,
}

fn is_singular(e: &MatError) -> bool {
    matches!(
        e,
        MatError::SingularForNegativePower { .. } | MatError::DefectiveZeroEigenvalue { .. }
    )
}

fn accepts(m: &RMatrix, s: &RMatrix, prior: &RVector) -> bool {
    let cols = m
        .column_iter()
        .all(|c| (c.sum() - 1.0).abs() <= STOCHASTIC_TOL);
    let back = m * (s * prior);
    cols && (back - prior).amax() <= FIXED_POINT_TOL
}

/// Coordinates of `𝟙/d`.
pub fn maximally_mixed(rep: &Representation) -> QuasiVector {
    let d = rep.d();
    state_to_qpr(&CMatrix::identity(d, d).unscale(d as f64), rep).expect("dimension matches")
}

/// Petz map in the representation, `M_γ^{½} · adj(S) · M_{E[γ]}^{-½}`.
pub fn petz_qpr(
    s: &QuasiStochasticMatrix,
    prior: &QuasiVector,
    rep: &Representation,
    opts: PetzOptions,
) -> Result<PetzQpr> {
    let adj = adjoint_qpr(s, rep.kind(), rep.d())?;
    petz_qpr_with_adjoint(s, &adj, prior, rep, opts)
}

/// As [`petz_qpr`] with a caller-supplied adjoint (custom frames).
pub fn petz_qpr_with_adjoint(
    s: &QuasiStochasticMatrix,
    adj: &RMatrix,
    prior: &QuasiVector,
    rep: &Representation,
    opts: PetzOptions,
) -> Result<PetzQpr> {
    same_rep(rep.id(), &s.rep)?;
    same_rep(rep.id(), &prior.rep)?;
    same_len(rep.n(), prior.len())?;
    same_len(rep.n(), s.n())?;
    let tol = opts.tol;

    let attempt = |v: &QuasiVector, policy| -> Result<std::result::Result<RMatrix, MatError>> {
        let post = s.apply(v)?;
        let mp = x_matrix(v, &rep.xi)?;
        let mq = x_matrix(&post, &rep.xi)?;
        Ok(table_retrodictor(
            adj,
            &mp.entries,
            &mq.entries,
            tol,
            policy,
        ))
    };
    let wrap = |m: RMatrix| QuasiStochasticMatrix::new(rep.id(), m);

    match attempt(prior, SingularPolicy::Error)? {
        Ok(m) => {
            return Ok(PetzQpr {
                matrix: wrap(m),
                route: PetzRoute::Direct,
                prior_used: prior.clone(),
                eps_used: None,
                extrapolation_gap: None,
                pinv_eps_gap: None,
                flagged: false,
            })
        }
        Err(e) if is_singular(&e) => {}
        Err(e) => return Err(e.into()),
    }
    if opts.eps <= 0.0 {
        return Err(QprError::SingularPosterior);
    }

    let pinv = match attempt(prior, SingularPolicy::PseudoInverse)? {
        Ok(m) if accepts(&m, &s.entries, &prior.entries) => Some(m),
        _ => None,
    };

    let mixed = maximally_mixed(rep);
    let regularize = |eps: f64| QuasiVector {
        rep: prior.rep.clone(),
        entries: prior.entries.scale(1.0 - eps) + mixed.entries.scale(eps),
    };
    let mut regularized = None;
    let mut eps = opts.eps;
    while eps <= MAX_EPS * (1.0 + 1e-9) {
        let v = regularize(eps);
        if let Ok(m) = attempt(&v, SingularPolicy::Error)? {
            if accepts(&m, &s.entries, &v.entries) {
                let gap = match attempt(&regularize(eps * 10.0), SingularPolicy::Error)? {
                    Ok(coarse) => max_diff_real(&m, &coarse),
                    Err(_) => f64::INFINITY,
                };
                regularized = Some((m, eps, v, gap));
                break;
            }
        }
        eps *= 10.0;
    }

    match (pinv, regularized) {
        (Some(p), reg) => {
            let pinv_eps_gap = reg.as_ref().map(|(m, ..)| max_diff_real(&p, m));
            Ok(PetzQpr {
                matrix: wrap(p),
                route: PetzRoute::PseudoInverse,
                prior_used: prior.clone(),
                eps_used: None,
                extrapolation_gap: None,
                flagged: pinv_eps_gap.is_some_and(|g| g > EXTRAPOLATION_TOL),
                pinv_eps_gap,
            })
        }
        (None, Some((m, eps, v, gap))) => Ok(PetzQpr {
            matrix: wrap(m),
            route: PetzRoute::Regularized,
            prior_used: v,
            eps_used: Some(eps),
            extrapolation_gap: Some(gap),
            pinv_eps_gap: None,
            flagged: gap > EXTRAPOLATION_TOL,
        }),
        (None, None) => Err(QprError::SingularPosterior),
    }
}

/// Hilbert-space Petz map for the same prior and route as `petz`, carried
/// into the representation.
pub fn oracle_petz(
    ch: &KrausChannel,
    prior: &DensityOperator,
    petz: &PetzQpr,
    rep: &Representation,
) -> Result<QuasiStochasticMatrix> {
    let tol = matcore::CHECK_TOL;
    let map = match (petz.route, petz.eps_used) {
        (PetzRoute::PseudoInverse, _) => hilbert::petz_hilbert_pinv(ch, prior, tol)?,
        (_, Some(eps)) => hilbert::petz_hilbert(ch, &prior.mixed_with_identity(eps), 0.0, tol)?,
        (_, None) => hilbert::petz_hilbert(ch, prior, 0.0, tol)?,
    };
    morph_map(rep, |x| map.apply_op(x))
}

/// Worst column-sum defect and worst prior fixed-point defect of a
/// retrodiction matrix.
pub fn retrodiction_defects(petz: &PetzQpr, s: &QuasiStochasticMatrix) -> Result<(f64, f64)> {
    let post = s.apply(&petz.prior_used)?;
    let back = petz.matrix.apply(&post)?;
    Ok((
        petz.matrix.column_sum_defect(),
        (back.entries - &petz.prior_used.entries).amax(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBayes {
    pub matrix: RMatrix,
    pub prior_used: RVector,
    pub eps_used: Option<f64>,
}

/// `D_γ Sᵀ D_{Sγ}^{-1}`. Quasi-stochastic input and negative posteriors are
/// accepted as-is; only vanishing posterior entries trigger ε-mixing of the
/// prior with the uniform vector.
pub fn classical_bayes(s: &RMatrix, prior: &RVector, eps: f64) -> Result<ClassicalBayes> {
    let n = prior.len();
    same_len(n, s.ncols())?;
    same_len(n, s.nrows())?;
    let vanishing = |post: &RVector| {
        let scale = post.amax().max(f64::MIN_POSITIVE);
        post.iter().any(|p| p.abs() <= RANK_THRESHOLD * scale)
    };
    let mut prior_used = prior.clone();
    let mut eps_used = None;
    let mut post = s * &prior_used;
    if vanishing(&post) {
        if eps <= 0.0 {
            return Err(QprError::SingularPosterior);
        }
        let uniform = RVector::from_element(n, 1.0 / n as f64);
        prior_used = prior.scale(1.0 - eps) + uniform.scale(eps);
        post = s * &prior_used;
        if vanishing(&post) {
            return Err(QprError::SingularPosterior);
        }
        eps_used = Some(eps);
    }
    let matrix = RMatrix::from_fn(n, n, |i, j| prior_used[i] * s[(j, i)] / post[j]);
    Ok(ClassicalBayes {
        matrix,
        prior_used,
        eps_used,
    })
}

/// Classical Bayes through the structure-coefficient pipeline with
/// Kronecker-delta ξ, `W_γ^{½} Sᵀ W_{Sγ}^{-½}` with `W = diag(v²)`.
///
/// Agrees with [`classical_bayes`] whenever prior and posterior are
/// nonnegative; otherwise the principal root replaces `v` by `|v|`.
pub fn classical_bayes_table(s: &RMatrix, prior: &RVector, tol: f64) -> Result<RMatrix> {
    let n = prior.len();
    same_len(n, s.ncols())?;
    let xi = StructureCoefficients::classical(n);
    let v = QuasiVector {
        rep: xi.frame_id.clone(),
        entries: prior.clone(),
    };
    let post = QuasiVector {
        rep: xi.frame_id.clone(),
        entries: s * prior,
    };
    let wp = x_matrix(&v, &xi)?;
    let wq = x_matrix(&post, &xi)?;
    Ok(table_retrodictor(
        &s.transpose(),
        &wp.entries,
        &wq.entries,
        tol,
        SingularPolicy::Error,
    )?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCheck {
    pub r: f64,
    /// `max |M_{α^r} - M_α^r|`
    pub deviation: f64,
    /// Informational: `Tr[M_α^r]`, which differs from one unless `M_α` has rank one.
    pub trace_of_power: f64,
}

/// Compares `M_{α^r}`, built from `α^r` directly, with the principal power `M_α^r`.
pub fn m_power_check(
    v: &QuasiVector,
    rep: &Representation,
    r: f64,
    tol: f64,
) -> Result<PowerCheck> {
    let alpha = reconstruct_state(v, rep)?;
    let alpha_r = match psd_power(&matcore::hermitian_part(&alpha), r, tol) {
        Ok(a) => a,
        Err(MatError::Singular { .. }) => return Err(QprError::SingularState),
        Err(e) => return Err(e.into()),
    };
    let lhs = m_direct(&alpha_r, rep)?;
    let m = x_matrix(v, &rep.xi)?;
    let rhs = match principal_power(&m.entries, r, tol) {
        Ok(p) => p,
        Err(MatError::SingularForNegativePower { .. }) => return Err(QprError::SingularState),
        Err(e) => return Err(e.into()),
    };
    Ok(PowerCheck {
        r,
        deviation: max_diff_real(&lhs.entries, &rhs),
        trace_of_power: rhs.trace(),
    })
}
