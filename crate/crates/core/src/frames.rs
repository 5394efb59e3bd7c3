//! Frames, dual frames and structure coefficients.
//!
//! A representation is fixed by a frame `{F_j}` and a dual frame `{G_j}`
//! of `d²` Hermitian operators each. States map to quasiprobability vectors
//! through `v_a = Tr[ρ F_a]`, effects through `Tr[E G_a]`.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matcore::{self, c, kron, max_abs, trace_of_product, CMatrix, MAX_DIM};

/// Number of random Hermitian pairs used to probe the sum-trace identity.
pub const SUM_TRACE_SAMPLES: usize = 20;
const SUM_TRACE_SEED: u64 = 0x5eed_f4a3e;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("expected {expected} operators, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("operator {index} has shape {rows}x{cols}, expected {d}x{d}")]
    BadShape {
        index: usize,
        rows: usize,
        cols: usize,
        d: usize,
    },
    #[error("dimension {0} is outside the supported range 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("frame `{0}` is not a normal quasiprobability representation")]
    NotNqpr(String),
    #[error("frame validation failed: {check} (max violation {violation:e})")]
    ValidationFailed { check: FrameCheck, violation: f64 },
}

/// Representation family. Only the first two admit closed-form adjoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RepKind {
    /// Normal QPR: `G_j = c F_j`.
    Nqpr {
        c: f64,
    },
    /// SIC-POVM representation: `G_j = d(d+1) F_j - 𝟙`.
    Sic,
    Custom,
}

impl RepKind {
    pub fn tag(&self) -> &'static str {
        match self {
            RepKind::Nqpr { .. } => "nqpr",
            RepKind::Sic => "sic",
            RepKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub id: String,
    pub d: usize,
    /// Display labels; matrix indexing always uses the position in `ops`.
    pub labels: Vec<String>,
    pub ops: Vec<CMatrix>,
    pub kind: RepKind,
}

#[derive(Debug, Clone)]
pub struct DualFrame {
    pub ops: Vec<CMatrix>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

fn pauli() -> [CMatrix; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// `¼[𝟙 + x σx + y σy + z σz]`
fn bloch_quarter(x: f64, y: f64, z: f64) -> CMatrix {
    let [id, sx, sy, sz] = pauli();
    (id + sx.scale(x) + sy.scale(y) + sz.scale(z)).scale(0.25)
}

/// Discrete Wigner frame for one qubit, labels `(r,s)` in row-major order.
pub fn build_dw_qubit() -> (Frame, DualFrame) {
    let mut ops = Vec::with_capacity(4);
    let mut labels = Vec::with_capacity(4);
    for r in 0..2 {
        for s in 0..2 {
            let sign = |k: i32| if k % 2 == 0 { 1.0 } else { -1.0 };
            ops.push(bloch_quarter(sign(r), sign(r + s), sign(s)));
            labels.push(format!("({r},{s})"));
        }
    }
    let dual = DualFrame {
        ops: ops.iter().map(|f| f.scale(2.0)).collect(),
    };
    let frame = Frame {
        id: "dw-qubit".into(),
        d: 2,
        labels,
        ops,
        kind: RepKind::Nqpr { c: 2.0 },
    };
    (frame, dual)
}

/// Tetrahedral SIC-POVM frame for one qubit.
pub fn build_sic_qubit() -> (Frame, DualFrame) {
    let s = 1.0 / 3f64.sqrt();
    let directions = [
        (1.0, -1.0, 1.0),
        (1.0, 1.0, -1.0),
        (-1.0, 1.0, 1.0),
        (-1.0, -1.0, -1.0),
    ];
    let ops: Vec<CMatrix> = directions
        .iter()
        .map(|&(x, y, z)| bloch_quarter(x * s, y * s, z * s))
        .collect();
    let id = CMatrix::identity(2, 2);
    let dual = DualFrame {
        ops: ops.iter().map(|f| f.scale(6.0) - &id).collect(),
    };
    let frame = Frame {
        id: "sic-qubit".into(),
        d: 2,
        labels: (0..4).map(|j| j.to_string()).collect(),
        ops,
        kind: RepKind::Sic,
    };
    (frame, dual)
}

/// Tensor product of NQPR frames; the last factor's label runs fastest.
pub fn tensor_frames(parts: &[(Frame, DualFrame)]) -> Result<(Frame, DualFrame), FrameError> {
    let mut iter = parts.iter();
    let (first, first_dual) = match iter.next() {
        Some(p) => p,
        None => {
            return Err(FrameError::WrongCount {
                expected: 1,
                found: 0,
            })
        }
    };
    let mut c_total = match first.kind {
        RepKind::Nqpr { c } => c,
        _ => return Err(FrameError::NotNqpr(first.id.clone())),
    };
    let mut frame = first.clone();
    let mut dual = first_dual.clone();
    for (next, next_dual) in iter {
        let c_next = match next.kind {
            RepKind::Nqpr { c } => c,
            _ => return Err(FrameError::NotNqpr(next.id.clone())),
        };
        let d = frame.d * next.d;
        if d > MAX_DIM {
            return Err(FrameError::UnsupportedDimension(d));
        }
        let mut ops = Vec::with_capacity(frame.len() * next.len());
        let mut dual_ops = Vec::with_capacity(ops.capacity());
        let mut labels = Vec::with_capacity(ops.capacity());
        for (j, (f, g)) in frame.ops.iter().zip(&dual.ops).enumerate() {
            for (k, (f2, g2)) in next.ops.iter().zip(&next_dual.ops).enumerate() {
                ops.push(kron(f, f2));
                dual_ops.push(kron(g, g2));
                labels.push(format!("{}{}", frame.labels[j], next.labels[k]));
            }
        }
        c_total *= c_next;
        frame = Frame {
            id: format!("{}*{}", frame.id, next.id),
            d,
            labels,
            ops,
            kind: RepKind::Nqpr { c: c_total },
        };
        dual = DualFrame { ops: dual_ops };
    }
    if parts.len() > 1 && parts.iter().all(|(f, _)| f.id == "dw-qubit") {
        frame.id = format!("dw-qubits:{}", parts.len());
    }
    Ok((frame, dual))
}

/// L-fold tensor power of the qubit discrete Wigner frame.
pub fn build_dw_qubits(count: usize) -> Result<(Frame, DualFrame), FrameError> {
    if count == 1 {
        return Ok(build_dw_qubit());
    }
    let parts: Vec<_> = (0..count).map(|_| build_dw_qubit()).collect();
    tensor_frames(&parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameCheck {
    Normalization,
    FrameTrace,
    FrameHermiticity,
    DualTrace,
    DualHermiticity,
    Orthogonality,
    SumTrace,
    KindRelation,
}

impl fmt::Display for FrameCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FrameCheck::Normalization => "normalization",
            FrameCheck::FrameTrace => "frame-trace",
            FrameCheck::FrameHermiticity => "frame-hermiticity",
            FrameCheck::DualTrace => "dual-trace",
            FrameCheck::DualHermiticity => "dual-hermiticity",
            FrameCheck::Orthogonality => "orthogonality",
            FrameCheck::SumTrace => "sum-trace",
            FrameCheck::KindRelation => "kind-relation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: FrameCheck,
    pub max_violation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tol: f64,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn violation(&self, check: FrameCheck) -> Option<f64> {
        self.checks
            .iter()
            .find(|c| c.check == check)
            .map(|c| c.max_violation)
    }

    pub fn into_result(self) -> Result<ValidationReport, FrameError> {
        match self.first_failure() {
            Some(f) => Err(FrameError::ValidationFailed {
                check: f.check,
                violation: f.max_violation,
            }),
            None => Ok(self),
        }
    }
}

fn check_shapes(frame: &Frame, dual: &DualFrame) -> Result<(), FrameError> {
    let d = frame.d;
    if d == 0 || d > MAX_DIM {
        return Err(FrameError::UnsupportedDimension(d));
    }
    let expected = d * d;
    for found in [frame.ops.len(), dual.ops.len(), frame.labels.len()] {
        if found != expected {
            return Err(FrameError::WrongCount { expected, found });
        }
    }
    for (index, op) in frame.ops.iter().chain(&dual.ops).enumerate() {
        if op.nrows() != d || op.ncols() != d {
            return Err(FrameError::BadShape {
                index: index % expected,
                rows: op.nrows(),
                cols: op.ncols(),
                d,
            });
        }
    }
    Ok(())
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    matcore::hermitian_part(&a)
}

/// Runs every frame/dual invariant and reports the worst violation of each.
///
/// Shape problems (wrong operator count or size) are reported as errors
/// since no numerical check is meaningful in that case.
pub fn validate_frame(
    frame: &Frame,
    dual: &DualFrame,
    tol: f64,
) -> Result<ValidationReport, FrameError> {
    check_shapes(frame, dual)?;
    let d = frame.d;
    let n = d * d;
    let id = CMatrix::identity(d, d);

    let sum = frame
        .ops
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, f| acc + f);
    let normalization = max_abs(&(sum - &id));

    let inv_d = 1.0 / d as f64;
    let frame_trace = frame
        .ops
        .iter()
        .map(|f| (f.trace() - c(inv_d, 0.0)).norm())
        .fold(0.0, f64::max);
    let frame_herm = frame
        .ops
        .iter()
        .map(matcore::hermiticity_defect)
        .fold(0.0, f64::max);
    let dual_trace = dual
        .ops
        .iter()
        .map(|g| (g.trace() - c(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    let dual_herm = dual
        .ops
        .iter()
        .map(matcore::hermiticity_defect)
        .fold(0.0, f64::max);

    let mut orthogonality: f64 = 0.0;
    for (j, f) in frame.ops.iter().enumerate() {
        for (k, g) in dual.ops.iter().enumerate() {
            let target = if j == k { 1.0 } else { 0.0 };
            orthogonality = orthogonality.max((trace_of_product(f, g) - c(target, 0.0)).norm());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SUM_TRACE_SEED);
    let mut sum_trace: f64 = 0.0;
    for _ in 0..SUM_TRACE_SAMPLES {
        let a = random_hermitian(d, &mut rng);
        let b = random_hermitian(d, &mut rng);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += trace_of_product(&frame.ops[j], &a) * trace_of_product(&dual.ops[j], &b);
        }
        sum_trace = sum_trace.max((acc - trace_of_product(&a, &b)).norm());
    }

    let kind_relation = match frame.kind {
        RepKind::Nqpr { c: scale } => frame
            .ops
            .iter()
            .zip(&dual.ops)
            .map(|(f, g)| max_abs(&(f.scale(scale) - g)))
            .fold(0.0, f64::max),
        RepKind::Sic => {
            let factor = (d * (d + 1)) as f64;
            frame
                .ops
                .iter()
                .zip(&dual.ops)
                .map(|(f, g)| max_abs(&(f.scale(factor) - &id - g)))
                .fold(0.0, f64::max)
        }
        RepKind::Custom => 0.0,
    };

    let checks = [
        (FrameCheck::Normalization, normalization),
        (FrameCheck::FrameTrace, frame_trace),
        (FrameCheck::FrameHermiticity, frame_herm),
        (FrameCheck::DualTrace, dual_trace),
        (FrameCheck::DualHermiticity, dual_herm),
        (FrameCheck::Orthogonality, orthogonality),
        (FrameCheck::SumTrace, sum_trace),
        (FrameCheck::KindRelation, kind_relation),
    ]
    .into_iter()
    .map(|(check, v)| CheckOutcome {
        check,
        max_violation: v,
        passed: v <= tol,
    })
    .collect();
    Ok(ValidationReport { tol, checks })
}

/// Rank-4 tensor `ξ_{pqrs} = Tr[F_p G_q G_r G_s]`, stored densely.
///
/// Individual entries are complex in general; only the contractions against
/// real quasiprobability vectors are real.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureCoefficients {
    pub n: usize,
    pub frame_id: String,
    data: Vec<Complex64>,
}

impl StructureCoefficients {
    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.data[((p * self.n + q) * self.n + r) * self.n + s]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// The Kronecker-delta tensor `δ_pq δ_rs δ_pr` of classical inference.
    pub fn classical(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for p in 0..n {
            data[((p * n + p) * n + p) * n + p] = Complex64::new(1.0, 0.0);
        }
        StructureCoefficients {
            n,
            frame_id: format!("classical:{n}"),
            data,
        }
    }

    /// Computes ξ from arbitrary aligned operator lists.
    pub fn from_operators(
        frame_id: &str,
        frame_ops: &[CMatrix],
        dual_ops: &[CMatrix],
    ) -> Result<Self, FrameError> {
        let n = frame_ops.len();
        if dual_ops.len() != n {
            return Err(FrameError::WrongCount {
                expected: n,
                found: dual_ops.len(),
            });
        }
        // Tr[F_p G_q G_r G_s] = Tr[(G_s F_p)(G_q G_r)]
        let left: Vec<CMatrix> = (0..n * n)
            .map(|i| &dual_ops[i % n] * &frame_ops[i / n])
            .collect();
        let right: Vec<CMatrix> = (0..n * n)
            .map(|i| &dual_ops[i / n] * &dual_ops[i % n])
            .collect();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for p in 0..n {
            for s in 0..n {
                let l = &left[p * n + s];
                for q in 0..n {
                    for r in 0..n {
                        data[((p * n + q) * n + r) * n + s] =
                            trace_of_product(l, &right[q * n + r]);
                    }
                }
            }
        }
        Ok(StructureCoefficients {
            n,
            frame_id: frame_id.to_string(),
            data,
        })
    }
}

pub fn structure_coeffs(
    frame: &Frame,
    dual: &DualFrame,
) -> Result<StructureCoefficients, FrameError> {
    StructureCoefficients::from_operators(&frame.id, &frame.ops, &dual.ops)
}

/// A validated frame pair with its cached structure coefficients.
#[derive(Debug, Clone)]
pub struct Representation {
    pub frame: Frame,
    pub dual: DualFrame,
    pub xi: StructureCoefficients,
}

impl Representation {
    pub fn new(frame: Frame, dual: DualFrame) -> Result<Self, FrameError> {
        validate_frame(&frame, &dual, matcore::CHECK_TOL)?.into_result()?;
        let xi = structure_coeffs(&frame, &dual)?;
        Ok(Representation { frame, dual, xi })
    }

    pub fn dw_qubit() -> Self {
        let (f, g) = build_dw_qubit();
        Self::new(f, g).expect("built-in DW frame is valid")
    }

    pub fn sic_qubit() -> Self {
        let (f, g) = build_sic_qubit();
        Self::new(f, g).expect("built-in SIC frame is valid")
    }

    pub fn dw_qubits(count: usize) -> Result<Self, FrameError> {
        let (f, g) = build_dw_qubits(count)?;
        Self::new(f, g)
    }

    pub fn id(&self) -> &str {
        &self.frame.id
    }

    pub fn d(&self) -> usize {
        self.frame.d
    }

    /// Number of quasiprobability entries, d².
    pub fn n(&self) -> usize {
        self.frame.ops.len()
    }

    pub fn kind(&self) -> RepKind {
        self.frame.kind
    }
}
