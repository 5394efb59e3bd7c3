//! JSON file formats and small text specs used by the command line.
//!
//! Complex entries are `[re, im]` pairs (a bare number is read as real).
//! Reals are written in scientific notation with 17 significant digits.
//! Parsers never trust declared sizes: every shape is checked against the
//! data actually present, and dimensions are capped at [`MAX_DIM`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::frames::{
    self, DualFrame, Frame, FrameError, RepKind, Representation, ValidationReport,
};
use crate::hilbert::{
    self, DensityOperator, DilationSpec, HilbertError, KrausChannel, QubitStateParams,
};
use crate::matcore::{self, c, CMatrix, RMatrix, MAX_DIM};
use crate::qprcore::{QuasiStochasticMatrix, QuasiVector, RVector};

/// Upper bound on input file size.
pub const MAX_FILE_BYTES: u64 = 16 << 20;
/// Quasiprobability vectors have at most `MAX_DIM²` entries.
pub const MAX_ENTRIES: usize = MAX_DIM * MAX_DIM;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid content: {0}")]
    Invalid(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    let err = |message: String| IoError::File {
        path: path.display().to_string(),
        message,
    };
    let meta = std::fs::metadata(path).map_err(|e| err(e.to_string()))?;
    if meta.len() > MAX_FILE_BYTES {
        return Err(err(format!("file exceeds {MAX_FILE_BYTES} bytes")));
    }
    std::fs::read_to_string(path).map_err(|e| err(e.to_string()))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| IoError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

// ---------------------------------------------------------------- numbers

/// A real written as `{:.16e}`; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text = if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            "null".to_string()
        };
        RawValue::from_string(text)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum JsonComplex {
    Pair([f64; 2]),
    Real(f64),
}

impl JsonComplex {
    fn value(self) -> num_complex::Complex64 {
        match self {
            JsonComplex::Pair([re, im]) => c(re, im),
            JsonComplex::Real(re) => c(re, 0.0),
        }
    }
}

type JsonMatrix = Vec<Vec<JsonComplex>>;

fn to_cmatrix(rows: &JsonMatrix, what: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || n > MAX_DIM * MAX_DIM {
        return Err(IoError::Invalid(format!("{what}: {n} rows")));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(IoError::Invalid(format!("{what}: matrix is not square")));
    }
    let m = CMatrix::from_fn(n, n, |i, j| rows[i][j].value());
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(IoError::Invalid(format!("{what}: non-finite entry")));
    }
    Ok(m)
}

fn cmatrix_json(m: &CMatrix) -> Vec<Vec<[Sci; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [Sci(m[(i, j)].re), Sci(m[(i, j)].im)])
                .collect()
        })
        .collect()
}

fn rmatrix_json(m: &RMatrix) -> Vec<Vec<Sci>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Sci(m[(i, j)])).collect())
        .collect()
}

// ---------------------------------------------------------------- metadata

/// Loosely typed metadata value with reals in scientific notation.
#[derive(Debug, Clone, PartialEq)]
pub enum Meta {
    Str(String),
    Real(f64),
    Int(i64),
    Bool(bool),
    List(Vec<Meta>),
    Map(Metadata),
    Null,
}

impl Serialize for Meta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Meta::Str(x) => s.serialize_str(x),
            Meta::Real(x) => Sci(*x).serialize(s),
            Meta::Int(x) => s.serialize_i64(*x),
            Meta::Bool(x) => s.serialize_bool(*x),
            Meta::List(xs) => xs.serialize(s),
            Meta::Map(m) => m.serialize(s),
            Meta::Null => s.serialize_unit(),
        }
    }
}

impl From<&str> for Meta {
    fn from(x: &str) -> Self {
        Meta::Str(x.to_string())
    }
}

impl From<String> for Meta {
    fn from(x: String) -> Self {
        Meta::Str(x)
    }
}

impl From<f64> for Meta {
    fn from(x: f64) -> Self {
        Meta::Real(x)
    }
}

impl From<bool> for Meta {
    fn from(x: bool) -> Self {
        Meta::Bool(x)
    }
}

impl From<u64> for Meta {
    fn from(x: u64) -> Self {
        Meta::Int(x as i64)
    }
}

impl From<usize> for Meta {
    fn from(x: usize) -> Self {
        Meta::Int(x as i64)
    }
}

impl<T: Into<Meta>> From<Option<T>> for Meta {
    fn from(x: Option<T>) -> Self {
        x.map_or(Meta::Null, Into::into)
    }
}

pub type Metadata = BTreeMap<String, Meta>;

impl From<Metadata> for Meta {
    fn from(m: Metadata) -> Self {
        Meta::Map(m)
    }
}

impl From<&RMatrix> for Meta {
    fn from(m: &RMatrix) -> Self {
        Meta::List(
            m.row_iter()
                .map(|r| Meta::List(r.iter().map(|&x| Meta::Real(x)).collect()))
                .collect(),
        )
    }
}

impl From<&RVector> for Meta {
    fn from(v: &RVector) -> Self {
        Meta::List(v.iter().map(|&x| Meta::Real(x)).collect())
    }
}

// ---------------------------------------------------------------- frames

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameIn {
    #[serde(default)]
    id: Option<String>,
    d: usize,
    kind: String,
    #[serde(default)]
    c: Option<f64>,
    labels: Vec<String>,
    #[serde(rename = "F")]
    f: Vec<JsonMatrix>,
    #[serde(rename = "G")]
    g: Vec<JsonMatrix>,
    #[serde(default)]
    #[allow(dead_code)]
    validation: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct FrameOut<'a> {
    id: &'a str,
    d: usize,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<Sci>,
    labels: &'a [String],
    #[serde(rename = "F")]
    f: Vec<Vec<Vec<[Sci; 2]>>>,
    #[serde(rename = "G")]
    g: Vec<Vec<Vec<[Sci; 2]>>>,
    validation: ValidationOut,
}

#[derive(Serialize)]
struct ValidationOut {
    tol: Sci,
    passed: bool,
    checks: BTreeMap<String, CheckOut>,
}

#[derive(Serialize)]
struct CheckOut {
    max_violation: Sci,
    passed: bool,
}

fn validation_json(report: &ValidationReport) -> ValidationOut {
    ValidationOut {
        tol: Sci(report.tol),
        passed: report.passed(),
        checks: report
            .checks
            .iter()
            .map(|o| {
                (
                    o.check.to_string(),
                    CheckOut {
                        max_violation: Sci(o.max_violation),
                        passed: o.passed,
                    },
                )
            })
            .collect(),
    }
}

/// Unvalidated frame pair from JSON text.
pub fn parse_frame(text: &str) -> Result<(Frame, DualFrame)> {
    let raw: FrameIn = serde_json::from_str(text)?;
    if raw.d == 0 || raw.d > MAX_DIM {
        return Err(FrameError::UnsupportedDimension(raw.d).into());
    }
    let kind = match raw.kind.as_str() {
        "nqpr" => RepKind::Nqpr {
            c: raw
                .c
                .ok_or_else(|| IoError::Invalid("nqpr frame needs `c`".into()))?,
        },
        "sic" => RepKind::Sic,
        "custom" => RepKind::Custom,
        other => return Err(IoError::Invalid(format!("unknown kind `{other}`"))),
    };
    let convert = |ms: &[JsonMatrix], what: &str| -> Result<Vec<CMatrix>> {
        ms.iter()
            .enumerate()
            .map(|(k, m)| to_cmatrix(m, &format!("{what}[{k}]")))
            .collect()
    };
    let frame = Frame {
        id: raw.id.unwrap_or_else(|| format!("custom-d{}", raw.d)),
        d: raw.d,
        labels: raw.labels,
        ops: convert(&raw.f, "F")?,
        kind,
    };
    let dual = DualFrame {
        ops: convert(&raw.g, "G")?,
    };
    Ok((frame, dual))
}

/// Parses and validates a frame file.
pub fn load_representation(text: &str) -> Result<Representation> {
    let (frame, dual) = parse_frame(text)?;
    Ok(Representation::new(frame, dual)?)
}

pub fn frame_to_json(frame: &Frame, dual: &DualFrame, report: &ValidationReport) -> Result<String> {
    let (kind, cval) = match frame.kind {
        RepKind::Nqpr { c } => ("nqpr", Some(Sci(c))),
        RepKind::Sic => ("sic", None),
        RepKind::Custom => ("custom", None),
    };
    let out = FrameOut {
        id: &frame.id,
        d: frame.d,
        kind,
        c: cval,
        labels: &frame.labels,
        f: frame.ops.iter().map(cmatrix_json).collect(),
        g: dual.ops.iter().map(cmatrix_json).collect(),
        validation: validation_json(report),
    };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

/// Builtin frame names: `dw-qubit`, `sic-qubit`, `dw-qubits:L`.
pub fn builtin_frame(name: &str) -> Result<(Frame, DualFrame)> {
    match name {
        "dw-qubit" => Ok(frames::build_dw_qubit()),
        "sic-qubit" => Ok(frames::build_sic_qubit()),
        _ => {
            let count = name
                .strip_prefix("dw-qubits:")
                .and_then(|l| l.parse::<usize>().ok())
                .ok_or_else(|| IoError::Parse(format!("unknown frame kind `{name}`")))?;
            Ok(frames::build_dw_qubits(count)?)
        }
    }
}

// ---------------------------------------------------------------- states

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StateIn {
    Matrix { matrix: JsonMatrix },
    QubitParams { omega: f64, theta: f64, phi: f64 },
}

fn state_from(raw: StateIn) -> Result<DensityOperator> {
    match raw {
        StateIn::Matrix { matrix } => {
            let m = to_cmatrix(&matrix, "matrix")?;
            if m.nrows() > MAX_DIM {
                return Err(IoError::Invalid(format!(
                    "state dimension {} > {MAX_DIM}",
                    m.nrows()
                )));
            }
            Ok(DensityOperator::new(m, matcore::CHECK_TOL)?)
        }
        StateIn::QubitParams { omega, theta, phi } => {
            if ![omega, theta, phi].iter().all(|x| x.is_finite()) {
                return Err(IoError::Invalid("angles must be finite".into()));
            }
            Ok(hilbert::qubit_state(QubitStateParams::new(
                omega, theta, phi,
            )))
        }
    }
}

pub fn parse_state(text: &str) -> Result<DensityOperator> {
    state_from(serde_json::from_str(text)?)
}

pub fn state_to_json(rho: &DensityOperator) -> Result<String> {
    #[derive(Serialize)]
    struct Out {
        kind: &'static str,
        matrix: Vec<Vec<[Sci; 2]>>,
    }
    Ok(serde_json::to_string_pretty(&Out {
        kind: "matrix",
        matrix: cmatrix_json(rho.matrix()),
    })? + "\n")
}

// ---------------------------------------------------------------- channels

#[derive(Deserialize)]
#[serde(untagged)]
enum AncillaIn {
    Spec(String),
    State(StateIn),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ChannelIn {
    Kraus {
        #[serde(default)]
        d: Option<usize>,
        kraus: Vec<JsonMatrix>,
    },
    Dilation {
        #[serde(rename = "U")]
        u: JsonMatrix,
        beta: AncillaIn,
    },
    Builtin {
        name: String,
        #[serde(default)]
        ancilla: Option<AncillaIn>,
    },
}

/// A channel together with a short description of where it came from.
#[derive(Debug, Clone)]
pub struct LoadedChannel {
    pub channel: KrausChannel,
    pub source: String,
}

fn ancilla_from(a: AncillaIn) -> Result<DensityOperator> {
    match a {
        AncillaIn::Spec(s) => parse_ancilla_spec(&s),
        AncillaIn::State(s) => state_from(s),
    }
}

pub fn parse_channel(text: &str) -> Result<LoadedChannel> {
    let raw: ChannelIn = serde_json::from_str(text)?;
    let tol = matcore::CHECK_TOL;
    match raw {
        ChannelIn::Kraus { d, kraus } => {
            if kraus.is_empty() || kraus.len() > MAX_ENTRIES {
                return Err(IoError::Invalid(format!("{} Kraus operators", kraus.len())));
            }
            let ops = kraus
                .iter()
                .enumerate()
                .map(|(k, m)| to_cmatrix(m, &format!("kraus[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            if let Some(d) = d {
                if ops[0].nrows() != d {
                    return Err(IoError::Invalid(format!(
                        "declared d = {d} but operators are {}x{}",
                        ops[0].nrows(),
                        ops[0].nrows()
                    )));
                }
            }
            Ok(LoadedChannel {
                channel: KrausChannel::new(ops, tol)?,
                source: "kraus".into(),
            })
        }
        ChannelIn::Dilation { u, beta } => {
            let u = to_cmatrix(&u, "U")?;
            let beta = ancilla_from(beta)?;
            if u.nrows() % beta.d() != 0 || u.nrows() / beta.d() > MAX_DIM {
                return Err(IoError::Invalid(
                    "U does not factor as system ⊗ ancilla".into(),
                ));
            }
            Ok(LoadedChannel {
                channel: hilbert::channel_from_dilation(&DilationSpec { u, beta }, tol)?,
                source: "dilation".into(),
            })
        }
        ChannelIn::Builtin { name, ancilla } => {
            let beta = ancilla.map(ancilla_from).transpose()?;
            builtin(&name, beta.as_ref())
        }
    }
}

pub fn builtin(name: &str, ancilla: Option<&DensityOperator>) -> Result<LoadedChannel> {
    let channel = hilbert::builtin_channel(name, ancilla)?;
    Ok(LoadedChannel {
        channel,
        source: format!("builtin:{name}"),
    })
}

// ---------------------------------------------------------------- specs

/// Angle in radians: a number, or a multiple of pi such as `pi/16`,
/// `3pi/5`, `7*pi/16` or `-pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|ch| !ch.is_whitespace())
        .collect();
    let bad = || IoError::Parse(format!("bad angle `{s}`"));
    if t.is_empty() || t.len() > 64 {
        return Err(bad());
    }
    let value = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| bad())?,
        Some(at) => {
            let head = t[..at].trim_end_matches('*');
            let tail = &t[at + 2..];
            let coef = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().map_err(|_| bad())?,
            };
            let den = match tail {
                "" => 1.0,
                _ => tail
                    .strip_prefix('/')
                    .ok_or_else(bad)?
                    .parse::<f64>()
                    .map_err(|_| bad())?,
            };
            if den == 0.0 {
                return Err(bad());
            }
            coef * std::f64::consts::PI / den
        }
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Three comma-separated angles `ω,θ,φ`.
pub fn parse_angles(s: &str) -> Result<QubitStateParams> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(IoError::Parse(format!("expected ω,θ,φ but got `{s}`")));
    }
    Ok(QubitStateParams::new(
        parse_angle(parts[0])?,
        parse_angle(parts[1])?,
        parse_angle(parts[2])?,
    ))
}

/// Ancilla spec: `0`, `1`, `+`, `-` or angles `ω,θ,φ`.
pub fn parse_ancilla_spec(s: &str) -> Result<DensityOperator> {
    match s.trim() {
        "0" => Ok(hilbert::ket0()),
        "1" => Ok(hilbert::ket1()),
        "+" => Ok(hilbert::ket_plus()),
        "-" => Ok(hilbert::ket_minus()),
        other => Ok(hilbert::qubit_state(parse_angles(other)?)),
    }
}

// ---------------------------------------------------------------- QPR objects

#[derive(Deserialize)]
#[serde(untagged)]
enum EntriesIn {
    Matrix(Vec<Vec<f64>>),
    Vector(Vec<f64>),
}

#[derive(Deserialize)]
struct QprIn {
    rep: String,
    shape: Vec<usize>,
    entries: EntriesIn,
    #[serde(default)]
    #[allow(dead_code)]
    metadata: Option<serde_json::Value>,
}

/// Matrix or vector read from a QPR object file.
#[derive(Debug, Clone, PartialEq)]
pub enum QprObject {
    Matrix(QuasiStochasticMatrix),
    Vector(QuasiVector),
}

pub fn parse_qpr_object(text: &str) -> Result<QprObject> {
    let raw: QprIn = serde_json::from_str(text)?;
    let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
    match (raw.entries, raw.shape.as_slice()) {
        (EntriesIn::Vector(v), [n]) => {
            if v.len() != *n || v.is_empty() || v.len() > MAX_ENTRIES || !finite(&v) {
                return Err(IoError::Invalid(format!(
                    "vector shape [{n}] does not match {} entries",
                    v.len()
                )));
            }
            Ok(QprObject::Vector(QuasiVector::new(raw.rep, v)))
        }
        (EntriesIn::Matrix(rows), [r, cols]) => {
            let n = rows.len();
            if n != *r || n != *cols || n == 0 || n > MAX_ENTRIES {
                return Err(IoError::Invalid(format!(
                    "matrix shape [{r}, {cols}] does not match a square {n}-row matrix"
                )));
            }
            if rows.iter().any(|row| row.len() != n || !finite(row)) {
                return Err(IoError::Invalid("ragged or non-finite matrix".into()));
            }
            let m = RMatrix::from_fn(n, n, |i, j| rows[i][j]);
            Ok(QprObject::Matrix(QuasiStochasticMatrix::new(raw.rep, m)))
        }
        (_, shape) => Err(IoError::Invalid(format!(
            "shape {shape:?} does not match entries"
        ))),
    }
}

#[derive(Serialize)]
struct QprOut<'a, E: Serialize> {
    rep: &'a str,
    shape: Vec<usize>,
    entries: E,
    metadata: &'a Metadata,
}

pub fn matrix_to_json(rep: &str, m: &RMatrix, metadata: &Metadata) -> Result<String> {
    let out = QprOut {
        rep,
        shape: vec![m.nrows(), m.ncols()],
        entries: rmatrix_json(m),
        metadata,
    };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

pub fn vector_to_json(rep: &str, v: &RVector, metadata: &Metadata) -> Result<String> {
    let out = QprOut {
        rep,
        shape: vec![v.len()],
        entries: v.iter().map(|&x| Sci(x)).collect::<Vec<_>>(),
        metadata,
    };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

/// Serializes any report structure with reals in scientific notation.
pub fn report_to_json(report: &Metadata) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::validate_frame;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/16").unwrap(), PI / 16.0);
        assert_eq!(parse_angle("3pi/5").unwrap(), 3.0 * PI / 5.0);
        assert_eq!(parse_angle("7*pi/16").unwrap(), 7.0 * PI / 16.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("").is_err());
        let p = parse_angles("pi/16, pi/5, pi/8").unwrap();
        assert_eq!(p.theta, PI / 5.0);
        assert!(parse_angles("1,2").is_err());
    }

    #[test]
    fn frame_round_trip() {
        let (f, g) = frames::build_sic_qubit();
        let report = validate_frame(&f, &g, matcore::CHECK_TOL).unwrap();
        let text = frame_to_json(&f, &g, &report).unwrap();
        let rep = load_representation(&text).unwrap();
        assert_eq!(rep.id(), "sic-qubit");
        assert_eq!(rep.kind(), RepKind::Sic);
        for (a, b) in rep.frame.ops.iter().zip(&f.ops) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sci_has_seventeen_digits() {
        let text = serde_json::to_string(&Sci(0.1)).unwrap();
        assert_eq!(text, "1.0000000000000001e-1");
        assert_eq!(text.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn channel_variants() {
        let b = parse_channel(r#"{"kind":"builtin","name":"half_swap","ancilla":"1"}"#).unwrap();
        assert_eq!(b.source, "builtin:half_swap");
        let k = parse_channel(r#"{"kind":"kraus","d":2,"kraus":[[[1,0],[0,1]]]}"#).unwrap();
        assert_eq!(k.channel.d(), 2);
        let dil = parse_channel(
            r#"{"kind":"dilation","U":[[1,0,0,0],[0,0,1,0],[0,1,0,0],[0,0,0,1]],"beta":{"kind":"qubit_params","omega":0.3,"theta":1.0,"phi":0.2}}"#,
        )
        .unwrap();
        assert_eq!(dil.channel.d(), 2);
        assert!(parse_channel(r#"{"kind":"kraus","kraus":[[[0.5,0],[0,0.5]]]}"#).is_err());
        assert!(parse_channel(r#"{"kind":"kraus","kraus":[[[1,0]]]}"#).is_err());
        assert!(parse_channel(r#"{"kind":"builtin","name":"nope"}"#).is_err());
    }

    #[test]
    fn qpr_object_round_trip() {
        let m = RMatrix::from_row_slice(2, 2, &[0.25, 1.0 / 3.0, 0.75, 2.0 / 3.0]);
        let mut meta = Metadata::new();
        meta.insert("eps_used".into(), Meta::Null);
        let text = matrix_to_json("x", &m, &meta).unwrap();
        match parse_qpr_object(&text).unwrap() {
            QprObject::Matrix(q) => assert_eq!(q.entries, m),
            _ => panic!("expected matrix"),
        }
        let v = RVector::from_vec(vec![0.5, -0.25, 0.75]);
        match parse_qpr_object(&vector_to_json("x", &v, &meta).unwrap()).unwrap() {
            QprObject::Vector(q) => assert_eq!(q.entries, v),
            _ => panic!("expected vector"),
        }
        assert!(parse_qpr_object(r#"{"rep":"x","shape":[3],"entries":[1,2]}"#).is_err());
        assert!(parse_qpr_object(r#"{"rep":"x","shape":[2,2],"entries":[[1,2],[3]]}"#).is_err());
    }

    #[test]
    fn states() {
        let s = parse_state(r#"{"kind":"matrix","matrix":[[0.5,0.5],[0.5,0.5]]}"#).unwrap();
        assert_eq!(s.d(), 2);
        assert!(parse_state(r#"{"kind":"matrix","matrix":[[1,0],[0,1]]}"#).is_err());
        let back = parse_state(&state_to_json(&s).unwrap()).unwrap();
        assert!(matcore::approx_eq(back.matrix(), s.matrix(), 1e-15));
    }
}
