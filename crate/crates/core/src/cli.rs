//! Command-line front end. Owns all file I/O.
//!
//! Exit codes: 0 on success, 1 when validation or verification fails, 2 for
//! usage and parse errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::frames::{validate_frame, RepKind, Representation};
use crate::graphs::{self, EmitOptions};
use crate::hilbert::{self, DensityOperator, KrausChannel};
use crate::io::{self, IoError, LoadedChannel, Meta, Metadata, QprObject};
use crate::matcore::{self, max_diff_real, CMatrix, RMatrix, ORACLE_TOL};
use crate::qprcore::{self, PetzOptions, PetzQpr, QprError, QuasiStochasticMatrix, QuasiVector};
use crate::verify::{self, Suite};

pub const DEFAULT_EPS: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "qbret",
    version,
    about = "Petz retrodiction in quasiprobability representations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or check a frame and write it with its validation report.
    Frame,
    /// Representation of a channel (matrix) or a state (vector).
    Repr {
        /// State file to represent instead of a channel.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Petz retrodiction matrix, cross-checked against the Hilbert-space map.
    Petz {
        /// Matrix-only input: a channel matrix file. Disables the cross-check.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Prior vector file for matrix-only input.
        #[arg(long)]
        bubbles: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Classical Bayes on the representation against the Petz map.
    Compare,
    /// Transition graph in DOT or SVG.
    Graph {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        bubbles: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "forward")]
        direction: GraphDirection,
        /// Edges with |w| at or below this are omitted.
        #[arg(long, default_value_t = graphs::DEFAULT_CUTOFF)]
        cutoff: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphDirection {
    Forward,
    Retro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepFlag {
    /// Normal representation, adjoint Sᵀ.
    Nq,
    /// SIC representation, adjoint Sᵀ + K.
    Sp,
    /// Adjoint from the Hilbert-space channel.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Svg,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Frame file.
    #[arg(long, global = true, conflicts_with = "kind")]
    pub frame: Option<PathBuf>,
    /// Builtin frame: dw-qubit, sic-qubit or dw-qubits:L.
    #[arg(long, global = true)]
    pub kind: Option<String>,
    /// Channel file.
    #[arg(long, global = true, conflicts_with = "builtin")]
    pub channel: Option<PathBuf>,
    /// Builtin channel name.
    #[arg(long, global = true)]
    pub builtin: Option<String>,
    /// Ancilla for two-qubit builtins: 0, 1, +, - or ω,θ,φ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ancilla: Option<String>,
    /// Prior state file.
    #[arg(long, global = true, conflicts_with = "angles")]
    pub prior: Option<PathBuf>,
    /// Prior as ω,θ,φ (numbers or multiples of pi) or one of 0, 1, +, -.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Adjoint route; must agree with the frame kind unless `custom`.
    #[arg(long, global = true, value_enum)]
    pub rep: Option<RepFlag>,
    /// Starting regularization weight for singular posteriors; 0 disables it.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS, allow_negative_numbers = true)]
    pub eps: f64,
    /// Tolerance for validation and oracle cross-checks.
    #[arg(long, global = true, env = "QBRET_TOL", allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Seed for randomized verification cases.
    #[arg(long, global = true, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; json by default, dot for graphs.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] IoError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Qpr(#[from] QprError),
    #[error(transparent)]
    Hilbert(#[from] hilbert::HilbertError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Validation(_) | CliError::Qpr(_) | CliError::Hilbert(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

impl From<graphs::GraphError> for CliError {
    fn from(e: graphs::GraphError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<i32> {
    let o = &cli.opts;
    if !(o.eps >= 0.0 && o.eps < 1.0) {
        return Err(CliError::Usage(format!(
            "--eps must lie in [0, 1), got {}",
            o.eps
        )));
    }
    if let Some(t) = o.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }
    match &cli.command {
        Command::Frame => cmd_frame(o),
        Command::Repr { state } => cmd_repr(o, state.as_deref()),
        Command::Petz { matrix, bubbles } => cmd_petz(o, matrix.as_deref(), bubbles.as_deref()),
        Command::Verify { suite } => cmd_verify(o, suite),
        Command::Compare => cmd_compare(o),
        Command::Graph {
            matrix,
            bubbles,
            direction,
            cutoff,
        } => cmd_graph(
            o,
            matrix.as_deref(),
            bubbles.as_deref(),
            *direction,
            *cutoff,
        ),
    }
}

impl Options {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(ORACLE_TOL)
    }

    fn format(&self, allowed: &[Format], default: Format) -> CliResult<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(CliError::Usage(format!(
                "format {} is not available for this command",
                f.to_possible_value()
                    .expect("no skipped variants")
                    .get_name()
            )));
        }
        Ok(f)
    }

    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(p) => io::write_file(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn representation(&self) -> CliResult<Representation> {
        let rep = match (&self.frame, &self.kind) {
            (Some(p), _) => io::load_representation(&io::read_file(p)?)?,
            (None, Some(k)) => {
                let (f, g) = io::builtin_frame(k)?;
                Representation::new(f, g).map_err(IoError::from)?
            }
            (None, None) => Representation::dw_qubit(),
        };
        match (self.rep, rep.kind()) {
            (Some(RepFlag::Nq), RepKind::Nqpr { .. })
            | (Some(RepFlag::Sp), RepKind::Sic)
            | (Some(RepFlag::Custom), _)
            | (None, _) => Ok(rep),
            (Some(flag), kind) => Err(CliError::Usage(format!(
                "--rep {} does not match a {} frame",
                flag.to_possible_value()
                    .expect("no skipped variants")
                    .get_name(),
                kind.tag()
            ))),
        }
    }

    fn channel(&self) -> CliResult<Option<LoadedChannel>> {
        let ancilla = self
            .ancilla
            .as_deref()
            .map(io::parse_ancilla_spec)
            .transpose()?;
        match (&self.channel, &self.builtin) {
            (Some(p), _) => {
                if ancilla.is_some() {
                    return Err(CliError::Usage(
                        "--ancilla applies to --builtin only".into(),
                    ));
                }
                Ok(Some(io::parse_channel(&io::read_file(p)?)?))
            }
            (None, Some(name)) => {
                if !hilbert::BUILTIN_NAMES.contains(&name.as_str()) {
                    return Err(CliError::Usage(format!(
                        "unknown builtin `{name}` (expected one of {})",
                        hilbert::BUILTIN_NAMES.join(", ")
                    )));
                }
                Ok(Some(io::builtin(name, ancilla.as_ref())?))
            }
            (None, None) => Ok(None),
        }
    }

    fn require_channel(&self) -> CliResult<LoadedChannel> {
        self.channel()?
            .ok_or_else(|| CliError::Usage("a channel is required (--channel or --builtin)".into()))
    }

    fn prior(&self) -> CliResult<Option<DensityOperator>> {
        match (&self.prior, &self.angles) {
            (Some(p), _) => Ok(Some(io::parse_state(&io::read_file(p)?)?)),
            (None, Some(a)) => Ok(Some(io::parse_ancilla_spec(a)?)),
            (None, None) => Ok(None),
        }
    }

    fn require_prior(&self) -> CliResult<DensityOperator> {
        self.prior()?
            .ok_or_else(|| CliError::Usage("a prior is required (--prior or --angles)".into()))
    }
}

fn check_dims(rep: &Representation, d: usize, what: &str) -> CliResult<()> {
    if rep.d() != d {
        return Err(CliError::Usage(format!(
            "{what} has dimension {d} but frame `{}` has dimension {}",
            rep.id(),
            rep.d()
        )));
    }
    Ok(())
}

fn cmd_frame(o: &Options) -> CliResult<i32> {
    o.format(&[Format::Json], Format::Json)?;
    let (frame, dual) = match (&o.frame, &o.kind) {
        (Some(p), _) => io::parse_frame(&io::read_file(p)?)?,
        (None, Some(k)) => io::builtin_frame(k)?,
        (None, None) => return Err(CliError::Usage("frame needs --kind or --frame".into())),
    };
    let report = validate_frame(&frame, &dual, o.tol()).map_err(IoError::from)?;
    if let Some(fail) = report.first_failure() {
        for c in &report.checks {
            eprintln!(
                "{} {}: {:.3e}",
                if c.passed { "ok  " } else { "FAIL" },
                c.check,
                c.max_violation
            );
        }
        return Err(CliError::Validation(format!(
            "{} (max violation {:.3e}, tolerance {:.1e})",
            fail.check,
            fail.max_violation,
            o.tol()
        )));
    }
    o.emit(&io::frame_to_json(&frame, &dual, &report)?)?;
    Ok(0)
}

fn base_metadata(rep: &Representation, object: &str) -> Metadata {
    let mut m = Metadata::new();
    m.insert("object".into(), object.into());
    m.insert("frame_kind".into(), rep.kind().tag().into());
    m.insert(
        "labels".into(),
        Meta::List(rep.frame.labels.iter().map(|l| l.as_str().into()).collect()),
    );
    m
}

const MATRIX_CONVENTION: &str = "entry [a'][a] maps input a (column) to output a' (row)";

fn cmd_repr(o: &Options, state: Option<&Path>) -> CliResult<i32> {
    o.format(&[Format::Json], Format::Json)?;
    let rep = o.representation()?;
    let channel = o.channel()?;
    let state = match state {
        Some(p) => Some(io::parse_state(&io::read_file(p)?)?),
        None => o.prior()?,
    };
    match (channel, state) {
        (Some(ch), None) => {
            check_dims(&rep, ch.channel.d(), "channel")?;
            let s = qprcore::channel_to_qpr(&ch.channel, &rep)?;
            let mut meta = base_metadata(&rep, "channel");
            meta.insert("source".into(), ch.source.into());
            meta.insert("convention".into(), MATRIX_CONVENTION.into());
            meta.insert("column_sum_defect".into(), s.column_sum_defect().into());
            meta.insert("row_sum_defect".into(), s.row_sum_defect().into());
            meta.insert("min_entry".into(), s.min_entry().into());
            meta.insert(
                "unital".into(),
                (ch.channel.unitality_defect() <= matcore::CHECK_TOL).into(),
            );
            o.emit(&io::matrix_to_json(rep.id(), &s.entries, &meta)?)?;
            Ok(0)
        }
        (None, Some(rho)) => {
            check_dims(&rep, rho.d(), "state")?;
            let v = qprcore::state_to_qpr(rho.matrix(), &rep)?;
            let mut meta = base_metadata(&rep, "state");
            meta.insert("sum".into(), v.sum().into());
            meta.insert("min_entry".into(), v.min().into());
            o.emit(&io::vector_to_json(rep.id(), &v.entries, &meta)?)?;
            Ok(0)
        }
        (Some(_), Some(_)) => Err(CliError::Usage(
            "repr takes either a channel or a state, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "repr needs a channel (--channel/--builtin) or a state (--state/--prior/--angles)"
                .into(),
        )),
    }
}

fn adjoint_tag(rep: &Representation, flag: Option<RepFlag>) -> &'static str {
    match (flag, rep.kind()) {
        (Some(RepFlag::Custom), _) | (_, RepKind::Custom) => "hilbert-adjoint",
        (_, RepKind::Sic) => "transpose-plus-k",
        (_, RepKind::Nqpr { .. }) => "transpose",
    }
}

/// Petz in the representation using the adjoint route selected by `--rep`.
fn petz_for(
    o: &Options,
    rep: &Representation,
    s: &QuasiStochasticMatrix,
    v: &QuasiVector,
    ch: Option<&KrausChannel>,
) -> CliResult<PetzQpr> {
    let opts = PetzOptions {
        eps: o.eps,
        ..Default::default()
    };
    let custom = o.rep == Some(RepFlag::Custom) || rep.kind() == RepKind::Custom;
    let petz = if custom {
        let ch = ch.ok_or(QprError::UnsupportedKind("custom"))?;
        let adj = qprcore::hilbert_adjoint_qpr(ch, rep)?;
        qprcore::petz_qpr_with_adjoint(s, &adj, v, rep, opts)?
    } else {
        qprcore::petz_qpr(s, v, rep, opts)?
    };
    if petz.flagged {
        eprintln!(
            "warning: regularized and exact-support results disagree (gaps: extrapolation {:?}, pseudo-inverse {:?})",
            petz.extrapolation_gap, petz.pinv_eps_gap
        );
    }
    Ok(petz)
}

fn petz_metadata(
    o: &Options,
    rep: &Representation,
    petz: &PetzQpr,
    s: &QuasiStochasticMatrix,
) -> CliResult<Metadata> {
    let (cols, fixed) = qprcore::retrodiction_defects(petz, s)?;
    let mut meta = base_metadata(rep, "petz");
    meta.insert("convention".into(), MATRIX_CONVENTION.into());
    meta.insert("adjoint".into(), adjoint_tag(rep, o.rep).into());
    meta.insert("route".into(), petz.route.tag().into());
    meta.insert("eps_requested".into(), o.eps.into());
    meta.insert("eps_used".into(), petz.eps_used.into());
    meta.insert("extrapolation_gap".into(), petz.extrapolation_gap.into());
    meta.insert("pinv_eps_gap".into(), petz.pinv_eps_gap.into());
    meta.insert("flagged".into(), petz.flagged.into());
    meta.insert("column_sum_defect".into(), cols.into());
    meta.insert("prior_fixed_point_defect".into(), fixed.into());
    meta.insert("prior".into(), (&petz.prior_used.entries).into());
    Ok(meta)
}

fn cmd_petz(o: &Options, matrix: Option<&Path>, bubbles: Option<&Path>) -> CliResult<i32> {
    o.format(&[Format::Json], Format::Json)?;
    let rep = o.representation()?;
    let tol = o.tol();

    if let Some(path) = matrix {
        let s = match io::parse_qpr_object(&io::read_file(path)?)? {
            QprObject::Matrix(m) => m,
            QprObject::Vector(_) => {
                return Err(CliError::Usage("--matrix file holds a vector".into()))
            }
        };
        let v = match bubbles {
            Some(p) => match io::parse_qpr_object(&io::read_file(p)?)? {
                QprObject::Vector(v) => v,
                QprObject::Matrix(_) => {
                    return Err(CliError::Usage("--bubbles file holds a matrix".into()))
                }
            },
            None => {
                return Err(CliError::Usage(
                    "matrix-only mode needs --bubbles (prior vector)".into(),
                ))
            }
        };
        eprintln!("warning: matrix-only input; the Hilbert-space cross-check is disabled");
        let petz = petz_for(o, &rep, &s, &v, None)?;
        let mut meta = petz_metadata(o, &rep, &petz, &s)?;
        meta.insert("oracle_check".into(), "disabled".into());
        meta.insert("oracle_deviation".into(), Meta::Null);
        o.emit(&io::matrix_to_json(rep.id(), &petz.matrix.entries, &meta)?)?;
        return Ok(0);
    }

    let ch = o.require_channel()?;
    let prior = o.require_prior()?;
    check_dims(&rep, ch.channel.d(), "channel")?;
    check_dims(&rep, prior.d(), "prior")?;
    let s = qprcore::channel_to_qpr(&ch.channel, &rep)?;
    let v = qprcore::state_to_qpr(prior.matrix(), &rep)?;
    let petz = petz_for(o, &rep, &s, &v, Some(&ch.channel))?;
    let oracle = qprcore::oracle_petz(&ch.channel, &prior, &petz, &rep)?;
    let deviation = max_diff_real(&petz.matrix.entries, &oracle.entries);

    let mut meta = petz_metadata(o, &rep, &petz, &s)?;
    meta.insert("source".into(), ch.source.into());
    meta.insert("oracle_check".into(), "enabled".into());
    meta.insert("oracle_deviation".into(), deviation.into());
    meta.insert("tolerance".into(), tol.into());
    if deviation.is_nan() || deviation > tol {
        return Err(CliError::Validation(format!(
            "representation and Hilbert-space Petz maps differ by {deviation:.3e} (tolerance {tol:.1e})"
        )));
    }
    o.emit(&io::matrix_to_json(rep.id(), &petz.matrix.entries, &meta)?)?;
    Ok(0)
}

fn cmd_verify(o: &Options, suite: &str) -> CliResult<i32> {
    o.format(&[Format::Json], Format::Json)?;
    let suite: Suite = suite.parse().map_err(CliError::Usage)?;
    let report = verify::run(suite, o.seed);
    print!("{}", report.text());
    if let Some(p) = &o.out {
        io::write_file(p, &report.json())?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

/// The six Pauli eigenstates as (name, state) pairs.
pub fn pauli_eigenstates() -> Vec<(&'static str, DensityOperator)> {
    use std::f64::consts::FRAC_PI_2;
    let q = |theta: f64, phi: f64| {
        hilbert::qubit_state(hilbert::QubitStateParams::new(FRAC_PI_2, theta, phi))
    };
    vec![
        ("0", hilbert::ket0()),
        ("1", hilbert::ket1()),
        ("+", hilbert::ket_plus()),
        ("-", hilbert::ket_minus()),
        ("+i", q(FRAC_PI_2, FRAC_PI_2)),
        ("-i", q(FRAC_PI_2, -FRAC_PI_2)),
    ]
}

fn cmd_compare(o: &Options) -> CliResult<i32> {
    o.format(&[Format::Json], Format::Json)?;
    let rep = o.representation()?;
    let ch = o.require_channel()?;
    let prior = o.require_prior()?;
    check_dims(&rep, ch.channel.d(), "channel")?;
    check_dims(&rep, prior.d(), "prior")?;
    let s = qprcore::channel_to_qpr(&ch.channel, &rep)?;
    let v = qprcore::state_to_qpr(prior.matrix(), &rep)?;
    let petz = petz_for(o, &rep, &s, &v, Some(&ch.channel))?;
    let classical = qprcore::classical_bayes(&s.entries, &v.entries, o.eps)?;
    let diff: RMatrix = &classical.matrix - &petz.matrix.entries;

    let mut scan = Vec::new();
    let mut flagged = 0usize;
    if rep.d() == 2 {
        let states = pauli_eigenstates();
        for (in_name, rho) in &states {
            let vin = qprcore::state_to_qpr(rho.matrix(), &rep)?;
            let out_cl = &classical.matrix * &vin.entries;
            let out_petz = &petz.matrix.entries * &vin.entries;
            for (eff_name, e) in &states {
                let vbar = qprcore::povm_to_qpr(e.matrix(), &rep)?;
                let b_cl = out_cl.dot(&vbar.entries);
                let b_petz = out_petz.dot(&vbar.entries);
                let outside = !(-1e-12..=1.0 + 1e-12).contains(&b_cl);
                if outside {
                    flagged += 1;
                }
                let mut row = Metadata::new();
                row.insert("input".into(), (*in_name).into());
                row.insert("effect".into(), (*eff_name).into());
                row.insert("classical".into(), b_cl.into());
                row.insert("petz".into(), b_petz.into());
                row.insert("outside_unit_interval".into(), outside.into());
                scan.push(Meta::Map(row));
            }
        }
    }

    let mut out = base_metadata(&rep, "comparison");
    out.insert("rep".into(), rep.id().into());
    out.insert("source".into(), ch.source.into());
    out.insert("petz".into(), (&petz.matrix.entries).into());
    out.insert("petz_route".into(), petz.route.tag().into());
    out.insert("classical".into(), (&classical.matrix).into());
    out.insert("classical_eps_used".into(), classical.eps_used.into());
    out.insert("difference".into(), (&diff).into());
    out.insert(
        "max_abs_difference".into(),
        matcore::max_abs_real(&diff).into(),
    );
    out.insert("born_scan".into(), Meta::List(scan));
    out.insert("born_violations".into(), flagged.into());
    o.emit(&io::report_to_json(&out)?)?;
    Ok(0)
}

fn cmd_graph(
    o: &Options,
    matrix: Option<&Path>,
    bubbles: Option<&Path>,
    direction: GraphDirection,
    cutoff: f64,
) -> CliResult<i32> {
    let format = o.format(&[Format::Dot, Format::Svg], Format::Dot)?;
    if cutoff.is_nan() || cutoff < 0.0 {
        return Err(CliError::Usage("--cutoff must be nonnegative".into()));
    }
    let mut labels = None;
    let graph = if let Some(path) = matrix {
        let s = match io::parse_qpr_object(&io::read_file(path)?)? {
            QprObject::Matrix(m) => m,
            QprObject::Vector(_) => {
                return Err(CliError::Usage("--matrix file holds a vector".into()))
            }
        };
        let v = match bubbles {
            Some(p) => match io::parse_qpr_object(&io::read_file(p)?)? {
                QprObject::Vector(v) => v,
                QprObject::Matrix(_) => {
                    return Err(CliError::Usage("--bubbles file holds a matrix".into()))
                }
            },
            None => return Err(CliError::Usage("--matrix needs --bubbles".into())),
        };
        match direction {
            GraphDirection::Forward => graphs::forward_graph(&s, &v)?,
            GraphDirection::Retro => graphs::retro_graph(&s, &v)?,
        }
    } else {
        let rep = o.representation()?;
        let ch = o.require_channel()?;
        check_dims(&rep, ch.channel.d(), "channel")?;
        labels = Some(rep.frame.labels.clone());
        let s = qprcore::channel_to_qpr(&ch.channel, &rep)?;
        match direction {
            GraphDirection::Forward => {
                let d = rep.d();
                let mixed = ch
                    .channel
                    .apply_op(&CMatrix::identity(d, d).unscale(d as f64))?;
                let image = qprcore::state_to_qpr(&mixed, &rep)?;
                graphs::forward_graph(&s, &image)?
            }
            GraphDirection::Retro => {
                let prior = o.require_prior()?;
                check_dims(&rep, prior.d(), "prior")?;
                let v = qprcore::state_to_qpr(prior.matrix(), &rep)?;
                let petz = petz_for(o, &rep, &s, &v, Some(&ch.channel))?;
                graphs::retro_graph(&petz.matrix, &petz.prior_used)?
            }
        }
    };
    let graph = match labels {
        Some(l) => graph.with_labels(l),
        None => graph,
    };
    let opts = EmitOptions {
        cutoff,
        ..Default::default()
    };
    let text = match format {
        Format::Dot => graphs::emit_dot(&graph, &opts),
        Format::Svg => graphs::emit_svg(&graph, &opts),
        Format::Json => unreachable!("rejected above"),
    };
    o.emit(&text)?;
    Ok(0)
}
