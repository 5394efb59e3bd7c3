//! Verification suites: numerical invariants checked against the Hilbert
//! oracle and against known closed forms.
//!
//! Randomized cases fan out over rayon. Case `i` of a suite draws from
//! `random::case_rng(seed, i)`, so results do not depend on scheduling.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::frames::{validate_frame, Representation};
use crate::hilbert::{self, DensityOperator, KrausChannel, QubitStateParams};
use crate::io::{self, Meta, Metadata};
use crate::matcore::{self, c, max_diff_real, CMatrix, RMatrix, CHECK_TOL};
use crate::qprcore::{self, PetzOptions, QuasiStochasticMatrix, RVector};
use crate::random;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Frames,
    Mmatrix,
    Powers,
    Commute,
    Classical,
    Counterexamples,
    Reference,
    Unitary,
    Erasure,
    Kmatrix,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Frames,
        Suite::Mmatrix,
        Suite::Powers,
        Suite::Commute,
        Suite::Classical,
        Suite::Counterexamples,
        Suite::Reference,
        Suite::Unitary,
        Suite::Erasure,
        Suite::Kmatrix,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Frames => "frames",
            Suite::Mmatrix => "mmatrix",
            Suite::Powers => "powers",
            Suite::Commute => "commute",
            Suite::Classical => "classical",
            Suite::Counterexamples => "counterexamples",
            Suite::Reference => "reference",
            Suite::Unitary => "unitary",
            Suite::Erasure => "erasure",
            Suite::Kmatrix => "kmatrix",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `value < threshold`.
    Below,
    /// Passes when `value > threshold`.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub cases: usize,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    fn new(
        suite: Suite,
        name: impl Into<String>,
        value: f64,
        threshold: f64,
        bound: Bound,
    ) -> Self {
        let passed = match bound {
            Bound::Below => value < threshold,
            Bound::Above => value > threshold,
        };
        Check {
            suite: suite.name(),
            name: name.into(),
            value,
            threshold,
            bound,
            cases: 1,
            passed,
            detail: None,
        }
    }

    fn below(suite: Suite, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(suite, name, value, threshold, Bound::Below)
    }

    fn cases(mut self, n: usize) -> Self {
        self.cases = n;
        self
    }

    fn failed(suite: Suite, name: impl Into<String>, threshold: f64, err: String) -> Self {
        let mut check = Self::below(suite, name, f64::INFINITY, threshold);
        check.detail = Some(err);
        check
    }

    pub fn line(&self) -> String {
        let op = match self.bound {
            Bound::Below => "<",
            Bound::Above => ">",
        };
        let mut line = format!(
            "{} {}/{}: {:.3e} {op} {:.1e} ({} case{})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.threshold,
            self.cases,
            if self.cases == 1 { "" } else { "s" }
        );
        if let Some(d) = &self.detail {
            line.push_str(&format!(" [{d}]"));
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn text(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            failed
        ));
        out
    }

    pub fn json(&self) -> String {
        let mut top = Metadata::new();
        top.insert("seed".into(), self.seed.into());
        top.insert("passed".into(), self.passed().into());
        let checks = self
            .checks
            .iter()
            .map(|c| {
                Meta::List(vec![
                    format!("{}/{}", c.suite, c.name).into(),
                    c.value.into(),
                    c.threshold.into(),
                    c.passed.into(),
                    c.cases.into(),
                    c.detail.clone().into(),
                ])
            })
            .collect();
        top.insert(
            "columns".into(),
            Meta::List(
                ["check", "value", "threshold", "passed", "cases", "detail"]
                    .iter()
                    .map(|&s| s.into())
                    .collect(),
            ),
        );
        top.insert("checks".into(), Meta::List(checks));
        io::report_to_json(&top).expect("metadata always serializes")
    }
}

/// Worst value of `f` over `count` independent cases, or the first error.
fn worst<F>(count: usize, f: F) -> Result<f64, String>
where
    F: Fn(u64) -> Result<f64, String> + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(&f)
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Like [`worst`] for cases producing several tracked values.
fn worst_n<const N: usize, F>(count: usize, f: F) -> Result<[f64; N], String>
where
    F: Fn(u64) -> Result<[f64; N], String> + Sync,
{
    (0..count as u64).into_par_iter().map(&f).try_reduce(
        || [0.0; N],
        |a, b| {
            let mut out = a;
            for (o, x) in out.iter_mut().zip(b) {
                *o = o.max(x);
            }
            Ok(out)
        },
    )
}

fn frames() -> Vec<Representation> {
    vec![Representation::dw_qubit(), Representation::sic_qubit()]
}

fn short(rep: &Representation) -> &'static str {
    match rep.id() {
        "dw-qubit" => "dw",
        "sic-qubit" => "sic",
        _ => "custom",
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Known closed forms used as fixed reference values.
pub mod expected {
    use super::*;

    fn m4(rows: [[f64; 4]; 4]) -> RMatrix {
        RMatrix::from_fn(4, 4, |i, j| rows[i][j])
    }

    /// Petz retrodiction of the half-SWAP channel (ancilla |1⟩) at prior |+⟩, DW frame.
    pub fn half_swap_petz_dw() -> RMatrix {
        let h = 0.5;
        m4([[h; 4], [h; 4], [0.0; 4], [0.0; 4]])
    }

    /// Same retrodiction in the SIC frame.
    pub fn half_swap_petz_sic() -> RMatrix {
        let s3 = 3f64.sqrt();
        let a = (s3 + 3.0) / 12.0;
        let b = (3.0 - s3) / 12.0;
        m4([[a; 4], [a; 4], [b; 4], [b; 4]])
    }

    /// Classical Bayes on the DW half-SWAP matrix at prior |+⟩.
    pub fn half_swap_classical_dw() -> RMatrix {
        let r2 = 2f64.sqrt();
        m4([
            [1.0, (3.0 - r2) / 7.0, 1.0, (3.0 + r2) / 7.0],
            [0.0, (4.0 + r2) / 7.0, 0.0, (4.0 - r2) / 7.0],
            [0.0; 4],
            [0.0; 4],
        ])
    }

    /// Classical Bayes on the SIC half-SWAP matrix at prior |+⟩, rounded to three figures.
    pub fn half_swap_classical_sic_rounded() -> RMatrix {
        m4([
            [0.925, 0.183, -0.264, 0.353],
            [0.0744, 0.744, 0.275, 0.168],
            [-0.0191, 0.0491, 0.915, 0.0947],
            [0.0199, 0.0233, 0.0737, 0.384],
        ])
    }

    /// Hadamard channel, identical in the DW and SIC frames.
    pub fn hadamard() -> RMatrix {
        m4([
            [1.0, 1.0, 1.0, -1.0],
            [1.0, -1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, 1.0],
            [-1.0, 1.0, 1.0, 1.0],
        ])
        .scale(0.5)
    }

    pub fn u_eg_dw() -> RMatrix {
        let s = 3f64.sqrt();
        m4([
            [9.0, s - 6.0, 4.0 - 3.0 * s, 2.0 * s + 9.0],
            [-s - 6.0, 9.0, 9.0 - 2.0 * s, 3.0 * s + 4.0],
            [3.0 * s + 4.0, 2.0 * s + 9.0, -3.0, 6.0 - 5.0 * s],
            [9.0 - 2.0 * s, 4.0 - 3.0 * s, 5.0 * s + 6.0, -3.0],
        ])
        .scale(1.0 / 16.0)
    }

    pub fn u_eg_sic() -> RMatrix {
        let s = 3f64.sqrt();
        m4([
            [-3.0, 5.0 * s + 6.0, 4.0 - 3.0 * s, 9.0 - 2.0 * s],
            [6.0 - 5.0 * s, -3.0, 2.0 * s + 9.0, 3.0 * s + 4.0],
            [3.0 * s + 4.0, 9.0 - 2.0 * s, 9.0, -s - 6.0],
            [2.0 * s + 9.0, 4.0 - 3.0 * s, s - 6.0, 9.0],
        ])
        .scale(1.0 / 16.0)
    }

    /// Row of the SIC K-correction for the half-SWAP channel (ancilla |1⟩).
    pub fn half_swap_k_row_sic() -> [f64; 4] {
        let x = 1.0 / (4.0 * 3f64.sqrt());
        [-x, x, -x, x]
    }

    /// `(S̃ v⁺)·v̄⁰` in DW for the rotation `ry_pi3` under classical Bayes at prior |+⟩.
    pub fn born_flag_dw() -> f64 {
        (1.0 + 3f64.sqrt()) / 2.0
    }

    /// `(S̃ v⁰)·v̄⁺` in SIC for the same construction.
    pub fn born_flag_sic() -> f64 {
        (2.0 - 5.0 * 3f64.sqrt()) / 13.0
    }

    /// Ancilla and prior of the erasure scenario.
    pub fn erasure_ancilla() -> QubitStateParams {
        QubitStateParams::new(7.0 * PI / 16.0, 3.0 * PI / 5.0, PI / 6.0)
    }

    pub fn erasure_prior() -> QubitStateParams {
        QubitStateParams::new(PI / 16.0, PI / 5.0, PI / 8.0)
    }
}

pub fn run(suite: Suite, seed: u64) -> Report {
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let checks = suites
        .par_iter()
        .map(|&s| run_one(s, seed))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Report { seed, checks }
}

fn run_one(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Frames => suite_frames(),
        Suite::Mmatrix => suite_mmatrix(seed),
        Suite::Powers => suite_powers(seed),
        Suite::Commute => suite_commute(seed),
        Suite::Classical => suite_classical(seed),
        Suite::Counterexamples => suite_counterexamples(),
        Suite::Reference => suite_reference(),
        Suite::Unitary => suite_unitary(seed),
        Suite::Erasure => suite_erasure(),
        Suite::Kmatrix => suite_kmatrix(),
        Suite::All => unreachable!("expanded by run"),
    }
}

fn suite_frames() -> Vec<Check> {
    let s = Suite::Frames;
    ["dw-qubit", "sic-qubit", "dw-qubits:2"]
        .iter()
        .map(|&name| {
            let outcome = io::builtin_frame(name)
                .map_err(err)
                .and_then(|(f, g)| validate_frame(&f, &g, CHECK_TOL).map_err(err));
            match outcome {
                Ok(report) => {
                    let worst = report
                        .checks
                        .iter()
                        .map(|c| c.max_violation)
                        .fold(0.0, f64::max);
                    Check::below(s, name, worst, CHECK_TOL)
                }
                Err(e) => Check::failed(s, name, CHECK_TOL, e),
            }
        })
        .collect()
}

pub const MMATRIX_CASES: usize = 200;

fn suite_mmatrix(seed: u64) -> Vec<Check> {
    let s = Suite::Mmatrix;
    let mut out = Vec::new();
    for rep in frames() {
        let tag = short(&rep);
        let symmetric = matches!(rep.kind(), crate::frames::RepKind::Nqpr { .. });
        let result = worst_n::<4, _>(MMATRIX_CASES, |i| {
            let rho = random::density(&mut random::case_rng(seed, i), rep.d());
            let v = qprcore::state_to_qpr(rho.matrix(), &rep).map_err(err)?;
            let m = qprcore::x_matrix(&v, &rep.xi).map_err(err)?;
            let spec = matcore::schur(&matcore::to_complex(&m.entries)).map_err(err)?;
            let neg = spec
                .eigenvalues
                .iter()
                .map(|z| (-z.re).max(z.im.abs()))
                .fold(0.0, f64::max);
            let trace = (m.entries.trace() - 1.0).abs();
            let asym = if symmetric {
                max_diff_real(&m.entries, &m.entries.transpose())
            } else {
                0.0
            };
            Ok([m.imag_residue, neg, trace, asym])
        });
        let names = ["imag-residue", "negative-eigenvalue", "trace", "asymmetry"];
        let limits = [1e-10, 1e-9, 1e-10, 1e-10];
        match result {
            Ok(vals) => {
                for k in 0..4 {
                    if k == 3 && !symmetric {
                        continue;
                    }
                    out.push(
                        Check::below(s, format!("{tag}/{}", names[k]), vals[k], limits[k])
                            .cases(MMATRIX_CASES),
                    );
                }
            }
            Err(e) => out.push(Check::failed(s, format!("{tag}/imag-residue"), 1e-10, e)),
        }
    }
    out
}

pub const POWER_CASES: usize = 50;
pub const POWERS: [f64; 4] = [2.0, 0.5, -0.5, -1.0];

fn suite_powers(seed: u64) -> Vec<Check> {
    let s = Suite::Powers;
    let mut out = Vec::new();
    for rep in frames() {
        for r in POWERS {
            let name = format!("{}/r={r}", short(&rep));
            let result = worst(POWER_CASES, |i| {
                let rho = random::full_rank_density(&mut random::case_rng(seed, i), rep.d());
                let v = qprcore::state_to_qpr(rho.matrix(), &rep).map_err(err)?;
                Ok(qprcore::m_power_check(&v, &rep, r, CHECK_TOL)
                    .map_err(err)?
                    .deviation)
            });
            out.push(match result {
                Ok(v) => Check::below(s, name, v, 1e-8).cases(POWER_CASES),
                Err(e) => Check::failed(s, name, 1e-8, e),
            });
        }
    }
    out
}

pub const COMMUTE_CASES: usize = 200;

/// Petz in the representation, its oracle, and the retrodiction defects.
fn petz_case(
    ch: &KrausChannel,
    prior: &DensityOperator,
    rep: &Representation,
) -> Result<(QuasiStochasticMatrix, [f64; 3]), String> {
    let s = qprcore::channel_to_qpr(ch, rep).map_err(err)?;
    let v = qprcore::state_to_qpr(prior.matrix(), rep).map_err(err)?;
    let petz = qprcore::petz_qpr(&s, &v, rep, PetzOptions::default()).map_err(err)?;
    let oracle = qprcore::oracle_petz(ch, prior, &petz, rep).map_err(err)?;
    let (cols, fixed) = qprcore::retrodiction_defects(&petz, &s).map_err(err)?;
    let dev = max_diff_real(&petz.matrix.entries, &oracle.entries);
    Ok((petz.matrix, [dev, cols, fixed]))
}

fn retro_checks(s: Suite, tag: &str, vals: [f64; 3], cases: usize) -> Vec<Check> {
    vec![
        Check::below(s, format!("{tag}/oracle"), vals[0], 1e-7).cases(cases),
        Check::below(s, format!("{tag}/column-sums"), vals[1], 1e-9).cases(cases),
        Check::below(s, format!("{tag}/prior-fixed-point"), vals[2], 1e-8).cases(cases),
    ]
}

fn suite_commute(seed: u64) -> Vec<Check> {
    let s = Suite::Commute;
    let mut out = Vec::new();
    for rep in frames() {
        let tag = short(&rep);
        let result = worst_n::<3, _>(COMMUTE_CASES, |i| {
            let mut rng = random::case_rng(seed, i);
            let n_kraus = 1 + (i as usize % 4);
            let ch = random::channel(&mut rng, rep.d(), n_kraus);
            let prior = random::full_rank_density(&mut rng, rep.d());
            Ok(petz_case(&ch, &prior, &rep)?.1)
        });
        match result {
            Ok(vals) => out.extend(retro_checks(s, tag, vals, COMMUTE_CASES)),
            Err(e) => out.push(Check::failed(s, format!("{tag}/oracle"), 1e-7, e)),
        }
    }
    out
}

pub const CLASSICAL_CASES: usize = 20;

/// `E[ρ] = Σ T(a'|a) |a'⟩⟨a|ρ|a⟩⟨a'|` for a column-stochastic `T`.
pub fn stochastic_embedding(t: &RMatrix) -> Result<KrausChannel, String> {
    let n = t.nrows();
    let mut kraus = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut k = CMatrix::zeros(n, n);
            k[(b, a)] = c(t[(b, a)].sqrt(), 0.0);
            kraus.push(k);
        }
    }
    KrausChannel::new(kraus, 1e-10).map_err(err)
}

fn suite_classical(seed: u64) -> Vec<Check> {
    let s = Suite::Classical;
    let mut out = Vec::new();
    for n in [2usize, 4] {
        let result = worst_n::<2, _>(CLASSICAL_CASES, |i| {
            let mut rng = random::case_rng(seed ^ ((n as u64) << 32), i);
            let t = random::stochastic(&mut rng, n);
            let p = random::probability(&mut rng, n);
            let ch = stochastic_embedding(&t)?;
            let gamma = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                p.iter().map(|&x| c(x, 0.0)),
            ));
            let gamma = DensityOperator::new(gamma, CHECK_TOL).map_err(err)?;
            let petz = hilbert::petz_hilbert(&ch, &gamma, 0.0, CHECK_TOL).map_err(err)?;
            let prior = RVector::from_vec(p);
            let bayes = qprcore::classical_bayes(&t, &prior, 0.0).map_err(err)?;
            let table = qprcore::classical_bayes_table(&t, &prior, CHECK_TOL).map_err(err)?;
            let mut dev: f64 = 0.0;
            for b in 0..n {
                let mut e = CMatrix::zeros(n, n);
                e[(b, b)] = c(1.0, 0.0);
                let image = petz.apply_op(&e).map_err(err)?;
                for a in 0..n {
                    dev = dev.max((image[(a, a)].re - bayes.matrix[(a, b)]).abs());
                }
            }
            Ok([dev, max_diff_real(&bayes.matrix, &table)])
        });
        match result {
            Ok([dev, table]) => {
                out.push(
                    Check::below(s, format!("n={n}/petz-diagonal"), dev, 1e-8)
                        .cases(CLASSICAL_CASES),
                );
                out.push(
                    Check::below(s, format!("n={n}/table-route"), table, 1e-12)
                        .cases(CLASSICAL_CASES),
                );
            }
            Err(e) => out.push(Check::failed(s, format!("n={n}/petz-diagonal"), 1e-8, e)),
        }
    }
    out
}

/// Born value `(S̃ v^{ρ})·v̄^{m}` where `S̃` is classical Bayes applied to
/// the representation of `ch` at `prior`.
pub fn classical_born_value(
    ch: &KrausChannel,
    rep: &Representation,
    prior: &DensityOperator,
    input: &DensityOperator,
    effect: &DensityOperator,
) -> Result<f64, String> {
    let s = qprcore::channel_to_qpr(ch, rep).map_err(err)?;
    let vp = qprcore::state_to_qpr(prior.matrix(), rep).map_err(err)?;
    let cl = qprcore::classical_bayes(&s.entries, &vp.entries, 0.0).map_err(err)?;
    let vin = qprcore::state_to_qpr(input.matrix(), rep).map_err(err)?;
    let vbar = qprcore::povm_to_qpr(effect.matrix(), rep).map_err(err)?;
    Ok((&cl.matrix * &vin.entries).dot(&vbar.entries))
}

fn suite_counterexamples() -> Vec<Check> {
    let s = Suite::Counterexamples;
    let mut out = Vec::new();
    let (dw, sic) = (Representation::dw_qubit(), Representation::sic_qubit());

    let rot = hilbert::builtin_channel("ry_pi3", None).expect("builtin");
    let (plus, zero) = (hilbert::ket_plus(), hilbert::ket0());
    for (name, rep, input, effect, target) in [
        ("born-dw", &dw, &plus, &zero, expected::born_flag_dw()),
        ("born-sic", &sic, &zero, &plus, expected::born_flag_sic()),
    ] {
        match classical_born_value(&rot, rep, &plus, input, effect) {
            Ok(v) => {
                out.push(Check::below(s, name, (v - target).abs(), 1e-9));
                let outside = (-v).max(v - 1.0);
                out.push(Check::new(
                    s,
                    format!("{name}/outside-unit-interval"),
                    outside,
                    0.0,
                    Bound::Above,
                ));
            }
            Err(e) => out.push(Check::failed(s, name, 1e-9, e)),
        }
    }

    let hs = hilbert::builtin_channel("half_swap", Some(&hilbert::ket1())).expect("builtin");
    for (rep, exact, rounded) in [
        (&dw, Some(expected::half_swap_classical_dw()), None),
        (
            &sic,
            None,
            Some(expected::half_swap_classical_sic_rounded()),
        ),
    ] {
        let tag = short(rep);
        let run = || -> Result<(RMatrix, RMatrix), String> {
            let sm = qprcore::channel_to_qpr(&hs, rep).map_err(err)?;
            let v = qprcore::state_to_qpr(plus.matrix(), rep).map_err(err)?;
            let cl = qprcore::classical_bayes(&sm.entries, &v.entries, 0.0).map_err(err)?;
            let petz = qprcore::petz_qpr(&sm, &v, rep, PetzOptions::default()).map_err(err)?;
            Ok((cl.matrix, petz.matrix.entries))
        };
        match run() {
            Ok((cl, petz)) => {
                if let Some(m) = exact {
                    out.push(Check::below(
                        s,
                        format!("{tag}/classical-exact"),
                        max_diff_real(&cl, &m),
                        1e-8,
                    ));
                }
                if let Some(m) = rounded {
                    out.push(Check::below(
                        s,
                        format!("{tag}/classical-rounded"),
                        max_diff_real(&cl, &m),
                        5e-4,
                    ));
                }
                out.push(Check::new(
                    s,
                    format!("{tag}/classical-differs-from-petz"),
                    max_diff_real(&cl, &petz),
                    1e-3,
                    Bound::Above,
                ));
            }
            Err(e) => out.push(Check::failed(s, format!("{tag}/classical"), 1e-8, e)),
        }
    }
    out
}

fn suite_reference() -> Vec<Check> {
    let s = Suite::Reference;
    let mut out = Vec::new();
    let (dw, sic) = (Representation::dw_qubit(), Representation::sic_qubit());
    let plus = hilbert::ket_plus();
    let hs = hilbert::builtin_channel("half_swap", Some(&hilbert::ket1())).expect("builtin");

    for (rep, target) in [
        (&dw, expected::half_swap_petz_dw()),
        (&sic, expected::half_swap_petz_sic()),
    ] {
        let tag = short(rep);
        match petz_case(&hs, &plus, rep) {
            Ok((m, vals)) => {
                out.push(Check::below(
                    s,
                    format!("{tag}/half-swap-petz"),
                    max_diff_real(&m.entries, &target),
                    1e-8,
                ));
                out.extend(retro_checks(s, &format!("{tag}/half-swap"), vals, 1));
            }
            Err(e) => out.push(Check::failed(s, format!("{tag}/half-swap-petz"), 1e-8, e)),
        }
    }

    let forward = |name: &str, rep: &Representation| -> Result<RMatrix, String> {
        let ch = hilbert::builtin_channel(name, None).map_err(err)?;
        Ok(qprcore::channel_to_qpr(&ch, rep).map_err(err)?.entries)
    };
    for (name, rep, target) in [
        ("hadamard", &dw, expected::hadamard()),
        ("hadamard", &sic, expected::hadamard()),
        ("u_eg", &dw, expected::u_eg_dw()),
        ("u_eg", &sic, expected::u_eg_sic()),
    ] {
        let label = format!("{}/{name}", short(rep));
        out.push(match forward(name, rep) {
            Ok(m) => Check::below(s, label, max_diff_real(&m, &target), 1e-9),
            Err(e) => Check::failed(s, label, 1e-9, e),
        });
    }
    out
}

pub const UNITARY_GATES: [&str; 5] = ["pauli_x", "pauli_y", "pauli_z", "hadamard", "u_eg"];
pub const UNITARY_PRIORS: usize = 5;

fn suite_unitary(seed: u64) -> Vec<Check> {
    let s = Suite::Unitary;
    let mut out = Vec::new();
    for rep in frames() {
        for (g, name) in UNITARY_GATES.iter().enumerate() {
            let label = format!("{}/{name}", short(&rep));
            let ch = hilbert::builtin_channel(name, None).expect("builtin");
            let result = worst_n::<4, _>(UNITARY_PRIORS, |i| {
                let mut rng = random::case_rng(seed.wrapping_add(g as u64), i);
                let prior = random::full_rank_density(&mut rng, 2);
                let sm = qprcore::channel_to_qpr(&ch, &rep).map_err(err)?;
                let (m, vals) = petz_case(&ch, &prior, &rep)?;
                let transpose = max_diff_real(&m.entries, &sm.entries.transpose());
                Ok([transpose, vals[0], vals[1], vals[2]])
            });
            match result {
                Ok([t, o, cs, fp]) => {
                    out.push(
                        Check::below(s, format!("{label}/transpose"), t, 1e-8)
                            .cases(UNITARY_PRIORS),
                    );
                    out.extend(retro_checks(s, &label, [o, cs, fp], UNITARY_PRIORS));
                }
                Err(e) => out.push(Check::failed(s, format!("{label}/transpose"), 1e-8, e)),
            }
        }
    }
    out
}

fn suite_erasure() -> Vec<Check> {
    let s = Suite::Erasure;
    let mut out = Vec::new();
    let beta = hilbert::qubit_state(expected::erasure_ancilla());
    let gamma = hilbert::qubit_state(expected::erasure_prior());
    let ch = hilbert::builtin_channel("full_swap", Some(&beta)).expect("builtin");
    for rep in frames() {
        let tag = short(&rep);
        let run = || -> Result<(f64, [f64; 3]), String> {
            let (m, vals) = petz_case(&ch, &gamma, &rep)?;
            let v = qprcore::state_to_qpr(gamma.matrix(), &rep).map_err(err)?;
            let dev = m
                .entries
                .column_iter()
                .map(|col| (col - &v.entries).amax())
                .fold(0.0, f64::max);
            Ok((dev, vals))
        };
        match run() {
            Ok((dev, vals)) => {
                out.push(Check::below(
                    s,
                    format!("{tag}/columns-equal-prior"),
                    dev,
                    1e-8,
                ));
                out.extend(retro_checks(s, tag, vals, 1));
            }
            Err(e) => out.push(Check::failed(
                s,
                format!("{tag}/columns-equal-prior"),
                1e-8,
                e,
            )),
        }
    }
    out
}

fn suite_kmatrix() -> Vec<Check> {
    let s = Suite::Kmatrix;
    let mut out = Vec::new();
    let (dw, sic) = (Representation::dw_qubit(), Representation::sic_qubit());
    let mut worst_unital: f64 = 0.0;
    let mut unital = 0;
    for name in hilbert::BUILTIN_NAMES {
        let ch = hilbert::builtin_channel(name, None).expect("builtin");
        if ch.unitality_defect() > CHECK_TOL {
            continue;
        }
        unital += 1;
        for rep in [&dw, &sic] {
            if let Ok(sm) = qprcore::channel_to_qpr(&ch, rep) {
                worst_unital = worst_unital.max(qprcore::k_matrix(&sm, 2).max_abs());
            } else {
                worst_unital = f64::INFINITY;
            }
        }
    }
    out.push(Check::below(s, "unital-builtins", worst_unital, 1e-10).cases(unital));

    let hs = hilbert::builtin_channel("half_swap", Some(&hilbert::ket1())).expect("builtin");
    let row = expected::half_swap_k_row_sic();
    out.push(match qprcore::channel_to_qpr(&hs, &sic) {
        Ok(sm) => {
            let k = qprcore::k_matrix(&sm, 2);
            let dev = (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| (k.entries[(i, j)] - row[j]).abs())
                .fold(0.0, f64::max);
            Check::below(s, "sic/half-swap-row", dev, 1e-9)
        }
        Err(e) => Check::failed(s, "sic/half-swap-row", 1e-9, err(e)),
    });
    out
}
