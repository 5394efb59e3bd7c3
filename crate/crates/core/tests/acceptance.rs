//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion.

use std::f64::consts::PI;

use qbret::frames::Representation;
use qbret::graphs::{self, EmitOptions};
use qbret::hilbert::{self, DensityOperator, KrausChannel, QubitStateParams};
use qbret::matcore::{max_diff_real, CMatrix, RMatrix};
use qbret::qprcore::{self, PetzOptions, PetzQpr, QuasiStochasticMatrix};
use qbret::verify::{self, Report, Suite};

const SEED: u64 = verify::DEFAULT_SEED;

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn m4(rows: [[f64; 4]; 4]) -> RMatrix {
    RMatrix::from_fn(4, 4, |i, j| rows[i][j])
}

fn dw() -> Representation {
    Representation::dw_qubit()
}

fn sic() -> Representation {
    Representation::sic_qubit()
}

fn half_swap() -> KrausChannel {
    hilbert::builtin_channel("half_swap", Some(&hilbert::ket1())).unwrap()
}

fn s_of(ch: &KrausChannel, rep: &Representation) -> QuasiStochasticMatrix {
    qprcore::channel_to_qpr(ch, rep).unwrap()
}

fn petz(
    ch: &KrausChannel,
    prior: &DensityOperator,
    rep: &Representation,
) -> (QuasiStochasticMatrix, PetzQpr) {
    let s = s_of(ch, rep);
    let v = qprcore::state_to_qpr(prior.matrix(), rep).unwrap();
    let p = qprcore::petz_qpr(&s, &v, rep, PetzOptions::default()).unwrap();
    (s, p)
}

/// Worst (column-sum, fixed-point) defects over the given retrodictions.
fn defects<'a>(
    items: impl IntoIterator<Item = (&'a QuasiStochasticMatrix, &'a PetzQpr)>,
) -> (f64, f64) {
    items.into_iter().fold((0.0, 0.0), |(c, f), (s, p)| {
        let (dc, df) = qprcore::retrodiction_defects(p, s).unwrap();
        (c.max(dc), f.max(df))
    })
}

fn suite_passes(report: &Report, prefix: &str) -> (bool, usize, String) {
    let hits: Vec<_> = report
        .checks
        .iter()
        .filter(|c| format!("{}/{}", c.suite, c.name).starts_with(prefix))
        .collect();
    let failed: Vec<_> = hits
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.line())
        .collect();
    (
        !hits.is_empty() && failed.is_empty(),
        hits.len(),
        if failed.is_empty() {
            format!("{} check(s)", hits.len())
        } else {
            failed.join("; ")
        },
    )
}

fn c1_half_swap_petz() -> (bool, String) {
    let h = 0.5;
    let dw_target = m4([[h; 4], [h; 4], [0.0; 4], [0.0; 4]]);
    let s3 = 3f64.sqrt();
    let (a, b) = ((s3 + 3.0) / 12.0, (3.0 - s3) / 12.0);
    let sic_target = m4([[a; 4], [a; 4], [b; 4], [b; 4]]);
    let plus = hilbert::ket_plus();
    let (_, pd) = petz(&half_swap(), &plus, &dw());
    let (_, ps) = petz(&half_swap(), &plus, &sic());
    let e = max_diff_real(&pd.matrix.entries, &dw_target)
        .max(max_diff_real(&ps.matrix.entries, &sic_target));
    (e < 1e-8, format!("max |Δ| = {e:.3e}"))
}

fn c2_classical_on_quasi() -> (bool, String) {
    let r2 = 2f64.sqrt();
    let dw_exact = m4([
        [1.0, (3.0 - r2) / 7.0, 1.0, (3.0 + r2) / 7.0],
        [0.0, (4.0 + r2) / 7.0, 0.0, (4.0 - r2) / 7.0],
        [0.0; 4],
        [0.0; 4],
    ]);
    let sic_rounded = m4([
        [0.925, 0.183, -0.264, 0.353],
        [0.0744, 0.744, 0.275, 0.168],
        [-0.0191, 0.0491, 0.915, 0.0947],
        [0.0199, 0.0233, 0.0737, 0.384],
    ]);
    let plus = hilbert::ket_plus();
    let bayes = |rep: &Representation| {
        let s = s_of(&half_swap(), rep);
        let v = qprcore::state_to_qpr(plus.matrix(), rep).unwrap();
        qprcore::classical_bayes(&s.entries, &v.entries, 0.0)
            .unwrap()
            .matrix
    };
    let ed = max_diff_real(&bayes(&dw()), &dw_exact);
    let es = max_diff_real(&bayes(&sic()), &sic_rounded);
    (
        ed < 1e-8 && es < 5e-4,
        format!("DW exact |Δ| = {ed:.3e}, SIC rounded |Δ| = {es:.3e}"),
    )
}

fn c3_born_flags() -> (bool, String) {
    let rot = hilbert::builtin_channel("ry_pi3", None).unwrap();
    let (plus, zero) = (hilbert::ket_plus(), hilbert::ket0());
    let born = |rep: &Representation, input: &DensityOperator, effect: &DensityOperator| {
        let s = s_of(&rot, rep);
        let vp = qprcore::state_to_qpr(plus.matrix(), rep).unwrap();
        let cl = qprcore::classical_bayes(&s.entries, &vp.entries, 0.0).unwrap();
        let vin = qprcore::state_to_qpr(input.matrix(), rep).unwrap();
        let vbar = qprcore::povm_to_qpr(effect.matrix(), rep).unwrap();
        (&cl.matrix * &vin.entries).dot(&vbar.entries)
    };
    let bd = born(&dw(), &plus, &zero);
    let bs = born(&sic(), &zero, &plus);
    let s3 = 3f64.sqrt();
    let ed = (bd - (1.0 + s3) / 2.0).abs();
    let es = (bs - (2.0 - 5.0 * s3) / 13.0).abs();
    let outside = |x: f64| !(0.0..=1.0).contains(&x);
    (
        ed < 1e-9 && es < 1e-9 && outside(bd) && outside(bs),
        format!("DW {bd:.6} (|Δ| {ed:.1e}), SIC {bs:.6} (|Δ| {es:.1e})"),
    )
}

fn c4_gate_matrices() -> (bool, String) {
    let s = 3f64.sqrt();
    let had = m4([
        [1.0, 1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0, 1.0],
    ])
    .scale(0.5);
    let ueg_dw = m4([
        [9.0, s - 6.0, 4.0 - 3.0 * s, 2.0 * s + 9.0],
        [-s - 6.0, 9.0, 9.0 - 2.0 * s, 3.0 * s + 4.0],
        [3.0 * s + 4.0, 2.0 * s + 9.0, -3.0, 6.0 - 5.0 * s],
        [9.0 - 2.0 * s, 4.0 - 3.0 * s, 5.0 * s + 6.0, -3.0],
    ])
    .scale(1.0 / 16.0);
    let ueg_sic = m4([
        [-3.0, 5.0 * s + 6.0, 4.0 - 3.0 * s, 9.0 - 2.0 * s],
        [6.0 - 5.0 * s, -3.0, 2.0 * s + 9.0, 3.0 * s + 4.0],
        [3.0 * s + 4.0, 9.0 - 2.0 * s, 9.0, -s - 6.0],
        [2.0 * s + 9.0, 4.0 - 3.0 * s, s - 6.0, 9.0],
    ])
    .scale(1.0 / 16.0);
    let h = hilbert::builtin_channel("hadamard", None).unwrap();
    let u = hilbert::builtin_channel("u_eg", None).unwrap();
    let e = [
        max_diff_real(&s_of(&h, &dw()).entries, &had),
        max_diff_real(&s_of(&h, &sic()).entries, &had),
        max_diff_real(&s_of(&u, &dw()).entries, &ueg_dw),
        max_diff_real(&s_of(&u, &sic()).entries, &ueg_sic),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    (e < 1e-9, format!("max |Δ| = {e:.3e}"))
}

fn c8_unitary() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for rep in [dw(), sic()] {
        for name in verify::UNITARY_GATES {
            let ch = hilbert::builtin_channel(name, None).unwrap();
            for i in 0..5 {
                let mut rng = qbret::random::case_rng(SEED ^ 0xacce, i);
                let prior = qbret::random::full_rank_density(&mut rng, 2);
                let (s, p) = petz(&ch, &prior, &rep);
                worst = worst.max(max_diff_real(&p.matrix.entries, &s.entries.transpose()));
                cases += 1;
            }
        }
    }
    (
        worst < 1e-8,
        format!("max |Δ| = {worst:.3e} over {cases} cases"),
    )
}

fn erasure_case(rep: &Representation) -> (QuasiStochasticMatrix, PetzQpr) {
    let beta = hilbert::qubit_state(QubitStateParams::new(
        7.0 * PI / 16.0,
        3.0 * PI / 5.0,
        PI / 6.0,
    ));
    let gamma = hilbert::qubit_state(QubitStateParams::new(PI / 16.0, PI / 5.0, PI / 8.0));
    let ch = hilbert::builtin_channel("full_swap", Some(&beta)).unwrap();
    petz(&ch, &gamma, rep)
}

fn c9_erasure() -> (bool, String) {
    let gamma = hilbert::qubit_state(QubitStateParams::new(PI / 16.0, PI / 5.0, PI / 8.0));
    let mut worst = 0.0f64;
    for rep in [dw(), sic()] {
        let (_, p) = erasure_case(&rep);
        let v = qprcore::state_to_qpr(gamma.matrix(), &rep).unwrap();
        for col in p.matrix.entries.column_iter() {
            worst = worst.max((col - &v.entries).amax());
        }
    }
    (worst < 1e-8, format!("max |Δ| = {worst:.3e}"))
}

fn c11_stochasticity(report: &Report) -> (bool, String) {
    let plus = hilbert::ket_plus();
    let mut cases = vec![
        petz(&half_swap(), &plus, &dw()),
        petz(&half_swap(), &plus, &sic()),
        erasure_case(&dw()),
        erasure_case(&sic()),
    ];
    for name in ["pauli_x", "hadamard", "u_eg", "ry_pi3"] {
        let ch = hilbert::builtin_channel(name, None).unwrap();
        cases.push(petz(&ch, &plus, &dw()));
        cases.push(petz(&ch, &hilbert::ket0(), &sic()));
    }
    let (c, f) = defects(cases.iter().map(|(s, p)| (s, p)));
    let suite_ok = report
        .checks
        .iter()
        .filter(|k| k.name.ends_with("column-sums") || k.name.ends_with("prior-fixed-point"))
        .all(|k| k.passed);
    (
        c < 1e-9 && f < 1e-8 && suite_ok,
        format!("direct column-sum {c:.3e}, fixed-point {f:.3e}; suite checks ok: {suite_ok}"),
    )
}

fn c12_k_matrix() -> (bool, String) {
    let sic = sic();
    let mut worst_unital = 0.0f64;
    let mut unital = 0;
    for name in hilbert::BUILTIN_NAMES {
        let ch = hilbert::builtin_channel(name, None).unwrap();
        if ch.unitality_defect() > 1e-12 {
            continue;
        }
        unital += 1;
        for rep in [dw(), Representation::sic_qubit()] {
            worst_unital = worst_unital.max(qprcore::k_matrix(&s_of(&ch, &rep), 2).max_abs());
        }
    }
    let x = 1.0 / (4.0 * 3f64.sqrt());
    let row = [-x, x, -x, x];
    let k = qprcore::k_matrix(&s_of(&half_swap(), &sic), 2);
    let worst_row = k
        .entries
        .row_iter()
        .flat_map(|r| {
            r.iter()
                .zip(row)
                .map(|(a, b)| (a - b).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    (
        unital >= 5 && worst_unital < 1e-10 && worst_row < 1e-9,
        format!("unital builtins {unital}: max |K| = {worst_unital:.3e}; half-swap rows |Δ| = {worst_row:.3e}"),
    )
}

fn c13_graphs() -> (bool, String) {
    let rep = dw();
    let opts = EmitOptions::default();
    let emit = || {
        let (_, p) = petz(&half_swap(), &hilbert::ket_plus(), &rep);
        let g = graphs::retro_graph(&p.matrix, &p.prior_used)
            .unwrap()
            .with_labels(rep.frame.labels.clone());
        (graphs::emit_dot(&g, &opts), graphs::emit_svg(&g, &opts))
    };
    let (d1, s1) = emit();
    let (d2, s2) = emit();
    let identical = d1 == d2 && s1 == s2;

    let forward = |name: &str, ancilla: Option<&DensityOperator>| {
        let ch = hilbert::builtin_channel(name, ancilla).unwrap();
        let mixed = ch.apply_op(&CMatrix::identity(2, 2).unscale(2.0)).unwrap();
        let image = qprcore::state_to_qpr(&mixed, &rep).unwrap();
        graphs::forward_graph(&s_of(&ch, &rep), &image).unwrap()
    };
    let hs = forward("half_swap", Some(&hilbert::ket1()));
    let dashed = graphs::emit_dot(&hs, &opts).matches("style=dashed").count();
    let hs_uniform = graphs::uniform_within(hs.output_bubbles.as_ref().unwrap(), 1e-9);
    let had = forward("hadamard", None);
    let had_uniform = graphs::uniform_within(had.output_bubbles.as_ref().unwrap(), 1e-9);
    (
        identical && dashed >= 1 && !hs_uniform && had_uniform,
        format!(
            "byte-identical: {identical}; half-swap dashed edges {dashed}, uniform bubbles {hs_uniform}; hadamard uniform {had_uniform}"
        ),
    )
}

fn main() {
    let report = verify::run(Suite::All, SEED);
    let from_suite = |prefixes: &[&str]| {
        let parts: Vec<_> = prefixes.iter().map(|p| suite_passes(&report, p)).collect();
        let ok = parts.iter().all(|(ok, _, _)| *ok);
        let detail = parts
            .iter()
            .zip(prefixes)
            .map(|((_, _, d), p)| format!("{p} {d}"))
            .collect::<Vec<_>>()
            .join(", ");
        (ok, detail)
    };

    let results: Vec<(u32, &'static str, (bool, String))> = vec![
        (
            1,
            "half-swap Petz matrices in DW and SIC",
            c1_half_swap_petz(),
        ),
        (
            2,
            "classical Bayes on the half-swap representation",
            c2_classical_on_quasi(),
        ),
        (
            3,
            "Born values outside [0, 1] under classical Bayes",
            c3_born_flags(),
        ),
        (4, "Hadamard and U_eg channel matrices", c4_gate_matrices()),
        (
            5,
            "representation Petz commutes with Hilbert Petz",
            from_suite(&["commute/dw/oracle", "commute/sic/oracle"]),
        ),
        (
            6,
            "M-matrix real, positive, unit trace",
            from_suite(&["mmatrix/"]),
        ),
        (
            7,
            "M-matrix powers match matrix powers",
            from_suite(&["powers/"]),
        ),
        (8, "unitary retrodiction equals the transpose", c8_unitary()),
        (9, "erasure retrodiction returns the prior", c9_erasure()),
        (
            10,
            "classical reduction to Bayes",
            from_suite(&["classical/n=2/petz-diagonal", "classical/n=4/petz-diagonal"]),
        ),
        (
            11,
            "column sums and prior fixed point",
            c11_stochasticity(&report),
        ),
        (
            12,
            "K-correction for unital and half-swap channels",
            c12_k_matrix(),
        ),
        (13, "graph determinism and bubble structure", c13_graphs()),
    ];

    let outcomes: Vec<Outcome> = results
        .into_iter()
        .map(|(id, title, (passed, detail))| Outcome {
            id,
            title,
            passed,
            detail,
        })
        .collect();
    for o in &outcomes {
        println!(
            "{} criterion {:>2}: {} ({})",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail
        );
    }
    let failed: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    println!(
        "{} of {} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
