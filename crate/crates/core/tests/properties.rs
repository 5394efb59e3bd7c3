use proptest::prelude::*;

use qbret::frames::Representation;
use qbret::hilbert::{self, DensityOperator};
use qbret::io;
use qbret::matcore::{max_diff, max_diff_real};
use qbret::qprcore::{self, PetzOptions};
use qbret::random;

fn reps() -> [Representation; 2] {
    [Representation::dw_qubit(), Representation::sic_qubit()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn state_vectors_reconstruct(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let rho = random::density(&mut rng, 2);
        for rep in reps() {
            let v = qprcore::state_to_qpr(rho.matrix(), &rep).unwrap();
            prop_assert!((v.sum() - 1.0).abs() < 1e-12);
            let back = qprcore::reconstruct_state(&v, &rep).unwrap();
            prop_assert!(max_diff(&back, rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn channel_matrices_are_column_stochastic(seed in any::<u64>(), kraus in 1usize..5) {
        let mut rng = random::rng(seed);
        let ch = random::channel(&mut rng, 2, kraus);
        for rep in reps() {
            let s = qprcore::channel_to_qpr(&ch, &rep).unwrap();
            prop_assert!(s.column_sum_defect() < 1e-12);
        }
    }

    #[test]
    fn born_rule_is_preserved(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let rho = random::density(&mut rng, 2);
        let effect = random::density(&mut rng, 2);
        let exact = (rho.matrix() * effect.matrix()).trace().re;
        for rep in reps() {
            let v = qprcore::state_to_qpr(rho.matrix(), &rep).unwrap();
            let vbar = qprcore::povm_to_qpr(effect.matrix(), &rep).unwrap();
            prop_assert!((qprcore::born(&v, &vbar).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn petz_matches_oracle_and_fixes_prior(seed in any::<u64>(), kraus in 1usize..4) {
        let mut rng = random::rng(seed);
        let ch = random::channel(&mut rng, 2, kraus);
        let prior = random::full_rank_density(&mut rng, 2);
        for rep in reps() {
            let s = qprcore::channel_to_qpr(&ch, &rep).unwrap();
            let v = qprcore::state_to_qpr(prior.matrix(), &rep).unwrap();
            let petz = qprcore::petz_qpr(&s, &v, &rep, PetzOptions::default()).unwrap();
            let oracle = qprcore::oracle_petz(&ch, &prior, &petz, &rep).unwrap();
            prop_assert!(max_diff_real(&petz.matrix.entries, &oracle.entries) < 1e-7);
            let (cols, fixed) = qprcore::retrodiction_defects(&petz, &s).unwrap();
            prop_assert!(cols < 1e-9);
            prop_assert!(fixed < 1e-8);
        }
    }

    #[test]
    fn unitary_petz_is_transpose(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let u = random::unitary(&mut rng, 2);
        let ch = hilbert::KrausChannel::unitary(&u, 1e-10).unwrap();
        let prior = random::full_rank_density(&mut rng, 2);
        let rep = Representation::dw_qubit();
        let s = qprcore::channel_to_qpr(&ch, &rep).unwrap();
        let v = qprcore::state_to_qpr(prior.matrix(), &rep).unwrap();
        let petz = qprcore::petz_qpr(&s, &v, &rep, PetzOptions::default()).unwrap();
        prop_assert!(max_diff_real(&petz.matrix.entries, &s.entries.transpose()) < 1e-8);
    }

    #[test]
    fn classical_bayes_columns_sum_to_one(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = random::rng(seed);
        let t = random::stochastic(&mut rng, n);
        let p = qprcore::RVector::from_vec(random::probability(&mut rng, n));
        let b = qprcore::classical_bayes(&t, &p, 1e-8).unwrap();
        for col in b.matrix.column_iter() {
            prop_assert!((col.sum() - 1.0).abs() < 1e-9);
        }
        let table = qprcore::classical_bayes_table(&t, &p, 1e-12).unwrap();
        prop_assert!(max_diff_real(&table, &b.matrix) < 1e-9);
    }

    #[test]
    fn angle_specs_never_panic(s in "\\PC{0,24}") {
        let _ = io::parse_angles(&s);
        let _ = io::parse_ancilla_spec(&s);
    }

    #[test]
    fn numeric_angles_parse_exactly(w in -10.0f64..10.0, t in -10.0f64..10.0, p in -10.0f64..10.0) {
        let q = io::parse_angles(&format!("{w:e},{t:e},{p:e}")).unwrap();
        prop_assert_eq!((q.omega, q.theta, q.phi), (w, t, p));
    }

    #[test]
    fn state_json_round_trips(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let rho = random::density(&mut rng, 2);
        let text = io::state_to_json(&rho).unwrap();
        let back: DensityOperator = io::parse_state(&text).unwrap();
        prop_assert_eq!(back.matrix(), rho.matrix());
    }
}
