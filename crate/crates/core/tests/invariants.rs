use eigenpath::analysis::galton_watson_size;
use eigenpath::harness::{run, ExperimentConfig};
use eigenpath::onestep::{transform_t, transform_tx_prime, CopySpectrum, MultiCopyState};
use eigenpath::oracles::{stream_rng, OracleConfig, Reflection, Session};
use eigenpath::quantum::{overlap_probability, PlanarPath, StateVector};
use eigenpath::traversal::traverse_recursive_overlap_free;
use proptest::prelude::*;

fn plane(p: f64, p0: f64) -> (Reflection, Reflection, StateVector, StateVector) {
    let psi = StateVector::from_real(&[p.sqrt(), (1.0 - p).sqrt(), 0.0]).unwrap();
    let phi = StateVector::basis(3, 0).unwrap();
    let start = StateVector::from_real(&[p0.sqrt(), (1.0 - p0).sqrt(), 0.0]).unwrap();
    (Reflection::about(&psi), Reflection::about(&phi), start, phi)
}

fn csv_of(cfg: &ExperimentConfig) -> Vec<u8> {
    let mut out = Vec::new();
    run(cfg).unwrap().write_csv(&mut out).unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t_lands_on_phi_with_odd_count(p in 0.05f64..0.95, p0 in 0.0f64..1.0, seed in any::<u64>()) {
        let (r_psi, r_phi, start, phi) = plane(p, p0);
        let mut s = Session::seeded(OracleConfig::default(), seed, 0);
        let out = transform_t(&mut s, &r_psi, &r_phi, &start).unwrap();
        prop_assert!(out.success);
        prop_assert_eq!(out.reflections % 2, 1);
        prop_assert!(overlap_probability(&out.state, &phi).unwrap() > 1.0 - 1e-9);
        prop_assert!(out.state.is_normalized());
    }

    #[test]
    fn tx_prime_keeps_states_normalized(p in 0.05f64..1.0, seed in any::<u64>()) {
        let (r_psi, r_phi, start, phi) = plane(p, p);
        let mut s = Session::seeded(OracleConfig::default(), seed, 3);
        let out = transform_tx_prime(&mut s, &r_psi, &r_phi, &start).unwrap();
        prop_assert!(out.state.is_normalized());
        if out.success {
            prop_assert!(overlap_probability(&out.state, &phi).unwrap() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn galton_watson_tree_is_full_binary(p_s in 0.55f64..1.0, seed in any::<u64>()) {
        let g = galton_watson_size(p_s, &mut stream_rng(seed, 1)).unwrap();
        prop_assert_eq!(g.size, 2 * g.leaves - 1);
    }

    #[test]
    fn extend_then_contract_restores_psi(p in 0.05f64..1.0, r in 1usize..20) {
        let spec = CopySpectrum { target_phase: 1.0, complement: vec![(Some(2.0), 0.5), (Some(3.0), 0.5)] };
        let m = MultiCopyState::uniform(p, spec.clone(), r).unwrap();
        let e = m.extend().unwrap();
        prop_assert!((e.p() - 0.75 * p).abs() < 1e-12);
        let w: f64 = e.spectrum().complement.iter().map(|x| x.1).sum();
        prop_assert!((w - 1.0).abs() < 1e-9);
        let (back, ok) = e.contract().unwrap();
        prop_assert!(ok);
        prop_assert!(back.all_at_psi());
        prop_assert_eq!(back.spectrum(), &spec);
        prop_assert!((back.p() - p).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn overlap_free_traversal_totals_match_intervals(length in 0.2f64..2.5, seed in any::<u64>()) {
        let path = PlanarPath::great_circle(3, length).unwrap();
        let mut s = Session::seeded(OracleConfig::default(), seed, 0);
        let rep = traverse_recursive_overlap_free(&mut s, &path, 0.0, 40).unwrap();
        prop_assert!(rep.is_consistent());
        prop_assert!(rep.attempts() >= 1);
        if rep.success {
            prop_assert!(rep.final_fidelity > 1.0 - 1e-6);
        }
    }

    #[test]
    fn csv_is_a_function_of_the_seed(seed in any::<u64>()) {
        let cfg = ExperimentConfig::new("tm", seed).with_trials(200);
        prop_assert_eq!(csv_of(&cfg), csv_of(&cfg));
    }
}
