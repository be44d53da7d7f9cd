use nqkr::analysis::second_difference;
use nqkr::evolve::{propagate, PropagatorPlan};
use nqkr::model::{initial_state, ModelParams};
use nqkr::observables::{mean_p, mean_p2, momentum_variance, otoc, SeriesField};
use nqkr::theory::s_p_theory;
use proptest::prelude::*;
use std::f64::consts::PI;

fn state_at(params: &ModelParams, t: u64) -> nqkr::QuantumState {
    let plan = PropagatorPlan::new(params).unwrap();
    let mut s = initial_state(params);
    for _ in 0..t {
        plan.step(&mut s).unwrap();
    }
    s
}

#[test]
fn otoc_converges_quadratically_to_variance() {
    let params = ModelParams::default().with_n_modes(512);
    let state = state_at(&params, 50);
    let var = momentum_variance(&state);
    let err = |eps: f64| (otoc(&state, eps) / (eps * eps) - var).abs() / var;
    let (e4, e5, e6) = (err(1e-4), err(1e-5), err(1e-6));
    assert!((50.0..200.0).contains(&(e4 / e5)), "{e4:e} {e5:e}");
    assert!(e6 < e5 / 20.0, "{e5:e} {e6:e}");
}

#[test]
fn simulated_second_difference_tracks_theory_early() {
    let params = ModelParams::default();
    let series = propagate(&params, 11, 1).unwrap();
    let diffs = second_difference(&series, SeriesField::MeanP).unwrap();
    for (t, v) in diffs.into_iter().filter(|&(t, _)| (2..=10).contains(&t)) {
        let theory = s_p_theory(&params, t as f64);
        assert!((v - theory).abs() <= 5e-3, "t={t}: {v} vs {theory}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn phase_parity(phi in 0.05f64..3.1, t in 1u64..60, lambda in 0.05f64..1.5) {
        let plus = ModelParams::default().with_lambda(lambda).with_phase(phi).with_n_modes(512);
        let minus = plus.with_phase(-phi);
        let (a, b) = (state_at(&plus, t), state_at(&minus, t));
        let (pa, pb) = (mean_p(&a), mean_p(&b));
        prop_assert!((pa + pb).abs() <= 1e-10 * pa.abs().max(1e-300), "{} {}", pa, pb);
        let (qa, qb) = (mean_p2(&a), mean_p2(&b));
        prop_assert!((qa - qb).abs() <= 1e-10 * qa);
    }

    #[test]
    fn otoc_is_bounded(
        phi in -PI..PI,
        t in 0u64..80,
        lambda in 0.0f64..2.0,
        eps in prop_oneof![Just(1e-5), 1e-3f64..1.0, 1.0f64..20.0],
    ) {
        let params = ModelParams::default().with_lambda(lambda).with_phase(phi).with_n_modes(512);
        let s = state_at(&params, t);
        let c = otoc(&s, eps);
        prop_assert!((0.0..=1.0).contains(&c), "C = {}", c);
    }
}
