use nqkr::analysis::{
    fit_gaussian, linear_fit, second_difference, sweep_phase_diagram, DiagramQuantity,
    DiagramSource, FitOptions,
};
use nqkr::evolve::{propagate, propagate_adaptive, MAX_AUTO_MODES};
use nqkr::model::ModelParams;
use nqkr::observables::{momentum_distribution, SeriesField};
use nqkr::theory::{dp_dt_theory, mean_p2_theory, mean_p_theory, t_c};

#[test]
fn drift_is_linear_and_width_grows() {
    let params = ModelParams::default().with_n_modes(2048);
    let times = [1000u64, 1500, 2000, 2500, 3000];
    let (_, states, _) = propagate_adaptive(&params, 3000, 10, &times, MAX_AUTO_MODES).unwrap();
    let fits: Vec<_> = states
        .iter()
        .map(|s| fit_gaussian(&momentum_distribution(s), &FitOptions::GAUSSIAN).unwrap())
        .collect();
    let ts: Vec<f64> = times.iter().map(|&t| t as f64).collect();
    let centers: Vec<f64> = fits.iter().map(|f| f.center().unwrap()).collect();
    let line = linear_fit(&ts, &centers).unwrap();
    assert!(line.r_squared > 0.999, "R^2 = {}", line.r_squared);
    let d = dp_dt_theory(&params, 2000.0);
    assert!(((line.slope - d) / d).abs() < 0.02, "{} vs {d}", line.slope);
    let sigmas: Vec<f64> = fits.iter().map(|f| f.sigma().unwrap()).collect();
    assert!(sigmas.windows(2).all(|w| w[1] > w[0]), "{sigmas:?}");
}

#[test]
fn theory_diagram_zones() {
    let base = ModelParams::default();
    let ts: Vec<u64> = (1..=500).collect();
    let lambdas: Vec<f64> = (1..=15).map(|i| 0.1 * i as f64).collect();
    let d = sweep_phase_diagram(
        &ts,
        &lambdas,
        &base,
        DiagramQuantity::SpOverLambda,
        DiagramSource::Theory,
    )
    .unwrap();
    let small = 0.5 / (2.0 * std::f64::consts::PI);
    for (i, &lam) in d.lambdas.iter().enumerate() {
        let tc = t_c(&base.with_lambda(lam)).unwrap();
        for (j, &t) in d.t_values.iter().enumerate() {
            let v = d.values[i][j];
            if (t as f64) < 0.1 * tc {
                assert!(
                    ((v - small) / small).abs() < 0.05,
                    "lambda={lam} t={t}: {v}"
                );
            } else if (t as f64) > 10.0 * tc {
                assert!(v.abs() < 5e-3, "lambda={lam} t={t}: {v}");
            }
        }
    }
}

/// The simulated second difference is the discrete stencil of the exact
/// curves at integer t, so it agrees with that stencil far more tightly
/// than with the continuous second derivative.
#[test]
fn simulated_stencil_matches_discrete_theory_stencil() {
    for lambda in [0.3, 1.0, 1.5] {
        let params = ModelParams::default().with_lambda(lambda).with_n_modes(512);
        let series = propagate(&params, 201, 1).unwrap();
        let stencil = |f: &dyn Fn(f64) -> f64, t: f64| f(t + 1.0) - 2.0 * f(t) + f(t - 1.0);
        let sp = second_difference(&series, SeriesField::MeanP).unwrap();
        let se = second_difference(&series, SeriesField::MeanP2).unwrap();
        for ((t, a), (_, b)) in sp.into_iter().zip(se) {
            let t = t as f64;
            let ta = stencil(&|t| mean_p_theory(&params, t), t);
            let tb = stencil(&|t| mean_p2_theory(&params, t), t);
            assert!(
                (a - ta).abs() <= 1e-8 * (1.0 + t),
                "lambda={lambda} t={t}: {a} vs {ta}"
            );
            assert!(
                (b - tb).abs() <= 1e-7 * (1.0 + t * t),
                "lambda={lambda} t={t}: {b} vs {tb}"
            );
        }
    }
}
