//! Long-time growth laws at the PT-symmetric phase `phi = pi/2` and the
//! parity-even phase `phi = pi`.

use super::lsq::{linear_fit, polyfit, LinearFit};
use crate::error::{Error, Result};
use crate::evolve::{propagate_adaptive, suggested_n_modes, MAX_AUTO_MODES};
use crate::model::{pt_residual, ModelParams};
use crate::observables::{ObservableSeries, SeriesField};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Angle samples used for the PT residual.
pub const PT_SAMPLES: usize = 4096;

/// Residual below which the kick potential counts as PT-symmetric.
pub const PT_TOLERANCE: f64 = 1e-14;

/// Fitted and predicted long-time behaviour at one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub label: String,
    pub phase: f64,
    pub lambda: f64,
    pub kick_strength: f64,
    pub epsilon: f64,
    pub n_modes: usize,
    pub t_max: u64,
    /// Inclusive fit window.
    pub window: (u64, u64),
    pub pt_residual: f64,
    pub pt_symmetric: bool,

    pub mean_p: LinearFit,
    /// `max |<p>| / t` over the whole run.
    pub mean_p_max_over_t: f64,
    /// Coefficient of `t^2` in a quadratic fit of `<p^2>`.
    pub mean_p2_quadratic: f64,
    pub mean_p2: LinearFit,
    /// Slope of `ln <p^2>` against `ln t` over the window.
    pub mean_p2_exponent: f64,
    pub otoc: LinearFit,
    pub otoc_exponent: f64,

    /// Long-time predictions: `<p> ~ -K sin(phi) t`,
    /// `<p^2> ~ K^2 sin^2(phi) t^2`, and for the linear parts
    /// `2 pi (K^2 cos(2 phi) + lambda^2) / lambda` and
    /// `2 pi eps^2 (K^2 cos^2(phi) + lambda^2) / lambda`.
    pub mean_p_slope_theory: f64,
    pub mean_p2_quadratic_theory: f64,
    pub mean_p2_linear_theory: f64,
    pub otoc_slope_theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryTable {
    pub pt_symmetric: PhaseRow,
    pub parity_even: PhaseRow,
}

fn windowed(
    series: &ObservableSeries,
    window: (u64, u64),
    field: SeriesField,
) -> (Vec<f64>, Vec<f64>) {
    series
        .entries
        .iter()
        .filter(|e| e.t >= window.0 && e.t <= window.1)
        .map(|e| (e.t as f64, field.get(e)))
        .unzip()
}

fn log_log_exponent(ts: &[f64], ys: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(ys)
        .filter(|(_, y)| y.abs() > 0.0)
        .map(|(t, y)| (t.ln(), y.abs().ln()))
        .unzip();
    linear_fit(&lx, &ly).map_or(f64::NAN, |f| f.slope)
}

fn phase_row(
    base: &ModelParams,
    label: &str,
    phase: f64,
    t_max: u64,
    record_every: u64,
) -> Result<PhaseRow> {
    let params = base.with_phase(phase);
    let params = params.with_n_modes(params.n_modes.max(suggested_n_modes(&params, t_max)));
    let (series, _, used) = propagate_adaptive(&params, t_max, record_every, &[], MAX_AUTO_MODES)?;
    let window = (2 * t_max / 3, t_max);

    let (ts, p) = windowed(&series, window, SeriesField::MeanP);
    let (_, p2) = windowed(&series, window, SeriesField::MeanP2);
    let (_, c) = windowed(&series, window, SeriesField::Otoc);
    if ts.len() < 3 {
        return Err(Error::InsufficientSupport(format!(
            "{} recorded points in the window {window:?}",
            ts.len()
        )));
    }

    let mean_p_max_over_t = series
        .entries
        .iter()
        .filter(|e| e.t > 0)
        .map(|e| e.mean_p.abs() / e.t as f64)
        .fold(0.0, f64::max);

    let (k, lam, eps) = (params.kick_strength, params.lambda, params.epsilon);
    let (s, co) = phase.sin_cos();
    let residual = pt_residual(&params, PT_SAMPLES);
    Ok(PhaseRow {
        label: label.to_string(),
        phase,
        lambda: lam,
        kick_strength: k,
        epsilon: eps,
        n_modes: used.n_modes,
        t_max,
        window,
        pt_residual: residual,
        pt_symmetric: residual <= PT_TOLERANCE,
        mean_p: linear_fit(&ts, &p)?,
        mean_p_max_over_t,
        mean_p2_quadratic: polyfit(&ts, &p2, None, 2)?.raw_coefficients()[2],
        mean_p2: linear_fit(&ts, &p2)?,
        mean_p2_exponent: log_log_exponent(&ts, &p2),
        otoc: linear_fit(&ts, &c)?,
        otoc_exponent: log_log_exponent(&ts, &c),
        mean_p_slope_theory: -k * s,
        mean_p2_quadratic_theory: k * k * s * s,
        mean_p2_linear_theory: 2.0 * PI * (k * k * (2.0 * phase).cos() + lam * lam) / lam,
        otoc_slope_theory: 2.0 * PI * eps * eps * (k * k * co * co + lam * lam) / lam,
    })
}

/// Propagates `phi = pi/2` and `phi = pi` (other parameters from `base`)
/// for `t_max` kicks and fits the growth laws over the last third of the run.
pub fn long_time_table(base: &ModelParams, t_max: u64, record_every: u64) -> Result<SymmetryTable> {
    if base.lambda <= 0.0 {
        return Err(Error::InvalidParams(
            "the long-time table needs lambda > 0".into(),
        ));
    }
    let (a, b) = rayon::join(
        || phase_row(base, "pi/2", PI / 2.0, t_max, record_every),
        || phase_row(base, "pi", PI, t_max, record_every),
    );
    Ok(SymmetryTable {
        pt_symmetric: a?,
        parity_even: b?,
    })
}

impl SymmetryTable {
    /// Plain-text rendering with one column per phase.
    pub fn render(&self) -> String {
        let (a, b) = (&self.pt_symmetric, &self.parity_even);
        let mut out = String::new();
        let mut line = |name: &str, x: String, y: String| {
            out.push_str(&format!("{name:<28} {x:>24} {y:>24}\n"));
        };
        line(
            "",
            format!("phi = {}", a.label),
            format!("phi = {}", b.label),
        );
        line(
            "PT residual",
            format!("{:.3e}", a.pt_residual),
            format!("{:.3e}", b.pt_residual),
        );
        line(
            "PT symmetric",
            a.pt_symmetric.to_string(),
            b.pt_symmetric.to_string(),
        );
        line(
            "<p> slope (fit)",
            format!("{:.6}", a.mean_p.slope),
            format!("{:.3e}", b.mean_p.slope),
        );
        line(
            "<p> slope (theory)",
            format!("{:.6}", a.mean_p_slope_theory),
            format!("{:.3e}", b.mean_p_slope_theory),
        );
        line(
            "max |<p>|/t",
            format!("{:.6}", a.mean_p_max_over_t),
            format!("{:.3e}", b.mean_p_max_over_t),
        );
        line(
            "<p^2> t^2 coeff (fit)",
            format!("{:.6}", a.mean_p2_quadratic),
            format!("{:.3e}", b.mean_p2_quadratic),
        );
        line(
            "<p^2> t^2 coeff (theory)",
            format!("{:.6}", a.mean_p2_quadratic_theory),
            format!("{:.3e}", b.mean_p2_quadratic_theory),
        );
        line(
            "<p^2> linear slope (fit)",
            format!("{:.6}", a.mean_p2.slope),
            format!("{:.6}", b.mean_p2.slope),
        );
        line(
            "<p^2> linear slope (theory)",
            "-".into(),
            format!("{:.6}", b.mean_p2_linear_theory),
        );
        line(
            "<p^2> exponent",
            format!("{:.4}", a.mean_p2_exponent),
            format!("{:.4}", b.mean_p2_exponent),
        );
        line(
            "C slope (fit)",
            format!("{:.6e}", a.otoc.slope),
            format!("{:.6e}", b.otoc.slope),
        );
        line(
            "C slope (theory)",
            format!("{:.6e}", a.otoc_slope_theory),
            format!("{:.6e}", b.otoc_slope_theory),
        );
        line(
            "C exponent",
            format!("{:.4}", a.otoc_exponent),
            format!("{:.4}", b.otoc_exponent),
        );
        out
    }
}
