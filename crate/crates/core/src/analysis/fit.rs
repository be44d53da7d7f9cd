//! Exponential and Gaussian fits of momentum distributions.
//!
//! Both fits are linear least squares on `ln |psi(p)|^2`:
//!
//! - exponential, `|psi(p)|^2 ~ exp(-|p - p_peak| / xi)`, fitted separately on
//!   each flank of the peak;
//! - Gaussian, `|psi(p)|^2 ~ exp(-(p - p_c)^2 / sigma)`, a probability-weighted
//!   quadratic fit whose vertex is `p_c` and whose inverse curvature is
//!   `sigma` (so the variance is `sigma / 2`).

use super::lsq::{polyfit, Polyfit};
use crate::error::{Error, Result};
use crate::observables::MomentumDistribution;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Points with weight below `floor * peak` are left out.
    pub floor: f64,
    /// Number of points, counting the peak itself, dropped from the start
    /// of each flank (exponential fit only).
    pub exclude_near_peak: usize,
    /// Fits whose RMS log residual exceeds this are flagged.
    pub residual_ceiling: f64,
}

impl FitOptions {
    pub const EXPONENTIAL: FitOptions = FitOptions {
        floor: 1e-12,
        exclude_near_peak: 0,
        residual_ceiling: 2.0,
    };

    pub const GAUSSIAN: FitOptions = FitOptions {
        floor: 1e-2,
        exclude_near_peak: 0,
        residual_ceiling: 0.5,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Exponential,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FitParams {
    Exponential {
        /// Point-count weighted mean of the two flank lengths.
        xi: f64,
        xi_left: Option<f64>,
        xi_right: Option<f64>,
    },
    Gaussian {
        p_c: f64,
        sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: FitParams,
    pub rms_log_residual: f64,
    /// Momentum range actually fitted.
    pub support: (f64, f64),
    pub points: usize,
    /// Set when the residual exceeds the configured ceiling.
    pub flagged: bool,
}

impl FitResult {
    pub fn kind(&self) -> FitKind {
        match self.params {
            FitParams::Exponential { .. } => FitKind::Exponential,
            FitParams::Gaussian { .. } => FitKind::Gaussian,
        }
    }

    pub fn xi(&self) -> Option<f64> {
        match self.params {
            FitParams::Exponential { xi, .. } => Some(xi),
            _ => None,
        }
    }

    pub fn center(&self) -> Option<f64> {
        match self.params {
            FitParams::Gaussian { p_c, .. } => Some(p_c),
            _ => None,
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.params {
            FitParams::Gaussian { sigma, .. } => Some(sigma),
            _ => None,
        }
    }
}

fn above_floor(dist: &MomentumDistribution, floor: f64) -> Vec<usize> {
    let peak = dist.weights[dist.peak_index()];
    (0..dist.len())
        .filter(|&i| dist.weights[i] > 0.0 && dist.weights[i] >= floor * peak)
        .collect()
}

struct Flank {
    xi: f64,
    fit: Polyfit,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

pub fn fit_exponential(dist: &MomentumDistribution, opts: &FitOptions) -> Result<FitResult> {
    let support = above_floor(dist, opts.floor);
    if support.len() < 5 {
        return Err(Error::InsufficientSupport(format!(
            "{} points above the floor, need 5",
            support.len()
        )));
    }
    let peak = dist.peak_index();
    let p_peak = dist.momenta[peak];

    let flank = |side: f64| -> Result<Option<Flank>> {
        let mut idx: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&i| i == peak || side * (dist.momenta[i] - p_peak) > 0.0)
            .collect();
        idx.sort_by(|&a, &b| {
            (dist.momenta[a] - p_peak)
                .abs()
                .total_cmp(&(dist.momenta[b] - p_peak).abs())
        });
        let idx = &idx[opts.exclude_near_peak.min(idx.len())..];
        if idx.len() < 2 {
            return Ok(None);
        }
        let xs: Vec<f64> = idx
            .iter()
            .map(|&i| (dist.momenta[i] - p_peak).abs())
            .collect();
        let ys: Vec<f64> = idx.iter().map(|&i| dist.weights[i].ln()).collect();
        let fit = polyfit(&xs, &ys, None, 1)?;
        let slope = fit.raw_coefficients()[1];
        if slope >= 0.0 {
            return Err(Error::NonDecaying(slope));
        }
        Ok(Some(Flank {
            xi: -1.0 / slope,
            fit,
            xs,
            ys,
        }))
    };
    let left = flank(-1.0)?;
    let right = flank(1.0)?;
    let flanks: Vec<&Flank> = left.iter().chain(right.iter()).collect();
    if flanks.is_empty() {
        return Err(Error::InsufficientSupport(
            "no flank has two points after exclusion".into(),
        ));
    }
    let total: usize = flanks.iter().map(|f| f.xs.len()).sum();
    let xi = flanks.iter().map(|f| f.xi * f.xs.len() as f64).sum::<f64>() / total as f64;
    let ss: f64 = flanks
        .iter()
        .flat_map(|f| {
            f.xs.iter()
                .zip(&f.ys)
                .map(|(&x, &y)| (y - f.fit.eval(x)).powi(2))
        })
        .sum();
    let rms = (ss / total as f64).sqrt();

    let lo = support
        .iter()
        .map(|&i| dist.momenta[i])
        .fold(f64::INFINITY, f64::min);
    let hi = support
        .iter()
        .map(|&i| dist.momenta[i])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        params: FitParams::Exponential {
            xi,
            xi_left: left.map(|f| f.xi),
            xi_right: right.map(|f| f.xi),
        },
        rms_log_residual: rms,
        support: (lo, hi),
        points: total,
        flagged: rms > opts.residual_ceiling,
    })
}

pub fn fit_gaussian(dist: &MomentumDistribution, opts: &FitOptions) -> Result<FitResult> {
    let support = above_floor(dist, opts.floor);
    if support.len() < 5 {
        return Err(Error::InsufficientSupport(format!(
            "{} points above the floor, need 5",
            support.len()
        )));
    }
    let xs: Vec<f64> = support.iter().map(|&i| dist.momenta[i]).collect();
    let ys: Vec<f64> = support.iter().map(|&i| dist.weights[i].ln()).collect();
    let ws: Vec<f64> = support.iter().map(|&i| dist.weights[i]).collect();
    let fit = polyfit(&xs, &ys, Some(&ws), 2)?;
    let curvature = fit.raw_coefficients()[2];
    if curvature >= 0.0 {
        return Err(Error::NonConcave(curvature));
    }
    let p_c = fit.vertex().expect("quadratic fit has a vertex");
    Ok(FitResult {
        params: FitParams::Gaussian {
            p_c,
            sigma: -1.0 / curvature,
        },
        rms_log_residual: fit.rms_residual,
        support: (xs[0], xs[xs.len() - 1]),
        points: xs.len(),
        flagged: fit.rms_residual > opts.residual_ceiling,
    })
}
