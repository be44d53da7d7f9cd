//! Small weighted polynomial least-squares fits.

use crate::error::{Error, Result};

/// Polynomial fit in the centred and scaled variable `u = (x - center) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyfit {
    pub center: f64,
    pub scale: f64,
    /// Coefficients of `u^0, u^1, ...`.
    pub coeffs: Vec<f64>,
    /// Root-mean-square (unweighted) residual over the fitted points.
    pub rms_residual: f64,
}

impl Polyfit {
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.scale;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// Coefficients of `x^0, x^1, x^2` for fits of degree at most two.
    pub fn raw_coefficients(&self) -> Vec<f64> {
        let (m, s) = (self.center, self.scale);
        let a = |i: usize| self.coeffs.get(i).copied().unwrap_or(0.0);
        let (a0, a1, a2) = (a(0), a(1), a(2));
        let mut out = vec![
            a0 - a1 * m / s + a2 * m * m / (s * s),
            a1 / s - 2.0 * a2 * m / (s * s),
            a2 / (s * s),
        ];
        out.truncate(self.coeffs.len());
        out
    }

    /// Stationary point of a quadratic, computed in the scaled variable.
    pub fn vertex(&self) -> Option<f64> {
        match self.coeffs.as_slice() {
            [_, a1, a2] if *a2 != 0.0 => Some(self.center - self.scale * a1 / (2.0 * a2)),
            _ => None,
        }
    }
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Weighted least squares fit of `ys` by a polynomial of `degree` in `xs`.
/// Weights multiply the squared residuals; `None` means uniform.
pub fn polyfit(xs: &[f64], ys: &[f64], weights: Option<&[f64]>, degree: usize) -> Result<Polyfit> {
    let n = xs.len();
    if n != ys.len() || weights.is_some_and(|w| w.len() != n) {
        return Err(Error::InsufficientSupport("mismatched fit inputs".into()));
    }
    if n < degree + 1 {
        return Err(Error::InsufficientSupport(format!(
            "{n} points for a degree-{degree} fit"
        )));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let scale = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };

    let dim = degree + 1;
    let mut ata = vec![vec![0.0; dim]; dim];
    let mut atb = vec![0.0; dim];
    for i in 0..n {
        let u = (xs[i] - center) / scale;
        let w = weights.map_or(1.0, |w| w[i]);
        let powers: Vec<f64> = (0..dim).map(|k| u.powi(k as i32)).collect();
        for r in 0..dim {
            atb[r] += w * powers[r] * ys[i];
            for c in 0..dim {
                ata[r][c] += w * powers[r] * powers[c];
            }
        }
    }
    let coeffs = solve(ata, atb)
        .ok_or_else(|| Error::InsufficientSupport("singular normal equations".into()))?;
    let mut fit = Polyfit {
        center,
        scale,
        coeffs,
        rms_residual: 0.0,
    };
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - fit.eval(x)).powi(2))
        .sum();
    fit.rms_residual = (ss / n as f64).sqrt();
    Ok(fit)
}

/// Ordinary least-squares line with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let fit = polyfit(xs, ys, None, 1)?;
    let raw = fit.raw_coefficients();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res = fit.rms_residual.powi(2) * ys.len() as f64;
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(LinearFit {
        slope: raw[1],
        intercept: raw[0],
        r_squared,
    })
}
