//! Physical parameters, the complex kicking potential, the momentum lattice
//! and the exact state at quantum resonance.
//!
//! # Transform convention
//!
//! Momentum eigenstates are `<theta|n> = e^{i n theta} / sqrt(2 pi)`, so
//!
//! ```text
//! psi(theta) = sum_n psi_n e^{i n theta} / sqrt(2 pi)
//! psi_n      = 1/sqrt(2 pi) * integral e^{-i n theta} psi(theta) dtheta
//! ```
//!
//! On the lattice `theta_j = -pi + 2 pi j / N` the discrete pair used
//! everywhere in the crate is
//!
//! ```text
//! f_j = sum_n c_n e^{i n theta_j}           (momentum -> angle)
//! c_n = (1/N) sum_j f_j e^{-i n theta_j}    (angle -> momentum)
//! ```
//!
//! where `f_j = sqrt(2 pi) psi(theta_j)`. With this pairing the trapezoid
//! rule gives `N(t) = integral |psi|^2 = sum_n |psi_n|^2` exactly on the
//! lattice, and a positive `n` carries positive momentum `p_n = n hbar_eff`.

use crate::bessel;
use crate::error::{Error, Result};
use crate::observables::tail_mass;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The resonance value of the effective Planck constant.
pub const RESONANT_HBAR: f64 = 4.0 * PI;

/// Largest edge-tail probability tolerated before a lattice is declared too
/// small.
pub const TAIL_MASS_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Strength `K` of the real part of the kick.
    pub kick_strength: f64,
    /// Strength `lambda` of the imaginary part of the kick. Zero is the
    /// Hermitian control case.
    pub lambda: f64,
    /// Relative phase between the real and imaginary parts, in radians.
    pub phase: f64,
    pub hbar_eff: f64,
    /// Momentum translation used by the OTOC.
    pub epsilon: f64,
    /// Momentum lattice size, a power of two `>= 8`.
    pub n_modes: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            kick_strength: 1.0,
            lambda: 0.3,
            phase: -PI / 6.0,
            hbar_eff: RESONANT_HBAR,
            epsilon: 1e-5,
            n_modes: 256,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("kick_strength", self.kick_strength),
            ("lambda", self.lambda),
            ("phase", self.phase),
            ("hbar_eff", self.hbar_eff),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda = {} must be >= 0",
                self.lambda
            )));
        }
        if self.hbar_eff <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "hbar_eff = {} must be > 0",
                self.hbar_eff
            )));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon = {} must be > 0",
                self.epsilon
            )));
        }
        if self.n_modes < 8 || !self.n_modes.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "n_modes = {} must be a power of two >= 8",
                self.n_modes
            )));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        (self.hbar_eff - RESONANT_HBAR).abs() <= 1e-12 * RESONANT_HBAR
    }

    pub fn grid(&self) -> MomentumGrid {
        MomentumGrid::new(self.n_modes, self.hbar_eff)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self { phase, ..self }
    }

    pub fn with_n_modes(self, n_modes: usize) -> Self {
        Self { n_modes, ..self }
    }

    fn require_resonance(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::NotResonant(self.hbar_eff))
        }
    }
}

/// Momentum lattice `n = -N/2 .. N/2-1` and its conjugate angle grid.
///
/// Index `k` of a momentum-ordered array holds mode `n = k - N/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    n_modes: usize,
    hbar_eff: f64,
}

impl MomentumGrid {
    pub fn new(n_modes: usize, hbar_eff: f64) -> Self {
        Self { n_modes, hbar_eff }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hbar_eff(&self) -> f64 {
        self.hbar_eff
    }

    /// Mode number held at array index `k`.
    #[inline]
    pub fn mode(&self, k: usize) -> i64 {
        k as i64 - (self.n_modes / 2) as i64
    }

    /// `p_n = n * hbar_eff` at array index `k`.
    #[inline]
    pub fn momentum(&self, k: usize) -> f64 {
        self.mode(k) as f64 * self.hbar_eff
    }

    /// Array index holding mode `n`, if it is on the lattice.
    pub fn index_of(&self, n: i64) -> Option<usize> {
        let k = n + (self.n_modes / 2) as i64;
        (0..self.n_modes as i64).contains(&k).then_some(k as usize)
    }

    /// `theta_j = -pi + 2 pi j / N`.
    #[inline]
    pub fn angle(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.n_modes as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_modes).map(|j| self.angle(j))
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_modes).map(|k| self.momentum(k))
    }
}

/// A state on the momentum lattice, stored with unit total probability.
/// The true norm `N(t)` is carried as `exp(log_norm)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: Vec<Complex64>,
    pub log_norm: f64,
    pub t: u64,
    pub grid: MomentumGrid,
}

impl QuantumState {
    pub fn n_modes(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn probability(&self) -> f64 {
        crate::sum::compensated_sum(self.amplitudes.iter().map(|c| c.norm_sqr()))
    }

    /// Amplitude of mode `n`, zero off the lattice.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        self.grid
            .index_of(n)
            .map_or(Complex64::new(0.0, 0.0), |k| self.amplitudes[k])
    }

    /// Rescales to unit probability and returns the probability found.
    pub(crate) fn renormalize(&mut self) -> f64 {
        let total = self.probability();
        let scale = 1.0 / total.sqrt();
        for c in &mut self.amplitudes {
            *c *= scale;
        }
        total
    }

    pub(crate) fn check_resolution(&self) -> Result<()> {
        let tail = tail_mass(self);
        if tail > TAIL_MASS_LIMIT {
            Err(Error::Resolution {
                t: self.t,
                n_modes: self.n_modes(),
                tail_mass: tail,
                limit: TAIL_MASS_LIMIT,
            })
        } else {
            Ok(())
        }
    }
}

/// `V_K(theta) = K cos(theta) + i lambda cos(theta + phi)`.
pub fn kick_potential(theta: f64, params: &ModelParams) -> Complex64 {
    Complex64::new(
        params.kick_strength * theta.cos(),
        params.lambda * (theta + params.phase).cos(),
    )
}

/// `max_theta |V(theta) - conj(V(-theta))|` over `samples` uniformly spaced
/// angles; zero when the potential is PT-symmetric.
pub fn pt_residual(params: &ModelParams, samples: usize) -> f64 {
    (0..samples)
        .map(|j| {
            let theta = -PI + 2.0 * PI * j as f64 / samples as f64;
            (kick_potential(theta, params) - kick_potential(-theta, params).conj()).norm()
        })
        .fold(0.0, f64::max)
}

/// The zero-momentum ground state `psi(theta) = 1/sqrt(2 pi)`.
pub fn initial_state(params: &ModelParams) -> QuantumState {
    let grid = params.grid();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); params.n_modes];
    amplitudes[params.n_modes / 2] = Complex64::new(1.0, 0.0);
    QuantumState {
        amplitudes,
        log_norm: 0.0,
        t: 0,
        grid,
    }
}

/// Reorders momentum-ordered coefficients into FFT bin order and applies
/// the `(-1)^n` factor that moves the angle origin to `-pi`.
pub(crate) fn momentum_to_fft_order(amplitudes: &[Complex64], out: &mut [Complex64]) {
    let n = amplitudes.len();
    let half = n / 2;
    for (k, &c) in amplitudes.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out[(k + half) % n] = c * sign;
    }
}

/// Inverse of [`momentum_to_fft_order`], also dividing by `N`.
pub(crate) fn fft_order_to_momentum(bins: &[Complex64], out: &mut [Complex64]) {
    let n = bins.len();
    let half = n / 2;
    let inv_n = 1.0 / n as f64;
    for (k, c) in out.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { inv_n } else { -inv_n };
        *c = bins[(k + half) % n] * sign;
    }
}

/// The exact resonant state after `t` kicks,
/// `psi(theta, t) = exp{-i t/(4 pi) [K cos theta + i lambda cos(theta + phi)]} / sqrt(2 pi)`,
/// sampled on the angle grid and transformed to the momentum basis.
pub fn analytic_state(params: &ModelParams, t: u64) -> Result<QuantumState> {
    params.validate()?;
    params.require_resonance()?;
    if t == 0 {
        return Ok(initial_state(params));
    }
    let grid = params.grid();
    let n = params.n_modes;
    let scale = t as f64 / RESONANT_HBAR;
    let exponents: Vec<Complex64> = grid
        .angles()
        .map(|theta| {
            Complex64::new(
                params.lambda * (theta + params.phase).cos(),
                -params.kick_strength * theta.cos(),
            ) * scale
        })
        .collect();
    let max_re = exponents
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut samples: Vec<Complex64> = exponents.iter().map(|e| (e - max_re).exp()).collect();

    let fft = FftPlanner::new().plan_fft_forward(n);
    fft.process(&mut samples);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
    fft_order_to_momentum(&samples, &mut amplitudes);

    let mut state = QuantumState {
        amplitudes,
        log_norm: 0.0,
        t,
        grid,
    };
    let probability = state.renormalize();
    state.log_norm = 2.0 * max_re + probability.ln();
    state.check_resolution()?;
    Ok(state)
}

/// `ln N(t) = ln I_0(lambda t / 2 pi)` through the scaled Bessel path.
pub fn analytic_log_norm(params: &ModelParams, t: u64) -> Result<f64> {
    params.require_resonance()?;
    let x = params.lambda * t as f64 / (2.0 * PI);
    bessel::ln_bessel_i(0, x)
}
