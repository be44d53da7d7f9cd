//! Closed-form results at quantum resonance.
//!
//! With `x = lambda t / 2 pi`, `r = I_1(x)/I_0(x)` and
//! `B = K^2 cos(2 phi) + lambda^2`:
//!
//! ```text
//! <p>     = -K sin(phi) r t
//! <p^2>   = K^2 sin^2(phi) t^2 + (2 pi / lambda) r B t
//! C       ~ eps^2 (<p^2> - <p>^2)
//!         = eps^2 [K^2 sin^2(phi) t^2 (1 - r^2) + (2 pi / lambda) r B t]
//! ```
//!
//! The second derivatives reduce to `(x r)'' = 2 r' + x r''` with
//!
//! ```text
//! r'  = (1 + I_2/I_0)/2 - r^2
//! r'' = (I_3/I_0 - 3 r)/4 - (3/2) r I_2/I_0 + 2 r^3
//! S_p = -K sin(phi) (lambda / 2 pi) (x r)''
//! S_E = 2 K^2 sin^2(phi) + (x r)'' B
//! S_C = eps^2 [K^2 sin^2(phi) (2 - ((x r)^2)'') + (x r)'' B]
//! ```
//!
//! Above the Bessel switch point these derivatives cancel down to
//! `O(x^-3)`, so they are summed instead from the asymptotic series of
//! `w = x (1 - r) = 1/2 + 1/(8x) + 1/(8x^2) + ...`.
//!
//! `S_E` is written with the `S_p / (K lambda sin phi)` quotient already
//! cancelled, and `(2 pi / lambda) r` is evaluated as `t I_1/(x I_0)`, so
//! every function is regular at `lambda = 0` and `sin(phi) = 0`.
//!
//! Time is continuous here. All functions expect `t >= 0` and a
//! non-negative `lambda`, and panic otherwise.

use crate::bessel;
use crate::error::{Error, Result};
use crate::model::{ModelParams, RESONANT_HBAR};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Number of coefficients kept in the large-`x` expansion below.
const TAIL_TERMS: usize = 60;

/// Coefficients `c_k` of `w(x) = x (1 - I_1(x)/I_0(x)) = sum_k c_k x^{-k}`
/// (`1/2, 1/8, 1/8, 25/128, ...`), obtained by dividing the asymptotic
/// expansions of `I_0` and `I_1`.
fn tail_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let n = TAIL_TERMS + 1;
        let expansion = |m: u32| {
            let mu = 4.0 * (m * m) as f64;
            let mut out = vec![1.0; n];
            for k in 1..n {
                let odd = (2 * k - 1) as f64;
                out[k] = -out[k - 1] * (mu - odd * odd) / (8.0 * k as f64);
            }
            out
        };
        let (p0, p1) = (expansion(0), expansion(1));
        let mut c = vec![0.0; TAIL_TERMS];
        for k in 0..TAIL_TERMS {
            let conv: f64 = (0..k).map(|j| c[j] * p0[k - j]).sum();
            c[k] = (p0[k + 1] - p1[k + 1] - conv) / p0[0];
        }
        c
    })
}

/// Sums `sum_k coeff(k) x^{-k-shift}` up to the smallest term.
fn asymptotic_sum(x: f64, start: usize, shift: i32, coeff: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in start..TAIL_TERMS {
        let term = coeff(k) * x.powi(-(k as i32) - shift);
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Bessel ratios and the `x`-derivatives every second-derivative formula
/// needs, at one argument `x = lambda t / 2 pi`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    /// `I_1 / I_0`
    r: f64,
    /// `I_1 / (x I_0)`
    r_over_x: f64,
    /// `(x r)'`
    d_xr: f64,
    /// `(x r)''`
    d2_xr: f64,
    /// `2 - ((x r)^2)''`, the OTOC curvature term
    curv: f64,
}

impl Kernel {
    fn at(params: &ModelParams, t: f64) -> Self {
        assert!(
            t >= 0.0 && t.is_finite(),
            "theory: t = {t} must be finite and >= 0"
        );
        let x = params.lambda * t / (2.0 * PI);
        let eval = |m| bessel::ratio_im_i0(m, x).expect("theory: lambda must be >= 0");
        let r = eval(1);
        let r_over_x = bessel::ratio_i1_i0_over_x(x).expect("theory: lambda must be >= 0");
        if x <= bessel::SWITCH_POINT {
            let (rho2, rho3) = (eval(2), eval(3));
            let dr = 0.5 * (1.0 + rho2) - r * r;
            let d2r = 0.25 * (rho3 - 3.0 * r) - 1.5 * r * rho2 + 2.0 * r * r * r;
            let d_xr = r + x * dr;
            let d2_xr = 2.0 * dr + x * d2r;
            Self {
                r,
                r_over_x,
                d_xr,
                d2_xr,
                curv: 2.0 - 2.0 * d_xr * d_xr - 2.0 * x * r * d2_xr,
            }
        } else {
            // With x r = x - w, every derivative is a termwise derivative
            // of the w series and carries full relative accuracy even where
            // the closed forms cancel to O(x^-3).
            let c = tail_coefficients();
            let cc = |m: usize| (0..=m).map(|j| c[j] * c[m - j]).sum::<f64>();
            let kf = |k: usize| k as f64;
            Self {
                r,
                r_over_x,
                d_xr: 1.0 + asymptotic_sum(x, 1, 1, |k| c[k] * kf(k)),
                d2_xr: -asymptotic_sum(x, 1, 2, |k| c[k] * kf(k) * kf(k + 1)),
                curv: asymptotic_sum(x, 2, 1, |m| kf(m) * kf(m - 1) * (2.0 * c[m] - cc(m - 1))),
            }
        }
    }
}

struct Coefficients {
    k_sin: f64,
    k2_sin2: f64,
    /// `K^2 cos(2 phi) + lambda^2`
    bracket: f64,
}

impl Coefficients {
    fn of(params: &ModelParams) -> Self {
        let k = params.kick_strength;
        let s = params.phase.sin();
        Self {
            k_sin: k * s,
            k2_sin2: k * k * s * s,
            bracket: k * k * (2.0 * params.phase).cos() + params.lambda * params.lambda,
        }
    }
}

/// Crossover time `t_c = 2 pi / lambda`.
pub fn t_c(params: &ModelParams) -> Result<f64> {
    if params.lambda > 0.0 {
        Ok(2.0 * PI / params.lambda)
    } else {
        Err(Error::Domain(
            "t_c is undefined for lambda <= 0 (no crossover in the Hermitian case)".into(),
        ))
    }
}

/// Directed current `<p>(t)`.
pub fn mean_p_theory(params: &ModelParams, t: f64) -> f64 {
    let kern = Kernel::at(params, t);
    -Coefficients::of(params).k_sin * kern.r * t
}

/// Mean energy `<p^2>(t)`; reduces to `K^2 t^2 / 2` at `lambda = 0`.
pub fn mean_p2_theory(params: &ModelParams, t: f64) -> f64 {
    let kern = Kernel::at(params, t);
    let c = Coefficients::of(params);
    t * t * (c.k2_sin2 + kern.r_over_x * c.bracket)
}

/// `<p^2> - <p>^2`.
pub fn momentum_variance_theory(params: &ModelParams, t: f64) -> f64 {
    let kern = Kernel::at(params, t);
    let c = Coefficients::of(params);
    t * t * (c.k2_sin2 * (1.0 - kern.r * kern.r) + kern.r_over_x * c.bracket)
}

/// Small-`epsilon` OTOC, `eps^2 (<p^2> - <p>^2)`.
pub fn otoc_theory(params: &ModelParams, t: f64, epsilon: f64) -> f64 {
    epsilon * epsilon * momentum_variance_theory(params, t)
}

/// `d<p>/dt`.
pub fn dp_dt_theory(params: &ModelParams, t: f64) -> f64 {
    let kern = Kernel::at(params, t);
    -Coefficients::of(params).k_sin * kern.d_xr
}

/// `S_p = d^2 <p> / dt^2`.
pub fn s_p_theory(params: &ModelParams, t: f64) -> f64 {
    let kern = Kernel::at(params, t);
    -Coefficients::of(params).k_sin * params.lambda / (2.0 * PI) * kern.d2_xr
}

/// `S_E = d^2 <p^2> / dt^2`.
pub fn s_e_theory(params: &ModelParams, t: f64) -> f64 {
    let kern = Kernel::at(params, t);
    let c = Coefficients::of(params);
    2.0 * c.k2_sin2 + kern.d2_xr * c.bracket
}

/// `S_C = eps^2 [S_E - 2 (d<p>/dt)^2 - 2 <p> S_p]`, evaluated in the
/// equivalent form `eps^2 [K^2 sin^2(phi) (2 - ((x r)^2)'') + B (x r)'']`,
/// which does not cancel at large `t`.
pub fn s_c_theory(params: &ModelParams, t: f64, epsilon: f64) -> f64 {
    let kern = Kernel::at(params, t);
    let c = Coefficients::of(params);
    epsilon * epsilon * (c.k2_sin2 * kern.curv + c.bracket * kern.d2_xr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `t < 0.1 t_c`
    Small,
    Crossover,
    /// `t > 10 t_c`
    Large,
}

impl Regime {
    pub fn classify(params: &ModelParams, t: f64) -> Self {
        match t_c(params) {
            Err(_) => Regime::Small,
            Ok(tc) if t < 0.1 * tc => Regime::Small,
            Ok(tc) if t > 10.0 * tc => Regime::Large,
            Ok(_) => Regime::Crossover,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Small => "small",
            Regime::Crossover => "crossover",
            Regime::Large => "large",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The limiting forms of every observable in one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptote {
    pub mean_p: f64,
    pub mean_p2: f64,
    pub otoc: f64,
    pub s_p: f64,
    pub s_e: f64,
    pub s_c: f64,
    pub dp_dt: f64,
}

impl Asymptote {
    /// `lambda t / 2 pi << 1`.
    pub fn small_t(params: &ModelParams, t: f64, epsilon: f64) -> Self {
        let c = Coefficients::of(params);
        let lam = params.lambda;
        let k2_l2 = params.kick_strength.powi(2) + lam * lam;
        let eps2 = epsilon * epsilon;
        Self {
            mean_p: -c.k_sin * lam * t * t / (4.0 * PI),
            mean_p2: 0.5 * k2_l2 * t * t,
            otoc: 0.5 * eps2 * k2_l2 * t * t,
            s_p: -c.k_sin * lam / (2.0 * PI),
            s_e: k2_l2,
            s_c: eps2 * k2_l2,
            dp_dt: -c.k_sin * lam * t / (2.0 * PI),
        }
    }

    /// `lambda t / 2 pi >> 1`; requires `lambda > 0`.
    pub fn large_t(params: &ModelParams, t: f64, epsilon: f64) -> Self {
        let c = Coefficients::of(params);
        let lam = params.lambda.abs();
        let k2 = params.kick_strength.powi(2);
        let cos2 = (2.0 * params.phase).cos();
        Self {
            mean_p: -c.k_sin * (t - PI / lam),
            mean_p2: c.k2_sin2 * t * t + 2.0 * PI * t * c.bracket / lam,
            otoc: 2.0 * PI * epsilon * epsilon / lam * (0.5 * (1.0 + cos2) * k2 + lam * lam) * t,
            s_p: 0.0,
            s_e: 2.0 * c.k2_sin2,
            s_c: 0.0,
            dp_dt: -c.k_sin,
        }
    }
}

/// Exact values at one time, the regime label and, outside the crossover,
/// the applicable asymptotic values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub t: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub otoc: f64,
    pub s_p: f64,
    pub s_e: f64,
    pub s_c: f64,
    pub dp_dt: f64,
    pub regime: Regime,
    pub asymptote: Option<Asymptote>,
}

pub fn asymptotic_regime_values(params: &ModelParams, t: f64, epsilon: f64) -> TheoryPoint {
    let regime = Regime::classify(params, t);
    let asymptote = match regime {
        Regime::Small => Some(Asymptote::small_t(params, t, epsilon)),
        Regime::Large => Some(Asymptote::large_t(params, t, epsilon)),
        Regime::Crossover => None,
    };
    TheoryPoint {
        t,
        mean_p: mean_p_theory(params, t),
        mean_p2: mean_p2_theory(params, t),
        otoc: otoc_theory(params, t, epsilon),
        s_p: s_p_theory(params, t),
        s_e: s_e_theory(params, t),
        s_c: s_c_theory(params, t, epsilon),
        dp_dt: dp_dt_theory(params, t),
        regime,
        asymptote,
    }
}

/// Number of trapezoid nodes that resolves the closed-form state at time `t`.
pub fn quadrature_points(params: &ModelParams, t: f64) -> usize {
    let phase_band = params.kick_strength.abs() * t / RESONANT_HBAR;
    let envelope = params.lambda * t / RESONANT_HBAR;
    let band = phase_band + 12.0 * (envelope + 1.0).sqrt() + 40.0;
    ((4.0 * band) as usize).next_power_of_two().max(256)
}

/// `e^z - 1` without cancellation for small `|z|`.
fn complex_expm1(re: f64, im: f64) -> (f64, f64) {
    let (s, c) = im.sin_cos();
    let half = (0.5 * im).sin();
    let em1 = re.exp_m1();
    (em1 * c - 2.0 * half * half, em1 * s + s)
}

/// Rescaled OTOC `1 - |<psi|e^{-i eps p}|psi>|^2 / N^2` evaluated exactly in
/// `eps` by trapezoid quadrature of the closed-form resonant state, without
/// any FFT or time stepping.
///
/// `e^{-i eps p}` translates the angle by `delta = eps hbar`. Writing
/// `f(theta) = psi(theta)`, `h(theta) = f(theta - delta) - f(theta)` and
/// `c = <f, h> / <f, f>`, the rescaled OTOC is `||h - c f||^2 / ||f||^2`,
/// which avoids forming `1 - |z|^2` directly.
pub fn otoc_exact(params: &ModelParams, t: f64, epsilon: f64, points: usize) -> f64 {
    assert!(t >= 0.0 && points >= 8);
    let scale = t / RESONANT_HBAR;
    let delta = epsilon * RESONANT_HBAR;
    let (lam, k, phi) = (params.lambda, params.kick_strength, params.phase);
    let sin_half_delta = (0.5 * delta).sin();

    let thetas: Vec<f64> = (0..points)
        .map(|j| -PI + 2.0 * PI * j as f64 / points as f64)
        .collect();
    let log_amp: Vec<f64> = thetas
        .iter()
        .map(|&th| scale * lam * (th + phi).cos())
        .collect();
    let max_log = log_amp.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut f = Vec::with_capacity(points);
    let mut h = Vec::with_capacity(points);
    for (&th, &la) in thetas.iter().zip(&log_amp) {
        let amp = (la - max_log).exp();
        let (s, c) = (-scale * k * th.cos()).sin_cos();
        let fv = (amp * c, amp * s);
        // cos(u - delta) - cos(u) = 2 sin(u - delta/2) sin(delta/2)
        let d_re = scale * lam * 2.0 * (th + phi - 0.5 * delta).sin() * sin_half_delta;
        let d_im = -scale * k * 2.0 * (th - 0.5 * delta).sin() * sin_half_delta;
        let (e_re, e_im) = complex_expm1(d_re, d_im);
        h.push((fv.0 * e_re - fv.1 * e_im, fv.0 * e_im + fv.1 * e_re));
        f.push(fv);
    }

    let norm: f64 = crate::sum::compensated_sum(f.iter().map(|(a, b)| a * a + b * b));
    let mut cr = crate::sum::CompensatedSum::new();
    let mut ci = crate::sum::CompensatedSum::new();
    for ((fr, fi), (hr, hi)) in f.iter().zip(&h) {
        // conj(f) * h
        cr.add(fr * hr + fi * hi);
        ci.add(fr * hi - fi * hr);
    }
    let (cr, ci) = (cr.value() / norm, ci.value() / norm);
    let residual = crate::sum::compensated_sum(f.iter().zip(&h).map(|((fr, fi), (hr, hi))| {
        let rr = hr - (cr * fr - ci * fi);
        let ri = hi - (cr * fi + ci * fr);
        rr * rr + ri * ri
    }));
    residual / norm
}
