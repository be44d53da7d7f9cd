//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerical kernels.

#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Double-double number `hi + lo`, about 32 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        self * Dd::new(o)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, o: f64) -> Dd {
        self / Dd::new(o)
    }
}

/// `I_m(x)` by the power series, summed in double-double until the terms
/// stop contributing. Valid while the largest term fits in an `f64`
/// (`x` up to about 700).
pub fn bessel_i_series(m: u32, x: Dd) -> Dd {
    let half = x * 0.5;
    let q = half * half;
    let mut term = Dd::ONE;
    for j in 1..=m {
        term = term * half / j as f64;
    }
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term = term * q / (k as f64 * (k + m) as f64);
        sum = sum + term;
        if term.hi.abs() < 1e-34 * sum.hi.abs() || term.hi == 0.0 {
            return sum;
        }
    }
}

pub fn bessel_i_oracle(m: u32, x: f64) -> f64 {
    bessel_i_series(m, Dd::new(x)).to_f64()
}

/// Closed-form parent curves at quantum resonance in double-double.
#[derive(Debug, Clone, Copy)]
pub struct ParentCurves {
    pub k: f64,
    pub lambda: f64,
    pub phi: f64,
}

impl ParentCurves {
    fn x(&self, t: Dd) -> Dd {
        t * self.lambda / (Dd::PI * 2.0)
    }

    fn ratios(&self, t: Dd) -> (Dd, Dd) {
        let x = self.x(t);
        let i0 = bessel_i_series(0, x);
        let i1 = bessel_i_series(1, x);
        let r = i1 / i0;
        // I_1 / (x I_0) from the reduced series, regular at x = 0
        let r_over_x = if x.hi == 0.0 { Dd::new(0.5) } else { r / x };
        (r, r_over_x)
    }

    fn coefficients(&self) -> (f64, f64, f64) {
        let s = self.phi.sin();
        (
            self.k * s,
            self.k * self.k * s * s,
            self.k * self.k * (2.0 * self.phi).cos() + self.lambda * self.lambda,
        )
    }

    pub fn mean_p(&self, t: Dd) -> Dd {
        let (r, _) = self.ratios(t);
        -(r * t * self.coefficients().0)
    }

    /// `<p^2>` split into its `K^2 sin^2(phi) t^2` and `B` parts.
    pub fn mean_p2_parts(&self, t: Dd) -> (Dd, Dd) {
        let (_, g) = self.ratios(t);
        let (_, ks2, b) = self.coefficients();
        (t * t * ks2, t * t * g * b)
    }

    /// Momentum variance split into its `K^2 sin^2(phi)` and `B` parts.
    pub fn variance_parts(&self, t: Dd) -> (Dd, Dd) {
        let (r, g) = self.ratios(t);
        let (_, ks2, b) = self.coefficients();
        (t * t * (Dd::ONE - r * r) * ks2, t * t * g * b)
    }

    pub fn mean_p2(&self, t: Dd) -> Dd {
        let (_, g) = self.ratios(t);
        let (_, ks2, b) = self.coefficients();
        t * t * (Dd::new(ks2) + g * b)
    }

    pub fn variance(&self, t: Dd) -> Dd {
        let (r, g) = self.ratios(t);
        let (_, ks2, b) = self.coefficients();
        t * t * ((Dd::ONE - r * r) * ks2 + g * b)
    }
}

/// `(f(t+h) - 2 f(t) + f(t-h)) / h^2` evaluated in double-double.
pub fn second_difference_dd(f: impl Fn(Dd) -> Dd, t: f64, h: f64) -> f64 {
    let (t, hd) = (Dd::new(t), Dd::new(h));
    let num = f(t + hd) - f(t) * 2.0 + f(t - hd);
    (num / (hd * hd)).to_f64()
}

/// `(f(t+h) - f(t-h)) / 2h` evaluated in double-double.
pub fn first_difference_dd(f: impl Fn(Dd) -> Dd, t: f64, h: f64) -> f64 {
    let (t, hd) = (Dd::new(t), Dd::new(h));
    ((f(t + hd) - f(t - hd)) / (hd * 2.0)).to_f64()
}

/// `|got - (a + b)| / (|a| + |b|)`: relative error of a two-term sum,
/// well defined where the sum itself crosses zero.
pub fn rel_err_parts(got: f64, a: f64, b: f64) -> f64 {
    if got == a + b {
        0.0
    } else {
        (got - (a + b)).abs() / (a.abs() + b.abs())
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
