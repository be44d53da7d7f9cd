//! Norm-rescaled expectation values and the rescaled OTOC.
//!
//! States are stored with unit probability, so the division by `N(t)` in the
//! rescaled definitions is implicit. Every moment is additionally divided by
//! the state's actual probability sum so that round-off drift in the
//! normalisation never leaks into the observables.

use crate::model::QuantumState;
use crate::sum::CompensatedSum;
use serde::{Deserialize, Serialize};

fn weights(state: &QuantumState) -> impl Iterator<Item = (f64, f64)> + '_ {
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| (state.grid.momentum(k), c.norm_sqr()))
}

/// Returns `(sum w, sum w p, sum w p^2)` with compensated accumulation.
fn raw_moments(state: &QuantumState) -> (f64, f64, f64) {
    let (mut s0, mut s1, mut s2) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for (p, w) in weights(state) {
        s0.add(w);
        s1.add(w * p);
        s2.add(w * p * p);
    }
    (s0.value(), s1.value(), s2.value())
}

/// `<p> = sum_n p_n |psi_n|^2 / N(t)`.
pub fn mean_p(state: &QuantumState) -> f64 {
    let (s0, s1, _) = raw_moments(state);
    s1 / s0
}

/// `<p^2> = sum_n p_n^2 |psi_n|^2 / N(t)`.
pub fn mean_p2(state: &QuantumState) -> f64 {
    let (s0, _, s2) = raw_moments(state);
    s2 / s0
}

/// `<p^2> - <p>^2`, accumulated about the mean.
pub fn momentum_variance(state: &QuantumState) -> f64 {
    let mu = mean_p(state);
    let mut s0 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for (p, w) in weights(state) {
        let d = p - mu;
        s0.add(w);
        s2.add(w * d * d);
    }
    s2.value() / s0.value()
}

/// Rescaled OTOC `C = 1 - |<psi| e^{-i eps p} |psi>|^2 / N^2`, exact in `eps`.
///
/// The characteristic function is evaluated about the mean momentum, where
/// `1 - Re z` and `Im z` are both small and can be formed without
/// cancellation:
///
/// ```text
/// u = sum w 2 sin^2(eps (p - mu) / 2),  b = sum w sin(eps (p - mu))
/// C = u (2 - u) - b^2                   (with w summing to one)
/// ```
pub fn otoc(state: &QuantumState, epsilon: f64) -> f64 {
    if epsilon == 0.0 {
        return 0.0;
    }
    let mu = mean_p(state);
    let (mut s0, mut u, mut b) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for (p, w) in weights(state) {
        let arg = epsilon * (p - mu);
        let half = (0.5 * arg).sin();
        s0.add(w);
        u.add(w * 2.0 * half * half);
        b.add(w * arg.sin());
    }
    let total = s0.value();
    let u = u.value() / total;
    let b = b.value() / total;
    (u * (2.0 - u) - b * b).clamp(0.0, 1.0)
}

/// Probability held in the outer eighth of the lattice on each side
/// (`|n| >= 3N/8`).
pub fn tail_mass(state: &QuantumState) -> f64 {
    let n = state.n_modes();
    let edge = n / 8;
    let total: f64 = state.amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let tail: f64 = state.amplitudes[..edge]
        .iter()
        .chain(&state.amplitudes[n - edge..])
        .map(|c| c.norm_sqr())
        .sum();
    tail / total
}

/// `|psi(p)|^2` on the lattice, normalised to unit total weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub modes: Vec<i64>,
    pub momenta: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MomentumDistribution {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.momenta
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    pub fn center_of_mass(&self) -> f64 {
        crate::sum::compensated_sum(self.iter().map(|(p, w)| p * w))
    }

    /// Index of the largest weight.
    pub fn peak_index(&self) -> usize {
        self.weights
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &w)| {
                if w > best.1 {
                    (i, w)
                } else {
                    best
                }
            })
            .0
    }
}

pub fn momentum_distribution(state: &QuantumState) -> MomentumDistribution {
    let (s0, _, _) = raw_moments(state);
    let n = state.n_modes();
    MomentumDistribution {
        modes: (0..n).map(|k| state.grid.mode(k)).collect(),
        momenta: (0..n).map(|k| state.grid.momentum(k)).collect(),
        weights: state.amplitudes.iter().map(|c| c.norm_sqr() / s0).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: u64,
    pub log_norm: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub otoc: f64,
}

impl ObservableRecord {
    pub fn from_state(state: &QuantumState, epsilon: f64) -> Self {
        Self {
            t: state.t,
            log_norm: state.log_norm,
            mean_p: mean_p(state),
            mean_p2: mean_p2(state),
            otoc: otoc(state, epsilon),
        }
    }
}

/// Selects one column of an [`ObservableSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesField {
    LogNorm,
    MeanP,
    MeanP2,
    Otoc,
}

impl SeriesField {
    pub fn get(self, record: &ObservableRecord) -> f64 {
        match self {
            SeriesField::LogNorm => record.log_norm,
            SeriesField::MeanP => record.mean_p,
            SeriesField::MeanP2 => record.mean_p2,
            SeriesField::Otoc => record.otoc,
        }
    }
}

/// Per-kick record of the observables, `t` strictly increasing from zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub entries: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, record: ObservableRecord) {
        debug_assert!(self.entries.last().is_none_or(|last| last.t < record.t));
        self.entries.push(record);
    }

    pub fn times(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.t).collect()
    }

    pub fn column(&self, field: SeriesField) -> Vec<f64> {
        self.entries.iter().map(|e| field.get(e)).collect()
    }

    pub fn at(&self, t: u64) -> Option<&ObservableRecord> {
        self.entries
            .binary_search_by_key(&t, |e| e.t)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn last(&self) -> Option<&ObservableRecord> {
        self.entries.last()
    }
}
