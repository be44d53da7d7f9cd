//! Split-operator Floquet propagation `U = U_f U_K`.
//!
//! The kick is diagonal on the angle grid and the free evolution is diagonal
//! in momentum, so one step is an inverse FFT, a pointwise multiply by the
//! kick table, a forward FFT and a pointwise multiply by the free-phase table.
//! The state is renormalised after every kick and the logarithm of the
//! probability growth is accumulated into `log_norm`.

use crate::error::{Error, Result};
use crate::model::{
    fft_order_to_momentum, initial_state, kick_potential, momentum_to_fft_order, ModelParams,
    QuantumState,
};
use crate::observables::{ObservableRecord, ObservableSeries};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Precomputed kick and free-phase tables plus FFT plans for one parameter
/// point. Immutable once built; may be shared between threads.
#[derive(Clone)]
pub struct PropagatorPlan {
    n_modes: usize,
    kick_table: Vec<Complex64>,
    free_table: Vec<Complex64>,
    unitary: bool,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PropagatorPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PropagatorPlan")
            .field("n_modes", &self.n_modes)
            .field("unitary", &self.unitary)
            .finish_non_exhaustive()
    }
}

/// `exp(-i p_n^2 / (2 hbar))` for `p_n = n hbar`, i.e. `exp(-2 pi i n^2 q)`
/// with `q = hbar / 4 pi`. The phase is reduced modulo one turn before the
/// trigonometric call so that `q = 1` gives exactly `1 + 0i`.
fn free_phase(n: i64, hbar_eff: f64) -> Complex64 {
    let q = hbar_eff / (4.0 * PI);
    let q_frac = q - q.floor();
    let turns = ((n * n) as f64 * q_frac).fract();
    let (s, c) = (2.0 * PI * turns).sin_cos();
    Complex64::new(c, -s)
}

impl PropagatorPlan {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let grid = params.grid();
        let kick_table = grid
            .angles()
            .map(|theta| (-Complex64::i() * kick_potential(theta, params) / params.hbar_eff).exp())
            .collect();
        let free_table = (0..params.n_modes)
            .map(|k| free_phase(grid.mode(k), params.hbar_eff))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_modes: params.n_modes,
            kick_table,
            free_table,
            unitary: params.lambda == 0.0,
            forward: planner.plan_fft_forward(params.n_modes),
            inverse: planner.plan_fft_inverse(params.n_modes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `exp(-i V_K(theta_j) / hbar)` on the angle grid.
    pub fn kick_table(&self) -> &[Complex64] {
        &self.kick_table
    }

    /// `exp(-i p_n^2 / 2 hbar)` in momentum order.
    pub fn free_table(&self) -> &[Complex64] {
        &self.free_table
    }

    fn check_size(&self, state: &QuantumState) -> Result<()> {
        if state.n_modes() != self.n_modes {
            return Err(Error::InvalidParams(format!(
                "state has {} modes, plan has {}",
                state.n_modes(),
                self.n_modes
            )));
        }
        Ok(())
    }

    /// Applies `U_K`, renormalises, and adds the log of the probability growth
    /// to `log_norm`. `t` is left unchanged.
    pub fn apply_kick(&self, state: &mut QuantumState) -> Result<()> {
        self.check_size(state)?;
        let mut buffer = vec![Complex64::new(0.0, 0.0); self.n_modes];
        momentum_to_fft_order(&state.amplitudes, &mut buffer);
        self.inverse.process(&mut buffer);
        for (f, k) in buffer.iter_mut().zip(&self.kick_table) {
            *f *= k;
        }
        self.forward.process(&mut buffer);
        fft_order_to_momentum(&buffer, &mut state.amplitudes);

        let growth = state.renormalize();
        assert!(
            growth > 0.0 && growth.is_finite(),
            "kick produced probability {growth}"
        );
        // A unitary kick changes the probability only by round-off.
        if !self.unitary {
            state.log_norm += growth.ln();
        }
        Ok(())
    }

    /// Applies `U_f`; the identity at `hbar_eff = 4 pi`.
    pub fn apply_free(&self, state: &mut QuantumState) -> Result<()> {
        self.check_size(state)?;
        for (c, f) in state.amplitudes.iter_mut().zip(&self.free_table) {
            *c *= f;
        }
        Ok(())
    }

    /// One labelled period `U_f U_K`; increments `t`.
    pub fn step(&self, state: &mut QuantumState) -> Result<()> {
        self.apply_kick(state)?;
        self.apply_free(state)?;
        state.t += 1;
        Ok(())
    }
}

/// Default recording stride: every kick up to 1000 kicks, every tenth beyond.
pub fn default_record_every(t_max: u64) -> u64 {
    if t_max <= 1000 {
        1
    } else {
        10
    }
}

/// Propagates from the ground state for `t_max` periods, recording the
/// observables at `t = 0` and at every multiple of `record_every`.
pub fn propagate(params: &ModelParams, t_max: u64, record_every: u64) -> Result<ObservableSeries> {
    propagate_with_snapshots(params, t_max, record_every, &[]).map(|(series, _)| series)
}

/// As [`propagate`], additionally returning copies of the state at each
/// requested snapshot time (in the order requested; times beyond `t_max`
/// are ignored).
pub fn propagate_with_snapshots(
    params: &ModelParams,
    t_max: u64,
    record_every: u64,
    snapshot_times: &[u64],
) -> Result<(ObservableSeries, Vec<QuantumState>)> {
    if record_every == 0 {
        return Err(Error::InvalidParams("record_every must be >= 1".into()));
    }
    let plan = PropagatorPlan::new(params)?;
    let mut state = initial_state(params);
    let mut series = ObservableSeries::default();
    let mut snapshots: Vec<Option<QuantumState>> = vec![None; snapshot_times.len()];

    let capture = |state: &QuantumState, snapshots: &mut Vec<Option<QuantumState>>| {
        for (slot, &ts) in snapshots.iter_mut().zip(snapshot_times) {
            if ts == state.t {
                *slot = Some(state.clone());
            }
        }
    };

    series.push(ObservableRecord::from_state(&state, params.epsilon));
    capture(&state, &mut snapshots);
    for _ in 0..t_max {
        plan.step(&mut state)?;
        state.check_resolution()?;
        if state.t.is_multiple_of(record_every) {
            series.push(ObservableRecord::from_state(&state, params.epsilon));
        }
        capture(&state, &mut snapshots);
    }
    Ok((series, snapshots.into_iter().flatten().collect()))
}

/// Lattice size that comfortably holds the state after `t_max` kicks at
/// resonance. The amplitudes are Bessel-like in `n` with a cutoff near
/// `(K + lambda) t / 4 pi`; the margin covers the exponential tail.
pub fn suggested_n_modes(params: &ModelParams, t_max: u64) -> usize {
    let reach = (params.kick_strength.abs() + params.lambda.abs()) * t_max as f64 / (4.0 * PI);
    let needed = (8.0 / 3.0) * (reach + 10.0 * reach.sqrt() + 30.0);
    (needed.ceil() as usize).next_power_of_two().max(8)
}

/// Default cap on the lattice size for [`propagate_adaptive`].
pub const MAX_AUTO_MODES: usize = 1 << 20;

/// Runs [`propagate_with_snapshots`], doubling `n_modes` and restarting
/// whenever the lattice is too small, up to `max_modes`. Returns the
/// parameters that succeeded.
pub fn propagate_adaptive(
    params: &ModelParams,
    t_max: u64,
    record_every: u64,
    snapshot_times: &[u64],
    max_modes: usize,
) -> Result<(ObservableSeries, Vec<QuantumState>, ModelParams)> {
    let mut current = *params;
    loop {
        match propagate_with_snapshots(&current, t_max, record_every, snapshot_times) {
            Ok((series, snaps)) => return Ok((series, snaps, current)),
            Err(Error::Resolution { .. }) if current.n_modes * 2 <= max_modes => {
                current = current.with_n_modes(current.n_modes * 2);
            }
            Err(e) => return Err(e),
        }
    }
}
