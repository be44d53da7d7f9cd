//! One function per subcommand. Each returns the paths it wrote.

use super::config::{FitChoice, RunConfig};
use super::format::{fmt_f64, Csv};
use crate::analysis::{
    fit_exponential, fit_gaussian, long_time_table, sweep_phase_diagrams, FitKind, FitOptions,
    FitResult, PhaseDiagram,
};
use crate::error::{Error, Result};
use crate::evolve::{default_record_every, propagate_adaptive, suggested_n_modes};
use crate::model::ModelParams;
use crate::observables::{momentum_distribution, MomentumDistribution};
use crate::theory::{self, asymptotic_regime_values};
use serde::Serialize;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn resonant(cfg: &RunConfig) -> Result<ModelParams> {
    let params = cfg.model_params();
    if !params.is_resonant() {
        return Err(Error::Config(format!(
            "the closed-form results need hbar_eff = 4*pi, got {}",
            params.hbar_eff
        )));
    }
    Ok(params)
}

fn note_lattice(requested: &ModelParams, used: &ModelParams) {
    if used.n_modes != requested.n_modes {
        eprintln!(
            "note: n_modes raised from {} to {} to hold the state",
            requested.n_modes, used.n_modes
        );
    }
}

fn distribution_csv(dist: &MomentumDistribution) -> String {
    let mut csv = Csv::with_header("n,weight");
    for (n, w) in dist.modes.iter().zip(&dist.weights) {
        csv.row([n.to_string(), fmt_f64(*w)]);
    }
    csv.into_string()
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let params = cfg.model_params();
    let snapshot_times: &[u64] = if cfg.write_snapshots {
        &cfg.snapshots
    } else {
        &[]
    };
    let (series, snaps, used) = propagate_adaptive(
        &params,
        cfg.t_max,
        cfg.record_every(),
        snapshot_times,
        cfg.max_modes,
    )?;
    note_lattice(&params, &used);

    let theory_ok = params.is_resonant();
    let mut csv =
        Csv::with_header("t,log_norm,mean_p,mean_p2,otoc,mean_p_theory,mean_p2_theory,otoc_theory");
    for e in &series.entries {
        let t = e.t as f64;
        let th = |f: &dyn Fn() -> f64| {
            if theory_ok {
                fmt_f64(f())
            } else {
                "NaN".into()
            }
        };
        csv.row([
            e.t.to_string(),
            fmt_f64(e.log_norm),
            fmt_f64(e.mean_p),
            fmt_f64(e.mean_p2),
            fmt_f64(e.otoc),
            th(&|| theory::mean_p_theory(&params, t)),
            th(&|| theory::mean_p2_theory(&params, t)),
            th(&|| theory::otoc_theory(&params, t, params.epsilon)),
        ]);
    }
    let mut written = vec![write(&cfg.out, "evolve.csv", &csv.into_string())?];
    for state in &snaps {
        let name = format!("evolve_snapshot_t{}.csv", state.t);
        written.push(write(
            &cfg.out,
            &name,
            &distribution_csv(&momentum_distribution(state)),
        )?);
    }
    Ok(written)
}

pub fn cmd_theory(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let params = resonant(cfg)?;
    let mut csv = Csv::with_header("t,mean_p,mean_p2,otoc,s_p,s_e,s_c,dp_dt,regime");
    for t in cfg.theory_times() {
        let p = asymptotic_regime_values(&params, t, params.epsilon);
        csv.row([
            fmt_f64(t),
            fmt_f64(p.mean_p),
            fmt_f64(p.mean_p2),
            fmt_f64(p.otoc),
            fmt_f64(p.s_p),
            fmt_f64(p.s_e),
            fmt_f64(p.s_c),
            fmt_f64(p.dp_dt),
            p.regime.as_str().to_string(),
        ]);
    }
    Ok(vec![write(&cfg.out, "theory.csv", &csv.into_string())?])
}

fn gnuplot_script(name: &str, lambdas: &[f64]) -> String {
    let mut s = String::new();
    s.push_str("# Heatmap of ");
    s.push_str(name);
    s.push_str(" over (t, lambda) with the crossover t_c = 2 pi / lambda.\n");
    s.push_str("# Set src to \"simulation\" to plot the simulated cells.\n");
    s.push_str("src = \"theory\"\n");
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!(
        "set terminal pngcairo size 900,600\nset output '{name}.png'\n"
    ));
    s.push_str("set xlabel 't'\nset ylabel 'lambda'\nset logscale x\nset view map\nunset key\n");
    s.push_str("$tc << EOD\n");
    for &l in lambdas {
        s.push_str(&format!("{} {} 0\n", fmt_f64(2.0 * PI / l), fmt_f64(l)));
    }
    s.push_str("EOD\n");
    s.push_str(&format!(
        "splot '{name}.csv' skip 1 using 1:2:(strcol(4) eq src && strcol(5) eq \"ok\" ? $3 : 1/0) \
         with points pointtype 5 pointsize 0.6 palette, \\\n      $tc using 1:2:3 with lines linewidth 2 linecolor 'white'\n"
    ));
    s
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let ts = cfg.sweep_t_values();
    let lambdas = cfg.sweep_lambdas();
    let mut base = resonant(cfg)?;
    let widest = base.with_lambda(cfg.sweep_lambda_max);
    base.n_modes = base
        .n_modes
        .max(suggested_n_modes(&widest, cfg.sweep_t_max + 1))
        .min(cfg.max_modes);

    let mut per_quantity: Vec<Vec<PhaseDiagram>> = vec![Vec::new(); cfg.sweep_quantities.len()];
    for source in cfg.sweep_source.sources() {
        let diagrams = sweep_phase_diagrams(&ts, &lambdas, &base, &cfg.sweep_quantities, source)?;
        for (slot, d) in per_quantity.iter_mut().zip(diagrams) {
            slot.push(d);
        }
    }

    let total: usize = per_quantity
        .iter()
        .flatten()
        .map(|d| d.t_values.len() * d.lambdas.len())
        .sum();
    let flagged: usize = per_quantity
        .iter()
        .flatten()
        .map(PhaseDiagram::flagged_cells)
        .sum();
    if flagged == total {
        return Err(Error::SweepFailed { cells: total });
    }
    if flagged > 0 {
        eprintln!("note: {flagged} of {total} cells flagged");
    }

    let mut written = Vec::new();
    for (q, diagrams) in cfg.sweep_quantities.iter().zip(&per_quantity) {
        let name = format!("sweep_{}", q.name());
        let mut csv = Csv::with_header("t,lambda,value,source,flag");
        for d in diagrams {
            for (t, lam, v, flag) in d.cells() {
                csv.row([
                    t.to_string(),
                    fmt_f64(lam),
                    fmt_f64(v),
                    d.source.name().to_string(),
                    flag.name().to_string(),
                ]);
            }
        }
        written.push(write(&cfg.out, &format!("{name}.csv"), &csv.into_string())?);
        let sorted_lambdas = &diagrams[0].lambdas;
        written.push(write(
            &cfg.out,
            &format!("{name}.gp"),
            &gnuplot_script(&name, sorted_lambdas),
        )?);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
pub struct SnapshotReport {
    pub t: u64,
    pub distribution: String,
    pub kind: FitKind,
    pub center_of_mass: f64,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

/// Least-squares line `p_c = D t` through the origin over the Gaussian
/// snapshots, compared with `d<p>/dt` at `t_ref`.
#[derive(Debug, Serialize)]
pub struct DriftReport {
    pub points: Vec<(u64, f64)>,
    pub slope: f64,
    pub t_ref: f64,
    pub dp_dt_theory: f64,
    pub relative_error: f64,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub params: ModelParams,
    pub snapshots: Vec<SnapshotReport>,
    pub drift: Option<DriftReport>,
}

fn choose_kind(choice: FitChoice, params: &ModelParams, t: u64) -> FitKind {
    match choice {
        FitChoice::Exponential => FitKind::Exponential,
        FitChoice::Gaussian => FitKind::Gaussian,
        FitChoice::Auto => match theory::t_c(params) {
            Ok(tc) if t as f64 >= tc => FitKind::Gaussian,
            _ => FitKind::Exponential,
        },
    }
}

/// Runs the snapshot fits without writing anything.
pub fn fit_report(cfg: &RunConfig) -> Result<FitReport> {
    run_fits(cfg).map(|(report, _)| report)
}

fn run_fits(cfg: &RunConfig) -> Result<(FitReport, Vec<MomentumDistribution>)> {
    cfg.validate()?;
    let params = resonant(cfg)?;
    let mut times = cfg.snapshots.clone();
    times.sort_unstable();
    times.dedup();
    let t_max = *times
        .last()
        .ok_or_else(|| Error::Config("fit needs at least one snapshot time".into()))?;
    let record_every = cfg
        .record_every
        .unwrap_or_else(|| default_record_every(t_max));
    let (_, states, used) =
        propagate_adaptive(&params, t_max, record_every, &times, cfg.max_modes)?;
    note_lattice(&params, &used);

    let exp_opts = FitOptions {
        floor: cfg.exp_floor,
        ..FitOptions::EXPONENTIAL
    };
    let gauss_opts = FitOptions {
        floor: cfg.gauss_floor,
        ..FitOptions::GAUSSIAN
    };
    let dists: Vec<MomentumDistribution> = states.iter().map(momentum_distribution).collect();
    let snapshots: Vec<SnapshotReport> = states
        .iter()
        .zip(&dists)
        .map(|(state, dist)| {
            let kind = choose_kind(cfg.fit_kind, &params, state.t);
            let result = match kind {
                FitKind::Exponential => fit_exponential(dist, &exp_opts),
                FitKind::Gaussian => fit_gaussian(dist, &gauss_opts),
            };
            let (fit, error) = match result {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SnapshotReport {
                t: state.t,
                distribution: format!("fit_dist_t{}.csv", state.t),
                kind,
                center_of_mass: dist.center_of_mass(),
                fit,
                error,
            }
        })
        .collect();

    let points: Vec<(u64, f64)> = snapshots
        .iter()
        .filter_map(|s| Some((s.t, s.fit.as_ref()?.center()?)))
        .filter(|&(t, _)| t > 0)
        .collect();
    let drift = (!points.is_empty()).then(|| {
        let num: f64 = points.iter().map(|&(t, p)| t as f64 * p).sum();
        let den: f64 = points.iter().map(|&(t, _)| (t as f64).powi(2)).sum();
        let slope = num / den;
        let dp_dt_theory = theory::dp_dt_theory(&params, cfg.drift_t);
        DriftReport {
            points,
            slope,
            t_ref: cfg.drift_t,
            dp_dt_theory,
            relative_error: ((slope - dp_dt_theory) / dp_dt_theory).abs(),
        }
    });
    let report = FitReport {
        params: used,
        snapshots,
        drift,
    };
    Ok((report, dists))
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (report, dists) = run_fits(cfg)?;
    let mut written = Vec::new();
    for (snap, dist) in report.snapshots.iter().zip(&dists) {
        written.push(write(
            &cfg.out,
            &snap.distribution,
            &distribution_csv(dist),
        )?);
    }
    let json = serde_json::to_string_pretty(&report)?;
    written.push(write(&cfg.out, "fit.json", &(json + "\n"))?);
    Ok(written)
}

pub fn cmd_table1(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let params = resonant(cfg)?;
    let table = long_time_table(&params, cfg.table_t_max, cfg.table_record_every)?;
    let json = serde_json::to_string_pretty(&table)?;
    Ok(vec![
        write(&cfg.out, "table1.json", &(json + "\n"))?,
        write(&cfg.out, "table1.txt", &table.render())?,
    ])
}

pub fn cmd_config(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    print!("{}", cfg.serialize());
    Ok(Vec::new())
}
