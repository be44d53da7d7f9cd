//! Second-difference diagnostics on `(t, lambda)` grids.

use crate::error::{Error, Result};
use crate::evolve::propagate;
use crate::model::ModelParams;
use crate::observables::{ObservableSeries, SeriesField};
use crate::theory;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Central second difference `f(t+1) - 2 f(t) + f(t-1)` at every interior
/// entry. The series must be recorded at every kick.
pub fn second_difference(series: &ObservableSeries, field: SeriesField) -> Result<Vec<(u64, f64)>> {
    let entries = &series.entries;
    if let Some(gap) = entries
        .windows(2)
        .map(|w| w[1].t - w[0].t)
        .find(|&d| d != 1)
    {
        return Err(Error::Spacing(gap));
    }
    Ok(entries
        .windows(3)
        .map(|w| {
            let (a, b, c) = (field.get(&w[0]), field.get(&w[1]), field.get(&w[2]));
            (w[1].t, c - 2.0 * b + a)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagramQuantity {
    /// `S_p / lambda`
    SpOverLambda,
    /// `S_E`
    SE,
    /// `S_C / eps^2`
    ScOverEps2,
}

impl DiagramQuantity {
    pub const ALL: [DiagramQuantity; 3] = [Self::SpOverLambda, Self::SE, Self::ScOverEps2];

    pub fn name(self) -> &'static str {
        match self {
            Self::SpOverLambda => "s_p_over_lambda",
            Self::SE => "s_e",
            Self::ScOverEps2 => "s_c_over_eps2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    fn field(self) -> SeriesField {
        match self {
            Self::SpOverLambda => SeriesField::MeanP,
            Self::SE => SeriesField::MeanP2,
            Self::ScOverEps2 => SeriesField::Otoc,
        }
    }

    /// Divisor turning the raw second derivative into the plotted quantity.
    fn divisor(self, params: &ModelParams) -> f64 {
        match self {
            Self::SpOverLambda => params.lambda,
            Self::SE => 1.0,
            Self::ScOverEps2 => params.epsilon * params.epsilon,
        }
    }

    pub fn theory(self, params: &ModelParams, t: f64) -> f64 {
        let raw = match self {
            Self::SpOverLambda => theory::s_p_theory(params, t),
            Self::SE => theory::s_e_theory(params, t),
            Self::ScOverEps2 => theory::s_c_theory(params, t, params.epsilon),
        };
        raw / self.divisor(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagramSource {
    Simulation,
    Theory,
}

impl DiagramSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulation => "simulation",
            Self::Theory => "theory",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellFlag {
    Ok,
    /// The propagation for this row hit a lattice resolution error.
    Resolution,
    /// No second difference exists at `t = 0`.
    Undefined,
}

impl CellFlag {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Resolution => "resolution",
            Self::Undefined => "undefined",
        }
    }
}

/// Values indexed as `values[lambda_index][t_index]`; both axes ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub t_values: Vec<u64>,
    pub lambdas: Vec<f64>,
    pub quantity: DiagramQuantity,
    pub source: DiagramSource,
    pub values: Vec<Vec<f64>>,
    pub flags: Vec<Vec<CellFlag>>,
}

impl PhaseDiagram {
    pub fn get(&self, lambda_index: usize, t_index: usize) -> (f64, CellFlag) {
        (
            self.values[lambda_index][t_index],
            self.flags[lambda_index][t_index],
        )
    }

    /// `(t, lambda, value, flag)` for every cell, lambda-major.
    pub fn cells(&self) -> impl Iterator<Item = (u64, f64, f64, CellFlag)> + '_ {
        self.lambdas.iter().enumerate().flat_map(move |(i, &lam)| {
            self.t_values
                .iter()
                .enumerate()
                .map(move |(j, &t)| (t, lam, self.values[i][j], self.flags[i][j]))
        })
    }

    pub fn flagged_cells(&self) -> usize {
        self.cells().filter(|c| c.3 != CellFlag::Ok).count()
    }
}

type Row = (Vec<f64>, Vec<CellFlag>);

fn theory_row(params: &ModelParams, t_values: &[u64], q: DiagramQuantity) -> Row {
    let values = t_values
        .iter()
        .map(|&t| q.theory(params, t as f64))
        .collect();
    (values, vec![CellFlag::Ok; t_values.len()])
}

fn simulation_rows(params: &ModelParams, t_values: &[u64], qs: &[DiagramQuantity]) -> Vec<Row> {
    let t_max = t_values.last().copied().unwrap_or(0) + 1;
    let series = match propagate(params, t_max, 1) {
        Ok(s) => s,
        Err(Error::Resolution { .. }) => {
            let row = (
                vec![f64::NAN; t_values.len()],
                vec![CellFlag::Resolution; t_values.len()],
            );
            return vec![row; qs.len()];
        }
        Err(e) => panic!("propagation failed for validated parameters: {e}"),
    };
    qs.iter()
        .map(|&q| {
            let diffs = second_difference(&series, q.field()).expect("unit-spaced series");
            let div = q.divisor(params);
            t_values
                .iter()
                .map(|&t| match t {
                    0 => (f64::NAN, CellFlag::Undefined),
                    // diffs[i] is centred on t = i + 1
                    _ => (diffs[(t - 1) as usize].1 / div, CellFlag::Ok),
                })
                .unzip()
        })
        .collect()
}

fn sorted_axes(t_values: &[u64], lambdas: &[f64]) -> Result<(Vec<u64>, Vec<f64>)> {
    if t_values.is_empty() || lambdas.is_empty() {
        return Err(Error::InvalidParams("sweep axes must be non-empty".into()));
    }
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidParams("sweep lambdas must be > 0".into()));
    }
    let mut ts = t_values.to_vec();
    ts.sort_unstable();
    ts.dedup();
    let mut ls = lambdas.to_vec();
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    Ok((ts, ls))
}

/// Builds one diagram per requested quantity. Rows (one per `lambda`) are
/// computed in parallel; a simulation row shares one propagation across all
/// quantities.
pub fn sweep_phase_diagrams(
    t_values: &[u64],
    lambdas: &[f64],
    base: &ModelParams,
    quantities: &[DiagramQuantity],
    source: DiagramSource,
) -> Result<Vec<PhaseDiagram>> {
    base.validate()?;
    if !base.is_resonant() {
        return Err(Error::NotResonant(base.hbar_eff));
    }
    let (ts, ls) = sorted_axes(t_values, lambdas)?;
    let rows: Vec<Vec<Row>> = ls
        .par_iter()
        .map(|&lam| {
            let params = base.with_lambda(lam);
            match source {
                DiagramSource::Theory => quantities
                    .iter()
                    .map(|&q| theory_row(&params, &ts, q))
                    .collect(),
                DiagramSource::Simulation => simulation_rows(&params, &ts, quantities),
            }
        })
        .collect();

    Ok(quantities
        .iter()
        .enumerate()
        .map(|(qi, &quantity)| {
            let (values, flags) = rows.iter().map(|r| r[qi].clone()).unzip();
            PhaseDiagram {
                t_values: ts.clone(),
                lambdas: ls.clone(),
                quantity,
                source,
                values,
                flags,
            }
        })
        .collect())
}

pub fn sweep_phase_diagram(
    t_values: &[u64],
    lambdas: &[f64],
    base: &ModelParams,
    quantity: DiagramQuantity,
    source: DiagramSource,
) -> Result<PhaseDiagram> {
    sweep_phase_diagrams(t_values, lambdas, base, &[quantity], source).map(|mut v| v.remove(0))
}
