//! Repeated single-home simulation of per-line and total losses.

use rayon::prelude::*;
use serde::Serialize;

use crate::loss_models::RiskModel;
use crate::pricing::Policy;
use crate::rng::{Domain, StreamFactory};
use crate::stats::{self, StatsError, SummaryStats};
use crate::Error;

/// `runs x lines` loss matrix plus row totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    /// Line indices, in column order.
    pub line_indices: Vec<u32>,
    /// Row-major, one row per run.
    line_losses: Vec<f64>,
    pub total_losses: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
}

impl SimulationResult {
    pub fn line_count(&self) -> usize {
        self.line_indices.len()
    }

    pub fn row(&self, run: usize) -> &[f64] {
        let m = self.line_count();
        &self.line_losses[run * m..(run + 1) * m]
    }

    /// Loss column by position (not line index).
    pub fn column(&self, pos: usize) -> Vec<f64> {
        let m = self.line_count();
        self.line_losses.iter().skip(pos).step_by(m).copied().collect()
    }

    /// Loss column for line `index`.
    pub fn line(&self, index: u32) -> Option<Vec<f64>> {
        self.line_indices
            .iter()
            .position(|&i| i == index)
            .map(|pos| self.column(pos))
    }

    /// Columns after the retention transform, keyed by line index.
    pub fn retained_lines(&self, policy: &Policy) -> Vec<(u32, Vec<f64>)> {
        self.line_indices
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (idx, self.column(pos).into_iter().map(|x| policy.apply(x)).collect()))
            .collect()
    }
}

/// Runs `runs` independent home-years. Run `r` draws from substream
/// `(r, 0)` of the master seed, so the output is identical for any thread
/// count.
pub fn run_simulation(model: &RiskModel, runs: usize, master_seed: u64) -> Result<SimulationResult, Error> {
    if runs == 0 {
        return Err(Error::InvalidArgument("run count must be at least 1".into()));
    }
    let factory = StreamFactory::new(master_seed, Domain::Simulation);
    let (n, m) = (model.node_count(), model.line_count());
    let rows: Vec<Vec<f64>> = (0..runs)
        .into_par_iter()
        .map_init(
            || vec![false; n],
            |states, r| {
                let mut rng = factory.stream(r as u64, 0);
                let mut losses = vec![0.0; m];
                model.draw_home(&mut rng, states, &mut losses);
                losses
            },
        )
        .collect();
    let mut line_losses = Vec::with_capacity(runs * m);
    let mut total_losses = Vec::with_capacity(runs);
    for row in rows {
        total_losses.push(row.iter().sum());
        line_losses.extend(row);
    }
    Ok(SimulationResult {
        line_indices: model.lines().iter().map(|l| l.index).collect(),
        line_losses,
        total_losses,
        runs,
        seed: master_seed,
    })
}

pub fn summarize(samples: &[f64], levels: &[f64]) -> Result<SummaryStats, StatsError> {
    stats::summarize(samples, levels)
}

/// Table-style summary: one row per line, then the total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossSummary {
    pub rows: Vec<(String, SummaryStats)>,
}

pub fn summarize_result(result: &SimulationResult, levels: &[f64]) -> Result<LossSummary, StatsError> {
    let mut rows = Vec::with_capacity(result.line_count() + 1);
    for (pos, idx) in result.line_indices.iter().enumerate() {
        rows.push((format!("L{idx}"), stats::summarize(&result.column(pos), levels)?));
    }
    rows.push(("TL".to_string(), stats::summarize(&result.total_losses, levels)?));
    Ok(LossSummary { rows })
}
