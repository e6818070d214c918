//! Stepsize grid search: run the same configuration across a descending
//! stepsize grid and keep the best final suboptimality, treating
//! divergent entries as data rather than failures.

use crate::error::{Error, Result};
use crate::solvers::{run, RunOutput, RunSpec};

/// The benchmark grid: powers of two from `2^13 = 8192` down to
/// `2^-14`, 28 values, descending.
pub fn default_gamma_grid() -> Vec<f64> {
    (-14..=13).rev().map(|e| 2.0f64.powi(e)).collect()
}

#[derive(Clone, Debug)]
pub struct GridCell {
    pub gamma: f64,
    pub output: RunOutput,
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    /// One cell per stepsize, in descending stepsize order.
    pub cells: Vec<GridCell>,
    best_index: usize,
}

impl GridOutcome {
    pub fn best(&self) -> &GridCell {
        &self.cells[self.best_index]
    }

    pub fn best_gamma(&self) -> f64 {
        self.best().gamma
    }
}

/// Run `template` once per stepsize (same seed throughout, so every cell
/// sees the same component order) and select the cell with the smallest
/// final suboptimality among runs that completed. Ties break toward the
/// larger stepsize; if every cell diverged the search fails.
pub fn grid_search(template: &RunSpec, gammas: &[f64]) -> Result<GridOutcome> {
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("stepsize grid is empty".into()));
    }
    for &g in gammas {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid stepsize {g} must be finite and > 0"
            )));
        }
    }
    let mut sorted = gammas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();

    let mut cells = Vec::with_capacity(sorted.len());
    let mut best: Option<(usize, f64)> = None;
    for (idx, gamma) in sorted.into_iter().enumerate() {
        let mut spec = template.clone();
        spec.gamma = gamma;
        let output = run(&spec)?;
        if let Some(final_s) = output.final_suboptimality() {
            let better = match best {
                None => true,
                Some((_, s)) => final_s < s,
            };
            if better {
                best = Some((idx, final_s));
            }
        }
        cells.push(GridCell { gamma, output });
    }
    match best {
        Some((best_index, _)) => Ok(GridOutcome { cells, best_index }),
        None => Err(Error::AllDivergent),
    }
}
