//! Direct transcription of the C-SAGA recursion, kept as an executable
//! cross-check for the table engine. Each step re-evaluates every
//! gradient the recursion names, so it costs O(n) gradients per step —
//! a correctness oracle, not a solver.

use crate::error::{Error, Result};
use crate::objectives::FiniteSumProblem;
use crate::vecmath::DenseVec;

use super::state::DIVERGENCE_SQ_CAP;

/// Run `steps` steps of
///
/// `x^{k+1} = x^k − γ (∇f_{[k]}(x^k) − ∇f_{[k]}(x^{k−n}) + (1/n) Σ_{i=1}^{n} ∇f_{[k−i]}(x^{k−i}))`
///
/// with `[k]` the cyclic component index and `x^{−j} = x^0`, returning
/// the full iterate sequence `x^0, …, x^steps`.
pub fn literal_csaga(
    p: &FiniteSumProblem,
    x0: &DenseVec,
    gamma: f64,
    steps: usize,
) -> Result<Vec<DenseVec>> {
    if x0.len() != p.d() {
        return Err(Error::DimensionMismatch {
            expected: p.d(),
            got: x0.len(),
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stepsize {gamma} must be finite and > 0"
        )));
    }
    let n = p.n() as i64;
    let d = p.d();
    let mut xs: Vec<DenseVec> = vec![x0.clone()];
    let at = |xs: &Vec<DenseVec>, t: i64| -> DenseVec {
        if t >= 0 {
            xs[t as usize].clone()
        } else {
            xs[0].clone()
        }
    };
    for k in 0..steps as i64 {
        let xk = xs[k as usize].clone();
        let comp = (k.rem_euclid(n)) as usize;
        let g_fresh = p.component_gradient(comp, &xk)?;
        let g_stale = p.component_gradient(comp, &at(&xs, k - n))?;
        let mut avg = DenseVec::zeros(d);
        for i in 1..=n {
            let c = (k - i).rem_euclid(n) as usize;
            let g = p.component_gradient(c, &at(&xs, k - i))?;
            avg.add_scaled(1.0, &g)?;
        }
        avg.scale(1.0 / n as f64);
        let mut next = xk;
        for j in 0..d {
            next[j] -= gamma * (g_fresh[j] - g_stale[j] + avg[j]);
        }
        if !next.all_finite() || next.sq_norm() > DIVERGENCE_SQ_CAP {
            return Err(Error::Divergence { step: k as u64 + 1 });
        }
        xs.push(next);
    }
    Ok(xs)
}
