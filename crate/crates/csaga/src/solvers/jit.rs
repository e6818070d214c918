//! Deferred ("just-in-time") sparse execution for the saga and sag
//! engines on GLM losses.
//!
//! Between touches of a coordinate `j`, every step applies the same
//! affine map `x_j ← (1−γλ)x_j − γ ḡ_j`, because the loss-part mean
//! `ḡ_j` only changes on steps whose component touches `j`. The lag
//! counter records through which step `x_j` is current, and the whole
//! backlog of `m` missed steps collapses to the closed form
//! `x_j ← ρ^m x_j − γ ḡ_j (1−ρ^m)/(1−ρ)` with `ρ = 1−γλ`
//! (and `x_j ← x_j − γ m ḡ_j` when `λ = 0`). Each step then touches
//! only the stepped component's nonzero coordinates.

use crate::error::{Error, Result};
use crate::objectives::FiniteSumProblem;
use crate::vecmath::DenseVec;

use super::state::DIVERGENCE_COORD_CAP;

#[derive(Clone, Debug)]
pub struct JitState {
    /// Scalar loss derivative last stored per component.
    pub(crate) derivs: Vec<f64>,
    /// Mean of the loss-part gradients `(1/n) Σ deriv_i · a_i`.
    pub(crate) g_bar_loss: DenseVec,
    /// Step index through which each coordinate of `x` is current.
    lag: Vec<u64>,
    pub(crate) rho: f64,
    /// `γλ = 1 − ρ`, kept separately for the λ→0 branch.
    gl: f64,
    pub(crate) inv_n: f64,
    max_touch_ratio: f64,
}

impl JitState {
    pub(crate) fn new(p: &FiniteSumProblem, x0: &DenseVec, gamma: f64) -> Result<Self> {
        let ds = p
            .dataset()
            .ok_or_else(|| Error::Unsupported("jit needs a GLM dataset".into()))?;
        let n = p.n();
        let mut derivs = Vec::with_capacity(n);
        let mut g_bar_loss = DenseVec::zeros(p.d());
        for i in 0..n {
            let (_, dv) = p.component_loss_scalar(i, x0)?;
            crate::vecmath::axpy_sparse(dv, &ds.sample(i).features, &mut g_bar_loss)?;
            derivs.push(dv);
        }
        g_bar_loss.scale(1.0 / n as f64);
        let gl = gamma * p.lambda();
        Ok(JitState {
            derivs,
            g_bar_loss,
            lag: vec![0; p.d()],
            rho: 1.0 - gl,
            gl,
            inv_n: 1.0 / n as f64,
            max_touch_ratio: 0.0,
        })
    }

    /// Largest touches-per-nonzero ratio any step has incurred.
    pub fn max_touch_ratio(&self) -> f64 {
        self.max_touch_ratio
    }

    pub(crate) fn note_touches(&mut self, touches: u64, nnz: usize) {
        if nnz > 0 {
            let r = touches as f64 / nnz as f64;
            if r > self.max_touch_ratio {
                self.max_touch_ratio = r;
            }
        }
    }

    /// Bring `x_j` current through step `target`.
    pub(crate) fn catch_up(
        &mut self,
        x: &mut DenseVec,
        j: usize,
        target: u64,
        gamma: f64,
    ) -> Result<()> {
        let m = target - self.lag[j];
        if m == 0 {
            return Ok(());
        }
        let g = self.g_bar_loss[j];
        if self.gl == 0.0 {
            x[j] -= gamma * m as f64 * g;
        } else {
            debug_assert!(m <= i32::MAX as u64);
            let rm = self.rho.powi(m as i32);
            x[j] = rm * x[j] - gamma * g * ((1.0 - rm) / self.gl);
        }
        if !x[j].is_finite() || x[j].abs() > DIVERGENCE_COORD_CAP {
            return Err(Error::Divergence { step: target });
        }
        self.lag[j] = target;
        Ok(())
    }

    /// Mark `x_j` current through `target` after an explicit write.
    pub(crate) fn mark_current(&mut self, j: usize, target: u64) {
        self.lag[j] = target;
    }

    /// Bring every coordinate current through step `target` (epoch
    /// boundaries, and before any dense read of `x`).
    pub fn finalize(&mut self, x: &mut DenseVec, target: u64, gamma: f64) -> Result<()> {
        for j in 0..x.len() {
            self.catch_up(x, j, target, gamma)?;
        }
        Ok(())
    }
}
