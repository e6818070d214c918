//! Solver state: the iterate, the per-method memory (gradient tables in
//! their dense, scalar, deferred, and Finito forms), and the ring of
//! recent iterates the diagnostics layer samples.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::objectives::FiniteSumProblem;
use crate::vecmath::{axpy_sparse, DenseVec};

use super::jit::JitState;
use super::{Engine, MethodKind};

/// Iterates may wander during a divergent run; once the squared norm
/// passes this cap the run is declared divergent (long before overflow).
pub const DIVERGENCE_SQ_CAP: f64 = 1e200;

/// Coordinate-wise version of the cap for the deferred path, which never
/// sees the whole iterate at once: a single coordinate past this bound
/// already puts the squared norm past [`DIVERGENCE_SQ_CAP`].
pub const DIVERGENCE_COORD_CAP: f64 = 1e100;

/// Per-method gradient memory.
#[derive(Clone, Debug)]
pub enum TableState {
    /// Full per-component gradient vectors plus their running mean.
    /// Works for every loss; the form the theory diagnostics need.
    Dense {
        table: Vec<DenseVec>,
        g_bar: DenseVec,
    },
    /// GLM form: one scalar loss derivative per component plus the dense
    /// mean of the loss-part gradients (regularizer applied on the fly).
    Scalar {
        derivs: Vec<f64>,
        g_bar_loss: DenseVec,
    },
    /// GLM form with lazily applied iterate updates; see [`JitState`].
    Jit(JitState),
    /// Finito/DIAG memory: per-component anchor points and gradients,
    /// with running sums so each step stays O(d).
    Finito {
        phi: Vec<DenseVec>,
        grads: Vec<DenseVec>,
        phi_sum: DenseVec,
        grad_sum: DenseVec,
    },
    /// Full-gradient descent keeps no memory.
    Gd,
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: DenseVec,
    /// Completed steps.
    pub k: u64,
    pub gamma: f64,
    /// Component-gradient evaluations so far (table initialization included).
    pub grad_evals: u64,
    pub engine: Engine,
    pub table: TableState,
    pub(crate) scratch: DenseVec,
}

impl SolverState {
    /// The table mean the next step will use, where the engine keeps one
    /// (dense path only).
    pub fn g_bar(&self) -> Option<&DenseVec> {
        match &self.table {
            TableState::Dense { g_bar, .. } => Some(g_bar),
            _ => None,
        }
    }

    pub fn max_jit_touch_ratio(&self) -> Option<f64> {
        match &self.table {
            TableState::Jit(js) => Some(js.max_touch_ratio()),
            _ => None,
        }
    }
}

/// Prepare a solver: warm the gradient memory at `x0` (one pass over the
/// components, counted in `grad_evals`) so the first step already sees a
/// fully populated table.
///
/// `jit` selects the deferred GLM path (sparse data, saga/sag engines
/// only). `dense_history` forces the dense table even for GLM losses,
/// which the diagnostics layer requires; it is incompatible with `jit`.
pub fn init(
    p: &FiniteSumProblem,
    x0: &DenseVec,
    method: MethodKind,
    gamma: f64,
    jit: bool,
    dense_history: bool,
) -> Result<SolverState> {
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
    let engine = method.engine();
    if jit {
        if !method.jit_capable() {
            return Err(Error::Unsupported(format!(
                "just-in-time updates are not available for {method}: the finito engine \
                 anchors full iterate copies per component and gd has no per-component table"
            )));
        }
        if !p.is_glm() {
            return Err(Error::Unsupported(
                "just-in-time updates need a GLM loss with sparse rows".into(),
            ));
        }
        if dense_history {
            return Err(Error::InvalidArgument(
                "diagnostics requires the dense path; disable jit".into(),
            ));
        }
    }
    let n = p.n();
    let d = p.d();
    let table = match engine {
        Engine::Gd => TableState::Gd,
        Engine::Finito => {
            let mut grads = Vec::with_capacity(n);
            let mut grad_sum = DenseVec::zeros(d);
            for i in 0..n {
                let g = p.component_gradient(i, x0)?;
                grad_sum.add_scaled(1.0, &g)?;
                grads.push(g);
            }
            let mut phi_sum = DenseVec::zeros(d);
            phi_sum.add_scaled(n as f64, x0)?;
            TableState::Finito {
                phi: vec![x0.clone(); n],
                grads,
                phi_sum,
                grad_sum,
            }
        }
        Engine::Saga | Engine::Sag => {
            if jit {
                TableState::Jit(JitState::new(p, x0, gamma)?)
            } else if p.is_glm() && !dense_history {
                let mut derivs = Vec::with_capacity(n);
                let mut g_bar_loss = DenseVec::zeros(d);
                for i in 0..n {
                    let (_, dv) = p.component_loss_scalar(i, x0)?;
                    axpy_sparse(
                        dv,
                        &p.dataset().unwrap().sample(i).features,
                        &mut g_bar_loss,
                    )?;
                    derivs.push(dv);
                }
                g_bar_loss.scale(1.0 / n as f64);
                TableState::Scalar { derivs, g_bar_loss }
            } else {
                let mut table = Vec::with_capacity(n);
                let mut g_bar = DenseVec::zeros(d);
                for i in 0..n {
                    let g = p.component_gradient(i, x0)?;
                    g_bar.add_scaled(1.0, &g)?;
                    table.push(g);
                }
                g_bar.scale(1.0 / n as f64);
                TableState::Dense { table, g_bar }
            }
        }
    };
    let grad_evals = match engine {
        Engine::Gd => 0,
        _ => n as u64,
    };
    Ok(SolverState {
        x: x0.clone(),
        k: 0,
        gamma,
        grad_evals,
        engine,
        table,
        scratch: DenseVec::zeros(d),
    })
}

/// Ring of the last `n+1` iterates `x^{k−n}, …, x^k`, seeded with copies
/// of `x^0` so the `x^{−j} = x^0` convention holds from the first step.
#[derive(Clone, Debug)]
pub struct HistoryWindow {
    n: usize,
    ring: VecDeque<DenseVec>,
}

impl HistoryWindow {
    pub fn new(n: usize, x0: &DenseVec) -> Self {
        let mut ring = VecDeque::with_capacity(n + 1);
        for _ in 0..=n {
            ring.push_back(x0.clone());
        }
        HistoryWindow { n, ring }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, x: &DenseVec) {
        // recycle the evicted buffer instead of reallocating
        let mut slot = self.ring.pop_front().expect("window is never empty");
        slot.copy_from(x).expect("window dimensions are fixed");
        self.ring.push_back(slot);
    }

    /// `x^k`.
    pub fn current(&self) -> &DenseVec {
        self.ring.back().expect("window is never empty")
    }

    /// `x^{k−j}` for `0 <= j <= n`.
    pub fn past(&self, j: usize) -> &DenseVec {
        assert!(
            j <= self.n,
            "window holds {} iterates, asked for lag {j}",
            self.n + 1
        );
        &self.ring[self.n - j]
    }
}
