//! Single-step updates for each engine, over each table representation.

use crate::error::{Error, Result};
use crate::objectives::FiniteSumProblem;
use crate::vecmath::DenseVec;

use super::scheduler::Scheduler;
use super::state::{SolverState, TableState, DIVERGENCE_COORD_CAP, DIVERGENCE_SQ_CAP};
use super::Engine;

/// One saga-engine step (C-SAGA / SAGA / RP-SAGA are this step under
/// different schedulers):
///
/// `x ← x − γ (∇f_i(x) − table_i + mean(table))`, then `table_i` is
/// replaced by the fresh gradient and the running mean is adjusted.
pub fn step_csaga(
    state: &mut SolverState,
    p: &FiniteSumProblem,
    sched: &mut Scheduler,
) -> Result<()> {
    require_engine(state, Engine::Saga, "step_csaga")?;
    let i = sched.next_index();
    let step = state.k + 1;
    let inv_n = 1.0 / p.n() as f64;
    let SolverState {
        x,
        gamma,
        table,
        scratch,
        ..
    } = state;
    let gamma = *gamma;
    match table {
        TableState::Dense { table, g_bar } => {
            p.component_gradient_into(i, x, scratch)?;
            let ti = &mut table[i];
            // the mean update is written as g_new/n + (ḡ − t_i/n) so that
            // for n = 1 (where ḡ == t_i bitwise) both the step direction
            // and the stored mean reduce exactly to the fresh gradient,
            // making the method literally gradient descent
            for j in 0..x.len() {
                let u = scratch[j] + (g_bar[j] - ti[j]);
                x[j] -= gamma * u;
                g_bar[j] = scratch[j] * inv_n + (g_bar[j] - ti[j] * inv_n);
            }
            ti.copy_from(scratch)?;
        }
        TableState::Scalar { derivs, g_bar_loss } => {
            let (inner, dnew) = p.component_loss_scalar(i, x)?;
            if !inner.is_finite() || !dnew.is_finite() {
                return Err(Error::Divergence { step });
            }
            let diff = dnew - derivs[i];
            let lambda = p.lambda();
            for j in 0..x.len() {
                x[j] -= gamma * (lambda * x[j] + g_bar_loss[j]);
            }
            let a = &p.dataset().unwrap().sample(i).features;
            for (j, v) in a.iter() {
                x[j] -= gamma * diff * v;
            }
            for (j, v) in a.iter() {
                g_bar_loss[j] += diff * v * inv_n;
            }
            derivs[i] = dnew;
        }
        TableState::Jit(_) => {
            return Err(Error::Unsupported(
                "deferred tables step through step_jit".into(),
            ))
        }
        _ => {
            return Err(Error::InvalidArgument(
                "saga step on a non-saga table".into(),
            ))
        }
    }
    finish_step(state, step)
}

/// One sag-engine step (SAG / IAG): the fresh gradient replaces its
/// table entry *first*, and the iterate moves along the updated mean:
/// `x ← x − γ · mean(table_after_replacement)`.
pub fn step_sag_iag(
    state: &mut SolverState,
    p: &FiniteSumProblem,
    sched: &mut Scheduler,
) -> Result<()> {
    require_engine(state, Engine::Sag, "step_sag_iag")?;
    let i = sched.next_index();
    let step = state.k + 1;
    let inv_n = 1.0 / p.n() as f64;
    let SolverState {
        x,
        gamma,
        table,
        scratch,
        ..
    } = state;
    let gamma = *gamma;
    match table {
        TableState::Dense { table, g_bar } => {
            p.component_gradient_into(i, x, scratch)?;
            let ti = &mut table[i];
            for j in 0..x.len() {
                let u = scratch[j] * inv_n + (g_bar[j] - ti[j] * inv_n);
                g_bar[j] = u;
                x[j] -= gamma * u;
            }
            ti.copy_from(scratch)?;
        }
        TableState::Scalar { derivs, g_bar_loss } => {
            let (inner, dnew) = p.component_loss_scalar(i, x)?;
            if !inner.is_finite() || !dnew.is_finite() {
                return Err(Error::Divergence { step });
            }
            let diff = dnew - derivs[i];
            let a = &p.dataset().unwrap().sample(i).features;
            for (j, v) in a.iter() {
                g_bar_loss[j] += diff * v * inv_n;
            }
            derivs[i] = dnew;
            let lambda = p.lambda();
            for j in 0..x.len() {
                x[j] -= gamma * (g_bar_loss[j] + lambda * x[j]);
            }
        }
        TableState::Jit(_) => {
            return Err(Error::Unsupported(
                "deferred tables step through step_jit".into(),
            ))
        }
        _ => return Err(Error::InvalidArgument("sag step on a non-sag table".into())),
    }
    finish_step(state, step)
}

/// One finito-engine step (Finito / DIAG):
/// `x ← mean(φ) − γ · mean(g)`, then the scheduled component's anchor
/// and gradient are refreshed at the new iterate.
pub fn step_finito_diag(
    state: &mut SolverState,
    p: &FiniteSumProblem,
    sched: &mut Scheduler,
) -> Result<()> {
    require_engine(state, Engine::Finito, "step_finito_diag")?;
    let i = sched.next_index();
    let step = state.k + 1;
    let inv_n = 1.0 / p.n() as f64;
    let SolverState {
        x,
        gamma,
        table,
        scratch,
        ..
    } = state;
    let gamma = *gamma;
    match table {
        TableState::Finito {
            phi,
            grads,
            phi_sum,
            grad_sum,
        } => {
            for j in 0..x.len() {
                x[j] = phi_sum[j] * inv_n - gamma * (grad_sum[j] * inv_n);
            }
            p.component_gradient_into(i, x, scratch)?;
            for j in 0..x.len() {
                phi_sum[j] += x[j] - phi[i][j];
                grad_sum[j] += scratch[j] - grads[i][j];
            }
            phi[i].copy_from(x)?;
            grads[i].copy_from(scratch)?;
        }
        _ => {
            return Err(Error::InvalidArgument(
                "finito step on a non-finito table".into(),
            ))
        }
    }
    finish_step(state, step)
}

/// One deferred-path step (saga or sag engine over a [`TableState::Jit`]
/// table): catch up the stepped component's coordinates, refresh its
/// scalar derivative, and write only those coordinates.
pub fn step_jit(
    state: &mut SolverState,
    p: &FiniteSumProblem,
    sched: &mut Scheduler,
) -> Result<()> {
    let i = sched.next_index();
    let step = state.k + 1;
    let engine = state.engine;
    let SolverState {
        x,
        k,
        gamma,
        grad_evals,
        table,
        ..
    } = state;
    let gamma = *gamma;
    let TableState::Jit(js) = table else {
        return Err(Error::Unsupported(
            "step_jit needs the deferred table".into(),
        ));
    };
    let s = p.dataset().unwrap().sample(i);
    let mut touches = 0u64;
    let mut inner = 0.0;
    for (j, v) in s.features.iter() {
        js.catch_up(x, j, *k, gamma)?;
        inner += v * x[j];
        touches += 1;
    }
    if !inner.is_finite() {
        return Err(Error::Divergence { step });
    }
    let dnew = p.scalar_deriv(s.label, inner)?;
    let diff = dnew - js.derivs[i];
    match engine {
        Engine::Saga => {
            // iterate first (against the old mean), then the mean
            for (j, v) in s.features.iter() {
                x[j] = js.rho * x[j] - gamma * (js.g_bar_loss[j] + diff * v);
                if !x[j].is_finite() || x[j].abs() > DIVERGENCE_COORD_CAP {
                    return Err(Error::Divergence { step });
                }
                js.mark_current(j, step);
                touches += 1;
            }
            for (j, v) in s.features.iter() {
                js.g_bar_loss[j] += diff * v * js.inv_n;
                touches += 1;
            }
        }
        Engine::Sag => {
            // mean first, then the iterate along the updated mean
            for (j, v) in s.features.iter() {
                js.g_bar_loss[j] += diff * v * js.inv_n;
                touches += 1;
            }
            for (j, _) in s.features.iter() {
                x[j] = js.rho * x[j] - gamma * js.g_bar_loss[j];
                if !x[j].is_finite() || x[j].abs() > DIVERGENCE_COORD_CAP {
                    return Err(Error::Divergence { step });
                }
                js.mark_current(j, step);
                touches += 1;
            }
        }
        _ => {
            return Err(Error::Unsupported(
                "jit supports the saga and sag engines".into(),
            ))
        }
    }
    js.derivs[i] = dnew;
    js.note_touches(touches, s.features.nnz());
    *k = step;
    *grad_evals += 1;
    Ok(())
}

/// One full-gradient descent step (an epoch's worth of work:
/// `n` component-gradient evaluations).
pub fn gd_epoch(state: &mut SolverState, p: &FiniteSumProblem) -> Result<()> {
    require_engine(state, Engine::Gd, "gd_epoch")?;
    let step = state.k + 1;
    let SolverState {
        x, gamma, scratch, ..
    } = state;
    p.full_gradient_into(x, scratch)?;
    for j in 0..x.len() {
        x[j] -= *gamma * scratch[j];
    }
    state.grad_evals += p.n() as u64 - 1; // finish_step adds the remaining one
    finish_step(state, step)
}

/// Epoch-boundary maintenance: recompute running means exactly from the
/// stored tables (incremental updates drift by rounding), and flush any
/// deferred coordinate updates so `x` can be read densely.
pub fn epoch_refresh(state: &mut SolverState, p: &FiniteSumProblem) -> Result<()> {
    let inv_n = 1.0 / p.n() as f64;
    let SolverState {
        x, k, gamma, table, ..
    } = state;
    match table {
        TableState::Dense { table, g_bar } => {
            g_bar.fill_zero();
            for t in table.iter() {
                g_bar.add_scaled(1.0, t)?;
            }
            g_bar.scale(inv_n);
        }
        TableState::Scalar { derivs, g_bar_loss } => {
            recompute_loss_mean(p, derivs, g_bar_loss, inv_n)?;
        }
        TableState::Jit(js) => {
            js.finalize(x, *k, *gamma)?;
            let derivs = js.derivs.clone();
            recompute_loss_mean(p, &derivs, &mut js.g_bar_loss, inv_n)?;
        }
        TableState::Finito {
            phi,
            grads,
            phi_sum,
            grad_sum,
        } => {
            phi_sum.fill_zero();
            grad_sum.fill_zero();
            for (f, g) in phi.iter().zip(grads.iter()) {
                phi_sum.add_scaled(1.0, f)?;
                grad_sum.add_scaled(1.0, g)?;
            }
        }
        TableState::Gd => {}
    }
    Ok(())
}

fn recompute_loss_mean(
    p: &FiniteSumProblem,
    derivs: &[f64],
    g_bar_loss: &mut DenseVec,
    inv_n: f64,
) -> Result<()> {
    let ds = p.dataset().unwrap();
    g_bar_loss.fill_zero();
    for (i, dv) in derivs.iter().enumerate() {
        crate::vecmath::axpy_sparse(*dv, &ds.sample(i).features, g_bar_loss)?;
    }
    g_bar_loss.scale(inv_n);
    Ok(())
}

fn require_engine(state: &SolverState, want: Engine, op: &str) -> Result<()> {
    if state.engine != want {
        return Err(Error::InvalidArgument(format!(
            "{op} drives the {want:?} engine, state was initialized for {:?}",
            state.engine
        )));
    }
    Ok(())
}

fn finish_step(state: &mut SolverState, step: u64) -> Result<()> {
    state.k = step;
    state.grad_evals += 1;
    if !state.x.all_finite() || state.x.sq_norm() > DIVERGENCE_SQ_CAP {
        return Err(Error::Divergence { step });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticComponent;
    use crate::solvers::scheduler::SchedulerKind;
    use crate::solvers::{init, MethodKind};

    /// f_i(x) = ½(x − b_i)² with b = (1, −1): f(x) = ½x² + ½, x⋆ = 0.
    fn two_centers() -> FiniteSumProblem {
        let mk = |z: f64| QuadraticComponent::from_center(1, vec![1.0], &[z]).unwrap();
        FiniteSumProblem::quadratic(vec![mk(1.0), mk(-1.0)]).unwrap()
    }

    fn drive(
        p: &FiniteSumProblem,
        method: MethodKind,
        steps: usize,
        step_fn: fn(&mut SolverState, &FiniteSumProblem, &mut Scheduler) -> Result<()>,
    ) -> Vec<f64> {
        let x0 = DenseVec::from_vec(vec![1.0]);
        let mut state = init(p, &x0, method, 0.1, false, false).unwrap();
        let mut sched = Scheduler::new(method.default_scheduler().unwrap(), p.n(), 0).unwrap();
        let mut xs = vec![state.x[0]];
        for _ in 0..steps {
            step_fn(&mut state, p, &mut sched).unwrap();
            xs.push(state.x[0]);
        }
        xs
    }

    fn assert_close(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn csaga_hand_simulation() {
        let p = two_centers();
        let xs = drive(&p, MethodKind::Csaga, 4, step_csaga);
        assert_close(&xs, &[1.0, 0.9, 0.81, 0.734, 0.6651]);
    }

    #[test]
    fn iag_hand_simulation() {
        let p = two_centers();
        let xs = drive(&p, MethodKind::Iag, 3, step_sag_iag);
        assert_close(&xs, &[1.0, 0.9, 0.805, 0.71975]);
    }

    #[test]
    fn diag_hand_simulation() {
        let p = two_centers();
        let xs = drive(&p, MethodKind::Diag, 3, step_finito_diag);
        assert_close(&xs, &[1.0, 0.9, 0.855, 0.78975]);
    }

    #[test]
    fn mean_refresh_matches_incremental() {
        let p = two_centers();
        let x0 = DenseVec::from_vec(vec![1.0]);
        let mut state = init(&p, &x0, MethodKind::Csaga, 0.1, false, false).unwrap();
        let mut sched = Scheduler::new(SchedulerKind::Cyclic, 2, 0).unwrap();
        for _ in 0..6 {
            step_csaga(&mut state, &p, &mut sched).unwrap();
        }
        let before = state.g_bar().unwrap()[0];
        epoch_refresh(&mut state, &p).unwrap();
        let after = state.g_bar().unwrap()[0];
        assert!((before - after).abs() < 1e-14);
    }

    #[test]
    fn engine_mismatch_rejected() {
        let p = two_centers();
        let x0 = DenseVec::from_vec(vec![1.0]);
        let mut state = init(&p, &x0, MethodKind::Csaga, 0.1, false, false).unwrap();
        let mut sched = Scheduler::new(SchedulerKind::Cyclic, 2, 0).unwrap();
        assert!(step_sag_iag(&mut state, &p, &mut sched).is_err());
        assert!(step_finito_diag(&mut state, &p, &mut sched).is_err());
        assert!(gd_epoch(&mut state, &p).is_err());
    }

    #[test]
    fn divergence_detected_at_huge_stepsize() {
        let p = two_centers();
        let x0 = DenseVec::from_vec(vec![1.0]);
        let mut state = init(&p, &x0, MethodKind::Csaga, 1e3, false, false).unwrap();
        let mut sched = Scheduler::new(SchedulerKind::Cyclic, 2, 0).unwrap();
        let mut diverged = None;
        for _ in 0..10_000 {
            match step_csaga(&mut state, &p, &mut sched) {
                Ok(()) => {}
                Err(Error::Divergence { step }) => {
                    diverged = Some(step);
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(diverged.is_some(), "run should have diverged");
    }
}
