//! Epoch-level driver: wires a method, a scheduler, and a problem into a
//! suboptimality trace, with optional per-step Lyapunov diagnostics.

use std::time::Instant;

use crate::bench::TraceRecord;
use crate::diagnostics::{lyapunov, LyapunovTrace};
use crate::error::{Error, Result};
use crate::objectives::{FiniteSumProblem, Reference};
use crate::vecmath::DenseVec;

use super::scheduler::{Scheduler, SchedulerKind};
use super::state::{init, HistoryWindow, SolverState};
use super::steps::{epoch_refresh, gd_epoch, step_csaga, step_finito_diag, step_jit, step_sag_iag};
use super::{Engine, MethodKind};

/// Suboptimality values in trace records are clamped below at this floor
/// so log-scale plots stay finite.
pub const SUBOPT_FLOOR: f64 = 1e-16;

/// Diagnostics keeps `n+1` dense iterates and evaluates `f` per step;
/// refuse cells past this size.
const DIAGNOSTICS_CELL_CAP: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct RunSpec<'a> {
    pub problem: &'a FiniteSumProblem,
    pub reference: &'a Reference,
    pub method: MethodKind,
    /// Override the method's defining scheduler (for ablations).
    pub scheduler: Option<SchedulerKind>,
    pub gamma: f64,
    pub epochs: usize,
    pub seed: u64,
    pub jit: bool,
    /// Track the Lyapunov function per step (dense path only).
    pub diagnostics: bool,
    /// Starting point; zero when absent.
    pub x0: Option<&'a DenseVec>,
}

impl<'a> RunSpec<'a> {
    pub fn new(
        problem: &'a FiniteSumProblem,
        reference: &'a Reference,
        method: MethodKind,
        gamma: f64,
        epochs: usize,
        seed: u64,
    ) -> Self {
        RunSpec {
            problem,
            reference,
            method,
            scheduler: None,
            gamma,
            epochs,
            seed,
            jit: false,
            diagnostics: false,
            x0: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    /// One record per completed epoch, plus the epoch-0 record; truncated
    /// when the run diverges.
    pub records: Vec<TraceRecord>,
    /// Per-step Lyapunov values when diagnostics ran.
    pub lyapunov: Option<LyapunovTrace>,
    /// Step at which divergence was detected, if any.
    pub diverged_at: Option<u64>,
    pub x_final: DenseVec,
    pub grad_evals: u64,
    pub max_jit_touch_ratio: Option<f64>,
}

impl RunOutput {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    /// Last recorded suboptimality, for runs that completed.
    pub fn final_suboptimality(&self) -> Option<f64> {
        if self.diverged() {
            None
        } else {
            self.records.last().map(|r| r.suboptimality)
        }
    }
}

pub fn run(spec: &RunSpec) -> Result<RunOutput> {
    let p = spec.problem;
    let n = p.n();
    let zero_x0;
    let x0: &DenseVec = match spec.x0 {
        Some(x) => x,
        None => {
            zero_x0 = DenseVec::zeros(p.d());
            &zero_x0
        }
    };
    let mut state = init(p, x0, spec.method, spec.gamma, spec.jit, spec.diagnostics)?;
    let engine = state.engine;
    let mut sched = if engine == Engine::Gd {
        None
    } else {
        let kind = spec
            .scheduler
            .or_else(|| spec.method.default_scheduler())
            .expect("non-gd methods define a scheduler");
        Some(Scheduler::new(kind, n, spec.seed)?)
    };
    let x_star = &spec.reference.x_star;
    let mut diag = if spec.diagnostics {
        let cell = (n as u64).saturating_mul(p.d() as u64);
        if cell > DIAGNOSTICS_CELL_CAP {
            return Err(Error::InvalidArgument(format!(
                "diagnostics keeps n+1 dense iterates; n*d = {cell} exceeds {DIAGNOSTICS_CELL_CAP}"
            )));
        }
        let w = HistoryWindow::new(n, x0);
        let v0 = lyapunov(&w, x_star)?;
        Some((w, LyapunovTrace::new(n, v0)))
    } else {
        None
    };

    type StepFn = fn(&mut SolverState, &FiniteSumProblem, &mut Scheduler) -> Result<()>;
    let step_fn: Option<StepFn> = match (engine, spec.jit) {
        (Engine::Gd, _) => None,
        (Engine::Saga, false) => Some(step_csaga),
        (Engine::Sag, false) => Some(step_sag_iag),
        (Engine::Saga | Engine::Sag, true) => Some(step_jit),
        (Engine::Finito, _) => Some(step_finito_diag),
    };

    let f_star = spec.reference.f_star;
    let t0 = Instant::now();
    let mut records = Vec::with_capacity(spec.epochs + 1);
    let push_record = |records: &mut Vec<TraceRecord>,
                       epoch: u32,
                       state: &SolverState,
                       diag: &Option<(HistoryWindow, LyapunovTrace)>,
                       subopt: f64| {
        records.push(TraceRecord {
            epoch,
            grad_evals: state.grad_evals,
            gamma: spec.gamma,
            suboptimality: subopt.max(SUBOPT_FLOOR),
            lyapunov: diag.as_ref().map(|(_, l)| l.last()),
            wall_seconds: t0.elapsed().as_secs_f64(),
        });
    };
    let s0 = p.value(&state.x)? - f_star;
    push_record(&mut records, 0, &state, &diag, s0);

    let mut diverged_at = None;
    'epochs: for epoch in 1..=spec.epochs {
        let outcome: Result<()> = (|| {
            match step_fn {
                None => {
                    gd_epoch(&mut state, p)?;
                    if let Some((w, l)) = diag.as_mut() {
                        w.push(&state.x);
                        l.push(lyapunov(w, x_star)?);
                    }
                }
                Some(f) => {
                    let sched = sched.as_mut().expect("scheduler exists for table methods");
                    for _ in 0..n {
                        f(&mut state, p, sched)?;
                        if let Some((w, l)) = diag.as_mut() {
                            w.push(&state.x);
                            l.push(lyapunov(w, x_star)?);
                        }
                    }
                    epoch_refresh(&mut state, p)?;
                }
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => {}
            Err(Error::Divergence { step }) => {
                diverged_at = Some(step);
                break 'epochs;
            }
            Err(e) => return Err(e),
        }
        let s = p.value(&state.x)? - f_star;
        push_record(&mut records, epoch as u32, &state, &diag, s);
    }

    Ok(RunOutput {
        records,
        lyapunov: diag.map(|(_, l)| l),
        diverged_at,
        grad_evals: state.grad_evals,
        max_jit_touch_ratio: state.max_jit_touch_ratio(),
        x_final: state.x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::LossKind;
    use crate::synth::{quadratic_family, sparse_glm_dataset};

    fn quad_setup(n: usize) -> (FiniteSumProblem, Reference) {
        let p = quadratic_family(n, 3, 0.8, 4.0, 5).unwrap();
        let r = p.solve_reference(1e-13).unwrap();
        (p, r)
    }

    #[test]
    fn optimum_is_a_fixed_point_for_every_method() {
        let (p, r) = quad_setup(5);
        for method in MethodKind::ALL {
            let mut spec = RunSpec::new(&p, &r, method, 0.02, 5, 3);
            spec.x0 = Some(&r.x_star);
            let out = run(&spec).unwrap();
            let drift = crate::vecmath::sq_dist(&out.x_final, &r.x_star)
                .unwrap()
                .sqrt();
            assert!(drift <= 1e-8, "{method}: drifted {drift}");
            assert!(!out.diverged());
        }
    }

    #[test]
    fn single_component_methods_collapse_to_gd() {
        let (p, r) = quad_setup(1);
        let gd = run(&RunSpec::new(&p, &r, MethodKind::Gd, 0.05, 40, 0)).unwrap();
        for method in [MethodKind::Csaga, MethodKind::Sag, MethodKind::Finito] {
            let out = run(&RunSpec::new(&p, &r, method, 0.05, 40, 0)).unwrap();
            assert_eq!(out.x_final, gd.x_final, "{method} != gd at n = 1");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (p, r) = quad_setup(6);
        let a = run(&RunSpec::new(&p, &r, MethodKind::Saga, 0.02, 8, 11)).unwrap();
        let b = run(&RunSpec::new(&p, &r, MethodKind::Saga, 0.02, 8, 11)).unwrap();
        assert_eq!(a.x_final, b.x_final);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.suboptimality, rb.suboptimality);
        }
        let c = run(&RunSpec::new(&p, &r, MethodKind::Saga, 0.02, 8, 12)).unwrap();
        assert_ne!(a.x_final, c.x_final);
    }

    #[test]
    fn divergent_run_truncates_with_marker() {
        let (p, r) = quad_setup(4);
        let out = run(&RunSpec::new(&p, &r, MethodKind::Csaga, 1e3, 30, 0)).unwrap();
        assert!(out.diverged());
        assert!(out.records.len() < 31);
        assert!(!out.records.is_empty());
        assert_eq!(out.final_suboptimality(), None);
    }

    #[test]
    fn gradient_evaluation_accounting() {
        let (p, r) = quad_setup(4);
        let table = run(&RunSpec::new(&p, &r, MethodKind::Csaga, 0.02, 3, 0)).unwrap();
        let evs: Vec<u64> = table.records.iter().map(|rec| rec.grad_evals).collect();
        assert_eq!(evs, vec![4, 8, 12, 16]);
        let gd = run(&RunSpec::new(&p, &r, MethodKind::Gd, 0.02, 3, 0)).unwrap();
        let evs: Vec<u64> = gd.records.iter().map(|rec| rec.grad_evals).collect();
        assert_eq!(evs, vec![0, 4, 8, 12]);
    }

    #[test]
    fn suboptimality_decreases_on_well_conditioned_problem() {
        let (p, r) = quad_setup(6);
        let out = run(&RunSpec::new(&p, &r, MethodKind::Csaga, 0.02, 30, 0)).unwrap();
        let first = out.records.first().unwrap().suboptimality;
        let last = out.records.last().unwrap().suboptimality;
        assert!(last < 1e-3 * first, "no progress: {first} -> {last}");
    }

    #[test]
    fn diagnostics_traces_lyapunov_per_step() {
        let (p, r) = quad_setup(5);
        let mut spec = RunSpec::new(&p, &r, MethodKind::Csaga, 0.01, 4, 0);
        spec.diagnostics = true;
        let out = run(&spec).unwrap();
        let trace = out.lyapunov.unwrap();
        assert_eq!(trace.values().len(), 4 * 5 + 1);
        assert!(trace.values().iter().all(|v| v.is_finite() && *v >= 0.0));
        for rec in &out.records {
            assert!(rec.lyapunov.is_some());
        }
    }

    #[test]
    fn jit_matches_dense_composite_path() {
        let ds = sparse_glm_dataset(40, 25, 4, 2).unwrap();
        let p = FiniteSumProblem::glm(LossKind::Logistic, ds, 0.05).unwrap();
        let r = p.solve_reference(1e-10).unwrap();
        let gamma = 0.3 / p.smoothness();
        for method in [MethodKind::Csaga, MethodKind::Saga, MethodKind::Iag] {
            let dense = run(&RunSpec::new(&p, &r, method, gamma, 10, 7)).unwrap();
            let mut spec = RunSpec::new(&p, &r, method, gamma, 10, 7);
            spec.jit = true;
            let fast = run(&spec).unwrap();
            for j in 0..p.d() {
                let scale = dense.x_final[j].abs().max(1.0);
                assert!(
                    (dense.x_final[j] - fast.x_final[j]).abs() <= 1e-9 * scale,
                    "{method} coord {j}: {} vs {}",
                    dense.x_final[j],
                    fast.x_final[j]
                );
            }
            assert!(fast.max_jit_touch_ratio.unwrap() <= 4.0);
        }
    }

    #[test]
    fn jit_rejected_for_finito_and_dense_diagnostics() {
        let ds = sparse_glm_dataset(10, 8, 2, 0).unwrap();
        let p = FiniteSumProblem::glm(LossKind::Logistic, ds, 0.1).unwrap();
        let r = p.solve_reference(1e-8).unwrap();
        let mut spec = RunSpec::new(&p, &r, MethodKind::Finito, 0.01, 2, 0);
        spec.jit = true;
        assert!(run(&spec).is_err());
        let mut spec = RunSpec::new(&p, &r, MethodKind::Csaga, 0.01, 2, 0);
        spec.jit = true;
        spec.diagnostics = true;
        assert!(run(&spec).is_err());
    }

    #[test]
    fn jit_divergence_reported_at_wild_stepsize() {
        let ds = sparse_glm_dataset(10, 8, 2, 0).unwrap();
        let p = FiniteSumProblem::glm(LossKind::Logistic, ds, 0.1).unwrap();
        let r = p.solve_reference(1e-8).unwrap();
        let mut spec = RunSpec::new(&p, &r, MethodKind::Csaga, 1e4, 6, 0);
        spec.jit = true;
        let out = run(&spec).unwrap();
        assert!(out.diverged(), "rho = 1 - γλ = -999 must blow up");
    }

    #[test]
    fn scheduler_override_changes_trajectory() {
        let (p, r) = quad_setup(6);
        let cyclic = run(&RunSpec::new(&p, &r, MethodKind::Csaga, 0.02, 5, 3)).unwrap();
        let mut spec = RunSpec::new(&p, &r, MethodKind::Csaga, 0.02, 5, 3);
        spec.scheduler = Some(SchedulerKind::Iid);
        let iid = run(&spec).unwrap();
        assert_ne!(cyclic.x_final, iid.x_final);
    }
}
