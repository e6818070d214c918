//! Incremental gradient methods for strongly convex finite sums, built around
//! cyclic SAGA and the Lyapunov analysis that certifies its linear rate.
//!
//! The library covers three layers:
//!
//! * **Solvers** ([`solvers`]) — a shared table engine that realizes C-SAGA,
//!   SAGA, RP-SAGA, SAG, IAG, Finito, DIAG, and full gradient descent as
//!   engine × scheduler combinations, plus a just-in-time sparse path.
//! * **Diagnostics** ([`diagnostics`]) — the certified stepsize and rate
//!   constants, per-step Lyapunov traces, and checkers that compare live
//!   trajectories against the contraction they are supposed to satisfy.
//! * **Bench** ([`bench`]) — trace/summary CSV formats, stepsize grid search,
//!   a bitwise reference cache, multi-variant suites, and the `csaga` CLI.
//!
//! Start from the `examples/` directory: each example is a runnable tour of
//! one capability (single runs, method comparisons, rate verification, grid
//! search, sweeps, sparse JIT speedups, scheduler ablations).

pub mod bench;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod objectives;
pub mod rng;
pub mod solvers;
pub mod synth;
pub mod vecmath;

pub use bench::{format_float, TraceRecord};
pub use diagnostics::TheoryConstants;
pub use error::{Error, Result};
pub use objectives::{FiniteSumProblem, LossKind, Reference};
pub use solvers::{literal_csaga, run, MethodKind, RunOutput, RunSpec, SchedulerKind};
pub use vecmath::DenseVec;
