//! Incremental-gradient solvers. A *method* is an update engine paired
//! with a component scheduler:
//!
//! | method   | engine | scheduler           |
//! |----------|--------|---------------------|
//! | `csaga`  | saga   | cyclic              |
//! | `saga`   | saga   | iid                 |
//! | `rp_saga`| saga   | random permutation  |
//! | `iag`    | sag    | cyclic              |
//! | `sag`    | sag    | iid                 |
//! | `diag`   | finito | cyclic              |
//! | `finito` | finito | iid                 |
//! | `gd`     | full-gradient step per epoch |

pub mod jit;
pub mod literal;
pub mod run;
pub mod scheduler;
pub mod state;
pub mod steps;

pub use jit::JitState;
pub use literal::literal_csaga;
pub use run::{run, RunOutput, RunSpec, SUBOPT_FLOOR};
pub use scheduler::{Scheduler, SchedulerKind};
pub use state::{init, HistoryWindow, SolverState, TableState, DIVERGENCE_SQ_CAP};
pub use steps::{epoch_refresh, gd_epoch, step_csaga, step_finito_diag, step_jit, step_sag_iag};

use crate::error::Error;

/// The update rule family, independent of how components are ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Gd,
    Saga,
    Sag,
    Finito,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Gd,
    Csaga,
    Saga,
    RpSaga,
    Sag,
    Iag,
    Finito,
    Diag,
}

impl MethodKind {
    pub const ALL: [MethodKind; 8] = [
        MethodKind::Gd,
        MethodKind::Csaga,
        MethodKind::Saga,
        MethodKind::RpSaga,
        MethodKind::Sag,
        MethodKind::Iag,
        MethodKind::Finito,
        MethodKind::Diag,
    ];

    pub fn engine(self) -> Engine {
        match self {
            MethodKind::Gd => Engine::Gd,
            MethodKind::Csaga | MethodKind::Saga | MethodKind::RpSaga => Engine::Saga,
            MethodKind::Sag | MethodKind::Iag => Engine::Sag,
            MethodKind::Finito | MethodKind::Diag => Engine::Finito,
        }
    }

    /// The scheduler that defines the method (`None` for full-gradient
    /// descent, which touches every component each step).
    pub fn default_scheduler(self) -> Option<SchedulerKind> {
        match self {
            MethodKind::Gd => None,
            MethodKind::Csaga | MethodKind::Iag | MethodKind::Diag => Some(SchedulerKind::Cyclic),
            MethodKind::Saga | MethodKind::Sag | MethodKind::Finito => Some(SchedulerKind::Iid),
            MethodKind::RpSaga => Some(SchedulerKind::RandomPermutation),
        }
    }

    /// Whether the deferred sparse path applies: it needs a per-component
    /// scalar table, which the finito engine (full iterate anchors) and
    /// gd (no table) don't have.
    pub fn jit_capable(self) -> bool {
        matches!(self.engine(), Engine::Saga | Engine::Sag)
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Gd => "gd",
            MethodKind::Csaga => "csaga",
            MethodKind::Saga => "saga",
            MethodKind::RpSaga => "rp_saga",
            MethodKind::Sag => "sag",
            MethodKind::Iag => "iag",
            MethodKind::Finito => "finito",
            MethodKind::Diag => "diag",
        }
    }
}

impl std::str::FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "gd" => Ok(MethodKind::Gd),
            "csaga" => Ok(MethodKind::Csaga),
            "saga" => Ok(MethodKind::Saga),
            "rp_saga" | "rp-saga" => Ok(MethodKind::RpSaga),
            "sag" => Ok(MethodKind::Sag),
            "iag" => Ok(MethodKind::Iag),
            "finito" => Ok(MethodKind::Finito),
            "diag" => Ok(MethodKind::Diag),
            other => Err(Error::InvalidArgument(format!(
                "unknown method '{other}' (expected one of gd, csaga, saga, rp_saga, sag, iag, finito, diag)"
            ))),
        }
    }
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
