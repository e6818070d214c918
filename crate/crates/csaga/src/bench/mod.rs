//! Benchmark harness: trace records and their CSV form, stepsize grid
//! search, multi-variant suites with summary tables, a reference-solution
//! cache, and the command-line interface.

pub mod cache;
pub mod cli;
pub mod grid;
pub mod suite;

pub use cache::{get_or_solve, reference_key, resolve_cache_dir};
pub use grid::{default_gamma_grid, grid_search, GridCell, GridOutcome};
pub use suite::{read_summary_labels, run_suite, GammaSpec, SuiteConfig, SuiteRow, SuiteVariant};

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One per-epoch measurement. `lyapunov` is present only when the run
/// tracked diagnostics; `wall_seconds` is elapsed time since the run
/// started (the one non-deterministic column).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub epoch: u32,
    pub grad_evals: u64,
    pub gamma: f64,
    pub suboptimality: f64,
    pub lyapunov: Option<f64>,
    pub wall_seconds: f64,
}

pub const TRACE_HEADER: &str = "epoch,grad_evals,gamma,suboptimality,lyapunov,wall_seconds";

/// Trailing comment line marking a truncated (divergent) trace.
pub const DIVERGENCE_MARKER: &str = "# diverged_at_step=";

/// Shortest decimal form that parses back to the same bits.
pub fn format_float(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_trace_csv(
    mut w: impl Write,
    records: &[TraceRecord],
    diverged_at: Option<u64>,
) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.epoch,
            r.grad_evals,
            format_float(r.gamma),
            format_float(r.suboptimality),
            r.lyapunov.map(format_float).unwrap_or_default(),
            format_float(r.wall_seconds),
        )?;
    }
    if let Some(step) = diverged_at {
        writeln!(w, "{DIVERGENCE_MARKER}{step}")?;
    }
    Ok(())
}

/// Parse a trace CSV back into records plus the divergence marker.
pub fn read_trace_csv(r: impl BufRead) -> Result<(Vec<TraceRecord>, Option<u64>)> {
    let mut records = Vec::new();
    let mut diverged_at = None;
    let mut saw_header = false;
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: format!("read failed: {e}"),
        })?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(DIVERGENCE_MARKER) {
            diverged_at = Some(rest.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad divergence marker '{line}'"),
            })?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != TRACE_HEADER {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header '{TRACE_HEADER}', got '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let num = |field: &str, name: &str| -> Result<f64> {
            field.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad {name} '{field}'"),
            })
        };
        records.push(TraceRecord {
            epoch: fields[0].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad epoch '{}'", fields[0]),
            })?,
            grad_evals: fields[1].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad grad_evals '{}'", fields[1]),
            })?,
            gamma: num(fields[2], "gamma")?,
            suboptimality: num(fields[3], "suboptimality")?,
            lyapunov: if fields[4].is_empty() {
                None
            } else {
                Some(num(fields[4], "lyapunov")?)
            },
            wall_seconds: num(fields[5], "wall_seconds")?,
        });
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            msg: "empty trace: missing header".into(),
        });
    }
    Ok((records, diverged_at))
}
