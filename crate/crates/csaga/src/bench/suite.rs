//! Multi-variant benchmark suites: run several method/stepsize variants
//! on one problem, write a trace CSV per variant, and summarize the
//! final standings in one table sorted by final suboptimality.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::objectives::{FiniteSumProblem, Reference};
use crate::solvers::{run, MethodKind, RunSpec, SchedulerKind};

use super::grid::grid_search;
use super::{format_float, write_trace_csv};

#[derive(Clone, Debug)]
pub enum GammaSpec {
    Fixed(f64),
    /// Search the given grid and report the best cell.
    Grid(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct SuiteVariant {
    /// File stem for the variant's trace CSV; must be unique.
    pub label: String,
    pub method: MethodKind,
    pub scheduler: Option<SchedulerKind>,
    pub seed: u64,
    pub gamma: GammaSpec,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig<'a> {
    pub problem: &'a FiniteSumProblem,
    pub reference: &'a Reference,
    pub epochs: usize,
    pub jit: bool,
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct SuiteRow {
    pub label: String,
    pub method: MethodKind,
    pub scheduler: Option<SchedulerKind>,
    pub seed: u64,
    pub gamma: f64,
    /// Absent for divergent runs.
    pub final_suboptimality: Option<f64>,
    pub converged: bool,
    pub trace_path: PathBuf,
}

pub const SUMMARY_HEADER: &str = "label,method,scheduler,seed,gamma,final_suboptimality,converged";

/// Run every variant, write `<label>.csv` traces plus `summary.csv`
/// under the output directory, and return the summary rows: converged
/// variants first, ordered by final suboptimality.
pub fn run_suite(cfg: &SuiteConfig, variants: &[SuiteVariant]) -> Result<Vec<SuiteRow>> {
    if variants.is_empty() {
        return Err(Error::InvalidArgument("suite has no variants".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for v in variants {
        if !seen.insert(v.label.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate variant label '{}'",
                v.label
            )));
        }
    }
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;

    let mut rows = Vec::with_capacity(variants.len());
    for v in variants {
        let mut template = RunSpec::new(
            cfg.problem,
            cfg.reference,
            v.method,
            f64::NAN,
            cfg.epochs,
            v.seed,
        );
        template.scheduler = v.scheduler;
        template.jit = cfg.jit;
        let (gamma, output) = match &v.gamma {
            GammaSpec::Fixed(g) => {
                template.gamma = *g;
                (*g, run(&template)?)
            }
            GammaSpec::Grid(gs) => {
                let grid = grid_search(&template, gs)?;
                let best = grid.best();
                (best.gamma, best.output.clone())
            }
        };
        let trace_path = cfg.out_dir.join(format!("{}.csv", v.label));
        let file = fs::File::create(&trace_path).map_err(|e| Error::io(&trace_path, e))?;
        write_trace_csv(file, &output.records, output.diverged_at)
            .map_err(|e| Error::io(&trace_path, e))?;
        rows.push(SuiteRow {
            label: v.label.clone(),
            method: v.method,
            scheduler: v.scheduler.or_else(|| v.method.default_scheduler()),
            seed: v.seed,
            gamma,
            final_suboptimality: output.final_suboptimality(),
            converged: !output.diverged(),
            trace_path,
        });
    }

    rows.sort_by(
        |a, b| match (a.final_suboptimality, b.final_suboptimality) {
            (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.label.cmp(&b.label)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.label.cmp(&b.label),
        },
    );

    let summary_path = cfg.out_dir.join("summary.csv");
    let mut f = fs::File::create(&summary_path).map_err(|e| Error::io(&summary_path, e))?;
    write_summary(&mut f, &rows).map_err(|e| Error::io(&summary_path, e))?;
    Ok(rows)
}

fn write_summary(w: &mut impl Write, rows: &[SuiteRow]) -> std::io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.label,
            r.method,
            r.scheduler.map(|s| s.name()).unwrap_or(""),
            r.seed,
            format_float(r.gamma),
            r.final_suboptimality.map(format_float).unwrap_or_default(),
            r.converged
        )?;
    }
    Ok(())
}

/// Read back just the `(label, converged)` pairs of a summary CSV.
pub fn read_summary_labels(path: &Path) -> Result<Vec<(String, bool)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != SUMMARY_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header '{SUMMARY_HEADER}'"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let converged = fields[6].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad converged flag '{}'", fields[6]),
        })?;
        out.push((fields[0].to_string(), converged));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::read_trace_csv;
    use crate::synth::quadratic_family;

    #[test]
    fn suite_writes_traces_and_sorted_summary() {
        let p = quadratic_family(5, 3, 0.8, 4.0, 6).unwrap();
        let r = p.solve_reference(1e-13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cfg = SuiteConfig {
            problem: &p,
            reference: &r,
            epochs: 12,
            jit: false,
            out_dir: dir.path().to_path_buf(),
        };
        let variants = vec![
            SuiteVariant {
                label: "csaga".into(),
                method: MethodKind::Csaga,
                scheduler: None,
                seed: 1,
                gamma: GammaSpec::Fixed(0.02),
            },
            SuiteVariant {
                label: "gd".into(),
                method: MethodKind::Gd,
                scheduler: None,
                seed: 1,
                gamma: GammaSpec::Fixed(0.02),
            },
            SuiteVariant {
                label: "runaway".into(),
                method: MethodKind::Iag,
                scheduler: None,
                seed: 1,
                gamma: GammaSpec::Fixed(1e4),
            },
        ];
        let rows = run_suite(&cfg, &variants).unwrap();
        assert_eq!(rows.len(), 3);
        // divergent variant sorts last with no suboptimality
        assert_eq!(rows[2].label, "runaway");
        assert!(!rows[2].converged);
        assert!(rows[2].final_suboptimality.is_none());
        assert!(rows[0].final_suboptimality.unwrap() <= rows[1].final_suboptimality.unwrap());

        for row in &rows {
            let f = fs::File::open(&row.trace_path).unwrap();
            let (records, diverged) = read_trace_csv(std::io::BufReader::new(f)).unwrap();
            assert!(!records.is_empty());
            assert_eq!(diverged.is_some(), !row.converged);
        }
        let labels = read_summary_labels(&dir.path().join("summary.csv")).unwrap();
        assert_eq!(labels.len(), 3);
        assert_eq!(labels[2], ("runaway".to_string(), false));
    }

    #[test]
    fn grid_variant_reports_chosen_stepsize() {
        let p = quadratic_family(4, 3, 0.8, 4.0, 2).unwrap();
        let r = p.solve_reference(1e-13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cfg = SuiteConfig {
            problem: &p,
            reference: &r,
            epochs: 10,
            jit: false,
            out_dir: dir.path().to_path_buf(),
        };
        let variants = vec![SuiteVariant {
            label: "csaga_grid".into(),
            method: MethodKind::Csaga,
            scheduler: None,
            seed: 0,
            gamma: GammaSpec::Grid(vec![1e4, 0.05, 0.01]),
        }];
        let rows = run_suite(&cfg, &variants).unwrap();
        assert!(rows[0].converged);
        assert!(rows[0].gamma == 0.05 || rows[0].gamma == 0.01);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let p = quadratic_family(3, 3, 0.8, 4.0, 2).unwrap();
        let r = p.solve_reference(1e-13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cfg = SuiteConfig {
            problem: &p,
            reference: &r,
            epochs: 2,
            jit: false,
            out_dir: dir.path().to_path_buf(),
        };
        let v = SuiteVariant {
            label: "same".into(),
            method: MethodKind::Gd,
            scheduler: None,
            seed: 0,
            gamma: GammaSpec::Fixed(0.01),
        };
        assert!(run_suite(&cfg, &[v.clone(), v]).is_err());
    }
}
