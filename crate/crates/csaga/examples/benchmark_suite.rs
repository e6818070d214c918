//! A labeled multi-variant benchmark: every variant gets its own trace
//! CSV, and a summary CSV ranks them (converged first, best last value
//! first). Fixed stepsizes and per-variant grids can be mixed.
//!
//!     cargo run --example benchmark_suite

use csaga::bench::{default_gamma_grid, run_suite, GammaSpec, SuiteConfig, SuiteVariant};
use csaga::{MethodKind, Result};

fn main() -> Result<()> {
    let p = csaga::synth::quadratic_family(12, 4, 1.0, 20.0, 9)?;
    let reference = p.solve_reference(1e-12)?;
    let out_dir = std::env::temp_dir().join("csaga_suite_example");

    let variants = vec![
        SuiteVariant {
            label: "csaga-grid".into(),
            method: MethodKind::Csaga,
            scheduler: None,
            seed: 0,
            gamma: GammaSpec::Grid(default_gamma_grid()),
        },
        SuiteVariant {
            label: "iag-grid".into(),
            method: MethodKind::Iag,
            scheduler: None,
            seed: 0,
            gamma: GammaSpec::Grid(default_gamma_grid()),
        },
        SuiteVariant {
            label: "gd-fixed".into(),
            method: MethodKind::Gd,
            scheduler: None,
            seed: 0,
            gamma: GammaSpec::Fixed(1.0 / p.smoothness()),
        },
        SuiteVariant {
            label: "saga-hot".into(),
            method: MethodKind::Saga,
            scheduler: None,
            seed: 0,
            gamma: GammaSpec::Fixed(50.0), // deliberately divergent
        },
    ];

    let cfg = SuiteConfig {
        problem: &p,
        reference: &reference,
        epochs: 25,
        jit: false,
        out_dir: out_dir.clone(),
    };
    let rows = run_suite(&cfg, &variants)?;

    println!(
        "{:<12} {:>12} {:>16} {:>10}",
        "label", "gamma", "final f(x)-f*", "converged"
    );
    for r in &rows {
        println!(
            "{:<12} {:>12.4e} {:>16} {:>10}",
            r.label,
            r.gamma,
            r.final_suboptimality
                .map(|s| format!("{s:.6e}"))
                .unwrap_or_else(|| "-".into()),
            r.converged
        );
    }
    println!();
    println!("traces and summary.csv written under {}", out_dir.display());
    Ok(())
}
