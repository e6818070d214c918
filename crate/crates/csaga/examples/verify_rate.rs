//! Check a live trajectory against the theory: per-step Lyapunov values,
//! the per-epoch contraction V^{k+n} <= rho V^k, and the function-value
//! corollary f(x^{kn}) - f* <= (L/2) rho^k V^0.
//!
//!     cargo run --example verify_rate

use csaga::diagnostics::{check_contraction, check_corollary};
use csaga::{run, MethodKind, Result, RunSpec, TheoryConstants};

fn main() -> Result<()> {
    let p = csaga::synth::quadratic_family(10, 4, 1.0, 10.0, 0)?;
    let theory = TheoryConstants::for_problem(&p)?;
    let reference = p.solve_reference(1e-12)?;

    let mut x0 = reference.x_star.clone();
    x0[0] += 1.0;

    let mut spec = RunSpec::new(&p, &reference, MethodKind::Csaga, theory.gamma_thm, 200, 0);
    spec.diagnostics = true; // dense path + sliding history window
    spec.x0 = Some(&x0);
    let out = run(&spec)?;
    let trace = out.lyapunov.as_ref().expect("diagnostics enabled");

    let contraction = check_contraction(trace, theory.rho_thm, 1e-12);
    println!(
        "contraction  V(k+n) <= rho V(k):  {} pairs checked, {} violations",
        contraction.pairs_checked,
        contraction.violations.len()
    );
    println!(
        "  worst observed per-epoch ratio {:.10}  (certified {:.10})",
        contraction.max_pair_ratio, theory.rho_thm
    );

    let subopts: Vec<f64> = out.records.iter().map(|r| r.suboptimality).collect();
    let corollary = check_corollary(&subopts, trace.values()[0], theory.l, theory.rho_thm, 1e-12);
    println!(
        "corollary    f - f* <= (L/2) rho^k V0:  {} epochs checked, {} violations",
        corollary.epochs_checked,
        corollary.violations.len()
    );

    assert!(contraction.holds() && corollary.holds());
    println!();
    println!("both certified bounds hold along the whole trajectory");
    Ok(())
}
