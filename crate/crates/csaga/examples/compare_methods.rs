//! All eight methods on one problem at one stepsize: the classic
//! suboptimality-versus-epoch comparison, printed as a table.
//!
//!     cargo run --example compare_methods

use csaga::{run, MethodKind, Result, RunSpec};

fn main() -> Result<()> {
    let p = csaga::synth::quadratic_family(20, 6, 1.0, 25.0, 11)?;
    let reference = p.solve_reference(1e-12)?;
    let (_, l, _) = p.constants()?;
    let gamma = 0.3 / l;
    let epochs = 30;

    println!(
        "quadratic family: n = {}, d = {}, gamma = {gamma:.3e}",
        p.n(),
        p.d()
    );
    println!();
    println!(
        "{:<8} {:<20} {:>16} {:>10}",
        "method", "scheduler", "final f(x)-f*", "diverged"
    );
    for method in MethodKind::ALL {
        let spec = RunSpec::new(&p, &reference, method, gamma, epochs, 0);
        let out = run(&spec)?;
        println!(
            "{:<8} {:<20} {:>16} {:>10}",
            method.name(),
            method
                .default_scheduler()
                .map(|s| s.name().to_string())
                .unwrap_or_else(|| "full gradient".into()),
            out.final_suboptimality()
                .map(|s| format!("{s:.6e}"))
                .unwrap_or_else(|| "-".into()),
            out.diverged()
        );
    }
    println!();
    println!("(same stepsize for everyone; grid-best stepsizes differ per method,");
    println!(" see the grid_search example)");
    Ok(())
}
