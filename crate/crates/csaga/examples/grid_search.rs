//! Stepsize grid search: run one method across a geometric grid, report
//! every cell (divergence is data, not failure), and pick the winner.
//!
//!     cargo run --example grid_search

use csaga::bench::{default_gamma_grid, grid_search};
use csaga::{MethodKind, Result, RunSpec};

fn main() -> Result<()> {
    let p = csaga::synth::quadratic_family(16, 5, 1.0, 40.0, 3)?;
    let reference = p.solve_reference(1e-12)?;

    let template = RunSpec::new(&p, &reference, MethodKind::Csaga, f64::NAN, 25, 0);
    let grid = grid_search(&template, &default_gamma_grid())?;

    println!("{:>12} {:>16} {:>10}", "gamma", "final f(x)-f*", "status");
    for cell in &grid.cells {
        match cell.output.final_suboptimality() {
            Some(s) => println!("{:>12.4e} {:>16.6e} {:>10}", cell.gamma, s, "ok"),
            None => println!(
                "{:>12.4e} {:>16} {:>10}",
                cell.gamma,
                "-",
                format!("diverged@{}", cell.output.diverged_at.unwrap())
            ),
        }
    }
    println!();
    println!("best stepsize {:.4e}", grid.best_gamma());
    Ok(())
}
