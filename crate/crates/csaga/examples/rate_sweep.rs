//! Empirical versus certified rates across conditioning regimes: the
//! certified factor is deliberately conservative, and the gap is visible.
//!
//!     cargo run --release --example rate_sweep

use csaga::diagnostics::rate_sweep;
use csaga::Result;

fn main() -> Result<()> {
    let rows = rate_sweep(&[1.0, 10.0, 100.0], &[2, 10], 300, 0)?;

    println!(
        "{:>8} {:>4} {:>7} {:>12} {:>16} {:>16}",
        "kappa", "n", "method", "gamma", "empirical rate", "certified rate"
    );
    for r in &rows {
        println!(
            "{:>8} {:>4} {:>7} {:>12.4e} {:>16} {:>16}",
            r.kappa,
            r.n,
            r.method.name(),
            r.gamma,
            r.empirical_rate
                .map(|v| format!("{v:.8}"))
                .unwrap_or_else(|| "-".into()),
            r.theoretical_rate
                .map(|v| format!("{v:.8}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    println!();
    println!("csaga runs at its certified stepsize (rate guaranteed; pessimistic),");
    println!("iag runs at its grid-best stepsize (no certified per-epoch factor)");
    Ok(())
}
