//! The coupled-recurrence bound behind the rate proof: iterate
//!
//!     sigma_{k+1} = (1 + c1) sigma_k + tau_k,    sigma_0 = 1
//!     tau_{k+1}   = c2 sigma_k + tau_k,          tau_0   = 0
//!
//! exactly, and compare against the closed-form envelopes
//! sigma_k <= lambda1^k (1 + c1/(2 sqrt(c1^2 + 4 c2))) and
//! tau_k   <= lambda1^k c2/sqrt(c1^2 + 4 c2).
//!
//!     cargo run --example lemma_recurrence

use csaga::diagnostics::lemma1_bound_check;
use csaga::Result;

fn main() -> Result<()> {
    println!(
        "{:>6} {:>6} {:>6} {:>22}",
        "c1", "c2", "kmax", "max relative excess"
    );
    for (c1, c2) in [(3.0, 4.0), (0.5, 1.2), (10.0, 0.0), (0.0, 0.0), (2.0, 3.0)] {
        let report = lemma1_bound_check(c1, c2, 60)?;
        println!(
            "{c1:>6} {c2:>6} {:>6} {:>22.3e}",
            report.kmax, report.max_rel_excess
        );
    }
    println!();
    println!("a negative excess means the recurrence sits strictly below its envelope;");
    println!("anything above ~1e-12 would indicate the bound is violated");

    // the precondition 1 + c1 >= c2 is part of the statement, not an
    // implementation limit: outside it the envelope genuinely fails
    let err = lemma1_bound_check(0.0, 5.0, 10).unwrap_err();
    println!();
    println!("(c1, c2) = (0, 5) is rejected: {err}");
    Ok(())
}
