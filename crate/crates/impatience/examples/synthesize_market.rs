//! Realize a decreasing-impatience factor as the equilibrium prices of
//! a market of exponential discounters.
//!
//! ```bash
//! cargo run -p impatience --example synthesize_market
//! ```

use impatience::{synthesize_economy, verify_equilibrium, DiscountFactor};

fn main() {
    let factor = DiscountFactor::generalized_beta_delta(0.6, 0.9, 1, 4).unwrap();
    println!("target factor: {:?}", factor.values());

    // One exponential agent per period; agent i's discount rate comes
    // from the line supporting log f at date i, and their wealth is f(i).
    let (economy, candidate) = synthesize_economy(&factor).unwrap();
    println!("synthesized {} agents:", economy.agents().len());
    for (i, agent) in economy.agents().iter().enumerate() {
        println!(
            "  agent {i}: delta = {:.6}, wealth = {:.6}",
            agent.delta, agent.wealth
        );
    }

    // The designed equilibrium: agent i consumes exactly period i, and
    // prices equal the (normalized) factor itself.
    println!("candidate prices: {:?}", candidate.prices);
    let report =
        verify_equilibrium(&economy, &candidate.prices, &candidate.allocation, 1e-10).unwrap();
    println!("verification: {}", if report.ok { "pass" } else { "fail" });
    println!("max budget residual: {:.3e}", report.max_budget_residual);
    assert!(report.ok);

    // Tampering with one price breaks some agent's optimality.
    let mut tampered = candidate.prices.clone();
    tampered[2] *= 1.02;
    let broken = verify_equilibrium(&economy, &tampered, &candidate.allocation, 1e-10).unwrap();
    println!(
        "after a 2% bump of p(2): {}",
        if broken.ok { "pass" } else { "fail" }
    );
    for violation in broken.violations.iter().take(3) {
        println!("  {violation}");
    }
    assert!(!broken.ok);
}
