//! Solve a parimutuel economy by proportional-response dynamics and
//! inspect the equilibrium's envelope structure.
//!
//! ```bash
//! cargo run -p impatience --example solve_equilibrium
//! ```

use impatience::{
    envelope_prices, join_decomposition, solve_equilibrium, uniqueness_probe, verify_equilibrium,
    DiscountFactor, Economy, ExponentialAgent,
};

fn main() {
    let economy = Economy::new(
        vec![
            ExponentialAgent {
                delta: 0.5,
                wealth: 1.0,
            },
            ExponentialAgent {
                delta: 0.9,
                wealth: 1.0,
            },
        ],
        5,
    )
    .unwrap();

    let result = solve_equilibrium(&economy, 1e-12, 500_000).unwrap();
    println!(
        "converged in {} rounds, final price change {:.3e}",
        result.iterations, result.residual
    );
    for (t, p) in result.prices.iter().enumerate() {
        println!(
            "  p({t}) = {p:.9}   shares: {:.6} / {:.6}",
            result.allocation.share(0, t),
            result.allocation.share(1, t)
        );
    }

    // The impatient agent consumes the early periods, the patient one
    // the late periods; prices inherit decreasing impatience.
    let as_factor = DiscountFactor::new(result.prices.clone()).unwrap();
    println!(
        "prices display decreasing impatience: {}",
        as_factor.is_decreasing_impatience(1e-9)
    );

    let report = verify_equilibrium(&economy, &result.prices, &result.allocation, 1e-8).unwrap();
    println!("verification: {}", if report.ok { "pass" } else { "fail" });

    // Prices are the upper envelope of the agents' scaled exponentials.
    println!("join weights: {:?}", result.join_weights);
    let pairs: Vec<(f64, f64)> = result
        .join_weights
        .iter()
        .zip(economy.agents())
        .map(|(&alpha, agent)| (alpha, agent.delta))
        .collect();
    let envelope = envelope_prices(&pairs, economy.horizon()).unwrap();
    let worst = result
        .prices
        .iter()
        .zip(&envelope)
        .map(|(p, e)| (p - e).abs() / p)
        .fold(0.0, f64::max);
    println!("max relative gap to the envelope: {worst:.3e}");

    // The same weights in normalized-measure form.
    let alphas = join_decomposition(&result.prices, &economy, &result.allocation, 1e-9).unwrap();
    println!("join weights (normalized measures): {alphas:?}");

    // Different solver starts land on the same prices.
    let distance = uniqueness_probe(&economy, 5, 1e-12).unwrap();
    println!("max price distance over 5 starts: {distance:.3e}");
}
