//! The price envelope of three exponential agents, as plot-ready CSV:
//! the most impatient agent leads early periods, the most patient one
//! takes over the tail.
//!
//! ```bash
//! cargo run -p impatience --example envelope_figure
//! ```

use impatience::{envelope_prices, DiscountFactor};

fn main() {
    let pairs = [(1.0, 0.3), (0.65, 0.6), (0.3, 0.8)];
    let horizon = 10;
    let envelope = envelope_prices(&pairs, horizon).unwrap();

    println!("t,envelope,agent_1,agent_2,agent_3,leader");
    for (t, price) in envelope.iter().enumerate() {
        let branches: Vec<f64> = pairs
            .iter()
            .map(|&(alpha, delta)| alpha * delta.powi(t as i32))
            .collect();
        let leader = branches
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i + 1)
            .unwrap();
        println!(
            "{t},{:.9},{:.9},{:.9},{:.9},agent_{leader}",
            price, branches[0], branches[1], branches[2]
        );
    }

    // The envelope is a discount factor with decreasing impatience, and
    // leadership passes down the delta ladder as t grows.
    let factor = DiscountFactor::new(envelope).unwrap();
    assert!(factor.is_decreasing_impatience(1e-12));
    eprintln!("envelope is weakly decreasing and log-convex");
}
