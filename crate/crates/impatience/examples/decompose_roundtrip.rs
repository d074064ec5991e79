//! Split a decreasing-impatience factor into generalized beta-delta
//! components and rebuild it.
//!
//! ```bash
//! cargo run -p impatience --example decompose_roundtrip
//! ```

use impatience::{decompose, reconstruct, DiscountFactor};

fn show(name: &str, factor: &DiscountFactor) {
    let d = decompose(factor).expect("factor displays decreasing impatience");
    println!("{name}");
    println!(
        "  scale = {:.6}, tail ratio gamma = {:.6}",
        d.scale, d.gamma
    );
    for (i, c) in d.components.iter().enumerate() {
        println!(
            "  component {i}: beta = {:.6}, delta = {:.6}, switch at t* = {}, weight = {:.4}",
            c.beta, c.delta, c.switch, c.eta
        );
    }
    let rebuilt = reconstruct(&d, factor.horizon());
    let worst = rebuilt
        .values()
        .iter()
        .zip(factor.values())
        .map(|(r, v)| (r / v - 1.0).abs())
        .fold(0.0, f64::max);
    println!("  max relative reconstruction error: {worst:.3e}");
}

fn main() {
    // Exponential: the decomposition is a single component.
    show(
        "exponential delta=0.5",
        &DiscountFactor::generalized_beta_delta(1.0, 0.5, 1, 5).unwrap(),
    );

    // Quasi-hyperbolic: one switching component plus the pure trend.
    show(
        "quasi-hyperbolic beta=0.6 delta=0.9",
        &DiscountFactor::generalized_beta_delta(0.6, 0.9, 1, 5).unwrap(),
    );

    // A generic decreasing-impatience sequence with several active
    // switch dates.
    let generic = DiscountFactor::new(vec![1.0, 0.5, 0.26, 0.14, 0.0754]).unwrap();
    show("generic DI factor", &generic);

    // Every component is itself a decreasing-impatience discount factor.
    let d = decompose(&generic).unwrap();
    for c in &d.components {
        assert!(c.to_factor(4).is_decreasing_impatience(1e-12));
    }
    println!("all components individually display decreasing impatience");
}
