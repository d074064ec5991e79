//! Classify discount factors and falsify decreasing impatience with a
//! single investment question.
//!
//! ```bash
//! cargo run -p impatience --example check_impatience
//! ```

use impatience::{DatedReward, DiscountFactor, Preference};

fn classify(name: &str, factor: &DiscountFactor) {
    let ratios: Vec<String> = factor
        .impatience_ratios()
        .iter()
        .map(|r| format!("{r:.4}"))
        .collect();
    println!("{name}");
    println!("  impatience ratios: {}", ratios.join(" "));
    println!("  stationary: {}", factor.is_stationary(1e-10));
    println!(
        "  decreasing impatience: {}",
        factor.is_decreasing_impatience(1e-10)
    );
    println!(
        "  increasing impatience: {}",
        factor.is_increasing_impatience(1e-10)
    );
}

fn main() {
    // Exponential discounting: constant impatience.
    let exponential = DiscountFactor::generalized_beta_delta(1.0, 0.5, 1, 6).unwrap();
    classify("exponential delta=0.5", &exponential);

    // Quasi-hyperbolic: extra discounting of everything beyond today.
    let quasi = DiscountFactor::generalized_beta_delta(0.6, 0.9, 1, 6).unwrap();
    classify("quasi-hyperbolic beta=0.6 delta=0.9", &quasi);

    // The week-vs-a-month-out story: preferring 110 later over 100 now
    // reverses as both dates approach.
    let f = DiscountFactor::generalized_beta_delta(0.9, 0.95, 1, 6).unwrap();
    let now = DatedReward::new(100.0, 0).unwrap();
    let later = DatedReward::new(110.0, 1).unwrap();
    let far = DatedReward::new(100.0, 1).unwrap();
    let farther = DatedReward::new(110.0, 2).unwrap();
    println!("dated-reward reversal under beta=0.9 delta=0.95:");
    println!(
        "  (110 at t=1) vs (100 at t=0): {:?}",
        f.compare_dated_rewards(&later, &now).unwrap()
    );
    println!(
        "  (110 at t=2) vs (100 at t=1): {:?}",
        f.compare_dated_rewards(&farther, &far).unwrap()
    );
    assert_eq!(
        f.compare_dated_rewards(&later, &now).unwrap(),
        Preference::BPreferred
    );
    assert_eq!(
        f.compare_dated_rewards(&farther, &far).unwrap(),
        Preference::APreferred
    );

    // A factor with increasing impatience, and the one investment
    // question that falsifies decreasing impatience for it.
    let values: Vec<f64> = (0..=5).map(|t: i32| 0.9f64.powi(t * t)).collect();
    let squared = DiscountFactor::new(values).unwrap();
    classify("f(t) = 0.9^(t^2)", &squared);
    let scan = squared.find_convexity_violation();
    let witness = scan
        .witness
        .expect("increasing impatience must be falsifiable");
    let growth = 1.0 + witness.rate;
    println!(
        "  falsifying question at rate r={:.4}, maturity t={}:",
        witness.rate, witness.period
    );
    println!(
        "    A: invest 1/2 to date {} -> {:.4}, and 1/2 to date {} -> {:.4}",
        witness.period - 1,
        0.5 * growth.powi(witness.period as i32 - 1),
        witness.period + 1,
        0.5 * growth.powi(witness.period as i32 + 1),
    );
    println!(
        "    B: invest 1 to date {} -> {:.4}",
        witness.period,
        growth.powi(witness.period as i32)
    );
    println!(
        "    discounted: A = {:.6} < B = {:.6}, so B is strictly preferred",
        witness.lhs, witness.rhs
    );
}
