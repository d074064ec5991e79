//! Pool a group's discount factors into a social one by weighted
//! geometric mean, and see why the alternatives fail.
//!
//! ```bash
//! cargo run -p impatience --example aggregate_discounts
//! ```

use impatience::{
    arithmetic_mean, check_pareto_dated, check_time_consistency, constant_aggregator,
    geometric_mean, normalize, DiscountFactor, Profile, Weights,
};

fn main() {
    let patient = normalize(&DiscountFactor::generalized_beta_delta(1.0, 0.9, 1, 8).unwrap());
    let impatient = normalize(&DiscountFactor::generalized_beta_delta(1.0, 0.4, 1, 8).unwrap());
    let biased = normalize(&DiscountFactor::generalized_beta_delta(0.7, 0.8, 1, 8).unwrap());
    let profile = Profile::new(vec![patient, impatient, biased]).unwrap();
    let weights = Weights::new(vec![0.5, 0.25, 0.25]).unwrap();

    let social = geometric_mean(&profile, &weights).unwrap();
    println!("social discount factor (geometric mean, weights 0.5/0.25/0.25):");
    for (t, v) in social.values().iter().enumerate() {
        println!("  f({t}) = {v:.6}");
    }

    // The geometric mean is time consistent: revisiting the aggregation
    // after t periods changes nothing.
    for shift in 0..=4 {
        assert!(check_time_consistency(&geometric_mean, &profile, &weights, shift, 1e-10).unwrap());
    }
    println!("time consistency holds at every shift");

    // The arithmetic mean is not: two exponentials pooled additively
    // drift toward the patient member as time passes.
    let two = Profile::new(vec![
        normalize(&DiscountFactor::generalized_beta_delta(1.0, 0.3, 1, 8).unwrap()),
        normalize(&DiscountFactor::generalized_beta_delta(1.0, 0.9, 1, 8).unwrap()),
    ])
    .unwrap();
    let uniform = Weights::uniform(2);
    let consistent = check_time_consistency(&arithmetic_mean, &two, &uniform, 1, 1e-10).unwrap();
    println!("arithmetic mean time consistent: {consistent}");
    assert!(!consistent);

    // A constant rule ignores unanimous preferences.
    let constant = constant_aggregator(0.5);
    let unanimous = Profile::new(vec![
        normalize(&DiscountFactor::generalized_beta_delta(1.0, 0.9, 1, 8).unwrap()),
        normalize(&DiscountFactor::generalized_beta_delta(1.0, 0.9, 1, 8).unwrap()),
    ])
    .unwrap();
    // Both members strictly prefer 1.0 tomorrow to 0.85 today; the
    // constant rule reverses them.
    let pareto = check_pareto_dated(&constant, &unanimous, &uniform, 1, 0, 1.0, 0.85).unwrap();
    println!("constant rule respects unanimity: {pareto}");
    assert!(!pareto);
}
