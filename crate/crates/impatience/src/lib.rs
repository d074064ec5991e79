//! Discount factors with decreasing impatience: detection, decomposition,
//! aggregation, and market foundations.
//!
//! The crate is organized around one behavioral property — the one-period
//! impatience ratio `f(t+1)/f(t)` of a discount factor being weakly
//! increasing — and the three ways it can be operationalized:
//!
//! - [`discount`] represents finite-horizon factors, streams and dated
//!   rewards, and decides decreasing impatience both directly
//!   (log-convexity) and behaviorally (compound-interest convexity, with
//!   single-question falsification witnesses);
//! - [`decompose`] factors any decreasing-impatience sequence into a
//!   weighted geometric mean of generalized beta-delta components and
//!   reconstructs it for verification;
//! - [`aggregate`] pools normalized factors by weighted geometric mean
//!   and ships executable checks for Pareto, independence of irrelevant
//!   alternatives, and time consistency, plus counterexample aggregators
//!   showing the three checks are independent;
//! - [`market`] realizes any decreasing-impatience factor as equilibrium
//!   prices of a parimutuel market of exponential discounters, and solves
//!   arbitrary such markets by proportional-response dynamics on the
//!   Nash-welfare program.
//!
//! [`io`] holds the CSV/JSON/document formats shared with the `impatience`
//! binary; [`rng`] is the seeded generator behind every randomized suite.
//!
//! Each capability has a runnable demonstration under `examples/`:
//!
//! ```bash
//! cargo run -p impatience --example check_impatience
//! cargo run -p impatience --example decompose_roundtrip
//! cargo run -p impatience --example aggregate_discounts
//! cargo run -p impatience --example synthesize_market
//! cargo run -p impatience --example solve_equilibrium
//! cargo run -p impatience --example envelope_figure
//! ```

pub mod aggregate;
pub mod cli;
pub mod decompose;
pub mod discount;
pub mod io;
pub mod market;
pub mod rng;
pub mod selftest;

pub use aggregate::{
    arithmetic_mean, check_iia, check_pareto_dated, check_time_consistency, constant_aggregator,
    geometric_mean, normalize, summability_check, t_shift, tail_dependent_aggregator,
    AggregateError, NormalizedFactor, Profile, Weights,
};
pub use decompose::{
    decompose, min_basis_weights, reconstruct, tail_ratio, BetaDeltaComponent, DecomposeError,
    Decomposition, MinBasis,
};
pub use discount::{
    ConvexityScan, ConvexityWitness, DatedReward, DiscountError, DiscountFactor, Preference, Stream,
};
pub use market::{
    envelope_prices, join_decomposition, solve_equilibrium, supporting_lines, synthesize_economy,
    uniqueness_probe, verify_equilibrium, Allocation, Economy, EquilibriumResult, ExponentialAgent,
    MarketError, SupportingLine, VerifyReport, Violation,
};
