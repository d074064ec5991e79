//! Deterministic random-instance generation.
//!
//! All randomness in the crate flows through [`SplitMix64`], a 64-bit
//! mixing generator with a fixed, platform-independent update rule, so
//! every randomized suite is replayable from a single seed. The
//! generators below produce the instance families the property suites
//! run on: decreasing-impatience factors, deliberate violations,
//! concave expansion targets, normalized profiles, and economies.

use crate::aggregate::{normalize, NormalizedFactor, Profile};
use crate::discount::DiscountFactor;
use crate::market::{Economy, ExponentialAgent};

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, then two xor-shift-multiply
/// rounds. Passes through every 64-bit state exactly once.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` using the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }

    /// Uniform integer draw from `lo..=hi`.
    pub fn int_in_range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}

/// Stateless hash of a `(stream, i, t)` triple into `[0, 1)`; used for
/// deterministic jittered solver starts.
pub fn unit_hash(stream: u64, i: u64, t: u64) -> f64 {
    let mut rng = SplitMix64::new(
        stream
            .wrapping_mul(0x9E3779B97F4A7C15)
            .wrapping_add(i.wrapping_mul(0xD1B54A32D192ED03))
            .wrapping_add(t),
    );
    rng.next_unit()
}

/// A random decreasing-impatience factor with `horizon in 3..=max_horizon`
/// and every one-period ratio at most `max_ratio` (strictly decreasing).
///
/// Built from a weakly increasing ratio sequence, which makes
/// log-convexity hold by construction.
pub fn random_di_factor(
    rng: &mut SplitMix64,
    max_horizon: usize,
    max_ratio: f64,
) -> DiscountFactor {
    let horizon = rng.int_in_range(3, max_horizon);
    let mut ratios: Vec<f64> = (0..horizon)
        .map(|_| rng.in_range(0.05, max_ratio))
        .collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = rng.in_range(0.5, 2.0);
    let mut values = Vec::with_capacity(horizon + 1);
    values.push(scale);
    for r in &ratios {
        values.push(values.last().unwrap() * r);
    }
    DiscountFactor::new(values).expect("monotone ratios in (0,1) give a valid factor")
}

/// A random factor that fails decreasing impatience with a ratio drop of
/// at least `min_drop` at some step `t >= 1`, so a convexity violation
/// witness is guaranteed to exist away from the boundary window.
pub fn random_non_di_factor(
    rng: &mut SplitMix64,
    max_horizon: usize,
    min_drop: f64,
) -> DiscountFactor {
    let horizon = rng.int_in_range(4, max_horizon.max(4));
    let mut ratios: Vec<f64> = (0..horizon).map(|_| rng.in_range(0.4, 0.95)).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Break ratio monotonicity at step >= 2, so the violated window
    // starts at t >= 1 and a witness exists away from the boundary.
    let break_at = rng.int_in_range(2, horizon - 1);
    ratios[break_at] = (ratios[break_at - 1] - min_drop).max(0.05);
    let mut values = Vec::with_capacity(horizon + 1);
    values.push(1.0);
    for r in &ratios {
        values.push(values.last().unwrap() * r);
    }
    DiscountFactor::new(values).expect("ratios stay in (0,1)")
}

/// A random concave increasing sequence with `h(0) = 0` and a flat final
/// step: weakly decreasing nonnegative increments ending in zero.
pub fn random_concave_h(rng: &mut SplitMix64, max_horizon: usize) -> Vec<f64> {
    let horizon = rng.int_in_range(3, max_horizon);
    let mut steps: Vec<f64> = (0..horizon - 1).map(|_| rng.in_range(0.0, 2.0)).collect();
    steps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    steps.push(0.0);
    let mut h = Vec::with_capacity(horizon + 1);
    h.push(0.0);
    let mut acc = 0.0;
    for s in steps {
        acc += s;
        h.push(acc);
    }
    h
}

/// A random profile of `members` normalized factors over a shared
/// horizon: a mix of generalized beta-delta and generic DI members.
pub fn random_profile(rng: &mut SplitMix64, members: usize, horizon: usize) -> Profile {
    let factors: Vec<NormalizedFactor> = (0..members)
        .map(|_| {
            if rng.next_unit() < 0.5 {
                let beta = rng.in_range(0.3, 1.0);
                let delta = rng.in_range(0.3, 0.95);
                let switch = rng.int_in_range(1, horizon.min(4));
                normalize(
                    &DiscountFactor::generalized_beta_delta(beta, delta, switch, horizon)
                        .expect("parameters drawn in range"),
                )
            } else {
                let mut ratios: Vec<f64> = (0..horizon).map(|_| rng.in_range(0.2, 0.95)).collect();
                ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut values = vec![1.0];
                for r in &ratios {
                    values.push(values.last().unwrap() * r);
                }
                normalize(&DiscountFactor::new(values).expect("valid by construction"))
            }
        })
        .collect();
    Profile::new(factors).expect("members share the horizon")
}

/// A random economy with up to `max_agents` exponential agents and
/// horizon in `2..=max_horizon`. Deltas are kept at least 0.02 apart so
/// instances stay well conditioned for the solver.
pub fn random_economy(rng: &mut SplitMix64, max_agents: usize, max_horizon: usize) -> Economy {
    let n = rng.int_in_range(1, max_agents);
    let horizon = rng.int_in_range(2, max_horizon);
    let mut deltas: Vec<f64> = Vec::with_capacity(n);
    while deltas.len() < n {
        let candidate = rng.in_range(0.05, 0.95);
        if deltas.iter().all(|d| (d - candidate).abs() >= 0.02) {
            deltas.push(candidate);
        }
    }
    let agents = deltas
        .into_iter()
        .map(|delta| ExponentialAgent {
            delta,
            wealth: rng.in_range(0.2, 3.0),
        })
        .collect();
    Economy::new(agents, horizon).expect("agents drawn within bounds")
}
