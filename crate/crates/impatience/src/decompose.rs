//! Factoring a decreasing-impatience factor into generalized beta-delta
//! components.
//!
//! Any factor `f` with decreasing impatience splits as a weighted
//! geometric mean of generalized beta-delta factors. The construction
//! runs through three exact steps at finite horizon:
//!
//! 1. peel off the tail ratio `gamma = f(T)/f(T-1)`, leaving
//!    `g(t) = gamma^(-t) f(t)` decreasing and log-convex;
//! 2. expand `h(t) = log g(0) - log g(t)` — nonnegative, increasing,
//!    concave, flat over the last step — in the `min(s, t)` basis with
//!    weights `alpha(s)` given by second differences;
//! 3. turn each active basis weight into one beta-delta component with
//!    `beta = exp(-K' * alpha(s))`, `delta = gamma`, switch at `s`, and
//!    uniform weight `1/K'`, plus one pure exponential component.
//!
//! The product of components then reproduces `f` exactly up to rounding.

use thiserror::Error;

use crate::discount::{DiscountFactor, DEFAULT_REL_TOL};

/// Minimum distance of the tail ratio from 1. Keeps every component's
/// delta strictly below 1 and the log expansions well conditioned.
pub const MIN_GAP: f64 = 1e-6;

/// Absolute tolerance on basis-weight nonnegativity and boundary checks.
const BASIS_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DecomposeError {
    #[error("factor does not display decreasing impatience")]
    NotDecreasingImpatience,
    #[error("tail ratio {gamma} exceeds 1 - {MIN_GAP}; factor is too flat to decompose")]
    TailRatioTooCloseToOne { gamma: f64 },
    #[error("input is not concave: basis weight at s={index} is {alpha}")]
    NotConcave { index: usize, alpha: f64 },
    #[error("bad boundary: expected h(0) = 0 and h(T) = h(T-1), got h(0)={first}, h(T)-h(T-1)={last_step}")]
    BadBoundary { first: f64, last_step: f64 },
    #[error("need at least 3 points, got {len}")]
    TooShort { len: usize },
}

/// Weights of the `min(s, t)` basis expansion of a concave sequence.
///
/// `alpha[s]` for `s = 1..=T-1` are the (negated) second differences;
/// `alpha[0]` is fixed to zero — the `s = 0` basis function vanishes,
/// so any value would do.
#[derive(Debug, Clone, PartialEq)]
pub struct MinBasis {
    alpha: Vec<f64>,
}

impl MinBasis {
    /// Weight sequence, indexed `s = 0..=T-1` with `alpha[0] = 0`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Evaluates `sum_s alpha[s] * min(s, t)`.
    pub fn evaluate(&self, t: usize) -> f64 {
        self.alpha
            .iter()
            .enumerate()
            .map(|(s, a)| a * s.min(t) as f64)
            .sum()
    }
}

/// Computes the basis weights of a concave increasing sequence `h` with
/// `h(0) = 0` and a flat final step.
///
/// Returns `alpha(s) = -h(s+1) + 2 h(s) - h(s-1) >= 0` for
/// `s = 1..=T-1`. Values in `[-1e-12, 0)` are rounded up to zero;
/// anything lower is a genuine concavity failure.
pub fn min_basis_weights(h: &[f64]) -> Result<MinBasis, DecomposeError> {
    if h.len() < 3 {
        return Err(DecomposeError::TooShort { len: h.len() });
    }
    let horizon = h.len() - 1;
    let scale = h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = BASIS_TOL * scale;
    let last_step = h[horizon] - h[horizon - 1];
    if h[0].abs() > tol || last_step.abs() > tol {
        return Err(DecomposeError::BadBoundary {
            first: h[0],
            last_step,
        });
    }
    let mut alpha = vec![0.0; horizon];
    for s in 1..horizon {
        let a = -h[s + 1] + 2.0 * h[s] - h[s - 1];
        if a < -tol {
            return Err(DecomposeError::NotConcave { index: s, alpha: a });
        }
        alpha[s] = a.max(0.0);
    }
    Ok(MinBasis { alpha })
}

/// One generalized beta-delta factor inside a decomposition, together
/// with its geometric weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaDeltaComponent {
    pub beta: f64,
    pub delta: f64,
    pub switch: usize,
    pub eta: f64,
}

impl BetaDeltaComponent {
    /// The component's value at date `t`: `beta^min(switch, t) * delta^t`.
    pub fn value(&self, t: usize) -> f64 {
        self.beta.powi(self.switch.min(t) as i32) * self.delta.powi(t as i32)
    }

    /// Materializes the component as a standalone factor.
    pub fn to_factor(&self, horizon: usize) -> DiscountFactor {
        DiscountFactor::generalized_beta_delta(self.beta, self.delta, self.switch, horizon)
            .expect("component parameters are valid by construction")
    }
}

/// The full factorization of a decreasing-impatience discount factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Overall scale, `f(0)`.
    pub scale: f64,
    /// Tail ratio `f(T)/f(T-1)`, the shared delta of every component.
    pub gamma: f64,
    /// Generalized beta-delta components with weights summing to 1.
    pub components: Vec<BetaDeltaComponent>,
    /// The concave expansion target `h(t) = log g(0) - log g(t)`.
    pub h: Vec<f64>,
    /// The detrended sequence `g(t) = gamma^(-t) f(t)`.
    pub g: Vec<f64>,
}

impl Decomposition {
    /// Largest relative gap between the reconstruction and `f`.
    pub fn max_relative_error(&self, f: &DiscountFactor) -> f64 {
        let rebuilt = reconstruct(self, f.horizon());
        rebuilt
            .values()
            .iter()
            .zip(f.values())
            .map(|(r, v)| (r / v - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Tail ratio `gamma = f(T)/f(T-1)`: under decreasing impatience the
/// largest one-period ratio, standing in for the limit ratio of the
/// infinite sequence.
pub fn tail_ratio(f: &DiscountFactor) -> Result<f64, DecomposeError> {
    if !f.is_decreasing_impatience(DEFAULT_REL_TOL) {
        return Err(DecomposeError::NotDecreasingImpatience);
    }
    let t = f.horizon();
    Ok(f.value(t) / f.value(t - 1))
}

/// Decomposes a decreasing-impatience factor into generalized
/// beta-delta components.
///
/// With `K` active basis weights, `K' = K + 1` components are emitted:
/// one per active weight (`beta = exp(-K' * alpha(s))`, switch at `s`)
/// plus one pure exponential, all with `delta = gamma` and uniform
/// weight `1/K'`. Raising each component to `1/K'` splits the common
/// `gamma^t` trend evenly, so the weighted product reproduces `f`
/// without any truncation error.
pub fn decompose(f: &DiscountFactor) -> Result<Decomposition, DecomposeError> {
    let gamma = tail_ratio(f)?;
    if gamma > 1.0 - MIN_GAP {
        return Err(DecomposeError::TailRatioTooCloseToOne { gamma });
    }
    let horizon = f.horizon();
    let ratios = f.impatience_ratios();
    let log_gamma = gamma.ln();

    // h(0) = 0; each step adds log(gamma / r(t)), which is >= 0 under
    // decreasing impatience and exactly 0 at the final step.
    let mut h = Vec::with_capacity(horizon + 1);
    h.push(0.0);
    let mut acc = 0.0;
    for (t, r) in ratios.iter().enumerate() {
        let step = if t == horizon - 1 {
            0.0
        } else {
            (log_gamma - r.ln()).max(0.0)
        };
        acc += step;
        h.push(acc);
    }

    let basis = min_basis_weights(&h)?;
    // Rounding in the ratio chain leaves dust-sized weights on stationary
    // stretches; dropping them below BASIS_TOL keeps the component list
    // minimal and moves the reconstruction by less than 1e-10 relative.
    let active_tol = BASIS_TOL * h.last().copied().unwrap_or(0.0).max(1.0);
    let active: Vec<(usize, f64)> = basis
        .alpha()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > active_tol)
        .map(|(s, a)| (s, *a))
        .collect();
    let count = active.len() + 1;
    let eta = 1.0 / count as f64;
    let mut components: Vec<BetaDeltaComponent> = active
        .into_iter()
        .map(|(s, a)| BetaDeltaComponent {
            beta: (-(count as f64) * a).exp(),
            delta: gamma,
            switch: s,
            eta,
        })
        .collect();
    components.push(BetaDeltaComponent {
        beta: 1.0,
        delta: gamma,
        switch: 1,
        eta,
    });

    let g = (0..=horizon)
        .map(|t| gamma.powi(-(t as i32)) * f.value(t))
        .collect();

    Ok(Decomposition {
        scale: f.value(0),
        gamma,
        components,
        h,
        g,
    })
}

/// Rebuilds a factor from its decomposition:
/// `f(t) = scale * prod_c component_c(t)^eta_c`.
pub fn reconstruct(d: &Decomposition, horizon: usize) -> DiscountFactor {
    let values = (0..=horizon)
        .map(|t| {
            d.scale
                * d.components
                    .iter()
                    .map(|c| c.value(t).powf(c.eta))
                    .product::<f64>()
        })
        .collect();
    DiscountFactor::new(values).expect("reconstruction of a valid decomposition is a valid factor")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exponential(delta: f64, horizon: usize) -> DiscountFactor {
        DiscountFactor::generalized_beta_delta(1.0, delta, 1, horizon).unwrap()
    }

    fn quasi_hyperbolic(beta: f64, delta: f64, horizon: usize) -> DiscountFactor {
        DiscountFactor::generalized_beta_delta(beta, delta, 1, horizon).unwrap()
    }

    #[test]
    fn tail_ratio_of_known_factors() {
        assert!((tail_ratio(&exponential(0.5, 3)).unwrap() - 0.5).abs() < 1e-15);
        assert!((tail_ratio(&quasi_hyperbolic(0.6, 0.9, 3)).unwrap() - 0.9).abs() < 1e-15);
        let f = DiscountFactor::new(vec![1.0, 0.5, 0.26, 0.14]).unwrap();
        assert!((tail_ratio(&f).unwrap() - 0.14 / 0.26).abs() < 1e-15);
    }

    #[test]
    fn tail_ratio_requires_decreasing_impatience() {
        let values = (0..=3).map(|t: i32| 0.9f64.powi(t * t)).collect();
        let f = DiscountFactor::new(values).unwrap();
        assert_eq!(tail_ratio(&f), Err(DecomposeError::NotDecreasingImpatience));
    }

    #[test]
    fn basis_weights_zero_function() {
        let basis = min_basis_weights(&[0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(basis.alpha(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn basis_weights_and_reconstruction() {
        // Oracle: evaluate sum_s alpha(s) * min(s, t) directly.
        let h = [0.0, 1.0, 1.5, 1.5];
        let basis = min_basis_weights(&h).unwrap();
        assert_eq!(basis.alpha(), &[0.0, 0.5, 0.5]);
        for (t, want) in h.iter().enumerate() {
            assert!((basis.evaluate(t) - want).abs() < 1e-15);
        }

        let h2 = [0.0, 1.0, 2.0, 2.0];
        let basis2 = min_basis_weights(&h2).unwrap();
        assert_eq!(basis2.alpha(), &[0.0, 0.0, 1.0]);
        for (t, want) in h2.iter().enumerate() {
            assert!((basis2.evaluate(t) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_weights_reject_bad_inputs() {
        assert!(matches!(
            min_basis_weights(&[0.1, 1.0, 1.5, 1.5]),
            Err(DecomposeError::BadBoundary { .. })
        ));
        assert!(matches!(
            min_basis_weights(&[0.0, 1.0, 1.5, 1.7]),
            Err(DecomposeError::BadBoundary { .. })
        ));
        // Convex kink: second difference at s=1 is -(2) + 2(0.5) - 0 = -1.
        assert!(matches!(
            min_basis_weights(&[0.0, 0.5, 2.0, 2.0]),
            Err(DecomposeError::NotConcave { index: 1, .. })
        ));
        assert!(matches!(
            min_basis_weights(&[0.0, 0.0]),
            Err(DecomposeError::TooShort { len: 2 })
        ));
    }

    #[test]
    fn decompose_exponential_is_single_component() {
        let f = exponential(0.5, 3);
        let d = decompose(&f).unwrap();
        assert_eq!(d.components.len(), 1);
        let c = &d.components[0];
        assert_eq!(c.beta, 1.0);
        assert!((c.delta - 0.5).abs() < 1e-15);
        assert_eq!(c.eta, 1.0);
        assert_eq!(d.scale, 1.0);
        assert_eq!(reconstruct(&d, 3).values(), f.values());
    }

    #[test]
    fn decompose_quasi_hyperbolic() {
        let f = quasi_hyperbolic(0.6, 0.9, 4);
        let d = decompose(&f).unwrap();
        assert!((d.gamma - 0.9).abs() < 1e-12);
        assert_eq!(d.components.len(), 2);

        // Single active weight alpha(1) = log(0.9/0.54) = log(5/3).
        let alpha1 = (5.0f64 / 3.0).ln();
        let split = &d.components[0];
        assert_eq!(split.switch, 1);
        assert!((split.beta - (-2.0 * alpha1).exp()).abs() < 1e-12);
        assert!((split.delta - 0.9).abs() < 1e-15);
        assert_eq!(split.eta, 0.5);

        let plain = &d.components[1];
        assert_eq!(plain.beta, 1.0);
        assert_eq!(plain.eta, 0.5);

        assert!(d.max_relative_error(&f) <= 1e-12);
    }

    #[test]
    fn decompose_generic_factor_round_trips() {
        let f = DiscountFactor::new(vec![1.0, 0.5, 0.26, 0.14, 0.0754]).unwrap();
        let d = decompose(&f).unwrap();
        assert!(d.max_relative_error(&f) <= 1e-9);
        // Every component is itself a decreasing-impatience factor.
        for c in &d.components {
            assert!(c.to_factor(f.horizon()).is_decreasing_impatience(1e-12));
            assert!(c.beta > 0.0 && c.beta <= 1.0);
            assert!((c.delta - d.gamma).abs() < 1e-15 && c.delta < 1.0);
        }
    }

    #[test]
    fn decompose_rejects_flat_tails_and_non_di() {
        let flat = DiscountFactor::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            decompose(&flat),
            Err(DecomposeError::TailRatioTooCloseToOne { .. })
        ));
        let values = (0..=3).map(|t: i32| 0.9f64.powi(t * t)).collect();
        let ii = DiscountFactor::new(values).unwrap();
        assert_eq!(decompose(&ii), Err(DecomposeError::NotDecreasingImpatience));
    }

    #[test]
    fn reconstruct_single_component_matches_definition() {
        let d = Decomposition {
            scale: 1.0,
            gamma: 0.9,
            components: vec![BetaDeltaComponent {
                beta: 0.8,
                delta: 0.9,
                switch: 2,
                eta: 1.0,
            }],
            h: vec![],
            g: vec![],
        };
        let rebuilt = reconstruct(&d, 4);
        let direct = DiscountFactor::generalized_beta_delta(0.8, 0.9, 2, 4).unwrap();
        for (r, want) in rebuilt.values().iter().zip(direct.values()) {
            assert!((r - want).abs() < 1e-15);
        }
    }

    #[test]
    fn lemma_increment_identity() {
        // h(t+1) - h(t) = sum of alpha over s >= t+1.
        let h = [0.0, 2.0, 3.2, 3.9, 4.1, 4.1];
        let basis = min_basis_weights(&h).unwrap();
        for t in 0..h.len() - 1 {
            let suffix: f64 = basis.alpha().iter().skip(t + 1).sum();
            assert!(
                (h[t + 1] - h[t] - suffix).abs() < 1e-12,
                "increment identity broken at t={t}"
            );
        }
    }

    #[test]
    fn weights_are_uniform_and_sum_to_one() {
        let f = DiscountFactor::new(vec![1.0, 0.5, 0.26, 0.14, 0.0754]).unwrap();
        let d = decompose(&f).unwrap();
        let count = d.components.len() as f64;
        for c in &d.components {
            assert_eq!(c.eta, 1.0 / count);
        }
        let total: f64 = d.components.iter().map(|c| c.eta).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }
}
