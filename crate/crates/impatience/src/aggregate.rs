//! Pooling discount factors into a social one.
//!
//! Aggregation happens over normalized factors (`f(0) = 1`, non-increasing).
//! The weighted geometric mean `prod_i f_i(t)^eta_i` is the aggregator that
//! survives three requirements at once — Pareto over dated rewards,
//! independence of irrelevant alternatives, and time consistency under
//! shifting — and this module provides both the aggregator and executable
//! checks for each requirement. Checks accept the aggregator as an opaque
//! function so that deviant rules (arithmetic mean, constant, tail-dependent)
//! can be run through the same harness to show the requirements are
//! independent of one another.

use thiserror::Error;

use crate::decompose::MIN_GAP;
use crate::discount::DiscountFactor;

/// Relative dead-band inside which comparisons are treated as ties.
const TIE_BAND: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("profile has {members} members but {weights} weights")]
    SizeMismatch { members: usize, weights: usize },
    #[error("members have mismatched horizons")]
    HorizonMismatch,
    #[error("shift by {shift} leaves horizon {remaining}, need at least 2")]
    HorizonExhausted { shift: usize, remaining: isize },
    #[error("date {date} is beyond the horizon {horizon}")]
    DateBeyondHorizon { date: usize, horizon: usize },
    #[error("weight {value} at index {index} must be strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, must be 1")]
    WeightsDoNotSumToOne { sum: f64 },
    #[error("profile must have at least one member")]
    EmptyProfile,
    #[error("value at t={index} is invalid: {value}")]
    BadValue { index: usize, value: f64 },
}

/// A discount factor normalized to `f(0) = 1`, non-increasing and
/// strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFactor {
    values: Vec<f64>,
}

impl NormalizedFactor {
    /// Validates a sequence already scaled to start at 1 (within 1e-9)
    /// and pins the first value to exactly 1.
    pub fn new(values: Vec<f64>) -> Result<Self, AggregateError> {
        if values.len() < 3 {
            return Err(AggregateError::HorizonExhausted {
                shift: 0,
                remaining: values.len() as isize - 1,
            });
        }
        if (values[0] - 1.0).abs() > 1e-9 {
            return Err(AggregateError::BadValue {
                index: 0,
                value: values[0],
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(AggregateError::BadValue { index, value });
            }
        }
        for index in 0..values.len() - 1 {
            if values[index + 1] > values[index] {
                return Err(AggregateError::BadValue {
                    index: index + 1,
                    value: values[index + 1],
                });
            }
        }
        let head = values[0];
        let mut values = values;
        for v in &mut values {
            *v /= head;
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, t: usize) -> f64 {
        self.values[t]
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }
}

/// Rescales a factor so that `f(0) = 1`; represents the same preference.
pub fn normalize(f: &DiscountFactor) -> NormalizedFactor {
    let head = f.value(0);
    let values = f.values().iter().map(|v| v / head).collect();
    NormalizedFactor::new(values).expect("scaling a valid factor preserves its invariants")
}

/// A same-horizon collection of normalized factors, one per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    members: Vec<NormalizedFactor>,
}

impl Profile {
    pub fn new(members: Vec<NormalizedFactor>) -> Result<Self, AggregateError> {
        let first = members.first().ok_or(AggregateError::EmptyProfile)?;
        let horizon = first.horizon();
        if members.iter().any(|m| m.horizon() != horizon) {
            return Err(AggregateError::HorizonMismatch);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[NormalizedFactor] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.members[0].horizon()
    }

    /// Shifts every member by `t`.
    pub fn shift(&self, t: usize) -> Result<Profile, AggregateError> {
        let members = self
            .members
            .iter()
            .map(|m| t_shift(m, t))
            .collect::<Result<Vec<_>, _>>()?;
        Profile::new(members)
    }
}

/// Strictly positive per-member weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    eta: Vec<f64>,
}

impl Weights {
    pub fn new(eta: Vec<f64>) -> Result<Self, AggregateError> {
        for (index, &value) in eta.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(AggregateError::NonPositiveWeight { index, value });
            }
        }
        let sum: f64 = eta.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(AggregateError::WeightsDoNotSumToOne { sum });
        }
        Ok(Self { eta })
    }

    /// Equal weights `1/m`.
    pub fn uniform(m: usize) -> Self {
        Self {
            eta: vec![1.0 / m as f64; m],
        }
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}

/// Signature shared by the geometric mean and the counterexample rules,
/// so one harness can exercise all of them.
pub type AggregatorFn<'a> =
    dyn Fn(&Profile, &Weights) -> Result<NormalizedFactor, AggregateError> + 'a;

/// The weighted geometric mean `prod_i f_i(t)^eta_i`.
pub fn geometric_mean(p: &Profile, w: &Weights) -> Result<NormalizedFactor, AggregateError> {
    if p.len() != w.len() {
        return Err(AggregateError::SizeMismatch {
            members: p.len(),
            weights: w.len(),
        });
    }
    let values = (0..=p.horizon())
        .map(|t| {
            let log_sum: f64 = p
                .members()
                .iter()
                .zip(w.eta())
                .map(|(m, eta)| eta * m.value(t).ln())
                .sum();
            log_sum.exp()
        })
        .collect();
    NormalizedFactor::new(values)
}

/// The factor as seen `t` periods later: `f^t(s) = f(t+s)/f(t)`.
pub fn t_shift(f: &NormalizedFactor, t: usize) -> Result<NormalizedFactor, AggregateError> {
    let remaining = f.horizon() as isize - t as isize;
    if remaining < 2 {
        return Err(AggregateError::HorizonExhausted {
            shift: t,
            remaining,
        });
    }
    let base = f.value(t);
    let values = (t..=f.horizon()).map(|u| f.value(u) / base).collect();
    NormalizedFactor::new(values)
}

/// Time consistency at shift `t`: aggregating the shifted profile must
/// equal shifting the aggregate, pointwise within `rel_tol`.
pub fn check_time_consistency(
    agg: &AggregatorFn,
    p: &Profile,
    w: &Weights,
    t: usize,
    rel_tol: f64,
) -> Result<bool, AggregateError> {
    let shifted_then_aggregated = agg(&p.shift(t)?, w)?;
    let aggregated_then_shifted = t_shift(&agg(p, w)?, t)?;
    Ok(shifted_then_aggregated
        .values()
        .iter()
        .zip(aggregated_then_shifted.values())
        .all(|(a, b)| (a - b).abs() <= rel_tol * a.abs().max(b.abs())))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Band {
    Below,
    Tie,
    Above,
}

/// Compares `lhs` to `rhs` with a relative tie band.
fn banded(lhs: f64, rhs: f64) -> Band {
    let scale = lhs.abs().max(rhs.abs());
    let diff = lhs - rhs;
    if diff.abs() <= TIE_BAND * scale {
        Band::Tie
    } else if diff > 0.0 {
        Band::Above
    } else {
        Band::Below
    }
}

/// Pareto over dated rewards: if every member ranks `(x, t)` weakly above
/// `(y, s)`, the aggregate must as well, strictly when any member is
/// strict. Vacuously true when the members split.
pub fn check_pareto_dated(
    agg: &AggregatorFn,
    p: &Profile,
    w: &Weights,
    t: usize,
    s: usize,
    x: f64,
    y: f64,
) -> Result<bool, AggregateError> {
    let horizon = p.horizon();
    for date in [t, s] {
        if date > horizon {
            return Err(AggregateError::DateBeyondHorizon { date, horizon });
        }
    }
    let mut any_strict = false;
    for member in p.members() {
        match banded(member.value(t) * x, member.value(s) * y) {
            Band::Below => return Ok(true), // members split: premise fails
            Band::Above => any_strict = true,
            Band::Tie => {}
        }
    }
    let social = agg(p, w)?;
    Ok(match banded(social.value(t) * x, social.value(s) * y) {
        Band::Above => true,
        Band::Tie => !any_strict,
        Band::Below => false,
    })
}

/// Independence of irrelevant alternatives in ratio form: when every
/// member's `f_i(t)/f_i(s)` agrees across the two profiles (within
/// `rel_tol`), the aggregate ratios must agree as well. Vacuously true
/// otherwise.
pub fn check_iia(
    agg: &AggregatorFn,
    p: &Profile,
    p_alt: &Profile,
    w: &Weights,
    t: usize,
    s: usize,
    rel_tol: f64,
) -> Result<bool, AggregateError> {
    if p.len() != p_alt.len() {
        return Err(AggregateError::SizeMismatch {
            members: p.len(),
            weights: p_alt.len(),
        });
    }
    let horizon = p.horizon().min(p_alt.horizon());
    for date in [t, s] {
        if date > horizon {
            return Err(AggregateError::DateBeyondHorizon { date, horizon });
        }
    }
    let ratios_agree = |a: f64, b: f64| (a - b).abs() <= rel_tol * a.abs().max(b.abs());
    let premise =
        p.members().iter().zip(p_alt.members()).all(|(m, m_alt)| {
            ratios_agree(m.value(t) / m.value(s), m_alt.value(t) / m_alt.value(s))
        });
    if !premise {
        return Ok(true);
    }
    let social = agg(p, w)?;
    let social_alt = agg(p_alt, w)?;
    Ok(ratios_agree(
        social.value(t) / social.value(s),
        social_alt.value(t) / social_alt.value(s),
    ))
}

/// Finite-horizon summability certificate: the terminal ratio stays a
/// fixed gap below 1, so the tail is dominated by a convergent geometric
/// series.
pub fn summability_check(f: &NormalizedFactor) -> bool {
    let t = f.horizon();
    f.value(t) / f.value(t - 1) <= 1.0 - MIN_GAP
}

/// Weighted arithmetic mean `sum_i eta_i f_i(t)`. Satisfies Pareto and
/// IIA but not time consistency.
pub fn arithmetic_mean(p: &Profile, w: &Weights) -> Result<NormalizedFactor, AggregateError> {
    if p.len() != w.len() {
        return Err(AggregateError::SizeMismatch {
            members: p.len(),
            weights: w.len(),
        });
    }
    let values = (0..=p.horizon())
        .map(|t| {
            p.members()
                .iter()
                .zip(w.eta())
                .map(|(m, eta)| eta * m.value(t))
                .sum()
        })
        .collect();
    NormalizedFactor::new(values)
}

/// An aggregator that ignores its input and always returns the
/// exponential `(1, delta, delta^2, ...)`. Time consistent and IIA, but
/// not Pareto.
pub fn constant_aggregator(
    delta: f64,
) -> impl Fn(&Profile, &Weights) -> Result<NormalizedFactor, AggregateError> {
    move |p, _w| {
        let values = (0..=p.horizon()).map(|t| delta.powi(t as i32)).collect();
        NormalizedFactor::new(values)
    }
}

/// An aggregator whose weighting depends on the tail of the profile:
/// geometric mean with `low_weights` when the first member's tail falls
/// below `threshold` times the second member's, `high_weights` otherwise.
/// Pareto and time consistent on tail-stable profiles, but not IIA.
pub fn tail_dependent_aggregator(
    low_weights: Weights,
    high_weights: Weights,
    threshold: f64,
) -> impl Fn(&Profile, &Weights) -> Result<NormalizedFactor, AggregateError> {
    move |p, _w| {
        let t = p.horizon();
        let tail = p.members()[0].value(t) / p.members()[1].value(t);
        if tail < threshold {
            geometric_mean(p, &low_weights)
        } else {
            geometric_mean(p, &high_weights)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exponential(delta: f64, horizon: usize) -> NormalizedFactor {
        normalize(&DiscountFactor::generalized_beta_delta(1.0, delta, 1, horizon).unwrap())
    }

    fn quasi_hyperbolic(beta: f64, delta: f64, horizon: usize) -> NormalizedFactor {
        normalize(&DiscountFactor::generalized_beta_delta(beta, delta, 1, horizon).unwrap())
    }

    #[test]
    fn normalize_divides_by_first_value() {
        let f = DiscountFactor::new(vec![2.0, 1.0, 0.5]).unwrap();
        assert_eq!(normalize(&f).values(), &[1.0, 0.5, 0.25]);

        let g = DiscountFactor::new(vec![0.8, 0.432, 0.3888]).unwrap();
        let n = normalize(&g);
        let expected = [1.0, 0.54, 0.486];
        for (got, want) in n.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }

        // Idempotent on already-normalized input.
        let f2 = DiscountFactor::new(vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(normalize(&f2).values(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn geometric_mean_of_identical_members_is_identity() {
        let f = quasi_hyperbolic(0.6, 0.9, 5);
        let p = Profile::new(vec![f.clone(), f.clone(), f.clone()]).unwrap();
        let g = geometric_mean(&p, &Weights::uniform(3)).unwrap();
        for (got, want) in g.values().iter().zip(f.values()) {
            assert!((got - want).abs() <= 1e-14);
        }
    }

    #[test]
    fn geometric_mean_of_exponentials() {
        let p = Profile::new(vec![exponential(0.4, 4), exponential(0.9, 4)]).unwrap();
        let g = geometric_mean(&p, &Weights::uniform(2)).unwrap();
        for (t, got) in g.values().iter().enumerate() {
            let want = 0.6f64.powi(t as i32);
            assert!((got - want).abs() < 1e-14, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn geometric_mean_mixed_profile_value() {
        let p = Profile::new(vec![quasi_hyperbolic(0.6, 0.9, 3), exponential(0.9, 3)]).unwrap();
        let g = geometric_mean(&p, &Weights::uniform(2)).unwrap();
        assert!((g.value(1) - 0.486f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn geometric_mean_size_mismatch() {
        let p = Profile::new(vec![exponential(0.4, 4)]).unwrap();
        assert!(matches!(
            geometric_mean(&p, &Weights::uniform(2)),
            Err(AggregateError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn shift_of_exponential_is_itself() {
        let f = exponential(0.7, 6);
        let shifted = t_shift(&f, 2).unwrap();
        for (t, got) in shifted.values().iter().enumerate() {
            assert!((got - 0.7f64.powi(t as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_of_quasi_hyperbolic_is_exponential() {
        let f = quasi_hyperbolic(0.6, 0.9, 5);
        let shifted = t_shift(&f, 1).unwrap();
        for (t, got) in shifted.values().iter().enumerate() {
            assert!((got - 0.9f64.powi(t as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_zero_is_identity_and_large_shift_errors() {
        let f = quasi_hyperbolic(0.6, 0.9, 5);
        assert_eq!(t_shift(&f, 0).unwrap().values(), f.values());
        assert!(matches!(
            t_shift(&f, 4),
            Err(AggregateError::HorizonExhausted { shift: 4, .. })
        ));
    }

    #[test]
    fn shift_algebra_composes() {
        let f = quasi_hyperbolic(0.5, 0.8, 10);
        let double = t_shift(&t_shift(&f, 2).unwrap(), 3).unwrap();
        let single = t_shift(&f, 5).unwrap();
        for (a, b) in double.values().iter().zip(single.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn geometric_mean_is_time_consistent() {
        let p = Profile::new(vec![
            quasi_hyperbolic(0.6, 0.9, 8),
            exponential(0.5, 8),
            quasi_hyperbolic(0.8, 0.7, 8),
        ])
        .unwrap();
        let w = Weights::new(vec![0.5, 0.3, 0.2]).unwrap();
        for t in 0..=6 {
            assert!(check_time_consistency(&geometric_mean, &p, &w, t, 1e-10).unwrap());
        }
    }

    #[test]
    fn arithmetic_mean_fails_time_consistency() {
        let p = Profile::new(vec![exponential(0.3, 6), exponential(0.9, 6)]).unwrap();
        let w = Weights::uniform(2);
        assert!(!check_time_consistency(&arithmetic_mean, &p, &w, 1, 1e-10).unwrap());
        // ... but satisfies Pareto and IIA on the same profile.
        assert!(check_pareto_dated(&arithmetic_mean, &p, &w, 1, 0, 1.0, 0.25).unwrap());
        assert!(check_iia(&arithmetic_mean, &p, &p, &w, 1, 2, 1e-10).unwrap());
    }

    #[test]
    fn single_member_identity_aggregator_is_consistent() {
        let identity = |p: &Profile, _w: &Weights| Ok::<_, AggregateError>(p.members()[0].clone());
        let p = Profile::new(vec![quasi_hyperbolic(0.6, 0.9, 8)]).unwrap();
        let w = Weights::uniform(1);
        assert!(check_time_consistency(&identity, &p, &w, 2, 1e-12).unwrap());
    }

    #[test]
    fn pareto_holds_for_geometric_mean_and_vacuously_on_splits() {
        let p = Profile::new(vec![exponential(0.4, 5), exponential(0.8, 5)]).unwrap();
        let w = Weights::uniform(2);
        // Unanimous: both prefer (1, 1) to (0.3, 0): 0.4 > 0.3, 0.8 > 0.3.
        assert!(check_pareto_dated(&geometric_mean, &p, &w, 1, 0, 1.0, 0.3).unwrap());
        // Split: 0.4 < 0.5 but 0.8 > 0.5, premise fails.
        assert!(check_pareto_dated(&geometric_mean, &p, &w, 1, 0, 1.0, 0.5).unwrap());
    }

    #[test]
    fn constant_aggregator_fails_only_pareto() {
        let constant = constant_aggregator(0.5);
        let p = Profile::new(vec![exponential(0.9, 5), exponential(0.9, 5)]).unwrap();
        let w = Weights::uniform(2);
        // Members strictly prefer (1, 1) over (0.85, 0); the constant rule
        // ranks them the other way (0.5 < 0.85).
        assert!(!check_pareto_dated(&constant, &p, &w, 1, 0, 1.0, 0.85).unwrap());
        assert!(check_time_consistency(&constant, &p, &w, 2, 1e-12).unwrap());
        assert!(check_iia(&constant, &p, &p, &w, 1, 3, 1e-12).unwrap());
    }

    #[test]
    fn iia_vacuous_and_ratio_preserving_cases() {
        let p = Profile::new(vec![quasi_hyperbolic(0.6, 0.9, 6), exponential(0.5, 6)]).unwrap();
        let w = Weights::uniform(2);
        // Same profile twice: trivially equal ratios everywhere.
        assert!(check_iia(&geometric_mean, &p, &p, &w, 1, 3, 1e-10).unwrap());

        // Rescale the members' tails beyond u = 4: ratios at (1, 3) intact.
        let altered: Vec<NormalizedFactor> = p
            .members()
            .iter()
            .map(|m| {
                let mut values = m.values().to_vec();
                for v in values.iter_mut().skip(5) {
                    *v *= 0.5;
                }
                NormalizedFactor::new(values).unwrap()
            })
            .collect();
        let p_alt = Profile::new(altered).unwrap();
        assert!(check_iia(&geometric_mean, &p, &p_alt, &w, 1, 3, 1e-10).unwrap());
    }

    #[test]
    fn tail_dependent_aggregator_fails_only_iia() {
        let low = Weights::new(vec![0.9, 0.1]).unwrap();
        let high = Weights::new(vec![0.1, 0.9]).unwrap();
        let tail_rule = tail_dependent_aggregator(low, high, 0.5);

        // Tail ratio (8/9)^16 ~ 0.12 < 0.5: low branch.
        let p = Profile::new(vec![exponential(0.8, 16), exponential(0.9, 16)]).unwrap();
        // Flatten both members after u = 2: pairwise ratios at (1, 2) are
        // intact but the tail ratio becomes (8/9)^2 ~ 0.79: high branch.
        let altered: Vec<NormalizedFactor> = p
            .members()
            .iter()
            .map(|m| {
                let mut values = m.values().to_vec();
                for u in 3..values.len() {
                    values[u] = values[2];
                }
                NormalizedFactor::new(values).unwrap()
            })
            .collect();
        let p_alt = Profile::new(altered).unwrap();

        let w = Weights::uniform(2);
        assert!(!check_iia(&tail_rule, &p, &p_alt, &w, 1, 2, 1e-10).unwrap());
        assert!(check_time_consistency(&tail_rule, &p, &w, 3, 1e-10).unwrap());
        assert!(check_pareto_dated(&tail_rule, &p, &w, 1, 0, 1.0, 0.7).unwrap());
    }

    #[test]
    fn summability_certificates() {
        assert!(summability_check(&exponential(0.9, 5)));
        let flat = NormalizedFactor::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(!summability_check(&flat));

        let p = Profile::new(vec![
            quasi_hyperbolic(0.7, 0.8, 6),
            quasi_hyperbolic(0.9, 0.9, 6),
        ])
        .unwrap();
        let g = geometric_mean(&p, &Weights::uniform(2)).unwrap();
        // Terminal ratio sqrt(0.72) ~ 0.849.
        assert!(summability_check(&g));
    }

    #[test]
    fn profile_and_weights_validation() {
        assert!(matches!(
            Profile::new(vec![]),
            Err(AggregateError::EmptyProfile)
        ));
        assert!(matches!(
            Profile::new(vec![exponential(0.5, 3), exponential(0.5, 4)]),
            Err(AggregateError::HorizonMismatch)
        ));
        assert!(matches!(
            Weights::new(vec![0.5, -0.5]),
            Err(AggregateError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Weights::new(vec![0.5, 0.6]),
            Err(AggregateError::WeightsDoNotSumToOne { .. })
        ));
    }

    #[test]
    fn geometric_mean_is_multiplicative() {
        // The Cauchy property: aggregating memberwise products equals the
        // product of the aggregates.
        let p = Profile::new(vec![exponential(0.5, 5), quasi_hyperbolic(0.6, 0.9, 5)]).unwrap();
        let q = Profile::new(vec![quasi_hyperbolic(0.8, 0.7, 5), exponential(0.4, 5)]).unwrap();
        let w = Weights::new(vec![0.3, 0.7]).unwrap();

        let product_profile = Profile::new(
            p.members()
                .iter()
                .zip(q.members())
                .map(|(a, b)| {
                    let values = a
                        .values()
                        .iter()
                        .zip(b.values())
                        .map(|(x, y)| x * y)
                        .collect();
                    NormalizedFactor::new(values).unwrap()
                })
                .collect(),
        )
        .unwrap();

        let lhs = geometric_mean(&product_profile, &w).unwrap();
        let ga = geometric_mean(&p, &w).unwrap();
        let gb = geometric_mean(&q, &w).unwrap();
        for t in 0..=5 {
            let rhs = ga.value(t) * gb.value(t);
            assert!((lhs.value(t) - rhs).abs() <= 1e-12 * rhs);
        }
    }
}
