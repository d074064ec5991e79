//! Finite-horizon discount factors and the impatience checks built on them.
//!
//! A discount factor is a strictly positive, weakly decreasing sequence
//! `f(0..=T)` that weights payoffs by date: a stream `x` is worth
//! `sum_t f(t) * x(t)`. Decreasing impatience — the ratio `f(t+1)/f(t)`
//! weakly increasing in `t` — is equivalent to log-convexity of `f`, and
//! both are equivalent to a convexity pattern over compound-interest
//! investments that can be falsified with a single observation. This
//! module implements the sequence type, dated-reward comparisons, and
//! those checks.

use thiserror::Error;

/// Values below this are rejected outright: ratio chains on subnormals
/// lose all precision.
pub const MIN_POSITIVE: f64 = 1e-300;

/// Default relative tolerance for the log-convexity / log-concavity checks.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Relative slack factor for the compound-interest convexity inequality.
const CONVEXITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DiscountError {
    #[error("value at t={index} is {value}, must be strictly positive (>= {MIN_POSITIVE})")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("sequence increases at t={index}: values must be weakly decreasing")]
    NotDecreasing { index: usize },
    #[error("sequence has {len} values, need at least 3 (horizon T >= 2)")]
    TooShort { len: usize },
    #[error("parameter {name}={value} outside its admissible range")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("stream horizon {stream} does not match factor horizon {factor}")]
    HorizonMismatch { factor: usize, stream: usize },
    #[error("date {date} is beyond the horizon {horizon}")]
    DateBeyondHorizon { date: usize, horizon: usize },
    #[error("premise requires x > y > 0 and s < t")]
    BadPremiseOrder,
    #[error("period t={period} outside 1..={max}")]
    PeriodOutOfRange { period: usize, max: usize },
}

/// A positive, weakly decreasing discount factor truncated at horizon `T`.
///
/// `values[t]` is the weight on date `t`, `t = 0..=T`. No normalization is
/// applied: `values[0]` need not be 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountFactor {
    values: Vec<f64>,
}

impl DiscountFactor {
    /// Validates and wraps a raw sequence. The values are kept unchanged.
    pub fn new(values: Vec<f64>) -> Result<Self, DiscountError> {
        if values.len() < 3 {
            return Err(DiscountError::TooShort { len: values.len() });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < MIN_POSITIVE {
                return Err(DiscountError::NonPositiveValue { index, value });
            }
        }
        for index in 0..values.len() - 1 {
            if values[index + 1] > values[index] {
                return Err(DiscountError::NotDecreasing { index: index + 1 });
            }
        }
        Ok(Self { values })
    }

    /// Builds the generalized beta-delta factor
    /// `f(t) = beta^min(switch, t) * delta^t`.
    ///
    /// `beta = 1` collapses to exponential discounting; `switch = 1` is the
    /// standard quasi-hyperbolic form.
    pub fn generalized_beta_delta(
        beta: f64,
        delta: f64,
        switch: usize,
        horizon: usize,
    ) -> Result<Self, DiscountError> {
        if !(beta > 0.0 && beta <= 1.0) || !beta.is_finite() {
            return Err(DiscountError::ParamOutOfRange {
                name: "beta",
                value: beta,
            });
        }
        if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
            return Err(DiscountError::ParamOutOfRange {
                name: "delta",
                value: delta,
            });
        }
        if switch < 1 || switch > horizon {
            return Err(DiscountError::ParamOutOfRange {
                name: "switch",
                value: switch as f64,
            });
        }
        if horizon < 2 {
            return Err(DiscountError::TooShort { len: horizon + 1 });
        }
        let values = (0..=horizon)
            .map(|t| beta.powi(switch.min(t) as i32) * delta.powi(t as i32))
            .collect();
        Self::new(values)
    }

    /// Horizon `T`; the sequence has `T + 1` entries.
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, t: usize) -> f64 {
        self.values[t]
    }

    /// One-period impatience ratios `r(t) = f(t+1)/f(t)`, length `T`.
    ///
    /// Each ratio lies in `(0, 1]`; the smaller the ratio, the more the
    /// agent discounts the later of the two dates.
    pub fn impatience_ratios(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Decreasing impatience: `f(t+1)^2 <= f(t) * f(t+2)` at every `t`,
    /// with relative slack `rel_tol`.
    ///
    /// The cross-product form is used instead of comparing ratios directly;
    /// it is scale-free and avoids dividing small positives.
    pub fn is_decreasing_impatience(&self, rel_tol: f64) -> bool {
        self.values.windows(3).all(|w| {
            let lhs = w[1] * w[1];
            let rhs = w[0] * w[2];
            lhs <= rhs * (1.0 + rel_tol)
        })
    }

    /// Increasing impatience: the log-concavity mirror,
    /// `f(t+1)^2 >= f(t) * f(t+2)` at every `t` with relative slack.
    pub fn is_increasing_impatience(&self, rel_tol: f64) -> bool {
        self.values.windows(3).all(|w| {
            let lhs = w[1] * w[1];
            let rhs = w[0] * w[2];
            lhs >= rhs / (1.0 + rel_tol)
        })
    }

    /// Stationarity: all consecutive impatience ratios agree within
    /// `rel_tol` relative difference. Stationary factors are exactly the
    /// exponentials `f(t) = A * delta^t`.
    pub fn is_stationary(&self, rel_tol: f64) -> bool {
        let ratios = self.impatience_ratios();
        ratios
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() <= rel_tol * w[0].abs())
    }

    /// Present value of a stream: `sum_t f(t) * x(t)`.
    pub fn evaluate_stream(&self, stream: &Stream) -> Result<f64, DiscountError> {
        if stream.values().len() != self.values.len() {
            return Err(DiscountError::HorizonMismatch {
                factor: self.horizon(),
                stream: stream.values().len().saturating_sub(1),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(stream.values())
            .map(|(f, x)| f * x)
            .sum())
    }

    /// Ranks two dated rewards by discounted value. Exact ties are
    /// reported as indifference.
    pub fn compare_dated_rewards(
        &self,
        a: &DatedReward,
        b: &DatedReward,
    ) -> Result<Preference, DiscountError> {
        for reward in [a, b] {
            if reward.date > self.horizon() {
                return Err(DiscountError::DateBeyondHorizon {
                    date: reward.date,
                    horizon: self.horizon(),
                });
            }
        }
        let va = a.amount * self.values[a.date];
        let vb = b.amount * self.values[b.date];
        Ok(if va > vb {
            Preference::APreferred
        } else if va < vb {
            Preference::BPreferred
        } else {
            Preference::Indifferent
        })
    }

    /// The preference-level form of decreasing impatience: if `x > y`,
    /// `s < t`, and the reward `(x, t)` is weakly preferred to `(y, s)`,
    /// the preference must survive every common delay `r = 1..=max_shift`.
    ///
    /// Returns true vacuously when the premise `(x,t) >= (y,s)` fails.
    pub fn behavioral_di_check(
        &self,
        x: f64,
        y: f64,
        s: usize,
        t: usize,
        max_shift: usize,
    ) -> Result<bool, DiscountError> {
        if !x.is_finite() || !y.is_finite() || x <= y || y <= 0.0 || s >= t {
            return Err(DiscountError::BadPremiseOrder);
        }
        if t + max_shift > self.horizon() {
            return Err(DiscountError::DateBeyondHorizon {
                date: t + max_shift,
                horizon: self.horizon(),
            });
        }
        if x * self.values[t] < y * self.values[s] {
            return Ok(true); // premise fails
        }
        for r in 1..=max_shift {
            if x * self.values[t + r] < y * self.values[s + r] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// One compound-interest convexity question: is investing `k/2` at
    /// maturities `t-1` and `t+1` at rate `r` weakly preferred to
    /// investing all of `k` at maturity `t`?
    ///
    /// The inequality is evaluated with an absolute slack of `1e-12`
    /// times the largest term, and its outcome is independent of `k`
    /// (the principal cancels). `r > -1` is accepted, not just `r > 0`:
    /// the characterization holds for every growth factor `1 + r > 0`.
    pub fn compound_interest_convexity_holds(
        &self,
        k: f64,
        r: f64,
        t: usize,
    ) -> Result<bool, DiscountError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(DiscountError::ParamOutOfRange {
                name: "k",
                value: k,
            });
        }
        if !r.is_finite() || r <= -1.0 {
            return Err(DiscountError::ParamOutOfRange {
                name: "r",
                value: r,
            });
        }
        if t < 1 || t > self.horizon() - 1 {
            return Err(DiscountError::PeriodOutOfRange {
                period: t,
                max: self.horizon() - 1,
            });
        }
        let growth = 1.0 + r;
        let early = 0.5 * k * growth.powi(t as i32 - 1) * self.values[t - 1];
        let late = 0.5 * k * growth.powi(t as i32 + 1) * self.values[t + 1];
        let middle = k * growth.powi(t as i32) * self.values[t];
        let slack = CONVEXITY_SLACK * early.max(late).max(middle);
        Ok(early + late >= middle - slack)
    }

    /// Scans for a falsification of compound-interest convexity.
    ///
    /// Log-convexity windows `f(t+1)^2 <= f(t) * f(t+2)` are checked at
    /// exact arithmetic tolerance for `t >= 1`; the first strict failure
    /// yields a witness whose rate is the worst-case growth factor
    /// `f(t+1)/f(t+2)` from that window. A failure in the `t = 0` window
    /// is reported through [`ConvexityScan::boundary_violation`] instead
    /// of a witness, since the axiom's maturity quantifier starts at 1.
    pub fn find_convexity_violation(&self) -> ConvexityScan {
        let v = &self.values;
        let boundary_violation = v[1] * v[1] > v[0] * v[2];
        for t in 1..=self.horizon().saturating_sub(2) {
            if v[t + 1] * v[t + 1] > v[t] * v[t + 2] {
                let rate = v[t + 1] / v[t + 2] - 1.0;
                // The worst-case rate falsifies the question at maturity
                // t + 1 by construction; it usually falsifies the one at
                // maturity t as well, and the smaller maturity is the
                // sharper lab question when it does.
                let period = if !self
                    .compound_interest_convexity_holds(1.0, rate, t)
                    .expect("period in range")
                {
                    t
                } else {
                    t + 1
                };
                return ConvexityScan {
                    witness: Some(self.witness_at(period, rate)),
                    boundary_violation,
                };
            }
        }
        ConvexityScan {
            witness: None,
            boundary_violation,
        }
    }

    fn witness_at(&self, period: usize, rate: f64) -> ConvexityWitness {
        let growth = 1.0 + rate;
        let lhs = 0.5 * growth.powi(period as i32 - 1) * self.values[period - 1]
            + 0.5 * growth.powi(period as i32 + 1) * self.values[period + 1];
        let rhs = growth.powi(period as i32) * self.values[period];
        ConvexityWitness {
            period,
            rate,
            lhs,
            rhs,
        }
    }
}

/// A nonnegative payoff stream over the same date grid as a factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    values: Vec<f64>,
}

impl Stream {
    pub fn new(values: Vec<f64>) -> Result<Self, DiscountError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(DiscountError::NonPositiveValue { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A single payoff `amount` delivered at `date`; zero everywhere else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatedReward {
    pub amount: f64,
    pub date: usize,
}

impl DatedReward {
    pub fn new(amount: f64, date: usize) -> Result<Self, DiscountError> {
        if !amount.is_finite() || amount < 0.0 {
            return Err(DiscountError::ParamOutOfRange {
                name: "amount",
                value: amount,
            });
        }
        Ok(Self { amount, date })
    }
}

/// Outcome of a dated-reward comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    APreferred,
    BPreferred,
    Indifferent,
}

/// A concrete falsification of compound-interest convexity: at maturity
/// `period` and rate `rate`, the split investment is worth `lhs` and the
/// lump investment `rhs`, with `lhs < rhs`.
///
/// The witness doubles as a ready-to-run lab question: offer the two
/// bundles and a single strict choice of the lump sum falsifies
/// decreasing impatience.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityWitness {
    pub period: usize,
    pub rate: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of scanning a factor for convexity violations.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityScan {
    /// First falsifying question with maturity `>= 1`, if any.
    pub witness: Option<ConvexityWitness>,
    /// True when log-convexity already fails in the window starting at
    /// `t = 0`. No axiom question with maturity `>= 1` corresponds to
    /// that window directly, so it is flagged rather than witnessed.
    pub boundary_violation: bool,
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

    /// f(t) = 0.9^(t^2): ratios 0.9^(2t+1) strictly decrease, so this is
    /// the canonical increasing-impatience fixture.
    fn squared_exponent(horizon: usize) -> DiscountFactor {
        let values = (0..=horizon).map(|t| 0.9f64.powi((t * t) as i32)).collect();
        DiscountFactor::new(values).unwrap()
    }

    #[test]
    fn construction_accepts_valid_sequences() {
        let f = DiscountFactor::new(vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(f.horizon(), 2);
        assert_eq!(f.values(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn construction_rejects_increasing_sequences() {
        assert_eq!(
            DiscountFactor::new(vec![1.0, 0.5, 0.6]),
            Err(DiscountError::NotDecreasing { index: 2 })
        );
    }

    #[test]
    fn construction_rejects_short_and_nonpositive() {
        assert_eq!(
            DiscountFactor::new(vec![1.0, 0.5]),
            Err(DiscountError::TooShort { len: 2 })
        );
        assert!(matches!(
            DiscountFactor::new(vec![1.0, 0.5, 0.0]),
            Err(DiscountError::NonPositiveValue { index: 2, .. })
        ));
        assert!(matches!(
            DiscountFactor::new(vec![1.0, 1e-305, 1e-306]),
            Err(DiscountError::NonPositiveValue { index: 1, .. })
        ));
    }

    #[test]
    fn quasi_hyperbolic_values_match_closed_form() {
        let f = quasi_hyperbolic(0.6, 0.9, 3);
        let expected = [1.0, 0.54, 0.486, 0.4374];
        for (got, want) in f.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn beta_one_collapses_to_exponential() {
        let f = DiscountFactor::generalized_beta_delta(1.0, 0.5, 1, 3).unwrap();
        assert_eq!(f.values(), &[1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn late_switch_beta_delta() {
        let f = DiscountFactor::generalized_beta_delta(0.8, 0.9, 2, 4).unwrap();
        let expected = [1.0, 0.72, 0.5184, 0.46656, 0.419904];
        for (got, want) in f.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn beta_delta_rejects_bad_params() {
        assert!(DiscountFactor::generalized_beta_delta(0.0, 0.5, 1, 3).is_err());
        assert!(DiscountFactor::generalized_beta_delta(1.1, 0.5, 1, 3).is_err());
        assert!(DiscountFactor::generalized_beta_delta(0.5, 0.5, 0, 3).is_err());
        assert!(DiscountFactor::generalized_beta_delta(0.5, 0.5, 4, 3).is_err());
    }

    #[test]
    fn ratios_of_known_factors() {
        let exp = exponential(0.5, 3);
        assert_eq!(exp.impatience_ratios(), vec![0.5, 0.5, 0.5]);

        let qh = quasi_hyperbolic(0.6, 0.9, 3);
        let ratios = qh.impatience_ratios();
        let expected = [0.54, 0.9, 0.9];
        for (got, want) in ratios.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }

        // Direct-evaluation oracle: ratio at t is 0.9^(2t+1).
        let sq = squared_exponent(3);
        let ratios = sq.impatience_ratios();
        for (t, got) in ratios.iter().enumerate() {
            let want = 0.9f64.powi(2 * t as i32 + 1);
            assert!((got - want).abs() < 1e-12, "t={t}: {got} vs {want}");
        }
        assert!((ratios[0] - 0.9).abs() < 1e-12);
        assert!((ratios[1] - 0.729).abs() < 1e-12);
        assert!((ratios[2] - 0.59049).abs() < 1e-12);
    }

    #[test]
    fn impatience_classification() {
        // Dyadic exponential: the cross products tie exactly.
        assert!(exponential(0.5, 4).is_decreasing_impatience(0.0));
        assert!(exponential(0.5, 4).is_increasing_impatience(0.0));
        // Non-dyadic ties land within a few ulps of equality.
        assert!(quasi_hyperbolic(0.6, 0.9, 4).is_decreasing_impatience(DEFAULT_REL_TOL));
        assert!(!quasi_hyperbolic(0.6, 0.9, 4).is_increasing_impatience(0.0));
        assert!(!squared_exponent(4).is_decreasing_impatience(0.0));
        assert!(squared_exponent(4).is_increasing_impatience(0.0));
    }

    #[test]
    fn stationarity_checks() {
        let scaled = DiscountFactor::new(vec![2.0, 1.0, 0.5, 0.25]).unwrap();
        assert!(scaled.is_stationary(1e-12));
        assert!(!quasi_hyperbolic(0.6, 0.9, 3).is_stationary(1e-3));
        let near = DiscountFactor::new(vec![1.0, 0.5, 0.2500001]).unwrap();
        assert!(near.is_stationary(1e-3));
        assert!(!near.is_stationary(1e-9));
    }

    #[test]
    fn stream_evaluation() {
        let f = DiscountFactor::new(vec![1.0, 0.5, 0.25]).unwrap();
        let ones = Stream::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!((f.evaluate_stream(&ones).unwrap() - 1.75).abs() < 1e-15);

        let zero = Stream::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.evaluate_stream(&zero).unwrap(), 0.0);

        let g = DiscountFactor::new(vec![1.0, 0.54, 0.486]).unwrap();
        let spike = Stream::new(vec![0.0, 100.0, 0.0]).unwrap();
        assert!((g.evaluate_stream(&spike).unwrap() - 54.0).abs() < 1e-12);

        let short = Stream::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            f.evaluate_stream(&short),
            Err(DiscountError::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn dated_reward_comparison() {
        let f = DiscountFactor::generalized_beta_delta(0.9, 0.95, 1, 3).unwrap();
        let a = DatedReward::new(110.0, 1).unwrap();
        let b = DatedReward::new(100.0, 0).unwrap();
        // 110 * 0.855 = 94.05 < 100: the earlier reward wins.
        assert_eq!(
            f.compare_dated_rewards(&a, &b).unwrap(),
            Preference::BPreferred
        );

        let a2 = DatedReward::new(110.0, 2).unwrap();
        let b2 = DatedReward::new(100.0, 1).unwrap();
        // 89.3475 > 85.5: one period later the later reward wins.
        assert_eq!(
            f.compare_dated_rewards(&a2, &b2).unwrap(),
            Preference::APreferred
        );

        let same = DatedReward::new(5.0, 2).unwrap();
        assert_eq!(
            f.compare_dated_rewards(&same, &same).unwrap(),
            Preference::Indifferent
        );

        let beyond = DatedReward::new(1.0, 9).unwrap();
        assert!(matches!(
            f.compare_dated_rewards(&beyond, &b),
            Err(DiscountError::DateBeyondHorizon { date: 9, .. })
        ));
    }

    #[test]
    fn behavioral_check_on_known_factors() {
        // Stationarity implies decreasing impatience.
        let exp = exponential(0.7, 6);
        assert!(exp.behavioral_di_check(1.0, 0.6, 0, 1, 3).unwrap());

        // (1,1) >= (0.85,0) holds (0.9 > 0.85), but shifting once flips it:
        // f(2) = 0.6561 < 0.85 * f(1) = 0.765.
        let sq = squared_exponent(3);
        assert!(!sq.behavioral_di_check(1.0, 0.85, 0, 1, 2).unwrap());

        // Premise fails (0.54 < 0.55), so the implication is vacuous.
        let qh = quasi_hyperbolic(0.6, 0.9, 3);
        assert!(qh.behavioral_di_check(1.0, 0.55, 0, 1, 2).unwrap());

        assert_eq!(
            qh.behavioral_di_check(0.5, 0.6, 0, 1, 1),
            Err(DiscountError::BadPremiseOrder)
        );
        assert_eq!(
            qh.behavioral_di_check(1.0, 0.5, 1, 1, 1),
            Err(DiscountError::BadPremiseOrder)
        );
    }

    #[test]
    fn convexity_axiom_on_known_factors() {
        let exp = exponential(0.5, 3);
        assert!(exp.compound_interest_convexity_holds(1.0, 0.1, 1).unwrap());

        // Worst-case rate from the t=1 window of 0.9^(t^2).
        let sq = squared_exponent(3);
        let r = 0.9f64.powi(-5) - 1.0;
        assert!(!sq.compound_interest_convexity_holds(1.0, r, 1).unwrap());

        let qh = quasi_hyperbolic(0.6, 0.9, 3);
        assert!(qh.compound_interest_convexity_holds(7.0, 0.25, 1).unwrap());
        // k cancels.
        assert_eq!(
            qh.compound_interest_convexity_holds(7.0, 0.25, 1).unwrap(),
            qh.compound_interest_convexity_holds(1.0, 0.25, 1).unwrap()
        );

        assert!(matches!(
            qh.compound_interest_convexity_holds(1.0, 0.25, 0),
            Err(DiscountError::PeriodOutOfRange { .. })
        ));
        assert!(matches!(
            qh.compound_interest_convexity_holds(1.0, 0.25, 3),
            Err(DiscountError::PeriodOutOfRange { .. })
        ));
        assert!(matches!(
            qh.compound_interest_convexity_holds(0.0, 0.25, 1),
            Err(DiscountError::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            qh.compound_interest_convexity_holds(1.0, -1.0, 1),
            Err(DiscountError::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn violation_scan_exponential_is_clean() {
        let scan = exponential(0.5, 5).find_convexity_violation();
        assert_eq!(scan.witness, None);
        assert!(!scan.boundary_violation);
    }

    #[test]
    fn violation_scan_squared_exponent() {
        let sq = squared_exponent(3);
        let scan = sq.find_convexity_violation();
        assert!(scan.boundary_violation);
        let witness = scan.witness.expect("must falsify");
        assert_eq!(witness.period, 1);
        let want_rate = 0.9f64.powi(-5) - 1.0;
        assert!((witness.rate - want_rate).abs() < 1e-12);
        assert!(witness.lhs < witness.rhs);
        assert!(!sq
            .compound_interest_convexity_holds(1.0, witness.rate, witness.period)
            .unwrap());
    }

    #[test]
    fn violation_scan_boundary_only() {
        // Log-convexity fails only in the t=0 window: 0.8^2 > 1 * 0.63,
        // while 0.63^2 = 0.3969 <= 0.8 * 0.5 = 0.4.
        let f = DiscountFactor::new(vec![1.0, 0.8, 0.63, 0.5]).unwrap();
        let scan = f.find_convexity_violation();
        assert_eq!(scan.witness, None);
        assert!(scan.boundary_violation);
    }

    #[test]
    fn violation_witness_when_first_window_holds_marginally() {
        // Windows: t=0 fine, t=1 violated (0.16 > 0.15), but the t=1
        // maturity question cannot be falsified (its own window is slack),
        // so the witness lands on maturity 2.
        let f = DiscountFactor::new(vec![1.0, 0.5, 0.4, 0.3]).unwrap();
        let scan = f.find_convexity_violation();
        assert!(!scan.boundary_violation);
        let witness = scan.witness.expect("violated at t=1");
        assert_eq!(witness.period, 2);
        assert!(!f
            .compound_interest_convexity_holds(1.0, witness.rate, witness.period)
            .unwrap());
    }

    #[test]
    fn stream_rejects_negative_values() {
        assert!(Stream::new(vec![1.0, -0.1]).is_err());
        assert!(DatedReward::new(-1.0, 0).is_err());
    }
}
