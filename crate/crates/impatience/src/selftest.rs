//! Randomized property suites behind `impatience selftest`.
//!
//! Each suite draws its instances from [`SplitMix64`](crate::rng::SplitMix64)
//! streams derived from one seed, so runs are replayable and can be
//! parallelized across instances without changing results. Tolerances are
//! fixed here, not configurable: they are the acceptance thresholds of the
//! crate.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::aggregate::{
    arithmetic_mean, check_iia, check_pareto_dated, check_time_consistency, constant_aggregator,
    geometric_mean, normalize, tail_dependent_aggregator, NormalizedFactor, Profile, Weights,
};
use crate::decompose::{decompose, min_basis_weights};
use crate::discount::DiscountFactor;
use crate::market::{
    envelope_prices, solve_equilibrium, synthesize_economy, uniqueness_probe, verify_equilibrium,
    Economy, ExponentialAgent,
};
use crate::rng::{
    random_concave_h, random_di_factor, random_economy, random_non_di_factor, random_profile,
    SplitMix64,
};

/// Outcome of one suite: the number of cases run, the worst residual
/// observed, and the first few failure descriptions if any.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub metric: &'static str,
    pub worst: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            out,
            "suite {:<22} {:>5} cases  {} {:>10.3e}  {}",
            self.name,
            self.cases,
            self.metric,
            self.worst,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for failure in self.failures.iter().take(3) {
            write!(out, "\n    {failure}")?;
        }
        Ok(())
    }
}

/// Suite sizes; the defaults match the crate's acceptance thresholds.
#[derive(Debug, Clone, Copy)]
pub struct Sizes {
    pub factors: usize,
    pub economies: usize,
    pub probes: usize,
    pub profiles: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Self {
            factors: 500,
            economies: 200,
            probes: 50,
            profiles: 500,
        }
    }
}

struct CaseOutcome {
    metric: f64,
    failure: Option<String>,
}

impl CaseOutcome {
    fn ok(metric: f64) -> Self {
        Self {
            metric,
            failure: None,
        }
    }

    fn fail(metric: f64, message: String) -> Self {
        Self {
            metric,
            failure: Some(message),
        }
    }
}

/// Per-case generator stream: one independent rng per (seed, suite, case).
fn case_rng(seed: u64, suite: u64, case: usize) -> SplitMix64 {
    SplitMix64::new(
        seed ^ suite.wrapping_mul(0xA24BAED4963EE407)
            ^ (case as u64).wrapping_mul(0x9FB21C651E98DF25),
    )
}

/// Runs `cases` independent case closures on up to `jobs` threads,
/// preserving case order in the collected outcomes.
fn run_cases<F>(cases: usize, jobs: usize, body: F) -> Vec<CaseOutcome>
where
    F: Fn(usize) -> CaseOutcome + Sync,
{
    if jobs <= 1 || cases <= 1 {
        return (0..cases).map(body).collect();
    }
    let next = AtomicUsize::new(0);
    let mut outcomes: Vec<Option<CaseOutcome>> = (0..cases).map(|_| None).collect();
    let slots: Vec<std::sync::Mutex<&mut Option<CaseOutcome>>> =
        outcomes.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(cases) {
            scope.spawn(|| loop {
                let case = next.fetch_add(1, Ordering::Relaxed);
                if case >= cases {
                    break;
                }
                let outcome = body(case);
                **slots[case].lock().unwrap() = Some(outcome);
            });
        }
    });
    outcomes
        .into_iter()
        .map(|o| o.expect("every case ran"))
        .collect()
}

fn summarize(name: &'static str, metric: &'static str, outcomes: Vec<CaseOutcome>) -> SuiteReport {
    let worst = outcomes.iter().map(|o| o.metric).fold(0.0, f64::max);
    let failures = outcomes.into_iter().filter_map(|o| o.failure).collect();
    SuiteReport {
        name,
        cases: 0,
        metric,
        worst,
        failures,
    }
}

/// Compound-interest convexity holds on a k x r x t grid for factors
/// with decreasing impatience.
pub fn suite_convexity_forward(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 1, case);
        let f = random_di_factor(&mut rng, 32, 0.98);
        for t in 1..f.horizon() {
            for k in [0.5, 1.0, 10.0] {
                for step in 1..=20 {
                    let r = 0.5 * step as f64;
                    match f.compound_interest_convexity_holds(k, r, t) {
                        Ok(true) => {}
                        Ok(false) => {
                            return CaseOutcome::fail(
                                1.0,
                                format!("case {case}: axiom fails at k={k} r={r} t={t}"),
                            )
                        }
                        Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
                    }
                }
            }
        }
        CaseOutcome::ok(0.0)
    });
    let mut report = summarize("convexity-forward", "violations", outcomes);
    report.cases = cases;
    report
}

/// Factors that fail decreasing impatience yield a witness that
/// numerically falsifies the axiom inequality.
pub fn suite_convexity_witness(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 2, case);
        let f = random_non_di_factor(&mut rng, 32, 0.05);
        let scan = f.find_convexity_violation();
        let Some(witness) = scan.witness else {
            return CaseOutcome::fail(1.0, format!("case {case}: no witness found"));
        };
        if witness.lhs >= witness.rhs {
            return CaseOutcome::fail(1.0, format!("case {case}: witness does not violate"));
        }
        match f.compound_interest_convexity_holds(1.0, witness.rate, witness.period) {
            Ok(false) => CaseOutcome::ok((witness.rhs - witness.lhs) / witness.rhs),
            _ => CaseOutcome::fail(
                1.0,
                format!(
                    "case {case}: witness (t={}, r={}) not falsifying",
                    witness.period, witness.rate
                ),
            ),
        }
    });
    let mut report = summarize("convexity-witness", "worst margin", outcomes);
    report.cases = cases;
    report
}

/// The min-basis weights reconstruct concave sequences exactly.
pub fn suite_basis_lemma(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 3, case);
        let h = random_concave_h(&mut rng, 32);
        let basis = match min_basis_weights(&h) {
            Ok(b) => b,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        };
        if basis.alpha().iter().any(|a| *a < -1e-12) {
            return CaseOutcome::fail(1.0, format!("case {case}: negative basis weight"));
        }
        let mut worst: f64 = 0.0;
        for (t, want) in h.iter().enumerate() {
            worst = worst.max((basis.evaluate(t) - want).abs());
        }
        if worst > 1e-12 {
            CaseOutcome::fail(
                worst,
                format!("case {case}: reconstruction error {worst:e}"),
            )
        } else {
            CaseOutcome::ok(worst)
        }
    });
    let mut report = summarize("basis-lemma", "abs error", outcomes);
    report.cases = cases;
    report
}

/// Decompose-then-reconstruct round trips within 1e-9 relative, with
/// every component a valid decreasing-impatience beta-delta factor.
pub fn suite_decompose_roundtrip(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 4, case);
        let f = random_di_factor(&mut rng, 32, 0.95);
        let d = match decompose(&f) {
            Ok(d) => d,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        };
        let error = d.max_relative_error(&f);
        if error > 1e-9 {
            return CaseOutcome::fail(error, format!("case {case}: round trip error {error:e}"));
        }
        for c in &d.components {
            let valid = c.beta > 0.0
                && c.beta <= 1.0
                && (c.delta - d.gamma).abs() < 1e-15
                && c.delta < 1.0
                && c.to_factor(f.horizon()).is_decreasing_impatience(1e-12);
            if !valid {
                return CaseOutcome::fail(
                    error,
                    format!(
                        "case {case}: bad component beta={} delta={}",
                        c.beta, c.delta
                    ),
                );
            }
        }
        CaseOutcome::ok(error)
    });
    let mut report = summarize("decompose-roundtrip", "rel error", outcomes);
    report.cases = cases;
    report
}

/// Synthesized economies verify their designed equilibrium with prices
/// exactly proportional to the input factor.
pub fn suite_synthesize_verify(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 5, case);
        let f = random_di_factor(&mut rng, 28, 0.95);
        let (economy, candidate) = match synthesize_economy(&f) {
            Ok(pair) => pair,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        };
        let head = f.value(0);
        let proportional = candidate
            .prices
            .iter()
            .zip(f.values())
            .all(|(p, v)| (p * head / v - 1.0).abs() <= 1e-12);
        if !proportional {
            return CaseOutcome::fail(1.0, format!("case {case}: prices not proportional"));
        }
        match verify_equilibrium(&economy, &candidate.prices, &candidate.allocation, 1e-10) {
            Ok(report) if report.ok => CaseOutcome::ok(report.max_budget_residual),
            Ok(report) => CaseOutcome::fail(
                report.max_budget_residual,
                format!(
                    "case {case}: verification failed: {:?}",
                    report.violations.first()
                ),
            ),
            Err(e) => CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        }
    });
    let mut report = summarize("synthesize-verify", "budget res", outcomes);
    report.cases = cases;
    report
}

/// Solved equilibria: convergence at 1e-8, decreasing-impatience prices,
/// Walras' law, and a passing verification.
pub fn suite_solve_di(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 6, case);
        let economy = random_economy(&mut rng, 8, 24);
        let result = match solve_equilibrium(&economy, 1e-12, 500_000) {
            Ok(r) => r,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        };
        if result.residual > 1e-8 {
            return CaseOutcome::fail(result.residual, format!("case {case}: residual too large"));
        }
        let factor = match DiscountFactor::new(result.prices.clone()) {
            Ok(f) => f,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: prices invalid: {e}")),
        };
        if !factor.is_decreasing_impatience(1e-8) {
            return CaseOutcome::fail(1.0, format!("case {case}: prices not DI"));
        }
        let price_mass: f64 = result.prices.iter().sum();
        let walras = (price_mass - economy.total_wealth()).abs();
        if walras > 1e-8 {
            return CaseOutcome::fail(walras, format!("case {case}: Walras gap {walras:e}"));
        }
        match verify_equilibrium(&economy, &result.prices, &result.allocation, 1e-8) {
            Ok(report) if report.ok => CaseOutcome::ok(result.residual.max(walras)),
            Ok(report) => CaseOutcome::fail(
                1.0,
                format!(
                    "case {case}: verification failed: {:?}",
                    report.violations.first()
                ),
            ),
            Err(e) => CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        }
    });
    let mut report = summarize("solve-di", "residual", outcomes);
    report.cases = cases;
    report
}

/// Join weights of solved equilibria reproduce prices as an envelope of
/// scaled exponentials within 1e-8 relative.
pub fn suite_join_envelope(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 6, case); // same instances as solve-di
        let economy = random_economy(&mut rng, 8, 24);
        let result = match solve_equilibrium(&economy, 1e-12, 500_000) {
            Ok(r) => r,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        };
        let pairs: Vec<(f64, f64)> = result
            .join_weights
            .iter()
            .zip(economy.agents())
            .map(|(&alpha, agent)| (alpha, agent.delta))
            .collect();
        let envelope = match envelope_prices(&pairs, economy.horizon()) {
            Ok(e) => e,
            Err(e) => return CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        };
        let gap = result
            .prices
            .iter()
            .zip(&envelope)
            .map(|(p, e)| (p - e).abs() / p)
            .fold(0.0, f64::max);
        if gap > 1e-8 {
            CaseOutcome::fail(gap, format!("case {case}: envelope gap {gap:e}"))
        } else {
            CaseOutcome::ok(gap)
        }
    });
    let mut report = summarize("join-envelope", "rel gap", outcomes);
    report.cases = cases;
    report
}

/// Price uniqueness, empirically: multistart solves agree to 1e-6.
pub fn suite_uniqueness(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 7, case);
        let economy = random_economy(&mut rng, 8, 24);
        match uniqueness_probe(&economy, 5, 1e-12) {
            Ok(distance) if distance <= 1e-6 => CaseOutcome::ok(distance),
            Ok(distance) => {
                CaseOutcome::fail(distance, format!("case {case}: distance {distance:e}"))
            }
            Err(e) => CaseOutcome::fail(1.0, format!("case {case}: {e}")),
        }
    });
    let mut report = summarize("uniqueness", "max dist", outcomes);
    report.cases = cases;
    report
}

/// Independent brute-force maximization of the Nash welfare
/// `sum_i w_i log u_i` over the allocation polytope by coordinate-wise
/// grid refinement down to `resolution`; returns the implied prices.
pub fn nash_welfare_grid_oracle(
    deltas: [f64; 2],
    wealths: [f64; 2],
    horizon: usize,
    resolution: f64,
) -> Vec<f64> {
    let periods = horizon + 1;
    let welfare = |x: &[f64]| -> f64 {
        let mut u = [0.0f64; 2];
        for (t, &xt) in x.iter().enumerate() {
            u[0] += xt * deltas[0].powi(t as i32);
            u[1] += (1.0 - xt) * deltas[1].powi(t as i32);
        }
        wealths[0] * u[0].max(1e-300).ln() + wealths[1] * u[1].max(1e-300).ln()
    };
    let mut x = vec![0.5; periods];
    let mut step = 0.01;
    while step >= resolution {
        // Coordinate sweeps on the current grid until no move improves.
        loop {
            let mut improved = false;
            for t in 0..periods {
                let mut best = welfare(&x);
                let mut best_v = x[t];
                let mut v: f64 = 0.0;
                while v <= 1.0 + 1e-12 {
                    let old = x[t];
                    x[t] = v.min(1.0);
                    let w = welfare(&x);
                    if w > best + 1e-15 {
                        best = w;
                        best_v = x[t];
                        improved = true;
                    }
                    x[t] = old;
                    v += step;
                }
                x[t] = best_v;
            }
            if !improved {
                break;
            }
        }
        step /= 10.0;
    }
    // Prices from the optimum: each period is worth the best
    // wealth-weighted marginal utility across agents.
    let mut u = [0.0f64; 2];
    for (t, &xt) in x.iter().enumerate() {
        u[0] += xt * deltas[0].powi(t as i32);
        u[1] += (1.0 - xt) * deltas[1].powi(t as i32);
    }
    (0..periods)
        .map(|t| {
            let a = wealths[0] * deltas[0].powi(t as i32) / u[0];
            let b = wealths[1] * deltas[1].powi(t as i32) / u[1];
            a.max(b)
        })
        .collect()
}

/// Solver prices match the brute-force oracle on the two-agent
/// reference instance within 1e-4 relative.
pub fn suite_solver_oracle() -> SuiteReport {
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
        3,
    )
    .expect("valid reference instance");
    let mut failures = Vec::new();
    let mut gap: f64 = 0.0;
    match solve_equilibrium(&economy, 1e-12, 500_000) {
        Ok(result) => {
            let oracle = nash_welfare_grid_oracle([0.5, 0.9], [1.0, 1.0], 3, 1e-4);
            for (p, o) in result.prices.iter().zip(&oracle) {
                gap = gap.max((p - o).abs() / o);
            }
            if gap > 1e-4 {
                failures.push(format!("solver-oracle gap {gap:e}"));
            }
        }
        Err(e) => failures.push(format!("solve failed: {e}")),
    }
    SuiteReport {
        name: "solver-oracle",
        cases: 1,
        metric: "rel gap",
        worst: gap,
        failures,
    }
}

/// The geometric mean passes all three axiom checks on random profiles.
pub fn suite_aggregator_axioms(seed: u64, cases: usize, jobs: usize) -> SuiteReport {
    let outcomes = run_cases(cases, jobs, |case| {
        let mut rng = case_rng(seed, 8, case);
        let members = rng.int_in_range(1, 5);
        let horizon = rng.int_in_range(4, 16);
        let profile = random_profile(&mut rng, members, horizon);
        let weights = random_weights(&mut rng, members);

        let shift = rng.int_in_range(0, horizon - 2);
        match check_time_consistency(&geometric_mean, &profile, &weights, shift, 1e-10) {
            Ok(true) => {}
            _ => return CaseOutcome::fail(1.0, format!("case {case}: time consistency fails")),
        }

        let t = rng.int_in_range(0, horizon);
        let s = rng.int_in_range(0, horizon);
        let x = rng.in_range(0.1, 1.0);
        let y = if rng.next_unit() < 0.5 {
            // Force a unanimous premise.
            let floor = profile
                .members()
                .iter()
                .map(|m| m.value(t) / m.value(s))
                .fold(f64::INFINITY, f64::min);
            x * floor * 0.95
        } else {
            rng.in_range(0.1, 1.0)
        };
        match check_pareto_dated(&geometric_mean, &profile, &weights, t, s, x, y) {
            Ok(true) => {}
            _ => return CaseOutcome::fail(1.0, format!("case {case}: Pareto fails")),
        }

        // Tail-rescaled copy preserves ratios at (t2, s2).
        let t2 = rng.int_in_range(0, horizon.saturating_sub(2));
        let s2 = rng.int_in_range(0, horizon.saturating_sub(2));
        let cut = t2.max(s2) + 1;
        let altered: Vec<NormalizedFactor> = profile
            .members()
            .iter()
            .map(|m| {
                let c = rng.in_range(0.5, 1.0);
                let mut values = m.values().to_vec();
                for v in values.iter_mut().skip(cut) {
                    *v *= c;
                }
                NormalizedFactor::new(values).expect("downscaled tail stays valid")
            })
            .collect();
        let alt_profile = Profile::new(altered).expect("same horizon");
        match check_iia(
            &geometric_mean,
            &profile,
            &alt_profile,
            &weights,
            t2,
            s2,
            1e-10,
        ) {
            Ok(true) => CaseOutcome::ok(0.0),
            _ => CaseOutcome::fail(1.0, format!("case {case}: IIA fails")),
        }
    });
    let mut report = summarize("aggregator-axioms", "violations", outcomes);
    report.cases = cases;
    report
}

fn random_weights(rng: &mut SplitMix64, members: usize) -> Weights {
    let raw: Vec<f64> = (0..members).map(|_| rng.in_range(0.2, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    Weights::new(raw.into_iter().map(|w| w / total).collect()).expect("positive normalized")
}

/// Each counterexample aggregator fails exactly its designated axiom on
/// the fixture profiles, and passes the other two on the same fixtures.
pub fn suite_independence() -> SuiteReport {
    let mut failures = Vec::new();
    let exponential = |delta: f64, horizon: usize| {
        normalize(&DiscountFactor::generalized_beta_delta(1.0, delta, 1, horizon).unwrap())
    };

    // Arithmetic mean: fails time consistency only.
    {
        let p = Profile::new(vec![exponential(0.3, 6), exponential(0.9, 6)]).unwrap();
        let w = Weights::uniform(2);
        if check_time_consistency(&arithmetic_mean, &p, &w, 1, 1e-10).unwrap() {
            failures.push("arithmetic mean should fail time consistency".into());
        }
        if !check_pareto_dated(&arithmetic_mean, &p, &w, 1, 0, 1.0, 0.25).unwrap() {
            failures.push("arithmetic mean should pass Pareto".into());
        }
        if !check_iia(&arithmetic_mean, &p, &p, &w, 1, 2, 1e-10).unwrap() {
            failures.push("arithmetic mean should pass IIA".into());
        }
    }

    // Constant rule: fails Pareto only.
    {
        let constant = constant_aggregator(0.5);
        let p = Profile::new(vec![exponential(0.9, 6), exponential(0.9, 6)]).unwrap();
        let w = Weights::uniform(2);
        if check_pareto_dated(&constant, &p, &w, 1, 0, 1.0, 0.85).unwrap() {
            failures.push("constant rule should fail Pareto".into());
        }
        if !check_time_consistency(&constant, &p, &w, 2, 1e-10).unwrap() {
            failures.push("constant rule should pass time consistency".into());
        }
        if !check_iia(&constant, &p, &p, &w, 1, 3, 1e-10).unwrap() {
            failures.push("constant rule should pass IIA".into());
        }
    }

    // Tail-dependent rule: fails IIA only.
    {
        let tail_rule = tail_dependent_aggregator(
            Weights::new(vec![0.9, 0.1]).unwrap(),
            Weights::new(vec![0.1, 0.9]).unwrap(),
            0.5,
        );
        let p = Profile::new(vec![exponential(0.8, 16), exponential(0.9, 16)]).unwrap();
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
        if check_iia(&tail_rule, &p, &p_alt, &w, 1, 2, 1e-10).unwrap() {
            failures.push("tail-dependent rule should fail IIA".into());
        }
        if !check_time_consistency(&tail_rule, &p, &w, 3, 1e-10).unwrap() {
            failures.push("tail-dependent rule should pass time consistency".into());
        }
        if !check_pareto_dated(&tail_rule, &p, &w, 1, 0, 1.0, 0.7).unwrap() {
            failures.push("tail-dependent rule should pass Pareto".into());
        }
    }

    SuiteReport {
        name: "independence",
        cases: 3,
        metric: "violations",
        worst: failures.len() as f64,
        failures,
    }
}

/// The three-exponential envelope: starts at 1, decreasing, log-convex,
/// and leadership passes from the most to the least impatient agent.
pub fn suite_envelope_figure() -> SuiteReport {
    let pairs = [(1.0, 0.3), (0.65, 0.6), (0.3, 0.8)];
    let mut failures = Vec::new();
    match envelope_prices(&pairs, 10) {
        Ok(prices) => {
            if prices[0] != 1.0 {
                failures.push(format!("p(0) = {} instead of 1", prices[0]));
            }
            if prices.windows(2).any(|w| w[1] > w[0]) {
                failures.push("envelope not weakly decreasing".into());
            }
            match DiscountFactor::new(prices.clone()) {
                Ok(f) => {
                    if !f.is_decreasing_impatience(1e-12) {
                        failures.push("envelope not log-convex".into());
                    }
                }
                Err(e) => failures.push(format!("envelope invalid as a factor: {e}")),
            }
            // Leadership order by direct comparison at each date.
            let leaders: Vec<usize> = (0..=10)
                .map(|t| {
                    let mut best = 0;
                    for (i, &(alpha, delta)) in pairs.iter().enumerate() {
                        if alpha * delta.powi(t) > pairs[best].0 * pairs[best].1.powi(t) {
                            best = i;
                        }
                    }
                    best
                })
                .collect();
            if leaders.windows(2).any(|w| w[1] < w[0]) {
                failures.push("leadership order regresses".into());
            }
            for agent in 0..3 {
                if !leaders.contains(&agent) {
                    failures.push(format!("agent {agent} never leads"));
                }
            }
        }
        Err(e) => failures.push(format!("envelope failed: {e}")),
    }
    SuiteReport {
        name: "envelope-figure",
        cases: 1,
        metric: "violations",
        worst: failures.len() as f64,
        failures,
    }
}

/// Negative controls: fixtures that must be caught as failures. Returns
/// a passing report exactly when every control is correctly flagged.
pub fn suite_negative_controls() -> SuiteReport {
    let mut failures = Vec::new();

    // A deliberately increasing-impatience factor must be falsified.
    let values: Vec<f64> = (0..=4).map(|t: i32| 0.9f64.powi(t * t)).collect();
    let f = DiscountFactor::new(values).unwrap();
    if f.is_decreasing_impatience(1e-10) {
        failures.push("non-DI fixture not detected".into());
    }
    if f.find_convexity_violation().witness.is_none() {
        failures.push("non-DI fixture yields no witness".into());
    }

    // A perturbed equilibrium must fail verification.
    let g = DiscountFactor::generalized_beta_delta(0.6, 0.9, 1, 3).unwrap();
    let (economy, candidate) = synthesize_economy(&g).unwrap();
    let mut prices = candidate.prices.clone();
    prices[1] *= 1.01;
    match verify_equilibrium(&economy, &prices, &candidate.allocation, 1e-10) {
        Ok(report) if !report.ok => {}
        _ => failures.push("perturbed equilibrium not rejected".into()),
    }

    SuiteReport {
        name: "negative-controls",
        cases: 2,
        metric: "violations",
        worst: failures.len() as f64,
        failures,
    }
}

/// Runs every suite at the given sizes.
pub fn run_all(seed: u64, sizes: Sizes, jobs: usize) -> Vec<SuiteReport> {
    vec![
        suite_convexity_forward(seed, sizes.factors, jobs),
        suite_convexity_witness(seed, sizes.factors, jobs),
        suite_basis_lemma(seed, sizes.factors, jobs),
        suite_decompose_roundtrip(seed, sizes.factors, jobs),
        suite_synthesize_verify(seed, sizes.economies, jobs),
        suite_solve_di(seed, sizes.economies, jobs),
        suite_join_envelope(seed, sizes.economies, jobs),
        suite_uniqueness(seed, sizes.probes, jobs),
        suite_solver_oracle(),
        suite_aggregator_axioms(seed, sizes.profiles, jobs),
        suite_independence(),
        suite_envelope_figure(),
    ]
}
