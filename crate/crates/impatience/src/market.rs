//! Parimutuel markets of exponential discounters.
//!
//! One unit of good is supplied per period; agents with exponential
//! discount factors and fixed incomes buy period consumption at market
//! prices. Equilibrium prices are the upper envelope of scaled
//! exponentials, so they always display decreasing impatience — and
//! conversely, every decreasing-impatience factor arises as the price
//! sequence of such a market. This module constructs that economy for a
//! given factor, solves arbitrary economies by proportional-response
//! dynamics on the underlying Nash-welfare program, verifies candidate
//! equilibria, and extracts the envelope (join) representation of prices.

use thiserror::Error;

use crate::discount::{DiscountFactor, DEFAULT_REL_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum MarketError {
    #[error("agent {index}: delta={delta} must lie strictly inside (0, 1)")]
    BadDelta { index: usize, delta: f64 },
    #[error("agent {index}: wealth={wealth} must be strictly positive")]
    BadWealth { index: usize, wealth: f64 },
    #[error("economy must have at least one agent and horizon >= 2")]
    EmptyEconomy,
    #[error("all envelope weights are zero")]
    AllWeightsZero,
    #[error("weight {value} at index {index} is invalid")]
    BadWeight { index: usize, value: f64 },
    #[error("factor does not display decreasing impatience")]
    NotDecreasingImpatience,
    #[error("factor must be strictly decreasing at every step")]
    NotStrictlyDecreasing,
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("price at t={index} is {value}, must be strictly positive")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("allocation column {period} sums to {sum}, must be 1")]
    SupplyNotCleared { period: usize, sum: f64 },
    #[error("allocation share for agent {agent} at t={period} is negative: {value}")]
    NegativeShare {
        agent: usize,
        period: usize,
        value: f64,
    },
    #[error("no convergence after {iterations} iterations; last price change {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("agent {agent} consumes nothing at the given tolerance")]
    EmptySupport { agent: usize },
}

/// An exponential discounter with a fixed income.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialAgent {
    pub delta: f64,
    pub wealth: f64,
}

/// A finite-horizon parimutuel economy: exponential agents plus one unit
/// of supply in each period `0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    agents: Vec<ExponentialAgent>,
    horizon: usize,
}

impl Economy {
    pub fn new(agents: Vec<ExponentialAgent>, horizon: usize) -> Result<Self, MarketError> {
        if agents.is_empty() || horizon < 2 {
            return Err(MarketError::EmptyEconomy);
        }
        for (index, agent) in agents.iter().enumerate() {
            if !agent.delta.is_finite() || agent.delta <= 0.0 || agent.delta >= 1.0 {
                return Err(MarketError::BadDelta {
                    index,
                    delta: agent.delta,
                });
            }
            if !agent.wealth.is_finite() || agent.wealth <= 0.0 {
                return Err(MarketError::BadWealth {
                    index,
                    wealth: agent.wealth,
                });
            }
        }
        Ok(Self { agents, horizon })
    }

    pub fn agents(&self) -> &[ExponentialAgent] {
        &self.agents
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn total_wealth(&self) -> f64 {
        self.agents.iter().map(|a| a.wealth).sum()
    }
}

/// Period consumption shares, one row per agent; each period's shares
/// sum to the unit supply.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    shares: Vec<Vec<f64>>,
}

impl Allocation {
    pub fn new(shares: Vec<Vec<f64>>) -> Result<Self, MarketError> {
        let periods = shares.first().map(|r| r.len()).unwrap_or(0);
        if periods == 0 || shares.iter().any(|r| r.len() != periods) {
            return Err(MarketError::DimensionMismatch {
                detail: "allocation rows must be nonempty and equal-length".into(),
            });
        }
        for (agent, row) in shares.iter().enumerate() {
            for (period, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(MarketError::NegativeShare {
                        agent,
                        period,
                        value,
                    });
                }
            }
        }
        for period in 0..periods {
            let sum: f64 = shares.iter().map(|r| r[period]).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(MarketError::SupplyNotCleared { period, sum });
            }
        }
        Ok(Self { shares })
    }

    pub fn shares(&self) -> &[Vec<f64>] {
        &self.shares
    }

    pub fn share(&self, agent: usize, period: usize) -> f64 {
        self.shares[agent][period]
    }

    pub fn agents(&self) -> usize {
        self.shares.len()
    }

    pub fn periods(&self) -> usize {
        self.shares[0].len()
    }
}

/// Prices, allocation and diagnostics of one solved (or constructed)
/// equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    /// Strictly positive price per period. With exponential agents these
    /// are weakly decreasing.
    pub prices: Vec<f64>,
    pub allocation: Allocation,
    /// Envelope weights `alpha_i = w_i / u_i(x_i)`: prices dominate
    /// `alpha_i * delta_i^t` everywhere, with equality on the support.
    pub join_weights: Vec<f64>,
    /// Periods on which each agent's share exceeds the solve tolerance.
    pub supports: Vec<Vec<usize>>,
    /// Proportional-response rounds taken (0 for constructed equilibria).
    pub iterations: usize,
    /// Final sup-norm price change of the dynamics (0 when constructed).
    pub residual: f64,
}

/// A line `t -> intercept - slope * t` supporting `log f` from below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportingLine {
    pub intercept: f64,
    pub slope: f64,
}

impl SupportingLine {
    pub fn value(&self, t: usize) -> f64 {
        self.intercept - self.slope * t as f64
    }
}

/// Upper envelope of scaled exponentials: `p(t) = max_i alpha_i * delta_i^t`.
pub fn envelope_prices(weighted: &[(f64, f64)], horizon: usize) -> Result<Vec<f64>, MarketError> {
    for (index, &(alpha, delta)) in weighted.iter().enumerate() {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(MarketError::BadWeight {
                index,
                value: alpha,
            });
        }
        if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
            return Err(MarketError::BadDelta { index, delta });
        }
    }
    if !weighted.iter().any(|&(alpha, _)| alpha > 0.0) {
        return Err(MarketError::AllWeightsZero);
    }
    Ok((0..=horizon)
        .map(|t| {
            weighted
                .iter()
                .map(|&(alpha, delta)| alpha * delta.powi(t as i32))
                .fold(0.0, f64::max)
        })
        .collect())
}

/// One supporting line of `log f` per period, for `f` normalized to
/// `f(0) = 1`.
///
/// The line anchored at `t* >= 1` has slope `log f(t*-1) - log f(t*)`;
/// at `t* = 0` the slope of the first step is reused. Decreasing
/// impatience makes `log f` convex, so each line stays weakly below
/// `log f` everywhere and touches it at its anchor.
pub fn supporting_lines(f: &DiscountFactor) -> Result<Vec<SupportingLine>, MarketError> {
    if !f.is_decreasing_impatience(DEFAULT_REL_TOL) {
        return Err(MarketError::NotDecreasingImpatience);
    }
    if f.impatience_ratios().iter().any(|r| *r >= 1.0) {
        return Err(MarketError::NotStrictlyDecreasing);
    }
    let head = f.value(0);
    let log_f: Vec<f64> = f.values().iter().map(|v| (v / head).ln()).collect();
    let lines: Vec<SupportingLine> = (0..=f.horizon())
        .map(|anchor| {
            let pivot = anchor.max(1);
            let slope = log_f[pivot - 1] - log_f[pivot];
            let intercept = log_f[anchor] + anchor as f64 * slope;
            SupportingLine { intercept, slope }
        })
        .collect();
    for line in &lines {
        for (t, &log_value) in log_f.iter().enumerate() {
            debug_assert!(
                line.value(t) <= log_value + 1e-9 * (1.0 + log_value.abs()),
                "supporting line escapes above log f at t={t}"
            );
        }
    }
    Ok(lines)
}

/// Builds the economy whose equilibrium prices are `f` itself.
///
/// One agent per period: agent `i` discounts at `exp(-slope_i)` from the
/// supporting line anchored at `i` and owns wealth `f(i)` (normalized).
/// The candidate equilibrium gives agent `i` the entire supply of period
/// `i` at prices equal to the normalized factor.
pub fn synthesize_economy(f: &DiscountFactor) -> Result<(Economy, EquilibriumResult), MarketError> {
    let lines = supporting_lines(f)?;
    let head = f.value(0);
    let horizon = f.horizon();
    let prices: Vec<f64> = f.values().iter().map(|v| v / head).collect();

    let agents: Vec<ExponentialAgent> = lines
        .iter()
        .zip(&prices)
        .map(|(line, &wealth)| ExponentialAgent {
            delta: (-line.slope).exp(),
            wealth,
        })
        .collect();
    let economy = Economy::new(agents.clone(), horizon)?;

    let mut shares = vec![vec![0.0; horizon + 1]; horizon + 1];
    for (i, row) in shares.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let allocation = Allocation::new(shares)?;
    let join_weights = agents
        .iter()
        .enumerate()
        .map(|(i, agent)| prices[i] / agent.delta.powi(i as i32))
        .collect();
    let supports = (0..=horizon).map(|i| vec![i]).collect();

    Ok((
        economy,
        EquilibriumResult {
            prices,
            allocation,
            join_weights,
            supports,
            iterations: 0,
            residual: 0.0,
        },
    ))
}

/// A single check failure inside a verification report.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Agent's spending differs from their wealth by more than `tol`.
    Budget {
        agent: usize,
        spend: f64,
        wealth: f64,
    },
    /// Agent consumes at `period` although its utility-per-spend there is
    /// more than `tol` (relative) below the agent's best.
    Optimality {
        agent: usize,
        period: usize,
        gap: f64,
    },
    /// Period supply not exactly allocated.
    Feasibility { period: usize, gap: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Budget {
                agent,
                spend,
                wealth,
            } => {
                write!(
                    out,
                    "agent {agent}: spends {spend:.12e} against wealth {wealth:.12e}"
                )
            }
            Violation::Optimality { agent, period, gap } => {
                write!(
                    out,
                    "agent {agent} consumes at period {period} with bang-per-buck gap {gap:.3e}"
                )
            }
            Violation::Feasibility { period, gap } => {
                write!(out, "period {period} supply off by {gap:.3e}")
            }
        }
    }
}

/// Outcome of [`verify_equilibrium`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub ok: bool,
    pub max_budget_residual: f64,
    pub max_optimality_gap: f64,
    pub max_feasibility_gap: f64,
    pub violations: Vec<Violation>,
}

/// Checks whether `(prices, allocation)` clears the economy: every agent
/// exactly spends their wealth (within `tol`), consumes only at periods
/// of maximal utility-per-spend (within relative `tol`), and every
/// period's unit supply is fully allocated.
///
/// Shares at or below `tol` are treated as zero when locating an agent's
/// consumption support.
pub fn verify_equilibrium(
    economy: &Economy,
    prices: &[f64],
    allocation: &Allocation,
    tol: f64,
) -> Result<VerifyReport, MarketError> {
    let periods = economy.horizon() + 1;
    if prices.len() != periods
        || allocation.periods() != periods
        || allocation.agents() != economy.agents().len()
    {
        return Err(MarketError::DimensionMismatch {
            detail: format!(
                "economy has {} agents x {} periods; got {} prices and a {} x {} allocation",
                economy.agents().len(),
                periods,
                prices.len(),
                allocation.agents(),
                allocation.periods()
            ),
        });
    }
    for (index, &value) in prices.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(MarketError::NonPositivePrice { index, value });
        }
    }

    let mut violations = Vec::new();
    let mut max_budget_residual: f64 = 0.0;
    let mut max_optimality_gap: f64 = 0.0;
    let mut max_feasibility_gap: f64 = 0.0;

    for period in 0..periods {
        let sum: f64 = (0..allocation.agents())
            .map(|i| allocation.share(i, period))
            .sum();
        let gap = (sum - 1.0).abs();
        max_feasibility_gap = max_feasibility_gap.max(gap);
        if gap > 1e-12 {
            violations.push(Violation::Feasibility { period, gap });
        }
    }

    for (agent_index, agent) in economy.agents().iter().enumerate() {
        let spend: f64 = (0..periods)
            .map(|t| prices[t] * allocation.share(agent_index, t))
            .sum();
        max_budget_residual = max_budget_residual.max((spend - agent.wealth).abs());
        if (spend - agent.wealth).abs() > tol {
            violations.push(Violation::Budget {
                agent: agent_index,
                spend,
                wealth: agent.wealth,
            });
        }

        let bang: Vec<f64> = (0..periods)
            .map(|t| agent.delta.powi(t as i32) / prices[t])
            .collect();
        let best = bang.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (t, &value) in bang.iter().enumerate() {
            if allocation.share(agent_index, t) > tol {
                let gap = (best - value) / best;
                max_optimality_gap = max_optimality_gap.max(gap);
                if value < best - tol * best {
                    violations.push(Violation::Optimality {
                        agent: agent_index,
                        period: t,
                        gap,
                    });
                }
            }
        }
    }

    Ok(VerifyReport {
        ok: violations.is_empty(),
        max_budget_residual,
        max_optimality_gap,
        max_feasibility_gap,
        violations,
    })
}

/// How the solver seeds its opening bids.
#[derive(Debug, Clone, Copy)]
enum InitStrategy {
    /// Spread each agent's wealth evenly over the periods.
    Uniform,
    /// Deterministic jitter keyed by a start index; start 0 is uniform.
    Jittered(u64),
}

fn initial_bids(agents: &[ExponentialAgent], periods: usize, init: InitStrategy) -> Vec<Vec<f64>> {
    match init {
        InitStrategy::Uniform => agents
            .iter()
            .map(|a| vec![a.wealth / periods as f64; periods])
            .collect(),
        InitStrategy::Jittered(start) => {
            if start == 0 {
                return initial_bids(agents, periods, InitStrategy::Uniform);
            }
            agents
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let raw: Vec<f64> = (0..periods)
                        .map(|t| 1.0 + crate::rng::unit_hash(start, i as u64, t as u64))
                        .collect();
                    let total: f64 = raw.iter().sum();
                    raw.into_iter().map(|g| a.wealth * g / total).collect()
                })
                .collect()
        }
    }
}

/// Groups agents whose deltas coincide to within 1e-12; returns the
/// merged agents and, for each original agent, its group index.
fn merge_agents(agents: &[ExponentialAgent]) -> (Vec<ExponentialAgent>, Vec<usize>) {
    let mut merged: Vec<ExponentialAgent> = Vec::new();
    let mut group = vec![0usize; agents.len()];
    for (i, agent) in agents.iter().enumerate() {
        if let Some(pos) = merged
            .iter()
            .position(|m| (m.delta - agent.delta).abs() < 1e-12)
        {
            merged[pos].wealth += agent.wealth;
            group[i] = pos;
        } else {
            merged.push(*agent);
            group[i] = merged.len() - 1;
        }
    }
    (merged, group)
}

/// Solves for the parimutuel equilibrium by proportional-response
/// dynamics: each round prices are the column sums of the bids, shares
/// are bid fractions, and every agent re-bids their wealth across
/// periods in proportion to the utility each period contributes.
///
/// Stops when the sup-norm price change drops to `tol`; errors with the
/// last residual otherwise. Agents with equal deltas are merged before
/// solving (the equilibrium is invariant to the merge) and their shares
/// split back in proportion to wealth. A converged run is refined to the
/// exact interval-support equilibrium when the support structure can be
/// read off the dynamics; the refinement is deterministic and is dropped
/// if it fails its own verification.
pub fn solve_equilibrium(
    economy: &Economy,
    tol: f64,
    max_iters: usize,
) -> Result<EquilibriumResult, MarketError> {
    solve_with_init(economy, tol, max_iters, InitStrategy::Uniform)
}

fn solve_with_init(
    economy: &Economy,
    tol: f64,
    max_iters: usize,
    init: InitStrategy,
) -> Result<EquilibriumResult, MarketError> {
    let periods = economy.horizon() + 1;
    let (merged, group) = merge_agents(economy.agents());
    let powers: Vec<Vec<f64>> = merged
        .iter()
        .map(|a| (0..periods).map(|t| a.delta.powi(t as i32)).collect())
        .collect();

    let mut bids = initial_bids(&merged, periods, init);
    let mut prices: Vec<f64> = column_sums(&bids, periods);
    let mut iterations = 0usize;
    let mut residual = f64::INFINITY;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        for (i, agent) in merged.iter().enumerate() {
            let utility: f64 = (0..periods)
                .map(|t| bids[i][t] / prices[t] * powers[i][t])
                .sum();
            let scale = agent.wealth / utility;
            for t in 0..periods {
                bids[i][t] = scale * bids[i][t] / prices[t] * powers[i][t];
            }
        }
        let next_prices = column_sums(&bids, periods);
        residual = prices
            .iter()
            .zip(&next_prices)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        prices = next_prices;
        if residual <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MarketError::NoConvergence {
            iterations,
            residual,
        });
    }

    let mut shares: Vec<Vec<f64>> = (0..merged.len())
        .map(|i| (0..periods).map(|t| bids[i][t] / prices[t]).collect())
        .collect();

    if let Some((exact_prices, exact_shares)) = refine(&merged, periods, &prices, &shares) {
        prices = exact_prices;
        shares = exact_shares;
    }

    // Split merged rows back onto the original agents, wealth-weighted.
    let full_shares: Vec<Vec<f64>> = economy
        .agents()
        .iter()
        .enumerate()
        .map(|(orig, agent)| {
            let g = group[orig];
            let fraction = agent.wealth / merged[g].wealth;
            (0..periods).map(|t| shares[g][t] * fraction).collect()
        })
        .collect();

    let join_weights: Vec<f64> = economy
        .agents()
        .iter()
        .enumerate()
        .map(|(orig, agent)| {
            let utility: f64 = (0..periods)
                .map(|t| full_shares[orig][t] * agent.delta.powi(t as i32))
                .sum();
            agent.wealth / utility
        })
        .collect();
    let supports: Vec<Vec<usize>> = full_shares
        .iter()
        .map(|row| (0..periods).filter(|&t| row[t] > tol).collect())
        .collect();

    Ok(EquilibriumResult {
        prices,
        allocation: Allocation::new(full_shares)?,
        join_weights,
        supports,
        iterations,
        residual,
    })
}

fn column_sums(rows: &[Vec<f64>], periods: usize) -> Vec<f64> {
    (0..periods)
        .map(|t| rows.iter().map(|r| r[t]).sum())
        .collect()
}

/// Reads the interval support structure off a converged run and re-solves
/// it in closed form.
///
/// With distinct deltas the equilibrium supports are consecutive period
/// intervals ordered by delta, adjacent intervals sharing at most one
/// boundary period. Price levels inside a run of shared boundaries are
/// tied to each other, so each such block has a single free level fixed
/// by the block's total wealth; boundary shares then follow one budget
/// at a time. Returns `None` whenever the inferred structure fails any
/// of its own feasibility checks.
fn refine(
    merged: &[ExponentialAgent],
    periods: usize,
    prices: &[f64],
    shares: &[Vec<f64>],
) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = merged.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| merged[a].delta.partial_cmp(&merged[b].delta).unwrap());

    // Support intervals from spend shares, smallest delta first.
    let mut intervals = Vec::with_capacity(n);
    for &i in &order {
        let mut lo = None;
        let mut hi = None;
        for t in 0..periods {
            if shares[i][t] * prices[t] > 1e-6 * merged[i].wealth {
                if lo.is_none() {
                    lo = Some(t);
                }
                hi = Some(t);
            }
        }
        intervals.push((lo?, hi?));
    }
    if intervals[0].0 != 0 || intervals[n - 1].1 != periods - 1 {
        return None;
    }
    for k in 0..n - 1 {
        let gap = intervals[k + 1].0 as isize - intervals[k].1 as isize;
        if gap != 0 && gap != 1 {
            return None;
        }
    }

    // Blocks of agents chained by shared boundary periods.
    let mut levels = vec![0.0; n]; // alpha per sorted position
    let mut boundary_share = vec![f64::NAN; n]; // share of period r_k kept by agent k
    let mut block_start = 0;
    while block_start < n {
        let mut block_end = block_start;
        while block_end + 1 < n && intervals[block_end].1 == intervals[block_end + 1].0 {
            block_end += 1;
        }

        // Level ratios within the block, relative to the first agent.
        let mut ratio = vec![1.0; block_end - block_start + 1];
        for k in block_start..block_end {
            let b = intervals[k].1 as i32;
            let da = merged[order[k]].delta;
            let db = merged[order[k + 1]].delta;
            ratio[k + 1 - block_start] = ratio[k - block_start] * (da / db).powi(b);
        }

        // The block level scales all its prices, so total block wealth
        // pins it down: alpha_first = sum(w) / sum(price coefficients).
        let mut coefficient = 0.0;
        for k in block_start..=block_end {
            let shares_left = k > block_start;
            let lo = intervals[k].0 + usize::from(shares_left);
            for t in lo..=intervals[k].1 {
                coefficient += ratio[k - block_start] * merged[order[k]].delta.powi(t as i32);
            }
        }
        let wealth: f64 = (block_start..=block_end)
            .map(|k| merged[order[k]].wealth)
            .sum();
        let alpha_first = wealth / coefficient;
        for k in block_start..=block_end {
            levels[k] = alpha_first * ratio[k - block_start];
        }

        // Boundary shares, one budget at a time.
        for k in block_start..block_end {
            let agent = merged[order[k]];
            let (lo, hi) = intervals[k];
            let mut interior: f64 = 0.0;
            let start = if k > block_start { lo + 1 } else { lo };
            for t in start..hi {
                interior += agent.delta.powi(t as i32);
            }
            let inherited = if k > block_start {
                (1.0 - boundary_share[k - 1]) * agent.delta.powi(lo as i32)
            } else {
                0.0
            };
            let s = (agent.wealth / levels[k] - interior - inherited) / agent.delta.powi(hi as i32);
            if !(-1e-9..=1.0 + 1e-9).contains(&s) {
                return None;
            }
            boundary_share[k] = s.clamp(0.0, 1.0);
        }

        // The last budget in the block must now balance by accounting.
        let last = merged[order[block_end]];
        let (lo, hi) = intervals[block_end];
        let mut spend = 0.0;
        let start = if block_end > block_start { lo + 1 } else { lo };
        for t in start..=hi {
            spend += levels[block_end] * last.delta.powi(t as i32);
        }
        if block_end > block_start {
            spend += (1.0 - boundary_share[block_end - 1])
                * levels[block_end]
                * last.delta.powi(lo as i32);
        }
        if (spend - last.wealth).abs() > 1e-9 * last.wealth {
            return None;
        }

        block_start = block_end + 1;
    }

    // Exact envelope prices from the levels.
    let mut exact_prices = vec![0.0; periods];
    for (k, &(lo, hi)) in intervals.iter().enumerate() {
        let delta = merged[order[k]].delta;
        for (t, price) in exact_prices.iter_mut().enumerate().take(hi + 1).skip(lo) {
            *price = levels[k] * delta.powi(t as i32);
        }
    }
    // Dominance check: no agent's line may rise above the envelope.
    for k in 0..n {
        for (t, &p) in exact_prices.iter().enumerate() {
            let line = levels[k] * merged[order[k]].delta.powi(t as i32);
            if line > p * (1.0 + 1e-12) {
                return None;
            }
        }
    }

    let mut exact_shares = vec![vec![0.0; periods]; n];
    for (k, &(lo, hi)) in intervals.iter().enumerate() {
        for share in exact_shares[order[k]].iter_mut().take(hi + 1).skip(lo) {
            *share = 1.0;
        }
    }
    // Shared boundary periods are split after the interior pass so the
    // right-hand agent cannot overwrite the split.
    for k in 0..n - 1 {
        let b = intervals[k].1;
        if intervals[k + 1].0 == b {
            exact_shares[order[k]][b] = boundary_share[k];
            exact_shares[order[k + 1]][b] = 1.0 - boundary_share[k];
        }
    }
    // A period claimed by three tied agents cannot be split by pairwise
    // boundary shares; bail on any uncleared column.
    for t in 0..periods {
        let total: f64 = exact_shares.iter().map(|row| row[t]).sum();
        if (total - 1.0).abs() > 1e-12 {
            return None;
        }
    }
    Some((exact_prices, exact_shares))
}

/// Envelope weights from an equilibrium, one per agent, with respect to
/// the normalized exponential measure `(1 - delta) * delta^t`:
/// `alpha_i = p(E_i) / delta_hat_i(E_i)` over the consumption support.
///
/// Prices then dominate every `alpha_i * delta_hat_i` pointwise and agree
/// with it on the support.
pub fn join_decomposition(
    prices: &[f64],
    economy: &Economy,
    allocation: &Allocation,
    tol: f64,
) -> Result<Vec<f64>, MarketError> {
    let periods = economy.horizon() + 1;
    if prices.len() != periods
        || allocation.periods() != periods
        || allocation.agents() != economy.agents().len()
    {
        return Err(MarketError::DimensionMismatch {
            detail: "join decomposition inputs must share the economy's dimensions".into(),
        });
    }
    economy
        .agents()
        .iter()
        .enumerate()
        .map(|(agent_index, agent)| {
            let support: Vec<usize> = (0..periods)
                .filter(|&t| allocation.share(agent_index, t) > tol)
                .collect();
            if support.is_empty() {
                return Err(MarketError::EmptySupport { agent: agent_index });
            }
            let price_mass: f64 = support.iter().map(|&t| prices[t]).sum();
            let measure_mass: f64 = support
                .iter()
                .map(|&t| (1.0 - agent.delta) * agent.delta.powi(t as i32))
                .sum();
            Ok(price_mass / measure_mass)
        })
        .collect()
}

/// Re-solves the economy from `n_starts` deterministic initial bids
/// and returns the largest pairwise sup-distance between the normalized
/// price sequences. Small distances are empirical evidence that the
/// equilibrium prices are unique.
pub fn uniqueness_probe(economy: &Economy, n_starts: usize, tol: f64) -> Result<f64, MarketError> {
    let mut price_runs = Vec::with_capacity(n_starts);
    for start in 0..n_starts {
        let result = solve_with_init(
            economy,
            tol,
            DEFAULT_MAX_ITERS,
            InitStrategy::Jittered(start as u64),
        )?;
        let total: f64 = result.prices.iter().sum();
        price_runs.push(
            result
                .prices
                .iter()
                .map(|p| p / total)
                .collect::<Vec<f64>>(),
        );
    }
    let mut worst: f64 = 0.0;
    for a in 0..price_runs.len() {
        for b in a + 1..price_runs.len() {
            let dist = price_runs[a]
                .iter()
                .zip(&price_runs[b])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            worst = worst.max(dist);
        }
    }
    Ok(worst)
}

/// Iteration budget used by [`uniqueness_probe`] and the command-line
/// front end.
pub const DEFAULT_MAX_ITERS: usize = 500_000;
