//! Command-line front end. The binary in `main.rs` is a one-line shim
//! around [`run`].
//!
//! Exit codes follow one contract across subcommands: 0 when the command
//! succeeded and any checked property holds, 1 when a property was
//! falsified or a verification failed, 2 on malformed input or usage.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::aggregate::{
    check_iia, check_pareto_dated, check_time_consistency, geometric_mean, NormalizedFactor,
    Profile, Weights,
};
use crate::decompose::{decompose, min_basis_weights, reconstruct, Decomposition};
use crate::discount::DiscountFactor;
use crate::io::{
    format_float, read_allocation_csv, read_decomposition_doc, read_economy_json, read_profile_csv,
    read_sequence_csv, write_allocation_csv, write_decomposition_doc, write_economy_json,
    write_equilibrium_json, write_sequence_csv,
};
use crate::market::{
    envelope_prices, solve_equilibrium, synthesize_economy, verify_equilibrium, MarketError,
    DEFAULT_MAX_ITERS,
};
use crate::selftest::{self, Sizes};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "impatience",
    version,
    about = "Discount factors: impatience checks, beta-delta decomposition, aggregation, parimutuel markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative tolerance for property checks and solver convergence.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Horizon override (reconstruction and envelope commands).
    #[arg(long, global = true)]
    horizon: Option<usize>,

    /// Output file, or path prefix for commands that emit several files.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a discount-factor CSV: ratios, stationarity, impatience,
    /// and a falsifying investment question when impatience increases.
    Check {
        /// Factor as `t,value` CSV.
        input: PathBuf,
    },
    /// Factor a decreasing-impatience CSV into generalized beta-delta
    /// components, or rebuild a factor from a decomposition document.
    Decompose {
        /// Factor as `t,value` CSV (omit when using --reconstruct).
        input: Option<PathBuf>,
        /// Rebuild the factor described by this decomposition document.
        #[arg(long)]
        reconstruct: Option<PathBuf>,
        /// Also write the concave expansion target h as CSV.
        #[arg(long)]
        emit_h: Option<PathBuf>,
        /// Also write the basis weights alpha as CSV.
        #[arg(long)]
        emit_alpha: Option<PathBuf>,
    },
    /// Aggregate a profile CSV by weighted geometric mean.
    Aggregate {
        /// Profile as `t,member_1,...,member_m` CSV.
        profile: PathBuf,
        /// Comma-separated weights, e.g. `--eta 0.5,0.5`. Uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        eta: Vec<f64>,
        /// Also run the Pareto, IIA and time-consistency checks.
        #[arg(long)]
        check: bool,
        /// Diagnostic: least-squares fit of the weights that best explain
        /// this aggregated factor CSV in log space.
        #[arg(long)]
        fit: Option<PathBuf>,
    },
    /// Parimutuel market operations.
    Market {
        #[command(subcommand)]
        action: MarketAction,
    },
    /// Run the randomized property suites.
    Selftest {
        /// Base case count per suite (default: full acceptance sizes).
        #[arg(long)]
        cases: Option<usize>,
        /// Threads used across independent random instances.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Run the negative controls: planted failures must be caught.
        #[arg(long)]
        expect_fail: bool,
    },
}

#[derive(Subcommand)]
enum MarketAction {
    /// Build the economy whose equilibrium prices equal the given factor
    /// and verify the constructed equilibrium.
    Synthesize {
        /// Factor as `t,value` CSV.
        input: PathBuf,
    },
    /// Solve an economy JSON for its equilibrium.
    Solve {
        economy: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Verify prices and an allocation against an economy.
    Verify {
        economy: PathBuf,
        #[arg(long)]
        prices: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
    },
    /// Envelope prices of weighted exponentials, with per-agent branches.
    Envelope {
        /// Comma-separated `alpha:delta` pairs, e.g. `1:0.3,0.65:0.6,0.3:0.8`.
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
    },
}

/// Parses arguments from the process environment and dispatches.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_BAD_INPUT
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Check { ref input } => cmd_check(input, cli.tol),
        Command::Decompose {
            ref input,
            ref reconstruct,
            ref emit_h,
            ref emit_alpha,
        } => cmd_decompose(
            input.as_deref(),
            reconstruct.as_deref(),
            emit_h.as_deref(),
            emit_alpha.as_deref(),
            cli.horizon,
            cli.output.as_deref(),
        ),
        Command::Aggregate {
            ref profile,
            ref eta,
            check,
            ref fit,
        } => cmd_aggregate(profile, eta, check, fit.as_deref(), cli.output.as_deref()),
        Command::Market { ref action } => match action {
            MarketAction::Synthesize { input } => {
                cmd_market_synthesize(input, cli.tol, cli.output.as_deref())
            }
            MarketAction::Solve { economy, max_iters } => {
                cmd_market_solve(economy, cli.tol, *max_iters, cli.output.as_deref())
            }
            MarketAction::Verify {
                economy,
                prices,
                allocation,
            } => cmd_market_verify(economy, prices, allocation, cli.tol),
            MarketAction::Envelope { pairs } => {
                cmd_market_envelope(pairs, cli.horizon, cli.output.as_deref())
            }
        },
        Command::Selftest {
            cases,
            jobs,
            expect_fail,
        } => Ok(cmd_selftest(cli.seed, cases, jobs, expect_fail)),
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes to the output file when given, stdout otherwise.
fn emit(output: Option<&Path>, content: &str) -> Result<(), String> {
    match output {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_factor(path: &Path) -> Result<DiscountFactor, String> {
    let values = read_sequence_csv(&read_file(path)?).map_err(|e| e.to_string())?;
    DiscountFactor::new(values).map_err(|e| e.to_string())
}

fn cmd_check(input: &Path, tol: f64) -> Result<i32, String> {
    let factor = load_factor(input)?;
    println!("horizon: {}", factor.horizon());
    let ratios = factor
        .impatience_ratios()
        .iter()
        .map(|r| format!("{r:.6}"))
        .collect::<Vec<_>>()
        .join(" ");
    println!("impatience ratios: {ratios}");
    println!("stationary: {}", factor.is_stationary(tol));
    let decreasing = factor.is_decreasing_impatience(tol);
    println!("decreasing impatience: {decreasing}");
    println!(
        "increasing impatience: {}",
        factor.is_increasing_impatience(tol)
    );
    if decreasing {
        return Ok(EXIT_OK);
    }
    let scan = factor.find_convexity_violation();
    if let Some(w) = scan.witness {
        let growth = 1.0 + w.rate;
        println!(
            "falsifying investment question (k=1, r={:.6}, t={}):",
            w.rate, w.period
        );
        println!(
            "  bundle A: {:.6} at date {} plus {:.6} at date {}",
            0.5 * growth.powi(w.period as i32 - 1),
            w.period - 1,
            0.5 * growth.powi(w.period as i32 + 1),
            w.period + 1
        );
        println!(
            "  bundle B: {:.6} at date {}",
            growth.powi(w.period as i32),
            w.period
        );
        println!(
            "  discounted values: A = {:.9}, B = {:.9}; B strictly preferred",
            w.lhs, w.rhs
        );
    }
    if scan.boundary_violation {
        println!("note: log-convexity also fails in the window at t=0 (no maturity >= 1 question covers it)");
    }
    Ok(EXIT_FALSIFIED)
}

fn cmd_decompose(
    input: Option<&Path>,
    rebuild: Option<&Path>,
    emit_h: Option<&Path>,
    emit_alpha: Option<&Path>,
    horizon_override: Option<usize>,
    output: Option<&Path>,
) -> Result<i32, String> {
    if let Some(doc_path) = rebuild {
        let doc = read_decomposition_doc(&read_file(doc_path)?).map_err(|e| e.to_string())?;
        let horizon = horizon_override.unwrap_or(doc.horizon);
        if horizon < 2 {
            return Err(format!("horizon {horizon} too short, need at least 2"));
        }
        let d = Decomposition {
            scale: doc.scale,
            gamma: doc.gamma,
            components: doc.components,
            h: Vec::new(),
            g: Vec::new(),
        };
        let factor = reconstruct(&d, horizon);
        emit(output, &write_sequence_csv(factor.values()))?;
        return Ok(EXIT_OK);
    }

    let input = input.ok_or("decompose needs an input CSV or --reconstruct <doc>")?;
    let factor = load_factor(input)?;
    let d = match decompose(&factor) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot decompose: {e}");
            return Ok(EXIT_FALSIFIED);
        }
    };
    let error = d.max_relative_error(&factor);
    emit(output, &write_decomposition_doc(&d, factor.horizon()))?;
    eprintln!("components: {}", d.components.len());
    eprintln!("max relative reconstruction error: {error:e}");
    if let Some(path) = emit_h {
        write_file(path, &write_sequence_csv(&d.h))?;
    }
    if let Some(path) = emit_alpha {
        let basis = min_basis_weights(&d.h).map_err(|e| e.to_string())?;
        write_file(path, &write_sequence_csv(basis.alpha()))?;
    }
    Ok(if error <= 1e-9 {
        EXIT_OK
    } else {
        EXIT_FALSIFIED
    })
}

fn cmd_aggregate(
    profile_path: &Path,
    eta: &[f64],
    check: bool,
    fit: Option<&Path>,
    output: Option<&Path>,
) -> Result<i32, String> {
    let profile = read_profile_csv(&read_file(profile_path)?).map_err(|e| e.to_string())?;
    let weights = if eta.is_empty() {
        Weights::uniform(profile.len())
    } else {
        Weights::new(eta.to_vec()).map_err(|e| e.to_string())?
    };
    let pooled = geometric_mean(&profile, &weights).map_err(|e| e.to_string())?;
    emit(output, &write_sequence_csv(pooled.values()))?;
    if let Some(target_path) = fit {
        let target = read_sequence_csv(&read_file(target_path)?).map_err(|e| e.to_string())?;
        fit_weights(&profile, &target)?;
    }
    if !check {
        return Ok(EXIT_OK);
    }
    let ok = run_axiom_checks(&profile, &weights).map_err(|e| e.to_string())?;
    Ok(if ok { EXIT_OK } else { EXIT_FALSIFIED })
}

/// Diagnostic least-squares fit: the weights that best explain `target`
/// as a geometric mean of the profile members. Log-linear regression
/// with a small ridge; not a constructive recovery procedure.
fn fit_weights(profile: &Profile, target: &[f64]) -> Result<(), String> {
    if target.len() != profile.horizon() + 1 {
        return Err(format!(
            "fit target has {} rows, profile has horizon {}",
            target.len(),
            profile.horizon()
        ));
    }
    if target.iter().any(|v| *v <= 0.0) {
        return Err("fit target must be strictly positive".into());
    }
    let m = profile.len();
    let mut normal = vec![vec![0.0f64; m]; m];
    let mut rhs = vec![0.0f64; m];
    for t in 1..=profile.horizon() {
        let logs: Vec<f64> = profile.members().iter().map(|f| f.value(t).ln()).collect();
        let b = (target[t] / target[0]).ln();
        for i in 0..m {
            for j in 0..m {
                normal[i][j] += logs[i] * logs[j];
            }
            rhs[i] += logs[i] * b;
        }
    }
    for (i, row) in normal.iter_mut().enumerate() {
        row[i] += 1e-12;
    }
    let solution = solve_dense(&mut normal, &mut rhs)?;
    let mut residual = 0.0f64;
    for t in 1..=profile.horizon() {
        let predicted: f64 = profile
            .members()
            .iter()
            .zip(&solution)
            .map(|(f, eta)| eta * f.value(t).ln())
            .sum();
        residual += (predicted - (target[t] / target[0]).ln()).powi(2);
    }
    let rms = (residual / profile.horizon() as f64).sqrt();
    eprintln!(
        "fitted weights: {}",
        solution
            .iter()
            .map(|w| format!("{w:.6}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    eprintln!("weight sum: {:.6}", solution.iter().sum::<f64>());
    eprintln!("log-space rms residual: {rms:.3e}");
    Ok(())
}

/// In-place Gaussian elimination with partial pivoting.
fn solve_dense(matrix: &mut [Vec<f64>], rhs: &mut [f64]) -> Result<Vec<f64>, String> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                matrix[a][col]
                    .abs()
                    .partial_cmp(&matrix[b][col].abs())
                    .unwrap()
            })
            .unwrap();
        if matrix[pivot][col].abs() < 1e-300 {
            return Err("fit system is singular (members indistinguishable)".into());
        }
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        let pivot_row = matrix[col].clone();
        for row in col + 1..n {
            let factor = matrix[row][col] / pivot_row[col];
            for (cell, p) in matrix[row].iter_mut().zip(&pivot_row).skip(col) {
                *cell -= factor * p;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut solution = vec![0.0; n];
    for col in (0..n).rev() {
        let mut value = rhs[col];
        for k in col + 1..n {
            value -= matrix[col][k] * solution[k];
        }
        solution[col] = value / matrix[col][col];
    }
    Ok(solution)
}

/// Deterministic axiom sweep over the given profile; reports one line
/// per axiom on stderr.
fn run_axiom_checks(
    profile: &Profile,
    weights: &Weights,
) -> Result<bool, crate::aggregate::AggregateError> {
    let horizon = profile.horizon();

    let mut tc = true;
    for t in 0..=horizon - 2 {
        tc &= check_time_consistency(&geometric_mean, profile, weights, t, 1e-10)?;
    }
    eprintln!("time consistency: {}", verdict(tc));

    let mut pareto = true;
    for t in 0..=horizon {
        for s in 0..=horizon {
            if t == s {
                continue;
            }
            let floor = profile
                .members()
                .iter()
                .map(|m| m.value(t) / m.value(s))
                .fold(f64::INFINITY, f64::min);
            pareto &=
                check_pareto_dated(&geometric_mean, profile, weights, t, s, 1.0, 0.95 * floor)?;
        }
    }
    eprintln!("pareto (dated rewards): {}", verdict(pareto));

    let mut iia = true;
    for t in 0..horizon.saturating_sub(1) {
        for s in 0..horizon.saturating_sub(1) {
            if t == s {
                continue;
            }
            let cut = t.max(s) + 1;
            let altered: Vec<NormalizedFactor> = profile
                .members()
                .iter()
                .map(|m| {
                    let mut values = m.values().to_vec();
                    for v in values.iter_mut().skip(cut) {
                        *v *= 0.5;
                    }
                    NormalizedFactor::new(values).expect("halved tail stays valid")
                })
                .collect();
            let alt_profile = Profile::new(altered)?;
            iia &= check_iia(&geometric_mean, profile, &alt_profile, weights, t, s, 1e-10)?;
        }
    }
    eprintln!("independence of irrelevant alternatives: {}", verdict(iia));

    Ok(tc && pareto && iia)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Resolves the four output paths of the market commands from a prefix.
fn market_paths(prefix: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let with_suffix = |suffix: &str| -> PathBuf {
        let mut name = prefix.as_os_str().to_os_string();
        name.push(suffix);
        PathBuf::from(name)
    };
    (
        with_suffix(".economy.json"),
        with_suffix(".equilibrium.json"),
        with_suffix(".prices.csv"),
        with_suffix(".allocation.csv"),
    )
}

fn cmd_market_synthesize(input: &Path, tol: f64, output: Option<&Path>) -> Result<i32, String> {
    let factor = load_factor(input)?;
    let prefix = output.ok_or("market synthesize writes several files; pass --output <prefix>")?;
    let (economy, candidate) = match synthesize_economy(&factor) {
        Ok(pair) => pair,
        Err(e @ (MarketError::NotDecreasingImpatience | MarketError::NotStrictlyDecreasing)) => {
            eprintln!("cannot synthesize: {e}");
            return Ok(EXIT_FALSIFIED);
        }
        Err(e) => return Err(e.to_string()),
    };
    let (economy_path, equilibrium_path, prices_path, allocation_path) = market_paths(prefix);
    write_file(&economy_path, &write_economy_json(&economy))?;
    write_file(&equilibrium_path, &write_equilibrium_json(&candidate))?;
    write_file(&prices_path, &write_sequence_csv(&candidate.prices))?;
    write_file(
        &allocation_path,
        &write_allocation_csv(&candidate.allocation),
    )?;
    let report = verify_equilibrium(&economy, &candidate.prices, &candidate.allocation, tol)
        .map_err(|e| e.to_string())?;
    println!("agents: {}", economy.agents().len());
    println!("verification: {}", verdict(report.ok));
    println!("max budget residual: {:e}", report.max_budget_residual);
    for violation in &report.violations {
        println!("  {violation}");
    }
    Ok(if report.ok { EXIT_OK } else { EXIT_FALSIFIED })
}

fn cmd_market_solve(
    economy_path: &Path,
    tol: f64,
    max_iters: usize,
    output: Option<&Path>,
) -> Result<i32, String> {
    let economy = read_economy_json(&read_file(economy_path)?).map_err(|e| e.to_string())?;
    let prefix = output.ok_or("market solve writes several files; pass --output <prefix>")?;
    let result = match solve_equilibrium(&economy, tol, max_iters) {
        Ok(r) => r,
        Err(e @ MarketError::NoConvergence { .. }) => {
            eprintln!("{e}");
            return Ok(EXIT_FALSIFIED);
        }
        Err(e) => return Err(e.to_string()),
    };
    let (_, equilibrium_path, prices_path, allocation_path) = market_paths(prefix);
    write_file(&equilibrium_path, &write_equilibrium_json(&result))?;
    write_file(&prices_path, &write_sequence_csv(&result.prices))?;
    write_file(&allocation_path, &write_allocation_csv(&result.allocation))?;
    println!("iterations: {}", result.iterations);
    println!("residual: {:e}", result.residual);
    println!(
        "join weights: {}",
        result
            .join_weights
            .iter()
            .map(|w| format_float(*w))
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(EXIT_OK)
}

fn cmd_market_verify(
    economy_path: &Path,
    prices_path: &Path,
    allocation_path: &Path,
    tol: f64,
) -> Result<i32, String> {
    let economy = read_economy_json(&read_file(economy_path)?).map_err(|e| e.to_string())?;
    let prices = read_sequence_csv(&read_file(prices_path)?).map_err(|e| e.to_string())?;
    let allocation =
        read_allocation_csv(&read_file(allocation_path)?).map_err(|e| e.to_string())?;
    let report =
        verify_equilibrium(&economy, &prices, &allocation, tol).map_err(|e| e.to_string())?;
    println!("verification: {}", verdict(report.ok));
    println!("max budget residual: {:e}", report.max_budget_residual);
    println!("max optimality gap: {:e}", report.max_optimality_gap);
    println!("max feasibility gap: {:e}", report.max_feasibility_gap);
    for violation in &report.violations {
        println!("  {violation}");
    }
    Ok(if report.ok { EXIT_OK } else { EXIT_FALSIFIED })
}

fn cmd_market_envelope(
    pairs: &[String],
    horizon_override: Option<usize>,
    output: Option<&Path>,
) -> Result<i32, String> {
    if pairs.is_empty() {
        return Err("envelope needs --pairs alpha:delta[,alpha:delta...]".into());
    }
    let weighted = pairs
        .iter()
        .map(|pair| {
            let (alpha, delta) = pair
                .split_once(':')
                .ok_or_else(|| format!("bad pair {pair:?}, expected alpha:delta"))?;
            let alpha: f64 = alpha
                .trim()
                .parse()
                .map_err(|_| format!("bad weight in {pair:?}"))?;
            let delta: f64 = delta
                .trim()
                .parse()
                .map_err(|_| format!("bad delta in {pair:?}"))?;
            Ok::<(f64, f64), String>((alpha, delta))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let horizon = horizon_override.unwrap_or(10);
    let envelope = envelope_prices(&weighted, horizon).map_err(|e| e.to_string())?;

    // Envelope plus one branch column per agent, ready for plotting.
    let mut csv = String::from("t,envelope");
    for i in 1..=weighted.len() {
        csv.push_str(&format!(",agent_{i}"));
    }
    csv.push('\n');
    for (t, price) in envelope.iter().enumerate() {
        csv.push_str(&format!("{t},{}", format_float(*price)));
        for &(alpha, delta) in &weighted {
            csv.push_str(&format!(",{}", format_float(alpha * delta.powi(t as i32))));
        }
        csv.push('\n');
    }
    emit(output, &csv)?;
    Ok(EXIT_OK)
}

fn cmd_selftest(seed: u64, cases: Option<usize>, jobs: usize, expect_fail: bool) -> i32 {
    if expect_fail {
        let report = selftest::suite_negative_controls();
        println!("{report}");
        return if report.passed() {
            EXIT_OK
        } else {
            EXIT_FALSIFIED
        };
    }
    let sizes = match cases {
        Some(n) => Sizes {
            factors: n,
            economies: (n * 2 / 5).max(10),
            probes: (n / 10).max(5),
            profiles: n,
        },
        None => Sizes::default(),
    };
    let jobs = jobs.max(1);
    let mut all_passed = true;
    for report in selftest::run_all(seed, sizes, jobs) {
        println!("{report}");
        all_passed &= report.passed();
    }
    if all_passed {
        EXIT_OK
    } else {
        EXIT_FALSIFIED
    }
}
