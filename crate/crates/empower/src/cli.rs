//! Command-line frontend: solve and learn on bundled scenarios or text spec
//! files, report power tables, check horizon-truncation bounds, and scan
//! fixed-point structure over β.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse/validation error, 3 solver
//! non-convergence, 4 comparison mismatch. Failures print one JSON object
//! (`{"error": …, "code": …}`) to stderr.

use crate::cache;
use crate::game::{validate_game, StochasticGame};
use crate::gamespec::{parse_game, serialize_game};
use crate::learner::{
    phase2_learn, traces_to_csv, traces_to_ndjson, LearnMode, LearnSchedule,
};
use crate::planner::{
    finite_horizon_solve, power_report, solve_robot_backward, solve_robot_fixed_point,
    HorizonBound, PlannerOptions, RobotPolicyForm, RobotSolution, TerminalMode,
};
use crate::power::PowerParams;
use crate::prior::{solve_prior_backward, solve_prior_fixed_point, FixedPointOptions, HumanPrior};
use crate::scenarios::{self, BifurcationScan, BoxSpec, GridworldConfig, ResourceCurve};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "empower", version, about = "Soft power-maximization solver and learner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game exactly and write the solution and power tables.
    Solve(SolveArgs),
    /// Train the model-free robot learner over one or more seeds.
    Learn(LearnArgs),
    /// Solve a bundled scenario and cross-check it against an oracle.
    Scenario(ScenarioArgs),
    /// Write the per-state power report for a solved game.
    PowerReport(InputOutputArgs),
    /// Report finite-horizon truncation bounds against the converged solve.
    CheckBounds(CheckBoundsArgs),
    /// Scan fixed points of the single-human stay/leave game over β.
    BifurcationScan(BifurcationScanArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Path to a game spec file.
    #[arg(long, conflicts_with = "scenario")]
    spec: Option<PathBuf>,
    /// Bundled scenario name (see `scenario --list`).
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Args)]
struct InputOutputArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Risk-aversion exponent over goal attainment, ζ.
    #[arg(long)]
    zeta: Option<f64>,
    /// Inequality-aversion exponent over humans, ξ.
    #[arg(long)]
    xi: Option<f64>,
    /// Outer exponent, η.
    #[arg(long)]
    eta: Option<f64>,
    /// Robot softness β_r ("inf" = argmax).
    #[arg(long)]
    beta_r: Option<f64>,
    /// Power regularizer ε_X.
    #[arg(long)]
    eps_x: Option<f64>,
    /// Value regularizer ε_Q.
    #[arg(long)]
    eps_q: Option<f64>,
    /// Accept parameter values outside the inequality-averse regime.
    #[arg(long)]
    permissive: bool,
    #[arg(long, value_enum, default_value = "self-loop")]
    terminal_mode: TerminalModeArg,
    #[arg(long, value_enum, default_value = "power-law")]
    policy_form: PolicyFormArg,
    /// Fixed-point tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Fixed-point damping λ.
    #[arg(long, default_value_t = 0.5)]
    damping: f64,
    /// β-continuation stages for cyclic games.
    #[arg(long, default_value_t = 16)]
    beta_steps: usize,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TerminalModeArg {
    SelfLoop,
    CollectOnce,
    Zero,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PolicyFormArg {
    PowerLaw,
    NormalizedSoftmax,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Truncate to this horizon instead of solving to convergence.
    #[arg(long)]
    horizon: Option<i64>,
    /// Binary solution cache file, keyed by (game, parameters).
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated RNG seeds; one learning run per seed, in parallel.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "expected-sarsa")]
    mode: LearnModeArg,
    #[arg(long, default_value_t = 2000)]
    episodes: usize,
    #[arg(long, default_value_t = 100)]
    max_steps: usize,
    /// Learning rate (alpha_m = alpha_e = alpha_r).
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 1.1)]
    eta: f64,
    #[arg(long, default_value_t = 0.01)]
    eps_x: f64,
    /// β_r geometric anneal endpoints.
    #[arg(long, default_value_t = 0.1)]
    beta_r_init: f64,
    #[arg(long, default_value_t = 5.0)]
    beta_r_final: f64,
    /// Human exploration anneal endpoints (linear over episodes).
    #[arg(long, default_value_t = 0.8)]
    eps_h_init: f64,
    #[arg(long, default_value_t = 0.1)]
    eps_h_final: f64,
    /// Robot exploration anneal endpoints (linear over episodes).
    #[arg(long, default_value_t = 1.0)]
    eps_r_init: f64,
    #[arg(long, default_value_t = 0.01)]
    eps_r_final: f64,
    /// Count-based optimism: bonus(s,a) = init · decay^visits.
    #[arg(long, default_value_t = 50.0)]
    bonus_robot_init: f64,
    #[arg(long, default_value_t = 0.995)]
    bonus_decay: f64,
    /// Env steps between slow-table refreshes.
    #[arg(long, default_value_t = 50)]
    policy_update_period: usize,
    /// Record visited state ids in every episode trace.
    #[arg(long)]
    record_states: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LearnModeArg {
    ExpectedSarsa,
    ActorCritic,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario name.
    name: Option<String>,
    /// List available scenario names and exit.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// Human discount override (confirmation scenario).
    #[arg(long)]
    gamma_h: Option<f64>,
    /// Per-round failure probability override (confirmation scenario).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Oracle comparison tolerance.
    #[arg(long, default_value_t = 1e-6)]
    check_tol: f64,
}

#[derive(Args)]
struct CheckBoundsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated truncation horizons.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    horizons: Vec<i64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BifurcationScanArgs {
    #[arg(long, default_value_t = 0.95)]
    gamma: f64,
    #[arg(long, default_value_t = 0.15)]
    beta_min: f64,
    #[arg(long, default_value_t = 0.45)]
    beta_max: f64,
    #[arg(long, default_value_t = 300)]
    steps: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 1, message: msg.into() }
    }
    fn parse(msg: impl Into<String>) -> Self {
        CliError { code: 2, message: msg.into() }
    }
    fn no_converge(msg: impl Into<String>) -> Self {
        CliError { code: 3, message: msg.into() }
    }
    fn mismatch(msg: impl Into<String>) -> Self {
        CliError { code: 4, message: msg.into() }
    }
    fn io(e: std::io::Error) -> Self {
        CliError { code: 2, message: e.to_string() }
    }
}

const SCENARIO_NAMES: [&str; 13] = [
    "commitment",
    "menu",
    "confirmation",
    "resource",
    "self_harm",
    "pause_destroy",
    "norm_beliefs",
    "norm_habit",
    "belief",
    "boxes",
    "gridworld",
    "gridworld_small",
    "bifurcation",
];

fn build_scenario(name: &str) -> Result<StochasticGame, CliError> {
    let game = match name {
        "commitment" => scenarios::build_commitment(),
        "menu" => scenarios::build_menu(10, 2.0, 2.0),
        "confirmation" => scenarios::build_confirmation(0.99, 0.1, 6),
        "resource" => scenarios::build_resource(ResourceCurve::SquareLog, 1.0, 0.005),
        "self_harm" => scenarios::build_self_harm(100.0, 0.5, 1e-6, 0.99),
        "pause_destroy" => scenarios::build_pause_destroy(1.0, 100.0, 0.1, 0.001, 0.99),
        "norm_beliefs" => scenarios::build_norm(2, false),
        "norm_habit" => scenarios::build_norm(1, true),
        "belief" => scenarios::build_belief_manipulation(1.0, 1.0, 1.0).0,
        "boxes" => scenarios::build_boxes(
            &[BoxSpec { readable: 3, total: 3 }, BoxSpec { readable: 2, total: 4 }],
            true,
        ),
        "gridworld" => {
            scenarios::build_gridworld(&GridworldConfig::standard())
                .map_err(CliError::parse)?
                .0
        }
        "gridworld_small" => {
            scenarios::build_gridworld(&GridworldConfig::small()).map_err(CliError::parse)?.0
        }
        "bifurcation" => scenarios::build_bifurcation(0.95, 0.3),
        other => {
            return Err(CliError::usage(format!(
                "unknown scenario `{other}`; available: {}",
                SCENARIO_NAMES.join(", ")
            )))
        }
    };
    Ok(game)
}

fn load_game(input: &InputArgs) -> Result<StochasticGame, CliError> {
    let game = match (&input.spec, &input.scenario) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(CliError::io)?;
            parse_game(&text).map_err(|e| CliError::parse(e.to_string()))?
        }
        (None, Some(name)) => build_scenario(name)?,
        _ => return Err(CliError::usage("exactly one of --spec or --scenario is required")),
    };
    let report = validate_game(&game);
    if !report.is_empty() {
        return Err(CliError::parse(report.describe(&game).join("; ")));
    }
    Ok(game)
}

fn planner_options(args: &SolverArgs) -> PlannerOptions {
    let mut params = PowerParams::default();
    if let Some(v) = args.zeta {
        params.zeta = v;
    }
    if let Some(v) = args.xi {
        params.xi = v;
    }
    if let Some(v) = args.eta {
        params.eta = v;
    }
    if let Some(v) = args.beta_r {
        params.beta_r = v;
    }
    if let Some(v) = args.eps_x {
        params.eps_x = v;
    }
    if let Some(v) = args.eps_q {
        params.eps_q = v;
    }
    params.permissive = args.permissive;
    PlannerOptions {
        params,
        terminal_mode: match args.terminal_mode {
            TerminalModeArg::SelfLoop => TerminalMode::SelfLoop,
            TerminalModeArg::CollectOnce => TerminalMode::CollectOnce,
            TerminalModeArg::Zero => TerminalMode::Zero,
        },
        policy_form: match args.policy_form {
            PolicyFormArg::PowerLaw => RobotPolicyForm::PowerLaw,
            PolicyFormArg::NormalizedSoftmax => RobotPolicyForm::NormalizedSoftmax,
        },
        damping: args.damping,
        beta_steps: args.beta_steps,
        tol: args.tol,
        max_iter: args.max_iter,
        ..PlannerOptions::default()
    }
}

fn solve_prior(game: &StochasticGame) -> Result<HumanPrior, CliError> {
    if game.is_acyclic().is_some() {
        solve_prior_backward(game, &Default::default()).map_err(CliError::parse)
    } else {
        solve_prior_fixed_point(game, &FixedPointOptions::default())
            .map_err(|e| CliError::no_converge(e.to_string()))
    }
}

/// Classify planner failures: parameter problems are validation errors,
/// everything else is non-convergence.
fn planner_err(e: crate::planner::PlannerError) -> CliError {
    let msg = e.to_string();
    if msg.contains("no fixed point") {
        CliError::no_converge(msg)
    } else {
        CliError::parse(msg)
    }
}

fn solve_game(game: &StochasticGame, opts: &PlannerOptions) -> Result<RobotSolution, CliError> {
    let prior = solve_prior(game)?;
    if game.is_acyclic().is_some() {
        solve_robot_backward(game, &prior, opts).map_err(planner_err)
    } else {
        solve_robot_fixed_point(game, &prior, opts).map_err(planner_err)
    }
}

/// Solution tables keyed by state and action names, for JSON output.
fn solution_json(game: &StochasticGame, sol: &RobotSolution) -> serde_json::Value {
    let aname = |a: usize| game.action_names[a].clone();
    let states: Vec<serde_json::Value> = (0..game.n_states())
        .map(|s| {
            let acts: Vec<String> = game.robot_actions[s].iter().map(|&a| aname(a)).collect();
            serde_json::json!({
                "state": game.states[s].name,
                "robot_actions": acts,
                "q_r": sol.q_r[s],
                "pi_r": sol.pi_r[s],
                "v_r": sol.v_r[s],
                "u_r": sol.u_r[s],
                "x": (0..game.n_humans()).map(|h| sol.x[h][s]).collect::<Vec<f64>>(),
                "v_e": (0..game.n_humans())
                    .map(|h| sol.v_e[h].iter().map(|vg| vg[s]).collect::<Vec<f64>>())
                    .collect::<Vec<Vec<f64>>>(),
            })
        })
        .collect();
    serde_json::json!({
        "game": game.name,
        "humans": game.humans.iter().map(|h| h.name.clone()).collect::<Vec<String>>(),
        "residual": sol.residual,
        "iterations": sol.iterations,
        "states": states,
    })
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io)?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(CliError::io)?;
    Ok(path)
}

fn fingerprint(opts: &PlannerOptions, horizon: Option<i64>) -> String {
    format!(
        "{:?}|{:?}|{:?}|{}|{}|{}|{}|{:?}",
        opts.params, opts.terminal_mode, opts.policy_form, opts.damping, opts.beta_steps,
        opts.tol, opts.max_iter, horizon
    )
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let game = load_game(&args.input)?;
    let opts = planner_options(&args.solver);
    let key = cache::cache_key(&serialize_game(&game), &fingerprint(&opts, args.horizon));
    let cached = match &args.cache {
        Some(path) => cache::load(path, &game, &key).map_err(CliError::io)?,
        None => None,
    };
    let (sol, from_cache) = match cached {
        Some(sol) => (sol, true),
        None => {
            let prior = solve_prior(&game)?;
            let sol = match args.horizon {
                Some(h) => finite_horizon_solve(&game, &prior, &opts, h).map_err(planner_err)?,
                None if game.is_acyclic().is_some() => {
                    solve_robot_backward(&game, &prior, &opts).map_err(planner_err)?
                }
                None => solve_robot_fixed_point(&game, &prior, &opts).map_err(planner_err)?,
            };
            if let Some(path) = &args.cache {
                cache::store(path, &game, &key, &sol).map_err(CliError::io)?;
            }
            (sol, false)
        }
    };
    let report = power_report(&game, &sol);
    let sol_path = write_out(
        &args.out,
        "solution.json",
        &serde_json::to_string_pretty(&solution_json(&game, &sol)).expect("valid json"),
    )?;
    let (rep_name, rep_text) = match args.format {
        OutputFormat::Json => ("power.json", report.to_json()),
        OutputFormat::Csv => ("power.csv", report.to_csv()),
    };
    let rep_path = write_out(&args.out, rep_name, &rep_text)?;
    println!(
        "solved {} ({} states, residual {:.3e}{}) -> {}, {}",
        game.name,
        game.n_states(),
        sol.residual,
        if from_cache { ", cached" } else { "" },
        sol_path.display(),
        rep_path.display()
    );
    Ok(())
}

fn cmd_learn(args: &LearnArgs) -> Result<(), CliError> {
    if args.seeds.is_empty() {
        return Err(CliError::usage("--seeds must be nonempty"));
    }
    let game = load_game(&args.input)?;
    let prior = solve_prior(&game)?;
    let schedule = LearnSchedule {
        mode: match args.mode {
            LearnModeArg::ExpectedSarsa => LearnMode::ExpectedSarsa,
            LearnModeArg::ActorCritic => LearnMode::ActorCritic,
        },
        episodes: args.episodes,
        max_steps: args.max_steps,
        alpha: args.alpha,
        params: PowerParams {
            zeta: args.zeta,
            xi: args.xi,
            eta: args.eta,
            eps_x: args.eps_x,
            beta_r: args.beta_r_final,
            ..PowerParams::default()
        },
        beta_r: (args.beta_r_init, args.beta_r_final),
        eps_h: (args.eps_h_init, args.eps_h_final),
        eps_r: (args.eps_r_init, args.eps_r_final),
        bonus_init: args.bonus_robot_init,
        bonus_decay: args.bonus_decay,
        policy_update_period: args.policy_update_period,
        record_states: args.record_states,
    };
    std::fs::create_dir_all(&args.out).map_err(CliError::io)?;

    // One worker thread per seed; each writes only its own files.
    let results: Vec<Result<(u64, usize), CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .seeds
            .iter()
            .map(|&seed| {
                let (game, prior, schedule, out) = (&game, &prior, &schedule, &args.out);
                scope.spawn(move || {
                    let result = phase2_learn(game, prior, schedule, seed);
                    write_out(out, &format!("traces_{seed}.ndjson"), &traces_to_ndjson(&result.traces))?;
                    write_out(out, &format!("metrics_{seed}.csv"), &traces_to_csv(&result.traces))?;
                    let tables = serde_json::json!({
                        "seed": seed,
                        "q_r": result.q_r,
                        "pi_r": result.pi_r,
                        "x": result.x,
                        "excursions": result.excursions,
                    });
                    write_out(
                        out,
                        &format!("tables_{seed}.json"),
                        &serde_json::to_string_pretty(&tables).expect("valid json"),
                    )?;
                    Ok((seed, result.excursions))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    for r in results {
        let (seed, excursions) = r?;
        println!(
            "seed {seed}: {} episodes, {} attainment excursions -> {}",
            args.episodes,
            excursions,
            args.out.display()
        );
    }
    Ok(())
}

fn cmd_scenario(args: &ScenarioArgs) -> Result<(), CliError> {
    if args.list {
        for name in SCENARIO_NAMES {
            println!("{name}");
        }
        return Ok(());
    }
    let Some(name) = &args.name else {
        return Err(CliError::usage("scenario name required (or --list)"));
    };
    let game = match name.as_str() {
        // Confirmation takes its two headline parameters from the flags.
        "confirmation" => scenarios::build_confirmation(
            args.gamma_h.unwrap_or(0.99),
            args.epsilon.unwrap_or(0.1),
            6,
        ),
        _ => build_scenario(name)?,
    };
    let report = validate_game(&game);
    if !report.is_empty() {
        return Err(CliError::parse(report.describe(&game).join("; ")));
    }
    let opts = planner_options(&args.solver);
    let sol = solve_game(&game, &opts)?;

    let mut mismatches = 0usize;
    if name == "confirmation" {
        // Oracle: the closed-form attainment of "confirm k times then act"
        // against the solver's V^e at each commitment depth.
        let gamma_h = args.gamma_h.unwrap_or(0.99);
        let eps = args.epsilon.unwrap_or(0.1);
        println!("k  solver_v_e  oracle_v_e  status");
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut rows = Vec::new();
        for k in 1..=6usize {
            let sname = format!("s_{k}");
            let s = game
                .states
                .iter()
                .position(|st| st.name == sname)
                .ok_or_else(|| CliError::parse(format!("missing state {sname}")))?;
            let solver_v = sol.v_e[0][0][s];
            let oracle_v = scenarios::confirmation_value(gamma_h, eps, k);
            let ok = (solver_v - oracle_v).abs() <= args.check_tol;
            if !ok {
                mismatches += 1;
            }
            if oracle_v > best.1 {
                best = (k, oracle_v);
            }
            rows.push((k, solver_v, oracle_v, ok));
        }
        for (k, sv, ov, ok) in rows {
            let mark = if ok { "MATCH" } else { "MISMATCH" };
            let star = if k == best.0 { " <- argmax" } else { "" };
            println!("{k}  {sv:.8}  {ov:.8}  {mark}{star}");
        }
    } else if game.is_acyclic().is_some() {
        // Generic oracle for acyclic games: the continuation fixed point
        // must reproduce the backward-induction solution.
        let prior = solve_prior(&game)?;
        let fp = solve_robot_fixed_point(&game, &prior, &opts).map_err(planner_err)?;
        println!("state  v_r_backward  v_r_fixed_point  status");
        for s in 0..game.n_states() {
            let ok = (sol.v_r[s] - fp.v_r[s]).abs() <= args.check_tol.max(1e-7);
            if !ok {
                mismatches += 1;
            }
            println!(
                "{}  {:.10}  {:.10}  {}",
                game.states[s].name,
                sol.v_r[s],
                fp.v_r[s],
                if ok { "MATCH" } else { "MISMATCH" }
            );
        }
    } else {
        // Cyclic: report structural checks on the converged solution.
        let problems = crate::planner::check_solution(&game, &sol, 1e-8);
        mismatches += problems.len();
        println!(
            "state count {}, residual {:.3e}, structural checks: {}",
            game.n_states(),
            sol.residual,
            if problems.is_empty() { "MATCH".to_string() } else { problems.join("; ") }
        );
    }
    if mismatches > 0 {
        return Err(CliError::mismatch(format!("{mismatches} oracle mismatch(es)")));
    }
    Ok(())
}

fn cmd_power_report(args: &InputOutputArgs) -> Result<(), CliError> {
    let game = load_game(&args.input)?;
    let opts = planner_options(&args.solver);
    let sol = solve_game(&game, &opts)?;
    let report = power_report(&game, &sol);
    let (name, text) = match args.format {
        OutputFormat::Json => ("power.json", report.to_json()),
        OutputFormat::Csv => ("power.csv", report.to_csv()),
    };
    let path = write_out(&args.out, name, &text)?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_check_bounds(args: &CheckBoundsArgs) -> Result<(), CliError> {
    let game = load_game(&args.input)?;
    let mut solver = args.solver.clone();
    // The truncation analysis needs a finite |U_r| sup, hence ε_X > 0.
    if solver.eps_x.unwrap_or(0.0) <= 0.0 {
        solver.eps_x = Some(0.01);
    }
    // …and the power-law policy bound additionally needs ε_Q > 0.
    if solver.eps_q.unwrap_or(0.0) <= 0.0 {
        solver.eps_q = Some(1e-6);
    }
    let opts = planner_options(&solver);
    let prior = solve_prior(&game)?;
    let exact = if game.is_acyclic().is_some() {
        solve_robot_backward(&game, &prior, &opts).map_err(planner_err)?
    } else {
        solve_robot_fixed_point(&game, &prior, &opts).map_err(planner_err)?
    };
    let mut csv = String::from("horizon,bound,max_error,within_bound\n");
    let mut all_within = true;
    for &h in &args.horizons {
        let bound =
            HorizonBound::compute(game.n_humans(), &opts.params, game.gamma_r, opts.policy_form, h)
                .map_err(planner_err)?;
        let truncated = finite_horizon_solve(&game, &prior, &opts, h).map_err(planner_err)?;
        let max_err = (0..game.n_states())
            .map(|s| (truncated.v_r[s] - exact.v_r[s]).abs())
            .fold(0.0f64, f64::max);
        let within = max_err <= bound.value + 1e-12;
        all_within &= within;
        csv.push_str(&format!("{h},{},{max_err},{within}\n", bound.value));
        println!(
            "H={h}: bound {:.6e}, observed {max_err:.6e} ({})",
            bound.value,
            if within { "within" } else { "EXCEEDED" }
        );
    }
    write_out(&args.out, "bounds.csv", &csv)?;
    if !all_within {
        return Err(CliError::mismatch("truncation error exceeded the analytic bound"));
    }
    Ok(())
}

fn cmd_bifurcation_scan(args: &BifurcationScanArgs) -> Result<(), CliError> {
    if !(args.beta_min > 0.0 && args.beta_max > args.beta_min && args.steps >= 2) {
        return Err(CliError::usage("need 0 < beta_min < beta_max and steps >= 2"));
    }
    let scan = BifurcationScan::run(args.gamma, args.beta_min, args.beta_max, args.steps);
    let path = write_out(&args.out, "bifurcation.csv", &scan.to_csv())?;
    let changes = scan.root_count_changes();
    println!(
        "gamma {}: {} root-count change(s) at beta ~ {:?} -> {}",
        args.gamma,
        changes.len(),
        changes,
        path.display()
    );
    Ok(())
}

/// Entry point: parse arguments, dispatch, and map failures to exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes; anything else is usage.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Learn(args) => cmd_learn(args),
        Command::Scenario(args) => cmd_scenario(args),
        Command::PowerReport(args) => cmd_power_report(args),
        Command::CheckBounds(args) => cmd_check_bounds(args),
        Command::BifurcationScan(args) => cmd_bifurcation_scan(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.message, "code": e.code })
            );
            e.code
        }
    }
}
