//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

mod common;

use empower::bandit::{
    bandit_power_bits, blahut_arimoto, random_channel, tilted_capacity, AscentOptions,
};
use empower::game::{validate_game, GameBuilder, StochasticGame};
use empower::gamespec::{parse_game, serialize_game};
use empower::learner::{phase2_learn, LearnSchedule};
use empower::planner::{
    finite_horizon_solve, solve_robot_backward, solve_robot_fixed_point, HorizonBound,
    PlannerOptions, RobotSolution, TerminalMode,
};
use empower::power::{intrinsic_reward, power_law_policy, PowerParams};
use empower::prior::{
    phase1_learn, solve_prior_backward, solve_prior_fixed_point, FixedPointOptions, HumanPrior,
    PhaseOneSchedule, PriorOptions,
};
use empower::scenarios::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {name}: PASS");
    } else {
        println!("acceptance {name}: FAIL — {}", failures.join("; "));
        panic!("{name}: {} check(s) failed", failures.len());
    }
}

fn sid(game: &StochasticGame, name: &str) -> usize {
    game.state_id(name).unwrap_or_else(|| panic!("no state named {name}"))
}

fn ract(game: &StochasticGame, s: usize, name: &str) -> usize {
    game.robot_actions[s]
        .iter()
        .position(|&a| game.action_names[a] == name)
        .unwrap_or_else(|| panic!("no robot action {name}"))
}

fn solve(game: &StochasticGame, opts: &PlannerOptions) -> (HumanPrior, RobotSolution) {
    if game.is_acyclic().is_some() {
        let prior = solve_prior_backward(game, &PriorOptions::default()).unwrap();
        let sol = solve_robot_backward(game, &prior, opts).unwrap();
        (prior, sol)
    } else {
        let prior = solve_prior_fixed_point(game, &FixedPointOptions::default()).unwrap();
        let sol = solve_robot_fixed_point(game, &prior, opts).unwrap();
        (prior, sol)
    }
}

fn robot_argmax(sol: &RobotSolution, s: usize) -> usize {
    let row = &sol.q_r[s];
    (0..row.len()).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap()
}

fn sharp_opts() -> PlannerOptions {
    PlannerOptions {
        params: PowerParams {
            xi: 1.0,
            eta: 1.0,
            beta_r: f64::INFINITY,
            permissive: true,
            ..PowerParams::default()
        },
        ..PlannerOptions::default()
    }
}

#[test]
fn criterion_01_commitment_power_levels() {
    let mut fails = Vec::new();
    let game = build_commitment();
    let (_, sol) = solve(&game, &PlannerOptions::default());
    let x = |name: &str| sol.x[0][sid(&game, name)];
    for (state, want) in [("s_follow", 2.0), ("s_commit_a", 1.0), ("s_free", 0.5)] {
        if (x(state) - want).abs() > 1e-9 {
            fails.push(format!("X({state}) = {} want {want}", x(state)));
        }
    }
    let s0 = sid(&game, "s0");
    let chosen = game.action_names[game.robot_actions[s0][robot_argmax(&sol, s0)]].clone();
    if chosen != "choose_follow" {
        fails.push(format!("root action {chosen}, expected the commitment branch"));
    }
    report("01 commitment power levels", fails);
}

#[test]
fn criterion_02_menu_size_tradeoff() {
    let mut fails = Vec::new();
    let k_max = 20;
    for beta_h in [0.5, 1.0, 3f64.ln(), 2.0] {
        for zeta in [1.5, 2.0, 3.0] {
            let game = build_menu(k_max, beta_h, zeta);
            let opts = PlannerOptions {
                params: PowerParams { zeta, ..PowerParams::default() },
                ..PlannerOptions::default()
            };
            let (_, sol) = solve(&game, &opts);
            let s0 = sid(&game, "s0");
            let k_solver = robot_argmax(&sol, s0) + 1;
            let k_brute = (1..=k_max)
                .max_by(|&a, &b| {
                    let xa = sol.x[0][sid(&game, &format!("s_{a}"))];
                    let xb = sol.x[0][sid(&game, &format!("s_{b}"))];
                    xa.partial_cmp(&xb).unwrap()
                })
                .unwrap();
            let k_formula = (beta_h.exp() - 1.0) / (zeta - 1.0);
            if k_solver != k_brute {
                fails.push(format!("β={beta_h:.3} ζ={zeta}: solver k={k_solver} brute k={k_brute}"));
            }
            if (k_brute as f64 - k_formula).abs() > 1.0 {
                fails.push(format!(
                    "β={beta_h:.3} ζ={zeta}: brute k={k_brute} vs closed form {k_formula:.2}"
                ));
            }
        }
    }
    report("02 menu size", fails);
}

#[test]
fn criterion_03_confirmation_rounds() {
    let mut fails = Vec::new();
    for (gamma_h, want_k) in [(0.99, 3usize), (0.5, 1)] {
        let game = build_confirmation(gamma_h, 0.1, 6);
        let (_, sol) = solve(&game, &PlannerOptions::default());
        let s0 = sid(&game, "s0");
        let chosen = game.action_names[game.robot_actions[s0][robot_argmax(&sol, s0)]].clone();
        if chosen != format!("ask_{want_k}") {
            fails.push(format!("γ_h={gamma_h}: chose {chosen}, want ask_{want_k}"));
        }
    }
    report("03 confirmation rounds", fails);
}

#[test]
fn criterion_04_resource_allocation() {
    let mut fails = Vec::new();
    let (m_total, step) = (1.0, 0.005);
    let opts = sharp_opts();
    for (curve, check) in [
        (ResourceCurve::Square, "concentrate"),
        (ResourceCurve::SquareLog, "split"),
        (ResourceCurve::Sqrt, "even"),
    ] {
        let game = build_resource(curve, m_total, step);
        let (_, sol) = solve(&game, &opts);
        let s0 = sid(&game, "s0");
        let i = robot_argmax(&sol, s0);
        let m = (i as f64 * step).min(m_total - i as f64 * step);
        match check {
            "concentrate" => {
                if m > step / 2.0 {
                    fails.push(format!("m²: split {m} instead of full concentration"));
                }
            }
            "split" => {
                if (m - 0.14).abs() > 0.01 {
                    fails.push(format!("m² + 0.1 ln m: split {m}, want 0.14 ± 0.01"));
                }
            }
            _ => {
                if (m - 0.5).abs() > 1e-12 {
                    fails.push(format!("√m: split {m}, want exactly 0.5"));
                }
            }
        }
    }
    report("04 resource allocation", fails);
}

#[test]
fn criterion_05_self_harm_threshold() {
    let mut fails = Vec::new();
    let opts = sharp_opts();
    for v in [0.1, 0.5, 0.9] {
        let margin = |p: f64| {
            let game = build_self_harm(100.0, v, p, 0.99);
            let (_, sol) = solve(&game, &opts);
            let s_n = sid(&game, "s_n");
            sol.q_r[s_n][ract(&game, s_n, "give")] - sol.q_r[s_n][ract(&game, s_n, "withhold")]
        };
        // Bisect the provide/withhold boundary in log p to full precision.
        let (mut lo, mut hi) = (1e-9f64.ln(), 1e-3f64.ln());
        if !(margin(lo.exp()) > 0.0 && margin(hi.exp()) < 0.0) {
            fails.push(format!("v={v}: no sign change on the bracket"));
            continue;
        }
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if margin(mid.exp()) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p_star = (0.5 * (lo + hi)).exp();
        let approx = v / 1e6;
        if !(p_star >= approx / 2.0 && p_star <= approx * 2.0) {
            fails.push(format!("v={v}: p* = {p_star:.3e}, not within 2x of {approx:.3e}"));
        }
        // The exact decision flips cleanly at the bisection bracket.
        if !(margin((lo - 1e-9).exp()) > 0.0 && margin((hi + 1e-9).exp()) < 0.0) {
            fails.push(format!("v={v}: decision not monotone at the boundary"));
        }
    }
    report("05 self-harm threshold", fails);
}

#[test]
fn criterion_06_pause_destroy_thresholds() {
    let mut fails = Vec::new();
    let opts = sharp_opts();
    // The greedy robot settles into one button configuration: follow the
    // argmax actions from a2 down and report how many buttons stay enabled.
    let config = |x: f64, p: f64, q: f64| -> usize {
        let game = build_pause_destroy(x, 100.0, p, q, 0.99);
        let (_, sol) = solve(&game, &opts);
        let a2 = sid(&game, "a2");
        let a1 = sid(&game, "a1");
        if game.action_names[game.robot_actions[a2][robot_argmax(&sol, a2)]] == "stay" {
            return 2;
        }
        match game.action_names[game.robot_actions[a1][robot_argmax(&sol, a1)]].as_str() {
            "stay" => 1,
            _ => 0,
        }
    };
    let bisect = |pred: &dyn Fn(f64) -> bool, mut lo: f64, mut hi: f64| {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    // x*_0: below it, disabling both buttons is optimal.
    if config(0.3, 0.01, 0.01) != 0 || config(60.0, 0.01, 0.01) == 0 {
        fails.push("x*_0 not bracketed by [0.3, 60]".into());
    } else {
        let x0 = bisect(&|x| config(x, 0.01, 0.01) == 0, 0.3, 60.0);
        // Analytic crossing between the all-disabled value y^α/(1−γ) and the
        // pause-enabled chain value [(y+1)^α(1−γp) + γp(x+1)^α]/(1−γ).
        let (g, p, y, al) = (0.99f64, 0.01f64, 100.0f64, -1.0f64);
        let c1 = (1.0 - g * p - g * g * p * (1.0 - p)) * y.powf(al);
        let c2 = (1.0 - g) * (1.0 - g * p) * (y + 1.0).powf(al)
            + g * (1.0 - p) * (1.0 - g * p) * y.powf(al);
        let analytic = ((c1 - c2) / (g * p * (1.0 - g))).powf(1.0 / al) - 1.0;
        if (x0 - analytic).abs() > 0.1 {
            fails.push(format!("x*_0 = {x0:.3} disagrees with the analytic crossing {analytic:.3}"));
        }
        if !(0.5..=2.0).contains(&x0) {
            fails.push(format!("x*_0 = {x0:.3}, want within [0.5, 2]"));
        }
    }
    // x*_2 at q = 0.001: above it, keeping the destroy button is optimal.
    if config(70.0, 0.01, 0.001) == 2 || config(110.0, 0.01, 0.001) != 2 {
        fails.push("x*_2 not bracketed by [70, 110]".into());
    } else {
        let x2 = bisect(&|x| config(x, 0.01, 0.001) != 2, 70.0, 110.0);
        if (x2 - 92.0).abs() > 2.0 {
            fails.push(format!("x*_2 = {x2:.2}, want 92 ± 2"));
        }
    }
    // Between the thresholds only the pause button stays enabled.
    if config(70.0, 0.01, 0.001) != 1 {
        fails.push(format!("x=70: configuration {}, want pause-only", config(70.0, 0.01, 0.001)));
    }
    report("06 pause/destroy thresholds", fails);
}

#[test]
fn criterion_07_belief_manipulation() {
    let mut fails = Vec::new();
    let (game, params) = build_belief_manipulation(1.0, 1.0, 1.0);
    let opts = PlannerOptions {
        params,
        terminal_mode: TerminalMode::Zero,
        ..PlannerOptions::default()
    };
    let (_, sol) = solve(&game, &opts);
    let u = |name: &str| sol.u_r[sid(&game, name)];
    if (u("s_dd") + 8.0 / 3.0).abs() > 1e-12 {
        fails.push(format!("U(s_dd) = {} want -8/3", u("s_dd")));
    }
    if (u("s_cd") + 4.0).abs() > 1e-12 || (u("s_dc") + 4.0).abs() > 1e-12 {
        fails.push(format!("U(s_cd), U(s_dc) = {}, {} want -4", u("s_cd"), u("s_dc")));
    }
    let s0 = sid(&game, "s0");
    let chosen = game.action_names[game.robot_actions[s0][robot_argmax(&sol, s0)]].clone();
    if chosen != "set_dd" {
        fails.push(format!("chose {chosen}, want set_dd"));
    }
    report("07 belief manipulation", fails);
}

#[test]
fn criterion_08_bifurcation_scan() {
    // Single-human stay/leave consistency equation at γ_h = 0.99.
    let mut fails = Vec::new();
    let scan = BifurcationScan::run(0.99, 0.01, 1.0, 2000);
    let changes = scan.root_count_changes();
    let near = |target: f64, tol: f64| changes.iter().any(|&b| (b - target).abs() <= tol);
    if !near(0.203, 0.01) {
        fails.push(format!("no saddle-node at β₁ = 0.203 ± 0.01 (changes at {changes:?})"));
    }
    if !near(0.78, 0.02) {
        fails.push(format!("no saddle-node at β₂ = 0.78 ± 0.02 (changes at {changes:?})"));
    }
    let roots = bifurcation_fixed_points(0.99, 0.275);
    for want in [0.52, 0.59, 0.72] {
        if !roots.iter().any(|&r| (r - want).abs() <= 0.01) {
            fails.push(format!("no root {want} ± 0.01 at β = 0.275 (roots {roots:?})"));
        }
    }
    report("08 bifurcation scan", fails);
}

#[test]
fn criterion_09_empowerment_bound() {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let opts = AscentOptions { starts: 4, iters: 200, ..AscentOptions::default() };
    for zeta in [1.0, 1.5, 2.0] {
        let mut worst: f64 = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(2..=4);
            let ch = random_channel(n, m, &mut rng);
            let (e, _) = tilted_capacity(&ch, zeta, &opts);
            let w = bandit_power_bits(&ch, zeta);
            worst = worst.max(e - w);
        }
        if worst > 1e-6 {
            fails.push(format!("ζ={zeta}: E^ζ − W up to {worst:.3e} > 1e-6"));
        }
    }
    // Noiseless identity channel: capacity equals the power bits at ζ = 1.
    let identity: Vec<Vec<f64>> = (0..4)
        .map(|a| (0..4).map(|s| if s == a { 1.0 } else { 0.0 }).collect())
        .collect();
    let (cap, _) = blahut_arimoto(&identity, 1e-12, 10_000);
    let w = bandit_power_bits(&identity, 1.0);
    if (cap - w).abs() > 1e-6 {
        fails.push(format!("identity channel: E = {cap}, W = {w}"));
    }
    report("09 empowerment bound", fails);
}

/// Greedy milestone rollout: robot argmax of π_r, humans argmax of the prior
/// for a goal across the wall.
fn greedy_events(
    game: &StochasticGame,
    prior: &HumanPrior,
    pi_r: &[Vec<f64>],
    meta: &GridworldMeta,
    steps: usize,
) -> Vec<GridEvent> {
    let cfg = &meta.config;
    let start_region = meta.region[&cfg.human_start];
    let far_goal = (0..game.humans[0].goals.len())
        .find(|&g| {
            let gname = &game.humans[0].goals[g].name;
            meta.region
                .iter()
                .any(|(cell, &r)| r != start_region && gname == &format!("at_{}_{}", cell.0, cell.1))
        })
        .expect("a goal across the wall exists");
    let mut s = (0..game.n_states()).find(|&s| game.states[s].initial).unwrap();
    let mut visited = vec![s];
    for _ in 0..steps {
        let ar = (0..pi_r[s].len())
            .max_by(|&a, &b| pi_r[s][a].partial_cmp(&pi_r[s][b]).unwrap())
            .unwrap();
        let row = &prior.pi_h[0][far_goal][s];
        let ah = (0..row.len()).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap();
        let j = game.joint_index(s, ar, &[ah]);
        // Deterministic gridworld kernel: single successor.
        s = game.kernel[s][j][0].0;
        visited.push(s);
    }
    detect_events(meta, &visited)
}

#[test]
fn criterion_10_gridworld_learning() {
    let mut fails = Vec::new();
    let (game, meta) = build_gridworld(&GridworldConfig::standard()).unwrap();
    let prior = solve_prior_fixed_point(&game, &FixedPointOptions::default()).unwrap();
    let schedule = LearnSchedule { episodes: 4000, ..LearnSchedule::default() };
    for seed in [12u64, 22, 32, 42, 52] {
        let result = phase2_learn(&game, &prior, &schedule, seed);
        let events = greedy_events(&game, &prior, &result.pi_r, &meta, 80);
        let pos = |e: GridEvent| events.iter().position(|&x| x == e);
        let ok = matches!(
            (pos(GridEvent::KeyPickup), pos(GridEvent::Unlock), pos(GridEvent::MoveAside)),
            (Some(k), Some(u), Some(m)) if k < u && u < m
        );
        if !ok {
            fails.push(format!("seed {seed}: events {events:?}"));
        }
    }
    report("10 gridworld learning (5 seeds)", fails);
}

#[test]
fn criterion_11_oracle_equivalence() {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut games = Vec::new();
    while games.len() < 50 {
        let recipe = common::random_recipe(&mut rng);
        let game = common::build_recipe(&recipe, None);
        if validate_game(&game).is_empty() {
            games.push(game);
        }
    }
    let learn_opts = PlannerOptions {
        params: LearnSchedule::default().params.clone(),
        ..PlannerOptions::default()
    };
    let mut solved = Vec::new();
    for (i, game) in games.iter().enumerate() {
        let prior = solve_prior_backward(game, &PriorOptions::default()).unwrap();
        let exact = solve_robot_backward(game, &prior, &learn_opts).unwrap();
        let fp = solve_robot_fixed_point(game, &prior, &learn_opts).unwrap();
        let dv = (0..game.n_states())
            .map(|s| (exact.v_r[s] - fp.v_r[s]).abs())
            .fold(0.0f64, f64::max);
        if dv > 1e-8 {
            fails.push(format!("game {i}: |V_backward − V_fixed_point| = {dv:.3e}"));
        }
        solved.push((prior, exact));
    }
    // Learners on the 5 smallest games.
    let mut order: Vec<usize> = (0..games.len()).collect();
    order.sort_by_key(|&i| games[i].n_states() * 100 + games[i].humans.len());
    for &i in order.iter().take(5) {
        let game = &games[i];
        let (prior, exact) = &solved[i];
        // Rollout learners only see states reachable from the start; compare
        // there.
        let start = game.initial_states()[0];
        let mut seen = game.reachable_from(start);
        seen[start] = true;
        let p1_schedule = PhaseOneSchedule { episodes: 20_000, ..PhaseOneSchedule::default() };
        let p1 = phase1_learn(game, 0, 0, &p1_schedule, 7);
        let dq = (0..game.n_states())
            .filter(|&s| seen[s])
            .flat_map(|s| {
                p1.q[s].iter().enumerate().map(move |(a, &q)| (s, a, q))
            })
            .map(|(s, a, q)| (q - prior.q_m[0][0][s][a]).abs())
            .fold(0.0f64, f64::max);
        if dq > 0.05 {
            fails.push(format!("game {i}: phase-1 |ΔQ^m| = {dq:.3}"));
        }
        let schedule = LearnSchedule {
            episodes: 20_000,
            eps_h: (0.8, 0.0),
            alpha: 0.02,
            ..LearnSchedule::default()
        };
        let p2 = phase2_learn(game, prior, &schedule, 7);
        let mut dv: f64 = 0.0;
        for h in 0..game.n_humans() {
            for g in 0..game.humans[h].goals.len() {
                for s in (0..game.n_states()).filter(|&s| seen[s]) {
                    dv = dv.max((p2.v_e[h][g][s] - exact.v_e[h][g][s]).abs());
                }
            }
        }
        if dv > 0.05 {
            fails.push(format!("game {i}: phase-2 |ΔV^e| = {dv:.3}"));
        }
    }
    report("11 oracle equivalence (50 random games)", fails);
}

/// Five-state ring with a mid-ring goal: the simplest cyclic testbed.
fn ring_game() -> StochasticGame {
    let mut b = GameBuilder::new("ring");
    b.gamma_r(0.9);
    b.relax_mutual_unreachability();
    b.relax_goal_cover();
    let h = b.human("h", 0.9, 0.0, 2.0);
    b.initial_state("r0");
    for s in 1..5 {
        b.state(&format!("r{s}"));
    }
    for s in 0..5usize {
        let name = format!("r{s}");
        b.robot_acts(&name, &["fwd", "jump"]);
        b.rtransition(&name, "fwd", &[(&format!("r{}", (s + 1) % 5), 1.0)]);
        b.rtransition(&name, "jump", &[(&format!("r{}", (s + 2) % 5), 1.0)]);
    }
    b.goal(h, "mid", &[("r2", 1.0)]);
    b.build().unwrap()
}

#[test]
fn criterion_12_finite_horizon_bound() {
    let mut fails = Vec::new();
    let game = ring_game();
    let opts = PlannerOptions {
        params: PowerParams { eps_x: 0.01, eps_q: 1e-6, ..PowerParams::default() },
        ..PlannerOptions::default()
    };
    let prior = solve_prior_fixed_point(&game, &FixedPointOptions::default()).unwrap();
    let exact = solve_robot_fixed_point(&game, &prior, &opts).unwrap();
    let mut bounds = Vec::new();
    for h in [5i64, 10, 20, 40] {
        let bound = HorizonBound::compute(
            game.n_humans(),
            &opts.params,
            game.gamma_r,
            opts.policy_form,
            h,
        )
        .unwrap();
        let truncated = finite_horizon_solve(&game, &prior, &opts, h).unwrap();
        let err = (0..game.n_states())
            .map(|s| (truncated.v_r[s] - exact.v_r[s]).abs())
            .fold(0.0f64, f64::max);
        if err > bound.value {
            fails.push(format!("H={h}: error {err:.3e} exceeds bound {:.3e}", bound.value));
        }
        bounds.push((h, bound.value));
    }
    for w in bounds.windows(2) {
        let ((h1, b1), (h2, b2)) = (w[0], w[1]);
        let ratio = b2 / b1;
        let want = game.gamma_r.powi((h2 - h1) as i32);
        if (ratio / want - 1.0).abs() > 1e-12 {
            fails.push(format!("bound ratio H{h1}→H{h2} = {ratio:.15}, want γ^ΔH = {want:.15}"));
        }
    }
    report("12 finite-horizon bound", fails);
}

#[test]
fn criterion_13_axiomatic_properties() {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1313);

    // Pigou–Dalton: a mean-preserving transfer toward the weaker human
    // strictly increases U_r.
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=6);
        let xi = rng.gen_range(1.0..3.0);
        let eta = rng.gen_range(1.0..2.0);
        let ws: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..6.0)).collect();
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if ws[i] >= ws[j] {
            continue;
        }
        let delta = rng.gen_range(1e-6..(ws[j] - ws[i]) / 2.0);
        let u = |ws: &[f64]| {
            let xs: Vec<f64> = ws.iter().map(|&w| w.exp2()).collect();
            intrinsic_reward(&xs, xi, eta, 0.0)
        };
        let mut after = ws.clone();
        after[i] += delta;
        after[j] -= delta;
        if u(&after) <= u(&ws) {
            violations += 1;
        }
    }
    if violations > 0 {
        fails.push(format!("Pigou–Dalton: {violations} violations"));
    }

    // Last-bit protection at ξ = 1: taking one human's last bit (1 → 0)
    // cannot be offset by any gain to another human.
    violations = 0;
    let mut cases = 0;
    for xi10 in 10..=60 {
        let x = xi10 as f64 / 10.0; // other human's W before, ≥ 1
        for k in 0..=40 {
            let y = x + k as f64; // after the trade, arbitrarily large
            cases += 1;
            let before = intrinsic_reward(&[2.0f64.powf(1.0), 2.0f64.powf(x)], 1.0, 1.0, 0.0);
            let after = intrinsic_reward(&[2.0f64.powf(0.0), 2.0f64.powf(y)], 1.0, 1.0, 0.0);
            if after >= before {
                violations += 1;
            }
        }
    }
    assert!(cases >= 1000);
    if violations > 0 {
        fails.push(format!("last-bit protection: {violations} violations"));
    }

    // Commitment monotonicity: restricting A_r at one state weakly raises
    // every Q^m row at that state.
    violations = 0;
    cases = 0;
    'outer: while cases < 1000 {
        let recipe = common::random_recipe(&mut rng);
        let game = common::build_recipe(&recipe, None);
        if !validate_game(&game).is_empty() {
            continue;
        }
        let candidates: Vec<usize> =
            (0..recipe.n_states - 1).filter(|&s| recipe.robot_acts[s] >= 2).collect();
        if candidates.is_empty() {
            continue;
        }
        let s = candidates[rng.gen_range(0..candidates.len())];
        let dropped = rng.gen_range(0..recipe.robot_acts[s]);
        let restricted = common::build_recipe(&recipe, Some((s, dropped)));
        let full_prior = solve_prior_backward(&game, &PriorOptions::default()).unwrap();
        let restr_prior = solve_prior_backward(&restricted, &PriorOptions::default()).unwrap();
        for h in 0..game.n_humans() {
            for g in 0..game.humans[h].goals.len() {
                for (a, &q) in restr_prior.q_m[h][g][s].iter().enumerate() {
                    cases += 1;
                    if q < full_prior.q_m[h][g][s][a] - 1e-12 {
                        violations += 1;
                        if violations > 20 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    if violations > 0 {
        fails.push(format!("commitment monotonicity: {violations} violations"));
    }

    // Scale invariance of π_r at ε_Q = 0: rescaling all Q by c > 0 leaves
    // the power-law policy unchanged.
    violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=6);
        let beta = [0.5, 2.0, 5.0, f64::INFINITY][rng.gen_range(0..4)];
        let q: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-3..10.0)).collect();
        let c = rng.gen_range(0.01..100.0);
        let scaled: Vec<f64> = q.iter().map(|&v| v * c).collect();
        let p1 = power_law_policy(&q, beta, 0.0);
        let p2 = power_law_policy(&scaled, beta, 0.0);
        if p1.iter().zip(&p2).any(|(a, b)| (a - b).abs() > 1e-9) {
            violations += 1;
        }
    }
    if violations > 0 {
        fails.push(format!("scale invariance: {violations} violations"));
    }

    report("13 axiomatic properties", fails);
}

#[test]
fn criterion_14_parser_robustness() {
    let mut fails = Vec::new();
    for game in all_default_scenarios() {
        let text = serialize_game(&game);
        match parse_game(&text) {
            Ok(back) if back == game => {}
            Ok(_) => fails.push(format!("{}: round trip changed the game", game.name)),
            Err(e) => fails.push(format!("{}: canonical form rejected: {e}", game.name)),
        }
    }
    // One million random point mutations of valid specs must never panic.
    let seeds: Vec<String> = all_default_scenarios()
        .iter()
        .filter(|g| g.n_states() < 40)
        .map(serialize_game)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let charset: &[u8] = b"abght0123456789.*:=[]# -\ninf";
    let mut mutations = 0u64;
    let mut round = 0usize;
    while mutations < 1_000_000 {
        let base = &seeds[round % seeds.len()];
        round += 1;
        let mut bytes = base.clone().into_bytes();
        for _ in 0..rng.gen_range(1..=60) {
            mutations += 1;
            if bytes.is_empty() {
                break;
            }
            let i = rng.gen_range(0..bytes.len());
            match rng.gen_range(0..3) {
                0 => bytes[i] = charset[rng.gen_range(0..charset.len())],
                1 => bytes.insert(i, charset[rng.gen_range(0..charset.len())]),
                _ => {
                    bytes.remove(i);
                }
            }
        }
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse_game(&text);
    }
    report("14 parser robustness (10^6 mutations)", fails);
}

