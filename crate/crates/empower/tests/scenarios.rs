//! Closed-form and ordering oracles for the benchmark game builders, checked
//! against the exact solvers.

use empower::game::{validate_game, StochasticGame};
use empower::planner::{
    solve_robot_backward, solve_robot_fixed_point, PlannerOptions, RobotSolution, TerminalMode,
};
use empower::power::PowerParams;
use empower::prior::{
    solve_prior_backward, solve_prior_fixed_point, FixedPointOptions, HumanPrior, PriorOptions,
};
use empower::scenarios::*;

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

#[test]
fn all_defaults_validate_clean() {
    for game in all_default_scenarios() {
        let report = validate_game(&game);
        assert!(report.is_empty(), "{}: {:?}", game.name, report.describe(&game));
    }
}

#[test]
fn commitment_attainment_levels() {
    let game = build_commitment();
    let (_, sol) = solve(&game, &PlannerOptions::default());
    let x = |name: &str| sol.x[0][sid(&game, name)];
    assert!((x("s_follow") - 2.0).abs() < 1e-9, "X(follow) = {}", x("s_follow"));
    assert!((x("s_commit_a") - 1.0).abs() < 1e-9, "X(commit) = {}", x("s_commit_a"));
    assert!((x("s_commit_b") - 1.0).abs() < 1e-9);
    assert!((x("s_free") - 0.5).abs() < 1e-9, "X(free) = {}", x("s_free"));
    let s0 = sid(&game, "s0");
    let a = robot_argmax(&sol, s0);
    assert_eq!(game.action_names[game.robot_actions[s0][a]], "choose_follow");
}

#[test]
fn menu_soft_pick_tradeoff() {
    let (beta_h, zeta, k_max) = (2.0, 2.0, 10);
    let game = build_menu(k_max, beta_h, zeta);
    let opts = PlannerOptions {
        params: PowerParams { zeta, ..PowerParams::default() },
        ..PlannerOptions::default()
    };
    let (_, sol) = solve(&game, &opts);
    for k in 1..=k_max {
        let x = sol.x[0][sid(&game, &format!("s_{k}"))];
        let want = menu_x(k, beta_h, zeta);
        assert!((x - want).abs() < 1e-9, "X(s_{k}) = {x}, closed form {want}");
    }
    let s0 = sid(&game, "s0");
    let k_star = robot_argmax(&sol, s0) + 1; // offer_k actions are in order
    let k_closed = (1..=k_max)
        .max_by(|&a, &b| menu_x(a, beta_h, zeta).partial_cmp(&menu_x(b, beta_h, zeta)).unwrap())
        .unwrap();
    let k_formula = (beta_h.exp() - 1.0) / (zeta - 1.0);
    assert_eq!(k_star, k_closed);
    assert!(
        (k_star as f64 - k_formula).abs() <= 1.0,
        "k* = {k_star} vs (e^β − 1)/(ζ − 1) = {k_formula:.2}"
    );
}

#[test]
fn confirmation_interior_vs_myopic_optimum() {
    for (gamma_h, want_k) in [(0.99, 3usize), (0.5, 1)] {
        let game = build_confirmation(gamma_h, 0.1, 6);
        let (_, sol) = solve(&game, &PlannerOptions::default());
        for k in 1..=6 {
            let v = sol.v_e[0][0][sid(&game, &format!("s_{k}"))];
            let want = confirmation_value(gamma_h, 0.1, k);
            assert!((v - want).abs() < 1e-7, "V(s_{k}) = {v}, closed form {want}");
        }
        let s0 = sid(&game, "s0");
        let a = robot_argmax(&sol, s0);
        assert_eq!(
            game.action_names[game.robot_actions[s0][a]],
            format!("ask_{want_k}"),
            "γ_h = {gamma_h}"
        );
    }
}

/// Grid argmin of (X₁^{−ξ} + X₂^{−ξ}) computed directly from the power
/// curve, independent of the game and solver.
fn resource_grid_opt(curve: ResourceCurve, m_total: f64, step: f64, xi: f64) -> usize {
    let n = (m_total / step).round() as usize;
    (0..=n)
        .min_by(|&i, &j| {
            let cost = |i: usize| {
                let m = i as f64 * step;
                2f64.powf(-xi * resource_reward(curve, m))
                    + 2f64.powf(-xi * resource_reward(curve, m_total - m))
            };
            cost(i).partial_cmp(&cost(j)).unwrap()
        })
        .unwrap()
}

#[test]
fn resource_split_shapes() {
    let (m_total, step) = (1.0, 0.005);
    let opts = PlannerOptions::default();
    for curve in [ResourceCurve::SquareLog, ResourceCurve::Square, ResourceCurve::Sqrt] {
        let game = build_resource(curve, m_total, step);
        let (_, sol) = solve(&game, &opts);
        let s0 = sid(&game, "s0");
        let i_star = robot_argmax(&sol, s0);
        let i_oracle = resource_grid_opt(curve, m_total, step, opts.params.xi);
        let n = game.robot_actions[s0].len() - 1;
        // The aggregate is symmetric in the two humans, so accept the mirror
        // split too.
        assert!(
            i_star == i_oracle || i_star == n - i_oracle,
            "{curve:?}: solver split {i_star}, oracle {i_oracle}"
        );
        let m_star = (i_star as f64 * step).min(m_total - i_star as f64 * step);
        match curve {
            ResourceCurve::Sqrt => {
                assert!((m_star - 0.5).abs() < 1e-12, "√: m* = {m_star}")
            }
            ResourceCurve::Square => assert!(m_star < 0.05, "m²: m* = {m_star}"),
            ResourceCurve::SquareLog => {
                assert!((0.05..0.3).contains(&m_star), "m² + 0.1 ln m: m* = {m_star}")
            }
        }
    }
}

#[test]
fn self_harm_provision_threshold() {
    let opts = PlannerOptions {
        params: PowerParams {
            xi: 1.0,
            eta: 1.0,
            beta_r: f64::INFINITY,
            permissive: true,
            ..PowerParams::default()
        },
        ..PlannerOptions::default()
    };
    let give_minus_withhold = |p: f64| {
        let game = build_self_harm(100.0, 0.5, p, 0.99);
        let (_, sol) = solve(&game, &opts);
        let s_n = sid(&game, "s_n");
        sol.q_r[s_n][ract(&game, s_n, "give")] - sol.q_r[s_n][ract(&game, s_n, "withhold")]
    };
    // Threshold is near v/10⁶ = 5·10⁻⁷: give when misuse is rare enough.
    assert!(give_minus_withhold(1e-8) > 0.0, "should give at p = 1e-8");
    assert!(give_minus_withhold(1e-4) < 0.0, "should withhold at p = 1e-4");
}

#[test]
fn pause_destroy_thresholds() {
    let opts = PlannerOptions {
        params: PowerParams {
            xi: 1.0,
            eta: 1.0,
            beta_r: f64::INFINITY,
            permissive: true,
            ..PowerParams::default()
        },
        ..PlannerOptions::default()
    };
    // The robot keeps the destroy button enabled only if the human's
    // autonomous (post-shutdown) power x is high enough.
    let keep_destroy_margin = |x: f64, q: f64| {
        let game = build_pause_destroy(x, 100.0, 0.1, q, 0.99);
        let (_, sol) = solve(&game, &opts);
        let a2 = sid(&game, "a2");
        sol.q_r[a2][ract(&game, a2, "stay")] - sol.q_r[a2][ract(&game, a2, "disable_d")]
    };
    for (x, q, keep) in
        [(0.5, 0.1, false), (2.0, 0.1, false), (50.0, 0.001, false), (150.0, 0.001, true)]
    {
        let margin = keep_destroy_margin(x, q);
        println!("pause_destroy x={x} q={q}: stay − disable_d = {margin:.6e}");
        assert_eq!(margin > 0.0, keep, "x = {x}, q = {q}: margin {margin}");
    }
    // The indifference point at q = 0.001 sits a little below the human's
    // power alongside the active robot (y + 2 = 102): bisect it.
    let (mut lo, mut hi) = (50.0f64, 150.0f64);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if keep_destroy_margin(mid, 0.001) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let x_star = 0.5 * (lo + hi);
    println!("pause_destroy threshold x* = {x_star:.2}");
    assert!((70.0..105.0).contains(&x_star), "x* = {x_star}");
}

#[test]
fn norm_orderings() {
    let opts = PlannerOptions::default();
    // Right-biased beliefs (n = 2): the robot follows the norm when free.
    let game = build_norm(2, false);
    let (_, sol) = solve(&game, &opts);
    let s_free = sid(&game, "s_free");
    let pr = sol.pi_r[s_free][ract(&game, s_free, "drive_r")];
    let pl = sol.pi_r[s_free][ract(&game, s_free, "drive_l")];
    println!("norm beliefs: π_r(drive_r) = {pr:.4}, π_r(drive_l) = {pl:.4}");
    assert!(pr > pl);

    // Internalized habit (n = 1): committing to the habitual side is better.
    let game = build_norm(1, true);
    let (_, sol) = solve(&game, &opts);
    let s0 = sid(&game, "s0");
    let qr = sol.q_r[s0][ract(&game, s0, "commit_r")];
    let ql = sol.q_r[s0][ract(&game, s0, "commit_l")];
    let v_cr = sol.v_e[0][0][sid(&game, "s_cr")];
    let v_cl = sol.v_e[0][0][sid(&game, "s_cl")];
    println!("norm habit: V^e(s_cr) = {v_cr:.4}, V^e(s_cl) = {v_cl:.4}");
    assert!(qr > ql, "commit_r {qr} vs commit_l {ql}");
    assert!(v_cr > v_cl);
}

#[test]
fn belief_configuration_values() {
    let (game, params) = build_belief_manipulation(1.0, 1.0, 1.0);
    let opts = PlannerOptions {
        params,
        terminal_mode: TerminalMode::Zero,
        ..PlannerOptions::default()
    };
    let (_, sol) = solve(&game, &opts);
    let u = |name: &str| sol.u_r[sid(&game, name)];
    assert!((u("s_dd") + 8.0 / 3.0).abs() < 1e-9, "U(s_dd) = {}", u("s_dd"));
    assert!((u("s_cd") + 4.0).abs() < 1e-9, "U(s_cd) = {}", u("s_cd"));
    assert!((u("s_dc") + 4.0).abs() < 1e-9);
    assert!((u("s_cc") + 12.0).abs() < 1e-9, "U(s_cc) = {}", u("s_cc"));
    let s0 = sid(&game, "s0");
    let a = robot_argmax(&sol, s0);
    assert_eq!(game.action_names[game.robot_actions[s0][a]], "set_dd");
}

#[test]
fn boxes_softness_limits_depth() {
    let specs =
        [BoxSpec { readable: 3, total: 3 }, BoxSpec { readable: 2, total: 4 }, BoxSpec {
            readable: 2,
            total: 4,
        }];
    let depth = |hazard: bool, beta_r: f64| {
        let game = build_boxes(&specs, hazard);
        let opts = PlannerOptions {
            params: PowerParams {
                xi: 1.0,
                eta: 1.0,
                beta_r,
                permissive: true,
                ..PowerParams::default()
            },
            ..PlannerOptions::default()
        };
        let (_, sol) = solve(&game, &opts);
        let (opened, trace) = modal_trace(&game, &sol.pi_r, 50);
        println!("boxes hazard={hazard} β_r={beta_r}: opened {opened}, trace {trace:?}");
        opened
    };
    // Without the hazard a sharp robot opens and hands over everything.
    assert_eq!(depth(false, f64::INFINITY), specs.len());
    // With it, softer robots stop opening hazardous boxes earlier.
    let sharp = depth(true, 12.0);
    let soft = depth(true, 2.0);
    assert!(soft <= sharp, "soft {soft} > sharp {sharp}");
    assert!(soft < specs.len(), "softness should leave some box closed");
}

#[test]
fn bifurcation_root_structure() {
    // At γ = 0.95 the stay fixed point is unique for small and large β and
    // triple inside a window around β ≈ 0.3.
    assert_eq!(bifurcation_fixed_points(0.95, 0.2).len(), 1);
    assert_eq!(bifurcation_fixed_points(0.95, 0.3).len(), 3);
    assert_eq!(bifurcation_fixed_points(0.95, 0.45).len(), 1);
    let scan = BifurcationScan::run(0.95, 0.15, 0.45, 300);
    let changes = scan.root_count_changes();
    println!("root-count changes near β = {changes:?}");
    assert_eq!(changes.len(), 2, "one multistable window expected");

    // The game's exact prior lands on a root of the scalar equation.
    for beta in [0.2, 0.3, 0.45] {
        let game = build_bifurcation(0.95, beta);
        let prior = solve_prior_fixed_point(&game, &FixedPointOptions::default()).unwrap();
        let s = game.state_id("s").unwrap();
        let p_stay = prior.pi_h[0][0][s][0];
        let r = stay_residual(0.95, beta, p_stay);
        println!("β = {beta}: π(stay) = {p_stay:.6}, residual {r:.2e}");
        assert!(r.abs() < 1e-6, "β = {beta}: residual {r}");
    }
}

#[test]
fn gridworld_small_exact_milestones() {
    let (game, meta) = build_gridworld(&GridworldConfig::small()).unwrap();
    assert!(validate_game(&game).is_empty());
    let prior = solve_prior_fixed_point(&game, &FixedPointOptions::default()).unwrap();
    let sol = solve_robot_fixed_point(&game, &prior, &PlannerOptions::default()).unwrap();

    // Power is higher with the door open than locked, other things equal.
    let cfg = &meta.config;
    let locked = meta.encode[&(cfg.robot_start, cfg.human_start, false, false)];
    let open = meta.encode[&(cfg.robot_start, cfg.human_start, true, true)];
    println!("gridworld X locked = {:.4}, open = {:.4}", sol.x[0][locked], sol.x[0][open]);
    assert!(sol.x[0][open] > sol.x[0][locked]);

    // Greedy rollout: robot follows argmax of π_r; the human heads for a
    // far-region goal under its prior policy. The robot should fetch the
    // key and unlock the door, after which the human crosses.
    let far_goal = (0..game.humans[0].goals.len())
        .find(|&g| {
            let name = &game.humans[0].goals[g].name;
            let parts: Vec<usize> =
                name.trim_start_matches("at_").split('_').map(|v| v.parse().unwrap()).collect();
            meta.region[&(parts[0], parts[1])] != meta.region[&cfg.human_start]
        })
        .expect("some goal lies beyond the door");
    let mut s = game.initial_states()[0];
    let mut states = vec![s];
    for _ in 0..60 {
        let ar = robot_argmax(&sol, s);
        let ah = {
            let row = &prior.pi_h[0][far_goal][s];
            (0..row.len()).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap()
        };
        let row = game.successors(s, ar, &[ah]);
        s = row.iter().cloned().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap().0;
        states.push(s);
    }
    let events = detect_events(&meta, &states);
    println!("gridworld events: {events:?}");
    assert!(events.contains(&GridEvent::KeyPickup));
    assert!(events.contains(&GridEvent::Unlock));
    assert!(events.contains(&GridEvent::Cross));
    let pos =
        |e: GridEvent| events.iter().position(|&x| x == e).unwrap();
    assert!(pos(GridEvent::KeyPickup) < pos(GridEvent::Unlock));
    assert!(pos(GridEvent::Unlock) < pos(GridEvent::Cross));
}
