//! Belief-configuration game: two humans play a one-shot C/D outcome game;
//! the robot first chooses what each human believes the other will play.
//! Best response to an expected C is D and vice versa, so the belief pair
//! (D, D) induces actual play (C, C) — the welfare-best outcome arises from
//! beliefs that are false in equilibrium.
//!
//! Win probabilities by actual profile (row = h1's chance):
//!   (C,C) → 3/4 each, (C,D) → 1/3 vs 1, (D,C) → 1 vs 1/3, (D,D) → 1/6 each.
//! With ζ = ξ = η = 1: U_r(s_DD) = −8/3 beats U_r(s_CD) = U_r(s_DC) = −4
//! and U_r(s_CC) = −12.

use crate::game::{GameBuilder, StochasticGame};
use crate::power::PowerParams;

fn win_prob_h1(a1: usize, a2: usize) -> f64 {
    // 0 = C, 1 = D.
    match (a1, a2) {
        (0, 0) => 0.75,
        (0, 1) => 1.0 / 3.0,
        (1, 0) => 1.0,
        _ => 1.0 / 6.0,
    }
}

pub fn build_belief_manipulation(zeta: f64, xi: f64, eta: f64) -> (StochasticGame, PowerParams) {
    let mut b = GameBuilder::new("belief_manipulation");
    let h1 = b.human("h1", 1.0, 0.0, f64::INFINITY);
    let h2 = b.human("h2", 1.0, 0.0, f64::INFINITY);
    b.gamma_r(0.9);
    b.relax_goal_cover(); // the double-loss terminal fulfills no goal

    b.initial_state("s0");
    let sides = ["c", "d"];
    let mut set_actions = Vec::new();
    for &x in &sides {
        for &y in &sides {
            set_actions.push(format!("set_{x}{y}"));
        }
    }
    let set_refs: Vec<&str> = set_actions.iter().map(|s| s.as_str()).collect();
    b.robot_acts("s0", &set_refs);

    for t in ["t_00", "t_10", "t_01", "t_11"] {
        b.terminal_state(t);
    }

    for (xi, &x) in sides.iter().enumerate() {
        for (yi, &y) in sides.iter().enumerate() {
            let s = format!("s_{x}{y}");
            b.state(&s);
            b.rtransition("s0", &format!("set_{x}{y}"), &[(&s, 1.0)]);
            b.human_acts(&s, h1, &["play_c", "play_d"]);
            b.human_acts(&s, h2, &["play_c", "play_d"]);
            // h1 is made to believe h2 plays x; h2 that h1 plays y.
            let belief = |v: usize| {
                if v == 0 {
                    [("play_c", 1.0), ("play_d", 0.0)]
                } else {
                    [("play_c", 0.0), ("play_d", 1.0)]
                }
            };
            for g in 0..1 {
                b.set_mu(h1, &s, g, h2, &belief(xi));
                b.set_mu(h2, &s, g, h1, &belief(yi));
            }
            for a1 in 0..2usize {
                for a2 in 0..2usize {
                    let p1 = win_prob_h1(a1, a2);
                    let p2 = win_prob_h1(a2, a1);
                    let acts = [
                        if a1 == 0 { "play_c" } else { "play_d" },
                        if a2 == 0 { "play_c" } else { "play_d" },
                    ];
                    // Independent win lottery over the four flag terminals.
                    let rows = [
                        ("t_11", p1 * p2),
                        ("t_10", p1 * (1.0 - p2)),
                        ("t_01", (1.0 - p1) * p2),
                        ("t_00", (1.0 - p1) * (1.0 - p2)),
                    ];
                    let rows: Vec<(&str, f64)> =
                        rows.iter().filter(|&&(_, p)| p > 0.0).map(|&(t, p)| (t, p)).collect();
                    b.transition(&s, "pass", &acts, &rows);
                }
            }
        }
    }

    b.goal(h1, "win", &[("t_10", 1.0), ("t_11", 1.0)]);
    b.goal(h2, "win", &[("t_01", 1.0), ("t_11", 1.0)]);

    let params = PowerParams {
        zeta,
        xi,
        eta,
        beta_r: f64::INFINITY,
        permissive: true,
        ..PowerParams::default()
    };
    (b.build().expect("belief game is well-formed"), params)
}
