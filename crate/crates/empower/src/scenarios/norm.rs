//! Traffic-norm game: everyone simultaneously keeps left or right; every
//! pair of agents (robot included) on opposite sides crashes, halving the
//! crashing human's outcome weight per collision. The right-hand norm can
//! live in beliefs (humans expect others to keep right, `internalized =
//! false`) or in habits (π⁰ biased right with partial habit weight ν,
//! `internalized = true`). The robot may also commit to a side up front.

use crate::game::{GameBuilder, StochasticGame};

const MU_BIAS: f64 = 0.9;
const PI0_BIAS: f64 = 0.7;
const NU: f64 = 0.5;
const CRASH_FACTOR: f64 = 0.5;

pub fn build_norm(n_humans: usize, internalized: bool) -> StochasticGame {
    assert!((1..=2).contains(&n_humans));
    let mut b = GameBuilder::new(if internalized { "norm_habit" } else { "norm_belief" });
    let beta_h = 2.0;
    let nu = if internalized { NU } else { 0.0 };
    let humans: Vec<usize> =
        (0..n_humans).map(|i| b.human(&format!("h{}", i + 1), 1.0, nu, beta_h)).collect();
    b.gamma_r(0.9);

    b.initial_state("s0");
    b.robot_acts("s0", &["commit_l", "commit_r", "free"]);
    for s in ["s_cl", "s_cr", "s_free"] {
        b.state(s);
    }
    b.rtransition("s0", "commit_l", &[("s_cl", 1.0)]);
    b.rtransition("s0", "commit_r", &[("s_cr", 1.0)]);
    b.rtransition("s0", "free", &[("s_free", 1.0)]);

    // Terminals by the side pattern (robot side, then each human's side).
    let patterns: Vec<Vec<usize>> = {
        let mut out = Vec::new();
        for bits in 0..(1usize << (n_humans + 1)) {
            out.push((0..=n_humans).map(|i| (bits >> i) & 1).collect());
        }
        out
    };
    let side = |v: usize| if v == 0 { "l" } else { "r" };
    for pat in &patterns {
        let name: String =
            std::iter::once("t".to_string()).chain(pat.iter().map(|&v| side(v).to_string())).collect::<Vec<_>>().join("_");
        b.terminal_state(&name);
    }
    let term_name = |pat: &[usize]| -> String {
        std::iter::once("t".to_string())
            .chain(pat.iter().map(|&v| side(v).to_string()))
            .collect::<Vec<_>>()
            .join("_")
    };

    for (state, robot_sides) in
        [("s_cl", vec![0usize]), ("s_cr", vec![1]), ("s_free", vec![0, 1])]
    {
        let racts: Vec<String> = robot_sides.iter().map(|&v| format!("drive_{}", side(v))).collect();
        let ract_refs: Vec<&str> = racts.iter().map(|s| s.as_str()).collect();
        b.robot_acts(state, &ract_refs);
        for &h in &humans {
            b.human_acts(state, h, &["go_l", "go_r"]);
        }
        // Enumerate all joint choices.
        for &rv in &robot_sides {
            for bits in 0..(1usize << n_humans) {
                let hvs: Vec<usize> = (0..n_humans).map(|i| (bits >> i) & 1).collect();
                let mut pat = vec![rv];
                pat.extend(&hvs);
                let target = term_name(&pat);
                let hacts: Vec<String> = hvs.iter().map(|&v| format!("go_{}", side(v))).collect();
                let hact_refs: Vec<&str> = hacts.iter().map(|s| s.as_str()).collect();
                b.transition(state, &format!("drive_{}", side(rv)), &hact_refs, &[(&target, 1.0)]);
            }
        }
    }
    b.commitment("s_cl", "s_free", &["drive_l"]);
    b.commitment("s_cr", "s_free", &["drive_r"]);

    // One goal per human: arrive, weighted down by collisions suffered.
    for (hi, &h) in humans.iter().enumerate() {
        let members: Vec<(String, f64)> = patterns
            .iter()
            .map(|pat| {
                let own = pat[hi + 1];
                let crashes =
                    pat.iter().enumerate().filter(|&(j, &v)| j != hi + 1 && v != own).count();
                (term_name(pat), CRASH_FACTOR.powi(crashes as i32))
            })
            .collect();
        let member_refs: Vec<(&str, f64)> = members.iter().map(|(s, w)| (s.as_str(), *w)).collect();
        b.goal(h, "arrive", &member_refs);
    }

    for (hi, &h) in humans.iter().enumerate() {
        for state in ["s_cl", "s_cr", "s_free"] {
            if internalized {
                b.set_pi0(h, state, 0, &[("go_l", 1.0 - PI0_BIAS), ("go_r", PI0_BIAS)]);
            } else {
                // Right-biased beliefs about each other human.
                for (hj, &other) in humans.iter().enumerate() {
                    if hj != hi {
                        b.set_mu(h, state, 0, other, &[("go_l", 1.0 - MU_BIAS), ("go_r", MU_BIAS)]);
                    }
                }
            }
        }
    }

    b.build().expect("norm game is well-formed")
}
