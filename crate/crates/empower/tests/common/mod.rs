//! Shared test helpers: a seeded random acyclic game generator.

use empower::game::{GameBuilder, StochasticGame};
use rand::Rng;

/// Plain-data description of a layered acyclic game, kept so variants (e.g.
/// with a restricted robot action set at one state) can be rebuilt.
#[derive(Debug, Clone)]
pub struct Recipe {
    pub n_states: usize,
    pub n_humans: usize,
    /// Robot/human action counts per state; terminals get none.
    pub robot_acts: Vec<usize>,
    pub human_acts: Vec<Vec<usize>>,
    /// `rows[s][joint]` over joints in builder order (robot-major), each a
    /// distribution over strictly later states.
    pub rows: Vec<Vec<Vec<(usize, f64)>>>,
    /// Per human: (gamma, nu, beta).
    pub humans: Vec<(f64, f64, f64)>,
    /// `goals[h]` is a list of goals, each a weighted member list.
    pub goals: Vec<Vec<Vec<(usize, f64)>>>,
}

/// Random layered DAG game: states are ordered, transitions only move to
/// strictly later states, the last state is terminal.
pub fn random_recipe(rng: &mut impl Rng) -> Recipe {
    let n_states = rng.gen_range(4..=10);
    let n_humans = rng.gen_range(1..=2);
    let mut robot_acts = vec![0usize; n_states];
    let mut human_acts = vec![vec![0usize; n_humans]; n_states];
    let mut rows = vec![Vec::new(); n_states];
    for s in 0..n_states - 1 {
        robot_acts[s] = rng.gen_range(1..=3);
        for h in 0..n_humans {
            human_acts[s][h] = rng.gen_range(1..=3);
        }
        let joints = robot_acts[s] * human_acts[s].iter().product::<usize>();
        for _ in 0..joints {
            // 1-2 targets strictly after s, with an exactly normalized row.
            let t1 = rng.gen_range(s + 1..n_states);
            let row = if rng.gen_bool(0.5) {
                vec![(t1, 1.0)]
            } else {
                let t2 = rng.gen_range(s + 1..n_states);
                if t2 == t1 {
                    vec![(t1, 1.0)]
                } else {
                    let p = rng.gen_range(0.05..0.95);
                    vec![(t1, p), (t2, 1.0 - p)]
                }
            };
            rows[s].push(row);
        }
    }
    let humans: Vec<(f64, f64, f64)> = (0..n_humans)
        .map(|_| {
            let gamma = rng.gen_range(0.5..0.99);
            let nu = rng.gen_range(0.0..0.5);
            let beta = [0.5, 1.0, 2.0, 5.0][rng.gen_range(0..4)];
            (gamma, nu, beta)
        })
        .collect();
    let goals: Vec<Vec<Vec<(usize, f64)>>> = (0..n_humans)
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| {
                    // Always include the terminal state so every goal is
                    // achievable from everywhere (X_h stays positive).
                    let mut members: Vec<(usize, f64)> =
                        vec![(n_states - 1, rng.gen_range(0.2..=1.0))];
                    if rng.gen_bool(0.5) {
                        let s = rng.gen_range(n_states / 2..n_states - 1);
                        members.push((s, rng.gen_range(0.2..=1.0)));
                    }
                    members
                })
                .collect()
        })
        .collect();
    Recipe { n_states, n_humans, robot_acts, human_acts, rows, humans, goals }
}

/// Build the game, optionally dropping robot action `drop.1` at state
/// `drop.0` (and the kernel rows that used it).
pub fn build_recipe(r: &Recipe, drop: Option<(usize, usize)>) -> StochasticGame {
    let mut b = GameBuilder::new("random");
    b.gamma_r(0.9);
    b.relax_mutual_unreachability();
    b.relax_goal_cover();
    for (h, &(gamma, nu, beta)) in r.humans.iter().enumerate() {
        b.human(&format!("u{h}"), gamma, nu, beta);
    }
    let sname = |s: usize| format!("s{s}");
    b.initial_state(&sname(0));
    for s in 1..r.n_states - 1 {
        b.state(&sname(s));
    }
    b.terminal_state(&sname(r.n_states - 1));
    for s in 0..r.n_states - 1 {
        let keep: Vec<usize> = (0..r.robot_acts[s])
            .filter(|&a| drop != Some((s, a)))
            .collect();
        let racts: Vec<String> = keep.iter().map(|a| format!("r{a}")).collect();
        let ract_refs: Vec<&str> = racts.iter().map(String::as_str).collect();
        b.robot_acts(&sname(s), &ract_refs);
        for h in 0..r.n_humans {
            let hacts: Vec<String> = (0..r.human_acts[s][h]).map(|a| format!("h{a}")).collect();
            let hact_refs: Vec<&str> = hacts.iter().map(String::as_str).collect();
            b.human_acts(&sname(s), h, &hact_refs);
        }
        // Joint index in the full (undropped) action grid, robot-major.
        let human_prod: usize = r.human_acts[s].iter().product();
        for (k, &ar) in keep.iter().enumerate() {
            let _ = k;
            for f in 0..human_prod {
                let mut idx = Vec::with_capacity(r.n_humans);
                let mut rest = f;
                for h in (0..r.n_humans).rev() {
                    idx.push(rest % r.human_acts[s][h]);
                    rest /= r.human_acts[s][h];
                }
                idx.reverse();
                let row = &r.rows[s][ar * human_prod + f];
                let targets: Vec<(String, f64)> =
                    row.iter().map(|&(t, p)| (sname(t), p)).collect();
                let target_refs: Vec<(&str, f64)> =
                    targets.iter().map(|(t, p)| (t.as_str(), *p)).collect();
                let hnames: Vec<String> = idx.iter().map(|a| format!("h{a}")).collect();
                let hname_refs: Vec<&str> = hnames.iter().map(String::as_str).collect();
                b.transition(&sname(s), &format!("r{ar}"), &hname_refs, &target_refs);
            }
        }
    }
    for (h, goals) in r.goals.iter().enumerate() {
        for (g, members) in goals.iter().enumerate() {
            let named: Vec<(String, f64)> =
                members.iter().map(|&(s, w)| (sname(s), w)).collect();
            let refs: Vec<(&str, f64)> = named.iter().map(|(s, w)| (s.as_str(), *w)).collect();
            b.goal(h, &format!("g{g}"), &refs);
        }
    }
    b.build().expect("random recipe builds")
}
