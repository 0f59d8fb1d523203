//! Boxes game: the robot opens boxes in order and may hand each opened box's
//! readable switchboard to the human; every handed readable switch adds one
//! to the human's power (base 1). In the hazard variant, a box whose
//! switchboard also has robot-only switches permanently adds a "flip the
//! dangerous switch" action while open — a soft (β_r < ∞) robot then takes
//! it with some probability every step, so opening marginal hazardous boxes
//! stops being worth it; the smaller β_r, the earlier the robot stops.

use crate::game::{GameBuilder, StochasticGame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    /// Switches the human can read and use once handed over (k_i).
    pub readable: usize,
    /// Total switches; any excess over `readable` is robot-only and
    /// hazardous (n_i ≥ k_i).
    pub total: usize,
}

const DEAD_X: f64 = 0.25;

fn state_name(opened: usize, mask: usize) -> String {
    format!("o{opened}_m{mask}")
}

pub fn build_boxes(specs: &[BoxSpec], hazard: bool) -> StochasticGame {
    assert!(!specs.is_empty() && specs.len() <= 6);
    for s in specs {
        assert!(s.total >= s.readable);
    }
    let n = specs.len();
    let mut b = GameBuilder::new(if hazard { "boxes_hazard" } else { "boxes" });
    let h = b.human("h", 0.99, 1.0, 0.0);
    b.gamma_r(0.95);
    b.relax_mutual_unreachability();

    // States: number of opened boxes (prefix) plus the handed-over subset.
    let mut names = Vec::new();
    for opened in 0..=n {
        for mask in 0..(1usize << opened) {
            let name = state_name(opened, mask);
            if opened == 0 && mask == 0 {
                b.initial_state(&name);
            } else {
                b.state(&name);
            }
            names.push((opened, mask, name));
        }
    }
    if hazard {
        b.terminal_state("dead");
    }

    for (opened, mask, name) in &names {
        let mut acts = vec!["idle".to_string()];
        if *opened < n {
            acts.push("open".to_string());
        }
        for i in 0..*opened {
            if mask & (1 << i) == 0 {
                acts.push(format!("hand_{}", i + 1));
            }
        }
        if hazard {
            for i in 0..*opened {
                if specs[i].total > specs[i].readable {
                    acts.push(format!("flip_{}", i + 1));
                }
            }
        }
        let act_refs: Vec<&str> = acts.iter().map(|s| s.as_str()).collect();
        b.robot_acts(name, &act_refs);
        for a in &acts {
            let target = match a.as_str() {
                "idle" => name.clone(),
                "open" => state_name(opened + 1, *mask),
                _ => {
                    if let Some(i) = a.strip_prefix("hand_") {
                        let i: usize = i.parse().unwrap();
                        state_name(*opened, mask | (1 << (i - 1)))
                    } else {
                        "dead".to_string()
                    }
                }
            };
            b.rtransition(name, a, &[(&target, 1.0)]);
        }
        let x = 1.0
            + (0..*opened)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| specs[i].readable as f64)
                .sum::<f64>();
        b.inject_x(h, name, x);
    }
    if hazard {
        b.inject_x(h, "dead", DEAD_X);
    }

    let members: Vec<(String, f64)> = names
        .iter()
        .map(|(_, _, name)| (name.clone(), 1.0))
        .chain(hazard.then(|| ("dead".to_string(), 1.0)))
        .collect();
    let member_refs: Vec<(&str, f64)> = members.iter().map(|(s, w)| (s.as_str(), *w)).collect();
    b.goal(h, "live", &member_refs);

    b.build().expect("boxes game is well-formed")
}

/// Number of boxes opened along the modal (argmax-probability) trajectory
/// from the start state before the policy settles into idling, and the
/// action trace taken. Ties are broken toward the lexicographically first
/// action name; traversal stops after `max_steps` or on reaching a terminal
/// or previously visited state.
pub fn modal_trace(
    game: &StochasticGame,
    pi_r: &[Vec<f64>],
    max_steps: usize,
) -> (usize, Vec<String>) {
    let mut s = game.initial_states()[0];
    let mut opened = 0usize;
    let mut trace = Vec::new();
    let mut seen = vec![false; game.n_states()];
    for _ in 0..max_steps {
        if game.states[s].terminal || seen[s] {
            break;
        }
        seen[s] = true;
        let row = &pi_r[s];
        let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let a = (0..row.len())
            .filter(|&a| row[a] == best)
            .min_by_key(|&a| game.action_names[game.robot_actions[s][a]].clone())
            .unwrap();
        let name = game.action_names[game.robot_actions[s][a]].clone();
        if name == "open" {
            opened += 1;
        }
        if name == "idle" {
            break;
        }
        trace.push(name);
        // Deterministic robot-driven moves: take the most likely successor.
        let profile: Vec<usize> = vec![0; game.n_humans()];
        let row = game.successors(s, a, &profile);
        s = row
            .iter()
            .cloned()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(t, _)| t)
            .unwrap();
    }
    (opened, trace)
}
