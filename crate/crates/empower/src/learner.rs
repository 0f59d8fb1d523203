//! Phase 2: learn the robot's soft power-maximizing policy from sampled
//! rollouts against humans following their (fixed) goal-conditioned priors.
//!
//! The learner keeps attainment tables V̂^e_h(s, g) updated by TD(0) along
//! the active goal, derives X̂_h(s) = Σ_g V̂^e(s,g)^ζ from them, and feeds
//! the robot's critic the intrinsic reward U_r computed on the fly from the
//! current X̂ tables. The robot's Q is trained by expected SARSA against a
//! slowly refreshed target policy (two-time-scale), or by one-step
//! actor–critic. Behavior adds a count-decayed optimism bonus to Q before
//! sampling; the bonus never enters the learned tables.

use crate::game::{StateId, StochasticGame};
use crate::power::{intrinsic_reward, power_law_policy, PowerParams};
use crate::prior::HumanPrior;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnMode {
    /// Expected SARSA toward a slow target table (the tabular analogue of a
    /// target network).
    ExpectedSarsa,
    /// One-step actor–critic on state values with softmax-in-logits actor.
    ActorCritic,
}

#[derive(Debug, Clone)]
pub struct LearnSchedule {
    pub mode: LearnMode,
    pub episodes: usize,
    pub max_steps: usize,
    /// Learning rate for all tables.
    pub alpha: f64,
    /// Power/aggregation parameters (ζ for X̂, ξ/η/ε_X for U_r, and the
    /// final-policy β_r).
    pub params: PowerParams,
    /// Robot rationality anneal (geometric) from .0 to .1 across all steps.
    pub beta_r: (f64, f64),
    /// Human exploration rate anneal (linear over episodes).
    pub eps_h: (f64, f64),
    /// Robot exploration rate anneal (linear over episodes).
    pub eps_r: (f64, f64),
    /// Count-based behavior optimism: bonus(s, a) = init · decay^visits.
    pub bonus_init: f64,
    pub bonus_decay: f64,
    /// Env steps between refreshes of the slow target/actor tables.
    pub policy_update_period: usize,
    /// Record the visited state ids of every episode in its trace.
    pub record_states: bool,
}

impl Default for LearnSchedule {
    fn default() -> Self {
        LearnSchedule {
            mode: LearnMode::ExpectedSarsa,
            episodes: 2000,
            max_steps: 100,
            alpha: 0.1,
            params: PowerParams { eps_x: 0.01, ..PowerParams::default() },
            beta_r: (0.1, 5.0),
            eps_h: (0.8, 0.1),
            eps_r: (1.0, 0.01),
            bonus_init: 50.0,
            bonus_decay: 0.995,
            policy_update_period: 50,
            record_states: false,
        }
    }
}

/// Per-episode learning metrics (one NDJSON line each).
#[derive(Debug, Clone, Serialize)]
pub struct EpisodeTrace {
    pub episode: usize,
    /// Sum of intrinsic rewards received.
    pub ret: f64,
    /// Mean absolute robot TD error.
    pub td: f64,
    pub beta_r: f64,
    pub eps_r: f64,
    pub eps_h: f64,
    /// Visited states (start state first); empty unless recording is on.
    pub states: Vec<StateId>,
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    /// Learned robot value table, `q_r[s]` over A_r(s).
    pub q_r: Vec<Vec<f64>>,
    /// Final robot policy (power-law at the target β_r, or the actor).
    pub pi_r: Vec<Vec<f64>>,
    /// Attainment estimates `v_e[h][g][s]`.
    pub v_e: Vec<Vec<Vec<f64>>>,
    /// Power estimates `x[h][s]`.
    pub x: Vec<Vec<f64>>,
    pub traces: Vec<EpisodeTrace>,
    /// Number of V̂^e updates that landed above 1 + α (estimates escaping
    /// the attainment range; a diagnostic for divergence or bad kernels).
    pub excursions: usize,
}

/// Traces as newline-delimited JSON.
pub fn traces_to_ndjson(traces: &[EpisodeTrace]) -> String {
    let mut out = String::new();
    for t in traces {
        out.push_str(&serde_json::to_string(t).expect("trace serializes"));
        out.push('\n');
    }
    out
}

/// Scalar metrics as CSV (without the state lists).
pub fn traces_to_csv(traces: &[EpisodeTrace]) -> String {
    let mut out = String::from("episode,ret,td,beta_r,eps_r,eps_h\n");
    for t in traces {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.episode, t.ret, t.td, t.beta_r, t.eps_r, t.eps_h
        ));
    }
    out
}

/// X̂_h(s) from a row of per-goal attainment estimates (negative estimates
/// clamped out before the power).
pub fn x_h_estimator(v_e_row: &[f64], zeta: f64) -> f64 {
    v_e_row.iter().map(|&v| v.max(0.0).powf(zeta)).sum()
}

/// Count-decayed optimism added to Q for behavior only.
pub fn exploration_bonus(init: f64, decay: f64, visits: u64) -> f64 {
    init * decay.powf(visits as f64)
}

fn linear(from: f64, to: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        to
    } else {
        from + (to - from) * i as f64 / (n - 1) as f64
    }
}

fn geometric(from: f64, to: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        to
    } else {
        from * (to / from).powf(i as f64 / (n - 1) as f64)
    }
}

fn sample_dist<R: Rng>(rng: &mut R, p: &[f64]) -> usize {
    let mut u: f64 = rng.gen();
    for (i, &pi) in p.iter().enumerate() {
        u -= pi;
        if u <= 0.0 {
            return i;
        }
    }
    p.len() - 1
}

fn sample_kernel<R: Rng>(rng: &mut R, row: &[(StateId, f64)]) -> StateId {
    let mut u: f64 = rng.gen();
    for &(t, p) in row {
        u -= p;
        if u <= 0.0 {
            return t;
        }
    }
    row.last().expect("kernel row nonempty").0
}

/// Softmax of raw logits (β absorbed into the logits themselves).
fn softmax_logits(l: &[f64]) -> Vec<f64> {
    let m = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = l.iter().map(|&x| (x - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|&x| x / z).collect()
}

/// Learn the robot tables from rollouts. Deterministic for a fixed
/// (game, prior, schedule, seed).
pub fn phase2_learn(
    game: &StochasticGame,
    prior: &HumanPrior,
    schedule: &LearnSchedule,
    seed: u64,
) -> LearnResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = game.n_states();
    let nh = game.n_humans();
    let gamma_r = game.gamma_r;
    let params = &schedule.params;
    params.validate().expect("power parameters must be valid");

    let mut q_r: Vec<Vec<f64>> = (0..n).map(|s| vec![0.0; game.robot_actions[s].len()]).collect();
    // Slow robot tables: the expected-SARSA bootstrap policy, or the actor.
    let mut pi_slow: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let k = game.robot_actions[s].len();
            vec![1.0 / k as f64; k]
        })
        .collect();
    let mut q_slow = q_r.clone();
    // Actor–critic tables (used only in that mode).
    let mut logits = pi_slow.iter().map(|row| vec![0.0; row.len()]).collect::<Vec<_>>();
    let mut v_c = vec![0.0; n];

    // Attainment estimates, members pinned at their weights.
    let mut v_e: Vec<Vec<Vec<f64>>> = (0..nh)
        .map(|h| {
            (0..game.humans[h].goals.len())
                .map(|g| (0..n).map(|s| game.goal_indicator(h, g, s)).collect())
                .collect()
        })
        .collect();
    // Power estimates start optimistic at 1 until a state's row is touched.
    let mut x: Vec<Vec<f64>> = (0..nh).map(|_| vec![1.0; n]).collect();

    let mut visits: Vec<Vec<u64>> = (0..n).map(|s| vec![0; game.robot_actions[s].len()]).collect();
    let mut excursions = 0usize;
    let mut traces = Vec::with_capacity(schedule.episodes);
    let initials = game.initial_states();
    let total_steps = schedule.episodes.max(1) * schedule.max_steps.max(1);
    let mut global_step = 0usize;
    let mut steps_since_refresh = 0usize;
    let mut dirty: Vec<StateId> = Vec::new();

    let u_of = |x: &[Vec<f64>], s: StateId, params: &PowerParams| -> f64 {
        let xs: Vec<f64> = (0..nh).map(|h| x[h][s]).collect();
        intrinsic_reward(&xs, params.xi, params.eta, params.eps_x)
    };

    for ep in 0..schedule.episodes {
        let eps_h = linear(schedule.eps_h.0, schedule.eps_h.1, ep, schedule.episodes);
        let eps_r = linear(schedule.eps_r.0, schedule.eps_r.1, ep, schedule.episodes);
        let mut s = initials[rng.gen_range(0..initials.len())];
        // Each human draws a goal; redrawn on the game's resample period.
        let mut goals: Vec<usize> =
            (0..nh).map(|h| rng.gen_range(0..game.humans[h].goals.len())).collect();
        let mut ret = 0.0;
        let mut td_sum = 0.0;
        let mut td_n = 0usize;
        let mut beta_now = schedule.beta_r.0;
        let mut states = if schedule.record_states { vec![s] } else { Vec::new() };

        for step in 0..schedule.max_steps {
            if game.is_terminal(s) {
                break;
            }
            if step > 0 && step % game.goal_resample_period == 0 {
                for (h, g) in goals.iter_mut().enumerate() {
                    *g = rng.gen_range(0..game.humans[h].goals.len());
                }
            }
            beta_now = geometric(schedule.beta_r.0, schedule.beta_r.1, global_step, total_steps);

            // Humans: ε-random, else their goal-conditioned prior row.
            let mut profile = vec![0usize; nh];
            for h in 0..nh {
                let k = game.human_actions[s][h].len();
                profile[h] = if rng.gen::<f64>() < eps_h {
                    rng.gen_range(0..k)
                } else {
                    sample_dist(&mut rng, &prior.pi_h[h][goals[h]][s])
                };
            }

            // Robot: ε-random, else power-law on the bonus-augmented Q.
            let n_r = game.robot_actions[s].len();
            let ar = if rng.gen::<f64>() < eps_r {
                rng.gen_range(0..n_r)
            } else if schedule.mode == LearnMode::ActorCritic {
                sample_dist(&mut rng, &softmax_logits(&logits[s]))
            } else {
                let q_b: Vec<f64> = (0..n_r)
                    .map(|a| {
                        let b =
                            exploration_bonus(schedule.bonus_init, schedule.bonus_decay, visits[s][a]);
                        (q_r[s][a] + b).min(-1e-6)
                    })
                    .collect();
                sample_dist(&mut rng, &power_law_policy(&q_b, beta_now, params.eps_q))
            };

            let t = sample_kernel(&mut rng, game.successors(s, ar, &profile));

            // Attainment TD along each human's active goal (members pinned).
            for h in 0..nh {
                let g = goals[h];
                if game.goal_indicator(h, g, s) > 0.0 || game.is_terminal(s) {
                    continue;
                }
                let target = game.goal_indicator(h, g, t)
                    + if game.goal_indicator(h, g, t) > 0.0 || game.is_terminal(t) {
                        0.0
                    } else {
                        game.humans[h].gamma * v_e[h][g][t]
                    };
                let next = v_e[h][g][s] + schedule.alpha * (target - v_e[h][g][s]);
                if next > 1.0 + schedule.alpha {
                    excursions += 1;
                }
                v_e[h][g][s] = next;
                x[h][s] = x_h_estimator(
                    &(0..game.humans[h].goals.len()).map(|g| v_e[h][g][s]).collect::<Vec<_>>(),
                    params.zeta,
                );
            }

            // Robot TD from the intrinsic reward at the successor.
            let r = u_of(&x, t, params);
            ret += r;
            let cont = if game.is_terminal(t) {
                u_of(&x, t, params) / (1.0 - gamma_r)
            } else {
                match schedule.mode {
                    LearnMode::ExpectedSarsa => {
                        pi_slow[t].iter().zip(&q_slow[t]).map(|(p, q)| p * q).sum()
                    }
                    LearnMode::ActorCritic => v_c[t],
                }
            };
            let target = r + gamma_r * cont;
            match schedule.mode {
                LearnMode::ExpectedSarsa => {
                    let delta = target - q_r[s][ar];
                    q_r[s][ar] += schedule.alpha * delta;
                    td_sum += delta.abs();
                }
                LearnMode::ActorCritic => {
                    let delta = target - v_c[s];
                    v_c[s] += schedule.alpha * delta;
                    let pi = softmax_logits(&logits[s]);
                    for a in 0..n_r {
                        let grad = if a == ar { 1.0 - pi[a] } else { -pi[a] };
                        logits[s][a] += schedule.alpha * delta * grad;
                    }
                    // Keep a Q estimate too, for reporting.
                    q_r[s][ar] += schedule.alpha * (target - q_r[s][ar]);
                    td_sum += delta.abs();
                }
            }
            td_n += 1;
            visits[s][ar] += 1;
            if !dirty.contains(&s) {
                dirty.push(s);
            }
            steps_since_refresh += 1;
            if steps_since_refresh >= schedule.policy_update_period {
                for &ds in &dirty {
                    q_slow[ds] = q_r[ds].clone();
                    let q_neg: Vec<f64> = q_r[ds].iter().map(|&q| q.min(-1e-6)).collect();
                    pi_slow[ds] = power_law_policy(&q_neg, beta_now, params.eps_q);
                }
                dirty.clear();
                steps_since_refresh = 0;
            }

            s = t;
            global_step += 1;
            if schedule.record_states {
                states.push(s);
            }
        }
        traces.push(EpisodeTrace {
            episode: ep,
            ret,
            td: if td_n == 0 { 0.0 } else { td_sum / td_n as f64 },
            beta_r: beta_now,
            eps_r,
            eps_h,
            states,
        });
    }

    // Final policy at the target rationality.
    let pi_r: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            if schedule.mode == LearnMode::ActorCritic {
                softmax_logits(&logits[s])
            } else {
                let q_neg: Vec<f64> = q_r[s].iter().map(|&q| q.min(-1e-6)).collect();
                power_law_policy(&q_neg, schedule.beta_r.1, params.eps_q)
            }
        })
        .collect();
    LearnResult { q_r, pi_r, v_e, x, traces, excursions }
}
