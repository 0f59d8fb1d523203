//! Phase 1: learn one human's goal-conditioned value table by expected-SARSA
//! against an ε-greedy one-step-lookahead adversary, with the policy updated
//! on a slower time-scale than the value table.

use super::{continues, exact::policy_from_q, HumanPrior};
use crate::game::{GoalId, HumanId, StateId, StochasticGame};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Potential-based shaped reward: r' = r + γ Φ(s') − Φ(s). Shifts every
/// Q(s,·) by the state-only constant −Φ(s), so greedy and softmax policies
/// are unchanged.
pub fn shaped_reward(r: f64, gamma: f64, phi_s: f64, phi_s2: f64) -> f64 {
    r + gamma * phi_s2 - phi_s
}

#[derive(Debug, Clone)]
pub struct PhaseOneSchedule {
    pub episodes: usize,
    pub max_steps: usize,
    /// Base learning rate α_m.
    pub alpha: f64,
    /// Per-(s,a)-visit hyperbolic decay: α_n = α / (1 + c·n). 0 keeps α fixed.
    pub alpha_visit_decay: f64,
    /// Human exploration rate, annealed linearly from .0 to .1 over episodes.
    pub eps_h: (f64, f64),
    /// Adversary exploration rate, annealed linearly.
    pub eps_r: (f64, f64),
    /// Env steps between refreshes of the slow policy table (two-time-scale).
    pub policy_update_period: usize,
    /// Optional shaping potential Φ per state (Φ must be 0 on goal members
    /// and terminals to preserve values).
    pub potential: Option<Vec<f64>>,
}

impl Default for PhaseOneSchedule {
    fn default() -> Self {
        PhaseOneSchedule {
            episodes: 2000,
            max_steps: 100,
            alpha: 0.1,
            alpha_visit_decay: 0.01,
            eps_h: (0.8, 0.1),
            eps_r: (1.0, 0.01),
            policy_update_period: 50,
            potential: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseOneResult {
    /// Learned Q table: `q[s]` over A_h(s).
    pub q: Vec<Vec<f64>>,
    /// Slow policy implied by the final table.
    pub pi: Vec<Vec<f64>>,
    /// Mean absolute TD error per episode.
    pub td_curve: Vec<f64>,
}

fn linear(from: f64, to: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        to
    } else {
        from + (to - from) * i as f64 / (n - 1) as f64
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

/// Learn Q^m and π_h for one (human, goal) pair from sampled rollouts.
/// Deterministic for a fixed (game, schedule, seed).
pub fn phase1_learn(
    game: &StochasticGame,
    h: HumanId,
    g: GoalId,
    schedule: &PhaseOneSchedule,
    seed: u64,
) -> PhaseOneResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = game.n_states();
    let gamma = game.humans[h].gamma;
    let ng = game.humans[h].goals.len();
    let phi = |s: StateId| schedule.potential.as_ref().map_or(0.0, |p| p[s]);

    let mut q: Vec<Vec<f64>> = (0..n).map(|s| vec![0.0; game.human_actions[s][h].len()]).collect();
    let mut visits: Vec<Vec<u64>> = (0..n).map(|s| vec![0; game.human_actions[s][h].len()]).collect();
    // Slow policy table, refreshed every `policy_update_period` steps.
    let mut pi: Vec<Vec<f64>> =
        (0..n).map(|s| policy_from_q(game, h, g, s, &q[s], 1.0)).collect();
    let mut steps_since_refresh = 0usize;
    let mut dirty: Vec<StateId> = Vec::new();

    let initials = game.initial_states();
    let mut td_curve = Vec::with_capacity(schedule.episodes);

    for ep in 0..schedule.episodes {
        let eps_h = linear(schedule.eps_h.0, schedule.eps_h.1, ep, schedule.episodes);
        let eps_r = linear(schedule.eps_r.0, schedule.eps_r.1, ep, schedule.episodes);
        let mut s = initials[rng.gen_range(0..initials.len())];
        let mut td_sum = 0.0;
        let mut td_n = 0usize;

        for _ in 0..schedule.max_steps {
            if !continues(game, h, g, s) {
                break;
            }
            // Human action: ε-greedy over the slow policy.
            let na = game.human_actions[s][h].len();
            let ah = if rng.gen::<f64>() < eps_h {
                rng.gen_range(0..na)
            } else {
                sample_dist(&mut rng, &pi[s])
            };
            // Other humans act according to h's beliefs μ (uniform default).
            let mu = game.humans[h].mu[s * ng + g].as_ref();
            let others: Vec<usize> = (0..game.n_humans()).filter(|&j| j != h).collect();
            let mut profile = vec![0usize; game.n_humans()];
            profile[h] = ah;
            for (k, &j) in others.iter().enumerate() {
                let kj = game.human_actions[s][j].len();
                profile[j] = match mu {
                    Some(rows) => sample_dist(&mut rng, &rows[k]),
                    None => rng.gen_range(0..kj),
                };
            }
            // Adversary: ε-random, else one-step lookahead minimizing the
            // human's current value estimate given the sampled human action
            // profile; ties go to the lowest action index. Conditioning on
            // the sampled profile is what makes Q converge to the per-action
            // cautious minimum rather than a policy-averaged one.
            let n_r = game.robot_actions[s].len();
            let ar_greedy = {
                let mut best = (0usize, f64::INFINITY);
                for a_r in 0..n_r {
                    let mut val = 0.0;
                    let j = game.joint_index(s, a_r, &profile);
                    for &(t, pt) in &game.kernel[s][j] {
                        let u = game.goal_indicator(h, g, t);
                        let cont = if continues(game, h, g, t) {
                            pi[t].iter().zip(&q[t]).map(|(a, b)| a * b).sum()
                        } else {
                            0.0
                        };
                        val += pt * (u + gamma * cont);
                    }
                    if val < best.1 {
                        best = (a_r, val);
                    }
                }
                best.0
            };
            let ar = if rng.gen::<f64>() < eps_r { rng.gen_range(0..n_r) } else { ar_greedy };

            let t = sample_kernel(&mut rng, game.successors(s, ar, &profile));
            // Updating on a transition where the adversary explored would
            // mix the explored action's value into Q, which is defined
            // against the minimizing robot — learn only from greedy steps.
            if ar == ar_greedy {
                let u = game.goal_indicator(h, g, t);
                let r = shaped_reward(u, gamma, phi(s), phi(t));
                // Expected-SARSA target under the slow policy.
                let cont: f64 = if continues(game, h, g, t) {
                    pi[t].iter().zip(&q[t]).map(|(a, b)| a * b).sum()
                } else {
                    0.0
                };
                let target = r + gamma * cont;
                visits[s][ah] += 1;
                let alpha = schedule.alpha
                    / (1.0 + schedule.alpha_visit_decay * (visits[s][ah] - 1) as f64);
                let delta = target - q[s][ah];
                q[s][ah] += alpha * delta;
                td_sum += delta.abs();
                td_n += 1;
            }
            if !dirty.contains(&s) {
                dirty.push(s);
            }

            steps_since_refresh += 1;
            if steps_since_refresh >= schedule.policy_update_period {
                for &ds in &dirty {
                    pi[ds] = policy_from_q(game, h, g, ds, &q[ds], 1.0);
                }
                dirty.clear();
                steps_since_refresh = 0;
            }
            s = t;
        }
        td_curve.push(if td_n == 0 { 0.0 } else { td_sum / td_n as f64 });
    }

    let pi: Vec<Vec<f64>> = (0..n).map(|s| policy_from_q(game, h, g, s, &q[s], 1.0)).collect();
    PhaseOneResult { q, pi, td_curve }
}

/// Bundle independently learned (h, g) tables into a prior with the same
/// layout as the exact solvers' output.
pub fn assemble_prior(
    game: &StochasticGame,
    results: &[Vec<PhaseOneResult>],
) -> HumanPrior {
    let mut prior = HumanPrior::zeros(game);
    for h in 0..game.n_humans() {
        for g in 0..game.humans[h].goals.len() {
            let r = &results[h][g];
            for s in 0..game.n_states() {
                prior.q_m[h][g][s] = r.q[s].clone();
                prior.pi_h[h][g][s] = r.pi[s].clone();
                prior.v_m[h][g][s] =
                    r.pi[s].iter().zip(&r.q[s]).map(|(a, b)| a * b).sum();
            }
        }
    }
    prior
}
