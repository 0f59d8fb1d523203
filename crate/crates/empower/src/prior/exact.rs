//! Exact prior solvers: backward induction on acyclic games and a damped
//! fixed-point iteration with rationality (β) continuation on cyclic ones.

use super::{continues, HumanPrior};
use crate::game::{GoalId, HumanId, StochasticGame};
use crate::power::softmax_policy;

#[derive(Debug, Clone)]
pub struct PriorOptions {
    /// Replace the adversarial min over robot actions by a uniform
    /// expectation (ablation; removes the pessimism about the robot).
    pub mean_robot: bool,
}

impl Default for PriorOptions {
    fn default() -> Self {
        PriorOptions { mean_robot: false }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointOptions {
    pub prior: PriorOptions,
    /// Damping λ ∈ (0, 1]: x ← (1−λ) x + λ F(x).
    pub damping: f64,
    /// Number of geometric rationality-continuation stages from β = 0 up to
    /// the game's β_h values.
    pub beta_steps: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            prior: PriorOptions::default(),
            damping: 0.5,
            beta_steps: 32,
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Failure report for the damped iteration: which continuation stage stalled
/// and at what residual.
#[derive(Debug, Clone)]
pub struct NonConvergence {
    /// Multiplier on the game's β values at the stage that failed (1 = final).
    pub beta_scale: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl std::fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "no fixed point at beta scale {} after {} iterations (residual {:.3e})",
            self.beta_scale, self.iterations, self.residual
        )
    }
}

impl std::error::Error for NonConvergence {}

/// One exact backup of Q^m at (h, g, s) from continuation values `v`.
/// Returns the Q row over A_h(s).
pub(crate) fn q_backup(
    game: &StochasticGame,
    h: HumanId,
    g: GoalId,
    s: usize,
    v: &[f64],
    opts: &PriorOptions,
) -> Vec<f64> {
    let gamma = game.humans[h].gamma;
    let na = game.human_actions[s][h].len();
    let nh = game.n_humans();
    let ng = game.humans[h].goals.len();
    let n_r = game.robot_actions[s].len();

    // Belief rows over the other humans' actions (uniform default).
    let uniform: Vec<Vec<f64>> = (0..nh)
        .map(|j| {
            let k = game.human_actions[s][j].len();
            vec![1.0 / k as f64; k]
        })
        .collect();
    let mu = game.humans[h].mu[s * ng + g].as_ref();
    let others: Vec<usize> = (0..nh).filter(|&j| j != h).collect();

    let mut q = vec![0.0; na];
    for (qa, ah) in q.iter_mut().zip(0..na) {
        // Distribution rows per human: point mass for h, belief for others.
        let mut point = vec![0.0; na];
        point[ah] = 1.0;
        let dists: Vec<&[f64]> = (0..nh)
            .map(|j| {
                if j == h {
                    point.as_slice()
                } else if let Some(rows) = mu {
                    rows[others.iter().position(|&o| o == j).unwrap()].as_slice()
                } else {
                    uniform[j].as_slice()
                }
            })
            .collect();
        let mut acc = 0.0;
        game.for_each_human_profile(s, &dists, |idx, p| {
            // For this fixed human profile, minimize (or average) over the
            // robot's actions.
            let mut best = f64::INFINITY;
            let mut mean = 0.0;
            for ar in 0..n_r {
                let j = game.joint_index(s, ar, idx);
                let mut val = 0.0;
                for &(t, pt) in &game.kernel[s][j] {
                    let u = game.goal_indicator(h, g, t);
                    let cont = if continues(game, h, g, t) { v[t] } else { 0.0 };
                    val += pt * (u + gamma * cont);
                }
                if val < best {
                    best = val;
                }
                mean += val / n_r as f64;
            }
            acc += p * if opts.mean_robot { mean } else { best };
        });
        *qa = acc;
    }
    q
}

/// π_h = ν π⁰ + (1−ν) softmax_{β_scale · β_h}(Q row).
pub(crate) fn policy_from_q(
    game: &StochasticGame,
    h: HumanId,
    g: GoalId,
    s: usize,
    q: &[f64],
    beta_scale: f64,
) -> Vec<f64> {
    let human = &game.humans[h];
    let nu = human.nu_at(s, g);
    let beta_h = human.beta_at(s, g);
    // β = ∞ stays the exact argmax at every continuation stage (∞ · 0 would
    // otherwise poison the sweep with NaN).
    let beta = if beta_h.is_infinite() { beta_h } else { beta_h * beta_scale };
    let soft = softmax_policy(q, beta);
    let na = q.len();
    let uniform = 1.0 / na as f64;
    (0..na)
        .map(|a| {
            let p0 = human.pi0.get(s, g).map_or(uniform, |row| row[a]);
            nu * p0 + (1.0 - nu) * soft[a]
        })
        .collect()
}

/// Backward induction over a topological order; exact on acyclic games.
pub fn solve_prior_backward(
    game: &StochasticGame,
    opts: &PriorOptions,
) -> Result<HumanPrior, String> {
    let order = game.is_acyclic().ok_or("game has cycles; use the fixed-point solver")?;
    let mut prior = HumanPrior::zeros(game);
    for h in 0..game.n_humans() {
        for g in 0..game.humans[h].goals.len() {
            for &s in order.iter().rev() {
                if !continues(game, h, g, s) {
                    // Fulfilled or terminal: no further value for this goal.
                    continue;
                }
                let q = q_backup(game, h, g, s, &prior.v_m[h][g], opts);
                let pi = policy_from_q(game, h, g, s, &q, 1.0);
                prior.v_m[h][g][s] = q.iter().zip(&pi).map(|(a, b)| a * b).sum();
                prior.q_m[h][g][s] = q;
                prior.pi_h[h][g][s] = pi;
            }
        }
    }
    Ok(prior)
}

/// Damped fixed-point iteration with geometric β continuation: stages scale
/// every β_h by 0 = t_0 < t_1 < … < t_K = 1, warm-starting each stage from
/// the previous one. Within a stage, values are updated as
/// x ← (1−λ) x + λ F(x) until ‖F(x) − x‖_∞ ≤ tol.
pub fn solve_prior_fixed_point(
    game: &StochasticGame,
    opts: &FixedPointOptions,
) -> Result<HumanPrior, NonConvergence> {
    let mut prior = HumanPrior::zeros(game);
    let mut scales = vec![0.0];
    // Geometric ramp ending at 1, e.g. …, 1/8, 1/4, 1/2, 1.
    for k in (0..opts.beta_steps).rev() {
        scales.push(0.5f64.powi(k as i32));
    }
    for &scale in &scales {
        let mut residual = f64::INFINITY;
        let mut iter = 0;
        while residual > opts.tol {
            if iter >= opts.max_iter {
                return Err(NonConvergence { beta_scale: scale, residual, iterations: iter });
            }
            residual = 0.0;
            for h in 0..game.n_humans() {
                for g in 0..game.humans[h].goals.len() {
                    for s in 0..game.n_states() {
                        if !continues(game, h, g, s) {
                            continue;
                        }
                        let q = q_backup(game, h, g, s, &prior.v_m[h][g], &opts.prior);
                        let pi = policy_from_q(game, h, g, s, &q, scale);
                        let v_new: f64 = q.iter().zip(&pi).map(|(a, b)| a * b).sum();
                        for (a, qa) in q.iter().enumerate() {
                            let old = prior.q_m[h][g][s][a];
                            residual = residual.max((qa - old).abs());
                            prior.q_m[h][g][s][a] = old + opts.damping * (qa - old);
                        }
                        prior.pi_h[h][g][s] = pi;
                        let old_v = prior.v_m[h][g][s];
                        residual = residual.max((v_new - old_v).abs());
                        prior.v_m[h][g][s] = old_v + opts.damping * (v_new - old_v);
                    }
                }
            }
            iter += 1;
        }
    }
    // Final pass: undamped policy/value consistency at the target β.
    for h in 0..game.n_humans() {
        for g in 0..game.humans[h].goals.len() {
            for s in 0..game.n_states() {
                if !continues(game, h, g, s) {
                    continue;
                }
                let q = q_backup(game, h, g, s, &prior.v_m[h][g], &opts.prior);
                let pi = policy_from_q(game, h, g, s, &q, 1.0);
                prior.v_m[h][g][s] = q.iter().zip(&pi).map(|(a, b)| a * b).sum();
                prior.q_m[h][g][s] = q;
                prior.pi_h[h][g][s] = pi;
            }
        }
    }
    Ok(prior)
}
