//! Goal-conditioned human policy priors.
//!
//! For each human h and goal g, the prior is the fixed point of a pessimistic
//! model: the human assumes the other humans act according to its beliefs μ
//! and the robot adversarially minimizes the human's goal value,
//!
//!   Q^m_h(s, g, a_h) = E_{a_{-h}∼μ} min_{a_r} E_{s'} [ U_h(s',g) + γ_h V^m_h(s',g) ],
//!   π_h(·|s,g)       = ν π⁰_h(·|s,g) + (1−ν) softmax_{β_h} Q^m_h(s,g,·),
//!   V^m_h(s,g)       = Σ_a π_h(a|s,g) Q^m_h(s,g,a),
//!
//! where U_h(s',g) is the goal-attainment weight collected on entering s'
//! and the continuation value is zero once the goal has been fulfilled
//! (members of g are absorbing for this computation) or a terminal state is
//! reached.

mod exact;
mod learn;

pub use exact::{
    solve_prior_backward, solve_prior_fixed_point, FixedPointOptions, NonConvergence, PriorOptions,
};
pub use learn::{assemble_prior, phase1_learn, shaped_reward, PhaseOneResult, PhaseOneSchedule};

use crate::game::{GoalId, HumanId, StateId, StochasticGame};

/// Exact (or converged) goal-conditioned prior tables.
#[derive(Debug, Clone)]
pub struct HumanPrior {
    /// `q_m[h][g][s]` is the row of Q^m over A_h(s).
    pub q_m: Vec<Vec<Vec<Vec<f64>>>>,
    /// `pi_h[h][g][s]` is the policy row over A_h(s).
    pub pi_h: Vec<Vec<Vec<Vec<f64>>>>,
    /// `v_m[h][g][s]` = V^m.
    pub v_m: Vec<Vec<Vec<f64>>>,
}

impl HumanPrior {
    pub fn zeros(game: &StochasticGame) -> Self {
        let n = game.n_states();
        let mut q_m = Vec::new();
        let mut pi_h = Vec::new();
        let mut v_m = Vec::new();
        for h in 0..game.n_humans() {
            let ng = game.humans[h].goals.len();
            let mut qh = Vec::with_capacity(ng);
            let mut ph = Vec::with_capacity(ng);
            for g in 0..ng {
                let q: Vec<Vec<f64>> =
                    (0..n).map(|s| vec![0.0; game.human_actions[s][h].len()]).collect();
                // At states the solvers never back up (terminals, fulfilled
                // goals), behavior is still ν π⁰ + (1−ν) uniform: habits
                // persist after the goal is met.
                let p: Vec<Vec<f64>> = (0..n)
                    .map(|s| {
                        let human = &game.humans[h];
                        let k = game.human_actions[s][h].len();
                        let uniform = 1.0 / k as f64;
                        let nu = human.nu_at(s, g);
                        (0..k)
                            .map(|a| {
                                let p0 = human.pi0.get(s, g).map_or(uniform, |row| row[a]);
                                nu * p0 + (1.0 - nu) * uniform
                            })
                            .collect()
                    })
                    .collect();
                qh.push(q);
                ph.push(p);
            }
            q_m.push(qh);
            pi_h.push(ph);
            v_m.push(vec![vec![0.0; n]; ng]);
        }
        HumanPrior { q_m, pi_h, v_m }
    }

    /// Goal-marginal ("mean") policy of human h at s: the average of the
    /// goal-conditioned rows under the uniform goal distribution. Because
    /// expected successor values are linear in each human's action
    /// distribution and π_h depends only on that human's own goal, using the
    /// mean policy for the *other* agents' goal expectations is exact.
    pub fn mean_policy(&self, game: &StochasticGame, h: HumanId, s: StateId) -> Vec<f64> {
        let ng = game.humans[h].goals.len();
        let na = game.human_actions[s][h].len();
        let mut row = vec![0.0; na];
        for g in 0..ng {
            for a in 0..na {
                row[a] += self.pi_h[h][g][s][a] / ng as f64;
            }
        }
        row
    }

    /// All humans' mean policies at s.
    pub fn mean_policies(&self, game: &StochasticGame, s: StateId) -> Vec<Vec<f64>> {
        (0..game.n_humans()).map(|h| self.mean_policy(game, h, s)).collect()
    }
}

/// Continuation factor for goal value backups: zero at terminals, and zero at
/// fulfilled-goal members unless the game re-collects goal rewards.
pub(crate) fn continues(game: &StochasticGame, h: HumanId, g: GoalId, s: StateId) -> bool {
    if game.states[s].terminal {
        return false;
    }
    if game.goal_recollection {
        return true;
    }
    !game.humans[h].goals[g].contains(s)
}
