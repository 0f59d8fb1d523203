//! Robot planning against fixed human priors.
//!
//! Given the goal-conditioned human policies π_h, the robot's soft policy and
//! values solve, per state (downstream first on acyclic games):
//!
//!   Q_r(s, a_r) = E_{g} E_{a_H ∼ π_H} E_{s'} γ_r V_r(s')
//!   π_r(a_r|s) ∝ (−Q_r(s,a_r))^{−β_r}
//!   V^e_h(s,g) = E_{g_{-h}} E_{a_H} E_{a_r∼π_r} E_{s'} [U_h(s',g) + γ_h V^e_h(s',g)]
//!   X_h(s)     = Σ_g V^e_h(s,g)^ζ
//!   U_r(s)     = −(Σ_h (X_h(s)+ε_X)^{−ξ})^η
//!   V_r(s)     = U_r(s) + E_{a_r∼π_r} Q_r(s,a_r)
//!
//! Goal expectations factor through each human's goal-marginal mean policy,
//! which is exact because successor values are multilinear in the per-agent
//! action distributions and each π_h depends only on its own goal.

use crate::game::{GoalId, HumanId, StateId, StochasticGame};
use crate::power::{
    argmax_uniform, intrinsic_reward, normalized_softmax_policy, power_law_policy, PowerParams,
    PowerReport, PowerReportRow,
};
use crate::prior::HumanPrior;
use serde::Serialize;

/// Value convention at terminal states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminalMode {
    /// The terminal power level is collected forever: V_r = U_r / (1 − γ_r).
    SelfLoop,
    /// Collected once: V_r = U_r.
    CollectOnce,
    /// Not collected: V_r = 0 (terminal power left unevaluated).
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RobotPolicyForm {
    /// π(a) ∝ (−Q(a) + ε_Q)^{−β_r}.
    PowerLaw,
    /// π(a) ∝ exp(β_r Q(a) / (max Q − min Q)).
    NormalizedSoftmax,
}

#[derive(Debug, Clone)]
pub struct PlannerOptions {
    pub params: PowerParams,
    pub terminal_mode: TerminalMode,
    pub policy_form: RobotPolicyForm,
    /// Enumerate joint goal assignments when Π_h |G_h| is at most this;
    /// otherwise use the factorized goal-marginal path (identical values).
    pub enumeration_limit: usize,
    pub damping: f64,
    pub beta_steps: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            params: PowerParams::default(),
            terminal_mode: TerminalMode::SelfLoop,
            policy_form: RobotPolicyForm::PowerLaw,
            enumeration_limit: 10_000,
            damping: 0.5,
            beta_steps: 16,
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RobotSolution {
    /// `q_r[s]` over A_r(s); every entry ≤ 0.
    pub q_r: Vec<Vec<f64>>,
    pub pi_r: Vec<Vec<f64>>,
    pub v_r: Vec<f64>,
    pub u_r: Vec<f64>,
    /// `x[h][s]` = X_h(s).
    pub x: Vec<Vec<f64>>,
    /// `v_e[h][g][s]` ∈ [0, 1].
    pub v_e: Vec<Vec<Vec<f64>>>,
    /// Sup-norm change of the last outer iteration (0 for backward/exact).
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct PlannerError(pub String);

impl std::fmt::Display for PlannerError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for PlannerError {}

/// Robot action distribution for a Q row under the chosen functional form.
fn robot_policy(q: &[f64], form: RobotPolicyForm, beta: f64, eps_q: f64) -> Vec<f64> {
    match form {
        RobotPolicyForm::PowerLaw => {
            // The power law needs −Q + ε_Q > 0; with ε_Q = 0 and some Q = 0
            // (e.g. all successors carry zero continuation) fall back to the
            // argmax over the row.
            if eps_q == 0.0 && q.iter().any(|&v| v >= 0.0) {
                argmax_uniform(q)
            } else {
                power_law_policy(q, beta, eps_q)
            }
        }
        RobotPolicyForm::NormalizedSoftmax => normalized_softmax_policy(q, beta),
    }
}

/// Shared per-solve context: per-state goal-marginal human policy rows.
struct Ctx<'a> {
    game: &'a StochasticGame,
    prior: &'a HumanPrior,
    /// `mean_rows[s][h]`: mean policy of human h at s.
    mean_rows: Vec<Vec<Vec<f64>>>,
    opts: &'a PlannerOptions,
}

impl<'a> Ctx<'a> {
    fn new(game: &'a StochasticGame, prior: &'a HumanPrior, opts: &'a PlannerOptions) -> Self {
        let joint_goals: usize = game.humans.iter().map(|h| h.goals.len()).product();
        let enumerate = joint_goals <= opts.enumeration_limit;
        let mean_rows = (0..game.n_states())
            .map(|s| {
                if enumerate {
                    mean_rows_enumerated(game, prior, s)
                } else {
                    prior.mean_policies(game, s)
                }
            })
            .collect();
        Ctx { game, prior, mean_rows, opts }
    }

    /// Q_r(s, ·) backup from continuation values `v_r`.
    fn q_r_row(&self, s: StateId, v_r: &[f64]) -> Vec<f64> {
        let game = self.game;
        let gamma = game.gamma_r;
        let dists: Vec<&[f64]> = self.mean_rows[s].iter().map(|r| r.as_slice()).collect();
        let n_r = game.robot_actions[s].len();
        let mut q = vec![0.0; n_r];
        game.for_each_human_profile(s, &dists, |idx, p| {
            for (ar, qa) in q.iter_mut().enumerate() {
                let j = game.joint_index(s, ar, idx);
                for &(t, pt) in &game.kernel[s][j] {
                    *qa += p * pt * gamma * v_r[t];
                }
            }
        });
        q
    }

    /// V^e backup at (h, g, s) under robot policy `pi_r` from continuation
    /// values `v` (this human conditioned on g, others goal-marginal).
    fn v_e_backup(&self, h: HumanId, g: GoalId, s: StateId, pi_r: &[f64], v: &[f64]) -> f64 {
        let game = self.game;
        let gamma = game.humans[h].gamma;
        let dists: Vec<&[f64]> = (0..game.n_humans())
            .map(|j| {
                if j == h {
                    self.prior.pi_h[h][g][s].as_slice()
                } else {
                    self.mean_rows[s][j].as_slice()
                }
            })
            .collect();
        let mut acc = 0.0;
        game.for_each_human_profile(s, &dists, |idx, p| {
            for (ar, &pr) in pi_r.iter().enumerate() {
                if pr == 0.0 {
                    continue;
                }
                let j = game.joint_index(s, ar, idx);
                for &(t, pt) in &game.kernel[s][j] {
                    let u = game.goal_indicator(h, g, t);
                    let cont = if v_e_continues(game, h, g, t) { v[t] } else { 0.0 };
                    acc += p * pr * pt * (u + gamma * cont);
                }
            }
        });
        acc
    }

    fn x_row(&self, v_e: &[Vec<Vec<f64>>], s: StateId) -> Vec<f64> {
        if let Some(table) = &self.game.injected_x {
            return table.iter().map(|row| row[s]).collect();
        }
        let zeta = self.opts.params.zeta;
        (0..self.game.n_humans())
            .map(|h| {
                v_e[h].iter().map(|vg| if vg[s] > 0.0 { vg[s].powf(zeta) } else { 0.0 }).sum()
            })
            .collect()
    }

    fn u_r_of(&self, xs: &[f64], terminal: bool) -> f64 {
        if terminal && self.opts.terminal_mode == TerminalMode::Zero {
            return 0.0;
        }
        intrinsic_reward(xs, self.opts.params.xi, self.opts.params.eta, self.opts.params.eps_x)
    }

    fn terminal_v_r(&self, u_r: f64) -> f64 {
        match self.opts.terminal_mode {
            TerminalMode::SelfLoop => u_r / (1.0 - self.game.gamma_r),
            TerminalMode::CollectOnce => u_r,
            TerminalMode::Zero => 0.0,
        }
    }
}

/// Mean policy rows computed by explicit enumeration of joint goal
/// assignments (uniform over Π_h G_h); agrees with the factorized
/// goal-marginal computation exactly.
fn mean_rows_enumerated(game: &StochasticGame, prior: &HumanPrior, s: StateId) -> Vec<Vec<f64>> {
    let nh = game.n_humans();
    let sizes: Vec<usize> = game.humans.iter().map(|h| h.goals.len()).collect();
    let total: usize = sizes.iter().product();
    let mut rows: Vec<Vec<f64>> =
        (0..nh).map(|h| vec![0.0; game.human_actions[s][h].len()]).collect();
    let mut gs = vec![0usize; nh];
    for _ in 0..total {
        for h in 0..nh {
            for (a, r) in rows[h].iter_mut().enumerate() {
                *r += prior.pi_h[h][gs[h]][s][a] / total as f64;
            }
        }
        // mixed-radix increment over goal assignments
        for h in (0..nh).rev() {
            gs[h] += 1;
            if gs[h] < sizes[h] {
                break;
            }
            gs[h] = 0;
        }
    }
    rows
}

fn v_e_continues(game: &StochasticGame, h: HumanId, g: GoalId, s: StateId) -> bool {
    if game.states[s].terminal {
        return false;
    }
    if game.goal_recollection {
        return true;
    }
    !game.humans[h].goals[g].contains(s)
}

/// Pinned V^e value at states where no backup applies: the attainment weight
/// at fulfilled members, 0 at other terminals.
fn v_e_pinned(game: &StochasticGame, h: HumanId, g: GoalId, s: StateId) -> Option<f64> {
    if !game.goal_recollection && game.humans[h].goals[g].contains(s) {
        return Some(game.goal_indicator(h, g, s));
    }
    if game.states[s].terminal {
        return Some(game.goal_indicator(h, g, s));
    }
    None
}

fn empty_solution(game: &StochasticGame) -> RobotSolution {
    let n = game.n_states();
    RobotSolution {
        q_r: (0..n).map(|s| vec![0.0; game.robot_actions[s].len()]).collect(),
        pi_r: (0..n)
            .map(|s| {
                let k = game.robot_actions[s].len();
                vec![1.0 / k as f64; k]
            })
            .collect(),
        v_r: vec![0.0; n],
        u_r: vec![0.0; n],
        x: vec![vec![0.0; n]; game.n_humans()],
        v_e: game
            .humans
            .iter()
            .map(|h| vec![vec![0.0; n]; h.goals.len()])
            .collect(),
        residual: 0.0,
        iterations: 0,
    }
}

fn pin_fixed_v_e(game: &StochasticGame, sol: &mut RobotSolution) {
    for h in 0..game.n_humans() {
        for g in 0..game.humans[h].goals.len() {
            for s in 0..game.n_states() {
                if let Some(w) = v_e_pinned(game, h, g, s) {
                    sol.v_e[h][g][s] = w;
                }
            }
        }
    }
}

/// Exact backward induction on acyclic games: one pass over the reverse
/// topological order evaluates the full mutual recursion.
pub fn solve_robot_backward(
    game: &StochasticGame,
    prior: &HumanPrior,
    opts: &PlannerOptions,
) -> Result<RobotSolution, PlannerError> {
    opts.params.validate().map_err(|e| PlannerError(e.to_string()))?;
    let order = game
        .is_acyclic()
        .ok_or_else(|| PlannerError("game has cycles; use the fixed-point solver".into()))?;
    let ctx = Ctx::new(game, prior, opts);
    let mut sol = empty_solution(game);
    pin_fixed_v_e(game, &mut sol);

    for &s in order.iter().rev() {
        if game.states[s].terminal {
            let xs = ctx.x_row(&sol.v_e, s);
            let u = ctx.u_r_of(&xs, true);
            sol.v_r[s] = ctx.terminal_v_r(u);
            sol.u_r[s] = u;
            sol.q_r[s] = vec![game.gamma_r * sol.v_r[s]];
            sol.pi_r[s] = vec![1.0];
            for (h, x) in xs.into_iter().enumerate() {
                sol.x[h][s] = x;
            }
            continue;
        }
        let q = ctx.q_r_row(s, &sol.v_r);
        let pi = robot_policy(&q, opts.policy_form, opts.params.beta_r, opts.params.eps_q);
        for h in 0..game.n_humans() {
            for g in 0..game.humans[h].goals.len() {
                if v_e_pinned(game, h, g, s).is_none() {
                    sol.v_e[h][g][s] = ctx.v_e_backup(h, g, s, &pi, &sol.v_e[h][g]);
                }
            }
        }
        let xs = ctx.x_row(&sol.v_e, s);
        let u = ctx.u_r_of(&xs, false);
        sol.v_r[s] = u + pi.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>();
        sol.u_r[s] = u;
        sol.q_r[s] = q;
        sol.pi_r[s] = pi;
        for (h, x) in xs.into_iter().enumerate() {
            sol.x[h][s] = x;
        }
    }
    Ok(sol)
}

/// Linear inner solve of V^e for all (h, g) under a fixed robot policy, by
/// Gauss–Seidel sweeps (exact up to `tol`; a contraction for γ_h < 1 and
/// finite-pass exact on acyclic games).
fn inner_solve_v_e(ctx: &Ctx, sol: &mut RobotSolution, tol: f64, max_iter: usize) {
    let game = ctx.game;
    for h in 0..game.n_humans() {
        for g in 0..game.humans[h].goals.len() {
            let mut it = 0;
            loop {
                let mut diff: f64 = 0.0;
                for s in 0..game.n_states() {
                    if v_e_pinned(game, h, g, s).is_some() {
                        continue;
                    }
                    let v = ctx.v_e_backup(h, g, s, &sol.pi_r[s], &sol.v_e[h][g]);
                    diff = diff.max((v - sol.v_e[h][g][s]).abs());
                    sol.v_e[h][g][s] = v;
                }
                it += 1;
                if diff <= tol || it >= max_iter {
                    break;
                }
            }
        }
    }
}

/// Linear inner solve of V_r under fixed π_r and U_r.
fn inner_solve_v_r(ctx: &Ctx, sol: &mut RobotSolution, tol: f64, max_iter: usize) {
    let game = ctx.game;
    let mut it = 0;
    loop {
        let mut diff: f64 = 0.0;
        for s in 0..game.n_states() {
            let v = if game.states[s].terminal {
                ctx.terminal_v_r(sol.u_r[s])
            } else {
                let q = ctx.q_r_row(s, &sol.v_r);
                let ev: f64 = sol.pi_r[s].iter().zip(&q).map(|(a, b)| a * b).sum();
                sol.q_r[s] = q;
                sol.u_r[s] + ev
            };
            diff = diff.max((v - sol.v_r[s]).abs());
            sol.v_r[s] = v;
        }
        it += 1;
        if diff <= tol || it >= max_iter {
            break;
        }
    }
    for s in 0..game.n_states() {
        if game.states[s].terminal {
            sol.q_r[s] = vec![game.gamma_r * sol.v_r[s]];
        }
    }
}

fn refresh_power(ctx: &Ctx, sol: &mut RobotSolution) {
    let game = ctx.game;
    for s in 0..game.n_states() {
        let xs = ctx.x_row(&sol.v_e, s);
        sol.u_r[s] = ctx.u_r_of(&xs, game.states[s].terminal);
        for (h, x) in xs.into_iter().enumerate() {
            sol.x[h][s] = x;
        }
    }
}

/// Damped fixed-point solver for cyclic games. Starts from the exact β_r = 0
/// solution (uniform robot policy: a plain linear policy evaluation), then
/// follows a geometric β continuation up to β_r, damping value updates by λ.
pub fn solve_robot_fixed_point(
    game: &StochasticGame,
    prior: &HumanPrior,
    opts: &PlannerOptions,
) -> Result<RobotSolution, PlannerError> {
    opts.params.validate().map_err(|e| PlannerError(e.to_string()))?;
    let ctx = Ctx::new(game, prior, opts);
    let mut sol = empty_solution(game);
    pin_fixed_v_e(game, &mut sol);
    let inner_tol = opts.tol * 1e-2;

    // Stage 0: β = 0, uniform policy; the remaining system is linear and the
    // inner solves evaluate it directly.
    inner_solve_v_e(&ctx, &mut sol, inner_tol, opts.max_iter);
    refresh_power(&ctx, &mut sol);
    inner_solve_v_r(&ctx, &mut sol, inner_tol, opts.max_iter);
    sol.residual = 0.0;

    let beta = opts.params.beta_r;
    if beta == 0.0 {
        return Ok(sol);
    }
    let mut scales = Vec::new();
    for k in (0..opts.beta_steps).rev() {
        scales.push(0.5f64.powi(k as i32));
    }

    let mut total_iter = 0usize;
    for &scale in &scales {
        let b = if beta.is_infinite() { beta } else { beta * scale };
        let mut iter = 0;
        loop {
            // Policy improvement at the current β.
            let mut policy_change: f64 = 0.0;
            for s in 0..game.n_states() {
                if game.states[s].terminal {
                    continue;
                }
                let q = ctx.q_r_row(s, &sol.v_r);
                let pi = robot_policy(&q, opts.policy_form, b, opts.params.eps_q);
                for (a, &p) in pi.iter().enumerate() {
                    policy_change = policy_change.max((p - sol.pi_r[s][a]).abs());
                }
                sol.q_r[s] = q;
                sol.pi_r[s] = pi;
            }
            // Damped value update toward the inner-solved system.
            let prev_v_r = sol.v_r.clone();
            let prev_v_e: Vec<Vec<Vec<f64>>> = sol.v_e.clone();
            inner_solve_v_e(&ctx, &mut sol, inner_tol, opts.max_iter);
            refresh_power(&ctx, &mut sol);
            inner_solve_v_r(&ctx, &mut sol, inner_tol, opts.max_iter);
            let mut value_change: f64 = 0.0;
            for s in 0..game.n_states() {
                value_change = value_change.max((sol.v_r[s] - prev_v_r[s]).abs());
                sol.v_r[s] = prev_v_r[s] + opts.damping * (sol.v_r[s] - prev_v_r[s]);
                for h in 0..game.n_humans() {
                    for g in 0..game.humans[h].goals.len() {
                        let old = prev_v_e[h][g][s];
                        value_change = value_change.max((sol.v_e[h][g][s] - old).abs());
                        sol.v_e[h][g][s] = old + opts.damping * (sol.v_e[h][g][s] - old);
                    }
                }
            }
            refresh_power(&ctx, &mut sol);
            iter += 1;
            total_iter += 1;
            sol.residual = value_change.max(policy_change * 1e-3);
            if value_change <= opts.tol {
                break;
            }
            if iter >= opts.max_iter {
                return Err(PlannerError(format!(
                    "no fixed point at beta {} after {} iterations (residual {:.3e})",
                    b, iter, value_change
                )));
            }
        }
    }
    // Undo the final damping bias: one last consistency pass.
    inner_solve_v_e(&ctx, &mut sol, inner_tol, opts.max_iter);
    refresh_power(&ctx, &mut sol);
    inner_solve_v_r(&ctx, &mut sol, inner_tol, opts.max_iter);
    sol.iterations = total_iter;
    Ok(sol)
}

/// Horizon-H truncated solve: the full backward operator unrolled H times
/// from zero values. Requires ε_X > 0 so that U_r stays finite while
/// attainment estimates are still zero.
pub fn finite_horizon_solve(
    game: &StochasticGame,
    prior: &HumanPrior,
    opts: &PlannerOptions,
    horizon: i64,
) -> Result<RobotSolution, PlannerError> {
    opts.params.validate().map_err(|e| PlannerError(e.to_string()))?;
    if horizon <= 0 {
        return Err(PlannerError(format!("horizon {horizon} must be positive")));
    }
    if !(opts.params.eps_x > 0.0) {
        return Err(PlannerError("finite-horizon solve requires eps_x > 0".into()));
    }
    let ctx = Ctx::new(game, prior, opts);
    let mut sol = empty_solution(game);
    pin_fixed_v_e(game, &mut sol);
    refresh_power(&ctx, &mut sol);
    for s in 0..game.n_states() {
        if game.states[s].terminal {
            sol.v_r[s] = ctx.terminal_v_r(sol.u_r[s]);
        }
    }

    for _ in 0..horizon {
        let mut next = sol.clone();
        for s in 0..game.n_states() {
            if game.states[s].terminal {
                next.q_r[s] = vec![game.gamma_r * sol.v_r[s]];
                continue;
            }
            let q = ctx.q_r_row(s, &sol.v_r);
            let pi = robot_policy(&q, opts.policy_form, opts.params.beta_r, opts.params.eps_q);
            for h in 0..game.n_humans() {
                for g in 0..game.humans[h].goals.len() {
                    if v_e_pinned(game, h, g, s).is_none() {
                        next.v_e[h][g][s] = ctx.v_e_backup(h, g, s, &pi, &sol.v_e[h][g]);
                    }
                }
            }
            next.q_r[s] = q;
            next.pi_r[s] = pi;
        }
        // Power at the new attainment estimates, then the value update.
        refresh_power(&ctx, &mut next);
        for s in 0..game.n_states() {
            if game.states[s].terminal {
                next.v_r[s] = ctx.terminal_v_r(next.u_r[s]);
            } else {
                let ev: f64 = next.pi_r[s].iter().zip(&next.q_r[s]).map(|(a, b)| a * b).sum();
                next.v_r[s] = next.u_r[s] + ev;
            }
        }
        sol = next;
        sol.iterations += 1;
    }
    Ok(sol)
}

/// A-priori sup-norm bound on |V̂_r^{(H)} − V_r| for the truncated solve.
#[derive(Debug, Clone, Serialize)]
pub struct HorizonBound {
    pub horizon: i64,
    pub gamma_r: f64,
    /// Sup of |U_r| given the ε_X floor: (n_h ε_X^{−ξ})^η.
    pub m_u: f64,
    pub value: f64,
}

impl HorizonBound {
    pub fn compute(
        n_humans: usize,
        params: &PowerParams,
        gamma_r: f64,
        policy_form: RobotPolicyForm,
        horizon: i64,
    ) -> Result<HorizonBound, PlannerError> {
        if !(params.eps_x > 0.0) {
            return Err(PlannerError("horizon bound requires eps_x > 0".into()));
        }
        let n_h = n_humans as f64;
        let m_u = (n_h * params.eps_x.powf(-params.xi)).powf(params.eta);
        let g = gamma_r;
        let value = match policy_form {
            RobotPolicyForm::PowerLaw => {
                if params.beta_r > 0.0 && !(params.eps_q > 0.0) {
                    return Err(PlannerError(
                        "power-law horizon bound requires eps_q > 0 when beta_r > 0".into(),
                    ));
                }
                let sensitivity = if params.beta_r == 0.0 {
                    0.0
                } else {
                    2.0 * params.beta_r * m_u / (params.eps_q * (1.0 - g).powi(2))
                };
                g.powi(horizon as i32) * (m_u / (1.0 - g)) * (1.0 + sensitivity)
            }
            RobotPolicyForm::NormalizedSoftmax => {
                g.powi(horizon as i32) * n_h.powf(params.eta) * (1.0 - g + params.beta_r)
                    / (params.eps_x.powf(params.xi * params.eta) * (1.0 - g).powi(2))
            }
        };
        Ok(HorizonBound { horizon, gamma_r: g, m_u, value })
    }
}

/// Humans' powers under an explicitly given robot policy (rows over A_r(s)).
pub fn evaluate_policy_power(
    game: &StochasticGame,
    prior: &HumanPrior,
    pi_r: &[Vec<f64>],
    opts: &PlannerOptions,
) -> Result<RobotSolution, PlannerError> {
    opts.params.validate().map_err(|e| PlannerError(e.to_string()))?;
    for (s, row) in pi_r.iter().enumerate() {
        if row.len() != game.robot_actions[s].len()
            || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9
            || row.iter().any(|&p| p < 0.0)
        {
            return Err(PlannerError(format!("invalid robot policy row at state {s}")));
        }
    }
    let ctx = Ctx::new(game, prior, opts);
    let mut sol = empty_solution(game);
    sol.pi_r = pi_r.to_vec();
    pin_fixed_v_e(game, &mut sol);
    inner_solve_v_e(&ctx, &mut sol, opts.tol * 1e-2, opts.max_iter);
    refresh_power(&ctx, &mut sol);
    inner_solve_v_r(&ctx, &mut sol, opts.tol * 1e-2, opts.max_iter);
    Ok(sol)
}

/// Per-state power report for a solution.
pub fn power_report(game: &StochasticGame, sol: &RobotSolution) -> PowerReport {
    let rows = (0..game.n_states())
        .map(|s| PowerReportRow {
            state: game.states[s].name.clone(),
            x: (0..game.n_humans()).map(|h| sol.x[h][s]).collect(),
            w_bits: (0..game.n_humans()).map(|h| sol.x[h][s].log2()).collect(),
            u_r: sol.u_r[s],
        })
        .collect();
    PowerReport {
        game: game.name.clone(),
        humans: game.humans.iter().map(|h| h.name.clone()).collect(),
        rows,
    }
}

/// Structural sanity checks on a solution (robot values non-positive,
/// attainment in [0,1], policies normalized).
pub fn check_solution(game: &StochasticGame, sol: &RobotSolution, tol: f64) -> Vec<String> {
    let mut problems = Vec::new();
    for s in 0..game.n_states() {
        for &q in &sol.q_r[s] {
            if q > tol {
                problems.push(format!("q_r > 0 at state {s}: {q}"));
            }
        }
        if sol.u_r[s] > tol {
            problems.push(format!("u_r > 0 at state {s}"));
        }
        if sol.v_r[s] > tol {
            problems.push(format!("v_r > 0 at state {s}"));
        }
        let z: f64 = sol.pi_r[s].iter().sum();
        if (z - 1.0).abs() > 1e-9 {
            problems.push(format!("pi_r not normalized at state {s}"));
        }
        for h in 0..game.n_humans() {
            if !game.goal_recollection {
                for g in 0..game.humans[h].goals.len() {
                    let v = sol.v_e[h][g][s];
                    if !(-tol..=1.0 + tol).contains(&v) {
                        problems.push(format!("v_e outside [0,1] at state {s} (h {h}, g {g}): {v}"));
                    }
                }
            }
        }
    }
    problems
}
