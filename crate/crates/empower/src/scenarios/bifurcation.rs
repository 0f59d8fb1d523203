//! Self-trust loop: one human at a single state with a persistent goal "be
//! here", able to stay or to leave for an absorbing sink. With goal
//! recollection on, the stay value satisfies V = p(1 + γV) where
//! p = π(stay), so the softmax policy solves the scalar fixed point
//!
//!   p = σ(β / (1 − γ p)).
//!
//! For small β this has a single root; past a critical β a saddle-node pair
//! of additional roots appears, so the long-run habit of staying can jump
//! discontinuously as rationality grows.

use crate::game::{GameBuilder, StochasticGame};

/// Single-state stay/leave game realizing the scalar fixed point above.
pub fn build_bifurcation(gamma: f64, beta: f64) -> StochasticGame {
    let mut b = GameBuilder::new("bifurcation");
    let h = b.human("h", gamma, 0.0, beta);
    b.initial_state("s");
    b.terminal_state("t");
    b.robot_acts("s", &["pass"]);
    b.human_acts("s", h, &["stay", "leave"]);
    b.transition("s", "pass", &["stay"], &[("s", 1.0)]);
    b.transition("s", "pass", &["leave"], &[("t", 1.0)]);
    b.goal(h, "here", &[("s", 1.0)]);
    b.goal_recollection();
    b.relax_goal_cover();
    b.relax_mutual_unreachability();
    b.gamma_r(0.9);
    b.build().expect("bifurcation game is valid by construction")
}

fn sigma(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// f(p) = σ(β / (1 − γ p)) − p, whose roots are the self-consistent stay
/// probabilities.
pub fn stay_residual(gamma: f64, beta: f64, p: f64) -> f64 {
    sigma(beta / (1.0 - gamma * p)) - p
}

/// All roots of p = σ(β / (1 − γ p)) on [0, 1], found by sign-change scan
/// plus bisection. Requires γ ∈ [0, 1) and β ≥ 0.
pub fn bifurcation_fixed_points(gamma: f64, beta: f64) -> Vec<f64> {
    assert!((0.0..1.0).contains(&gamma), "gamma must be in [0, 1)");
    assert!(beta >= 0.0 && beta.is_finite(), "beta must be finite and nonnegative");
    let n = 20_000;
    let mut roots = Vec::new();
    let mut p_prev = 0.0;
    let mut f_prev = stay_residual(gamma, beta, p_prev);
    for i in 1..=n {
        let p = i as f64 / n as f64;
        let f = stay_residual(gamma, beta, p);
        if f_prev == 0.0 {
            roots.push(p_prev);
        } else if f_prev.signum() != f.signum() {
            // Bisect the bracket.
            let (mut lo, mut hi) = (p_prev, p);
            let mut f_lo = f_prev;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let f_mid = stay_residual(gamma, beta, mid);
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_lo.signum() == f_mid.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        p_prev = p;
        f_prev = f;
    }
    if f_prev == 0.0 {
        roots.push(p_prev);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
}

/// Root structure of the stay fixed point across a β sweep at fixed γ.
#[derive(Debug, Clone)]
pub struct BifurcationScan {
    pub gamma: f64,
    /// (β, roots sorted ascending) per sweep point.
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl BifurcationScan {
    pub fn run(gamma: f64, beta_min: f64, beta_max: f64, steps: usize) -> Self {
        assert!(steps >= 2 && beta_max > beta_min);
        let rows = (0..steps)
            .map(|i| {
                let beta =
                    beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64;
                (beta, bifurcation_fixed_points(gamma, beta))
            })
            .collect();
        BifurcationScan { gamma, rows }
    }

    /// β values at which the number of roots changes between consecutive
    /// sweep points (onset and end of the multistable window).
    pub fn root_count_changes(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[0].1.len() != w[1].1.len())
            .map(|w| 0.5 * (w[0].0 + w[1].0))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,n_roots,roots\n");
        for (beta, roots) in &self.rows {
            let list: Vec<String> = roots.iter().map(|r| format!("{r:.6}")).collect();
            out.push_str(&format!("{},{},{}\n", beta, roots.len(), list.join(";")));
        }
        out
    }
}
