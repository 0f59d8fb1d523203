//! Resource-split game: the robot divides a resource budget M between two
//! humans on a grid of split points m ∈ {0, Δ, …, M}. Each human's resulting
//! power is prescribed as W_1 = f(m), W_2 = f(M − m) bits (X = 2^f), for a
//! choice of diminishing- or increasing-returns curve f.

use crate::game::{GameBuilder, StochasticGame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResourceCurve {
    /// f(m) = m² + 0.1 ln m: increasing returns with a logarithmic penalty
    /// near zero; the inequality-averse optimum is an asymmetric split.
    SquareLog,
    /// f(m) = m²: pure increasing returns; full concentration is optimal.
    Square,
    /// f(m) = √m: diminishing returns; the even split is optimal.
    Sqrt,
}

/// Power curve in bits, floored so X = 2^f stays positive at m = 0.
pub fn resource_reward(curve: ResourceCurve, m: f64) -> f64 {
    let f = match curve {
        ResourceCurve::SquareLog => m * m + 0.1 * m.ln(),
        ResourceCurve::Square => m * m,
        ResourceCurve::Sqrt => m.sqrt(),
    };
    f.max(-60.0)
}

pub fn build_resource(curve: ResourceCurve, m_total: f64, grid_step: f64) -> StochasticGame {
    assert!(m_total > 0.0 && grid_step > 0.0 && grid_step <= 0.005 * m_total.max(1.0));
    let n = (m_total / grid_step).round() as usize;
    let mut b = GameBuilder::new("resource");
    let h1 = b.human("h1", 0.99, 0.0, f64::INFINITY);
    let h2 = b.human("h2", 0.99, 0.0, f64::INFINITY);
    b.gamma_r(1e-9);
    b.relax_mutual_unreachability();

    b.initial_state("s0");
    let splits: Vec<String> = (0..=n).map(|i| format!("split_{i}")).collect();
    let split_refs: Vec<&str> = splits.iter().map(|s| s.as_str()).collect();
    b.robot_acts("s0", &split_refs);
    // Root powers: the undecided state is taken at the even split's levels;
    // with γ_r ≈ 0 it does not influence the choice.
    let mid = resource_reward(curve, m_total / 2.0);
    b.inject_x(h1, "s0", 2f64.powf(mid));
    b.inject_x(h2, "s0", 2f64.powf(mid));

    for i in 0..=n {
        let m = i as f64 * grid_step;
        let t = format!("t_{i}");
        b.terminal_state(&t);
        b.rtransition("s0", &format!("split_{i}"), &[(&t, 1.0)]);
        b.inject_x(h1, &t, 2f64.powf(resource_reward(curve, m)));
        b.inject_x(h2, &t, 2f64.powf(resource_reward(curve, m_total - m)));
    }

    // Nominal goal families (powers are prescribed above): each human can
    // always "settle" wherever the game ends.
    let all: Vec<(String, f64)> =
        std::iter::once(("s0".to_string(), 1.0))
            .chain((0..=n).map(|i| (format!("t_{i}"), 1.0)))
            .collect();
    let all_refs: Vec<(&str, f64)> = all.iter().map(|(s, w)| (s.as_str(), *w)).collect();
    b.goal(h1, "settle", &all_refs);
    b.goal(h2, "settle", &all_refs);

    b.build().expect("resource game is well-formed")
}
