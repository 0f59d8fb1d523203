//! Confirmation game: the robot decides how many times (k) to confirm the
//! human's noisy instruction before acting. Each round of k queries is
//! collapsed into one macro-transition from s_k: the instruction comes
//! through correctly with probability (1−ε)^k, is misheard every time with
//! probability ε^k (the robot then does the wrong thing), and otherwise the
//! round was inconclusive and repeats after a k−1 step delay, giving
//!
//!   V^e(s_k, g) = (1−ε)^k / (1 − (1 − (1−ε)^k − ε^k) γ_h^k).
//!
//! More confirmation filters errors but delays fulfillment; the optimum is
//! interior for patient humans and k = 1 for impatient ones.

use crate::game::{GameBuilder, StochasticGame};

pub fn build_confirmation(gamma_h: f64, eps: f64, k_max: usize) -> StochasticGame {
    assert!(k_max >= 1);
    assert!((0.0..0.5).contains(&eps));
    let mut b = GameBuilder::new("confirmation");
    let h = b.human("h", gamma_h, 0.0, f64::INFINITY);
    // The robot only moves once, up front; its own discounting is
    // irrelevant, so an effectively myopic γ_r ranks the asks by U_r.
    b.gamma_r(1e-9);

    b.initial_state("s0");
    b.terminal_state("t_a");
    b.terminal_state("t_b");
    let asks: Vec<String> = (1..=k_max).map(|k| format!("ask_{k}")).collect();
    let ask_refs: Vec<&str> = asks.iter().map(|s| s.as_str()).collect();
    b.robot_acts("s0", &ask_refs);

    for k in 1..=k_max {
        let sk = format!("s_{k}");
        b.state(&sk);
        b.rtransition("s0", &format!("ask_{k}"), &[(&sk, 1.0)]);
        b.human_acts(&sk, h, &["say_a", "say_b"]);
        let p_ok = (1.0 - eps).powi(k as i32);
        let p_bad = eps.powi(k as i32);
        let p_retry = 1.0 - p_ok - p_bad;
        // Delay chain of k−1 states back to s_k for inconclusive rounds.
        let mut retry_entry = sk.clone();
        if p_retry > 0.0 && k > 1 {
            for d in 1..k {
                b.state(&format!("d_{k}_{d}"));
            }
            for d in 1..k {
                let next = if d == k - 1 { sk.clone() } else { format!("d_{k}_{}", d + 1) };
                b.rtransition(&format!("d_{k}_{d}"), "pass", &[(&next, 1.0)]);
            }
            retry_entry = format!("d_{k}_1");
        }
        let mut rows_a = vec![("t_a", p_ok), ("t_b", p_bad)];
        let mut rows_b = vec![("t_b", p_ok), ("t_a", p_bad)];
        if p_retry > 0.0 {
            rows_a.push((retry_entry.as_str(), p_retry));
            rows_b.push((retry_entry.as_str(), p_retry));
        }
        b.transition(&sk, "pass", &["say_a"], &rows_a);
        b.transition(&sk, "pass", &["say_b"], &rows_b);
    }

    b.goal(h, "g_a", &[("t_a", 1.0)]);
    b.goal(h, "g_b", &[("t_b", 1.0)]);
    b.build().expect("confirmation game is well-formed")
}

/// Closed-form V^e(s_k, own goal) for the exact-argmax human.
pub fn confirmation_value(gamma_h: f64, eps: f64, k: usize) -> f64 {
    let p_ok = (1.0 - eps).powi(k as i32);
    let p_bad = eps.powi(k as i32);
    let p_retry = 1.0 - p_ok - p_bad;
    p_ok / (1.0 - p_retry * gamma_h.powi(k as i32))
}
