//! Menu game: the robot offers a menu of k options; the human then picks one
//! and the corresponding terminal results. A β_h-soft human hits its
//! intended option with probability e^β / (e^β + k − 1), so
//!
//!   X(s_k) = k · (e^β / (e^β + k − 1))^ζ
//!
//! and the power-maximal menu size is within ±1 of (e^β − 1)/(ζ − 1):
//! larger menus add options but dilute the soft human's accuracy.

use crate::game::{GameBuilder, StochasticGame};

pub fn build_menu(k_max: usize, beta_h: f64, _zeta: f64) -> StochasticGame {
    assert!(k_max >= 1, "menu needs at least one size");
    let mut b = GameBuilder::new("menu");
    let h = b.human("h", 1.0, 0.0, beta_h);
    b.gamma_r(0.9);

    b.initial_state("s0");
    let offers: Vec<String> = (1..=k_max).map(|k| format!("offer_{k}")).collect();
    let offer_refs: Vec<&str> = offers.iter().map(|s| s.as_str()).collect();
    b.robot_acts("s0", &offer_refs);

    for i in 1..=k_max {
        b.terminal_state(&format!("t_{i}"));
    }
    for k in 1..=k_max {
        let menu = format!("s_{k}");
        b.state(&menu);
        b.rtransition("s0", &format!("offer_{k}"), &[(&menu, 1.0)]);
        let picks: Vec<String> = (1..=k).map(|i| format!("pick_{i}")).collect();
        let pick_refs: Vec<&str> = picks.iter().map(|s| s.as_str()).collect();
        b.human_acts(&menu, h, &pick_refs);
        for i in 1..=k {
            b.transition(&menu, "pass", &[&format!("pick_{i}")], &[(&format!("t_{i}"), 1.0)]);
        }
    }
    for i in 1..=k_max {
        b.goal(h, &format!("g_{i}"), &[(&format!("t_{i}"), 1.0)]);
    }

    b.build().expect("menu game is well-formed")
}

/// Closed-form X(s_k) for the k-option menu.
pub fn menu_x(k: usize, beta_h: f64, zeta: f64) -> f64 {
    let acc = beta_h.exp() / (beta_h.exp() + k as f64 - 1.0);
    k as f64 * acc.powf(zeta)
}
