//! Commitment game: the robot can leave the outcome to its own later choice,
//! commit it outright, or commit to following the human's button press.
//!
//! From the root the robot picks one of four arrangements; in each, the
//! human presses a button and a terminal outcome t_a or t_b results:
//!   - `follow`: the button decides the outcome (responsive commitment),
//!   - `commit_a` / `commit_b`: outcome fixed regardless of button,
//!   - `keep_free`: the robot picks the outcome simultaneously and is under
//!     no commitment (the human's pessimistic prior then expects the worst).
//!
//! With β_h = ∞, ζ = 2 the exact attainment aggregates are X(follow) = 2,
//! X(committed) = 1, and X(free) = 1/2 (the symmetric robot mixes 50/50).

use crate::game::{GameBuilder, StochasticGame};

pub fn build_commitment() -> StochasticGame {
    let mut b = GameBuilder::new("commitment");
    let h = b.human("h", 1.0, 0.0, f64::INFINITY);
    b.gamma_r(0.9);

    b.initial_state("s0");
    for s in ["s_follow", "s_free", "s_commit_a", "s_commit_b"] {
        b.state(s);
    }
    b.terminal_state("t_a");
    b.terminal_state("t_b");

    b.robot_acts("s0", &["choose_follow", "choose_free", "choose_commit_a", "choose_commit_b"]);
    b.rtransition("s0", "choose_follow", &[("s_follow", 1.0)]);
    b.rtransition("s0", "choose_free", &[("s_free", 1.0)]);
    b.rtransition("s0", "choose_commit_a", &[("s_commit_a", 1.0)]);
    b.rtransition("s0", "choose_commit_b", &[("s_commit_b", 1.0)]);

    for s in ["s_follow", "s_free", "s_commit_a", "s_commit_b"] {
        b.human_acts(s, h, &["b1", "b2"]);
    }
    b.robot_acts("s_follow", &["follow"]);
    b.transition("s_follow", "follow", &["b1"], &[("t_a", 1.0)]);
    b.transition("s_follow", "follow", &["b2"], &[("t_b", 1.0)]);

    b.robot_acts("s_free", &["do_a", "do_b"]);
    for button in ["b1", "b2"] {
        b.transition("s_free", "do_a", &[button], &[("t_a", 1.0)]);
        b.transition("s_free", "do_b", &[button], &[("t_b", 1.0)]);
    }

    b.robot_acts("s_commit_a", &["do_a"]);
    b.robot_acts("s_commit_b", &["do_b"]);
    for button in ["b1", "b2"] {
        b.transition("s_commit_a", "do_a", &[button], &[("t_a", 1.0)]);
        b.transition("s_commit_b", "do_b", &[button], &[("t_b", 1.0)]);
    }
    b.commitment("s_commit_a", "s_free", &["do_a"]);
    b.commitment("s_commit_b", "s_free", &["do_b"]);

    b.goal(h, "g_a", &[("t_a", 1.0)]);
    b.goal(h, "g_b", &[("t_b", 1.0)]);

    b.build().expect("commitment game is well-formed")
}
