//! Tabular solvers, learners, and scenario builders for stochastic games in
//! which a robot softly maximizes an inequality-averse aggregate of the
//! humans' goal-achievement power.
//!
//! Pipeline: [`game`] defines the model; [`prior`] computes each human's
//! pessimistic goal-specific policy prior; [`planner`] solves the robot's
//! soft policy against those priors under the [`power`] objective;
//! [`learner`] reproduces both stages with tabular temporal-difference
//! learning; [`scenarios`] builds the benchmark games; [`gamespec`] is the
//! text format and [`cli`] the command-line frontend.

pub mod bandit;
pub mod cache;
pub mod cli;
pub mod game;
pub mod gamespec;
pub mod learner;
pub mod planner;
pub mod power;
pub mod prior;
pub mod scenarios;
