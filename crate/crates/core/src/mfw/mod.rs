//! Meta-Frank-Wolfe engines for down-closed and general bodies, their step
//! schedules, and the doubling wrapper.

mod doubling;
mod engine;
mod schedule;

pub use doubling::{phase_lengths, phase_levels, phase_of, DoublingLearner, PhaseFactory};
pub use engine::{
    coordinate_slack, default_levels_down_closed, default_levels_general, infinity_norm_slack,
    MfwConfig, MfwDownClosed, MfwGeneral, OnlineLearner, LEVEL_CAP,
};
pub use schedule::{default_rho, harmonic_number, GradientAverager, StepSchedule, KAPPA};
