//! Semidefinite upper bound on quantum capacity.

pub mod embed;
pub mod qgamma;
pub mod solver;

pub use qgamma::{
    solve_qgamma, solve_qgamma_with, sweep_qgamma, sweep_qgamma_with, Feasibility, Field,
    QGammaOptions, QGammaProgram, SdpSolution,
};
pub use solver::SdpStatus;
