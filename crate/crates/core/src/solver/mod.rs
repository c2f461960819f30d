//! The sGS-ADMM main loop and its tuning and stopping machinery.

mod admm;
mod config;
mod kkt;
mod model;
mod problem;
mod sigma;
mod state;

pub use admm::{sgs_admm_solve, sgs_admm_solve_observed, terminated, IterationInfo, SolveResult};
pub use config::{Backend, SolverConfig};
pub use kkt::{
    dual_objective, feasible_primal_objective, kappa, kkt_residuals, primal_objective, project_dual, KktResiduals,
};
pub use model::{error_rate, train_error, LinearModel};
pub use problem::{
    class_counts, compute_penalty_c, compute_weights, median_class_distance, penalty_formula, scale_problem,
    ProblemData, DISTANCE_SUBSAMPLE,
};
pub use sigma::update_sigma;
pub use state::SolverState;
