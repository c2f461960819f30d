//! Backends for the `(d+1) x (d+1)` normal system and the scalar Newton
//! solver for the separable `r`-subproblem.

mod direct;
mod newton;
mod proximal;
mod smw;
mod system;

use serde::{Deserialize, Serialize};

pub use direct::{build_direct, solve_direct, DirectFactor};
pub use newton::{newton_r, NewtonOutcome, NEWTON_MAX_ITER};
pub use proximal::{build_proximal, solve_proximal, ProximalFactor};
pub use smw::{build_smw, solve_smw, SmwFactor};
pub use system::NormalSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Direct,
    Smw2,
    Iterative,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Direct => "direct",
            SolverKind::Smw2 => "smw2",
            SolverKind::Iterative => "iterative",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Picks a backend from the problem shape.
pub fn select_solver(n: usize, d: usize) -> SolverKind {
    if d > 5000 && (n as f64) < 0.2 * d as f64 && n <= 2500 {
        SolverKind::Smw2
    } else if d > 5000 {
        SolverKind::Iterative
    } else {
        SolverKind::Direct
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_table() {
        assert_eq!(select_solver(100, 100), SolverKind::Direct);
        assert_eq!(select_solver(1000, 10000), SolverKind::Smw2);
        assert_eq!(select_solver(30000, 300000), SolverKind::Iterative);
    }

    #[test]
    fn selection_boundaries() {
        assert_eq!(select_solver(10, 5000), SolverKind::Direct);
        assert_eq!(select_solver(10, 5001), SolverKind::Smw2);
        assert_eq!(select_solver(2500, 20000), SolverKind::Smw2);
        assert_eq!(select_solver(2501, 20000), SolverKind::Iterative);
        // n = 0.2 d is not strictly below the ratio.
        assert_eq!(select_solver(1200, 6000), SolverKind::Iterative);
        assert_eq!(select_solver(1199, 6000), SolverKind::Smw2);
    }
}
