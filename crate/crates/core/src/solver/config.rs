use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsolvers::SolverKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Auto,
    Direct,
    Smw2,
    Iterative,
}

impl Backend {
    pub fn resolve(self, n: usize, d: usize) -> SolverKind {
        match self {
            Backend::Auto => crate::subsolvers::select_solver(n, d),
            Backend::Direct => SolverKind::Direct,
            Backend::Smw2 => SolverKind::Smw2,
            Backend::Iterative => SolverKind::Iterative,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "direct" => Ok(Backend::Direct),
            "smw2" => Ok(Backend::Smw2),
            "iterative" => Ok(Backend::Iterative),
            other => Err(Error::InvalidData(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub q: f64,
    pub max_iter: usize,
    /// Dual steplength `τ`.
    pub steplength: f64,
    pub tol_feas: f64,
    pub tol_cgap: f64,
    pub tol_cap: f64,
    pub sigma0: Option<f64>,
    /// Overrides `c` in `ε_k = c / (k + 1)^1.5`.
    pub epsilon_c: Option<f64>,
    pub backend: Backend,
    /// `false` runs the directly extended ADMM (no second `(w, β)` solve).
    pub use_sgs: bool,
    pub ell: usize,
    pub mu: f64,
    pub psqmr_switch_steps: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            q: 1.0,
            max_iter: 2000,
            steplength: 1.618,
            tol_feas: 1e-5,
            tol_cgap: 1e-5f64.sqrt(),
            tol_cap: 0.05,
            sigma0: None,
            epsilon_c: None,
            backend: Backend::Auto,
            use_sgs: true,
            ell: 10,
            mu: 1.0,
            psqmr_switch_steps: 50,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidData(format!("invalid solver configuration: {what}")));
        if !(self.q > 0.0 && self.q.is_finite()) {
            return bad("q must be positive");
        }
        if !(self.steplength > 0.0 && self.steplength <= 1.618034) {
            return bad("steplength must lie in (0, 1.618034]");
        }
        if !(self.tol_feas > 0.0 && self.tol_cgap > 0.0 && self.tol_cap > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive");
        }
        if self.ell == 0 {
            return bad("ell must be at least 1");
        }
        if matches!(self.sigma0, Some(s) if !(s > 0.0 && s.is_finite())) {
            return bad("sigma0 must be positive");
        }
        if matches!(self.epsilon_c, Some(c) if !(c > 0.0 && c.is_finite())) {
            return bad("epsilon_c must be positive");
        }
        Ok(())
    }
}
