/// Primal and dual iterates of the ADMM in the scaled space.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub r: Vec<f64>,
    pub xi: Vec<f64>,
    pub alpha: Vec<f64>,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub beta: f64,
    pub sigma: f64,
    pub iter: usize,
    /// The `c` in `ε_k = c / (k + 1)^1.5`.
    pub eps_c: f64,
}

impl SolverState {
    /// `w = u = 0`, `β = 0`, `ξ = r = 1`, `α = ρ = 0`.
    pub fn initial(n: usize, d: usize, sigma: f64, eps_c: f64) -> Self {
        Self {
            r: vec![1.0; n],
            xi: vec![1.0; n],
            alpha: vec![0.0; n],
            w: vec![0.0; d],
            u: vec![0.0; d],
            rho: vec![0.0; d],
            beta: 0.0,
            sigma,
            iter: 0,
            eps_c,
        }
    }

    pub fn eps(&self, k: usize) -> f64 {
        self.eps_c / ((k + 1) as f64).powf(1.5)
    }
}
