use std::time::Instant;

use rayon::prelude::*;

use super::config::SolverConfig;
use super::kkt::{kkt_residuals_with, KktResiduals};
use super::problem::ProblemData;
use super::sigma::update_sigma;
use super::state::SolverState;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, psqmr, JacobiPreconditioner};
use crate::subsolvers::{
    build_direct, build_proximal, build_smw, newton_r, solve_direct, solve_proximal, solve_smw, DirectFactor,
    NormalSystem, ProximalFactor, SmwFactor, SolverKind,
};

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Weights in the scaled space (`‖w‖ ≤ z_scale`).
    pub w: Vec<f64>,
    pub beta: f64,
    pub converged: bool,
    pub iterations: usize,
    pub psqmr_total: usize,
    pub double_count: usize,
    /// Seconds, including factorization.
    pub solve_time: f64,
    pub final_residuals: KktResiduals,
    pub backend_used: SolverKind,
    pub state: SolverState,
}

/// Snapshot handed to the observer after every iteration.
#[derive(Debug)]
pub struct IterationInfo<'a> {
    /// Zero-based iteration index `k`.
    pub k: usize,
    pub eps: f64,
    /// `σ` used during this iteration.
    pub sigma: f64,
    pub prev: &'a SolverState,
    pub state: &'a SolverState,
    pub residuals: &'a KktResiduals,
    pub w_bar: &'a [f64],
    pub beta_bar: f64,
    /// `‖hᵏ − A [w̄; β̄]‖` for the second `(w, β)` solve, when it runs.
    pub step1c_residual: Option<f64>,
    /// Whether the second solve was redone instead of reusing `(w̄, β̄)`.
    pub resolved: bool,
    /// Whether the proximal term was active.
    pub proximal: bool,
}

pub fn sgs_admm_solve(data: &ProblemData, cfg: &SolverConfig) -> Result<SolveResult> {
    sgs_admm_solve_observed(data, cfg, &mut |_| {})
}

pub fn sgs_admm_solve_observed(
    data: &ProblemData,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&IterationInfo<'_>),
) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let (n, d) = (data.n(), data.d());
    let z = &data.z_tilde;
    let y = &data.y[..];
    let q = data.q;
    let mu = cfg.mu;
    let mu_sq = mu * mu;
    let tau = cfg.steplength;

    let kind = cfg.backend.resolve(n, d);
    let mut lin = LinearSolver::new(kind, data, mu_sq, cfg)?;

    let sigma0 = cfg.sigma0.unwrap_or_else(|| (10.0 * data.c).min(n as f64).powf(q));
    let eps_c = cfg.epsilon_c.unwrap_or_else(|| 1.0 / z.frobenius_norm().max(1.0));
    let mut st = SolverState::initial(n, d, sigma0, eps_c);
    let mut ztw = vec![0.0; n];
    let mut residuals = kkt_residuals_with(&st, data, mu, &ztw);
    let mut converged = false;
    let mut double_count = 0;

    for k in 0..cfg.max_iter {
        let prev = st.clone();
        let sigma = st.sigma;
        let eps = st.eps(k);

        // (w̄, β̄) against the current r, ξ, u.
        let v: Vec<f64> = (0..n).map(|i| st.xi[i] - st.r[i] - st.alpha[i] / sigma).collect();
        let h = rhs(data, &v, &st.u, &st.rho, sigma, mu)?;
        let mut x0 = st.w.clone();
        x0.push(st.beta);
        let x_bar = lin.solve(&h, &st.w, eps, &x0)?;
        let w_bar = &x_bar[..d];
        let beta_bar = x_bar[d];

        // r from the separable subproblem.
        let ztw_bar = z.matvec(w_bar, true)?;
        let c_vec: Vec<f64> =
            (0..n).map(|i| ztw_bar[i] + y[i] * beta_bar + st.xi[i] - st.alpha[i] / sigma).collect();
        let newton_tol = eps / (n as f64).sqrt();
        let r_new: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| newton_r(c_vec[i], sigma, q, data.weights[i], st.r[i], newton_tol).r)
            .collect();

        // (w, β) again against the new r, reusing (w̄, β̄) when accurate enough.
        let proximal_before = lin.proximal_active();
        let mut step1c_residual = None;
        let mut resolved = false;
        let (w_new, beta_new, ztw_new) = if cfg.use_sgs {
            let diff: Vec<f64> = c_vec.iter().zip(&r_new).map(|(c, r)| c - r).collect();
            let mut top = z.matvec(&diff, false)?;
            for j in 0..d {
                top[j] = -top[j] + mu_sq * (st.u[j] - w_bar[j]) + mu * st.rho[j] / sigma;
            }
            if let Some(t) = lin.apply_t(&sub(&st.w, w_bar))? {
                for (tj, v) in top.iter_mut().zip(t) {
                    *tj += v;
                }
            }
            let bottom = -dot(y, &diff);
            let res = (dot(&top, &top) + bottom * bottom).sqrt();
            step1c_residual = Some(res);
            if res <= 5.0 * eps {
                (w_bar.to_vec(), beta_bar, ztw_bar)
            } else {
                resolved = true;
                double_count += 1;
                let v2: Vec<f64> = (0..n).map(|i| st.xi[i] - r_new[i] - st.alpha[i] / sigma).collect();
                let h2 = rhs(data, &v2, &st.u, &st.rho, sigma, mu)?;
                let x = lin.solve(&h2, &st.w, eps, &x_bar)?;
                let ztw_x = z.matvec(&x[..d], true)?;
                (x[..d].to_vec(), x[d], ztw_x)
            }
        } else {
            (w_bar.to_vec(), beta_bar, ztw_bar)
        };
        st.w = w_new;
        st.beta = beta_new;
        st.r = r_new;
        ztw = ztw_new;

        // (u, ξ).
        let g: Vec<f64> = st.w.iter().zip(&st.rho).map(|(w, r)| w - r / (sigma * mu)).collect();
        st.u = project_ball(g, data.z_scale);
        for i in 0..n {
            st.xi[i] = (st.r[i] - ztw[i] - y[i] * st.beta + st.alpha[i] / sigma - data.c * data.e[i] / sigma)
                .max(0.0);
        }

        // Multipliers.
        for i in 0..n {
            st.alpha[i] -= tau * sigma * (ztw[i] + y[i] * st.beta + st.xi[i] - st.r[i]);
        }
        for j in 0..d {
            st.rho[j] -= tau * sigma * mu * (st.w[j] - st.u[j]);
        }
        st.iter = k + 1;

        residuals = kkt_residuals_with(&st, data, mu, &ztw);
        observer(&IterationInfo {
            k,
            eps,
            sigma,
            prev: &prev,
            state: &st,
            residuals: &residuals,
            w_bar,
            beta_bar,
            step1c_residual,
            resolved,
            proximal: proximal_before,
        });
        if terminated(&residuals, cfg) {
            converged = true;
            break;
        }
        st.sigma = update_sigma(sigma, residuals.eta_p, residuals.eta_d);
    }

    Ok(SolveResult {
        w: st.w.clone(),
        beta: st.beta,
        converged,
        iterations: st.iter,
        psqmr_total: lin.psqmr_total,
        double_count,
        solve_time: start.elapsed().as_secs_f64(),
        final_residuals: residuals,
        backend_used: kind,
        state: st,
    })
}

pub fn terminated(res: &KktResiduals, cfg: &SolverConfig) -> bool {
    res.eta_p.max(res.eta_d) < cfg.tol_feas
        && res.eta_c.min(res.eta_gap) < cfg.tol_cgap
        && res.eta_c.max(res.eta_gap) < cfg.tol_cap
}

/// `[−Z̃v + μ²u + μρ/σ; −yᵀv]`, without any proximal contribution.
fn rhs(data: &ProblemData, v: &[f64], u: &[f64], rho: &[f64], sigma: f64, mu: f64) -> Result<Vec<f64>> {
    let mut h = data.z_tilde.matvec(v, false)?;
    for j in 0..h.len() {
        h[j] = -h[j] + mu * mu * u[j] + mu * rho[j] / sigma;
    }
    h.push(-dot(&data.y, v));
    Ok(h)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn project_ball(mut g: Vec<f64>, radius: f64) -> Vec<f64> {
    let nrm = norm2(&g);
    if nrm > radius {
        let s = radius / nrm;
        for v in &mut g {
            *v *= s;
        }
    }
    g
}

enum Active<'a> {
    Direct(DirectFactor),
    Smw(SmwFactor),
    Krylov(NormalSystem<'a>, JacobiPreconditioner),
    Proximal(ProximalFactor),
}

/// The linear-system backend for one solve, including the one-way switch
/// from PSQMR to the proximal system.
struct LinearSolver<'a> {
    data: &'a ProblemData,
    mu_sq: f64,
    active: Active<'a>,
    psqmr_total: usize,
    switch_steps: usize,
    ell: usize,
    seed: u64,
}

impl<'a> LinearSolver<'a> {
    fn new(kind: SolverKind, data: &'a ProblemData, mu_sq: f64, cfg: &SolverConfig) -> Result<Self> {
        let (z, y) = (&data.z_tilde, &data.y[..]);
        let active = match kind {
            SolverKind::Direct => Active::Direct(build_direct(z, y, mu_sq)?),
            SolverKind::Smw2 => Active::Smw(build_smw(z, y, mu_sq)?),
            SolverKind::Iterative => {
                let system = NormalSystem::new(z, y, mu_sq)?;
                let pre = JacobiPreconditioner::new(&system.diagonal());
                Active::Krylov(system, pre)
            }
        };
        Ok(Self {
            data,
            mu_sq,
            active,
            psqmr_total: 0,
            switch_steps: cfg.psqmr_switch_steps,
            ell: cfg.ell,
            seed: cfg.seed,
        })
    }

    fn proximal_active(&self) -> bool {
        matches!(self.active, Active::Proximal(_))
    }

    /// `𝒯 x` when the proximal term is active.
    fn apply_t(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        match &self.active {
            Active::Proximal(f) => Ok(Some(f.apply_t(&self.data.z_tilde, x)?)),
            _ => Ok(None),
        }
    }

    /// Solves the system with right-hand side `h` (plus `𝒯 wᵏ` when the
    /// proximal term is active) to residual `tol`.
    fn solve(&mut self, h: &[f64], wk: &[f64], tol: f64, x0: &[f64]) -> Result<Vec<f64>> {
        let data = self.data;
        match &self.active {
            Active::Direct(f) => return solve_direct(f, h),
            Active::Smw(f) => return solve_smw(f, &data.z_tilde, &data.y, h),
            Active::Proximal(f) => {
                let mut h_t = h.to_vec();
                for (hj, tj) in h_t.iter_mut().zip(f.apply_t(&data.z_tilde, wk)?) {
                    *hj += tj;
                }
                return solve_proximal(f, &h_t);
            }
            Active::Krylov(system, pre) => {
                match psqmr(|x, o| system.apply(x, o), h, |x, o| pre.apply(x, o), tol, self.switch_steps, x0) {
                    Ok(out) => {
                        self.psqmr_total += out.iterations;
                        if out.converged {
                            return Ok(out.x);
                        }
                    }
                    Err(Error::PsqmrBreakdown { iterations, .. }) => self.psqmr_total += iterations,
                    Err(other) => return Err(other),
                }
            }
        }
        let factor = build_proximal(&data.z_tilde, &data.y, self.mu_sq, self.ell, self.seed)?;
        self.active = Active::Proximal(factor);
        self.solve(h, wk, tol, x0)
    }
}
