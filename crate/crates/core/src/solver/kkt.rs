use super::problem::ProblemData;
use super::state::SolverState;
use crate::linalg::{dot, norm2};

/// Scaled optimality residuals, objectives and the relative duality gap.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktResiduals {
    pub eta_c1: f64,
    pub eta_c2: f64,
    pub eta_c3: f64,
    pub eta_p1: f64,
    pub eta_p2: f64,
    pub eta_p3: f64,
    pub eta_d1: f64,
    pub eta_d2: f64,
    pub eta_gap: f64,
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_c: f64,
    pub obj_primal: f64,
    pub obj_dual: f64,
}

/// `κ = ((q+1)/q) · q^{1/(q+1)}`.
pub fn kappa(q: f64) -> f64 {
    (q + 1.0) / q * q.powf(1.0 / (q + 1.0))
}

/// `Σ ωᵢ / rᵢ^q + C ⟨e, ξ⟩`.
pub fn primal_objective(data: &ProblemData, r: &[f64], xi: &[f64]) -> f64 {
    let loss: f64 = data.weights.iter().zip(r).map(|(w, ri)| w / ri.powf(data.q)).sum();
    loss + data.c * dot(&data.e, xi)
}

/// `κ Σ ωᵢ^{1/(q+1)} αᵢ^{q/(q+1)} − z_scale ‖Z̃ α‖`, with negative `αᵢ`
/// contributing nothing to the first sum.
pub fn dual_objective(data: &ProblemData, alpha: &[f64]) -> f64 {
    let q = data.q;
    let sum: f64 = data
        .weights
        .iter()
        .zip(alpha)
        .map(|(w, a)| w.powf(1.0 / (q + 1.0)) * a.max(0.0).powf(q / (q + 1.0)))
        .sum();
    let za = data.z_tilde.matvec(alpha, false).expect("alpha has length n");
    kappa(q) * sum - data.z_scale * norm2(&za)
}

pub fn kkt_residuals(state: &SolverState, data: &ProblemData, mu: f64) -> KktResiduals {
    let ztw = data.z_tilde.matvec(&state.w, true).expect("w has length d");
    kkt_residuals_with(state, data, mu, &ztw)
}

/// As [`kkt_residuals`], reusing a precomputed `Z̃ᵀw`.
pub(crate) fn kkt_residuals_with(state: &SolverState, data: &ProblemData, mu: f64, ztw: &[f64]) -> KktResiduals {
    assert!(state.r.iter().all(|&r| r > 0.0), "r must stay positive");
    let q = data.q;
    let scale = 1.0 + data.c;

    let eta_c1 = dot(&data.y, &state.alpha).abs() / scale;
    let slack_gap: f64 =
        state.xi.iter().zip(&state.alpha).zip(&data.e).map(|((x, a), e)| x * (data.c * e - a)).sum();
    let eta_c2 = slack_gap.abs() / scale;
    let c3: f64 = state
        .alpha
        .iter()
        .zip(&state.r)
        .zip(&data.weights)
        .map(|((a, r), w)| {
            let s = q * w / r.powf(q + 1.0);
            (a - s) * (a - s)
        })
        .sum();
    let eta_c3 = c3 / scale;

    let p1: f64 = (0..state.r.len())
        .map(|i| {
            let v = ztw[i] + state.beta * data.y[i] + state.xi[i] - state.r[i];
            v * v
        })
        .sum();
    let eta_p1 = p1.sqrt() / scale;
    let p2: f64 = state.w.iter().zip(&state.u).map(|(w, u)| (mu * (w - u)).powi(2)).sum();
    let eta_p2 = p2.sqrt() / scale;
    let eta_p3 = (norm2(&state.w) - data.z_scale).max(0.0) / scale;

    let d1: f64 = state.alpha.iter().map(|a| a.min(0.0).powi(2)).sum();
    let eta_d1 = d1.sqrt() / scale;
    let d2: f64 = state.alpha.iter().zip(&data.e).map(|(a, e)| (a - data.c * e).max(0.0).powi(2)).sum();
    let eta_d2 = d2.sqrt() / scale;

    let obj_primal = primal_objective(data, &state.r, &state.xi);
    let obj_dual = dual_objective(data, &state.alpha);
    let eta_gap = (obj_primal - obj_dual).abs() / (1.0 + obj_primal.abs() + obj_dual.abs());

    KktResiduals {
        eta_c1,
        eta_c2,
        eta_c3,
        eta_p1,
        eta_p2,
        eta_p3,
        eta_d1,
        eta_d2,
        eta_gap,
        eta_p: eta_p1.max(eta_p2).max(eta_p3),
        eta_d: eta_d1.max(eta_d2),
        eta_c: eta_c1.max(eta_c2).max(eta_c3),
        obj_primal,
        obj_dual,
    }
}

/// Euclidean projection of `alpha` onto `{0 ≤ α ≤ C e, ⟨y, α⟩ = 0}` for
/// `y ∈ {±1}ⁿ`, by bisection on the multiplier of the equality.
pub fn project_dual(alpha: &[f64], y: &[f64], c: f64, e: &[f64]) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> {
        alpha.iter().zip(y).zip(e).map(|((a, yi), ei)| (a - lam * yi).clamp(0.0, c * ei)).collect()
    };
    let bound = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // ⟨y, α(λ)⟩ is nonincreasing in λ.
        if dot(y, &at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a_lo = at(lo);
    let a_hi = at(hi);
    let (g_lo, g_hi) = (dot(y, &a_lo), dot(y, &a_hi));
    if g_lo == g_hi {
        return a_lo;
    }
    // ⟨y, α(λ)⟩ is piecewise linear; interpolate within the final bracket.
    let t = g_lo / (g_lo - g_hi);
    a_lo.iter().zip(&a_hi).map(|(l, h)| l + t * (h - l)).collect()
}

/// Primal objective at the nearest feasible point that keeps `β`: `w` pulled
/// into the ball, then `ξ` and `r` raised until the constraint holds with
/// `r` no smaller than the iterate's.
pub fn feasible_primal_objective(state: &SolverState, data: &ProblemData) -> f64 {
    let nrm = norm2(&state.w);
    let w: Vec<f64> = if nrm > data.z_scale {
        state.w.iter().map(|v| v * data.z_scale / nrm).collect()
    } else {
        state.w.clone()
    };
    let ztw = data.z_tilde.matvec(&w, true).expect("w has length d");
    let mut xi = Vec::with_capacity(state.r.len());
    let mut r = Vec::with_capacity(state.r.len());
    for i in 0..state.r.len() {
        let margin = ztw[i] + state.beta * data.y[i];
        let slack = (state.r[i] - margin).max(0.0);
        xi.push(slack);
        r.push(margin + slack);
    }
    primal_objective(data, &r, &xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_at_one() {
        assert!((kappa(1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn projection_is_feasible() {
        let y = [1.0, 1.0, -1.0, -1.0, 1.0];
        let alpha = [3.0, -1.0, 0.5, 7.0, 2.0];
        let p = project_dual(&alpha, &y, 4.0, &[1.0; 5]);
        assert!(dot(&y, &p).abs() < 1e-12);
        assert!(p.iter().all(|&a| (0.0..=4.0).contains(&a)));
    }

    #[test]
    fn projection_keeps_feasible_points() {
        let y = [1.0, -1.0, 1.0, -1.0];
        let alpha = [0.5, 0.25, 0.25, 0.5];
        let p = project_dual(&alpha, &y, 1.0, &[1.0; 4]);
        for (a, b) in p.iter().zip(&alpha) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
