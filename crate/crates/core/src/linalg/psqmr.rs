//! Preconditioned symmetric QMR (Freund–Nachtigal) for symmetric systems.

use super::dense::{axpy, dot, norm2};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PsqmrOutcome {
    pub x: Vec<f64>,
    /// Operator applications inside the Krylov recurrence.
    pub iterations: usize,
    pub converged: bool,
    /// True residual `‖b − A x‖` at return.
    pub residual_norm: f64,
}

/// Diagonal preconditioner; applies `diag⁻¹`.
#[derive(Debug, Clone)]
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub const FLOOR: f64 = 1e-12;

    pub fn new(diag: &[f64]) -> Self {
        Self { inv_diag: diag.iter().map(|&v| 1.0 / v.max(Self::FLOOR)).collect() }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), di) in out.iter_mut().zip(x).zip(&self.inv_diag) {
            *o = xi * di;
        }
    }
}

/// Solves `A x = b` for symmetric `A` with the symmetric positive definite
/// preconditioner `precond` (which applies `M⁻¹`), starting from `x0`.
///
/// Stops once the true residual is at most `tol`, or after `max_iter`
/// operator applications. A zero inner product in the recurrence is reported
/// as [`Error::PsqmrBreakdown`] together with the last iterate.
pub fn psqmr<A, P>(
    apply: A,
    b: &[f64],
    precond: P,
    tol: f64,
    max_iter: usize,
    x0: &[f64],
) -> Result<PsqmrOutcome>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&[f64], &mut [f64]),
{
    let dim = b.len();
    check_len(dim, x0.len())?;
    let mut x = x0.to_vec();
    let mut iterations = 0;
    let mut aq = vec![0.0; dim];
    let mut u = vec![0.0; dim];

    // Outer loop only repeats if the recursively updated residual drifted
    // away from the true one.
    loop {
        let mut r = if x.iter().all(|&v| v == 0.0) { b.to_vec() } else { true_residual(&apply, b, &x, &mut aq) };
        let err = norm2(&r);
        if err <= tol || iterations >= max_iter {
            return Ok(PsqmrOutcome { x, iterations, converged: err <= tol, residual_norm: err });
        }

        let mut res = r.clone();
        precond(&r, &mut u);
        let mut q = u.clone();
        let mut rho = dot(&r, &u);
        let mut tau = rho.max(0.0).sqrt();
        let mut theta = 0.0;
        let mut d = vec![0.0; dim];
        let mut ad = vec![0.0; dim];

        while iterations < max_iter {
            apply(&q, &mut aq);
            iterations += 1;
            let sigma = dot(&q, &aq);
            if sigma == 0.0 || !sigma.is_finite() || rho == 0.0 {
                return Err(Error::PsqmrBreakdown { iterations, x });
            }
            let alpha = rho / sigma;
            axpy(-alpha, &aq, &mut r);

            precond(&r, &mut u);
            let rtu = dot(&r, &u);
            let theta_new = rtu.max(0.0).sqrt() / tau;
            let c = 1.0 / (1.0 + theta_new * theta_new).sqrt();
            tau *= theta_new * c;
            let gamma = c * c * theta * theta;
            let eta = c * c * alpha;
            for i in 0..dim {
                d[i] = gamma * d[i] + eta * q[i];
                ad[i] = gamma * ad[i] + eta * aq[i];
            }
            axpy(1.0, &d, &mut x);
            axpy(-1.0, &ad, &mut res);
            theta = theta_new;

            if norm2(&res) <= tol {
                break;
            }
            let beta = rtu / rho;
            rho = rtu;
            for i in 0..dim {
                q[i] = u[i] + beta * q[i];
            }
        }
    }
}

fn true_residual<A>(apply: &A, b: &[f64], x: &[f64], scratch: &mut [f64]) -> Vec<f64>
where
    A: Fn(&[f64], &mut [f64]),
{
    apply(x, scratch);
    b.iter().zip(scratch.iter()).map(|(bi, ai)| bi - ai).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(values: Vec<f64>) -> impl Fn(&[f64], &mut [f64]) {
        move |x, y| {
            for i in 0..x.len() {
                y[i] = values[i] * x[i];
            }
        }
    }

    fn identity(x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }

    #[test]
    fn identity_system_in_one_step() {
        let b = [1.0, -2.0, 0.5];
        let out = psqmr(identity, &b, identity, 1e-12, 10, &[0.0; 3]).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 1);
        for i in 0..3 {
            assert!((out.x[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_system() {
        let b = [1.0, 2.0, 3.0];
        let out = psqmr(diag_op(vec![1.0, 2.0, 3.0]), &b, identity, 1e-12, 10, &[0.0; 3]).unwrap();
        assert!(out.converged);
        for xi in &out.x {
            assert!((xi - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_preconditioned_diagonal_converges_immediately() {
        let diag = vec![1.0, 10.0, 100.0];
        let pre = JacobiPreconditioner::new(&diag);
        let out = psqmr(diag_op(diag), &[1.0, 10.0, 100.0], |x: &[f64], y: &mut [f64]| pre.apply(x, y), 1e-12, 10, &[0.0; 3])
            .unwrap();
        assert!(out.converged && out.iterations == 1);
    }

    #[test]
    fn zero_rhs_returns_start() {
        let out = psqmr(identity, &[0.0; 4], identity, 1e-12, 10, &[0.0; 4]).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let values: Vec<f64> = (1..=40).map(|i| i as f64).collect();
        let b = vec![1.0; 40];
        let out = psqmr(diag_op(values), &b, identity, 1e-14, 3, &[0.0; 40]).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn zero_operator_breaks_down() {
        let res = psqmr(|_: &[f64], y: &mut [f64]| y.fill(0.0), &[1.0, 1.0], identity, 1e-12, 10, &[0.0; 2]);
        assert!(matches!(res, Err(Error::PsqmrBreakdown { .. })));
    }
}
