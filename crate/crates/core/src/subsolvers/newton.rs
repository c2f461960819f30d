pub const NEWTON_MAX_ITER: usize = 50;
const BISECTION_MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    pub r: f64,
    /// Newton steps taken (at most [`NEWTON_MAX_ITER`]).
    pub iterations: usize,
    /// Whether the bisection safeguard produced the root.
    pub bisected: bool,
}

/// Minimizes `weight / s^q + (σ/2)(s − a)²` over `s > 0`.
///
/// Stops when `|−q·weight/r^{q+1} + σ(r − a)| ≤ tol`. Falls back to bisection
/// if an iterate leaves `(0, ∞)` or Newton runs out of steps.
pub fn newton_r(a: f64, sigma: f64, q: f64, weight: f64, r_init: f64, tol: f64) -> NewtonOutcome {
    debug_assert!(sigma > 0.0 && q > 0.0 && weight > 0.0);
    let qw_sigma = q * weight / sigma;
    let grad = |s: f64| -q * weight / s.powf(q + 1.0) + sigma * (s - a);

    let mut s = if r_init > 0.0 && r_init.is_finite() { r_init } else { 1.0 };
    let mut iterations = 0;
    loop {
        if grad(s).abs() <= tol {
            return NewtonOutcome { r: s, iterations, bisected: false };
        }
        if iterations == NEWTON_MAX_ITER {
            break;
        }
        iterations += 1;
        let sq1 = s.powf(q + 1.0);
        let next = s * ((q + 2.0) * qw_sigma + a * sq1) / ((q + 1.0) * qw_sigma + sq1 * s);
        if !(next > 0.0 && next.is_finite()) {
            break;
        }
        s = next;
    }
    NewtonOutcome { r: bisect(&grad, a, qw_sigma, q, tol), iterations, bisected: true }
}

fn bisect(grad: &impl Fn(f64) -> f64, a: f64, qw_sigma: f64, q: f64, tol: f64) -> f64 {
    let mut lo = 1e-12;
    let mut hi = a.max(0.0) + qw_sigma.powf(1.0 / (q + 2.0)) + 1.0;
    while grad(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut best = hi;
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = grad(mid);
        if g.abs() < grad(best).abs() {
            best = mid;
        }
        if g.abs() <= tol {
            break;
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}
