const THETA: f64 = 5.0;

/// Rebalances `σ` from the ratio `χ = η_P / η_D`.
///
/// An exactly zero `η_D` (multipliers inside their box) carries no balance
/// information, so `σ` is kept.
pub fn update_sigma(sigma: f64, eta_p: f64, eta_d: f64) -> f64 {
    if eta_d == 0.0 {
        return sigma;
    }
    let chi = eta_p / eta_d;
    let spread = chi.max(1.0 / chi);
    let zeta = if spread > 500.0 {
        2.2
    } else if spread > 50.0 {
        1.65
    } else {
        1.1
    };
    if chi > THETA {
        sigma * zeta
    } else if 1.0 / chi > THETA {
        sigma / zeta
    } else {
        sigma
    }
}
