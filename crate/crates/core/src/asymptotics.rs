//! Limits and small-aperture regimes of the on-axis bounds.
//!
//! All values assume `N0 = 2`.

use std::f64::consts::PI;

use serde::Serialize;

/// `3λ²/(2π²)`: the bound every axis approaches as the aperture grows.
pub fn fundamental_limit(lambda: f64) -> f64 {
    3.0 * lambda * lambda / (2.0 * PI * PI)
}

/// Depth bound limit with an unknown phase, `6λ²/π²`.
pub fn phase_depth_limit(lambda: f64) -> f64 {
    6.0 * lambda * lambda / (PI * PI)
}

/// Phase bound limit `(1/2 - (8/3 + λ²/(10π² z0²))⁻¹)⁻¹`; tends to 8 for
/// `λ ≪ z0`.
pub fn phase_limit(lambda: f64, z0: f64) -> f64 {
    1.0 / (0.5 - 1.0 / (8.0 / 3.0 + lambda * lambda / (10.0 * PI * PI * z0 * z0)))
}

/// `τ` separating the linear and cubic unknown-phase depth regimes,
/// `2√3 λ / (π z0)`.
pub fn phase_regime_boundary(lambda: f64, z0: f64) -> f64 {
    2.0 * 3f64.sqrt() * lambda / (PI * z0)
}

/// Far-field lateral bound `4λ²/(π²τ²)`.
pub fn farfield_lateral(lambda: f64, tau: f64) -> f64 {
    4.0 * lambda * lambda / (PI * PI * tau * tau)
}

/// Far-field depth bound `λ²/(π²τ)`.
pub fn farfield_depth(lambda: f64, tau: f64) -> f64 {
    lambda * lambda / (PI * PI * tau)
}

/// Leading small-`τ` lateral bound `16 τ⁻² (9/(4z0²) + 4π²/λ²)⁻¹`.
pub fn small_tau_lateral(lambda: f64, z0: f64, tau: f64) -> f64 {
    16.0 / (tau * tau) / (9.0 / (4.0 * z0 * z0) + 4.0 * PI * PI / (lambda * lambda))
}

/// Leading small-`τ` depth bound `16 τ⁻¹ (4/z0² + 16π²/λ²)⁻¹`.
pub fn small_tau_depth(lambda: f64, z0: f64, tau: f64) -> f64 {
    16.0 / tau / (4.0 / (z0 * z0) + 16.0 * PI * PI / (lambda * lambda))
}

/// Small-`τ` lateral bound with the coefficients `(1/z0² + 4π²/λ²)` as
/// commonly quoted; differs from [`small_tau_lateral`] only in the `1/z0²`
/// term.
pub fn small_tau_lateral_printed(lambda: f64, z0: f64, tau: f64) -> f64 {
    16.0 / (tau * tau) / (1.0 / (z0 * z0) + 4.0 * PI * PI / (lambda * lambda))
}

/// Small-`τ` depth bound with the coefficients `(13/z0² + 16π²/λ²)`.
pub fn small_tau_depth_printed(lambda: f64, z0: f64, tau: f64) -> f64 {
    16.0 / tau / (13.0 / (z0 * z0) + 16.0 * PI * PI / (lambda * lambda))
}

/// Unknown-phase depth bound for small `τ`:
/// `48λ²/(π²τ³) · (1 + 12λ²/(π² z0² τ²))⁻¹`.
pub fn phase_depth_small_tau(lambda: f64, z0: f64, tau: f64) -> f64 {
    let l2 = lambda * lambda;
    48.0 * l2 / (PI * PI * tau.powi(3)) / (1.0 + 12.0 * l2 / (PI * PI * z0 * z0 * tau * tau))
}

/// Phase bound for small `τ`: `4(λ² + 4π² z0²)/(τ λ²)`.
pub fn phase_small_tau(lambda: f64, z0: f64, tau: f64) -> f64 {
    4.0 * (lambda * lambda + 4.0 * PI * PI * z0 * z0) / (tau * lambda * lambda)
}

/// Cubic-regime depth bound `48λ²/(π²τ³)`.
pub fn phase_depth_cubic(lambda: f64, tau: f64) -> f64 {
    48.0 * lambda * lambda / (PI * PI * tau.powi(3))
}

/// Linear-regime depth bound `4 z0²/τ`, independent of `λ`.
pub fn phase_depth_linear(z0: f64, tau: f64) -> f64 {
    4.0 * z0 * z0 / tau
}

/// `C_φ / C_z ≈ 4π²/λ²` for small `τ` and `λ ≪ z0`.
pub fn phase_to_depth_ratio(lambda: f64) -> f64 {
    4.0 * PI * PI / (lambda * lambda)
}

/// Which small-aperture law governs the unknown-phase depth bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRegime {
    /// `τ` well below the boundary: `C_z ≈ 4 z0²/τ`.
    Linear,
    /// Within a decade of the boundary.
    Transition,
    /// Between the boundary and `τ ≈ 0.1`: `C_z ≈ 48λ²/(π²τ³)`.
    Cubic,
    /// Large apertures; the small-`τ` forms no longer apply.
    LargeAperture,
}

/// Classify `τ` with a factor-of-ten margin around the regime boundary and
/// an upper edge at `τ = 0.1`.
pub fn classify_phase_regime(lambda: f64, z0: f64, tau: f64) -> PhaseRegime {
    let b = phase_regime_boundary(lambda, z0);
    if tau >= 0.1 {
        PhaseRegime::LargeAperture
    } else if tau <= 0.1 * b {
        PhaseRegime::Linear
    } else if tau >= 10.0 * b {
        PhaseRegime::Cubic
    } else {
        PhaseRegime::Transition
    }
}

/// Everything above evaluated at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub tau: f64,
    pub lambda: f64,
    pub z0: f64,
    pub phase_unknown: bool,
    pub limit: f64,
    pub phase_depth_limit: f64,
    pub phase_limit: f64,
    pub regime_boundary: f64,
    pub regime: PhaseRegime,
    pub ratio_phase_to_depth: f64,
    pub farfield_lateral: f64,
    pub farfield_depth: f64,
    /// Unknown-phase small-`τ` depth and phase bounds, if requested.
    pub phase_depth_small_tau: Option<f64>,
    pub phase_small_tau: Option<f64>,
}

pub fn asymptotics(tau: f64, lambda: f64, z0: f64, phase_unknown: bool) -> AsymptoticsReport {
    AsymptoticsReport {
        tau,
        lambda,
        z0,
        phase_unknown,
        limit: fundamental_limit(lambda),
        phase_depth_limit: phase_depth_limit(lambda),
        phase_limit: phase_limit(lambda, z0),
        regime_boundary: phase_regime_boundary(lambda, z0),
        regime: classify_phase_regime(lambda, z0, tau),
        ratio_phase_to_depth: phase_to_depth_ratio(lambda),
        farfield_lateral: farfield_lateral(lambda, tau),
        farfield_depth: farfield_depth(lambda, tau),
        phase_depth_small_tau: phase_unknown.then(|| phase_depth_small_tau(lambda, z0, tau)),
        phase_small_tau: phase_unknown.then(|| phase_small_tau(lambda, z0, tau)),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}
