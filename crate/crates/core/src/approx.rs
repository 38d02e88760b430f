//! Closed-form approximations for terminals off the panel axis.
//!
//! Near-axis model: the off-axis Fisher matrix is built from the on-axis
//! information at the slant range `z1`,
//!
//! ```text
//! α = (z0/z1) I_xy(z1, R)      β = (z0/z1)³ I_z(z1, R)
//! I ≈ α diag(1, 1, 0) + β v vᵀ,  v = (x0/z0, y0/z0, 1)
//! ```
//!
//! whose inverse is known in closed form. The far-field version further
//! replaces `I_xy`, `I_z` by their small-`τ` leading terms.

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;

use crate::crlb::{condition_number, crlb_from_fisher, CrlbError, CrlbReport};
use crate::fisher::{cpl_information, FisherMatrix, Method};
use crate::geometry::{derive_local, mild_conditions_local, MildConditionReport, Terminal, DEFAULT_MILD_EPSILON};

/// Default upper `τ` for the far-field formulas.
pub const FARFIELD_MAX_TAU: f64 = 0.05;

/// The two scalar informations of the near-axis model, including `2/N0`.
pub fn alpha_beta(local: &Terminal, radius: f64, lambda: f64, n0: f64) -> (f64, f64) {
    let z0 = local.z0;
    let z1 = local.range();
    let (ixy, iz) = cpl_information(z1, radius, lambda);
    let k = 2.0 / n0;
    (k * z0 / z1 * ixy, k * (z0 / z1).powi(3) * iz)
}

/// Near-axis Fisher matrix `α diag(1,1,0) + β v vᵀ`.
pub fn fisher_approx_noncpl(local: &Terminal, radius: f64, lambda: f64, n0: f64) -> FisherMatrix {
    let (a, b) = alpha_beta(local, radius, lambda, n0);
    let v = [local.x0 / local.z0, local.y0 / local.z0, 1.0];
    let m = DMatrix::from_fn(3, 3, |i, j| b * v[i] * v[j] + if i == j && i < 2 { a } else { 0.0 });
    FisherMatrix::new(m, Method::OffAxisApprox).expect("finite for valid geometry")
}

/// The closed-form inverse of [`fisher_approx_noncpl`].
pub fn crlb_matrix_direct(local: &Terminal, alpha: f64, beta: f64) -> DMatrix<f64> {
    let (x0, y0, z0) = (local.x0, local.y0, local.z0);
    let mut c = DMatrix::zeros(3, 3);
    c[(0, 0)] = 1.0 / alpha;
    c[(1, 1)] = 1.0 / alpha;
    c[(0, 2)] = -x0 / (alpha * z0);
    c[(2, 0)] = c[(0, 2)];
    c[(1, 2)] = -y0 / (alpha * z0);
    c[(2, 1)] = c[(1, 2)];
    c[(2, 2)] = 1.0 / beta + (x0 * x0 + y0 * y0) / (alpha * z0 * z0);
    c
}

/// Both inversions of the near-axis model.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCrlb {
    /// Numerical inverse of the assembled matrix.
    pub inverted: CrlbReport,
    /// Closed-form inverse.
    pub direct: CrlbReport,
    pub mild: MildConditionReport,
}

impl ApproxCrlb {
    /// Largest relative difference between the two inverses.
    pub fn route_discrepancy(&self) -> f64 {
        let d = &self.inverted.matrix - &self.direct.matrix;
        let scale = self.direct.matrix.amax();
        d.amax() / scale
    }
}

/// Near-axis CRLB. Logs a warning when the mild conditions fail but still
/// evaluates the formulas.
pub fn crlb_approx_noncpl(local: &Terminal, radius: f64, lambda: f64, n0: f64) -> Result<ApproxCrlb, CrlbError> {
    let mild = mild_conditions_local(local, radius, lambda, DEFAULT_MILD_EPSILON);
    if !mild.holds() {
        warn!(
            "near-axis approximation outside its validity range (λ ratio {:.3}, aperture ratio {:.3})",
            mild.wavelength_ratio, mild.aperture_ratio
        );
    }
    let f = fisher_approx_noncpl(local, radius, lambda, n0);
    let inverted = crlb_from_fisher(&f)?;
    let (a, b) = alpha_beta(local, radius, lambda, n0);
    let direct = CrlbReport::from_matrix(crlb_matrix_direct(local, a, b), condition_number(f.matrix())?, Method::OffAxisDirect);
    Ok(ApproxCrlb { inverted, direct, mild })
}

/// Far-field bounds
/// `C_xy ≈ 4λ² z1⁵ / (π² z0 R⁴)` and
/// `C_z ≈ λ² z0² / (π² R²) + 4λ² (x0² + y0²) z1⁵ / (π² z0³ R⁴)`, times `N0/2`.
///
/// The first term of `C_z` is the on-axis value; the near-axis model itself
/// would give `λ² z1⁵ / (π² z0³ R²)` there, which differs once `r_perp` is
/// comparable to `z0`.
pub fn crlb_farfield_approx(local: &Terminal, radius: f64, lambda: f64, n0: f64) -> CrlbReport {
    crlb_farfield_approx_checked(local, radius, lambda, n0, FARFIELD_MAX_TAU)
}

/// [`crlb_farfield_approx`] with a configurable `τ` ceiling for the warning.
pub fn crlb_farfield_approx_checked(local: &Terminal, radius: f64, lambda: f64, n0: f64, max_tau: f64) -> CrlbReport {
    let d = derive_local(local, radius);
    if d.tau > max_tau {
        warn!("far-field formulas used at τ = {:.3} above {max_tau}", d.tau);
    }
    let (z0, z1) = (local.z0, d.z1);
    let l2 = lambda * lambda;
    let r4 = radius.powi(4);
    let p2 = PI * PI;
    let s = n0 / 2.0;
    let cxy = s * 4.0 * l2 * z1.powi(5) / (p2 * z0 * r4);
    let cz = s * (l2 * z0 * z0 / (p2 * radius * radius) + 4.0 * l2 * d.r_perp.powi(2) * z1.powi(5) / (p2 * z0.powi(3) * r4));
    let m = DMatrix::from_diagonal(&nalgebra::dvector![cxy, cxy, cz]);
    CrlbReport::from_matrix(m, f64::NAN, Method::FarField)
}
