//! Bounds with an unknown common phase on the whole aperture.
//!
//! The phase enters as a fourth parameter. Eliminating it by a Schur
//! complement leaves the lateral bounds on the panel axis unchanged and
//! degrades the depth bound:
//!
//! ```text
//! C_z = (f5/(10 z0²) + π² f6/(6λ²))⁻¹
//! C_φ = (f7/2 + (λ²/(10π² z0² f8) + 8/(3 f9))⁻¹)⁻¹
//! ```

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::crlb::{crlb_from_fisher, CrlbError, CrlbReport};
use crate::ffunc::f_functions;
use crate::fisher::{fisher_cpl_closed_phase, FisherMatrix, Method};
use crate::geometry::tau;
use crate::quadrature::{g_closed_cpl, GKind};

/// Depth and phase bounds on the panel axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBounds {
    pub c_z: f64,
    pub c_phase: f64,
}

/// Closed form in terms of `f5..f9`, for `N0 = 2`.
pub fn phase_bounds_f(z0: f64, radius: f64, lambda: f64) -> PhaseBounds {
    let f = f_functions(tau(radius, z0));
    let l2 = lambda * lambda;
    let c_z = 1.0 / (f.f5 / (10.0 * z0 * z0) + PI * PI * f.f6 / (6.0 * l2));
    let inner = l2 / (10.0 * PI * PI * z0 * z0 * f.f8) + 8.0 / (3.0 * f.f9);
    let c_phase = 1.0 / (0.5 * f.f7 + 1.0 / inner);
    PhaseBounds { c_z, c_phase }
}

/// Schur complements written with `g3(n)`, for `N0 = 2`:
/// `C_z = (I33 - π z0³ g3(4)² / (λ² g3(3)))⁻¹` and
/// `C_φ = (z0 g3(3)/(4π) - π z0 g3(4)² / (λ² B))⁻¹`, with
/// `B = g3(3)/(4z0⁴) + (4π²/λ² - 3/(2z0²)) g3(5) + 9/4 g3(7)` and
/// `I33 = z0³ B / (4π)`.
///
/// The subtraction cancels badly for small `τ`; use for `τ ≳ 1e-3`.
pub fn phase_bounds_g(z0: f64, radius: f64, lambda: f64) -> PhaseBounds {
    let g = |n| g_closed_cpl(GKind::Unit, n, z0, radius).expect("supported exponent");
    let (g3, g4, g5, g7) = (g(3), g(4), g(5), g(7));
    let l2 = lambda * lambda;
    let b = g3 / (4.0 * z0.powi(4)) + (4.0 * PI * PI / l2 - 1.5 / (z0 * z0)) * g5 + 2.25 * g7;
    let i33 = z0.powi(3) * b / (4.0 * PI);
    let c_z = 1.0 / (i33 - PI * z0.powi(3) * g4 * g4 / (l2 * g3));
    let c_phase = 1.0 / (z0 * g3 / (4.0 * PI) - PI * z0 * g4 * g4 / (l2 * b));
    PhaseBounds { c_z, c_phase }
}

/// Full on-axis report with an unknown phase. Lateral bounds are those of
/// the known-phase case; depth and phase come from the `f` closed form.
pub fn crlb_phase_cpl_closed(z0: f64, radius: f64, lambda: f64, n0: f64) -> Result<CrlbReport, CrlbError> {
    let fisher = fisher_cpl_closed_phase(z0, radius, lambda, n0);
    let inverted = crlb_from_fisher(&fisher)?;
    let b = phase_bounds_f(z0, radius, lambda);
    let s = n0 / 2.0;
    let mut m = inverted.matrix.clone();
    m[(2, 2)] = s * b.c_z;
    m[(3, 3)] = s * b.c_phase;
    Ok(CrlbReport::from_matrix(m, inverted.condition_number, Method::PhaseClosed))
}

/// Bounds with the phase eliminated, given the known-phase CRLB matrix `C0`
/// and the phase row: `C_φ = 1/(I44 - i C0 iᵀ)` and
/// `C̃0 = C0 + C0 iᵀ i C0 C_φ`.
pub fn eliminate_phase(c0: &DMatrix<f64>, cross: &[f64; 3], i44: f64) -> (DMatrix<f64>, f64) {
    let i = nalgebra::DVector::from_row_slice(cross);
    let ci = c0 * &i;
    let c_phase = 1.0 / (i44 - i.dot(&ci));
    let c = c0 + &ci * ci.transpose() * c_phase;
    (c, c_phase)
}

/// Convenience: the 4×4 Fisher matrix to the eliminated bounds, routed
/// through the known-phase inverse.
pub fn crlb_via_schur(fisher: &FisherMatrix) -> Result<(DMatrix<f64>, f64), CrlbError> {
    let c0 = crlb_from_fisher(&fisher.spatial())?;
    let m = fisher.matrix();
    Ok(eliminate_phase(&c0.matrix, &[m[(0, 3)], m[(1, 3)], m[(2, 3)]], m[(3, 3)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::{fisher_cpl_closed, fisher_numeric};
    use crate::geometry::{Scenario, Terminal};
    use crate::quadrature::QuadratureSpec;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn f_route_matches_g_route() {
        for (z0, r) in [(4.0, 0.5), (4.0, 2.0), (2.0, 5.0), (8.0, 40.0)] {
            let a = phase_bounds_f(z0, r, 0.1);
            let b = phase_bounds_g(z0, r, 0.1);
            assert!(rel(a.c_z, b.c_z) < 1e-9, "{a:?} {b:?}");
            assert!(rel(a.c_phase, b.c_phase) < 1e-9, "{a:?} {b:?}");
        }
    }

    #[test]
    fn closed_matches_matrix_inverse() {
        let r = crlb_phase_cpl_closed(4.0, 1.0, 0.1, 2.0).unwrap();
        let inv = crlb_from_fisher(&fisher_cpl_closed_phase(4.0, 1.0, 0.1, 2.0)).unwrap();
        assert!(rel(r.c_z, inv.c_z) < 1e-10);
        assert!(rel(r.c_phase.unwrap(), inv.c_phase.unwrap()) < 1e-10);
    }

    #[test]
    fn unknown_phase_never_helps() {
        for r in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let known = crlb_from_fisher(&fisher_cpl_closed(4.0, r, 0.1, 2.0)).unwrap();
            let unknown = crlb_phase_cpl_closed(4.0, r, 0.1, 2.0).unwrap();
            assert!(unknown.c_z >= known.c_z);
            assert!(rel(unknown.c_x, known.c_x) < 1e-12);
        }
    }

    #[test]
    fn schur_matches_full_inverse_off_axis() {
        let t = Terminal::new(2.0, 1.0, 4.0).unwrap();
        let s = Scenario::single(t, 1.0, 0.1).unwrap().with_phase_unknown(true);
        let f = fisher_numeric(&s, &s.panels()[0], &QuadratureSpec::default()).unwrap();
        let full = crlb_from_fisher(&f).unwrap();
        let (c, c_phase) = crlb_via_schur(&f).unwrap();
        assert!(rel(c_phase, full.c_phase.unwrap()) < 1e-8);
        for k in 0..3 {
            assert!(rel(c[(k, k)], full.matrix[(k, k)]) < 1e-8);
        }
    }
}
