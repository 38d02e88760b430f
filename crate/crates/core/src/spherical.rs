//! Range, elevation and azimuth bounds from Cartesian ones.
//!
//! With `[z1, φ, ψ] = g(x0, y0, z0)` the bound matrix transforms as
//! `C_sph = ∇g · C · ∇gᵀ`. The full Cartesian matrix, cross terms
//! included, is used.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::crlb::CrlbReport;
use crate::geometry::{GeometryError, Terminal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SphericalError {
    #[error("azimuth is undefined for a terminal on the panel axis")]
    SingularGeometry,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Range `z1`, elevation `φ` from the panel normal, azimuth `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalCoords {
    pub z1: f64,
    pub phi: f64,
    pub psi: f64,
    /// Set when `x0 = y0 = 0`; `psi` is then reported as 0.
    pub azimuth_degenerate: bool,
}

pub fn sph_from_cart(t: &Terminal) -> SphericalCoords {
    let r = t.r_perp();
    let degenerate = r == 0.0;
    SphericalCoords {
        z1: t.range(),
        phi: r.atan2(t.z0),
        psi: if degenerate { 0.0 } else { t.y0.atan2(t.x0) },
        azimuth_degenerate: degenerate,
    }
}

pub fn cart_from_sph(s: &SphericalCoords) -> Result<Terminal, GeometryError> {
    let (sp, cp) = s.phi.sin_cos();
    let (ss, cs) = s.psi.sin_cos();
    Terminal::new(s.z1 * sp * cs, s.z1 * sp * ss, s.z1 * cp)
}

/// `∇g` with rows `∂z1`, `∂φ`, `∂ψ` with respect to `(x0, y0, z0)`:
///
/// ```text
/// ∂z1 = [x0, y0, z0] / z1
/// ∂φ  = [x0 z0 / r, y0 z0 / r, -r] / z1²
/// ∂ψ  = [-y0, x0, 0] / r²
/// ```
///
/// where `r = √(x0² + y0²)`.
pub fn jacobian(t: &Terminal) -> Result<Matrix3<f64>, SphericalError> {
    let r = t.r_perp();
    if r == 0.0 {
        return Err(SphericalError::SingularGeometry);
    }
    let (x, y, z) = (t.x0, t.y0, t.z0);
    let z1sq = t.range().powi(2);
    let z1 = z1sq.sqrt();
    Ok(Matrix3::new(
        x / z1,
        y / z1,
        z / z1,
        x * z / (r * z1sq),
        y * z / (r * z1sq),
        -r / z1sq,
        -y / (r * r),
        x / (r * r),
        0.0,
    ))
}

/// Jacobian whose elevation row differentiates `arcsin(x0/(z1 cos ψ))` with
/// `ψ` held fixed:
/// `|cos ψ| / (z1² √(z1² cos²ψ - x0²) cos ψ) · [z1² - x0², -x0 y0, -x0 z0]`.
/// Not the gradient of the elevation; kept for comparison.
pub fn jacobian_printed(t: &Terminal) -> Result<Matrix3<f64>, SphericalError> {
    let mut j = jacobian(t)?;
    let s = sph_from_cart(t);
    let (x, y, z) = (t.x0, t.y0, t.z0);
    let z1sq = s.z1 * s.z1;
    let c = s.psi.cos();
    let k = c.abs() / (z1sq * (z1sq * c * c - x * x).sqrt() * c);
    j.set_row(1, &Vector3::new(k * (z1sq - x * x), -k * x * y, -k * x * z).transpose());
    Ok(j)
}

/// Component formulas for the spherical bounds given `C_x` and `C_z` of a
/// lateral-diagonal Cartesian bound:
///
/// ```text
/// C_z1 = (y0² - x0²)/z1² C_x + z0²/z1² C_z
/// C_φ  = ((z1⁴ - x0⁴ + x0² y0²) C_x + x0² z0² C_z) / (z1⁴ (z1² cos²ψ - x0²))
/// C_ψ  = C_x / (x0² + y0²)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrintedSpherical {
    pub c_z1: f64,
    pub c_phi: f64,
    pub c_psi: f64,
}

pub fn spherical_printed(c_x: f64, c_z: f64, t: &Terminal) -> Result<PrintedSpherical, SphericalError> {
    let s = sph_from_cart(t);
    if s.azimuth_degenerate {
        return Err(SphericalError::SingularGeometry);
    }
    let (x, y, z) = (t.x0, t.y0, t.z0);
    let z1sq = s.z1 * s.z1;
    let c = s.psi.cos();
    Ok(PrintedSpherical {
        c_z1: (y * y - x * x) / z1sq * c_x + z * z / z1sq * c_z,
        c_phi: ((z1sq * z1sq - x.powi(4) + x * x * y * y) * c_x + x * x * z * z * c_z) / (z1sq * z1sq * (z1sq * c * c - x * x)),
        c_psi: c_x / (x * x + y * y),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalCrlb {
    pub coords: SphericalCoords,
    pub c_z1: f64,
    pub c_phi: f64,
    pub c_psi: f64,
    #[serde(skip)]
    pub matrix: Matrix3<f64>,
    /// Component formulas evaluated on the same `C_x`, `C_z`.
    pub printed: PrintedSpherical,
    /// Largest relative gap between `printed` and the sandwich values.
    pub printed_discrepancy: f64,
}

/// `∇g · C · ∇gᵀ` on the position block of `report`.
pub fn crlb_spherical(report: &CrlbReport, t: &Terminal) -> Result<SphericalCrlb, SphericalError> {
    let j = jacobian(t)?;
    let c = Matrix3::from_fn(|i, k| report.matrix[(i, k)]);
    let m = j * c * j.transpose();
    let printed = spherical_printed(report.c_x, report.c_z, t)?;
    let out = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    let gap = [printed.c_z1, printed.c_phi, printed.c_psi]
        .iter()
        .zip(out)
        .map(|(p, v)| (p - v).abs() / v.abs())
        .fold(0.0, f64::max);
    Ok(SphericalCrlb {
        coords: sph_from_cart(t),
        c_z1: out[0],
        c_phi: out[1],
        c_psi: out[2],
        matrix: m,
        printed,
        printed_discrepancy: gap,
    })
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::crlb_approx_noncpl;
    use crate::crlb::crlb_from_fisher;
    use crate::fisher::fisher_numeric;
    use crate::geometry::Scenario;
    use crate::quadrature::QuadratureSpec;
    use proptest::prelude::*;

    fn t(x: f64, y: f64, z: f64) -> Terminal {
        Terminal::new(x, y, z).unwrap()
    }

    #[test]
    fn coordinate_examples() {
        let s = sph_from_cart(&t(0.0, 0.0, 4.0));
        assert_eq!((s.z1, s.phi, s.psi, s.azimuth_degenerate), (4.0, 0.0, 0.0, true));
        let s = sph_from_cart(&t(3.0, 0.0, 4.0));
        assert_eq!(s.z1, 5.0);
        assert!((s.phi - (0.6f64).asin()).abs() < 1e-15);
        assert_eq!(s.psi, 0.0);
        let s = sph_from_cart(&t(-1.0, -1.0, 2f64.sqrt()));
        assert!((s.psi + 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn axis_is_singular() {
        assert_eq!(jacobian(&t(0.0, 0.0, 3.0)).unwrap_err(), SphericalError::SingularGeometry);
    }

    #[test]
    fn printed_elevation_row_differs_from_gradient() {
        let p = t(1.0, 2.0, 3.0);
        let a = jacobian(&p).unwrap();
        let b = jacobian_printed(&p).unwrap();
        assert!((a.row(1) - b.row(1)).amax() > 1e-3);
        assert_eq!(a.row(0), b.row(0));
    }

    #[test]
    fn lateral_approx_gives_printed_azimuth() {
        let p = t(2.0, 1.0, 8.0);
        let c = crlb_approx_noncpl(&p, 0.5, 0.1, 2.0).unwrap().direct;
        let s = crlb_spherical(&c, &p).unwrap();
        assert!((s.c_psi - c.c_x / 5.0).abs() < 1e-12 * s.c_psi);
    }

    #[test]
    fn axis_limit() {
        let spec = QuadratureSpec::default();
        let (z0, r) = (4.0, 1.0);
        let on = Scenario::single(t(0.0, 0.0, z0), r, 0.1).unwrap();
        let c0 = crlb_from_fisher(&fisher_numeric(&on, &on.panels()[0], &spec).unwrap()).unwrap();
        let p = t(1e-4, 5e-5, z0);
        let s0 = Scenario::single(p, r, 0.1).unwrap();
        let c = crlb_from_fisher(&fisher_numeric(&s0, &s0.panels()[0], &spec).unwrap()).unwrap();
        let s = crlb_spherical(&c, &p).unwrap();
        assert!((s.c_z1 / c0.c_z - 1.0).abs() < 1e-3);
        assert!((s.c_phi * p.range().powi(2) / c0.c_x - 1.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn round_trip(x in -10.0f64..10.0, y in -10.0f64..10.0, z in 0.1f64..10.0) {
            let p = t(x, y, z);
            let q = cart_from_sph(&sph_from_cart(&p)).unwrap();
            let scale = p.range();
            prop_assert!((p.x0 - q.x0).abs() <= 1e-12 * scale);
            prop_assert!((p.y0 - q.y0).abs() <= 1e-12 * scale);
            prop_assert!((p.z0 - q.z0).abs() <= 1e-12 * scale);
        }

        #[test]
        fn jacobian_matches_central_differences(x in -5.0f64..5.0, y in -5.0f64..5.0, z in 0.5f64..5.0) {
            prop_assume!(x.hypot(y) > 0.1);
            let p = t(x, y, z);
            let j = jacobian(&p).unwrap();
            let h = 1e-6;
            for k in 0..3 {
                let mut a = [x, y, z];
                let mut b = [x, y, z];
                a[k] += h;
                b[k] -= h;
                let sa = sph_from_cart(&t(a[0], a[1], a[2]));
                let sb = sph_from_cart(&t(b[0], b[1], b[2]));
                let d = [
                    (sa.z1 - sb.z1) / (2.0 * h),
                    (sa.phi - sb.phi) / (2.0 * h),
                    wrap_angle(sa.psi - sb.psi) / (2.0 * h),
                ];
                for row in 0..3 {
                    prop_assert!((j[(row, k)] - d[row]).abs() < 1e-6 * (1.0 + j[(row, k)].abs()));
                }
            }
            prop_assert!((j.row(0).norm() - 1.0).abs() < 1e-12);
            prop_assert!((j[(2, 0)] * x + j[(2, 1)] * y).abs() < 1e-12);
        }

        #[test]
        fn azimuth_shift_invariant(x in 0.5f64..5.0, y in -5.0f64..5.0, k in -3i32..3) {
            let p = t(x, y, 4.0);
            let s = sph_from_cart(&p);
            let shifted = SphericalCoords { psi: s.psi + 2.0 * PI * k as f64, ..s };
            let q = cart_from_sph(&shifted).unwrap();
            let a = jacobian(&p).unwrap();
            let b = jacobian(&q).unwrap();
            prop_assert!((a - b).amax() < 1e-9);
        }
    }
}
