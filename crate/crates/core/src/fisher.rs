//! Fisher-information matrices for position (and optionally phase).
//!
//! Every entry is `(2/N0) ∬ Re{Δs_j conj(Δs_i)} dx dy` over a panel. Several
//! independent routes are offered: full quadrature ([`fisher_numeric`]),
//! closed forms for a terminal on the panel axis ([`fisher_cpl_closed`]),
//! the same quantities assembled from `g` functions ([`fisher_cpl_g_route`]),
//! and the `g`-based phase cross terms ([`phase_block_g_route`]).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::ffunc::f_functions;
use crate::geometry::{tau, GeometryError, Panel, Scenario, Terminal};
use crate::quadrature::{
    element_grid_sum, g_closed_cpl, g_numeric, integrate_disk_vec, natural_breaks, GKind, QuadratureError,
    QuadratureSpec, VecIntegral,
};
use crate::signal::{eta, fisher_integrand_complex, fisher_integrand_packed, packed_index, Param, SurfacePoint};

/// How a Fisher matrix or CRLB was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Numeric,
    ClosedCpl,
    GRoute,
    /// On-axis formulas with the coefficients exactly as commonly printed; a
    /// diagnostic only.
    PrintedCpl,
    OffAxisApprox,
    OffAxisDirect,
    FarField,
    PhaseClosed,
    Discrete,
    MultiPanel,
    Spherical,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::ClosedCpl => "closed_cpl",
            Method::GRoute => "g_route",
            Method::PrintedCpl => "printed_cpl",
            Method::OffAxisApprox => "offaxis_approx",
            Method::OffAxisDirect => "offaxis_direct",
            Method::FarField => "farfield",
            Method::PhaseClosed => "phase_closed",
            Method::Discrete => "discrete",
            Method::MultiPanel => "multi_panel",
            Method::Spherical => "spherical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FisherError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Fisher matrix must be 3x3 or 4x4, got {0}x{1}")]
    BadShape(usize, usize),
    #[error("Fisher matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Fisher matrix has non-finite entries")]
    NonFinite,
    #[error("matrices of different size cannot be combined")]
    DimensionMismatch,
    #[error("this route requires the terminal on the panel axis")]
    NotOnAxis,
}

/// A symmetric 3×3 (x, y, z) or 4×4 (x, y, z, phase) Fisher matrix.
///
/// The noise factor `2/N0` is kept apart from the integrals it multiplies,
/// so bounds can be inverted from the unscaled information and rescaled
/// afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    m: DMatrix<f64>,
    unit: DMatrix<f64>,
    factor: f64,
    method: Method,
    quad_error: Option<f64>,
}

impl FisherMatrix {
    /// Wrap a matrix, symmetrizing away rounding-level asymmetry.
    pub fn new(m: DMatrix<f64>, method: Method) -> Result<Self, FisherError> {
        Self::with_noise(m, 1.0, method)
    }

    /// `factor · unit`, remembering both parts.
    pub fn with_noise(m: DMatrix<f64>, factor: f64, method: Method) -> Result<Self, FisherError> {
        let (r, c) = m.shape();
        if r != c || !(r == 3 || r == 4) {
            return Err(FisherError::BadShape(r, c));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(FisherError::NonFinite);
        }
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let asym = (&m - m.transpose()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if asym > 1e-12 * scale {
            return Err(FisherError::NotSymmetric(asym / scale));
        }
        if !(factor.is_finite() && factor > 0.0) {
            return Err(FisherError::NonFinite);
        }
        let unit = (&m + m.transpose()) * 0.5;
        Ok(Self {
            m: &unit * factor,
            unit,
            factor,
            method,
            quad_error: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// Largest quadrature error estimate relative to `∬|integrand|`, over
    /// all entries. `None` for matrices not obtained by quadrature.
    pub fn quad_error(&self) -> Option<f64> {
        self.quad_error
    }

    fn with_quad_error(mut self, e: Option<f64>) -> Self {
        self.quad_error = e;
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: Param, j: Param) -> f64 {
        self.m[(i.index(), j.index())]
    }

    pub fn has_phase(&self) -> bool {
        self.dim() == 4
    }

    /// Multiply every entry, e.g. to change the noise level.
    pub fn scaled(&self, factor: f64) -> Self {
        let factor = self.factor * factor;
        Self {
            m: &self.unit * factor,
            unit: self.unit.clone(),
            factor,
            method: self.method,
            quad_error: self.quad_error,
        }
    }

    /// Information before the noise factor.
    pub fn unit_matrix(&self) -> &DMatrix<f64> {
        &self.unit
    }

    /// The noise factor `2/N0` applied to [`Self::unit_matrix`].
    pub fn noise_factor(&self) -> f64 {
        self.factor
    }

    /// The 3×3 position block.
    pub fn spatial(&self) -> FisherMatrix {
        Self {
            m: self.m.view((0, 0), (3, 3)).into_owned(),
            unit: self.unit.view((0, 0), (3, 3)).into_owned(),
            factor: self.factor,
            method: self.method,
            quad_error: self.quad_error,
        }
    }

    /// Sum of information from independent panels.
    pub fn try_add(&self, other: &FisherMatrix) -> Result<FisherMatrix, FisherError> {
        if self.dim() != other.dim() {
            return Err(FisherError::DimensionMismatch);
        }
        let quad_error = match (self.quad_error, other.quad_error) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let sum = if self.factor == other.factor {
            Self {
                m: &self.m + &other.m,
                unit: &self.unit + &other.unit,
                factor: self.factor,
                method: Method::MultiPanel,
                quad_error: None,
            }
        } else {
            Self::new(&self.m + &other.m, Method::MultiPanel)?
        };
        Ok(sum.with_quad_error(quad_error))
    }

    /// Smallest eigenvalue is not below `-1e-10 · trace`.
    pub fn is_psd(&self) -> bool {
        let eig = self.m.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        min >= -1e-10 * self.m.trace().abs()
    }
}

fn noise_factor(n0: f64) -> f64 {
    2.0 / n0
}

fn from_packed(packed: &[f64; 10], dim: usize, factor: f64, method: Method) -> Result<FisherMatrix, FisherError> {
    let m = DMatrix::from_fn(dim, dim, |i, j| packed[packed_index(i, j, dim)]);
    FisherMatrix::with_noise(m, factor, method)
}

fn from_integral(r: &VecIntegral<10>, dim: usize, factor: f64) -> Result<FisherMatrix, FisherError> {
    let err = r
        .error_estimates
        .iter()
        .zip(&r.magnitudes)
        .filter(|(_, m)| **m > 0.0)
        .map(|(e, m)| e / m)
        .fold(0.0, f64::max);
    Ok(from_packed(&r.values, dim, factor, Method::Numeric)?.with_quad_error(Some(err)))
}

/// Fisher matrix by quadrature for a terminal given in panel-local
/// coordinates.
pub fn fisher_numeric_local(
    local: &Terminal,
    radius: f64,
    lambda: f64,
    n0: f64,
    with_phase: bool,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix, FisherError> {
    let dim = if with_phase { 4 } else { 3 };
    let t = *local;
    let r = integrate_disk_vec(
        move |x, y| fisher_integrand_packed(&t, SurfacePoint::new(x, y), lambda, dim),
        radius,
        spec,
        &natural_breaks(local, radius),
    )?;
    from_integral(&r, dim, noise_factor(n0))
}

/// Fisher matrix of one panel by quadrature; 4×4 when the scenario treats the
/// phase as unknown.
pub fn fisher_numeric(scenario: &Scenario, panel: &Panel, spec: &QuadratureSpec) -> Result<FisherMatrix, FisherError> {
    fisher_numeric_local(
        &scenario.terminal().relative_to(panel),
        panel.radius,
        scenario.lambda(),
        scenario.n0(),
        scenario.phase_unknown(),
        spec,
    )
}

/// Quadrature through the complex derivatives at the scenario's true phase.
/// Slower than [`fisher_numeric`]; used to show the result does not depend on
/// the phase value.
pub fn fisher_numeric_complex(
    scenario: &Scenario,
    panel: &Panel,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix, FisherError> {
    let local = scenario.terminal().relative_to(panel);
    let (lambda, phase) = (scenario.lambda(), scenario.phase());
    let dim = if scenario.phase_unknown() { 4 } else { 3 };
    let r = integrate_disk_vec(
        move |x, y| {
            let p = SurfacePoint::new(x, y);
            let mut out = [0.0; 10];
            for i in 0..dim {
                for j in i..dim {
                    let (pi, pj) = (Param::ALL[i], Param::ALL[j]);
                    out[packed_index(i, j, dim)] = fisher_integrand_complex(pi, pj, &local, p, lambda, phase);
                }
            }
            out
        },
        panel.radius,
        spec,
        &natural_breaks(&local, panel.radius),
    )?;
    from_integral(&r, dim, noise_factor(scenario.n0()))
}

/// Half-wavelength element-grid sum of all entries for one panel.
pub fn fisher_discrete(scenario: &Scenario, panel: &Panel, pitch: f64) -> Result<FisherMatrix, FisherError> {
    let local = scenario.terminal().relative_to(panel);
    let lambda = scenario.lambda();
    let dim = if scenario.phase_unknown() { 4 } else { 3 };
    let (sum, _) = element_grid_sum(panel.radius, pitch, |p| fisher_integrand_packed(&local, p, lambda, dim))?;
    from_packed(&sum, dim, noise_factor(scenario.n0()), Method::Discrete)
}

/// On-axis information for the lateral axes and depth, unscaled by noise.
///
/// `I_xy = 3 f1/(40 z0²) + 2π² f2/(3λ²)`, `I_z = f5/(10 z0²) + 2π² f4/(3λ²)`.
pub fn cpl_information(z0: f64, radius: f64, lambda: f64) -> (f64, f64) {
    let f = f_functions(tau(radius, z0));
    let k = 2.0 * PI * PI / (3.0 * lambda * lambda);
    let ixy = 3.0 * f.f1 / (40.0 * z0 * z0) + k * f.f2;
    let iz = f.f5 / (10.0 * z0 * z0) + k * f.f4;
    (ixy, iz)
}

/// On-axis phase cross term and phase information, unscaled by noise:
/// `I34 = π τ / (2λ(1+τ))`, `I44 = f7 / 2`.
pub fn cpl_phase_information(z0: f64, radius: f64, lambda: f64) -> (f64, f64) {
    let t = tau(radius, z0);
    let i34 = PI * t / (2.0 * lambda * (1.0 + t));
    let i44 = 0.5 * f_functions(t).f7;
    (i34, i44)
}

fn diagonal_with_phase(ixy: f64, iz: f64, phase: Option<(f64, f64)>, factor: f64, method: Method) -> Result<FisherMatrix, FisherError> {
    let dim = if phase.is_some() { 4 } else { 3 };
    let mut m = DMatrix::zeros(dim, dim);
    m[(0, 0)] = ixy;
    m[(1, 1)] = ixy;
    m[(2, 2)] = iz;
    if let Some((i34, i44)) = phase {
        m[(2, 3)] = i34;
        m[(3, 2)] = i34;
        m[(3, 3)] = i44;
    }
    FisherMatrix::with_noise(m, factor, method)
}

/// Closed-form diagonal Fisher matrix for a terminal on the panel axis.
pub fn fisher_cpl_closed(z0: f64, radius: f64, lambda: f64, n0: f64) -> FisherMatrix {
    let (ixy, iz) = cpl_information(z0, radius, lambda);
    diagonal_with_phase(ixy, iz, None, noise_factor(n0), Method::ClosedCpl)
        .expect("closed forms are finite for positive inputs")
}

/// Closed-form 4×4 on-axis Fisher matrix including the unknown phase.
pub fn fisher_cpl_closed_phase(z0: f64, radius: f64, lambda: f64, n0: f64) -> FisherMatrix {
    let (ixy, iz) = cpl_information(z0, radius, lambda);
    let phase = cpl_phase_information(z0, radius, lambda);
    diagonal_with_phase(ixy, iz, Some(phase), noise_factor(n0), Method::ClosedCpl)
        .expect("closed forms are finite for positive inputs")
}

/// On-axis Fisher matrix assembled from the closed-form `g` functions:
/// `I11 = (z0/4π)(9/4 g1(7) + 4π²/λ² g1(5))` and
/// `I33 = (z0³/4π)(g3(3)/(4z0⁴) + (4π²/λ² - 3/(2z0²)) g3(5) + 9/4 g3(7))`,
/// plus `I34 = z0² g3(4)/(2λ)` and `I44 = z0 g3(3)/(4π)` when `with_phase`.
///
/// The `g` closed forms cancel for small apertures; use for `τ ≳ 1e-3`.
pub fn fisher_cpl_g_route(z0: f64, radius: f64, lambda: f64, n0: f64, with_phase: bool) -> FisherMatrix {
    let g = |k: GKind, n: u32| g_closed_cpl(k, n, z0, radius).expect("supported exponent");
    let k2 = 4.0 * PI * PI / (lambda * lambda);
    let ixy = z0 / (4.0 * PI) * (2.25 * g(GKind::XSquared, 7) + k2 * g(GKind::XSquared, 5));
    let iz = z0.powi(3) / (4.0 * PI)
        * (g(GKind::Unit, 3) / (4.0 * z0.powi(4)) + (k2 - 1.5 / (z0 * z0)) * g(GKind::Unit, 5) + 2.25 * g(GKind::Unit, 7));
    let phase = with_phase.then(|| (z0 * z0 * g(GKind::Unit, 4) / (2.0 * lambda), z0 * g(GKind::Unit, 3) / (4.0 * PI)));
    diagonal_with_phase(ixy, iz, phase, noise_factor(n0), Method::GRoute).expect("finite")
}

/// On-axis Fisher matrix with the coefficients `1/(30 z0²)` on `f1` and
/// `1/(40 z0²)` on `f3 = 13 - (13 + 5τ²)/(1+τ)^(5/2)`. These disagree with
/// quadrature; kept to quantify the discrepancy.
pub fn fisher_cpl_printed(z0: f64, radius: f64, lambda: f64, n0: f64) -> FisherMatrix {
    let f = f_functions(tau(radius, z0));
    let k = 2.0 * PI * PI / (3.0 * lambda * lambda);
    let ixy = f.f1 / (30.0 * z0 * z0) + k * f.f2;
    let iz = f.f3 / (40.0 * z0 * z0) + k * f.f4;
    diagonal_with_phase(ixy, iz, None, noise_factor(n0), Method::PrintedCpl).expect("finite")
}

/// Phase row of the Fisher matrix from `g`-type integrals, for any terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBlock {
    /// `[I14, I24, I34]`.
    pub cross: [f64; 3],
    pub i44: f64,
}

/// Phase row assembled from integrals of powers of `η`:
/// `I14 = (z0/2λ) ∬ (x0 - x) η⁻²`, likewise `I24`, `I34 = z0² g3(4)/(2λ)` and
/// `I44 = z0 g3(3)/(4π)`, all times `2/N0`.
///
/// On the panel axis the first moments vanish and `I14 = I24 = 0`.
pub fn phase_block_g_route(
    local: &Terminal,
    radius: f64,
    lambda: f64,
    n0: f64,
    spec: &QuadratureSpec,
) -> Result<PhaseBlock, FisherError> {
    let z0 = local.z0;
    let g34 = g_numeric(GKind::Unit, 4, local, radius, spec)?;
    let g33 = g_numeric(GKind::Unit, 3, local, radius, spec)?;
    let t = *local;
    let moments = integrate_disk_vec(
        move |x, y| {
            let e2 = eta(&t, SurfacePoint::new(x, y)).powi(-2);
            [(t.x0 - x) * e2, (t.y0 - y) * e2]
        },
        radius,
        spec,
        &natural_breaks(local, radius),
    )?;
    let k = noise_factor(n0);
    Ok(PhaseBlock {
        cross: [
            k * z0 / (2.0 * lambda) * moments.values[0],
            k * z0 / (2.0 * lambda) * moments.values[1],
            k * z0 * z0 * g34 / (2.0 * lambda),
        ],
        i44: k * z0 * g33 / (4.0 * PI),
    })
}

/// Phase row in the compact form `(z0 g3(4)/λ) · [x0, y0, z0]` with `I44`
/// unchanged. It drops the first moment of `η⁻²` and carries twice the
/// on-axis value of `I34`; kept as a diagnostic.
pub fn phase_block_compact(
    local: &Terminal,
    radius: f64,
    lambda: f64,
    n0: f64,
    spec: &QuadratureSpec,
) -> Result<PhaseBlock, FisherError> {
    let g34 = g_numeric(GKind::Unit, 4, local, radius, spec)?;
    let g33 = g_numeric(GKind::Unit, 3, local, radius, spec)?;
    let k = noise_factor(n0);
    let c = k * local.z0 * g34 / lambda;
    Ok(PhaseBlock {
        cross: [c * local.x0, c * local.y0, c * local.z0],
        i44: k * local.z0 * g33 / (4.0 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_matches_numeric_on_axis() {
        let s = Scenario::single(Terminal::on_axis(4.0).unwrap(), 1.0, 0.1).unwrap();
        let num = fisher_numeric(&s, &s.panels()[0], &spec()).unwrap();
        let closed = fisher_cpl_closed(4.0, 1.0, 0.1, 2.0);
        for p in Param::SPATIAL {
            assert!(rel(num.get(p, p), closed.get(p, p)) < 1e-6);
        }
        assert_eq!(closed.get(Param::X, Param::Z), 0.0);
        assert_eq!(closed.get(Param::X, Param::X), closed.get(Param::Y, Param::Y));
    }

    #[test]
    fn reference_values_at_two_meters() {
        // Independent double-integral values at z0 = 2, R = 1, λ = 0.1.
        let f = fisher_cpl_closed(2.0, 1.0, 0.1, 2.0);
        assert!(rel(f.get(Param::X, Param::X), 10.614482421) < 1e-9);
        assert!(rel(f.get(Param::Z, Param::Z), 187.175595697) < 1e-9);
    }

    #[test]
    fn numeric_is_diagonal_on_axis() {
        let s = Scenario::single(Terminal::on_axis(3.0).unwrap(), 2.0, 0.2)
            .unwrap()
            .with_phase_unknown(true);
        let f = fisher_numeric(&s, &s.panels()[0], &spec()).unwrap();
        let tr = f.matrix().trace();
        for (i, j) in [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)] {
            assert!(f.matrix()[(i, j)].abs() < 1e-9 * tr, "({i},{j}) = {}", f.matrix()[(i, j)]);
        }
        assert!(f.is_psd());
    }

    #[test]
    fn g_route_agrees_with_f_route() {
        for (z0, r, l) in [(4.0, 1.0, 0.1), (2.0, 3.0, 0.05), (8.0, 0.5, 0.1), (1.0, 10.0, 0.3)] {
            let a = fisher_cpl_closed_phase(z0, r, l, 2.0);
            let b = fisher_cpl_g_route(z0, r, l, 2.0, true);
            for i in 0..4 {
                for j in 0..4 {
                    let (x, y) = (a.matrix()[(i, j)], b.matrix()[(i, j)]);
                    assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-300), "({i},{j}) {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn printed_coefficients_disagree_with_quadrature() {
        let s = Scenario::single(Terminal::on_axis(1.0).unwrap(), 1.0, 0.5).unwrap();
        let num = fisher_numeric(&s, &s.panels()[0], &spec()).unwrap();
        let printed = fisher_cpl_printed(1.0, 1.0, 0.5, 2.0);
        assert!(rel(printed.get(Param::Z, Param::Z), num.get(Param::Z, Param::Z)) > 1e-3);
        assert!(rel(printed.get(Param::X, Param::X), num.get(Param::X, Param::X)) > 1e-4);
    }

    #[test]
    fn phase_row_two_routes_off_axis() {
        let t = Terminal::new(1.5, -0.8, 3.0).unwrap();
        let s = Scenario::single(t, 1.2, 0.1).unwrap().with_phase_unknown(true);
        let f = fisher_numeric(&s, &s.panels()[0], &spec()).unwrap();
        let b = phase_block_g_route(&t, 1.2, 0.1, 2.0, &spec()).unwrap();
        for k in 0..3 {
            let v = f.matrix()[(k, 3)];
            assert!((v - b.cross[k]).abs() < 1e-8 * v.abs(), "{k}: {v} vs {}", b.cross[k]);
        }
        assert!(rel(f.get(Param::Phase, Param::Phase), b.i44) < 1e-8);
    }

    #[test]
    fn compact_phase_row_is_twice_on_axis() {
        let t = Terminal::on_axis(4.0).unwrap();
        let exact = phase_block_g_route(&t, 1.0, 0.1, 2.0, &spec()).unwrap();
        let compact = phase_block_compact(&t, 1.0, 0.1, 2.0, &spec()).unwrap();
        assert!(rel(compact.cross[2], 2.0 * exact.cross[2]) < 1e-10);
    }

    #[test]
    fn independent_of_true_phase() {
        let t = Terminal::new(0.7, 0.4, 2.0).unwrap();
        let base = Scenario::single(t, 0.8, 0.2).unwrap().with_phase_unknown(true);
        let a = fisher_numeric_complex(&base.clone().with_phase(0.0), &base.panels()[0], &spec()).unwrap();
        let b = fisher_numeric_complex(&base.clone().with_phase(1.3), &base.panels()[0], &spec()).unwrap();
        let scale = a.matrix().amax();
        assert!((a.matrix() - b.matrix()).amax() < 1e-12 * scale);
        let fast = fisher_numeric(&base, &base.panels()[0], &spec()).unwrap();
        assert!((a.matrix() - fast.matrix()).amax() < 1e-10 * scale);
    }

    #[test]
    fn noise_scaling_is_linear() {
        let a = fisher_cpl_closed(4.0, 1.0, 0.1, 2.0);
        let b = fisher_cpl_closed(4.0, 1.0, 0.1, 4.0);
        assert!((a.matrix() * 0.5 - b.matrix()).amax() < 1e-15 * a.matrix().amax());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            FisherMatrix::new(DMatrix::zeros(2, 2), Method::Numeric),
            Err(FisherError::BadShape(2, 2))
        ));
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = 0.5;
        assert!(matches!(FisherMatrix::new(m, Method::Numeric), Err(FisherError::NotSymmetric(_))));
    }

    #[test]
    fn discrete_grid_approaches_integral() {
        let s = Scenario::single(Terminal::on_axis(4.0).unwrap(), 1.0, 0.1).unwrap();
        let p = &s.panels()[0];
        let d = fisher_discrete(&s, p, 0.05).unwrap();
        let c = fisher_numeric(&s, p, &spec()).unwrap();
        assert!(rel(d.get(Param::Z, Param::Z), c.get(Param::Z, Param::Z)) < 0.05);
    }
}
