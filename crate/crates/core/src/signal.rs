//! Noiseless received signal, its parameter derivatives, and the real Fisher
//! integrands.
//!
//! A point element at `(x, y, 0)` receives
//!
//! ```text
//! s(x, y) = sqrt(z0) / (2 sqrt(pi) eta^(3/4)) * exp(-j (2 pi sqrt(eta) / lambda + phi))
//! eta     = z0² + (x - x0)² + (y - y0)²
//! ```
//!
//! Every derivative shares the oscillating factor `exp(-j(2π√η/λ + φ))`, so
//! each one is written as `A · (a + j b) · exp(-j(...))` with
//! `A = sqrt(z0 / 4π)` and real `a`, `b`. The Fisher integrand
//! `Re{Δs_j conj(Δs_i)}` then reduces to `A² (a_i a_j + b_i b_j)`: no
//! oscillation is left for the quadrature to resolve.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::Terminal;

/// Estimated parameter associated with a Fisher row/column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    X,
    Y,
    Z,
    Phase,
}

impl Param {
    pub const SPATIAL: [Param; 3] = [Param::X, Param::Y, Param::Z];
    pub const ALL: [Param; 4] = [Param::X, Param::Y, Param::Z, Param::Phase];

    pub fn index(self) -> usize {
        match self {
            Param::X => 0,
            Param::Y => 1,
            Param::Z => 2,
            Param::Phase => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Param> {
        Self::ALL.get(i).copied()
    }
}

/// A point of the surface, in panel-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
}

impl SurfacePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Squared distance from the terminal to a surface point.
#[inline]
pub fn eta(t: &Terminal, p: SurfacePoint) -> f64 {
    let dx = p.x - t.x0;
    let dy = p.y - t.y0;
    t.z0 * t.z0 + dy * dy + dx * dx
}

#[inline]
fn amplitude(z0: f64) -> f64 {
    (z0 / (4.0 * PI)).sqrt()
}

/// Noiseless complex signal with common phase offset `phase`.
pub fn noiseless_signal(t: &Terminal, p: SurfacePoint, lambda: f64, phase: f64) -> Complex64 {
    let e = eta(t, p);
    let mag = amplitude(t.z0) * e.powf(-0.75);
    Complex64::from_polar(mag, -(2.0 * PI * e.sqrt() / lambda + phase))
}

/// First-order derivatives of the noiseless signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalGradient {
    pub ds1: Complex64,
    pub ds2: Complex64,
    pub ds3: Complex64,
    /// Derivative with respect to the common phase, `-j s`.
    pub ds4: Complex64,
}

impl SignalGradient {
    pub fn get(&self, p: Param) -> Complex64 {
        match p {
            Param::X => self.ds1,
            Param::Y => self.ds2,
            Param::Z => self.ds3,
            Param::Phase => self.ds4,
        }
    }
}

/// Real and imaginary parts `(a, b)` of each derivative with the common factor
/// `A exp(-j(2π√η/λ + φ))` removed, ordered x, y, z, phase.
#[inline]
pub fn derivative_terms(t: &Terminal, p: SurfacePoint, lambda: f64) -> [(f64, f64); 4] {
    let e = eta(t, p);
    let e34 = e.powf(-0.75);
    let e54 = e34 / e.sqrt();
    let e74 = e54 / e.sqrt();
    let k = 2.0 * PI / lambda;
    let dx = p.x - t.x0;
    let dy = p.y - t.y0;
    let z0 = t.z0;
    [
        (dx * 1.5 * e74, dx * k * e54),
        (dy * 1.5 * e74, dy * k * e54),
        (e34 / (2.0 * z0) - 1.5 * z0 * e74, -k * z0 * e54),
        (0.0, -e34),
    ]
}

/// All four derivatives at a surface point, evaluated literally as complex
/// numbers (used as the reference path for the phase-cancelled integrand).
pub fn spatial_gradient(t: &Terminal, p: SurfacePoint, lambda: f64, phase: f64) -> SignalGradient {
    let e = eta(t, p);
    let common = Complex64::from_polar(amplitude(t.z0), -(2.0 * PI * e.sqrt() / lambda + phase));
    let terms = derivative_terms(t, p, lambda);
    let d = |i: usize| common * Complex64::new(terms[i].0, terms[i].1);
    SignalGradient {
        ds1: d(0),
        ds2: d(1),
        ds3: d(2),
        ds4: d(3),
    }
}

/// `Re{Δs_j conj(Δs_i)}` with the oscillating phase cancelled analytically.
///
/// Independent of the true phase; symmetric in `(i, j)`.
#[inline]
pub fn fisher_integrand(i: Param, j: Param, t: &Terminal, p: SurfacePoint, lambda: f64) -> f64 {
    let terms = derivative_terms(t, p, lambda);
    let (ai, bi) = terms[i.index()];
    let (aj, bj) = terms[j.index()];
    t.z0 / (4.0 * PI) * (ai * aj + bi * bj)
}

/// Upper-triangle Fisher integrands for the first `dim` parameters, packed row
/// by row: `(0,0), (0,1), .., (0,dim-1), (1,1), ..`. Unused slots are zero.
#[inline]
pub fn fisher_integrand_packed(t: &Terminal, p: SurfacePoint, lambda: f64, dim: usize) -> [f64; 10] {
    let terms = derivative_terms(t, p, lambda);
    let scale = t.z0 / (4.0 * PI);
    let mut out = [0.0; 10];
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            out[k] = scale * (terms[i].0 * terms[j].0 + terms[i].1 * terms[j].1);
            k += 1;
        }
    }
    out
}

/// Index of `(i, j)` in the packed upper triangle of a `dim × dim` matrix.
pub fn packed_index(i: usize, j: usize, dim: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Naive evaluation through the complex derivatives, including the phase.
pub fn fisher_integrand_complex(
    i: Param,
    j: Param,
    t: &Terminal,
    p: SurfacePoint,
    lambda: f64,
    phase: f64,
) -> f64 {
    let g = spatial_gradient(t, p, lambda, phase);
    (g.get(j) * g.get(i).conj()).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term(x: f64, y: f64, z: f64) -> Terminal {
        Terminal::new(x, y, z).unwrap()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&term(0.0, 0.0, 4.0), SurfacePoint::new(0.0, 0.0)), 16.0);
        assert_eq!(eta(&term(1.0, 2.0, 2.0), SurfacePoint::new(1.0, 2.0)), 4.0);
        assert_eq!(eta(&term(3.0, 0.0, 4.0), SurfacePoint::new(0.0, 0.0)), 25.0);
    }

    #[test]
    fn on_axis_power() {
        for z0 in [0.5, 2.0, 9.0] {
            let s = noiseless_signal(&term(0.0, 0.0, z0), SurfacePoint::new(0.0, 0.0), 0.1, 0.0);
            let expect = 1.0 / (4.0 * PI * z0 * z0);
            assert!((s.norm_sqr() - expect).abs() <= 1e-15 * expect);
        }
    }

    #[test]
    fn phase_is_periodic() {
        let t = term(0.3, -0.2, 1.7);
        let p = SurfacePoint::new(0.4, 0.1);
        let a = noiseless_signal(&t, p, 0.07, 0.9);
        let b = noiseless_signal(&t, p, 0.07, 0.9 + 2.0 * PI);
        assert!((a - b).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn direct_evaluation_at_four_meters() {
        // |s| = sqrt(4)/(2 sqrt(pi) 16^(3/4)) = 1/(8 sqrt(pi)); arg = -2π·4/0.1 = -80π ≡ 0.
        let s = noiseless_signal(&term(0.0, 0.0, 4.0), SurfacePoint::new(0.0, 0.0), 0.1, 0.0);
        let mag = 1.0 / (8.0 * PI.sqrt());
        assert!((s.norm() - mag).abs() < 1e-15);
        // -80π is a multiple of 2π, so the sample is real and positive.
        assert!((s.re - mag).abs() < 1e-12 && s.im.abs() < 1e-12);
    }

    #[test]
    fn lateral_derivatives_vanish_above_terminal() {
        let t = term(0.0, 0.0, 3.0);
        let g = spatial_gradient(&t, SurfacePoint::new(0.0, 0.0), 0.1, 0.0);
        assert_eq!(g.ds1, Complex64::new(0.0, 0.0));
        assert_eq!(g.ds2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ds1_magnitude_even_in_x_on_axis() {
        let t = term(0.0, 0.0, 2.5);
        for x in [0.1, 0.7, 1.9] {
            let a = spatial_gradient(&t, SurfacePoint::new(x, 0.3), 0.1, 0.0).ds1.norm();
            let b = spatial_gradient(&t, SurfacePoint::new(-x, 0.3), 0.1, 0.0).ds1.norm();
            assert!((a - b).abs() <= 1e-15 * a);
        }
    }

    #[test]
    fn phase_derivative_is_minus_j_signal() {
        let t = term(0.6, 0.1, 2.0);
        let p = SurfacePoint::new(-0.3, 0.8);
        let g = spatial_gradient(&t, p, 0.1, 0.4);
        let s = noiseless_signal(&t, p, 0.1, 0.4);
        assert!((g.ds4 - (-Complex64::i() * s)).norm() < 1e-15);
    }

    #[test]
    fn cross_term_is_odd_on_axis() {
        let t = term(0.0, 0.0, 4.0);
        let a = fisher_integrand(Param::X, Param::Z, &t, SurfacePoint::new(0.5, 0.2), 0.1);
        let b = fisher_integrand(Param::X, Param::Z, &t, SurfacePoint::new(-0.5, 0.2), 0.1);
        assert_eq!(a, -b);
    }

    #[test]
    fn packed_layout_matches_integrand() {
        let t = term(0.4, -0.3, 2.0);
        let p = SurfacePoint::new(0.2, 0.5);
        let packed = fisher_integrand_packed(&t, p, 0.1, 4);
        for i in 0..4 {
            for j in 0..4 {
                let v = fisher_integrand(Param::ALL[i], Param::ALL[j], &t, p, 0.1);
                assert_eq!(packed[packed_index(i, j, 4)], v);
            }
        }
        let packed3 = fisher_integrand_packed(&t, p, 0.1, 3);
        for i in 0..3 {
            for j in 0..3 {
                let v = fisher_integrand(Param::ALL[i], Param::ALL[j], &t, p, 0.1);
                assert_eq!(packed3[packed_index(i, j, 3)], v);
            }
        }
    }

    fn central_difference(t: &Terminal, p: SurfacePoint, lambda: f64, phase: f64, which: Param) -> Complex64 {
        let h = match which {
            Param::Phase => 1e-6,
            _ => 1e-6 * t.z0,
        };
        let shift = |d: f64| -> Complex64 {
            let mut tt = *t;
            let mut ph = phase;
            match which {
                Param::X => tt.x0 += d,
                Param::Y => tt.y0 += d,
                Param::Z => tt.z0 += d,
                Param::Phase => ph += d,
            }
            noiseless_signal(&tt, p, lambda, ph)
        };
        (shift(h) - shift(-h)) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn analytic_matches_complex_product(
            x0 in -3.0..3.0f64, y0 in -3.0..3.0f64, z0 in 0.5..6.0f64,
            x in -2.0..2.0f64, y in -2.0..2.0f64,
            lambda in 0.01..0.5f64, phase in -4.0..4.0f64,
            i in 0usize..4, j in 0usize..4,
        ) {
            let t = term(x0, y0, z0);
            let p = SurfacePoint::new(x, y);
            let (pi_, pj) = (Param::ALL[i], Param::ALL[j]);
            let fast = fisher_integrand(pi_, pj, &t, p, lambda);
            let naive = fisher_integrand_complex(pi_, pj, &t, p, lambda, phase);
            // Scale by the diagonal magnitudes so that near-zero cross terms are
            // compared on the natural scale.
            let scale = (fisher_integrand(pi_, pi_, &t, p, lambda)
                * fisher_integrand(pj, pj, &t, p, lambda)).sqrt();
            prop_assert!((fast - naive).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE),
                "fast {fast} naive {naive} scale {scale}");
            prop_assert_eq!(fast, fisher_integrand(pj, pi_, &t, p, lambda));
            if i == j { prop_assert!(fast >= 0.0); }
        }

        #[test]
        fn derivatives_match_central_differences(
            x0 in -2.0..2.0f64, y0 in -2.0..2.0f64, z0 in 1.0..6.0f64,
            x in -1.0..1.0f64, y in -1.0..1.0f64,
            lambda in 0.05..0.5f64, phase in -3.0..3.0f64,
        ) {
            let t = term(x0, y0, z0);
            let p = SurfacePoint::new(x, y);
            let g = spatial_gradient(&t, p, lambda, phase);
            let scale = Param::ALL.iter().map(|&q| g.get(q).norm()).fold(0.0, f64::max);
            for q in Param::ALL {
                let fd = central_difference(&t, p, lambda, phase, q);
                let err = (fd - g.get(q)).norm();
                prop_assert!(err <= 1e-6 * scale, "{q:?}: fd {fd} analytic {} err {err}", g.get(q));
            }
        }
    }
}
