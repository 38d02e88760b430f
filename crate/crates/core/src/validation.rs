//! The twelve end-to-end acceptance checks, shared by the test suite and the
//! `validate` command.
//!
//! Each check computes its quantities from independent routes, compares them
//! against a fixed tolerance and returns the measured values whatever the
//! outcome.

use std::f64::consts::PI;

use serde::Serialize;

use crate::approx::crlb_approx_noncpl;
use crate::asymptotics::{fundamental_limit, loglog_slope, logspace, phase_regime_boundary, phase_to_depth_ratio};
use crate::crlb::{crlb_from_fisher, CrlbReport};
use crate::deployment::{multi_panel_fisher, split_threshold, Deployment, Split};
use crate::fisher::{fisher_cpl_closed, fisher_discrete, fisher_numeric, fisher_numeric_complex};
use crate::geometry::{Scenario, Terminal, DEFAULT_N0};
use crate::phase::{crlb_phase_cpl_closed, phase_bounds_f};
use crate::quadrature::{discrete_element_sum, QuadratureSpec};
use crate::signal::Param;
use crate::spherical::crlb_spherical;

type BoxError = Box<dyn std::error::Error + Send + Sync>;

/// Result of one acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Named measurements, in evaluation order.
    #[serde(serialize_with = "as_map")]
    pub measured: Vec<(String, f64)>,
    pub detail: String,
    /// Set when a computation failed rather than a tolerance.
    pub error: Option<String>,
}

fn as_map<S: serde::Serializer>(v: &[(String, f64)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, x) in v {
        m.serialize_entry(k, x)?;
    }
    m.end()
}

impl Outcome {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            passed: true,
            measured: Vec::new(),
            detail: String::new(),
            error: None,
        }
    }

    fn record(&mut self, name: impl Into<String>, value: f64) {
        self.measured.push((name.into(), value));
    }

    /// Record `value` and require `ok`.
    fn require(&mut self, name: impl Into<String>, value: f64, ok: bool) {
        let name = name.into();
        if !ok {
            self.passed = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&format!("{name} = {value:.6e} out of tolerance"));
        }
        self.record(name, value);
    }

    fn finish(mut self, r: Result<(), BoxError>) -> Self {
        if let Err(e) = r {
            self.passed = false;
            self.error = Some(e.to_string());
        }
        if self.passed && self.detail.is_empty() {
            self.detail.push_str("all measurements within tolerance");
        }
        self
    }

    /// `PASS [id] title: detail` or `FAIL ...`.
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let detail = self.error.as_deref().unwrap_or(&self.detail);
        format!("{tag} [{:02}] {}: {}", self.id, self.title, detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn single(t: Terminal, r: f64, lambda: f64) -> Result<Scenario, BoxError> {
    Ok(Scenario::single(t, r, lambda)?)
}

fn numeric_crlb(s: &Scenario, spec: &QuadratureSpec) -> Result<CrlbReport, BoxError> {
    Ok(crlb_from_fisher(&fisher_numeric(s, &s.panels()[0], spec)?)?)
}

fn known_phase_closed(z0: f64, r: f64, lambda: f64) -> Result<CrlbReport, BoxError> {
    Ok(crlb_from_fisher(&fisher_cpl_closed(z0, r, lambda, DEFAULT_N0))?)
}

/// On-axis closed forms against quadrature, relative error ≤ 1e-6.
pub fn closed_form_fidelity(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(1, "closed-form fidelity");
    let r = (|| {
        let mut worst: f64 = 0.0;
        for z0 in [2.0, 4.0, 8.0] {
            for radius in [0.5, 1.0, 2.0] {
                let s = single(Terminal::on_axis(z0)?, radius, 0.1)?;
                let num = fisher_numeric(&s, &s.panels()[0], spec)?;
                let closed = fisher_cpl_closed(z0, radius, 0.1, DEFAULT_N0);
                for p in Param::SPATIAL {
                    worst = worst.max(rel(closed.get(p, p), num.get(p, p)));
                }
            }
        }
        o.require("max_rel_error", worst, worst <= 1e-6);
        Ok(())
    })();
    o.finish(r)
}

/// All bounds within 1% of `3λ²/(2π²)` at `τ = 1e4`, on the axis and at
/// `r_perp = 4`.
pub fn fundamental_limit_check(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(2, "fundamental limit");
    let r = (|| {
        let (lambda, z0) = (0.1, 4.0);
        let radius = z0 * 1e4f64.sqrt();
        let lim = fundamental_limit(lambda);
        o.record("limit_m2", lim);
        let c = known_phase_closed(z0, radius, lambda)?;
        for (name, v) in [("cpl_c_x", c.c_x), ("cpl_c_y", c.c_y), ("cpl_c_z", c.c_z)] {
            o.require(format!("{name}_rel_dev"), rel(v, lim), rel(v, lim) <= 0.01);
        }
        let s = single(Terminal::new(4.0, 0.0, z0)?, radius, lambda)?;
        let c = numeric_crlb(&s, spec)?;
        for (name, v) in [("off_c_x", c.c_x), ("off_c_y", c.c_y), ("off_c_z", c.c_z)] {
            o.require(format!("{name}_rel_dev"), rel(v, lim), rel(v, lim) <= 0.01);
        }
        Ok(())
    })();
    o.finish(r)
}

/// Regression slopes on `τ ∈ [1e-3, 1e-2]`: lateral `-2 ± 0.05`, depth
/// `-1 ± 0.05`.
pub fn slope_laws() -> Outcome {
    let mut o = Outcome::new(3, "slope laws");
    let r = (|| {
        let (lambda, z0) = (0.1, 4.0);
        let taus = logspace(1e-3, 1e-2, 11);
        let mut cx = Vec::new();
        let mut cz = Vec::new();
        for &t in &taus {
            let c = known_phase_closed(z0, z0 * t.sqrt(), lambda)?;
            cx.push(c.c_x);
            cz.push(c.c_z);
        }
        let sx = loglog_slope(&taus, &cx);
        let sz = loglog_slope(&taus, &cz);
        o.require("slope_c_xy", sx, (sx + 2.0).abs() <= 0.05);
        o.require("slope_c_z", sz, (sz + 1.0).abs() <= 0.05);
        Ok(())
    })();
    o.finish(r)
}

/// Near-axis approximation error for `x0 = y0 ∈ {1..8}` at `R = 0.5`,
/// `z0 = 8`: lateral ≤ 0.5%, depth ≤ 2%.
pub fn approximation_accuracy(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(4, "off-axis approximation accuracy");
    let r = (|| {
        let (lambda, z0, radius) = (0.1, 8.0, 0.5);
        let (mut ex, mut ey, mut ez) = (0.0f64, 0.0f64, 0.0f64);
        for k in 1..=8 {
            let t = Terminal::new(k as f64, k as f64, z0)?;
            let num = numeric_crlb(&single(t, radius, lambda)?, spec)?;
            let a = crlb_approx_noncpl(&t, radius, lambda, DEFAULT_N0)?.direct;
            ex = ex.max(rel(a.c_x, num.c_x));
            ey = ey.max(rel(a.c_y, num.c_y));
            ez = ez.max(rel(a.c_z, num.c_z));
        }
        o.require("max_err_x", ex, ex <= 0.005);
        o.require("max_err_y", ey, ey <= 0.005);
        o.require("max_err_z", ez, ez <= 0.02);
        Ok(())
    })();
    o.finish(r)
}

/// Unknown-phase limits at `τ = 1e4`: depth ratio 4 within 2%, phase bound 8
/// within 1%.
pub fn phase_limits() -> Outcome {
    let mut o = Outcome::new(5, "phase-uncertainty limits");
    let r = (|| {
        let (lambda, z0) = (0.1, 4.0);
        let radius = z0 * 100.0;
        let known = known_phase_closed(z0, radius, lambda)?;
        let unknown = crlb_phase_cpl_closed(z0, radius, lambda, DEFAULT_N0)?;
        let ratio = unknown.c_z / known.c_z;
        let cphi = unknown.c_phase.unwrap_or(f64::NAN);
        o.require("c_z_ratio", ratio, rel(ratio, 4.0) <= 0.02);
        o.require("c_phase", cphi, rel(cphi, 8.0) <= 0.01);
        Ok(())
    })();
    o.finish(r)
}

/// `C_φ/C_z` within 5% of `4π²/λ²` for `τ ∈ [2e-3, 2e-2]`.
pub fn phase_ratio() -> Outcome {
    let mut o = Outcome::new(6, "phase-to-depth ratio");
    let (lambda, z0) = (0.1, 4.0);
    let target = phase_to_depth_ratio(lambda);
    let mut worst: f64 = 0.0;
    for t in logspace(2e-3, 2e-2, 11) {
        let b = phase_bounds_f(z0, z0 * t.sqrt(), lambda);
        worst = worst.max(rel(b.c_phase / b.c_z, target));
    }
    o.record("target", target);
    o.require("max_rel_dev", worst, worst <= 0.05);
    o.finish(Ok(()))
}

/// Unknown-phase depth slopes: `-3 ± 0.1` between the regime boundary and
/// `τ = 0.1`, `-1 ± 0.1` below a tenth of the boundary.
///
/// The cubic window needs the boundary well below 0.1, so the check runs at
/// `λ = 1 mm`, `z0 = 4`. The slope at `λ = 0.1` is reported for reference.
pub fn third_order_regime() -> Outcome {
    let mut o = Outcome::new(7, "third-order regime");
    let slope = |lambda: f64, z0: f64, a: f64, b: f64| {
        let taus = logspace(a, b, 11);
        let cz: Vec<f64> = taus.iter().map(|&t| phase_bounds_f(z0, z0 * t.sqrt(), lambda).c_z).collect();
        loglog_slope(&taus, &cz)
    };
    let (lambda, z0) = (1e-3, 4.0);
    let boundary = phase_regime_boundary(lambda, z0);
    o.record("boundary_tau", boundary);
    let (a, b) = (3e-3, 1e-2);
    o.record("cubic_window_lo", a);
    o.record("cubic_window_hi", b);
    let s3 = slope(lambda, z0, a, b);
    o.require("slope_cubic", s3, a > boundary && b < 0.1 && (s3 + 3.0).abs() <= 0.1);
    let s1 = slope(lambda, z0, 1e-3 * boundary, 0.1 * boundary);
    o.require("slope_linear", s1, (s1 + 1.0).abs() <= 0.1);
    let b01 = phase_regime_boundary(0.1, 4.0);
    o.record("reference_boundary_lambda_0.1", b01);
    o.record("reference_slope_lambda_0.1", slope(0.1, 4.0, 2.0 * b01, 0.1));
    o.finish(Ok(()))
}

/// Four-panel versus single-panel crossover within 10% of
/// `√((W² + H²)/6)`, and matching depth bounds below it.
pub fn deployment_threshold(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(8, "deployment threshold");
    let r = (|| {
        let (w, h, z0, lambda) = (4.0, 4.0, 8.0, 0.1);
        let t = Terminal::on_axis(z0)?;
        let bounds = |radius: f64, split: Split| -> Result<CrlbReport, BoxError> {
            let d = Deployment::new(w, h, radius, split)?;
            Ok(crlb_from_fisher(&multi_panel_fisher(&d, &t, lambda, DEFAULT_N0, false, spec)?)?)
        };
        let gap = |radius: f64| -> Result<f64, BoxError> {
            Ok((bounds(radius, Split::Quad)?.c_x / bounds(radius, Split::Single)?.c_x).ln())
        };
        let (mut lo, mut hi) = (1.0, 4.0);
        let (glo, ghi) = (gap(lo)?, gap(hi)?);
        if glo.signum() == ghi.signum() {
            return Err(format!("no crossover in [{lo}, {hi}]: {glo:.3e}, {ghi:.3e}").into());
        }
        for _ in 0..40 {
            let m = 0.5 * (lo + hi);
            if gap(m)?.signum() == glo.signum() {
                lo = m;
            } else {
                hi = m;
            }
        }
        let r_star = 0.5 * (lo + hi);
        let target = split_threshold(w, h);
        o.record("threshold", target);
        o.require("crossover_radius", r_star, rel(r_star, target) <= 0.1);
        let mut worst: f64 = 0.0;
        for radius in [0.25, 0.5, 1.0, 1.5, 2.0] {
            if radius < r_star {
                worst = worst.max(rel(bounds(radius, Split::Quad)?.c_z, bounds(radius, Split::Single)?.c_z));
            }
        }
        o.require("max_c_z_rel_gap_below", worst, worst <= 0.1);
        Ok(())
    })();
    o.finish(r)
}

/// Azimuthal invariance, phase-value independence and on-axis diagonality.
pub fn symmetry_suite() -> Outcome {
    let mut o = Outcome::new(9, "symmetry suite");
    let r = (|| {
        let tight = QuadratureSpec::default().with_rel_tol(1e-12);
        let (lambda, z0, ring, radius) = (0.1, 4.0, 4.0, 1.0);
        let mut cz = Vec::new();
        let mut cxy = Vec::new();
        for k in 0..8 {
            let psi = 2.0 * PI * k as f64 / 8.0 + 0.1;
            let t = Terminal::new(ring * psi.cos(), ring * psi.sin(), z0)?;
            let c = numeric_crlb(&single(t, radius, lambda)?, &tight)?;
            cz.push(c.c_z);
            cxy.push(c.c_x + c.c_y);
        }
        let spread = |v: &[f64]| {
            let max = v.iter().copied().fold(f64::MIN, f64::max);
            let min = v.iter().copied().fold(f64::MAX, f64::min);
            (max - min) / min
        };
        o.require("c_z_spread", spread(&cz), spread(&cz) <= 1e-6);
        o.require("c_xy_trace_spread", spread(&cxy), spread(&cxy) <= 1e-6);

        let spec = QuadratureSpec::default();
        let t = Terminal::new(1.0, -0.5, z0)?;
        let base = single(t, radius, lambda)?.with_phase_unknown(true);
        let a = fisher_numeric(&base.clone().with_phase(0.0), &base.panels()[0], &spec)?;
        let b = fisher_numeric(&base.clone().with_phase(1.3), &base.panels()[0], &spec)?;
        let bitwise = a.matrix() == b.matrix();
        o.require("phase_bitwise_equal", f64::from(u8::from(bitwise)), bitwise);
        let ca = fisher_numeric_complex(&base.clone().with_phase(0.0), &base.panels()[0], &spec)?;
        let cb = fisher_numeric_complex(&base.clone().with_phase(1.3), &base.panels()[0], &spec)?;
        let d = (ca.matrix() - cb.matrix()).amax() / ca.matrix().amax();
        o.require("phase_complex_route_gap", d, d <= 1e-12);

        let s = single(Terminal::on_axis(z0)?, radius, lambda)?.with_phase_unknown(true);
        let f = fisher_numeric(&s, &s.panels()[0], &spec)?;
        let m = f.matrix();
        let mut off: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let zero_expected = i != j && !(i == 2 && j == 3 || i == 3 && j == 2);
                if zero_expected {
                    off = off.max(m[(i, j)].abs());
                }
            }
        }
        let ratio = off / m.trace();
        o.require("cpl_offdiag_over_trace", ratio, ratio <= 1e-9);
        Ok(())
    })();
    o.finish(r)
}

/// Half-wavelength element sums against quadrature within 1%, element
/// count within 2% of `4πR²/λ²`.
pub fn oracle_equivalence(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(10, "discrete-element oracle");
    let r = (|| {
        let (lambda, z0, radius) = (0.1, 4.0, 1.0);
        let s = single(Terminal::on_axis(z0)?, radius, lambda)?.with_phase_unknown(true);
        let p = &s.panels()[0];
        let cont = fisher_numeric(&s, p, spec)?;
        let disc = fisher_discrete(&s, p, lambda / 2.0)?;
        let mut worst: f64 = 0.0;
        for q in Param::ALL {
            worst = worst.max(rel(disc.get(q, q), cont.get(q, q)));
        }
        let i34 = rel(disc.get(Param::Z, Param::Phase), cont.get(Param::Z, Param::Phase));
        o.require("max_diag_rel_error", worst, worst <= 0.01);
        o.require("i34_rel_error", i34, i34 <= 0.01);
        let count = discrete_element_sum(Param::Z, Param::Z, &s, p)?.elements as f64;
        let expected = 4.0 * PI * radius * radius / (lambda * lambda);
        o.record("expected_elements", expected);
        o.require("element_count", count, rel(count, expected) <= 0.02);
        Ok(())
    })();
    o.finish(r)
}

/// Scaling `N0` by `k` scales every bound entry by `k`.
pub fn noise_linearity(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(11, "noise linearity");
    let r = (|| {
        let t = Terminal::new(1.5, 0.5, 4.0)?;
        let base = single(t, 1.0, 0.1)?.with_phase_unknown(true);
        let c1 = numeric_crlb(&base, spec)?.matrix;
        let mut worst: f64 = 0.0;
        for k in [0.5, 2.0, 10.0] {
            let ck = numeric_crlb(&base.clone().with_n0(DEFAULT_N0 * k)?, spec)?.matrix;
            let expect = &c1 * k;
            let d = (&ck - &expect).amax() / expect.amax();
            worst = worst.max(d);
        }
        o.require("max_rel_deviation", worst, worst <= 1e-14);
        Ok(())
    })();
    o.finish(r)
}

/// Spherical bounds: axis limits within 1% and far-field slope `-2 ± 0.1`.
pub fn spherical_consistency(spec: &QuadratureSpec) -> Outcome {
    let mut o = Outcome::new(12, "spherical consistency");
    let r = (|| {
        let (lambda, z0, radius) = (0.1, 4.0, 1.0);
        let axis = numeric_crlb(&single(Terminal::on_axis(z0)?, radius, lambda)?, spec)?;
        let psi: f64 = 0.7;
        let rp = 1e-3 * z0;
        let t = Terminal::new(rp * psi.cos(), rp * psi.sin(), z0)?;
        let s = crlb_spherical(&numeric_crlb(&single(t, radius, lambda)?, spec)?, &t)?;
        let e1 = rel(s.c_z1, axis.c_z);
        let e2 = rel(s.c_phi, axis.c_x / t.range().powi(2));
        o.require("axis_c_z1_rel", e1, e1 <= 0.01);
        o.require("axis_c_phi_rel", e2, e2 <= 0.01);

        let far = Terminal::new(3.0, 2.0, 8.0)?;
        let taus = logspace(1e-4, 1e-3, 6);
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for &tau in &taus {
            let rep = numeric_crlb(&single(far, far.z0 * tau.sqrt(), lambda)?, spec)?;
            let sp = crlb_spherical(&rep, &far)?;
            a.push(sp.c_z1);
            b.push(sp.c_phi);
            c.push(sp.c_psi);
        }
        for (name, v) in [("slope_c_z1", &a), ("slope_c_phi", &b), ("slope_c_psi", &c)] {
            let sl = loglog_slope(&taus, v);
            o.require(name, sl, (sl + 2.0).abs() <= 0.1);
        }
        Ok(())
    })();
    o.finish(r)
}

/// All twelve checks in order.
pub fn run_all(spec: &QuadratureSpec) -> Vec<Outcome> {
    vec![
        closed_form_fidelity(spec),
        fundamental_limit_check(spec),
        slope_laws(),
        approximation_accuracy(spec),
        phase_limits(),
        phase_ratio(),
        third_order_regime(),
        deployment_threshold(spec),
        symmetry_suite(),
        oracle_equivalence(spec),
        noise_linearity(spec),
        spherical_consistency(spec),
    ]
}
