//! Double integrals over a disk, the `g`-function family, and a discrete
//! half-wavelength element sum used as a brute-force oracle.
//!
//! [`integrate_disk`] works in polar coordinates around the disk center. The
//! angular integral at a fixed radius is a periodic trapezoid rule, refined by
//! doubling until two successive estimates agree; for smooth periodic
//! integrands this converges geometrically. The radial integral uses
//! Gauss–Legendre panels on a globally adaptive bisection: every panel keeps
//! the difference between its one-panel and two-half-panel estimates, and the
//! worst panel is split until the summed differences meet the tolerance.
//!
//! Tolerances are relative to `∬|f|`, not `|∬f|`, so integrands that cancel
//! to zero by symmetry still converge.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

use crate::geometry::{Panel, Scenario, Terminal};
use crate::signal::{eta, fisher_integrand, Param, SurfacePoint};

/// Accuracy targets for [`integrate_disk`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of a radial panel.
    pub max_refinement_levels: u32,
    /// Integrand evaluations allowed before giving up.
    pub max_evaluations: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_refinement_levels: 20,
            max_evaluations: 50_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        if self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.rel_tol.is_finite() && self.abs_tol.is_finite() {
            Ok(())
        } else {
            Err(QuadratureError::InvalidSpec)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

/// Result of integrating `N` integrands on shared nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecIntegral<const N: usize> {
    pub values: [f64; N],
    pub error_estimates: [f64; N],
    /// `∬|f_k|`, the scale the relative tolerance refers to.
    pub magnitudes: [f64; N],
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge: estimate {value:e}, error bound {error_estimate:e} after {evaluations} evaluations")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        evaluations: u64,
    },
    #[error("disk radius must be positive and finite (R = {0})")]
    InvalidRadius(f64),
    #[error("quadrature tolerances must be positive")]
    InvalidSpec,
    #[error("g-function index k = {k}, exponent n = {n} is not supported")]
    UnsupportedExponent { k: u8, n: u32 },
    #[error("terminal is not on the panel axis")]
    NotOnAxis,
    #[error("grid pitch {pitch} leaves only {elements} elements inside the disk")]
    TooFewElements { pitch: f64, elements: usize },
}

const GL_POINTS: usize = 10;
const ANGULAR_START: usize = 16;
const ANGULAR_MAX_DOUBLINGS: u32 = 13;
/// Hard cap on radial panels, independent of the depth limit.
const MAX_PANELS: usize = 20_000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// Angular integral `∫ f(r cos θ, r sin θ) dθ` over a full turn.
struct Angular<const N: usize> {
    value: [f64; N],
    magnitude: [f64; N],
    error: [f64; N],
    evaluations: u64,
    converged: bool,
}

fn angular<const N: usize, F>(f: &F, r: f64, rel_tol: f64) -> Angular<N>
where
    F: Fn(f64, f64) -> [f64; N],
{
    let mut sum = [0.0; N];
    let mut abs = [0.0; N];
    let add = |theta: f64, sum: &mut [f64; N], abs: &mut [f64; N]| {
        let (s, c) = theta.sin_cos();
        let v = f(r * c, r * s);
        for k in 0..N {
            sum[k] += v[k];
            abs[k] += v[k].abs();
        }
    };
    let mut m = ANGULAR_START;
    for i in 0..m {
        add(2.0 * PI * i as f64 / m as f64, &mut sum, &mut abs);
    }
    let mut evaluations = m as u64;
    let mut prev: [f64; N] = std::array::from_fn(|k| sum[k] * 2.0 * PI / m as f64);
    for _ in 0..ANGULAR_MAX_DOUBLINGS {
        let step = 2.0 * PI / (2 * m) as f64;
        for i in 0..m {
            add(step * (2 * i + 1) as f64, &mut sum, &mut abs);
        }
        evaluations += m as u64;
        m *= 2;
        let h = 2.0 * PI / m as f64;
        let cur: [f64; N] = std::array::from_fn(|k| sum[k] * h);
        let mag: [f64; N] = std::array::from_fn(|k| abs[k] * h);
        let err: [f64; N] = std::array::from_fn(|k| (cur[k] - prev[k]).abs());
        let ok = (0..N).all(|k| err[k] <= rel_tol * mag[k] || mag[k] == 0.0);
        if ok && m >= 2 * ANGULAR_START {
            return Angular {
                value: cur,
                magnitude: mag,
                // Doubling converges geometrically: the last difference is a
                // generous bound for the refined estimate.
                error: err,
                evaluations,
                converged: true,
            };
        }
        prev = cur;
    }
    let h = 2.0 * PI / m as f64;
    Angular {
        value: std::array::from_fn(|k| sum[k] * h),
        magnitude: std::array::from_fn(|k| abs[k] * h),
        error: std::array::from_fn(|k| (sum[k] * h - prev[k]).abs()),
        evaluations,
        converged: false,
    }
}

/// Gauss–Legendre estimate of `∫_a^b r · A(r) dr`.
struct PanelEstimate<const N: usize> {
    value: [f64; N],
    magnitude: [f64; N],
    angular_error: [f64; N],
    evaluations: u64,
    converged: bool,
}

fn radial_panel<const N: usize, F>(f: &F, a: f64, b: f64, ang_tol: f64) -> PanelEstimate<N>
where
    F: Fn(f64, f64) -> [f64; N],
{
    let (nodes, weights) = gl_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = PanelEstimate {
        value: [0.0; N],
        magnitude: [0.0; N],
        angular_error: [0.0; N],
        evaluations: 0,
        converged: true,
    };
    for (x, w) in nodes.iter().zip(weights) {
        let r = mid + half * x;
        let ang = angular(f, r, ang_tol);
        let wr = w * half * r;
        for k in 0..N {
            out.value[k] += wr * ang.value[k];
            out.magnitude[k] += wr * ang.magnitude[k];
            out.angular_error[k] += wr * ang.error[k];
        }
        out.evaluations += ang.evaluations;
        out.converged &= ang.converged;
    }
    out
}

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    depth: u32,
    left: PanelEstimate<N>,
    right: PanelEstimate<N>,
    error: [f64; N],
}

impl<const N: usize> Segment<N> {
    fn build<F>(f: &F, a: f64, b: f64, depth: u32, whole: PanelEstimate<N>, ang_tol: f64) -> Self
    where
        F: Fn(f64, f64) -> [f64; N],
    {
        let m = 0.5 * (a + b);
        let left = radial_panel(f, a, m, ang_tol);
        let right = radial_panel(f, m, b, ang_tol);
        let error = std::array::from_fn(|k| {
            (whole.value[k] - left.value[k] - right.value[k]).abs()
                + left.angular_error[k]
                + right.angular_error[k]
        });
        Segment {
            a,
            b,
            depth,
            left,
            right,
            error,
        }
    }

    fn value(&self, k: usize) -> f64 {
        self.left.value[k] + self.right.value[k]
    }

    fn magnitude(&self, k: usize) -> f64 {
        self.left.magnitude[k] + self.right.magnitude[k]
    }

    fn evaluations(&self) -> u64 {
        self.left.evaluations + self.right.evaluations
    }

    fn angular_ok(&self) -> bool {
        self.left.converged && self.right.converged
    }
}

/// Integrate `N` functions of `(x, y)` over the disk of radius `radius`
/// centered at the origin, sharing evaluation points.
///
/// `breaks` are optional radii where the integrand changes character (for
/// example the foot of the terminal); they seed the radial partition.
pub fn integrate_disk_vec<const N: usize, F>(
    f: F,
    radius: f64,
    spec: &QuadratureSpec,
    breaks: &[f64],
) -> Result<VecIntegral<N>, QuadratureError>
where
    F: Fn(f64, f64) -> [f64; N],
{
    spec.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(QuadratureError::InvalidRadius(radius));
    }
    let ang_tol = 0.1 * spec.rel_tol;
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b < radius)
        .collect();
    cuts.push(0.0);
    cuts.push(radius);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * radius);

    let mut evaluations = 0u64;
    let mut segments: Vec<Segment<N>> = Vec::new();
    for w in cuts.windows(2) {
        let whole = radial_panel(&f, w[0], w[1], ang_tol);
        evaluations += whole.evaluations;
        let seg = Segment::build(&f, w[0], w[1], 0, whole, ang_tol);
        evaluations += seg.evaluations();
        segments.push(seg);
    }

    loop {
        let totals: [f64; N] = std::array::from_fn(|k| segments.iter().map(|s| s.value(k)).sum());
        let mags: [f64; N] = std::array::from_fn(|k| segments.iter().map(|s| s.magnitude(k)).sum());
        let errs: [f64; N] = std::array::from_fn(|k| segments.iter().map(|s| s.error[k]).sum());
        let tol: [f64; N] = std::array::from_fn(|k| spec.abs_tol.max(spec.rel_tol * mags[k]));
        let done = (0..N).all(|k| errs[k] <= tol[k]) && segments.iter().all(Segment::angular_ok);
        if done {
            return Ok(VecIntegral {
                values: totals,
                error_estimates: errs,
                magnitudes: mags,
                evaluations,
            });
        }

        // Worst splittable segment, measured in units of each component's tolerance.
        let badness = |s: &Segment<N>| -> f64 {
            let e = (0..N).map(|k| s.error[k] / tol[k]).fold(0.0, f64::max);
            if s.angular_ok() {
                e
            } else {
                f64::INFINITY
            }
        };
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < spec.max_refinement_levels)
            .max_by(|a, b| badness(a.1).total_cmp(&badness(b.1)))
            .map(|(i, _)| i);
        let within_budget = segments.len() < MAX_PANELS && evaluations < spec.max_evaluations;
        let Some(i) = worst.filter(|_| within_budget) else {
            let k = (0..N)
                .max_by(|&a, &b| (errs[a] / tol[a]).total_cmp(&(errs[b] / tol[b])))
                .unwrap_or(0);
            return Err(QuadratureError::NonConvergence {
                value: totals.get(k).copied().unwrap_or(0.0),
                error_estimate: errs.get(k).copied().unwrap_or(0.0),
                evaluations,
            });
        };
        let seg = segments.swap_remove(i);
        let m = 0.5 * (seg.a + seg.b);
        let l = Segment::build(&f, seg.a, m, seg.depth + 1, seg.left, ang_tol);
        let r = Segment::build(&f, m, seg.b, seg.depth + 1, seg.right, ang_tol);
        evaluations += l.evaluations() + r.evaluations();
        segments.push(l);
        segments.push(r);
    }
}

/// Integrate a scalar function of `(x, y)` over the disk of radius `radius`.
pub fn integrate_disk<F>(f: F, radius: f64, spec: &QuadratureSpec) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64, f64) -> f64,
{
    let r = integrate_disk_vec(|x, y| [f(x, y)], radius, spec, &[])?;
    Ok(IntegralResult {
        value: r.values[0],
        error_estimate: r.error_estimates[0],
        evaluations: r.evaluations,
    })
}

/// Radial breakpoints that help the adaptive partition for a terminal at
/// `local` in panel coordinates: the foot of the terminal plus a geometric
/// ladder on the `z0` scale.
pub fn natural_breaks(local: &Terminal, radius: f64) -> Vec<f64> {
    let mut b = vec![local.r_perp()];
    let mut r = local.z0;
    while r < radius {
        b.push(r);
        r *= 4.0;
    }
    b
}

/// Which `g` function: weight `x²`, `y²`, or `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GKind {
    XSquared,
    YSquared,
    Unit,
}

impl GKind {
    pub fn from_index(k: u8) -> Option<GKind> {
        match k {
            1 => Some(GKind::XSquared),
            2 => Some(GKind::YSquared),
            3 => Some(GKind::Unit),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            GKind::XSquared => 1,
            GKind::YSquared => 2,
            GKind::Unit => 3,
        }
    }
}

pub const SUPPORTED_EXPONENTS: [u32; 4] = [3, 4, 5, 7];

/// `∬ w(x, y) η^(-n/2) dx dy` over the panel by quadrature, for a terminal in
/// panel-local coordinates.
pub fn g_numeric(
    kind: GKind,
    n: u32,
    local: &Terminal,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    if !SUPPORTED_EXPONENTS.contains(&n) {
        return Err(QuadratureError::UnsupportedExponent { k: kind.index(), n });
    }
    let p = -(n as f64) / 2.0;
    let t = *local;
    let r = integrate_disk_vec(
        move |x, y| {
            let e = eta(&t, SurfacePoint::new(x, y)).powf(p);
            let w = match kind {
                GKind::XSquared => x * x,
                GKind::YSquared => y * y,
                GKind::Unit => 1.0,
            };
            [w * e]
        },
        radius,
        spec,
        &natural_breaks(local, radius),
    )?;
    Ok(r.values[0])
}

/// Closed-form `g` functions for a terminal on the panel axis.
///
/// `g1 = g2 = π/(n² - 6n + 8) · (2 z0^(4-n) - (R² + z0²)^(1-n/2) (nR² - 2R² + 2z0²))`
/// and `g3 = 2π/(n - 2) · (z0^(2-n) - (R² + z0²)^(1-n/2))`. Exponents that
/// zero a denominator (`n = 2`; `n = 4` for the weighted kinds) are rejected.
pub fn g_closed_cpl(kind: GKind, n: u32, z0: f64, radius: f64) -> Result<f64, QuadratureError> {
    let nf = n as f64;
    let s = radius * radius + z0 * z0;
    match kind {
        GKind::XSquared | GKind::YSquared => {
            let den = nf * nf - 6.0 * nf + 8.0;
            if den == 0.0 || n < 3 {
                return Err(QuadratureError::UnsupportedExponent { k: kind.index(), n });
            }
            let r2 = radius * radius;
            Ok(PI / den
                * (2.0 * z0.powf(4.0 - nf) - s.powf(1.0 - nf / 2.0) * (nf * r2 - 2.0 * r2 + 2.0 * z0 * z0)))
        }
        GKind::Unit => {
            if n <= 2 {
                return Err(QuadratureError::UnsupportedExponent { k: kind.index(), n });
            }
            // z0^(2-n) - s^(1-n/2) = z0^(2-n) (1 - (1+τ)^(1-n/2)), written with
            // expm1/ln1p to keep digits for small panels.
            let tau = (radius / z0).powi(2);
            let bracket = -((1.0 - nf / 2.0) * tau.ln_1p()).exp_m1();
            Ok(2.0 * PI / (nf - 2.0) * z0.powf(2.0 - nf) * bracket)
        }
    }
}

/// Riemann sum over a square element grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteSum {
    pub value: f64,
    /// Number of grid elements whose center lies inside the disk.
    pub elements: usize,
    /// `πR² / pitch²`, the continuous element count.
    pub expected_elements: f64,
    pub pitch: f64,
}

/// Element-grid sum of the Fisher integrand `(i, j)` at half-wavelength pitch.
pub fn discrete_element_sum(i: Param, j: Param, scenario: &Scenario, panel: &Panel) -> Result<DiscreteSum, QuadratureError> {
    discrete_element_sum_with_pitch(i, j, scenario, panel, scenario.lambda() / 2.0)
}

/// Same as [`discrete_element_sum`] with an explicit grid pitch.
pub fn discrete_element_sum_with_pitch(
    i: Param,
    j: Param,
    scenario: &Scenario,
    panel: &Panel,
    pitch: f64,
) -> Result<DiscreteSum, QuadratureError> {
    let local = scenario.terminal().relative_to(panel);
    let lambda = scenario.lambda();
    let v = element_grid_sum(panel.radius, pitch, |p| [fisher_integrand(i, j, &local, p, lambda)])?;
    Ok(DiscreteSum {
        value: v.0[0],
        elements: v.1,
        expected_elements: PI * panel.radius * panel.radius / (pitch * pitch),
        pitch,
    })
}

/// Sum `f` over grid points `(ip, jp)` inside the disk, times `p²`.
pub(crate) fn element_grid_sum<const N: usize, F>(
    radius: f64,
    pitch: f64,
    f: F,
) -> Result<([f64; N], usize), QuadratureError>
where
    F: Fn(SurfacePoint) -> [f64; N],
{
    let m = (radius / pitch).floor() as i64;
    let r2 = radius * radius;
    let mut acc = [0.0; N];
    let mut count = 0usize;
    for a in -m..=m {
        let x = a as f64 * pitch;
        for b in -m..=m {
            let y = b as f64 * pitch;
            if x * x + y * y <= r2 {
                let v = f(SurfacePoint::new(x, y));
                for k in 0..N {
                    acc[k] += v[k];
                }
                count += 1;
            }
        }
    }
    if count < 4 {
        return Err(QuadratureError::TooFewElements { pitch, elements: count });
    }
    let area = pitch * pitch;
    Ok((acc.map(|v| v * area), count))
}
