//! Splitting one aperture into several cooperating panels.
//!
//! The panels are phase-coherent parts of one receiver, so their Fisher
//! matrices add. Every split keeps the total disk area of a single panel of
//! radius `R`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crlb::{crlb_from_fisher, CrlbError, CrlbReport};
use crate::fisher::{fisher_numeric_local, FisherError, FisherMatrix, Method};
use crate::geometry::{GeometryError, Panel, Terminal};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeploymentError {
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Crlb(#[from] CrlbError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Monte Carlo needs at least one terminal")]
    NoTerminals,
    #[error("every Monte Carlo terminal had a singular Fisher matrix")]
    AllSingular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    /// One panel of radius `R` at the origin.
    Single,
    /// Four panels of radius `R/2` at `(±W/4, ±H/4)`.
    Quad,
    /// A 4×4 grid of radius-`R/4` panels at `(±W/8·{1,3}, ±H/8·{1,3})`.
    Hex16,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Single, Split::Quad, Split::Hex16];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Single => "single",
            Split::Quad => "quad",
            Split::Hex16 => "hex16",
        }
    }
}

/// A `W × H` mounting surface carrying a total aperture of one radius-`R`
/// disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub w: f64,
    pub h: f64,
    pub radius: f64,
    pub split: Split,
}

impl Deployment {
    pub fn new(w: f64, h: f64, radius: f64, split: Split) -> Result<Self, GeometryError> {
        if !(w >= 0.0 && h >= 0.0 && w.is_finite() && h.is_finite()) {
            return Err(GeometryError::NonFinite("surface size"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { w, h, radius, split })
    }

    /// Panel centres sit on a regular grid over the surface. Panels may
    /// overlap once `R` exceeds the grid spacing; their information is still
    /// summed.
    pub fn panels(&self) -> Vec<Panel> {
        let (w, h, r) = (self.w, self.h, self.radius);
        let mk = |cx: f64, cy: f64, rr: f64| Panel { cx, cy, radius: rr };
        match self.split {
            Split::Single => vec![mk(0.0, 0.0, r)],
            Split::Quad => [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
                .iter()
                .map(|&(sx, sy)| mk(sx * w / 4.0, sy * h / 4.0, r / 2.0))
                .collect(),
            Split::Hex16 => {
                let offs = [-3.0, -1.0, 1.0, 3.0];
                let mut v = Vec::with_capacity(16);
                for &sy in &offs {
                    for &sx in &offs {
                        v.push(mk(sx * w / 8.0, sy * h / 8.0, r / 4.0));
                    }
                }
                v
            }
        }
    }

    pub fn total_area(&self) -> f64 {
        self.panels().iter().map(Panel::area).sum()
    }
}

/// Sum of per-panel Fisher matrices, each computed with the terminal in that
/// panel's local frame.
pub fn multi_panel_fisher(
    deployment: &Deployment,
    terminal: &Terminal,
    lambda: f64,
    n0: f64,
    phase_unknown: bool,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix, DeploymentError> {
    let mut total: Option<FisherMatrix> = None;
    for p in deployment.panels() {
        let f = fisher_numeric_local(&terminal.relative_to(&p), p.radius, lambda, n0, phase_unknown, spec)?;
        total = Some(match total {
            None => f,
            Some(acc) => acc.try_add(&f)?,
        });
    }
    let f = total.expect("every split has panels");
    Ok(if deployment.panels().len() > 1 { f.with_method(Method::MultiPanel) } else { f })
}

/// Far-field informations of the four-panel split for a terminal on the
/// axis, with `D = √(W² + H²)/4`, for `N0 = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadFarField {
    pub d: f64,
    /// `π² z0 R⁴ / (16 λ² (z0² + D²)^(5/2)) + π² D² z0 R² / (2 λ² (z0² + D²)^(5/2))`
    pub i_xy_finite_d: f64,
    /// `π² R² z0³ / (λ² (z0² + D²)^(5/2))`
    pub i_z_finite_d: f64,
    /// `(π² R⁴ / (4 λ² z0⁴)) (1/4 + 2D²/R²)`, for `D ≪ z0`.
    pub i_xy: f64,
    /// `π² R² / (λ² z0²)`, for `D ≪ z0`.
    pub i_z: f64,
    /// `π² D² R² / (2 λ² z0⁴)`, for `R ≪ D ≪ z0`.
    pub i_xy_separated: f64,
}

pub fn quad_farfield_fisher(w: f64, h: f64, radius: f64, z0: f64, lambda: f64) -> QuadFarField {
    let d = (w * w + h * h).sqrt() / 4.0;
    let p2 = PI * PI;
    let l2 = lambda * lambda;
    let s52 = (z0 * z0 + d * d).powf(2.5);
    let (r2, r4) = (radius * radius, radius.powi(4));
    QuadFarField {
        d,
        i_xy_finite_d: p2 * z0 * r4 / (16.0 * l2 * s52) + p2 * d * d * z0 * r2 / (2.0 * l2 * s52),
        i_z_finite_d: p2 * r2 * z0.powi(3) / (l2 * s52),
        i_xy: p2 * r4 / (4.0 * l2 * z0.powi(4)) * (0.25 + 2.0 * d * d / r2),
        i_z: p2 * r2 / (l2 * z0 * z0),
        i_xy_separated: p2 * d * d * r2 / (2.0 * l2 * z0.powi(4)),
    }
}

/// Largest total radius for which four panels beat one in the lateral
/// far-field information: `√((W² + H²)/6)`.
pub fn split_threshold(w: f64, h: f64) -> f64 {
    ((w * w + h * h) / 6.0).sqrt()
}

/// Population for CRLB statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_terminals: usize,
    /// Terminals are uniform in `[-xy_range, xy_range]²`.
    pub xy_range: f64,
    pub z0: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_terminals: 1000,
            xy_range: 2.0,
            z0: 12.0,
            seed: 0,
        }
    }
}

/// Terminal `i` of the population; depends only on `(seed, i)`.
pub fn mc_terminal(cfg: &McConfig, i: usize) -> Result<Terminal, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    let x = rng.random_range(-cfg.xy_range..=cfg.xy_range);
    let y = rng.random_range(-cfg.xy_range..=cfg.xy_range);
    Terminal::new(x, y, cfg.z0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStats {
    pub mean_c_x: f64,
    pub mean_c_y: f64,
    pub mean_c_z: f64,
    pub mean_c_phase: Option<f64>,
    /// Sorted per-terminal bounds, for empirical CDFs.
    pub sorted_c_x: Vec<f64>,
    pub sorted_c_y: Vec<f64>,
    pub sorted_c_z: Vec<f64>,
    pub sorted_c_phase: Vec<f64>,
    /// Terminals dropped for a singular Fisher matrix.
    pub excluded: usize,
    pub used: usize,
}

/// Per-terminal CRLBs over a uniform population, evaluated in parallel and
/// reduced in terminal order.
pub fn monte_carlo_stats(
    deployment: &Deployment,
    cfg: &McConfig,
    lambda: f64,
    n0: f64,
    phase_unknown: bool,
    spec: &QuadratureSpec,
) -> Result<McStats, DeploymentError> {
    if cfg.n_terminals == 0 {
        return Err(DeploymentError::NoTerminals);
    }
    let results: Vec<Result<Option<CrlbReport>, DeploymentError>> = (0..cfg.n_terminals)
        .into_par_iter()
        .map(|i| {
            let t = mc_terminal(cfg, i)?;
            let f = multi_panel_fisher(deployment, &t, lambda, n0, phase_unknown, spec)?;
            match crlb_from_fisher(&f) {
                Ok(c) => Ok(Some(c)),
                Err(CrlbError::SingularFisher { .. }) => Ok(None),
            }
        })
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    let mut excluded = 0;
    for r in results {
        match r? {
            Some(c) => reports.push(c),
            None => excluded += 1,
        }
    }
    if reports.is_empty() {
        return Err(DeploymentError::AllSingular);
    }
    let n = reports.len() as f64;
    let column = |f: &dyn Fn(&CrlbReport) -> Option<f64>| -> Vec<f64> { reports.iter().filter_map(f).collect() };
    let xs = column(&|c| Some(c.c_x));
    let ys = column(&|c| Some(c.c_y));
    let zs = column(&|c| Some(c.c_z));
    let ps = column(&|c| c.c_phase);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let sorted = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v
    };
    Ok(McStats {
        mean_c_x: mean(&xs),
        mean_c_y: mean(&ys),
        mean_c_z: mean(&zs),
        mean_c_phase: (!ps.is_empty()).then(|| mean(&ps)),
        sorted_c_x: sorted(xs),
        sorted_c_y: sorted(ys),
        sorted_c_z: sorted(zs),
        sorted_c_phase: sorted(ps),
        excluded,
        used: reports.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::fisher_numeric;
    use crate::geometry::Scenario;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn splits_preserve_area() {
        for s in Split::ALL {
            let d = Deployment::new(4.0, 4.0, 1.3, s).unwrap();
            assert!((d.total_area() - PI * 1.69).abs() < 1e-12);
        }
        assert_eq!(Deployment::new(4.0, 4.0, 1.0, Split::Hex16).unwrap().panels().len(), 16);
    }

    #[test]
    fn threshold_examples() {
        assert!((split_threshold(4.0, 4.0) - 2.309401).abs() < 1e-6);
        assert_eq!(split_threshold(0.0, 0.0), 0.0);
        assert!((split_threshold(8.0, 6.0) - 2.0 * split_threshold(4.0, 3.0)).abs() < 1e-15);
    }

    #[test]
    fn single_matches_fisher_numeric() {
        let t = Terminal::new(0.5, -0.3, 4.0).unwrap();
        let d = Deployment::new(4.0, 4.0, 1.0, Split::Single).unwrap();
        let a = multi_panel_fisher(&d, &t, 0.1, 2.0, false, &spec()).unwrap();
        let s = Scenario::single(t, 1.0, 0.1).unwrap();
        let b = fisher_numeric(&s, &s.panels()[0], &spec()).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn additivity_is_exact() {
        let t = Terminal::new(0.5, 0.2, 6.0).unwrap();
        let d = Deployment::new(4.0, 3.0, 1.0, Split::Quad).unwrap();
        let sum = multi_panel_fisher(&d, &t, 0.1, 2.0, true, &spec()).unwrap();
        let mut acc = nalgebra::DMatrix::zeros(4, 4);
        for p in d.panels() {
            acc += fisher_numeric_local(&t.relative_to(&p), p.radius, 0.1, 2.0, true, &spec())
                .unwrap()
                .matrix();
        }
        assert_eq!(sum.matrix(), &acc);
    }

    #[test]
    fn quad_on_axis_is_diagonal() {
        let t = Terminal::on_axis(8.0).unwrap();
        let d = Deployment::new(4.0, 4.0, 1.0, Split::Quad).unwrap();
        let f = multi_panel_fisher(&d, &t, 0.1, 2.0, false, &spec()).unwrap();
        let tr = f.matrix().trace();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(f.matrix()[(i, j)].abs() < 1e-9 * tr);
        }
    }

    #[test]
    fn colocated_quarters_differ_from_one_panel() {
        let t = Terminal::on_axis(4.0).unwrap();
        let d = Deployment::new(0.0, 0.0, 1.0, Split::Quad).unwrap();
        let quarters = multi_panel_fisher(&d, &t, 0.1, 2.0, false, &spec()).unwrap();
        let one = multi_panel_fisher(&Deployment { split: Split::Single, ..d }, &t, 0.1, 2.0, false, &spec()).unwrap();
        let a = quarters.get(crate::signal::Param::X, crate::signal::Param::X);
        let b = one.get(crate::signal::Param::X, crate::signal::Param::X);
        assert!((a - b).abs() > 0.5 * b);
    }

    #[test]
    fn farfield_quad_matches_numeric() {
        let (w, h, r, z0, l) = (4.0, 4.0, 0.5, 12.0, 0.1);
        let ff = quad_farfield_fisher(w, h, r, z0, l);
        let d = Deployment::new(w, h, r, Split::Quad).unwrap();
        let f = multi_panel_fisher(&d, &Terminal::on_axis(z0).unwrap(), l, 2.0, false, &spec()).unwrap();
        let ixy = f.get(crate::signal::Param::X, crate::signal::Param::X);
        let iz = f.get(crate::signal::Param::Z, crate::signal::Param::Z);
        assert!((ff.i_xy_finite_d / ixy - 1.0).abs() < 0.05, "{} vs {ixy}", ff.i_xy_finite_d);
        assert!((ff.i_xy / ixy - 1.0).abs() < 0.05, "{} vs {ixy}", ff.i_xy);
        assert!((ff.i_z_finite_d / iz - 1.0).abs() < 0.05);
    }

    #[test]
    fn zero_separation_is_a_quarter() {
        let ff = quad_farfield_fisher(0.0, 0.0, 1.0, 10.0, 0.1);
        let central = PI * PI / (4.0 * 0.01 * 1e4);
        assert!((ff.i_xy - central / 4.0).abs() < 1e-12 * central);
    }

    #[test]
    fn monte_carlo_is_deterministic_across_pools() {
        let d = Deployment::new(4.0, 4.0, 0.3, Split::Quad).unwrap();
        let cfg = McConfig {
            n_terminals: 24,
            seed: 7,
            ..McConfig::default()
        };
        let loose = QuadratureSpec::default().with_rel_tol(1e-7);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo_stats(&d, &cfg, 0.1, 2.0, false, &loose).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
        assert!(a.sorted_c_x.windows(2).all(|w| w[0] <= w[1]));
        let avg = a.sorted_c_z.iter().sum::<f64>() / a.used as f64;
        assert!((avg - a.mean_c_z).abs() <= 1e-12 * avg);
    }

    #[test]
    fn terminals_depend_only_on_seed_and_index() {
        let cfg = McConfig { seed: 3, ..McConfig::default() };
        let a = mc_terminal(&cfg, 17).unwrap();
        let b = mc_terminal(&cfg, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, mc_terminal(&cfg, 18).unwrap());
        assert!(a.x0.abs() <= 2.0 && a.y0.abs() <= 2.0 && a.z0 == 12.0);
    }
}
