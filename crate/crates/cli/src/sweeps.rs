//! Single-panel sweeps.

use std::f64::consts::PI;

use clap::Args;
use rayon::prelude::*;

use lis_crlb::approx::crlb_approx_noncpl;
use lis_crlb::asymptotics::{
    classify_phase_regime, logspace, phase_depth_small_tau, phase_regime_boundary, phase_small_tau, small_tau_lateral,
};
use lis_crlb::crlb::{crlb_from_fisher, CrlbReport};
use lis_crlb::fisher::{fisher_cpl_closed, fisher_numeric_local, Method};
use lis_crlb::geometry::{mild_conditions_local, Terminal, DEFAULT_MILD_EPSILON};
use lis_crlb::phase::crlb_phase_cpl_closed;

use crate::context::{log_range, positive, usage, Context, Preset};
use crate::table::{num, write_rows, Bounds, Row};

#[derive(Debug, Clone, Args)]
pub struct CplArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    /// Add unknown-phase rows.
    #[arg(long)]
    pub phase_unknown: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OffCplArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Lateral offsets `x0` (with `y0 = 0`).
    #[arg(long, value_delimiter = ',')]
    pub x0: Vec<f64>,
    /// Heights `z0`.
    #[arg(long, value_delimiter = ',')]
    pub z0: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 36)]
    pub points: usize,
    #[arg(long)]
    pub phase_unknown: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// Diagonal offsets `x0 = y0`.
    #[arg(long, value_delimiter = ',')]
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RingArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// Circle radius `r`.
    #[arg(long, default_value_t = 4.0)]
    pub ring: f64,
    #[arg(long, default_value_t = 73)]
    pub points: usize,
    #[arg(long)]
    pub phase_unknown: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// Lateral offsets `x0` (with `y0 = 0`); 0 is the panel axis.
    #[arg(long, value_delimiter = ',')]
    pub x0: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

/// Log grid with `0.01` (about 200 half-wavelength elements at `z0 = 4`,
/// `λ = 0.1`) present exactly whenever it lies inside the range.
pub fn tau_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g = logspace(lo, hi, n);
    let mark = 0.01;
    if (lo..=hi).contains(&mark) {
        match g.iter_mut().find(|t| ((**t - mark) / mark).abs() < 1e-9) {
            Some(t) => *t = mark,
            None => {
                g.push(mark);
                g.sort_by(f64::total_cmp);
            }
        }
    }
    g
}

fn numeric(t: &Terminal, radius: f64, lambda: f64, n0: f64, phase: bool, ctx: &Context) -> anyhow::Result<(CrlbReport, Option<f64>)> {
    let f = fisher_numeric_local(t, radius, lambda, n0, phase, &ctx.spec)?;
    Ok((crlb_from_fisher(&f)?, f.quad_error()))
}

fn collect<T: Send>(items: Vec<anyhow::Result<Vec<T>>>) -> anyhow::Result<Vec<T>> {
    let mut out = Vec::new();
    for r in items {
        out.extend(r?);
    }
    Ok(out)
}

pub fn cpl_sweep(ctx: &Context, a: CplArgs) -> anyhow::Result<()> {
    let lambda = positive("lambda", ctx.lambda(a.lambda))?;
    let z0 = positive("z0", ctx.z0(a.z0, 4.0))?;
    let n0 = ctx.n0();
    let phase = ctx.phase_unknown(a.phase_unknown);
    log_range("tau", a.tau_min, a.tau_max, a.points)?;
    let t = Terminal::on_axis(z0)?;
    let grid = tau_grid(a.tau_min, a.tau_max, a.points);
    let rows = grid
        .par_iter()
        .map(|&tau| -> anyhow::Result<Vec<Row>> {
            let radius = z0 * tau.sqrt();
            let elements = 4.0 * PI * radius * radius / (lambda * lambda);
            let base = |m: Method| Row::new(m.as_str(), lambda, 0.0, 0.0, z0, radius).tau(tau).extra(vec![num(elements)]);
            let closed = crlb_from_fisher(&fisher_cpl_closed(z0, radius, lambda, n0))?;
            let (num_known, e) = numeric(&t, radius, lambda, n0, false, ctx)?;
            let mut rows = vec![
                base(Method::ClosedCpl).report(&closed),
                base(Method::Numeric).report(&num_known).quad_err(e),
            ];
            if phase {
                let closed = crlb_phase_cpl_closed(z0, radius, lambda, n0)?;
                let (num_unknown, e) = numeric(&t, radius, lambda, n0, true, ctx)?;
                rows.push(base(Method::PhaseClosed).report(&closed));
                rows.push(base(Method::Numeric).report(&num_unknown).quad_err(e));
            }
            Ok(rows)
        })
        .collect();
    write_rows(&ctx.out, &["n_elements"], &collect(rows)?)
}

/// Central log-log slope at each interior point, one-sided at the ends.
fn local_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b].ln() - y[a].ln()) / (x[b].ln() - x[a].ln())
        })
        .collect()
}

fn slope_regime(sx: f64, sz: f64) -> &'static str {
    let near = |s: f64, t: f64| (s - t).abs() <= 0.1;
    if near(sx, -2.0) && near(sz, -2.0) {
        "quadratic"
    } else if near(sx, -2.0) && near(sz, -1.0) {
        "quadratic_linear"
    } else if near(sx, 0.0) && near(sz, 0.0) {
        "saturated"
    } else {
        "transition"
    }
}

pub fn offcpl_sweep(ctx: &Context, a: OffCplArgs) -> anyhow::Result<()> {
    let lambda = positive("lambda", ctx.lambda(a.lambda))?;
    let n0 = ctx.n0();
    let phase = ctx.phase_unknown(a.phase_unknown);
    log_range("tau", a.tau_min, a.tau_max, a.points)?;
    let offsets = if a.x0.is_empty() { vec![2.0, 4.0, 8.0] } else { a.x0 };
    let heights = if a.z0.is_empty() { vec![4.0, 6.0] } else { a.z0 };
    let grid = tau_grid(a.tau_min, a.tau_max, a.points);
    let mut rows = Vec::new();
    for &z0 in &heights {
        positive("z0", z0)?;
        for &x0 in &offsets {
            let t = Terminal::new(x0, 0.0, z0)?;
            let pts: Vec<(CrlbReport, Option<f64>)> = grid
                .par_iter()
                .map(|&tau| numeric(&t, z0 * tau.sqrt(), lambda, n0, phase, ctx))
                .collect::<anyhow::Result<_>>()?;
            let cx: Vec<f64> = pts.iter().map(|(c, _)| c.c_x).collect();
            let cz: Vec<f64> = pts.iter().map(|(c, _)| c.c_z).collect();
            let (sx, sz) = (local_slopes(&grid, &cx), local_slopes(&grid, &cz));
            for (k, (c, e)) in pts.iter().enumerate() {
                rows.push(
                    Row::new(Method::Numeric.as_str(), lambda, x0, 0.0, z0, z0 * grid[k].sqrt())
                        .tau(grid[k])
                        .report(c)
                        .quad_err(*e)
                        .extra(vec![num(sx[k]), num(sz[k]), slope_regime(sx[k], sz[k]).into()]),
                );
            }
        }
    }
    write_rows(&ctx.out, &["slope_c_x", "slope_c_z", "regime"], &rows)
}

pub fn approx_error(ctx: &Context, a: ApproxArgs) -> anyhow::Result<()> {
    let lambda = positive("lambda", ctx.lambda(a.lambda))?;
    let radius = positive("radius", ctx.radius(a.radius, 0.5))?;
    let z0 = positive("z0", ctx.z0(a.z0, 8.0))?;
    let n0 = ctx.n0();
    let offsets = if a.offsets.is_empty() { (1..=8).map(f64::from).collect() } else { a.offsets };
    let rows = offsets
        .par_iter()
        .map(|&d| -> anyhow::Result<Vec<Row>> {
            let t = Terminal::new(d, d, z0)?;
            let (exact, e) = numeric(&t, radius, lambda, n0, false, ctx)?;
            let approx = crlb_approx_noncpl(&t, radius, lambda, n0)?.direct;
            let mild = mild_conditions_local(&t, radius, lambda, DEFAULT_MILD_EPSILON).holds();
            let err = |p: f64, q: f64| num((p - q).abs() / q);
            let empty = vec![String::new(); 3];
            Ok(vec![
                Row::new(Method::Numeric.as_str(), lambda, d, d, z0, radius)
                    .report(&exact)
                    .quad_err(e)
                    .extra([empty, vec![mild.to_string()]].concat()),
                Row::new(Method::OffAxisApprox.as_str(), lambda, d, d, z0, radius).report(&approx).extra(vec![
                    err(approx.c_x, exact.c_x),
                    err(approx.c_y, exact.c_y),
                    err(approx.c_z, exact.c_z),
                    mild.to_string(),
                ]),
            ])
        })
        .collect();
    write_rows(&ctx.out, &["err_x", "err_y", "err_z", "mild"], &collect(rows)?)
}

pub fn ring_sweep(ctx: &Context, a: RingArgs) -> anyhow::Result<()> {
    let lambda = positive("lambda", ctx.lambda(a.lambda))?;
    let radius = positive("radius", ctx.radius(a.radius, 1.0))?;
    let z0 = positive("z0", ctx.z0(a.z0, 4.0))?;
    let ring = positive("ring", a.ring)?;
    let n0 = ctx.n0();
    let phase = ctx.phase_unknown(a.phase_unknown);
    if a.points < 2 {
        return Err(usage("ring needs at least 2 points"));
    }
    let psis: Vec<f64> = (0..a.points).map(|k| 2.0 * PI * k as f64 / (a.points - 1) as f64).collect();
    let pts: Vec<(f64, f64, CrlbReport, Option<f64>)> = psis
        .par_iter()
        .map(|&psi| {
            let (x0, y0) = (ring * psi.cos(), ring * psi.sin());
            let (c, e) = numeric(&Terminal::new(x0, y0, z0)?, radius, lambda, n0, phase, ctx)?;
            Ok((x0, y0, c, e))
        })
        .collect::<anyhow::Result<_>>()?;
    let r0 = pts[0].2.clone();
    let rows: Vec<Row> = pts
        .iter()
        .zip(&psis)
        .map(|((x0, y0, c, e), psi)| {
            Row::new(Method::Numeric.as_str(), lambda, *x0, *y0, z0, radius).report(c).quad_err(*e).extra(vec![
                num(*psi),
                num(c.c_x / r0.c_x),
                num(c.c_y / r0.c_y),
                num(c.c_z / r0.c_z),
            ])
        })
        .collect();
    write_rows(&ctx.out, &["psi_rad", "norm_c_x", "norm_c_y", "norm_c_z"], &rows)
}

pub fn phase_sweep(ctx: &Context, a: PhaseArgs) -> anyhow::Result<()> {
    let lambda = positive("lambda", ctx.lambda(a.lambda))?;
    let z0 = positive("z0", ctx.z0(a.z0, 4.0))?;
    let n0 = ctx.n0();
    log_range("tau", a.tau_min, a.tau_max, a.points)?;
    let offsets = match (a.x0.is_empty(), ctx.preset) {
        (false, _) => a.x0,
        (true, Some(Preset::Fig10)) => vec![0.0, 2.0, 4.0],
        (true, _) => vec![ctx.x0(None)],
    };
    let boundary = phase_regime_boundary(lambda, z0);
    let grid = tau_grid(a.tau_min, a.tau_max, a.points);
    let mut rows = Vec::new();
    for &x0 in &offsets {
        let t = Terminal::new(x0, 0.0, z0)?;
        let chunk = grid
            .par_iter()
            .map(|&tau| -> anyhow::Result<Vec<Row>> {
                let radius = z0 * tau.sqrt();
                let regime = serde_json::to_value(classify_phase_regime(lambda, z0, tau))?
                    .as_str()
                    .unwrap_or_default()
                    .to_string();
                let row = |m: &str, unknown: bool, c: &Bounds| {
                    let ratio = match (unknown, c.c_phase, c.c_z) {
                        (true, Some(p), Some(z)) => num(p / z),
                        _ => String::new(),
                    };
                    Row::new(m, lambda, x0, 0.0, z0, radius)
                        .tau(tau)
                        .bounds(*c)
                        .extra(vec![unknown.to_string(), num(boundary), regime.clone(), ratio])
                };
                let mut out = Vec::new();
                if t.is_on_axis() {
                    let known = crlb_from_fisher(&fisher_cpl_closed(z0, radius, lambda, n0))?;
                    let unknown = crlb_phase_cpl_closed(z0, radius, lambda, n0)?;
                    out.push(row(Method::ClosedCpl.as_str(), false, &(&known).into()));
                    out.push(row(Method::PhaseClosed.as_str(), true, &(&unknown).into()));
                    let s = n0 / 2.0;
                    let lat = s * small_tau_lateral(lambda, z0, tau);
                    let small = Bounds {
                        c_x: Some(lat),
                        c_y: Some(lat),
                        c_z: Some(s * phase_depth_small_tau(lambda, z0, tau)),
                        c_phase: Some(s * phase_small_tau(lambda, z0, tau)),
                        cond: None,
                    };
                    out.push(row("small_tau_approx", true, &small));
                } else {
                    let (known, e1) = numeric(&t, radius, lambda, n0, false, ctx)?;
                    let (unknown, e2) = numeric(&t, radius, lambda, n0, true, ctx)?;
                    out.push(row(Method::Numeric.as_str(), false, &(&known).into()).quad_err(e1));
                    out.push(row(Method::Numeric.as_str(), true, &(&unknown).into()).quad_err(e2));
                }
                Ok(out)
            })
            .collect();
        rows.extend(collect(chunk)?);
    }
    write_rows(&ctx.out, &["phase_unknown", "regime_boundary_tau", "regime", "phase_to_depth_ratio"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_marker() {
        let g = tau_grid(1e-4, 1e4, 41);
        assert_eq!(g.len(), 41);
        assert!(g.contains(&0.01));
        let g = tau_grid(1e-3, 1e-1, 4);
        assert_eq!(g.len(), 5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(!tau_grid(1.0, 10.0, 3).contains(&0.01));
    }

    #[test]
    fn slopes_of_power_law() {
        let x = logspace(1.0, 100.0, 5);
        let y: Vec<f64> = x.iter().map(|v| v.powi(-2)).collect();
        assert!(local_slopes(&x, &y).iter().all(|s| (s + 2.0).abs() < 1e-12));
        assert_eq!(slope_regime(-2.0, -1.0), "quadratic_linear");
    }
}
