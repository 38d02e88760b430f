//! Centralized versus distributed panels.

use clap::Args;
use rayon::prelude::*;

use lis_crlb::asymptotics::logspace;
use lis_crlb::crlb::crlb_from_fisher;
use lis_crlb::deployment::{monte_carlo_stats, multi_panel_fisher, Deployment, McConfig, McStats, Split};
use lis_crlb::geometry::Terminal;

use crate::context::{log_range, positive, usage, Context, Preset};
use crate::table::{num, open_output, write_rows, Bounds, Row};

#[derive(Debug, Clone, Args)]
pub struct DeployArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub w: f64,
    #[arg(long, default_value_t = 4.0)]
    pub h: f64,
    /// Terminal height; defaults to 8 for one terminal and 12 for the
    /// Monte Carlo population.
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub r_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    /// Explicit total radii, replacing the log grid.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_split)]
    pub splits: Vec<Split>,
    #[arg(long)]
    pub phase_unknown: bool,
    /// Average over uniformly drawn terminals instead of one terminal.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 1000)]
    pub mc_terminals: usize,
    /// Terminals are drawn uniformly in `[-xy_range, xy_range]²`.
    #[arg(long, default_value_t = 2.0)]
    pub xy_range: f64,
    /// Also write the sorted per-terminal bounds to this CSV file.
    #[arg(long)]
    pub cdf: Option<String>,
}

fn parse_split(s: &str) -> Result<Split, String> {
    Split::ALL
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| format!("unknown split `{s}` (single, quad, hex16)"))
}

const EXTRA: [&str; 5] = ["split", "w_m", "h_m", "n_used", "n_excluded"];

pub fn deploy(ctx: &Context, mut a: DeployArgs) -> anyhow::Result<()> {
    if ctx.preset == Some(Preset::Fig12) {
        a.mc = true;
    }
    let lambda = positive("lambda", ctx.lambda(a.lambda))?;
    let n0 = ctx.n0();
    let phase = ctx.phase_unknown(a.phase_unknown);
    let (w, h) = (a.w, a.h);
    if !(w >= 0.0 && h >= 0.0 && w.is_finite() && h.is_finite()) {
        return Err(usage("surface size must be finite and non-negative"));
    }
    let radii = if a.radii.is_empty() {
        log_range("radius", a.r_min, a.r_max, a.points)?;
        logspace(a.r_min, a.r_max, a.points)
    } else {
        for &r in &a.radii {
            positive("radius", r)?;
        }
        a.radii.clone()
    };
    let splits = if a.splits.is_empty() { Split::ALL.to_vec() } else { a.splits.clone() };
    let z0 = positive("z0", ctx.z0(a.z0, if a.mc { 12.0 } else { 8.0 }))?;
    let extra = |d: &Deployment, stats: Option<&McStats>| {
        vec![
            d.split.as_str().to_string(),
            num(w),
            num(h),
            stats.map(|s| s.used.to_string()).unwrap_or_default(),
            stats.map(|s| s.excluded.to_string()).unwrap_or_default(),
        ]
    };

    if !a.mc {
        if a.cdf.is_some() {
            return Err(usage("--cdf needs --mc"));
        }
        let (x0, y0) = (ctx.x0(a.x0), ctx.y0(a.y0));
        let t = Terminal::new(x0, y0, z0)?;
        let jobs: Vec<(Split, f64)> = splits.iter().flat_map(|&s| radii.iter().map(move |&r| (s, r))).collect();
        let rows = jobs
            .par_iter()
            .map(|&(split, r)| -> anyhow::Result<Row> {
                let d = Deployment::new(w, h, r, split)?;
                let f = multi_panel_fisher(&d, &t, lambda, n0, phase, &ctx.spec)?;
                let c = crlb_from_fisher(&f)?;
                Ok(Row::new(f.method().as_str(), lambda, x0, y0, z0, r)
                    .report(&c)
                    .quad_err(f.quad_error())
                    .extra(extra(&d, None)))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        return write_rows(&ctx.out, &EXTRA, &rows);
    }

    let seed = ctx.seed.ok_or_else(|| usage("Monte Carlo needs an explicit --seed"))?;
    if a.mc_terminals == 0 {
        return Err(usage("--mc-terminals must be positive"));
    }
    let cfg = McConfig {
        n_terminals: a.mc_terminals,
        xy_range: positive("xy-range", a.xy_range)?,
        z0,
        seed,
    };
    let mut rows = Vec::new();
    let mut cdf = Vec::new();
    for &split in &splits {
        for &r in &radii {
            let d = Deployment::new(w, h, r, split)?;
            let s = monte_carlo_stats(&d, &cfg, lambda, n0, phase, &ctx.spec)?;
            let mut row = Row::new("monte_carlo_mean", lambda, 0.0, 0.0, z0, r)
                .bounds(Bounds {
                    c_x: Some(s.mean_c_x),
                    c_y: Some(s.mean_c_y),
                    c_z: Some(s.mean_c_z),
                    c_phase: s.mean_c_phase,
                    cond: None,
                })
                .extra(extra(&d, Some(&s)));
            row.x0 = None;
            row.y0 = None;
            rows.push(row);
            if a.cdf.is_some() {
                cdf.push((split, r, s));
            }
        }
    }
    write_rows(&ctx.out, &EXTRA, &rows)?;
    if let Some(path) = &a.cdf {
        write_cdf(path, &cdf)?;
    }
    Ok(())
}

/// One row per rank: the rank-th smallest bound of each dimension and its
/// empirical probability `(rank + 1)/n`.
fn write_cdf(path: &str, sets: &[(Split, f64, McStats)]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(open_output(path)?);
    w.write_record(["split", "R_m", "rank", "probability", "c_x_m2", "c_y_m2", "c_z_m2", "c_phase_rad2"])?;
    for (split, r, s) in sets {
        let n = s.sorted_c_x.len();
        for k in 0..n {
            w.write_record([
                split.as_str().to_string(),
                num(*r),
                k.to_string(),
                num((k + 1) as f64 / n as f64),
                num(s.sorted_c_x[k]),
                num(s.sorted_c_y[k]),
                num(s.sorted_c_z[k]),
                s.sorted_c_phase.get(k).map(|v| num(*v)).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
