//! CSV output shared by the sweep commands.

use std::fs::File;
use std::io::{self, Write};

use lis_crlb::crlb::CrlbReport;

/// Columns present in every sweep, in order.
pub const FIXED_COLUMNS: [&str; 13] = [
    "method",
    "lambda_m",
    "z0_m",
    "x0_m",
    "y0_m",
    "R_m",
    "tau",
    "c_x_m2",
    "c_y_m2",
    "c_z_m2",
    "c_phase_rad2",
    "cond",
    "quad_err",
];

/// Bound values of one row; any of them may be absent.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bounds {
    pub c_x: Option<f64>,
    pub c_y: Option<f64>,
    pub c_z: Option<f64>,
    pub c_phase: Option<f64>,
    pub cond: Option<f64>,
}

impl From<&CrlbReport> for Bounds {
    fn from(r: &CrlbReport) -> Self {
        Self {
            c_x: Some(r.c_x),
            c_y: Some(r.c_y),
            c_z: Some(r.c_z),
            c_phase: r.c_phase,
            cond: r.condition_number.is_finite().then_some(r.condition_number),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub method: String,
    pub lambda: f64,
    pub z0: Option<f64>,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub radius: f64,
    pub tau: f64,
    pub bounds: Bounds,
    pub quad_err: Option<f64>,
    /// Values for the command-specific columns.
    pub extra: Vec<String>,
}

impl Row {
    pub fn new(method: impl Into<String>, lambda: f64, x0: f64, y0: f64, z0: f64, radius: f64) -> Self {
        let q = radius / z0;
        Self {
            method: method.into(),
            lambda,
            z0: Some(z0),
            x0: Some(x0),
            y0: Some(y0),
            radius,
            tau: q * q,
            bounds: Bounds::default(),
            quad_err: None,
            extra: Vec::new(),
        }
    }

    /// Override the `τ` column, e.g. with the exact grid value.
    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn bounds(mut self, b: Bounds) -> Self {
        self.bounds = b;
        self
    }

    pub fn report(mut self, r: &CrlbReport) -> Self {
        self.bounds = r.into();
        self
    }

    pub fn quad_err(mut self, e: Option<f64>) -> Self {
        self.quad_err = e;
        self
    }

    pub fn extra(mut self, values: Vec<String>) -> Self {
        self.extra = values;
        self
    }

    fn record(&self) -> Vec<String> {
        let b = &self.bounds;
        let mut out = vec![
            self.method.clone(),
            num(self.lambda),
            opt(self.z0),
            opt(self.x0),
            opt(self.y0),
            num(self.radius),
            num(self.tau),
            opt(b.c_x),
            opt(b.c_y),
            opt(b.c_z),
            opt(b.c_phase),
            opt(b.cond),
            opt(self.quad_err),
        ];
        out.extend(self.extra.iter().cloned());
        out
    }
}

/// Shortest representation that parses back to the same double.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn open_output(out: &str) -> io::Result<Box<dyn Write>> {
    if out == "stdout" || out == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(File::create(out)?))
    }
}

/// Write the header (fixed columns then `extra`) and all rows.
pub fn write_rows(out: &str, extra: &[&str], rows: &[Row]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(open_output(out)?);
    let header: Vec<&str> = FIXED_COLUMNS.iter().chain(extra).copied().collect();
    w.write_record(&header)?;
    for r in rows {
        let rec = r.record();
        debug_assert_eq!(rec.len(), header.len());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
