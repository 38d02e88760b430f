//! The dimensionless aperture functions `f1..f9` of `τ = R²/z0²`.
//!
//! ```text
//! f1 = 1 - (1 + 2.5τ)/(1+τ)^(5/2)        f5 = 1 - (1 + 1.25τ²)/(1+τ)^(5/2)
//! f2 = 1 - (1 + 1.5τ)/(1+τ)^(3/2)        f6 = 1 - (4 - 3√(1+τ) + 3τ)/(1+τ)^(3/2)
//! f3 = 13 - (13 + 5τ²)/(1+τ)^(5/2)       f7 = 1 - 1/√(1+τ)
//! f4 = 1 - 1/(1+τ)^(3/2)                 f8 = τ²√(1+τ) / (4 + 5τ² - 4(1+τ)^(5/2))
//!                                        f9 = τ² / (√(1+τ) - (1+τ)²)
//! ```
//!
//! `f1`, `f2` and `f5` lose every digit to cancellation as `τ → 0`, so below
//! [`SERIES_THRESHOLD`] they are summed as power series. The rest are
//! rewritten with `expm1`/`ln_1p` (`f6 = f7³`, `f8 = -τ²/(4(1+τ)² f5)`,
//! `f9 = -τ²/((1+τ)² f4)`) and are accurate for every `τ > 0`.
//!
//! `f3` is kept as written above, but the on-axis `z` information actually
//! involves `4 f5 = 4 - (4 + 5τ²)/(1+τ)^(5/2)`; see
//! [`FFunctions::f3_exact`].

/// Below this `τ` the cancelling functions use their power series.
pub const SERIES_THRESHOLD: f64 = 1e-2;

const SERIES_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FFunctions {
    pub tau: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
    pub f6: f64,
    pub f7: f64,
    pub f8: f64,
    pub f9: f64,
}

impl FFunctions {
    /// The function multiplying `1/(40 z0²)` in the exact on-axis `I_z`.
    pub fn f3_exact(&self) -> f64 {
        4.0 * self.f5
    }
}

/// `(1+τ)^a - 1`, accurate for small `τ`.
fn pow1p_m1(tau: f64, a: f64) -> f64 {
    (a * tau.ln_1p()).exp_m1()
}

/// Coefficients of `(1+τ)^a` up to `τ^(n-1)`.
fn binomial_series(a: f64, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    for m in 1..n {
        c[m] = c[m - 1] * (a - (m as f64 - 1.0)) / m as f64;
    }
    c
}

/// `k - P(τ)(1+τ)^a` for a polynomial `P` with `P(0) = k`, summed as a power
/// series so that the leading cancellation is exact.
fn series_k_minus(k: f64, poly: &[f64], a: f64, tau: f64) -> f64 {
    let b = binomial_series(a, SERIES_TERMS);
    let mut sum = 0.0;
    let mut pw = 1.0;
    for m in 0..SERIES_TERMS {
        let mut c = if m == 0 { k } else { 0.0 };
        for (d, p) in poly.iter().enumerate() {
            if d <= m {
                c -= p * b[m - d];
            }
        }
        sum += c * pw;
        pw *= tau;
    }
    sum
}

pub fn f1(tau: f64) -> f64 {
    if tau < SERIES_THRESHOLD {
        series_k_minus(1.0, &[1.0, 2.5], -2.5, tau)
    } else {
        1.0 - (1.0 + 2.5 * tau) / (1.0 + tau).powf(2.5)
    }
}

pub fn f2(tau: f64) -> f64 {
    if tau < SERIES_THRESHOLD {
        series_k_minus(1.0, &[1.0, 1.5], -1.5, tau)
    } else {
        1.0 - (1.0 + 1.5 * tau) / (1.0 + tau).powf(1.5)
    }
}

pub fn f3(tau: f64) -> f64 {
    // 13(1 - (1+τ)^(-5/2)) - 5τ²(1+τ)^(-5/2)
    -13.0 * pow1p_m1(tau, -2.5) - 5.0 * tau * tau * (1.0 + tau).powf(-2.5)
}

pub fn f4(tau: f64) -> f64 {
    -pow1p_m1(tau, -1.5)
}

pub fn f5(tau: f64) -> f64 {
    if tau < SERIES_THRESHOLD {
        series_k_minus(1.0, &[1.0, 0.0, 1.25], -2.5, tau)
    } else {
        1.0 - (1.0 + 1.25 * tau * tau) / (1.0 + tau).powf(2.5)
    }
}

pub fn f6(tau: f64) -> f64 {
    f7(tau).powi(3)
}

pub fn f7(tau: f64) -> f64 {
    -pow1p_m1(tau, -0.5)
}

pub fn f8(tau: f64) -> f64 {
    -tau * tau / (4.0 * (1.0 + tau).powi(2) * f5(tau))
}

pub fn f9(tau: f64) -> f64 {
    -tau * tau / ((1.0 + tau).powi(2) * f4(tau))
}

/// All nine functions at `τ`. Requires `τ > 0`.
pub fn f_functions(tau: f64) -> FFunctions {
    debug_assert!(tau > 0.0, "τ must be positive");
    FFunctions {
        tau,
        f1: f1(tau),
        f2: f2(tau),
        f3: f3(tau),
        f4: f4(tau),
        f5: f5(tau),
        f6: f6(tau),
        f7: f7(tau),
        f8: f8(tau),
        f9: f9(tau),
    }
}

/// Direct transcriptions, used only by tests as the large-`τ` oracle.
#[cfg(test)]
mod literal {
    pub fn f1(t: f64) -> f64 {
        1.0 - (1.0 + 2.5 * t) / (1.0 + t).powf(2.5)
    }
    pub fn f2(t: f64) -> f64 {
        1.0 - (1.0 + 1.5 * t) / (1.0 + t).powf(1.5)
    }
    pub fn f3(t: f64) -> f64 {
        13.0 - (13.0 + 5.0 * t * t) / (1.0 + t).powf(2.5)
    }
    pub fn f4(t: f64) -> f64 {
        1.0 - 1.0 / (1.0 + t).powf(1.5)
    }
    pub fn f5(t: f64) -> f64 {
        1.0 - (1.0 + 1.25 * t * t) / (1.0 + t).powf(2.5)
    }
    pub fn f6(t: f64) -> f64 {
        1.0 - (4.0 - 3.0 * (1.0 + t).sqrt() + 3.0 * t) / (1.0 + t).powf(1.5)
    }
    pub fn f7(t: f64) -> f64 {
        1.0 - 1.0 / (1.0 + t).sqrt()
    }
    pub fn f8(t: f64) -> f64 {
        t * t * (1.0 + t).sqrt() / (4.0 + 5.0 * t * t - 4.0 * (1.0 + t).powf(2.5))
    }
    pub fn f9(t: f64) -> f64 {
        t * t / ((1.0 + t).sqrt() - (1.0 + t).powi(2))
    }
}
