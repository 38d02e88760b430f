//! Scenario and domain types shared by every other module.
//!
//! Coordinates are Cartesian meters. Every surface lies in the `z = 0` plane
//! and the terminal sits at positive `z`. A [`Panel`] is one disk-shaped
//! surface; most computations work in panel-local coordinates, obtained with
//! [`Terminal::relative_to`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when constructing domain values.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("terminal must lie strictly in front of the surface (z0 = {0})")]
    TerminalBehindSurface(f64),
    #[error("panel radius must be positive (R = {0})")]
    NonPositiveRadius(f64),
    #[error("wavelength must be positive (lambda = {0})")]
    NonPositiveWavelength(f64),
    #[error("noise spectral density must be positive (N0 = {0})")]
    NonPositiveNoise(f64),
    #[error("a scenario needs at least one panel")]
    NoPanels,
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("invalid scenario config: {0}")]
    Config(String),
}

/// Position of the single-antenna terminal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
}

impl Terminal {
    pub fn new(x0: f64, y0: f64, z0: f64) -> Result<Self, GeometryError> {
        if !(x0.is_finite() && y0.is_finite() && z0.is_finite()) {
            return Err(GeometryError::NonFinite("terminal"));
        }
        if z0 <= 0.0 {
            return Err(GeometryError::TerminalBehindSurface(z0));
        }
        Ok(Self { x0, y0, z0 })
    }

    /// Terminal on the central perpendicular line of a panel at the origin.
    pub fn on_axis(z0: f64) -> Result<Self, GeometryError> {
        Self::new(0.0, 0.0, z0)
    }

    /// Lateral distance from the z-axis, `sqrt(x0² + y0²)`.
    pub fn r_perp(&self) -> f64 {
        self.x0.hypot(self.y0)
    }

    /// Euclidean distance to the origin.
    pub fn range(&self) -> f64 {
        (self.x0 * self.x0 + self.y0 * self.y0 + self.z0 * self.z0).sqrt()
    }

    pub fn is_on_axis(&self) -> bool {
        self.x0 == 0.0 && self.y0 == 0.0
    }

    /// The same terminal expressed in the local frame of `panel`.
    ///
    /// Translation within the surface plane leaves `z0` untouched.
    pub fn relative_to(&self, panel: &Panel) -> Terminal {
        Terminal {
            x0: self.x0 - panel.cx,
            y0: self.y0 - panel.cy,
            z0: self.z0,
        }
    }
}

/// One disk-shaped surface in the `z = 0` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub cx: f64,
    pub cy: f64,
    #[serde(rename = "r")]
    pub radius: f64,
}

impl Panel {
    pub fn new(cx: f64, cy: f64, radius: f64) -> Result<Self, GeometryError> {
        if !(cx.is_finite() && cy.is_finite() && radius.is_finite()) {
            return Err(GeometryError::NonFinite("panel"));
        }
        if radius <= 0.0 {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { cx, cy, radius })
    }

    /// Panel of radius `radius` centered at the origin.
    pub fn centered(radius: f64) -> Result<Self, GeometryError> {
        Self::new(0.0, 0.0, radius)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Noise spectral density used throughout unless overridden. With this value
/// the `2/N0` prefactor of the Fisher integrals is one.
pub const DEFAULT_N0: f64 = 2.0;

/// Default "much less than" ratio used by [`mild_conditions_hold`].
pub const DEFAULT_MILD_EPSILON: f64 = 0.1;

/// Complete positioning problem: terminal, surfaces and channel parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    terminal: Terminal,
    panels: Vec<Panel>,
    lambda: f64,
    n0: f64,
    phase_unknown: bool,
    /// True value of the common phase offset. No bound depends on it.
    phase: f64,
}

impl Scenario {
    pub fn new(
        terminal: Terminal,
        panels: Vec<Panel>,
        lambda: f64,
        n0: f64,
        phase_unknown: bool,
    ) -> Result<Self, GeometryError> {
        // Re-validate: fields are public and may have been built by hand.
        let terminal = Terminal::new(terminal.x0, terminal.y0, terminal.z0)?;
        let panels = panels
            .into_iter()
            .map(|p| Panel::new(p.cx, p.cy, p.radius))
            .collect::<Result<Vec<_>, _>>()?;
        if panels.is_empty() {
            return Err(GeometryError::NoPanels);
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(GeometryError::NonPositiveWavelength(lambda));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(GeometryError::NonPositiveNoise(n0));
        }
        Ok(Self {
            terminal,
            panels,
            lambda,
            n0,
            phase_unknown,
            phase: 0.0,
        })
    }

    /// Single centered panel, `N0 = 2`, known phase.
    pub fn single(terminal: Terminal, radius: f64, lambda: f64) -> Result<Self, GeometryError> {
        Self::new(terminal, vec![Panel::centered(radius)?], lambda, DEFAULT_N0, false)
    }

    pub fn with_phase_unknown(mut self, unknown: bool) -> Self {
        self.phase_unknown = unknown;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_n0(self, n0: f64) -> Result<Self, GeometryError> {
        let phase = self.phase;
        Ok(Self::new(self.terminal, self.panels, self.lambda, n0, self.phase_unknown)?.with_phase(phase))
    }

    pub fn with_terminal(self, terminal: Terminal) -> Result<Self, GeometryError> {
        let phase = self.phase;
        Ok(Self::new(terminal, self.panels, self.lambda, self.n0, self.phase_unknown)?.with_phase(phase))
    }

    pub fn terminal(&self) -> &Terminal {
        &self.terminal
    }
    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn n0(&self) -> f64 {
        self.n0
    }
    pub fn phase_unknown(&self) -> bool {
        self.phase_unknown
    }
    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Parse the key-value config format:
    ///
    /// ```toml
    /// lambda = 0.1
    /// n0 = 2.0            # optional, default 2
    /// phase_unknown = false  # optional
    /// phase = 0.0         # optional
    /// terminal = { x = 0.0, y = 0.0, z = 4.0 }
    /// panels = [ { cx = 0.0, cy = 0.0, r = 1.0 } ]
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self, GeometryError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| GeometryError::Config(e.to_string()))?;
        cfg.into_scenario()
    }
}

/// Serialized form of a [`Scenario`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub lambda: f64,
    #[serde(default = "default_n0")]
    pub n0: f64,
    #[serde(default)]
    pub phase_unknown: bool,
    #[serde(default)]
    pub phase: f64,
    pub terminal: TerminalConfig,
    pub panels: Vec<Panel>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalConfig {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn default_n0() -> f64 {
    DEFAULT_N0
}

impl ScenarioConfig {
    pub fn into_scenario(self) -> Result<Scenario, GeometryError> {
        let terminal = Terminal::new(self.terminal.x, self.terminal.y, self.terminal.z)?;
        Ok(Scenario::new(terminal, self.panels, self.lambda, self.n0, self.phase_unknown)?
            .with_phase(self.phase))
    }
}

impl From<&Scenario> for ScenarioConfig {
    fn from(s: &Scenario) -> Self {
        ScenarioConfig {
            lambda: s.lambda,
            n0: s.n0,
            phase_unknown: s.phase_unknown,
            phase: s.phase,
            terminal: TerminalConfig {
                x: s.terminal.x0,
                y: s.terminal.y0,
                z: s.terminal.z0,
            },
            panels: s.panels.clone(),
        }
    }
}

/// Quantities derived from a terminal and one panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedGeometry {
    /// Distance from the panel center to the terminal.
    pub z1: f64,
    /// Squared radius normalized by squared height, `(R / z0)²`.
    pub tau: f64,
    /// Lateral offset of the terminal from the panel axis.
    pub r_perp: f64,
}

/// Normalized area `(R / z0)²`.
pub fn tau(radius: f64, z0: f64) -> f64 {
    let q = radius / z0;
    q * q
}

/// Derived geometry of the terminal seen from `panel`.
pub fn derive(scenario: &Scenario, panel: &Panel) -> DerivedGeometry {
    derive_local(&scenario.terminal.relative_to(panel), panel.radius)
}

/// Same as [`derive`] for a terminal already in panel-local coordinates.
pub fn derive_local(local: &Terminal, radius: f64) -> DerivedGeometry {
    DerivedGeometry {
        z1: local.range(),
        tau: tau(radius, local.z0),
        r_perp: local.r_perp(),
    }
}

/// Ratios behind the two "mild" validity conditions of the off-axis
/// approximations. Each ratio is `lhs / rhs`; a condition holds when its
/// ratio is at most `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MildConditionReport {
    /// `λ / (z0² / sqrt(z0² + x0² + y0² + R²))`.
    pub wavelength_ratio: f64,
    /// `2R / (z0² / r_perp + r_perp)`; zero when the terminal is on axis.
    pub aperture_ratio: f64,
    pub epsilon: f64,
}

impl MildConditionReport {
    pub fn wavelength_ok(&self) -> bool {
        self.wavelength_ratio <= self.epsilon
    }
    pub fn aperture_ok(&self) -> bool {
        self.aperture_ratio <= self.epsilon
    }
    pub fn holds(&self) -> bool {
        self.wavelength_ok() && self.aperture_ok()
    }
}

/// Evaluates both mild conditions for a terminal in panel-local coordinates.
///
/// On axis the first term of the aperture bound is infinite, so that
/// condition is reported as satisfied with ratio zero.
pub fn mild_conditions_local(
    local: &Terminal,
    radius: f64,
    lambda: f64,
    epsilon: f64,
) -> MildConditionReport {
    let z0 = local.z0;
    let rp = local.r_perp();
    let wl_rhs = z0 * z0 / (z0 * z0 + rp * rp + radius * radius).sqrt();
    let aperture_ratio = if rp == 0.0 {
        0.0
    } else {
        2.0 * radius / (z0 * z0 / rp + rp)
    };
    MildConditionReport {
        wavelength_ratio: lambda / wl_rhs,
        aperture_ratio,
        epsilon,
    }
}

/// [`mild_conditions_local`] for the scenario's terminal and `panel`.
pub fn mild_conditions_hold(scenario: &Scenario, panel: &Panel, epsilon: f64) -> MildConditionReport {
    mild_conditions_local(
        &scenario.terminal.relative_to(panel),
        panel.radius,
        scenario.lambda,
        epsilon,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scen(x: f64, y: f64, z: f64, r: f64, lambda: f64) -> Scenario {
        Scenario::single(Terminal::new(x, y, z).unwrap(), r, lambda).unwrap()
    }

    #[test]
    fn derive_on_axis() {
        let s = scen(0.0, 0.0, 4.0, 1.0, 0.1);
        let d = derive(&s, &s.panels()[0]);
        assert_eq!(d.tau, 0.0625);
        assert_eq!(d.z1, 4.0);
        assert_eq!(d.r_perp, 0.0);
    }

    #[test]
    fn derive_three_four_five() {
        for r in [0.1, 1.0, 7.0] {
            let s = scen(3.0, 0.0, 4.0, r, 0.1);
            let d = derive(&s, &s.panels()[0]);
            assert_eq!(d.z1, 5.0);
            assert_eq!(d.r_perp, 3.0);
        }
    }

    #[test]
    fn derive_hand_arithmetic() {
        let s = scen(4.0, 4.0, 8.0, 0.5, 0.1);
        let d = derive(&s, &s.panels()[0]);
        // 0.5² / 8² = 0.25 / 64
        assert_eq!(d.tau, 0.00390625);
        assert!((d.z1 - 96f64.sqrt()).abs() < 1e-15);
        assert!(d.z1 >= 8.0);
    }

    #[test]
    fn derive_is_bitwise_pure() {
        let s = scen(1.3, -0.7, 2.9, 0.77, 0.05);
        let a = derive(&s, &s.panels()[0]);
        let b = derive(&s.clone(), &s.panels()[0]);
        assert_eq!(a.z1.to_bits(), b.z1.to_bits());
        assert_eq!(a.tau.to_bits(), b.tau.to_bits());
    }

    #[test]
    fn translated_panel_uses_local_offsets() {
        let t = Terminal::new(3.0, 4.0, 12.0).unwrap();
        let p = Panel::new(3.0, 0.0, 1.0).unwrap();
        let s = Scenario::new(t, vec![p], 0.1, 2.0, false).unwrap();
        let d = derive(&s, &p);
        assert_eq!(d.r_perp, 4.0);
        assert_eq!(d.z1, 4f64.hypot(12.0));
    }

    #[test]
    fn mild_conditions_examples() {
        let s = scen(1.0, 1.0, 8.0, 0.5, 0.1);
        let rep = mild_conditions_hold(&s, &s.panels()[0], DEFAULT_MILD_EPSILON);
        assert!(rep.holds(), "{rep:?}");

        let s = scen(1.0, 1.0, 8.0, 0.5, 8.0);
        assert!(!mild_conditions_hold(&s, &s.panels()[0], DEFAULT_MILD_EPSILON).wavelength_ok());

        let s = scen(0.0, 0.0, 1.0, 1e6, 1e-9);
        let rep = mild_conditions_hold(&s, &s.panels()[0], DEFAULT_MILD_EPSILON);
        assert!(rep.aperture_ok());
        assert_eq!(rep.aperture_ratio, 0.0);
    }

    #[test]
    fn construction_rejects_invalid_values() {
        assert_eq!(
            Terminal::new(0.0, 0.0, 0.0),
            Err(GeometryError::TerminalBehindSurface(0.0))
        );
        assert!(Terminal::new(0.0, 0.0, -1.0).is_err());
        assert!(Terminal::new(f64::NAN, 0.0, 1.0).is_err());
        assert_eq!(Panel::centered(0.0), Err(GeometryError::NonPositiveRadius(0.0)));
        let t = Terminal::on_axis(1.0).unwrap();
        assert_eq!(
            Scenario::single(t, 1.0, 0.0),
            Err(GeometryError::NonPositiveWavelength(0.0))
        );
        assert_eq!(
            Scenario::new(t, vec![], 0.1, 2.0, false),
            Err(GeometryError::NoPanels)
        );
        assert!(matches!(
            Scenario::new(t, vec![Panel::centered(1.0).unwrap()], 0.1, -2.0, false),
            Err(GeometryError::NonPositiveNoise(_))
        ));
    }

    #[test]
    fn config_parses_and_defaults() {
        let s = Scenario::from_toml_str(
            r#"
            lambda = 0.1
            terminal = { x = 1.0, y = 0.0, z = 4.0 }
            panels = [ { cx = 0.0, cy = 0.0, r = 1.0 }, { cx = 2.0, cy = -1.0, r = 0.5 } ]
            "#,
        )
        .unwrap();
        assert_eq!(s.n0(), 2.0);
        assert!(!s.phase_unknown());
        assert_eq!(s.panels().len(), 2);
        assert_eq!(s.panels()[1].radius, 0.5);

        let err = Scenario::from_toml_str(
            "lambda = 0.1\nterminal = { x = 0.0, y = 0.0, z = -1.0 }\npanels = [{ cx = 0.0, cy = 0.0, r = 1.0 }]",
        );
        assert!(matches!(err, Err(GeometryError::TerminalBehindSurface(_))));
        assert!(matches!(
            Scenario::from_toml_str("lambda = 0.1\nbogus = 1"),
            Err(GeometryError::Config(_))
        ));
    }

    #[test]
    fn config_round_trip() {
        let s = Scenario::new(
            Terminal::new(0.25, -1.5, 3.0).unwrap(),
            vec![Panel::new(0.1, 0.2, 0.3).unwrap()],
            0.05,
            1.0,
            true,
        )
        .unwrap()
        .with_phase(1.3);
        let text = toml::to_string(&ScenarioConfig::from(&s)).unwrap();
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);
    }
}
