use lis_crlb::crlb::crlb_from_fisher;
use lis_crlb::deployment::{monte_carlo_stats, multi_panel_fisher, Deployment, McConfig, Split};
use lis_crlb::fisher::fisher_numeric;
use lis_crlb::geometry::{Scenario, Terminal};
use lis_crlb::quadrature::QuadratureSpec;
use lis_crlb::spherical::crlb_spherical;

fn cfg(n: usize) -> McConfig {
    McConfig {
        n_terminals: n,
        seed: 11,
        ..McConfig::default()
    }
}

#[test]
fn quad_split_improves_mean_lateral_bound_at_small_radius() {
    let spec = QuadratureSpec::default();
    let c = cfg(40);
    let single = monte_carlo_stats(&Deployment::new(4.0, 4.0, 0.2, Split::Single).unwrap(), &c, 0.1, 2.0, false, &spec).unwrap();
    let quad = monte_carlo_stats(&Deployment::new(4.0, 4.0, 0.2, Split::Quad).unwrap(), &c, 0.1, 2.0, false, &spec).unwrap();
    assert!(quad.mean_c_x < single.mean_c_x);
    assert!(quad.mean_c_z < single.mean_c_z);
}

#[test]
fn mean_bounds_do_not_increase_with_radius() {
    let spec = QuadratureSpec::default();
    let c = cfg(20);
    for split in Split::ALL {
        let mut last = f64::INFINITY;
        for r in [0.2, 0.5, 1.0, 2.0] {
            let s = monte_carlo_stats(&Deployment::new(4.0, 4.0, r, split).unwrap(), &c, 0.1, 2.0, false, &spec).unwrap();
            let total = s.mean_c_x + s.mean_c_y + s.mean_c_z;
            assert!(total <= last, "{split:?} R={r}");
            last = total;
        }
    }
}

#[test]
fn samples_are_sorted_and_mean_matches() {
    let spec = QuadratureSpec::default();
    let s = monte_carlo_stats(&Deployment::new(4.0, 4.0, 1.0, Split::Hex16).unwrap(), &cfg(15), 0.1, 2.0, true, &spec).unwrap();
    assert_eq!(s.used + s.excluded, 15);
    for v in [&s.sorted_c_x, &s.sorted_c_z, &s.sorted_c_phase] {
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
    let mean = s.sorted_c_z.iter().sum::<f64>() / s.used as f64;
    assert!((mean - s.mean_c_z).abs() <= 1e-12 * mean);
    assert!(s.mean_c_phase.is_some());
}

#[test]
fn depth_bound_unchanged_by_split_for_small_apertures() {
    // D = √(W² + H²)/4 ≈ 1.41 and R stay below z0/4 = 2.
    let spec = QuadratureSpec::default();
    let t = Terminal::on_axis(8.0).unwrap();
    for r in [0.25, 0.5, 1.0] {
        let c = |split| {
            let d = Deployment::new(4.0, 4.0, r, split).unwrap();
            crlb_from_fisher(&multi_panel_fisher(&d, &t, 0.1, 2.0, false, &spec).unwrap()).unwrap().c_z
        };
        let (a, b) = (c(Split::Single), c(Split::Quad));
        assert!((a - b).abs() <= 0.1 * a, "R={r}: {a} {b}");
    }
}

#[test]
fn config_to_spherical_pipeline() {
    let s = Scenario::from_toml_str(
        "lambda = 0.1\nterminal = { x = 1.0, y = 2.0, z = 6.0 }\npanels = [ { cx = 0.0, cy = 0.0, r = 0.5 } ]",
    )
    .unwrap();
    let c = crlb_from_fisher(&fisher_numeric(&s, &s.panels()[0], &QuadratureSpec::default()).unwrap()).unwrap();
    let sph = crlb_spherical(&c, s.terminal()).unwrap();
    // Orthogonal basis: the Cartesian trace is the metric-weighted spherical trace.
    assert!(sph.c_z1 > 0.0 && sph.c_phi > 0.0 && sph.c_psi > 0.0);
    let r2 = 1.0f64 + 4.0;
    let z1sq = r2 + 36.0;
    let weighted = sph.c_z1 + z1sq * sph.c_phi + r2 * sph.c_psi;
    assert!((weighted - (c.c_x + c.c_y + c.c_z)).abs() <= 1e-9 * weighted);
}
