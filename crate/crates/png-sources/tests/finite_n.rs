use png_sources::error::Error;
use png_sources::finite_n::*;
use png_sources::png_model::{ensemble, ModelParams, Probe};

fn params(a: f64, gp: f64, gm: f64) -> ModelParams<f64> {
    ModelParams::new(a, gp, gm, false)
}

fn win() -> LatticeWindow {
    LatticeWindow::default()
}

#[test]
fn single_site_is_geometric() {
    // at N = 1 only the corner weight, geometric with ratio γ₊γ₋, is present
    let p = params(0.3, 0.5, 0.6);
    let cfg = ContourConfig::default();
    let q: f64 = 0.5 * 0.6;
    let wide = LatticeWindow { x_max: 40 };
    for l in 0..5i64 {
        let v = finite_cdf(&p, 1, &[(0, l)], wide, &cfg).unwrap().value;
        assert!((v - (1.0 - q.powi(l as i32 + 1))).abs() <= 1e-12, "l={l}");
        let m = modified_cdf(&p, 1, &[(0, l)], wide, &cfg).unwrap().value;
        assert!((m - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn phi_support_and_values() {
    let p = params(0.3, 0.4, 0.4);
    let a: f64 = 0.3;
    let c = (1.0 - a) / (1.0 + a);
    assert_eq!(phi(2, 0, 2, 0, &p).re, 0.0);
    assert_eq!(phi(3, 0, 1, 0, &p).re, 0.0);
    // one step: two-sided geometric c·α^{|x₂−x₁|}
    for dx in -4..=4i64 {
        assert!((phi(0, 0, 1, dx, &p).re - c * a.powi(dx.abs() as i32)).abs() <= 1e-14);
    }
    for &(x1, x2) in &[(0, 0), (2, 5), (7, 1)] {
        assert!(phi(0, x1, 3, x2, &p).im.abs() <= 1e-12);
    }
}

#[test]
fn phi_rows_are_probability_vectors() {
    let p = params(0.6, 0.4, 0.4);
    for d in 1..4i64 {
        let row: Vec<f64> = (-200..=200).map(|y| phi(0, 0, d, y, &p).re).collect();
        assert!(row.iter().all(|&v| v >= -1e-14));
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn phi_is_a_convolution_power() {
    // φ over two steps equals the one-step kernel convolved with itself
    let p = params(0.4, 0.4, 0.4);
    for &(x1, x2) in &[(0, 0), (1, 3), (4, 0)] {
        let conv: f64 = (-60..=60).map(|y| phi(0, x1, 1, y, &p).re * phi(1, y, 2, x2, &p).re).sum();
        assert!((phi(0, x1, 2, x2, &p).re - conv).abs() <= 1e-13);
    }
}

#[test]
fn kernel_converges_in_nodes() {
    let p = params(0.3, 0.4, 0.4);
    let coarse = ContourConfig { nodes: 128, ..ContourConfig::default() };
    let fine = ContourConfig::default();
    for &(u1, x1, u2, x2) in &[(0, 3, 0, 5), (0, 1, 1, 2), (-1, 4, 1, 4)] {
        let a = ktilde(u1, x1, u2, x2, &p, 6, &coarse).unwrap();
        let b = ktilde(u1, x1, u2, x2, &p, 6, &fine).unwrap();
        assert!((a - b).norm() <= 1e-10);
    }
    assert!(ktilde(0, 3, 0, 5, &p, 6, &fine).unwrap().im.abs() <= 1e-10);
}

#[test]
fn kernel_independent_of_radii() {
    let p = params(0.3, 0.4, 0.4);
    let a = ContourConfig::default();
    let b = ContourConfig { r1: 1.6, r2: 0.55, nodes: 256 };
    for &(u1, x1, u2, x2) in &[(0, 3, 0, 5), (1, 2, -1, 0)] {
        let ka = ktilde(u1, x1, u2, x2, &p, 6, &a).unwrap();
        let kb = ktilde(u1, x1, u2, x2, &p, 6, &b).unwrap();
        assert!((ka - kb).norm() <= 1e-9);
    }
}

fn mc_check(p: &ModelParams<f64>, n: usize, points: &[(i64, i64)], modified: bool, seed: u64) {
    let trials = 100_000;
    let probes: Vec<Probe<f64>> = points.iter().map(|&(r, _)| Probe::raw(r)).collect();
    let mut sim = *p;
    sim.modified = modified;
    let ens = ensemble(&sim, 2 * n - 1, trials, seed, &probes, 0).unwrap();
    let hits = ens
        .rows
        .iter()
        .filter(|row| row.iter().zip(points).all(|(&h, &(_, l))| h <= l as f64))
        .count();
    let emp = hits as f64 / trials as f64;
    let cfg = ContourConfig::for_params(p, n).unwrap();
    let exact = if modified {
        modified_cdf(p, n, points, win(), &cfg).unwrap().value
    } else {
        finite_cdf(p, n, points, win(), &cfg).unwrap().value
    };
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((emp - exact).abs() <= 3.0 * sigma + 1e-6, "{points:?}: MC {emp} vs {exact} (σ {sigma})");
}

#[test]
fn agrees_with_simulation() {
    let p = params(0.3, 0.5, 0.4);
    mc_check(&p, 6, &[(0, 3)], false, 11);
    mc_check(&p, 6, &[(4, 2)], false, 12);
    mc_check(&p, 6, &[(0, 3), (2, 4)], false, 13);
    mc_check(&p, 6, &[(0, 3)], true, 14);
    mc_check(&p, 6, &[(-2, 2), (2, 3)], true, 15);
    mc_check(&p, 6, &[(-4, 3), (0, 3), (4, 3)], false, 16);
}

#[test]
fn agrees_with_simulation_near_the_edge_pole() {
    // 1/γ₊ = 1.27 is just outside the default R₁ = 1.25
    let p = params(0.32, 0.79, 0.63);
    mc_check(&p, 6, &[(0, 0)], false, 21);
    mc_check(&p, 6, &[(0, 3)], false, 22);
    mc_check(&p, 6, &[(-2, 2), (2, 4)], false, 23);
    let cfg = ContourConfig::for_params(&p, 6).unwrap();
    let mut last = 0.0;
    for l in 0..10 {
        let v = finite_cdf(&p, 6, &[(0, l)], win(), &cfg).unwrap().value;
        assert!(v >= last - 1e-12, "l={l}: {v}");
        last = v;
    }
}

#[test]
fn corner_weight_irrelevant_for_small_product() {
    let p = params(0.3, 1e-4, 1e-4);
    let cfg = ContourConfig::default();
    for l in 1..5i64 {
        let a = finite_cdf(&p, 4, &[(0, l)], win(), &cfg).unwrap().value;
        let b = modified_cdf(&p, 4, &[(0, l)], win(), &cfg).unwrap().value;
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn monotone_and_bounded_in_level() {
    let p = params(0.3, 0.5, 0.4);
    let cfg = ContourConfig::default();
    let mut prev = 0.0;
    for l in -1..26i64 {
        let v = finite_cdf(&p, 6, &[(0, l)], win(), &cfg).unwrap();
        assert!(v.value >= prev - 1e-12 && v.value <= 1.0 + 1e-10, "l={l}");
        assert!(v.imag_residue <= 1e-10);
        prev = v.value;
    }
    assert!((prev - 1.0).abs() <= 1e-8);
    assert!(finite_cdf(&p, 6, &[(0, -1)], win(), &cfg).unwrap().value.abs() <= 1e-10);
}

#[test]
fn window_bound_is_small_for_default_window() {
    let p = params(0.3, 0.5, 0.4);
    let v = finite_cdf(&p, 8, &[(0, 4)], win(), &ContourConfig::default()).unwrap();
    assert!(v.truncation_bound <= 1e-8, "{}", v.truncation_bound);
}

#[test]
fn rejected_inputs() {
    let cfg = ContourConfig::default();
    let big = ModelParams::new(0.3, 1.2, 0.9, true);
    assert!(matches!(finite_cdf(&big, 4, &[(0, 1)], win(), &cfg), Err(Error::Unsupported(_))));
    let p = params(0.3, 0.5, 0.4);
    let bad = ContourConfig { r1: 0.7, r2: 0.8, nodes: 64 };
    assert!(matches!(finite_cdf(&p, 4, &[(0, 1)], win(), &bad), Err(Error::Config(_))));
    let few = ContourConfig { nodes: 4, ..cfg };
    assert!(matches!(finite_cdf(&p, 4, &[(0, 1)], win(), &few), Err(Error::Config(_))));
    assert!(finite_cdf(&p, 4, &[(1, 1)], win(), &cfg).is_err());
    assert!(finite_cdf(&p, 4, &[], win(), &cfg).is_err());
    assert!(matches!(finite_cdf(&p, 4, &[(0, 1)], LatticeWindow { x_max: 0 }, &cfg), Err(Error::Config(_))));
}

#[test]
fn radii_chosen_between_poles() {
    let p = params(0.7, 0.75, 0.85);
    let cfg = ContourConfig::for_params(&p, 6).unwrap();
    assert!(cfg.validate(&p).is_ok());
    assert!(cfg.r2 > 0.85 && cfg.r1 < 1.0 / 0.75);
    // equal ratios ρ/R₂ = R₂/R₁ = R₁/P
    let (rho, pole) = (0.85, 1.0 / 0.75);
    assert!((rho / cfg.r2 - cfg.r2 / cfg.r1).abs() <= 1e-12 && (cfg.r1 / pole - cfg.r2 / cfg.r1).abs() <= 1e-12);
    assert!(cfg.nodes > 256);
    let tight = params(0.7, 0.99, 0.99);
    assert!(matches!(ContourConfig::for_params(&tight, 6), Err(Error::Numeric(_))));
}
