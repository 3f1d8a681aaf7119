use png_sources::analysis::{ecdf, EmpiricalSample};
use png_sources::geometry::{bulk_shape, d_gauss, gaussian_shape, limit_shape, Branch, ScalingFrame, Side};
use png_sources::png_model::*;

fn params(a: f64, gp: f64, gm: f64, modified: bool) -> ModelParams<f64> {
    ModelParams::new(a, gp, gm, modified)
}

#[test]
fn modified_corner_always_zero() {
    let p = params(0.3, 1.2, 1.1, true);
    for seed in 0..2000 {
        let s = NucleationStream::for_trial(3, seed);
        assert_eq!(sample_nucleation(1, 1, &p, &s).unwrap(), 0);
    }
}

#[test]
fn zero_intensity_never_nucleates() {
    let p = params(0.0, 0.0, 0.0, false);
    for seed in 0..200 {
        let s = NucleationStream::new(seed);
        for i in 1..5 {
            for j in 1..5 {
                assert_eq!(sample_nucleation(i, j, &p, &s).unwrap(), 0);
            }
        }
    }
}

#[test]
fn geometric_law_of_weights() {
    // bulk sites have q = α² = 1/2
    let p = params(0.5f64.sqrt(), 0.8, 0.8, false);
    let draws = 1_000_000u64;
    let mut counts = [0u64; 12];
    let mut sum = 0u64;
    for k in 0..draws {
        let s = NucleationStream::for_trial(17, k / 1000);
        let i = 2 + (k % 1000) / 40;
        let j = 2 + (k % 1000) % 40;
        let w = sample_nucleation(i, j, &p, &s).unwrap();
        sum += w;
        counts[(w as usize).min(11)] += 1;
    }
    let mean = sum as f64 / draws as f64;
    assert!((mean - 1.0).abs() <= 0.01, "mean {mean}");
    // chi-square over {0,…,10, ≥11}: 11 degrees of freedom, 0.1% point 31.3
    let mut chi2 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let pk = if k < 11 { 0.5f64.powi(k as i32 + 1) } else { 0.5f64.powi(11) };
        let e = pk * draws as f64;
        chi2 += (c as f64 - e).powi(2) / e;
    }
    assert!(chi2 < 31.3, "chi2 {chi2}");
}

#[test]
fn product_at_one_needs_modified_model() {
    let p = params(0.3, 1.25, 0.8, false);
    assert!(sample_nucleation(1, 1, &p, &NucleationStream::new(0)).is_err());
    assert!(simulate(&p, 3, FinalTime::Odd, 0).is_err());
    let m = params(0.3, 1.25, 0.8, true);
    assert!(simulate(&m, 3, FinalTime::Odd, 0).is_ok());
}

#[test]
fn zero_weights_keep_flat_profile() {
    let p = params(0.0, 0.0, 0.0, false);
    let f = simulate(&p, 1, FinalTime::Odd, 9).unwrap();
    assert!(f.heights.iter().all(|&h| h == 0));
    let f = simulate(&p, 20, FinalTime::Even, 9).unwrap();
    assert_eq!(f.heights.len(), 81);
    assert!(f.heights.iter().all(|&h| h == 0));
}

#[test]
fn single_nucleation_spreads_laterally() {
    // only w(1,1) can be nonzero
    let p = params(0.0, 0.9, 0.9, false);
    let mut seen = 0;
    for seed in 0..200u64 {
        let s = NucleationStream::new(seed);
        let f1 = simulate_to(&p, 1, &s).unwrap();
        let k = f1.get(0);
        let f3 = simulate_to(&p, 3, &s).unwrap();
        for r in -3i64..=3 {
            let want = if r.abs() <= 2 { k } else { 0 };
            assert_eq!(f3.get(r), want);
        }
        seen += (k > 0) as usize;
    }
    assert!(seen > 50);
}

#[test]
fn update_rule_with_sampled_weights() {
    // h(r,t+1) = max(h(r−1,t), h(r,t), h(r+1,t)) + ω(r,t+1), w(i,j) = ω(i−j, i+j−1)
    let p = params(0.4, 0.7, 0.9, false);
    let s = NucleationStream::new(44);
    let mut f = HeightField::flat();
    for t in 0..25i64 {
        let g = step(&f, &p, &s).unwrap();
        let tn = t + 1;
        for r in -tn..=tn {
            let m = f.get(r - 1).max(f.get(r)).max(f.get(r + 1));
            let w = if (tn - r).rem_euclid(2) == 1 {
                let i = ((tn + r + 1) / 2) as u64;
                let j = ((tn - r + 1) / 2) as u64;
                sample_nucleation(i, j, &p, &s).unwrap() as i64
            } else {
                0
            };
            assert_eq!(g.get(r), m + w, "r={r} t={tn}");
        }
        f = g;
    }
}

#[test]
fn heights_monotone_in_time_and_supported() {
    let p = params(0.5, 0.6, 0.7, false);
    let s = NucleationStream::new(5);
    let mut f = HeightField::flat();
    for _ in 0..60 {
        let g = step(&f, &p, &s).unwrap();
        let t = g.t as i64;
        for r in -t - 2..=t + 2 {
            assert!(g.get(r) >= f.get(r));
            assert!(g.get(r) >= 0);
            if r.abs() > t {
                assert_eq!(g.get(r), 0);
            }
        }
        f = g;
    }
}

#[test]
fn step_matches_simulate() {
    let p = params(0.32, 0.79, 0.63, false);
    let s = NucleationStream::new(21);
    let mut f = HeightField::flat();
    for _ in 0..39 {
        f = step(&f, &p, &s).unwrap();
    }
    assert_eq!(f, simulate(&p, 20, FinalTime::Odd, 21).unwrap());
}

#[test]
fn same_seed_same_field() {
    let p = params(0.32, 0.79, 0.63, false);
    let a = simulate(&p, 200, FinalTime::Even, 99).unwrap();
    let b = simulate(&p, 200, FinalTime::Even, 99).unwrap();
    assert_eq!(a, b);
    let c = simulate(&p, 200, FinalTime::Even, 100).unwrap();
    assert_ne!(a, c);
}

#[test]
fn even_sites_agree_between_final_times() {
    let p = params(0.32, 0.79, 0.63, false);
    let odd = simulate(&p, 50, FinalTime::Odd, 4).unwrap();
    let even = simulate(&p, 50, FinalTime::Even, 4).unwrap();
    for r in (-98..=98).step_by(2) {
        assert_eq!(odd.get(r), even.get(r));
    }
}

#[test]
fn large_profile_follows_limit_shape() {
    let p = params(0.32, 0.79, 0.63, false);
    let n = 5000;
    let frame = ScalingFrame::new(p, n, 0.0).unwrap();
    let f = simulate(&p, n, FinalTime::Even, 2024).unwrap();
    for k in -9..=9 {
        let beta = k as f64 / 10.0;
        let r = (2.0 * beta * n as f64).round() as i64;
        let (shape, branch) = limit_shape(beta, &p).unwrap();
        // four fluctuation widths of the relevant scaling
        let width = match branch {
            Branch::Bulk => frame.constants.d * (n as f64).powf(1.0 / 3.0),
            Branch::GaussianMinus => d_gauss(0.32, 0.63).unwrap() * (n as f64).sqrt(),
            Branch::GaussianPlus => d_gauss(0.32, 0.79).unwrap() * (n as f64).sqrt(),
        };
        let got = f.get(r) as f64 / n as f64;
        assert!((got - shape).abs() < 4.0 * width / n as f64 + 2e-3, "β={beta}: {got} vs {shape}");
    }
}

#[test]
fn single_trial_ensemble_is_scaled_simulation() {
    let p = params(0.32, 0.79, 0.63, false);
    let frame = ScalingFrame::new(p, 100, 0.0).unwrap();
    let probes = vec![Probe::bulk(&frame, 0.0).unwrap(), Probe::gaussian(&frame, -0.9, Side::Minus).unwrap()];
    let ens = ensemble(&p, 200, 1, 8, &probes, 1).unwrap();
    let f = simulate_to(&p, 200, &NucleationStream::for_trial(8, 0)).unwrap();
    for (k, pr) in probes.iter().enumerate() {
        assert_eq!(ens.rows[0][k], pr.apply(f.get(pr.r)));
    }
    let center = gaussian_shape(0.32, probes[1].r as f64 / 200.0, 0.63, Side::Minus) * 100.0;
    assert!((probes[1].center - center).abs() < 1e-9);
    assert!((probes[0].center - bulk_shape(0.32, 0.0) * 100.0).abs() < 1e-9);
}

#[test]
fn ensemble_independent_of_threads_and_order() {
    let p = params(0.32, 0.79, 0.63, false);
    let probes = vec![Probe::raw(0), Probe::raw(6)];
    let one = ensemble(&p, 60, 64, 3, &probes, 1).unwrap();
    let pool = ensemble(&p, 60, 64, 3, &probes, 2).unwrap();
    let global = ensemble(&p, 60, 64, 3, &probes, 0).unwrap();
    assert_eq!(one, pool);
    assert_eq!(one, global);
    // trial k is reproduced on its own
    for k in [0usize, 17, 63] {
        let w = heights_in_window(&p, 60, &NucleationStream::for_trial(3, k as u64), 0, 6).unwrap();
        assert_eq!(one.rows[k], vec![w[0] as f64, w[6] as f64]);
    }
}

#[test]
fn probe_outside_light_cone_rejected() {
    let p = params(0.32, 0.79, 0.63, false);
    assert!(ensemble(&p, 10, 1, 0, &[Probe::raw(11)], 1).is_err());
}

#[test]
fn reflection_symmetry_in_distribution() {
    let p = params(0.32, 0.79, 0.5, false);
    let q = p.swapped();
    let (t, trials, r) = (80usize, 10_000usize, 12i64);
    let a = ensemble(&p, t, trials, 1, &[Probe::raw(r)], 0).unwrap();
    let b = ensemble(&q, t, trials, 2, &[Probe::raw(-r)], 0).unwrap();
    let sa = EmpiricalSample::new(a.column(0)).unwrap();
    let sb = EmpiricalSample::new(b.column(0)).unwrap();
    // two-sample KS over the integer support
    let top = sa.max().max(sb.max()) as i64;
    let d = (0..=top).map(|h| (ecdf(&sa, h as f64) - ecdf(&sb, h as f64)).abs()).fold(0.0, f64::max);
    assert!(d <= 0.05, "KS {d}");
}

#[test]
fn csv_exports() {
    let p = params(0.32, 0.79, 0.63, false);
    let f = simulate(&p, 2, FinalTime::Odd, 1).unwrap();
    let mut buf = Vec::new();
    write_snapshot_csv(&f, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("r,h\n-3,"));
    assert_eq!(text.lines().count(), 8);
    let ens = ensemble(&p, 3, 2, 1, &[Probe::raw(0), Probe::raw(1)], 1).unwrap();
    let mut buf = Vec::new();
    write_ensemble_csv(&ens, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("trial,probe_index,value\n0,0,"));
    assert_eq!(text.lines().count(), 5);
}
