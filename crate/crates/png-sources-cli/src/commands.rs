//! Subcommand implementations.

use png_sources::analysis::{histogram, ks_distance, sample_moments, EmpiricalSample};
use png_sources::finite_n::{finite_cdf, modified_cdf, ContourConfig, LatticeWindow};
use png_sources::fredholm::{f0_joint, gaussian_joint, joint_cdf, normal_cdf, Direction, GridConfig};
use png_sources::geometry::{limit_shape, ScalingFrame};
use png_sources::kernels::KernelSpec;
use png_sources::painleve::{default_table, moments, solve_q, Moments, PainleveTable, SampledCdf, COLUMN_STRIDE};
use png_sources::png_model::{
    ensemble, simulate, write_ensemble_csv, write_snapshot_csv, FinalTime, ModelParams, Probe,
};

use crate::config::{Command, GridArgs, KernelArg, ModelArgs, RunConfig, TheoryArgs, TimeArg};
use crate::error::CliError;
use crate::output::{csv_writer, sink, write_manifest, Summary};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let out = cfg.out.as_deref();
    let summary = match &cfg.command {
        Command::Shape { model, points, n, seed } => shape(model, *points, *n, *seed, out)?,
        Command::Simulate { model, n, seed, time } => {
            let field = simulate(&params(model), *n, final_time(*time), *seed)?;
            write_snapshot_csv(&field, sink(out)?)?;
            let mut s = Summary::default();
            s.result("t", field.t as f64);
            s
        }
        Command::Ensemble { model, n, trials, seed, threads, tau, r, beta0, time } => {
            run_ensemble(model, *n, *trials, *seed, *threads, tau, r, *beta0, *time, out)?
        }
        Command::Dist { theory, tau, s, s_min, s_max, ds, grid } => dist(theory, tau, s, *s_min, *s_max, *ds, grid, out)?,
        Command::Painleve { s0, s_min, step, omega, every } => painleve(*s0, *s_min, *step, omega, *every, out)?,
        Command::Moments { tau } => moment_table(tau, out)?,
        Command::FiniteN { model, n, r, l_min, l_max, window, contour_nodes } => {
            finite(model, *n, *r, *l_min, *l_max, *window, *contour_nodes, out)?
        }
        Command::Compare { .. } => compare(&cfg.command, out)?,
    };
    if out.is_none() {
        for (k, v) in &summary.results {
            eprintln!("{k} = {v}");
        }
        for n in &summary.notes {
            eprintln!("note: {n}");
        }
    }
    write_manifest(cfg, &summary)
}

fn params(m: &ModelArgs) -> ModelParams<f64> {
    ModelParams::new(m.alpha, m.gamma_plus, m.gamma_minus, m.modified)
}

fn final_time(t: TimeArg) -> FinalTime {
    match t {
        TimeArg::Even => FinalTime::Even,
        TimeArg::Odd => FinalTime::Odd,
    }
}

fn record_moments(s: &mut Summary, prefix: &str, m: &Moments<f64>) {
    s.result(format!("{prefix}mean"), m.mean);
    s.result(format!("{prefix}sd"), m.sd);
    s.result(format!("{prefix}skewness"), m.skewness);
    s.result(format!("{prefix}kurtosis"), m.kurtosis);
    s.result(format!("{prefix}tail_mass"), m.tail_mass);
    if let Some(w) = m.precision_warning() {
        s.note(format!("{prefix}{w}"));
    }
}

fn shape(model: &ModelArgs, points: usize, n: Option<usize>, seed: u64, out: Option<&std::path::Path>) -> Result<Summary, CliError> {
    let p = params(model);
    let mc = match n {
        Some(n) => Some((n, simulate(&p, n, FinalTime::Even, seed)?)),
        None => None,
    };
    let mut w = csv_writer(out)?;
    if mc.is_some() {
        w.write_record(["beta", "shape", "branch", "simulated"])?;
    } else {
        w.write_record(["beta", "shape", "branch"])?;
    }
    for k in 0..points {
        let beta = -1.0 + 2.0 * (k as f64 + 1.0) / (points as f64 + 1.0);
        let (a, branch) = limit_shape(beta, &p)?;
        let mut rec = vec![beta.to_string(), a.to_string(), branch.tag().to_string()];
        if let Some((n, field)) = &mc {
            let r = (2.0 * beta * *n as f64).round() as i64;
            rec.push((field.get(r) as f64 / *n as f64).to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    let cp = png_sources::geometry::critical_points(&p);
    let mut s = Summary::default();
    s.result("beta_minus", cp.beta_minus);
    s.result("beta_plus", cp.beta_plus);
    if let Some(bc) = cp.beta_c {
        s.result("beta_c", bc);
    }
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn run_ensemble(
    model: &ModelArgs,
    n: usize,
    trials: usize,
    seed: u64,
    threads: usize,
    tau: &[f64],
    r: &[i64],
    beta0: f64,
    time: TimeArg,
    out: Option<&std::path::Path>,
) -> Result<Summary, CliError> {
    let p = params(model);
    let mut probes = Vec::new();
    let mut s = Summary::default();
    if !tau.is_empty() {
        let frame = ScalingFrame::new(p, n, beta0)?;
        for &t in tau {
            let probe = Probe::bulk(&frame, t)?;
            s.result(format!("probe{}_r", probes.len()), probe.r as f64);
            s.result(format!("probe{}_tau", probes.len()), frame.tau_of_r(probe.r));
            probes.push(probe);
        }
    }
    for &site in r {
        s.result(format!("probe{}_r", probes.len()), site as f64);
        probes.push(Probe::raw(site));
    }
    let ens = ensemble(&p, final_time(time).time(n), trials, seed, &probes, threads)?;
    write_ensemble_csv(&ens, sink(out)?)?;
    for k in 0..probes.len() {
        let m = sample_moments(&EmpiricalSample::new(ens.column(k))?)?;
        s.result(format!("probe{k}_mean"), m.mean);
        s.result(format!("probe{k}_sd"), m.sd);
    }
    Ok(s)
}

fn kernel_spec(theory: &TheoryArgs) -> Result<KernelSpec<f64>, CliError> {
    Ok(match theory.kernel {
        Some(KernelArg::Airy) => KernelSpec::ExtendedAiry,
        Some(KernelArg::Goe2) => KernelSpec::Goe2Transition { omega: theory.omega },
        Some(KernelArg::F0) => KernelSpec::F0Transition { omega_plus: theory.omega_plus, omega_minus: theory.omega_minus },
        Some(KernelArg::Brownian) => KernelSpec::Brownian {
            beta_minus: theory.beta_minus.ok_or_else(|| CliError::Config("--beta-minus: required".into()))?,
        },
        None => return Err(CliError::Config("--kernel: required".into())),
    })
}

/// Table whose upper end carries the mass of laws shifted right by negative
/// parameters.
fn table_for(omegas: &[f64]) -> Result<PainleveTable<f64>, CliError> {
    let low = omegas.iter().copied().fold(0.0f64, f64::min);
    let s0 = if low >= -0.05 {
        8.0
    } else if low >= -2.0 {
        16.0
    } else {
        (10.0 + 1.7 * low * low).max(16.0)
    };
    Ok(solve_q(s0, -10.0, 5e-4)?)
}

/// Joint law at the given points; Brownian laws come from the iterated
/// Gaussian integral, F0 with ω₊+ω₋ <= 0 from the Painlevé table.
fn joint_value(spec: &KernelSpec<f64>, points: &[(f64, f64)], grid: GridConfig<f64>) -> Result<f64, CliError> {
    match *spec {
        KernelSpec::F0Transition { omega_plus, omega_minus } => {
            if omega_plus + omega_minus > 0.0 {
                Ok(f0_joint(omega_plus, omega_minus, points, grid)?)
            } else if points.len() == 1 {
                let (t, s) = points[0];
                let table = table_for(&[omega_plus - t, omega_minus + t])?;
                Ok(table.f0_cdf(s, omega_plus - t, omega_minus + t)?)
            } else {
                Err(CliError::Config("--omega-plus: joint F0 laws need ω₊+ω₋ > 0".into()))
            }
        }
        KernelSpec::Brownian { beta_minus } => {
            let mut sorted = points.to_vec();
            sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            Ok(gaussian_joint(&sorted, beta_minus, Direction::Left)?)
        }
        _ => Ok(joint_cdf(spec, points, grid)?),
    }
}

#[allow(clippy::too_many_arguments)]
fn dist(
    theory: &TheoryArgs,
    tau: &[f64],
    s: &[f64],
    s_min: f64,
    s_max: f64,
    ds: f64,
    grid: &GridArgs,
    out: Option<&std::path::Path>,
) -> Result<Summary, CliError> {
    let spec = kernel_spec(theory)?;
    let gcfg = GridConfig { cutoff: grid.cutoff, nodes: grid.nodes };
    let taus: Vec<f64> = if tau.is_empty() { vec![0.0] } else { tau.to_vec() };
    let mut summary = Summary::default();
    let mut w = csv_writer(out)?;
    if !s.is_empty() {
        let points: Vec<(f64, f64)> = taus.iter().copied().zip(s.iter().copied()).collect();
        let v = joint_value(&spec, &points, gcfg)?;
        w.write_record(["tau", "s", "cdf"])?;
        for (t, x) in &points {
            w.write_record([t.to_string(), x.to_string(), v.to_string()])?;
        }
        w.flush()?;
        summary.result("cdf", v);
        return Ok(summary);
    }
    if taus.len() != 1 {
        return Err(CliError::Config("--s: a CDF grid needs a single --tau; give --s per point for joint values".into()));
    }
    let t = taus[0];
    let count = ((s_max - s_min) / ds).round() as usize;
    let grid_s: Vec<f64> = (0..=count).map(|k| s_min + ds * k as f64).collect();
    let values: Vec<f64> = match spec {
        KernelSpec::F0Transition { omega_plus, omega_minus } if omega_plus + omega_minus <= 0.0 => {
            let (p, m) = (omega_plus - t, omega_minus + t);
            let curve = table_for(&[p, m])?.f0_curve(p, m)?;
            summary.note("F0 with ω₊+ω₋ <= 0 evaluated on the Painlevé route");
            grid_s.iter().map(|&x| curve.eval(x)).collect()
        }
        _ => grid_s
            .iter()
            .map(|&x| joint_value(&spec, &[(t, x)], gcfg))
            .collect::<Result<_, _>>()?,
    };
    w.write_record(["s", "cdf"])?;
    for (x, v) in grid_s.iter().zip(&values) {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    w.flush()?;
    match moments(&grid_s, &values) {
        Ok(m) => record_moments(&mut summary, "", &m),
        Err(e) => summary.note(format!("moments unavailable: {e}")),
    }
    Ok(summary)
}

fn painleve(s0: f64, s_min: f64, step: f64, omegas: &[f64], every: usize, out: Option<&std::path::Path>) -> Result<Summary, CliError> {
    let mut table = solve_q(s0, s_min, step)?;
    table.add_columns(omegas)?;
    let every = if omegas.is_empty() { every } else { every.div_ceil(COLUMN_STRIDE) * COLUMN_STRIDE };
    let mut w = csv_writer(out)?;
    let mut header: Vec<String> = ["s", "q", "qp", "u", "v", "f2", "f2p", "e", "f1sq"].iter().map(|h| h.to_string()).collect();
    for o in omegas {
        header.push(format!("a[{o}]"));
        header.push(format!("b[{o}]"));
    }
    w.write_record(&header)?;
    for i in (0..table.len()).step_by(every) {
        let mut rec = vec![
            table.s[i], table.q[i], table.qp[i], table.u[i], table.v[i], table.f2[i], table.f2p[i], table.e[i], table.f1sq[i],
        ];
        for &o in omegas {
            let col = table.column(o).expect("column was added");
            rec.push(col.a[i / col.stride]);
            rec.push(col.b[i / col.stride]);
        }
        w.write_record(rec.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    let mut s = Summary::default();
    s.result("rows", table.len() as f64);
    s.result("s_min", table.s_min);
    Ok(s)
}

fn moment_table(taus: &[f64], out: Option<&std::path::Path>) -> Result<Summary, CliError> {
    // s₀ = 8 leaves ~1e-8 of the GOE² and F0 mass above the grid
    let table = solve_q(12.0, -10.0, 5e-4)?;
    let mut rows: Vec<(String, Moments<f64>)> = vec![
        ("GUE".into(), table.f2_curve().moments()?),
        ("GOE^2".into(), table.f1sq_curve().moments()?),
        ("F0".into(), table.f0_limit_curve().moments()?),
    ];
    for &t in taus {
        let m = if t < -0.05 {
            table_for(&[t])?.transition_curve(t)?.moments()?
        } else {
            table.transition_curve(t)?.moments()?
        };
        rows.push((format!("transition tau={t}"), m));
    }
    let mut w = csv_writer(out)?;
    w.write_record(["law", "mean", "sd", "skewness", "kurtosis", "tail_mass"])?;
    let mut s = Summary::default();
    for (name, m) in &rows {
        w.write_record([
            name.clone(),
            format!("{:.6}", m.mean),
            format!("{:.6}", m.sd),
            format!("{:.6}", m.skewness),
            format!("{:.6}", m.kurtosis),
            format!("{:.3e}", m.tail_mass),
        ])?;
        record_moments(&mut s, &format!("{name}."), m);
    }
    w.flush()?;
    let c = table.mean_small_tau_series()?;
    for (k, v) in c.iter().enumerate() {
        s.result(format!("mean_series_c{k}"), *v);
    }
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn finite(
    model: &ModelArgs,
    n: usize,
    r: i64,
    l_min: i64,
    l_max: i64,
    window: usize,
    contour_nodes: Option<usize>,
    out: Option<&std::path::Path>,
) -> Result<Summary, CliError> {
    let p = params(model);
    let mut cfg = ContourConfig::for_params(&p, n)?;
    if let Some(m) = contour_nodes {
        cfg.nodes = m;
    }
    let win = LatticeWindow { x_max: window };
    let mut w = csv_writer(out)?;
    w.write_record(["l", "cdf", "truncation_bound"])?;
    let mut s = Summary::default();
    let mut worst = 0.0f64;
    for l in l_min..=l_max {
        let v = if model.modified {
            modified_cdf(&p, n, &[(r, l)], win, &cfg)?
        } else {
            finite_cdf(&p, n, &[(r, l)], win, &cfg)?
        };
        worst = worst.max(v.truncation_bound);
        w.write_record([l.to_string(), v.value.to_string(), v.truncation_bound.to_string()])?;
    }
    w.flush()?;
    s.result("max_truncation_bound", worst);
    s.result("contour_r1", cfg.r1);
    s.result("contour_r2", cfg.r2);
    s.result("contour_nodes", cfg.nodes as f64);
    Ok(s)
}

/// A limit law usable as a comparison target.
enum Theory {
    Sampled(SampledCdf<f64>),
    Normal(f64),
}

impl Theory {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Theory::Sampled(c) => c.eval(x),
            Theory::Normal(var) => normal_cdf(x / var.sqrt()),
        }
    }

    fn mean_sd(&self) -> Result<(f64, f64), CliError> {
        match self {
            Theory::Sampled(c) => {
                let m = c.moments()?;
                Ok((m.mean, m.sd))
            }
            Theory::Normal(var) => Ok((0.0, var.sqrt())),
        }
    }
}

fn theory_curve(theory: &TheoryArgs, tau: f64) -> Result<Theory, CliError> {
    Ok(match theory.kernel {
        Some(KernelArg::Airy) => Theory::Sampled(default_table::<f64>()?.f2_curve()),
        Some(KernelArg::Goe2) => {
            let w = theory.omega + tau;
            Theory::Sampled(table_for(&[w])?.transition_curve(w)?)
        }
        Some(KernelArg::F0) => {
            let (p, m) = (theory.omega_plus - tau, theory.omega_minus + tau);
            Theory::Sampled(table_for(&[p, m])?.f0_curve(p, m)?)
        }
        Some(KernelArg::Brownian) => {
            let bm = theory.beta_minus.ok_or_else(|| CliError::Config("--beta-minus: required".into()))?;
            if !(tau < bm) {
                return Err(CliError::Config("--tau: the Brownian probe must lie below --beta-minus".into()));
            }
            Theory::Normal(bm - tau)
        }
        None => return Err(CliError::Config("--kernel: required".into())),
    })
}

fn read_probe_column(path: &std::path::Path, probe: usize) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let idx: usize = rec.get(1).and_then(|v| v.parse().ok()).ok_or_else(|| CliError::Config("--input: bad probe_index".into()))?;
        if idx == probe {
            let v: f64 = rec.get(2).and_then(|v| v.parse().ok()).ok_or_else(|| CliError::Config("--input: bad value".into()))?;
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(CliError::Config(format!("--probe: no rows with probe_index {probe}")));
    }
    Ok(values)
}

fn compare(cmd: &Command, out: Option<&std::path::Path>) -> Result<Summary, CliError> {
    let Command::Compare { fig4a, fig4b: _, input, probe, theory, tau, alpha, n, trials, seed, threads, bins } = cmd else {
        unreachable!()
    };
    // (label, tau, sample, theory)
    let mut curves: Vec<(String, f64, Vec<f64>, Theory)> = Vec::new();
    let mut s = Summary::default();
    if let Some(path) = input {
        curves.push((format!("probe{probe}"), *tau, read_probe_column(path, *probe)?, theory_curve(theory, *tau)?));
    } else {
        let (p, taus) = if *fig4a {
            (ModelParams::new(*alpha, *alpha, 1.0, false), vec![1.0, 0.0, -1.0])
        } else {
            (ModelParams::new(*alpha, 1.0, 1.0, true), vec![0.0, 1.0])
        };
        let frame = ScalingFrame::new(p, *n, 0.0)?;
        let probes: Vec<Probe<f64>> = taus.iter().map(|&t| Probe::bulk(&frame, t)).collect::<Result<_, _>>()?;
        let ens = ensemble(&p, FinalTime::Even.time(*n), *trials, *seed, &probes, *threads)?;
        let realised: Vec<f64> = probes.iter().map(|pr| frame.tau_of_r(pr.r)).collect();
        let omegas: Vec<f64> = realised.iter().flat_map(|&t| [t, -t]).collect();
        let table = table_for(&omegas)?;
        for (k, (&t, pr)) in realised.iter().zip(&probes).enumerate() {
            let curve = if *fig4a { table.transition_curve(t)? } else { table.f0_curve(-t, t)? };
            s.result(format!("x{k}"), pr.r as f64);
            curves.push((format!("x={}", pr.r), t, ens.column(k), Theory::Sampled(curve)));
        }
    }
    let mut w = csv_writer(out)?;
    w.write_record(["curve", "tau", "lo", "hi", "count", "density", "theory_density"])?;
    for (label, t, values, th) in &curves {
        let sample = EmpiricalSample::new(values.clone())?;
        let ks = ks_distance(&sample, |x| th.eval(x));
        let m = sample_moments(&sample)?;
        let (tm, tsd) = th.mean_sd()?;
        s.result(format!("{label}.ks"), ks);
        s.result(format!("{label}.tau"), *t);
        s.result(format!("{label}.mean_delta"), m.mean - tm);
        s.result(format!("{label}.sd_delta"), m.sd - tsd);
        for b in histogram(&sample, tm - 5.0 * tsd, tm + 5.0 * tsd, *bins)? {
            let td = (th.eval(b.hi) - th.eval(b.lo)) / (b.hi - b.lo);
            w.write_record([
                label.clone(),
                t.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.count.to_string(),
                b.density.to_string(),
                td.to_string(),
            ])?;
        }
    }
    w.flush()?;
    s.tolerance("ks", 0.05);
    Ok(s)
}
