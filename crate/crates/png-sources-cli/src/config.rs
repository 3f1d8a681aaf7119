//! Command-line configuration. `RunConfig` is both the clap parser and the
//! record written to the manifest.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Parser, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[command(name = "pngsrc", version, about = "PNG growth with boundary sources: simulation and limit laws")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// CSV output path; a `<out>.manifest.toml` sidecar is written next to
    /// it. Without it the CSV goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.32)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.79)]
    pub gamma_plus: f64,
    #[arg(long, default_value_t = 0.63)]
    pub gamma_minus: f64,
    /// Drop the corner weight w(1,1).
    #[arg(long)]
    pub modified: bool,
}

#[derive(Args, Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridArgs {
    /// Minimal truncation length L of each Nyström slot.
    #[arg(long, default_value_t = 10.0)]
    pub cutoff: f64,
    /// Gauss-Legendre nodes m per slot.
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Airy,
    Goe2,
    F0,
    Brownian,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeArg {
    /// t = 2N
    Even,
    /// t = 2N − 1
    Odd,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega_plus: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega_minus: f64,
    /// Edge β₋ of the Brownian kernel.
    #[arg(long, allow_negative_numbers = true)]
    pub beta_minus: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Command {
    /// Limit shape h/N against β = r/2N, optionally with one simulated profile.
    Shape {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 399)]
        points: usize,
        /// Also simulate one profile at t = 2N.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// One height profile.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TimeArg::Even)]
        time: TimeArg,
    },
    /// Scaled heights at fixed probes over many trials.
    Ensemble {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// 0 uses every core.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Bulk probes at scaled positions τ around β₀.
        #[arg(long, allow_negative_numbers = true)]
        tau: Vec<f64>,
        /// Raw (unscaled) probes at lattice sites r.
        #[arg(long, allow_negative_numbers = true)]
        r: Vec<i64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta0: f64,
        #[arg(long, value_enum, default_value_t = TimeArg::Even)]
        time: TimeArg,
    },
    /// Limiting CDF from a Fredholm determinant (the Painlevé route when
    /// the F0 determinant needs continuation).
    Dist {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Times τⱼ (positions βⱼ for the Brownian kernel).
        #[arg(long, allow_negative_numbers = true)]
        tau: Vec<f64>,
        /// Levels sⱼ, one per τ, for a single joint value.
        #[arg(long, allow_negative_numbers = true)]
        s: Vec<f64>,
        #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
        s_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        s_max: f64,
        #[arg(long, default_value_t = 0.1)]
        ds: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Hastings-McLeod table with F₂, F₁² and optional (a, b) columns.
    Painleve {
        #[arg(long, default_value_t = 8.0)]
        s0: f64,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        s_min: f64,
        #[arg(long, default_value_t = 5e-4)]
        step: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: Vec<f64>,
        /// Write every k-th base row.
        #[arg(long, default_value_t = 20)]
        every: usize,
    },
    /// Moment table: GUE, GOE², F0 and transition laws at the given τ.
    Moments {
        #[arg(long, allow_negative_numbers = true)]
        tau: Vec<f64>,
    },
    /// Exact finite-N one-point CDF at the odd time 2N − 1.
    FiniteN {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, default_value_t = 0)]
        l_min: i64,
        #[arg(long, default_value_t = 12)]
        l_max: i64,
        #[arg(long, default_value_t = 20)]
        window: usize,
        /// Trapezoid nodes per circle; by default sized from the pole spacing and N
        #[arg(long)]
        contour_nodes: Option<usize>,
    },
    /// Ensemble against a limit law: KS distance, moments and histogram.
    Compare {
        /// Preset: γ₊ = α, γ₋ = 1, probes at τ ∈ {1, 0, −1}.
        #[arg(long)]
        fig4a: bool,
        /// Preset: γ± = 1 (modified model), probes at τ ∈ {0, 1}.
        #[arg(long)]
        fig4b: bool,
        /// Ensemble CSV (trial,probe_index,value) to compare instead.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        probe: usize,
        #[command(flatten)]
        theory: TheoryArgs,
        /// Time (or β) of the probe for the theory curve.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, default_value_t = 0.32)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 40)]
        bins: usize,
    },
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("--{field}: {msg}"))
}

fn check_model(m: &ModelArgs) -> Result<(), CliError> {
    if !(m.alpha >= 0.0 && m.alpha < 1.0) {
        return Err(bad("alpha", format!("must lie in [0, 1), got {}", m.alpha)));
    }
    if !(m.gamma_plus >= m.alpha && m.gamma_plus * m.alpha < 1.0) {
        return Err(bad("gamma-plus", format!("must satisfy α ≤ γ₊ < 1/α, got {}", m.gamma_plus)));
    }
    if !(m.gamma_minus >= m.alpha && m.gamma_minus * m.alpha < 1.0) {
        return Err(bad("gamma-minus", format!("must satisfy α ≤ γ₋ < 1/α, got {}", m.gamma_minus)));
    }
    if !m.modified && m.gamma_plus * m.gamma_minus >= 1.0 {
        return Err(bad("modified", "γ₊γ₋ ≥ 1 needs the modified model"));
    }
    Ok(())
}

fn positive(field: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(bad(field, "must be positive"));
    }
    Ok(())
}

fn check_grid(g: &GridArgs) -> Result<(), CliError> {
    if !(g.cutoff > 0.0 && g.cutoff <= 60.0) {
        return Err(bad("cutoff", format!("must lie in (0, 60], got {}", g.cutoff)));
    }
    if !(8..=400).contains(&g.nodes) {
        return Err(bad("nodes", format!("must lie in [8, 400], got {}", g.nodes)));
    }
    Ok(())
}

impl RunConfig {
    /// Range checks; errors name the offending flag.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.command {
            Command::Shape { model, points, n, .. } => {
                check_model(model)?;
                if model.alpha == 0.0 {
                    return Err(bad("alpha", "the limit shape needs α > 0"));
                }
                if *points < 2 {
                    return Err(bad("points", "need at least 2"));
                }
                if let Some(n) = n {
                    positive("n", *n)?;
                }
            }
            Command::Simulate { model, n, .. } => {
                check_model(model)?;
                positive("n", *n)?;
            }
            Command::Ensemble { model, n, trials, tau, r, .. } => {
                check_model(model)?;
                positive("n", *n)?;
                positive("trials", *trials)?;
                if tau.is_empty() && r.is_empty() {
                    return Err(bad("tau", "give at least one --tau or --r probe"));
                }
            }
            Command::Dist { theory, tau, s, s_min, s_max, ds, grid } => {
                check_grid(grid)?;
                if theory.kernel.is_none() {
                    return Err(bad("kernel", "required"));
                }
                if theory.kernel == Some(KernelArg::Brownian) && theory.beta_minus.is_none() {
                    return Err(bad("beta-minus", "required for the Brownian kernel"));
                }
                if tau.len() > 4 {
                    return Err(bad("tau", "at most 4 points"));
                }
                if !s.is_empty() && s.len() != tau.len().max(1) {
                    return Err(bad("s", "give one --s per --tau"));
                }
                if !(s_max > s_min) {
                    return Err(bad("s-max", "must exceed --s-min"));
                }
                if !(*ds > 0.0 && (s_max - s_min) / ds <= 1e5) {
                    return Err(bad("ds", format!("bad step {ds}")));
                }
            }
            Command::Painleve { s0, s_min, step, every, .. } => {
                if !(*s0 >= 6.0) {
                    return Err(bad("s0", "must be at least 6"));
                }
                if !(s_min < s0) {
                    return Err(bad("s-min", "must be below --s0"));
                }
                if !(*step > 0.0 && *step <= 1e-2) {
                    return Err(bad("step", "must lie in (0, 0.01]"));
                }
                positive("every", *every)?;
            }
            Command::Moments { tau } => {
                if let Some(t) = tau.iter().find(|t| !(**t >= -5.0 && **t <= 20.0)) {
                    return Err(bad("tau", format!("must lie in [-5, 20], got {t}")));
                }
            }
            Command::FiniteN { model, n, r, l_min, l_max, window, contour_nodes } => {
                check_model(model)?;
                positive("n", *n)?;
                positive("window", *window)?;
                if model.gamma_plus * model.gamma_minus >= 1.0 {
                    return Err(bad("gamma-plus", "finite-N determinant needs γ₊γ₋ < 1"));
                }
                if r % 2 != 0 || (r / 2).unsigned_abs() as usize >= *n {
                    return Err(bad("r", "must be even with |r/2| < N"));
                }
                if l_max < l_min {
                    return Err(bad("l-max", "must be at least --l-min"));
                }
                if contour_nodes.is_some_and(|m| m < 8) {
                    return Err(bad("contour-nodes", "must be at least 8"));
                }
            }
            Command::Compare { fig4a, fig4b, input, theory, n, trials, bins, alpha, .. } => {
                let modes = [*fig4a, *fig4b, input.is_some()].iter().filter(|b| **b).count();
                if modes != 1 {
                    return Err(bad("fig4a", "choose exactly one of --fig4a, --fig4b, --input"));
                }
                if input.is_some() && theory.kernel.is_none() {
                    return Err(bad("kernel", "required with --input"));
                }
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(bad("alpha", "must lie in (0, 1)"));
                }
                positive("n", *n)?;
                positive("trials", *trials)?;
                positive("bins", *bins)?;
            }
        }
        Ok(())
    }
}
