//! Discrete PNG dynamics with two boundary sources.
//!
//! Weights w(i,j) live on the time-diagonal d = i+j−1 and are drawn from a
//! ChaCha8 stream keyed by (seed, trial) and positioned by the site index, so
//! a weight never depends on which other sites were visited.

use std::io::Write;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{ScalingFrame, Side, Variant};
use crate::real::{lit, to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub alpha: T,
    pub gamma_plus: T,
    pub gamma_minus: T,
    /// Forces w(1,1) = 0.
    pub modified: bool,
}

impl<T: Real> ModelParams<T> {
    pub fn new(alpha: T, gamma_plus: T, gamma_minus: T, modified: bool) -> Self {
        ModelParams { alpha, gamma_plus, gamma_minus, modified }
    }

    /// Checks the sampler's requirements. α = 0 is tolerated so that the
    /// degenerate all-zero model can be simulated.
    pub fn validate(&self) -> Result<()> {
        let (a, gp, gm) = (self.alpha, self.gamma_plus, self.gamma_minus);
        if !(a >= T::zero() && a < T::one()) {
            return Err(Error::Parameter(format!("alpha must lie in [0,1), got {a}")));
        }
        if !(gp >= a && gm >= a) || !gp.is_finite() || !gm.is_finite() {
            return Err(Error::Parameter(format!(
                "edge intensities must satisfy gamma >= alpha, got gamma+={gp}, gamma-={gm}"
            )));
        }
        if !(a * gp < T::one() && a * gm < T::one()) {
            return Err(Error::Parameter(format!(
                "edge intensities must stay below 1/alpha, got gamma+={gp}, gamma-={gm}"
            )));
        }
        if !self.modified && !(gp * gm < T::one()) {
            return Err(Error::Parameter(format!(
                "gamma+ * gamma- = {} >= 1 needs the modified model",
                gp * gm
            )));
        }
        Ok(())
    }

    /// Range checks needed by the limit-shape formulas.
    pub fn validate_shape(&self) -> Result<()> {
        let (a, gp, gm) = (self.alpha, self.gamma_plus, self.gamma_minus);
        if !(a > T::zero() && a < T::one()) {
            return Err(Error::Parameter(format!("alpha must lie in (0,1), got {a}")));
        }
        for (name, g) in [("gamma+", gp), ("gamma-", gm)] {
            if !(g >= a && a * g < T::one()) {
                return Err(Error::Parameter(format!("{name} = {g} outside [alpha, 1/alpha)")));
            }
        }
        Ok(())
    }

    /// q = a_i b_j, with a₁ = γ₋, b₁ = γ₊ and α elsewhere.
    pub fn intensity(&self, i: u64, j: u64) -> T {
        let a = if i == 1 { self.gamma_minus } else { self.alpha };
        let b = if j == 1 { self.gamma_plus } else { self.alpha };
        a * b
    }

    pub fn swapped(&self) -> Self {
        ModelParams { gamma_plus: self.gamma_minus, gamma_minus: self.gamma_plus, ..*self }
    }

    fn to_f64(&self) -> ModelParams<f64> {
        ModelParams {
            alpha: to_f64(self.alpha),
            gamma_plus: to_f64(self.gamma_plus),
            gamma_minus: to_f64(self.gamma_minus),
            modified: self.modified,
        }
    }
}

/// Heights h(r,t) for r ∈ [−t, t].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightField {
    pub t: usize,
    pub heights: Vec<i64>,
}

impl HeightField {
    pub fn flat() -> Self {
        HeightField { t: 0, heights: vec![0] }
    }

    pub fn get(&self, r: i64) -> i64 {
        let t = self.t as i64;
        if r < -t || r > t {
            0
        } else {
            self.heights[(r + t) as usize]
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let t = self.t as i64;
        self.heights.iter().enumerate().map(move |(k, &h)| (k as i64 - t, h))
    }
}

/// Deterministic source of the weights w(i,j) for one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleationStream {
    pub master_seed: u64,
    pub trial: u64,
}

fn site_index(i: u64, j: u64) -> u128 {
    let d = (i + j - 1) as u128;
    d * (d - 1) / 2 + (i as u128 - 1)
}

#[inline]
fn uniform_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn geometric(u: f64, q: f64, ln_q: f64) -> u64 {
    if q <= 0.0 || u > q {
        0
    } else {
        (u.ln() / ln_q).floor() as u64
    }
}

impl NucleationStream {
    pub fn new(master_seed: u64) -> Self {
        NucleationStream { master_seed, trial: 0 }
    }

    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        NucleationStream { master_seed, trial }
    }

    fn rng_at(&self, i: u64, j: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial);
        rng.set_word_pos(2 * site_index(i, j));
        rng
    }

    /// Draws the uniforms for sites (i, j), (i+1, j−1), ... on one diagonal.
    fn diagonal(&self, i_first: u64, d: u64) -> DiagonalDraws {
        DiagonalDraws { rng: self.rng_at(i_first, d + 1 - i_first) }
    }
}

struct DiagonalDraws {
    rng: ChaCha8Rng,
}

impl DiagonalDraws {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        uniform_open(self.rng.next_u64())
    }
}

/// One weight w(i,j), geometric with parameter a_i b_j.
pub fn sample_nucleation<T: Real>(i: u64, j: u64, params: &ModelParams<T>, stream: &NucleationStream) -> Result<u64> {
    if i == 0 || j == 0 {
        return domain("nucleation indices start at 1");
    }
    if params.modified && i == 1 && j == 1 {
        return Ok(0);
    }
    let q = to_f64(params.intensity(i, j));
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Parameter(format!("intensity a_i b_j = {q} at ({i},{j}) is not in [0,1)")));
    }
    let u = uniform_open(stream.rng_at(i, j).next_u64());
    Ok(geometric(u, q, q.ln()))
}

/// Precomputed (q, ln q) for the three kinds of site on a diagonal.
struct Intensities {
    edge_i: f64,
    edge_j: f64,
    bulk: f64,
    corner: f64,
}

impl Intensities {
    fn new(p: &ModelParams<f64>) -> Self {
        Intensities {
            edge_i: p.gamma_minus * p.alpha,
            edge_j: p.alpha * p.gamma_plus,
            bulk: p.alpha * p.alpha,
            corner: if p.modified { 0.0 } else { p.gamma_minus * p.gamma_plus },
        }
    }

    #[inline]
    fn q(&self, i: u64, j: u64) -> f64 {
        match (i == 1, j == 1) {
            (true, true) => self.corner,
            (true, false) => self.edge_i,
            (false, true) => self.edge_j,
            _ => self.bulk,
        }
    }
}

fn safe_ln(q: f64) -> f64 {
    if q > 0.0 {
        q.ln()
    } else {
        -1.0
    }
}

const PAD: usize = 2;

/// Advances a window of heights from time s−1 to s.
///
/// `prev` holds h(r, s−1) for r in [lo_prev, hi_prev] with `PAD` zeros on each
/// side; `next` receives h(r, s) for r in [lo, hi] in the same layout. The
/// caller guarantees lo ≥ lo_prev − 1 and hi ≤ hi_prev + 1.
#[allow(clippy::too_many_arguments)]
fn advance(
    prev: &[i64],
    lo_prev: i64,
    next: &mut Vec<i64>,
    lo: i64,
    hi: i64,
    s: i64,
    inten: &Intensities,
    stream: &NucleationStream,
) {
    next.clear();
    next.resize(PAD, 0);
    let n = (hi - lo + 1) as usize;
    let base = (lo - 1 - lo_prev + PAD as i64) as usize;
    let window = &prev[base..base + n + 2];
    next.extend(window.windows(3).map(|w| w[0].max(w[1]).max(w[2])));
    next.resize(next.len() + PAD, 0);

    let r_first = if (s - lo).rem_euclid(2) == 1 { lo } else { lo + 1 };
    if r_first > hi {
        return;
    }
    let mut draws = stream.diagonal(((s + r_first + 1) / 2) as u64, s as u64);
    let q_bulk = inten.bulk;
    let ln_bulk = safe_ln(q_bulk);
    let mut r = r_first;
    while r <= hi {
        let i = ((s + r + 1) / 2) as u64;
        let j = ((s - r + 1) / 2) as u64;
        let u = draws.next_uniform();
        let k = if i > 1 && j > 1 {
            geometric(u, q_bulk, ln_bulk)
        } else {
            let q = inten.q(i, j);
            geometric(u, q, safe_ln(q))
        };
        next[(r - lo) as usize + PAD] += k as i64;
        r += 2;
    }
}

/// h(·, t+1) from h(·, t).
pub fn step<T: Real>(field: &HeightField, params: &ModelParams<T>, stream: &NucleationStream) -> Result<HeightField> {
    params.validate()?;
    let p = params.to_f64();
    let inten = Intensities::new(&p);
    let t = field.t as i64;
    let s = t + 1;
    let mut prev = vec![0i64; PAD];
    prev.extend_from_slice(&field.heights);
    prev.resize(prev.len() + PAD, 0);
    let mut next = Vec::with_capacity((2 * s + 1) as usize + 2 * PAD);
    advance(&prev, -t, &mut next, -s, s, s, &inten, stream);
    Ok(HeightField { t: s as usize, heights: next[PAD..next.len() - PAD].to_vec() })
}

/// Final time used by a simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinalTime {
    /// M = 2N − 1, the time of the determinantal formulas.
    Odd,
    /// t = 2N, the time used for Monte Carlo comparisons.
    Even,
}

impl FinalTime {
    pub fn time(self, n: usize) -> usize {
        match self {
            FinalTime::Odd => 2 * n - 1,
            FinalTime::Even => 2 * n,
        }
    }
}

/// Runs the dynamics up to time `t`, keeping only the sites that can
/// influence h(r, t) for r ∈ [rmin, rmax].
pub fn heights_in_window<T: Real>(
    params: &ModelParams<T>,
    t: usize,
    stream: &NucleationStream,
    rmin: i64,
    rmax: i64,
) -> Result<Vec<i64>> {
    params.validate()?;
    let ti = t as i64;
    if rmin > rmax || rmin < -ti || rmax > ti {
        return domain(format!("window [{rmin},{rmax}] is outside |r| <= {t}"));
    }
    let p = params.to_f64();
    let inten = Intensities::new(&p);
    let mut prev = vec![0i64; 2 * PAD + 1];
    let mut lo_prev = 0i64;
    let mut next = Vec::with_capacity((rmax - rmin + 2 * ti + 1) as usize + 2 * PAD);
    for s in 1..=ti {
        let lo = (-s).max(rmin - (ti - s));
        let hi = s.min(rmax + (ti - s));
        advance(&prev, lo_prev, &mut next, lo, hi, s, &inten, stream);
        std::mem::swap(&mut prev, &mut next);
        lo_prev = lo;
    }
    if ti == 0 {
        return Ok(vec![0; (rmax - rmin + 1) as usize]);
    }
    let off = (rmin - lo_prev) as usize + PAD;
    Ok(prev[off..off + (rmax - rmin + 1) as usize].to_vec())
}

/// Full profile at time `t`.
pub fn simulate_to<T: Real>(params: &ModelParams<T>, t: usize, stream: &NucleationStream) -> Result<HeightField> {
    let ti = t as i64;
    let heights = heights_in_window(params, t, stream, -ti, ti)?;
    Ok(HeightField { t, heights })
}

/// Full profile at the final time belonging to N.
pub fn simulate<T: Real>(params: &ModelParams<T>, n: usize, final_time: FinalTime, seed: u64) -> Result<HeightField> {
    if n == 0 {
        return domain("N must be positive");
    }
    simulate_to(params, final_time.time(n), &NucleationStream::new(seed))
}

/// A lattice site together with the affine map to its scaled variable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe<T> {
    pub r: i64,
    pub center: T,
    pub scale: T,
}

impl<T: Real> Probe<T> {
    /// Raw heights, unscaled.
    pub fn raw(r: i64) -> Self {
        Probe { r, center: T::zero(), scale: T::one() }
    }

    /// H_N at the site nearest to τ.
    pub fn bulk(frame: &ScalingFrame<T>, tau: T) -> Result<Self> {
        let site = frame.site_for_tau(tau);
        Self::at_site(frame, site.r, Variant::Bulk)
    }

    /// H_N^{(G±)} at the site nearest to r = 2βN.
    pub fn gaussian(frame: &ScalingFrame<T>, beta: T, side: Side) -> Result<Self> {
        let r = (to_f64(beta) * 2.0 * frame.n as f64).round_ties_even() as i64;
        Self::at_site(frame, r, Variant::Gaussian(side))
    }

    pub fn at_site(frame: &ScalingFrame<T>, r: i64, variant: Variant) -> Result<Self> {
        let (center, scale) = frame.center_scale(r, variant)?;
        Ok(Probe { r, center, scale })
    }

    pub fn apply(&self, h: i64) -> T {
        (lit::<T>(h as f64) - self.center) / self.scale
    }
}

/// Scaled probe values, one row per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble<T> {
    pub seed: u64,
    pub t: usize,
    pub rows: Vec<Vec<T>>,
}

impl<T: Real> Ensemble<T> {
    pub fn column(&self, probe: usize) -> Vec<T> {
        self.rows.iter().map(|row| row[probe]).collect()
    }
}

/// Monte Carlo over independent trials; trial k uses stream (seed, k).
/// `threads = 0` uses the global rayon pool.
pub fn ensemble<T: Real>(
    params: &ModelParams<T>,
    t: usize,
    trials: usize,
    seed: u64,
    probes: &[Probe<T>],
    threads: usize,
) -> Result<Ensemble<T>> {
    params.validate()?;
    if probes.is_empty() {
        return domain("ensemble needs at least one probe");
    }
    let ti = t as i64;
    let rmin = probes.iter().map(|p| p.r).min().unwrap();
    let rmax = probes.iter().map(|p| p.r).max().unwrap();
    if rmin < -ti || rmax > ti {
        return domain(format!("probe sites [{rmin},{rmax}] are outside |r| <= {t}"));
    }
    let run = |k: usize| -> Result<Vec<T>> {
        let stream = NucleationStream::for_trial(seed, k as u64);
        let window = heights_in_window(params, t, &stream, rmin, rmax)?;
        Ok(probes.iter().map(|p| p.apply(window[(p.r - rmin) as usize])).collect())
    };
    let rows: Result<Vec<Vec<T>>> = if threads == 1 {
        (0..trials).map(run).collect()
    } else if threads == 0 {
        (0..trials).into_par_iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| (0..trials).into_par_iter().map(run).collect())
    };
    Ok(Ensemble { seed, t, rows: rows? })
}

pub fn write_snapshot_csv<W: Write>(field: &HeightField, mut out: W) -> std::io::Result<()> {
    writeln!(out, "r,h")?;
    for (r, h) in field.sites() {
        writeln!(out, "{r},{h}")?;
    }
    Ok(())
}

pub fn write_ensemble_csv<T: Real, W: Write>(ens: &Ensemble<T>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "trial,probe_index,value")?;
    for (k, row) in ens.rows.iter().enumerate() {
        for (p, v) in row.iter().enumerate() {
            writeln!(out, "{k},{p},{v}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, gp: f64, gm: f64, modified: bool) -> ModelParams<f64> {
        ModelParams::new(a, gp, gm, modified)
    }

    #[test]
    fn modified_corner_is_zero() {
        let prm = p(0.5, 1.5, 1.5, true);
        for seed in 0..50 {
            assert_eq!(sample_nucleation(1, 1, &prm, &NucleationStream::new(seed)).unwrap(), 0);
        }
    }

    #[test]
    fn unmodified_needs_product_below_one() {
        assert!(p(0.5, 1.5, 1.5, false).validate().is_err());
        assert!(p(0.5, 1.5, 1.5, true).validate().is_ok());
    }

    #[test]
    fn random_access_matches_sweep() {
        let prm = p(0.4, 0.6, 0.7, false);
        let stream = NucleationStream::for_trial(9, 3);
        let t = 9usize;
        let full = simulate_to(&prm, t, &stream).unwrap();
        // rebuild from single-site draws
        let mut h = HeightField::flat();
        for s in 1..=t as i64 {
            let mut next = vec![0i64; (2 * s + 1) as usize];
            for r in -s..=s {
                let mut v = h.get(r - 1).max(h.get(r)).max(h.get(r + 1));
                if (s - r).rem_euclid(2) == 1 {
                    let i = ((s + r + 1) / 2) as u64;
                    let j = ((s - r + 1) / 2) as u64;
                    v += sample_nucleation(i, j, &prm, &stream).unwrap() as i64;
                }
                next[(r + s) as usize] = v;
            }
            h = HeightField { t: s as usize, heights: next };
        }
        assert_eq!(h, full);
    }

    #[test]
    fn window_matches_full_field() {
        let prm = p(0.3, 0.5, 0.5, false);
        let stream = NucleationStream::for_trial(1, 0);
        let full = simulate_to(&prm, 41, &stream).unwrap();
        let w = heights_in_window(&prm, 41, &stream, -5, 7).unwrap();
        for (k, r) in (-5..=7).enumerate() {
            assert_eq!(w[k], full.get(r));
        }
    }

    #[test]
    fn zero_intensity_stays_flat() {
        let f = simulate(&p(0.0, 0.0, 0.0, false), 3, FinalTime::Odd, 1).unwrap();
        assert!(f.heights.iter().all(|&h| h == 0));
    }
}
