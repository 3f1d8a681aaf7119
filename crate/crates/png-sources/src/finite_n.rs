//! Exact finite-N height distribution at the odd time M = 2N − 1 from the
//! double contour integral kernel and a lattice Fredholm determinant.
//!
//! Convention: values are P[h(r_j, M) ≤ l_j for all j]; the exceedance set of
//! point j is {l_j + 1, …, l_j + X_max}.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{det, Matrix};
use crate::png_model::ModelParams;
use crate::real::{lit, to_f64, Real};

/// Circles |z₁| = R₁, |z₂| = R₂ with `nodes` trapezoid points each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig<T> {
    pub r1: T,
    pub r2: T,
    pub nodes: usize,
}

impl<T: Real> Default for ContourConfig<T> {
    fn default() -> Self {
        ContourConfig { r1: lit(1.25), r2: lit(0.8), nodes: 256 }
    }
}

/// Minimal gap between a contour and a singularity.
const POLE_GAP: f64 = 1e-3;

/// The Cauchy matrix is nodes² complex entries.
const MAX_CONTOUR_NODES: usize = 2048;

impl<T: Real> ContourConfig<T> {
    /// The z₂ circle must enclose α and γ₋, the z₁ circle must enclose the z₂
    /// circle and stay inside 1/α and 1/γ₊.
    pub fn validate(&self, params: &ModelParams<T>) -> Result<()> {
        let gap = lit::<T>(POLE_GAP);
        let inner = params.alpha.max(params.gamma_minus);
        let outer_limit = T::one() / params.alpha.max(params.gamma_plus).max(lit(1e-300));
        if self.nodes < 8 {
            return Err(Error::Config(format!("contour nodes must be at least 8, got {}", self.nodes)));
        }
        if !(self.r2 > inner + gap && self.r1 > self.r2 && self.r1 < outer_limit - gap) {
            return Err(Error::Config(format!(
                "contour radii need max(α, γ₋) < R₂ < R₁ < 1/max(α, γ₊); got R₂ = {}, R₁ = {}",
                self.r2, self.r1
            )));
        }
        Ok(())
    }

    /// Radii in geometric progression between the pole rings ρ = max(α, γ₋)
    /// and P = 1/max(α, γ₊), so the three aliasing ratios ρ/R₂, R₂/R₁, R₁/P
    /// all equal (ρ/P)^{1/3}. Nodes are sized for that ratio with poles of
    /// order up to 2N, never below the default 256.
    pub fn for_params(params: &ModelParams<T>, n: usize) -> Result<Self> {
        let inner = to_f64(params.alpha.max(params.gamma_minus)).max(1e-300);
        let outer = 1.0 / to_f64(params.alpha.max(params.gamma_plus)).max(1e-300);
        if !(outer > inner) {
            return Err(Error::Config(format!("no annulus between the poles: max(α, γ₋) = {inner}, 1/max(α, γ₊) = {outer}")));
        }
        let step = (outer / inner).ln() / 3.0;
        let order = 2.0 * n as f64 + 2.0;
        let mut nodes = Self::default().nodes;
        while (nodes as f64) * step < 40.0 + order * ((nodes as f64) + order).ln() {
            if nodes >= MAX_CONTOUR_NODES {
                return Err(Error::Numeric(format!(
                    "poles too close for the contour rule: ratio {:.4} needs more than {MAX_CONTOUR_NODES} nodes",
                    (-step).exp()
                )));
            }
            nodes = (nodes * 2).min(MAX_CONTOUR_NODES);
        }
        let cfg = ContourConfig {
            r2: lit(inner * step.exp()),
            r1: lit(inner * (2.0 * step).exp()),
            nodes,
        };
        cfg.validate(params)?;
        Ok(cfg)
    }
}

/// Number of exceedance levels kept above each l_j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub x_max: usize,
}

impl Default for LatticeWindow {
    fn default() -> Self {
        LatticeWindow { x_max: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteValue<T> {
    pub value: T,
    /// Largest neglected diagonal kernel entry times the window size.
    pub truncation_bound: T,
    /// Largest imaginary part seen in the assembled kernel.
    pub imag_residue: T,
}

type C<T> = Complex<T>;

fn circle<T: Real>(r: T, n: usize) -> Vec<C<T>> {
    (0..n)
        .map(|k| C::from_polar(r, T::TAU() * lit(k as f64) / lit(n as f64)))
        .collect()
}

/// Contour sums for one (N, params, config), reusable across points.
pub struct KernelCache<T> {
    n: i64,
    params: ModelParams<T>,
    z1: Vec<C<T>>,
    z2: Vec<C<T>>,
    /// z₁/(z₁ − z₂), row-major over (j, k).
    cauchy: Vec<C<T>>,
}

impl<T: Real> KernelCache<T> {
    pub fn new(params: &ModelParams<T>, n: usize, cfg: &ContourConfig<T>) -> Result<Self> {
        cfg.validate(params)?;
        if n == 0 {
            return domain("N must be positive");
        }
        let z1 = circle(cfg.r1, cfg.nodes);
        let z2 = circle(cfg.r2, cfg.nodes);
        let mut cauchy = Vec::with_capacity(cfg.nodes * cfg.nodes);
        for &a in &z1 {
            for &b in &z2 {
                cauchy.push(a / (a - b));
            }
        }
        Ok(KernelCache { n: n as i64, params: *params, z1, z2, cauchy })
    }

    fn check_u(&self, u: i64) -> Result<()> {
        if u.abs() >= self.n {
            return domain(format!("|u| = {} must be below N = {}", u.abs(), self.n));
        }
        Ok(())
    }

    fn f1(&self, z: C<T>, u: i64) -> C<T> {
        let one = C::new(T::one(), T::zero());
        let p = &self.params;
        let (a, gp, gm) = (p.alpha, p.gamma_plus, p.gamma_minus);
        (one - C::from(a) / z).powi((self.n - 1 + u) as i32) / (one - z * a).powi((self.n - 1 - u) as i32)
            * (one - C::from(gm) / z)
            / (one - z * gp)
    }

    fn f2(&self, z: C<T>, u: i64) -> C<T> {
        let one = C::new(T::one(), T::zero());
        let p = &self.params;
        let (a, gp, gm) = (p.alpha, p.gamma_plus, p.gamma_minus);
        (one - z * a).powi((self.n - 1 - u) as i32) / (one - C::from(a) / z).powi((self.n - 1 + u) as i32)
            * (one - z * gp)
            / (one - C::from(gm) / z)
    }

    /// K̃ block for rows x₁ ∈ `xs1` at u₁ and columns x₂ ∈ `xs2` at u₂.
    pub fn ktilde_block(&self, u1: i64, xs1: &[i64], u2: i64, xs2: &[i64]) -> Result<Vec<Vec<C<T>>>> {
        self.check_u(u1)?;
        self.check_u(u2)?;
        let m = self.z1.len();
        let pre = (T::one() - self.params.alpha).powi((2 * (u2 - u1)) as i32);
        let scale = C::from(pre / lit((m * m) as f64));
        let g1: Vec<C<T>> = self.z1.iter().map(|&z| self.f1(z, u1)).collect();
        let g2: Vec<C<T>> = self.z2.iter().map(|&z| self.f2(z, u2)).collect();
        let mut rows = Vec::with_capacity(xs1.len());
        for &x1 in xs1 {
            let a: Vec<C<T>> = self.z1.iter().zip(&g1).map(|(&z, &g)| z.powi(-x1 as i32) * g).collect();
            let mut p = vec![C::new(T::zero(), T::zero()); m];
            for (j, &aj) in a.iter().enumerate() {
                let row = &self.cauchy[j * m..(j + 1) * m];
                for (pk, &c) in p.iter_mut().zip(row) {
                    *pk += aj * c;
                }
            }
            let out = xs2
                .iter()
                .map(|&x2| {
                    let mut acc = C::new(T::zero(), T::zero());
                    for ((&pk, &z), &g) in p.iter().zip(&self.z2).zip(&g2) {
                        acc += pk * z.powi(x2 as i32) * g;
                    }
                    acc * scale
                })
                .collect();
            rows.push(out);
        }
        Ok(rows)
    }
}

/// K̃_N(2u₁, x₁; 2u₂, x₂) as a complex number; the imaginary part is
/// quadrature residue.
pub fn ktilde<T: Real>(u1: i64, x1: i64, u2: i64, x2: i64, params: &ModelParams<T>, n: usize, cfg: &ContourConfig<T>) -> Result<C<T>> {
    let cache = KernelCache::new(params, n, cfg)?;
    Ok(cache.ktilde_block(u1, &[x1], u2, &[x2])?[0][0])
}

/// φ_{2u₁,2u₂}(x₁, x₂): the (x₂ − x₁) coefficient of
/// [(1−α)²/((1−αz)(1−α/z))]^{u₂−u₁}, i.e. u₂ − u₁ steps of one up and one
/// down geometric jump; 0 unless u₂ > u₁. Trapezoid rule on the unit circle
/// with enough nodes that aliased coefficients fall below 1e-17.
pub fn phi<T: Real>(u1: i64, x1: i64, u2: i64, x2: i64, params: &ModelParams<T>) -> C<T> {
    if u2 <= u1 {
        return C::new(T::zero(), T::zero());
    }
    let d = u2 - u1;
    let a = params.alpha;
    let dx = (x2 - x1).abs();
    let decay = -to_f64(a).ln();
    let extra = if decay.is_finite() && decay > 0.0 {
        ((40.0 + d as f64 * ((dx + d + 2) as f64).ln()) / decay).ceil() as i64
    } else {
        0
    };
    let m = (2 * (dx + d) + 16 + extra).min(1 << 16) as usize;
    let one = C::new(T::one(), T::zero());
    let mut acc = C::new(T::zero(), T::zero());
    for z in circle(T::one(), m) {
        acc += z.powi((x2 - x1) as i32) / ((one - z * a) * (one - C::from(a) / z)).powi(d as i32);
    }
    acc * ((T::one() - a).powi((2 * d) as i32) / lit::<T>(m as f64))
}

fn check_regime<T: Real>(params: &ModelParams<T>) -> Result<()> {
    if !(params.gamma_plus * params.gamma_minus < T::one()) {
        return Err(Error::Unsupported(
            "finite-N determinant needs γ₊γ₋ < 1".into(),
        ));
    }
    Ok(())
}

fn u_of_r(r: i64) -> Result<i64> {
    if r % 2 != 0 {
        return domain(format!("r = {r} must be even at odd time"));
    }
    Ok(r / 2)
}

/// P[h(r_j, 2N−1) ≤ l_j for all j] for the model with the corner weight
/// (the `modified` flag is ignored; see `modified_cdf`).
pub fn finite_cdf<T: Real>(
    params: &ModelParams<T>,
    n: usize,
    points: &[(i64, i64)],
    window: LatticeWindow,
    cfg: &ContourConfig<T>,
) -> Result<FiniteValue<T>> {
    check_regime(params)?;
    if points.is_empty() {
        return domain("at least one point is needed");
    }
    if window.x_max == 0 {
        return Err(Error::Config("window size must be positive".into()));
    }
    let cache = KernelCache::new(params, n, cfg)?;
    let us: Vec<i64> = points.iter().map(|&(r, _)| u_of_r(r)).collect::<Result<_>>()?;
    let xs: Vec<Vec<i64>> = points
        .iter()
        .map(|&(_, l)| (1..=window.x_max as i64).map(|k| l + k).collect())
        .collect();
    let dim = window.x_max * points.len();
    let mut m = Matrix::<T>::identity(dim);
    let mut imag = T::zero();
    for (i, (&u1, xs1)) in us.iter().zip(&xs).enumerate() {
        for (j, (&u2, xs2)) in us.iter().zip(&xs).enumerate() {
            let block = cache.ktilde_block(u1, xs1, u2, xs2)?;
            for (a, &x1) in xs1.iter().enumerate() {
                for (b, &x2) in xs2.iter().enumerate() {
                    let k = block[a][b] - phi(u1, x1, u2, x2, params);
                    imag = imag.max(k.im.abs());
                    let row = i * window.x_max + a;
                    let col = j * window.x_max + b;
                    m.set(row, col, m.get(row, col) - k.re);
                }
            }
        }
    }
    let mut bound = T::zero();
    for (&u, &(_, l)) in us.iter().zip(points) {
        let x = l + window.x_max as i64 + 1;
        let diag = cache.ktilde_block(u, &[x], u, &[x])?[0][0].re.abs();
        bound = bound.max(diag * lit(window.x_max as f64));
    }
    let value = det(&m)?;
    Ok(FiniteValue { value, truncation_bound: bound, imag_residue: imag })
}

/// Same probability for the model without the corner weight:
/// [P⁺(l) − pP⁺(l − 1)]/(1 − p) with p = γ₊γ₋ and every l_j shifted.
pub fn modified_cdf<T: Real>(
    params: &ModelParams<T>,
    n: usize,
    points: &[(i64, i64)],
    window: LatticeWindow,
    cfg: &ContourConfig<T>,
) -> Result<FiniteValue<T>> {
    let p = params.gamma_plus * params.gamma_minus;
    let top = finite_cdf(params, n, points, window, cfg)?;
    let shifted: Vec<(i64, i64)> = points.iter().map(|&(r, l)| (r, l - 1)).collect();
    let low = finite_cdf(params, n, &shifted, window, cfg)?;
    Ok(FiniteValue {
        value: (top.value - p * low.value) / (T::one() - p),
        truncation_bound: top.truncation_bound.max(low.truncation_bound),
        imag_residue: top.imag_residue.max(low.imag_residue),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams<f64> {
        ModelParams::new(0.3, 0.4, 0.4, false)
    }

    #[test]
    fn phi_one_step_is_two_sided_geometric() {
        let p = params();
        let a: f64 = 0.3;
        let c = (1.0 - a) / (1.0 + a);
        assert!((phi(0, 3, 1, 3, &p).re - c).abs() < 1e-14);
        assert!((phi(0, 3, 1, 4, &p).re - c * a).abs() < 1e-14);
        assert!((phi(0, 3, 1, 0, &p).re - c * a * a * a).abs() < 1e-14);
        assert_eq!(phi(1, 3, 1, 3, &p).re, 0.0);
    }

    #[test]
    fn bad_radii_rejected() {
        let cfg = ContourConfig { r1: 0.7, r2: 0.8, nodes: 64 };
        assert!(matches!(cfg.validate(&params()), Err(Error::Config(_))));
    }
}
