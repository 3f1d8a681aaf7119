//! Limit shapes, critical points, scaling constants and the raw/scaled
//! coordinate maps.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::png_model::ModelParams;
use crate::real::{lit, to_f64, Real};

/// Which branch of the limit shape applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    GaussianMinus,
    Bulk,
    GaussianPlus,
}

impl Branch {
    pub fn tag(self) -> &'static str {
        match self {
            Branch::GaussianMinus => "gaussian-",
            Branch::Bulk => "bulk",
            Branch::GaussianPlus => "gaussian+",
        }
    }
}

/// Edge side of a source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Minus,
    Plus,
}

/// a(β) = 2α/(1−α²)·(α + √(1−β²)).
pub fn bulk_shape<T: Real>(alpha: T, beta: T) -> T {
    lit::<T>(2.0) * alpha / (T::one() - alpha * alpha) * (alpha + (T::one() - beta * beta).sqrt())
}

fn gauss_parts<T: Real>(alpha: T, gamma: T) -> (T, T) {
    let den = (gamma - alpha) * (T::one() - alpha * gamma);
    let a0 = alpha * (T::one() - lit::<T>(2.0) * alpha * gamma + gamma * gamma) / den;
    let slope = alpha * (gamma * gamma - T::one()) / den;
    (a0, slope)
}

/// a_{G±}(β,γ): the linear shapes near the sources.
pub fn gaussian_shape<T: Real>(alpha: T, beta: T, gamma: T, side: Side) -> T {
    let (a0, slope) = gauss_parts(alpha, gamma);
    match side {
        Side::Minus => a0 - slope * beta,
        Side::Plus => a0 + slope * beta,
    }
}

fn beta_edge_core<T: Real>(alpha: T, gamma: T) -> T {
    let a2 = alpha * alpha;
    (T::one() - a2) * (gamma * gamma - T::one())
        / (T::one() + a2 - lit::<T>(4.0) * alpha * gamma + gamma * gamma + a2 * gamma * gamma)
}

pub fn beta_minus<T: Real>(alpha: T, gamma_minus: T) -> T {
    beta_edge_core(alpha, gamma_minus)
}

pub fn beta_plus<T: Real>(alpha: T, gamma_plus: T) -> T {
    -beta_edge_core(alpha, gamma_plus)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints<T> {
    pub beta_minus: T,
    pub beta_plus: T,
    /// Crossing of the two linear branches, present when γ₊γ₋ > 1.
    pub beta_c: Option<T>,
}

pub fn critical_points<T: Real>(params: &ModelParams<T>) -> CriticalPoints<T> {
    let a = params.alpha;
    let bm = beta_minus(a, params.gamma_minus);
    let bp = beta_plus(a, params.gamma_plus);
    let beta_c = if params.gamma_plus * params.gamma_minus > T::one() {
        let (am, sm) = gauss_parts(a, params.gamma_minus);
        let (ap, sp) = gauss_parts(a, params.gamma_plus);
        // am − sm β = ap + sp β
        Some((am - ap) / (sm + sp))
    } else {
        None
    };
    CriticalPoints { beta_minus: bm, beta_plus: bp, beta_c }
}

/// Thermodynamic shape lim h(2βN, 2N)/N and the branch it comes from.
pub fn limit_shape<T: Real>(beta: T, params: &ModelParams<T>) -> Result<(T, Branch)> {
    if !(beta.abs() < T::one()) {
        return domain(format!("limit shape needs |β| < 1, got {beta}"));
    }
    let a = params.alpha;
    let cp = critical_points(params);
    let gm = || (gaussian_shape(a, beta, params.gamma_minus, Side::Minus), Branch::GaussianMinus);
    let gp = || (gaussian_shape(a, beta, params.gamma_plus, Side::Plus), Branch::GaussianPlus);
    Ok(match cp.beta_c {
        None => {
            if beta < cp.beta_minus {
                gm()
            } else if beta > cp.beta_plus {
                gp()
            } else {
                (bulk_shape(a, beta), Branch::Bulk)
            }
        }
        Some(bc) => {
            if beta < bc {
                gm()
            } else {
                gp()
            }
        }
    })
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if beta.abs() < T::one() {
        Ok(())
    } else {
        domain(format!("scaling constants need |β| < 1, got {beta}"))
    }
}

fn root_parts<T: Real>(alpha: T, beta: T) -> (T, T) {
    let sp = (T::one() + beta).sqrt();
    let sm = (T::one() - beta).sqrt();
    (sp + alpha * sm, sm + alpha * sp)
}

/// c(β), the transversal scale.
pub fn c_const<T: Real>(alpha: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    let (p, m) = root_parts(alpha, beta);
    let third = lit::<T>(1.0 / 3.0);
    Ok(alpha.powf(-third) * (T::one() - beta * beta).powf(lit(2.0 / 3.0)) * p.powf(third) * m.powf(third))
}

/// d(β), the fluctuation scale in the bulk.
pub fn d_const<T: Real>(alpha: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    let (p, m) = root_parts(alpha, beta);
    let tt = lit::<T>(2.0 / 3.0);
    Ok(alpha.powf(lit(1.0 / 3.0)) / ((T::one() - alpha * alpha) * (T::one() - beta * beta).powf(lit(1.0 / 6.0)))
        * p.powf(tt)
        * m.powf(tt))
}

/// d_G(γ), the fluctuation scale of the Gaussian regions; needs α < γ < 1/α.
pub fn d_gauss<T: Real>(alpha: T, gamma: T) -> Result<T> {
    if !(gamma > alpha && alpha * gamma < T::one()) {
        return domain(format!("d_G needs α < γ < 1/α, got α={alpha}, γ={gamma}"));
    }
    let a2 = alpha * alpha;
    let inner = alpha * gamma * (T::one() + a2 - lit::<T>(4.0) * alpha * gamma + gamma * gamma + a2 * gamma * gamma);
    Ok(inner.sqrt() / ((T::one() - alpha * gamma) * (gamma - alpha)))
}

/// p_c(β), the double critical point of the saddle analysis.
pub fn p_c<T: Real>(alpha: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    let (p, m) = root_parts(alpha, beta);
    Ok(p / m)
}

/// Solves β₋(α, γ₀) = β₀ for γ₀ ∈ (α, 1/α).
pub fn critical_gamma<T: Real>(beta0: T, alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return domain(format!("α must be in (0,1), got {alpha}"));
    }
    if !(beta0.abs() < T::one()) {
        return domain(format!("no admissible γ₀ for β₀ = {beta0}"));
    }
    // β₀[(1+α²)(1+γ²) − 4αγ] = (1−α²)(γ²−1), a quadratic in γ.
    let a2 = alpha * alpha;
    let qa = beta0 * (T::one() + a2) - (T::one() - a2);
    let qb = -lit::<T>(4.0) * alpha * beta0;
    let qc = beta0 * (T::one() + a2) + (T::one() - a2);
    let lo = alpha;
    let hi = T::one() / alpha;
    let mut roots = Vec::new();
    if qa.abs() <= T::epsilon() {
        roots.push(-qc / qb);
    } else {
        let disc = qb * qb - lit::<T>(4.0) * qa * qc;
        if disc < T::zero() {
            return domain("critical_gamma: negative discriminant");
        }
        let sq = disc.sqrt();
        // numerically stable pair
        let q = -(qb + qb.signum() * sq) * lit(0.5);
        if q != T::zero() {
            roots.push(qc / q);
            roots.push(q / qa);
        } else {
            roots.push((-qb + sq) / (lit::<T>(2.0) * qa));
        }
    }
    roots
        .into_iter()
        .filter(|g| *g > lo && *g < hi)
        .min_by(|x, y| (*x - T::one()).abs().partial_cmp(&(*y - T::one()).abs()).unwrap())
        .ok_or_else(|| crate::Error::Domain(format!("no admissible γ₀ for β₀ = {beta0}")))
}

/// Derived constants at one macroscopic position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants<T> {
    pub a: T,
    pub c: T,
    pub d: T,
    pub p_c: T,
    pub a_g_minus: T,
    pub a_g_plus: T,
    pub d_g_minus: Option<T>,
    pub d_g_plus: Option<T>,
}

pub fn scaling_constants<T: Real>(beta0: T, params: &ModelParams<T>) -> Result<ScalingConstants<T>> {
    let a = params.alpha;
    Ok(ScalingConstants {
        a: bulk_shape(a, beta0),
        c: c_const(a, beta0)?,
        d: d_const(a, beta0)?,
        p_c: p_c(a, beta0)?,
        a_g_minus: gaussian_shape(a, beta0, params.gamma_minus, Side::Minus),
        a_g_plus: gaussian_shape(a, beta0, params.gamma_plus, Side::Plus),
        d_g_minus: d_gauss(a, params.gamma_minus).ok(),
        d_g_plus: d_gauss(a, params.gamma_plus).ok(),
    })
}

/// Which scaled variable a raw height is mapped to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// H_N(τ, β₀), τ inferred from r.
    Bulk,
    /// H_N^{(G±)}(β, γ±) at β = r/(2N).
    Gaussian(Side),
}

/// Lattice site nearest to a requested τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSite<T> {
    pub r: i64,
    /// τ of the site actually used.
    pub tau: T,
    /// requested τ minus realised τ.
    pub offset: T,
}

/// N, β₀ and everything derived from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFrame<T> {
    pub n: usize,
    pub beta0: T,
    pub params: ModelParams<T>,
    pub constants: ScalingConstants<T>,
    pub critical: CriticalPoints<T>,
}

impl<T: Real> ScalingFrame<T> {
    pub fn new(params: ModelParams<T>, n: usize, beta0: T) -> Result<Self> {
        params.validate_shape()?;
        if n == 0 {
            return domain("N must be positive");
        }
        let constants = scaling_constants(beta0, &params)?;
        let critical = critical_points(&params);
        Ok(ScalingFrame { n, beta0, params, constants, critical })
    }

    fn nf(&self) -> T {
        lit(self.n as f64)
    }

    /// r = 2β₀N + 2cN^{2/3}τ, rounded half-to-even.
    pub fn site_for_tau(&self, tau: T) -> LatticeSite<T> {
        let n = self.nf();
        let exact = lit::<T>(2.0) * self.beta0 * n + lit::<T>(2.0) * self.constants.c * n.powf(lit(2.0 / 3.0)) * tau;
        let r = to_f64(exact).round_ties_even() as i64;
        let realised = self.tau_of_r(r);
        LatticeSite { r, tau: realised, offset: tau - realised }
    }

    pub fn tau_of_r(&self, r: i64) -> T {
        let n = self.nf();
        (lit::<T>(r as f64) - lit::<T>(2.0) * self.beta0 * n) / (lit::<T>(2.0) * self.constants.c * n.powf(lit(2.0 / 3.0)))
    }

    /// Centering and scale (h − center)/scale of the requested variable at r.
    pub fn center_scale(&self, r: i64, variant: Variant) -> Result<(T, T)> {
        let n = self.nf();
        let a = self.params.alpha;
        match variant {
            Variant::Bulk => {
                let tau = self.tau_of_r(r);
                let beta = self.beta0 + self.constants.c * tau / n.powf(lit(1.0 / 3.0));
                if !(beta.abs() < T::one()) {
                    return domain(format!("site r={r} is outside the bulk map"));
                }
                Ok((bulk_shape(a, beta) * n, self.constants.d * n.powf(lit(1.0 / 3.0))))
            }
            Variant::Gaussian(side) => {
                let beta = lit::<T>(r as f64) / (lit::<T>(2.0) * n);
                let gamma = match side {
                    Side::Minus => self.params.gamma_minus,
                    Side::Plus => self.params.gamma_plus,
                };
                let dg = d_gauss(a, gamma)?;
                Ok((gaussian_shape(a, beta, gamma, side) * n, dg * n.sqrt()))
            }
        }
    }

    pub fn to_scaled(&self, h: i64, r: i64, variant: Variant) -> Result<T> {
        let (center, scale) = self.center_scale(r, variant)?;
        Ok((lit::<T>(h as f64) - center) / scale)
    }

    /// Inverse of `to_scaled` at a given site: the (real) raw height.
    pub fn from_scaled(&self, value: T, r: i64, variant: Variant) -> Result<T> {
        let (center, scale) = self.center_scale(r, variant)?;
        Ok(center + scale * value)
    }
}
