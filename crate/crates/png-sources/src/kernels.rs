//! Limiting kernels K(τ₁,ξ₁;τ₂,ξ₂).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::Rule;
use crate::real::{lit, Real};
use crate::special_functions::{airy_exp_integral_unchecked, airy_pair, b_transition_unchecked};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec<T> {
    ExtendedAiry,
    Goe2Transition { omega: T },
    F0Transition { omega_plus: T, omega_minus: T },
    /// Time labels are positions β < β₋.
    Brownian { beta_minus: T },
}

impl<T: Real> KernelSpec<T> {
    pub fn eval(&self, t1: T, x1: T, t2: T, x2: T) -> Result<T> {
        Ok(match *self {
            KernelSpec::ExtendedAiry => extended_airy(t1, x1, t2, x2),
            KernelSpec::Goe2Transition { omega } => goe2_transition(t1, x1, t2, x2, omega),
            KernelSpec::F0Transition { omega_plus, omega_minus } => f0_transition(t1, x1, t2, x2, omega_plus, omega_minus),
            KernelSpec::Brownian { beta_minus } => brownian_kernel(t1, x1, t2, x2, beta_minus)?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::ExtendedAiry => "airy",
            KernelSpec::Goe2Transition { .. } => "goe2",
            KernelSpec::F0Transition { .. } => "f0",
            KernelSpec::Brownian { .. } => "brownian",
        }
    }
}

/// Equal-time Airy kernel.
pub fn airy_kernel<T: Real>(x: T, y: T) -> T {
    airy_kernel_from(x, airy_pair(x), y, airy_pair(y))
}

fn airy_kernel_from<T: Real>(x: T, (ax, dx): (T, T), y: T, (ay, dy): (T, T)) -> T {
    if x == y {
        return dx * dx - x * ax * ax;
    }
    if (x - y).abs() < lit(1e-6) {
        let m = (x + y) * lit(0.5);
        let (am, dm) = airy_pair(m);
        return dm * dm - m * am * am;
    }
    (ax * dy - dx * ay) / (x - y)
}

/// ∫_ℝ e^{cλ} Ai(x+λ) Ai(y+λ) dλ for c > 0.
pub fn airy_heat<T: Real>(x: T, y: T, c: T) -> T {
    let d = x - y;
    (c * c * c / lit(12.0) - c * (x + y) * lit(0.5) - d * d / (lit::<T>(4.0) * c)).exp()
        / (lit::<T>(4.0) * T::PI() * c).sqrt()
}

/// Upper end of [0, Λ] beyond which e^{cλ}Ai(x+λ)Ai(y+λ) is negligible.
fn product_cutoff<T: Real>(xmin: T, c: T) -> T {
    let mut lam = (lit::<T>(4.0) - xmin).max(T::zero());
    let two3 = lit::<T>(2.0 / 3.0);
    loop {
        let z = xmin + lam;
        if z > T::zero() && c * lam - lit::<T>(2.0) * two3 * z * z.sqrt() < lit(-42.0) {
            return lam;
        }
        lam += T::one();
    }
}

fn product_rule<T: Real>(xmin: T, c: T) -> Rule<T> {
    let cut = product_cutoff(xmin, c);
    let panels = cut.ceil().to_usize().unwrap_or(1).max(1);
    Rule::composite(12, panels, T::zero(), cut)
}

/// Block of K₂(τ₁, xs; τ₂, ys). Airy values along the λ-rule are shared by
/// all entries, so this is much cheaper than pointwise evaluation.
pub fn extended_airy_block<T: Real>(t1: T, xs: &[T], t2: T, ys: &[T]) -> Vec<Vec<T>> {
    if t1 == t2 {
        let px: Vec<(T, T)> = xs.iter().map(|&x| airy_pair(x)).collect();
        let py: Vec<(T, T)> = ys.iter().map(|&y| airy_pair(y)).collect();
        return xs
            .iter()
            .zip(&px)
            .map(|(&x, &ax)| ys.iter().zip(&py).map(|(&y, &ay)| airy_kernel_from(x, ax, y, ay)).collect())
            .collect();
    }
    let c = t2 - t1;
    let xmin = xs.iter().chain(ys.iter()).fold(T::infinity(), |m, &v| m.min(v));
    let rule = product_rule(xmin, c);
    let half = c * lit(0.5);
    let tab = |pts: &[T]| -> Vec<Vec<T>> {
        pts.iter()
            .map(|&p| {
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&l, &w)| w.sqrt() * (half * l).exp() * airy_pair(p + l).0)
                    .collect()
            })
            .collect()
    };
    let ax = tab(xs);
    let ay = tab(ys);
    xs.iter()
        .zip(&ax)
        .map(|(&x, rx)| {
            ys.iter()
                .zip(&ay)
                .map(|(&y, ry)| {
                    let v: T = rx.iter().zip(ry).map(|(&a, &b)| a * b).sum();
                    if t1 > t2 {
                        v
                    } else {
                        v - airy_heat(x, y, c)
                    }
                })
                .collect()
        })
        .collect()
}

/// Extended Airy kernel K₂(τ₁,ξ₁;τ₂,ξ₂).
///
/// For τ₁ < τ₂ the integral over (−∞,0] is rewritten as the (0,∞) integral
/// minus the closed-form full-line integral.
pub fn extended_airy<T: Real>(t1: T, x1: T, t2: T, x2: T) -> T {
    extended_airy_block(t1, &[x1], t2, &[x2])[0][0]
}

/// Direct quadrature of the printed (−∞, 0] branch, for cross-checks.
pub fn extended_airy_negative_branch<T: Real>(t1: T, x1: T, t2: T, x2: T) -> T {
    let c = t2 - t1;
    let lmin = (lit::<T>(45.0) / c).max(lit(10.0));
    let panels = (lmin.to_f64().unwrap() * 2.0).ceil() as usize;
    let r = Rule::composite(12, panels, -lmin, T::zero());
    -r.integrate(|l| (c * l).exp() * airy_pair(x1 + l).0 * airy_pair(x2 + l).0)
}

/// The two-branch function ∫₀^∞ e^{−σλ}Ai(ξ−λ) (σ ≥ 0) or
/// −∫₀^∞ e^{σλ}Ai(ξ+λ) + e^{E − ξσ} (σ < 0), with the exponent constant E
/// supplied by the caller for the negative branch.
fn two_branch<T: Real>(xi: T, sigma: T, neg_const: T) -> T {
    if sigma >= T::zero() {
        b_transition_unchecked(xi, sigma)
    } else {
        -airy_exp_integral_unchecked(xi, -sigma) + (neg_const - xi * sigma).exp()
    }
}

/// Separable factor of the GOE² transition kernel, as a function of ξ₂.
pub fn goe2_factor<T: Real>(t2: T, x2: T, omega: T) -> T {
    let three = lit::<T>(3.0);
    two_branch(x2, omega + t2, (t2 * t2 * t2 + omega * omega * omega) / three)
}

pub fn goe2_transition<T: Real>(t1: T, x1: T, t2: T, x2: T, omega: T) -> T {
    extended_airy(t1, x1, t2, x2) + airy_pair(x1).0 * goe2_factor(t2, x2, omega)
}

/// 𝓑(ω₊, τ₁, ξ₁).
pub fn f0_left<T: Real>(omega_plus: T, t1: T, x1: T) -> T {
    let three = lit::<T>(3.0);
    two_branch(x1, omega_plus - t1, (omega_plus.powi(3) - t1.powi(3)) / three)
}

/// 𝓑′(ω₋, τ₂, ξ₂).
pub fn f0_right<T: Real>(omega_minus: T, t2: T, x2: T) -> T {
    let three = lit::<T>(3.0);
    two_branch(x2, omega_minus + t2, (t2.powi(3) + omega_minus.powi(3)) / three)
}

pub fn f0_transition<T: Real>(t1: T, x1: T, t2: T, x2: T, omega_plus: T, omega_minus: T) -> T {
    extended_airy(t1, x1, t2, x2)
        + (omega_plus + omega_minus) * f0_left(omega_plus, t1, x1) * f0_right(omega_minus, t2, x2)
}

pub fn gaussian_density<T: Real>(x: T, var: T) -> T {
    (-x * x / (lit::<T>(2.0) * var)).exp() / (lit::<T>(2.0) * T::PI() * var).sqrt()
}

/// Edge kernel K_{G−}(β₁,ξ₁;β₂,ξ₂) for β₁, β₂ < β₋.
pub fn brownian_kernel<T: Real>(b1: T, x1: T, b2: T, x2: T, beta_minus: T) -> Result<T> {
    if !(b1 < beta_minus && b2 < beta_minus) {
        return domain(format!("Brownian kernel needs β₁, β₂ < β₋ = {beta_minus}, got {b1}, {b2}"));
    }
    let mut v = gaussian_density(x1, beta_minus - b1);
    if b1 < b2 {
        v -= gaussian_density(x2 - x1, b2 - b1);
    }
    Ok(v)
}
