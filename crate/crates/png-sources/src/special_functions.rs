//! Airy function Ai, its derivative, the exponentially weighted Airy
//! integral Φ(x,c) and the transition building block B(x,ω).

use crate::error::{domain, Result};
use crate::quadrature::Rule;
use crate::real::{lit, to_f64, Dd, Real};

/// Ai and Ai′ at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryValue<T> {
    pub x: T,
    pub ai: T,
    pub ai_prime: T,
}

/// Below this |x| the Maclaurin series (in double-word arithmetic) is used.
pub const SERIES_LIMIT: f64 = 8.0;

const AI0_HI: f64 = 0.3550280538878172;
const AI0_LO: f64 = 2.05233632436212e-17;
const MAIP0_HI: f64 = 0.2588194037928068;
const MAIP0_LO: f64 = -2.522243111610832e-17;

pub fn airy<T: Real>(x: T) -> Result<AiryValue<T>> {
    if !x.is_finite() {
        return domain(format!("Airy argument must be finite, got {x}"));
    }
    let (ai, ai_prime) = airy_pair(x);
    Ok(AiryValue { x, ai, ai_prime })
}

pub fn airy_ai<T: Real>(x: T) -> Result<T> {
    airy(x).map(|v| v.ai)
}

pub fn airy_ai_prime<T: Real>(x: T) -> Result<T> {
    airy(x).map(|v| v.ai_prime)
}

/// (Ai(x), Ai′(x)) without input validation; NaN in, NaN out.
pub fn airy_pair<T: Real>(x: T) -> (T, T) {
    if x.is_nan() {
        return (x, x);
    }
    if T::epsilon() > lit(1e-10) {
        // the double-word series cancels past single precision; widen
        let (a, ap) = airy_pair(to_f64(x));
        return (lit(a), lit(ap));
    }
    if x.abs() <= lit(PLAIN_SERIES_LIMIT) {
        airy_series_plain(x)
    } else if x.abs() <= lit(SERIES_LIMIT) {
        airy_series(x)
    } else if x > T::zero() {
        airy_asymptotic_pos(x)
    } else {
        airy_asymptotic_neg(-x)
    }
}

/// Below this |x| the series cancels little enough for plain arithmetic.
pub const PLAIN_SERIES_LIMIT: f64 = 3.0;

pub(crate) fn airy_series_plain<T: Real>(x: T) -> (T, T) {
    let x3 = x * x * x;
    let (mut f, mut tf) = (T::one(), T::one());
    let (mut g, mut tg) = (x, x);
    let mut tfp = x * x * lit(0.5);
    let mut fp = tfp;
    let (mut gp, mut tgp) = (T::one(), T::one());
    for k in 0..60usize {
        let kf = (3 * k) as f64;
        tf = tf * x3 / lit((kf + 2.0) * (kf + 3.0));
        tg = tg * x3 / lit((kf + 3.0) * (kf + 4.0));
        tgp = tgp * x3 / lit((kf + 1.0) * (kf + 3.0));
        if k >= 1 {
            tfp = tfp * x3 / lit(kf * (kf + 2.0));
            fp += tfp;
        }
        f += tf;
        g += tg;
        gp += tgp;
        if tf.abs() + tg.abs() + tgp.abs() + tfp.abs() <= T::epsilon() * lit(1e-3) {
            break;
        }
    }
    let c1 = lit::<T>(AI0_HI);
    let c2 = lit::<T>(MAIP0_HI);
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

/// Maclaurin series Ai = c₁f − c₂g, summed in double-word arithmetic so
/// the cancellation between f and g costs no accuracy for |x| ≤ 8.
pub(crate) fn airy_series<T: Real>(x: T) -> (T, T) {
    let xd = Dd::from(x);
    let x2 = xd.mul(xd);
    let x3 = x2.mul_t(x);
    let tol = T::epsilon() * T::epsilon();

    let mut f = Dd::from(T::one());
    let mut tf = Dd::from(T::one());
    let mut g = xd;
    let mut tg = xd;
    let mut fp = Dd::from(T::zero());
    let mut tfp = x2.mul_t(lit(0.5));
    let mut gp = Dd::from(T::one());
    let mut tgp = Dd::from(T::one());
    fp = fp.add(tfp);

    for k in 0..200usize {
        let kf = (3 * k) as f64;
        tf = tf.mul(x3).div_t(lit((kf + 2.0) * (kf + 3.0)));
        tg = tg.mul(x3).div_t(lit((kf + 3.0) * (kf + 4.0)));
        tgp = tgp.mul(x3).div_t(lit((kf + 1.0) * (kf + 3.0)));
        f = f.add(tf);
        g = g.add(tg);
        gp = gp.add(tgp);
        if k >= 1 {
            tfp = tfp.mul(x3).div_t(lit(kf * (kf + 2.0)));
            fp = fp.add(tfp);
        }
        let small = tf.hi.abs() <= tol * f.hi.abs()
            && tg.hi.abs() <= tol * g.hi.abs().max(T::min_positive_value())
            && tgp.hi.abs() <= tol * gp.hi.abs()
            && tfp.hi.abs() <= tol * fp.hi.abs().max(T::min_positive_value());
        if small && k >= 2 {
            break;
        }
    }
    let c1 = Dd::new(lit::<T>(AI0_HI), lit(AI0_LO));
    let c2 = Dd::new(lit::<T>(MAIP0_HI), lit(MAIP0_LO));
    let ai = c1.mul(f).sub(c2.mul(g));
    let aip = c1.mul(fp).sub(c2.mul(gp));
    (ai.value(), aip.value())
}

/// Coefficients u_k, v_k of the Airy asymptotic series.
fn asymptotic_coeffs<T: Real>(kmax: usize) -> (Vec<T>, Vec<T>) {
    let mut u = Vec::with_capacity(kmax + 1);
    let mut v = Vec::with_capacity(kmax + 1);
    let mut uk = 1.0f64;
    u.push(lit(1.0));
    v.push(lit(1.0));
    for k in 1..=kmax {
        let kf = k as f64;
        uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(lit(uk));
        v.push(lit(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk));
    }
    (u, v)
}

const ASYM_TERMS: usize = 40;

/// Sums Σ (−1)^k c_k ζ^{−k} for, stopping at the smallest term or at
/// machine precision. `stride`/`offset` select even or odd k.
fn alternating_sum<T: Real>(c: &[T], zeta: T, offset: usize, stride: usize) -> T {
    let mut sum = T::zero();
    let mut last = T::infinity();
    let mut sign = T::one();
    let mut k = offset;
    while k < c.len() {
        let term = c[k] / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += sign * term;
        if term.abs() <= T::epsilon() * sum.abs() * lit(0.01) {
            break;
        }
        last = term.abs();
        sign = -sign;
        k += stride;
    }
    sum
}

fn airy_asymptotic_pos<T: Real>(x: T) -> (T, T) {
    let (u, v) = asymptotic_coeffs::<T>(ASYM_TERMS);
    let sx = x.sqrt();
    let zeta = lit::<T>(2.0 / 3.0) * x * sx;
    let q = x.sqrt().sqrt();
    let pref = (-zeta).exp() / (lit::<T>(2.0) * T::PI().sqrt());
    let su = alternating_sum(&u, zeta, 0, 1);
    let sv = alternating_sum(&v, zeta, 0, 1);
    (pref / q * su, -pref * q * sv)
}

fn airy_asymptotic_neg<T: Real>(z: T) -> (T, T) {
    let (u, v) = asymptotic_coeffs::<T>(ASYM_TERMS);
    let zeta = lit::<T>(2.0 / 3.0) * z * z.sqrt();
    let q = z.sqrt().sqrt();
    let theta = zeta - T::FRAC_PI_4();
    let (s, c) = theta.sin_cos();
    let ue = alternating_sum(&u, zeta, 0, 2);
    let uo = alternating_sum(&u, zeta, 1, 2);
    let ve = alternating_sum(&v, zeta, 0, 2);
    let vo = alternating_sum(&v, zeta, 1, 2);
    let rp = T::one() / T::PI().sqrt();
    let ai = rp / q * (c * ue + s * uo);
    let aip = rp * q * (s * ve - c * vo);
    (ai, aip)
}

/// Growth rate and cutoff bookkeeping for Φ(x,c): the integrand is
/// negligible once (2/3)t^{3/2} − ωt + ω³/3 exceeds 40, ω = max(−c, 0).
fn airy_tail_cut<T: Real>(c: T) -> T {
    let w = (-c).max(T::zero());
    let g = |t: T| lit::<T>(2.0 / 3.0) * t * t.sqrt() - w * t + w * w * w / lit(3.0);
    let mut t = (w * w).max(T::zero());
    let mut step = lit::<T>(1.0);
    while g(t) < lit(40.0) {
        t += step;
        step = step * lit(1.25);
    }
    t
}

/// Upper λ cutoff of the semi-infinite Airy integrals.
pub const LAMBDA_CUTOFF: f64 = 40.0;

/// Φ(x,c) = ∫₀^∞ e^{−cλ} Ai(x+λ) dλ by composite Gauss-Legendre on
/// [0, min(40, t_cut − x)], panels of unit width.
pub fn airy_exp_integral<T: Real>(x: T, c: T) -> Result<T> {
    if !x.is_finite() || !c.is_finite() {
        return domain("airy_exp_integral needs finite arguments");
    }
    Ok(airy_exp_integral_unchecked(x, c))
}

pub(crate) fn airy_exp_integral_unchecked<T: Real>(x: T, c: T) -> T {
    let lmax = (airy_tail_cut(c) - x).min(lit(LAMBDA_CUTOFF));
    if lmax <= T::zero() {
        return T::zero();
    }
    let panels = to_usize(lmax.ceil()).max(1);
    let rule = Rule::composite(12, panels, T::zero(), lmax);
    rule.integrate(|l| (-c * l).exp() * airy_pair(x + l).0)
}

/// Φ(x,c) through the 80-node mapped rule λ = u/(1−u) on [0, 40]; kept as
/// an independent second scheme.
pub fn airy_exp_integral_mapped<T: Real>(x: T, c: T) -> T {
    let rule = Rule::mapped_half_line(80, lit(LAMBDA_CUTOFF));
    rule.integrate(|l| (-c * l).exp() * airy_pair(x + l).0)
}

/// Above this exponent ω³/3 − xω the unified formula would cancel too
/// many digits and printed branch ∫₀^∞ e^{−ωλ}Ai(x−λ)dλ is integrated
/// directly.
const CANCEL_EXPONENT: f64 = 9.0;

/// B(x,ω) = e^{ω³/3 − xω} − Φ(x,−ω).
pub fn b_transition<T: Real>(x: T, omega: T) -> Result<T> {
    if !x.is_finite() || !omega.is_finite() {
        return domain("b_transition needs finite arguments");
    }
    Ok(b_transition_unchecked(x, omega))
}

pub(crate) fn b_transition_unchecked<T: Real>(x: T, omega: T) -> T {
    let e = omega * omega * omega / lit(3.0) - x * omega;
    if omega > T::zero() && e > lit(CANCEL_EXPONENT) {
        b_positive_branch(x, omega)
    } else {
        e.exp() - airy_exp_integral_unchecked(x, -omega)
    }
}

/// Direct quadrature of ∫₀^∞ e^{−ωλ} Ai(x−λ) dλ, ω > 0. Panels are sized
/// to the local Airy wavelength.
pub fn b_positive_branch<T: Real>(x: T, omega: T) -> T {
    assert!(omega > T::zero());
    let mut lmax = lit::<T>(37.0) / omega;
    // on the decaying side nothing beyond the Airy tail contributes
    let left_edge = x - lit(airy_tail_cut(T::zero()).to_f64().unwrap());
    if left_edge > T::zero() {
        lmax = lmax.max(left_edge);
    }
    let tmin = (x - lmax).min(T::zero()).abs();
    let width = T::one().min(lit::<T>(2.0) / (tmin + T::one()).sqrt());
    let panels = to_usize((lmax / width).ceil()).max(1);
    let rule = Rule::composite(12, panels, T::zero(), lmax);
    rule.integrate(|l| (-omega * l).exp() * airy_pair(x - l).0)
}

fn to_usize<T: Real>(v: T) -> usize {
    v.to_usize().unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an arbitrary-precision evaluator.
    const REF: &[(f64, f64, f64)] = &[
        (-20.0, -0.17640612707798468959, 0.8928628567364712384),
        (-15.0, 0.27821749087082892953, 0.27237420430864202083),
        (-10.0, 0.040241238486443190689, 0.9962650441327900559),
        (-8.5, -0.33029023763020887902, -0.032313348284639135873),
        (-8.0, -0.052705050356386202622, 0.93556093819830655103),
        (-7.5, 0.32177571638064787527, 0.31880950669855459621),
        (-5.0, 0.35076100902411431979, 0.32719281855444313679),
        (-2.0, 0.22740742820168557599, 0.61825902074169104141),
        (-1.0, 0.5355608832923521188, -0.010160567116645209395),
        (0.5, 0.23169360648083348977, -0.22491053266468389314),
        (1.0, 0.13529241631288141552, -0.15914744129679321279),
        (3.0, 0.0065911393574607191443, -0.011912976705951318474),
        (5.0, 0.00010834442813607441735, -0.000247413890868462476),
        (7.5, 1.9172560675134307516e-7, -5.3127139597205446848e-7),
        (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
        (8.5, 1.0997009755195506509e-8, -3.2377254404476022559e-8),
        (12.0, 1.393184688875360839e-13, -4.854736554985308463e-13),
        (20.0, 1.6916728686705403136e-27, -7.5863916257483549605e-27),
    ];

    #[test]
    fn matches_reference_table() {
        for &(x, ai, aip) in REF {
            let v = airy(x).unwrap();
            assert!((v.ai - ai).abs() <= 1e-12, "Ai({x}) = {} vs {ai}", v.ai);
            assert!((v.ai_prime - aip).abs() <= 1e-12, "Ai'({x}) = {} vs {aip}", v.ai_prime);
        }
    }

    #[test]
    fn series_and_asymptotics_agree_in_overlap() {
        for i in 0..=40 {
            let x = 7.0 + 0.05 * i as f64;
            for s in [x, -x] {
                let a = airy_series(s);
                let b = if s > 0.0 { airy_asymptotic_pos(s) } else { airy_asymptotic_neg(-s) };
                assert!((a.0 - b.0).abs() < 1e-12, "x={s}: {} {}", a.0, b.0);
                assert!((a.1 - b.1).abs() < 1e-12, "x={s}: {} {}", a.1, b.1);
            }
        }
    }

    #[test]
    fn plain_and_double_word_series_agree() {
        for i in 0..=60 {
            let x = -3.0 + 0.1 * i as f64;
            let a = airy_series_plain(x);
            let b = airy_series(x);
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        assert!(airy(f64::NAN).is_err());
        assert!(airy(f64::INFINITY).is_err());
        assert!(airy_exp_integral(0.0, f64::NAN).is_err());
    }

    #[test]
    fn single_precision_is_usable() {
        let v = airy(1.0f32).unwrap();
        assert!((v.ai - 0.135_292_42).abs() < 1e-6);
    }

    #[test]
    fn exp_integral_zero_is_one_third() {
        assert!((airy_exp_integral(0.0f64, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn b_branches_agree() {
        for x in [-5.0f64, -2.0, 0.0, 1.5, 5.0] {
            for w in [0.1f64, 0.5, 1.0, 2.0, 3.0] {
                let e = w * w * w / 3.0 - x * w;
                let unified = e.exp() - airy_exp_integral_unchecked(x, -w);
                let direct = b_positive_branch(x, w);
                assert!((unified - direct).abs() < 1e-7 * (1.0 + e.exp() * 1e-4), "x={x} w={w}: {unified} {direct}");
            }
        }
    }
}
