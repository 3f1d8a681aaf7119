use approx::assert_abs_diff_eq;
use png_sources::quadrature::Rule;
use png_sources::special_functions as sf;
use png_sources::Result;

fn airy_ai(x: f64) -> Result<f64> {
    sf::airy_ai(x)
}
fn airy_ai_prime(x: f64) -> Result<f64> {
    sf::airy_ai_prime(x)
}
fn airy_exp_integral(x: f64, c: f64) -> Result<f64> {
    sf::airy_exp_integral(x, c)
}
fn b_transition(x: f64, w: f64) -> Result<f64> {
    sf::b_transition(x, w)
}
use sf::{airy_exp_integral_mapped, b_positive_branch};

// 30-digit values, computed once with an arbitrary-precision library.
const AI_0: f64 = 0.355028053887817239;
const AIP_0: f64 = -0.258819403792806798;
const PHI_0_1: f64 = 0.182415972881856755;
const PHI_M10_0: f64 = 1.099031736467546251;
const B_0_HALF: f64 = 0.515998884849035245;
const B_M2_1P5: f64 = -0.048336043290803646;
const B_3_M1: f64 = 14.389638287445570494;

fn maclaurin_ai(x: f64) -> f64 {
    // Ai = c1 f − c2 g with the two power series of the Airy equation
    let c1 = AI_0;
    let c2 = -AIP_0;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    let x3 = x * x * x;
    for k in 1..60 {
        let k = k as f64;
        tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
        f += tf;
        g += tg;
    }
    c1 * f - c2 * g
}

#[test]
fn ai_at_origin() {
    assert_abs_diff_eq!(airy_ai(0.0).unwrap(), AI_0, epsilon = 1e-15);
    assert_abs_diff_eq!(airy_ai_prime(0.0).unwrap(), AIP_0, epsilon = 1e-15);
}

#[test]
fn ai_matches_independent_series() {
    for k in -40..=40 {
        let x = k as f64 * 0.1;
        assert_abs_diff_eq!(airy_ai(x).unwrap(), maclaurin_ai(x), epsilon = 1e-12);
    }
}

#[test]
fn ai_decay_at_ten() {
    let v = airy_ai(10.0).unwrap();
    let bound = (-(2.0 / 3.0) * 10f64.powf(1.5)).exp() / (2.0 * std::f64::consts::PI.sqrt() * 10f64.powf(0.25));
    assert!(v > 0.0 && v < 1e-9 && v <= bound);
    let d = airy_ai_prime(10.0).unwrap();
    assert!(d < 0.0 && d > -1e-8);
}

#[test]
fn ai_positive_and_decreasing_on_right() {
    let mut prev = airy_ai(1.0).unwrap();
    for k in 1..200 {
        let v = airy_ai(1.0 + k as f64 * 0.1).unwrap();
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
    for k in 0..10 {
        assert!(airy_ai(k as f64 * 0.1).unwrap() > 0.0);
    }
}

#[test]
fn airy_equation_residual() {
    let h = 1e-4;
    let x = 1.0;
    let ai = |x: f64| airy_ai(x).unwrap();
    let second = (ai(x + h) - 2.0 * ai(x) + ai(x - h)) / (h * h);
    assert!((second - x * ai(x)).abs() <= 1e-5);
    for &x in &[-12.0, -6.0, -2.5, 0.7, 4.0, 9.0] {
        let h = 1e-3;
        let second = (ai(x + h) - 2.0 * ai(x) + ai(x - h)) / (h * h);
        assert!((second - x * ai(x)).abs() <= 1e-5, "x = {x}");
    }
}

#[test]
fn derivative_consistency() {
    let h = 1e-5;
    let x = -2.0;
    let fd = (airy_ai(x + h).unwrap() - airy_ai(x - h).unwrap()) / (2.0 * h);
    assert!((fd - airy_ai_prime(x).unwrap()).abs() <= 1e-6);
}

#[test]
fn ai_total_mass_is_one() {
    // the undamped left tail only converges like an oscillating L^{-3/4},
    // so the mass is read off e^{εt}Ai(t), whose integral is e^{ε³/3}
    let eps: f64 = 0.3;
    let damped = Rule::composite(16, 600, -80.0, 0.0).integrate(|t| (eps * t).exp() * airy_ai(t).unwrap())
        + airy_exp_integral(0.0, -eps).unwrap();
    assert_abs_diff_eq!(damped, (eps.powi(3) / 3.0).exp(), epsilon = 1e-6);
    let left = Rule::composite(16, 400, -60.0, -10.0).integrate(|t| airy_ai(t).unwrap());
    assert!((left + airy_exp_integral(-10.0, 0.0).unwrap() - 1.0).abs() < 5e-2);
}

#[test]
fn exp_integral_values() {
    assert_abs_diff_eq!(airy_exp_integral(0.0, 1.0).unwrap(), PHI_0_1, epsilon = 1e-10);
    assert_abs_diff_eq!(airy_exp_integral(-10.0, 0.0).unwrap(), PHI_M10_0, epsilon = 1e-10);
    let tail = airy_exp_integral(8.0, 0.0).unwrap();
    assert!(tail > 0.0 && tail < 1e-6);
}

#[test]
fn exp_integral_two_schemes_agree() {
    for &(x, c) in &[(0.0, 1.0), (-3.0, 0.5), (2.0, -1.0), (1.0, 0.0)] {
        let a = airy_exp_integral(x, c).unwrap();
        let b = airy_exp_integral_mapped(x, c);
        assert!((a - b).abs() <= 1e-9, "({x},{c}): {a} vs {b}");
    }
}

#[test]
fn b_reference_values() {
    assert_abs_diff_eq!(b_transition(0.0, 0.5).unwrap(), B_0_HALF, epsilon = 1e-9);
    assert_abs_diff_eq!(b_transition(-2.0, 1.5).unwrap(), B_M2_1P5, epsilon = 1e-9);
    assert!((b_transition(3.0, -1.0).unwrap() - B_3_M1).abs() / B_3_M1 <= 1e-10);
}

#[test]
fn b_at_zero_omega_is_cumulative() {
    assert!((b_transition(8.0, 0.0).unwrap() - 1.0).abs() <= 1e-6);
    let x = 1.3;
    let cum = 1.0 - airy_exp_integral(x, 0.0).unwrap();
    assert_abs_diff_eq!(b_transition(x, 0.0).unwrap(), cum, epsilon = 1e-12);
}

#[test]
fn b_formula_matches_oscillatory_branch() {
    for i in 0..=10 {
        let x = -5.0 + i as f64;
        for j in 1..=6 {
            let w = 0.5 * j as f64;
            let e = w * w * w / 3.0 - x * w;
            let unified = e.exp() - airy_exp_integral(x, -w).unwrap();
            let direct = b_positive_branch(x, w);
            let tol = 1e-7 * (1.0 + e.exp() * 1e-6);
            assert!((unified - direct).abs() <= tol, "x={x} ω={w}: {unified} vs {direct}");
        }
    }
}

#[test]
fn b_x_derivative() {
    // ∂ₓB = Ai − ωB
    let h = 1e-5;
    for &(x, w) in &[(1.0, -1.0), (0.0, 0.5), (-2.0, 1.0), (2.0, 2.0)] {
        let b = |x: f64| b_transition(x, w).unwrap();
        let fd = (b(x + h) - b(x - h)) / (2.0 * h);
        let rhs = airy_ai(x).unwrap() - w * b(x);
        assert!((fd - rhs).abs() <= 1e-5 * (1.0 + rhs.abs()), "({x},{w})");
    }
}

#[test]
fn b_omega_derivative() {
    let (x, w) = (1.0, -1.0);
    let h = 1e-5;
    let fd = (b_transition(x, w + h).unwrap() - b_transition(x, w - h).unwrap()) / (2.0 * h);
    let rhs = airy_ai_prime(x).unwrap() - w * airy_ai(x).unwrap() + (w * w - x) * b_transition(x, w).unwrap();
    assert!((fd - rhs).abs() <= 1e-5);
}

#[test]
fn full_line_exponential_moment() {
    // ∫_ℝ e^{ωt}Ai(t)dt = e^{ω³/3}
    for &w in &[0.3f64, 1.0, 1.8] {
        let left = Rule::composite(16, 400, -100.0, 0.0).integrate(|t| (w * t).exp() * airy_ai(t).unwrap());
        let v = left + airy_exp_integral(0.0, -w).unwrap();
        assert!((v - (w.powi(3) / 3.0).exp()).abs() <= 1e-7, "ω={w}");
    }
}

#[test]
fn non_finite_rejected() {
    assert!(airy_ai(f64::NAN).is_err());
    assert!(airy_ai_prime(f64::INFINITY).is_err());
    assert!(airy_exp_integral(0.0, f64::NAN).is_err());
    assert!(b_transition(f64::NEG_INFINITY, 0.0).is_err());
}
