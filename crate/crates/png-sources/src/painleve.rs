//! Hastings-McLeod solution of q'' = sq + 2q³, the Tracy-Widom laws built
//! from it, and the Baik-Rains functions a(s,ω), b(s,ω).
//!
//! Columns a(·,ω), b(·,ω) come from the ω-equations integrated pointwise in s
//! for ω ≤ 1. For larger ω that direction amplifies errors roughly like
//! e^{ω³/3 − sω}, so the s-equations are swept forward from a Nyström value
//! at the bottom of the grid instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fredholm::{rank_one_ab, F0Reference, GridConfig};
use crate::quadrature::simpson;
use crate::real::{lit, to_f64, Real};
use crate::special_functions::{airy_exp_integral_unchecked, airy_pair};

pub const DEFAULT_S0: f64 = 8.0;
pub const DEFAULT_S_MIN: f64 = -10.0;
pub const DEFAULT_STEP: f64 = 5e-4;
/// Column spacing in base steps; must be even so RK4 midpoints are nodes.
pub const COLUMN_STRIDE: usize = 4;
pub const OMEGA_MIN: f64 = -5.0;
pub const OMEGA_MAX: f64 = 20.0;
const OMEGA_STEP: f64 = 1e-3;
const SWEEP_THRESHOLD: f64 = 1.0;
const SWEEP_RESTART: f64 = -5.0;
const BLOW_UP: f64 = 1e6;
/// Below this s the table takes q from its large-negative expansion: the
/// backward ODE sits on a separatrix and its error grows like
/// e^{(2√2/3)|s|^{3/2}}, while the expansion is good to ~1e-8 here.
pub const ASYMPTOTIC_SWITCH: f64 = -6.0;
const DEGENERATE_SIGMA: f64 = 0.05;

/// Tabulated q and the laws built from it on an ascending uniform grid
/// s_min + k·step (integrated downward from s₀).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PainleveTable<T> {
    pub s0: T,
    pub s_min: T,
    pub step: T,
    pub s: Vec<T>,
    pub q: Vec<T>,
    pub qp: Vec<T>,
    /// ∫ₛ^∞ q
    pub int_q: Vec<T>,
    /// ∫ₛ^∞ q²
    pub u: Vec<T>,
    /// (u² − q²)/2
    pub v: Vec<T>,
    pub f2: Vec<T>,
    pub f2p: Vec<T>,
    /// e^{−∫ₛ^∞ q}
    pub e: Vec<T>,
    pub f1sq: Vec<T>,
    pub columns: Vec<OmegaColumn<T>>,
}

/// a(·,ω), b(·,ω) on every `stride`-th node of the table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaColumn<T> {
    pub omega: T,
    pub stride: usize,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// A CDF sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCdf<T> {
    pub start: T,
    pub step: T,
    pub values: Vec<T>,
}

impl<T: Real> SampledCdf<T> {
    pub fn grid(&self) -> Vec<T> {
        (0..self.values.len()).map(|k| self.start + self.step * lit(k as f64)).collect()
    }

    /// Interpolated value; clamps to the end values outside the grid.
    pub fn eval(&self, s: T) -> T {
        let n = self.values.len();
        let end = self.start + self.step * lit((n - 1) as f64);
        if s <= self.start {
            return self.values[0];
        }
        if s >= end {
            return self.values[n - 1];
        }
        lagrange4(&self.values, self.start, self.step, s).unwrap_or(self.values[n - 1])
    }

    pub fn moments(&self) -> Result<Moments<T>> {
        moments(&self.grid(), &self.values)
    }
}

/// 4-point Lagrange interpolation on a uniform grid.
fn lagrange4<T: Real>(y: &[T], x0: T, h: T, x: T) -> Option<T> {
    let n = y.len();
    if n < 4 {
        return None;
    }
    let p = (x - x0) / h;
    let last = lit::<T>((n - 1) as f64);
    let eps = lit::<T>(1e-9);
    if p < -eps || p > last + eps {
        return None;
    }
    let i = p.floor().to_usize().unwrap_or(0).clamp(1, n - 3);
    let t = p - lit(i as f64);
    let one = T::one();
    let two = lit::<T>(2.0);
    let six = lit::<T>(6.0);
    let wm = -t * (t - one) * (t - two) / six;
    let w0 = (t + one) * (t - one) * (t - two) / two;
    let w1 = -(t + one) * t * (t - two) / two;
    let w2 = (t + one) * t * (t - one) / six;
    Some(wm * y[i - 1] + w0 * y[i] + w1 * y[i + 1] + w2 * y[i + 2])
}

type State<T> = [T; 5];

fn hm_rhs<T: Real>(s: T, y: &State<T>) -> State<T> {
    let q = y[0];
    [y[1], s * q + lit::<T>(2.0) * q * q * q, -q, -q * q, -y[3]]
}

/// q ~ √(−s/2)(1 + 1/(8s³) − 73/(128s⁶) + …) and its derivative, s < 0.
pub fn hm_asymptotic<T: Real>(s: T) -> (T, T) {
    const A: [f64; 6] = [
        1.0,
        1.0 / 8.0,
        -73.0 / 128.0,
        10657.0 / 1024.0,
        -13912277.0 / 32768.0,
        8045883943.0 / 262144.0,
    ];
    let t = s.powi(-3);
    let root = (-s * lit(0.5)).sqrt();
    let (mut p, mut dp, mut tk) = (T::zero(), T::zero(), T::one());
    for (k, &a) in A.iter().enumerate() {
        p += lit::<T>(a) * tk;
        dp += lit::<T>(-3.0 * k as f64 * a) * tk / s;
        tk *= t;
    }
    (root * p, root * dp - p / (lit::<T>(4.0) * root))
}

fn asymptotic_rhs<T: Real>(s: T, y: &State<T>) -> State<T> {
    let (q, qp) = hm_asymptotic(s);
    [qp, s * q + lit::<T>(2.0) * q * q * q, -q, -q * q, -y[3]]
}

fn axpy<T: Real>(y: &State<T>, k: &State<T>, h: T) -> State<T> {
    let mut out = *y;
    for i in 0..5 {
        out[i] += h * k[i];
    }
    out
}

/// Integrates from (q, q′) = (Ai(s₀), Ai′(s₀)) down to s_min. The grid is
/// extended below s_min to a whole number of column strides. Below
/// `ASYMPTOTIC_SWITCH` q and q′ come from `hm_asymptotic` while the
/// integrals keep being stepped.
pub fn solve_q<T: Real>(s0: T, s_min: T, step: T) -> Result<PainleveTable<T>> {
    if !(s0 >= lit(6.0)) {
        return domain(format!("s0 must be at least 6, got {s0}"));
    }
    if !(step > T::zero() && step <= lit(1e-2)) || !(s_min < s0) {
        return domain(format!("bad grid: s0={s0}, s_min={s_min}, step={step}"));
    }
    let raw = to_f64((s0 - s_min) / step).ceil() as usize;
    let n = raw.div_ceil(COLUMN_STRIDE) * COLUMN_STRIDE;
    let s_min = s0 - step * lit(n as f64);
    let (ai, aip) = airy_pair(s0);
    let three = lit::<T>(3.0);
    let mut y: State<T> = [
        ai,
        aip,
        airy_exp_integral_unchecked(s0, T::zero()),
        aip * aip - s0 * ai * ai,
        (lit::<T>(2.0) * s0 * s0 * ai * ai - lit::<T>(2.0) * s0 * aip * aip - ai * aip) / three,
    ];
    let mut states = Vec::with_capacity(n + 1);
    states.push(y);
    let h = -step;
    let half = h * lit(0.5);
    let switch = lit::<T>(ASYMPTOTIC_SWITCH);
    for k in 0..n {
        let s = s0 - step * lit(k as f64);
        let asymptotic = s + h < switch;
        let rhs = if asymptotic { asymptotic_rhs::<T> } else { hm_rhs::<T> };
        let k1 = rhs(s, &y);
        let k2 = rhs(s + half, &axpy(&y, &k1, half));
        let k3 = rhs(s + half, &axpy(&y, &k2, half));
        let k4 = rhs(s + h, &axpy(&y, &k3, h));
        for i in 0..5 {
            y[i] += h / lit(6.0) * (k1[i] + lit::<T>(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
        if asymptotic {
            (y[0], y[1]) = hm_asymptotic(s + h);
        }
        // Hastings-McLeod is positive and strictly decreasing; leaving either
        // property means blow-up or the oscillating Ablowitz-Segur side
        if !(y[0].abs() < lit(BLOW_UP)) || !(y[0] > T::zero() && y[1] < T::zero()) {
            return Err(Error::Instability(format!(
                "q left the Hastings-McLeod branch near s = {}; raise s0 or refine the step",
                s + h
            )));
        }
        states.push(y);
    }
    states.reverse();
    let s: Vec<T> = (0..=n).map(|k| s_min + step * lit(k as f64)).collect();
    let col = |i: usize| -> Vec<T> { states.iter().map(|st| st[i]).collect() };
    let q = col(0);
    let qp = col(1);
    let int_q = col(2);
    let u = col(3);
    let vint = col(4);
    let f2: Vec<T> = vint.iter().map(|&v| (-v).exp()).collect();
    let f2p: Vec<T> = f2.iter().zip(&u).map(|(&f, &uu)| f * uu).collect();
    let e: Vec<T> = int_q.iter().map(|&i| (-i).exp()).collect();
    let f1sq: Vec<T> = e.iter().zip(&f2).map(|(&a, &b)| a * b).collect();
    let v: Vec<T> = u.iter().zip(&q).map(|(&uu, &qq)| (uu * uu - qq * qq) * lit(0.5)).collect();
    Ok(PainleveTable { s0, s_min, step, s, q, qp, int_q, u, v, f2, f2p, e, f1sq, columns: Vec::new() })
}

/// Default table: s₀ = 8, s_min = −10, step 5e-4.
pub fn default_table<T: Real>() -> Result<PainleveTable<T>> {
    solve_q(lit(DEFAULT_S0), lit(DEFAULT_S_MIN), lit(DEFAULT_STEP))
}

#[inline]
fn omega_rhs<T: Real>(s: T, q: T, qp: T, w: T, a: T, b: T) -> (T, T) {
    (q * q * a - (qp + w * q) * b, (qp - w * q) * a + (w * w - s - q * q) * b)
}

/// RK4 in ω from ω = 0 (a = b = E) to `omega`.
fn omega_sweep<T: Real>(s: T, q: T, qp: T, e: T, omega: T) -> (T, T) {
    let steps = (to_f64(omega.abs()) / OMEGA_STEP).ceil().max(1.0) as usize;
    let h = omega / lit(steps as f64);
    let half = h * lit(0.5);
    let (mut a, mut b) = (e, e);
    for k in 0..steps {
        let w = h * lit(k as f64);
        let (a1, b1) = omega_rhs(s, q, qp, w, a, b);
        let (a2, b2) = omega_rhs(s, q, qp, w + half, a + half * a1, b + half * b1);
        let (a3, b3) = omega_rhs(s, q, qp, w + half, a + half * a2, b + half * b2);
        let (a4, b4) = omega_rhs(s, q, qp, w + h, a + h * a3, b + h * b3);
        let six = lit::<T>(6.0);
        a += h / six * (a1 + lit::<T>(2.0) * (a2 + a3) + a4);
        b += h / six * (b1 + lit::<T>(2.0) * (b2 + b3) + b4);
    }
    (a, b)
}

impl<T: Real> PainleveTable<T> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s_max(&self) -> T {
        self.s[self.s.len() - 1]
    }

    fn interp(&self, y: &[T], s: T) -> Result<T> {
        lagrange4(y, self.s_min, self.step, s)
            .ok_or_else(|| Error::Domain(format!("s = {s} is outside the table [{}, {}]", self.s_min, self.s_max())))
    }

    pub fn q_at(&self, s: T) -> Result<T> {
        self.interp(&self.q, s)
    }

    pub fn f2_at(&self, s: T) -> Result<T> {
        self.interp(&self.f2, s)
    }

    pub fn f2p_at(&self, s: T) -> Result<T> {
        self.interp(&self.f2p, s)
    }

    pub fn f1sq_at(&self, s: T) -> Result<T> {
        self.interp(&self.f1sq, s)
    }

    pub fn e_at(&self, s: T) -> Result<T> {
        self.interp(&self.e, s)
    }

    pub fn u_at(&self, s: T) -> Result<T> {
        self.interp(&self.u, s)
    }

    fn column_len(&self, stride: usize) -> usize {
        (self.len() - 1) / stride + 1
    }

    fn check_omega(omega: T) -> Result<()> {
        if !(omega >= lit(OMEGA_MIN) && omega <= lit(OMEGA_MAX)) {
            return domain(format!("ω = {omega} outside [{OMEGA_MIN}, {OMEGA_MAX}]"));
        }
        Ok(())
    }

    /// Computes a(·,ω), b(·,ω) on the column grid.
    pub fn baik_rains_ab(&self, omega: T) -> Result<OmegaColumn<T>> {
        Self::check_omega(omega)?;
        let stride = COLUMN_STRIDE;
        let m = self.column_len(stride);
        if omega == T::zero() {
            let e: Vec<T> = (0..m).map(|k| self.e[k * stride]).collect();
            return Ok(OmegaColumn { omega, stride, a: e.clone(), b: e });
        }
        if omega <= lit(SWEEP_THRESHOLD) {
            let (a, b): (Vec<T>, Vec<T>) = (0..m)
                .map(|k| {
                    let i = k * stride;
                    omega_sweep(self.s[i], self.q[i], self.qp[i], self.e[i], omega)
                })
                .unzip();
            return Ok(OmegaColumn { omega, stride, a, b });
        }
        let (a, b) = self.s_sweep(omega, stride, m)?;
        Ok(OmegaColumn { omega, stride, a, b })
    }

    /// Forward RK4 of a_s = qb, b_s = qa − ωb over `m` column nodes. The
    /// Nyström start loses relative accuracy far left, so the sweep is
    /// restarted at `SWEEP_RESTART` where it is accurate again; below that F₂
    /// is small enough to hide the difference.
    fn s_sweep(&self, omega: T, stride: usize, m: usize) -> Result<(Vec<T>, Vec<T>)> {
        let init = rank_one_ab(self.s_min, omega, GridConfig::default())?;
        let (mut a, mut b) = (init.a, init.b);
        let h = self.step * lit(stride as f64);
        let restart = to_f64((lit::<T>(SWEEP_RESTART) - self.s_min) / h).round();
        let restart = if restart > 0.0 && (restart as usize) < m { Some(restart as usize) } else { None };
        let half = h * lit(0.5);
        let mut av = Vec::with_capacity(m);
        let mut bv = Vec::with_capacity(m);
        av.push(a);
        bv.push(b);
        let f = |q: T, a: T, b: T| (q * b, q * a - omega * b);
        for k in 0..m - 1 {
            let i = k * stride;
            let (q0, qm, q1) = (self.q[i], self.q[i + stride / 2], self.q[i + stride]);
            let (a1, b1) = f(q0, a, b);
            let (a2, b2) = f(qm, a + half * a1, b + half * b1);
            let (a3, b3) = f(qm, a + half * a2, b + half * b2);
            let (a4, b4) = f(q1, a + h * a3, b + h * b3);
            let six = lit::<T>(6.0);
            a += h / six * (a1 + lit::<T>(2.0) * (a2 + a3) + a4);
            b += h / six * (b1 + lit::<T>(2.0) * (b2 + b3) + b4);
            if restart == Some(k + 1) {
                let r = rank_one_ab(self.s[i + stride], omega, GridConfig::default())?;
                a = r.a;
                b = r.b;
            }
            av.push(a);
            bv.push(b);
        }
        Ok((av, bv))
    }

    /// Stores columns for the given ω values (computed in parallel).
    pub fn add_columns(&mut self, omegas: &[T]) -> Result<()> {
        let todo: Vec<T> = omegas.iter().copied().filter(|w| self.column(*w).is_none()).collect();
        let cols: Result<Vec<OmegaColumn<T>>> = todo.par_iter().map(|&w| self.baik_rains_ab(w)).collect();
        self.columns.extend(cols?);
        Ok(())
    }

    pub fn column(&self, omega: T) -> Option<&OmegaColumn<T>> {
        self.columns.iter().find(|c| c.omega == omega)
    }

    fn column_value(&self, col: &OmegaColumn<T>, s: T) -> Result<(T, T)> {
        let h = self.step * lit(col.stride as f64);
        let a = lagrange4(&col.a, self.s_min, h, s);
        let b = lagrange4(&col.b, self.s_min, h, s);
        match (a, b) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => domain(format!("s = {s} is outside the table")),
        }
    }

    /// a(s,ω), b(s,ω) at one point.
    pub fn ab(&self, s: T, omega: T) -> Result<(T, T)> {
        Self::check_omega(omega)?;
        if let Some(c) = self.column(omega) {
            return self.column_value(c, s);
        }
        let q = self.q_at(s)?;
        let qp = self.interp(&self.qp, s)?;
        let e = self.e_at(s)?;
        if omega <= lit(SWEEP_THRESHOLD) {
            return Ok(omega_sweep(s, q, qp, e, omega));
        }
        let col = self.baik_rains_ab(omega)?;
        self.column_value(&col, s)
    }

    /// (∂_ω a, ∂_ω b) from the ω-equations.
    pub fn ab_omega(&self, s: T, omega: T, a: T, b: T) -> Result<(T, T)> {
        let q = self.q_at(s)?;
        let qp = self.interp(&self.qp, s)?;
        Ok(omega_rhs(s, q, qp, omega, a, b))
    }

    /// F₂(s)·a(s,ω).
    pub fn transition_cdf(&self, s: T, omega: T) -> Result<T> {
        let (a, _) = self.ab(s, omega)?;
        Ok(self.f2_at(s)? * a)
    }

    /// F₂(s)·a(s,ω) on the column grid.
    pub fn transition_curve(&self, omega: T) -> Result<SampledCdf<T>> {
        let owned;
        let col = match self.column(omega) {
            Some(c) => c,
            None => {
                owned = self.baik_rains_ab(omega)?;
                &owned
            }
        };
        let values = col.a.iter().enumerate().map(|(k, &a)| self.f2[k * col.stride] * a).collect();
        Ok(SampledCdf { start: self.s_min, step: self.step * lit(col.stride as f64), values })
    }

    /// One-point F0-transition law with effective parameters (ω₊, ω₋).
    pub fn f0_cdf(&self, s: T, omega_plus: T, omega_minus: T) -> Result<T> {
        let f2 = self.f2_at(s)?;
        let f2p = self.f2p_at(s)?;
        let (ap, bp) = self.ab(s, omega_plus)?;
        let (am, bm) = self.ab(s, omega_minus)?;
        let ratio = self.d_over_sigma(s, omega_plus, omega_minus, (ap, bp), (am, bm), |t| self.ab(s, t))?;
        Ok(f2 * ap * am + f2p * ratio)
    }

    /// (a₊a₋ − b₊b₋)/(ω₊+ω₋), through its integral form near ω₊+ω₋ = 0.
    fn d_over_sigma(
        &self,
        s: T,
        p: T,
        m: T,
        (ap, bp): (T, T),
        (am, bm): (T, T),
        ab_at: impl Fn(T) -> Result<(T, T)>,
    ) -> Result<T> {
        let sigma = p + m;
        if sigma.abs() >= lit(DEGENERATE_SIGMA) {
            return Ok((ap * am - bp * bm) / sigma);
        }
        let g = lit::<T>(0.5 / 3f64.sqrt());
        let half = lit::<T>(0.5);
        let mut acc = T::zero();
        for t in [-p + sigma * (half - g), -p + sigma * (half + g)] {
            let (a, b) = ab_at(t)?;
            let (aw, bw) = self.ab_omega(s, t, a, b)?;
            acc += half * (ap * aw - bp * bw);
        }
        Ok(acc)
    }

    /// F0-transition law on the column grid.
    pub fn f0_curve(&self, omega_plus: T, omega_minus: T) -> Result<SampledCdf<T>> {
        let sigma = omega_plus + omega_minus;
        let mut needed = vec![omega_plus, omega_minus];
        let g = lit::<T>(0.5 / 3f64.sqrt());
        let half = lit::<T>(0.5);
        let nodes = [-omega_plus + sigma * (half - g), -omega_plus + sigma * (half + g)];
        if sigma.abs() < lit(DEGENERATE_SIGMA) {
            needed.extend(nodes);
        }
        let mut tmp = PainleveTable { columns: Vec::new(), ..self.clone_base() };
        for &w in &needed {
            if let Some(c) = self.column(w) {
                if tmp.column(w).is_none() {
                    tmp.columns.push(c.clone());
                }
            }
        }
        tmp.add_columns(&needed)?;
        let stride = COLUMN_STRIDE;
        let m = tmp.column_len(stride);
        let cp = tmp.column(omega_plus).unwrap();
        let cm = tmp.column(omega_minus).unwrap();
        let mut values = Vec::with_capacity(m);
        for k in 0..m {
            let i = k * stride;
            let s = tmp.s[i];
            let ratio = tmp.d_over_sigma(s, omega_plus, omega_minus, (cp.a[k], cp.b[k]), (cm.a[k], cm.b[k]), |t| {
                let c = tmp.column(t).unwrap();
                Ok((c.a[k], c.b[k]))
            })?;
            values.push(tmp.f2[i] * cp.a[k] * cm.a[k] + tmp.f2p[i] * ratio);
        }
        Ok(SampledCdf { start: self.s_min, step: self.step * lit(stride as f64), values })
    }

    fn clone_base(&self) -> PainleveTable<T> {
        PainleveTable {
            s0: self.s0,
            s_min: self.s_min,
            step: self.step,
            s: self.s.clone(),
            q: self.q.clone(),
            qp: self.qp.clone(),
            int_q: self.int_q.clone(),
            u: self.u.clone(),
            v: self.v.clone(),
            f2: self.f2.clone(),
            f2p: self.f2p.clone(),
            e: self.e.clone(),
            f1sq: self.f1sq.clone(),
            columns: Vec::new(),
        }
    }

    /// The F0 law itself (ω₊ = ω₋ = 0): E²F₂ + E²(2q² + s − 2q′)F₂′.
    pub fn f0_limit_curve(&self) -> SampledCdf<T> {
        let two = lit::<T>(2.0);
        let values = (0..self.len())
            .map(|i| {
                let e2 = self.e[i] * self.e[i];
                let q = self.q[i];
                e2 * self.f2[i] + e2 * (two * q * q + self.s[i] - two * self.qp[i]) * self.f2p[i]
            })
            .collect();
        SampledCdf { start: self.s_min, step: self.step, values }
    }

    pub fn f2_curve(&self) -> SampledCdf<T> {
        SampledCdf { start: self.s_min, step: self.step, values: self.f2.clone() }
    }

    pub fn f1sq_curve(&self) -> SampledCdf<T> {
        SampledCdf { start: self.s_min, step: self.step, values: self.f1sq.clone() }
    }

    /// Taylor coefficients (c₀, c₁, c₂, c₃) of the transition mean in τ.
    pub fn mean_small_tau_series(&self) -> Result<[T; 4]> {
        let n = self.len();
        let mut out = [T::zero(); 4];
        out[0] = self.f1sq_curve().moments()?.mean;
        let mut coeffs = vec![[T::zero(); 4]; n];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let (s, q, qp, e) = (self.s[k], self.q[k], self.qp[k], self.e[k]);
            let q2 = q * q;
            let a0 = e;
            let b0 = e;
            let a1 = q2 * a0 - qp * b0;
            let b1 = qp * a0 - (s + q2) * b0;
            let a2 = (q2 * a1 - qp * b1 - q * b0) / lit(2.0);
            let b2 = (qp * a1 - q * a0 - (s + q2) * b1) / lit(2.0);
            let a3 = (q2 * a2 - qp * b2 - q * b1) / lit(3.0);
            *slot = [a0, a1, a2, a3];
        }
        for (j, c) in out.iter_mut().enumerate().skip(1) {
            let y: Vec<T> = coeffs.iter().zip(&self.f2).map(|(a, &f)| f * a[j]).collect();
            *c = -simpson(self.step, &y);
        }
        Ok(out)
    }
}

impl<T: Real> F0Reference<T> for PainleveTable<T> {
    fn f0_reference(&self, s: T, omega_plus: T, omega_minus: T) -> Result<T> {
        self.f0_cdf(s, omega_plus, omega_minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    LargePositive,
    LargeNegative,
}

/// Leading large-|τ| behaviour of the transition mean.
pub fn mean_asymptotic<T: Real>(tau: T, regime: Regime) -> Result<T> {
    if !(tau.abs() >= lit(2.0)) {
        return domain(format!("asymptotic mean needs |τ| >= 2, got {tau}"));
    }
    match regime {
        Regime::LargePositive if tau > T::zero() => Ok(lit::<T>(-1.77109) + T::one() / tau),
        Regime::LargeNegative if tau < T::zero() => Ok(tau * tau),
        _ => domain(format!("τ = {tau} is on the wrong side for {regime:?}")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments<T> {
    pub mean: T,
    pub sd: T,
    pub skewness: T,
    /// Excess kurtosis.
    pub kurtosis: T,
    /// F(first node) + 1 − F(last node).
    pub tail_mass: T,
}

impl<T: Real> Moments<T> {
    pub fn precision_warning(&self) -> Option<String> {
        (self.tail_mass > lit(1e-8)).then(|| format!("grid misses {} of the mass", self.tail_mass))
    }
}

/// Moments of a CDF sampled on a uniform ascending grid, by integrating the
/// tails (1 − F and F) rather than differentiating.
pub fn moments<T: Real>(s: &[T], cdf: &[T]) -> Result<Moments<T>> {
    let n = s.len();
    if n < 5 || cdf.len() != n {
        return domain("moments need at least 5 matching grid and CDF values");
    }
    let h = s[1] - s[0];
    if !(h > T::zero()) || s.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > h * lit(1e-6)) {
        return domain("moments need a uniform ascending grid");
    }
    let half = lit::<T>(0.5);
    let pivot = (0..n)
        .min_by(|&i, &j| (cdf[i] - half).abs().partial_cmp(&(cdf[j] - half).abs()).unwrap())
        .unwrap();
    let c = s[pivot];
    // raw moments of Y = X − c
    let mut m = [T::zero(); 5];
    for (k, mk) in m.iter_mut().enumerate().skip(1) {
        let kf = lit::<T>(k as f64);
        let left: Vec<T> = (0..=pivot).map(|i| -kf * (s[i] - c).powi(k as i32 - 1) * cdf[i]).collect();
        let right: Vec<T> = (pivot..n).map(|i| kf * (s[i] - c).powi(k as i32 - 1) * (T::one() - cdf[i])).collect();
        *mk = simpson(h, &left) + simpson(h, &right);
    }
    let (m1, m2, m3, m4) = (m[1], m[2], m[3], m[4]);
    let var = m2 - m1 * m1;
    let three = lit::<T>(3.0);
    let c3 = m3 - three * m1 * m2 + lit::<T>(2.0) * m1.powi(3);
    let c4 = m4 - lit::<T>(4.0) * m1 * m3 + lit::<T>(6.0) * m1 * m1 * m2 - three * m1.powi(4);
    if !(var > T::zero()) {
        return Err(Error::Numeric("non-positive variance".into()));
    }
    Ok(Moments {
        mean: c + m1,
        sd: var.sqrt(),
        skewness: c3 / var.powf(lit(1.5)),
        kurtosis: c4 / (var * var) - three,
        tail_mass: cdf[0].abs() + (T::one() - cdf[n - 1]).abs(),
    })
}
