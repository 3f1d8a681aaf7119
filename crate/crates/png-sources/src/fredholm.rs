//! Nyström discretisation of det(1 + 𝒦𝒢) on products of half-lines.
//!
//! With 𝒢 = −χ the determinant is det(I − K̂) where K̂ = W^{1/2} K W^{1/2}
//! on Gauss-Legendre nodes of (sⱼ, sⱼ + L].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::ScalingFrame;
use crate::kernels::{extended_airy_block, f0_left, f0_right, gaussian_density, goe2_factor, KernelSpec};
use crate::linalg::{Lu, Matrix};
use crate::quadrature::Rule;
use crate::real::{lit, to_f64, Real};
use crate::special_functions::{airy_exp_integral_unchecked, airy_pair, b_transition_unchecked};

/// Truncation knobs. `cutoff` is a minimum: the interval is extended while
/// the kernel tail at the top is still above `TAIL_TOL`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig<T> {
    pub cutoff: T,
    pub nodes: usize,
}

impl<T: Real> Default for GridConfig<T> {
    fn default() -> Self {
        GridConfig { cutoff: lit(10.0), nodes: 60 }
    }
}

const TAIL_TOL: f64 = 1e-16;
const MAX_LENGTH: f64 = 60.0;
const MAX_NODES: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slot<T> {
    pub tau: T,
    pub s: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid<T> {
    pub slots: Vec<Slot<T>>,
    pub config: GridConfig<T>,
}

impl<T: Real> QuadratureGrid<T> {
    /// Plain (sⱼ, sⱼ + L] with m nodes per slot.
    pub fn uniform(points: &[(T, T)], config: GridConfig<T>) -> Result<Self> {
        Self::build(points, config, |_, _| T::zero())
    }

    /// Extends each slot until `tail(τ, u)` drops below the tolerance.
    pub fn build(points: &[(T, T)], config: GridConfig<T>, tail: impl Fn(T, T) -> T) -> Result<Self> {
        if config.nodes == 0 || !(config.cutoff > T::zero()) {
            return Err(Error::Config("grid needs nodes > 0 and cutoff > 0".into()));
        }
        let mut slots = Vec::with_capacity(points.len());
        for &(tau, s) in points {
            if !s.is_finite() || !tau.is_finite() {
                return domain(format!("non-finite grid point ({tau}, {s})"));
            }
            let mut len = config.cutoff;
            while tail(tau, s + len).abs() > lit(TAIL_TOL) && len < lit(MAX_LENGTH) {
                len += T::one();
            }
            slots.push(Self::slot(tau, s, len, scaled_nodes(config, len)));
        }
        Ok(QuadratureGrid { slots, config })
    }

    fn slot(tau: T, s: T, len: T, m: usize) -> Slot<T> {
        let r = Rule::gauss(m, s, s + len);
        Slot { tau, s, nodes: r.nodes, weights: r.weights }
    }

    /// Grid sized for a given kernel.
    pub fn for_spec(spec: &KernelSpec<T>, points: &[(T, T)], config: GridConfig<T>) -> Result<Self> {
        match *spec {
            KernelSpec::ExtendedAiry => Self::build(points, config, |_, u| airy_tail(u)),
            KernelSpec::Goe2Transition { omega } => {
                Self::build(points, config, |t, u| airy_tail(u) + airy_pair(u).0 * goe2_factor(t, u, omega).abs())
            }
            KernelSpec::F0Transition { omega_plus, omega_minus } => Self::build(points, config, |t, u| {
                f0_tail(omega_plus, omega_minus, t, u)
            }),
            KernelSpec::Brownian { beta_minus } => brownian_grid(points, config, beta_minus),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.iter().map(|s| s.nodes.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.slots.len() + 1);
        let mut k = 0;
        off.push(0);
        for s in &self.slots {
            k += s.nodes.len();
            off.push(k);
        }
        off
    }

    /// √w at every node, slot by slot.
    pub fn sqrt_weights(&self) -> Vec<T> {
        self.slots.iter().flat_map(|s| s.weights.iter().map(|w| w.sqrt())).collect()
    }
}

fn scaled_nodes<T: Real>(config: GridConfig<T>, len: T) -> usize {
    let ratio = to_f64(len / config.cutoff).max(1.0);
    ((config.nodes as f64 * ratio).ceil() as usize).clamp(config.nodes, MAX_NODES.max(config.nodes))
}

fn airy_tail<T: Real>(u: T) -> T {
    let (a, d) = airy_pair(u);
    d * d + u.abs() * a * a
}

fn f0_parts<T: Real>(omega_plus: T, omega_minus: T, tau: T) -> ((T, T), (T, T)) {
    let three = lit::<T>(3.0);
    let s1 = omega_plus - tau;
    let c1 = if s1 >= T::zero() { s1.powi(3) / three } else { (omega_plus.powi(3) - tau.powi(3)) / three };
    let s2 = omega_minus + tau;
    let c2 = if s2 >= T::zero() { s2.powi(3) / three } else { (tau.powi(3) + omega_minus.powi(3)) / three };
    ((s1, c1), (s2, c2))
}

fn f0_tail<T: Real>(omega_plus: T, omega_minus: T, tau: T, u: T) -> T {
    let ((s1, c1), (s2, c2)) = f0_parts(omega_plus, omega_minus, tau);
    let e1 = (c1 - u * s1).exp();
    let e2 = (c2 - u * s2).exp();
    let p1 = airy_exp_integral_unchecked(u, -s1).abs();
    let p2 = airy_exp_integral_unchecked(u, -s2).abs();
    airy_tail(u) * (T::one() + (e1 + p1) * (e2 + p2)) + e1 * p2 + p1 * e2 + p1 * p2
}

fn brownian_grid<T: Real>(points: &[(T, T)], config: GridConfig<T>, beta_minus: T) -> Result<QuadratureGrid<T>> {
    let vars: Vec<T> = points.iter().map(|&(b, _)| beta_minus - b).collect();
    if vars.iter().any(|v| !(*v > T::zero())) {
        return domain(format!("Brownian grid needs β < β₋ = {beta_minus}"));
    }
    let mut gaps: Vec<T> = vars.clone();
    for i in 0..points.len() {
        for j in 0..points.len() {
            let d = points[i].0 - points[j].0;
            if d > T::zero() {
                gaps.push(d);
            }
        }
    }
    let sd_max = vars.iter().fold(T::zero(), |m, &v| m.max(v)).sqrt();
    let sd_min = gaps.iter().fold(T::infinity(), |m, &v| m.min(v)).sqrt();
    let twelve = lit::<T>(12.0);
    let mut slots = Vec::new();
    for &(beta, s) in points {
        let top = s.max(T::zero()) + twelve * sd_max;
        let len = (top - s).max(twelve * sd_min);
        let ratio = to_f64(len / (twelve * sd_min)).max(1.0);
        let m = ((config.nodes as f64 * ratio).ceil() as usize).clamp(config.nodes, MAX_NODES.max(config.nodes));
        slots.push(QuadratureGrid::slot(beta, s, len, m));
    }
    Ok(QuadratureGrid { slots, config })
}

/// I − K̂ is never formed here: `matrix` holds −W^{1/2} K W^{1/2}.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedOperator<T> {
    pub spec: Option<KernelSpec<T>>,
    pub grid: QuadratureGrid<T>,
    pub matrix: Matrix<T>,
}

fn kernel_block<T: Real>(spec: &KernelSpec<T>, a: &Slot<T>, b: &Slot<T>) -> Result<Vec<Vec<T>>> {
    match *spec {
        KernelSpec::Brownian { .. } => a
            .nodes
            .iter()
            .map(|&x| b.nodes.iter().map(|&y| spec.eval(a.tau, x, b.tau, y)).collect())
            .collect::<Result<Vec<Vec<T>>>>(),
        _ => {
            let mut blk = extended_airy_block(a.tau, &a.nodes, b.tau, &b.nodes);
            match *spec {
                KernelSpec::Goe2Transition { omega } => {
                    let left: Vec<T> = a.nodes.iter().map(|&x| airy_pair(x).0).collect();
                    let right: Vec<T> = b.nodes.iter().map(|&y| goe2_factor(b.tau, y, omega)).collect();
                    add_outer(&mut blk, T::one(), &left, &right);
                }
                KernelSpec::F0Transition { omega_plus, omega_minus } => {
                    let left: Vec<T> = a.nodes.iter().map(|&x| f0_left(omega_plus, a.tau, x)).collect();
                    let right: Vec<T> = b.nodes.iter().map(|&y| f0_right(omega_minus, b.tau, y)).collect();
                    add_outer(&mut blk, omega_plus + omega_minus, &left, &right);
                }
                _ => {}
            }
            Ok(blk)
        }
    }
}

fn add_outer<T: Real>(blk: &mut [Vec<T>], c: T, left: &[T], right: &[T]) {
    for (row, &l) in blk.iter_mut().zip(left) {
        for (v, &r) in row.iter_mut().zip(right) {
            *v += c * l * r;
        }
    }
}

impl<T: Real> DiscretizedOperator<T> {
    pub fn assemble(spec: &KernelSpec<T>, grid: QuadratureGrid<T>) -> Result<Self> {
        let blocks = |a: &Slot<T>, b: &Slot<T>| kernel_block(spec, a, b);
        let mut op = Self::from_blocks(grid, blocks)?;
        op.spec = Some(*spec);
        Ok(op)
    }

    /// Operator for an arbitrary kernel K(τ₁,ξ₁;τ₂,ξ₂).
    pub fn from_fn(grid: QuadratureGrid<T>, k: impl Fn(T, T, T, T) -> T) -> Result<Self> {
        Self::from_blocks(grid, |a, b| {
            Ok(a.nodes.iter().map(|&x| b.nodes.iter().map(|&y| k(a.tau, x, b.tau, y)).collect()).collect())
        })
    }

    fn from_blocks(grid: QuadratureGrid<T>, blocks: impl Fn(&Slot<T>, &Slot<T>) -> Result<Vec<Vec<T>>>) -> Result<Self> {
        let n = grid.len();
        let off = grid.offsets();
        let sw = grid.sqrt_weights();
        let mut m = Matrix::zeros(n);
        for (a, sa) in grid.slots.iter().enumerate() {
            for (b, sb) in grid.slots.iter().enumerate() {
                let blk = blocks(sa, sb)?;
                for (i, row) in blk.iter().enumerate() {
                    let gi = off[a] + i;
                    for (k, &v) in row.iter().enumerate() {
                        let gk = off[b] + k;
                        m.set(gi, gk, -sw[gi] * v * sw[gk]);
                    }
                }
            }
        }
        if !m.is_finite() {
            return Err(Error::Numeric("kernel produced non-finite entries".into()));
        }
        Ok(DiscretizedOperator { spec: None, grid, matrix: m })
    }

    /// I + M.
    pub fn shifted(&self) -> Matrix<T> {
        let mut a = self.matrix.clone();
        for i in 0..a.n {
            let v = a.get(i, i);
            a.set(i, i, v + T::one());
        }
        a
    }
}

/// det(I + M), unclamped.
pub fn det1p<T: Real>(op: &DiscretizedOperator<T>) -> Result<T> {
    Ok(Lu::new(&op.shifted())?.det())
}

/// Multi-point law P[H(τⱼ) ≤ sⱼ ∀j] = det(1 + 𝒦𝒢) for 1 ≤ m ≤ 4 points.
/// Points with sⱼ = +∞ are dropped. F0 is handled by [`f0_joint`].
pub fn joint_cdf<T: Real>(spec: &KernelSpec<T>, points: &[(T, T)], config: GridConfig<T>) -> Result<T> {
    check_points(points)?;
    let kept: Vec<(T, T)> = points.iter().copied().filter(|p| p.1 != T::infinity()).collect();
    if kept.is_empty() {
        return Ok(T::one());
    }
    if let KernelSpec::F0Transition { .. } = spec {
        return Err(Error::Unsupported(
            "the F0 determinant is not a distribution by itself; use f0_point or f0_joint".into(),
        ));
    }
    let grid = QuadratureGrid::for_spec(spec, &kept, config)?;
    det1p(&DiscretizedOperator::assemble(spec, grid)?)
}

fn check_points<T: Real>(points: &[(T, T)]) -> Result<()> {
    if points.is_empty() || points.len() > 4 {
        return domain(format!("joint laws take 1 to 4 points, got {}", points.len()));
    }
    if points.iter().any(|p| p.1.is_nan() || !p.0.is_finite()) {
        return domain("joint law points must be finite");
    }
    Ok(())
}

/// One-point law at time τ.
pub fn one_point_cdf<T: Real>(spec: &KernelSpec<T>, tau: T, s: T, config: GridConfig<T>) -> Result<T> {
    match *spec {
        KernelSpec::F0Transition { omega_plus, omega_minus } => {
            if !(omega_plus + omega_minus > T::zero()) {
                return Err(Error::Unsupported(
                    "F0 with ω₊+ω₋ <= 0 diverges on the direct route; use f0_point with a Painlevé table".into(),
                ));
            }
            f0_point(omega_plus, omega_minus, tau, s, config, None)
        }
        _ => joint_cdf(spec, &[(tau, s)], config),
    }
}

/// Source of F0 values for ω₊+ω₋ ≤ 0.
pub trait F0Reference<T> {
    fn f0_reference(&self, s: T, omega_plus: T, omega_minus: T) -> Result<T>;
}

/// det(1 + 𝒦𝒢) for the F0 kernel as F₂-part × rank-one scalar, with the
/// non-decaying piece of the separable term summed in closed form.
pub fn f0_determinant<T: Real>(omega_plus: T, omega_minus: T, points: &[(T, T)], config: GridConfig<T>) -> Result<(T, T)> {
    check_points(points)?;
    let sigma = omega_plus + omega_minus;
    let grid = QuadratureGrid::build(points, config, |t, u| f0_tail(omega_plus, omega_minus, t, u))?;
    let op = DiscretizedOperator::assemble(&KernelSpec::ExtendedAiry, grid)?;
    let lu = Lu::new(&op.shifted())?;
    let f2 = lu.det();
    let sw = op.grid.sqrt_weights();
    let mut b1 = Vec::with_capacity(sw.len());
    let mut b2 = Vec::with_capacity(sw.len());
    let mut direct = T::zero();
    for slot in &op.grid.slots {
        let ((s1, c1), (s2, c2)) = f0_parts(omega_plus, omega_minus, slot.tau);
        // σ∫_s^∞ E₁E₂ in closed form
        direct += (c1 + c2 - sigma * slot.s).exp();
        let mut cross = T::zero();
        for (&x, &w) in slot.nodes.iter().zip(&slot.weights) {
            let e1 = (c1 - x * s1).exp();
            let e2 = (c2 - x * s2).exp();
            let p1 = airy_exp_integral_unchecked(x, -s1);
            let p2 = airy_exp_integral_unchecked(x, -s2);
            cross += w * (e1 * p2 + p1 * e2 - p1 * p2);
            let sq = w.sqrt();
            b1.push(sq * f0_left(omega_plus, slot.tau, x));
            b2.push(sq * f0_right(omega_minus, slot.tau, x));
        }
        direct -= sigma * cross;
    }
    // ⟨(I−K̂)^{-1} K̂ b₁, b₂⟩ with K̂ = −M
    let kb1: Vec<T> = op.matrix.mul_vec(&b1).into_iter().map(|v| -v).collect();
    let z = lu.solve(&kb1)?;
    let resolvent: T = z.iter().zip(&b2).map(|(&a, &b)| a * b).sum();
    let scalar = T::one() - direct - sigma * resolvent;
    Ok((f2, scalar))
}

fn f0_det_value<T: Real>(omega_plus: T, omega_minus: T, points: &[(T, T)], config: GridConfig<T>) -> Result<T> {
    let (f2, sc) = f0_determinant(omega_plus, omega_minus, points, config)?;
    Ok(f2 * sc)
}

const F0_STEP: f64 = 1e-3;

/// F0-transition law (1 + σ^{-1}Σ∂_{sⱼ}) det(1 + 𝒦𝒢), derivative by central
/// difference along (1,…,1).
pub fn f0_joint<T: Real>(omega_plus: T, omega_minus: T, points: &[(T, T)], config: GridConfig<T>) -> Result<T> {
    let sigma = omega_plus + omega_minus;
    if !(sigma > T::zero()) {
        return Err(Error::Unsupported("direct F0 route needs ω₊+ω₋ > 0".into()));
    }
    let h = lit::<T>(F0_STEP);
    let shift = |d: T| -> Vec<(T, T)> { points.iter().map(|&(t, s)| (t, s + d)).collect() };
    let d0 = f0_det_value(omega_plus, omega_minus, points, config)?;
    let dp = f0_det_value(omega_plus, omega_minus, &shift(h), config)?;
    let dm = f0_det_value(omega_plus, omega_minus, &shift(-h), config)?;
    Ok(d0 + (dp - dm) / (lit::<T>(2.0) * h * sigma))
}

/// One-point F0-transition law; for ω₊+ω₋ ≤ 0 the reference (Painlevé
/// route) is used.
pub fn f0_point<T: Real>(
    omega_plus: T,
    omega_minus: T,
    tau: T,
    s: T,
    config: GridConfig<T>,
    reference: Option<&dyn F0Reference<T>>,
) -> Result<T> {
    if omega_plus + omega_minus > T::zero() {
        return f0_joint(omega_plus, omega_minus, &[(tau, s)], config);
    }
    match reference {
        Some(r) => r.f0_reference(s, omega_plus - tau, omega_minus + tau),
        None => Err(Error::Unsupported("ω₊+ω₋ <= 0 needs the Painlevé route".into())),
    }
}

/// Fredholm values of the Baik-Rains functions at (s, ω).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOne<T> {
    pub a: T,
    pub b: T,
    pub f2: T,
}

impl<T: Real> RankOne<T> {
    /// F(s) = F₂(s)·a(s,ω).
    pub fn cdf(&self) -> T {
        self.f2 * self.a
    }
}

/// a = 1 − ⟨(1−𝒦₂χ)^{-1}A, Bχ⟩ and b = [(1−𝒦₂χ)^{-1}B](s).
pub fn rank_one_ab<T: Real>(s: T, omega: T, config: GridConfig<T>) -> Result<RankOne<T>> {
    let grid = QuadratureGrid::build(&[(T::zero(), s)], config, |_, u| {
        airy_tail(u) * (T::one() + b_transition_unchecked(u, omega).abs())
    })?;
    let op = DiscretizedOperator::assemble(&KernelSpec::ExtendedAiry, grid)?;
    let lu = Lu::new(&op.shifted())?;
    let f2 = lu.det();
    let slot = &op.grid.slots[0];
    let sw = op.grid.sqrt_weights();
    let wa: Vec<T> = slot.nodes.iter().zip(&sw).map(|(&x, &q)| q * airy_pair(x).0).collect();
    let wb: Vec<T> = slot.nodes.iter().zip(&sw).map(|(&x, &q)| q * b_transition_unchecked(x, omega)).collect();
    let y = lu.solve(&wa)?;
    let a = T::one() - wb.iter().zip(&y).map(|(&u, &v)| u * v).sum::<T>();
    let z = lu.solve(&wb)?;
    let k_s = extended_airy_block(T::zero(), &[s], T::zero(), &slot.nodes);
    let b = b_transition_unchecked(s, omega) + k_s[0].iter().zip(&sw).zip(&z).map(|((&k, &q), &zz)| k * q * zz).sum::<T>();
    Ok(RankOne { a, b, f2 })
}

pub fn normal_cdf<T: Real>(x: T) -> T {
    lit(0.5 * libm::erfc(-to_f64(x) / std::f64::consts::SQRT_2))
}

/// Which edge a Gaussian chain starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// β₁ < ⋯ < β_m < β₋.
    Left,
    /// β₊ < β₁ < ⋯ < β_m.
    Right,
}

const CHAIN_PANELS: usize = 12;
const CHAIN_SPAN: f64 = 10.0;

/// Edge-region joint law as an iterated Gaussian integral: the heights form
/// a Brownian path started at 0 at the edge β∓ and run away from it.
pub fn gaussian_joint<T: Real>(points: &[(T, T)], beta_edge: T, direction: Direction) -> Result<T> {
    if points.is_empty() {
        return domain("gaussian_joint needs at least one point");
    }
    if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return domain("gaussian_joint needs strictly increasing β");
    }
    // (distance from the edge, level), nearest point first
    let chain: Vec<(f64, f64)> = match direction {
        Direction::Left => {
            if !(points.last().unwrap().0 < beta_edge) {
                return domain("gaussian_joint (left) needs β < β₋");
            }
            points.iter().rev().map(|&(b, s)| (to_f64(beta_edge - b), to_f64(s))).collect()
        }
        Direction::Right => {
            if !(points[0].0 > beta_edge) {
                return domain("gaussian_joint (right) needs β > β₊");
            }
            points.iter().map(|&(b, s)| (to_f64(b - beta_edge), to_f64(s))).collect()
        }
    };
    let rules: Vec<Option<Rule<f64>>> = chain
        .iter()
        .map(|&(d, s)| {
            let lo = -CHAIN_SPAN * d.sqrt();
            let hi = s.min(CHAIN_SPAN * d.sqrt());
            (hi > lo).then(|| Rule::composite(16, CHAIN_PANELS, lo, hi))
        })
        .collect();
    if rules.iter().any(|r| r.is_none()) {
        return Ok(T::zero());
    }
    let rules: Vec<Rule<f64>> = rules.into_iter().map(|r| r.unwrap()).collect();
    // f_k(x) = P[points k+1.. below their levels | X_k = x]
    let n = chain.len();
    let mut f: Vec<f64> = vec![1.0; rules[n - 1].len()];
    for k in (0..n - 1).rev() {
        let var = chain[k + 1].0 - chain[k].0;
        let next = &rules[k + 1];
        f = rules[k]
            .nodes
            .iter()
            .map(|&x| {
                next.nodes
                    .iter()
                    .zip(&next.weights)
                    .zip(&f)
                    .map(|((&y, &w), &fy)| w * gaussian_density(y - x, var) * fy)
                    .sum()
            })
            .collect();
    }
    let first = &rules[0];
    let total: f64 = first
        .nodes
        .iter()
        .zip(&first.weights)
        .zip(&f)
        .map(|((&x, &w), &fx)| w * gaussian_density(x, chain[0].0) * fx)
        .sum();
    Ok(lit(total))
}

/// Product-Gaussian law at β_c.
pub fn beta_c_product_cdf<T: Real>(s: T, frame: &ScalingFrame<T>) -> Result<T> {
    let p = &frame.params;
    if !(p.gamma_plus * p.gamma_minus > T::one()) {
        return domain("the β_c law needs γ₊γ₋ > 1");
    }
    let cp = frame.critical;
    let bc = cp.beta_c.ok_or_else(|| Error::Domain("β_c undefined".into()))?;
    let dgm = crate::geometry::d_gauss(p.alpha, p.gamma_minus)?;
    let dgp = crate::geometry::d_gauss(p.alpha, p.gamma_plus)?;
    let v1 = cp.beta_minus - bc;
    let v2 = (bc - cp.beta_plus) * dgp * dgp / (dgm * dgm);
    if !(v1 > T::zero() && v2 > T::zero()) {
        return domain("β_c is not between β₊ and β₋");
    }
    if s == T::infinity() {
        return Ok(T::one());
    }
    Ok(normal_cdf(s / v1.sqrt()) * normal_cdf(s / v2.sqrt()))
}
