//! Gauss-Legendre rules and the interval maps built on them.

use crate::real::{lit, Real};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// ascending. Computed in `f64` by Newton iteration on P_n.
pub fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A quadrature rule: nodes and weights on some interval.
#[derive(Clone, Debug)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    /// n-point Gauss-Legendre on [a, b].
    pub fn gauss(n: usize, a: T, b: T) -> Self {
        let (x, w) = gauss_legendre_f64(n);
        let half = (b - a) * lit(0.5);
        let mid = (b + a) * lit(0.5);
        Rule {
            nodes: x.iter().map(|&xi| mid + half * lit(xi)).collect(),
            weights: w.iter().map(|&wi| half * lit(wi)).collect(),
        }
    }

    /// Composite Gauss-Legendre: `panels` equal panels of `n` nodes on [a, b].
    pub fn composite(n: usize, panels: usize, a: T, b: T) -> Self {
        let (x, w) = gauss_legendre_f64(n);
        let h = (b - a) / lit(panels as f64);
        let mut nodes = Vec::with_capacity(n * panels);
        let mut weights = Vec::with_capacity(n * panels);
        for p in 0..panels {
            let lo = a + h * lit(p as f64);
            let mid = lo + h * lit(0.5);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + h * lit(0.5 * xi));
                weights.push(h * lit(0.5 * wi));
            }
        }
        Rule { nodes, weights }
    }

    /// [0, cutoff] through λ = u/(1-u), Gauss-Legendre in u.
    pub fn mapped_half_line(n: usize, cutoff: T) -> Self {
        let umax = cutoff / (T::one() + cutoff);
        let base = Rule::gauss(n, T::zero(), umax);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (u, w) in base.nodes.iter().zip(&base.weights) {
            let om = T::one() - *u;
            nodes.push(*u / om);
            weights.push(*w / (om * om));
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Composite Simpson rule on uniformly spaced samples (odd trailing
/// interval handled with the trapezoid rule).
pub fn simpson<T: Real>(h: T, y: &[T]) -> T {
    let n = y.len();
    if n < 2 {
        return T::zero();
    }
    let m = if (n - 1) % 2 == 0 { n } else { n - 1 };
    let mut s = T::zero();
    if m >= 3 {
        s = y[0] + y[m - 1];
        for (i, &v) in y.iter().enumerate().take(m - 1).skip(1) {
            s += if i % 2 == 1 { v * lit(4.0) } else { v * lit(2.0) };
        }
        s = s * h / lit(3.0);
    }
    if m != n {
        s += (y[n - 2] + y[n - 1]) * h * lit(0.5);
    }
    s
}
