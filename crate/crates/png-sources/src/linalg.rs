//! Dense LU with partial pivoting; the matrices here are at most a few
//! hundred square.

use crate::error::{Error, Result};
use crate::real::Real;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    pub fn new(m: &Matrix<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        let n = m.n;
        let mut a = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let (p, _) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -T::one()), |best, c| if c.1 > best.1 { c } else { best });
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * n + k];
            if piv == T::zero() {
                continue;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        let v = a[k * n + j];
                        a[i * n + j] -= f * v;
                    }
                }
            }
        }
        Ok(Lu { n, lu: a, perm, sign })
    }

    pub fn det(&self) -> T {
        (0..self.n).fold(self.sign, |d, i| d * self.lu[i * self.n + i])
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            let d = self.lu[i * n + i];
            if d == T::zero() {
                return Err(Error::Numeric("singular matrix in solve".into()));
            }
            x[i] = s / d;
        }
        Ok(x)
    }
}

pub fn det<T: Real>(m: &Matrix<T>) -> Result<T> {
    Ok(Lu::new(m)?.det())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinant_and_solve() {
        let m = Matrix { n: 3, data: vec![0.0f64, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0] };
        let lu = Lu::new(&m).unwrap();
        assert!((lu.det() + 5.0).abs() < 1e-14);
        let x = lu.solve(&[3.0, 2.0, 4.0]).unwrap();
        let b = m.mul_vec(&x);
        for (u, v) in b.iter().zip([3.0, 2.0, 4.0]) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
