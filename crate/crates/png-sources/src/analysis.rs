//! Empirical distributions and their comparison with theoretical CDFs.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::png_model::ModelParams;
use crate::real::{lit, Real};

/// Where a sample came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance<T> {
    pub params: ModelParams<T>,
    pub n: usize,
    pub seed: u64,
}

/// Sorted sample values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample<T> {
    values: Vec<T>,
    pub provenance: Option<Provenance<T>>,
}

impl<T: Real> EmpiricalSample<T> {
    /// Sorts the values; NaNs are rejected.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return domain("empty sample");
        }
        if values.iter().any(|v| v.is_nan()) {
            return domain("sample contains NaN");
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalSample { values, provenance: None })
    }

    pub fn with_provenance(mut self, p: Provenance<T>) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }
}

/// Fraction of the sample ≤ s.
pub fn ecdf<T: Real>(sample: &EmpiricalSample<T>, s: T) -> T {
    let k = sample.values.partition_point(|&v| v <= s);
    lit::<T>(k as f64) / lit(sample.count() as f64)
}

/// sup |ecdf − cdf|, checked on both sides of every jump.
pub fn ks_distance<T: Real>(sample: &EmpiricalSample<T>, cdf: impl Fn(T) -> T) -> T {
    let n = lit::<T>(sample.count() as f64);
    let v = &sample.values;
    let mut d = T::zero();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        let below = lit::<T>(i as f64) / n;
        let above = lit::<T>((j + 1) as f64) / n;
        d = d.max((f - below).abs()).max((f - above).abs());
        i = j + 1;
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments<T> {
    pub mean: T,
    /// With the n − 1 denominator.
    pub sd: T,
    /// Adjusted Fisher-Pearson skewness; `None` below 3 values or for sd = 0.
    pub skewness: Option<T>,
    /// Bias-corrected excess kurtosis; `None` below 4 values or for sd = 0.
    pub kurtosis: Option<T>,
}

pub fn sample_moments<T: Real>(sample: &EmpiricalSample<T>) -> Result<SampleMoments<T>> {
    let n = sample.count();
    if n < 2 {
        return domain("sample moments need at least two values");
    }
    let nf = lit::<T>(n as f64);
    let mean = sample.values.iter().copied().sum::<T>() / nf;
    let (mut m2, mut m3, mut m4) = (T::zero(), T::zero(), T::zero());
    for &x in &sample.values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let sd = (m2 * nf / (nf - T::one())).sqrt();
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let skewness = (n >= 3 && m2 > T::zero())
        .then(|| m3 / m2.powf(lit(1.5)) * (nf * (nf - one)).sqrt() / (nf - two));
    let kurtosis = (n >= 4 && m2 > T::zero()).then(|| {
        let g2 = m4 / (m2 * m2) - three;
        ((nf + one) * g2 + lit(6.0)) * (nf - one) / ((nf - two) * (nf - three))
    });
    Ok(SampleMoments { mean, sd, skewness, kurtosis })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin<T> {
    pub lo: T,
    pub hi: T,
    pub count: usize,
    /// count / (n · width)
    pub density: T,
}

/// Equal-width histogram over [lo, hi]; values outside are counted in the
/// normalisation but not binned.
pub fn histogram<T: Real>(sample: &EmpiricalSample<T>, lo: T, hi: T, bins: usize) -> Result<Vec<Bin<T>>> {
    if bins == 0 || !(hi > lo) {
        return domain("histogram needs bins > 0 and hi > lo");
    }
    let width = (hi - lo) / lit(bins as f64);
    let mut counts = vec![0usize; bins];
    for &v in &sample.values {
        if v >= lo && v <= hi {
            let k = ((v - lo) / width).to_usize().unwrap_or(0).min(bins - 1);
            counts[k] += 1;
        }
    }
    let n = lit::<T>(sample.count() as f64);
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let a = lo + width * lit(k as f64);
            Bin { lo: a, hi: a + width, count: c, density: lit::<T>(c as f64) / (n * width) }
        })
        .collect())
}

/// Central-difference density of a CDF, for plotting next to a histogram.
pub fn density_from_cdf<T: Real>(cdf: impl Fn(T) -> T, x: T, h: T) -> T {
    (cdf(x + h) - cdf(x - h)) / (h + h)
}
