//! Test instruments: empirical characteristic functions, Kolmogorov–Smirnov
//! statistics, quantiles and uniformly tabulated densities.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::CompensatedSum;

/// `(1/n) Σ exp(i t xⱼ)`.
pub fn empirical_cf(samples: &[f64], t: f64) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::Input("empirical_cf of an empty sample".into()));
    }
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for &x in samples {
        let (s, c) = (t * x).sin_cos();
        re.add(c);
        im.add(s);
    }
    let n = samples.len() as f64;
    Ok(Complex64::new(re.value() / n, im.value() / n))
}

/// `(1/n) Σ exp(i ⟨t, zⱼ⟩)` for planar samples.
pub fn empirical_cf_2d(samples: &[[f64; 2]], t: [f64; 2]) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::Input("empirical_cf of an empty sample".into()));
    }
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for z in samples {
        let (s, c) = (t[0] * z[0] + t[1] * z[1]).sin_cos();
        re.add(c);
        im.add(s);
    }
    let n = samples.len() as f64;
    Ok(Complex64::new(re.value() / n, im.value() / n))
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Input("empty sample".into()));
    }
    if let Some((i, &v)) = samples.iter().enumerate().find(|(_, v)| v.is_nan()) {
        return Err(Error::NonFinite { index: i, value: v });
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS statistic `sup |F_n − F|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    let v = sorted(samples)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Quantile of sorted data by linear interpolation between order
/// statistics (position `p·(n−1)`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn median(samples: &[f64]) -> Result<f64> {
    Ok(quantile_sorted(&sorted(samples)?, 0.5))
}

/// Density values on the uniform grid `x_i = x0 + i·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl Tabulated {
    pub fn new(x0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !x0.is_finite() {
            return Err(Error::Input(format!("bad grid x0={x0}, h={h}")));
        }
        if values.is_empty() {
            return Err(Error::Input("empty tabulation".into()));
        }
        Ok(Self { x0, h, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(x0: f64, h: f64, len: usize, f: F) -> Result<Self> {
        Self::new(x0, h, (0..len).map(|i| f(x0 + i as f64 * h)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len() - 1)
    }

    /// Trapezoidal integral over the tabulated range.
    pub fn integral(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mut s: CompensatedSum = self.values.iter().copied().collect();
        s.add(-0.5 * (self.values[0] + self.values[n - 1]));
        s.value() * self.h
    }

    /// Linear interpolation, zero outside the tabulated range.
    pub fn interpolate(&self, x: f64) -> f64 {
        let u = (x - self.x0) / self.h;
        if u < 0.0 || u > (self.len() - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.len().saturating_sub(2));
        if self.len() == 1 {
            return self.values[0];
        }
        let f = u - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// Cumulative trapezoid, normalized to end at the total integral.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut acc = CompensatedSum::new();
        out.push(0.0);
        for w in self.values.windows(2) {
            acc.add(0.5 * (w[0] + w[1]) * self.h);
            out.push(acc.value());
        }
        out
    }

    /// Rectangle-rule mass of the cells with `|x| > threshold`.
    pub fn tail_mass(&self, threshold: f64) -> f64 {
        let s: CompensatedSum = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.x(*i).abs() > threshold)
            .map(|(_, v)| *v)
            .collect();
        s.value() * self.h
    }

    pub fn same_grid(&self, other: &Tabulated) -> bool {
        let tol = 1e-9 * self.h.max(other.h);
        self.len() == other.len()
            && (self.x0 - other.x0).abs() <= tol
            && (self.h - other.h).abs() <= 1e-12 * self.h
    }
}
