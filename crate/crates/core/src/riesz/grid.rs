use crate::error::{Error, Result};

/// Uniform space-time lattice: `x_i = a + ih` for `i = 0..=M`, `t_n = nτ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    /// Cell count; the lattice has `M + 1` sites.
    pub m: usize,
    pub h: f64,
    /// Number of time steps.
    pub n: usize,
    pub tau: f64,
    pub t_final: f64,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, m: usize, n: usize, t_final: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Input(format!("domain ({a}, {b}) must satisfy a < b")));
        }
        if m < 2 || m % 2 != 0 {
            return Err(Error::domain("M", m as f64, "must be a positive even integer"));
        }
        if n == 0 {
            return Err(Error::domain("N", 0.0, "must be at least 1"));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::domain("T", t_final, "must be positive"));
        }
        Ok(Self {
            a,
            b,
            m,
            h: (b - a) / m as f64,
            n,
            tau: t_final / n as f64,
            t_final,
        })
    }

    /// Middle index `M₂ = M/2`.
    pub fn mid(&self) -> usize {
        self.m / 2
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.tau
    }

    /// Step index nearest to `t`; errors outside `[0, T]`.
    pub fn nearest_step(&self, t: f64) -> Result<usize> {
        let slack = 0.5 * self.tau;
        if !(t >= -slack && t <= self.t_final + slack) {
            return Err(Error::domain("snapshot time", t, "must lie in [0, T]"));
        }
        Ok(((t / self.tau).round().max(0.0) as usize).min(self.n))
    }

    /// Period of the lattice, `(M + 1) h`.
    pub fn period(&self) -> f64 {
        self.len() as f64 * self.h
    }
}

/// Lattice values `U_i` at time step `step_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub values: Vec<f64>,
    pub step_index: usize,
    pub time: f64,
}

impl DensityField {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            step_index: 0,
            time: 0.0,
        }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &GridSpec, f: F) -> Self {
        Self::new(grid.points().into_iter().map(f).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn negative_count(&self) -> usize {
        self.values.iter().filter(|v| **v < 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassRule {
    #[default]
    Rectangle,
    /// Half weight on the two end sites.
    Trapezoid,
}

pub fn total_mass(values: &[f64], h: f64, rule: MassRule) -> f64 {
    let sum: f64 = values.iter().sum();
    match (rule, values) {
        (MassRule::Trapezoid, [first, .., last]) => h * (sum - 0.5 * (first + last)),
        _ => h * sum,
    }
}
