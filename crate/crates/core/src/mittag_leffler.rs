//! The one-parameter Mittag-Leffler function `E_β(z) = Σ zⁿ / Γ(βn + 1)`,
//! its derivatives in `z`, and the CTRW jump-count law built from them.
//!
//! Evaluation strategy on the real line:
//!
//! * `z ≥ 0`: the power series (all terms positive, no cancellation).
//! * `β = 1`: `E₁ = exp`.
//! * `0 < β < 1`, `z = −x < 0`: the power series with compensated summation
//!   when `x ≤ series_cutoff` and its largest term is smaller than the
//!   largest value of the Laplace integrand below. For small β the series
//!   at `z = −5` already has terms of size `e^{200}`, which no
//!   double-precision summation survives. Otherwise the asymptotic expansion
//!   `E_β(−x) ≈ Σ_{k≥1} (−1)^{k+1} x^{−k} / Γ(1 − βk)`, truncated at its
//!   smallest term, when that term is below tolerance, and failing that the
//!   Laplace representation
//!   `E_β(−x) = sin(βπ)/(βπ) ∫₀^∞ e^{−v^{1/β}} x / (v² + 2vx cos βπ + x²) dv`,
//!   differentiated in `x` under the integral sign.
//! * `1 < β ≤ 2`: the asymptotic expansion plus the oscillating exponential
//!   pair `(2/β) exp(x^{1/β} cos(π/β)) cos(x^{1/β} sin(π/β))` when its error
//!   is below rounding of the largest series term, else the power series
//!   while its terms stay within a budget.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::special::{gamma, ln_gamma, rgamma, CompensatedSum};

/// Stopping rules for the power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlEvalConfig {
    /// `|z|` up to which negative arguments may use the power series.
    pub series_cutoff: f64,
    pub max_terms: usize,
    /// Relative size of the last retained term.
    pub tolerance: f64,
}

impl Default for MlEvalConfig {
    fn default() -> Self {
        Self {
            series_cutoff: 5.0,
            max_terms: 5000,
            tolerance: 1e-17,
        }
    }
}

impl MlEvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_cutoff > 0.0) {
            return Err(Error::domain("series_cutoff", self.series_cutoff, "must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("tolerance", self.tolerance, "must be positive"));
        }
        if self.max_terms < 10 {
            return Err(Error::domain("max_terms", self.max_terms as f64, "must be at least 10"));
        }
        Ok(())
    }
}

// Largest series term, relative to the z = 0 value, tolerated for β > 1.
// Term errors are about 1e-16 relative each.
const PEAK_BUDGET_WIDE: f64 = 1e8;
const ASYMPTOTIC_REL_TOL: f64 = 1e-13;

/// `E_β(z)` with the default configuration.
pub fn ml(beta: f64, z: f64) -> Result<f64> {
    ml_derivative_with(beta, 0, z, &MlEvalConfig::default())
}

pub fn ml_with(beta: f64, z: f64, cfg: &MlEvalConfig) -> Result<f64> {
    ml_derivative_with(beta, 0, z, cfg)
}

/// `dⁿE_β/dzⁿ (z)` with the default configuration.
pub fn ml_derivative(beta: f64, n: u32, z: f64) -> Result<f64> {
    ml_derivative_with(beta, n, z, &MlEvalConfig::default())
}

pub fn ml_derivative_with(beta: f64, n: u32, z: f64, cfg: &MlEvalConfig) -> Result<f64> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::domain("beta", beta, "must lie in (0, 2]"));
    }
    if !z.is_finite() {
        return Err(Error::domain("z", z, "must be finite"));
    }
    cfg.validate()?;
    if z == 0.0 {
        // n! / Γ(βn + 1)
        return Ok(gamma(n as f64 + 1.0) * rgamma(beta * n as f64 + 1.0));
    }
    let series = Series { beta, n, z };
    if z > 0.0 {
        return series.sum(cfg);
    }
    let x = -z;
    let log_peak = series.log_term(series.peak_index());
    if beta == 1.0 {
        return if x <= cfg.series_cutoff && log_peak <= 0.0 {
            series.sum(cfg)
        } else {
            Ok(z.exp())
        };
    }
    if beta < 1.0 {
        // Both routes lose accuracy in proportion to the largest magnitude
        // they add up; take the smaller.
        let laplace = LaplaceForm::Derivative.log_bound(beta, n, x);
        if x <= cfg.series_cutoff && log_peak <= laplace {
            return series.sum(cfg);
        }
        if n == 0 {
            let (value, err) = asymptotic_negative(beta, x);
            if err <= ASYMPTOTIC_REL_TOL * value.abs() {
                return Ok(value);
            }
        }
        return laplace_negative(beta, n, x, LaplaceForm::Derivative);
    }
    if n == 0 {
        // rounding in the series grows with its largest term
        let (value, err) = asymptotic_negative(beta, x);
        if err <= f64::EPSILON * log_peak.exp() {
            log::debug!("E_{beta}({z}) from asymptotic expansion, error estimate {err:e}");
            return Ok(value);
        }
    }
    if log_peak - series.log_term(0) <= PEAK_BUDGET_WIDE.ln() {
        return series.sum(cfg);
    }
    Err(Error::NoConvergence {
        what: "Mittag-Leffler derivative (beta > 1 beyond the series range)",
        partial: f64::NAN,
    })
}

/// CTRW jump-count law `P(n, t) = t^{βn}/n! · E_β^{(n)}(−t^β)`.
///
/// At β = 1 this is the Poisson law with unit rate.
pub fn jump_count_pmf(beta: f64, t: f64, n: u32) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain("beta", beta, "must lie in (0, 1]"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("t", t, "must be non-negative"));
    }
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let nf = n as f64;
    if beta == 1.0 {
        return Ok((nf * t.ln() - t - ln_gamma(nf + 1.0)).exp());
    }
    let y = t.powf(beta);
    let log_prefactor = nf * y.ln() - ln_gamma(nf + 1.0);
    let series = Series { beta, n, z: -y };
    let series_bound = series.log_term(series.peak_index()) + log_prefactor;
    if series_bound <= LaplaceForm::JumpCount.log_bound(beta, n, y) {
        let cfg = MlEvalConfig::default();
        return Ok(log_prefactor.exp() * series.sum(&cfg)?);
    }
    laplace_negative(beta, n, y, LaplaceForm::JumpCount)
}

/// `Σ_m (m+n)!/m! · z^m / Γ(β(m+n)+1)`.
struct Series {
    beta: f64,
    n: u32,
    z: f64,
}

impl Series {
    fn log_term(&self, m: u64) -> f64 {
        let n = self.n as f64;
        let m = m as f64;
        ln_gamma(m + n + 1.0) - ln_gamma(m + 1.0) + m * self.z.abs().ln()
            - ln_gamma(self.beta * (m + n) + 1.0)
    }

    /// Index of the largest term magnitude (the log-term is concave in m).
    fn peak_index(&self) -> u64 {
        let rising = |m: u64| self.log_term(m + 1) > self.log_term(m);
        if !rising(0) {
            return 0;
        }
        let mut hi = 1u64;
        while rising(hi) {
            hi *= 2;
            if hi > 1 << 40 {
                return hi;
            }
        }
        let mut lo = hi / 2;
        // rising(lo) holds, rising(hi) fails
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if rising(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn term(&self, m: u64, z_pow: f64) -> f64 {
        let n = self.n as u64;
        let arg = self.beta * (m + n) as f64 + 1.0;
        let falling: f64 = (1..=n).map(|j| (m + j) as f64).product();
        let direct = falling * z_pow;
        if arg < 170.0 && direct.is_finite() && direct != 0.0 {
            direct * rgamma(arg)
        } else {
            let sign = if self.z < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
            sign * self.log_term(m).exp()
        }
    }

    fn sum(&self, cfg: &MlEvalConfig) -> Result<f64> {
        let peak = self.peak_index();
        let mut acc = CompensatedSum::new();
        let mut z_pow = 1.0;
        for m in 0..cfg.max_terms as u64 {
            let t = self.term(m, z_pow);
            acc.add(t);
            if m > peak {
                let s = acc.value();
                if t == 0.0 || t.abs() <= cfg.tolerance * s.abs() {
                    return Ok(s);
                }
            }
            z_pow *= self.z;
        }
        Err(Error::NoConvergence {
            what: "Mittag-Leffler power series",
            partial: acc.value(),
        })
    }
}

/// Asymptotic value of `E_β(−x)` and the first omitted term's magnitude.
fn asymptotic_negative(beta: f64, x: f64) -> (f64, f64) {
    let mut acc = CompensatedSum::new();
    if beta > 1.0 {
        let r = x.powf(1.0 / beta);
        let (s, c) = (PI / beta).sin_cos();
        acc.add(2.0 / beta * (r * c).exp() * (r * s).cos());
    }
    let mut last = f64::INFINITY;
    let mut seen = false;
    let mut x_pow = 1.0;
    for k in 1..400u32 {
        x_pow /= x;
        let term = x_pow * rgamma(1.0 - beta * k as f64);
        if term == 0.0 {
            continue;
        }
        if term.abs() >= last {
            return (acc.value(), term.abs());
        }
        last = term.abs();
        seen = true;
        acc.add(if k % 2 == 1 { term } else { -term });
    }
    (acc.value(), if seen { last } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LaplaceForm {
    /// `E_β^{(n)}(−x)`.
    Derivative,
    /// `xⁿ/n! · E_β^{(n)}(−x)`.
    JumpCount,
}

impl LaplaceForm {
    /// Log of a bound on the integrand magnitude, prefactor included.
    fn log_bound(self, beta: f64, n: u32, x: f64) -> f64 {
        let phi = PI * (1.0 - beta);
        // min over v of |x − v e^{iφ}| is x·s
        let s = if phi < FRAC_PI_2 { phi.sin() } else { 1.0 };
        let nf = n as f64;
        let scale = ((beta * PI).sin() / (beta * PI * phi.sin())).ln();
        match self {
            LaplaceForm::Derivative => scale + ln_gamma(nf + 1.0) - (nf + 1.0) * (x * s).ln(),
            LaplaceForm::JumpCount => scale - nf * s.ln() - (x * s).ln(),
        }
    }
}

fn laplace_negative(beta: f64, n: u32, x: f64, form: LaplaceForm) -> Result<f64> {
    // Roots of v² + 2vx cos βπ + x² in x are v·e^{±iφ}, φ = π(1 − β), and
    // x / ((x − ρ)(x − ρ̄)) = 2 Re[A / (x − ρ)] with A = e^{iφ} / (2i sin φ).
    let phi = PI * (1.0 - beta);
    let rot = Complex64::from_polar(1.0, phi);
    let a = rot / Complex64::new(0.0, 2.0 * phi.sin());
    let inv_beta = 1.0 / beta;
    let n_fact = gamma(n as f64 + 1.0);
    let integrand = move |v: f64| {
        let decay = (-v.powf(inv_beta)).exp();
        if decay == 0.0 {
            return 0.0;
        }
        let pole = Complex64::new(x, 0.0) - rot * v;
        let kernel = match (n, form) {
            (0, _) => x / pole.norm_sqr(),
            (_, LaplaceForm::Derivative) => 2.0 * n_fact * (a * pole.powi(-(n as i32 + 1))).re,
            (_, LaplaceForm::JumpCount) => {
                let ratio = Complex64::new(x, 0.0) / pole;
                2.0 * (a * ratio.powi(n as i32) / pole).re
            }
        };
        decay * kernel
    };
    let upper = 50f64.powf(beta);
    let mut breaks = vec![0.0, upper];
    for b in [1.0, x, x * (1.0 - beta)] {
        if b > 0.0 && b < upper {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let weight = (beta * PI).sin() / (beta * PI);
    // The n = 0 integrand is positive. Otherwise it oscillates in sign and
    // rounding noise of order ε times its peak cannot be integrated away.
    let abs = if n == 0 {
        0.0
    } else {
        1e-14 * (1.0 + x) * form.log_bound(beta, n, x).exp() / weight
    };
    let tol = Tolerance {
        abs,
        rel: 1e-14,
        max_intervals: 4000,
    };
    let est = quadrature::integrate_pieces(integrand, &breaks, tol)?;
    Ok(weight * est.value)
}
