//! Reference solutions of the space-fractional diffusion equation
//! `∂_t^β u = ∂^α_{|x|} u` with point-mass initial data.
//!
//! All densities are inverse Fourier transforms of even characteristic
//! functions, `(1/π) ∫₀^∞ cos(kx) F(k) dk`, evaluated by adaptive
//! Gauss–Kronrod on panels no wider than half an oscillation period.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mittag_leffler::ml;
use crate::quadrature::{self, Tolerance};
use crate::special::{erfc, gamma, rgamma, CompensatedSum};
use crate::stats::Tabulated;

/// Truncation and accuracy of the Fourier inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Upper frequency limit. `None` picks it from the decay of the
    /// transform (`e^{−k^α t} < 10⁻¹⁷`).
    pub k_max: Option<f64>,
    /// Minimum number of panels on `[0, k_max]`.
    pub panels: usize,
    pub abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            k_max: None,
            panels: 64,
            abs_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.k_max {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::domain("k_max", k, "must be positive"));
            }
        }
        if self.panels < 16 {
            return Err(Error::domain("panels", self.panels as f64, "must be at least 16"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain("abs_tol", self.abs_tol, "must be positive"));
        }
        Ok(())
    }
}

const DECAY_EXPONENT: f64 = 39.0;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha", alpha, "must lie in (0, 2]"));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("t", t, "must be positive"));
    }
    Ok(())
}

/// Classical heat kernel `(1/(2√(πt))) e^{−x²/(4t)}` (variance `2t`).
pub fn gaussian_green(x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((-x * x / (4.0 * t)).exp() / (2.0 * (PI * t).sqrt()))
}

/// `(1/π) ∫₀^upper cos(k|x|) f(k) dk` over half-period panels.
fn cosine_transform<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    upper: f64,
    panels: usize,
    abs_tol: f64,
) -> Result<f64> {
    let x = x.abs();
    let mut width = upper / panels as f64;
    if x > 0.0 {
        width = width.min(PI / x);
    }
    let count = (upper / width).ceil() as usize;
    let width = upper / count as f64;
    let tol = Tolerance {
        abs: abs_tol / count as f64,
        rel: 0.0,
        max_intervals: 200,
    };
    let g = |k: f64| (k * x).cos() * f(k);
    let mut acc = CompensatedSum::new();
    for i in 0..count {
        let a = i as f64 * width;
        let b = if i + 1 == count { upper } else { a + width };
        acc.add(quadrature::integrate(g, a, b, tol)?.value);
    }
    Ok(acc.value() / PI)
}

/// Symmetric α-stable density `L_α(x) = (1/π) ∫₀^∞ cos(kx) e^{−k^α} dk`.
pub fn levy_pdf(alpha: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_alpha(alpha)?;
    cfg.validate()?;
    if !x.is_finite() {
        return Err(Error::domain("x", x, "must be finite"));
    }
    let upper = cfg.k_max.unwrap_or(DECAY_EXPONENT.powf(1.0 / alpha));
    cosine_transform(|k| (-k.powf(alpha)).exp(), x, upper, cfg.panels, cfg.abs_tol)
}

/// Self-similar Green function `t^{−1/α} L_α(x t^{−1/α})`.
pub fn scaled_green(alpha: f64, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_alpha(alpha)?;
    check_time(t)?;
    let s = t.powf(-1.0 / alpha);
    Ok(s * levy_pdf(alpha, x * s, cfg)?)
}

/// Large-|x| constant: `L_α(x) ~ C |x|^{−1−α}` with
/// `C = Γ(1+α) sin(πα/2) / π`.
pub fn tail_constant(alpha: f64) -> f64 {
    gamma(1.0 + alpha) * (PI * alpha / 2.0).sin() / PI
}

/// `P(X > x)` for large `x` from the asymptotic series
/// `(1/π) Σ (−1)^{k+1} Γ(αk)/k! sin(παk/2) x^{−αk}`, truncated at its
/// smallest term.
pub fn levy_upper_tail(alpha: f64, x: f64) -> f64 {
    if alpha == 2.0 {
        // N(0, 2)
        return 0.5 * erfc(x / 2.0);
    }
    let mut acc = CompensatedSum::new();
    let mut last = f64::INFINITY;
    let mut k_fact = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        k_fact *= kf;
        // truncation judged on the envelope, the sine factor may vanish
        let envelope = gamma(alpha * kf) / k_fact * x.powf(-alpha * kf);
        if envelope > last {
            break;
        }
        last = envelope;
        let term = envelope * (PI * alpha * kf / 2.0).sin();
        acc.add(if k % 2 == 1 { term } else { -term });
    }
    (acc.value() / PI).max(0.0)
}

/// Tabulated CDF of `L_α` on a sinh-stretched grid, with the analytic tail
/// beyond the grid.
///
/// Nodes come from a cumulative trapezoid with the endpoint derivative
/// correction; values between nodes from cubic Hermite interpolation using
/// the density itself as slope. Both are fourth order in the grid step.
#[derive(Debug, Clone)]
pub struct LevyCdf {
    alpha: f64,
    scale: f64,
    du: f64,
    u_max: f64,
    x_max: f64,
    cdf: Vec<f64>,
    /// `dF/du` at the nodes.
    slope: Vec<f64>,
}

impl LevyCdf {
    pub fn new(alpha: f64, cfg: &QuadratureConfig, exec: Execution) -> Result<Self> {
        Self::with_grid(alpha, 2.0, 200.0, 0.0025, cfg, exec)
    }

    /// Grid `x = scale·sinh(u)`, `u ∈ [−asinh(x_max/scale), +…]` step `du`.
    pub fn with_grid(
        alpha: f64,
        scale: f64,
        x_max: f64,
        du: f64,
        cfg: &QuadratureConfig,
        exec: Execution,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let u_max = (x_max / scale).asinh();
        let half = (u_max / du).ceil() as usize;
        let du = u_max / half as f64;
        let count = 2 * half + 1;
        // symmetric: evaluate x ≥ 0 only
        let right = exec.map_indexed(half + 1, |i| {
            let u = i as f64 * du;
            let x = scale * u.sinh();
            levy_pdf(alpha, x, cfg).map(|p| p * scale * u.cosh())
        });
        let right = right.into_iter().collect::<Result<Vec<f64>>>()?;
        let slope: Vec<f64> = (0..count)
            .map(|i| right[(i as isize - half as isize).unsigned_abs()])
            .collect();
        // central differences; the end nodes sit deep in the tail
        let curvature = |i: usize| {
            if i == 0 || i + 1 == count {
                0.0
            } else {
                (slope[i + 1] - slope[i - 1]) / (2.0 * du)
            }
        };
        let mut cdf = Vec::with_capacity(count);
        let mut acc = CompensatedSum::new();
        acc.add(levy_upper_tail(alpha, x_max));
        cdf.push(acc.value());
        for i in 1..count {
            acc.add(0.5 * (slope[i - 1] + slope[i]) * du);
            acc.add(du * du / 12.0 * (curvature(i - 1) - curvature(i)));
            cdf.push(acc.value());
        }
        Ok(Self {
            alpha,
            scale,
            du,
            u_max,
            x_max,
            cdf,
            slope,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Total mass of the table including both analytic tails.
    pub fn total_mass(&self) -> f64 {
        self.cdf[self.cdf.len() - 1] + levy_upper_tail(self.alpha, self.x_max)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x >= self.x_max {
            return 1.0 - levy_upper_tail(self.alpha, x);
        }
        if x <= -self.x_max {
            return levy_upper_tail(self.alpha, -x);
        }
        let u = (x / self.scale).asinh() + self.u_max;
        let pos = u / self.du;
        let i = (pos.floor() as usize).min(self.cdf.len() - 2);
        let f = pos - i as f64;
        let (h00, h10) = ((1.0 + 2.0 * f) * (1.0 - f) * (1.0 - f), f * (1.0 - f) * (1.0 - f));
        let (h01, h11) = (f * f * (3.0 - 2.0 * f), f * f * (f - 1.0));
        h00 * self.cdf[i] + h01 * self.cdf[i + 1] + self.du * (h10 * self.slope[i] + h11 * self.slope[i + 1])
    }
}

/// Green function for `0 < β ≤ 1` with its tail-truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEvaluation {
    pub value: f64,
    pub tail_error: f64,
}

/// `(1/π) ∫₀^∞ cos(kx) E_β(−k^α t^β) dk` (symmetric case only).
///
/// For β < 1 the transform decays only like `k^{−α}`; the integral is
/// taken to the point where the Mittag-Leffler asymptotics hold and the
/// remainder is added analytically (x = 0) or by Euler-averaged
/// half-period panels (x ≠ 0).
pub fn green_pdf_detailed(
    alpha: f64,
    beta: f64,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<GreenEvaluation> {
    check_alpha(alpha)?;
    check_time(t)?;
    cfg.validate()?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain("beta", beta, "must lie in (0, 1]"));
    }
    if !x.is_finite() {
        return Err(Error::domain("x", x, "must be finite"));
    }
    let tb = t.powf(beta);
    let transform = |k: f64| ml(beta, -k.powf(alpha) * tb).unwrap_or(f64::NAN);
    let finish = |v: f64| -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NoConvergence {
                what: "Green function quadrature",
                partial: v,
            })
        }
    };
    if beta == 1.0 {
        let upper = cfg.k_max.unwrap_or((DECAY_EXPONENT / t).powf(1.0 / alpha));
        let v = cosine_transform(transform, x, upper, cfg.panels, cfg.abs_tol)?;
        return Ok(GreenEvaluation {
            value: finish(v)?,
            tail_error: 0.0,
        });
    }

    let xa = x.abs();
    let mut upper = cfg.k_max.unwrap_or((60.0 / tb).powf(1.0 / alpha));
    if xa > 0.0 {
        upper = (upper * xa / PI).ceil().max(1.0) * PI / xa;
    }
    let body = finish(cosine_transform(transform, x, upper, cfg.panels, cfg.abs_tol)?)?;
    let (tail, tail_error) = if xa == 0.0 {
        if alpha <= 1.0 {
            return Err(Error::domain(
                "x",
                x,
                "density diverges at the origin for alpha <= 1 when beta < 1",
            ));
        }
        power_tail(alpha, beta, tb, upper)
    } else {
        oscillatory_tail(&transform, xa, upper, cfg.abs_tol)?
    };
    let value = body + tail;
    Ok(GreenEvaluation {
        value: finish(value)?,
        tail_error,
    })
}

/// `green_pdf_detailed` returning the density only; warns when the tail
/// estimate exceeds `abs_tol`.
pub fn green_pdf(alpha: f64, beta: f64, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let g = green_pdf_detailed(alpha, beta, x, t, cfg)?;
    if g.tail_error > cfg.abs_tol {
        log::warn!(
            "slowly decaying transform (beta = {beta}): tail estimate {:e} exceeds abs_tol {:e}",
            g.tail_error,
            cfg.abs_tol
        );
    }
    Ok(g.value)
}

/// `(1/π) ∫_K^∞ E_β(−k^α t^β) dk` from the term-wise integrated asymptotic
/// series.
fn power_tail(alpha: f64, beta: f64, tb: f64, k: f64) -> (f64, f64) {
    let mut acc = CompensatedSum::new();
    let mut last = f64::INFINITY;
    for j in 1..60 {
        let jf = j as f64;
        let term = tb.powf(-jf) * rgamma(1.0 - beta * jf) * k.powf(1.0 - alpha * jf)
            / (alpha * jf - 1.0);
        if term == 0.0 {
            continue;
        }
        if term.abs() > last {
            return (acc.value() / PI, term.abs() / PI);
        }
        last = term.abs();
        acc.add(if j % 2 == 1 { term } else { -term });
    }
    (acc.value() / PI, last / PI)
}

/// Alternating half-period panels beyond `start`, summed with repeated
/// averaging of the partial sums.
fn oscillatory_tail<F: Fn(f64) -> f64>(
    transform: &F,
    x: f64,
    start: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    const PANELS: usize = 24;
    let half = PI / x;
    let tol = Tolerance {
        abs: abs_tol / PANELS as f64,
        rel: 0.0,
        max_intervals: 200,
    };
    let g = |k: f64| (k * x).cos() * transform(k);
    let mut partial = Vec::with_capacity(PANELS);
    let mut acc = 0.0;
    for i in 0..PANELS {
        let a = start + i as f64 * half;
        acc += quadrature::integrate(g, a, a + half, tol)?.value;
        partial.push(acc);
    }
    let mut level = partial;
    let mut previous = f64::NAN;
    while level.len() > 1 {
        previous = level[level.len() - 1];
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let value = level[0];
    Ok((value / PI, (value - previous).abs() / PI))
}

/// `u(x, t) = ∫ G(ξ, t) φ₀(x − ξ) dξ` on the grid of `phi0`, trapezoidal
/// in ξ, with `G` from [`scaled_green`].
pub fn convolve_initial(
    alpha: f64,
    t: f64,
    phi0: &Tabulated,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<Tabulated> {
    check_alpha(alpha)?;
    check_time(t)?;
    if let Some((i, &v)) = phi0
        .values
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(Error::Input(format!(
            "initial density must be finite and non-negative (index {i}: {v})"
        )));
    }
    let h = phi0.h;
    if h > t.powf(1.0 / alpha) {
        log::warn!(
            "grid spacing {h} exceeds the kernel width t^(1/alpha) = {}; convolution will be inaccurate",
            t.powf(1.0 / alpha)
        );
    }
    let n = phi0.len();
    let kernel = exec
        .map_indexed(n, |d| scaled_green(alpha, d as f64 * h, t, cfg))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let weight = |j: usize| if n > 1 && (j == 0 || j == n - 1) { 0.5 } else { 1.0 };
    let values = exec.map_indexed(n, |i| {
        let mut acc = CompensatedSum::new();
        for j in 0..n {
            acc.add(weight(j) * phi0.values[j] * kernel[i.abs_diff(j)]);
        }
        acc.value() * h
    });
    Tabulated::new(phi0.x0, h, values)
}
