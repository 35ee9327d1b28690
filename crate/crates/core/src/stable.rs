//! Stable laws: characteristic functions and exact samplers.
//!
//! Univariate laws use the four-parameter characteristic function
//!
//! ```text
//! φ(t) = exp(i t μ − |σ t|^α (1 − i β sgn(t) Φ(t))),
//! Φ(t) = tan(πα/2)        (α ≠ 1)
//!      = −(2/π) log|t|    (α = 1)
//! ```
//!
//! and are drawn with the Chambers–Mallows–Stuck transform of a uniform
//! angle and a unit exponential. Note that Φ changes form at α = 1, and the
//! skewed α = 1 sampler uses the separate logarithmic branch.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Four-parameter stable law `S(α, β, σ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            sigma,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric law `S(α, 0, σ, 0)`.
    pub fn symmetric(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(alpha, 0.0, sigma, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::domain("alpha", self.alpha, "must lie in (0, 2]"));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::domain("beta", self.beta, "must lie in [-1, 1]"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain("sigma", self.sigma, "must be positive"));
        }
        if !self.mu.is_finite() {
            return Err(Error::domain("mu", self.mu, "must be finite"));
        }
        Ok(())
    }
}

/// Characteristic function of `params` at `t`.
pub fn characteristic_function(params: &StableParams, t: f64) -> Result<Complex64> {
    params.validate()?;
    if !t.is_finite() {
        return Err(Error::domain("t", t, "must be finite"));
    }
    let StableParams {
        alpha,
        beta,
        sigma,
        mu,
    } = *params;
    let drift = Complex64::new(0.0, t * mu);
    if t == 0.0 {
        return Ok(drift.exp());
    }
    let phi = if alpha == 1.0 {
        -2.0 / PI * t.abs().ln()
    } else if alpha == 2.0 {
        0.0
    } else {
        (PI * alpha / 2.0).tan()
    };
    let scale = (sigma * t).abs().powf(alpha);
    let skew = Complex64::new(1.0, -beta * t.signum() * phi);
    Ok((drift - scale * skew).exp())
}

#[derive(Debug, Clone, Copy)]
enum Transform {
    Cauchy,
    Symmetric {
        alpha: f64,
        inv_alpha: f64,
        tail_exp: f64,
    },
    Skewed {
        alpha: f64,
        inv_alpha: f64,
        tail_exp: f64,
        shift: f64,
        scale: f64,
    },
    SkewedCauchy {
        beta: f64,
    },
}

/// Precomputed Chambers–Mallows–Stuck sampler for one [`StableParams`].
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    params: StableParams,
    transform: Transform,
    offset: f64,
}

impl StableSampler {
    pub fn new(params: StableParams) -> Result<Self> {
        params.validate()?;
        let StableParams {
            alpha,
            beta,
            sigma,
            ..
        } = params;
        let mut offset = 0.0;
        let transform = if alpha == 1.0 {
            if beta == 0.0 {
                Transform::Cauchy
            } else {
                offset = 2.0 / PI * beta * sigma * sigma.ln();
                Transform::SkewedCauchy { beta }
            }
        } else if beta == 0.0 || alpha == 2.0 {
            Transform::Symmetric {
                alpha,
                inv_alpha: 1.0 / alpha,
                tail_exp: (1.0 - alpha) / alpha,
            }
        } else {
            let tan = beta * (PI * alpha / 2.0).tan();
            Transform::Skewed {
                alpha,
                inv_alpha: 1.0 / alpha,
                tail_exp: (1.0 - alpha) / alpha,
                shift: tan.atan() / alpha,
                scale: (1.0 + tan * tan).powf(0.5 / alpha),
            }
        };
        Ok(Self {
            params,
            transform,
            offset,
        })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    /// Draw of the standardized law `S(α, β, 1, 0)`.
    pub fn draw_standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        let v = PI * (u - 0.5);
        match self.transform {
            Transform::Cauchy => v.tan(),
            Transform::Symmetric {
                alpha,
                inv_alpha,
                tail_exp,
            } => {
                let w: f64 = Exp1.sample(rng);
                (alpha * v).sin() / v.cos().powf(inv_alpha)
                    * ((v - alpha * v).cos() / w).powf(tail_exp)
            }
            Transform::Skewed {
                alpha,
                inv_alpha,
                tail_exp,
                shift,
                scale,
            } => {
                let w: f64 = Exp1.sample(rng);
                let arg = alpha * (v + shift);
                scale * arg.sin() / v.cos().powf(inv_alpha) * ((v - arg).cos() / w).powf(tail_exp)
            }
            Transform::SkewedCauchy { beta } => {
                let w: f64 = Exp1.sample(rng);
                let lever = FRAC_PI_2 + beta * v;
                2.0 / PI * (lever * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / lever).ln())
            }
        }
    }

    /// Draw of the configured law; σ enters as a final multiplication.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.draw_standard(rng);
        self.params.sigma * x + (self.offset + self.params.mu)
    }
}

/// `n` draws from `params` on `stream`.
pub fn sample_stable(params: &StableParams, stream: RandomStream, n: usize) -> Result<Vec<f64>> {
    let sampler = StableSampler::new(*params)?;
    let mut rng = stream.rng();
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}

/// Parameters of the one-sided mixing law used by the subgaussian
/// construction: `S(α/2, 1, cos(πα/4)^{2/α}, 0)`.
pub fn one_sided_params(alpha_target: f64) -> Result<StableParams> {
    if !(alpha_target > 0.0 && alpha_target < 2.0) {
        return Err(Error::domain(
            "alpha",
            alpha_target,
            "must lie in (0, 2); alpha = 2 is the Gaussian case and needs no mixing variable",
        ));
    }
    StableParams::new(
        alpha_target / 2.0,
        1.0,
        (PI * alpha_target / 4.0).cos().powf(2.0 / alpha_target),
        0.0,
    )
}

/// Sampler for the positive law of [`one_sided_params`].
///
/// With index `a = α/2 < 1`, `β = 1` the CMS shift is exactly π/2 and the
/// scale constants cancel, leaving Kanter's representation. Its Laplace
/// transform is `E e^{−λS} = exp(−λ^a)`.
#[derive(Debug, Clone, Copy)]
pub struct OneSidedSampler {
    index: f64,
    inv_index: f64,
    tail_exp: f64,
}

impl OneSidedSampler {
    pub fn new(alpha_target: f64) -> Result<Self> {
        let p = one_sided_params(alpha_target)?;
        Ok(Self {
            index: p.alpha,
            inv_index: 1.0 / p.alpha,
            tail_exp: (1.0 - p.alpha) / p.alpha,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        let w: f64 = Exp1.sample(rng);
        // v + π/2 = π·u lies in (0, π)
        let v = PI * (u - 0.5);
        let arg = self.index * PI * u;
        arg.sin() / v.cos().powf(self.inv_index) * ((v - arg).cos() / w).powf(self.tail_exp)
    }
}

/// `n` strictly positive draws from `S(α/2, 1, cos(πα/4)^{2/α}, 0)`.
pub fn sample_one_sided_s(alpha_target: f64, stream: RandomStream, n: usize) -> Result<Vec<f64>> {
    let sampler = OneSidedSampler::new(alpha_target)?;
    let mut rng = stream.rng();
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}

/// Elliptical (subgaussian) stable law on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticalParams {
    pub alpha: f64,
    /// Symmetric positive-definite shape matrix.
    pub q: [[f64; 2]; 2],
    pub mu: [f64; 2],
}

impl EllipticalParams {
    pub fn new(alpha: f64, q: [[f64; 2]; 2], mu: [f64; 2]) -> Result<Self> {
        let p = Self { alpha, q, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn isotropic(alpha: f64, scale: f64) -> Result<Self> {
        Self::new(alpha, [[scale, 0.0], [0.0, scale]], [0.0, 0.0])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::domain("alpha", self.alpha, "must lie in (0, 2]"));
        }
        validate_spd(&self.q)?;
        if !(self.mu[0].is_finite() && self.mu[1].is_finite()) {
            return Err(Error::Input("location must be finite".into()));
        }
        Ok(())
    }

    /// Characteristic function of the law drawn by [`SubgaussianSampler`]:
    /// `exp(i tᵀμ − |tᵀQt|^{α/2})` for α < 2 and the normal law
    /// `N(μ, Q)`, i.e. `exp(i tᵀμ − tᵀQt/2)`, at α = 2.
    pub fn characteristic_function(&self, t: [f64; 2]) -> Complex64 {
        let q = &self.q;
        let quad = t[0] * (q[0][0] * t[0] + q[0][1] * t[1]) + t[1] * (q[1][0] * t[0] + q[1][1] * t[1]);
        let decay = if self.alpha == 2.0 {
            0.5 * quad
        } else {
            quad.abs().powf(self.alpha / 2.0)
        };
        Complex64::new(-decay, t[0] * self.mu[0] + t[1] * self.mu[1]).exp()
    }
}

/// Checks that `q` is symmetric with two positive eigenvalues.
pub fn validate_spd(q: &[[f64; 2]; 2]) -> Result<()> {
    let finite = q.iter().flatten().all(|v| v.is_finite());
    if !finite || q[0][1] != q[1][0] {
        return Err(Error::Input(format!("matrix {q:?} is not symmetric")));
    }
    let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    if !(q[0][0] > 0.0 && det > 0.0) {
        return Err(Error::Input(format!("matrix {q:?} is not positive definite")));
    }
    Ok(())
}

/// Lower Cholesky factor of a 2×2 SPD matrix.
pub fn cholesky_2x2(q: &[[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    validate_spd(q)?;
    let l00 = q[0][0].sqrt();
    let l10 = q[1][0] / l00;
    let l11 = (q[1][1] - l10 * l10).sqrt();
    Ok([[l00, 0.0], [l10, l11]])
}

/// Sampler for [`EllipticalParams`].
///
/// For α < 2 a draw is `√S · G + μ` with `S` from [`OneSidedSampler`] and
/// `G ~ N(0, 2Q)`; this reproduces the characteristic function
/// `exp(−|tᵀQt|^{α/2})` exactly (the one-sided law has Laplace transform
/// `exp(−λ^{α/2})`). At α = 2 the mixing variable degenerates and draws
/// are plain `N(μ, Q)`.
#[derive(Debug, Clone, Copy)]
pub struct SubgaussianSampler {
    chol: [[f64; 2]; 2],
    mu: [f64; 2],
    mixing: Option<OneSidedSampler>,
}

impl SubgaussianSampler {
    pub fn new(params: &EllipticalParams) -> Result<Self> {
        params.validate()?;
        let mixing = if params.alpha < 2.0 {
            Some(OneSidedSampler::new(params.alpha)?)
        } else {
            None
        };
        Ok(Self {
            chol: cholesky_2x2(&params.q)?,
            mu: params.mu,
            mixing,
        })
    }

    /// Centered draw (location not added).
    pub fn draw_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let radial = match &self.mixing {
            Some(s) => (2.0 * s.draw(rng)).sqrt(),
            None => 1.0,
        };
        let n0: f64 = StandardNormal.sample(rng);
        let n1: f64 = StandardNormal.sample(rng);
        let l = &self.chol;
        [radial * (l[0][0] * n0), radial * (l[1][0] * n0 + l[1][1] * n1)]
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let z = self.draw_centered(rng);
        [z[0] + self.mu[0], z[1] + self.mu[1]]
    }
}

/// `n` draws from the elliptical law.
pub fn sample_subgaussian_2d(
    params: &EllipticalParams,
    stream: RandomStream,
    n: usize,
) -> Result<Vec<[f64; 2]>> {
    let sampler = SubgaussianSampler::new(params)?;
    let mut rng = stream.rng();
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}
