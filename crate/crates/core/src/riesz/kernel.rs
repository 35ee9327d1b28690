use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// `g_j = (−1)^j C(α, j)` for `j = 0..=count`, by the recurrence
/// `g_j = g_{j−1} (j − 1 − α) / j`.
pub fn grunwald_coefficients(alpha: f64, count: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(count + 1);
    g.push(1.0);
    for j in 1..=count {
        let jf = j as f64;
        g.push(g[j - 1] * (jf - 1.0 - alpha) / jf);
    }
    g
}

/// Shifted second-order weights `w_0 = (α/2) g_0`,
/// `w_j = (α/2) g_j + ((2−α)/2) g_{j−1}`.
pub fn scheme_weights(alpha: f64, count: usize) -> Vec<f64> {
    let g = grunwald_coefficients(alpha, count);
    let (l1, l2) = (alpha / 2.0, (2.0 - alpha) / 2.0);
    let mut w = Vec::with_capacity(count + 1);
    w.push(l1 * g[0]);
    for j in 1..=count {
        w.push(l1 * g[j] + l2 * g[j - 1]);
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeKernel {
    pub alpha: f64,
    /// `1 / (2 cos(απ/2))`, negative on `(1, 2]`.
    pub c_alpha: f64,
    /// `D τ c_α / h^α`.
    pub r: f64,
    pub g: Vec<f64>,
    pub w: Vec<f64>,
    /// Length `M + 1`, symmetric about index `M/2`.
    pub stencil: Vec<f64>,
}

impl SchemeKernel {
    /// Stencil that leaves every state unchanged.
    pub fn identity(m: usize) -> Self {
        let mut stencil = vec![0.0; m + 1];
        stencil[m / 2] = 1.0;
        Self {
            alpha: f64::NAN,
            c_alpha: 0.0,
            r: 0.0,
            g: Vec::new(),
            w: Vec::new(),
            stencil,
        }
    }

    pub fn m(&self) -> usize {
        self.stencil.len() - 1
    }

    pub fn mid(&self) -> usize {
        self.m() / 2
    }

    /// `Σ stencil`: the factor applied to a constant state, and to the
    /// total rectangle-rule mass, each step.
    pub fn mass_multiplier(&self) -> f64 {
        self.stencil.iter().sum()
    }
}

pub fn build_kernel(alpha: f64, grid: &GridSpec, d: f64) -> Result<SchemeKernel> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha", alpha, "must lie in (1, 2]"));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::domain("D", d, "must be positive"));
    }
    let m = grid.m;
    let m2 = grid.mid();
    let c_alpha = if alpha == 2.0 {
        -0.5
    } else {
        1.0 / (2.0 * (alpha * PI / 2.0).cos())
    };
    let r = d * grid.tau * c_alpha / grid.h.powf(alpha);
    let g = grunwald_coefficients(alpha, m2 + 1);
    let w = scheme_weights(alpha, m2 + 1);

    // Row i = M₂ of U + r(Σ_k w_k U_{i−k+1} + Σ_k w_k U_{i+k−1}) with the
    // sign of the Riesz operator folded in.
    let mut stencil = vec![0.0; m + 1];
    stencil[m2] = 1.0;
    for k in 0..=m2 + 1 {
        stencil[m2 + 1 - k] -= r * w[k];
    }
    for k in 0..=m - m2 + 1 {
        stencil[m2 + k - 1] -= r * w[k];
    }
    Ok(SchemeKernel {
        alpha,
        c_alpha,
        r,
        g,
        w,
        stencil,
    })
}

/// Index map `p ↦ (p + i − M₂) mod (M + 1)`: reading the state through it
/// puts site `i` at the middle position.
pub fn permutation_indices(i: usize, m: usize) -> Result<Vec<usize>> {
    if i > m {
        return Err(Error::Input(format!("index {i} outside 0..={m}")));
    }
    let n = m + 1;
    let shift = (i + n - m / 2) % n;
    Ok((0..n).map(|p| (p + shift) % n).collect())
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (p, &q) in perm.iter().enumerate() {
        inv[q] = p;
    }
    inv
}

/// Moduli of the eigenvalues of the circulant update matrix.
pub fn amplification_spectrum(kernel: &SchemeKernel) -> Vec<f64> {
    rotated_spectrum(kernel).iter().map(|z| z.norm()).collect()
}

/// DFT of the stencil rotated so that its middle entry sits at index 0.
pub(super) fn rotated_spectrum(kernel: &SchemeKernel) -> Vec<Complex64> {
    let n = kernel.stencil.len();
    let mid = kernel.mid();
    let mut buf: Vec<Complex64> = (0..n)
        .map(|q| Complex64::new(kernel.stencil[(q + mid) % n], 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, rgamma};
    use proptest::prelude::*;

    fn gamma_formula(alpha: f64, j: usize) -> f64 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * gamma(alpha + 1.0) * rgamma(alpha - j as f64 + 1.0) * rgamma(j as f64 + 1.0)
    }

    #[test]
    fn grunwald_small_cases() {
        assert_eq!(grunwald_coefficients(2.0, 5), vec![1.0, -2.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(grunwald_coefficients(1.5, 2), vec![1.0, -1.5, 0.375]);
        for j in 0..=50 {
            for alpha in [1.2, 1.5, 1.8] {
                let g = grunwald_coefficients(alpha, 50)[j];
                let want = gamma_formula(alpha, j);
                assert!((g - want).abs() <= 1e-10 * want.abs(), "{alpha} {j}");
            }
        }
    }

    #[test]
    fn grunwald_partial_sums_shrink() {
        for alpha in [1.2, 1.5, 1.8] {
            let g = grunwald_coefficients(alpha, 200);
            let partial: Vec<f64> = g
                .iter()
                .scan(0.0, |s, x| {
                    *s += x;
                    Some(s.abs())
                })
                .collect();
            for j in 2..200 {
                assert!(partial[j + 1] < partial[j], "{alpha} {j}");
            }
            assert!(partial[200] < 0.01);
        }
    }

    #[test]
    fn weights_examples() {
        let w = scheme_weights(1.5, 2);
        assert_eq!(w, vec![0.75, -0.875, -0.09375]);
        assert_eq!(scheme_weights(2.0, 4), vec![1.0, -2.0, 1.0, 0.0, 0.0]);
        assert_eq!(scheme_weights(1.3, 7).len(), 8);
    }

    #[test]
    fn heat_stencil_at_alpha_two() {
        let grid = GridSpec::new(-3.0, 3.0, 300, 199, 0.005).unwrap();
        let k = build_kernel(2.0, &grid, 0.02).unwrap();
        let nu = 0.02 * grid.tau / (grid.h * grid.h);
        assert!((nu - 1.256_281_407_035_176e-3).abs() < 1e-15);
        for (i, s) in k.stencil.iter().enumerate() {
            let want = match i.abs_diff(150) {
                0 => 1.0 - 2.0 * nu,
                1 => nu,
                _ => 0.0,
            };
            assert!((s - want).abs() <= 1e-14, "{i}");
        }
    }

    #[test]
    fn kernel_shape() {
        let grid = GridSpec::new(-3.0, 3.0, 300, 199, 0.005).unwrap();
        let k = build_kernel(1.5, &grid, 1.0).unwrap();
        assert!(k.c_alpha < 0.0);
        assert_eq!(k.stencil.len(), 301);
        assert_eq!(k.w.len(), 152);
        for d in 0..=150 {
            assert_eq!(k.stencil[150 + d], k.stencil[150 - d]);
        }
        assert!((k.stencil[150] - (1.0 - 2.0 * k.r * k.w[1])).abs() < 1e-15);
        assert!((k.stencil[151] + k.r * (k.w[0] + k.w[2])).abs() < 1e-15);
        assert!((k.stencil[160] + k.r * k.w[11]).abs() < 1e-15);
        assert!((k.stencil[300] + k.r * k.w[151]).abs() < 1e-15);
        assert!(k.mass_multiplier() < 1.0);
        assert!(build_kernel(1.0, &grid, 1.0).is_err());
        assert!(build_kernel(2.5, &grid, 1.0).is_err());
        assert!(build_kernel(1.5, &grid, 0.0).is_err());
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_indices(2, 4).unwrap(), vec![0, 1, 2, 3, 4]);
        let p = permutation_indices(1, 4).unwrap();
        assert_eq!(p, vec![4, 0, 1, 2, 3]);
        assert_eq!(p[2], 1);
        assert!(permutation_indices(5, 4).is_err());
    }

    #[test]
    fn permutations_are_bijections() {
        for m in [4, 8, 16, 64] {
            for i in 0..=m {
                let p = permutation_indices(i, m).unwrap();
                let inv = inverse_permutation(&p);
                let mut seen = vec![false; m + 1];
                for &q in &p {
                    assert!(!seen[q]);
                    seen[q] = true;
                }
                let v: Vec<usize> = (0..=m).map(|k| k * 7 + 1).collect();
                let permuted: Vec<usize> = p.iter().map(|&q| v[q]).collect();
                let back: Vec<usize> = inv.iter().map(|&q| permuted[q]).collect();
                assert_eq!(back, v);
                assert_eq!(permuted[m / 2], v[i]);
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let id = SchemeKernel::identity(16);
        assert!(amplification_spectrum(&id).iter().all(|m| (m - 1.0).abs() < 1e-15));

        // Dτ/h² = 0.25: symbol 1 − 4ν sin²(πk/(M+1))
        let grid = GridSpec::new(0.0, 1.0, 20, 10, 10.0 * 0.25 * 0.0025).unwrap();
        let k = build_kernel(2.0, &grid, 1.0).unwrap();
        let spec = amplification_spectrum(&k);
        for (j, m) in spec.iter().enumerate() {
            let s = (PI * j as f64 / 21.0).sin();
            assert!((m - (1.0 - s * s).abs()).abs() < 1e-13);
        }
        assert!(spec.iter().cloned().fold(0.0, f64::max) <= 1.0 + 1e-15);
    }

    proptest! {
        #[test]
        fn stencil_symmetric_and_summable(alpha in 1.01f64..2.0, d in 0.01f64..2.0, half in 2usize..80) {
            let grid = GridSpec::new(-1.0, 1.0, 2 * half, 50, 1e-3).unwrap();
            let k = build_kernel(alpha, &grid, d).unwrap();
            for j in 0..=half {
                prop_assert_eq!(k.stencil[half + j], k.stencil[half - j]);
            }
            prop_assert!(k.mass_multiplier() <= 1.0);
        }
    }
}
