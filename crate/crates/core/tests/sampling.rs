use std::f64::consts::PI;

use fracdiff_core::special::{cauchy_cdf, normal_cdf};
use fracdiff_core::stable::*;
use fracdiff_core::stats::{empirical_cf, empirical_cf_2d, ks_statistic, median};
use fracdiff_core::RandomStream;
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 100_000;

fn probes() -> Vec<f64> {
    (1..=20).map(|k| 0.15 * k as f64).collect()
}

/// Largest CF deviation over `ts`; also checks the per-point bound.
fn cf_deviation(samples: &[f64], ts: &[f64], cf: impl Fn(f64) -> Complex64) -> f64 {
    let per_point = 4.5 / (samples.len() as f64).sqrt();
    let mut worst: f64 = 0.0;
    for &t in ts {
        let d = (empirical_cf(samples, t).unwrap() - cf(t)).norm();
        assert!(d <= per_point, "t = {t}: deviation {d}");
        worst = worst.max(d);
    }
    worst
}

#[test]
fn symmetric_laws_match_their_cf() {
    for (k, alpha) in [0.6, 1.0, 1.5, 1.9, 2.0].into_iter().enumerate() {
        let p = StableParams::symmetric(alpha, 1.0).unwrap();
        let x = sample_stable(&p, RandomStream::new(100 + k as u64, 0), N).unwrap();
        let d = cf_deviation(&x, &probes(), |t| characteristic_function(&p, t).unwrap());
        assert!(d <= 0.02, "alpha {alpha}: {d}");
    }
}

#[test]
fn skewed_laws_match_their_cf() {
    let cases = [(1.5, 0.5, 2.0, 1.0), (0.7, -0.8, 0.5, 0.0), (1.0, 0.6, 1.5, -1.0), (1.0, -1.0, 0.3, 0.0)];
    for (k, (alpha, beta, sigma, mu)) in cases.into_iter().enumerate() {
        let p = StableParams::new(alpha, beta, sigma, mu).unwrap();
        let x = sample_stable(&p, RandomStream::new(7, k as u64), N).unwrap();
        let ts: Vec<f64> = probes().iter().flat_map(|t| [*t / sigma, -*t / sigma]).collect();
        let d = cf_deviation(&x, &ts, |t| characteristic_function(&p, t).unwrap());
        assert!(d <= 0.02, "{p:?}: {d}");
    }
}

#[test]
fn totally_skewed_small_index_is_positive() {
    let p = StableParams::new(0.6, 1.0, 1.0, 0.0).unwrap();
    let x = sample_stable(&p, RandomStream::new(1, 1), 20_000).unwrap();
    assert!(x.iter().all(|v| *v > 0.0));
}

#[test]
fn gaussian_endpoint() {
    let p = StableParams::symmetric(2.0, 1.0).unwrap();
    let x = sample_stable(&p, RandomStream::new(2, 0), N).unwrap();
    let var = x.iter().map(|v| v * v).sum::<f64>() / N as f64;
    assert!((var - 2.0).abs() < 0.03, "{var}");
    assert!(ks_statistic(&x, |v| normal_cdf(v, 2f64.sqrt())).unwrap() <= 0.01);
    let cf = empirical_cf(&x, 1.0).unwrap();
    assert!((cf.re - (-1f64).exp()).abs() < 0.02);
}

#[test]
fn cauchy_case() {
    let p = StableParams::symmetric(1.0, 1.0).unwrap();
    let x = sample_stable(&p, RandomStream::new(3, 0), N).unwrap();
    assert!(median(&x).unwrap().abs() < 0.02);
    assert!(ks_statistic(&x, |v| cauchy_cdf(v, 1.0)).unwrap() <= 0.01);
}

#[test]
fn one_sided_mixing_law() {
    for alpha in [0.3, 1.0, 1.5, 1.99] {
        let s = sample_one_sided_s(alpha, RandomStream::new(4, 0), 20_000).unwrap();
        assert!(s.iter().all(|v| *v > 0.0 && v.is_finite()), "alpha {alpha}");
    }
    assert!(sample_one_sided_s(2.0, RandomStream::new(4, 0), 1).is_err());

    // √S·G with G standard normal is Cauchy of scale 1/√2; √(2S)·G is standard Cauchy
    let s = sample_one_sided_s(1.0, RandomStream::new(5, 0), N).unwrap();
    let g = sample_stable(&StableParams::symmetric(2.0, 1.0).unwrap(), RandomStream::new(5, 1), N).unwrap();
    // the α = 2 law is N(0, 2), so g/√2 is standard normal
    let plain: Vec<f64> = s.iter().zip(&g).map(|(s, g)| s.sqrt() * g / 2f64.sqrt()).collect();
    let doubled: Vec<f64> = s.iter().zip(&g).map(|(s, g)| (2.0 * s).sqrt() * g / 2f64.sqrt()).collect();
    assert!(ks_statistic(&plain, |v| cauchy_cdf(v, 0.5f64.sqrt())).unwrap() <= 0.01);
    assert!(ks_statistic(&doubled, |v| cauchy_cdf(v, 1.0)).unwrap() <= 0.01);
}

#[test]
fn one_sided_laplace_transform() {
    // E exp(−λS) = exp(−λ^{α/2})
    for alpha in [0.8, 1.5] {
        let s = sample_one_sided_s(alpha, RandomStream::new(6, 0), N).unwrap();
        for lambda in [0.1, 0.5, 1.0, 3.0] {
            let emp = s.iter().map(|v| (-lambda * v).exp()).sum::<f64>() / N as f64;
            let want = (-f64::powf(lambda, alpha / 2.0)).exp();
            assert!((emp - want).abs() < 0.01, "{alpha} {lambda}: {emp} vs {want}");
        }
    }
}

#[test]
fn subgaussian_gaussian_endpoint() {
    let p = EllipticalParams::isotropic(2.0, 1.0).unwrap();
    let z = sample_subgaussian_2d(&p, RandomStream::new(8, 0), N).unwrap();
    for axis in 0..2 {
        let var = z.iter().map(|v| v[axis] * v[axis]).sum::<f64>() / N as f64;
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }
}

#[test]
fn subgaussian_cauchy_marginal() {
    let p = EllipticalParams::isotropic(1.0, 1.0).unwrap();
    let z = sample_subgaussian_2d(&p, RandomStream::new(9, 0), N).unwrap();
    for axis in 0..2 {
        let x: Vec<f64> = z.iter().map(|v| v[axis]).collect();
        assert!(ks_statistic(&x, |v| cauchy_cdf(v, 1.0)).unwrap() <= 0.01);
    }
}

#[test]
fn subgaussian_cf_anisotropic() {
    let q = [[1.0, 0.4], [0.4, 0.5]];
    let probes: Vec<[f64; 2]> = (0..20)
        .map(|k| {
            let angle = PI * k as f64 / 10.0;
            let radius = 0.3 + 0.12 * k as f64;
            [radius * angle.cos(), radius * angle.sin()]
        })
        .collect();
    for (k, alpha) in [0.7, 1.2, 1.5, 1.9].into_iter().enumerate() {
        let p = EllipticalParams::new(alpha, q, [0.5, -1.0]).unwrap();
        let z = sample_subgaussian_2d(&p, RandomStream::new(10, k as u64), N).unwrap();
        let mut worst: f64 = 0.0;
        for t in &probes {
            let d = (empirical_cf_2d(&z, *t).unwrap() - p.characteristic_function(*t)).norm();
            assert!(d <= 4.5 / (N as f64).sqrt());
            worst = worst.max(d);
        }
        assert!(worst <= 0.02, "alpha {alpha}: {worst}");
    }
}

#[test]
fn sign_symmetry() {
    for (k, alpha) in [0.5, 1.0, 1.5, 2.0].into_iter().enumerate() {
        let p = StableParams::symmetric(alpha, 1.0).unwrap();
        let x = sample_stable(&p, RandomStream::new(11, k as u64), N).unwrap();
        let positive = x.iter().filter(|v| **v > 0.0).count() as f64 / N as f64;
        assert!((positive - 0.5).abs() <= 3.0 * 0.5 / (N as f64).sqrt(), "{alpha}: {positive}");
    }
}

#[test]
fn stability_under_addition() {
    let n = 16;
    for (k, alpha) in [0.8, 1.5].into_iter().enumerate() {
        let p = StableParams::symmetric(alpha, 1.0).unwrap();
        let raw = sample_stable(&p, RandomStream::new(12, k as u64), N * n).unwrap();
        let norm = (n as f64).powf(-1.0 / alpha);
        let sums: Vec<f64> = raw.chunks(n).map(|c| norm * c.iter().sum::<f64>()).collect();
        let single = sample_stable(&p, RandomStream::new(13, k as u64), N).unwrap();
        for t in probes() {
            let a = empirical_cf(&sums, t).unwrap();
            let b = empirical_cf(&single, t).unwrap();
            assert!((a - b).norm() <= 0.03, "{alpha} {t}");
        }
    }
}

#[test]
fn determinism_and_stream_independence() {
    let p = StableParams::symmetric(1.5, 1.0).unwrap();
    let a = sample_stable(&p, RandomStream::new(14, 0), 1000).unwrap();
    assert_eq!(a, sample_stable(&p, RandomStream::new(14, 0), 1000).unwrap());
    let b = sample_stable(&p, RandomStream::new(14, 1), 1000).unwrap();
    assert_ne!(a, b);

    // sign agreement between two streams behaves like independent coins
    let g = StableParams::symmetric(2.0, 1.0).unwrap();
    let x = sample_stable(&g, RandomStream::new(15, 0), N).unwrap();
    let y = sample_stable(&g, RandomStream::new(15, 1), N).unwrap();
    let corr = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / (2.0 * N as f64);
    assert!(corr.abs() < 4.0 / (N as f64).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cf_bounded_by_one(alpha in 0.05f64..=2.0, beta in -1.0f64..=1.0, sigma in 0.01f64..10.0,
                         mu in -5.0f64..5.0, t in -50.0f64..50.0) {
        let p = StableParams::new(alpha, beta, sigma, mu).unwrap();
        let z = characteristic_function(&p, t).unwrap();
        prop_assert!(z.norm() <= 1.0 + 1e-15);
        prop_assert!((characteristic_function(&p, 0.0).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_cf_real_and_even(alpha in 0.05f64..=2.0, sigma in 0.01f64..10.0, t in -50.0f64..50.0) {
        let p = StableParams::symmetric(alpha, sigma).unwrap();
        let a = characteristic_function(&p, t).unwrap();
        let b = characteristic_function(&p, -t).unwrap();
        prop_assert_eq!(a.im, 0.0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scale_is_final_multiplication(alpha in 0.2f64..=2.0, beta in -1.0f64..=1.0,
                                     sigma in 0.1f64..5.0, seed in any::<u64>()) {
        prop_assume!(alpha != 1.0);
        let unit = sample_stable(&StableParams::new(alpha, beta, 1.0, 0.0).unwrap(), RandomStream::new(seed, 0), 32).unwrap();
        let scaled = sample_stable(&StableParams::new(alpha, beta, sigma, 0.0).unwrap(), RandomStream::new(seed, 0), 32).unwrap();
        for (u, s) in unit.iter().zip(&scaled) {
            prop_assert_eq!(sigma * u, *s);
        }
    }
}
