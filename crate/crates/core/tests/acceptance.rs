//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the report stays readable; use
//! `cargo test -p fracdiff-core --test acceptance -- --nocapture` or just
//! look at the captured output of `cargo test`.

use std::f64::consts::PI;
use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use fracdiff_core::agents::{boxplot_stats, ctrw_simulate, run_ensemble, AgentConfig, Axis};
use fracdiff_core::green::{green_pdf, levy_pdf, levy_upper_tail, scaled_green, LevyCdf, QuadratureConfig};
use fracdiff_core::mittag_leffler::{jump_count_pmf, ml};
use fracdiff_core::quadrature::{integrate_pieces, Tolerance};
use fracdiff_core::riesz::{
    amplification_spectrum, build_kernel, grunwald_coefficients, solve, solve_with_kernel, DensityField, GridSpec,
    SolveOptions, StepMethod, Stepper,
};
use fracdiff_core::special::{cauchy_cdf, gamma, normal_cdf, rgamma};
use fracdiff_core::stable::{characteristic_function, sample_stable, sample_subgaussian_2d, EllipticalParams, StableParams};
use fracdiff_core::stats::{empirical_cf, ks_statistic};
use fracdiff_core::{Execution, RandomStream};
use rand::Rng;

/// Largest amplification-factor moduli on the reference grid, measured once.
const SPECTRUM_MAX_199: f64 = 0.999_999_999_441_575_36;
const SPECTRUM_MAX_150: f64 = 0.999_998_080_511_495_75;
/// Relative mass change of the α = 1.5, D = 1 run on (−3, 3), measured once.
const MASS_CHANGE_150: f64 = -3.819_056_344_163_618_21e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reference_grid(a: f64, b: f64, m: usize) -> GridSpec {
    GridSpec::new(a, b, m, 199, 0.005).unwrap()
}

fn phi0(x: f64) -> f64 {
    (-x * x / (2.0 * 0.2 * 0.2)).exp()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn heat_reduction() -> Outcome {
    let start = Instant::now();
    let grid = reference_grid(-3.0, 3.0, 300);
    let d = 0.02;
    let kernel = build_kernel(2.0, &grid, d).unwrap();
    let nu = d * grid.tau / (grid.h * grid.h);
    let stencil_err = kernel
        .stencil
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let want = match i.abs_diff(grid.mid()) {
                0 => 1.0 - 2.0 * nu,
                1 => nu,
                _ => 0.0,
            };
            (s - want).abs()
        })
        .fold(0.0, f64::max);

    let sol = solve(&grid, 2.0, d, phi0, &[grid.t_final], &SolveOptions::default()).unwrap();
    // φ₀ convolved with the heat kernel of variance 2DT, wrapped with the lattice period
    let s2 = 0.04 + 2.0 * d * grid.t_final;
    let period = grid.period();
    let exact = |x: f64| {
        (-20..=20)
            .map(|k| {
                let y = x + k as f64 * period;
                (0.04 / s2).sqrt() * (-y * y / (2.0 * s2)).exp()
            })
            .sum::<f64>()
    };
    let linf = sol
        .last()
        .values
        .iter()
        .enumerate()
        .map(|(i, u)| (u - exact(grid.x(i))).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        stencil_err <= 1e-14 && linf <= 1e-3 && secs < 5.0,
        format!("stencil err {stencil_err:.1e}, L-inf vs wrapped Gaussian {linf:.2e}, {secs:.2}s"),
    )
}

fn grunwald_identities() -> Outcome {
    let mut ok = true;
    for alpha in [1.2, 1.5, 1.8] {
        ok &= grunwald_coefficients(alpha, 1)[1] == -alpha;
    }
    ok &= grunwald_coefficients(2.0, 6) == vec![1.0, -2.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    let mut worst: f64 = 0.0;
    for alpha in [1.2, 1.5, 1.8] {
        let g = grunwald_coefficients(alpha, 1000);
        for (j, gj) in g.iter().enumerate().take(51) {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign * gamma(alpha + 1.0) * rgamma(alpha - j as f64 + 1.0) * rgamma(j as f64 + 1.0);
            worst = worst.max((gj - want).abs() / want.abs());
        }
        let mut partial = 0.0;
        let mut prev = f64::INFINITY;
        for (j, gj) in g.iter().enumerate() {
            partial += gj;
            if j >= 2 {
                ok &= partial.abs() < prev;
                prev = partial.abs();
            }
        }
    }
    outcome(ok && worst <= 1e-10, format!("max relative recurrence error {worst:.1e}"))
}

fn circulant_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = RandomStream::new(31, 0).rng();
    for m in [16, 64, 300] {
        let grid = GridSpec::new(-1.0, 1.0, m, 10, 1e-3).unwrap();
        for alpha in [1.3, 1.5, 1.99] {
            let kernel = build_kernel(alpha, &grid, 0.5).unwrap();
            let direct = Stepper::new(kernel.clone(), StepMethod::Direct, Execution::Sequential);
            let spectral = Stepper::new(kernel, StepMethod::Spectral, Execution::Sequential);
            for _ in 0..5 {
                let state = DensityField::new((0..=m).map(|_| rng.random::<f64>()).collect());
                let a = direct.advance(&state, 0.0).unwrap();
                let b = spectral.advance(&state, 0.0).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }

    // shift-then-solve vs solve-then-shift
    let grid = GridSpec::new(-3.0, 3.0, 64, 40, 0.005).unwrap();
    let kernel = build_kernel(1.5, &grid, 1.0).unwrap();
    let base: Vec<f64> = (0..=64).map(|_| rng.random::<f64>()).collect();
    let opts = SolveOptions {
        exec: Execution::Sequential,
        ..SolveOptions::default()
    };
    let run = |v: Vec<f64>| {
        solve_with_kernel(&grid, kernel.clone(), DensityField::new(v), &[grid.t_final], &opts)
            .unwrap()
            .last()
            .values
            .clone()
    };
    let plain = run(base.clone());
    let mut shift_err: f64 = 0.0;
    for s in [1, 7, 33] {
        let mut shifted = base.clone();
        shifted.rotate_right(s);
        let mut expect = plain.clone();
        expect.rotate_right(s);
        for (x, y) in run(shifted).iter().zip(&expect) {
            shift_err = shift_err.max((x - y).abs());
        }
    }
    outcome(
        worst <= 1e-10 && shift_err <= 1e-12,
        format!("direct vs spectral {worst:.1e}, translation {shift_err:.1e}"),
    )
}

fn spectrum_max(alpha: f64, d: f64) -> f64 {
    let grid = reference_grid(-3.0, 3.0, 300);
    let k = build_kernel(alpha, &grid, d).unwrap();
    amplification_spectrum(&k).into_iter().fold(0.0, f64::max)
}

fn stability_diagnostic() -> Outcome {
    let a = spectrum_max(1.99, 0.02);
    let b = spectrum_max(1.5, 1.0);
    let pinned = (a - SPECTRUM_MAX_199).abs() <= 1e-12 && (b - SPECTRUM_MAX_150).abs() <= 1e-12;
    outcome(
        a <= 1.0 && b <= 1.0 && pinned,
        format!("max |lambda| = {a:.17} (alpha 1.99), {b:.17} (alpha 1.5)"),
    )
}

fn stable_sampler() -> Outcome {
    let start = Instant::now();
    let n = 100_000;
    let probes: Vec<f64> = (1..=20).map(|k| 0.15 * k as f64).collect();
    let mut cf_worst: f64 = 0.0;
    let mut gauss = Vec::new();
    for (k, alpha) in [1.0, 1.5, 2.0].into_iter().enumerate() {
        let p = StableParams::symmetric(alpha, 1.0).unwrap();
        let x = sample_stable(&p, RandomStream::new(500, k as u64), n).unwrap();
        for &t in &probes {
            let d = (empirical_cf(&x, t).unwrap() - characteristic_function(&p, t).unwrap()).norm();
            cf_worst = cf_worst.max(d);
        }
        if alpha == 2.0 {
            gauss = x;
        }
    }
    let ks_gauss = ks_statistic(&gauss, |v| normal_cdf(v, 2f64.sqrt())).unwrap();
    let z = sample_subgaussian_2d(&EllipticalParams::isotropic(1.0, 1.0).unwrap(), RandomStream::new(501, 0), n).unwrap();
    let marginal: Vec<f64> = z.iter().map(|v| v[0]).collect();
    let ks_cauchy = ks_statistic(&marginal, |v| cauchy_cdf(v, 1.0)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        cf_worst <= 0.02 && ks_gauss <= 0.01 && ks_cauchy <= 0.01 && secs < 10.0,
        format!("CF dev {cf_worst:.4}, KS normal {ks_gauss:.4}, KS Cauchy marginal {ks_cauchy:.4}, {secs:.2}s"),
    )
}

fn oracle_closed_forms() -> Outcome {
    let mut origin: f64 = 0.0;
    for alpha in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let want = gamma(1.0 + 1.0 / alpha) / PI;
        origin = origin.max((levy_pdf(alpha, 0.0, &cfg()).unwrap() - want).abs());
    }
    let mut cauchy: f64 = 0.0;
    for k in -200..=200 {
        let x = 0.05 * k as f64;
        cauchy = cauchy.max((levy_pdf(1.0, x, &cfg()).unwrap() - 1.0 / (PI * (1.0 + x * x))).abs());
    }
    let tol = Tolerance {
        abs: 1e-10,
        rel: 1e-10,
        max_intervals: 2000,
    };
    let breaks: Vec<f64> = (-8..=8).map(|k| 5.0 * k as f64).collect();
    let mut norm: f64 = 0.0;
    for alpha in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let core = integrate_pieces(|x| levy_pdf(alpha, x, &cfg()).unwrap(), &breaks, tol).unwrap();
        norm = norm.max((core.value + 2.0 * levy_upper_tail(alpha, 40.0) - 1.0).abs());
    }
    let mut markov: f64 = 0.0;
    for alpha in [1.2, 1.5, 2.0] {
        for t in [0.1, 1.0] {
            for x in [0.0, 0.3, 1.0, 2.5] {
                let a = green_pdf(alpha, 1.0, x, t, &cfg()).unwrap();
                let b = scaled_green(alpha, x, t, &cfg()).unwrap();
                markov = markov.max((a - b).abs());
            }
        }
    }
    outcome(
        origin <= 1e-8 && cauchy <= 1e-8 && norm <= 1e-4 && markov <= 1e-6,
        format!("origin {origin:.1e}, Cauchy {cauchy:.1e}, normalization {norm:.1e}, beta=1 {markov:.1e}"),
    )
}

fn mittag_leffler() -> Outcome {
    let mut exp_err: f64 = 0.0;
    for k in -500..=500 {
        let x = 0.01 * k as f64;
        exp_err = exp_err.max((ml(1.0, x).unwrap() - x.exp()).abs());
    }
    let zero_ok = [0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0]
        .iter()
        .all(|&b| ml(b, 0.0).unwrap() == 1.0);
    let mut poisson: f64 = 0.0;
    for t in [0.1f64, 0.5, 1.0, 2.0, 3.0] {
        let mut p = (-t).exp();
        for n in 0..40u32 {
            if n > 0 {
                p *= t / n as f64;
            }
            poisson = poisson.max((jump_count_pmf(1.0, t, n).unwrap() - p).abs());
        }
    }
    let mut sum_err: f64 = 0.0;
    for beta in [0.3, 0.5, 0.7, 0.9, 1.0] {
        for t in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let mut total = 0.0;
            let mut n = 0;
            loop {
                let p = jump_count_pmf(beta, t, n).unwrap();
                total += p;
                if n > 5 && p < 1e-13 {
                    break;
                }
                n += 1;
            }
            sum_err = sum_err.max((total - 1.0).abs());
        }
    }
    outcome(
        exp_err <= 1e-10 && zero_ok && poisson <= 1e-10 && sum_err <= 1e-6,
        format!("exp {exp_err:.1e}, Poisson {poisson:.1e}, pmf sum {sum_err:.1e}"),
    )
}

fn micro_macro() -> Outcome {
    let start = Instant::now();
    let config = AgentConfig {
        alpha: 1.5,
        dt: 1e-3,
        t_final: 1.0,
        count: 100_000,
        q: [[1.0, 0.0], [0.0, 1.0]],
        seed: 2024,
        snapshot_times: vec![1.0],
    };
    let snaps = run_ensemble(&config, Execution::Parallel).unwrap();
    let x = snaps[0].axis(Axis::X);
    // scaled_green at t = 1 is the unit-scale law itself
    let table = LevyCdf::new(1.5, &cfg(), Execution::Parallel).unwrap();
    let ks = ks_statistic(&x, |v| table.cdf(v)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(ks <= 0.02 && secs < 60.0, format!("KS {ks:.4}, {secs:.1}s"))
}

fn ctrw_limit() -> Outcome {
    let (mu, t) = (1.0, 1e3);
    let out = ctrw_simulate(mu, 1.5, 1.0, t, 10_000, RandomStream::new(77, 0), Execution::Parallel).unwrap();
    let scale = (mu * t).powf(-1.0 / 1.5);
    let rescaled: Vec<f64> = out.positions.iter().map(|x| x * scale).collect();
    let table = LevyCdf::new(1.5, &cfg(), Execution::Parallel).unwrap();
    let ks = ks_statistic(&rescaled, |v| table.cdf(v)).unwrap();
    outcome(ks <= 0.05, format!("KS {ks:.4}"))
}

fn tail_mass(values: &[f64], grid: &GridSpec, threshold: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.x(*i).abs() > threshold)
        .map(|(_, u)| u * grid.h)
        .sum()
}

fn outliers(alpha: f64, q: f64, seed: u64) -> usize {
    let config = AgentConfig {
        alpha,
        dt: 1e-8,
        t_final: 1e-4,
        count: 100,
        q: [[q, 0.0], [0.0, q]],
        seed,
        snapshot_times: vec![1e-4],
    };
    let snap = &run_ensemble(&config, Execution::Sequential).unwrap()[0];
    [Axis::X, Axis::Y]
        .iter()
        .map(|&a| boxplot_stats(&snap.axis(a)).unwrap().outlier_count)
        .sum()
}

fn heavy_tails() -> Outcome {
    let grid = reference_grid(-3.0, 3.0, 300);
    let opts = SolveOptions::default();
    let frac = solve(&grid, 1.5, 1.0, phi0, &[grid.t_final], &opts).unwrap();
    let near = solve(&grid, 1.99, 0.02, phi0, &[grid.t_final], &opts).unwrap();
    let (tail_a, tail_b) = (tail_mass(&frac.last().values, &grid, 1.5), tail_mass(&near.last().values, &grid, 1.5));
    let (peak_a, peak_b) = (frac.last().max_abs(), near.last().max_abs());

    let wins = (1..=20u64).filter(|&s| outliers(1.5, 1.0, s) > outliers(2.0, 0.02, s)).count();
    outcome(
        tail_a > tail_b && peak_a < peak_b && wins > 10,
        format!(
            "tail mass {tail_a:.3e} vs {tail_b:.3e}, peak {peak_a:.4} vs {peak_b:.4}, more outliers in {wins}/20 seeds"
        ),
    )
}

fn mass_behavior() -> Outcome {
    let opts = SolveOptions::default();
    let narrow = reference_grid(-3.0, 3.0, 300);
    let wide = reference_grid(-6.0, 6.0, 600);
    let a = solve(&narrow, 1.5, 1.0, phi0, &[], &opts).unwrap().relative_mass_change();
    let b = solve(&wide, 1.5, 1.0, phi0, &[], &opts).unwrap().relative_mass_change();
    let pinned = (a - MASS_CHANGE_150).abs() <= 1e-12 * MASS_CHANGE_150.abs();
    outcome(
        b.abs() <= a.abs() && a != 0.0 && pinned,
        format!("relative change {a:.6e} on (-3,3), {b:.6e} on (-6,6)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("alpha=2 reduction", heat_reduction),
        ("Grunwald identities", grunwald_identities),
        ("circulant equivalence", circulant_equivalence),
        ("stability diagnostic", stability_diagnostic),
        ("stable sampler", stable_sampler),
        ("oracle closed forms", oracle_closed_forms),
        ("Mittag-Leffler", mittag_leffler),
        ("micro-macro consistency", micro_macro),
        ("CTRW diffusive limit", ctrw_limit),
        ("heavy tails and outliers", heavy_tails),
        ("mass behavior", mass_behavior),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", k + 1, result.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
