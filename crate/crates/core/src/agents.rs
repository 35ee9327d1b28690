//! Lévy-flight agent ensembles and continuous-time random walks.
//!
//! Agents move by `X_{t+Δt} = X_t + Δt^{1/α} Z` with `Z` drawn from the
//! elliptical stable law of shape `Q`. Every agent owns a substream of the
//! configured seed, so trajectories do not depend on how the ensemble is
//! scheduled across threads.

use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{RandomStream, StreamRng};
use crate::stable::{validate_spd, EllipticalParams, StableParams, StableSampler, SubgaussianSampler};
use crate::stats::quantile_sorted;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub alpha: f64,
    pub dt: f64,
    pub t_final: f64,
    pub count: usize,
    /// Shape matrix of the driving noise.
    pub q: [[f64; 2]; 2],
    pub seed: u64,
    pub snapshot_times: Vec<f64>,
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::domain("alpha", self.alpha, "must lie in (0, 2]"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("dt", self.dt, "must be positive"));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return Err(Error::domain("T", self.t_final, "must be at least dt"));
        }
        if self.count == 0 {
            return Err(Error::domain("count", 0.0, "must be at least 1"));
        }
        validate_spd(&self.q)?;
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t <= self.t_final * (1.0 + 1e-12)) {
                return Err(Error::domain("snapshot time", t, "must lie in [0, T]"));
            }
        }
        Ok(())
    }

    /// Number of steps to `T`, rounded to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn nearest_step(&self, t: f64) -> usize {
        ((t / self.dt).round() as usize).min(self.steps())
    }

    pub fn elliptical(&self) -> Result<EllipticalParams> {
        EllipticalParams::new(self.alpha, self.q, [0.0, 0.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentEnsemble {
    pub positions: Vec<[f64; 2]>,
    pub step_index: usize,
    pub time: f64,
}

impl AgentEnsemble {
    pub fn at_origin(count: usize) -> Self {
        Self {
            positions: vec![[0.0, 0.0]; count],
            step_index: 0,
            time: 0.0,
        }
    }

    pub fn axis(&self, axis: Axis) -> Vec<f64> {
        self.positions.iter().map(|p| p[axis.index()]).collect()
    }
}

/// One generator per agent.
pub struct AgentStreams {
    rngs: Vec<StreamRng>,
}

impl AgentStreams {
    /// Agent `i` uses substream `i` of `(seed, 0)`.
    pub fn new(seed: u64, count: usize) -> Self {
        let root = RandomStream::new(seed, 0);
        Self {
            rngs: (0..count).map(|i| root.substream(i as u64).rng()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rngs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rngs.is_empty()
    }
}

/// Advances every agent by `dt^{1/α} · z`.
pub fn fsde_step(
    ensemble: &mut AgentEnsemble,
    sampler: &SubgaussianSampler,
    alpha: f64,
    dt: f64,
    streams: &mut AgentStreams,
    exec: Execution,
) -> Result<()> {
    if streams.len() != ensemble.positions.len() {
        return Err(Error::Input(format!(
            "{} streams for {} agents",
            streams.len(),
            ensemble.positions.len()
        )));
    }
    let scale = dt.powf(1.0 / alpha);
    exec.for_each_zip_mut(&mut ensemble.positions, &mut streams.rngs, |_, p, rng| {
        let z = sampler.draw_centered(rng);
        p[0] += scale * z[0];
        p[1] += scale * z[1];
    });
    ensemble.step_index += 1;
    ensemble.time = ensemble.step_index as f64 * dt;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSnapshot {
    pub requested_time: f64,
    pub step_index: usize,
    /// `step_index · dt`, which differs from the request when it is not a
    /// multiple of `dt`.
    pub time: f64,
    pub positions: Vec<[f64; 2]>,
}

impl AgentSnapshot {
    pub fn axis(&self, axis: Axis) -> Vec<f64> {
        self.positions.iter().map(|p| p[axis.index()]).collect()
    }
}

/// Runs the ensemble from the origin and returns one snapshot per
/// requested time, in request order.
pub fn run_ensemble(config: &AgentConfig, exec: Execution) -> Result<Vec<AgentSnapshot>> {
    config.validate()?;
    let sampler = SubgaussianSampler::new(&config.elliptical()?)?;
    let wanted: Vec<usize> = config.snapshot_times.iter().map(|&t| config.nearest_step(t)).collect();
    let last = wanted.iter().copied().max().unwrap_or(0);

    let mut ensemble = AgentEnsemble::at_origin(config.count);
    let mut streams = AgentStreams::new(config.seed, config.count);
    let mut taken: Vec<Option<AgentSnapshot>> = vec![None; wanted.len()];
    loop {
        for (slot, &step) in taken.iter_mut().zip(&wanted) {
            if step == ensemble.step_index {
                *slot = Some(AgentSnapshot {
                    requested_time: 0.0,
                    step_index: step,
                    time: ensemble.time,
                    positions: ensemble.positions.clone(),
                });
            }
        }
        if ensemble.step_index >= last {
            break;
        }
        fsde_step(&mut ensemble, &sampler, config.alpha, config.dt, &mut streams, exec)?;
        if let Some((i, p)) = ensemble
            .positions
            .iter()
            .enumerate()
            .find(|(_, p)| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(Error::NonFinite { index: i, value: p[0] });
        }
    }
    Ok(taken
        .into_iter()
        .zip(&config.snapshot_times)
        .map(|(s, &t)| AgentSnapshot {
            requested_time: t,
            ..s.expect("every requested step is reached")
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Tukey boxplot summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxplotStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outlier_count: usize,
}

/// Quartiles by linear interpolation, whiskers at the most extreme data
/// within 1.5 IQR of the quartiles.
pub fn boxplot_stats(values: &[f64]) -> Result<BoxplotStats> {
    if values.is_empty() {
        return Err(Error::Input("boxplot of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Input("boxplot input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || sorted.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence);
    Ok(BoxplotStats {
        median,
        q1,
        q3,
        iqr,
        whisker_lo: inside().next().unwrap_or(q1),
        whisker_hi: inside().next_back().unwrap_or(q3),
        outlier_count: sorted.iter().filter(|v| **v < lo_fence || **v > hi_fence).count(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtrwOutcome {
    pub positions: Vec<f64>,
    pub jumps: Vec<u64>,
}

/// Walkers wait `Exp(μ)` between jumps drawn from `S(α, 0, h, 0)` and are
/// observed at time `T`. Walker `i` uses substream `i` of `stream`.
pub fn ctrw_simulate(
    mu: f64,
    alpha: f64,
    jump_scale: f64,
    t_final: f64,
    count: usize,
    stream: RandomStream,
    exec: Execution,
) -> Result<CtrwOutcome> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain("mu", mu, "must be positive"));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::domain("T", t_final, "must be positive"));
    }
    let sampler = StableSampler::new(StableParams::symmetric(alpha, jump_scale)?)?;
    let walkers = exec.map_indexed(count, |i| {
        let mut rng = stream.substream(i as u64).rng();
        let (mut clock, mut x, mut n) = (0.0, 0.0, 0u64);
        loop {
            let wait: f64 = Exp1.sample(&mut rng);
            clock += wait / mu;
            if clock > t_final {
                return (x, n);
            }
            x += sampler.draw(&mut rng);
            n += 1;
        }
    });
    let (positions, jumps) = walkers.into_iter().unzip();
    Ok(CtrwOutcome { positions, jumps })
}

/// Uniform-bin density estimate on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    /// Count per bin divided by `n · width`, `n` counting all samples.
    pub density: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: usize,
}

impl Histogram {
    /// Bins are `(e_k, e_{k+1}]`, except that the first also holds `lo`.
    /// Samples outside `[lo, hi]` only count toward the normalization.
    pub fn new(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins < 2 {
            return Err(Error::domain("bins", bins as f64, "must be at least 2"));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Input(format!("degenerate histogram range ({lo}, {hi})")));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            if !(v >= lo && v <= hi) {
                continue;
            }
            let k = ((v - lo) / width).ceil() as usize;
            counts[k.saturating_sub(1).min(bins - 1)] += 1;
        }
        let norm = if values.is_empty() {
            0.0
        } else {
            1.0 / (values.len() as f64 * width)
        };
        Ok(Self {
            lo,
            hi,
            density: counts.iter().map(|&c| c as f64 * norm).collect(),
            counts,
            total: values.len(),
        })
    }

    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.width()
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins()).map(|k| self.lo + k as f64 * self.width()).collect()
    }

    /// In-range fraction of the samples.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    /// `Σ_k |ρ_k − ∫_bin f / width| · width`, with `f` averaged by
    /// Simpson's rule on each bin.
    pub fn l1_distance<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let w = self.width();
        (0..self.bins())
            .map(|k| {
                let a = self.lo + k as f64 * w;
                let mean = (f(a) + 4.0 * f(a + 0.5 * w) + f(a + w)) / 6.0;
                (self.density[k] - mean).abs() * w
            })
            .sum()
    }
}

pub fn marginal_histogram(
    positions: &[[f64; 2]],
    axis: Axis,
    bins: usize,
    range: (f64, f64),
) -> Result<Histogram> {
    let values: Vec<f64> = positions.iter().map(|p| p[axis.index()]).collect();
    Histogram::new(&values, bins, range.0, range.1)
}

/// Default bin count `⌈2 n^{1/3}⌉`.
pub fn default_bins(n: usize) -> usize {
    ((2.0 * (n as f64).cbrt()).ceil() as usize).max(2)
}
