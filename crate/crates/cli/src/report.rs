//! Quantitative micro/macro comparison and mass accounting.

use fracdiff_core::agents::{default_bins, Histogram};
use fracdiff_core::riesz::{MassPoint, Solution};
use fracdiff_core::stats::{ks_statistic, Tabulated};
use fracdiff_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMass {
    pub threshold: f64,
    pub mass_a: f64,
    pub mass_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub samples: usize,
    pub bins: usize,
    /// Histogram of the agents against the solver snapshot.
    pub l1_solver: f64,
    /// Histogram of the agents against the oracle density.
    pub l1_oracle: f64,
    pub ks_solver: f64,
    pub ks_oracle: f64,
    pub tail_mass_pairs: Vec<TailMass>,
    /// `(time, mass)` of the solver run.
    pub mass_trace: Vec<(f64, f64)>,
}

impl ComparisonReport {
    pub fn metrics(&self) -> Vec<(String, f64)> {
        let mut m = vec![
            ("samples".to_string(), self.samples as f64),
            ("bins".to_string(), self.bins as f64),
            ("l1_agents_vs_solver".to_string(), self.l1_solver),
            ("l1_agents_vs_oracle".to_string(), self.l1_oracle),
            ("ks_agents_vs_solver".to_string(), self.ks_solver),
            ("ks_agents_vs_oracle".to_string(), self.ks_oracle),
        ];
        for t in &self.tail_mass_pairs {
            m.push((format!("tail_mass_a_beyond_{}", t.threshold), t.mass_a));
            m.push((format!("tail_mass_b_beyond_{}", t.threshold), t.mass_b));
        }
        if let (Some(first), Some(last)) = (self.mass_trace.first(), self.mass_trace.last()) {
            m.push(("mass_initial".to_string(), first.1));
            m.push(("mass_final".to_string(), last.1));
        }
        m
    }
}

/// CDF of a tabulated density normalized to unit mass on its range.
fn tabulated_cdf(d: &Tabulated) -> Result<impl Fn(f64) -> f64 + '_> {
    let cum = d.cumulative();
    let total = *cum.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::Input("density has no mass".into()));
    }
    Ok(move |x: f64| {
        let u = (x - d.x0) / d.h;
        if u <= 0.0 {
            return 0.0;
        }
        if u >= (d.len() - 1) as f64 {
            return 1.0;
        }
        let i = u.floor() as usize;
        let f = u - i as f64;
        // exact integral of the linear interpolant over the partial cell
        let partial = d.h * f * (d.values[i] + 0.5 * f * (d.values[i + 1] - d.values[i]));
        (cum[i] + partial) / total
    })
}

/// L1 and KS distances of the agent marginal to two densities on a
/// shared grid. Both densities are normalized to unit mass on the grid.
pub fn compare_micro_macro(
    agents: &[f64],
    solver: &Tabulated,
    oracle: &Tabulated,
    bins: Option<usize>,
) -> Result<ComparisonReport> {
    if agents.is_empty() {
        return Err(Error::Input("no agent positions to compare".into()));
    }
    if !solver.same_grid(oracle) {
        return Err(Error::Input(format!(
            "solver range [{}, {}] and oracle range [{}, {}] differ",
            solver.x0,
            solver.x_max(),
            oracle.x0,
            oracle.x_max()
        )));
    }
    let bins = bins.unwrap_or_else(|| default_bins(agents.len()));
    let hist = Histogram::new(agents, bins, solver.x0, solver.x_max())?;
    let l1 = |d: &Tabulated| {
        let total = d.integral();
        hist.l1_distance(|x| d.interpolate(x) / total)
    };
    let ks = |d: &Tabulated| -> Result<f64> { ks_statistic(agents, tabulated_cdf(d)?) };
    Ok(ComparisonReport {
        samples: agents.len(),
        bins,
        l1_solver: l1(solver),
        l1_oracle: l1(oracle),
        ks_solver: ks(solver)?,
        ks_oracle: ks(oracle)?,
        tail_mass_pairs: Vec::new(),
        mass_trace: Vec::new(),
    })
}

pub fn tail_mass_pairs(thresholds: &[f64], a: &Tabulated, b: &Tabulated) -> Vec<TailMass> {
    thresholds
        .iter()
        .map(|&threshold| TailMass {
            threshold,
            mass_a: a.tail_mass(threshold),
            mass_b: b.tail_mass(threshold),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassReport {
    pub trace: Vec<MassPoint>,
    pub initial: f64,
    pub final_mass: f64,
    /// `(M_final − M_0) / M_0`.
    pub relative_change: f64,
    pub monotone_nonincreasing: bool,
    pub mass_multiplier: f64,
    pub min_value: f64,
}

impl MassReport {
    pub fn metrics(&self) -> Vec<(String, f64)> {
        vec![
            ("mass_initial".to_string(), self.initial),
            ("mass_final".to_string(), self.final_mass),
            ("relative_change".to_string(), self.relative_change),
            (
                "monotone_nonincreasing".to_string(),
                if self.monotone_nonincreasing { 1.0 } else { 0.0 },
            ),
            ("mass_multiplier_per_step".to_string(), self.mass_multiplier),
            ("min_value".to_string(), self.min_value),
        ]
    }
}

pub fn mass_report(solution: &Solution) -> Result<MassReport> {
    if solution.mass_trace.len() < 2 {
        return Err(Error::Input("mass report needs at least two time levels".into()));
    }
    Ok(MassReport {
        trace: solution.mass_trace.clone(),
        initial: solution.initial_mass(),
        final_mass: solution.final_mass(),
        relative_change: solution.relative_mass_change(),
        monotone_nonincreasing: solution.mass_monotone_nonincreasing(),
        mass_multiplier: solution.kernel.mass_multiplier(),
        min_value: solution.min_value,
    })
}
