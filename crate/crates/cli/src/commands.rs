//! One function per subcommand. Each validates nothing beyond what the
//! config parser already did, runs the numerics and writes its CSVs.

use std::path::PathBuf;

use fracdiff_core::agents::{boxplot_stats, ctrw_simulate, run_ensemble, AgentConfig, Axis};
use fracdiff_core::green::{convolve_initial, green_pdf, scaled_green, LevyCdf, QuadratureConfig};
use fracdiff_core::mittag_leffler::{jump_count_pmf, ml_derivative};
use fracdiff_core::riesz::{solve, GridSpec, Solution, SolveOptions};
use fracdiff_core::stable::{
    sample_one_sided_s, sample_stable, sample_subgaussian_2d, EllipticalParams, StableParams,
};
use fracdiff_core::stats::{ks_statistic, Tabulated};
use fracdiff_core::{Execution, RandomStream};

use crate::config::{MlKind, RunConfig, SampleKind};
use crate::output::{fmt_num, time_file, Metadata, OutputDir};
use crate::report::{compare_micro_macro, mass_report, tail_mass_pairs};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sample,
    MlEval,
    Green,
    Solve,
    Agents,
    Ctrw,
    Compare,
    MassReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::MlEval => "ml-eval",
            Command::Green => "green",
            Command::Solve => "solve",
            Command::Agents => "agents",
            Command::Ctrw => "ctrw",
            Command::Compare => "compare",
            Command::MassReport => "mass-report",
        }
    }

    /// Commands that draw random numbers and therefore need `--seed`.
    pub fn is_randomized(self) -> bool {
        matches!(self, Command::Sample | Command::Agents | Command::Ctrw | Command::Compare)
    }

    fn sections(self) -> &'static [&'static str] {
        match self {
            Command::Sample => &["sample"],
            Command::MlEval => &["ml"],
            Command::Green => &["green"],
            Command::Solve | Command::MassReport => &["grid", "solve"],
            Command::Agents => &["agents"],
            Command::Ctrw => &["ctrw"],
            Command::Compare => &["grid", "compare"],
        }
    }
}

/// Files written and one-line findings worth printing.
#[derive(Debug, Default)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

pub fn run(command: Command, config: &RunConfig, exec: Execution) -> Result<Summary, CliError> {
    if command.is_randomized() && config.seed.is_none() {
        return Err(CliError::Usage(format!(
            "`{}` is randomized and needs --seed <u64>",
            command.name()
        )));
    }
    let mut out = OutputDir::create(&config.out_dir)?;
    let mut meta = Metadata::new(command.name(), config.seed);
    for s in command.sections() {
        meta = meta.section(s, &config.echo(s));
    }
    let notes = match command {
        Command::Sample => sample(config, meta, &mut out)?,
        Command::MlEval => ml_eval(config, meta, &mut out, exec)?,
        Command::Green => green(config, meta, &mut out, exec)?,
        Command::Solve => solve_cmd(config, meta, &mut out, exec)?,
        Command::Agents => agents(config, meta, &mut out, exec)?,
        Command::Ctrw => ctrw(config, meta, &mut out, exec)?,
        Command::Compare => compare(config, meta, &mut out, exec)?,
        Command::MassReport => mass(config, meta, &mut out, exec)?,
    };
    Ok(Summary {
        files: out.written().to_vec(),
        notes,
    })
}

fn seed(config: &RunConfig) -> u64 {
    config.seed.expect("checked by run")
}

fn nums(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| fmt_num(*v)).collect()
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + i as f64 * step).collect()
}

fn sample(config: &RunConfig, meta: Metadata, out: &mut OutputDir) -> Result<Vec<String>, CliError> {
    let s = &config.sample;
    let stream = RandomStream::new(seed(config), 0);
    match s.kind {
        SampleKind::Stable => {
            let p = StableParams::new(s.alpha, s.beta, s.sigma, s.mu)?;
            let x = sample_stable(&p, stream, s.count)?;
            let rows = x.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt_num(*v)]);
            out.write("samples.csv", &meta, &["sample_id", "value"], rows)?;
        }
        SampleKind::OneSided => {
            let x = sample_one_sided_s(s.alpha, stream, s.count)?;
            let rows = x.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt_num(*v)]);
            out.write("samples.csv", &meta, &["sample_id", "value"], rows)?;
        }
        SampleKind::Subgaussian => {
            let p = EllipticalParams::new(s.alpha, s.q, [0.0, 0.0])?;
            let z = sample_subgaussian_2d(&p, stream, s.count)?;
            let rows = z
                .iter()
                .enumerate()
                .map(|(i, v)| vec![i.to_string(), fmt_num(v[0]), fmt_num(v[1])]);
            out.write("samples.csv", &meta, &["sample_id", "x", "y"], rows)?;
        }
    }
    Ok(vec![format!("{} draws", s.count)])
}

fn ml_eval(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let m = &config.ml;
    match m.kind {
        MlKind::Function => {
            let z = linspace(m.z_min, m.z_max, m.points);
            let values = exec
                .map_indexed(z.len(), |i| ml_derivative(m.beta, m.derivative, z[i]))
                .into_iter()
                .collect::<Result<Vec<f64>, _>>()?;
            let rows = z.iter().zip(&values).map(|(z, v)| nums(&[*z, *v]));
            out.write("ml_eval.csv", &meta, &["z", "value"], rows)?;
            Ok(vec![format!("{} points", z.len())])
        }
        MlKind::JumpCount => {
            let p = (0..=m.n_max)
                .map(|n| jump_count_pmf(m.beta, m.t, n))
                .collect::<Result<Vec<f64>, _>>()?;
            let total: f64 = p.iter().sum();
            let rows = p.iter().enumerate().map(|(n, v)| vec![n.to_string(), fmt_num(*v)]);
            out.write(&time_file("jump_counts", m.t), &meta, &["n", "probability"], rows)?;
            Ok(vec![format!("probability mass up to n = {}: {total:.12}", m.n_max)])
        }
    }
}

fn green(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let g = &config.green;
    let qc = QuadratureConfig {
        k_max: g.k_max,
        panels: g.panels,
        abs_tol: g.abs_tol,
    };
    let x = linspace(g.x_min, g.x_max, g.points);
    let values = exec
        .map_indexed(x.len(), |i| {
            if g.beta == 1.0 {
                scaled_green(g.alpha, x[i], g.t, &qc)
            } else {
                green_pdf(g.alpha, g.beta, x[i], g.t, &qc)
            }
        })
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()?;
    let rows = x.iter().zip(&values).map(|(x, v)| nums(&[*x, *v]));
    out.write(&time_file("green", g.t), &meta, &["x", "density"], rows)?;
    Ok(vec![format!("{} points", x.len())])
}

/// Warns when the periodic wrap would carry noticeable initial mass.
fn check_endpoints(grid: &GridSpec, phi0: &dyn Fn(f64) -> f64) {
    let peak = grid.points().iter().map(|x| phi0(*x)).fold(0.0, f64::max);
    for x in [grid.a, grid.b] {
        if phi0(x) > 1e-6 * peak {
            log::warn!(
                "initial density at x = {x} is {:e}, above 1e-6 of its maximum; the periodic wrap will feel it",
                phi0(x)
            );
        }
    }
}

struct MacroRun {
    grid: GridSpec,
    d: f64,
    solution: Solution,
}

fn macro_run(config: &RunConfig, alpha: f64, d: f64, times: &[f64], exec: Execution) -> Result<MacroRun, CliError> {
    let g = &config.grid;
    let grid = g.spec();
    let phi0 = g.phi0();
    check_endpoints(&grid, &phi0);
    let opts = SolveOptions {
        method: g.method.into(),
        mass_rule: g.mass_rule.into(),
        exec,
        ..SolveOptions::default()
    };
    let solution = solve(&grid, alpha, d, phi0, times, &opts)?;
    if solution.min_value < 0.0 {
        log::warn!("scheme produced negative densities down to {:e}", solution.min_value);
    }
    Ok(MacroRun { grid, d, solution })
}

fn solve_cmd(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let s = &config.solve;
    let t = config.grid.t_final;
    let times = s.snapshots.clone().unwrap_or_else(|| vec![0.0, t / 4.0, t / 2.0, t]);
    let d = s.d.unwrap_or_else(|| config.grid.diffusion_for(s.alpha));
    let run = macro_run(config, s.alpha, d, &times, exec)?;
    let meta = meta.line(format!("resolved d={} snapshots={:?}", fmt_num(run.d), times));
    let x = run.grid.points();
    for &req in &times {
        let step = run.grid.nearest_step(req)?;
        let field = run.solution.at_step(step).expect("requested step is stored");
        let m = meta.clone().line(format!(
            "snapshot requested_time={} step={step} time={}",
            fmt_num(req),
            fmt_num(field.time)
        ));
        let rows = x.iter().zip(&field.values).map(|(x, u)| nums(&[*x, *u]));
        out.write(&time_file("macro", req), &m, &["x", "density"], rows)?;
    }
    Ok(vec![format!(
        "relative mass change {:e}",
        run.solution.relative_mass_change()
    )])
}

fn mass(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let s = &config.solve;
    let d = s.d.unwrap_or_else(|| config.grid.diffusion_for(s.alpha));
    let run = macro_run(config, s.alpha, d, &[], exec)?;
    let report = mass_report(&run.solution)?;
    let meta = meta
        .line(format!("resolved d={}", fmt_num(run.d)))
        .line(format!(
            "summary relative_change={} monotone_nonincreasing={}",
            fmt_num(report.relative_change),
            report.monotone_nonincreasing
        ));
    let rows = report
        .trace
        .iter()
        .map(|p| vec![p.step.to_string(), fmt_num(p.time), fmt_num(p.mass)]);
    out.write("mass_report.csv", &meta, &["step", "time", "mass"], rows)?;
    out.write_metrics("mass_summary.csv", &meta, &report.metrics())?;
    Ok(vec![
        format!("relative mass change {:e}", report.relative_change),
        format!("monotone non-increasing: {}", report.monotone_nonincreasing),
    ])
}

fn agents(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let a = &config.agents;
    let times = a.snapshot_times();
    let cfg = AgentConfig {
        alpha: a.alpha,
        dt: a.dt,
        t_final: a.t_final,
        count: a.count,
        q: a.shape(),
        seed: seed(config),
        snapshot_times: times.clone(),
    };
    let meta = meta.line(format!("resolved q={:?} snapshots={:?}", cfg.q, times));
    let snaps = run_ensemble(&cfg, exec)?;
    let mut notes = Vec::new();
    for snap in &snaps {
        let m = meta.clone().line(format!(
            "snapshot requested_time={} step={} time={}",
            fmt_num(snap.requested_time),
            snap.step_index,
            fmt_num(snap.time)
        ));
        let rows = snap
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| vec![i.to_string(), fmt_num(p[0]), fmt_num(p[1])]);
        out.write(&time_file("agents", snap.requested_time), &m, &["agent_id", "x", "y"], rows)?;

        let mut rows = Vec::new();
        let mut outliers = 0;
        for axis in [Axis::X, Axis::Y] {
            let b = boxplot_stats(&snap.axis(axis))?;
            outliers += b.outlier_count;
            rows.push(vec![
                axis.name().to_string(),
                fmt_num(b.median),
                fmt_num(b.q1),
                fmt_num(b.q3),
                fmt_num(b.whisker_lo),
                fmt_num(b.whisker_hi),
                b.outlier_count.to_string(),
            ]);
        }
        out.write(
            &time_file("agents_stats", snap.requested_time),
            &m,
            &["axis", "median", "q1", "q3", "whisker_lo", "whisker_hi", "outliers"],
            rows,
        )?;
        notes.push(format!("t = {}: {outliers} Tukey outliers", fmt_num(snap.time)));
    }
    Ok(notes)
}

fn ctrw(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let c = &config.ctrw;
    let res = ctrw_simulate(
        c.mu,
        c.alpha,
        c.jump_scale,
        c.t_final,
        c.count,
        RandomStream::new(seed(config), 0),
        exec,
    )?;
    let rows = res
        .positions
        .iter()
        .zip(&res.jumps)
        .enumerate()
        .map(|(i, (x, n))| vec![i.to_string(), fmt_num(*x), n.to_string()]);
    out.write(&time_file("ctrw", c.t_final), &meta, &["walker_id", "x", "jumps"], rows)?;

    let n = c.count as f64;
    let at_origin = res.jumps.iter().filter(|j| **j == 0).count() as f64 / n;
    let mean_jumps = res.jumps.iter().sum::<u64>() as f64 / n;
    let mut metrics = vec![
        ("fraction_without_jumps".to_string(), at_origin),
        ("expected_fraction_without_jumps".to_string(), (-c.mu * c.t_final).exp()),
        ("mean_jumps".to_string(), mean_jumps),
        ("expected_mean_jumps".to_string(), c.mu * c.t_final),
    ];
    let mut notes = vec![format!("mean jumps {mean_jumps:.3} (expected {})", fmt_num(c.mu * c.t_final))];
    // the unit-scale law is only tabulated reliably for α ≥ 1
    if c.alpha >= 1.0 {
        let table = LevyCdf::new(c.alpha, &QuadratureConfig::default(), exec)?;
        let scale = 1.0 / (c.jump_scale * (c.mu * c.t_final).powf(1.0 / c.alpha));
        let rescaled: Vec<f64> = res.positions.iter().map(|x| x * scale).collect();
        let ks = ks_statistic(&rescaled, |v| table.cdf(v))?;
        metrics.push(("ks_rescaled_vs_levy".to_string(), ks));
        notes.push(format!("KS of rescaled positions vs unit stable law: {ks:.4}"));
    }
    out.write_metrics(&time_file("ctrw_summary", c.t_final), &meta, &metrics)?;
    Ok(notes)
}

/// Shape matrix that gives the agents the same time scale as the solver
/// with coefficient `d`: `d^{2/α} I`, or `2d I` for the Gaussian case.
pub fn matching_shape(alpha: f64, d: f64) -> [[f64; 2]; 2] {
    let q = if alpha == 2.0 { 2.0 * d } else { d.powf(2.0 / alpha) };
    [[q, 0.0], [0.0, q]]
}

fn compare(config: &RunConfig, meta: Metadata, out: &mut OutputDir, exec: Execution) -> Result<Vec<String>, CliError> {
    let k = &config.compare;
    let g = &config.grid;
    let t = g.t_final;
    let (da, db) = (g.diffusion_for(k.alpha), g.diffusion_for(k.alpha_reference));
    let a = macro_run(config, k.alpha, da, &[t], exec)?;
    let b = macro_run(config, k.alpha_reference, db, &[t], exec)?;
    let grid = &a.grid;
    let solver = Tabulated::new(grid.a, grid.h, a.solution.last().values.clone())?;
    let reference = Tabulated::new(grid.a, grid.h, b.solution.last().values.clone())?;

    // free-space evolution of φ₀; the kernel at time D·T has the solver's scale
    let phi0 = Tabulated::from_fn(grid.a, grid.h, grid.len(), g.phi0())?;
    let oracle = convolve_initial(k.alpha, da * t, &phi0, &QuadratureConfig::default(), exec)?;

    // agents start from φ₀ (normal with standard deviation σ) and step with the solver's τ
    let start = sample_stable(
        &StableParams::symmetric(2.0, g.sigma / 2f64.sqrt())?,
        RandomStream::new(seed(config), 1),
        k.count,
    )?;
    let agent_cfg = AgentConfig {
        alpha: k.alpha,
        dt: grid.tau,
        t_final: t,
        count: k.count,
        q: matching_shape(k.alpha, da),
        seed: seed(config),
        snapshot_times: vec![t],
    };
    let snap = &run_ensemble(&agent_cfg, exec)?[0];
    let x: Vec<f64> = snap.axis(Axis::X).iter().zip(&start).map(|(x, s)| x + s).collect();

    let mut report = compare_micro_macro(&x, &solver, &oracle, k.bins)?;
    report.tail_mass_pairs = tail_mass_pairs(&k.tail_thresholds, &solver, &reference);
    report.mass_trace = a.solution.mass_trace.iter().map(|p| (p.time, p.mass)).collect();

    let meta = meta.line(format!(
        "resolved d_a={} d_b={} agent_q={:?} dt={}",
        fmt_num(da),
        fmt_num(db),
        agent_cfg.q,
        fmt_num(grid.tau)
    ));
    out.write_metrics("comparison.csv", &meta, &report.metrics())?;
    let rows = a
        .solution
        .mass_trace
        .iter()
        .map(|p| vec![p.step.to_string(), fmt_num(p.time), fmt_num(p.mass)]);
    out.write("compare_mass.csv", &meta, &["step", "time", "mass"], rows)?;

    let mut notes = vec![format!(
        "agents vs solver: L1 {:.4}, KS {:.4}; agents vs oracle: L1 {:.4}, KS {:.4}",
        report.l1_solver, report.ks_solver, report.l1_oracle, report.ks_oracle
    )];
    for p in &report.tail_mass_pairs {
        notes.push(format!(
            "tail mass beyond |x| > {}: {:e} (alpha {}) vs {:e} (alpha {})",
            p.threshold, p.mass_a, k.alpha, p.mass_b, k.alpha_reference
        ));
    }
    Ok(notes)
}
