//! Run configuration: a TOML document of `key = value` lines grouped in
//! `[section]`s. Every key has a default, so an empty file (or no file)
//! reproduces the reference parameter set.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fracdiff_core::riesz::{GridSpec, MassRule, StepMethod};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending key, when it appears in the document.
    pub line: Option<usize>,
    /// `section.key`, or empty for document-level syntax errors.
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.key.is_empty()) {
            (Some(line), false) => write!(f, "line {line}: `{}`: {}", self.key, self.message),
            (Some(line), true) => write!(f, "line {line}: {}", self.message),
            (None, false) => write!(f, "`{}`: {}", self.key, self.message),
            (None, true) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Direct,
    Spectral,
}

impl From<Method> for StepMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Direct => StepMethod::Direct,
            Method::Spectral => StepMethod::Spectral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassWeights {
    #[default]
    Rectangle,
    Trapezoid,
}

impl From<MassWeights> for MassRule {
    fn from(m: MassWeights) -> Self {
        match m {
            MassWeights::Rectangle => MassRule::Rectangle,
            MassWeights::Trapezoid => MassRule::Trapezoid,
        }
    }
}

/// Lattice, initial Gaussian and diffusion coefficients of the
/// macroscopic runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub domain: [f64; 2],
    pub m: usize,
    pub n: usize,
    pub t_final: f64,
    /// Width of `φ₀(x) = exp(−x²/(2σ²))`.
    pub sigma: f64,
    /// Coefficient used for α < 1.99.
    pub d_frac: f64,
    /// Coefficient used for α ≥ 1.99, the stand-in for regular diffusion.
    pub d_reg: f64,
    pub method: Method,
    pub mass_rule: MassWeights,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            domain: [-3.0, 3.0],
            m: 300,
            n: 199,
            t_final: 0.005,
            sigma: 0.2,
            d_frac: 1.0,
            d_reg: 0.02,
            method: Method::Direct,
            mass_rule: MassWeights::Rectangle,
        }
    }
}

/// Below this index the fractional coefficient applies.
pub const REGULAR_ALPHA: f64 = 1.99;

impl GridSection {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.domain[0], self.domain[1], self.m, self.n, self.t_final)
            .expect("validated grid section")
    }

    pub fn diffusion_for(&self, alpha: f64) -> f64 {
        if alpha >= REGULAR_ALPHA {
            self.d_reg
        } else {
            self.d_frac
        }
    }

    pub fn phi0(&self) -> impl Fn(f64) -> f64 {
        let s = self.sigma;
        move |x| (-x * x / (2.0 * s * s)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSection {
    pub alpha: f64,
    /// Overrides the `[grid]` coefficient chosen by α.
    pub d: Option<f64>,
    /// Defaults to `0, T/4, T/2, T`.
    pub snapshots: Option<Vec<f64>>,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            d: None,
            snapshots: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    #[default]
    Stable,
    /// 2-D elliptical law with shape `q`.
    Subgaussian,
    /// The positive mixing variable of index α/2.
    OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub kind: SampleKind,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub count: usize,
    pub q: [[f64; 2]; 2],
}

impl Default for SampleSection {
    fn default() -> Self {
        Self {
            kind: SampleKind::Stable,
            alpha: 1.5,
            beta: 0.0,
            sigma: 1.0,
            mu: 0.0,
            count: 10_000,
            q: [[1.0, 0.0], [0.0, 1.0]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MlKind {
    /// `E_β^{(n)}(z)` on a uniform `z` grid.
    #[default]
    Function,
    /// CTRW jump-count law `P(n, t)` for `n = 0..=n_max`.
    JumpCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlSection {
    pub kind: MlKind,
    pub beta: f64,
    pub derivative: u32,
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    pub t: f64,
    pub n_max: u32,
}

impl Default for MlSection {
    fn default() -> Self {
        Self {
            kind: MlKind::Function,
            beta: 0.5,
            derivative: 0,
            z_min: -10.0,
            z_max: 2.0,
            points: 121,
            t: 1.0,
            n_max: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenSection {
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub k_max: Option<f64>,
    pub panels: usize,
    pub abs_tol: f64,
}

impl Default for GreenSection {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            beta: 1.0,
            t: 1.0,
            x_min: -5.0,
            x_max: 5.0,
            points: 201,
            k_max: None,
            panels: 64,
            abs_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentsSection {
    pub alpha: f64,
    pub dt: f64,
    pub t_final: f64,
    pub count: usize,
    /// Isotropic shape `d_frac · I` for α < 2.
    pub d_frac: f64,
    /// Isotropic shape `d_reg · I` for α = 2.
    pub d_reg: f64,
    /// Full shape matrix; overrides both coefficients.
    pub q: Option<[[f64; 2]; 2]>,
    /// Defaults to `T/100, T/4, T/2, T`.
    pub snapshots: Option<Vec<f64>>,
}

impl Default for AgentsSection {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            dt: 1e-8,
            t_final: 1e-4,
            count: 100,
            d_frac: 1.0,
            d_reg: 0.02,
            q: None,
            snapshots: None,
        }
    }
}

impl AgentsSection {
    pub fn shape(&self) -> [[f64; 2]; 2] {
        self.q.unwrap_or_else(|| {
            let d = if self.alpha == 2.0 { self.d_reg } else { self.d_frac };
            [[d, 0.0], [0.0, d]]
        })
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.clone().unwrap_or_else(|| {
            let t = self.t_final;
            vec![t / 100.0, t / 4.0, t / 2.0, t]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CtrwSection {
    pub mu: f64,
    pub alpha: f64,
    pub jump_scale: f64,
    pub t_final: f64,
    pub count: usize,
}

impl Default for CtrwSection {
    fn default() -> Self {
        Self {
            mu: 1.0,
            alpha: 1.5,
            jump_scale: 1.0,
            t_final: 1000.0,
            count: 10_000,
        }
    }
}

/// Agents vs solver vs oracle on the `[grid]` lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub alpha: f64,
    /// Second solver run whose tails are set against the first.
    pub alpha_reference: f64,
    pub count: usize,
    /// Defaults to `⌈2 n^{1/3}⌉`.
    pub bins: Option<usize>,
    pub tail_thresholds: Vec<f64>,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            alpha_reference: 1.99,
            count: 10_000,
            bins: None,
            tail_thresholds: vec![1.0, 1.5, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub solve: SolveSection,
    pub sample: SampleSection,
    pub ml: MlSection,
    pub green: GreenSection,
    pub agents: AgentsSection,
    pub ctrw: CtrwSection,
    pub compare: CompareSection,
    /// From `--seed`; never read from the document.
    #[serde(skip)]
    pub seed: Option<u64>,
    /// From `--out`.
    #[serde(skip)]
    pub out_dir: PathBuf,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start));
        ConfigError {
            line,
            key: line.map(|l| key_on_line(text, l)).unwrap_or_default(),
            message: e.message().trim().to_string(),
        }
    })?;
    config.validate().map_err(|(key, message)| ConfigError {
        line: locate(text, &key),
        key,
        message,
    })?;
    Ok(config)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// `section.key` for the assignment on `line`, as far as it can be read.
fn key_on_line(text: &str, line: usize) -> String {
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            section = name.trim().to_string();
        }
        if i + 1 == line {
            return match l.split_once('=') {
                Some((k, _)) if section.is_empty() => k.trim().to_string(),
                Some((k, _)) => format!("{section}.{}", k.trim()),
                None => String::new(),
            };
        }
    }
    String::new()
}

/// Line of the assignment to `section.key`, if present.
fn locate(text: &str, dotted: &str) -> Option<usize> {
    let (want_section, want_key) = dotted.split_once('.')?;
    let mut section = "";
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            section = name.trim();
            continue;
        }
        if section == want_section {
            if let Some((k, _)) = l.split_once('=') {
                if k.trim() == want_key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

type Invalid = (String, String);

fn check(ok: bool, key: &str, message: impl Into<String>) -> Result<(), Invalid> {
    if ok {
        Ok(())
    } else {
        Err((key.to_string(), message.into()))
    }
}

fn positive(v: f64, key: &str) -> Result<(), Invalid> {
    check(v > 0.0 && v.is_finite(), key, format!("{v} must be positive and finite"))
}

fn spd(q: &[[f64; 2]; 2], key: &str) -> Result<(), Invalid> {
    fracdiff_core::stable::validate_spd(q).map_err(|e| (key.to_string(), e.to_string()))
}

fn times(ts: &Option<Vec<f64>>, t_final: f64, key: &str) -> Result<(), Invalid> {
    for &t in ts.iter().flatten() {
        check(
            t >= 0.0 && t <= t_final * (1.0 + 1e-12),
            key,
            format!("snapshot time {t} outside [0, {t_final}]"),
        )?;
    }
    Ok(())
}

impl RunConfig {
    fn validate(&self) -> Result<(), Invalid> {
        let g = &self.grid;
        check(
            g.domain[0].is_finite() && g.domain[1].is_finite() && g.domain[1] > g.domain[0],
            "grid.domain",
            format!("[{}, {}] must be an increasing pair", g.domain[0], g.domain[1]),
        )?;
        check(g.m >= 2 && g.m % 2 == 0, "grid.m", format!("{} must be an even integer >= 2", g.m))?;
        check(g.n >= 1, "grid.n", "must be at least 1")?;
        positive(g.t_final, "grid.t_final")?;
        positive(g.sigma, "grid.sigma")?;
        positive(g.d_frac, "grid.d_frac")?;
        positive(g.d_reg, "grid.d_reg")?;

        let s = &self.solve;
        check(
            s.alpha > 1.0 && s.alpha <= 2.0,
            "solve.alpha",
            format!("{} outside (1, 2]", s.alpha),
        )?;
        if let Some(d) = s.d {
            positive(d, "solve.d")?;
        }
        times(&s.snapshots, g.t_final, "solve.snapshots")?;

        let p = &self.sample;
        check(
            p.alpha > 0.0 && p.alpha <= 2.0,
            "sample.alpha",
            format!("{} outside (0, 2]", p.alpha),
        )?;
        check(
            (-1.0..=1.0).contains(&p.beta),
            "sample.beta",
            format!("{} outside [-1, 1]", p.beta),
        )?;
        positive(p.sigma, "sample.sigma")?;
        check(p.mu.is_finite(), "sample.mu", "must be finite")?;
        check(p.count >= 1, "sample.count", "must be at least 1")?;
        spd(&p.q, "sample.q")?;
        check(
            p.kind != SampleKind::OneSided || p.alpha < 2.0,
            "sample.alpha",
            "the one-sided mixing law needs alpha < 2",
        )?;

        let m = &self.ml;
        match m.kind {
            MlKind::Function => check(
                m.beta > 0.0 && m.beta <= 2.0,
                "ml.beta",
                format!("{} outside (0, 2]", m.beta),
            )?,
            MlKind::JumpCount => check(
                m.beta > 0.0 && m.beta <= 1.0,
                "ml.beta",
                format!("{} outside (0, 1] required by the jump-count law", m.beta),
            )?,
        }
        check(
            m.z_min.is_finite() && m.z_max.is_finite() && m.z_max >= m.z_min,
            "ml.z_max",
            "z range must be finite and ordered",
        )?;
        check(m.points >= 1, "ml.points", "must be at least 1")?;
        check(m.t >= 0.0 && m.t.is_finite(), "ml.t", "must be non-negative")?;

        let gr = &self.green;
        check(
            gr.alpha > 0.0 && gr.alpha <= 2.0,
            "green.alpha",
            format!("{} outside (0, 2]", gr.alpha),
        )?;
        check(
            gr.beta > 0.0 && gr.beta <= 1.0,
            "green.beta",
            format!("{} outside (0, 1]", gr.beta),
        )?;
        positive(gr.t, "green.t")?;
        check(
            gr.x_min.is_finite() && gr.x_max.is_finite() && gr.x_max >= gr.x_min,
            "green.x_max",
            "x range must be finite and ordered",
        )?;
        check(gr.points >= 1, "green.points", "must be at least 1")?;
        if let Some(k) = gr.k_max {
            positive(k, "green.k_max")?;
        }
        check(gr.panels >= 16, "green.panels", "must be at least 16")?;
        positive(gr.abs_tol, "green.abs_tol")?;

        let a = &self.agents;
        check(
            a.alpha > 0.0 && a.alpha <= 2.0,
            "agents.alpha",
            format!("{} outside (0, 2]", a.alpha),
        )?;
        positive(a.dt, "agents.dt")?;
        check(
            a.t_final >= a.dt && a.t_final.is_finite(),
            "agents.t_final",
            format!("{} must be at least dt", a.t_final),
        )?;
        check(a.count >= 1, "agents.count", "must be at least 1")?;
        positive(a.d_frac, "agents.d_frac")?;
        positive(a.d_reg, "agents.d_reg")?;
        if let Some(q) = &a.q {
            spd(q, "agents.q")?;
        }
        times(&a.snapshots, a.t_final, "agents.snapshots")?;

        let c = &self.ctrw;
        positive(c.mu, "ctrw.mu")?;
        check(
            c.alpha > 0.0 && c.alpha <= 2.0,
            "ctrw.alpha",
            format!("{} outside (0, 2]", c.alpha),
        )?;
        positive(c.jump_scale, "ctrw.jump_scale")?;
        positive(c.t_final, "ctrw.t_final")?;
        check(c.count >= 1, "ctrw.count", "must be at least 1")?;

        let k = &self.compare;
        for (key, alpha) in [("compare.alpha", k.alpha), ("compare.alpha_reference", k.alpha_reference)] {
            check(alpha > 1.0 && alpha <= 2.0, key, format!("{alpha} outside (1, 2]"))?;
        }
        check(k.count >= 1, "compare.count", "must be at least 1")?;
        if let Some(b) = k.bins {
            check(b >= 2, "compare.bins", "must be at least 2")?;
        }
        for &t in &k.tail_thresholds {
            check(t >= 0.0 && t.is_finite(), "compare.tail_thresholds", format!("{t} must be non-negative"))?;
        }
        Ok(())
    }

    /// `key=value` pairs of one section, defaults included.
    pub fn echo(&self, section: &str) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("config serializes");
        let Some(table) = value.get(section).and_then(|v| v.as_table()) else {
            return Vec::new();
        };
        table
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect()
    }

    /// The whole document, defaults included; parses back to `self`.
    pub fn to_document(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
