use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{total_mass, DensityField, GridSpec, MassRule};
use super::kernel::{build_kernel, rotated_spectrum, SchemeKernel};
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMethod {
    /// One permuted dot product per site, `O(M²)`.
    #[default]
    Direct,
    /// Circular cross-correlation through the DFT, `O(M log M)`.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub method: StepMethod,
    pub mass_rule: MassRule,
    pub exec: Execution,
    /// Abort once `max |U|` exceeds this multiple of the initial maximum.
    pub blowup_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: StepMethod::Direct,
            mass_rule: MassRule::Rectangle,
            exec: Execution::Parallel,
            blowup_factor: 1e6,
        }
    }
}

/// A kernel prepared for repeated application.
pub struct Stepper {
    kernel: SchemeKernel,
    method: StepMethod,
    exec: Execution,
    spectral: Option<SpectralPlan>,
}

struct SpectralPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Conjugated stencil spectrum, pre-divided by the length.
    symbol: Vec<Complex64>,
}

impl Stepper {
    pub fn new(kernel: SchemeKernel, method: StepMethod, exec: Execution) -> Self {
        let spectral = (method == StepMethod::Spectral).then(|| {
            let n = kernel.stencil.len();
            let mut planner = FftPlanner::new();
            let scale = 1.0 / n as f64;
            SpectralPlan {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
                symbol: rotated_spectrum(&kernel)
                    .into_iter()
                    .map(|z| z.conj() * scale)
                    .collect(),
            }
        });
        Self {
            kernel,
            method,
            exec,
            spectral,
        }
    }

    pub fn kernel(&self) -> &SchemeKernel {
        &self.kernel
    }

    pub fn method(&self) -> StepMethod {
        self.method
    }

    /// `Uⁿ ↦ Uⁿ⁺¹`; `dt` is added to the field time.
    pub fn advance(&self, field: &DensityField, dt: f64) -> Result<DensityField> {
        let u = &field.values;
        if u.len() != self.kernel.stencil.len() {
            return Err(Error::Input(format!(
                "state has {} sites, kernel expects {}",
                u.len(),
                self.kernel.stencil.len()
            )));
        }
        if let Some((index, &value)) = u.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let values = match &self.spectral {
            None => self.direct(u),
            Some(plan) => spectral(plan, u),
        };
        Ok(DensityField {
            values,
            step_index: field.step_index + 1,
            time: field.time + dt,
        })
    }

    fn direct(&self, u: &[f64]) -> Vec<f64> {
        let s = &self.kernel.stencil;
        let n = s.len();
        let mid = self.kernel.mid();
        self.exec.map_indexed(n, |i| {
            // Σ_p s[p] U[(p + i − M₂) mod n], split where the index wraps
            let offset = (i + n - mid) % n;
            let split = n - offset;
            let head: f64 = s[..split].iter().zip(&u[offset..]).map(|(a, b)| a * b).sum();
            let tail: f64 = s[split..].iter().zip(&u[..offset]).map(|(a, b)| a * b).sum();
            head + tail
        })
    }
}

fn spectral(plan: &SpectralPlan, u: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan.forward.process(&mut buf);
    for (b, s) in buf.iter_mut().zip(&plan.symbol) {
        *b *= s;
    }
    plan.inverse.process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// One direct, sequential step.
pub fn step(field: &DensityField, kernel: &SchemeKernel) -> Result<DensityField> {
    Stepper::new(kernel.clone(), StepMethod::Direct, Execution::Sequential).advance(field, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPoint {
    pub step: usize,
    pub time: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub grid: GridSpec,
    pub kernel: SchemeKernel,
    /// Step 0 plus every requested time, ordered by step, one per step.
    pub snapshots: Vec<DensityField>,
    /// Mass after every step, starting with the initial state.
    pub mass_trace: Vec<MassPoint>,
    /// Most negative value seen over the run (0 when none).
    pub min_value: f64,
}

impl Solution {
    pub fn initial_mass(&self) -> f64 {
        self.mass_trace[0].mass
    }

    pub fn final_mass(&self) -> f64 {
        self.mass_trace[self.mass_trace.len() - 1].mass
    }

    /// `(M_final − M_0) / M_0`, zero for a massless start.
    pub fn relative_mass_change(&self) -> f64 {
        let m0 = self.initial_mass();
        if m0 == 0.0 {
            0.0
        } else {
            (self.final_mass() - m0) / m0
        }
    }

    pub fn mass_monotone_nonincreasing(&self) -> bool {
        self.mass_trace.windows(2).all(|w| w[1].mass <= w[0].mass)
    }

    pub fn last(&self) -> &DensityField {
        &self.snapshots[self.snapshots.len() - 1]
    }

    pub fn at_step(&self, step: usize) -> Option<&DensityField> {
        self.snapshots.iter().find(|s| s.step_index == step)
    }
}

/// Runs the scheme from `U⁰_i = φ₀(x_i)` for `grid.n` steps.
pub fn solve<F: Fn(f64) -> f64>(
    grid: &GridSpec,
    alpha: f64,
    d: f64,
    phi0: F,
    snapshot_times: &[f64],
    opts: &SolveOptions,
) -> Result<Solution> {
    let kernel = build_kernel(alpha, grid, d)?;
    solve_with_kernel(grid, kernel, DensityField::from_fn(grid, phi0), snapshot_times, opts)
}

pub fn solve_with_kernel(
    grid: &GridSpec,
    kernel: SchemeKernel,
    initial: DensityField,
    snapshot_times: &[f64],
    opts: &SolveOptions,
) -> Result<Solution> {
    if kernel.stencil.len() != grid.len() {
        return Err(Error::Input("kernel and grid sizes differ".into()));
    }
    let mut wanted: Vec<usize> = snapshot_times
        .iter()
        .map(|&t| grid.nearest_step(t))
        .collect::<Result<_>>()?;
    wanted.push(0);
    wanted.sort_unstable();
    wanted.dedup();

    let limit = opts.blowup_factor * initial.max_abs();
    let stepper = Stepper::new(kernel, opts.method, opts.exec);
    let mass = |f: &DensityField| MassPoint {
        step: f.step_index,
        time: f.time,
        mass: total_mass(&f.values, grid.h, opts.mass_rule),
    };
    let min_of = |f: &DensityField| f.values.iter().cloned().fold(0.0, f64::min);

    let mut field = DensityField {
        step_index: 0,
        time: 0.0,
        ..initial
    };
    let mut mass_trace = vec![mass(&field)];
    let mut min_value = min_of(&field);
    let mut snapshots = Vec::with_capacity(wanted.len());
    let mut next = wanted.iter().peekable();
    loop {
        if next.peek() == Some(&&field.step_index) {
            snapshots.push(field.clone());
            next.next();
        }
        if field.step_index == grid.n {
            break;
        }
        let mut stepped = stepper.advance(&field, grid.tau)?;
        stepped.time = grid.time(stepped.step_index);
        let max_abs = stepped.max_abs();
        if max_abs > limit {
            return Err(Error::Instability {
                step: stepped.step_index,
                max_abs,
                limit,
            });
        }
        mass_trace.push(mass(&stepped));
        min_value = min_value.min(min_of(&stepped));
        field = stepped;
    }
    if min_value < 0.0 {
        log::info!("scheme produced negative values down to {min_value:e}");
    }
    Ok(Solution {
        grid: *grid,
        kernel: stepper.kernel,
        snapshots,
        mass_trace,
        min_value,
    })
}
