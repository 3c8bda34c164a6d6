use std::time::{Duration, Instant};

use crate::analysis::{self, Diagnostics, ErrAccumulator};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::params::{Backend, RunConfig, SchemeParams};
use crate::real::{Precision, Real};

use super::{padcopy_into, reference_into, stencil_into, StencilKernel};

/// Ping-pong buffers plus the backend that advances them.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    backend: Backend,
    params: SchemeParams,
    kernel: StencilKernel<T>,
    current: ScalarField<T>,
    next: ScalarField<T>,
}

impl<T: Real> Stepper<T> {
    /// `initial` must have its ghosts filled.
    pub fn new(backend: Backend, params: SchemeParams, initial: ScalarField<T>) -> Self {
        let next = initial.clone();
        Stepper {
            backend,
            params,
            kernel: StencilKernel::new(&params),
            current: initial,
            next,
        }
    }

    /// Advances one step and swaps the buffers.
    pub fn advance(&mut self) {
        match self.backend {
            Backend::Reference => reference_into(&self.current, &mut self.next, &self.params),
            Backend::Stencil => {
                stencil_into(&self.current, &mut self.next, &self.params, &self.kernel)
            }
            Backend::StencilPadcopy => {
                padcopy_into(&self.current, &mut self.next, &self.params, &self.kernel)
            }
        }
        std::mem::swap(&mut self.current, &mut self.next);
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.current
    }

    pub fn into_field(self) -> ScalarField<T> {
        self.current
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }
}

/// Outcome of a single-backend run.
#[derive(Debug, Clone)]
pub struct RunReport<T> {
    pub backend: Backend,
    pub precision: Precision,
    pub n_steps: usize,
    /// Wall-clock time of the stepping loop alone.
    pub wall_seconds: f64,
    pub diagnostics: Vec<Diagnostics>,
    pub final_field: ScalarField<T>,
}

impl<T> RunReport<T> {
    pub fn steps_per_second(&self) -> f64 {
        self.n_steps as f64 / self.wall_seconds
    }

    pub fn last(&self) -> &Diagnostics {
        self.diagnostics
            .last()
            .expect("a report always holds the initial diagnostics")
    }
}

/// What the driver hands to the sink at each reporting step.
#[derive(Debug)]
pub struct StepEvent<'a, T> {
    pub step: usize,
    pub diagnostics: &'a Diagnostics,
    pub field: &'a ScalarField<T>,
    /// True when the step is a multiple of the snapshot stride.
    pub snapshot: bool,
}

pub(crate) fn diagnostics<T: Real>(
    config: &RunConfig,
    field: &ScalarField<T>,
    step: usize,
) -> Diagnostics {
    let t = step as f64 * config.params.dt();
    let stats = analysis::phase_stats(field);
    let radius = config
        .init
        .center()
        .and_then(|c| analysis::measure_radius(field, &c).ok());
    let exact_radius = config
        .init
        .initial_radius()
        .and_then(|r0| analysis::exact_radius(r0, config.grid.dim(), t).ok());
    Diagnostics {
        step,
        t,
        radius,
        exact_radius,
        energy: analysis::energy(field, &config.params),
        min: stats.min,
        max: stats.max,
        separated_fraction: stats.separated_fraction,
    }
}

fn next_report_step(config: &RunConfig, step: usize) -> usize {
    let up = |stride: usize| (step / stride + 1) * stride;
    let mut next = up(config.diagnostics_stride).min(config.n_steps);
    if let Some(s) = config.snapshot_stride {
        next = next.min(up(s));
    }
    next
}

fn check_finite<T: Real>(field: &ScalarField<T>, step: usize) -> Result<()> {
    match field.first_non_finite() {
        Some(index) => Err(Error::Divergence { step, index }),
        None => Ok(()),
    }
}

/// Runs `config` in precision `T` with the configured backend.
///
/// The sink sees step 0, every multiple of the diagnostics and snapshot
/// strides, and the final step. Divergence is checked at those same steps.
/// Only the stepping loop is timed.
pub fn run<T, F>(config: &RunConfig, mut sink: F) -> Result<RunReport<T>>
where
    T: Real,
    F: FnMut(StepEvent<'_, T>) -> Result<()>,
{
    config.validate()?;
    let initial: ScalarField<T> = config.init.generate(&config.grid, &config.params)?;
    let mut stepper = Stepper::new(config.backend, config.params, initial);
    let mut log = Vec::new();
    let mut emit = |stepper: &Stepper<T>, step: usize, log: &mut Vec<Diagnostics>| -> Result<()> {
        let d = diagnostics(config, stepper.field(), step);
        log.push(d);
        let snapshot = config
            .snapshot_stride
            .is_some_and(|s| step.is_multiple_of(s));
        sink(StepEvent {
            step,
            diagnostics: &d,
            field: stepper.field(),
            snapshot,
        })
    };
    emit(&stepper, 0, &mut log)?;
    let mut elapsed = Duration::ZERO;
    let mut step = 0;
    while step < config.n_steps {
        let target = next_report_step(config, step);
        let start = Instant::now();
        for _ in step..target {
            stepper.advance();
        }
        elapsed += start.elapsed();
        step = target;
        check_finite(stepper.field(), step)?;
        emit(&stepper, step, &mut log)?;
    }
    Ok(RunReport {
        backend: config.backend,
        precision: T::PRECISION,
        n_steps: config.n_steps,
        wall_seconds: elapsed.as_secs_f64().max(f64::MIN_POSITIVE),
        diagnostics: log,
        final_field: stepper.into_field(),
    })
}

/// Two backends advanced in lockstep from the same initial data.
#[derive(Debug, Clone)]
pub struct DualReport<A, B> {
    pub a: RunReport<A>,
    pub b: RunReport<B>,
    /// Mean over sampled steps of the RMS interior difference.
    pub err: f64,
    pub max_abs_diff: f64,
}

/// Reference against stencil, both in precision `T`, comparing every step.
pub fn run_dual<T: Real>(config: &RunConfig) -> Result<DualReport<T, T>> {
    run_dual_with::<T, T>(config, Backend::Reference, Backend::Stencil, 1)
}

/// Runs `backend_a` in precision `A` and `backend_b` in precision `B` side
/// by side, accumulating the trajectory error at every `err_stride`-th step
/// (steps 1..=n). The initial field is generated in f64 and cast, so both
/// sides start from the same data up to the narrower precision.
pub fn run_dual_with<A: Real, B: Real>(
    config: &RunConfig,
    backend_a: Backend,
    backend_b: Backend,
    err_stride: usize,
) -> Result<DualReport<A, B>> {
    config.validate()?;
    if err_stride == 0 {
        return Err(Error::Config("error stride must be at least 1".into()));
    }
    let initial: ScalarField<f64> = config.init.generate(&config.grid, &config.params)?;
    let mut sa = Stepper::new(backend_a, config.params, initial.cast::<A>());
    let mut sb = Stepper::new(backend_b, config.params, initial.cast::<B>());
    let mut log_a = vec![diagnostics(config, sa.field(), 0)];
    let mut log_b = vec![diagnostics(config, sb.field(), 0)];
    let (mut ta, mut tb) = (Duration::ZERO, Duration::ZERO);
    let mut acc = ErrAccumulator::default();
    let mut max_abs_diff = 0.0f64;
    for step in 1..=config.n_steps {
        let start = Instant::now();
        sa.advance();
        ta += start.elapsed();
        let start = Instant::now();
        sb.advance();
        tb += start.elapsed();
        if step % err_stride == 0 {
            acc.push(sa.field(), sb.field())?;
            for (x, y) in sa
                .field()
                .interior_values()
                .zip(sb.field().interior_values())
            {
                max_abs_diff = max_abs_diff.max((x.as_f64() - y.as_f64()).abs());
            }
        }
        if step % config.diagnostics_stride == 0 || step == config.n_steps {
            check_finite(sa.field(), step)?;
            check_finite(sb.field(), step)?;
            log_a.push(diagnostics(config, sa.field(), step));
            log_b.push(diagnostics(config, sb.field(), step));
        }
    }
    let err = acc
        .value()
        .ok_or_else(|| Error::Config("error stride exceeds the step count".into()))?;
    Ok(DualReport {
        a: dual_side(config, sa, ta, log_a),
        b: dual_side(config, sb, tb, log_b),
        err,
        max_abs_diff,
    })
}

fn dual_side<T: Real>(
    config: &RunConfig,
    stepper: Stepper<T>,
    elapsed: Duration,
    diagnostics: Vec<Diagnostics>,
) -> RunReport<T> {
    RunReport {
        backend: stepper.backend(),
        precision: T::PRECISION,
        n_steps: config.n_steps,
        wall_seconds: elapsed.as_secs_f64().max(f64::MIN_POSITIVE),
        diagnostics,
        final_field: stepper.into_field(),
    }
}
