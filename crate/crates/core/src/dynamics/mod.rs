//! Master-equation time evolution.
//!
//! States are integrated as dense matrices with an adaptive explicit
//! Runge-Kutta scheme; [`propagator_oracle`] gives an independent
//! matrix-exponential path for small systems.

mod expm;
mod integrator;

pub use expm::{expm, propagator_oracle, MAX_ORACLE_DIM, MAX_SQUARINGS};
pub use integrator::{integrate, LindbladGenerator, StepStats, Tolerances, MAX_STEPS};

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::effective::{self, EffectiveParams};
use crate::hilbert::{self, Ket, LindbladModel, Operator};
use crate::linalg::hermitian_eigenvalues;
use crate::scan::{linspace, ScanResult};
use crate::{CMatrix, Error, ProbeDrive, Result, SystemParams, C64};

pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix (to the tolerances above).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidState(format!("matrix is {}x{}", m.nrows(), m.ncols())));
        }
        let rho = Self(m);
        let herm = rho.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("Hermiticity error {herm:e}")));
        }
        let tr = rho.trace_error();
        if tr > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace deviates from 1 by {tr:e}")));
        }
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} outside dimension {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = C64::new(1.0, 0.0);
        Ok(Self(m))
    }

    /// `|ket><ket|` in the truncated space of `p`.
    pub fn from_ket(p: &SystemParams, ket: Ket) -> Result<Self> {
        let index = ket
            .index(p.n1_cutoff, p.n2_cutoff)
            .ok_or_else(|| Error::InvalidState(format!("{ket} is outside the truncated space")))?;
        Self::basis_state(p.dim(), index)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace_error(&self) -> f64 {
        (self.0.trace() - C64::new(1.0, 0.0)).norm()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hilbert::hermiticity_error(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.0)[0]
    }

    /// `Re tr(rho O)`.
    pub fn expectation(&self, op: &Operator) -> f64 {
        trace_product(&self.0, op.matrix()).re
    }
}

/// `tr(a b)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// Worst invariant values seen over the samples of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// Largest increase of `<N1 + N2 + sigma+ sigma->` between consecutive samples.
    pub max_excitation_increase: f64,
    pub steps: StepStats,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_excitation_increase: f64::NEG_INFINITY,
            steps: StepStats::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    /// `(<sigma_z> + 1) / 2`.
    pub pe: Vec<f64>,
    pub states: Option<Vec<CMatrix>>,
    pub diagnostics: Diagnostics,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_scan(&self) -> Result<ScanResult> {
        ScanResult::new("t", self.times.clone())?
            .with_column("N1", self.n1.clone())?
            .with_column("N2", self.n2.clone())?
            .with_column("Pe", self.pe.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EvolveOptions {
    pub tol: Tolerances,
    pub keep_states: bool,
}

pub fn evolve(
    p: &SystemParams,
    drive: &ProbeDrive,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<TimeSeries> {
    evolve_model(&LindbladModel::new(p, drive)?, rho0, t_grid, opts)
}

/// Evolve `rho0` under `model`, sampling at `t_grid` (the state is taken to
/// be `rho0` at `t_grid[0]`). Fails if a sample breaks the trace, Hermiticity
/// or positivity tolerances.
pub fn evolve_model(model: &LindbladModel, rho0: &DensityMatrix, t_grid: &[f64], opts: &EvolveOptions) -> Result<TimeSeries> {
    if rho0.dim() != model.dim() {
        return Err(Error::InvalidState(format!("state dimension {} does not match model dimension {}", rho0.dim(), model.dim())));
    }
    let collapse: Vec<CMatrix> = model.collapse.iter().map(|c| c.matrix().clone()).collect();
    let mut generator = LindbladGenerator::new(hilbert::effective_generator(&model.hamiltonian, &model.collapse), &collapse);

    let n = t_grid.len();
    let mut series = TimeSeries {
        times: Vec::with_capacity(n),
        n1: Vec::with_capacity(n),
        n2: Vec::with_capacity(n),
        pe: Vec::with_capacity(n),
        states: opts.keep_states.then(Vec::new),
        diagnostics: Diagnostics::default(),
    };
    let mut last_total: Option<f64> = None;
    let stats = integrate(
        |rho, out| generator.apply(rho, out),
        rho0.matrix(),
        t_grid,
        opts.tol,
        |_, t, rho| {
            let d = &mut series.diagnostics;
            let trace_err = (rho.trace() - C64::new(1.0, 0.0)).norm();
            let herm = hilbert::hermiticity_error(rho);
            let min_eig = hermitian_eigenvalues(rho)[0];
            d.max_trace_error = d.max_trace_error.max(trace_err);
            d.max_hermiticity_error = d.max_hermiticity_error.max(herm);
            d.min_eigenvalue = d.min_eigenvalue.min(min_eig);
            if trace_err > TRACE_TOL {
                return Err(Error::Integration { t, reason: format!("trace drift {trace_err:e}") });
            }
            if herm > HERMITICITY_TOL {
                return Err(Error::Integration { t, reason: format!("Hermiticity error {herm:e}") });
            }
            if min_eig < -POSITIVITY_TOL {
                return Err(Error::Integration { t, reason: format!("negative eigenvalue {min_eig:e}") });
            }
            let n1 = trace_product(rho, model.n1.matrix()).re;
            let n2 = trace_product(rho, model.n2.matrix()).re;
            let pe = trace_product(rho, model.excited.matrix()).re;
            let total = n1 + n2 + pe;
            if let Some(prev) = last_total {
                d.max_excitation_increase = d.max_excitation_increase.max(total - prev);
            }
            last_total = Some(total);
            series.times.push(t);
            series.n1.push(n1);
            series.n2.push(n2);
            series.pe.push(pe);
            if let Some(states) = series.states.as_mut() {
                states.push(rho.clone());
            }
            Ok(())
        },
    )?;
    series.diagnostics.steps = stats;
    Ok(series)
}

/// Dynamics restricted to kets with at most `max_exc` excitations.
#[derive(Clone, Debug)]
pub struct ReducedDynamics {
    pub model: LindbladModel,
    pub rho0: DensityMatrix,
    /// Full-space index of each reduced basis ket.
    pub indices: Vec<usize>,
}

/// Without a drive the Hamiltonian conserves the excitation number and every
/// collapse operator lowers it, so a state supported on at most `max_exc`
/// excitations never leaves that subspace: the reduced evolution is exact.
pub fn excitation_truncation(p: &SystemParams, drive: &ProbeDrive, rho0: &DensityMatrix, max_exc: usize) -> Result<ReducedDynamics> {
    if !drive.is_off() {
        return Err(Error::Precondition("excitation truncation requires an undriven system".into()));
    }
    p.validate()?;
    if rho0.dim() != p.dim() {
        return Err(Error::InvalidState(format!("state dimension {} does not match {}", rho0.dim(), p.dim())));
    }
    let full = LindbladModel::new(p, drive)?;
    let rho = rho0.matrix();
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            let outside = full.basis[i].excitations() > max_exc || full.basis[j].excitations() > max_exc;
            if outside && rho[(i, j)].norm() > 1e-14 {
                return Err(Error::Precondition(format!(
                    "initial state has weight outside the {max_exc}-excitation subspace ({}, {})",
                    full.basis[i], full.basis[j]
                )));
            }
        }
    }
    let kets: Vec<Ket> = Ket::up_to_excitations(max_exc)
        .into_iter()
        .filter(|k| k.index(p.n1_cutoff, p.n2_cutoff).is_some())
        .collect();
    let indices: Vec<usize> = kets.iter().map(|k| k.index(p.n1_cutoff, p.n2_cutoff).unwrap()).collect();
    let reduced_rho = CMatrix::from_fn(indices.len(), indices.len(), |r, c| rho[(indices[r], indices[c])]);
    Ok(ReducedDynamics { model: full.restrict(&kets)?, rho0: DensityMatrix::new(reduced_rho)?, indices })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiOptions {
    /// Horizon in Rabi periods `pi / g_eff`.
    pub periods: f64,
    pub samples: usize,
    pub tol: Tolerances,
    /// Explicit horizon; overrides `periods`.
    pub horizon: Option<f64>,
}

impl Default for RabiOptions {
    fn default() -> Self {
        Self { periods: 3.0, samples: 601, tol: Tolerances::default(), horizon: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RabiResult {
    pub effective: EffectiveParams,
    pub series: TimeSeries,
    /// Effective envelope `exp(-(kappa_eff + gamma_eff) t / 2) cos^2(g_eff t)` on the same grid.
    pub pe_eff: Vec<f64>,
    pub max_n1: f64,
    pub max_n2: f64,
    /// Root-mean-square of `Pe - Pe_eff` over the grid.
    pub rms_deviation: f64,
}

impl RabiResult {
    pub fn to_scan(&self) -> Result<ScanResult> {
        self.series.to_scan()?.with_column("Pe_eff", self.pe_eff.clone())
    }
}

/// Undriven evolution from `|e,0,0>` on the effective resonance.
///
/// The run uses the exact single-excitation reduction (dimension 4). The
/// default horizon is `periods * pi / g_eff`; when `g_eff = 0` it is
/// `periods / (kappa_eff + gamma_eff)` instead.
pub fn rabi_experiment(p: &SystemParams, opts: &RabiOptions) -> Result<RabiResult> {
    let eff = effective::effective_params(p)?;
    let scale = p.delta1.abs().max(p.kappa1).max(1.0);
    if eff.delta_eff.abs() > 1e-9 * scale {
        return Err(Error::Precondition(format!(
            "delta2 = {} is off the effective resonance {} (delta_eff = {:e})",
            p.delta2,
            p.delta2 - eff.delta_eff,
            eff.delta_eff
        )));
    }
    if opts.samples < 2 {
        return Err(Error::InvalidParameter("a Rabi run needs at least 2 samples".into()));
    }
    let horizon = match opts.horizon {
        Some(h) => h,
        None if eff.g_eff > 0.0 => opts.periods * PI / eff.g_eff,
        None => opts.periods / (eff.kappa_eff + eff.gamma_eff),
    };
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParameter(format!("Rabi horizon {horizon} must be positive and finite")));
    }
    let rho0 = DensityMatrix::from_ket(p, Ket::new(true, 0, 0))?;
    let reduced = excitation_truncation(p, &ProbeDrive::OFF, &rho0, 1)?;
    let times = linspace(0.0, horizon, opts.samples);
    let series = evolve_model(&reduced.model, &reduced.rho0, &times, &EvolveOptions { tol: opts.tol, keep_states: false })?;
    let pe_eff: Vec<f64> = times.iter().map(|&t| effective::effective_rabi_pe(t, &eff)).collect();
    let rms_deviation = rms_difference(&series.pe, &pe_eff);
    let max_n1 = series.n1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_n2 = series.n2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RabiResult { effective: eff, series, pe_eff, max_n1, max_n2, rms_deviation })
}

pub fn rms_difference(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

/// Least-squares slope of `-ln y` against `t` over the samples with `y > floor`.
pub fn fit_decay_rate(times: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times.iter().zip(values).filter(|(_, v)| **v > floor).map(|(t, v)| (*t, v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mt, my) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mt).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}
