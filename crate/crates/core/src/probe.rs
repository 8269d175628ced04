//! Weakly driven steady states: excitation spectra and `g2(0)`.
//!
//! The probe drives the auxiliary mode `a2` with `eps (a2 + a2^dag)` in the
//! frame rotating at the probe frequency.

use nalgebra::DVector;

use crate::dynamics::{trace_product, DensityMatrix};
use crate::effective;
use crate::hilbert::{build_liouvillian, vectorize, LindbladModel, Operator, Superoperator};
use crate::linalg::{norm1, RealLu};
use crate::scan::ScanResult;
use crate::{CMatrix, Error, ProbeDrive, Result, SystemParams, C64};

/// Default spectrum drive, in units of `g_eff`.
pub const SPECTRUM_EPS_FACTOR: f64 = 0.02;
/// Default `g2(0)` drive, in units of `g_eff`.
pub const G2_EPS_FACTOR: f64 = 0.01;
/// Residual bound `|L vec(rho)|_1 <= RESIDUAL_TOL |L|_1`.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Pivots below this (relative to the largest entry) mean a degenerate kernel.
pub const DEGENERACY_PIVOT: f64 = 1e-14;
/// Smallest `<a2^dag a2>` for which `g2(0)` is evaluated.
pub const MIN_PHOTON_NUMBER: f64 = 1e-12;

/// Column-stacked position of element `(i, j)`.
fn vec_index(n: usize, i: usize, j: usize) -> usize {
    j * n + i
}

/// Real coordinates of a Hermitian matrix: diagonal entries, then the real and
/// imaginary parts of each upper-triangle entry.
#[derive(Clone, Copy, Debug)]
enum Coord {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

fn hermitian_coords(n: usize) -> Vec<Coord> {
    let mut coords: Vec<Coord> = (0..n).map(Coord::Diag).collect();
    for i in 0..n {
        for j in i + 1..n {
            coords.push(Coord::Re(i, j));
            coords.push(Coord::Im(i, j));
        }
    }
    coords
}

/// Stationary state of a Lindblad generator.
///
/// `L` maps Hermitian matrices to Hermitian matrices, so `L rho = 0` is solved
/// as a real linear system in the `d^2` real coordinates of `rho`, with one
/// population equation replaced by `tr rho = 1`.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let n = l.hilbert_dim();
    let m = l.matrix();
    let coords = hermitian_coords(n);
    let size = coords.len();

    // column of L for each real coordinate, then the real equation rows
    let mut a = vec![0.0; size * size];
    for (col, coord) in coords.iter().enumerate() {
        let column = |r: usize| -> C64 {
            match *coord {
                Coord::Diag(i) => m[(r, vec_index(n, i, i))],
                Coord::Re(i, j) => m[(r, vec_index(n, i, j))] + m[(r, vec_index(n, j, i))],
                Coord::Im(i, j) => (m[(r, vec_index(n, i, j))] - m[(r, vec_index(n, j, i))]) * C64::new(0.0, 1.0),
            }
        };
        for (row, eq) in coords.iter().enumerate() {
            a[row * size + col] = match *eq {
                Coord::Diag(k) => column(vec_index(n, k, k)).re,
                Coord::Re(k, q) => column(vec_index(n, k, q)).re,
                Coord::Im(k, q) => column(vec_index(n, k, q)).im,
            };
        }
    }
    // trace condition in place of the first population equation
    for (col, coord) in coords.iter().enumerate() {
        a[col] = if matches!(coord, Coord::Diag(_)) { 1.0 } else { 0.0 };
    }
    let mut rhs = vec![0.0; size];
    rhs[0] = 1.0;

    let lu = RealLu::factor(a, size);
    if lu.relative_min_pivot < DEGENERACY_PIVOT {
        return Err(Error::SteadyState(format!(
            "stationary state is not unique (relative pivot {:e})",
            lu.relative_min_pivot
        )));
    }
    let x = lu.solve(&rhs);
    let mut rho = CMatrix::zeros(n, n);
    for (coord, v) in coords.iter().zip(&x) {
        match *coord {
            Coord::Diag(i) => rho[(i, i)] = C64::new(*v, 0.0),
            Coord::Re(i, j) => {
                rho[(i, j)].re = *v;
                rho[(j, i)].re = *v;
            }
            Coord::Im(i, j) => {
                rho[(i, j)].im = *v;
                rho[(j, i)].im = -*v;
            }
        }
    }
    finish(l, rho)
}

/// Independent stationary-state path: complex LU on `vec(rho)` with one
/// population row replaced by the trace functional. `O(d^6)` complex work;
/// meant for cross-checks.
pub fn steady_state_oracle(l: &Superoperator) -> Result<DensityMatrix> {
    let n = l.hilbert_dim();
    let mut a = l.matrix().clone();
    let mut b = DVector::<C64>::zeros(n * n);
    for col in 0..n * n {
        a[(0, col)] = C64::new(0.0, 0.0);
    }
    for i in 0..n {
        a[(0, vec_index(n, i, i))] = C64::new(1.0, 0.0);
    }
    b[0] = C64::new(1.0, 0.0);
    let x = a.lu().solve(&b).ok_or_else(|| Error::SteadyState("singular trace-augmented Liouvillian".into()))?;
    let rho = CMatrix::from_column_slice(n, n, x.as_slice());
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    finish(l, rho)
}

fn finish(l: &Superoperator, rho: CMatrix) -> Result<DensityMatrix> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SteadyState("non-finite solution".into()));
    }
    let residual = steady_state_residual(l, &rho);
    if residual > RESIDUAL_TOL {
        return Err(Error::SteadyState(format!("relative residual {residual:e} exceeds {RESIDUAL_TOL:e}")));
    }
    let tr = rho.trace();
    let rho = rho / tr;
    DensityMatrix::new(rho).map_err(|e| match e {
        Error::InvalidState(msg) => Error::SteadyState(format!("candidate is not a valid state: {msg}")),
        other => other,
    })
}

/// `|L vec(rho)|_1 / |L|_1`.
pub fn steady_state_residual(l: &Superoperator, rho: &CMatrix) -> f64 {
    let r = l.matrix() * vectorize(rho);
    r.iter().map(|z| z.norm()).sum::<f64>() / norm1(l.matrix()).max(f64::MIN_POSITIVE)
}

/// `<a^dag a^dag a a> / <a^dag a>^2`.
pub fn g2_zero(rho: &DensityMatrix, a: &Operator) -> Result<f64> {
    let ad = a.adjoint();
    let n_op = &ad * a;
    let n = rho.expectation(&n_op);
    if !(n > MIN_PHOTON_NUMBER) {
        return Err(Error::UndefinedCorrelation(n));
    }
    let pair = &(&ad * &ad) * &(a * a);
    Ok((rho.expectation(&pair) / (n * n)).max(0.0))
}

/// Truncations and checks used by the probe scans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub cutoffs: (usize, usize),
    /// Cross-check truncation; also used for the half-amplitude rerun.
    /// `None` disables both checks.
    pub coarse_cutoffs: Option<(usize, usize)>,
}

impl ProbeOptions {
    pub fn for_g2() -> Self {
        Self { cutoffs: (3, 3), coarse_cutoffs: Some((2, 2)) }
    }

    pub fn for_spectrum() -> Self {
        Self { cutoffs: (2, 2), coarse_cutoffs: Some((2, 2)) }
    }
}

fn positive_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("probe amplitude must be positive, got {eps}")));
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("probe detuning grid is empty".into()));
    }
    Ok(())
}

/// Steady-state expectations at one probe setting.
struct PointResult {
    rho: DensityMatrix,
    model: LindbladModel,
}

fn solve_point(p: &SystemParams, cutoffs: (usize, usize), eps: f64, detuning_e: f64) -> Result<PointResult> {
    let q = p.with_cutoffs(cutoffs.0, cutoffs.1);
    let drive = ProbeDrive::new(eps, detuning_e)?;
    let model = LindbladModel::new(&q, &drive)?;
    let rho = steady_state(&model.liouvillian())?;
    Ok(PointResult { rho, model })
}

/// Relative change `|a - b| / |a|`.
fn rel_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

/// `g2(0)` of the auxiliary mode across probe detunings.
///
/// Columns: `g2` (at `opts.cutoffs`), `n2`, `g2_coarse` (coarse truncation),
/// `g2_half_eps` (coarse truncation, amplitude `eps / 2`),
/// `truncation_converged` (`g2` and `g2_coarse` within 5%) and
/// `weak_probe` (`g2_coarse` and `g2_half_eps` within 2%). A point whose solve
/// fails is recorded as NaN with both flags 0.
pub fn g2_scan(p: &SystemParams, eps: f64, delta_e_grid: &[f64], opts: &ProbeOptions) -> Result<ScanResult> {
    positive_eps(eps)?;
    check_grid(delta_e_grid)?;
    p.validate()?;
    let mut cols: [Vec<f64>; 6] = Default::default();
    for &de in delta_e_grid {
        let fine = solve_point(p, opts.cutoffs, eps, de).and_then(|r| {
            let g2 = g2_zero(&r.rho, &r.model.a2)?;
            Ok((g2, r.rho.expectation(&r.model.n2)))
        });
        let (g2, n2) = match fine {
            Ok(v) => v,
            Err(e) => {
                log::warn!("g2 scan point detuning_e = {de}: {e}");
                (f64::NAN, f64::NAN)
            }
        };
        let (coarse, half) = match opts.coarse_cutoffs {
            Some(c) => {
                let at = |amp: f64| {
                    solve_point(p, c, amp, de).and_then(|r| g2_zero(&r.rho, &r.model.a2)).unwrap_or_else(|e| {
                        log::warn!("g2 check at detuning_e = {de}, eps = {amp}: {e}");
                        f64::NAN
                    })
                };
                (at(eps), at(eps / 2.0))
            }
            None => (f64::NAN, f64::NAN),
        };
        cols[0].push(g2);
        cols[1].push(n2);
        cols[2].push(coarse);
        cols[3].push(half);
        cols[4].push((rel_change(g2, coarse) < 0.05) as u8 as f64);
        cols[5].push((rel_change(coarse, half) < 0.02) as u8 as f64);
    }
    let names = ["g2", "n2", "g2_coarse", "g2_half_eps", "truncation_converged", "weak_probe"];
    let mut scan = ScanResult::new("detuning_e", delta_e_grid.to_vec())?;
    for (name, col) in names.into_iter().zip(cols) {
        scan.push_column(name, col)?;
    }
    record_metadata(&mut scan, p, eps, opts);
    Ok(scan)
}

/// Normalized emitter excitation spectrum under a weak probe.
///
/// Columns: `S` (steady-state `<sigma+ sigma->` normalized to unit maximum),
/// `population` (unnormalized), `S_half_eps` (normalized, amplitude
/// `eps / 2` at the coarse truncation) and `S_eff` (effective two-mode model).
pub fn excitation_spectrum(p: &SystemParams, eps: f64, delta_e_grid: &[f64], opts: &ProbeOptions) -> Result<ScanResult> {
    positive_eps(eps)?;
    check_grid(delta_e_grid)?;
    let mut pop = Vec::with_capacity(delta_e_grid.len());
    let mut half = Vec::with_capacity(delta_e_grid.len());
    for &de in delta_e_grid {
        let r = solve_point(p, opts.cutoffs, eps, de)?;
        pop.push(r.rho.expectation(&r.model.excited));
        if let Some(c) = opts.coarse_cutoffs {
            let h = solve_point(p, c, eps / 2.0, de)?;
            half.push(h.rho.expectation(&h.model.excited));
        } else {
            half.push(f64::NAN);
        }
    }
    let s = normalize(&pop);
    let s_half = normalize(&half);
    let s_eff = effective::effective_spectrum(&effective::effective_params(p)?, delta_e_grid)?;
    let mut scan = ScanResult::new("detuning_e", delta_e_grid.to_vec())?
        .with_column("S", s)?
        .with_column("population", pop)?
        .with_column("S_half_eps", s_half)?
        .with_column("S_eff", s_eff.column("S_eff").expect("effective spectrum column").to_vec())?;
    record_metadata(&mut scan, p, eps, opts);
    Ok(scan)
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let peak = v.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
    v.iter().map(|x| if peak > 0.0 { x / peak } else { f64::NAN }).collect()
}

fn record_metadata(scan: &mut ScanResult, p: &SystemParams, eps: f64, opts: &ProbeOptions) {
    scan.add_metadata("eps", eps);
    scan.add_metadata("drive", "a2");
    scan.add_metadata("cutoffs", format!("{},{}", opts.cutoffs.0, opts.cutoffs.1));
    if let Some(c) = opts.coarse_cutoffs {
        scan.add_metadata("coarse_cutoffs", format!("{},{}", c.0, c.1));
    }
    scan.add_metadata("params", format!("{p:?}"));
}

/// Default spectrum amplitude `SPECTRUM_EPS_FACTOR * g_eff`.
pub fn default_spectrum_eps(p: &SystemParams) -> Result<f64> {
    scaled_eps(p, SPECTRUM_EPS_FACTOR)
}

/// Default `g2(0)` amplitude `G2_EPS_FACTOR * g_eff`.
pub fn default_g2_eps(p: &SystemParams) -> Result<f64> {
    scaled_eps(p, G2_EPS_FACTOR)
}

fn scaled_eps(p: &SystemParams, factor: f64) -> Result<f64> {
    let g_eff = effective::effective_params(p)?.g_eff.abs();
    if g_eff == 0.0 {
        return Err(Error::InvalidParameter("g_eff = 0: give the probe amplitude explicitly".into()));
    }
    Ok(factor * g_eff)
}

/// Expectation of `o` in `rho` (complex).
pub fn expectation_complex(rho: &DensityMatrix, o: &Operator) -> C64 {
    trace_product(rho.matrix(), o.matrix())
}

/// Stationary state of the full model at `p` with `drive`.
pub fn driven_steady_state(p: &SystemParams, drive: &ProbeDrive) -> Result<DensityMatrix> {
    steady_state(&build_liouvillian(p, drive)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, EvolveOptions};
    use crate::hilbert::{fock_annihilation, Ket};
    use crate::scan::{linspace, local_maxima, local_minima};
    use crate::Preset;

    #[test]
    fn undriven_relaxes_to_ground() {
        let p = Preset::SetA.params().with_cutoffs(1, 1);
        let rho = driven_steady_state(&p, &ProbeDrive::OFF).unwrap();
        let g = Ket::new(false, 0, 0).index(1, 1).unwrap();
        assert!((rho.matrix()[(g, g)].re - 1.0).abs() < 1e-10);
        assert!(rho.matrix().iter().enumerate().filter(|(k, _)| *k != g * 9).all(|(_, z)| z.norm() < 1e-10));
    }

    #[test]
    fn driven_empty_cavity_is_coherent() {
        let p = SystemParams { g: 0.0, j: 0.0, kappa2: 0.2, delta2: 0.3, ..Preset::SetB.params() }.with_cutoffs(1, 3);
        let (eps, de) = (0.004, -0.1);
        let drive = ProbeDrive::new(eps, de).unwrap();
        let rho = driven_steady_state(&p, &drive).unwrap();
        let model = LindbladModel::new(&p, &drive).unwrap();
        let a = expectation_complex(&rho, &model.a2);
        let expected = C64::new(0.0, -eps) / C64::new(p.kappa2 / 2.0, p.delta2 - de);
        assert!((a - expected).norm() < 1e-6 * expected.norm(), "{a} vs {expected}");
        let g2 = g2_zero(&rho, &model.a2).unwrap();
        assert!((g2 - 1.0).abs() < 1e-3, "{g2}");
    }

    #[test]
    fn dual_methods_agree() {
        let p = Preset::SetB.params().with_cutoffs(2, 2);
        let eff = effective::effective_params(&p).unwrap();
        let drive = ProbeDrive::new(0.01 * eff.g_eff, eff.shift_e + eff.g_eff).unwrap();
        let l = build_liouvillian(&p, &drive).unwrap();
        let a = steady_state(&l).unwrap();
        let b = steady_state_oracle(&l).unwrap();
        assert!((a.matrix() - b.matrix()).camax() < 1e-12);
        assert!(steady_state_residual(&l, a.matrix()) < RESIDUAL_TOL);
    }

    #[test]
    fn long_time_evolution_reaches_steady_state() {
        let p = Preset::SetB.params().with_cutoffs(1, 1);
        let eff = effective::effective_params(&p).unwrap();
        let drive = ProbeDrive::new(0.02 * eff.g_eff, eff.shift_e - eff.g_eff).unwrap();
        let ss = driven_steady_state(&p, &drive).unwrap();
        let model = LindbladModel::new(&p, &drive).unwrap();
        let rho0 = DensityMatrix::from_ket(&p, Ket::new(false, 0, 0)).unwrap();
        let t_end = 50.0 / eff.kappa_eff;
        let ts = evolve(&p, &drive, &rho0, &[0.0, t_end], &EvolveOptions::default()).unwrap();
        let last = ts.len() - 1;
        for (op, v) in [(&model.n1, ts.n1[last]), (&model.n2, ts.n2[last]), (&model.excited, ts.pe[last])] {
            assert!((ss.expectation(op) - v).abs() < 1e-6);
        }
    }

    #[test]
    fn g2_reference_states() {
        let a = fock_annihilation(40).unwrap();
        let fock1 = DensityMatrix::basis_state(41, 1).unwrap();
        assert_eq!(g2_zero(&fock1, &a).unwrap(), 0.0);
        let nbar: f64 = 0.3;
        let q = nbar / (1.0 + nbar);
        let mut thermal = CMatrix::zeros(41, 41);
        for k in 0..41 {
            thermal[(k, k)] = C64::new((1.0 - q) * q.powi(k as i32), 0.0);
        }
        let tr = thermal.trace();
        let thermal = DensityMatrix::new(thermal / tr).unwrap();
        assert!((g2_zero(&thermal, &a).unwrap() - 2.0).abs() < 1e-6);
        let vacuum = DensityMatrix::basis_state(41, 0).unwrap();
        assert!(matches!(g2_zero(&vacuum, &a), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn decoupled_emitter_gives_poissonian_light() {
        let p = SystemParams { g: 0.0, ..Preset::SetB.params() };
        let grid = linspace(-0.15, 0.15, 7);
        let scan = g2_scan(&p, 0.0005, &grid, &ProbeOptions::for_g2()).unwrap();
        for g2 in scan.column("g2").unwrap() {
            assert!((g2 - 1.0).abs() < 1e-3, "{g2}");
        }
    }

    #[test]
    fn set_a_spectrum_doublet() {
        let p = Preset::SetA.params();
        let eff = effective::effective_params(&p).unwrap();
        let grid = linspace(eff.shift_e - 3.0 * eff.g_eff, eff.shift_e + 3.0 * eff.g_eff, 121);
        let eps = default_spectrum_eps(&p).unwrap();
        let scan = excitation_spectrum(&p, eps, &grid, &ProbeOptions::for_spectrum()).unwrap();
        let s = scan.column("S").unwrap();
        let peaks = local_maxima(s);
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        let split = grid[peaks[1]] - grid[peaks[0]];
        assert!((split - 2.0 * eff.g_eff).abs() < 0.1 * 2.0 * eff.g_eff, "{split}");
        let s_eff = scan.column("S_eff").unwrap();
        let eff_peaks = local_maxima(s_eff);
        for (a, b) in peaks.iter().zip(&eff_peaks) {
            assert!((grid[*a] - grid[*b]).abs() < 0.1 * eff.g_eff);
        }
        let half = scan.column("S_half_eps").unwrap();
        assert!(s.iter().zip(half).all(|(x, y)| (x - y).abs() < 0.01));
        assert_eq!(local_minima(s).len(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = Preset::SetB.params();
        assert!(g2_scan(&p, 0.0, &[0.0], &ProbeOptions::for_g2()).is_err());
        assert!(excitation_spectrum(&p, 0.01, &[], &ProbeOptions::for_spectrum()).is_err());
        assert!(default_g2_eps(&SystemParams { j: 0.0, ..p }).is_err());
    }
}
