//! Effective emitter / auxiliary-mode model after eliminating the lossy mode.
//!
//! With `D = sqrt(delta1^2 + kappa1^2 / 4)` the admixtures are
//! `alpha = g / D` and `beta = J / D`, and
//!
//! ```text
//! g_eff     = beta g
//! delta_eff = delta2 + (alpha^2 - beta^2) delta1
//! kappa_eff = kappa2 + beta^2 kappa1
//! gamma_eff = gamma  + alpha^2 kappa1
//! ```
//!
//! The emitter level shifts by `-alpha^2 delta1` and the auxiliary mode by
//! `-beta^2 delta1`.

use nalgebra::Matrix2;

use crate::scan::ScanResult;
use crate::{Error, Result, SystemParams, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams {
    pub alpha: f64,
    pub beta: f64,
    pub g_eff: f64,
    pub delta_eff: f64,
    pub kappa_eff: f64,
    pub gamma_eff: f64,
    /// Emitter level shift `-alpha^2 delta1`.
    pub shift_e: f64,
    /// Auxiliary-mode level shift `-beta^2 delta1`.
    pub shift_2: f64,
}

impl EffectiveParams {
    /// Energy of the dressed auxiliary-mode photon, `delta2 - beta^2 delta1`.
    pub fn mode_energy(&self) -> f64 {
        self.shift_e + self.delta_eff
    }

    /// Single-excitation block of the effective non-Hermitian Hamiltonian in
    /// the basis `(|e,0>, |g,1>)`, energies measured from the ground state.
    pub fn single_excitation_matrix(&self) -> Matrix2<C64> {
        Matrix2::new(
            C64::new(self.shift_e, -self.gamma_eff / 2.0),
            C64::new(self.g_eff, 0.0),
            C64::new(self.g_eff, 0.0),
            C64::new(self.mode_energy(), -self.kappa_eff / 2.0),
        )
    }

    /// Eigenvalues of [`single_excitation_matrix`](Self::single_excitation_matrix),
    /// ordered by real part.
    pub fn doublet(&self) -> [C64; 2] {
        let m = self.single_excitation_matrix();
        let (a, b) = (m[(0, 0)], m[(1, 1)]);
        let mean = (a + b) / 2.0;
        let root = (((a - b) / 2.0).powi(2) + C64::new(self.g_eff * self.g_eff, 0.0)).sqrt();
        let (x, y) = (mean - root, mean + root);
        if x.re <= y.re {
            [x, y]
        } else {
            [y, x]
        }
    }
}

pub fn effective_params(p: &SystemParams) -> Result<EffectiveParams> {
    let denom = p.delta1 * p.delta1 + p.kappa1 * p.kappa1 / 4.0;
    if denom <= 0.0 {
        return Err(Error::UndefinedAdmixture);
    }
    let norm = denom.sqrt();
    let alpha = p.g / norm;
    let beta = p.j / norm;
    let (a2, b2) = (alpha * alpha, beta * beta);
    Ok(EffectiveParams {
        alpha,
        beta,
        g_eff: beta * p.g,
        delta_eff: p.delta2 + (a2 - b2) * p.delta1,
        kappa_eff: p.kappa2 + b2 * p.kappa1,
        gamma_eff: p.gamma + a2 * p.kappa1,
        shift_e: -a2 * p.delta1,
        shift_2: -b2 * p.delta1,
    })
}

/// The `delta2` that puts the effective model on resonance, `(beta^2 - alpha^2) delta1`.
pub fn resonance_delta2(p: &SystemParams) -> Result<f64> {
    let eff = effective_params(p)?;
    Ok((eff.beta * eff.beta - eff.alpha * eff.alpha) * p.delta1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingRatios {
    pub g_over_kappa: f64,
    pub g_over_gamma: f64,
    /// `g_eff^2 / (kappa_eff gamma_eff)`.
    pub cooperativity: f64,
}

pub fn coupling_ratios(p: &SystemParams) -> Result<CouplingRatios> {
    ratios_of(&effective_params(p)?)
}

pub fn ratios_of(eff: &EffectiveParams) -> Result<CouplingRatios> {
    if eff.kappa_eff <= 0.0 {
        return Err(Error::ZeroDecay("cavity"));
    }
    if eff.gamma_eff <= 0.0 {
        return Err(Error::ZeroDecay("emitter"));
    }
    Ok(CouplingRatios {
        g_over_kappa: eff.g_eff / eff.kappa_eff,
        g_over_gamma: eff.g_eff / eff.gamma_eff,
        cooperativity: eff.g_eff * eff.g_eff / (eff.kappa_eff * eff.gamma_eff),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalBeta {
    /// `sqrt(kappa2 / kappa1)`.
    pub beta_opt: f64,
    /// `g / (2 sqrt(kappa1 kappa2))`, the largest reachable `g_eff / kappa_eff`.
    pub ratio_max: f64,
    /// Whether `kappa2 < g^2 / (4 kappa1)`, i.e. `ratio_max > 1`.
    pub strong_coupling: bool,
}

/// Admixture maximizing `g_eff / kappa_eff` when the emitter decay is negligible.
pub fn optimal_beta(g: f64, kappa1: f64, kappa2: f64) -> Result<OptimalBeta> {
    if !(kappa1 > 0.0) || !(kappa2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "optimal beta needs kappa1, kappa2 > 0, got ({kappa1}, {kappa2})"
        )));
    }
    Ok(OptimalBeta {
        beta_opt: (kappa2 / kappa1).sqrt(),
        ratio_max: g / (2.0 * (kappa1 * kappa2).sqrt()),
        strong_coupling: kappa2 < g * g / (4.0 * kappa1),
    })
}

/// Coupling-to-decay ratios over a `delta1` x `J` grid, other parameters fixed.
///
/// Rows are flattened with `delta1` slowest; the abscissa is the row index.
pub fn regime_map(p: &SystemParams, delta1_grid: &[f64], j_grid: &[f64]) -> Result<ScanResult> {
    if delta1_grid.is_empty() || j_grid.is_empty() {
        return Err(Error::InvalidParameter("regime map needs nonempty grids".into()));
    }
    let n = delta1_grid.len() * j_grid.len();
    let mut cols: [Vec<f64>; 5] = Default::default();
    for &d1 in delta1_grid {
        for &j in j_grid {
            let r = coupling_ratios(&SystemParams { delta1: d1, j, ..*p })?;
            for (c, v) in cols.iter_mut().zip([d1, j, r.g_over_kappa, r.g_over_gamma, r.cooperativity]) {
                c.push(v);
            }
        }
    }
    let mut out = ScanResult::new("point", (0..n).map(|i| i as f64).collect())?;
    for (name, c) in ["delta1", "J", "g_over_kappa", "g_over_gamma", "cooperativity"].into_iter().zip(cols) {
        out.push_column(name, c)?;
    }
    Ok(out)
}

/// `g_eff / kappa_eff` over a `kappa1` x `kappa2` grid with `J` set to the
/// optimal admixture at each point, against the predicted boundary
/// `kappa2 < g^2 / (4 kappa1)`.
pub fn kappa_map(p: &SystemParams, kappa1_grid: &[f64], kappa2_grid: &[f64]) -> Result<ScanResult> {
    if kappa1_grid.is_empty() || kappa2_grid.is_empty() {
        return Err(Error::InvalidParameter("kappa map needs nonempty grids".into()));
    }
    let n = kappa1_grid.len() * kappa2_grid.len();
    let mut cols: [Vec<f64>; 6] = Default::default();
    for &k1 in kappa1_grid {
        for &k2 in kappa2_grid {
            let opt = optimal_beta(p.g, k1, k2)?;
            let d = (p.delta1 * p.delta1 + k1 * k1 / 4.0).sqrt();
            let q = SystemParams { kappa1: k1, kappa2: k2, j: opt.beta_opt * d, ..*p };
            let eff = effective_params(&q)?;
            if eff.kappa_eff <= 0.0 {
                return Err(Error::ZeroDecay("cavity"));
            }
            let ratio = eff.g_eff / eff.kappa_eff;
            let boundary = k2 < p.g * p.g / (4.0 * k1);
            for (c, v) in cols.iter_mut().zip([k1, k2, eff.beta, ratio, (ratio > 1.0) as u8 as f64, boundary as u8 as f64]) {
                c.push(v);
            }
        }
    }
    let mut out = ScanResult::new("point", (0..n).map(|i| i as f64).collect())?;
    for (name, c) in ["kappa1", "kappa2", "beta", "g_over_kappa", "strong_coupling", "boundary"].into_iter().zip(cols) {
        out.push_column(name, c)?;
    }
    Ok(out)
}

/// Resonant vacuum-Rabi envelope `exp(-(kappa_eff + gamma_eff) t / 2) cos^2(g_eff t)`.
///
/// Only meaningful at `delta_eff = 0`; off-resonant dynamics come from the
/// full master equation instead.
pub fn effective_rabi_pe(t: f64, eff: &EffectiveParams) -> f64 {
    (-(eff.kappa_eff + eff.gamma_eff) * t / 2.0).exp() * (eff.g_eff * t).cos().powi(2)
}

/// Weak-probe emitter excitation spectrum of the effective model, probe on
/// the auxiliary mode, normalized to unit maximum over the grid.
///
/// For each probe detuning `w` the linear response of the emitter amplitude
/// is `g_eff / det(w - M)`; the constant `g_eff^2` drops out of the
/// normalization, so `g_eff = 0` yields the bare-level profile.
pub fn effective_spectrum(eff: &EffectiveParams, omega_grid: &[f64]) -> Result<ScanResult> {
    if omega_grid.is_empty() {
        return Err(Error::InvalidParameter("spectrum grid is empty".into()));
    }
    let m = eff.single_excitation_matrix();
    let g2 = C64::new(eff.g_eff * eff.g_eff, 0.0);
    let raw: Vec<f64> = omega_grid
        .iter()
        .map(|&w| {
            let w = C64::new(w, 0.0);
            let det = (w - m[(0, 0)]) * (w - m[(1, 1)]) - g2;
            1.0 / det.norm_sqr()
        })
        .collect();
    let peak = raw.iter().copied().fold(0.0, f64::max);
    let normalized = raw.iter().map(|v| v / peak).collect();
    ScanResult::new("detuning_e", omega_grid.to_vec())?.with_column("S_eff", normalized)
}
