//! Non-Hermitian spectra of the one- and two-excitation manifolds.
//!
//! With the decays folded into the Hamiltonian, each eigenvalue `E` gives a
//! level at `Re E` with linewidth `-2 Im E`. The two eigenbranches with the
//! smallest linewidths form the dark-state doublet: they carry almost no
//! weight on the lossy mode `a1`.

use nalgebra::{DVector, Schur};

use crate::effective::{self, EffectiveParams};
use crate::hilbert::Ket;
use crate::scan::ScanResult;
use crate::{CMatrix, Error, Result, SystemParams, C64};

/// `delta1 < ADIABATIC_RATIO * kappa1` flags parameters outside the regime
/// where the effective model is expected to hold.
pub const ADIABATIC_RATIO: f64 = 5.0;

/// Minimum eigenvector overlap accepted between neighbouring scan points.
pub const MIN_TRACKING_OVERLAP: f64 = 0.5;

/// Block of the non-Hermitian Hamiltonian on a fixed excitation number.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationSubspace {
    pub n_exc: usize,
    /// `(|e,0,0>, |g,1,0>, |g,0,1>)` for one excitation,
    /// `(|e,1,0>, |e,0,1>, |g,2,0>, |g,1,1>, |g,0,2>)` for two.
    pub basis: Vec<Ket>,
    pub matrix: CMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchLabel {
    DarkMinus,
    DarkPlus,
    /// Remaining branches, numbered by increasing energy.
    Bright(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenBranch {
    pub label: BranchLabel,
    pub eigenvalue: C64,
    /// Unit-norm right eigenvector in the subspace basis.
    pub vector: DVector<C64>,
}

impl EigenBranch {
    pub fn energy(&self) -> f64 {
        self.eigenvalue.re
    }

    pub fn linewidth(&self) -> f64 {
        -2.0 * self.eigenvalue.im
    }

    pub fn is_dark(&self) -> bool {
        matches!(self.label, BranchLabel::DarkMinus | BranchLabel::DarkPlus)
    }
}

/// `H_nh |ket>` as a list of `(ket, amplitude)`, from the ladder algebra.
fn apply_nonhermitian(p: &SystemParams, ket: Ket) -> Vec<(Ket, C64)> {
    let (n1, n2) = (ket.n1 as f64, ket.n2 as f64);
    let e = if ket.excited { 1.0 } else { 0.0 };
    let diag = C64::new(
        p.delta1 * n1 + p.delta2 * n2,
        -0.5 * (p.kappa1 * n1 + p.kappa2 * n2 + p.gamma * e),
    );
    let mut out = vec![(ket, diag)];
    if ket.excited {
        // g a1^dag s-
        out.push((Ket::new(false, ket.n1 + 1, ket.n2), C64::new(p.g * (n1 + 1.0).sqrt(), 0.0)));
    } else if ket.n1 > 0 {
        // g a1 s+
        out.push((Ket::new(true, ket.n1 - 1, ket.n2), C64::new(p.g * n1.sqrt(), 0.0)));
    }
    if ket.n2 > 0 {
        // J a1^dag a2
        let amp = p.j * ((n1 + 1.0) * n2).sqrt();
        out.push((Ket::new(ket.excited, ket.n1 + 1, ket.n2 - 1), C64::new(amp, 0.0)));
    }
    if ket.n1 > 0 {
        // J a2^dag a1
        let amp = p.j * (n1 * (n2 + 1.0)).sqrt();
        out.push((Ket::new(ket.excited, ket.n1 - 1, ket.n2 + 1), C64::new(amp, 0.0)));
    }
    out
}

pub fn excitation_block(p: &SystemParams, n_exc: usize) -> Result<ExcitationSubspace> {
    if !(1..=2).contains(&n_exc) {
        return Err(Error::UnsupportedExcitation(n_exc));
    }
    p.validate()?;
    if p.n1_cutoff < n_exc || p.n2_cutoff < n_exc {
        return Err(Error::InvalidParameter(format!(
            "cutoffs ({}, {}) cannot hold {n_exc} excitations",
            p.n1_cutoff, p.n2_cutoff
        )));
    }
    let basis = Ket::with_excitations(n_exc);
    let n = basis.len();
    let mut matrix = CMatrix::zeros(n, n);
    for (col, &ket) in basis.iter().enumerate() {
        for (target, amp) in apply_nonhermitian(p, ket) {
            let row = basis.iter().position(|k| *k == target).expect("H_nh conserves excitations");
            matrix[(row, col)] += amp;
        }
    }
    Ok(ExcitationSubspace { n_exc, basis, matrix })
}

/// Closed-form eigenvalues of a 3x3 complex matrix (Cardano, Newton-polished).
pub fn cubic_eigenvalues(m: &CMatrix) -> [C64; 3] {
    assert_eq!(m.shape(), (3, 3), "cubic_eigenvalues needs a 3x3 matrix");
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    // x^3 + a x^2 + b x + c
    let (a, b, c) = (-tr, minors, -det);
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3 = {
        let plus = -q / 2.0 + disc;
        let minus = -q / 2.0 - disc;
        if plus.norm() >= minus.norm() {
            plus
        } else {
            minus
        }
    };
    let u = u3.powf(1.0 / 3.0);
    let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let poly = |x: C64| ((x + a) * x + b) * x + c;
    let dpoly = |x: C64| (3.0 * x + 2.0 * a) * x + b;
    let mut roots = [C64::new(0.0, 0.0); 3];
    let mut uk = u;
    for root in roots.iter_mut() {
        let t = if uk.norm() == 0.0 { C64::new(0.0, 0.0) } else { uk - p / (3.0 * uk) };
        let mut x = t - a / 3.0;
        for _ in 0..3 {
            let d = dpoly(x);
            if d.norm() == 0.0 {
                break;
            }
            x -= poly(x) / d;
        }
        *root = x;
        uk *= omega;
    }
    roots
}

/// Right null vector of `m - lambda I` for a 3x3 matrix, via row cross products.
fn null_vector_3x3(m: &CMatrix, lambda: C64) -> DVector<C64> {
    let mut a = m.clone();
    for i in 0..3 {
        a[(i, i)] -= lambda;
    }
    let row = |i: usize| [a[(i, 0)], a[(i, 1)], a[(i, 2)]];
    let cross = |x: [C64; 3], y: [C64; 3]| {
        [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
    };
    let best = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(i, j)| cross(row(i), row(j)))
        .max_by(|u, v| {
            let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            nu.total_cmp(&nv)
        })
        .unwrap();
    DVector::from_row_slice(&best).normalize()
}

/// Eigenvectors of an upper-triangular Schur factor by back substitution.
fn triangular_eigenvectors(t: &CMatrix) -> Vec<DVector<C64>> {
    let n = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let guard = scale * f64::EPSILON;
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = DVector::<C64>::zeros(n);
            y[k] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut s = C64::new(0.0, 0.0);
                for j in i + 1..=k {
                    s += t[(i, j)] * y[j];
                }
                let mut d = t[(i, i)] - lambda;
                if d.norm() < guard {
                    d = C64::new(guard, 0.0);
                }
                y[i] = -s / d;
            }
            y
        })
        .collect()
}

/// Weight of a subspace vector on kets with at least one `a1` photon.
fn lossy_weight(basis: &[Ket], v: &DVector<C64>) -> f64 {
    basis.iter().zip(v.iter()).filter(|(k, _)| k.n1 > 0).map(|(_, z)| z.norm_sqr()).sum()
}

/// All eigenpairs of the block, labelled dark / bright.
pub fn eigendecompose(sub: &ExcitationSubspace) -> Result<Vec<EigenBranch>> {
    let n = sub.matrix.nrows();
    let pairs: Vec<(C64, DVector<C64>)> = match Schur::try_new(sub.matrix.clone(), f64::EPSILON, 10_000) {
        Some(schur) => {
            let (q, t) = schur.unpack();
            triangular_eigenvectors(&t)
                .into_iter()
                .enumerate()
                .map(|(k, y)| (t[(k, k)], (&q * y).normalize()))
                .collect()
        }
        None if n == 3 => cubic_eigenvalues(&sub.matrix)
            .into_iter()
            .map(|lambda| (lambda, null_vector_3x3(&sub.matrix, lambda)))
            .collect(),
        None => return Err(Error::EigenConvergence(n)),
    };

    let trace = sub.matrix.trace();
    let sum: C64 = pairs.iter().map(|(l, _)| *l).sum();
    let scale = sub.matrix.iter().map(|z| z.norm()).fold(trace.norm(), f64::max).max(1.0);
    if (sum - trace).norm() > 1e-10 * scale {
        return Err(Error::EigenConvergence(n));
    }

    // dark doublet: two smallest linewidths, ties broken by lossy-mode weight
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| (-pairs[x].0.im).total_cmp(&(-pairs[y].0.im)));
    if n > 2 {
        let (w1, w2) = (-pairs[order[1]].0.im, -pairs[order[2]].0.im);
        if (w1 - w2).abs() <= 1e-12 * w1.abs().max(w2.abs()).max(1.0)
            && lossy_weight(&sub.basis, &pairs[order[2]].1) < lossy_weight(&sub.basis, &pairs[order[1]].1)
        {
            order.swap(1, 2);
        }
    }
    let (d0, d1) = (order[0], order[1]);
    let (minus, plus) = if pairs[d0].0.re <= pairs[d1].0.re { (d0, d1) } else { (d1, d0) };
    let mut bright: Vec<usize> = order[2..].to_vec();
    bright.sort_by(|&x, &y| pairs[x].0.re.total_cmp(&pairs[y].0.re));

    let mut branches = Vec::with_capacity(n);
    for (idx, label) in [(minus, BranchLabel::DarkMinus), (plus, BranchLabel::DarkPlus)]
        .into_iter()
        .chain(bright.into_iter().enumerate().map(|(k, idx)| (idx, BranchLabel::Bright(k))))
    {
        let (eigenvalue, vector) = pairs[idx].clone();
        branches.push(EigenBranch { label, eigenvalue, vector });
    }
    Ok(branches)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarkDoublet {
    pub minus: EigenBranch,
    pub plus: EigenBranch,
    /// `Re E_plus - Re E_minus`.
    pub splitting: f64,
    /// Set when `delta1 < 5 kappa1`, where adiabatic elimination is unreliable.
    pub outside_adiabatic_regime: bool,
}

pub fn dark_doublet(p: &SystemParams, n_exc: usize) -> Result<DarkDoublet> {
    let branches = eigendecompose(&excitation_block(p, n_exc)?)?;
    let mut it = branches.into_iter();
    let minus = it.next().expect("dark minus first");
    let plus = it.next().expect("dark plus second");
    let outside = p.delta1.abs() < ADIABATIC_RATIO * p.kappa1;
    if outside {
        log::warn!(
            "delta1 = {} < {ADIABATIC_RATIO} kappa1 = {}: outside the adiabatic regime",
            p.delta1,
            ADIABATIC_RATIO * p.kappa1
        );
    }
    Ok(DarkDoublet { splitting: plus.energy() - minus.energy(), minus, plus, outside_adiabatic_regime: outside })
}

fn overlap(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).norm()
}

/// Assignment of the current pair to the previous one by maximal summed
/// overlap: whether to swap, and the smaller of the two matched overlaps.
fn match_pair(prev: (&DVector<C64>, &DVector<C64>), cur: (&DVector<C64>, &DVector<C64>)) -> (bool, f64) {
    let keep = overlap(prev.0, cur.0) + overlap(prev.1, cur.1);
    let swap = overlap(prev.0, cur.1) + overlap(prev.1, cur.0);
    if keep >= swap {
        (false, overlap(prev.0, cur.0).min(overlap(prev.1, cur.1)))
    } else {
        (true, overlap(prev.0, cur.1).min(overlap(prev.1, cur.0)))
    }
}

/// Dark-doublet energies and linewidths across a `delta2` grid.
///
/// Branch `a` starts as the lower dark state at the first grid point; both
/// branches are then followed by maximal eigenvector overlap, so they pass
/// continuously through the avoided crossing. Columns: `E_a`, `E_b`,
/// `width_a`, `width_b`, `splitting` (`|E_a - E_b|`), `overlap_min`,
/// `E_eff_minus`, `E_eff_plus` (effective 2x2 doublet) and
/// `trace_rel_error`.
pub fn avoided_crossing_scan(p: &SystemParams, delta2_grid: &[f64]) -> Result<ScanResult> {
    avoided_crossing_scan_n(p, delta2_grid, 1)
}

/// [`avoided_crossing_scan`] for either excitation manifold.
pub fn avoided_crossing_scan_n(p: &SystemParams, delta2_grid: &[f64], n_exc: usize) -> Result<ScanResult> {
    if delta2_grid.is_empty() {
        return Err(Error::InvalidParameter("delta2 grid is empty".into()));
    }
    let mut cols: [Vec<f64>; 9] = Default::default();
    let mut prev: Option<(DVector<C64>, DVector<C64>)> = None;
    for (index, &d2) in delta2_grid.iter().enumerate() {
        let q = p.with_delta2(d2);
        let sub = excitation_block(&q, n_exc)?;
        let branches = eigendecompose(&sub)?;
        let (m, pl) = (&branches[0], &branches[1]);
        let (a, b, ov) = match &prev {
            None => (m, pl, 1.0),
            Some((va, vb)) => {
                let (swap, ov) = match_pair((va, vb), (&m.vector, &pl.vector));
                if ov < MIN_TRACKING_OVERLAP {
                    return Err(Error::BranchContinuity { index, overlap: ov });
                }
                if swap {
                    (pl, m, ov)
                } else {
                    (m, pl, ov)
                }
            }
        };
        let eff = effective::effective_params(&q)?;
        let doublet = eff.doublet();
        let trace = sub.matrix.trace();
        let sum: C64 = branches.iter().map(|br| br.eigenvalue).sum();
        cols[0].push(a.energy());
        cols[1].push(b.energy());
        cols[2].push(a.linewidth());
        cols[3].push(b.linewidth());
        cols[4].push((a.energy() - b.energy()).abs());
        cols[5].push(ov);
        cols[6].push(doublet[0].re);
        cols[7].push(doublet[1].re);
        cols[8].push((sum - trace).norm() / trace.norm().max(f64::MIN_POSITIVE));
        prev = Some((a.vector.clone(), b.vector.clone()));
    }
    let names = ["E_a", "E_b", "width_a", "width_b", "splitting", "overlap_min", "E_eff_minus", "E_eff_plus", "trace_rel_error"];
    let mut scan = ScanResult::new("delta2", delta2_grid.to_vec())?;
    for (name, col) in names.into_iter().zip(cols) {
        scan.push_column(name, col)?;
    }
    scan.add_metadata("n_exc", n_exc);
    Ok(scan)
}

/// How `delta1` follows `kappa1` in [`effective_agreement_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Delta1Policy {
    /// Keep `delta1 / kappa1` at the base value.
    #[default]
    FixedRatio,
    /// Keep `delta1` at the base value.
    FixedDelta1,
}

/// Exact single-excitation dark doublet versus the effective 2x2 model as
/// `kappa1` varies, with `J` fixed and `delta2` kept on the effective
/// resonance at every point.
///
/// `discrepancy` is `|s_exact - s_eff| / |s_eff|` for the real-part
/// splittings `s`.
pub fn effective_agreement_scan(p_base: &SystemParams, kappa1_grid: &[f64], policy: Delta1Policy) -> Result<ScanResult> {
    if kappa1_grid.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::InvalidParameter("kappa1 grid must be positive".into()));
    }
    let ratio = p_base.delta1 / p_base.kappa1;
    let mut rows: Vec<[f64; 13]> = Vec::with_capacity(kappa1_grid.len());
    for &k1 in kappa1_grid {
        let delta1 = match policy {
            Delta1Policy::FixedRatio => ratio * k1,
            Delta1Policy::FixedDelta1 => p_base.delta1,
        };
        let q = SystemParams { kappa1: k1, delta1, ..*p_base }.at_resonance()?;
        let exact = dark_doublet(&q, 1)?;
        let eff: EffectiveParams = effective::effective_params(&q)?;
        let [em, ep] = eff.doublet();
        let s_exact = exact.splitting;
        let s_eff = ep.re - em.re;
        rows.push([
            delta1,
            exact.minus.energy(),
            exact.plus.energy(),
            exact.minus.linewidth(),
            exact.plus.linewidth(),
            em.re,
            ep.re,
            -2.0 * em.im,
            -2.0 * ep.im,
            s_exact,
            s_eff,
            (s_exact - s_eff).abs() / s_eff.abs(),
            exact.outside_adiabatic_regime as u8 as f64,
        ]);
    }
    let names = [
        "delta1",
        "E_minus",
        "E_plus",
        "width_minus",
        "width_plus",
        "E_eff_minus",
        "E_eff_plus",
        "width_eff_minus",
        "width_eff_plus",
        "splitting",
        "splitting_eff",
        "discrepancy",
        "outside_adiabatic",
    ];
    let mut scan = ScanResult::new("kappa1", kappa1_grid.to_vec())?;
    for (c, name) in names.into_iter().enumerate() {
        scan.push_column(name, rows.iter().map(|r| r[c]).collect())?;
    }
    scan.add_metadata("delta1_policy", format!("{policy:?}"));
    Ok(scan)
}
