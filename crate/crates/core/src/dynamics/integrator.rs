//! Adaptive Dormand-Prince 5(4) integration of `d rho/dt = L(rho)` for
//! Hermiticity-preserving linear generators.

use crate::{CMatrix, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        if !(rtol > 0.0 && atol > 0.0 && rtol.is_finite() && atol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerances must be positive (rtol {rtol}, atol {atol})")));
        }
        Ok(Self { rtol, atol })
    }

    /// Scale both tolerances by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self { rtol: self.rtol * factor, atol: self.atol * factor }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

/// Give up after this many attempted steps.
pub const MAX_STEPS: usize = 50_000_000;

// the generator is autonomous, so the stage times are not needed
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// `out = y + h * sum_i a_i k_i` over the nonzero coefficients.
fn combine(out: &mut CMatrix, y: &CMatrix, h: f64, terms: &[(f64, &CMatrix)]) {
    out.copy_from(y);
    for (a, k) in terms {
        out.zip_apply(*k, |o, kv| *o += kv * (h * a));
    }
}

fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Integrate from `times[0]` through every later entry of `times`, calling
/// `sample(i, t, y)` at each grid point (including the initial one). The
/// step size is clipped so that every sample time is hit exactly.
///
/// After each accepted step the state and the reused stage are Hermitized;
/// for a generator with `L(X^dag) = L(X)^dag` this is exact up to rounding.
pub fn integrate<F, S>(mut rhs: F, y0: &CMatrix, times: &[f64], tol: Tolerances, mut sample: S) -> Result<StepStats>
where
    F: FnMut(&CMatrix, &mut CMatrix),
    S: FnMut(usize, f64, &CMatrix) -> Result<()>,
{
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid must be finite and strictly increasing".into()));
    }
    let (r, c) = y0.shape();
    let zeros = || CMatrix::zeros(r, c);
    let mut stats = StepStats::default();
    let mut y = y0.clone();
    hermitize(&mut y);
    let mut t = times[0];
    sample(0, t, &y)?;
    if times.len() == 1 {
        return Ok(stats);
    }

    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (zeros(), zeros(), zeros(), zeros(), zeros(), zeros(), zeros());
    let (mut stage, mut y_new, origin) = (zeros(), zeros(), zeros());
    rhs(&y, &mut k1);
    stats.rhs_evaluations += 1;

    let err_norm = |err: &CMatrix, a: &CMatrix, b: &CMatrix| -> f64 {
        let mut acc = 0.0;
        for ((e, ya), yb) in err.iter().zip(a.iter()).zip(b.iter()) {
            let sc = tol.atol + tol.rtol * ya.norm().max(yb.norm());
            acc += (e.norm() / sc).powi(2);
        }
        (acc / err.len() as f64).sqrt()
    };

    // initial step from the local scale of y and y'
    let mut h = {
        let d0 = err_norm(&y, &y, &y);
        let d1 = err_norm(&k1, &y, &y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(times[times.len() - 1] - t)
    };

    let mut next = 1;
    let mut last_err: f64 = 1e-4;
    while next < times.len() {
        let target = times[next];
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::Integration { t, reason: format!("exceeded {MAX_STEPS} steps") });
        }
        let remaining = target - t;
        let hits_target = h >= remaining * (1.0 - 1e-12);
        let step = if hits_target { remaining } else { h };
        if step < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration { t, reason: "step size underflow".into() });
        }

        combine(&mut stage, &y, step, &[(A21, &k1)]);
        rhs(&stage, &mut k2);
        combine(&mut stage, &y, step, &[(A31, &k1), (A32, &k2)]);
        rhs(&stage, &mut k3);
        combine(&mut stage, &y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs(&stage, &mut k4);
        combine(&mut stage, &y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs(&stage, &mut k5);
        combine(&mut stage, &y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        rhs(&stage, &mut k6);
        combine(&mut y_new, &y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        rhs(&y_new, &mut k7);
        stats.rhs_evaluations += 6;

        combine(&mut stage, &origin, step, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
        let err = err_norm(&stage, &y, &y_new);
        if !err.is_finite() || y_new.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integration { t, reason: "non-finite state".into() });
        }

        if err <= 1.0 {
            stats.accepted += 1;
            t = if hits_target { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            hermitize(&mut y);
            hermitize(&mut k1);
            if hits_target {
                sample(next, t, &y)?;
                next += 1;
            }
            // PI controller
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.7 / 5.0) * last_err.powf(0.4 / 5.0)).clamp(0.2, 5.0)
            };
            last_err = err.max(1e-4);
            let grown = step * fac;
            // a step shortened only to land on a sample keeps the previous h
            h = if hits_target && step < h { h.max(grown) } else { grown };
        } else {
            stats.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(stats)
}

/// In-place evaluation of `K rho + rho K^dag + sum_c c rho c^dag`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    k: CMatrix,
    k_adj: CMatrix,
    jumps: Vec<(CMatrix, CMatrix)>,
    scratch: CMatrix,
}

impl LindbladGenerator {
    pub fn new(k: CMatrix, collapse: &[CMatrix]) -> Self {
        let n = k.nrows();
        Self {
            k_adj: k.adjoint(),
            k,
            jumps: collapse.iter().map(|c| (c.clone(), c.adjoint())).collect(),
            scratch: CMatrix::zeros(n, n),
        }
    }

    pub fn apply(&mut self, rho: &CMatrix, out: &mut CMatrix) {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        out.gemm(one, &self.k, rho, zero);
        out.gemm(one, rho, &self.k_adj, one);
        for (c, cd) in &self.jumps {
            self.scratch.gemm(one, c, rho, zero);
            out.gemm(one, &self.scratch, cd, one);
        }
    }
}
