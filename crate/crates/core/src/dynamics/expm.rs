//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use crate::hilbert::Superoperator;
use crate::linalg::norm1;
use crate::{CMatrix, Error, Result, C64};

/// Largest 1-norm for which the degree-13 approximant is accurate to unit roundoff.
const THETA_13: f64 = 5.371_920_351_148_152;

/// Squarings allowed before the input is rejected as too large.
pub const MAX_SQUARINGS: u32 = 40;

/// Largest Liouvillian dimension the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 1024;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidParameter("expm needs a square matrix".into()));
    }
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::ExcessiveNorm { norm });
    }
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as u32 } else { 0 };
    if s > MAX_SQUARINGS {
        return Err(Error::ExcessiveNorm { norm });
    }
    let a = a * c(0.5f64.powi(s as i32));
    let b = &PADE_13;
    let id = CMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]))
        + &a6 * c(b[7])
        + &a4 * c(b[5])
        + &a2 * c(b[3])
        + &id * c(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]))
        + &a6 * c(b[6])
        + &a4 * c(b[4])
        + &a2 * c(b[2])
        + &id * c(b[0]);

    let denom = &v - &u;
    let mut r = denom
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::ExcessiveNorm { norm })?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// `exp(L t)`.
pub fn propagator_oracle(l: &Superoperator, t: f64) -> Result<Superoperator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("propagation time must be finite and nonnegative, got {t}")));
    }
    if l.matrix().nrows() > MAX_ORACLE_DIM {
        return Err(Error::InvalidParameter(format!(
            "Liouvillian dimension {} exceeds the oracle limit {MAX_ORACLE_DIM}",
            l.matrix().nrows()
        )));
    }
    let p = expm(&(l.matrix() * c(t)))?;
    Superoperator::new(p)
}
