//! Exact evaluation of the exponential sums: the two bilinear families with
//! modular square roots, quadratic Gauss sums, Salie sums and short
//! Legendre-symbol sums.
//!
//! Square roots follow the collection convention: a term indexed by `m`
//! is summed over every root `k` of `j m` mod r, so a non-residue
//! contributes nothing and `m = 0 (mod r)` contributes once, through k = 0.

pub mod accum;
pub mod coeff;
pub mod phase;

use num_complex::Complex64;

pub use accum::{sum_complex, sum_f64, CompensatedSum, ComplexSum};
pub use coeff::CoeffSeq;
pub use phase::{char_r, unit_phase, unit_phase_ratio, IntervalSpec, PhaseFamily, PhaseFn};

use crate::error::{Error, Result};
use crate::field::PrimeContext;

pub(crate) fn check_j(ctx: &PrimeContext, j: i64) -> Result<u64> {
    let jr = ctx.reduce(j);
    if jr == 0 {
        return Err(Error::BadJ {
            j,
            r: ctx.modulus(),
        });
    }
    Ok(jr)
}

/// (m, k) for every root k of j m, in increasing m.
fn root_terms(ctx: &PrimeContext, jr: u64, ms: impl Iterator<Item = i64>) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    for m in ms {
        let s = ctx.mul(jr, ctx.reduce(m));
        for k in ctx.sqrts_reduced(s).iter() {
            out.push((m, k));
        }
    }
    out
}

/// Sum over l of alpha_l * sum over terms of w(m) e_r(l k) e(l f(m)).
fn accumulate(
    ctx: &PrimeContext,
    alpha: &CoeffSeq,
    terms: &[(i64, u64)],
    weight: impl Fn(i64) -> Complex64,
    f: &PhaseFn,
) -> Complex64 {
    let r = ctx.modulus();
    let mut total = ComplexSum::new();
    for (l, a) in alpha.iter() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let lr = ctx.reduce(l);
        let mut inner = ComplexSum::new();
        for &(m, k) in terms {
            let mut z = weight(m) * char_r(ctx.mul(lr, k), r);
            if !f.is_zero() {
                z *= unit_phase(l as f64 * f.eval(m as f64));
            }
            inner.add(z);
        }
        total.add(a * inner.value());
    }
    total.value()
}

fn check_set_support(ctx: &PrimeContext, alpha: &CoeffSeq) -> Result<()> {
    if let Some(l) = alpha.support().iter().find(|&&l| ctx.reduce(l) == 0) {
        return Err(Error::InvalidParams(format!(
            "index {l} is divisible by r = {}",
            ctx.modulus()
        )));
    }
    Ok(())
}

/// Sum over l in X and m in (A, A+Y] of alpha_l e_r(l sqrt(jm)) e(l f(m)).
pub fn bilinear_set_sum(
    ctx: &PrimeContext,
    j: i64,
    alpha: &CoeffSeq,
    interval: &IntervalSpec,
    f: &PhaseFn,
) -> Result<Complex64> {
    let jr = check_j(ctx, j)?;
    interval.validate(ctx)?;
    check_set_support(ctx, alpha)?;
    let (lo, hi) = (interval.start as f64 + 1.0, (interval.start + interval.len as i64) as f64);
    f.require_covers(lo, hi)?;
    let terms = root_terms(ctx, jr, interval.iter());
    Ok(accumulate(ctx, alpha, &terms, |_| Complex64::new(1.0, 0.0), f))
}

/// The set sum written through the shift m -> m - s: the summand at m - s
/// summed over A - Y <= m <= A + 2Y with m - s in (A, A+Y]. Equals
/// [`bilinear_set_sum`] for every 1 <= s <= Y.
pub fn shifted_set_sum(
    ctx: &PrimeContext,
    j: i64,
    alpha: &CoeffSeq,
    interval: &IntervalSpec,
    f: &PhaseFn,
    shift: i64,
) -> Result<Complex64> {
    let jr = check_j(ctx, j)?;
    interval.validate(ctx)?;
    check_set_support(ctx, alpha)?;
    let y = interval.len as i64;
    if shift < 1 || shift > y {
        return Err(Error::RangeError(format!("shift {shift} outside [1, {y}]")));
    }
    let (lo, hi) = (interval.start as f64 + 1.0, (interval.start + y) as f64);
    f.require_covers(lo, hi)?;
    let a = interval.start;
    let ms = (a - y..=a + 2 * y)
        .filter(|&m| interval.contains(m - shift))
        .map(|m| m - shift);
    let terms = root_terms(ctx, jr, ms);
    Ok(accumulate(ctx, alpha, &terms, |_| Complex64::new(1.0, 0.0), f))
}

/// Sum over |l| <= L and 1 <= m <= M of alpha_l beta_m e_r(l sqrt(jm)) e(l f(m)).
pub fn bilinear_interval_sum(
    ctx: &PrimeContext,
    j: i64,
    l_max: u64,
    m_max: u64,
    alpha: &CoeffSeq,
    beta: &CoeffSeq,
    f: &PhaseFn,
) -> Result<Complex64> {
    let jr = check_j(ctx, j)?;
    if m_max < 1 {
        return Err(Error::InvalidParams("M must be at least 1".into()));
    }
    let l_max = l_max as i64;
    if let (Some(lo), Some(hi)) = (alpha.min_index(), alpha.max_index()) {
        if lo < -l_max || hi > l_max {
            return Err(Error::InvalidParams(format!(
                "alpha support [{lo}, {hi}] exceeds |l| <= {l_max}"
            )));
        }
    }
    if let (Some(lo), Some(hi)) = (beta.min_index(), beta.max_index()) {
        if lo < 1 || hi > m_max as i64 {
            return Err(Error::InvalidParams(format!(
                "beta support [{lo}, {hi}] exceeds 1 <= m <= {m_max}"
            )));
        }
    }
    f.require_covers(1.0, m_max as f64)?;
    let terms = root_terms(ctx, jr, beta.support().iter().copied());
    Ok(accumulate(ctx, alpha, &terms, |m| beta.get(m), f))
}

/// G(a, b, r) = sum over n = 1..r-1 of e_r(a n^2 + b n).
pub fn gauss_sum(a: i64, b: i64, ctx: &PrimeContext) -> Complex64 {
    let r = ctx.modulus();
    let (a, b) = (ctx.reduce(a), ctx.reduce(b));
    sum_complex((1..r).map(|n| {
        let e = ctx.add(ctx.mul(a, ctx.mul(n, n)), ctx.mul(b, n));
        char_r(e, r)
    }))
}

/// Sum over n = 1..r-1 of (n/r) e_r(a n + b n^-1).
pub fn salie_sum(a: i64, b: i64, ctx: &PrimeContext) -> Complex64 {
    let r = ctx.modulus();
    let (a, b) = (ctx.reduce(a), ctx.reduce(b));
    sum_complex((1..r).map(|n| {
        let inv = ctx.inv(n).expect("n is a unit");
        let e = ctx.add(ctx.mul(a, n), ctx.mul(b, inv));
        char_r(e, r) * f64::from(ctx.legendre_reduced(n))
    }))
}

/// Sum of (u/r) over U/2 < u <= U. Requires 1 <= U < r.
pub fn char_window_sum(upper: u64, ctx: &PrimeContext) -> Result<i64> {
    ctx.check_window(upper)?;
    Ok((upper / 2 + 1..=upper)
        .map(|u| i64::from(ctx.legendre_reduced(u)))
        .sum())
}
