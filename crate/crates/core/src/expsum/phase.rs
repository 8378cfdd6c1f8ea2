use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::PrimeContext;

/// e(x) = exp(2 pi i x).
#[inline]
pub fn unit_phase(x: f64) -> Complex64 {
    let t = x - x.round();
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// e(k / r), with `k` reduced to the nearest representative before scaling.
#[inline]
pub fn unit_phase_ratio(k: i128, r: u64) -> Complex64 {
    let r_wide = r as i128;
    let mut k = k.rem_euclid(r_wide);
    if 2 * k > r_wide {
        k -= r_wide;
    }
    let (s, c) = (TAU * (k as f64 / r as f64)).sin_cos();
    Complex64::new(c, s)
}

/// e_r(k) for an already reduced residue `k` in [0, r).
#[inline]
pub fn char_r(k: u64, r: u64) -> Complex64 {
    unit_phase_ratio(k as i128, r)
}

/// The interval (A, A + Y] of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalSpec {
    pub start: i64,
    pub len: u64,
}

impl IntervalSpec {
    pub fn new(start: i64, len: u64) -> Self {
        IntervalSpec { start, len }
    }

    /// Checks 1 <= Y < r.
    pub fn validate(&self, ctx: &PrimeContext) -> Result<()> {
        if self.len == 0 || self.len >= ctx.modulus() {
            return Err(Error::EmptyInterval {
                y: self.len,
                r: ctx.modulus(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, m: i64) -> bool {
        m > self.start && m <= self.start + self.len as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.start + 1..=self.start + self.len as i64
    }

    /// The extended range [A - 2Y, A + 2Y] on which phase functions live.
    pub fn phase_domain(&self) -> (f64, f64) {
        let y = self.len as f64;
        (self.start as f64 - 2.0 * y, self.start as f64 + 2.0 * y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseFamily {
    Zero,
    /// f(y) = theta * y
    Linear { theta: f64 },
    /// f(y) = c * y^kappa with 0 < kappa < 1
    Power { c: f64, kappa: f64 },
}

/// A closed-form phase f on a real interval with exact sup |f'|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFn {
    family: PhaseFamily,
    lo: f64,
    hi: f64,
    derivative_bound: f64,
}

impl PhaseFn {
    /// The zero phase on the whole line.
    pub fn zero() -> Self {
        PhaseFn {
            family: PhaseFamily::Zero,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            derivative_bound: 0.0,
        }
    }

    pub fn new(family: PhaseFamily, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidParams(format!("empty phase domain [{lo}, {hi}]")));
        }
        let derivative_bound = match family {
            PhaseFamily::Zero => 0.0,
            PhaseFamily::Linear { theta } => {
                if !theta.is_finite() {
                    return Err(Error::InvalidParams("non-finite slope".into()));
                }
                theta.abs()
            }
            PhaseFamily::Power { c, kappa } => {
                if !(kappa > 0.0 && kappa < 1.0) || !c.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "power phase needs 0 < kappa < 1 and finite c (kappa = {kappa})"
                    )));
                }
                if lo < 1.0 {
                    return Err(Error::InvalidParams(format!(
                        "power phase needs domain start >= 1, got {lo}"
                    )));
                }
                // |f'| = |c| kappa y^(kappa - 1) is decreasing in y.
                c.abs() * kappa * lo.powf(kappa - 1.0)
            }
        };
        Ok(PhaseFn {
            family,
            lo,
            hi,
            derivative_bound,
        })
    }

    /// Phase on [A - 2Y, A + 2Y] for the interval (A, A + Y].
    pub fn on_interval(family: PhaseFamily, interval: &IntervalSpec) -> Result<Self> {
        let (lo, hi) = interval.phase_domain();
        Self::new(family, lo, hi)
    }

    pub fn family(&self) -> PhaseFamily {
        self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.family, PhaseFamily::Zero)
    }

    /// F = sup |f'| over the domain.
    pub fn derivative_bound(&self) -> f64 {
        self.derivative_bound
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.is_zero() || (self.lo <= lo && hi <= self.hi)
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self.family {
            PhaseFamily::Zero => 0.0,
            PhaseFamily::Linear { theta } => theta * y,
            PhaseFamily::Power { c, kappa } => c * y.powf(kappa),
        }
    }

    pub(crate) fn require_covers(&self, lo: f64, hi: f64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "phase domain [{}, {}] does not cover [{lo}, {hi}]",
                self.lo, self.hi
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn unit_phase_special_values() {
        assert!(close(unit_phase(0.0), Complex64::new(1.0, 0.0)));
        assert!(close(unit_phase(0.25), Complex64::new(0.0, 1.0)));
        let h = 0.5f64.sqrt();
        assert!(close(unit_phase(0.125), Complex64::new(h, h)));
        assert!(close(unit_phase(-3.75), Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn ratio_phase_reduces_huge_numerators() {
        let r = 1_000_003u64;
        let k = 7i128 + (r as i128) * 1_000_000_000_000_000;
        assert!(close(unit_phase_ratio(k, r), unit_phase_ratio(7, r)));
        assert!(close(unit_phase_ratio(-1, 4), Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn derivative_bounds_are_closed_form() {
        let i = IntervalSpec::new(100, 10);
        let lin = PhaseFn::on_interval(PhaseFamily::Linear { theta: -0.25 }, &i).unwrap();
        assert_eq!(lin.derivative_bound(), 0.25);
        let pw = PhaseFn::on_interval(PhaseFamily::Power { c: 2.0, kappa: 0.5 }, &i).unwrap();
        assert_eq!(pw.domain(), (80.0, 120.0));
        assert!((pw.derivative_bound() - 1.0 / 80f64.sqrt()).abs() < 1e-15);
        assert_eq!(PhaseFn::zero().derivative_bound(), 0.0);
    }

    #[test]
    fn power_family_needs_positive_domain() {
        let i = IntervalSpec::new(0, 10);
        assert!(PhaseFn::on_interval(PhaseFamily::Power { c: 1.0, kappa: 0.5 }, &i).is_err());
        let i = IntervalSpec::new(30, 10);
        assert!(PhaseFn::on_interval(PhaseFamily::Power { c: 1.0, kappa: 1.5 }, &i).is_err());
    }
}
