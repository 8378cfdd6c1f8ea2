//! Large sieve with square moduli: the double sum over fractions a/q², the
//! norm Z, and the Farey counter P(α) with scans over shifted centres.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::{sum_complex, sum_f64, unit_phase_ratio, CoeffSeq};
use crate::verify::{BoundReport, Target};

pub type Rational = Ratio<i128>;

/// Default cap on Q⁴ N.
pub const DEFAULT_SIEVE_BUDGET: u128 = 32u128.pow(4) << 14;

/// Grid points for the scan are snapped to multiples of 1 / (N 2^GRID_BITS).
pub const GRID_BITS: u32 = 24;

#[derive(Debug, Clone)]
pub struct SieveSpec {
    pub q: u64,
    pub m: i64,
    pub n: u64,
    pub a: CoeffSeq,
}

impl SieveSpec {
    pub fn new(q: u64, m: i64, n: u64, a: CoeffSeq) -> Result<Self> {
        if q < 1 || n < 1 {
            return Err(Error::InvalidParams(format!("need Q, N >= 1 (Q = {q}, N = {n})")));
        }
        if q > 1 << 20 {
            return Err(Error::InvalidParams(format!("Q = {q} too large")));
        }
        let hi = m + n as i64;
        if let Some(&bad) = a.support().iter().find(|&&i| i <= m || i > hi) {
            return Err(Error::InvalidParams(format!("index {bad} outside (M, M + N]")));
        }
        Ok(SieveSpec { q, m, n, a })
    }

    pub fn delta(&self) -> Rational {
        Rational::new(1, self.n as i128)
    }

    pub fn work(&self) -> u128 {
        (self.q as u128).pow(4) * self.n as u128
    }
}

pub fn z_norm(s: &SieveSpec) -> f64 {
    sum_f64(s.a.weights().iter().map(|w| w.norm_sqr()))
}

/// Σ_{q ≤ Q} Σ_{1 ≤ a ≤ q², (a, q) = 1} |Σ_n a_n e(n a / q²)|².
pub fn sieve_lhs(s: &SieveSpec, budget: u128) -> Result<f64> {
    let needed = s.work();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let per_q: Vec<f64> = (1..=s.q)
        .into_par_iter()
        .map(|q| modulus_contribution(s, q))
        .collect();
    Ok(sum_f64(per_q))
}

fn modulus_contribution(s: &SieveSpec, q: u64) -> f64 {
    let q2 = q * q;
    // Terms sharing n mod q² share every phase for this modulus.
    let terms: Vec<(u64, Complex64)> = if (s.a.len() as u64) > q2 {
        let mut buckets: Vec<Vec<Complex64>> = vec![Vec::new(); q2 as usize];
        for (n, w) in s.a.iter() {
            buckets[n.rem_euclid(q2 as i64) as usize].push(w);
        }
        buckets
            .into_iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(t, b)| (t as u64, sum_complex(b)))
            .collect()
    } else {
        s.a.iter().map(|(n, w)| (n.rem_euclid(q2 as i64) as u64, w)).collect()
    };
    sum_f64((1..=q2).filter(|a| a.gcd(&q) == 1).map(|a| {
        sum_complex(
            terms
                .iter()
                .map(|&(t, w)| w * unit_phase_ratio(t as i128 * a as i128, q2)),
        )
        .norm_sqr()
    }))
}

/// The sieve inequality with implied constant one:
/// (QN)^ε (Q³ + N + min(Q² √N, √Q N)) Z.
pub fn sieve_rhs(s: &SieveSpec, eps: f64) -> f64 {
    let (q, n) = (s.q as f64, s.n as f64);
    (q * n).powf(eps) * (q.powi(3) + n + (q * q * n.sqrt()).min(q.sqrt() * n)) * z_norm(s)
}

pub fn check_sieve(s: &SieveSpec, eps: f64, budget: u128) -> Result<BoundReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParams("eps must be positive".into()));
    }
    let lhs = sieve_lhs(s, budget)?;
    Ok(BoundReport::new(Target::Sieve, lhs, sieve_rhs(s, eps))
        .param("Q", s.q)
        .param("M", s.m)
        .param("N", s.n)
        .param("eps", eps)
        .param("Z", z_norm(s)))
}

fn prime_factors(mut q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            out.push(p);
            while q % p == 0 {
                q /= p;
            }
        }
        p += 1;
    }
    if q > 1 {
        out.push(q);
    }
    out
}

/// Integers in [lo, hi] coprime to q, by inclusion-exclusion over the prime
/// divisors of q.
fn coprime_in_range(lo: i128, hi: i128, q: u64) -> u64 {
    if hi < lo {
        return 0;
    }
    let primes = prime_factors(q);
    let mut total: i128 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let d: i128 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p as i128)
            .product();
        let multiples = Integer::div_floor(&hi, &d) - Integer::div_floor(&(lo - 1), &d);
        if mask.count_ones() % 2 == 0 {
            total += multiples;
        } else {
            total -= multiples;
        }
    }
    total as u64
}

/// P(α) = #{(q, a) ∈ ℤ²: 1 ≤ q ≤ Q, gcd(q, a) = 1, |a/q² − α| ≤ Δ}.
pub fn farey_count_p(alpha: Rational, q_max: u64, delta: Rational) -> Result<u64> {
    if delta <= Rational::from_integer(0) {
        return Err(Error::InvalidParams("Δ must be positive".into()));
    }
    let mut total = 0u64;
    for q in 1..=q_max {
        let q2 = Rational::from_integer((q as i128) * (q as i128));
        let lo = ((alpha - delta) * q2).ceil().to_integer();
        let hi = ((alpha + delta) * q2).floor().to_integer();
        total += coprime_in_range(lo, hi, q);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub grid: Vec<(Rational, u64)>,
    pub max: u64,
    pub argmax: Rational,
    pub target: f64,
    pub range_ok: bool,
}

/// Geometric grid of `size` points on [Δ, √Δ / r], endpoints included,
/// snapped down to multiples of 1 / (N 2^24).
pub fn scan_grid(n: u64, r: u64, size: usize) -> Result<Vec<Rational>> {
    if size == 0 || n == 0 || r == 0 {
        return Err(Error::InvalidParams("grid needs size, N, r >= 1".into()));
    }
    let delta = 1.0 / n as f64;
    let top = delta.sqrt() / r as f64;
    if top < delta {
        return Err(Error::InvalidParams(format!(
            "empty z range: √Δ/r < Δ (r = {r}, N = {n})"
        )));
    }
    let denom = (n as i128) << GRID_BITS;
    let step = Rational::new(1, denom);
    let mut grid = Vec::with_capacity(size);
    for i in 0..size {
        let z = if i == 0 {
            Rational::new(1, n as i128)
        } else {
            let t = i as f64 / (size - 1) as f64;
            let zf = delta * (top / delta).powf(t);
            let k = (zf * denom as f64).floor() as i128;
            (step * k).max(Rational::new(1, n as i128))
        };
        grid.push(z);
    }
    Ok(grid)
}

/// P(b/r + z) over the scan grid, with Δ = 1/N.
pub fn scan_p_over_ranges(q: u64, n: u64, r: u64, b: i64, grid_size: usize) -> Result<ScanReport> {
    if r < 1 || (b as i128).gcd(&(r as i128)) != 1 {
        return Err(Error::InvalidParams(format!("need gcd(b, r) = 1 (b = {b}, r = {r})")));
    }
    let centre = Rational::new(b as i128, r as i128);
    let delta = Rational::new(1, n as i128);
    let grid = scan_grid(n, r, grid_size)?
        .into_iter()
        .map(|z| Ok((z, farey_count_p(centre + z, q, delta)?)))
        .collect::<Result<Vec<_>>>()?;
    let (argmax, max) = grid
        .iter()
        .fold((grid[0].0, grid[0].1), |best, &(z, c)| if c > best.1 { (z, c) } else { best });
    Ok(ScanReport {
        max,
        argmax,
        target: (q as f64).sqrt(),
        range_ok: (r as f64) <= (q as f64).powf(1.5),
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn lhs_examples() {
        let s = SieveSpec::new(2, 0, 1, CoeffSeq::ones(&[1]).unwrap()).unwrap();
        assert!((sieve_lhs(&s, DEFAULT_SIEVE_BUDGET).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(z_norm(&s), 1.0);
        let zero = SieveSpec::new(5, 0, 3, CoeffSeq::ones(&[1, 2, 3]).unwrap().zeroed()).unwrap();
        assert_eq!(sieve_lhs(&zero, DEFAULT_SIEVE_BUDGET).unwrap(), 0.0);
        let a = CoeffSeq::new([(4, Complex64::new(1.0, 2.0)), (6, Complex64::new(-0.5, 0.0))]).unwrap();
        let one = SieveSpec::new(1, 3, 3, a).unwrap();
        assert!((sieve_lhs(&one, DEFAULT_SIEVE_BUDGET).unwrap() - 4.25).abs() < 1e-12);
    }

    #[test]
    fn lhs_budget() {
        let s = SieveSpec::new(40, 0, 1 << 14, CoeffSeq::ones(&[1]).unwrap()).unwrap();
        assert!(matches!(
            sieve_lhs(&s, DEFAULT_SIEVE_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bucketed_and_direct_paths_agree() {
        let pairs: Vec<_> = (1..=40)
            .map(|n| (n, Complex64::from_polar(1.0, n as f64 * 0.7)))
            .collect();
        let s = SieveSpec::new(5, 0, 40, CoeffSeq::new(pairs).unwrap()).unwrap();
        let got = sieve_lhs(&s, DEFAULT_SIEVE_BUDGET).unwrap();
        let mut want = 0.0;
        for q in 1..=5u64 {
            for a in 1..=q * q {
                if a.gcd(&q) == 1 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (n, w) in s.a.iter() {
                        acc += w * Complex64::from_polar(
                            1.0,
                            std::f64::consts::TAU * (n as f64) * a as f64 / (q * q) as f64,
                        );
                    }
                    want += acc.norm_sqr();
                }
            }
        }
        assert!((got - want).abs() < 1e-9 * want);
    }

    #[test]
    fn farey_examples() {
        assert_eq!(farey_count_p(rat(0, 1), 2, rat(1, 10)).unwrap(), 1);
        assert_eq!(farey_count_p(rat(0, 1), 1, rat(1, 1)).unwrap(), 3);
        assert_eq!(farey_count_p(rat(1, 4), 2, rat(1, 100)).unwrap(), 1);
        assert!(farey_count_p(rat(0, 1), 2, rat(0, 1)).is_err());
    }

    #[test]
    fn farey_boundaries_are_closed() {
        // a/q² = 1/4 sits exactly at α + Δ.
        assert_eq!(farey_count_p(rat(1, 8), 2, rat(1, 8)).unwrap(), 2);
    }

    #[test]
    fn scan_single_point_and_errors() {
        let rep = scan_p_over_ranges(4, 4096, 1, 1, 1).unwrap();
        assert_eq!(rep.grid.len(), 1);
        assert_eq!(rep.grid[0].0, rat(1, 4096));
        assert_eq!(rep.max, farey_count_p(rat(4097, 4096), 4, rat(1, 4096)).unwrap());
        assert!(scan_p_over_ranges(4, 4096, 6, 3, 4).is_err());
        assert!(scan_p_over_ranges(4, 16, 5, 1, 4).is_err());
    }

    #[test]
    fn scan_grid_is_increasing_and_bounded() {
        let g = scan_grid(4096, 3, 9).unwrap();
        assert_eq!(g[0], rat(1, 4096));
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
        let top = rat(1, 64 * 3);
        assert!(*g.last().unwrap() <= top);
        assert!(top - *g.last().unwrap() < rat(1, 4096 << 20));
    }
}
