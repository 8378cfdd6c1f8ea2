//! Exact combinatorial counts: the weighted incidence table nu and its
//! moments, the quadruple congruence count, additive collision counts of
//! square roots, solution counts of the root congruence behind the
//! 2n-th moment, and the even-multiplicity tuple count W.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::{check_j, sum_f64, unit_phase, CoeffSeq, CompensatedSum};
use crate::field::{PrimeContext, Roots};

/// Largest modulus for which the nu table is stored densely.
pub const DENSE_NU_LIMIT: u64 = 4096;

/// Default cap on elementary enumeration steps.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone)]
enum Cells {
    Dense(Vec<f64>),
    Sparse(BTreeMap<(u64, u64), f64>),
}

/// Inputs a [`NuTable`] was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct NuProvenance {
    pub j: i64,
    pub support: Vec<i64>,
    pub window: Vec<u64>,
    pub start: i64,
    pub len: u64,
}

/// nu(lambda, mu): the total |alpha_l| over triples (l, u, m) with
/// l in X, u in the window, A - Y <= m <= A + 2Y, landing on
/// (S(u) l, u^-1 m) mod r.
#[derive(Debug, Clone)]
pub struct NuTable {
    r: u64,
    cells: Cells,
    provenance: NuProvenance,
}

impl NuTable {
    pub fn modulus(&self) -> u64 {
        self.r
    }

    pub fn provenance(&self) -> &NuProvenance {
        &self.provenance
    }

    pub fn get(&self, lambda: u64, mu: u64) -> f64 {
        match &self.cells {
            Cells::Dense(v) => v[(lambda * self.r + mu) as usize],
            Cells::Sparse(m) => m.get(&(lambda, mu)).copied().unwrap_or(0.0),
        }
    }

    /// Nonzero cells in (lambda, mu) lexicographic order.
    pub fn nonzero(&self) -> Vec<((u64, u64), f64)> {
        match &self.cells {
            Cells::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(i, &x)| ((i as u64 / self.r, i as u64 % self.r), x))
                .collect(),
            Cells::Sparse(m) => m.iter().filter(|(_, &x)| x != 0.0).map(|(&k, &x)| (k, x)).collect(),
        }
    }

    fn bump(&mut self, lambda: u64, mu: u64, w: f64) {
        match &mut self.cells {
            Cells::Dense(v) => v[(lambda * self.r + mu) as usize] += w,
            Cells::Sparse(m) => *m.entry((lambda, mu)).or_insert(0.0) += w,
        }
    }
}

fn validate_window(ctx: &PrimeContext, window: &[u64]) -> Result<Vec<(u64, u64)>> {
    window
        .iter()
        .map(|&u| {
            let ur = u % ctx.modulus();
            if ctx.legendre_reduced(ur) != 1 {
                return Err(Error::NotAResidue(u as i64));
            }
            let root = ctx.fixed_root(ctx.residue(ur as i64))?.value();
            Ok((root, ctx.inv(ur).expect("nonzero")))
        })
        .collect()
}

pub fn build_nu(
    ctx: &PrimeContext,
    j: i64,
    alpha: &CoeffSeq,
    window: &[u64],
    start: i64,
    len: u64,
) -> Result<NuTable> {
    check_j(ctx, j)?;
    if len < 1 || len >= ctx.modulus() {
        return Err(Error::EmptyInterval { y: len, r: ctx.modulus() });
    }
    let roots_inv = validate_window(ctx, window)?;
    let r = ctx.modulus();
    let cells = if r <= DENSE_NU_LIMIT {
        Cells::Dense(vec![0.0; (r * r) as usize])
    } else {
        Cells::Sparse(BTreeMap::new())
    };
    let mut table = NuTable {
        r,
        cells,
        provenance: NuProvenance {
            j,
            support: alpha.support().to_vec(),
            window: window.to_vec(),
            start,
            len,
        },
    };
    let y = len as i64;
    let m_lo = start - y;
    let span = 3 * len + 1;
    for (l, a) in alpha.iter() {
        let w = a.norm();
        let lr = ctx.reduce(l);
        for &(root, uinv) in &roots_inv {
            let lambda = ctx.mul(root, lr);
            let mut mu = ctx.mul(uinv, ctx.reduce(m_lo));
            for _ in 0..span {
                table.bump(lambda, mu, w);
                mu = ctx.add(mu, uinv);
            }
        }
    }
    Ok(table)
}

/// (sum of nu, sum of nu^2) over F_r^2.
pub fn nu_moments(table: &NuTable) -> (f64, f64) {
    let mut m1 = CompensatedSum::new();
    let mut m2 = CompensatedSum::new();
    match &table.cells {
        Cells::Dense(v) => {
            for &x in v {
                if x != 0.0 {
                    m1.add(x);
                    m2.add(x * x);
                }
            }
        }
        Cells::Sparse(m) => {
            for &x in m.values() {
                m1.add(x);
                m2.add(x * x);
            }
        }
    }
    (m1.value(), m2.value())
}

fn check_nonzero_elements(ctx: &PrimeContext, xs: &[i64], us: &[u64]) -> Result<()> {
    if xs.is_empty() || us.is_empty() {
        return Err(Error::InvalidParams("sets must be nonempty".into()));
    }
    if xs.iter().any(|&l| ctx.reduce(l) == 0) || us.iter().any(|&u| u % ctx.modulus() == 0) {
        return Err(Error::InvalidParams("set elements must be nonzero mod r".into()));
    }
    Ok(())
}

/// #{(l1, u1, l2, u2) : u1 l1^2 = u2 l2^2 mod r}.
pub fn quad_congruence_count(ctx: &PrimeContext, xs: &[i64], us: &[u64]) -> Result<u64> {
    check_nonzero_elements(ctx, xs, us)?;
    let mut buckets: HashMap<u64, u64> = HashMap::new();
    for &l in xs {
        let l = ctx.reduce(l);
        let sq = ctx.mul(l, l);
        for &u in us {
            *buckets.entry(ctx.mul(u % ctx.modulus(), sq)).or_insert(0) += 1;
        }
    }
    Ok(buckets.values().map(|&c| c * c).sum())
}

/// Root-difference histogram for 1 <= m1, m2 <= M, |m1 - m2| <= H:
/// `a(d)` counts (m1, m2, k1, k2) with k_i^2 = j m_i and k1 - k2 = d mod r.
#[derive(Debug, Clone)]
pub struct CollisionTable {
    r: u64,
    hist: Vec<u64>,
}

impl CollisionTable {
    pub fn build(ctx: &PrimeContext, j: i64, m_max: u64, h: u64) -> Result<Self> {
        let jr = check_j(ctx, j)?;
        let r = ctx.modulus();
        if !(1 <= h && h <= m_max && m_max <= r / 2) {
            return Err(Error::RangeError(format!(
                "need 1 <= H <= M <= r/2 (H = {h}, M = {m_max}, r = {r})"
            )));
        }
        let roots: Vec<Roots> = (0..=m_max)
            .map(|m| ctx.sqrts_reduced(ctx.mul(jr, m)))
            .collect();
        let hist = (1..=m_max)
            .into_par_iter()
            .fold(
                || vec![0u64; r as usize],
                |mut acc, m1| {
                    let lo = m1.saturating_sub(h).max(1);
                    let hi = (m1 + h).min(m_max);
                    for k1 in roots[m1 as usize].iter() {
                        for m2 in lo..=hi {
                            for k2 in roots[m2 as usize].iter() {
                                acc[ctx.sub(k1, k2) as usize] += 1;
                            }
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; r as usize],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Ok(CollisionTable { r, hist })
    }

    pub fn a(&self, d: i64) -> u64 {
        self.hist[(d as i128).rem_euclid(self.r as i128) as usize]
    }

    /// Root pairs without the difference constraint.
    pub fn total(&self) -> u64 {
        self.hist.iter().sum()
    }

    /// Sum of A(d) over the integers |d| <= D; residues repeat when D >= r.
    pub fn sum_within(&self, d_max: u64) -> u64 {
        let r = self.r as i128;
        let d = d_max as i128;
        self.hist
            .iter()
            .enumerate()
            .map(|(c, &count)| {
                let c = c as i128;
                let reps = (d - c).div_euclid(r) - (-d - 1 - c).div_euclid(r);
                count * reps as u64
            })
            .sum()
    }
}

pub fn collision_count_a(ctx: &PrimeContext, j: i64, m_max: u64, h: u64, d: i64) -> Result<u64> {
    Ok(CollisionTable::build(ctx, j, m_max, h)?.a(d))
}

/// D = floor(2 r^(1+eps) / L).
pub fn collision_window(r: u64, l: u64, eps: f64) -> Result<u64> {
    if l == 0 || !(eps > 0.0) {
        return Err(Error::InvalidParams("need L >= 1 and eps > 0".into()));
    }
    Ok((2.0 * (r as f64).powf(1.0 + eps) / l as f64).floor() as u64)
}

/// Result of the root-congruence enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCount {
    /// Number of (v, k, mu) solving the congruence.
    pub raw_count: u64,
    /// Each solution weighted by e(xi (v_1 + .. + v_n - v_{n+1} - .. - v_2n)).
    pub phase_weighted: Complex64,
}

/// Counts tuples (v_1..v_2n) over `vs`, mu in F_r and roots k_i of
/// j (mu - v_i) with k_1 + .. + k_n = k_{n+1} + .. + k_2n mod r.
///
/// For fixed mu the count is sum_s H(s)^2, where H is the n-fold additive
/// convolution of the root-incidence function of mu; the weighted count
/// uses the phase-carrying analogue.
pub fn prop3_solution_count(
    ctx: &PrimeContext,
    j: i64,
    n: u32,
    vs: &[i64],
    xi: f64,
    budget: u128,
) -> Result<SolutionCount> {
    let jr = check_j(ctx, j)?;
    if n < 1 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let mut sorted = vs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != vs.len() {
        return Err(Error::InvalidParams("V set has repeated elements".into()));
    }
    let r = ctx.modulus();
    let needed = (vs.len() as u128)
        .checked_pow(2 * n)
        .and_then(|x| x.checked_mul(r as u128))
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let phases: Vec<Complex64> = vs.iter().map(|&v| unit_phase(xi * v as f64)).collect();
    let per_mu: Vec<(u64, f64)> = (0..r)
        .into_par_iter()
        .map(|mu| {
            // Sparse incidence: root k, multiplicity, phase weight.
            let mut support: Vec<(u64, u64, Complex64)> = Vec::new();
            for (&v, &ph) in vs.iter().zip(&phases) {
                let s = ctx.mul(jr, ctx.sub(mu, ctx.reduce(v)));
                for k in ctx.sqrts_reduced(s).iter() {
                    match support.iter_mut().find(|e| e.0 == k) {
                        Some(e) => {
                            e.1 += 1;
                            e.2 += ph;
                        }
                        None => support.push((k, 1, ph)),
                    }
                }
            }
            convolve_power(r, &support, n)
        })
        .collect();
    let raw_count = per_mu.iter().map(|p| p.0).sum();
    let weighted = sum_f64(per_mu.iter().map(|p| p.1));
    Ok(SolutionCount {
        raw_count,
        phase_weighted: Complex64::new(weighted, 0.0),
    })
}

// (sum H(s)^2, sum |G(s)|^2) for the n-fold convolutions H, G of `support`.
fn convolve_power(r: u64, support: &[(u64, u64, Complex64)], n: u32) -> (u64, f64) {
    if support.is_empty() {
        return (0, 0.0);
    }
    let r = r as usize;
    let mut h = vec![0u64; r];
    let mut g = vec![Complex64::new(0.0, 0.0); r];
    for &(k, c, ph) in support {
        h[k as usize] = c;
        g[k as usize] = ph;
    }
    for _ in 1..n {
        let mut h2 = vec![0u64; r];
        let mut g2 = vec![Complex64::new(0.0, 0.0); r];
        for s in 0..r {
            if h[s] == 0 {
                continue;
            }
            for &(k, c, ph) in support {
                let t = (s + k as usize) % r;
                h2[t] += h[s] * c;
                g2[t] += g[s] * ph;
            }
        }
        h = h2;
        g = g2;
    }
    let raw = h.iter().map(|&x| x * x).sum();
    let weighted = sum_f64(g.iter().map(|z| z.norm_sqr()));
    (raw, weighted)
}

pub const W_MAX_N: u32 = 6;
pub const W_MAX_K: u64 = 12;
const W_BRUTE_LIMIT: u128 = 100_000_000;

/// Number of 2n-tuples over a k-element set in which every value occurs
/// an even number of times.
///
/// Sums over partitions c_1 <= .. <= c_w of n the multinomial
/// (2n)! / prod (2 c_i)! times k (k-1) .. (k-w+1), divided by the
/// factorials of the multiplicities of equal parts so that each set of
/// values is assigned once.
pub fn even_multiplicity_count_w(n: u32, k: u64) -> Result<u64> {
    if !(1..=W_MAX_N).contains(&n) || k > W_MAX_K {
        return Err(Error::RangeError(format!(
            "W needs 1 <= n <= {W_MAX_N} and k <= {W_MAX_K} (n = {n}, k = {k})"
        )));
    }
    let mut total: u128 = 0;
    for parts in partitions(n) {
        let w = parts.len() as u64;
        if w > k {
            continue;
        }
        let mut term = factorial(2 * n as u64);
        for &c in &parts {
            term /= factorial(2 * c as u64);
        }
        term *= (0..w).map(|i| (k - i) as u128).product::<u128>();
        let mut i = 0;
        while i < parts.len() {
            let run = parts[i..].iter().take_while(|&&c| c == parts[i]).count();
            term /= factorial(run as u64);
            i += run;
        }
        total += term;
    }
    Ok(total as u64)
}

/// Brute-force enumeration of W, gated at 2n k^(2n) <= 10^8 steps.
pub fn even_multiplicity_count_w_brute(n: u32, k: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::RangeError("n must be at least 1".into()));
    }
    let len = 2 * n as usize;
    let needed = (k as u128)
        .checked_pow(2 * n)
        .map(|x| x * len as u128)
        .unwrap_or(u128::MAX);
    if needed > W_BRUTE_LIMIT {
        return Err(Error::BudgetExceeded {
            needed,
            budget: W_BRUTE_LIMIT,
        });
    }
    if k == 0 {
        return Ok(0);
    }
    let mut digits = vec![0u64; len];
    let mut counts = vec![0u32; k as usize];
    let mut hits = 0;
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        for &d in &digits {
            counts[d as usize] += 1;
        }
        if counts.iter().all(|c| c % 2 == 0) {
            hits += 1;
        }
        let mut i = 0;
        loop {
            if i == len {
                return Ok(hits);
            }
            digits[i] += 1;
            if digits[i] < k {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Partitions of n into nondecreasing positive parts.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=rest {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(r: u64) -> PrimeContext {
        PrimeContext::new(r).unwrap()
    }

    #[test]
    fn nu_small_example() {
        let c = ctx(7);
        let alpha = CoeffSeq::ones(&[1]).unwrap();
        let t = build_nu(&c, 1, &alpha, &[4], 0, 1).unwrap();
        let expected = [((2, 0), 1.0), ((2, 2), 1.0), ((2, 4), 1.0), ((2, 5), 1.0)];
        assert_eq!(t.nonzero(), expected.to_vec());
        assert_eq!(nu_moments(&t), (4.0, 4.0));
    }

    #[test]
    fn nu_empty_and_counting_identity() {
        let c = ctx(7);
        let t = build_nu(&c, 1, &CoeffSeq::zero(), &[4], 0, 1).unwrap();
        assert!(t.nonzero().is_empty());
        assert_eq!(nu_moments(&t), (0.0, 0.0));
        let alpha = CoeffSeq::ones(&[1, 2]).unwrap();
        let t = build_nu(&c, 1, &alpha, &[1], 0, 1).unwrap();
        assert_eq!(nu_moments(&t).0, 8.0);
    }

    #[test]
    fn nu_rejects_non_residues() {
        let c = ctx(7);
        let alpha = CoeffSeq::ones(&[1]).unwrap();
        assert_eq!(build_nu(&c, 1, &alpha, &[3], 0, 1).unwrap_err(), Error::NotAResidue(3));
        assert_eq!(build_nu(&c, 1, &alpha, &[7], 0, 1).unwrap_err(), Error::NotAResidue(7));
    }

    #[test]
    fn quad_count_examples() {
        let c = ctx(7);
        assert_eq!(quad_congruence_count(&c, &[1], &[1]).unwrap(), 1);
        assert_eq!(quad_congruence_count(&c, &[1, 2], &[1, 2, 4]).unwrap(), 12);
        assert!(quad_congruence_count(&c, &[], &[1]).is_err());
        assert!(quad_congruence_count(&c, &[7], &[1]).is_err());
    }

    #[test]
    fn collision_examples() {
        let c = ctx(7);
        assert_eq!(collision_count_a(&c, 1, 3, 3, 0).unwrap(), 4);
        let t = CollisionTable::build(&c, 1, 3, 3).unwrap();
        for d in -10..10 {
            assert_eq!(t.a(d), t.a(-d));
        }
        for d in -3..3 {
            assert_eq!(collision_count_a(&c, 3, 1, 1, d).unwrap(), 0);
        }
        assert!(CollisionTable::build(&c, 1, 4, 3).is_err());
        assert!(CollisionTable::build(&c, 1, 3, 0).is_err());
    }

    #[test]
    fn collision_window_sum_wraps() {
        let c = ctx(7);
        let t = CollisionTable::build(&c, 1, 3, 2).unwrap();
        let direct = |d: i64| -> u64 { (-d..=d).map(|x| t.a(x)).sum() };
        for d in 0..30 {
            assert_eq!(t.sum_within(d as u64), direct(d));
        }
        assert_eq!(collision_window(101, 2, 0.05).unwrap(), 127);
    }

    #[test]
    fn prop3_pinned_case() {
        let c = ctx(7);
        let s = prop3_solution_count(&c, 1, 1, &[1, 2], 0.0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.raw_count, 14);
        assert!((s.phase_weighted.re - 14.0).abs() < 1e-12);
        let s = prop3_solution_count(&c, 1, 1, &[3], 0.0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.raw_count, 7);
    }

    #[test]
    fn prop3_budget_is_enforced() {
        let c = ctx(101);
        let vs: Vec<i64> = (1..=10).collect();
        let err = prop3_solution_count(&c, 1, 3, &vs, 0.0, 1_000_000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn w_examples() {
        assert_eq!(even_multiplicity_count_w(1, 2).unwrap(), 2);
        assert_eq!(even_multiplicity_count_w(2, 2).unwrap(), 8);
        for n in 1..=6 {
            assert_eq!(even_multiplicity_count_w(n, 1).unwrap(), 1);
        }
        assert!(even_multiplicity_count_w(7, 2).is_err());
        assert!(even_multiplicity_count_w(2, 13).is_err());
        assert_eq!(even_multiplicity_count_w_brute(2, 2).unwrap(), 8);
        assert!(even_multiplicity_count_w_brute(6, 12).is_err());
    }
}
