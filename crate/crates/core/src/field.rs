//! Arithmetic over the prime field F_r: reduction, inverses, Legendre
//! symbols, modular square roots and windows of quadratic residues.

use crate::error::{Error, Result};

/// Largest modulus for which a dense quadratic-residue table is built.
pub const DENSE_QR_LIMIT: u64 = 1 << 22;

/// Exclusive upper bound on accepted moduli.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Below this modulus square roots are found by scanning.
const SCAN_ROOT_LIMIT: u64 = 64;

// Deterministic for every n < 3.3 * 10^24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// An element of F_r, stored as its least nonnegative representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue(u64);

impl Residue {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The roots of one element: zero, one or two residues, ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roots {
    buf: [u64; 2],
    len: u8,
}

impl Roots {
    const NONE: Roots = Roots { buf: [0, 0], len: 0 };

    fn one(k: u64) -> Self {
        Roots { buf: [k, 0], len: 1 }
    }

    fn pair(a: u64, b: u64) -> Self {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Roots { buf: [lo, hi], len: 2 }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.buf[..self.len as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.as_slice().iter().copied()
    }
}

/// A validated odd prime modulus. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    r: u64,
    qr_table: Option<Vec<bool>>,
    // r - 1 = odd_part * 2^two_adicity; `non_residue` is the least non-residue.
    odd_part: u64,
    two_adicity: u32,
    non_residue: u64,
}

impl PrimeContext {
    pub fn new(r: u64) -> Result<Self> {
        if !(3..MAX_MODULUS).contains(&r) || !is_prime(r) {
            return Err(Error::BadModulus(r));
        }
        let two_adicity = (r - 1).trailing_zeros();
        let odd_part = (r - 1) >> two_adicity;
        let half = (r - 1) / 2;
        let non_residue = (2..r)
            .find(|&z| pow_mod(z, half, r) == r - 1)
            .expect("every odd prime has a non-residue");
        let qr_table = (r <= DENSE_QR_LIMIT).then(|| {
            let mut t = vec![false; r as usize];
            for k in 0..=half {
                t[mul_mod(k, k, r) as usize] = true;
            }
            t
        });
        Ok(PrimeContext {
            r,
            qr_table,
            odd_part,
            two_adicity,
            non_residue,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.r
    }

    pub fn qr_table(&self) -> Option<&[bool]> {
        self.qr_table.as_deref()
    }

    /// Least nonnegative representative of `a` mod r.
    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        (a as i128).rem_euclid(self.r as i128) as u64
    }

    #[inline]
    pub fn reduce_wide(&self, a: i128) -> u64 {
        a.rem_euclid(self.r as i128) as u64
    }

    pub fn residue(&self, a: i64) -> Residue {
        Residue(self.reduce(a))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.r)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.r {
            s - self.r
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.r - b
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.r)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.r;
        (a != 0).then(|| pow_mod(a, self.r - 2, self.r))
    }

    /// Legendre symbol (a/r) in {-1, 0, 1}.
    pub fn legendre(&self, a: i64) -> i8 {
        self.legendre_reduced(self.reduce(a))
    }

    pub fn legendre_reduced(&self, s: u64) -> i8 {
        if s == 0 {
            return 0;
        }
        match &self.qr_table {
            Some(t) => {
                if t[s as usize] {
                    1
                } else {
                    -1
                }
            }
            None => euler_criterion(s, self.r),
        }
    }

    /// Every k in [0, r) with k^2 = s (mod r).
    pub fn all_sqrts(&self, s: i64) -> Roots {
        self.sqrts_reduced(self.reduce(s))
    }

    pub fn sqrts_reduced(&self, s: u64) -> Roots {
        if s == 0 {
            return Roots::one(0);
        }
        if self.legendre_reduced(s) != 1 {
            return Roots::NONE;
        }
        let k = if self.r < SCAN_ROOT_LIMIT {
            (1..self.r)
                .find(|&k| mul_mod(k, k, self.r) == s)
                .expect("residue has a root")
        } else {
            self.tonelli_shanks(s)
        };
        Roots::pair(k, self.r - k)
    }

    // Assumes s is a nonzero quadratic residue.
    fn tonelli_shanks(&self, s: u64) -> u64 {
        let r = self.r;
        if self.two_adicity == 1 {
            return pow_mod(s, (r + 1) / 4, r);
        }
        let mut m = self.two_adicity;
        let mut c = pow_mod(self.non_residue, self.odd_part, r);
        let mut t = pow_mod(s, self.odd_part, r);
        let mut root = pow_mod(s, self.odd_part.div_ceil(2), r);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod(t2, t2, r);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = mul_mod(b, b, r);
            }
            m = i;
            c = mul_mod(b, b, r);
            t = mul_mod(t, c, r);
            root = mul_mod(root, b, r);
        }
        root
    }

    /// The canonical root S(u): the root lying in [0, r/2].
    pub fn fixed_root(&self, u: Residue) -> Result<Residue> {
        let roots = self.sqrts_reduced(u.value() % self.r);
        match roots.as_slice().first() {
            Some(&k) => Ok(Residue(k)),
            None => Err(Error::NotAResidue(u.value() as i64)),
        }
    }

    /// {u : U/2 < u <= U, (u/r) = 1}, ascending. Requires 1 <= U < r.
    pub fn qr_window(&self, upper: u64) -> Result<Vec<u64>> {
        self.check_window(upper)?;
        Ok((upper / 2 + 1..=upper)
            .filter(|&u| self.legendre_reduced(u) == 1)
            .collect())
    }

    pub(crate) fn check_window(&self, upper: u64) -> Result<()> {
        if upper < 1 || upper >= self.r {
            return Err(Error::RangeError(format!(
                "window bound U = {upper} must satisfy 1 <= U < r = {}",
                self.r
            )));
        }
        Ok(())
    }
}

fn euler_criterion(s: u64, r: u64) -> i8 {
    match pow_mod(s, (r - 1) / 2, r) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}
