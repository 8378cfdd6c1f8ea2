//! Naive oracles written straight from the definitions.
#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;

pub fn md(x: i64, r: i64) -> i64 {
    x.rem_euclid(r)
}

pub fn roots_naive(s: i64, r: i64) -> Vec<i64> {
    (0..r).filter(|k| md(k * k - s, r) == 0).collect()
}

pub fn inv_naive(u: i64, r: i64) -> i64 {
    (1..r).find(|v| md(u * v, r) == 1).expect("invertible")
}

pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

pub fn window_naive(upper: i64, r: i64) -> Vec<i64> {
    (upper / 2 + 1..=upper)
        .filter(|&u| md(u, r) != 0 && !roots_naive(u, r).is_empty())
        .collect()
}

/// Tuples (v_1..v_2n), μ and root choices solving k_1+..+k_n = k_{n+1}+..+k_2n,
/// each also weighted by e(ξ(v_1+..+v_n - v_{n+1}-..-v_2n)).
pub fn prop3_naive(r: i64, j: i64, n: usize, vs: &[i64], xi: f64) -> (u64, f64) {
    let mut raw = 0u64;
    let mut weighted = 0.0;
    let k = vs.len();
    let total = k.pow(2 * n as u32);
    for mu in 0..r {
        let roots: Vec<Vec<i64>> = vs.iter().map(|&v| roots_naive(j * (mu - v), r)).collect();
        for code in 0..total {
            let mut idx = Vec::with_capacity(2 * n);
            let mut c = code;
            for _ in 0..2 * n {
                idx.push(c % k);
                c /= k;
            }
            let shift: i64 =
                idx[..n].iter().map(|&i| vs[i]).sum::<i64>() - idx[n..].iter().map(|&i| vs[i]).sum::<i64>();
            // Walk every root choice for the 2n positions.
            let mut stack = vec![(0usize, 0i64)];
            while let Some((pos, acc)) = stack.pop() {
                if pos == 2 * n {
                    if md(acc, r) == 0 {
                        raw += 1;
                        weighted += (TAU * xi * shift as f64).cos();
                    }
                    continue;
                }
                for &root in &roots[idx[pos]] {
                    let signed = if pos < n { root } else { -root };
                    stack.push((pos + 1, acc + signed));
                }
            }
        }
    }
    (raw, weighted)
}

/// Σ over (λ, μ) of |Σ_v e_r(λ √(j(μ - v))) e(ξ v)|^(2n) from the definition.
pub fn parseval_naive(r: i64, j: i64, n: u32, vs: &[i64], xi: f64) -> f64 {
    let mut total = 0.0;
    for lambda in 0..r {
        for mu in 0..r {
            let mut s = Complex64::new(0.0, 0.0);
            for &v in vs {
                for k in roots_naive(j * (mu - v), r) {
                    s += e((lambda * k) as f64 / r as f64) * e(xi * v as f64);
                }
            }
            total += s.norm_sqr().powi(n as i32);
        }
    }
    total
}

/// 2n-tuples over k symbols with every symbol used an even number of times.
pub fn w_naive(n: u32, k: u64) -> u64 {
    let len = 2 * n as usize;
    let mut count = 0;
    for code in 0..k.pow(len as u32) {
        let mut seen = vec![0u32; k as usize];
        let mut c = code;
        for _ in 0..len {
            seen[(c % k) as usize] += 1;
            c /= k;
        }
        if seen.iter().all(|x| x % 2 == 0) {
            count += 1;
        }
    }
    count
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// (Σν, Σν²) with the second moment as a sextuple loop over pairs of
/// (l, u, m) triples landing on the same cell.
pub fn nu_moments_naive(r: i64, alpha: &[(i64, f64)], window: &[i64], a: i64, y: i64) -> (f64, f64) {
    let mut triples = Vec::new();
    for &(l, w) in alpha {
        for &u in window {
            let s = roots_naive(u, r)[0];
            let uinv = inv_naive(u, r);
            for m in a - y..=a + 2 * y {
                triples.push((w, md(s * l, r), md(uinv * m, r)));
            }
        }
    }
    let first = triples.iter().map(|t| t.0).sum();
    let mut second = 0.0;
    for &(w1, l1, m1) in &triples {
        for &(w2, l2, m2) in &triples {
            if l1 == l2 && m1 == m2 {
                second += w1 * w2;
            }
        }
    }
    (first, second)
}

/// #{(l1, u1, l2, u2) : u1 l1² ≡ u2 l2²}.
pub fn quad_naive(r: i64, xs: &[i64], us: &[i64]) -> u64 {
    let mut count = 0;
    for &l1 in xs {
        for &u1 in us {
            for &l2 in xs {
                for &u2 in us {
                    if md(u1 * l1 * l1 - u2 * l2 * l2, r) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Histogram over d mod r of root pairs k1 - k2 for 1 <= m1, m2 <= M, |m1 - m2| <= H.
pub fn collision_naive(r: i64, j: i64, m: i64, h: i64) -> Vec<u64> {
    let mut hist = vec![0u64; r as usize];
    for m1 in 1..=m {
        for m2 in 1..=m {
            if (m1 - m2).abs() > h {
                continue;
            }
            for k1 in roots_naive(j * m1, r) {
                for k2 in roots_naive(j * m2, r) {
                    hist[md(k1 - k2, r) as usize] += 1;
                }
            }
        }
    }
    hist
}
