//! Acceptance criteria. Each test prints one PASS/FAIL line and then asserts.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

mod common;

use std::collections::BTreeMap;
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use sqrtsum::counting::{
    build_nu, collision_count_a, even_multiplicity_count_w, nu_moments, prop3_solution_count,
    quad_congruence_count, DEFAULT_BUDGET,
};
use sqrtsum::expsum::gauss_sum;
use sqrtsum::field::{is_prime, next_prime};
use sqrtsum::harness::{run_sweep, SeqTag, Summary, SweepConfig};
use sqrtsum::sieve::{farey_count_p, sieve_lhs, Rational, SieveSpec, DEFAULT_SIEVE_BUDGET};
use sqrtsum::verify::{check_prop1, moment_sum_direct, Target, DEFAULT_EPS};
use sqrtsum::{CoeffSeq, PrimeContext};

fn report(id: &str, name: &str, ok: bool, detail: &str) {
    println!("[{}] criterion {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn criterion_1_exact_identities() {
    let mut failures = Vec::new();

    let mut root_primes = 0;
    for r in (3..=499u64).filter(|&r| is_prime(r)) {
        let ctx = PrimeContext::new(r).unwrap();
        let total: usize = (0..r as i64).map(|s| ctx.all_sqrts(s).len()).sum();
        if total != r as usize {
            failures.push(format!("root count {total} at r = {r}"));
        }
        root_primes += 1;
    }

    let mut gauss_cases = 0;
    let mut worst_gauss = 0.0f64;
    for r in (3..=199u64).filter(|&r| is_prime(r)) {
        let ctx = PrimeContext::new(r).unwrap();
        let sr = (r as f64).sqrt();
        for a in 1..r as i64 {
            for b in 0..=2 {
                let dev = ((gauss_sum(a, b, &ctx) + 1.0).norm() - sr).abs() / sr;
                worst_gauss = worst_gauss.max(dev);
                if dev > 1e-9 {
                    failures.push(format!("Gauss modulus off by {dev} at r = {r}, a = {a}, b = {b}"));
                }
                gauss_cases += 1;
            }
        }
    }

    // Integer-valued |α_l| keep every partial sum exact.
    let primes: Vec<u64> = (3..=101).filter(|&r| is_prime(r)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for case in 0..200 {
        let r = primes[rng.random_range(0..primes.len())];
        let ctx = PrimeContext::new(r).unwrap();
        let size = rng.random_range(1..=8usize.min(r as usize - 1));
        let mut support: Vec<i64> = (1..r as i64).collect();
        for i in 0..size {
            let k = rng.random_range(i..support.len());
            support.swap(i, k);
        }
        support.truncate(size);
        let alpha = CoeffSeq::new(support.iter().map(|&l| {
            let w = rng.random_range(1..=5) as f64;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (l + r as i64 * rng.random_range(-2..=2), Complex64::new(sign * w, 0.0))
        }))
        .unwrap();
        let upper = rng.random_range(1..r);
        let y = rng.random_range(1..r);
        let a = rng.random_range(-200..200);
        let window = ctx.qr_window(upper).unwrap();
        let table = build_nu(&ctx, 1, &alpha, &window, a, y).unwrap();
        let (m1, _) = nu_moments(&table);
        let want = alpha.norm_l1() * window.len() as f64 * (3 * y + 1) as f64;
        if m1 != want {
            failures.push(format!("first moment {m1} vs {want} in case {case} (r = {r})"));
        }
    }

    let ok = failures.is_empty();
    report(
        "1",
        "exact identities",
        ok,
        &format!(
            "root counts over {root_primes} primes <= 499, {gauss_cases} Gauss sums (worst rel. dev {worst_gauss:.2e}), 200 first-moment instances; {} failures",
            failures.len()
        ),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_2_parseval_identity() {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for r in [7u64, 11, 19, 31] {
        let ctx = PrimeContext::new(r).unwrap();
        for n in [1u32, 2] {
            for k in [1usize, 2, 3] {
                // Ṽ = (V/2, V] with V = 2k.
                let vs: Vec<i64> = (k as i64 + 1..=2 * k as i64).collect();
                for xi in [0.0, 0.3] {
                    let count = prop3_solution_count(&ctx, 1, n, &vs, xi, DEFAULT_BUDGET).unwrap();
                    let lhs = r as f64 * count.phase_weighted.re;
                    let direct = moment_sum_direct(&ctx, 1, n, &vs, xi).unwrap();
                    worst = worst.max((lhs - direct).abs() / direct.abs().max(1e-300));
                    cases += 1;
                }
            }
        }
    }
    let ctx = PrimeContext::new(7).unwrap();
    let pinned = prop3_solution_count(&ctx, 1, 1, &[1, 2], 0.0, DEFAULT_BUDGET).unwrap();
    let pinned_direct = moment_sum_direct(&ctx, 1, 1, &[1, 2], 0.0).unwrap();
    let pinned_ok = pinned.raw_count == 14
        && (7.0 * pinned.phase_weighted.re - 98.0).abs() < 1e-9
        && (pinned_direct - 98.0).abs() < 1e-6 * 98.0;
    let ok = worst <= 1e-6 && pinned_ok;
    report(
        "2",
        "Parseval identity",
        ok,
        &format!(
            "{cases} cases, worst rel. error {worst:.2e} (tol 1e-6); pinned r=7 raw={} identity={}",
            pinned.raw_count,
            7.0 * pinned.phase_weighted.re
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_oracle_equivalence() {
    let mut failures = Vec::new();
    let mut checks = 0;

    for &(r, upper, y, a) in &[(7u64, 6u64, 2i64, 0i64), (11, 10, 3, 5), (13, 12, 4, -3), (19, 15, 3, 7), (29, 20, 2, 11)] {
        let ri = r as i64;
        let ctx = PrimeContext::new(r).unwrap();
        let pairs = [(1i64, 1.0), (2, 2.0), (ri - 2, 3.0), (ri + 4, 1.5)];
        let alpha = CoeffSeq::new(pairs.iter().map(|&(l, w)| (l, Complex64::new(0.0, w)))).unwrap();
        let us = window_naive(upper as i64, ri);
        let window: Vec<u64> = us.iter().map(|&u| u as u64).collect();
        let (_, m2) = nu_moments(&build_nu(&ctx, 1, &alpha, &window, a, y as u64).unwrap());
        let (_, want) = nu_moments_naive(ri, &pairs, &us, a, y);
        if (m2 - want).abs() > 1e-9 * want {
            failures.push(format!("m2 {m2} vs {want} at r = {r}"));
        }
        checks += 1;
    }

    for &r in &[7u64, 17, 31, 61, 101] {
        let ri = r as i64;
        let ctx = PrimeContext::new(r).unwrap();
        let xs: Vec<i64> = (1..ri).step_by(2).take(15).collect();
        let us = window_naive((ri - 1).min(30), ri);
        let window: Vec<u64> = us.iter().map(|&u| u as u64).collect();
        let got = quad_congruence_count(&ctx, &xs, &window).unwrap();
        let want = quad_naive(ri, &xs, &us);
        if got != want {
            failures.push(format!("quad {got} vs {want} at r = {r}"));
        }
        checks += 1;
    }

    for &(r, m, h) in &[(7u64, 3u64, 2u64), (23, 11, 3), (53, 26, 5), (101, 50, 7)] {
        let ri = r as i64;
        let ctx = PrimeContext::new(r).unwrap();
        for j in [1i64, 5] {
            let hist = collision_naive(ri, j, m as i64, h as i64);
            for d in 0..ri {
                let got = collision_count_a(&ctx, j, m, h, d).unwrap();
                if got != hist[d as usize] {
                    failures.push(format!("A({d}) {got} vs {} at r = {r}, j = {j}", hist[d as usize]));
                }
                checks += 1;
            }
        }
    }

    for n in 1..=3u32 {
        for k in 1..=6u64 {
            let got = even_multiplicity_count_w(n, k).unwrap();
            let want = w_naive(n, k);
            if got != want {
                failures.push(format!("W({n},{k}) {got} vs {want}"));
            }
            checks += 1;
        }
    }
    let w22 = even_multiplicity_count_w(2, 2).unwrap();
    if w22 != 8 {
        failures.push(format!("W(2,2) = {w22}"));
    }

    let ok = failures.is_empty();
    report(
        "3",
        "oracle equivalence",
        ok,
        &format!("{checks} comparisons (m2, quad count, A(d), W), W(2,2) = {w22}; {} failures", failures.len()),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_4_bound_ratio_sweeps() {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut lines = Vec::new();
    let mut ok = true;
    for target in [Target::Thm1, Target::Cor, Target::Prop2, Target::Prop3, Target::Lemma1, Target::Cishz] {
        let cfg = SweepConfig::defaults(target);
        assert_eq!(cfg.primes, vec![101, 211, 401, 809, 1009]);
        assert_eq!(cfg.seeds, vec![1, 2, 3, 4, 5]);
        assert_eq!(cfg.eps, vec![DEFAULT_EPS]);
        assert_eq!(cfg.gens.len(), 3);
        let rows = run_sweep(&cfg, threads).unwrap();
        let summary = Summary::of(&cfg, &rows);
        let by_r: &BTreeMap<u64, f64> = &summary.max_ratio_by_r;
        let max = summary.max_ratio.unwrap_or(f64::INFINITY);
        let (at401, at1009) = (by_r.get(&401).copied(), by_r.get(&1009).copied());
        let growth_ok = matches!((at401, at1009), (Some(a), Some(b)) if b <= 2.0 * a);
        let this_ok = max.is_finite() && max <= cfg.c_assert && growth_ok && summary.evaluated > 0;
        ok &= this_ok;
        lines.push(format!(
            "{target}: max {max:.4} over {} rows ({} skipped), r=401 {:.4}, r=1009 {:.4}{}",
            summary.evaluated,
            summary.skipped,
            at401.unwrap_or(f64::NAN),
            at1009.unwrap_or(f64::NAN),
            if this_ok { "" } else { " <-- fails" }
        ));
    }
    report("4", "bound-ratio sweeps (ceiling 64, growth <= 2x)", ok, &lines.join("; "));
    assert!(ok);
}

#[test]
fn criterion_5_prop1_window_fraction() {
    let mut p = 10_000;
    let mut fractions = Vec::new();
    for _ in 0..10 {
        p = next_prime(p + 1);
        let upper = ((p as f64).powf(0.45)).ceil() as u64;
        let ctx = PrimeContext::new(p).unwrap();
        let rep = check_prop1(upper, &ctx, DEFAULT_EPS).unwrap();
        let width = (upper - upper / 2) as f64;
        fractions.push((p, rep.count as f64 / upper as f64, rep.count as f64 / width));
    }
    let ok = fractions.iter().all(|&(_, f, _)| (0.3..=0.7).contains(&f));
    let detail: Vec<String> = fractions.iter().map(|(p, f, _)| format!("{p}:{f:.3}")).collect();
    let per_width: Vec<String> = fractions.iter().map(|(_, _, w)| format!("{w:.3}")).collect();
    report(
        "5",
        "window fraction |U|/U in [0.3, 0.7]",
        ok,
        &format!(
            "{} (relative to the window width U - floor(U/2): {})",
            detail.join(" "),
            per_width.join(" ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_sieve_suite() {
    let single = SieveSpec::new(2, 0, 1, CoeffSeq::ones(&[1]).unwrap()).unwrap();
    let pinned_lhs = sieve_lhs(&single, DEFAULT_SIEVE_BUDGET).unwrap();
    let r = |a, b| Rational::new(a, b);
    let p1 = farey_count_p(r(0, 1), 2, r(1, 10)).unwrap();
    let p2 = farey_count_p(r(0, 1), 1, r(1, 1)).unwrap();
    let p3 = farey_count_p(r(1, 4), 2, r(1, 100)).unwrap();
    let pinned_ok = (pinned_lhs - 3.0).abs() < 1e-12 && (p1, p2, p3) == (1, 3, 1);

    let mut cfg = SweepConfig::defaults(Target::Sieve);
    cfg.gens = vec![SeqTag::UnitPhase];
    let rows = run_sweep(&cfg, 1).unwrap();
    let summary = Summary::of(&cfg, &rows);
    let max = summary.max_ratio.unwrap_or(f64::INFINITY);
    let ok = pinned_ok && summary.skipped == 0 && summary.evaluated == 45 && max <= 64.0;
    report(
        "6",
        "sieve suite",
        ok,
        &format!(
            "lhs(Q=2,N=1) = {pinned_lhs}, P = ({p1}, {p2}, {p3}); max ratio {max:.4} over {} instances",
            summary.evaluated
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_thread_count_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for target in ["thm1", "prop3", "lemma1", "sieve"] {
        let config = dir.path().join(format!("{target}.cfg"));
        std::fs::write(&config, format!("target = {target}\n")).unwrap();
        let mut outputs = Vec::new();
        for threads in ["1", "8"] {
            let out = dir.path().join(format!("{target}-{threads}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_sqrtsum"))
                .args(["sweep", "--config"])
                .arg(&config)
                .arg("--output")
                .arg(&out)
                .env("SQRTSUM_THREADS", threads)
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(status.success(), "{target} with {threads} threads");
            outputs.push(std::fs::read(&out).unwrap());
        }
        let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
        ok &= same;
        detail.push(format!("{target} {} bytes {}", outputs[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    report("7", "CSV identical for 1 and 8 threads", ok, &detail.join(", "));
    assert!(ok);
}
