//! Grid expansion and evaluation. Rows are computed in parallel and
//! collected in index order, so output does not depend on thread count.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::{IntervalSpec, PhaseFamily, PhaseFn};
use crate::field::PrimeContext;
use crate::harness::config::{PhaseKind, ScaleExpr, SubsetKind, SweepConfig};
use crate::harness::seqgen::{gen_sequence, random_half, random_subset, SeqTag};
use crate::sieve::{check_sieve, scan_p_over_ranges, SieveSpec};
use crate::verify::{
    check_cishz, check_corollary, check_lemma1, check_prop1, check_prop2, check_prop3,
    check_theorem1, vee_set, BoundReport, Target, TheoremParams, XSpec,
};

pub const THREADS_VAR: &str = "SQRTSUM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    R,
    N,
    Gen,
    Seed,
    Eps,
    Xi,
    Phase,
    Subset,
    B,
    Size(&'static str),
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::R => "r",
            Axis::N => "n",
            Axis::Gen => "gen",
            Axis::Seed => "seed",
            Axis::Eps => "eps",
            Axis::Xi => "xi",
            Axis::Phase => "phase",
            Axis::Subset => "subset",
            Axis::B => "b",
            Axis::Size(s) => s,
        }
    }
}

/// Grid axes for a target, slowest first; also the CSV input columns.
pub fn axes(target: Target) -> Vec<Axis> {
    use Axis::*;
    match target {
        Target::Thm1 => vec![R, N, Gen, Seed, Eps, Phase, Size("X"), Size("Y"), Size("A")],
        Target::Cor => vec![R, N, Gen, Seed, Eps, Size("X"), Size("Y"), Size("A")],
        Target::Prop1 => vec![R, Eps, Size("U")],
        Target::Prop2 => vec![R, Gen, Seed, Eps, Size("X"), Size("Y"), Size("A"), Size("U")],
        Target::Prop3 => vec![R, N, Seed, Xi, Subset, Size("V")],
        Target::Lemma1 => vec![R, Gen, Seed, Eps, Phase, Size("L"), Size("M"), Size("H")],
        Target::Cishz => vec![R, Seed, Eps, Size("X"), Size("U")],
        Target::Sieve => vec![Gen, Seed, Eps, Size("Q"), Size("N")],
        Target::Pscan => vec![R, B, Size("Q"), Size("N")],
    }
}

/// Targets whose ratios are held to the ceiling.
pub fn is_asserted(target: Target) -> bool {
    !matches!(target, Target::Prop1 | Target::Pscan)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub index: usize,
    pub r: u64,
    pub n: u32,
    pub gen: SeqTag,
    pub seed: u64,
    pub eps: f64,
    pub xi: f64,
    pub phase: PhaseKind,
    pub subset: SubsetKind,
    pub b: i64,
    pub sizes: Vec<(&'static str, ScaleExpr)>,
}

impl Point {
    fn size(&self, key: &str) -> Result<i64> {
        self.sizes
            .iter()
            .find(|s| s.0 == key)
            .map(|s| s.1.resolve(self.r, self.n, self.eps))
            .ok_or_else(|| Error::Config(format!("no value for {key}")))
    }

    fn positive(&self, key: &str) -> Result<u64> {
        let v = self.size(key)?;
        if v < 1 {
            return Err(Error::InvalidParams(format!("{key} = {v} is empty")));
        }
        Ok(v as u64)
    }
}

fn axis_len(cfg: &SweepConfig, axis: Axis) -> usize {
    match axis {
        Axis::R => cfg.primes.len(),
        Axis::N => cfg.n.len(),
        Axis::Gen => cfg.gens.len(),
        Axis::Seed => cfg.seeds.len(),
        Axis::Eps => cfg.eps.len(),
        Axis::Xi => cfg.xi.len(),
        Axis::Phase => cfg.phases.len(),
        Axis::Subset => cfg.subsets.len(),
        Axis::B => cfg.b.len(),
        Axis::Size(k) => cfg.size(k).len(),
    }
}

/// Cartesian product of the target's axes, in odometer order.
pub fn expand(cfg: &SweepConfig) -> Result<Vec<Point>> {
    let axes = axes(cfg.target);
    let lens: Vec<usize> = axes.iter().map(|&a| axis_len(cfg, a)).collect();
    if let Some(pos) = lens.iter().position(|&l| l == 0) {
        return Err(Error::Config(format!("axis '{}' is empty", axes[pos].name())));
    }
    let total: usize = lens.iter().product();
    let mut points = Vec::with_capacity(total);
    let mut digits = vec![0usize; axes.len()];
    for index in 0..total {
        let mut p = Point {
            index,
            r: 0,
            n: 1,
            gen: SeqTag::Ones,
            seed: cfg.seeds[0],
            eps: cfg.eps[0],
            xi: 0.0,
            phase: PhaseKind::Zero,
            subset: SubsetKind::Full,
            b: 1,
            sizes: Vec::new(),
        };
        for (&axis, &d) in axes.iter().zip(&digits) {
            match axis {
                Axis::R => p.r = cfg.primes[d],
                Axis::N => p.n = cfg.n[d],
                Axis::Gen => p.gen = cfg.gens[d],
                Axis::Seed => p.seed = cfg.seeds[d],
                Axis::Eps => p.eps = cfg.eps[d],
                Axis::Xi => p.xi = cfg.xi[d],
                Axis::Phase => p.phase = cfg.phases[d],
                Axis::Subset => p.subset = cfg.subsets[d],
                Axis::B => p.b = cfg.b[d],
                Axis::Size(k) => p.sizes.push((k, cfg.size(k)[d])),
            }
        }
        points.push(p);
        for i in (0..axes.len()).rev() {
            digits[i] += 1;
            if digits[i] < lens[i] {
                break;
            }
            digits[i] = 0;
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Done(BoundReport),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub index: usize,
    pub target: Target,
    pub inputs: Vec<(&'static str, String)>,
    pub outcome: Outcome,
    pub wall_time: Option<f64>,
}

impl Row {
    pub fn report(&self) -> Option<&BoundReport> {
        match &self.outcome {
            Outcome::Done(r) => Some(r),
            Outcome::Skipped(_) => None,
        }
    }

    pub fn input(&self, name: &str) -> Option<&str> {
        self.inputs.iter().find(|i| i.0 == name).map(|i| i.1.as_str())
    }
}

fn inputs_of(target: Target, p: &Point) -> Vec<(&'static str, String)> {
    axes(target)
        .into_iter()
        .map(|axis| {
            let v = match axis {
                Axis::R => p.r.to_string(),
                Axis::N => p.n.to_string(),
                Axis::Gen => p.gen.to_string(),
                Axis::Seed => p.seed.to_string(),
                Axis::Eps => p.eps.to_string(),
                Axis::Xi => p.xi.to_string(),
                Axis::Phase => p.phase.as_str().to_string(),
                Axis::Subset => p.subset.as_str().to_string(),
                Axis::B => p.b.to_string(),
                Axis::Size(k) => p.size(k).map(|v| v.to_string()).unwrap_or_default(),
            };
            (axis.name(), v)
        })
        .collect()
}

pub fn evaluate(cfg: &SweepConfig, p: &Point) -> Row {
    let start = cfg.record_timing.then(Instant::now);
    let outcome = match eval_target(cfg, p) {
        Ok(rep) => Outcome::Done(rep),
        Err(e) => Outcome::Skipped(format!("{}: {e}", e.kind())),
    };
    Row {
        index: p.index,
        target: cfg.target,
        inputs: inputs_of(cfg.target, p),
        outcome,
        wall_time: start.map(|s| s.elapsed().as_secs_f64()),
    }
}

fn alpha_stream(p: &Point) -> u64 {
    2 * p.index as u64
}

fn beta_stream(p: &Point) -> u64 {
    2 * p.index as u64 + 1
}

fn interval_support(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).collect()
}

/// Phase of the requested family with sup |f'| = `slope` on `domain`.
fn phase_with_slope(kind: PhaseKind, slope: f64, lo: f64, hi: f64) -> Result<PhaseFn> {
    match kind {
        PhaseKind::Zero => Ok(PhaseFn::zero()),
        PhaseKind::Linear => PhaseFn::new(PhaseFamily::Linear { theta: slope }, lo, hi),
        PhaseKind::Power => {
            if lo < 1.0 {
                return Err(Error::InvalidParams(format!(
                    "power phase needs domain start >= 1, got {lo}"
                )));
            }
            let kappa = 0.5;
            let c = slope / (kappa * lo.powf(kappa - 1.0));
            PhaseFn::new(PhaseFamily::Power { c, kappa }, lo, hi)
        }
    }
}

fn eval_target(cfg: &SweepConfig, p: &Point) -> Result<BoundReport> {
    match cfg.target {
        Target::Thm1 => {
            let ctx = PrimeContext::new(p.r)?;
            let (x, y, a) = (p.positive("X")?, p.positive("Y")?, p.size("A")?);
            let interval = IntervalSpec::new(a, y);
            interval.validate(&ctx)?;
            let threshold = (p.r as f64).powf(1.0 / p.n as f64 + 0.25 + p.eps);
            let slope = 1.0 / (2.0 * x as f64 * threshold);
            let (lo, hi) = interval.phase_domain();
            let f = phase_with_slope(p.phase, slope, lo, hi)?;
            let alpha = gen_sequence(p.gen, &interval_support(1, x as i64), p.seed, alpha_stream(p))?;
            let params = TheoremParams::new(ctx, cfg.j, p.n, XSpec::Interval { start: 0, len: x }, interval, f)?
                .with_eps(p.eps)?;
            check_theorem1(&params, &alpha)
        }
        Target::Cor => {
            let ctx = PrimeContext::new(p.r)?;
            let (x, y, a) = (p.positive("X")?, p.positive("Y")?, p.size("A")?);
            let set = random_subset(1, p.r as i64 - 1, x as usize, p.seed, beta_stream(p))?;
            let alpha = gen_sequence(p.gen, &set, p.seed, alpha_stream(p))?;
            let params = TheoremParams::new(
                ctx,
                cfg.j,
                p.n,
                XSpec::Set(set),
                IntervalSpec::new(a, y),
                PhaseFn::zero(),
            )?
            .with_eps(p.eps)?;
            check_corollary(&params, &alpha)
        }
        Target::Prop1 => {
            let ctx = PrimeContext::new(p.r)?;
            let u = p.positive("U")?;
            Ok(check_prop1(u, &ctx, p.eps)?.to_report(p.r, u, p.eps))
        }
        Target::Prop2 => {
            let ctx = PrimeContext::new(p.r)?;
            let (x, y, a, u) = (p.positive("X")?, p.positive("Y")?, p.size("A")?, p.positive("U")?);
            IntervalSpec::new(a, y).validate(&ctx)?;
            let alpha = gen_sequence(p.gen, &interval_support(1, x as i64), p.seed, alpha_stream(p))?;
            check_prop2(&ctx, cfg.j, &alpha, u, a, y, p.eps)
        }
        Target::Prop3 => {
            let ctx = PrimeContext::new(p.r)?;
            let v = p.positive("V")?;
            if v >= p.r {
                return Err(Error::InvalidParams(format!("need V < r (V = {v})")));
            }
            let full = vee_set(v);
            let vs = match p.subset {
                SubsetKind::Full => full,
                SubsetKind::Random => random_half(&full, p.seed, beta_stream(p)),
            };
            check_prop3(&ctx, cfg.j, p.n, v, &vs, p.xi, cfg.budget)
        }
        Target::Lemma1 => {
            let ctx = PrimeContext::new(p.r)?;
            let (l, m, h) = (p.positive("L")?, p.positive("M")?, p.positive("H")?);
            let alpha = gen_sequence(p.gen, &interval_support(-(l as i64), l as i64), p.seed, alpha_stream(p))?;
            let beta = gen_sequence(p.gen, &interval_support(1, m as i64), p.seed, beta_stream(p))?;
            let slope = 1.0 / (2.0 * l as f64 * m as f64);
            let f = phase_with_slope(p.phase, slope, 1.0, m as f64)?;
            check_lemma1(&ctx, cfg.j, l, m, h, &alpha, &beta, &f, p.eps)
        }
        Target::Cishz => {
            let ctx = PrimeContext::new(p.r)?;
            let (x, u) = (p.positive("X")?, p.positive("U")?);
            let set = random_subset(1, p.r as i64 - 1, x as usize, p.seed, beta_stream(p))?;
            check_cishz(&ctx, &set, u, p.eps)
        }
        Target::Sieve => {
            let (q, n) = (p.positive("Q")?, p.positive("N")?);
            let a = gen_sequence(p.gen, &interval_support(1, n as i64), p.seed, alpha_stream(p))?;
            check_sieve(&SieveSpec::new(q, 0, n, a)?, p.eps, cfg.budget)
        }
        Target::Pscan => {
            let (q, n) = (p.positive("Q")?, p.positive("N")?);
            let scan = scan_p_over_ranges(q, n, p.r, p.b, cfg.grid_size)?;
            let argmax = *scan.argmax.numer() as f64 / *scan.argmax.denom() as f64;
            Ok(BoundReport::new(Target::Pscan, scan.max as f64, scan.target)
                .param("Q", q)
                .param("N", n)
                .param("r", p.r)
                .param("b", p.b)
                .param("grid_size", scan.grid.len())
                .param("argmax_z", argmax)
                .param("argmax_z_exact", scan.argmax.to_string().as_str())
                .flag("range_ok", scan.range_ok))
        }
    }
}

/// Thread count from SQRTSUM_THREADS, or the machine's parallelism if unset.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(Error::Config(format!("{THREADS_VAR} must be an integer >= 1, got '{s}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> Result<Vec<Row>> {
    let points = expand(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| points.par_iter().map(|p| evaluate(cfg, p)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_is_odometer_ordered() {
        let mut cfg = SweepConfig::defaults(Target::Cishz);
        cfg.primes = vec![101, 211];
        cfg.seeds = vec![1, 2];
        let pts = expand(&cfg).unwrap();
        assert_eq!(pts.len(), 2 * 2 * 2 * 2);
        assert_eq!((pts[0].r, pts[0].seed), (101, 1));
        assert_eq!((pts[8].r, pts[8].seed), (211, 1));
        assert!(pts.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn empty_x_is_skipped() {
        let mut cfg = SweepConfig::defaults(Target::Prop2);
        cfg.primes = vec![101];
        cfg.seeds = vec![1];
        cfg.gens = vec![SeqTag::Ones];
        cfg.sizes.insert("X", vec![ScaleExpr::Int(0)]);
        let rows = run_sweep(&cfg, 1).unwrap();
        assert!(rows.iter().all(|r| matches!(r.outcome, Outcome::Skipped(_))));
    }

    #[test]
    fn sweep_rows_match_direct_evaluation() {
        let mut cfg = SweepConfig::defaults(Target::Thm1);
        cfg.primes = vec![101];
        cfg.seeds = vec![1];
        let rows = run_sweep(&cfg, 2).unwrap();
        let pts = expand(&cfg).unwrap();
        assert_eq!(rows.len(), pts.len());
        for (row, p) in rows.iter().zip(&pts) {
            assert_eq!(row, &evaluate(&cfg, p));
        }
    }
}
