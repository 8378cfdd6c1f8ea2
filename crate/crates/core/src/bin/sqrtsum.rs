use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{Map, Value};

use sqrtsum::counting::{
    build_nu, collision_count_a, even_multiplicity_count_w, nu_moments, prop3_solution_count,
    quad_congruence_count, DEFAULT_BUDGET,
};
use sqrtsum::expsum::{bilinear_interval_sum, bilinear_set_sum, gauss_sum, salie_sum};
use sqrtsum::harness::report::float_json;
use sqrtsum::harness::sweep::{evaluate, expand};
use sqrtsum::harness::{
    row_json, run_sweep, threads_from_env, write_csv, PhaseKind, SeqTag, Summary, SweepConfig,
};
use sqrtsum::sieve::{farey_count_p, scan_p_over_ranges, sieve_lhs, z_norm, Rational, SieveSpec, DEFAULT_SIEVE_BUDGET};
use sqrtsum::verify::Target;
use sqrtsum::{CoeffSeq, Error, IntervalSpec, PhaseFamily, PhaseFn, PrimeContext};

const SWEEP_HELP: &str = "\
CSV layout: '# schema=1' and '# target=<t>' comment lines, a header row, one
row per grid point in index order, then '# max_ratio', '# rows' and
'# ceiling' summary lines.

Columns: index, the target's grid inputs, status (ok|skipped), lhs, rhs,
ratio, trivial_bound, flags (name=0|1;...), params (name=value;...),
wall_time (only with record_timing = true), reason.

Grid inputs per target:
  thm1    r, n, gen, seed, eps, phase, X, Y, A
  cor     r, n, gen, seed, eps, X, Y, A
  prop1   r, eps, U
  prop2   r, gen, seed, eps, X, Y, A, U
  prop3   r, n, seed, xi, subset, V
  lemma1  r, gen, seed, eps, phase, L, M, H
  cishz   r, seed, eps, X, U
  sieve   gen, seed, eps, Q, N
  pscan   r, b, Q, N

SQRTSUM_THREADS caps the worker count; output does not depend on it.
Exit status 1 when a held target exceeds C_assert.";

#[derive(Parser)]
#[command(name = "sqrtsum", version, about = "Exponential sums with modular square roots")]
struct Cli {
    /// Aligned text instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// All square roots of s modulo r.
    Sqrt {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
    },
    /// Legendre symbol (a / r).
    Legendre {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
    },
    /// Quadratic Gauss sum G(a, b; r).
    Gauss {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        b: i64,
    },
    /// Complete Salié sum S(a, b; r).
    Salie {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, allow_negative_numbers = true)]
        b: i64,
    },
    /// Σ over l in X and m in (A, A+Y] of α_l e_r(l √(jm)) e(l f(m)).
    SumSet(SumSetArgs),
    /// Σ over |l| <= L and 1 <= m <= M of α_l β_m e_r(l √(jm)) e(l f(m)).
    SumInterval(SumIntervalArgs),
    /// First and second moments of ν(λ, μ).
    Nu(NuArgs),
    /// Counting quantities.
    Count {
        #[command(subcommand)]
        which: CountCmd,
    },
    /// Evaluate one instance of a target and compare with its bound.
    Verify(VerifyArgs),
    /// Large sieve with square moduli.
    Sieve {
        #[command(subcommand)]
        which: SieveCmd,
    },
    /// Run a parameter sweep and write CSV.
    #[command(after_help = SWEEP_HELP)]
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path; '-' writes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SeqArgs {
    /// Coefficient generator: ones, unit_phase or rademacher.
    #[arg(long, default_value = "ones")]
    gen: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct PhaseArgs {
    /// zero, linear (θ y) or power (c y^κ).
    #[arg(long, default_value = "zero")]
    phase: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
}

#[derive(Args)]
struct SumSetArgs {
    #[arg(long)]
    r: u64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
    j: i64,
    /// Comma-separated elements of X.
    #[arg(long = "x", value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<i64>,
    #[arg(long = "a", allow_negative_numbers = true, default_value_t = 0)]
    a: i64,
    #[arg(long = "y")]
    y: u64,
    #[command(flatten)]
    seq: SeqArgs,
    #[command(flatten)]
    phase: PhaseArgs,
}

#[derive(Args)]
struct SumIntervalArgs {
    #[arg(long)]
    r: u64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
    j: i64,
    #[arg(long = "l")]
    l: u64,
    #[arg(long = "m")]
    m: u64,
    #[command(flatten)]
    seq: SeqArgs,
    #[command(flatten)]
    phase: PhaseArgs,
}

#[derive(Args)]
struct NuArgs {
    #[arg(long)]
    r: u64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
    j: i64,
    #[arg(long = "x", value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<i64>,
    #[arg(long = "u")]
    u: u64,
    #[arg(long = "a", allow_negative_numbers = true, default_value_t = 0)]
    a: i64,
    #[arg(long = "y")]
    y: u64,
    #[command(flatten)]
    seq: SeqArgs,
}

#[derive(Subcommand)]
enum CountCmd {
    /// #{x1² u1 ≡ x2² u2} over X and the residue window of (U/2, U].
    Cishz {
        #[arg(long)]
        r: u64,
        #[arg(long = "x", value_delimiter = ',', allow_negative_numbers = true, required = true)]
        x: Vec<i64>,
        #[arg(long = "u")]
        u: u64,
    },
    /// Collision count A(d).
    #[command(name = "Ad")]
    Ad {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
        j: i64,
        #[arg(long = "m")]
        m: u64,
        #[arg(long = "h")]
        h: u64,
        #[arg(long = "d", allow_negative_numbers = true)]
        d: i64,
    },
    /// Root-congruence solution counts over a subset of (V/2, V].
    Prop3 {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
        j: i64,
        #[arg(long)]
        n: u32,
        #[arg(long = "v", value_delimiter = ',', allow_negative_numbers = true, required = true)]
        v: Vec<i64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        xi: f64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Even-multiplicity count W(n, k).
    #[command(name = "W")]
    W {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Subcommand)]
enum SieveCmd {
    /// Left side of the square-moduli sieve inequality.
    Lhs {
        #[arg(long = "q")]
        q: u64,
        #[arg(long = "n")]
        n: u64,
        #[arg(long = "m", allow_negative_numbers = true, default_value_t = 0)]
        m: i64,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = DEFAULT_SIEVE_BUDGET)]
        budget: u128,
    },
    /// Farey counter P(α).
    Pcount {
        /// Rational centre such as 1/4 or -3.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long = "q")]
        q: u64,
        /// Rational radius such as 1/100.
        #[arg(long)]
        delta: String,
    },
    /// P(b/r + z) over a geometric grid of z in [1/N, N^(-1/2)/r].
    Pscan {
        #[arg(long = "q")]
        q: u64,
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
        b: i64,
        #[arg(long, default_value_t = 16)]
        grid_size: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of thm1, cor, prop1, prop2, prop3, lemma1, cishz, sieve, pscan.
    target: String,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    j: Option<i64>,
    #[arg(long)]
    gen: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    #[arg(long)]
    phase: Option<String>,
    #[arg(long)]
    subset: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<i64>,
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long = "c-assert")]
    c_assert: Option<f64>,
    /// Size parameters accept scale expressions such as 12, r^0.5, r/4, ycond.
    #[arg(long = "X", allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long = "Y")]
    y: Option<String>,
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long = "H")]
    h: Option<String>,
    #[arg(long = "U")]
    u: Option<String>,
    #[arg(long = "V")]
    v: Option<String>,
    #[arg(long = "Q")]
    q: Option<String>,
    #[arg(long = "N")]
    big_n: Option<String>,
}

type Obj = Map<String, Value>;

fn complex_obj(z: Complex64) -> Obj {
    let mut m = Obj::new();
    m.insert("re".into(), float_json(z.re));
    m.insert("im".into(), float_json(z.im));
    m.insert("abs".into(), float_json(z.norm()));
    m
}

fn single(key: &str, v: impl Into<Value>) -> Obj {
    let mut m = Obj::new();
    m.insert(key.into(), v.into());
    m
}

fn sequence(seq: &SeqArgs, support: &[i64]) -> Result<CoeffSeq, Error> {
    let tag: SeqTag = seq.gen.parse()?;
    sqrtsum::harness::gen_sequence(tag, support, seq.seed, 0)
}

fn phase(p: &PhaseArgs, lo: f64, hi: f64) -> Result<PhaseFn, Error> {
    match p.phase.parse::<PhaseKind>().map_err(|e| Error::InvalidParams(e.to_string()))? {
        PhaseKind::Zero => Ok(PhaseFn::zero()),
        PhaseKind::Linear => PhaseFn::new(PhaseFamily::Linear { theta: p.theta }, lo, hi),
        PhaseKind::Power => PhaseFn::new(PhaseFamily::Power { c: p.c, kappa: p.kappa }, lo, hi),
    }
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::InvalidParams(format!("bad rational '{s}'"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i128>().map_err(|_| bad())?, d.trim().parse::<i128>().map_err(|_| bad())?),
        None => (s.trim().parse::<i128>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

enum Outcome {
    Print(Obj),
    Sweep { ok: bool, summary: Obj },
}

fn verify_config(args: &VerifyArgs) -> Result<SweepConfig, Error> {
    let target: Target = args.target.parse()?;
    let mut cfg = SweepConfig::defaults(target);
    // One instance: the first default on every axis unless overridden.
    cfg.primes.truncate(1);
    cfg.n.truncate(1);
    cfg.gens.truncate(1);
    cfg.seeds.truncate(1);
    cfg.eps.truncate(1);
    cfg.xi.truncate(1);
    cfg.phases.truncate(1);
    cfg.subsets.truncate(1);
    cfg.b.truncate(1);
    for v in cfg.sizes.values_mut() {
        v.truncate(1);
    }
    let mut set = |k: &str, v: Option<String>| -> Result<(), Error> {
        match v {
            Some(v) => cfg.apply(k, &v).map_err(|e| Error::InvalidParams(e.to_string())),
            None => Ok(()),
        }
    };
    set("primes", args.r.map(|v| v.to_string()))?;
    set("n", args.n.map(|v| v.to_string()))?;
    set("j", args.j.map(|v| v.to_string()))?;
    set("gen", args.gen.clone())?;
    set("seed", args.seed.map(|v| v.to_string()))?;
    set("eps", args.eps.map(|v| v.to_string()))?;
    set("xi", args.xi.map(|v| v.to_string()))?;
    set("phase", args.phase.clone())?;
    set("subset", args.subset.clone())?;
    set("b", args.b.map(|v| v.to_string()))?;
    set("grid_size", args.grid_size.map(|v| v.to_string()))?;
    set("budget", args.budget.clone())?;
    set("C_assert", args.c_assert.map(|v| v.to_string()))?;
    for (k, v) in [
        ("X", &args.x),
        ("Y", &args.y),
        ("A", &args.a),
        ("L", &args.l),
        ("M", &args.m),
        ("H", &args.h),
        ("U", &args.u),
        ("V", &args.v),
        ("Q", &args.q),
        ("N", &args.big_n),
    ] {
        set(k, v.clone())?;
    }
    if target == Target::Sieve {
        cfg.primes.clear();
    }
    cfg.check().map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok(cfg)
}

fn run(cmd: Cmd) -> Result<Outcome, Error> {
    let obj = match cmd {
        Cmd::Sqrt { r, s } => {
            let ctx = PrimeContext::new(r)?;
            let roots: Vec<Value> = ctx.all_sqrts(s).iter().map(Value::from).collect();
            single("roots", roots)
        }
        Cmd::Legendre { r, a } => single("legendre", PrimeContext::new(r)?.legendre(a)),
        Cmd::Gauss { r, a, b } => complex_obj(gauss_sum(a, b, &PrimeContext::new(r)?)),
        Cmd::Salie { r, a, b } => complex_obj(salie_sum(a, b, &PrimeContext::new(r)?)),
        Cmd::SumSet(s) => {
            let ctx = PrimeContext::new(s.r)?;
            let interval = IntervalSpec::new(s.a, s.y);
            let (lo, hi) = interval.phase_domain();
            let f = phase(&s.phase, lo, hi)?;
            let alpha = sequence(&s.seq, &s.x)?;
            complex_obj(bilinear_set_sum(&ctx, s.j, &alpha, &interval, &f)?)
        }
        Cmd::SumInterval(s) => {
            let ctx = PrimeContext::new(s.r)?;
            let f = phase(&s.phase, 1.0, s.m.max(1) as f64)?;
            let l = s.l as i64;
            let alpha = sequence(&s.seq, &(-l..=l).collect::<Vec<_>>())?;
            let beta = sqrtsum::harness::gen_sequence(
                s.seq.gen.parse()?,
                &(1..=s.m as i64).collect::<Vec<_>>(),
                s.seq.seed,
                1,
            )?;
            complex_obj(bilinear_interval_sum(&ctx, s.j, s.l, s.m, &alpha, &beta, &f)?)
        }
        Cmd::Nu(s) => {
            let ctx = PrimeContext::new(s.r)?;
            let alpha = sequence(&s.seq, &s.x)?;
            let window = ctx.qr_window(s.u)?;
            let table = build_nu(&ctx, s.j, &alpha, &window, s.a, s.y)?;
            let (m1, m2) = nu_moments(&table);
            let mut m = Obj::new();
            m.insert("window".into(), Value::from(window.len()));
            m.insert("nonzero".into(), Value::from(table.nonzero().len()));
            m.insert("m1".into(), float_json(m1));
            m.insert("m2".into(), float_json(m2));
            m
        }
        Cmd::Count { which } => match which {
            CountCmd::Cishz { r, x, u } => {
                let ctx = PrimeContext::new(r)?;
                let window = ctx.qr_window(u)?;
                single("count", quad_congruence_count(&ctx, &x, &window)?)
            }
            CountCmd::Ad { r, j, m, h, d } => {
                single("A", collision_count_a(&PrimeContext::new(r)?, j, m, h, d)?)
            }
            CountCmd::Prop3 { r, j, n, v, xi, budget } => {
                let c = prop3_solution_count(&PrimeContext::new(r)?, j, n, &v, xi, budget)?;
                let mut m = single("raw_count", c.raw_count);
                m.insert("phase_weighted".into(), float_json(c.phase_weighted.re));
                m.insert("identity_value".into(), float_json(r as f64 * c.phase_weighted.re));
                m
            }
            CountCmd::W { n, k } => single("W", even_multiplicity_count_w(n, k)?),
        },
        Cmd::Verify(args) => {
            let cfg = verify_config(&args)?;
            let points = expand(&cfg)?;
            let row = evaluate(&cfg, &points[0]);
            let mut m = row_json(&row);
            if let Some(rep) = row.report() {
                m.insert("C_assert".into(), float_json(cfg.c_assert));
                m.insert("within_ceiling".into(), Value::from(rep.ratio <= cfg.c_assert));
            }
            m
        }
        Cmd::Sieve { which } => match which {
            SieveCmd::Lhs { q, n, m, seq, budget } => {
                let a = sequence(&seq, &(m + 1..=m + n as i64).collect::<Vec<_>>())?;
                let spec = SieveSpec::new(q, m, n, a)?;
                let mut o = single("lhs", float_json(sieve_lhs(&spec, budget)?));
                o.insert("Z".into(), float_json(z_norm(&spec)));
                o
            }
            SieveCmd::Pcount { alpha, q, delta } => {
                single("P", farey_count_p(parse_rational(&alpha)?, q, parse_rational(&delta)?)?)
            }
            SieveCmd::Pscan { q, n, r, b, grid_size } => {
                let s = scan_p_over_ranges(q, n, r, b, grid_size)?;
                let mut o = single("max", s.max);
                o.insert("argmax".into(), Value::from(s.argmax.to_string()));
                o.insert(
                    "argmax_float".into(),
                    float_json(*s.argmax.numer() as f64 / *s.argmax.denom() as f64),
                );
                o.insert("target".into(), float_json(s.target));
                o.insert("range_ok".into(), Value::from(s.range_ok));
                o.insert("points".into(), Value::from(s.grid.len()));
                o
            }
        },
        Cmd::Sweep { config, output } => {
            let mut cfg = SweepConfig::from_file(&config)?;
            if let Some(o) = output {
                cfg.output = Some(o);
            }
            let threads = threads_from_env()?;
            let rows = run_sweep(&cfg, threads)?;
            let summary = Summary::of(&cfg, &rows);
            let io = |e: std::io::Error| Error::Config(format!("output: {e}"));
            match cfg.output.as_deref() {
                Some(p) if p.as_os_str() != "-" => {
                    let mut w = BufWriter::new(File::create(p).map_err(io)?);
                    write_csv(&cfg, &rows, &summary, &mut w)?;
                    w.flush().map_err(io)?;
                }
                _ => {
                    let stdout = std::io::stdout();
                    write_csv(&cfg, &rows, &summary, stdout.lock())?;
                    return Ok(Outcome::Sweep { ok: summary.passes(), summary: Obj::new() });
                }
            }
            let mut m = single("target", cfg.target.as_str());
            m.insert("rows".into(), Value::from(summary.rows));
            m.insert("evaluated".into(), Value::from(summary.evaluated));
            m.insert("skipped".into(), Value::from(summary.skipped));
            m.insert(
                "max_ratio".into(),
                summary.max_ratio.map_or(Value::Null, float_json),
            );
            m.insert("pass".into(), Value::from(summary.passes()));
            m.insert("threads".into(), Value::from(threads));
            if let Some(p) = &cfg.output {
                m.insert("output".into(), Value::from(p.display().to_string()));
            }
            return Ok(Outcome::Sweep { ok: summary.passes(), summary: m });
        }
    };
    Ok(Outcome::Print(obj))
}

/// Six significant digits.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    // The exponent after rounding to six digits decides the layout.
    let sci = format!("{x:.5e}");
    let mag: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn human_value(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sig6(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(human_value).collect::<Vec<_>>().join(", "),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn print_obj(obj: &Obj, human: bool) {
    if human {
        let width = obj.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        for (k, v) in obj {
            println!("{k:<width$}  {}", human_value(v));
        }
    } else {
        println!("{}", Value::Object(obj.clone()));
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let mut m = Obj::new();
    m.insert("error".into(), Value::from(kind));
    m.insert("message".into(), Value::from(message));
    eprintln!("{}", Value::Object(m));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            return fail("Usage", first, 2);
        }
    };
    match run(cli.cmd) {
        Ok(Outcome::Print(obj)) => {
            print_obj(&obj, cli.human);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Sweep { ok, summary }) => {
            if !summary.is_empty() {
                print_obj(&summary, cli.human);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::BudgetExceeded { .. }) => fail(e.kind(), &e.to_string(), 3),
        Err(e) => fail(e.kind(), &e.to_string(), 2),
    }
}
