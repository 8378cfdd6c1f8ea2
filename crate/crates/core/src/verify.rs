//! Exact left sides against formula right sides for the bilinear-sum bound,
//! its f = 0 specialisation, the moment and solution-count estimates, the
//! collision-count form of the square-sieve estimate and the quadruple
//! congruence bound. Every comparison is a recorded ratio with implied
//! constant one.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::counting::{
    build_nu, collision_window, nu_moments, prop3_solution_count, quad_congruence_count,
    CollisionTable, NuTable,
};
use crate::error::{Error, Result};
use crate::expsum::{
    bilinear_interval_sum, bilinear_set_sum, char_r, char_window_sum, check_j, shifted_set_sum,
    sum_complex, sum_f64, unit_phase, CoeffSeq, IntervalSpec, PhaseFn,
};
use crate::field::PrimeContext;

pub const DEFAULT_EPS: f64 = 0.05;
pub const DEFAULT_C_ASSERT: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Thm1,
    Cor,
    Prop1,
    Prop2,
    Prop3,
    Lemma1,
    Cishz,
    Sieve,
    Pscan,
}

impl Target {
    pub const ALL: [Target; 9] = [
        Target::Thm1,
        Target::Cor,
        Target::Prop1,
        Target::Prop2,
        Target::Prop3,
        Target::Lemma1,
        Target::Cishz,
        Target::Sieve,
        Target::Pscan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Thm1 => "thm1",
            Target::Cor => "cor",
            Target::Prop1 => "prop1",
            Target::Prop2 => "prop2",
            Target::Prop3 => "prop3",
            Target::Lemma1 => "lemma1",
            Target::Cishz => "cishz",
            Target::Sieve => "sieve",
            Target::Pscan => "pscan",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown target '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

/// One verification record.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub target: Target,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub trivial_bound: Option<f64>,
    pub flags: Vec<(&'static str, bool)>,
    pub params: Vec<(&'static str, ParamValue)>,
}

impl BoundReport {
    pub fn new(target: Target, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            target,
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            trivial_bound: None,
            flags: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn param(mut self, name: &'static str, value: impl Into<ParamValue>) -> Self {
        self.params.push((name, value.into()));
        self
    }

    pub fn flag(mut self, name: &'static str, value: bool) -> Self {
        self.flags.push((name, value));
        self
    }

    pub fn get_param(&self, name: &str) -> Option<&ParamValue> {
        self.params.iter().find(|p| p.0 == name).map(|p| &p.1)
    }

    pub fn get_flag(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|p| p.0 == name).map(|p| p.1)
    }
}

/// lhs / rhs, with 0 / 0 read as 0.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// The set 𝒳 either as explicit residues or as the integers in (L0, L0 + L].
#[derive(Debug, Clone, PartialEq)]
pub enum XSpec {
    Set(Vec<i64>),
    Interval { start: i64, len: u64 },
}

impl XSpec {
    pub fn elements(&self) -> Vec<i64> {
        match self {
            XSpec::Set(v) => {
                let mut v = v.clone();
                v.sort_unstable();
                v
            }
            XSpec::Interval { start, len } => (start + 1..=start + *len as i64).collect(),
        }
    }

    pub fn count(&self) -> usize {
        match self {
            XSpec::Set(v) => v.len(),
            XSpec::Interval { len, .. } => *len as usize,
        }
    }

    /// Length L of the enclosing integer interval; for a set, the shortest one.
    pub fn enclosing_len(&self) -> u64 {
        match self {
            XSpec::Set(v) => match (v.iter().min(), v.iter().max()) {
                (Some(lo), Some(hi)) => (hi - lo + 1) as u64,
                _ => 0,
            },
            XSpec::Interval { len, .. } => *len,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TheoremParams {
    pub ctx: PrimeContext,
    pub j: i64,
    pub n: u32,
    pub x: XSpec,
    pub interval: IntervalSpec,
    pub f: PhaseFn,
    pub eps: f64,
    pub c_assert: f64,
}

impl TheoremParams {
    pub fn new(
        ctx: PrimeContext,
        j: i64,
        n: u32,
        x: XSpec,
        interval: IntervalSpec,
        f: PhaseFn,
    ) -> Result<Self> {
        let p = TheoremParams {
            ctx,
            j,
            n,
            x,
            interval,
            f,
            eps: DEFAULT_EPS,
            c_assert: DEFAULT_C_ASSERT,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_j(&self.ctx, self.j)?;
        self.interval.validate(&self.ctx)?;
        if self.n < 1 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParams("eps must be positive".into()));
        }
        if self.x.count() == 0 {
            return Err(Error::InvalidParams("X is empty".into()));
        }
        if let XSpec::Interval { len: 0, .. } = self.x {
            return Err(Error::InvalidParams("interval mode needs L >= 1".into()));
        }
        let elems = self.x.elements();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("X has repeated elements".into()));
        }
        if elems.iter().any(|&l| self.ctx.reduce(l) == 0) {
            return Err(Error::InvalidParams("X must avoid 0 mod r".into()));
        }
        let (lo, hi) = self.interval.phase_domain();
        self.f.require_covers(lo, hi)?;
        Ok(())
    }

    pub fn r(&self) -> u64 {
        self.ctx.modulus()
    }

    pub fn l_len(&self) -> u64 {
        self.x.enclosing_len()
    }

    pub fn big_f(&self) -> f64 {
        self.f.derivative_bound()
    }

    /// r^(1/n + 1/4 + eps), the threshold in both hypotheses.
    fn threshold(&self) -> f64 {
        (self.r() as f64).powf(1.0 / self.n as f64 + 0.25 + self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeFlags {
    pub lcond_ok: bool,
    pub ycond_ok: bool,
    pub nontrivial_region: bool,
}

/// Hypothesis flags, recomputed from the parameters on every call.
pub fn theorem_flags(p: &TheoremParams) -> RegimeFlags {
    let r = p.r() as f64;
    let l = p.l_len() as f64;
    let y = p.interval.len as f64;
    let lf = l * p.big_f();
    let lcond_ok = l >= 1.0 && lf * p.threshold() <= 1.0;
    let ycond_ok = y >= p.threshold();
    let x = p.x.count() as f64;
    let nontrivial_region = x * y * y >= r.powf(1.0 + p.eps) && y >= r.powf(0.25 + p.eps);
    RegimeFlags {
        lcond_ok,
        ycond_ok,
        nontrivial_region,
    }
}

/// ‖α‖₁^(1-1/n) ‖α‖∞^(1/n) X^(1/2n) Y^(1-1/2n) (X + (LF + 1/Y) r^(1+1/n))^(1/2n) r^eps.
#[allow(clippy::too_many_arguments)]
pub fn bilinear_bound(
    n: u32,
    l1: f64,
    linf: f64,
    x: f64,
    y: f64,
    lf: f64,
    r: f64,
    eps: f64,
) -> Result<f64> {
    if n < 1 || !(l1 >= 0.0 && linf >= 0.0 && x >= 0.0 && y > 0.0 && lf >= 0.0 && r > 0.0) {
        return Err(Error::InvalidParams("bound inputs out of range".into()));
    }
    let nf = n as f64;
    let inv2n = 1.0 / (2.0 * nf);
    let core = x + (lf + 1.0 / y) * r.powf(1.0 + 1.0 / nf);
    Ok(l1.powf(1.0 - 1.0 / nf)
        * linf.powf(1.0 / nf)
        * x.powf(inv2n)
        * y.powf(1.0 - inv2n)
        * core.powf(inv2n)
        * r.powf(eps))
}

pub fn theorem1_rhs(p: &TheoremParams, l1: f64, linf: f64, x: usize) -> Result<f64> {
    let lf = p.l_len() as f64 * p.big_f();
    bilinear_bound(p.n, l1, linf, x as f64, p.interval.len as f64, lf, p.r() as f64, p.eps)
}

pub fn corollary_rhs(p: &TheoremParams, l1: f64, linf: f64, x: usize) -> Result<f64> {
    bilinear_bound(p.n, l1, linf, x as f64, p.interval.len as f64, 0.0, p.r() as f64, p.eps)
}

/// Number of (m, k) with m in the interval and k^2 = j m.
pub fn root_pair_count(ctx: &PrimeContext, j: i64, interval: &IntervalSpec) -> u64 {
    interval
        .iter()
        .map(|m| ctx.sqrts_reduced(ctx.mul(ctx.reduce(j), ctx.reduce(m))).len() as u64)
        .sum()
}

fn check_support(p: &TheoremParams, seq: &CoeffSeq) -> Result<()> {
    let elems = p.x.elements();
    if let Some(l) = seq.support().iter().find(|l| elems.binary_search(l).is_err()) {
        return Err(Error::InvalidParams(format!("sequence index {l} is outside X")));
    }
    Ok(())
}

fn theorem_common(p: &TheoremParams, seq: &CoeffSeq, target: Target, rhs: f64) -> Result<BoundReport> {
    let sum = bilinear_set_sum(&p.ctx, p.j, seq, &p.interval, &p.f)?;
    let lhs = sum.norm();
    let trivial = seq.norm_l1() * root_pair_count(&p.ctx, p.j, &p.interval) as f64;
    let flags = theorem_flags(p);
    let (u, v) = match choose_shift_params(p) {
        Ok(s) => (s.u, s.v),
        Err(_) => (0, 0),
    };
    let mut report = BoundReport::new(target, lhs, rhs)
        .param("r", p.r())
        .param("j", p.j)
        .param("n", p.n)
        .param("X", p.x.count())
        .param("L", p.l_len())
        .param("A", p.interval.start)
        .param("Y", p.interval.len)
        .param("F", p.big_f())
        .param("eps", p.eps)
        .param("U", u)
        .param("V", v);
    report.trivial_bound = Some(trivial);
    if target == Target::Thm1 {
        report = report.flag("lcond_ok", flags.lcond_ok);
    }
    Ok(report
        .flag("ycond_ok", flags.ycond_ok)
        .flag("nontrivial_region", flags.nontrivial_region))
}

pub fn check_theorem1(p: &TheoremParams, seq: &CoeffSeq) -> Result<BoundReport> {
    p.validate()?;
    check_support(p, seq)?;
    let rhs = theorem1_rhs(p, seq.norm_l1(), seq.norm_sup(), p.x.count())?;
    theorem_common(p, seq, Target::Thm1, rhs)
}

/// The f = 0 case with I = (0, r]; the phase in `p` must be zero.
pub fn check_corollary(p: &TheoremParams, seq: &CoeffSeq) -> Result<BoundReport> {
    p.validate()?;
    if !p.f.is_zero() {
        return Err(Error::InvalidParams("corollary check needs f = 0".into()));
    }
    check_support(p, seq)?;
    let rhs = corollary_rhs(p, seq.norm_l1(), seq.norm_sup(), p.x.count())?;
    theorem_common(p, seq, Target::Cor, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftParams {
    pub u: u64,
    pub v: u64,
    pub ucond_ok: bool,
    pub uvcond_ok: bool,
}

/// Least integer v with v^n >= r.
pub fn ceil_root(r: u64, n: u32) -> u64 {
    let fits = |v: u64| (v as u128).checked_pow(n).is_none_or(|p| p >= r as u128);
    let mut v = (r as f64).powf(1.0 / n as f64).ceil() as u64;
    while v > 1 && fits(v - 1) {
        v -= 1;
    }
    while !fits(v) {
        v += 1;
    }
    v
}

/// V = ceil(r^(1/n)) and U = floor(min(1 / (L F V), Y / V)), dividing by the
/// integer V so that U V <= min(1 / (F L), Y) holds after rounding.
pub fn choose_shift_params(p: &TheoremParams) -> Result<ShiftParams> {
    let r = p.r();
    let v = ceil_root(r, p.n);
    let y = p.interval.len;
    let lf = p.l_len() as f64 * p.big_f();
    let mut u = y / v;
    if lf > 0.0 {
        let cap = (1.0 / (lf * v as f64)).floor();
        if cap < u as f64 {
            u = cap as u64;
        }
    }
    if u < 1 || v >= r {
        return Err(Error::DegenerateChoice(format!(
            "U = {u}, V = {v} at r = {r}, n = {}, Y = {y}",
            p.n
        )));
    }
    let ucond_ok = u as f64 >= (r as f64).powf(0.25 + p.eps);
    let uv = (u * v) as f64;
    let uv_cap = if lf > 0.0 { (1.0 / lf).min(y as f64) } else { y as f64 };
    Ok(ShiftParams {
        u,
        v,
        ucond_ok,
        uvcond_ok: uv <= uv_cap,
    })
}

/// (V/2, V] as integers.
pub fn vee_set(v: u64) -> Vec<i64> {
    (v / 2 + 1..=v).map(|x| x as i64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Report {
    pub count: usize,
    pub half_u: f64,
    pub char_sum: i64,
    pub ucond_ok: bool,
}

impl Prop1Report {
    pub fn to_report(&self, r: u64, u: u64, eps: f64) -> BoundReport {
        BoundReport::new(Target::Prop1, self.count as f64, self.half_u)
            .param("r", r)
            .param("U", u)
            .param("eps", eps)
            .param("char_sum", self.char_sum)
            .param("fraction", self.count as f64 / u as f64)
            .flag("ucond_ok", self.ucond_ok)
    }
}

pub fn check_prop1(upper: u64, ctx: &PrimeContext, eps: f64) -> Result<Prop1Report> {
    let count = ctx.qr_window(upper)?.len();
    let char_sum = char_window_sum(upper, ctx)?;
    Ok(Prop1Report {
        count,
        half_u: upper as f64 / 2.0,
        char_sum,
        ucond_ok: upper as f64 >= (ctx.modulus() as f64).powf(0.25 + eps),
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams("eps must be positive".into()))
    }
}

/// Second moment of nu against ‖α‖∞² U X Y (U X / r + 1) r^eps.
pub fn check_prop2(
    ctx: &PrimeContext,
    j: i64,
    alpha: &CoeffSeq,
    upper: u64,
    start: i64,
    len: u64,
    eps: f64,
) -> Result<BoundReport> {
    check_eps(eps)?;
    if alpha.is_empty() {
        return Err(Error::InvalidParams("X is empty".into()));
    }
    if alpha.support().iter().any(|&l| ctx.reduce(l) == 0) {
        return Err(Error::InvalidParams("X must avoid 0 mod r".into()));
    }
    let window = ctx.qr_window(upper)?;
    let table = build_nu(ctx, j, alpha, &window, start, len)?;
    let (m1, m2) = nu_moments(&table);
    let r = ctx.modulus() as f64;
    let (u, x, y) = (upper as f64, alpha.len() as f64, len as f64);
    let rhs = alpha.norm_sup().powi(2) * u * x * y * (u * x / r + 1.0) * r.powf(eps);
    let expected_m1 = alpha.norm_l1() * window.len() as f64 * (3 * len + 1) as f64;
    let first_ok = (m1 - expected_m1).abs() <= 1e-12 * expected_m1.max(1.0);
    Ok(BoundReport::new(Target::Prop2, m2, rhs)
        .param("r", ctx.modulus())
        .param("j", j)
        .param("U", upper)
        .param("X", alpha.len())
        .param("A", start)
        .param("Y", len)
        .param("eps", eps)
        .param("window", window.len())
        .param("m1", m1)
        .flag("first_moment_ok", first_ok))
}

/// The quadruple count against X² U² / r + X U r^eps.
pub fn check_cishz(ctx: &PrimeContext, xs: &[i64], upper: u64, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    let window = ctx.qr_window(upper)?;
    let count = quad_congruence_count(ctx, xs, &window)?;
    let r = ctx.modulus() as f64;
    let (x, u) = (xs.len() as f64, upper as f64);
    let rhs = x * x * u * u / r + x * u * r.powf(eps);
    Ok(BoundReport::new(Target::Cishz, count as f64, rhs)
        .param("r", ctx.modulus())
        .param("U", upper)
        .param("X", xs.len())
        .param("eps", eps)
        .param("window", window.len()))
}

/// Root-congruence solution count against V^(2n) + r V^n for a subset of (V/2, V].
pub fn check_prop3(
    ctx: &PrimeContext,
    j: i64,
    n: u32,
    v: u64,
    vs: &[i64],
    xi: f64,
    budget: u128,
) -> Result<BoundReport> {
    let r = ctx.modulus();
    if v < 1 || v >= r {
        return Err(Error::InvalidParams(format!("need 1 <= V < r (V = {v})")));
    }
    if vs.iter().any(|&x| x <= (v / 2) as i64 || x > v as i64) {
        return Err(Error::InvalidParams("V subset must lie in (V/2, V]".into()));
    }
    let count = prop3_solution_count(ctx, j, n, vs, xi, budget)?;
    let vf = v as f64;
    let rhs = vf.powi(2 * n as i32) + r as f64 * vf.powi(n as i32);
    Ok(BoundReport::new(Target::Prop3, count.raw_count as f64, rhs)
        .param("r", r)
        .param("j", j)
        .param("n", n)
        .param("V", v)
        .param("k", vs.len())
        .param("xi", xi)
        .param("moment_lhs", r as f64 * count.phase_weighted.norm()))
}

/// |Σ|² against (L M / H) ‖α‖₂² ‖β‖∞² 𝒜 with 𝒜 = sum of A(d) over |d| <= D.
#[allow(clippy::too_many_arguments)]
pub fn check_lemma1(
    ctx: &PrimeContext,
    j: i64,
    l: u64,
    m: u64,
    h: u64,
    alpha: &CoeffSeq,
    beta: &CoeffSeq,
    f: &PhaseFn,
    eps: f64,
) -> Result<BoundReport> {
    check_eps(eps)?;
    let r = ctx.modulus();
    let big_f = f.derivative_bound();
    if !(1..=r).contains(&l) || !(1..=r / 2).contains(&m) {
        return Err(Error::InvalidParams(format!(
            "need 1 <= L <= r and 1 <= M <= r/2 (L = {l}, M = {m})"
        )));
    }
    let lf = l as f64 * big_f;
    if lf > 1.0 {
        return Err(Error::InvalidParams(format!("F = {big_f} exceeds 1/L")));
    }
    let h_cap = if lf > 0.0 { (1.0 / lf).min(m as f64) } else { m as f64 };
    if h < 1 || h as f64 > h_cap {
        return Err(Error::InvalidParams(format!("need 1 <= H <= min(1/(LF), M), H = {h}")));
    }
    let sum = bilinear_interval_sum(ctx, j, l, m, alpha, beta, f)?;
    let lhs = sum.norm_sqr();
    let d = collision_window(r, l, eps)?;
    let table = CollisionTable::build(ctx, j, m, h)?;
    let cal_a = table.sum_within(d);
    let rhs = (l * m) as f64 / h as f64
        * alpha.norm_l2().powi(2)
        * beta.norm_sup().powi(2)
        * cal_a as f64;
    Ok(BoundReport::new(Target::Lemma1, lhs, rhs)
        .param("r", r)
        .param("j", j)
        .param("L", l)
        .param("M", m)
        .param("H", h)
        .param("D", d)
        .param("F", big_f)
        .param("eps", eps)
        .param("collisions", cal_a))
}

/// Σ over v in `vs` of e_r(λ √(j(μ - v))) e(ξ v), roots summed.
fn root_character_sum(ctx: &PrimeContext, jr: u64, lambda: u64, mu: u64, vs: &[i64], xi: f64) -> Complex64 {
    let r = ctx.modulus();
    sum_complex(vs.iter().flat_map(|&v| {
        let s = ctx.mul(jr, ctx.sub(mu, ctx.reduce(v)));
        let ph = unit_phase(xi * v as f64);
        ctx.sqrts_reduced(s)
            .iter()
            .map(move |k| char_r(ctx.mul(lambda, k), r) * ph)
            .collect::<Vec<_>>()
    }))
}

/// Σ over (λ, μ) in F_r² of |Σ_v e_r(λ √(j(μ - v))) e(ξ v)|^(2n), evaluated
/// term by term.
pub fn moment_sum_direct(ctx: &PrimeContext, j: i64, n: u32, vs: &[i64], xi: f64) -> Result<f64> {
    let jr = check_j(ctx, j)?;
    let r = ctx.modulus();
    Ok(sum_f64((0..r).flat_map(|lambda| {
        (0..r).map(move |mu| {
            root_character_sum(ctx, jr, lambda, mu, vs, xi)
                .norm_sqr()
                .powi(n as i32)
        })
    })))
}

/// Σ(y) = Σ over (λ, μ) of ν(λ, μ) |Σ_v e_r(λ √(j(μ - v))) e(ξ v)|, paired
/// with its Hölder majorant m1^(1-1/n) m2^(1/2n) (moment sum)^(1/2n).
pub fn holder_chain(
    ctx: &PrimeContext,
    j: i64,
    n: u32,
    table: &NuTable,
    vs: &[i64],
    xi: f64,
) -> Result<(f64, f64)> {
    let jr = check_j(ctx, j)?;
    if table.modulus() != ctx.modulus() {
        return Err(Error::InvalidParams("table modulus mismatch".into()));
    }
    let sigma = sum_f64(
        table
            .nonzero()
            .into_iter()
            .map(|((lambda, mu), w)| w * root_character_sum(ctx, jr, lambda, mu, vs, xi).norm()),
    );
    let (m1, m2) = nu_moments(table);
    let moment = moment_sum_direct(ctx, j, n, vs, xi)?;
    let nf = n as f64;
    let majorant = m1.powf(1.0 - 1.0 / nf) * m2.powf(1.0 / (2.0 * nf)) * moment.powf(1.0 / (2.0 * nf));
    Ok((sigma, majorant))
}

/// The shift-by-uv average: (1 / (|𝒰| |𝒱|)) Σ_u Σ_v of the sum reindexed by
/// m -> m - uv. Requires uv <= Y for every pair.
pub fn shift_average_sum(
    ctx: &PrimeContext,
    j: i64,
    alpha: &CoeffSeq,
    interval: &IntervalSpec,
    f: &PhaseFn,
    us: &[u64],
    vs: &[i64],
) -> Result<Complex64> {
    if us.is_empty() || vs.is_empty() {
        return Err(Error::InvalidParams("empty shift sets".into()));
    }
    let mut terms = Vec::with_capacity(us.len() * vs.len());
    for &u in us {
        for &v in vs {
            terms.push(shifted_set_sum(ctx, j, alpha, interval, f, u as i64 * v)?);
        }
    }
    Ok(sum_complex(terms) / (us.len() * vs.len()) as f64)
}
