//! Sweep configuration: `key = value` lines, `#` comments, comma lists.
//!
//! Size parameters are scale expressions resolved per grid point:
//! an integer, `r^e` (ceiling), `r^(a/n)`, `r^(a/2n)`, `r/k` (floor), or
//! `ycond` for the least integer at least r^(1/n + 1/4 + eps).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::counting::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::field::{is_prime, next_prime};
use crate::harness::seqgen::SeqTag;
use crate::verify::{ceil_root, Target, DEFAULT_C_ASSERT, DEFAULT_EPS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleExpr {
    Int(i64),
    /// r^(num / (den_n * n)) when den_n > 0, else r^num.
    Pow { num: f64, den_n: u32 },
    Div(u64),
    YCond,
}

impl ScaleExpr {
    pub fn resolve(&self, r: u64, n: u32, eps: f64) -> i64 {
        match *self {
            ScaleExpr::Int(v) => v,
            ScaleExpr::Div(k) => (r / k) as i64,
            ScaleExpr::Pow { num, den_n } => {
                if den_n > 0 && num == 1.0 {
                    return ceil_root(r, den_n * n.max(1)) as i64;
                }
                let e = if den_n > 0 { num / (den_n * n.max(1)) as f64 } else { num };
                ceil_tolerant((r as f64).powf(e))
            }
            ScaleExpr::YCond => {
                ceil_tolerant((r as f64).powf(1.0 / n.max(1) as f64 + 0.25 + eps))
            }
        }
    }
}

fn ceil_tolerant(x: f64) -> i64 {
    let near = x.round();
    if (x - near).abs() <= 1e-9 * x.abs().max(1.0) {
        near as i64
    } else {
        x.ceil() as i64
    }
}

impl fmt::Display for ScaleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScaleExpr::Int(v) => write!(f, "{v}"),
            ScaleExpr::Div(k) => write!(f, "r/{k}"),
            ScaleExpr::Pow { num, den_n: 0 } => write!(f, "r^{num}"),
            ScaleExpr::Pow { num, den_n: 1 } => write!(f, "r^({num}/n)"),
            ScaleExpr::Pow { num, den_n } => write!(f, "r^({num}/{den_n}n)"),
            ScaleExpr::YCond => f.write_str("ycond"),
        }
    }
}

impl FromStr for ScaleExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad scale expression '{s}'"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "ycond" {
            return Ok(ScaleExpr::YCond);
        }
        if let Ok(v) = t.parse::<i64>() {
            return Ok(ScaleExpr::Int(v));
        }
        if let Some(k) = t.strip_prefix("r/") {
            let k: u64 = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            return Ok(ScaleExpr::Div(k));
        }
        if t == "r" {
            return Ok(ScaleExpr::Pow { num: 1.0, den_n: 0 });
        }
        let e = t.strip_prefix("r^").ok_or_else(bad)?;
        let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
        let (num, den_n) = match e.split_once('/') {
            None => (e.parse::<f64>().map_err(|_| bad())?, 0),
            Some((a, b)) => {
                let num = a.parse::<f64>().map_err(|_| bad())?;
                let den = b.strip_suffix('n').ok_or_else(bad)?;
                let den_n = if den.is_empty() { 1 } else { den.parse::<u32>().map_err(|_| bad())? };
                if den_n == 0 {
                    return Err(bad());
                }
                (num, den_n)
            }
        };
        if !num.is_finite() {
            return Err(bad());
        }
        Ok(ScaleExpr::Pow { num, den_n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhaseKind {
    Zero,
    Linear,
    Power,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Zero => "zero",
            PhaseKind::Linear => "linear",
            PhaseKind::Power => "power",
        }
    }
}

impl FromStr for PhaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(PhaseKind::Zero),
            "linear" => Ok(PhaseKind::Linear),
            "power" => Ok(PhaseKind::Power),
            _ => Err(Error::Config(format!("unknown phase '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubsetKind {
    Full,
    Random,
}

impl SubsetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SubsetKind::Full => "full",
            SubsetKind::Random => "random",
        }
    }
}

impl FromStr for SubsetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SubsetKind::Full),
            "random" => Ok(SubsetKind::Random),
            _ => Err(Error::Config(format!("unknown subset '{s}'"))),
        }
    }
}

/// Scale-expression axes, in CSV column order.
pub const SIZE_KEYS: [&str; 10] = ["X", "Y", "A", "L", "M", "H", "U", "V", "Q", "N"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub target: Target,
    pub primes: Vec<u64>,
    pub n: Vec<u32>,
    pub j: i64,
    pub gens: Vec<SeqTag>,
    pub seeds: Vec<u64>,
    pub eps: Vec<f64>,
    pub xi: Vec<f64>,
    pub phases: Vec<PhaseKind>,
    pub subsets: Vec<SubsetKind>,
    pub sizes: BTreeMap<&'static str, Vec<ScaleExpr>>,
    pub b: Vec<i64>,
    pub grid_size: usize,
    pub c_assert: f64,
    pub budget: u128,
    pub output: Option<PathBuf>,
    pub record_timing: bool,
}

fn exprs(list: &[&str]) -> Vec<ScaleExpr> {
    list.iter().map(|s| s.parse().expect("valid default")).collect()
}

impl SweepConfig {
    /// The published default grid for `target`.
    pub fn defaults(target: Target) -> Self {
        let mut sizes = BTreeMap::new();
        let mut primes = vec![101, 211, 401, 809, 1009];
        let mut phases = vec![PhaseKind::Zero];
        match target {
            Target::Thm1 => {
                sizes.insert("X", exprs(&["r^0.5", "r/4"]));
                sizes.insert("Y", exprs(&["ycond", "r^0.75"]));
                sizes.insert("A", exprs(&["0", "r/3"]));
                phases = vec![PhaseKind::Zero, PhaseKind::Linear];
            }
            Target::Cor => {
                sizes.insert("X", exprs(&["r^0.5", "r/4"]));
                sizes.insert("Y", exprs(&["ycond", "r^0.75"]));
                sizes.insert("A", exprs(&["0"]));
            }
            Target::Prop1 => {
                sizes.insert("U", exprs(&["r^0.45"]));
            }
            Target::Prop2 => {
                sizes.insert("X", exprs(&["r^0.5", "r/4"]));
                sizes.insert("Y", exprs(&["r^0.5", "r^0.75"]));
                sizes.insert("A", exprs(&["0"]));
                sizes.insert("U", exprs(&["r^0.3", "r^0.5"]));
            }
            Target::Prop3 => {
                sizes.insert("V", exprs(&["r^(1/2n)", "r^(1/n)"]));
            }
            Target::Lemma1 => {
                sizes.insert("L", exprs(&["r^0.25", "r^0.5"]));
                sizes.insert("M", exprs(&["r/2"]));
                sizes.insert("H", exprs(&["r^0.25", "r^0.5"]));
                phases = vec![PhaseKind::Zero, PhaseKind::Linear];
            }
            Target::Cishz => {
                sizes.insert("X", exprs(&["r^0.5", "r/4"]));
                sizes.insert("U", exprs(&["r^0.3", "r^0.5"]));
            }
            Target::Sieve => {
                sizes.insert("Q", exprs(&["4", "8", "16"]));
                sizes.insert("N", exprs(&["64", "512", "4096"]));
                primes = vec![];
            }
            Target::Pscan => {
                sizes.insert("Q", exprs(&["16", "64"]));
                sizes.insert("N", exprs(&["4096"]));
                primes = vec![1, 2, 3];
            }
        }
        SweepConfig {
            target,
            primes,
            n: vec![1, 2, 3],
            j: 1,
            gens: SeqTag::ALL.to_vec(),
            seeds: (1..=5).collect(),
            eps: vec![DEFAULT_EPS],
            xi: vec![0.0, 0.3],
            phases,
            subsets: vec![SubsetKind::Full, SubsetKind::Random],
            sizes,
            b: vec![1],
            grid_size: 16,
            c_assert: DEFAULT_C_ASSERT,
            budget: DEFAULT_BUDGET,
            output: None,
            record_timing: false,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a config; `target` selects the defaults every other key overrides.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            entries.push((no + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let target = entries
            .iter()
            .find(|e| e.1 == "target")
            .ok_or_else(|| Error::Config("missing 'target'".into()))?
            .2
            .parse::<Target>()
            .map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self::defaults(target);
        let mut seen = Vec::new();
        for (no, key, value) in &entries {
            if seen.contains(key) {
                return Err(Error::Config(format!("line {no}: duplicate key '{key}'")));
            }
            seen.push(key.clone());
            cfg.apply(key, value)
                .map_err(|e| Error::Config(format!("line {no}: {key}: {}", strip_kind(e))))?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let list = || -> Vec<&str> {
            value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
        };
        match key {
            "target" => {}
            "primes" => self.primes = parse_list(&list())?,
            "prime_range" => self.primes = parse_prime_range(value)?,
            "n" => self.n = parse_int_list(&list())?,
            "j" => self.j = parse_one(value)?,
            "gen" | "gens" => {
                self.gens = list().into_iter().map(str::parse).collect::<Result<_>>()?
            }
            "seed" | "seeds" => self.seeds = parse_int_list(&list())?,
            "eps" => self.eps = parse_list(&list())?,
            "xi" => self.xi = parse_list(&list())?,
            "phase" => {
                self.phases = list().into_iter().map(str::parse).collect::<Result<_>>()?
            }
            "subset" => {
                self.subsets = list().into_iter().map(str::parse).collect::<Result<_>>()?
            }
            "b" => self.b = parse_list(&list())?,
            "grid_size" => self.grid_size = parse_one(value)?,
            "C_assert" | "c_assert" => self.c_assert = parse_one(value)?,
            "budget" => self.budget = parse_budget(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "record_timing" => self.record_timing = parse_one(value)?,
            k => match SIZE_KEYS.iter().find(|&&s| s == k) {
                Some(&name) => {
                    let v = list().into_iter().map(str::parse).collect::<Result<Vec<ScaleExpr>>>()?;
                    self.sizes.insert(name, v);
                }
                None => return Err(Error::Config(format!("unknown key '{k}'"))),
            },
        }
        Ok(())
    }

    /// Rejects empty axes and bad scalar settings.
    pub fn check(&self) -> Result<()> {
        let empty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::Config(format!("'{name}' is empty")))
            } else {
                Ok(())
            }
        };
        if self.target != Target::Sieve {
            empty("primes", self.primes.len())?;
        }
        empty("n", self.n.len())?;
        empty("gen", self.gens.len())?;
        empty("seed", self.seeds.len())?;
        empty("eps", self.eps.len())?;
        empty("xi", self.xi.len())?;
        empty("phase", self.phases.len())?;
        empty("subset", self.subsets.len())?;
        empty("b", self.b.len())?;
        for (k, v) in &self.sizes {
            empty(k, v.len())?;
        }
        if !(self.c_assert > 0.0) {
            return Err(Error::Config("C_assert must be positive".into()));
        }
        if self.xi.iter().chain(&self.eps).any(|x| !x.is_finite()) {
            return Err(Error::Config("eps and xi must be finite".into()));
        }
        Ok(())
    }

    pub fn size(&self, key: &str) -> &[ScaleExpr] {
        self.sizes.get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn strip_kind(e: Error) -> String {
    match e {
        Error::Config(s) => s,
        other => other.to_string(),
    }
}

fn parse_one<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse '{s}'")))
}

fn parse_list<T: FromStr>(items: &[&str]) -> Result<Vec<T>> {
    items.iter().map(|s| parse_one(s)).collect()
}

/// Like `parse_list`, but items may also be inclusive ranges `lo..hi`.
fn parse_int_list<T: FromStr + Into<u64> + TryFrom<u64>>(items: &[&str]) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in items {
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi): (T, T) = (parse_one(lo.trim())?, parse_one(hi.trim())?);
                let (lo, hi) = (lo.into(), hi.into());
                if lo > hi || hi - lo > 1 << 20 {
                    return Err(Error::Config(format!("bad range '{item}'")));
                }
                for v in lo..=hi {
                    out.push(T::try_from(v).map_err(|_| Error::Config(format!("bad range '{item}'")))?);
                }
            }
            None => out.push(parse_one(item)?),
        }
    }
    Ok(out)
}

/// Integer or `a^b`, optionally times another such term, e.g. `5e9`, `2^32`.
fn parse_budget(s: &str) -> Result<u128> {
    let t = s.trim();
    if let Some((b, e)) = t.split_once('^') {
        let b: u128 = parse_one(b)?;
        let e: u32 = parse_one(e)?;
        return b
            .checked_pow(e)
            .ok_or_else(|| Error::Config(format!("budget '{s}' overflows")));
    }
    if let Ok(v) = t.parse::<u128>() {
        return Ok(v);
    }
    let f: f64 = parse_one(t)?;
    if f >= 1.0 && f.is_finite() && f < 1e38 {
        Ok(f as u128)
    } else {
        Err(Error::Config(format!("bad budget '{s}'")))
    }
}

/// `lo..hi` gives every prime in [lo, hi]; `above:lo:count` gives the
/// `count` smallest primes greater than lo.
fn parse_prime_range(s: &str) -> Result<Vec<u64>> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("above:") {
        let (lo, count) = rest
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("bad prime range '{s}'")))?;
        let (lo, count): (u64, usize) = (parse_one(lo)?, parse_one(count)?);
        let mut out = Vec::with_capacity(count);
        let mut p = lo;
        while out.len() < count {
            p = next_prime(p + 1);
            out.push(p);
        }
        return Ok(out);
    }
    let (lo, hi) = t
        .split_once("..")
        .ok_or_else(|| Error::Config(format!("bad prime range '{s}'")))?;
    let (lo, hi): (u64, u64) = (parse_one(lo)?, parse_one(hi)?);
    Ok((lo..=hi).filter(|&p| is_prime(p)).collect())
}
