//! Exact Fourier–Motzkin elimination over rate variables.
//!
//! Systems are rows `coeff · x ≤ bound` with [`BigRational`] entries. Each
//! elimination step pairs every row with a positive coefficient on the
//! eliminated variable against every row with a negative one; rows without the
//! variable pass through. Redundant output rows are pruned by duplicate and
//! parallel-row domination, and during multi-variable elimination by the
//! ancestor-count rule (a row built from more than `k + 1` input rows after
//! `k` eliminations is implied by the others).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{mac_sum_rate_closed_form, ChannelParams, PowerAllocation};

/// Abort an elimination once a single step would produce more rows than this.
pub const ROW_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<BigRational>,
    pub bound: BigRational,
}

impl Row {
    pub fn new(coeffs: Vec<BigRational>, bound: BigRational) -> Self {
        Self { coeffs, bound }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn lhs(&self, x: &[BigRational]) -> BigRational {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn holds_at(&self, x: &[BigRational]) -> bool {
        self.lhs(x) <= self.bound
    }

    /// Positive multiple with the first nonzero coefficient of magnitude one.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            if !lead.is_one() {
                for c in &mut self.coeffs {
                    *c /= &lead;
                }
                self.bound /= &lead;
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<String>,
    rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Result<Self> {
        let variables: Vec<String> = variables.into_iter().map(Into::into).collect();
        for (i, v) in variables.iter().enumerate() {
            if v.is_empty() || variables[..i].contains(v) {
                return Err(Error::Config(format!("variable names must be unique and non-empty: `{v}`")));
            }
        }
        Ok(Self { variables, rows: Vec::new() })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn index_of(&self, var: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn push(&mut self, row: Row) -> Result<()> {
        if row.coeffs.len() != self.variables.len() {
            return Err(Error::Config(format!(
                "row has {} coefficients, system has {} variables",
                row.coeffs.len(),
                self.variables.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds `Σ terms ≤ bound`, with terms given by variable name.
    pub fn push_terms(&mut self, terms: &[(&str, BigRational)], bound: BigRational) -> Result<()> {
        let mut coeffs = vec![BigRational::zero(); self.variables.len()];
        for (name, c) in terms {
            coeffs[self.index_of(name)?] += c;
        }
        self.push(Row::new(coeffs, bound))
    }

    /// Appends a variable with zero coefficient in every existing row.
    pub fn add_variable(&mut self, name: &str) -> Result<()> {
        if self.variables.iter().any(|v| v == name) {
            return Err(Error::Config(format!("variable `{name}` already present")));
        }
        self.variables.push(name.to_string());
        for r in &mut self.rows {
            r.coeffs.push(BigRational::zero());
        }
        Ok(())
    }

    /// Copy with `-x ≤ 0` added for every variable.
    pub fn with_nonnegativity(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.variables.len() {
            let mut coeffs = vec![BigRational::zero(); self.variables.len()];
            coeffs[i] = -BigRational::one();
            out.rows.push(Row::new(coeffs, BigRational::zero()));
        }
        out
    }

    pub fn is_satisfied_by(&self, x: &[BigRational]) -> bool {
        self.rows.iter().all(|r| r.holds_at(x))
    }

    /// Rows as a set of normalized `(coeffs, bound)` pairs, for comparing
    /// systems up to positive row scaling and row order.
    pub fn canonical_rows(&self) -> Vec<Row> {
        let mut rows: Vec<Row> = self.rows.iter().cloned().map(Row::normalized).collect();
        rows.sort_by(|a, b| a.coeffs.cmp(&b.coeffs).then_with(|| a.bound.cmp(&b.bound)));
        rows.dedup();
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pruning {
    /// Among parallel rows keep only the tightest.
    pub domination: bool,
    /// Drop rows with more than `k + 1` ancestors after `k` eliminations.
    pub ancestor_rule: bool,
}

impl Default for Pruning {
    fn default() -> Self {
        Self { domination: true, ancestor_rule: true }
    }
}

impl Pruning {
    /// Exact duplicates are still removed.
    pub const NONE: Pruning = Pruning { domination: false, ancestor_rule: false };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionResult {
    pub eliminated: Vec<String>,
    pub system: LinearSystem,
    pub redundant_removed: usize,
}

#[derive(Clone)]
struct Tracked {
    row: Row,
    ancestors: Vec<u64>,
}

impl Tracked {
    fn count(&self) -> u32 {
        self.ancestors.iter().map(|w| w.count_ones()).sum()
    }

    fn union(&self, other: &Tracked) -> Vec<u64> {
        self.ancestors.iter().zip(&other.ancestors).map(|(a, b)| a | b).collect()
    }
}

fn step(rows: Vec<Tracked>, idx: usize, done: usize, pruning: Pruning) -> Result<(Vec<Tracked>, usize)> {
    let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
    for t in rows {
        let a = &t.row.coeffs[idx];
        if a.is_positive() {
            pos.push(t);
        } else if a.is_negative() {
            neg.push(t);
        } else {
            keep.push(t);
        }
    }
    let produced = pos.len() * neg.len() + keep.len();
    if produced > ROW_LIMIT {
        return Err(Error::RowExplosion { rows: produced, limit: ROW_LIMIT });
    }
    let mut removed = 0;
    for p in &pos {
        for n in &neg {
            let ancestors = p.union(n);
            let t = Tracked {
                row: Row::new(Vec::new(), BigRational::zero()),
                ancestors,
            };
            if pruning.ancestor_rule && t.count() as usize > done + 2 {
                removed += 1;
                continue;
            }
            let (alpha, beta) = (-&n.row.coeffs[idx], &p.row.coeffs[idx]);
            let coeffs = p
                .row
                .coeffs
                .iter()
                .zip(&n.row.coeffs)
                .map(|(a, b)| a * &alpha + b * beta)
                .collect();
            let bound = &p.row.bound * &alpha + &n.row.bound * beta;
            keep.push(Tracked { row: Row::new(coeffs, bound).normalized(), ..t });
        }
    }
    for t in &mut keep {
        t.row.coeffs.remove(idx);
    }
    let (kept, pruned) = prune(keep, pruning);
    Ok((kept, removed + pruned))
}

fn prune(rows: Vec<Tracked>, pruning: Pruning) -> (Vec<Tracked>, usize) {
    let before = rows.len();
    let mut out: Vec<Tracked> = Vec::with_capacity(rows.len());
    if pruning.domination {
        let mut tightest: HashMap<Vec<BigRational>, usize> = HashMap::new();
        for t in rows {
            let t = Tracked { row: t.row.normalized(), ..t };
            match tightest.get(&t.row.coeffs) {
                Some(&i) => {
                    if t.row.bound < out[i].row.bound {
                        out[i] = t;
                    }
                }
                None => {
                    tightest.insert(t.row.coeffs.clone(), out.len());
                    out.push(t);
                }
            }
        }
    } else {
        let mut seen: HashMap<Row, ()> = HashMap::new();
        for t in rows {
            let t = Tracked { row: t.row.normalized(), ..t };
            if seen.insert(t.row.clone(), ()).is_none() {
                out.push(t);
            }
        }
    }
    // Trivially true constant rows are dropped unless nothing else remains.
    let non_trivial = out.iter().filter(|t| !(t.row.is_constant() && !t.row.bound.is_negative())).count();
    if non_trivial > 0 {
        out.retain(|t| !(t.row.is_constant() && !t.row.bound.is_negative()));
    } else if out.len() > 1 {
        out.sort_by(|a, b| a.row.bound.cmp(&b.row.bound));
        out.truncate(1);
    }
    let removed = before - out.len();
    (out, removed)
}

fn track(sys: &LinearSystem) -> Vec<Tracked> {
    let words = sys.rows.len().div_ceil(64).max(1);
    sys.rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut ancestors = vec![0u64; words];
            ancestors[i / 64] |= 1 << (i % 64);
            Tracked { row: r.clone(), ancestors }
        })
        .collect()
}

/// Projects out one variable.
pub fn fme_eliminate(sys: &LinearSystem, var: &str) -> Result<ProjectionResult> {
    fme_eliminate_with(sys, var, Pruning::default())
}

pub fn fme_eliminate_with(sys: &LinearSystem, var: &str, pruning: Pruning) -> Result<ProjectionResult> {
    eliminate_sequence(sys, &[var], pruning)
}

/// Eliminates `vars` in the given order.
pub fn eliminate_sequence(sys: &LinearSystem, vars: &[&str], pruning: Pruning) -> Result<ProjectionResult> {
    let (mut stages, removed) = elimination_stages(sys, vars, pruning)?;
    Ok(ProjectionResult {
        eliminated: vars.iter().map(|v| v.to_string()).collect(),
        system: stages.pop().expect("input stage"),
        redundant_removed: removed,
    })
}

/// The input followed by the system after each elimination.
fn elimination_stages(sys: &LinearSystem, vars: &[&str], pruning: Pruning) -> Result<(Vec<LinearSystem>, usize)> {
    let mut variables = sys.variables.clone();
    let mut rows = track(sys);
    let mut removed = 0;
    let mut stages = vec![sys.clone()];
    for (done, var) in vars.iter().enumerate() {
        let idx = variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let (next, r) = step(rows, idx, done, pruning)?;
        rows = next;
        removed += r;
        variables.remove(idx);
        stages.push(LinearSystem {
            variables: variables.clone(),
            rows: rows.iter().map(|t| t.row.clone()).collect(),
        });
    }
    Ok((stages, removed))
}

/// Eliminates every variable not in `keep`, greedily choosing the variable
/// with the fewest generated pairs at each step.
pub fn project_onto(sys: &LinearSystem, keep: &[&str], pruning: Pruning) -> Result<ProjectionResult> {
    for k in keep {
        sys.index_of(k)?;
    }
    let mut variables = sys.variables.clone();
    let mut rows = track(sys);
    let mut removed = 0;
    let mut eliminated = Vec::new();
    loop {
        let candidates = variables.iter().enumerate().filter(|(_, v)| !keep.contains(&v.as_str()));
        let Some((idx, _)) = candidates.min_by_key(|&(i, _)| {
            let pos = rows.iter().filter(|t| t.row.coeffs[i].is_positive()).count();
            let neg = rows.iter().filter(|t| t.row.coeffs[i].is_negative()).count();
            pos * neg
        }) else {
            break;
        };
        let (next, r) = step(rows, idx, eliminated.len(), pruning)?;
        rows = next;
        removed += r;
        eliminated.push(variables.remove(idx));
    }
    Ok(ProjectionResult {
        eliminated,
        system: LinearSystem { variables, rows: rows.into_iter().map(|t| t.row).collect() },
        redundant_removed: removed,
    })
}

/// Extends a point of the projection onto the kept variables back to a
/// feasible point of `sys`, choosing each eliminated coordinate as the
/// midpoint of its admissible interval (or its finite end). `None` if some
/// interval is empty.
pub fn extend_point(sys: &LinearSystem, eliminated: &[&str], point: &[BigRational]) -> Result<Option<Vec<BigRational>>> {
    // Systems before each elimination, innermost last. Pruning only drops
    // implied rows, so each stage still describes the same projection.
    let (stages, _) = elimination_stages(sys, eliminated, Pruning::default())?;
    let mut values: BTreeMap<String, BigRational> = BTreeMap::new();
    let kept = stages.last().map(|s| s.variables.clone()).unwrap_or_default();
    if kept.len() != point.len() {
        return Err(Error::Config(format!("point has {} coordinates, projection has {}", point.len(), kept.len())));
    }
    for (v, x) in kept.iter().zip(point) {
        values.insert(v.clone(), x.clone());
    }
    if !stages.last().is_some_and(|s| s.is_satisfied_by(point)) {
        return Ok(None);
    }
    for (k, v) in eliminated.iter().enumerate().rev() {
        let stage = &stages[k];
        let idx = stage.index_of(v)?;
        let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
        for r in &stage.rows {
            let a = &r.coeffs[idx];
            let rest: BigRational = r
                .coeffs
                .iter()
                .zip(&stage.variables)
                .filter(|(_, name)| name.as_str() != *v)
                .map(|(c, name)| c * values.get(name).cloned().unwrap_or_else(BigRational::zero))
                .sum();
            let slack = &r.bound - rest;
            if a.is_positive() {
                let b = slack / a;
                hi = Some(hi.map_or(b.clone(), |h| h.min(b)));
            } else if a.is_negative() {
                let b = slack / a;
                lo = Some(lo.map_or(b.clone(), |l| l.max(b)));
            } else if slack.is_negative() {
                return Ok(None);
            }
        }
        let x = match (lo, hi) {
            (Some(l), Some(h)) if l > h => return Ok(None),
            (Some(l), Some(h)) => (l + h) / BigRational::from_integer(2.into()),
            (Some(l), None) => l,
            (None, Some(h)) => h,
            (None, None) => BigRational::zero(),
        };
        values.insert(v.to_string(), x);
    }
    Ok(Some(sys.variables.iter().map(|v| values[v].clone()).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumRate {
    Bounded(BigRational),
    Unbounded,
    Infeasible,
}

impl SumRate {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            SumRate::Bounded(v) => Some(v),
            _ => None,
        }
    }
}

/// Maximum of `Σ objective` over the system, by adjoining `s = Σ objective`
/// and eliminating everything else.
pub fn max_sum_rate(sys: &LinearSystem, objective: &[&str]) -> Result<SumRate> {
    max_sum_rate_with(sys, objective, Pruning::default())
}

pub fn max_sum_rate_with(sys: &LinearSystem, objective: &[&str], pruning: Pruning) -> Result<SumRate> {
    let mut s_name = String::from("s");
    while sys.variables.contains(&s_name) {
        s_name.push('_');
    }
    let mut ext = sys.clone();
    ext.add_variable(&s_name)?;
    let mut terms: Vec<(&str, BigRational)> = objective.iter().map(|v| (*v, BigRational::one())).collect();
    terms.push((&s_name, -BigRational::one()));
    ext.push_terms(&terms, BigRational::zero())?;
    let negated: Vec<(&str, BigRational)> = terms.iter().map(|(v, c)| (*v, -c)).collect();
    ext.push_terms(&negated, BigRational::zero())?;

    let projected = project_onto(&ext, &[&s_name], pruning)?.system;
    let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
    for r in projected.rows() {
        let a = &r.coeffs[0];
        if a.is_zero() {
            if r.bound.is_negative() {
                return Ok(SumRate::Infeasible);
            }
        } else {
            let b = &r.bound / a;
            if a.is_positive() {
                hi = Some(hi.map_or(b.clone(), |h| h.min(b)));
            } else {
                lo = Some(lo.map_or(b.clone(), |l| l.max(b)));
            }
        }
    }
    Ok(match (lo, hi) {
        (Some(l), Some(h)) if l > h => SumRate::Infeasible,
        (_, Some(h)) => SumRate::Bounded(h),
        (_, None) => SumRate::Unbounded,
    })
}

/// Exact binary value of a finite float.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Config(format!("non-finite value {x}")))
}

/// The six-row MAC system over `(R0, R1, R2)` for bounds `[a, b, c, d, e, f]`:
/// `R0 ≤ a, R1 ≤ b, R0+R1 ≤ c, R0 ≤ d, R2 ≤ e, R0+R2 ≤ f`.
pub fn mac_system(bounds: [BigRational; 6]) -> LinearSystem {
    let [a, b, c, d, e, f] = bounds;
    let mut sys = LinearSystem::new(["R0", "R1", "R2"]).expect("distinct names");
    let one = BigRational::one;
    let rows: [(&[&str], BigRational); 6] = [
        (&["R0"], a),
        (&["R1"], b),
        (&["R0", "R1"], c),
        (&["R0"], d),
        (&["R2"], e),
        (&["R0", "R2"], f),
    ];
    for (vars, bound) in rows {
        let terms: Vec<(&str, BigRational)> = vars.iter().map(|v| (*v, one())).collect();
        sys.push_terms(&terms, bound).expect("known variables");
    }
    sys
}

/// [`mac_system`] with bounds taken from the closed-form MAC rates.
pub fn mac_system_from_channel(ch: &ChannelParams, alloc: &PowerAllocation) -> Result<LinearSystem> {
    let m = mac_sum_rate_closed_form(ch, alloc)?;
    let [a, b, c, d, e, f] = m.as_array().map(rational_from_f64);
    Ok(mac_system([a?, b?, c?, d?, e?, f?]))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let mut first = true;
            for (c, v) in r.coeffs.iter().zip(&self.variables) {
                if c.is_zero() {
                    continue;
                }
                let mag = c.abs();
                let sign = match (first, c.is_negative()) {
                    (true, true) => "-",
                    (true, false) => "",
                    (false, true) => " - ",
                    (false, false) => " + ",
                };
                if mag.is_one() {
                    write!(f, "{sign}{v}")?;
                } else {
                    write!(f, "{sign}{}*{v}", fmt_rational(&mag))?;
                }
                first = false;
            }
            if first {
                write!(f, "0")?;
            }
            writeln!(f, " <= {}", fmt_rational(&r.bound))?;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int_val = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).ok()?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_val = if frac.is_empty() { BigInt::zero() } else { BigInt::from_str(frac).ok()? };
        let mag = BigRational::new(int_val.abs() * &scale + frac_val, scale);
        return Some(if negative { -mag } else { mag });
    }
    BigInt::from_str(s).ok().map(BigRational::from_integer)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

type ParsedRow = (Vec<(String, BigRational)>, BigRational);

fn parse_row(line: &str, lineno: usize) -> Result<ParsedRow> {
    let err = |message: String| Error::Parse { line: lineno, message };
    let (lhs, rhs) = line.split_once("<=").ok_or_else(|| err("expected `<=`".into()))?;
    let mut bound = parse_rational(rhs).ok_or_else(|| err(format!("bad bound `{}`", rhs.trim())))?;

    // Split the left side into signed terms.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut negative = false;
    let mut current = String::new();
    for ch in lhs.chars() {
        match ch {
            '+' | '-' if current.trim().is_empty() || current.trim_end().ends_with('*') => {
                if current.trim().is_empty() {
                    if ch == '-' {
                        negative = !negative;
                    }
                } else {
                    current.push(ch);
                }
            }
            '+' | '-' => {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            }
            _ => current.push(ch),
        }
    }
    if current.trim().is_empty() {
        return Err(err("missing term on left-hand side".into()));
    }
    terms.push((negative, current));

    let mut out: Vec<(String, BigRational)> = Vec::new();
    for (neg, t) in terms {
        let t = t.trim();
        let (coef, var) = match t.split_once('*') {
            Some((c, v)) => {
                let c = parse_rational(c).ok_or_else(|| err(format!("bad coefficient `{}`", c.trim())))?;
                (c, Some(v.trim()))
            }
            None if is_ident(t) => (BigRational::one(), Some(t)),
            None => (parse_rational(t).ok_or_else(|| err(format!("bad term `{t}`")))?, None),
        };
        let coef = if neg { -coef } else { coef };
        match var {
            Some(v) if is_ident(v) => out.push((v.to_string(), coef)),
            Some(v) => return Err(err(format!("bad variable name `{v}`"))),
            None => bound -= coef,
        }
    }
    Ok((out, bound))
}

impl FromStr for LinearSystem {
    type Err = Error;

    /// One row per line, `2*x - 1/3*y + z <= 5/2`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut parsed = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = parse_row(line, i + 1)?;
            for (v, _) in &row.0 {
                if !names.contains(v) {
                    names.push(v.clone());
                }
            }
            parsed.push(row);
        }
        let mut sys = LinearSystem::new(names)?;
        for (terms, bound) in parsed {
            let terms: Vec<(&str, BigRational)> = terms.iter().map(|(v, c)| (v.as_str(), c.clone())).collect();
            sys.push_terms(&terms, bound)?;
        }
        Ok(sys)
    }
}

/// Brute-force reference for small bounded systems.
pub mod oracle {
    use super::*;
    use rand::Rng;

    fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            b.swap(col, piv);
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let factor = &a[r][col] / &a[col][col];
                    for k in col..n {
                        let delta = &factor * &a[col][k];
                        a[r][k] -= delta;
                    }
                    let delta = &factor * &b[col];
                    b[r] -= delta;
                }
            }
        }
        Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
    }

    fn subsets(m: usize, n: usize, mut visit: impl FnMut(&[usize])) {
        if n > m {
            return;
        }
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            visit(&idx);
            let Some(i) = (0..n).rev().find(|&i| idx[i] != i + m - n) else { return };
            idx[i] += 1;
            for j in i + 1..n {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    /// All vertices: feasible points where some `n` rows are tight with a
    /// nonsingular coefficient block.
    pub fn vertices(sys: &LinearSystem) -> Vec<Vec<BigRational>> {
        let n = sys.variables().len();
        let mut out: Vec<Vec<BigRational>> = Vec::new();
        subsets(sys.rows().len(), n, |pick| {
            let a = pick.iter().map(|&i| sys.rows()[i].coeffs.clone()).collect();
            let b = pick.iter().map(|&i| sys.rows()[i].bound.clone()).collect();
            if let Some(x) = solve_exact(a, b) {
                if sys.is_satisfied_by(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        });
        out
    }

    /// Maximum of `Σ objective` over the vertices; `None` when there are none.
    /// Only meaningful for bounded systems.
    pub fn max_sum(sys: &LinearSystem, objective: &[&str]) -> Result<Option<BigRational>> {
        let idx: Vec<usize> = objective.iter().map(|v| sys.index_of(v)).collect::<Result<_>>()?;
        Ok(vertices(sys)
            .into_iter()
            .map(|x| idx.iter().map(|&i| x[i].clone()).sum::<BigRational>())
            .max())
    }

    /// Random system over `n` variables boxed by `|x_i| ≤ box_bound`, plus
    /// `extra` rows with integer coefficients in `[-4, 4]` and bounds in
    /// `[0, 8]`, so the origin is always feasible.
    pub fn random_bounded_system(rng: &mut impl Rng, n: usize, extra: usize, box_bound: i64) -> LinearSystem {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let mut sys = LinearSystem::new(names).expect("distinct names");
        let int = |v: i64| BigRational::from_integer(v.into());
        for i in 0..n {
            for sign in [1, -1] {
                let mut coeffs = vec![BigRational::zero(); n];
                coeffs[i] = int(sign);
                sys.push(Row::new(coeffs, int(box_bound))).expect("width");
            }
        }
        for _ in 0..extra {
            let coeffs = (0..n).map(|_| int(rng.random_range(-4..=4))).collect();
            let bound = BigRational::new(rng.random_range(0..=16).into(), 2.into());
            sys.push(Row::new(coeffs, bound)).expect("width");
        }
        sys
    }
}
