//! Batch experiments behind the `rigtv` binary: grid parsing, result tables
//! and one function per subcommand.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value as Json};

use crate::couplings::{coupling_trials, lecam_gap, write_trial_log, CouplingEstimate, ModelCoupler, TrialRecord};
use crate::diagnostics::{
    classify_regime, lemma_counting_oracle, mc_class_probability, mc_tv_lower_bound, moment_suite, p_for_p2,
    triangle_packing_lower_bound, GraphModel, OracleMode, Statistic,
};
use crate::error::{invalid, resource, Error, Result};
use crate::exact::{tv_exact, ExactEngine};
use crate::graph::{edge_slots, Graph};
use crate::models::{large_set_union_bound, ModelParams};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:e}"),
            Value::Text(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Empty => Ok(()),
        }
    }
}

impl Value {
    fn to_json(&self) -> Json {
        match self {
            Value::Int(v) => i64::try_from(*v).map_or_else(|_| Json::String(v.to_string()), Json::from),
            Value::Float(v) => Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Text(s) => Json::String(s.clone()),
            Value::Bool(b) => Json::Bool(*b),
            Value::Empty => Json::Null,
        }
    }
}

macro_rules! impl_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(v: $t) -> Self {
                Value::Int(v as i128)
            }
        }
    )*};
}
impl_from_int!(u64, usize, i128);

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(invalid!("unknown format {s:?} (csv, json)")),
        }
    }
}

/// Rows under fixed column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| Error::Parse(e.to_string());
        out.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.to_string())).map_err(err)?;
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    /// Array of objects keyed by column name, one per row.
    pub fn to_json(&self) -> Json {
        Json::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Json> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_owned(), v.to_json()))
                        .collect();
                    Json::Object(obj)
                })
                .collect(),
        )
    }

    pub fn write<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(w, "{text}").map_err(|e| Error::Parse(e.to_string()))
            }
        }
    }
}

/// Table plus every hard invariant that failed while producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub violations: Vec<String>,
    /// Per-trial coupling records, when requested.
    pub trial_log: Option<Vec<TrialRecord>>,
}

impl Report {
    fn new(table: Table) -> Self {
        Self {
            table,
            violations: Vec::new(),
            trial_log: None,
        }
    }

    pub fn write_trial_log<W: Write>(&self, w: W) -> Result<()> {
        write_trial_log(self.trial_log.as_deref().unwrap_or(&[]), w)
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| invalid!("cannot parse {s:?} as a number"))
}

/// Parses `"a,b,c"`, `"lo:hi:xF"` (geometric) or `"lo:hi:+s"` (arithmetic).
pub fn parse_float_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(invalid!("empty grid"));
    }
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid!("range {text:?} must look like lo:hi:xF or lo:hi:+s"));
        }
        let lo = parse_number(parts[0])?;
        let hi = parse_number(parts[1])?;
        let step = parts[2].trim();
        if hi < lo {
            return Err(invalid!("range {text:?} has hi < lo"));
        }
        let mut out = Vec::new();
        if let Some(f) = step.strip_prefix('x') {
            let f = parse_number(f)?;
            if !(f > 1.0) || !(lo > 0.0) {
                return Err(invalid!("geometric range {text:?} needs lo > 0 and factor > 1"));
            }
            let count = ((hi / lo).ln() / f.ln() + 1e-9).floor() as i32;
            for i in 0..=count {
                out.push(lo * f.powi(i));
            }
        } else if let Some(s) = step.strip_prefix('+') {
            let s = parse_number(s)?;
            if !(s > 0.0) {
                return Err(invalid!("arithmetic range {text:?} needs a positive step"));
            }
            let count = ((hi - lo) / s + 1e-9).floor() as u64;
            for i in 0..=count {
                out.push(lo + s * i as f64);
            }
        } else {
            return Err(invalid!("range step {step:?} must start with x or +"));
        }
        out
    } else {
        text.split(',').map(parse_number).collect::<Result<Vec<f64>>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid!("grid {text:?} has a non-finite value"));
    }
    if values.len() > 100_000 {
        return Err(invalid!("grid {text:?} has more than 100000 points"));
    }
    Ok(values)
}

/// Integer grid; values written like `1e4` are accepted when exact.
pub fn parse_int_grid(text: &str) -> Result<Vec<u64>> {
    parse_float_grid(text)?
        .into_iter()
        .map(|v| {
            let r = v.round();
            if (v - r).abs() > 1e-6 * r.max(1.0) || !(0.0..=9.0e18).contains(&r) {
                Err(invalid!("{v} is not a non-negative integer"))
            } else {
                Ok(r as u64)
            }
        })
        .collect()
}

/// `p` values: explicit numbers, or `c*m^e` / `m^e` tied to each `m`.
#[derive(Debug, Clone, PartialEq)]
pub enum PGrid {
    Values(Vec<f64>),
    PowerOfM { coefficient: f64, exponent: f64 },
}

impl PGrid {
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(pos) = s.find("m^") {
            let exponent = parse_number(&s[pos + 2..])?;
            let head = &s[..pos];
            let coefficient = if head.is_empty() {
                1.0
            } else {
                parse_number(head.strip_suffix('*').unwrap_or(head))?
            };
            return Ok(PGrid::PowerOfM { coefficient, exponent });
        }
        Ok(PGrid::Values(parse_float_grid(&s)?))
    }

    pub fn values_for(&self, m: u64) -> Vec<f64> {
        match self {
            PGrid::Values(v) => v.clone(),
            PGrid::PowerOfM { coefficient, exponent } => vec![(coefficient * (m as f64).powf(*exponent)).min(1.0)],
        }
    }
}

impl FromStr for PGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PGrid::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    Couple,
    Stats,
    ClassProb,
    TvLower,
}

impl FromStr for McMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "couple" => Ok(McMode::Couple),
            "stats" => Ok(McMode::Stats),
            "class-prob" => Ok(McMode::ClassProb),
            "tv-lower" => Ok(McMode::TvLower),
            _ => Err(invalid!("unknown mc mode {s:?} (couple, stats, class-prob, tv-lower)")),
        }
    }
}

/// Second model for `mc tv-lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Versus {
    Phat,
    CliqueCover,
}

impl FromStr for Versus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phat" => Ok(Versus::Phat),
            "clique-cover" => Ok(Versus::CliqueCover),
            _ => Err(invalid!("unknown comparison model {s:?} (phat, clique-cover)")),
        }
    }
}

/// Everything a subcommand may read.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: Vec<u64>,
    pub m: Vec<u64>,
    pub p: PGrid,
    /// Target `p₂` values; when set, `p` is solved from each `(n, m)` instead.
    pub p2: Option<Vec<f64>>,
    pub trials: u64,
    pub seed: Option<u64>,
    pub exact_cap: usize,
    pub statistic: Statistic,
    pub versus: Versus,
    pub t: usize,
    pub mode: OracleMode,
    pub graph: Option<Graph>,
    pub keep_trial_log: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: vec![4],
            m: vec![100],
            p: PGrid::Values(vec![0.1]),
            p2: None,
            trials: 1000,
            seed: None,
            exact_cap: crate::exact::DEFAULT_MAX_N,
            statistic: Statistic::Triangles,
            versus: Versus::Phat,
            t: 3,
            mode: OracleMode::Triangles,
            graph: None,
            keep_trial_log: false,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.m.is_empty() {
            return Err(invalid!("grids must be non-empty"));
        }
        if let PGrid::Values(v) = &self.p {
            if v.is_empty() {
                return Err(invalid!("grids must be non-empty"));
            }
        }
        if self.trials == 0 {
            return Err(invalid!("trials must be at least 1"));
        }
        Ok(())
    }

    /// `(n, m, p)` in grid order: `n` outermost, then `m`, then `p`.
    pub fn points(&self) -> Result<Vec<(usize, u64, f64)>> {
        self.validate()?;
        let mut out = Vec::new();
        for &n in &self.n {
            let n = usize::try_from(n).map_err(|_| invalid!("n = {n} too large"))?;
            for &m in &self.m {
                let ps = match &self.p2 {
                    Some(targets) => targets.iter().map(|&t| p_for_p2(n, m, t)).collect::<Result<Vec<_>>>()?,
                    None => self.p.values_for(m),
                };
                for p in ps {
                    ModelParams::new(n, m, p)?;
                    out.push((n, m, p));
                }
            }
        }
        Ok(out)
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| invalid!("--seed is required for Monte-Carlo runs"))
    }

    fn engine(&self) -> Result<ExactEngine> {
        ExactEngine::with_max_n(self.exact_cap)
    }
}

fn point_seed(base: u64, index: usize) -> u64 {
    crate::rng::split(base, index as u64)
}

/// Exact distances per grid point: `tv(G(n,m;p), G(n,p̂))`,
/// `tv(G(n,m;p), G(n,(p_k)))`, and the truncation `k <= 4` against the full
/// clique cover next to its union bound.
pub fn cmd_exact_tv(cfg: &ExperimentConfig) -> Result<Report> {
    let engine = cfg.engine()?;
    let points = cfg.points()?;
    if let Some(&(n, ..)) = points.iter().find(|pt| pt.0 > engine.max_n()) {
        return Err(resource!(
            "n = {n} exceeds the exact cap {}; use `mc tv-lower` for larger graphs",
            engine.max_n()
        ));
    }
    let mut report = Report::new(Table::new(&[
        "n",
        "m",
        "p",
        "p_hat",
        "tv_phat",
        "tv_clique_cover",
        "tv_truncated",
        "truncation_bound",
        "residual",
    ]));
    for (n, m, p) in points {
        let params = ModelParams::new(n, m, p)?;
        let pks = params.p_ks();
        let gnmp = engine.dist_gnmp(n, m, p)?;
        let phat = engine.dist_gn_phat(n, m, p)?;
        let cover = engine.dist_clique_cover(n, &pks)?;
        let truncated = engine.dist_clique_cover(n, &pks[..pks.len().min(3)])?;
        let tv_trunc = tv_exact(&truncated, &cover)?;
        let bound = large_set_union_bound(n, &pks);
        if tv_trunc > bound + 1e-12 {
            report
                .violations
                .push(format!("n={n} m={m} p={p}: truncation tv {tv_trunc} exceeds bound {bound}"));
        }
        let residual = [&gnmp, &phat, &cover, &truncated]
            .iter()
            .map(|d| d.residual())
            .fold(0.0, f64::max);
        report.table.push(vec![
            n.into(),
            m.into(),
            p.into(),
            params.p_hat().into(),
            tv_exact(&gnmp, &phat)?.into(),
            tv_exact(&gnmp, &cover)?.into(),
            tv_trunc.into(),
            bound.into(),
            residual.into(),
        ]);
    }
    Ok(report)
}

const MC_COLUMNS: [&str; 8] = ["experiment", "n", "m", "p", "statistic", "value", "ci_lo", "ci_hi"];

struct McRows<'a> {
    table: &'a mut Table,
    experiment: &'static str,
    n: usize,
    m: u64,
    p: f64,
}

impl McRows<'_> {
    fn push(&mut self, statistic: &str, value: impl Into<Value>, ci: Option<(f64, f64)>) {
        let (lo, hi) = ci.map_or((Value::Empty, Value::Empty), |(a, b)| (a.into(), b.into()));
        self.table.push(vec![
            self.experiment.into(),
            self.n.into(),
            self.m.into(),
            self.p.into(),
            statistic.into(),
            value.into(),
            lo,
            hi,
        ]);
    }
}

/// Monte-Carlo reports as long-format rows
/// `(experiment, n, m, p, statistic, value, ci_lo, ci_hi)`.
pub fn cmd_mc(cfg: &ExperimentConfig, mode: McMode) -> Result<Report> {
    let seed = cfg.seed()?;
    let points = cfg.points()?;
    let mut report = Report::new(Table::new(&MC_COLUMNS));
    let mut log = Vec::new();
    for (idx, &(n, m, p)) in points.iter().enumerate() {
        let s = point_seed(seed, idx);
        let params = ModelParams::new(n, m, p)?;
        match mode {
            McMode::Couple => {
                let coupler = ModelCoupler::new(n, m, p)?;
                let records = coupling_trials(n, m, p, cfg.trials, s)?;
                let est = CouplingEstimate::from_records(&records, coupler.count_mismatch_probability());
                let q2 = params.q2();
                let mut rows = McRows { table: &mut report.table, experiment: "couple", n, m, p };
                rows.push("mismatch_rate", est.estimate, Some((est.ci_lo, est.ci_hi)));
                rows.push("count_mismatch_rate", est.count_mismatch_rate, None);
                rows.push("count_mismatch_exact", est.count_mismatch, None);
                rows.push("lecam_bound", q2, None);
                if q2 > 0.0 && q2 < 1.0 {
                    let gap = lecam_gap(m, q2)?;
                    if !gap.holds() {
                        report.violations.push(format!("n={n} m={m} p={p}: tv {} exceeds q2 {q2}", gap.tv));
                    }
                }
                if cfg.keep_trial_log {
                    log.extend(records);
                }
            }
            McMode::Stats => {
                let rows_in = moment_suite(n, m, p, cfg.trials, s)?;
                let mut rows = McRows { table: &mut report.table, experiment: "stats", n, m, p };
                rows.push("p2", params.p2(), None);
                for r in &rows_in {
                    rows.push(&format!("{}.mean", r.statistic), r.mean, None);
                    rows.push(&format!("{}.expected", r.statistic), r.expected, None);
                    rows.push(&format!("{}.z", r.statistic), r.z, None);
                    rows.push(&format!("{}.variance", r.statistic), r.variance, None);
                }
                for r in rows_in.iter().filter(|r| !(r.z.abs() <= 5.0)) {
                    report
                        .violations
                        .push(format!("n={n} m={m} p={p}: {} z-score {}", r.statistic, r.z));
                }
            }
            McMode::ClassProb => {
                let c = mc_class_probability(n, m, p, cfg.trials, s)?;
                let mut rows = McRows { table: &mut report.table, experiment: "class-prob", n, m, p };
                rows.push("p2", params.p2(), None);
                rows.push("epsilon", c.epsilon, None);
                rows.push("g3", c.g3, Some(c.g3_ci));
                rows.push("g4", c.g4, Some(c.g4_ci));
                rows.push("g3_soft_check", c.soft_check, None);
                if c.g4 > c.g3 {
                    report.violations.push(format!("n={n} m={m} p={p}: g4 {} above g3 {}", c.g4, c.g3));
                }
            }
            McMode::TvLower => {
                let a = GraphModel::Gnmp { n, m, p };
                let b = match cfg.versus {
                    Versus::Phat => GraphModel::gn_phat(n, m, p)?,
                    Versus::CliqueCover => GraphModel::clique_cover_of(n, m, p)?,
                };
                let r = mc_tv_lower_bound(&a, &b, cfg.statistic, cfg.trials, s)?;
                let exact = if n <= cfg.exact_cap {
                    let engine = cfg.engine()?;
                    let da = engine.dist_gnmp(n, m, p)?;
                    let db = match &b {
                        GraphModel::Gnp { p: pe, .. } => engine.dist_gnp(n, *pe)?,
                        GraphModel::CliqueCover { pks, .. } => engine.dist_clique_cover(n, pks)?,
                        GraphModel::Gnmp { .. } => unreachable!(),
                    };
                    Some(tv_exact(&da, &db)?)
                } else {
                    None
                };
                let mut rows = McRows { table: &mut report.table, experiment: "tv-lower", n, m, p };
                let stat = cfg.statistic.name();
                rows.push(&format!("{stat}.tv"), r.estimate, Some((r.ci_lo, r.ci_hi)));
                rows.push(&format!("{stat}.null_reference"), r.null_reference, None);
                rows.push("tv_exact", exact, None);
                if let Some(e) = exact {
                    if r.estimate > e + (r.ci_hi - r.ci_lo) {
                        report
                            .violations
                            .push(format!("n={n} m={m} p={p}: plug-in {} above exact {e}", r.estimate));
                    }
                }
            }
        }
    }
    if cfg.keep_trial_log {
        report.trial_log = Some(log);
    }
    Ok(report)
}

/// Regime tag and boundaries per grid point.
pub fn cmd_regimes(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(Table::new(&[
        "n",
        "m",
        "p",
        "regime",
        "complete_bound",
        "small_bound",
        "case_bound",
        "epsilon",
        "standing_assumption",
        "case_two_nonempty",
    ]));
    for (n, m, p) in cfg.points()? {
        let r = classify_regime(n, m, p)?;
        if r.standing_assumption && r.small_bound >= r.case_bound {
            report.violations.push(format!("n={n} m={m}: small bound not below case bound"));
        }
        report.table.push(vec![
            n.into(),
            m.into(),
            p.into(),
            r.regime.tag().into(),
            r.complete_bound.into(),
            r.small_bound.into(),
            r.case_bound.into(),
            r.derived.epsilon.into(),
            r.standing_assumption.into(),
            r.case_two_nonempty().into(),
        ]);
    }
    Ok(report)
}

pub const ORACLE_EXHAUSTIVE_MAX_N: usize = 6;

/// Brute-force packing counts for one graph or every graph on `n` vertices,
/// `t = 0..=cfg.t`. Graphs beyond the oracle guard are skipped in the
/// exhaustive sweep.
pub fn cmd_lemma_oracle(cfg: &ExperimentConfig) -> Result<Report> {
    let graphs: Vec<Graph> = match &cfg.graph {
        Some(g) => vec![g.clone()],
        None => {
            let &[n] = cfg.n.as_slice() else {
                return Err(invalid!("lemma-oracle takes a single n"));
            };
            let n = n as usize;
            if !(2..=ORACLE_EXHAUSTIVE_MAX_N).contains(&n) {
                return Err(invalid!("exhaustive sweep needs 2 <= n <= {ORACLE_EXHAUSTIVE_MAX_N}"));
            }
            (0..1u64 << edge_slots(n))
                .map(|mask| Graph::from_mask(n, mask))
                .collect::<Result<_>>()?
        }
    };
    let single = cfg.graph.is_some();
    let mut report = Report::new(Table::new(&["graph", "mode", "t", "count", "lower_bound", "holds"]));
    for g in &graphs {
        for t in 0..=cfg.t {
            let count = match lemma_counting_oracle(g, t, cfg.mode) {
                Ok(c) => c,
                Err(Error::Resource(_)) if !single => continue,
                Err(e) => return Err(e),
            };
            let (bound, holds) = match cfg.mode {
                OracleMode::Triangles => {
                    let b = triangle_packing_lower_bound(g, t);
                    (Value::Int(b), i128::from(count) >= b)
                }
                OracleMode::K4s => (Value::Empty, true),
            };
            if !holds {
                report.violations.push(format!("{g} t={t}: count {count} below bound {bound}"));
            }
            report.table.push(vec![
                g.to_string().into(),
                cfg.mode.to_string().into(),
                t.into(),
                count.into(),
                bound,
                holds.into(),
            ]);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: &str, m: &str, p: &str) -> ExperimentConfig {
        ExperimentConfig {
            n: parse_int_grid(n).unwrap(),
            m: parse_int_grid(m).unwrap(),
            p: p.parse().unwrap(),
            seed: Some(1),
            ..Default::default()
        }
    }

    fn floats(t: &Table, col: &str) -> Vec<f64> {
        t.column(col)
            .unwrap()
            .into_iter()
            .map(|v| match v {
                Value::Float(f) => *f,
                other => panic!("{other:?}"),
            })
            .collect()
    }

    #[test]
    fn grids() {
        assert_eq!(parse_int_grid("1e2:1e6:x10").unwrap(), vec![100, 1000, 10_000, 100_000, 1_000_000]);
        assert_eq!(parse_int_grid("3,5,7").unwrap(), vec![3, 5, 7]);
        assert_eq!(parse_int_grid("2:8:+3").unwrap(), vec![2, 5, 8]);
        assert!(parse_int_grid("2.5").is_err());
        assert!(parse_float_grid("").is_err());
        assert!(parse_float_grid("1:2").is_err());
        assert!(parse_float_grid("0:1:x2").is_err());
        assert_eq!(
            PGrid::parse("m^-0.5").unwrap(),
            PGrid::PowerOfM { coefficient: 1.0, exponent: -0.5 }
        );
        assert_eq!(PGrid::parse("2*m^-0.5").unwrap().values_for(100), vec![0.2]);
        assert_eq!(PGrid::parse("0.1, 0.2").unwrap(), PGrid::Values(vec![0.1, 0.2]));
    }

    #[test]
    fn table_formats_agree() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1u64.into(), 0.5.into(), Value::Empty]);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "a,b,c\n1,5e-1,\n");
        assert_eq!(t.to_json().to_string(), r#"[{"a":1,"b":0.5,"c":null}]"#);
    }

    #[test]
    fn exact_tv_examples() {
        let r = cmd_exact_tv(&cfg("2", "1,10,1000", "0.01,0.5")).unwrap();
        assert!(floats(&r.table, "tv_phat").iter().all(|&v| v < 1e-15));
        let r = cmd_exact_tv(&cfg("4", "10,1000", "0")).unwrap();
        assert!(floats(&r.table, "tv_phat").iter().all(|&v| v == 0.0));
        let r = cmd_exact_tv(&cfg("4", "1e2,1e4", "m^-0.5")).unwrap();
        let tv = floats(&r.table, "tv_phat");
        assert!(tv[1] < tv[0]);
        assert!(r.violations.is_empty());
        assert!(matches!(cmd_exact_tv(&cfg("8", "10", "0.1")), Err(Error::Resource(_))));
    }

    #[test]
    fn mc_modes() {
        let mut c = cfg("5", "100", "0");
        c.trials = 200;
        let r = cmd_mc(&c, McMode::Couple).unwrap();
        assert_eq!(r.table.rows[0][5], Value::Float(0.0));
        let mut c = cfg("4", "100", "0.1");
        c.trials = 0;
        assert!(matches!(cmd_mc(&c, McMode::Couple), Err(Error::InvalidArgument(_))));
        c.trials = 300;
        c.seed = None;
        assert!(cmd_mc(&c, McMode::Stats).is_err());
        c.seed = Some(3);
        for mode in [McMode::Couple, McMode::Stats, McMode::TvLower] {
            let r = cmd_mc(&c, mode).unwrap();
            assert!(r.violations.is_empty(), "{mode:?}: {:?}", r.violations);
        }
        let mut c = cfg("10", "1e6", "0.05");
        c.trials = 100;
        let r = cmd_mc(&c, McMode::ClassProb).unwrap();
        assert!(r.violations.is_empty());
    }

    #[test]
    fn stats_from_p2_target() {
        let mut c = cfg("10", "1e4", "0.1");
        c.p2 = Some(vec![0.5]);
        c.trials = 2000;
        let r = cmd_mc(&c, McMode::Stats).unwrap();
        let p2 = &r.table.rows[0];
        assert_eq!(p2[4], Value::Text("p2".into()));
        assert!(matches!(p2[5], Value::Float(v) if (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn regimes_and_oracle() {
        let r = cmd_regimes(&cfg("10", "1e9", "0,1e-4,1")).unwrap();
        let tags: Vec<String> = r.table.column("regime").unwrap().iter().map(|v| v.to_string()).collect();
        assert_eq!(tags, ["small-p", "complete-graph", "complete-graph"]);
        let mut c = cfg("4", "1", "0");
        c.t = 3;
        let r = cmd_lemma_oracle(&c).unwrap();
        assert_eq!(r.table.rows.len(), 64 * 4);
        assert!(r.violations.is_empty());
        c.graph = Some("n=4;mask=3f".parse().unwrap());
        let r = cmd_lemma_oracle(&c).unwrap();
        let counts: Vec<String> = r.table.column("count").unwrap().iter().map(|v| v.to_string()).collect();
        assert_eq!(counts, ["1", "4", "0", "0"]);
    }
}
