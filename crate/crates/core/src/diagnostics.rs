//! Regime boundaries, triangle/K₄ class membership, moment checks,
//! Monte-Carlo statistic TV lower bounds and the brute-force counting oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{invalid, resource, Error, Result};
use crate::exec;
use crate::graph::{clique_union, diamond_count, k4_count, triangle_count, triangle_set, Graph, HyperedgeSet};
use crate::models::{
    p_k, r_k, sample_clique_cover, sample_gnmp, sample_gnp, thresholds, DerivedParams, ModelParams,
};
use crate::numeric::{choose, wilson_interval, Z95};
use crate::rng::{from_seed, split};

/// Which part of the argument covers a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p > (3 ln n / m)^{1/2}`: both graphs are complete w.h.p.
    CompleteGraph,
    /// `p <= ε/(n m^{1/3})`.
    SmallP,
    /// `ε/(n m^{1/3}) < p <= ε/(n^{2/3} m^{1/3})`.
    CaseI,
    /// `ε/(n^{2/3} m^{1/3}) < p <= (3 ln n / m)^{1/2}`.
    CaseII,
    /// `ε` is undefined (`m <= e·n⁴`) and `p` is below the complete-graph bound.
    Unclassified,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::CompleteGraph => "complete-graph",
            Regime::SmallP => "small-p",
            Regime::CaseI => "case-I",
            Regime::CaseII => "case-II",
            Regime::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub n: usize,
    pub m: u64,
    pub p: f64,
    pub regime: Regime,
    /// `(3 ln n / m)^{1/2}`
    pub complete_bound: f64,
    /// `ε/(n m^{1/3})`
    pub small_bound: Option<f64>,
    /// `ε/(n^{2/3} m^{1/3})`
    pub case_bound: Option<f64>,
    /// `m > e³·n⁴`
    pub standing_assumption: bool,
    pub derived: DerivedParams,
}

impl RegimeReport {
    /// `small < case < complete`, or `None` when `ε` is undefined.
    pub fn boundaries_ordered(&self) -> Option<bool> {
        Some(self.small_bound? < self.case_bound? && self.case_bound? < self.complete_bound)
    }

    /// Whether some `p` falls in case II, i.e. `case_bound < complete_bound`.
    pub fn case_two_nonempty(&self) -> Option<bool> {
        Some(self.case_bound? < self.complete_bound)
    }
}

pub fn classify_regime(n: usize, m: u64, p: f64) -> Result<RegimeReport> {
    if n < 3 {
        return Err(invalid!("n = {n} must be at least 3"));
    }
    let params = ModelParams::new(n, m, p)?;
    let nf = n as f64;
    let mf = m as f64;
    let complete_bound = (3.0 * nf.ln() / mf).sqrt();
    let derived = params.derived();
    let small_bound = derived.epsilon.map(|e| e / (nf * mf.cbrt()));
    let case_bound = derived.epsilon.map(|e| e / (nf.powf(2.0 / 3.0) * mf.cbrt()));
    let regime = if p == 0.0 {
        Regime::SmallP
    } else if p > complete_bound {
        Regime::CompleteGraph
    } else {
        match (small_bound, case_bound) {
            (Some(s), _) if p <= s => Regime::SmallP,
            (Some(_), Some(c)) if p <= c => Regime::CaseI,
            (Some(_), Some(_)) => Regime::CaseII,
            _ => Regime::Unclassified,
        }
    };
    Ok(RegimeReport {
        n,
        m,
        p,
        regime,
        complete_bound,
        small_bound,
        case_bound,
        standing_assumption: mf.ln() - 4.0 * nf.ln() > 3.0,
        derived,
    })
}

/// Membership of one graph in the triangle class `G3` and the K₄ class `G4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMembership {
    pub in_g3: bool,
    pub in_g4: bool,
    pub triangles: u64,
    /// `(1 - δ) C(n,3) p₂³`
    pub triangle_threshold: f64,
    pub diamonds: u64,
    /// `n⁴ p₂⁵ / ε`
    pub diamond_threshold: f64,
    pub k4s: u64,
    /// `(1 - 1/(εn)) C(n,4) p₂⁶`
    pub k4_threshold: f64,
}

/// Precomputed thresholds for repeated classification at one `(n, m, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassThresholds {
    pub n: usize,
    pub p2: f64,
    pub epsilon: f64,
    pub triangle: f64,
    pub diamond: f64,
    pub k4: f64,
}

impl ClassThresholds {
    pub fn new(n: usize, m: u64, p: f64) -> Result<Self> {
        let th = thresholds(n, m, p)?;
        let nf = n as f64;
        let (p2, eps) = (th.p2, th.epsilon);
        Ok(Self {
            n,
            p2,
            epsilon: eps,
            triangle: (1.0 - th.delta) * choose(n as u64, 3) * p2.powi(3),
            diamond: nf.powi(4) * p2.powi(5) / eps,
            k4: (1.0 - 1.0 / (eps * nf)) * choose(n as u64, 4) * p2.powi(6),
        })
    }

    pub fn classify(&self, g: &Graph) -> Result<ClassMembership> {
        if g.n() != self.n {
            return Err(invalid!("graph on {} vertices, thresholds for {}", g.n(), self.n));
        }
        let triangles = triangle_count(g);
        let diamonds = diamond_count(g);
        let k4s = k4_count(g);
        let in_g3 = triangles as f64 >= self.triangle && diamonds as f64 <= self.diamond;
        let in_g4 = in_g3 && k4s as f64 >= self.k4;
        Ok(ClassMembership {
            in_g3,
            in_g4,
            triangles,
            triangle_threshold: self.triangle,
            diamonds,
            diamond_threshold: self.diamond,
            k4s,
            k4_threshold: self.k4,
        })
    }
}

#[allow(non_snake_case)]
pub fn classify_G3_G4(g: &Graph, n: usize, m: u64, p: f64) -> Result<ClassMembership> {
    ClassThresholds::new(n, m, p)?.classify(g)
}

/// Estimated `Pr[G(n,p₂) ∈ G3]` and `Pr[G(n,p₂) ∈ G4]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassProbability {
    pub trials: u64,
    pub g3: f64,
    pub g3_ci: (f64, f64),
    pub g4: f64,
    pub g4_ci: (f64, f64),
    pub epsilon: f64,
    /// `g3 >= 1 - 10ε`; informational only.
    pub soft_check: bool,
}

pub fn mc_class_probability(n: usize, m: u64, p: f64, trials: u64, seed: u64) -> Result<ClassProbability> {
    check_trials(trials)?;
    let th = ClassThresholds::new(n, m, p)?;
    let flags = exec::try_map_range(0..trials, |i| {
        let g = sample_gnp(n, th.p2, split(seed, i))?;
        let c = th.classify(&g)?;
        Ok::<_, Error>((c.in_g3, c.in_g4))
    })?;
    let g3 = flags.iter().filter(|f| f.0).count() as u64;
    let g4 = flags.iter().filter(|f| f.1).count() as u64;
    let t = trials as f64;
    Ok(ClassProbability {
        trials,
        g3: g3 as f64 / t,
        g3_ci: wilson_interval(g3, trials, Z95),
        g4: g4 as f64 / t,
        g4_ci: wilson_interval(g4, trials, Z95),
        epsilon: th.epsilon,
        soft_check: g3 as f64 / t >= 1.0 - 10.0 * th.epsilon,
    })
}

/// Graph statistics usable as pushforwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Edges,
    Triangles,
    K4s,
    Diamonds,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Statistic::Edges, Statistic::Triangles, Statistic::K4s, Statistic::Diamonds];

    pub fn eval(self, g: &Graph) -> u64 {
        match self {
            Statistic::Edges => g.edge_count() as u64,
            Statistic::Triangles => triangle_count(g),
            Statistic::K4s => k4_count(g),
            Statistic::Diamonds => diamond_count(g),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Edges => "edges",
            Statistic::Triangles => "triangles",
            Statistic::K4s => "k4",
            Statistic::Diamonds => "diamonds",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edges" | "edge-count" => Ok(Statistic::Edges),
            "triangles" | "triangle-count" => Ok(Statistic::Triangles),
            "k4" | "k4s" | "k4-count" => Ok(Statistic::K4s),
            "diamonds" | "diamond-count" => Ok(Statistic::Diamonds),
            _ => Err(invalid!("unknown statistic {s:?} (edges, triangles, k4, diamonds)")),
        }
    }
}

/// A samplable graph law.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphModel {
    Gnmp { n: usize, m: u64, p: f64 },
    Gnp { n: usize, p: f64 },
    CliqueCover { n: usize, pks: Vec<f64> },
}

impl GraphModel {
    pub fn gn_phat(n: usize, m: u64, p: f64) -> Result<Self> {
        ModelParams::new(n, m, p)?;
        Ok(GraphModel::Gnp { n, p: crate::models::p_hat(m, p) })
    }

    pub fn clique_cover_of(n: usize, m: u64, p: f64) -> Result<Self> {
        Ok(GraphModel::CliqueCover { n, pks: ModelParams::new(n, m, p)?.p_ks() })
    }

    pub fn n(&self) -> usize {
        match self {
            GraphModel::Gnmp { n, .. } | GraphModel::Gnp { n, .. } | GraphModel::CliqueCover { n, .. } => *n,
        }
    }

    pub fn sample(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphModel::Gnmp { n, m, p } => Ok(sample_gnmp(*n, *m, *p, seed)?.graph),
            GraphModel::Gnp { n, p } => sample_gnp(*n, *p, seed),
            GraphModel::CliqueCover { n, pks } => Ok(sample_clique_cover(*n, pks, seed)?.graph),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GraphModel::Gnmp { n, m, p } => format!("gnmp(n={n},m={m},p={p})"),
            GraphModel::Gnp { n, p } => format!("gnp(n={n},p={p})"),
            GraphModel::CliqueCover { n, pks } => format!("clique_cover(n={n},kmax={})", pks.len() + 1),
        }
    }
}

/// Plug-in statistic TV with a percentile bootstrap interval and a
/// same-model reference for the upward small-sample bias.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvLowerBound {
    pub statistic: Statistic,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Plug-in distance between two independent samples of model A.
    pub null_reference: f64,
}

pub const BOOTSTRAP_RESAMPLES: u64 = 500;

fn histogram(model: &GraphModel, stat: Statistic, trials: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    let values = exec::try_map_range(0..trials, |i| Ok::<_, Error>(stat.eval(&model.sample(split(seed, i))?)))?;
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0u64) += 1;
    }
    Ok(h)
}

/// `½ Σ |a/na - b/nb|` over the union of bins.
fn plug_in_tv(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut total = 0.0;
    for k in keys {
        let fa = *a.get(&k).unwrap_or(&0) as f64 / na as f64;
        let fb = *b.get(&k).unwrap_or(&0) as f64 / nb as f64;
        total += (fa - fb).abs();
    }
    0.5 * total
}

/// Multinomial resample of a histogram via a conditional binomial chain.
fn resample<R: Rng + ?Sized>(h: &BTreeMap<u64, u64>, rng: &mut R) -> BTreeMap<u64, u64> {
    let mut left: u64 = h.values().sum();
    let mut mass_left = left as f64;
    let mut out = BTreeMap::new();
    for (&k, &c) in h {
        if left == 0 {
            break;
        }
        let q = (c as f64 / mass_left).min(1.0);
        let draw = Binomial::new(left, q).expect("q in [0, 1]").sample(rng);
        if draw > 0 {
            out.insert(k, draw);
        }
        left -= draw;
        mass_left -= c as f64;
    }
    out
}

pub fn mc_tv_lower_bound(
    a: &GraphModel,
    b: &GraphModel,
    stat: Statistic,
    trials: u64,
    seed: u64,
) -> Result<TvLowerBound> {
    check_trials(trials)?;
    if a.n() != b.n() {
        return Err(invalid!("models on {} and {} vertices", a.n(), b.n()));
    }
    let ha = histogram(a, stat, trials, split(seed, 0))?;
    let hb = histogram(b, stat, trials, split(seed, 1))?;
    let hnull = histogram(a, stat, trials, split(seed, 2))?;
    let estimate = plug_in_tv(&ha, &hb);
    let boot_seed = split(seed, 3);
    let mut boots = exec::map_range(0..BOOTSTRAP_RESAMPLES, |r| {
        let mut rng = from_seed(split(boot_seed, r));
        plug_in_tv(&resample(&ha, &mut rng), &resample(&hb, &mut rng))
    });
    boots.sort_by(f64::total_cmp);
    let pick = |q: f64| boots[((q * BOOTSTRAP_RESAMPLES as f64) as usize).min(boots.len() - 1)];
    Ok(TvLowerBound {
        statistic: stat,
        trials,
        estimate,
        ci_lo: pick(0.025),
        ci_hi: pick(0.975),
        null_reference: plug_in_tv(&ha, &hnull),
    })
}

/// One line of the moment table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub statistic: &'static str,
    pub mean: f64,
    pub expected: f64,
    pub z: f64,
    pub variance: f64,
}

fn moment_row(statistic: &'static str, values: &[u64], expected: f64) -> MomentRow {
    let t = values.len() as f64;
    let sum: u128 = values.iter().map(|&v| u128::from(v)).sum();
    let sum_sq: u128 = values.iter().map(|&v| u128::from(v) * u128::from(v)).sum();
    let mean = sum as f64 / t;
    let variance = if values.len() > 1 {
        ((sum_sq as f64) - (sum as f64) * mean).max(0.0) / (t - 1.0)
    } else {
        0.0
    };
    let se = (variance / t).sqrt();
    let gap = mean - expected;
    let z = if se > 0.0 {
        gap / se
    } else if gap.abs() <= 1e-9 * expected.abs().max(1.0) {
        0.0
    } else {
        gap.signum() * f64::INFINITY
    };
    MomentRow {
        statistic,
        mean,
        expected,
        z,
        variance,
    }
}

/// Triangle, K₄ and diamond counts of `G(n,p₂)` against their expectations,
/// and the number of three-element columns of `R(n,m;p)` against
/// `m C(n,3) p³ (1-p)^{n-3}`.
pub fn moment_suite(n: usize, m: u64, p: f64, trials: u64, seed: u64) -> Result<Vec<MomentRow>> {
    check_trials(trials)?;
    let params = ModelParams::new(n, m, p)?;
    let p2 = params.p2();
    let graph_seed = split(seed, 0);
    let column_seed = split(seed, 1);
    let counts = exec::try_map_range(0..trials, |i| {
        let g = sample_gnp(n, p2, split(graph_seed, i))?;
        let artifacts = sample_gnmp(n, m, p, split(column_seed, i))?.artifact_triangles();
        Ok::<_, Error>([triangle_count(&g), k4_count(&g), diamond_count(&g), artifacts])
    })?;
    let column = |j: usize| counts.iter().map(|c| c[j]).collect::<Vec<u64>>();
    let nu = n as u64;
    let artifact_expect = m as f64 * r_k(n, p, 3);
    Ok(vec![
        moment_row("triangles", &column(0), choose(nu, 3) * p2.powi(3)),
        moment_row("k4", &column(1), choose(nu, 4) * p2.powi(6)),
        moment_row("diamonds", &column(2), 6.0 * choose(nu, 4) * p2.powi(5)),
        moment_row("artifact_triangles", &column(3), artifact_expect),
    ])
}

/// Which hyperedges the counting oracle enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// Sets `T` of triangles with `|K(T)| = 3|T|` edges.
    Triangles,
    /// Sets `Q` of K₄s with `|K(Q)| = 6|Q|` edges.
    K4s,
}

impl FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangles" | "t" => Ok(OracleMode::Triangles),
            "k4" | "k4s" | "q" => Ok(OracleMode::K4s),
            _ => Err(invalid!("unknown oracle mode {s:?} (triangles, k4)")),
        }
    }
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMode::Triangles => "triangles",
            OracleMode::K4s => "k4",
        })
    }
}

pub const ORACLE_MAX_HYPEREDGES: usize = 12;
pub const ORACLE_MAX_T: usize = 4;

/// Every 4-clique of `g`.
pub fn k4_set(g: &Graph) -> HyperedgeSet {
    let tri = triangle_set(g);
    let mut sets = Vec::new();
    for &s in tri.sets() {
        let top = 31 - s.leading_zeros();
        let mut common = u32::MAX;
        let mut bits = s;
        while bits != 0 {
            common &= g.neighbors(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
        let mut above = common & !((2u32 << top) - 1);
        while above != 0 {
            sets.push(s | 1 << above.trailing_zeros());
            above &= above - 1;
        }
    }
    HyperedgeSet::new(g.n(), sets).expect("distinct 4-sets")
}

/// Brute-force count of `t`-subsets of `H₃(G)` (or `H₄(G)`) whose clique
/// union has exactly `3t` (or `6t`) edges, i.e. edge-disjoint members.
pub fn lemma_counting_oracle(g: &Graph, t: usize, mode: OracleMode) -> Result<u64> {
    let (hyper, per) = match mode {
        OracleMode::Triangles => (triangle_set(g), 3),
        OracleMode::K4s => (k4_set(g), 6),
    };
    let h = hyper.len();
    if h > ORACLE_MAX_HYPEREDGES || t > ORACLE_MAX_T {
        return Err(resource!(
            "oracle limited to {ORACLE_MAX_HYPEREDGES} hyperedges and t <= {ORACLE_MAX_T}, got {h} and t = {t}"
        ));
    }
    let sets = hyper.sets();
    let mut count = 0u64;
    for pick in 0u32..1 << h {
        if pick.count_ones() as usize != t {
            continue;
        }
        let chosen = (0..h).filter(|&i| pick >> i & 1 == 1).map(|i| sets[i]);
        let sub = HyperedgeSet::new(g.n(), chosen)?;
        if clique_union(&sub).edge_count() == per * t {
            count += 1;
        }
    }
    Ok(count)
}

/// `C(h,t) - I(G)·C(h,t-2)` with `h = |H₃(G)|`.
pub fn triangle_packing_lower_bound(g: &Graph, t: usize) -> i128 {
    let h = triangle_count(g) as i128;
    let c = |a: i128, b: i64| -> i128 {
        if b < 0 || b as i128 > a {
            return 0;
        }
        (0..b as i128).fold(1, |acc, i| acc * (a - i) / (i + 1))
    };
    c(h, t as i64) - diamond_count(g) as i128 * c(h, t as i64 - 2)
}

/// Smallest `p` in `[0, 1]` with `p₂(n, m, p) >= target`, by bisection on
/// the increasing branch `p <= 2/n`.
pub fn p_for_p2(n: usize, m: u64, target: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target) {
        return Err(invalid!("target p2 = {target} outside [0, 1)"));
    }
    let f = |p: f64| p_k(n, m, p, 2).expect("n >= 2");
    let (mut lo, mut hi) = (0.0f64, (2.0 / n as f64).min(1.0));
    if f(hi) < target {
        return Err(Error::Domain(format!("p2 never reaches {target} at n={n}, m={m}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid!("trials must be at least 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{tv_exact, ExactEngine};

    #[test]
    fn regime_trivial_cases() {
        let r = classify_regime(10, 1_000_000, 1.0).unwrap();
        assert_eq!(r.regime, Regime::CompleteGraph);
        let r = classify_regime(10, 1_000_000_000, 0.0).unwrap();
        assert_eq!(r.regime, Regime::SmallP);
        let r = classify_regime(10, 100, 0.01).unwrap();
        assert_eq!(r.regime, Regime::Unclassified);
        assert!(classify_regime(2, 100, 0.1).is_err());
    }

    #[test]
    fn regime_hand_evaluation() {
        // eps = max(1/ln 10, 1/ln 1e5) = 1/ln 10
        let eps = 1.0 / 10f64.ln();
        let small = eps / (10.0 * 1000.0);
        let case = eps / (10f64.powf(2.0 / 3.0) * 1000.0);
        let complete = (3.0 * 10f64.ln() / 1e9).sqrt();
        assert!((small - 4.3429e-5).abs() < 1e-8);
        assert!((case - 9.3566e-5).abs() < 1e-8);
        assert!((complete - 8.3114e-5).abs() < 1e-8);
        let r = classify_regime(10, 1_000_000_000, 1e-4).unwrap();
        assert!((r.small_bound.unwrap() - small).abs() < 1e-15);
        assert!((r.case_bound.unwrap() - case).abs() < 1e-15);
        assert!((r.complete_bound - complete).abs() < 1e-15);
        assert_eq!(r.regime, Regime::CompleteGraph);
        assert_eq!(classify_regime(10, 1_000_000_000, 4e-5).unwrap().regime, Regime::SmallP);
        assert_eq!(classify_regime(10, 1_000_000_000, 6e-5).unwrap().regime, Regime::CaseI);
        assert_eq!(r.case_two_nonempty(), Some(false));
    }

    #[test]
    fn regime_ordering_under_standing_assumption() {
        for n in [5usize, 10, 20, 30] {
            let n4 = (n as f64).powi(4);
            for f in [21.0, 100.0, 1e3] {
                let m = (n4 * f) as u64;
                let r = classify_regime(n, m, 0.0).unwrap();
                assert!(r.standing_assumption);
                assert!(r.small_bound.unwrap() < r.case_bound.unwrap());
            }
        }
        let r = classify_regime(20, 160_000 * 100, 1e-4).unwrap();
        assert_eq!(r.boundaries_ordered(), Some(true));
    }

    #[test]
    fn class_membership_trivial() {
        let (n, m, p) = (10, 1_000_000, 0.2);
        let th = ClassThresholds::new(n, m, p).unwrap();
        assert!(th.p2 > 0.999_999);
        let c = th.classify(&Graph::complete(n).unwrap()).unwrap();
        assert!(c.in_g3 && c.in_g4);
        let c = th.classify(&Graph::empty(n).unwrap()).unwrap();
        assert!(!c.in_g3 && !c.in_g4);
        assert!(matches!(classify_G3_G4(&Graph::empty(10).unwrap(), 10, 100, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn class_membership_recomputation() {
        let (n, m, p) = (15, 15u64.pow(4) * 50, 0.003);
        let th = thresholds(n, m, p).unwrap();
        let p2 = th.p2;
        for seed in 0..20 {
            let g = sample_gnp(n, p2, seed).unwrap();
            let c = classify_G3_G4(&g, n, m, p).unwrap();
            let tri = triangle_set(&g).len() as f64;
            let mut inter = 0.0;
            for e in 0..crate::graph::edge_slots(n) {
                let (i, j) = crate::graph::edge_endpoints(e);
                if g.has_edge(i, j) {
                    let d = (g.neighbors(i) & g.neighbors(j)).count_ones() as f64;
                    inter += d * (d - 1.0) / 2.0;
                }
            }
            let k4 = k4_set(&g).len() as f64;
            let n3 = 455.0;
            let n4 = 1365.0;
            let g3 = tri >= (1.0 - th.delta) * n3 * p2.powi(3) && inter <= 15f64.powi(4) * p2.powi(5) / th.epsilon;
            let g4 = g3 && k4 >= (1.0 - 1.0 / (th.epsilon * 15.0)) * n4 * p2.powi(6);
            assert_eq!((c.in_g3, c.in_g4), (g3, g4));
            assert!(!c.in_g4 || c.in_g3);
        }
    }

    #[test]
    fn class_probability_edges() {
        let r = mc_class_probability(10, 1_000_000, 0.2, 50, 1).unwrap();
        assert_eq!(r.g4, 1.0);
        assert!(matches!(mc_class_probability(10, 1_000_000, 0.0, 10, 1), Err(Error::Domain(_))));
        assert!(mc_class_probability(10, 1_000_000, 0.1, 0, 1).is_err());
    }

    #[test]
    fn moments_at_extremes() {
        let rows = moment_suite(6, 100, 0.0, 200, 3).unwrap();
        assert!(rows.iter().all(|r| r.mean == 0.0 && r.expected == 0.0 && r.z == 0.0));
        // p2 = 1 to double precision
        let rows = moment_suite(6, 100_000, 0.3, 200, 3).unwrap();
        assert_eq!(rows[0].mean, 20.0);
        assert_eq!(rows[1].mean, 15.0);
    }

    #[test]
    fn moment_suite_small_z() {
        let p = p_for_p2(10, 10_000, 0.5).unwrap();
        assert!((p_k(10, 10_000, p, 2).unwrap() - 0.5).abs() < 1e-12);
        let rows = moment_suite(10, 10_000, p, 5_000, 17).unwrap();
        assert!((rows[0].expected - 15.0).abs() < 1e-9);
        for r in rows {
            assert!(r.z.abs() <= 5.0, "{r:?}");
        }
    }

    #[test]
    fn tv_lower_bound_null_and_dominated() {
        let a = GraphModel::Gnmp { n: 4, m: 100, p: 0.1 };
        let b = GraphModel::gn_phat(4, 100, 0.1).unwrap();
        let r = mc_tv_lower_bound(&a, &a, Statistic::Triangles, 5_000, 2).unwrap();
        assert!(r.estimate < 0.05 && r.null_reference < 0.05);
        let r = mc_tv_lower_bound(&a, &b, Statistic::Triangles, 20_000, 2).unwrap();
        let engine = ExactEngine::default();
        let exact = tv_exact(&engine.dist_gnmp(4, 100, 0.1).unwrap(), &engine.dist_gn_phat(4, 100, 0.1).unwrap()).unwrap();
        assert!(r.estimate <= exact + (r.ci_hi - r.ci_lo));
        assert!(r.ci_lo <= r.estimate && r.estimate <= r.ci_hi + 1e-12);
        let seq = exec::with_threads(1, || mc_tv_lower_bound(&a, &b, Statistic::Triangles, 20_000, 2).unwrap());
        assert_eq!(seq, r);
    }

    #[test]
    fn oracle_trivial_cases() {
        let g = Graph::complete(4).unwrap();
        assert_eq!(lemma_counting_oracle(&g, 0, OracleMode::Triangles).unwrap(), 1);
        assert_eq!(lemma_counting_oracle(&g, 1, OracleMode::Triangles).unwrap(), 4);
        assert_eq!(lemma_counting_oracle(&g, 2, OracleMode::Triangles).unwrap(), 0);
        assert_eq!(lemma_counting_oracle(&g, 1, OracleMode::K4s).unwrap(), 1);
        let big = Graph::complete(6).unwrap();
        assert!(matches!(lemma_counting_oracle(&big, 2, OracleMode::Triangles), Err(Error::Resource(_))));
        assert!(lemma_counting_oracle(&g, 5, OracleMode::Triangles).is_err());
    }

    #[test]
    fn oracle_bound_holds_exhaustively() {
        for n in [4usize, 5] {
            for mask in 0..1u64 << crate::graph::edge_slots(n) {
                let g = Graph::from_mask(n, mask).unwrap();
                if triangle_count(&g) as usize > ORACLE_MAX_HYPEREDGES {
                    continue;
                }
                for t in 0..=3 {
                    let x = lemma_counting_oracle(&g, t, OracleMode::Triangles).unwrap() as i128;
                    assert!(x >= triangle_packing_lower_bound(&g, t));
                }
            }
        }
    }

    #[test]
    fn k4_set_matches_count() {
        for mask in (0..1u64 << 15).step_by(37) {
            let g = Graph::from_mask(6, mask).unwrap();
            assert_eq!(k4_set(&g).len() as u64, k4_count(&g));
        }
    }
}
