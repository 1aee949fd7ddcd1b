//! Maximal couplings of integer laws, and the shared-clique-stream coupling
//! of `G(n,m;p)` with the clique-cover graph `G(n,(p_k))`.

use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, resource, Error, Result};
use crate::exec;
use crate::graph::Graph;
use crate::models::{CliqueStream, ModelParams};
use crate::numeric::{binomial_pmf, poisson_pmf, wilson_interval, CompensatedSum, Z95};
use crate::rng::{from_seed, split};

/// Tail mass below which binomial and Poisson supports are cut.
pub const TAIL_CUTOFF: f64 = 1e-15;
/// Largest `E[max(X,Y)]` a single coupled trial is allowed to cost.
pub const MAX_EXPECTED_CLIQUES: f64 = 1e8;

/// Finitely supported law on the non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    support: Vec<u64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// `support` strictly increasing, `probs` non-negative summing to 1 within 1e-12.
    pub fn new(support: Vec<u64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(invalid!(
                "support of length {} with {} probabilities",
                support.len(),
                probs.len()
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid!("support must be strictly increasing"));
        }
        if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(invalid!("probability {bad} is not a finite non-negative number"));
        }
        let total: CompensatedSum = probs.iter().copied().collect();
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(invalid!("probabilities sum to {}", total.value()));
        }
        Ok(Self { support, probs })
    }

    /// Point mass at `x`.
    pub fn point(x: u64) -> Self {
        Self {
            support: vec![x],
            probs: vec![1.0],
        }
    }

    /// `Bin(trials, p)` on the window carrying all but `TAIL_CUTOFF` of the mass.
    pub fn binomial(trials: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid!("binomial p = {p} outside [0, 1]"));
        }
        if p == 0.0 {
            return Ok(Self::point(0));
        }
        if p == 1.0 {
            return Ok(Self::point(trials));
        }
        let mean = trials as f64 * p;
        let sd = (mean * (1.0 - p)).sqrt();
        let (lo, hi) = window(mean, sd, Some(trials));
        Self::from_pmf(lo, hi, |x| binomial_pmf(trials, p, x))
    }

    /// `Poisson(lambda)` on the window carrying all but `TAIL_CUTOFF` of the mass.
    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid!("Poisson mean {lambda} must be finite and non-negative"));
        }
        if lambda == 0.0 {
            return Ok(Self::point(0));
        }
        let (lo, hi) = window(lambda, lambda.sqrt(), None);
        Self::from_pmf(lo, hi, |x| poisson_pmf(lambda, x))
    }

    /// Tabulates `pmf` on `lo..=hi`, trims both tails while their mass stays
    /// below the cutoff, and folds the missing mass into the largest outcome.
    fn from_pmf(lo: u64, hi: u64, pmf: impl Fn(u64) -> f64) -> Result<Self> {
        let len = hi - lo + 1;
        if len > 50_000_000 {
            return Err(resource!("support window of {len} outcomes"));
        }
        let mut probs: Vec<f64> = (lo..=hi).map(&pmf).collect();
        let mut start = 0;
        let mut cut = 0.0;
        while start + 1 < probs.len() && cut + probs[start] < TAIL_CUTOFF / 2.0 {
            cut += probs[start];
            start += 1;
        }
        let mut end = probs.len();
        cut = 0.0;
        while end > start + 1 && cut + probs[end - 1] < TAIL_CUTOFF / 2.0 {
            cut += probs[end - 1];
            end -= 1;
        }
        probs.truncate(end);
        probs.drain(..start);
        let kept: CompensatedSum = probs.iter().copied().collect();
        let last = probs.last_mut().expect("non-empty");
        *last = (*last + (1.0 - kept.value())).max(0.0);
        let support = (lo + start as u64..lo + end as u64).collect();
        Self::new(support, probs)
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn pmf(&self, x: u64) -> f64 {
        self.support
            .binary_search(&x)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&x, &p)| x as f64 * p)
            .collect::<CompensatedSum>()
            .value()
    }

    /// `½ Σ |P(x) - Q(x)|` over the union of supports.
    pub fn tv(&self, other: &Self) -> f64 {
        let acc: CompensatedSum = merge(self, other).map(|(_, a, b)| (a - b).abs()).collect();
        (0.5 * acc.value()).clamp(0.0, 1.0)
    }
}

fn window(mean: f64, sd: f64, cap: Option<u64>) -> (u64, u64) {
    let spread = 12.0 * sd + 40.0;
    let lo = (mean - spread).max(0.0).floor() as u64;
    let hi = (mean + spread).ceil() as u64;
    (lo, cap.map_or(hi, |c| hi.min(c)))
}

/// `(outcome, P(outcome), Q(outcome))` over the sorted union of supports.
fn merge<'a>(
    a: &'a DiscreteDistribution,
    b: &'a DiscreteDistribution,
) -> impl Iterator<Item = (u64, f64, f64)> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        let xa = a.support.get(i).copied();
        let xb = b.support.get(j).copied();
        match (xa, xb) {
            (None, None) => None,
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
                Some((x, a.probs[i - 1], b.probs[j - 1]))
            }
            (Some(x), Some(y)) if x < y => {
                i += 1;
                Some((x, a.probs[i - 1], 0.0))
            }
            (Some(x), None) => {
                i += 1;
                Some((x, a.probs[i - 1], 0.0))
            }
            (_, Some(y)) => {
                j += 1;
                Some((y, 0.0, b.probs[j - 1]))
            }
        }
    })
}

/// One joint draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoupledPair {
    pub x: u64,
    pub y: u64,
    pub matched: bool,
}

impl CoupledPair {
    fn new(x: u64, y: u64) -> Self {
        Self { x, y, matched: x == y }
    }
}

#[derive(Debug, Clone)]
struct Cdf {
    outcomes: Vec<u64>,
    cumulative: Vec<f64>,
}

impl Cdf {
    fn new(pairs: impl Iterator<Item = (u64, f64)>) -> Self {
        let mut outcomes = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = CompensatedSum::new();
        for (x, w) in pairs {
            if w > 0.0 {
                acc.add(w);
                outcomes.push(x);
                cumulative.push(acc.value());
            }
        }
        Self { outcomes, cumulative }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("non-empty residual");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.outcomes[i.min(self.outcomes.len() - 1)]
    }
}

/// Coupling of `P` and `Q` with `Pr[x != y] = tv(P, Q)`: with probability
/// `1 - tv` both coordinates come from the normalized overlap `min(P, Q)`,
/// otherwise each comes independently from its own normalized residual.
#[derive(Debug, Clone)]
pub struct MaximalCoupling {
    tv: f64,
    stay: f64,
    overlap: Option<Cdf>,
    residual_p: Option<Cdf>,
    residual_q: Option<Cdf>,
}

impl MaximalCoupling {
    pub fn new(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Self {
        let rows: Vec<(u64, f64, f64)> = merge(p, q).collect();
        let overlap = Cdf::new(rows.iter().map(|&(x, a, b)| (x, a.min(b))));
        let residual_p = Cdf::new(rows.iter().map(|&(x, a, b)| (x, (a - b).max(0.0))));
        let residual_q = Cdf::new(rows.iter().map(|&(x, a, b)| (x, (b - a).max(0.0))));
        let tv = p.tv(q);
        let stay = if residual_p.outcomes.is_empty() || residual_q.outcomes.is_empty() {
            1.0
        } else {
            1.0 - tv
        };
        let nonempty = |c: Cdf| (!c.outcomes.is_empty()).then_some(c);
        Self {
            tv,
            stay,
            overlap: nonempty(overlap),
            residual_p: nonempty(residual_p),
            residual_q: nonempty(residual_q),
        }
    }

    /// `tv(P, Q)`, which is also the exact mismatch probability.
    pub fn tv(&self) -> f64 {
        self.tv
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CoupledPair {
        let u: f64 = rng.random();
        match (&self.overlap, &self.residual_p, &self.residual_q) {
            (Some(o), _, _) if u < self.stay => {
                let x = o.sample(rng);
                CoupledPair::new(x, x)
            }
            (_, Some(rp), Some(rq)) => CoupledPair::new(rp.sample(rng), rq.sample(rng)),
            (Some(o), _, _) => {
                let x = o.sample(rng);
                CoupledPair::new(x, x)
            }
            _ => unreachable!("both laws have mass"),
        }
    }

    /// Endless stream of draws from a seeded generator.
    pub fn stream(&self, seed: u64) -> impl Iterator<Item = CoupledPair> + '_ {
        let mut rng = from_seed(seed);
        std::iter::repeat_with(move || self.sample(&mut rng))
    }
}

/// `maximal_coupling(P, Q, seed)`.
pub fn maximal_coupling(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    seed: u64,
) -> impl Iterator<Item = CoupledPair> {
    let coupling = MaximalCoupling::new(p, q);
    let mut rng = from_seed(seed);
    std::iter::repeat_with(move || coupling.sample(&mut rng))
}

/// Exact `tv(Bin(m,q₂), Poisson(m q₂))` next to the bound `q₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeCamGap {
    pub tv: f64,
    pub bound: f64,
}

impl LeCamGap {
    pub fn holds(&self) -> bool {
        self.tv <= self.bound
    }
}

pub fn lecam_gap(m: u64, q2: f64) -> Result<LeCamGap> {
    if !(q2 > 0.0 && q2 < 1.0) {
        return Err(invalid!("q2 = {q2} outside (0, 1)"));
    }
    if m == 0 {
        return Err(invalid!("m must be at least 1"));
    }
    let bin = DiscreteDistribution::binomial(m, q2)?;
    let poi = DiscreteDistribution::poisson(m as f64 * q2)?;
    Ok(LeCamGap {
        tv: bin.tv(&poi),
        bound: q2,
    })
}

/// Outcome of one shared-stream trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledModel {
    /// Distributed as `G(n,m;p)`: the union of the first `x` stream cliques.
    pub graph_a: Graph,
    /// Distributed as `G(n,(p_k))`: the union of the first `y` stream cliques.
    pub graph_b: Graph,
    pub x: u64,
    pub y: u64,
    pub matched: bool,
}

/// Reusable coupler for fixed `(n, m, p)`: `X ~ Bin(m, q₂)` counts the
/// columns with at least two ones, `Y ~ Poisson(m q₂)` is maximally coupled
/// to it, and the same i.i.d. clique stream feeds both graphs.
#[derive(Debug, Clone)]
pub struct ModelCoupler {
    n: usize,
    stream: Option<CliqueStream>,
    counts: MaximalCoupling,
}

impl ModelCoupler {
    pub fn new(n: usize, m: u64, p: f64) -> Result<Self> {
        let params = ModelParams::new(n, m, p)?;
        let q2 = params.q2();
        if q2 <= 0.0 {
            let point = DiscreteDistribution::point(0);
            return Ok(Self {
                n,
                stream: None,
                counts: MaximalCoupling::new(&point, &point),
            });
        }
        let mean = m as f64 * q2;
        if mean > MAX_EXPECTED_CLIQUES {
            return Err(resource!(
                "expected {mean:.3e} cliques per trial exceeds {MAX_EXPECTED_CLIQUES:.0e}"
            ));
        }
        let bin = DiscreteDistribution::binomial(m, q2.min(1.0))?;
        let poi = DiscreteDistribution::poisson(mean)?;
        Ok(Self {
            n,
            stream: Some(CliqueStream::new(n, p)?),
            counts: MaximalCoupling::new(&bin, &poi),
        })
    }

    /// `Pr[X != Y] = tv(Bin(m,q₂), Poisson(m q₂))`.
    pub fn count_mismatch_probability(&self) -> f64 {
        self.counts.tv()
    }

    pub fn trial(&self, seed: u64) -> CoupledModel {
        let mut rng = from_seed(seed);
        let pair = self.counts.sample(&mut rng);
        let mut a = Graph::empty(self.n).expect("validated n");
        let mut b = a.clone();
        if let Some(stream) = &self.stream {
            let (x, y) = (pair.x, pair.y);
            for i in 0..x.max(y) {
                let set = stream.next_set(&mut rng);
                if i < x {
                    a.add_clique(set);
                }
                if i < y {
                    b.add_clique(set);
                }
                let a_done = i + 1 >= x || a.is_complete();
                let b_done = i + 1 >= y || b.is_complete();
                if a_done && b_done {
                    break;
                }
            }
        }
        let matched = a == b;
        CoupledModel {
            graph_a: a,
            graph_b: b,
            x: pair.x,
            y: pair.y,
            matched,
        }
    }
}

/// One trial of the shared-stream coupling.
pub fn coupled_model_pair(n: usize, m: u64, p: f64, seed: u64) -> Result<CoupledModel> {
    Ok(ModelCoupler::new(n, m, p)?.trial(seed))
}

/// One row of the optional trial log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "Y")]
    pub y: u64,
    pub matched: bool,
    #[serde(rename = "edgesA")]
    pub edges_a: usize,
    #[serde(rename = "edgesB")]
    pub edges_b: usize,
}

/// Per-trial records; trial `i` uses seed `split(seed, i)`.
pub fn coupling_trials(n: usize, m: u64, p: f64, trials: u64, seed: u64) -> Result<Vec<TrialRecord>> {
    let coupler = ModelCoupler::new(n, m, p)?;
    Ok(exec::map_range(0..trials, |i| {
        let s = split(seed, i);
        let t = coupler.trial(s);
        TrialRecord {
            seed: s,
            x: t.x,
            y: t.y,
            matched: t.matched,
            edges_a: t.graph_a.edge_count(),
            edges_b: t.graph_b.edge_count(),
        }
    }))
}

pub fn write_trial_log<W: Write>(records: &[TrialRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    out.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Empirical `Pr[graphA != graphB]`, an upper-bound estimate of
/// `tv(G(n,m;p), G(n,(p_k)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingEstimate {
    pub trials: u64,
    pub mismatches: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Exact `Pr[X != Y]`.
    pub count_mismatch: f64,
    /// Empirical `Pr[X != Y]`.
    pub count_mismatch_rate: f64,
}

impl CouplingEstimate {
    pub fn from_records(records: &[TrialRecord], count_mismatch: f64) -> Self {
        let trials = records.len() as u64;
        let mismatches = records.iter().filter(|r| !r.matched).count() as u64;
        let xy = records.iter().filter(|r| r.x != r.y).count() as u64;
        let (ci_lo, ci_hi) = wilson_interval(mismatches, trials, Z95);
        let rate = |k: u64| if trials == 0 { 0.0 } else { k as f64 / trials as f64 };
        Self {
            trials,
            mismatches,
            estimate: rate(mismatches),
            ci_lo,
            ci_hi,
            count_mismatch,
            count_mismatch_rate: rate(xy),
        }
    }
}

pub fn tv_upper_via_coupling(n: usize, m: u64, p: f64, trials: u64, seed: u64) -> Result<CouplingEstimate> {
    if trials == 0 {
        return Err(invalid!("trials must be at least 1"));
    }
    let coupler = ModelCoupler::new(n, m, p)?;
    let records = coupling_trials(n, m, p, trials, seed)?;
    Ok(CouplingEstimate::from_records(&records, coupler.count_mismatch_probability()))
}
