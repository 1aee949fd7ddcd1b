//! Seeded samplers for `G(n,p)`, `G(n,m;p)`, the clique-cover graph
//! `G(n,(p_k))` and the Poissonized clique stream `G_Y`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::incidence::IncidenceMatrix;
use super::params::{r_k, ModelParams};
use super::poisson::PoissonSampler;
use crate::error::{invalid, resource, Result};
use crate::graph::{edge_endpoints, edge_slots, Graph, MAX_VERTICES};
use crate::numeric::{choose, choose_u64};
use crate::rng::{from_seed, open_unit};

/// Above this many columns `sample_gnmp` switches to the column-class path.
pub const FULL_MATRIX_MAX_COLUMNS: u64 = 1_000_000;
/// Explicit full-matrix requests beyond this are refused (memory).
const FULL_MATRIX_HARD_LIMIT: u64 = 100_000_000;
/// Largest expected number of included sets `sample_clique_cover` will attempt.
pub const MAX_EXPECTED_SETS: f64 = 1e8;

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_VERTICES).contains(&n) {
        return Err(invalid!("vertex count {n} outside 2..={MAX_VERTICES}"));
    }
    Ok(())
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid!("{name} = {p} outside [0, 1]"));
    }
    Ok(())
}

/// Number of Bernoulli(p) failures before the next success; `u64::MAX` when `p = 0`.
fn geometric_gap<R: Rng + ?Sized>(rng: &mut R, ln_q: f64) -> u64 {
    if ln_q == 0.0 {
        return u64::MAX;
    }
    // as-cast saturates, which is what we want for astronomically long gaps
    (open_unit(rng).ln() / ln_q).floor() as u64
}

pub fn sample_gnp_with<R: Rng + ?Sized>(n: usize, pe: f64, rng: &mut R) -> Result<Graph> {
    check_n(n)?;
    check_prob("edge probability", pe)?;
    let slots = edge_slots(n);
    let mut edges = Vec::new();
    for e in 0..slots {
        if rng.random::<f64>() < pe {
            edges.push(edge_endpoints(e));
        }
    }
    Graph::from_edges(n, edges)
}

/// `G(n, pe)`: each of the `C(n,2)` edges independently with probability `pe`.
pub fn sample_gnp(n: usize, pe: f64, seed: u64) -> Result<Graph> {
    sample_gnp_with(n, pe, &mut from_seed(seed))
}

/// Uniform `k`-subset of `{0..n-1}` (Floyd's algorithm).
fn random_k_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> u32 {
    let mut set = 0u32;
    for j in (n - k)..n {
        let t = rng.random_range(0..=j);
        if set >> t & 1 == 1 {
            set |= 1 << j;
        } else {
            set |= 1 << t;
        }
    }
    set
}

/// Endless i.i.d. stream of random cliques `K⁽¹⁾, K⁽²⁾, …`: size `k >= 2`
/// with probability `r_k / q₂`, then a uniform `k`-subset.
#[derive(Debug, Clone)]
pub struct CliqueStream {
    n: usize,
    /// cumulative `r_k` for `k = 2..=n`
    cumulative: Vec<f64>,
}

impl CliqueStream {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_n(n)?;
        check_prob("p", p)?;
        let mut acc = 0.0;
        let cumulative = (2..=n)
            .map(|k| {
                acc += r_k(n, p, k);
                acc
            })
            .collect();
        Ok(Self { n, cumulative })
    }

    /// `q₂` as accumulated by the stream (0 means the stream is empty).
    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn next_size<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        2 + idx.min(self.cumulative.len() - 1)
    }

    pub fn next_set<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let k = self.next_size(rng);
        random_k_subset(self.n, k, rng)
    }
}

/// Where a `G(n,m;p)` sample keeps its column information.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnRecord {
    /// The full incidence matrix (used for `m <= FULL_MATRIX_MAX_COLUMNS`).
    Matrix(IncidenceMatrix),
    /// Number of columns with exactly `k` ones, `k = 0..=n`.
    Classed(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnmpSample {
    pub graph: Graph,
    pub columns: ColumnRecord,
}

impl GnmpSample {
    /// Columns with exactly three ones.
    pub fn artifact_triangles(&self) -> u64 {
        match &self.columns {
            ColumnRecord::Matrix(r) => super::artifact_triangle_columns(r),
            ColumnRecord::Classed(counts) => counts.get(3).copied().unwrap_or(0),
        }
    }

    /// Number of columns of each size `k = 0..=n`.
    pub fn class_counts(&self) -> Vec<u64> {
        match &self.columns {
            ColumnRecord::Matrix(r) => {
                let mut counts = vec![0u64; r.n() + 1];
                for &c in r.columns() {
                    counts[c.count_ones() as usize] += 1;
                }
                counts
            }
            ColumnRecord::Classed(counts) => counts.clone(),
        }
    }
}

fn check_gnmp(params: &ModelParams) -> Result<()> {
    check_n(params.n)?;
    (params.n as u64)
        .checked_mul(params.m)
        .ok_or_else(|| invalid!("n * m = {} * {} overflows", params.n, params.m))?;
    Ok(())
}

/// Materialises `R(n,m;p)` by geometric skipping along each row
/// (`O(nmp + n + m)` expected work), then takes the clique union of the columns.
pub fn sample_gnmp_full<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<GnmpSample> {
    check_gnmp(params)?;
    let ModelParams { n, m, p } = *params;
    if m > FULL_MATRIX_HARD_LIMIT {
        return Err(resource!("full incidence matrix with m = {m} columns"));
    }
    let mut columns = vec![0u32; m as usize];
    let ln_q = (-p).ln_1p();
    for v in 0..n {
        let mut pos = geometric_gap(rng, ln_q);
        while pos < m {
            columns[pos as usize] |= 1 << v;
            pos = pos.saturating_add(1).saturating_add(geometric_gap(rng, ln_q));
        }
    }
    let matrix = IncidenceMatrix::new(n, columns)?;
    Ok(GnmpSample {
        graph: matrix.graph(),
        columns: ColumnRecord::Matrix(matrix),
    })
}

/// Draws the column-size class counts `(N_0, …, N_n) ~ Multinomial(m; r_0..r_n)`
/// as a chain of conditional binomials, then `N_k` uniform `k`-subsets per
/// class. Columns are i.i.d., so this has the law of the full-matrix path.
/// Drawing stops early once the union is complete; later cliques cannot
/// change the graph.
pub fn sample_gnmp_classed<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<GnmpSample> {
    check_gnmp(params)?;
    let ModelParams { n, m, p } = *params;
    let r: Vec<f64> = (0..=n).map(|k| r_k(n, p, k)).collect();
    // suffix[k] = Σ_{j>=k} r_j, summed from the small end
    let mut suffix = vec![0.0; n + 2];
    for k in (0..=n).rev() {
        suffix[k] = suffix[k + 1] + r[k];
    }
    let low = r[0] + r[1];
    let mut counts = vec![0u64; n + 1];
    let mut remaining = m;
    for k in 2..=n {
        if remaining == 0 {
            break;
        }
        let denom = low + suffix[k];
        let cond = if denom > 0.0 { (r[k] / denom).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, cond)
            .map_err(|e| invalid!("binomial({remaining}, {cond}): {e}"))?
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
    }
    // split what is left between sizes 0 and 1
    let cond1 = if low > 0.0 { (r[1] / low).clamp(0.0, 1.0) } else { 0.0 };
    counts[1] = Binomial::new(remaining, cond1)
        .map_err(|e| invalid!("binomial({remaining}, {cond1}): {e}"))?
        .sample(rng);
    counts[0] = remaining - counts[1];

    let mut graph = Graph::empty(n)?;
    'classes: for (k, &count) in counts.iter().enumerate().skip(2) {
        for _ in 0..count {
            if graph.is_complete() {
                break 'classes;
            }
            graph.add_clique(random_k_subset(n, k, rng));
        }
    }
    Ok(GnmpSample {
        graph,
        columns: ColumnRecord::Classed(counts),
    })
}

pub fn sample_gnmp_with<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<GnmpSample> {
    if params.m <= FULL_MATRIX_MAX_COLUMNS {
        sample_gnmp_full(params, rng)
    } else {
        sample_gnmp_classed(params, rng)
    }
}

/// `G(n,m;p)` with its column record (full matrix for `m <= 10⁶`, class
/// counts above).
pub fn sample_gnmp(n: usize, m: u64, p: f64, seed: u64) -> Result<GnmpSample> {
    let params = ModelParams::new(n, m, p)?;
    sample_gnmp_with(&params, &mut from_seed(seed))
}

/// Outcome of one clique-cover draw.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueCoverSample {
    pub graph: Graph,
    /// Number of included `k`-sets, indexed by `k = 0..=n`.
    pub included: Vec<u64>,
}

impl CliqueCoverSample {
    /// Whether any set of size at least five was included.
    pub fn large_sets_included(&self) -> bool {
        self.included.iter().skip(5).any(|&c| c > 0)
    }
}

struct Binomials([[u64; MAX_VERTICES + 1]; MAX_VERTICES + 1]);

impl Binomials {
    fn new() -> Self {
        let mut t = [[0u64; MAX_VERTICES + 1]; MAX_VERTICES + 1];
        for (a, row) in t.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = choose_u64(a as u64, b as u64).expect("fits for a <= 32");
            }
        }
        Self(t)
    }

    /// `k`-subset of colex rank `rank` (combinatorial number system).
    fn unrank(&self, n: usize, k: usize, mut rank: u64) -> u32 {
        let mut set = 0u32;
        let mut c = n;
        for i in (1..=k).rev() {
            c -= 1;
            while self.0[c][i] > rank {
                c -= 1;
            }
            set |= 1 << c;
            rank -= self.0[c][i];
        }
        set
    }
}

/// Expected number of included sets `Σ_k C(n,k) p_k` for `pks = (p_2, …)`.
fn expected_sets(n: usize, pks: &[f64]) -> f64 {
    pks.iter()
        .enumerate()
        .map(|(i, &pk)| choose(n as u64, (i + 2) as u64) * pk)
        .sum()
}

/// `Σ_{k>=5} C(n,k) p_k`, the union bound on including any set of size at least five.
pub fn large_set_union_bound(n: usize, pks: &[f64]) -> f64 {
    pks.iter()
        .enumerate()
        .filter(|(i, _)| i + 2 >= 5)
        .map(|(i, &pk)| choose(n as u64, (i + 2) as u64) * pk)
        .fold(0.0, |a, b| a + b)
}

/// Exact `Pr[some set of size >= 5 is included] = 1 - Π_{k>=5} (1-p_k)^{C(n,k)}`.
pub fn large_set_inclusion_probability(n: usize, pks: &[f64]) -> f64 {
    let log_none: f64 = pks
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 2 >= 5)
        .map(|(i, &pk)| {
            let c = choose(n as u64, (i + 2) as u64);
            if pk >= 1.0 {
                f64::NEG_INFINITY
            } else {
                c * (-pk).ln_1p()
            }
        })
        .fold(0.0, |a, b| a + b);
    0.0 - log_none.exp_m1()
}

pub fn sample_clique_cover_with<R: Rng + ?Sized>(
    n: usize,
    pks: &[f64],
    rng: &mut R,
) -> Result<CliqueCoverSample> {
    check_n(n)?;
    if pks.is_empty() || pks.len() > n - 1 {
        return Err(invalid!("need 1..={} probabilities p_2..p_kmax, got {}", n - 1, pks.len()));
    }
    for (i, &pk) in pks.iter().enumerate() {
        check_prob(&format!("p_{}", i + 2), pk)?;
    }
    let expected = expected_sets(n, pks);
    if expected > MAX_EXPECTED_SETS {
        return Err(resource!(
            "expected {expected:.3e} included sets exceeds {MAX_EXPECTED_SETS:.0e}"
        ));
    }
    let binom = Binomials::new();
    let mut graph = Graph::empty(n)?;
    let mut included = vec![0u64; n + 1];
    for (i, &pk) in pks.iter().enumerate() {
        let k = i + 2;
        let total = binom.0[n][k];
        let ln_q = (-pk).ln_1p();
        let mut rank = geometric_gap(rng, ln_q);
        while rank < total {
            graph.add_clique(binom.unrank(n, k, rank));
            included[k] += 1;
            rank = rank.saturating_add(1).saturating_add(geometric_gap(rng, ln_q));
        }
    }
    Ok(CliqueCoverSample { graph, included })
}

/// `G(n,(p_k))` with `pks = (p_2, …, p_kmax)`: every `k`-subset is included
/// independently with probability `p_k`, and the graph is the clique union.
pub fn sample_clique_cover(n: usize, pks: &[f64], seed: u64) -> Result<CliqueCoverSample> {
    sample_clique_cover_with(n, pks, &mut from_seed(seed))
}

pub fn sample_poissonized_with<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<Graph> {
    check_n(params.n)?;
    let stream = CliqueStream::new(params.n, params.p)?;
    let mut graph = Graph::empty(params.n)?;
    let q2 = stream.total();
    if q2 <= 0.0 {
        return Ok(graph);
    }
    let y = PoissonSampler::new(params.m as f64 * q2)?.sample(rng);
    for _ in 0..y {
        if graph.is_complete() {
            break;
        }
        graph.add_clique(stream.next_set(rng));
    }
    Ok(graph)
}

/// `G_Y`: `Y ~ Poisson(m q₂)` cliques from the [`CliqueStream`], united.
pub fn sample_poissonized(n: usize, m: u64, p: f64, seed: u64) -> Result<Graph> {
    let params = ModelParams::new(n, m, p)?;
    sample_poissonized_with(&params, &mut from_seed(seed))
}
