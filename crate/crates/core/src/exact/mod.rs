//! Exact laws over all `2^C(n,2)` labeled graphs on a small vertex set.
//!
//! For a model whose cumulative probabilities `Pr[X ⊆ H]` have a closed form
//! in the clique profile of `H`, the point law is obtained by sweeping every
//! mask `H` for its profile and applying the lattice Möbius transform.

mod binomial;
mod lattice;

use std::collections::BTreeMap;
use std::io::{self, Read, Write};

pub use binomial::{tv_binomial_bound, tv_binomial_exact, tv_gn_p2_vs_phat, P2VsPhat};
pub use lattice::{mobius_edge_lattice, mobius_edge_lattice_seq, mobius_edge_lattice_two, zeta_edge_lattice};

use crate::error::{invalid, resource, Error, Result};
use crate::exec;
use crate::graph::{clique_profile, edge_endpoints, edge_slots, for_each_clique_in, mask_to_hex, Graph};
use crate::models::{p_hat, ModelParams};
use crate::numeric::{choose_u64, pow_int, pow_one_minus, CompensatedSum, TwoFloat};

/// Default largest `n`: `2^21` masks, about 50 MB at peak.
pub const DEFAULT_MAX_N: usize = 7;
/// Largest `n` reachable with the opt-in: `2^28` masks, about 6 GB at peak.
pub const OPT_IN_MAX_N: usize = 8;
/// Raw transform output must sum to one within this before clamping.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Size-capped builder for exact distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactEngine {
    max_n: usize,
}

impl Default for ExactEngine {
    fn default() -> Self {
        Self { max_n: DEFAULT_MAX_N }
    }
}

/// Dense probability vector over edge masks of `K_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDistribution {
    n: usize,
    probs: Vec<f64>,
    label: String,
    residual: f64,
    max_negativity: f64,
}

impl GraphDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `|Σ raw - 1|` of the transform output before clamping.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest magnitude among negative raw entries that were clamped to 0.
    pub fn max_negativity(&self) -> f64 {
        self.max_negativity
    }

    pub fn prob(&self, g: &Graph) -> Result<f64> {
        if g.n() != self.n {
            return Err(invalid!("graph on {} vertices, distribution on {}", g.n(), self.n));
        }
        Ok(self.probs[g.small_mask().expect("n <= 8") as usize])
    }

    /// `Pr[edge e present]`.
    pub fn edge_marginal(&self, e: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask >> e & 1 == 1)
            .map(|(_, &p)| p)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Law of `stat(G)` under this distribution.
    pub fn pushforward<F: Fn(&Graph) -> u64>(&self, stat: F) -> BTreeMap<u64, f64> {
        let mut sums: BTreeMap<u64, CompensatedSum> = BTreeMap::new();
        for (mask, &p) in self.probs.iter().enumerate() {
            let g = Graph::from_mask(self.n, mask as u64).expect("mask in range");
            sums.entry(stat(&g)).or_default().add(p);
        }
        sums.into_iter().map(|(k, s)| (k, s.value())).collect()
    }

    /// Binary export: `n: u32`, label length `u32`, label bytes, length `u64`,
    /// then `length` little-endian `f64` values. All integers little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.label.len() as u32).to_le_bytes())?;
        w.write_all(self.label.as_bytes())?;
        w.write_all(&(self.probs.len() as u64).to_le_bytes())?;
        for p in &self.probs {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io_err = |e: io::Error| Error::Parse(format!("binary distribution: {e}"));
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(io_err)?;
        let n = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4).map_err(io_err)?;
        let mut label = vec![0u8; u32::from_le_bytes(b4) as usize];
        r.read_exact(&mut label).map_err(io_err)?;
        let label = String::from_utf8(label).map_err(|e| Error::Parse(e.to_string()))?;
        r.read_exact(&mut b8).map_err(io_err)?;
        let len = u64::from_le_bytes(b8);
        if !(2..=OPT_IN_MAX_N).contains(&n) || len != 1u64 << edge_slots(n) {
            return Err(Error::Parse(format!("header n={n}, length={len} is inconsistent")));
        }
        let mut probs = Vec::with_capacity(len as usize);
        for _ in 0..len {
            r.read_exact(&mut b8).map_err(io_err)?;
            probs.push(f64::from_le_bytes(b8));
        }
        Ok(Self {
            n,
            probs,
            label,
            residual: 0.0,
            max_negativity: 0.0,
        })
    }

    /// CSV export `mask,probability` (mask in the graph-text hex encoding) for
    /// entries strictly above `threshold`.
    pub fn write_csv<W: Write>(&self, w: W, threshold: f64) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| Error::Parse(e.to_string());
        out.write_record(["mask", "probability"]).map_err(err)?;
        let slots = edge_slots(self.n);
        for (mask, &p) in self.probs.iter().enumerate() {
            if p > threshold {
                out.write_record([mask_to_hex(&[mask as u64], slots), p.to_string()])
                    .map_err(err)?;
            }
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `Pr[G(n,m;p) ⊆ H]`. Every column's vertex set must be a clique of `H`
/// (sizes 0 and 1 always are), so this is `q_H^m` with
/// `q_H = Σ_k c_k(H) p^k (1-p)^{n-k}`. The complement `1 - q_H` is summed
/// over the non-clique subsets directly so no precision is lost for small `p`.
pub fn subset_prob_gnmp(h: &Graph, m: u64, p: f64) -> f64 {
    let n = h.n();
    let profile: Vec<u32> = clique_profile(h).iter().map(|&c| c as u32).collect();
    let weights = column_weights(n, p);
    gnmp_cumulative(n, m, &weights, &profile).value()
}

/// `Pr[G(n,(p_k)) ⊆ H] = Π_k (1 - p_k)^{C(n,k) - c_k(H)}` with `pks = (p_2, …)`.
pub fn subset_prob_clique_cover(h: &Graph, pks: &[f64]) -> f64 {
    let profile: Vec<u32> = clique_profile(h).iter().map(|&c| c as u32).collect();
    let logs = log_one_minus(pks);
    clique_cover_cumulative(h.n(), &logs, &profile).value()
}

fn column_weights(n: usize, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| pow_int(p, k as u64) * pow_one_minus(p, (n - k) as u64))
        .collect()
}

fn log_one_minus(pks: &[f64]) -> Vec<f64> {
    pks.iter().map(|&pk| (-pk).ln_1p()).collect()
}

#[inline]
fn gnmp_cumulative(n: usize, m: u64, weights: &[f64], profile: &[u32]) -> TwoFloat {
    let mut deficit = 0.0;
    for k in 2..=n {
        let missing = choose_u64(n as u64, k as u64).unwrap() - u64::from(profile[k]);
        if missing > 0 {
            deficit += missing as f64 * weights[k];
        }
    }
    TwoFloat::exp_nonpositive((m as f64) * (-deficit).ln_1p())
}

#[inline]
fn clique_cover_cumulative(n: usize, logs: &[f64], profile: &[u32]) -> TwoFloat {
    let mut log_sum = 0.0;
    for (i, &l) in logs.iter().enumerate() {
        let k = i + 2;
        let missing = choose_u64(n as u64, k as u64).unwrap() - u64::from(profile[k]);
        if missing > 0 {
            log_sum += missing as f64 * l;
        }
    }
    TwoFloat::exp_nonpositive(log_sum)
}

const SWEEP_BLOCK_BITS: usize = 12;

fn adjacency_of(n: usize, mask: u64, ends: &[(usize, usize)]) -> [u32; 8] {
    let mut adj = [0u32; 8];
    let mut bits = mask;
    while bits != 0 {
        let (i, j) = ends[bits.trailing_zeros() as usize];
        bits &= bits - 1;
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    debug_assert!(n <= 8);
    adj
}

/// `out[mask] = f(clique profile of mask)` for every mask. Within each block
/// of `2^12` consecutive masks the profile of `mask` is derived from that of
/// `mask` minus its highest low-order edge plus the cliques through that edge.
fn sweep_profiles<F>(n: usize, f: F) -> Vec<TwoFloat>
where
    F: Fn(&[u32]) -> TwoFloat + Sync + Send,
{
    let slots = edge_slots(n);
    let ends: Vec<(usize, usize)> = (0..slots).map(edge_endpoints).collect();
    let all = (1u32 << n) - 1;
    let block_bits = SWEEP_BLOCK_BITS.min(slots);
    let block_len = 1usize << block_bits;
    let mut out = vec![TwoFloat::default(); 1usize << slots];
    exec::for_each_chunk_mut(&mut out, block_len, |b, chunk| {
        let base = (b as u64) << block_bits;
        let mut local = vec![[0u32; 9]; block_len];
        let adj = adjacency_of(n, base, &ends);
        let mut first = [0u32; 9];
        for_each_clique_in(&adj[..n], all, &mut |k| first[k] += 1);
        local[0] = first;
        chunk[0] = f(&first[..=n]);
        for low in 1..block_len {
            let top = 63 - (low as u64).leading_zeros() as usize;
            let mut prof = local[low ^ (1 << top)];
            let adj = adjacency_of(n, base | low as u64, &ends);
            let (i, j) = ends[top];
            for_each_clique_in(&adj[..n], adj[i] & adj[j], &mut |s| prof[s + 2] += 1);
            local[low] = prof;
            chunk[low] = f(&prof[..=n]);
        }
    });
    out
}

fn round(xs: Vec<TwoFloat>) -> Vec<f64> {
    exec::map_range(0..xs.len() as u64, |i| xs[i as usize].value())
}

fn finalize(n: usize, mut probs: Vec<f64>, label: String) -> Result<GraphDistribution> {
    let raw_sum = compensated_total(&probs);
    let residual = (raw_sum - 1.0).abs();
    let min = probs.iter().copied().fold(0.0f64, f64::min);
    if !(residual < SUM_TOLERANCE) || min < -SUM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "{label}: transform residual {residual:.3e}, most negative entry {min:.3e}"
        )));
    }
    for p in probs.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total = compensated_total(&probs);
    if total != 1.0 {
        exec::for_each_chunk_mut(&mut probs, 1 << 14, |_, c| c.iter_mut().for_each(|p| *p /= total));
    }
    Ok(GraphDistribution {
        n,
        probs,
        label,
        residual,
        max_negativity: -min,
    })
}

/// Compensated sum with a fixed block structure, so the result does not
/// depend on the thread count.
fn compensated_total(xs: &[f64]) -> f64 {
    const BLOCK: usize = 1 << 12;
    let blocks = xs.len().div_ceil(BLOCK) as u64;
    let partial = exec::map_range(0..blocks, |b| {
        let lo = b as usize * BLOCK;
        let hi = (lo + BLOCK).min(xs.len());
        xs[lo..hi].iter().copied().collect::<CompensatedSum>()
    });
    let mut acc = CompensatedSum::new();
    for s in partial {
        acc.add(s.value());
    }
    acc.value()
}

impl ExactEngine {
    /// `allow_n8` lifts the cap from 7 to 8 vertices.
    pub fn new(allow_n8: bool) -> Self {
        Self {
            max_n: if allow_n8 { OPT_IN_MAX_N } else { DEFAULT_MAX_N },
        }
    }

    pub fn with_max_n(max_n: usize) -> Result<Self> {
        if !(2..=OPT_IN_MAX_N).contains(&max_n) {
            return Err(invalid!("exact cap {max_n} outside 2..={OPT_IN_MAX_N}"));
        }
        Ok(Self { max_n })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    fn check(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(invalid!("n = {n} must be at least 2"));
        }
        if n > self.max_n {
            return Err(resource!(
                "exact distribution on n = {n} vertices exceeds the cap {} (2^{} masks)",
                self.max_n,
                edge_slots(n)
            ));
        }
        Ok(())
    }

    /// `Pr[G(n,pe) = G] = pe^{|G|} (1-pe)^{C(n,2)-|G|}`.
    pub fn dist_gnp(&self, n: usize, pe: f64) -> Result<GraphDistribution> {
        self.check(n)?;
        if !(0.0..=1.0).contains(&pe) {
            return Err(invalid!("edge probability {pe} outside [0, 1]"));
        }
        let slots = edge_slots(n);
        let by_count: Vec<f64> = (0..=slots)
            .map(|c| pow_int(pe, c as u64) * pow_one_minus(pe, (slots - c) as u64))
            .collect();
        let mut probs = vec![0.0; 1usize << slots];
        exec::for_each_chunk_mut(&mut probs, 1 << 14, |b, chunk| {
            let base = b << 14;
            for (i, v) in chunk.iter_mut().enumerate() {
                *v = by_count[(base + i).count_ones() as usize];
            }
        });
        finalize(n, probs, format!("gnp(n={n},p={pe})"))
    }

    /// Point law of `G(n,m;p)`.
    pub fn dist_gnmp(&self, n: usize, m: u64, p: f64) -> Result<GraphDistribution> {
        self.check(n)?;
        ModelParams::new(n, m, p)?;
        let weights = column_weights(n, p);
        let mut cumulative = sweep_profiles(n, |prof| gnmp_cumulative(n, m, &weights, prof));
        mobius_edge_lattice_two(&mut cumulative)?;
        finalize(n, round(cumulative), format!("gnmp(n={n},m={m},p={p})"))
    }

    /// Point law of `G(n,(p_k))` for `pks = (p_2, …, p_kmax)`; sizes above
    /// `kmax` are never included.
    pub fn dist_clique_cover(&self, n: usize, pks: &[f64]) -> Result<GraphDistribution> {
        self.check(n)?;
        if pks.is_empty() || pks.len() > n - 1 {
            return Err(invalid!("need 1..={} probabilities p_2..p_kmax, got {}", n - 1, pks.len()));
        }
        if let Some(bad) = pks.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid!("clique probability {bad} outside [0, 1]"));
        }
        let logs = log_one_minus(pks);
        let mut cumulative = sweep_profiles(n, |prof| clique_cover_cumulative(n, &logs, prof));
        mobius_edge_lattice_two(&mut cumulative)?;
        let kmax = pks.len() + 1;
        finalize(n, round(cumulative), format!("clique_cover(n={n},kmax={kmax})"))
    }

    /// `G(n, p̂)` for the given intersection-graph parameters.
    pub fn dist_gn_phat(&self, n: usize, m: u64, p: f64) -> Result<GraphDistribution> {
        self.dist_gnp(n, p_hat(m, p))
    }
}

/// `½ Σ |D1 - D2|` over all masks.
pub fn tv_exact(d1: &GraphDistribution, d2: &GraphDistribution) -> Result<f64> {
    if d1.n != d2.n {
        return Err(invalid!("distributions on {} and {} vertices", d1.n, d2.n));
    }
    const BLOCK: usize = 1 << 12;
    let len = d1.probs.len();
    let blocks = len.div_ceil(BLOCK) as u64;
    let partial = exec::map_range(0..blocks, |b| {
        let lo = b as usize * BLOCK;
        let hi = (lo + BLOCK).min(len);
        d1.probs[lo..hi]
            .iter()
            .zip(&d2.probs[lo..hi])
            .map(|(a, b)| (a - b).abs())
            .collect::<CompensatedSum>()
    });
    let mut acc = CompensatedSum::new();
    for s in partial {
        acc.add(s.value());
    }
    Ok((0.5 * acc.value()).clamp(0.0, 1.0))
}

/// TV between two laws on the integers given as maps.
pub fn tv_maps(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for (k, &pa) in a {
        acc.add((pa - b.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, &pb) in b {
        if !a.contains_key(k) {
            acc.add(pb.abs());
        }
    }
    0.5 * acc.value()
}
