//! Labeled simple graphs on at most 32 vertices, stored as edge bitmasks in
//! colexicographic edge order, together with the clique and subgraph counts
//! used by the diagnostics.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Largest supported vertex count; vertex sets fit in one `u32`.
pub const MAX_VERTICES: usize = 32;
/// `C(32, 2)`.
pub const MAX_EDGES: usize = MAX_VERTICES * (MAX_VERTICES - 1) / 2;
const WORDS: usize = MAX_EDGES.div_ceil(64);

/// Number of edge slots `C(n, 2)`.
pub const fn edge_slots(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Colex slot of edge `{i, j}` with `i < j < n`: `C(j, 2) + i`.
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if n > MAX_VERTICES {
        return Err(invalid!("n = {n} exceeds {MAX_VERTICES}"));
    }
    if i >= j || j >= n {
        return Err(invalid!("edge ({i},{j}) needs 0 <= i < j < n = {n}"));
    }
    Ok(j * (j - 1) / 2 + i)
}

/// Inverse of [`edge_index`]: endpoints `(i, j)` with `i < j`.
pub fn edge_endpoints(e: usize) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * e as f64).sqrt()) / 2.0) as usize;
    while j * (j - 1) / 2 > e {
        j -= 1;
    }
    while (j + 1) * j / 2 <= e {
        j += 1;
    }
    (e - j * (j - 1) / 2, j)
}

#[inline]
fn above(v: usize) -> u32 {
    if v >= 31 {
        0
    } else {
        !0u32 << (v + 1)
    }
}

#[inline]
fn vertex_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Visit every clique (including the empty one) inside `cands`, calling
/// `visit(size)` once per clique. `adj[v]` is the neighbourhood of `v`.
pub(crate) fn for_each_clique_in(adj: &[u32], cands: u32, visit: &mut impl FnMut(usize)) {
    fn rec(adj: &[u32], cands: u32, size: usize, visit: &mut impl FnMut(usize)) {
        visit(size);
        let mut rest = cands;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            rec(adj, cands & adj[v] & above(v), size + 1, visit);
        }
    }
    rec(adj, cands, 0, visit);
}

/// A labeled simple graph on `n <= 32` vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: [u64; WORDS],
    adj: [u32; MAX_VERTICES],
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(invalid!("vertex count {n} outside 2..={MAX_VERTICES}"));
        }
        Ok(Self {
            n,
            words: [0; WORDS],
            adj: [0; MAX_VERTICES],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        g.add_clique(vertex_mask(n));
        Ok(g)
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (a, b) in edges {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            edge_index(i, j, n)?;
            g.insert_edge(i, j);
        }
        Ok(g)
    }

    /// Graph whose edge mask is the low `C(n,2)` bits of `mask`. Requires `C(n,2) <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let slots = edge_slots(n);
        if slots > 64 {
            return Err(invalid!("n = {n} has {slots} edge slots, more than fit in u64"));
        }
        if slots < 64 && mask >> slots != 0 {
            return Err(invalid!("mask {mask:#x} has bits beyond C({n},2) = {slots}"));
        }
        let mut words = [0u64; WORDS];
        words[0] = mask;
        Self::from_words(n, words)
    }

    fn from_words(n: usize, words: [u64; WORDS]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (w, &word) in words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let e = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if e >= edge_slots(n) {
                    return Err(invalid!("edge bit {e} beyond C({n},2)"));
                }
                let (i, j) = edge_endpoints(e);
                g.insert_edge(i, j);
            }
        }
        Ok(g)
    }

    fn insert_edge(&mut self, i: usize, j: usize) {
        let e = j * (j - 1) / 2 + i;
        self.words[e / 64] |= 1 << (e % 64);
        self.adj[i] |= 1 << j;
        self.adj[j] |= 1 << i;
    }

    /// Add every edge of the complete graph on vertex set `set`.
    pub(crate) fn add_clique(&mut self, set: u32) {
        let mut rest = set & vertex_mask(self.n);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut lower = set & ((1u32 << j) - 1);
            while lower != 0 {
                let i = lower.trailing_zeros() as usize;
                lower &= lower - 1;
                self.insert_edge(i, j);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && i < self.n && j < self.n && self.adj[i] >> j & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> u32 {
        self.adj[v]
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj[..self.n]
    }

    pub fn mask_words(&self) -> &[u64] {
        &self.words[..edge_slots(self.n).div_ceil(64)]
    }

    /// Edge mask as a `u64` when `C(n,2) <= 64`.
    pub fn small_mask(&self) -> Option<u64> {
        (edge_slots(self.n) <= 64).then_some(self.words[0])
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == edge_slots(self.n)
    }

    /// `true` when every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(invalid!("permutation length {} != n {}", perm.len(), self.n));
        }
        let mut seen = 0u64;
        for &v in perm {
            if v >= self.n || seen >> v & 1 == 1 {
                return Err(invalid!("not a permutation of 0..{}", self.n));
            }
            seen |= 1 << v;
        }
        let mut g = Self::empty(self.n)?;
        for j in 0..self.n {
            for i in 0..j {
                if self.has_edge(i, j) {
                    let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                    g.insert_edge(a, b);
                }
            }
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({self})")
    }
}

/// Lowercase hex of the low `slots` bits of `words`, least significant byte first.
pub(crate) fn mask_to_hex(words: &[u64], slots: usize) -> String {
    let bytes = slots.div_ceil(8).max(1);
    let mut out = String::with_capacity(bytes * 2);
    for b in 0..bytes {
        let byte = (words[b / 8] >> ((b % 8) * 8)) & 0xff;
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// `n=<n>;mask=<hex>`, the hex string being the edge bitmask byte-wise
/// little-endian (first two digits hold edges 0..8).
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};mask={}", self.n, mask_to_hex(&self.words, edge_slots(self.n)))
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `n=<n>;mask=<hex>`, got `{s}`"));
        let (n_part, mask_part) = s.trim().split_once(';').ok_or_else(bad)?;
        let n: usize = n_part
            .strip_prefix("n=")
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let hex = mask_part.strip_prefix("mask=").ok_or_else(bad)?;
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(Error::Parse(format!("vertex count {n} outside 2..={MAX_VERTICES}")));
        }
        let bytes = edge_slots(n).div_ceil(8);
        if hex.len() != 2 * bytes {
            return Err(Error::Parse(format!(
                "mask for n={n} needs {} hex digits, got {}",
                2 * bytes,
                hex.len()
            )));
        }
        let mut words = [0u64; WORDS];
        for b in 0..bytes {
            let byte = u64::from_str_radix(&hex[2 * b..2 * b + 2], 16).map_err(|_| bad())?;
            words[b / 8] |= byte << ((b % 8) * 8);
        }
        Graph::from_words(n, words).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `c[k]` = number of `k`-cliques of `g` for `k = 0..=n` (`c[0] = 1`, `c[1] = n`).
pub fn clique_profile(g: &Graph) -> Vec<u64> {
    let mut counts = vec![0u64; g.n + 1];
    for_each_clique_in(g.adjacency(), vertex_mask(g.n), &mut |k| counts[k] += 1);
    counts
}

/// Collection of vertex subsets of `{0,..,n-1}`, each of size at least two,
/// kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperedgeSet {
    n: usize,
    sets: Vec<u32>,
}

impl HyperedgeSet {
    pub fn new(n: usize, sets: impl IntoIterator<Item = u32>) -> Result<Self> {
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(invalid!("vertex count {n} outside 2..={MAX_VERTICES}"));
        }
        let mut sets: Vec<u32> = sets.into_iter().collect();
        for &s in &sets {
            if s & !vertex_mask(n) != 0 {
                return Err(invalid!("set {s:#b} uses vertices outside 0..{n}"));
            }
            if s.count_ones() < 2 {
                return Err(invalid!("set {s:#b} has fewer than two vertices"));
            }
        }
        sets.sort_unstable();
        let before = sets.len();
        sets.dedup();
        if sets.len() != before {
            return Err(invalid!("duplicate member sets"));
        }
        Ok(Self { n, sets })
    }

    /// Build from explicit vertex lists.
    pub fn from_lists<I, S>(n: usize, lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut masks = Vec::new();
        for list in lists {
            let mut m = 0u32;
            for &v in list.as_ref() {
                if v >= n {
                    return Err(invalid!("vertex {v} outside 0..{n}"));
                }
                if m >> v & 1 == 1 {
                    return Err(invalid!("vertex {v} repeated within a set"));
                }
                m |= 1 << v;
            }
            masks.push(m);
        }
        Self::new(n, masks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Members of `self` not already in `other` are appended; returns the union.
    pub fn union(&self, other: &HyperedgeSet) -> Result<Self> {
        if self.n != other.n {
            return Err(invalid!("vertex counts differ: {} vs {}", self.n, other.n));
        }
        let mut all = self.sets.clone();
        all.extend(&other.sets);
        all.sort_unstable();
        all.dedup();
        Ok(Self { n: self.n, sets: all })
    }
}

/// Every triangle of `g` as a set of 3-subsets.
pub fn triangle_set(g: &Graph) -> HyperedgeSet {
    let mut sets = Vec::new();
    for j in 0..g.n {
        let mut lower = g.adj[j] & ((1u32 << j) - 1);
        while lower != 0 {
            let i = lower.trailing_zeros() as usize;
            lower &= lower - 1;
            let mut common = g.adj[i] & g.adj[j] & above(j);
            while common != 0 {
                let k = common.trailing_zeros() as usize;
                common &= common - 1;
                sets.push((1u32 << i) | (1 << j) | (1 << k));
            }
        }
    }
    sets.sort_unstable();
    HyperedgeSet { n: g.n, sets }
}

/// `|H₃(G)|` without materialising the set.
pub fn triangle_count(g: &Graph) -> u64 {
    let mut count = 0u64;
    for j in 0..g.n {
        let mut lower = g.adj[j] & ((1u32 << j) - 1);
        while lower != 0 {
            let i = lower.trailing_zeros() as usize;
            lower &= lower - 1;
            count += u64::from((g.adj[i] & g.adj[j] & above(j)).count_ones());
        }
    }
    count
}

/// `|H₄(G)|`, the number of 4-cliques.
pub fn k4_count(g: &Graph) -> u64 {
    let mut count = 0u64;
    for j in 0..g.n {
        let mut lower = g.adj[j] & ((1u32 << j) - 1);
        while lower != 0 {
            let i = lower.trailing_zeros() as usize;
            lower &= lower - 1;
            let common = g.adj[i] & g.adj[j] & above(j);
            let mut rest = common;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                count += u64::from((g.adj[k] & common & above(k)).count_ones());
            }
        }
    }
    count
}

/// `I(G)`: unordered pairs of distinct triangles of `g` sharing an edge,
/// i.e. `Σ_{ij ∈ E} C(codeg(i,j), 2)`. Each diamond (K₄ minus an edge)
/// sitting on four vertices contributes one; `I(K_n) = 6·C(n,4)`.
pub fn diamond_count(g: &Graph) -> u64 {
    let mut count = 0u64;
    for j in 0..g.n {
        let mut lower = g.adj[j] & ((1u32 << j) - 1);
        while lower != 0 {
            let i = lower.trailing_zeros() as usize;
            lower &= lower - 1;
            let d = u64::from((g.adj[i] & g.adj[j]).count_ones());
            count += d * d.saturating_sub(1) / 2;
        }
    }
    count
}

/// `K(T)`: union of the complete graphs on the members of `t`.
pub fn clique_union(t: &HyperedgeSet) -> Graph {
    let mut g = Graph::empty(t.n).expect("HyperedgeSet has a valid vertex count");
    for &s in &t.sets {
        g.add_clique(s);
    }
    g
}

/// `I*(T)`: unordered pairs of members of `t` sharing exactly two vertices.
/// Every member must be a 3-set.
pub fn shared_edge_pairs(t: &HyperedgeSet) -> Result<u64> {
    if let Some(bad) = t.sets.iter().find(|s| s.count_ones() != 3) {
        return Err(invalid!("member {bad:#b} is not a 3-set"));
    }
    let mut count = 0u64;
    for (a, &s) in t.sets.iter().enumerate() {
        for &u in &t.sets[a + 1..] {
            if (s & u).count_ones() == 2 {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(n: usize) -> Graph {
        Graph::complete(n).unwrap()
    }

    fn c4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn diamond() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]).unwrap()
    }

    #[test]
    fn edge_index_examples() {
        assert_eq!(edge_index(0, 1, 4).unwrap(), 0);
        assert_eq!(edge_index(0, 2, 4).unwrap(), 1);
        assert_eq!(edge_index(2, 3, 4).unwrap(), 5);
        assert!(edge_index(2, 2, 4).is_err());
        assert!(edge_index(3, 2, 4).is_err());
        assert!(edge_index(0, 4, 4).is_err());
    }

    #[test]
    fn edge_index_round_trips_for_all_n() {
        for n in 2..=MAX_VERTICES {
            let mut next = 0;
            for j in 0..n {
                for i in 0..j {
                    let e = edge_index(i, j, n).unwrap();
                    assert_eq!(e, next, "colex order is dense and increasing in (j, i)");
                    assert_eq!(edge_endpoints(e), (i, j));
                    next += 1;
                }
            }
            assert_eq!(next, edge_slots(n));
        }
    }

    #[test]
    fn clique_profile_examples() {
        assert_eq!(clique_profile(&k(3)), vec![1, 3, 3, 1]);
        assert_eq!(clique_profile(&Graph::empty(3).unwrap()), vec![1, 3, 0, 0]);
        assert_eq!(clique_profile(&k(4)), vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn triangle_and_k4_examples() {
        assert_eq!(triangle_set(&k(4)).len(), 4);
        assert_eq!(triangle_set(&c4()).len(), 0);
        assert_eq!(triangle_set(&k(5)).len(), 10);
        assert_eq!(k4_count(&k(4)), 1);
        assert_eq!(k4_count(&k(5)), 5);
        assert_eq!(k4_count(&c4()), 0);
    }

    #[test]
    fn diamond_examples() {
        assert_eq!(diamond_count(&k(4)), 6);
        assert_eq!(diamond_count(&diamond()), 1);
        assert_eq!(diamond_count(&k(3)), 0);
        for n in 4..=8 {
            let c = (n * (n - 1) * (n - 2) * (n - 3) / 24) as u64;
            assert_eq!(diamond_count(&k(n)), 6 * c);
        }
    }

    #[test]
    fn clique_union_examples() {
        let t = HyperedgeSet::from_lists(6, [[0, 1, 2], [3, 4, 5]]).unwrap();
        assert_eq!(clique_union(&t).edge_count(), 6);
        let t = HyperedgeSet::from_lists(4, [[0, 1, 2], [0, 1, 3]]).unwrap();
        assert_eq!(clique_union(&t).edge_count(), 5);
        let t = HyperedgeSet::new(5, []).unwrap();
        assert_eq!(clique_union(&t), Graph::empty(5).unwrap());
    }

    #[test]
    fn shared_edge_pair_examples() {
        let t = HyperedgeSet::from_lists(4, [[0, 1, 2], [0, 1, 3]]).unwrap();
        assert_eq!(shared_edge_pairs(&t).unwrap(), 1);
        let t = HyperedgeSet::from_lists(6, [[0, 1, 2], [3, 4, 5]]).unwrap();
        assert_eq!(shared_edge_pairs(&t).unwrap(), 0);
        assert_eq!(shared_edge_pairs(&triangle_set(&k(4))).unwrap(), 6);
        let t = HyperedgeSet::from_lists(4, [vec![0, 1], vec![1, 2, 3]]).unwrap();
        assert!(matches!(shared_edge_pairs(&t), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hyperedge_set_validation() {
        assert!(HyperedgeSet::from_lists(4, [vec![0]]).is_err());
        assert!(HyperedgeSet::from_lists(4, [vec![0, 4]]).is_err());
        assert!(HyperedgeSet::from_lists(4, [vec![0, 1], vec![1, 0]]).is_err());
        let a = HyperedgeSet::from_lists(4, [vec![2, 3], vec![0, 1]]).unwrap();
        let b = HyperedgeSet::from_lists(4, [vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn counting_paths_agree_on_all_small_graphs() {
        for n in 2..=6usize {
            for mask in 0..(1u64 << edge_slots(n)) {
                let g = Graph::from_mask(n, mask).unwrap();
                let c = clique_profile(&g);
                assert_eq!(c[2], g.edge_count() as u64);
                assert_eq!(triangle_set(&g).len() as u64, *c.get(3).unwrap_or(&0));
                assert_eq!(triangle_count(&g), *c.get(3).unwrap_or(&0));
                assert_eq!(k4_count(&g), *c.get(4).unwrap_or(&0));
            }
        }
    }

    #[test]
    fn shared_edge_pairs_bound_overlap_exhaustively() {
        // 3|T| - |K(T)| <= I*(T) for every family of at most four 3-sets on n <= 6.
        for n in 3..=6usize {
            let triples: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() == 3).collect();
            let mut stack: Vec<(usize, Vec<u32>)> = vec![(0, vec![])];
            while let Some((start, chosen)) = stack.pop() {
                let t = HyperedgeSet::new(n, chosen.iter().copied()).unwrap();
                let lhs = 3 * t.len() as i64 - clique_union(&t).edge_count() as i64;
                assert!(lhs <= shared_edge_pairs(&t).unwrap() as i64);
                if chosen.len() < 4 {
                    for (idx, &s) in triples.iter().enumerate().skip(start) {
                        let mut next = chosen.clone();
                        next.push(s);
                        stack.push((idx + 1, next));
                    }
                }
            }
        }
    }

    #[test]
    fn text_format_examples() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.to_string(), "n=4;mask=21");
        let g = Graph::complete(5).unwrap();
        assert_eq!(g.to_string(), "n=5;mask=ff03");
        assert_eq!("n=5;mask=ff03".parse::<Graph>().unwrap(), g);
        assert!("n=4;mask=40".parse::<Graph>().is_err());
        assert!("n=4;mask=1".parse::<Graph>().is_err());
        assert!("x=4;mask=01".parse::<Graph>().is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..=32).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), edge_slots(n)).prop_map(move |bits| {
                Graph::from_edges(
                    n,
                    bits.iter()
                        .enumerate()
                        .filter(|(_, &b)| b)
                        .map(|(e, _)| edge_endpoints(e)),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn text_format_round_trips(g in arb_graph()) {
            let back: Graph = g.to_string().parse().unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn diamond_count_is_bounded(g in arb_graph()) {
            let n = g.n() as u64;
            let c4 = n * n.saturating_sub(1) * n.saturating_sub(2) * n.saturating_sub(3) / 24;
            prop_assert!(diamond_count(&g) <= 6 * c4);
        }

        #[test]
        fn clique_union_is_monotone(
            n in 3usize..=10,
            base in proptest::collection::vec(any::<u32>(), 0..6),
            extra in proptest::collection::vec(any::<u32>(), 0..6),
        ) {
            let clean = |v: &Vec<u32>| -> Vec<u32> {
                let mut v: Vec<u32> = v.iter().map(|s| s & ((1 << n) - 1)).filter(|s| s.count_ones() >= 2).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            let small = HyperedgeSet::new(n, clean(&base)).unwrap();
            let big = small.union(&HyperedgeSet::new(n, clean(&extra)).unwrap()).unwrap();
            let (gs, gb) = (clique_union(&small), clique_union(&big));
            prop_assert!(gs.is_subgraph_of(&gb));
            let bound: usize = big.sets().iter().map(|s| { let k = s.count_ones() as usize; k * (k - 1) / 2 }).sum();
            prop_assert!(gb.edge_count() <= bound);
        }
    }
}
