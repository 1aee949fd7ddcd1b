use serde::Serialize;

use super::{tv_exact, ExactEngine};
use crate::error::{invalid, Result};
use crate::graph::edge_slots;
use crate::models::{p_hat, p_k};
use crate::numeric::{binomial_pmf, CompensatedSum};

/// `½ Σ_k |Bin(N,a)(k) - Bin(N,b)(k)|` with no ordering requirement.
pub(crate) fn binomial_tv(trials: u64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let acc: CompensatedSum = (0..=trials)
        .map(|k| (binomial_pmf(trials, a, k) - binomial_pmf(trials, b, k)).abs())
        .collect();
    (0.5 * acc.value()).clamp(0.0, 1.0)
}

fn check_pair(trials: u64, p: f64, q: f64) -> Result<()> {
    if trials < 1 {
        return Err(invalid!("N must be at least 1"));
    }
    if !(0.0 < p && p < q && q < 1.0) {
        return Err(invalid!("need 0 < p < q < 1, got p = {p}, q = {q}"));
    }
    Ok(())
}

/// Exact `tv(Bin(N,p), Bin(N,q))` by pmf summation.
pub fn tv_binomial_exact(trials: u64, p: f64, q: f64) -> Result<f64> {
    check_pair(trials, p, q)?;
    Ok(binomial_tv(trials, p, q))
}

/// `δ + 3δ²` with `δ = (q-p) √(N / (p(1-p)))`.
pub fn tv_binomial_bound(trials: u64, p: f64, q: f64) -> Result<f64> {
    check_pair(trials, p, q)?;
    let delta = (q - p) * (trials as f64 / (p * (1.0 - p))).sqrt();
    Ok(delta + 3.0 * delta * delta)
}

/// `G(n,p₂)` against `G(n,p̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P2VsPhat {
    pub p2: f64,
    pub p_hat: f64,
    /// Graph-level TV from the exact engine (`None` above the engine cap).
    pub graph_tv: Option<f64>,
    /// `tv(Bin(C(n,2),p₂), Bin(C(n,2),p̂))`.
    pub binomial_tv: f64,
    /// `δ + 3δ²`; `None` unless `0 < p₂ < p̂ < 1`.
    pub bound: Option<f64>,
}

pub fn tv_gn_p2_vs_phat(engine: &ExactEngine, n: usize, m: u64, p: f64) -> Result<P2VsPhat> {
    let p2 = p_k(n, m, p, 2)?;
    let ph = p_hat(m, p);
    if p2 > ph {
        return Err(invalid!("p2 = {p2} exceeds p_hat = {ph}"));
    }
    let slots = edge_slots(n) as u64;
    let graph_tv = if n <= engine.max_n() {
        let a = engine.dist_gnp(n, p2)?;
        let b = engine.dist_gnp(n, ph)?;
        Some(tv_exact(&a, &b)?)
    } else {
        None
    };
    let bound = if 0.0 < p2 && p2 < ph && ph < 1.0 {
        Some(tv_binomial_bound(slots, p2, ph)?)
    } else {
        None
    };
    Ok(P2VsPhat {
        p2,
        p_hat: ph,
        graph_tv,
        binomial_tv: binomial_tv(slots, p2, ph),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain pmf summation with product-form coefficients (independent oracle).
    fn oracle(trials: u64, p: f64, q: f64) -> f64 {
        let mut total = 0.0;
        let mut c = 1.0f64;
        for k in 0..=trials {
            if k > 0 {
                c = c * (trials - k + 1) as f64 / k as f64;
            }
            let a = c * p.powi(k as i32) * (1.0 - p).powi((trials - k) as i32);
            let b = c * q.powi(k as i32) * (1.0 - q).powi((trials - k) as i32);
            total += (a - b).abs();
        }
        total / 2.0
    }

    #[test]
    fn bernoulli_case() {
        assert!((tv_binomial_exact(1, 0.2, 0.45).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn worked_example() {
        let exact = tv_binomial_exact(10, 0.3, 0.31).unwrap();
        assert!((exact - oracle(10, 0.3, 0.31)).abs() < 1e-14);
        let delta = 0.01 * (10.0f64 / 0.21).sqrt();
        assert!((delta - 0.069007).abs() < 1e-6);
        let bound = tv_binomial_bound(10, 0.3, 0.31).unwrap();
        assert!((bound - (delta + 3.0 * delta * delta)).abs() < 1e-15);
        assert!(exact <= bound);
    }

    #[test]
    fn vanishing_gap() {
        let exact = tv_binomial_exact(50, 0.4, 0.4 + 1e-12).unwrap();
        let bound = tv_binomial_bound(50, 0.4, 0.4 + 1e-12).unwrap();
        assert!(exact < 1e-10 && bound < 1e-10);
    }

    #[test]
    fn argument_errors() {
        assert!(tv_binomial_exact(10, 0.5, 0.5).is_err());
        assert!(tv_binomial_exact(10, 0.6, 0.5).is_err());
        assert!(tv_binomial_bound(0, 0.1, 0.5).is_err());
        assert!(tv_binomial_exact(10, 0.0, 0.5).is_err());
    }

    #[test]
    fn p2_vs_phat() {
        let e = ExactEngine::default();
        let r = tv_gn_p2_vs_phat(&e, 5, 100, 0.0).unwrap();
        assert_eq!(r.graph_tv, Some(0.0));
        assert_eq!(r.binomial_tv, 0.0);
        let r = tv_gn_p2_vs_phat(&e, 2, 40, 0.1).unwrap();
        assert!((r.graph_tv.unwrap() - (r.p_hat - r.p2)).abs() < 1e-15);
        for n in 3..=5 {
            for &m in &[100u64, 10_000, 1_000_000] {
                for &p in &[1e-4, 1e-3, 0.01, 0.05] {
                    let r = tv_gn_p2_vs_phat(&e, n, m, p).unwrap();
                    let g = r.graph_tv.unwrap();
                    // edge count is sufficient for a pair of product laws
                    assert!((g - r.binomial_tv).abs() < 1e-12, "n={n} m={m} p={p}");
                    if let Some(b) = r.bound {
                        assert!(g <= b, "n={n} m={m} p={p}: {g} > {b}");
                    }
                }
            }
        }
        assert!(tv_gn_p2_vs_phat(&e, 9, 100, 0.01).unwrap().graph_tv.is_none());
    }
}
