use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::numeric::{choose, pow_int, pow_one_minus, CompensatedSum};

/// `(n, m, p)` for `G(n,m;p)`: `n` vertices, feature set of size `m`,
/// membership probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub n: usize,
    pub m: u64,
    pub p: f64,
}

impl ModelParams {
    pub fn new(n: usize, m: u64, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid!("n = {n} must be at least 2"));
        }
        if m < 1 {
            return Err(invalid!("m must be at least 1"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid!("p = {p} outside [0, 1]"));
        }
        Ok(Self { n, m, p })
    }

    pub fn p_hat(&self) -> f64 {
        p_hat(self.m, self.p)
    }

    /// `p_k` for `k = 2..=n`.
    pub fn p_ks(&self) -> Vec<f64> {
        (2..=self.n)
            .map(|k| p_k(self.n, self.m, self.p, k).expect("k in range"))
            .collect()
    }

    pub fn p2(&self) -> f64 {
        p_k(self.n, self.m, self.p, 2).expect("n >= 2")
    }

    pub fn q2(&self) -> f64 {
        q2(self.n, self.p)
    }

    pub fn derived(&self) -> DerivedParams {
        DerivedParams::new(self)
    }
}

/// `p̂ = 1 - (1 - p²)^m`.
pub fn p_hat(m: u64, p: f64) -> f64 {
    -((m as f64) * (-(p * p)).ln_1p()).exp_m1()
}

/// `p^k (1-p)^{n-k}`: probability a fixed column is exactly a given `k`-set.
pub(crate) fn column_weight(n: usize, p: f64, k: usize) -> f64 {
    pow_int(p, k as u64) * pow_one_minus(p, (n - k) as u64)
}

/// `p_k = 1 - exp(-m p^k (1-p)^{n-k})` for `2 <= k <= n`.
pub fn p_k(n: usize, m: u64, p: f64, k: usize) -> Result<f64> {
    if k < 2 || k > n {
        return Err(invalid!("k = {k} outside 2..={n}"));
    }
    Ok(-(-(m as f64) * column_weight(n, p, k)).exp_m1())
}

/// `r_k = C(n,k) p^k (1-p)^{n-k}`, the Binomial(n,p) mass at `k` (0 for `k > n`).
pub fn r_k(n: usize, p: f64, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    choose(n as u64, k as u64) * column_weight(n, p, k)
}

/// `q₂ = Σ_{k>=2} r_k`, summed term by term so it stays accurate for tiny `p`.
pub fn q2(n: usize, p: f64) -> f64 {
    (2..=n)
        .map(|k| r_k(n, p, k))
        .collect::<CompensatedSum>()
        .value()
}

/// `ε = max{1/ln n, 1/ln(m/n⁴)}`, defined for `n > e` and `m > e·n⁴`.
pub fn epsilon(n: f64, m: f64) -> Result<f64> {
    if !(n > std::f64::consts::E) {
        return Err(domain!("epsilon needs n > e, got n = {n}"));
    }
    let ratio_log = m.ln() - 4.0 * n.ln();
    if !(ratio_log > 1.0) {
        return Err(domain!("epsilon needs m > e * n^4, got n = {n}, m = {m}"));
    }
    Ok((1.0 / n.ln()).max(1.0 / ratio_log))
}

/// Lemma thresholds `δ`, `t₀`, `q₀`, `r` together with `ε` and `p₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub epsilon: f64,
    pub p2: f64,
    pub delta: f64,
    pub t0: f64,
    pub q0: f64,
    pub r: f64,
}

/// `δ = (1/ε)((1-p₂)/(n²p₂) + (1-p₂)/(n³p₂³))^{1/2}`, `t₀ = n³mp³/ε`,
/// `q₀ = n⁴mp⁴/ε`, `r = n⁴m²p⁶/ε³`.
pub fn thresholds(n: usize, m: u64, p: f64) -> Result<Thresholds> {
    let nf = n as f64;
    let mf = m as f64;
    let epsilon = epsilon(nf, mf)?;
    if p <= 0.0 {
        return Err(domain!("thresholds need p > 0 (delta divides by p2)"));
    }
    let p2 = p_k(n, m, p, 2)?;
    if p2 <= 0.0 {
        return Err(domain!("p2 underflows to 0 at n={n}, m={m}, p={p}"));
    }
    // 1 - p2 = exp(-m p^2 (1-p)^{n-2}), without the cancellation of 1.0 - p2
    let one_minus = (-mf * column_weight(n, p, 2)).exp();
    let delta = ((one_minus / (nf * nf * p2) + one_minus / (nf.powi(3) * p2.powi(3))).sqrt()) / epsilon;
    let t0 = nf.powi(3) * mf * p.powi(3) / epsilon;
    let q0 = nf.powi(4) * mf * p.powi(4) / epsilon;
    let r = nf.powi(4) * mf * mf * p.powi(6) / epsilon.powi(3);
    Ok(Thresholds {
        epsilon,
        p2,
        delta,
        t0,
        q0,
        r,
    })
}

/// Every derived quantity of one parameter point. Quantities that are
/// undefined at this point (`ε` when `m <= e·n⁴`, the thresholds when `p = 0`)
/// are `None` and serialize as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedParams {
    pub p_hat: f64,
    /// `p_k` for `k = 2..=n`.
    pub p_k: Vec<f64>,
    pub q2: f64,
    #[serde(skip)]
    pub r_k: Vec<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub t0: Option<f64>,
    pub q0: Option<f64>,
    pub r: Option<f64>,
}

impl DerivedParams {
    pub fn new(params: &ModelParams) -> Self {
        let ModelParams { n, m, p } = *params;
        let th = thresholds(n, m, p).ok();
        Self {
            p_hat: p_hat(m, p),
            p_k: params.p_ks(),
            q2: q2(n, p),
            r_k: (0..=n).map(|k| r_k(n, p, k)).collect(),
            epsilon: epsilon(n as f64, m as f64).ok(),
            delta: th.map(|t| t.delta),
            t0: th.map(|t| t.t0),
            q0: th.map(|t| t.q0),
            r: th.map(|t| t.r),
        }
    }

    /// Flat JSON object with keys `p_hat, p_k, q2, epsilon, delta, t0, q0, r`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn p_hat_examples() {
        assert_eq!(p_hat(17, 0.0), 0.0);
        assert_eq!(p_hat(1, 1.0), 1.0);
        assert!(close(p_hat(2, 0.5), 0.4375, 1e-15));
    }

    #[test]
    fn p_hat_survives_huge_m() {
        // m p^2 = 1 with p^2 = 1e-12: 1 - (1 - 1e-12)^1e12 = 1 - e^{-1} + O(1e-12).
        let v = p_hat(1_000_000_000_000, 1e-6);
        assert!(close(v, 1.0 - (-1.0f64).exp(), 1e-11), "{v}");
    }

    #[test]
    fn p_k_examples() {
        assert_eq!(p_k(5, 100, 0.0, 3).unwrap(), 0.0);
        assert!(close(p_k(3, 1, 1.0, 3).unwrap(), 1.0 - (-1.0f64).exp(), 1e-15));
        assert!(close(p_k(2, 1000, 0.001, 2).unwrap(), -(-0.001f64).exp_m1(), 1e-18));
        assert!(close(p_k(2, 1000, 0.001, 2).unwrap(), 9.995e-4, 1e-6));
        assert!(p_k(4, 10, 0.1, 1).is_err());
        assert!(p_k(4, 10, 0.1, 5).is_err());
    }

    #[test]
    fn r_k_and_q2_examples() {
        assert!(close(r_k(2, 0.5, 2), 0.25, 1e-15));
        assert_eq!(q2(6, 0.0), 0.0);
        assert!(close(q2(3, 0.5), 0.5, 1e-15));
    }

    #[test]
    fn q2_two_paths_agree() {
        for n in 2..=12 {
            for &p in &[0.0, 1e-4, 0.01, 0.2, 0.5, 0.9, 1.0] {
                let direct = q2(n, p);
                let complement = 1.0 - r_k(n, p, 0) - r_k(n, p, 1);
                assert!(close(direct, complement, 1e-12), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        let n = E * E;
        let m = n.powi(4) * E * E;
        assert!(close(epsilon(n, m).unwrap(), 0.5, 1e-12));
        let ln10 = 10f64.ln();
        assert!(close(epsilon(10.0, 1e9).unwrap(), 1.0 / ln10, 1e-12));
        assert!(close(epsilon(10.0, 1e6).unwrap(), 1.0 / ln10, 1e-12));
        assert!(1.0 / 100f64.ln() < epsilon(10.0, 1e6).unwrap());
        assert!(matches!(epsilon(10.0, 2e4), Err(crate::Error::Domain(_))));
        assert!(matches!(epsilon(2.0, 1e9), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn threshold_examples() {
        let a = thresholds(10, 1_000_000, 1e-3).unwrap();
        assert!(close(a.t0, 1.0 / a.epsilon, 1e-9));
        let b = thresholds(10, 2_000_000, 1e-3).unwrap();
        // epsilon is 1/ln 10 at both points, so t0 scales with m
        assert_eq!(a.epsilon, b.epsilon);
        assert!(close(b.t0, 2.0 * a.t0, 1e-9));
        for &(n, m, p) in &[(10usize, 1_000_000u64, 1e-3), (20, 1u64 << 40, 3e-6), (8, 500_000, 0.02)] {
            let t = thresholds(n, m, p).unwrap();
            let nf = n as f64;
            let identity = 1.0 / (nf.powi(4) * p * p * t.epsilon);
            assert!(close(t.r / (t.q0 * t.q0), identity, 1e-9 * identity));
        }
        assert!(matches!(thresholds(10, 1_000_000, 0.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn p_hat_dominates_p2_on_grid() {
        for n in 2..=10usize {
            for e in 0..=12 {
                let m = 10u64.pow(e);
                for &p in &[1e-7, 1e-5, 1e-3, 0.01, 0.05, 0.2, 0.5, 0.9, 1.0] {
                    let ph = p_hat(m, p);
                    let p2 = p_k(n, m, p, 2).unwrap();
                    assert!(ph >= p2 - 1e-15, "n={n} m={m} p={p}: {ph} < {p2}");
                }
            }
        }
    }

    #[test]
    fn derived_params_json_keys() {
        let d = ModelParams::new(10, 1_000_000, 1e-3).unwrap().derived();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(keys, ["p_hat", "p_k", "q2", "epsilon", "delta", "t0", "q0", "r"]);
        assert_eq!(v["p_k"].as_array().unwrap().len(), 9);
        let d = ModelParams::new(4, 10, 0.1).unwrap().derived();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert!(v["epsilon"].is_null());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 10, 0.1).is_err());
        assert!(ModelParams::new(3, 0, 0.1).is_err());
        assert!(ModelParams::new(3, 10, 1.5).is_err());
        assert!(ModelParams::new(3, 10, f64::NAN).is_err());
    }
}
