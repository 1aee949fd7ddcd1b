//! Numerical building blocks: compensated summation, binomial coefficients,
//! and saddle-point evaluation of binomial and Poisson point masses.
//!
//! The pmf routines follow Loader's "Fast and accurate computation of
//! binomial probabilities" (2000): the point mass is written as
//! `exp(-stirlerr - bd0)` so that no `ln Γ(N)` of a huge argument is ever
//! formed. This keeps full relative accuracy for `N` up to `1e15`.

use std::f64::consts::PI;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value()
}

/// A value carried as an unevaluated sum `hi + lo` (double-double).
/// Used by the lattice transform to keep cancellation error near `1e-32`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TwoFloat {
    pub hi: f64,
    pub lo: f64,
}

#[allow(clippy::should_implement_trait)]
impl TwoFloat {
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        (s, err)
    }

    #[inline]
    pub fn sub(self, other: TwoFloat) -> TwoFloat {
        let (s, e) = Self::two_sum(self.hi, -other.hi);
        let e = e + (self.lo - other.lo);
        let (hi, lo) = Self::two_sum(s, e);
        TwoFloat { hi, lo }
    }

    #[inline]
    pub fn add(self, other: TwoFloat) -> TwoFloat {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        let e = e + (self.lo + other.lo);
        let (hi, lo) = Self::two_sum(s, e);
        TwoFloat { hi, lo }
    }

    /// `1 - c` without rounding away the low bits of a small `c`.
    pub fn one_minus(c: f64) -> Self {
        let (hi, lo) = Self::two_sum(1.0, -c);
        TwoFloat { hi, lo }
    }

    /// `exp(x)` for `x <= 0`, carrying `1 - exp(x)` exactly when the result
    /// is close to one.
    pub fn exp_nonpositive(x: f64) -> Self {
        if x < -std::f64::consts::LN_2 {
            Self::from_f64(x.exp())
        } else {
            Self::one_minus(-x.exp_m1())
        }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Exact binomial coefficient as `u64`; `None` on overflow.
pub fn choose_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// Binomial coefficient as `f64`. Exact for every `C(n,k)` that fits in 53 bits.
pub fn choose(n: u64, k: u64) -> f64 {
    match choose_u64(n, k) {
        Some(c) => c as f64,
        None => ln_choose(n, k).exp(),
    }
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln(k!)`.
pub fn ln_factorial(k: u64) -> f64 {
    if k <= 15 {
        (2..=k).map(|i| (i as f64).ln()).sum()
    } else {
        let x = k as f64;
        stirlerr(k) + (x + 0.5) * x.ln() - x + LN_SQRT_2PI
    }
}

/// `ln(k!) - ln(sqrt(2πk) (k/e)^k)`, the Stirling remainder.
pub fn stirlerr(k: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k == 0 {
        return 0.0;
    }
    let n = k as f64;
    if k <= 15 {
        let lf: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
        return lf - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated without cancellation.
pub fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `Pr[Bin(n, p) = x]`.
pub fn binomial_pmf(n: u64, p: f64, x: u64) -> f64 {
    if x > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if x == n { 1.0 } else { 0.0 };
    }
    let q = 1.0 - p;
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * (-p).ln_1p()
        };
        return lc.exp();
    }
    if x == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let xf = x as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = (2.0 * PI).ln() + xf.ln() + (-xf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// `Pr[Poisson(lambda) = x]`.
pub fn poisson_pmf(lambda: f64, x: u64) -> f64 {
    if lambda <= 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if x == 0 {
        return (-lambda).exp();
    }
    let xf = x as f64;
    (-stirlerr(x) - bd0(xf, lambda)).exp() / (2.0 * PI * xf).sqrt()
}

/// `(1 - p)^e` evaluated as `exp(e * ln1p(-p))`, with `e = 0` giving 1 even at `p = 1`.
pub fn pow_one_minus(p: f64, e: u64) -> f64 {
    if e == 0 {
        1.0
    } else {
        ((e as f64) * (-p).ln_1p()).exp()
    }
}

/// `p^e` with `0^0 = 1`.
pub fn pow_int(p: f64, e: u64) -> f64 {
    if e == 0 {
        1.0
    } else {
        p.powi(e as i32)
    }
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Pearson chi-square of `observed` counts against cell probabilities
/// `probs`. Cells with expected count below 5 are pooled together with the
/// mass missing from `probs`. Returns `(statistic, degrees of freedom)`.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp, mut mass) = (0.0, 0.0, 0.0);
    for (&o, &pk) in observed.iter().zip(probs) {
        mass += pk;
        let e = pk * n;
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    pooled_exp += (1.0 - mass).max(0.0) * n;
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

/// Upper chi-square quantile (Wilson-Hilferty) for normal quantile `z`,
/// e.g. `z = 3.09` for the 0.001 level.
pub fn chi_square_critical(df: usize, z: f64) -> f64 {
    let d = df.max(1) as f64;
    let h = 2.0 / (9.0 * d);
    d * (1.0 - h + z * h.sqrt()).powi(3)
}

/// One-sided normal quantile at the 0.001 level.
pub const Z999: f64 = 3.090_232_306_167_813;

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_binomial_pmf(n: u64, p: f64, x: u64) -> f64 {
        // direct product form, fine for small n
        let mut c = 1.0;
        for i in 0..x {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32)
    }

    #[test]
    fn binomial_pmf_matches_direct_product() {
        for &n in &[1u64, 2, 5, 17, 40] {
            for &p in &[0.01, 0.3, 0.5, 0.97] {
                let mut total = 0.0;
                for x in 0..=n {
                    let a = binomial_pmf(n, p, x);
                    let b = naive_binomial_pmf(n, p, x);
                    assert!((a - b).abs() <= 1e-13 * b.max(1e-300) + 1e-300, "n={n} p={p} x={x}: {a} vs {b}");
                    total += a;
                }
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        for &lam in &[0.001, 0.7, 3.0, 45.0, 400.0] {
            let total: f64 = (0..5000).map(|x| poisson_pmf(lam, x)).sum();
            assert!((total - 1.0).abs() < 1e-12, "lambda={lam}: {total}");
        }
        // small-x closed forms
        let lam: f64 = 1.5;
        assert!((poisson_pmf(lam, 2) - lam * lam / 2.0 * (-lam).exp()).abs() < 1e-15);
    }

    #[test]
    fn binomial_pmf_is_accurate_for_huge_trials() {
        // Bin(1e12, 2e-12) is within 4e-12 (Le Cam) of Poisson(2) at every point.
        let n = 1_000_000_000_000u64;
        let p = 2e-12;
        for x in 0..10 {
            let b = binomial_pmf(n, p, x);
            let po = poisson_pmf(2.0, x);
            assert!((b - po).abs() < 1e-10, "x={x}: {b} vs {po}");
        }
    }

    #[test]
    fn ln_factorial_is_continuous_across_the_table_edge() {
        let direct: f64 = (2..=16u64).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(16) - direct).abs() < 1e-12);
        let direct: f64 = (2..=100u64).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(100) - direct).abs() < 1e-10);
    }

    #[test]
    fn choose_small_values() {
        assert_eq!(choose_u64(32, 16), Some(601_080_390));
        assert_eq!(choose_u64(4, 5), Some(0));
        assert_eq!(choose(10, 3), 120.0);
    }

    #[test]
    fn two_float_recovers_cancelled_bits() {
        let a = TwoFloat::from_f64(1.0).add(TwoFloat::from_f64(1e-20));
        let b = a.sub(TwoFloat::from_f64(1.0));
        assert_eq!(b.value(), 1e-20);
    }

    #[test]
    fn wilson_interval_brackets_estimate() {
        let (lo, hi) = wilson_interval(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 10, Z95).0, 0.0);
    }

    #[test]
    fn chi_square_pools_small_cells() {
        let (stat, df) = chi_square(&[50, 50], &[0.5, 0.5]);
        assert_eq!((stat, df), (0.0, 1));
        let (stat, df) = chi_square(&[40, 60, 0], &[0.5, 0.5, 0.0]);
        assert!((stat - 4.0).abs() < 1e-12 && df == 1);
        // df = 10 at the 0.001 level is 29.59
        assert!((chi_square_critical(10, Z999) - 29.59).abs() < 0.3);
    }
}
