//! Poisson variates: sequential inversion below mean 30, Hörmann's PTRS
//! transformed rejection (Hörmann 1993, "The transformed rejection method
//! for generating Poisson random variables") at and above 30. Both paths
//! consume uniforms from the caller's generator only, so a seed fixes the
//! output on every platform.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::numeric::ln_factorial;

const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy)]
pub struct PoissonSampler {
    mean: f64,
    method: Method,
}

#[derive(Debug, Clone, Copy)]
enum Method {
    Zero,
    Inversion { exp_neg_mean: f64 },
    Ptrs(Ptrs),
}

#[derive(Debug, Clone, Copy)]
struct Ptrs {
    ln_mean: f64,
    a: f64,
    b: f64,
    ln_inv_alpha: f64,
    v_r: f64,
}

impl PoissonSampler {
    pub fn new(mean: f64) -> Result<Self> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(invalid!("Poisson mean {mean} must be finite and non-negative"));
        }
        let method = if mean == 0.0 {
            Method::Zero
        } else if mean < INVERSION_LIMIT {
            Method::Inversion {
                exp_neg_mean: (-mean).exp(),
            }
        } else {
            let slam = mean.sqrt();
            let b = 0.931 + 2.53 * slam;
            let a = -0.059 + 0.02483 * b;
            let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
            Method::Ptrs(Ptrs {
                ln_mean: mean.ln(),
                a,
                b,
                ln_inv_alpha: inv_alpha.ln(),
                v_r: 0.9277 - 3.6224 / (b - 2.0),
            })
        };
        Ok(Self { mean, method })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.method {
            Method::Zero => 0,
            Method::Inversion { exp_neg_mean } => {
                let u: f64 = rng.random();
                let mut k = 0u64;
                let mut mass = exp_neg_mean;
                let mut cdf = mass;
                while u > cdf {
                    k += 1;
                    mass *= self.mean / k as f64;
                    cdf += mass;
                    if mass == 0.0 {
                        // cdf stalled below u from rounding; u is in the far tail
                        break;
                    }
                }
                k
            }
            Method::Ptrs(c) => loop {
                let u = rng.random::<f64>() - 0.5;
                let v: f64 = rng.random();
                let us = 0.5 - u.abs();
                let k = ((2.0 * c.a / us + c.b) * u + self.mean + 0.43).floor();
                if us >= 0.07 && v <= c.v_r {
                    return k as u64;
                }
                if k < 0.0 || (us < 0.013 && v > us) {
                    continue;
                }
                let lhs = v.ln() + c.ln_inv_alpha - (c.a / (us * us) + c.b).ln();
                let rhs = -self.mean + k * c.ln_mean - ln_factorial(k as u64);
                if lhs <= rhs {
                    return k as u64;
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::poisson_pmf;
    use crate::rng::from_seed;

    fn chi_square_against_pmf(mean: f64, draws: usize, seed: u64) -> (f64, usize) {
        let sampler = PoissonSampler::new(mean).unwrap();
        let mut rng = from_seed(seed);
        let lo = (mean - 6.0 * mean.sqrt()).max(0.0).floor() as u64;
        let hi = (mean + 6.0 * mean.sqrt() + 6.0).ceil() as u64;
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        let mut outside = 0u64;
        for _ in 0..draws {
            let k = sampler.sample(&mut rng);
            if k < lo || k > hi {
                outside += 1;
            } else {
                counts[(k - lo) as usize] += 1;
            }
        }
        // pool cells with expected count < 5 into a single remainder bucket
        let mut stat = 0.0;
        let mut cells = 0;
        let mut pooled_obs = outside as f64;
        let mut pooled_exp = 0.0;
        let mut inside_mass = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let pk = poisson_pmf(mean, lo + i as u64);
            inside_mass += pk;
            let e = pk * draws as f64;
            if e < 5.0 {
                pooled_obs += c as f64;
                pooled_exp += e;
            } else {
                stat += (c as f64 - e).powi(2) / e;
                cells += 1;
            }
        }
        pooled_exp += (1.0 - inside_mass).max(0.0) * draws as f64;
        if pooled_exp > 0.0 {
            stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
            cells += 1;
        }
        (stat, cells - 1)
    }

    #[test]
    fn both_methods_fit_the_pmf() {
        // chi-square 0.999 quantiles: df ~ 10 -> 29.6, df ~ 60 -> 99.6; use a
        // Wilson-Hilferty approximation for the df actually produced.
        for &(mean, seed) in &[(0.3, 1u64), (4.5, 2), (29.9, 3), (30.0, 4), (250.0, 5)] {
            let (stat, df) = chi_square_against_pmf(mean, 200_000, seed);
            let d = df as f64;
            let z = 3.09;
            let crit = d * (1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt()).powi(3);
            assert!(stat < crit, "mean={mean}: chi2={stat} df={df} crit={crit}");
        }
    }

    #[test]
    fn huge_mean_is_centred() {
        let s = PoissonSampler::new(1e12).unwrap();
        let mut rng = from_seed(9);
        let n = 2000;
        let mean: f64 = (0..n).map(|_| s.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 1e12).abs() < 5.0 * (1e12f64 / n as f64).sqrt());
    }

    #[test]
    fn zero_mean_and_errors() {
        let s = PoissonSampler::new(0.0).unwrap();
        assert_eq!(s.sample(&mut from_seed(0)), 0);
        assert!(PoissonSampler::new(-1.0).is_err());
        assert!(PoissonSampler::new(f64::NAN).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let s = PoissonSampler::new(77.0).unwrap();
        let a: Vec<u64> = {
            let mut r = from_seed(5);
            (0..32).map(|_| s.sample(&mut r)).collect()
        };
        let b: Vec<u64> = {
            let mut r = from_seed(5);
            (0..32).map(|_| s.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
