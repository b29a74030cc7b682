//! Binomial sampling restricted to IEEE-exact arithmetic (`+ - * /` and
//! comparisons), so a given RNG state produces the same count on every
//! platform.

use rand::RngCore;

use super::rng::uniform01;

/// Above this mean the inversion walk is replaced by per-trial Bernoulli draws.
const INVERSION_MAX_MEAN: f64 = 24.0;

fn pow_u32(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// Draws from Binomial(`n`, `p`).
pub fn binomial<R: RngCore + ?Sized>(rng: &mut R, n: u32, p: f64) -> u32 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if p > 0.5 {
        return n - binomial(rng, n, 1.0 - p);
    }
    let mean = f64::from(n) * p;
    if mean > INVERSION_MAX_MEAN {
        return (0..n).filter(|_| uniform01(rng) < p).count() as u32;
    }

    // Sequential search on the CDF.
    let q = 1.0 - p;
    let ratio = p / q;
    let u = uniform01(rng);
    let mut k = 0u32;
    let mut pmf = pow_u32(q, n);
    let mut cdf = pmf;
    while u >= cdf && k < n {
        pmf *= ratio * f64::from(n - k) / f64::from(k + 1);
        k += 1;
        cdf += pmf;
        // Rounding can leave the accumulated CDF a hair below 1.
        if pmf == 0.0 && f64::from(k) > mean {
            break;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::StreamKey;

    fn moments(n: u32, p: f64, draws: u64) -> (f64, f64) {
        let key = StreamKey::from_seed(42);
        let mut rng = key.replication_rng(0, 0);
        let xs: Vec<f64> = (0..draws).map(|_| f64::from(binomial(&mut rng, n, p))).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        (m, v)
    }

    #[test]
    fn edge_probabilities() {
        let mut rng = StreamKey::from_seed(0).replication_rng(0, 0);
        assert_eq!(binomial(&mut rng, 100, 0.0), 0);
        assert_eq!(binomial(&mut rng, 100, 1.0), 100);
        assert_eq!(binomial(&mut rng, 0, 0.3), 0);
    }

    #[test]
    fn moments_match_in_each_regime() {
        // (n, p): inversion, flipped inversion, Bernoulli fallback.
        for &(n, p) in &[(10_000u32, 0.0002), (40, 0.3), (30, 0.9), (500, 0.2)] {
            let draws = 40_000;
            let (m, v) = moments(n, p, draws);
            let mu = f64::from(n) * p;
            let var = mu * (1.0 - p);
            let se = (var / draws as f64).sqrt();
            assert!((m - mu).abs() < 4.0 * se, "n={n} p={p}: mean {m} vs {mu}");
            assert!((v / var - 1.0).abs() < 0.05, "n={n} p={p}: var {v} vs {var}");
        }
    }

    #[test]
    fn pmf_matches_exact_small_case() {
        // Binomial(3, 0.25): exact pmf 27/64, 27/64, 9/64, 1/64.
        let mut rng = StreamKey::from_seed(5).replication_rng(0, 0);
        let draws = 200_000;
        let mut counts = [0u32; 4];
        for _ in 0..draws {
            counts[binomial(&mut rng, 3, 0.25) as usize] += 1;
        }
        let exact = [27.0 / 64.0, 27.0 / 64.0, 9.0 / 64.0, 1.0 / 64.0];
        for (c, e) in counts.iter().zip(exact) {
            let f = f64::from(*c) / draws as f64;
            let se = (e * (1.0 - e) / draws as f64).sqrt();
            assert!((f - e).abs() < 4.0 * se, "{f} vs {e}");
        }
    }
}
