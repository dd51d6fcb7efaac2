use rand::Rng;

use super::renewal_step;
use crate::error::{Error, Result};

/// Independent digits with P(η_j = 1) = θ/(j+θ-1); η_1 = 1.
pub fn sample_bernoulli_string_dual_ewens<R: Rng + ?Sized>(theta: f64, n: usize, rng: &mut R) -> Result<Vec<bool>> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    Ok((1..=n)
        .map(|j| rng.random::<f64>() < theta / (j as f64 + theta - 1.0))
        .collect())
}

/// Renewal epochs from T_0 = 1 with steps P(step = m) = α(1-α)_{m-1}/m!.
pub fn sample_renewal_string_alpha<R: Rng + ?Sized>(alpha: f64, n: usize, rng: &mut R) -> Result<Vec<bool>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let mut bits = vec![false; n];
    let mut t = 1;
    while t <= n {
        bits[t - 1] = true;
        t += renewal_step(alpha, n + 1 - t, rng);
    }
    Ok(bits)
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// r_1 = 1; for j >= 2, r_j = j w.p. η/(η+j-1) and each i < j w.p. 1/(η+j-1).
/// `eta = f64::INFINITY` gives r_j = j.
pub fn pw_initial_ranks<R: Rng + ?Sized>(eta: f64, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::InvalidParameter(format!("eta must lie in [0, inf], got {eta}")));
    }
    let mut ranks = Vec::with_capacity(k);
    for j in 1..=k {
        let r = if j == 1 || eta.is_infinite() {
            j
        } else {
            let u = rng.random::<f64>() * (eta + j as f64 - 1.0);
            if u < eta {
                j
            } else {
                (((u - eta).floor() as usize) + 1).min(j - 1)
            }
        };
        ranks.push(r);
    }
    Ok(ranks)
}

/// Places label j at position r_j among the labels placed so far.
pub fn arrangement_from_ranks(ranks: &[usize]) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::with_capacity(ranks.len());
    for (i, &r) in ranks.iter().enumerate() {
        let j = i + 1;
        if r == 0 || r > j {
            return Err(Error::InvalidParameter(format!("rank r_{j} = {r} outside 1..={j}")));
        }
        out.insert(r - 1, j);
    }
    Ok(out)
}

pub fn pw_arrangement<R: Rng + ?Sized>(eta: f64, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    arrangement_from_ranks(&pw_initial_ranks(eta, k, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::Composition;
    use crate::samplers::RngStream;
    use std::collections::BTreeMap;

    #[test]
    fn ranks_decode() {
        assert_eq!(arrangement_from_ranks(&[1, 2, 1, 3]).unwrap(), vec![3, 1, 4, 2]);
        assert!(arrangement_from_ranks(&[1, 3]).is_err());
        let mut rng = RngStream::new(5, 0);
        assert_eq!(pw_arrangement(f64::INFINITY, 5, &mut rng).unwrap(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn eta_one_is_uniform_over_permutations() {
        let mut rng = RngStream::new(17, 0);
        let reps = 120_000;
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for _ in 0..reps {
            *counts.entry(pw_arrangement(1.0, 3, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        for c in counts.values() {
            assert!((*c as f64 / reps as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn strings_start_with_one_and_decode() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..50 {
            let b = sample_bernoulli_string_dual_ewens(1.0, 12, &mut rng).unwrap();
            assert!(b[0]);
            assert_eq!(Composition::from_bits(&b).unwrap().n(), 12);
            let r = sample_renewal_string_alpha(0.5, 12, &mut rng).unwrap();
            assert!(r[0]);
            assert_eq!(Composition::from_bits(&r).unwrap().n(), 12);
        }
    }

    #[test]
    fn digit_frequencies() {
        let mut rng = RngStream::new(8, 0);
        let reps = 200_000;
        let mut ones = [0usize; 3];
        let mut step = [0usize; 2];
        for _ in 0..reps {
            let b = sample_bernoulli_string_dual_ewens(1.0, 3, &mut rng).unwrap();
            for j in 0..3 {
                ones[j] += b[j] as usize;
            }
            let r = sample_renewal_string_alpha(0.5, 3, &mut rng).unwrap();
            if r[1] {
                step[0] += 1;
            } else if r[2] {
                step[1] += 1;
            }
        }
        let check = |count: usize, p: f64| {
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((count as f64 / reps as f64 - p).abs() <= 4.0 * se, "{count} vs {p}");
        };
        check(ones[0], 1.0);
        check(ones[1], 0.5);
        check(ones[2], 1.0 / 3.0);
        check(step[0], 0.5);
        check(step[1], 0.125);
    }
}
