use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::combinat::{DistributionTable, Shape};
use crate::error::{Error, Result};

/// Cells with expected count below this are pooled.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquareResult {
    fn new(statistic: f64, df: usize) -> Self {
        let p_value = if !statistic.is_finite() {
            0.0
        } else if df == 0 {
            1.0
        } else {
            let chi = ChiSquared::new(df as f64).expect("df > 0");
            1.0 - chi.cdf(statistic)
        };
        ChiSquareResult { statistic, df, p_value }
    }

    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

pub fn empirical_counts<K: Ord, I: IntoIterator<Item = K>>(draws: I) -> BTreeMap<K, u64> {
    let mut out = BTreeMap::new();
    for k in draws {
        *out.entry(k).or_insert(0) += 1;
    }
    out
}

/// Goodness of fit of observed counts to an exact table.
pub fn chi_square_gof<K: Shape>(counts: &BTreeMap<K, u64>, table: &DistributionTable<K, f64>) -> Result<ChiSquareResult> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::Degenerate("no observations".into()));
    }
    if counts.iter().any(|(k, &c)| c > 0 && table.get(k) <= 0.0) {
        return Ok(ChiSquareResult::new(f64::INFINITY, 0));
    }
    let nf = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (k, &p) in table.iter() {
        if p <= 0.0 {
            continue;
        }
        let obs = counts.get(k).copied().unwrap_or(0) as f64;
        let exp = p * nf;
        if exp < MIN_EXPECTED {
            pool_obs += obs;
            pool_exp += exp;
        } else {
            cells.push((obs, exp));
        }
    }
    if pool_exp > 0.0 {
        if pool_exp < MIN_EXPECTED && !cells.is_empty() {
            let i = (0..cells.len())
                .min_by(|&a, &b| cells[a].1.total_cmp(&cells[b].1))
                .expect("nonempty");
            cells[i].0 += pool_obs;
            cells[i].1 += pool_exp;
        } else {
            cells.push((pool_obs, pool_exp));
        }
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    Ok(ChiSquareResult::new(stat, cells.len().saturating_sub(1)))
}

/// Homogeneity test for two samples over the same outcome space.
pub fn chi_square_two_sample<K: Ord + Clone>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> Result<ChiSquareResult> {
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("empty sample".into()));
    }
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let total = na + nb;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for k in keys {
        let (oa, ob) = (a.get(k).copied().unwrap_or(0) as f64, b.get(k).copied().unwrap_or(0) as f64);
        let col = oa + ob;
        if col * na.min(nb) / total < MIN_EXPECTED {
            pool.0 += oa;
            pool.1 += ob;
        } else {
            cells.push((oa, ob));
        }
    }
    if pool.0 + pool.1 > 0.0 {
        cells.push(pool);
    }
    let mut stat = 0.0;
    for (oa, ob) in &cells {
        let col = oa + ob;
        let (ea, eb) = (col * na / total, col * nb / total);
        stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    Ok(ChiSquareResult::new(stat, cells.len().saturating_sub(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::Composition;

    fn c(s: &str) -> Composition {
        s.parse().unwrap()
    }

    #[test]
    fn perfect_fit_and_impossible_outcome() {
        let t = DistributionTable::new(2, vec![(c("2"), 0.5), (c("1,1"), 0.5)]).unwrap();
        let counts = BTreeMap::from([(c("2"), 500), (c("1,1"), 500)]);
        let r = chi_square_gof(&counts, &t).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.df, 1);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let t = DistributionTable::new(2, vec![(c("2"), 1.0)]).unwrap();
        let r = chi_square_gof(&counts, &t).unwrap();
        assert!(!r.passes(1e-3));
    }

    #[test]
    fn known_statistic() {
        // (60-50)^2/50 + (40-50)^2/50 = 4, df 1
        let t = DistributionTable::new(2, vec![(c("2"), 0.5), (c("1,1"), 0.5)]).unwrap();
        let counts = BTreeMap::from([(c("2"), 60), (c("1,1"), 40)]);
        let r = chi_square_gof(&counts, &t).unwrap();
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert!((r.p_value - 0.0455).abs() < 1e-3);
        let same = chi_square_two_sample(&counts, &counts).unwrap();
        assert_eq!(same.statistic, 0.0);
    }
}
