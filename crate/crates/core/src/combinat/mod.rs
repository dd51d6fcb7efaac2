//! Compositions, partitions, counting functions and distribution tables.

mod composition;
mod partition;
mod table;

pub use composition::Composition;
pub use partition::Partition;
pub use table::{CompositionTable, DistributionTable, PartitionTable, Shape, FLOAT_MASS_TOL};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_ENUMERATION_CAP: usize = 20;

pub fn binary_encode(c: &Composition) -> String {
    c.binary_encode()
}

pub fn binary_decode(code: &str) -> Result<Composition> {
    Composition::binary_decode(code)
}

pub fn multinomial_count(c: &Composition) -> BigUint {
    c.multinomial_count()
}

pub fn shape_count(p: &Partition) -> BigUint {
    p.shape_count()
}

pub fn enumerate_compositions(n: usize) -> Result<Vec<Composition>> {
    enumerate_compositions_capped(n, DEFAULT_ENUMERATION_CAP)
}

/// All 2^{n-1} compositions of n, lexicographic in their binary codes.
pub fn enumerate_compositions_capped(n: usize, cap: usize) -> Result<Vec<Composition>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(vec![Composition::empty()]);
    }
    let total = 1usize << (n - 1);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut parts = Vec::new();
        let mut cur = 1;
        for bit in (0..n - 1).rev() {
            if code >> bit & 1 == 1 {
                parts.push(cur);
                cur = 1;
            } else {
                cur += 1;
            }
        }
        parts.push(cur);
        out.push(Composition::from_parts_unchecked(parts));
    }
    Ok(out)
}

pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_ENUMERATION_CAP)
}

/// All partitions of n, starting from (n) in reverse lexicographic order.
pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::from_parts_unchecked(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// p(λ↓) = Σ over arrangements of p°.
pub fn symmetrize<S: Scalar>(t: &CompositionTable<S>) -> PartitionTable<S> {
    let mut acc: std::collections::BTreeMap<Partition, S> = std::collections::BTreeMap::new();
    for (c, p) in t.iter() {
        let key = c.to_partition();
        let v = acc.remove(&key).unwrap_or_else(S::zero) + p.clone();
        acc.insert(key, v);
    }
    DistributionTable::new(t.n(), acc).expect("symmetrization preserves mass")
}

/// Push a law at level n through size-biased deletion of one ball.
pub fn sb_reduce_pushforward<K: Shape, S: Scalar>(
    t: &DistributionTable<K, S>,
) -> Result<DistributionTable<K, S>> {
    let n = t.n();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot reduce the empty composition".into()));
    }
    let nn = S::from_usize(n);
    let mut out = Vec::new();
    for (c, p) in t.iter() {
        if p.is_zero() {
            continue;
        }
        for (j, &part) in c.parts().iter().enumerate() {
            out.push((c.reduce_part(j), p.clone() * S::from_usize(part) / nn.clone()));
        }
    }
    DistributionTable::new(n - 1, out)
}

pub fn reverse_pushforward<S: Scalar>(t: &CompositionTable<S>) -> CompositionTable<S> {
    DistributionTable::new(t.n(), t.iter().map(|(c, p)| (c.reversed(), p.clone())))
        .expect("reversal preserves mass")
}

/// Law of the first part on {1..n}; entry m-1 holds P(F_n = m).
pub fn first_part_marginal<S: Scalar>(t: &CompositionTable<S>) -> Vec<S> {
    part_marginal(t, |c| c.parts().first().copied())
}

/// Law of the last part on {1..n}.
pub fn last_part_marginal<S: Scalar>(t: &CompositionTable<S>) -> Vec<S> {
    part_marginal(t, |c| c.parts().last().copied())
}

fn part_marginal<S: Scalar>(
    t: &CompositionTable<S>,
    pick: impl Fn(&Composition) -> Option<usize>,
) -> Vec<S> {
    let mut out = vec![S::zero(); t.n()];
    for (c, p) in t.iter() {
        if let Some(m) = pick(c) {
            out[m - 1] = out[m - 1].clone() + p.clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn comp(s: &str) -> Composition {
        s.parse().unwrap()
    }

    #[test]
    fn binary_codes() {
        assert_eq!(binary_encode(&comp("3,1,2")), "100110");
        assert_eq!(binary_encode(&comp("1")), "1");
        assert_eq!(binary_encode(&comp("1,1,1")), "111");
        assert_eq!(binary_decode("100110").unwrap(), comp("3,1,2"));
        assert!(binary_decode("0110").is_err());
        assert!(binary_decode("1021").is_err());
    }

    #[test]
    fn counting_functions() {
        assert_eq!(multinomial_count(&comp("3,1,2")), BigUint::from(60u32));
        assert_eq!(multinomial_count(&comp("5")), BigUint::from(1u32));
        assert_eq!(multinomial_count(&comp("1,1,1,1")), BigUint::from(24u32));
        let p = |s: &str| s.parse::<Partition>().unwrap();
        assert_eq!(shape_count(&p("2,1,1")), BigUint::from(6u32));
        assert_eq!(shape_count(&p("2,2")), BigUint::from(3u32));
        assert_eq!(shape_count(&p("7")), BigUint::from(1u32));
    }

    #[test]
    fn enumeration_order_and_counts() {
        let c3 = enumerate_compositions(3).unwrap();
        let names: Vec<String> = c3.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["3", "2,1", "1,2", "1,1,1"]);
        assert_eq!(enumerate_compositions(1).unwrap(), vec![comp("1")]);
        assert_eq!(enumerate_compositions(4).unwrap().len(), 8);
        assert_eq!(enumerate_partitions(4).unwrap().len(), 5);
        assert!(matches!(
            enumerate_compositions(21),
            Err(Error::CapExceeded { n: 21, cap: 20 })
        ));
        assert_eq!(enumerate_compositions_capped(21, 21).unwrap().len(), 1 << 20);
        let mut sorted = c3.clone();
        sorted.sort();
        assert_eq!(sorted, c3);
    }

    #[test]
    fn arrangements_are_distinct() {
        let p: Partition = "2,1,1".parse().unwrap();
        let a = p.arrangements();
        let names: Vec<String> = a.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["2,1,1", "1,2,1", "1,1,2"]);
    }

    fn uniform3() -> CompositionTable<Rational> {
        let cs = enumerate_compositions(3).unwrap();
        DistributionTable::new(3, cs.into_iter().map(|c| (c, r(1, 4)))).unwrap()
    }

    fn ewens1_n3() -> CompositionTable<Rational> {
        DistributionTable::new(
            3,
            vec![
                (comp("3"), r(1, 3)),
                (comp("2,1"), r(1, 3)),
                (comp("1,2"), r(1, 6)),
                (comp("1,1,1"), r(1, 6)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn symmetrize_examples() {
        let s = symmetrize(&uniform3());
        assert_eq!(s.get(&"2,1".parse().unwrap()), r(1, 2));
        assert_eq!(s.get(&"3".parse().unwrap()), r(1, 4));
        assert_eq!(s.get(&"1,1,1".parse().unwrap()), r(1, 4));
        let e = symmetrize(&ewens1_n3());
        assert_eq!(e.get(&"2,1".parse().unwrap()), r(1, 2));
        let pm = symmetrize(&CompositionTable::<Rational>::point_mass(comp("4")));
        assert_eq!(pm.get(&"4".parse().unwrap()), r(1, 1));
    }

    #[test]
    fn pushforward_examples() {
        let t = sb_reduce_pushforward(&CompositionTable::<Rational>::point_mass(comp("2"))).unwrap();
        assert_eq!(t.get(&comp("1")), r(1, 1));
        let t = sb_reduce_pushforward(&CompositionTable::<Rational>::point_mass(comp("1,1"))).unwrap();
        assert_eq!(t.get(&comp("1")), r(1, 1));
        let t = sb_reduce_pushforward(&ewens1_n3()).unwrap();
        assert_eq!(t.get(&comp("2")), r(1, 2));
        assert_eq!(t.get(&comp("1,1")), r(1, 2));
        let t = sb_reduce_pushforward(&CompositionTable::<Rational>::point_mass(comp("1"))).unwrap();
        assert_eq!(t.get(&Composition::empty()), r(1, 1));
    }

    #[test]
    fn marginals_and_reversal() {
        let t = ewens1_n3();
        assert_eq!(first_part_marginal(&t), vec![r(1, 3), r(1, 3), r(1, 3)]);
        assert_eq!(last_part_marginal(&t), vec![r(1, 2), r(1, 6), r(1, 3)]);
        let u = uniform3();
        assert_eq!(reverse_pushforward(&u), u);
    }

    #[test]
    fn json_round_trip() {
        let t = ewens1_n3();
        let v = t.to_json();
        assert_eq!(v["kind"], "composition");
        assert_eq!(v["entries"][0]["parts"], serde_json::json!([3]));
        assert_eq!(v["entries"][0]["p"], "1/3");
        let back = CompositionTable::<Rational>::from_json(&v).unwrap();
        assert_eq!(back, t);
        let f = t.to_float();
        let back = CompositionTable::<f64>::from_json(&f.to_json()).unwrap();
        assert!(back.same_law(&f, 1e-15));
    }

    #[test]
    fn table_validation() {
        assert!(DistributionTable::new(3, vec![(comp("3"), r(1, 2))]).is_err());
        assert!(DistributionTable::new(3, vec![(comp("2"), r(1, 1))]).is_err());
        assert!(DistributionTable::new(2, vec![(comp("2"), r(3, 2)), (comp("1,1"), r(-1, 2))]).is_err());
        assert!(DistributionTable::new(2, vec![(comp("2"), 0.5 + 1e-13), (comp("1,1"), 0.5)]).is_ok());
    }
}
