use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{ppf, Decrements};
use crate::combinat::Partition;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// d(λ↓, m) over the distinct part sizes m of one partition.
#[derive(Clone, Debug, PartialEq)]
pub struct DeletionKernel<S> {
    pub shape: Partition,
    pub d: BTreeMap<usize, S>,
}

impl<S: Scalar> DeletionKernel<S> {
    pub fn get(&self, m: usize) -> S {
        self.d.get(&m).cloned().unwrap_or_else(S::zero)
    }

    pub fn total(&self) -> S {
        S::sum_all(self.d.values().cloned())
    }

    /// `{"d":{"1":"1/2","2":"1/2"},"shape":[2,1,1]}`
    pub fn to_json(&self) -> Value {
        let mut d = Map::new();
        for (m, v) in &self.d {
            d.insert(m.to_string(), Value::String(v.format()));
        }
        json!({"shape": self.shape.parts(), "d": Value::Object(d)})
    }
}

/// d(λ↓,m) = q(n:m) p(λ↓∖{m}) / p(λ↓).
pub fn deletion_kernel<S: Scalar, D: Decrements<S> + ?Sized>(
    q: &D,
    shape: &Partition,
) -> Result<DeletionKernel<S>> {
    let n = shape.n();
    let p = ppf(q, shape)?;
    if p.is_zero() {
        return Err(Error::Undefined(format!("p({shape}) = 0, kernel row undefined")));
    }
    let mut d = BTreeMap::new();
    for m in shape.distinct_parts() {
        let rest = shape.remove_part(m).expect("m is a part");
        let p_rest = if rest.is_empty() { S::one() } else { ppf(q, &rest)? };
        d.insert(m, q.q(n, m)? * p_rest / p.clone());
    }
    Ok(DeletionKernel { shape: shape.clone(), d })
}

/// (k_m/n)((n-m)τ + m(1-τ)) / (1 - τ + (k-1)τ); a single-part shape gets 1.
pub fn d_tau<S: Scalar>(shape: &Partition, m: usize, tau: &S) -> S {
    let km = shape.multiplicity(m);
    if km == 0 {
        return S::zero();
    }
    let (n, k) = (shape.n(), shape.k());
    if k == 1 {
        return S::one();
    }
    let one = S::one();
    let num = S::from_usize(n - m) * tau.clone() + S::from_usize(m) * (one.clone() - tau.clone());
    let den = one - tau.clone() + S::from_usize(k - 1) * tau.clone();
    S::from_usize(km) / S::from_usize(n) * num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::enumerate_partitions;
    use crate::decrement::DecrementMatrix;
    use crate::scalar::{Param, Rational};

    fn r(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn d_tau_examples() {
        let s = part("2,1,1");
        assert_eq!(d_tau(&s, 1, &r(1, 1)), r(3, 4));
        assert_eq!(d_tau(&s, 2, &r(1, 1)), r(1, 4));
        assert_eq!(d_tau(&s, 1, &r(0, 1)), r(1, 2));
        assert_eq!(d_tau(&s, 1, &r(1, 2)), r(2, 3));
        assert_eq!(d_tau(&part("4"), 4, &r(1, 1)), r(1, 1));
    }

    #[test]
    fn kernel_examples() {
        let e = DecrementMatrix::<Rational>::ewens(Param::ratio(5, 2), 7).unwrap();
        for n in 1..=7 {
            for p in enumerate_partitions(n).unwrap() {
                let k = deletion_kernel(&e, &p).unwrap();
                assert_eq!(k.total(), r(1, 1));
                for m in p.distinct_parts() {
                    let want = r((p.multiplicity(m) * m) as i64, n as i64);
                    assert_eq!(k.get(m), want);
                }
            }
        }
        let k = deletion_kernel(&e, &part("2,1,1")).unwrap();
        assert_eq!(k.to_json().to_string(), r#"{"d":{"1":"1/2","2":"1/2"},"shape":[2,1,1]}"#);
    }

    #[test]
    fn alpha_alpha_kernel_is_uniform() {
        let q = DecrementMatrix::<Rational>::two_param(Param::ratio(1, 3), Param::ratio(1, 3), 6)
            .unwrap();
        for p in enumerate_partitions(6).unwrap() {
            let k = deletion_kernel(&q, &p).unwrap();
            for m in p.distinct_parts() {
                assert_eq!(k.get(m), r(p.multiplicity(m) as i64, p.k() as i64));
            }
        }
    }
}
