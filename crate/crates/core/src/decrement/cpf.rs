use super::Decrements;
use crate::combinat::{
    enumerate_compositions_capped, symmetrize, Composition, CompositionTable, DistributionTable,
    Partition, PartitionTable, DEFAULT_ENUMERATION_CAP,
};
use crate::error::Result;
use crate::levy::harmonic;
use crate::scalar::{rising, Scalar};

/// p°(λ) = ∏ q(Λ_j:λ_j) with tail sums Λ_j = λ_j + ... + λ_k.
pub fn cpf<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, c: &Composition) -> Result<S> {
    let mut acc = S::one();
    for (&part, tail) in c.parts().iter().zip(c.tail_sums()) {
        acc = acc * q.q(tail, part)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

pub fn cpf_table<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, n: usize) -> Result<CompositionTable<S>> {
    cpf_table_capped(q, n, DEFAULT_ENUMERATION_CAP)
}

pub fn cpf_table_capped<S: Scalar, D: Decrements<S> + ?Sized>(
    q: &D,
    n: usize,
    cap: usize,
) -> Result<CompositionTable<S>> {
    let comps = enumerate_compositions_capped(n, cap)?;
    let entries = comps
        .into_iter()
        .map(|c| cpf(q, &c).map(|p| (c, p)))
        .collect::<Result<Vec<_>>>()?;
    DistributionTable::new(n, entries)
}

/// p(λ↓) as the sum of p° over the distinct arrangements of λ↓.
pub fn ppf<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, p: &Partition) -> Result<S> {
    let terms = p.arrangements().iter().map(|c| cpf(q, c)).collect::<Result<Vec<_>>>()?;
    Ok(S::sum_all(terms))
}

pub fn ppf_table<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, n: usize) -> Result<PartitionTable<S>> {
    Ok(symmetrize(&cpf_table(q, n)?))
}

fn multinomial<S: Scalar>(parts: &[usize]) -> S {
    let n: usize = parts.iter().sum();
    let mut acc = rising(&S::one(), n);
    for &p in parts {
        acc = acc / rising(&S::one(), p);
    }
    acc
}

fn shape_factor<S: Scalar>(p: &Partition) -> S {
    S::from_biguint(&p.shape_count())
}

/// Ewens CPF θ^k n!/(θ)_n ∏ 1/Λ_j.
pub fn esf_cpf<S: Scalar>(theta: &S, c: &Composition) -> S {
    let n = c.n();
    let mut acc = theta.powi(c.k()) * rising(&S::one(), n) / rising(theta, n);
    for tail in c.tail_sums() {
        acc = acc / S::from_usize(tail);
    }
    acc
}

/// Ewens sampling formula f(λ↓)θ^k/(θ)_n ∏ (λ_j-1)!.
pub fn esf_ppf<S: Scalar>(theta: &S, p: &Partition) -> S {
    let mut acc = shape_factor::<S>(p) * theta.powi(p.k()) / rising(theta, p.n());
    for &part in p.parts() {
        acc = acc * rising(&S::one(), part - 1);
    }
    acc
}

/// f(λ↓) ∏_{i=1}^{k-1}(θ+αi) / (1+θ)_{n-1} ∏ (1-α)_{λ_j-1}.
pub fn two_param_ppf<S: Scalar>(alpha: &S, theta: &S, p: &Partition) -> S {
    let mut acc = shape_factor::<S>(p);
    for i in 1..p.k() {
        acc = acc * (theta.clone() + alpha.clone() * S::from_usize(i));
    }
    acc = acc / rising(&(S::one() + theta.clone()), p.n() - 1);
    let om = S::one() - alpha.clone();
    for &part in p.parts() {
        acc = acc * rising(&om, part - 1);
    }
    acc
}

/// λ_k α^{k-1} ∏ (1-α)_{λ_j-1}/λ_j!.
pub fn alpha_zero_cpf<S: Scalar>(alpha: &S, c: &Composition) -> S {
    let parts = c.parts();
    let k = parts.len();
    let om = S::one() - alpha.clone();
    let mut acc = S::from_usize(parts[k - 1]) * alpha.powi(k - 1);
    for &part in parts {
        acc = acc * rising(&om, part - 1) / rising(&S::one(), part);
    }
    acc
}

/// f°(λ) α^k/(α)_n ∏ (1-α)_{λ_j-1}.
pub fn alpha_alpha_cpf<S: Scalar>(alpha: &S, c: &Composition) -> S {
    let om = S::one() - alpha.clone();
    let mut acc = multinomial::<S>(c.parts()) * alpha.powi(c.k()) / rising(alpha, c.n());
    for &part in c.parts() {
        acc = acc * rising(&om, part - 1);
    }
    acc
}

/// n!/(θ)_n ∏ 1/(λ_j h_θ(Λ_j)).
pub fn gammageom_cpf<S: Scalar>(theta: &S, c: &Composition) -> S {
    let mut acc = rising(&S::one(), c.n()) / rising(theta, c.n());
    for (&part, tail) in c.parts().iter().zip(c.tail_sums()) {
        acc = acc / (S::from_usize(part) * harmonic(theta, tail));
    }
    acc
}
