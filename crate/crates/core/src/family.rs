//! Text names for models: `ewens:theta=1`, `kill:base=(hook:d=1),beta=2`, ...

use std::fmt;
use std::str::FromStr;

use crate::decrement::{ClosedForm, DecrementMatrix};
use crate::error::{Error, Result};
use crate::levy::{LevyModel, StructuralLaw};
use crate::samplers::{PartSampler, StickFactor};
use crate::scalar::{Param, Scalar};

pub const GRAMMAR: &str = "\
family specs:
  ewens:theta=T                 T >= 0
  two-param:alpha=A,theta=T     0 <= A < 1, T >= 0
  beta-sb:gamma=G,theta=T       G, T > 0
  point-mass:x=X                0 < X <= 1
  hook:d=D                      D >= 0
  gamma-harmonic:theta=T        T > 0
  drift:d=D                     D > 0
  alpha-renewal:alpha=A         0 < A < 1
  one-block
  kill:base=(SPEC),beta=B       B >= 0
  sliced:base=(SPEC),theta=T    T >= 0
numbers: fractions like 1/2 and integers are exact, decimals like 0.5 are doubles";

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Ewens { theta: Param },
    TwoParam { alpha: Param, theta: Param },
    BetaSb { gamma: Param, theta: Param },
    PointMass { x: Param },
    Hook { d: Param },
    GammaHarmonic { theta: Param },
    Drift { d: Param },
    AlphaRenewal { alpha: Param },
    OneBlock,
    Kill { base: Box<FamilySpec>, beta: Param },
    Sliced { base: Box<FamilySpec>, theta: Param },
}

fn split_top(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced ')' in {s:?}")));
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced '(' in {s:?}")));
    }
    out.push(&s[start..]);
    Ok(out)
}

struct Args<'a> {
    family: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn parse(family: &'a str, body: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        if !body.trim().is_empty() {
            for item in split_top(body)? {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
                let k = k.trim();
                if pairs.iter().any(|(seen, _)| *seen == k) {
                    return Err(Error::Parse(format!("{family}: duplicate key {k:?}")));
                }
                pairs.push((k, v.trim()));
            }
        }
        Ok(Args { family, pairs })
    }

    fn take(&mut self, key: &str) -> Result<&'a str> {
        let i = self
            .pairs
            .iter()
            .position(|(k, _)| *k == key)
            .ok_or_else(|| Error::Parse(format!("{}: missing {key}", self.family)))?;
        Ok(self.pairs.remove(i).1)
    }

    fn param(&mut self, key: &str) -> Result<Param> {
        Param::parse(self.take(key)?)
    }

    fn base(&mut self) -> Result<Box<FamilySpec>> {
        let v = self.take("base")?;
        let inner = v
            .strip_prefix('(')
            .and_then(|v| v.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("{}: base must be parenthesized, got {v:?}", self.family)))?;
        Ok(Box::new(inner.parse()?))
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(Error::Parse(format!("{}: unknown key {k:?}", self.family))),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let mut a = Args::parse(name, body)?;
        let spec = match name {
            "ewens" => FamilySpec::Ewens { theta: a.param("theta")? },
            "two-param" => FamilySpec::TwoParam { alpha: a.param("alpha")?, theta: a.param("theta")? },
            "beta-sb" => FamilySpec::BetaSb { gamma: a.param("gamma")?, theta: a.param("theta")? },
            "point-mass" => FamilySpec::PointMass { x: a.param("x")? },
            "hook" => FamilySpec::Hook { d: a.param("d")? },
            "gamma-harmonic" => FamilySpec::GammaHarmonic { theta: a.param("theta")? },
            "drift" => FamilySpec::Drift { d: a.param("d")? },
            "alpha-renewal" => FamilySpec::AlphaRenewal { alpha: a.param("alpha")? },
            "one-block" => FamilySpec::OneBlock,
            "kill" => FamilySpec::Kill { base: a.base()?, beta: a.param("beta")? },
            "sliced" => FamilySpec::Sliced { base: a.base()?, theta: a.param("theta")? },
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        a.finish()?;
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Ewens { theta } => write!(f, "ewens:theta={theta}"),
            FamilySpec::TwoParam { alpha, theta } => write!(f, "two-param:alpha={alpha},theta={theta}"),
            FamilySpec::BetaSb { gamma, theta } => write!(f, "beta-sb:gamma={gamma},theta={theta}"),
            FamilySpec::PointMass { x } => write!(f, "point-mass:x={x}"),
            FamilySpec::Hook { d } => write!(f, "hook:d={d}"),
            FamilySpec::GammaHarmonic { theta } => write!(f, "gamma-harmonic:theta={theta}"),
            FamilySpec::Drift { d } => write!(f, "drift:d={d}"),
            FamilySpec::AlphaRenewal { alpha } => write!(f, "alpha-renewal:alpha={alpha}"),
            FamilySpec::OneBlock => write!(f, "one-block"),
            FamilySpec::Kill { base, beta } => write!(f, "kill:base=({base}),beta={beta}"),
            FamilySpec::Sliced { base, theta } => write!(f, "sliced:base=({base}),theta={theta}"),
        }
    }
}

impl FamilySpec {
    pub fn ewens(theta: Param) -> Self {
        FamilySpec::Ewens { theta }
    }

    pub fn two_param(alpha: Param, theta: Param) -> Self {
        FamilySpec::TwoParam { alpha, theta }
    }

    pub fn beta_sb(gamma: Param, theta: Param) -> Self {
        FamilySpec::BetaSb { gamma, theta }
    }

    pub fn hook(d: Param) -> Self {
        FamilySpec::Hook { d }
    }

    pub fn gamma_harmonic(theta: Param) -> Self {
        FamilySpec::GammaHarmonic { theta }
    }

    /// The named families every check suite runs over by default.
    pub fn defaults() -> Vec<FamilySpec> {
        vec![
            FamilySpec::ewens(Param::ratio(1, 2)),
            FamilySpec::ewens(Param::int(1)),
            FamilySpec::ewens(Param::int(2)),
            FamilySpec::two_param(Param::ratio(1, 2), Param::int(0)),
            FamilySpec::two_param(Param::ratio(1, 2), Param::ratio(1, 2)),
            FamilySpec::two_param(Param::ratio(3, 10), Param::ratio(7, 10)),
            FamilySpec::beta_sb(Param::int(2), Param::int(3)),
            FamilySpec::hook(Param::int(1)),
            FamilySpec::gamma_harmonic(Param::int(1)),
        ]
    }

    /// `all` or specs separated by `;`.
    pub fn parse_list(s: &str) -> Result<Vec<FamilySpec>> {
        if s.trim() == "all" {
            return Ok(Self::defaults());
        }
        s.split(';').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
    }

    fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::AlphaRenewal { alpha } => ClosedForm::alpha_renewal(alpha.clone()).map(|_| ()),
            _ => self.model().map(|_| ()),
        }
    }

    pub fn model(&self) -> Result<LevyModel> {
        match self {
            FamilySpec::Ewens { theta } => LevyModel::ewens(theta.clone()),
            FamilySpec::TwoParam { alpha, theta } => LevyModel::two_param(alpha.clone(), theta.clone()),
            FamilySpec::BetaSb { gamma, theta } => LevyModel::beta_sb(gamma.clone(), theta.clone()),
            FamilySpec::PointMass { x } => LevyModel::point_mass(x.clone()),
            FamilySpec::Hook { d } => LevyModel::hook(d.clone()),
            FamilySpec::GammaHarmonic { theta } => LevyModel::gamma_harmonic(theta.clone()),
            FamilySpec::Drift { d } => LevyModel::drift(d.clone()),
            FamilySpec::AlphaRenewal { alpha } => LevyModel::two_param(alpha.clone(), Param::int(0)),
            FamilySpec::OneBlock => LevyModel::hook(Param::int(0)),
            FamilySpec::Kill { base, beta } => base.model()?.kill_deform(beta.clone()),
            FamilySpec::Sliced { base, theta } => base.model()?.sliced_transform(theta.clone()),
        }
    }

    pub fn closed(&self) -> Option<ClosedForm> {
        match self {
            FamilySpec::Ewens { theta } => Some(ClosedForm::Ewens { theta: theta.clone() }),
            FamilySpec::TwoParam { alpha, theta } => Some(ClosedForm::TwoParam { alpha: alpha.clone(), theta: theta.clone() }),
            FamilySpec::BetaSb { gamma, theta } => Some(ClosedForm::BetaSb { gamma: gamma.clone(), theta: theta.clone() }),
            FamilySpec::Hook { d } => Some(ClosedForm::Hook { d: d.clone() }),
            FamilySpec::GammaHarmonic { theta } => Some(ClosedForm::GammaHarmonic { theta: theta.clone() }),
            FamilySpec::AlphaRenewal { alpha } => Some(ClosedForm::AlphaRenewal { alpha: alpha.clone() }),
            _ => None,
        }
    }

    /// (α, θ) when the family is a two-parameter one, Ewens included.
    pub fn two_param_params(&self) -> Option<(Param, Param)> {
        match self {
            FamilySpec::Ewens { theta } => Some((Param::int(0), theta.clone())),
            FamilySpec::TwoParam { alpha, theta } => Some((alpha.clone(), theta.clone())),
            FamilySpec::AlphaRenewal { alpha } => Some((alpha.clone(), Param::int(0))),
            FamilySpec::OneBlock => Some((Param::int(0), Param::int(0))),
            _ => None,
        }
    }

    pub fn structural_law<S: Scalar>(&self) -> Option<Result<StructuralLaw<S>>> {
        self.two_param_params().map(|(a, t)| StructuralLaw::two_param(&a, &t))
    }

    pub fn stick_factor(&self) -> Result<Option<StickFactor>> {
        StickFactor::from_model(&self.model()?)
    }

    pub fn is_exact(&self) -> bool {
        match self.closed() {
            Some(c) => c.is_exact(),
            None => self.model().map(|m| m.is_exact()).unwrap_or(false),
        }
    }

    /// Rows 1..=N, from the closed form when there is one.
    pub fn matrix<S: Scalar>(&self, max_n: usize) -> Result<DecrementMatrix<S>> {
        if S::EXACT && !self.is_exact() {
            return Err(Error::NotExact(format!("{self} has decimal parameters; use the float backend")));
        }
        if let FamilySpec::OneBlock = self {
            return Ok(DecrementMatrix::one_block(max_n));
        }
        match self.closed() {
            Some(c) => DecrementMatrix::from_closed(&c, max_n),
            None => DecrementMatrix::from_levy(&self.model()?, max_n),
        }
    }

    pub fn part_sampler(&self, max_n: usize) -> Result<PartSampler> {
        match self {
            FamilySpec::OneBlock => Ok(PartSampler::OneBlock),
            _ => match self.closed() {
                Some(c) => PartSampler::from_closed(&c),
                None => PartSampler::from_model(&self.model()?, max_n),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decrement::Decrements;
    use crate::scalar::Rational;

    #[test]
    fn round_trip() {
        for s in [
            "ewens:theta=1",
            "two-param:alpha=0.5,theta=0",
            "two-param:alpha=1/2,theta=1/2",
            "beta-sb:gamma=2,theta=3",
            "hook:d=1",
            "gamma-harmonic:theta=1",
            "point-mass:x=1/3",
            "drift:d=2",
            "alpha-renewal:alpha=1/2",
            "one-block",
            "kill:base=(ewens:theta=1),beta=2",
            "sliced:base=(two-param:alpha=1/2,theta=0),theta=1",
            "kill:base=(sliced:base=(hook:d=1),theta=1),beta=1/3",
        ] {
            let f: FamilySpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        let f: FamilySpec = " two-param:theta=0 , alpha=2/4".parse().unwrap();
        assert_eq!(f.to_string(), "two-param:alpha=1/2,theta=0");
    }

    #[test]
    fn rejects_bad_specs() {
        for s in [
            "ewens",
            "ewens:theta=-1",
            "ewens:theta=1,theta=2",
            "ewens:theta=1,alpha=0",
            "two-param:alpha=1,theta=0",
            "kill:base=ewens:theta=1,beta=2",
            "kill:base=(ewens:theta=1,beta=2",
            "beta-sb:gamma=0,theta=1",
            "foo:x=1",
            "alpha-renewal:alpha=0",
        ] {
            assert!(s.parse::<FamilySpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn exactness_and_matrices() {
        let f: FamilySpec = "ewens:theta=0.5".parse().unwrap();
        assert!(!f.is_exact());
        assert!(matches!(f.matrix::<Rational>(3), Err(Error::NotExact(_))));
        assert!(f.matrix::<f64>(3).is_ok());
        let f: FamilySpec = "kill:base=(ewens:theta=1),beta=1".parse().unwrap();
        let q = f.matrix::<Rational>(3).unwrap();
        assert_eq!(q.q(1, 1).unwrap(), Rational::from_int(1));
        let q = FamilySpec::OneBlock.matrix::<Rational>(4).unwrap();
        assert_eq!(q.get(4, 4), Rational::from_int(1));
        assert_eq!(FamilySpec::parse_list("all").unwrap().len(), 9);
        assert_eq!(FamilySpec::parse_list("ewens:theta=1;hook:d=1").unwrap().len(), 2);
    }
}
