//! Evaluation frames: ordered (point, lambda, lambda_bar) slots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::spinor::{Chirality, Dim, MinkowskiPoint, WeylSpinor};

#[derive(Clone, Debug, PartialEq)]
pub struct Slot<T> {
    pub x: MinkowskiPoint<T>,
    pub lambda: WeylSpinor<T>,
    pub lambda_bar: WeylSpinor<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    dim: Dim,
    slots: Vec<Slot<T>>,
}

impl<T: Field> Frame<T> {
    /// Structural validation only: dimensions, chirality tags and, in 3D,
    /// real spinors with lambda_bar = lambda. Null separations are reported
    /// lazily by the operations that need x_ij^2 != 0 (or eagerly via
    /// `checked`).
    pub fn new(dim: Dim, slots: Vec<Slot<T>>) -> Result<Self> {
        for s in &slots {
            if s.x.comps.len() != dim.n() {
                return Err(Error::WrongDimension { expected: dim.n(), got: s.x.comps.len() });
            }
            if s.lambda.chirality != Chirality::Undotted || s.lambda_bar.chirality != Chirality::Dotted {
                return Err(Error::Invalid("lambda must be undotted and lambda_bar dotted".into()));
            }
            if !s.x.comps.iter().all(|c| c.primal().is_real()) {
                return Err(Error::Invalid("points must be real".into()));
            }
            if dim == Dim::Three {
                let real = s.lambda.c.iter().all(|c| c.primal().is_real());
                if !real || s.lambda.c != s.lambda_bar.c {
                    return Err(Error::Invalid("3D spinors must be real with lambda_bar = lambda".into()));
                }
            }
        }
        Ok(Frame { dim, slots })
    }

    /// Like `new`, additionally rejecting any lightlike pair.
    pub fn checked(dim: Dim, slots: Vec<Slot<T>>) -> Result<Self> {
        let f = Self::new(dim, slots)?;
        f.check_separations()?;
        Ok(f)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot<T>] {
        &self.slots
    }

    pub fn slot(&self, i: usize) -> Result<&Slot<T>> {
        self.slots.get(i).ok_or(Error::WrongArity { expected: i + 1, got: self.slots.len() })
    }

    pub fn x(&self, i: usize) -> &MinkowskiPoint<T> {
        &self.slots[i].x
    }

    pub fn lam(&self, i: usize) -> &[T; 2] {
        &self.slots[i].lambda.c
    }

    pub fn lam_bar(&self, i: usize) -> &[T; 2] {
        &self.slots[i].lambda_bar.c
    }

    pub fn require_arity(&self, n: usize) -> Result<()> {
        if self.slots.len() != n {
            return Err(Error::WrongArity { expected: n, got: self.slots.len() });
        }
        Ok(())
    }

    pub fn require_dim(&self, d: Dim) -> Result<()> {
        if self.dim != d {
            return Err(Error::WrongDimension { expected: d.n(), got: self.dim.n() });
        }
        Ok(())
    }

    /// x_i - x_j.
    pub fn sep(&self, i: usize, j: usize) -> MinkowskiPoint<T> {
        &self.slots[i].x - &self.slots[j].x
    }

    /// x_ij^2, failing on a lightlike pair.
    pub fn rho2(&self, i: usize, j: usize) -> Result<T> {
        let s = self.sep(i, j).square();
        if s.primal().is_zero() {
            return Err(Error::LightconeSingularity { i: i + 1, j: j + 1 });
        }
        Ok(s)
    }

    /// x_ij / x_ij^2, failing on a lightlike pair.
    pub fn check_sep(&self, i: usize, j: usize) -> Result<MinkowskiPoint<T>> {
        let r = self.rho2(i, j)?;
        Ok(self.sep(i, j).scale(&(T::one() / r)))
    }

    pub fn check_separations(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                self.rho2(i, j)?;
            }
        }
        Ok(())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Frame<U> {
        let sp = |s: &WeylSpinor<T>| WeylSpinor { c: [f(&s.c[0]), f(&s.c[1])], chirality: s.chirality, real: s.real };
        Frame {
            dim: self.dim,
            slots: self
                .slots
                .iter()
                .map(|s| Slot { x: s.x.lift(&f), lambda: sp(&s.lambda), lambda_bar: sp(&s.lambda_bar) })
                .collect(),
        }
    }

    pub fn with_slots(&self, slots: Vec<Slot<T>>) -> Self {
        Frame { dim: self.dim, slots }
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        self.with_slots(order.iter().map(|&k| self.slots[k].clone()).collect())
    }
}

impl Frame<Scalar> {
    pub fn to_float(&self) -> Self {
        self.map(Scalar::to_float)
    }

    pub fn lift<U: Field>(&self) -> Frame<U> {
        self.map(|s| U::from_scalar(s.clone()))
    }

    pub fn is_exact(&self) -> bool {
        self.slots.iter().all(|s| s.x.comps.iter().chain(&s.lambda.c).chain(&s.lambda_bar.c).all(Scalar::is_exact))
    }
}

impl<T: Field> Slot<T> {
    pub fn new(x: MinkowskiPoint<T>, lambda: [T; 2], lambda_bar: [T; 2]) -> Self {
        let real = x.comps.len() == 3;
        Slot {
            x,
            lambda: WeylSpinor { c: lambda, chirality: Chirality::Undotted, real },
            lambda_bar: WeylSpinor { c: lambda_bar, chirality: Chirality::Dotted, real },
        }
    }

    /// 4D slot with lambda_bar = conj(lambda); 3D slot with lambda_bar = lambda.
    pub fn conjugate_pair(x: MinkowskiPoint<T>, lambda: [T; 2]) -> Self {
        let lb = if x.comps.len() == 3 { lambda.clone() } else { [lambda[0].conj(), lambda[1].conj()] };
        Slot::new(x, lambda, lb)
    }
}

/// Frame JSON: `{"dim":4,"slots":[{"x":[..],"lambda":[..],"lambda_bar":[..]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameJson {
    pub dim: usize,
    pub slots: Vec<SlotJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotJson {
    pub x: Vec<String>,
    pub lambda: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bar: Option<Vec<String>>,
}

fn parse_field(s: &str, field: String) -> Result<Scalar> {
    s.parse::<Scalar>().map_err(|e| match e {
        Error::Parse { input, reason } => Error::Parse { input, reason: format!("{field}: {reason}") },
        other => other,
    })
}

fn parse_pair(v: &[String], field: String) -> Result<[Scalar; 2]> {
    if v.len() != 2 {
        return Err(Error::Invalid(format!("{field}: expected 2 components, got {}", v.len())));
    }
    Ok([parse_field(&v[0], format!("{field}[0]"))?, parse_field(&v[1], format!("{field}[1]"))?])
}

impl FrameJson {
    /// Parse into an exact frame; an absent lambda_bar defaults to
    /// conj(lambda) in 4D and lambda in 3D.
    pub fn to_frame(&self) -> Result<Frame<Scalar>> {
        let dim =
            Dim::try_from(self.dim).map_err(|_| Error::Invalid(format!("dim: must be 3 or 4, got {}", self.dim)))?;
        let mut slots = Vec::new();
        for (k, s) in self.slots.iter().enumerate() {
            if s.x.len() != dim.n() {
                return Err(Error::Invalid(format!(
                    "slots[{k}].x: expected {} components, got {}",
                    dim.n(),
                    s.x.len()
                )));
            }
            let x =
                s.x.iter()
                    .enumerate()
                    .map(|(c, v)| parse_field(v, format!("slots[{k}].x[{c}]")))
                    .collect::<Result<Vec<_>>>()?;
            let x = MinkowskiPoint::new(x)?;
            let lam = parse_pair(&s.lambda, format!("slots[{k}].lambda"))?;
            let slot = match &s.lambda_bar {
                Some(lb) => Slot::new(x, lam, parse_pair(lb, format!("slots[{k}].lambda_bar"))?),
                None => Slot::conjugate_pair(x, lam),
            };
            slots.push(slot);
        }
        Frame::new(dim, slots)
    }

    pub fn from_frame(f: &Frame<Scalar>) -> Self {
        let strs = |v: &[Scalar]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        FrameJson {
            dim: f.dim().n(),
            slots: f
                .slots()
                .iter()
                .map(|s| SlotJson {
                    x: strs(&s.x.comps),
                    lambda: strs(&s.lambda.c),
                    lambda_bar: Some(strs(&s.lambda_bar.c)),
                })
                .collect(),
        }
    }
}

/// Uniform rational with numerator in [-bound, bound] and denominator in [1, bound].
pub fn random_rational(rng: &mut impl Rng, bound: i64) -> BigRational {
    let b = bound.max(1);
    let n = rng.gen_range(-b..=b);
    let d = rng.gen_range(1..=b);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_gaussian(rng: &mut impl Rng, bound: i64) -> Scalar {
    let re = random_rational(rng, bound);
    let im = random_rational(rng, bound);
    Scalar::gaussian(re, im)
}

pub fn random_real(rng: &mut impl Rng, bound: i64) -> Scalar {
    Scalar::gaussian(random_rational(rng, bound), BigRational::zero())
}

pub fn random_point(rng: &mut impl Rng, dim: Dim, bound: i64) -> MinkowskiPoint<Scalar> {
    MinkowskiPoint { comps: (0..dim.n()).map(|_| random_real(rng, bound)).collect() }
}

/// Random exact frame with no lightlike pair. 4D spinors are Gaussian
/// rationals with lambda_bar = conj(lambda); 3D spinors are real.
pub fn random_frame(rng: &mut impl Rng, dim: Dim, n: usize, bound: i64) -> Frame<Scalar> {
    loop {
        let slots = (0..n)
            .map(|_| {
                let x = random_point(rng, dim, bound);
                let lam = match dim {
                    Dim::Four => [random_gaussian(rng, bound), random_gaussian(rng, bound)],
                    Dim::Three => [random_real(rng, bound), random_real(rng, bound)],
                };
                Slot::conjugate_pair(x, lam)
            })
            .collect();
        if let Ok(f) = Frame::checked(dim, slots) {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn json_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = random_frame(&mut rng, Dim::Four, 3, 20);
        let j = FrameJson::from_frame(&f);
        let text = serde_json::to_string(&j).unwrap();
        let back: FrameJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_frame().unwrap(), f);
    }

    #[test]
    fn bad_component_names_field() {
        let j: FrameJson =
            serde_json::from_str(r#"{"dim":4,"slots":[{"x":["0","1","x","0"],"lambda":["1","0"]}]}"#).unwrap();
        let e = j.to_frame().unwrap_err().to_string();
        assert!(e.contains("slots[0].x[2]"), "{e}");
    }

    #[test]
    fn lightlike_pair_is_reported() {
        let j: FrameJson = serde_json::from_str(
            r#"{"dim":4,"slots":[{"x":["0","0","0","0"],"lambda":["1","0"]},{"x":["1","1","0","0"],"lambda":["1","0"]}]}"#,
        )
        .unwrap();
        let f = j.to_frame().unwrap();
        assert_eq!(f.check_separations(), Err(Error::LightconeSingularity { i: 1, j: 2 }));
    }

    #[test]
    fn three_d_requires_real_spinors() {
        let j: FrameJson =
            serde_json::from_str(r#"{"dim":3,"slots":[{"x":["0","1","0"],"lambda":["1","i"]}]}"#).unwrap();
        assert!(j.to_frame().is_err());
    }
}
