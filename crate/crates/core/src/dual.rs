//! Forward-mode dual numbers over any `Field`, with sparse derivative slots.
//!
//! Nesting duals (`Dual<Dual<Scalar>>`, ...) yields exact mixed partials of
//! higher order, one nesting level per differentiation group.

use std::collections::BTreeSet;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(pub u32);

/// `value + sum_k partials[k].1 * eps_k` with `eps_j eps_k = 0`.
/// Partials are sorted by slot and never store an exact zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    value: T,
    partials: Vec<(SlotId, T)>,
}

impl<T: Field> Dual<T> {
    pub fn constant(value: T) -> Self {
        Dual { value, partials: Vec::new() }
    }

    /// Independent variable at `slot` (no collision check).
    pub fn variable(value: T, slot: SlotId) -> Self {
        Dual { value, partials: vec![(slot, T::one())] }
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn partial(&self, slot: SlotId) -> T {
        match self.partials.binary_search_by_key(&slot, |p| p.0) {
            Ok(k) => self.partials[k].1.clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn slots(&self) -> impl Iterator<Item = SlotId> + '_ {
        self.partials.iter().map(|p| p.0)
    }

    fn from_parts(value: T, partials: Vec<(SlotId, T)>) -> Self {
        let partials = partials.into_iter().filter(|p| !p.1.is_zero()).collect();
        Dual { value, partials }
    }

    fn merge(a: &[(SlotId, T)], b: &[(SlotId, T)], fa: impl Fn(&T) -> T, fb: impl Fn(&T) -> T) -> Vec<(SlotId, T)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push((a[i].0, fa(&a[i].1)));
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, fb(&b[j].1)));
                j += 1;
            } else {
                out.push((a[i].0, fa(&a[i].1) + fb(&b[j].1)));
                i += 1;
                j += 1;
            }
        }
        out
    }
}

/// Hands out derivative slots and rejects reuse within one expression.
#[derive(Debug, Default, Clone)]
pub struct SlotAllocator {
    used: BTreeSet<SlotId>,
}

impl SlotAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lift<T: Field>(&mut self, x: T, slot: SlotId) -> Result<Dual<T>> {
        if !self.used.insert(slot) {
            return Err(Error::SlotCollision(slot.0));
        }
        Ok(Dual::variable(x, slot))
    }
}

/// Lift `x` as an independent variable, checking `slot` against `alloc`.
pub fn dual_lift(alloc: &mut SlotAllocator, x: Scalar, slot: SlotId) -> Result<Dual<Scalar>> {
    alloc.lift(x, slot)
}

impl<T: Field> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let p = Self::merge(&self.partials, &o.partials, T::clone, T::clone);
        Dual::from_parts(self.value + o.value, p)
    }
}

impl<T: Field> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let p = Self::merge(&self.partials, &o.partials, T::clone, |x| -x.clone());
        Dual::from_parts(self.value - o.value, p)
    }
}

impl<T: Field> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = Self::merge(
            &self.partials,
            &o.partials,
            |d| d.clone() * o.value.clone(),
            |d| self.value.clone() * d.clone(),
        );
        Dual::from_parts(self.value * o.value, p)
    }
}

impl<T: Field> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value.clone() / o.value.clone();
        let p = Self::merge(
            &self.partials,
            &o.partials,
            |d| d.clone() / o.value.clone(),
            |d| -(q.clone() * d.clone()) / o.value.clone(),
        );
        Dual::from_parts(q, p)
    }
}

impl<T: Field> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { value: -self.value, partials: self.partials.into_iter().map(|(k, d)| (k, -d)).collect() }
    }
}

impl<T: Field> Field for Dual<T> {
    fn from_scalar(s: Scalar) -> Self {
        Dual::constant(T::from_scalar(s))
    }
    fn primal(&self) -> Scalar {
        self.value.primal()
    }
    fn conj(&self) -> Self {
        Dual { value: self.value.conj(), partials: self.partials.iter().map(|(k, d)| (*k, d.conj())).collect() }
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.partials.is_empty()
    }
    fn scale(&self, s: &Scalar) -> Self {
        Dual::from_parts(self.value.scale(s), self.partials.iter().map(|(k, d)| (*k, d.scale(s))).collect())
    }
    fn sqrt(&self) -> Result<Self> {
        let r = self.value.sqrt()?;
        let two = r.clone() * T::from_i64(2);
        let p = self.partials.iter().map(|(k, d)| (*k, d.clone() / two.clone())).collect();
        Ok(Dual::from_parts(r, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: i64, slot: u32) -> Dual<Scalar> {
        Dual::variable(Scalar::int(v), SlotId(slot))
    }

    #[test]
    fn square() {
        let a = x(3, 0);
        let y = a.clone() * a;
        assert_eq!(y.value(), &Scalar::int(9));
        assert_eq!(y.partial(SlotId(0)), Scalar::int(6));
    }

    #[test]
    fn reciprocal() {
        let y = Dual::<Scalar>::one() / x(2, 0);
        assert_eq!(y.value(), &Scalar::ratio(1, 2));
        assert_eq!(y.partial(SlotId(0)), Scalar::ratio(-1, 4));
    }

    #[test]
    fn bilinear() {
        let y = x(2, 0) * x(5, 1);
        assert_eq!(y.partial(SlotId(0)), Scalar::int(5));
        assert_eq!(y.partial(SlotId(1)), Scalar::int(2));
    }

    #[test]
    fn collision_is_rejected() {
        let mut alloc = SlotAllocator::new();
        dual_lift(&mut alloc, Scalar::one(), SlotId(4)).unwrap();
        assert_eq!(dual_lift(&mut alloc, Scalar::one(), SlotId(4)), Err(Error::SlotCollision(4)));
    }

    #[test]
    fn nested_mixed_partial() {
        // f = x^2 y at (3, 2): d2f/dxdy = 2x = 6.
        let xv: Dual<Dual<Scalar>> = Dual::constant(Dual::variable(Scalar::int(3), SlotId(0)));
        let yv: Dual<Dual<Scalar>> = Dual::variable(Dual::constant(Scalar::int(2)), SlotId(1));
        let f = xv.clone() * xv * yv;
        assert_eq!(f.partial(SlotId(1)).partial(SlotId(0)), Scalar::int(6));
    }

    #[test]
    fn eight_slots() {
        let vars: Vec<_> = (0..8).map(|k| x(k as i64 + 1, k)).collect();
        let prod = vars.iter().cloned().fold(Dual::one(), |a, b| a * b);
        let total: i64 = (1..=8).product();
        for k in 0..8u32 {
            assert_eq!(prod.partial(SlotId(k)), Scalar::int(total / (k as i64 + 1)));
        }
    }
}
