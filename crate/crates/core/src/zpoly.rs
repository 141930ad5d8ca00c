//! Polynomials in the covariant components zeta_mu of a polarization vector,
//! with coefficients in any `Field`, and the interior derivative on the cone.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::spinor::{metric, Dim};

/// sum_m c_m prod_mu zeta_mu^(m_mu); never stores a zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ZPoly<T> {
    n: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Field> ZPoly<T> {
    pub fn zero(dim: Dim) -> Self {
        ZPoly { n: dim.n(), terms: BTreeMap::new() }
    }

    pub fn constant(dim: Dim, c: T) -> Self {
        let mut p = Self::zero(dim);
        p.insert(vec![0; dim.n()], c);
        p
    }

    /// The coordinate zeta_k (stored component k).
    pub fn var(dim: Dim, k: usize) -> Self {
        let mut e = vec![0; dim.n()];
        e[k] = 1;
        let mut p = Self::zero(dim);
        p.insert(e, T::one());
        p
    }

    /// sum_k c_k zeta_k.
    pub fn linear(dim: Dim, c: &[T]) -> Self {
        let mut p = Self::zero(dim);
        for (k, ck) in c.iter().enumerate() {
            p = p.add(&Self::var(dim, k).scale_by(ck));
        }
        p
    }

    fn dim(&self) -> Dim {
        Dim::try_from(self.n).expect("valid dimension")
    }

    fn insert(&mut self, e: Vec<u32>, c: T) {
        let v = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &T)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Total degree if homogeneous (the zero polynomial has degree 0).
    pub fn degree(&self) -> Result<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next().unwrap_or(0);
        if it.all(|x| x == d) {
            Ok(d)
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.insert(e.clone(), c.clone());
        }
        p
    }

    pub fn scale_by(&self, c: &T) -> Self {
        let mut p = Self::zero(self.dim());
        for (e, v) in &self.terms {
            p.insert(e.clone(), v.clone() * c.clone());
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.dim());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.insert(e, c1.clone() * c2.clone());
            }
        }
        p
    }

    pub fn pow(&self, r: u32) -> Self {
        let mut acc = Self::constant(self.dim(), T::one());
        for _ in 0..r {
            acc = acc.mul(self);
        }
        acc
    }

    /// d/d zeta_k.
    pub fn derivative(&self, k: usize) -> Self {
        let mut p = Self::zero(self.dim());
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut e2 = e.clone();
                e2[k] -= 1;
                p.insert(e2, c.clone() * T::from_i64(e[k] as i64));
            }
        }
        p
    }

    /// eta^{mu nu} d/dzeta_mu d/dzeta_nu (the variables carry lower indices).
    pub fn laplacian(&self) -> Self {
        let mut p = Self::zero(self.dim());
        for k in 0..self.n {
            let d2 = self.derivative(k).derivative(k);
            p = p.add(&d2.scale_by(&T::from_i64(metric(k))));
        }
        p
    }

    /// Evaluate at zeta = z.
    pub fn eval(&self, z: &[T]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &p) in e.iter().enumerate() {
                t = t * z[k].powi(p);
            }
            acc = acc + t;
        }
        acc
    }

    /// Apply a map to every coefficient.
    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> ZPoly<U> {
        let mut p = ZPoly { n: self.n, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            p.insert(e.clone(), f(c));
        }
        p
    }
}

/// zeta*_nu = (zeta d_zeta + D/2 - 1) d/dzeta^nu - (1/2) zeta_nu d_zeta^2, with
/// `nu` a stored component index. The Euler operator acts on the degree
/// r - 1 result as multiplication by r - 1.
pub fn interior_derivative<T: Field>(poly: &ZPoly<T>, nu: usize, dim: Dim) -> Result<ZPoly<T>> {
    if nu >= dim.n() {
        return Err(Error::BadIndex { index: nu, dim: dim.n() });
    }
    if poly.n != dim.n() {
        return Err(Error::WrongDimension { expected: dim.n(), got: poly.n });
    }
    let r = poly.degree()?;
    if r == 0 {
        return Ok(ZPoly::zero(dim));
    }
    // d/dzeta^nu = eta_{nu nu} d/dzeta_nu.
    let d = poly.derivative(nu).scale_by(&T::from_i64(metric(nu)));
    let euler = T::from_i64(r as i64 - 1) + T::ratio(dim.n() as i64 - 2, 2);
    let first = d.scale_by(&euler);
    let second = ZPoly::var(dim, nu).mul(&poly.laplacian()).scale_by(&T::ratio(-1, 2));
    Ok(first.add(&second))
}

/// Only the d_zeta^2 part of the interior derivative: -(1/2) zeta_nu d_zeta^2 poly.
pub fn interior_laplacian_term<T: Field>(poly: &ZPoly<T>, nu: usize, dim: Dim) -> ZPoly<T> {
    ZPoly::var(dim, nu).mul(&poly.laplacian()).scale_by(&T::ratio(-1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn s(n: i64) -> Scalar {
        Scalar::int(n)
    }

    #[test]
    fn constant_maps_to_zero() {
        let p = ZPoly::constant(Dim::Four, s(7));
        assert!(interior_derivative(&p, 2, Dim::Four).unwrap().is_zero());
    }

    #[test]
    fn inhomogeneous_is_rejected() {
        let p = ZPoly::var(Dim::Four, 0).add(&ZPoly::constant(Dim::Four, s(1)));
        assert_eq!(interior_derivative(&p, 0, Dim::Four), Err(Error::NotHomogeneous));
    }

    #[test]
    fn power_of_null_linear_form() {
        // (zeta.a)^r with a^2 = 0: the Laplacian term vanishes and
        // zeta*_nu = r (r - 1 + D/2 - 1) a_nu (zeta.a)^(r-1) with a_nu lowered.
        let a_up = [s(1), s(0), s(0), s(1)];
        let lin = ZPoly::linear(Dim::Four, &a_up);
        for r in 1..5u32 {
            let p = lin.pow(r);
            assert!(p.laplacian().is_zero());
            for nu in 0..4 {
                let got = interior_derivative(&p, nu, Dim::Four).unwrap();
                let a_lo = &a_up[nu] * &s(metric(nu));
                let c = s(r as i64) * (s(r as i64 - 1) + s(1)) * a_lo;
                let want = lin.pow(r - 1).scale_by(&c);
                assert_eq!(got, want);
            }
        }
    }
}
