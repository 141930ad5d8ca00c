//! Exact Gaussian rationals times an integer power of pi, or complex doubles.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Relative tolerance for float comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-10;
/// Absolute floor for float comparisons.
pub const FLOAT_ABS_TOL: f64 = 1e-14;

/// Exact payload: `(re + i im) * pi^pi`. Zero always carries `pi == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exact {
    re: BigRational,
    im: BigRational,
    pi: i32,
}

impl Exact {
    fn new(re: BigRational, im: BigRational, pi: i32) -> Self {
        let pi = if re.is_zero() && im.is_zero() { 0 } else { pi };
        Exact { re, im, pi }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn pi_exponent(&self) -> i32 {
        self.pi
    }

    fn add_raw(&self, o: &Exact, negate: bool) -> std::result::Result<Exact, Error> {
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(if negate { o.neg_raw() } else { o.clone() });
        }
        if self.pi != o.pi {
            return Err(Error::MixedPiExponent { left: self.pi, right: o.pi });
        }
        let (re, im) = if negate { (&self.re - &o.re, &self.im - &o.im) } else { (&self.re + &o.re, &self.im + &o.im) };
        Ok(Exact::new(re, im, self.pi))
    }

    fn neg_raw(&self) -> Exact {
        Exact { re: -&self.re, im: -&self.im, pi: self.pi }
    }

    fn mul_raw(&self, o: &Exact) -> Exact {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Exact::new(re, im, self.pi + o.pi)
    }

    fn div_raw(&self, o: &Exact) -> std::result::Result<Exact, Error> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if o.im.is_zero() {
            return Ok(Exact::new(&self.re / &o.re, &self.im / &o.re, self.pi - o.pi));
        }
        let norm = &o.re * &o.re + &o.im * &o.im;
        let re = (&self.re * &o.re + &self.im * &o.im) / &norm;
        let im = (&self.im * &o.re - &self.re * &o.im) / &norm;
        Ok(Exact::new(re, im, self.pi - o.pi))
    }

    fn to_complex(&self) -> Complex64 {
        let f = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
        let scale = std::f64::consts::PI.powi(self.pi);
        Complex64::new(f(&self.re) * scale, f(&self.im) * scale)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Exact),
    Float(Complex64),
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Exact::new(BigRational::from_integer(n.into()), BigRational::zero(), 0))
    }

    /// `n/d`; panics when `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar::Exact(Exact::new(q(n, d), BigRational::zero(), 0))
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(Exact::new(re, im, 0))
    }

    pub fn exact(re: BigRational, im: BigRational, pi: i32) -> Self {
        Scalar::Exact(Exact::new(re, im, pi))
    }

    pub fn i() -> Self {
        Scalar::Exact(Exact::new(BigRational::zero(), BigRational::one(), 0))
    }

    /// `pi^k` as an exact value.
    pub fn pi_pow(k: i32) -> Self {
        Scalar::Exact(Exact::new(BigRational::one(), BigRational::zero(), k))
    }

    pub fn float(z: Complex64) -> Self {
        Scalar::Float(z)
    }

    pub fn real_float(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Exact> {
        match self {
            Scalar::Exact(e) => Some(e),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(e) => e.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// True when the imaginary part vanishes (exactly, or to float tolerance).
    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(e) => e.im.is_zero(),
            Scalar::Float(z) => z.im.abs() <= FLOAT_REL_TOL * z.norm() + FLOAT_ABS_TOL,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(e) => Scalar::Exact(Exact { re: e.re.clone(), im: -&e.im, pi: e.pi }),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn re_part(&self) -> Self {
        match self {
            Scalar::Exact(e) => Scalar::Exact(Exact::new(e.re.clone(), BigRational::zero(), e.pi)),
            Scalar::Float(z) => Scalar::real_float(z.re),
        }
    }

    pub fn im_part(&self) -> Self {
        match self {
            Scalar::Exact(e) => Scalar::Exact(Exact::new(e.im.clone(), BigRational::zero(), e.pi)),
            Scalar::Float(z) => Scalar::real_float(z.im),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(e) => e.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Self {
        Scalar::Float(self.to_complex())
    }

    /// Magnitude as a double (for tolerance checks and reporting).
    pub fn abs_f64(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return Scalar::one() / self.powi(-n);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Square root of a positive value: exact when it is the square of a
    /// rational with no pi factor (or an even pi power), else an error.
    /// Float values take the principal branch.
    pub fn sqrt(&self) -> Result<Self> {
        match self {
            Scalar::Float(z) => Ok(Scalar::Float(z.sqrt())),
            Scalar::Exact(e) => {
                if !e.im.is_zero() || e.re.is_negative() || e.pi % 2 != 0 {
                    return Err(Error::NotPerfectSquare(self.to_string()));
                }
                let n = e.re.numer();
                let d = e.re.denom();
                let (rn, rd) = (n.sqrt(), d.sqrt());
                if &(&rn * &rn) != n || &(&rd * &rd) != d {
                    return Err(Error::NotPerfectSquare(self.to_string()));
                }
                Ok(Scalar::exact(BigRational::new(rn, rd), BigRational::zero(), e.pi / 2))
            }
        }
    }

    pub fn checked_add(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.add_raw(b, false).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(Error::MixedBackend),
        }
    }

    pub fn checked_sub(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.add_raw(b, true).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a - b)),
            _ => Err(Error::MixedBackend),
        }
    }

    pub fn checked_mul(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.mul_raw(b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(Error::MixedBackend),
        }
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.div_raw(b).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => {
                if b.re == 0.0 && b.im == 0.0 {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Float(a / b))
                }
            }
            _ => Err(Error::MixedBackend),
        }
    }

    /// Float-tolerant equality (exact values compare structurally).
    pub fn approx_eq(&self, o: &Scalar, rel: f64) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_complex(), o.to_complex());
                (a - b).norm() <= rel * a.norm().max(b.norm()) + FLOAT_ABS_TOL
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: never promotes backends and never panics.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

fn promote(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
    (a.to_float(), b.to_float())
}

// Operators promote mixed backends to float and panic on mixed pi exponents
// or division by zero; use `scalar_arith` for the checked forms.
macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                let r = if self.is_exact() == o.is_exact() {
                    self.$checked(o)
                } else {
                    let (a, b) = promote(self, o);
                    a.$checked(&b)
                };
                r.unwrap_or_else(|e| panic!("{e}: {self} and {o}"))
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);
scalar_binop!(Div, div, checked_div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(e) => Scalar::Exact(e.neg_raw()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::gaussian(r, BigRational::zero())
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{:e}", z.re)
                } else {
                    write!(f, "{:e}{:+e}*i", z.re, z.im)
                }
            }
            Scalar::Exact(e) => {
                let body = match (e.re.is_zero(), e.im.is_zero()) {
                    (_, true) => fmt_rat(&e.re),
                    (true, false) => format!("{}*i", fmt_rat(&e.im)),
                    (false, false) => {
                        let im = fmt_rat(&e.im);
                        let sep = if e.im.is_negative() { "" } else { "+" };
                        format!("{}{sep}{im}*i", fmt_rat(&e.re))
                    }
                };
                if e.pi == 0 {
                    f.write_str(&body)
                } else if !e.re.is_zero() && !e.im.is_zero() {
                    write!(f, "({body})*pi^{}", e.pi)
                } else {
                    write!(f, "{body}*pi^{}", e.pi)
                }
            }
        }
    }
}

fn parse_int(s: &str, full: &str) -> Result<BigInt> {
    let ok = !s.is_empty()
        && s.strip_prefix(['+', '-']).unwrap_or(s).bytes().all(|b| b.is_ascii_digit())
        && s.strip_prefix(['+', '-']).is_none_or(|r| !r.is_empty());
    if !ok {
        return Err(Error::Parse { input: full.into(), reason: format!("bad integer {s:?}") });
    }
    s.parse::<BigInt>().map_err(|e| Error::Parse { input: full.into(), reason: e.to_string() })
}

fn parse_rat(s: &str, full: &str) -> Result<BigRational> {
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s, full)?)),
        Some((n, d)) => {
            let d = parse_int(d, full)?;
            if d.is_zero() {
                return Err(Error::Parse { input: full.into(), reason: "zero denominator".into() });
            }
            Ok(BigRational::new(parse_int(n, full)?, d))
        }
    }
}

fn parse_body(s: &str, full: &str) -> Result<(BigRational, BigRational)> {
    let err = |r: &str| Error::Parse { input: full.into(), reason: r.into() };
    // Split into signed terms at +/- that are not the leading sign.
    let mut terms = Vec::new();
    let bytes = s.as_bytes();
    let mut start = 0;
    for k in 1..bytes.len() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/' {
            terms.push(&s[start..k]);
            start = k;
        }
    }
    terms.push(&s[start..]);
    if terms.len() > 2 || terms.iter().any(|t| t.is_empty()) {
        return Err(err("expected a/b or a/b+c/d*i"));
    }
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    let mut seen = (false, false);
    for t in terms {
        let imag = t.ends_with('i');
        let coef = if imag {
            let c = t.strip_suffix('i').unwrap();
            let c = c.strip_suffix('*').unwrap_or(c);
            match c {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rat(c, full)?,
            }
        } else {
            parse_rat(t, full)?
        };
        let slot = if imag { &mut seen.1 } else { &mut seen.0 };
        if *slot {
            return Err(err("duplicate real or imaginary part"));
        }
        *slot = true;
        if imag {
            im = coef;
        } else {
            re = coef;
        }
    }
    Ok((re, im))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses the exact text format `a/b`, `a/b+c/d*i`, optionally followed
    /// by `*pi^k` (parenthesise a two-part body: `(1+i)*pi^2`).
    fn from_str(input: &str) -> Result<Scalar> {
        let s = input;
        let err = |r: &str| Error::Parse { input: input.into(), reason: r.into() };
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(err("empty or contains whitespace"));
        }
        let (body, pi) = match s.rsplit_once("*pi^") {
            Some((b, k)) => {
                let k: i32 = k.parse().map_err(|_| err("bad pi exponent"))?;
                (b, k)
            }
            None if s.ends_with("pi") => return Err(err("write pi powers as *pi^k")),
            None => (s, 0),
        };
        let body = match body.strip_prefix('(') {
            Some(b) => b.strip_suffix(')').ok_or_else(|| err("unbalanced parenthesis"))?,
            None => body,
        };
        let (re, im) = parse_body(body, input)?;
        Ok(Scalar::exact(re, im, pi))
    }
}

/// Numeric field abstraction shared by `Scalar` and nested duals.
pub trait Field:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_scalar(s: Scalar) -> Self;
    /// The underlying value with all derivative parts dropped.
    fn primal(&self) -> Scalar;
    /// Complex conjugation of every component.
    fn conj(&self) -> Self;
    /// True when value and all derivative parts vanish.
    fn is_zero(&self) -> bool;
    /// Multiplication by a plain scalar.
    fn scale(&self, s: &Scalar) -> Self;
    /// Principal square root; exact only for perfect squares.
    fn sqrt(&self) -> Result<Self>;

    fn zero() -> Self {
        Self::from_scalar(Scalar::zero())
    }
    fn one() -> Self {
        Self::from_scalar(Scalar::one())
    }
    fn from_i64(n: i64) -> Self {
        Self::from_scalar(Scalar::int(n))
    }
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_scalar(Scalar::ratio(n, d))
    }
    fn i() -> Self {
        Self::from_scalar(Scalar::i())
    }
    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Field for Scalar {
    fn from_scalar(s: Scalar) -> Self {
        s
    }
    fn primal(&self) -> Scalar {
        self.clone()
    }
    fn conj(&self) -> Self {
        Scalar::conj(self)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
    fn sqrt(&self) -> Result<Self> {
        Scalar::sqrt(self)
    }
    fn powi(&self, n: u32) -> Self {
        Scalar::powi(self, n as i32)
    }
}

/// Sum of a sequence of field values.
pub fn sum<T: Field>(it: impl IntoIterator<Item = T>) -> T {
    it.into_iter().fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(scalar_arith(&s("1/2"), &s("1/3"), ArithOp::Add).unwrap(), s("5/6"));
        let half_pi = s("1/2*pi^1");
        assert_eq!(scalar_arith(&half_pi, &half_pi, ArithOp::Add).unwrap(), Scalar::pi_pow(1));
        assert_eq!(scalar_arith(&s("1+i"), &s("1-i"), ArithOp::Mul).unwrap(), Scalar::int(2));
    }

    #[test]
    fn checked_errors() {
        assert_eq!(
            scalar_arith(&Scalar::pi_pow(1), &Scalar::one(), ArithOp::Add),
            Err(Error::MixedPiExponent { left: 1, right: 0 })
        );
        assert_eq!(scalar_arith(&Scalar::one(), &Scalar::zero(), ArithOp::Div), Err(Error::DivisionByZero));
        assert_eq!(scalar_arith(&Scalar::one(), &Scalar::real_float(1.0), ArithOp::Mul), Err(Error::MixedBackend));
    }

    #[test]
    fn zero_absorbs_pi() {
        let z = Scalar::pi_pow(3) - Scalar::pi_pow(3);
        assert_eq!(z, Scalar::zero());
        assert_eq!(z + Scalar::one(), Scalar::one());
    }

    #[test]
    fn pi_exponents_add_and_subtract() {
        let a = Scalar::pi_pow(2) * Scalar::ratio(1, 2);
        let b = Scalar::pi_pow(-6);
        assert_eq!(&a * &b, s("1/2*pi^-4"));
        assert_eq!(&a / &b, s("1/2*pi^8"));
    }

    #[test]
    fn render_and_parse_round_trip() {
        for text in ["0", "-3", "5/6", "1/2+3/4*i", "-1/2-3*i", "7*i", "1/2*pi^-2", "(1-2*i)*pi^3", "-i*pi^1"] {
            let v = s(text);
            assert_eq!(s(&v.to_string()), v, "{text}");
        }
        assert_eq!(s("i"), Scalar::i());
        assert_eq!(s("4/8"), Scalar::ratio(1, 2));
        assert_eq!(Scalar::ratio(1, 2) * Scalar::pi_pow(-2), s("1/2*pi^-2"));
        assert_eq!((Scalar::ratio(1, 2) * Scalar::pi_pow(-2)).to_string(), "1/2*pi^-2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "1/0", "a", "1/2 ", "1+2+3*i", "1*pi", "3/-", "1//2", "2*i+3*i", "(1+i*pi^2"] {
            assert!(bad.parse::<Scalar>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(s("9/4").sqrt().unwrap(), s("3/2"));
        assert_eq!(s("4*pi^2").sqrt().unwrap(), s("2*pi^1"));
        assert!(matches!(s("2").sqrt(), Err(Error::NotPerfectSquare(_))));
        assert!(s("-4").sqrt().is_err());
    }

    #[test]
    fn float_conversion() {
        let v = s("1/3-2/7*i") * Scalar::pi_pow(2);
        let z = v.to_complex();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((z.re - pi2 / 3.0).abs() < 1e-14 && (z.im + 2.0 * pi2 / 7.0).abs() < 1e-14);
    }
}

/// Serialized as the canonical display string.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parsed from the display string grammar.
impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
