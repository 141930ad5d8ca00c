//! Pauli-matrix conventions, Minkowski vectors, Weyl spinors and the matrix
//! identities they satisfy.
//!
//! Signature is diag(-,+,+,+). Index placement is fixed here once:
//! `sigma^0 = -sigma_0 = 1`, `tilde_sigma_0 = -tilde_sigma^0 = 1`, and all
//! spatial matrices are the ordinary Pauli matrices. In 3D the stored
//! components are (x^0, x^1, x^3) and only the real symmetric set
//! {1, sigma_1, sigma_3} appears.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sum, Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Dim {
    Three,
    Four,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::Three => 3,
            Dim::Four => 4,
        }
    }

    /// Pauli label (0..=3) of the stored component `k`.
    pub fn label(self, k: usize) -> usize {
        match self {
            Dim::Four => k,
            Dim::Three => [0, 1, 3][k],
        }
    }

    /// Stored position of Pauli label `mu`.
    pub fn position(self, mu: usize) -> Result<usize> {
        match (self, mu) {
            (Dim::Four, 0..=3) => Ok(mu),
            (Dim::Three, 0) => Ok(0),
            (Dim::Three, 1) => Ok(1),
            (Dim::Three, 3) => Ok(2),
            _ => Err(Error::BadIndex { index: mu, dim: self.n() }),
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;
    fn try_from(n: usize) -> Result<Dim> {
        match n {
            3 => Ok(Dim::Three),
            4 => Ok(Dim::Four),
            _ => Err(Error::WrongDimension { expected: 4, got: n }),
        }
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.n()
    }
}

/// eta_{kk} for stored component k (same in 3D and 4D).
pub fn metric(k: usize) -> i64 {
    if k == 0 {
        -1
    } else {
        1
    }
}

/// Contravariant Minkowski vector; `comps.len()` is the dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiPoint<T> {
    pub comps: Vec<T>,
}

impl<T: Field> MinkowskiPoint<T> {
    pub fn new(comps: Vec<T>) -> Result<Self> {
        Dim::try_from(comps.len())?;
        Ok(MinkowskiPoint { comps })
    }

    pub fn zero(dim: Dim) -> Self {
        MinkowskiPoint { comps: vec![T::zero(); dim.n()] }
    }

    /// Unit vector along stored component `k`.
    pub fn basis(dim: Dim, k: usize) -> Self {
        let mut p = Self::zero(dim);
        p.comps[k] = T::one();
        p
    }

    pub fn dim(&self) -> Dim {
        Dim::try_from(self.comps.len()).expect("validated dimension")
    }

    pub fn dot(&self, o: &Self) -> T {
        sum(self.comps.iter().zip(&o.comps).enumerate().map(|(k, (a, b))| {
            let p = a.clone() * b.clone();
            if k == 0 {
                -p
            } else {
                p
            }
        }))
    }

    /// x^2 = |x|^2 - (x^0)^2.
    pub fn square(&self) -> T {
        self.dot(self)
    }

    /// Covariant components x_mu.
    pub fn lower(&self) -> Vec<T> {
        self.comps.iter().enumerate().map(|(k, c)| if k == 0 { -c.clone() } else { c.clone() }).collect()
    }

    /// Contraction with covariant components: x^mu v_mu.
    pub fn contract(&self, v: &[T]) -> T {
        sum(self.comps.iter().zip(v).map(|(a, b)| a.clone() * b.clone()))
    }

    pub fn scale(&self, s: &T) -> Self {
        MinkowskiPoint { comps: self.comps.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    /// The unit-inverted vector x / x^2.
    pub fn check(&self) -> Self {
        let inv = T::one() / self.square();
        self.scale(&inv)
    }

    pub fn conj(&self) -> Self {
        MinkowskiPoint { comps: self.comps.iter().map(Field::conj).collect() }
    }

    /// Lightcone pair (x^+, x^-) = (x^0 + x^3, x^0 - x^3).
    pub fn lightcone(&self) -> (T, T) {
        let x3 = self.comps[self.comps.len() - 1].clone();
        (self.comps[0].clone() + x3.clone(), self.comps[0].clone() - x3)
    }

    pub fn lift<U: Field>(&self, f: impl Fn(&T) -> U) -> MinkowskiPoint<U> {
        MinkowskiPoint { comps: self.comps.iter().map(f).collect() }
    }
}

impl<T: Field> Add for &MinkowskiPoint<T> {
    type Output = MinkowskiPoint<T>;
    fn add(self, o: Self) -> MinkowskiPoint<T> {
        MinkowskiPoint { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.clone() + b.clone()).collect() }
    }
}

impl<T: Field> Sub for &MinkowskiPoint<T> {
    type Output = MinkowskiPoint<T>;
    fn sub(self, o: Self) -> MinkowskiPoint<T> {
        MinkowskiPoint { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.clone() - b.clone()).collect() }
    }
}

impl<T: Field> Neg for &MinkowskiPoint<T> {
    type Output = MinkowskiPoint<T>;
    fn neg(self) -> MinkowskiPoint<T> {
        MinkowskiPoint { comps: self.comps.iter().map(|a| -a.clone()).collect() }
    }
}

impl<T: Field> AsRef<[T]> for MinkowskiPoint<T> {
    fn as_ref(&self) -> &[T] {
        &self.comps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Undotted,
    Dotted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylSpinor<T> {
    pub c: [T; 2],
    pub chirality: Chirality,
    /// Set in 3D mode, where both components must be real.
    pub real: bool,
}

impl<T: Field> WeylSpinor<T> {
    pub fn new(c: [T; 2], chirality: Chirality, real: bool) -> Result<Self> {
        if real && !c.iter().all(|x| x.primal().is_real()) {
            return Err(Error::Invalid("3D spinors must be real".into()));
        }
        Ok(WeylSpinor { c, chirality, real })
    }

    pub fn undotted(c: [T; 2]) -> Self {
        WeylSpinor { c, chirality: Chirality::Undotted, real: false }
    }

    pub fn dotted(c: [T; 2]) -> Self {
        WeylSpinor { c, chirality: Chirality::Dotted, real: false }
    }

    pub fn scale(&self, s: &T) -> Self {
        WeylSpinor { c: [self.c[0].clone() * s.clone(), self.c[1].clone() * s.clone()], ..self.clone() }
    }

    pub fn conj(&self) -> Self {
        let chirality = match self.chirality {
            Chirality::Undotted => Chirality::Dotted,
            Chirality::Dotted => Chirality::Undotted,
        };
        WeylSpinor { c: [self.c[0].conj(), self.c[1].conj()], chirality, real: self.real }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Field::is_zero)
    }
}

/// 2x2 matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Field> Matrix2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Matrix2 { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    /// epsilon = [[0, 1], [-1, 0]] (epsilon^{12} = epsilon_{12} = 1).
    pub fn epsilon() -> Self {
        Self::new(T::zero(), T::one(), -T::one(), T::zero())
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.m[r][c]
    }

    pub fn trace(&self) -> T {
        self.m[0][0].clone() + self.m[1][1].clone()
    }

    pub fn det(&self) -> T {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0].clone(), self.m[1][0].clone(), self.m[0][1].clone(), self.m[1][1].clone())
    }

    pub fn conj(&self) -> Self {
        self.map(Field::conj)
    }

    pub fn dagger(&self) -> Self {
        self.transpose().conj()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix2<U> {
        Matrix2 { m: [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]] }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.primal().is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = T::one() / d;
        Ok(Self::new(
            self.m[1][1].clone() * inv.clone(),
            -self.m[0][1].clone() * inv.clone(),
            -self.m[1][0].clone() * inv.clone(),
            self.m[0][0].clone() * inv,
        ))
    }

    /// Row vector times matrix: (u M)_B = u_A M^A_B.
    pub fn left(&self, u: &[T; 2]) -> [T; 2] {
        [
            u[0].clone() * self.m[0][0].clone() + u[1].clone() * self.m[1][0].clone(),
            u[0].clone() * self.m[0][1].clone() + u[1].clone() * self.m[1][1].clone(),
        ]
    }

    /// Matrix times column vector.
    pub fn right(&self, v: &[T; 2]) -> [T; 2] {
        [
            self.m[0][0].clone() * v[0].clone() + self.m[0][1].clone() * v[1].clone(),
            self.m[1][0].clone() * v[0].clone() + self.m[1][1].clone() * v[1].clone(),
        ]
    }

    /// u M v.
    pub fn sandwich(&self, u: &[T; 2], v: &[T; 2]) -> T {
        let r = self.right(v);
        u[0].clone() * r[0].clone() + u[1].clone() * r[1].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Field::is_zero)
    }
}

impl<T: Field> Add for &Matrix2<T> {
    type Output = Matrix2<T>;
    fn add(self, o: Self) -> Matrix2<T> {
        let e = |r: usize, c: usize| self.m[r][c].clone() + o.m[r][c].clone();
        Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl<T: Field> Sub for &Matrix2<T> {
    type Output = Matrix2<T>;
    fn sub(self, o: Self) -> Matrix2<T> {
        let e = |r: usize, c: usize| self.m[r][c].clone() - o.m[r][c].clone();
        Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl<T: Field> Mul for &Matrix2<T> {
    type Output = Matrix2<T>;
    fn mul(self, o: Self) -> Matrix2<T> {
        let e =
            |r: usize, c: usize| self.m[r][0].clone() * o.m[0][c].clone() + self.m[r][1].clone() * o.m[1][c].clone();
        Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

pub fn dot2<T: Field>(u: &[T; 2], v: &[T; 2]) -> T {
    u[0].clone() * v[0].clone() + u[1].clone() * v[1].clone()
}

/// u epsilon v = u_1 v_2 - u_2 v_1.
pub fn eps_pair<T: Field>(u: &[T; 2], v: &[T; 2]) -> T {
    u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// sigma^mu (natural position upper).
    Plain,
    /// tilde_sigma_mu (natural position lower).
    Tilde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Upper,
    Lower,
}

/// The bare matrix shared by all four placements: 1 for label 0, else the
/// Pauli matrix sigma_label.
fn bare<T: Field>(label: usize) -> Matrix2<T> {
    let (o, z, i) = (T::one(), T::zero(), T::i());
    match label {
        0 => Matrix2::identity(),
        1 => Matrix2::new(z.clone(), o.clone(), o, z),
        2 => Matrix2::new(z.clone(), -i.clone(), i, z),
        _ => Matrix2::new(o.clone(), z.clone(), z, -o),
    }
}

/// sigma^mu for `Plain`, tilde_sigma_mu for `Tilde`, in their natural
/// index positions. In 3D `mu` is restricted to {0, 1, 3}.
pub fn pauli<T: Field>(mu: usize, variant: Variant, dim: Dim) -> Result<Matrix2<T>> {
    let pos = match variant {
        Variant::Plain => Position::Upper,
        Variant::Tilde => Position::Lower,
    };
    pauli_at(mu, variant, pos, dim)
}

/// Any index placement; moving an index off its natural position flips the
/// sign of the mu = 0 matrix.
pub fn pauli_at<T: Field>(mu: usize, variant: Variant, pos: Position, dim: Dim) -> Result<Matrix2<T>> {
    dim.position(mu)?;
    let natural = matches!((variant, pos), (Variant::Plain, Position::Upper) | (Variant::Tilde, Position::Lower));
    let m = bare::<T>(mu);
    Ok(if natural || mu != 0 { m } else { m.scale(&-T::one()) })
}

/// 3D lightcone matrices sigma_+- = (1 +- sigma_3) / 2.
pub fn pauli_lightcone<T: Field>(plus: bool) -> Matrix2<T> {
    if plus {
        Matrix2::new(T::one(), T::zero(), T::zero(), T::zero())
    } else {
        Matrix2::new(T::zero(), T::zero(), T::zero(), T::one())
    }
}

/// Matrices indexed by stored component, at the requested placement.
pub fn pauli_basis<T: Field>(variant: Variant, pos: Position, dim: Dim) -> Vec<Matrix2<T>> {
    (0..dim.n()).map(|k| pauli_at(dim.label(k), variant, pos, dim).expect("valid label")).collect()
}

/// `Tilde`: x~ = x^mu tilde_sigma_mu. `Plain`: x^mu sigma_mu = x_mu sigma^mu.
pub fn slash<T: Field>(x: &MinkowskiPoint<T>, variant: Variant) -> Matrix2<T> {
    let c = &x.comps;
    let (x0, x1, x3) = (c[0].clone(), c[1].clone(), c[c.len() - 1].clone());
    let x0 = match variant {
        Variant::Tilde => x0,
        Variant::Plain => -x0,
    };
    match x.dim() {
        Dim::Three => Matrix2::new(x0.clone() + x3.clone(), x1.clone(), x1, x0 - x3),
        Dim::Four => {
            let ix2 = T::i() * c[2].clone();
            Matrix2::new(x0.clone() + x3.clone(), x1.clone() - ix2.clone(), x1 + ix2, x0 - x3)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dotting {
    Undotted,
    Dotted,
}

/// Lorentz generators with lower indices:
/// sigma_{mu nu} = (tilde_sigma_mu sigma_nu - tilde_sigma_nu sigma_mu) / 2,
/// tilde_sigma_{mu nu} = (sigma_mu tilde_sigma_nu - sigma_nu tilde_sigma_mu) / 2.
pub fn sigma_mn<T: Field>(mu: usize, nu: usize, dotting: Dotting) -> Result<Matrix2<T>> {
    let d = Dim::Four;
    let t = |k| pauli_at::<T>(k, Variant::Tilde, Position::Lower, d);
    let p = |k| pauli_at::<T>(k, Variant::Plain, Position::Lower, d);
    let (a, b) = match dotting {
        Dotting::Undotted => (&t(mu)? * &p(nu)?, &t(nu)? * &p(mu)?),
        Dotting::Dotted => (&p(mu)? * &t(nu)?, &p(nu)? * &t(mu)?),
    };
    Ok((&a - &b).scale(&T::ratio(1, 2)))
}

/// sigma^{mu nu} with both indices raised.
pub fn sigma_mn_upper<T: Field>(mu: usize, nu: usize, dotting: Dotting) -> Result<Matrix2<T>> {
    let s = T::from_i64(metric(mu) * metric(nu));
    Ok(sigma_mn::<T>(mu, nu, dotting)?.scale(&s))
}

/// Permutation sign of (a, b, c, d) over {0, 1, 2, 3}; zero on repeats.
pub fn perm_sign4(p: [usize; 4]) -> i64 {
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0;
            }
        }
    }
    let mut s = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// epsilon^{abcd} under the adopted orientation epsilon^{0123} = 1.
pub fn eps_upper(p: [usize; 4]) -> i64 {
    perm_sign4(p)
}

/// epsilon_{abcd} = -epsilon^{abcd}.
pub fn eps_lower(p: [usize; 4]) -> i64 {
    -perm_sign4(p)
}

const PERMS4: [[usize; 4]; 24] = {
    let mut out = [[0usize; 4]; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c && a + b + c >= 3 {
                    out[n] = [a, b, c, 6 - a - b - c];
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

/// epsilon^{abcd} a_a b_b c_c d_d on the given (covariant) components; equals
/// the determinant of the matrix with rows a, b, c, d.
pub fn levi_civita<T: Field, V: AsRef<[T]>>(a: V, b: V, c: V, d: V) -> Result<T> {
    let (a, b, c, d) = (a.as_ref(), b.as_ref(), c.as_ref(), d.as_ref());
    for v in [a, b, c, d] {
        if v.len() != 4 {
            return Err(Error::WrongDimension { expected: 4, got: v.len() });
        }
    }
    Ok(sum(PERMS4.iter().map(|p| {
        let t = a[p[0]].clone() * b[p[1]].clone() * c[p[2]].clone() * d[p[3]].clone();
        if eps_upper(*p) > 0 {
            t
        } else {
            -t
        }
    })))
}

/// Hodge dual (*M)_{mu nu} = (1/2) eps_{mu nu ka la} M^{ka la} of a
/// matrix-valued 2-form given with lower indices. `orientation` is the value
/// of eps^{0123}.
pub fn hodge_star<T: Field>(
    m: impl Fn(usize, usize) -> Matrix2<T>,
    mu: usize,
    nu: usize,
    orientation: i64,
) -> Matrix2<T> {
    let mut acc = Matrix2::zero();
    for k in 0..4 {
        for l in 0..4 {
            let e = -orientation * perm_sign4([mu, nu, k, l]);
            if e == 0 {
                continue;
            }
            let c = T::ratio(e * metric(k) * metric(l), 2);
            acc = &acc + &m(k, l).scale(&c);
        }
    }
    acc
}

/// Residuals of the trace formula: returns
/// (1/2) tr(a~b c~d) - [ab cd - ac bd + ad bc + i eps(a, b, c, d)], where
/// a = a_mu sigma^mu and b~ = b^mu tilde_sigma_mu.
pub fn trace4_residual<T: Field>(
    a: &MinkowskiPoint<T>,
    b: &MinkowskiPoint<T>,
    c: &MinkowskiPoint<T>,
    d: &MinkowskiPoint<T>,
) -> Result<T> {
    let lhs = trace4_lhs(a, b, c, d)?;
    Ok(lhs - trace4_expansion(a, b, c, d)?)
}

fn trace4_lhs<T: Field>(
    a: &MinkowskiPoint<T>,
    b: &MinkowskiPoint<T>,
    c: &MinkowskiPoint<T>,
    d: &MinkowskiPoint<T>,
) -> Result<T> {
    for v in [a, b, c, d] {
        if v.dim() != Dim::Four {
            return Err(Error::WrongDimension { expected: 4, got: v.comps.len() });
        }
    }
    let prod = &(&(&slash(a, Variant::Plain) * &slash(b, Variant::Tilde)) * &slash(c, Variant::Plain))
        * &slash(d, Variant::Tilde);
    Ok(prod.trace() * T::ratio(1, 2))
}

/// ab cd - ac bd + ad bc + i eps^{klmn} a_k b_l c_m d_n.
pub fn trace4_expansion<T: Field>(
    a: &MinkowskiPoint<T>,
    b: &MinkowskiPoint<T>,
    c: &MinkowskiPoint<T>,
    d: &MinkowskiPoint<T>,
) -> Result<T> {
    let eps = levi_civita(a.lower(), b.lower(), c.lower(), d.lower())?;
    Ok(a.dot(b) * c.dot(d) - a.dot(c) * b.dot(d) + a.dot(d) * b.dot(c) + T::i() * eps)
}

/// (1/2) tr(a~b c~d); fails if it disagrees with its expansion.
pub fn trace4<T: Field>(
    a: &MinkowskiPoint<T>,
    b: &MinkowskiPoint<T>,
    c: &MinkowskiPoint<T>,
    d: &MinkowskiPoint<T>,
) -> Result<T> {
    let lhs = trace4_lhs(a, b, c, d)?;
    let rhs = trace4_expansion(a, b, c, d)?;
    if !lhs.primal().approx_eq(&rhs.primal(), crate::scalar::FLOAT_REL_TOL) {
        return Err(Error::Inconsistent(format!("trace formula: {} vs {}", lhs.primal(), rhs.primal())));
    }
    Ok(lhs)
}

/// Real antisymmetric F_{mu nu} (lower indices).
#[derive(Clone, Debug, PartialEq)]
pub struct SkewTensor4 {
    f: [[Scalar; 4]; 4],
}

impl SkewTensor4 {
    pub fn new(f: [[Scalar; 4]; 4]) -> Result<Self> {
        for (m, row) in f.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                if !v.approx_eq(&-&f[n][m], crate::scalar::FLOAT_REL_TOL) || !v.is_real() {
                    return Err(Error::NotAntisymmetric);
                }
            }
        }
        Ok(SkewTensor4 { f })
    }

    /// Antisymmetric tensor from its six upper-triangle entries
    /// (01, 02, 03, 12, 13, 23).
    pub fn from_upper(v: [Scalar; 6]) -> Self {
        let mut f: [[Scalar; 4]; 4] = Default::default();
        let mut k = 0;
        for m in 0..4 {
            for n in m + 1..4 {
                f[m][n] = v[k].clone();
                f[n][m] = -v[k].clone();
                k += 1;
            }
        }
        SkewTensor4 { f }
    }

    pub fn get(&self, mu: usize, nu: usize) -> &Scalar {
        &self.f[mu][nu]
    }
}

/// Split F into its (1,0) and (0,1) parts:
/// F^A_B = -(1/8) F_{mu nu} (sigma^{mu nu})^A_B and the dotted analogue with
/// tilde_sigma^{mu nu}; `skew_reconstruct` inverts this exactly.
pub fn skew_decompose(f: &SkewTensor4) -> (Matrix2<Scalar>, Matrix2<Scalar>) {
    let mut und = Matrix2::zero();
    let mut dot = Matrix2::zero();
    let c = Scalar::ratio(-1, 8);
    for m in 0..4 {
        for n in 0..4 {
            if m == n || f.f[m][n].is_zero() {
                continue;
            }
            let w = &f.f[m][n] * &c;
            und = &und + &sigma_mn_upper::<Scalar>(m, n, Dotting::Undotted).unwrap().scale(&w);
            dot = &dot + &sigma_mn_upper::<Scalar>(m, n, Dotting::Dotted).unwrap().scale(&w);
        }
    }
    (und, dot)
}

/// F_{mu nu} = tr(F_und sigma_{mu nu}) + tr(F_dot tilde_sigma_{mu nu}).
pub fn skew_reconstruct(und: &Matrix2<Scalar>, dot: &Matrix2<Scalar>) -> [[Scalar; 4]; 4] {
    let mut f: [[Scalar; 4]; 4] = Default::default();
    for (m, row) in f.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            let a = (und * &sigma_mn::<Scalar>(m, n, Dotting::Undotted).unwrap()).trace();
            let b = (dot * &sigma_mn::<Scalar>(m, n, Dotting::Dotted).unwrap()).trace();
            *v = a + b;
        }
    }
    f
}

/// 3D Clifford generators gamma_mu = sigma_mu epsilon (mu in {0, 1, 3}),
/// with sigma_mu the real symmetric set {1, sigma_1, sigma_3}.
pub fn gamma3<T: Field>(mu: usize, pos: Position) -> Result<Matrix2<T>> {
    let k = Dim::Three.position(mu)?;
    let g = &pauli::<T>(mu, Variant::Tilde, Dim::Three)? * &Matrix2::epsilon();
    Ok(match pos {
        Position::Lower => g,
        Position::Upper => g.scale(&T::from_i64(metric(k))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Matrix2<Scalar>;

    fn pt(v: &[i64]) -> MinkowskiPoint<Scalar> {
        MinkowskiPoint::new(v.iter().map(|&x| Scalar::int(x)).collect()).unwrap()
    }

    #[test]
    fn sigma3_plain() {
        let s: M = pauli(3, Variant::Plain, Dim::Four).unwrap();
        assert_eq!(s, M::new(Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::int(-1)));
        assert!(pauli::<Scalar>(2, Variant::Plain, Dim::Three).is_err());
        assert!(pauli::<Scalar>(4, Variant::Tilde, Dim::Four).is_err());
    }

    #[test]
    fn slash_examples() {
        assert_eq!(slash(&pt(&[0, 1, 0, 0]), Variant::Tilde), pauli(1, Variant::Tilde, Dim::Four).unwrap());
        assert_eq!(slash(&pt(&[1, 0, 0, 0]), Variant::Tilde), M::identity());
        let x = pt(&[2, 1, 0, 0]);
        assert_eq!(x.square(), Scalar::int(-3));
        assert_eq!(slash(&x, Variant::Tilde).det(), Scalar::int(3));
    }

    #[test]
    fn lightcone_matrices_split_sigma3() {
        let p: M = pauli_lightcone(true);
        let m: M = pauli_lightcone(false);
        assert_eq!(&p + &m, M::identity());
        assert_eq!(&p - &m, pauli(3, Variant::Plain, Dim::Three).unwrap());
    }

    #[test]
    fn sigma12_is_i_sigma3() {
        let s: M = sigma_mn(1, 2, Dotting::Undotted).unwrap();
        let s3: M = pauli(3, Variant::Plain, Dim::Four).unwrap();
        assert_eq!(s, s3.scale(&Scalar::i()));
        assert_eq!(sigma_mn::<Scalar>(0, 3, Dotting::Undotted).unwrap(), s3);
        assert!(sigma_mn::<Scalar>(2, 2, Dotting::Undotted).unwrap().is_zero());
    }

    #[test]
    fn dotted_generators_are_minus_adjoint() {
        for m in 0..4 {
            for n in 0..4 {
                let s: M = sigma_mn(m, n, Dotting::Undotted).unwrap();
                let t: M = sigma_mn(m, n, Dotting::Dotted).unwrap();
                assert_eq!(t, s.dagger().scale(&Scalar::int(-1)));
            }
        }
    }

    #[test]
    fn levi_civita_basis_and_repeats() {
        let e = |k| MinkowskiPoint::<Scalar>::basis(Dim::Four, k);
        assert_eq!(levi_civita(e(0), e(1), e(2), e(3)).unwrap(), Scalar::one());
        assert_eq!(levi_civita(e(1), e(0), e(2), e(3)).unwrap(), Scalar::int(-1));
        assert_eq!(levi_civita(e(1), e(1), e(2), e(3)).unwrap(), Scalar::zero());
    }

    #[test]
    fn trace4_unit_spatial() {
        let (e1, e2) = (pt(&[0, 1, 0, 0]), pt(&[0, 0, 1, 0]));
        assert_eq!(trace4(&e1, &e2, &e1, &e2).unwrap(), Scalar::int(-1));
        let z = pt(&[0, 0, 0, 0]);
        assert_eq!(trace4(&z, &z, &z, &z).unwrap(), Scalar::zero());
    }

    #[test]
    fn fab_zero() {
        let f = SkewTensor4::from_upper(Default::default());
        let (u, d) = skew_decompose(&f);
        assert!(u.is_zero() && d.is_zero());
    }

    #[test]
    fn not_antisymmetric() {
        let mut f: [[Scalar; 4]; 4] = Default::default();
        f[0][1] = Scalar::one();
        assert_eq!(SkewTensor4::new(f), Err(Error::NotAntisymmetric));
    }
}
