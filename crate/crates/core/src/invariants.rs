//! Conformal invariants P_ij, L^k_ij, R_ij, polarizations zeta, the self-dual
//! tensor omega, RL_i3, cross-ratios, and the polynomial identities among them.
//!
//! Slot indices are 0-based throughout: `p_inv(f, 0, 1)` is P_12.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::scalar::{sum, Field, Scalar};
use crate::spinor::{
    eps_pair, levi_civita, metric, pauli_basis, sigma_mn, slash, Dim, Dotting, Matrix2, MinkowskiPoint, Position,
    Variant,
};

/// Null vector zeta with covariant components.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization<T> {
    pub comps: Vec<T>,
    /// Slot(s) it was built from.
    pub slots: (usize, usize),
}

impl<T: Field> Polarization<T> {
    /// eta^{mu nu} a_mu b_nu.
    pub fn dot(&self, o: &Self) -> T {
        lower_dot(&self.comps, &o.comps)
    }

    /// zeta^mu.
    pub fn upper(&self) -> MinkowskiPoint<T> {
        MinkowskiPoint { comps: raise(&self.comps) }
    }

    /// zeta_mu v^mu.
    pub fn on(&self, v: &MinkowskiPoint<T>) -> T {
        v.contract(&self.comps)
    }
}

pub(crate) fn lower_dot<T: Field>(a: &[T], b: &[T]) -> T {
    sum(a.iter().zip(b).enumerate().map(|(k, (x, y))| {
        let p = x.clone() * y.clone();
        if metric(k) < 0 {
            -p
        } else {
            p
        }
    }))
}

pub(crate) fn raise<T: Field>(v: &[T]) -> Vec<T> {
    v.iter().enumerate().map(|(k, c)| if k == 0 { -c.clone() } else { c.clone() }).collect()
}

fn distinct(i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(Error::SameSlot(i + 1));
    }
    Ok(())
}

fn in_range<T: Field>(f: &Frame<T>, idx: &[usize]) -> Result<()> {
    let need = idx.iter().max().map_or(0, |m| m + 1);
    if need > f.len() {
        return Err(Error::WrongArity { expected: need, got: f.len() });
    }
    Ok(())
}

/// P_ij = lambda_i x~_ij lambda_bar_j / x_ij^2.
pub fn p_inv<T: Field>(f: &Frame<T>, i: usize, j: usize) -> Result<T> {
    in_range(f, &[i, j])?;
    distinct(i, j)?;
    let r = f.rho2(i, j)?;
    let m = slash(&f.sep(i, j), Variant::Tilde);
    Ok(m.sandwich(f.lam(i), f.lam_bar(j)) / r)
}

fn zeta_of<T: Field>(dim: Dim, l: &[T; 2], lb: &[T; 2]) -> Vec<T> {
    pauli_basis::<T>(Variant::Tilde, Position::Lower, dim).iter().map(|s| s.sandwich(l, lb)).collect()
}

/// zeta_{i mu} = lambda_i tilde_sigma_mu lambda_bar_i.
pub fn zeta<T: Field>(f: &Frame<T>, i: usize) -> Result<Polarization<T>> {
    in_range(f, &[i])?;
    Ok(Polarization { comps: zeta_of(f.dim(), f.lam(i), f.lam_bar(i)), slots: (i, i) })
}

/// zeta_{ij mu} = lambda_i tilde_sigma_mu lambda_bar_j.
pub fn zeta_mixed<T: Field>(f: &Frame<T>, i: usize, j: usize) -> Result<Polarization<T>> {
    in_range(f, &[i, j])?;
    Ok(Polarization { comps: zeta_of(f.dim(), f.lam(i), f.lam_bar(j)), slots: (i, j) })
}

/// L^k_ij = zeta_k . (x_check_ki - x_check_kj).
pub fn l_inv<T: Field>(f: &Frame<T>, k: usize, i: usize, j: usize) -> Result<T> {
    in_range(f, &[k, i, j])?;
    distinct(k, i)?;
    distinct(k, j)?;
    distinct(i, j)?;
    let d = &f.check_sep(k, i)? - &f.check_sep(k, j)?;
    Ok(zeta(f, k)?.on(&d))
}

/// The three cyclic L's of a 3-slot frame: (L^1_23, L^2_31, L^3_12).
pub fn l_triple<T: Field>(f: &Frame<T>) -> Result<[T; 3]> {
    Ok([l_inv(f, 0, 1, 2)?, l_inv(f, 1, 2, 0)?, l_inv(f, 2, 0, 1)?])
}

/// R_ij = (zeta_i zeta_j) x_check^2 - 2 (x_check zeta_i)(x_check zeta_j).
pub fn r_inv<T: Field>(f: &Frame<T>, i: usize, j: usize) -> Result<T> {
    in_range(f, &[i, j])?;
    distinct(i, j)?;
    let xc = f.check_sep(i, j)?;
    let (zi, zj) = (zeta(f, i)?, zeta(f, j)?);
    Ok(zi.dot(&zj) * xc.square() - T::from_i64(2) * zi.on(&xc) * zj.on(&xc))
}

/// Triple products (P12 P23 P31, P13 P32 P21) of slots 0, 1, 2.
pub fn triple<T: Field>(f: &Frame<T>) -> Result<(T, T)> {
    let p = |i, j| p_inv(f, i, j);
    let a = p(0, 1)? * p(1, 2)? * p(2, 0)?;
    let b = p(0, 2)? * p(2, 1)? * p(1, 0)?;
    Ok((a, b))
}

/// R12 L3 + R23 L1 + R13 L2.
pub fn s_combo<T: Field>(f: &Frame<T>) -> Result<T> {
    let [l1, l2, l3] = l_triple(f)?;
    Ok(r_inv(f, 0, 1)? * l3 + r_inv(f, 1, 2)? * l1 + r_inv(f, 0, 2)? * l2)
}

/// Self-dual tensor components in the lightcone basis:
/// omega_+ = (omega_13 + omega_10)/2, omega_- = (omega_13 - omega_10)/2,
/// omega_0 = omega_03 / 2.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaTensor<T> {
    pub plus: T,
    pub minus: T,
    pub zero: T,
}

impl<T: Field> OmegaTensor<T> {
    /// 2 (omega_+ omega_- - omega_0^2).
    pub fn isotropy(&self) -> T {
        T::from_i64(2) * (self.plus.clone() * self.minus.clone() - self.zero.clone() * self.zero.clone())
    }

    /// omega_+ omega'_- + omega_- omega'_+ - 2 omega_0 omega'_0.
    pub fn inner(&self, o: &Self) -> T {
        self.plus.clone() * o.minus.clone() + self.minus.clone() * o.plus.clone()
            - T::from_i64(2) * self.zero.clone() * o.zero.clone()
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.plus.clone(), self.minus.clone(), self.zero.clone()]
    }
}

/// omega(l, m)_{mu nu} = l sigma_{mu nu} epsilon m (lower indices).
pub fn omega_matrix<T: Field>(l: &[T; 2], m: &[T; 2]) -> [[T; 4]; 4] {
    let eps = Matrix2::<T>::epsilon();
    let mut w: [[T; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
    for mu in 0..4 {
        for nu in mu + 1..4 {
            let s = &sigma_mn::<T>(mu, nu, Dotting::Undotted).expect("valid indices") * &eps;
            let v = s.sandwich(l, m);
            w[nu][mu] = -v.clone();
            w[mu][nu] = v;
        }
    }
    w
}

fn basis_components<T: Field>(w: &[[T; 4]; 4]) -> OmegaTensor<T> {
    let h = T::ratio(1, 2);
    OmegaTensor {
        plus: (w[1][3].clone() + w[1][0].clone()) * h.clone(),
        minus: (w[1][3].clone() - w[1][0].clone()) * h.clone(),
        zero: w[0][3].clone() * h,
    }
}

/// omega(i) = omega(lambda_i, lambda_i).
pub fn omega<T: Field>(f: &Frame<T>, i: usize) -> Result<OmegaTensor<T>> {
    f.require_dim(Dim::Four)?;
    in_range(f, &[i])?;
    Ok(basis_components(&omega_matrix(f.lam(i), f.lam(i))))
}

/// Polarized symmetric form omega(lambda_i, lambda_j).
pub fn omega_bilinear<T: Field>(f: &Frame<T>, i: usize, j: usize) -> Result<OmegaTensor<T>> {
    f.require_dim(Dim::Four)?;
    in_range(f, &[i, j])?;
    Ok(basis_components(&omega_matrix(f.lam(i), f.lam(j))))
}

/// RL_i3 = (1/2) R^mu_i3 omega(3)_{mu nu} L_3^nu for `i` in {0, 1}, with the
/// third slot (index 2) carrying omega.
pub fn rl_inv<T: Field>(f: &Frame<T>, i: usize) -> Result<T> {
    f.require_dim(Dim::Four)?;
    in_range(f, &[2])?;
    if i > 1 {
        return Err(Error::BadIndex { index: i, dim: 2 });
    }
    let xc = f.check_sep(i, 2)?;
    let zi = zeta(f, i)?;
    let zu = zi.upper();
    let r = &zu.scale(&xc.square()) - &xc.scale(&(T::from_i64(2) * zi.on(&xc)));
    let l = &f.check_sep(1, 2)? - &f.check_sep(0, 2)?;
    let w = omega_matrix(f.lam(2), f.lam(2));
    let mut acc = T::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                acc = acc + r.comps[mu].clone() * w[mu][nu].clone() * l.comps[nu].clone();
            }
        }
    }
    Ok(acc * T::ratio(1, 2))
}

/// Cross-ratios s = x12^2 x34^2 / (x13^2 x24^2), t = x14^2 x23^2 / (x13^2 x24^2).
pub fn cross_ratios<T: Field>(f: &Frame<T>) -> Result<(T, T)> {
    f.require_arity(4)?;
    let r = |i, j| f.rho2(i, j);
    let den = r(0, 2)? * r(1, 3)?;
    let s = r(0, 1)? * r(2, 3)? / den.clone();
    let t = r(0, 3)? * r(1, 2)? / den;
    Ok((s, t))
}

/// Identities checked by `check_identity`; matrix identities are contracted
/// with the frame's points and spinors so every check is frame-driven.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    /// 2(P12P23P31 - P21P32P13) = R12L3 + R23L1 + R13L2 + 2L1L2L3.
    Ppp,
    /// Levi-Civita expression = 6i(P12P23P31 + P13P32P21).
    Podd,
    /// Four-point box relation with coefficient 8.
    Box4,
    /// L^4_12 + L^4_23 - L^4_13 = 0.
    Lrel,
    /// P_ij + conj(P_ji) = 0.
    Pconj,
    /// R_ij - 2 P_ij P_ji = 0.
    Rpp,
    /// zeta_{i mu} sigma^mu = 2 lambda_bar_i lambda_i.
    PprOuter,
    /// zeta_12 zeta_21 = -zeta_1 zeta_2 and zeta_12 zeta_i = 0.
    PprMixed,
    /// zeta_i^2 = 0.
    ZetaNull,
    /// omega(1) eta omega(2) = -2 (l1 eps l2) (omega(l1, l2) + (l1 eps l2) eta).
    O1o2,
    /// 2(omega_+ omega_- - omega_0^2) = 0.
    Null,
    /// (1/8) omega^{mu nu}(1) omega_{mu nu}(2) = inner(omega(1), omega(2)) = (l11 l22 - l12 l21)^2.
    Inprod,
    /// Spinor-induced inversion law of omega, and isotropy of its image.
    Iomeg,
    /// 3D: P12P23P31 + P13P32P21 = 0.
    Cyclic3d,
    /// 3D: zeta_12^2 = (l1 eps l2)^2 = -zeta_1 zeta_2 / 2, zeta_i^2 = 0 = zeta_12 zeta_i.
    Zeta3d,
    /// 3D: all P_ij and L_k are real.
    Real3d,
    /// (1/2)tr(a b~ c d~) expansion on the frame's four points.
    Tr4,
    /// Exchange relations contracted with two points.
    Exch,
    /// Self-duality of sigma_{mu nu}, anti-self-duality of tilde_sigma_{mu nu}.
    Star,
    /// 3D Clifford relation for gamma_mu = sigma_mu eps.
    Gam,
    /// 3D gamma completeness relation contracted with four spinors.
    Gog,
    /// Skew-tensor decomposition round trip, tracelessness and symmetry.
    Fab,
}

impl IdentityId {
    pub const ALL: [IdentityId; 22] = [
        IdentityId::Ppp,
        IdentityId::Podd,
        IdentityId::Box4,
        IdentityId::Lrel,
        IdentityId::Pconj,
        IdentityId::Rpp,
        IdentityId::PprOuter,
        IdentityId::PprMixed,
        IdentityId::ZetaNull,
        IdentityId::O1o2,
        IdentityId::Null,
        IdentityId::Inprod,
        IdentityId::Iomeg,
        IdentityId::Cyclic3d,
        IdentityId::Zeta3d,
        IdentityId::Real3d,
        IdentityId::Tr4,
        IdentityId::Exch,
        IdentityId::Star,
        IdentityId::Gam,
        IdentityId::Gog,
        IdentityId::Fab,
    ];

    /// (required arity, required dimension or None for either).
    pub fn requirements(self) -> (usize, Option<Dim>) {
        use IdentityId::*;
        match self {
            Ppp => (3, None),
            Podd => (3, Some(Dim::Four)),
            Box4 => (4, Some(Dim::Four)),
            Lrel => (4, None),
            Pconj | Rpp => (2, None),
            PprMixed => (2, Some(Dim::Four)),
            PprOuter => (1, Some(Dim::Four)),
            ZetaNull => (1, None),
            O1o2 | Inprod => (2, Some(Dim::Four)),
            Null | Iomeg => (1, Some(Dim::Four)),
            Cyclic3d | Real3d => (3, Some(Dim::Three)),
            Zeta3d => (2, Some(Dim::Three)),
            Tr4 | Fab => (4, Some(Dim::Four)),
            Exch => (2, None),
            Star => (2, Some(Dim::Four)),
            Gam => (2, Some(Dim::Three)),
            Gog => (4, Some(Dim::Three)),
        }
    }

    pub fn name(self) -> &'static str {
        use IdentityId::*;
        match self {
            Ppp => "PPP",
            Podd => "PODD",
            Box4 => "BOX4",
            Lrel => "LREL",
            Pconj => "PCONJ",
            Rpp => "RPP",
            PprOuter => "PPR_OUTER",
            PprMixed => "PPR_MIXED",
            ZetaNull => "ZETA_NULL",
            O1o2 => "O1O2",
            Null => "NULL",
            Inprod => "INPROD",
            Iomeg => "IOMEG",
            Cyclic3d => "CYCLIC3D",
            Zeta3d => "ZETA3D",
            Real3d => "REAL3D",
            Tr4 => "TR4",
            Exch => "EXCH",
            Star => "STAR",
            Gam => "GAM",
            Gog => "GOG",
            Fab => "FAB",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name().eq_ignore_ascii_case(s))
    }
}

/// Largest residual component: the first exact nonzero one, else the float
/// component of largest magnitude.
pub fn worst(v: impl IntoIterator<Item = Scalar>) -> Scalar {
    let mut best = Scalar::zero();
    for r in v {
        if r.is_exact() && !r.is_zero() {
            return r;
        }
        if r.abs_f64() > best.abs_f64() || (best.is_exact() && !r.is_exact()) {
            best = r;
        }
    }
    best
}

fn matrix_entries(m: &Matrix2<Scalar>) -> impl Iterator<Item = Scalar> + '_ {
    m.m.iter().flatten().cloned()
}

/// LHS - RHS of the identity on `f` (zero in exact mode when it holds; for
/// multi-component identities the worst component).
pub fn check_identity(id: IdentityId, f: &Frame<Scalar>) -> Result<Scalar> {
    let (arity, dim) = id.requirements();
    if let Some(d) = dim {
        f.require_dim(d)?;
    }
    f.require_arity(arity)?;
    use IdentityId::*;
    let two = Scalar::int(2);
    match id {
        Ppp => {
            let (a, b) = triple(f)?;
            let [l1, l2, l3] = l_triple(f)?;
            let rhs = s_combo(f)? + &two * &(l1 * l2 * l3);
            Ok(&two * &(a - b) - rhs)
        }
        Podd => podd_residual(f),
        Box4 => box4_residual(f),
        Lrel => Ok(l_inv(f, 3, 0, 1)? + l_inv(f, 3, 1, 2)? - l_inv(f, 3, 0, 2)?),
        Pconj => Ok(p_inv(f, 0, 1)? + p_inv(f, 1, 0)?.conj()),
        Rpp => Ok(r_inv(f, 0, 1)? - &two * &(p_inv(f, 0, 1)? * p_inv(f, 1, 0)?)),
        PprOuter => {
            let z = zeta(f, 0)?;
            let basis = pauli_basis::<Scalar>(Variant::Plain, Position::Upper, f.dim());
            let lhs = basis.iter().zip(&z.comps).fold(Matrix2::zero(), |acc, (s, c)| &acc + &s.scale(c));
            let (l, lb) = (f.lam(0), f.lam_bar(0));
            let outer = Matrix2::new(&lb[0] * &l[0], &lb[0] * &l[1], &lb[1] * &l[0], &lb[1] * &l[1]);
            Ok(worst(matrix_entries(&(&lhs - &outer.scale(&two)))))
        }
        PprMixed => {
            let (z1, z2) = (zeta(f, 0)?, zeta(f, 1)?);
            let (z12, z21) = (zeta_mixed(f, 0, 1)?, zeta_mixed(f, 1, 0)?);
            Ok(worst([z12.dot(&z21) + z1.dot(&z2), z12.dot(&z1), z12.dot(&z2)]))
        }
        ZetaNull => {
            let z = zeta(f, 0)?;
            Ok(z.dot(&z))
        }
        O1o2 => {
            let (l1, l2) = (f.lam(0), f.lam(1));
            let (w1, w2, w12) = (omega_matrix(l1, l1), omega_matrix(l2, l2), omega_matrix(l1, l2));
            let e = eps_pair(l1, l2);
            let mut res = Vec::new();
            for mu in 0..4 {
                for nu in 0..4 {
                    let prod = sum((0..4).map(|r| w1[mu][r].clone() * w2[r][nu].clone() * Scalar::int(metric(r))));
                    let trace = if mu == nu { Scalar::int(metric(mu)) * e.clone() } else { Scalar::zero() };
                    res.push(prod + &two * &((w12[mu][nu].clone() + trace) * e.clone()));
                }
            }
            Ok(worst(res))
        }
        Null => Ok(omega(f, 0)?.isotropy()),
        Inprod => {
            let (l1, l2) = (f.lam(0), f.lam(1));
            let (w1, w2) = (omega_matrix(l1, l1), omega_matrix(l2, l2));
            let mut full = Scalar::zero();
            for mu in 0..4 {
                for nu in 0..4 {
                    full = full + Scalar::int(metric(mu) * metric(nu)) * w1[mu][nu].clone() * w2[mu][nu].clone();
                }
            }
            let full = full * Scalar::ratio(1, 8);
            let mid = omega(f, 0)?.inner(&omega(f, 1)?);
            let e = eps_pair(l1, l2);
            let e2 = &e * &e;
            Ok(worst([&full - &e2, mid - e2]))
        }
        Iomeg => {
            let x = f.x(0);
            let w = omega(f, 0)?;
            let mapped = crate::conformal::omega_inversion(x, &w)?;
            let l2 = slash(x, Variant::Tilde).left(f.lam(0));
            let inv = Scalar::one() / x.square();
            let l2 = [&l2[0] * &inv, &l2[1] * &inv];
            let direct = basis_components(&omega_matrix(&l2, &l2));
            let mut v: Vec<Scalar> = mapped.as_array().into_iter().zip(direct.as_array()).map(|(a, b)| a - b).collect();
            v.push(mapped.isotropy());
            Ok(worst(v))
        }
        Cyclic3d => {
            let (a, b) = triple(f)?;
            Ok(a + b)
        }
        Zeta3d => {
            let (z1, z2, z12) = (zeta(f, 0)?, zeta(f, 1)?, zeta_mixed(f, 0, 1)?);
            let e = eps_pair(f.lam(0), f.lam(1));
            let e2 = &e * &e;
            Ok(worst([
                z12.dot(&z12) - e2.clone(),
                e2 + Scalar::ratio(1, 2) * z1.dot(&z2),
                z1.dot(&z1),
                z12.dot(&z1),
                z12.dot(&z2),
            ]))
        }
        Real3d => {
            let mut v = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        v.push(p_inv(f, i, j)?.im_part());
                    }
                }
            }
            v.extend(l_triple(f)?.iter().map(Scalar::im_part));
            Ok(worst(v))
        }
        Tr4 => crate::spinor::trace4_residual(f.x(0), f.x(1), f.x(2), f.x(3)),
        Exch => Ok(crate::spinor_checks::exchange_residual(f.x(0), f.x(1))),
        Star => Ok(crate::spinor_checks::star_residual(f.x(0), f.x(1))),
        Gam => Ok(crate::spinor_checks::clifford3_residual(f.x(0), f.x(1))),
        Gog => Ok(crate::spinor_checks::gog_residual([f.lam(0), f.lam(1), f.lam(2), f.lam(3)])),
        Fab => Ok(crate::spinor_checks::fab_residual([f.x(0), f.x(1), f.x(2), f.x(3)])),
    }
}

/// Right-hand side of the Levi-Civita expansion minus 6i(a + b).
pub fn podd_residual<T: Field>(f: &Frame<T>) -> Result<T> {
    Ok(podd_rhs(f)? - T::from_i64(6) * T::i() * podd_sum(f)?)
}

/// P12P23P31 + P13P32P21.
pub fn podd_sum<T: Field>(f: &Frame<T>) -> Result<T> {
    let (a, b) = triple(f)?;
    Ok(a + b)
}

/// The printed Levi-Civita expression in zeta_i and the separations.
pub fn podd_rhs<T: Field>(f: &Frame<T>) -> Result<T> {
    f.require_dim(Dim::Four)?;
    f.require_arity(3)?;
    let x = |i, j| f.sep(i, j);
    let xc = |i, j| f.check_sep(i, j);
    let sq = |i, j| -> Result<T> { Ok(xc(i, j)?.square()) };
    let z: Vec<_> = (0..3).map(|i| zeta(f, i)).collect::<Result<_>>()?;
    let w = |a: &[T], b: &[T], c: &[T], d: &[T]| levi_civita::<T, &[T]>(a, b, c, d);
    let v = &(&x(0, 1).scale(&sq(1, 2)?) + &x(1, 2).scale(&sq(0, 1)?)).scale(&sq(0, 2)?)
        - &x(0, 2).scale(&(sq(0, 1)? * sq(1, 2)?));
    let two = T::from_i64(2);
    let t0 = w(&z[0].comps, &z[1].comps, &z[2].comps, &v.lower())?;
    let t1 = two.clone()
        * sq(1, 2)?
        * z[0].on(&(&x(0, 1) + &x(0, 2)))
        * w(&z[1].comps, &z[2].comps, &xc(0, 1)?.lower(), &xc(0, 2)?.lower())?;
    let t2 = two.clone()
        * sq(0, 2)?
        * z[1].on(&(&x(0, 1) - &x(1, 2)))
        * w(&z[0].comps, &z[2].comps, &xc(0, 1)?.lower(), &xc(1, 2)?.lower())?;
    let t3 = two
        * sq(0, 1)?
        * z[2].on(&(&x(0, 2) + &x(1, 2)))
        * w(&z[0].comps, &z[1].comps, &xc(0, 2)?.lower(), &xc(1, 2)?.lower())?;
    Ok(t0 + t1 + t2 - t3)
}

/// P12P23P34P41 + P14P43P32P21.
pub fn box4_sum<T: Field>(f: &Frame<T>) -> Result<T> {
    let p = |i, j| p_inv(f, i, j);
    Ok(p(0, 1)? * p(1, 2)? * p(2, 3)? * p(3, 0)? + p(0, 3)? * p(3, 2)? * p(2, 1)? * p(1, 0)?)
}

/// The printed R/L expression on the right of the box relation.
pub fn box4_rhs<T: Field>(f: &Frame<T>) -> Result<T> {
    f.require_dim(Dim::Four)?;
    f.require_arity(4)?;
    f.check_separations()?;
    // 1-based helpers matching the printed indices.
    let l = |k: usize, i: usize, j: usize| l_inv(f, k - 1, i - 1, j - 1);
    let r = |i: usize, j: usize| r_inv(f, i - 1, j - 1);
    let (s, t) = cross_ratios(f)?;
    let two = T::from_i64(2);
    let four = T::from_i64(4);
    let one = T::one();
    let (l1_24, l2_31, l3_42, l4_13) = (l(1, 2, 4)?, l(2, 3, 1)?, l(3, 4, 2)?, l(4, 1, 3)?);
    let (l1_23, l2_41, l3_41, l4_23) = (l(1, 2, 3)?, l(2, 4, 1)?, l(3, 4, 1)?, l(4, 2, 3)?);
    let (l1_34, l4_12, l2_34, l3_12) = (l(1, 3, 4)?, l(4, 1, 2)?, l(2, 3, 4)?, l(3, 1, 2)?);
    let (r12, r34, r14, r23, r13, r24) = (r(1, 2)?, r(3, 4)?, r(1, 4)?, r(2, 3)?, r(1, 3)?, r(2, 4)?);
    let mut acc = (r12.clone() + two.clone() * l1_24.clone() * l2_31.clone())
        * (r34.clone() + two.clone() * l3_42.clone() * l4_13.clone());
    acc = acc
        + (r14.clone() + two.clone() * l1_24.clone() * l4_13.clone())
            * (r23.clone() + two.clone() * l2_31.clone() * l3_42.clone());
    acc = acc - four * l1_24 * l2_31 * l3_42 * l4_13;
    acc = acc
        - (r12.clone() + two.clone() * l1_23.clone() * l2_41.clone())
            * (r34.clone() + two.clone() * l3_41.clone() * l4_23.clone())
            / t.clone();
    acc = acc
        - (r14.clone() + two.clone() * l1_34.clone() * l4_12.clone())
            * (r23.clone() + two.clone() * l2_34.clone() * l3_12.clone())
            / s.clone();
    acc = acc + two.clone() * (l1_23 * l3_41 * r24.clone() + r13.clone() * l2_41 * l4_23) / t.clone();
    acc = acc + two * (l1_34 * l3_12 * r24.clone() + r13.clone() * l2_34 * l4_12) / s.clone();
    acc = acc + s.clone() / t.clone() * r12 * r34 + t.clone() / s.clone() * r14 * r23;
    acc = acc + (one - s.clone() - t.clone()) / (s * t) * r13 * r24;
    Ok(acc)
}

/// Printed right-hand side minus 8(P12P23P34P41 + P14P43P32P21).
pub fn box4_residual<T: Field>(f: &Frame<T>) -> Result<T> {
    Ok(box4_rhs(f)? - T::from_i64(8) * box4_sum(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{random_frame, FrameJson, Slot};
    use rand::SeedableRng;

    fn frame(json: &str) -> Frame<Scalar> {
        serde_json::from_str::<FrameJson>(json).unwrap().to_frame().unwrap()
    }

    fn pt(v: &[i64]) -> MinkowskiPoint<Scalar> {
        MinkowskiPoint::new(v.iter().map(|&x| Scalar::int(x)).collect()).unwrap()
    }

    #[test]
    fn p_worked_example() {
        let f = frame(
            r#"{"dim":4,"slots":[{"x":["0","1","0","0"],"lambda":["1","0"]},
                {"x":["0","0","0","0"],"lambda":["0","1"],"lambda_bar":["0","1"]}]}"#,
        );
        assert_eq!(p_inv(&f, 0, 1).unwrap(), Scalar::one());
        assert_eq!(p_inv(&f, 0, 0), Err(Error::SameSlot(1)));
    }

    #[test]
    fn zeta_examples() {
        let fr = |l: [i64; 2]| {
            let l = [Scalar::int(l[0]), Scalar::int(l[1])];
            Frame::new(Dim::Four, vec![Slot::conjugate_pair(pt(&[0, 0, 0, 0]), l)]).unwrap()
        };
        let z = zeta(&fr([1, 0]), 0).unwrap();
        assert_eq!(z.comps, [1, 0, 0, 1].map(Scalar::int).to_vec());
        assert_eq!(z.dot(&z), Scalar::zero());
        assert_eq!(zeta(&fr([1, 1]), 0).unwrap().comps, [2, 2, 0, 0].map(Scalar::int).to_vec());
    }

    #[test]
    fn l_example() {
        let one = [Scalar::one(), Scalar::one()];
        let zero = [Scalar::zero(), Scalar::zero()];
        let f = Frame::new(
            Dim::Four,
            vec![
                Slot::conjugate_pair(pt(&[0, 0, 0, 0]), one),
                Slot::conjugate_pair(pt(&[0, 1, 0, 0]), zero.clone()),
                Slot::conjugate_pair(pt(&[0, 0, 1, 0]), zero),
            ],
        )
        .unwrap();
        assert_eq!(l_inv(&f, 0, 1, 2).unwrap(), Scalar::int(-2));
        assert_eq!(l_inv(&f, 1, 0, 2).unwrap(), Scalar::zero());
    }

    #[test]
    fn cross_ratio_collinear() {
        let slots = (1..=4).map(|i| Slot::conjugate_pair(pt(&[0, i, 0, 0]), [Scalar::one(), Scalar::zero()])).collect();
        let f = Frame::new(Dim::Four, slots).unwrap();
        let (s, t) = cross_ratios(&f).unwrap();
        assert_eq!((s, t), (Scalar::ratio(1, 16), Scalar::ratio(9, 16)));
        let mut slots = f.slots().to_vec();
        slots[2] = slots[0].clone();
        assert_eq!(cross_ratios(&f.with_slots(slots)).unwrap_err(), Error::LightconeSingularity { i: 1, j: 3 });
    }

    #[test]
    fn omega_components() {
        let f = frame(r#"{"dim":4,"slots":[{"x":["0","0","0","0"],"lambda":["1","0"]}]}"#);
        let w = omega(&f, 0).unwrap();
        assert_eq!(w.as_array(), [Scalar::one(), Scalar::zero(), Scalar::zero()]);
        assert_eq!(w.isotropy(), Scalar::zero());
    }

    #[test]
    fn omega_components_match_spinor_squares() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = random_frame(&mut rng, Dim::Four, 2, 20);
        let w = omega(&f, 0).unwrap();
        let l = f.lam(0);
        assert_eq!(w.plus, &l[0] * &l[0]);
        assert_eq!(w.minus, &l[1] * &l[1]);
        assert_eq!(w.zero, &l[0] * &l[1]);
        let m = omega_matrix(l, f.lam(1));
        let n = omega_matrix(f.lam(1), l);
        assert_eq!(m, n);
    }

    #[test]
    fn rl_vanishes_with_zero_omega_or_zeta() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let f = random_frame(&mut rng, Dim::Four, 3, 20);
        let mut slots = f.slots().to_vec();
        slots[2] = Slot::conjugate_pair(slots[2].x.clone(), [Scalar::zero(), Scalar::zero()]);
        assert_eq!(rl_inv(&f.with_slots(slots), 0).unwrap(), Scalar::zero());
        let mut slots = f.slots().to_vec();
        slots[0] = Slot::conjugate_pair(slots[0].x.clone(), [Scalar::zero(), Scalar::zero()]);
        assert_eq!(rl_inv(&f.with_slots(slots), 0).unwrap(), Scalar::zero());
    }

    #[test]
    fn arity_and_dimension_errors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f4 = random_frame(&mut rng, Dim::Four, 3, 20);
        let f3 = random_frame(&mut rng, Dim::Three, 3, 20);
        assert_eq!(check_identity(IdentityId::Box4, &f4), Err(Error::WrongArity { expected: 4, got: 3 }));
        assert_eq!(check_identity(IdentityId::Cyclic3d, &f4), Err(Error::WrongDimension { expected: 3, got: 4 }));
        assert_eq!(check_identity(IdentityId::Podd, &f3), Err(Error::WrongDimension { expected: 4, got: 3 }));
    }
}
