//! Closed-form 2-, 3- and 4-point functions, and the differential operators
//! certifying free field equations and current conservation.

use serde::{Deserialize, Serialize};

use crate::conformal::FieldLabel;
use crate::dual::{Dual, SlotId};
use crate::error::{Error, Result};
use crate::frame::{Frame, Slot};
use crate::invariants::{l_triple, p_inv, r_inv, rl_inv, s_combo, triple, zeta, Polarization};
use crate::scalar::{Field, Scalar};
use crate::spinor::{eps_upper, metric, pauli, Dim, MinkowskiPoint, Variant};
use crate::zpoly::{interior_derivative, interior_laplacian_term, ZPoly};

/// Imaginary regulator added to rho^2 in float mode: x^2 + i eps x^0.
pub const IEPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    /// Massless scalar Wightman function in D = 3 or 4.
    Delta2,
    /// N (Delta^+)^2.
    Phi2,
    /// Weyl spinor: P12 / (2 pi^2 rho12^2).
    Psi2,
    /// Rank r currents: R12^r / (rho12^2)^(D-2).
    Jr2 { r: u32 },
    /// Self-dual Maxwell field: P12^2 / rho12^2.
    F2,
    /// <F F* T>: P13^2 P32^2 / (rho13^2 rho23^2).
    F2t3,
    /// Twist-one (s, 0) field: P12^(2s) / rho12^2, spin stored doubled.
    Chiral2 { two_s: u32 },
    /// (a^r + b^r) / (rho12 rho23 rho13)^2, a = P12P23P31, b = P13P32P21.
    Jr3 { r: u32, two_s: u32 },
    /// (a + b) / (rho12 rho23 rho13)^2.
    U1j3,
    /// (a - b) / (rho12 rho23 rho13)^2.
    NonAb3,
    /// Fermionic stress tensor: (8/pi^6) (a - b)[3S - 4(a - b)] / den.
    Tpsi3,
    /// Maxwell stress tensor, both printed forms.
    Tmax3,
    /// RL13 RL23 / rho12^4.
    Jjf3,
    /// Vector-current 4-point function built from inversion tensors.
    Stanev4,
}

impl Tag {
    pub fn arity(self) -> usize {
        use Tag::*;
        match self {
            Delta2 | Phi2 | Psi2 | Jr2 { .. } | F2 | Chiral2 { .. } => 2,
            F2t3 | Jr3 { .. } | U1j3 | NonAb3 | Tpsi3 | Tmax3 | Jjf3 => 3,
            Stanev4 => 4,
        }
    }

    /// None: either dimension.
    pub fn dim(self) -> Option<Dim> {
        use Tag::*;
        match self {
            Delta2 | Phi2 | Jr2 { .. } => None,
            _ => Some(Dim::Four),
        }
    }

    pub fn name(self) -> &'static str {
        use Tag::*;
        match self {
            Delta2 => "DELTA2",
            Phi2 => "PHI2",
            Psi2 => "PSI2",
            Jr2 { .. } => "JR2",
            F2 => "F2",
            F2t3 => "F2T3",
            Chiral2 { .. } => "CHIRAL2",
            Jr3 { .. } => "JR3",
            U1j3 => "U1J3",
            NonAb3 => "NONAB3",
            Tpsi3 => "TPSI3",
            Tmax3 => "TMAX3",
            Jjf3 => "JJF3",
            Stanev4 => "STANEV4",
        }
    }

    /// Tags whose current slots satisfy the spinor conservation law.
    pub fn is_conserved_current(self) -> bool {
        use Tag::*;
        matches!(self, Jr2 { .. } | Jr3 { .. } | U1j3 | NonAb3 | Tpsi3 | Tmax3)
    }
}

/// A correlator tag with its overall normalization (multiplying the printed
/// expression, including any printed constants).
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorId {
    pub tag: Tag,
    pub normalization: Scalar,
}

impl CorrelatorId {
    pub fn new(tag: Tag) -> Self {
        CorrelatorId { tag, normalization: Scalar::one() }
    }

    pub fn with_normalization(tag: Tag, normalization: Scalar) -> Self {
        CorrelatorId { tag, normalization }
    }

    /// Printed transformation labels per slot, or None where they do not
    /// apply (vector-index currents).
    pub fn labels(&self, dim: Dim) -> Option<Vec<FieldLabel>> {
        use Tag::*;
        let l = |a: u32, b: u32, d: Scalar| FieldLabel::new(a, b, d);
        let dm2 = dim.n() as i64 - 2;
        let q = |n: i64, d: i64| Scalar::ratio(n, d);
        Some(match self.tag {
            Delta2 => vec![l(0, 0, q(dm2, 2)); 2],
            Phi2 => vec![l(0, 0, Scalar::int(dm2)); 2],
            Psi2 => vec![l(1, 0, q(3, 2)), l(0, 1, q(3, 2))],
            Jr2 { r } => vec![l(r, r, Scalar::int(dm2 + r as i64)); 2],
            F2 => vec![l(2, 0, q(2, 1)), l(0, 2, q(2, 1))],
            F2t3 => vec![l(2, 0, q(2, 1)), l(0, 2, q(2, 1)), l(2, 2, q(4, 1))],
            Chiral2 { two_s } => {
                let d = q(2 + two_s as i64, 2);
                vec![l(two_s, 0, d.clone()), l(0, two_s, d)]
            }
            Jr3 { r, .. } => vec![l(r, r, Scalar::int(2 + r as i64)); 3],
            U1j3 | NonAb3 => vec![l(1, 1, q(3, 1)); 3],
            Tpsi3 | Tmax3 => vec![l(2, 2, q(4, 1)); 3],
            Jjf3 => vec![l(1, 1, q(3, 1)), l(1, 1, q(3, 1)), l(4, 0, q(4, 1))],
            Stanev4 => return None,
        })
    }
}

fn require<T: Field>(tag: Tag, f: &Frame<T>) -> Result<()> {
    if let Some(d) = tag.dim() {
        f.require_dim(d)?;
    }
    f.require_arity(tag.arity())
}

fn is_exact<T: Field>(f: &Frame<T>) -> bool {
    f.x(0).comps[0].primal().is_exact()
}

/// rho_ij^2, with the i eps x^0 regulator in float mode.
fn rho2_reg<T: Field>(f: &Frame<T>, i: usize, j: usize) -> Result<T> {
    let r = f.rho2(i, j)?;
    if is_exact(f) {
        return Ok(r);
    }
    let x0 = f.sep(i, j).comps[0].clone();
    Ok(r + x0.scale(&Scalar::float(num_complex::Complex64::new(0.0, IEPS))))
}

/// Delta^+_ij = rho^(2-D) / ((D-2)|S^(D-1)|); odd rho powers need floats.
pub fn delta_plus<T: Field>(f: &Frame<T>, i: usize, j: usize) -> Result<T> {
    let r2 = rho2_reg(f, i, j)?;
    match f.dim() {
        Dim::Four => Ok(T::from_scalar(Scalar::pi_pow(-2)).scale(&Scalar::ratio(1, 4)) / r2),
        Dim::Three => {
            if is_exact(f) {
                return Err(Error::OddRhoPower);
            }
            Ok(T::from_scalar(Scalar::real_float(1.0 / (4.0 * std::f64::consts::PI))) / r2.sqrt()?)
        }
    }
}

fn den3<T: Field>(f: &Frame<T>) -> Result<T> {
    Ok(f.rho2(0, 1)? * f.rho2(1, 2)? * f.rho2(0, 2)?)
}

/// The two printed forms of the Maxwell stress-tensor 3-point function.
pub fn tmax3_forms<T: Field>(f: &Frame<T>) -> Result<(T, T)> {
    let den = den3(f)?;
    let pi6 = T::from_scalar(Scalar::pi_pow(-6));
    let [l1, l2, l3] = l_triple(f)?;
    let s = s_combo(f)? + T::from_i64(2) * l1 * l2 * l3;
    let rrr = r_inv(f, 0, 1)? * r_inv(f, 1, 2)? * r_inv(f, 0, 2)?;
    let r_form = T::from_i64(16) * pi6.clone() * (rrr + s.clone() * s) / den.clone();
    let (a, b) = triple(f)?;
    let p_form = T::from_i64(64) * pi6 * (a.clone() * a + b.clone() * b) / den;
    Ok((r_form, p_form))
}

/// The fermionic stress-tensor 3-point function with coefficient `k` in
/// front of the subtracted (a - b): 4 is conserved, 2 is as printed.
pub fn tpsi3_with<T: Field>(f: &Frame<T>, k: i64) -> Result<T> {
    let (a, b) = triple(f)?;
    let amb = a - b;
    let bracket = T::from_i64(3) * s_combo(f)? - T::from_i64(k) * amb.clone();
    Ok(T::from_i64(8) * T::from_scalar(Scalar::pi_pow(-6)) * amb * bracket / den3(f)?)
}

/// Value of the correlator at the frame.
pub fn evaluate<T: Field>(id: &CorrelatorId, f: &Frame<T>) -> Result<T> {
    use Tag::*;
    require(id.tag, f)?;
    let p = |i, j| p_inv(f, i, j);
    let v = match id.tag {
        Delta2 => delta_plus(f, 0, 1)?,
        Phi2 => {
            // (Delta^+)^2 = rho^(4-2D) / ((D-2)|S^(D-1)|)^2: an even power of rho.
            let r2 = rho2_reg(f, 0, 1)?;
            let (k, den) = match f.dim() {
                Dim::Four => (-4, r2.clone() * r2),
                Dim::Three => (-2, r2),
            };
            T::from_scalar(Scalar::pi_pow(k)).scale(&Scalar::ratio(1, 16)) / den
        }
        Psi2 => T::from_scalar(Scalar::pi_pow(-2)).scale(&Scalar::ratio(1, 2)) * p(0, 1)? / f.rho2(0, 1)?,
        Jr2 { r } => {
            let r2 = f.rho2(0, 1)?;
            let den = match f.dim() {
                Dim::Four => r2.clone() * r2,
                Dim::Three => r2,
            };
            r_inv(f, 0, 1)?.powi(r) / den
        }
        F2 => p(0, 1)?.powi(2) / f.rho2(0, 1)?,
        F2t3 => p(0, 2)?.powi(2) * p(2, 1)?.powi(2) / (f.rho2(0, 2)? * f.rho2(1, 2)?),
        Chiral2 { two_s } => p(0, 1)?.powi(two_s) / f.rho2(0, 1)?,
        Jr3 { r, .. } => {
            let (a, b) = triple(f)?;
            (a.powi(r) + b.powi(r)) / den3(f)?
        }
        U1j3 => {
            let (a, b) = triple(f)?;
            (a + b) / den3(f)?
        }
        NonAb3 => {
            let (a, b) = triple(f)?;
            (a - b) / den3(f)?
        }
        Tpsi3 => tpsi3_with(f, 4)?,
        Tmax3 => {
            let (r_form, p_form) = tmax3_forms(f)?;
            let (x, y) = (r_form.primal(), p_form.primal());
            if !(x == y || (!x.is_exact() && x.approx_eq(&y, 1e-8))) {
                return Err(Error::Inconsistent(format!("TMAX3 forms differ: {x} vs {y}")));
            }
            p_form
        }
        Jjf3 => {
            let r2 = f.rho2(0, 1)?;
            rl_inv(f, 0)? * rl_inv(f, 1)? / (r2.clone() * r2)
        }
        Stanev4 => stanev_eval(f, None)?,
    };
    Ok(v.scale(&id.normalization))
}

/// R_{mu nu}(x) = (eta_{mu nu} - 2 x_mu x_nu / x^2) / x^2.
#[derive(Clone, Debug, PartialEq)]
pub struct InversionTensor<T> {
    pub r: [[T; 4]; 4],
}

impl<T: Field> InversionTensor<T> {
    pub fn new(x: &MinkowskiPoint<T>) -> Result<Self> {
        if x.dim() != Dim::Four {
            return Err(Error::WrongDimension { expected: 4, got: x.comps.len() });
        }
        let x2 = x.square();
        if x2.is_zero() {
            return Err(Error::Invalid("inversion tensor at a null vector".into()));
        }
        let xl = x.lower();
        let inv = T::one() / x2;
        let two = T::from_i64(2);
        let r = std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                let eta = if m == n { T::from_i64(metric(m)) } else { T::zero() };
                (eta - two.clone() * xl[m].clone() * xl[n].clone() * inv.clone()) * inv.clone()
            })
        });
        Ok(InversionTensor { r })
    }

    /// R eta R, expected to equal eta / (x^2)^2.
    pub fn square(&self) -> [[T; 4]; 4] {
        std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                (0..4).fold(T::zero(), |a, k| a + self.r[m][k].clone() * self.r[k][n].clone() * T::from_i64(metric(k)))
            })
        })
    }
}

type T3<T> = Vec<T>;

fn idx3(a: usize, b: usize, c: usize) -> usize {
    (a * 4 + b) * 4 + c
}

/// T^{mu nu rho} = eps^{alpha mu nu rho} z_alpha.
fn eps_contract<T: Field>(z: &[T]) -> T3<T> {
    let mut t = vec![T::zero(); 64];
    for m in 0..4 {
        for n in 0..4 {
            for r in 0..4 {
                for (a, za) in z.iter().enumerate() {
                    let e = eps_upper([a, m, n, r]);
                    if e != 0 {
                        t[idx3(m, n, r)] = za.clone().scale(&Scalar::int(e));
                    }
                }
            }
        }
    }
    t
}

/// The 4-point function with free indices contracted against covariant
/// polarizations, indexed exactly as the printed formula:
/// eps^{a1 m1 n1 r1} ... R_{m1 m2}(x12) R_{n1 n3}(x13) R_{r1 r4}(x14)
/// R_{r2 r3}(x23) R_{n2 n4}(x24) R_{m3 m4}(x34).
/// `pols` defaults to the slots' zeta vectors.
pub fn stanev_eval<T: Field>(f: &Frame<T>, pols: Option<&[Vec<T>; 4]>) -> Result<T> {
    f.require_dim(Dim::Four)?;
    f.require_arity(4)?;
    f.check_separations()?;
    let z: Vec<Vec<T>> = match pols {
        Some(p) => p.to_vec(),
        None => (0..4).map(|i| zeta(f, i).map(|z: Polarization<T>| z.comps)).collect::<Result<_>>()?,
    };
    let t: Vec<T3<T>> = z.iter().map(|v| eps_contract(v)).collect();
    let r = |i, j| InversionTensor::new(&f.sep(i, j)).map(|t| t.r);
    let (r12, r13, r14, r23, r24, r34) = (r(0, 1)?, r(0, 2)?, r(0, 3)?, r(1, 2)?, r(1, 3)?, r(2, 3)?);
    let z0 = || T::zero();
    let mut cc = vec![z0(); 64]; // C[d,h,l] = T1[a,b,c] R12[a,d] R13[b,h] R14[c,l]
    {
        let mut a1 = vec![z0(); 64]; // A[b,c,d]
        for a in 0..4 {
            for b in 0..4 {
                for cidx in 0..4 {
                    let v = &t[0][idx3(a, b, cidx)];
                    if v.is_zero() {
                        continue;
                    }
                    for d in 0..4 {
                        let k = idx3(b, cidx, d);
                        a1[k] = a1[k].clone() + v.clone() * r12[a][d].clone();
                    }
                }
            }
        }
        let mut b1 = vec![z0(); 64]; // B[c,d,h]
        for b in 0..4 {
            for cidx in 0..4 {
                for d in 0..4 {
                    let v = &a1[idx3(b, cidx, d)];
                    for h in 0..4 {
                        let k = idx3(cidx, d, h);
                        b1[k] = b1[k].clone() + v.clone() * r13[b][h].clone();
                    }
                }
            }
        }
        for cidx in 0..4 {
            for d in 0..4 {
                for h in 0..4 {
                    let v = &b1[idx3(cidx, d, h)];
                    for l in 0..4 {
                        let k = idx3(d, h, l);
                        cc[k] = cc[k].clone() + v.clone() * r14[cidx][l].clone();
                    }
                }
            }
        }
    }
    // E[d,i,k] = T2[d,e,f] R23[f,i] R24[e,k]
    let mut d2 = vec![z0(); 64]; // D[d,e,i]
    for d in 0..4 {
        for e in 0..4 {
            for ff in 0..4 {
                let v = &t[1][idx3(d, e, ff)];
                if v.is_zero() {
                    continue;
                }
                for i in 0..4 {
                    let k = idx3(d, e, i);
                    d2[k] = d2[k].clone() + v.clone() * r23[ff][i].clone();
                }
            }
        }
    }
    let mut e2 = vec![z0(); 64];
    for d in 0..4 {
        for e in 0..4 {
            for i in 0..4 {
                let v = &d2[idx3(d, e, i)];
                for k in 0..4 {
                    let q = idx3(d, i, k);
                    e2[q] = e2[q].clone() + v.clone() * r24[e][k].clone();
                }
            }
        }
    }
    // F[h,i,j] = T3[g,h,i] R34[g,j]
    let mut f3 = vec![z0(); 64];
    for g in 0..4 {
        for h in 0..4 {
            for i in 0..4 {
                let v = &t[2][idx3(g, h, i)];
                if v.is_zero() {
                    continue;
                }
                for j in 0..4 {
                    let q = idx3(h, i, j);
                    f3[q] = f3[q].clone() + v.clone() * r34[g][j].clone();
                }
            }
        }
    }
    let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * 4 + b) * 4 + c) * 4 + d;
    // H[h,l,i,k] = C[d,h,l] E[d,i,k]
    let mut hh = vec![z0(); 256];
    for d in 0..4 {
        for h in 0..4 {
            for l in 0..4 {
                let v = &cc[idx3(d, h, l)];
                if v.is_zero() {
                    continue;
                }
                for i in 0..4 {
                    for k in 0..4 {
                        let q = i4(h, l, i, k);
                        hh[q] = hh[q].clone() + v.clone() * e2[idx3(d, i, k)].clone();
                    }
                }
            }
        }
    }
    // M[h,i,k,l] = F[h,i,j] T4[j,k,l]
    let mut acc = T::zero();
    for h in 0..4 {
        for i in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let m = (0..4).fold(T::zero(), |a, j| a + f3[idx3(h, i, j)].clone() * t[3][idx3(j, k, l)].clone());
                    if m.is_zero() {
                        continue;
                    }
                    acc = acc + hh[i4(h, l, i, k)].clone() * m;
                }
            }
        }
    }
    Ok(acc)
}

/// d_alpha J^alpha at `slot`: set the slot's polarization to the covariant
/// basis vector e_alpha, differentiate in x_slot^alpha and sum.
pub fn stanev_divergence(f: &Frame<Scalar>, slot: usize) -> Result<Scalar> {
    f.require_arity(4)?;
    let base: Vec<Vec<Scalar>> = (0..4).map(|i| zeta(f, i).map(|z| z.comps)).collect::<Result<_>>()?;
    let mut total = Scalar::zero();
    for alpha in 0..4 {
        let lifted = lift_x_component(f, slot, alpha);
        let mut pols: [Vec<Dual<Scalar>>; 4] =
            std::array::from_fn(|i| base[i].iter().map(|c| Dual::constant(c.clone())).collect());
        pols[slot] = (0..4).map(|k| Dual::constant(Scalar::int((k == alpha) as i64))).collect();
        let g = stanev_eval(&lifted, Some(&pols))?;
        total = total + g.partial(SlotId(0));
    }
    Ok(total)
}

fn lift_x_component(f: &Frame<Scalar>, slot: usize, k: usize) -> Frame<Dual<Scalar>> {
    let mut g: Frame<Dual<Scalar>> = f.lift();
    let mut slots = g.slots().to_vec();
    slots[slot].x.comps[k] = Dual::variable(f.x(slot).comps[k].clone(), SlotId(0));
    g = g.with_slots(slots);
    g
}

type D1 = Dual<Scalar>;
type D2 = Dual<D1>;
type D3 = Dual<D2>;

/// sum_{A,B} sigma^mu[A,B] d_mu d/dlambda_bar_A d/dlambda_B J at the slot
/// (lambda_bar independent). Each (A, B) term is one directional derivative
/// along u^mu = sigma^mu[A,B] nested with two spinor derivatives.
pub fn current_conservation_residual(id: &CorrelatorId, slot: usize, f: &Frame<Scalar>) -> Result<Scalar> {
    Ok(crate::scalar::sum(current_conservation_terms(id, slot, f)?))
}

/// The four (A, B) terms whose sum is `current_conservation_residual`.
pub fn current_conservation_terms(id: &CorrelatorId, slot: usize, f: &Frame<Scalar>) -> Result<Vec<Scalar>> {
    f.require_dim(Dim::Four)?;
    if slot >= f.len() {
        return Err(Error::BadIndex { index: slot, dim: f.len() });
    }
    let sig: Vec<_> = (0..4).map(|m| pauli::<Scalar>(m, Variant::Plain, Dim::Four)).collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let u: Vec<Scalar> = sig.iter().map(|s| s.at(a, b).clone()).collect();
            let g: Frame<D3> = f.lift();
            let mut slots = g.slots().to_vec();
            let s = &mut slots[slot];
            for (k, uk) in u.iter().enumerate() {
                let dir = D3::variable(D2::zero(), SlotId(0)).scale(uk);
                s.x.comps[k] = D3::from_scalar(f.x(slot).comps[k].clone()) + dir;
            }
            s.lambda_bar.c[a] = D3::constant(D2::variable(D1::from_scalar(f.lam_bar(slot)[a].clone()), SlotId(1)));
            s.lambda.c[b] = D3::constant(D2::constant(D1::variable(f.lam(slot)[b].clone(), SlotId(2))));
            let g = g.with_slots(slots);
            let j = evaluate(id, &g)?;
            terms.push(j.partial(SlotId(0)).partial(SlotId(1)).partial(SlotId(2)));
        }
    }
    Ok(terms)
}

/// Free field equation at the slot: for a (s, 0) dependence,
/// sum_B sigma^mu[A,B] d_mu d/dlambda_B phi for each A; for (0, s),
/// sum_A d/dlambda_bar_A sigma^mu[A,B] d_mu phi for each B. Returns the worst
/// component.
pub fn free_equation_residual(id: &CorrelatorId, slot: usize, f: &Frame<Scalar>, dotted: bool) -> Result<Scalar> {
    f.require_dim(Dim::Four)?;
    if slot >= f.len() {
        return Err(Error::BadIndex { index: slot, dim: f.len() });
    }
    let sig: Vec<_> = (0..4).map(|m| pauli::<Scalar>(m, Variant::Plain, Dim::Four)).collect::<Result<_>>()?;
    let mut comps = Vec::new();
    for free in 0..2 {
        let mut total = Scalar::zero();
        for summed in 0..2 {
            let (a, b) = if dotted { (summed, free) } else { (free, summed) };
            let u: Vec<Scalar> = sig.iter().map(|s| s.at(a, b).clone()).collect();
            let g: Frame<D2> = f.lift();
            let mut slots = g.slots().to_vec();
            let s = &mut slots[slot];
            for (k, uk) in u.iter().enumerate() {
                let dir = D2::variable(D1::zero(), SlotId(0)).scale(uk);
                s.x.comps[k] = D2::from_scalar(f.x(slot).comps[k].clone()) + dir;
            }
            if dotted {
                s.lambda_bar.c[a] = D2::constant(D1::variable(f.lam_bar(slot)[a].clone(), SlotId(1)));
            } else {
                s.lambda.c[b] = D2::constant(D1::variable(f.lam(slot)[b].clone(), SlotId(1)));
            }
            let g = g.with_slots(slots);
            total = total + evaluate(id, &g)?.partial(SlotId(0)).partial(SlotId(1));
        }
        comps.push(total);
    }
    Ok(crate::invariants::worst(comps))
}

/// Conservation or free-field residual at the slot, chosen from the slot's
/// labels: currents (both spins nonzero) get the current operator, chiral
/// slots the free field equation.
pub fn conservation_residual(id: &CorrelatorId, slot: usize, f: &Frame<Scalar>) -> Result<Scalar> {
    let labels = id.labels(f.dim()).ok_or_else(|| Error::Invalid(format!("{} has no spinor labels", id.tag.name())))?;
    let lab = labels.get(slot).ok_or(Error::BadIndex { index: slot, dim: labels.len() })?;
    match (lab.two_s1 > 0, lab.two_s2 > 0) {
        (true, true) => current_conservation_residual(id, slot, f),
        (true, false) => free_equation_residual(id, slot, f, false),
        (false, true) => free_equation_residual(id, slot, f, true),
        (false, false) => Err(Error::Invalid(format!("slot {} of {} is a scalar", slot + 1, id.tag.name()))),
    }
}

/// J_r(x1, zeta) = R12^r / (x12^2)^(D-2) as a polynomial in the covariant
/// components of zeta_1 (zeta_2 from slot 1, coefficients differentiable in x_1).
pub fn jr2_zeta_poly(r: u32, f: &Frame<Scalar>) -> Result<ZPoly<D1>> {
    f.require_arity(2)?;
    let dim = f.dim();
    let mut g: Frame<D1> = f.lift();
    let mut slots: Vec<Slot<D1>> = g.slots().to_vec();
    for k in 0..dim.n() {
        slots[0].x.comps[k] = Dual::variable(f.x(0).comps[k].clone(), SlotId(k as u32));
    }
    g = g.with_slots(slots);
    let xc = g.check_sep(0, 1)?;
    let z2 = zeta(&g, 1)?;
    let z2u = z2.upper();
    let two = D1::from_i64(2);
    let proj = z2.on(&xc);
    let coeffs: Vec<D1> = (0..dim.n())
        .map(|k| xc.square() * z2u.comps[k].clone() - two.clone() * xc.comps[k].clone() * proj.clone())
        .collect();
    let rr = ZPoly::linear(dim, &coeffs).pow(r);
    let r2 = g.rho2(0, 1)?;
    let den = match dim {
        Dim::Four => r2.clone() * r2,
        Dim::Three => r2,
    };
    Ok(rr.scale_by(&(D1::one() / den)))
}

/// zeta* . d_x J_r at slot 1 evaluated on zeta_1, and the worst value of the
/// d_zeta^2 contribution (as a polynomial it must vanish identically).
pub fn zeta_conservation_residual(r: u32, f: &Frame<Scalar>) -> Result<(Scalar, Scalar)> {
    let dim = f.dim();
    let poly = jr2_zeta_poly(r, f)?;
    let z1: Vec<D1> = zeta(f, 0)?.comps.into_iter().map(D1::from_scalar).collect();
    let mut total = Scalar::zero();
    let mut lap = Vec::new();
    for nu in 0..dim.n() {
        let q = interior_derivative(&poly, nu, dim)?;
        // zeta*^nu d_nu = eta^{nu nu} zeta*_nu d/dx^nu.
        total = total + q.eval(&z1).partial(SlotId(nu as u32)) * Scalar::int(metric(nu));
        let l = interior_laplacian_term(&poly, nu, dim);
        lap.extend(l.terms().map(|(_, c)| c.primal()));
        lap.extend(l.terms().flat_map(|(_, c)| (0..dim.n()).map(|k| c.partial(SlotId(k as u32)))));
    }
    Ok((total, crate::invariants::worst(lap)))
}

/// Whether t^r + 1 is divisible by t^k + (-1)^k over the rationals, i.e.
/// whether a^r + b^r contains the factor a^k + (-b)^k.
pub fn jr3_contains_factor(r: u32, k: u32) -> bool {
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    if k == 0 {
        return false;
    }
    // Remainder of t^r + 1 modulo the monic t^k + c, reducing t^k -> -c.
    let cst = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    let mut coeffs = vec![BigRational::zero(); (r as usize).max(k as usize) + 1];
    coeffs[r as usize] += BigRational::one();
    coeffs[0] += BigRational::one();
    for deg in (k as usize..coeffs.len()).rev() {
        let c = std::mem::replace(&mut coeffs[deg], BigRational::zero());
        if !c.is_zero() {
            coeffs[deg - k as usize] -= c * &cst;
        }
    }
    coeffs.iter().all(Zero::is_zero)
}

/// Request JSON for the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorRequest {
    pub id: String,
    #[serde(default)]
    pub r: Option<u32>,
    /// Spin as a half-integer string ("1/2", "1") or number.
    #[serde(default)]
    pub s: Option<serde_json::Value>,
    pub frame: crate::frame::FrameJson,
    #[serde(default)]
    pub normalization: Option<String>,
}

/// Parse a spin value into 2s.
pub fn parse_two_s(v: &serde_json::Value) -> Result<u32> {
    let bad = || Error::BadSpin(v.to_string());
    let s: Scalar = match v {
        serde_json::Value::String(s) => s.parse().map_err(|_| bad())?,
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                Scalar::int(i as i64)
            } else {
                let f = n.as_f64().ok_or_else(bad)?;
                let two = (2.0 * f).round();
                if (two - 2.0 * f).abs() > 1e-12 || two < 0.0 {
                    return Err(bad());
                }
                Scalar::ratio(two as i64, 2)
            }
        }
        _ => return Err(bad()),
    };
    let two = &s * &Scalar::int(2);
    let e = two.as_exact().ok_or_else(bad)?;
    use num_traits::{Signed, ToPrimitive};
    if !e.im().is_zero_ref() || !e.re().is_integer() || e.re().is_negative() || e.pi_exponent() != 0 {
        return Err(bad());
    }
    e.re().to_integer().to_u32().ok_or_else(bad)
}

trait IsZeroRef {
    fn is_zero_ref(&self) -> bool;
}
impl IsZeroRef for num_rational::BigRational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl CorrelatorRequest {
    pub fn to_id(&self) -> Result<CorrelatorId> {
        let need_r = || self.r.ok_or_else(|| Error::Invalid(format!("{}: field r is required", self.id)));
        let need_s = || {
            self.s
                .as_ref()
                .ok_or_else(|| Error::Invalid(format!("{}: field s is required", self.id)))
                .and_then(parse_two_s)
        };
        let tag = match self.id.to_ascii_uppercase().as_str() {
            "DELTA2" => Tag::Delta2,
            "PHI2" => Tag::Phi2,
            "PSI2" => Tag::Psi2,
            "JR2" => Tag::Jr2 { r: need_r()? },
            "F2" => Tag::F2,
            "F2T3" => Tag::F2t3,
            "CHIRAL2" => Tag::Chiral2 { two_s: need_s()? },
            "JR3" => {
                let r = need_r()?;
                let two_s = match &self.s {
                    Some(v) => parse_two_s(v)?,
                    None => r,
                };
                Tag::Jr3 { r, two_s }
            }
            "U1J3" => Tag::U1j3,
            "NONAB3" => Tag::NonAb3,
            "TPSI3" => Tag::Tpsi3,
            "TMAX3" => Tag::Tmax3,
            "JJF3" => Tag::Jjf3,
            "STANEV4" => Tag::Stanev4,
            other => return Err(Error::Invalid(format!("id: unknown correlator {other:?}"))),
        };
        let normalization = match &self.normalization {
            Some(s) => s.parse().map_err(|e| match e {
                Error::Parse { input, reason } => Error::Parse { input, reason: format!("normalization: {reason}") },
                other => other,
            })?,
            None => Scalar::one(),
        };
        Ok(CorrelatorId { tag, normalization })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{random_frame, FrameJson};
    use rand::SeedableRng;

    fn worked() -> Frame<Scalar> {
        serde_json::from_str::<FrameJson>(
            r#"{"dim":4,"slots":[{"x":["0","1","0","0"],"lambda":["1","0"]},
                {"x":["0","0","0","0"],"lambda":["0","1"],"lambda_bar":["0","1"]}]}"#,
        )
        .unwrap()
        .to_frame()
        .unwrap()
    }

    #[test]
    fn psi2_worked_example() {
        let v = evaluate(&CorrelatorId::new(Tag::Psi2), &worked()).unwrap();
        assert_eq!(v.to_string(), "1/2*pi^-2");
    }

    #[test]
    fn chiral_zero_spinor() {
        let f = worked();
        let mut slots = f.slots().to_vec();
        slots[0].lambda.c = [Scalar::zero(), Scalar::zero()];
        let v = evaluate(&CorrelatorId::new(Tag::Chiral2 { two_s: 3 }), &f.with_slots(slots)).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn odd_rho_power_rejected_in_exact_mode() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = random_frame(&mut rng, Dim::Three, 2, 10);
        assert_eq!(evaluate(&CorrelatorId::new(Tag::Delta2), &f), Err(Error::OddRhoPower));
        assert!(evaluate(&CorrelatorId::new(Tag::Delta2), &f.to_float()).is_ok());
        assert!(evaluate(&CorrelatorId::new(Tag::Phi2), &f).is_ok());
    }

    #[test]
    fn arity_checked() {
        assert_eq!(evaluate(&CorrelatorId::new(Tag::Tmax3), &worked()), Err(Error::WrongArity { expected: 3, got: 2 }));
    }

    #[test]
    fn inversion_tensor_squares_to_metric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let f = random_frame(&mut rng, Dim::Four, 1, 10);
        let t = InversionTensor::new(f.x(0)).unwrap();
        let x2 = f.x(0).square();
        let sq = t.square();
        for m in 0..4 {
            for n in 0..4 {
                assert_eq!(t.r[m][n], t.r[n][m]);
                let want = if m == n { Scalar::int(metric(m)) / (&x2 * &x2) } else { Scalar::zero() };
                assert_eq!(sq[m][n], want);
            }
        }
    }

    #[test]
    fn factor_division() {
        for k in 1..=4 {
            assert!(jr3_contains_factor(k, k) == (k % 2 == 0));
        }
        assert!(jr3_contains_factor(6, 2));
        assert!(!jr3_contains_factor(4, 2));
        assert!(!jr3_contains_factor(3, 1));
        // r > 2s: the factor divides exactly when 2s is even and r / 2s is odd.
        for k in 1..=4u32 {
            for r in k + 1..=16 {
                let want = k % 2 == 0 && r % k == 0 && (r / k) % 2 == 1;
                assert_eq!(jr3_contains_factor(r, k), want, "r = {r}, 2s = {k}");
            }
        }
    }

    #[test]
    fn spin_parsing() {
        assert_eq!(parse_two_s(&serde_json::json!("1/2")).unwrap(), 1);
        assert_eq!(parse_two_s(&serde_json::json!(1)).unwrap(), 2);
        assert_eq!(parse_two_s(&serde_json::json!(1.5)).unwrap(), 3);
        assert!(parse_two_s(&serde_json::json!("1/3")).is_err());
    }
}
