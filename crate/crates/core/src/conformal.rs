//! Finite conformal transformations acting jointly on points and spinors,
//! and the infinitesimal special-conformal generator check.

use serde::{Deserialize, Serialize};

use crate::correlators::{evaluate, CorrelatorId};
use crate::dual::{Dual, SlotId};
use crate::error::{Error, Result};
use crate::frame::{Frame, Slot};
use crate::invariants::{check_identity, l_inv, p_inv, rl_inv, IdentityId, OmegaTensor};
use crate::scalar::Scalar;
use crate::spinor::{metric, sigma_mn, slash, Dim, Dotting, Matrix2, MinkowskiPoint, Variant};

/// One generator of the conformal group.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    /// x -> x + a.
    Translation(MinkowskiPoint<Scalar>),
    /// x~ -> A x~ A^dagger, lambda -> lambda A^-1, lambda_bar -> (A^dagger)^-1 lambda_bar.
    Lorentz(Matrix2<Scalar>),
    /// x -> rho x, spinors -> rho^(1/2) spinors.
    Dilation(Scalar),
    /// (x0, x) -> (x0, -x)/x^2, lambda -> lambda x~/x^2, lambda_bar -> x~ lambda_bar/x^2.
    WeylInversion,
}

impl Primitive {
    pub fn lorentz(a: Matrix2<Scalar>) -> Result<Self> {
        if a.det() != Scalar::one() && !a.det().approx_eq(&Scalar::one(), crate::scalar::FLOAT_REL_TOL) {
            return Err(Error::NotUnimodular);
        }
        Ok(Primitive::Lorentz(a))
    }

    pub fn dilation(rho: Scalar) -> Result<Self> {
        if !rho.is_real() || rho.re_part().to_complex().re <= 0.0 {
            return Err(Error::Invalid(format!("dilation factor must be positive, got {rho}")));
        }
        Ok(Primitive::Dilation(rho))
    }
}

/// A word of primitives, applied first to last. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConformalMap {
    pub word: Vec<Primitive>,
}

impl ConformalMap {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(p: Primitive) -> Self {
        ConformalMap { word: vec![p] }
    }

    /// `self` followed by `next`.
    pub fn then(mut self, next: &ConformalMap) -> Self {
        self.word.extend(next.word.iter().cloned());
        self
    }
}

/// Special conformal transformation as the word I_w T(c') I_w with
/// c' = (c0, -c_vec); the reflection undoes the one inside I_w.
pub fn special_conformal(c: &MinkowskiPoint<Scalar>) -> ConformalMap {
    let reflected = MinkowskiPoint {
        comps: c.comps.iter().enumerate().map(|(k, v)| if k == 0 { v.clone() } else { -v }).collect(),
    };
    ConformalMap { word: vec![Primitive::WeylInversion, Primitive::Translation(reflected), Primitive::WeylInversion] }
}

/// x -> (x + c x^2) / (1 + 2 cx + c^2 x^2).
pub fn special_conformal_point(
    c: &MinkowskiPoint<Scalar>,
    x: &MinkowskiPoint<Scalar>,
) -> Result<MinkowskiPoint<Scalar>> {
    let x2 = x.square();
    let den = Scalar::one() + Scalar::int(2) * c.dot(x) + c.square() * x2.clone();
    if den.is_zero() {
        return Err(Error::PointAtInfinity(1));
    }
    let num = x + &c.scale(&x2);
    Ok(num.scale(&(Scalar::one() / den)))
}

fn point_from_matrix(m: &Matrix2<Scalar>, dim: Dim) -> MinkowskiPoint<Scalar> {
    let h = Scalar::ratio(1, 2);
    let x0 = (m.at(0, 0) + m.at(1, 1)) * h.clone();
    let x3 = (m.at(0, 0) - m.at(1, 1)) * h.clone();
    let x1 = (m.at(0, 1) + m.at(1, 0)) * h.clone();
    match dim {
        Dim::Three => MinkowskiPoint { comps: vec![x0, x1, x3] },
        Dim::Four => {
            let x2 = (m.at(1, 0) - m.at(0, 1)) * h / Scalar::i();
            MinkowskiPoint { comps: vec![x0, x1, x2, x3] }
        }
    }
}

fn apply_primitive(p: &Primitive, f: &Frame<Scalar>) -> Result<Frame<Scalar>> {
    let dim = f.dim();
    let mut out = Vec::with_capacity(f.len());
    for (k, s) in f.slots().iter().enumerate() {
        let (x, l, lb) = (&s.x, &s.lambda.c, &s.lambda_bar.c);
        let slot = match p {
            Primitive::Translation(a) => {
                if a.dim() != dim {
                    return Err(Error::WrongDimension { expected: dim.n(), got: a.comps.len() });
                }
                Slot::new(x + a, l.clone(), lb.clone())
            }
            Primitive::Lorentz(a) => {
                if dim == Dim::Three && !a.m.iter().flatten().all(Scalar::is_real) {
                    return Err(Error::Invalid("3D Lorentz matrices must be real".into()));
                }
                let ad = a.dagger();
                let xm = &(a * &slash(x, Variant::Tilde)) * &ad;
                let ainv = a.inverse()?;
                let adinv = ad.inverse()?;
                Slot::new(point_from_matrix(&xm, dim), ainv.left(l), adinv.right(lb))
            }
            Primitive::Dilation(rho) => {
                let r = rho.sqrt()?;
                let sc = |v: &[Scalar; 2]| [&v[0] * &r, &v[1] * &r];
                Slot::new(x.scale(rho), sc(l), sc(lb))
            }
            Primitive::WeylInversion => {
                let x2 = x.square();
                if x2.is_zero() {
                    return Err(Error::PointAtInfinity(k + 1));
                }
                let inv = Scalar::one() / x2;
                let xt = slash(x, Variant::Tilde).scale(&inv);
                let refl = x.comps.iter().enumerate().map(|(c, v)| if c == 0 { v * &inv } else { -(v * &inv) });
                Slot::new(MinkowskiPoint { comps: refl.collect() }, xt.left(l), xt.right(lb))
            }
        };
        out.push(slot);
    }
    Frame::new(dim, out)
}

/// Apply the word to every slot of the frame.
pub fn act_frame(map: &ConformalMap, frame: &Frame<Scalar>) -> Result<Frame<Scalar>> {
    let mut f = frame.clone();
    for p in &map.word {
        f = apply_primitive(p, &f)?;
    }
    Ok(f)
}

/// Quantities whose conformal behaviour can be probed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantQuantity {
    P(usize, usize),
    L(usize, usize, usize),
    Rl(usize),
    Identity(IdentityId),
}

pub fn quantity_value(q: InvariantQuantity, f: &Frame<Scalar>) -> Result<Scalar> {
    match q {
        InvariantQuantity::P(i, j) => p_inv(f, i, j),
        InvariantQuantity::L(k, i, j) => l_inv(f, k, i, j),
        InvariantQuantity::Rl(i) => rl_inv(f, i),
        InvariantQuantity::Identity(id) => check_identity(id, f),
    }
}

/// value(map(frame)) - value(frame).
pub fn invariance_residual(map: &ConformalMap, q: InvariantQuantity, frame: &Frame<Scalar>) -> Result<Scalar> {
    let after = quantity_value(q, &act_frame(map, frame)?)?;
    Ok(after - quantity_value(q, frame)?)
}

/// RL_i3(map(frame)) - w * RL_i3(frame), where the weight w collects 1/rho
/// per dilation and -x_3^2 per inversion (x_3 taken just before it).
pub fn rl_covariance_residual(map: &ConformalMap, i: usize, frame: &Frame<Scalar>) -> Result<Scalar> {
    let mut f = frame.clone();
    let mut w = Scalar::one();
    for p in &map.word {
        match p {
            Primitive::Dilation(rho) => w = w / rho.clone(),
            Primitive::WeylInversion => {
                f.require_arity(3)?;
                w = w * -f.x(2).square();
            }
            _ => {}
        }
        f = apply_primitive(p, &f)?;
    }
    Ok(rl_inv(&f, i)? - w * rl_inv(frame, i)?)
}

/// omega_a -> (x^2)^-2 V_a^b omega_b in the (+, -, 0) basis, with V the
/// matrix induced by lambda -> lambda x~/x^2 (y = x1 + i x2, x_pm = x0 +- x3).
pub fn omega_inversion(x: &MinkowskiPoint<Scalar>, w: &OmegaTensor<Scalar>) -> Result<OmegaTensor<Scalar>> {
    apply_v(&v_matrix(x, false)?, x, w)
}

/// The same law with the matrix exactly as printed (y and ybar exchanged).
pub fn omega_inversion_printed(x: &MinkowskiPoint<Scalar>, w: &OmegaTensor<Scalar>) -> Result<OmegaTensor<Scalar>> {
    apply_v(&v_matrix(x, true)?, x, w)
}

fn apply_v(v: &[[Scalar; 3]; 3], x: &MinkowskiPoint<Scalar>, w: &OmegaTensor<Scalar>) -> Result<OmegaTensor<Scalar>> {
    let x2 = x.square();
    if x2.is_zero() {
        return Err(Error::PointAtInfinity(1));
    }
    let s = Scalar::one() / (&x2 * &x2);
    let c = w.as_array();
    let row = |r: &[Scalar; 3]| (&r[0] * &c[0] + &r[1] * &c[1] + &r[2] * &c[2]) * s.clone();
    Ok(OmegaTensor { plus: row(&v[0]), minus: row(&v[1]), zero: row(&v[2]) })
}

/// Rows V_+, V_-, V_0 acting on (omega_+, omega_-, omega_0).
pub fn v_matrix(x: &MinkowskiPoint<Scalar>, printed: bool) -> Result<[[Scalar; 3]; 3]> {
    if x.dim() != Dim::Four {
        return Err(Error::WrongDimension { expected: 4, got: x.comps.len() });
    }
    let c = &x.comps;
    let xp = &c[0] + &c[3];
    let xm = &c[0] - &c[3];
    let mut y = &c[1] + &(Scalar::i() * c[2].clone());
    let mut yb = &c[1] - &(Scalar::i() * c[2].clone());
    if printed {
        std::mem::swap(&mut y, &mut yb);
    }
    let two = Scalar::int(2);
    Ok([
        [&xp * &xp, &y * &y, &two * &(&xp * &y)],
        [&yb * &yb, &xm * &xm, &two * &(&yb * &xm)],
        [&yb * &xp, &y * &xm, &xp * &xm + &y * &yb],
    ])
}

/// Transformation labels of a field: spins (s1, s2) stored doubled and the
/// scale dimension d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldLabel {
    pub two_s1: u32,
    pub two_s2: u32,
    pub d: Scalar,
}

impl FieldLabel {
    pub fn new(two_s1: u32, two_s2: u32, d: Scalar) -> Self {
        FieldLabel { two_s1, two_s2, d }
    }

    /// t = d - s1 - s2.
    pub fn twist(&self) -> Scalar {
        &self.d - &Scalar::ratio((self.two_s1 + self.two_s2) as i64, 2)
    }

    pub fn with_d(&self, d: Scalar) -> Self {
        FieldLabel { d, ..self.clone() }
    }
}

/// Which of the two equivalent printed forms of the generator to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorForm {
    /// x^2 d_mu - 2 x_mu (x d + d) - (lambda sigma_{mu nu} x^nu d_lambda + c.c.).
    Sigma,
    /// x^2 d_mu - 2 x_mu (x d + t) - (lambda tilde_sigma_mu (x sigma) d_lambda + c.c.).
    Twist,
}

/// First derivatives of a correlator at a frame with respect to every
/// coordinate and spinor component.
pub struct Gradient {
    pub value: Scalar,
    dual: Dual<Scalar>,
}

const PER_SLOT: u32 = 8;

fn x_slot(i: usize, k: usize) -> SlotId {
    SlotId(PER_SLOT * i as u32 + k as u32)
}
fn l_slot(i: usize, a: usize) -> SlotId {
    SlotId(PER_SLOT * i as u32 + 4 + a as u32)
}
fn lb_slot(i: usize, a: usize) -> SlotId {
    SlotId(PER_SLOT * i as u32 + 6 + a as u32)
}

impl Gradient {
    pub fn dx(&self, i: usize, k: usize) -> Scalar {
        self.dual.partial(x_slot(i, k))
    }
    pub fn dl(&self, i: usize, a: usize) -> Scalar {
        self.dual.partial(l_slot(i, a))
    }
    pub fn dlb(&self, i: usize, a: usize) -> Scalar {
        self.dual.partial(lb_slot(i, a))
    }
}

/// Every coordinate and spinor component of the frame as an independent
/// first-order variable (lambda_bar independent of lambda).
pub fn lift_all(frame: &Frame<Scalar>) -> Frame<Dual<Scalar>> {
    let slots = frame
        .slots()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let x = s.x.comps.iter().enumerate().map(|(k, c)| Dual::variable(c.clone(), x_slot(i, k))).collect();
            let l = [0, 1].map(|a| Dual::variable(s.lambda.c[a].clone(), l_slot(i, a)));
            let lb = [0, 1].map(|a| Dual::variable(s.lambda_bar.c[a].clone(), lb_slot(i, a)));
            Slot::new(MinkowskiPoint { comps: x }, l, lb)
        })
        .collect();
    Frame::new(frame.dim(), slots).expect("lifting preserves structure")
}

pub fn gradient(id: &CorrelatorId, frame: &Frame<Scalar>) -> Result<Gradient> {
    let dual = evaluate(id, &lift_all(frame))?;
    Ok(Gradient { value: dual.value().clone(), dual })
}

/// sum_i C_mu^(i) applied to the correlator, using the requested form.
pub fn generator_residual_form(
    id: &CorrelatorId,
    mu: usize,
    frame: &Frame<Scalar>,
    labels: &[FieldLabel],
    form: GeneratorForm,
) -> Result<Scalar> {
    frame.require_dim(Dim::Four)?;
    if mu > 3 {
        return Err(Error::BadIndex { index: mu, dim: 4 });
    }
    if labels.len() != frame.len() {
        return Err(Error::WrongArity { expected: frame.len(), got: labels.len() });
    }
    let g = gradient(id, frame)?;
    let two = Scalar::int(2);
    let mut acc = Scalar::zero();
    for (i, lab) in labels.iter().enumerate() {
        let x = frame.x(i);
        let x_mu = &x.comps[mu] * &Scalar::int(metric(mu));
        let euler = (0..4).fold(Scalar::zero(), |a, k| a + &x.comps[k] * &g.dx(i, k));
        let gl = [g.dl(i, 0), g.dl(i, 1)];
        let glb = [g.dlb(i, 0), g.dlb(i, 1)];
        let (weight, m) = match form {
            GeneratorForm::Sigma => {
                let mut m = Matrix2::zero();
                for nu in 0..4 {
                    if nu != mu {
                        m = &m + &sigma_mn::<Scalar>(mu, nu, Dotting::Undotted)?.scale(&x.comps[nu]);
                    }
                }
                (lab.d.clone(), m)
            }
            GeneratorForm::Twist => {
                let t = crate::spinor::pauli::<Scalar>(mu, Variant::Tilde, Dim::Four)?;
                (lab.twist(), &t * &slash(x, Variant::Plain))
            }
        };
        let spin = m.sandwich(frame.lam(i), &gl) + m.conj().sandwich(frame.lam_bar(i), &glb);
        acc = acc + x.square() * g.dx(i, mu) - &two * &(x_mu * (euler + &weight * &g.value)) - spin;
    }
    Ok(acc)
}

/// sum_i C_mu^(i) in the sigma_{mu nu} form.
pub fn generator_residual(
    id: &CorrelatorId,
    mu: usize,
    frame: &Frame<Scalar>,
    labels: &[FieldLabel],
) -> Result<Scalar> {
    generator_residual_form(id, mu, frame, labels, GeneratorForm::Sigma)
}

/// sum_i d/dx_i^mu (translation generator).
pub fn translation_residual(id: &CorrelatorId, mu: usize, frame: &Frame<Scalar>) -> Result<Scalar> {
    let g = gradient(id, frame)?;
    let k = frame.dim().position(mu)?;
    Ok((0..frame.len()).fold(Scalar::zero(), |a, i| a + g.dx(i, k)))
}

/// Conformal map in its JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum PrimitiveJson {
    Translate {
        a: Vec<String>,
    },
    Lorentz {
        #[serde(rename = "A")]
        a: [[String; 2]; 2],
    },
    Dilate {
        rho: String,
    },
    Inversion,
}

impl PrimitiveJson {
    pub fn to_primitive(&self) -> Result<Primitive> {
        let parse = |s: &str| s.parse::<Scalar>();
        match self {
            PrimitiveJson::Translate { a } => {
                Ok(Primitive::Translation(MinkowskiPoint::new(a.iter().map(|s| parse(s)).collect::<Result<_>>()?)?))
            }
            PrimitiveJson::Lorentz { a } => {
                let m = Matrix2::new(parse(&a[0][0])?, parse(&a[0][1])?, parse(&a[1][0])?, parse(&a[1][1])?);
                Primitive::lorentz(m)
            }
            PrimitiveJson::Dilate { rho } => Primitive::dilation(parse(rho)?),
            PrimitiveJson::Inversion => Ok(Primitive::WeylInversion),
        }
    }
}

pub fn map_from_json(ops: &[PrimitiveJson]) -> Result<ConformalMap> {
    Ok(ConformalMap { word: ops.iter().map(PrimitiveJson::to_primitive).collect::<Result<_>>()? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{random_frame, random_point};
    use crate::invariants::omega;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn double_inversion_negates_spinors() {
        let f = random_frame(&mut rng(1), Dim::Four, 3, 20);
        let m = ConformalMap { word: vec![Primitive::WeylInversion, Primitive::WeylInversion] };
        let g = act_frame(&m, &f).unwrap();
        for i in 0..3 {
            assert_eq!(g.x(i), f.x(i));
            assert_eq!(g.lam(i), &[-f.lam(i)[0].clone(), -f.lam(i)[1].clone()]);
            assert_eq!(g.lam_bar(i), &[-f.lam_bar(i)[0].clone(), -f.lam_bar(i)[1].clone()]);
        }
    }

    #[test]
    fn translation_inverse() {
        let mut r = rng(2);
        let f = random_frame(&mut r, Dim::Four, 2, 20);
        let a = random_point(&mut r, Dim::Four, 20);
        let m = ConformalMap { word: vec![Primitive::Translation(a.clone()), Primitive::Translation(-&a)] };
        assert_eq!(act_frame(&m, &f).unwrap(), f);
        assert_eq!(act_frame(&ConformalMap::identity(), &f).unwrap(), f);
    }

    #[test]
    fn lorentz_requires_unit_determinant() {
        let m = Matrix2::new(Scalar::int(2), Scalar::zero(), Scalar::zero(), Scalar::one());
        assert_eq!(Primitive::lorentz(m), Err(Error::NotUnimodular));
    }

    #[test]
    fn dilation_needs_perfect_square() {
        let f = random_frame(&mut rng(3), Dim::Four, 2, 20);
        let m = ConformalMap::single(Primitive::dilation(Scalar::int(2)).unwrap());
        assert!(matches!(act_frame(&m, &f), Err(Error::NotPerfectSquare(_))));
        let m = ConformalMap::single(Primitive::dilation(Scalar::int(4)).unwrap());
        assert!(act_frame(&m, &f).is_ok());
    }

    #[test]
    fn special_conformal_word_matches_rational_map() {
        let mut r = rng(4);
        for _ in 0..20 {
            let c = random_point(&mut r, Dim::Four, 10);
            let f = random_frame(&mut r, Dim::Four, 1, 10);
            let g = act_frame(&special_conformal(&c), &f).unwrap();
            assert_eq!(g.x(0), &special_conformal_point(&c, f.x(0)).unwrap());
        }
        let c = random_point(&mut r, Dim::Four, 10);
        let zero = MinkowskiPoint::zero(Dim::Four);
        assert_eq!(special_conformal_point(&c, &zero).unwrap(), zero);
    }

    #[test]
    fn printed_v_disagrees_with_spinor_law() {
        let f = random_frame(&mut rng(5), Dim::Four, 1, 20);
        let w = omega(&f, 0).unwrap();
        let a = omega_inversion(f.x(0), &w).unwrap();
        let b = omega_inversion_printed(f.x(0), &w).unwrap();
        assert_ne!(a, b);
        assert_eq!(b.isotropy(), Scalar::zero());
    }
}
