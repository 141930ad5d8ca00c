//! Matrix identities of the spinor calculus, contracted with sample vectors
//! and spinors so that one scalar residual summarizes each identity.

use crate::invariants::worst;
use crate::scalar::{sum, Scalar};
use crate::spinor::{
    dot2, eps_pair, gamma3, hodge_star, sigma_mn, skew_decompose, skew_reconstruct, slash, Dim, Dotting, Matrix2,
    MinkowskiPoint, Position, SkewTensor4, Variant,
};

fn entries(m: &Matrix2<Scalar>) -> Vec<Scalar> {
    m.m.iter().flatten().cloned().collect()
}

/// Exchange relations contracted with a^mu b^nu:
/// a~ b + b~ a = 2 ab and a b~ + b a~ = 2 ab (b = b^mu sigma_mu).
pub fn exchange_residual(a: &MinkowskiPoint<Scalar>, b: &MinkowskiPoint<Scalar>) -> Scalar {
    let ab2 = Matrix2::identity().scale(&(Scalar::int(2) * a.dot(b)));
    let (at, bt) = (slash(a, Variant::Tilde), slash(b, Variant::Tilde));
    let (ap, bp) = (slash(a, Variant::Plain), slash(b, Variant::Plain));
    let und = &(&(&at * &bp) + &(&bt * &ap)) - &ab2;
    let dot = &(&(&ap * &bt) + &(&bp * &at)) - &ab2;
    worst(entries(&und).into_iter().chain(entries(&dot)))
}

/// Exchange relations tilde_sigma_mu sigma^nu + tilde_sigma^nu sigma_mu = 2 delta_mu^nu
/// checked entrywise for every index pair.
pub fn exchange_basis_residual(dim: Dim) -> Scalar {
    use crate::spinor::pauli_at;
    let mut out = Vec::new();
    for k in 0..dim.n() {
        for l in 0..dim.n() {
            let (mu, nu) = (dim.label(k), dim.label(l));
            let t_lo = pauli_at::<Scalar>(mu, Variant::Tilde, Position::Lower, dim).unwrap();
            let t_up = pauli_at::<Scalar>(nu, Variant::Tilde, Position::Upper, dim).unwrap();
            let p_up = pauli_at::<Scalar>(nu, Variant::Plain, Position::Upper, dim).unwrap();
            let p_lo = pauli_at::<Scalar>(mu, Variant::Plain, Position::Lower, dim).unwrap();
            let delta = if k == l { Matrix2::identity().scale(&Scalar::int(2)) } else { Matrix2::zero() };
            out.extend(entries(&(&(&(&t_lo * &p_up) + &(&t_up * &p_lo)) - &delta)));
            out.extend(entries(&(&(&(&p_lo * &t_up) + &(&p_up * &t_lo)) - &delta)));
        }
    }
    worst(out)
}

/// Duality of the Lorentz generators contracted with a^mu b^nu, for the
/// given value of eps^{0123}. With orientation +1 the undotted generators
/// satisfy *sigma = -i sigma and the dotted *tilde = +i tilde; `sign` = +1
/// checks that form, `sign` = -1 the opposite assignment.
pub fn star_residual_with(
    a: &MinkowskiPoint<Scalar>,
    b: &MinkowskiPoint<Scalar>,
    orientation: i64,
    sign: i64,
) -> Scalar {
    let mut und = Matrix2::zero();
    let mut dot = Matrix2::zero();
    let i = Scalar::i() * Scalar::int(sign);
    for mu in 0..4 {
        for nu in 0..4 {
            let c = &a.comps[mu] * &b.comps[nu];
            if c.is_zero() {
                continue;
            }
            let su = |m, n| sigma_mn::<Scalar>(m, n, Dotting::Undotted).unwrap();
            let sd = |m, n| sigma_mn::<Scalar>(m, n, Dotting::Dotted).unwrap();
            let ru = &hodge_star(su, mu, nu, orientation) + &su(mu, nu).scale(&i);
            let rd = &hodge_star(sd, mu, nu, orientation) - &sd(mu, nu).scale(&i);
            und = &und + &ru.scale(&c);
            dot = &dot + &rd.scale(&c);
        }
    }
    worst(entries(&und).into_iter().chain(entries(&dot)))
}

/// Duality residual under the adopted orientation eps^{0123} = 1.
pub fn star_residual(a: &MinkowskiPoint<Scalar>, b: &MinkowskiPoint<Scalar>) -> Scalar {
    star_residual_with(a, b, 1, 1)
}

/// 3D Clifford relation contracted with a_mu b^nu:
/// a_mu b^nu (gamma^mu gamma_nu + gamma_nu gamma^mu) = 2 (a b).
pub fn clifford3_residual(a: &MinkowskiPoint<Scalar>, b: &MinkowskiPoint<Scalar>) -> Scalar {
    let al = a.lower();
    let mut acc = Matrix2::zero();
    for k in 0..3 {
        for l in 0..3 {
            let c = &al[k] * &b.comps[l];
            let (mu, nu) = (Dim::Three.label(k), Dim::Three.label(l));
            let gu = gamma3::<Scalar>(mu, Position::Upper).unwrap();
            let gl = gamma3::<Scalar>(nu, Position::Lower).unwrap();
            acc = &acc + &(&(&gu * &gl) + &(&gl * &gu)).scale(&c);
        }
    }
    let rhs = Matrix2::identity().scale(&(Scalar::int(2) * a.dot(b)));
    worst(entries(&(&acc - &rhs)))
}

/// 3D completeness relation contracted with four spinors:
/// sum_mu (u gamma^mu v)(w gamma_mu z) = (u z)(w v) + (u eps w)(z eps v).
pub fn gog_residual(s: [&[Scalar; 2]; 4]) -> Scalar {
    let [u, v, w, z] = s;
    let lhs = sum((0..3).map(|k| {
        let mu = Dim::Three.label(k);
        let gu = gamma3::<Scalar>(mu, Position::Upper).unwrap();
        let gl = gamma3::<Scalar>(mu, Position::Lower).unwrap();
        gu.sandwich(u, v) * gl.sandwich(w, z)
    }));
    lhs - (dot2(u, z) * dot2(w, v) + eps_pair(u, w) * eps_pair(z, v))
}

/// Skew tensor F = a^b + c^d (lower components) decomposed and rebuilt:
/// worst of the round-trip error, the traces, and the antisymmetric parts of
/// F eps for both chiral halves.
pub fn fab_residual(p: [&MinkowskiPoint<Scalar>; 4]) -> Scalar {
    let v: Vec<Vec<Scalar>> = p.iter().map(|x| x.lower()).collect();
    let mut f: [[Scalar; 4]; 4] = Default::default();
    for (m, row) in f.iter_mut().enumerate() {
        for (n, e) in row.iter_mut().enumerate() {
            *e = &v[0][m] * &v[1][n] - &v[0][n] * &v[1][m] + &v[2][m] * &v[3][n] - &v[2][n] * &v[3][m];
        }
    }
    let t = match SkewTensor4::new(f.clone()) {
        Ok(t) => t,
        Err(_) => return Scalar::one(),
    };
    let (und, dot) = skew_decompose(&t);
    let back = skew_reconstruct(&und, &dot);
    let mut out: Vec<Scalar> =
        (0..4).flat_map(|m| (0..4).map(move |n| (m, n))).map(|(m, n)| &back[m][n] - &f[m][n]).collect();
    let eps = Matrix2::<Scalar>::epsilon();
    for h in [&und, &dot] {
        out.push(h.trace());
        let r = h * &eps;
        out.push(r.at(0, 1) - r.at(1, 0));
    }
    worst(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::random_point;
    use rand::SeedableRng;

    #[test]
    fn exchange_holds_for_every_index_pair() {
        assert_eq!(exchange_basis_residual(Dim::Four), Scalar::zero());
        assert_eq!(exchange_basis_residual(Dim::Three), Scalar::zero());
    }

    #[test]
    fn printed_exchange_form_fails_off_diagonal() {
        use crate::spinor::pauli_at;
        let d = Dim::Four;
        let t0 = pauli_at::<Scalar>(0, Variant::Tilde, Position::Lower, d).unwrap();
        let t1 = pauli_at::<Scalar>(1, Variant::Tilde, Position::Lower, d).unwrap();
        let p0 = pauli_at::<Scalar>(0, Variant::Plain, Position::Upper, d).unwrap();
        let p1 = pauli_at::<Scalar>(1, Variant::Plain, Position::Upper, d).unwrap();
        assert!(!(&(&t0 * &p1) + &(&t1 * &p0)).is_zero());
    }

    #[test]
    fn duality_sign_depends_on_orientation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = random_point(&mut rng, Dim::Four, 20);
        let b = random_point(&mut rng, Dim::Four, 20);
        assert_eq!(star_residual(&a, &b), Scalar::zero());
        assert_eq!(star_residual_with(&a, &b, -1, -1), Scalar::zero());
        assert!(!star_residual_with(&a, &b, 1, -1).is_zero());
    }

    #[test]
    fn clifford_and_completeness() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let a = random_point(&mut rng, Dim::Three, 20);
        let b = random_point(&mut rng, Dim::Three, 20);
        assert_eq!(clifford3_residual(&a, &b), Scalar::zero());
        let sp: Vec<[Scalar; 2]> = (0..4).map(|k| [Scalar::int(k + 1), Scalar::int(2 - 3 * k)]).collect();
        assert_eq!(gog_residual([&sp[0], &sp[1], &sp[2], &sp[3]]), Scalar::zero());
    }
}
