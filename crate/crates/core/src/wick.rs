//! Wick contractions of generalized free fields built from a 2-point kernel.

use crate::correlators::delta_plus;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::invariants::p_inv;
use crate::scalar::Scalar;
use crate::spinor::Dim;

/// Upper limit on insertions (normal-ordered groups).
pub const MAX_INSERTIONS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// Free massless scalar: Delta^+.
    Delta,
    /// Twist-one chiral field of spin s: P^(2s) / rho^2.
    Chiral { two_s: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistics {
    Bose,
    Fermi,
}

/// Free field species: kernel and number of flavors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GffSpec {
    pub kernel: Kernel,
    pub flavors: u32,
}

impl GffSpec {
    pub fn new(kernel: Kernel, flavors: u32) -> Result<Self> {
        if flavors == 0 {
            return Err(Error::Invalid("flavor count must be at least 1".into()));
        }
        Ok(GffSpec { kernel, flavors })
    }

    pub fn statistics(&self) -> Statistics {
        match self.kernel {
            Kernel::Chiral { two_s } if two_s % 2 == 1 => Statistics::Fermi,
            _ => Statistics::Bose,
        }
    }

    /// Contraction of phi at slot a with phi* at slot b: phi carries
    /// lambda_a, phi* carries lambda_bar_b. The regulated Delta^+ runs from
    /// the left operator to the right one (`a_left`).
    fn kernel(&self, f: &Frame<Scalar>, a: usize, b: usize, a_left: bool) -> Result<Scalar> {
        match self.kernel {
            Kernel::Delta if a_left => delta_plus(f, a, b),
            Kernel::Delta => delta_plus(f, b, a),
            Kernel::Chiral { two_s } => Ok(p_inv(f, a, b)?.powi(two_s as i32) / f.rho2(a, b)?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegKind {
    Phi,
    PhiStar,
}

/// One field operator at a frame slot, inside normal-ordered group `group`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Leg {
    pub kind: LegKind,
    pub slot: usize,
    pub group: usize,
}

/// A normal-ordered insertion: either sum_c :phi_c*(conj) phi_c(field): or a
/// single field of flavor 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    Bilinear { conj: usize, field: usize },
    Phi(usize),
    PhiStar(usize),
}

/// A complete charge-respecting contraction: `pairs[k] = (phi leg, phi* leg)`
/// as indices into the leg list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPattern {
    pub pairs: Vec<(usize, usize)>,
    pub sign: i64,
    /// Closed flavor loops (each contributes one factor m).
    pub loops: u32,
}

fn legs_of(ins: &[Insertion]) -> Vec<Leg> {
    let mut legs = Vec::new();
    for (g, i) in ins.iter().enumerate() {
        match *i {
            Insertion::Bilinear { conj, field } => {
                legs.push(Leg { kind: LegKind::PhiStar, slot: conj, group: g });
                legs.push(Leg { kind: LegKind::Phi, slot: field, group: g });
            }
            Insertion::Phi(s) => legs.push(Leg { kind: LegKind::Phi, slot: s, group: g }),
            Insertion::PhiStar(s) => legs.push(Leg { kind: LegKind::PhiStar, slot: s, group: g }),
        }
    }
    legs
}

fn parity(p: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

/// Every matching of phi* legs with phi legs from other groups.
pub fn contraction_patterns(ins: &[Insertion], stats: Statistics) -> Vec<ContractionPattern> {
    let legs = legs_of(ins);
    let stars: Vec<usize> = (0..legs.len()).filter(|&k| legs[k].kind == LegKind::PhiStar).collect();
    let phis: Vec<usize> = (0..legs.len()).filter(|&k| legs[k].kind == LegKind::Phi).collect();
    if stars.len() != phis.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut used = vec![false; phis.len()];
    let mut cur = Vec::new();
    search(&legs, &stars, &phis, &mut used, &mut cur, stats, ins, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    legs: &[Leg],
    stars: &[usize],
    phis: &[usize],
    used: &mut [bool],
    cur: &mut Vec<(usize, usize)>,
    stats: Statistics,
    ins: &[Insertion],
    out: &mut Vec<ContractionPattern>,
) {
    let k = cur.len();
    if k == stars.len() {
        let order: Vec<usize> = cur.iter().flat_map(|&(p, s)| [p, s]).collect();
        let sign = match stats {
            Statistics::Bose => 1,
            Statistics::Fermi => parity(&order),
        };
        let mut parent: Vec<usize> = (0..legs.len()).collect();
        for (a, b) in cur.iter() {
            let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
            parent[ra] = rb;
        }
        for j in 0..legs.len() {
            for l in j + 1..legs.len() {
                if legs[j].group == legs[l].group {
                    let (ra, rb) = (find(&mut parent, j), find(&mut parent, l));
                    parent[ra] = rb;
                }
            }
        }
        let mut open = vec![false; legs.len()];
        for (j, leg) in legs.iter().enumerate() {
            if !matches!(ins[leg.group], Insertion::Bilinear { .. }) {
                let r = find(&mut parent, j);
                open[r] = true;
            }
        }
        let mut loops = 0;
        for j in 0..legs.len() {
            if find(&mut parent, j) == j && !open[j] {
                loops += 1;
            }
        }
        out.push(ContractionPattern { pairs: cur.clone(), sign, loops });
        return;
    }
    let s = stars[k];
    for (pi, &p) in phis.iter().enumerate() {
        if used[pi] || legs[p].group == legs[s].group {
            continue;
        }
        used[pi] = true;
        cur.push((p, s));
        search(legs, stars, phis, used, cur, stats, ins, out);
        cur.pop();
        used[pi] = false;
    }
}

/// Vacuum expectation of the product of insertions (in the given operator
/// order) by Wick's theorem.
pub fn wick_npoint(spec: &GffSpec, ins: &[Insertion], f: &Frame<Scalar>) -> Result<Scalar> {
    if ins.len() > MAX_INSERTIONS {
        return Err(Error::TooManyInsertions { got: ins.len(), limit: MAX_INSERTIONS });
    }
    for i in ins {
        let slots = match *i {
            Insertion::Bilinear { conj, field } => vec![conj, field],
            Insertion::Phi(s) | Insertion::PhiStar(s) => vec![s],
        };
        for s in slots {
            if s >= f.len() {
                return Err(Error::BadIndex { index: s, dim: f.len() });
            }
        }
    }
    let legs = legs_of(ins);
    let m = Scalar::int(spec.flavors as i64);
    let mut total = Scalar::zero();
    for pat in contraction_patterns(ins, spec.statistics()) {
        let mut term = Scalar::int(pat.sign) * m.powi(pat.loops as i32);
        for &(p, s) in &pat.pairs {
            term = term * spec.kernel(f, legs[p].slot, legs[s].slot, p < s)?;
        }
        total = total + term;
    }
    Ok(total)
}

/// <W(1,2) W(3,4)> with W(x, y) = sum_c :phi_c*(x) phi_c(y): for the free
/// massless scalar; equals m Delta14 Delta23.
pub fn bilocal_4pt(m: u32, f: &Frame<Scalar>) -> Result<Scalar> {
    f.require_arity(4)?;
    f.require_dim(Dim::Four)?;
    let spec = GffSpec::new(Kernel::Delta, m)?;
    let ins = [Insertion::Bilinear { conj: 0, field: 1 }, Insertion::Bilinear { conj: 2, field: 3 }];
    wick_npoint(&spec, &ins, f)
}

/// <J(1) J(2) J(3)> for J = :phi*(x, lambda_bar) phi(x, lambda): built from
/// the spin-s chiral kernel (one flavor).
pub fn bilinear_current_3pt(two_s: u32, f: &Frame<Scalar>) -> Result<Scalar> {
    f.require_arity(3)?;
    f.require_dim(Dim::Four)?;
    f.check_separations()?;
    let spec = GffSpec::new(Kernel::Chiral { two_s }, 1)?;
    let ins: Vec<Insertion> = (0..3).map(|i| Insertion::Bilinear { conj: i, field: i }).collect();
    wick_npoint(&spec, &ins, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::random_frame;
    use rand::SeedableRng;

    #[test]
    fn two_bilinears_have_one_pattern() {
        let ins = [Insertion::Bilinear { conj: 0, field: 1 }, Insertion::Bilinear { conj: 2, field: 3 }];
        let p = contraction_patterns(&ins, Statistics::Bose);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].loops, 1);
    }

    #[test]
    fn three_bilinears_give_two_chains() {
        let ins: Vec<_> = (0..3).map(|i| Insertion::Bilinear { conj: i, field: i }).collect();
        let p = contraction_patterns(&ins, Statistics::Fermi);
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|c| c.sign == -1 && c.loops == 1));
    }

    #[test]
    fn unbalanced_legs_vanish() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = random_frame(&mut rng, Dim::Four, 3, 10);
        let spec = GffSpec::new(Kernel::Delta, 1).unwrap();
        let ins = [Insertion::Bilinear { conj: 0, field: 1 }, Insertion::Phi(2)];
        assert_eq!(wick_npoint(&spec, &ins, &f).unwrap(), Scalar::zero());
    }

    #[test]
    fn insertion_limit() {
        let f = random_frame(&mut rand_chacha::ChaCha8Rng::seed_from_u64(4), Dim::Four, 2, 10);
        let spec = GffSpec::new(Kernel::Delta, 1).unwrap();
        let ins = vec![Insertion::Phi(0); 7];
        assert_eq!(wick_npoint(&spec, &ins, &f), Err(Error::TooManyInsertions { got: 7, limit: 6 }));
    }

    #[test]
    fn open_chain_has_no_flavor_factor() {
        let f = random_frame(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5), Dim::Four, 3, 10);
        let spec = GffSpec::new(Kernel::Delta, 5).unwrap();
        let ins = [Insertion::Phi(0), Insertion::Bilinear { conj: 1, field: 2 }, Insertion::PhiStar(0)];
        let ins_fixed = [Insertion::Phi(0), Insertion::PhiStar(1)];
        let v = wick_npoint(&spec, &ins, &f).unwrap();
        // phi(0) with phi*(1), phi(2) with phi*(0): no loop.
        let want = delta_plus(&f, 0, 1).unwrap() * delta_plus(&f, 2, 0).unwrap();
        assert_eq!(v, want);
        let g = f.to_float();
        let v = wick_npoint(&spec, &ins, &g).unwrap();
        let want = delta_plus(&g, 0, 1).unwrap() * delta_plus(&g, 2, 0).unwrap();
        assert_eq!(v, want);
        assert_eq!(wick_npoint(&spec, &ins_fixed, &f).unwrap(), delta_plus(&f, 0, 1).unwrap());
    }
}
