//! Finite Fock model of m free complex scalars over M orthonormal modes, and
//! the determinant-state norms p_n(m).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest determinant order evaluated exactly.
pub const MAX_ORDER: usize = 5;
/// Largest flavor count evaluated exactly.
pub const MAX_FLAVORS: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Tower {
    /// Particle oscillators.
    A,
    /// Antiparticle oscillators.
    B,
}

/// One oscillator label: tower, flavor in 1..=m, mode in 1..=M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Osc {
    pub tower: Tower,
    pub flavor: u32,
    pub mode: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OpKind {
    Annihilate,
    Create,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Op {
    pub kind: OpKind,
    pub osc: Osc,
}

impl Op {
    pub fn create(osc: Osc) -> Self {
        Op { kind: OpKind::Create, osc }
    }

    pub fn annihilate(osc: Osc) -> Self {
        Op { kind: OpKind::Annihilate, osc }
    }
}

/// Occupation numbers; never stores a zero.
pub type Config = BTreeMap<Osc, u32>;

/// Finitely supported vector in the monomial basis
/// prod (c^dagger)^n / 1 |0>, whose squared norm is prod n!.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    amps: BTreeMap<Vec<(Osc, u32)>, Scalar>,
}

fn factorial(n: u32) -> Scalar {
    Scalar::int((1..=n as i64).product())
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        let mut v = FockVector::zero();
        v.amps.insert(Vec::new(), Scalar::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn from_monomial(occ: &Config, amp: Scalar) -> Self {
        let mut v = FockVector::zero();
        v.add_term(occ.iter().map(|(o, n)| (*o, *n)).collect(), amp);
        v
    }

    fn add_term(&mut self, key: Vec<(Osc, u32)>, amp: Scalar) {
        let v = match self.amps.remove(&key) {
            Some(old) => old + amp,
            None => amp,
        };
        if !v.is_zero() {
            self.amps.insert(key, v);
        }
    }

    pub fn add(&self, o: &FockVector) -> FockVector {
        let mut v = self.clone();
        for (k, a) in &o.amps {
            v.add_term(k.clone(), a.clone());
        }
        v
    }

    pub fn scale(&self, c: &Scalar) -> FockVector {
        let mut v = FockVector::zero();
        for (k, a) in &self.amps {
            v.add_term(k.clone(), a * c);
        }
        v
    }

    /// Apply a single oscillator. a^dagger raises n with amplitude 1 in this
    /// basis; a lowers n with amplitude n.
    pub fn apply_op(&self, op: &Op) -> FockVector {
        let mut out = FockVector::zero();
        for (key, amp) in &self.amps {
            let mut occ: Config = key.iter().cloned().collect();
            let n = occ.get(&op.osc).copied().unwrap_or(0);
            let a = match op.kind {
                OpKind::Create => {
                    occ.insert(op.osc, n + 1);
                    amp.clone()
                }
                OpKind::Annihilate => {
                    if n == 0 {
                        continue;
                    }
                    if n == 1 {
                        occ.remove(&op.osc);
                    } else {
                        occ.insert(op.osc, n - 1);
                    }
                    amp * &Scalar::int(n as i64)
                }
            };
            out.add_term(occ.into_iter().collect(), a);
        }
        out
    }

    /// <self|o>, antilinear in self.
    pub fn inner(&self, o: &FockVector) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, a) in &self.amps {
            if let Some(b) = o.amps.get(k) {
                let w = k.iter().fold(Scalar::one(), |w, (_, n)| w * factorial(*n));
                acc = acc + a.conj() * b.clone() * w;
            }
        }
        acc
    }

    pub fn norm2(&self) -> Scalar {
        self.inner(self)
    }
}

/// coefficient * op_1 op_2 ... op_k (rightmost acts first).
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorWord {
    pub coef: Scalar,
    pub ops: Vec<Op>,
}

impl OscillatorWord {
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut w = v.clone();
        for op in self.ops.iter().rev() {
            w = w.apply_op(op);
        }
        w.scale(&self.coef)
    }
}

/// Finite sum of words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Operator {
    pub words: Vec<OscillatorWord>,
}

impl Operator {
    pub fn apply(&self, v: &FockVector) -> FockVector {
        self.words.iter().fold(FockVector::zero(), |acc, w| acc.add(&w.apply(v)))
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }
}

/// X*_{ij} = sum_c a^dagger_{c,i} b^dagger_{c,j} over m flavors and M modes.
pub fn x_creator(i: usize, j: usize, m: u32, modes: usize) -> Result<Operator> {
    for k in [i, j] {
        if k == 0 || k > modes {
            return Err(Error::BadMode { mode: k, modes });
        }
    }
    let words = (1..=m)
        .map(|c| OscillatorWord {
            coef: Scalar::one(),
            ops: vec![
                Op::create(Osc { tower: Tower::A, flavor: c, mode: i as u32 }),
                Op::create(Osc { tower: Tower::B, flavor: c, mode: j as u32 }),
            ],
        })
        .collect();
    Ok(Operator { words })
}

fn check_budget(n: usize, m: u32) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::BudgetExceeded(format!("order n = {n} exceeds {MAX_ORDER}")));
    }
    if m > MAX_FLAVORS {
        return Err(Error::BudgetExceeded(format!("flavor count m = {m} exceeds {MAX_FLAVORS}")));
    }
    Ok(())
}

/// D_n^* |0> = sum_pi sgn(pi) prod_i X*_{i,pi(i)} |0> in a model with
/// `modes` >= n modes. Rows are filled in order; states are shared across
/// permutations through the set of used columns.
pub fn det_state_in(n: usize, m: u32, modes: usize) -> Result<FockVector> {
    check_budget(n, m)?;
    if n > modes {
        return Err(Error::BadMode { mode: n, modes });
    }
    let mut layer: BTreeMap<u32, FockVector> = BTreeMap::new();
    layer.insert(0, FockVector::vacuum());
    for row in 1..=n {
        let mut next: BTreeMap<u32, FockVector> = BTreeMap::new();
        for (used, v) in &layer {
            for col in 1..=n {
                let bit = 1u32 << (col - 1);
                if used & bit != 0 {
                    continue;
                }
                // New inversions: previously used columns larger than col.
                let inv = (used >> col).count_ones();
                let sign = if inv % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
                let w = x_creator(row, col, m, modes)?.apply(v).scale(&sign);
                let slot = next.entry(used | bit).or_default();
                *slot = slot.add(&w);
            }
        }
        layer = next;
    }
    Ok(layer.into_values().next().unwrap_or_default())
}

/// D_n^* |0> with exactly n modes.
pub fn det_state(n: usize, m: u32) -> Result<FockVector> {
    det_state_in(n, m, n.max(1))
}

/// p_n(m) = <0| D_n D_n^* |0>.
pub fn p_value(n: usize, m: u32) -> Result<Scalar> {
    Ok(det_state(n, m)?.norm2())
}

/// m (m - 1) ... (m - n + 1).
pub fn falling_factorial(m: i64, n: usize) -> Scalar {
    Scalar::int((0..n as i64).map(|k| m - k).product())
}

/// Value at `x` of the polynomial through the points (xs[k], ys[k]).
pub fn lagrange_eval(xs: &[i64], ys: &[Scalar], x: i64) -> Scalar {
    let mut acc = Scalar::zero();
    for (k, yk) in ys.iter().enumerate() {
        let mut t = yk.clone();
        for (l, xl) in xs.iter().enumerate() {
            if l != k {
                t = t * Scalar::ratio(x - xl, xs[k] - xl);
            }
        }
        acc = acc + t;
    }
    acc
}

/// Budget for a p_n table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableBudget {
    pub n_max: usize,
    pub m_max: u32,
}

impl Default for TableBudget {
    fn default() -> Self {
        TableBudget { n_max: 4, m_max: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PnEntry {
    pub m: u32,
    pub value: Scalar,
    /// p_n(m) - c_n m (m - 1) ... (m - n + 1).
    pub fit_residual: Scalar,
    /// p_n(m) minus the degree-n interpolant through m = 0..=n.
    pub interpolation_residual: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PnRow {
    pub n: usize,
    /// p_n(n) / n!, the single constant of the falling-factorial form.
    pub c: Scalar,
    pub entries: Vec<PnEntry>,
}

impl PnRow {
    pub fn residuals_vanish(&self) -> bool {
        self.entries.iter().all(|e| e.fit_residual.is_zero() && e.interpolation_residual.is_zero())
    }
}

/// Rows n = 1..=n_max over m = 1..=m_max under the default budget.
pub fn pn_table(n_max: usize, m_max: u32) -> Result<Vec<PnRow>> {
    pn_table_within(n_max, m_max, TableBudget::default())
}

pub fn pn_table_within(n_max: usize, m_max: u32, budget: TableBudget) -> Result<Vec<PnRow>> {
    if n_max > budget.n_max || n_max > MAX_ORDER {
        return Err(Error::BudgetExceeded(format!("n_max = {n_max} exceeds {}", budget.n_max.min(MAX_ORDER))));
    }
    if m_max > budget.m_max || m_max > MAX_FLAVORS {
        return Err(Error::BudgetExceeded(format!("m_max = {m_max} exceeds {}", budget.m_max.min(MAX_FLAVORS))));
    }
    (1..=n_max).into_par_iter().map(|n| pn_row(n, m_max)).collect()
}

fn pn_row(n: usize, m_max: u32) -> Result<PnRow> {
    let top = m_max.max(n as u32 + 1);
    let values: Vec<Scalar> = (0..=top).into_par_iter().map(|m| p_value(n, m)).collect::<Result<_>>()?;
    let c = values[n].clone() / factorial(n as u32);
    let xs: Vec<i64> = (0..=n as i64).collect();
    let entries = (1..=m_max)
        .map(|m| {
            let v = values[m as usize].clone();
            PnEntry {
                m,
                fit_residual: &v - &(&c * &falling_factorial(m as i64, n)),
                interpolation_residual: &v - &lagrange_eval(&xs, &values[..=n], m as i64),
                value: v,
            }
        })
        .collect();
    Ok(PnRow { n, c, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(c: u32, i: u32) -> Osc {
        Osc { tower: Tower::A, flavor: c, mode: i }
    }

    #[test]
    fn ccr_on_single_mode() {
        let v = FockVector::vacuum().apply_op(&Op::create(a(1, 1))).apply_op(&Op::create(a(1, 1)));
        assert_eq!(v.norm2(), Scalar::int(2));
        let w = v.apply_op(&Op::annihilate(a(1, 1)));
        assert_eq!(w.norm2(), Scalar::int(4));
        assert!(FockVector::vacuum().apply_op(&Op::annihilate(a(1, 1))).is_zero());
    }

    #[test]
    fn creators_commute_on_vacuum() {
        let x11 = x_creator(1, 1, 3, 2).unwrap();
        let x12 = x_creator(1, 2, 3, 2).unwrap();
        let v = FockVector::vacuum();
        let d = x11.apply(&x12.apply(&v)).add(&x12.apply(&x11.apply(&v)).scale(&Scalar::int(-1)));
        assert!(d.is_zero());
    }

    #[test]
    fn single_creator_norm_is_flavor_count() {
        for m in 0..5 {
            let v = x_creator(1, 1, m, 1).unwrap().apply(&FockVector::vacuum());
            assert_eq!(v.norm2(), Scalar::int(m as i64));
        }
        assert!(x_creator(1, 1, 0, 1).unwrap().is_zero());
    }

    #[test]
    fn bad_modes() {
        assert_eq!(x_creator(0, 1, 1, 2), Err(Error::BadMode { mode: 0, modes: 2 }));
        assert_eq!(x_creator(1, 3, 1, 2), Err(Error::BadMode { mode: 3, modes: 2 }));
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det_state(1, 4).unwrap(), x_creator(1, 1, 4, 1).unwrap().apply(&FockVector::vacuum()));
        assert!(det_state(2, 1).unwrap().is_zero());
        assert!(!det_state(2, 2).unwrap().is_zero());
        assert!(matches!(det_state(6, 1), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn unused_modes_do_not_matter() {
        assert_eq!(det_state_in(2, 3, 4).unwrap(), det_state(2, 3).unwrap());
    }

    #[test]
    fn lagrange_reproduces_polynomial() {
        let xs = [0, 1, 2];
        let ys: Vec<Scalar> = xs.iter().map(|&x| Scalar::int(x * x - 3)).collect();
        assert_eq!(lagrange_eval(&xs, &ys, 7), Scalar::int(46));
    }
}
