use std::collections::BTreeMap;

use cftlab::dual::{Dual, SlotId};
use cftlab::frame::{random_frame, Frame, Slot};
use cftlab::invariants::{check_identity, p_inv, IdentityId};
use cftlab::lie::{det_state, det_state_in, falling_factorial, p_value, x_creator, FockVector, Osc, Tower};
use cftlab::scalar::{Field, Scalar};
use cftlab::spinor::{Dim, MinkowskiPoint};
use cftlab::suites::{identity_checks, run_checks, Backend, Config};
use cftlab::wick::bilocal_4pt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frame(seed: u64, dim: Dim, n: usize) -> Frame<Scalar> {
    random_frame(&mut ChaCha8Rng::seed_from_u64(seed), dim, n, 10)
}

fn nonzero() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=9).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| Scalar::ratio(n, d))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn p_scales_with_spinors_and_points(seed in any::<u64>(), a in nonzero(), b in nonzero(), t in nonzero()) {
        let f = frame(seed, Dim::Four, 2);
        let before = p_inv(&f, 0, 1).unwrap();
        let slots: Vec<_> = (0..2)
            .map(|i| {
                let x = MinkowskiPoint { comps: f.x(i).comps.iter().map(|c| c.clone() * t.clone()).collect() };
                let lam = f.lam(i).clone().map(|c| c * a.clone());
                let lb = f.lam_bar(i).clone().map(|c| c * b.clone());
                Slot::new(x, lam, lb)
            })
            .collect();
        let g = Frame::new(Dim::Four, slots).unwrap();
        prop_assert_eq!(p_inv(&g, 0, 1).unwrap(), before * a * b / t);
    }

    #[test]
    fn cheap_identities_hold(seed in any::<u64>()) {
        for id in [IdentityId::Pconj, IdentityId::Ppp, IdentityId::Exch, IdentityId::Real3d, IdentityId::Cyclic3d] {
            let (n, dim) = id.requirements();
            let f = frame(seed, dim.unwrap_or(Dim::Four), n);
            prop_assert!(check_identity(id, &f).unwrap().is_zero(), "{}", id.name());
        }
    }

    #[test]
    fn bilocal_is_linear_in_flavors(seed in any::<u64>(), m in 1u32..=6) {
        let f = frame(seed, Dim::Four, 4);
        let one = bilocal_4pt(1, &f).unwrap();
        prop_assert_eq!(bilocal_4pt(m, &f).unwrap(), one * Scalar::int(m as i64));
    }

    #[test]
    fn scalar_display_round_trips(re in (-99i64..=99, 1i64..=99), im in (-99i64..=99, 1i64..=99), pi in -2i32..=2) {
        let s = Scalar::ratio(re.0, re.1) + Scalar::ratio(im.0, im.1) * Scalar::i();
        let s = s * Scalar::pi_pow(pi);
        prop_assert_eq!(s.to_string().parse::<Scalar>().unwrap(), s);
    }

    #[test]
    fn dual_derivative_of_cubic(x in nonzero(), c in nonzero()) {
        let v = Dual::variable(x.clone(), SlotId(0));
        let k = Dual::constant(c.clone());
        let y = v.clone() * v.clone() * v.clone() + k * v.clone() - Dual::one() / v;
        let want = Scalar::int(3) * x.clone() * x.clone() + c + Scalar::one() / (x.clone() * x);
        prop_assert_eq!(y.partial(SlotId(0)), want);
        prop_assert!(y.partial(SlotId(1)).is_zero());
    }

    #[test]
    fn x_creators_commute(i in 1usize..=2, j in 1usize..=2, k in 1usize..=2, l in 1usize..=2, m in 1u32..=2, occ in proptest::collection::vec(0u32..=2, 4)) {
        let mut cfg = BTreeMap::new();
        for (n, &o) in occ.iter().enumerate() {
            if o > 0 {
                let tower = if n % 2 == 0 { Tower::A } else { Tower::B };
                cfg.insert(Osc { tower, flavor: 1, mode: (n / 2 + 1) as u32 }, o);
            }
        }
        let v = FockVector::from_monomial(&cfg, Scalar::one()).add(&FockVector::vacuum());
        let a = x_creator(i, j, m, 2).unwrap();
        let b = x_creator(k, l, m, 2).unwrap();
        prop_assert_eq!(a.apply(&b.apply(&v)), b.apply(&a.apply(&v)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pn_is_factorial_times_falling(n in 1usize..=3, m in 0u32..=4) {
        let want = Scalar::int(factorial(n)) * falling_factorial(m as i64, n);
        prop_assert_eq!(p_value(n, m).unwrap(), want);
    }

    #[test]
    fn spare_modes_leave_norm_unchanged(n in 1usize..=3, m in 1u32..=3, extra in 1usize..=2) {
        let base = det_state(n, m).unwrap().norm2();
        prop_assert_eq!(det_state_in(n, m, n + extra).unwrap().norm2(), base);
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let cfg = Config::new(Dim::Four, 3, seed, Backend::Exact);
        let checks: Vec<_> = identity_checks(&cfg).into_iter().filter(|c| c.name == "PPP" || c.name == "PCONJ").collect();
        let a = serde_json::to_string(&run_checks("identities", &cfg, &checks)).unwrap();
        let b = serde_json::to_string(&run_checks("identities", &cfg, &checks)).unwrap();
        prop_assert_eq!(a, b);
    }
}
