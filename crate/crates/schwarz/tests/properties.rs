use proptest::prelude::*;

use schwarz::cy::{calabi_residual, detect_sym_power};
use schwarz::diffop::{ext2, frobenius_mum_basis, order2, sym2, sym_power_order2, Operator};
use schwarz::schwarzian::{schwarzian_residual, solve_schwarzian_series, w_function};
use schwarz::{DiffOperator, Gauge, Poly, RatFunc, Q};

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn rat() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Q> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// Denominators with poles away from a few sample points.
const DENOMINATORS: [&[i64]; 5] = [&[1], &[-1, 1], &[2, 1], &[0, 1], &[0, -1, 1]];

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (rat(), rat(), 0usize..DENOMINATORS.len())
        .prop_map(|(a, b, d)| RatFunc::new(Poly::new(vec![a, b]), Poly::from_ints(DENOMINATORS[d])).unwrap())
}

fn operator(order: usize) -> impl Strategy<Value = DiffOperator> {
    prop::collection::vec(ratfunc(), order).prop_map(|mut c| {
        c.push(RatFunc::one());
        Operator::new(c)
    })
}

fn order_two() -> impl Strategy<Value = DiffOperator> {
    (ratfunc(), ratfunc()).prop_map(|(p, r)| order2(p, r))
}

/// `θ² − c·x·(θ + a)(θ + b)` in monic `D` form, MUM at 0.
fn mum_order_two() -> impl Strategy<Value = DiffOperator> {
    (rat(), rat(), nonzero_rat()).prop_map(|(a, b, c)| {
        let x = RatFunc::x();
        let one = RatFunc::one();
        let cx = x.scale(&c);
        let den = &x * &(&one - &cx);
        let p = (&one - &cx.scale(&(&a + &b + q(1, 1)))).checked_div(&den).unwrap();
        let r = (-&cx.scale(&(&a * &b))).checked_div(&(&x * &den)).unwrap();
        order2(p, r)
    })
}

fn pullback_map() -> impl Strategy<Value = RatFunc> {
    (nonzero_rat(), 1i64..=2, rat()).prop_map(|(c, k, d)| {
        let x = RatFunc::x();
        x.pow(k)
            .scale(&c)
            .checked_div(&(&RatFunc::one() + &x.scale(&d)))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn w_is_invariant_under_conjugation(n in 2usize..=5, full in operator(5), g in ratfunc()) {
        let l = Operator::new(full.coeffs()[5 - n..].to_vec());
        prop_assert_eq!(l.order(), n);
        let c = l.conjugate(&Gauge::new(g));
        prop_assert_eq!(w_function(&c).unwrap(), w_function(&l).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pullbacks_compose(l in operator(3), y1 in pullback_map(), y2 in pullback_map()) {
        let twice = l.pullback(&y1).unwrap().pullback(&y2).unwrap();
        let once = l.pullback(&y1.compose(&y2)).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn raw_substitution_is_multiplicative(a in order_two(), b in order_two(), y in pullback_map()) {
        let lhs = a.mul(&b).substitute(&y).unwrap();
        let rhs = a.substitute(&y).unwrap().mul(&b.substitute(&y).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn frobenius_solutions_are_annihilated(l2 in mum_order_two(), m in 1usize..=3) {
        let k = 12;
        let l = sym_power_order2(&l2, m).unwrap();
        let fb = frobenius_mum_basis(&l, k).unwrap();
        prop_assert_eq!(fb.solutions.len(), m + 1);
        for s in &fb.solutions {
            prop_assert!(s.apply(&l).is_zero_to(k - 4));
        }
    }

    #[test]
    fn symmetric_powers_are_detected(l2 in order_two(), m in 2usize..=4) {
        let l = sym_power_order2(&l2, m).unwrap();
        let d = detect_sym_power(&l).unwrap();
        prop_assert!(d.is_sym_power);
        prop_assert_eq!(d.l2, l2);
    }

    #[test]
    fn premodular_families_satisfy_the_schwarzian_equation(l2 in mum_order_two(), n in 1u32..=3, a in nonzero_rat()) {
        let k = 10;
        let w = w_function(&l2).unwrap();
        let s = solve_schwarzian_series(&w, n, &a, k).unwrap();
        prop_assert!(s.is_consistent());
        let r = schwarzian_residual(&w, &s.tail).unwrap();
        prop_assert!(r.order() >= k - n as i64 - 2);
        prop_assert!(r.is_zero_to(r.order()));
    }

    #[test]
    fn every_consistent_family_satisfies_the_schwarzian_equation(w in ratfunc(), h in rat(), n in 1u32..=3, a in nonzero_rat()) {
        let k = 10;
        let w = &w + &RatFunc::x().pow(-2).scale(&h);
        let s = solve_schwarzian_series(&w, n, &a, k).unwrap();
        if s.is_consistent() {
            let r = schwarzian_residual(&w, &s.tail).unwrap();
            prop_assert!(r.is_zero_to(r.order()));
        }
    }

    #[test]
    fn calabi_condition_survives_conjugation(l2 in order_two(), g in ratfunc()) {
        let l = sym_power_order2(&l2, 3).unwrap().conjugate(&Gauge::new(g));
        prop_assert!(calabi_residual(&l).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn exterior_square_of_a_square_factors(l2 in order_two()) {
        let p = l2.coeff(1);
        let sq = l2.mul(&l2);
        prop_assert!(calabi_residual(&sq).unwrap().holds);
        let e = ext2(&sq).unwrap().operator;
        let dp = Operator::new(vec![p.clone(), RatFunc::one()]);
        let rhs = dp.mul(&sym2(&l2).unwrap().operator).mul(&dp);
        prop_assert_eq!(e, rhs.monic());
    }
}
