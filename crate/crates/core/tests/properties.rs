use proptest::prelude::*;

use charsum_core::bounds::{best_bound, invariants};
use charsum_core::charmod::MultChar;
use charsum_core::critical::critical_profile;
use charsum_core::evaluate::{brute_sum, fast_eval, local_sum, SumValue};
use charsum_core::padic::{mul_mod, padic_log, PrimePower};
use charsum_core::polyrat::{parse_ratfunc, IntPoly, RatFunc};

fn poly(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 1..=max_deg + 1)
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(4), prop::option::of(poly(2))).prop_filter_map("nonzero denominator", |(n, d)| {
        let den = d.map_or_else(IntPoly::one, |d| IntPoly::from_i64(&d));
        RatFunc::new(IntPoly::from_i64(&n), den).ok()
    })
}

fn modulus() -> impl Strategy<Value = PrimePower> {
    prop_oneof![
        (1u32..=6).prop_map(|m| (2, m)),
        (1u32..=4).prop_map(|m| (3, m)),
        (1u32..=3).prop_map(|m| (5, m)),
        (1u32..=2).prop_map(|m| (7, m))
    ]
    .prop_map(|(p, m)| PrimePower::new(p, m).unwrap())
}

fn character() -> impl Strategy<Value = MultChar> {
    (modulus(), any::<prop::sample::Index>()).prop_map(|(pp, i)| {
        let all = MultChar::all(pp);
        all[i.index(all.len())].clone()
    })
}

fn admissible(f: &RatFunc, g: &RatFunc, p: u64) -> bool {
    !g.is_zero()
        && f.ord_p(p).is_none_or(|o| o >= 0)
        && g.ord_p(p) == Some(0)
        && !(f.is_constant() && g.is_constant())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn log_is_additive(a in 0i128..1000, b in 0i128..1000, pi in 0usize..3, n in 1u32..8) {
        let p = [2u64, 3, 5][pi];
        let base = if p == 2 { 4 } else { p as i128 };
        let (x, y) = (1 + base * a, 1 + base * b);
        let q = p.pow(n);
        let lx = padic_log(x, p, n).unwrap();
        let ly = padic_log(y, p, n).unwrap();
        let lxy = padic_log(x * y, p, n).unwrap();
        prop_assert_eq!(lxy, (lx + ly) % q);
    }

    #[test]
    fn characters_are_multiplicative(chi in character(), x in 1u64..10_000, y in 1u64..10_000) {
        let pp = chi.pp();
        let n = chi.value_order();
        match (chi.eval(x as i128), chi.eval(y as i128)) {
            (Some(a), Some(b)) => prop_assert_eq!(chi.eval(mul_mod(x, y, pp.q()) as i128), Some((a + b) % n)),
            _ => prop_assert_eq!(chi.eval((x * y) as i128), None),
        }
    }

    #[test]
    fn serialization_round_trips(f in ratfunc()) {
        prop_assert_eq!(RatFunc::deserialize(&f.serialize()).unwrap(), f.clone());
        prop_assert_eq!(parse_ratfunc(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn fast_equals_brute(f in ratfunc(), g in ratfunc(), chi in character()) {
        let p = chi.pp().p();
        prop_assume!(admissible(&f, &g, p));
        let brute = brute_sum(&f, &g, &chi);
        let (fast, _) = fast_eval(&f, &g, &chi).unwrap();
        prop_assert!(fast.close_to(&brute, 1e-9 * chi.pp().q() as f64), "fast {} brute {}", fast, brute);
    }

    #[test]
    fn local_sums_partition(f in ratfunc(), g in ratfunc(), chi in character()) {
        let p = chi.pp().p();
        prop_assume!(admissible(&f, &g, p));
        let total = (0..p).fold(SumValue::zero(), |acc, a| acc.add(&local_sum(&f, &g, &chi, a)));
        let brute = brute_sum(&f, &g, &chi);
        prop_assert_eq!(total.counts(), brute.counts());
    }

    #[test]
    fn best_bound_dominates(f in ratfunc(), g in ratfunc(), chi in character()) {
        let p = chi.pp().p();
        prop_assume!(admissible(&f, &g, p));
        let s = brute_sum(&f, &g, &chi).magnitude();
        let report = best_bound(&f, &g, &chi).unwrap();
        prop_assert!(report.best <= report.trivial);
        for (name, v) in report.applicable() {
            prop_assert!(v >= s - 1e-6, "{} = {} < |S| = {}", name, v, s);
        }
    }

    #[test]
    fn t_divides_degrees(f in ratfunc(), g in ratfunc(), chi in character()) {
        let p = chi.pp().p();
        prop_assume!(admissible(&f, &g, p));
        if let Ok(Some(profile)) = critical_profile(&f, &g, &chi) {
            if profile.t < chi.pp().m() {
                prop_assert!(invariants::t_divides_degrees(&f, &g, &chi, profile.t));
            }
        }
    }
}
