use charsum_core::charmod::MultChar;
use charsum_core::critical::{critical_profile, CriticalProfile};
use charsum_core::evaluate::{
    brute_sum, fast_eval, in_domain, local_sum, local_sum_mod4, reduce_step, ReduceOutcome,
    SumValue,
};
use charsum_core::padic::PrimePower;
use charsum_core::polyrat::{parse_ratfunc, RatFunc};

const FUNCTIONS: &[(&str, &str)] = &[
    ("x^2", "1"),
    ("x^3", "1"),
    ("x^3 + 3x", "1"),
    ("x^4 + 2x", "1"),
    ("x^5 - x^2", "1"),
    ("x^7 + x", "1"),
    ("x^2 + 1/x", "1"),
    ("1/(x^2 + 1)", "1"),
    ("x", "x"),
    ("x^2", "x + 1"),
    ("x^3 + x", "x^2 + 1"),
    ("1/x", "x - 1"),
    ("0", "x"),
    ("0", "x^2 + 3"),
    ("x^2 - 3x", "(x + 2)/(x - 1)"),
    ("3x", "1 + 3x"),
    ("5x", "1 + 5x"),
    ("5x^2", "x + 1"),
    ("9x^3", "1 + 9x^2"),
    ("2x", "1 + 4x"),
    ("4x^2", "1 + 2x"),
    ("x^9", "1"),
    ("x^25 + x", "1"),
];

fn rf(s: &str) -> RatFunc {
    parse_ratfunc(s).unwrap()
}

fn tiers() -> Vec<PrimePower> {
    let mut out = Vec::new();
    for (p, ms) in [(2u64, 1..=6u32), (3, 1..=5), (5, 1..=3), (7, 1..=3)] {
        for m in ms {
            out.push(PrimePower::new(p, m).unwrap());
        }
    }
    out
}

fn tol(pp: PrimePower) -> f64 {
    1e-9 * pp.q() as f64
}

#[test]
fn fast_matches_brute_everywhere() {
    let mut checked = 0;
    for pp in tiers() {
        for chi in MultChar::all(pp) {
            for (fs, gs) in FUNCTIONS {
                let (f, g) = (rf(fs), rf(gs));
                let brute = brute_sum(&f, &g, &chi);
                let (fast, trace) = fast_eval(&f, &g, &chi).unwrap();
                assert!(
                    fast.close_to(&brute, tol(pp)),
                    "f={fs} g={gs} χ=(c={}, κ={}) mod {pp}: fast {fast} vs brute {brute}\n{}",
                    chi.c(),
                    chi.kappa(),
                    trace.render()
                );
                assert!(trace.recompute().close_to(&fast, tol(pp)));
                assert!(trace.depth() as u32 <= pp.m() + 1);
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

fn profile(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> Option<CriticalProfile> {
    critical_profile(f, g, chi).ok().flatten()
}

#[test]
fn local_sums_partition_vanish_and_split() {
    for pp in tiers() {
        let p = pp.p();
        for chi in MultChar::all(pp) {
            for (fs, gs) in FUNCTIONS {
                let (f, g) = (rf(fs), rf(gs));
                let brute = brute_sum(&f, &g, &chi);
                let locals: Vec<SumValue> = (0..p).map(|a| local_sum(&f, &g, &chi, a)).collect();
                let total = locals.iter().fold(SumValue::zero(), |acc, v| acc.add(v));
                assert_eq!(total, brute, "partition f={fs} g={gs} mod {pp}");
                let Some(prof) = profile(&f, &g, &chi) else {
                    continue;
                };
                let margin = if p == 2 { 3 } else { 2 };
                if pp.m() < prof.t + margin {
                    continue;
                }
                for a in 0..p {
                    let crit = prof.point(a);
                    if crit.is_none() {
                        assert!(
                            locals[a as usize].magnitude() <= tol(pp),
                            "non-critical {a} f={fs} g={gs} mod {pp}"
                        );
                    }
                    if crit.is_some_and(|c| c.nu == 1) && p != 2 && in_domain(&f, &g, p, a) {
                        let want = (p as f64).powf((pp.m() + prof.t) as f64 / 2.0);
                        let got = locals[a as usize].magnitude();
                        assert!(
                            (got - want).abs() <= 1e-9 * want,
                            "ν=1 magnitude f={fs} g={gs} mod {pp}: {got} vs {want}"
                        );
                    }
                    if p == 2 && pp.m() >= 2 {
                        let split = local_sum_mod4(&f, &g, &chi, a).add(&local_sum_mod4(
                            &f,
                            &g,
                            &chi,
                            a + 2,
                        ));
                        assert_eq!(split, locals[a as usize]);
                    }
                }
                if let ReduceOutcome::Reduced { terms, .. } = reduce_step(&f, &g, &chi).unwrap() {
                    for term in terms {
                        let local = if p == 2 {
                            local_sum_mod4(&f, &g, &chi, term.shape.alpha)
                        } else {
                            local_sum(&f, &g, &chi, term.shape.alpha)
                        };
                        let sub = match &term.shape.sub {
                            Some((gp, spp)) => brute_sum(
                                &RatFunc::from_poly(gp.clone()),
                                &RatFunc::one(),
                                &MultChar::principal(*spp),
                            ),
                            None => SumValue::one(),
                        };
                        let assembled = sub
                            .mul_root(term.phase)
                            .scale((p as i64).pow(term.shape.p_exp));
                        assert!(
                            assembled.close_to(&local, tol(pp)),
                            "term α={} f={fs} g={gs} χ c={} κ={} mod {pp}: {assembled} vs {local}",
                            term.shape.alpha,
                            chi.c(),
                            chi.kappa()
                        );
                    }
                }
            }
        }
    }
}
