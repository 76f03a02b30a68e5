use charsum_core::bounds::{
    best_bound, classify, dimension_params, invariants, local_bound, ClassKind, ReportCache,
};
use charsum_core::charmod::MultChar;
use charsum_core::critical::{critical_profile, local_data, relation_failures};
use charsum_core::evaluate::{brute_sum, in_domain, local_sum};
use charsum_core::padic::PrimePower;
use charsum_core::polyrat::{parse_ratfunc, RatFunc};

const FUNCTIONS: &[(&str, &str)] = &[
    ("x^2", "1"),
    ("x^3", "1"),
    ("x^4", "1"),
    ("x^6", "1"),
    ("x^3 + 3x", "1"),
    ("x^4 + 2x", "1"),
    ("x^2 - x", "1"),
    ("x^3 - x", "1"),
    ("x^5 - x", "1"),
    ("x^2 + 1/x", "1"),
    ("x + 1/x", "1"),
    ("1/(x^2 + 1)", "1"),
    ("x", "x"),
    ("x^2", "x"),
    ("x^2", "x + 1"),
    ("x^3 + x", "x^2 + 1"),
    ("1/x", "x - 1"),
    ("0", "x"),
    ("0", "x^2"),
    ("0", "x^2 + 3"),
    ("0", "x/(x+1)"),
    ("x^2 - 3x", "(x + 2)/(x - 1)"),
    ("2x", "1 + 2x"),
    ("3x", "1 + 3x"),
    ("3x", "1 + 3x^2"),
    ("3x^2", "1 + 3x + 9x^2"),
    ("5x", "1 + 5x"),
    ("5x^2", "x + 1"),
    ("5x", "x"),
    ("9x^3", "1 + 9x^2"),
    ("3x", "1 + 9x"),
    ("9x", "1 + 3x"),
    ("3x", "x^2 + 1"),
    ("2x", "1 + 4x"),
    ("4x^2", "1 + 2x"),
    ("4x", "1 + 2x^2"),
    ("2x + 2x^2", "1 + 2x"),
    ("4x + 4x^2", "1 + 2x"),
    ("3x + 3/x", "1 + 3x"),
    ("3/x", "1 + 3/x"),
    ("0", "1 + 3x + 3/x"),
    ("0", "1 + 2x^2 + 2/x"),
    ("x^9", "1"),
    ("x^8", "1"),
    ("x^25 + x", "1"),
];

fn rf(s: &str) -> RatFunc {
    parse_ratfunc(s).unwrap()
}

fn tiers() -> Vec<PrimePower> {
    let mut out = Vec::new();
    for (p, ms) in [(2u64, 1..=7u32), (3, 1..=5), (5, 1..=4), (7, 1..=3)] {
        for m in ms {
            out.push(PrimePower::new(p, m).unwrap());
        }
    }
    out
}

#[test]
fn every_reported_bound_holds() {
    let mut violations = Vec::new();
    let mut applied = 0usize;
    for pp in tiers() {
        for chi in MultChar::all(pp) {
            for (fs, gs) in FUNCTIONS {
                let (f, g) = (rf(fs), rf(gs));
                let s = brute_sum(&f, &g, &chi).magnitude();
                let report = best_bound(&f, &g, &chi).unwrap();
                assert!(report.best <= report.trivial + 1e-9);
                if report.kind.is_none() {
                    assert_eq!(s, 0.0);
                    continue;
                }
                for (name, v) in report.applicable() {
                    applied += 1;
                    if v < s - 1e-6 {
                        violations.push(format!(
                            "{name}: {v:.4} < |S| = {s:.4} for f={fs} g={gs} c={} κ={} mod {pp}",
                            chi.c(),
                            chi.kappa()
                        ));
                    }
                }
                for lb in &report.local {
                    let sa = local_sum(&f, &g, &chi, lb.alpha).magnitude();
                    if lb.value < sa - 1e-6 {
                        violations.push(format!(
                            "local α={} ν={}: {:.4} < {sa:.4} for f={fs} g={gs} c={} mod {pp}",
                            lb.alpha,
                            lb.nu,
                            lb.value,
                            chi.c()
                        ));
                    }
                }
            }
        }
    }
    assert!(applied > 10_000, "only {applied} bound applications");
    assert!(
        violations.is_empty(),
        "{} violations:\n{}",
        violations.len(),
        violations
            .iter()
            .take(40)
            .cloned()
            .collect::<Vec<_>>()
            .join("\n")
    );
}

#[test]
fn structural_relations_hold() {
    let mut failures = Vec::new();
    let (mut squeezed, mut dp_checked, mut relations) = (0, 0, 0);
    for pp in tiers() {
        let p = pp.p();
        for chi in MultChar::all(pp) {
            for (fs, gs) in FUNCTIONS {
                let (f, g) = (rf(fs), rf(gs));
                let Ok(cls) = classify(&f, &g, &chi) else {
                    continue;
                };
                let Ok(Some(profile)) = critical_profile(&f, &g, &chi) else {
                    continue;
                };
                let (d, _) = dimension_params(&f, &g).unwrap();
                let tag = format!("f={fs} g={gs} c={} κ={} mod {pp}", chi.c(), chi.kappa());
                if profile.t < pp.m() && !invariants::t_divides_degrees(&f, &g, &chi, profile.t) {
                    failures.push(format!("t-divisibility (t={}) {tag}", profile.t));
                }
                if !invariants::critical_degree_ok(&profile, p, d) {
                    failures.push(format!("deg 𝒞₊ ≤ D-1 {tag}"));
                }
                for cp in profile
                    .points
                    .iter()
                    .filter(|cp| in_domain(&f, &g, p, cp.alpha))
                {
                    if let Ok(data) = local_data(&f, &g, &chi, &profile, cp.alpha) {
                        relations += 1;
                        let bad = relation_failures(&data, p);
                        if !bad.is_empty() {
                            failures.push(format!(
                                "{bad:?} at α={} (σ={}, τ={}, ν={}, t={}) {tag}",
                                cp.alpha, data.sigma, data.tau, cp.nu, profile.t
                            ));
                        }
                    }
                }
                if cls.kind != ClassKind::Degenerate {
                    continue;
                }
                let dec = cls.decomposition.unwrap();
                if let Some((lower, upper)) = invariants::dp_relations(&dec, p, profile.t, d) {
                    dp_checked += 1;
                    if !lower || !upper {
                        failures.push(format!(
                            "d_p relations ({lower},{upper}) d_p={:?} t={} ℓ={} {tag}",
                            dec.d_p, profile.t, dec.l
                        ));
                    }
                }
                if let Some(ok) = invariants::l_squeeze(&dec, p) {
                    squeezed += 1;
                    if !ok {
                        failures.push(format!("L bracket L={:?} ℓ={} {tag}", dec.big_l, dec.l));
                    }
                }
            }
        }
    }
    assert!(
        squeezed > 0 && dp_checked > 0 && relations > 500,
        "squeezed {squeezed}, dp {dp_checked}, relations {relations}"
    );
    assert!(
        failures.is_empty(),
        "{} failures:\n{}",
        failures.len(),
        failures
            .iter()
            .take(40)
            .cloned()
            .collect::<Vec<_>>()
            .join("\n")
    );
}

#[test]
fn local_bounds_at_in_domain_points() {
    for pp in tiers() {
        for chi in MultChar::all(pp) {
            for (fs, gs) in FUNCTIONS {
                let (f, g) = (rf(fs), rf(gs));
                let Ok(Some(profile)) = critical_profile(&f, &g, &chi) else {
                    continue;
                };
                for cp in profile
                    .points
                    .iter()
                    .filter(|cp| in_domain(&f, &g, pp.p(), cp.alpha))
                {
                    let Some(b) = local_bound(pp.p(), pp.m(), profile.t, cp.nu) else {
                        continue;
                    };
                    let s = local_sum(&f, &g, &chi, cp.alpha).magnitude();
                    assert!(
                        b >= s - 1e-6,
                        "α={} ν={} bound {b} < {s} f={fs} g={gs} c={} mod {pp}",
                        cp.alpha,
                        cp.nu,
                        chi.c()
                    );
                }
            }
        }
    }
}

#[test]
fn cached_reports_match_direct() {
    for pp in tiers() {
        let chars = MultChar::all(pp);
        for (fs, gs) in FUNCTIONS {
            let (f, g) = (rf(fs), rf(gs));
            let mut cache = ReportCache::new(&f, &g);
            for chi in &chars {
                let direct = best_bound(&f, &g, chi).unwrap();
                assert_eq!(
                    *cache.get(chi).unwrap(),
                    direct,
                    "f={fs} g={gs} c={} κ={} mod {pp}",
                    chi.c(),
                    chi.kappa()
                );
            }
        }
    }
}
