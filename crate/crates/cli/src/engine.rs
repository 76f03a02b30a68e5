//! Per-`(f, g, p^m)` evaluation of every selected character with all checks.
//!
//! Direct sums for all characters at once come from grouping `x` by the
//! discrete log of `g(x)` and transforming over the unit group:
//! `S_α(χ_c) = Σ_k W_α[k] e(ck/φ(p^m))` for odd `p`, where
//! `W_α[k] = Σ_{x ≡ α, log g(x) = k} e_{p^m}(f(x))`; for `p = 2` the sign
//! component of the logarithm splits `W_α` in two.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use charsum_core::bounds::{
    classify, dimension_params, invariants, BoundReport, ClassKind, ReportCache, ReportKey,
    BOUND_NAMES,
};
use charsum_core::charmod::MultChar;
use charsum_core::critical::{critical_profile, local_data, relation_failures, CriticalProfile};
use charsum_core::evaluate::{
    brute_sum, degenerate_reduce, dlog_table, eval_mult_one, in_domain, local_sum, root_of_unity,
    ClassPlan, Evaluator, Root, SumValue,
};
use charsum_core::padic::{discrete_decompose, inv_mod, mul_mod, Dlog, PrimePower};
use charsum_core::polyrat::{CompiledRat, ModValue, RatFunc};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::row::CaseRow;

/// Tolerances and sampling for the per-case checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checks {
    /// Values agree when `|a - b| ≤ tol_eval · p^m`.
    pub tol_eval: f64,
    /// A bound holds when `bound ≥ |S| - tol_bound`.
    pub tol_bound: f64,
    /// Above `oracle_full_q`, only characters at positions divisible by this
    /// are re-summed by the library.
    pub oracle_stride: usize,
    pub oracle_full_q: u64,
    /// Moduli above this skip direct summation.
    pub max_q: u64,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            tol_eval: 1e-9,
            tol_bound: 1e-6,
            oracle_stride: 1,
            oracle_full_q: 625,
            max_q: 78_125,
        }
    }
}

/// `f(x) mod p^m` and the discrete log of `g(x)` on the domain.
struct Tables {
    q: u64,
    entries: Vec<Option<(u64, Dlog)>>,
}

impl Tables {
    fn new(f: &RatFunc, g: &RatFunc, pp: PrimePower) -> Self {
        let (p, q) = (pp.p(), pp.q());
        let principal = MultChar::principal(pp);
        let table = dlog_table(&principal);
        let cf = CompiledRat::new(f, q, p);
        let g_one = g == &RatFunc::one();
        let cg = CompiledRat::new(g, q, p);
        let entries = (0..q)
            .map(|x| {
                let ModValue::Value(fv) = cf.eval(x) else {
                    return None;
                };
                if g_one {
                    return Some((fv, Dlog { a: 0, k: 0 }));
                }
                let (n, d) = cg.eval_parts(x);
                if n % p == 0 || d % p == 0 {
                    return None;
                }
                let u = mul_mod(n, inv_mod(d, q).expect("unit"), q);
                let dl = match &table {
                    Some(t) => t.get(u).expect("unit"),
                    None => discrete_decompose(u as i128, principal.data()).expect("unit"),
                };
                Some((fv, dl))
            })
            .collect();
        Self { q, entries }
    }

    /// `χ(g(x)) e_{p^m}(f(x))` for `x` in the domain.
    fn phase(&self, chi: &MultChar, x: u64) -> Option<Root> {
        let (fv, dl) = self.entries[(x % self.q) as usize]?;
        Some(Root::new(chi.index_of_dlog(dl), chi.value_order()) * Root::new(fv, self.q))
    }
}

/// Local sums `S_α` for every character, from the transforms.
struct Oracle {
    p: u64,
    odd: bool,
    len: usize,
    /// `[α][sign][index]`; odd `p` uses sign 0 only.
    spectra: Vec<[Vec<Complex64>; 2]>,
}

impl Oracle {
    fn new(tables: &Tables, pp: PrimePower) -> Self {
        let (p, q) = (pp.p(), pp.q());
        let odd = p != 2;
        let len = if odd { pp.unit_count() } else { (q / 4).max(1) } as usize;
        let roots: Vec<Complex64> = (0..q).map(|j| root_of_unity(j, q)).collect();
        let mut spectra: Vec<[Vec<Complex64>; 2]> = (0..p)
            .map(|_| {
                [
                    vec![Complex64::default(); len],
                    vec![Complex64::default(); len],
                ]
            })
            .collect();
        for (x, entry) in tables.entries.iter().enumerate() {
            if let Some((fv, dl)) = entry {
                let slot = &mut spectra[x % p as usize][usize::from(dl.a)];
                slot[dl.k as usize % len] += roots[*fv as usize];
            }
        }
        let fft = FftPlanner::new().plan_fft_inverse(len);
        for per_alpha in &mut spectra {
            for buf in per_alpha.iter_mut() {
                if buf.iter().any(|z| *z != Complex64::default()) {
                    fft.process(buf);
                }
            }
        }
        Self {
            p,
            odd,
            len,
            spectra,
        }
    }

    fn locals(&self, chi: &MultChar) -> Vec<Complex64> {
        let i = chi.c() as usize % self.len;
        let sign = if chi.kappa() == 1 { -1.0 } else { 1.0 };
        (0..self.p as usize)
            .map(|a| {
                let [w0, w1] = &self.spectra[a];
                if self.odd {
                    w0[i]
                } else {
                    w0[i] + w1[i] * sign
                }
            })
            .collect()
    }
}

/// Character-class data shared by every `χ` with the same report key.
struct ClassInfo {
    profile: Option<CriticalProfile>,
    failures: Vec<String>,
    relations: u32,
}

fn class_info(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> ClassInfo {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    let mut failures = Vec::new();
    let mut relations = 0;
    let profile = match critical_profile(f, g, chi) {
        Ok(pr) => pr,
        Err(e) => {
            failures.push(format!("profile:{e}"));
            None
        }
    };
    let Ok((d, _)) = dimension_params(f, g) else {
        return ClassInfo {
            profile,
            failures,
            relations,
        };
    };
    if let Some(pr) = &profile {
        if pr.t < m && !invariants::t_divides_degrees(f, g, chi, pr.t) {
            failures.push("t_divisibility".into());
        }
        if !invariants::critical_degree_ok(pr, p, d) {
            failures.push("critical_degree".into());
        }
        for cp in pr.points.iter().filter(|cp| in_domain(f, g, p, cp.alpha)) {
            if let Ok(data) = local_data(f, g, chi, pr, cp.alpha) {
                relations += 1;
                failures.extend(
                    relation_failures(&data, p)
                        .into_iter()
                        .map(|r| format!("{r}@{}", cp.alpha)),
                );
            }
        }
        if let Ok(cls) = classify(f, g, chi) {
            if let (ClassKind::Degenerate, Some(dec)) = (cls.kind, cls.decomposition) {
                if let Some((lower, upper)) = invariants::dp_relations(&dec, p, pr.t, d) {
                    relations += 1;
                    if !lower || !upper {
                        failures.push("dp_relations".into());
                    }
                }
                if let Some(ok) = invariants::l_squeeze(&dec, p) {
                    relations += 1;
                    if !ok {
                        failures.push("l_squeeze".into());
                    }
                }
            }
        }
    }
    ClassInfo {
        profile,
        failures,
        relations,
    }
}

/// The closed form at a multiplicity-one point with its `χ`-dependent phase removed.
#[derive(Clone)]
struct MultOneBase {
    lift: Option<u64>,
    /// `S_α · conj(χ(g(α*)) e(f(α*)))`, or the magnitude alone when no lift is given.
    value: Option<SumValue>,
    magnitude: f64,
}

/// All cases of one `(f, g)` pair at one modulus.
pub struct PairRun<'a> {
    pub family: &'a str,
    pub f: &'a RatFunc,
    pub g: &'a RatFunc,
    pub pp: PrimePower,
}

fn root_inverse(r: Root) -> Root {
    Root::new(r.den - r.num, r.den)
}

fn dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

impl PairRun<'_> {
    /// Runs the given characters; `first_id` numbers the first row.
    pub fn run(&self, chars: &[MultChar], first_id: u64, checks: &Checks) -> Vec<CaseRow> {
        let (f, g, pp) = (self.f, self.g, self.pp);
        let (p, m, q) = (pp.p(), pp.m(), pp.q());
        let qf = q as f64;
        let tol = checks.tol_eval * qf;
        let direct = q <= checks.max_q;
        let tables = direct.then(|| Tables::new(f, g, pp));
        let oracle = tables.as_ref().map(|t| Oracle::new(t, pp));
        let mut reports = ReportCache::new(f, g);
        let mut infos: HashMap<ReportKey, Arc<ClassInfo>> = HashMap::new();
        let mut plans: HashMap<u64, Option<Arc<ClassPlan>>> = HashMap::new();
        let mut mult_one: HashMap<(ReportKey, u64), Result<MultOneBase, String>> = HashMap::new();
        let mut evaluator = Evaluator::new();
        let f_text = f.serialize();
        let g_text = g.serialize();

        chars
            .iter()
            .enumerate()
            .map(|(pos, chi)| {
                let start = Instant::now();
                let mut failures: Vec<String> = Vec::new();
                let locals = oracle.as_ref().map(|o| o.locals(chi));
                let brute = locals.as_ref().map(|l| l.iter().sum::<Complex64>());
                let key = reports.key(chi);
                let report: Arc<BoundReport> = match reports.get(chi) {
                    Ok(r) => r,
                    Err(e) => {
                        failures.push(format!("report:{e}"));
                        Arc::new(empty_report(pp))
                    }
                };
                let info = infos
                    .entry(key)
                    .or_insert_with(|| Arc::new(class_info(f, g, chi)))
                    .clone();

                let plan = plans
                    .entry(chi.c_chi())
                    .or_insert_with(|| {
                        evaluator
                            .class_plan(f, g, chi.c_chi(), pp)
                            .ok()
                            .flatten()
                            .map(Arc::new)
                    })
                    .clone();
                let fast =
                    match (&plan, &tables) {
                        (Some(plan), Some(t)) => Ok(plan
                            .assemble(p, |a| t.phase(chi, a).expect("critical residue in domain"))),
                        _ => evaluator.eval(f, g, chi).map(|(v, _)| v),
                    };
                let fast = match fast {
                    Ok(v) => v.approx(),
                    Err(e) => {
                        failures.push(format!("fast:{e}"));
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                };
                let eval_err = brute.map(|b| dist(fast, b));
                let ok_eval = eval_err.is_none_or(|e| e <= tol);
                if !ok_eval {
                    failures.push("eval".into());
                }

                let s_abs = brute.map_or(fast.norm(), |b| b.norm());
                let mut ok_bounds = true;
                for (name, v) in report.applicable() {
                    if v < s_abs - checks.tol_bound {
                        ok_bounds = false;
                        failures.push(format!("bound:{name}"));
                    }
                }
                if let Some(l) = &locals {
                    for lb in &report.local {
                        if lb.value < l[lb.alpha as usize].norm() - checks.tol_bound {
                            ok_bounds = false;
                            failures.push(format!("local_bound@{}", lb.alpha));
                        }
                    }
                }

                let (mut n_local, mut n_multone, mut ok_local) = (0u32, 0u32, true);
                if let (Some(l), Some(t), Some(pr)) = (&locals, &tables, &info.profile) {
                    let tt = pr.t;
                    let odd_regime = p != 2 && m >= tt + 2;
                    for alpha in 0..p {
                        let point = pr.point(alpha);
                        let s_a = l[alpha as usize];
                        if odd_regime && point.is_none() {
                            n_local += 1;
                            if s_a.norm() > tol {
                                ok_local = false;
                                failures.push(format!("vanishing@{alpha}"));
                            }
                        }
                        if !point.is_some_and(|cp| cp.nu == 1 && in_domain(f, g, p, cp.alpha)) {
                            continue;
                        }
                        if !(odd_regime || (p == 2 && m >= tt + 5)) {
                            continue;
                        }
                        n_local += 1;
                        let expected = (p as f64).powf(f64::from(m + tt) / 2.0);
                        if (s_a.norm() - expected).abs() > checks.tol_eval * expected {
                            ok_local = false;
                            failures.push(format!("magnitude@{alpha}"));
                        }
                        let base = mult_one.entry((key, alpha)).or_insert_with(|| {
                            let v = eval_mult_one(f, g, chi, alpha).map_err(|e| e.to_string())?;
                            let value = match (v.lift, &v.value) {
                                (Some(lift), Some(val)) => {
                                    let ph = t.phase(chi, lift).ok_or("lift outside the domain")?;
                                    Some(val.mul_root(root_inverse(ph)))
                                }
                                _ => None,
                            };
                            Ok(MultOneBase {
                                lift: v.lift,
                                value,
                                magnitude: v.magnitude,
                            })
                        });
                        n_multone += 1;
                        match base {
                            Err(e) => {
                                ok_local = false;
                                failures.push(format!("closed_form@{alpha}:{e}"));
                            }
                            Ok(b) => {
                                let matches = match (&b.value, b.lift.and_then(|x| t.phase(chi, x)))
                                {
                                    (Some(v), Some(ph)) => {
                                        dist(v.mul_root(ph).approx(), s_a) <= tol
                                    }
                                    _ => {
                                        (b.magnitude - s_a.norm()).abs()
                                            <= checks.tol_eval * expected
                                    }
                                };
                                if !matches {
                                    ok_local = false;
                                    failures.push(format!("closed_form@{alpha}"));
                                }
                            }
                        }
                    }
                }

                let ok_structural = info.failures.is_empty();
                failures.extend(info.failures.iter().map(|f| format!("structural:{f}")));

                let degenerate = matches!(
                    report.kind,
                    Some(ClassKind::Degenerate | ClassKind::ConstantOnDomain)
                );
                let mut identity_checked = false;
                let mut ok_identity = true;
                if let (true, Some(b)) = (degenerate, brute) {
                    identity_checked = true;
                    match degenerate_reduce(f, g, chi) {
                        Ok(red) => {
                            if dist(red.expand_brute().approx(), b) > tol {
                                ok_identity = false;
                                failures.push("degenerate_identity".into());
                            }
                        }
                        Err(e) => {
                            ok_identity = false;
                            failures.push(format!("degenerate_identity:{e}"));
                        }
                    }
                }

                let oracle_checked =
                    direct && (q <= checks.oracle_full_q || pos % checks.oracle_stride == 0);
                let mut ok_oracle = true;
                if let (true, Some(b), Some(l)) = (oracle_checked, brute, &locals) {
                    let lib = brute_sum(f, g, chi);
                    let parts = (0..p).map(|a| local_sum(f, g, chi, a)).collect::<Vec<_>>();
                    let total = parts.iter().fold(SumValue::zero(), |acc, s| acc.add(s));
                    if total.counts() != lib.counts() {
                        ok_oracle = false;
                        failures.push("partition".into());
                    }
                    if dist(lib.approx(), b) > tol
                        || parts.iter().zip(l).any(|(s, z)| dist(s.approx(), *z) > tol)
                    {
                        ok_oracle = false;
                        failures.push("transform".into());
                    }
                }

                let ratio = if report.best > 0.0 {
                    s_abs / report.best
                } else {
                    0.0
                };
                CaseRow {
                    id: first_id + pos as u64,
                    family: self.family.to_owned(),
                    p,
                    m,
                    f: f_text.clone(),
                    g: g_text.clone(),
                    c: chi.c(),
                    kappa: chi.kappa(),
                    classification: report.kind.map_or("EMPTY", class_name).to_owned(),
                    t: info.profile.as_ref().map(|pr| pr.t),
                    ell: report.l,
                    brute_abs: brute.map(|b| b.norm()),
                    fast_abs: fast.norm(),
                    eval_err,
                    reduced: plan.is_some(),
                    bounds: BOUND_NAMES.iter().map(|n| report.get(n)).collect(),
                    trivial: report.trivial,
                    best: report.best,
                    best_name: report.best_name.to_owned(),
                    ratio,
                    ok_bounds,
                    ok_eval,
                    ok_local,
                    ok_structural,
                    ok_identity,
                    ok_oracle,
                    n_local,
                    n_multone,
                    relations: info.relations,
                    identity_checked,
                    oracle_checked,
                    failures,
                    time_us: start.elapsed().as_secs_f64() * 1e6,
                }
            })
            .collect()
    }
}

fn class_name(kind: ClassKind) -> &'static str {
    match kind {
        ClassKind::NonDegenerate => "NON_DEGENERATE",
        ClassKind::Degenerate => "DEGENERATE",
        ClassKind::ConstantOnDomain => "CONSTANT_ON_DOMAIN",
    }
}

fn empty_report(pp: PrimePower) -> BoundReport {
    let trivial = pp.q() as f64;
    BoundReport {
        kind: None,
        d: None,
        delta: None,
        t: None,
        l: None,
        d_p: None,
        dp_estimate: None,
        local: Vec::new(),
        bounds: BOUND_NAMES
            .iter()
            .map(|&name| charsum_core::bounds::NamedBound { name, value: None })
            .collect(),
        trivial,
        best: trivial,
        best_name: "trivial",
    }
}
