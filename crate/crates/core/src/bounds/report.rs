use std::collections::HashMap;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeMap, Serializer};

use super::classify::{classify, dimension_params, ClassKind, Classification};
use super::formulas::{
    degen_bound, nondegen_bound, pure_bound, pure_params, structured_bound, LocalBound, NamedBound,
};
use crate::charmod::MultChar;
use crate::critical::critical_profile;
use crate::error::{Error, Result};
use crate::polyrat::RatFunc;

/// Every bound name a report can carry, in column order.
pub const BOUND_NAMES: &[&str] = &[
    "weil",
    "weil_uniform",
    "main_f",
    "main_g",
    "clean_f",
    "clean_g",
    "local",
    "cor_maincor1",
    "cor_m2",
    "cor_maincorp21",
    "cor_maincor2p2",
    "pure_sharp",
    "pure_uniform",
    "degen_i",
    "degen_ii",
    "degen_prop_f",
    "degen_prop_g",
    "degen_prop_h",
    "laurent",
];

/// All applicable bounds for one sum, with their inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    /// `None` for an empty sum.
    pub kind: Option<ClassKind>,
    pub d: Option<u64>,
    pub delta: Option<u64>,
    pub t: Option<u32>,
    pub l: Option<u32>,
    pub d_p: Option<usize>,
    pub dp_estimate: Option<f64>,
    pub local: Vec<LocalBound>,
    /// One entry per [`BOUND_NAMES`] element.
    pub bounds: Vec<NamedBound>,
    pub trivial: f64,
    pub best: f64,
    pub best_name: &'static str,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.bounds
            .iter()
            .find(|b| b.name == name)
            .and_then(|b| b.value)
    }

    /// Applicable bounds as `(name, value)`, trivial bound included.
    pub fn applicable(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.bounds
            .iter()
            .filter_map(|b| b.value.map(|v| (b.name, v)))
            .chain(std::iter::once(("trivial", self.trivial)))
    }

    /// Critical points as `α:ν` pairs joined by `;`.
    pub fn nu_list(&self) -> String {
        self.local
            .iter()
            .map(|b| format!("{}:{}", b.alpha, b.nu))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("classification", &self.kind)?;
        map.serialize_entry("D", &self.d)?;
        map.serialize_entry("Delta", &self.delta)?;
        map.serialize_entry("t", &self.t)?;
        map.serialize_entry("ell", &self.l)?;
        map.serialize_entry("d_p", &self.d_p)?;
        map.serialize_entry("d_p_estimate", &self.dp_estimate)?;
        map.serialize_entry("nu_list", &self.nu_list())?;
        for b in &self.bounds {
            map.serialize_entry(b.name, &b.value)?;
            map.serialize_entry(&format!("{}_applicable", b.name), &b.value.is_some())?;
        }
        map.serialize_entry("trivial", &self.trivial)?;
        map.serialize_entry("best", &self.best)?;
        map.serialize_entry("best_name", self.best_name)?;
        map.end()
    }
}

fn fill(found: Vec<NamedBound>) -> Vec<NamedBound> {
    BOUND_NAMES
        .iter()
        .map(|&name| {
            let value = found
                .iter()
                .filter(|b| b.name == name)
                .find_map(|b| b.value);
            NamedBound { name, value }
        })
        .collect()
}

/// Classifies the sum and collects every applicable bound.
pub fn best_bound(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> Result<BoundReport> {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    let trivial = (p as f64).powi(m as i32);
    let mut report = BoundReport {
        kind: None,
        d: None,
        delta: None,
        t: None,
        l: None,
        d_p: None,
        dp_estimate: None,
        local: Vec::new(),
        bounds: fill(Vec::new()),
        trivial,
        best: trivial,
        best_name: "trivial",
    };
    let Classification {
        kind,
        decomposition,
    } = match classify(f, g, chi) {
        Err(Error::EmptySum) => {
            report.best = 0.0;
            report.best_name = "empty";
            return Ok(report);
        }
        other => other?,
    };
    report.kind = Some(kind);
    if kind == ClassKind::ConstantOnDomain {
        report.l = decomposition.map(|d| d.l);
        return Ok(report);
    }
    let (d, delta) = dimension_params(f, g)?;
    report.d = Some(d);
    report.delta = Some(delta);
    let mut found = Vec::new();
    match (&kind, &decomposition) {
        (ClassKind::NonDegenerate, _) => found.extend(nondegen_bound(f, g, chi, d, delta)),
        (ClassKind::Degenerate, Some(dec)) => {
            report.l = Some(dec.l);
            report.d_p = dec.d_p;
            report.dp_estimate = dec.dp_upper_estimate(p);
            found.extend(degen_bound(dec, f, g, pp, d, delta));
        }
        _ => {}
    }
    if let Some(profile) = critical_profile(f, g, chi)? {
        report.t = Some(profile.t);
        let sb = structured_bound(&profile, f, g, pp, d);
        report.local = sb.local;
        found.extend(sb.bounds);
    }
    if g.is_constant() {
        if let Some(pb) = pure_params(f, p).and_then(|(t, d1)| pure_bound(p, m, t, d1)) {
            found.push(NamedBound {
                name: "pure_sharp",
                value: Some(pb.sharp),
            });
            found.push(NamedBound {
                name: "pure_uniform",
                value: Some(pb.uniform),
            });
        }
    }
    report.bounds = fill(found);
    let (name, best) =
        report.applicable().fold(
            ("trivial", trivial),
            |acc, (n, v)| if v < acc.1 { (n, v) } else { acc },
        );
    report.best = best;
    report.best_name = name;
    Ok(report)
}

/// Memoizes [`best_bound`] for one `(f, g)` across characters.
///
/// Reports depend on `χ` only through `c_χ`, `t_χ` and `κ`, and through the
/// order of `χ` when an `r`-th power test can be reached (`m = 1`, or
/// `deg_p f = 0`); the cache key is exactly that data.
#[derive(Debug)]
pub struct ReportCache {
    f: RatFunc,
    g: RatFunc,
    f_constant_mod_p: HashMap<u64, bool>,
    reports: HashMap<ReportKey, Arc<BoundReport>>,
}

/// The character data a [`BoundReport`] depends on: `(p, m, c_χ, t_χ, κ, order)`,
/// with the order zeroed when it cannot matter.
pub type ReportKey = (u64, u32, u64, u32, u8, u64);

impl ReportCache {
    pub fn new(f: &RatFunc, g: &RatFunc) -> Self {
        Self {
            f: f.clone(),
            g: g.clone(),
            f_constant_mod_p: Default::default(),
            reports: Default::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn key(&mut self, chi: &MultChar) -> ReportKey {
        let pp = chi.pp();
        let f = &self.f;
        let flat = *self
            .f_constant_mod_p
            .entry(pp.p())
            .or_insert_with(|| f.deg_p(pp.p()).is_none_or(|d| d == 0));
        let order = if pp.m() == 1 || flat { chi.order() } else { 0 };
        (pp.p(), pp.m(), chi.c_chi(), chi.t_chi(), chi.kappa(), order)
    }

    pub fn get(&mut self, chi: &MultChar) -> Result<Arc<BoundReport>> {
        let key = self.key(chi);
        if let Some(hit) = self.reports.get(&key) {
            return Ok(hit.clone());
        }
        let report = Arc::new(best_bound(&self.f, &self.g, chi)?);
        self.reports.insert(key, report.clone());
        Ok(report)
    }
}
