//! One `(f, g, χ, p^m)` case from command-line text.

use std::fmt::Write;
use std::sync::Arc;

use charsum_core::bounds::{best_bound, BoundReport};
use charsum_core::charmod::MultChar;
use charsum_core::evaluate::{fast_eval, ReductionTrace, SumValue};
use charsum_core::padic::PrimePower;
use charsum_core::polyrat::{parse_ratfunc, RatFunc};

use crate::engine::{Checks, PairRun};
use crate::error::{CliError, CliResult};
use crate::row::CaseRow;

/// Unparsed case description as given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseSpec {
    pub p: u64,
    pub m: u32,
    pub f: String,
    pub g: String,
    /// Character index `c`; the principal character when absent.
    pub chi: Option<u64>,
    pub kappa: Option<u8>,
}

/// A parsed and validated case.
#[derive(Clone, Debug)]
pub struct CaseInput {
    pub f: RatFunc,
    pub g: RatFunc,
    pub chi: MultChar,
}

impl CaseSpec {
    pub fn parse(&self) -> CliResult<CaseInput> {
        let f = parse_ratfunc(&self.f).map_err(|e| CliError::parse("f", &self.f, e))?;
        let g = parse_ratfunc(&self.g).map_err(|e| CliError::parse("g", &self.g, e))?;
        let pp = PrimePower::new(self.p, self.m).map_err(|e| CliError::Input(e.to_string()))?;
        let chi = match self.chi {
            None if self.kappa.is_none() => MultChar::principal(pp),
            c => MultChar::new(pp, c.unwrap_or(1), self.kappa)
                .map_err(|e| CliError::Input(e.to_string()))?,
        };
        Ok(CaseInput { f, g, chi })
    }
}

/// Everything the single-case commands print.
#[derive(Debug)]
pub struct CaseOutcome {
    pub input: CaseInput,
    pub row: CaseRow,
    pub report: BoundReport,
    pub fast: SumValue,
    pub trace: Arc<ReductionTrace>,
}

/// Evaluates, bounds and checks one case exactly as a campaign would.
pub fn run_case(spec: &CaseSpec, checks: &Checks) -> CliResult<CaseOutcome> {
    let input = spec.parse()?;
    let (fast, trace) = fast_eval(&input.f, &input.g, &input.chi)?;
    let report = best_bound(&input.f, &input.g, &input.chi)?;
    let run = PairRun {
        family: "single",
        f: &input.f,
        g: &input.g,
        pp: input.chi.pp(),
    };
    let row = run
        .run(std::slice::from_ref(&input.chi), 0, checks)
        .pop()
        .expect("one character yields one row");
    Ok(CaseOutcome {
        input,
        row,
        report,
        fast,
        trace,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.9}"))
}

impl CaseOutcome {
    pub fn header(&self) -> String {
        let chi = &self.input.chi;
        format!(
            "S(χ, g, f, {}) with f = {}, g = {}, χ: c = {}, κ = {} (c_χ = {}, t_χ = {}, order {})",
            chi.pp(),
            self.input.f,
            self.input.g,
            chi.c(),
            chi.kappa(),
            chi.c_chi(),
            chi.t_chi(),
            chi.order()
        )
    }

    pub fn render_eval(&self) -> String {
        let r = &self.row;
        let z = self.fast.approx();
        let mut out = self.header() + "\n";
        let _ = writeln!(out, "classification  {}", r.classification);
        let _ = writeln!(out, "|S| brute       {}", fmt_opt(r.brute_abs));
        let _ = writeln!(out, "|S| fast        {:.9}", self.fast.magnitude());
        let _ = writeln!(out, "S               {:.9} {:+.9}i", z.re, z.im);
        let _ = writeln!(
            out,
            "reduced         {}",
            if r.reduced { "yes" } else { "no" }
        );
        let _ = writeln!(out, "best bound      {:.6} ({})", r.best, r.best_name);
        out + &self.render_checks()
    }

    pub fn render_bound(&self) -> String {
        let rep = &self.report;
        let mut out = self.header() + "\n";
        let show = |v: Option<u64>| v.map_or("-".to_owned(), |x| x.to_string());
        let _ = writeln!(out, "classification  {}", self.row.classification);
        let _ = writeln!(
            out,
            "D = {}  Δ = {}  t = {}  ℓ = {}  d_p = {}",
            show(rep.d),
            show(rep.delta),
            show(rep.t.map(u64::from)),
            show(rep.l.map(u64::from)),
            show(rep.d_p.map(|d| d as u64))
        );
        if !rep.local.is_empty() {
            let _ = writeln!(out, "critical points {}", rep.nu_list());
        }
        for (name, v) in rep.applicable() {
            let _ = writeln!(out, "  {name:<16} {v:.6}");
        }
        let _ = writeln!(out, "best            {:.6} ({})", rep.best, rep.best_name);
        let _ = writeln!(
            out,
            "|S|             {}",
            fmt_opt(self.row.brute_abs.or(Some(self.row.fast_abs)))
        );
        out + &self.render_checks()
    }

    pub fn render_reduce(&self) -> String {
        format!("{}\n{}", self.header(), self.trace.render())
    }

    fn render_checks(&self) -> String {
        if self.row.passed() {
            "checks          all passed\n".to_owned()
        } else {
            format!("checks          FAILED: {}\n", self.row.failures.join("; "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, m: u32, f: &str, g: &str, chi: Option<u64>) -> CaseSpec {
        CaseSpec {
            p,
            m,
            f: f.into(),
            g: g.into(),
            chi,
            kappa: None,
        }
    }

    #[test]
    fn eval_example() {
        let out = run_case(&spec(5, 2, "x^2", "1", Some(20)), &Checks::default()).unwrap();
        assert!((out.row.brute_abs.unwrap() - 5.0).abs() < 1e-9);
        assert!((out.fast.magnitude() - 5.0).abs() < 1e-9);
        assert!(out.row.passed(), "{:?}", out.row.failures);
        assert!(out.render_eval().contains("|S| brute       5.000000000"));
    }

    #[test]
    fn bound_example() {
        let out = run_case(&spec(3, 3, "x^3", "1", Some(18)), &Checks::default()).unwrap();
        assert!(out.report.best >= 9.0 - 1e-9);
        assert!((out.row.brute_abs.unwrap() - 9.0).abs() < 1e-9);
        assert!(out.row.passed(), "{:?}", out.row.failures);
    }

    #[test]
    fn reduce_example() {
        let out = run_case(&spec(5, 4, "x^2", "1", Some(100)), &Checks::default()).unwrap();
        let text = out.render_reduce();
        assert!(text.contains("σ=2"), "{text}");
        assert!(text.contains("mod 5^2"), "{text}");
        assert!((out.fast.magnitude() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn parse_errors_point_at_the_position() {
        let err = spec(5, 2, "x^2 + $", "1", None).parse().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("position 6"), "{msg}");
        assert!(msg.ends_with("      ^"), "{msg}");
        assert_eq!(
            spec(4, 2, "x", "1", None).parse().unwrap_err().exit_code(),
            2
        );
        assert_eq!(
            spec(5, 2, "x", "1", Some(99))
                .parse()
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn empty_sum_reports_zero() {
        let out = run_case(&spec(5, 2, "x", "5x", None), &Checks::default()).unwrap();
        assert_eq!(out.row.brute_abs, Some(0.0));
        assert_eq!(out.row.classification, "EMPTY");
        assert!(out.row.passed(), "{:?}", out.row.failures);
    }
}
