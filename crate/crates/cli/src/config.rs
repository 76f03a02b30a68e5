//! Campaign configuration: a flat `key = value` file with flag overrides.
//!
//! Recognized keys (defaults in parentheses):
//!
//! | key | meaning |
//! |---|---|
//! | `primes` | comma-separated primes (`3,5,7`) |
//! | `m` | exponent range `a..b` or a single exponent (`1..4`) |
//! | `max_q` | largest modulus `p^m` enumerated (`78125`) |
//! | `families` | subset of `monomial,dense,rational,laurent,scaled` (all) |
//! | `coeff_min`, `coeff_max` | coefficient range of generated polynomials (`-2`, `2`) |
//! | `monomial_degree` | largest `d` in `x^d` (`6`) |
//! | `dense_degree`, `dense_stride` | dense polynomial degree and subsampling stride (`3`, `3`) |
//! | `rational_degree`, `rational_stride` | numerator/denominator degree and stride (`2`, `40`) |
//! | `laurent_degree` | largest `d`, `e` in `x^d + x^-e` (`4`) |
//! | `char_stride` | keep every k-th character (`1`) |
//! | `oracle_full_q` | moduli up to this re-sum every character with the library's direct summation (`625`) |
//! | `oracle_stride` | above `oracle_full_q`, every k-th character is re-summed (`1`) |
//! | `tol_eval` | relative tolerance for value equality (`1e-9`) |
//! | `tol_bound` | absolute slack for bounds (`1e-6`) |
//! | `jobs` | worker threads (`1`) |
//! | `out` | output directory (none) |
//!
//! Blank lines and text after `#` are ignored.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Monomial,
    Dense,
    Rational,
    Laurent,
    Scaled,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Monomial,
        Family::Dense,
        Family::Rational,
        Family::Laurent,
        Family::Scaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Monomial => "monomial",
            Family::Dense => "dense",
            Family::Rational => "rational",
            Family::Laurent => "laurent",
            Family::Scaled => "scaled",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub primes: Vec<u64>,
    pub m_min: u32,
    pub m_max: u32,
    pub max_q: u64,
    pub families: Vec<Family>,
    pub coeff_min: i64,
    pub coeff_max: i64,
    pub monomial_degree: u32,
    pub dense_degree: u32,
    pub dense_stride: usize,
    pub rational_degree: u32,
    pub rational_stride: usize,
    pub laurent_degree: u32,
    pub char_stride: usize,
    pub oracle_stride: usize,
    pub oracle_full_q: u64,
    pub tol_eval: f64,
    pub tol_bound: f64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            primes: vec![3, 5, 7],
            m_min: 1,
            m_max: 4,
            max_q: 78_125,
            families: Family::ALL.to_vec(),
            coeff_min: -2,
            coeff_max: 2,
            monomial_degree: 6,
            dense_degree: 3,
            dense_stride: 3,
            rational_degree: 2,
            rational_stride: 40,
            laurent_degree: 4,
            char_stride: 1,
            oracle_stride: 1,
            oracle_full_q: 625,
            tol_eval: 1e-9,
            tol_bound: 1e-6,
            jobs: 1,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse '{value}'"))
}

/// Parses `a..b`, `a..=b` or a single value.
pub fn parse_range(value: &str) -> Result<(u32, u32), String> {
    let value = value.trim();
    if let Some((a, b)) = value.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        Ok((parse_num("m", a.trim())?, parse_num("m", b.trim())?))
    } else {
        let m = parse_num("m", value)?;
        Ok((m, m))
    }
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

impl CampaignConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key.trim() {
            "primes" => self.primes = parse_list(key, value)?,
            "m" => (self.m_min, self.m_max) = parse_range(value)?,
            "max_q" => self.max_q = parse_num(key, value)?,
            "families" => {
                self.families = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()?
            }
            "coeff_min" => self.coeff_min = parse_num(key, value)?,
            "coeff_max" => self.coeff_max = parse_num(key, value)?,
            "monomial_degree" => self.monomial_degree = parse_num(key, value)?,
            "dense_degree" => self.dense_degree = parse_num(key, value)?,
            "dense_stride" => self.dense_stride = parse_num(key, value)?,
            "rational_degree" => self.rational_degree = parse_num(key, value)?,
            "rational_stride" => self.rational_stride = parse_num(key, value)?,
            "laurent_degree" => self.laurent_degree = parse_num(key, value)?,
            "char_stride" => self.char_stride = parse_num(key, value)?,
            "oracle_stride" => self.oracle_stride = parse_num(key, value)?,
            "oracle_full_q" => self.oracle_full_q = parse_num(key, value)?,
            "tol_eval" => self.tol_eval = parse_num(key, value)?,
            "tol_bound" => self.tol_bound = parse_num(key, value)?,
            "jobs" => self.jobs = parse_num(key, value)?,
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Reads a configuration file body on top of the defaults.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
                line: i + 1,
                msg: format!("expected key = value, got '{line}'"),
            })?;
            cfg.set(key, value)
                .map_err(|msg| CliError::Config { line: i + 1, msg })?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: &str| Err(CliError::Input(msg.to_owned()));
        if self.primes.is_empty() {
            return bad("the prime list is empty");
        }
        if let Some(p) = self
            .primes
            .iter()
            .find(|&&p| charsum_core::padic::PrimePower::new(p, 1).is_err())
        {
            return Err(CliError::Input(format!("{p} is not a prime")));
        }
        if self.m_min == 0 || self.m_min > self.m_max {
            return bad("the exponent range must be a nonempty range of positive integers");
        }
        if self.coeff_min > self.coeff_max {
            return bad("the coefficient range is empty");
        }
        if self.families.is_empty() {
            return bad("no generator families selected");
        }
        if self.dense_stride == 0
            || self.rational_stride == 0
            || self.char_stride == 0
            || self.oracle_stride == 0
            || self.jobs == 0
        {
            return bad("strides and the job count must be positive");
        }
        if !(self.tol_eval > 0.0 && self.tol_bound >= 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }
}
