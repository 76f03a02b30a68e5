//! One output row per case, written as CSV or JSON lines with identical fields.

use std::io::Write;

use charsum_core::bounds::BOUND_NAMES;
use serde_json::Value;

/// Bumped whenever the column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct CaseRow {
    pub id: u64,
    pub family: String,
    pub p: u64,
    pub m: u32,
    pub f: String,
    pub g: String,
    pub c: u64,
    pub kappa: u8,
    pub classification: String,
    pub t: Option<u32>,
    pub ell: Option<u32>,
    pub brute_abs: Option<f64>,
    pub fast_abs: f64,
    pub eval_err: Option<f64>,
    /// The class plan of reductions to pure sums applied.
    pub reduced: bool,
    /// Aligned with [`BOUND_NAMES`]; `None` when not applicable.
    pub bounds: Vec<Option<f64>>,
    pub trivial: f64,
    pub best: f64,
    pub best_name: String,
    pub ratio: f64,
    pub ok_bounds: bool,
    pub ok_eval: bool,
    pub ok_local: bool,
    pub ok_structural: bool,
    pub ok_identity: bool,
    pub ok_oracle: bool,
    /// Residues whose local law was checked.
    pub n_local: u32,
    pub n_multone: u32,
    /// Structural relations checked for this character class.
    pub relations: u32,
    pub identity_checked: bool,
    pub oracle_checked: bool,
    pub failures: Vec<String>,
    pub time_us: f64,
}

/// Columns excluded from determinism comparisons.
pub const TIMING_COLUMNS: &[&str] = &["time_us"];

fn opt<T: Into<Value>>(v: Option<T>) -> Value {
    v.map_or(Value::Null, Into::into)
}

impl CaseRow {
    pub fn passed(&self) -> bool {
        self.ok_bounds
            && self.ok_eval
            && self.ok_local
            && self.ok_structural
            && self.ok_identity
            && self.ok_oracle
    }

    pub fn columns() -> Vec<String> {
        let head = [
            "id",
            "family",
            "p",
            "m",
            "f",
            "g",
            "c",
            "kappa",
            "classification",
            "t",
            "ell",
            "brute_abs",
            "fast_abs",
            "eval_err",
            "reduced",
        ];
        let tail = [
            "trivial",
            "best",
            "best_name",
            "ratio",
            "ok_bounds",
            "ok_eval",
            "ok_local",
            "ok_structural",
            "ok_identity",
            "ok_oracle",
            "n_local",
            "n_multone",
            "relations",
            "identity_checked",
            "oracle_checked",
            "failures",
            "time_us",
        ];
        head.iter()
            .chain(BOUND_NAMES)
            .chain(tail.iter())
            .map(|s| s.to_string())
            .collect()
    }

    /// Field values in [`CaseRow::columns`] order.
    pub fn values(&self) -> Vec<Value> {
        let mut v: Vec<Value> = vec![
            self.id.into(),
            self.family.clone().into(),
            self.p.into(),
            self.m.into(),
            self.f.clone().into(),
            self.g.clone().into(),
            self.c.into(),
            self.kappa.into(),
            self.classification.clone().into(),
            opt(self.t),
            opt(self.ell),
            opt(self.brute_abs),
            self.fast_abs.into(),
            opt(self.eval_err),
            self.reduced.into(),
        ];
        v.extend(self.bounds.iter().map(|b| opt(*b)));
        v.extend([
            self.trivial.into(),
            self.best.into(),
            self.best_name.clone().into(),
            self.ratio.into(),
            self.ok_bounds.into(),
            self.ok_eval.into(),
            self.ok_local.into(),
            self.ok_structural.into(),
            self.ok_identity.into(),
            self.ok_oracle.into(),
            self.n_local.into(),
            self.n_multone.into(),
            self.relations.into(),
            self.identity_checked.into(),
            self.oracle_checked.into(),
            self.failures.join(";").into(),
            self.time_us.into(),
        ]);
        v
    }

    /// The row as CSV cells: empty for missing values, plain text otherwise.
    pub fn csv_record(&self) -> Vec<String> {
        self.values()
            .into_iter()
            .map(|v| match v {
                Value::Null => String::new(),
                Value::String(s) => s,
                other => other.to_string(),
            })
            .collect()
    }

    /// One JSON object with keys in column order.
    pub fn json_line(&self) -> String {
        let body: Vec<String> = Self::columns()
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{}:{v}", Value::String(k.clone())))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

/// CSV writer with a versioned comment line ahead of the header.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "# charsum cases schema v{SCHEMA_VERSION}")?;
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(CaseRow::columns())?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, row: &CaseRow) -> std::io::Result<()> {
        self.inner.write_record(row.csv_record())?;
        Ok(())
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CaseRow {
        CaseRow {
            id: 7,
            family: "monomial".into(),
            p: 5,
            m: 2,
            f: "(0,0,1)/(1)".into(),
            g: "(1)/(1)".into(),
            c: 20,
            kappa: 0,
            classification: "NON_DEGENERATE".into(),
            t: Some(0),
            ell: None,
            brute_abs: Some(5.0),
            fast_abs: 5.0,
            eval_err: Some(0.0),
            reduced: true,
            bounds: BOUND_NAMES.iter().map(|_| None).collect(),
            trivial: 25.0,
            best: 25.0,
            best_name: "trivial".into(),
            ratio: 0.2,
            ok_bounds: true,
            ok_eval: true,
            ok_local: true,
            ok_structural: true,
            ok_identity: true,
            ok_oracle: true,
            n_local: 4,
            n_multone: 0,
            relations: 1,
            identity_checked: false,
            oracle_checked: true,
            failures: vec![],
            time_us: 1.5,
        }
    }

    #[test]
    fn csv_and_json_carry_the_same_fields() {
        let row = sample();
        assert_eq!(CaseRow::columns().len(), row.values().len());
        let json: serde_json::Map<String, Value> = serde_json::from_str(&row.json_line()).unwrap();
        assert_eq!(json.len(), CaseRow::columns().len());
        assert_eq!(json["f"], "(0,0,1)/(1)");
        assert_eq!(json["main_f"], Value::Null);
        let mut buf = Vec::new();
        let mut sink = CsvSink::new(&mut buf).unwrap();
        sink.write(&row).unwrap();
        sink.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# charsum cases schema v1"));
        assert!(lines.next().unwrap().starts_with("id,family,p,m,f,g"));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("7,monomial,5,2,\"(0,0,1)/(1)\",(1)/(1),20,0,NON_DEGENERATE,0,,5.0,"));
        assert!(row.passed());
    }
}
