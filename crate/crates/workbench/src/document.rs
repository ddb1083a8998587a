//! The `.rgw.json` space document: parsing, normalization and conversion
//! to [`SpaceSpec`].
//!
//! ```json
//! {
//!   "name": "heisenberg",
//!   "dim_h": 0,
//!   "dim_m": 3,
//!   "exact": true,
//!   "brackets": [
//!     {"i": 0, "j": 1, "coeffs": ["0", "0", "1"]}
//!   ],
//!   "metric": [
//!     "1", "0", "0",
//!     "0", "1", "0",
//!     "0", "0", "1"
//!   ]
//! }
//! ```
//!
//! Indices are zero-based over the combined basis, `h` first. Entries with
//! `i > j` are stored as `(j, i)` with negated coefficients; omitted pairs
//! are zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rgw_core::scalar::parse_rational;
use rgw_core::{Matrix, Rational, Scalar, SpaceSpec};
use serde::Deserialize;
use thiserror::Error;

/// A coefficient as written in a document.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => q.to_f64(),
            Number::Float(x) => *x,
        }
    }

    /// Exact value; floats are read through their shortest decimal form.
    pub fn to_rational(&self) -> Rational {
        match self {
            Number::Exact(q) => q.clone(),
            Number::Float(x) => decimal_rational(*x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Exact(q) => q.is_exact_zero(),
            Number::Float(x) => *x == 0.0,
        }
    }

    fn negate(&self) -> Number {
        match self {
            Number::Exact(q) => Number::Exact(-q.clone()),
            Number::Float(x) => Number::Float(-x),
        }
    }

    fn render(&self) -> String {
        match self {
            Number::Exact(q) => format!("\"{q}\""),
            Number::Float(x) => {
                let x = if *x == 0.0 { 0.0 } else { *x };
                serde_json::to_string(&x).expect("finite float")
            }
        }
    }
}

fn decimal_rational(x: f64) -> Rational {
    parse_rational(&format!("{x}")).expect("finite floats print as decimals")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<Number>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDocument {
    pub name: String,
    pub dim_h: usize,
    pub dim_m: usize,
    pub exact: bool,
    /// Nonzero brackets with `i < j`, sorted by `(i, j)`.
    pub brackets: Vec<BracketEntry>,
    /// Row-major `dim_m x dim_m`.
    pub metric: Vec<Number>,
    /// Row-major `dim_m x dim_m` matrices.
    pub isotropy_generators: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{path}: {message}")]
    Value { path: String, message: String },

    #[error("{path}: diagonal bracket entry (i = j = {index})")]
    DiagonalEntry { path: String, index: usize },

    #[error("{path}: duplicate bracket entry for ({i}, {j}), first given at {first}")]
    DuplicateEntry { path: String, first: String, i: usize, j: usize },

    #[error("{path}: index {index} out of range (basis has {limit} vectors)")]
    IndexOutOfRange { path: String, index: usize, limit: usize },

    #[error("{path}: expected {expected} values, found {found}")]
    Length { path: String, expected: usize, found: usize },

    #[error("metric[{row}][{col}] and metric[{col}][{row}] differ")]
    NonSymmetricMetric { row: usize, col: usize },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    i: usize,
    j: usize,
    coeffs: Vec<RawNumber>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    #[serde(default)]
    name: String,
    #[serde(default)]
    dim_h: usize,
    dim_m: usize,
    #[serde(default)]
    exact: bool,
    #[serde(default)]
    brackets: Vec<RawEntry>,
    metric: Vec<RawNumber>,
    #[serde(default)]
    isotropy_generators: Vec<Vec<RawNumber>>,
}

fn number(raw: &RawNumber, exact: bool, path: impl Fn() -> String) -> Result<Number, DocumentError> {
    let bad = |message: String| DocumentError::Value { path: path(), message };
    match raw {
        RawNumber::Number(x) if !x.is_finite() => Err(bad("non-finite number".into())),
        RawNumber::Number(x) if exact => Ok(Number::Exact(decimal_rational(*x))),
        RawNumber::Number(x) => Ok(Number::Float(*x)),
        RawNumber::Text(s) => {
            let q = parse_rational(s).ok_or_else(|| bad(format!("cannot read {s:?} as a rational number")))?;
            Ok(if exact { Number::Exact(q) } else { Number::Float(q.to_f64()) })
        }
    }
}

fn numbers(raw: &[RawNumber], exact: bool, path: &str) -> Result<Vec<Number>, DocumentError> {
    raw.iter().enumerate().map(|(k, v)| number(v, exact, || format!("{path}[{k}]"))).collect()
}

fn check_len(path: &str, expected: usize, found: usize) -> Result<(), DocumentError> {
    if expected != found {
        return Err(DocumentError::Length { path: path.into(), expected, found });
    }
    Ok(())
}

/// Parse a document. `force_exact` reads every value as a rational even
/// when the document does not set the `exact` flag.
pub fn parse_document_with(text: &str, force_exact: bool) -> Result<SpaceDocument, DocumentError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    let exact = raw.exact || force_exact;
    if raw.dim_m == 0 {
        return Err(DocumentError::Value { path: "dim_m".into(), message: "must be positive".into() });
    }
    let n = raw.dim_h + raw.dim_m;
    let mut seen: BTreeMap<(usize, usize), (String, Vec<Number>)> = BTreeMap::new();
    for (idx, e) in raw.brackets.iter().enumerate() {
        let path = format!("brackets[{idx}]");
        for index in [e.i, e.j] {
            if index >= n {
                return Err(DocumentError::IndexOutOfRange { path, index, limit: n });
            }
        }
        if e.i == e.j {
            return Err(DocumentError::DiagonalEntry { path, index: e.i });
        }
        check_len(&format!("{path}.coeffs"), n, e.coeffs.len())?;
        let mut coeffs = numbers(&e.coeffs, exact, &format!("{path}.coeffs"))?;
        let key = if e.i < e.j {
            (e.i, e.j)
        } else {
            coeffs = coeffs.iter().map(Number::negate).collect();
            (e.j, e.i)
        };
        if let Some((first, _)) = seen.get(&key) {
            return Err(DocumentError::DuplicateEntry { path, first: first.clone(), i: key.0, j: key.1 });
        }
        seen.insert(key, (path, coeffs));
    }
    let dm = raw.dim_m;
    check_len("metric", dm * dm, raw.metric.len())?;
    let metric = numbers(&raw.metric, exact, "metric")?;
    for row in 0..dm {
        for col in (row + 1)..dm {
            if metric[row * dm + col] != metric[col * dm + row] {
                return Err(DocumentError::NonSymmetricMetric { row, col });
            }
        }
    }
    let mut isotropy_generators = Vec::new();
    for (idx, g) in raw.isotropy_generators.iter().enumerate() {
        let path = format!("isotropy_generators[{idx}]");
        check_len(&path, dm * dm, g.len())?;
        isotropy_generators.push(numbers(g, exact, &path)?);
    }
    let brackets = seen
        .into_iter()
        .filter(|(_, (_, c))| !c.iter().all(Number::is_zero))
        .map(|((i, j), (_, coeffs))| BracketEntry { i, j, coeffs })
        .collect();
    Ok(SpaceDocument { name: raw.name, dim_h: raw.dim_h, dim_m: dm, exact, brackets, metric, isotropy_generators })
}

pub fn parse_document(text: &str) -> Result<SpaceDocument, DocumentError> {
    parse_document_with(text, false)
}

fn render_rows(out: &mut String, values: &[Number], width: usize, indent: &str) {
    let rows: Vec<String> = values
        .chunks(width)
        .map(|row| row.iter().map(Number::render).collect::<Vec<_>>().join(", "))
        .collect();
    for (k, row) in rows.iter().enumerate() {
        let sep = if k + 1 < rows.len() { "," } else { "" };
        let _ = writeln!(out, "{indent}{row}{sep}");
    }
}

impl SpaceDocument {
    /// Normalized text: fixed key order, one bracket per line, one metric
    /// row per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"name\": {},", serde_json::to_string(&self.name).expect("string"));
        let _ = writeln!(out, "  \"dim_h\": {},", self.dim_h);
        let _ = writeln!(out, "  \"dim_m\": {},", self.dim_m);
        let _ = writeln!(out, "  \"exact\": {},", self.exact);
        if self.brackets.is_empty() {
            out.push_str("  \"brackets\": [],\n");
        } else {
            out.push_str("  \"brackets\": [\n");
            for (k, e) in self.brackets.iter().enumerate() {
                let coeffs: Vec<String> = e.coeffs.iter().map(Number::render).collect();
                let sep = if k + 1 < self.brackets.len() { "," } else { "" };
                let _ = writeln!(out, "    {{\"i\": {}, \"j\": {}, \"coeffs\": [{}]}}{sep}", e.i, e.j, coeffs.join(", "));
            }
            out.push_str("  ],\n");
        }
        out.push_str("  \"metric\": [\n");
        render_rows(&mut out, &self.metric, self.dim_m, "    ");
        if self.isotropy_generators.is_empty() {
            out.push_str("  ]\n}\n");
            return out;
        }
        out.push_str("  ],\n  \"isotropy_generators\": [\n");
        for (k, g) in self.isotropy_generators.iter().enumerate() {
            out.push_str("    [\n");
            render_rows(&mut out, g, self.dim_m, "      ");
            let sep = if k + 1 < self.isotropy_generators.len() { "," } else { "" };
            let _ = writeln!(out, "    ]{sep}");
        }
        out.push_str("  ]\n}\n");
        out
    }

    pub fn dim_g(&self) -> usize {
        self.dim_h + self.dim_m
    }

    fn spec_with<S: Scalar>(&self, f: impl Fn(&Number) -> S) -> SpaceSpec<S> {
        let dm = self.dim_m;
        let brackets: Vec<(usize, usize, Vec<S>)> =
            self.brackets.iter().map(|e| (e.i, e.j, e.coeffs.iter().map(&f).collect())).collect();
        let square = |v: &[Number]| Matrix::from_rows(&v.chunks(dm).map(|r| r.iter().map(&f).collect()).collect::<Vec<_>>());
        let mut spec = SpaceSpec::from_brackets(self.dim_h, dm, &brackets, square(&self.metric));
        spec.isotropy_generators = self.isotropy_generators.iter().map(|g| square(g)).collect();
        spec
    }

    pub fn to_f64_spec(&self) -> SpaceSpec<f64> {
        self.spec_with(Number::to_f64)
    }

    pub fn to_exact_spec(&self) -> SpaceSpec<Rational> {
        self.spec_with(Number::to_rational)
    }

    /// The same document with every value read as a rational.
    pub fn into_exact(mut self) -> Self {
        let conv = |v: &mut Vec<Number>| v.iter_mut().for_each(|x| *x = Number::Exact(x.to_rational()));
        self.brackets.iter_mut().for_each(|e| conv(&mut e.coeffs));
        conv(&mut self.metric);
        self.isotropy_generators.iter_mut().for_each(conv);
        self.exact = true;
        self
    }

    fn from_spec_with<S: Scalar>(name: &str, spec: &SpaceSpec<S>, exact: bool, f: impl Fn(&S) -> Number) -> Self {
        let n = spec.dim_g();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let coeffs: Vec<S> = spec.structure.basis_product(i, j);
                if coeffs.iter().any(|c| !c.is_exact_zero()) {
                    brackets.push(BracketEntry { i, j, coeffs: coeffs.iter().map(&f).collect() });
                }
            }
        }
        SpaceDocument {
            name: name.into(),
            dim_h: spec.dim_h,
            dim_m: spec.dim_m,
            exact,
            brackets,
            metric: spec.gram.data.iter().map(&f).collect(),
            isotropy_generators: spec.isotropy_generators.iter().map(|g| g.data.iter().map(&f).collect()).collect(),
        }
    }

    pub fn from_exact_spec(name: &str, spec: &SpaceSpec<Rational>) -> Self {
        Self::from_spec_with(name, spec, true, |q| Number::Exact(q.clone()))
    }

    pub fn from_f64_spec(name: &str, spec: &SpaceSpec<f64>) -> Self {
        Self::from_spec_with(name, spec, false, |x| Number::Float(*x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SU2: &str = r#"{
        "name": "su2", "dim_m": 3, "exact": true,
        "brackets": [
            {"i": 1, "j": 2, "coeffs": [1, 0, 0]},
            {"i": 0, "j": 1, "coeffs": ["0", "0", "1"]},
            {"i": 2, "j": 0, "coeffs": [0, "1", 0]}
        ],
        "metric": [1, 0, 0, 0, 1, 0, 0, 0, 1]
    }"#;

    #[test]
    fn minimal_abelian() {
        let d = parse_document(r#"{"dim_h": 0, "dim_m": 2, "brackets": [], "metric": [1, 0, 0, 1]}"#).unwrap();
        assert_eq!(d.dim_m, 2);
        assert!(d.brackets.is_empty() && !d.exact);
        assert_eq!(d.to_f64_spec().gram, Matrix::identity(2));
    }

    #[test]
    fn su2_roundtrip_fixpoint() {
        let d = parse_document(SU2).unwrap();
        assert_eq!(d.brackets.len(), 3);
        // (2, 0) is stored as (0, 2) with the opposite sign
        assert_eq!(d.brackets[1].i, 0);
        assert_eq!(d.brackets[1].j, 2);
        assert_eq!(d.brackets[1].coeffs[1], Number::Exact(Rational::from_i64(-1)));
        let text = d.to_json();
        let again = parse_document(&text).unwrap();
        assert_eq!(again, d);
        assert_eq!(again.to_json(), text);
        assert_eq!(d.to_exact_spec(), rgw_core::examples::su2(&[Rational::from_i64(1), Rational::from_i64(1), Rational::from_i64(1)]));
    }

    #[test]
    fn float_roundtrip_fixpoint() {
        let spec = rgw_core::examples::su2::<f64>(&[0.1, 1.0 / 3.0, 2.5e-7]);
        let d = SpaceDocument::from_f64_spec("f", &spec);
        let text = d.to_json();
        let again = parse_document(&text).unwrap();
        assert_eq!(again.to_f64_spec(), spec);
        assert_eq!(again.to_json(), text);
    }

    #[test]
    fn diagonal_entry() {
        let e = parse_document(r#"{"dim_m": 3, "brackets": [{"i": 2, "j": 2, "coeffs": [0, 0, 0]}], "metric": [1,0,0,0,1,0,0,0,1]}"#)
            .unwrap_err();
        assert!(matches!(e, DocumentError::DiagonalEntry { index: 2, .. }));
        assert!(e.to_string().contains("diagonal bracket entry"));
    }

    #[test]
    fn duplicate_entry() {
        let text = r#"{"dim_m": 2, "brackets": [{"i": 0, "j": 1, "coeffs": [0, 1]}, {"i": 1, "j": 0, "coeffs": [0, -1]}], "metric": [1,0,0,1]}"#;
        let e = parse_document(text).unwrap_err();
        assert_eq!(e, DocumentError::DuplicateEntry { path: "brackets[1]".into(), first: "brackets[0]".into(), i: 0, j: 1 });
    }

    #[test]
    fn out_of_range_and_lengths() {
        let e = parse_document(r#"{"dim_m": 2, "brackets": [{"i": 0, "j": 5, "coeffs": [0, 1]}], "metric": [1,0,0,1]}"#).unwrap_err();
        assert!(matches!(e, DocumentError::IndexOutOfRange { index: 5, limit: 2, .. }));
        let e = parse_document(r#"{"dim_m": 2, "metric": [1,0,1]}"#).unwrap_err();
        assert!(matches!(e, DocumentError::Length { expected: 4, found: 3, .. }));
    }

    #[test]
    fn non_symmetric_metric() {
        let e = parse_document(r#"{"dim_m": 2, "metric": [1, 0.5, 0, 1]}"#).unwrap_err();
        assert_eq!(e, DocumentError::NonSymmetricMetric { row: 0, col: 1 });
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_document("{\n  \"dim_m\": 2,\n  \"metric\": [1, 0,, 1]\n}").unwrap_err();
        match e {
            DocumentError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 19)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_document(r#"{"dim_m": 1, "metric": ["x"]}"#), Err(DocumentError::Value { .. })));
        assert!(matches!(parse_document(r#"{"dim_m": 1, "metric": [1], "extra": 0}"#), Err(DocumentError::Syntax { .. })));
    }

    #[test]
    fn forced_exact_reads_decimals() {
        let d = parse_document_with(r#"{"dim_m": 1, "metric": [0.1]}"#, true).unwrap();
        assert_eq!(d.metric[0], Number::Exact(parse_rational("1/10").unwrap()));
        let d = parse_document(r#"{"dim_m": 1, "metric": ["1/3"]}"#).unwrap().into_exact();
        assert_eq!(d.metric[0].to_rational(), parse_rational("0.3333333333333333").unwrap());
    }
}
