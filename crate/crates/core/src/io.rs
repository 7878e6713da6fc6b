//! JSON sequence files: `{"a": <int>, "values": ["p/q" | "p" | "<decimal>", ...]}`.
//!
//! Rational literals make an exact sequence, decimal literals an
//! approximate one. A file must not mix the two.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{Mode, Scalar, Seq};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqFile {
    pub a: i64,
    pub values: Vec<String>,
}

fn is_decimal_literal(s: &str) -> bool {
    s.contains(['.', 'e', 'E']) || s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("nan")
}

/// Parses one value literal.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty literal".into()));
    }
    if is_decimal_literal(s) {
        let x = f64::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("{s:?} is not finite")));
        }
        return Ok(Scalar::Approx(x));
    }
    let parse_int =
        |t: &str| BigInt::from_str(t.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("{s:?}: zero denominator")));
            }
            Ok(Scalar::Exact(BigRational::new(parse_int(n)?, d)))
        }
        None => Ok(Scalar::Exact(BigRational::from_integer(parse_int(s)?))),
    }
}

impl SeqFile {
    pub fn to_seq(&self) -> Result<Seq> {
        let values = self.values.iter().map(|v| parse_scalar(v)).collect::<Result<Vec<_>>>()?;
        let mode = values.first().map(Scalar::mode).unwrap_or(Mode::Exact);
        if values.iter().any(|v| v.mode() != mode) {
            return Err(Error::Parse("file mixes rational and decimal literals".into()));
        }
        Seq::with_mode(self.a, mode, values)
    }

    pub fn from_seq(s: &Seq) -> Self {
        SeqFile { a: s.a(), values: s.values().iter().map(|v| v.to_string()).collect() }
    }
}

pub fn parse_seq_json(text: &str) -> Result<Seq> {
    let file: SeqFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_seq()
}

pub fn seq_to_json(s: &Seq) -> String {
    serde_json::to_string(&SeqFile::from_seq(s)).expect("serializable")
}

pub fn read_seq(path: &Path) -> Result<Seq> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_seq_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_file() {
        let s = parse_seq_json(r#"{"a": -1, "values": ["1/2", "3", "-4/6"]}"#).unwrap();
        assert_eq!(s.mode(), Mode::Exact);
        assert_eq!(s.a(), -1);
        assert_eq!(s.at(1), &Scalar::ratio(-2, 3));
    }

    #[test]
    fn approx_file() {
        let s = parse_seq_json(r#"{"a": 0, "values": ["1.5", "2e-3"]}"#).unwrap();
        assert_eq!(s.mode(), Mode::Approx);
        assert_eq!(s.at(1), &Scalar::Approx(0.002));
    }

    #[test]
    fn mixed_file_rejected() {
        assert!(parse_seq_json(r#"{"a": 0, "values": ["1", "2.0"]}"#).is_err());
        assert!(parse_seq_json(r#"{"a": 0, "values": ["1/0"]}"#).is_err());
        assert!(parse_seq_json(r#"{"a": 0, "values": ["inf"]}"#).is_err());
    }

    #[test]
    fn roundtrip_preserves_mode() {
        let s = Seq::approx(2, vec![2.0, -1e-300, 0.1]);
        assert_eq!(parse_seq_json(&seq_to_json(&s)).unwrap(), s);
        let e = Seq::from_ratios(0, &[(1, 3), (4, 1)]);
        assert_eq!(parse_seq_json(&seq_to_json(&e)).unwrap(), e);
    }
}
