//! Sequences given as pure functions of the index.
//!
//! Built-in generators are named by a small spec language used on the
//! command line: terms joined by `+`, each one of `geom:<ratio>`,
//! `poly:c0,c1,...`, `factorial`, `invfactorial`, `npow_over_e`,
//! `indicator:<index>`. Coefficients are rational literals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::io::parse_scalar;
use crate::seqcore::{IntInterval, Mode, Scalar, Seq};

pub trait SequenceGenerator {
    fn value(&self, n: i64, mode: Mode) -> Result<Scalar>;

    fn sample(&self, window: IntInterval, mode: Mode) -> Result<Seq> {
        let values = window.iter().map(|n| self.value(n, mode)).collect::<Result<Vec<_>>>()?;
        Seq::with_mode(window.a, mode, values)
    }
}

impl<F> SequenceGenerator for F
where
    F: Fn(i64, Mode) -> Result<Scalar>,
{
    fn value(&self, n: i64, mode: Mode) -> Result<Scalar> {
        self(n, mode)
    }
}

/// A finite sequence read as a generator, zero outside its domain.
pub struct ZeroExtended<'a>(pub &'a Seq);

impl SequenceGenerator for ZeroExtended<'_> {
    fn value(&self, n: i64, mode: Mode) -> Result<Scalar> {
        if mode != self.0.mode() {
            return Err(Error::MixedMode);
        }
        Ok(self.0.get(n).cloned().unwrap_or_else(|| Scalar::zero(mode)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `ratio^n`
    Geom(BigRational),
    /// `sum_i c_i n^i`
    Poly(Vec<BigRational>),
    /// `n!` for `n >= 0`
    Factorial,
    /// `1/n!` for `n >= 0`
    InvFactorial,
    /// `(n/e)^n` with `0^0 = 1`; approximate only
    NPowOverE,
    /// 1 at the given index, 0 elsewhere
    Indicator(i64),
    Sum(Vec<Generator>),
}

fn factorial(n: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("factorial of negative index {n}")));
    }
    Ok((1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

fn finite(x: f64, what: &str) -> Result<Scalar> {
    if x.is_finite() {
        Ok(Scalar::Approx(x))
    } else {
        Err(Error::InvalidArgument(format!("{what} is not representable as f64")))
    }
}

impl SequenceGenerator for Generator {
    fn value(&self, n: i64, mode: Mode) -> Result<Scalar> {
        match self {
            Generator::Geom(q) => match mode {
                Mode::Exact => {
                    if q.is_zero() && n < 0 {
                        return Err(Error::DivisorVanishes(n));
                    }
                    let e = i32::try_from(n).map_err(|_| Error::InvalidArgument(format!("exponent {n}")))?;
                    Ok(Scalar::Exact(num_traits::pow::Pow::pow(q, e)))
                }
                Mode::Approx => {
                    let e = i32::try_from(n).map_err(|_| Error::InvalidArgument(format!("exponent {n}")))?;
                    Ok(Scalar::Approx(q.to_f64().unwrap_or(f64::NAN).powi(e)))
                }
            },
            Generator::Poly(c) => {
                let nn = BigRational::from_integer(BigInt::from(n));
                let v = c.iter().rev().fold(BigRational::zero(), |acc, ci| acc * &nn + ci);
                Scalar::Exact(v).to_mode(mode)
            }
            Generator::Factorial => match mode {
                Mode::Exact => Ok(Scalar::Exact(BigRational::from_integer(factorial(n)?))),
                Mode::Approx => finite(factorial(n)?.to_f64().unwrap_or(f64::INFINITY), "n!"),
            },
            Generator::InvFactorial => match mode {
                Mode::Exact => Ok(Scalar::Exact(BigRational::new(BigInt::one(), factorial(n)?))),
                Mode::Approx => {
                    let v = BigRational::new(BigInt::one(), factorial(n)?);
                    Ok(Scalar::Approx(v.to_f64().unwrap_or(0.0)))
                }
            },
            Generator::NPowOverE => match mode {
                Mode::Exact => Err(Error::ModeRequired(Mode::Approx)),
                Mode::Approx => {
                    if n < 0 {
                        return Err(Error::InvalidArgument(format!("(n/e)^n at negative index {n}")));
                    }
                    if n == 0 {
                        return Ok(Scalar::Approx(1.0));
                    }
                    let x = n as f64;
                    finite((x * x.ln() - x).exp(), "(n/e)^n")
                }
            },
            Generator::Indicator(i) => Ok(Scalar::from_i64((n == *i) as i64, mode)),
            Generator::Sum(terms) => {
                let mut acc = Scalar::zero(mode);
                for t in terms {
                    acc = acc.try_add(&t.value(n, mode)?)?;
                }
                Ok(acc)
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    match parse_scalar(s)? {
        Scalar::Exact(q) => Ok(q),
        Scalar::Approx(x) => BigRational::from_float(x).ok_or_else(|| Error::Parse(s.to_string())),
    }
}

fn parse_term(s: &str) -> Result<Generator> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (s.trim(), None),
    };
    let need = || arg.ok_or_else(|| Error::Parse(format!("{name} needs a parameter")));
    match name {
        "geom" => Ok(Generator::Geom(parse_rational(need()?)?)),
        "poly" => {
            let coeffs = need()?.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            Ok(Generator::Poly(coeffs))
        }
        "factorial" => Ok(Generator::Factorial),
        "invfactorial" => Ok(Generator::InvFactorial),
        "npow_over_e" => Ok(Generator::NPowOverE),
        "indicator" => {
            let a = need()?;
            let i = a.parse().map_err(|_| Error::Parse(format!("bad index {a:?}")))?;
            Ok(Generator::Indicator(i))
        }
        _ => Err(Error::Parse(format!("unknown generator {name:?}"))),
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = s.split('+').map(parse_term).collect::<Result<Vec<_>>>()?;
        if terms.len() == 1 {
            Ok(terms.pop().expect("one term"))
        } else {
            Ok(Generator::Sum(terms))
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Geom(q) => write!(f, "geom:{q}"),
            Generator::Poly(c) => {
                let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", cs.join(","))
            }
            Generator::Factorial => f.write_str("factorial"),
            Generator::InvFactorial => f.write_str("invfactorial"),
            Generator::NPowOverE => f.write_str("npow_over_e"),
            Generator::Indicator(i) => write!(f, "indicator:{i}"),
            Generator::Sum(t) => {
                let ts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                f.write_str(&ts.join("+"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let g: Generator = "geom:1/2+geom:1/3".parse().unwrap();
        assert_eq!(g.value(2, Mode::Exact).unwrap(), Scalar::ratio(13, 36));
        let p: Generator = "poly:1,2".parse().unwrap();
        assert_eq!(p.value(5, Mode::Exact).unwrap(), Scalar::int(11));
        assert_eq!(p.value(5, Mode::Approx).unwrap(), Scalar::Approx(11.0));
        let fact: Generator = "factorial".parse().unwrap();
        assert_eq!(fact.value(5, Mode::Exact).unwrap(), Scalar::int(120));
        assert_eq!(Generator::Indicator(3).value(3, Mode::Exact).unwrap(), Scalar::int(1));
        assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
    }

    #[test]
    fn npow_over_e_values() {
        let g = Generator::NPowOverE;
        assert_eq!(g.value(0, Mode::Approx).unwrap(), Scalar::Approx(1.0));
        let q1 = g.value(1, Mode::Approx).unwrap().to_f64();
        assert!((q1 - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(g.value(1, Mode::Exact), Err(Error::ModeRequired(Mode::Approx)));
    }

    #[test]
    fn bad_specs() {
        assert!("geom".parse::<Generator>().is_err());
        assert!("wat:3".parse::<Generator>().is_err());
        assert!("poly:1,x".parse::<Generator>().is_err());
    }
}
