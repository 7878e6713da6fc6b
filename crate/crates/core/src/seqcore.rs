//! Integer-interval sequences and the arithmetic substrate.
//!
//! A [`Seq`] is a finite sequence indexed by an integer interval `[a, b]`.
//! Values are [`Scalar`]s, either exact big rationals or `f64`
//! approximations; a sequence never mixes the two. Order decisions go
//! through a [`ComparisonPolicy`] so that approximate data get an explicit
//! equality band instead of silent float comparisons.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SignViolationKind};

/// Default equality band for approximate comparisons.
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// A finite integer interval `{n : a <= n <= b}`; empty when `a > b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntInterval {
    pub a: i64,
    pub b: i64,
}

impl IntInterval {
    pub fn new(a: i64, b: i64) -> Self {
        IntInterval { a, b }
    }

    pub fn is_empty(&self) -> bool {
        self.a > self.b
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.b - self.a + 1) as usize
        }
    }

    pub fn contains(&self, n: i64) -> bool {
        self.a <= n && n <= self.b
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.a..=self.b
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// An exact rational or a floating approximation.
///
/// The operator impls panic on mixed-mode operands; use the `try_*`
/// methods where the modes are not already known to agree.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_i64(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::int(n),
            Mode::Approx => Scalar::Approx(n as f64),
        }
    }

    pub fn zero(mode: Mode) -> Self {
        Scalar::from_i64(0, mode)
    }

    pub fn one(mode: Mode) -> Self {
        Scalar::from_i64(1, mode)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Approx(_) => Mode::Approx,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(x) => *x,
        }
    }

    /// Re-express in another mode. Exact -> Approx rounds; Approx -> Exact
    /// is the exact binary value of the float.
    pub fn to_mode(&self, mode: Mode) -> Result<Self> {
        match (self, mode) {
            (Scalar::Exact(_), Mode::Exact) | (Scalar::Approx(_), Mode::Approx) => Ok(self.clone()),
            (Scalar::Exact(_), Mode::Approx) => Ok(Scalar::Approx(self.to_f64())),
            (Scalar::Approx(x), Mode::Exact) => BigRational::from_float(*x)
                .map(Scalar::Exact)
                .ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite"))),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Approx(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Approx(x) => Scalar::Approx(x.abs()),
        }
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Ok(Scalar::Exact(x + y)),
            (Scalar::Approx(x), Scalar::Approx(y)) => Ok(Scalar::Approx(x + y)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Ok(Scalar::Exact(x - y)),
            (Scalar::Approx(x), Scalar::Approx(y)) => Ok(Scalar::Approx(x - y)),
            _ => Err(Error::MixedMode),
        }
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Ok(Scalar::Exact(x * y)),
            (Scalar::Approx(x), Scalar::Approx(y)) => Ok(Scalar::Approx(x * y)),
            _ => Err(Error::MixedMode),
        }
    }

    /// Division; an exact-zero divisor is reported as `DivisorVanishes(0)`,
    /// callers that know the index remap it.
    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_exact_zero() {
            return Err(Error::DivisorVanishes(0));
        }
        match (self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Ok(Scalar::Exact(x / y)),
            (Scalar::Approx(x), Scalar::Approx(y)) => Ok(Scalar::Approx(x / y)),
            _ => Err(Error::MixedMode),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs).expect(concat!("Scalar::", stringify!($method)))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, try_add);
scalar_binop!(Sub, sub, try_sub);
scalar_binop!(Mul, mul, try_mul);
scalar_binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            // Debug formatting keeps a '.' or exponent so the literal
            // parses back as approximate.
            Scalar::Approx(x) => write!(f, "{x:?}"),
        }
    }
}

/// How `<`, `=`, `>` are decided.
///
/// Exact: true trichotomy, exact operands required. Approx: `x = y` iff
/// `|x - y| <= eps`, `x < y` iff `y - x > eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPolicy {
    pub mode: Mode,
    pub eps: f64,
}

impl Default for ComparisonPolicy {
    fn default() -> Self {
        ComparisonPolicy::exact()
    }
}

impl ComparisonPolicy {
    pub fn exact() -> Self {
        ComparisonPolicy { mode: Mode::Exact, eps: 0.0 }
    }

    pub fn approx(eps: f64) -> Self {
        ComparisonPolicy { mode: Mode::Approx, eps: eps.abs() }
    }

    pub fn cmp(&self, x: &Scalar, y: &Scalar) -> Result<Ordering> {
        match (self.mode, x, y) {
            (Mode::Exact, Scalar::Exact(p), Scalar::Exact(q)) => Ok(p.cmp(q)),
            (Mode::Exact, _, _) => Err(Error::ModeRequired(Mode::Exact)),
            (Mode::Approx, _, _) => {
                let d = y.try_sub(x)?.to_f64();
                if d.is_nan() {
                    return Err(Error::InvalidArgument("comparison with NaN".into()));
                }
                Ok(if d > self.eps {
                    Ordering::Less
                } else if d < -self.eps {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                })
            }
        }
    }

    /// Sign of `x` relative to zero under this policy.
    pub fn sign(&self, x: &Scalar) -> Result<Ordering> {
        self.cmp(x, &Scalar::zero(x.mode()))
    }

    pub fn is_zero(&self, x: &Scalar) -> Result<bool> {
        Ok(self.sign(x)? == Ordering::Equal)
    }

    /// True when `x` was declared zero only because of the eps band.
    pub fn in_band(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Exact(_) => false,
            Scalar::Approx(v) => *v != 0.0 && v.abs() <= self.eps,
        }
    }
}

/// A finite sequence on an integer interval, homogeneous in mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq {
    domain: IntInterval,
    mode: Mode,
    values: Vec<Scalar>,
}

impl Seq {
    /// Sequence starting at index `a`. Fails on mixed modes.
    pub fn new(a: i64, values: Vec<Scalar>) -> Result<Self> {
        let mode = values.first().map(Scalar::mode).unwrap_or(Mode::Exact);
        Seq::with_mode(a, mode, values)
    }

    pub fn with_mode(a: i64, mode: Mode, values: Vec<Scalar>) -> Result<Self> {
        if values.iter().any(|v| v.mode() != mode) {
            return Err(Error::MixedMode);
        }
        let b = a + values.len() as i64 - 1;
        Ok(Seq { domain: IntInterval::new(a, b), mode, values })
    }

    pub fn exact(a: i64, values: Vec<BigRational>) -> Self {
        let values = values.into_iter().map(Scalar::Exact).collect();
        Seq::with_mode(a, Mode::Exact, values).expect("homogeneous")
    }

    pub fn approx(a: i64, values: Vec<f64>) -> Self {
        let values = values.into_iter().map(Scalar::Approx).collect();
        Seq::with_mode(a, Mode::Approx, values).expect("homogeneous")
    }

    pub fn from_ints(a: i64, values: &[i64]) -> Self {
        let values = values.iter().map(|&v| Scalar::int(v)).collect();
        Seq::with_mode(a, Mode::Exact, values).expect("homogeneous")
    }

    /// Exact sequence from `(numerator, denominator)` pairs.
    pub fn from_ratios(a: i64, values: &[(i64, i64)]) -> Self {
        let values = values.iter().map(|&(n, d)| Scalar::ratio(n, d)).collect();
        Seq::with_mode(a, Mode::Exact, values).expect("homogeneous")
    }

    pub fn from_fn(domain: IntInterval, mode: Mode, f: impl Fn(i64) -> Scalar) -> Result<Self> {
        let values: Vec<Scalar> = domain.iter().map(f).collect();
        Seq::with_mode(domain.a, mode, values)
    }

    pub fn domain(&self) -> IntInterval {
        self.domain
    }

    pub fn a(&self) -> i64 {
        self.domain.a
    }

    pub fn b(&self) -> i64 {
        self.domain.b
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn get(&self, n: i64) -> Option<&Scalar> {
        if self.domain.contains(n) {
            self.values.get((n - self.domain.a) as usize)
        } else {
            None
        }
    }

    /// Value at `n`; panics outside the domain.
    pub fn at(&self, n: i64) -> &Scalar {
        self.get(n).unwrap_or_else(|| panic!("index {n} outside {}", self.domain))
    }

    pub fn try_at(&self, n: i64) -> Result<&Scalar> {
        self.get(n).ok_or(Error::IndexOutOfDomain(n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.domain.iter().zip(self.values.iter())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }

    /// Restriction to `window`, which must lie inside the domain.
    pub fn restrict(&self, window: IntInterval) -> Result<Seq> {
        if window.is_empty() {
            return Seq::with_mode(window.a, self.mode, Vec::new());
        }
        if !self.domain.contains(window.a) || !self.domain.contains(window.b) {
            return Err(Error::IndexOutOfDomain(if self.domain.contains(window.a) {
                window.b
            } else {
                window.a
            }));
        }
        let lo = (window.a - self.domain.a) as usize;
        let hi = (window.b - self.domain.a) as usize;
        Seq::with_mode(window.a, self.mode, self.values[lo..=hi].to_vec())
    }

    pub fn to_mode(&self, mode: Mode) -> Result<Seq> {
        let values = self.values.iter().map(|v| v.to_mode(mode)).collect::<Result<Vec<_>>>()?;
        Seq::with_mode(self.a(), mode, values)
    }

    fn check_same(&self, other: &Seq) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(self.a(), self.b(), other.a(), other.b()));
        }
        if self.mode != other.mode {
            return Err(Error::MixedMode);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Seq, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Seq> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| op(x, y)).collect();
        Seq::with_mode(self.a(), self.mode, values)
    }

    pub fn add(&self, other: &Seq) -> Result<Seq> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Seq) -> Result<Seq> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &Seq) -> Result<Seq> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Seq> {
        if c.mode() != self.mode {
            return Err(Error::MixedMode);
        }
        let values = self.values.iter().map(|x| x * c).collect();
        Seq::with_mode(self.a(), self.mode, values)
    }

    /// Adds the constant `c` at every index.
    pub fn offset(&self, c: &Scalar) -> Result<Seq> {
        if c.mode() != self.mode {
            return Err(Error::MixedMode);
        }
        let values = self.values.iter().map(|x| x + c).collect();
        Seq::with_mode(self.a(), self.mode, values)
    }

    /// Running sums `f_n = sum_{j=a}^{n} s_j`.
    pub fn cumsum(&self) -> Seq {
        let mut acc = Scalar::zero(self.mode);
        let values = self
            .values
            .iter()
            .map(|v| {
                acc = &acc + v;
                acc.clone()
            })
            .collect();
        Seq::with_mode(self.a(), self.mode, values).expect("homogeneous")
    }
}

/// `(Δf)_n = f_n - f_{n-1}` on `[a+1, b]`.
pub fn delta(f: &Seq) -> Result<Seq> {
    if f.len() < 2 {
        return Err(Error::DomainTooShort { a: f.a(), b: f.b(), need: 2 });
    }
    let values = f.values.windows(2).map(|w| &w[1] - &w[0]).collect();
    Seq::with_mode(f.a() + 1, f.mode, values)
}

/// Pointwise quotient `f / g`.
pub fn ratio(f: &Seq, g: &Seq, policy: &ComparisonPolicy) -> Result<Seq> {
    f.check_same(g)?;
    let mut values = Vec::with_capacity(f.len());
    for ((n, x), y) in f.iter().zip(&g.values) {
        if policy.is_zero(y)? {
            return Err(Error::DivisorVanishes(n));
        }
        values.push(x.try_div(y).map_err(|_| Error::DivisorVanishes(n))?);
    }
    Seq::with_mode(f.a(), f.mode, values)
}

/// `ρ = Δf / Δg` on `[a+1, b]`.
pub fn rho(f: &Seq, g: &Seq, policy: &ComparisonPolicy) -> Result<Seq> {
    f.check_same(g)?;
    ratio(&delta(f)?, &delta(g)?, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Constant signs of `g` and `Δg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignProfile {
    pub seq_sign: Sign,
    pub delta_sign: Sign,
}

impl SignProfile {
    /// Sign of the product `g Δg`.
    pub fn g_dg_sign(&self) -> Sign {
        self.seq_sign.times(self.delta_sign)
    }
}

fn constant_sign<'a>(
    items: impl Iterator<Item = (i64, &'a Scalar)>,
    policy: &ComparisonPolicy,
    vanishes: SignViolationKind,
    changes: SignViolationKind,
) -> Result<Sign> {
    let mut seen: Option<Sign> = None;
    for (n, x) in items {
        let s = match policy.sign(x)? {
            Ordering::Equal => return Err(Error::SignViolation { kind: vanishes, index: n }),
            Ordering::Greater => Sign::Positive,
            Ordering::Less => Sign::Negative,
        };
        match seen {
            None => seen = Some(s),
            Some(t) if t != s => return Err(Error::SignViolation { kind: changes, index: n }),
            _ => {}
        }
    }
    Ok(seen.expect("nonempty"))
}

/// Checks that `g` and `Δg` are nonvanishing and of constant sign.
pub fn sign_profile(g: &Seq, policy: &ComparisonPolicy) -> Result<SignProfile> {
    let dg = delta(g)?;
    let seq_sign = constant_sign(
        g.iter(),
        policy,
        SignViolationKind::SeqVanishes,
        SignViolationKind::SeqChangesSign,
    )?;
    let delta_sign = constant_sign(
        dg.iter(),
        policy,
        SignViolationKind::DeltaVanishes,
        SignViolationKind::DeltaChangesSign,
    )?;
    Ok(SignProfile { seq_sign, delta_sign })
}

/// Horizontal reflection `n -> -n`: domain `[-b, -a]`, order reversed.
pub fn reflect_h(f: &Seq) -> Seq {
    let values: Vec<Scalar> = f.values.iter().rev().cloned().collect();
    Seq::with_mode(-f.b(), f.mode, values).expect("homogeneous")
}

/// Vertical reflection `f -> -f`.
pub fn reflect_v(f: &Seq) -> Seq {
    let values = f.values.iter().map(|x| -x).collect();
    Seq::with_mode(f.a(), f.mode, values).expect("homogeneous")
}

/// Translates the domain by `d`, keeping the values.
pub fn shift(f: &Seq, d: i64) -> Seq {
    Seq::with_mode(f.a() + d, f.mode, f.values.clone()).expect("homogeneous")
}
