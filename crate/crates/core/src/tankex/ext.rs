//! Binary floating point with a 256-bit mantissa.
//!
//! Values are `mant * 2^exp` with `|mant|` normalized to exactly
//! [`PRECISION`] bits and round-to-nearest after every operation, so the
//! unit roundoff is `2^-PRECISION` (about 77 significant decimal digits).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Mantissa width in bits.
pub const PRECISION: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ext {
    mant: BigInt,
    exp: i64,
}

/// Rounds `m * 2^e` to `PRECISION` bits, ties away from zero.
fn normalize(m: BigInt, e: i64) -> Ext {
    if m.is_zero() {
        return Ext { mant: m, exp: 0 };
    }
    let bits = m.bits();
    if bits > PRECISION {
        let shift = bits - PRECISION;
        let (sign, mag) = (m.sign(), m.abs());
        let half = BigInt::one() << (shift - 1);
        let mut q: BigInt = (mag + half) >> shift;
        let mut exp = e + shift as i64;
        if q.bits() > PRECISION {
            q >>= 1;
            exp += 1;
        }
        Ext { mant: BigInt::from_biguint(sign, q.magnitude().clone()), exp }
    } else {
        let shift = PRECISION - bits;
        Ext { mant: m << shift, exp: e - shift as i64 }
    }
}

impl Ext {
    pub fn zero() -> Self {
        Ext { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        normalize(BigInt::from(n), 0)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        normalize(n, 0)
    }

    /// Nearest value to the f64 (exact, since 53 <= PRECISION).
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return Ext::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1 << 52), raw_exp - 1075) };
        normalize(BigInt::from(sign * m), e)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        match self.mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> Ext {
        Ext { mant: self.mant.abs(), exp: self.exp }
    }

    /// Value of one unit in the last place of `self` (zero for zero).
    pub fn ulp(&self) -> Ext {
        if self.is_zero() {
            return Ext::zero();
        }
        normalize(BigInt::one(), self.exp)
    }

    /// `2^-PRECISION`.
    pub fn unit_roundoff() -> Ext {
        normalize(BigInt::one(), -(PRECISION as i64))
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Ext {
        if self.is_zero() {
            return self.clone();
        }
        Ext { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let drop = self.mant.bits().saturating_sub(64);
        let top = (&self.mant >> drop).to_f64().unwrap_or(f64::NAN);
        let mut e = self.exp + drop as i64;
        let mut v = top;
        // scale in steps to stay inside the f64 exponent range
        while e > 0 {
            let s = e.min(1000);
            v *= 2f64.powi(s as i32);
            e -= s;
        }
        while e < 0 {
            let s = e.max(-1000);
            v *= 2f64.powi(s as i32);
            e -= s;
        }
        v
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let digits = digits.max(1);
        let neg = self.mant.is_negative();
        let mag = self.abs();
        let mut e10 = mag.to_f64().log10().floor() as i64;
        loop {
            // round(mag * 10^(digits-1-e10)) as an integer
            let k = digits as i64 - 1 - e10;
            let (mut num, mut den) = (mag.mant.clone(), BigInt::one());
            if mag.exp >= 0 {
                num <<= mag.exp as u64;
            } else {
                den <<= (-mag.exp) as u64;
            }
            if k >= 0 {
                num *= BigInt::from(10).pow(k as u32);
            } else {
                den *= BigInt::from(10).pow((-k) as u32);
            }
            let (q, r) = num.div_rem(&den);
            let q = if r * 2 >= den { q + 1 } else { q };
            let s = q.to_string();
            if s.len() > digits {
                e10 += 1;
                continue;
            }
            if s.len() < digits {
                e10 -= 1;
                continue;
            }
            let (head, tail) = s.split_at(1);
            let sign = if neg { "-" } else { "" };
            return if tail.is_empty() {
                format!("{sign}{head}e{e10}")
            } else {
                format!("{sign}{head}.{tail}e{e10}")
            };
        }
    }

    /// `e = sum 1/i!`, summed until the terms drop below the working precision.
    pub fn e() -> Ext {
        let mut sum = Ext::from_i64(1);
        let mut term = Ext::from_i64(1);
        let tiny = Ext::unit_roundoff().mul_pow2(-16);
        let mut i = 1;
        loop {
            term = &term / &Ext::from_i64(i);
            if term.abs() < tiny {
                return sum;
            }
            sum = &sum + &term;
            i += 1;
        }
    }

    /// `self^n` by repeated squaring.
    pub fn powi(&self, mut n: u32) -> Ext {
        let mut base = self.clone();
        let mut acc = Ext::from_i64(1);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl Add for &Ext {
    type Output = Ext;
    fn add(self, rhs: &Ext) -> Ext {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let gap = (hi.exp - lo.exp) as u64;
        if gap > 2 * PRECISION + 4 {
            // lo is far below half an ulp of hi
            return hi.clone();
        }
        normalize((&hi.mant << gap) + &lo.mant, lo.exp)
    }
}

impl Sub for &Ext {
    type Output = Ext;
    fn sub(self, rhs: &Ext) -> Ext {
        self + &(-rhs)
    }
}

impl Mul for &Ext {
    type Output = Ext;
    fn mul(self, rhs: &Ext) -> Ext {
        normalize(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for &Ext {
    type Output = Ext;
    fn div(self, rhs: &Ext) -> Ext {
        assert!(!rhs.is_zero(), "Ext division by zero");
        let extra = PRECISION + 64;
        let (q, r) = (&self.mant << extra).div_rem(&rhs.mant);
        // sticky bit keeps round-to-nearest honest when the quotient is inexact
        let q = if r.is_zero() { q << 1 } else { (q << 1) + q_sign(&self.mant, &rhs.mant) };
        normalize(q, self.exp - rhs.exp - extra as i64 - 1)
    }
}

fn q_sign(a: &BigInt, b: &BigInt) -> BigInt {
    if a.sign() == b.sign() {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

impl Neg for &Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext { mant: -&self.mant, exp: self.exp }
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for Ext {
            type Output = Ext;
            fn $method(self, rhs: Ext) -> Ext {
                (&self).$method(&rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(40))
    }
}
