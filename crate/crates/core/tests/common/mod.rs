//! Independent oracles and random inputs shared by the integration tests.
//! Everything here works directly on `BigRational` vectors, not through the
//! library's pattern or operator code.
#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use lhospital::{Scalar, Seq};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact_values(s: &Seq) -> Vec<BigRational> {
    s.values().iter().map(|v| v.as_exact().expect("exact").clone()).collect()
}

pub fn seq(a: i64, v: &[BigRational]) -> Seq {
    Seq::exact(a, v.to_vec())
}

/// Random rational with numerator in `[lo, hi]` and denominator in `[1, 9]`.
pub fn rand_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    q(rng.random_range(lo..=hi), rng.random_range(1..=9))
}

pub fn rand_pos(rng: &mut ChaCha8Rng) -> BigRational {
    q(rng.random_range(1..=12), rng.random_range(1..=9))
}

/// Nonzero `g` whose consecutive values differ (no sign constraints).
pub fn rand_g_free(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    let mut g: Vec<BigRational> = Vec::with_capacity(len);
    while g.len() < len {
        let x = rand_q(rng, -15, 15);
        if !x.is_zero() && g.last().is_none_or(|p| *p != x) {
            g.push(x);
        }
    }
    g
}

/// `g` with `Δg` of one (random) sign; `g` itself may change sign.
pub fn rand_g_monotone(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    let up = rng.random_bool(0.5);
    let mut x = rand_q(rng, -20, 20);
    let mut g = vec![x.clone()];
    for _ in 1..len {
        let step = rand_pos(rng);
        x = if up { x + step } else { x - step };
        g.push(x.clone());
    }
    g
}

/// Positive log-concave sequence: ratios `p_n / p_{n-1}` nonincreasing.
pub fn rand_log_concave(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    let mut p = vec![rand_pos(rng)];
    let mut t = rand_pos(rng);
    for _ in 1..len {
        p.push(p.last().unwrap() * &t);
        // multiply the ratio by u in (0, 1]
        let den = rng.random_range(1..=6);
        t *= q(rng.random_range(1..=den), den);
    }
    p
}

pub fn rand_geometric(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    let (p0, t) = (rand_pos(rng), rand_pos(rng));
    let mut p = vec![p0];
    for _ in 1..len {
        let next = p.last().unwrap() * &t;
        p.push(next);
    }
    p
}

/// Finite-support sequence on `[0, len-1]` (entries may vanish).
pub fn rand_finite_support(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    (0..len).map(|_| if rng.random_bool(0.2) { BigRational::zero() } else { rand_q(rng, -9, 9) }).collect()
}

pub fn diff(v: &[BigRational]) -> Vec<BigRational> {
    v.windows(2).map(|w| &w[1] - &w[0]).collect()
}

/// True when `v` is nonincreasing up to some index and nondecreasing from
/// it on (searched over every index).
pub fn brute_down_up(v: &[BigRational]) -> bool {
    (0..v.len()).any(|k| v[..=k].windows(2).all(|w| w[1] <= w[0]) && v[k..].windows(2).all(|w| w[1] >= w[0]))
}

pub fn brute_up_down(v: &[BigRational]) -> bool {
    let neg: Vec<BigRational> = v.iter().map(|x| -x).collect();
    brute_down_up(&neg)
}

pub fn pointwise_ratio(f: &[BigRational], g: &[BigRational]) -> Vec<BigRational> {
    f.iter().zip(g).map(|(a, b)| a / b).collect()
}

/// `(L^1)^k p` by repeated partial sums.
pub fn head_by_partial_sums(p: &[BigRational], k: u64) -> Vec<BigRational> {
    let mut cur = p.to_vec();
    for _ in 0..k {
        let mut acc = BigRational::zero();
        cur = cur
            .iter()
            .map(|x| {
                acc += x;
                acc.clone()
            })
            .collect();
    }
    cur
}

/// `(R^1)^k p` by repeated tail sums, zero beyond the end.
pub fn tail_by_partial_sums(p: &[BigRational], k: u64) -> Vec<BigRational> {
    let mut rev: Vec<BigRational> = p.iter().rev().cloned().collect();
    rev = head_by_partial_sums(&rev, k);
    rev.reverse();
    rev
}

/// Signs of `p_n^2 - p_{n-1} p_{n+1}` at the interior points.
pub fn log_gaps(p: &[BigRational]) -> Vec<Ordering> {
    p.windows(3).map(|w| (&w[1] * &w[1]).cmp(&(&w[0] * &w[2]))).collect()
}

pub fn is_geometric(p: &[BigRational]) -> bool {
    log_gaps(p).iter().all(|o| *o == Ordering::Equal)
}

pub fn min_max(v: &[BigRational]) -> (BigRational, BigRational) {
    let lo = v.iter().min().expect("nonempty").clone();
    let hi = v.iter().max().expect("nonempty").clone();
    (lo, hi)
}

pub fn as_scalar(x: &BigRational) -> Scalar {
    Scalar::Exact(x.clone())
}

pub fn abs_sum(v: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |acc, x| acc + x.abs())
}

pub fn one() -> BigRational {
    BigRational::one()
}
