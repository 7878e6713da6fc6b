//! Log-convexity, log-concavity and the binomial tail/head operators.
//!
//! `(R^k p)_n = sum_{j>=n} C(j-n+k-1, j-n) p_j` and
//! `(L^k p)_n = sum_{j=0}^{n} C(n-j+k-1, n-j) p_j`. Both families are
//! semigroups in `k`, `R^k` preserves log-convexity and log-concavity, and
//! `L^k` turns any log-concave sequence into a strictly log-concave one.
//! The two are conjugate under the index reflection `(Tp)_n = p_{-n}`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::SequenceGenerator;
use crate::report::IdentityReport;
use crate::seqcore::{reflect_h, ComparisonPolicy, IntInterval, Mode, Scalar, Seq};

/// `C(n, k)` by the multiplicative formula, exact.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Weight `C(d + k - 1, d)` attached to a term at distance `d`.
fn weight(d: u64, k: u64, mode: Mode) -> Scalar {
    let c = binomial(d + k - 1, d);
    match mode {
        Mode::Exact => Scalar::Exact(BigRational::from_integer(c)),
        Mode::Approx => Scalar::Approx(c.to_f64().unwrap_or(f64::INFINITY)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LogShape {
    LogConvex,
    LogConcave,
    /// Geometric: both log-convex and log-concave.
    Both,
    StrictLogConvex,
    StrictLogConcave,
    Neither,
}

impl LogShape {
    pub fn is_log_convex(self) -> bool {
        matches!(self, LogShape::LogConvex | LogShape::StrictLogConvex | LogShape::Both)
    }

    pub fn is_log_concave(self) -> bool {
        matches!(self, LogShape::LogConcave | LogShape::StrictLogConcave | LogShape::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogShapeReport {
    pub shape: LogShape,
    /// For `Neither`: an index with `p_n^2 > p_{n-1} p_{n+1}` and one with `<`.
    pub witness: Option<(i64, i64)>,
}

fn shape_from_signs(signs: &[(i64, Ordering)]) -> LogShapeReport {
    let concave_at = signs.iter().find(|(_, s)| *s == Ordering::Greater).map(|(n, _)| *n);
    let convex_at = signs.iter().find(|(_, s)| *s == Ordering::Less).map(|(n, _)| *n);
    let any_equal = signs.iter().any(|(_, s)| *s == Ordering::Equal);
    let shape = match (concave_at, convex_at) {
        (None, None) => LogShape::Both,
        (Some(_), None) if any_equal => LogShape::LogConcave,
        (Some(_), None) => LogShape::StrictLogConcave,
        (None, Some(_)) if any_equal => LogShape::LogConvex,
        (None, Some(_)) => LogShape::StrictLogConvex,
        (Some(c), Some(v)) => return LogShapeReport { shape: LogShape::Neither, witness: Some((c, v)) },
    };
    LogShapeReport { shape, witness: None }
}

/// Classifies a positive sequence by the signs of `p_n^2 - p_{n-1} p_{n+1}`.
/// Fewer than three points give the vacuous `Both`.
pub fn log_shape(p: &Seq, policy: &ComparisonPolicy) -> Result<LogShapeReport> {
    for (n, x) in p.iter() {
        if policy.sign(x)? != Ordering::Greater {
            return Err(Error::NonPositive(n));
        }
    }
    let mut signs = Vec::new();
    for n in p.a() + 1..p.b() {
        let d = &(p.at(n) * p.at(n)) - &(p.at(n - 1) * p.at(n + 1));
        signs.push((n, policy.sign(&d)?));
    }
    Ok(shape_from_signs(&signs))
}

/// Licence to truncate the infinite sum in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub enum DominationCertificate {
    /// `0 <= p_{j+1} <= ratio * p_j` for all `j >= from`, with `ratio < 1`.
    Geometric { from: i64, ratio: BigRational },
    /// `p_j = 0` for all `j > last`.
    FiniteSupport { last: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RTail {
    /// Truncated sums on the window.
    pub seq: Seq,
    /// Per-index upper bound on the dropped (nonnegative) remainder.
    pub remainder_bounds: Vec<f64>,
    pub horizon: i64,
}

/// `sum_{i>=1} C(m+i+k-1, k-1) q^i`, bounded above rigorously: terms are
/// summed until the term ratio (decreasing towards `q`) makes the geometric
/// tail negligible, and that tail is added.
fn weighted_geometric_tail(m: u64, k: u64, q: f64) -> f64 {
    let mut term = binomial(m + k, k - 1).to_f64().unwrap_or(f64::INFINITY) * q;
    let mut sum = 0.0;
    let mut i = 1u64;
    loop {
        sum += term;
        let ratio = q * (m + i + k) as f64 / (m + i + 1) as f64;
        if ratio < 1.0 {
            let tail = term * ratio / (1.0 - ratio);
            if tail <= 1e-17 * sum || term == 0.0 {
                return (sum + tail) * (1.0 + 1e-12);
            }
        }
        term *= ratio;
        i += 1;
        if !term.is_finite() || i > 1_000_000 {
            return f64::INFINITY;
        }
    }
}

fn check_certificate(
    p_gen: &dyn SequenceGenerator,
    cert: Option<&DominationCertificate>,
    from_index: i64,
    horizon: i64,
    policy: &ComparisonPolicy,
) -> Result<Option<f64>> {
    let cert = cert.ok_or_else(|| Error::NoDominationCertificate("none supplied".into()))?;
    match cert {
        DominationCertificate::FiniteSupport { last } => {
            if *last > horizon {
                return Err(Error::HorizonTooSmall(format!("support ends at {last}, horizon {horizon}")));
            }
            for j in last + 1..=horizon {
                if !policy.is_zero(&p_gen.value(j, policy.mode)?)? {
                    return Err(Error::NoDominationCertificate(format!("p_{j} is nonzero past the support")));
                }
            }
            Ok(None)
        }
        DominationCertificate::Geometric { from, ratio } => {
            let q = ratio.to_f64().unwrap_or(f64::NAN);
            if !(0.0..1.0).contains(&q) {
                return Err(Error::NoDominationCertificate(format!("ratio {ratio} is not in [0, 1)")));
            }
            if *from > horizon {
                return Err(Error::NoDominationCertificate(format!("certificate starts at {from}, past horizon {horizon}")));
            }
            let qs = Scalar::Exact(ratio.clone()).to_mode(policy.mode)?;
            let start = (*from).max(from_index);
            let mut prev = p_gen.value(start, policy.mode)?;
            for j in start..horizon {
                let next = p_gen.value(j + 1, policy.mode)?;
                if policy.sign(&next)? == Ordering::Less || policy.cmp(&next, &(&qs * &prev))? == Ordering::Greater {
                    return Err(Error::NoDominationCertificate(format!("p_{{{}}} > {ratio} p_{j}", j + 1)));
                }
                prev = next;
            }
            Ok(Some(q))
        }
    }
}

/// `R^k p` on `window`, truncated at `horizon`, with remainder bounds.
pub fn apply_r_tail(
    p_gen: &dyn SequenceGenerator,
    k: u64,
    window: IntInterval,
    horizon: i64,
    cert: Option<&DominationCertificate>,
    policy: &ComparisonPolicy,
) -> Result<RTail> {
    if k == 0 {
        return Err(Error::InvalidArgument("order k must be >= 1".into()));
    }
    if window.is_empty() {
        return Err(Error::InvalidArgument("empty window".into()));
    }
    if horizon < window.b {
        return Err(Error::HorizonTooSmall(format!("horizon {horizon} before window end {}", window.b)));
    }
    let q = check_certificate(p_gen, cert, window.a, horizon, policy)?;
    let p = p_gen.sample(IntInterval::new(window.a, horizon), policy.mode)?;
    let p_h = p.at(horizon).to_f64().abs();
    let mut values = Vec::with_capacity(window.len());
    let mut bounds = Vec::with_capacity(window.len());
    for n in window.iter() {
        let mut s = Scalar::zero(policy.mode);
        for j in n..=horizon {
            s = &s + &(&weight((j - n) as u64, k, policy.mode) * p.at(j));
        }
        values.push(s);
        bounds.push(match q {
            None => 0.0,
            Some(q) => p_h * weighted_geometric_tail((horizon - n) as u64, k, q),
        });
    }
    Ok(RTail { seq: Seq::with_mode(window.a, policy.mode, values)?, remainder_bounds: bounds, horizon })
}

/// `R^k` of a finite sequence extended by zero beyond its domain; exact on
/// the whole domain.
pub fn r_tail_finite(p: &Seq, k: u64) -> Result<Seq> {
    if k == 0 {
        return Err(Error::InvalidArgument("order k must be >= 1".into()));
    }
    let values = p
        .domain()
        .iter()
        .map(|n| {
            (n..=p.b()).fold(Scalar::zero(p.mode()), |acc, j| &acc + &(&weight((j - n) as u64, k, p.mode()) * p.at(j)))
        })
        .collect();
    Seq::with_mode(p.a(), p.mode(), values)
}

fn l_head_from_start(p: &Seq, k: u64) -> Result<Seq> {
    if k == 0 {
        return Err(Error::InvalidArgument("order k must be >= 1".into()));
    }
    let values = p
        .domain()
        .iter()
        .map(|n| {
            (p.a()..=n).fold(Scalar::zero(p.mode()), |acc, j| &acc + &(&weight((n - j) as u64, k, p.mode()) * p.at(j)))
        })
        .collect();
    Seq::with_mode(p.a(), p.mode(), values)
}

/// `L^k p` for `p` on `[0, N]`.
pub fn apply_l_head(p: &Seq, k: u64) -> Result<Seq> {
    if p.a() != 0 {
        return Err(Error::DomainNotAtZero(p.a()));
    }
    l_head_from_start(p, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    RTail,
    LHead,
}

fn apply_finite(p: &Seq, k: u64, kind: OperatorKind) -> Result<Seq> {
    match kind {
        OperatorKind::RTail => r_tail_finite(p, k),
        OperatorKind::LHead => apply_l_head(p, k),
    }
}

fn compare_seqs(lhs: &Seq, rhs: &Seq, policy: &ComparisonPolicy) -> Result<IdentityReport> {
    let mut max = 0.0f64;
    let mut first = None;
    for ((n, x), y) in lhs.iter().zip(rhs.values()) {
        let d = x - y;
        max = max.max(d.to_f64().abs());
        if first.is_none() && policy.sign(&d)? != Ordering::Equal {
            first = Some(n);
        }
    }
    Ok(IdentityReport {
        mode: lhs.mode(),
        sides: Vec::new(),
        holds: first.is_none(),
        max_discrepancy: max,
        first_mismatch: first,
    })
}

/// `op^{k1}(op^{k2} p) = op^{k1+k2} p` on the domain of `p` (exact mode;
/// for `RTail`, `p` is read as zero beyond its domain).
pub fn semigroup_check(p: &Seq, k1: u64, k2: u64, kind: OperatorKind, policy: &ComparisonPolicy) -> Result<IdentityReport> {
    if p.mode() != Mode::Exact || policy.mode != Mode::Exact {
        return Err(Error::ModeRequired(Mode::Exact));
    }
    let lhs = apply_finite(&apply_finite(p, k2, kind)?, k1, kind)?;
    let rhs = apply_finite(p, k1 + k2, kind)?;
    compare_seqs(&lhs, &rhs, policy)
}

/// `L^k p = T^{-1} R^k T p` on `[0, N]` for `p` zero on the negative indices.
pub fn head_tail_conjugation_check(p: &Seq, k: u64, policy: &ComparisonPolicy) -> Result<IdentityReport> {
    if p.mode() != Mode::Exact || policy.mode != Mode::Exact {
        return Err(Error::ModeRequired(Mode::Exact));
    }
    let lhs = apply_l_head(p, k)?;
    let rhs = reflect_h(&r_tail_finite(&reflect_h(p), k)?);
    compare_seqs(&lhs, &rhs, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeVerdict {
    /// Every interior inequality certified despite truncation.
    Certified,
    /// Not refuted, but some inequality is within the remainder bounds.
    ConsistentWithinBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCorollaryReport {
    pub p_shape: LogShape,
    /// Shape of the truncated sums, ignoring remainder bounds.
    pub truncated_shape: LogShape,
    pub verdict: ShapeVerdict,
    pub max_remainder_bound: f64,
}

/// Bounds on `x_n^2 - x_{n-1} x_{n+1}` for `x_i in [s_i, s_i + e_i]`, all positive.
fn log_gap_interval(s: &[Scalar], e: &[Scalar], i: usize) -> (Scalar, Scalar) {
    let up = |j: usize| &s[j] + &e[j];
    let lo = &(&s[i] * &s[i]) - &(&up(i - 1) * &up(i + 1));
    let hi = &(&up(i) * &up(i)) - &(&s[i - 1] * &s[i + 1]);
    (lo, hi)
}

/// Checks that `R^k p` keeps the log-shape of `p` on `window`.
pub fn check_tail_corollary(
    p_gen: &dyn SequenceGenerator,
    k: u64,
    window: IntInterval,
    horizon: i64,
    cert: Option<&DominationCertificate>,
    policy: &ComparisonPolicy,
) -> Result<TailCorollaryReport> {
    let rt = apply_r_tail(p_gen, k, window, horizon, cert, policy)?;
    let p = p_gen.sample(IntInterval::new(window.a, horizon), policy.mode)?;
    let p_shape = log_shape(&p, policy)?.shape;
    if !(p_shape.is_log_convex() || p_shape.is_log_concave()) {
        return Err(Error::HypothesisFailed(format!("p is neither log-convex nor log-concave ({p_shape:?})")));
    }
    let truncated_shape = log_shape(&rt.seq, policy)?.shape;
    let s = rt.seq.values();
    let e = rt
        .remainder_bounds
        .iter()
        .map(|b| {
            let exact = BigRational::from_float(*b).ok_or_else(|| Error::InvalidArgument("remainder bound not finite".into()));
            exact.map(Scalar::Exact).and_then(|x| x.to_mode(policy.mode))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut certified = true;
    let mut witness = Vec::new();
    for i in 1..s.len().saturating_sub(1) {
        let n = window.a + i as i64;
        let (lo, hi) = log_gap_interval(s, &e, i);
        let (slo, shi) = (policy.sign(&lo)?, policy.sign(&hi)?);
        if p_shape.is_log_concave() {
            if shi == Ordering::Less {
                witness.push(n);
            }
            certified &= slo != Ordering::Less;
        }
        if p_shape.is_log_convex() {
            if slo == Ordering::Greater {
                witness.push(n);
            }
            certified &= shi != Ordering::Greater;
        }
    }
    if !witness.is_empty() {
        return Err(Error::TheoremViolated { witness, mode: policy.mode });
    }
    Ok(TailCorollaryReport {
        p_shape,
        truncated_shape,
        verdict: if certified { ShapeVerdict::Certified } else { ShapeVerdict::ConsistentWithinBounds },
        max_remainder_bound: rt.remainder_bounds.iter().copied().fold(0.0, f64::max),
    })
}

/// One step `f = L^1 p`, `g_n = f_{n+1}`, `r = f/g`:
/// `g_0 g_1 Δr_1` against `p_1^2 - p_0 p_2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaseInequality {
    pub step: u64,
    pub lhs: f64,
    pub middle: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeadCorollaryReport {
    pub p_shape: LogShape,
    pub result_shape: LogShape,
    pub base_inequalities: Vec<BaseInequality>,
    /// Whether `L^k p` fails log-convexity at every interior index.
    pub nowhere_log_convex: bool,
}

fn base_inequality(cur: &Seq, step: u64, policy: &ComparisonPolicy) -> Result<(Seq, BaseInequality)> {
    let f = l_head_from_start(cur, 1)?;
    let (f0, f1, f2) = (f.at(0), f.at(1), f.at(2));
    // g_0 = f_1, g_1 = f_2, r_n = f_n / f_{n+1}
    let r0 = f0 / f1;
    let r1 = f1 / f2;
    let lhs = &(f1 * f2) * &(&r1 - &r0);
    let (p0, p1, p2) = (cur.at(0), cur.at(1), cur.at(2));
    let middle = &(p1 * p1) - &(p0 * p2);
    let holds = policy.cmp(&lhs, &middle)? == Ordering::Greater && policy.sign(&middle)? != Ordering::Less;
    Ok((f, BaseInequality { step, lhs: lhs.to_f64(), middle: middle.to_f64(), holds }))
}

/// Checks that `L^k p` is strictly log-concave for log-concave `p` on
/// `[0, N]`, together with the base inequality at every step of
/// `L^k = L^1 ∘ ... ∘ L^1`.
pub fn check_head_corollary(p: &Seq, k: u64, policy: &ComparisonPolicy) -> Result<HeadCorollaryReport> {
    if p.a() != 0 {
        return Err(Error::DomainNotAtZero(p.a()));
    }
    if p.len() < 3 {
        return Err(Error::DomainTooShort { a: p.a(), b: p.b(), need: 3 });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("order k must be >= 1".into()));
    }
    let p_shape = log_shape(p, policy)?.shape;
    if !p_shape.is_log_concave() {
        return Err(Error::HypothesisFailed(format!("p is not log-concave ({p_shape:?})")));
    }
    let mut cur = p.clone();
    let mut base = Vec::new();
    for step in 1..=k {
        let (next, b) = base_inequality(&cur, step, policy)?;
        base.push(b);
        cur = next;
    }
    if p.mode() == Mode::Exact && cur != apply_l_head(p, k)? {
        return Err(Error::TheoremViolated { witness: vec![], mode: Mode::Exact });
    }
    let result_shape = log_shape(&cur, policy)?.shape;
    let mut nowhere_log_convex = true;
    for n in 1..cur.b() {
        let d = &(cur.at(n) * cur.at(n)) - &(cur.at(n - 1) * cur.at(n + 1));
        nowhere_log_convex &= policy.sign(&d)? == Ordering::Greater;
    }
    let bad: Vec<i64> = base.iter().filter(|b| !b.holds).map(|b| b.step as i64).collect();
    if result_shape != LogShape::StrictLogConcave || !bad.is_empty() {
        return Err(Error::TheoremViolated { witness: bad, mode: policy.mode });
    }
    Ok(HeadCorollaryReport { p_shape, result_shape, base_inequalities: base, nowhere_log_convex })
}
