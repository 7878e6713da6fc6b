//! Limits of ratio sequences and the vanishing-tail monotonicity rule.
//!
//! For `m < n` the chord ratio `r_{m,n} = (f_n - f_m)/(g_n - g_m)` is the
//! `|Δg|`-weighted mean of `ρ` over `[m+1, n]`, so it always lies between
//! the smallest and largest `ρ` there. That enclosure drives the limit
//! estimates: if `|g| -> ∞`, or `f, g -> 0`, then `r` converges to the limit
//! of `ρ` whenever the latter exists.
//!
//! Facts about behaviour at infinity (`f, g -> 0`, `|g| -> ∞`) cannot be
//! read off a finite window; they are recorded as caller assertions.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::SequenceGenerator;
use crate::patterns::{classify, Monotonicity, PatternReport};
use crate::report::IdentityReport;
use crate::seqcore::{delta, ratio, rho, sign_profile, ComparisonPolicy, IntInterval, Mode, Scalar, Seq};

/// Default horizons per mode; exact rationals grow quickly.
pub const DEFAULT_HORIZON_EXACT: i64 = 64;
pub const DEFAULT_HORIZON_APPROX: i64 = 1024;

pub fn default_horizon(mode: Mode) -> i64 {
    match mode {
        Mode::Exact => DEFAULT_HORIZON_EXACT,
        Mode::Approx => DEFAULT_HORIZON_APPROX,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitCase {
    /// `|g_n| -> ∞`
    GUnbounded,
    /// `f_n -> 0` and `g_n -> 0`
    BothVanish,
}

fn check_pair(f: &Seq, g: &Seq) -> Result<()> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch(f.a(), f.b(), g.a(), g.b()));
    }
    if f.mode() != g.mode() {
        return Err(Error::MixedMode);
    }
    Ok(())
}

/// Both forms of `r_{m,n}`: the chord quotient and the weighted mean
/// `sum ρ_j |Δg_j| / sum |Δg_j|` over `j in [m+1, n]`.
pub fn weighted_mean_forms(f: &Seq, g: &Seq, m: i64, n: i64, policy: &ComparisonPolicy) -> Result<(Scalar, Scalar)> {
    check_pair(f, g)?;
    if !(f.a() <= m && m < n && n <= f.b()) {
        return Err(Error::InvalidArgument(format!("need a <= m < n <= b, got m={m}, n={n} on {}", f.domain())));
    }
    let window = IntInterval::new(m, n);
    let (fw, gw) = (f.restrict(window)?, g.restrict(window)?);
    let dg = delta(&gw)?;
    let mut sign = None;
    for (j, d) in dg.iter() {
        let s = policy.sign(d)?;
        if s == Ordering::Equal {
            return Err(Error::DivisorVanishes(j));
        }
        if *sign.get_or_insert(s) != s {
            return Err(Error::SignViolation { kind: crate::error::SignViolationKind::DeltaChangesSign, index: j });
        }
    }
    let chord_den = g.at(n) - g.at(m);
    if policy.is_zero(&chord_den)? {
        return Err(Error::DivisorVanishes(n));
    }
    let chord = &(f.at(n) - f.at(m)) / &chord_den;
    let rho_w = rho(&fw, &gw, policy)?;
    let mut num = Scalar::zero(f.mode());
    let mut den = Scalar::zero(f.mode());
    for ((_, r), d) in rho_w.iter().zip(dg.values()) {
        let w = d.abs();
        num = &num + &(r * &w);
        den = &den + &w;
    }
    Ok((chord, &num / &den))
}

/// `r_{m,n}`; in exact mode the two forms must coincide.
pub fn weighted_mean_ratio(f: &Seq, g: &Seq, m: i64, n: i64, policy: &ComparisonPolicy) -> Result<Scalar> {
    let (chord, mean) = weighted_mean_forms(f, g, m, n, policy)?;
    if f.mode() == Mode::Exact && chord != mean {
        return Err(Error::FormMismatch);
    }
    Ok(chord)
}

/// `[min ρ, max ρ]` over `[m+1, n]`.
pub fn rho_range(rho_s: &Seq, m: i64, n: i64, policy: &ComparisonPolicy) -> Result<(Scalar, Scalar)> {
    let w = rho_s.restrict(IntInterval::new(m + 1, n))?;
    let mut it = w.values().iter();
    let first = it.next().ok_or(Error::DomainTooShort { a: m + 1, b: n, need: 1 })?;
    let (mut lo, mut hi) = (first, first);
    for x in it {
        if policy.cmp(x, lo)? == Ordering::Less {
            lo = x;
        }
        if policy.cmp(x, hi)? == Ordering::Greater {
            hi = x;
        }
    }
    Ok((lo.clone(), hi.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivergenceDirection {
    PlusInfinity,
    MinusInfinity,
}

/// Heuristic flag for `ρ -> ±∞`; never a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub direction: DivergenceDirection,
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    /// `r_{m,H}` for the selected tail start `m`.
    #[serde(serialize_with = "ser_scalar")]
    pub value: Scalar,
    #[serde(serialize_with = "ser_scalar")]
    pub lo: Scalar,
    #[serde(serialize_with = "ser_scalar")]
    pub hi: Scalar,
    pub width: f64,
    pub horizon: i64,
    /// Tail start `m`; the enclosure is over `[m+1, horizon]`.
    pub tail_start: i64,
    pub case: LimitCase,
    /// `r` evaluated at the horizon.
    #[serde(serialize_with = "ser_scalar")]
    pub r_at_horizon: Scalar,
    /// Bound on `|r_m - r_{m,H}|` (both-vanish case).
    pub residual_bound: Option<f64>,
    /// What the caller asserted about behaviour at infinity.
    pub assumption: &'static str,
    pub divergence: Option<Divergence>,
}

fn ser_scalar<S: serde::Serializer>(v: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Tail starts `m_0 = start`, then halving the remaining distance to the
/// horizon while at least two `ρ` values remain.
fn tail_starts(start: i64, horizon: i64) -> Vec<i64> {
    let mut ms = vec![start];
    let mut m = start;
    while horizon - m >= 4 {
        m += (horizon - m) / 2;
        ms.push(m);
    }
    if horizon - m >= 3 {
        ms.push(horizon - 2);
    }
    ms
}

fn divergence_heuristic(rho_s: &Seq, rep: &PatternReport) -> Option<Divergence> {
    let monotone_up = rep.has_tag(Monotonicity::Increasing);
    let monotone_down = rep.has_tag(Monotonicity::Decreasing);
    if !(monotone_up || monotone_down) || rho_s.len() < 8 {
        return None;
    }
    let (a, b) = (rho_s.a(), rho_s.b());
    let len = b - a;
    let (i1, i2) = (a + len / 4, a + len / 2);
    let v = |n| rho_s.at(n).to_f64();
    let inc1 = (v(i2) - v(i1)).abs();
    let inc2 = (v(b) - v(i2)).abs();
    // Growth over the last half at least comparable to the previous quarter:
    // log-like or faster, not a convergent tail.
    if inc1 > 0.0 && inc2 >= 0.9 * inc1 {
        Some(Divergence {
            direction: if monotone_up { DivergenceDirection::PlusInfinity } else { DivergenceDirection::MinusInfinity },
            heuristic: true,
        })
    } else {
        None
    }
}

/// Estimates `lim r = lim ρ` from the window `[start, horizon]`.
pub fn limit_estimate(
    f_gen: &dyn SequenceGenerator,
    g_gen: &dyn SequenceGenerator,
    case: LimitCase,
    start: i64,
    horizon: i64,
    policy: &ComparisonPolicy,
) -> Result<LimitEstimate> {
    if horizon - start + 1 < 3 {
        return Err(Error::HorizonTooSmall(format!("window [{start}, {horizon}] has fewer than 3 points")));
    }
    let window = IntInterval::new(start, horizon);
    let f = f_gen.sample(window, policy.mode)?;
    let g = g_gen.sample(window, policy.mode)?;
    let dg = delta(&g)?;
    // only Δg is constrained here; g itself may vanish away from the points used
    let mut sign = None;
    for (j, d) in dg.iter() {
        let s = policy.sign(d)?;
        if s == Ordering::Equal {
            return Err(Error::SignViolation { kind: crate::error::SignViolationKind::DeltaVanishes, index: j });
        }
        if *sign.get_or_insert(s) != s {
            return Err(Error::SignViolation { kind: crate::error::SignViolationKind::DeltaChangesSign, index: j });
        }
    }
    let rho_s = rho(&f, &g, policy)?;

    let mut best: Option<(i64, Scalar, Scalar, f64)> = None;
    for m in tail_starts(start, horizon) {
        let (lo, hi) = rho_range(&rho_s, m, horizon, policy)?;
        let width = (&hi - &lo).to_f64();
        if best.as_ref().is_none_or(|b| width <= b.3) {
            best = Some((m, lo, hi, width));
        }
    }
    let (m, lo, hi, width) = best.expect("at least one tail start");
    let value = weighted_mean_ratio(&f, &g, m, horizon, policy)?;
    let gh = g.at(horizon);
    if policy.is_zero(gh)? {
        return Err(Error::DivisorVanishes(horizon));
    }
    let r_at_horizon = f.at(horizon) / gh;

    let (residual_bound, assumption) = match case {
        LimitCase::GUnbounded => (None, "|g_n| -> infinity (caller-asserted)"),
        LimitCase::BothVanish => {
            // r_m - r_{m,H} = (f_H - r_{m,H} g_H) / g_m
            let gm = g.at(m).to_f64().abs();
            let bound = (f.at(horizon).to_f64().abs() + value.to_f64().abs() * gh.to_f64().abs()) / gm;
            (Some(bound), "f_n -> 0 and g_n -> 0 (caller-asserted)")
        }
    };
    let rho_rep = classify(&rho_s, policy)?;
    Ok(LimitEstimate {
        value,
        lo,
        hi,
        width,
        horizon,
        tail_start: m,
        case,
        r_at_horizon,
        residual_bound,
        assumption,
        divergence: divergence_heuristic(&rho_s, &rho_rep),
    })
}

/// Compares `g_n g_{n-1} Δr_n` with the tail sum
/// `sum_{j=n}^{horizon} Δg_n Δg_j (ρ_j - ρ_n)`; the residual is what the
/// truncation drops.
pub fn tail_identity_check(f: &Seq, g: &Seq, n: i64, horizon: i64, policy: &ComparisonPolicy) -> Result<IdentityReport> {
    check_pair(f, g)?;
    if n <= f.a() || n > f.b() {
        return Err(Error::IndexOutOfDomain(n));
    }
    if horizon < n || horizon > f.b() {
        return Err(Error::HorizonTooSmall(format!("horizon {horizon} outside [{n}, {}]", f.b())));
    }
    let window = IntInterval::new(n - 1, horizon);
    let (fw, gw) = (f.restrict(window)?, g.restrict(window)?);
    let r = ratio(&fw, &gw, policy)?;
    let rho_s = rho(&fw, &gw, policy)?;
    let dg = delta(&gw)?;
    let lhs = &(gw.at(n) * gw.at(n - 1)) * &(r.at(n) - r.at(n - 1));
    let dgn = dg.at(n);
    let rho_n = rho_s.at(n);
    let mut rhs = Scalar::zero(f.mode());
    for j in n..=horizon {
        rhs = &rhs + &(&(dgn * dg.at(j)) * &(rho_s.at(j) - rho_n));
    }
    Ok(IdentityReport::from_sides(vec![lhs, rhs], policy))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailMonotonicity {
    pub rho: PatternReport,
    /// Pattern of `r` on the checked window.
    pub r: PatternReport,
    pub window: IntInterval,
    /// The monotonicity tags of `ρ` that `r` was required to share.
    pub required: Vec<Monotonicity>,
}

/// Checks that `r = f/g` inherits every monotonicity tag of `ρ`, for data
/// sampled from sequences vanishing at infinity.
///
/// `skip_trailing` points at the end of the window are excluded from the
/// check on `r` (approximate mode only).
pub fn vanishing_tail_monotonicity(
    f: &Seq,
    g: &Seq,
    skip_trailing: usize,
    policy: &ComparisonPolicy,
) -> Result<TailMonotonicity> {
    check_pair(f, g)?;
    sign_profile(g, policy).map_err(|e| Error::HypothesisFailed(e.to_string()))?;
    let skip = if f.mode() == Mode::Approx { skip_trailing as i64 } else { 0 };
    let window = IntInterval::new(f.a(), f.b() - skip);
    if window.len() < 2 {
        return Err(Error::HorizonTooSmall(format!("window {window} after skipping {skip} points")));
    }
    let (fw, gw) = (f.restrict(window)?, g.restrict(window)?);
    let rho_rep = classify(&rho(&fw, &gw, policy)?, policy)?;
    let required: Vec<Monotonicity> = [
        Monotonicity::Nondecreasing,
        Monotonicity::Nonincreasing,
        Monotonicity::Increasing,
        Monotonicity::Decreasing,
    ]
    .into_iter()
    .filter(|t| rho_rep.has_tag(*t))
    .collect();
    if required.is_empty() {
        return Err(Error::HypothesisFailed("rho is not monotone".into()));
    }
    let r = ratio(&fw, &gw, policy)?;
    let r_rep = classify(&r, policy)?;
    if let Some(t) = required.iter().find(|t| !r_rep.has_tag(**t)) {
        // witness: first step of r against the required direction
        let d = delta(&r)?;
        let bad = d
            .iter()
            .find(|(_, x)| {
                let s = policy.sign(x).unwrap_or(Ordering::Equal);
                match t {
                    Monotonicity::Nondecreasing => s == Ordering::Less,
                    Monotonicity::Nonincreasing => s == Ordering::Greater,
                    Monotonicity::Increasing => s != Ordering::Greater,
                    Monotonicity::Decreasing => s != Ordering::Less,
                    _ => false,
                }
            })
            .map(|(n, _)| n);
        return Err(Error::TheoremViolated { witness: bad.into_iter().collect(), mode: policy.mode });
    }
    Ok(TailMonotonicity { rho: rho_rep, r: r_rep, window, required })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{Generator, ZeroExtended};

    fn ex() -> ComparisonPolicy {
        ComparisonPolicy::exact()
    }

    #[test]
    fn weighted_mean_examples() {
        let f = Seq::from_ints(0, &[0, 1, 2, 3]);
        let g = Seq::from_ints(0, &[0, 2, 4, 6]);
        assert_eq!(weighted_mean_ratio(&f, &g, 0, 3, &ex()).unwrap(), Scalar::ratio(1, 2));

        let f = Seq::from_ints(0, &[10, 11, 13, 16]);
        let g = Seq::from_ints(0, &[1, 2, 3, 4]);
        let r = weighted_mean_ratio(&f, &g, 0, 3, &ex()).unwrap();
        assert_eq!(r, Scalar::int(2));
        let rho_s = rho(&f, &g, &ex()).unwrap();
        assert_eq!(rho_range(&rho_s, 0, 3, &ex()).unwrap(), (Scalar::int(1), Scalar::int(3)));

        // ρ ≡ 5 with unequal weights
        let g = Seq::from_ints(0, &[1, 2, 5, 6]);
        let f = g.scale(&Scalar::int(5)).unwrap();
        assert_eq!(weighted_mean_ratio(&f, &g, 1, 3, &ex()).unwrap(), Scalar::int(5));
    }

    #[test]
    fn weighted_mean_rejects_bad_window() {
        let f = Seq::from_ints(0, &[0, 1, 2]);
        let g = Seq::from_ints(0, &[0, 2, 1]);
        assert!(weighted_mean_ratio(&f, &g, 0, 2, &ex()).is_err());
        assert!(weighted_mean_ratio(&f, &g, 2, 2, &ex()).is_err());
    }

    #[test]
    fn limit_affine() {
        let f: Generator = "poly:1,2".parse().unwrap();
        let g: Generator = "poly:0,1".parse().unwrap();
        let est = limit_estimate(&f, &g, LimitCase::GUnbounded, 1, 1000, &ComparisonPolicy::approx(1e-12)).unwrap();
        assert_eq!(est.lo, Scalar::Approx(2.0));
        assert_eq!(est.hi, Scalar::Approx(2.0));
        assert!((est.r_at_horizon.to_f64() - 2.001).abs() < 1e-12);
        assert!(est.divergence.is_none());
    }

    #[test]
    fn limit_n_over_n_squared_exact_rho() {
        let f: Generator = "poly:0,1".parse().unwrap();
        let g: Generator = "poly:0,0,1".parse().unwrap();
        let est = limit_estimate(&f, &g, LimitCase::GUnbounded, 1, 40, &ex()).unwrap();
        // ρ_n = 1/(2n - 1), decreasing: the tightest window ends at the horizon
        assert_eq!(est.lo, Scalar::ratio(1, 79));
        assert!(est.tail_start > 1);
    }

    #[test]
    fn limit_horizon_too_small() {
        let f: Generator = "poly:0,1".parse().unwrap();
        let r = limit_estimate(&f, &f, LimitCase::GUnbounded, 1, 2, &ex());
        assert!(matches!(r, Err(Error::HorizonTooSmall(_))));
    }

    #[test]
    fn divergence_flagged_for_growing_rho() {
        // cumulative sums of n! and (n/e)^n: ρ_n = n! e^n / n^n grows like sqrt(2πn)
        let w = IntInterval::new(0, 150);
        let f = Generator::Factorial.sample(w, Mode::Approx).unwrap().cumsum();
        let g = Generator::NPowOverE.sample(w, Mode::Approx).unwrap().cumsum();
        let (fz, gz) = (ZeroExtended(&f), ZeroExtended(&g));
        let est = limit_estimate(&fz, &gz, LimitCase::GUnbounded, 0, 150, &ComparisonPolicy::approx(1e-12)).unwrap();
        assert_eq!(
            est.divergence,
            Some(Divergence { direction: DivergenceDirection::PlusInfinity, heuristic: true })
        );
    }

    #[test]
    fn tail_identity_trivial_cases() {
        let g: Generator = "geom:1/2".parse().unwrap();
        let w = IntInterval::new(0, 20);
        let gs = g.sample(w, Mode::Exact).unwrap();
        let rep = tail_identity_check(&gs, &gs, 3, 20, &ex()).unwrap();
        assert!(rep.sides.iter().all(Scalar::is_exact_zero));
        // f = 7 g: ρ constant, the truncated sum is exactly zero
        let fs = gs.scale(&Scalar::int(7)).unwrap();
        let rep = tail_identity_check(&fs, &gs, 5, 12, &ex()).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn vanishing_tail_geometric_constant() {
        let g: Generator = "geom:1/3".parse().unwrap();
        let gs = g.sample(IntInterval::new(0, 15), Mode::Exact).unwrap();
        let fs = gs.scale(&Scalar::ratio(2, 5)).unwrap();
        let rep = vanishing_tail_monotonicity(&fs, &gs, 0, &ex()).unwrap();
        assert!(rep.r.has_tag(Monotonicity::Constant));
    }
}
