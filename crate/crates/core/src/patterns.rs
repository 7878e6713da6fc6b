//! Monotonicity patterns of ratio sequences.
//!
//! For `r = f/g` and `ρ = Δf/Δg`, with `g` and `Δg` nonvanishing of constant
//! sign, monotone `ρ` forces `r` into a down-up or up-down shape. Which one
//! depends on the direction of `ρ` and the sign of `g Δg` (see [`TABLE1`]).
//!
//! The shapes are decomposed with two indices: `k`, the last index of the
//! first (weak) phase, `k = max{n : Δr_n <= 0}` with `max ∅ = a`; and `ell`,
//! the end of the strict first phase. In the strong form `r` is strictly
//! decreasing on `[a, ell]`, constant on `[ell, k]` and strictly increasing
//! on `[k, b]` (mirrored for up-down).

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::IdentityReport;
use crate::seqcore::{
    delta, ratio, rho, sign_profile, ComparisonPolicy, IntInterval, Mode, Scalar, Seq, Sign,
    SignProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
    Increasing,
    Decreasing,
    Constant,
    None,
}

/// Direction of a weakly monotone `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Up,
    Down,
}

/// Single-turn shapes: `DownUp` is ↘↗, `UpDown` is ↗↘.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Shape {
    DownUp,
    UpDown,
}

impl Shape {
    pub fn mirror(self) -> Shape {
        match self {
            Shape::DownUp => Shape::UpDown,
            Shape::UpDown => Shape::DownUp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    DownUp,
    UpDown,
    Monotone(Monotonicity),
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub rho_pattern: Direction,
    pub g_dg_sign: Sign,
    pub r_pattern: Shape,
}

pub const TABLE1: [Table1Row; 4] = [
    Table1Row { rho_pattern: Direction::Up, g_dg_sign: Sign::Positive, r_pattern: Shape::DownUp },
    Table1Row { rho_pattern: Direction::Down, g_dg_sign: Sign::Positive, r_pattern: Shape::UpDown },
    Table1Row { rho_pattern: Direction::Up, g_dg_sign: Sign::Negative, r_pattern: Shape::UpDown },
    Table1Row { rho_pattern: Direction::Down, g_dg_sign: Sign::Negative, r_pattern: Shape::DownUp },
];

pub fn table1_predict(rho_pattern: Direction, g_dg_sign: Sign) -> Shape {
    TABLE1
        .iter()
        .find(|row| row.rho_pattern == rho_pattern && row.g_dg_sign == g_dg_sign)
        .map(|row| row.r_pattern)
        .expect("table is total")
}

/// Where the turning index `k` of a single-turn shape sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointCase {
    AtLeftEnd,
    AtRightEnd,
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternReport {
    pub pattern: Pattern,
    /// Every monotonicity tag that applies (empty unless monotone).
    pub tags: Vec<Monotonicity>,
    /// Shape relative to which `ell` and `k` are computed.
    pub orientation: Shape,
    pub domain: IntInterval,
    pub ell: i64,
    pub k: i64,
    /// Whether the strict / constant / strict decomposition holds.
    pub strict_form: bool,
    /// `[ell, k]`, reported only when `strict_form` holds.
    pub plateau: Option<IntInterval>,
    /// Split point `k'` of the half-open convention (strictly monotone on
    /// `[a, k']`, then on `[k'+1, b]`); defined when the plateau has at most
    /// two points.
    pub half_open_k: Option<i64>,
    /// Approx mode: differences declared zero only by the eps band.
    pub band_hits: usize,
}

impl PatternReport {
    pub fn is_monotone(&self) -> bool {
        matches!(self.pattern, Pattern::Monotone(_))
    }

    pub fn has_tag(&self, t: Monotonicity) -> bool {
        self.tags.contains(&t)
    }
}

struct Signs {
    a: i64,
    /// `signs[i]` is the sign of `Δs_{a+1+i}`.
    signs: Vec<Ordering>,
    band_hits: usize,
}

fn delta_signs(s: &Seq, policy: &ComparisonPolicy) -> Result<Signs> {
    if s.len() < 2 {
        return Ok(Signs { a: s.a(), signs: Vec::new(), band_hits: 0 });
    }
    let d = delta(s)?;
    let mut band_hits = 0;
    let signs = d
        .values()
        .iter()
        .map(|x| {
            if policy.in_band(x) {
                band_hits += 1;
            }
            policy.sign(x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Signs { a: s.a(), signs, band_hits })
}

struct Decomposition {
    ell: i64,
    k: i64,
    /// Δ <= 0 on [a+1, k] (the turning-point form used by the proof).
    proof_form: bool,
    strict_form: bool,
}

fn decompose(a: i64, signs: &[Ordering], orientation: Shape) -> Decomposition {
    let oriented: Vec<Ordering> = match orientation {
        Shape::DownUp => signs.to_vec(),
        Shape::UpDown => signs.iter().map(|o| o.reverse()).collect(),
    };
    let b = a + oriented.len() as i64;
    let idx = |i: usize| a + 1 + i as i64;
    let k = oriented.iter().rposition(|o| o.is_le()).map(idx).unwrap_or(a);
    let ell = oriented.iter().position(|o| o.is_ge()).map(|i| idx(i) - 1).unwrap_or(b);
    let proof_form = oriented.iter().enumerate().all(|(i, o)| idx(i) > k || o.is_le());
    let strict_form = oriented.iter().enumerate().all(|(i, o)| {
        let n = idx(i);
        if n <= ell {
            *o == Ordering::Less
        } else if n <= k {
            *o == Ordering::Equal
        } else {
            *o == Ordering::Greater
        }
    });
    Decomposition { ell, k, proof_form, strict_form }
}

fn build_report(
    s: &Seq,
    sg: &Signs,
    pattern: Pattern,
    tags: Vec<Monotonicity>,
    orientation: Shape,
) -> PatternReport {
    let d = decompose(sg.a, &sg.signs, orientation);
    let plateau = d.strict_form.then(|| IntInterval::new(d.ell, d.k));
    let half_open_k = (d.strict_form && d.k - d.ell <= 1).then_some(d.ell);
    PatternReport {
        pattern,
        tags,
        orientation,
        domain: s.domain(),
        ell: d.ell,
        k: d.k,
        strict_form: d.strict_form,
        plateau,
        half_open_k,
        band_hits: sg.band_hits,
    }
}

/// Classifies the monotonicity pattern of `s`.
///
/// Single-turn shapes are recognized in the weak sense: the nonzero signs
/// of `Δs` form one block of one sign followed by one block of the other.
pub fn classify(s: &Seq, policy: &ComparisonPolicy) -> Result<PatternReport> {
    if s.is_empty() {
        return Err(Error::DomainTooShort { a: s.a(), b: s.b(), need: 1 });
    }
    let sg = delta_signs(s, policy)?;
    let nonzero: Vec<Ordering> = sg.signs.iter().copied().filter(|o| o.is_ne()).collect();
    let has_pos = nonzero.contains(&Ordering::Greater);
    let has_neg = nonzero.contains(&Ordering::Less);
    let has_zero = nonzero.len() < sg.signs.len();
    use Monotonicity::*;
    let (pattern, tags, orientation) = match (has_neg, has_pos) {
        (false, false) => (Pattern::Monotone(Constant), vec![Constant, Nondecreasing, Nonincreasing], Shape::DownUp),
        (false, true) if has_zero => (Pattern::Monotone(Nondecreasing), vec![Nondecreasing], Shape::DownUp),
        (false, true) => (Pattern::Monotone(Increasing), vec![Increasing, Nondecreasing], Shape::DownUp),
        (true, false) if has_zero => (Pattern::Monotone(Nonincreasing), vec![Nonincreasing], Shape::UpDown),
        (true, false) => (Pattern::Monotone(Decreasing), vec![Decreasing, Nonincreasing], Shape::UpDown),
        (true, true) => {
            if nonzero.is_sorted() {
                (Pattern::DownUp, vec![], Shape::DownUp)
            } else if nonzero.iter().rev().is_sorted() {
                (Pattern::UpDown, vec![], Shape::UpDown)
            } else {
                (Pattern::Other, vec![None], Shape::DownUp)
            }
        }
    };
    Ok(build_report(s, &sg, pattern, tags, orientation))
}

/// Decomposition of `s` relative to a prescribed shape.
pub fn classify_as(s: &Seq, shape: Shape, policy: &ComparisonPolicy) -> Result<PatternReport> {
    let mut rep = classify(s, policy)?;
    if rep.orientation != shape {
        let sg = delta_signs(s, policy)?;
        rep = build_report(s, &sg, rep.pattern, rep.tags, shape);
    }
    Ok(rep)
}

/// Decides whether the turning index of a single-turn `r` is `a`, `b`, or
/// interior, from the two endpoint steps alone.
///
/// `r` must carry `pattern` in the turning-point form (for ↘↗: `Δr <= 0` up
/// to `k` and `Δr > 0` after); otherwise `PatternMismatch`.
pub fn discriminate_endpoints(r: &Seq, pattern: Shape, policy: &ComparisonPolicy) -> Result<EndpointCase> {
    if r.len() < 2 {
        return Err(Error::DomainTooShort { a: r.a(), b: r.b(), need: 2 });
    }
    let sg = delta_signs(r, policy)?;
    if !decompose(sg.a, &sg.signs, pattern).proof_form {
        return Err(Error::PatternMismatch);
    }
    // Orient to ↘↗.
    let flip = |o: Ordering| if pattern == Shape::DownUp { o } else { o.reverse() };
    let first = flip(sg.signs[0]);
    let last = flip(*sg.signs.last().expect("len >= 2"));
    Ok(if first == Ordering::Greater {
        EndpointCase::AtLeftEnd
    } else if last.is_le() {
        EndpointCase::AtRightEnd
    } else {
        EndpointCase::Interior
    })
}

/// Result of checking the ratio-pattern theorem on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerification {
    pub mode: Mode,
    pub sign_profile: SignProfile,
    /// Directions `ρ` is weakly monotone in (both when constant).
    pub rho_directions: Vec<Direction>,
    pub rho_strict: bool,
    pub predicted: Vec<Shape>,
    /// Free classification of `r`.
    pub observed: PatternReport,
    /// The prediction that was confirmed, with its decomposition.
    pub matched: Shape,
    pub decomposition: PatternReport,
    /// Value of `r` (and `ρ`) on the plateau when it has more than one point.
    #[serde(serialize_with = "ser_opt_scalar")]
    pub plateau_constant: Option<Scalar>,
    pub band_hits: usize,
}

fn ser_opt_scalar<S: serde::Serializer>(v: &Option<Scalar>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl TheoremVerification {
    /// Whether the observed `r` is a monotone (degenerate) case of the prediction.
    pub fn is_degenerate(&self) -> bool {
        self.observed.is_monotone()
    }
}

fn check_prediction(
    r: &Seq,
    rho_s: &Seq,
    shape: Shape,
    rho_strict: bool,
    policy: &ComparisonPolicy,
) -> Result<(PatternReport, Option<Scalar>, Vec<i64>)> {
    let sg = delta_signs(r, policy)?;
    let d = decompose(sg.a, &sg.signs, shape);
    let rep = classify_as(r, shape, policy)?;
    let mut witness = Vec::new();
    if !d.proof_form || !d.strict_form {
        let oriented = |o: Ordering| if shape == Shape::DownUp { o } else { o.reverse() };
        for (i, o) in sg.signs.iter().enumerate() {
            let n = sg.a + 1 + i as i64;
            let o = oriented(*o);
            let ok = if n <= d.ell {
                o == Ordering::Less
            } else if n <= d.k {
                o == Ordering::Equal
            } else {
                o == Ordering::Greater
            };
            if !ok {
                witness.push(n);
            }
        }
        return Ok((rep, None, witness));
    }
    // Constancy on the plateau pins ρ to the same constant.
    let mut constant = None;
    if d.k > d.ell {
        let c = r.at(d.ell).clone();
        for n in d.ell + 1..=d.k {
            if policy.cmp(rho_s.at(n), &c)? != Ordering::Equal || policy.cmp(r.at(n), &c)? != Ordering::Equal {
                witness.push(n);
            }
        }
        constant = Some(c);
    }
    if rho_strict && d.k - d.ell > 1 {
        witness.extend(d.ell + 2..=d.k);
    }
    Ok((rep, constant, witness))
}

/// Checks the hypotheses on `(f, g)`, predicts the pattern of `r = f/g`
/// from the table, and confirms it on the data.
///
/// Non-applicable inputs give `HypothesisFailed`; a failed confirmation
/// gives `TheoremViolated` with witness indices.
pub fn verify_theorem(f: &Seq, g: &Seq, policy: &ComparisonPolicy) -> Result<TheoremVerification> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch(f.a(), f.b(), g.a(), g.b()));
    }
    if f.len() < 2 {
        return Err(Error::DomainTooShort { a: f.a(), b: f.b(), need: 2 });
    }
    let sp = sign_profile(g, policy).map_err(|e| match e {
        Error::SignViolation { kind, index } => Error::HypothesisFailed(format!("{kind:?} at {index}")),
        other => other,
    })?;
    let rho_s = rho(f, g, policy)?;
    let rho_rep = classify(&rho_s, policy)?;
    let mut rho_directions = Vec::new();
    if rho_rep.has_tag(Monotonicity::Nondecreasing) {
        rho_directions.push(Direction::Up);
    }
    if rho_rep.has_tag(Monotonicity::Nonincreasing) {
        rho_directions.push(Direction::Down);
    }
    if rho_directions.is_empty() {
        return Err(Error::HypothesisFailed("rho is not monotone".into()));
    }
    let rho_strict = rho_rep.has_tag(Monotonicity::Increasing) || rho_rep.has_tag(Monotonicity::Decreasing);
    let predicted: Vec<Shape> = rho_directions.iter().map(|&d| table1_predict(d, sp.g_dg_sign())).collect();

    let r = ratio(f, g, policy)?;
    let observed = classify(&r, policy)?;
    let mut first_witness = None;
    for &shape in &predicted {
        let (decomposition, plateau_constant, witness) = check_prediction(&r, &rho_s, shape, rho_strict, policy)?;
        if witness.is_empty() {
            return Ok(TheoremVerification {
                mode: policy.mode,
                sign_profile: sp,
                rho_directions,
                rho_strict,
                predicted,
                band_hits: observed.band_hits + rho_rep.band_hits,
                observed,
                matched: shape,
                decomposition,
                plateau_constant,
            });
        }
        first_witness.get_or_insert(witness);
    }
    Err(Error::TheoremViolated { witness: first_witness.unwrap_or_default(), mode: policy.mode })
}

/// Evaluates the three expressions
/// `g_n g_{n-1} Δr_n`, `(ρ_n - r_n) g_n Δg_n`, `(ρ_n - r_{n-1}) g_{n-1} Δg_n`.
pub fn identity_check(f: &Seq, g: &Seq, n: i64, policy: &ComparisonPolicy) -> Result<IdentityReport> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch(f.a(), f.b(), g.a(), g.b()));
    }
    if f.mode() != g.mode() {
        return Err(Error::MixedMode);
    }
    if n <= f.a() || n > f.b() {
        return Err(Error::IndexOutOfDomain(n));
    }
    let (gn, gp) = (g.at(n), g.at(n - 1));
    let dg = gn - gp;
    for (idx, v) in [(n, gn), (n - 1, gp), (n, &dg)] {
        if policy.is_zero(v)? {
            return Err(Error::DivisorVanishes(idx));
        }
    }
    let rn = f.at(n) / gn;
    let rp = f.at(n - 1) / gp;
    let rho_n = &(f.at(n) - f.at(n - 1)) / &dg;
    let e1 = &(gn * gp) * &(&rn - &rp);
    let e2 = &(&(&rho_n - &rn) * gn) * &dg;
    let e3 = &(&(&rho_n - &rp) * gp) * &dg;
    Ok(IdentityReport::from_sides(vec![e1, e2, e3], policy))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> ComparisonPolicy {
        ComparisonPolicy::exact()
    }

    #[test]
    fn classify_symmetric_v() {
        let rep = classify(&Seq::from_ints(0, &[3, 2, 1, 2, 3]), &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::DownUp);
        assert_eq!((rep.ell, rep.k), (2, 2));
        assert_eq!(rep.plateau, Some(IntInterval::new(2, 2)));
        assert_eq!(rep.half_open_k, Some(2));
    }

    #[test]
    fn classify_worked_ratio() {
        let r = Seq::from_ratios(0, &[(10, 1), (11, 2), (13, 3), (4, 1), (4, 1), (25, 6)]);
        let rep = classify(&r, &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::DownUp);
        assert_eq!((rep.ell, rep.k), (3, 4));
        assert_eq!(rep.plateau, Some(IntInterval::new(3, 4)));
        assert!(rep.strict_form);
        // two-point plateau: half-open split is at ell
        assert_eq!(rep.half_open_k, Some(3));
    }

    #[test]
    fn classify_other_and_degenerate() {
        let rep = classify(&Seq::from_ints(0, &[1, 2, 1, 2]), &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::Other);
        assert!(!rep.strict_form);
        assert_eq!(rep.plateau, None);

        let rep = classify(&Seq::from_ints(5, &[9]), &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::Monotone(Monotonicity::Constant));

        let rep = classify(&Seq::from_ints(0, &[2, 1]), &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::Monotone(Monotonicity::Decreasing));
        assert!(rep.has_tag(Monotonicity::Nonincreasing));

        let rep = classify(&Seq::from_ints(0, &[1, 1, 2]), &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::Monotone(Monotonicity::Nondecreasing));
        assert_eq!((rep.ell, rep.k), (0, 1));

        let rep = classify(&Seq::from_ints(0, &[1, 1, 2, 1, 1]), &ex()).unwrap();
        assert_eq!(rep.pattern, Pattern::UpDown);
        assert!(!rep.strict_form);
    }

    #[test]
    fn decomposition_invariant_bounds() {
        for v in [vec![1, 2, 3], vec![3, 3, 3], vec![2, 1, 3, 1], vec![1, 3, 3, 2, 2]] {
            let s = Seq::from_ints(-2, &v);
            let rep = classify(&s, &ex()).unwrap();
            assert!(s.a() <= rep.ell && rep.ell <= rep.k && rep.k <= s.b(), "{v:?}");
        }
    }

    #[test]
    fn table1_rows() {
        assert_eq!(table1_predict(Direction::Up, Sign::Positive), Shape::DownUp);
        assert_eq!(table1_predict(Direction::Down, Sign::Positive), Shape::UpDown);
        assert_eq!(table1_predict(Direction::Up, Sign::Negative), Shape::UpDown);
        assert_eq!(table1_predict(Direction::Down, Sign::Negative), Shape::DownUp);
    }

    #[test]
    fn verify_worked_instance() {
        let f = Seq::from_ints(0, &[10, 11, 13, 16, 20, 25]);
        let g = Seq::from_ints(0, &[1, 2, 3, 4, 5, 6]);
        let v = verify_theorem(&f, &g, &ex()).unwrap();
        assert_eq!(v.predicted, vec![Shape::DownUp]);
        assert_eq!(v.observed.pattern, Pattern::DownUp);
        assert_eq!((v.decomposition.ell, v.decomposition.k), (3, 4));
        assert_eq!(v.plateau_constant, Some(Scalar::int(4)));
        assert!(v.rho_strict);
    }

    #[test]
    fn verify_constant_rho_accepts_both_rows() {
        let g = Seq::from_ints(0, &[1, 2, 4, 7]);
        let v = verify_theorem(&g, &g, &ex()).unwrap();
        assert_eq!(v.predicted.len(), 2);
        assert_eq!(v.observed.pattern, Pattern::Monotone(Monotonicity::Constant));
    }

    #[test]
    fn verify_hypothesis_failure() {
        let g = Seq::from_ints(0, &[1, 2, 2, 3]);
        let f = Seq::from_ints(0, &[1, 2, 3, 4]);
        match verify_theorem(&f, &g, &ex()) {
            Err(Error::HypothesisFailed(msg)) => assert!(msg.contains("DeltaVanishes")),
            other => panic!("{other:?}"),
        }
        // ρ = [1, 3, 2]: not monotone
        let f = Seq::from_ints(0, &[0, 1, 4, 6]);
        let g = Seq::from_ints(0, &[1, 2, 3, 4]);
        assert!(matches!(verify_theorem(&f, &g, &ex()), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn endpoint_discrimination() {
        let d = |v: &[i64], s| discriminate_endpoints(&Seq::from_ints(0, v), s, &ex());
        assert_eq!(d(&[1, 2, 3], Shape::DownUp).unwrap(), EndpointCase::AtLeftEnd);
        assert_eq!(d(&[3, 2, 1], Shape::DownUp).unwrap(), EndpointCase::AtRightEnd);
        assert_eq!(d(&[3, 1, 2], Shape::DownUp).unwrap(), EndpointCase::Interior);
        assert_eq!(d(&[3, 2, 1], Shape::UpDown).unwrap(), EndpointCase::AtLeftEnd);
        assert_eq!(d(&[1, 3, 2], Shape::UpDown).unwrap(), EndpointCase::Interior);
        assert_eq!(d(&[1, 3, 2], Shape::DownUp), Err(Error::PatternMismatch));
    }

    #[test]
    fn identity_examples() {
        let f = Seq::from_ints(0, &[10, 11, 13, 16, 20, 25]);
        let g = Seq::from_ints(0, &[1, 2, 3, 4, 5, 6]);
        let rep = identity_check(&f, &g, 4, &ex()).unwrap();
        assert!(rep.holds);
        assert!(rep.sides.iter().all(|s| s.is_exact_zero()));
        let rep = identity_check(&g, &g, 2, &ex()).unwrap();
        assert!(rep.sides.iter().all(|s| s.is_exact_zero()));
        assert_eq!(identity_check(&f, &g, 0, &ex()), Err(Error::IndexOutOfDomain(0)));
        let g0 = Seq::from_ints(0, &[1, 2, 2, 3, 4, 5]);
        assert_eq!(identity_check(&f, &g0, 2, &ex()), Err(Error::DivisorVanishes(2)));
    }

    #[test]
    fn approx_plateau_uses_band() {
        let r = Seq::approx(0, vec![3.0, 2.0, 2.0 + 1e-14, 3.0]);
        let rep = classify(&r, &ComparisonPolicy::approx(1e-12)).unwrap();
        assert_eq!(rep.plateau, Some(IntInterval::new(1, 2)));
        assert_eq!(rep.band_hits, 1);
    }
}
