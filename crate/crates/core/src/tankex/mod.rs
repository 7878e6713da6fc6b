//! The offset family `r^(α) = (α + Σ_{j<=n} p_j) / Σ_{j<=n} q_j` with
//! `p_j = j!` and `q_j = (j/e)^j` (`q_0 = 1`).
//!
//! Here `ρ = p/q` is strictly increasing and `r^(0)` is strictly increasing.
//! Raising `α` bends `r^(α)` into a V. The thresholds
//! `α_k = (ρ_k - r_k^(0)) g_k` make `r^(α_k)` flat across `{k-1, k}`, and
//! between consecutive thresholds the minimum of `r^(α)` sits at `k`.
//!
//! All arithmetic runs in [`Ext`] (256-bit mantissa). A strict inequality
//! is accepted only when its margin exceeds [`STRICTNESS_FACTOR`] unit
//! roundoffs of the operands' magnitude.

pub mod ext;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

pub use self::ext::{Ext, PRECISION};
use crate::error::{Error, Result};
use crate::seqcore::Seq;

/// Strict comparisons need a margin above this many unit roundoffs.
pub const STRICTNESS_FACTOR: i64 = 1000;

/// Vertical offset of the normalized figure curves.
pub const FIGURE_OFFSET: f64 = 0.97;

pub const DEFAULT_FIGURE_KS: [usize; 5] = [0, 1, 3, 5, 7];

/// `p`, `q`, `f^(0) = cumsum p` and `g = cumsum q` on `[0, K]`.
#[derive(Debug, Clone)]
pub struct ExampleSequences {
    pub p: Vec<Ext>,
    pub q: Vec<Ext>,
    pub f0: Vec<Ext>,
    pub g: Vec<Ext>,
}

fn cumsum(v: &[Ext]) -> Vec<Ext> {
    let mut acc = Ext::zero();
    v.iter()
        .map(|x| {
            acc = &acc + x;
            acc.clone()
        })
        .collect()
}

/// Comparison with the strictness band: `Equal` when
/// `|x - y| <= STRICTNESS_FACTOR * u * max(|x|, |y|)`.
pub fn banded_cmp(x: &Ext, y: &Ext) -> Ordering {
    let mag = if x.abs() > y.abs() { x.abs() } else { y.abs() };
    let tol = &(&Ext::unit_roundoff() * &Ext::from_i64(STRICTNESS_FACTOR)) * &mag;
    let d = x - y;
    if d.abs() <= tol {
        Ordering::Equal
    } else {
        d.signum()
    }
}

fn strict(x: &Ext, y: &Ext, want: Ordering, what: impl FnOnce() -> String) -> Result<bool> {
    match banded_cmp(x, y) {
        Ordering::Equal => Err(Error::ToleranceAmbiguity(what())),
        o => Ok(o == want),
    }
}

/// `ρ_n = n! e^n / n^n` evaluated through logarithms in f64. Independent of
/// the extended-precision path; for cross-checks only.
pub fn rho_log_space(n: u64) -> f64 {
    assert!(n >= 1);
    let ln_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
    let x = n as f64;
    (ln_fact + x - x * x.ln()).exp()
}

/// Builds the sequences on `[0, K]`.
pub fn example_sequences(window_end: usize) -> Result<ExampleSequences> {
    if window_end < 1 {
        return Err(Error::InvalidArgument("window end K must be >= 1".into()));
    }
    let e = Ext::e();
    let mut p = Vec::with_capacity(window_end + 1);
    let mut q = Vec::with_capacity(window_end + 1);
    let mut fact = BigInt::from(1);
    for j in 0..=window_end {
        if j > 0 {
            fact *= j;
        }
        p.push(Ext::from_bigint(fact.clone()));
        // (j/e)^j with 0^0 = 1
        q.push(if j == 0 { Ext::from_i64(1) } else { (&Ext::from_i64(j as i64) / &e).powi(j as u32) });
    }
    let f0 = cumsum(&p);
    let g = cumsum(&q);
    Ok(ExampleSequences { p, q, f0, g })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEntry {
    pub k: usize,
    /// f64 rounding of `α_k`.
    pub alpha: f64,
    /// `α_k` to 40 significant digits.
    pub alpha_digits: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdTable {
    pub schema: u32,
    pub entries: Vec<ThresholdEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeOutcome {
    pub alpha: f64,
    /// Sign of `r_k - r_{k-1}`, of `ρ_k - r_k`, and of `α_k - α`.
    pub step: i8,
    pub rho_vs_r: i8,
    pub threshold_vs_alpha: i8,
    pub chain_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionReport {
    pub k: usize,
    pub window_end: usize,
    pub alpha_k: f64,
    pub alpha_next: f64,
    /// `|r_k - r_{k-1}| / r_k` at `α = α_k`.
    pub plateau_gap: f64,
    /// Position of the minimum of `r` at the midpoint `(α_k + α_{k+1})/2`.
    pub midpoint_minimum_at: usize,
    pub probes: Vec<ProbeOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureTable {
    pub offset: f64,
    pub ns: Vec<usize>,
    pub columns: Vec<(usize, Vec<f64>)>,
}

fn sign_i8(o: Ordering) -> i8 {
    match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

impl ExampleSequences {
    pub fn window_end(&self) -> usize {
        self.p.len() - 1
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.window_end() {
            return Err(Error::IndexOutOfDomain(n as i64));
        }
        Ok(())
    }

    /// `ρ_n = p_n / q_n` for `n >= 1`.
    pub fn rho(&self, n: usize) -> Result<Ext> {
        if n == 0 {
            return Err(Error::IndexOutOfDomain(0));
        }
        self.check_index(n)?;
        Ok(&self.p[n] / &self.q[n])
    }

    pub fn r0(&self) -> Vec<Ext> {
        self.f0.iter().zip(&self.g).map(|(f, g)| f / g).collect()
    }

    /// `r^(α)` on `[0, K]`, computed as `(α + f^(0)) / g` and cross-checked
    /// against `r^(0) + α/g` to within 8 ulps.
    pub fn r_alpha(&self, alpha: &Ext) -> Result<Vec<Ext>> {
        if alpha.signum() == Ordering::Less {
            return Err(Error::InvalidArgument("alpha must be >= 0".into()));
        }
        let eight = Ext::from_i64(8);
        let mut out = Vec::with_capacity(self.p.len());
        for (n, (f, g)) in self.f0.iter().zip(&self.g).enumerate() {
            let direct = &(alpha + f) / g;
            let via = &(f / g) + &(alpha / g);
            if (&direct - &via).abs() > &eight * &direct.ulp() {
                return Err(Error::ToleranceAmbiguity(format!("two evaluations of r^(alpha) disagree at n={n}")));
            }
            out.push(direct);
        }
        Ok(out)
    }

    /// `α_k = (ρ_k - r_k^(0)) g_k`, with `α_0 = 0`; self-checks
    /// `ρ_k = r_k^(α_k)` within the strictness band.
    pub fn alpha_threshold(&self, k: usize) -> Result<Ext> {
        if k == 0 {
            return Ok(Ext::zero());
        }
        let rho_k = self.rho(k)?;
        let r0k = &self.f0[k] / &self.g[k];
        let alpha = &(&rho_k - &r0k) * &self.g[k];
        let rk = &(&alpha + &self.f0[k]) / &self.g[k];
        if banded_cmp(&rho_k, &rk) != Ordering::Equal {
            return Err(Error::ToleranceAmbiguity(format!("rho_{k} != r_{k}^(alpha_{k})")));
        }
        Ok(alpha)
    }

    pub fn threshold_table(&self, max_k: usize) -> Result<ThresholdTable> {
        let entries = (0..=max_k)
            .map(|k| {
                let a = self.alpha_threshold(k)?;
                Ok(ThresholdEntry { k, alpha: a.to_f64(), alpha_digits: a.to_sci_string(40) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ThresholdTable { schema: 1, entries })
    }

    /// Checks the pattern changes around `α_k` (requires `1 <= k < K`):
    /// (a) at `α_k`: strictly down on `[0, k-1]`, flat on `{k-1, k}`,
    /// strictly up on `[k, K]`; (b) at the midpoint of `α_k` and `α_{k+1}`:
    /// strict V with minimum at `k`; (c) at `α in {α_k/2, α_k, 2α_k}` the
    /// signs of `r_k - r_{k-1}`, `ρ_k - r_k`, `α_k - α` agree, and the chain
    /// `α <= α_k => r_k >= r_{k-1} => r_{k+1} > r_k => α < α_{k+1}` holds.
    pub fn pattern_transition_check(&self, k: usize) -> Result<TransitionReport> {
        let big_k = self.window_end();
        if k < 1 || k >= big_k {
            return Err(Error::InvalidArgument(format!("need 1 <= k < K, got k={k}, K={big_k}")));
        }
        let alpha_k = self.alpha_threshold(k)?;
        let alpha_next = self.alpha_threshold(k + 1)?;
        let mut witness = Vec::new();

        // (a)
        let r = self.r_alpha(&alpha_k)?;
        for n in 1..=big_k {
            let ok = if n < k {
                strict(&r[n], &r[n - 1], Ordering::Less, || format!("(a) r_{n} vs r_{} at alpha_{k}", n - 1))?
            } else if n == k {
                banded_cmp(&r[n], &r[n - 1]) == Ordering::Equal
            } else {
                strict(&r[n], &r[n - 1], Ordering::Greater, || format!("(a) r_{n} vs r_{} at alpha_{k}", n - 1))?
            };
            if !ok {
                witness.push(n as i64);
            }
        }
        let plateau_gap = (&(&r[k] - &r[k - 1]).abs() / &r[k]).to_f64();

        // (b)
        let mid = (&alpha_k + &alpha_next).mul_pow2(-1);
        let r = self.r_alpha(&mid)?;
        for n in 1..=big_k {
            let want = if n <= k { Ordering::Less } else { Ordering::Greater };
            if !strict(&r[n], &r[n - 1], want, || format!("(b) r_{n} vs r_{} at midpoint", n - 1))? {
                witness.push(n as i64);
            }
        }
        let midpoint_minimum_at = (0..=big_k).min_by(|&i, &j| r[i].cmp(&r[j])).expect("nonempty");

        // (c)
        let rho_k = self.rho(k)?;
        let mut probes = Vec::new();
        for (alpha, at_threshold) in [(alpha_k.mul_pow2(-1), false), (alpha_k.clone(), true), (alpha_k.mul_pow2(1), false)] {
            let r = self.r_alpha(&alpha)?;
            let step = banded_cmp(&r[k], &r[k - 1]);
            let rho_vs_r = banded_cmp(&rho_k, &r[k]);
            let thr = banded_cmp(&alpha_k, &alpha);
            if !at_threshold && [step, rho_vs_r, thr].contains(&Ordering::Equal) {
                return Err(Error::ToleranceAmbiguity(format!("(c) probe alpha={} is within the band", alpha.to_f64())));
            }
            if at_threshold && [step, rho_vs_r, thr] != [Ordering::Equal; 3] {
                witness.push(k as i64);
            }
            if !(step == rho_vs_r && rho_vs_r == thr) {
                witness.push(k as i64);
            }
            let a1 = thr.is_ge();
            let a2 = step.is_ge();
            let a3 = banded_cmp(&r[k + 1], &r[k]) == Ordering::Greater;
            let a4 = banded_cmp(&alpha, &alpha_next) == Ordering::Less;
            let chain_holds = (!a1 || a2) && (!a2 || a3) && (!a3 || a4);
            if !chain_holds {
                witness.push(k as i64 + 1);
            }
            probes.push(ProbeOutcome {
                alpha: alpha.to_f64(),
                step: sign_i8(step),
                rho_vs_r: sign_i8(rho_vs_r),
                threshold_vs_alpha: sign_i8(thr),
                chain_holds,
            });
        }

        if !witness.is_empty() {
            witness.sort_unstable();
            witness.dedup();
            return Err(Error::TheoremViolated { witness, mode: crate::seqcore::Mode::Approx });
        }
        Ok(TransitionReport {
            k,
            window_end: big_k,
            alpha_k: alpha_k.to_f64(),
            alpha_next: alpha_next.to_f64(),
            plateau_gap,
            midpoint_minimum_at,
            probes,
        })
    }

    /// Columns `r_n^(α_k) / r_k^(α_k) - offset` for each `k` in `ks`.
    pub fn figure_table(&self, ks: &[usize], offset: f64) -> Result<FigureTable> {
        let big_k = self.window_end();
        let off = Ext::from_f64(offset);
        let mut columns = Vec::with_capacity(ks.len());
        for &k in ks {
            if k >= big_k {
                return Err(Error::InvalidArgument(format!("k={k} must be < K={big_k}")));
            }
            let r = self.r_alpha(&self.alpha_threshold(k)?)?;
            let col = r.iter().map(|x| (&(x / &r[k]) - &off).to_f64()).collect();
            columns.push((k, col));
        }
        Ok(FigureTable { offset, ns: (0..=big_k).collect(), columns })
    }
}

/// Extended values as an approximate [`Seq`] starting at 0.
pub fn to_seq(v: &[Ext]) -> Seq {
    Seq::approx(0, v.iter().map(Ext::to_f64).collect())
}

impl FigureTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for (k, _) in &self.columns {
            write!(out, ",k={k}").expect("string write");
        }
        out.push('\n');
        for (i, n) in self.ns.iter().enumerate() {
            write!(out, "{n}").expect("string write");
            for (_, col) in &self.columns {
                write!(out, ",{:.12e}", col[i]).expect("string write");
            }
            out.push('\n');
        }
        out
    }

    /// Polylines (linear interpolation between integer points) in a
    /// 600x400 viewport, one per column.
    pub fn to_svg(&self) -> String {
        const W: f64 = 600.0;
        const H: f64 = 400.0;
        const PAD: f64 = 30.0;
        let all = self.columns.iter().flat_map(|(_, c)| c.iter().copied());
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let nmax = *self.ns.last().unwrap_or(&1) as f64;
        let x = |n: usize| PAD + (W - 2.0 * PAD) * n as f64 / nmax.max(1.0);
        let y = |v: f64| H - PAD - (H - 2.0 * PAD) * (v - lo) / span;
        let colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"];
        let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n");
        for (i, (k, col)) in self.columns.iter().enumerate() {
            let pts: Vec<String> = self.ns.iter().zip(col).map(|(&n, &v)| format!("{:.2},{:.2}", x(n), y(v))).collect();
            writeln!(
                out,
                "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"><title>k={k}</title></polyline>",
                colors[i % colors.len()],
                pts.join(" ")
            )
            .expect("string write");
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seqs() -> ExampleSequences {
        example_sequences(30).unwrap()
    }

    #[test]
    fn first_terms() {
        let s = seqs();
        let r0 = s.r0();
        assert_eq!(r0[0], Ext::from_i64(1));
        // r_1 = 2 / (1 + 1/e)
        let want = 2.0 / (1.0 + (-1.0f64).exp());
        assert!((r0[1].to_f64() - want).abs() < 1e-15);
        assert!((r0[1].to_f64() - 1.46211716).abs() < 1e-8);
        assert!(r0[1] > r0[0]);
        assert_eq!(s.rho(1).unwrap().to_sci_string(30), Ext::e().to_sci_string(30));
    }

    #[test]
    fn rho_strictly_increasing_and_matches_log_space() {
        let s = seqs();
        for n in 1..=30 {
            let r = s.rho(n).unwrap();
            let rel = (r.to_f64() - rho_log_space(n as u64)).abs() / r.to_f64();
            assert!(rel < 1e-12, "n={n} rel={rel}");
            if n > 1 {
                assert!(strict(&r, &s.rho(n - 1).unwrap(), Ordering::Greater, String::new).unwrap());
            }
        }
    }

    #[test]
    fn r0_strictly_increasing() {
        let r0 = seqs().r0();
        for n in 1..r0.len() {
            assert_eq!(banded_cmp(&r0[n], &r0[n - 1]), Ordering::Greater);
        }
    }

    #[test]
    fn alpha_one_is_e_minus_one() {
        let a1 = seqs().alpha_threshold(1).unwrap();
        let want = &Ext::e() - &Ext::from_i64(1);
        assert_eq!(banded_cmp(&a1, &want), Ordering::Equal);
    }

    #[test]
    fn large_alpha_decreasing_everywhere() {
        let s = seqs();
        let big = &s.alpha_threshold(30).unwrap() * &Ext::from_i64(10);
        let r = s.r_alpha(&big).unwrap();
        for n in 1..r.len() {
            assert_eq!(banded_cmp(&r[n], &r[n - 1]), Ordering::Less, "n={n}");
        }
    }

    #[test]
    fn transition_k1_and_k3() {
        let s = seqs();
        let rep = s.pattern_transition_check(1).unwrap();
        assert_eq!(rep.midpoint_minimum_at, 1);
        let rep = s.pattern_transition_check(3).unwrap();
        assert_eq!(rep.midpoint_minimum_at, 3);
        assert!(rep.plateau_gap < 1e-70);
        assert_eq!(rep.probes[0].step, 1);
        assert_eq!(rep.probes[2].step, -1);
        assert!(s.pattern_transition_check(0).is_err());
        assert!(s.pattern_transition_check(30).is_err());
    }

    #[test]
    fn negative_alpha_rejected() {
        assert!(seqs().r_alpha(&Ext::from_i64(-1)).is_err());
    }

    #[test]
    fn figure_csv_shape() {
        let t = seqs().figure_table(&DEFAULT_FIGURE_KS, FIGURE_OFFSET).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("n,k=0,k=1,k=3,k=5,k=7\n"));
        assert_eq!(csv.lines().count(), 32);
        assert!(t.to_svg().matches("<polyline").count() == 5);
    }
}
