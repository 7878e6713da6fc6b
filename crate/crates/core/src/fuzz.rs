//! Seeded random instances of the ratio-pattern theorem.
//!
//! Each instance picks a window `[0, L]`, an exact-rational monotone `ρ`
//! (with ties), a `g` with constant signs of `g` and `Δg`, and sets
//! `Δf = ρ Δg` from a starting value `f_0`. Roughly one instance in four
//! gets a plateau: `ρ` is held constant on a short run starting at `j` and
//! `f_0` is chosen so that `r_{j-1} = ρ_j`, which makes `r` flat there.
//!
//! Instance `i` draws from `ChaCha8Rng` seeded by `splitmix64(seed, i)`,
//! so results do not depend on scheduling.

use std::cmp::Ordering;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::patterns::{verify_theorem, Direction, TABLE1};
use crate::seqcore::{rho, ComparisonPolicy, Seq, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoChoice {
    Up,
    Down,
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    Pos,
    Neg,
    Either,
}

impl FromStr for RhoChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(RhoChoice::Up),
            "down" => Ok(RhoChoice::Down),
            "either" => Ok(RhoChoice::Either),
            _ => Err(Error::Parse(format!("expected up|down|either, got {s:?}"))),
        }
    }
}

impl FromStr for SignChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" => Ok(SignChoice::Pos),
            "neg" => Ok(SignChoice::Neg),
            "either" => Ok(SignChoice::Either),
            _ => Err(Error::Parse(format!("expected pos|neg|either, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSpec {
    pub instances: u64,
    /// Largest right end `L` of the window `[0, L]`.
    pub max_len: usize,
    pub rho_direction: RhoChoice,
    /// Sign of `g` itself; the sign of `Δg` is always drawn at random.
    pub g_sign: SignChoice,
    pub seed: u64,
}

impl Default for FuzzSpec {
    fn default() -> Self {
        FuzzSpec { instances: 10_000, max_len: 40, rho_direction: RhoChoice::Either, g_sign: SignChoice::Either, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzInstance {
    pub index: u64,
    pub sub_seed: u64,
    pub f: Seq,
    pub g: Seq,
    pub rho_direction: Direction,
    pub g_dg_sign: Sign,
    /// Index into the prediction table.
    pub row: usize,
    pub plateau_injected: bool,
}

/// Per-instance seed: splitmix64 of `seed + (index+1)·γ`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    rat(rng.random_range(lo..=hi), rng.random_range(1..=9))
}

fn random_positive(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.random_range(1..=9), rng.random_range(1..=9))
}

fn pick_sign(rng: &mut ChaCha8Rng, c: SignChoice) -> Sign {
    match c {
        SignChoice::Pos => Sign::Positive,
        SignChoice::Neg => Sign::Negative,
        SignChoice::Either => {
            if rng.random_bool(0.5) {
                Sign::Positive
            } else {
                Sign::Negative
            }
        }
    }
}

fn signed(s: Sign, x: BigRational) -> BigRational {
    match s {
        Sign::Positive => x,
        Sign::Negative => -x,
    }
}

/// Builds instance `index` of the stream defined by `spec`.
pub fn fuzz_instance(spec: &FuzzSpec, index: u64) -> Result<FuzzInstance> {
    if spec.max_len < 1 {
        return Err(Error::InvalidArgument("max_len must be >= 1".into()));
    }
    let s = sub_seed(spec.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let big_l = rng.random_range(1..=spec.max_len);

    let direction = match spec.rho_direction {
        RhoChoice::Up => Direction::Up,
        RhoChoice::Down => Direction::Down,
        RhoChoice::Either => {
            if rng.random_bool(0.5) {
                Direction::Up
            } else {
                Direction::Down
            }
        }
    };
    let g_sign = pick_sign(&mut rng, spec.g_sign);
    let dg_sign = pick_sign(&mut rng, SignChoice::Either);

    // plateau: ρ constant on [j, j+m]
    let plateau = if big_l >= 2 && rng.random_bool(0.25) {
        let j = rng.random_range(1..big_l);
        let m = rng.random_range(1..=(big_l - j).min(3));
        Some((j, m))
    } else {
        None
    };

    // ρ_1..ρ_L, weakly monotone with random ties
    let mut rho_v = Vec::with_capacity(big_l);
    let mut cur = random_rat(&mut rng, -20, 20);
    for n in 1..=big_l {
        if n > 1 {
            let forced_tie = plateau.is_some_and(|(j, m)| n > j && n <= j + m);
            if !forced_tie && !rng.random_bool(0.3) {
                let step = random_positive(&mut rng);
                cur = match direction {
                    Direction::Up => cur + step,
                    Direction::Down => cur - step,
                };
            }
        }
        rho_v.push(cur.clone());
    }

    // |g| monotone in the direction making sign(Δg) = dg_sign
    let abs_up = g_sign.times(dg_sign) == Sign::Positive;
    let mut abs_g = vec![BigRational::zero(); big_l + 1];
    let mut acc = random_positive(&mut rng);
    let order: Vec<usize> = if abs_up { (0..=big_l).collect() } else { (0..=big_l).rev().collect() };
    for (step, &n) in order.iter().enumerate() {
        if step > 0 {
            acc += random_positive(&mut rng);
        }
        abs_g[n] = acc.clone();
    }
    let g_v: Vec<BigRational> = abs_g.into_iter().map(|x| signed(g_sign, x)).collect();

    let dg = |n: usize| &g_v[n] - &g_v[n - 1];
    let f0 = match plateau {
        // f_{j-1} = ρ_j g_{j-1}
        Some((j, _)) => {
            let head: BigRational = (1..j).map(|i| &rho_v[i - 1] * dg(i)).sum();
            &rho_v[j - 1] * &g_v[j - 1] - head
        }
        None => random_rat(&mut rng, -20, 20),
    };
    let mut f_v = Vec::with_capacity(big_l + 1);
    f_v.push(f0);
    for n in 1..=big_l {
        let next = &f_v[n - 1] + &rho_v[n - 1] * dg(n);
        f_v.push(next);
    }

    let g_dg_sign = g_sign.times(dg_sign);
    let row = TABLE1
        .iter()
        .position(|r| r.rho_pattern == direction && r.g_dg_sign == g_dg_sign)
        .expect("table is total");
    Ok(FuzzInstance {
        index,
        sub_seed: s,
        f: Seq::exact(0, f_v),
        g: Seq::exact(0, g_v),
        rho_direction: direction,
        g_dg_sign,
        row,
        plateau_injected: plateau.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzFailure {
    pub index: u64,
    pub sub_seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub schema: u32,
    pub spec: FuzzSpec,
    pub passed: u64,
    pub violations: u64,
    pub hypothesis_failures: u64,
    pub errors: u64,
    /// Instances per table row, in table order.
    pub row_counts: [u64; 4],
    pub degenerate: u64,
    pub plateaus_injected: u64,
    /// Verified plateaus `[ell, k]` with `k > ell`.
    pub plateaus_checked: u64,
    /// Plateaus on which `ρ` differs from the plateau constant.
    pub plateau_violations: u64,
    pub first_failure: Option<FuzzFailure>,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        self.violations == 0 && self.hypothesis_failures == 0 && self.errors == 0 && self.plateau_violations == 0
    }
}

enum Outcome {
    Pass { degenerate: bool, plateau: Option<bool> },
    Violation(String),
    Hypothesis(String),
    Other(String),
}

fn run_one(inst: &FuzzInstance) -> Outcome {
    let policy = ComparisonPolicy::exact();
    match verify_theorem(&inst.f, &inst.g, &policy) {
        Ok(v) => {
            let plateau = match (v.decomposition.plateau, &v.plateau_constant) {
                (Some(p), Some(c)) if p.b > p.a => {
                    let rho_s = match rho(&inst.f, &inst.g, &policy) {
                        Ok(r) => r,
                        Err(e) => return Outcome::Other(e.to_string()),
                    };
                    Some((p.a + 1..=p.b).all(|n| rho_s.at(n) == c))
                }
                _ => None,
            };
            if plateau == Some(false) {
                return Outcome::Violation("rho is not constant on the plateau".into());
            }
            Outcome::Pass { degenerate: v.is_degenerate(), plateau }
        }
        Err(e @ Error::TheoremViolated { .. }) => Outcome::Violation(e.to_string()),
        Err(e @ Error::HypothesisFailed(_)) => Outcome::Hypothesis(e.to_string()),
        Err(e) => Outcome::Other(e.to_string()),
    }
}

/// Runs `spec.instances` instances in parallel and tallies the outcomes.
pub fn fuzz_theorem(spec: &FuzzSpec) -> Result<FuzzReport> {
    let results: Vec<(FuzzInstance, Outcome)> = (0..spec.instances)
        .into_par_iter()
        .map(|i| fuzz_instance(spec, i).map(|inst| {
            let o = run_one(&inst);
            (inst, o)
        }))
        .collect::<Result<Vec<_>>>()?;

    let mut rep = FuzzReport {
        schema: 1,
        spec: spec.clone(),
        passed: 0,
        violations: 0,
        hypothesis_failures: 0,
        errors: 0,
        row_counts: [0; 4],
        degenerate: 0,
        plateaus_injected: 0,
        plateaus_checked: 0,
        plateau_violations: 0,
        first_failure: None,
    };
    // results are in index order, so the first failure is the lowest index
    for (inst, o) in results {
        rep.row_counts[inst.row] += 1;
        rep.plateaus_injected += inst.plateau_injected as u64;
        let failure = match o {
            Outcome::Pass { degenerate, plateau } => {
                rep.passed += 1;
                rep.degenerate += degenerate as u64;
                rep.plateaus_checked += plateau.is_some() as u64;
                None
            }
            Outcome::Violation(m) => {
                rep.violations += 1;
                if m.starts_with("rho") {
                    rep.plateau_violations += 1;
                }
                Some(m)
            }
            Outcome::Hypothesis(m) => {
                rep.hypothesis_failures += 1;
                Some(m)
            }
            Outcome::Other(m) => {
                rep.errors += 1;
                Some(m)
            }
        };
        if let (Some(message), None) = (failure, &rep.first_failure) {
            rep.first_failure = Some(FuzzFailure { index: inst.index, sub_seed: inst.sub_seed, message });
        }
    }
    Ok(rep)
}

/// Compares consecutive values of `ρ` for an instance (test helper).
pub fn rho_is_weakly(inst: &FuzzInstance) -> Result<bool> {
    let r = rho(&inst.f, &inst.g, &ComparisonPolicy::exact())?;
    let want = match inst.rho_direction {
        Direction::Up => Ordering::Greater,
        Direction::Down => Ordering::Less,
    };
    let v = r.values();
    Ok(v.windows(2).all(|w| {
        let o = w[1].as_exact().cmp(&w[0].as_exact());
        o == want || o == Ordering::Equal
    }))
}
