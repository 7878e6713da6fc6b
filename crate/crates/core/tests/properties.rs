mod common;

use std::cmp::Ordering;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use lhospital::fuzz::{fuzz_instance, FuzzSpec};
use lhospital::limits::{rho_range, weighted_mean_forms};
use lhospital::logops::{
    apply_l_head, check_head_corollary, head_tail_conjugation_check, log_shape, r_tail_finite, semigroup_check,
    LogShape, OperatorKind,
};
use lhospital::patterns::{classify, identity_check, verify_theorem, Monotonicity, Shape};
use lhospital::seqcore::{reflect_h, reflect_v, shift};
use lhospital::tankex::{banded_cmp, example_sequences, Ext};
use lhospital::{delta, ratio, rho, ComparisonPolicy, Scalar, Seq};

fn ex() -> ComparisonPolicy {
    ComparisonPolicy::exact()
}

fn rationals(min: usize, max: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-30i64..=30, 1i64..=9), min..=max).prop_map(|v| v.into_iter().map(|(n, d)| q(n, d)).collect())
}

fn nonzero_rationals(min: usize, max: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((1i64..=30, 1i64..=9, any::<bool>()), min..=max)
        .prop_map(|v| v.into_iter().map(|(n, d, neg)| q(if neg { -n } else { n }, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn delta_of_reflection(v in rationals(2, 15), a in -10i64..10) {
        let f = seq(a, &v);
        let dh = delta(&reflect_h(&f)).unwrap();
        let df = delta(&f).unwrap();
        for (n, x) in dh.iter() {
            prop_assert_eq!(x, &-df.at(-n + 1));
        }
    }

    #[test]
    fn delta_is_linear(v in rationals(3, 12), w in rationals(3, 12), c in -5i64..5, d in -5i64..5) {
        let len = v.len().min(w.len());
        let (f, g) = (seq(0, &v[..len]), seq(0, &w[..len]));
        let (c, d) = (Scalar::int(c), Scalar::int(d));
        let lhs = delta(&f.scale(&c).unwrap().add(&g.scale(&d).unwrap()).unwrap()).unwrap();
        let rhs = delta(&f).unwrap().scale(&c).unwrap().add(&delta(&g).unwrap().scale(&d).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reflections_and_shift_invert(v in rationals(1, 12), a in -10i64..10, s in -7i64..7) {
        let f = seq(a, &v);
        prop_assert_eq!(reflect_h(&reflect_h(&f)), f.clone());
        prop_assert_eq!(reflect_v(&reflect_v(&f)), f.clone());
        prop_assert_eq!(shift(&shift(&f, s), -s), f);
    }

    #[test]
    fn ratio_times_divisor_restores(v in rationals(1, 12), w in nonzero_rationals(12, 12)) {
        let f = seq(0, &v);
        let g = seq(0, &w[..v.len()]);
        let r = ratio(&f, &g, &ex()).unwrap();
        prop_assert_eq!(r.mul(&g).unwrap(), f);
    }

    #[test]
    fn three_expressions_agree(seed in any::<u64>(), len in 2usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<_> = (0..len).map(|_| rand_q(&mut rng, -20, 20)).collect();
        let g = rand_g_free(&mut rng, len);
        let (fs, gs) = (seq(0, &f), seq(0, &g));
        for n in 1..len {
            let rep = identity_check(&fs, &gs, n as i64, &ex()).unwrap();
            prop_assert!(rep.holds);
            // direct evaluation of the left side
            let lhs = &g[n] * &g[n - 1] * (&f[n] / &g[n] - &f[n - 1] / &g[n - 1]);
            prop_assert_eq!(&rep.sides[0], &as_scalar(&lhs));
        }
    }

    #[test]
    fn theorem_holds_on_generated_instances(seed in any::<u64>(), idx in 0u64..1000) {
        let spec = FuzzSpec { instances: 1, seed, ..FuzzSpec::default() };
        let inst = fuzz_instance(&spec, idx).unwrap();
        let v = verify_theorem(&inst.f, &inst.g, &ex()).unwrap();
        let r = pointwise_ratio(&exact_values(&inst.f), &exact_values(&inst.g));
        match v.matched {
            Shape::DownUp => prop_assert!(brute_down_up(&r)),
            Shape::UpDown => prop_assert!(brute_up_down(&r)),
        }
        prop_assert!(v.predicted.contains(&v.matched));
        // constancy on the plateau
        if let (Some(p), Some(c)) = (v.decomposition.plateau, &v.plateau_constant) {
            let rs = rho(&inst.f, &inst.g, &ex()).unwrap();
            for n in p.a + 1..=p.b {
                prop_assert_eq!(rs.at(n), c);
                prop_assert_eq!(&as_scalar(&r[n as usize]), c);
            }
        }
        // strict ρ: at most one vanishing Δr
        if v.rho_strict {
            let zeros = diff(&r).iter().filter(|d| **d == q(0, 1)).count();
            prop_assert!(zeros <= 1);
        }
    }

    #[test]
    fn vertical_reflection_mirrors_shape(seed in any::<u64>(), idx in 0u64..1000) {
        let spec = FuzzSpec { instances: 1, seed, ..FuzzSpec::default() };
        let inst = fuzz_instance(&spec, idx).unwrap();
        let v = verify_theorem(&inst.f, &inst.g, &ex()).unwrap();
        let w = verify_theorem(&reflect_v(&inst.f), &inst.g, &ex()).unwrap();
        if v.rho_directions.len() == 1 {
            prop_assert_eq!(w.matched, v.matched.mirror());
        }
        let r = pointwise_ratio(&exact_values(&reflect_v(&inst.f)), &exact_values(&inst.g));
        match v.matched.mirror() {
            Shape::DownUp => prop_assert!(brute_down_up(&r)),
            Shape::UpDown => prop_assert!(brute_up_down(&r)),
        }
    }

    #[test]
    fn horizontal_reflection_keeps_shape(seed in any::<u64>(), idx in 0u64..1000) {
        // reversing the index reverses ρ and flips the sign of gΔg; the
        // predicted shape of r is unchanged
        let spec = FuzzSpec { instances: 1, seed, ..FuzzSpec::default() };
        let inst = fuzz_instance(&spec, idx).unwrap();
        let v = verify_theorem(&inst.f, &inst.g, &ex()).unwrap();
        let w = verify_theorem(&reflect_h(&inst.f), &reflect_h(&inst.g), &ex()).unwrap();
        let mut a = w.predicted.clone();
        let mut b = v.predicted.clone();
        a.sort_by_key(|s| *s as u8);
        b.sort_by_key(|s| *s as u8);
        prop_assert_eq!(a, b);
        prop_assert_eq!(w.sign_profile.g_dg_sign(), v.sign_profile.g_dg_sign().flip());
    }

    #[test]
    fn chord_ratio_within_rho_range(seed in any::<u64>(), len in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<_> = (0..len).map(|_| rand_q(&mut rng, -20, 20)).collect();
        let g = rand_g_monotone(&mut rng, len);
        let (fs, gs) = (seq(0, &f), seq(0, &g));
        let rs = rho(&fs, &gs, &ex()).unwrap();
        let rv = exact_values(&rs);
        for m in 0..len - 1 {
            for n in m + 1..len {
                let (chord, mean) = weighted_mean_forms(&fs, &gs, m as i64, n as i64, &ex()).unwrap();
                prop_assert_eq!(&chord, &mean);
                let (lo, hi) = min_max(&rv[m..n]);
                let c = chord.as_exact().unwrap().clone();
                prop_assert!(lo <= c && c <= hi);
                prop_assert_eq!(rho_range(&rs, m as i64, n as i64, &ex()).unwrap(), (as_scalar(&lo), as_scalar(&hi)));
            }
        }
    }

    #[test]
    fn enclosure_width_shrinks_with_start(v in rationals(3, 20)) {
        // ρ arbitrary here: dropping points can only narrow the range
        let rs = seq(1, &v);
        let b = rs.b();
        let mut last: Option<BigRational> = None;
        for m in 0..b - 1 {
            let (lo, hi) = rho_range(&rs, m, b, &ex()).unwrap();
            let w = hi.as_exact().unwrap() - lo.as_exact().unwrap();
            if let Some(prev) = &last {
                prop_assert!(w <= *prev);
            }
            last = Some(w);
        }
    }

    #[test]
    fn operators_form_semigroups(seed in any::<u64>(), len in 1usize..10, k1 in 1u64..=5, k2 in 1u64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = seq(0, &rand_finite_support(&mut rng, len));
        prop_assert!(semigroup_check(&p, k1, k2, OperatorKind::LHead, &ex()).unwrap().holds);
        prop_assert!(semigroup_check(&p, k1, k2, OperatorKind::RTail, &ex()).unwrap().holds);
        prop_assert!(head_tail_conjugation_check(&p, k1, &ex()).unwrap().holds);
        let pv = exact_values(&p);
        prop_assert_eq!(exact_values(&apply_l_head(&p, k1).unwrap()), head_by_partial_sums(&pv, k1));
        prop_assert_eq!(exact_values(&r_tail_finite(&p, k1).unwrap()), tail_by_partial_sums(&pv, k1));
    }

    #[test]
    fn head_sums_strictify_log_concavity(seed in any::<u64>(), len in 3usize..=12, k in 1u64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rand_log_concave(&mut rng, len);
        prop_assert!(log_gaps(&p).iter().all(|o| *o != Ordering::Less));
        let rep = check_head_corollary(&seq(0, &p), k, &ex()).unwrap();
        prop_assert_eq!(rep.result_shape, LogShape::StrictLogConcave);
        let lk = head_by_partial_sums(&p, k);
        prop_assert!(log_gaps(&lk).iter().all(|o| *o == Ordering::Greater));
    }

    #[test]
    fn log_shape_matches_gap_signs(v in nonzero_rationals(3, 10)) {
        let p: Vec<BigRational> = v.iter().map(|x| if *x < q(0, 1) { -x } else { x.clone() }).collect();
        let shape = log_shape(&seq(0, &p), &ex()).unwrap().shape;
        let gaps = log_gaps(&p);
        prop_assert_eq!(shape.is_log_concave(), gaps.iter().all(|o| *o != Ordering::Less));
        prop_assert_eq!(shape.is_log_convex(), gaps.iter().all(|o| *o != Ordering::Greater));
        prop_assert_eq!(shape == LogShape::Both, is_geometric(&p));
    }

    #[test]
    fn classify_tags_agree_with_differences(v in rationals(2, 12)) {
        let rep = classify(&seq(0, &v), &ex()).unwrap();
        let d = diff(&v);
        prop_assert_eq!(rep.has_tag(Monotonicity::Nondecreasing), d.iter().all(|x| *x >= q(0, 1)));
        prop_assert_eq!(rep.has_tag(Monotonicity::Increasing), d.iter().all(|x| *x > q(0, 1)));
        prop_assert_eq!(rep.has_tag(Monotonicity::Nonincreasing), d.iter().all(|x| *x <= q(0, 1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn offset_family_two_paths_agree(alpha in 0.0f64..50.0) {
        let s = example_sequences(20).unwrap();
        let a = Ext::from_f64(alpha);
        let direct = s.r_alpha(&a).unwrap();
        let r0 = s.r0();
        for (n, x) in direct.iter().enumerate() {
            let via = &r0[n] + &(&a / &s.g[n]);
            prop_assert_eq!(banded_cmp(x, &via), Ordering::Equal);
        }
    }
}

#[test]
fn geometric_head_sums_are_nowhere_log_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = rand_geometric(&mut rng, 8);
        let rep = check_head_corollary(&seq(0, &p), 1, &ex()).unwrap();
        assert!(rep.nowhere_log_convex);
        assert_eq!(rep.p_shape, LogShape::Both);
    }
}

#[test]
fn fuzz_stream_is_reproducible() {
    let spec = FuzzSpec { instances: 1, seed: 99, ..FuzzSpec::default() };
    for i in [0, 5, 500] {
        let a = fuzz_instance(&spec, i).unwrap();
        let b = fuzz_instance(&spec, i).unwrap();
        assert_eq!((a.f, a.g, a.sub_seed), (b.f, b.g, b.sub_seed));
    }
}

#[test]
fn approx_and_exact_agree_on_clear_patterns() {
    let f = Seq::from_ints(0, &[9, 4, 1, 0, 1, 4, 9]);
    let ex_rep = classify(&f, &ex()).unwrap();
    let ap_rep = classify(&f.to_mode(lhospital::Mode::Approx).unwrap(), &ComparisonPolicy::approx(1e-12)).unwrap();
    assert_eq!(ex_rep.pattern, ap_rep.pattern);
    assert_eq!((ex_rep.ell, ex_rep.k), (ap_rep.ell, ap_rep.k));
}
