use proptest::prelude::*;

use sdeflow::attractor::{criterion_matrix, lemma61_bound, Lemma61Params};
use sdeflow::cli::config::ScenarioConfig;
use sdeflow::cli::{flatten_json, Format};
use sdeflow::constants::{beta_zero, case_study_kappa, gamma_factor, krylov_bound};
use sdeflow::dispersion::{rate_function_i, ChainingParams};
use sdeflow::elliptic::{solve, EllipticProblem};
use sdeflow::mesh::{norm, sphere_mesh};
use sdeflow::model::probe::{beta_lower, beta_star, ShellSampling};
use sdeflow::model::{bump_profile, VectorFieldSpec};
use sdeflow::seed::derive_seed;
use sdeflow::simulate::{advance, verify_cocycle};
use sdeflow::stats::{mean, wilson_interval};
use sdeflow::{FlowEnsemble, NoisePath, SdeModel, Taming};

fn bump_problem(lambda: f64, drift: f64, scale: f64, shift: f64) -> EllipticProblem<'static> {
    EllipticProblem {
        lambda,
        a_scale: 1.0,
        a: Box::new(|_, o| o[0] = 1.0),
        b: Box::new(move |_, o| o[0] = drift),
        f: Box::new(move |x| scale * bump_profile(x[0] - shift)),
        domain_radius: 4.0,
        h: 0.05,
        dims: 1,
        lambda_threshold: None,
    }
}

fn chaining() -> impl Strategy<Value = ChainingParams> {
    (0.1f64..3.0, 0.2f64..3.0, 1usize..5).prop_map(|(c1, a, d)| ChainingParams::boundary(c1, a, d, 1.0, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resolvent_is_linear_in_data(lambda in 0.5f64..50.0, drift in -3.0f64..3.0, scale in 0.1f64..20.0, shift in -1.0f64..1.0) {
        let one = solve(&bump_problem(lambda, drift, 1.0, shift)).unwrap();
        let many = solve(&bump_problem(lambda, drift, scale, shift)).unwrap();
        for (a, b) in one.u.values.iter().zip(&many.u.values) {
            prop_assert!((b - scale * a).abs() <= 1e-9 * scale * one.u.sup_norm().max(1e-300));
        }
    }

    #[test]
    fn resolvent_respects_maximum_principle(lambda in 0.5f64..50.0, drift in -3.0f64..3.0, shift in -1.0f64..1.0) {
        let s = solve(&bump_problem(lambda, drift, 1.0, shift)).unwrap();
        prop_assert!(s.u.values.iter().all(|&v| v >= -1e-12));
        // u <= sup f / λ
        prop_assert!(s.u.sup_norm() <= 1.0 / lambda + 1e-9);
    }

    #[test]
    fn rate_function_nonnegative_monotone_convex(p in chaining(), a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let il = rate_function_i(lo, &p).unwrap();
        let ih = rate_function_i(hi, &p).unwrap();
        let im = rate_function_i(0.5 * (lo + hi), &p).unwrap();
        prop_assert!(il >= 0.0);
        prop_assert!(ih >= il);
        prop_assert!(im <= 0.5 * (il + ih) + 1e-12 * ih.max(1.0));
    }

    #[test]
    fn lemma_bound_nondecreasing_in_horizon(t1 in 0.0f64..5.0, t2 in 0.0f64..5.0, gap in 0.0f64..6.0, b1 in 0.0f64..1.0, gamma in 0.0f64..2.0) {
        let p = |t: f64| Lemma61Params {
            t,
            r: 1.0,
            r1: 0.0,
            r2: 0.0,
            big_r: 1.0 + gap,
            delta: 0.0,
            delta1: 0.0,
            beta_upper: -1.0,
            beta_lower: 0.0,
            gamma,
            norm_b1: b1,
            k1: 1.0,
            k2: 1.0,
            start: None,
        };
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        let a = lemma61_bound(2, &p(lo)).unwrap();
        let b = lemma61_bound(2, &p(hi)).unwrap();
        prop_assert!(b.value >= a.value);
        prop_assert_eq!(a.vacuous, a.value >= 1.0 || a.value.is_nan());
    }

    #[test]
    fn beta_zero_monotone_in_drift_norm(b1 in 0.0f64..3.0, extra in 0.0f64..3.0, gamma in 1.0f64..4.0) {
        let a = beta_zero(1.0, 2.0, b1, gamma).unwrap();
        let b = beta_zero(1.0, 2.0, b1 + extra, gamma).unwrap();
        prop_assert!(a >= 0.0 && b >= a);
    }

    #[test]
    fn gamma_factor_at_least_one(k1 in 0.1f64..2.0, ratio in 1.0f64..3.0, b in 0.0f64..2.0, d in 1usize..4) {
        let g = gamma_factor(k1, k1 * ratio, 0.0, b, f64::INFINITY, f64::INFINITY, d).unwrap();
        prop_assert!(g >= 1.0);
    }

    #[test]
    fn krylov_bound_scales_linearly(c in 0.1f64..10.0, span in 0.0f64..10.0, nf in 0.0f64..5.0) {
        let one = krylov_bound(1.0, 1.5, 2.0, span, nf);
        prop_assert!((krylov_bound(c, 1.5, 2.0, span, nf) - c * one).abs() <= 1e-12 * (c * one).max(1.0));
    }

    #[test]
    fn case_study_kappa_linear_in_calibration(c in 0.1f64..10.0, b in 0.0f64..0.5, eps in 0.01f64..0.5) {
        let one = case_study_kappa(1.0, 1.0, b, 0.0, 1, eps, 1.0).unwrap();
        let scaled = case_study_kappa(1.0, 1.0, b, 0.0, 1, eps, c).unwrap();
        prop_assert!((scaled - c * one).abs() <= 1e-12 * scaled.max(1.0));
    }

    #[test]
    fn shifted_noise_matches_parent(seed in any::<u64>(), shift in 0i64..1000, k in 0i64..100) {
        let p = NoisePath::new(seed, 2, 1e-2).unwrap();
        let sub = p.shift(shift).subpath(0, 100).unwrap();
        let (mut a, mut b) = ([0.0; 2], [0.0; 2]);
        p.increment(shift + k, &mut a);
        sub.increment(k, &mut b);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cocycle_exact_on_aligned_grids(seed in any::<u64>(), s in 0u32..60, t in 0u32..60, x in -3.0f64..3.0) {
        let m = SdeModel::brownian(1, VectorFieldSpec::SaturatedRadial { beta: -2.0 });
        let noise = NoisePath::new(seed, 1, 1e-2).unwrap();
        let r = verify_cocycle(&m, &[x], s as f64 * 1e-2, t as f64 * 1e-2, &noise, Taming::Clip).unwrap();
        prop_assert!(r.exact);
    }

    #[test]
    fn additive_noise_preserves_differences(seed in any::<u64>(), x in prop::collection::vec(-5.0f64..5.0, 4)) {
        let m = SdeModel::brownian(2, VectorFieldSpec::Zero);
        let noise = NoisePath::new(seed, 2, 1e-2).unwrap();
        let mut ens = FlowEnsemble::new(&m, &[x[..2].to_vec(), x[2..].to_vec()], 0, 1e-2).unwrap();
        let d0 = ens.difference(0, 1);
        advance(&m, &mut ens, &noise, 200, Taming::None, |_| {}).unwrap();
        prop_assert_eq!(ens.difference(0, 1), d0);
    }

    #[test]
    fn seeds_are_deterministic_and_distinct(base in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assert_eq!(derive_seed(base, "x", i), derive_seed(base, "x", i));
        if i != j {
            prop_assert_ne!(derive_seed(base, "x", i), derive_seed(base, "x", j));
        }
        prop_assert_ne!(derive_seed(base, "x", i), derive_seed(base, "y", i));
    }

    #[test]
    fn mean_of_constant_is_exact(v in -1e6f64..1e6, n in 1usize..500) {
        prop_assert_eq!(mean(&vec![v; n]), v);
    }

    #[test]
    fn wilson_interval_brackets_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as usize;
        let (lo, hi) = wilson_interval(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-15 && p <= hi + 1e-15 && hi <= 1.0);
    }

    #[test]
    fn sphere_mesh_on_sphere(r in 0.1f64..10.0, c in prop::collection::vec(-3.0f64..3.0, 2), res in 3usize..40) {
        for pt in sphere_mesh(&c, r, res) {
            let rel: Vec<f64> = pt.iter().zip(&c).map(|(a, b)| a - b).collect();
            prop_assert!((norm(&rel) - r).abs() <= 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn shell_extrema_monotone_in_cap(beta in -5.0f64..5.0, r in 1.0f64..3.0, k1 in 1u32..8, k2 in 1u32..8) {
        let m = SdeModel::brownian(2, VectorFieldSpec::Sum {
            terms: vec![
                VectorFieldSpec::SaturatedRadial { beta },
                VectorFieldSpec::Bump { height: 2.0, width: 2.5, component: 1 },
            ],
        });
        let s = ShellSampling::default();
        let (a, b) = (k1.min(k2) as f64, k1.max(k2) as f64);
        let (cap_a, cap_b) = (r + a * s.radial_step, r + b * s.radial_step);
        prop_assert!(beta_star(&m, r, cap_b, &s).unwrap().value >= beta_star(&m, r, cap_a, &s).unwrap().value);
        prop_assert!(beta_lower(&m, r, cap_b, &s).unwrap().value <= beta_lower(&m, r, cap_a, &s).unwrap().value);
    }

    #[test]
    fn config_round_trips_through_toml(seed in any::<u64>(), json in any::<bool>(), beta in -5.0f64..5.0) {
        let c = ScenarioConfig {
            seed,
            format: if json { Format::Json } else { Format::Csv },
            model: Some(SdeModel::brownian(2, VectorFieldSpec::SaturatedRadial { beta })),
            ..Default::default()
        };
        let back = ScenarioConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn flattened_json_has_one_row_per_leaf(xs in prop::collection::vec(-1e3f64..1e3, 0..20)) {
        let v = serde_json::json!({ "xs": xs, "n": xs.len() });
        prop_assert_eq!(flatten_json(&v).lines().count(), 1 + xs.len() + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn criterion_matrix_monotone(seed in any::<u64>(), beta in -3.0f64..1.0) {
        let m = SdeModel::brownian(2, VectorFieldSpec::SaturatedRadial { beta });
        let cm = criterion_matrix(&m, &[0.5, 1.0, 2.0], &[1.0, 2.0, 4.0, 8.0], &[0.0, 0.5, 1.0, 2.0], 8, 12, 0.05, seed, Taming::Clip).unwrap();
        for h in 0..cm.probability.len() {
            for i in 0..3 {
                for j in 0..4 {
                    let v = cm.probability[h][i][j];
                    prop_assert!((0.0..=1.0).contains(&v));
                    if j > 0 {
                        prop_assert!(v >= cm.probability[h][i][j - 1]);
                    }
                    if h > 0 {
                        prop_assert!(v <= cm.probability[h - 1][i][j]);
                    }
                }
            }
        }
    }
}
