use icb::fme::{self, eliminate_sequence, extend_point, max_sum_rate, oracle, LinearSystem, Pruning, SumRate};
use icb::gaussian::{build_model, genie_gap, genie_objective_via_mi};
use icb::genie::{inner_min_g, OptimizerConfig};
use icb::model::{genie_objective, lower_bound_sum_rate, max_lower_bound, useful_genie_slack};
use icb::regimes::{gamma_b_boundary_power, in_gamma_a, in_gamma_b, smart_genie_solve, BOUNDARY_TOL};
use icb::rng::keyed_rng;
use icb::sweep::fmt_g12;
use icb::{ChannelParams, GenieParams, PowerAllocation};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn genie() -> impl Strategy<Value = GenieParams> {
    (0.0..0.95f64, 0.0..0.95f64, 0.01..1.0f64, 0.01..1.0f64).prop_map(|(a1, a2, v1, v2)| GenieParams {
        a1_sq: a1,
        a2_sq: a2,
        v1,
        v2,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Random rational points of `[-6, 6]^n` on a grid of step 1/4.
fn grid_points(seed: u64, n: usize, count: usize) -> Vec<Vec<BigRational>> {
    let mut rng = keyed_rng(seed, 99);
    (0..count)
        .map(|_| (0..n).map(|_| BigRational::new(rng.random_range(-24..=24i64).into(), 4.into())).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn objective_matches_log_det_route(p in 0.1..50.0f64, c in 0.0..1.0f64, f1 in 0.0..=1.0f64, f2 in 0.0..=1.0f64, gp in genie()) {
        let ch = ChannelParams::new(p, c).unwrap();
        let alloc = PowerAllocation::from_private(&ch, f1 * p, f2 * p).unwrap();
        if let (Ok(f), Ok(m)) = (genie_objective(&ch, &alloc, &gp), build_model(&ch, &alloc, &gp)) {
            let mi = genie_objective_via_mi(&m).unwrap();
            prop_assert!(rel(f, mi) < 1e-9, "{} vs {}", f, mi);
        }
    }

    #[test]
    fn objective_is_symmetric_under_user_swap(p in 0.1..50.0f64, c in 0.0..1.0f64, f1 in 0.0..=1.0f64, f2 in 0.0..=1.0f64, gp in genie()) {
        let ch = ChannelParams::new(p, c).unwrap();
        let a = PowerAllocation::from_private(&ch, f1 * p, f2 * p).unwrap();
        let b = PowerAllocation::from_private(&ch, f2 * p, f1 * p).unwrap();
        match (genie_objective(&ch, &a, &gp), genie_objective(&ch, &b, &gp.swapped())) {
            (Ok(x), Ok(y)) => prop_assert!(rel(x, y) < 1e-12),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "one side failed: {:?}", other),
        }
        prop_assert!((useful_genie_slack(&ch, &a, &gp) - useful_genie_slack(&ch, &b, &gp.swapped())).abs() < 1e-15);
    }

    #[test]
    fn genie_gap_is_nonnegative_and_closes_identity(p in 0.1..50.0f64, c in 0.0..1.0f64, frac in 0.0..=1.0f64, gp in genie()) {
        let ch = ChannelParams::new(p, c).unwrap();
        let alloc = PowerAllocation::symmetric(&ch, frac * p).unwrap();
        if let (Ok(f), Ok(m)) = (genie_objective(&ch, &alloc, &gp), build_model(&ch, &alloc, &gp)) {
            let gap = genie_gap(&m).unwrap();
            let r = lower_bound_sum_rate(&ch, alloc.common).unwrap();
            prop_assert!(gap >= -1e-12, "gap {}", gap);
            prop_assert!(rel(f, r + gap) < 1e-9);
        }
    }

    #[test]
    fn smart_genie_solutions_satisfy_their_conditions(p in 0.0..100.0f64, c in 0.0..0.6f64) {
        let ch = ChannelParams::new(p, c).unwrap();
        let sol = smart_genie_solve(&ch);
        if let Some(s) = sol {
            prop_assert!(s.residuals(&ch).satisfied(BOUNDARY_TOL));
        }
        if in_gamma_a(&ch) {
            prop_assert!(sol.is_some());
        }
    }

    #[test]
    fn matching_regime_lies_in_decreasing_regime(p in 0.0..1000.0f64, c in 0.0..0.5f64) {
        let ch = ChannelParams::new(p, c).unwrap();
        prop_assert!(!in_gamma_a(&ch) || in_gamma_b(&ch));
    }

    #[test]
    fn zero_common_power_is_best_in_decreasing_regime(c in 0.0..0.41f64, scale in 0.0..=1.0f64, frac in 0.0..=1.0f64) {
        // sample inside the regime rather than rejecting
        let p = scale * gamma_b_boundary_power(c).unwrap_or(100.0).min(100.0);
        let ch = ChannelParams::new(p, c).unwrap();
        prop_assert!(in_gamma_b(&ch));
        let r0 = lower_bound_sum_rate(&ch, 0.0).unwrap();
        prop_assert!(lower_bound_sum_rate(&ch, frac * p).unwrap() <= r0 + 1e-12);
        let (best, arg) = max_lower_bound(&ch, 101).unwrap();
        prop_assert_eq!(arg, 0.0);
        prop_assert_eq!(best, r0);
    }

    #[test]
    fn lower_bound_maximum_dominates_grid(p in 0.0..60.0f64, c in 0.0..1.5f64, frac in 0.0..=1.0f64) {
        let ch = ChannelParams::new(p, c).unwrap();
        let (best, arg) = max_lower_bound(&ch, 101).unwrap();
        prop_assert!((0.0..=p).contains(&arg));
        prop_assert!(best >= lower_bound_sum_rate(&ch, frac * p).unwrap() - 1e-9);
        prop_assert_eq!(best, lower_bound_sum_rate(&ch, arg).unwrap());
    }

    #[test]
    fn g12_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let s = fmt_g12(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!(rel(x, back) <= 5e-12 || x == back, "{} -> {}", x, s);
        prop_assert!(s.len() <= 18);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_matches_vertex_oracle(seed in any::<u64>(), n in 2usize..=4, extra in 0usize..=6) {
        let sys = oracle::random_bounded_system(&mut keyed_rng(seed, 0), n, extra, 5);
        let names: Vec<&str> = sys.variables().iter().map(String::as_str).collect();
        let want = oracle::max_sum(&sys, &names).unwrap();
        let got = max_sum_rate(&sys, &names).unwrap();
        prop_assert_eq!(got.value().cloned(), want.clone());
        // the ancestor rule alone keeps the row count polynomial here
        let ancestors_only = Pruning { domination: false, ancestor_rule: true };
        let loose = fme::max_sum_rate_with(&sys, &names, ancestors_only).unwrap();
        prop_assert_eq!(loose.value().cloned(), want);
    }

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>(), extra in 1usize..=6) {
        let sys = oracle::random_bounded_system(&mut keyed_rng(seed, 1), 3, extra, 5);
        // one-variable projections: after pruning only the tightest bound on each side remains
        let a = eliminate_sequence(&sys, &["x0", "x1"], Pruning::default()).unwrap().system;
        let b = eliminate_sequence(&sys, &["x1", "x0"], Pruning::default()).unwrap().system;
        prop_assert_eq!(a.canonical_rows(), b.canonical_rows());

        let sys = oracle::random_bounded_system(&mut keyed_rng(seed, 2), 4, extra, 5);
        let a = eliminate_sequence(&sys, &["x0", "x1"], Pruning::default()).unwrap().system;
        let b = eliminate_sequence(&sys, &["x1", "x0"], Pruning::default()).unwrap().system;
        for pt in grid_points(seed, 2, 200) {
            prop_assert_eq!(a.is_satisfied_by(&pt), b.is_satisfied_by(&pt));
        }
    }

    #[test]
    fn pruning_preserves_the_projection(seed in any::<u64>(), n in 3usize..=4, extra in 1usize..=6) {
        let sys = oracle::random_bounded_system(&mut keyed_rng(seed, 3), n, extra, 5);
        let vars: Vec<&str> = sys.variables()[..n - 2].iter().map(String::as_str).collect();
        let pruned = eliminate_sequence(&sys, &vars, Pruning::default()).unwrap().system;
        let full = eliminate_sequence(&sys, &vars, Pruning::NONE).unwrap().system;
        prop_assert!(pruned.rows().len() <= full.rows().len());
        for pt in grid_points(seed, 2, 200) {
            prop_assert_eq!(pruned.is_satisfied_by(&pt), full.is_satisfied_by(&pt));
        }
    }

    #[test]
    fn projected_points_extend_to_the_full_system(seed in any::<u64>(), n in 3usize..=5, extra in 1usize..=6) {
        let sys = oracle::random_bounded_system(&mut keyed_rng(seed, 4), n, extra, 5);
        let vars: Vec<&str> = sys.variables()[..n - 2].iter().map(String::as_str).collect();
        let proj = eliminate_sequence(&sys, &vars, Pruning::default()).unwrap().system;
        let mut inside = 0;
        for pt in grid_points(seed, 2, 100) {
            let ext = extend_point(&sys, &vars, &pt).unwrap();
            prop_assert_eq!(ext.is_some(), proj.is_satisfied_by(&pt));
            if let Some(x) = ext {
                inside += 1;
                prop_assert!(sys.is_satisfied_by(&x));
                prop_assert_eq!(&x[n - 2..], &pt[..]);
            }
        }
        // the origin is always feasible, so its projection is too
        let origin = vec![BigRational::from_integer(0.into()); 2];
        prop_assert!(proj.is_satisfied_by(&origin));
        let _ = inside;
    }

    #[test]
    fn systems_survive_text_round_trip(seed in any::<u64>(), n in 1usize..=4, extra in 0usize..=6) {
        let sys = oracle::random_bounded_system(&mut keyed_rng(seed, 5), n, extra, 3);
        let text = sys.to_string();
        let back: LinearSystem = text.parse().unwrap();
        // variables appear in order of first use, which the box rows fix
        prop_assert_eq!(back.variables(), sys.variables());
        prop_assert_eq!(back.rows(), sys.rows());
    }

    #[test]
    fn mac_projection_is_min_of_candidates(seed in any::<u64>()) {
        let t = icb::verify::random_mac_tuple(&mut keyed_rng(seed, 6));
        let [a, b, c, d, e, f] = t.clone();
        let want = [&a + &b + &e, &b + &d + &e, &c + &e, &b + &f].into_iter().min().unwrap();
        let sys = fme::mac_system(t);
        let objective = ["R0", "R1", "R2"];
        prop_assert_eq!(max_sum_rate(&sys, &objective).unwrap(), SumRate::Bounded(want.clone()));

        // With R >= 0 the candidates can overshoot (a negative R0 is what
        // reaches b + f when c < b), but elimination still agrees with the oracle.
        let signed = sys.with_nonnegativity();
        let oracle_max = oracle::max_sum(&signed, &objective).unwrap().unwrap();
        prop_assert_eq!(max_sum_rate(&signed, &objective).unwrap(), SumRate::Bounded(oracle_max.clone()));
        prop_assert!(oracle_max <= want);
        // Genuine MAC bounds also dominate the single-user ones, and then the sign rows are inactive.
        if c >= a.clone().max(b.clone()) && f >= d.clone().max(e.clone()) {
            prop_assert_eq!(oracle_max, want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certificates_are_valid(p in 0.0..30.0f64, c in 0.0..0.6f64, frac in 0.0..=1.0f64, seed in any::<u64>()) {
        let ch = ChannelParams::new(p, c).unwrap();
        let alloc = PowerAllocation::symmetric(&ch, frac * p).unwrap();
        let cfg = OptimizerConfig { inner_multistarts: 6, seed, ..Default::default() };
        if let Some(cert) = inner_min_g(&ch, &alloc, &cfg) {
            prop_assert!(cert.feasible);
            prop_assert!(useful_genie_slack(&ch, &alloc, &cert.gp) >= -cfg.feasibility_tol);
            let f = genie_objective(&ch, &alloc, &cert.gp).unwrap();
            prop_assert!(rel(f, cert.value_bits) <= 1e-12);
            // any certificate bounds the inner rate from above
            prop_assert!(cert.value_bits >= lower_bound_sum_rate(&ch, alloc.common).unwrap() - 1e-9);
        } else {
            prop_assert!(c * c * alloc.private1 > 0.99);
        }
    }
}

#[test]
fn zero_common_power_is_best_near_decreasing_boundary() {
    // R is nearly flat in P0 here; a rounding-noise argmax used to appear
    let ch = ChannelParams::new(0.07278911898032422, 0.39785493521375487).unwrap();
    assert!(in_gamma_b(&ch));
    let (best, arg) = max_lower_bound(&ch, 101).unwrap();
    assert_eq!(arg, 0.0);
    assert_eq!(best, lower_bound_sum_rate(&ch, 0.0).unwrap());
}
