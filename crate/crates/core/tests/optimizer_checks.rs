use spinpair::optimizer::{check_h_monotonic, numeric_maximize_with, MaximizeOptions, MONOTONICITY_SAMPLES};
use spinpair::*;
use std::f64::consts::{FRAC_PI_2, LN_2};
use std::sync::OnceLock;

fn grid() -> &'static SphereGrid<f64> {
    static G: OnceLock<SphereGrid<f64>> = OnceLock::new();
    G.get_or_init(|| build_grid(128, 256).unwrap())
}

#[test]
fn stationary_point_of_the_bound() {
    let r = solve_stationarity(4, Objective::Bound, grid()).unwrap();
    assert_eq!(r.theta_opt, FRAC_PI_2);
    assert!((r.objective_bits - 0.7935).abs() < 1e-3);
    assert!(r.stationarity_residual < 1e-10);
    let r7 = solve_stationarity(7, Objective::Bound, grid()).unwrap();
    assert_eq!(r7.theta_opt, FRAC_PI_2);
    assert!((r7.objective_bits - r.objective_bits).abs() < 1e-12);
    assert_eq!(r7.weights.len(), 7);
}

#[test]
fn stationary_point_of_the_information() {
    let r = solve_stationarity(4, Objective::Info, grid()).unwrap();
    assert_eq!(r.theta_opt, FRAC_PI_2);
    assert!((r.objective_bits - 0.557).abs() < 2e-3);
    assert!(r.hessian_diag.iter().all(|&h| h < 0.0));
    assert!(r.stationarity_residual < 1e-10);
}

#[test]
fn h_is_monotone_for_both_objectives() {
    check_h_monotonic(Objective::Bound, grid(), MONOTONICITY_SAMPLES).unwrap();
    let g = build_grid::<f64>(64, 128).unwrap();
    check_h_monotonic(Objective::Info, &g, MONOTONICITY_SAMPLES).unwrap();
}

#[test]
fn bound_hessian_entries() {
    let unit = -56.0 / (1521.0 * LN_2);
    for c in [1.0, 2.0, 0.5] {
        let m = ReducedMeasurement::new(vec![(c, FRAC_PI_2)]).unwrap();
        let h = hessian_diagonal(&m, Objective::Bound, grid()).unwrap();
        assert!((h[0] - c * unit).abs() < 1e-6, "{} vs {}", h[0], c * unit);
    }
}

#[test]
fn info_hessian_matches_independent_second_difference() {
    let g = grid();
    let m = ReducedMeasurement::new(vec![(1.0, FRAC_PI_2)]).unwrap();
    let h = hessian_diagonal(&m, Objective::Info, g).unwrap()[0];
    // Richardson-extrapolated second difference with different steps
    let sd = |d: f64| {
        (info_theta(FRAC_PI_2 + d, g).unwrap() - 2.0 * info_theta(FRAC_PI_2, g).unwrap()
            + info_theta(FRAC_PI_2 - d, g).unwrap())
            / (d * d)
    };
    let oracle = (4.0 * sd(5e-3) - sd(1e-2)) / 3.0;
    assert!(h < 0.0);
    assert!((h - oracle).abs() < 1e-4, "{h} vs {oracle}");
}

#[test]
fn hessian_is_negative_for_positive_weights() {
    let m = ReducedMeasurement::new(vec![
        (0.1, FRAC_PI_2),
        (1.9, FRAC_PI_2),
        (0.7, FRAC_PI_2),
        (1.3, FRAC_PI_2),
    ])
    .unwrap();
    for obj in [Objective::Bound, Objective::Info] {
        assert!(hessian_diagonal(&m, obj, grid()).unwrap().iter().all(|&h| h < 0.0));
    }
}

#[test]
fn numeric_search_examples() {
    let g = grid();
    let j = numeric_maximize(4, Objective::Bound, g, 1).unwrap();
    assert!((j.objective_bits - 0.7935).abs() < 1e-3);
    let i = numeric_maximize(4, Objective::Info, g, 1).unwrap();
    assert!((i.objective_bits - 0.557).abs() < 2e-3);
    let j6 = numeric_maximize(6, Objective::Bound, g, 2).unwrap();
    assert!((j6.objective_bits - j.objective_bits).abs() < 1e-6);
    for r in [&j, &i, &j6] {
        assert!(r.thetas.iter().all(|t| (t - FRAC_PI_2).abs() < 1e-2));
        assert!(r.hessian_diag.iter().all(|&h| h < 0.0));
        let f = feasibility_check(&r.measurement());
        assert!((f.sum_c - 4.0).abs() < 1e-9 && f.sum_c_cos.abs() < 1e-9, "{f:?}");
    }
}

#[test]
fn numeric_search_never_beats_the_analytic_bound() {
    let g = grid();
    let best = solve_stationarity(4, Objective::Bound, g).unwrap().objective_bits;
    for seed in 0..8 {
        let r = numeric_maximize(4 + (seed as usize % 4), Objective::Bound, g, seed).unwrap();
        assert!(r.objective_bits <= best + 1e-6, "seed {seed}: {}", r.objective_bits);
    }
}

#[test]
fn bound_dominates_information_along_the_search_path() {
    let opts = MaximizeOptions {
        record_trace: true,
        ..MaximizeOptions::default()
    };
    let coarse = build_grid::<f64>(32, 64).unwrap();
    let r = numeric_maximize_with(5, Objective::Info, grid(), 3, &opts).unwrap();
    assert!(r.trace.len() > 10);
    for m in &r.trace {
        let i = reduced_info(m, &coarse, EnsembleKind::Antiparallel).unwrap();
        assert!(reduced_bound(m, EnsembleKind::Antiparallel) >= i);
    }
}

#[test]
fn iteration_cap_reports_best_iterate() {
    let opts = MaximizeOptions {
        max_iterations: 3,
        ..MaximizeOptions::default()
    };
    match numeric_maximize_with(4, Objective::Bound, grid(), 1, &opts) {
        Err(Error::NonConvergence {
            iterations, best_pairs, ..
        }) => {
            assert_eq!(iterations, 3);
            assert_eq!(best_pairs.len(), 4);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn search_is_deterministic_per_seed() {
    let a = numeric_maximize(5, Objective::Bound, grid(), 42).unwrap();
    let b = numeric_maximize(5, Objective::Bound, grid(), 42).unwrap();
    assert_eq!(a.thetas, b.thetas);
    assert_eq!(a.weights, b.weights);
}
