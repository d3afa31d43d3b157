//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinpair::catalog::{self, locc_product_elements};
use spinpair::info::reduced_conditional_probability;
use spinpair::povm::validate_completeness;
use spinpair::*;
use spinpair_cli::commands::{self, DEFAULT_GRID};
use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::time::{Duration, Instant};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(elapsed: Duration, limit_s: f64) -> std::result::Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
    }
}

fn grid() -> SphereGridF64 {
    build_grid(DEFAULT_GRID.0, DEFAULT_GRID.1).unwrap()
}

fn eval_bits(name: &str, kind: EnsembleKind) -> std::result::Result<(f64, f64), String> {
    let r = commands::eval(name, Some(kind), DEFAULT_GRID, None).map_err(|e| e.to_string())?;
    Ok((r.info.mutual_information_bits, r.info.error_estimate))
}

fn eval_criterion(name: &str, kind: EnsembleKind, target: f64, tol: f64, limit_s: f64) -> Outcome {
    let t = Instant::now();
    let (bits, err) = eval_bits(name, kind)?;
    within_time(t.elapsed(), limit_s)?;
    check(
        (bits - target).abs() <= tol,
        format!("{bits:.6} bits (target {target} +/- {tol}, quadrature error {err:.1e})"),
    )
}

fn c1_unentangled() -> Outcome {
    eval_criterion(catalog::LOCC_ORTHOGONAL, EnsembleKind::Antiparallel, 0.557, 0.002, 5.0)
}

fn c2_jensen_bound() -> Outcome {
    let t = Instant::now();
    let r = commands::optimize(Objective::Bound, 4, 0, DEFAULT_GRID).map_err(|e| e.to_string())?;
    within_time(t.elapsed(), 1.0)?;
    let exact = (26.0f64 / 15.0).log2();
    let g = build_grid::<f64>(24, 24).unwrap();
    let mean = 0.25;
    let second = g
        .integrate(|n| (reduced_conditional_probability(EnsembleKind::Antiparallel, 1.0, FRAC_PI_2, n) / mean).powi(2))
        .map_err(|e| e.to_string())?;
    let quad = 4.0 * 0.25 * second.log2();
    let bits = r.analytic.objective_bits;
    check(
        (bits - 0.7935).abs() <= 1e-3 && (bits - exact).abs() < 1e-12 && (quad - exact).abs() < 1e-8,
        format!("{bits:.8} bits; closed form {exact:.12}; quadrature {quad:.12}"),
    )
}

fn c3_entangled() -> Outcome {
    eval_criterion(
        catalog::BAGAN_ANTIPARALLEL,
        EnsembleKind::Antiparallel,
        0.8664,
        5e-4,
        10.0,
    )
}

fn c4_parallel() -> Outcome {
    eval_criterion(
        catalog::TARRACH_VIDAL_PARALLEL,
        EnsembleKind::Parallel,
        0.62317,
        5e-4,
        10.0,
    )
}

fn c5_separation() -> Outcome {
    let (entangled, _) = eval_bits(catalog::BAGAN_ANTIPARALLEL, EnsembleKind::Antiparallel)?;
    let bound = reduced_bound(
        &ReducedMeasurement::uniform(4, FRAC_PI_2).unwrap(),
        EnsembleKind::Antiparallel,
    );
    let gap = entangled - bound;
    check(gap >= 0.07, format!("{entangled:.6} - {bound:.6} = {gap:.6} bits"))
}

fn c6_hessian() -> Outcome {
    let g = grid();
    let mut worst: f64 = 0.0;
    for c in [1.0, 2.0, 0.5] {
        let m = ReducedMeasurement::new(vec![(c, FRAC_PI_2)]).unwrap();
        let h = hessian_diagonal(&m, Objective::Bound, &g).map_err(|e| e.to_string())?[0];
        worst = worst.max((h - (-56.0 * c / (1521.0 * LN_2))).abs());
    }
    check(worst < 1e-6, format!("max deviation {worst:.2e}"))
}

fn c7_derivative() -> Outcome {
    let d = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 1..=50 {
        let t = PI * k as f64 / 51.0;
        let fd =
            (h_function(t + d).map_err(|e| e.to_string())? - h_function(t - d).map_err(|e| e.to_string())?) / (2.0 * d);
        worst = worst.max((fd - h_derivative(t)).abs());
    }
    let ends = (h_derivative(0.0), h_derivative(PI));
    check(
        worst < 1e-6 && ends == (0.0, 0.0),
        format!("max deviation {worst:.2e} over 50 points; endpoints {ends:?}"),
    )
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation3F64 {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n2: f64 = q.iter().map(|v| v * v).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            return Rotation3::from_quaternion(q[0], q[1], q[2], q[3]).unwrap();
        }
    }
}

fn c8_properties() -> Outcome {
    let g = grid();
    let err = |e: Error| e.to_string();
    let mut notes = Vec::new();

    let mut worst_completeness: f64 = 0.0;
    for name in catalog::CATALOG_NAMES {
        let m = catalog::by_name::<f64>(name).unwrap().map_err(err)?;
        worst_completeness = worst_completeness.max(validate_completeness(&m.povm, 1e-10).max_entry_error);
    }
    if worst_completeness > 1e-10 {
        return Err(format!("completeness error {worst_completeness:.1e}"));
    }
    notes.push(format!("completeness {worst_completeness:.1e}"));

    let dir = std::env::temp_dir().join(format!("spinpair-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let scan =
        commands::scan("I,J".parse().unwrap(), 181, DEFAULT_GRID, &dir.join("scan.csv")).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let min_gap = scan
        .rows
        .iter()
        .map(|r| r.bound_bits.unwrap() - r.info_bits.unwrap())
        .fold(f64::INFINITY, f64::min);
    if min_gap < -1e-8 {
        return Err(format!("J - I reaches {min_gap:.2e}"));
    }
    notes.push(format!("min(J - I) {min_gap:.2e}"));

    let locc = catalog::locc_orthogonal::<f64>().map_err(err)?;
    let base = mutual_information(&locc.povm, &g, EnsembleKind::Antiparallel).map_err(err)?;
    let tol = 2.0 * base.error_estimate;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst_rot: f64 = 0.0;
    for _ in 0..20 {
        let r = random_rotation(&mut rng);
        let els = locc_product_elements::<f64>()
            .iter()
            .map(|e| apply_collective_rotation(e, &r).to_povm_element())
            .collect();
        let v = mutual_information(&Povm::new(els).map_err(err)?, &g, EnsembleKind::Antiparallel).map_err(err)?;
        worst_rot = worst_rot.max((v.mutual_information_bits - base.mutual_information_bits).abs());
    }
    if worst_rot > tol {
        return Err(format!("rotation changes I by {worst_rot:.2e} > {tol:.2e}"));
    }
    notes.push(format!("rotations {worst_rot:.1e}"));

    let par = mutual_information(&locc.povm, &g, EnsembleKind::Parallel).map_err(err)?;
    let kind_gap = (par.mutual_information_bits - base.mutual_information_bits).abs();
    if kind_gap > 2.0 * base.error_estimate.max(par.error_estimate) {
        return Err(format!("antiparallel/parallel LOCC differ by {kind_gap:.2e}"));
    }
    notes.push(format!("ensembles {kind_gap:.1e}"));

    let reduced = reduce_product_measurement(&locc_product_elements::<f64>());
    let via_reduced = reduced_info(&reduced, &g, EnsembleKind::Antiparallel).map_err(err)?;
    let red_gap = (via_reduced - base.mutual_information_bits).abs();
    if red_gap > tol {
        return Err(format!("reduced path differs by {red_gap:.2e}"));
    }
    notes.push(format!("reduction {red_gap:.1e} (tolerance {tol:.1e})"));
    Ok(notes.join("; "))
}

fn c9_optimizer() -> Outcome {
    let g = grid();
    let mut worst_bits: f64 = 0.0;
    let mut worst_theta: f64 = 0.0;
    for objective in [Objective::Bound, Objective::Info] {
        let analytic = solve_stationarity(4, objective, &g).map_err(|e| e.to_string())?;
        for seed in 0..5 {
            let r = numeric_maximize(4, objective, &g, seed).map_err(|e| e.to_string())?;
            worst_bits = worst_bits.max((r.objective_bits - analytic.objective_bits).abs());
            for t in &r.thetas {
                worst_theta = worst_theta.max((t - FRAC_PI_2).abs());
            }
        }
    }
    check(
        worst_bits < 1e-3 && worst_theta < 1e-2,
        format!("max |delta bits| {worst_bits:.2e}, max |theta - pi/2| {worst_theta:.2e}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("unentangled measurement information", c1_unentangled),
        ("Jensen upper bound", c2_jensen_bound),
        ("entangled measurement value", c3_entangled),
        ("parallel-spin optimum", c4_parallel),
        ("bound separation", c5_separation),
        ("Hessian check", c6_hessian),
        ("derivative identity", c7_derivative),
        ("property suite", c8_properties),
        ("optimizer cross-check", c9_optimizer),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  [{}] {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  [{}] {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
