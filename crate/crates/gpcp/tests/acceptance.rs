//! End-to-end acceptance suite: every check prints one pass line on success
//! and carries its tolerance inline.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use gpcp::classify::{self, er_merit, SearchBudget, VerdictOutcome, Witness};
use gpcp::cone::Cone;
use gpcp::errorbound::{
    self, GrowthVariant, ProbeOutcome, RayStatus,
};
use gpcp::fixtures;
use gpcp::polymap::PolyMap;
use gpcp::problem::GpcpProblem;
use gpcp::solver::{
    homotopy_solve, multistart_solve, newton_minmap, NewtonOutcome, SampleBox, SolveConfig,
};
use gpcp::tensor::DenseTensor;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(name: &str, started: Instant) {
    println!("acceptance: {name} ... PASS ({:.2?})", started.elapsed());
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// The fixture pair stays exceptionally regular: the search with 10^4 starts
/// finds no counterexample, a dense angular grid keeps the merit bounded
/// away from zero, and the componentwise reduction identities hold on the
/// grid. Budget: under 60 seconds.
#[test]
fn er_pair_search_and_grid_agree() {
    let started = Instant::now();
    let (a, b) = fixtures::example_2_1_pair();
    let orthant = Cone::orthant(2);

    let verdict = classify::find_er_counterexample(
        &a,
        &b,
        &orthant,
        SearchBudget { starts: 10_000, iters_per_start: 500 },
        42,
    )
    .unwrap();
    match &verdict.outcome {
        VerdictOutcome::NoCounterexampleFound { starts, best_value, .. } => {
            assert_eq!(*starts, 10_000);
            assert!(*best_value > 1e-6, "search best merit {best_value}");
        }
        VerdictOutcome::CounterexampleFound(w) => panic!("spurious witness {w:?}"),
    }

    // dense cross-check: 3600 angles x 11x11 slack grid over [0, 10]^2
    let mut grid_min = f64::INFINITY;
    for i in 0..3600 {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / 3600.0;
        let x = [theta.cos(), theta.sin()];
        for vi in 0..=10 {
            for ti in 0..=10 {
                let m = er_merit(&a, &b, &orthant, &x, vi as f64, ti as f64).unwrap();
                grid_min = grid_min.min(m);
            }
        }
    }
    assert!(grid_min >= 1e-6, "grid minimum merit {grid_min}");

    // componentwise reduction identities behind the emptiness argument:
    // u1 w1 = x1^2 (x1^2 + v)(x1^2 + t), so feasibility with orthogonality
    // forces x1 = 0; then u2 w2 = x2^2 (x2^2 + v)(x2^2 + t) forces x2 = 0.
    for i in 0..360 {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / 360.0;
        let x = [theta.cos(), theta.sin()];
        for (v, t) in [(0.0, 0.0), (0.5, 2.0), (10.0, 3.5)] {
            let au = a.contract_to_vector(&x).unwrap();
            let bw = b.contract_to_vector(&x).unwrap();
            let u = [au[0] + v * x[0], au[1] + v * x[1]];
            let w = [bw[0] + t * x[0], bw[1] + t * x[1]];
            let want_1 = x[0].powi(2) * (x[0].powi(2) + v) * (x[0].powi(2) + t);
            assert!((u[0] * w[0] - want_1).abs() <= 1e-12, "first-component identity");
            if x[0] == 0.0 {
                let want_2 = x[1].powi(2) * (x[1].powi(2) + v) * (x[1].powi(2) + t);
                assert!((u[1] * w[1] - want_2).abs() <= 1e-12, "second-component identity");
            }
        }
    }

    assert!(started.elapsed().as_secs() < 60, "runtime budget exceeded");
    pass("er-pair search, grid cross-check, reduction identities", started);
}

/// Multistart over [0,3]^2 with 64 starts and seed 42 finds exactly the one
/// solution (1,1) to 1e-8, and the residual there is exactly zero in f64.
/// Budget: under 5 seconds.
#[test]
fn multistart_finds_the_unique_solution() {
    let started = Instant::now();
    let p = fixtures::example_5_1();
    let cfg = SolveConfig { seed: 42, starts: 64, ..SolveConfig::default() };
    let est = multistart_solve(&p, &cfg, &SampleBox::cube(2, 0.0, 3.0).unwrap()).unwrap();
    assert_eq!(est.len(), 1, "expected exactly one solution, got {}", est.len());
    assert!(dist(&est.points()[0], &[1.0, 1.0]) <= 1e-8);
    assert_eq!(p.natural_residual(&[1.0, 1.0]).unwrap(), 0.0);
    assert!(started.elapsed().as_secs() < 5, "runtime budget exceeded");
    pass("multistart finds the unique solution exactly", started);
}

/// At rho = 0.01 the structured pair x = (0.1, 0.05), y = (0.1, 0.1) breaks
/// the componentwise growth condition with max product 7 (0.1)^6 / 64,
/// reproduced to 1e-12.
#[test]
fn growth_condition_is_falsified_on_the_structured_pair() {
    let started = Instant::now();
    let p = fixtures::example_5_1();
    let res = errorbound::falsify_pairwise_growth(&p, GrowthVariant::MaxProduct, &[0.01], 0, 42)
        .unwrap();
    let w = res.outcome.violation().expect("violation must be found");
    assert_eq!(w.rho, 0.01);
    assert_eq!(w.x, vec![0.1, 0.05]);
    assert_eq!(w.y, vec![0.1, 0.1]);
    let expected = 7.0 * 0.1f64.powi(6) / 64.0;
    assert!((expected - 1.09375e-7).abs() < 1e-20);
    assert!((w.value - expected).abs() <= 1e-12, "{} vs {expected}", w.value);
    assert!(w.value <= w.bound);
    pass("pairwise growth condition falsified at the pinned pair", started);
}

/// Componentwise residual rates at the solution: direction (0,1) stabilizes
/// the second component at 1 (±0.05), direction (0,-1) at -3 (±0.1), with
/// radii down to 2^-30.
#[test]
fn solution_rate_limits_match() {
    let started = Instant::now();
    let p = fixtures::example_5_1();
    let radii = errorbound::default_radii();
    assert_eq!(radii.len(), 30);
    assert_eq!(*radii.last().unwrap(), 2f64.powi(-30));
    let dirs = vec![vec![0.0, 1.0], vec![0.0, -1.0]];
    let res = errorbound::probe_solution_rate(&p, &[1.0, 1.0], &dirs, &radii).unwrap();
    let findings = match &res.outcome {
        ProbeOutcome::ConsistentWithinBudget(f) => f,
        ProbeOutcome::ViolationFound(f) => panic!("unexpected violation {f:?}"),
    };
    assert_eq!(findings[0].component, 1);
    assert!(
        (findings[0].limit_estimate - 1.0).abs() <= 0.05,
        "up-direction limit {}",
        findings[0].limit_estimate
    );
    assert_eq!(findings[1].component, 1);
    assert!(
        (findings[1].limit_estimate + 3.0).abs() <= 0.1,
        "down-direction limit {}",
        findings[1].limit_estimate
    );
    pass("solution-rate limits stabilize at 1 and -3", started);
}

/// The scan over [0,2]^2 with 10^4 samples yields a finite constant that
/// moves by less than 20% when the sample count doubles, and the exponent
/// fit stays in [0.8, 1.2]. Budget: under 30 seconds.
#[test]
fn error_bound_scan_is_stable() {
    let started = Instant::now();
    let p = fixtures::example_5_1();
    let cfg = SolveConfig { seed: 42, ..SolveConfig::default() };
    let omega = multistart_solve(&p, &cfg, &SampleBox::cube(2, 0.0, 3.0).unwrap()).unwrap();
    let sample_box = SampleBox::cube(2, 0.0, 2.0).unwrap();

    let base = errorbound::error_bound_scan(&p, &omega, &sample_box, 10_000, 42).unwrap();
    assert!(base.c_estimate.is_finite() && base.c_estimate > 0.0);
    let doubled = errorbound::error_bound_scan(&p, &omega, &sample_box, 20_000, 42).unwrap();
    let rel_change = (doubled.c_estimate - base.c_estimate).abs() / base.c_estimate;
    assert!(rel_change < 0.20, "constant moved {rel_change} on doubling");

    let tau = base.tau_fit.expect("fit window populated");
    assert!((0.8..=1.2).contains(&tau), "exponent fit {tau}");
    assert!(started.elapsed().as_secs() < 30, "runtime budget exceeded");
    pass("error-bound constant stable, exponent fit near 1", started);
}

/// On 50 seeded positive definite symmetric linear instances (n <= 5) the
/// Newton and homotopy solvers agree to 1e-6; the bundled linear demo is
/// solved exactly to 1e-10.
#[test]
fn newton_and_homotopy_cross_validate() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SolveConfig::default();

    for case in 0..50 {
        let n = 1 + case % 5;
        // M = B B^T + I is symmetric positive definite
        let mut m = vec![0.0; n * n];
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for i in 0..n {
            for j in 0..n {
                let mut acc = if i == j { 1.0 } else { 0.0 };
                for k in 0..n {
                    acc += b[i * n + k] * b[j * n + k];
                }
                m[i * n + j] = acc;
            }
        }
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = PolyMap::from_leading(DenseTensor::new(2, n, m).unwrap(), q).unwrap();
        let p = GpcpProblem::new(f, PolyMap::identity(n), Cone::orthant(n), None).unwrap();

        let est = multistart_solve(
            &p,
            &SolveConfig { starts: 16, seed: 7, ..cfg },
            &SampleBox::cube(n, 0.0, 4.0).unwrap(),
        )
        .unwrap();
        assert_eq!(est.len(), 1, "case {case}: PD instances have one solution");
        let newton_x = &est.points()[0];

        let trace = homotopy_solve(&p, &cfg).unwrap();
        let homotopy_x = trace.converged_point().unwrap_or_else(|| {
            panic!("case {case}: homotopy failed with {:?}", trace.outcome)
        });
        assert!(
            dist(newton_x, homotopy_x) <= 1e-6,
            "case {case}: {newton_x:?} vs {homotopy_x:?}"
        );
    }

    let lcp = fixtures::lcp_demo();
    match newton_minmap(&lcp, &[0.5, 0.5], &cfg).unwrap() {
        NewtonOutcome::Solved { x, .. } => {
            assert!(dist(&x, &[1.0, 2.0]) <= 1e-10, "{x:?}");
        }
        NewtonOutcome::Failed(r) => panic!("linear demo failed: {r}"),
    }
    pass("solvers agree on 50 seeded PD instances and the linear demo", started);
}

/// Independent oracles: naive contraction loops (1e-13, 1000 cases), central
/// finite differences against analytic Jacobians (1e-5, 100 cases),
/// projection laws, witness transfer from the slack-free to the augmented
/// search, and bitwise-identical reports under a fixed seed.
#[test]
fn oracle_and_property_suite() {
    let started = Instant::now();

    // -- contraction against an explicit odometer loop
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let order: usize = rng.gen_range(1..=4);
        let dim: usize = rng.gen_range(1..=3);
        let entries: Vec<f64> =
            (0..dim.pow(order as u32)).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = DenseTensor::new(order, dim, entries).unwrap();
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let got = t.contract_to_vector(&x).unwrap();
        let want = naive_contract(&t, &x);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-13 * w.abs().max(1.0));
        }
    }

    // -- analytic Jacobian against central differences
    for _ in 0..100 {
        let n: usize = rng.gen_range(1..=4);
        let m: usize = rng.gen_range(2..=4);
        let mut tensors = Vec::new();
        for order in (2..=m).rev() {
            let entries: Vec<f64> =
                (0..n.pow(order as u32)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            tensors.push(DenseTensor::new(order, n, entries).unwrap());
        }
        let constant: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = PolyMap::new(gpcp::TensorTuple::new(tensors).unwrap(), constant).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let jac = p.jacobian(&x).unwrap();
        let h = 1e-6;
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fp = p.evaluate(&xp).unwrap();
            let fm = p.evaluate(&xm).unwrap();
            for j in 0..n {
                let fd = (fp[j] - fm[j]) / (2.0 * h);
                assert!((jac.get(j, i) - fd).abs() <= 1e-5, "({j},{i})");
            }
        }
    }

    // -- projection laws on the orthant and a generated cone
    let cones = [
        Cone::orthant(3),
        Cone::generated(vec![vec![1.0, 0.4, 0.0], vec![0.0, 1.0, 0.7], vec![0.2, 0.0, 1.0]])
            .unwrap(),
    ];
    for cone in &cones {
        let exact = matches!(cone, Cone::NonnegativeOrthant { .. });
        let tol = if exact { 1e-12 } else { 1e-6 };
        for _ in 0..300 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let px = cone.project(&x).unwrap();
            let py = cone.project(&y).unwrap();
            // orthogonality characterization
            let resid: Vec<f64> = px.iter().zip(&x).map(|(p, xi)| p - xi).collect();
            let ip: f64 = resid.iter().zip(&px).map(|(r, p)| r * p).sum();
            assert!(ip.abs() <= tol, "orthogonality on {cone:?}");
            // idempotence
            assert!(dist(&cone.project(&px).unwrap(), &px) <= 1e-9);
            // nonexpansiveness
            assert!(dist(&px, &py) <= dist(&x, &y) + 1e-9);
        }
    }

    // -- a slack-free witness is an augmented witness with zero slacks
    let zero = DenseTensor::zeros(4, 2);
    let unit = DenseTensor::unit(4, 2);
    let orthant = Cone::orthant(2);
    let v = classify::find_r0_counterexample(
        &zero,
        &unit,
        &orthant,
        SearchBudget::with_starts(100),
        42,
    )
    .unwrap();
    let x0 = match v.counterexample() {
        Some(Witness::R0Direction { x, .. }) => x.clone(),
        other => panic!("expected a direction witness, got {other:?}"),
    };
    let transferred = er_merit(&zero, &unit, &orthant, &x0, 0.0, 0.0).unwrap();
    assert!(transferred <= 1e-12, "witness transfer merit {transferred}");

    // -- determinism: byte-identical reports and bitwise-identical estimates
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example_5_1.json");
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let code = gpcp::cli::run_cli([
            "gpcp",
            "errorbound",
            "--file",
            fixture,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "9",
            "--samples",
            "2000",
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap(),
        "reports must be byte-identical under a fixed seed"
    );

    let p = fixtures::example_5_1();
    let cfg = SolveConfig::default();
    let sb = SampleBox::cube(2, 0.0, 3.0).unwrap();
    let e1 = multistart_solve(&p, &cfg, &sb).unwrap();
    let e2 = multistart_solve(&p, &cfg, &sb).unwrap();
    for (a, b) in e1.points().iter().zip(e2.points()) {
        for (va, vb) in a.iter().zip(b) {
            assert_eq!(va.to_bits(), vb.to_bits());
        }
    }

    pass("oracle and property suite", started);
}

/// Slack-free verdicts and ray probes tell one story on the bundled corpus:
/// the regular pairs admit no vanishing ray, while the degenerate zero/unit
/// pair shows both the slack-free counterexample and a vanishing ray.
#[test]
fn r0_verdicts_agree_with_ray_probes() {
    let started = Instant::now();
    let orthant = Cone::orthant(2);
    let budget = SearchBudget::with_starts(300);
    let dirs = errorbound::random_unit_directions(2, 64, 11);
    let scales = errorbound::default_scales();

    // corpus entry 1: the bundled cubic pair inside its demo instance
    let (a, b) = fixtures::example_2_1_pair();
    let p = fixtures::example_5_1();
    let v = classify::find_r0_counterexample(&a, &b, &orthant, budget, 42).unwrap();
    assert!(v.counterexample().is_none());
    let rays = errorbound::probe_ray_growth(&p, &dirs, &scales).unwrap();
    assert!(rays.outcome.violation().is_none(), "regular pair must not violate");

    // corpus entry 2: unit tensor against itself
    let unit = DenseTensor::unit(4, 2);
    let v = classify::find_r0_counterexample(&unit, &unit, &orthant, budget, 42).unwrap();
    assert!(v.counterexample().is_none());
    let f = PolyMap::from_leading(unit.clone(), vec![0.0, 0.0]).unwrap();
    let p = GpcpProblem::new(f.clone(), f, orthant.clone(), None).unwrap();
    let rays = errorbound::probe_ray_growth(&p, &dirs, &scales).unwrap();
    assert!(rays.outcome.violation().is_none(), "unit/unit pair must not violate");

    // corpus entry 3: zero against unit shows both sides of the implication
    let zero = DenseTensor::zeros(4, 2);
    let v = classify::find_r0_counterexample(&zero, &unit, &orthant, budget, 42).unwrap();
    assert!(v.counterexample().is_some(), "degenerate pair has a counterexample");
    let f = PolyMap::from_leading(zero, vec![0.0, 0.0]).unwrap();
    let g = PolyMap::from_leading(unit, vec![0.0, 0.0]).unwrap();
    let p = GpcpProblem::new(f, g, orthant, None).unwrap();
    let rays = errorbound::probe_ray_growth(&p, &dirs, &scales).unwrap();
    let f = rays.outcome.violation().expect("degenerate pair must violate along some ray");
    assert!(matches!(f.status, RayStatus::AllComponentsVanish { .. }));

    pass("slack-free verdicts consistent with ray probes on the corpus", started);
}

/// Odometer-loop contraction oracle, independent of the library path.
fn naive_contract(t: &DenseTensor, x: &[f64]) -> Vec<f64> {
    let n = t.dim();
    let m = t.order();
    let mut out = vec![0.0; n];
    for (j, out_j) in out.iter_mut().enumerate() {
        if m == 1 {
            *out_j = t.entries()[j];
            continue;
        }
        let mut idx = vec![0usize; m - 1];
        loop {
            let mut full = Vec::with_capacity(m);
            full.push(j);
            full.extend_from_slice(&idx);
            let mut prod = t.get(&full).unwrap();
            for &i in &idx {
                prod *= x[i];
            }
            *out_j += prod;
            let mut k = m - 1;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out
}
