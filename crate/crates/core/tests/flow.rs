use regpoly::{
    generate, regular_quotient, run_flow, similarity_distance, verify_theorem, Exec, Family,
    FlowConfig, FlowOutcome, Kind,
};

#[test]
fn recorded_quotient_never_increases_and_stays_above_the_bound() {
    for n in [4usize, 5, 7] {
        for seed in 0..20 {
            let start = generate(&Kind::RandomConvex { n, seed }).unwrap();
            let res = run_flow(&start, &FlowConfig::default()).unwrap();
            let qs: Vec<f64> = res.trace.iterates.iter().map(|r| r.q).collect();
            assert!(qs.windows(2).all(|w| w[1] <= w[0]), "n={n} seed={seed}");
            assert!(res.q_final >= regular_quotient(n) - 1e-9);
            assert!(res.q_final <= start.quotient());
        }
    }
}

#[test]
fn flow_is_deterministic() {
    let start = generate(&Kind::RandomStar { n: 6, seed: 8 }).unwrap();
    let cfg = FlowConfig::default();
    let (a, b) = (
        run_flow(&start, &cfg).unwrap(),
        run_flow(&start, &cfg).unwrap(),
    );
    assert_eq!(a.polygon, b.polygon);
    assert_eq!(a.trace, b.trace);
}

#[test]
fn regular_start_takes_no_steps() {
    let p = generate(&Kind::Regular { n: 5, radius: 3.0 }).unwrap();
    let res = run_flow(&p, &FlowConfig::default()).unwrap();
    assert_eq!(res.trace.steps, 0);
    assert!(res.trace.outcome.is_converged());
}

#[test]
fn rectangle_flows_to_square() {
    let p = generate(&Kind::Rectangle { a: 1.0, b: 3.0 }).unwrap();
    let res = run_flow(&p, &FlowConfig::default()).unwrap();
    assert!((res.polygon.quotient() - 4.0).abs() < 1e-8);
    let square = generate(&Kind::Regular { n: 4, radius: 1.0 }).unwrap();
    assert!(similarity_distance(&res.polygon, &square).unwrap() < 1e-6);
}

#[test]
fn triangles_converge_under_tilts_alone() {
    let cfg = FlowConfig::with_families(&[Family::Tilt]);
    let s = verify_theorem(3, 100, &cfg, Exec::default()).unwrap();
    assert_eq!(s.converged, 100);
    assert!(s.counterexamples.is_empty());
    assert!(s.max_similarity_distance < 1e-5);
}

#[test]
fn quadrilaterals_have_no_counterexamples() {
    let s = verify_theorem(4, 100, &FlowConfig::default(), Exec::default()).unwrap();
    assert!(s.counterexamples.is_empty());
    assert!(s.convergence_fraction >= 0.95);
    assert!(s.runs.iter().all(|r| r.monotone));
}

#[test]
fn larger_polygons_converge_to_regular() {
    for n in 5..=8 {
        let s = verify_theorem(n, 50, &FlowConfig::default(), Exec::default()).unwrap();
        assert!(s.counterexamples.is_empty(), "n={n}");
        assert!(
            s.convergence_fraction >= 0.95,
            "n={n}: {}",
            s.convergence_fraction
        );
        assert!((s.q_regular - regular_quotient(n)).abs() < 1e-12);
    }
}

#[test]
fn sequential_and_parallel_batches_agree() {
    let cfg = FlowConfig::default();
    let a = verify_theorem(5, 16, &cfg, Exec::Sequential).unwrap();
    let b = verify_theorem(5, 16, &cfg, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn max_iters_is_reported() {
    let start = generate(&Kind::RandomConvex { n: 6, seed: 2 }).unwrap();
    let cfg = FlowConfig {
        max_iters: 3,
        ..FlowConfig::default()
    };
    let res = run_flow(&start, &cfg).unwrap();
    assert_eq!(res.trace.outcome, FlowOutcome::MaxIters);
    assert_eq!(res.trace.steps, 3);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(verify_theorem(2, 10, &FlowConfig::default(), Exec::Sequential).is_err());
    let cfg = FlowConfig::with_families(&[]);
    assert!(verify_theorem(4, 10, &cfg, Exec::Sequential).is_err());
}
