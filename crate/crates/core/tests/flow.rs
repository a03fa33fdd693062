use infoflux::engine::{Engine, EngineKind, EngineParams};
use infoflux::flow::{
    information_flow, interval_grid, leakage, proposition_check, proposition_tolerance, FlowAnalyzer,
};
use infoflux::Error;

fn engine(kind: EngineKind, n: usize) -> Engine {
    Engine::new(&EngineParams::new(kind, n, 0)).unwrap()
}

#[test]
fn orthogonal_inputs_are_perfectly_distinguishable_at_start() {
    for kind in EngineKind::ALL {
        let e = engine(kind, 5);
        let r = information_flow(&e, 1, 0.0, 50, 7).unwrap();
        assert!((r.p_guess_star - 1.0).abs() < 1e-12, "{kind}");
        assert_eq!(r.sample_count, 50);
    }
}

#[test]
fn empty_interval_leaks_nothing() {
    for kind in EngineKind::ALL {
        let e = engine(kind, 5);
        let t = if e.is_discrete() { 3.0 } else { 0.5 * e.run_time() };
        let series = leakage(&e, 1, t, t, 10, 100, 1).unwrap();
        assert_eq!(series.records.len(), 1);
        assert_eq!(series.total, 0.0);
    }
}

#[test]
fn malformed_requests_fail() {
    let e = engine(EngineKind::Analog, 4);
    assert!(interval_grid(&e, 0.0, 1.0, 0).is_err());
    assert!(interval_grid(&e, 2.0, 1.0, 10).is_err());
    assert!(matches!(
        FlowAnalyzer::new(&e, 1, 0, 0),
        Err(Error::Config { field, .. }) if field == "samples"
    ));
    assert!(FlowAnalyzer::new(&e, 4, 10, 0).is_err());
    let analyzer = FlowAnalyzer::new(&e, 1, 10, 0).unwrap();
    assert!(analyzer.records(&[]).is_err());
    assert!(analyzer.records(&[1.0, 0.5]).is_err());
    assert!(analyzer.records(&[e.run_time() * 1.5]).is_err());
    let c = engine(EngineKind::Circuit, 4);
    assert!(FlowAnalyzer::new(&c, 1, 10, 0).unwrap().records(&[0.5]).is_err());
}

#[test]
fn adding_samples_never_lowers_the_flow() {
    let e = engine(EngineKind::Analog, 6);
    let grid = interval_grid(&e, 0.0, e.run_time(), 12).unwrap();
    let small = FlowAnalyzer::new(&e, 1, 200, 9).unwrap().records(&grid).unwrap();
    let large = FlowAnalyzer::new(&e, 1, 400, 9).unwrap().records(&grid).unwrap();
    for (s, l) in small.iter().zip(&large) {
        assert!(l.sigma >= s.sigma);
    }
}

#[test]
fn flow_at_a_time_does_not_depend_on_the_grid() {
    let e = engine(EngineKind::Adiabatic, 5);
    let analyzer = FlowAnalyzer::new(&e, 1, 100, 4).unwrap();
    let t = e.run_time();
    let coarse = analyzer.records(&[0.0, 0.5 * t, t]).unwrap();
    let fine = analyzer.records(&[0.0, 0.25 * t, 0.5 * t, 0.75 * t, t]).unwrap();
    for (c, f) in coarse.iter().zip(fine.iter().step_by(2)) {
        // Integrator steps land on the requested times, so only rounding differs.
        assert!((c.sigma - f.sigma).abs() < 1e-12);
        assert!((c.p_guess_star - f.p_guess_star).abs() < 1e-12);
        assert_eq!(c.argmax_sample, f.argmax_sample);
    }
}

#[test]
fn flow_matches_min_entropy_derivative() {
    for kind in EngineKind::ALL {
        let e = engine(kind, 6);
        let analyzer = FlowAnalyzer::new(&e, 1, 300, 21).unwrap();
        let grid = e.default_grid(9);
        for r in analyzer.records(&grid).unwrap() {
            let residual = proposition_check(&r, &e).unwrap();
            assert!(
                residual <= proposition_tolerance(r.sigma),
                "{kind} t={} residual={residual}",
                r.t
            );
        }
    }
}

#[test]
fn leakage_is_negative_where_flow_is_positive() {
    let e = engine(EngineKind::Analog, 6);
    let t = e.run_time();
    let series = leakage(&e, 1, 0.2 * t, 0.8 * t, 20, 500, 3).unwrap();
    assert!(series.records.iter().all(|r| r.sigma > 0.0));
    for w in series.records.windows(2) {
        assert!(w[1].leakage < w[0].leakage);
        assert!(w[1].sigma_tilde > w[0].sigma_tilde);
    }
    assert!(series.total < 0.0);
}

#[test]
fn larger_subsystems_are_supported() {
    let e = engine(EngineKind::Analog, 5);
    for n_s in 2..=4 {
        let r = information_flow(&e, n_s, 0.5 * e.run_time(), 50, 1).unwrap();
        assert!(r.sigma.is_finite());
        assert!((0.5..=1.0).contains(&r.p_guess_star));
        assert_eq!(r.argmax_pair.0.qubit_count(), n_s);
    }
}

#[test]
fn frozen_pair_only_changes_the_guessing_probability() {
    let e = engine(EngineKind::Analog, 5);
    let grid = interval_grid(&e, 0.0, e.run_time(), 10).unwrap();
    let live = FlowAnalyzer::new(&e, 1, 200, 2).unwrap().records(&grid).unwrap();
    let frozen = FlowAnalyzer::new(&e, 1, 200, 2)
        .unwrap()
        .with_frozen_pair(true)
        .records(&grid)
        .unwrap();
    assert_eq!(live[0].p_guess_star, frozen[0].p_guess_star);
    let first = frozen[0].argmax_sample;
    for (l, f) in live.iter().zip(&frozen) {
        assert_eq!(l.sigma, f.sigma);
        if l.argmax_sample == first {
            assert_eq!(l.p_guess_star, f.p_guess_star);
        }
    }
}
