//! Fast invariant checks runnable from the command line.

use std::f64::consts::PI;

use crate::channel::{channel_at, leading_qubits, ChannelSnapshot, OperatorBasis};
use crate::engine::{grover_angle, Engine, EngineKind, EngineParams};
use crate::entanglement::{bipartite_concurrence, multipartite_concurrence};
use crate::error::Result;
use crate::experiment::{run, ExperimentConfig};
use crate::flow::{proposition_tolerance, trace_distance, FlowAnalyzer};
use crate::linalg::{partial_trace, C64};
use crate::state::{density_of, haar_orthogonal_qubit_pair, sample_stream, PureState};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn engine(kind: EngineKind, n: usize) -> Result<Engine> {
    Engine::new(&EngineParams::new(kind, n, 0))
}

/// Runs every check at reduced size; a few seconds in release builds.
pub fn run_all() -> Vec<Check> {
    vec![
        check("grover closed form", || {
            let mut worst = 0f64;
            for n in 2..=6 {
                let e = engine(EngineKind::Circuit, n)?;
                let grid: Vec<f64> = (0..=20).map(f64::from).collect();
                let p = e.trajectory(&grid)?.success_probabilities();
                let theta = grover_angle(n);
                for (k, pk) in p.iter().enumerate() {
                    worst = worst.max((pk - ((2 * k + 1) as f64 * theta).sin().powi(2)).abs());
                }
            }
            Ok((worst < 1e-10, format!("max error {worst:e}")))
        }),
        check("analog certainty", || {
            let e = engine(EngineKind::Analog, 6)?;
            let p = e.trajectory(&[e.run_time()])?.success_probabilities()[0];
            Ok((p >= 1.0 - 1e-9, format!("P(T) = {p}")))
        }),
        check("adiabatic final success", || {
            let e = engine(EngineKind::Adiabatic, 6)?;
            let p = e.trajectory(&[e.run_time()])?.success_probabilities()[0];
            Ok((p >= 1.0 - 0.04, format!("P(T) = {p}")))
        }),
        check("channel matches partial trace", || {
            let mut worst = 0f64;
            for kind in EngineKind::ALL {
                let e = engine(kind, 4)?;
                let t = if e.is_discrete() { 2.0 } else { 0.37 * e.run_time() };
                let snap = channel_at(&e, t, 1)?;
                let mut rng = sample_stream(7, kind as u64);
                let (a, _) = haar_orthogonal_qubit_pair(&mut rng);
                let env = crate::state::uniform_superposition(3)?;
                let global = a.tensor(&env)?;
                let evolved = e.propagate(&[global.into_amplitudes()], &[t])?;
                let out = PureState::normalized(4, evolved[0][0].clone())?;
                let direct = partial_trace(out.density().matrix(), 4, &leading_qubits(1))?;
                let via = snap.apply(&density_of(&a))?;
                worst = worst.max((via.matrix() - &direct).max_abs());
            }
            Ok((worst < 1e-10, format!("max deviation {worst:e}")))
        }),
        check("contractivity", || {
            let e = engine(EngineKind::Analog, 4)?;
            let snap = channel_at(&e, 0.5 * e.run_time(), 1)?;
            let mut rng = sample_stream(11, 0);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..200 {
                let (a, b) = haar_orthogonal_qubit_pair(&mut rng);
                let d = trace_distance(&snap.apply(&density_of(&a))?, &snap.apply(&density_of(&b))?)?;
                worst = worst.max(d - 1.0);
            }
            Ok((worst <= 1e-9, format!("max excess {worst:e}")))
        }),
        check("basis independence", || {
            let e = engine(EngineKind::Circuit, 4)?;
            let pauli = crate::channel::channels_at(&e, &[3.0], &[0, 1], OperatorBasis::Pauli)?;
            let gm = crate::channel::channels_at(&e, &[3.0], &[0, 1], OperatorBasis::GellMann)?;
            let rho = PureState::basis(2, 1)?.density();
            let diff = (pauli[0].apply(&rho)?.matrix() - gm[0].apply(&rho)?.matrix()).max_abs();
            Ok((diff < 1e-10, format!("deviation {diff:e}")))
        }),
        check("proposition identity", || {
            let e = engine(EngineKind::Analog, 4)?;
            let analyzer = FlowAnalyzer::new(&e, 1, 200, 3)?;
            let grid = crate::engine::linspace(0.0, e.run_time(), 5);
            let mut ok = true;
            let mut worst = 0f64;
            for r in analyzer.records(&grid)? {
                let res = analyzer.proposition_residual(&r)?;
                ok &= res < proposition_tolerance(r.sigma);
                worst = worst.max(res);
            }
            Ok((ok, format!("max residual {worst:e}")))
        }),
        check("concurrence values", || {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let z = C64::new(0.0, 0.0);
            let bell = PureState::new(2, vec![h, z, z, h])?;
            let mut ghz = vec![z; 256];
            ghz[0] = h;
            ghz[255] = h;
            let ghz = PureState::new(8, ghz)?;
            let b = bipartite_concurrence(&bell)?;
            let g = multipartite_concurrence(&ghz)?;
            let ok = (b - 1.0).abs() < 1e-10 && (g - 127f64.sqrt() / 8.0).abs() < 1e-9;
            Ok((ok, format!("bell {b}, ghz8 {g}")))
        }),
        check("deterministic output", || {
            let mut c = ExperimentConfig::new(EngineKind::Analog, 4);
            c.samples = 100;
            c.grid_points = 8;
            let a = run(&c)?.to_csv()?;
            let b = run(&c)?.to_csv()?;
            Ok((a == b, format!("{} bytes", a.len())))
        }),
        check("identity at t = 0", || {
            let e = engine(EngineKind::Circuit, 3)?;
            let snap = channel_at(&e, 0.0, 2)?;
            let id = ChannelSnapshot::identity(2, OperatorBasis::Pauli);
            let diff = snap
                .images()
                .iter()
                .zip(id.images())
                .map(|(a, b)| (a - b).max_abs())
                .fold(0.0, f64::max);
            Ok((diff < 1e-12, format!("deviation {diff:e}")))
        }),
        check("runtime constants", || {
            let t = crate::engine::AdiabaticSearch::new(&EngineParams::new(EngineKind::Adiabatic, 4, 0))?;
            let asymptotic = 4.0 * PI / 0.4;
            Ok((
                (t.asymptotic_run_time() - asymptotic).abs() < 1e-12,
                format!("T = {}", t.run_time()),
            ))
        }),
    ]
}
