//! Information flow, guessing probability, conditional min-entropy and
//! single-shot information leakage.
//!
//! For equiprobable binary ensembles:
//!
//! ```text
//! D(ρ₀, ρ₁)   = ‖ρ₀ − ρ₁‖₁ / 2
//! p_guess     = (1 + D) / 2
//! H_min(A|B)  = −log₂ p_guess
//! σ_t         = max_{ρ₀,ρ₁} d/dt D(Λ_t ρ₀, Λ_t ρ₁) = −c p*_guess max d/dt H_min,  c = 2 ln 2
//! L(t₁, t₂)   = −∫ σ_t / (c p*_guess) dt
//! ```
//!
//! The maximization samples Haar-random orthogonal pure pairs. Each pair
//! comes from its own seeded stream, so the same pairs are used at every
//! time point and a larger sample set only appends new pairs.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{channels_at, leading_qubits, ChannelSnapshot, OperatorBasis};
use crate::engine::{linspace, Engine};
use crate::error::{Error, Result};
use crate::linalg::{trace_norm_hermitian, C64};
use crate::state::{density_of, haar_orthogonal_pair, sample_stream, DensityMatrix, PureState};

/// `c = 2 (log₂ e)^{-1} = 2 ln 2`.
pub const RATE_CONSTANT: f64 = 2.0 * LN_2;

/// Default Monte Carlo pairs per time point.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Continuous engines difference over `run_time / STENCIL_DIVISIONS`.
pub const STENCIL_DIVISIONS: f64 = 2000.0;

fn same_shape(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::argument(format!(
            "states of dimension {} and {} cannot be compared",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `‖ρ₀ − ρ₁‖₁ / 2`.
pub fn trace_distance(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    same_shape(rho0, rho1)?;
    let diff = (rho0.matrix() - rho1.matrix()).hermitian_part();
    Ok((0.5 * trace_norm_hermitian(&diff)?).clamp(0.0, 1.0))
}

pub fn guessing_from_distance(distance: f64) -> f64 {
    0.5 * (1.0 + distance)
}

pub fn min_entropy_from_distance(distance: f64) -> f64 {
    -guessing_from_distance(distance).log2()
}

/// Optimal probability of telling `ρ₀` from `ρ₁` given equal priors.
pub fn guessing_probability(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    Ok(guessing_from_distance(trace_distance(rho0, rho1)?))
}

/// `H_min(A|B)` of the classical-quantum state `½|0⟩⟨0|⊗ρ₀ + ½|1⟩⟨1|⊗ρ₁`, in bits.
pub fn conditional_min_entropy(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    Ok(min_entropy_from_distance(trace_distance(rho0, rho1)?))
}

/// Flow quantities at one grid time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub t: f64,
    /// `σ_t`, maximal rate of change of the trace distance.
    pub sigma: f64,
    /// Guessing probability of the maximizing pair's outputs at `t` (of the
    /// first time's maximizer when the pair is frozen).
    pub p_guess_star: f64,
    /// `∫ σ dt` from the start of the grid.
    pub sigma_tilde: f64,
    /// Leakage in bits from the start of the grid.
    pub leakage: f64,
    pub argmax_sample: usize,
    pub argmax_pair: (PureState, PureState),
    pub sample_count: usize,
}

/// Finite-difference weights for a time derivative: `f'(t) ≈ Σ wᵢ f(tᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub nodes: Vec<(f64, f64)>,
}

impl Stencil {
    fn scaled(points: &[(f64, f64)], scale: f64) -> Self {
        Stencil {
            nodes: points.iter().map(|&(t, w)| (t, w / scale)).collect(),
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.0)
    }

    pub fn derivative(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&(t, w)| w * f(t)).sum()
    }
}

/// Monte Carlo flow evaluation for one engine and subsystem.
pub struct FlowAnalyzer<'a> {
    engine: &'a Engine,
    subsystem: Vec<usize>,
    basis: OperatorBasis,
    step: f64,
    pairs: Vec<(PureState, PureState)>,
    /// Basis coefficients of `ρ₀ − ρ₁`, one column per pair.
    coefficients: DMatrix<f64>,
    /// Nonzero `(row-major index, value)` entries of each basis element.
    basis_entries: Vec<Vec<(usize, C64)>>,
    frozen_pair: bool,
}

impl<'a> FlowAnalyzer<'a> {
    /// Samples `samples` orthogonal pairs on the first `n_s` qubits.
    pub fn new(engine: &'a Engine, n_s: usize, samples: usize, seed: u64) -> Result<Self> {
        Self::with_subsystem(engine, &leading_qubits(n_s), samples, seed)
    }

    pub fn with_subsystem(
        engine: &'a Engine,
        subsystem: &[usize],
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        crate::channel::subsystem_split(engine.qubits(), subsystem)?;
        let n_s = subsystem.len();
        let basis = OperatorBasis::Pauli;
        let reference = ChannelSnapshot::identity(n_s, basis);
        let sampled = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_stream(seed, i as u64);
                let (a, b) = haar_orthogonal_pair(n_s, &mut rng)?;
                let diff_op = density_of(&a).matrix() - density_of(&b).matrix();
                let diff = reference.coefficients(&diff_op)?;
                Ok(((a, b), diff))
            })
            .collect::<Result<Vec<_>>>()?;
        let coefficients = DMatrix::from_fn(reference.basis().len(), samples, |k, i| sampled[i].1[k].re);
        let pairs = sampled.into_iter().map(|(p, _)| p).collect();
        let basis_entries = reference
            .basis()
            .iter()
            .map(|b| {
                b.to_rows()
                    .into_iter()
                    .enumerate()
                    .filter(|(_, z)| z.norm_sqr() != 0.0)
                    .collect()
            })
            .collect();
        let step = if engine.is_discrete() {
            1.0
        } else {
            engine.run_time() / STENCIL_DIVISIONS
        };
        Ok(FlowAnalyzer {
            engine,
            subsystem: subsystem.to_vec(),
            basis,
            step,
            pairs,
            coefficients,
            basis_entries,
            frozen_pair: false,
        })
    }

    /// Overrides the continuous difference step.
    pub fn with_step(mut self, step: f64) -> Result<Self> {
        if self.engine.is_discrete() {
            return Err(Error::argument("the circuit clock is fixed to unit iterations"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::argument(format!(
                "difference step must be positive, got {step}"
            )));
        }
        self.step = step;
        Ok(self)
    }

    /// Evaluates `p*` with the pair that maximizes the flow at the first grid
    /// time, for every time, instead of each time's own maximizer.
    pub fn with_frozen_pair(mut self, frozen: bool) -> Self {
        self.frozen_pair = frozen;
        self
    }

    pub fn sample_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn pair(&self, index: usize) -> Option<&(PureState, PureState)> {
        self.pairs.get(index)
    }

    /// Central difference inside the run and second-order one-sided
    /// differences near its ends. The circuit uses the forward unit step and
    /// falls back to the backward step at the last iteration.
    pub fn stencil(&self, t: f64) -> Stencil {
        let end = self.engine.run_time();
        if self.engine.is_discrete() {
            return if t + 1.0 <= end {
                Stencil::scaled(&[(t, -1.0), (t + 1.0, 1.0)], 1.0)
            } else {
                Stencil::scaled(&[(t - 1.0, -1.0), (t, 1.0)], 1.0)
            };
        }
        let h = self.step;
        if t - h >= 0.0 && t + h <= end {
            Stencil::scaled(&[(t - h, -1.0), (t + h, 1.0)], 2.0 * h)
        } else if t - h < 0.0 {
            Stencil::scaled(&[(t, -3.0), (t + h, 4.0), (t + 2.0 * h, -1.0)], 2.0 * h)
        } else {
            Stencil::scaled(&[(t - 2.0 * h, 1.0), (t - h, -4.0), (t, 3.0)], 2.0 * h)
        }
    }

    fn check_grid(&self, grid: &[f64]) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::argument("time grid is empty"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("time grid must be strictly ascending"));
        }
        let end = self.engine.run_time();
        if grid[0] < 0.0 || grid[grid.len() - 1] > end * (1.0 + 1e-12) {
            return Err(Error::argument(format!("time grid must lie within [0, {end}]")));
        }
        if self.engine.is_discrete() && grid.iter().any(|t| t.fract() != 0.0) {
            return Err(Error::argument("circuit grid must hold whole iteration counts"));
        }
        Ok(())
    }

    fn snapshots(&self, times: &[f64]) -> Result<Vec<ChannelSnapshot>> {
        channels_at(self.engine, times, &self.subsystem, self.basis)
    }

    fn distance_of(&self, out_coeffs: &[f64], buf: &mut [C64]) -> f64 {
        buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (y, entries) in out_coeffs.iter().zip(&self.basis_entries) {
            for &(idx, b) in entries {
                buf[idx] += b * *y;
            }
        }
        0.5 * buffer_trace_norm(buf, 1 << self.subsystem.len())
    }

    /// Trace distance of every sample pair under one snapshot.
    fn distances(&self, snap: &ChannelSnapshot) -> Vec<f64> {
        let d = 1usize << self.subsystem.len();
        let outputs = snap.transfer_matrix() * &self.coefficients;
        let mut buf = vec![C64::new(0.0, 0.0); d * d];
        outputs
            .column_iter()
            .map(|col| self.distance_of(col.as_slice(), &mut buf))
            .collect()
    }

    /// Trace distance of one pair under one snapshot.
    fn distance(&self, snap: &ChannelSnapshot, sample: usize) -> f64 {
        let d = 1usize << self.subsystem.len();
        let coeffs: Vec<C64> = self
            .coefficients
            .column(sample)
            .iter()
            .map(|&c| C64::new(c, 0.0))
            .collect();
        let mut buf = vec![C64::new(0.0, 0.0); d * d];
        snap.combine_into(&coeffs, &mut buf);
        0.5 * buffer_trace_norm(&buf, d)
    }

    /// Flow records on an ascending grid, with `σ̃` and leakage accumulated
    /// from the first grid time by the trapezoid rule.
    pub fn records(&self, grid: &[f64]) -> Result<Vec<FlowRecord>> {
        self.check_grid(grid)?;
        let stencils: Vec<Stencil> = grid.iter().map(|&t| self.stencil(t)).collect();
        let mut nodes: Vec<f64> = stencils.iter().flat_map(Stencil::times).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let mut times: Vec<f64> = nodes.iter().chain(grid).copied().collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let snaps = self.snapshots(&times)?;
        let index = |t: f64| {
            times
                .binary_search_by(|x| x.total_cmp(&t))
                .expect("every needed time was evaluated")
        };
        // Every pair is needed only at stencil nodes.
        let table: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&t| self.distances(&snaps[index(t)]))
            .collect();
        let lookup = |t: f64| -> &Vec<f64> {
            let i = nodes
                .binary_search_by(|x| x.total_cmp(&t))
                .expect("stencil node evaluated");
            &table[i]
        };

        let mut records = Vec::with_capacity(grid.len());
        let mut frozen = None;
        for (&t, st) in grid.iter().zip(&stencils) {
            let columns: Vec<(&Vec<f64>, f64)> =
                st.nodes.iter().map(|&(time, w)| (lookup(time), w)).collect();
            let mut best = (f64::NEG_INFINITY, 0usize);
            for i in 0..self.pairs.len() {
                let rate: f64 = columns.iter().map(|(col, w)| w * col[i]).sum();
                if rate > best.0 {
                    best = (rate, i);
                }
            }
            let (sigma, argmax) = best;
            let guess_pair = if self.frozen_pair {
                *frozen.get_or_insert(argmax)
            } else {
                argmax
            };
            records.push(FlowRecord {
                t,
                sigma,
                p_guess_star: guessing_from_distance(self.distance(&snaps[index(t)], guess_pair)),
                sigma_tilde: 0.0,
                leakage: 0.0,
                argmax_sample: argmax,
                argmax_pair: self.pairs[argmax].clone(),
                sample_count: self.pairs.len(),
            });
        }
        accumulate(&mut records);
        Ok(records)
    }

    pub fn record_at(&self, t: f64) -> Result<FlowRecord> {
        Ok(self.records(&[t])?.pop().expect("one record"))
    }

    /// `|σ_t + c p* dH_min/dt|` for the record's maximizing pair.
    ///
    /// Continuous engines difference `H_min` on the record's stencil. The
    /// circuit flow is the slope of the linear interpolation of `D` between
    /// iterations, so `H_min` is differenced along that interpolation.
    pub fn proposition_residual(&self, record: &FlowRecord) -> Result<f64> {
        let (a, b) = &record.argmax_pair;
        let rho0 = density_of(a);
        let rho1 = density_of(b);
        let st = self.stencil(record.t);
        let mut times: Vec<f64> = st.times().chain([record.t]).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let snaps = self.snapshots(&times)?;
        let mut distance = std::collections::HashMap::new();
        for s in &snaps {
            let d = trace_distance(&s.apply(&rho0)?, &s.apply(&rho1)?)?;
            distance.insert(s.time().to_bits(), d);
        }
        let dist_at = |t: f64| distance[&t.to_bits()];
        let d_t = dist_at(record.t);
        let p_star = guessing_from_distance(d_t);
        let d_min_dt = if self.engine.is_discrete() {
            let slope = st.derivative(dist_at);
            let delta = 1e-5;
            (min_entropy_from_distance(d_t + slope * delta) - min_entropy_from_distance(d_t - slope * delta))
                / (2.0 * delta)
        } else {
            st.derivative(|t| min_entropy_from_distance(dist_at(t)))
        };
        let rhs = -RATE_CONSTANT * p_star * d_min_dt;
        Ok((record.sigma - rhs).abs())
    }
}

/// Tolerance on the proposition residual for a given flow.
pub fn proposition_tolerance(sigma: f64) -> f64 {
    (1e-3 * sigma.abs()).max(1e-6)
}

fn buffer_trace_norm(buf: &[C64], d: usize) -> f64 {
    if d == 2 {
        let (a, dd, b) = (buf[0].re, buf[3].re, 0.5 * (buf[1] + buf[2].conj()));
        let mean = 0.5 * (a + dd);
        let r = (0.25 * (a - dd) * (a - dd) + b.norm_sqr()).sqrt();
        return (mean - r).abs() + (mean + r).abs();
    }
    DMatrix::from_row_slice(d, d, buf)
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .sum()
}

/// Fills `sigma_tilde` and `leakage` with trapezoid integrals from the first record.
pub fn accumulate(records: &mut [FlowRecord]) {
    let mut tilde = 0.0;
    let mut leak = 0.0;
    for i in 0..records.len() {
        if i > 0 {
            let (p, q) = (&records[i - 1], &records[i]);
            let dt = q.t - p.t;
            tilde += 0.5 * dt * (p.sigma + q.sigma);
            leak -= 0.5
                * dt
                * (p.sigma / (RATE_CONSTANT * p.p_guess_star) + q.sigma / (RATE_CONSTANT * q.p_guess_star));
        }
        records[i].sigma_tilde = tilde;
        records[i].leakage = leak;
    }
}

/// `σ_t` at a single time.
pub fn information_flow(
    engine: &Engine,
    n_s: usize,
    t: f64,
    sample_count: usize,
    seed: u64,
) -> Result<FlowRecord> {
    FlowAnalyzer::new(engine, n_s, sample_count, seed)?.record_at(t)
}

/// Residual of the flow / min-entropy identity at the record's time.
pub fn proposition_check(record: &FlowRecord, engine: &Engine) -> Result<f64> {
    let n_s = record.argmax_pair.0.qubit_count();
    let analyzer = FlowAnalyzer::new(engine, n_s, 1, 0)?;
    analyzer.proposition_residual(record)
}

/// Leakage over `[t1, t2]` together with the per-time records.
#[derive(Clone, Debug)]
pub struct LeakageSeries {
    pub records: Vec<FlowRecord>,
    /// Leakage in bits over the whole interval.
    pub total: f64,
}

/// Grid inside `[t1, t2]`: every whole iteration for the circuit,
/// `points` evenly spaced times otherwise.
pub fn interval_grid(engine: &Engine, t1: f64, t2: f64, points: usize) -> Result<Vec<f64>> {
    if t1.is_nan() || t2.is_nan() || t1 > t2 {
        return Err(Error::argument(format!("interval start {t1} exceeds end {t2}")));
    }
    if points == 0 {
        return Err(Error::argument("time grid is empty"));
    }
    if engine.is_discrete() {
        let grid: Vec<f64> = (t1.ceil() as i64..=t2.floor() as i64).map(|k| k as f64).collect();
        if grid.is_empty() {
            return Err(Error::argument("interval contains no whole iteration"));
        }
        Ok(grid)
    } else if t1 == t2 {
        Ok(vec![t1])
    } else {
        Ok(linspace(t1, t2, points.max(2)))
    }
}

/// Single-shot information leakage over `[t1, t2]`.
pub fn leakage(
    engine: &Engine,
    n_s: usize,
    t1: f64,
    t2: f64,
    points: usize,
    sample_count: usize,
    seed: u64,
) -> Result<LeakageSeries> {
    let grid = interval_grid(engine, t1, t2, points)?;
    let records = FlowAnalyzer::new(engine, n_s, sample_count, seed)?.records(&grid)?;
    let total = records.last().map_or(0.0, |r| r.leakage);
    Ok(LeakageSeries { records, total })
}
