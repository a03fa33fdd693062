//! Local adiabatic search.
//!
//! `H(t) = f(t)(I − |ψ_n⟩⟨ψ_n|) + (1 − f(t))(I − |w⟩⟨w|)` with the
//! local-adiabatic interpolation
//!
//! ```text
//! s(t) = 1/2 + tan(2εt√(N−1)/N − arctan√(N−1)) / (2√(N−1)),   f = 1 − s,
//! ```
//!
//! which runs from `f(0) = 1` to `f(T) = 0` at
//! `T = N·arctan√(N−1) / (ε√(N−1))` (→ `π√N/(2ε)` for large `N`).
//!
//! `H(t)` equals the identity outside `span{|w⟩, |ψ_n⟩}`, so each midpoint
//! step `e^{−iH(t+dt/2)dt}` is a global phase on the complement times a 2×2
//! unitary on the search plane. The default [`StepMethod::SearchPlane`]
//! applies exactly that factorization to full-register kets;
//! [`StepMethod::Dense`] exponentiates the `2^n × 2^n` Hamiltonian instead.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, herm_eigenvalues, matexp_unitary, Ket, Operator, C64};
use crate::state::uniform_superposition;

use super::{add_in_search_plane, overlap_pair, search_plane_coords, EngineParams};

/// Integrated Schrödinger dynamics, or the ideal adiabatic unitary
/// `Σ_n e^{iα_n(t)} |n,t⟩⟨n,0|` for cross-checking.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdiabaticMode {
    #[default]
    Integrated,
    Ideal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StepMethod {
    #[default]
    SearchPlane,
    Dense,
}

/// Default number of integration steps over the full run.
pub const DEFAULT_STEPS: usize = 2000;

/// Largest change of the final state tolerated when halving `dt`.
pub const CONVERGENCE_TOL: f64 = 1e-6;

const MAX_HALVINGS: usize = 8;

/// Total runtime at which the schedule reaches `f = 0`.
pub fn adiabatic_runtime(qubits: usize, epsilon: f64) -> f64 {
    let n = (1usize << qubits) as f64;
    let r = (n - 1.0).sqrt();
    n * r.atan() / (epsilon * r)
}

/// The asymptotic runtime `√N π / (2ε)`.
pub fn asymptotic_runtime(qubits: usize, epsilon: f64) -> f64 {
    ((1usize << qubits) as f64).sqrt() * PI / (2.0 * epsilon)
}

/// Interpolation weight `f(t)` of the initial Hamiltonian.
pub fn adiabatic_schedule(qubits: usize, epsilon: f64, t: f64) -> Result<f64> {
    let total = adiabatic_runtime(qubits, epsilon);
    let t = clamp_time(t, total)?;
    Ok(schedule_unchecked(qubits, epsilon, t))
}

fn schedule_unchecked(qubits: usize, epsilon: f64, t: f64) -> f64 {
    let n = (1usize << qubits) as f64;
    let r = (n - 1.0).sqrt();
    let s = 0.5 + (2.0 * epsilon * t * r / n - r.atan()).tan() / (2.0 * r);
    1.0 - s
}

fn clamp_time(t: f64, total: f64) -> Result<f64> {
    let slack = 1e-9 * total.max(1.0);
    if !(t >= -slack && t <= total + slack) {
        return Err(Error::argument(format!(
            "time {t} outside the adiabatic run [0, {total}]"
        )));
    }
    Ok(t.clamp(0.0, total))
}

/// Gap `√(1 − 4f(1−f)(1 − 1/N))` between the two lowest levels.
pub fn two_level_gap(qubits: usize, f: f64) -> f64 {
    let n = (1usize << qubits) as f64;
    (1.0 - 4.0 * f * (1.0 - f) * (1.0 - 1.0 / n)).max(0.0).sqrt()
}

#[derive(Clone, Debug)]
pub struct AdiabaticSearch {
    qubits: usize,
    target: usize,
    epsilon: f64,
    mode: AdiabaticMode,
    method: StepMethod,
    dt: f64,
    a: f64,
    b: f64,
}

impl AdiabaticSearch {
    pub fn new(params: &EngineParams) -> Result<Self> {
        Self::with_step_method(params, StepMethod::SearchPlane)
    }

    /// Builds the engine and, in integrated mode, settles `dt` by halving
    /// until the final state moves by less than [`CONVERGENCE_TOL`].
    pub fn with_step_method(params: &EngineParams, method: StepMethod) -> Result<Self> {
        params.validate()?;
        let (a, b) = overlap_pair(params.qubits);
        let total = adiabatic_runtime(params.qubits, params.epsilon);
        let mut engine = AdiabaticSearch {
            qubits: params.qubits,
            target: params.target,
            epsilon: params.epsilon,
            mode: params.adiabatic_mode,
            method,
            dt: params.dt.unwrap_or(total / DEFAULT_STEPS as f64),
            a,
            b,
        };
        if engine.mode == AdiabaticMode::Integrated {
            engine.dt = engine.converged_dt(params.dt.is_none())?;
        }
        Ok(engine)
    }

    fn converged_dt(&self, may_refine: bool) -> Result<f64> {
        let total = self.run_time();
        let psi0 = uniform_superposition(self.qubits)?.into_amplitudes();
        let run = |dt: f64| -> Ket {
            let mut kets = vec![psi0.clone()];
            self.integrate(&mut kets, 0.0, total, dt);
            kets.pop().expect("one ket")
        };
        let mut dt = self.dt;
        let mut coarse = run(dt);
        let halvings = if may_refine { MAX_HALVINGS } else { 1 };
        for _ in 0..halvings {
            let fine = run(dt / 2.0);
            let change = coarse
                .iter()
                .zip(&fine)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if change < CONVERGENCE_TOL {
                return Ok(dt);
            }
            dt /= 2.0;
            coarse = fine;
        }
        Err(Error::Integration(format!(
            "halving dt to {dt:e} still changes the final state by more than {CONVERGENCE_TOL:e}; \
             use a smaller dt"
        )))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mode(&self) -> AdiabaticMode {
        self.mode
    }

    /// Integration step after the convergence check.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn run_time(&self) -> f64 {
        adiabatic_runtime(self.qubits, self.epsilon)
    }

    pub fn asymptotic_run_time(&self) -> f64 {
        asymptotic_runtime(self.qubits, self.epsilon)
    }

    pub fn schedule(&self, t: f64) -> Result<f64> {
        adiabatic_schedule(self.qubits, self.epsilon, t)
    }

    /// Dense `H(t)` on the full register.
    pub fn hamiltonian(&self, t: f64) -> Result<Operator> {
        let f = self.schedule(t)?;
        Ok(self.dense_hamiltonian(f))
    }

    fn dense_hamiltonian(&self, f: f64) -> Operator {
        let dim = 1usize << self.qubits;
        let inv = 1.0 / dim as f64;
        let w = self.target;
        Operator::from_fn(dim, |i, j| {
            let mut v = -f * inv;
            if i == j {
                v += 1.0;
                if i == w {
                    v -= 1.0 - f;
                }
            }
            C64::new(v, 0.0)
        })
    }

    /// `H(f)` restricted to the search plane, basis `{|w⟩, |r⟩}`.
    fn plane_hamiltonian(&self, f: f64) -> [[f64; 2]; 2] {
        let (a, b) = (self.a, self.b);
        [[f * b * b, -f * a * b], [-f * a * b, 1.0 - f * b * b]]
    }

    fn plane_operator(&self, f: f64) -> Operator {
        let h = self.plane_hamiltonian(f);
        Operator::from_real_rows(2, &[h[0][0], h[0][1], h[1][0], h[1][1]]).expect("2x2 entries")
    }

    fn step(&self, kets: &mut [Ket], t0: f64, t1: f64) {
        let dt = t1 - t0;
        let f = schedule_unchecked(self.qubits, self.epsilon, 0.5 * (t0 + t1));
        match self.method {
            StepMethod::SearchPlane => {
                let m =
                    matexp_unitary(&self.plane_operator(f), dt).expect("plane Hamiltonian is real symmetric");
                let phase = C64::from_polar(1.0, -dt);
                for x in kets.iter_mut() {
                    let (y0, y1) = search_plane_coords(x, self.target, self.a, self.b);
                    let z0 = m.get(0, 0) * y0 + m.get(0, 1) * y1;
                    let z1 = m.get(1, 0) * y0 + m.get(1, 1) * y1;
                    x.iter_mut().for_each(|v| *v *= phase);
                    add_in_search_plane(x, self.target, self.a, self.b, (z0 - phase * y0, z1 - phase * y1));
                }
            }
            StepMethod::Dense => {
                let u = matexp_unitary(&self.dense_hamiltonian(f), dt)
                    .expect("dense Hamiltonian is real symmetric");
                for x in kets.iter_mut() {
                    *x = u.apply(x).expect("dimensions match");
                }
            }
        }
    }

    fn integrate(&self, kets: &mut [Ket], from: f64, to: f64, dt: f64) {
        let span = to - from;
        if span <= 0.0 {
            return;
        }
        let steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for i in 0..steps {
            let t0 = from + h * i as f64;
            let t1 = if i + 1 == steps { to } else { t0 + h };
            self.step(kets, t0, t1);
        }
    }

    pub(super) fn propagate(&self, kets: &[Ket], times: &[f64]) -> Result<Vec<Vec<Ket>>> {
        let total = self.run_time();
        let times: Vec<f64> = times
            .iter()
            .map(|&t| clamp_time(t, total))
            .collect::<Result<_>>()?;
        match self.mode {
            AdiabaticMode::Integrated => {
                let mut current = kets.to_vec();
                let mut now = 0.0;
                let mut out = Vec::with_capacity(times.len());
                for &t in &times {
                    self.integrate(&mut current, now, t, self.dt);
                    now = now.max(t);
                    out.push(current.clone());
                }
                Ok(out)
            }
            AdiabaticMode::Ideal => Ok(times.iter().map(|&t| self.ideal_propagate(kets, t)).collect()),
        }
    }

    /// Angle `φ` such that the excited plane eigenvector is `(cos φ, sin φ)`
    /// and the ground one `(−sin φ, cos φ)`; continuous in `f ∈ [0, 1]`.
    fn plane_angle(&self, f: f64) -> f64 {
        let h = self.plane_hamiltonian(f);
        // The off-diagonal is never positive, which keeps atan2 off its branch cut.
        0.5 * (-(2.0 * h[0][1]).abs()).atan2(h[0][0] - h[1][1])
    }

    fn plane_levels(&self, f: f64) -> (f64, f64) {
        let g = two_level_gap(self.qubits, f);
        ((1.0 - g) / 2.0, (1.0 + g) / 2.0)
    }

    /// Dynamical phases `−∫₀ᵗ E_n ds` of the two plane levels (Simpson rule).
    fn dynamical_phases(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            return (0.0, 0.0);
        }
        let m = 2 * ((t / self.run_time() * 4000.0).ceil() as usize).max(8);
        let h = t / m as f64;
        let mut acc = (0.0, 0.0);
        for i in 0..=m {
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let f = schedule_unchecked(self.qubits, self.epsilon, h * i as f64);
            let (e0, e1) = self.plane_levels(f);
            acc.0 += w * e0;
            acc.1 += w * e1;
        }
        (-acc.0 * h / 3.0, -acc.1 * h / 3.0)
    }

    fn ideal_propagate(&self, kets: &[Ket], t: f64) -> Vec<Ket> {
        let f0 = schedule_unchecked(self.qubits, self.epsilon, 0.0);
        let ft = schedule_unchecked(self.qubits, self.epsilon, t);
        let (p0, pt) = (self.plane_angle(f0), self.plane_angle(ft));
        let (alpha0, alpha1) = self.dynamical_phases(t);
        let ground = |p: f64| (-p.sin(), p.cos());
        let excited = |p: f64| (p.cos(), p.sin());
        let phase = C64::from_polar(1.0, -t);
        kets.iter()
            .map(|x| {
                let (y0, y1) = search_plane_coords(x, self.target, self.a, self.b);
                let mut z = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for (vec, alpha) in [(ground as fn(f64) -> (f64, f64), alpha0), (excited, alpha1)] {
                    let (u0, u1) = vec(p0);
                    let (v0, v1) = vec(pt);
                    let c = (y0 * u0 + y1 * u1) * C64::from_polar(1.0, alpha);
                    z.0 += c * v0;
                    z.1 += c * v1;
                }
                let mut out: Ket = x.iter().map(|v| v * phase).collect();
                add_in_search_plane(
                    &mut out,
                    self.target,
                    self.a,
                    self.b,
                    (z.0 - phase * y0, z.1 - phase * y1),
                );
                out
            })
            .collect()
    }

    /// Instantaneous ground state of `H(t)` (it always lies in the search plane).
    pub fn ground_state(&self, t: f64) -> Result<Ket> {
        let f = self.schedule(t)?;
        let eig = herm_eig(&self.plane_operator(f))?;
        let (g0, g1) = (eig.vectors.get(0, 0), eig.vectors.get(1, 0));
        let mut out = vec![C64::new(0.0, 0.0); 1 << self.qubits];
        add_in_search_plane(&mut out, self.target, self.a, self.b, (g0, g1));
        Ok(out)
    }

    /// `|⟨φ₀(t)|ψ⟩|²`.
    pub fn ground_overlap(&self, ket: &[C64], t: f64) -> Result<f64> {
        let g = self.ground_state(t)?;
        Ok(crate::linalg::inner(&g, ket).norm_sqr())
    }

    /// `λ₁ − λ₀` of the dense `H(t)`.
    pub fn spectral_gap(&self, t: f64) -> Result<f64> {
        let values = herm_eigenvalues(&self.hamiltonian(t)?)?;
        Ok(values[1] - values[0])
    }

    /// Golden-section minimization of the dense spectral gap over `[0, T]`;
    /// returns `(t_min, gap)`.
    pub fn minimum_gap(&self) -> Result<(f64, f64)> {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (0.0, self.run_time());
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut g1 = self.spectral_gap(x1)?;
        let mut g2 = self.spectral_gap(x2)?;
        while hi - lo > 1e-7 * self.run_time() {
            if g1 < g2 {
                hi = x2;
                x2 = x1;
                g2 = g1;
                x1 = hi - inv_phi * (hi - lo);
                g1 = self.spectral_gap(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                g1 = g2;
                x2 = lo + inv_phi * (hi - lo);
                g2 = self.spectral_gap(x2)?;
            }
        }
        let t = 0.5 * (lo + hi);
        Ok((t, self.spectral_gap(t)?))
    }
}
