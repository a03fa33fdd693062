//! Configured runs and their persisted datasets.
//!
//! A dataset is one row per grid time. CSV files carry their metadata on
//! `#` lines ahead of the header; JSON files hold the same content as one
//! object. Both print numbers in shortest round-trip form.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::subsystem_split;
use crate::engine::{Engine, EngineKind, EngineParams};
use crate::entanglement::{entanglement_series, MAX_MULTIPARTITE_QUBITS};
use crate::error::{Error, Result};
use crate::flow::{interval_grid, FlowAnalyzer, DEFAULT_SAMPLES};

pub const LIBRARY: &str = "infoflux";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Grid points for continuous engines when none are given.
pub const DEFAULT_GRID_POINTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Trajectory,
    Flow,
    Leakage,
    Entanglement,
}

impl Output {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Output::Trajectory => &["P_target"],
            Output::Flow => &["sigma", "p_guess_star"],
            Output::Leakage => &["sigma_tilde", "leakage_cumulative"],
            Output::Entanglement => &["C_bipartite", "E_multipartite"],
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trajectory" => Ok(Output::Trajectory),
            "flow" => Ok(Output::Flow),
            "leakage" => Ok(Output::Leakage),
            "entanglement" => Ok(Output::Entanglement),
            other => Err(Error::config("outputs", format!("unknown output `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config(
                "format",
                format!("unknown format `{other}` (expected csv or json)"),
            )),
        }
    }
}

/// Everything needed to reproduce one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub engine: EngineParams,
    pub n_s: usize,
    /// Interval start; `None` is 0.
    pub t1: Option<f64>,
    /// Interval end; `None` is the engine's run time.
    pub t2: Option<f64>,
    /// Continuous grid size; the circuit always uses every iteration.
    pub grid_points: usize,
    pub samples: usize,
    pub seed: u64,
    pub outputs: BTreeSet<Output>,
    pub format: Format,
    /// Use one pair for `p*` across the whole grid.
    #[serde(default)]
    pub freeze_pair: bool,
}

impl ExperimentConfig {
    pub fn new(kind: EngineKind, qubits: usize) -> Self {
        ExperimentConfig {
            label: kind.name().to_string(),
            engine: EngineParams::new(kind, qubits, 0),
            n_s: 1,
            t1: None,
            t2: None,
            grid_points: DEFAULT_GRID_POINTS,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            outputs: [Output::Trajectory, Output::Flow, Output::Leakage].into(),
            format: Format::Csv,
            freeze_pair: false,
        }
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    fn needs_flow(&self) -> bool {
        self.wants(Output::Flow) || self.wants(Output::Leakage)
    }

    /// Checks that do not need the engine built.
    pub fn validate(&self) -> Result<()> {
        self.engine.validate()?;
        if self.outputs.is_empty() {
            return Err(Error::config("outputs", "select at least one output"));
        }
        if self.samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        if self.grid_points < 2 {
            return Err(Error::config(
                "grid",
                format!("must be at least 2, got {}", self.grid_points),
            ));
        }
        if self.needs_flow() {
            if self.n_s == 0 || self.n_s >= self.engine.qubits {
                return Err(Error::config(
                    "ns",
                    format!(
                        "must satisfy 1 <= ns < n = {}, got {}",
                        self.engine.qubits, self.n_s
                    ),
                ));
            }
            if self.n_s > crate::state::MAX_PAIR_QUBITS {
                return Err(Error::config(
                    "ns",
                    format!(
                        "pair sampling supports at most {} qubits",
                        crate::state::MAX_PAIR_QUBITS
                    ),
                ));
            }
        }
        if self.wants(Output::Entanglement) && self.engine.qubits > MAX_MULTIPARTITE_QUBITS {
            return Err(Error::config(
                "n",
                format!("entanglement output supports at most {MAX_MULTIPARTITE_QUBITS} qubits"),
            ));
        }
        for (field, value) in [("t1", self.t1), ("t2", self.t2)] {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::config(
                        field,
                        format!("must be finite and non-negative, got {v}"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn interval(&self, engine: &Engine) -> Result<(f64, f64)> {
        let end = engine.run_time();
        let t1 = self.t1.unwrap_or(0.0);
        let t2 = self.t2.unwrap_or(end);
        if t2 > end {
            return Err(Error::config("t2", format!("exceeds the run time {end}")));
        }
        if t1 > t2 {
            return Err(Error::config("t1", format!("{t1} is after t2 = {t2}")));
        }
        Ok((t1, t2))
    }
}

/// Named configurations matching the published figures.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let base = |kind: EngineKind, label: &str| {
        let mut c = ExperimentConfig::new(kind, 8);
        c.label = label.to_string();
        c
    };
    match name {
        "fig2a" => Ok(vec![base(EngineKind::Circuit, "fig2a")]),
        "fig2b" => Ok(vec![base(EngineKind::Analog, "fig2b")]),
        "fig2c" => Ok(vec![base(EngineKind::Adiabatic, "fig2c")]),
        "fig3" => Ok([EngineKind::Circuit, EngineKind::Analog]
            .into_iter()
            .flat_map(|kind| {
                (1..=4).map(move |n_s| {
                    let mut c = base(kind, &format!("fig3_{kind}_ns{n_s}"));
                    c.n_s = n_s;
                    c.outputs = [Output::Flow, Output::Leakage].into();
                    c
                })
            })
            .collect()),
        "fig4" => Ok(EngineKind::ALL
            .into_iter()
            .map(|kind| {
                let mut c = base(kind, &format!("fig4_{kind}"));
                c.outputs = [Output::Trajectory, Output::Entanglement].into();
                c
            })
            .collect()),
        other => Err(Error::config(
            "preset",
            format!("unknown preset `{other}` (expected fig2a, fig2b, fig2c, fig3 or fig4)"),
        )),
    }
}

pub const PRESETS: [&str; 5] = ["fig2a", "fig2b", "fig2c", "fig3", "fig4"];

/// Formulas that differ from their printed form, recorded in every dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corrections {
    /// The adiabatic schedule keeps `arctan √(N−1)` inside the tangent.
    pub schedule_arctan_inside_tangent: bool,
    /// Multipartite concurrence uses exponent `+1/2`.
    pub concurrence_exponent_positive: bool,
}

impl Default for Corrections {
    fn default() -> Self {
        Corrections {
            schedule_arctan_inside_tangent: true,
            concurrence_exponent_positive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub library: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub corrections: Corrections,
    /// Run time used for `t_normalized`.
    pub run_time: f64,
    /// `√N π / (2ε)` for adiabatic runs.
    pub asymptotic_run_time: Option<f64>,
    /// Converged adiabatic integration step.
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut s = String::new();
        writeln!(s, "# {} {}", self.metadata.library, self.metadata.version).unwrap();
        writeln!(s, "# metadata: {}", serde_json::to_string(&self.metadata)?).unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = None;
        let mut columns = None;
        let mut rows = Vec::new();
        for line in text.lines().filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(json) = rest.trim_start().strip_prefix("metadata:") {
                    metadata = Some(serde_json::from_str(json.trim())?);
                }
            } else if columns.is_none() {
                columns = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
            } else {
                let row = line
                    .split(',')
                    .map(|c| {
                        c.parse::<f64>()
                            .map_err(|e| Error::argument(format!("bad number `{c}`: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
        }
        Ok(Dataset {
            metadata: metadata.ok_or_else(|| Error::argument("missing metadata line"))?,
            columns: columns.ok_or_else(|| Error::argument("missing header line"))?,
            rows,
        })
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        fs::write(path, self.render(format)?)?;
        Ok(())
    }
}

/// Builds the engine and computes every requested column.
pub fn run(config: &ExperimentConfig) -> Result<Dataset> {
    config.validate()?;
    let engine = Engine::new(&config.engine)?;
    if config.needs_flow() {
        subsystem_split(engine.qubits(), &crate::channel::leading_qubits(config.n_s))?;
    }
    let (t1, t2) = config.interval(&engine)?;
    let grid = interval_grid(&engine, t1, t2, config.grid_points)?;
    let run_time = engine.run_time();

    let mut columns: Vec<String> = vec!["t".into(), "t_normalized".into()];
    let mut data: Vec<Vec<f64>> = vec![grid.clone(), grid.iter().map(|t| t / run_time).collect()];

    let wants_states = config.wants(Output::Trajectory) || config.wants(Output::Entanglement);
    let trajectory = if wants_states {
        Some(engine.trajectory(&grid)?)
    } else {
        None
    };
    let records = if config.needs_flow() {
        let analyzer = FlowAnalyzer::new(&engine, config.n_s, config.samples, config.seed)?
            .with_frozen_pair(config.freeze_pair);
        Some(analyzer.records(&grid)?)
    } else {
        None
    };

    for output in &config.outputs {
        columns.extend(output.columns().iter().map(|c| c.to_string()));
        match output {
            Output::Trajectory => {
                data.push(
                    trajectory
                        .as_ref()
                        .expect("states computed")
                        .success_probabilities(),
                );
            }
            Output::Flow => {
                let r = records.as_ref().expect("flow computed");
                data.push(r.iter().map(|x| x.sigma).collect());
                data.push(r.iter().map(|x| x.p_guess_star).collect());
            }
            Output::Leakage => {
                let r = records.as_ref().expect("flow computed");
                data.push(r.iter().map(|x| x.sigma_tilde).collect());
                data.push(r.iter().map(|x| x.leakage).collect());
            }
            Output::Entanglement => {
                let e = entanglement_series(trajectory.as_ref().expect("states computed"))?;
                data.push(e.iter().map(|x| x.c_bipartite).collect());
                data.push(e.iter().map(|x| x.e_multipartite).collect());
            }
        }
    }

    let rows = (0..grid.len())
        .map(|i| data.iter().map(|col| col[i]).collect())
        .collect();
    let (asymptotic_run_time, dt) = match &engine {
        Engine::Adiabatic(a) => (Some(a.asymptotic_run_time()), Some(a.dt())),
        _ => (None, None),
    };
    Ok(Dataset {
        metadata: Metadata {
            library: LIBRARY.to_string(),
            version: VERSION.to_string(),
            config: config.clone(),
            corrections: Corrections::default(),
            run_time,
            asymptotic_run_time,
            dt,
        },
        columns,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: EngineKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, 4);
        c.samples = 50;
        c.grid_points = 12;
        c.outputs = [
            Output::Trajectory,
            Output::Flow,
            Output::Leakage,
            Output::Entanglement,
        ]
        .into();
        c
    }

    #[test]
    fn zero_samples_name_the_field() {
        let mut c = small(EngineKind::Circuit);
        c.samples = 0;
        match run(&c) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "samples"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_subsystem_names_ns() {
        let mut c = small(EngineKind::Analog);
        c.n_s = 4;
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "ns"));
    }

    #[test]
    fn presets() {
        let a = preset("fig2a").unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].engine.kind, EngineKind::Circuit);
        assert_eq!((a[0].engine.qubits, a[0].n_s), (8, 1));
        assert_eq!(preset("fig3").unwrap().len(), 8);
        let f4 = preset("fig4").unwrap();
        assert_eq!(f4.len(), 3);
        assert!(f4
            .iter()
            .all(|c| c.outputs.contains(&Output::Entanglement) && !c.needs_flow()));
        assert!(matches!(preset("fig9"), Err(Error::Config { field, .. }) if field == "preset"));
    }

    #[test]
    fn columns_follow_outputs() {
        let mut c = small(EngineKind::Circuit);
        c.outputs = [Output::Entanglement].into();
        let d = run(&c).unwrap();
        assert_eq!(d.columns, ["t", "t_normalized", "C_bipartite", "E_multipartite"]);
        assert_eq!(d.rows.len(), 4);
    }

    #[test]
    fn json_and_csv_round_trip() {
        let d = run(&small(EngineKind::Analog)).unwrap();
        assert_eq!(Dataset::from_json(&d.to_json().unwrap()).unwrap(), d);
        assert_eq!(Dataset::from_csv(&d.to_csv().unwrap()).unwrap(), d);
    }
}
