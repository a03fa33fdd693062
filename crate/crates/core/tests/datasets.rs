use std::collections::BTreeSet;

use infoflux::engine::EngineKind;
use infoflux::experiment::{preset, run, Dataset, ExperimentConfig, Format, Output};
use infoflux::Error;

fn small(kind: EngineKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind, 4);
    c.samples = 40;
    c.grid_points = 8;
    c.outputs = [
        Output::Trajectory,
        Output::Flow,
        Output::Leakage,
        Output::Entanglement,
    ]
    .into_iter()
    .collect::<BTreeSet<_>>();
    c
}

#[test]
fn json_and_csv_round_trip_exactly() {
    for kind in EngineKind::ALL {
        let d = run(&small(kind)).unwrap();
        assert_eq!(Dataset::from_json(&d.to_json().unwrap()).unwrap(), d);
        assert_eq!(Dataset::from_csv(&d.to_csv().unwrap()).unwrap(), d);
    }
}

#[test]
fn runs_are_deterministic() {
    let c = small(EngineKind::Adiabatic);
    assert_eq!(
        run(&c).unwrap().to_csv().unwrap(),
        run(&c).unwrap().to_csv().unwrap()
    );
}

#[test]
fn datasets_carry_columns_and_metadata() {
    let d = run(&small(EngineKind::Analog)).unwrap();
    let expected = [
        "t",
        "t_normalized",
        "P_target",
        "sigma",
        "p_guess_star",
        "sigma_tilde",
        "leakage_cumulative",
        "C_bipartite",
        "E_multipartite",
    ];
    assert_eq!(d.columns, expected);
    assert!(d.rows.iter().all(|r| r.len() == expected.len()));
    let tn = d.column("t_normalized").unwrap();
    assert_eq!(tn.first(), Some(&0.0));
    assert!((tn.last().unwrap() - 1.0).abs() < 1e-15);
    assert!(d.metadata.corrections.schedule_arctan_inside_tangent);
    assert_eq!(d.metadata.config, small(EngineKind::Analog));
    assert!(d.column("missing").is_none());
}

#[test]
fn files_are_written_in_either_format() {
    let dir = tempfile::tempdir().unwrap();
    let d = run(&small(EngineKind::Circuit)).unwrap();
    for format in [Format::Csv, Format::Json] {
        let path = dir.path().join(format!("out.{}", format.extension()));
        d.write(&path, format).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let back = match format {
            Format::Csv => Dataset::from_csv(&text),
            Format::Json => Dataset::from_json(&text),
        };
        assert_eq!(back.unwrap(), d);
    }
}

#[test]
fn unwritable_path_reports_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = run(&small(EngineKind::Circuit)).unwrap();
    let path = dir.path().join("missing").join("out.csv");
    assert!(matches!(d.write(&path, Format::Csv), Err(Error::Io(_))));
}

#[test]
fn invalid_configs_name_their_field() {
    let mut c = small(EngineKind::Analog);
    c.samples = 0;
    assert!(matches!(run(&c), Err(Error::Config { field, .. }) if field == "samples"));
    let mut c = small(EngineKind::Analog);
    c.outputs.clear();
    assert!(matches!(run(&c), Err(Error::Config { field, .. }) if field == "outputs"));
    let mut c = small(EngineKind::Analog);
    c.n_s = 4;
    assert!(run(&c).is_err());
}

#[test]
fn presets_expand_to_labelled_configs() {
    assert_eq!(preset("fig2a").unwrap().len(), 1);
    let fig3 = preset("fig3").unwrap();
    assert_eq!(fig3.len(), 8);
    let labels: BTreeSet<_> = fig3.iter().map(|c| c.label.clone()).collect();
    assert_eq!(labels.len(), 8);
    assert_eq!(preset("fig4").unwrap().len(), 3);
    assert!(preset("fig9").is_err());
}
