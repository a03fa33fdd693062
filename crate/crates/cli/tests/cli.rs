use std::process::{Command, Output};

fn infoflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infoflux"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: [&str; 6] = ["--n", "4", "--samples", "30", "--grid", "6"];

#[test]
fn zero_samples_is_rejected_by_name() {
    let o = infoflux(&["run", "--engine", "analog", "--samples", "0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("samples"), "{}", stderr(&o));
}

#[test]
fn zero_threads_is_rejected_by_name() {
    let o = infoflux(&["--threads", "0", "selftest"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("threads"));
}

#[test]
fn unknown_engine_is_rejected() {
    let o = infoflux(&["run", "--engine", "quantum"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("engine"));
}

#[test]
fn run_writes_csv_to_stdout() {
    let mut args = vec!["run", "--engine", "circuit"];
    args.extend(SMALL);
    let o = infoflux(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# infoflux"));
    assert!(text.contains("t,t_normalized,P_target,sigma,p_guess_star,sigma_tilde,leakage_cumulative"));
}

#[test]
fn run_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let mut args = vec![
        "run",
        "--engine",
        "adiabatic",
        "--format",
        "json",
        "--outputs",
        "trajectory,entanglement",
    ];
    args.extend(SMALL);
    args.extend(["--out", path.to_str().unwrap()]);
    let o = infoflux(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let d = infoflux::Dataset::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        d.columns,
        ["t", "t_normalized", "P_target", "C_bipartite", "E_multipartite"]
    );
    assert_eq!(d.rows.len(), 6);
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no").join("such").join("out.csv");
    let mut args = vec!["run", "--engine", "analog"];
    args.extend(SMALL);
    args.extend(["--out", path.to_str().unwrap()]);
    let o = infoflux(&args);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn preset_writes_one_file_per_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = infoflux(&["preset", "fig4", "--n", "4", "--grid", "5", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3, "{names:?}");
    assert!(names.iter().all(|n| n.ends_with(".csv")));
}

#[test]
fn selftest_passes() {
    let o = infoflux(&["selftest"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn output_is_independent_of_thread_count() {
    let run = |threads: &str| {
        let mut args = vec!["--threads", threads, "run", "--engine", "analog", "--ns", "2"];
        args.extend(SMALL);
        let o = infoflux(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        o.stdout
    };
    assert_eq!(run("1"), run("2"));
}
