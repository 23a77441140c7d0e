use std::path::Path;
use std::process::{Command, Output};

fn sympdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympdd")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn homogenize_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hom.csv");
    let o = sympdd(&["homogenize", "--n", "1", "--tau", "1e-2", "--trials", "4", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("# sympdd "));
    assert!(csv.contains("#! trials = 4"));
    assert!(dir.path().join("hom_plot.py").exists());
}

#[test]
fn suppress_rows_respect_bound() {
    let o = sympdd(&["suppress", "--ns", "1", "--ne", "0,2,4", "--tau", "1e-2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("n_E"))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0][1] <= 1e-12);
    // The n_E = 0 row has a zero bound and a roundoff-sized error.
    for r in &rows {
        assert!(r[1] >= 0.0 && r[1] <= r[4] + 3.0 * r[2] + 1e-20, "{r:?}");
    }
}

#[test]
fn ne_max_sweeps_from_one() {
    let o = sympdd(&["suppress", "--ns", "1", "--ne-max", "3", "--tau", "1e-2", "--trials", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("#! ne = 1,2,3"), "{text}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\nn = 1\ntau = 1e-2\ntrials = 3\nseed = 8\n").unwrap();
    let o = sympdd(&["homogenize", "--config", path(&cfg), "--seed", "9"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("#! seed = 9") && text.contains("#! trials = 3"), "{text}");
}

#[test]
fn eulerian_writes_pulse_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eul.csv");
    let o = sympdd(&["eulerian", "--n", "1", "--repetitions", "2", "--out", path(&out)]);
    assert!(o.status.success());
    let schedule = std::fs::read_to_string(dir.path().join("eul_pulses.txt")).unwrap();
    assert!(schedule.starts_with("# tau="));
}

#[test]
fn fock_check_reports_small_defects() {
    let o = sympdd(&["fock-check"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let harmonic40: Vec<&str> = text.lines().find(|l| l.starts_with("harmonic,40,")).unwrap().split(',').collect();
    assert!(harmonic40[3].parse::<f64>().unwrap() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(sympdd(&["verify"]).status.code(), Some(0));
    let fault = sympdd(&["verify", "--fault", "asymmetric"]);
    assert_eq!(fault.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fault.stdout).contains("[FAIL] model-construction"));
    assert_eq!(sympdd(&["homogenize", "--tau", "-1"]).status.code(), Some(2));
    assert_eq!(sympdd(&["homogenize", "--nonsense"]).status.code(), Some(2));
    assert_eq!(sympdd(&["homogenize", "--config", "/nonexistent/run.cfg"]).status.code(), Some(3));
    assert_eq!(
        sympdd(&["homogenize", "--n", "1", "--tau", "0.1", "--out", "/nonexistent/dir/x.csv"]).status.code(),
        Some(3)
    );
}

#[test]
fn plot_subcommand_rejects_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    std::fs::write(&csv, "tau,mc_mean,mc_stderr,analytic,bound\n").unwrap();
    assert_eq!(sympdd(&["plot", path(&csv)]).status.code(), Some(2));
    assert!(!dir.path().join("empty_plot.py").exists());
}

#[test]
fn reruns_and_replays_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b, c] = ["a.csv", "b.csv", "c.csv"].map(|name| dir.path().join(name));
    let flags = ["suppress", "--ns", "1", "--ne", "0,3", "--tau", "1e-2", "--seed", "5", "--out"];
    for out in [&a, &b] {
        let mut args = flags.to_vec();
        args.push(path(out));
        assert!(sympdd(&args).status.success());
    }
    assert!(sympdd(&["suppress", "--config", path(&a), "--out", path(&c)]).status.success());
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert_eq!(first, std::fs::read(&c).unwrap());
}
