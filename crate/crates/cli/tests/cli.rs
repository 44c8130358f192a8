use std::path::Path;
use std::process::{Command, Output};

fn cuspwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspwave"))
        .args(args)
        .env_remove("CUSPWAVE_THREADS")
        .output()
        .expect("binary runs")
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr
        .lines()
        .rev()
        .find(|l| l.contains("\"level\":\"error\""))
        .unwrap_or_else(|| panic!("no error record in {stderr}"));
    serde_json::from_str(line).unwrap()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const LINEAR_A1: &str = "m = 1\nsize = 128\nT = 0.5\nn_t = 33\n[data]\nfamily = A1\nslots = 2\n\
                         slot0.right = bump center=0 width=2 amp=1\nslot0.left = zero\n";

#[test]
fn zero_m_is_a_parameter_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cuspwave(&["solve", "third", "--m", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["kind"], "parameter");
    assert_eq!(rec["command"], "solve");
    assert_eq!(rec["exit_code"], 2);
}

#[test]
fn unknown_flags_and_kinds_are_config_errors() {
    let out = cuspwave(&["solve", "fifth"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["kind"], "config");
    let out = cuspwave(&["solve", "linear", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cuspwave(&["rates", "--entries", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn linear_run_writes_every_snapshot_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.txt");
    write(&cfg, LINEAR_A1);
    let a = dir.path().join("a");
    let out = cuspwave(&["solve", "linear", "-c", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snaps = std::fs::read_dir(&a)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "cwgrid"))
        .count();
    assert_eq!(snaps, 33);

    // the manifest alone reproduces the run
    let b = dir.path().join("b");
    let manifest = a.join("manifest.txt");
    let out = cuspwave(&["solve", "-c", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trajectory.csv", "snap_00032.cwgrid"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.txt");
    write(&cfg, "m = 1\nsize = 64\nT = 0.3\nn_t = 17\nf = poly:0,0,1\n");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("t{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_cuspwave"))
            .args(["solve", "second", "-c", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
            .env("CUSPWAVE_THREADS", threads)
            .output()
            .unwrap();
        assert!(status.status.success());
        outputs.push(std::fs::read(out_dir.join("trajectory.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn non_convergence_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = cuspwave(&[
        "solve",
        "second",
        "--size",
        "64",
        "--f",
        "poly:0,0,1",
        "-s",
        "max_iters=1",
        "-s",
        "tol=1e-300",
        "-s",
        "n_t=17",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["kind"], "non-convergence");
    assert!(dir.path().join("picard.csv").exists());
}

#[test]
fn probe_reports_ridges_only_for_rough_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.txt");
    write(&cfg, LINEAR_A1);
    let rough = dir.path().join("rough");
    let smooth = dir.path().join("smooth");
    assert!(cuspwave(&["solve", "linear", "-c", cfg.to_str().unwrap(), "--out", rough.to_str().unwrap()])
        .status
        .success());
    assert!(cuspwave(&["solve", "linear", "--size", "1024", "-s", "n_t=33", "--out", smooth.to_str().unwrap()])
        .status
        .success());
    for (traj, empty) in [(&rough, false), (&smooth, true)] {
        let out = cuspwave(&["probe", "--traj", traj.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let ridges = std::fs::read_to_string(traj.join("probe/ridges.csv")).unwrap();
        assert_eq!(ridges.lines().count() == 1, empty, "{}", traj.display());
        for f in ["scan.csv", "distances.csv", "alignment.csv", "ridges.gp", "scan.gp", "manifest.txt"] {
            assert!(traj.join("probe").join(f).exists(), "{f}");
        }
    }
}

#[test]
fn probe_of_missing_directory_fails() {
    let out = cuspwave(&["probe", "--traj", "/definitely/not/here"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn opalg_verify_prints_csv_and_fails_on_misprints() {
    let dir = tempfile::tempdir().unwrap();
    let out = cuspwave(&["opalg", "verify", "--m", "2", "--n", "2", "--pair", "3,1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("m,n,group,name,form,status,residual_terms\n"));
    assert!(csv.contains("3/1,2,mixed-fields"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrected"));
    assert!(dir.path().join("report.csv").exists());

    let out = cuspwave(&["opalg", "commutator", "Dt", "t^2", "--n", "1"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "(2*t)");
    let out = cuspwave(&["opalg", "commutator", "Dt +", "t", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_generate_writes_slots_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("data.txt");
    write(
        &spec,
        "family = A1\nslots = 2\nslot0.right = bump center=0 width=2 amp=1\nslot0.left = bump center=0 width=2 amp=1\n",
    );
    let out_dir = dir.path().join("out");
    let out = cuspwave(&[
        "data",
        "generate",
        "--data",
        spec.to_str().unwrap(),
        "--size",
        "64",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let warning: serde_json::Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(warning["level"], "warning");
    assert!(warning["message"].as_str().unwrap().contains("no jump"));
    for f in ["slot0.cwgrid", "slot1.cwgrid", "slot0.csv", "preview.gp", "manifest.txt"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("[data]"));
    assert!(manifest.contains("slot0.left"));
}

#[test]
fn rates_reports_fits() {
    let dir = tempfile::tempdir().unwrap();
    let out = cuspwave(&[
        "rates",
        "--m",
        "1",
        "--entries",
        "propagator-v2",
        "-s",
        "size=2048",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fits = std::fs::read_to_string(dir.path().join("fits.csv")).unwrap();
    assert!(fits.starts_with("id,expected,fitted,r2,t_min,t_max,accepted\n"));
    assert!(fits.contains("propagator-v2"));
    assert!(dir.path().join("fits.gp").exists());
}
