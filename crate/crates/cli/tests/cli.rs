use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cadmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cadmm")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/qaplib")
        .join(format!("{name}.dat"))
        .display()
        .to_string()
}

fn tiny(dir: &Path) -> String {
    let p = dir.join("tiny4.dat");
    std::fs::write(&p, "4\n0 1 2 3\n1 0 4 5\n2 4 0 6\n3 5 6 0\n\n0 2 1 4\n2 0 3 1\n1 3 0 2\n4 1 2 0\n").unwrap();
    p.display().to_string()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

fn without_elapsed(rows: &[String]) -> Vec<String> {
    rows.iter().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&cadmm(&["--help"])), 0);
    assert_eq!(code(&cadmm(&["solve", "--help"])), 0);
    assert_eq!(code(&cadmm(&["frobnicate"])), 1);
    assert_eq!(code(&cadmm(&["solve"])), 1);
    assert_eq!(code(&cadmm(&["solve", "--instance", "x.dat", "--clip-y", "maybe"])), 1);
    assert_eq!(code(&cadmm(&["solve", "--instance", "x.dat", "--method", "simplex"])), 1);
}

#[test]
fn parse_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.dat");
    let out = dir.path().display().to_string();
    assert_eq!(code(&cadmm(&["solve", "--instance", missing.to_str().unwrap(), "--out", &out])), 2);
    let bad = dir.path().join("bad3.dat");
    std::fs::write(&bad, "3\n0 1 2\n1 0").unwrap();
    assert_eq!(code(&cadmm(&["solve", "--instance", bad.to_str().unwrap(), "--out", &out])), 2);
}

#[test]
fn invalid_settings_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny(dir.path());
    let out = dir.path().display().to_string();
    assert_eq!(code(&cadmm(&["solve", "--instance", &inst, "--out", &out, "--mu-shrink", "1.5"])), 1);
    assert_eq!(code(&cadmm(&["solve", "--instance", &inst, "--out", &out, "--trace-every", "0"])), 1);
}

#[test]
fn solve_writes_checkpoint_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = cadmm(&[
        "solve",
        "--instance",
        &data("had12"),
        "--max-iters",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = lines(&out.join("had12.standard.csv"));
    assert_eq!(rows[0], "iter,phase,lb,primal_obj,r_p,r_d,rho,mu,elapsed_ms");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("100,standard,"));
    assert!(rows[2].starts_with("100,standard,"));
}

#[test]
fn config_file_is_overridden_by_flags_and_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny(dir.path());
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# settings\nmax-iters = 40\ntrace-every = 10\ntol-primal = 1e-300\ntol-dual = 1e-300\n").unwrap();
    let run = |sub: &str, extra: &[&str]| {
        let out = dir.path().join(sub);
        let mut args = vec![
            "solve",
            "--instance",
            &inst,
            "--method",
            "centering",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        assert_eq!(code(&cadmm(&args)), 0);
        lines(&out.join("tiny4.centering.csv"))
    };
    let a = run("a", &[]);
    assert_eq!(a.len(), 1 + 4 + 1);
    let b = run("b", &[]);
    assert_eq!(without_elapsed(&a), without_elapsed(&b));
    let c = run("c", &["--max-iters", "20"]);
    assert_eq!(c.len(), 1 + 2 + 1);
    assert!(c[1].starts_with("10,centering,"));
}

#[test]
fn compare_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny(dir.path());
    let out = dir.path().join("res");
    let o = cadmm(&[
        "compare",
        "--instance",
        &inst,
        "--max-iters",
        "300",
        "--plot-script",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let series = lines(&out.join("tiny4.diff.csv"));
    assert_eq!(series[0], "iter,lb_centering,lb_standard,diff");
    for row in &series[1..] {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[3], v[1] - v[2]);
    }
    assert!(out.join("tiny4.diff.gp").exists());

    let t = cadmm(&["table", out.to_str().unwrap()]);
    assert_eq!(code(&t), 0);
    let text = String::from_utf8(t.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("tiny4,,"));

    let empty = tempfile::tempdir().unwrap();
    let t = cadmm(&["table", empty.path().to_str().unwrap()]);
    assert_eq!(code(&t), 0);
    assert_eq!(String::from_utf8(t.stdout).unwrap().lines().count(), 1);
}

#[test]
fn divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny(dir.path());
    let out = dir.path().display().to_string();
    let o = cadmm(&[
        "solve", "--instance", &inst, "--out", &out, "--rho0", "1e-300", "--adapt-rho", "off", "--clip-y", "off",
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn selftest_passes() {
    let o = cadmm(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().lines().all(|l| l.starts_with("PASS")));
}
