use std::path::Path;
use std::process::Command;

fn swigner() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swigner"))
}

fn run(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = swigner().args(args).arg("--out").arg(out).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into(), String::from_utf8_lossy(&o.stderr).into())
}

#[test]
fn list_shows_thirteen_entries() {
    let o = swigner().arg("list").output().unwrap();
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = s.lines().filter(|l| !l.starts_with(' ')).collect();
    assert_eq!(names.len(), 13, "{s}");
    assert_eq!(s.matches("anchor:").count(), 13);
}

#[test]
fn husimi_off_critical_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["run", "husimi", "--set", "smoothing.sigma_k2=2.25"], dir.path());
    assert_eq!(code, 2, "{err}");
    let rec = std::fs::read_to_string(dir.path().join("error.txt")).unwrap();
    assert!(rec.contains("kind = config") && rec.contains("code = 2"), "{rec}");
}

#[test]
fn unknown_name_suggests() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["run", "marginal"], dir.path());
    assert_eq!(code, 2);
    assert!(err.contains("did you mean 'marginals'"), "{err}");
}

#[test]
fn bad_overrides() {
    let dir = tempfile::tempdir().unwrap();
    for set in ["grid.nn=256", "grid.n", "grid.n=abc", "grid.n=100"] {
        let (code, _, err) = run(&["run", "marginals", "--set", set], dir.path());
        assert_eq!(code, 2, "{set}: {err}");
    }
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(&conf, "[signals]\ncount = 3\n").unwrap();
    let out = dir.path().join("out");
    let (code, stdout, err) = run(&["run", "marginals", "--config", conf.to_str().unwrap()], &out);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("PASS 1"));
    let m = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(m.contains("count = 3") && m.contains("marginals.csv: signal,kind,err_k_marginal,err_x_marginal"), "{m}");
    assert!(out.join("plot.gp").exists());
    let rows = std::fs::read_to_string(out.join("marginals.csv")).unwrap().lines().count();
    assert_eq!(rows, 4);
}

#[test]
fn reference_mode_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let read = |d: &Path| {
        let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect();
        v.sort();
        v
    };
    let mut outs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}"));
        let (code, _, err) = run(&["run", "calculus-consistency", "--reference", "--seed", "7", "--set", "signals.count=3"], &out);
        assert_eq!(code, 0, "{err}");
        outs.push(read(&out));
    }
    assert!(!outs[0].is_empty());
    assert_eq!(outs[0], outs[1]);
}
