//! Output directory layout: one CSV per table, `manifest.txt`, `plot.gp`,
//! and `error.txt` when a run aborts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::{Config, Report, RunError, Table};

pub fn write_table(dir: &Path, t: &Table) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name))).map_err(csv_err)?;
    w.write_record(&t.columns).map_err(csv_err)?;
    for row in &t.rows {
        // shortest round-trip form, identical across runs
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> RunError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => RunError::Io(e),
        k => RunError::Config(format!("csv: {k:?}")),
    }
}

pub fn manifest(name: &str, cfg: &Config, seed: u64, reference: bool, r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment = {name}\nseed = {seed}\nreference = {reference}\n");
    let _ = writeln!(s, "# resolved config\n{}", cfg.to_text());
    let _ = writeln!(s, "# csv schemas");
    for t in &r.tables {
        let _ = writeln!(s, "{}.csv: {}", t.name, t.columns.join(","));
    }
    let _ = writeln!(s, "\n# verdicts");
    for v in &r.verdicts {
        let _ = writeln!(s, "{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.criterion, v.detail);
    }
    if !r.notes.is_empty() {
        let _ = writeln!(s, "\n# notes");
        for n in &r.notes {
            let _ = writeln!(s, "{n}");
        }
    }
    s
}

/// gnuplot script, one panel per table, every column against column `x`.
pub fn plot_script(r: &Report) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n");
    for t in &r.tables {
        let _ = writeln!(s, "\nset output '{}.png'", t.name);
        let _ = writeln!(s, "set xlabel '{}'", t.columns[t.x]);
        let _ = writeln!(s, "{}", if t.logscale { "set logscale y" } else { "unset logscale y" });
        let series: Vec<String> = (0..t.columns.len())
            .filter(|&c| c != t.x)
            .map(|c| format!("'{}.csv' using {}:{} with points", t.name, t.x + 1, c + 1))
            .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    s
}

pub fn write_report(dir: &Path, name: &str, cfg: &Config, seed: u64, reference: bool, r: &Report) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    for t in &r.tables {
        write_table(dir, t)?;
    }
    fs::write(dir.join("manifest.txt"), manifest(name, cfg, seed, reference, r))?;
    fs::write(dir.join("plot.gp"), plot_script(r))?;
    Ok(())
}

/// Machine-readable failure record, key = value.
pub fn write_error(dir: &Path, e: &RunError) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let msg = e.to_string().replace('\n', " ");
    fs::write(dir.join("error.txt"), format!("status = error\nkind = {}\ncode = {}\nmessage = {msg}\n", e.kind(), e.exit_code()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_csv_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![0.1, 1e-300]);
        write_table(dir.path(), &t).unwrap();
        let s = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(s, "a,b\n1e-1,1e-300\n");
    }

    #[test]
    fn error_record() {
        let dir = tempfile::tempdir().unwrap();
        write_error(dir.path(), &RunError::Config("bad\nthing".into())).unwrap();
        let s = fs::read_to_string(dir.path().join("error.txt")).unwrap();
        assert!(s.contains("kind = config") && s.contains("code = 2") && s.contains("bad thing"));
    }
}
