use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zetalab(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetalab"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .env_remove("ZETALAB_CACHE")
        .output()
        .expect("spawn zetalab")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn zero_shift_gives_zero_statistic() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&zetalab(dir.path(), &["meansq-delta", "--T", "1e4", "--U", "0"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[6], "0");
}

#[test]
fn warm_cache_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let args = ["meansq-i1", "--T", "3000", "--G", "12", "--out", out.to_str().unwrap()];
    stdout(&zetalab(&dir.path().join("cache"), &args));
    let cold = fs::read(&out).unwrap();
    let grids = fs::read_dir(dir.path().join("cache")).unwrap().count();
    stdout(&zetalab(&dir.path().join("cache"), &args));
    assert_eq!(fs::read(&out).unwrap(), cold);
    assert_eq!(fs::read_dir(dir.path().join("cache")).unwrap().count(), grids);
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let missing = zetalab(dir.path(), &["meansq-i1", "--T", "1e4"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("needs --G"));
    // G above ½√T.
    let wide = zetalab(dir.path(), &["meansq-i1", "--T", "1e4", "--G", "80"]);
    assert_eq!(wide.status.code(), Some(2));
    let unreadable = zetalab(dir.path(), &["report", "--T", "1e5", "--config", "/nonexistent/x.conf"]);
    assert_eq!(unreadable.status.code(), Some(3));
    let blocked = dir.path().join("file");
    fs::write(&blocked, "").unwrap();
    let out = blocked.join("out.csv");
    let unwritable = zetalab(dir.path(), &["report", "--T", "1e5", "--out", out.to_str().unwrap()]);
    assert_eq!(unwritable.status.code(), Some(3));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# budget\nT = 1e5\nG = 100\n").unwrap();
    let c = conf.to_str().unwrap();
    let from_file = stdout(&zetalab(dir.path(), &["report", "--config", c]));
    assert!(from_file.lines().nth(1).unwrap().starts_with("100000,100,"));
    let overridden = stdout(&zetalab(dir.path(), &["report", "--config", c, "--G", "10"]));
    assert!(overridden.lines().nth(1).unwrap().starts_with("100000,10,"));
    fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(zetalab(dir.path(), &["report", "--config", c]).status.code(), Some(2));
}

#[test]
fn cache_gc_evicts_down_to_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    for t in ["100", "200"] {
        stdout(&zetalab(dir.path(), &["sample-zeta", "--T", t, "--H", "1"]));
    }
    let report = stdout(&zetalab(dir.path(), &["cache-gc", "--max-bytes", "0"]));
    assert!(report.contains("scanned 2 grid files: evicted 2"), "{report}");
    let grids = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "zgrid"))
        .count();
    assert_eq!(grids, 0);
}

#[test]
fn fit_theorem1_writes_a_sibling_fit_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ladder.csv");
    let run = zetalab(
        &dir.path().join("cache"),
        &["fit-theorem1", "--T", "3e4", "--out", out.to_str().unwrap()],
    );
    stdout(&run);
    let ladder = fs::read_to_string(&out).unwrap();
    // Five heights times four widths.
    assert_eq!(ladder.lines().count(), 1 + 20);
    let fit = fs::read_to_string(dir.path().join("ladder.fit.csv")).unwrap();
    assert!(fit.starts_with("regressor,c0,c1,c2,c3,residual_norm,condition\n"));
}
