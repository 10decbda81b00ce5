use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cocolot(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocolot"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("failed to launch cocolot")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Every file under `dir`, relative path and contents, in path order.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn run_writes_a_complete_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cocolot(&["run", "--limit", "2", "--out", "r"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("ltb_f"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("elapsed"));
    let r = tmp.path().join("r");
    for f in ["config.txt", "metrics.csv", "curves.csv", "events.csv", "counters.csv"] {
        assert!(r.join(f).is_file(), "missing {f}");
    }
    assert_eq!(fs::read_dir(r.join("traces")).unwrap().count(), 2);
    assert_eq!(fs::read_dir(r.join("timelines")).unwrap().count(), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = cocolot(
            &["run", "--suite", "overconfidence", "--seed", "3,4", "--limit", "2", "--out", out],
            tmp.path(),
        );
        assert!(o.status.success());
    }
    let (a, b) = (snapshot(&tmp.path().join("a")), snapshot(&tmp.path().join("b")));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn config_file_and_flags_combine() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("exp.cfg"), "# small run\nvariant = ablation-6\nlimit = 1\nwindow = 3\n").unwrap();
    let o = cocolot(&["run", "--config", "exp.cfg", "--that", "7", "--out", "r"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let echo = fs::read_to_string(tmp.path().join("r/config.txt")).unwrap();
    assert!(echo.contains("variant = ablation-6"));
    assert!(echo.contains("window = 7"));
}

#[test]
fn gen_then_replay_matches_direct_simulation() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cocolot(&["gen", "--limit", "2", "--out", "ds"], tmp.path()).status.success());
    let direct = cocolot(&["run", "--variant", "ablation-3", "--limit", "2", "--out", "d"], tmp.path());
    let replay = cocolot(&["run", "--dataset", "ds", "--variant", "ablation-3", "--out", "p"], tmp.path());
    assert!(direct.status.success() && replay.status.success());
    let lines = |o: &Output| stdout(o).lines().skip(1).map(String::from).collect::<Vec<_>>();
    assert_eq!(lines(&direct), lines(&replay));
}

#[test]
fn replay_rejects_correcting_variants() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cocolot(&["gen", "--limit", "1", "--out", "ds"], tmp.path()).status.success());
    let o = cocolot(&["run", "--dataset", "ds", "--variant", "cocolot-full"], tmp.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot honor"));
}

#[test]
fn score_reproduces_run_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cocolot(&["run", "--limit", "2", "--out", "r"], tmp.path()).status.success());
    let o = cocolot(&["score", "--gt", "r/groundtruth", "--traces", "r/traces", "--out", "s"], tmp.path());
    assert!(o.status.success());
    assert_eq!(
        fs::read(tmp.path().join("r/metrics.csv")).unwrap(),
        fs::read(tmp.path().join("s/metrics.csv")).unwrap()
    );
}

#[test]
fn sweep_writes_one_row_per_window() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cocolot(&["sweep", "--limit", "1", "--windows", "1,5", "--out", "sw"], tmp.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(tmp.path().join("sw/window-5/metrics.csv").is_file());
}

#[test]
fn exit_codes_follow_error_category() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.cfg"), "variant ablation-3\n").unwrap();
    assert_eq!(cocolot(&["run", "--config", "bad.cfg"], tmp.path()).status.code(), Some(3));
    assert_eq!(cocolot(&["run", "--variant", "ablation-42"], tmp.path()).status.code(), Some(4));
    assert_eq!(cocolot(&["run", "--suite", "nowhere"], tmp.path()).status.code(), Some(4));
    assert_eq!(cocolot(&["run", "--set", "window=0"], tmp.path()).status.code(), Some(4));

    fs::create_dir_all(tmp.path().join("gt")).unwrap();
    fs::create_dir_all(tmp.path().join("tr")).unwrap();
    fs::write(tmp.path().join("gt/s.txt"), "0,0,10,10\n").unwrap();
    fs::write(tmp.path().join("tr/s.csv"), "0,0,0,10,10,1\n2,0,0,10,10,1\n").unwrap();
    let o = cocolot(&["score", "--gt", "gt", "--traces", "tr"], tmp.path());
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected frame 1"));
}
