use std::path::Path;
use std::process::{Command, Output};

fn ltsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_reports_schedule_and_objective() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "a.ltsp", "ltsp 1\nfiles 2\n1\n10\nrequests 6\n0 0\n0 0\n0 0\n0 0\n0 0\n1 0\n");
    let o = ltsp(&["solve", "--algo", "fgs", &inst]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("objective 67"), "{}", stdout(&o));
    let o = ltsp(&["solve", "--algo", "sss", &inst]);
    assert!(stdout(&o).starts_with("schedule {}\n"), "{}", stdout(&o));
}

#[test]
fn simulate_is_repeatable_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("s.ltsp");
    let inst = inst.to_str().unwrap();
    let o = ltsp(&["generate", "--kind", "synthetic", "--files", "30", "--k", "3", "--seed", "4", "-o", inst]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = dir.path().join("t.tsv");
    let a = ltsp(&["simulate", "--policy", "ltfs", "--seed", "7", "--trace", trace.to_str().unwrap(), inst]);
    let b = ltsp(&["simulate", "--policy", "ltfs", "--seed", "7", inst]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let dump = std::fs::read_to_string(trace).unwrap();
    assert!(dump.lines().all(|l| l.split('\t').count() == 3));
}

#[test]
fn adversary_reference_point() {
    let o = ltsp(&["adversary", "--policy", "ltfs", "--k", "10"]);
    assert_eq!(stdout(&o), "alg_cost 1200\nreference_cost 210\nratio 5.7143\n");
}

#[test]
fn exit_codes() {
    let o = ltsp(&["solve", "--algo", "bogus", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "a.ltsp", "ltsp 1\nfiles 1\n3\nrequests 1\n0 0\n");
    let o = ltsp(&["solve", "--algo", "bogus", &inst]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    let o = ltsp(&["solve", "--wat"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ltsp(&["generate", "--kind", "nope", "-o", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
}

#[test]
fn bench_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.cfg",
        "configurations = 40-1, 40-3\ninstances = 6\nseed = 9\nalgorithms = off-ltfs-plus, sss, fgs, ltfs-plus, replan-fgs\nbaseline = off-ltfs-plus\nparallelism = 2\n",
    );
    let out1 = dir.path().join("o1");
    let out2 = dir.path().join("o2");
    for out in [&out1, &out2] {
        let o = ltsp(&["bench", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["relative.csv", "relative.md", "pairs.csv"] {
        let a = std::fs::read(out1.join(f)).unwrap();
        assert_eq!(a, std::fs::read(out2.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(out1.join("relative.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().starts_with("100.00")));
}
