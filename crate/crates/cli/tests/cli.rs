use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn tracemon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracemon")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tracemon"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn slice_single_instance() {
    let trace = fixture("three_params.trace");
    let out = tracemon(&["slice", "--trace", path(&trace), "--instance", "a=a1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "e1 e5 e6 e11\n");
    let out = tracemon(&["slice", "--trace", path(&trace), "--instance", "c=c1,a=a1,b=b2"]);
    assert_eq!(stdout(&out), "e1 e5 e6 e8 e11\n");
}

#[test]
fn slice_all_instances() {
    let out = tracemon(&["slice", "--trace", path(&fixture("three_params.trace"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[0], "\te6 e11");
    assert!(lines.contains(&"a=a2,b=b1,c=c1\te2 e3 e4 e6 e7 e8 e9 e11"));
    assert!(lines.contains(&"a=a2,c=c1\te2 e6 e8 e9 e11"));
}

#[test]
fn slice_reads_stdin() {
    let out = with_stdin(&["slice", "--trace", "-", "--instance", "a=a2"], &std::fs::read(fixture("three_params.trace")).unwrap());
    assert_eq!(stdout(&out), "e2 e6 e11\n");
    let out = with_stdin(&["slice", "--trace", "-"], b"");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "\t\n");
}

#[test]
fn engines_print_identical_reports() {
    let spec = fixture("acqrel.spec");
    let trace = fixture("acqrel.trace");
    let b = tracemon(&["monitor", "--spec", path(&spec), "--trace", path(&trace), "--algo", "b"]);
    let c = tracemon(&["monitor", "--spec", path(&spec), "--trace", path(&trace), "--algo", "c"]);
    assert_eq!(b.status.code(), Some(3));
    assert_eq!(c.status.code(), Some(3));
    assert_eq!(b.stdout, c.stdout);
    assert_eq!(stdout(&c), "6\tfail\tr=r2\tend\n");
}

#[test]
fn fixture_reports() {
    let cases = [
        ("hasnext.spec", "hasnext.trace", "1\tfail\ti=i1\tnext\n5\tfail\ti=i2\tnext\n"),
        ("unsafeiter.spec", "unsafeiter.trace", "5\tmatch\tc=v1,i=i1\tnext\n"),
        ("balance.spec", "balance.trace", "13\tfail\tl=l2\tend\n"),
        ("ratio.spec", "ratio.trace", "1\t1/1\ts=s1\tok\n2\t1/2\ts=s1\terr\n3\t1/1\ts=s2\tok\n4\t2/3\ts=s1\tok\n"),
    ];
    for (spec, trace, expected) in cases {
        for algo in ["b", "c"] {
            let out = tracemon(&["monitor", "--spec", path(&fixture(spec)), "--trace", path(&fixture(trace)), "--algo", algo]);
            assert_eq!(out.status.code(), Some(3), "{spec} with {algo}");
            assert_eq!(stdout(&out), expected, "{spec} with {algo}");
        }
    }
}

#[test]
fn no_report_exits_zero() {
    let out = with_stdin(
        &["monitor", "--spec", path(&fixture("acqrel.spec")), "--trace", "-"],
        b"begin\nacquire r=r1\nrelease r=r1\nend\n",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_errors_exit_one() {
    let out = with_stdin(&["slice", "--trace", "-"], b"e1 a=a1\nbogus line =\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "property P\nparams: x\nevent a(y)\nmonitor: ratio\n").unwrap();
    let out = tracemon(&["monitor", "--spec", path(&bad), "--trace", path(&fixture("acqrel.trace"))]);
    assert_eq!(out.status.code(), Some(1));
    let out = tracemon(&["slice", "--trace", path(&dir.path().join("missing.trace"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cap_exceeded_exits_two() {
    let out = tracemon(&["slice", "--trace", path(&fixture("three_params.trace")), "--cap", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tracemon(&[
        "monitor",
        "--spec",
        path(&fixture("unsafeiter.spec")),
        "--trace",
        path(&fixture("unsafeiter.trace")),
        "--cap",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selfcheck_summary() {
    let out = tracemon(&["selfcheck", "--seed", "42", "--counts", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok: 1000/1000 A=oracle, 1000/1000 B=C, 1000/1000 C=ref\n");
    let out = tracemon(&["selfcheck", "--seed", "0", "--counts", "1"]);
    assert_eq!(stdout(&out), "ok: 1/1 A=oracle, 1/1 B=C, 1/1 C=ref\n");
}

#[test]
fn selfcheck_mutations_write_counterexamples() {
    for flag in ["skip-join", "no-snapshot"] {
        let dir = tempfile::tempdir().unwrap();
        let out = tracemon(&["selfcheck", "--seed", "42", "--counts", "1000", "--mutate", flag, "--out", path(dir.path())]);
        assert_eq!(out.status.code(), Some(4), "{flag}");
        let spec = std::fs::read_to_string(dir.path().join("counterexample.spec")).unwrap();
        let trace = std::fs::read_to_string(dir.path().join("counterexample.trace")).unwrap();
        assert!(spec.starts_with("property"), "{flag}: {spec}");
        assert!(!trace.is_empty(), "{flag}");
        // The written counterexample is itself valid input.
        let replay = tracemon(&[
            "monitor",
            "--spec",
            path(&dir.path().join("counterexample.spec")),
            "--trace",
            path(&dir.path().join("counterexample.trace")),
        ]);
        assert!(matches!(replay.status.code(), Some(0) | Some(3)), "{flag}");
    }
}

#[test]
fn bench_output() {
    let out = tracemon(&["bench", "--events", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "workload,trace_size,algo,events_per_second,peak_instances,monitor_steps\n");

    let out = tracemon(&["bench", "--events", "2000", "--workload", "iterator"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    let (b, c) = (&rows[0], &rows[1]);
    assert_eq!((b[0], b[1], b[2]), ("iterator", "2000", "b"));
    assert_eq!((c[0], c[1], c[2]), ("iterator", "2000", "c"));
    assert_eq!(b[4], c[4]);
    assert_eq!(b[5], c[5]);
}
