use std::io::Write;
use std::process::{Command, Output, Stdio};

const PATTERN: &str = "(.*_)?x{[^@_]+@[^@_]+}(_.*)?";
const DOC: &[u8] = b"a_a@b_b@c";

fn docspan(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_docspan"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn spans_from_stdin() {
    let o = docspan(&["-e", PATTERN], DOC);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x:[2,5)\nx:[6,9)\n");
}

#[test]
fn spans_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(DOC).unwrap();
    let o = docspan(&["-e", PATTERN, "-f", f.path().to_str().unwrap(), "--engine", "extended"], b"");
    assert_eq!(stdout(&o), "x:[2,5)\nx:[6,9)\n");
}

#[test]
fn pair_and_json_formats() {
    let o = docspan(&["-e", PATTERN, "--format", "pairs"], DOC);
    assert_eq!(stdout(&o), "(open:x,2) (close:x,5)\n(open:x,6) (close:x,9)\n");
    let o = docspan(&["-e", PATTERN, "--format", "jsonl"], DOC);
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows, vec![serde_json::json!({"x": [2, 5]}), serde_json::json!({"x": [6, 9]})]);
}

#[test]
fn limit_and_count() {
    let o = docspan(&["-e", PATTERN, "--limit", "1"], DOC);
    assert_eq!(stdout(&o), "x:[2,5)\n");
    let o = docspan(&["-e", PATTERN, "--count-only"], DOC);
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn engines_agree_on_capture_free_pattern() {
    let args = ["-e", "GA[CT]", "--synth", "5000", "--seed", "7"];
    let runs: Vec<String> = ["general", "extended", "naive", "oracle"]
        .iter()
        .map(|e| {
            let mut a = args.to_vec();
            a.extend(["--engine", e]);
            let o = docspan(&a, b"");
            assert!(o.status.success(), "{e}");
            stdout(&o)
        })
        .collect();
    assert!(runs[0].lines().count() > 10);
    assert!(runs[0].starts_with("match:["));
    let mut sorted: Vec<Vec<&str>> = runs.iter().map(|r| r.lines().collect()).collect();
    for s in &mut sorted {
        s.sort_unstable();
    }
    assert!(sorted.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn verify_passes() {
    let o = docspan(&["-e", "x{a+}b*y{b}", "--verify"], b"aabb");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "x:[0,2) y:[3,4)\n");
}

#[test]
fn pattern_error_exit_code() {
    let o = docspan(&["-e", "x{a"], DOC);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));
}

#[test]
fn io_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let o = docspan(&["-e", "a", "-f", missing.to_str().unwrap()], b"");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn naive_rejects_captures() {
    let o = docspan(&["-e", "x{a}", "--engine", "naive"], b"a");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_report_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    let o = docspan(
        &["-e", "TTAC.{0,100}CACC", "--synth", "20000", "--bench", "3", "--histogram", hist.to_str().unwrap()],
        b"",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "doc_bytes,pattern,preproc_ms,results,avg_delay_ns,max_delay_ns,dag_bytes,jump_bytes,matrix_bytes"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("20000,\"TTAC.{0,100}CACC\","), "{row}");
    let tail: Vec<&str> = row.rsplit(',').collect();
    let results: u64 = tail[5].parse().unwrap();
    let h = std::fs::read_to_string(&hist).unwrap();
    assert!(h.starts_with("bucket_lower_ns,count\n"));
    let counted: u64 = h.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(counted, results);
}
