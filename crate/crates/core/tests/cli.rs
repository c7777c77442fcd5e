use std::fs;
use std::path::Path;

use simul_latency::cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use tempfile::TempDir;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["simul-latency"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn csv_value(report: &str, id: &str, column: &str) -> String {
    let mut lines = report.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == column).unwrap();
    let row = lines.find(|l| l.split(',').next() == Some(id)).unwrap();
    row.split(',').nth(col).unwrap().to_string()
}

const SPEECH: &str = r#"{"id":"s2s","modality":"speech-to-speech","timeline":"ca","source":[{"start":0,"end":750},{"start":1000,"end":1300}],"target":[{"start":1500,"end":2100,"g":1},{"start":2200,"end":2500,"g":2}]}"#;

#[test]
fn simulate_then_eval_reproduces_chunk_al() {
    let dir = TempDir::new().unwrap();
    let traces = path(&dir, "chunk.jsonl");
    let (code, _, err) = call(&[
        "simulate",
        "--strategy",
        "chunk-k",
        "--range",
        "1..20",
        "-o",
        &traces,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, out, _) = call(&["eval", &traces, "--metrics", "al,atd"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 22);
    assert_eq!(csv_value(&out, "chunk-k/k=19", "al"), "9.55");
    assert_eq!(csv_value(&out, "chunk-k/k=20", "al"), "20");
    assert_eq!(csv_value(&out, "chunk-k/k=7", "atd"), "7");
}

#[test]
fn curve_table_is_long_format() {
    let (code, out, _) = call(&[
        "simulate",
        "--strategy",
        "case4",
        "--range",
        "1..20",
        "--curve",
        "--metrics",
        "atd",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "strategy,parameter,metric,value");
    assert_eq!(lines.len(), 21);
    assert_eq!(lines[10], "case4,10,atd,10");
}

#[test]
fn speech_trace_uses_tau() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s2s.jsonl", SPEECH);
    let (code, out, err) = call(&["eval", &f, "--metrics", "atd,start-offset,end-offset"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(csv_value(&out, "s2s", "atd"), "1583.3");
    assert_eq!(csv_value(&out, "s2s", "start-offset"), "1500.0");
    assert_eq!(csv_value(&out, "s2s", "end-offset"), "1200.0");

    // One 750 ms sub-segment instead of three.
    let (_, out, _) = call(&["eval", &f, "--metrics", "atd", "--tau", "1000"]);
    assert_eq!(csv_value(&out, "s2s", "atd"), "1275.0");
}

#[test]
fn incompatible_metric_warns_and_strict_fails() {
    let dir = TempDir::new().unwrap();
    let traces = path(&dir, "w.jsonl");
    call(&[
        "simulate",
        "--strategy",
        "wait-k",
        "--range",
        "3",
        "-o",
        &traces,
    ]);
    let (code, out, err) = call(&["eval", &traces, "--metrics", "al,start-offset"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"));
    assert_eq!(csv_value(&out, "wait-k/k=3", "start-offset"), "");
    let (code, _, _) = call(&["eval", &traces, "--metrics", "al,start-offset", "--strict"]);
    assert_eq!(code, EXIT_DATA);
}

#[test]
fn data_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.jsonl", "");
    let (code, _, err) = call(&["eval", &empty]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("no sessions"));

    let bad = write(&dir, "bad.jsonl", &format!("{SPEECH}\n{{not json\n"));
    let (code, _, err) = call(&["eval", &bad]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("line 2"), "{err}");

    assert_eq!(call(&["eval", &empty, "--metrics", "bleu"]).0, EXIT_USAGE);
    assert_eq!(
        call(&["eval", &empty, "--granularity", "char:0"]).0,
        EXIT_USAGE
    );
    assert_eq!(call(&["eval"]).0, EXIT_USAGE);
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn character_granularity() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "zh.jsonl",
        r#"{"id":"c","modality":"text-to-text","timeline":"steps","source":[{"text":"a"},{"text":"b"}],"target":[{"text":"你好","g":1},{"text":"世界","g":2}]}"#,
    );
    let (_, words, _) = call(&["eval", &f, "--metrics", "atd"]);
    let (_, chars, _) = call(&["eval", &f, "--metrics", "atd", "--granularity", "char:1"]);
    let (_, pairs, _) = call(&["eval", &f, "--metrics", "atd", "--granularity", "char:2"]);
    assert_eq!(csv_value(&words, "c", "atd"), "1");
    assert_eq!(csv_value(&pairs, "c", "atd"), "1");
    assert_eq!(csv_value(&chars, "c", "atd"), "2");
}

#[test]
fn json_report() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s2s.jsonl", SPEECH);
    let (code, out, _) = call(&["eval", &f, "--metrics", "atd", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["sessions"][0]["atd"].as_f64().unwrap() - 4750.0 / 3.0).abs() < 1e-9);
    assert_eq!(v["counts"]["atd"], 1);
}

#[test]
fn evs_and_correlate() {
    let dir = TempDir::new().unwrap();
    let al = write(
        &dir,
        "al.jsonl",
        concat!(
            r#"{"id":"a","links":[{"src":1,"tgt":1,"src_start":1000,"tgt_start":3300,"verified":true}]}"#,
            "\n",
            r#"{"id":"b","links":[{"src":1,"tgt":1,"src_start":0,"tgt_start":500,"verified":false}]}"#,
            "\n",
        ),
    );
    let (code, out, err) = call(&["evs", &al]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv_value(&out, "a", "mean_evs"), "2300.0");
    assert_eq!(csv_value(&out, "b", "mean_evs"), "");
    assert_eq!(csv_value(&out, "b", "mean_auto_evs"), "500.0");
    assert!(err.contains("b: no verified links"));
    assert_eq!(call(&["evs", &al, "--strict"]).0, EXIT_DATA);

    let metrics = write(
        &dir,
        "m.csv",
        "id,atd,start\ns1,1,5\ns2,2,4\ns3,3,3\ns4,4,2\n__corpus__,2.5,3.5\n",
    );
    let evs = write(&dir, "e.csv", "id,mean_evs\ns1,10\ns2,20\ns3,\ns4,40\n");
    let (code, out, _) = call(&[
        "correlate",
        &metrics,
        "--a",
        "atd",
        "--b",
        "mean_evs",
        "--join",
        &evs,
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().nth(1).unwrap(), "atd,mean_evs,1.0000,0.3333,3");
    let (_, out, _) = call(&["correlate", &metrics, "--a", "atd", "--b", "start"]);
    assert!(out.lines().nth(1).unwrap().starts_with("atd,start,-1.0000"));
    assert_eq!(
        call(&["correlate", &metrics, "--a", "atd", "--b", "nope"]).0,
        EXIT_USAGE
    );
}

#[test]
fn concat_pairs_sessions() {
    let dir = TempDir::new().unwrap();
    let traces = path(&dir, "w.jsonl");
    call(&[
        "simulate",
        "--strategy",
        "wait-k",
        "--range",
        "1..3",
        "--src-len",
        "2",
        "--tgt-len",
        "2",
        "-o",
        &traces,
    ]);
    let joined = path(&dir, "joined.jsonl");
    let (code, _, err) = call(&["concat", &traces, "--pairing", "adjacent", "-o", &joined]);
    assert_eq!(code, EXIT_OK, "{err}");
    let body = fs::read_to_string(&joined).unwrap();
    assert_eq!(body.lines().count(), 1);
    assert!(body.contains(r#""id":"wait-k/k=1+wait-k/k=2""#));

    let (_, body, _) = call(&["concat", &traces]);
    assert_eq!(body.lines().count(), 2);

    let one = write(&dir, "one.jsonl", SPEECH);
    assert_eq!(call(&["concat", &one]).0, EXIT_DATA);
    assert!(Path::new(&joined).exists());
}
