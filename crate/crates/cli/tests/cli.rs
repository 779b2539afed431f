use std::path::PathBuf;
use std::process::{Command, Output};

fn shimura(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shimura"))
        .args(args)
        .env_remove("SHIMURA_GOLDEN_PATH")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or("").to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shimura-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn signature_over_q() {
    let o = shimura(&["signature", "--dF", "1", "--D", "26", "--N", "1"]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "(2;-)");
    assert!(stdout(&o).contains("area = 2"));

    let o = shimura(&["signature", "--dF", "1", "--D", "1", "--N", "11"]);
    assert_eq!(first_line(&o), "(1;-;2)");

    let o = shimura(&["signature", "--dF", "1", "--D", "6", "--N", "5"]);
    assert_eq!(first_line(&o), "(1;2^4)");
}

#[test]
fn signature_json() {
    let o = shimura(&["signature", "--dF", "5", "--D", "4", "--N", "1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["signature"], "(0;2,5^2)");
    assert_eq!(v["genus"], 0);
}

#[test]
fn ambiguous_level_needs_label() {
    let o = shimura(&["signature", "--dF", "8", "--D", "2", "--N", "49"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("(1;3^8)") && err.contains("(2;3^4)"), "{err}");

    let o = shimura(&["signature", "--dF", "8", "--D", "2", "--N", "49", "--label", "square"]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "(2;3^4)");
    let o = shimura(&["signature", "--dF", "8", "--D", "2", "--N", "49", "--label", "rational"]);
    assert_eq!(first_line(&o), "(1;3^8)");
}

#[test]
fn input_errors_exit_2() {
    for args in [
        ["signature", "--dF", "6", "--D", "1", "--N", "1"],
        ["signature", "--dF", "5", "--D", "1", "--N", "1"],
        ["signature", "--dF", "1", "--D", "4", "--N", "1"],
        ["lookup", "--dF", "1", "--D", "27", "--N", "1"],
    ] {
        let o = shimura(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"));
    }
}

#[test]
fn verify_exit_codes() {
    let o = shimura(&["verify", "--degree", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 missing, 0 extra"));

    let o = shimura(&["verify", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("d_F=13 D=36 N=1 (1;2^4)"));
}

#[test]
fn verify_report_file() {
    let path = scratch("report.json");
    let o = shimura(&["verify", "--degree", "1", "--format", "json", "--report", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["missing"].as_array().unwrap().len(), 0);
}

#[test]
fn scan_fields_summary() {
    let o = shimura(&["scan-fields"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("257 fields, min 5, max 853"));

    let o = shimura(&["scan-fields", "--show-bound"]);
    let out = stdout(&o);
    assert!(out.contains("29.216") && out.contains("13.949"), "{out}");
}

#[test]
fn lookup_bundled_rows() {
    let o = shimura(&["lookup", "--dF", "49", "--D", "1", "--N", "27"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(1;3)"));

    let o = shimura(&["lookup", "--dF", "8", "--D", "2", "--N", "49"]);
    let out = stdout(&o);
    assert!(out.contains("(1;3^8)") && out.contains("(2;3^4)"), "{out}");
}

#[test]
fn golden_override() {
    let path = scratch("golden.csv");
    std::fs::write(
        &path,
        "degree,d_F,field_index,D,N,ideal_label,signature,genus\n1,1,0,26,1,,(2;-),2\n",
    )
    .unwrap();
    let o = shimura(&["lookup", "--dF", "1", "--D", "26", "--N", "1", "--golden", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = shimura(&["lookup", "--dF", "1", "--D", "6", "--N", "1", "--golden", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_shimura"))
        .args(["lookup", "--dF", "1", "--D", "6", "--N", "1"])
        .env("SHIMURA_GOLDEN_PATH", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let bad = scratch("bad.csv");
    std::fs::write(&bad, "not,a,table\n").unwrap();
    let o = shimura(&["lookup", "--dF", "1", "--D", "26", "--N", "1", "--golden", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn enumerate_matches_bundled_csv_format() {
    let o = shimura(&["enumerate", "--degree", "2", "--dF", "5", "--genus", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("degree,d_F,field_index,D,N,ideal_label,signature,genus"));
    assert_eq!(lines.next(), Some("2,5,0,4,1,,\"(0;2,5^2)\",0"));
    assert_eq!(out.lines().count(), 12);
}

#[test]
fn enumerate_output_file_and_jobs_are_deterministic() {
    let base = ["enumerate", "--degree", "2", "--all-fields", "--genus", "2"];
    let one = shimura(&[&base[..], &["--jobs", "1"]].concat());
    let four = shimura(&[&base[..], &["--jobs", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);

    let path = scratch("enum.csv");
    let o = shimura(&[&base[..], &["--jobs", "3", "-o", path.to_str().unwrap()]].concat());
    assert!(o.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), one.stdout);
}
