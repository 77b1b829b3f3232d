use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssnewforms"))
}

#[test]
fn level_11_writes_records_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("forms.jsonl");
    let status = bin().args(["level", "11", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let records = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = records.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].contains("\"level\""));
    let report = std::fs::read_to_string(dir.path().join("forms.jsonl.report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 1);
}

#[test]
fn composite_level_is_a_config_error() {
    let status = bin().args(["level", "15"]).output().unwrap().status;
    assert_eq!(status.code(), Some(3));
}

#[test]
fn bad_flag_is_a_config_error() {
    let status = bin().args(["level", "11", "--gmax", "x"]).output().unwrap().status;
    assert_eq!(status.code(), Some(3));
}
