use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qsprep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsprep")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.json",
        r#"{"method":"fast-rz","n":3,"m":3,"oracle_source":{"random":{"seed":5}},"iterations":2,"engine":"both"}"#,
    );
    let out = dir.path().join("trace.csv");
    let res = qsprep(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("method,"));
    assert_eq!(csv.lines().count(), 4);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn values_source_prints_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.json",
        r#"{"method":"baseline","n":1,"m":3,"oracle_source":{"values":[3,1]},"iterations":1}"#,
    );
    let res = qsprep(&["run", "--config", &config]);
    assert!(res.status.success());
    assert_eq!(String::from_utf8(res.stdout).unwrap().lines().count(), 3);
}

#[test]
fn compare_and_sweep_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let compare = write(
        dir.path(),
        "cmp.json",
        r#"{"method":"baseline","n":4,"m":3,"oracle_source":{"random":{"seed":1}},"iterations":3}"#,
    );
    let res = qsprep(&["compare", "--config", &compare]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(String::from_utf8(res.stdout).unwrap().lines().count(), 4);

    let sweep = write(
        dir.path(),
        "sweep.json",
        r#"{"method":"fast-kickback","n":3,"m":3,"oracle_source":{"random":{"seed":2}},
            "sweep":{"iterations":[0,3]},"seeds":[1,2]}"#,
    );
    let res = qsprep(&["sweep", "--config", &sweep]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(String::from_utf8(res.stdout).unwrap().lines().count(), 9);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "bad.json", r#"{"method":"fast-rz","n":3,"m":3,"bogus":1}"#);
    let res = qsprep(&["run", "--config", &config]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));
}
