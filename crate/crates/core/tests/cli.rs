use std::process::Command;

fn gpolytope(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gpolytope")).args(args).output().expect("binary runs")
}

#[test]
fn gn_report() {
    let out = gpolytope(&["gn", "--n", "3", "--r", "0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 0.125);
    assert_eq!(v["params"]["n"], 3);
}

#[test]
fn verify_absorption_passes() {
    let out = gpolytope(&["verify", "absorb", "--n", "6", "--d", "3", "--sigma2", "1", "--samples", "1000000", "--seed", "7"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "PASS");
    assert!(v["z_score"].as_f64().unwrap().abs() < 3.0);
}

#[test]
fn validation_failure_exits_2_with_json_error() {
    let out = gpolytope(&["absorb", "--n", "3", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["exit_code"], 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn report_written_to_file() {
    let dir = std::env::temp_dir().join(format!("gpolytope-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("faces.csv");
    let out = gpolytope(&["faces", "--n", "10", "--d", "3", "--k", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("command,n,d,k,b,tol,value,stderr_est,angle_sum,absorption_form,relative_gap,agree,runtime_ms"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn thread_count_from_environment_does_not_change_values() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gpolytope"))
            .args(["verify", "cone", "--n", "4", "--r", "0.5", "--samples", "50000", "--seed", "3"])
            .env("GPOLYTOPE_THREADS", threads)
            .output()
            .unwrap();
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(run("1"), run("2"));
}
