use std::process::{Command, Output};

fn omega_ft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega-ft"))
        .args(args)
        .env_remove("OMEGA_FT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn transform_of_sinc_abs() {
    let o = omega_ft(&["transform", "--function", "sinc_abs", "--s", "2", "--h0", "0.25", "--levels", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let im: f64 = column(&stdout(&o), "value_im")[0].parse().unwrap();
    assert!((im + 1.0986).abs() < 1e-4, "{im}");
}

#[test]
fn catalog_json_lists_entries() {
    let o = omega_ft(&["catalog", "--list", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let records = v.as_array().unwrap();
    assert!(records.len() >= 10);
    for r in records {
        assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(r["command"], "catalog");
    }
}

#[test]
fn example_integral_agrees() {
    let o = omega_ft(&["example-integral", "--nu", "0.5", "--x", "1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let err: f64 = column(&stdout(&o), "relative_error")[0].parse().unwrap();
    assert!(err < 1e-6);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(omega_ft(&["verify", "kernels"]).status.code(), Some(0));
    assert_eq!(omega_ft(&["verify", "bogus"]).status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_one() {
    for args in [
        &["tabulate", "--function", "nonesuch", "--s", "1"][..],
        &["tabulate", "--function", "gauss", "--min", "0", "--max", "1", "--steps", "0"],
        &["tabulate", "--function", "gauss", "--s", "1", "--tol", "-1"],
        &["tabulate", "--function", "gauss", "--s", "1", "--output", "/nonexistent/dir/out.csv"],
        &["invert", "--function", "gauss", "--family", "dirichlet", "--x", "0"],
        &["no-such-command"],
    ] {
        assert_eq!(omega_ft(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(omega_ft(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        stdout(&omega_ft(&["tabulate", "--function", "sinc_abs", "--min", "-3", "--max", "3", "--steps", "12", "--threads", threads]))
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("4"));
    assert_eq!(one.lines().count(), 14);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let out = dir.path().join("out.json");
    std::fs::write(&config, r#"{"command": "tabulate", "function": "gauss", "s": [1.0], "tol": 1e-6, "format": "json"}"#).unwrap();
    let o = omega_ft(&["run", "--config", config.to_str().unwrap(), "--tol", "1e-12", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let r = &v[0];
    assert_eq!(r["params"]["tol"], 1e-12);
    assert_eq!(r["params"]["function"], "gauss");
    assert!((r["value_re"].as_f64().unwrap() - 1.158450919616096273).abs() < 1e-10);

    std::fs::write(&config, r#"{"command": "tabulate", "functoin": "gauss"}"#).unwrap();
    assert_eq!(omega_ft(&["run", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let o = omega_ft(&["tabulate", "--function", "gauss", "--s", "1"]);
    let v = &column(&stdout(&o), "value_re")[0];
    let mantissa = v.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{v}");
}
