use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dpr-bounds"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn bsa_scan_is_byte_stable_and_carries_asymptotes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(&["bsa-scan", "--d-range", "0:25:100", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), std::fs::read(&b).unwrap().as_slice());
    assert!(text.starts_with("# dpr-bounds "));
    assert!(text.contains("# asymptote protocol=COW mu_opt=0.458"));
    assert!(text.contains("# asymptote protocol=DPS mu_opt=0.280"));
    assert!(text.contains("distance_km,t,protocol,mu_opt,rate,chi,saturated"));
    // 5 distances for each of the two protocols.
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 10);
}

#[test]
fn attack_scan_json() {
    let out = run(&[
        "attack-scan", "--protocol", "cow", "--protocol", "cowm2", "--V", "0.95", "--Q", "0,0.01",
        "--format", "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["protocol"], "COW");
    assert_eq!(rows[0]["attack"], "2PA");
    let cow = rows[0]["r0"].as_f64().unwrap();
    let m2 = rows[2]["r0"].as_f64().unwrap();
    assert!(m2 >= cow && cow > 0.0);
}

#[test]
fn infeasible_rows_are_clamped() {
    let out = run(&["attack-scan", "--protocol", "cow", "--V", "0.5", "--Q", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[5].parse::<f64>().unwrap(), 0.0);
    assert!(cols[6].parse::<f64>().unwrap() <= 0.0);
    assert_eq!(cols[9], "false");
}

#[test]
fn rate_vs_distance_notes_regime() {
    let out = run(&["rate-vs-distance", "--protocol", "cow", "--d-range", "0:12:24"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("valid only in the limit of large distances"));
    let rates: Vec<f64> = text
        .lines()
        .filter(|l| l.contains(",COW,2PA,"))
        .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rates.len(), 3);
    // 12 km at 0.25 dB/km is 3 dB.
    assert!((rates[1] / rates[0] - 10f64.powf(-0.3)).abs() < 1e-12);
}

#[test]
fn verify_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = run(&["verify", "--grid", "3", "--trace-points", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["passed"] == true && c["measured"].is_number()));
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS oracle_cow_two_pulse"));
}

#[test]
fn variants_table() {
    let out = run(&["variants", "--d-range", "0:50:50", "--untrusted-device"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["Z_CHANNEL", "ORIGINAL_COW", "COWM1_STYLE", "RANDOM_TRAIN_A_POSTERIORI", "BOB_CHOOSES"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["attack-scan", "--protocol", "bb84"][..],
        &["attack-scan", "--V-range", "1:0:2"],
        &["attack-scan", "--protocol", "cowm2", "--attack", "2pa", "--V", "0.9"],
        &["bsa-scan", "--eta", "1.5"],
        &["no-such-command"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn thread_cap_from_environment() {
    let ok = bin()
        .env("DPR_BOUNDS_THREADS", "1")
        .args(["bsa-scan", "--d-range", "0:50:50"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let bad = bin()
        .env("DPR_BOUNDS_THREADS", "zero")
        .args(["bsa-scan", "--d-range", "0:50:50"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
