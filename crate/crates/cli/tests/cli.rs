use std::process::Command;

fn kakutani(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kakutani")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn seq_strict_half() {
    let (code, out) = kakutani(&["seq", "--eps", "0.5", "--mode", "strict", "--stages", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("m_1 = 11, k_3 = 7"), "{out}");
    let (code, out) = kakutani(&["seq", "--mode", "min", "--stages", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("k = [0,0,2,6,14]"), "{out}");
}

#[test]
fn infeasible_chain_exits_nonzero() {
    let (code, out) = kakutani(&["seq", "--mode", "chain", "--chain", "2,5,12", "--json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["failures"], 1);
    assert!(v["checks"][0]["counterexample"].as_str().unwrap().contains("infeasible"));
}

#[test]
fn stage2_exhaustive() {
    let (code, out) = kakutani(&["verify", "--stage", "2", "--checks", "all", "--exhaustive", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report_version"], 1);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn goodset_auto_is_unique() {
    let (code, out) = kakutani(&["goodset", "--stage", "4", "--chain", "2,6,14", "--parity", "auto", "--sample", "64"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("passing parities [0]"), "{out}");
    assert!(out.contains("[6,8,10]"), "{out}");
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "--stage", "4", "--sample", "16", "--pairs", "8", "--variants", "4", "--lazy", "200", "--seed", "9", "--json"];
    let (c1, a) = kakutani(&args);
    let (c2, b) = kakutani(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn measure_bound_exit_status_follows_failures() {
    let (code, out) = kakutani(&["measure-bound", "--level", "2,0", "--depth", "1", "--sample", "8", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(code == 0, v["failures"] == 0);
    assert_eq!(v["data"]["bound"], "1/12");
    let (code, _) = kakutani(&["measure-bound", "--level", "2,2", "--depth", "0", "--sample", "8"]);
    assert_eq!(code, 0);
}

#[test]
fn window_commands() {
    let dir = std::env::temp_dir().join(format!("kakutani-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.txt");
    let w: String = (777_777u32..777_777 + (1 << 16)).map(|i| if i.count_ones() % 2 == 1 { '1' } else { '0' }).collect();
    std::fs::write(&path, w).unwrap();
    let p = path.to_str().unwrap();
    let (code, out) = kakutani(&["eval-phi", "--window", p, "--max-stage", "4", "--sample", "8", "--json"]);
    assert_eq!(code, 0, "{out}");
    for r in ["-3", "0", "2"] {
        let (code, out) = kakutani(&["orbit-check", "--window", p, "--r", r, "--sample", "8", "--json"]);
        assert_eq!(code, 0, "{out}");
    }
    let (code, _) = kakutani(&["orbit-check", "--window", p, "--r", "100000", "--sample", "8"]);
    assert_eq!(code, 1);
    std::fs::write(&path, "0000000000000000").unwrap();
    let (code, _) = kakutani(&["eval-phi", "--window", p, "--sample", "8"]);
    assert_eq!(code, 1);
}
