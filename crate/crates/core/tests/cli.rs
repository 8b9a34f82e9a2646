use std::process::Command;

fn hopf_forge(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hopf-forge"))
        .args(args)
        .env_remove("HOPF_FORGE_CONFIG")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn eval_prints_the_coproduct() {
    let (code, out, _) = hopf_forge(&["eval", "--instance", "shuffle", "delta(w\"ab\")"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "void (x) w\"ab\" + w\"ab\" (x) void + w\"b\" (x) w\"a\"");
}

#[test]
fn eval_json_lists_terms() {
    let (code, out, _) = hopf_forge(&["eval", "--instance", "polynomial", "--format", "json", "S(w\"x\")"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["type"], "element");
    assert_eq!(v["terms"][0]["coeff"], "-1");
    assert_eq!(v["terms"][0]["key"], "x");
}

#[test]
fn undeclared_failure_exits_zero() {
    let (code, out, _) = hopf_forge(&["check", "--instance", "forest", "--bound", "3", "--conditions", "D4"]);
    assert_eq!(code, 0);
    assert!(out.contains("forest D4: fails"), "{out}");
}

#[test]
fn hopf_check_holds_for_graphs() {
    let (code, out, _) = hopf_forge(&["check", "--instance", "graph", "--bound", "2", "--conditions", "hopf"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("graph hopf: holds"), "{out}");
}

#[test]
fn bad_input_exits_two() {
    let (code, _, err) = hopf_forge(&["eval", "--instance", "shuffle", "w\"a\" +"]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error"), "{err}");
    let (code, _, _) = hopf_forge(&["eval", "--instance", "nope", "void"]);
    assert_eq!(code, 2);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("hopf-forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.toml");
    std::fs::write(&path, "instance = \"polynomial\"\nbound = 2\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hopf-forge"))
        .args(["basis"])
        .env("HOPF_FORGE_CONFIG", &path)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "void\nw\"x\"\nw\"xx\"\n");
}
