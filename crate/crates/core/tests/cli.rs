use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_central-leaves");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CENTRAL_LEAVES_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Byte-exact comparison; `UPDATE_GOLDEN=1` rewrites the file instead.
fn golden(name: &str, args: &[&str], code: i32) {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        out.stdout == expected,
        "{name} differs from golden output:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn bg_enum_goldens() {
    golden("bg_enum_5.txt", &["bg-enum", "--n", "5", "--mu", "1,1,0,0,0"], 0);
    golden("bg_enum_5.json", &["bg-enum", "--n", "5", "--mu", "1,1,0,0,0", "--format", "json"], 0);
    golden("bg_enum_5.dot", &["bg-enum", "--n", "5", "--mu", "1,1,0,0,0", "--format", "dot"], 0);
}

#[test]
fn small_enumerations() {
    let rows = |args: &[&str]| {
        let out = run(args);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["classes"].as_array().unwrap().len()
    };
    assert_eq!(rows(&["bg-enum", "--n", "2", "--mu", "1,0", "--format", "json"]), 2);
    assert_eq!(rows(&["bg-enum", "--n", "1", "--mu", "3", "--format", "json"]), 1);
}

#[test]
fn invariant_queries() {
    golden("newton_b2.txt", &["newton", "--preset", "b2"], 0);
    golden("newton_xt_b3_t0.txt", &["newton", "--preset", "xt-b3", "--t", "0"], 0);
    golden("cartan_xpi.txt", &["cartan", "--preset", "xpi"], 0);
}

#[test]
fn witness_goldens() {
    golden("witness_gl3.json", &["witness", "gl3", "--q", "2", "--t", "1", "--format", "json"], 0);
    golden("witness_gl5.json", &["witness", "gl5", "--q", "2", "--t", "1", "--format", "json"], 0);
    golden("witness_gl3_t0.txt", &["witness", "gl3", "--q", "2", "--t", "0"], 0);
    golden("witness_gl5.txt", &["witness", "gl5", "--q", "2", "--t", "1"], 0);
}

#[test]
fn perturb_golden() {
    golden("perturb_seed1.txt", &["perturb", "--d", "1", "--c", "2", "--seed", "1", "--count", "2"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bg-enum", "--n", "3", "--mu", "0,1,0"]).status.code(), Some(3));
    assert_eq!(run(&["newton", "--preset", "xpi"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // Solving only over F_4 itself leaves random perturbations unsolved.
    let out = run(&["perturb", "--seed", "1", "--max-degree", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(BIN)
        .args(["newton", "--preset", "b1", "--out", "nu.txt", "--json", "nu.json"])
        .env("CENTRAL_LEAVES_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("nu.txt")).unwrap();
    assert_eq!(text, "newton_point: (2/5, 2/5, 2/5, 2/5, 2/5)\n");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nu.json")).unwrap()).unwrap();
    assert_eq!(json["value"][0], "2/5");
}
