use std::process::Command;

use hesslab::cli::run_from;
use hesslab::qpoly::q_factorial_at;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hesslab").chain(args.iter().copied());
    let code = run_from(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    assert!(!out.is_empty(), "no output; stderr: {err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn poincare_methods() {
    let (code, v) = run_json(&[
        "--no-cache",
        "--pretty",
        "poincare",
        "--type",
        "[[3]]",
        "--m",
        "max",
        "--method",
        "closed",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["polynomial"]["t"], "1+2t+t²");
    let (_, v) = run_json(&[
        "--no-cache",
        "--pretty",
        "poincare",
        "--type",
        "[[1],[1],[1]]",
        "--m",
        "max",
        "--method",
        "tymoczko",
    ]);
    assert_eq!(v["polynomial"]["t"], "1+4t+t²");
    let (_, v) = run_json(&[
        "--no-cache",
        "--pretty",
        "poincare",
        "--type",
        "[[2,1],[1]]",
        "--m",
        "full",
    ]);
    assert_eq!(v["polynomial"]["t"], "1+3t+5t²+6t³+5t⁴+3t⁵+t⁶");
    let (code, v) = run_json(&[
        "--no-cache",
        "poincare",
        "--type",
        "[[2],[1]]",
        "--method",
        "all",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["agree"], true);
    assert_eq!(v["routes"]["closed"], v["routes"]["tymoczko"]);
    let (code, _, err) = run(&[
        "--no-cache",
        "poincare",
        "--type",
        "[[3]]",
        "--m",
        "full",
        "--method",
        "closed",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid-input"));
}

#[test]
fn count_and_verify() {
    let (code, v) = run_json(&[
        "--no-cache",
        "count",
        "--type",
        "[[3]]",
        "--m",
        "max",
        "--p",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["total"], 9);
    let (_, v) = run_json(&[
        "--no-cache",
        "count",
        "--type",
        "[[1,1,1]]",
        "--m",
        "2,3,3",
        "--p",
        "3",
    ]);
    assert_eq!(
        v["total"].as_u64().unwrap().to_string(),
        q_factorial_at(3, 3).to_string()
    );
    let (code, _, err) = run(&[
        "--no-cache",
        "count",
        "--type",
        "[[1],[1]] @ [0,3]",
        "--p",
        "3",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("inadmissible"));
    let (code, v) = run_json(&[
        "--no-cache",
        "count",
        "--type",
        "[[1],[1]] @ [0,3]",
        "--p",
        "3",
        "--force",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["admissible"], false);
    let (code, v) = run_json(&[
        "--no-cache",
        "verify",
        "--type",
        "[[2,1],[1]]",
        "--m",
        "sing",
        "--p",
        "5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let (code, _, _) = run(&[
        "--no-cache",
        "verify",
        "--type",
        "[[1],[1]] @ [0,3]",
        "--p",
        "3",
    ]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["--no-cache", "count", "--type", "[[3]]", "--p", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn schubert_classify_euler() {
    let (_, v) = run_json(&["schubert", "s2w0@n=5", "singular"]);
    assert_eq!(v["singular_maximal"], serde_json::json!(["5,2,1,4,3"]));
    let (_, v) = run_json(&["schubert", "5,2,1,4,3", "euler"]);
    assert_eq!(v["euler"], 36);
    let (_, v) = run_json(&["schubert", "id@n=4", "singular"]);
    assert_eq!(v["smooth"], true);
    let (_, v) = run_json(&["classify", "--type", "[[2,1,1]]"]);
    assert_eq!(v["irreducibility"], "reducible");
    let (_, v) = run_json(&["classify", "--type", "[[1,1,1],[1]]"]);
    assert_eq!(v["irreducibility"], "reducible");
    let (_, v) = run_json(&["classify", "--type", "[[2,2]] @ [0]"]);
    assert_eq!(v["irreducibility"], "irreducible");
    assert_eq!(v["singular_locus"]["euler"], 8);
    let (_, v) = run_json(&["euler", "--type", "[[3,1]] @ [0]", "--m", "sing"]);
    assert_eq!(v["euler"], 6);
}

#[test]
fn patch_commands() {
    let (code, v) = run_json(&["--pretty", "patch", "diag(1,0,0)", "I", "det"]);
    assert_eq!(code, 0);
    assert_eq!(v["determinant"]["display"], "z21*z32 - z31");
    let (_, v) = run_json(&["--pretty", "patch", "diag(1,0,0)", "I", "linear"]);
    assert_eq!(v["linear_part"]["display"], "-z31");
    let (_, v) = run_json(&["patch", "diag(1,0,0)", "I", "smooth"]);
    assert_eq!(v["smooth"], true);
    assert_eq!(v["in_sing_candidate"], true);
    let (code, v) = run_json(&["patch", "[[0,1],[0,0]]", "I", "witness"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "failure");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(&path, "{\"rows\": [[0, 1, 0],\n [0, 0, 1],\n [0, 0, 0]]}").unwrap();
    let (_, v) = run_json(&["patch", path.to_str().unwrap(), "I", "report"]);
    assert_eq!(v["smooth"], false);
    std::fs::write(&path, "[[0, 1, 0],\n [0, 0 1],\n [0, 0, 0]]").unwrap();
    let (code, _, err) = run(&["patch", path.to_str().unwrap(), "I", "det"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, err) = run(&["patch", "diag(1,2,3)", "[[1,1,0],[1,1,0],[0,0,1]]", "det"]);
    assert_eq!(code, 2);
    assert!(err.contains("singular"));
    let (code, _, _) = run(&["patch", "diag(1,2,3)", "I", "linear"]);
    assert_eq!(code, 0);
    let (code, _, err) = run(&["patch", "[[0,0,1],[0,0,0],[1,0,0]]", "I", "linear"]);
    assert_eq!(code, 2);
    assert!(err.contains("not-in-variety"));
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "--cache-dir",
        d,
        "count",
        "--type",
        "[[2,1],[1]]",
        "--m",
        "sing",
        "--p",
        "3",
    ];
    let (_, fresh, _) = run(&args);
    let (_, v) = run_json(&["--cache-dir", d, "cache", "list"]);
    assert_eq!(v.as_array().unwrap().len(), 1);
    let (_, cached, _) = run(&args);
    assert_eq!(fresh, cached);
    let (_, uncached, _) = run(&[
        "--no-cache",
        "count",
        "--type",
        "[[2,1],[1]]",
        "--m",
        "sing",
        "--p",
        "3",
    ]);
    assert_eq!(fresh, uncached);

    let interp = [
        "--cache-dir",
        d,
        "poincare",
        "--type",
        "[[2,1]]",
        "--m",
        "sing",
        "--method",
        "census-interp",
    ];
    let (_, a, _) = run(&interp);
    let (_, b, _) = run(&interp);
    assert_eq!(a, b);
    let (_, v) = run_json(&["--cache-dir", d, "cache", "clear"]);
    assert_eq!(v["removed"], 2);
}

#[test]
fn jobs_do_not_change_output() {
    let base = [
        "--no-cache",
        "count",
        "--type",
        "[[2,2]] @ [0]",
        "--m",
        "sing",
        "--p",
        "3",
    ];
    let (_, one, _) = run(&[&["--jobs", "1"], &base[..]].concat());
    let (_, four, _) = run(&[&["--jobs", "4"], &base[..]].concat());
    let (_, default, _) = run(&base);
    assert_eq!(one, four);
    assert_eq!(one, default);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_hesslab");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(exe)
        .env("HESSLAB_CACHE_DIR", dir.path())
        .args(["count", "--type", "[[3]]", "--p", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"total\":9"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let out = Command::new(exe)
        .args([
            "--no-cache",
            "count",
            "--type",
            "[[1],[1]] @ [0,2]",
            "--p",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(exe).args(["bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
