//! The `guidance` binary, run as a subprocess.

use std::path::Path;
use std::process::{Command, Output};

use guidance::FixtureCorpus;

fn guidance(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guidance"))
        .args(args)
        .current_dir(cwd)
        .env_remove("GUIDANCE_STORE")
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    FixtureCorpus.write_to(&dir.path().join("fixtures")).unwrap();
    dir
}

#[test]
fn resolve_then_validate_own_output() {
    let dir = fixtures();
    let out = guidance(
        &["resolve", "am-profile.yaml", "--store", "fixtures/", "-o", "out.yaml"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let resolved = std::fs::read_to_string(dir.path().join("out.yaml")).unwrap();
    assert!(resolved.contains("name: am-specific"));
    assert!(!resolved.contains("ot-specific"));

    let out = guidance(&["validate", "out.yaml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "0 errors, 0 warnings\n");
}

#[test]
fn json_output_parses() {
    let dir = fixtures();
    for args in [
        &["resolve", "am-profile.yaml", "--store", "fixtures", "--format", "json"][..],
        &["graph", "--store", "fixtures", "--format", "json"],
        &[
            "propagate",
            "--store",
            "fixtures",
            "--changed",
            "csf-id-am.yaml",
            "--format",
            "json",
        ],
    ] {
        let out = guidance(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", text(&out.stderr));
        let _: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    }
}

#[test]
fn store_from_environment() {
    let dir = fixtures();
    let out = Command::new(env!("CARGO_BIN_EXE_guidance"))
        .args(["resolve", "ot-profile.yaml"])
        .current_dir(dir.path())
        .env("GUIDANCE_STORE", dir.path().join("fixtures"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("name: ot-specific"));
}

#[test]
fn validate_with_store_checks_alterations() {
    let dir = fixtures();
    let out = guidance(&["validate", "fixtures/csf-id-am.yaml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).starts_with("0 errors"));

    let out = guidance(
        &["validate", "fixtures/am-profile.yaml", "--store", "fixtures"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));

    // Against the bare catalog the AM removal has nothing to remove.
    let am = std::fs::read_to_string(dir.path().join("fixtures/am-profile.yaml")).unwrap();
    std::fs::write(
        dir.path().join("fixtures/am-direct.yaml"),
        am.replace("source: ot-profile.yaml", "source: csf-id-am.yaml"),
    )
    .unwrap();
    let out = guidance(
        &["validate", "fixtures/am-direct.yaml", "--store", "fixtures"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("1 errors"), "{}", text(&out.stdout));
}

#[test]
fn diff_resolutions() {
    let dir = fixtures();
    std::fs::create_dir(dir.path().join("resolved")).unwrap();
    for (profile, out) in [
        ("ot-profile.yaml", "resolved/ot.yaml"),
        ("am-profile.yaml", "resolved/am.yaml"),
    ] {
        let o = guidance(&["resolve", profile, "--store", "fixtures", "-o", out], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let out = guidance(&["diff", "resolved/ot.yaml", "resolved/am.yaml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), include_str!("golden/ot-am.diff.txt"));
    let out = guidance(
        &["diff", "resolved/am.yaml", "resolved/am.yaml", "--format", "json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"], serde_json::json!([]));
}

#[test]
fn render_to_file() {
    let dir = fixtures();
    let out = guidance(
        &[
            "render",
            "am-profile.yaml",
            "--store",
            "fixtures",
            "--provenance",
            "-o",
            "am.md",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let md = std::fs::read_to_string(dir.path().join("am.md")).unwrap();
    assert!(md.starts_with("# Cybersecurity Framework Additive Manufacturing Profile\n"));
    assert!(md.contains("ID.AM-3/guidance from ot-profile.yaml (layer 1)"));

    // A plain catalog file renders without a store.
    let out = guidance(&["render", "fixtures/csf-id-am.yaml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("## ID.AM\n"));
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = fixtures();
    let am = dir.path().join("fixtures/am-profile.yaml");
    let original = std::fs::read_to_string(&am).unwrap();
    std::fs::write(&am, original.replace("by-name: ot-specific", "by-name: ot-guidance")).unwrap();

    let out = guidance(&["resolve", "am-profile.yaml", "--store", "fixtures"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("id.am-3") && err.contains("by-name ot-guidance"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let out = guidance(
        &["resolve", "am-profile.yaml", "--store", "fixtures", "--lenient"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stderr).contains("warning"));

    std::fs::write(&am, original.replace("source: ot-profile.yaml", "source: missing.yaml")).unwrap();
    let out = guidance(&["resolve", "am-profile.yaml", "--store", "fixtures"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("missing.yaml"));

    std::fs::write(&am, "profile:\n  metadata: {title: x\n").unwrap();
    let out = guidance(&["resolve", "am-profile.yaml", "--store", "fixtures"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("line 3"), "{}", text(&out.stderr));

    assert_eq!(guidance(&["resolve"], dir.path()).status.code(), Some(4));
    assert_eq!(
        guidance(&["render", "x.yaml", "--heading-depth", "9"], dir.path())
            .status
            .code(),
        Some(4)
    );
    assert_eq!(guidance(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn import_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let profile = |source: &str| {
        format!("profile:\n  metadata:\n    title: t\n    version: \"1\"\n  imports:\n    - source: {source}\n")
    };
    std::fs::write(dir.path().join("a.yaml"), profile("b.yaml")).unwrap();
    std::fs::write(dir.path().join("b.yaml"), profile("a.yaml")).unwrap();
    let out = guidance(&["resolve", "a.yaml", "--store", "."], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("a.yaml -> b.yaml -> a.yaml"));
    let out = guidance(&["graph", "--store", "."], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = fixtures();
    let args = ["render", "am-profile.yaml", "--store", "fixtures", "--provenance"];
    assert_eq!(guidance(&args, dir.path()).stdout, guidance(&args, dir.path()).stdout);
}
