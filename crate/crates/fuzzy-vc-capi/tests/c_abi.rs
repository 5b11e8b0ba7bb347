//! Compiles and runs the C smoke program against the generated header
//! and the staticlib artifact, proving the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

fn target_dir() -> PathBuf {
    // tests run from the crate root; artifacts live in the workspace target.
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let workspace = manifest.parent().and_then(|p| p.parent()).expect("workspace root");
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    workspace.join("target").join(profile)
}

#[test]
fn c_smoke_program_builds_and_passes() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    let source = manifest.join("tests/support/smoke.c");
    let staticlib = target_dir().join("libfuzzy_vc_capi.a");
    assert!(
        staticlib.exists(),
        "staticlib missing at {}; build the crate first",
        staticlib.display()
    );
    let out_dir = target_dir().join("c-abi-smoke");
    std::fs::create_dir_all(&out_dir).expect("create output dir");
    let binary = out_dir.join("smoke");

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-I")
        .arg(&header_dir)
        .arg(staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("c-abi smoke ok"));
}
