//! Compile and run the C smoke client against the generated header and the
//! static library, proving the ABI from the consumer side.

use std::path::PathBuf;
use std::process::Command;

fn static_lib_path() -> PathBuf {
    // tests run from the target dir of the workspace; walk up from the test
    // executable to the profile directory that holds libskelkit_ffi.a
    let exe = std::env::current_exe().expect("test executable path");
    let mut dir = exe.parent().unwrap().to_path_buf(); // .../target/<profile>/deps
    if dir.ends_with("deps") {
        dir.pop();
    }
    dir.join("libskelkit_ffi.a")
}

#[test]
fn c_smoke_client_compiles_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    let source = manifest.join("tests").join("c_client").join("smoke.c");
    let lib = static_lib_path();
    assert!(
        lib.exists(),
        "static library not found at {} (build the ffi crate first)",
        lib.display()
    );

    let out_dir = std::env::temp_dir().join(format!("skelkit-cclient-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .arg("-lm")
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("invoke cc");
    assert!(
        compile.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().expect("run c client");
    assert!(
        run.status.success(),
        "c client failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("c client ok"));
    std::fs::remove_dir_all(&out_dir).ok();
}
