//! Every example builds (cargo test compiles them) and runs to completion.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 7] = [
    "operator_algebra",
    "classify_catalog",
    "cauchy_duals",
    "structure_suite",
    "kernel_model",
    "spectrum_bounds",
    "run_config",
];

fn example_path(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|deps| deps.parent()).unwrap();
    profile_dir.join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

#[test]
fn examples_run() {
    for name in EXAMPLES {
        let path = example_path(name);
        assert!(path.exists(), "{} was not built", path.display());
        let out = Command::new(&path).output().unwrap();
        assert!(out.status.success(), "{name} failed:\n{}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}
