//! Helpers shared by the acceptance suite.

use std::path::PathBuf;
use std::process::Command;

/// The `anonkit` binary from the same target directory. `cargo test
/// --workspace` builds it; testing this package alone does not.
pub fn anonkit_command() -> Command {
    let bin = binary();
    assert!(
        bin.exists(),
        "{} not found; run `cargo test --workspace` or build the anonkit binary first",
        bin.display()
    );
    Command::new(bin)
}

fn binary() -> PathBuf {
    // target/<profile>/deps/<test> -> target/<profile>/anonkit
    let mut path = std::env::current_exe().expect("current exe");
    path.pop();
    if path.ends_with("deps") {
        path.pop();
    }
    path.join(format!("anonkit{}", std::env::consts::EXE_SUFFIX))
}

/// Committed input and expected output files.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
