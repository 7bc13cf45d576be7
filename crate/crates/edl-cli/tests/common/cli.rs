//! Helpers for driving the `edl` binary in tests.

use std::path::Path;
use std::process::{Command, Output};

/// Runs the built binary with the given arguments in the given directory.
pub fn edl_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

pub fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

pub fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Exit code, with a readable panic when the process was killed instead.
pub fn code_of(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}
