#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// One manifest line: CLI arguments (file names relative to the fixture
/// directory) and the expected exit code.
pub struct Case {
    pub args: Vec<String>,
    pub expected: i32,
}

pub fn manifest() -> Vec<Case> {
    let text = std::fs::read_to_string(fixtures_dir().join("manifest.txt")).expect("fixture manifest");
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut words: Vec<String> = l.split_whitespace().map(String::from).collect();
            let expected = words.pop().and_then(|w| w.parse().ok()).expect("exit code at end of line");
            let dir = fixtures_dir();
            let args = words
                .into_iter()
                .enumerate()
                .map(|(i, w)| if i == 0 { w } else { dir.join(w).to_string_lossy().into_owned() })
                .collect();
            Case { args, expected }
        })
        .collect()
}

pub fn gerbecalc<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_gerbecalc"))
        .args(args)
        .env_remove("GERBECALC_TOL")
        .output()
        .expect("run gerbecalc")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}
