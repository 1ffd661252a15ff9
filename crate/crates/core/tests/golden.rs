//! Trace output compared byte-for-byte with checked-in files.
//! Set `FSJ_BLESS=1` to rewrite them.

mod common;

use common::{golden_path, render_trace};
use fsj_core::eval::{Mutation, TraceFormat};

fn compare(name: &str, format: TraceFormat, ext: &str) {
    let path = golden_path(&format!("{name}.{ext}"));
    let got = render_trace(name, format, Mutation::None);
    if std::env::var_os("FSJ_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e} (run with FSJ_BLESS=1)", path.display()));
    if got != want {
        let line = got
            .lines()
            .zip(want.lines())
            .position(|(a, b)| a != b)
            .unwrap_or(got.lines().count().min(want.lines().count()));
        panic!(
            "{} differs from golden output at line {}",
            path.display(),
            line + 1
        );
    }
}

#[test]
fn subscribe_push_text() {
    compare("subscribe_push", TraceFormat::Text, "trace");
}

#[test]
fn subscribe_push_structured() {
    compare("subscribe_push", TraceFormat::Structured, "jsonl");
}

#[test]
fn late_subscribe_text() {
    compare("late_subscribe", TraceFormat::Text, "trace");
}

#[test]
fn composite_handler_text() {
    compare("composite_handler", TraceFormat::Text, "trace");
}
