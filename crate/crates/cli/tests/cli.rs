use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name)
}

fn fsj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsj"))
        .args(args)
        .env_remove("FSJ_FUEL")
        .env_remove("FSJ_FORMAT")
        .env_remove("FSJ_SEED")
        .env_remove("FSJ_N")
        .output()
        .expect("run fsj")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_accepts_corpus_program() {
    let o = fsj(&["check", path(&corpus("peano_pull.fsj"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ok (Nat)"));
}

#[test]
fn check_reports_composite_assignment_with_position() {
    let file = corpus("rejected/composite_reassign.fsj");
    let o = fsj(&["check", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("error[AssignToComposite]"), "{err}");
    assert!(err.starts_with(&format!("{}:", file.display())), "{err}");
}

#[test]
fn check_missing_file_is_an_input_error() {
    let o = fsj(&["check", "/definitely/not/here.fsj"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_parse_error_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.fsj");
    std::fs::write(
        &file,
        "class A extends Object {\n  A() { super(); }\n  Object m( { this }\n}\nunit",
    )
    .unwrap();
    let o = fsj(&["check", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.fsj:3:"), "{}", stderr(&o));
}

#[test]
fn run_prints_unit_and_peano_depth() {
    let o = fsj(&["run", path(&corpus("unit_main.fsj"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: unit"), "{}", stdout(&o));

    let o = fsj(&["run", path(&corpus("peano_pull.fsj"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(Succ depth 9)"), "{}", stdout(&o));
}

#[test]
fn run_out_of_fuel_names_pending_signal() {
    let o = fsj(&["run", "--fuel", "300", path(&corpus("looping_handler.fsj"))]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(
        err.contains("fuel exhausted after 300 steps while propagating @"),
        "{err}"
    );
}

#[test]
fn fuel_comes_from_environment_and_must_be_positive() {
    let o = Command::new(env!("CARGO_BIN_EXE_fsj"))
        .args(["run", path(&corpus("looping_handler.fsj"))])
        .env("FSJ_FUEL", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("after 50 steps"));

    let o = fsj(&["run", "--fuel", "0", path(&corpus("unit_main.fsj"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_shows_push_then_continuation() {
    let o = fsj(&["trace", path(&corpus("subscribe_push.fsj"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let assigns = out.find("rule=R-ASSIGNS").expect("R-ASSIGNS step");
    let cont = out.find("rule=R-ASSIGNCONT").expect("R-ASSIGNCONT step");
    assert!(assigns < cont);
    assert!(out.contains("event=enqueue key=@1.value handlers=1"));
    assert!(
        out.trim_end().ends_with("result=terminal steps=20 expr=@8"),
        "{out}"
    );
}

#[test]
fn trace_of_one_step_program() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.fsj");
    std::fs::write(&file, "new Object()").unwrap();
    let o = fsj(&["trace", file.to_str().unwrap()]);
    let out = stdout(&o);
    let steps: Vec<&str> = out.lines().filter(|l| l.contains(" rule=")).collect();
    assert_eq!(steps, ["step=1 rule=R-NEW expr=@0"]);
    assert!(out.contains("result=terminal steps=1"));
}

#[test]
fn structured_trace_is_json_lines() {
    let o = fsj(&[
        "trace",
        "--format",
        "structured",
        path(&corpus("unit_main.fsj")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.contains("\"format\":\"fsj-trace\""), "{first}");
    assert!(first.contains("\"version\":1"), "{first}");
    assert!(out.lines().all(|l| l.starts_with('{') && l.ends_with('}')));
}

#[test]
fn meta_small_campaign_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("w");
    let o = fsj(&[
        "meta",
        "--n",
        "20",
        "--seed",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("seed=7 theorem=subject-reduction result="));
    assert!(out.contains("programs=20 "));
    assert!(out.contains("violations=0"));
    assert!(!out_dir.exists());
}

#[test]
fn meta_detects_broken_interpreter_and_writes_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("w");
    let o = fsj(&[
        "meta",
        "--n",
        "20",
        "--quiet",
        "--mutate",
        "skip-this-subst",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let witnesses: Vec<_> = std::fs::read_dir(&out_dir).unwrap().collect();
    assert!(!witnesses.is_empty());
    for w in witnesses {
        let text = std::fs::read_to_string(w.unwrap().path()).unwrap();
        let o = {
            let f = dir.path().join("again.fsj");
            std::fs::write(&f, &text).unwrap();
            fsj(&["check", f.to_str().unwrap()])
        };
        assert_eq!(
            o.status.code(),
            Some(0),
            "witness does not type-check:\n{text}"
        );
    }
}

#[test]
fn stuck_run_prints_bug_banner() {
    let o = fsj(&[
        "run",
        "--mutate",
        "skip-this-subst",
        path(&corpus("composite_read.fsj")),
    ]);
    assert_eq!(o.status.code(), Some(4));
    let err = stderr(&o);
    assert!(
        err.contains("evaluation is stuck: free variable `this`"),
        "{err}"
    );
    assert!(err.contains("bug:"), "{err}");
}
