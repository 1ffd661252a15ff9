#![allow(dead_code)]

use fsj_core::classtable::ClassTable;
use std::path::PathBuf;

use fsj_core::eval::{Machine, MachineState, Mutation, Run, StepInfo, TraceFormat, TraceWriter};
use fsj_core::metatheory::corpus;
use fsj_core::syntax::{parse_expr, Expr, TypeName};
use fsj_core::typecheck::{type_expr, StoreTyping, TypeEnv, TypeError, TypeErrorKind};
use fsj_core::{load, Checked};

pub mod rules;

/// A small hierarchy exercising every kind of member.
pub const FIXTURE: &str = "
class A extends Object {
    signal Object c = this.s;
    signal Object s;
    Object p;
    A(Object s, Object p) { super(); this.s = s; this.p = p; }
    Object get() { this.p }
    Unit put(Object o) { this.p = o }
}

class B extends A {
    Object q;
    B(Object s, Object p, Object q) { super(s, p); this.q = q; }
}

unit
";

pub fn fixture() -> ClassTable {
    load(FIXTURE).expect("fixture loads").table
}

pub fn class(name: &str) -> TypeName {
    TypeName::class(name)
}

/// Type `src` under `env` and an empty store typing.
pub fn type_src(ct: &ClassTable, env: &TypeEnv, src: &str) -> Result<TypeName, TypeError> {
    let e = parse_expr(src).unwrap_or_else(|err| panic!("`{src}` does not parse: {err}"));
    type_expr(ct, env, &StoreTyping::new(), &e)
}

pub fn type_rt(
    ct: &ClassTable,
    env: &TypeEnv,
    sigma: &StoreTyping,
    e: &Expr,
) -> Result<TypeName, TypeError> {
    type_expr(ct, env, sigma, e)
}

pub fn expect_kind(r: Result<TypeName, TypeError>, kind: TypeErrorKind) {
    match r {
        Err(e) => assert_eq!(e.kind, kind, "wrong error: {e}"),
        Ok(t) => panic!("expected {kind}, got type {t}"),
    }
}

pub fn corpus_program(name: &str) -> Checked {
    let src = corpus::get(name).unwrap_or_else(|| panic!("no corpus program `{name}`"));
    load(src).unwrap_or_else(|e| panic!("`{name}` does not load: {e}"))
}

/// Run `checked` and collect every step record.
pub fn run_traced(checked: &Checked, fuel: u64, mutation: Mutation) -> (Run, Vec<StepInfo>) {
    let machine = Machine::new(&checked.table).with_mutation(mutation);
    let mut infos = Vec::new();
    let start = MachineState::new(checked.program.main.clone(), fuel);
    let run = machine.run_with(start, |_, info| infos.push(info.clone()));
    (run, infos)
}

/// Depth of a Peano numeral, counted by walking `pred` links by hand.
pub fn count_succ(
    checked: &Checked,
    state: &MachineState,
    mut loc: fsj_core::eval::Location,
) -> Option<usize> {
    let mut n = 0;
    loop {
        let obj = state.store.get(loc)?;
        match obj.class.as_str() {
            "Zero" => return Some(n),
            "Succ" => {
                let idx = checked.table.source_index("Succ", "pred").ok()??;
                loc = obj.args[idx];
                n += 1;
            }
            _ => return None,
        }
    }
}

/// The full trace of a corpus program as the trace writer prints it.
pub fn render_trace(name: &str, format: TraceFormat, mutation: Mutation) -> String {
    let checked = corpus_program(name);
    let mut w = TraceWriter::new(format, Vec::new());
    w.header().unwrap();
    let machine = Machine::new(&checked.table).with_mutation(mutation);
    let start = MachineState::new(checked.program.main.clone(), 10_000);
    let run = machine.run_with(start, |s, info| w.step(s, info).unwrap());
    w.finish(&run.state, &run.outcome).unwrap();
    String::from_utf8(w.into_inner()).unwrap()
}

pub fn golden_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(file)
}
