//! Featherweight SignalJ: a Featherweight-Java-style calculus with pull-based
//! signals and push-based event handlers.
//!
//! The pipeline is [`syntax::parse_program`] → [`classtable::build_class_table`]
//! → [`typecheck::check_program`] → [`eval::Machine`]. [`load`] runs the
//! first three in one go. [`metatheory`] turns the soundness theorems into
//! executable checks over corpus and generated programs.

pub mod classtable;
pub mod eval;
pub mod metatheory;
pub mod syntax;
pub mod typecheck;

use thiserror::Error;

use classtable::{ClassTable, ClassTableError};
use syntax::{ParseError, Program, TypeName};
use typecheck::TypeError;

/// A program that parsed, has a well-formed class table, and type-checks.
#[derive(Debug, Clone)]
pub struct Checked {
    pub program: Program,
    pub table: ClassTable,
    pub main_type: TypeName,
}

#[derive(Debug, Clone, Error)]
pub enum LoadError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("ill-formed class table: {0}")]
    WellFormed(#[from] ClassTableError),
    #[error("{} type error(s)", .0.len())]
    Type(Vec<TypeError>),
}

/// Parse, build the class table, and type-check.
pub fn load(src: &str) -> Result<Checked, LoadError> {
    check(syntax::parse_program(src)?)
}

/// Build the class table of an already-parsed program and type-check it.
pub fn check(program: Program) -> Result<Checked, LoadError> {
    let table = classtable::build_class_table(&program)?;
    let main_type = typecheck::check_program(&table, &program).map_err(LoadError::Type)?;
    Ok(Checked {
        program,
        table,
        main_type,
    })
}

/// Stack size for [`with_deep_stack`]. Handler loops nest one effect brace
/// per iteration, and every pass over a term recurses through that nesting.
pub const DEEP_STACK_BYTES: usize = 1 << 30;

/// Run `f` on a fresh thread with a large stack and wait for its result.
pub fn with_deep_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(DEEP_STACK_BYTES)
            .spawn_scoped(scope, f)
            .expect("spawn evaluation thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
