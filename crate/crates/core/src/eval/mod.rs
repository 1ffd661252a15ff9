//! Small-step reduction of `σ | μ | e`.
//!
//! The machine picks the unique redex given by the evaluation contexts
//! (receivers before arguments, arguments left to right, never inside a
//! `subscribe` handler or a `let` body) and applies one computation rule.

mod effect;
mod machine;
mod store;
mod trace;

pub use effect::{contains, effect, handlers_of};
pub use machine::{
    run, EvalError, Machine, MachineState, Mutation, Outcome, Rule, Run, Step, StepInfo,
    TraceEvent, DEFAULT_FUEL,
};
pub use store::{FieldKey, HandlerStore, Location, Object, ObjectStore};
pub use trace::{TraceFormat, TraceWriter, TRACE_FORMAT_VERSION};

/// Depth of a `Succ`/`Zero` chain rooted at `loc`: `Zero` is 0 and each
/// `Succ` around its first field adds one. `None` if the object graph at
/// `loc` is not such a chain.
pub fn peano_depth(store: &ObjectStore, loc: Location) -> Option<usize> {
    let mut depth = 0;
    let mut cur = loc;
    while depth <= store.len() {
        let obj = store.get(cur)?;
        match (obj.class.as_str(), obj.args.as_slice()) {
            ("Zero", _) => return Some(depth),
            ("Succ", [pred, ..]) => {
                depth += 1;
                cur = *pred;
            }
            _ => return None,
        }
    }
    None
}
