use std::fmt;

use thiserror::Error;

use super::effect::{collect_handlers, effect};
use super::store::{FieldKey, HandlerStore, Location, Object, ObjectStore};
use crate::classtable::ClassTable;
use crate::syntax::{Expr, Modifier, Program};
use crate::typecheck::StoreTyping;

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Field,
    Fields,
    Invk,
    New,
    Assign,
    AssignS,
    AssignCont,
    Subscribe,
    Cat,
    Let,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::Field,
        Rule::Fields,
        Rule::Invk,
        Rule::New,
        Rule::Assign,
        Rule::AssignS,
        Rule::AssignCont,
        Rule::Subscribe,
        Rule::Cat,
        Rule::Let,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Field => "R-FIELD",
            Rule::Fields => "R-FIELDS",
            Rule::Invk => "R-INVK",
            Rule::New => "R-NEW",
            Rule::Assign => "R-ASSIGN",
            Rule::AssignS => "R-ASSIGNS",
            Rule::AssignCont => "R-ASSIGNCONT",
            Rule::Subscribe => "R-SUBSCRIBE",
            Rule::Cat => "R-CAT",
            Rule::Let => "R-LET",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Auxiliary observations attached to a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Alloc {
        loc: Location,
        class: String,
    },
    SignalWrite {
        key: FieldKey,
        old: Location,
        new: Location,
    },
    PlainWrite {
        key: FieldKey,
        old: Location,
        new: Location,
    },
    /// Handlers registered directly on an assigned signal, queued by `R-ASSIGNS`.
    HandlerEnqueue {
        key: FieldKey,
        count: usize,
    },
    /// Handlers of the sinks of `key`, released by `R-ASSIGNCONT`.
    SinkEnqueue {
        key: FieldKey,
        sinks: Vec<FieldKey>,
        handlers: Expr,
    },
    SubscribeRegistered {
        key: FieldKey,
        handler: Expr,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepInfo {
    /// 1-based.
    pub index: u64,
    pub rule: Rule,
    pub events: Vec<TraceEvent>,
}

/// σ | μ | e, with Σ and the remaining step budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineState {
    pub handlers: HandlerStore,
    pub store: ObjectStore,
    pub expr: Expr,
    pub store_typing: StoreTyping,
    pub fuel: u64,
    pub steps: u64,
    next_loc: u32,
}

impl MachineState {
    pub fn new(expr: Expr, fuel: u64) -> Self {
        MachineState {
            handlers: HandlerStore::new(),
            store: ObjectStore::new(),
            expr,
            store_typing: StoreTyping::new(),
            fuel,
            steps: 0,
            next_loc: 0,
        }
    }

    /// A state with pre-populated stores. Fresh locations start past the
    /// largest one in `store`.
    pub fn with_stores(
        expr: Expr,
        handlers: HandlerStore,
        store: ObjectStore,
        store_typing: StoreTyping,
        fuel: u64,
    ) -> Self {
        let next_loc = store.locations().map(|l| l.0 + 1).max().unwrap_or(0);
        MachineState {
            handlers,
            store,
            expr,
            store_typing,
            fuel,
            steps: 0,
            next_loc,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.expr, Expr::Loc(_) | Expr::Empty)
    }

    /// Key of the innermost effect brace on the evaluation path.
    pub fn pending_key(&self) -> Option<FieldKey> {
        let mut cur = &self.expr;
        let mut pending = None;
        loop {
            if let Expr::Effect(_, l, f) = cur {
                pending = Some(FieldKey::new(*l, f.clone()));
            }
            match focus(cur) {
                Some(next) => cur = next,
                None => return pending,
            }
        }
    }
}

/// The subterm holding the evaluation-context hole, if `e` is not itself
/// the redex.
fn focus(e: &Expr) -> Option<&Expr> {
    fn first_open(es: &[Expr]) -> Option<&Expr> {
        es.iter().find(|a| !a.is_value())
    }
    match e {
        Expr::Field(r, _) | Expr::Subscribe(r, _, _) => (!r.is_value()).then_some(&**r),
        Expr::Invoke(r, _, args) => {
            if r.is_value() {
                first_open(args)
            } else {
                Some(r)
            }
        }
        Expr::New(_, args) => first_open(args),
        Expr::Assign(r, _, v) => {
            if !r.is_value() {
                Some(r)
            } else {
                (!v.is_value()).then_some(&**v)
            }
        }
        Expr::Seq(a, _) => (**a != Expr::Empty).then_some(&**a),
        Expr::Effect(b, _, _) => (**b != Expr::Empty).then_some(&**b),
        Expr::Let(_, b, _) => (!b.is_value()).then_some(&**b),
        Expr::Var(_) | Expr::Loc(_) | Expr::Empty => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("stuck: {reason} in `{expr}`")]
    Stuck { expr: String, reason: String },
    #[error("fuel exhausted after {steps} steps{}", pending_suffix(.pending))]
    FuelExhausted {
        steps: u64,
        pending: Option<FieldKey>,
    },
}

fn pending_suffix(pending: &Option<FieldKey>) -> String {
    match pending {
        Some(k) => format!(" while propagating {k}"),
        None => String::new(),
    }
}

/// Deliberate faults, for checking that the oracles notice broken rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Mutation {
    #[default]
    None,
    /// `R-FIELDS` returns the initializer without substituting `this`.
    SkipThisSubstitution,
    /// Plain fields take the signal path and vice versa.
    SwapAssignDispatch,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::None,
        Mutation::SkipThisSubstitution,
        Mutation::SwapAssignDispatch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::SkipThisSubstitution => "skip-this-subst",
            Mutation::SwapAssignDispatch => "swap-assign",
        }
    }
}

impl std::str::FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Terminal,
    Stepped(StepInfo),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Terminal,
    FuelExhausted { pending: Option<FieldKey> },
    Stuck { reason: String },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Terminal => "terminal",
            Outcome::FuelExhausted { .. } => "fuel-exhausted",
            Outcome::Stuck { .. } => "stuck",
        }
    }
}

/// Everything a finished (or interrupted) run produced.
#[derive(Debug, Clone)]
pub struct Run {
    pub state: MachineState,
    pub trace: Vec<StepInfo>,
    pub outcome: Outcome,
}

impl Run {
    pub fn into_result(self) -> Result<Run, EvalError> {
        match &self.outcome {
            Outcome::Terminal => Ok(self),
            Outcome::FuelExhausted { pending } => Err(EvalError::FuelExhausted {
                steps: self.state.steps,
                pending: pending.clone(),
            }),
            Outcome::Stuck { reason } => Err(EvalError::Stuck {
                expr: self.state.expr.to_string(),
                reason: reason.clone(),
            }),
        }
    }

    pub fn rule_count(&self, rule: Rule) -> usize {
        self.trace.iter().filter(|s| s.rule == rule).count()
    }
}

struct Stuck(String);

type Reduce = Result<Rule, Stuck>;

#[derive(Debug, Clone, Copy)]
pub struct Machine<'ct> {
    pub ct: &'ct ClassTable,
    pub mutation: Mutation,
}

impl<'ct> Machine<'ct> {
    pub fn new(ct: &'ct ClassTable) -> Self {
        Machine {
            ct,
            mutation: Mutation::None,
        }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    /// Apply exactly one rule to `s`.
    pub fn step(&self, s: &mut MachineState) -> Result<Step, EvalError> {
        if s.is_terminal() {
            return Ok(Step::Terminal);
        }
        if s.fuel == 0 {
            return Err(EvalError::FuelExhausted {
                steps: s.steps,
                pending: s.pending_key(),
            });
        }
        let mut expr = std::mem::replace(&mut s.expr, Expr::Empty);
        let mut events = Vec::new();
        let result = self.reduce(s, &mut expr, &mut events);
        s.expr = expr;
        match result {
            Ok(rule) => {
                s.fuel -= 1;
                s.steps += 1;
                Ok(Step::Stepped(StepInfo {
                    index: s.steps,
                    rule,
                    events,
                }))
            }
            Err(Stuck(reason)) => Err(EvalError::Stuck {
                expr: s.expr.to_string(),
                reason,
            }),
        }
    }

    /// Step until terminal, stuck, or out of fuel, calling `observe` after
    /// every step with the new state.
    pub fn run_with(
        &self,
        mut s: MachineState,
        mut observe: impl FnMut(&MachineState, &StepInfo),
    ) -> Run {
        let mut trace = Vec::new();
        loop {
            match self.step(&mut s) {
                Ok(Step::Terminal) => {
                    return Run {
                        state: s,
                        trace,
                        outcome: Outcome::Terminal,
                    }
                }
                Ok(Step::Stepped(info)) => {
                    observe(&s, &info);
                    trace.push(info);
                }
                Err(EvalError::FuelExhausted { pending, .. }) => {
                    return Run {
                        state: s,
                        trace,
                        outcome: Outcome::FuelExhausted { pending },
                    }
                }
                Err(EvalError::Stuck { reason, .. }) => {
                    return Run {
                        state: s,
                        trace,
                        outcome: Outcome::Stuck { reason },
                    }
                }
            }
        }
    }

    pub fn run(&self, s: MachineState) -> Run {
        self.run_with(s, |_, _| {})
    }

    pub fn run_program(&self, p: &Program, fuel: u64) -> Run {
        self.run(MachineState::new(p.main.clone(), fuel))
    }

    fn object(&self, s: &MachineState, l: Location) -> Result<Object, Stuck> {
        s.store
            .get(l)
            .cloned()
            .ok_or_else(|| Stuck(format!("dangling location {l}")))
    }

    fn reduce(&self, s: &mut MachineState, e: &mut Expr, ev: &mut Vec<TraceEvent>) -> Reduce {
        match e {
            Expr::Var(x) => Err(Stuck(format!("free variable `{x}`"))),
            Expr::Loc(_) => Err(Stuck("a location cannot be reduced".into())),
            Expr::Empty => Err(Stuck("the empty expression cannot be reduced".into())),

            Expr::Field(r, f) => {
                let Some(l) = r.as_loc() else {
                    return self.reduce(s, r, ev);
                };
                let (rule, next) = self.read_field(s, l, f)?;
                *e = next;
                Ok(rule)
            }

            Expr::Invoke(r, m, args) => {
                let Some(l) = r.as_loc() else {
                    return self.reduce(s, r, ev);
                };
                if let Some(a) = args.iter_mut().find(|a| !a.is_value()) {
                    return self.reduce(s, a, ev);
                }
                let class = self.object(s, l)?.class;
                let body = self
                    .ct
                    .mbody(m, &class)
                    .ok()
                    .flatten()
                    .ok_or_else(|| Stuck(format!("class `{class}` has no method `{m}`")))?;
                if body.params.len() != args.len() {
                    return Err(Stuck(format!("arity mismatch calling `{m}`")));
                }
                let mut map: Vec<(&str, Expr)> = vec![("this", Expr::Loc(l))];
                map.extend(
                    body.params
                        .iter()
                        .map(|p| p.name.as_str())
                        .zip(args.iter().cloned()),
                );
                *e = body.body.subst(&map);
                Ok(Rule::Invk)
            }

            Expr::New(c, args) => {
                if let Some(a) = args.iter_mut().find(|a| !a.is_value()) {
                    return self.reduce(s, a, ev);
                }
                let arity = self
                    .ct
                    .source(c)
                    .map_err(|_| Stuck(format!("unknown class `{c}`")))?
                    .len();
                if arity != args.len() {
                    return Err(Stuck(format!("arity mismatch constructing `{c}`")));
                }
                let l = Location(s.next_loc);
                s.next_loc += 1;
                let obj = Object {
                    class: c.clone(),
                    args: args.iter().filter_map(Expr::as_loc).collect(),
                };
                s.store.insert(l, obj);
                s.store_typing.insert(l, c.clone());
                ev.push(TraceEvent::Alloc {
                    loc: l,
                    class: c.clone(),
                });
                *e = Expr::Loc(l);
                Ok(Rule::New)
            }

            Expr::Assign(r, f, v) => {
                let Some(l) = r.as_loc() else {
                    return self.reduce(s, r, ev);
                };
                let Some(new) = v.as_loc() else {
                    return self.reduce(s, v, ev);
                };
                let (rule, next) = self.write_field(s, l, f, new, ev)?;
                *e = next;
                Ok(rule)
            }

            Expr::Seq(a, b) => {
                if **a != Expr::Empty {
                    return self.reduce(s, a, ev);
                }
                *e = std::mem::replace(&mut **b, Expr::Empty);
                Ok(Rule::Cat)
            }

            Expr::Subscribe(r, f, h) => {
                let Some(l) = r.as_loc() else {
                    return self.reduce(s, r, ev);
                };
                let key = FieldKey::new(l, f.clone());
                let handler = std::mem::replace(&mut **h, Expr::Empty);
                s.handlers.subscribe(key.clone(), handler.clone());
                ev.push(TraceEvent::SubscribeRegistered { key, handler });
                *e = Expr::Empty;
                Ok(Rule::Subscribe)
            }

            Expr::Effect(body, l, f) => {
                if **body != Expr::Empty {
                    return self.reduce(s, body, ev);
                }
                let key = FieldKey::new(*l, f.clone());
                let sinks = effect(self.ct, &s.store, &key);
                let handlers = collect_handlers(&s.handlers, &sinks);
                ev.push(TraceEvent::SinkEnqueue {
                    key,
                    sinks,
                    handlers: handlers.clone(),
                });
                *e = handlers;
                Ok(Rule::AssignCont)
            }

            Expr::Let(x, bound, body) => {
                let Some(l) = bound.as_loc() else {
                    return self.reduce(s, bound, ev);
                };
                *e = body.subst(&[(x.as_str(), Expr::Loc(l))]);
                Ok(Rule::Let)
            }
        }
    }

    fn read_field(&self, s: &MachineState, l: Location, f: &str) -> Result<(Rule, Expr), Stuck> {
        let obj = self.object(s, l)?;
        let lookup = |r: Result<Option<usize>, _>| r.ok().flatten();
        if let Some(i) = lookup(self.ct.source_index(&obj.class, f)) {
            let v = obj
                .args
                .get(i)
                .copied()
                .ok_or_else(|| Stuck(format!("object {l} is missing field `{f}`")))?;
            return Ok((Rule::Field, Expr::Loc(v)));
        }
        if let Some(i) = lookup(self.ct.composite_index(&obj.class, f)) {
            let init = &self
                .ct
                .composite(&obj.class)
                .map_err(|_| Stuck("".into()))?[i]
                .init;
            let next = match self.mutation {
                Mutation::SkipThisSubstitution => init.clone(),
                _ => init.subst(&[("this", Expr::Loc(l))]),
            };
            return Ok((Rule::Fields, next));
        }
        Err(Stuck(format!("class `{}` has no field `{f}`", obj.class)))
    }

    fn write_field(
        &self,
        s: &mut MachineState,
        l: Location,
        f: &str,
        new: Location,
        ev: &mut Vec<TraceEvent>,
    ) -> Result<(Rule, Expr), Stuck> {
        let obj = self.object(s, l)?;
        let index = self.ct.source_index(&obj.class, f).ok().flatten();
        let Some(i) = index else {
            return Err(Stuck(format!(
                "`{}.{f}` is not an assignable field",
                obj.class
            )));
        };
        let modifier = self.ct.source(&obj.class).map_err(|_| Stuck("".into()))?[i].modifier;
        let signal = match (modifier, self.mutation) {
            (m, Mutation::SwapAssignDispatch) => !m.is_signal(),
            (m, _) => m == Modifier::Signal,
        };
        let old = s
            .store
            .set_arg(l, i, new)
            .ok_or_else(|| Stuck(format!("object {l} is missing field `{f}`")))?;
        let key = FieldKey::new(l, f);
        if signal {
            ev.push(TraceEvent::SignalWrite {
                key: key.clone(),
                old,
                new,
            });
            ev.push(TraceEvent::HandlerEnqueue {
                key: key.clone(),
                count: s.handlers.handlers(&key).len(),
            });
            let pending = s.handlers.get(&key);
            Ok((Rule::AssignS, Expr::effect(pending, l, f)))
        } else {
            ev.push(TraceEvent::PlainWrite { key, old, new });
            Ok((Rule::Assign, Expr::Empty))
        }
    }
}

/// Convenience: run a program's main expression from empty stores.
pub fn run(ct: &ClassTable, p: &Program, fuel: u64) -> Run {
    Machine::new(ct).run_program(p, fuel)
}
