//! Per-step soundness checks over a single run.
//!
//! Everything here is re-derived from the class table, the type checker and
//! the observable machine state; nothing is read back from the interpreter's
//! internals. The redex position, the expected contractum of the
//! propagation rules, and the sink set are all recomputed independently.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::classtable::ClassTable;
use crate::eval::{
    EvalError, FieldKey, HandlerStore, Location, Machine, MachineState, Mutation, ObjectStore,
    Outcome, Rule, Step, TraceEvent,
};
use crate::syntax::{Expr, Modifier, TypeName};
use crate::typecheck::{is_subtype, type_expr, StoreTyping, TypeEnv};
use crate::Checked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// Types are preserved up to subtyping and stores stay well-typed.
    SubjectReduction,
    /// A well-typed non-terminal state always steps.
    Progress,
    /// Assigning a plain field yields `unit` and fires nothing.
    PlainSilence,
    /// Subscribed handlers are released by every dependent update.
    Delivery,
    /// Reading a composite signal leaves all stores untouched.
    PullPurity,
    /// No assignment ever targets a composite signal.
    CompositeImmutability,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::SubjectReduction,
        Theorem::Progress,
        Theorem::PlainSilence,
        Theorem::Delivery,
        Theorem::PullPurity,
        Theorem::CompositeImmutability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::SubjectReduction => "subject-reduction",
            Theorem::Progress => "progress",
            Theorem::PlainSilence => "plain-silence",
            Theorem::Delivery => "delivery",
            Theorem::PullPurity => "pull-purity",
            Theorem::CompositeImmutability => "composite-immutability",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The run was cut off by the step budget before a violation was seen.
    FuelExhausted,
    /// The run got stuck; only a violation for [`Theorem::Progress`].
    Stuck,
    Violation {
        step: u64,
        witness: String,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::FuelExhausted => "fuel",
            Verdict::Stuck => "stuck",
            Verdict::Violation { .. } => "violation",
        }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub program: String,
    pub verdict: Verdict,
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "program={} theorem={} result={}",
            self.program,
            self.theorem,
            self.verdict.label()
        )?;
        if let Verdict::Violation { step, witness } = &self.verdict {
            write!(f, " step={step} witness={witness:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct StoreViolation(pub String);

/// Well-typedness of `μ` against `Σ`, and of every handler in `σ`.
pub fn check_store_typing(
    ct: &ClassTable,
    mu: &ObjectStore,
    sigma: &HandlerStore,
    st: &StoreTyping,
) -> Result<(), StoreViolation> {
    let env = TypeEnv::new();
    for (l, obj) in mu.iter() {
        let Some(declared) = st.get(l) else {
            return Err(StoreViolation(format!(
                "{l} is allocated but has no store type"
            )));
        };
        if declared != obj.class {
            return Err(StoreViolation(format!(
                "{l} holds a `{}` but is typed `{declared}`",
                obj.class
            )));
        }
        let rebuilt = Expr::new_obj(
            obj.class.clone(),
            obj.args.iter().map(|a| Expr::Loc(*a)).collect(),
        );
        match type_expr(ct, &env, st, &rebuilt) {
            Ok(TypeName::Class(c)) if c == declared => {}
            Ok(t) => {
                return Err(StoreViolation(format!(
                    "{l} ↦ {obj} types as `{t}`, not `{declared}`"
                )))
            }
            Err(e) => return Err(StoreViolation(format!("{l} ↦ {obj}: {}", e.message))),
        }
    }
    for (l, c) in st.iter() {
        if !mu.contains(l) {
            return Err(StoreViolation(format!(
                "{l} is typed `{c}` but not allocated"
            )));
        }
    }
    for (key, handlers) in sigma.iter() {
        let Some(class) = st.get(key.loc) else {
            return Err(StoreViolation(format!(
                "handler key {key} names an untyped location"
            )));
        };
        match ct.ftype(class, &key.field) {
            Ok(Some((Modifier::Signal, _))) => {}
            _ => {
                return Err(StoreViolation(format!(
                    "handler key {key} is not a signal of `{class}`"
                )))
            }
        }
        for h in handlers {
            match type_expr(ct, &env, st, h) {
                Ok(TypeName::Unit) => {}
                Ok(t) => {
                    return Err(StoreViolation(format!(
                        "handler `{h}` on {key} has type `{t}`"
                    )))
                }
                Err(e) => {
                    return Err(StoreViolation(format!(
                        "handler `{h}` on {key}: {}",
                        e.message
                    )))
                }
            }
        }
    }
    Ok(())
}

fn children(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Var(_) | Expr::Loc(_) | Expr::Empty => vec![],
        Expr::Field(r, _) => vec![r],
        Expr::Invoke(r, _, args) => std::iter::once(&**r).chain(args.iter()).collect(),
        Expr::New(_, args) => args.iter().collect(),
        Expr::Assign(r, _, v) => vec![r, v],
        Expr::Seq(a, b) => vec![a, b],
        Expr::Subscribe(r, _, h) => vec![r, h],
        Expr::Effect(b, _, _) => vec![b],
        Expr::Let(_, b, body) => vec![b, body],
    }
}

/// Child indices from the root to the unique redex.
pub fn redex_path(e: &Expr) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cur = e;
    loop {
        let open = |x: &Expr| !matches!(x, Expr::Loc(_));
        let next = match cur {
            Expr::Field(r, _) | Expr::Subscribe(r, _, _) | Expr::Let(_, r, _) => {
                open(r).then_some(0)
            }
            Expr::Invoke(r, _, args) => {
                if open(r) {
                    Some(0)
                } else {
                    args.iter().position(open).map(|i| i + 1)
                }
            }
            Expr::New(_, args) => args.iter().position(open),
            Expr::Assign(r, _, v) => {
                if open(r) {
                    Some(0)
                } else {
                    open(v).then_some(1)
                }
            }
            Expr::Seq(a, _) | Expr::Effect(a, _, _) => (**a != Expr::Empty).then_some(0),
            Expr::Var(_) | Expr::Loc(_) | Expr::Empty => None,
        };
        match next {
            Some(i) => {
                path.push(i);
                cur = children(cur)[i];
            }
            None => return path,
        }
    }
}

pub fn at_path<'a>(e: &'a Expr, path: &[usize]) -> Option<&'a Expr> {
    let mut cur = e;
    for &i in path {
        cur = *children(cur).get(i)?;
    }
    Some(cur)
}

/// Sinks of `key` by fixpoint over every (object, composite) pair, using a
/// literal substitution and a plain subtree search.
pub fn brute_force_effect(ct: &ClassTable, mu: &ObjectStore, key: &FieldKey) -> Vec<FieldKey> {
    let mut reached: Vec<(Location, usize, FieldKey)> = Vec::new();
    loop {
        let mut changed = false;
        for (l0, obj) in mu.iter() {
            let Ok(composites) = ct.composite(&obj.class) else {
                continue;
            };
            for (i, c) in composites.iter().enumerate() {
                let candidate = FieldKey::new(l0, c.name.clone());
                if reached.iter().any(|(_, _, k)| *k == candidate) {
                    continue;
                }
                let inst = c.init.subst(&[("this", Expr::Loc(l0))]);
                let reads = |k: &FieldKey| {
                    inst.contains_subexpr(&Expr::field(Expr::Loc(k.loc), k.field.clone()))
                };
                if reads(key) || reached.iter().any(|(_, _, k)| reads(k)) {
                    reached.push((l0, i, candidate));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    reached.sort();
    reached.into_iter().map(|(_, _, k)| k).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    pub fuel: u64,
    pub mutation: Mutation,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            fuel: crate::eval::DEFAULT_FUEL,
            mutation: Mutation::None,
        }
    }
}

/// Result of auditing one run against every theorem.
#[derive(Debug, Clone)]
pub struct Audit {
    pub reports: Vec<TheoremReport>,
    pub outcome: Outcome,
    pub final_state: MachineState,
    pub rules: BTreeMap<Rule, usize>,
    pub handler_enqueues: usize,
    pub sink_releases: Vec<(FieldKey, Expr)>,
}

impl Audit {
    pub fn report(&self, t: Theorem) -> &TheoremReport {
        self.reports
            .iter()
            .find(|r| r.theorem == t)
            .expect("every theorem is reported")
    }

    pub fn violations(&self) -> impl Iterator<Item = &TheoremReport> {
        self.reports.iter().filter(|r| r.verdict.is_violation())
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none()
    }
}

struct Auditor<'a> {
    ct: &'a ClassTable,
    first: BTreeMap<Theorem, (u64, String)>,
    subs: Vec<(FieldKey, Expr)>,
}

impl Auditor<'_> {
    fn fail(&mut self, t: Theorem, step: u64, witness: impl FnOnce() -> String) {
        self.first.entry(t).or_insert_with(|| (step, witness()));
    }

    fn failed(&self, t: Theorem) -> bool {
        self.first.contains_key(&t)
    }
}

fn state_summary(s: &MachineState) -> String {
    let objs: Vec<String> = s.store.iter().map(|(l, o)| format!("{l}={o}")).collect();
    let keys: Vec<String> = s.handlers.keys().map(ToString::to_string).collect();
    format!(
        "expr: {} | store: {{{}}} | handlers: {{{}}}",
        s.expr,
        objs.join(", "),
        keys.join(", ")
    )
}

/// Run a checked program once and check every theorem on every step.
pub fn audit(checked: &Checked, id: &str, cfg: AuditConfig) -> Audit {
    crate::with_deep_stack(|| audit_inner(checked, id, cfg))
}

fn audit_inner(checked: &Checked, id: &str, cfg: AuditConfig) -> Audit {
    let ct = &checked.table;
    let machine = Machine::new(ct).with_mutation(cfg.mutation);
    let mut s = MachineState::new(checked.program.main.clone(), cfg.fuel);
    let mut a = Auditor {
        ct,
        first: BTreeMap::new(),
        subs: Vec::new(),
    };
    let mut prev_ty = checked.main_type.clone();
    let mut rules = BTreeMap::new();
    let mut handler_enqueues = 0;
    let mut sink_releases = Vec::new();

    let outcome =
        loop {
            if s.is_terminal() {
                break Outcome::Terminal;
            }
            let path = redex_path(&s.expr);
            let redex = at_path(&s.expr, &path).cloned().unwrap_or(Expr::Empty);
            let (mu0, sigma0, st0) = (s.store.clone(), s.handlers.clone(), s.store_typing.clone());
            let info = match machine.step(&mut s) {
                Ok(Step::Stepped(info)) => info,
                Ok(Step::Terminal) => break Outcome::Terminal,
                Err(EvalError::FuelExhausted { pending, .. }) => {
                    break Outcome::FuelExhausted { pending }
                }
                Err(EvalError::Stuck { reason, .. }) => {
                    let step = s.steps + 1;
                    a.fail(Theorem::Progress, step, || {
                        format!("{reason}; {}", state_summary(&s))
                    });
                    break Outcome::Stuck { reason };
                }
            };
            let n = info.index;
            *rules.entry(info.rule).or_insert(0) += 1;
            for ev in &info.events {
                match ev {
                    TraceEvent::HandlerEnqueue { .. } => handler_enqueues += 1,
                    TraceEvent::SinkEnqueue { key, handlers, .. } => {
                        sink_releases.push((key.clone(), handlers.clone()))
                    }
                    _ => {}
                }
            }
            let contractum = at_path(&s.expr, &path);

            // preservation
            if !a.failed(Theorem::SubjectReduction) {
                match type_expr(ct, &TypeEnv::new(), &s.store_typing, &s.expr) {
                    Err(e) => a.fail(Theorem::SubjectReduction, n, || {
                        format!(
                            "after {}: ill-typed ({e}); {}",
                            info.rule,
                            state_summary(&s)
                        )
                    }),
                    Ok(ty) => match is_subtype(ct, &ty, &prev_ty) {
                        Ok(true) => prev_ty = ty,
                        _ => a.fail(Theorem::SubjectReduction, n, || {
                            format!(
                                "after {}: type `{ty}` is not a subtype of `{prev_ty}`; {}",
                                info.rule,
                                state_summary(&s)
                            )
                        }),
                    },
                }
                if !st0.is_extended_by(&s.store_typing) {
                    a.fail(Theorem::SubjectReduction, n, || {
                        format!("after {}: store typing shrank or changed", info.rule)
                    });
                }
                if let Err(v) = check_store_typing(ct, &s.store, &s.handlers, &s.store_typing) {
                    a.fail(Theorem::SubjectReduction, n, || {
                        format!("after {}: {v}", info.rule)
                    });
                }
            }

            match &redex {
                Expr::Field(r, f) => {
                    if let (Some(l), Some(obj)) = (r.as_loc(), r.as_loc().and_then(|l| mu0.get(l)))
                    {
                        let init = ct
                            .composite(&obj.class)
                            .ok()
                            .and_then(|cs| cs.iter().find(|c| c.name == *f))
                            .map(|c| c.init.subst(&[("this", Expr::Loc(l))]));
                        if let Some(expected) = init {
                            a.check_pull(n, &expected, contractum, (&mu0, &sigma0, &st0), &s);
                        }
                    }
                }
                Expr::Assign(r, f, v) => {
                    if let (Some(l), Some(v)) = (r.as_loc(), v.as_loc()) {
                        a.check_assign(n, l, f, v, &info.events, contractum, (&mu0, &sigma0), &s);
                    }
                }
                Expr::Subscribe(r, f, h) => {
                    if let Some(l) = r.as_loc() {
                        let key = FieldKey::new(l, f.clone());
                        if s.handlers.handlers(&key).last() != Some(&**h) {
                            a.fail(Theorem::Delivery, n, || {
                                format!("subscribing `{h}` on {key} did not register it last")
                            });
                        }
                        a.subs.push((key, (**h).clone()));
                    }
                }
                Expr::Effect(body, l, f) if **body == Expr::Empty => {
                    let key = FieldKey::new(*l, f.clone());
                    let sinks = brute_force_effect(ct, &mu0, &key);
                    let expected = Expr::seq_all(
                        sinks
                            .iter()
                            .flat_map(|k| a.subs.iter().filter(move |(sk, _)| sk == k))
                            .map(|(_, h)| h.clone()),
                    );
                    if contractum != Some(&expected) {
                        a.fail(Theorem::Delivery, n, || {
                            format!(
                            "propagation of {key} released `{}` but sinks [{}] expect `{expected}`",
                            contractum.map(ToString::to_string).unwrap_or_default(),
                            sinks.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
                        )
                        });
                    }
                }
                _ => {}
            }
        };

    let base = match outcome {
        Outcome::Terminal => Verdict::Pass,
        Outcome::FuelExhausted { .. } => Verdict::FuelExhausted,
        Outcome::Stuck { .. } => Verdict::Stuck,
    };
    let reports = Theorem::ALL
        .into_iter()
        .map(|t| {
            let verdict = match a.first.get(&t) {
                Some((step, witness)) => Verdict::Violation {
                    step: *step,
                    witness: witness.clone(),
                },
                None => base.clone(),
            };
            TheoremReport {
                theorem: t,
                program: id.to_string(),
                verdict,
            }
        })
        .collect();
    Audit {
        reports,
        outcome,
        final_state: s,
        rules,
        handler_enqueues,
        sink_releases,
    }
}

impl Auditor<'_> {
    fn check_pull(
        &mut self,
        n: u64,
        expected: &Expr,
        contractum: Option<&Expr>,
        (mu0, sigma0, st0): (&ObjectStore, &HandlerStore, &StoreTyping),
        s: &MachineState,
    ) {
        if *mu0 != s.store || *sigma0 != s.handlers || *st0 != s.store_typing {
            self.fail(Theorem::PullPurity, n, || {
                format!(
                    "reading a composite changed the stores; {}",
                    state_summary(s)
                )
            });
        }
        if contractum != Some(expected) {
            self.fail(Theorem::PullPurity, n, || {
                format!(
                    "composite read produced `{}`, expected `{expected}`",
                    contractum.map(ToString::to_string).unwrap_or_default()
                )
            });
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn check_assign(
        &mut self,
        n: u64,
        l: Location,
        f: &str,
        v: Location,
        events: &[TraceEvent],
        contractum: Option<&Expr>,
        (mu0, sigma0): (&ObjectStore, &HandlerStore),
        s: &MachineState,
    ) {
        let ct = self.ct;
        let Some(class) = mu0.get(l).map(|o| o.class.clone()) else {
            return;
        };
        let is_composite = ct
            .composite(&class)
            .map(|cs| cs.iter().any(|c| c.name == f))
            .unwrap_or(false);
        if is_composite {
            self.fail(Theorem::CompositeImmutability, n, || {
                format!("assignment to composite {l}.{f} of `{class}`")
            });
            return;
        }
        let Some((i, modifier)) = ct
            .source(&class)
            .ok()
            .and_then(|ss| ss.iter().enumerate().find(|(_, s)| s.name == f))
            .map(|(i, s)| (i, s.modifier))
        else {
            return;
        };
        let written = s.store.get(l).and_then(|o| o.args.get(i)).copied();
        let key = FieldKey::new(l, f);
        match modifier {
            Modifier::Plain => {
                let fired = events.iter().any(|e| {
                    matches!(
                        e,
                        TraceEvent::HandlerEnqueue { .. } | TraceEvent::SinkEnqueue { .. }
                    )
                });
                let problem = if contractum != Some(&Expr::Empty) {
                    Some(format!(
                        "plain assignment to {key} produced `{}` instead of unit",
                        contractum.map(ToString::to_string).unwrap_or_default()
                    ))
                } else if *sigma0 != s.handlers {
                    Some(format!(
                        "plain assignment to {key} changed the handler store"
                    ))
                } else if fired {
                    Some(format!("plain assignment to {key} enqueued handlers"))
                } else if written != Some(v) {
                    Some(format!("plain assignment to {key} did not store {v}"))
                } else {
                    None
                };
                if let Some(p) = problem {
                    self.fail(Theorem::PlainSilence, n, || p);
                }
            }
            Modifier::Signal => {
                let direct = Expr::seq_all(
                    self.subs
                        .iter()
                        .filter(|(k, _)| *k == key)
                        .map(|(_, h)| h.clone()),
                );
                let expected = Expr::effect(direct, l, f);
                if contractum != Some(&expected) || written != Some(v) {
                    self.fail(Theorem::Delivery, n, || {
                        format!(
                            "signal assignment to {key} produced `{}`, expected `{expected}`",
                            contractum.map(ToString::to_string).unwrap_or_default()
                        )
                    });
                }
            }
        }
    }
}

/// Subject reduction over one run.
pub fn check_subject_reduction(checked: &Checked, id: &str, fuel: u64) -> TheoremReport {
    let cfg = AuditConfig {
        fuel,
        mutation: Mutation::None,
    };
    audit(checked, id, cfg)
        .report(Theorem::SubjectReduction)
        .clone()
}

/// Progress over one run.
pub fn check_progress(checked: &Checked, id: &str, fuel: u64) -> TheoremReport {
    let cfg = AuditConfig {
        fuel,
        mutation: Mutation::None,
    };
    audit(checked, id, cfg).report(Theorem::Progress).clone()
}
