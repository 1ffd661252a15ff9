use super::corpus;
use super::oracle::{audit, Audit, AuditConfig, Theorem, TheoremReport, Verdict};
use crate::eval::{Location, Mutation, Rule};
use crate::syntax::Expr;
use crate::typecheck::TypeErrorKind;
use crate::{load, LoadError};

/// Step budget for corpus runs. Every terminating corpus program needs far
/// fewer steps; the looping one is cut off here.
pub const CORPUS_FUEL: u64 = 5_000;

/// Audit one corpus program by name.
pub fn audit_named(name: &str, cfg: AuditConfig) -> Audit {
    let src = corpus::get(name).unwrap_or_else(|| panic!("no corpus program `{name}`"));
    let checked =
        load(src).unwrap_or_else(|e| panic!("corpus program `{name}` does not load: {e}"));
    audit(&checked, name, cfg)
}

/// Audit every well-typed corpus program.
pub fn audit_corpus(cfg: AuditConfig) -> Vec<Audit> {
    corpus::PROGRAMS
        .iter()
        .map(|(name, _)| audit_named(name, cfg))
        .collect()
}

fn violation(theorem: Theorem, program: &str, witness: String) -> TheoremReport {
    TheoremReport {
        theorem,
        program: program.to_string(),
        verdict: Verdict::Violation { step: 0, witness },
    }
}

/// A scenario report: the audit's verdict, unless the scenario never
/// exercised the property or a stricter expectation fails.
fn scenario(a: &Audit, t: Theorem, extra: Option<String>) -> TheoremReport {
    let report = a.report(t).clone();
    match extra {
        Some(w) if !report.verdict.is_violation() => violation(t, &report.program, w),
        _ => report,
    }
}

fn plain_silence(mutation: Mutation) -> TheoremReport {
    let cfg = AuditConfig {
        fuel: CORPUS_FUEL,
        mutation,
    };
    let a = audit_named("plain_assign", cfg);
    let assigns = a.rules.get(&Rule::Assign).copied().unwrap_or(0);
    let extra = if assigns < 2 {
        Some(format!("expected 2 plain assignments, saw {assigns}"))
    } else if a.handler_enqueues != 0 || !a.sink_releases.is_empty() {
        Some("handler events were emitted by a program with only plain writes".into())
    } else {
        None
    };
    scenario(&a, Theorem::PlainSilence, extra)
}

fn delivery(mutation: Mutation) -> TheoremReport {
    let cfg = AuditConfig {
        fuel: CORPUS_FUEL,
        mutation,
    };
    let a = audit_named("composite_handler", cfg);
    // zero = @0, t = @1, log = @2; the handler is `log.last = t.doubled`
    let handler = Expr::assign(
        Expr::Loc(Location(2)),
        "last",
        Expr::field(Expr::Loc(Location(1)), "doubled"),
    );
    let released: Vec<&Expr> = a
        .sink_releases
        .iter()
        .filter(|(k, _)| k.loc == Location(1) && k.field == "raw")
        .map(|(_, h)| h)
        .collect();
    let extra = if released != [&handler] {
        Some(format!(
            "expected exactly one release of `{handler}` after @1.raw, saw [{}]",
            released
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        ))
    } else {
        None
    };
    scenario(&a, Theorem::Delivery, extra)
}

fn pull_purity(mutation: Mutation) -> TheoremReport {
    let cfg = AuditConfig {
        fuel: CORPUS_FUEL,
        mutation,
    };
    let a = audit_named("composite_read", cfg);
    let reads = a.rules.get(&Rule::Fields).copied().unwrap_or(0);
    let extra = (reads < 2).then(|| format!("expected at least 2 composite reads, saw {reads}"));
    scenario(&a, Theorem::PullPurity, extra)
}

fn composite_immutability_static() -> TheoremReport {
    let name = "composite_reassign";
    let src = corpus::get(name).expect("rejected corpus program");
    match load(src) {
        Err(LoadError::Type(errs))
            if errs
                .iter()
                .any(|e| e.kind == TypeErrorKind::AssignToComposite) =>
        {
            TheoremReport {
                theorem: Theorem::CompositeImmutability,
                program: name.to_string(),
                verdict: Verdict::Pass,
            }
        }
        other => violation(
            Theorem::CompositeImmutability,
            name,
            format!("expected an AssignToComposite rejection, got {other:?}"),
        ),
    }
}

fn composite_immutability_dynamic(mutation: Mutation) -> Vec<TheoremReport> {
    let cfg = AuditConfig {
        fuel: CORPUS_FUEL,
        mutation,
    };
    audit_corpus(cfg)
        .iter()
        .map(|a| a.report(Theorem::CompositeImmutability).clone())
        .collect()
}

/// Dedicated scenarios for the plain-silence, delivery, pull-purity and
/// composite-immutability theorems.
pub fn scenario_suite(mutation: Mutation) -> Vec<TheoremReport> {
    let mut out = vec![
        plain_silence(mutation),
        delivery(mutation),
        pull_purity(mutation),
        composite_immutability_static(),
    ];
    out.extend(composite_immutability_dynamic(mutation));
    out
}
