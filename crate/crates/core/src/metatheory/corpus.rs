//! The curated example programs, embedded at build time.

/// Well-typed programs, by name.
pub const PROGRAMS: &[(&str, &str)] = &[
    ("broadcast", include_str!("../../corpus/broadcast.fsj")),
    ("chain_sinks", include_str!("../../corpus/chain_sinks.fsj")),
    (
        "composite_handler",
        include_str!("../../corpus/composite_handler.fsj"),
    ),
    (
        "composite_read",
        include_str!("../../corpus/composite_read.fsj"),
    ),
    (
        "dynamic_switch",
        include_str!("../../corpus/dynamic_switch.fsj"),
    ),
    ("inheritance", include_str!("../../corpus/inheritance.fsj")),
    (
        "late_subscribe",
        include_str!("../../corpus/late_subscribe.fsj"),
    ),
    (
        "let_shadowing",
        include_str!("../../corpus/let_shadowing.fsj"),
    ),
    (
        "looping_handler",
        include_str!("../../corpus/looping_handler.fsj"),
    ),
    (
        "method_dispatch",
        include_str!("../../corpus/method_dispatch.fsj"),
    ),
    ("nested_push", include_str!("../../corpus/nested_push.fsj")),
    ("peano_pull", include_str!("../../corpus/peano_pull.fsj")),
    (
        "plain_assign",
        include_str!("../../corpus/plain_assign.fsj"),
    ),
    (
        "subscribe_in_method",
        include_str!("../../corpus/subscribe_in_method.fsj"),
    ),
    (
        "subscribe_push",
        include_str!("../../corpus/subscribe_push.fsj"),
    ),
    ("thermostat", include_str!("../../corpus/thermostat.fsj")),
    ("unit_main", include_str!("../../corpus/unit_main.fsj")),
];

/// Programs that must be rejected by the type checker.
pub const REJECTED: &[(&str, &str)] = &[(
    "composite_reassign",
    include_str!("../../corpus/rejected/composite_reassign.fsj"),
)];

pub fn get(name: &str) -> Option<&'static str> {
    PROGRAMS
        .iter()
        .chain(REJECTED)
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
}
