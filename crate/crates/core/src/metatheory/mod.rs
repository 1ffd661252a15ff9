//! Executable soundness checks.
//!
//! [`audit`] runs a program once and checks, on every step, preservation of
//! types and store typing, progress, silence of plain assignments, delivery
//! of subscribed handlers, purity of composite reads, and immutability of
//! composite signals. [`generate_program`] and [`run_campaign`] drive the
//! same checks over random well-typed programs.

mod campaign;
pub mod corpus;
mod generate;
mod oracle;
mod scenarios;
mod shrink;

pub use campaign::{
    run_campaign, CampaignConfig, CampaignReport, ProgramOutcome, Witness, DEFAULT_CAMPAIGN_FUEL,
};
pub use generate::{generate_program, GenConfig};
pub use oracle::{
    at_path, audit, brute_force_effect, check_progress, check_store_typing,
    check_subject_reduction, redex_path, Audit, AuditConfig, StoreViolation, Theorem,
    TheoremReport, Verdict,
};
pub use scenarios::{audit_corpus, audit_named, scenario_suite, CORPUS_FUEL};
pub use shrink::{expr_variants, program_variants, shrink};
