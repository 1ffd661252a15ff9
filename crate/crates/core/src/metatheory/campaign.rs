use std::collections::BTreeMap;

use rayon::prelude::*;

use super::generate::{generate_program, GenConfig};
use super::oracle::{audit, AuditConfig, Theorem, TheoremReport, Verdict};
use super::shrink::shrink;
use crate::eval::{Mutation, Rule};
use crate::syntax::Program;
use crate::{check, Checked};

pub const DEFAULT_CAMPAIGN_FUEL: u64 = 2_000;
const SHRINK_BUDGET: usize = 3_000;

#[derive(Debug, Clone, Copy)]
pub struct CampaignConfig {
    pub seed: u64,
    pub count: usize,
    pub fuel: u64,
    pub gen: GenConfig,
    pub mutation: Mutation,
    pub shrink: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            count: 1000,
            fuel: DEFAULT_CAMPAIGN_FUEL,
            gen: GenConfig::default(),
            mutation: Mutation::None,
            shrink: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProgramOutcome {
    pub seed: u64,
    pub reports: Vec<TheoremReport>,
    pub rules: BTreeMap<Rule, usize>,
    pub steps: u64,
}

/// A violating program, shrunk while the same theorem keeps failing.
#[derive(Debug, Clone)]
pub struct Witness {
    pub seed: u64,
    pub theorem: Theorem,
    pub report: TheoremReport,
    pub program: Program,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignReport {
    pub outcomes: Vec<ProgramOutcome>,
    /// Generated programs the checker rejected, with the reason.
    pub generator_failures: Vec<(u64, String)>,
    pub witnesses: Vec<Witness>,
}

impl CampaignReport {
    fn count(&self, t: Theorem, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.outcomes
            .iter()
            .flat_map(|o| &o.reports)
            .filter(|r| r.theorem == t && pred(&r.verdict))
            .count()
    }

    pub fn violations(&self, t: Theorem) -> usize {
        self.count(t, Verdict::is_violation)
    }

    pub fn total_violations(&self) -> usize {
        Theorem::ALL.iter().map(|t| self.violations(*t)).sum()
    }

    /// Programs whose run ended by running out of fuel.
    pub fn fuel_exhausted(&self) -> usize {
        self.count(Theorem::Progress, |v| *v == Verdict::FuelExhausted)
    }

    pub fn passed(&self) -> usize {
        self.count(Theorem::Progress, |v| *v == Verdict::Pass)
    }

    pub fn rule_totals(&self) -> BTreeMap<Rule, usize> {
        let mut out = BTreeMap::new();
        for o in &self.outcomes {
            for (r, n) in &o.rules {
                *out.entry(*r).or_insert(0) += n;
            }
        }
        out
    }

    pub fn is_clean(&self) -> bool {
        self.total_violations() == 0 && self.generator_failures.is_empty()
    }

    /// `seed=<s> theorem=<t> result=<pass|violation|fuel|stuck>` per program
    /// and theorem.
    pub fn lines(&self) -> impl Iterator<Item = String> + '_ {
        self.outcomes.iter().flat_map(|o| {
            o.reports.iter().map(move |r| {
                format!(
                    "seed={} theorem={} result={}",
                    o.seed,
                    r.theorem,
                    r.verdict.label()
                )
            })
        })
    }
}

fn violates(p: &Program, t: Theorem, cfg: AuditConfig) -> bool {
    match check(p.clone()) {
        Ok(checked) => audit(&checked, "shrink", cfg)
            .report(t)
            .verdict
            .is_violation(),
        Err(_) => false,
    }
}

enum One {
    Ran(ProgramOutcome, Option<Witness>),
    Rejected(u64, String),
}

fn run_one(cfg: &CampaignConfig, seed: u64) -> One {
    let program = generate_program(&cfg.gen.with_seed(seed));
    let checked: Checked = match check(program.clone()) {
        Ok(c) => c,
        Err(e) => return One::Rejected(seed, format!("{e:?}\n{program}")),
    };
    let acfg = AuditConfig {
        fuel: cfg.fuel,
        mutation: cfg.mutation,
    };
    let a = audit(&checked, &format!("seed-{seed}"), acfg);
    let witness = a.violations().next().map(|r| {
        let t = r.theorem;
        let small = if cfg.shrink {
            shrink(&program, SHRINK_BUDGET, |p| violates(p, t, acfg))
        } else {
            program.clone()
        };
        Witness {
            seed,
            theorem: t,
            report: r.clone(),
            program: small,
        }
    });
    One::Ran(
        ProgramOutcome {
            seed,
            reports: a.reports,
            rules: a.rules,
            steps: a.final_state.steps,
        },
        witness,
    )
}

/// Generate `count` programs from consecutive seeds and audit each one.
/// Programs run in parallel; results come back in seed order.
pub fn run_campaign(cfg: &CampaignConfig) -> CampaignReport {
    let results: Vec<One> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|i| run_one(cfg, cfg.seed.wrapping_add(i)))
        .collect();
    let mut report = CampaignReport::default();
    for r in results {
        match r {
            One::Ran(o, w) => {
                report.outcomes.push(o);
                report.witnesses.extend(w);
            }
            One::Rejected(seed, why) => report.generator_failures.push((seed, why)),
        }
    }
    report
}
