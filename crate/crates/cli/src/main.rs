use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fsj_core::eval::{
    peano_depth, Machine, MachineState, Mutation, Outcome, TraceFormat, TraceWriter, DEFAULT_FUEL,
};
use fsj_core::metatheory::{run_campaign, CampaignConfig, GenConfig, DEFAULT_CAMPAIGN_FUEL};
use fsj_core::{load, with_deep_stack, Checked, LoadError};

const EXIT_OK: u8 = 0;
const EXIT_SEMANTIC: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FUEL: u8 = 3;
const EXIT_STUCK: u8 = 4;

/// Type-check, run, trace and audit Featherweight SignalJ programs.
///
/// Exit status: 0 success, 1 type error or theorem violation, 2 parse or
/// I/O error, 3 step budget exhausted, 4 evaluation stuck.
#[derive(Debug, Parser)]
#[command(name = "fsj", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Type-check one or more .fsj files.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Run a program and print a summary of the final state.
    Run {
        path: PathBuf,
        /// Maximum number of reduction steps.
        #[arg(long, env = "FSJ_FUEL", default_value_t = DEFAULT_FUEL,
              value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[arg(long, hide = true, default_value = "none")]
        mutate: Mutation,
    },
    /// Run a program and print every step and event.
    Trace {
        path: PathBuf,
        #[arg(long, env = "FSJ_FUEL", default_value_t = DEFAULT_FUEL,
              value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// `text` or `structured` (JSON Lines).
        #[arg(long, env = "FSJ_FORMAT", default_value = "text")]
        format: TraceFormat,
        #[arg(long, hide = true, default_value = "none")]
        mutate: Mutation,
    },
    /// Audit randomly generated programs against the soundness theorems.
    Meta {
        #[arg(long, env = "FSJ_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of programs.
        #[arg(long = "n", env = "FSJ_N", default_value_t = 1000,
              value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, env = "FSJ_FUEL", default_value_t = DEFAULT_CAMPAIGN_FUEL,
              value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// Upper bound on generated classes.
        #[arg(long, default_value_t = GenConfig::default().max_classes)]
        max_classes: usize,
        /// Directory for shrunk witnesses of violations.
        #[arg(long, default_value = "fsj-witnesses")]
        out: PathBuf,
        /// Print only the summary.
        #[arg(long)]
        quiet: bool,
        #[arg(long, hide = true, default_value = "none")]
        mutate: Mutation,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(with_deep_stack(move || dispatch(cli.command)))
}

fn dispatch(cmd: Command) -> u8 {
    match cmd {
        Command::Check { paths } => cmd_check(&paths),
        Command::Run { path, fuel, mutate } => cmd_run(&path, fuel, mutate),
        Command::Trace {
            path,
            fuel,
            format,
            mutate,
        } => cmd_trace(&path, fuel, format, mutate),
        Command::Meta {
            seed,
            n,
            fuel,
            max_classes,
            out,
            quiet,
            mutate,
        } => {
            let cfg = CampaignConfig {
                seed,
                count: n as usize,
                fuel,
                gen: GenConfig {
                    max_classes,
                    ..GenConfig::default()
                },
                mutation: mutate,
                shrink: true,
            };
            cmd_meta(&cfg, &out, quiet)
        }
    }
}

/// Print diagnostics for a failed load and return its exit status.
fn report_load_error(path: &Path, err: &LoadError) -> u8 {
    let p = path.display();
    match err {
        LoadError::Parse(e) => {
            let (line, col) = e.position();
            eprintln!("{p}:{line}:{col}: parse error: {e}");
            EXIT_INPUT
        }
        LoadError::WellFormed(e) => {
            match e.span() {
                Some(s) => eprintln!("{p}:{s}: error: {e}"),
                None => eprintln!("{p}: error: {e}"),
            }
            EXIT_SEMANTIC
        }
        LoadError::Type(errs) => {
            for e in errs {
                eprintln!("{p}:{}: error[{}]: {}", e.span, e.kind, e.message);
            }
            EXIT_SEMANTIC
        }
    }
}

fn load_file(path: &Path) -> Result<Checked, u8> {
    let src = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: cannot read: {e}", path.display());
        EXIT_INPUT
    })?;
    load(&src).map_err(|e| report_load_error(path, &e))
}

fn cmd_check(paths: &[PathBuf]) -> u8 {
    let mut status = EXIT_OK;
    for path in paths {
        match load_file(path) {
            Ok(c) => println!("{}: ok ({})", path.display(), c.main_type),
            Err(code) => status = status.max(code),
        }
    }
    status
}

fn stuck_banner(reason: &str) {
    eprintln!("error: evaluation is stuck: {reason}");
    eprintln!(
        "bug: a well-typed program must never get stuck; this is an interpreter or type checker defect"
    );
}

fn outcome_status(outcome: &Outcome, steps: u64) -> u8 {
    match outcome {
        Outcome::Terminal => EXIT_OK,
        Outcome::FuelExhausted { pending } => {
            match pending {
                Some(k) => eprintln!(
                    "error: fuel exhausted after {steps} steps while propagating {k} (a handler may be re-triggering its own signal)"
                ),
                None => eprintln!("error: fuel exhausted after {steps} steps"),
            }
            EXIT_FUEL
        }
        Outcome::Stuck { reason } => {
            stuck_banner(reason);
            EXIT_STUCK
        }
    }
}

fn cmd_run(path: &Path, fuel: u64, mutation: Mutation) -> u8 {
    let checked = match load_file(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let machine = Machine::new(&checked.table).with_mutation(mutation);
    let run = machine.run_program(&checked.program, fuel);
    let s = &run.state;
    if run.outcome == Outcome::Terminal {
        match s
            .expr
            .as_loc()
            .and_then(|l| peano_depth(&s.store, l).map(|d| (l, d)))
        {
            Some((l, d)) => println!("result: {l} (Succ depth {d})"),
            None => println!("result: {}", s.expr),
        }
    }
    println!("steps: {}", s.steps);
    println!("objects: {}", s.store.len());
    let keys: Vec<String> = s.handlers.keys().map(ToString::to_string).collect();
    println!("handler keys: [{}]", keys.join(", "));
    outcome_status(&run.outcome, s.steps)
}

fn cmd_trace(path: &Path, fuel: u64, format: TraceFormat, mutation: Mutation) -> u8 {
    let checked = match load_file(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let stdout = io::stdout();
    let mut writer = TraceWriter::new(format, BufWriter::new(stdout.lock()));
    let mut io_ok = writer.header().is_ok();
    let machine = Machine::new(&checked.table).with_mutation(mutation);
    let start = MachineState::new(checked.program.main.clone(), fuel);
    let run = machine.run_with(start, |state, info| {
        if io_ok {
            io_ok = writer.step(state, info).is_ok();
        }
    });
    if io_ok {
        let _ = writer.finish(&run.state, &run.outcome);
    }
    let _ = writer.into_inner().flush();
    outcome_status(&run.outcome, run.state.steps)
}

fn cmd_meta(cfg: &CampaignConfig, out: &Path, quiet: bool) -> u8 {
    let report = run_campaign(cfg);
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    if !quiet {
        for line in report.lines() {
            let _ = writeln!(w, "{line}");
        }
    }
    for (seed, why) in &report.generator_failures {
        let _ = writeln!(
            w,
            "seed={seed} generator produced an ill-typed program:\n{why}"
        );
    }
    let rules: Vec<String> = report
        .rule_totals()
        .iter()
        .map(|(r, n)| format!("{r}={n}"))
        .collect();
    let _ = writeln!(
        w,
        "programs={} pass={} fuel={} violations={} generator-failures={}",
        report.outcomes.len(),
        report.passed(),
        report.fuel_exhausted(),
        report.total_violations(),
        report.generator_failures.len()
    );
    let _ = writeln!(w, "rules: {}", rules.join(" "));
    let _ = w.flush();
    drop(w);

    if !report.witnesses.is_empty() {
        if let Err(e) = fs::create_dir_all(out) {
            eprintln!("{}: cannot create witness directory: {e}", out.display());
            return EXIT_INPUT;
        }
        for wit in &report.witnesses {
            let file = out.join(format!("seed-{}-{}.fsj", wit.seed, wit.theorem));
            let text = format!(
                "// {}\n{}",
                wit.report.to_string().replace('\n', " "),
                wit.program
            );
            match fs::write(&file, text) {
                Ok(()) => eprintln!("violation: {} (witness {})", wit.report, file.display()),
                Err(e) => eprintln!("{}: cannot write witness: {e}", file.display()),
            }
        }
    }
    if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_SEMANTIC
    }
}
