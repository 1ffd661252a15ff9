//! Line-oriented and JSON Lines renderings of a run.

use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{json, Value};

use super::machine::{MachineState, Outcome, StepInfo, TraceEvent};
use super::store::FieldKey;

pub const TRACE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    #[default]
    Text,
    Structured,
}

impl FromStr for TraceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(TraceFormat::Text),
            "structured" | "json" => Ok(TraceFormat::Structured),
            other => Err(format!(
                "unknown trace format `{other}` (expected text or structured)"
            )),
        }
    }
}

fn keys(ks: &[FieldKey]) -> String {
    let inner: Vec<String> = ks.iter().map(ToString::to_string).collect();
    format!("[{}]", inner.join(","))
}

fn event_text(step: u64, ev: &TraceEvent) -> String {
    match ev {
        TraceEvent::Alloc { loc, class } => {
            format!("step={step} event=alloc loc={loc} class={class}")
        }
        TraceEvent::SignalWrite { key, old, new } => {
            format!("step={step} event=signal-write key={key} old={old} new={new}")
        }
        TraceEvent::PlainWrite { key, old, new } => {
            format!("step={step} event=plain-write key={key} old={old} new={new}")
        }
        TraceEvent::HandlerEnqueue { key, count } => {
            format!("step={step} event=enqueue key={key} handlers={count}")
        }
        TraceEvent::SinkEnqueue {
            key,
            sinks,
            handlers,
        } => format!(
            "step={step} event=sinks key={key} sinks={} handlers={handlers}",
            keys(sinks)
        ),
        TraceEvent::SubscribeRegistered { key, handler } => {
            format!("step={step} event=subscribe key={key} handler={handler}")
        }
    }
}

fn key_json(k: &FieldKey) -> Value {
    json!({ "loc": k.loc.0, "field": k.field })
}

fn event_json(step: u64, ev: &TraceEvent) -> Value {
    match ev {
        TraceEvent::Alloc { loc, class } => {
            json!({ "kind": "alloc", "step": step, "loc": loc.0, "class": class })
        }
        TraceEvent::SignalWrite { key, old, new } => json!({
            "kind": "signal-write", "step": step, "key": key_json(key), "old": old.0, "new": new.0
        }),
        TraceEvent::PlainWrite { key, old, new } => json!({
            "kind": "plain-write", "step": step, "key": key_json(key), "old": old.0, "new": new.0
        }),
        TraceEvent::HandlerEnqueue { key, count } => json!({
            "kind": "enqueue", "step": step, "key": key_json(key), "handlers": count
        }),
        TraceEvent::SinkEnqueue {
            key,
            sinks,
            handlers,
        } => json!({
            "kind": "sinks",
            "step": step,
            "key": key_json(key),
            "sinks": sinks.iter().map(key_json).collect::<Vec<_>>(),
            "handlers": handlers.to_string(),
        }),
        TraceEvent::SubscribeRegistered { key, handler } => json!({
            "kind": "subscribe", "step": step, "key": key_json(key), "handler": handler.to_string()
        }),
    }
}

/// Streams a run to `out` as it happens.
pub struct TraceWriter<W: Write> {
    format: TraceFormat,
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(format: TraceFormat, out: W) -> Self {
        TraceWriter { format, out }
    }

    pub fn header(&mut self) -> io::Result<()> {
        match self.format {
            TraceFormat::Text => Ok(()),
            TraceFormat::Structured => writeln!(
                self.out,
                "{}",
                json!({ "format": "fsj-trace", "version": TRACE_FORMAT_VERSION })
            ),
        }
    }

    /// One step: the rule line followed by its events. `state` is the state
    /// after the step.
    pub fn step(&mut self, state: &MachineState, info: &StepInfo) -> io::Result<()> {
        let n = info.index;
        match self.format {
            TraceFormat::Text => {
                writeln!(self.out, "step={n} rule={} expr={}", info.rule, state.expr)?;
                for ev in &info.events {
                    writeln!(self.out, "{}", event_text(n, ev))?;
                }
            }
            TraceFormat::Structured => {
                let line = json!({
                    "kind": "step", "step": n, "rule": info.rule.name(), "expr": state.expr.to_string()
                });
                writeln!(self.out, "{line}")?;
                for ev in &info.events {
                    writeln!(self.out, "{}", event_json(n, ev))?;
                }
            }
        }
        Ok(())
    }

    pub fn finish(&mut self, state: &MachineState, outcome: &Outcome) -> io::Result<()> {
        match self.format {
            TraceFormat::Text => {
                write!(self.out, "result={} steps={}", outcome.label(), state.steps)?;
                match outcome {
                    Outcome::Terminal => write!(self.out, " expr={}", state.expr)?,
                    Outcome::FuelExhausted { pending: Some(k) } => {
                        write!(self.out, " pending={k}")?
                    }
                    Outcome::FuelExhausted { pending: None } => {}
                    Outcome::Stuck { reason } => write!(self.out, " reason={reason:?}")?,
                }
                writeln!(self.out)
            }
            TraceFormat::Structured => {
                let mut v = json!({
                    "kind": "result",
                    "outcome": outcome.label(),
                    "steps": state.steps,
                    "expr": state.expr.to_string(),
                });
                match outcome {
                    Outcome::FuelExhausted { pending: Some(k) } => v["pending"] = key_json(k),
                    Outcome::Stuck { reason } => v["reason"] = json!(reason),
                    _ => {}
                }
                writeln!(self.out, "{v}")
            }
        }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
