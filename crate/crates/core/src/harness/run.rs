use std::fmt;
use std::time::Instant;

use super::trace::{Trace, TraceEvent};
use crate::engine::{DynamicFacilityLocation, UpdateStats};
use crate::error::Result;
use crate::metric::{FacilityId, Instance};
use crate::oracle::{brute_force_opt, checks, compare_states, recompute_state};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fast,
    /// Compare against the from-scratch oracle after every mutation.
    Verified,
    /// `Verified` plus the live invariant checks.
    Audit,
}

/// Counters and timing of one event.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub index: usize,
    pub op: &'static str,
    pub micros: f64,
    pub stats: UpdateStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationFailure {
    pub event_index: usize,
    pub line: usize,
    pub messages: Vec<String>,
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {} (line {}):", self.event_index, self.line)?;
        for m in &self.messages {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    /// One line per query.
    pub outputs: Vec<String>,
    pub records: Vec<EventRecord>,
    pub totals: UpdateStats,
    /// States compared against the oracle.
    pub verified_states: usize,
    pub failure: Option<VerificationFailure>,
}

impl RunReport {
    pub fn is_clean(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn format_solution(open: &[FacilityId]) -> String {
    if open.is_empty() {
        return "-".to_string();
    }
    open.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn run_trace<T: Scalar>(engine: &mut DynamicFacilityLocation<T>, trace: &Trace, mode: Mode) -> Result<RunReport> {
    run_trace_with_hook(engine, trace, mode, |_, _| {})
}

/// Like [`run_trace`]; `hook` sees the engine after every mutation, before
/// verification.
pub fn run_trace_with_hook<T: Scalar>(
    engine: &mut DynamicFacilityLocation<T>,
    trace: &Trace,
    mode: Mode,
    mut hook: impl FnMut(usize, &mut DynamicFacilityLocation<T>),
) -> Result<RunReport> {
    let mut report = RunReport::default();
    for (index, e) in trace.events.iter().enumerate() {
        let start = Instant::now();
        let stats = match e.event {
            TraceEvent::Insert { client, point } => {
                engine.insert_client(client, point)?;
                *engine.last_update()
            }
            TraceEvent::Delete(client) => {
                engine.delete_client(client)?;
                *engine.last_update()
            }
            TraceEvent::CostQuery => {
                report.outputs.push(engine.cost_query().to_string());
                UpdateStats::default()
            }
            TraceEvent::SolutionQuery => {
                report.outputs.push(format_solution(&engine.solution_query()));
                UpdateStats::default()
            }
        };
        let micros = start.elapsed().as_secs_f64() * 1e6;
        report.records.push(EventRecord { index, op: e.event.op(), micros, stats });
        if !e.event.is_mutation() {
            continue;
        }
        hook(index, engine);
        if mode == Mode::Fast {
            continue;
        }
        let mut messages = Vec::new();
        let oracle = recompute_state(engine.instance(), engine.hierarchy(), engine.clients());
        match compare_states(&engine.snapshot(), &oracle) {
            Ok(diff) => messages.extend(diff.iter().map(|m| m.to_string())),
            Err(err) => messages.push(err.to_string()),
        }
        if mode == Mode::Audit {
            messages.extend(checks::state_violations(engine));
        }
        report.verified_states += 1;
        if !messages.is_empty() {
            report.failure = Some(VerificationFailure { event_index: index, line: e.line, messages });
            break;
        }
    }
    report.totals = *engine.totals();
    Ok(report)
}

/// Replays `trace` on a fresh engine with oracle comparison and the live
/// invariant checks after every mutation.
pub fn verify_trace<T: Scalar>(instance: &Instance<T>, trace: &Trace) -> Result<RunReport> {
    let mut engine = DynamicFacilityLocation::new(instance.clone())?;
    run_trace(&mut engine, trace, Mode::Audit)
}

/// The engine against the exact optimum after a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OptReport<T> {
    pub opt: T,
    pub opt_open: Vec<FacilityId>,
    pub engine_cost: T,
    pub realized_cost: T,
    pub ratio_realized: f64,
    pub ratio_engine: f64,
}

impl<T: Scalar> fmt::Display for OptReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "opt={}", self.opt)?;
        writeln!(f, "opt_open={}", format_solution(&self.opt_open))?;
        writeln!(f, "engine_cost={}", self.engine_cost)?;
        writeln!(f, "realized_cost={}", self.realized_cost)?;
        writeln!(f, "ratio_realized={}", self.ratio_realized)?;
        write!(f, "ratio_engine={}", self.ratio_engine)
    }
}

/// Ratio against the optimum; defined as 1 when the optimum is zero.
pub fn ratio<T: Scalar>(value: T, opt: T) -> f64 {
    if opt == T::zero() {
        1.0
    } else {
        value.as_f64() / opt.as_f64()
    }
}

pub fn opt_command<T: Scalar>(instance: &Instance<T>, trace: &Trace) -> Result<OptReport<T>> {
    let mut engine = DynamicFacilityLocation::new(instance.clone())?;
    run_trace(&mut engine, trace, Mode::Fast)?;
    let opt = brute_force_opt(instance, engine.clients())?;
    let engine_cost = engine.cost_query();
    let realized_cost = engine.realized_cost();
    Ok(OptReport {
        opt: opt.cost,
        opt_open: opt.open_set,
        engine_cost,
        realized_cost,
        ratio_realized: ratio(realized_cost, opt.cost),
        ratio_engine: ratio(engine_cost, opt.cost),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fixtures::line5;
    use crate::hierarchy::NodeId;

    fn run(text: &str, mode: Mode) -> RunReport {
        let mut e = DynamicFacilityLocation::new(line5(10.0, 10.0)).unwrap();
        run_trace(&mut e, &Trace::parse(text).unwrap(), mode).unwrap()
    }

    #[test]
    fn line5_queries() {
        assert_eq!(run("+ c1 P3\n? cost\n", Mode::Fast).outputs, vec!["25"]);
        assert_eq!(run("+ c1 P3\n- c1\n? cost\n", Mode::Fast).outputs, vec!["0"]);
        assert_eq!(run("+ c1 P3\n? solution\n", Mode::Fast).outputs, vec!["F0"]);
        assert_eq!(run("? solution\n", Mode::Fast).outputs, vec!["-"]);
    }

    #[test]
    fn output_count_matches_queries() {
        let text = "+ a 3\n? cost\n+ b 4\n? cost\n+ c 3\n? cost\n? solution\n- a\n? cost\n";
        let r = run(text, Mode::Audit);
        assert!(r.is_clean(), "{:?}", r.failure);
        assert_eq!(r.outputs, vec!["25", "10", "15", "F0", "10"]);
        assert_eq!(r.records.len(), 9);
        assert_eq!(r.verified_states, 4);
    }

    #[test]
    fn corrupted_engine_is_reported() {
        let mut e = DynamicFacilityLocation::new(line5(10.0, 10.0)).unwrap();
        let trace = Trace::parse("+ a 3\n+ b 4\n").unwrap();
        let r = run_trace_with_hook(&mut e, &trace, Mode::Verified, |i, e| {
            if i == 1 {
                e.annotation_mut(NodeId(0)).n_x += 1;
            }
        })
        .unwrap();
        let failure = r.failure.unwrap();
        assert_eq!((failure.event_index, failure.line), (1, 2));
        assert!(failure.messages.iter().any(|m| m.contains("n_x")));
    }

    #[test]
    fn unknown_point_is_an_input_error() {
        let mut e = DynamicFacilityLocation::new(line5(10.0, 10.0)).unwrap();
        let trace = Trace::parse("+ a 17\n").unwrap();
        assert!(matches!(run_trace(&mut e, &trace, Mode::Fast), Err(Error::InvalidPoint(..))));
    }

    #[test]
    fn opt_reports() {
        let inst = line5(10.0, 10.0);
        let one = opt_command(&inst, &Trace::parse("+ a 3\n").unwrap()).unwrap();
        assert_eq!((one.opt, one.engine_cost, one.realized_cost, one.ratio_realized), (10.0, 25.0, 110.0, 11.0));
        let three = opt_command(&inst, &Trace::parse("+ a 3\n+ b 4\n+ c 3\n").unwrap()).unwrap();
        assert_eq!((three.opt, three.realized_cost), (11.0, 311.0));
        let none = opt_command(&inst, &Trace::default()).unwrap();
        assert_eq!((none.opt, none.ratio_realized, none.ratio_engine), (0.0, 1.0, 1.0));
    }
}
