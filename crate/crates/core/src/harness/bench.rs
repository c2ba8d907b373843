use std::fmt::Write;

use super::run::{run_trace, Mode};
use super::trace::Trace;
use crate::engine::DynamicFacilityLocation;
use crate::error::Result;
use crate::metric::Instance;
use crate::scalar::Scalar;

/// Per-event timing over all repetitions. Counters come from the first
/// repetition; replay is deterministic, so every repetition agrees.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub index: usize,
    pub op: &'static str,
    pub micros_mean: f64,
    pub micros_median: f64,
    pub heap_pulls: u64,
    pub flips: u64,
}

pub fn bench_trace<T: Scalar>(instance: &Instance<T>, trace: &Trace, repetitions: usize) -> Result<Vec<BenchRow>> {
    let repetitions = repetitions.max(1);
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(repetitions); trace.len()];
    let mut rows = Vec::new();
    for rep in 0..repetitions {
        let mut engine = DynamicFacilityLocation::new(instance.clone())?;
        let report = run_trace(&mut engine, trace, Mode::Fast)?;
        for r in &report.records {
            samples[r.index].push(r.micros);
        }
        if rep == 0 {
            rows = report
                .records
                .iter()
                .map(|r| BenchRow {
                    index: r.index,
                    op: r.op,
                    micros_mean: 0.0,
                    micros_median: 0.0,
                    heap_pulls: r.stats.heap_pulls,
                    flips: r.stats.flips,
                })
                .collect();
        }
    }
    for (row, s) in rows.iter_mut().zip(samples.iter_mut()) {
        row.micros_mean = s.iter().sum::<f64>() / s.len() as f64;
        s.sort_by(f64::total_cmp);
        let mid = s.len() / 2;
        row.micros_median = if s.len() % 2 == 1 { s[mid] } else { (s[mid - 1] + s[mid]) / 2.0 };
    }
    Ok(rows)
}

/// CSV with header `event_index,op,micros,heap_pulls,flips`, plus
/// `micros_median` when there was more than one repetition.
pub fn bench_csv(rows: &[BenchRow], repetitions: usize) -> String {
    let median = repetitions > 1;
    let mut out = String::from("event_index,op,micros,heap_pulls,flips");
    out.push_str(if median { ",micros_median\n" } else { "\n" });
    for r in rows {
        let _ = write!(out, "{},{},{:.3},{},{}", r.index, r.op, r.micros_mean, r.heap_pulls, r.flips);
        if median {
            let _ = write!(out, ",{:.3}", r.micros_median);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::line5;

    #[test]
    fn one_row_per_event() {
        let trace = Trace::parse("+ a 3\n+ b 4\n? cost\n- a\n").unwrap();
        let rows = bench_trace(&line5(10.0, 10.0), &trace, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].op, "cost");
        assert!(rows[0].heap_pulls >= 1);
        let csv = bench_csv(&rows, 3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "event_index,op,micros,heap_pulls,flips,micros_median");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,insert,"));
        assert_eq!(bench_csv(&rows, 1).lines().next(), Some("event_index,op,micros,heap_pulls,flips"));
    }
}
