//! Line-based update traces.
//!
//! ```text
//! # comment
//! + c1 P3      insert client c1 at point 3 ("3" works too)
//! - c1         delete client c1
//! ? cost
//! ? solution
//! ```

use std::collections::HashMap;
use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{ClientId, PointId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Insert { client: ClientId, point: PointId },
    Delete(ClientId),
    CostQuery,
    SolutionQuery,
}

impl TraceEvent {
    pub fn op(&self) -> &'static str {
        match self {
            TraceEvent::Insert { .. } => "insert",
            TraceEvent::Delete(_) => "delete",
            TraceEvent::CostQuery => "cost",
            TraceEvent::SolutionQuery => "solution",
        }
    }

    pub fn is_mutation(&self) -> bool {
        matches!(self, TraceEvent::Insert { .. } | TraceEvent::Delete(_))
    }
}

/// An event and the 1-based source line it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceLine {
    pub line: usize,
    pub event: TraceEvent,
}

/// Parsed trace. Client names are interned to dense [`ClientId`]s in order
/// of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceLine>,
    names: Vec<String>,
}

impl Trace {
    pub fn parse(text: &str) -> Result<Self> {
        let mut trace = Trace::default();
        let mut ids: HashMap<String, ClientId> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Trace { line, message };
            let fields: Vec<&str> = content.split_whitespace().collect();
            let event = match fields.as_slice() {
                ["+", name, point] => {
                    let point = parse_point(point).ok_or_else(|| err(format!("bad point {point:?}")))?;
                    let next = ClientId(trace.names.len() as u64);
                    let client = *ids.entry(name.to_string()).or_insert_with(|| {
                        trace.names.push(name.to_string());
                        next
                    });
                    TraceEvent::Insert { client, point }
                }
                ["-", name] => {
                    let client =
                        *ids.get(*name).ok_or_else(|| err(format!("client {name} deleted before insertion")))?;
                    TraceEvent::Delete(client)
                }
                ["?", "cost"] => TraceEvent::CostQuery,
                ["?", "solution"] => TraceEvent::SolutionQuery,
                _ => return Err(err(format!("unrecognized event {content:?}"))),
            };
            trace.events.push(TraceLine { line, event });
        }
        Ok(trace)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Trace::parse(&text)
    }

    /// Builds a trace whose clients are named `c<id>`.
    pub fn from_events(events: impl IntoIterator<Item = TraceEvent>) -> Self {
        let mut trace = Trace::default();
        let mut max_id = None;
        for (i, event) in events.into_iter().enumerate() {
            if let TraceEvent::Insert { client, .. } | TraceEvent::Delete(client) = event {
                max_id = max_id.max(Some(client.0));
            }
            trace.events.push(TraceLine { line: i + 1, event });
        }
        trace.names = (0..max_id.map_or(0, |m| m + 1)).map(|i| format!("c{i}")).collect();
        trace
    }

    pub fn client_name(&self, id: ClientId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn query_count(&self) -> usize {
        self.events.iter().filter(|e| !e.event.is_mutation()).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = match e.event {
                TraceEvent::Insert { client, point } => writeln!(out, "+ {} {}", self.client_name(client), point),
                TraceEvent::Delete(client) => writeln!(out, "- {}", self.client_name(client)),
                TraceEvent::CostQuery => writeln!(out, "? cost"),
                TraceEvent::SolutionQuery => writeln!(out, "? solution"),
            };
        }
        out
    }

    /// The events up to and including the `n`-th.
    pub fn prefix(&self, n: usize) -> Trace {
        Trace { events: self.events[..n.min(self.events.len())].to_vec(), names: self.names.clone() }
    }
}

fn parse_point(s: &str) -> Option<PointId> {
    s.strip_prefix('P').unwrap_or(s).parse().ok().map(PointId)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_event_kinds() {
        let t = Trace::parse("# LINE5\n+ c1 P3\n+ bob 4  # trailing\n\n? cost\n- c1\n? solution\n").unwrap();
        let events: Vec<TraceEvent> = t.events.iter().map(|e| e.event).collect();
        assert_eq!(
            events,
            vec![
                TraceEvent::Insert { client: ClientId(0), point: PointId(3) },
                TraceEvent::Insert { client: ClientId(1), point: PointId(4) },
                TraceEvent::CostQuery,
                TraceEvent::Delete(ClientId(0)),
                TraceEvent::SolutionQuery,
            ]
        );
        assert_eq!(t.events[1].line, 3);
        assert_eq!(t.client_name(ClientId(1)), "bob");
        assert_eq!(t.query_count(), 2);
    }

    #[test]
    fn round_trips_through_text() {
        let t = Trace::parse("+ a P1\n+ b P0\n- a\n? cost\n").unwrap();
        let again = Trace::parse(&t.to_text()).unwrap();
        assert_eq!(
            again.events.iter().map(|e| e.event).collect::<Vec<_>>(),
            t.events.iter().map(|e| e.event).collect::<Vec<_>>()
        );
    }

    #[test]
    fn reports_bad_lines() {
        assert!(matches!(Trace::parse("+ c1\n"), Err(Error::Trace { line: 1, .. })));
        assert!(matches!(Trace::parse("? cost\n- ghost\n"), Err(Error::Trace { line: 2, .. })));
        assert!(matches!(Trace::parse("+ c1 Px\n"), Err(Error::Trace { line: 1, .. })));
    }

    #[test]
    fn reinsertion_reuses_the_id() {
        let t = Trace::parse("+ a 1\n- a\n+ a 2\n").unwrap();
        assert_eq!(t.events[2].event, TraceEvent::Insert { client: ClientId(0), point: PointId(2) });
    }
}
