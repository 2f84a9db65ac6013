//! Fixpoint propagation of a whole model with an event-filtered FIFO queue.
//!
//! A propagator is re-queued only when one of its variables changes in a
//! way its notion can observe: bounds(Z) and bounds(R) propagators depend on
//! bounds alone, so interior removals ("holes") never wake them.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checkers::Notion;
use crate::domains::{Domain, IntSet, VarId};
use crate::error::Result;
use crate::model::Model;
use crate::propagators::{propagate, propagate_linear_br, Outcome, PropagationResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    LowerBound,
    UpperBound,
    Hole,
    Fixed,
}

impl EventKind {
    pub fn tag(self) -> &'static str {
        match self {
            EventKind::LowerBound => "lb",
            EventKind::UpperBound => "ub",
            EventKind::Hole => "hole",
            EventKind::Fixed => "fixed",
        }
    }

    fn wakes(self, n: Notion) -> bool {
        self != EventKind::Hole || !n.is_box_based()
    }
}

/// One observed change, with the variable's bounds before and after.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub var: VarId,
    pub kind: EventKind,
    pub old: (i64, i64),
    pub new: (i64, i64),
}

/// Events describing the change from `old` to `new` (a non-empty subset).
pub fn events_between(var: VarId, old: &IntSet, new: &IntSet) -> Vec<Event> {
    let (Some(ol), Some(oh), Some(nl), Some(nh)) = (old.min(), old.max(), new.min(), new.max()) else {
        return Vec::new();
    };
    let mk = |kind| Event { var, kind, old: (ol, oh), new: (nl, nh) };
    let mut out = Vec::new();
    if nl > ol {
        out.push(mk(EventKind::LowerBound));
    }
    if nh < oh {
        out.push(mk(EventKind::UpperBound));
    }
    if new.is_singleton() && !old.is_singleton() {
        out.push(mk(EventKind::Fixed));
    }
    if out.is_empty() && new.len() < old.len() {
        out.push(mk(EventKind::Hole));
    }
    out
}

/// One propagator execution that changed something.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub constraint: usize,
    pub events: Vec<Event>,
    /// Domain after the step; `None` when the step failed.
    pub snapshot: Option<Domain>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineOptions {
    /// Re-queue only the propagators an event can affect. Off means every
    /// other propagator is re-queued after any change.
    pub filter_events: bool,
    /// Initial queue order as constraint indices; `None` is declaration order.
    pub initial_order: Option<Vec<usize>>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { filter_events: true, initial_order: None }
    }
}

/// Single-constraint propagation with the fast path for linear bounds(R).
pub fn run_propagator(d: &Domain, m: &Model, idx: usize) -> Result<PropagationResult> {
    let p = &m.constraints[idx];
    if p.notion == Notion::BoundsR && p.constraint.as_linear().is_some() {
        propagate_linear_br(d, &p.constraint)
    } else {
        propagate(d, &p.constraint, p.notion)
    }
}

fn run(
    m: &Model,
    d: &Domain,
    opts: &EngineOptions,
    mut trace: Option<&mut Vec<TraceStep>>,
) -> Result<PropagationResult> {
    let nc = m.constraints.len();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); d.num_vars()];
    let scopes: Vec<Vec<VarId>> = m.constraints.iter().map(|p| p.constraint.scope()).collect();
    for (ci, scope) in scopes.iter().enumerate() {
        for v in scope {
            watchers[v.index()].push(ci);
        }
    }
    let order = opts.initial_order.clone().unwrap_or_else(|| (0..nc).collect());
    let mut queue: VecDeque<usize> = order.into_iter().collect();
    let mut queued = vec![false; nc];
    for &ci in &queue {
        queued[ci] = true;
    }
    let mut cur = d.clone();
    while let Some(ci) = queue.pop_front() {
        queued[ci] = false;
        let res = run_propagator(&cur, m, ci)?;
        let next = match res.outcome {
            Outcome::Failure => {
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceStep { constraint: ci, events: Vec::new(), snapshot: None });
                }
                return Ok(PropagationResult::between(d, Outcome::Failure));
            }
            Outcome::Fixpoint(next) => next,
        };
        let events: Vec<Event> = scopes[ci].iter().flat_map(|&v| events_between(v, cur.get(v), next.get(v))).collect();
        cur = next;
        if events.is_empty() {
            continue;
        }
        let mut wake = |cj: usize, queue: &mut VecDeque<usize>| {
            if cj != ci && !queued[cj] {
                queued[cj] = true;
                queue.push_back(cj);
            }
        };
        if opts.filter_events {
            for e in &events {
                for &cj in &watchers[e.var.index()] {
                    if e.kind.wakes(m.constraints[cj].notion) {
                        wake(cj, &mut queue);
                    }
                }
            }
        } else {
            for cj in 0..nc {
                wake(cj, &mut queue);
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceStep { constraint: ci, events, snapshot: Some(cur.clone()) });
        }
    }
    Ok(PropagationResult::between(d, Outcome::Fixpoint(cur)))
}

/// Mutual greatest fixpoint of every posted propagator below `d`.
pub fn propagate_all(m: &Model, d: &Domain) -> Result<PropagationResult> {
    run(m, d, &EngineOptions::default(), None)
}

pub fn propagate_all_with(m: &Model, d: &Domain, opts: &EngineOptions) -> Result<PropagationResult> {
    run(m, d, opts, None)
}

/// Like [`propagate_all`], also returning every effective step.
pub fn trace(m: &Model, d: &Domain) -> Result<(PropagationResult, Vec<TraceStep>)> {
    let mut steps = Vec::new();
    let res = run(m, d, &EngineOptions::default(), Some(&mut steps))?;
    Ok((res, steps))
}

/// Line-oriented trace: `<constraint-id> <kind> <var> <lo>..<hi> -> <lo>..<hi>`,
/// or `<constraint-id> failure`.
pub fn format_trace(m: &Model, steps: &[TraceStep]) -> String {
    let mut out = String::new();
    for s in steps {
        let id = &m.constraints[s.constraint].id;
        if s.snapshot.is_none() {
            let _ = writeln!(out, "{id} failure");
            continue;
        }
        for e in &s.events {
            let _ = writeln!(
                out,
                "{id} {} {} {}..{} -> {}..{}",
                e.kind.tag(),
                m.name(e.var),
                e.old.0,
                e.old.1,
                e.new.0,
                e.new.1
            );
        }
    }
    out
}
