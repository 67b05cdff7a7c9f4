//! Bounded token-game execution over independent-model processes.
//!
//! Tokens live on transitions, not nodes; that makes Join's wait-for-all
//! and Merge's take-any-one directly expressible. The start node seeds
//! one token on its outflow, tasks move a token from their inflow to
//! their outflow while emitting their label, Decision picks exactly one
//! outflow (every alternative is enumerated), Fork produces on all
//! outflows, and Stop absorbs whatever reaches it. A run is complete when
//! no token remains.
//!
//! [`enumerate_traces`] collects the exhaustive set of completed
//! task-label sequences under configurable bounds, and [`equivalent`] is
//! the behavioral oracle built on it: two models are equivalent when both
//! enumerations are complete and the trace sets coincide. An enumeration
//! cut short by a bound never produces a verdict, only "inconclusive".
//!
//! Guards on decision outflows are ignored here: they are opaque text,
//! and enumerating every resolution over-approximates both sides of a
//! comparison identically.

use crate::interchange::Document;
use crate::mapping::ProjectionError;
use crate::nibm::{validate_nibm, NibmProcess, NodeKind};
use crate::report::{StructuralError, ValidationReport};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// Multiset of transition ids currently holding tokens.
pub type Marking = BTreeMap<String, u32>;

type IMarking = BTreeMap<u32, u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_trace_len: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_states: 100_000,
            max_trace_len: 200,
        }
    }
}

#[derive(Debug, Error)]
pub enum TokenError {
    #[error("model is not well formed:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("marking references unknown transition {0}")]
    UnknownTransition(String),
    #[error(transparent)]
    Structural(#[from] StructuralError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Token(#[from] TokenError),
}

/// Exhaustive set of completed task-label sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: BTreeSet<Vec<String>>,
    /// False when a bound cut the enumeration short; traces are then a
    /// subset of the true set.
    pub complete: bool,
    /// Terminal markings with tokens left and nothing enabled.
    pub deadlocks: BTreeSet<Marking>,
}

impl TraceSet {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dto<'a> {
            complete: bool,
            traces: &'a BTreeSet<Vec<String>>,
            deadlocks: usize,
        }
        let mut s = serde_json::to_string_pretty(&Dto {
            complete: self.complete,
            traces: &self.traces,
            deadlocks: self.deadlocks.len(),
        })
        .expect("trace set serialization");
        s.push('\n');
        s
    }
}

/// Verdict of the behavioral comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// A completed trace present in exactly one side.
    Different {
        counterexample: Vec<String>,
        in_first: bool,
    },
    /// At least one enumeration hit a bound; no verdict.
    Inconclusive,
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

struct Net {
    kinds: Vec<NodeKind>,
    labels: Vec<Option<String>>,
    node_ids: Vec<String>,
    ins: Vec<Vec<u32>>,
    outs: Vec<Vec<u32>>,
    trans_ids: Vec<String>,
    /// Transitions whose target is a Stop node absorb produced tokens.
    absorbing: Vec<bool>,
    start: usize,
}

impl Net {
    fn build(model: &NibmProcess) -> Result<Net, TokenError> {
        let report = validate_nibm(model)?;
        if !report.is_empty() {
            return Err(TokenError::InvalidModel(report));
        }
        let idx = model.index()?;
        let node_pos: BTreeMap<&str, usize> = model
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let absorbing = model
            .transitions
            .iter()
            .map(|t| model.nodes[node_pos[t.target.as_str()]].kind == NodeKind::Stop)
            .collect();
        let start = model
            .nodes
            .iter()
            .position(|n| n.kind == NodeKind::Start)
            .expect("validated model has a start");
        Ok(Net {
            kinds: model.nodes.iter().map(|n| n.kind).collect(),
            labels: model.nodes.iter().map(|n| n.label.clone()).collect(),
            node_ids: model.nodes.iter().map(|n| n.id.clone()).collect(),
            ins: idx
                .inflows
                .iter()
                .map(|v| v.iter().map(|&t| t as u32).collect())
                .collect(),
            outs: idx
                .outflows
                .iter()
                .map(|v| v.iter().map(|&t| t as u32).collect())
                .collect(),
            trans_ids: model.transitions.iter().map(|t| t.id.clone()).collect(),
            absorbing,
            start,
        })
    }

    fn initial(&self) -> IMarking {
        let mut m = IMarking::new();
        // the start's single outflow; a direct edge into a stop absorbs
        // immediately and the process has only the empty run
        let e = self.outs[self.start][0];
        if !self.absorbing[e as usize] {
            m.insert(e, 1);
        }
        m
    }

    fn produce(&self, m: &mut IMarking, e: u32) {
        if !self.absorbing[e as usize] {
            *m.entry(e).or_insert(0) += 1;
        }
    }

    fn consume(m: &mut IMarking, e: u32) {
        match m.get_mut(&e) {
            Some(1) => {
                m.remove(&e);
            }
            Some(n) => *n -= 1,
            None => unreachable!("consuming token that is not there"),
        }
    }

    /// Every enabled step as (firing node, successor marking).
    fn steps(&self, m: &IMarking) -> Vec<(usize, IMarking)> {
        let mut out = Vec::new();
        for (node, kind) in self.kinds.iter().enumerate() {
            match kind {
                NodeKind::Task => {
                    let e_in = self.ins[node][0];
                    if m.get(&e_in).is_some() {
                        let mut next = m.clone();
                        Net::consume(&mut next, e_in);
                        self.produce(&mut next, self.outs[node][0]);
                        out.push((node, next));
                    }
                }
                NodeKind::Merge => {
                    // any one inflow token moves on; tokens are not fused
                    for &e_in in &self.ins[node] {
                        if m.get(&e_in).is_some() {
                            let mut next = m.clone();
                            Net::consume(&mut next, e_in);
                            self.produce(&mut next, self.outs[node][0]);
                            out.push((node, next));
                        }
                    }
                }
                NodeKind::Join => {
                    if self.ins[node].iter().all(|e| m.get(e).is_some()) {
                        let mut next = m.clone();
                        for &e_in in &self.ins[node] {
                            Net::consume(&mut next, e_in);
                        }
                        self.produce(&mut next, self.outs[node][0]);
                        out.push((node, next));
                    }
                }
                NodeKind::Decision => {
                    let e_in = self.ins[node][0];
                    if m.get(&e_in).is_some() {
                        for &e_out in &self.outs[node] {
                            let mut next = m.clone();
                            Net::consume(&mut next, e_in);
                            self.produce(&mut next, e_out);
                            out.push((node, next));
                        }
                    }
                }
                NodeKind::Fork => {
                    let e_in = self.ins[node][0];
                    if m.get(&e_in).is_some() {
                        let mut next = m.clone();
                        Net::consume(&mut next, e_in);
                        for &e_out in &self.outs[node] {
                            self.produce(&mut next, e_out);
                        }
                        out.push((node, next));
                    }
                }
                NodeKind::Start | NodeKind::Stop => {}
            }
        }
        out
    }

    fn public_marking(&self, m: &IMarking) -> Marking {
        m.iter()
            .map(|(e, n)| (self.trans_ids[*e as usize].clone(), *n))
            .collect()
    }
}

/// All enabled steps of a marking, by node and successor marking.
pub fn step_rules(
    model: &NibmProcess,
    marking: &Marking,
) -> Result<Vec<(String, Marking)>, TokenError> {
    let net = Net::build(model)?;
    let trans_pos: BTreeMap<&str, u32> = net
        .trans_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i as u32))
        .collect();
    let mut im = IMarking::new();
    for (id, n) in marking {
        let pos = trans_pos
            .get(id.as_str())
            .ok_or_else(|| TokenError::UnknownTransition(id.clone()))?;
        im.insert(*pos, *n);
    }
    Ok(net
        .steps(&im)
        .into_iter()
        .map(|(node, m)| (net.node_ids[node].clone(), net.public_marking(&m)))
        .collect())
}

/// The marking produced by seeding the start node.
pub fn initial_marking(model: &NibmProcess) -> Result<Marking, TokenError> {
    let net = Net::build(model)?;
    Ok(net.public_marking(&net.initial()))
}

/// Marking flattened into a hashable key, paired with the remaining
/// label budget.
type MemoKey = (Vec<(u32, u32)>, usize);
/// Completed suffixes from a marking plus whether a bound cut them off.
type MemoEntry = (BTreeSet<Vec<String>>, bool);

struct Enumerator<'n> {
    net: &'n Net,
    bounds: Bounds,
    memo: HashMap<MemoKey, MemoEntry>,
    active: HashMap<MemoKey, usize>,
    deadlocks: BTreeSet<IMarking>,
    states: usize,
    exhausted: bool,
}

impl<'n> Enumerator<'n> {
    /// Completed label suffixes from `m` within `budget` further task
    /// firings. Returns (suffixes, truncated, lowlink); `lowlink` is the
    /// smallest stack depth of any in-progress marking this subtree
    /// reached, [`usize::MAX`] when self-contained. Only self-contained
    /// results are memoized: a value computed against an unfinished
    /// ancestor is correct for that ancestor's fixpoint but not on its
    /// own. Cycles hit at equal budget are label-free, so the empty
    /// contribution for a revisit is the least fixpoint.
    fn suffixes(
        &mut self,
        m: &IMarking,
        budget: usize,
        depth: usize,
    ) -> (BTreeSet<Vec<String>>, bool, usize) {
        if m.is_empty() {
            let mut done = BTreeSet::new();
            done.insert(Vec::new());
            return (done, false, usize::MAX);
        }
        let key: Vec<(u32, u32)> = m.iter().map(|(k, v)| (*k, *v)).collect();
        if let Some((set, trunc)) = self.memo.get(&(key.clone(), budget)) {
            return (set.clone(), *trunc, usize::MAX);
        }
        if let Some(&d) = self.active.get(&(key.clone(), budget)) {
            return (BTreeSet::new(), false, d);
        }
        if self.exhausted || self.states >= self.bounds.max_states {
            self.exhausted = true;
            return (BTreeSet::new(), true, usize::MAX);
        }
        self.states += 1;
        self.active.insert((key.clone(), budget), depth);

        let steps = self.net.steps(m);
        let mut set = BTreeSet::new();
        let mut truncated = false;
        let mut lowlink = usize::MAX;
        if steps.is_empty() {
            self.deadlocks.insert(m.clone());
        }
        for (node, next) in steps {
            let label = match self.net.kinds[node] {
                NodeKind::Task => self.net.labels[node].clone(),
                _ => None,
            };
            let child_budget = if label.is_some() {
                if budget == 0 {
                    truncated = true;
                    continue;
                }
                budget - 1
            } else {
                budget
            };
            let (sub, sub_trunc, sub_low) = self.suffixes(&next, child_budget, depth + 1);
            truncated |= sub_trunc;
            lowlink = lowlink.min(sub_low);
            match label {
                Some(l) => {
                    for mut trace in sub {
                        trace.insert(0, l.clone());
                        set.insert(trace);
                    }
                }
                None => set.extend(sub),
            }
        }

        self.active.remove(&(key.clone(), budget));
        if lowlink >= depth {
            self.memo.insert((key, budget), (set.clone(), truncated));
            (set, truncated, usize::MAX)
        } else {
            (set, truncated, lowlink)
        }
    }
}

/// Exhaustive depth-first enumeration of completed task-label sequences.
pub fn enumerate_traces(model: &NibmProcess, bounds: Bounds) -> Result<TraceSet, TokenError> {
    let net = Net::build(model)?;
    let mut en = Enumerator {
        net: &net,
        bounds,
        memo: HashMap::new(),
        active: HashMap::new(),
        deadlocks: BTreeSet::new(),
        states: 0,
        exhausted: false,
    };
    let initial = net.initial();
    let (traces, truncated, _) = en.suffixes(&initial, bounds.max_trace_len, 0);
    Ok(TraceSet {
        traces,
        complete: !truncated && !en.exhausted,
        deadlocks: en.deadlocks.iter().map(|m| net.public_marking(m)).collect(),
    })
}

/// The behavioral oracle. Concrete-notation documents are projected via
/// the builtin mappings first; independent-model documents are taken as
/// they are.
pub fn equivalent(a: &Document, b: &Document, bounds: Bounds) -> Result<Equivalence, OracleError> {
    let na = crate::mapping::document_to_nibm(a)?;
    let nb = crate::mapping::document_to_nibm(b)?;
    let ta = enumerate_traces(&na, bounds)?;
    let tb = enumerate_traces(&nb, bounds)?;
    if !ta.complete || !tb.complete {
        return Ok(Equivalence::Inconclusive);
    }
    if ta.traces == tb.traces {
        return Ok(Equivalence::Equal);
    }
    // deterministic counterexample: smallest trace in the symmetric
    // difference
    let only_a = ta.traces.difference(&tb.traces).next();
    let only_b = tb.traces.difference(&ta.traces).next();
    let (counterexample, in_first) = match (only_a, only_b) {
        (Some(x), Some(y)) => {
            if x <= y {
                (x.clone(), true)
            } else {
                (y.clone(), false)
            }
        }
        (Some(x), None) => (x.clone(), true),
        (None, Some(y)) => (y.clone(), false),
        (None, None) => unreachable!("sets differ"),
    };
    Ok(Equivalence::Different {
        counterexample,
        in_first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nibm::testutil::*;
    use crate::nibm::{NibmNode, NibmTransition, NodeKind, TransitionKind};

    fn traces(model: &NibmProcess) -> TraceSet {
        enumerate_traces(model, Bounds::default()).unwrap()
    }

    fn seq(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn minimal_chain_has_one_trace() {
        let ts = traces(&minimal_chain());
        assert!(ts.complete);
        assert_eq!(ts.traces, BTreeSet::from([seq(&["A"])]));
        assert!(ts.deadlocks.is_empty());
    }

    #[test]
    fn single_step_from_initial_marking() {
        let m = minimal_chain();
        let init = initial_marking(&m).unwrap();
        let steps = step_rules(&m, &init).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, "4"); // the task node
    }

    #[test]
    fn fork_join_interleavings() {
        let ts = traces(&fork_join("A", "B"));
        assert!(ts.complete);
        assert_eq!(
            ts.traces,
            BTreeSet::from([seq(&["A", "B", "C"]), seq(&["B", "A", "C"])])
        );
        assert!(ts.deadlocks.is_empty());
    }

    #[test]
    fn join_waits_for_all_inflows() {
        let m = fork_join("A", "B");
        // token on only one join inflow: nothing enabled at the join
        let marking: Marking = [("t4".to_string(), 1u32)].into_iter().collect();
        let steps = step_rules(&m, &marking).unwrap();
        assert!(steps.iter().all(|(node, _)| node != "j"), "{steps:?}");
    }

    /// Start -> Decision -> {A | B} -> Merge -> Stop.
    fn decision_merge() -> NibmProcess {
        let mut p = NibmProcess::new("choice");
        p.nodes.push(NibmNode::new("s", NodeKind::Start));
        p.nodes.push(NibmNode::new("d", NodeKind::Decision));
        p.nodes.push(NibmNode::task("a", "A"));
        p.nodes.push(NibmNode::task("b", "B"));
        p.nodes.push(NibmNode::new("m", NodeKind::Merge));
        p.nodes.push(NibmNode::new("z", NodeKind::Stop));
        for (id, s, t) in [
            ("t1", "s", "d"),
            ("t2", "d", "a"),
            ("t3", "d", "b"),
            ("t4", "a", "m"),
            ("t5", "b", "m"),
            ("t6", "m", "z"),
        ] {
            p.transitions
                .push(NibmTransition::new(id, TransitionKind::Pass, s, t));
        }
        p
    }

    #[test]
    fn decision_alternatives_are_enumerated() {
        let ts = traces(&decision_merge());
        assert!(ts.complete);
        assert_eq!(ts.traces, BTreeSet::from([seq(&["A"]), seq(&["B"])]));
    }

    #[test]
    fn merge_fires_once_per_token() {
        // fork into both merge inflows: the merge passes both tokens on,
        // one step each, so C runs twice
        let mut p = NibmProcess::new("double");
        p.nodes.push(NibmNode::new("s", NodeKind::Start));
        p.nodes.push(NibmNode::new("f", NodeKind::Fork));
        p.nodes.push(NibmNode::new("m", NodeKind::Merge));
        p.nodes.push(NibmNode::task("c", "C"));
        p.nodes.push(NibmNode::new("z", NodeKind::Stop));
        for (id, k, s, t) in [
            ("t1", TransitionKind::Pass, "s", "f"),
            ("t2", TransitionKind::Pass, "f", "m"),
            ("t3", TransitionKind::Pass, "f", "m"),
            ("t4", TransitionKind::Incoming, "m", "c"),
            ("t5", TransitionKind::Pass, "c", "z"),
        ] {
            p.transitions.push(NibmTransition::new(id, k, s, t));
        }
        let ts = traces(&p);
        assert!(ts.complete);
        assert_eq!(ts.traces, BTreeSet::from([seq(&["C", "C"])]));
    }

    #[test]
    fn mismatched_split_join_deadlocks() {
        // Decision feeds a Join: only one side ever gets a token
        let mut p = decision_merge();
        p.nodes[4].kind = NodeKind::Join;
        let ts = traces(&p);
        assert!(ts.complete);
        assert!(ts.traces.is_empty());
        assert_eq!(ts.deadlocks.len(), 2);
    }

    #[test]
    fn start_directly_into_stop_has_empty_trace() {
        let mut p = NibmProcess::new("empty");
        p.nodes.push(NibmNode::new("s", NodeKind::Start));
        p.nodes.push(NibmNode::new("z", NodeKind::Stop));
        p.transitions
            .push(NibmTransition::new("t1", TransitionKind::Pass, "s", "z"));
        let ts = traces(&p);
        assert!(ts.complete);
        assert_eq!(ts.traces, BTreeSet::from([Vec::<String>::new()]));
    }

    #[test]
    fn task_loop_is_cut_by_the_length_bound() {
        // Start -> A -> D -> (back to A | Stop)
        let mut p = NibmProcess::new("loop");
        p.nodes.push(NibmNode::new("s", NodeKind::Start));
        p.nodes.push(NibmNode::new("m", NodeKind::Merge));
        p.nodes.push(NibmNode::task("a", "A"));
        p.nodes.push(NibmNode::new("d", NodeKind::Decision));
        p.nodes.push(NibmNode::new("z", NodeKind::Stop));
        for (id, k, s, t) in [
            ("t1", TransitionKind::Pass, "s", "m"),
            ("t2", TransitionKind::Incoming, "m", "a"),
            ("t3", TransitionKind::Pass, "a", "d"),
            ("t4", TransitionKind::Pass, "d", "m"),
            ("t5", TransitionKind::Pass, "d", "z"),
        ] {
            p.transitions.push(NibmTransition::new(id, k, s, t));
        }
        let ts = enumerate_traces(
            &p,
            Bounds {
                max_states: 100_000,
                max_trace_len: 5,
            },
        )
        .unwrap();
        assert!(!ts.complete);
        assert_eq!(
            ts.traces,
            BTreeSet::from([
                seq(&["A"]),
                seq(&["A", "A"]),
                seq(&["A", "A", "A"]),
                seq(&["A", "A", "A", "A"]),
                seq(&["A", "A", "A", "A", "A"]),
            ])
        );
    }

    #[test]
    fn control_cycles_do_not_lose_exits() {
        // a label-free control cycle (m1 -> d1 -> m2 -> d2 -> m1) with an
        // exit task on each decision, entered at two different points by
        // same-length task paths; markings whose suffixes were computed
        // against an unfinished ancestor must not be memoized, or the
        // second entry sees a cycle state missing one exit
        let mut p = NibmProcess::new("cycles");
        p.nodes.push(NibmNode::new("s", NodeKind::Start));
        p.nodes.push(NibmNode::task("a", "A"));
        p.nodes.push(NibmNode::new("d0", NodeKind::Decision));
        p.nodes.push(NibmNode::task("t1", "T1"));
        p.nodes.push(NibmNode::task("t2", "T2"));
        p.nodes.push(NibmNode::new("m1", NodeKind::Merge));
        p.nodes.push(NibmNode::new("d1", NodeKind::Decision));
        p.nodes.push(NibmNode::new("m2", NodeKind::Merge));
        p.nodes.push(NibmNode::new("d2", NodeKind::Decision));
        p.nodes.push(NibmNode::task("c", "C"));
        p.nodes.push(NibmNode::task("e", "E"));
        p.nodes.push(NibmNode::new("z", NodeKind::Stop));
        for (id, s, t) in [
            ("e1", "s", "a"),
            ("e2", "a", "d0"),
            ("e3", "d0", "t1"),
            ("e4", "d0", "t2"),
            ("e5", "t1", "m1"),
            ("e6", "t2", "m2"),
            ("e7", "m1", "d1"),
            ("e8", "d1", "m2"),
            ("e9", "d1", "c"),
            ("e10", "m2", "d2"),
            ("e11", "d2", "m1"),
            ("e12", "d2", "e"),
            ("e13", "c", "z"),
            ("e14", "e", "z"),
        ] {
            p.transitions
                .push(NibmTransition::new(id, TransitionKind::Pass, s, t));
        }
        let ts = traces(&p);
        assert!(ts.complete);
        assert_eq!(
            ts.traces,
            BTreeSet::from([
                seq(&["A", "T1", "C"]),
                seq(&["A", "T1", "E"]),
                seq(&["A", "T2", "C"]),
                seq(&["A", "T2", "E"]),
            ])
        );
        assert!(ts.deadlocks.is_empty());
    }

    #[test]
    fn determinism_of_enumeration() {
        let m = fork_join("A", "B");
        let a = traces(&m);
        let b = traces(&m);
        assert_eq!(a, b);
    }

    #[test]
    fn equivalence_catches_label_difference() {
        let a = minimal_chain();
        let mut b = minimal_chain();
        b.nodes[1].label = Some("X".into());
        let out = equivalent(&Document::Nibm(a), &Document::Nibm(b), Bounds::default()).unwrap();
        match out {
            Equivalence::Different { counterexample, .. } => {
                assert!(counterexample == seq(&["A"]) || counterexample == seq(&["X"]));
            }
            other => panic!("expected difference, got {other:?}"),
        }
    }

    #[test]
    fn tiny_state_bound_is_inconclusive() {
        let a = fork_join("A", "B");
        let out = equivalent(
            &Document::Nibm(a.clone()),
            &Document::Nibm(a),
            Bounds {
                max_states: 2,
                max_trace_len: 200,
            },
        )
        .unwrap();
        assert_eq!(out, Equivalence::Inconclusive);
    }
}
