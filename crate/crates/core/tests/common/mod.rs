//! Shared fixtures and deterministic model generators for integration
//! tests. Generators are seeded and block structured: splits are always
//! rejoined by the matching unification construct, so every generated
//! model is well formed, absorbable in both directions and free of
//! deadlocks by construction.

#![allow(dead_code)]

use bmx_core::grade::{
    GateAttr, GradeEnd, GradeFlow, GradePerformerRef, GradeProcess, GradeStart, GradeTask,
};
use bmx_core::nibm::NibmProcess;
use bmx_core::umlad::{UmlActivity, UmlControlFlow, UmlNode, UmlNodeKind, UmlPartition};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy)]
pub struct GenConfig {
    /// Budget for tasks (grade) or nodes (uml), excluding start/end.
    pub max_units: usize,
    pub with_guards: bool,
    pub with_performers: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_units: 12,
            with_guards: true,
            with_performers: true,
        }
    }
}

const PERFORMER_POOL: &[(&str, &str)] = &[
    ("Role", "Clerk"),
    ("OrganizationalUnit", "Back office"),
    ("Resource", "Scanner"),
    ("Qualification", "Certified auditor"),
];

struct GradeGen {
    rng: StdRng,
    model: GradeProcess,
    next_task: usize,
    next_flow: usize,
    budget: usize,
    cfg: GenConfig,
}

impl GradeGen {
    fn task(&mut self) -> String {
        self.next_task += 1;
        let id = format!("t{}", self.next_task);
        let mut task = GradeTask::new(id.clone(), format!("T{}", self.next_task));
        if self.cfg.with_performers && !self.model.performers.is_empty() && self.rng.gen_bool(0.4) {
            let p = self.rng.gen_range(0..self.model.performers.len());
            task.performer = Some(self.model.performers[p].id.clone());
        }
        self.model.tasks.push(task);
        id
    }

    fn flow(&mut self, source: &str, target: &str) -> String {
        self.next_flow += 1;
        let id = format!("f{}", self.next_flow);
        self.model.flows.push(GradeFlow {
            id: id.clone(),
            source: source.into(),
            target: target.into(),
        });
        id
    }

    fn task_mut(&mut self, id: &str) -> &mut GradeTask {
        self.model.tasks.iter_mut().find(|t| t.id == id).unwrap()
    }

    /// Returns (entry task, exit task) of the block.
    fn block(&mut self, budget: usize) -> (String, String) {
        if budget < 4 || self.rng.gen_bool(0.3) {
            let t = self.task();
            if budget >= 2 && self.rng.gen_bool(0.5) {
                // short sequence
                let u = self.task();
                self.flow(&t, &u);
                return (t, u);
            }
            return (t.clone(), t);
        }
        let parallel = self.rng.gen_bool(0.5);
        let arms = if budget >= 8 && self.rng.gen_bool(0.3) {
            3
        } else {
            2
        };
        let split = self.task();
        let join = self.task();
        let arm_budget = (budget - 2) / arms;
        let mut guard_flows = Vec::new();
        for _ in 0..arms {
            let (entry, exit) = self.block(arm_budget.max(1));
            let f = self.flow(&split, &entry);
            guard_flows.push(f);
            self.flow(&exit, &join);
        }
        if parallel {
            self.task_mut(&split).branching = GateAttr::And;
            self.task_mut(&join).triggering = GateAttr::And;
        } else {
            self.task_mut(&split).branching = GateAttr::Or;
            self.task_mut(&join).triggering = GateAttr::Or;
            if self.cfg.with_guards {
                // all arms guarded with an else branch, a partial guard
                // set, or no guards at all
                match self.rng.gen_range(0..3) {
                    0 => {
                        let last = guard_flows.len() - 1;
                        for (i, f) in guard_flows.iter().enumerate() {
                            let text = if i == last {
                                "else".to_string()
                            } else {
                                format!("case {i}")
                            };
                            self.task_mut(&split).guards.insert(f.clone(), text);
                        }
                    }
                    1 => {
                        let f = guard_flows[0].clone();
                        self.task_mut(&split).guards.insert(f, "priority".into());
                    }
                    _ => {}
                }
            }
        }
        (split, join)
    }
}

/// A well-formed GRADE process grown from `seed`.
pub fn gen_grade(seed: u64, cfg: GenConfig) -> GradeProcess {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut model = GradeProcess::new(format!("generated {seed}"));
    if cfg.with_performers {
        let n = rng.gen_range(0..=2);
        for i in 0..n {
            let (kind, name) = PERFORMER_POOL[rng.gen_range(0..PERFORMER_POOL.len())];
            model.performers.push(GradePerformerRef {
                id: format!("p{i}"),
                kind: kind.into(),
                name: format!("{name} {i}"),
            });
        }
    }
    model.starts.push(GradeStart { id: "start".into() });
    model.ends.push(GradeEnd { id: "end".into() });
    let budget = rng.gen_range(1..=cfg.max_units.max(1));
    let mut gen = GradeGen {
        rng,
        model,
        next_task: 0,
        next_flow: 0,
        budget,
        cfg,
    };
    let (entry, exit) = gen.block(gen.budget);
    gen.flow("start", &entry);
    gen.flow(&exit, "end");
    gen.model
}

struct UmlGen {
    rng: StdRng,
    model: UmlActivity,
    next: usize,
    cfg: GenConfig,
}

impl UmlGen {
    fn node(&mut self, kind: UmlNodeKind) -> String {
        self.next += 1;
        let id = format!("n{}", self.next);
        let mut node = UmlNode::new(id.clone(), kind);
        if kind == UmlNodeKind::Action {
            node.name = Some(format!("A{}", self.next));
            if self.cfg.with_performers
                && !self.model.partitions.is_empty()
                && self.rng.gen_bool(0.4)
            {
                let p = self.rng.gen_range(0..self.model.partitions.len());
                node.partition = Some(self.model.partitions[p].id.clone());
            }
        }
        self.model.nodes.push(node);
        id
    }

    fn edge(&mut self, source: &str, target: &str, guard: Option<String>) -> String {
        self.next += 1;
        let id = format!("e{}", self.next);
        self.model.edges.push(UmlControlFlow {
            id: id.clone(),
            source: source.into(),
            target: target.into(),
            guard,
        });
        id
    }

    fn block(&mut self, budget: usize) -> (String, String) {
        if budget < 4 || self.rng.gen_bool(0.3) {
            let a = self.node(UmlNodeKind::Action);
            if budget >= 2 && self.rng.gen_bool(0.5) {
                let b = self.node(UmlNodeKind::Action);
                self.edge(&a, &b, None);
                return (a, b);
            }
            return (a.clone(), a);
        }
        let parallel = self.rng.gen_bool(0.5);
        let arms = if budget >= 8 && self.rng.gen_bool(0.3) {
            3
        } else {
            2
        };
        let (split, join) = if parallel {
            (
                self.node(UmlNodeKind::ForkNode),
                self.node(UmlNodeKind::JoinNode),
            )
        } else {
            (
                self.node(UmlNodeKind::DecisionNode),
                self.node(UmlNodeKind::MergeNode),
            )
        };
        let arm_budget = (budget - 2) / arms;
        let guard_style = self.rng.gen_range(0..3);
        for arm in 0..arms {
            let (entry, exit) = self.block(arm_budget.max(1));
            let guard = if !parallel && self.cfg.with_guards {
                match guard_style {
                    0 if arm == arms - 1 => Some("else".to_string()),
                    0 => Some(format!("case {arm}")),
                    1 if arm == 0 => Some("priority".to_string()),
                    _ => None,
                }
            } else {
                None
            };
            self.edge(&split, &entry, guard);
            self.edge(&exit, &join, None);
        }
        (split, join)
    }
}

/// A well-formed UML activity grown from `seed`.
pub fn gen_uml(seed: u64, cfg: GenConfig) -> UmlActivity {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut model = UmlActivity::new(format!("generated {seed}"));
    if cfg.with_performers {
        let n = rng.gen_range(0..=2);
        for i in 0..n {
            let (kind, name) = PERFORMER_POOL[rng.gen_range(0..PERFORMER_POOL.len())];
            model.partitions.push(UmlPartition {
                id: format!("pt{i}"),
                name: format!("{name} {i}"),
                kind: kind.into(),
            });
        }
    }
    let budget = rng.gen_range(1..=cfg.max_units.max(1));
    let mut gen = UmlGen {
        rng,
        model,
        next: 0,
        cfg,
    };
    let initial = gen.node(UmlNodeKind::InitialNode);
    let fin = gen.node(UmlNodeKind::ActivityFinalNode);
    let (entry, exit) = gen.block(budget);
    gen.edge(&initial, &entry, None);
    gen.edge(&exit, &fin, None);
    gen.model
}

/// Shuffle element order and rewrite every id, preserving structure.
pub fn permute_grade(seed: u64, model: &GradeProcess) -> GradeProcess {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = model.clone();
    let rename = |id: &str| format!("x-{id}");
    for t in &mut out.tasks {
        t.id = rename(&t.id);
        t.performer = t.performer.as_deref().map(rename);
        t.guards = t
            .guards
            .iter()
            .map(|(k, v)| (rename(k), v.clone()))
            .collect();
    }
    for s in &mut out.starts {
        s.id = rename(&s.id);
    }
    for e in &mut out.ends {
        e.id = rename(&e.id);
    }
    for f in &mut out.flows {
        f.id = rename(&f.id);
        f.source = rename(&f.source);
        f.target = rename(&f.target);
    }
    for p in &mut out.performers {
        p.id = rename(&p.id);
    }
    shuffle(&mut rng, &mut out.tasks);
    shuffle(&mut rng, &mut out.flows);
    shuffle(&mut rng, &mut out.performers);
    out
}

/// Shuffle element order and rewrite every id of an independent model.
pub fn permute_nibm(seed: u64, model: &NibmProcess) -> NibmProcess {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = model.clone();
    let rename = |id: &str| format!("x-{id}");
    for n in &mut out.nodes {
        n.id = rename(&n.id);
        n.performer = n.performer.as_deref().map(rename);
    }
    for t in &mut out.transitions {
        t.id = rename(&t.id);
        t.source = rename(&t.source);
        t.target = rename(&t.target);
    }
    for p in &mut out.performers {
        p.id = rename(&p.id);
    }
    shuffle(&mut rng, &mut out.nodes);
    shuffle(&mut rng, &mut out.transitions);
    shuffle(&mut rng, &mut out.performers);
    out
}

fn shuffle<T>(rng: &mut StdRng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// The worked five-task order handling example: one OR-branching task
/// ("Check stock") and one OR-triggered task ("Ship goods").
pub fn order_process() -> GradeProcess {
    let mut p = GradeProcess::new("order handling");
    p.performers.push(GradePerformerRef {
        id: "p1".into(),
        kind: "Role".into(),
        name: "Sales clerk".into(),
    });
    p.performers.push(GradePerformerRef {
        id: "p2".into(),
        kind: "OrganizationalUnit".into(),
        name: "Warehouse".into(),
    });
    p.starts.push(GradeStart { id: "s".into() });
    p.ends.push(GradeEnd { id: "z".into() });
    let mut receive = GradeTask::new("t1", "Receive order");
    receive.performer = Some("p1".into());
    let mut check = GradeTask::new("t2", "Check stock");
    check.branching = GateAttr::Or;
    check.guards.insert("f3".into(), "in stock".into());
    check.guards.insert("f4".into(), "else".into());
    let order_supplies = GradeTask::new("t3", "Order supplies");
    let mut ship = GradeTask::new("t4", "Ship goods");
    ship.triggering = GateAttr::Or;
    ship.performer = Some("p2".into());
    let invoice = GradeTask::new("t5", "Send invoice");
    p.tasks
        .extend([receive, check, order_supplies, ship, invoice]);
    for (id, s, t) in [
        ("f1", "s", "t1"),
        ("f2", "t1", "t2"),
        ("f3", "t2", "t4"),
        ("f4", "t2", "t3"),
        ("f5", "t3", "t4"),
        ("f6", "t4", "t5"),
        ("f7", "t5", "z"),
    ] {
        p.flows.push(GradeFlow {
            id: id.into(),
            source: s.into(),
            target: t.into(),
        });
    }
    p
}
