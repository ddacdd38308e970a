use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_lowered, Assignment, Hardware, MapError};
use crate::circuit::{Circuit, Gate, ScheduledCircuit};
use crate::graph::{interaction_graph, InteractionGraph, PartitionVector, Window};
use crate::partition::{kl_refine, partition, SizeSpec};

/// Half-open time interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn window(&self) -> Window {
        Window::Range {
            start: self.start,
            width: self.end - self.start,
        }
    }
}

/// Consecutive intervals `[i dt, (i+1) dt)` covering every gate start time and
/// the makespan. An empty circuit has no windows.
pub fn make_windows(sched: &ScheduledCircuit, dt: f64) -> Vec<Interval> {
    assert!(dt > 0.0 && dt.is_finite(), "window width must be positive");
    if sched.circuit.is_empty() {
        return Vec::new();
    }
    let by_makespan = (sched.makespan() / dt).ceil() as usize;
    let by_start = sched
        .start_times
        .iter()
        .map(|&t| (t / dt).floor() as usize + 1)
        .max()
        .unwrap_or(1);
    let count = by_makespan.max(by_start).max(1);
    (0..count)
        .map(|i| Interval {
            start: i as f64 * dt,
            end: (i + 1) as f64 * dt,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tag {
    /// Not a two-qubit gate.
    Single,
    Local,
    Remote,
}

/// A teleport at the start of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Migration {
    pub qubit: usize,
    pub from_qpu: usize,
    pub to_qpu: usize,
    pub from_slot: usize,
    pub to_slot: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowPlan {
    pub interval: Interval,
    /// Migrations in execution order.
    pub migrations: Vec<Migration>,
    /// Assignment after the migrations; holds for every gate in the window.
    pub assignment: Assignment,
    /// Indices of the window's gates, in circuit order.
    pub gates: Vec<usize>,
    pub remote_gates: usize,
    pub epr_consumed: usize,
    pub epr_limit: usize,
}

impl WindowPlan {
    pub fn over_limit(&self) -> bool {
        self.epr_consumed > self.epr_limit
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappedProgram {
    pub sched: ScheduledCircuit,
    pub hardware: Hardware,
    pub dt: f64,
    pub initial: Assignment,
    pub windows: Vec<WindowPlan>,
    /// Per gate of `sched.circuit`.
    pub tags: Vec<Tag>,
}

impl MappedProgram {
    pub fn final_assignment(&self) -> &Assignment {
        self.windows.last().map_or(&self.initial, |w| &w.assignment)
    }

    pub fn teleports(&self) -> usize {
        self.windows.iter().map(|w| w.migrations.len()).sum()
    }

    pub fn remote_gates(&self) -> usize {
        self.windows.iter().map(|w| w.remote_gates).sum()
    }

    /// Remote gates plus teleports.
    pub fn epr_consumed(&self) -> usize {
        self.windows.iter().map(|w| w.epr_consumed).sum()
    }

    pub fn windows_over_limit(&self) -> usize {
        self.windows.iter().filter(|w| w.over_limit()).count()
    }

    /// The program over physical slots: teleport markers at each window start,
    /// then the window's gates with remote two-qubit gates as `remote_cx`.
    pub fn physical_circuit(&self) -> Circuit {
        let c = &self.sched.circuit;
        let mut out = Circuit::new(self.hardware.num_slots(), c.num_bits);
        for w in &self.windows {
            for m in &w.migrations {
                out.push(Gate::Teleport {
                    src: m.from_slot,
                    dst: m.to_slot,
                })
                .expect("distinct slots");
            }
            for &i in &w.gates {
                let g = c.gates()[i].map_qubits(|q| w.assignment.slot(q));
                let g = match (g, self.tags[i]) {
                    (Gate::Cx { control, target }, Tag::Remote) => {
                        Gate::RemoteCx { control, target }
                    }
                    (g, _) => g,
                };
                out.push(g).expect("slots in range");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Migrate,
    Stay,
}

/// Change in remote gates if `q` alone moves from its current QPU to `target`,
/// given the QPUs of its window neighbours. Positive means fewer remote gates.
fn move_gain(q: usize, g: &InteractionGraph<f64>, qpu: &[usize], target: usize) -> f64 {
    let mut gain = 0.0;
    for (r, w) in g.neighbors(q) {
        if qpu[r] == target {
            gain += w;
        } else if qpu[r] == qpu[q] {
            gain -= w;
        }
    }
    gain
}

/// Moves `q` to its proposed QPU only when the remote gates it saves exceed the
/// one teleport plus the remote gates it creates.
pub fn migration_rule(
    q: usize,
    g: &InteractionGraph<f64>,
    current: &[usize],
    proposal: &PartitionVector,
) -> Decision {
    let target = proposal.cluster_of(q);
    if target != current[q] && move_gain(q, g, current, target) > 1.0 {
        Decision::Migrate
    } else {
        Decision::Stay
    }
}

enum Action {
    Single(usize),
    Pair(usize, usize),
}

/// Greedy application of the migration rule: repeatedly take the best action
/// with positive net EPR saving. Singles need room at the target; exchanges
/// need one QPU with two free slots and the other with one.
fn decide(
    g: &InteractionGraph<f64>,
    active: &[usize],
    current: &[usize],
    proposal: &[usize],
    hw: &Hardware,
) -> Vec<Action> {
    let mut qpu = current.to_vec();
    let mut count = vec![0usize; hw.num_qpus()];
    for &j in &qpu {
        count[j] += 1;
    }
    let free = |count: &[usize], j: usize| hw.data_capacity[j] + hw.epr_slots[j] - count[j];
    let mut moved = vec![false; qpu.len()];
    let mut actions = Vec::new();
    loop {
        // (net, is_pair, q, q')
        let mut best: Option<(f64, bool, usize, usize)> = None;
        let mut offer = |cand: (f64, bool, usize, usize)| {
            let better = match best {
                None => true,
                Some(b) => cand.0 > b.0 + 1e-9,
            };
            if cand.0 > 1e-9 && better {
                best = Some(cand);
            }
        };
        for &q in active {
            let t = proposal[q];
            if moved[q] || t == qpu[q] {
                continue;
            }
            let gain = move_gain(q, g, &qpu, t);
            if count[t] < hw.data_capacity[t] {
                offer((gain - 1.0, false, q, q));
            }
            let (fa, fb) = (free(&count, qpu[q]), free(&count, t));
            if fa.max(fb) < 2 || fa.min(fb) < 1 {
                continue;
            }
            for &r in active {
                if r <= q || moved[r] || qpu[r] != t || proposal[r] != qpu[q] {
                    continue;
                }
                let net = gain + move_gain(r, g, &qpu, qpu[q]) - 2.0 * g.weight(q, r) - 2.0;
                offer((net, true, q, r));
            }
        }
        let Some((_, pair, q, r)) = best else { break };
        let (a, b) = (qpu[q], proposal[q]);
        qpu[q] = b;
        moved[q] = true;
        count[a] -= 1;
        count[b] += 1;
        if pair {
            qpu[r] = a;
            moved[r] = true;
            count[b] -= 1;
            count[a] += 1;
            actions.push(Action::Pair(q, r));
        } else {
            actions.push(Action::Single(q));
        }
    }
    actions
}

/// Label permutation of `p` maximising agreement with `incumbent`, among
/// permutations that swap only equal-capacity clusters and keep pins. Identity
/// wins ties.
fn align_labels(
    p: &PartitionVector,
    incumbent: &PartitionVector,
    spec: &SizeSpec,
) -> PartitionVector {
    let k = spec.k();
    if k > 8 {
        return p.clone();
    }
    let relabel = |perm: &[usize]| {
        PartitionVector::new(p.assignment().iter().map(|&c| perm[c]).collect(), k)
            .expect("permutation keeps range")
    };
    let agree = |q: &PartitionVector| {
        (0..q.len())
            .filter(|&v| q.cluster_of(v) == incumbent.cluster_of(v))
            .count()
    };
    let mut best = (agree(p), p.clone());
    let mut perm: Vec<usize> = (0..k).collect();
    permute(&mut perm, 0, &mut |perm| {
        if (0..k).all(|j| spec.sizes[perm[j]] == spec.sizes[j]) {
            let q = relabel(perm);
            let s = agree(&q);
            if s > best.0 && spec.check(&q).is_ok() {
                best = (s, q);
            }
        }
    });
    best.1
}

fn permute(v: &mut [usize], i: usize, f: &mut impl FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

/// Proposed QPU per qubit for one window: the cheaper of spectral + KL and KL
/// warm-started from the incumbent, the incumbent winning ties. Idle qubits are
/// pinned to their current QPU, so they keep using its capacity.
fn propose(
    g: &InteractionGraph<f64>,
    active: &[usize],
    current: &[usize],
    hw: &Hardware,
) -> Result<Vec<usize>, MapError> {
    let k = hw.num_qpus();
    let mut spec = SizeSpec::new(hw.data_capacity.clone());
    for (q, &j) in current.iter().enumerate() {
        if active.binary_search(&q).is_err() {
            spec.pinned.insert(q, j);
        }
    }
    let incumbent = PartitionVector::new(current.to_vec(), k)?;
    let warm = kl_refine(g, &incumbent, &spec)?;
    let fresh = align_labels(&partition(g, &spec)?, &incumbent, &spec);
    let chosen = if g.cut_weight(&fresh) < g.cut_weight(&warm) {
        fresh
    } else {
        warm
    };
    Ok(chosen.assignment().to_vec())
}

/// Rolling-window re-assignment starting from `init`.
///
/// Per window `[i dt, (i+1) dt)`: partition the qubits active in the window,
/// decide migrations with [`migration_rule`] applied greedily, stage teleports
/// into seeded-random free slots, and tag each two-qubit gate local or remote.
pub fn local_optimize(
    sched: &ScheduledCircuit,
    hw: &Hardware,
    init: &Assignment,
    dt: f64,
    seed: u64,
) -> Result<MappedProgram, MapError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(MapError::BadWindow(dt));
    }
    check_lowered(&sched.circuit)?;
    init.check(hw)?;
    if init.len() != sched.circuit.num_qubits {
        return Err(MapError::Assignment(format!(
            "{} qubits assigned, circuit has {}",
            init.len(),
            sched.circuit.num_qubits
        )));
    }
    let intervals = make_windows(sched, dt);
    let mut members = vec![Vec::new(); intervals.len()];
    for (i, &t) in sched.start_times.iter().enumerate() {
        let w = ((t / dt).floor() as usize).min(intervals.len() - 1);
        members[w].push(i);
    }
    let graphs: Vec<InteractionGraph<f64>> = intervals
        .par_iter()
        .map(|iv| interaction_graph(sched, iv.window()))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = hw.epr_limit(dt);
    let mut tags = vec![Tag::Single; sched.circuit.len()];
    let mut current = init.clone();
    let mut windows = Vec::with_capacity(intervals.len());
    for (w, (interval, g)) in intervals.into_iter().zip(graphs).enumerate() {
        let active: Vec<usize> = (0..g.len()).filter(|&q| g.degree(q) > 0.0).collect();
        let mut migrations = Vec::new();
        if !active.is_empty() {
            let proposal = propose(&g, &active, current.qpus(), hw)?;
            for action in decide(&g, &active, current.qpus(), &proposal, hw) {
                let moves = match action {
                    Action::Single(q) => vec![q],
                    Action::Pair(q, r) => {
                        // Enter the QPU with more free slots first.
                        let free = |j| current.free_slots(hw, j).len();
                        if free(proposal[q]) >= 2 {
                            vec![q, r]
                        } else {
                            vec![r, q]
                        }
                    }
                };
                for q in moves {
                    migrations.push(teleport(&mut current, q, proposal[q], hw, &mut rng, w)?);
                }
            }
        }
        current.check(hw)?;
        let mut remote = 0;
        for &i in &members[w] {
            if let Some((a, b)) = sched.circuit.gates()[i].two_qubit_pair() {
                tags[i] = if current.qpu(a) != current.qpu(b) {
                    remote += 1;
                    Tag::Remote
                } else {
                    Tag::Local
                };
            }
        }
        windows.push(WindowPlan {
            interval,
            epr_consumed: remote + migrations.len(),
            migrations,
            assignment: current.clone(),
            gates: std::mem::take(&mut members[w]),
            remote_gates: remote,
            epr_limit: limit,
        });
    }
    Ok(MappedProgram {
        sched: sched.clone(),
        hardware: hw.clone(),
        dt,
        initial: init.clone(),
        windows,
        tags,
    })
}

fn teleport(
    a: &mut Assignment,
    q: usize,
    to: usize,
    hw: &Hardware,
    rng: &mut ChaCha8Rng,
    window: usize,
) -> Result<Migration, MapError> {
    let from = a.qpu(q);
    if a.free_slots(hw, from).is_empty() {
        return Err(MapError::EprSlotExhaustion { window });
    }
    let dst = *a
        .free_slots(hw, to)
        .choose(rng)
        .ok_or(MapError::EprSlotExhaustion { window })?;
    let m = Migration {
        qubit: q,
        from_qpu: from,
        to_qpu: to,
        from_slot: a.slot(q),
        to_slot: dst,
    };
    a.set(q, to, dst);
    Ok(m)
}
