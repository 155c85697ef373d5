//! The deterministic exploration interface of a bond configuration.
//!
//! The interface is a path on the medial lattice started at the marked point
//! `b¹`: it walks with the wired/primal side on its left and the free/dual
//! side on its right, turning by ±π/2 at every medial vertex. The primal edge
//! whose midpoint is reached forces the turn: the path reflects off the edge
//! if it is open (or exterior) and off its dual if it is closed (or a
//! free-crossing edge), so it never crosses an open edge, an open dual edge,
//! or an exterior edge transversally. It terminates when a step leaves the
//! domain with an even-indexed marked point `b^{2k}` on its right.
//!
//! A prefix of the walk *reveals* the permitted edges whose midpoints it has
//! left behind; conditionally on a prefix, the unrevealed region splits into
//! independent sub-domains (an instance of the domain Markov property) plus
//! isolated leftover edges, reconstructed here as [`TracerSnapshot`].

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::domain::{ArcKind, BoundaryMarking, EdgeClass, LatticeDomain};
use crate::geometry::{turn45, DualVertex, Edge, LatticePoint, MedialStep, PrimalVertex};
use crate::model::{BondConfig, DualGraph, FkDomain};
use crate::unionfind::UnionFind;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("no initial medial step has b¹ on its right and the exterior on its left")]
    NoValidInitialStep,
    #[error("{0} initial medial steps qualify; the marking is degenerate")]
    AmbiguousInitialStep(usize),
    #[error("event arc set must be nonempty and even in size, got {0} arcs")]
    BadEventArcCount(usize),
    #[error("free arc number {0} out of range 1..={1}")]
    BadFreeArcNumber(usize, usize),
}

/// Role of a primal edge during exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRole {
    /// Interior or wired-crossing: state is random, index into the arena.
    Permitted(usize),
    /// Crossing a free arc: unconditionally closed (its dual is open).
    FreeCrossing,
    /// Fully outside the domain: the path bounces off it as if open.
    Exterior,
}

/// Verdict about the last step of a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TipState {
    /// The step leaves the domain with `b^{marked_index}` (even) on its right.
    Exit { marked_index: usize },
    /// The walk continues; the turn is decided by `edge`. `forced` is the
    /// effective state when it is not random (exterior, free-crossing, or
    /// revealed earlier in the prefix).
    Pending { edge: Edge, forced: Option<bool> },
}

/// A complete traced interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedialPath {
    steps: Vec<MedialStep>,
    revealed_open: Vec<Edge>,
    revealed_closed: Vec<Edge>,
    exit_index: Option<usize>,
}

impl MedialPath {
    pub fn steps(&self) -> &[MedialStep] {
        &self.steps
    }

    /// Permitted edges revealed open, in reveal order.
    pub fn revealed_open(&self) -> &[Edge] {
        &self.revealed_open
    }

    /// Permitted edges revealed closed, in reveal order.
    pub fn revealed_closed(&self) -> &[Edge] {
        &self.revealed_closed
    }

    /// Dual edges known open: the duals of the revealed closed edges.
    pub fn revealed_dual(&self) -> impl Iterator<Item = (DualVertex, DualVertex)> + '_ {
        self.revealed_closed.iter().map(|e| e.dual_endpoints())
    }

    /// The even marked-point index `I` the interface exited at.
    pub fn exit_index(&self) -> Option<usize> {
        self.exit_index
    }
}

/// The exploration engine for one marked domain.
#[derive(Debug)]
pub struct Explorer<'a> {
    domain: &'a LatticeDomain,
    marking: &'a BoundaryMarking,
    fk: FkDomain,
    /// Dual vertices of the domain (boundary loop and interior), in the
    /// canonical dual-graph order.
    duals: Vec<DualVertex>,
    dual_index: HashMap<DualVertex, usize>,
    /// Marked dual vertex → 1-based index of the marked point.
    marked_index: HashMap<DualVertex, usize>,
    initial: MedialStep,
}

impl<'a> Explorer<'a> {
    pub fn new(domain: &'a LatticeDomain, marking: &'a BoundaryMarking) -> Result<Self, TraceError> {
        let fk = FkDomain::from_marked_domain(domain, marking);
        let duals: Vec<DualVertex> = DualGraph::new(&fk).vertices().to_vec();
        let dual_index = duals.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        let marked_index = marking
            .offsets()
            .iter()
            .enumerate()
            .map(|(i, &o)| (domain.boundary_loop()[o], i + 1))
            .collect();
        let initial = Self::find_initial_step(domain, marking)?;
        Ok(Self { domain, marking, fk, duals, dual_index, marked_index, initial })
    }

    /// The unique step into the midpoint of the last wired-crossing edge
    /// before `b¹` with `b¹` on its right and an exterior vertex on its left.
    fn find_initial_step(
        domain: &LatticeDomain,
        marking: &BoundaryMarking,
    ) -> Result<MedialStep, TraceError> {
        let loop_len = domain.boundary_loop().len();
        let b1_offset = marking.offsets()[0];
        let b1 = domain.boundary_loop()[b1_offset];
        let wired_loop_edge = (b1_offset + loop_len - 1) % loop_len;
        debug_assert_eq!(marking.arc_of_loop_edge(wired_loop_edge).1, ArcKind::Wired);
        let entry_edge = domain
            .crossing_edges()
            .iter()
            .copied()
            .find(|&e| domain.loop_edge_of(e) == Some(wired_loop_edge))
            .expect("every loop edge crosses a primal edge");
        let candidates: Vec<MedialStep> = crate::geometry::Diag::ALL
            .into_iter()
            .map(|dir| MedialStep { head: entry_edge, dir })
            .filter(|step| {
                let sides = step.sides();
                matches!(sides.right, LatticePoint::Dual(d) if d == b1)
                    && matches!(sides.left, LatticePoint::Primal(v) if !domain.contains_vertex(v))
            })
            .collect();
        match candidates.len() {
            0 => Err(TraceError::NoValidInitialStep),
            1 => Ok(candidates[0]),
            k => Err(TraceError::AmbiguousInitialStep(k)),
        }
    }

    pub fn domain(&self) -> &LatticeDomain {
        self.domain
    }

    pub fn marking(&self) -> &BoundaryMarking {
        self.marking
    }

    /// The full-domain random-cluster arena (permitted-edge indexing).
    pub fn fk(&self) -> &FkDomain {
        &self.fk
    }

    pub fn initial_step(&self) -> MedialStep {
        self.initial
    }

    pub fn edge_role(&self, e: Edge) -> EdgeRole {
        match self.domain.edge_class(e) {
            EdgeClass::Exterior => EdgeRole::Exterior,
            EdgeClass::Interior => {
                EdgeRole::Permitted(self.fk.permitted_index(e).expect("interior edge is permitted"))
            }
            EdgeClass::Crossing { loop_edge } => match self.marking.arc_of_loop_edge(loop_edge).1 {
                ArcKind::Wired => {
                    EdgeRole::Permitted(self.fk.permitted_index(e).expect("wired crossing is permitted"))
                }
                ArcKind::Free => EdgeRole::FreeCrossing,
            },
        }
    }

    /// Exit test for a single step: leaves the domain (exterior vertex on the
    /// left) with an even-indexed marked point on the right.
    pub fn exit_at(&self, step: MedialStep) -> Option<usize> {
        let sides = step.sides();
        let LatticePoint::Primal(left) = sides.left else { return None };
        let LatticePoint::Dual(right) = sides.right else { return None };
        if self.domain.contains_vertex(left) {
            return None;
        }
        match self.marked_index.get(&right) {
            Some(&i) if i % 2 == 0 => Some(i),
            _ => None,
        }
    }

    /// Walk the interface for a bond configuration. Deterministic.
    pub fn trace(&self, bonds: &BondConfig) -> MedialPath {
        let mut steps = vec![self.initial];
        let mut revealed_open = Vec::new();
        let mut revealed_closed = Vec::new();
        let mut seen: HashSet<Edge> = HashSet::new();
        let step_cap = 64 * (self.domain.interior_edges().len() + self.domain.crossing_edges().len() + 4);
        let exit_index = loop {
            let last = *steps.last().expect("path nonempty");
            if let Some(i) = self.exit_at(last) {
                break Some(i);
            }
            let edge = last.head;
            let open = match self.edge_role(edge) {
                EdgeRole::Exterior => true,
                EdgeRole::FreeCrossing => false,
                EdgeRole::Permitted(idx) => {
                    let state = bonds.is_open(idx);
                    if seen.insert(edge) {
                        if state {
                            revealed_open.push(edge);
                        } else {
                            revealed_closed.push(edge);
                        }
                    }
                    state
                }
            };
            steps.push(next_step(last, open));
            assert!(steps.len() <= step_cap, "interface failed to terminate");
        };
        MedialPath { steps, revealed_open, revealed_closed, exit_index }
    }

    /// Classify the tip of a prefix: exit, or the pending edge with any
    /// forcing (exterior/free-crossing/previously revealed inside the prefix).
    pub fn tip_state(&self, prefix: &[MedialStep]) -> TipState {
        let last = *prefix.last().expect("prefix nonempty");
        if let Some(i) = self.exit_at(last) {
            return TipState::Exit { marked_index: i };
        }
        let edge = last.head;
        let forced = match self.edge_role(edge) {
            EdgeRole::Exterior => Some(true),
            EdgeRole::FreeCrossing => Some(false),
            EdgeRole::Permitted(_) => replay_reveals(prefix).get(&edge).copied(),
        };
        TipState::Pending { edge, forced }
    }

    /// The permitted-edge states a prefix has revealed (forced bounces off
    /// exterior and free-crossing edges carry no information and are dropped).
    pub fn revealed_states(&self, prefix: &[MedialStep]) -> HashMap<Edge, bool> {
        replay_reveals(prefix)
            .into_iter()
            .filter(|&(e, _)| matches!(self.edge_role(e), EdgeRole::Permitted(_)))
            .collect()
    }

    /// Extend a prefix by one step, with the pending edge in the given state.
    pub fn extend(&self, prefix: &[MedialStep], open: bool) -> Vec<MedialStep> {
        let last = *prefix.last().expect("prefix nonempty");
        debug_assert!(self.exit_at(last).is_none(), "cannot extend past the exit");
        let mut steps = prefix.to_vec();
        steps.push(next_step(last, open));
        steps
    }

    /// Conditional sub-domain decomposition after a prefix.
    pub fn snapshot(&self, prefix: &[MedialStep]) -> TracerSnapshot {
        let reveals = self.revealed_states(prefix);
        let mut revealed_open = Vec::new();
        let mut revealed_closed = Vec::new();
        // Reveal order: follow the prefix.
        let mut listed: HashSet<Edge> = HashSet::new();
        for step in &prefix[..prefix.len() - 1] {
            if let EdgeRole::Permitted(_) = self.edge_role(step.head) {
                if listed.insert(step.head) {
                    if reveals[&step.head] {
                        revealed_open.push(step.head);
                    } else {
                        revealed_closed.push(step.head);
                    }
                }
            }
        }

        // Vertices swallowed by the trace: endpoints of revealed open edges
        // join the exterior wired cluster.
        let mut removed: BTreeSet<PrimalVertex> = BTreeSet::new();
        for &e in &revealed_open {
            let (a, b) = e.endpoints();
            for v in [a, b] {
                if self.domain.contains_vertex(v) {
                    removed.insert(v);
                }
            }
        }

        // Components of the unremoved vertices under unrevealed interior edges.
        let live: Vec<PrimalVertex> =
            self.domain.vertices().iter().copied().filter(|v| !removed.contains(v)).collect();
        let live_index: HashMap<PrimalVertex, usize> =
            live.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(live.len());
        let revealed_set: HashSet<Edge> = reveals.keys().copied().collect();
        for &e in self.domain.interior_edges() {
            if revealed_set.contains(&e) {
                continue;
            }
            let (a, b) = e.endpoints();
            if let (Some(&ia), Some(&ib)) = (live_index.get(&a), live_index.get(&b)) {
                uf.union(ia, ib);
            }
        }
        let mut component_id: HashMap<usize, usize> = HashMap::new();
        let mut component_vertices: Vec<Vec<PrimalVertex>> = Vec::new();
        let mut home: HashMap<PrimalVertex, usize> = HashMap::new();
        for (i, &v) in live.iter().enumerate() {
            let root = uf.find(i);
            let next_id = component_vertices.len();
            let id = *component_id.entry(root).or_insert(next_id);
            if id == component_vertices.len() {
                component_vertices.push(Vec::new());
            }
            component_vertices[id].push(v);
            home.insert(v, id);
        }

        // Distribute the unrevealed edges: per-component permitted/free sets
        // and ownerless leftovers (independently open with probability p).
        let mut per_component: Vec<(Vec<Edge>, Vec<Edge>)> =
            vec![(Vec::new(), Vec::new()); component_vertices.len()];
        let mut orphan_edges = Vec::new();
        let component_of = |v: PrimalVertex| -> Option<usize> { home.get(&v).copied() };
        // Permitted edges not yet revealed.
        for pe in self.fk.permitted() {
            if revealed_set.contains(&pe.edge) {
                continue;
            }
            let (a, b) = pe.edge.endpoints();
            let homes: Vec<usize> = [a, b]
                .into_iter()
                .filter_map(|v| if removed.contains(&v) { None } else { component_of(v) })
                .collect();
            match homes.as_slice() {
                [] => orphan_edges.push(pe.edge),
                [c] => per_component[*c].0.push(pe.edge),
                [c1, c2] => {
                    assert_eq!(c1, c2, "an unrevealed interior edge cannot straddle components");
                    per_component[*c1].0.push(pe.edge);
                }
                _ => unreachable!(),
            }
        }
        // Free boundary pieces of each component: original free-crossing edges
        // and revealed closed edges (slits and walls).
        for &e in self.fk.free_edges().iter().chain(&revealed_closed) {
            let (a, b) = e.endpoints();
            let mut touched: Vec<usize> = [a, b]
                .into_iter()
                .filter_map(|v| if removed.contains(&v) { None } else { component_of(v) })
                .collect();
            touched.dedup();
            for &c in &touched {
                per_component[c].1.push(e);
            }
        }

        let marked_points = self.marking.points(self.domain);
        let components: Vec<SubComponent> = component_vertices
            .into_iter()
            .zip(per_component)
            .map(|(vertices, (permitted, free))| {
                let vertex_set: HashSet<PrimalVertex> = vertices.iter().copied().collect();
                let fk = FkDomain::from_parts(vertices.clone(), permitted, free, |v| {
                    vertex_set.contains(&v)
                });
                let marked_on_boundary = marked_points
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.primal_neighbors().iter().any(|v| vertex_set.contains(v)))
                    .map(|(i, _)| i + 1)
                    .collect();
                SubComponent { fk, marked_on_boundary }
            })
            .collect();

        let tip = *prefix.last().expect("prefix nonempty");
        let cumulative_turn45 = prefix
            .windows(2)
            .map(|w| {
                let t = turn45(w[0].dir.k45(), w[1].dir.k45());
                debug_assert_eq!(t.abs(), 2, "interface turns by ±π/2 at every step");
                t
            })
            .sum();
        TracerSnapshot {
            time: prefix.len(),
            tip,
            cumulative_turn45,
            revealed_open,
            revealed_closed,
            removed,
            components,
            orphan_edges,
            tip_state: self.tip_state(prefix),
        }
    }

    /// Planar face components of the domain cut by the committed steps of the
    /// curve: nodes are the medial-graph faces (primal vertices and dual
    /// vertices of Ω), adjacent across each diagonal (primal, dual) corner the
    /// curve has not traversed. Returns component ids per fk-vertex index and
    /// per dual index.
    fn face_component_ids(&self, cut_steps: &[MedialStep]) -> (Vec<usize>, Vec<usize>) {
        let np = self.fk.n_vertices();
        let nd = self.duals.len();
        let cuts: HashSet<(PrimalVertex, DualVertex)> =
            cut_steps.iter().map(|s| s.flanks()).collect();
        let mut uf = UnionFind::new(np + nd);
        for (di, &d) in self.duals.iter().enumerate() {
            for v in d.primal_neighbors() {
                let Some(vi) = self.fk.vertex_index(v) else { continue };
                if cuts.contains(&(v, d)) {
                    continue;
                }
                uf.union(vi as usize, np + di);
            }
        }
        let primal = (0..np).map(|i| uf.find(i)).collect();
        let dual = (0..nd).map(|i| uf.find(np + i)).collect();
        (primal, dual)
    }

    /// Disconnection bookkeeping: τ is the index of the first step whose
    /// committed predecessors (all strictly earlier steps) split the marked
    /// points `b², …, b^{2n}` across different planar face components.
    /// `None` for two-marked-point domains and for paths that never disconnect
    /// (a curve hugging the wired arc from outside cuts nothing).
    pub fn disconnection_split(&self, path: &MedialPath) -> Option<DisconnectionSplit> {
        let n2 = 2 * self.marking.n_pairs();
        if n2 == 2 {
            return None;
        }
        let marked_dual: Vec<usize> = self
            .marking
            .points(self.domain)
            .iter()
            .map(|b| self.dual_index[b])
            .collect();
        for t in 0..path.steps().len() {
            let (primal_comp, dual_comp) = self.face_component_ids(&path.steps()[..t]);
            // ids[k] is the component of marked point k + 2.
            let ids: Vec<usize> = (2..=n2).map(|i| dual_comp[marked_dual[i - 1]]).collect();
            if ids.windows(2).all(|w| w[0] == w[1]) {
                continue;
            }
            // J: the longest suffix b^{s}, …, b^{2n} sharing one component
            // starts at s = J + 1.
            let last = *ids.last().expect("n ≥ 2");
            let mut s = n2;
            while s > 2 && ids[s - 3] == last {
                s -= 1;
            }
            let j = s - 1;
            let removed: HashSet<PrimalVertex> = self
                .revealed_states(&path.steps()[..=t])
                .into_iter()
                .filter(|&(_, open)| open)
                .flat_map(|(e, _)| {
                    let (a, b) = e.endpoints();
                    [a, b]
                })
                .collect();
            let side = |comp: usize| SplitSide {
                marked: (2..=n2).filter(|&i| dual_comp[marked_dual[i - 1]] == comp).collect(),
                vertices: self
                    .fk
                    .vertices()
                    .iter()
                    .enumerate()
                    .filter(|&(vi, v)| primal_comp[vi] == comp && !removed.contains(v))
                    .map(|(_, &v)| v)
                    .collect(),
            };
            let left_id = ids[0];
            let right_id = last;
            debug_assert_ne!(left_id, right_id, "a split separates b² from b^{{2n}}");
            return Some(DisconnectionSplit {
                tau: t,
                j,
                left: side(left_id),
                right: side(right_id),
            });
        }
        None
    }

    /// Partition of the wired arcs induced by open connections inside Ω.
    pub fn connection_pattern(&self, bonds: &BondConfig) -> ConnectionPattern {
        let n = self.marking.n_pairs();
        let n_vertices = self.fk.n_vertices();
        // Slots: interior vertices, then one node per wired arc.
        let mut uf = UnionFind::new(n_vertices + n);
        for (idx, pe) in self.fk.permitted().iter().enumerate() {
            if !bonds.is_open(idx) {
                continue;
            }
            let resolve = |v: PrimalVertex| -> usize {
                match self.fk.vertex_index(v) {
                    Some(i) => i as usize,
                    None => {
                        // Exterior endpoint of a wired-crossing edge: attach to
                        // its arc's node.
                        let loop_edge = self
                            .domain
                            .loop_edge_of(pe.edge)
                            .expect("permitted edge with an exterior endpoint crosses the loop");
                        let (arc, kind) = self.marking.arc_of_loop_edge(loop_edge);
                        debug_assert_eq!(kind, ArcKind::Wired);
                        n_vertices + (BoundaryMarking::wired_arc_number(arc) - 1)
                    }
                }
            };
            let (a, b) = pe.edge.endpoints();
            uf.union(resolve(a), resolve(b));
        }
        let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
        for arc in 1..=n {
            let root = uf.find(n_vertices + arc - 1);
            blocks.entry(root).or_default().push(arc);
        }
        let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
        blocks.sort();
        ConnectionPattern { n_arcs: n, blocks }
    }

    /// True iff every dual cluster touches an even number of the free arcs in
    /// `s` (1-based free-arc numbers).
    pub fn event_s_indicator(
        &self,
        dual: &DualGraph,
        bonds: &BondConfig,
        s: &[usize],
    ) -> Result<bool, TraceError> {
        let n = self.marking.n_pairs();
        if s.is_empty() || s.len() % 2 != 0 {
            return Err(TraceError::BadEventArcCount(s.len()));
        }
        for &k in s {
            if k < 1 || k > n {
                return Err(TraceError::BadFreeArcNumber(k, n));
            }
        }
        let mut uf = dual.clusters(bonds);
        // touched[root] ← set of arcs in S owning a loop vertex of that cluster.
        let mut touched: HashMap<usize, HashSet<usize>> = HashMap::new();
        for &k in s {
            let arc_index = 2 * (k - 1);
            for offset in self.marking.arc_owned_offsets(arc_index) {
                let vertex = self.domain.boundary_loop()[offset];
                let root = uf.find(
                    dual.vertex_index(vertex).expect("loop vertex is in the dual graph") as usize,
                );
                touched.entry(root).or_default().insert(k);
            }
        }
        Ok(touched.values().all(|arcs| arcs.len() % 2 == 0))
    }
}

/// Pure turn rule: reflect off the edge if open, off its dual if closed.
pub fn next_step(prev: MedialStep, open: bool) -> MedialStep {
    let axis = if open { prev.head.axis } else { prev.head.axis.other() };
    let dir = prev.dir.reflect_across(axis);
    let (mx, my) = prev.head.midpoint_doubled();
    let (dx, dy) = dir.delta();
    let head = Edge::from_midpoint_doubled((mx + dx, my + dy));
    MedialStep { head, dir }
}

/// Recover the revealed permitted-edge states encoded in a prefix: the state
/// of each non-final head follows from the observed turn.
pub fn replay_reveals(prefix: &[MedialStep]) -> HashMap<Edge, bool> {
    let mut states = HashMap::new();
    for w in prefix.windows(2) {
        let edge = w[0].head;
        let open_turn = w[0].dir.reflect_across(edge.axis);
        let closed_turn = w[0].dir.reflect_across(edge.axis.other());
        let open = if w[1].dir == open_turn {
            true
        } else {
            assert_eq!(w[1].dir, closed_turn, "prefix step is not a legal turn");
            false
        };
        let previous = states.insert(edge, open);
        assert!(previous.is_none_or(|s| s == open), "prefix revisits an edge inconsistently");
    }
    states
}

/// Conditional description of the unrevealed region after a prefix.
#[derive(Debug)]
pub struct TracerSnapshot {
    time: usize,
    tip: MedialStep,
    cumulative_turn45: i32,
    revealed_open: Vec<Edge>,
    revealed_closed: Vec<Edge>,
    removed: BTreeSet<PrimalVertex>,
    components: Vec<SubComponent>,
    orphan_edges: Vec<Edge>,
    tip_state: TipState,
}

/// One connected component of the unrevealed region: a random-cluster arena
/// whose free edges are the original free crossings plus the revealed slits.
#[derive(Debug)]
pub struct SubComponent {
    pub fk: FkDomain,
    /// 1-based marked points with a primal neighbor in this component.
    pub marked_on_boundary: Vec<usize>,
}

impl TracerSnapshot {
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn tip(&self) -> MedialStep {
        self.tip
    }

    /// Total signed turning of the prefix in 45° units (each step ±2).
    pub fn cumulative_turn45(&self) -> i32 {
        self.cumulative_turn45
    }

    pub fn revealed_open(&self) -> &[Edge] {
        &self.revealed_open
    }

    pub fn revealed_closed(&self) -> &[Edge] {
        &self.revealed_closed
    }

    /// Vertices absorbed into the exterior wired cluster.
    pub fn removed(&self) -> &BTreeSet<PrimalVertex> {
        &self.removed
    }

    pub fn components(&self) -> &[SubComponent] {
        &self.components
    }

    /// Unrevealed permitted edges with no live endpoint; conditionally i.i.d.
    /// open with probability p.
    pub fn orphan_edges(&self) -> &[Edge] {
        &self.orphan_edges
    }

    pub fn tip_state(&self) -> TipState {
        self.tip_state
    }

    pub fn component_of_vertex(&self, v: PrimalVertex) -> Option<usize> {
        self.components.iter().position(|c| c.fk.vertex_index(v).is_some())
    }

    /// Conditional probability that the pending edge is open, given the
    /// prefix. `p` is the bond probability.
    pub fn pending_open_probability(&self, p: f64) -> Option<f64> {
        let TipState::Pending { edge, forced } = self.tip_state else { return None };
        if let Some(state) = forced {
            return Some(if state { 1.0 } else { 0.0 });
        }
        if self.orphan_edges.contains(&edge) {
            return Some(p);
        }
        let component = self
            .components
            .iter()
            .find(|c| c.fk.permitted_index(edge).is_some())
            .expect("pending edge lives in some component");
        let idx = component.fk.permitted_index(edge).expect("just found");
        Some(component.fk.edge_open_probability(idx, p).expect("component is enumerable"))
    }
}

/// Outcome of the disconnection search.
#[derive(Debug)]
pub struct DisconnectionSplit {
    /// Index of the first step whose committed predecessors split the marked
    /// points across planar components.
    pub tau: usize,
    /// `b², …, b^J` separate from `b^{J+1}, …, b^{2n}`.
    pub j: usize,
    /// The planar side carrying `b²` (and, at a first split, `b³, …, b^J`).
    pub left: SplitSide,
    /// The planar side carrying `b^{2n}` (and `b^{J+1}, …`).
    pub right: SplitSide,
}

/// One side of a disconnection: its marked points and its live vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSide {
    /// 1-based marked indices (from 2..=2n) in this planar component.
    pub marked: Vec<usize>,
    /// Unswallowed primal vertices in this planar component.
    pub vertices: Vec<PrimalVertex>,
}

/// Partition of the wired arcs into connected blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnectionPattern {
    n_arcs: usize,
    /// Sorted blocks of 1-based wired-arc numbers.
    blocks: Vec<Vec<usize>>,
}

impl ConnectionPattern {
    pub fn n_arcs(&self) -> usize {
        self.n_arcs
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_all_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Restricted-growth string: position k holds the block label of arc k+1,
    /// labels numbered by first appearance ("0010" = arcs {1,2,4} together,
    /// arc 3 separate).
    pub fn restricted_growth_string(&self) -> String {
        let mut label_of_arc = vec![0usize; self.n_arcs];
        for (label_source, block) in self.blocks.iter().enumerate() {
            for &arc in block {
                label_of_arc[arc - 1] = label_source;
            }
        }
        // Renumber by first appearance.
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut out = String::new();
        for raw in label_of_arc {
            let next = seen.len();
            let label = *seen.entry(raw).or_insert(next);
            out.push_str(&label.to_string());
        }
        out
    }
}

/// Canonical index of the undirected medial edge a step traverses: each
/// medial edge separates exactly one (primal, dual) diagonal pair; indexed as
/// `4·(dual index in the dual graph) + neighbor slot`.
pub fn medial_edge_index(dual: &DualGraph, step: MedialStep) -> Option<usize> {
    let (primal, dual_vertex) = step.flanks();
    let d = dual.vertex_index(dual_vertex)? as usize;
    let slot = dual_vertex.primal_neighbors().iter().position(|&v| v == primal)?;
    Some(4 * d + slot)
}
