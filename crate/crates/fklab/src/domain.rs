//! Discrete simply connected domains with alternating wired/free boundary arcs.
//!
//! A domain is described by a simple closed counterclockwise nearest-neighbor
//! loop on the **dual** lattice. The primal vertices enclosed by the loop form
//! the domain `Ω`; primal edges with both endpoints inside are **interior**
//! edges `E(Ω)`, and the primal edges crossed by the loop (exactly one endpoint
//! inside, one per loop edge) are **boundary-crossing** edges.
//!
//! A `BoundaryMarking` selects `2n` distinct dual vertices `b¹, …, b^{2n}` on
//! the loop in counterclockwise order and partitions the loop into alternating
//! arcs: `(b^{2k−1}, b^{2k})` **free** and `(b^{2k}, b^{2k+1})` **wired**
//! (indices mod 2n). Crossing edges under a wired arc are *permitted* —
//! together with the interior edges they form `Ê(Ω)`, the random-cluster
//! model's edge set — while crossing edges under a free arc are forbidden
//! (their dual edges are unconditionally open).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DualVertex, Edge, PrimalVertex};

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("boundary loop must have at least 4 vertices, got {0}")]
    LoopTooShort(usize),
    #[error("boundary loop is not a nearest-neighbor path at position {0}")]
    LoopNotNearestNeighbor(usize),
    #[error("boundary loop repeats the dual vertex {0:?}")]
    LoopNotSimple(DualVertex),
    #[error("boundary loop must be counterclockwise (signed area {0})")]
    LoopClockwise(i64),
    #[error("boundary loop encloses no primal vertex")]
    EmptyInterior,
    #[error("mesh size must be positive, got {0}")]
    BadMesh(f64),
    #[error("domain must have at least 1x1 cells")]
    BadCellCount,
    #[error("marked points must be even in count and at least 2, got {0}")]
    BadMarkedCount(usize),
    #[error("marked offset {0} exceeds boundary loop length {1}")]
    MarkedOffsetOutOfRange(usize, usize),
    #[error("marked offsets contain a duplicate at loop offset {0}")]
    DuplicateMarkedOffset(usize),
    #[error("marked offsets are not in counterclockwise cyclic order")]
    MarkedOffsetsNotCyclic,
    #[error("arc type list has length {got}, expected {expected}")]
    ArcTypeCount { got: usize, expected: usize },
    #[error("arc type at position {0} must be {1:?} (arcs alternate starting free)")]
    ArcTypeMismatch(usize, ArcKind),
    #[error("unknown arc type label {0:?} (expected \"free\" or \"wired\")")]
    UnknownArcType(String),
}

/// Whether an arc's crossing edges are forbidden (free) or permitted (wired).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Free,
    Wired,
}

/// A simply connected discrete domain: boundary loop, enclosed vertices, and
/// the interior / boundary-crossing edge classification. Immutable once built.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    mesh: f64,
    boundary_loop: Vec<DualVertex>,
    vertices: Vec<PrimalVertex>,
    vertex_set: HashSet<PrimalVertex>,
    interior_edges: Vec<Edge>,
    crossing_edges: Vec<Edge>,
    /// Crossed primal edge → index of the loop edge crossing it. Loop edge `j`
    /// joins `boundary_loop[j]` to `boundary_loop[(j+1) % len]`.
    loop_edge_of: HashMap<Edge, usize>,
    /// Rectangle cell counts when built by `build_rect_domain`.
    rect_cells: Option<(usize, usize)>,
}

impl LatticeDomain {
    /// Validating constructor from an explicit counterclockwise boundary loop.
    pub fn from_boundary_loop(boundary_loop: Vec<DualVertex>, mesh: f64) -> Result<Self, DomainError> {
        if !(mesh > 0.0) {
            return Err(DomainError::BadMesh(mesh));
        }
        let len = boundary_loop.len();
        if len < 4 {
            return Err(DomainError::LoopTooShort(len));
        }
        let mut seen = HashSet::with_capacity(len);
        for (j, &v) in boundary_loop.iter().enumerate() {
            if !seen.insert(v) {
                return Err(DomainError::LoopNotSimple(v));
            }
            let w = boundary_loop[(j + 1) % len];
            let step = (w.x - v.x, w.y - v.y);
            if !matches!(step, (1, 0) | (-1, 0) | (0, 1) | (0, -1)) {
                return Err(DomainError::LoopNotNearestNeighbor(j));
            }
        }
        // Shoelace on the dual centers; doubled to stay integral. CCW ⇔ positive.
        let mut area2: i64 = 0;
        for j in 0..len {
            let v = boundary_loop[j];
            let w = boundary_loop[(j + 1) % len];
            area2 += i64::from(v.x) * i64::from(w.y) - i64::from(w.x) * i64::from(v.y);
        }
        if area2 <= 0 {
            return Err(DomainError::LoopClockwise(area2));
        }

        // Enclosed primal vertices by even-odd ray casting. A primal vertex
        // (x, y) sits at half-integer offset from every loop segment, so the
        // horizontal ray toward +∞ meets no degeneracies: only vertical loop
        // segments (at center abscissa u + 1/2) can cross it.
        let min_x = boundary_loop.iter().map(|v| v.x).min().unwrap();
        let max_x = boundary_loop.iter().map(|v| v.x).max().unwrap() + 1;
        let min_y = boundary_loop.iter().map(|v| v.y).min().unwrap();
        let max_y = boundary_loop.iter().map(|v| v.y).max().unwrap() + 1;
        let mut vertical_segments: Vec<(f64, f64, f64)> = Vec::new(); // (x_center, y_low, y_high)
        for j in 0..len {
            let v = boundary_loop[j];
            let w = boundary_loop[(j + 1) % len];
            if v.x == w.x {
                let (vc, wc) = (v.center(), w.center());
                vertical_segments.push((vc.0, vc.1.min(wc.1), vc.1.max(wc.1)));
            }
        }
        let mut vertices = Vec::new();
        for y in min_y..=max_y {
            for x in min_x..=max_x {
                let (px, py) = (x as f64, y as f64);
                let crossings = vertical_segments
                    .iter()
                    .filter(|&&(sx, lo, hi)| sx > px && lo < py && py < hi)
                    .count();
                if crossings % 2 == 1 {
                    vertices.push(PrimalVertex::new(x, y));
                }
            }
        }
        if vertices.is_empty() {
            return Err(DomainError::EmptyInterior);
        }
        vertices.sort();
        let vertex_set: HashSet<_> = vertices.iter().copied().collect();

        // Interior edges: both endpoints enclosed. (A simple loop crosses each
        // primal edge at most once, so an edge between two enclosed vertices is
        // never crossed.)
        let mut interior_edges = Vec::new();
        for &v in &vertices {
            for e in [Edge::h(v.x, v.y), Edge::v(v.x, v.y)] {
                let (a, b) = e.endpoints();
                debug_assert_eq!(a, v);
                if vertex_set.contains(&b) {
                    interior_edges.push(e);
                }
            }
        }
        interior_edges.sort();

        // Crossing edges: one per loop edge (the primal edge whose dual segment
        // the loop traverses); exactly one endpoint must be enclosed.
        let mut crossing_edges = Vec::new();
        let mut loop_edge_of = HashMap::with_capacity(len);
        for j in 0..len {
            let v = boundary_loop[j];
            let w = boundary_loop[(j + 1) % len];
            let crossed = dual_step_crossed_edge(v, w);
            let (a, b) = crossed.endpoints();
            let inside = u8::from(vertex_set.contains(&a)) + u8::from(vertex_set.contains(&b));
            debug_assert_eq!(inside, 1, "loop edge {j} must cross the boundary exactly once");
            if loop_edge_of.insert(crossed, j).is_some() {
                // A simple dual loop uses each dual edge at most once.
                unreachable!("duplicate crossed edge on a simple loop");
            }
            crossing_edges.push(crossed);
        }
        crossing_edges.sort();

        Ok(Self {
            mesh,
            boundary_loop,
            vertices,
            vertex_set,
            interior_edges,
            crossing_edges,
            loop_edge_of,
            rect_cells: None,
        })
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// The counterclockwise boundary loop of dual vertices.
    pub fn boundary_loop(&self) -> &[DualVertex] {
        &self.boundary_loop
    }

    /// Enclosed primal vertices, sorted.
    pub fn vertices(&self) -> &[PrimalVertex] {
        &self.vertices
    }

    pub fn contains_vertex(&self, v: PrimalVertex) -> bool {
        self.vertex_set.contains(&v)
    }

    /// Interior primal edges `E(Ω)`, sorted.
    pub fn interior_edges(&self) -> &[Edge] {
        &self.interior_edges
    }

    /// Boundary-crossing primal edges (one per loop edge), sorted.
    pub fn crossing_edges(&self) -> &[Edge] {
        &self.crossing_edges
    }

    /// Index of the loop edge crossing the given primal edge, if any.
    pub fn loop_edge_of(&self, e: Edge) -> Option<usize> {
        self.loop_edge_of.get(&e).copied()
    }

    /// Rectangle cell counts when built by `build_rect_domain`.
    pub fn rect_cells(&self) -> Option<(usize, usize)> {
        self.rect_cells
    }

    /// Classify an arbitrary primal edge relative to this domain.
    pub fn edge_class(&self, e: Edge) -> EdgeClass {
        let (a, b) = e.endpoints();
        match (self.vertex_set.contains(&a), self.vertex_set.contains(&b)) {
            (true, true) => EdgeClass::Interior,
            (false, false) => EdgeClass::Exterior,
            _ => {
                let loop_edge = self
                    .loop_edge_of(e)
                    .expect("edge with one enclosed endpoint is crossed by the loop");
                EdgeClass::Crossing { loop_edge }
            }
        }
    }
}

/// Classification of a primal edge relative to a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Interior,
    Crossing { loop_edge: usize },
    Exterior,
}

/// The primal edge crossed by the dual-lattice step from `v` to `w`.
fn dual_step_crossed_edge(v: DualVertex, w: DualVertex) -> Edge {
    match (w.x - v.x, w.y - v.y) {
        // Horizontal dual step at height y+1/2 crosses the vertical primal edge
        // between the two faces.
        (1, 0) => Edge::v(v.x + 1, v.y),
        (-1, 0) => Edge::v(v.x, v.y),
        // Vertical dual step at abscissa x+1/2 crosses a horizontal primal edge.
        (0, 1) => Edge::h(v.x, v.y + 1),
        (0, -1) => Edge::h(v.x, v.y),
        d => panic!("{d:?} is not a dual nearest-neighbor step"),
    }
}

/// Alternating free/wired marking of a domain's boundary loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMarking {
    /// Offsets into the boundary loop, cyclically increasing; `offsets[0]` is b¹.
    offsets: Vec<usize>,
    loop_len: usize,
}

impl BoundaryMarking {
    /// Build a marking from loop offsets. `offsets[0]` is `b¹`; the arc from
    /// `b^{2k−1}` counterclockwise to `b^{2k}` is free, the next arc wired.
    pub fn new(domain: &LatticeDomain, offsets: Vec<usize>) -> Result<Self, DomainError> {
        let loop_len = domain.boundary_loop().len();
        let count = offsets.len();
        if count < 2 || count % 2 != 0 {
            return Err(DomainError::BadMarkedCount(count));
        }
        let mut seen = HashSet::new();
        for &o in &offsets {
            if o >= loop_len {
                return Err(DomainError::MarkedOffsetOutOfRange(o, loop_len));
            }
            if !seen.insert(o) {
                return Err(DomainError::DuplicateMarkedOffset(o));
            }
        }
        // Counterclockwise cyclic order: relative offsets from b¹ must be
        // strictly increasing.
        let base = offsets[0];
        let rel: Vec<usize> = offsets.iter().map(|&o| (o + loop_len - base) % loop_len).collect();
        if !rel.windows(2).all(|w| w[0] < w[1]) {
            return Err(DomainError::MarkedOffsetsNotCyclic);
        }
        Ok(Self { offsets, loop_len })
    }

    /// Number of (free, wired) arc pairs `n`.
    pub fn n_pairs(&self) -> usize {
        self.offsets.len() / 2
    }

    /// Loop offsets of the marked points `b¹, …, b^{2n}`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// The marked dual vertices in order `b¹, …, b^{2n}`.
    pub fn points<'a>(&self, domain: &'a LatticeDomain) -> Vec<DualVertex> {
        self.offsets.iter().map(|&o| domain.boundary_loop()[o]).collect()
    }

    /// The marked point `b^{index}` (1-based).
    pub fn point(&self, domain: &LatticeDomain, index: usize) -> DualVertex {
        domain.boundary_loop()[self.offsets[index - 1]]
    }

    /// Arc containing the given loop edge. Arc `i` (0-based) runs from marked
    /// point `i` to marked point `i+1`; even `i` is free (`β_{i/2+1}`), odd is
    /// wired. Returns `(arc index, kind)`.
    pub fn arc_of_loop_edge(&self, loop_edge: usize) -> (usize, ArcKind) {
        let count = self.offsets.len();
        let base = self.offsets[0];
        let rel = (loop_edge + self.loop_len - base) % self.loop_len;
        // Find the last marked point at or before this loop edge.
        let mut arc = count - 1;
        for i in 0..count {
            let rel_i = (self.offsets[i] + self.loop_len - base) % self.loop_len;
            if rel_i <= rel {
                arc = i;
            } else {
                break;
            }
        }
        let kind = if arc % 2 == 0 { ArcKind::Free } else { ArcKind::Wired };
        (arc, kind)
    }

    /// 1-based free-arc number of an arc index returned by `arc_of_loop_edge`.
    pub fn free_arc_number(arc: usize) -> usize {
        debug_assert_eq!(arc % 2, 0);
        arc / 2 + 1
    }

    /// 1-based wired-arc number of an arc index (wired arc k starts at b^{2k}).
    pub fn wired_arc_number(arc: usize) -> usize {
        debug_assert_eq!(arc % 2, 1);
        arc / 2 + 1
    }

    /// Loop offsets owned by the given arc index: from its starting marked point
    /// (inclusive) counterclockwise to its ending marked point (exclusive) — a
    /// marked point belongs to the arc counterclockwise-after it.
    pub fn arc_owned_offsets(&self, arc: usize) -> Vec<usize> {
        let count = self.offsets.len();
        let start = self.offsets[arc];
        let end = self.offsets[(arc + 1) % count];
        let mut out = Vec::new();
        let mut o = start;
        while o != end {
            out.push(o);
            o = (o + 1) % self.loop_len;
        }
        out
    }

    /// Arc kinds in order, for serialization.
    pub fn arc_kinds(&self) -> Vec<ArcKind> {
        (0..self.offsets.len())
            .map(|i| if i % 2 == 0 { ArcKind::Free } else { ArcKind::Wired })
            .collect()
    }
}

/// Build the canonical rectangular domain with `cells_x × cells_y` primal
/// vertices and the requested marking.
///
/// The vertices are `(0..cells_x) × (0..cells_y)`; the boundary loop starts at
/// the dual vertex centered at `(−1/2, −1/2)` and runs counterclockwise
/// (east along the bottom, north up the right side, west along the top, south
/// down the left side), with length `2(cells_x + cells_y)`.
pub fn build_rect_domain(
    cells_x: usize,
    cells_y: usize,
    mesh: f64,
    marked_offsets: Vec<usize>,
) -> Result<(LatticeDomain, BoundaryMarking), DomainError> {
    if cells_x < 1 || cells_y < 1 {
        return Err(DomainError::BadCellCount);
    }
    let nx = cells_x as i32;
    let ny = cells_y as i32;
    let mut boundary_loop = Vec::with_capacity(2 * (cells_x + cells_y));
    for x in -1..nx - 1 {
        boundary_loop.push(DualVertex::new(x, -1));
    }
    for y in -1..ny - 1 {
        boundary_loop.push(DualVertex::new(nx - 1, y));
    }
    for x in (0..nx).rev() {
        boundary_loop.push(DualVertex::new(x, ny - 1));
    }
    for y in (0..ny).rev() {
        boundary_loop.push(DualVertex::new(-1, y));
    }
    // Each side contributes its starting corner exactly once, so the loop
    // closes back to (-1, -1) with one vertex per dual boundary site.
    debug_assert_eq!(boundary_loop.len(), 2 * (cells_x + cells_y));
    let mut domain = LatticeDomain::from_boundary_loop(boundary_loop, mesh)?;
    domain.rect_cells = Some((cells_x, cells_y));
    let marking = BoundaryMarking::new(&domain, marked_offsets)?;
    Ok((domain, marking))
}

/// Serializable description of a rectangular domain plus marking.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DomainSpec {
    pub cells_x: usize,
    pub cells_y: usize,
    pub mesh: f64,
    /// Boundary-loop offsets of b¹, …, b^{2n} in counterclockwise order.
    pub marked: Vec<usize>,
    /// Arc kinds in order, alternating and starting free; stored for
    /// readability and validated on load.
    pub arc_types: Vec<ArcKind>,
}

impl DomainSpec {
    pub fn new(cells_x: usize, cells_y: usize, mesh: f64, marked: Vec<usize>) -> Self {
        let arc_types = (0..marked.len())
            .map(|i| if i % 2 == 0 { ArcKind::Free } else { ArcKind::Wired })
            .collect();
        Self { cells_x, cells_y, mesh, marked, arc_types }
    }

    pub fn build(&self) -> Result<(LatticeDomain, BoundaryMarking), DomainError> {
        let expected = self.marked.len();
        if self.arc_types.len() != expected {
            return Err(DomainError::ArcTypeCount { got: self.arc_types.len(), expected });
        }
        for (i, &kind) in self.arc_types.iter().enumerate() {
            let want = if i % 2 == 0 { ArcKind::Free } else { ArcKind::Wired };
            if kind != want {
                return Err(DomainError::ArcTypeMismatch(i, want));
            }
        }
        build_rect_domain(self.cells_x, self.cells_y, self.mesh, self.marked.clone())
    }

    /// Stable content hash (FNV-1a over the canonical JSON), used to key
    /// exported tables to the domain that produced them.
    pub fn stable_hash(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("domain spec serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The canonical 1×1 test domain: b¹ at the lower-left dual corner, b² at
    /// the upper-right, free arc = the bottom/right loop edges.
    pub fn unit_cell() -> (LatticeDomain, BoundaryMarking) {
        build_rect_domain(1, 1, 1.0, vec![0, 2]).expect("1x1 builds")
    }

    #[test]
    fn rect_loop_shape_and_counts() {
        let (domain, _) = unit_cell();
        assert_eq!(domain.boundary_loop().len(), 4);
        assert_eq!(domain.vertices(), &[PrimalVertex::new(0, 0)]);
        assert_eq!(domain.interior_edges(), &[] as &[Edge]);
        // Four crossing edges around the single vertex.
        assert_eq!(domain.crossing_edges().len(), 4);
        let expected: Vec<(f64, f64)> =
            vec![(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)];
        let centers: Vec<_> = domain.boundary_loop().iter().map(|d| d.center()).collect();
        assert_eq!(centers, expected);
    }

    #[test]
    fn rect_3x3_counts_match_hand_enumeration() {
        let (domain, _) = build_rect_domain(3, 3, 0.5, vec![0, 6]).unwrap();
        assert_eq!(domain.vertices().len(), 9);
        assert_eq!(domain.interior_edges().len(), 12);
        assert_eq!(domain.boundary_loop().len(), 12);
        assert_eq!(domain.crossing_edges().len(), 12);
    }

    #[test]
    fn loop_perimeter_scales_with_cells() {
        for (nx, ny) in [(1, 1), (2, 1), (2, 2), (3, 2), (5, 4)] {
            let (domain, _) = build_rect_domain(nx, ny, 1.0, vec![0, nx + ny]).unwrap();
            assert_eq!(domain.boundary_loop().len(), 2 * (nx + ny));
            assert_eq!(domain.vertices().len(), nx * ny);
            // Grid edge count: horizontal (nx−1)·ny + vertical nx·(ny−1).
            assert_eq!(domain.interior_edges().len(), (nx - 1) * ny + nx * (ny - 1));
            assert_eq!(domain.crossing_edges().len(), 2 * (nx + ny));
        }
    }

    #[test]
    fn crossing_edges_line_up_with_loop_edges() {
        let (domain, _) = build_rect_domain(2, 2, 1.0, vec![0, 4]).unwrap();
        for (j, _) in domain.boundary_loop().iter().enumerate() {
            let matches: Vec<_> = domain
                .crossing_edges()
                .iter()
                .filter(|&&e| domain.loop_edge_of(e) == Some(j))
                .collect();
            assert_eq!(matches.len(), 1, "loop edge {j} crosses exactly one primal edge");
        }
        // Spot check: the first loop edge (-1,-1)→(0,-1) crosses the vertical
        // primal edge (0,-1)-(0,0).
        assert_eq!(domain.loop_edge_of(Edge::v(0, -1)), Some(0));
    }

    #[test]
    fn edge_class_distinguishes_all_three() {
        let (domain, _) = build_rect_domain(2, 2, 1.0, vec![0, 4]).unwrap();
        assert_eq!(domain.edge_class(Edge::h(0, 0)), EdgeClass::Interior);
        assert!(matches!(domain.edge_class(Edge::v(0, -1)), EdgeClass::Crossing { .. }));
        assert_eq!(domain.edge_class(Edge::h(-2, 0)), EdgeClass::Exterior);
    }

    #[test]
    fn clockwise_loop_rejected() {
        let ccw = build_rect_domain(1, 1, 1.0, vec![0, 2]).unwrap().0;
        let mut cw: Vec<_> = ccw.boundary_loop().to_vec();
        cw.reverse();
        assert!(matches!(
            LatticeDomain::from_boundary_loop(cw, 1.0),
            Err(DomainError::LoopClockwise(_))
        ));
    }

    #[test]
    fn duplicate_marked_points_rejected() {
        assert!(matches!(
            build_rect_domain(2, 2, 1.0, vec![3, 3]),
            Err(DomainError::DuplicateMarkedOffset(3))
        ));
    }

    #[test]
    fn odd_marked_count_rejected() {
        assert!(matches!(
            build_rect_domain(2, 2, 1.0, vec![0, 2, 4]),
            Err(DomainError::BadMarkedCount(3))
        ));
    }

    #[test]
    fn out_of_cyclic_order_rejected() {
        // Offsets 0, 6, 2, 4 do not wind counterclockwise.
        assert!(matches!(
            build_rect_domain(2, 2, 1.0, vec![0, 6, 2, 4]),
            Err(DomainError::MarkedOffsetsNotCyclic)
        ));
    }

    #[test]
    fn marking_may_start_anywhere_on_the_loop() {
        let (domain, marking) = build_rect_domain(2, 2, 1.0, vec![5, 7, 1, 3]).unwrap();
        assert_eq!(marking.n_pairs(), 2);
        assert_eq!(marking.point(&domain, 1), domain.boundary_loop()[5]);
        // Arc 3 (wired) wraps around the loop seam from offset 3 back to 5.
        assert_eq!(marking.arc_owned_offsets(3), vec![3, 4]);
    }

    #[test]
    fn arcs_alternate_and_tile_the_loop() {
        let (domain, marking) = build_rect_domain(2, 2, 1.0, vec![0, 2, 4, 6]).unwrap();
        let loop_len = domain.boundary_loop().len();
        let mut counts = vec![0usize; 4];
        for j in 0..loop_len {
            let (arc, kind) = marking.arc_of_loop_edge(j);
            counts[arc] += 1;
            assert_eq!(kind, if arc % 2 == 0 { ArcKind::Free } else { ArcKind::Wired });
        }
        assert_eq!(counts, vec![2, 2, 2, 2]);
        // Ownership tiles the loop vertices exactly once.
        let mut owned: Vec<usize> = (0..4).flat_map(|a| marking.arc_owned_offsets(a)).collect();
        owned.sort();
        assert_eq!(owned, (0..loop_len).collect::<Vec<_>>());
    }

    #[test]
    fn unit_cell_marking_arcs() {
        let (domain, marking) = unit_cell();
        // Free arc: loop edges 0 (south) and 1 (east); wired arc: 2 (north), 3 (west).
        assert_eq!(marking.arc_of_loop_edge(0), (0, ArcKind::Free));
        assert_eq!(marking.arc_of_loop_edge(1), (0, ArcKind::Free));
        assert_eq!(marking.arc_of_loop_edge(2), (1, ArcKind::Wired));
        assert_eq!(marking.arc_of_loop_edge(3), (1, ArcKind::Wired));
        assert_eq!(marking.point(&domain, 1).center(), (-0.5, -0.5));
        assert_eq!(marking.point(&domain, 2).center(), (0.5, 0.5));
    }

    #[test]
    fn domain_spec_round_trip_and_hash_stability() {
        let spec = DomainSpec::new(2, 2, 0.5, vec![0, 2, 4, 6]);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"free\""));
        let back: DomainSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        back.build().unwrap();
        // The hash must be stable across runs (it keys exported tables).
        assert_eq!(spec.stable_hash(), DomainSpec::new(2, 2, 0.5, vec![0, 2, 4, 6]).stable_hash());
        assert_ne!(spec.stable_hash(), DomainSpec::new(2, 2, 0.5, vec![0, 2, 4, 7]).stable_hash());
    }

    #[test]
    fn arc_type_validation_on_load() {
        let mut spec = DomainSpec::new(1, 1, 1.0, vec![0, 2]);
        spec.arc_types = vec![ArcKind::Wired, ArcKind::Free];
        assert!(matches!(spec.build(), Err(DomainError::ArcTypeMismatch(0, ArcKind::Free))));
    }
}
