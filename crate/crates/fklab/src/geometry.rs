//! Exact integer geometry of the square lattice, its dual, and its medial graph.
//!
//! Three interleaved lattices carry the model:
//!
//! * **primal** vertices at integer points `(x, y)` (physical position `δ·(x, y)`),
//! * **dual** vertices at half-integer points `(x + 1/2, y + 1/2)`,
//! * **medial** vertices at primal-edge midpoints; medial edges join midpoints of
//!   primal edges sharing one endpoint and one face, so a medial step is a
//!   half-diagonal and every medial path turns by ±π/2 at each vertex.
//!
//! To keep all combinatorics exact we store positions in *doubled coordinates*:
//! a primal vertex doubles to `(even, even)`, a dual vertex to `(odd, odd)`, and an
//! edge midpoint to a point with odd coordinate sum. A medial step is then the
//! integer vector `(±1, ±1)`. Turning angles are tracked in integer multiples of
//! 45° so winding phases are exact until the final complex exponential.

use serde::{Deserialize, Serialize};

/// A primal lattice vertex at integer coordinates (physical position `δ·(x, y)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimalVertex {
    pub x: i32,
    pub y: i32,
}

impl PrimalVertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Position in doubled coordinates: `(even, even)`.
    pub const fn doubled(self) -> (i32, i32) {
        (2 * self.x, 2 * self.y)
    }
}

/// A dual lattice vertex, keyed by the primal vertex at its lower-left; its
/// center sits at `(x + 1/2, y + 1/2)` in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualVertex {
    pub x: i32,
    pub y: i32,
}

impl DualVertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Position in doubled coordinates: `(odd, odd)`.
    pub const fn doubled(self) -> (i32, i32) {
        (2 * self.x + 1, 2 * self.y + 1)
    }

    /// Center in lattice units.
    pub fn center(self) -> (f64, f64) {
        (self.x as f64 + 0.5, self.y as f64 + 0.5)
    }

    /// The four diagonally adjacent primal vertices (corner partners).
    pub fn primal_neighbors(self) -> [PrimalVertex; 4] {
        [
            PrimalVertex::new(self.x, self.y),
            PrimalVertex::new(self.x + 1, self.y),
            PrimalVertex::new(self.x, self.y + 1),
            PrimalVertex::new(self.x + 1, self.y + 1),
        ]
    }
}

/// Edge orientation. `H` joins `(x,y)-(x+1,y)`, `V` joins `(x,y)-(x,y+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    H,
    V,
}

impl Axis {
    pub const fn other(self) -> Axis {
        match self {
            Axis::H => Axis::V,
            Axis::V => Axis::H,
        }
    }
}

/// A primal edge, keyed by its lower/left endpoint and its orientation.
///
/// The same key also identifies the edge's **dual edge** (the unique dual-lattice
/// segment crossing it) and its **midpoint** (a medial vertex), so one type serves
/// as the shared index for primal edges, dual edges, and medial vertices.
/// The derived ordering `(x, y, axis)` is the canonical lexicographic
/// `(endpoint, direction)` edge order used for bond-configuration indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub x: i32,
    pub y: i32,
    pub axis: Axis,
}

impl Edge {
    pub const fn new(x: i32, y: i32, axis: Axis) -> Self {
        Self { x, y, axis }
    }

    pub const fn h(x: i32, y: i32) -> Self {
        Self::new(x, y, Axis::H)
    }

    pub const fn v(x: i32, y: i32) -> Self {
        Self::new(x, y, Axis::V)
    }

    /// Primal endpoints.
    pub const fn endpoints(self) -> (PrimalVertex, PrimalVertex) {
        match self.axis {
            Axis::H => (
                PrimalVertex::new(self.x, self.y),
                PrimalVertex::new(self.x + 1, self.y),
            ),
            Axis::V => (
                PrimalVertex::new(self.x, self.y),
                PrimalVertex::new(self.x, self.y + 1),
            ),
        }
    }

    /// Endpoints of the dual edge crossing this edge. A horizontal primal edge is
    /// crossed by a vertical dual segment and vice versa.
    pub const fn dual_endpoints(self) -> (DualVertex, DualVertex) {
        match self.axis {
            Axis::H => (
                DualVertex::new(self.x, self.y - 1),
                DualVertex::new(self.x, self.y),
            ),
            Axis::V => (
                DualVertex::new(self.x - 1, self.y),
                DualVertex::new(self.x, self.y),
            ),
        }
    }

    /// Midpoint (= the medial vertex on this edge) in doubled coordinates; the
    /// coordinate sum is always odd.
    pub const fn midpoint_doubled(self) -> (i32, i32) {
        match self.axis {
            Axis::H => (2 * self.x + 1, 2 * self.y),
            Axis::V => (2 * self.x, 2 * self.y + 1),
        }
    }

    /// Midpoint in lattice units.
    pub fn midpoint(self) -> (f64, f64) {
        let (px, py) = self.midpoint_doubled();
        (px as f64 / 2.0, py as f64 / 2.0)
    }

    /// Recover the edge whose midpoint sits at the given doubled-coordinate
    /// medial vertex. Panics if the point is not a medial vertex.
    pub fn from_midpoint_doubled(p: (i32, i32)) -> Self {
        let (px, py) = p;
        match (px.rem_euclid(2), py.rem_euclid(2)) {
            (1, 0) => Edge::h((px - 1) / 2, py / 2),
            (0, 1) => Edge::v(px / 2, (py - 1) / 2),
            _ => panic!("point {p:?} is not a medial vertex"),
        }
    }
}

/// Either kind of lattice point, as classified from doubled coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticePoint {
    Primal(PrimalVertex),
    Dual(DualVertex),
}

impl LatticePoint {
    /// Classify a doubled-coordinate point with even coordinate sum.
    pub fn from_doubled(p: (i32, i32)) -> Self {
        let (px, py) = p;
        match (px.rem_euclid(2), py.rem_euclid(2)) {
            (0, 0) => LatticePoint::Primal(PrimalVertex::new(px / 2, py / 2)),
            (1, 1) => LatticePoint::Dual(DualVertex::new((px - 1) / 2, (py - 1) / 2)),
            _ => panic!("point {p:?} is neither primal nor dual"),
        }
    }
}

/// Diagonal (medial-step) directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Diag {
    Ne,
    Nw,
    Sw,
    Se,
}

impl Diag {
    pub const ALL: [Diag; 4] = [Diag::Ne, Diag::Nw, Diag::Sw, Diag::Se];

    /// Step vector in doubled coordinates.
    pub const fn delta(self) -> (i32, i32) {
        match self {
            Diag::Ne => (1, 1),
            Diag::Nw => (-1, 1),
            Diag::Sw => (-1, -1),
            Diag::Se => (1, -1),
        }
    }

    /// Direction angle in 45° units (counterclockwise from east).
    pub const fn k45(self) -> i32 {
        match self {
            Diag::Ne => 1,
            Diag::Nw => 3,
            Diag::Sw => 5,
            Diag::Se => 7,
        }
    }

    pub const fn reverse(self) -> Diag {
        match self {
            Diag::Ne => Diag::Sw,
            Diag::Nw => Diag::Se,
            Diag::Sw => Diag::Ne,
            Diag::Se => Diag::Nw,
        }
    }

    /// Reflect across a line with the given orientation (H: flip the y
    /// component; V: flip the x component).
    pub const fn reflect_across(self, axis: Axis) -> Diag {
        match (self, axis) {
            (Diag::Ne, Axis::H) => Diag::Se,
            (Diag::Nw, Axis::H) => Diag::Sw,
            (Diag::Sw, Axis::H) => Diag::Nw,
            (Diag::Se, Axis::H) => Diag::Ne,
            (Diag::Ne, Axis::V) => Diag::Nw,
            (Diag::Nw, Axis::V) => Diag::Ne,
            (Diag::Sw, Axis::V) => Diag::Se,
            (Diag::Se, Axis::V) => Diag::Sw,
        }
    }

    /// The diagonal direction of a doubled-coordinate vector `(±1, ±1)`.
    pub fn from_delta(d: (i32, i32)) -> Self {
        match d {
            (1, 1) => Diag::Ne,
            (-1, 1) => Diag::Nw,
            (-1, -1) => Diag::Sw,
            (1, -1) => Diag::Se,
            _ => panic!("{d:?} is not a diagonal unit step"),
        }
    }
}

/// Signed turning from direction `from` to direction `to`, in 45° units, taken
/// in the principal range `(−4, 4]`. A half-turn (4 units) never occurs on the
/// paths this crate walks; callers assert it away.
pub fn turn45(from_k45: i32, to_k45: i32) -> i32 {
    (to_k45 - from_k45 + 3).rem_euclid(8) - 3
}

/// A corner: a primal vertex together with a diagonally adjacent dual vertex.
/// Its geometric location is the midpoint of the two (at distance `δ·√2/2` from
/// each endpoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub primal: PrimalVertex,
    pub dual: DualVertex,
}

impl Corner {
    /// Build a corner, checking diagonal adjacency.
    pub fn new(primal: PrimalVertex, dual: DualVertex) -> Self {
        let (px, py) = primal.doubled();
        let (dx, dy) = dual.doubled();
        assert!(
            (px - dx).abs() == 1 && (py - dy).abs() == 1,
            "corner endpoints must be diagonally adjacent: {primal:?} {dual:?}"
        );
        Self { primal, dual }
    }

    /// Midpoint in lattice units (multiply by δ for physical position).
    pub fn midpoint(self) -> (f64, f64) {
        let (px, py) = self.primal.doubled();
        let (dx, dy) = self.dual.doubled();
        (
            (px + dx) as f64 / 4.0,
            (py + dy) as f64 / 4.0,
        )
    }

    /// Direction from the primal endpoint toward the dual endpoint.
    pub fn primal_to_dual(self) -> Diag {
        let (px, py) = self.primal.doubled();
        let (dx, dy) = self.dual.doubled();
        Diag::from_delta((dx - px, dy - py))
    }
}

/// A directed medial edge, identified by the primal edge whose midpoint it
/// points **into** (`head`) and its direction of travel; the tail is the medial
/// vertex one diagonal step back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MedialStep {
    pub head: Edge,
    pub dir: Diag,
}

/// The two lattice points flanking a directed medial edge: every medial edge
/// separates exactly one primal vertex from one dual vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepSides {
    pub left: LatticePoint,
    pub right: LatticePoint,
}

impl MedialStep {
    pub fn tail_doubled(self) -> (i32, i32) {
        let (hx, hy) = self.head.midpoint_doubled();
        let (dx, dy) = self.dir.delta();
        (hx - dx, hy - dy)
    }

    /// The primal edge whose midpoint is the step's tail.
    pub fn tail_edge(self) -> Edge {
        Edge::from_midpoint_doubled(self.tail_doubled())
    }

    /// The flanking primal and dual vertices, classified into left/right of the
    /// direction of travel.
    pub fn sides(self) -> StepSides {
        let (hx, hy) = self.head.midpoint_doubled();
        let (tx, ty) = self.tail_doubled();
        let (dx, dy) = self.dir.delta();
        // The two lattice points completing the unit square on the segment's
        // diagonal: (tail.x, head.y) and (head.x, tail.y). One is primal, the
        // other dual (their coordinate sums are even).
        let mut left = None;
        let mut right = None;
        for c in [(tx, hy), (hx, ty)] {
            let cross = dx * (c.1 - ty) - dy * (c.0 - tx);
            let point = LatticePoint::from_doubled(c);
            if cross > 0 {
                left = Some(point);
            } else {
                right = Some(point);
            }
        }
        StepSides {
            left: left.expect("medial step has a left flank"),
            right: right.expect("medial step has a right flank"),
        }
    }

    /// The dual vertex on one side of the step and the primal vertex on the
    /// other, regardless of orientation.
    pub fn flanks(self) -> (PrimalVertex, DualVertex) {
        let s = self.sides();
        match (s.left, s.right) {
            (LatticePoint::Primal(p), LatticePoint::Dual(d))
            | (LatticePoint::Dual(d), LatticePoint::Primal(p)) => (p, d),
            _ => unreachable!("a medial edge always separates a primal from a dual vertex"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubled_coordinate_parities() {
        assert_eq!(PrimalVertex::new(-1, 2).doubled(), (-2, 4));
        assert_eq!(DualVertex::new(-1, 0).doubled(), (-1, 1));
        // H-edge midpoints have odd x, V-edge midpoints odd y.
        assert_eq!(Edge::h(-1, 0).midpoint_doubled(), (-1, 0));
        assert_eq!(Edge::v(-1, -1).midpoint_doubled(), (-2, -1));
        for e in [Edge::h(3, -2), Edge::v(0, 5), Edge::h(-7, 7)] {
            let m = e.midpoint_doubled();
            assert_eq!((m.0 + m.1).rem_euclid(2), 1);
            assert_eq!(Edge::from_midpoint_doubled(m), e);
        }
    }

    #[test]
    fn dual_endpoints_cross_the_edge() {
        // The dual segment of H(0,0) = (0,0)-(1,0) runs vertically through
        // (1/2, ±1/2).
        let (d0, d1) = Edge::h(0, 0).dual_endpoints();
        assert_eq!(d0.center(), (0.5, -0.5));
        assert_eq!(d1.center(), (0.5, 0.5));
        let (d0, d1) = Edge::v(0, -1).dual_endpoints();
        assert_eq!(d0.center(), (-0.5, -0.5));
        assert_eq!(d1.center(), (0.5, -0.5));
    }

    #[test]
    fn turn45_principal_range() {
        assert_eq!(turn45(7, 0), 1);
        assert_eq!(turn45(0, 7), -1);
        assert_eq!(turn45(1, 3), 2);
        assert_eq!(turn45(3, 1), -2);
        assert_eq!(turn45(2, 2), 0);
        // Half turns land on +4 (π), never −4.
        assert_eq!(turn45(0, 4), 4);
        assert_eq!(turn45(5, 1), 4);
    }

    #[test]
    fn reflections_match_axis_geometry() {
        // Bouncing off a horizontal wall flips the vertical component.
        assert_eq!(Diag::Ne.reflect_across(Axis::H), Diag::Se);
        assert_eq!(Diag::Sw.reflect_across(Axis::V), Diag::Se);
        for d in Diag::ALL {
            assert_eq!(d.reflect_across(Axis::H).reflect_across(Axis::H), d);
            assert_eq!(d.reflect_across(Axis::V).reflect_across(Axis::V), d);
            // Reflecting across both axes reverses the direction.
            assert_eq!(d.reflect_across(Axis::H).reflect_across(Axis::V), d.reverse());
        }
    }

    #[test]
    fn step_sides_classify_flanking_vertices() {
        // The medial edge from the midpoint of V(-1,-1) to the midpoint of
        // H(-1,0), traveling NE: the dual vertex centered at (-1/2,-1/2) sits on
        // its right, the primal vertex (-1,0) on its left.
        let step = MedialStep { head: Edge::h(-1, 0), dir: Diag::Ne };
        assert_eq!(step.tail_edge(), Edge::v(-1, -1));
        let sides = step.sides();
        assert_eq!(sides.right, LatticePoint::Dual(DualVertex::new(-1, -1)));
        assert_eq!(sides.left, LatticePoint::Primal(PrimalVertex::new(-1, 0)));
    }

    #[test]
    fn every_medial_edge_separates_primal_from_dual() {
        for head in [Edge::h(0, 0), Edge::v(0, 0), Edge::h(-3, 2), Edge::v(5, -1)] {
            for dir in Diag::ALL {
                let step = MedialStep { head, dir };
                let (_, _) = step.flanks(); // panics if both sides same kind
                let sides = step.sides();
                assert_ne!(
                    std::mem::discriminant(&sides.left),
                    std::mem::discriminant(&sides.right)
                );
            }
        }
    }

    #[test]
    fn corner_midpoint_quarter_points() {
        let c = Corner::new(PrimalVertex::new(0, 0), DualVertex::new(0, -1));
        assert_eq!(c.midpoint(), (0.25, -0.25));
        assert_eq!(c.primal_to_dual(), Diag::Se);
    }
}
