//! Combinatorics of the uniform three-directional grid: triangles, typed
//! edges, adjacency, stars, diamonds, smoothness types of touching pairs,
//! and the geometric predicates (over-concave vertices, kissing pairs,
//! edge-connectivity) that control admissibility.
//!
//! The grid triangulates the plane by the lines `x = i`, `y = j` and
//! `x - y = k`. Cells come in two orientations: `Lower(i, j)` has vertices
//! `(i,j), (i+1,j), (i+1,j+1)` and `Upper(i, j)` has `(i,j), (i+1,j+1),
//! (i,j+1)`, both counterclockwise. At level `l` the lattice point `(i, j)`
//! sits at `(i, j) / 2^(l-1)` in the plane.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeshError {
    #[error("endpoints do not span a grid edge: ({0}, {1}) to ({2}, {3})")]
    InvalidEdge(i64, i64, i64, i64),
    #[error("triangles do not touch")]
    NotTouching,
    #[error("edge is not an edge of any domain triangle")]
    EdgeNotInDomain,
    #[error("vertex is not on the domain boundary")]
    NotBoundaryVertex,
}

/// Lattice point `(i, j)` of the grid at some refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub i: i64,
    pub j: i64,
}

pub const fn lp(i: i64, j: i64) -> LatticePoint {
    LatticePoint { i, j }
}

impl LatticePoint {
    pub fn offset(self, di: i64, dj: i64) -> LatticePoint {
        lp(self.i + di, self.j + dj)
    }

    pub fn add(self, other: LatticePoint) -> LatticePoint {
        lp(self.i + other.i, self.j + other.j)
    }

    pub fn sub(self, other: LatticePoint) -> LatticePoint {
        lp(self.i - other.i, self.j - other.j)
    }
}

/// The three lattice directions; `e3 = e1 + e2`.
pub const DIR_E1: LatticePoint = lp(1, 0);
pub const DIR_E2: LatticePoint = lp(0, 1);
pub const DIR_E3: LatticePoint = lp(1, 1);

pub fn direction(etype: EdgeType) -> LatticePoint {
    match etype {
        EdgeType::E1 => DIR_E1,
        EdgeType::E2 => DIR_E2,
        EdgeType::E3 => DIR_E3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orient {
    Lower,
    Upper,
}

impl Orient {
    pub fn letter(self) -> &'static str {
        match self {
            Orient::Lower => "L",
            Orient::Upper => "U",
        }
    }
}

/// A grid triangle: anchor `(i, j)` plus orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangleId {
    pub i: i64,
    pub j: i64,
    pub orient: Orient,
}

pub const fn tri(i: i64, j: i64, orient: Orient) -> TriangleId {
    TriangleId { i, j, orient }
}

pub const fn lower(i: i64, j: i64) -> TriangleId {
    tri(i, j, Orient::Lower)
}

pub const fn upper(i: i64, j: i64) -> TriangleId {
    tri(i, j, Orient::Upper)
}

impl TriangleId {
    pub fn translate(self, v: LatticePoint) -> TriangleId {
        tri(self.i + v.i, self.j + v.j, self.orient)
    }

    pub fn anchor(self) -> LatticePoint {
        lp(self.i, self.j)
    }
}

impl Serialize for TriangleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.i, self.j, self.orient.letter()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TriangleId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (i, j, o): (i64, i64, String) = Deserialize::deserialize(d)?;
        let orient = match o.as_str() {
            "L" => Orient::Lower,
            "U" => Orient::Upper,
            other => {
                return Err(D::Error::custom(format!(
                    "orientation must be L or U, got {other:?}"
                )))
            }
        };
        Ok(tri(i, j, orient))
    }
}

/// Counterclockwise vertices of a triangle, starting at the anchor.
pub fn triangle_vertices(t: TriangleId) -> [LatticePoint; 3] {
    let a = lp(t.i, t.j);
    match t.orient {
        Orient::Lower => [a, a.offset(1, 0), a.offset(1, 1)],
        Orient::Upper => [a, a.offset(1, 1), a.offset(0, 1)],
    }
}

/// Edge type by direction: 1 for `e1 = (1,0)`, 2 for `e2 = (0,1)`,
/// 3 for `e3 = (1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeType {
    E1,
    E2,
    E3,
}

impl EdgeType {
    pub fn index(self) -> usize {
        match self {
            EdgeType::E1 => 1,
            EdgeType::E2 => 2,
            EdgeType::E3 => 3,
        }
    }

    pub fn all() -> [EdgeType; 3] {
        [EdgeType::E1, EdgeType::E2, EdgeType::E3]
    }
}

/// A grid edge with canonically ordered endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub a: LatticePoint,
    pub b: LatticePoint,
    pub etype: EdgeType,
}

impl EdgeId {
    /// Builds the edge between two lattice points, classifying its type.
    pub fn new(p: LatticePoint, q: LatticePoint) -> Result<EdgeId, MeshError> {
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        let d = b.sub(a);
        let etype = match (d.i, d.j) {
            (1, 0) => EdgeType::E1,
            (0, 1) => EdgeType::E2,
            (1, 1) => EdgeType::E3,
            _ => return Err(MeshError::InvalidEdge(p.i, p.j, q.i, q.j)),
        };
        Ok(EdgeId { a, b, etype })
    }

    pub fn translate(self, v: LatticePoint) -> EdgeId {
        EdgeId {
            a: self.a.add(v),
            b: self.b.add(v),
            etype: self.etype,
        }
    }
}

/// Classifies the segment between two lattice points as a grid edge type.
pub fn edge_type(p: LatticePoint, q: LatticePoint) -> Result<EdgeType, MeshError> {
    Ok(EdgeId::new(p, q)?.etype)
}

/// The three edges of a triangle.
pub fn triangle_edges(t: TriangleId) -> [EdgeId; 3] {
    let [v0, v1, v2] = triangle_vertices(t);
    [
        EdgeId::new(v0, v1).unwrap(),
        EdgeId::new(v1, v2).unwrap(),
        EdgeId::new(v0, v2).unwrap(),
    ]
}

/// The common edge of two triangles, if their closures share one.
pub fn shared_edge(t: TriangleId, t2: TriangleId) -> Option<EdgeId> {
    if t == t2 {
        return None;
    }
    let e1: BTreeSet<EdgeId> = triangle_edges(t).into_iter().collect();
    triangle_edges(t2).into_iter().find(|e| e1.contains(e))
}

/// Vertices shared by the closures of two triangles.
pub fn shared_vertices(t: TriangleId, t2: TriangleId) -> Vec<LatticePoint> {
    let v1: BTreeSet<LatticePoint> = triangle_vertices(t).into_iter().collect();
    triangle_vertices(t2)
        .into_iter()
        .filter(|v| v1.contains(v))
        .collect()
}

/// The two grid triangles incident to an edge.
pub fn edge_neighbors(e: EdgeId) -> [TriangleId; 2] {
    let a = e.a;
    match e.etype {
        // y = const: upper side Lower(a), lower side Upper(a - e2)
        EdgeType::E1 => [lower(a.i, a.j), upper(a.i, a.j - 1)],
        // x = const: left side Lower(a - e1), right side Upper(a)
        EdgeType::E2 => [lower(a.i - 1, a.j), upper(a.i, a.j)],
        // diagonal: below Lower(a), above Upper(a)
        EdgeType::E3 => [lower(a.i, a.j), upper(a.i, a.j)],
    }
}

/// All grid triangles whose closure contains the vertex `v`; always six.
pub fn star_triangles(v: LatticePoint) -> [TriangleId; 6] {
    // Counterclockwise starting with the sector between +e1 and +e3.
    [
        lower(v.i, v.j),
        upper(v.i, v.j),
        lower(v.i - 1, v.j),
        upper(v.i - 1, v.j - 1),
        lower(v.i - 1, v.j - 1),
        upper(v.i, v.j - 1),
    ]
}

/// A finite set of grid triangles at a fixed level, together with the
/// combinatorial closure (edges and vertices) of its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticellDomain {
    pub level: u32,
    pub triangles: BTreeSet<TriangleId>,
}

impl MulticellDomain {
    pub fn new(level: u32, triangles: impl IntoIterator<Item = TriangleId>) -> Self {
        MulticellDomain {
            level,
            triangles: triangles.into_iter().collect(),
        }
    }

    pub fn empty(level: u32) -> Self {
        MulticellDomain {
            level,
            triangles: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn contains(&self, t: TriangleId) -> bool {
        self.triangles.contains(&t)
    }

    pub fn translate(&self, v: LatticePoint) -> MulticellDomain {
        MulticellDomain::new(self.level, self.triangles.iter().map(|t| t.translate(v)))
    }

    /// All edges of member triangles.
    pub fn edges(&self) -> BTreeSet<EdgeId> {
        self.triangles
            .iter()
            .flat_map(|&t| triangle_edges(t))
            .collect()
    }

    /// Edges whose two incident grid triangles both belong to the domain.
    pub fn interior_edges(&self) -> BTreeSet<EdgeId> {
        self.edges()
            .into_iter()
            .filter(|&e| edge_neighbors(e).iter().all(|t| self.contains(*t)))
            .collect()
    }

    /// All vertices of member triangles.
    pub fn vertices(&self) -> BTreeSet<LatticePoint> {
        self.triangles
            .iter()
            .flat_map(|&t| triangle_vertices(t))
            .collect()
    }

    /// Vertices on the topological boundary: those whose full star is not
    /// contained in the domain.
    pub fn boundary_vertices(&self) -> BTreeSet<LatticePoint> {
        self.vertices()
            .into_iter()
            .filter(|&v| star_triangles(v).iter().any(|t| !self.contains(*t)))
            .collect()
    }
}

impl Serialize for MulticellDomain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            level: u32,
            triangles: &'a BTreeSet<TriangleId>,
        }
        Repr {
            level: self.level,
            triangles: &self.triangles,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MulticellDomain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            level: u32,
            triangles: Vec<TriangleId>,
        }
        let r = Repr::deserialize(d)?;
        if r.level == 0 {
            return Err(D::Error::custom("level must be positive"));
        }
        Ok(MulticellDomain::new(r.level, r.triangles))
    }
}

/// The star of a vertex as a multicell domain (level 1).
pub fn star(v: LatticePoint) -> MulticellDomain {
    MulticellDomain::new(1, star_triangles(v))
}

/// Diamond of an edge within a domain: the at most two member triangles
/// having `e` as an edge.
pub fn diamond_edge(e: EdgeId, domain: &MulticellDomain) -> Result<MulticellDomain, MeshError> {
    let incident: Vec<TriangleId> = edge_neighbors(e)
        .into_iter()
        .filter(|t| domain.contains(*t))
        .collect();
    if incident.is_empty() {
        return Err(MeshError::EdgeNotInDomain);
    }
    Ok(MulticellDomain::new(domain.level, incident))
}

/// Cyclic position (0..6) of a triangle within the star of `v`.
fn star_position(v: LatticePoint, t: TriangleId) -> Option<usize> {
    star_triangles(v).iter().position(|&s| s == t)
}

/// Smoothness type of a pair of touching triangles: the set of edge types
/// occurring in the shortest edge-connected chain of the grid between them.
/// Empty for an identical pair.
///
/// Touching pairs either share an edge (chain length one) or exactly one
/// vertex; in the latter case the chain runs around the shared vertex and
/// its type set depends only on the cyclic distance in the star.
pub fn smoothness_type(t: TriangleId, t2: TriangleId) -> Result<BTreeSet<EdgeType>, MeshError> {
    if t == t2 {
        return Ok(BTreeSet::new());
    }
    if let Some(e) = shared_edge(t, t2) {
        return Ok([e.etype].into_iter().collect());
    }
    let shared = shared_vertices(t, t2);
    if shared.len() != 1 {
        return Err(MeshError::NotTouching);
    }
    let v = shared[0];
    let ring = star_triangles(v);
    let p1 = star_position(v, t).expect("triangle incident to its shared vertex");
    let p2 = star_position(v, t2).expect("triangle incident to its shared vertex");
    let dist = {
        let d = (p1 as i64 - p2 as i64).rem_euclid(6) as usize;
        d.min(6 - d)
    };
    match dist {
        2 => {
            // unique two-step chain through the triangle between them
            let mid_fwd = ring[(p1 + 1) % 6];
            let mid = if shares_edge(mid_fwd, t2) && shares_edge(mid_fwd, t) {
                mid_fwd
            } else {
                ring[(p1 + 5) % 6]
            };
            let mut st = BTreeSet::new();
            st.insert(shared_edge(t, mid).unwrap().etype);
            st.insert(shared_edge(mid, t2).unwrap().etype);
            Ok(st)
        }
        3 => {
            // opposite triangles: three consecutive edges around a vertex
            // carry all three types
            Ok(EdgeType::all().into_iter().collect())
        }
        _ => unreachable!("vertex-only contact implies cyclic distance 2 or 3"),
    }
}

fn shares_edge(t: TriangleId, t2: TriangleId) -> bool {
    shared_edge(t, t2).is_some()
}

/// True iff `v` lies on the boundary of the domain and exactly one of its
/// six star triangles is missing from the domain.
pub fn is_over_concave(v: LatticePoint, domain: &MulticellDomain) -> Result<bool, MeshError> {
    if !domain.boundary_vertices().contains(&v) {
        return Err(MeshError::NotBoundaryVertex);
    }
    let missing = star_triangles(v)
        .iter()
        .filter(|t| !domain.contains(**t))
        .count();
    Ok(missing == 1)
}

/// Unordered pairs of domain triangles that meet in exactly one vertex and
/// are not joined by an edge-connected chain of domain triangles around
/// that vertex.
pub fn kissing_pairs(domain: &MulticellDomain) -> Vec<(TriangleId, TriangleId)> {
    let mut out = Vec::new();
    for v in domain.vertices() {
        let present: Vec<TriangleId> = star_triangles(v)
            .into_iter()
            .filter(|t| domain.contains(*t))
            .collect();
        if present.len() < 2 {
            continue;
        }
        let comp = star_components(v, &present);
        for (ai, &a) in present.iter().enumerate() {
            for &b in present.iter().skip(ai + 1) {
                if shared_vertices(a, b).len() == 1
                    && shared_edge(a, b).is_none()
                    && comp[&a] != comp[&b]
                {
                    out.push(if a <= b { (a, b) } else { (b, a) });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Connected components of the domain triangles around `v` under the
/// shared-edge relation.
fn star_components(v: LatticePoint, present: &[TriangleId]) -> BTreeMap<TriangleId, usize> {
    let ring = star_triangles(v);
    let in_ring: BTreeSet<TriangleId> = present.iter().copied().collect();
    let mut label: BTreeMap<TriangleId, usize> = BTreeMap::new();
    let mut next = 0;
    for &t in present {
        if label.contains_key(&t) {
            continue;
        }
        let mut queue = VecDeque::from([t]);
        label.insert(t, next);
        while let Some(cur) = queue.pop_front() {
            let p = star_position(v, cur).unwrap();
            for adj in [ring[(p + 1) % 6], ring[(p + 5) % 6]] {
                if in_ring.contains(&adj) && !label.contains_key(&adj) {
                    label.insert(adj, next);
                    queue.push_back(adj);
                }
            }
        }
        next += 1;
    }
    label
}

/// The four next-level cells tiling a triangle under one dyadic
/// refinement step (equivalently, the unit cells tiling the doubled
/// triangle at a fixed level).
pub fn child_triangles(t: TriangleId) -> [TriangleId; 4] {
    let (i, j) = (2 * t.i, 2 * t.j);
    match t.orient {
        Orient::Lower => [
            lower(i, j),
            lower(i + 1, j),
            lower(i + 1, j + 1),
            upper(i + 1, j),
        ],
        Orient::Upper => [
            upper(i, j),
            upper(i, j + 1),
            upper(i + 1, j + 1),
            lower(i, j + 1),
        ],
    }
}

/// The previous-level cell containing a triangle after one dyadic
/// coarsening step.
pub fn parent_triangle(t: TriangleId) -> TriangleId {
    let anchor = lp(t.i.div_euclid(2), t.j.div_euclid(2));
    for orient in [Orient::Lower, Orient::Upper] {
        let cand = tri(anchor.i, anchor.j, orient);
        if child_triangles(cand).contains(&t) {
            return cand;
        }
    }
    unreachable!("every cell has a parent cell")
}

/// True iff the set is connected under the shared-edge relation restricted
/// to the set. The empty set is vacuously connected.
pub fn is_edge_connected(set: &BTreeSet<TriangleId>) -> bool {
    let mut iter = set.iter();
    let start = match iter.next() {
        Some(&t) => t,
        None => return true,
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for e in triangle_edges(t) {
            for n in edge_neighbors(e) {
                if n != t && set.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
    }
    seen.len() == set.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_of_canonical_triangles() {
        assert_eq!(
            triangle_vertices(lower(0, 0)),
            [lp(0, 0), lp(1, 0), lp(1, 1)]
        );
        assert_eq!(
            triangle_vertices(upper(0, 0)),
            [lp(0, 0), lp(1, 1), lp(0, 1)]
        );
        assert_eq!(
            triangle_vertices(lower(2, -1)),
            [lp(2, -1), lp(3, -1), lp(3, 0)]
        );
    }

    #[test]
    fn edge_types_by_direction() {
        assert_eq!(edge_type(lp(0, 0), lp(1, 0)).unwrap(), EdgeType::E1);
        assert_eq!(edge_type(lp(0, 0), lp(0, 1)).unwrap(), EdgeType::E2);
        assert_eq!(edge_type(lp(0, 0), lp(1, 1)).unwrap(), EdgeType::E3);
        assert_eq!(edge_type(lp(1, 1), lp(0, 0)).unwrap(), EdgeType::E3);
        assert!(edge_type(lp(0, 0), lp(2, 1)).is_err());
        assert!(edge_type(lp(0, 0), lp(1, -1)).is_err());
    }

    #[test]
    fn shared_edge_of_diamond_pair() {
        let e = shared_edge(lower(0, 0), upper(0, 0)).unwrap();
        assert_eq!(e, EdgeId::new(lp(0, 0), lp(1, 1)).unwrap());
        assert_eq!(e.etype, EdgeType::E3);
    }

    #[test]
    fn shared_edge_absent_for_vertex_contact() {
        // Lower(0,0) and Lower(0,1) share only the vertex (1,1).
        assert_eq!(shared_edge(lower(0, 0), lower(0, 1)), None);
        assert_eq!(shared_vertices(lower(0, 0), lower(0, 1)), vec![lp(1, 1)]);
        assert_eq!(shared_edge(lower(0, 0), lower(5, 5)), None);
    }

    #[test]
    fn edge_neighbors_are_incident() {
        for t in [lower(0, 0), upper(3, -2), lower(-1, 4)] {
            for e in triangle_edges(t) {
                assert!(edge_neighbors(e).contains(&t), "edge {e:?} of {t:?}");
            }
        }
    }

    #[test]
    fn star_has_six_triangles_and_six_interior_edges() {
        for v in [lp(1, 1), lp(0, 0), lp(-3, 7)] {
            let s = star(v);
            assert_eq!(s.len(), 6);
            for t in &s.triangles {
                assert!(triangle_vertices(*t).contains(&v));
            }
            let interior = s.interior_edges();
            assert_eq!(interior.len(), 6);
            for e in interior {
                assert!(e.a == v || e.b == v);
            }
        }
    }

    #[test]
    fn star_translation_equivariance() {
        let s = star(lp(2, 3));
        let t = star(lp(3, 3));
        assert_eq!(s.translate(lp(1, 0)), t);
    }

    #[test]
    fn diamond_of_interior_and_boundary_edges() {
        let m = MulticellDomain::new(1, [lower(0, 0), upper(0, 0)]);
        let diag = EdgeId::new(lp(0, 0), lp(1, 1)).unwrap();
        assert_eq!(diamond_edge(diag, &m).unwrap().len(), 2);
        let bottom = EdgeId::new(lp(0, 0), lp(1, 0)).unwrap();
        assert_eq!(diamond_edge(bottom, &m).unwrap().len(), 1);
        let far = EdgeId::new(lp(5, 5), lp(6, 5)).unwrap();
        assert_eq!(diamond_edge(far, &m), Err(MeshError::EdgeNotInDomain));
    }

    #[test]
    fn smoothness_type_of_identical_pair_is_empty() {
        assert!(smoothness_type(lower(0, 0), lower(0, 0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn smoothness_type_of_edge_pairs() {
        let st = smoothness_type(lower(0, 0), upper(0, 0)).unwrap();
        assert_eq!(st, [EdgeType::E3].into_iter().collect());
        let st = smoothness_type(lower(0, 0), upper(0, -1)).unwrap();
        assert_eq!(st, [EdgeType::E1].into_iter().collect());
        let st = smoothness_type(lower(0, 0), upper(1, 0)).unwrap();
        assert_eq!(st, [EdgeType::E2].into_iter().collect());
    }

    #[test]
    fn smoothness_type_of_opposite_pair_is_full() {
        // Lower(0,0) and Upper(1,1) kiss diagonally at (1,1).
        let st = smoothness_type(lower(0, 0), upper(1, 1)).unwrap();
        assert_eq!(st.len(), 3);
    }

    #[test]
    fn smoothness_type_symmetry_around_a_vertex() {
        let v = lp(0, 0);
        for a in star_triangles(v) {
            for b in star_triangles(v) {
                let ab = smoothness_type(a, b).unwrap();
                let ba = smoothness_type(b, a).unwrap();
                assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn not_touching_is_an_error() {
        assert_eq!(
            smoothness_type(lower(0, 0), lower(5, 5)),
            Err(MeshError::NotTouching)
        );
    }

    #[test]
    fn over_concave_detection() {
        let v = lp(1, 1);
        let mut triangles: Vec<TriangleId> = star_triangles(v).into();
        let removed = triangles.pop().unwrap();
        let m = MulticellDomain::new(1, triangles);
        assert!(is_over_concave(v, &m).unwrap(), "missing {removed:?}");

        // Full star: v is interior, every boundary vertex misses >= 2.
        let full = star(v);
        for b in full.boundary_vertices() {
            assert!(!is_over_concave(b, &full).unwrap());
        }
        assert_eq!(is_over_concave(v, &full), Err(MeshError::NotBoundaryVertex));

        let single = MulticellDomain::new(1, [lower(0, 0)]);
        for b in triangle_vertices(lower(0, 0)) {
            assert!(!is_over_concave(b, &single).unwrap());
        }
    }

    #[test]
    fn kissing_pair_detection() {
        let m = MulticellDomain::new(1, [lower(0, 0), upper(1, 1)]);
        assert_eq!(kissing_pairs(&m), vec![(lower(0, 0), upper(1, 1))]);

        let edge_pair = MulticellDomain::new(1, [lower(0, 0), upper(0, 0)]);
        assert!(kissing_pairs(&edge_pair).is_empty());

        // Triangles linked around the shared vertex do not kiss.
        assert!(kissing_pairs(&star(lp(0, 0))).is_empty());
    }

    #[test]
    fn kissing_pairs_in_broken_star() {
        // Remove two opposite triangles: the remaining two arcs kiss.
        let v = lp(0, 0);
        let ring = star_triangles(v);
        let m = MulticellDomain::new(
            1,
            ring.iter()
                .enumerate()
                .filter(|(k, _)| *k != 2 && *k != 5)
                .map(|(_, &t)| t),
        );
        let pairs = kissing_pairs(&m);
        assert!(!pairs.is_empty());
        for (a, b) in pairs {
            assert_eq!(shared_vertices(a, b), vec![v]);
        }
    }

    #[test]
    fn edge_connectivity() {
        let connected: BTreeSet<_> = [lower(0, 0), upper(0, 0)].into();
        assert!(is_edge_connected(&connected));
        let kissing: BTreeSet<_> = [lower(0, 0), upper(1, 1)].into();
        assert!(!is_edge_connected(&kissing));
        assert!(is_edge_connected(&BTreeSet::new()));
    }

    #[test]
    fn domain_json_roundtrip() {
        let m = MulticellDomain::new(2, [upper(0, 0), lower(0, 0), lower(1, 4)]);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"level":2,"triangles":[[0,0,"L"],[0,0,"U"],[1,4,"L"]]}"#
        );
        let back: MulticellDomain = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn translation_equivariance_of_predicates() {
        let v = lp(0, 0);
        let shift = lp(4, -2);
        let ring = star_triangles(v);
        let m = MulticellDomain::new(1, ring.iter().take(5).copied());
        let m2 = m.translate(shift);
        assert_eq!(
            is_over_concave(v, &m).unwrap(),
            is_over_concave(v.add(shift), &m2).unwrap()
        );
        let k1: Vec<_> = kissing_pairs(&m)
            .into_iter()
            .map(|(a, b)| (a.translate(shift), b.translate(shift)))
            .collect();
        assert_eq!(k1, kissing_pairs(&m2));
    }
}
