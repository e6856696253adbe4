//! The local polynomial space spanned by box spline translates, active
//! translate sets on multicell domains, coefficient extraction, membership
//! tests for the edge-smoothness and strongly regular spline spaces,
//! admissibility, and the completeness dimension check.

use crate::algebra::{Rational, RationalMatrix};
use crate::bernstein::{
    cr_edge_conditions, dim_bb, from_bb, to_bb, vertex_conditions, BBPoly, DerivIndex,
    MonomialPoly, RegularityVector,
};
use crate::box_spline::{box_spline, BoxSplineError, DirectionTriple};
use crate::mesh::{
    is_edge_connected, is_over_concave, kissing_pairs, lower, lp, shared_edge, shared_vertices,
    smoothness_type, EdgeType, LatticePoint, MulticellDomain, Orient, TriangleId,
};
use num::Zero;
use once_cell::sync::Lazy;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("piece degree does not match the space degree")]
    DegreeMismatch,
    #[error("polynomial does not lie in the local translate space")]
    NotInSpace,
    #[error(transparent)]
    BoxSpline(#[from] BoxSplineError),
}

/// The set of translate shifts active on a domain, lexicographically
/// ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSet {
    pub n: DirectionTriple,
    pub domain: MulticellDomain,
    pub shifts: Vec<LatticePoint>,
}

/// Shifts `v` whose translate support meets the closed domain. A translate
/// is active exactly when one of its support cells is a domain triangle.
pub fn active_shifts(
    n: DirectionTriple,
    domain: &MulticellDomain,
) -> Result<ActiveSet, SpaceError> {
    let supp = crate::box_spline::support(n)?;
    let mut shifts: BTreeSet<LatticePoint> = BTreeSet::new();
    for t in &domain.triangles {
        for s in &supp {
            if s.orient == t.orient {
                shifts.insert(t.anchor().sub(s.anchor()));
            }
        }
    }
    Ok(ActiveSet {
        n,
        domain: domain.clone(),
        shifts: shifts.into_iter().collect(),
    })
}

/// Active shifts on a single triangle.
pub fn active_shifts_on_triangle(
    n: DirectionTriple,
    t: TriangleId,
) -> Result<Vec<LatticePoint>, SpaceError> {
    Ok(active_shifts(n, &MulticellDomain::new(1, [t]))?.shifts)
}

/// Reference lattice points `(1,1) - v` over the shifts active on `t`.
pub fn one_ring(t: TriangleId, n: DirectionTriple) -> Result<BTreeSet<LatticePoint>, SpaceError> {
    Ok(active_shifts_on_triangle(n, t)?
        .into_iter()
        .map(|v| lp(1, 1).sub(v))
        .collect())
}

type BasisKey = (DirectionTriple, Orient);
static BASIS_CACHE: Lazy<Mutex<HashMap<BasisKey, Arc<RationalMatrix>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static MEMBERSHIP_CACHE: Lazy<Mutex<HashMap<BasisKey, Arc<RationalMatrix>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Matrix whose row for each active shift `v` (in lexicographic order)
/// holds the BB coefficients of `B_n(. - v)` restricted to `t`; it has
/// full row rank `phi(n)`. Depends on `t` only through its orientation.
pub fn local_basis_matrix(
    t: TriangleId,
    n: DirectionTriple,
) -> Result<Arc<RationalMatrix>, SpaceError> {
    let key = (n, t.orient);
    if let Some(hit) = BASIS_CACHE.lock().unwrap().get(&key).cloned() {
        return Ok(hit);
    }
    let b = box_spline(n)?;
    let shifts = active_shifts_on_triangle(n, t)?;
    let rows: Vec<Vec<Rational>> = shifts
        .iter()
        .map(|&v| {
            let source = t.translate(lp(-v.i, -v.j));
            b.piece(source)
                .expect("active translate has a piece on the triangle")
                .coeffs()
                .to_vec()
        })
        .collect();
    let m = Arc::new(RationalMatrix::from_rows(rows));
    BASIS_CACHE.lock().unwrap().insert(key, m.clone());
    Ok(m)
}

/// Rows annihilating exactly the BB vectors that lie in the local translate
/// space on a triangle of the given orientation.
pub(crate) fn vn_membership_rows(
    n: DirectionTriple,
    orient: Orient,
) -> Result<Arc<RationalMatrix>, SpaceError> {
    let key = (n, orient);
    if let Some(hit) = MEMBERSHIP_CACHE.lock().unwrap().get(&key).cloned() {
        return Ok(hit);
    }
    let l = local_basis_matrix(crate::mesh::tri(0, 0, orient), n)?;
    let kernel = l.kernel_basis();
    let m = Arc::new(if kernel.is_empty() {
        RationalMatrix::zeros(0, l.cols())
    } else {
        RationalMatrix::from_rows(kernel)
    });
    MEMBERSHIP_CACHE.lock().unwrap().insert(key, m.clone());
    Ok(m)
}

/// Unique expansion coefficients of a local-space element over the active
/// translates of its triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCoefficients {
    pub triangle: TriangleId,
    pub n: DirectionTriple,
    pub lambda: BTreeMap<LatticePoint, Rational>,
}

/// Extracts the unique coefficients with
/// `sum_v lambda_v B_n(. - v)|_t = f`; fails with `NotInSpace` when `f`
/// lies outside the local translate space.
pub fn lambda_extract(f: &BBPoly, n: DirectionTriple) -> Result<LocalCoefficients, SpaceError> {
    if f.degree != n.degree() {
        return Err(SpaceError::DegreeMismatch);
    }
    let t = f.triangle;
    let l = local_basis_matrix(t, n)?;
    let shifts = active_shifts_on_triangle(n, t)?;
    let sol = l
        .transpose()
        .solve(f.coeffs())
        .expect("dimensions agree by construction")
        .ok_or(SpaceError::NotInSpace)?;
    Ok(LocalCoefficients {
        triangle: t,
        n,
        lambda: shifts.into_iter().zip(sol).collect(),
    })
}

/// Reconstructs the local-space element with the given coefficients on a
/// triangle.
pub fn lambda_combine(
    t: TriangleId,
    n: DirectionTriple,
    lambda: &BTreeMap<LatticePoint, Rational>,
) -> Result<BBPoly, SpaceError> {
    let b = box_spline(n)?;
    let mut out = BBPoly::zero(t, n.degree());
    for (v, c) in lambda {
        if c.is_zero() {
            continue;
        }
        let source = t.translate(lp(-v.i, -v.j));
        if let Some(piece) = b.piece(source) {
            let mut scaled = piece.scale(c);
            scaled = BBPoly::from_coeffs(t, n.degree(), scaled.coeffs().to_vec());
            out.add_assign(&scaled);
        }
    }
    Ok(out)
}

/// A basis of the local polynomial space spanned by the translates,
/// read off a lower reference triangle; the span is triangle independent.
pub fn space_vn_basis(n: DirectionTriple) -> Result<Vec<MonomialPoly>, SpaceError> {
    let t = lower(0, 0);
    let l = local_basis_matrix(t, n)?;
    Ok((0..l.rows())
        .map(|r| {
            let bb = BBPoly::from_coeffs(t, n.degree(), l.row(r).to_vec());
            from_bb(&bb)
        })
        .collect())
}

/// A spline on a multicell domain: one polynomial patch per domain
/// triangle, all of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplineFunction {
    pub domain: MulticellDomain,
    pub degree: u32,
    pub pieces: BTreeMap<TriangleId, BBPoly>,
}

impl SplineFunction {
    pub fn new(domain: MulticellDomain, pieces: BTreeMap<TriangleId, BBPoly>) -> Self {
        let keys: BTreeSet<TriangleId> = pieces.keys().copied().collect();
        assert_eq!(keys, domain.triangles, "one piece per domain triangle");
        let degree = pieces.values().next().map(|p| p.degree).unwrap_or(0);
        assert!(pieces.values().all(|p| p.degree == degree));
        SplineFunction {
            domain,
            degree,
            pieces,
        }
    }

    /// Builds a spline from monomial pieces.
    pub fn from_polys(
        domain: MulticellDomain,
        degree: u32,
        polys: &BTreeMap<TriangleId, MonomialPoly>,
    ) -> Result<Self, SpaceError> {
        let mut pieces = BTreeMap::new();
        for &t in &domain.triangles {
            let p = polys.get(&t).cloned().unwrap_or_else(MonomialPoly::zero);
            let bb = to_bb(&p, t, degree).map_err(|_| SpaceError::DegreeMismatch)?;
            pieces.insert(t, bb);
        }
        Ok(SplineFunction::new(domain, pieces))
    }

    pub fn piece(&self, t: TriangleId) -> &BBPoly {
        &self.pieces[&t]
    }
}

/// Concatenated-coefficient layout of a domain: block per triangle in
/// canonical order.
fn block_index(domain: &MulticellDomain) -> BTreeMap<TriangleId, usize> {
    domain
        .triangles
        .iter()
        .enumerate()
        .map(|(k, &t)| (t, k))
        .collect()
}

/// Flat coefficient vector of a spline in domain block layout.
pub fn spline_to_vec(f: &SplineFunction) -> Vec<Rational> {
    f.pieces
        .values()
        .flat_map(|p| p.coeffs().iter().cloned())
        .collect()
}

/// Checks membership of every piece in the span of the given polynomial
/// basis on its triangle.
fn pieces_in_span(f: &SplineFunction, vbasis: &[MonomialPoly]) -> Result<bool, SpaceError> {
    for &t in &f.domain.triangles {
        let rows: Result<Vec<Vec<Rational>>, _> = vbasis
            .iter()
            .map(|p| to_bb(p, t, f.degree).map(|bb| bb.coeffs().to_vec()))
            .collect();
        let rows = rows.map_err(|_| SpaceError::DegreeMismatch)?;
        let basis = RationalMatrix::from_rows(rows);
        let sol = basis
            .transpose()
            .solve(f.piece(t).coeffs())
            .expect("dimensions agree");
        if sol.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership in the spline space with edge smoothness `d`: every piece
/// lies in the span of `vbasis` and every interior edge of type `i`
/// satisfies the `C^{d_i}` conditions.
pub fn membership_edge_space(
    f: &SplineFunction,
    d: RegularityVector,
    vbasis: &[MonomialPoly],
) -> Result<bool, SpaceError> {
    if vbasis.iter().any(|p| p.total_degree() > f.degree) {
        return Err(SpaceError::DegreeMismatch);
    }
    if !pieces_in_span(f, vbasis)? {
        return Ok(false);
    }
    for e in f.domain.interior_edges() {
        let [t1, t2] = crate::mesh::edge_neighbors(e);
        let m = cr_edge_conditions(e, t1, t2, f.degree, d.order(e.etype))
            .expect("neighbors share the edge");
        let mut vec = f.piece(t1).coeffs().to_vec();
        vec.extend_from_slice(f.piece(t2).coeffs());
        if !m.mul_vec(&vec).unwrap().iter().all(|x| x.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite index set of the intersection of the per-type derivative sets
/// for the given smoothness type, truncated at the polynomial degree.
/// Empty when the smoothness type has fewer than two edge types (an edge
/// or identical contact carries no vertex conditions of its own).
pub fn intersection_index_set(
    st: &BTreeSet<EdgeType>,
    d: RegularityVector,
    degree: u32,
) -> Vec<DerivIndex> {
    if st.len() < 2 {
        return Vec::new();
    }
    let within = |s: (u32, u32, u32)| -> bool {
        st.iter().all(|&etype| {
            let bound = d.order(etype);
            let transversal = match etype {
                EdgeType::E1 => s.1 + s.2,
                EdgeType::E2 => s.0 + s.2,
                EdgeType::E3 => s.0 + s.1,
            };
            bound >= 0 && (transversal as i32) <= bound
        })
    };
    let mut out = Vec::new();
    for total in 0..=degree {
        for s1 in 0..=total {
            for s2 in 0..=(total - s1) {
                let s3 = total - s1 - s2;
                if within((s1, s2, s3)) {
                    out.push(crate::bernstein::deriv(s1, s2, s3));
                }
            }
        }
    }
    out
}

/// Membership in the strongly regular spline space: edge-space membership
/// plus, for every pair of domain triangles meeting at exactly one vertex,
/// the derivative matching conditions for the intersection of the per-type
/// index sets of the pair's smoothness type.
pub fn membership_strongly_regular(
    f: &SplineFunction,
    d: RegularityVector,
    vbasis: &[MonomialPoly],
) -> Result<bool, SpaceError> {
    if !membership_edge_space(f, d, vbasis)? {
        return Ok(false);
    }
    let triangles: Vec<TriangleId> = f.domain.triangles.iter().copied().collect();
    for (i, &t1) in triangles.iter().enumerate() {
        for &t2 in triangles.iter().skip(i + 1) {
            if shared_edge(t1, t2).is_some() || shared_vertices(t1, t2).len() != 1 {
                continue;
            }
            let st = smoothness_type(t1, t2).expect("touching pair");
            let index_set = intersection_index_set(&st, d, f.degree);
            if index_set.is_empty() {
                continue;
            }
            let m = vertex_conditions(t1, t2, &index_set, f.degree)
                .expect("pair meets at exactly one vertex");
            let mut vec = f.piece(t1).coeffs().to_vec();
            vec.extend_from_slice(f.piece(t2).coeffs());
            if !m.mul_vec(&vec).unwrap().iter().all(|x| x.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One reason a domain fails admissibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityViolation {
    OverConcaveVertex(LatticePoint),
    KissingPair(TriangleId, TriangleId),
    DisconnectedSupport(LatticePoint),
}

impl fmt::Display for AdmissibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibilityViolation::OverConcaveVertex(v) => {
                write!(f, "over-concave vertex at ({}, {})", v.i, v.j)
            }
            AdmissibilityViolation::KissingPair(a, b) => write!(
                f,
                "kissing triangles ({}, {}, {}) and ({}, {}, {})",
                a.i,
                a.j,
                a.orient.letter(),
                b.i,
                b.j,
                b.orient.letter()
            ),
            AdmissibilityViolation::DisconnectedSupport(v) => write!(
                f,
                "active translate at shift ({}, {}) has a disconnected restricted support",
                v.i, v.j
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub violations: Vec<AdmissibilityViolation>,
}

/// Admissibility of a domain with respect to a box spline: every active
/// translate's restricted support is edge-connected, no over-concave
/// boundary vertices, no kissing triangles.
pub fn is_admissible(
    domain: &MulticellDomain,
    n: DirectionTriple,
) -> Result<AdmissibilityReport, SpaceError> {
    let mut violations = Vec::new();
    let supp = crate::box_spline::support(n)?;
    for &v in &active_shifts(n, domain)?.shifts {
        let restricted: BTreeSet<TriangleId> = supp
            .iter()
            .map(|s| s.translate(v))
            .filter(|s| domain.contains(*s))
            .collect();
        if !is_edge_connected(&restricted) {
            violations.push(AdmissibilityViolation::DisconnectedSupport(v));
        }
    }
    for b in domain.boundary_vertices() {
        if is_over_concave(b, domain).unwrap_or(false) {
            violations.push(AdmissibilityViolation::OverConcaveVertex(b));
        }
    }
    for (a, b) in kissing_pairs(domain) {
        violations.push(AdmissibilityViolation::KissingPair(a, b));
    }
    Ok(AdmissibilityReport {
        admissible: violations.is_empty(),
        violations,
    })
}

/// Stacked exact constraint system over all BB coefficients of a domain
/// whose kernel is the edge-smoothness spline space for `d = d(n)` and the
/// local translate spaces as piece spaces.
pub fn global_constraint_system(
    domain: &MulticellDomain,
    n: DirectionTriple,
) -> Result<RationalMatrix, SpaceError> {
    let degree = n.degree();
    let dim = dim_bb(degree);
    let blocks = block_index(domain);
    let total = blocks.len() * dim;
    let mut rows: Vec<Vec<Rational>> = Vec::new();

    for (&t, &b) in &blocks {
        let membership = vn_membership_rows(n, t.orient)?;
        for r in 0..membership.rows() {
            let mut row = vec![Rational::zero(); total];
            row[b * dim..(b + 1) * dim].clone_from_slice(membership.row(r));
            rows.push(row);
        }
    }

    let d = n.smoothness();
    for e in domain.interior_edges() {
        let [t1, t2] = crate::mesh::edge_neighbors(e);
        let m = cr_edge_conditions(e, t1, t2, degree, d.order(e.etype))
            .expect("neighbors share the edge");
        let b1 = blocks[&t1];
        let b2 = blocks[&t2];
        for r in 0..m.rows() {
            let mut row = vec![Rational::zero(); total];
            row[b1 * dim..(b1 + 1) * dim].clone_from_slice(&m.row(r)[0..dim]);
            row[b2 * dim..(b2 + 1) * dim].clone_from_slice(&m.row(r)[dim..2 * dim]);
            rows.push(row);
        }
    }

    Ok(if rows.is_empty() {
        RationalMatrix::zeros(0, total)
    } else {
        RationalMatrix::from_rows(rows)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub dim_span: usize,
    pub dim_space: usize,
    pub complete: bool,
}

/// Compares the number of active translates (the span dimension, by local
/// linear independence) with the exact dimension of the edge-smoothness
/// spline space for `d = d(n)` over the local translate space.
pub fn completeness_check(
    domain: &MulticellDomain,
    n: DirectionTriple,
) -> Result<CompletenessReport, SpaceError> {
    if domain.is_empty() {
        return Ok(CompletenessReport {
            dim_span: 0,
            dim_space: 0,
            complete: true,
        });
    }
    let dim_span = active_shifts(n, domain)?.shifts.len();
    let system = global_constraint_system(domain, n)?;
    let dim_space = system.cols() - system.rank();
    Ok(CompletenessReport {
        dim_span,
        dim_space,
        complete: dim_span == dim_space,
    })
}

/// Builds a spline from a flat coefficient vector in domain block layout.
pub fn spline_from_vec(domain: &MulticellDomain, degree: u32, vec: &[Rational]) -> SplineFunction {
    let dim = dim_bb(degree);
    assert_eq!(vec.len(), domain.len() * dim);
    let mut pieces = BTreeMap::new();
    for (k, &t) in domain.triangles.iter().enumerate() {
        pieces.insert(
            t,
            BBPoly::from_coeffs(t, degree, vec[k * dim..(k + 1) * dim].to_vec()),
        );
    }
    SplineFunction::new(domain.clone(), pieces)
}
