//! Dyadic multilevel grids: nested domain sequences, ring decomposition,
//! Kraft selection of hierarchical box spline bases, exact independence
//! and completeness verification, and the constructive level-by-level
//! representation of hierarchical splines.

use crate::algebra::{Rational, RationalMatrix};
use crate::bernstein::{
    dim_bb, from_bb_at_level, level_scale, point_coords, to_bb_at_level, BBPoly, MonomialPoly,
};
use crate::box_spline::{box_spline, DirectionTriple};
use crate::mesh::{
    child_triangles, edge_neighbors, parent_triangle, EdgeType, LatticePoint, MulticellDomain,
    TriangleId,
};
use crate::spline_space::{active_shifts, is_admissible, SpaceError};
use num::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("domain at level {level} is not nested: triangle ({i}, {j}) sticks out", i = .offending.i, j = .offending.j)]
    NotNested { level: u32, offending: TriangleId },
    #[error("level fields must increase from 1 by one per position")]
    InvalidLevels,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepresentError {
    #[error("spline is not in the hierarchical spline space")]
    NotInSpace,
    #[error("level {level} solve is inconsistent: no coarse representation of the residual")]
    Inconsistent { level: u32 },
    #[error("level {level} component uses a translate outside the Kraft selection")]
    OutsideSelection { level: u32 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A triangle at an explicit grid level.
pub type LeveledTriangle = (u32, TriangleId);

/// A nested sequence of multicell domains, one per dyadic level, together
/// with the derived rings and the mixed-level triangle collection covering
/// the finest region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchicalDomain {
    levels: Vec<MulticellDomain>,
    rings: Vec<BTreeSet<TriangleId>>,
}

impl HierarchicalDomain {
    pub fn n_levels(&self) -> u32 {
        self.levels.len() as u32
    }

    /// The multicell domain of a level (1-based).
    pub fn level_domain(&self, level: u32) -> &MulticellDomain {
        &self.levels[(level - 1) as usize]
    }

    /// The ring of a level: its triangles not covered by the previous
    /// level.
    pub fn ring(&self, level: u32) -> &BTreeSet<TriangleId> {
        &self.rings[(level - 1) as usize]
    }

    /// All ring triangles with their levels, in canonical order.
    pub fn h_triangles(&self) -> Vec<LeveledTriangle> {
        let mut out = Vec::new();
        for (k, ring) in self.rings.iter().enumerate() {
            for &t in ring {
                out.push((k as u32 + 1, t));
            }
        }
        out
    }

    /// The unique ring triangle whose region contains the given level-`l`
    /// triangle of the level-`l` domain.
    pub fn covering_h_triangle(&self, level: u32, t: TriangleId) -> LeveledTriangle {
        let mut cur = t;
        let mut l = level;
        loop {
            if self.ring(l).contains(&cur) {
                return (l, cur);
            }
            assert!(l > 1, "triangle not covered by any ring");
            cur = parent_triangle(cur);
            l -= 1;
        }
    }
}

impl Serialize for HierarchicalDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            levels: &'a Vec<MulticellDomain>,
        }
        Repr {
            levels: &self.levels,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HierarchicalDomain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            levels: Vec<MulticellDomain>,
        }
        let r = Repr::deserialize(d)?;
        build_hierarchy(r.levels).map_err(serde::de::Error::custom)
    }
}

/// Builds a hierarchical domain from per-level multicell domains,
/// verifying that their closed regions are nested and deriving the rings.
pub fn build_hierarchy(levels: Vec<MulticellDomain>) -> Result<HierarchicalDomain, HierarchyError> {
    if levels.is_empty()
        || levels
            .iter()
            .enumerate()
            .any(|(k, m)| m.level != k as u32 + 1)
    {
        return Err(HierarchyError::InvalidLevels);
    }
    for k in 1..levels.len() {
        for &t in &levels[k - 1].triangles {
            for child in child_triangles(t) {
                if !levels[k].contains(child) {
                    return Err(HierarchyError::NotNested {
                        level: k as u32 + 1,
                        offending: t,
                    });
                }
            }
        }
    }
    let mut rings = Vec::with_capacity(levels.len());
    rings.push(levels[0].triangles.clone());
    for k in 1..levels.len() {
        let refined_prev: BTreeSet<TriangleId> = levels[k - 1]
            .triangles
            .iter()
            .flat_map(|&t| child_triangles(t))
            .collect();
        rings.push(
            levels[k]
                .triangles
                .difference(&refined_prev)
                .copied()
                .collect(),
        );
    }
    Ok(HierarchicalDomain { levels, rings })
}

/// The per-level Kraft selection: translates active on the level domain
/// whose supports avoid the closed region of the previous level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KraftBasis {
    pub n: DirectionTriple,
    pub per_level: Vec<Vec<LatticePoint>>,
}

impl KraftBasis {
    pub fn len(&self) -> usize {
        self.per_level.iter().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> Vec<(u32, LatticePoint)> {
        let mut out = Vec::new();
        for (k, shifts) in self.per_level.iter().enumerate() {
            for &v in shifts {
                out.push((k as u32 + 1, v));
            }
        }
        out
    }
}

/// Selects the hierarchical basis: at each level the active translates
/// whose open supports are disjoint from the closed previous-level region.
pub fn kraft_select(h: &HierarchicalDomain, n: DirectionTriple) -> Result<KraftBasis, SpaceError> {
    let supp = crate::box_spline::support(n)?;
    let mut per_level = Vec::new();
    for l in 1..=h.n_levels() {
        let active = active_shifts(n, h.level_domain(l))?.shifts;
        let selected: Vec<LatticePoint> = if l == 1 {
            active
        } else {
            let blocked: BTreeSet<TriangleId> = h
                .level_domain(l - 1)
                .triangles
                .iter()
                .flat_map(|&t| child_triangles(t))
                .collect();
            active
                .into_iter()
                .filter(|&v| supp.iter().all(|s| !blocked.contains(&s.translate(v))))
                .collect()
        };
        per_level.push(selected);
    }
    Ok(KraftBasis { n, per_level })
}

/// A spline over a hierarchical domain: one patch per ring triangle, keyed
/// by level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierSpline {
    pub degree: u32,
    pub pieces: BTreeMap<LeveledTriangle, BBPoly>,
}

impl HierSpline {
    pub fn piece(&self, key: &LeveledTriangle) -> &BBPoly {
        &self.pieces[key]
    }

    /// Monomial form of the piece covering a leveled triangle.
    pub fn piece_poly(&self, key: &LeveledTriangle) -> MonomialPoly {
        from_bb_at_level(&self.pieces[key], key.0)
    }
}

/// BB coefficients of the level-`l` translate `B_n(2^(l-1) . - v)`
/// restricted to the level-`l` triangle `t`; `None` off the support. The
/// coefficients equal those of the level-1 translate by scale invariance.
fn translate_piece_coeffs(
    n: DirectionTriple,
    v: LatticePoint,
    t: TriangleId,
) -> Result<Option<Vec<Rational>>, SpaceError> {
    let b = box_spline(n)?;
    let source = t.translate(crate::mesh::lp(-v.i, -v.j));
    Ok(b.piece(source).map(|p| p.coeffs().to_vec()))
}

/// Monomial form (in plane coordinates) of a level-`l` translate on the
/// level-`l` triangle `t`.
fn translate_piece_poly(
    n: DirectionTriple,
    level: u32,
    v: LatticePoint,
    t: TriangleId,
) -> Result<MonomialPoly, SpaceError> {
    Ok(match translate_piece_coeffs(n, v, t)? {
        Some(coeffs) => {
            let bb = BBPoly::from_coeffs(t, n.degree(), coeffs);
            from_bb_at_level(&bb, level)
        }
        None => MonomialPoly::zero(),
    })
}

/// Exact full-column-rank test of the collocation matrix of a candidate
/// hierarchical family over the finest refinement of the domain.
pub fn independence_check(
    h: &HierarchicalDomain,
    members: &[(u32, LatticePoint)],
    n: DirectionTriple,
) -> Result<bool, SpaceError> {
    Ok(collocation_matrix(h, members, n)?.rank() == members.len())
}

fn collocation_matrix(
    h: &HierarchicalDomain,
    members: &[(u32, LatticePoint)],
    n: DirectionTriple,
) -> Result<RationalMatrix, SpaceError> {
    let finest = h.n_levels();
    let degree = n.degree();
    let dim = dim_bb(degree);
    let mut fine_cells: Vec<TriangleId> = Vec::new();
    for (level, t) in h.h_triangles() {
        let mut cells = BTreeSet::from([t]);
        for _ in level..finest {
            cells = cells.iter().flat_map(|&c| child_triangles(c)).collect();
        }
        fine_cells.extend(cells);
    }
    let mut rows = vec![vec![Rational::zero(); members.len()]; fine_cells.len() * dim];
    for (col, &(level, v)) in members.iter().enumerate() {
        for (cell_idx, &cell) in fine_cells.iter().enumerate() {
            // ancestor of the fine cell at the member's level
            let mut anc = cell;
            for _ in level..finest {
                anc = parent_triangle(anc);
            }
            let poly = translate_piece_poly(n, level, v, anc)?;
            if poly.is_zero() {
                continue;
            }
            let bb =
                to_bb_at_level(&poly, cell, finest, degree).expect("restriction preserves degree");
            for (r, c) in bb.coeffs().iter().enumerate() {
                rows[cell_idx * dim + r][col] = c.clone();
            }
        }
    }
    Ok(RationalMatrix::from_rows(rows))
}

/// Block layout of the hierarchical coefficient vector.
fn h_block_index(h: &HierarchicalDomain) -> BTreeMap<LeveledTriangle, usize> {
    h.h_triangles()
        .into_iter()
        .enumerate()
        .map(|(k, key)| (key, k))
        .collect()
}

/// Adapted-coordinate substitution for a line at a given level:
/// `u` vanishes on the line, `w` parameterizes it.
fn line_substitution(
    etype: EdgeType,
    a: LatticePoint,
    level: u32,
) -> ([Rational; 3], [Rational; 3]) {
    let h = level_scale(level);
    let zero = Rational::zero;
    let one = num::One::one;
    match etype {
        EdgeType::E1 => {
            let c = crate::algebra::rat(a.j) * &h;
            ([zero(), zero(), one()], [c, one(), zero()])
        }
        EdgeType::E2 => {
            let c = crate::algebra::rat(a.i) * &h;
            ([c, one(), zero()], [zero(), zero(), one()])
        }
        EdgeType::E3 => {
            let c = crate::algebra::rat(a.i - a.j) * &h;
            ([c, one(), one()], [zero(), zero(), one()])
        }
    }
}

/// Stacked exact constraint system over the BB coefficients of all ring
/// triangles whose kernel is the hierarchical spline space with edge
/// smoothness `d(n)` over the local translate spaces: per-patch space
/// membership, the per-level diamond smoothness conditions (taken within
/// each level's domain, pulled back to the covering ring patches), and
/// value matching at isolated contact points.
pub fn hierarchical_constraint_system(
    h: &HierarchicalDomain,
    n: DirectionTriple,
) -> Result<RationalMatrix, SpaceError> {
    let degree = n.degree();
    let dim = dim_bb(degree);
    let blocks = h_block_index(h);
    let total = blocks.len() * dim;
    let d = n.smoothness();
    let mut rows: Vec<Vec<Rational>> = Vec::new();

    // per-patch membership in the local translate space
    for (&(_, t), &b) in &blocks {
        let membership = crate::spline_space::vn_membership_rows(n, t.orient)?;
        for r in 0..membership.rows() {
            let mut row = vec![Rational::zero(); total];
            row[b * dim..(b + 1) * dim].clone_from_slice(membership.row(r));
            rows.push(row);
        }
    }

    // cached monomial forms of the BB basis on covering patches
    let mut basis_cache: BTreeMap<LeveledTriangle, Vec<MonomialPoly>> = BTreeMap::new();
    let mut basis_polys = |key: LeveledTriangle| -> Vec<MonomialPoly> {
        basis_cache
            .entry(key)
            .or_insert_with(|| {
                crate::bernstein::bb_indices(degree)
                    .into_iter()
                    .map(|(j, k, l)| crate::bernstein::bb_basis_poly(key.1, key.0, degree, j, k, l))
                    .collect()
            })
            .clone()
    };

    // per-level smoothness conditions across interior edges, expressed on
    // the covering ring patches
    let mut seen: BTreeSet<(LeveledTriangle, LeveledTriangle, EdgeType, String)> = BTreeSet::new();
    for l in 1..=h.n_levels() {
        let domain = h.level_domain(l);
        for e in domain.interior_edges() {
            let [t1, t2] = edge_neighbors(e);
            let c1 = h.covering_h_triangle(l, t1);
            let c2 = h.covering_h_triangle(l, t2);
            if c1 == c2 {
                continue;
            }
            let (x_expr, y_expr) = line_substitution(e.etype, e.a, l);
            let line_key = format!("{:?}|{:?}", x_expr[0], y_expr[0]);
            if !seen.insert((c1.min(c2), c1.max(c2), e.etype, line_key)) {
                continue;
            }
            let r = d.order(e.etype);
            if r < 0 {
                continue;
            }
            let rmax = (r as u32).min(degree);
            let b1 = blocks[&c1];
            let b2 = blocks[&c2];
            let polys1 = basis_polys(c1);
            let polys2 = basis_polys(c2);
            for a_pow in 0..=rmax {
                for b_pow in 0..=(degree - a_pow) {
                    let mut row = vec![Rational::zero(); total];
                    let mut nonzero = false;
                    for (offset, polys, sign) in [(b1, &polys1, 1i64), (b2, &polys2, -1i64)] {
                        for (col, poly) in polys.iter().enumerate() {
                            let adapted = poly.substitute_affine(&x_expr, &y_expr);
                            let c = adapted.coeff(a_pow, b_pow) * crate::algebra::rat(sign);
                            if !c.is_zero() {
                                row[offset * dim + col] = c;
                                nonzero = true;
                            }
                        }
                    }
                    if nonzero {
                        rows.push(row);
                    }
                }
            }
        }
    }

    // value matching at isolated contact points between ring patches
    for (key1, key2, v) in isolated_contacts(h) {
        let (vx, vy) = point_coords(v, h.n_levels());
        let b1 = blocks[&key1];
        let b2 = blocks[&key2];
        let polys1 = basis_polys(key1);
        let polys2 = basis_polys(key2);
        let mut row = vec![Rational::zero(); total];
        for (offset, polys, sign) in [(b1, &polys1, 1i64), (b2, &polys2, -1i64)] {
            for (col, poly) in polys.iter().enumerate() {
                let c = poly.eval(&vx, &vy) * crate::algebra::rat(sign);
                if !c.is_zero() {
                    row[offset * dim + col] = c;
                }
            }
        }
        rows.push(row);
    }

    Ok(if rows.is_empty() {
        RationalMatrix::zeros(0, total)
    } else {
        RationalMatrix::from_rows(rows)
    })
}

/// Pairs of ring triangles whose closed regions meet in exactly one point,
/// with the shared point in finest-level lattice coordinates.
fn isolated_contacts(
    h: &HierarchicalDomain,
) -> Vec<(LeveledTriangle, LeveledTriangle, LatticePoint)> {
    let finest = h.n_levels();
    let keys = h.h_triangles();
    // descendant cells at the finest level
    let refined: Vec<BTreeSet<TriangleId>> = keys
        .iter()
        .map(|&(level, t)| {
            let mut cells = BTreeSet::from([t]);
            for _ in level..finest {
                cells = cells.iter().flat_map(|&c| child_triangles(c)).collect();
            }
            cells
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..keys.len() {
        let di = MulticellDomain::new(finest, refined[i].iter().copied());
        for j in (i + 1)..keys.len() {
            let dj = MulticellDomain::new(finest, refined[j].iter().copied());
            let shared_edges: BTreeSet<_> = di.edges().intersection(&dj.edges()).copied().collect();
            if !shared_edges.is_empty() {
                continue;
            }
            let shared_vertices: Vec<LatticePoint> = di
                .vertices()
                .intersection(&dj.vertices())
                .copied()
                .collect();
            match shared_vertices.len() {
                0 => {}
                1 => out.push((keys[i], keys[j], shared_vertices[0])),
                _ => unreachable!("convex regions meet in a point or a segment"),
            }
        }
    }
    out
}

/// Builds a hierarchical spline from a flat coefficient vector in block
/// layout.
pub fn hier_spline_from_vec(h: &HierarchicalDomain, degree: u32, vec: &[Rational]) -> HierSpline {
    let dim = dim_bb(degree);
    let keys = h.h_triangles();
    assert_eq!(vec.len(), keys.len() * dim);
    let mut pieces = BTreeMap::new();
    for (k, key) in keys.into_iter().enumerate() {
        pieces.insert(
            key,
            BBPoly::from_coeffs(key.1, degree, vec[k * dim..(k + 1) * dim].to_vec()),
        );
    }
    HierSpline { degree, pieces }
}

/// Flat coefficient vector of a hierarchical spline.
pub fn hier_spline_to_vec(h: &HierarchicalDomain, s: &HierSpline) -> Vec<Rational> {
    h.h_triangles()
        .iter()
        .flat_map(|key| s.pieces[key].coeffs().iter().cloned())
        .collect()
}

/// Membership in the hierarchical spline space.
pub fn hier_membership(
    h: &HierarchicalDomain,
    s: &HierSpline,
    n: DirectionTriple,
) -> Result<bool, SpaceError> {
    let system = hierarchical_constraint_system(h, n)?;
    let vec = hier_spline_to_vec(h, s);
    Ok(system.mul_vec(&vec).unwrap().iter().all(|x| x.is_zero()))
}

/// Per-level coefficient maps of a representation `s = sum_l h^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub per_level: Vec<BTreeMap<LatticePoint, Rational>>,
}

/// Represents a hierarchical spline as a sum of level components by greedy
/// level ascent: at each level the residual on the level domain is matched
/// exactly in the span of that level's active translates; each component
/// must vanish on the previous level's region and select only Kraft
/// translates.
pub fn represent(
    h: &HierarchicalDomain,
    s: &HierSpline,
    n: DirectionTriple,
) -> Result<Representation, RepresentError> {
    if !hier_membership(h, s, n)? {
        return Err(RepresentError::NotInSpace);
    }
    let degree = n.degree();
    let dim = dim_bb(degree);
    let kraft = kraft_select(h, n)?;
    let mut per_level: Vec<BTreeMap<LatticePoint, Rational>> = Vec::new();

    // residual of the target on a level-l triangle of the level-l domain
    let residual_on = |t: TriangleId,
                       l: u32,
                       solved: &[BTreeMap<LatticePoint, Rational>]|
     -> Result<Vec<Rational>, RepresentError> {
        let cover = h.covering_h_triangle(l, t);
        let target = from_bb_at_level(&s.pieces[&cover], cover.0);
        let mut poly = target;
        for (k, coeffs) in solved.iter().enumerate() {
            let level_k = k as u32 + 1;
            // ancestor of t at level k+1
            let mut anc = t;
            for _ in level_k..l {
                anc = parent_triangle(anc);
            }
            for (v, a) in coeffs {
                if a.is_zero() {
                    continue;
                }
                let contrib = translate_piece_poly(n, level_k, *v, anc)?;
                if !contrib.is_zero() {
                    poly = &poly - &contrib.scale(a);
                }
            }
        }
        let bb = to_bb_at_level(&poly, t, l, degree).expect("degree bound");
        Ok(bb.coeffs().to_vec())
    };

    for l in 1..=h.n_levels() {
        let domain = h.level_domain(l);
        let actives = active_shifts(n, domain)?.shifts;
        let b = box_spline(n).map_err(SpaceError::from)?;
        // assemble the collocation system over the level domain
        let tri_list: Vec<TriangleId> = domain.triangles.iter().copied().collect();
        let mut matrix = RationalMatrix::zeros(tri_list.len() * dim, actives.len());
        let mut rhs: Vec<Rational> = Vec::with_capacity(tri_list.len() * dim);
        for (ti, &t) in tri_list.iter().enumerate() {
            for (col, &v) in actives.iter().enumerate() {
                let source = t.translate(crate::mesh::lp(-v.i, -v.j));
                if let Some(p) = b.piece(source) {
                    for (r, c) in p.coeffs().iter().enumerate() {
                        matrix.set(ti * dim + r, col, c.clone());
                    }
                }
            }
            rhs.extend(residual_on(t, l, &per_level)?);
        }
        let solution = matrix
            .solve(&rhs)
            .expect("dimensions agree")
            .ok_or(RepresentError::Inconsistent { level: l })?;
        let coeffs: BTreeMap<LatticePoint, Rational> = actives
            .iter()
            .copied()
            .zip(solution)
            .filter(|(_, c)| !c.is_zero())
            .collect();

        // the component must vanish on the previous level's region
        if l > 1 {
            let blocked: BTreeSet<TriangleId> = h
                .level_domain(l - 1)
                .triangles
                .iter()
                .flat_map(|&t| child_triangles(t))
                .collect();
            for &t in &blocked {
                let mut acc = vec![Rational::zero(); dim];
                for (v, a) in &coeffs {
                    let source = t.translate(crate::mesh::lp(-v.i, -v.j));
                    if let Some(p) = b.piece(source) {
                        for (slot, c) in acc.iter_mut().zip(p.coeffs()) {
                            *slot += a * c;
                        }
                    }
                }
                if acc.iter().any(|c| !c.is_zero()) {
                    return Err(RepresentError::Inconsistent { level: l });
                }
            }
        }

        // and may only use Kraft-selected translates
        let selected: BTreeSet<LatticePoint> =
            kraft.per_level[(l - 1) as usize].iter().copied().collect();
        if coeffs.keys().any(|v| !selected.contains(v)) {
            return Err(RepresentError::OutsideSelection { level: l });
        }
        per_level.push(coeffs);
    }

    // exact reconstruction on every ring triangle
    for (level, t) in h.h_triangles() {
        let mut acc = s.piece_poly(&(level, t));
        for (k, coeffs) in per_level.iter().enumerate() {
            let level_k = k as u32 + 1;
            if level_k > level {
                continue; // vanishes there by the check above
            }
            let mut anc = t;
            for _ in level_k..level {
                anc = parent_triangle(anc);
            }
            for (v, a) in coeffs {
                let contrib = translate_piece_poly(n, level_k, *v, anc)?;
                if !contrib.is_zero() {
                    acc = &acc - &contrib.scale(a);
                }
            }
        }
        assert!(acc.is_zero(), "representation must reconstruct exactly");
    }

    Ok(Representation { per_level })
}

#[derive(Debug, Clone, Serialize)]
pub struct HierCompletenessReport {
    pub dim_span_kraft: usize,
    pub dim_space: usize,
    pub equal: bool,
    pub independent: bool,
    pub admissible_levels: bool,
}

/// Compares the Kraft selection size with the exact dimension of the
/// hierarchical spline space, and reports per-level admissibility.
pub fn hierarchical_completeness(
    h: &HierarchicalDomain,
    n: DirectionTriple,
) -> Result<HierCompletenessReport, SpaceError> {
    let kraft = kraft_select(h, n)?;
    let members = kraft.members();
    let independent = independence_check(h, &members, n)?;
    let system = hierarchical_constraint_system(h, n)?;
    let dim_space = system.cols() - system.rank();
    let admissible_levels = (1..=h.n_levels())
        .map(|l| is_admissible(h.level_domain(l), n))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .all(|r| r.admissible);
    Ok(HierCompletenessReport {
        dim_span_kraft: members.len(),
        dim_space,
        equal: members.len() == dim_space,
        independent,
        admissible_levels,
    })
}

/// Deterministic members of the hierarchical spline space built from
/// small-integer combinations of an exact kernel basis.
pub fn sample_space_members(
    h: &HierarchicalDomain,
    n: DirectionTriple,
    count: usize,
) -> Result<Vec<HierSpline>, SpaceError> {
    let system = hierarchical_constraint_system(h, n)?;
    let kernel = system.kernel_basis();
    let mut out = Vec::new();
    if kernel.is_empty() {
        return Ok(out);
    }
    for seed in 0..count {
        let mut combo = vec![Rational::zero(); system.cols()];
        for (k, v) in kernel.iter().enumerate() {
            let w = crate::algebra::rat(((seed + 2 * k + 1) % 7) as i64 - 3);
            if w.is_zero() {
                continue;
            }
            for (c, x) in combo.iter_mut().zip(v) {
                *c += &w * x;
            }
        }
        out.push(hier_spline_from_vec(h, n.degree(), &combo));
    }
    Ok(out)
}
