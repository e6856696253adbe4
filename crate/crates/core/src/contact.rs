//! Executable contact characterizations: the equivalence between edge
//! smoothness of a pair of local-space patches and agreement of their
//! expansion coefficients on shared translates, the decomposition of such
//! pairs, the edge-power divisibility criterion, and the algorithmic
//! vertex-contact verification by rref equivalence of the two condition
//! matrices.

use crate::algebra::{Rational, RationalMatrix};
use crate::bernstein::{
    cr_edge_conditions, dim_bb, from_bb, vertex_conditions, BBPoly, MonomialPoly,
};
use crate::box_spline::DirectionTriple;
use crate::mesh::{
    lower, shared_edge, shared_vertices, smoothness_type, upper, EdgeId, LatticePoint, TriangleId,
};
use crate::spline_space::{
    active_shifts_on_triangle, intersection_index_set, lambda_extract, local_basis_matrix,
    SpaceError,
};
use num::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContactError {
    #[error("triangles do not touch")]
    NotTouching,
    #[error("configuration is not an edge contact")]
    NotEdgeContact,
    #[error("contact description is inconsistent with the triangle pair")]
    InvalidContact,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Contact between the closures of two triangles: a shared edge or a
/// single shared vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Contact {
    Edge(EdgeId),
    Vertex(LatticePoint),
}

/// A verified triangle-pair contact for a fixed box spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContactConfig {
    pub n: DirectionTriple,
    pub t: TriangleId,
    pub t2: TriangleId,
    pub contact: Contact,
}

impl ContactConfig {
    /// Builds the configuration, classifying and validating the contact.
    pub fn new(n: DirectionTriple, t: TriangleId, t2: TriangleId) -> Result<Self, ContactError> {
        let contact = classify_contact(t, t2)?;
        Ok(ContactConfig { n, t, t2, contact })
    }

    pub fn with_contact(
        n: DirectionTriple,
        t: TriangleId,
        t2: TriangleId,
        contact: Contact,
    ) -> Result<Self, ContactError> {
        let actual = classify_contact(t, t2)?;
        if actual != contact {
            return Err(ContactError::InvalidContact);
        }
        Ok(ContactConfig { n, t, t2, contact })
    }
}

fn classify_contact(t: TriangleId, t2: TriangleId) -> Result<Contact, ContactError> {
    if let Some(e) = shared_edge(t, t2) {
        return Ok(Contact::Edge(e));
    }
    let verts = shared_vertices(t, t2);
    if t != t2 && verts.len() == 1 {
        return Ok(Contact::Vertex(verts[0]));
    }
    Err(ContactError::NotTouching)
}

/// Shifts active on both triangles, lexicographically ordered, with their
/// count `p`.
pub fn shared_active(
    n: DirectionTriple,
    t: TriangleId,
    t2: TriangleId,
) -> Result<(Vec<LatticePoint>, usize), ContactError> {
    if t != t2 && classify_contact(t, t2).is_err() {
        return Err(ContactError::NotTouching);
    }
    let a: BTreeSet<LatticePoint> = active_shifts_on_triangle(n, t)?.into_iter().collect();
    let b: BTreeSet<LatticePoint> = active_shifts_on_triangle(n, t2)?.into_iter().collect();
    let shared: Vec<LatticePoint> = a.intersection(&b).copied().collect();
    let p = shared.len();
    Ok((shared, p))
}

/// Coefficient ordering of one triangle's local space adapted to a pair:
/// shared shifts first (lexicographic), then the remaining shifts
/// (lexicographic).
fn adapted_shift_order(
    n: DirectionTriple,
    t: TriangleId,
    shared: &[LatticePoint],
) -> Result<Vec<LatticePoint>, ContactError> {
    let all: BTreeSet<LatticePoint> = active_shifts_on_triangle(n, t)?.into_iter().collect();
    let shared_set: BTreeSet<LatticePoint> = shared.iter().copied().collect();
    let mut order: Vec<LatticePoint> = shared.to_vec();
    order.extend(all.difference(&shared_set));
    Ok(order)
}

/// Checks edge smoothness of a local-space pair against agreement of their
/// expansion coefficients on shared shifts. Returns
/// `(in_space, lambda_equal)`; the two always coincide.
pub fn edge_contact_equivalence(
    cfg: &ContactConfig,
    f: &BBPoly,
    f2: &BBPoly,
) -> Result<(bool, bool), ContactError> {
    let e = match cfg.contact {
        Contact::Edge(e) => e,
        Contact::Vertex(_) => return Err(ContactError::NotEdgeContact),
    };
    let lam = lambda_extract(f, cfg.n)?;
    let lam2 = lambda_extract(f2, cfg.n)?;

    let d = cfg.n.smoothness();
    let m = cr_edge_conditions(e, cfg.t, cfg.t2, cfg.n.degree(), d.order(e.etype))
        .expect("edge contact");
    let mut vec = f.coeffs().to_vec();
    vec.extend_from_slice(f2.coeffs());
    let in_space = m.mul_vec(&vec).unwrap().iter().all(|x| x.is_zero());

    let (shared, _) = shared_active(cfg.n, cfg.t, cfg.t2)?;
    let lambda_equal = shared
        .iter()
        .all(|v| lam.lambda.get(v) == lam2.lambda.get(v));
    debug_assert_eq!(in_space, lambda_equal);
    Ok((in_space, lambda_equal))
}

/// Splits a local-space pair `(f, f2)` into `(g, f2) + (h, 0)` where `g`
/// copies the shared-shift coefficients of `f2` and `h = f - g`.
pub fn decompose_pair(
    cfg: &ContactConfig,
    f: &BBPoly,
    f2: &BBPoly,
) -> Result<(MonomialPoly, MonomialPoly), ContactError> {
    let lam2 = lambda_extract(f2, cfg.n)?;
    lambda_extract(f, cfg.n)?;
    let (shared, _) = shared_active(cfg.n, cfg.t, cfg.t2)?;
    let mut g_lambda = std::collections::BTreeMap::new();
    for v in shared {
        if let Some(c) = lam2.lambda.get(&v) {
            g_lambda.insert(v, c.clone());
        }
    }
    let g_bb = crate::spline_space::lambda_combine(cfg.t, cfg.n, &g_lambda)?;
    let g = from_bb(&g_bb);
    let h = &from_bb(f) - &g;
    Ok((g, h))
}

/// True iff the patch vanishes on the edge to order at least
/// `|n| - n_i - 1`, the order at which a pair with a zero partner across a
/// type-`i` edge becomes edge smooth.
pub fn divisibility_criterion(
    n: DirectionTriple,
    f: &BBPoly,
    e: EdgeId,
) -> Result<bool, ContactError> {
    let order = crate::bernstein::vanishing_order_on_edge(f, e)
        .map_err(|_| ContactError::InvalidContact)?;
    let needed = n.total() - n.multiplicity(e.etype) - 1;
    Ok(order >= needed)
}

/// The two condition matrices of a contact configuration in the
/// shared-first coefficient ordering, together with the shared count `p`,
/// the per-triangle remainder `q`, and the permutation aligning the two
/// triangles' shared-shift orderings (the identity under the global
/// lexicographic ordering used here, recorded explicitly).
#[derive(Debug, Clone)]
pub struct ContactMatrices {
    pub a_i: RationalMatrix,
    pub a_ii: RationalMatrix,
    pub p: usize,
    pub q: usize,
    pub perm: Vec<usize>,
}

/// Assembles the smoothness-condition matrix `A_i = C * L` over the
/// lambda coordinates of the two triangles and the canonical
/// shared-agreement matrix `A_ii = [I_p 0_q -I_p 0_q]`.
pub fn build_contact_matrices(cfg: &ContactConfig) -> Result<ContactMatrices, ContactError> {
    let n = cfg.n;
    let degree = n.degree();
    let dim = dim_bb(degree);
    let phi = n.phi();
    let (shared, p) = shared_active(n, cfg.t, cfg.t2)?;
    let q = phi - p;

    // conditions over the concatenated BB coefficients
    let conditions: RationalMatrix = match cfg.contact {
        Contact::Edge(e) => {
            let d = n.smoothness();
            (*cr_edge_conditions(e, cfg.t, cfg.t2, degree, d.order(e.etype)).expect("edge contact"))
                .clone()
        }
        Contact::Vertex(_) => {
            let st = smoothness_type(cfg.t, cfg.t2).expect("touching pair");
            let index_set = intersection_index_set(&st, n.smoothness(), degree);
            vertex_conditions(cfg.t, cfg.t2, &index_set, degree).expect("vertex contact")
        }
    };

    // L maps adapted lambda coordinates to BB coefficients, block per
    // triangle.
    let mut l = RationalMatrix::zeros(2 * dim, 2 * phi);
    for (block, tri) in [(0usize, cfg.t), (1usize, cfg.t2)] {
        let order = adapted_shift_order(n, tri, &shared)?;
        let basis = local_basis_matrix(tri, n)?;
        let lex = active_shifts_on_triangle(n, tri)?;
        for (col, v) in order.iter().enumerate() {
            let row_idx = lex.iter().position(|w| w == v).expect("shift is active");
            for r in 0..dim {
                l.set(
                    block * dim + r,
                    block * phi + col,
                    basis.get(row_idx, r).clone(),
                );
            }
        }
    }

    let a_i = conditions.mul(&l).expect("dimensions agree");

    // both triangles order the shared shifts lexicographically, so the
    // aligning permutation is the identity
    let order2 = adapted_shift_order(n, cfg.t2, &shared)?;
    let perm: Vec<usize> = shared
        .iter()
        .map(|v| order2.iter().position(|w| w == v).expect("shared shift"))
        .collect();
    debug_assert!(perm.iter().enumerate().all(|(k, &pk)| k == pk));

    let mut a_ii = RationalMatrix::zeros(p, 2 * phi);
    for (k, &pk) in perm.iter().enumerate() {
        a_ii.set(k, k, Rational::one());
        a_ii.set(k, phi + pk, -Rational::one());
    }

    Ok(ContactMatrices {
        a_i,
        a_ii,
        p,
        q,
        perm,
    })
}

/// Verifies a contact configuration: the smoothness conditions and the
/// shared-coefficient agreement define the same row space, and the rref of
/// the former literally reproduces the canonical latter.
pub fn verify_contact(cfg: &ContactConfig) -> Result<bool, ContactError> {
    let m = build_contact_matrices(cfg)?;
    let equal = m.a_i.row_space_equal(&m.a_ii).expect("same column count");
    if !equal {
        return Ok(false);
    }
    let literal = m.a_i.nonzero_rref_rows()
        == (0..m.a_ii.rows())
            .map(|r| m.a_ii.row(r).to_vec())
            .collect::<Vec<_>>();
    Ok(literal)
}

/// The canonical contact classes: three edge contacts and the nine
/// vertex contacts around a shared vertex (six at ring distance two,
/// three opposite).
pub fn canonical_configurations() -> Vec<(String, TriangleId, TriangleId)> {
    let mut out = Vec::new();
    out.push(("edge-1".to_string(), lower(0, 0), upper(0, -1)));
    out.push(("edge-2".to_string(), lower(0, 0), upper(1, 0)));
    out.push(("edge-3".to_string(), lower(0, 0), upper(0, 0)));
    let ring = crate::mesh::star_triangles(crate::mesh::lp(0, 0));
    for dist in [2usize, 3] {
        for start in 0..6 {
            if dist == 3 && start >= 3 {
                continue;
            }
            let a = ring[start];
            let b = ring[(start + dist) % 6];
            let st = smoothness_type(a, b).unwrap();
            let label = format!(
                "vertex-{}-{}",
                st.iter()
                    .map(|e| e.index().to_string())
                    .collect::<Vec<_>>()
                    .join(""),
                start
            );
            out.push((label, a, b));
        }
    }
    out
}

/// Outcome of one sweep case.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCase {
    pub n: (u32, u32, u32),
    pub case: String,
    pub contact: String,
    pub st: Vec<usize>,
    pub p: usize,
    pub q: usize,
    pub pass: bool,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub max_n: (u32, u32, u32),
    pub cases: Vec<SweepCase>,
    pub all_pass: bool,
}

/// Which contact classes a sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactFilter {
    Edge,
    Vertex,
    All,
}

/// Verifies every contact class for every multiplicity triple up to
/// `max_n` componentwise. Cases run in parallel and are reported in a
/// deterministic order.
pub fn sweep(max_n: DirectionTriple, filter: ContactFilter) -> Result<SweepReport, ContactError> {
    let mut triples = Vec::new();
    for n1 in 1..=max_n.n1 {
        for n2 in 1..=max_n.n2 {
            for n3 in 1..=max_n.n3 {
                triples.push(crate::box_spline::triple(n1, n2, n3));
            }
        }
    }
    // construct the box splines up front so parallel cases share the cache
    for &n in &triples {
        crate::box_spline::box_spline(n).map_err(SpaceError::from)?;
    }

    let configs: Vec<(String, TriangleId, TriangleId)> = canonical_configurations()
        .into_iter()
        .filter(|(label, _, _)| match filter {
            ContactFilter::All => true,
            ContactFilter::Edge => label.starts_with("edge"),
            ContactFilter::Vertex => label.starts_with("vertex"),
        })
        .collect();

    let mut jobs: Vec<(DirectionTriple, String, TriangleId, TriangleId)> = Vec::new();
    for &n in &triples {
        for (label, a, b) in &configs {
            jobs.push((n, label.clone(), *a, *b));
        }
    }

    let cases: Result<Vec<SweepCase>, ContactError> = jobs
        .par_iter()
        .map(|(n, label, a, b)| {
            let start = Instant::now();
            let cfg = ContactConfig::new(*n, *a, *b)?;
            let m = build_contact_matrices(&cfg)?;
            let pass = verify_contact(&cfg)?;
            let st = smoothness_type(*a, *b).unwrap();
            Ok(SweepCase {
                n: (n.n1, n.n2, n.n3),
                case: label.clone(),
                contact: match cfg.contact {
                    Contact::Edge(_) => "edge".to_string(),
                    Contact::Vertex(_) => "vertex".to_string(),
                },
                st: st.iter().map(|e| e.index()).collect(),
                p: m.p,
                q: m.q,
                pass,
                millis: start.elapsed().as_millis(),
            })
        })
        .collect();
    let mut cases = cases?;
    cases.sort_by(|a, b| (a.n, &a.case).cmp(&(b.n, &b.case)));
    let all_pass = cases.iter().all(|c| c.pass);
    Ok(SweepReport {
        max_n: (max_n.n1, max_n.n2, max_n.n3),
        cases,
        all_pass,
    })
}
