//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. All assertions are exact; no tolerances.
//!
//! The full vertex sweep through multiplicities (4,4,4) is pinned in
//! `criterion_10_full_vertex_sweep` and marked ignored for routine runs
//! because of its runtime; run it with `cargo test --release -- --ignored`.

use boxspline_core::algebra::{rat, ratio, Rational};
use boxspline_core::bernstein::{
    cr_edge_conditions, eval as bb_eval, from_bb, regularity, to_bb, MonomialPoly,
};
use boxspline_core::box_spline::{
    box_spline, courant_hat, derivative_as_difference, dilate, refinement_mask, support, triple,
    DirectionTriple, PiecewisePoly,
};
use boxspline_core::contact::{
    edge_contact_equivalence, shared_active, sweep, ContactConfig, ContactFilter,
};
use boxspline_core::hierarchy::{
    build_hierarchy, hierarchical_completeness, independence_check, kraft_select, represent,
    sample_space_members,
};
use boxspline_core::mesh::{
    child_triangles, edge_neighbors, lower, lp, star, triangle_edges, upper, EdgeType,
    LatticePoint, MulticellDomain, TriangleId,
};
use boxspline_core::spline_space::{
    active_shifts_on_triangle, completeness_check, is_admissible, lambda_combine,
    local_basis_matrix, membership_edge_space, membership_strongly_regular, space_vn_basis,
    SplineFunction,
};
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

fn report(criterion: &str, detail: &str) {
    println!("criterion {criterion}: PASS — {detail}");
}

fn poly(terms: &[(u32, u32, i64)]) -> MonomialPoly {
    let mut p = MonomialPoly::zero();
    for &(a, b, c) in terms {
        p.add_term(a, b, rat(c));
    }
    p
}

fn triples_with_total_at_most(max_total: u32) -> Vec<DirectionTriple> {
    let mut out = Vec::new();
    for n1 in 1..=max_total {
        for n2 in 1..=max_total {
            for n3 in 1..=max_total {
                if n1 + n2 + n3 <= max_total {
                    out.push(triple(n1, n2, n3));
                }
            }
        }
    }
    out
}

fn triples_up_to(max: DirectionTriple) -> Vec<DirectionTriple> {
    let mut out = Vec::new();
    for n1 in 1..=max.n1 {
        for n2 in 1..=max.n2 {
            for n3 in 1..=max.n3 {
                out.push(triple(n1, n2, n3));
            }
        }
    }
    out
}

#[test]
fn criterion_01_courant_hat_values() {
    let start = Instant::now();
    let hat = courant_hat();
    assert_eq!(hat.eval(&rat(1), &rat(1)), rat(1));
    for (i, j) in [(0, 0), (0, 1), (1, 2), (2, 1), (2, 2)] {
        assert_eq!(hat.eval(&rat(i), &rat(j)), rat(0), "hat at ({i}, {j})");
    }
    assert!(start.elapsed().as_secs() < 1);
    report("01", "hat interpolates 1 at its center and 0 at neighbors");
}

/// Every interior or boundary edge of the support window satisfies the
/// per-type smoothness conditions exactly; boundary edges compare against
/// the zero function outside the support.
fn edge_condition_residual(
    b: &PiecewisePoly,
    e: boxspline_core::mesh::EdgeId,
    r: i32,
) -> Vec<Rational> {
    let [t1, t2] = edge_neighbors(e);
    let m = cr_edge_conditions(e, t1, t2, b.degree, r).unwrap();
    let zero = boxspline_core::bernstein::BBPoly::zero(t1, b.degree);
    let c1 = b.piece(t1).unwrap_or(&zero);
    let zero2 = boxspline_core::bernstein::BBPoly::zero(t2, b.degree);
    let c2 = b.piece(t2).unwrap_or(&zero2);
    let mut vec = c1.coeffs().to_vec();
    vec.extend_from_slice(c2.coeffs());
    m.mul_vec(&vec).unwrap()
}

#[test]
fn criterion_02_degree_and_sharp_smoothness() {
    let start = Instant::now();
    for n in triples_with_total_at_most(8) {
        let b = box_spline(n).unwrap();
        let degree = n.total() - 2;
        assert_eq!(b.degree, degree, "{n:?}");
        for piece in b.pieces.values() {
            assert_eq!(
                from_bb(piece).total_degree(),
                degree,
                "{n:?}: every piece has exact total degree"
            );
        }
        let d = n.smoothness();
        let edges: BTreeSet<_> = b.pieces.keys().flat_map(|&t| triangle_edges(t)).collect();
        let mut sharp = BTreeMap::from([
            (EdgeType::E1, false),
            (EdgeType::E2, false),
            (EdgeType::E3, false),
        ]);
        for e in edges {
            let r = d.order(e.etype);
            assert!(
                edge_condition_residual(&b, e, r)
                    .iter()
                    .all(|x| x.is_zero()),
                "{n:?}: C^{r} across {e:?}"
            );
            if !edge_condition_residual(&b, e, r + 1)
                .iter()
                .all(|x| x.is_zero())
            {
                sharp.insert(e.etype, true);
            }
        }
        for (etype, found) in sharp {
            assert!(found, "{n:?}: smoothness across type {etype:?} is sharp");
        }
    }
    assert!(start.elapsed().as_secs() < 120);
    report(
        "02",
        "degrees exact and smoothness orders sharp for |n| <= 8",
    );
}

#[test]
fn criterion_03_partition_of_unity() {
    let start = Instant::now();
    for n in triples_with_total_at_most(8) {
        let b = box_spline(n).unwrap();
        let t = lower(0, 0);
        let mut sum = MonomialPoly::zero();
        for v in active_shifts_on_triangle(n, t).unwrap() {
            let source = t.translate(lp(-v.i, -v.j));
            sum = &sum + &from_bb(&b.piece(source).unwrap().translate(v));
        }
        assert_eq!(sum, MonomialPoly::one(), "{n:?}");
    }
    assert!(start.elapsed().as_secs() < 60);
    report("03", "active translates sum to 1 exactly for |n| <= 8");
}

#[test]
fn criterion_04_active_translate_counts() {
    let start = Instant::now();
    let single = MulticellDomain::new(1, [lower(0, 0)]);
    for n in triples_up_to(triple(4, 4, 4)) {
        let count = boxspline_core::spline_space::active_shifts(n, &single)
            .unwrap()
            .shifts
            .len();
        assert_eq!(count, n.phi(), "{n:?}");
    }
    assert_eq!(triple(2, 2, 2).phi(), 12);
    assert!(start.elapsed().as_secs() < 60);
    report("04", "|active(n, triangle)| = n1n2+n1n3+n2n3 up to (4,4,4)");
}

#[test]
fn criterion_05_local_independence_rank() {
    let start = Instant::now();
    for n in triples_up_to(triple(3, 3, 3)) {
        for t in [lower(0, 0), upper(0, 0)] {
            let l = local_basis_matrix(t, n).unwrap();
            assert_eq!(l.rank(), n.phi(), "{n:?} on {t:?}");
        }
    }
    assert!(start.elapsed().as_secs() < 120);
    report(
        "05",
        "local basis matrices have full rank phi(n) up to (3,3,3)",
    );
}

fn monomial_row(p: &MonomialPoly, degree: u32) -> Vec<Rational> {
    let mut row = Vec::new();
    for a in 0..=degree {
        for b in 0..=(degree - a) {
            row.push(p.coeff(a, b));
        }
    }
    row
}

#[test]
fn criterion_06_quadratic_space_equals_generator_span() {
    let start = Instant::now();
    let n = triple(2, 1, 1);
    let basis = space_vn_basis(n).unwrap();
    let generators = [
        poly(&[(1, 1, 2), (0, 2, -1)]),
        poly(&[(0, 1, 2), (1, 1, -2), (0, 2, 1)]),
        poly(&[(2, 0, 1), (1, 1, -2), (0, 2, 1)]),
        poly(&[
            (0, 0, 1),
            (1, 0, 2),
            (0, 1, -2),
            (2, 0, -2),
            (1, 1, 2),
            (0, 2, -1),
        ]),
        poly(&[(0, 0, 1), (1, 0, -2), (2, 0, 1)]),
    ];
    let a = boxspline_core::algebra::RationalMatrix::from_rows(
        basis.iter().map(|p| monomial_row(p, 2)).collect(),
    );
    let b = boxspline_core::algebra::RationalMatrix::from_rows(
        generators.iter().map(|p| monomial_row(p, 2)).collect(),
    );
    assert!(a.row_space_equal(&b).unwrap());
    assert!(start.elapsed().as_secs() < 1);
    report("06", "local quadratic space equals the five-generator span");
}

#[test]
fn criterion_07_refinement_identity() {
    let start = Instant::now();
    for n in [triple(1, 1, 1), triple(2, 1, 1), triple(2, 2, 2)] {
        let b = box_spline(n).unwrap();
        let lhs = dilate(&b);
        let mask = refinement_mask(n).unwrap();
        let mut rhs = PiecewisePoly::zero(n.degree(), 1);
        for (v, c) in &mask {
            rhs = rhs.add(&b.translate(*v).scale(c));
        }
        assert_eq!(lhs, rhs, "{n:?}");
    }
    assert!(start.elapsed().as_secs() < 60);
    report(
        "07",
        "two-scale identity holds exactly for the three pinned triples",
    );
}

#[test]
fn criterion_08_derivative_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, dir) in [
        (triple(2, 1, 1), EdgeType::E1),
        (triple(2, 2, 1), EdgeType::E1),
        (triple(2, 2, 1), EdgeType::E2),
    ] {
        let m = match dir {
            EdgeType::E1 => triple(n.n1 - 1, n.n2, n.n3),
            EdgeType::E2 => triple(n.n1, n.n2 - 1, n.n3),
            EdgeType::E3 => triple(n.n1, n.n2, n.n3 - 1),
        };
        let bn = box_spline(n).unwrap();
        let bm = box_spline(m).unwrap();
        for _ in 0..10 {
            let coeffs: BTreeMap<LatticePoint, Rational> = (0..4)
                .map(|_| {
                    (
                        lp(rng.gen_range(-2..3), rng.gen_range(-2..3)),
                        rat(rng.gen_range(-5..6)),
                    )
                })
                .collect();
            let dcoeffs = derivative_as_difference(n, dir, &coeffs).unwrap();

            let mut lhs = PiecewisePoly::zero(n.degree(), 1);
            for (v, a) in &coeffs {
                lhs = lhs.add(&bn.translate(*v).scale(a));
            }
            let e = boxspline_core::mesh::direction(dir);
            let mut lhs_deriv = PiecewisePoly::zero(n.degree() - 1, 1);
            for (&t, p) in &lhs.pieces {
                let dp = from_bb(p).deriv_dir(e.i, e.j);
                lhs_deriv.insert(t, to_bb(&dp, t, n.degree() - 1).unwrap());
            }
            let mut rhs = PiecewisePoly::zero(m.degree(), 1);
            for (v, a) in &dcoeffs {
                rhs = rhs.add(&bm.translate(*v).scale(a));
            }
            assert_eq!(lhs_deriv, rhs, "{n:?} along {dir:?}");
        }
    }
    assert!(start.elapsed().as_secs() < 60);
    report("08", "difference formula matches symbolic differentiation");
}

#[test]
fn criterion_09_edge_contact_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let configs = [
        (lower(0, 0), upper(0, -1)), // type 1
        (lower(0, 0), upper(1, 0)),  // type 2
        (lower(0, 0), upper(0, 0)),  // type 3
    ];
    for n in triples_up_to(triple(2, 2, 2)) {
        for &(t, t2) in &configs {
            let cfg = ContactConfig::new(n, t, t2).unwrap();
            let (shared, _) = shared_active(n, t, t2).unwrap();
            let mut seen_true = false;
            let mut seen_false = false;
            for case in 0..100 {
                let mut lam: BTreeMap<LatticePoint, Rational> = active_shifts_on_triangle(n, t)
                    .unwrap()
                    .into_iter()
                    .map(|v| (v, rat(rng.gen_range(-4..5))))
                    .collect();
                let mut lam2: BTreeMap<LatticePoint, Rational> = active_shifts_on_triangle(n, t2)
                    .unwrap()
                    .into_iter()
                    .map(|v| (v, rat(rng.gen_range(-4..5))))
                    .collect();
                if case % 2 == 0 {
                    // force agreement on the shared translates
                    for v in &shared {
                        let c = lam[v].clone();
                        lam2.insert(*v, c);
                    }
                }
                let f = lambda_combine(t, n, &lam).unwrap();
                let f2 = lambda_combine(t2, n, &lam2).unwrap();
                let (in_space, lambda_equal) = edge_contact_equivalence(&cfg, &f, &f2).unwrap();
                assert_eq!(in_space, lambda_equal, "{n:?} {t:?} {t2:?} case {case}");
                seen_true |= in_space;
                seen_false |= !in_space;
            }
            assert!(seen_true && seen_false, "both outcomes exercised for {n:?}");
        }
    }
    assert!(start.elapsed().as_secs() < 300);
    report(
        "09",
        "edge smoothness and shared-coefficient agreement coincide",
    );
}

#[test]
fn criterion_10_contact_sweep_smoke() {
    let start = Instant::now();
    let smoke = sweep(triple(2, 2, 2), ContactFilter::All).unwrap();
    assert!(smoke.all_pass);
    assert_eq!(smoke.cases.len(), 8 * 12);
    assert!(start.elapsed().as_secs() < 120);
    report("10", "smoke sweep to (2,2,2): 96 contact cases verified");
}

#[test]
#[ignore = "full sweep takes a few minutes; run with --ignored"]
fn criterion_10_full_vertex_sweep() {
    let start = Instant::now();
    let full = sweep(triple(4, 4, 4), ContactFilter::All).unwrap();
    assert!(full.all_pass);
    assert_eq!(full.cases.len(), 64 * 12);
    assert!(start.elapsed().as_secs() < 1800);
    report("10-full", "all 768 contact cases up to (4,4,4) verified");
}

fn lshape_block() -> MulticellDomain {
    // three unit squares: the square missing at the reentrant corner is
    // the one whose quadrant holds two star triangles, so the corner is
    // not over-concave
    MulticellDomain::new(
        1,
        [
            lower(0, 0),
            upper(0, 0),
            lower(1, 0),
            upper(1, 0),
            lower(0, 1),
            upper(0, 1),
        ],
    )
}

#[test]
fn criterion_11_completeness_on_admissible_domains() {
    let start = Instant::now();
    let block3: Vec<TriangleId> = (0..3)
        .flat_map(|i| (0..3).flat_map(move |j| [lower(i, j), upper(i, j)]))
        .collect();
    let domains = vec![
        MulticellDomain::new(1, [lower(0, 0)]),
        MulticellDomain::new(1, [lower(0, 0), upper(0, 0)]),
        star(lp(0, 0)),
        MulticellDomain::new(1, block3),
        lshape_block(),
    ];
    for domain in &domains {
        for n in triples_up_to(triple(2, 2, 2)) {
            let adm = is_admissible(domain, n).unwrap();
            assert!(adm.admissible, "{n:?} on {domain:?}: {:?}", adm.violations);
            let rep = completeness_check(domain, n).unwrap();
            assert!(
                rep.complete,
                "{n:?} on a domain of {} triangles: span {} vs space {}",
                domain.len(),
                rep.dim_span,
                rep.dim_space
            );
        }
    }
    assert!(start.elapsed().as_secs() < 600);
    report(
        "11",
        "span dimension equals space dimension on 5 admissible domains",
    );
}

#[test]
fn criterion_12_counterexamples() {
    let start = Instant::now();

    // membership without spannedness in a generic polynomial space
    let t = lower(-1, 0);
    let t2 = upper(0, 0);
    let domain = MulticellDomain::new(1, [t, t2]);
    let vbasis = vec![poly(&[(1, 0, 1)]), poly(&[(2, 0, 1)]), poly(&[(0, 2, 1)])];
    let gens = [
        (
            poly(&[(0, 2, 1), (2, 0, 3), (1, 0, 4)]),
            poly(&[(0, 2, 1), (1, 0, 1)]),
        ),
        (poly(&[(0, 2, 4)]), poly(&[(0, 2, 4)])),
        (poly(&[(2, 0, 1)]), MonomialPoly::zero()),
        (MonomialPoly::zero(), poly(&[(2, 0, 1)])),
    ];
    let make = |pair: &(MonomialPoly, MonomialPoly)| {
        let polys: BTreeMap<TriangleId, MonomialPoly> =
            [(t, pair.0.clone()), (t2, pair.1.clone())].into();
        SplineFunction::from_polys(domain.clone(), 2, &polys).unwrap()
    };
    let g = (
        &gens[0].0.scale(&rat(5)) + &gens[1].0,
        &gens[0].1 + &gens[1].1.scale(&rat(2)),
    );
    assert!(membership_edge_space(&make(&g), regularity(0, 0, 0), &vbasis).unwrap());
    let stack = |pair: &(MonomialPoly, MonomialPoly)| {
        let mut row = monomial_row(&pair.0, 2);
        row.extend(monomial_row(&pair.1, 2));
        row
    };
    let basis_matrix =
        boxspline_core::algebra::RationalMatrix::from_rows(gens.iter().map(|m| stack(m)).collect());
    assert_eq!(basis_matrix.transpose().solve(&stack(&g)).unwrap(), None);

    // the diagonal-pair function: continuous member of the local-space
    // pair, outside the translate span, excluded under d = (0,1,1)
    let n = triple(2, 1, 1);
    let ta = upper(0, 0);
    let tb = lower(0, 0);
    let pair_domain = MulticellDomain::new(1, [ta, tb]);
    let f = poly(&[(1, 0, 4), (0, 1, -4), (2, 0, -3), (1, 1, 6), (0, 2, -3)]);
    let polys: BTreeMap<TriangleId, MonomialPoly> =
        [(ta, MonomialPoly::zero()), (tb, f.clone())].into();
    let gsp = SplineFunction::from_polys(pair_domain, 2, &polys).unwrap();
    let vn = space_vn_basis(n).unwrap();
    assert!(membership_edge_space(&gsp, regularity(0, 0, 0), &vn).unwrap());
    assert!(!membership_edge_space(&gsp, regularity(0, 1, 1), &vn).unwrap());
    let cfg = ContactConfig::new(n, ta, tb).unwrap();
    let zero_bb = boxspline_core::bernstein::BBPoly::zero(ta, 2);
    let f_bb = to_bb(&f, tb, 2).unwrap();
    let (in_space, lambda_equal) = edge_contact_equivalence(&cfg, &zero_bb, &f_bb).unwrap();
    assert!(!in_space && !lambda_equal);

    assert!(start.elapsed().as_secs() < 60);
    report("12", "both counterexamples reproduce exactly");
}

#[test]
fn criterion_13_hierarchical_completeness() {
    let start = Instant::now();
    // two-level admissible hierarchy: coarse 2x2 block, fine refinement
    // with an L-shaped collar
    let m1 = MulticellDomain::new(
        1,
        (0..2).flat_map(|i| (0..2).flat_map(move |j| [lower(i, j), upper(i, j)])),
    );
    let mut fine: BTreeSet<TriangleId> = m1
        .triangles
        .iter()
        .flat_map(|&t| child_triangles(t))
        .collect();
    for i in 4..6 {
        for j in 0..2 {
            fine.insert(lower(i, j));
            fine.insert(upper(i, j));
        }
    }
    let h = build_hierarchy(vec![m1, MulticellDomain::new(2, fine)]).unwrap();

    for n in [triple(1, 1, 1), triple(2, 1, 1)] {
        for l in 1..=h.n_levels() {
            assert!(
                is_admissible(h.level_domain(l), n).unwrap().admissible,
                "{n:?} level {l}"
            );
        }
        let kraft = kraft_select(&h, n).unwrap();
        assert!(
            independence_check(&h, &kraft.members(), n).unwrap(),
            "{n:?}"
        );
        let rep = hierarchical_completeness(&h, n).unwrap();
        assert!(rep.admissible_levels);
        assert!(
            rep.equal,
            "{n:?}: kraft {} vs space {}",
            rep.dim_span_kraft, rep.dim_space
        );
        let members = sample_space_members(&h, n, 20).unwrap();
        assert_eq!(members.len(), 20);
        for (k, s) in members.iter().enumerate() {
            represent(&h, s, n).unwrap_or_else(|e| panic!("{n:?} member {k}: {e}"));
        }
    }
    assert!(start.elapsed().as_secs() < 600);
    report(
        "13",
        "Kraft basis spans the hierarchical space; 40 representations exact",
    );
}

#[test]
fn criterion_14_worked_membership_examples() {
    let start = Instant::now();
    let tris = [upper(0, 0), lower(0, 1), upper(1, 1), lower(1, 1)];
    let domain = MulticellDomain::new(1, tris);
    let d = regularity(0, 1, 0);
    let p2 = vec![
        poly(&[(0, 0, 1)]),
        poly(&[(1, 0, 1)]),
        poly(&[(0, 1, 1)]),
        poly(&[(2, 0, 1)]),
        poly(&[(1, 1, 1)]),
        poly(&[(0, 2, 1)]),
    ];
    let build = |pieces: [MonomialPoly; 4]| {
        let polys: BTreeMap<TriangleId, MonomialPoly> = tris.iter().copied().zip(pieces).collect();
        SplineFunction::from_polys(domain.clone(), 2, &polys).unwrap()
    };
    let f = build([
        poly(&[(2, 0, 1)]),
        poly(&[
            (2, 0, 1),
            (0, 2, 1),
            (0, 0, 1),
            (1, 1, -2),
            (1, 0, 2),
            (0, 1, -2),
        ]),
        poly(&[(1, 1, -2), (0, 2, 1), (1, 0, 4), (0, 1, -2)]),
        poly(&[(1, 1, 2), (2, 0, -2), (0, 1, -2), (1, 0, 4), (0, 2, -1)]),
    ]);
    assert!(membership_edge_space(&f, d, &p2).unwrap());
    assert!(membership_strongly_regular(&f, d, &p2).unwrap());

    let g = build([
        MonomialPoly::zero(),
        poly(&[(0, 1, 1), (0, 0, -1)]),
        poly(&[(2, 0, 1), (1, 0, -2), (0, 1, 1)]),
        poly(&[(2, 0, 1), (0, 1, -1)]),
    ]);
    assert!(membership_edge_space(&g, d, &p2).unwrap());
    // This criterion expects exclusion here. Under the e3 = e1 + e2
    // derivative convention, which the contact sweep (criterion 10)
    // validates and the edge characterization requires, the function
    // satisfies every vertex condition, so this assertion fails; it is
    // kept as stated rather than weakened.
    assert!(
        !membership_strongly_regular(&g, d, &p2).unwrap(),
        "the piecewise function is strongly regular under the e3-direction \
         convention; excluding it would require differentiating across the \
         diagonal instead, which contradicts the verified contact sweep \
         (criterion 10)"
    );

    assert!(start.elapsed().as_secs() < 1);
    report("14", "fan membership examples verified");
}
