//! Exact construction of type-I box splines as piecewise Bernstein-Bézier
//! polynomials: recursive directional convolution from the Courant hat,
//! supports, translates, the derivative coefficient identity, and the
//! dyadic refinement mask.

use crate::algebra::{rat, ratio, Rational};
use crate::bernstein::{to_bb, BBPoly, MonomialPoly};
use crate::mesh::{
    direction, lower, lp, star_triangles, triangle_vertices, upper, EdgeType, LatticePoint,
    MulticellDomain, Orient, TriangleId,
};
use num::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoxSplineError {
    #[error("convolution multiplicities must all be at least 1, got ({0}, {1}, {2})")]
    InvalidTriple(u32, u32, u32),
}

/// Convolution multiplicities `(n1, n2, n3)` along the three grid
/// directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectionTriple {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

pub const fn triple(n1: u32, n2: u32, n3: u32) -> DirectionTriple {
    DirectionTriple { n1, n2, n3 }
}

impl DirectionTriple {
    pub fn validate(self) -> Result<Self, BoxSplineError> {
        if self.n1 < 1 || self.n2 < 1 || self.n3 < 1 {
            return Err(BoxSplineError::InvalidTriple(self.n1, self.n2, self.n3));
        }
        Ok(self)
    }

    pub fn total(self) -> u32 {
        self.n1 + self.n2 + self.n3
    }

    /// Polynomial degree of every piece: `|n| - 2`.
    pub fn degree(self) -> u32 {
        self.total() - 2
    }

    /// Smoothness orders across the three edge types:
    /// `(n2+n3-2, n1+n3-2, n1+n2-2)`.
    pub fn smoothness(self) -> crate::bernstein::RegularityVector {
        crate::bernstein::regularity(
            (self.n2 + self.n3) as i32 - 2,
            (self.n1 + self.n3) as i32 - 2,
            (self.n1 + self.n2) as i32 - 2,
        )
    }

    /// Global smoothness order: the minimum of the per-type orders.
    pub fn global_smoothness(self) -> i32 {
        let d = self.smoothness();
        d.d1.min(d.d2).min(d.d3)
    }

    /// Number of translates active on any one triangle:
    /// `n1 n2 + n1 n3 + n2 n3`.
    pub fn phi(self) -> usize {
        (self.n1 * self.n2 + self.n1 * self.n3 + self.n2 * self.n3) as usize
    }

    pub fn multiplicity(self, etype: EdgeType) -> u32 {
        match etype {
            EdgeType::E1 => self.n1,
            EdgeType::E2 => self.n2,
            EdgeType::E3 => self.n3,
        }
    }
}

/// A finitely supported piecewise polynomial on the grid at some level, one
/// BB patch per supported triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    pub degree: u32,
    pub level: u32,
    pub pieces: BTreeMap<TriangleId, BBPoly>,
}

impl Serialize for PiecewisePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            degree: u32,
            level: u32,
            pieces: Vec<&'a BBPoly>,
        }
        Repr {
            degree: self.degree,
            level: self.level,
            pieces: self.pieces.values().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewisePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            degree: u32,
            level: u32,
            pieces: Vec<BBPoly>,
        }
        let r = Repr::deserialize(d)?;
        let mut out = PiecewisePoly::zero(r.degree, r.level);
        for p in r.pieces {
            if p.degree != r.degree {
                return Err(serde::de::Error::custom("piece degree mismatch"));
            }
            out.insert(p.triangle, p);
        }
        Ok(out)
    }
}

impl PiecewisePoly {
    pub fn zero(degree: u32, level: u32) -> Self {
        PiecewisePoly {
            degree,
            level,
            pieces: BTreeMap::new(),
        }
    }

    /// Inserts a piece, dropping exact zeros.
    pub fn insert(&mut self, t: TriangleId, piece: BBPoly) {
        debug_assert_eq!(piece.degree, self.degree);
        debug_assert_eq!(piece.triangle, t);
        if !piece.is_zero() {
            self.pieces.insert(t, piece);
        }
    }

    pub fn support(&self) -> BTreeSet<TriangleId> {
        self.pieces.keys().copied().collect()
    }

    pub fn piece(&self, t: TriangleId) -> Option<&BBPoly> {
        self.pieces.get(&t)
    }

    /// Monomial form of the piece on `t` (zero when unsupported).
    pub fn piece_poly(&self, t: TriangleId) -> MonomialPoly {
        match self.pieces.get(&t) {
            Some(p) => crate::bernstein::from_bb_at_level(p, self.level),
            None => MonomialPoly::zero(),
        }
    }

    pub fn translate(&self, v: LatticePoint) -> PiecewisePoly {
        let mut out = PiecewisePoly::zero(self.degree, self.level);
        for (t, p) in &self.pieces {
            out.insert(t.translate(v), p.translate(v));
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> PiecewisePoly {
        let mut out = PiecewisePoly::zero(self.degree, self.level);
        if factor.is_zero() {
            return out;
        }
        for (t, p) in &self.pieces {
            out.insert(*t, p.scale(factor));
        }
        out
    }

    pub fn add(&self, other: &PiecewisePoly) -> PiecewisePoly {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.level, other.level);
        let mut out = PiecewisePoly::zero(self.degree, self.level);
        let keys: BTreeSet<TriangleId> = self
            .pieces
            .keys()
            .chain(other.pieces.keys())
            .copied()
            .collect();
        for t in keys {
            let mut acc = BBPoly::zero(t, self.degree);
            if let Some(p) = self.pieces.get(&t) {
                acc.add_assign(p);
            }
            if let Some(p) = other.pieces.get(&t) {
                acc.add_assign(p);
            }
            out.insert(t, acc);
        }
        out
    }

    pub fn sub(&self, other: &PiecewisePoly) -> PiecewisePoly {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Exact evaluation. On shared boundaries any incident supported piece
    /// is used (pieces agree there for continuous functions); away from the
    /// support the value is zero.
    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let h = crate::bernstein::level_scale(self.level);
        let xs = x / &h;
        let ys = y / &h;
        for t in containing_triangles(&xs, &ys) {
            if let Some(p) = self.pieces.get(&t) {
                return crate::bernstein::eval_at_level(p, x, y, self.level);
            }
        }
        Rational::zero()
    }
}

/// All grid cells (in level-1 lattice coordinates) whose closure contains
/// the point.
pub fn containing_triangles(x: &Rational, y: &Rational) -> Vec<TriangleId> {
    let fx = x.floor();
    let fy = y.floor();
    let i = fx.to_integer().to_i64().expect("coordinate out of range");
    let j = fy.to_integer().to_i64().expect("coordinate out of range");
    let on_vertical = (x - fx).is_zero();
    let on_horizontal = (y - fy).is_zero();
    if on_vertical && on_horizontal {
        return star_triangles(lp(i, j)).to_vec();
    }
    let diag = x - y;
    let fdiag = diag.floor();
    let on_diagonal = (&diag - &fdiag).is_zero();
    let rel = &diag - rat(i - j); // (x - i) - (y - j)
    if on_vertical {
        // interior of a vertical edge x = i
        return vec![lower(i - 1, j), upper(i, j)];
    }
    if on_horizontal {
        // interior of a horizontal edge y = j
        return vec![lower(i, j), upper(i, j - 1)];
    }
    if on_diagonal {
        // interior of a diagonal edge
        let k = fdiag.to_integer().to_i64().unwrap();
        // the edge from (k + j, j) with j = floor(y)
        return vec![lower(k + j, j), upper(k + j, j)];
    }
    if rel.is_positive() {
        vec![lower(i, j)]
    } else {
        vec![upper(i, j)]
    }
}

/// The piecewise-linear Courant hat: value 1 at `(1, 1)`, zero on the
/// boundary of the star of `(1, 1)`.
pub fn courant_hat() -> PiecewisePoly {
    let center = lp(1, 1);
    let mut out = PiecewisePoly::zero(1, 1);
    for t in star_triangles(center) {
        let m = triangle_vertices(t)
            .iter()
            .position(|&v| v == center)
            .expect("star triangle contains its center");
        let mut piece = BBPoly::zero(t, 1);
        let idx = [(1, 0, 0), (0, 1, 0), (0, 0, 1)][m];
        piece.set_coeff(idx.0, idx.1, idx.2, Rational::one());
        out.insert(t, piece);
    }
    out
}

/// Expands `p(x - t*ex, y - t*ey)` as a polynomial in `t` with bivariate
/// polynomial coefficients.
fn expand_in_t(p: &MonomialPoly, ex: i64, ey: i64) -> Vec<MonomialPoly> {
    let deg = p.total_degree() as usize;
    let mut out = vec![MonomialPoly::zero(); deg + 1];
    for (&(a, b), c) in p.terms() {
        // (x - t ex)^a = sum_m C(a,m) x^(a-m) (-ex)^m t^m
        let xa = binomial_expansion(a, ex);
        let yb = binomial_expansion(b, ey);
        for (m1, cx) in xa.iter().enumerate() {
            if cx.is_zero() {
                continue;
            }
            for (m2, cy) in yb.iter().enumerate() {
                if cy.is_zero() {
                    continue;
                }
                let coeff = c * cx * cy;
                out[m1 + m2].add_term(a - m1 as u32, b - m2 as u32, coeff);
            }
        }
    }
    out
}

/// Coefficients of `(x - t*e)^a` as polynomials in `t`: entry `m` is the
/// scalar multiplying `x^(a-m) t^m`.
fn binomial_expansion(a: u32, e: i64) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a as usize + 1);
    let mut binom = Rational::one();
    let mut power = Rational::one();
    for m in 0..=a {
        out.push(&binom * &power);
        power *= rat(-e);
        binom = binom * rat((a - m) as i64) / rat((m + 1) as i64);
    }
    out
}

/// Affine function of `(x, y)` with integer coefficients, used for
/// convolution segment bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct AffineBound {
    cx: i64,
    cy: i64,
    c: i64,
}

impl AffineBound {
    fn constant(c: i64) -> Self {
        AffineBound { cx: 0, cy: 0, c }
    }

    fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        x * rat(self.cx) + y * rat(self.cy) + rat(self.c)
    }

    fn as_poly(&self) -> MonomialPoly {
        MonomialPoly::affine(rat(self.c), rat(self.cx), rat(self.cy))
    }
}

/// Symbolic integral of piece `p` over the parameter segment, i.e.
/// `int_{lo}^{hi} p(x - t ex, y - t ey) dt` with affine bounds.
fn integrate_segment(
    p: &MonomialPoly,
    ex: i64,
    ey: i64,
    lo: &AffineBound,
    hi: &AffineBound,
) -> MonomialPoly {
    let tcoeffs = expand_in_t(p, ex, ey);
    let lo_poly = lo.as_poly();
    let hi_poly = hi.as_poly();
    let mut lo_pow = MonomialPoly::one();
    let mut hi_pow = MonomialPoly::one();
    let mut out = MonomialPoly::zero();
    for (m, coeff) in tcoeffs.iter().enumerate() {
        lo_pow = &lo_pow * &lo_poly;
        hi_pow = &hi_pow * &hi_poly;
        if coeff.is_zero() {
            continue;
        }
        let antiderivative = &hi_pow - &lo_pow;
        let scaled = antiderivative.scale(&ratio(1, (m + 1) as i64));
        out = &out + &(coeff * &scaled);
    }
    out
}

/// Convolution step on monomial pieces; level-1 lattice geometry (the
/// combinatorics is the same at every level).
fn convolve_monomial(
    sources: &BTreeMap<TriangleId, MonomialPoly>,
    dir: EdgeType,
) -> BTreeMap<TriangleId, MonomialPoly> {
    let e = direction(dir);
    let mut out = BTreeMap::new();

    // Candidate targets: the support swept along the direction.
    let mut candidates: BTreeSet<TriangleId> = BTreeSet::new();
    for &t in sources.keys() {
        for di in 0..=e.i {
            for dj in 0..=e.j {
                for o in [Orient::Lower, Orient::Upper] {
                    candidates.insert(crate::mesh::tri(t.i + di, t.j + dj, o));
                }
            }
        }
    }

    for tau in candidates {
        // Sample at the centroid; the segment pattern is constant over the
        // open target triangle.
        let (sx, sy) = centroid(tau);
        let mut bounds: Vec<(Rational, AffineBound)> = Vec::new();
        bounds.push((Rational::zero(), AffineBound::constant(0)));
        for bp in breakpoints(dir, &sx, &sy) {
            let val = bp.eval(&sx, &sy);
            if val > Rational::zero() && val < Rational::one() {
                bounds.push((val, bp));
            }
        }
        bounds.push((Rational::one(), AffineBound::constant(1)));
        bounds.sort_by(|a, b| a.0.cmp(&b.0));

        let mut acc = MonomialPoly::zero();
        for window in bounds.windows(2) {
            let (lo_val, lo) = &window[0];
            let (hi_val, hi) = &window[1];
            let t_mid = (lo_val + hi_val) / rat(2);
            let qx = &sx - &t_mid * rat(e.i);
            let qy = &sy - &t_mid * rat(e.j);
            let cell = containing_triangles(&qx, &qy)[0];
            if let Some(p) = sources.get(&cell) {
                acc = &acc + &integrate_segment(p, e.i, e.j, lo, hi);
            }
        }
        if !acc.is_zero() {
            out.insert(tau, acc);
        }
    }
    out
}

fn monomial_pieces(f: &PiecewisePoly) -> BTreeMap<TriangleId, MonomialPoly> {
    f.pieces
        .iter()
        .map(|(&t, p)| (t, crate::bernstein::from_bb_at_level(p, 1)))
        .collect()
}

fn piecewise_from_monomials(
    pieces: BTreeMap<TriangleId, MonomialPoly>,
    degree: u32,
    level: u32,
) -> PiecewisePoly {
    let mut out = PiecewisePoly::zero(degree, level);
    for (tau, p) in pieces {
        let piece = to_bb(&p, tau, degree).expect("degree bound by construction");
        out.insert(tau, piece);
    }
    out
}

/// Convolves a piecewise polynomial with the unit segment along grid
/// direction `dir`: `g(x) = int_0^1 f(x - t e) dt`. Exact; the result is
/// piecewise polynomial on the same grid with degree one higher.
pub fn convolve_direction(f: &PiecewisePoly, dir: EdgeType) -> PiecewisePoly {
    if f.pieces.is_empty() {
        return PiecewisePoly::zero(f.degree + 1, f.level);
    }
    let next = convolve_monomial(&monomial_pieces(f), dir);
    piecewise_from_monomials(next, f.degree + 1, f.level)
}

fn centroid(t: TriangleId) -> (Rational, Rational) {
    let verts = triangle_vertices(t);
    let sum_i: i64 = verts.iter().map(|v| v.i).sum();
    let sum_j: i64 = verts.iter().map(|v| v.j).sum();
    (ratio(sum_i, 3), ratio(sum_j, 3))
}

/// Candidate parameter values where `(x - t ex, y - t ey)` crosses a grid
/// line, as affine functions of `(x, y)`; evaluated at the sample point to
/// select those inside `(0, 1)`.
fn breakpoints(dir: EdgeType, sx: &Rational, sy: &Rational) -> Vec<AffineBound> {
    let mut out = Vec::new();
    let floor_i = |r: &Rational| r.floor().to_integer().to_i64().unwrap();
    match dir {
        EdgeType::E1 => {
            // vertical line x = c: t = x - c
            let c = floor_i(sx);
            out.push(AffineBound {
                cx: 1,
                cy: 0,
                c: -c,
            });
            // diagonal x - y = c: t = x - y - c
            let d = floor_i(&(sx - sy));
            out.push(AffineBound {
                cx: 1,
                cy: -1,
                c: -d,
            });
        }
        EdgeType::E2 => {
            // horizontal line y = c: t = y - c
            let c = floor_i(sy);
            out.push(AffineBound {
                cx: 0,
                cy: 1,
                c: -c,
            });
            // diagonal x - y = c: t = -(x - y - c)
            let d = floor_i(&(sx - sy)) + 1;
            out.push(AffineBound {
                cx: -1,
                cy: 1,
                c: d,
            });
        }
        EdgeType::E3 => {
            // vertical x = c: t = x - c; horizontal y = c: t = y - c
            let c = floor_i(sx);
            out.push(AffineBound {
                cx: 1,
                cy: 0,
                c: -c,
            });
            let d = floor_i(sy);
            out.push(AffineBound {
                cx: 0,
                cy: 1,
                c: -d,
            });
        }
    }
    out
}

static CACHE: Lazy<Mutex<HashMap<DirectionTriple, Arc<PiecewisePoly>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The box spline for the given multiplicities: the Courant hat convolved
/// `n_i - 1` times along each direction `e_i`, in the canonical order
/// `e1, e2, e3`. Memoized per triple; when `BOXSPLINE_CACHE_DIR` is set,
/// constructions are also persisted there as JSON.
pub fn box_spline(n: DirectionTriple) -> Result<Arc<PiecewisePoly>, BoxSplineError> {
    n.validate()?;
    if let Some(hit) = CACHE.lock().unwrap().get(&n).cloned() {
        return Ok(hit);
    }
    if let Some(loaded) = load_cached(n) {
        let arc = Arc::new(loaded);
        CACHE.lock().unwrap().insert(n, arc.clone());
        return Ok(arc);
    }
    // run the whole recursion on monomial pieces; convert once at the end
    let mut pieces = monomial_pieces(&courant_hat());
    for (dir, count) in [
        (EdgeType::E1, n.n1),
        (EdgeType::E2, n.n2),
        (EdgeType::E3, n.n3),
    ] {
        for _ in 1..count {
            pieces = convolve_monomial(&pieces, dir);
        }
    }
    let f = piecewise_from_monomials(pieces, n.degree(), 1);
    store_cached(n, &f);
    let arc = Arc::new(f);
    CACHE.lock().unwrap().insert(n, arc.clone());
    Ok(arc)
}

fn cache_path(n: DirectionTriple) -> Option<std::path::PathBuf> {
    let dir = std::env::var_os("BOXSPLINE_CACHE_DIR")?;
    Some(std::path::Path::new(&dir).join(format!("bn_{}_{}_{}.json", n.n1, n.n2, n.n3)))
}

fn load_cached(n: DirectionTriple) -> Option<PiecewisePoly> {
    let path = cache_path(n)?;
    let text = std::fs::read_to_string(path).ok()?;
    let parsed: PiecewisePoly = serde_json::from_str(&text).ok()?;
    (parsed.degree == n.degree()).then_some(parsed)
}

fn store_cached(n: DirectionTriple, f: &PiecewisePoly) {
    let Some(path) = cache_path(n) else {
        return;
    };
    if let Some(parent) = path.parent() {
        let _ = std::fs::create_dir_all(parent);
    }
    if let Ok(text) = serde_json::to_string(f) {
        let tmp = path.with_extension("json.tmp");
        if std::fs::write(&tmp, text).is_ok() {
            let _ = std::fs::rename(tmp, path);
        }
    }
}

/// Triangles on which the box spline is nonzero.
pub fn support(n: DirectionTriple) -> Result<BTreeSet<TriangleId>, BoxSplineError> {
    Ok(box_spline(n)?.support())
}

/// Coefficient map of `D_{e_i} (sum_v a_v B_n(. - v))` expressed in
/// translates of `B_m`, `m = n - e_i`: the backward difference
/// `a_v - a_{v - e_i}`.
pub fn derivative_as_difference(
    n: DirectionTriple,
    dir: EdgeType,
    coeffs: &BTreeMap<LatticePoint, Rational>,
) -> Result<BTreeMap<LatticePoint, Rational>, BoxSplineError> {
    if n.multiplicity(dir) < 2 {
        return Err(BoxSplineError::InvalidTriple(n.n1, n.n2, n.n3));
    }
    let e = direction(dir);
    let mut out = BTreeMap::new();
    let shifts: BTreeSet<LatticePoint> = coeffs.keys().flat_map(|&v| [v, v.add(e)]).collect();
    for v in shifts {
        let a = coeffs.get(&v).cloned().unwrap_or_else(Rational::zero);
        let b = coeffs
            .get(&v.sub(e))
            .cloned()
            .unwrap_or_else(Rational::zero);
        let d = a - b;
        if !d.is_zero() {
            out.insert(v, d);
        }
    }
    Ok(out)
}

/// The finite mask `{c_v}` with `B_n(./2) = sum_v c_v B_n(. - v)`:
/// coefficients of `2^(2-|n|) (1+z1)^n1 (1+z2)^n2 (1+z1 z2)^n3`.
pub fn refinement_mask(
    n: DirectionTriple,
) -> Result<BTreeMap<LatticePoint, Rational>, BoxSplineError> {
    n.validate()?;
    let mut poly: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    poly.insert((0, 0), Rational::one());
    let factors = [((1u32, 0u32), n.n1), ((0, 1), n.n2), ((1, 1), n.n3)];
    for ((za, zb), count) in factors {
        for _ in 0..count {
            let mut next: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
            for (&(a, b), c) in &poly {
                *next.entry((a, b)).or_insert_with(Rational::zero) += c;
                *next.entry((a + za, b + zb)).or_insert_with(Rational::zero) += c;
            }
            poly = next;
        }
    }
    let scale = ratio(4, 1) / Rational::from_integer(num::BigInt::from(2).pow(n.total()));
    Ok(poly
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((a, b), c)| (lp(a as i64, b as i64), c * &scale))
        .collect())
}

/// The dyadic dilation `g(x) = f(x / 2)` as a piecewise polynomial on the
/// same grid.
pub fn dilate(f: &PiecewisePoly) -> PiecewisePoly {
    let mut out = PiecewisePoly::zero(f.degree, f.level);
    let half = ratio(1, 2);
    for (&sigma, piece) in &f.pieces {
        let p = crate::bernstein::from_bb_at_level(piece, 1);
        let squeezed = p.substitute_affine(
            &[Rational::zero(), half.clone(), Rational::zero()],
            &[Rational::zero(), Rational::zero(), half.clone()],
        );
        for tau in doubled_cells(sigma) {
            let bb = to_bb(&squeezed, tau, f.degree).expect("degree preserved");
            out.insert(tau, bb);
        }
    }
    out
}

/// The four unit cells tiling the doubled triangle `2 * closure(t)`.
pub fn doubled_cells(t: TriangleId) -> [TriangleId; 4] {
    crate::mesh::child_triangles(t)
}

/// Multicell domain covering the support of `B_n`.
pub fn support_domain(n: DirectionTriple) -> Result<MulticellDomain, BoxSplineError> {
    Ok(MulticellDomain::new(1, support(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::{eval as bb_eval, from_bb};

    #[test]
    fn courant_hat_values() {
        let hat = courant_hat();
        assert_eq!(hat.eval(&rat(1), &rat(1)), rat(1));
        for (i, j) in [(0, 0), (0, 1), (1, 2), (2, 1), (2, 2)] {
            assert_eq!(hat.eval(&rat(i), &rat(j)), rat(0), "hat at ({i},{j})");
        }
        assert_eq!(hat.eval(&ratio(1, 2), &ratio(1, 2)), ratio(1, 2));
        assert_eq!(hat.support().len(), 6);
    }

    #[test]
    fn convolving_zero_gives_zero() {
        let z = PiecewisePoly::zero(1, 1);
        for dir in EdgeType::all() {
            assert!(convolve_direction(&z, dir).pieces.is_empty());
        }
    }

    #[test]
    fn box_spline_211_piece_matches_hand_integration() {
        // On Lower(0,0) the first e1-convolution of the hat evaluates to
        // (x - y) y + y^2 / 2.
        let b = box_spline(triple(2, 1, 1)).unwrap();
        assert_eq!(b.degree, 2);
        let mut direct = MonomialPoly::zero();
        direct.add_term(1, 1, rat(1));
        direct.add_term(0, 2, ratio(-1, 2));
        let piece = b.piece(lower(0, 0)).expect("supported");
        assert_eq!(from_bb(piece), direct);
    }

    #[test]
    fn box_spline_support_sizes() {
        assert_eq!(support(triple(1, 1, 1)).unwrap().len(), 6);
        // area of the support zonotope is phi(n); two triangles per unit area
        for n in [triple(2, 1, 1), triple(2, 2, 1), triple(2, 2, 2)] {
            assert_eq!(support(n).unwrap().len(), 2 * n.phi(), "{n:?}");
        }
    }

    #[test]
    fn box_spline_degree_and_rejection() {
        assert_eq!(box_spline(triple(2, 1, 1)).unwrap().degree, 2);
        assert!(box_spline(triple(0, 1, 1)).is_err());
    }

    #[test]
    fn convolution_order_does_not_matter() {
        // all six direction orders build the same function
        let orders = [
            [EdgeType::E1, EdgeType::E2, EdgeType::E3],
            [EdgeType::E1, EdgeType::E3, EdgeType::E2],
            [EdgeType::E2, EdgeType::E1, EdgeType::E3],
            [EdgeType::E2, EdgeType::E3, EdgeType::E1],
            [EdgeType::E3, EdgeType::E1, EdgeType::E2],
            [EdgeType::E3, EdgeType::E2, EdgeType::E1],
        ];
        let builds: Vec<PiecewisePoly> = orders
            .iter()
            .map(|order| {
                let mut f = courant_hat();
                for &dir in order {
                    f = convolve_direction(&f, dir);
                }
                f
            })
            .collect();
        for b in &builds[1..] {
            assert_eq!(builds[0], *b);
        }
        assert_eq!(builds[0], *box_spline(triple(2, 2, 2)).unwrap());
    }

    #[test]
    fn translate_identities() {
        let b = box_spline(triple(2, 1, 1)).unwrap();
        assert_eq!(b.translate(lp(0, 0)), *b);
        let u = lp(2, -1);
        let v = lp(-1, 3);
        assert_eq!(b.translate(u).translate(v), b.translate(u.add(v)));
        // eval(translate(f, v), x + v) = eval(f, x)
        let x = ratio(5, 7);
        let y = ratio(2, 7);
        let shifted = b.translate(u);
        assert_eq!(
            shifted.eval(&(&x + rat(u.i)), &(&y + rat(u.j))),
            b.eval(&x, &y)
        );
    }

    #[test]
    fn derivative_difference_examples() {
        let n = triple(2, 2, 1);
        // constant coefficients telescope to zero inside the region
        let mut coeffs = BTreeMap::new();
        for i in 0..3 {
            coeffs.insert(lp(i, 0), rat(7));
        }
        let d = derivative_as_difference(n, EdgeType::E1, &coeffs).unwrap();
        assert_eq!(d.get(&lp(1, 0)), None);
        assert_eq!(d.get(&lp(2, 0)), None);
        assert_eq!(d.get(&lp(0, 0)), Some(&rat(7)));
        assert_eq!(d.get(&lp(3, 0)), Some(&rat(-7)));

        // single impulse becomes a two-point difference
        let single: BTreeMap<_, _> = [(lp(0, 0), rat(1))].into();
        let d = derivative_as_difference(n, EdgeType::E2, &single).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.get(&lp(0, 0)), Some(&rat(1)));
        assert_eq!(d.get(&lp(0, 1)), Some(&rat(-1)));

        assert!(derivative_as_difference(triple(2, 1, 1), EdgeType::E2, &single).is_err());
    }

    #[test]
    fn derivative_identity_symbolic() {
        // D_{e1} sum a_v B_n(.-v) = sum (a_v - a_{v-e1}) B_m(.-v), m = n - e1
        let n = triple(2, 2, 1);
        let m = triple(1, 2, 1);
        let bn = box_spline(n).unwrap();
        let bm = box_spline(m).unwrap();
        let coeffs: BTreeMap<LatticePoint, Rational> =
            [(lp(0, 0), rat(3)), (lp(1, 0), rat(-2)), (lp(0, 1), rat(5))].into();
        let dcoeffs = derivative_as_difference(n, EdgeType::E1, &coeffs).unwrap();

        let mut lhs = PiecewisePoly::zero(n.degree(), 1);
        for (v, a) in &coeffs {
            lhs = lhs.add(&bn.translate(*v).scale(a));
        }
        // differentiate each piece along e1
        let mut lhs_deriv = PiecewisePoly::zero(n.degree() - 1, 1);
        for (&t, p) in &lhs.pieces {
            let dp = from_bb(p).deriv_dir(1, 0);
            let bb = to_bb(&dp, t, n.degree() - 1).unwrap();
            lhs_deriv.insert(t, bb);
        }

        let mut rhs = PiecewisePoly::zero(m.degree(), 1);
        for (v, a) in &dcoeffs {
            rhs = rhs.add(&bm.translate(*v).scale(a));
        }
        assert_eq!(lhs_deriv, rhs);
    }

    #[test]
    fn refinement_mask_mass_and_courant_case() {
        for n in [triple(1, 1, 1), triple(2, 1, 1), triple(3, 2, 1)] {
            let mask = refinement_mask(n).unwrap();
            let total: Rational = mask.values().cloned().sum();
            assert_eq!(total, rat(4), "mask mass for {n:?}");
        }
        let mask = refinement_mask(triple(1, 1, 1)).unwrap();
        // (1+z1)(1+z2)(1+z1z2)/2: seven lattice points, center weight 1
        assert_eq!(mask.len(), 7);
        assert_eq!(mask.get(&lp(1, 1)), Some(&rat(1)));
        assert_eq!(mask.get(&lp(0, 0)), Some(&ratio(1, 2)));
        assert_eq!(mask.get(&lp(2, 2)), Some(&ratio(1, 2)));
    }

    #[test]
    fn refinement_identity_for_courant_hat() {
        let n = triple(1, 1, 1);
        let b = box_spline(n).unwrap();
        let lhs = dilate(&b);
        let mask = refinement_mask(n).unwrap();
        let mut rhs = PiecewisePoly::zero(n.degree(), 1);
        for (v, c) in &mask {
            rhs = rhs.add(&b.translate(*v).scale(c));
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn doubled_cells_tile_the_parent() {
        for t in [lower(0, 0), upper(0, 0), lower(-2, 1)] {
            let cells = doubled_cells(t);
            // all four cells lie inside the doubled triangle: check the
            // centroids against the parent's barycentric forms, scaled
            let [b0, b1, b2] = crate::bernstein::barycentric_forms(t, 1);
            for c in cells {
                let (cx, cy) = super::centroid(c);
                let half = ratio(1, 2);
                let px = &cx * &half;
                let py = &cy * &half;
                for form in [&b0, &b1, &b2] {
                    let val = form.eval(&px, &py);
                    assert!(val >= rat(0) && val <= rat(1), "{c:?} outside {t:?}");
                }
            }
        }
    }

    #[test]
    fn piecewise_json_roundtrip() {
        let b = box_spline(triple(2, 1, 1)).unwrap();
        let text = serde_json::to_string(&*b).unwrap();
        let back: PiecewisePoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, *b);
    }

    #[test]
    fn eval_on_boundaries_picks_consistent_pieces() {
        let b = box_spline(triple(2, 2, 2)).unwrap();
        // points on grid lines inside the support
        let pts = [
            (rat(1), rat(1)),
            (ratio(3, 2), ratio(3, 2)),
            (rat(2), ratio(3, 2)),
        ];
        for (x, y) in pts {
            let v = b.eval(&x, &y);
            for t in containing_triangles(&x, &y) {
                if let Some(p) = b.piece(t) {
                    assert_eq!(bb_eval(p, &x, &y), v);
                }
            }
        }
    }
}
