//! Bernstein-Bézier calculus on grid triangles: exact monomial/BB
//! conversion, mixed directional derivatives, smoothness constraint
//! matrices across edges and at vertices, and edge-power divisibility.
//!
//! BB coefficients are attached to the canonical counterclockwise vertex
//! order of a `TriangleId` and are invariant under lattice translation and
//! dyadic scaling; geometry enters only through the conversion routines,
//! which take the grid level (level `l` has mesh size `1 / 2^(l-1)`).

use crate::algebra::{rat, Rational, RationalMatrix, RationalRepr};
use crate::mesh::{
    shared_edge, shared_vertices, triangle_vertices, EdgeId, EdgeType, LatticePoint, TriangleId,
};
use num::{BigInt, One, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BernsteinError {
    #[error("polynomial of degree {actual} does not fit in BB degree {requested}")]
    DegreeTooLow { requested: u32, actual: u32 },
    #[error("triangles are not adjacent across the given edge")]
    NotAdjacent,
    #[error("triangles do not meet at exactly one vertex")]
    NotVertexContact,
    #[error("edge does not belong to the triangle")]
    EdgeNotOfTriangle,
}

/// Bivariate polynomial in sparse monomial form, keyed by `(a, b)` for
/// `x^a y^b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonomialPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl MonomialPoly {
    pub fn zero() -> Self {
        MonomialPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = MonomialPoly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        let mut p = MonomialPoly::zero();
        p.add_term(1, 0, Rational::one());
        p
    }

    pub fn y() -> Self {
        let mut p = MonomialPoly::zero();
        p.add_term(0, 1, Rational::one());
        p
    }

    /// The affine polynomial `c + cx*x + cy*y`.
    pub fn affine(c: Rational, cx: Rational, cy: Rational) -> Self {
        let mut p = MonomialPoly::zero();
        p.add_term(0, 0, c);
        p.add_term(1, 0, cx);
        p.add_term(0, 1, cy);
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((a, b)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> Rational {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return MonomialPoly::zero();
        }
        MonomialPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * factor)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MonomialPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut xpow = vec![Rational::one()];
        let mut ypow = vec![Rational::one()];
        let mut acc = Rational::zero();
        for (&(a, b), c) in &self.terms {
            while xpow.len() <= a as usize {
                let next = xpow.last().unwrap() * x;
                xpow.push(next);
            }
            while ypow.len() <= b as usize {
                let next = ypow.last().unwrap() * y;
                ypow.push(next);
            }
            acc += c * &xpow[a as usize] * &ypow[b as usize];
        }
        acc
    }

    pub fn deriv_x(&self) -> Self {
        let mut out = MonomialPoly::zero();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, b, c * rat(a as i64));
            }
        }
        out
    }

    pub fn deriv_y(&self) -> Self {
        let mut out = MonomialPoly::zero();
        for (&(a, b), c) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, c * rat(b as i64));
            }
        }
        out
    }

    /// Derivative along the lattice direction `(dx, dy)`.
    pub fn deriv_dir(&self, dx: i64, dy: i64) -> Self {
        &self.deriv_x().scale(&rat(dx)) + &self.deriv_y().scale(&rat(dy))
    }

    /// Substitutes affine expressions for `x` and `y`: each expression is
    /// `[c, cu, cw]` meaning `c + cu*u + cw*w`; the result is a polynomial
    /// in `(u, w)`.
    pub fn substitute_affine(&self, x_expr: &[Rational; 3], y_expr: &[Rational; 3]) -> Self {
        let xp = MonomialPoly::affine(x_expr[0].clone(), x_expr[1].clone(), x_expr[2].clone());
        let yp = MonomialPoly::affine(y_expr[0].clone(), y_expr[1].clone(), y_expr[2].clone());
        let deg = self.total_degree() as usize;
        let mut xpows = Vec::with_capacity(deg + 1);
        let mut ypows = Vec::with_capacity(deg + 1);
        xpows.push(MonomialPoly::one());
        ypows.push(MonomialPoly::one());
        for k in 1..=deg {
            let nx = &xpows[k - 1] * &xp;
            xpows.push(nx);
            let ny = &ypows[k - 1] * &yp;
            ypows.push(ny);
        }
        let mut out = MonomialPoly::zero();
        for (&(a, b), c) in &self.terms {
            let term = &xpows[a as usize] * &ypows[b as usize];
            out = &out + &term.scale(c);
        }
        out
    }
}

impl Add for &MonomialPoly {
    type Output = MonomialPoly;
    fn add(self, other: &MonomialPoly) -> MonomialPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Sub for &MonomialPoly {
    type Output = MonomialPoly;
    fn sub(self, other: &MonomialPoly) -> MonomialPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl Mul for &MonomialPoly {
    type Output = MonomialPoly;
    fn mul(self, other: &MonomialPoly) -> MonomialPoly {
        let mut out = MonomialPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MonomialPoly {
    type Output = MonomialPoly;
    fn neg(self) -> MonomialPoly {
        self.scale(&-Rational::one())
    }
}

/// Order of a mixed directional derivative along `e1`, `e2`, `e3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DerivIndex {
    pub s1: u32,
    pub s2: u32,
    pub s3: u32,
}

pub const fn deriv(s1: u32, s2: u32, s3: u32) -> DerivIndex {
    DerivIndex { s1, s2, s3 }
}

impl DerivIndex {
    pub fn order(self) -> u32 {
        self.s1 + self.s2 + self.s3
    }
}

/// Applies the mixed directional derivative along the three lattice
/// directions: `s1` times along `e1 = (1,0)`, `s2` times along
/// `e2 = (0,1)`, `s3` times along `e3 = (1,1)`.
pub fn directional_derivative(p: &MonomialPoly, s: DerivIndex) -> MonomialPoly {
    let mut out = p.clone();
    for _ in 0..s.s1 {
        out = out.deriv_dir(1, 0);
    }
    for _ in 0..s.s2 {
        out = out.deriv_dir(0, 1);
    }
    for _ in 0..s.s3 {
        out = out.deriv_dir(1, 1);
    }
    out
}

/// Per-edge-type smoothness orders; `-1` means no condition across edges of
/// that type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVector {
    pub d1: i32,
    pub d2: i32,
    pub d3: i32,
}

pub const fn regularity(d1: i32, d2: i32, d3: i32) -> RegularityVector {
    RegularityVector { d1, d2, d3 }
}

impl RegularityVector {
    pub fn order(&self, etype: EdgeType) -> i32 {
        match etype {
            EdgeType::E1 => self.d1,
            EdgeType::E2 => self.d2,
            EdgeType::E3 => self.d3,
        }
    }
}

/// Number of BB coefficients of a degree-`n` triangular patch.
pub fn dim_bb(degree: u32) -> usize {
    ((degree + 1) * (degree + 2) / 2) as usize
}

/// Canonical ordering of the BB index triples `(j, k, l)`, `j+k+l = degree`:
/// lexicographically descending in `(j, k)`.
pub fn bb_indices(degree: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::with_capacity(dim_bb(degree));
    for j in (0..=degree).rev() {
        for k in (0..=degree - j).rev() {
            out.push((j, k, degree - j - k));
        }
    }
    out
}

fn bb_position(degree: u32, j: u32, k: u32) -> usize {
    // blocks of first index degree, degree-1, ... have sizes 1, 2, ...
    let dj = degree - j;
    (dj * (dj + 1) / 2 + (dj - k)) as usize
}

/// Polynomial of fixed total degree on one triangle, stored by BB
/// coefficients in canonical index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BBPoly {
    pub triangle: TriangleId,
    pub degree: u32,
    coeffs: Vec<Rational>,
}

impl BBPoly {
    pub fn zero(triangle: TriangleId, degree: u32) -> Self {
        BBPoly {
            triangle,
            degree,
            coeffs: vec![Rational::zero(); dim_bb(degree)],
        }
    }

    pub fn from_coeffs(triangle: TriangleId, degree: u32, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), dim_bb(degree));
        BBPoly {
            triangle,
            degree,
            coeffs,
        }
    }

    pub fn coeff(&self, j: u32, k: u32, l: u32) -> &Rational {
        debug_assert_eq!(j + k + l, self.degree);
        &self.coeffs[bb_position(self.degree, j, k)]
    }

    pub fn set_coeff(&mut self, j: u32, k: u32, l: u32, v: Rational) {
        debug_assert_eq!(j + k + l, self.degree);
        self.coeffs[bb_position(self.degree, j, k)] = v;
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Same coefficients attached to a translated triangle; BB coefficients
    /// are translation invariant.
    pub fn translate(&self, v: LatticePoint) -> BBPoly {
        BBPoly {
            triangle: self.triangle.translate(v),
            degree: self.degree,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn add_assign(&mut self, other: &BBPoly) {
        assert_eq!(self.triangle, other.triangle);
        assert_eq!(self.degree, other.degree);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn scale(&self, factor: &Rational) -> BBPoly {
        BBPoly {
            triangle: self.triangle,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn sub(&self, other: &BBPoly) -> BBPoly {
        assert_eq!(self.triangle, other.triangle);
        assert_eq!(self.degree, other.degree);
        BBPoly {
            triangle: self.triangle,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Serialize for BBPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct CoeffRepr {
            jkl: (u32, u32, u32),
            num: String,
            den: String,
        }
        #[derive(Serialize)]
        struct Repr {
            triangle: TriangleId,
            degree: u32,
            coeffs: Vec<CoeffRepr>,
        }
        let coeffs = bb_indices(self.degree)
            .into_iter()
            .map(|(j, k, l)| {
                let r = RationalRepr::from(self.coeff(j, k, l));
                CoeffRepr {
                    jkl: (j, k, l),
                    num: r.num,
                    den: r.den,
                }
            })
            .collect();
        Repr {
            triangle: self.triangle,
            degree: self.degree,
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BBPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct CoeffRepr {
            jkl: (u32, u32, u32),
            num: String,
            den: String,
        }
        #[derive(Deserialize)]
        struct Repr {
            triangle: TriangleId,
            degree: u32,
            coeffs: Vec<CoeffRepr>,
        }
        let r = Repr::deserialize(d)?;
        let mut out = BBPoly::zero(r.triangle, r.degree);
        for c in r.coeffs {
            let (j, k, l) = c.jkl;
            if j + k + l != r.degree {
                return Err(D::Error::custom("BB index does not match degree"));
            }
            let v = RationalRepr {
                num: c.num,
                den: c.den,
            }
            .to_rational()
            .ok_or_else(|| D::Error::custom("invalid rational"))?;
            out.set_coeff(j, k, l, v);
        }
        Ok(out)
    }
}

/// Mesh size of grid level `l` (level 1 is the integer grid).
pub fn level_scale(level: u32) -> Rational {
    debug_assert!(level >= 1);
    Rational::new(BigInt::one(), BigInt::from(2).pow(level - 1))
}

/// Plane coordinates of a lattice point at the given level.
pub fn point_coords(p: LatticePoint, level: u32) -> (Rational, Rational) {
    let h = level_scale(level);
    (rat(p.i) * &h, rat(p.j) * &h)
}

/// The three barycentric coordinate forms of a triangle at the given level,
/// ordered to match the canonical vertex order.
pub fn barycentric_forms(t: TriangleId, level: u32) -> [MonomialPoly; 3] {
    // Level-1 forms composed with x -> x / h; equivalently scale x, y by 2^(l-1).
    let s = level_scale(level).recip();
    let xi = rat(t.i);
    let yj = rat(t.j);
    let sx = MonomialPoly::affine(Rational::zero(), s.clone(), Rational::zero());
    let sy = MonomialPoly::affine(Rational::zero(), Rational::zero(), s);
    let one = MonomialPoly::one();
    let xs = &sx - &MonomialPoly::constant(xi);
    let ys = &sy - &MonomialPoly::constant(yj);
    match t.orient {
        crate::mesh::Orient::Lower => {
            let b0 = &one - &xs;
            let b1 = &xs - &ys;
            let b2 = ys;
            [b0, b1, b2]
        }
        crate::mesh::Orient::Upper => {
            let b0 = &one - &ys;
            let b1 = xs.clone();
            let b2 = &ys - &xs;
            [b0, b1, b2]
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn multinomial(n: u32, j: u32, k: u32, l: u32) -> Rational {
    Rational::from_integer(factorial(n) / (factorial(j) * factorial(k) * factorial(l)))
}

/// The Bernstein basis polynomial of index `(j, k, l)` on a triangle, in
/// monomial form.
pub fn bb_basis_poly(
    t: TriangleId,
    level: u32,
    degree: u32,
    j: u32,
    k: u32,
    l: u32,
) -> MonomialPoly {
    let [b0, b1, b2] = barycentric_forms(t, level);
    let m = multinomial(degree, j, k, l);
    (&(&b0.pow(j) * &b1.pow(k)) * &b2.pow(l)).scale(&m)
}

/// Homogeneous trivariate accumulator used by the monomial-to-BB
/// conversion.
#[derive(Default, Clone)]
struct TriPoly {
    terms: BTreeMap<(u32, u32, u32), Rational>,
}

impl TriPoly {
    fn constant(c: Rational) -> Self {
        let mut p = TriPoly::default();
        p.add(0, 0, 0, c);
        p
    }

    fn linear(c0: Rational, c1: Rational, c2: Rational) -> Self {
        let mut p = TriPoly::default();
        p.add(1, 0, 0, c0);
        p.add(0, 1, 0, c1);
        p.add(0, 0, 1, c2);
        p
    }

    fn add(&mut self, j: u32, k: u32, l: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((j, k, l)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(j, k, l));
        }
    }

    fn mul(&self, other: &TriPoly) -> TriPoly {
        let mut out = TriPoly::default();
        for (&(j1, k1, l1), c1) in &self.terms {
            for (&(j2, k2, l2), c2) in &other.terms {
                out.add(j1 + j2, k1 + k2, l1 + l2, c1 * c2);
            }
        }
        out
    }

    fn scaled_add(&mut self, other: &TriPoly, factor: &Rational) {
        for (&idx, c) in &other.terms {
            self.add(idx.0, idx.1, idx.2, c * factor);
        }
    }
}

/// Converts a polynomial to BB form on a triangle at the given level.
pub fn to_bb_at_level(
    p: &MonomialPoly,
    t: TriangleId,
    level: u32,
    degree: u32,
) -> Result<BBPoly, BernsteinError> {
    if p.total_degree() > degree {
        return Err(BernsteinError::DegreeTooLow {
            requested: degree,
            actual: p.total_degree(),
        });
    }
    // x = sum_m Vm_x b_m, y = sum_m Vm_y b_m, 1 = b0 + b1 + b2.
    let verts = triangle_vertices(t);
    let coords: Vec<(Rational, Rational)> = verts.iter().map(|&v| point_coords(v, level)).collect();
    let xform = TriPoly::linear(
        coords[0].0.clone(),
        coords[1].0.clone(),
        coords[2].0.clone(),
    );
    let yform = TriPoly::linear(
        coords[0].1.clone(),
        coords[1].1.clone(),
        coords[2].1.clone(),
    );
    let unit = TriPoly::linear(Rational::one(), Rational::one(), Rational::one());

    let mut xpows = vec![TriPoly::constant(Rational::one())];
    let mut ypows = vec![TriPoly::constant(Rational::one())];
    let mut unit_pows = vec![TriPoly::constant(Rational::one())];
    for k in 1..=degree as usize {
        let nx = xpows[k - 1].mul(&xform);
        xpows.push(nx);
        let ny = ypows[k - 1].mul(&yform);
        ypows.push(ny);
        let nu = unit_pows[k - 1].mul(&unit);
        unit_pows.push(nu);
    }

    let mut hom = TriPoly::default();
    for (&(a, b), c) in p.terms() {
        let raise = &unit_pows[(degree - a - b) as usize];
        let term = xpows[a as usize].mul(&ypows[b as usize]).mul(raise);
        hom.scaled_add(&term, c);
    }

    let mut out = BBPoly::zero(t, degree);
    for (&(j, k, l), gamma) in &hom.terms {
        // gamma * b0^j b1^k b2^l = (gamma / multinomial) * B_{jkl}
        out.set_coeff(j, k, l, gamma / multinomial(degree, j, k, l));
    }
    Ok(out)
}

/// Converts a polynomial to BB form on a level-1 triangle.
pub fn to_bb(p: &MonomialPoly, t: TriangleId, degree: u32) -> Result<BBPoly, BernsteinError> {
    to_bb_at_level(p, t, 1, degree)
}

fn cumulative_powers(base: &MonomialPoly, max: u32) -> Vec<MonomialPoly> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(MonomialPoly::one());
    for k in 1..=max as usize {
        let next = &out[k - 1] * base;
        out.push(next);
    }
    out
}

/// Recovers the monomial form of a BB polynomial at the given level.
pub fn from_bb_at_level(f: &BBPoly, level: u32) -> MonomialPoly {
    let [b0, b1, b2] = barycentric_forms(f.triangle, level);
    let p0 = cumulative_powers(&b0, f.degree);
    let p1 = cumulative_powers(&b1, f.degree);
    let p2 = cumulative_powers(&b2, f.degree);
    let mut out = MonomialPoly::zero();
    for (j, k, l) in bb_indices(f.degree) {
        let c = f.coeff(j, k, l);
        if c.is_zero() {
            continue;
        }
        let basis = &(&p0[j as usize] * &p1[k as usize]) * &p2[l as usize];
        out = &out + &basis.scale(&(multinomial(f.degree, j, k, l) * c));
    }
    out
}

/// Recovers the monomial form of a BB polynomial on a level-1 triangle.
pub fn from_bb(f: &BBPoly) -> MonomialPoly {
    from_bb_at_level(f, 1)
}

/// Exact evaluation of the polynomial extension of a BB patch.
pub fn eval_at_level(f: &BBPoly, x: &Rational, y: &Rational, level: u32) -> Rational {
    let [b0, b1, b2] = barycentric_forms(f.triangle, level);
    let v0 = b0.eval(x, y);
    let v1 = b1.eval(x, y);
    let v2 = b2.eval(x, y);
    let mut acc = Rational::zero();
    for (j, k, l) in bb_indices(f.degree) {
        let c = f.coeff(j, k, l);
        if c.is_zero() {
            continue;
        }
        let mut term = multinomial(f.degree, j, k, l) * c;
        for _ in 0..j {
            term *= &v0;
        }
        for _ in 0..k {
            term *= &v1;
        }
        for _ in 0..l {
            term *= &v2;
        }
        acc += term;
    }
    acc
}

/// Exact evaluation at level 1.
pub fn eval(f: &BBPoly, x: &Rational, y: &Rational) -> Rational {
    eval_at_level(f, x, y, 1)
}

/// Affine parameterization of the plane adapted to an edge's line:
/// `u` vanishes on the line, `w` runs along it. Returns the substitution
/// expressions for `x` and `y` as `[c, cu, cw]`.
fn edge_adapted_coordinates(e: EdgeId) -> ([Rational; 3], [Rational; 3]) {
    let zero = Rational::zero;
    let one = Rational::one;
    match e.etype {
        // line y = c: u = y - c, w = x
        EdgeType::E1 => {
            let c = rat(e.a.j);
            ([zero(), zero(), one()], [c, one(), zero()])
        }
        // line x = c: u = x - c, w = y
        EdgeType::E2 => {
            let c = rat(e.a.i);
            ([c, one(), zero()], [zero(), zero(), one()])
        }
        // line x - y = c: u = x - y - c, w = y
        EdgeType::E3 => {
            let c = rat(e.a.i - e.a.j);
            ([c, one(), one()], [zero(), zero(), one()])
        }
    }
}

type EdgeConditionKey = (i64, i64, crate::mesh::Orient, crate::mesh::Orient, u32, i32);
static EDGE_CONDITION_CACHE: once_cell::sync::Lazy<
    std::sync::Mutex<std::collections::HashMap<EdgeConditionKey, std::sync::Arc<RationalMatrix>>>,
> = once_cell::sync::Lazy::new(Default::default);

/// Constraint matrix over the concatenated BB coefficient vectors of a pair
/// of triangles adjacent across `e`, whose kernel is exactly the pairs
/// joining with `C^r` smoothness across `e`. For `r = -1` the matrix has no
/// rows. Levels do not matter here: the conditions are scale invariant as
/// linear relations on BB coefficients, so the level-1 geometry is used.
///
/// The kernel (and row space) is translation invariant, so configurations
/// are cached in a translate-canonical position; the returned rows may be
/// an invertible recombination of a direct computation.
pub fn cr_edge_conditions(
    e: EdgeId,
    t: TriangleId,
    t2: TriangleId,
    degree: u32,
    r: i32,
) -> Result<std::sync::Arc<RationalMatrix>, BernsteinError> {
    match shared_edge(t, t2) {
        Some(se) if se == e => {}
        _ => return Err(BernsteinError::NotAdjacent),
    }
    let key: EdgeConditionKey = (t2.i - t.i, t2.j - t.j, t.orient, t2.orient, degree, r);
    if let Some(hit) = EDGE_CONDITION_CACHE.lock().unwrap().get(&key).cloned() {
        return Ok(hit);
    }
    let shift = crate::mesh::lp(-t.i, -t.j);
    let ct = t.translate(shift);
    let ct2 = t2.translate(shift);
    let ce = e.translate(shift);
    let m = std::sync::Arc::new(cr_edge_conditions_direct(ce, ct, ct2, degree, r));
    EDGE_CONDITION_CACHE.lock().unwrap().insert(key, m.clone());
    Ok(m)
}

fn cr_edge_conditions_direct(
    e: EdgeId,
    t: TriangleId,
    t2: TriangleId,
    degree: u32,
    r: i32,
) -> RationalMatrix {
    let dim = dim_bb(degree);
    if r < 0 {
        return RationalMatrix::zeros(0, 2 * dim);
    }
    let rmax = (r as u32).min(degree);
    let (x_expr, y_expr) = edge_adapted_coordinates(e);

    // Row index set: coefficients of u^a w^b with a <= r, a + b <= degree.
    let mut row_keys = Vec::new();
    for a in 0..=rmax {
        for b in 0..=(degree - a) {
            row_keys.push((a, b));
        }
    }
    let mut m = RationalMatrix::zeros(row_keys.len(), 2 * dim);
    for (block, tri) in [(0usize, t), (1usize, t2)] {
        let sign = if block == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        for (col, (j, k, l)) in bb_indices(degree).into_iter().enumerate() {
            let basis = bb_basis_poly(tri, 1, degree, j, k, l);
            let adapted = basis.substitute_affine(&x_expr, &y_expr);
            for (row, &(a, b)) in row_keys.iter().enumerate() {
                let c = adapted.coeff(a, b);
                if !c.is_zero() {
                    m.set(row, block * dim + col, c * &sign);
                }
            }
        }
    }
    m
}

/// Directions for the three derivative slots of vertex contact conditions.
fn vertex_slot_dirs() -> [(i64, i64); 3] {
    [(1, 0), (0, 1), (1, 1)]
}

/// Applies the vertex-contact variant of the mixed derivative `D_s`.
fn vertex_mixed_derivative(p: &MonomialPoly, s: DerivIndex) -> MonomialPoly {
    let dirs = vertex_slot_dirs();
    let mut out = p.clone();
    for (slot, count) in [(0usize, s.s1), (1, s.s2), (2, s.s3)] {
        for _ in 0..count {
            out = out.deriv_dir(dirs[slot].0, dirs[slot].1);
        }
    }
    out
}

/// Constraint matrix over the concatenated BB coefficient vectors of two
/// triangles meeting at exactly one vertex `v`, whose kernel consists of
/// the pairs whose `D_s` derivatives agree at `v` for every `s` in the
/// given finite index set.
pub fn vertex_conditions(
    t: TriangleId,
    t2: TriangleId,
    index_set: &[DerivIndex],
    degree: u32,
) -> Result<RationalMatrix, BernsteinError> {
    let shared = shared_vertices(t, t2);
    if shared.len() != 1 || shared_edge(t, t2).is_some() {
        return Err(BernsteinError::NotVertexContact);
    }
    let v = shared[0];
    let (vx, vy) = point_coords(v, 1);
    let dim = dim_bb(degree);
    let mut m = RationalMatrix::zeros(index_set.len(), 2 * dim);
    for (block, tri) in [(0usize, t), (1usize, t2)] {
        let sign = if block == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        for (col, (j, k, l)) in bb_indices(degree).into_iter().enumerate() {
            let basis = bb_basis_poly(tri, 1, degree, j, k, l);
            for (row, &s) in index_set.iter().enumerate() {
                let d = vertex_mixed_derivative(&basis, s);
                let val = d.eval(&vx, &vy);
                if !val.is_zero() {
                    m.set(row, block * dim + col, val * &sign);
                }
            }
        }
    }
    Ok(m)
}

/// Largest `k` such that `b^k` divides the patch polynomial, where `b` is
/// the barycentric coordinate vanishing on `e`; `degree + 1` for the zero
/// patch. Computed from the BB coefficient layers parallel to the edge.
pub fn vanishing_order_on_edge(f: &BBPoly, e: EdgeId) -> Result<u32, BernsteinError> {
    let verts = triangle_vertices(f.triangle);
    let edge_points = [e.a, e.b];
    let opposite: Vec<usize> = (0..3)
        .filter(|&m| !edge_points.contains(&verts[m]))
        .collect();
    if opposite.len() != 1 {
        return Err(BernsteinError::EdgeNotOfTriangle);
    }
    let m = opposite[0];
    let mut order = f.degree + 1;
    for (j, k, l) in bb_indices(f.degree) {
        if f.coeff(j, k, l).is_zero() {
            continue;
        }
        let layer = [j, k, l][m];
        order = order.min(layer);
    }
    Ok(order)
}
