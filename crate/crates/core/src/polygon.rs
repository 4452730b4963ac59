//! Delzant polygons: validity, edge data, canonical forms under AGL(2,Z),
//! corner chops and their inverse, and the minimal models.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::rational::{ceil, qi, Q};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Point { x: qi(x), y: qi(y) }
    }

    fn minus(&self, o: &Point) -> (Q, Q) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    fn offset(&self, t: &Q, d: [i64; 2]) -> Point {
        Point { x: &self.x + t * qi(d[0]), y: &self.y + t * qi(d[1]) }
    }
}

fn cross(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn det(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn neg(a: [i64; 2]) -> [i64; 2] {
    [-a[0], -a[1]]
}

/// Primitive integer direction and rational length of a nonzero vector.
fn primitive(v: &(Q, Q)) -> Option<([i64; 2], Q)> {
    let l = v.0.denom().lcm(v.1.denom());
    let ix = v.0.numer() * (&l / v.0.denom());
    let iy = v.1.numer() * (&l / v.1.denom());
    let g = ix.gcd(&iy);
    if g.is_zero() {
        return None;
    }
    let d = [(&ix / &g).to_i64()?, (&iy / &g).to_i64()?];
    Some((d, Q::new(g, l)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub index: usize,
    pub direction: [i64; 2],
    /// Direction rotated 90° clockwise; outward for counterclockwise order.
    pub normal: [i64; 2],
    pub length: Q,
}

/// `p ↦ M p + t` with `det M = ±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularAffineMap {
    pub matrix: [[i64; 2]; 2],
    pub translation: [Q; 2],
}

impl UnimodularAffineMap {
    pub fn new(matrix: [[i64; 2]; 2], translation: [Q; 2]) -> Result<Self> {
        let m = UnimodularAffineMap { matrix, translation };
        if m.det().abs() != 1 {
            return Err(Error::Precondition(format!("matrix {matrix:?} is not unimodular")));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        UnimodularAffineMap { matrix: [[1, 0], [0, 1]], translation: [Q::zero(), Q::zero()] }
    }

    pub fn det(&self) -> i64 {
        let m = self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply_vector(&self, v: [i64; 2]) -> [i64; 2] {
        let m = self.matrix;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn apply(&self, p: &Point) -> Point {
        let m = self.matrix;
        Point {
            x: qi(m[0][0]) * &p.x + qi(m[0][1]) * &p.y + &self.translation[0],
            y: qi(m[1][0]) * &p.x + qi(m[1][1]) * &p.y + &self.translation[1],
        }
    }

    pub fn inverse(&self) -> Self {
        let m = self.matrix;
        let d = self.det();
        let inv = [[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]];
        let t = &self.translation;
        let translation = [
            -(qi(inv[0][0]) * &t[0] + qi(inv[0][1]) * &t[1]),
            -(qi(inv[1][0]) * &t[0] + qi(inv[1][1]) * &t[1]),
        ];
        UnimodularAffineMap { matrix: inv, translation }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (self.matrix, other.matrix);
        let matrix = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        let t = self.apply(&Point::new(other.translation[0].clone(), other.translation[1].clone()));
        UnimodularAffineMap { matrix, translation: [t.x, t.y] }
    }

    /// Transpose of the inverse matrix: how covectors (e.g. circle
    /// generators) move when the polygon moves by `self`.
    pub fn dual_vector(&self, xi: [i64; 2]) -> [i64; 2] {
        let inv = self.inverse().matrix;
        [inv[0][0] * xi[0] + inv[1][0] * xi[1], inv[0][1] * xi[0] + inv[1][1] * xi[1]]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexFailure {
    pub vertex: usize,
    pub determinant: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantCheck {
    pub ok: bool,
    pub failures: Vec<VertexFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonInvariants {
    pub edge_count: usize,
    pub b2: usize,
    pub euclidean_area: Q,
    pub perimeter: Q,
    pub edge_areas: Vec<Q>,
    pub self_intersections: Vec<i64>,
}

/// Strictly convex polygon with rational vertices in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPolygon {
    vertices: Vec<Point>,
}

impl RationalPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Precondition("a polygon needs at least 3 vertices".into()));
        }
        let edge = |i: usize| vertices[(i + 1) % n].minus(&vertices[i]);
        for i in 0..n {
            let e = edge(i);
            if e.0.is_zero() && e.1.is_zero() {
                return Err(Error::Precondition(format!("vertices {i} and {} coincide", (i + 1) % n)));
            }
            if primitive(&e).is_none() {
                return Err(Error::Precondition(format!("edge {i} direction does not fit machine integers")));
            }
            if !cross(&e, &edge((i + 1) % n)).is_positive() {
                return Err(Error::Precondition(format!(
                    "vertices must be strictly convex and counterclockwise (turn at vertex {})",
                    (i + 1) % n
                )));
            }
            for j in 0..n {
                if j != i && j != (i + 1) % n && !cross(&e, &vertices[j].minus(&vertices[i])).is_positive() {
                    return Err(Error::Precondition("polygon is not convex".into()));
                }
            }
        }
        Ok(RationalPolygon { vertices })
    }

    pub fn from_i64(pts: &[(i64, i64)]) -> Result<Self> {
        Self::new(pts.iter().map(|&(x, y)| Point::from_i64(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn vertex(&self, i: isize) -> &Point {
        let n = self.len() as isize;
        &self.vertices[i.rem_euclid(n) as usize]
    }

    fn dir_len(&self, i: isize) -> ([i64; 2], Q) {
        let e = self.vertex(i + 1).minus(self.vertex(i));
        primitive(&e).expect("checked on construction")
    }

    fn dir(&self, i: isize) -> [i64; 2] {
        self.dir_len(i).0
    }

    pub fn edges(&self) -> Vec<EdgeData> {
        (0..self.len())
            .map(|i| {
                let (d, length) = self.dir_len(i as isize);
                EdgeData { index: i, direction: d, normal: [d[1], -d[0]], length }
            })
            .collect()
    }

    pub fn is_delzant(&self) -> DelzantCheck {
        let failures: Vec<VertexFailure> = (0..self.len() as isize)
            .filter_map(|i| {
                let d = det(self.dir(i), neg(self.dir(i - 1)));
                (d.abs() != 1).then_some(VertexFailure { vertex: i as usize, determinant: d })
            })
            .collect();
        DelzantCheck { ok: failures.is_empty(), failures }
    }

    fn require_delzant(&self) -> Result<()> {
        let c = self.is_delzant();
        match c.failures.first() {
            None => Ok(()),
            Some(f) => Err(Error::Precondition(format!(
                "not Delzant at vertex {} (determinant {})",
                f.vertex, f.determinant
            ))),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    /// `det[n_{i+1}; n_{i−1}]`.
    pub fn self_intersection(&self, i: usize) -> Result<i64> {
        self.check_index(i)?;
        Ok(self.self_intersection_unchecked(i as isize))
    }

    fn self_intersection_unchecked(&self, i: isize) -> i64 {
        let n = |j: isize| {
            let d = self.dir(j);
            [d[1], -d[0]]
        };
        det(n(i + 1), n(i - 1))
    }

    pub fn self_intersections(&self) -> Vec<i64> {
        (0..self.len() as isize).map(|i| self.self_intersection_unchecked(i)).collect()
    }

    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let s = self.self_intersections();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            s[i]
                        } else if (i + 1) % n == j || (j + 1) % n == i {
                            1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn euclidean_area(&self) -> Q {
        let n = self.len();
        let twice: Q = (0..n)
            .map(|i| {
                let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                &a.x * &b.y - &a.y * &b.x
            })
            .sum();
        twice / qi(2)
    }

    pub fn invariants(&self) -> PolygonInvariants {
        let edge_areas: Vec<Q> = self.edges().into_iter().map(|e| e.length).collect();
        PolygonInvariants {
            edge_count: self.len(),
            b2: self.len() - 2,
            euclidean_area: self.euclidean_area(),
            perimeter: edge_areas.iter().sum(),
            edge_areas,
            self_intersections: self.self_intersections(),
        }
    }

    pub fn transform(&self, g: &UnimodularAffineMap) -> RationalPolygon {
        let mut vs: Vec<Point> = self.vertices.iter().map(|p| g.apply(p)).collect();
        if g.det() < 0 {
            vs.reverse();
        }
        RationalPolygon { vertices: vs }
    }

    /// Lexicographically least normalisation over all vertices and both
    /// orientations, and the map realising it.
    pub fn canonical_form(&self) -> Result<(RationalPolygon, UnimodularAffineMap)> {
        self.require_delzant()?;
        let n = self.len() as isize;
        let mut best: Option<(Vec<Point>, UnimodularAffineMap)> = None;
        for i in 0..n {
            let fwd = self.dir(i);
            let back = neg(self.dir(i - 1));
            for (u, w, step) in [(fwd, back, 1isize), (back, fwd, -1)] {
                // M sends u ↦ (1,0) and w ↦ (0,1)
                let d = det(u, w);
                let m = [[w[1] * d, -w[0] * d], [-u[1] * d, u[0] * d]];
                let v = self.vertex(i);
                let lin = UnimodularAffineMap { matrix: m, translation: [Q::zero(), Q::zero()] };
                let mv = lin.apply(v);
                let map = UnimodularAffineMap { matrix: m, translation: [-mv.x, -mv.y] };
                let seq: Vec<Point> = (0..n).map(|j| map.apply(self.vertex(i + step * j))).collect();
                if best.as_ref().map_or(true, |(b, _)| seq < *b) {
                    best = Some((seq, map));
                }
            }
        }
        let (vertices, map) = best.expect("polygon has vertices");
        Ok((RationalPolygon { vertices }, map))
    }

    pub fn canonical(&self) -> Result<RationalPolygon> {
        Ok(self.canonical_form()?.0)
    }

    pub fn equivalent(&self, other: &RationalPolygon) -> Result<bool> {
        Ok(self.canonical()? == other.canonical()?)
    }

    /// Corner chop of size `δ` at vertex `v`.
    pub fn blow_up(&self, v: usize, delta: &Q) -> Result<RationalPolygon> {
        self.require_delzant()?;
        self.check_index(v)?;
        if !delta.is_positive() {
            return Err(Error::Precondition("blow-up size must be positive".into()));
        }
        let n = self.len();
        let vi = v as isize;
        let (d_in, l_in) = self.dir_len(vi - 1);
        let (d_out, l_out) = self.dir_len(vi);
        for (edge, len) in [((v + n - 1) % n, &l_in), (v, &l_out)] {
            if delta >= len {
                return Err(Error::CapacityTooLarge(format!(
                    "size {delta} is not below the length {len} of edge {edge}"
                )));
            }
        }
        let p = &self.vertices[v];
        let a = p.offset(&-delta.clone(), d_in);
        let b = p.offset(delta, d_out);
        let mut vs = self.vertices.clone();
        vs.splice(v..=v, [a, b]);
        Ok(RationalPolygon { vertices: vs })
    }

    /// Glues a triangle onto the −1 edge `i`.
    pub fn blow_down(&self, i: usize) -> Result<RationalPolygon> {
        self.require_delzant()?;
        let s = self.self_intersection(i)?;
        if s != -1 {
            return Err(Error::EdgeNotExceptional(s));
        }
        let n = self.len();
        if n < 4 {
            return Err(Error::Precondition("a triangle has no exceptional edge".into()));
        }
        let ii = i as isize;
        let d_prev = self.dir(ii - 1);
        let d_next = self.dir(ii + 1);
        let p = self.vertex(ii);
        let q = self.vertex(ii + 1);
        // p + s·d_prev = q − t·d_next
        let dd = det(d_prev, d_next);
        let (rx, ry) = q.minus(p);
        let s = (&rx * qi(d_next[1]) - &ry * qi(d_next[0])) / qi(dd);
        let apex = p.offset(&s, d_prev);
        let mut vs = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == i {
                vs.push(apex.clone());
            } else if j != (i + 1) % n {
                vs.push(self.vertices[j].clone());
            }
        }
        RationalPolygon::new(vs)
    }
}

pub fn delzant_triangle(lambda: &Q) -> Result<RationalPolygon> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("λ must be positive".into()));
    }
    let z = Q::zero();
    RationalPolygon::new(vec![
        Point::new(z.clone(), z.clone()),
        Point::new(lambda.clone(), z.clone()),
        Point::new(z, lambda.clone()),
    ])
}

/// Trapezoid `(0,0), (a+mb/2,0), (a−mb/2,b), (0,b)` of area `ab`.
///
/// Even `m` (the product) is normalised by `a ≥ b`; odd `m` only needs
/// `a > mb/2`, since CP² blown up with a small ball has `a < b`.
pub fn hirzebruch(a: &Q, b: &Q, m: u32) -> Result<RationalPolygon> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::Precondition("a and b must be positive".into()));
    }
    let half = b * qi(i64::from(m)) / qi(2);
    if *a <= half {
        return Err(Error::Precondition(format!("need a > mb/2, got a = {a}, mb/2 = {half}")));
    }
    if m % 2 == 0 && a < b {
        return Err(Error::Precondition(format!("need a >= b for even m, got a = {a}, b = {b}")));
    }
    let z = Q::zero();
    RationalPolygon::new(vec![
        Point::new(z.clone(), z.clone()),
        Point::new(a + &half, z.clone()),
        Point::new(a - &half, b.clone()),
        Point::new(z, b.clone()),
    ])
}

/// All Hirzebruch trapezoids of the given parity for `(a, b)`.
pub fn hirzebruch_family(a: &Q, b: &Q, twisted: bool) -> Vec<(u32, RationalPolygon)> {
    let mut m = u32::from(twisted);
    let mut out = Vec::new();
    while let Ok(p) = hirzebruch(a, b, m) {
        out.push((m, p));
        m += 2;
    }
    out
}

/// Blow-ups at every admissible vertex, one representative per class,
/// together with the first vertex producing it.
pub fn equivariant_blowups_with_vertices(p: &RationalPolygon, delta: &Q) -> Result<Vec<(usize, RationalPolygon)>> {
    let mut seen: BTreeMap<RationalPolygon, usize> = BTreeMap::new();
    for v in 0..p.len() {
        match p.blow_up(v, delta) {
            Ok(b) => {
                seen.entry(b.canonical()?).or_insert(v);
            }
            Err(Error::CapacityTooLarge(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(seen.into_iter().map(|(poly, v)| (v, poly)).collect())
}

pub fn enumerate_equivariant_blowups(p: &RationalPolygon, delta: &Q) -> Result<Vec<RationalPolygon>> {
    Ok(equivariant_blowups_with_vertices(p, delta)?.into_iter().map(|(_, q)| q).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ToricModel {
    ProjectivePlane { lambda: Q },
    /// S²×S² (`twisted = false`) or CP²#C̄P² with trapezoid parameters.
    Hirzebruch { a: Q, b: Q, twisted: bool },
}

impl ToricModel {
    /// For the twisted model: areas of the line and of the exceptional class.
    pub fn line_and_exceptional_areas(&self) -> Option<(Q, Q)> {
        match self {
            ToricModel::Hirzebruch { a, b, twisted: true } => {
                let h = b / qi(2);
                Some((a + &h, a - &h))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelIdentification {
    pub model: ToricModel,
    pub blowdowns: usize,
}

fn identify_small(p: &RationalPolygon) -> Result<ToricModel> {
    let s = p.self_intersections();
    let len: Vec<Q> = p.edges().into_iter().map(|e| e.length).collect();
    match p.len() {
        3 => Ok(ToricModel::ProjectivePlane { lambda: len[0].clone() }),
        4 => {
            if s.iter().all(|&x| x == 0) {
                let (a, b) = if len[0] >= len[1] { (&len[0], &len[1]) } else { (&len[1], &len[0]) };
                return Ok(ToricModel::Hirzebruch { a: a.clone(), b: b.clone(), twisted: false });
            }
            let i = (0..4).find(|&i| s[i] == 0 && s[(i + 2) % 4] == 0).ok_or(Error::NotAModel)?;
            let m = s[(i + 1) % 4].abs();
            let a = (&len[(i + 1) % 4] + &len[(i + 3) % 4]) / qi(2);
            Ok(ToricModel::Hirzebruch { a, b: len[i].clone(), twisted: m % 2 == 1 })
        }
        _ => Err(Error::NotAModel),
    }
}

/// Blows down −1 edges along every branch until a triangle or a
/// quadrilateral remains, and names the models reached.
pub fn classify_model(p: &RationalPolygon) -> Result<Vec<ModelIdentification>> {
    p.require_delzant()?;
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![(p.canonical()?, 0usize)];
    while let Some((poly, k)) = stack.pop() {
        if !seen.insert(poly.clone()) {
            continue;
        }
        if poly.len() <= 4 {
            out.insert(ModelIdentification { model: identify_small(&poly)?, blowdowns: k });
            continue;
        }
        let mut any = false;
        for (i, s) in poly.self_intersections().into_iter().enumerate() {
            if s == -1 {
                any = true;
                stack.push((poly.blow_down(i)?.canonical()?, k + 1));
            }
        }
        if !any {
            return Err(Error::NotAModel);
        }
    }
    Ok(out.into_iter().collect())
}

/// `⌈a/b⌉` (product) or `⌈a/b − 1/2⌉` (twisted), checked against the
/// number of trapezoids of that parity.
pub fn count_toric_actions_ruled(a: &Q, b: &Q, twisted: bool) -> Result<u64> {
    if !b.is_positive() || (!twisted && a < b) || (twisted && *a <= b / qi(2)) {
        return Err(Error::Precondition(format!(
            "need a >= b > 0 (product) or a > b/2 > 0 (twisted), got a = {a}, b = {b}"
        )));
    }
    let r = a / b;
    let formula = if twisted { ceil(&(r - Q::new(BigInt::one(), BigInt::from(2)))) } else { ceil(&r) };
    let direct = hirzebruch_family(a, b, twisted).len() as u64;
    if formula != BigInt::from(direct) {
        return Err(Error::Precondition(format!("count formula {formula} disagrees with {direct} trapezoids")));
    }
    Ok(direct)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    pub(crate) fn square() -> RationalPolygon {
        RationalPolygon::from_i64(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn tri() -> RationalPolygon {
        delzant_triangle(&qi(1)).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(RationalPolygon::from_i64(&[(0, 0), (0, 1), (1, 0)]).is_err());
        assert!(RationalPolygon::from_i64(&[(0, 0), (1, 0), (2, 0), (0, 1)]).is_err());
        assert!(RationalPolygon::from_i64(&[(0, 0), (1, 0)]).is_err());
        // pentagram: all left turns but winding twice
        let star = [(0, 2), (-2, -2), (3, 1), (-3, 1), (2, -2)];
        assert!(RationalPolygon::from_i64(&star).is_err());
    }

    #[test]
    fn delzant_checks() {
        assert!(tri().is_delzant().ok);
        assert!(square().is_delzant().ok);
        let t = RationalPolygon::from_i64(&[(0, 0), (2, 0), (0, 1)]).unwrap();
        let c = t.is_delzant();
        assert!(!c.ok);
        assert_eq!(c.failures.len(), 1);
        assert_eq!(c.failures[0].vertex, 2);
        assert_eq!(c.failures[0].determinant.abs(), 2);
    }

    #[test]
    fn edge_data() {
        let e = square().edges();
        assert!(e.iter().all(|x| x.length == qi(1)));
        let normals: Vec<_> = e.iter().map(|x| x.normal).collect();
        assert_eq!(normals, vec![[0, -1], [1, 0], [0, 1], [-1, 0]]);
        let t = delzant_triangle(&q(3, 2)).unwrap().edges();
        assert_eq!(t[0].length, q(3, 2));
        assert_eq!(t[0].direction, [1, 0]);
        assert_eq!(t[1].direction, [-1, 1]);
        assert_eq!(t[1].normal, [1, 1]);
    }

    #[test]
    fn self_intersections() {
        assert_eq!(square().self_intersections(), vec![0, 0, 0, 0]);
        assert_eq!(tri().self_intersections(), vec![1, 1, 1]);
        let chopped = square().blow_up(1, &q(1, 4)).unwrap();
        assert_eq!(chopped.vertices()[1], Point::new(q(3, 4), qi(0)));
        assert_eq!(chopped.vertices()[2], Point::new(qi(1), q(1, 4)));
        assert_eq!(chopped.self_intersection(1).unwrap(), -1);
        assert!(square().self_intersection(4).is_err());
        let h = hirzebruch(&qi(2), &qi(1), 2).unwrap();
        assert_eq!(h.vertices()[1], Point::from_i64(3, 0));
        assert_eq!(h.vertices()[2], Point::from_i64(1, 1));
        assert_eq!(h.self_intersections(), vec![2, 0, -2, 0]);
    }

    #[test]
    fn intersection_matrices() {
        let m = square().intersection_matrix();
        assert_eq!(m, vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
        assert_eq!(tri().intersection_matrix(), vec![vec![1; 3]; 3]);
    }

    #[test]
    fn invariants_of_models() {
        let i = tri().invariants();
        assert_eq!((i.edge_count, i.b2), (3, 1));
        assert_eq!(i.euclidean_area, q(1, 2));
        assert_eq!(i.perimeter, qi(3));
        let r = hirzebruch(&qi(2), &qi(1), 0).unwrap().invariants();
        assert_eq!((r.edge_count, r.euclidean_area, r.perimeter), (4, qi(2), qi(6)));
        for (a, b, m) in [(q(5, 2), qi(1), 4u32), (qi(3), q(2, 3), 7)] {
            assert_eq!(hirzebruch(&a, &b, m).unwrap().euclidean_area(), &a * &b);
        }
    }

    #[test]
    fn canonical_examples() {
        let shear = UnimodularAffineMap::new([[1, 1], [0, 1]], [qi(7), qi(-3)]).unwrap();
        let s = square();
        assert_eq!(s.canonical().unwrap(), s.transform(&shear).canonical().unwrap());
        let rot = UnimodularAffineMap::new([[0, -1], [1, 1]], [q(1, 3), qi(2)]).unwrap();
        assert_eq!(tri().transform(&rot).canonical().unwrap(), tri());
        let (c, map) = s.transform(&shear).canonical_form().unwrap();
        assert_eq!(s.transform(&shear).transform(&map), c);
        assert_eq!(c.canonical().unwrap(), c);
    }

    #[test]
    fn equivalence() {
        let h = hirzebruch(&qi(2), &qi(1), 2).unwrap();
        let refl = UnimodularAffineMap::new([[-1, 0], [0, 1]], [qi(4), qi(0)]).unwrap();
        assert!(h.equivalent(&h.transform(&refl)).unwrap());
        assert!(!h.equivalent(&hirzebruch(&qi(2), &qi(1), 0).unwrap()).unwrap());
        assert!(h.equivalent(&h).unwrap());
        let bad = RationalPolygon::from_i64(&[(0, 0), (2, 0), (0, 1)]).unwrap();
        assert!(bad.canonical_form().is_err());
    }

    #[test]
    fn chops() {
        let t = tri();
        let chops: Vec<_> = (0..3).map(|v| t.blow_up(v, &q(1, 3)).unwrap()).collect();
        assert!(chops.iter().all(|c| c.len() == 4));
        assert!(chops[0].equivalent(&chops[1]).unwrap() && chops[1].equivalent(&chops[2]).unwrap());
        assert!(matches!(square().blow_up(0, &qi(1)), Err(Error::CapacityTooLarge(_))));
        assert_eq!(square().blow_up(1, &q(1, 4)).unwrap().blow_down(1).unwrap(), square());
        let back = chops[0].blow_down(0).unwrap();
        assert!(back.equivalent(&t).unwrap());
        assert_eq!(square().blow_down(0), Err(Error::EdgeNotExceptional(0)));
    }

    #[test]
    fn blowup_enumeration() {
        assert_eq!(enumerate_equivariant_blowups(&tri(), &q(1, 4)).unwrap().len(), 1);
        let r = hirzebruch(&qi(2), &qi(1), 0).unwrap();
        assert_eq!(enumerate_equivariant_blowups(&r, &q(1, 2)).unwrap().len(), 1);
        assert!(enumerate_equivariant_blowups(&tri(), &qi(1)).unwrap().is_empty());
    }

    #[test]
    fn models() {
        let c = tri().blow_up(0, &q(1, 4)).unwrap();
        let m = classify_model(&c).unwrap();
        assert_eq!(m.len(), 1);
        match &m[0].model {
            ToricModel::Hirzebruch { a, b, twisted: true } => {
                assert_eq!(b, &q(3, 4));
                assert_eq!(m[0].model.line_and_exceptional_areas(), Some((qi(1), q(1, 4))));
                assert_eq!(a, &q(5, 8));
            }
            other => panic!("unexpected {other:?}"),
        }
        let two = c.blow_up(2, &q(1, 5)).unwrap();
        let ms = classify_model(&two).unwrap();
        assert!(ms.iter().all(|x| x.blowdowns == 1));
        assert_eq!(classify_model(&tri()).unwrap()[0].model, ToricModel::ProjectivePlane { lambda: qi(1) });
    }

    #[test]
    fn classify_inverts_hirzebruch_on_grid() {
        for bn in 1..=6i64 {
            for bd in 1..=6i64 {
                for an in 1..=12i64 {
                    for ad in 1..=6i64 {
                        let (a, b) = (q(an, ad), q(bn, bd));
                        for m in 0..=6u32 {
                            if let Ok(p) = hirzebruch(&a, &b, m) {
                                let got = classify_model(&p).unwrap();
                                let want = ToricModel::Hirzebruch { a: a.clone(), b: b.clone(), twisted: m % 2 == 1 };
                                assert_eq!(got, vec![ModelIdentification { model: want, blowdowns: 0 }]);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ruled_counts() {
        assert_eq!(count_toric_actions_ruled(&q(5, 2), &qi(1), false).unwrap(), 3);
        assert_eq!(count_toric_actions_ruled(&qi(1), &qi(1), false).unwrap(), 1);
        assert_eq!(count_toric_actions_ruled(&qi(2), &qi(1), true).unwrap(), 2);
        assert!(count_toric_actions_ruled(&qi(1), &qi(2), false).is_err());
        for d in 1..=12i64 {
            for n in 1..=60i64 {
                let r = q(n, d);
                if r >= qi(1) {
                    count_toric_actions_ruled(&r, &qi(1), false).unwrap();
                }
                if r > q(1, 2) {
                    count_toric_actions_ruled(&r, &qi(1), true).unwrap();
                }
            }
        }
    }

    pub(crate) fn corpus() -> Vec<RationalPolygon> {
        let mut out = vec![tri(), delzant_triangle(&q(7, 3)).unwrap(), square()];
        for (a, b, m) in [(qi(2), qi(1), 0u32), (qi(2), qi(1), 2), (qi(3), qi(1), 5), (q(5, 2), q(3, 2), 1)] {
            out.push(hirzebruch(&a, &b, m).unwrap());
        }
        let base = out.clone();
        for p in &base {
            for v in 0..p.len() {
                if let Ok(c) = p.blow_up(v, &q(1, 7)) {
                    out.push(c.clone());
                    if let Ok(cc) = c.blow_up((v + 2) % c.len(), &q(1, 11)) {
                        out.push(cc);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn bookkeeping_on_corpus() {
        let corpus = corpus();
        assert!(corpus.len() >= 20);
        for p in &corpus {
            assert!(p.is_delzant().ok);
            let m = p.intersection_matrix();
            for (i, row) in m.iter().enumerate() {
                assert_eq!(row.iter().sum::<i64>(), m[i][i] + 2);
            }
            let inv = p.invariants();
            for v in 0..p.len() {
                for d in [q(1, 13), q(1, 5)] {
                    let Ok(c) = p.blow_up(v, &d) else { continue };
                    assert!(c.is_delzant().ok);
                    let ci = c.invariants();
                    assert_eq!(ci.euclidean_area, &inv.euclidean_area - &d * &d / qi(2));
                    assert_eq!(ci.perimeter, &inv.perimeter - &d);
                    assert_eq!(ci.edge_count, inv.edge_count + 1);
                    assert_eq!(c.self_intersection(v).unwrap(), -1);
                    assert!(c.blow_down(v).unwrap().equivalent(p).unwrap());
                }
            }
        }
    }

    pub(crate) fn arb_unimodular() -> impl Strategy<Value = UnimodularAffineMap> {
        (proptest::collection::vec(0u8..6, 0..8), -20i64..20, -20i64..20, 1i64..7).prop_map(|(ops, tx, ty, den)| {
            let mut m = [[1i64, 0], [0, 1]];
            for op in ops {
                let e = match op {
                    0 => [[1, 1], [0, 1]],
                    1 => [[1, -1], [0, 1]],
                    2 => [[1, 0], [1, 1]],
                    3 => [[1, 0], [-1, 1]],
                    4 => [[0, 1], [1, 0]],
                    _ => [[-1, 0], [0, 1]],
                };
                m = [
                    [e[0][0] * m[0][0] + e[0][1] * m[1][0], e[0][0] * m[0][1] + e[0][1] * m[1][1]],
                    [e[1][0] * m[0][0] + e[1][1] * m[1][0], e[1][0] * m[0][1] + e[1][1] * m[1][1]],
                ];
            }
            UnimodularAffineMap::new(m, [q(tx, den), q(ty, den)]).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn canonical_form_is_invariant(g in arb_unimodular(), idx in 0usize..64) {
            let corpus = corpus();
            let p = &corpus[idx % corpus.len()];
            let c = p.canonical().unwrap();
            prop_assert_eq!(p.transform(&g).canonical().unwrap(), c.clone());
            prop_assert_eq!(c.canonical().unwrap(), c);
        }

        #[test]
        fn map_algebra(g in arb_unimodular(), h in arb_unimodular()) {
            let p = Point::new(q(3, 7), q(-2, 5));
            prop_assert_eq!(g.compose(&h).apply(&p), g.apply(&h.apply(&p)));
            prop_assert_eq!(g.inverse().apply(&g.apply(&p)), p);
        }
    }
}
