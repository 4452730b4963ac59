//! Labelled graphs of Hamiltonian circle actions on 4-manifolds.
//!
//! Vertices are fixed components (isolated points with their two weights,
//! or surfaces at the extrema with genus and area); edges are `Z_k`-spheres
//! with `k ≥ 2`. Sphere areas are stored on the edges and always satisfy
//! `Δμ = k · area`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::polygon::RationalPolygon;
use crate::rational::{qi, Q};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixedKind {
    Isolated { weights: (i64, i64) },
    Surface { genus: u32, area: Q },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedComponent {
    pub id: usize,
    pub moment: Q,
    pub kind: FixedKind,
}

impl FixedComponent {
    pub fn isolated(id: usize, moment: Q, weights: (i64, i64)) -> Self {
        FixedComponent { id, moment, kind: FixedKind::Isolated { weights } }
    }

    pub fn surface(id: usize, moment: Q, genus: u32, area: Q) -> Self {
        FixedComponent { id, moment, kind: FixedKind::Surface { genus, area } }
    }

    pub fn weights(&self) -> Option<(i64, i64)> {
        match self.kind {
            FixedKind::Isolated { weights } => Some(weights),
            FixedKind::Surface { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphEdge {
    pub north: usize,
    pub south: usize,
    pub k: u64,
    pub area: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct S1Graph {
    pub vertices: Vec<FixedComponent>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub ok: bool,
    pub reason: String,
}

fn sorted_pair((a, b): (i64, i64)) -> (i64, i64) {
    if a >= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl S1Graph {
    pub fn new(vertices: Vec<FixedComponent>, edges: Vec<GraphEdge>) -> Self {
        S1Graph { vertices, edges }
    }

    /// Edges given as `(north, south, k)`; areas come from `Δμ / k`.
    pub fn with_derived_areas(vertices: Vec<FixedComponent>, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = S1Graph { vertices, edges: Vec::new() };
        for &(north, south, k) in edges {
            let (n, s) = (g.component(north)?, g.component(south)?);
            if k == 0 {
                return Err(Error::Precondition("edge weight must be positive".into()));
            }
            let area = (&n.moment - &s.moment) / qi(k as i64);
            g.edges.push(GraphEdge { north, south, k, area });
        }
        Ok(g)
    }

    pub fn component(&self, id: usize) -> Result<&FixedComponent> {
        self.vertices.iter().find(|v| v.id == id).ok_or(Error::UnknownVertex(id))
    }

    pub fn min_moment(&self) -> Q {
        self.vertices.iter().map(|v| v.moment.clone()).min().unwrap_or_else(Q::zero)
    }

    pub fn max_moment(&self) -> Q {
        self.vertices.iter().map(|v| v.moment.clone()).max().unwrap_or_else(Q::zero)
    }

    fn incident(&self, id: usize) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.north == id || e.south == id)
    }

    pub fn validate(&self) -> Validation {
        let mut d: Vec<String> = Vec::new();
        if self.vertices.len() < 2 {
            d.push("a graph needs at least two fixed components".into());
            return Validation { ok: false, diagnostics: d };
        }
        let mut ids: Vec<usize> = self.vertices.iter().map(|v| v.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            d.push("duplicate vertex ids".into());
        }
        let (lo, hi) = (self.min_moment(), self.max_moment());
        for (name, m) in [("minimum", &lo), ("maximum", &hi)] {
            let c = self.vertices.iter().filter(|v| v.moment == *m).count();
            if c != 1 {
                d.push(format!("{name} attained by {c} components"));
            }
        }
        for e in &self.edges {
            let (Ok(n), Ok(s)) = (self.component(e.north), self.component(e.south)) else {
                d.push(format!("edge {}-{} references an unknown vertex", e.north, e.south));
                continue;
            };
            if e.k < 2 {
                d.push(format!("edge {}-{} has weight {} < 2", e.north, e.south, e.k));
            }
            if n.moment <= s.moment {
                d.push(format!("edge {}-{}: north pole is not above south pole", e.north, e.south));
            }
            if !e.area.is_positive() {
                d.push(format!("edge {}-{} has nonpositive area", e.north, e.south));
            }
            if &n.moment - &s.moment != &e.area * qi(e.k as i64) {
                d.push(format!("edge {}-{}: moment difference is not k times the area", e.north, e.south));
            }
        }
        let surfaces = self.vertices.iter().filter(|v| matches!(v.kind, FixedKind::Surface { .. })).count();
        if surfaces > 2 {
            d.push(format!("{surfaces} fixed surfaces"));
        }
        for v in &self.vertices {
            let deg = self.incident(v.id).count();
            if deg > 2 {
                d.push(format!("vertex {} reached by {deg} edges", v.id));
            }
            let extremal = v.moment == lo || v.moment == hi;
            match v.kind {
                FixedKind::Surface { ref area, .. } => {
                    if !extremal {
                        d.push(format!("surface {} is not at an extremum", v.id));
                    }
                    if deg > 0 {
                        d.push(format!("surface {} carries an edge", v.id));
                    }
                    if !area.is_positive() {
                        d.push(format!("surface {} has nonpositive area", v.id));
                    }
                }
                FixedKind::Isolated { weights: (a, b) } => {
                    if a == 0 || b == 0 || a.gcd(&b) != 1 {
                        d.push(format!("weights ({a},{b}) at vertex {} are not coprime", v.id));
                    }
                    let ok_signs = if v.moment == lo {
                        a > 0 && b > 0
                    } else if v.moment == hi {
                        a < 0 && b < 0
                    } else {
                        (a > 0) != (b > 0)
                    };
                    if !ok_signs {
                        d.push(format!("weights ({a},{b}) have the wrong signs at vertex {}", v.id));
                    }
                    let mut want: Vec<i64> = self
                        .incident(v.id)
                        .map(|e| if e.north == v.id { -(e.k as i64) } else { e.k as i64 })
                        .collect();
                    let mut have: Vec<i64> = [a, b].into_iter().filter(|w| w.abs() >= 2).collect();
                    want.sort_unstable();
                    have.sort_unstable();
                    if want != have {
                        d.push(format!("weights ({a},{b}) at vertex {} do not match its edges", v.id));
                    }
                }
            }
        }
        Validation { ok: d.is_empty(), diagnostics: d }
    }

    fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        match v.diagnostics.into_iter().next() {
            None => Ok(()),
            Some(msg) => Err(Error::Precondition(format!("invalid graph: {msg}"))),
        }
    }

    pub fn can_blow_up(&self, id: usize, delta: &Q) -> Result<Feasibility> {
        let p = self.component(id)?;
        if !delta.is_positive() {
            return Err(Error::Precondition("blow-up size must be positive".into()));
        }
        let (lo, hi) = (self.min_moment(), self.max_moment());
        let no = |reason: String| Ok(Feasibility { ok: false, reason });
        match &p.kind {
            FixedKind::Surface { area, .. } => {
                if area <= delta {
                    return no(format!("surface area {area} is not above {delta}"));
                }
                // the new fixed point must land strictly inside the moment image
                if &hi - &lo <= *delta {
                    return no(format!("moment width {} is not above {delta}", &hi - &lo));
                }
            }
            FixedKind::Isolated { .. } => {
                if let Some(e) = self.incident(id).find(|e| e.area <= *delta) {
                    return no(format!("Z_{}-sphere {}-{} has area {} not above {delta}", e.k, e.north, e.south, e.area));
                }
                if p.moment != lo && p.moment != hi {
                    if !(lo < &p.moment - delta && &p.moment + delta < hi) {
                        return no(format!("interior point at {} is within {delta} of an extremum", p.moment));
                    }
                } else if let Some(q) = self.vertices.iter().find(|q| q.id != id && (&q.moment - &p.moment).abs() <= *delta) {
                    return no(format!("fixed component {} is within {delta} of the extremal point", q.id));
                }
            }
        }
        Ok(Feasibility { ok: true, reason: String::from("feasible") })
    }

    pub fn blow_up(&self, id: usize, delta: &Q) -> Result<S1Graph> {
        let f = self.can_blow_up(id, delta)?;
        if !f.ok {
            return Err(Error::Infeasible(f.reason));
        }
        let p = self.component(id)?.clone();
        let lo = self.min_moment();
        let fresh = self.vertices.iter().map(|v| v.id).max().unwrap_or(0) + 1;
        let mut g = self.clone();
        let pos = g.vertices.iter().position(|v| v.id == id).expect("component exists");
        match p.kind {
            FixedKind::Surface { genus, area } => {
                let step = if p.moment == lo { delta.clone() } else { -delta.clone() };
                g.vertices[pos] = FixedComponent::surface(id, p.moment.clone(), genus, &area - delta);
                g.vertices.push(FixedComponent::isolated(fresh, &p.moment + step, (1, -1)));
            }
            FixedKind::Isolated { weights } => {
                let (m, n) = sorted_pair(weights);
                if m == n {
                    // (1,1) or (−1,−1): the exceptional sphere is fixed
                    let step = if m > 0 { delta.clone() } else { -delta.clone() };
                    g.vertices[pos] = FixedComponent::surface(id, &p.moment + step, 0, delta.clone());
                } else {
                    let low = FixedComponent::isolated(id, &p.moment + delta * qi(n), (n, m - n));
                    let high = FixedComponent::isolated(fresh, &p.moment + delta * qi(m), (m, n - m));
                    g.vertices[pos] = low;
                    g.vertices.push(high);
                    for e in g.edges.iter_mut() {
                        if e.north != id && e.south != id {
                            continue;
                        }
                        let w = if e.north == id { -(e.k as i64) } else { e.k as i64 };
                        if w == m {
                            if e.north == id {
                                e.north = fresh;
                            } else {
                                e.south = fresh;
                            }
                        }
                        e.area = &e.area - delta;
                    }
                    if m - n >= 2 {
                        g.edges.push(GraphEdge { north: fresh, south: id, k: (m - n) as u64, area: delta.clone() });
                    }
                }
            }
        }
        debug_assert!(g.validate().ok, "{:?}", g.validate());
        Ok(g)
    }

    /// Criterion for the action to extend to a toric one: genus-zero fixed
    /// surfaces and at most two non-free orbits on every interior level.
    pub fn extends_to_toric(&self) -> bool {
        if self.vertices.iter().all(|v| matches!(v.kind, FixedKind::Isolated { .. })) {
            return true;
        }
        if self.vertices.iter().any(|v| matches!(v.kind, FixedKind::Surface { genus, .. } if genus > 0)) {
            return false;
        }
        let (lo, hi) = (self.min_moment(), self.max_moment());
        let mut levels: Vec<Q> = self.vertices.iter().map(|v| v.moment.clone()).collect();
        levels.sort();
        levels.dedup();
        let moment = |id: usize| self.component(id).map(|v| v.moment.clone()).unwrap_or_else(|_| Q::zero());
        let crossing = |t: &Q| {
            self.edges.iter().filter(|e| moment(e.south) < *t && *t < moment(e.north)).count()
        };
        let mut probes: Vec<Q> = levels.windows(2).map(|w| (&w[0] + &w[1]) / qi(2)).collect();
        probes.extend(levels.iter().filter(|t| **t != lo && **t != hi).cloned());
        probes.iter().all(|t| {
            let points = self.vertices.iter().filter(|v| v.moment == *t).count();
            points + crossing(t) <= 2
        })
    }

    fn oriented(&self, flip: bool) -> S1Graph {
        let (lo, hi) = (self.min_moment(), self.max_moment());
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let moment = if flip { &hi - &v.moment } else { &v.moment - &lo };
                let kind = match &v.kind {
                    FixedKind::Isolated { weights: (a, b) } => {
                        let w = if flip { (-a, -b) } else { (*a, *b) };
                        FixedKind::Isolated { weights: sorted_pair(w) }
                    }
                    s => s.clone(),
                };
                FixedComponent { id: v.id, moment, kind }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let (north, south) = if flip { (e.south, e.north) } else { (e.north, e.south) };
                GraphEdge { north, south, k: e.k, area: e.area.clone() }
            })
            .collect();
        S1Graph { vertices, edges }
    }

    fn relabelled(&self, order: &[usize]) -> S1Graph {
        let mut new_id = BTreeMap::new();
        for (pos, &i) in order.iter().enumerate() {
            new_id.insert(self.vertices[i].id, pos);
        }
        let vertices = order
            .iter()
            .enumerate()
            .map(|(pos, &i)| FixedComponent { id: pos, ..self.vertices[i].clone() })
            .collect();
        let mut edges: Vec<GraphEdge> = self
            .edges
            .iter()
            .map(|e| GraphEdge { north: new_id[&e.north], south: new_id[&e.south], ..e.clone() })
            .collect();
        edges.sort();
        S1Graph { vertices, edges }
    }

    /// Least relabelling: colour refinement fixes most of the order, ties
    /// are resolved by trying every permutation inside each colour class.
    fn least_labelling(&self) -> S1Graph {
        let n = self.vertices.len();
        let index: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let base: Vec<(Q, FixedKind)> = self.vertices.iter().map(|v| (v.moment.clone(), v.kind.clone())).collect();
        let mut colour = rank(&base);
        loop {
            let sig: Vec<(usize, Vec<(bool, u64, Q, usize)>)> = (0..n)
                .map(|i| {
                    let id = self.vertices[i].id;
                    let mut nb: Vec<(bool, u64, Q, usize)> = self
                        .incident(id)
                        .map(|e| {
                            let north = e.north == id;
                            let other = if north { e.south } else { e.north };
                            (north, e.k, e.area.clone(), colour[index[&other]])
                        })
                        .collect();
                    nb.sort();
                    (colour[i], nb)
                })
                .collect();
            let next = rank(&sig);
            let before = colour.iter().max().copied().unwrap_or(0);
            let after = next.iter().max().copied().unwrap_or(0);
            colour = next;
            if after == before {
                break;
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, c) in colour.iter().enumerate() {
            classes.entry(*c).or_default().push(i);
        }
        let groups: Vec<Vec<usize>> = classes.into_values().collect();
        let total: usize = groups.iter().map(|g| (1..=g.len()).product::<usize>()).fold(1, |a, b| a.saturating_mul(b));
        let mut best: Option<S1Graph> = None;
        if total > 40_320 {
            let order: Vec<usize> = groups.concat();
            return self.relabelled(&order);
        }
        let mut perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();
        let mut choice = vec![0usize; perms.len()];
        loop {
            let order: Vec<usize> = choice.iter().zip(&perms).flat_map(|(&c, p)| p[c].iter().copied()).collect();
            let cand = self.relabelled(&order);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
            let mut i = 0;
            while i < choice.len() && choice[i] + 1 == perms[i].len() {
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
            choice[i] += 1;
        }
        perms.clear();
        best.expect("at least one labelling")
    }

    /// Representative of the class under translations and the flip
    /// `μ ↦ −μ`, with vertex ids `0..n` in canonical order.
    pub fn canonical_form(&self) -> S1Graph {
        let a = self.oriented(false).least_labelling();
        let b = self.oriented(true).least_labelling();
        if a <= b {
            a
        } else {
            b
        }
    }
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).expect("present")).collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Restriction of a toric action to the circle generated by `ξ`.
pub fn graph_from_polygon(p: &RationalPolygon, xi: [i64; 2]) -> Result<S1Graph> {
    if xi[0].gcd(&xi[1]) != 1 {
        return Err(Error::Precondition(format!("ξ = ({}, {}) is not primitive", xi[0], xi[1])));
    }
    if !p.is_delzant().ok {
        return Err(Error::Precondition("polygon is not Delzant".into()));
    }
    let edges = p.edges();
    let n = edges.len();
    let pair = |d: [i64; 2]| d[0] * xi[0] + d[1] * xi[1];
    let moment = |i: usize| {
        let v = &p.vertices()[i];
        &v.x * qi(xi[0]) + &v.y * qi(xi[1])
    };
    let mut vertex_of = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for (j, e) in edges.iter().enumerate() {
        if pair(e.direction) == 0 {
            let id = vertices.len();
            vertices.push(FixedComponent::surface(id, moment(j), 0, e.length.clone()));
            vertex_of[j] = id;
            vertex_of[(j + 1) % n] = id;
        }
    }
    for i in 0..n {
        if vertex_of[i] == usize::MAX {
            let out = edges[i].direction;
            let back = edges[(i + n - 1) % n].direction;
            let id = vertices.len();
            vertices.push(FixedComponent::isolated(id, moment(i), (pair(out), -pair(back))));
            vertex_of[i] = id;
        }
    }
    let mut gedges = Vec::new();
    for (j, e) in edges.iter().enumerate() {
        let w = pair(e.direction);
        if w.abs() >= 2 {
            let (a, b) = (vertex_of[j], vertex_of[(j + 1) % n]);
            let (north, south) = if w > 0 { (b, a) } else { (a, b) };
            gedges.push(GraphEdge { north, south, k: w.unsigned_abs(), area: e.length.clone() });
        }
    }
    Ok(S1Graph { vertices, edges: gedges })
}

/// The circle rotating the fibres of a ruled surface over a genus-`g`
/// base: two fixed sections at moments `0` and `fiber`. Sections of degree
/// `±degree` have areas `μ − ⌊degree/2⌋·fiber` and that plus
/// `degree·fiber`, where `μ` is the area of the section `B`.
pub fn ruled_base_graph(genus: u32, degree: u32, mu: &Q, fiber: &Q, twisted: bool) -> Result<S1Graph> {
    if (degree % 2 == 1) != twisted {
        return Err(Error::Precondition(format!(
            "degree {degree} has the wrong parity for the {} bundle",
            if twisted { "twisted" } else { "trivial" }
        )));
    }
    if !fiber.is_positive() || !mu.is_positive() {
        return Err(Error::Precondition("areas must be positive".into()));
    }
    let bottom = mu - fiber * qi(i64::from(degree / 2));
    if !bottom.is_positive() {
        return Err(Error::SectionAreaNonpositive(format!("degree {degree} section would have area {bottom}")));
    }
    let top = &bottom + fiber * qi(i64::from(degree));
    Ok(S1Graph {
        vertices: vec![
            FixedComponent::surface(0, Q::zero(), genus, bottom),
            FixedComponent::surface(1, fiber.clone(), genus, top),
        ],
        edges: Vec::new(),
    })
}

/// All admissible base graphs of one bundle type, by increasing degree.
pub fn ruled_base_graphs(genus: u32, mu: &Q, fiber: &Q, twisted: bool) -> Vec<(u32, S1Graph)> {
    let mut d = u32::from(twisted);
    let mut out = Vec::new();
    while let Ok(g) = ruled_base_graph(genus, d, mu, fiber, twisted) {
        out.push((d, g));
        d += 2;
    }
    out
}

/// Blow-ups at every feasible component, one per canonical class, with the
/// first vertex id producing each.
pub fn equivariant_blowups_with_vertices(g: &S1Graph, delta: &Q) -> Result<Vec<(usize, S1Graph)>> {
    g.require_valid()?;
    let mut seen: BTreeMap<S1Graph, usize> = BTreeMap::new();
    for v in &g.vertices {
        if g.can_blow_up(v.id, delta)?.ok {
            seen.entry(g.blow_up(v.id, delta)?.canonical_form()).or_insert(v.id);
        }
    }
    Ok(seen.into_iter().map(|(h, v)| (v, h)).collect())
}

pub fn enumerate_equivariant_blowups(g: &S1Graph, delta: &Q) -> Result<Vec<S1Graph>> {
    Ok(equivariant_blowups_with_vertices(g, delta)?.into_iter().map(|(_, h)| h).collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::polygon::tests::{arb_unimodular, corpus, square};
    use crate::polygon::{delzant_triangle, hirzebruch};
    use crate::rational::q;
    use proptest::prelude::*;

    fn iso(id: usize, m: Q, w: (i64, i64)) -> FixedComponent {
        FixedComponent::isolated(id, m, w)
    }

    #[test]
    fn projections_of_the_square() {
        let g = graph_from_polygon(&square(), [0, 1]).unwrap();
        assert!(g.validate().ok);
        assert_eq!(g.vertices.len(), 2);
        assert!(g.vertices.iter().all(|v| matches!(v.kind, FixedKind::Surface { genus: 0, ref area } if *area == qi(1))));
        let mut ms: Vec<Q> = g.vertices.iter().map(|v| v.moment.clone()).collect();
        ms.sort();
        assert_eq!(ms, vec![qi(0), qi(1)]);
        let g = graph_from_polygon(&square(), [1, 1]).unwrap();
        assert!(g.validate().ok, "{:?}", g.validate());
        let mut ms: Vec<Q> = g.vertices.iter().map(|v| v.moment.clone()).collect();
        ms.sort();
        assert_eq!(ms, vec![qi(0), qi(1), qi(1), qi(2)]);
        assert!(g.edges.is_empty());
        assert!(graph_from_polygon(&square(), [2, 2]).is_err());
    }

    #[test]
    fn projection_with_a_z2_sphere() {
        let h = hirzebruch(&qi(2), &qi(1), 2).unwrap();
        let g = graph_from_polygon(&h, [1, 0]).unwrap();
        assert!(g.validate().ok, "{:?}", g.validate());
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].k, 2);
        assert_eq!(g.edges[0].area, qi(1));
    }

    #[test]
    fn validation_catches_violations() {
        let mut g = ruled_base_graph(0, 0, &qi(1), &qi(1), false).unwrap();
        assert!(g.validate().ok);
        g.vertices.push(iso(2, q(1, 2), (1, -1)));
        g.edges.push(GraphEdge { north: 1, south: 2, k: 2, area: q(1, 4) });
        assert!(!g.validate().ok);
        let bad = S1Graph::new(vec![iso(0, qi(0), (2, 4)), iso(1, qi(1), (-1, -1))], vec![]);
        assert!(bad.validate().diagnostics.iter().any(|d| d.contains("coprime")));
    }

    #[test]
    fn ruled_bases() {
        let g = ruled_base_graph(2, 0, &q(5, 2), &qi(1), false).unwrap();
        let areas: Vec<_> = g.vertices.iter().map(|v| v.kind.clone()).collect();
        assert_eq!(areas, vec![FixedKind::Surface { genus: 2, area: q(5, 2) }; 2]);
        let g = ruled_base_graph(2, 2, &q(5, 2), &qi(1), false).unwrap();
        let areas: Vec<_> = g.vertices.iter().map(|v| v.kind.clone()).collect();
        assert_eq!(areas, vec![FixedKind::Surface { genus: 2, area: q(3, 2) }, FixedKind::Surface { genus: 2, area: q(7, 2) }]);
        assert!(matches!(ruled_base_graph(2, 6, &q(5, 2), &qi(1), false), Err(Error::SectionAreaNonpositive(_))));
        assert_eq!(ruled_base_graphs(2, &q(5, 2), &qi(1), false).len(), 3);
        assert!(ruled_base_graph(2, 1, &q(5, 2), &qi(1), false).is_err());
    }

    #[test]
    fn feasibility_conditions() {
        // fibre area 3 so that the surface condition is the binding one
        let g = ruled_base_graph(2, 0, &q(5, 2), &qi(3), false).unwrap();
        assert!(g.can_blow_up(0, &qi(2)).unwrap().ok);
        assert!(!g.can_blow_up(0, &q(5, 2)).unwrap().ok);
        // with fibre area 1 a ball of capacity 2 does not fit
        let g1 = ruled_base_graph(2, 0, &q(5, 2), &qi(1), false).unwrap();
        assert!(!g1.can_blow_up(0, &qi(2)).unwrap().ok);
        assert!(matches!(g.can_blow_up(9, &qi(1)), Err(Error::UnknownVertex(9))));

        let line = S1Graph::new(
            vec![iso(0, qi(0), (1, 1)), iso(1, qi(1), (1, -1)), iso(2, qi(3), (-1, -1))],
            vec![],
        );
        assert!(!line.can_blow_up(1, &qi(1)).unwrap().ok);
        assert!(line.can_blow_up(1, &q(1, 2)).unwrap().ok);
        let near = S1Graph::new(
            vec![iso(0, qi(0), (1, 1)), iso(1, q(1, 2), (1, -1)), iso(2, qi(3), (-1, -1))],
            vec![],
        );
        assert!(near.can_blow_up(0, &q(1, 3)).unwrap().ok);
        assert!(!near.can_blow_up(0, &q(1, 2)).unwrap().ok);
    }

    #[test]
    fn blow_up_cases() {
        let line = S1Graph::new(
            vec![iso(0, qi(0), (1, 1)), iso(1, qi(1), (1, -1)), iso(2, qi(2), (-1, -1))],
            vec![],
        );
        let a = line.blow_up(1, &q(1, 4)).unwrap();
        assert!(a.validate().ok);
        let at = |m: Q| a.vertices.iter().find(|v| v.moment == m).unwrap().clone();
        assert_eq!(at(q(3, 4)).weights(), Some((-1, 2)));
        assert_eq!(at(q(5, 4)).weights(), Some((1, -2)));
        assert_eq!(a.edges.len(), 1);
        assert_eq!((a.edges[0].k, a.edges[0].area.clone()), (2, q(1, 4)));

        let b = line.blow_up(2, &q(1, 3)).unwrap();
        let top = b.vertices.iter().find(|v| v.id == 2).unwrap();
        assert_eq!(top.moment, q(5, 3));
        assert_eq!(top.kind, FixedKind::Surface { genus: 0, area: q(1, 3) });

        let r = ruled_base_graph(1, 0, &qi(2), &qi(1), false).unwrap();
        let c = r.blow_up(0, &q(1, 3)).unwrap();
        assert!(c.validate().ok);
        assert_eq!(c.vertices[0].kind, FixedKind::Surface { genus: 1, area: q(5, 3) });
        assert_eq!(c.vertices[2].moment, q(1, 3));
        assert_eq!(c.vertices[2].weights(), Some((1, -1)));
    }

    #[test]
    fn extension_criterion() {
        for p in corpus() {
            for e in p.edges() {
                for s in [1, -1] {
                    let g = graph_from_polygon(&p, [s * e.normal[0], s * e.normal[1]]).unwrap();
                    assert!(g.validate().ok, "{:?}", g.validate());
                    assert!(g.extends_to_toric());
                }
            }
        }
        assert!(!ruled_base_graph(2, 0, &q(5, 2), &qi(1), false).unwrap().extends_to_toric());
        // three Z_k-spheres across one level between two spheres of fixed points
        let crowded = S1Graph::with_derived_areas(
            vec![
                FixedComponent::surface(0, qi(0), 0, qi(5)),
                iso(1, qi(1), (2, -1)),
                iso(2, qi(1), (3, -1)),
                iso(3, qi(1), (5, -1)),
                iso(4, qi(11), (1, -2)),
                iso(5, qi(7), (1, -3)),
                iso(6, qi(16), (1, -5)),
                FixedComponent::surface(7, qi(20), 0, qi(5)),
            ],
            &[(4, 1, 2), (5, 2, 3), (6, 3, 5)],
        )
        .unwrap();
        assert!(!crowded.extends_to_toric());
    }

    #[test]
    fn canonical_examples() {
        let g = graph_from_polygon(&hirzebruch(&qi(3), &qi(1), 1).unwrap(), [1, 2]).unwrap();
        let c = g.canonical_form();
        let mut t = g.clone();
        for v in t.vertices.iter_mut() {
            v.moment += qi(7);
        }
        assert_eq!(t.canonical_form(), c);
        assert_eq!(g.oriented(true).canonical_form(), c);
        assert_eq!(c.canonical_form(), c);
        let h = hirzebruch(&qi(2), &qi(1), 2).unwrap();
        assert_eq!(
            graph_from_polygon(&h, [0, 1]).unwrap().canonical_form(),
            graph_from_polygon(&h, [0, -1]).unwrap().canonical_form()
        );
    }

    #[test]
    fn blowup_enumeration() {
        let g = ruled_base_graph(2, 0, &q(5, 2), &qi(1), false).unwrap();
        assert_eq!(enumerate_equivariant_blowups(&g, &q(1, 2)).unwrap().len(), 1);
        let g = ruled_base_graph(2, 2, &q(5, 2), &qi(1), false).unwrap();
        assert_eq!(enumerate_equivariant_blowups(&g, &q(1, 2)).unwrap().len(), 2);
        assert!(enumerate_equivariant_blowups(&g, &qi(9)).unwrap().is_empty());
        // CP² with four fixed points along ξ = (1, 2): moments 0, 1, 2 after normalising
        let cp2 = graph_from_polygon(&delzant_triangle(&qi(1)).unwrap(), [1, 2]).unwrap();
        let n = enumerate_equivariant_blowups(&cp2, &q(1, 10)).unwrap().len();
        let flip_classes = {
            let mut set = alloc::collections::BTreeSet::new();
            for v in &cp2.vertices {
                set.insert(cp2.blow_up(v.id, &q(1, 10)).unwrap().canonical_form());
            }
            set.len()
        };
        assert_eq!(n, flip_classes);
        // the graph is symmetric under the flip, so the two extremal blow-ups agree
        assert_eq!(n, 2);
    }

    pub(crate) fn base_graphs() -> Vec<S1Graph> {
        let mut out = Vec::new();
        for p in corpus() {
            for xi in [[1, 0], [0, 1], [1, 1], [1, -1], [2, 1], [1, 3]] {
                out.push(graph_from_polygon(&p, xi).unwrap());
            }
        }
        for g in [1, 2] {
            for t in [false, true] {
                out.extend(ruled_base_graphs(g, &q(7, 2), &qi(2), t).into_iter().map(|(_, h)| h));
            }
        }
        out
    }

    fn translate_flip(g: &S1Graph, shift: &Q, flip: bool, rot: usize) -> S1Graph {
        let mut h = if flip { g.oriented(true) } else { g.clone() };
        for v in h.vertices.iter_mut() {
            v.moment += shift;
            if let FixedKind::Isolated { weights: (a, b) } = v.kind {
                v.kind = FixedKind::Isolated { weights: (b, a) };
            }
        }
        // relabel ids and shuffle storage order
        let n = h.vertices.len();
        for v in h.vertices.iter_mut() {
            v.id = (v.id + rot) % (n + 3) + 100;
        }
        for e in h.edges.iter_mut() {
            e.north = (e.north + rot) % (n + 3) + 100;
            e.south = (e.south + rot) % (n + 3) + 100;
        }
        h.vertices.rotate_left(rot % n);
        h.edges.reverse();
        h
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn canonical_form_is_invariant(idx in 0usize..1000, sn in -50i64..50, sd in 1i64..9, flip: bool, rot in 0usize..7) {
            let bases = base_graphs();
            let g = &bases[idx % bases.len()];
            let c = g.canonical_form();
            prop_assert_eq!(translate_flip(g, &q(sn, sd), flip, rot).canonical_form(), c.clone());
            prop_assert_eq!(c.canonical_form(), c);
        }

        #[test]
        fn projection_is_equivariant(gmap in arb_unimodular(), idx in 0usize..1000, xi_i in 0usize..4) {
            let corpus = corpus();
            let p = &corpus[idx % corpus.len()];
            let xi = [[1, 0], [0, 1], [1, 1], [2, -1]][xi_i];
            let moved = p.transform(&gmap);
            let a = graph_from_polygon(p, xi).unwrap().canonical_form();
            let b = graph_from_polygon(&moved, gmap.dual_vector(xi)).unwrap().canonical_form();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn blow_ups_keep_graphs_valid(idx in 0usize..1000, picks in proptest::collection::vec((0usize..16, 1i64..6), 1..12)) {
            let bases = base_graphs();
            let mut g = bases[idx % bases.len()].clone();
            for (v, s) in picks {
                let id = g.vertices[v % g.vertices.len()].id;
                let d = q(s, 97);
                if !g.can_blow_up(id, &d).unwrap().ok {
                    continue;
                }
                let before: Vec<i64> = outside_weights(&g, id);
                let h = g.blow_up(id, &d).unwrap();
                prop_assert!(h.validate().ok, "{:?}", h.validate());
                for e in &h.edges {
                    let dm = &h.component(e.north).unwrap().moment - &h.component(e.south).unwrap().moment;
                    prop_assert_eq!(dm, &e.area * qi(e.k as i64));
                }
                if let Some((m, n)) = g.component(id).unwrap().weights() {
                    if m != n {
                        // weights seen from outside the new sphere are the old ones
                        let fresh = h.vertices.iter().map(|v| v.id).max().unwrap();
                        let mut after = vec![h.component(id).unwrap().weights().unwrap().0, h.component(fresh).unwrap().weights().unwrap().0];
                        after.sort_unstable();
                        let mut b = before.clone();
                        b.sort_unstable();
                        prop_assert_eq!(after, b);
                    }
                }
                g = h;
            }
        }
    }

    fn outside_weights(g: &S1Graph, id: usize) -> Vec<i64> {
        match g.component(id).unwrap().weights() {
            Some((a, b)) => vec![a, b],
            None => vec![],
        }
    }
}
