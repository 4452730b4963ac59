//! Plain-text tables and SVG drawings.

use std::fmt::Write;

use num_traits::ToPrimitive;

use torus_census_core::census::{CensusResult, FeasibilityReport, GraphSeed};
use torus_census_core::graph::{FixedKind, S1Graph};
use torus_census_core::lattice::{BlowdownChain, HomologyClass, SymplecticData, Threshold};
use torus_census_core::polygon::{DelzantCheck, PolygonInvariants, RationalPolygon, UnimodularAffineMap};
use torus_census_core::Q;

use crate::json::{qs, DataJson};

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn polygon_table(p: &RationalPolygon) -> String {
    let mut s = String::new();
    writeln!(s, "polygon with {} vertices", p.len()).unwrap();
    for (i, v) in p.vertices().iter().enumerate() {
        writeln!(s, "  v{i}  ({}, {})", qs(&v.x), qs(&v.y)).unwrap();
    }
    writeln!(s, "edge  normal      length  self-intersection").unwrap();
    let selfs = p.self_intersections();
    for e in p.edges() {
        let n = format!("({},{})", e.normal[0], e.normal[1]);
        writeln!(s, "{:<5} {:<11} {:<7} {}", e.index, n, qs(&e.length), selfs[e.index]).unwrap();
    }
    s
}

pub fn check_table(c: &DelzantCheck) -> String {
    let mut s = format!("delzant: {}\n", yes(c.ok));
    for f in &c.failures {
        writeln!(s, "  vertex {}: determinant {}", f.vertex, f.determinant).unwrap();
    }
    s
}

pub fn graph_check_table(ok: bool, diagnostics: &[String]) -> String {
    let mut s = format!("valid: {}\n", yes(ok));
    for d in diagnostics {
        writeln!(s, "  {d}").unwrap();
    }
    s
}

pub fn canon_table(p: &RationalPolygon, m: &UnimodularAffineMap) -> String {
    let mut s = polygon_table(p);
    writeln!(
        s,
        "map  [[{}, {}], [{}, {}]] + ({}, {})",
        m.matrix[0][0],
        m.matrix[0][1],
        m.matrix[1][0],
        m.matrix[1][1],
        qs(&m.translation[0]),
        qs(&m.translation[1])
    )
    .unwrap();
    s
}

pub fn invariants_table(i: &PolygonInvariants) -> String {
    let mut s = String::new();
    writeln!(s, "N={}, b2={}, area={}, perimeter={}", i.edge_count, i.b2, qs(&i.euclidean_area), qs(&i.perimeter)).unwrap();
    writeln!(s, "edge areas: {}", i.edge_areas.iter().map(qs).collect::<Vec<_>>().join(",")).unwrap();
    writeln!(s, "self-intersections: {}", join(&i.self_intersections)).unwrap();
    s
}

/// Indented listing, highest moment first.
pub fn graph_table(g: &S1Graph) -> String {
    let mut s = String::new();
    let mut vs: Vec<_> = g.vertices.iter().collect();
    vs.sort_by(|a, b| b.moment.cmp(&a.moment).then(a.id.cmp(&b.id)));
    writeln!(s, "graph with {} fixed components, {} Z_k-spheres", g.vertices.len(), g.edges.len()).unwrap();
    for v in vs {
        match &v.kind {
            FixedKind::Surface { genus, area } => {
                writeln!(s, "  [{}] moment {}: surface genus {} area {}", v.id, qs(&v.moment), genus, qs(area)).unwrap()
            }
            FixedKind::Isolated { weights: (a, b) } => {
                writeln!(s, "  [{}] moment {}: point weights ({a},{b})", v.id, qs(&v.moment)).unwrap()
            }
        }
        for e in g.edges.iter().filter(|e| e.south == v.id) {
            writeln!(s, "      Z_{} sphere up to [{}], area {}", e.k, e.north, qs(&e.area)).unwrap();
        }
    }
    s
}

fn data_line(d: &SymplecticData) -> String {
    match DataJson::from_data(d) {
        DataJson::Rational { lambda, capacities } => format!("Rational(k={}) λ={} δ=[{}]", capacities.len(), lambda, capacities.join(", ")),
        DataJson::Ruled { kind, genus, mu, fiber, capacities } => format!(
            "{}(g={}, k={}) μ={} fiber={} δ=[{}]",
            if matches!(kind, crate::json::RuledKind::ProductRuled) { "ProductRuled" } else { "TwistedRuled" },
            genus,
            capacities.len(),
            mu,
            fiber,
            capacities.join(", ")
        ),
    }
}

pub fn exceptional_table(d: &SymplecticData, classes: &[(HomologyClass, Q)]) -> String {
    let mut s = format!("{}\n{} exceptional classes\n", data_line(d), classes.len());
    for (c, a) in classes {
        writeln!(s, "  {:<28} area {}", c.to_string(), qs(a)).unwrap();
    }
    s
}

pub fn chains_table(chains: &[BlowdownChain]) -> String {
    let mut s = format!("{} chain(s)\n", chains.len());
    for (i, c) in chains.iter().enumerate() {
        writeln!(s, "chain {i}: terminal {}", data_line(&c.terminal)).unwrap();
        for st in &c.steps {
            writeln!(s, "  stage {}: {} (original {}) area {}", st.stage, st.class, st.original, qs(&st.area)).unwrap();
        }
    }
    s
}

pub fn threshold_table(t: &Threshold) -> String {
    let b: Vec<String> = t.binding.iter().map(|c| c.to_string()).collect();
    format!("delta0 = {}\nbinding: {}\n", qs(&t.delta0), if b.is_empty() { "-".into() } else { b.join("; ") })
}

pub fn lattice_blowdown_table(d: &SymplecticData, images: &[HomologyClass]) -> String {
    let mut s = format!("{}\n", data_line(d));
    for (i, c) in images.iter().enumerate() {
        writeln!(s, "  basis vector {i} -> {c}").unwrap();
    }
    s
}

pub fn census_table(r: &CensusResult) -> String {
    let c = r.counts();
    let mut s = String::new();
    writeln!(s, "recipe: {} with capacities [{}]", r.spec.base, r.spec.capacities.iter().map(qs).collect::<Vec<_>>().join(", "))
        .unwrap();
    writeln!(s, "minimal model: {} blown up with [{}]", r.model, r.stage_capacities.iter().map(qs).collect::<Vec<_>>().join(", "))
        .unwrap();
    writeln!(s, "toric count: {}", c.toric).unwrap();
    writeln!(s, "maximal circle count: {}", c.maximal_circles).unwrap();
    writeln!(s, "total maximal tori: {}", c.total).unwrap();
    for w in &r.warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    for (i, e) in r.toric.iter().enumerate() {
        let inv = e.polygon.invariants();
        writeln!(
            s,
            "toric {i}: N={} area={} self-intersections {}",
            inv.edge_count,
            qs(&inv.euclidean_area),
            join(&inv.self_intersections)
        )
        .unwrap();
        writeln!(s, "  from base {} via {}", e.provenance.base, steps_line(&e.provenance.steps)).unwrap();
    }
    for (i, e) in r.maximal_circles.iter().enumerate() {
        let pts = e.graph.vertices.iter().filter(|v| matches!(v.kind, FixedKind::Isolated { .. })).count();
        writeln!(
            s,
            "circle {i}: {} fixed components ({} points), {} Z_k-spheres",
            e.graph.vertices.len(),
            pts,
            e.graph.edges.len()
        )
        .unwrap();
        let seed = match &e.provenance.seed {
            GraphSeed::Ruled { degree } => format!("ruled seed of degree {degree}"),
            GraphSeed::Subcircle { polygon, edge } => {
                format!("subcircle of edge {edge} of base {} via {}", polygon.base, steps_line(&polygon.steps))
            }
        };
        writeln!(s, "  from {seed}, then {}", steps_line(&e.provenance.steps)).unwrap();
    }
    s
}

fn steps_line(steps: &[(usize, Q)]) -> String {
    if steps.is_empty() {
        return "no blow-ups".into();
    }
    steps.iter().map(|(v, d)| format!("{v}@{}", qs(d))).collect::<Vec<_>>().join(" ")
}

pub fn feasibility_table(r: &FeasibilityReport) -> String {
    let mut s = format!("k={} δ={}\n", r.k, qs(&r.delta));
    if !r.valid {
        writeln!(s, "not a symplectic manifold").unwrap();
    }
    let census = |c: Option<bool>| c.map_or("-", yes);
    writeln!(s, "toric: {} (census: {})", yes(r.toric_formula), census(r.toric_census)).unwrap();
    writeln!(s, "circle: {} (census: {})", yes(r.circle_formula), census(r.circle_census)).unwrap();
    for w in r.warnings.iter().chain(&r.diagnostics) {
        writeln!(s, "note: {w}").unwrap();
    }
    s
}

fn f(x: &Q) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

const SIZE: f64 = 400.0;
const PAD: f64 = 20.0;

pub fn polygon_svg(p: &RationalPolygon) -> String {
    let xs: Vec<f64> = p.vertices().iter().map(|v| f(&v.x)).collect();
    let ys: Vec<f64> = p.vertices().iter().map(|v| f(&v.y)).collect();
    let (x0, x1) = (xs.iter().cloned().fold(f64::MAX, f64::min), xs.iter().cloned().fold(f64::MIN, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::MAX, f64::min), ys.iter().cloned().fold(f64::MIN, f64::max));
    let scale = (SIZE - 2.0 * PAD) / (x1 - x0).max(y1 - y0).max(1e-9);
    let tx = |x: f64| PAD + (x - x0) * scale;
    let ty = |y: f64| SIZE - PAD - (y - y0) * scale;
    let pts: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("{:.2},{:.2}", tx(*x), ty(*y))).collect();
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(s, r##"  <polygon points="{}" fill="#dde8f4" stroke="#1f3b5a" stroke-width="2"/>"##, pts.join(" ")).unwrap();
    for (e, (x, y)) in p.edges().iter().zip(xs.iter().zip(&ys)) {
        let n = p.len();
        let j = (e.index + 1) % n;
        let (mx, my) = ((tx(*x) + tx(xs[j])) / 2.0, (ty(*y) + ty(ys[j])) / 2.0);
        writeln!(s, r#"  <text x="{mx:.2}" y="{my:.2}" font-size="12">{}</text>"#, qs(&e.length)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub fn graph_svg(g: &S1Graph) -> String {
    let lo = f(&g.min_moment());
    let hi = f(&g.max_moment());
    let span = (hi - lo).max(1e-9);
    let ty = |m: f64| SIZE - PAD - (m - lo) / span * (SIZE - 2.0 * PAD);
    let mut level_count: Vec<(String, usize)> = Vec::new();
    let mut pos = std::collections::BTreeMap::new();
    let mut vs: Vec<_> = g.vertices.iter().collect();
    vs.sort_by(|a, b| a.moment.cmp(&b.moment).then(a.id.cmp(&b.id)));
    for v in &vs {
        let key = qs(&v.moment);
        let slot = match level_count.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => {
                *c += 1;
                *c - 1
            }
            None => {
                level_count.push((key, 1));
                0
            }
        };
        pos.insert(v.id, (PAD + 40.0 + 80.0 * slot as f64, ty(f(&v.moment))));
    }
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    for e in &g.edges {
        let (a, b) = (pos[&e.north], pos[&e.south]);
        writeln!(s, r##"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555"/>"##, a.0, a.1, b.0, b.1).unwrap();
        writeln!(s, r#"  <text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, (a.0 + b.0) / 2.0 + 4.0, (a.1 + b.1) / 2.0, e.k).unwrap();
    }
    for v in vs {
        let (x, y) = pos[&v.id];
        match &v.kind {
            FixedKind::Surface { genus, area } => {
                writeln!(s, r##"  <rect x="{:.2}" y="{:.2}" width="120" height="8" fill="#1f3b5a"/>"##, x - 10.0, y - 4.0).unwrap();
                writeln!(s, r#"  <text x="{:.2}" y="{:.2}" font-size="11">g={genus} A={}</text>"#, x + 115.0, y + 4.0, qs(area)).unwrap();
            }
            FixedKind::Isolated { .. } => {
                writeln!(s, r##"  <circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#1f3b5a"/>"##).unwrap();
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
