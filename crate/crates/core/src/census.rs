//! Counting maximal tori for a blow-up recipe.
//!
//! The recipe is first reduced along a chain of minimal blow-downs to a
//! minimal model. Toric actions on the model are blown up stage by stage
//! with the chain's capacities and deduplicated by canonical form. Circle
//! actions follow the same stages, seeded by the fibrewise circle on an
//! irrational ruled base and by the circles of every toric stage that fix a
//! sphere; at the end those that extend to a toric action are dropped.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::graph::{equivariant_blowups_with_vertices as graph_blowups, graph_from_polygon, ruled_base_graph, ruled_base_graphs, S1Graph};
use crate::lattice::{exceptional_areas_positive, first_minimal_blowdown_chain, to_rational, BasisKind, BlowdownChain, SymplecticData};
use crate::polygon::{delzant_triangle, equivariant_blowups_with_vertices, hirzebruch_family, RationalPolygon};
use crate::rational::{fmt_q, qi, Q};
use crate::Result;

pub const NO_TORIC_NOTE: &str = "irrational base: no toric actions";
pub const CASE_ANALYSIS_NOTE: &str = "case-analysis regime: some capacity exceeds λ/3 with 4 to 8 blow-ups";
pub const UNCERTIFIED_NOTE: &str = "outside certified regime: exceptional classes are not certified beyond 8 blow-ups";

/// A minimal model. For ruled surfaces `a` is the width of the Hirzebruch
/// trapezoid: the area of `B` in the product case and the mean of the two
/// section areas `μ_B + fiber/2` in the twisted case.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    ProjectivePlane { lambda: Q },
    ProductRuled { genus: u32, a: Q, fiber: Q },
    TwistedRuled { genus: u32, a: Q, fiber: Q },
}

impl Base {
    pub fn genus(&self) -> u32 {
        match self {
            Base::ProjectivePlane { .. } => 0,
            Base::ProductRuled { genus, .. } | Base::TwistedRuled { genus, .. } => *genus,
        }
    }

    pub fn is_irrational(&self) -> bool {
        self.genus() > 0
    }

    pub fn to_symplectic(&self, capacities: Vec<Q>) -> Result<SymplecticData> {
        match self {
            Base::ProjectivePlane { lambda } => SymplecticData::rational(lambda.clone(), capacities),
            Base::ProductRuled { genus, a, fiber } => SymplecticData::product_ruled(*genus, a.clone(), fiber.clone(), capacities),
            Base::TwistedRuled { genus, a, fiber } => {
                let mu = a - fiber / qi(2);
                if !mu.is_positive() {
                    return Err(Error::Precondition(format!("twisted width {a} must exceed half the fibre {fiber}")));
                }
                SymplecticData::twisted_ruled(*genus, mu, fiber.clone(), capacities)
            }
        }
    }

    /// The model of data with no blow-ups.
    pub fn from_minimal(data: &SymplecticData) -> Result<Base> {
        if data.k() != 0 {
            return Err(Error::Precondition(format!("{} is not minimal", data.basis())));
        }
        let b = data.basis();
        let ar = data.base_areas();
        Ok(match b.kind {
            BasisKind::Rational => Base::ProjectivePlane { lambda: ar[0].clone() },
            BasisKind::ProductRuled => Base::ProductRuled { genus: b.genus, a: ar[0].clone(), fiber: ar[1].clone() },
            BasisKind::TwistedRuled => {
                Base::TwistedRuled { genus: b.genus, a: &ar[0] + &ar[1] / qi(2), fiber: ar[1].clone() }
            }
        })
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::ProjectivePlane { lambda } => write!(f, "CP2({lambda})"),
            Base::ProductRuled { genus, a, fiber } => write!(f, "ProductRuled({genus}, {a}, {fiber})"),
            Base::TwistedRuled { genus, a, fiber } => write!(f, "TwistedRuled({genus}, {a}, {fiber})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ManifoldSpec {
    pub base: Base,
    pub capacities: Vec<Q>,
}

impl ManifoldSpec {
    pub fn new(base: Base, capacities: Vec<Q>) -> Self {
        ManifoldSpec { base, capacities }
    }

    pub fn cp2(lambda: Q, capacities: Vec<Q>) -> Self {
        Self::new(Base::ProjectivePlane { lambda }, capacities)
    }

    /// CP²(1) blown up `k` times with capacity `delta`.
    pub fn equal_blowups(k: usize, delta: &Q) -> Self {
        Self::cp2(Q::one(), alloc::vec![delta.clone(); k])
    }

    /// Checks positivity, ordering, volume and that every exceptional class
    /// has positive area, and returns the lattice data.
    pub fn validate(&self) -> Result<SymplecticData> {
        let data = self.base.to_symplectic(self.capacities.clone())?;
        exceptional_areas_positive(&data)?;
        Ok(data)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolygonProvenance {
    /// Index into the sorted base toric actions of the model.
    pub base: usize,
    /// Vertex (of the canonical polygon at that stage) and capacity.
    pub steps: Vec<(usize, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphSeed {
    /// The fibrewise circle on a ruled model with sections of this degree.
    Ruled { degree: u32 },
    /// The circle with `ξ` the normal of `edge` of a toric stage polygon.
    Subcircle { polygon: PolygonProvenance, edge: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphProvenance {
    pub seed: GraphSeed,
    /// Vertex id (of the canonical graph at that stage) and capacity.
    pub steps: Vec<(usize, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricEntry {
    pub polygon: RationalPolygon,
    pub provenance: PolygonProvenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleEntry {
    pub graph: S1Graph,
    pub provenance: GraphProvenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConjugacyCounts {
    pub toric: usize,
    pub maximal_circles: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusResult {
    pub spec: ManifoldSpec,
    /// Minimal model the recipe was reduced to.
    pub model: Base,
    /// Capacities used to blow the model back up, largest first.
    pub stage_capacities: Vec<Q>,
    pub toric: Vec<ToricEntry>,
    pub maximal_circles: Vec<CircleEntry>,
    /// Final-stage circle graphs that extend to toric actions.
    pub extendable_circles: Vec<S1Graph>,
    pub warnings: Vec<String>,
}

impl CensusResult {
    pub fn counts(&self) -> ConjugacyCounts {
        let (t, c) = (self.toric.len(), self.maximal_circles.len());
        ConjugacyCounts { toric: t, maximal_circles: c, total: t + c }
    }

    /// Whether some Hamiltonian circle action exists: a maximal one, or a
    /// subcircle of a toric action.
    pub fn admits_circle_action(&self) -> bool {
        !self.toric.is_empty() || !self.maximal_circles.is_empty()
    }
}

/// Runs independent jobs; implementations may parallelise but must return
/// results in input order.
pub trait Executor: Sync {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}

/// Toric actions on a minimal model, in canonical form and sorted. Empty for
/// irrational bases.
pub fn base_toric_actions(base: &Base) -> Vec<RationalPolygon> {
    let raw: Vec<RationalPolygon> = match base {
        Base::ProjectivePlane { lambda } => delzant_triangle(lambda).into_iter().collect(),
        _ if base.is_irrational() => Vec::new(),
        Base::ProductRuled { a, fiber, .. } => {
            let (a, b) = if a >= fiber { (a, fiber) } else { (fiber, a) };
            hirzebruch_family(a, b, false).into_iter().map(|(_, p)| p).collect()
        }
        Base::TwistedRuled { a, fiber, .. } => hirzebruch_family(a, fiber, true).into_iter().map(|(_, p)| p).collect(),
    };
    let mut out: Vec<RationalPolygon> = raw.iter().filter_map(|p| p.canonical().ok()).collect();
    out.sort();
    out.dedup();
    out
}

/// Fibrewise circles of an irrational ruled model, in canonical form, with
/// their section degrees.
fn base_circle_actions(base: &Base) -> Result<Vec<(u32, S1Graph)>> {
    let (genus, mu, fiber, twisted) = match base {
        Base::ProductRuled { genus, a, fiber } if *genus > 0 => (*genus, a.clone(), fiber, false),
        Base::TwistedRuled { genus, a, fiber } if *genus > 0 => (*genus, a - fiber / qi(2), fiber, true),
        _ => return Ok(Vec::new()),
    };
    Ok(ruled_base_graphs(genus, &mu, fiber, twisted).into_iter().map(|(d, g)| (d, g.canonical_form())).collect())
}

fn regime_warnings(spec: &ManifoldSpec, data: &SymplecticData) -> Result<Vec<String>> {
    let mut w = Vec::new();
    if spec.base.is_irrational() {
        w.push(String::from(NO_TORIC_NOTE));
        return Ok(w);
    }
    let rational = if data.basis().is_ruled() && data.k() > 0 { to_rational(data)?.0 } else { data.clone() };
    let k = spec.capacities.len();
    let small = match rational.lambda() {
        Some(l) => rational.capacities().iter().all(|d| d * qi(3) <= *l),
        None => true,
    };
    if !small && k >= 9 {
        w.push(String::from(UNCERTIFIED_NOTE));
    } else if !small && k >= 4 {
        w.push(String::from(CASE_ANALYSIS_NOTE));
    }
    Ok(w)
}

struct Frontier {
    polys: BTreeMap<RationalPolygon, PolygonProvenance>,
    graphs: BTreeMap<S1Graph, GraphProvenance>,
}

fn add_subcircles(graphs: &mut BTreeMap<S1Graph, GraphProvenance>, polys: &BTreeMap<RationalPolygon, PolygonProvenance>) -> Result<()> {
    for (p, prov) in polys {
        // ξ and −ξ give flipped graphs with the same canonical form
        for (j, e) in p.edges().iter().enumerate() {
            let g = graph_from_polygon(p, e.normal)?.canonical_form();
            graphs.entry(g).or_insert_with(|| GraphProvenance {
                seed: GraphSeed::Subcircle { polygon: prov.clone(), edge: j },
                steps: Vec::new(),
            });
        }
    }
    Ok(())
}

fn step<E: Executor>(f: Frontier, delta: &Q, circles: bool, exec: &E) -> Result<Frontier> {
    let items: Vec<(RationalPolygon, PolygonProvenance)> = f.polys.into_iter().collect();
    let done = exec.map(&items, |(p, _)| equivariant_blowups_with_vertices(p, delta));
    let mut polys = BTreeMap::new();
    for ((_, prov), res) in items.iter().zip(done) {
        for (v, child) in res? {
            polys.entry(child).or_insert_with(|| {
                let mut pr = prov.clone();
                pr.steps.push((v, delta.clone()));
                pr
            });
        }
    }
    let mut graphs = BTreeMap::new();
    if circles {
        let items: Vec<(S1Graph, GraphProvenance)> = f.graphs.into_iter().collect();
        let done = exec.map(&items, |(g, _)| graph_blowups(g, delta));
        for ((_, prov), res) in items.iter().zip(done) {
            for (v, child) in res? {
                graphs.entry(child).or_insert_with(|| {
                    let mut pr = prov.clone();
                    pr.steps.push((v, delta.clone()));
                    pr
                });
            }
        }
        add_subcircles(&mut graphs, &polys)?;
    }
    Ok(Frontier { polys, graphs })
}

/// Census along a given blow-down chain of the recipe.
pub fn census_along<E: Executor>(spec: &ManifoldSpec, chain: &BlowdownChain, circles: bool, exec: &E) -> Result<CensusResult> {
    let data = spec.validate()?;
    let mut warnings = regime_warnings(spec, &data)?;
    let model = Base::from_minimal(&chain.terminal)?;
    let caps = chain.capacities();
    let mut f = Frontier { polys: BTreeMap::new(), graphs: BTreeMap::new() };
    for (i, p) in base_toric_actions(&model).into_iter().enumerate() {
        f.polys.insert(p, PolygonProvenance { base: i, steps: Vec::new() });
    }
    if circles {
        for (degree, g) in base_circle_actions(&model)? {
            f.graphs.entry(g).or_insert(GraphProvenance { seed: GraphSeed::Ruled { degree }, steps: Vec::new() });
        }
        add_subcircles(&mut f.graphs, &f.polys)?;
    }
    for d in &caps {
        f = step(f, d, circles, exec)?;
    }
    let toric = f.polys.into_iter().map(|(polygon, provenance)| ToricEntry { polygon, provenance }).collect();
    let mut maximal_circles = Vec::new();
    let mut extendable_circles = Vec::new();
    for (graph, provenance) in f.graphs {
        if graph.extends_to_toric() {
            extendable_circles.push(graph);
        } else {
            maximal_circles.push(CircleEntry { graph, provenance });
        }
    }
    if model.is_irrational() && !warnings.iter().any(|w| w == NO_TORIC_NOTE) {
        warnings.push(String::from(NO_TORIC_NOTE));
    }
    Ok(CensusResult {
        spec: spec.clone(),
        model,
        stage_capacities: caps,
        toric,
        maximal_circles,
        extendable_circles,
        warnings,
    })
}

pub fn census_with<E: Executor>(spec: &ManifoldSpec, exec: &E) -> Result<CensusResult> {
    let data = spec.validate()?;
    let chain = first_minimal_blowdown_chain(&data)?;
    census_along(spec, &chain, true, exec)
}

pub fn census(spec: &ManifoldSpec) -> Result<CensusResult> {
    census_with(spec, &Sequential)
}

pub fn toric_census(spec: &ManifoldSpec) -> Result<Vec<RationalPolygon>> {
    let data = spec.validate()?;
    let chain = first_minimal_blowdown_chain(&data)?;
    let r = census_along(spec, &chain, false, &Sequential)?;
    Ok(r.toric.into_iter().map(|e| e.polygon).collect())
}

pub fn circle_census(spec: &ManifoldSpec) -> Result<Vec<S1Graph>> {
    Ok(census(spec)?.maximal_circles.into_iter().map(|e| e.graph).collect())
}

pub fn count_conjugacy_classes(spec: &ManifoldSpec) -> Result<ConjugacyCounts> {
    Ok(census(spec)?.counts())
}

/// Rebuilds a toric entry from its provenance.
pub fn replay_polygon(model: &Base, prov: &PolygonProvenance) -> Result<RationalPolygon> {
    let bases = base_toric_actions(model);
    let mut p = bases.get(prov.base).cloned().ok_or(Error::IndexOutOfRange { index: prov.base, len: bases.len() })?;
    for (v, d) in &prov.steps {
        p = p.blow_up(*v, d)?.canonical()?;
    }
    Ok(p)
}

/// Rebuilds a circle entry from its provenance.
pub fn replay_graph(model: &Base, prov: &GraphProvenance) -> Result<S1Graph> {
    let mut g = match &prov.seed {
        GraphSeed::Ruled { degree } => {
            let (genus, mu, fiber, twisted) = match model {
                Base::ProductRuled { genus, a, fiber } => (*genus, a.clone(), fiber, false),
                Base::TwistedRuled { genus, a, fiber } => (*genus, a - fiber / qi(2), fiber, true),
                Base::ProjectivePlane { .. } => return Err(Error::Precondition("CP² has no ruled seed".into())),
            };
            ruled_base_graph(genus, *degree, &mu, fiber, twisted)?.canonical_form()
        }
        GraphSeed::Subcircle { polygon, edge } => {
            let p = replay_polygon(model, polygon)?;
            let edges = p.edges();
            let e = edges.get(*edge).ok_or(Error::IndexOutOfRange { index: *edge, len: edges.len() })?;
            graph_from_polygon(&p, e.normal)?.canonical_form()
        }
    };
    for (v, d) in &prov.steps {
        g = g.blow_up(*v, d)?.canonical_form();
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub k: usize,
    /// Capacity relative to λ.
    pub delta: Q,
    /// Whether the recipe defines a symplectic manifold at all.
    pub valid: bool,
    /// `k ≤ 3` and `δ < λ/3`.
    pub toric_formula: bool,
    /// `(k−1)δ < λ`.
    pub circle_formula: bool,
    pub toric_census: Option<bool>,
    /// Some circle action exists: toric or maximal.
    pub circle_census: Option<bool>,
    pub maximal_circles: Option<usize>,
    pub warnings: Vec<String>,
    pub diagnostics: Vec<String>,
}

impl FeasibilityReport {
    pub fn toric_agrees(&self) -> Option<bool> {
        self.toric_census.map(|c| c == self.toric_formula)
    }

    pub fn circle_agrees(&self) -> Option<bool> {
        self.circle_census.map(|c| c == self.circle_formula)
    }
}

/// Closed-form existence criteria for CP² blown up with equal capacities,
/// next to what the census finds.
pub fn feasibility_report(spec: &ManifoldSpec) -> Result<FeasibilityReport> {
    let Base::ProjectivePlane { lambda } = &spec.base else {
        return Err(Error::Precondition("feasibility needs a CP² base".into()));
    };
    let k = spec.capacities.len();
    let delta = spec.capacities.first().cloned().unwrap_or_else(Q::zero);
    if spec.capacities.iter().any(|d| *d != delta) {
        return Err(Error::Precondition("feasibility needs equal capacities".into()));
    }
    let rel = &delta / lambda;
    let toric_formula = k <= 3 && rel < Q::new(1.into(), 3.into());
    let circle_formula = qi(k as i64 - 1) * &rel < Q::one();
    let mut report = FeasibilityReport {
        k,
        delta: rel,
        valid: false,
        toric_formula,
        circle_formula,
        toric_census: None,
        circle_census: None,
        maximal_circles: None,
        warnings: Vec::new(),
        diagnostics: Vec::new(),
    };
    if let Err(e) = spec.validate() {
        report.diagnostics.push(format!("{e}"));
        return Ok(report);
    }
    report.valid = true;
    let r = census(spec)?;
    report.toric_census = Some(!r.toric.is_empty());
    report.circle_census = Some(r.admits_circle_action());
    report.maximal_circles = Some(r.maximal_circles.len());
    report.warnings = r.warnings;
    for (name, agree) in [("toric", report.toric_agrees()), ("circle", report.circle_agrees())] {
        if agree == Some(false) {
            report.diagnostics.push(format!("{name} criterion disagrees with the census at k = {k}, δ = {}", fmt_q(&report.delta)));
        }
    }
    Ok(report)
}
