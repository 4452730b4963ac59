//! Wire formats. Rationals travel as `"p/q"` strings, integers of classes
//! as decimal strings; struct field order fixes the key order.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use torus_census_core::census::{
    Base, CensusResult, CircleEntry, FeasibilityReport, GraphProvenance, GraphSeed, ManifoldSpec, PolygonProvenance,
    ToricEntry,
};
use torus_census_core::graph::{FixedComponent, FixedKind, S1Graph};
use torus_census_core::lattice::{Basis, BasisKind, BlowdownChain, HomologyClass, SymplecticData, Threshold};
use torus_census_core::polygon::{DelzantCheck, Point, PolygonInvariants, RationalPolygon, UnimodularAffineMap};
use torus_census_core::rational::{fmt_q, parse_q};
use torus_census_core::{Error, Q};

use crate::CliError;

pub fn qs(x: &Q) -> String {
    fmt_q(x)
}

pub fn pq(s: &str) -> Result<Q, CliError> {
    parse_q(s).map_err(|e| CliError::Parse(e.to_string()))
}

fn pqs(v: &[String]) -> Result<Vec<Q>, CliError> {
    v.iter().map(|s| pq(s)).collect()
}

fn one() -> String {
    "1".into()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PolygonJson {
    pub vertices: Vec<[String; 2]>,
}

impl PolygonJson {
    pub fn from_polygon(p: &RationalPolygon) -> Self {
        PolygonJson { vertices: p.vertices().iter().map(|v| [qs(&v.x), qs(&v.y)]).collect() }
    }

    pub fn to_polygon(&self) -> Result<RationalPolygon, CliError> {
        let pts = self
            .vertices
            .iter()
            .map(|[x, y]| Ok(Point::new(pq(x)?, pq(y)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(RationalPolygon::new(pts)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceJson {
    pub genus: u32,
    pub area: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct VertexJson {
    pub id: usize,
    pub moment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<[i64; 2]>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub north: usize,
    pub south: usize,
    pub k: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

impl GraphJson {
    pub fn from_graph(g: &S1Graph) -> Self {
        let vertices = g
            .vertices
            .iter()
            .map(|v| {
                let (surface, weights) = match &v.kind {
                    FixedKind::Surface { genus, area } => (Some(SurfaceJson { genus: *genus, area: qs(area) }), None),
                    FixedKind::Isolated { weights: (a, b) } => (None, Some([*a, *b])),
                };
                VertexJson { id: v.id, moment: qs(&v.moment), surface, weights }
            })
            .collect();
        let edges = g.edges.iter().map(|e| EdgeJson { north: e.north, south: e.south, k: e.k }).collect();
        GraphJson { vertices, edges }
    }

    /// Sphere areas are recovered from `Δμ = k · area`.
    pub fn to_graph(&self) -> Result<S1Graph, CliError> {
        let mut vs = Vec::new();
        for v in &self.vertices {
            let moment = pq(&v.moment)?;
            let kind = match (&v.surface, v.weights) {
                (Some(s), None) => FixedKind::Surface { genus: s.genus, area: pq(&s.area)? },
                (None, Some([a, b])) => FixedKind::Isolated { weights: (a, b) },
                _ => return Err(CliError::Parse(format!("vertex {} needs exactly one of surface, weights", v.id))),
            };
            vs.push(FixedComponent { id: v.id, moment, kind });
        }
        let edges: Vec<(usize, usize, u64)> = self.edges.iter().map(|e| (e.north, e.south, e.k)).collect();
        Ok(S1Graph::with_derived_areas(vs, &edges)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseJson {
    Cp2 {
        lambda: String,
    },
    ProductRuled {
        genus: u32,
        a: String,
        #[serde(default = "one")]
        fiber: String,
    },
    TwistedRuled {
        genus: u32,
        a: String,
        #[serde(default = "one")]
        fiber: String,
    },
}

impl BaseJson {
    pub fn from_base(b: &Base) -> Self {
        match b {
            Base::ProjectivePlane { lambda } => BaseJson::Cp2 { lambda: qs(lambda) },
            Base::ProductRuled { genus, a, fiber } => BaseJson::ProductRuled { genus: *genus, a: qs(a), fiber: qs(fiber) },
            Base::TwistedRuled { genus, a, fiber } => BaseJson::TwistedRuled { genus: *genus, a: qs(a), fiber: qs(fiber) },
        }
    }

    pub fn to_base(&self) -> Result<Base, CliError> {
        Ok(match self {
            BaseJson::Cp2 { lambda } => Base::ProjectivePlane { lambda: pq(lambda)? },
            BaseJson::ProductRuled { genus, a, fiber } => Base::ProductRuled { genus: *genus, a: pq(a)?, fiber: pq(fiber)? },
            BaseJson::TwistedRuled { genus, a, fiber } => Base::TwistedRuled { genus: *genus, a: pq(a)?, fiber: pq(fiber)? },
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub base: BaseJson,
    #[serde(default)]
    pub capacities: Vec<String>,
}

impl SpecJson {
    pub fn from_spec(s: &ManifoldSpec) -> Self {
        SpecJson { base: BaseJson::from_base(&s.base), capacities: s.capacities.iter().map(qs).collect() }
    }

    pub fn to_spec(&self) -> Result<ManifoldSpec, CliError> {
        Ok(ManifoldSpec::new(self.base.to_base()?, pqs(&self.capacities)?))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisJson {
    Rational { k: usize },
    ProductRuled { genus: u32, k: usize },
    TwistedRuled { genus: u32, k: usize },
}

impl BasisJson {
    pub fn from_basis(b: Basis) -> Self {
        match b.kind {
            BasisKind::Rational => BasisJson::Rational { k: b.k },
            BasisKind::ProductRuled => BasisJson::ProductRuled { genus: b.genus, k: b.k },
            BasisKind::TwistedRuled => BasisJson::TwistedRuled { genus: b.genus, k: b.k },
        }
    }

    pub fn to_basis(self) -> Basis {
        match self {
            BasisJson::Rational { k } => Basis::rational(k),
            BasisJson::ProductRuled { genus, k } => Basis::product_ruled(genus, k),
            BasisJson::TwistedRuled { genus, k } => Basis::twisted_ruled(genus, k),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ClassJson {
    pub basis: BasisJson,
    pub coeffs: Vec<String>,
}

impl ClassJson {
    pub fn from_class(c: &HomologyClass) -> Self {
        ClassJson { basis: BasisJson::from_basis(c.basis()), coeffs: c.coeffs().iter().map(|x| x.to_string()).collect() }
    }

    pub fn to_class(&self) -> Result<HomologyClass, CliError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(|e| CliError::Parse(format!("coefficient {s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomologyClass::new(self.basis.to_basis(), coeffs)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RuledKind {
    ProductRuled,
    TwistedRuled,
}

/// Lattice data: `{"lambda", "capacities"}` over CP², or a ruled surface
/// given by the areas `mu` of `B` and `fiber` of `F`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(untagged)]
pub enum DataJson {
    Rational {
        lambda: String,
        #[serde(default)]
        capacities: Vec<String>,
    },
    Ruled {
        kind: RuledKind,
        genus: u32,
        mu: String,
        #[serde(default = "one")]
        fiber: String,
        #[serde(default)]
        capacities: Vec<String>,
    },
}

impl DataJson {
    pub fn from_data(d: &SymplecticData) -> Self {
        let b = d.basis();
        let caps = d.capacities().iter().map(qs).collect();
        let areas = d.base_areas();
        match b.kind {
            BasisKind::Rational => DataJson::Rational { lambda: qs(&areas[0]), capacities: caps },
            k => DataJson::Ruled {
                kind: if k == BasisKind::ProductRuled { RuledKind::ProductRuled } else { RuledKind::TwistedRuled },
                genus: b.genus,
                mu: qs(&areas[0]),
                fiber: qs(&areas[1]),
                capacities: caps,
            },
        }
    }

    pub fn to_data(&self) -> Result<SymplecticData, CliError> {
        Ok(match self {
            DataJson::Rational { lambda, capacities } => SymplecticData::rational(pq(lambda)?, pqs(capacities)?)?,
            DataJson::Ruled { kind: RuledKind::ProductRuled, genus, mu, fiber, capacities } => {
                SymplecticData::product_ruled(*genus, pq(mu)?, pq(fiber)?, pqs(capacities)?)?
            }
            DataJson::Ruled { kind: RuledKind::TwistedRuled, genus, mu, fiber, capacities } => {
                SymplecticData::twisted_ruled(*genus, pq(mu)?, pq(fiber)?, pqs(capacities)?)?
            }
        })
    }
}

/// Input of the lattice verbs: a recipe or raw lattice data.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum LatticeInput {
    Spec(SpecJson),
    Data(DataJson),
}

impl LatticeInput {
    pub fn to_data(&self) -> Result<SymplecticData, CliError> {
        match self {
            LatticeInput::Spec(s) => Ok(s.to_spec()?.validate()?),
            LatticeInput::Data(d) => d.to_data(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct VertexFailureJson {
    pub vertex: usize,
    pub determinant: i64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct DelzantCheckJson {
    pub ok: bool,
    pub failures: Vec<VertexFailureJson>,
}

impl DelzantCheckJson {
    pub fn from_check(c: &DelzantCheck) -> Self {
        DelzantCheckJson {
            ok: c.ok,
            failures: c.failures.iter().map(|f| VertexFailureJson { vertex: f.vertex, determinant: f.determinant }).collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct GraphCheckJson {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct MapJson {
    pub matrix: [[i64; 2]; 2],
    pub translation: [String; 2],
}

impl MapJson {
    pub fn from_map(m: &UnimodularAffineMap) -> Self {
        MapJson { matrix: m.matrix, translation: [qs(&m.translation[0]), qs(&m.translation[1])] }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CanonJson {
    pub polygon: PolygonJson,
    pub map: MapJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct InvariantsJson {
    pub edge_count: usize,
    pub b2: usize,
    pub euclidean_area: String,
    pub perimeter: String,
    pub edge_areas: Vec<String>,
    pub self_intersections: Vec<i64>,
}

impl InvariantsJson {
    pub fn from_invariants(i: &PolygonInvariants) -> Self {
        InvariantsJson {
            edge_count: i.edge_count,
            b2: i.b2,
            euclidean_area: qs(&i.euclidean_area),
            perimeter: qs(&i.perimeter),
            edge_areas: i.edge_areas.iter().map(qs).collect(),
            self_intersections: i.self_intersections.clone(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct NamedClassJson {
    pub symbol: String,
    pub coeffs: Vec<String>,
    pub area: String,
}

impl NamedClassJson {
    pub fn new(c: &HomologyClass, area: &Q) -> Self {
        NamedClassJson { symbol: c.to_string(), coeffs: c.coeffs().iter().map(|x| x.to_string()).collect(), area: qs(area) }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalJson {
    pub basis: BasisJson,
    pub bound: String,
    pub classes: Vec<NamedClassJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ChainStepJson {
    pub stage: usize,
    pub class: String,
    pub original: String,
    pub area: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ChainJson {
    pub steps: Vec<ChainStepJson>,
    pub terminal: DataJson,
    pub capacities: Vec<String>,
}

impl ChainJson {
    pub fn from_chain(c: &BlowdownChain) -> Self {
        ChainJson {
            steps: c
                .steps
                .iter()
                .map(|s| ChainStepJson {
                    stage: s.stage,
                    class: s.class.to_string(),
                    original: s.original.to_string(),
                    area: qs(&s.area),
                })
                .collect(),
            terminal: DataJson::from_data(&c.terminal),
            capacities: c.capacities().iter().map(qs).collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ChainsJson {
    pub chains: Vec<ChainJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ThresholdJson {
    pub delta0: String,
    pub binding: Vec<String>,
}

impl ThresholdJson {
    pub fn from_threshold(t: &Threshold) -> Self {
        ThresholdJson { delta0: qs(&t.delta0), binding: t.binding.iter().map(|c| c.to_string()).collect() }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct LatticeBlowdownJson {
    pub data: DataJson,
    /// Images of the old basis vectors, in old basis order.
    pub images: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct StepJson {
    pub vertex: usize,
    pub delta: String,
}

fn steps_json(steps: &[(usize, Q)]) -> Vec<StepJson> {
    steps.iter().map(|(v, d)| StepJson { vertex: *v, delta: qs(d) }).collect()
}

fn steps_back(steps: &[StepJson]) -> Result<Vec<(usize, Q)>, CliError> {
    steps.iter().map(|s| Ok((s.vertex, pq(&s.delta)?))).collect()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct PolygonProvenanceJson {
    pub base: usize,
    pub steps: Vec<StepJson>,
}

impl PolygonProvenanceJson {
    pub fn from_provenance(p: &PolygonProvenance) -> Self {
        PolygonProvenanceJson { base: p.base, steps: steps_json(&p.steps) }
    }

    pub fn to_provenance(&self) -> Result<PolygonProvenance, CliError> {
        Ok(PolygonProvenance { base: self.base, steps: steps_back(&self.steps)? })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedJson {
    Ruled { degree: u32 },
    Subcircle { polygon: PolygonProvenanceJson, edge: usize },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct GraphProvenanceJson {
    pub seed: SeedJson,
    pub steps: Vec<StepJson>,
}

impl GraphProvenanceJson {
    pub fn from_provenance(p: &GraphProvenance) -> Self {
        let seed = match &p.seed {
            GraphSeed::Ruled { degree } => SeedJson::Ruled { degree: *degree },
            GraphSeed::Subcircle { polygon, edge } => {
                SeedJson::Subcircle { polygon: PolygonProvenanceJson::from_provenance(polygon), edge: *edge }
            }
        };
        GraphProvenanceJson { seed, steps: steps_json(&p.steps) }
    }

    pub fn to_provenance(&self) -> Result<GraphProvenance, CliError> {
        let seed = match &self.seed {
            SeedJson::Ruled { degree } => GraphSeed::Ruled { degree: *degree },
            SeedJson::Subcircle { polygon, edge } => GraphSeed::Subcircle { polygon: polygon.to_provenance()?, edge: *edge },
        };
        Ok(GraphProvenance { seed, steps: steps_back(&self.steps)? })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CountsJson {
    pub toric: usize,
    pub maximal_circles: usize,
    pub total: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ToricEntryJson {
    pub polygon: PolygonJson,
    pub invariants: InvariantsJson,
    pub provenance: PolygonProvenanceJson,
}

impl ToricEntryJson {
    fn from_entry(e: &ToricEntry) -> Self {
        ToricEntryJson {
            polygon: PolygonJson::from_polygon(&e.polygon),
            invariants: InvariantsJson::from_invariants(&e.polygon.invariants()),
            provenance: PolygonProvenanceJson::from_provenance(&e.provenance),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CircleEntryJson {
    pub graph: GraphJson,
    pub provenance: GraphProvenanceJson,
}

impl CircleEntryJson {
    fn from_entry(e: &CircleEntry) -> Self {
        CircleEntryJson { graph: GraphJson::from_graph(&e.graph), provenance: GraphProvenanceJson::from_provenance(&e.provenance) }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CensusJson {
    pub spec: SpecJson,
    pub model: BaseJson,
    pub stage_capacities: Vec<String>,
    pub counts: CountsJson,
    pub toric: Vec<ToricEntryJson>,
    pub maximal_circles: Vec<CircleEntryJson>,
    pub warnings: Vec<String>,
}

impl CensusJson {
    pub fn from_result(r: &CensusResult) -> Self {
        let c = r.counts();
        CensusJson {
            spec: SpecJson::from_spec(&r.spec),
            model: BaseJson::from_base(&r.model),
            stage_capacities: r.stage_capacities.iter().map(qs).collect(),
            counts: CountsJson { toric: c.toric, maximal_circles: c.maximal_circles, total: c.total },
            toric: r.toric.iter().map(ToricEntryJson::from_entry).collect(),
            maximal_circles: r.maximal_circles.iter().map(CircleEntryJson::from_entry).collect(),
            warnings: r.warnings.clone(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CriterionJson {
    pub formula: bool,
    pub census: Option<bool>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityJson {
    pub k: usize,
    pub delta: String,
    pub valid: bool,
    pub toric: CriterionJson,
    pub circle: CriterionJson,
    pub maximal_circles: Option<usize>,
    pub warnings: Vec<String>,
    pub diagnostics: Vec<String>,
}

impl FeasibilityJson {
    pub fn from_report(r: &FeasibilityReport) -> Self {
        FeasibilityJson {
            k: r.k,
            delta: qs(&r.delta),
            valid: r.valid,
            toric: CriterionJson { formula: r.toric_formula, census: r.toric_census },
            circle: CriterionJson { formula: r.circle_formula, census: r.circle_census },
            maximal_circles: r.maximal_circles,
            warnings: r.warnings.clone(),
            diagnostics: r.diagnostics.clone(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => CliError::Parse(m),
            e => CliError::Core(e),
        }
    }
}
