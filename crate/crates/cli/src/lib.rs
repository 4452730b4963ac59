//! Command-line front end for the torus census engine.
//!
//! Every verb reads a polygon, graph or recipe (a file path, or inline JSON
//! when the argument starts with `{`), calls into the core crate and
//! renders the result as a table, JSON or SVG. [`run`] is pure apart from
//! file reads, so tests drive it directly.

use std::ffi::OsString;
use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::Serialize;

use torus_census_core::census::{census_with, feasibility_report, ManifoldSpec};
use torus_census_core::graph::{graph_from_polygon, S1Graph};
use torus_census_core::lattice::{
    blow_down, enumerate_exceptional_candidates, min_capacity_threshold, minimal_blowdown_chains_limited, HomologyClass,
    DEFAULT_SEARCH_CEILING,
};
use torus_census_core::polygon::RationalPolygon;
use torus_census_core::{Error, Q};

pub mod exec;
pub mod json;
pub mod render;

use json::*;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input; exit code 1.
    Parse(String),
    /// A precondition or regime error from the core; exit code 2.
    Core(Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "error: {m}"),
            CliError::Core(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Svg,
}

#[derive(Parser, Debug)]
#[command(name = "torus-census", version, about = "Exact census of maximal Hamiltonian torus actions on blow-ups of CP² and ruled surfaces")]
pub struct Cli {
    /// Output format; svg applies to polygon and graph results only
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Shape {
    /// Delzant polygon, as a path or inline JSON
    #[arg(long)]
    pub polygon: Option<String>,
    /// Circle action graph, as a path or inline JSON
    #[arg(long)]
    pub graph: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Delzant condition of a polygon, or validity of a graph
    Check(Shape),
    /// Canonical representative
    Canon(Shape),
    /// Edge count, b2, area, perimeter, edge areas, self-intersections
    Invariants {
        #[arg(long)]
        polygon: String,
    },
    /// Equivariant blow-up at a vertex (polygon) or fixed component (graph)
    Blowup {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        delta: String,
    },
    /// Collapse a −1 edge of a polygon, or blow down a class of a recipe
    Blowdown {
        #[arg(long, conflicts_with_all = ["spec", "class"], required_unless_present = "spec")]
        polygon: Option<String>,
        #[arg(long, requires = "polygon")]
        edge: Option<usize>,
        #[arg(long, requires = "class")]
        spec: Option<String>,
        /// Comma-separated integer coefficients in the basis of the recipe
        #[arg(long, allow_hyphen_values = true)]
        class: Option<String>,
    },
    /// Restrict a toric action to the circle generated by ξ
    Project {
        #[arg(long)]
        polygon: String,
        /// Primitive integer vector a,b
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Toric actions and maximal circle actions of a recipe
    Census {
        #[arg(long)]
        spec: String,
    },
    /// Closed-form criteria for CP² blown up k times with equal capacity δ
    Feasibility {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Exceptional classes of area at most the bound
    Exceptional {
        #[arg(long)]
        spec: String,
        /// Defaults to the largest capacity
        #[arg(long)]
        bound: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CEILING)]
        ceiling: u64,
    },
    /// Chains of minimal blow-downs to a minimal model
    Chains {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// Supremum of last capacities for which E_k alone has minimal area
    Threshold {
        #[arg(long)]
        spec: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and executes the verb.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match execute(&cli) {
            Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
            Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("{e}\n") },
        },
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code: 1, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            }
        }
    }
}

fn read_input(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Parse(format!("{arg}: {e}")))
    }
}

fn load<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    serde_json::from_str(&read_input(arg)?).map_err(|e| CliError::Parse(format!("{arg}: {e}")))
}

fn load_polygon(arg: &str) -> Result<RationalPolygon, CliError> {
    load::<PolygonJson>(arg)?.to_polygon()
}

fn load_graph(arg: &str) -> Result<S1Graph, CliError> {
    load::<GraphJson>(arg)?.to_graph()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn no_svg(what: &str) -> CliError {
    CliError::Parse(format!("svg output is only available for polygons and graphs, not {what}"))
}

fn emit_polygon(p: &RationalPolygon, f: Format) -> String {
    match f {
        Format::Table => render::polygon_table(p),
        Format::Json => to_json(&PolygonJson::from_polygon(p)),
        Format::Svg => render::polygon_svg(p),
    }
}

fn emit_graph(g: &S1Graph, f: Format) -> String {
    match f {
        Format::Table => render::graph_table(g),
        Format::Json => to_json(&GraphJson::from_graph(g)),
        Format::Svg => render::graph_svg(g),
    }
}

fn parse_xi(s: &str) -> Result<[i64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let p = |x: &str| x.parse::<i64>().map_err(|e| CliError::Parse(format!("xi {s:?}: {e}")));
            Ok([p(a)?, p(b)?])
        }
        _ => Err(CliError::Parse(format!("xi {s:?}: expected two integers a,b"))),
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<BigInt>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<BigInt>().map_err(|e| CliError::Parse(format!("class {s:?}: {e}"))))
        .collect()
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let f = cli.format;
    match &cli.verb {
        Verb::Check(shape) => {
            if f == Format::Svg {
                return Err(no_svg("check"));
            }
            if let Some(p) = &shape.polygon {
                let c = load_polygon(p)?.is_delzant();
                Ok(match f {
                    Format::Json => to_json(&DelzantCheckJson::from_check(&c)),
                    _ => render::check_table(&c),
                })
            } else {
                let v = load_graph(shape.graph.as_deref().unwrap_or_default())?.validate();
                Ok(match f {
                    Format::Json => to_json(&GraphCheckJson { ok: v.ok, diagnostics: v.diagnostics }),
                    _ => render::graph_check_table(v.ok, &v.diagnostics),
                })
            }
        }
        Verb::Canon(shape) => {
            if let Some(p) = &shape.polygon {
                let (c, m) = load_polygon(p)?.canonical_form()?;
                Ok(match f {
                    Format::Json => to_json(&CanonJson { polygon: PolygonJson::from_polygon(&c), map: MapJson::from_map(&m) }),
                    Format::Table => render::canon_table(&c, &m),
                    Format::Svg => render::polygon_svg(&c),
                })
            } else {
                let g = load_graph(shape.graph.as_deref().unwrap_or_default())?;
                Ok(emit_graph(&g.canonical_form(), f))
            }
        }
        Verb::Invariants { polygon } => {
            let i = load_polygon(polygon)?.invariants();
            match f {
                Format::Json => Ok(to_json(&InvariantsJson::from_invariants(&i))),
                Format::Table => Ok(render::invariants_table(&i)),
                Format::Svg => Err(no_svg("invariants")),
            }
        }
        Verb::Blowup { shape, vertex, delta } => {
            let d = pq(delta)?;
            if let Some(p) = &shape.polygon {
                Ok(emit_polygon(&load_polygon(p)?.blow_up(*vertex, &d)?, f))
            } else {
                let g = load_graph(shape.graph.as_deref().unwrap_or_default())?;
                Ok(emit_graph(&g.blow_up(*vertex, &d)?, f))
            }
        }
        Verb::Blowdown { polygon, edge, spec, class } => {
            if let Some(p) = polygon {
                let e = edge.ok_or_else(|| CliError::Parse("blowdown --polygon needs --edge".into()))?;
                return Ok(emit_polygon(&load_polygon(p)?.blow_down(e)?, f));
            }
            if f == Format::Svg {
                return Err(no_svg("lattice blow-downs"));
            }
            let data = load::<LatticeInput>(spec.as_deref().unwrap_or_default())?.to_data()?;
            let class = HomologyClass::new(data.basis(), parse_coeffs(class.as_deref().unwrap_or_default())?)?;
            let b = blow_down(&data, &class)?;
            Ok(match f {
                Format::Json => to_json(&LatticeBlowdownJson {
                    data: DataJson::from_data(&b.data),
                    images: b.images.iter().map(|c| c.to_string()).collect(),
                }),
                _ => render::lattice_blowdown_table(&b.data, &b.images),
            })
        }
        Verb::Project { polygon, xi } => {
            let g = graph_from_polygon(&load_polygon(polygon)?, parse_xi(xi)?)?;
            Ok(emit_graph(&g, f))
        }
        Verb::Census { spec } => {
            if f == Format::Svg {
                return Err(no_svg("census results"));
            }
            let spec = load::<SpecJson>(spec)?.to_spec()?;
            let r = census_with(&spec, &exec::RayonExecutor::from_env())?;
            Ok(match f {
                Format::Json => to_json(&CensusJson::from_result(&r)),
                _ => render::census_table(&r),
            })
        }
        Verb::Feasibility { k, delta, lambda } => {
            if f == Format::Svg {
                return Err(no_svg("feasibility reports"));
            }
            let spec = ManifoldSpec::cp2(pq(lambda)?, vec![pq(delta)?; *k]);
            let r = feasibility_report(&spec)?;
            Ok(match f {
                Format::Json => to_json(&FeasibilityJson::from_report(&r)),
                _ => render::feasibility_table(&r),
            })
        }
        Verb::Exceptional { spec, bound, ceiling } => {
            if f == Format::Svg {
                return Err(no_svg("classes"));
            }
            let data = load::<LatticeInput>(spec)?.to_data()?;
            let bound: Q = match bound {
                Some(b) => pq(b)?,
                None => data
                    .capacities()
                    .iter()
                    .max()
                    .cloned()
                    .ok_or_else(|| CliError::Parse("no capacities; pass --bound".into()))?,
            };
            let classes = enumerate_exceptional_candidates(&data, &bound, *ceiling)?
                .into_iter()
                .map(|c| {
                    let a = data.area(&c)?;
                    Ok((c, a))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(match f {
                Format::Json => to_json(&ExceptionalJson {
                    basis: BasisJson::from_basis(data.basis()),
                    bound: qs(&bound),
                    classes: classes.iter().map(|(c, a)| NamedClassJson::new(c, a)).collect(),
                }),
                _ => render::exceptional_table(&data, &classes),
            })
        }
        Verb::Chains { spec, limit } => {
            if f == Format::Svg {
                return Err(no_svg("chains"));
            }
            let data = load::<LatticeInput>(spec)?.to_data()?;
            let chains = minimal_blowdown_chains_limited(&data, *limit)?;
            Ok(match f {
                Format::Json => to_json(&ChainsJson { chains: chains.iter().map(ChainJson::from_chain).collect() }),
                _ => render::chains_table(&chains),
            })
        }
        Verb::Threshold { spec } => {
            if f == Format::Svg {
                return Err(no_svg("thresholds"));
            }
            let data = load::<LatticeInput>(spec)?.to_data()?;
            let t = min_capacity_threshold(&data)?;
            Ok(match f {
                Format::Json => to_json(&ThresholdJson::from_threshold(&t)),
                _ => render::threshold_table(&t),
            })
        }
    }
}
