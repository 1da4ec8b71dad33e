mod plot;
mod report;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netcurv::examples::{builtin_example, parse_example_spec, EXAMPLE_NAMES};
use netcurv::format::{graph_from_json, graph_to_json};
use netcurv::{cone, curvature, model, steiner, EmbeddedGraph, Error, ModelSpace, QuadratureConfig, Vec4};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "netcurv", version, about = "Total curvature, cone densities and singularity classes of embedded graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the regularity conditions; exits 2 if any fails.
    Validate(Common),
    /// Total curvature with per-arc and per-vertex terms.
    Tc(Common),
    /// Steiner points and vertex contributions.
    Steiner {
        #[command(flatten)]
        common: Common,
        /// Restrict to one vertex.
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Cone density at an apex, by Gauss–Bonnet and by projection length.
    ConeDensity(Common),
    /// Singularity class permitted by the total curvature (Euclidean graphs).
    Classify(Common),
    /// Induced and comparison cone areas at an apex.
    ConeArea(Common),
    /// Classification with the curvature correction (curved ambients).
    CorrectedClassify {
        #[command(flatten)]
        common: Common,
        /// Objective evaluations for the extremal-area search.
        #[arg(long, default_value_t = model::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// List the built-in examples, summarize one, or write it as a graph file.
    Example {
        /// NAME or NAME:p1,p2,...
        name: Option<String>,
        /// Write the graph file (to --out, or standard output).
        #[arg(long)]
        emit: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the radial projection at an apex.
    Plot {
        #[command(flatten)]
        common: Common,
        /// SVG destination; standard output if omitted.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// View axis X,Y,Z in the apex frame (default: apex to centroid).
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        axis: Option<Coords>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Graph file.
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    input: Option<PathBuf>,
    /// Built-in example, NAME or NAME:p1,p2,...
    #[arg(long)]
    example: Option<String>,
    /// Re-embed a Euclidean graph in a model space, e.g. `spherical:1` or `hyperbolic:0.5`.
    #[arg(long)]
    lift: Option<String>,
    /// Apex X,Y,Z (in model spaces: chart coordinates, or the four embedding coordinates).
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    apex: Option<Coords>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Report destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Comma-separated coordinates.
#[derive(Clone, Debug)]
struct Coords(Vec<f64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if !(v.len() == 3 || v.len() == 4) || v.iter().any(|x| !x.is_finite()) {
        return Err("expected three (or four) finite numbers".into());
    }
    Ok(Coords(v))
}

fn parse_triple(s: &str) -> Result<Coords, String> {
    let v = parse_coords(s)?;
    if v.0.len() != 3 {
        return Err("expected three numbers".into());
    }
    Ok(v)
}

/// A failed run: exit status plus the machine-readable error.
struct Failure {
    status: u8,
    code: String,
    message: String,
    details: Option<Value>,
}

impl Failure {
    fn new(status: u8, code: impl Into<String>, message: impl Into<String>) -> Self {
        Failure { status, code: code.into(), message: message.into(), details: None }
    }

    fn to_json(&self) -> Value {
        let mut e = json!({"status": self.status, "code": self.code, "message": self.message});
        if let Some(d) = &self.details {
            e["details"] = d.clone();
        }
        json!({ "error": e })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            e if e.is_numeric() => 3,
            Error::Schema(_) | Error::UnknownExample(_) | Error::UnknownVertex(_) | Error::UnknownArc(_) | Error::DuplicateId(_) => 4,
            _ => 2,
        };
        Failure::new(status, e.code(), e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(4, "IO", format!("{}: {e}", path.display()))
}

fn quadrature(tol: Option<f64>) -> Result<QuadratureConfig, Failure> {
    match tol {
        None => Ok(QuadratureConfig::default()),
        Some(t) => Ok(QuadratureConfig::with_tol(t)?),
    }
}

fn parse_lift(s: &str) -> Result<ModelSpace, Failure> {
    let bad = || Failure::new(2, "BAD_PARAMS", format!("--lift expects KIND:KAPPA, got `{s}`"));
    let (kind, k) = s.split_once(':').ok_or_else(bad)?;
    let kappa: f64 = k.trim().parse().map_err(|_| bad())?;
    let space = match kind {
        "euclidean" => ModelSpace::Euclidean,
        "hyperbolic" => ModelSpace::hyperbolic(kappa),
        "spherical" => ModelSpace::spherical(kappa),
        _ => return Err(bad()),
    };
    space.check_kappa()?;
    Ok(space)
}

fn example_graph(spec: &str) -> Result<EmbeddedGraph, Failure> {
    let (name, params) = parse_example_spec(spec)?;
    Ok(builtin_example(&name, &params)?)
}

fn load_graph(c: &Common) -> Result<EmbeddedGraph, Failure> {
    let g = match (&c.input, &c.example) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            graph_from_json(&text)?
        }
        (None, Some(spec)) => example_graph(spec)?,
        _ => return Err(Failure::new(4, "USAGE", "give exactly one of --input or --example")),
    };
    match &c.lift {
        Some(s) => Ok(g.lifted(parse_lift(s)?)?),
        None => Ok(g),
    }
}

/// Exit 2 with the violations unless the graph is regular.
fn require_valid(g: &EmbeddedGraph) -> Result<(), Failure> {
    let r = g.validate();
    if let Some(first) = r.violations.first() {
        let mut f = Failure::new(2, first.code.clone(), format!("{}: {}", first.location, first.message));
        f.details = Some(json!({ "violations": r.violations }));
        return Err(f);
    }
    Ok(())
}

fn apex_point(g: &EmbeddedGraph, apex: &Option<Coords>, command: &str) -> Result<Vec4, Failure> {
    let a = &apex.as_ref().ok_or_else(|| Failure::new(4, "USAGE", format!("{command} requires --apex")))?.0;
    match (g.space, a.len()) {
        (ModelSpace::Euclidean, 3) => Ok(Vec4::new(a[0], a[1], a[2], 0.0)),
        (ModelSpace::Euclidean, _) => Err(Failure::new(2, "BAD_PARAMS", "a Euclidean apex has three coordinates")),
        // Same chart as `--lift`, so triples name the same points as the Euclidean example.
        (s, 3) => Ok(netcurv::graph::lift_point(&s, &Vec4::new(a[0], a[1], a[2], 0.0))?),
        (s, _) => Ok(s.point_from_coords(a)?),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports always serialize")
}

fn graph_summary(g: &EmbeddedGraph) -> Value {
    let ambient = match g.space {
        ModelSpace::Euclidean => json!({"kind": "euclidean"}),
        ModelSpace::Hyperbolic { kappa } => json!({"kind": "hyperbolic", "kappa": kappa}),
        ModelSpace::Spherical { kappa } => json!({"kind": "spherical", "kappa": kappa}),
    };
    json!({"ambient": ambient, "vertices": g.vertices.len(), "arcs": g.arcs.len()})
}

struct Output {
    report: Value,
    format: Format,
    out: Option<PathBuf>,
}

fn write_to(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(o: Output) -> Result<(), Failure> {
    let v = report::round_value(o.report);
    let text = match o.format {
        Format::Json => serde_json::to_string_pretty(&v).expect("reports always serialize") + "\n",
        Format::Csv => report::to_csv(&v),
    };
    write_to(&o.out, &text)
}

fn analysis(c: &Common, command: &str, body: impl FnOnce(&EmbeddedGraph, &QuadratureConfig) -> Result<Value, Failure>) -> Result<(), Failure> {
    let g = load_graph(c)?;
    let cfg = quadrature(c.tol)?;
    require_valid(&g)?;
    let mut report = json!({"command": command, "graph": graph_summary(&g)});
    report["result"] = body(&g, &cfg)?;
    emit(Output { report, format: c.format, out: c.out.clone() })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(c) => {
            let g = load_graph(&c)?;
            let r = g.validate();
            let report = json!({
                "command": "validate",
                "graph": graph_summary(&g),
                "valid": r.is_empty(),
                "violations": r.violations,
            });
            emit(Output { report, format: c.format, out: c.out.clone() })?;
            require_valid(&g)
        }
        Command::Tc(c) => analysis(&c, "tc", |g, cfg| Ok(to_value(&curvature::total_curvature_seeded(g, cfg, c.seed)?))),
        Command::Steiner { common: c, vertex } => analysis(&c, "steiner", |g, _| {
            let idx: Vec<usize> = match &vertex {
                Some(id) => vec![g.vertex_index(id)?],
                None => (0..g.vertices.len()).collect(),
            };
            let mut rows = Vec::new();
            for v in idx {
                let r = steiner::vertex_tc_at(g, v, c.seed)?;
                rows.push(json!({"id": g.vertices[v].id, "valence": g.valence(v), "steiner": r}));
            }
            Ok(json!({ "vertices": rows }))
        }),
        Command::ConeDensity(c) => analysis(&c, "cone-density", |g, cfg| {
            let apex = apex_point(g, &c.apex, "cone-density")?;
            Ok(to_value(&cone::cone_density_gb(g, &apex, cfg)?))
        }),
        Command::Classify(c) => analysis(&c, "classify", |g, cfg| {
            let tc = curvature::total_curvature_seeded(g, cfg, c.seed)?.total;
            let class = cone::classify(g, cfg)?;
            Ok(json!({"tc": tc, "density_bound": tc / (2.0 * PI), "classification": class}))
        }),
        Command::ConeArea(c) => analysis(&c, "cone-area", |g, cfg| {
            let apex = apex_point(g, &c.apex, "cone-area")?;
            Ok(to_value(&model::cone_area(g, &apex, cfg)?))
        }),
        Command::CorrectedClassify { common: c, budget } => analysis(&c, "corrected-classify", |g, cfg| {
            Ok(to_value(&model::corrected_classify(g, cfg, budget)?))
        }),
        Command::Plot { common: c, svg, axis } => {
            let g = load_graph(&c)?;
            let cfg = quadrature(c.tol)?;
            require_valid(&g)?;
            let apex = apex_point(&g, &c.apex, "plot")?;
            let length = curvature::projection_length(&g, &apex, &cfg)?;
            let p = plot::plot(&g, &apex, axis.map(|a| netcurv::Vec3::new(a.0[0], a.0[1], a.0[2])))?;
            write_to(&svg, &p.svg)?;
            if svg.is_some() {
                let report = json!({
                    "command": "plot",
                    "graph": graph_summary(&g),
                    "result": {
                        "apex": g.space.coords(&apex),
                        "axis": p.axis.as_slice(),
                        "projection_length": length,
                        "density": length / (2.0 * PI),
                        "samples": p.samples,
                        "max_step": p.max_step,
                    },
                });
                emit(Output { report, format: c.format, out: c.out.clone() })?;
            }
            Ok(())
        }
        Command::Example { name, emit: write_graph, format, seed, tol, out } => {
            let Some(spec) = name else {
                let report = json!({"command": "example", "examples": EXAMPLE_NAMES});
                return emit(Output { report, format, out });
            };
            let g = example_graph(&spec)?;
            if write_graph {
                return write_to(&out, &(graph_to_json(&g) + "\n"));
            }
            let cfg = quadrature(tol)?;
            let r = g.validate();
            let mut report = json!({
                "command": "example",
                "name": spec,
                "graph": graph_summary(&g),
                "valid": r.is_empty(),
                "notes": g.notes,
            });
            if r.is_empty() {
                let t = curvature::total_curvature_seeded(&g, &cfg, seed)?;
                report["tc"] = json!(t.total);
                report["classification"] = to_value(&cone::classify(&g, &cfg)?);
            }
            emit(Output { report, format, out })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let f = Failure::new(4, "USAGE", e.render().to_string().trim().to_string());
            eprintln!("{}", f.to_json());
            return ExitCode::from(f.status);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.status)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_status_by_error_kind() {
        assert_eq!(Failure::from(Error::QuadratureNonconverged { error: 1.0, intervals: 2000 }).status, 3);
        assert_eq!(Failure::from(Error::Schema("x".into())).status, 4);
        assert_eq!(Failure::from(Error::UnknownExample("x".into())).status, 4);
        assert_eq!(Failure::from(Error::ApexOnGraph).status, 2);
        assert_eq!(Failure::from(Error::WrongSpace { expected: "spherical" }).status, 2);
    }

    #[test]
    fn coordinates() {
        assert_eq!(parse_coords("1, -2,3").unwrap().0, vec![1.0, -2.0, 3.0]);
        assert!(parse_coords("1,2").is_err());
        assert!(parse_coords("1,2,nan").is_err());
        assert!(parse_triple("0,0,0,1").is_err());
    }
}
