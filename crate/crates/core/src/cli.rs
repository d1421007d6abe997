//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and renders deterministic pretty JSON; the binary only forwards
//! its result.

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::centroid::{
    approx_centroid_sliced, bootstrap_approx, count_via_sidedness, exact_centroid, AdversarialApproximator,
    CentroidApproximator, CountingOracle, ExactApproximator, PowerLaw,
};
use crate::cnf::{brute_force_sat, parse_dimacs, CnfFormula};
use crate::digraph::{enumerate_cycles, WeightedDigraph, DEFAULT_CYCLE_CAP};
use crate::error::Error;
use crate::exact::{QVector, Rational};
use crate::flow_poly::{
    build_flow_polyhedron, formula_centroid, marked_coordinate, random_digraph_corpus, verify_cycle_vertices,
    VerifyMode,
};
use crate::phi_graph::build_phi_graph;
use crate::polytope::{normalize_to_unit_cube, HPolyhedron};
use crate::vertex_enum::{count_vertices, enumerate_vertices, EnumCaps};

/// Environment variable that sets the default for `--cap`.
pub const CAP_ENV: &str = "CENTROID_LAB_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// What the process should print and return. `stdout` is empty unless
/// `exit_code` is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(exit_code: i32, stderr: String) -> Self {
        CommandResult {
            exit_code,
            stdout: String::new(),
            stderr,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "centroid-lab", version, about = "Exact vertex centroids of H-polytopes and the negative-cycle reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CapArg {
    /// Resource cap for this command (overrides CENTROID_LAB_CAP)
    #[arg(long, value_name = "N")]
    cap: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the vertices of a polyhedron (cap: constraint subsets)
    Vertices {
        file: String,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Exact vertex centroid of a polyhedron (cap: constraint subsets)
    Centroid {
        file: String,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Lift a polyhedron to the pyramid {Ax <= tb, 0 <= t <= 1}
    Pyramid { file: String },
    /// Recover the vertex count from centroid sidedness queries (cap: constraint subsets)
    CountSearch {
        file: String,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Approximate the centroid with a vertex-counting oracle (cap: constraint subsets)
    ApproxSlice {
        file: String,
        #[arg(long)]
        eps: Rational,
        /// Map the vertices into [0,1]^d first and report both coordinates
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Cartesian product of two polyhedra
    Product { first: String, second: String },
    /// Product bootstrap of an approximate centroid oracle (cap: fold depth)
    Bootstrap {
        file: String,
        #[arg(long)]
        eps: Rational,
        /// Use a worst-case oracle with guarantee g(D) = D^delta instead of the exact one
        #[arg(long)]
        delta: Option<Rational>,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Build the weighted digraph of a DIMACS formula
    Cnf2graph { file: String },
    /// List the simple cycles of a graph or formula (cap: cycles)
    Cycles {
        file: String,
        /// Only list negative cycles
        #[arg(long)]
        negative: bool,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Circulation polyhedron of a graph or formula
    Cnf2poly { file: String },
    /// Compare polyhedron vertices with negative cycles (cap: cycles)
    #[command(name = "verify-cycles", alias = "verify-thm5")]
    VerifyCycles {
        /// Graph or formula; without it a random corpus of small digraphs is checked
        file: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corpus size when no file is given
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Decide satisfiability from the marked centroid coordinate (cap: cycles)
    Gap {
        file: String,
        /// Perturb the centroid by this much toward the threshold before deciding
        #[arg(long)]
        eps: Option<Rational>,
        #[command(flatten)]
        cap: CapArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Candidate,
}

impl From<ModeArg> for VerifyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => VerifyMode::Full,
            ModeArg::Candidate => VerifyMode::Candidate,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
    /// Domain failure that still carries a report.
    Report(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs one command. `argv[0]` is the program name; `env_cap` is the value
/// of [`CAP_ENV`], if set.
pub fn run(argv: &[String], stdin: &mut dyn Read, env_cap: Option<&str>) -> CommandResult {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandResult::ok(e.to_string())
                }
                _ => CommandResult::fail(EXIT_USAGE, e.to_string()),
            };
        }
    };
    let mut ctx = Context { stdin, env_cap };
    match ctx.dispatch(cli.command) {
        Ok(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
            s.push('\n');
            CommandResult::ok(s)
        }
        Err(Failure::Usage(m)) => CommandResult::fail(EXIT_USAGE, format!("error: {m}\n")),
        Err(Failure::Io(m)) => CommandResult::fail(EXIT_DOMAIN, format!("error: {m}\n")),
        Err(Failure::Report(m)) => CommandResult::fail(EXIT_DOMAIN, m),
        Err(Failure::Lib(e)) => {
            let code = if e.is_resource() { EXIT_CAP } else { EXIT_DOMAIN };
            CommandResult::fail(code, format!("error: {e}\n"))
        }
    }
}

struct Context<'a> {
    stdin: &'a mut dyn Read,
    env_cap: Option<&'a str>,
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

impl Context<'_> {
    fn read(&mut self, path: &str) -> CliResult<String> {
        if path == "-" {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::Io(format!("reading standard input: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("reading {path}: {e}")))
        }
    }

    fn cap(&self, arg: &CapArg) -> CliResult<Option<u64>> {
        if let Some(c) = arg.cap {
            return Ok(Some(c));
        }
        match self.env_cap {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("{CAP_ENV} must be a nonnegative integer, got `{s}`"))),
        }
    }

    fn enum_caps(&self, arg: &CapArg) -> CliResult<EnumCaps> {
        let mut caps = EnumCaps::default();
        if let Some(c) = self.cap(arg)? {
            caps.max_subsets = c as u128;
        }
        Ok(caps)
    }

    fn cycle_cap(&self, arg: &CapArg) -> CliResult<usize> {
        Ok(self.cap(arg)?.map_or(DEFAULT_CYCLE_CAP, |c| c as usize))
    }

    fn polyhedron(&mut self, path: &str) -> CliResult<HPolyhedron> {
        Ok(HPolyhedron::from_json(&self.read(path)?)?)
    }

    /// A graph file, or a DIMACS formula turned into its graph.
    fn graph(&mut self, path: &str) -> CliResult<(WeightedDigraph, Option<CnfFormula>)> {
        let text = self.read(path)?;
        if text.trim_start().starts_with('{') {
            Ok((WeightedDigraph::from_json(&text)?, None))
        } else {
            let phi = parse_dimacs(&text)?;
            Ok((build_phi_graph(&phi)?.graph, Some(phi)))
        }
    }

    fn dispatch(&mut self, cmd: Command) -> CliResult<Value> {
        match cmd {
            Command::Vertices { file, cap } => {
                let p = self.polyhedron(&file)?;
                let vs = enumerate_vertices(&p, &self.enum_caps(&cap)?)?;
                Ok(json!({
                    "dim": p.dim(),
                    "count": vs.len(),
                    "vertices": to_json(&vs.points()),
                }))
            }
            Command::Centroid { file, cap } => {
                let p = self.polyhedron(&file)?;
                let caps = self.enum_caps(&cap)?;
                let c = exact_centroid(&p, &caps)?;
                Ok(json!({
                    "dim": p.dim(),
                    "vertex_count": count_json(count_vertices(&p, &caps)?),
                    "centroid": to_json(&c),
                }))
            }
            Command::Pyramid { file } => {
                let p = self.polyhedron(&file)?;
                Ok(to_json(&p.pyramid_embed()?))
            }
            Command::CountSearch { file, n_max, cap } => {
                let p = self.polyhedron(&file)?;
                let r = count_via_sidedness(&p, n_max, &self.enum_caps(&cap)?)?;
                Ok(json!({ "n_max": n_max, "count": r.count, "queries": r.queries }))
            }
            Command::ApproxSlice {
                file,
                eps,
                normalize,
                cap,
            } => {
                let p = self.polyhedron(&file)?;
                let caps = self.enum_caps(&cap)?;
                let (q, map) = if normalize {
                    let (q, map) = normalize_to_unit_cube(&p, &caps)?;
                    (q, Some(map))
                } else {
                    check_unit_cube(&p, &caps)?;
                    (p, None)
                };
                let oracle = CountingOracle::new(caps);
                let r = approx_centroid_sliced(&q, &eps, &oracle)?;
                let mut out = json!({
                    "eps": eps.to_string(),
                    "point": to_json(&r.point),
                    "oracle_calls": r.oracle_calls,
                    "shifts": to_json(&r.shifts),
                });
                if let Some(map) = map {
                    out["original_point"] = to_json(&map.invert(&r.point)?);
                }
                Ok(out)
            }
            Command::Product { first, second } => {
                let a = self.polyhedron(&first)?;
                let b = self.polyhedron(&second)?;
                Ok(to_json(&a.product(&b)))
            }
            Command::Bootstrap { file, eps, delta, cap } => {
                let p = self.polyhedron(&file)?;
                let k_cap = self.cap(&cap)?.map_or(16, |c| c.min(u32::MAX as u64) as u32);
                let caps = EnumCaps::default();
                let oracle: Box<dyn CentroidApproximator> = match delta {
                    None => Box::new(ExactApproximator { caps }),
                    Some(d) => Box::new(AdversarialApproximator {
                        law: PowerLaw::new(&d)?,
                        base_dim: p.dim(),
                        caps,
                    }),
                };
                let r = bootstrap_approx(&p, oracle.as_ref(), &eps, k_cap)?;
                Ok(json!({
                    "eps": eps.to_string(),
                    "guarantee": oracle.guarantee().description(),
                    "k": r.k,
                    "product_dim": p.dim() << r.k,
                    "point": to_json(&r.point),
                }))
            }
            Command::Cnf2graph { file } => {
                let phi = parse_dimacs(&self.read(&file)?)?;
                Ok(to_json(&build_phi_graph(&phi)?.graph))
            }
            Command::Cycles { file, negative, cap } => {
                let (g, _) = self.graph(&file)?;
                let cycles = enumerate_cycles(&g, self.cycle_cap(&cap)?)?;
                let marked = g.marked_arc();
                let neg: Vec<_> = cycles.iter().filter(|c| c.weight.is_negative()).collect();
                let listed: Vec<Value> = cycles
                    .iter()
                    .filter(|c| !negative || c.weight.is_negative())
                    .map(|c| {
                        json!({
                            "arcs": c.arcs,
                            "weight": c.weight.to_string(),
                            "marked": marked.is_some_and(|m| c.contains_arc(m)),
                        })
                    })
                    .collect();
                Ok(json!({
                    "nodes": g.node_count(),
                    "arcs": g.arc_count(),
                    "cycle_count": cycles.len(),
                    "negative_count": neg.len(),
                    "negative_through_marked": neg.iter().filter(|c| marked.is_some_and(|m| c.contains_arc(m))).count(),
                    "cycles": listed,
                }))
            }
            Command::Cnf2poly { file } => {
                let (g, _) = self.graph(&file)?;
                Ok(to_json(&build_flow_polyhedron(&g)?.base))
            }
            Command::VerifyCycles {
                file,
                mode,
                seed,
                count,
                cap,
            } => {
                let caps = EnumCaps::default();
                let cycle_cap = self.cycle_cap(&cap)?;
                let mode = VerifyMode::from(mode);
                match file {
                    Some(f) => {
                        let (g, _) = self.graph(&f)?;
                        let r = verify_cycle_vertices(&g, mode, &caps, cycle_cap)?;
                        if !r.ok {
                            return Err(Failure::Report(serde_json::to_string_pretty(&r).expect("report serializes")));
                        }
                        Ok(to_json(&r))
                    }
                    None => {
                        let mut failures = Vec::new();
                        let mut vertices = 0usize;
                        for (i, g) in random_digraph_corpus(seed, count).iter().enumerate() {
                            let r = verify_cycle_vertices(g, mode, &caps, cycle_cap)?;
                            vertices += r.negative_cycles;
                            if !r.ok {
                                failures.push(json!({ "instance": i, "graph": to_json(g), "report": to_json(&r) }));
                            }
                        }
                        let out = json!({
                            "mode": to_json(&mode),
                            "seed": seed,
                            "instances": count,
                            "cycle_vertices": vertices,
                            "failures": failures,
                            "ok": failures.is_empty(),
                        });
                        if !failures.is_empty() {
                            return Err(Failure::Report(serde_json::to_string_pretty(&out).expect("report serializes")));
                        }
                        Ok(out)
                    }
                }
            }
            Command::Gap { file, eps, cap } => {
                let phi = parse_dimacs(&self.read(&file)?)?;
                let cycle_cap = self.cycle_cap(&cap)?;
                let report = marked_coordinate(&phi, cycle_cap)?;
                let eps = eps.unwrap_or_else(Rational::zero);
                if eps.is_negative() || eps >= report.threshold {
                    return Err(Failure::Lib(Error::Unsupported(format!(
                        "eps must lie in [0, {}), got {eps}",
                        report.threshold
                    ))));
                }
                let mut point: QVector = formula_centroid(&phi, cycle_cap)?;
                let m = report.marked_arc;
                // worst case: move the marked coordinate toward the threshold
                if point[m] >= report.threshold {
                    point[m] = &point[m] - &eps;
                } else {
                    point[m] = &point[m] + &eps;
                }
                let decision = crate::flow_poly::decide_sat_via_gap(&phi, &point)?;
                let sat = brute_force_sat(&phi)?;
                Ok(json!({
                    "m": report.m,
                    "literals": report.literals,
                    "long_cycles": report.long_cycles,
                    "marked_arc": m,
                    "marked_value": report.marked_value.to_string(),
                    "threshold": report.threshold.to_string(),
                    "eps": eps.to_string(),
                    "approx_marked_value": point[m].to_string(),
                    "decision": decision,
                    "satisfiable": sat.satisfiable,
                }))
            }
        }
    }
}

/// Counts beyond `u64` are emitted as decimal strings.
fn count_json(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| Value::from(n.to_string()), Value::from)
}

fn check_unit_cube(p: &HPolyhedron, caps: &EnumCaps) -> CliResult<()> {
    let (zero, one) = (Rational::zero(), Rational::one());
    for v in enumerate_vertices(p, caps)?.points() {
        if v.iter().any(|x| x < &zero || x > &one) {
            return Err(Failure::Lib(Error::Unsupported(
                "vertices must lie in [0,1]^d; pass --normalize to rescale".into(),
            )));
        }
    }
    Ok(())
}
