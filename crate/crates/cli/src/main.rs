//! `symcore` command-line tool.
//!
//! Every subcommand prints a JSON report on standard output, or an indented
//! plain-text rendering of it with `--human`. Exit codes: 0 on success, 1
//! when the answer is "infeasible" (or a check came out negative), 2 on
//! usage and data errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use symcore::core_points::{
    cyclic_example_point, cyclic_generator, enumerate_core_points_in_box, hull_integer_witness, is_core_point,
    OracleCaps, DEFAULT_BOX_CAP,
};
use symcore::gen::{generate_instance, GenParams};
use symcore::group::{orbit_of_vector, parse_group, GroupSpec, DEFAULT_ORBIT_CAP};
use symcore::model::{load_instance, validate_symmetry, DEFAULT_ROW_CAP};
use symcore::project::{enumerate_lattice_points, project_polyhedron, DEFAULT_FIBER_CAP};
use symcore::solve::{solve_bb_instance, solve_fiber, solve_transformed, SolveOptions, SolveStatus};
use symcore::transform::{export_model, transform_instance, ExportModel};
use symcore::{BlockGroup, Permutation};

#[derive(Parser)]
#[command(name = "symcore", version, about = "Exact solver for block-symmetric integer programs")]
struct Cli {
    /// Print a plain-text table instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random symmetric instance.
    Gen {
        /// Block sizes, e.g. 5,5.
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of rows after orbit closure.
        #[arg(long, default_value_t = DEFAULT_ROW_CAP)]
        orbit_cap: usize,
        /// Write the instance here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the instance is invariant under its group.
    Validate { instance: PathBuf },
    /// Print the projection onto the fixed space.
    Project {
        instance: PathBuf,
        /// Also list its integer points.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = DEFAULT_FIBER_CAP)]
        fiber_cap: usize,
    },
    /// Solve the instance to optimality.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Fiber)]
        method: Method,
        /// Worker threads for the fiber method.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = DEFAULT_FIBER_CAP)]
        fiber_cap: usize,
    },
    /// Rewrite the instance over fiber representatives.
    Transform {
        instance: PathBuf,
        /// Destination of the transformed model (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Also write the model in LP text format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
    },
    /// Core-point oracle.
    #[command(subcommand)]
    Core(CoreCommand),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Fiber,
    Bb,
    Transform,
}

#[derive(Subcommand)]
enum CoreCommand {
    /// Decide whether a point is a core point.
    Check {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<i64>,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        orbit_cap: usize,
    },
    /// List the core points in a box.
    Enum {
        #[command(flatten)]
        group: GroupArgs,
        /// Coordinate range shared by all coordinates, e.g. -2..2.
        #[arg(long = "box", allow_hyphen_values = true)]
        range: String,
        /// Keep only points with this coordinate sum.
        #[arg(long, allow_hyphen_values = true)]
        sum: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        orbit_cap: usize,
    },
    /// Build the cyclic-group point from its parameters and verify it.
    Cyclic {
        /// Even dimension, at least 4.
        #[arg(long)]
        n: usize,
        /// The n/2 - 1 free parameters.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<i64>,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// JSON group description: a group object or a list of generators.
    #[arg(long, conflicts_with = "blocks", required_unless_present = "blocks")]
    group_file: Option<PathBuf>,
    /// Symmetric blocks on consecutive coordinates, e.g. 2,2.
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupFile {
    Spec(GroupSpec),
    Generators { generators: Vec<Vec<usize>> },
}

impl GroupArgs {
    /// The generators the oracle works with.
    fn generators(&self) -> Result<(usize, Vec<Permutation>)> {
        if let Some(sizes) = &self.blocks {
            if sizes.is_empty() || sizes.contains(&0) {
                bail!("block sizes must be positive");
            }
            let g = BlockGroup::symmetric_blocks(sizes);
            return Ok((g.n(), g.oracle_generators()));
        }
        let path = self.group_file.as_ref().expect("clap requires one of the group options");
        let text = read(path)?;
        let file: GroupFile =
            serde_json::from_str(&text).with_context(|| format!("{} is not a group description", path.display()))?;
        match file {
            GroupFile::Spec(spec) => {
                let g = parse_group(&spec, None)?;
                Ok((g.n(), g.oracle_generators()))
            }
            GroupFile::Generators { generators } => {
                let n = generators.first().map_or(0, Vec::len);
                let perms = generators
                    .into_iter()
                    .enumerate()
                    .map(|(i, images)| {
                        if images.len() != n {
                            bail!("generator {i} has length {}, expected {n}", images.len());
                        }
                        Permutation::new(images).ok_or_else(|| anyhow!("generator {i} is not a permutation"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((n, perms))
            }
        }
    }
}

struct Report {
    body: Value,
    code: u8,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report { body, code: 0 }
    }

    fn flagged(body: Value, positive: bool) -> Self {
        Report { body, code: if positive { 0 } else { 1 } }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_range(text: &str) -> Result<(i64, i64)> {
    let (lo, hi) = text.split_once("..").ok_or_else(|| anyhow!("box must look like lo..hi, got {text:?}"))?;
    let lo: i64 = lo.trim().parse().with_context(|| format!("bad lower bound in {text:?}"))?;
    let hi: i64 = hi.trim().parse().with_context(|| format!("bad upper bound in {text:?}"))?;
    Ok((lo, hi))
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Gen { blocks, seed, orbit_cap, out } => {
            let params = GenParams { row_cap: orbit_cap, ..GenParams::new(&blocks, seed) };
            let inst = generate_instance(&params)?;
            match out {
                Some(path) => {
                    inst.store(&path)?;
                    Ok(Report::ok(json!({
                        "path": path.display().to_string(),
                        "n": inst.n(),
                        "rows": inst.rows().len(),
                        "blocks": blocks,
                        "seed": seed,
                    })))
                }
                None => Ok(Report::ok(serde_json::to_value(inst.to_file_data())?)),
            }
        }
        Command::Validate { instance } => {
            let inst = load_instance(&instance)?;
            let report = validate_symmetry(&inst);
            let code = if report.is_symmetric { 0 } else { 2 };
            Ok(Report { body: serde_json::to_value(&report)?, code })
        }
        Command::Project { instance, enumerate, fiber_cap } => {
            let inst = load_instance(&instance)?;
            let proj = project_polyhedron(&inst)?;
            let mut body = json!({ "d": proj.d, "rows": proj.rows });
            if enumerate {
                let e = enumerate_lattice_points(&proj, fiber_cap)?;
                let fibers: Vec<&Vec<i64>> = e.fibers.iter().map(|f| &f.0).collect();
                body["lattice_points"] = json!(fibers);
                body["count"] = json!(fibers.len());
                body["lp_calls"] = json!(e.lp_calls);
            }
            Ok(Report::ok(body))
        }
        Command::Solve { instance, method, threads, fiber_cap } => {
            let inst = load_instance(&instance)?;
            let solution = match method {
                Method::Fiber => solve_fiber(&inst, &SolveOptions { threads, fiber_cap })?,
                Method::Bb => solve_bb_instance(&inst)?,
                Method::Transform => solve_transformed(&inst)?,
            };
            let feasible = solution.status == SolveStatus::Optimal;
            Ok(Report::flagged(serde_json::to_value(&solution)?, feasible))
        }
        Command::Transform { instance, out, export_lp } => {
            let inst = load_instance(&instance)?;
            let ti = transform_instance(&inst)?;
            let model = ExportModel::from(&ti);
            let mut body = serde_json::to_value(&ti)?;
            body["var_names"] = json!(model.var_names);
            fs::write(&out, serde_json::to_string_pretty(&body)? + "\n")
                .with_context(|| format!("cannot write {}", out.display()))?;
            if let Some(path) = &export_lp {
                export_model(&model, path)?;
            }
            Ok(Report::ok(json!({
                "out": out.display().to_string(),
                "export_lp": export_lp.map(|p| p.display().to_string()),
                "variables": ti.num_vars(),
                "model_rows": ti.model_rows.len(),
                "structural_rows": ti.structural_rows.len(),
                "original_rows": inst.rows().len(),
            })))
        }
        Command::Core(CoreCommand::Check { group, point, orbit_cap }) => {
            let (n, gens) = group.generators()?;
            if point.len() != n {
                bail!("point has {} coordinates, the group acts on {n}", point.len());
            }
            let caps = OracleCaps { orbit: orbit_cap, box_points: DEFAULT_BOX_CAP };
            let orbit = orbit_of_vector(&gens, &point, orbit_cap)?;
            let core = is_core_point(&gens, &point, &caps)?;
            Ok(Report::flagged(json!({ "point": point, "orbit_size": orbit.len(), "core": core }), core))
        }
        Command::Core(CoreCommand::Enum { group, range, sum, orbit_cap }) => {
            let (n, gens) = group.generators()?;
            let (lo, hi) = parse_range(&range)?;
            let caps = OracleCaps { orbit: orbit_cap, box_points: DEFAULT_BOX_CAP };
            let points = enumerate_core_points_in_box(&gens, &vec![lo; n], &vec![hi; n], sum, &caps)?;
            Ok(Report::ok(json!({ "n": n, "box": [lo, hi], "sum": sum, "count": points.len(), "points": points })))
        }
        Command::Core(CoreCommand::Cyclic { n, params }) => {
            let z = cyclic_example_point(n, &params)?;
            let gens = vec![cyclic_generator(n)];
            let caps = OracleCaps::default();
            let orbit = orbit_of_vector(&gens, &z, caps.orbit)?;
            let core = hull_integer_witness(&orbit, &caps)?.is_none();
            let mut with_origin = orbit.clone();
            if !with_origin.contains(&vec![0; n]) {
                with_origin.push(vec![0; n]);
            }
            let origin_witness = hull_integer_witness(&with_origin, &caps)?;
            let verified = core && origin_witness.is_none();
            Ok(Report::flagged(
                json!({
                    "n": n,
                    "point": z,
                    "orbit": orbit,
                    "core": core,
                    "core_with_origin": origin_witness.is_none(),
                    "witness": origin_witness,
                    "verified": verified,
                }),
                verified,
            ))
        }
    }
}

/// Indented `key: value` lines; arrays of scalars stay on one line.
fn render_human(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (key, v) in map {
                if is_flat(v) {
                    out.push_str(&format!("{pad}{key:<width$}  {}\n", flat(v)));
                } else {
                    out.push_str(&format!("{pad}{key}\n"));
                    render_human(v, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                if is_flat(v) {
                    out.push_str(&format!("{pad}[{i}]  {}\n", flat(v)));
                } else {
                    out.push_str(&format!("{pad}[{i}]\n"));
                    render_human(v, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", flat(other))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| !x.is_object() && !x.is_array()),
        _ => true,
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".to_string(),
        Value::Array(items) => format!("({})", items.iter().map(flat).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SYMCORE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if cli.human {
                let mut text = String::new();
                render_human(&report.body, 0, &mut text);
                print!("{text}");
            } else {
                println!("{}", serde_json::to_string_pretty(&report.body).expect("reports serialize"));
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
