mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

use treeshift::gallery::{self, SelfTestReport};
use treeshift::hypercyclic::{kgs_suite, verdict, KgsOptions, Verdict};
use treeshift::io::{complex_function_json, rational_function_json, read_function, resolve_tree_arg, FunctionData};
use treeshift::oracle::{extremal_attainment, randomized_norm_lower_bound, truncated_finite_support_check};
use treeshift::scalar::{parse_complex, parse_rational};
use treeshift::shift::{apply, operator_norm, Direction, OperatorKind};
use treeshift::spectral::{
    eigenfunction_b, nonsurjectivity_blowup_s, point_spectrum_membership_b, point_spectrum_s, resolvent_witness_s,
    spectral_radius, BlowupOutcome, SpaceKind, WitnessReport,
};
use treeshift::tree::{materialize_with, MaterializeOptions, DEFAULT_VERTEX_CAP};
use treeshift::{hardy, Error, Exponent, LevelTree, Result, TreeFunction, TreeScalar, VertexId};

use output::{big, Output, Table};

/// Environment variable overriding the materialization vertex cap.
const VERTEX_CAP_VAR: &str = "TREESHIFT_VERTEX_CAP";

#[derive(Parser)]
#[command(
    name = "treeshift",
    version,
    about = "Shift operators on discrete Hardy spaces of rooted trees"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TreeArgs {
    /// Tree spec file, or `gallery:<name>?<key>=<value>&...`.
    #[arg(long)]
    tree: String,
    /// Materialization depth.
    #[arg(long, default_value_t = 32)]
    depth: usize,
}

#[derive(Args)]
struct OpArgs {
    /// `S` (forward) or `B` (backward).
    #[arg(long)]
    op: Direction,
    #[arg(long, default_value_t = 1)]
    power: usize,
    /// Exponent p >= 1.
    #[arg(long, default_value = "1")]
    p: Exponent,
}

#[derive(Subcommand)]
enum Command {
    /// Level sizes, leaves and degree histograms.
    Describe {
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// Operator norm of S^m or B^m.
    Norm {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        op: OpArgs,
    },
    /// Power norms and the spectral-radius estimate.
    Radius {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        op: Direction,
        #[arg(long, default_value = "1")]
        p: Exponent,
        #[arg(long, default_value_t = 12)]
        max_power: usize,
    },
    /// Eigenfunctions, resolvent and blowup witnesses.
    Witness {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, value_enum)]
        kind: WitnessKind,
        /// `a`, `a/b`, `a+bi`, ...; rational values run in exact mode.
        #[arg(long, default_value = "0")]
        lambda: String,
        /// Sector root `level:index` for the resolvent witness.
        #[arg(long, default_value = "0:0")]
        vertex: VertexId,
        #[arg(long, default_value = "1")]
        p: Exponent,
        #[arg(long, value_enum, default_value_t = Space::Hp0)]
        space: Space,
        /// Write the witness function here instead of embedding it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hypercyclicity verdict and the right-inverse suite.
    Hypercyclic {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        op: Direction,
        #[arg(long, default_value_t = 20)]
        samples: u64,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "1")]
        p: Exponent,
        /// Run the suite even without a `yes` verdict.
        #[arg(long)]
        force: bool,
    },
    /// Registered tree families.
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
    /// Brute-force checks of a norm formula.
    Verify {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated grid values for an exhaustive search on tiny trees.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<String>>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Apply S^m or B^m to a function file.
    Apply {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        op: OpArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    List,
    SelfTest {
        /// Family name, optionally with `?key=value` params.
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        p: Vec<Exponent>,
        #[arg(long, default_value_t = 6)]
        max_power: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessKind {
    #[value(name = "eigenB")]
    EigenB,
    #[value(name = "resolventS")]
    ResolventS,
    #[value(name = "blowupS")]
    BlowupS,
    #[value(name = "membershipB")]
    MembershipB,
    #[value(name = "pointS")]
    PointS,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Hp,
    Hp0,
}

fn vertex_cap() -> Result<u64> {
    match std::env::var(VERTEX_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{VERTEX_CAP_VAR} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_VERTEX_CAP),
    }
}

fn load(args: &TreeArgs) -> Result<LevelTree> {
    let spec = resolve_tree_arg(&args.tree)?;
    materialize_with(
        &spec,
        args.depth,
        &MaterializeOptions {
            vertex_cap: vertex_cap()?,
        },
    )
}

fn to_value<S: serde::Serialize>(v: &S) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn describe(tree: &LevelTree) -> Result<Output> {
    let mut levels = Vec::new();
    let mut table = Table::new(&["level", "size", "degree", "count"]);
    for n in 0..=tree.depth() {
        let size = tree.gamma(n)?;
        let mut hist = serde_json::Map::new();
        if n < tree.depth() {
            for (d, c) in tree.degree_histogram(n)? {
                table.push(vec![n.to_string(), size.to_string(), d.to_string(), c.to_string()]);
                hist.insert(d.to_string(), big(&c));
            }
        } else {
            table.push(vec![n.to_string(), size.to_string(), String::new(), String::new()]);
        }
        levels.push(json!({"level": n, "size": big(size), "degree_histogram": hist}));
    }
    let certs = treeshift::gallery::Certificates::for_spec(tree.spec());
    Ok(Output::with_table(
        json!({
            "spec": to_value(tree.spec().kind()),
            "depth": tree.depth(),
            "level_sizes": tree.level_sizes().iter().map(big).collect::<Vec<_>>(),
            "total_vertices": big(&tree.total_vertices()),
            "leafless": tree.is_leafless_up_to(),
            "first_leaf": tree.first_leaf(),
            "levels": levels,
            "certificates": certs.descriptions(),
        }),
        table,
    ))
}

fn norm(tree: &LevelTree, op: &OpArgs) -> Result<Output> {
    let r = operator_norm(tree, OperatorKind::new(op.op, op.power)?, op.p)?;
    let mut table = Table::new(&["level", "ratio_p_power", "ratio_approx"]);
    for l in &r.ratios {
        table.push(vec![
            l.level.to_string(),
            l.ratio_p_power.display_exact().unwrap_or_default(),
            l.ratio_p_power.to_f64().to_string(),
        ]);
    }
    Ok(Output::with_table(to_value(&r), table))
}

fn radius(tree: &LevelTree, op: Direction, p: Exponent, max_power: usize) -> Result<Output> {
    let r = spectral_radius(tree, op, p, max_power)?;
    let mut table = Table::new(&["m", "norm_p_power", "radius", "observed_radius", "truncated"]);
    for (i, n) in r.power_norms.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            n.value_p_power.to_string(),
            r.radius_sequence[i].to_string(),
            r.observed_radius_sequence[i].to_string(),
            n.truncated.to_string(),
        ]);
    }
    Ok(Output::with_table(to_value(&r), table))
}

fn witness_json<T: TreeScalar>(r: &WitnessReport<T>, function: Value, out: &Option<PathBuf>) -> Result<Value> {
    let mut v = json!({
        "identity": r.identity,
        "residual": to_value(&r.residual),
        "residual_is_zero": r.residual_is_zero,
        "region": {"from_level": r.region.0, "to_level": r.region.1},
        "profile": to_value(&r.profile),
        "profile_holds": r.profile_holds,
        "notes": r.notes,
        "exact": T::is_exact(),
        "witness_segments": r.witness.segment_count(),
    });
    match out {
        Some(path) => {
            std::fs::write(path, serde_json::to_string_pretty(&function).expect("json"))
                .map_err(|e| Error::Format(format!("cannot write `{}`: {e}", path.display())))?;
            v["witness_file"] = json!(path.display().to_string());
        }
        None => v["witness"] = function,
    }
    Ok(v)
}

enum Lambda {
    Exact(BigRational),
    Float(Complex64),
}

fn parse_lambda(s: &str, p: Exponent) -> Result<Lambda> {
    match parse_rational(s) {
        Ok(q) if p.as_integer().is_some() => Ok(Lambda::Exact(q)),
        _ => Ok(Lambda::Float(parse_complex(s)?)),
    }
}

#[allow(clippy::too_many_arguments)]
fn witness(
    tree: &LevelTree,
    kind: WitnessKind,
    lambda: &str,
    vertex: &VertexId,
    p: Exponent,
    space: Space,
    out: &Option<PathBuf>,
) -> Result<Output> {
    let head =
        json!({"kind": kind.to_possible_value().expect("named").get_name(), "lambda": lambda, "depth": tree.depth()});
    let body = match kind {
        WitnessKind::EigenB => match parse_lambda(lambda, p)? {
            Lambda::Exact(q) => {
                let r = eigenfunction_b(tree, &q)?;
                witness_json(&r, rational_function_json(&r.witness), out)?
            }
            Lambda::Float(z) => {
                let r = eigenfunction_b(tree, &z)?;
                witness_json(&r, complex_function_json(&r.witness), out)?
            }
        },
        WitnessKind::ResolventS => match parse_lambda(lambda, p)? {
            Lambda::Exact(q) => {
                let r = resolvent_witness_s(tree, vertex, &q, p)?;
                witness_json(&r, rational_function_json(&r.witness), out)?
            }
            Lambda::Float(z) => {
                let r = resolvent_witness_s(tree, vertex, &z, p)?;
                witness_json(&r, complex_function_json(&r.witness), out)?
            }
        },
        WitnessKind::BlowupS => {
            let outcome = match parse_lambda(lambda, p)? {
                Lambda::Exact(q) => match nonsurjectivity_blowup_s(tree, &q, p)? {
                    BlowupOutcome::NoSolution { reason } => Err(reason),
                    BlowupOutcome::Witness(r) => Ok(witness_json(&r, rational_function_json(&r.witness), out)?),
                },
                Lambda::Float(z) => match nonsurjectivity_blowup_s(tree, &z, p)? {
                    BlowupOutcome::NoSolution { reason } => Err(reason),
                    BlowupOutcome::Witness(r) => Ok(witness_json(&r, complex_function_json(&r.witness), out)?),
                },
            };
            match outcome {
                Ok(v) => v,
                Err(reason) => json!({"verdict": "no_solution", "reason": reason}),
            }
        }
        WitnessKind::MembershipB => {
            let space = match space {
                Space::Hp => SpaceKind::Hp,
                Space::Hp0 => SpaceKind::Hp0,
            };
            to_value(&point_spectrum_membership_b(tree, parse_complex(lambda)?, space)?)
        }
        WitnessKind::PointS => to_value(&point_spectrum_s(tree)?),
    };
    let mut v = head;
    v["report"] = body;
    Ok(Output::new(v))
}

fn hypercyclic(tree: &LevelTree, op: Direction, options: KgsOptions) -> Result<Output> {
    let v = verdict(tree, op);
    let suite = if op == Direction::Backward && options.samples > 0 && (v.verdict == Verdict::Yes || options.force) {
        Some(to_value(&kgs_suite(tree, options)?))
    } else {
        None
    };
    let mut table = Table::new(&["operator", "verdict", "identity_passes", "bound_passes", "samples"]);
    let field = |k: &str| suite.as_ref().map_or(String::new(), |s| s[k].to_string());
    table.push(vec![
        v.operator.to_string(),
        to_value(&v.verdict).as_str().unwrap_or_default().to_string(),
        field("identity_passes"),
        field("bound_passes"),
        field("samples"),
    ]);
    Ok(Output::with_table(
        json!({"verdict": to_value(&v), "suite": suite}),
        table,
    ))
}

fn self_test_table(r: &SelfTestReport) -> Table {
    let mut t = Table::new(&["check", "expected", "actual", "matches"]);
    for c in &r.checks {
        t.push(vec![
            c.name.clone(),
            c.expected.clone(),
            c.actual.clone(),
            c.matches.to_string(),
        ]);
    }
    t
}

fn gallery_command(command: &GalleryCommand) -> Result<Output> {
    match command {
        GalleryCommand::List => {
            let list = gallery::list();
            let mut t = Table::new(&["name", "params", "description"]);
            for e in &list {
                t.push(vec![e.name.into(), e.params.into(), e.description.into()]);
            }
            Ok(Output::with_table(to_value(&list), t))
        }
        GalleryCommand::SelfTest {
            name,
            depth,
            p,
            max_power,
        } => {
            let entry = gallery::build_inline(name)?;
            let r = gallery::self_test(&entry, *depth, p, *max_power)?;
            Ok(Output::with_table(to_value(&r), self_test_table(&r)))
        }
    }
}

fn verify(
    tree: &LevelTree,
    op: &OpArgs,
    trials: u64,
    seed: u64,
    grid: &Option<Vec<String>>,
    budget: u64,
) -> Result<Output> {
    let kind = OperatorKind::new(op.op, op.power)?;
    let lower = randomized_norm_lower_bound(tree, kind, op.p, trials, seed)?;
    let attainment = extremal_attainment(tree, kind, op.p)?;
    let grid = match grid {
        Some(values) => {
            let values = values.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>>>()?;
            Some(to_value(&truncated_finite_support_check(
                tree, kind, op.p, &values, budget,
            )?))
        }
        None => None,
    };
    let mut t = Table::new(&[
        "operator",
        "p",
        "best_ratio",
        "formula_value",
        "exceeding",
        "attainment_all_equal",
    ]);
    t.push(vec![
        kind.to_string(),
        op.p.to_string(),
        lower.best_ratio.to_string(),
        lower.formula_value.to_string(),
        lower.exceeding.to_string(),
        attainment.all_equal.to_string(),
    ]);
    Ok(Output::with_table(
        json!({"lower_bound": to_value(&lower), "attainment": to_value(&attainment), "grid": grid}),
        t,
    ))
}

fn summary<T: TreeScalar>(tree: &LevelTree, f: &TreeFunction<T>, p: Exponent) -> Result<Value> {
    let norm = hardy::hardy_norm(tree, f, p)?;
    Ok(json!({
        "max_support_level": f.max_support_level(),
        "support_size": big(&f.support_size()),
        "segments": f.segment_count(),
        "norm": to_value(&norm),
    }))
}

fn apply_command(tree: &LevelTree, op: &OpArgs, input: &Path, out: &Option<PathBuf>) -> Result<Output> {
    let kind = OperatorKind::new(op.op, op.power)?;
    let (before, after, result) = match read_function(input)? {
        FunctionData::Rational(f) => {
            let g = apply(tree, kind, &f)?;
            (
                summary(tree, &f, op.p)?,
                summary(tree, &g, op.p)?,
                rational_function_json(&g),
            )
        }
        FunctionData::Complex(f) => {
            let g = apply(tree, kind, &f)?;
            (
                summary(tree, &f, op.p)?,
                summary(tree, &g, op.p)?,
                complex_function_json(&g),
            )
        }
    };
    let mut v = json!({"operator": kind.to_string(), "input": before, "output": after});
    match out {
        Some(path) => {
            std::fs::write(path, serde_json::to_string_pretty(&result).expect("json"))
                .map_err(|e| Error::Format(format!("cannot write `{}`: {e}", path.display())))?;
            v["output_file"] = json!(path.display().to_string());
        }
        None => v["function"] = result,
    }
    Ok(Output::new(v))
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Describe { tree } => describe(&load(tree)?),
        Command::Norm { tree, op } => norm(&load(tree)?, op),
        Command::Radius { tree, op, p, max_power } => radius(&load(tree)?, *op, *p, *max_power),
        Command::Witness {
            tree,
            kind,
            lambda,
            vertex,
            p,
            space,
            out,
        } => witness(&load(tree)?, *kind, lambda, vertex, *p, *space, out),
        Command::Hypercyclic {
            tree,
            op,
            samples,
            n_max,
            seed,
            p,
            force,
        } => hypercyclic(
            &load(tree)?,
            *op,
            KgsOptions {
                samples: *samples,
                n_max: *n_max,
                p: *p,
                seed: *seed,
                force: *force,
            },
        ),
        Command::Gallery { command } => gallery_command(command),
        Command::Verify {
            tree,
            op,
            trials,
            seed,
            grid,
            budget,
        } => verify(&load(tree)?, op, *trials, *seed, grid, *budget),
        Command::Apply { tree, op, input, out } => apply_command(&load(tree)?, op, input, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => match out.emit(cli.format == Format::Csv) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(1)
        }
    }
}
