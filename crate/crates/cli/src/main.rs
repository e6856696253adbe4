//! Command-line front end: box spline construction and evaluation, domain
//! completeness checks, contact verification sweeps, and hierarchical
//! basis reports, all with deterministic JSON output.

use boxspline_core::algebra::{to_f64, Rational, RationalRepr};
use boxspline_core::box_spline::{box_spline, triple, DirectionTriple, PiecewisePoly};
use boxspline_core::contact::{sweep, ContactFilter};
use boxspline_core::hierarchy::{
    hier_spline_from_vec, hierarchical_completeness, hierarchical_constraint_system, kraft_select,
    represent, HierSpline, HierarchicalDomain,
};
use boxspline_core::mesh::{lp, smoothness_type, star_triangles, MulticellDomain};
use boxspline_core::spline_space::{completeness_check, is_admissible};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "boxspline", version, about = "Exact type-I box spline toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the Bernstein-Bézier form of a box spline as JSON.
    Bb(BbArgs),
    /// Evaluate a box spline exactly at a rational point.
    Eval(EvalArgs),
    /// Admissibility and completeness report for a multicell domain.
    CheckDomain(CheckDomainArgs),
    /// Run the contact verification sweep and report a compact summary.
    Verify(SweepArgs),
    /// Run the contact verification sweep and report every case.
    Sweep(SweepArgs),
    /// Hierarchical basis report for a nested domain sequence.
    Hier(HierArgs),
    /// Print the smoothness-type table of the six triangles around a vertex.
    StTable,
}

#[derive(Args)]
struct BbArgs {
    /// Convolution multiplicities, e.g. 2,1,1
    #[arg(long, value_parser = parse_triple)]
    n: DirectionTriple,
    /// Shift the spline by a lattice vector, e.g. 1,-2
    #[arg(long, value_parser = parse_shift)]
    translate: Option<(i64, i64)>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_parser = parse_triple)]
    n: DirectionTriple,
    /// Evaluation point with rational coordinates, e.g. 1/2,3
    #[arg(long, value_parser = parse_point)]
    at: (Rational, Rational),
    /// Add a decimal approximation next to the exact value.
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct CheckDomainArgs {
    #[arg(long, value_parser = parse_triple)]
    n: DirectionTriple,
    /// Path to a multicell domain JSON file.
    #[arg(long)]
    domain: std::path::PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Componentwise upper bound for the sweep, e.g. 4,4,4
    #[arg(long = "max-n", value_parser = parse_triple)]
    max_n: DirectionTriple,
    /// Which contact classes to run.
    #[arg(long, default_value = "all", value_parser = parse_contacts)]
    contacts: ContactFilter,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct HierArgs {
    #[arg(long, value_parser = parse_triple)]
    n: DirectionTriple,
    /// Path to a hierarchy JSON file ({"levels": [domain, ...]}).
    #[arg(long)]
    hierarchy: std::path::PathBuf,
    /// Optional hierarchical spline JSON to represent in the basis.
    #[arg(long)]
    represent: Option<std::path::PathBuf>,
}

fn parse_triple(s: &str) -> Result<DirectionTriple, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated integers".into());
    }
    let vals: Result<Vec<u32>, _> = parts.iter().map(|p| p.trim().parse()).collect();
    let vals = vals.map_err(|e| format!("invalid integer: {e}"))?;
    let n = triple(vals[0], vals[1], vals[2]);
    n.validate().map_err(|e| e.to_string())
}

fn parse_shift(s: &str) -> Result<(i64, i64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated integers".into());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_point(s: &str) -> Result<(Rational, Rational), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated rationals".into());
    }
    let x = Rational::from_str(parts[0].trim()).map_err(|e| format!("{e}"))?;
    let y = Rational::from_str(parts[1].trim()).map_err(|e| format!("{e}"))?;
    Ok((x, y))
}

fn parse_contacts(s: &str) -> Result<ContactFilter, String> {
    match s {
        "edge" => Ok(ContactFilter::Edge),
        "vertex" => Ok(ContactFilter::Vertex),
        "all" => Ok(ContactFilter::All),
        _ => Err("expected edge, vertex or all".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Bb(args) => {
            let b = box_spline(args.n).map_err(|e| e.to_string())?;
            let out: PiecewisePoly = match args.translate {
                Some((i, j)) => b.translate(lp(i, j)),
                None => (*b).clone(),
            };
            emit(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval(args) => {
            let b = box_spline(args.n).map_err(|e| e.to_string())?;
            let value = b.eval(&args.at.0, &args.at.1);
            let mut out = json!({ "value": value.to_string() });
            if args.float {
                out["decimal"] = json!(to_f64(&value));
            }
            emit(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckDomain(args) => {
            let text = std::fs::read_to_string(&args.domain)
                .map_err(|e| format!("{}: {e}", args.domain.display()))?;
            let domain: MulticellDomain = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let adm = is_admissible(&domain, args.n).map_err(|e| e.to_string())?;
            let comp = completeness_check(&domain, args.n).map_err(|e| e.to_string())?;
            emit(&json!({
                "admissible": adm.admissible,
                "violations": adm.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "dim_span": comp.dim_span,
                "dim_space": comp.dim_space,
                "complete": comp.complete,
            }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let report = run_sweep(&args)?;
            let failures: Vec<_> = report
                .cases
                .iter()
                .filter(|c| !c.pass)
                .map(|c| json!({ "n": c.n, "case": c.case }))
                .collect();
            emit(&json!({
                "max_n": report.max_n,
                "total": report.cases.len(),
                "passed": report.cases.iter().filter(|c| c.pass).count(),
                "failures": failures,
                "all_pass": report.all_pass,
            }))?;
            Ok(exit_for(report.all_pass))
        }
        Command::Sweep(args) => {
            let report = run_sweep(&args)?;
            let all_pass = report.all_pass;
            emit(&report)?;
            Ok(exit_for(all_pass))
        }
        Command::Hier(args) => {
            let text = std::fs::read_to_string(&args.hierarchy)
                .map_err(|e| format!("{}: {e}", args.hierarchy.display()))?;
            let h: HierarchicalDomain = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let kraft = kraft_select(&h, args.n).map_err(|e| e.to_string())?;
            let report = hierarchical_completeness(&h, args.n).map_err(|e| e.to_string())?;
            let kraft_json = json!({
                "per_level": kraft
                    .per_level
                    .iter()
                    .map(|level| level.iter().map(|v| json!([v.i, v.j])).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            let mut out = json!({
                "kraft": kraft_json,
                "dim_span_kraft": report.dim_span_kraft,
                "dim_space": report.dim_space,
                "equal": report.equal,
                "independent": report.independent,
                "admissible_levels": report.admissible_levels,
            });
            if let Some(path) = &args.represent {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let spline = parse_hier_spline(&h, &text, args.n)?;
                match represent(&h, &spline, args.n) {
                    Ok(rep) => {
                        out["representation"] = json!(rep
                            .per_level
                            .iter()
                            .map(|level| {
                                level
                                    .iter()
                                    .map(|(v, c)| {
                                        json!({
                                            "shift": [v.i, v.j],
                                            "num": RationalRepr::from(c).num,
                                            "den": RationalRepr::from(c).den,
                                        })
                                    })
                                    .collect::<Vec<_>>()
                            })
                            .collect::<Vec<_>>());
                    }
                    Err(e) => {
                        out["representation_error"] = json!(e.to_string());
                        emit(&out)?;
                        return Ok(ExitCode::from(1));
                    }
                }
            }
            emit(&out)?;
            Ok(exit_for(report.equal && report.independent))
        }
        Command::StTable => {
            let ring = star_triangles(lp(1, 1));
            // table order: the six star triangles in the order around the
            // vertex used throughout the crate
            let labels: Vec<String> = ring
                .iter()
                .map(|t| format!("{}({},{})", t.orient.letter(), t.i, t.j))
                .collect();
            let table: Vec<Vec<Vec<usize>>> = ring
                .iter()
                .map(|&a| {
                    ring.iter()
                        .map(|&b| {
                            smoothness_type(a, b)
                                .unwrap()
                                .iter()
                                .map(|e| e.index())
                                .collect()
                        })
                        .collect()
                })
                .collect();
            emit(&json!({ "triangles": labels, "smoothness_types": table }))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_sweep(args: &SweepArgs) -> Result<boxspline_core::contact::SweepReport, String> {
    let work = || sweep(args.max_n, args.contacts).map_err(|e| e.to_string());
    match args.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| e.to_string())?
            .install(work),
        None => work(),
    }
}

fn exit_for(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Hierarchical spline JSON: {"degree": d, "pieces": [{"level": l, "patch": BBPoly}]}.
fn parse_hier_spline(
    h: &HierarchicalDomain,
    text: &str,
    n: DirectionTriple,
) -> Result<HierSpline, String> {
    #[derive(serde::Deserialize)]
    struct PieceRepr {
        level: u32,
        patch: boxspline_core::bernstein::BBPoly,
    }
    #[derive(serde::Deserialize)]
    struct Repr {
        degree: u32,
        pieces: Vec<PieceRepr>,
    }
    let repr: Repr = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if repr.degree != n.degree() {
        return Err("spline degree does not match the box spline degree".into());
    }
    let dim = boxspline_core::bernstein::dim_bb(repr.degree);
    let mut flat: Vec<Rational> = Vec::new();
    let keys = h.h_triangles();
    for key in &keys {
        let piece = repr
            .pieces
            .iter()
            .find(|p| p.level == key.0 && p.patch.triangle == key.1)
            .ok_or_else(|| {
                format!(
                    "missing patch for level {} triangle ({}, {}, {})",
                    key.0,
                    key.1.i,
                    key.1.j,
                    key.1.orient.letter()
                )
            })?;
        flat.extend(piece.patch.coeffs().iter().cloned());
    }
    debug_assert_eq!(flat.len(), keys.len() * dim);
    // membership of the parsed spline is established inside represent
    let _ = hierarchical_constraint_system(h, n).map_err(|e| e.to_string())?;
    Ok(hier_spline_from_vec(h, repr.degree, &flat))
}
