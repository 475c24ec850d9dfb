//! `pa`: command-line front end for the piecewise affine engine.
//!
//! Subcommands operate on JSON artifacts (expressions, families, complexes)
//! with exact rationals serialized as `"p/q"` strings. Structured errors go
//! to stdout as `{"error": kind, "detail": ...}` with exit code 1; malformed
//! input exits with code 2.

use clap::{Args, Parser, Subcommand};
use pa_core::affine::{AffineFunction, Point, SolidBox};
use pa_core::approx::{monotone_under_approx_with, uniform_approx_with, ContinuousOracle};
use pa_core::cells::{CellComplex, CellComplexDocument, CharacteristicPair};
use pa_core::expr::MinMaxExpr;
use pa_core::lpa::{
    bump, lpa_characteristic_pairs_with, restrict_to_box, sup_family, tile_decompose_with,
    LpaDocument, LpaFunction,
};
use pa_core::rat::{decimal_string, format_rat, parse_rat, Rat};
use pa_core::{Error, Limits};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pa", about = "exact piecewise affine function engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression or family at a point.
    Eval {
        #[arg(long)]
        expr: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        /// Comma-separated rational coordinates, e.g. "1/2,-3".
        #[arg(long)]
        point: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cell decomposition of an expression on a box.
    Cells {
        #[arg(long)]
        expr: PathBuf,
        /// Box "c1,...,cm;radius"; exclusive with --radius.
        #[arg(long, value_name = "BOX")]
        r#box: Option<String>,
        /// Analyze on Omega_n.
        #[arg(long)]
        radius: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Characteristic pairs of an expression or family restriction.
    Pairs {
        #[arg(long)]
        expr: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_name = "BOX")]
        r#box: Option<String>,
        #[arg(long)]
        radius: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a bump function expression.
    Bump {
        /// Comma-separated rational center coordinates.
        #[arg(long)]
        center: String,
        #[arg(long)]
        inner: String,
        #[arg(long)]
        outer: String,
        #[arg(long)]
        height: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Box tiling of a nonnegative PA function into a locally finite family.
    Decompose {
        #[arg(long)]
        expr: PathBuf,
        /// Serialize members with anchors within this radius.
        #[arg(long)]
        radius: u32,
        /// Certify nonnegativity exactly on Omega_n before tiling.
        #[arg(long)]
        certify: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// PA restriction of a family to Omega_n.
    Restrict {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        radius: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Uniform LPA approximation of a built-in oracle.
    Approx {
        /// Oracle name: abs, min-abs-1, quadratic, poly:c0,c1,...
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        radius: u32,
        /// json: approximant + report; csv: validation samples.
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monotone increasing PA under-approximations of a nonnegative oracle.
    Monotone {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        count: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dense grid samples of an expression or family as CSV.
    Sample {
        #[arg(long)]
        expr: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_name = "BOX")]
        r#box: String,
        #[arg(long)]
        step: String,
        /// Significant digits for decimal rendering.
        #[arg(long, default_value_t = 12)]
        digits: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run invariant checks on an artifact file.
    Verify {
        #[arg(long)]
        expr: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

enum Failure {
    /// Engine error: exit 1 with a structured error object.
    Engine(Error),
    /// Malformed input: exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Input(msg),
            other => Failure::Engine(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Engine(e)) => {
            println!(
                "{}",
                json!({"error": e.kind(), "detail": e.to_string()})
            );
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            println!(
                "{}",
                json!({"error": "malformed_input", "detail": msg})
            );
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_expr(path: &Path) -> Result<MinMaxExpr, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("invalid expression JSON in {}: {e}", path.display())))
}

fn load_family(path: &Path) -> Result<LpaFunction, Failure> {
    let text = read_file(path)?;
    let doc: LpaDocument = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("invalid family JSON in {}: {e}", path.display())))?;
    Ok(LpaFunction::from_document(doc)?)
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    let coords = s
        .split(',')
        .map(|c| parse_rat(c).map_err(|e| Failure::Input(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.is_empty() {
        return Err(Failure::Input("point needs at least one coordinate".into()));
    }
    Ok(Point::new(coords))
}

fn parse_box(s: &str) -> Result<SolidBox, Failure> {
    let (center, radius) = s
        .split_once(';')
        .ok_or_else(|| Failure::Input("box format is \"c1,...,cm;radius\"".into()))?;
    let center = parse_point(center)?;
    let radius = parse_rat(radius).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(SolidBox::new(center, radius)?)
}

fn analysis_box(
    bx: &Option<String>,
    radius: &Option<u32>,
    m: usize,
) -> Result<SolidBox, Failure> {
    match (bx, radius) {
        (Some(b), None) => parse_box(b),
        (None, Some(n)) => {
            if *n == 0 {
                return Err(Failure::Input("radius must be positive".into()));
            }
            Ok(SolidBox::omega(m, *n))
        }
        _ => Err(Failure::Input(
            "exactly one of --box and --radius is required".into(),
        )),
    }
}

fn emit(output: &OutputArgs, content: String) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Input(format!("serialization failed: {e}")))
}

#[derive(Serialize)]
struct PairEntry {
    component: AffineFunction,
    cells: Vec<usize>,
}

#[derive(Serialize)]
struct PairsDocument {
    #[serde(flatten)]
    complex: CellComplexDocument,
    pairs: Vec<PairEntry>,
}

fn pair_entries(pairs: Vec<CharacteristicPair>) -> Vec<PairEntry> {
    pairs
        .into_iter()
        .map(|p| PairEntry {
            component: p.component,
            cells: p.region_cells,
        })
        .collect()
}

fn run(command: Command) -> Result<(), Failure> {
    let limits = Limits::default();
    match command {
        Command::Eval {
            expr,
            family,
            point,
            output,
        } => {
            let x = parse_point(&point)?;
            let value = match (expr, family) {
                (Some(path), None) => load_expr(&path)?.eval(&x)?,
                (None, Some(path)) => load_family(&path)?.eval(&x)?,
                _ => {
                    return Err(Failure::Input(
                        "exactly one of --expr and --family is required".into(),
                    ))
                }
            };
            emit(&output, format_rat(&value))
        }
        Command::Cells {
            expr,
            r#box,
            radius,
            output,
        } => {
            let e = load_expr(&expr)?;
            let bx = analysis_box(&r#box, &radius, e.dim())?;
            let complex = CellComplex::build_with(&e, &bx, &limits)?;
            emit(&output, to_json(&complex.to_document())?)
        }
        Command::Pairs {
            expr,
            family,
            r#box,
            radius,
            output,
        } => match (expr, family) {
            (Some(path), None) => {
                let e = load_expr(&path)?;
                let bx = analysis_box(&r#box, &radius, e.dim())?;
                let complex = CellComplex::build_with(&e, &bx, &limits)?;
                let doc = PairsDocument {
                    pairs: pair_entries(complex.pairs()),
                    complex: complex.to_document(),
                };
                emit(&output, to_json(&doc)?)
            }
            (None, Some(path)) => {
                let h = load_family(&path)?;
                let n = radius.ok_or_else(|| {
                    Failure::Input("--radius is required with --family".into())
                })?;
                let pairs = lpa_characteristic_pairs_with(&h, n, &limits)?;
                let restriction = restrict_to_box(&h, n)?;
                let complex =
                    CellComplex::build_with(&restriction, &SolidBox::omega(h.dim(), n), &limits)?;
                let doc = PairsDocument {
                    pairs: pair_entries(pairs),
                    complex: complex.to_document(),
                };
                emit(&output, to_json(&doc)?)
            }
            _ => Err(Failure::Input(
                "exactly one of --expr and --family is required".into(),
            )),
        },
        Command::Bump {
            center,
            inner,
            outer,
            height,
            output,
        } => {
            let center = parse_point(&center)?;
            let inner = parse_rat(&inner)?;
            let outer = parse_rat(&outer)?;
            let height = parse_rat(&height)?;
            let e = bump(&center, &inner, &outer, &height)?;
            emit(&output, to_json(&e)?)
        }
        Command::Decompose {
            expr,
            radius,
            certify,
            output,
        } => {
            let e = load_expr(&expr)?;
            let family = tile_decompose_with(&e, certify, &limits)?;
            let doc = sup_family(family).to_document(radius)?;
            emit(&output, to_json(&doc)?)
        }
        Command::Restrict {
            family,
            radius,
            output,
        } => {
            let h = load_family(&family)?;
            let e = restrict_to_box(&h, radius)?;
            emit(&output, to_json(&e)?)
        }
        Command::Approx {
            oracle,
            eps,
            radius,
            format,
            output,
        } => {
            let oracle = ContinuousOracle::by_name(&oracle)?;
            let eps = parse_rat(&eps)?;
            let (approximant, report) = uniform_approx_with(&oracle, &eps, radius, &limits)?;
            match format.as_str() {
                "json" => {
                    let doc = json!({
                        "positive": serde_json::to_value(
                            approximant.positive.to_document(radius + 2)?
                        ).map_err(|e| Failure::Input(e.to_string()))?,
                        "negative": serde_json::to_value(
                            approximant.negative.to_document(radius + 2)?
                        ).map_err(|e| Failure::Input(e.to_string()))?,
                        "report": serde_json::to_value(&report)
                            .map_err(|e| Failure::Input(e.to_string()))?,
                    });
                    emit(&output, serde_json::to_string_pretty(&doc).unwrap())
                }
                "csv" => {
                    let m = oracle.dim();
                    let covered = SolidBox::omega(m, report.covered_radius);
                    let mut csv = String::new();
                    for i in 1..=m {
                        csv.push_str(&format!("x{i},"));
                    }
                    csv.push_str("f,h,err\n");
                    for x in grid_points(&covered, &parse_rat("1/4").unwrap()) {
                        let f = oracle.eval(&x)?;
                        let h = approximant.eval(&x)?;
                        let err = pa_core::rat::rat_abs(&(&f - &h));
                        for c in &x.coords {
                            csv.push_str(&decimal_string(c, 12));
                            csv.push(',');
                        }
                        csv.push_str(&format!(
                            "{},{},{}\n",
                            decimal_string(&f, 12),
                            decimal_string(&h, 12),
                            decimal_string(&err, 12)
                        ));
                    }
                    emit(&output, csv)
                }
                other => Err(Failure::Input(format!("unknown format: {other:?}"))),
            }
        }
        Command::Monotone {
            oracle,
            count,
            output,
        } => {
            let oracle = ContinuousOracle::by_name(&oracle)?;
            let seq = monotone_under_approx_with(&oracle, count, &limits)?;
            emit(&output, to_json(&seq)?)
        }
        Command::Sample {
            expr,
            family,
            r#box,
            step,
            digits,
            output,
        } => {
            let bx = parse_box(&r#box)?;
            let step = parse_rat(&step)?;
            if step <= Rat::from_integer(0.into()) {
                return Err(Failure::Input("step must be positive".into()));
            }
            enum Target {
                Expr(MinMaxExpr),
                Family(Box<LpaFunction>),
            }
            let target = match (expr, family) {
                (Some(path), None) => Target::Expr(load_expr(&path)?),
                (None, Some(path)) => Target::Family(Box::new(load_family(&path)?)),
                _ => {
                    return Err(Failure::Input(
                        "exactly one of --expr and --family is required".into(),
                    ))
                }
            };
            let m = bx.dim();
            let mut csv = String::new();
            for i in 1..=m {
                csv.push_str(&format!("x{i}"));
                csv.push(',');
            }
            csv.push_str("value\n");
            for x in grid_points(&bx, &step) {
                let v = match &target {
                    Target::Expr(e) => e.eval(&x)?,
                    Target::Family(h) => h.eval(&x)?,
                };
                for c in &x.coords {
                    csv.push_str(&decimal_string(c, digits));
                    csv.push(',');
                }
                csv.push_str(&decimal_string(&v, digits));
                csv.push('\n');
            }
            emit(&output, csv)
        }
        Command::Verify {
            expr,
            family,
            complex,
            report,
        } => verify(expr, family, complex, report),
    }
}

fn grid_points(bx: &SolidBox, step: &Rat) -> Vec<Point> {
    let m = bx.dim();
    let mut axes: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut coords = Vec::new();
        let mut x = bx.lo(i);
        let hi = bx.hi(i);
        while x <= hi {
            coords.push(x.clone());
            x += step;
        }
        axes.push(coords);
    }
    let mut out: Vec<Vec<Rat>> = vec![vec![]];
    for axis in &axes {
        let mut next = Vec::new();
        for prefix in &out {
            for c in axis {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(Point::new).collect()
}

fn verify(
    expr: Option<PathBuf>,
    family: Option<PathBuf>,
    complex: Option<PathBuf>,
    report: Option<PathBuf>,
) -> Result<(), Failure> {
    let limits = Limits::default();
    let fail = |detail: String| -> Failure {
        Failure::Engine(Error::InternalInconsistency(detail))
    };
    let mut checked = false;
    if let Some(path) = expr {
        let e = load_expr(&path)?;
        // Lattice identities at deterministic sample points.
        let m = e.dim();
        let bx = SolidBox::omega(m, 2);
        let joined = e.join(&e)?;
        let met = e.meet(&e)?;
        let pruned = e.prune(&bx)?;
        for x in grid_points(&bx, &parse_rat("1/2").unwrap()) {
            let v = e.eval(&x)?;
            if joined.eval(&x)? != v || met.eval(&x)? != v {
                return Err(fail("join/meet idempotence failed".into()));
            }
            if pruned.eval(&x)? != v {
                return Err(fail("prune changed evaluation on its box".into()));
            }
        }
        println!("expression ok: {} clauses", e.clauses().len());
        checked = true;
    }
    if let Some(path) = family {
        let h = load_family(&path)?;
        let members = h
            .family
            .explicit_members()
            .ok_or_else(|| fail("family document must be explicit".into()))?;
        for (i, member) in members.iter().enumerate() {
            if !member.verify_vanishing_with(&limits)? {
                return Err(fail(format!(
                    "member {i} does not vanish outside its support"
                )));
            }
            if h.family.is_positive() && !member.verify_nonnegative_with(&limits)? {
                return Err(fail(format!("member {i} of a positive family is negative")));
            }
        }
        println!("family ok: {} members", members.len());
        checked = true;
    }
    if let Some(path) = complex {
        let text = read_file(&path)?;
        let doc: CellComplexDocument = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("invalid complex JSON: {e}")))?;
        let planes = pa_core::cells::induced_hyperplanes(&doc.components)?;
        let mut seen = std::collections::HashSet::new();
        for (i, cell) in doc.cells.iter().enumerate() {
            if cell.signs.len() != planes.len() {
                return Err(fail(format!("cell {i} sign vector length mismatch")));
            }
            if !doc.bx.contains_strictly(&cell.witness)? {
                return Err(fail(format!("cell {i} witness outside the open box")));
            }
            for (h, s) in planes.iter().zip(cell.signs.chars()) {
                let v = h.g.eval(&cell.witness)?;
                let ok = match s {
                    '+' => v > Rat::from_integer(0.into()),
                    '-' => v < Rat::from_integer(0.into()),
                    _ => false,
                };
                if !ok {
                    return Err(fail(format!("cell {i} witness violates its sign vector")));
                }
            }
            if cell.component >= doc.components.len() {
                return Err(fail(format!("cell {i} assignment out of range")));
            }
            if !seen.insert(cell.signs.clone()) {
                return Err(fail(format!("cell {i} duplicates a sign vector")));
            }
        }
        println!("complex ok: {} cells", doc.cells.len());
        checked = true;
    }
    if let Some(path) = report {
        let text = read_file(&path)?;
        let doc: pa_core::approx::ApproxReport = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("invalid report JSON: {e}")))?;
        if let Some(cb) = &doc.certified_bound {
            if cb > &doc.epsilon {
                return Err(fail("certified bound exceeds epsilon".into()));
            }
            if doc.max_observed_error > *cb {
                return Err(fail("observed error exceeds certified bound".into()));
            }
        }
        println!("report ok");
        checked = true;
    }
    if !checked {
        return Err(Failure::Input(
            "verify needs one of --expr, --family, --complex, --report".into(),
        ));
    }
    Ok(())
}
