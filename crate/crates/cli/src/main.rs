//! `graphcalc`: batch front end for the graphcalc library. Reports are JSON
//! (or CSV for tabular output) on standard output. Exit codes: 0 success,
//! 1 a verification or soundness check failed, 2 bad input or usage.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphcalc::error::Error;
use graphcalc::fnspace::VertexFunction;
use graphcalc::generators::{
    classical_radial, complete, cycle, dirichlet_path, doubled_radial, hypercube, path, radial_graph,
    seeded_random_graph, RandomGraphSpec,
};
use graphcalc::graph::{half_degrees, l_stats, WeightedGraph};
use graphcalc::heat::{
    default_t_grid, eigenvalue_lower_bounds, general_decay_bound, heat_kernel, nash_diagonal_bound, DecayProfile,
};
use graphcalc::isoperimetry::{iso_constant, EnumOptions, Variant, DEFAULT_CAP};
use graphcalc::operators::{operator_norm_report, spectral_decomposition, Mode};
use graphcalc::spectral_bounds::{alon_field, bound_report};
use graphcalc::verify::{run_suite_on, CheckKind, Suite, VerifyOptions};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{Map, Value};

use report::{envelope, format_f64, num, nums, object, opt_num, sha256_hex};

#[derive(Parser)]
#[command(name = "graphcalc", version, about = "Calculus on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sizes, measures, half-degrees and the Laplacian norm sandwich.
    Info(InfoArgs),
    /// Laplacian eigenvalues (and optionally eigenfunctions).
    Spectrum(SpectrumArgs),
    /// Isoperimetric constant by exhaustive enumeration.
    Iso(IsoArgs),
    /// Cheeger-type eigenvalue lower bounds against the true eigenvalue.
    Bounds(BoundsArgs),
    /// Heat kernel values, Nash decay or generalised decay checks.
    Heat(HeatArgs),
    /// Randomised verification suite on one graph.
    Verify(VerifyArgs),
    /// Write a generated graph as JSON.
    Gen(GenArgs),
    /// Alon's max-flow vector field for a vertex set, with its certificate.
    Flow(FlowArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Closed,
    Dirichlet,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Closed => Mode::Closed,
            ModeArg::Dirichlet => Mode::Dirichlet,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Open,
    Tilde,
    TildePrime,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Open => Variant::Open,
            VariantArg::Tilde => Variant::Tilde,
            VariantArg::TildePrime => Variant::TildePrime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Coarea,
    Ff,
    Green,
    Sobolev,
    Nash,
    Trudinger,
    Gennash,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Cycle,
    Complete,
    Hypercube,
    Radial,
    DoubledRadial,
    ClassicalRadial,
    Random,
}

#[derive(Args)]
struct Enumeration {
    /// Largest interior (or vertex) count enumerated without --force.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_subset: usize,
    /// Enumerate regardless of size.
    #[arg(long)]
    force: bool,
}

impl Enumeration {
    fn options(&self) -> EnumOptions {
        EnumOptions {
            cap: self.max_subset,
            force: self.force,
        }
    }
}

#[derive(Args)]
struct InfoArgs {
    file: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    file: PathBuf,
    /// Defaults to dirichlet when the graph has boundary, closed otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Only the k smallest eigenvalues.
    #[arg(long)]
    k: Option<usize>,
    /// Add one column per vertex with the eigenfunction values.
    #[arg(long)]
    vectors: bool,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
}

#[derive(Args)]
struct IsoArgs {
    file: PathBuf,
    /// Dimension ν ≥ 1: decimal, rational p/q, or inf.
    #[arg(long, default_value = "inf", value_parser = parse_real)]
    nu: f64,
    #[arg(long, value_enum, default_value = "open")]
    variant: VariantArg,
    #[command(flatten)]
    enumeration: Enumeration,
}

#[derive(Args)]
struct BoundsArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Also check the eigenvalue corollary λ_k ≥ (k/V)^{2/ν}2^{−4/ν}(Ĩρ^{−1/2}/2)²/e
    /// (closed mode).
    #[arg(long, value_parser = parse_real)]
    nu: Option<f64>,
    #[command(flatten)]
    enumeration: Enumeration,
}

#[derive(Args)]
struct HeatArgs {
    file: PathBuf,
    /// Comma-separated times; defaults to 32 log-spaced points per decade on [1e-2, 1e2].
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    t: Vec<f64>,
    /// Diagonal values K(x,x,t): for --x, or for every active vertex.
    #[arg(long)]
    diag: bool,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Check the Nash diagonal decay G(x,x,t)·t^{ν/2} ≤ C₂ (needs --nu).
    #[arg(long)]
    nash: bool,
    #[arg(long, value_parser = parse_real)]
    nu: Option<f64>,
    /// Check K(x,x,t) ≤ F⁻¹(t/(32ρ_sup)) for φ(x) = x^{1/ν}/I_ν, given as power:ν.
    #[arg(long)]
    decay_profile: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
    #[command(flatten)]
    enumeration: Enumeration,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "3", value_parser = parse_real)]
    nu: f64,
    /// A VertexFunction JSON file used in every trial instead of random functions.
    #[arg(long)]
    function: Option<PathBuf>,
    #[command(flatten)]
    enumeration: Enumeration,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    /// Size (vertices, or radial length).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Hypercube dimension.
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value = "2", value_parser = parse_real)]
    nu: f64,
    /// Population scale of the classical radial graph.
    #[arg(long, default_value_t = 1)]
    m: u64,
    /// Mark both path ends as boundary.
    #[arg(long)]
    boundary_ends: bool,
    /// Random graphs: edges beyond the spanning tree.
    #[arg(long, default_value_t = 0)]
    extra: usize,
    /// Random graphs: number of boundary vertices.
    #[arg(long, default_value_t = 0)]
    boundary: usize,
    /// Random graphs: random measures and weights.
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    file: PathBuf,
    /// Comma-separated vertex ids of the set A.
    #[arg(long, value_delimiter = ',', required = true)]
    set: Vec<String>,
    /// Magnification parameter as an integer or p/q; defaults to the exact
    /// magnification of A.
    #[arg(long)]
    c: Option<String>,
}

/// How a command ended: a report was produced (passing or not), or the
/// input was unusable.
enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => return Ok(f64::INFINITY),
        _ => {}
    }
    if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
        if b == 0.0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(a / b);
    }
    let x: f64 = t.parse().map_err(|_| format!("bad number `{s}`"))?;
    if x.is_nan() {
        return Err("NaN is not a valid parameter".into());
    }
    Ok(x)
}

struct Input {
    graph: WeightedGraph,
    sha256: String,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Input, Failure> {
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Input(format!("{} is not UTF-8", path.display())))?;
    Ok(Input {
        graph: WeightedGraph::from_json_str(&text)?,
        sha256: sha256_hex(&bytes),
    })
}

fn default_mode(g: &WeightedGraph, m: Option<ModeArg>) -> Mode {
    m.map(Mode::from).unwrap_or(if g.is_closed() { Mode::Closed } else { Mode::Dirichlet })
}

fn ids(g: &WeightedGraph, vs: &[usize]) -> Value {
    Value::Array(vs.iter().map(|&v| Value::from(g.id(v))).collect())
}

fn by_id(g: &WeightedGraph, f: &[f64]) -> Value {
    Value::Object((0..g.n()).map(|v| (g.id(v).to_string(), num(f[v]))).collect())
}

fn emit(v: &Value) {
    println!("{}", report::to_string(v));
}

fn csv_row(cells: &[String]) {
    println!("{}", cells.join(","));
}

fn info(a: &InfoArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let hd = half_degrees(g);
    let loops = g.edges().iter().filter(|e| e.is_loop()).count();
    let mut body = object([
        ("vertices", g.n().into()),
        ("edges", g.edges().len().into()),
        ("interior", g.interior().len().into()),
        ("boundary", g.boundary().len().into()),
        ("closed", g.is_closed().into()),
        ("connected", g.is_connected().into()),
        ("traditional", g.is_traditional().into()),
        ("unit_lengths", g.has_unit_lengths().into()),
        ("self_loops", loops.into()),
        ("total_vertex_measure", num(g.total_measure())),
        ("total_edge_measure", num(g.total_edge_measure())),
        ("rho_inf", num(hd.rho_inf)),
        ("rho_sup", num(hd.rho_sup)),
        ("rho", by_id(g, &hd.rho)),
        ("l_sup", num(l_stats(g, 0).l_sup)),
        ("sup_length", num(g.sup_length())),
    ]);
    let mut ok = true;
    if !g.interior().is_empty() {
        let r = operator_norm_report(g);
        ok = r.lower_holds && r.upper_holds;
        body.insert(
            "laplacian_norm".into(),
            Value::Object(object([
                ("norm", num(r.norm)),
                ("l_sup", num(r.l_sup)),
                ("lower_holds", r.lower_holds.into()),
                ("upper_holds", r.upper_holds.into()),
            ])),
        );
    }
    emit(&envelope("info", Some(&input.sha256), body));
    Ok(ok)
}

fn spectrum(a: &SpectrumArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let mode = default_mode(g, a.mode);
    let d = spectral_decomposition(g, mode, a.k)?;
    match a.out {
        OutFormat::Csv => {
            let mut header = vec!["index".to_string(), "eigenvalue".to_string()];
            if a.vectors {
                header.extend((0..g.n()).map(|v| g.id(v).to_string()));
            }
            csv_row(&header);
            for (i, &lambda) in d.eigenvalues.iter().enumerate() {
                let mut row = vec![(i + 1).to_string(), format_f64(lambda)];
                if a.vectors {
                    row.extend(d.eigenfunctions[i].iter().map(|&x| format_f64(x)));
                }
                csv_row(&row);
            }
        }
        OutFormat::Json => {
            let mut body = object([("mode", mode.as_str().into()), ("eigenvalues", nums(&d.eigenvalues))]);
            if a.vectors {
                let fs: Vec<Value> = d.eigenfunctions.iter().map(|f| by_id(g, f)).collect();
                body.insert("eigenfunctions".into(), Value::Array(fs));
            }
            emit(&envelope("spectrum", Some(&input.sha256), body));
        }
    }
    Ok(true)
}

fn iso(a: &IsoArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let r = iso_constant(g, a.nu, a.variant.into(), a.enumeration.options())?;
    let witness = r.witness.as_ref().map_or(Value::Null, |w| {
        Value::Object(object([
            ("vertices", ids(g, &w.vertices)),
            ("area", num(w.area)),
            ("vmass", num(w.vmass)),
        ]))
    });
    let body = object([
        ("nu", num(r.nu)),
        ("variant", r.variant.as_str().into()),
        ("value", num(r.value)),
        ("witness", witness),
    ]);
    emit(&envelope("iso", Some(&input.sha256), body));
    Ok(true)
}

fn bounds(a: &BoundsArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let mode = default_mode(g, a.mode);
    let opts = a.enumeration.options();
    let r = bound_report(g, mode, opts)?;
    let mut sound = r.is_sound();
    let entries: Vec<Value> = r
        .bounds
        .iter()
        .map(|b| {
            Value::Object(object([
                ("name", b.name.into()),
                ("value", num(b.value)),
                ("applicable", b.applicable.into()),
                ("iso_inf", opt_num(b.iso_inf)),
                ("c", opt_num(b.c)),
                ("rho_sup", num(b.rho_sup)),
                ("sup_length", num(b.sup_length)),
                ("sound", (!b.applicable || b.value <= r.lambda + 1e-9).into()),
            ]))
        })
        .collect();
    let mut body = object([
        ("mode", mode.as_str().into()),
        ("lambda", num(r.lambda)),
        ("bounds", Value::Array(entries)),
    ]);
    if let Some(nu) = a.nu {
        if mode != Mode::Closed {
            return Err(Failure::Input("the eigenvalue corollary needs --mode closed".into()));
        }
        let e = eigenvalue_lower_bounds(g, nu, opts)?;
        sound &= e.is_sound();
        let rows: Vec<Value> = e
            .entries
            .iter()
            .map(|x| {
                Value::Object(object([
                    ("k", x.k.into()),
                    ("bound", num(x.bound)),
                    ("lambda", num(x.lambda)),
                    ("holds", x.holds.into()),
                ]))
            })
            .collect();
        body.insert(
            "eigenvalue_corollary".into(),
            Value::Object(object([
                ("nu", num(e.nu)),
                ("iso_tilde", num(e.iso_tilde)),
                ("rho_sup", num(e.rho_sup)),
                ("total_measure", num(e.total_measure)),
                ("entries", Value::Array(rows)),
            ])),
        );
    }
    body.insert("sound".into(), sound.into());
    emit(&envelope("bounds", Some(&input.sha256), body));
    Ok(sound)
}

fn heat(a: &HeatArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let mode = default_mode(g, a.mode);
    let grid = if a.t.is_empty() { default_t_grid() } else { a.t.clone() };
    if let Some(&t) = grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Failure::Input(format!("time {t} must be finite and nonnegative")));
    }
    let opts = a.enumeration.options();
    if a.nash {
        let nu = a.nu.ok_or_else(|| Failure::Input("--nash needs --nu".into()))?;
        let r = nash_diagonal_bound(g, nu, mode, &grid, opts)?;
        let argmax = r.argmax.map_or(Value::Null, |(x, t)| {
            Value::Object(object([("vertex", g.id(x).into()), ("t", num(t))]))
        });
        let body = object([
            ("check", "nash".into()),
            ("nu", num(r.nu)),
            ("mode", r.mode.as_str().into()),
            ("iso", num(r.iso)),
            ("rho_sup", num(r.rho_sup)),
            ("gamma", num(r.gamma)),
            ("c", num(r.c)),
            ("c1", num(r.c1)),
            ("c2", num(r.c2)),
            ("applicable", r.applicable.into()),
            ("max_scaled", num(r.max_scaled)),
            ("argmax", argmax),
            ("holds", r.holds.into()),
            ("t_points", grid.len().into()),
        ]);
        emit(&envelope("heat", Some(&input.sha256), body));
        return Ok(r.holds);
    }
    if let Some(spec) = &a.decay_profile {
        let nu = spec
            .strip_prefix("power:")
            .ok_or_else(|| Failure::Input(format!("unknown decay profile `{spec}` (expected power:ν)")))
            .and_then(|s| parse_real(s).map_err(Failure::Input))?;
        if g.is_closed() {
            return Err(Failure::Input("the decay profile check needs a graph with boundary".into()));
        }
        let iso = iso_constant(g, nu, Variant::Open, opts)?.value;
        let profile = DecayProfile::power(nu, 1.0 / iso, half_degrees(g).rho_sup)?;
        let probes: Vec<(usize, f64)> = g
            .interior()
            .into_iter()
            .flat_map(|x| grid.iter().filter(|&&t| t > 0.0).map(move |&t| (x, t)))
            .collect();
        let r = general_decay_bound(g, &profile, &probes, opts)?;
        let holds = r.all_hold();
        let entries: Vec<Value> = r
            .entries
            .iter()
            .map(|e| {
                Value::Object(object([
                    ("vertex", g.id(e.x).into()),
                    ("t", num(e.t)),
                    ("kernel", num(e.kernel)),
                    ("bound", num(e.bound)),
                    ("holds", e.holds.into()),
                ]))
            })
            .collect();
        let body = object([
            ("check", "decay_profile".into()),
            ("profile", spec.clone().into()),
            ("nu", num(nu)),
            ("iso", num(iso)),
            ("c", num(r.c)),
            ("entries", Value::Array(entries)),
            ("holds", holds.into()),
        ]);
        emit(&envelope("heat", Some(&input.sha256), body));
        return Ok(holds);
    }

    let k = heat_kernel(g, mode)?;
    let x = a.x.as_deref().map(|id| g.index_of(id)).transpose()?;
    let y = a.y.as_deref().map(|id| g.index_of(id)).transpose()?;
    // (column label, x, y) per output series.
    let series: Vec<(String, usize, usize)> = match (a.diag, x, y) {
        (true, Some(x), None) => vec![("value".into(), x, x)],
        (true, None, None) => k.active().iter().map(|&v| (g.id(v).to_string(), v, v)).collect(),
        (false, Some(x), Some(y)) => vec![("value".into(), x, y)],
        _ => return Err(Failure::Input("choose --diag [--x ID], --x ID --y ID, --nash or --decay-profile".into())),
    };
    match a.out {
        OutFormat::Csv => {
            let mut header = vec!["t".to_string()];
            header.extend(series.iter().map(|s| s.0.clone()));
            csv_row(&header);
            for &t in &grid {
                let mut row = vec![format_f64(t)];
                row.extend(series.iter().map(|&(_, x, y)| format_f64(k.evaluate(x, y, t))));
                csv_row(&row);
            }
        }
        OutFormat::Json => {
            let cols: Map<String, Value> = series
                .iter()
                .map(|(label, x, y)| {
                    let vals: Vec<f64> = grid.iter().map(|&t| k.evaluate(*x, *y, t)).collect();
                    (label.clone(), nums(&vals))
                })
                .collect();
            let body = object([
                ("mode", mode.as_str().into()),
                ("t", nums(&grid)),
                ("x", x.map_or(Value::Null, |v| g.id(v).into())),
                ("y", y.or(x.filter(|_| a.diag)).map_or(Value::Null, |v| g.id(v).into())),
                ("values", Value::Object(cols)),
            ]);
            emit(&envelope("heat", Some(&input.sha256), body));
        }
    }
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let suite = match a.suite {
        SuiteArg::Coarea => Suite::Coarea,
        SuiteArg::Ff => Suite::Ff,
        SuiteArg::Green => Suite::Green,
        SuiteArg::Sobolev => Suite::Sobolev,
        SuiteArg::Nash => Suite::Nash,
        SuiteArg::Trudinger => Suite::Trudinger,
        SuiteArg::Gennash => Suite::Gennash,
    };
    let function = match &a.function {
        Some(p) => {
            let bytes = read_bytes(p)?;
            let text = String::from_utf8(bytes).map_err(|_| Failure::Input(format!("{} is not UTF-8", p.display())))?;
            Some(VertexFunction::from_json_str(g, &text)?)
        }
        None => None,
    };
    let opts = VerifyOptions {
        trials: a.trials,
        seed: a.seed,
        nu: a.nu,
        enumeration: a.enumeration.options(),
    };
    let r = run_suite_on(g, suite, &opts, function.as_deref())?;
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            Value::Object(object([
                ("name", c.name.clone().into()),
                (
                    "kind",
                    match c.kind {
                        CheckKind::Identity => "identity",
                        CheckKind::Inequality => "inequality",
                    }
                    .into(),
                ),
                ("evaluated", c.evaluated.into()),
                ("failures", c.failures.into()),
                ("worst", num(c.worst)),
                ("tolerance", num(c.tolerance)),
            ]))
        })
        .collect();
    let failure = r.first_failure.as_ref().map_or(Value::Null, |w| {
        Value::Object(object([
            ("trial", w.trial.into()),
            ("check", w.check.clone().into()),
            ("function", if w.values.len() == g.n() { by_id(g, &w.values) } else { nums(&w.values) }),
        ]))
    });
    let passed = r.passed();
    let body = object([
        ("suite", r.suite.as_str().into()),
        ("mode", r.mode.as_str().into()),
        ("nu", num(r.nu)),
        ("iso", opt_num(r.iso)),
        ("trials", r.trials.into()),
        ("seed", r.seed.into()),
        ("checks", Value::Array(checks)),
        ("first_failure", failure),
        ("passed", passed.into()),
    ]);
    emit(&envelope("verify", Some(&input.sha256), body));
    Ok(passed)
}

fn gen(a: &GenArgs) -> Outcome {
    let g = match a.family {
        Family::Path if a.boundary_ends => dirichlet_path(a.n)?,
        Family::Path => path(a.n)?,
        Family::Cycle => cycle(a.n)?,
        Family::Complete => complete(a.n)?,
        Family::Hypercube => hypercube(a.d)?,
        Family::Radial => radial_graph(a.n, a.nu)?,
        Family::DoubledRadial => doubled_radial(a.n, a.nu)?.0,
        Family::ClassicalRadial => classical_radial(a.n, a.nu, a.m)?.graph,
        Family::Random => {
            let spec = RandomGraphSpec {
                weighted: a.weighted,
                boundary: a.boundary,
                ..RandomGraphSpec::traditional(a.n, a.extra)
            };
            seeded_random_graph(&spec, a.seed)?
        }
    };
    let value = serde_json::to_value(g.to_spec()).map_err(|e| Failure::Input(e.to_string()))?;
    let text = report::to_string(&value) + "\n";
    match &a.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn flow(a: &FlowArgs) -> Outcome {
    let input = load(&a.file)?;
    let g = &input.graph;
    let set = a.set.iter().map(|id| g.index_of(id.trim())).collect::<Result<Vec<_>, _>>()?;
    let c = a
        .c
        .as_deref()
        .map(|s| BigRational::from_str(s.trim()).map_err(|_| Failure::Input(format!("bad rational `{s}`"))))
        .transpose()?;
    let field = alon_field(g, &set, c)?;
    let cert = field.certify(g);
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .zip(&field.values)
        .map(|(e, x)| {
            Value::Object(object([
                ("u", g.id(e.u).into()),
                ("v", g.id(e.v).into()),
                ("x", x.to_string().into()),
            ]))
        })
        .collect();
    let opt_bool = |b: Option<bool>| b.map_or(Value::Null, Value::from);
    let holds = cert.all_hold();
    let certificate = object([
        ("unit_bound", opt_bool(cert.unit_bound)),
        ("divergence_on_set", cert.divergence_on_set.into()),
        ("divergence_off_set", cert.divergence_off_set.into()),
        ("inflow", cert.inflow.into()),
        ("outflow", cert.outflow.into()),
        ("rho_sup_sq", cert.rho_sup_sq.to_string().into()),
        ("rho_limit", cert.rho_limit.to_string().into()),
        ("rho_bound", opt_bool(cert.rho_bound)),
    ]);
    let body = object([
        ("set", ids(g, &field.set)),
        ("c", field.c.to_string().into()),
        ("c_value", opt_num(field.c.to_f64())),
        ("field", Value::Array(edges)),
        ("certificate", Value::Object(certificate)),
        ("holds", holds.into()),
    ]);
    emit(&envelope("flow", Some(&input.sha256), body));
    Ok(holds)
}

/// Caps rayon's global pool from GRAPHCALC_THREADS (0 or unset: automatic).
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("GRAPHCALC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("GRAPHCALC_THREADS must be a nonnegative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Info(a) => info(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Iso(a) => iso(a),
        Command::Bounds(a) => bounds(a),
        Command::Heat(a) => heat(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
        Command::Flow(a) => flow(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("graphcalc: {msg}");
            ExitCode::from(2)
        }
    }
}
