use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qftbell::bounded::surface_grid;
use qftbell::config::{GridRange, RunConfig};
use qftbell::kernels::{hadamard, interval, pauli_jordan, wightman};
use qftbell::modular::{weyl_chsh_closed_form, BELL_ANGLES};
use qftbell::par::with_workers;
use qftbell::quadrature::{chsh_weyl_numeric, QuadConfig, WeylChsh};
use qftbell::search::{local_refine, random_search, reproduce_table, Objective};
use qftbell::squeezed::{chsh_analytic, chsh_squeezed, chsh_squeezed_normalized, state_coefficients, FockConfig};
use qftbell::table::{table_row, BobSign};
use qftbell::testfn::{sample_grid, WedgeBump, WedgeSide};
use qftbell::{Event, KernelConvention, Mass, SpectralParams};

const EXIT_INVALID: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 64;

/// Bell-CHSH correlators of a free massive scalar field in 1+1 dimensions.
#[derive(Debug, Parser)]
#[command(name = "qftbell", version, about)]
struct Cli {
    /// Seed for every randomized step (QMC scrambling, search sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Hadamard kernel normalization.
    #[arg(long, global = true)]
    convention: Option<KernelConvention>,
    /// Exit with status 3 if any integral misses its error target.
    #[arg(long, global = true)]
    strict: bool,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-point kernels at one separation.
    Kernels {
        #[command(subcommand)]
        op: KernelsOp,
    },
    /// Wedge test functions.
    Testfn {
        #[command(subcommand)]
        op: TestfnOp,
    },
    /// Closed-form modular correlator.
    Modular {
        #[command(subcommand)]
        op: ModularOp,
    },
    /// Numerical Weyl correlator for the bumps in the config's `weyl` block.
    WeylNumeric,
    /// Bounded-operator correlator.
    Bounded {
        #[command(subcommand)]
        op: BoundedOp,
    },
    /// Truncated squeezed-state correlator against its closed form.
    Squeezed(SqueezedArgs),
    /// Random search over a correlator's parameters.
    Search(SearchArgs),
    /// Evaluate one reference parameter record numerically.
    ReproduceTable(ReproduceArgs),
}

#[derive(Debug, Subcommand)]
enum KernelsOp {
    Eval(KernelArgs),
}

#[derive(Debug, Args, Serialize)]
struct KernelArgs {
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    mass: f64,
}

#[derive(Debug, Subcommand)]
enum TestfnOp {
    /// `t, x, value` on a grid over the bounding box.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    #[arg(long, value_enum, default_value = "right")]
    side: SideArg,
    #[arg(long, allow_hyphen_values = true)]
    decay: f64,
    #[arg(long, allow_hyphen_values = true)]
    cutoff: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 101)]
    nt: usize,
    #[arg(long, default_value_t = 101)]
    nx: usize,
}

#[derive(Debug, Subcommand)]
enum ModularOp {
    /// `eta, eta_prime, lambda, chsh` over a grid, `eta` outermost.
    Scan(ScanArgs),
}

#[derive(Debug, Args, Serialize)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "0:2:21")]
    eta_range: GridRange,
    #[arg(long, allow_hyphen_values = true, default_value = "0:2:21")]
    etap_range: GridRange,
    #[arg(long, allow_hyphen_values = true, default_value = "0:1:11")]
    lambda_range: GridRange,
}

#[derive(Debug, Subcommand)]
enum BoundedOp {
    /// `eta, eta_prime, chsh` at fixed lambda.
    Surface(SurfaceArgs),
}

#[derive(Debug, Args, Serialize)]
struct SurfaceArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.8)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "0.04:2:50")]
    eta_range: GridRange,
    #[arg(long, allow_hyphen_values = true, default_value = "0.04:2:50")]
    etap_range: GridRange,
}

#[derive(Debug, Args, Serialize)]
struct SqueezedArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 32)]
    pairs: usize,
    /// `alpha,alpha',beta,beta'` in radians; defaults to the maximal-violation angles.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    angles: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ObjectiveArg {
    Modular,
    Bounded,
    Weyl,
}

#[derive(Debug, Args, Serialize)]
struct SearchArgs {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    keep_top: Option<usize>,
    /// Pattern-search refinement of the best sample.
    #[arg(long)]
    refine: bool,
}

#[derive(Debug, Args, Serialize)]
struct ReproduceArgs {
    /// Table row, 1 to 4.
    #[arg(long)]
    row: usize,
    /// Bob measures `W_{-g}` instead of `W_g`.
    #[arg(long)]
    conjugate_bob: bool,
}

enum Failure {
    Invalid(Vec<String>),
    Io(String),
}

impl From<qftbell::Error> for Failure {
    fn from(e: qftbell::Error) -> Self {
        Failure::Invalid(vec![e.to_string()])
    }
}

struct Report {
    command: &'static str,
    args: Value,
    result: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    default_format: Format,
    converged: bool,
}

impl Report {
    fn record(command: &'static str, args: Value, result: Value, header: &[&str], row: Vec<String>) -> Self {
        Report {
            command,
            args,
            result,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![row],
            default_format: Format::Json,
            converged: true,
        }
    }
}

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn grid_violations(name: &str, g: &GridRange, lo: f64, hi: f64) -> Vec<String> {
    let mut v = Vec::new();
    let (a, b) = (g.start.min(g.end), g.start.max(g.end));
    if a < lo || b > hi {
        v.push(format!("{name} must lie in [{lo}, {hi}], got {g}"));
    }
    v
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Invalid(vec![format!("cannot read config {}: {e}", path.display())]))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.quad.seed = cfg.seed;
    cfg.search.seed = cfg.seed;
    if let Some(conv) = cli.convention {
        cfg.convention = conv;
    }
    Ok(cfg)
}

fn weyl_json(r: &WeylChsh) -> Value {
    let products: serde_json::Map<String, Value> =
        r.inner_products.iter().map(|(n, p)| (n.to_string(), to_value(p))).collect();
    json!({
        "value": r.value,
        "error_estimate": r.error_estimate,
        "evals": r.evals,
        "converged": r.converged,
        "inner_products": products,
    })
}

fn execute(command: &Command, cfg: &mut RunConfig) -> Result<Report, Failure> {
    let v = cfg.violations();
    if !v.is_empty() {
        return Err(Failure::Invalid(v));
    }
    match command {
        Command::Kernels { op: KernelsOp::Eval(a) } => {
            let m = Mass::new(a.mass)?;
            let e = Event::new(a.t, a.x);
            let h = hadamard(e, m, cfg.convention).ok();
            let w = wightman(e, m, cfg.convention).ok();
            let pj = pauli_jordan(e, m);
            let result = json!({
                "interval": interval(e),
                "pauli_jordan": pj,
                "hadamard": h,
                "wightman": w.map(|w| json!({"re": w.re, "im": w.im})),
                "on_light_cone": h.is_none(),
            });
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            Ok(Report::record(
                "kernels eval",
                to_value(a),
                result,
                &["t", "x", "interval", "pauli_jordan", "hadamard"],
                vec![num(a.t), num(a.x), num(interval(e)), num(pj), opt(h)],
            ))
        }
        Command::Testfn { op: TestfnOp::Sample(a) } => {
            let side = match a.side {
                SideArg::Right => WedgeSide::Right,
                SideArg::Left => WedgeSide::Left,
            };
            let mut problems = Vec::new();
            let bump = WedgeBump::new(side, a.decay, a.cutoff, a.amplitude).map_err(|e| problems.push(e.to_string()));
            if a.nt == 0 || a.nx == 0 {
                problems.push("nt and nx must be >= 1".to_string());
            }
            let bump = match bump {
                Ok(b) if problems.is_empty() => b,
                _ => return Err(Failure::Invalid(problems)),
            };
            let grid = sample_grid(&bump, bump.bounding_box(), a.nt, a.nx);
            Ok(Report {
                command: "testfn sample",
                args: to_value(a),
                result: json!({ "bump": bump, "rows": grid }),
                header: ["t", "x", "value"].map(String::from).to_vec(),
                rows: grid.iter().map(|&(t, x, v)| vec![num(t), num(x), num(v)]).collect(),
                default_format: Format::Csv,
                converged: true,
            })
        }
        Command::Modular { op: ModularOp::Scan(a) } => {
            let mut v = grid_violations("eta", &a.eta_range, 0.0, f64::INFINITY);
            v.extend(grid_violations("eta_prime", &a.etap_range, 0.0, f64::INFINITY));
            v.extend(grid_violations("lambda", &a.lambda_range, 0.0, 1.0));
            if !v.is_empty() {
                return Err(Failure::Invalid(v));
            }
            let mut rows = Vec::new();
            for e in a.eta_range.values() {
                for ep in a.etap_range.values() {
                    for l in a.lambda_range.values() {
                        let c = weyl_chsh_closed_form(SpectralParams::new(e, ep, l)?);
                        rows.push([e, ep, l, c]);
                    }
                }
            }
            Ok(Report {
                command: "modular scan",
                args: to_value(a),
                result: json!({ "rows": rows }),
                header: ["eta", "eta_prime", "lambda", "chsh"].map(String::from).to_vec(),
                rows: rows.iter().map(|r| r.iter().map(|&x| num(x)).collect()).collect(),
                default_format: Format::Csv,
                converged: true,
            })
        }
        Command::WeylNumeric => {
            let Some(w) = cfg.weyl else {
                return Err(Failure::Invalid(vec![
                    "weyl-numeric needs a config file with a `weyl` parameter block".to_string(),
                ]));
            };
            let b = w.bumps(cfg.bob)?;
            let r = chsh_weyl_numeric(&b.f, &b.fp, &b.g, &b.gp, b.mass, cfg.convention, &cfg.quad)?;
            let mut rep = Report::record(
                "weyl-numeric",
                Value::Null,
                json!({ "params": w, "chsh": weyl_json(&r), "seed": cfg.seed }),
                &["value", "error_estimate", "evals", "converged"],
                vec![num(r.value), num(r.error_estimate), r.evals.to_string(), r.converged.to_string()],
            );
            rep.converged = r.converged;
            Ok(rep)
        }
        Command::Bounded { op: BoundedOp::Surface(a) } => {
            let mut v = Vec::new();
            if !(0.0..=1.0).contains(&a.lambda) {
                v.push(format!("lambda must lie in [0, 1], got {}", a.lambda));
            }
            v.extend(grid_violations("eta", &a.eta_range, 0.0, f64::INFINITY));
            v.extend(grid_violations("eta_prime", &a.etap_range, 0.0, f64::INFINITY));
            if !v.is_empty() {
                return Err(Failure::Invalid(v));
            }
            let rows = surface_grid(a.lambda, &a.eta_range.values(), &a.etap_range.values(), &cfg.quad)?;
            Ok(Report {
                command: "bounded surface",
                args: to_value(a),
                result: json!({ "rows": rows }),
                header: ["eta", "eta_prime", "chsh"].map(String::from).to_vec(),
                rows: rows.iter().map(|&(e, ep, c)| vec![num(e), num(ep), num(c)]).collect(),
                default_format: Format::Csv,
                converged: true,
            })
        }
        Command::Squeezed(a) => {
            let angles = match &a.angles {
                Some(v) if v.len() == 4 => [v[0], v[1], v[2], v[3]],
                Some(v) => return Err(Failure::Invalid(vec![format!("angles needs 4 values, got {}", v.len())])),
                None => BELL_ANGLES,
            };
            let fock = FockConfig::new(a.pairs, a.lambda, angles)?;
            let truncated = chsh_squeezed(&fock);
            let analytic = chsh_analytic(a.lambda, angles);
            let (_, deficit) = state_coefficients(&fock);
            let normalized = chsh_squeezed_normalized(&fock);
            Ok(Report::record(
                "squeezed",
                to_value(a),
                json!({
                    "fock": fock,
                    "truncated": truncated,
                    "analytic": analytic,
                    "difference": truncated - analytic,
                    "norm_deficit": deficit,
                    "normalized": normalized,
                }),
                &["lambda", "pairs", "truncated", "analytic", "difference", "normalized"],
                vec![
                    num(a.lambda),
                    a.pairs.to_string(),
                    num(truncated),
                    num(analytic),
                    num(truncated - analytic),
                    num(normalized),
                ],
            ))
        }
        Command::Search(a) => {
            if let Some(n) = a.samples {
                cfg.search.samples = n;
                if a.keep_top.is_none() {
                    cfg.search.keep_top = cfg.search.keep_top.min(n.max(1));
                }
            }
            if let Some(k) = a.keep_top {
                cfg.search.keep_top = k;
            }
            cfg.search.refine |= a.refine;
            let v = cfg.search.violations();
            if !v.is_empty() {
                return Err(Failure::Invalid(v));
            }
            let obj = match a.objective {
                ObjectiveArg::Modular => Objective::ModularClosedForm,
                ObjectiveArg::Bounded => Objective::BoundedOps { quad: cfg.quad },
                ObjectiveArg::Weyl => Objective::WeylNumeric {
                    quad: cfg.quad,
                    screen: QuadConfig {
                        max_evals: (cfg.quad.max_evals / 64).max(1 << 14),
                        target_rel_error: (10.0 * cfg.quad.target_rel_error).min(0.5),
                        ..cfg.quad
                    },
                    convention: cfg.convention,
                    bob: cfg.bob,
                },
            };
            let space = obj.default_space();
            let out = random_search(&obj, &space, &cfg.search)?;
            let refined = match (cfg.search.refine, out.ranked.first()) {
                (true, Some(best)) => Some(local_refine(&best.params, &obj, &space, &cfg.search)?),
                _ => None,
            };
            let names = obj.parameter_names();
            let named = |p: &[f64]| -> Value {
                names.iter().zip(p).map(|(n, x)| (n.to_string(), json!(x))).collect::<serde_json::Map<_, _>>().into()
            };
            let ranked: Vec<Value> = out
                .ranked
                .iter()
                .map(|c| json!({ "params": named(&c.params), "value": c.value }))
                .collect();
            let failures: Vec<Value> = out
                .failures
                .iter()
                .take(100)
                .map(|f| json!({ "sample": f.sample, "params": named(&f.params), "reason": f.reason }))
                .collect();
            let mut header = vec!["rank".to_string()];
            header.extend(names.iter().map(|s| s.to_string()));
            header.push("value".to_string());
            let mut rows: Vec<Vec<String>> = out
                .ranked
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut r = vec![(i + 1).to_string()];
                    r.extend(c.params.iter().map(|&x| num(x)));
                    r.push(num(c.value));
                    r
                })
                .collect();
            if let Some(r) = &refined {
                let mut row = vec!["refined".to_string()];
                row.extend(r.params.iter().map(|&x| num(x)));
                row.push(num(r.value));
                rows.push(row);
            }
            let not_converged = out.failures.iter().any(|f| f.reason.contains("did not converge"));
            Ok(Report {
                command: "search",
                args: to_value(a),
                result: json!({
                    "objective": obj.name(),
                    "space": space,
                    "evaluated": out.evaluated,
                    "ranked": ranked,
                    "failure_count": out.failures.len(),
                    "failures": failures,
                    "refined": refined.map(|r| json!({ "params": named(&r.params), "value": r.value })),
                }),
                header,
                rows,
                default_format: Format::Json,
                converged: !not_converged,
            })
        }
        Command::ReproduceTable(a) => {
            let row = table_row(a.row)?;
            if a.conjugate_bob {
                cfg.bob = BobSign::Conjugated;
            }
            let r = reproduce_table(&row, cfg.convention, cfg.bob, &cfg.quad)?;
            let mut rep = Report::record(
                "reproduce-table",
                to_value(a),
                json!({
                    "row": a.row,
                    "params": row.params,
                    "reported": row.reported,
                    "chsh": weyl_json(&r),
                    "difference": r.value - row.reported,
                }),
                &["row", "reported", "value", "error_estimate", "evals", "converged"],
                vec![
                    a.row.to_string(),
                    num(row.reported),
                    num(r.value),
                    num(r.error_estimate),
                    r.evals.to_string(),
                    r.converged.to_string(),
                ],
            );
            rep.converged = r.converged;
            Ok(rep)
        }
    }
}

fn render(rep: &Report, cfg: &RunConfig, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let doc = json!({
                "command": rep.command,
                "seed": cfg.seed,
                "config": cfg,
                "args": rep.args,
                "converged": rep.converged,
                "result": rep.result,
            });
            serde_json::to_string_pretty(&doc)
                .map(|s| s + "\n")
                .map_err(|e| Failure::Io(e.to_string()))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Io(e.to_string());
            w.write_record(&rep.header).map_err(io)?;
            for r in &rep.rows {
                w.write_record(r).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn run() -> Result<bool, (u8, Failure)> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code.into());
        }
    };
    let mut cfg = resolve(&cli).map_err(|f| (EXIT_INVALID, f))?;
    let rep = with_workers(cli.workers, || execute(&cli.command, &mut cfg)).map_err(|f| (EXIT_INVALID, f))?;
    let text = render(&rep, &cfg, cli.format.unwrap_or(rep.default_format)).map_err(|f| (EXIT_IO, f))?;
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| (EXIT_IO, Failure::Io(format!("cannot write {}: {e}", path.display()))))?,
        None => print!("{text}"),
    }
    if !rep.converged {
        eprintln!("warning: quadrature did not reach its error target");
    }
    Ok(rep.converged || !cli.strict)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NOT_CONVERGED),
        Err((code, Failure::Invalid(violations))) => {
            let doc = json!({ "error": "invalid configuration", "violations": violations });
            eprintln!("{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
            ExitCode::from(code)
        }
        Err((code, Failure::Io(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
