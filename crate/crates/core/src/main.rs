use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gentropy::entropy::{classify, property_check, Property};
use gentropy::io::{rate_to_csv, series_points_from_csv, series_to_csv, system_from_json, system_to_json, to_json, write_atomic};
use gentropy::orbit::{default_stage, entropy_series_geometric, entropy_series_symbolic};
use gentropy::rank_one::AlignedSet;
use gentropy::rates::{
    fact59_check, lemma58_verify, nonisomorphism_report, rate_report, search_noniso_witness, theorem54_check, Reindexer, SequenceSpec,
};
use gentropy::{EntropyFunction, PrimeSeq, RankOneSystem};

#[derive(Parser, Debug)]
#[command(name = "gentropy", version, about = "Generalized entropy of rank-one systems", args_override_self = true)]
struct Cli {
    /// TOML file whose keys override the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for relative output paths.
    #[arg(long, global = true, env = "GENTROPY_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Memory budget for word materialisation, in MiB.
    #[arg(long, global = true, default_value_t = 256)]
    memory_budget: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a system from primes and write its JSON description.
    Construct(ConstructArgs),
    /// Entropy series `H(g, P_k)` as CSV.
    Entropy(EntropyArgs),
    /// Classify an entropy function by `g(x) / eta(x)` near zero.
    Classify(ClassifyArgs),
    /// Ratios of an entropy series against a normalising sequence.
    Rates(RatesArgs),
    /// Finite-stage check of the lower bound along `k = 2 p_n^2`.
    Theorem54(Theorem54Args),
    /// Upper bound on `H(g, P_k)` and the small-set estimate behind it.
    Lemma58(Lemma58Args),
    /// Finite-range evidence for the non-isomorphism criterion.
    Noniso(NonisoArgs),
    /// Randomised structural checks of an entropy function.
    Props(PropsArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    primes: Vec<u64>,
    #[arg(long)]
    stages: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value = "gir")]
    g: String,
    #[arg(long = "E", default_value = "unit")]
    e: String,
    /// `a..b` (inclusive) or a comma list.
    #[arg(long)]
    k: String,
    #[arg(long, default_value = "symbolic")]
    method: String,
    /// Stage to read names from; chosen per `k` when absent.
    #[arg(long)]
    stage: Option<usize>,
    #[arg(long, default_value_t = 1 << 22)]
    max_pieces: u128,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 50)]
    depth: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct RatesArgs {
    /// Entropy series CSV.
    #[arg(long)]
    series: PathBuf,
    #[arg(long)]
    seq: String,
    /// `two-squared:q0,q1,...` or `scaled:a:p0,p1,...`.
    #[arg(long)]
    reindex: Option<String>,
    /// Also write the ratio table as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Theorem54Args {
    #[arg(long)]
    system: PathBuf,
    #[arg(long = "E", default_value = "unit")]
    e: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    stage: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Lemma58Args {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.2)]
    a: f64,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct NonisoArgs {
    #[arg(long, value_delimiter = ',', required_unless_present = "search")]
    xi0: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    xi: Vec<u64>,
    #[arg(long, default_value_t = 0.04)]
    a: f64,
    #[arg(long, default_value_t = 0.2)]
    b: f64,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Search short first sequences for a witness instead of using `--xi0`.
    #[arg(long)]
    search: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PropsArgs {
    #[arg(long)]
    g: String,
    /// A property name or `all`.
    #[arg(long, default_value = "all")]
    property: String,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

type AnyResult<T> = std::result::Result<T, Box<dyn std::error::Error + Send + Sync>>;

/// Appends `--key=value` pairs from the TOML file after the command-line
/// arguments, so later values win.
fn merged_args() -> AnyResult<Vec<String>> {
    let mut args: Vec<String> = std::env::args().collect();
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let table: toml::Table = std::fs::read_to_string(&path)?.parse()?;
    for (key, value) in table {
        match value {
            toml::Value::Boolean(true) => args.push(format!("--{key}")),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => args.push(format!("--{key}={s}")),
            toml::Value::Integer(i) => args.push(format!("--{key}={i}")),
            toml::Value::Float(f) => args.push(format!("--{key}={f}")),
            toml::Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.to_string().trim_matches('"').to_string()).collect();
                args.push(format!("--{key}={}", parts.join(",")));
            }
            other => return Err(format!("unsupported value for {key}: {other}").into()),
        }
    }
    Ok(args)
}

fn parse_ks(spec: &str) -> AnyResult<Vec<usize>> {
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        if a == 0 || a > b {
            return Err(format!("empty or invalid range {spec}").into());
        }
        return Ok((a..=b).collect());
    }
    Ok(spec.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?)
}

fn parse_reindexer(spec: &str) -> AnyResult<Reindexer> {
    let ints = |s: &str| s.split(',').map(|v| v.trim().parse::<u64>()).collect::<Result<Vec<_>, _>>();
    if let Some(rest) = spec.strip_prefix("two-squared:") {
        return Ok(Reindexer::two_squared(&ints(rest)?)?);
    }
    if let Some(rest) = spec.strip_prefix("scaled:") {
        let (a, ps) = rest.split_once(':').ok_or("scaled:a:p0,p1,...")?;
        return Ok(Reindexer::scaled_primes(a.parse()?, &ints(ps)?)?);
    }
    Err(format!("unknown reindexing {spec}").into())
}

fn load_system(path: &Path) -> AnyResult<RankOneSystem> {
    Ok(system_from_json(&std::fs::read_to_string(path)?)?)
}

struct Ctx {
    out_dir: Option<PathBuf>,
    budget_bits: u64,
}

impl Ctx {
    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.out_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn emit(&self, out: &Output, text: &str) -> AnyResult<()> {
        match &out.out {
            Some(p) => write_atomic(&self.resolve(p), text.as_bytes())?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn run(cli: Cli) -> AnyResult<()> {
    let ctx = Ctx { out_dir: cli.out_dir, budget_bits: cli.memory_budget.saturating_mul(8 << 20) };
    match cli.command {
        Command::Construct(a) => {
            let stages = a.stages.unwrap_or(a.primes.len());
            let sys = RankOneSystem::build(PrimeSeq::new(a.primes)?, stages)?;
            ctx.emit(&a.output, &system_to_json(&sys))
        }
        Command::Entropy(a) => {
            let sys = load_system(&a.system)?;
            let g = EntropyFunction::parse(&a.g)?;
            let e: AlignedSet = a.e.parse()?;
            let ks = parse_ks(&a.k)?;
            let series = match a.method.as_str() {
                "symbolic" => entropy_series_symbolic(&sys, &g, &e, &ks, a.stage, ctx.budget_bits)?,
                "geometric" => {
                    let n_max = *ks.iter().max().unwrap();
                    if ks != (1..=n_max).collect::<Vec<_>>() {
                        return Err("the geometric method needs k = 1..n".into());
                    }
                    let stage = match a.stage {
                        Some(s) => s,
                        None => default_stage(&sys, n_max)?,
                    };
                    entropy_series_geometric(&sys, &g, &e, n_max, stage, a.max_pieces)?
                }
                other => return Err(format!("unknown method {other}").into()),
            };
            ctx.emit(&a.output, &series_to_csv(&series))
        }
        Command::Classify(a) => {
            let g = EntropyFunction::parse(&a.g)?;
            let c = classify(&g, a.depth)?;
            let summary = serde_json::json!({
                "g": g.descriptor(),
                "class": c.class.to_string(),
                "depth": c.depth,
                "last_ratio": c.last_ratio(),
                "ratios": c.ratios,
            });
            ctx.emit(&a.output, &to_json(&summary))
        }
        Command::Rates(a) => {
            let points = series_points_from_csv(&std::fs::read_to_string(&a.series)?)?;
            let seq = SequenceSpec::parse(&a.seq)?;
            let nu = a.reindex.as_deref().map(parse_reindexer).transpose()?;
            let report = rate_report(&points, &seq, nu.as_ref())?;
            if let Some(p) = &a.csv {
                write_atomic(&ctx.resolve(p), rate_to_csv(&report).as_bytes())?;
            }
            ctx.emit(&a.output, &to_json(&report))
        }
        Command::Theorem54(a) => {
            let sys = load_system(&a.system)?;
            let e: AlignedSet = a.e.parse()?;
            let rep = theorem54_check(&sys, &e, a.n, a.stage, ctx.budget_bits)?;
            ctx.emit(&a.output, &to_json(&rep))
        }
        Command::Lemma58(a) => {
            let sys = load_system(&a.system)?;
            let v = lemma58_verify(&sys, a.k, a.n, a.eps, a.a, a.r, ctx.budget_bits)?;
            let fact = fact59_check(&sys, a.n, a.a)?;
            ctx.emit(&a.output, &to_json(&serde_json::json!({ "bound": v, "small_set": fact })))
        }
        Command::Noniso(a) => {
            let xi = PrimeSeq::new(a.xi)?;
            let rep = if a.search {
                match search_noniso_witness(&xi, a.b, a.r, 50)? {
                    Some((xi0, a_used, rep)) => serde_json::json!({ "xi0": xi0.primes(), "a": a_used, "report": rep }),
                    None => serde_json::json!({ "xi0": null, "report": null }),
                }
            } else {
                let xi0 = PrimeSeq::new(a.xi0)?;
                serde_json::json!({ "xi0": xi0.primes(), "a": a.a, "report": nonisomorphism_report(&xi0, &xi, a.a, a.b, a.r, None)? })
            };
            ctx.emit(&a.output, &to_json(&rep))
        }
        Command::Props(a) => {
            let g = EntropyFunction::parse(&a.g)?;
            let props = if a.property == "all" { Property::ALL.to_vec() } else { vec![Property::parse(&a.property)?] };
            let reports = props.into_iter().map(|p| property_check(&g, p, a.samples, a.seed)).collect::<Result<Vec<_>, _>>()?;
            ctx.emit(&a.output, &to_json(&reports))
        }
    }
}

fn main() -> ExitCode {
    let args = match merged_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
