use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyzone::maxmod::default_samples;
use polyzone::operators::{lambdas_from_g, phi_of};
use polyzone::verify::{self, Instance, Verdict, VerifyOptions};
use polyzone::{
    apply_n, compose_h, find_roots, max_on_circle, Complex64, ComplexPoly, GenConfig, OperatorSpec,
    PolyError, TheoremId, VerificationReport,
};
use serde_json::json;

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

/// Composite polynomials, the operator N, and randomized verification.
///
/// Polynomials and specs are given either as inline JSON (starting with `{`),
/// a file path, or `-` for stdin. Complex scalars are written `re,im`.
#[derive(Parser, Debug)]
#[command(name = "polyzone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build h(z) = sum_k lambda_k f^(k)(z) (sigma z)^k / k!
    Compose(ComposeArgs),
    /// Apply N (sigma = n/2) to a polynomial
    ApplyN(ApplyArgs),
    /// Find all zeros with the Aberth-Ehrlich iteration
    Roots(RootsArgs),
    /// Maximum modulus on |z| = radius
    Maxmod(MaxmodArgs),
    /// Run seeded verification trials, or evaluate one instance
    Verify(VerifyArgs),
    /// Draw a random instance or polynomial
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    /// Polynomial f
    #[arg(long)]
    f: String,
    /// Generating polynomial g; lambda_k = g_k / C(n, k)
    #[arg(long, conflicts_with = "lambdas")]
    g: Option<String>,
    /// Coefficients lambda_0..lambda_m as a JSON array of [re, im]
    #[arg(long)]
    lambdas: Option<String>,
    /// Complex sigma as re,im
    #[arg(long, value_parser = parse_complex)]
    sigma: Complex64,
    /// Degree n (default: the ambient degree of f, else its degree)
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    /// Polynomial P
    #[arg(long)]
    p: String,
    /// Operator spec JSON {"n", "m", "lambdas", "sigma"}
    #[arg(long, conflicts_with_all = ["g", "lambdas"])]
    spec: Option<String>,
    /// Generating polynomial phi
    #[arg(long, conflicts_with = "lambdas")]
    g: Option<String>,
    /// Coefficients lambda_0..lambda_m as a JSON array of [re, im]
    #[arg(long)]
    lambdas: Option<String>,
    /// Degree n (default: the ambient degree of P, else its degree)
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RootsArgs {
    /// Polynomial p
    #[arg(long)]
    p: String,
    /// Iteration tolerance
    #[arg(long, default_value_t = polyzone::roots::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = polyzone::roots::DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct MaxmodArgs {
    /// Polynomial p
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Equispaced samples before refinement (default: max(4096, 64 n))
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Seed; POLYZONE_SEED overrides it when set
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    degree_min: usize,
    #[arg(long, default_value_t = 12)]
    degree_max: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// T1, T2, C1, T3, T4, L3, L4, R1, R2, R3 or all
    #[arg(long, default_value = "all")]
    theorem: String,
    /// Instance JSON (as printed by `gen --theorem`) to evaluate instead of random trials
    #[arg(long)]
    instance: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Pass tolerance on normalized margins (default: 1e-6 for T1, 1e-9 otherwise)
    #[arg(long)]
    tol: Option<f64>,
    /// Circle samples for M (default: max(4096, 64 n))
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    ZerosInDisk,
    ZeroFree,
    SelfInversive,
    Any,
    Spec,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Emit the instance a verify run would draw for this theorem
    #[arg(long, required_unless_present = "kind", conflicts_with = "kind")]
    theorem: Option<String>,
    /// Emit a bare polynomial or spec of this family
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Trial index within the seed
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Zero radius for zeros-in-disk
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// CLI failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        let code = match e {
            PolyError::Unconverged { .. }
            | PolyError::RootFindingFailed(_)
            | PolyError::DegenerateInstance(_) => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CliResult = std::result::Result<u8, Failure>;

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

/// Inline JSON, `-` for stdin, or a file path.
fn read_source(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        return Ok(buf);
    }
    fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let text = read_source(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid {what}: {e}")))
}

fn parse_lambdas(arg: &str) -> Result<Vec<Complex64>, Failure> {
    let raw: Vec<[f64; 2]> = parse_json(arg, "lambdas")?;
    Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

fn ambient_or_degree(p: &ComplexPoly, n: Option<usize>) -> usize {
    n.or(p.ambient_degree()).unwrap_or_else(|| p.degree())
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn gen_config(run: &RunArgs, trials: usize) -> GenConfig {
    let seed = std::env::var("POLYZONE_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(run.seed);
    GenConfig {
        degree_min: run.degree_min,
        degree_max: run.degree_max,
        seed,
        trials,
        ..Default::default()
    }
}

fn seed_override_is_valid() -> Result<(), Failure> {
    match std::env::var("POLYZONE_SEED") {
        Ok(s) if s.trim().parse::<u64>().is_err() => {
            Err(Failure::usage(format!("POLYZONE_SEED must be an unsigned integer, got {s:?}")))
        }
        _ => Ok(()),
    }
}

fn compose(args: ComposeArgs) -> CliResult {
    let f: ComplexPoly = parse_json(&args.f, "polynomial f")?;
    let n = ambient_or_degree(&f, args.n);
    let lambdas = match (&args.g, &args.lambdas) {
        (Some(g), None) => lambdas_from_g(&parse_json(g, "polynomial g")?, n)?,
        (None, Some(l)) => parse_lambdas(l)?,
        _ => return Err(Failure::usage("compose needs exactly one of --g or --lambdas")),
    };
    let spec = OperatorSpec::new(n, lambdas, args.sigma)?;
    let f = f.without_ambient_degree().with_ambient_degree(n)?;
    let h = compose_h(&f, &spec)?;
    emit(&args.output, &to_json(&h))?;
    Ok(EXIT_OK)
}

fn apply(args: ApplyArgs) -> CliResult {
    let p: ComplexPoly = parse_json(&args.p, "polynomial P")?;
    let spec: OperatorSpec = match (&args.spec, &args.g, &args.lambdas) {
        (Some(s), None, None) => parse_json(s, "operator spec")?,
        (None, Some(g), None) => {
            let n = ambient_or_degree(&p, args.n);
            OperatorSpec::bernstein(n, lambdas_from_g(&parse_json(g, "polynomial g")?, n)?)?
        }
        (None, None, Some(l)) => OperatorSpec::bernstein(ambient_or_degree(&p, args.n), parse_lambdas(l)?)?,
        _ => return Err(Failure::usage("apply-n needs exactly one of --spec, --g or --lambdas")),
    };
    let np = apply_n(&p, &spec)?;
    let eigen = phi_of(&spec).evaluate(Complex64::new(spec.n() as f64 / 2.0, 0.0));
    emit(
        &args.output,
        &to_json(&json!({"np": np, "phi_at_half_n": [eigen.re, eigen.im]})),
    )?;
    Ok(EXIT_OK)
}

fn roots(args: RootsArgs) -> CliResult {
    let p: ComplexPoly = parse_json(&args.p, "polynomial")?;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::usage("tol must be positive"));
    }
    let rs = find_roots(&p, args.tol, args.max_iter)?;
    emit(&args.output, &to_json(&rs))?;
    Ok(if rs.all_converged() { EXIT_OK } else { EXIT_INCONCLUSIVE })
}

fn maxmod(args: MaxmodArgs) -> CliResult {
    let p: ComplexPoly = parse_json(&args.p, "polynomial")?;
    if !(args.radius > 0.0 && args.radius.is_finite()) {
        return Err(Failure::usage("radius must be positive"));
    }
    let samples = args.samples.unwrap_or_else(|| default_samples(ambient_or_degree(&p, None)));
    let cm = max_on_circle(&p, args.radius, samples);
    emit(
        &args.output,
        &to_json(&json!({"value": cm.value, "arg_angle": cm.arg_angle, "samples": cm.samples})),
    )?;
    Ok(EXIT_OK)
}

fn exit_for(reports: &[VerificationReport]) -> u8 {
    let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict()).collect();
    if verdicts.contains(&Verdict::Fail) {
        EXIT_FAILED
    } else if verdicts.contains(&Verdict::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn render(reports: &[VerificationReport], format: Format, single: bool) -> Result<String, Failure> {
    match format {
        Format::Json if single => Ok(reports[0].to_json()),
        Format::Json => Ok(to_json(&reports)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| Failure::usage(e.to_string());
            w.write_record(verify::CSV_HEADER).map_err(io_err)?;
            for r in reports {
                w.write_record(r.csv_row()).map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
            let text = String::from_utf8(bytes).expect("csv is utf-8");
            Ok(text.trim_end().to_string())
        }
    }
}

fn run_verify(args: VerifyArgs) -> CliResult {
    seed_override_is_valid()?;
    if args.trials < 1 {
        return Err(Failure::usage("trials must be at least 1"));
    }
    if let Some(tol) = args.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Failure::usage("tol must be positive"));
        }
    }
    if args.samples.is_some_and(|s| s < polyzone::maxmod::MIN_SAMPLES) {
        return Err(Failure::usage(format!(
            "samples must be at least {}",
            polyzone::maxmod::MIN_SAMPLES
        )));
    }
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Failure::usage("jobs must be at least 1"));
    }
    let opts = VerifyOptions {
        tol: args.tol,
        samples: args.samples,
        jobs,
    };
    let cfg = gen_config(&args.run, args.trials);

    let (reports, single) = if let Some(src) = &args.instance {
        let inst: Instance = parse_json(src, "instance")?;
        (vec![verify::verify_instance(&inst, cfg.seed, &opts)?], true)
    } else if args.theorem.eq_ignore_ascii_case("all") {
        let reports = TheoremId::ALL
            .into_iter()
            .map(|t| verify::verify(t, &cfg, &opts))
            .collect::<polyzone::Result<Vec<_>>>()?;
        (reports, false)
    } else {
        let t: TheoremId = args.theorem.parse()?;
        (vec![verify::verify(t, &cfg, &opts)?], true)
    };
    emit(&args.output, &render(&reports, args.format, single)?)?;
    Ok(exit_for(&reports))
}

fn gen(args: GenArgs) -> CliResult {
    seed_override_is_valid()?;
    let cfg = gen_config(&args.run, 1);
    cfg.validate()?;
    let mut rng = verify::trial_rng(cfg.seed, args.trial);
    let text = if let Some(t) = &args.theorem {
        let t: TheoremId = t.parse()?;
        // the same resample loop a verify trial would run
        let mut last = None;
        let mut found = None;
        for _ in 0..=verify::RESAMPLE_BUDGET {
            match verify::generate_instance(t, &cfg, &mut rng) {
                Ok(inst) => {
                    found = Some(inst);
                    break;
                }
                Err(e) => last = Some(e),
            }
        }
        match found {
            Some(inst) => to_json(&inst),
            None => return Err(last.expect("at least one attempt").into()),
        }
    } else {
        let n = verify::sample_degree(&cfg, &mut rng);
        match args.kind.expect("clap enforces theorem or kind") {
            Kind::ZerosInDisk => {
                if !(args.radius > 0.0 && args.radius.is_finite()) {
                    return Err(Failure::usage("radius must be positive"));
                }
                to_json(&verify::poly_zeros_in_disk(n, args.radius, &cfg, &mut rng))
            }
            Kind::ZeroFree => to_json(&verify::poly_zero_free_unit_disk(n, &cfg, &mut rng)),
            Kind::SelfInversive => to_json(&verify::poly_self_inversive(n, &cfg, &mut rng)?),
            Kind::Any => to_json(&verify::poly_any(n, &cfg, &mut rng)),
            Kind::Spec => to_json(&verify::gen_admissible_spec(&cfg, n, &mut rng)),
        }
    };
    emit(&args.output, &text)?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Compose(a) => compose(a),
        Command::ApplyN(a) => apply(a),
        Command::Roots(a) => roots(a),
        Command::Maxmod(a) => maxmod(a),
        Command::Verify(a) => run_verify(a),
        Command::Gen(a) => gen(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("polyzone: {}", f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
