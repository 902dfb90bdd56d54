//! `hsfc` — generate sample sets, compute star discrepancies and the
//! closed-form bounds, run integration checks, and drive replicated
//! experiments. All randomness is seeded explicitly; identical invocations
//! produce identical bytes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsfc::discrepancy::{self, DiscrepancyMethod, EstimateKind};
use hsfc::integrate::{self, Integrand, RegionIntegrand};
use hsfc::rng::RngState;
use hsfc::sampler::GeneratorSpec;
use hsfc_cli::config::{ExperimentConfig, SamplerTemplate};
use hsfc_cli::{experiment, points_io, CliError, CliResult};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "hsfc", version, about = "HSFC sampling and star-discrepancy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set and write it as CSV (stdout by default).
    Sample(SampleArgs),
    /// Compute the star discrepancy of a points CSV.
    Discrepancy(DiscrepancyArgs),
    /// Print the closed-form bound report for (d, N, q).
    Bound(BoundArgs),
    /// Sample-mean integration with a Koksma-Hlawka check.
    Integrate(IntegrateArgs),
    /// Run a replicated experiment from a JSON config file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Hsfc,
    Mc,
    Jittered,
    Lhs,
    Theta,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ScrambledVdc,
    DirectOffset,
}

#[derive(Args)]
struct GeneratorOpts {
    /// Point-set family.
    #[arg(long, value_enum)]
    generator: GeneratorArg,
    /// Dimension (theta implies 2).
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Sample size; families with structure require matching sizes.
    #[arg(long, conflicts_with = "m")]
    n: Option<u64>,
    /// Grid/refinement parameter (alternative to --n for hsfc, jittered, theta).
    #[arg(long)]
    m: Option<u32>,
    /// Split angle for the theta partition, in radians.
    #[arg(long)]
    theta: Option<f64>,
    /// Offset mode for hsfc.
    #[arg(long, value_enum, default_value = "scrambled-vdc")]
    mode: ModeArg,
    /// Master seed (mandatory: no ambient randomness).
    #[arg(long)]
    seed: u64,
}

impl GeneratorOpts {
    fn spec(&self) -> CliResult<GeneratorSpec> {
        let mode = match self.mode {
            ModeArg::ScrambledVdc => hsfc::sampler::HsfcMode::ScrambledVdc,
            ModeArg::DirectOffset => hsfc::sampler::HsfcMode::DirectOffset,
        };
        let template = match self.generator {
            GeneratorArg::Hsfc => SamplerTemplate::Hsfc { mode },
            GeneratorArg::Mc => SamplerTemplate::Mc,
            GeneratorArg::Jittered => SamplerTemplate::Jittered,
            GeneratorArg::Lhs => SamplerTemplate::Lhs,
            GeneratorArg::Theta => SamplerTemplate::Theta {
                theta: self
                    .theta
                    .ok_or_else(|| CliError::Config("theta generator needs --theta".into()))?,
            },
        };
        match (self.n, self.m) {
            (Some(n), None) => template.instantiate(self.d, n),
            (None, Some(m)) => match template {
                SamplerTemplate::Hsfc { mode } => Ok(GeneratorSpec::Hsfc { d: self.d, m, mode }),
                SamplerTemplate::Jittered => Ok(GeneratorSpec::Jittered { d: self.d, m }),
                SamplerTemplate::Theta { theta } => Ok(GeneratorSpec::Theta { m, theta }),
                _ => Err(CliError::Config("--m only applies to hsfc, jittered, theta".into())),
            },
            (None, None) => Err(CliError::Config("one of --n or --m is required".into())),
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        }
    }

    fn generate(&self) -> CliResult<hsfc::sampler::SampleSet> {
        let spec = self.spec()?;
        Ok(spec.generate(&RngState::new(self.seed))?)
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    gen: GeneratorOpts,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Cover,
}

#[derive(Args)]
struct MethodOpts {
    /// Discrepancy method.
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Cover resolution delta (cover method only).
    #[arg(long)]
    delta: Option<f64>,
}

impl MethodOpts {
    fn resolve(&self) -> CliResult<DiscrepancyMethod> {
        match self.method {
            MethodArg::Exact => Ok(DiscrepancyMethod::Exact),
            MethodArg::Cover => {
                let delta = self
                    .delta
                    .ok_or_else(|| CliError::Config("cover method needs --delta".into()))?;
                Ok(DiscrepancyMethod::Cover { delta })
            }
        }
    }
}

#[derive(Args)]
struct DiscrepancyArgs {
    /// Points CSV (columns x1..xd, `# schema=1` comments allowed).
    #[arg(long, short)]
    input: PathBuf,
    #[command(flatten)]
    method: MethodOpts,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    q: f64,
    /// Also report the covering-number bound at this delta.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegrandArg {
    ProductPoly,
    IndicatorBox,
    SimplexF,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long, value_enum)]
    integrand: IntegrandArg,
    /// Indicator corner, comma separated (indicator-box only).
    #[arg(long)]
    corner: Option<String>,
    /// Simplex margin (simplex-f only).
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    gen: GeneratorOpts,
    #[command(flatten)]
    method: MethodOpts,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file.
    #[arg(long, short)]
    config: PathBuf,
    /// Override the config's output path for the rows CSV.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn write_output(path: &Option<PathBuf>, contents: &str) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, contents)?,
        None => std::io::stdout().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> CliResult<()> {
    let set = args.gen.generate()?;
    let mut buf = Vec::new();
    points_io::write_points(&mut buf, set.points())?;
    write_output(&args.output, &String::from_utf8(buf).expect("csv is utf8"))
}

fn cmd_discrepancy(args: &DiscrepancyArgs) -> CliResult<()> {
    let raw = std::fs::read_to_string(&args.input)?;
    let points = points_io::read_points(&raw)?;
    let method = args.method.resolve()?;
    let est = discrepancy::star_discrepancy(&points, method)?;
    println!("n: {}", points.len());
    println!("d: {}", points[0].dim());
    match est.kind {
        EstimateKind::Exact => {
            println!("method: exact");
            println!("dstar: {}", est.value);
        }
        EstimateKind::CoverInterval { delta } => {
            println!("method: cover delta={delta}");
            println!("dstar_lower: {}", est.value);
            println!("dstar_upper: {}", est.upper());
        }
        EstimateKind::SampledLower { .. } => unreachable!("not produced here"),
    }
    Ok(())
}

fn cmd_bound(args: &BoundArgs) -> CliResult<()> {
    let report = hsfc::bounds::BoundReport::evaluate(args.d, args.n, args.q, args.delta)?;
    println!("d: {}  n: {}  q: {}", report.d, report.n, report.q);
    println!("c_dq: {}", report.c_dq);
    println!("a_dqn: {}", report.a_dqn);
    println!("hsfc_bound: {} (clamped {})", report.hsfc, report.hsfc_clamped);
    println!(
        "mc_bound_aistleitner: {} (clamped {})",
        report.mc_aistleitner, report.mc_aistleitner_clamped
    );
    println!("mc_bound_gnewuch: {} (clamped {})", report.mc_gnewuch, report.mc_gnewuch_clamped);
    println!("diameter_bound: {}", report.diameter);
    if let Some((delta, card)) = report.cover_cardinality {
        println!("cover_cardinality_bound(delta={delta}): {card}");
    }
    Ok(())
}

fn parse_corner(raw: &str, d: u32) -> CliResult<Vec<f64>> {
    let corner: Vec<f64> = raw
        .split(',')
        .map(|tok| tok.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("bad --corner: {e}")))?;
    if corner.len() != d as usize {
        return Err(CliError::Config(format!(
            "--corner has {} components, expected {d}",
            corner.len()
        )));
    }
    Ok(corner)
}

fn cmd_integrate(args: &IntegrateArgs) -> CliResult<()> {
    let set = args.gen.generate()?;
    let method = args.method.resolve()?;
    let d = set.d();
    match args.integrand {
        IntegrandArg::SimplexF => {
            let eps =
                args.eps.ok_or_else(|| CliError::Config("simplex-f needs --eps".into()))?;
            let rf = RegionIntegrand::simplex(d, eps)?;
            let out = integrate::restricted_integrate(&rf, set.points(), method)?;
            println!("integrand: simplex_f eps={eps} d={d}");
            println!("estimate: {}", out.estimate);
            println!("oracle_integral: {} (stderr {})", out.oracle.value, out.oracle.std_error);
            println!("error: {}", out.error);
            println!("dstar: {}", out.dstar.upper());
            println!("variation: {} (stderr {})", out.variation.value, out.variation.std_error);
            println!("kh_variant_bound: {}", out.kh_variant_bound);
            println!("holds: {}", out.holds);
        }
        plain => {
            let f = match plain {
                IntegrandArg::ProductPoly => Integrand::ProductPoly { d },
                IntegrandArg::IndicatorBox => {
                    let raw = args
                        .corner
                        .as_deref()
                        .ok_or_else(|| CliError::Config("indicator-box needs --corner".into()))?;
                    Integrand::IndicatorBox { corner: parse_corner(raw, d)? }
                }
                IntegrandArg::SimplexF => unreachable!(),
            };
            let est = discrepancy::star_discrepancy(set.points(), method)?;
            let chk = integrate::kh_check(&f, set.points(), &est)?;
            let integral = f.exact_integral()?;
            println!("integrand: {:?}", args_integrand_name(plain));
            println!("sample_mean: {}", integrate::sample_mean(&f, set.points())?);
            println!("integral: {}", integral.value);
            println!("error: {}", chk.error);
            println!("dstar: {}", est.upper());
            println!("variation: {}", f.variation()?.value);
            println!("kh_bound: {}", chk.bound);
            println!("holds: {}", chk.holds);
        }
    }
    Ok(())
}

fn args_integrand_name(a: IntegrandArg) -> &'static str {
    match a {
        IntegrandArg::ProductPoly => "product_poly",
        IntegrandArg::IndicatorBox => "indicator_box",
        IntegrandArg::SimplexF => "simplex_f",
    }
}

fn cmd_experiment(args: &ExperimentArgs) -> CliResult<()> {
    let raw = std::fs::read_to_string(&args.config)?;
    let cfg = ExperimentConfig::from_json(&raw)?;
    let (rows, summary) = experiment::run(&cfg)?;
    let csv = experiment::rows_to_csv(&rows);
    let out_path = args.output.clone().or_else(|| cfg.output.clone());
    match &out_path {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    print!("{summary}");
    Ok(())
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Discrepancy(args) => cmd_discrepancy(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Integrate(args) => cmd_integrate(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            std::process::ExitCode::from(err.exit_code() as u8)
        }
    }
}
