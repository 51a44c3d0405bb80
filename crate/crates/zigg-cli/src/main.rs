use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zigg::bench::{run_bench, Method, CSV_HEADER};
use zigg::distributions::advisories;
use zigg::rng::seeded;
use zigg::validation::{meta_test, MIN_REPLICATES, MIN_SAMPLE_SIZE};
use zigg::{make_sampler, Family, Spec};

#[derive(Parser)]
#[command(name = "zigg", version, about = "Generalized Ziggurat sampling, table inspection, KS validation and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw variates.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 256)]
        regions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dump the strip table, flags and tail/peak parameters.
    Table {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 256)]
        regions: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the replicate KS meta-test; exit 1 if the final p-value is below 0.01.
    Kstest {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 256)]
        regions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        replicates: usize,
        #[arg(long, default_value_t = 1 << 16)]
        sample_size: usize,
    },
    /// Time the sampler and/or the classical baseline; CSV on stdout.
    Bench {
        /// Repeat to bench several families; defaults to those with a baseline.
        #[arg(long = "family", value_parser = parse_family)]
        families: Vec<Family>,
        #[command(flatten)]
        params: ParamArgs,
        /// Repeat for several region counts.
        #[arg(long = "regions", default_values_t = [256])]
        regions: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Variates per repetition.
        #[arg(long, default_value_t = 1 << 20)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Zigg)]
        method: MethodArg,
    },
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    mean: Option<f64>,
    #[arg(long)]
    stddev: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mode: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    shape: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dof: Option<f64>,
    #[arg(long)]
    dof1: Option<f64>,
    #[arg(long)]
    dof2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    normal_mean: Option<f64>,
    #[arg(long)]
    normal_stddev: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    /// Little-endian f64.
    Binary,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MethodArg {
    Zigg,
    Baseline,
    Both,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: zigg::Error| e.to_string())
}

/// Exit 2: anything wrong with the request or the construction.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

impl ParamArgs {
    fn given(&self) -> Vec<(&'static str, f64)> {
        [
            ("mean", self.mean),
            ("stddev", self.stddev),
            ("mode", self.mode),
            ("scale", self.scale),
            ("rate", self.rate),
            ("shape", self.shape),
            ("dof", self.dof),
            ("dof1", self.dof1),
            ("dof2", self.dof2),
            ("normal_mean", self.normal_mean),
            ("normal_stddev", self.normal_stddev),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    /// The family's constructor defaults overridden by the flags given; a flag the family
    /// does not take is an error.
    fn spec(&self, family: Family) -> Result<Spec, Usage> {
        let given = self.given();
        let defaults = match Spec::default_for(family) {
            Some(s) => s.params(),
            None => vec![("dof", f64::NAN)],
        };
        for (k, _) in &given {
            if !defaults.iter().any(|(d, _)| d == k) {
                return Err(Usage(format!("{family} takes no --{} parameter", k.replace('_', "-"))));
            }
        }
        let get = |name: &str| {
            given.iter().find(|(k, _)| *k == name).map(|&(_, v)| v).or_else(|| {
                defaults.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
            })
        };
        let v = |name: &str| -> Result<f64, Usage> {
            match get(name) {
                Some(x) if !x.is_nan() => Ok(x),
                _ => Err(Usage(format!("{family} requires --{}", name.replace('_', "-")))),
            }
        };
        let spec = match family {
            Family::Normal => Spec::normal(v("mean")?, v("stddev")?),
            Family::Cauchy => Spec::cauchy(v("mode")?, v("scale")?),
            Family::Exponential => Spec::exponential(v("rate")?),
            Family::Gamma => Spec::gamma(v("shape")?, v("scale")?),
            Family::ChiSquared => Spec::chi_squared(v("dof")?),
            Family::Weibull => Spec::weibull(v("shape")?, v("scale")?),
            Family::LogNormal => Spec::log_normal(v("normal_mean")?, v("normal_stddev")?),
            Family::StudentT => Spec::student_t(v("dof")?),
            Family::FisherF => Spec::fisher_f(v("dof1")?, v("dof2")?),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>, Usage> {
    Ok(match output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Usage(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn warn_advisories(spec: &Spec, regions: usize) {
    for a in advisories(spec, regions) {
        eprintln!("warning: {a}");
    }
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.command {
        Command::Sample { dist, regions, seed, count, output, format } => {
            let spec = dist.params.spec(dist.family)?;
            warn_advisories(&spec, regions);
            let sampler = make_sampler(&spec, regions)?;
            let mut src = seeded(seed);
            let mut out = sink(&output)?;
            for _ in 0..count {
                let x = sampler.try_sample(&mut src)?;
                match format {
                    Format::Csv => writeln!(out, "{x:.16e}")?,
                    Format::Binary => out.write_all(&x.to_le_bytes())?,
                }
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { dist, regions, output } => {
            let spec = dist.params.spec(dist.family)?;
            warn_advisories(&spec, regions);
            let sampler = make_sampler(&spec, regions)?;
            let mut out = sink(&output)?;
            writeln!(out, "family = {}", spec.family())?;
            for (k, v) in spec.params() {
                writeln!(out, "{k} = {v:.16e}")?;
            }
            out.write_all(sampler.dump().as_bytes())?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Kstest { dist, regions, seed, replicates, sample_size } => {
            if replicates < MIN_REPLICATES {
                return Err(Usage(format!("--replicates must be at least {MIN_REPLICATES}")));
            }
            if sample_size < MIN_SAMPLE_SIZE {
                return Err(Usage(format!("--sample-size must be at least {MIN_SAMPLE_SIZE}")));
            }
            let spec = dist.params.spec(dist.family)?;
            warn_advisories(&spec, regions);
            let sampler = make_sampler(&spec, regions)?;
            let density = spec.prepare()?;
            let report = meta_test(&density, &sampler, replicates, sample_size, seed)?;
            let mut out = sink(&None)?;
            writeln!(out, "replicate_index,d_stat,p_value")?;
            for (i, r) in report.replicates.iter().enumerate() {
                writeln!(out, "{i},{:.16e},{:.16e}", r.d_stat, r.p_value)?;
            }
            writeln!(out, "uniformity_p,{:.16e}", report.uniformity_p)?;
            out.flush()?;
            Ok(if report.uniformity_p >= 0.01 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { families, params, regions, seed, count, reps, method } => {
            let families = if families.is_empty() {
                if !params.given().is_empty() {
                    return Err(Usage("parameter flags need exactly one --family".into()));
                }
                vec![Family::Normal, Family::Cauchy, Family::Exponential, Family::Weibull]
            } else {
                families
            };
            if families.len() > 1 && !params.given().is_empty() {
                return Err(Usage("parameter flags need exactly one --family".into()));
            }
            let methods = match method {
                MethodArg::Zigg => vec![Method::Zigg],
                MethodArg::Baseline => vec![Method::Baseline],
                MethodArg::Both => vec![Method::Zigg, Method::Baseline],
            };
            if count < 1 << 16 {
                return Err(Usage("--count must be at least 65536 for a benchmark".into()));
            }
            let specs = families.iter().map(|&f| params.spec(f)).collect::<Result<Vec<_>, _>>()?;
            // every flag combination is checked before any timing starts
            for spec in &specs {
                for &n in &regions {
                    if methods.contains(&Method::Zigg) {
                        make_sampler(spec, n)?;
                    }
                }
                if methods.contains(&Method::Baseline) {
                    zigg::bench::Baseline::new(*spec)?;
                }
            }
            let mut out = sink(&None)?;
            writeln!(out, "{CSV_HEADER}")?;
            out.flush()?;
            for spec in &specs {
                for &n in &regions {
                    for &m in &methods {
                        let r = run_bench(spec, m, n, count, reps, seed)?;
                        writeln!(out, "{}", r.csv_row())?;
                        out.flush()?;
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
