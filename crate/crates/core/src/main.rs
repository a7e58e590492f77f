use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use mlr_ga::bench::{run_real, DeJong, RealOperators};
use mlr_ga::cli::{
    cmd_batch, cmd_exhaustive, cmd_report, parse_values, BatchSpec, CliError, DatasetSource,
};
use mlr_ga::dataset::{load_dataset, synth_dataset, write_dataset, Dataset, Schema};
use mlr_ga::equilibrium::{trajectory, AllelePopulation, Mode};
use mlr_ga::evstats::{fit_gev, fit_lp3, fit_lp3_full, lottery_report, Orientation};
use mlr_ga::format_real;
use mlr_ga::ga::log::{EvoLog, RunConfigFile};
use mlr_ga::ga::{run, GaConfig, GaRng, StrategyPair};

#[derive(Parser)]
#[command(name = "mlr-ga", version, about = "GA descriptor selection for linear regression models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset with a known generating subset.
    Synth(SynthArgs),
    /// One GA run on a dataset or a De Jong function.
    Run(RunArgs),
    /// Seeded runs for every selection/survival pair.
    Batch(BatchArgs),
    /// Best k-subset by enumeration.
    Exhaustive(ExhaustiveArgs),
    /// String proportions under mutation and/or recombination.
    Equilibrium(EquilibriumArgs),
    /// Fit GEV or log-Pearson III to a column of values.
    FitDist(FitDistArgs),
    /// Summary tables for a batch directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV dataset; a synthetic one is generated when omitted.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    id_column: Option<String>,
    #[arg(long)]
    property_column: Option<String>,
    #[arg(long, default_value_t = 50)]
    synth_n: usize,
    #[arg(long, default_value_t = 10)]
    synth_m: usize,
    #[arg(long, default_value_t = 2)]
    synth_k_true: usize,
    #[arg(long, default_value_t = 0.0)]
    synth_noise: f64,
    #[arg(long, default_value_t = 1)]
    synth_seed: u64,
}

impl DataArgs {
    fn source(&self) -> DatasetSource {
        match &self.dataset {
            Some(p) => DatasetSource::File(
                p.clone(),
                Schema {
                    id_column: self.id_column.clone(),
                    property_column: self.property_column.clone(),
                },
            ),
            None => DatasetSource::Synth {
                n: self.synth_n,
                m: self.synth_m,
                k_true: self.synth_k_true,
                noise_sd: self.synth_noise,
                seed: self.synth_seed,
            },
        }
    }

    fn load(&self) -> Result<Dataset, CliError> {
        Ok(match self.source() {
            DatasetSource::File(p, schema) => load_dataset(&p, &schema)?,
            DatasetSource::Synth {
                n,
                m,
                k_true,
                noise_sd,
                seed,
            } => synth_dataset(n, m, k_true, noise_sd, seed)?.data,
        })
    }
}

#[derive(Args)]
struct GaArgs {
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    generations: usize,
    #[arg(long, default_value_t = 0.8)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    mutation_rate: f64,
    #[arg(long, default_value_t = 2)]
    tournament_size: usize,
}

impl GaArgs {
    fn config(&self, strategy: StrategyPair, seed: u64) -> GaConfig {
        GaConfig {
            population_size: self.pop,
            k: self.k,
            generations: self.generations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament_size,
            strategy,
            seed,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    k_true: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long, default_value = "DT")]
    strategy: StrategyPair,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `regression` or `dejong:F1` … `dejong:F5`.
    #[arg(long, default_value = "regression")]
    fitness: String,
    /// Directory for the cfg/evo pair; a summary goes to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    ga: GaArgs,
    /// Strategies to run, repeatable or comma separated; all nine by default.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<StrategyPair>,
    #[arg(long, default_value_t = 46)]
    runs: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "batch")]
    tag: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExhaustiveArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Args)]
struct EquilibriumArgs {
    #[arg(long, default_value = "mutation")]
    mode: Mode,
    /// Alleles per locus.
    #[arg(long, default_value_t = 2)]
    cardinality: usize,
    /// Loci per string.
    #[arg(long, default_value_t = 3)]
    length: usize,
    #[arg(long, default_value_t = 10000)]
    pop: usize,
    #[arg(long, default_value_t = 0.1)]
    mutation_rate: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial population file, one string of digits per line; all zeros
    /// when omitted.
    #[arg(long)]
    start: Option<PathBuf>,
    /// CSV of distance to the limit per step; printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Dist {
    Gev,
    GevMin,
    Lp3,
}

#[derive(Args)]
struct FitDistArgs {
    #[arg(long, value_enum, default_value = "gev")]
    dist: Dist,
    /// One value per line.
    #[arg(long)]
    input: PathBuf,
    /// Refine the GEV L-moment estimate by maximum likelihood.
    #[arg(long)]
    refine: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let config = a.ga.config(a.strategy, a.seed);
    let (log, cfg, genes) = if let Some(name) = a.fitness.strip_prefix("dejong:") {
        let f: DeJong = name.parse()?;
        let rec = run_real(f, &config, RealOperators::default())?;
        let genes = format!("{:?}", rec.final_best.genotype.values);
        let cfg = RunConfigFile {
            config,
            fitness: format!("dejong:{f}"),
            dataset_digest: "none".into(),
        };
        (EvoLog::from_record(&rec), cfg, genes)
    } else if a.fitness == "regression" {
        let data = a.data.load()?;
        let rec = run(&data, &config)?;
        let names: Vec<&str> = rec
            .final_best
            .genotype
            .sorted_genes()
            .iter()
            .map(|&i| data.descriptor_names()[i].as_str())
            .collect();
        let cfg = RunConfigFile {
            config,
            fitness: "regression".into(),
            dataset_digest: data.digest(),
        };
        (EvoLog::from_record(&rec), cfg, names.join(" "))
    } else {
        return Err(CliError::Usage(format!("unknown fitness `{}`", a.fitness)));
    };
    let best = log.rows.last().map(|r| r.best).unwrap_or(f64::NAN);
    println!("best fitness {}", format_real(best));
    println!("best genotype {genes}");
    println!("improvements {}", log.improvement_events().len());
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let stem = format!("run_{}_{}", cfg.config.strategy, cfg.config.seed);
        let cfg_path = dir.join(format!("{stem}_cfg.txt"));
        let evo_path = dir.join(format!("{stem}_evo.txt"));
        std::fs::write(&cfg_path, cfg.to_text()).map_err(|e| io_err(&cfg_path, e))?;
        std::fs::write(&evo_path, log.to_text()).map_err(|e| io_err(&evo_path, e))?;
    }
    Ok(())
}

fn read_start(path: &Path, c: usize) -> Result<AllelePopulation, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut strings = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let s: Option<Vec<u32>> = line.chars().map(|ch| ch.to_digit(36)).collect();
        strings.push(s.ok_or_else(|| CliError::Usage(format!("`{line}` is not a digit string")))?);
    }
    Ok(AllelePopulation::new(c, &strings)?)
}

fn cmd_equilibrium(a: &EquilibriumArgs) -> Result<(), CliError> {
    let pop0 = match &a.start {
        Some(p) => read_start(p, a.cardinality)?,
        None => AllelePopulation::filled(a.cardinality, &vec![0; a.length], a.pop)?,
    };
    let mut rng = GaRng::seed_from_u64(a.seed);
    let t = trajectory(&pop0, a.mode, a.mutation_rate, a.steps, &mut rng)?;
    let csv = t.to_csv();
    match &a.out {
        Some(p) => std::fs::write(p, &csv).map_err(|e| io_err(p, e))?,
        None => print!("{csv}"),
    }
    let last = t.series.last().expect("trajectory has a start");
    eprintln!("final distance to limit {:.6}", last.distance);
    Ok(())
}

fn cmd_fit_dist(a: &FitDistArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| io_err(&a.input, e))?;
    let values = parse_values(&text)?;
    match a.dist {
        Dist::Gev | Dist::GevMin => {
            let orientation = match a.dist {
                Dist::Gev => Orientation::Maxima,
                _ => Orientation::Minima,
            };
            let fit = fit_gev(&values, orientation, a.refine)?;
            println!("n={}", fit.n);
            println!("location={}", format_real(fit.params.location));
            println!("scale={}", format_real(fit.params.scale));
            println!("shape={}", format_real(fit.params.shape));
            println!("tail={}{}", fit.tail, if fit.uncertain { " (uncertain)" } else { "" });
            println!("ks={}", format_real(fit.ks));
            let lot = lottery_report(&fit);
            for (q, v) in lot.unlucky.iter().chain(&lot.lucky) {
                println!("quantile_{q}={}", format_real(*v));
            }
        }
        Dist::Lp3 => {
            let fit = fit_lp3(&values)?;
            println!("n={}", fit.n);
            println!("alpha={}", format_real(fit.shape));
            println!("scale={}", format_real(fit.scale));
            println!("method={:?}", fit.method);
            println!("ks={}", format_real(fit.ks));
            if let Ok(full) = fit_lp3_full(&values) {
                println!("full_mean_log={}", format_real(full.mean_log));
                println!("full_sd_log={}", format_real(full.sd_log));
                println!("full_skew_log={}", format_real(full.skew_log));
                println!("full_ks={}", format_real(full.ks));
            }
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(a) => {
            let s = synth_dataset(a.n, a.m, a.k_true, a.noise, a.seed)?;
            write_dataset(&s.data, &a.out)?;
            println!("true indices {:?}", s.true_indices);
            Ok(())
        }
        Command::Run(a) => cmd_run(&a),
        Command::Batch(a) => {
            let mut spec = BatchSpec::new(&a.out);
            spec.source = a.data.source();
            spec.runs_per_strategy = a.runs;
            if !a.strategy.is_empty() {
                spec.strategies = a.strategy.clone();
            }
            spec.base_seed = a.seed;
            spec.config = a.ga.config(GaConfig::default().strategy, 0);
            spec.jobs = a.jobs;
            spec.tag = a.tag.clone();
            let m = cmd_batch(&spec)?;
            println!("{} runs written to {}", m.runs.len(), a.out.display());
            Ok(())
        }
        Command::Exhaustive(a) => {
            let rep = cmd_exhaustive(&a.data.load()?, a.k)?;
            println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
            Ok(())
        }
        Command::Equilibrium(a) => cmd_equilibrium(&a),
        Command::FitDist(a) => cmd_fit_dist(&a),
        Command::Report(a) => {
            for f in cmd_report(&a.manifest, &a.out)? {
                println!("{}", a.out.join(f).display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
