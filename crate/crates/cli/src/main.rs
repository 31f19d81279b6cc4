use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use elbt_core::engine::{self, LbtConfig, DEFAULT_BATCH, DEFAULT_SEED_SUITE, DEFAULT_TARGET};
use elbt_core::experiment::{self, RANDOM};
use elbt_core::lang::{self, Program};
use elbt_core::learners::{parse_combo, DEFAULT_MEMBERS};
use elbt_core::mutation::{self, DEFAULT_CAP};
use elbt_core::specgen::{generate_batch, random_batch, SpecSet};
use elbt_core::suite::{read_suite_csv, write_suite_csv};

#[derive(Parser)]
#[command(name = "elbt", version, about = "Ensemble learning-based test generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a candidate batch as CSV with a provenance column
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BATCH)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Uniform draws over the variable bounds instead of branch witnesses
        #[arg(long)]
        random: bool,
    },
    /// Run a program on one input
    Exec {
        #[arg(long)]
        sut: PathBuf,
        #[arg(allow_negative_numbers = true)]
        input: Vec<i64>,
    },
    /// Generate first-order mutants as JSON lines
    Mutate {
        #[arg(long)]
        sut: PathBuf,
        /// Drop mutants that fault on spec-derived probe inputs
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a suite against mutants; writes mutant_id,status,killing_test_index
    Score {
        #[arg(long)]
        sut: PathBuf,
        #[arg(long)]
        mutants: PathBuf,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build one suite with a committee (or `--combo random`)
    Run {
        #[arg(long)]
        sut: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        combo: String,
        #[arg(long, default_value_t = DEFAULT_TARGET)]
        target: usize,
        #[arg(long = "seed-suite", default_value_t = DEFAULT_SEED_SUITE)]
        seed_suite: usize,
        #[arg(long, default_value_t = DEFAULT_BATCH)]
        batch: usize,
        #[arg(long, default_value_t = DEFAULT_MEMBERS)]
        members: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run every combination and the random baseline from a TOML config
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    lang::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_spec(path: &Path) -> Result<SpecSet> {
    SpecSet::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn gen(spec: &Path, batch: usize, seed: u64, random: bool) -> Result<()> {
    let spec = load_spec(spec)?;
    let batch = if random {
        random_batch(&spec, batch, seed)
    } else {
        generate_batch(&spec, batch, seed)?
    };
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    let mut header: Vec<String> = spec.vars.iter().map(|v| v.name.clone()).collect();
    header.push("provenance".into());
    w.write_record(&header)?;
    for (input, prov) in batch.iter() {
        let mut row: Vec<String> = input.iter().map(i64::to_string).collect();
        row.push(prov.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn mutate(sut: &Path, spec: Option<&Path>, seed: u64, cap: usize, out: &Path) -> Result<()> {
    let program = load_program(sut)?;
    let all = mutation::generate_mutants(&program);
    let generated = all.len();
    let kept = match spec {
        Some(s) => mutation::filter_executable(all, &mutation::default_probes(&load_spec(s)?, seed)),
        None => all,
    };
    let executable = kept.len();
    let capped = mutation::cap_mutants(kept, cap, seed);
    let mut w = create(out)?;
    mutation::write_mutants_jsonl(&mut w, &capped)?;
    w.flush()?;
    eprintln!("generated={generated} executable={executable} written={}", capped.len());
    Ok(())
}

fn score(sut: &Path, mutants: &Path, suite: &Path, out: Option<&Path>) -> Result<()> {
    let program = load_program(sut)?;
    let file = File::open(mutants).with_context(|| format!("opening {}", mutants.display()))?;
    let mutants = mutation::read_mutants_jsonl(BufReader::new(file), &program)?;
    let suite = read_suite_csv(read(suite)?.as_bytes(), &program.class_labels())?;
    let report = mutation::score_suite(&mutants, &suite);
    match out {
        Some(p) => report.write_csv(create(p)?)?,
        None => report.write_csv(io::stdout().lock())?,
    }
    eprintln!(
        "killed {} of {} (score {:.4})",
        report.kill_count, report.executable, report.mutation_score
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run(
    sut: &Path,
    spec: &Path,
    combo: &str,
    target: usize,
    seed_suite: usize,
    batch: usize,
    members: usize,
    seed: u64,
    out: &Path,
    trace: Option<&Path>,
) -> Result<()> {
    let program = load_program(sut)?;
    let spec = load_spec(spec)?;
    let (suite, run_trace) = if combo == RANDOM {
        (engine::random_suite(&spec, &program, target, seed)?, None)
    } else {
        let Some(c) = parse_combo(combo) else {
            bail!("unknown combo {combo:?}");
        };
        let mut ensemble = c.spec();
        ensemble.n_members = members;
        let cfg = LbtConfig {
            seed_suite_size: seed_suite,
            batch_size: batch,
            target_suite_size: target,
            ensemble,
            seed,
        };
        let (suite, t) = engine::run(&cfg, &spec, &program)?;
        (suite, Some(t))
    };
    write_suite_csv(create(out)?, &suite)?;
    if let (Some(path), Some(t)) = (trace, run_trace) {
        t.write_csv(create(path)?)?;
    }
    Ok(())
}

fn experiment(config: &Path) -> Result<bool> {
    let table = experiment::run_config(config)?;
    for row in table.aggregate() {
        println!(
            "{:<8} {:<9} kills {:>8.2} ± {:<6.2} score {:.4}",
            row.combo, row.family, row.mean_kills, row.std_kills, row.mean_score
        );
    }
    for f in &table.failures {
        eprintln!("run {} seed {} failed: {}", f.combo, f.seed, f.message);
    }
    Ok(table.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen {
            spec,
            batch,
            seed,
            random,
        } => gen(&spec, batch, seed, random).map(|_| true),
        Command::Exec { sut, input } => load_program(&sut).and_then(|p| {
            let v = lang::execute(&p, &input).map_err(|f| anyhow::anyhow!("fault: {f}"))?;
            println!("{v}");
            Ok(true)
        }),
        Command::Mutate {
            sut,
            spec,
            seed,
            cap,
            out,
        } => mutate(&sut, spec.as_deref(), seed, cap, &out).map(|_| true),
        Command::Score {
            sut,
            mutants,
            suite,
            out,
        } => score(&sut, &mutants, &suite, out.as_deref()).map(|_| true),
        Command::Run {
            sut,
            spec,
            combo,
            target,
            seed_suite,
            batch,
            members,
            seed,
            out,
            trace,
        } => run(
            &sut,
            &spec,
            &combo,
            target,
            seed_suite,
            batch,
            members,
            seed,
            &out,
            trace.as_deref(),
        )
        .map(|_| true),
        Command::Experiment { config } => experiment(&config),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
