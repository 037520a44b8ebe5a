use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use verso::algebra::{execution_env, optimal_env, translate, Algebra, Var};
use verso::eval::{
    eval_condensed_with, eval_flat, render_results, EvalOptions, Mutation, OutputFormat,
};
use verso::harness::{bench, compare_engines, fuzz, BenchConfig, FuzzConfig};
use verso::io::{load_manifest_file, load_snapshot, save_snapshot};
use verso::model::{flatten, CondensedDataset};
use verso::query::prepare;

#[derive(Parser)]
#[command(name = "verso", version, about = "Versioned RDF quad store with flat and condensed query engines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load versions listed in a manifest and write a snapshot.
    Load {
        /// Manifest of `label<TAB>path` lines, one per version.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a query against a snapshot.
    Query {
        #[arg(long)]
        store: PathBuf,
        /// File holding the query text.
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Condensed)]
        engine: Engine,
        /// Flatten condensed bindings into one row per versioned graph.
        #[arg(long)]
        expand: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Print the flat plan, its environments and the condensed plan instead of running.
        #[arg(long)]
        explain: bool,
        #[arg(long, hide = true)]
        mutation: Option<String>,
    },
    /// Compare both engines on random stores and queries.
    Fuzz {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        iters: u64,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, hide = true)]
        mutation: Option<String>,
    },
    /// Measure storage and corpus query times over synthetic archives.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "5,20,50")]
        versions: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,5,10")]
        steps: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-query timings here.
        #[arg(long)]
        queries_out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 5)]
        warmup: usize,
        /// Skip query timing.
        #[arg(long)]
        storage_only: bool,
    },
    /// Summarize a snapshot.
    Stats {
        #[arg(long)]
        store: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Flat,
    Condensed,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Table => OutputFormat::Table,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("VERSO_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Load { manifest, out } => cmd_load(&manifest, &out),
        Command::Query {
            store,
            query,
            engine,
            expand,
            format,
            explain,
            mutation,
        } => cmd_query(&store, &query, engine, expand, format.into(), explain, parse_mutation(mutation)?),
        Command::Fuzz {
            seed,
            iters,
            depth,
            mutation,
        } => cmd_fuzz(seed, iters, depth, parse_mutation(mutation)?),
        Command::Bench {
            versions,
            steps,
            out,
            queries_out,
            runs,
            warmup,
            storage_only,
        } => {
            let config = BenchConfig {
                versions,
                steps,
                runs,
                warmup,
                storage_only,
                ..BenchConfig::default()
            };
            cmd_bench(&config, &out, queries_out.as_deref())
        }
        Command::Stats { store } => cmd_stats(&store),
    }
}

fn parse_mutation(name: Option<String>) -> Result<Option<Mutation>> {
    name.map(|n| {
        Mutation::from_name(&n).with_context(|| {
            let known: Vec<&str> = Mutation::ALL.iter().map(|m| m.name()).collect();
            format!("unknown mutation {n:?}; expected one of {}", known.join(", "))
        })
    })
    .transpose()
}

fn summary(d: &CondensedDataset) -> String {
    let c = d.catalog();
    format!(
        "{} versions, {} graphs, {} flat rows, {} condensed entries",
        c.versions.len(),
        c.vi.graphs().count(),
        d.flat_len(),
        d.len()
    )
}

fn cmd_load(manifest: &Path, out: &Path) -> Result<ExitCode> {
    let (_, condensed) = load_manifest_file(manifest)
        .with_context(|| format!("loading {}", manifest.display()))?;
    save_snapshot(&condensed, out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", summary(&condensed));
    Ok(ExitCode::SUCCESS)
}

fn visible_vars(a: &Algebra) -> Vec<Var> {
    a.output_vars().into_iter().filter(|v| !v.is_hidden()).collect()
}

fn cmd_query(
    store: &Path,
    query: &Path,
    engine: Engine,
    expand: bool,
    format: OutputFormat,
    explain: bool,
    mutation: Option<Mutation>,
) -> Result<ExitCode> {
    let text = std::fs::read_to_string(query).with_context(|| format!("reading {}", query.display()))?;
    let flat_plan = prepare(&text).with_context(|| format!("in {}", query.display()))?;
    if explain {
        println!("flat plan:\n{}", flat_plan.pretty());
        println!("optimal environment: {}", optimal_env(&flat_plan)?);
        println!("execution environment: {}", execution_env(&flat_plan)?);
        println!("condensed plan:\n{}", translate(&flat_plan)?.pretty());
        return Ok(ExitCode::SUCCESS);
    }
    let condensed = load_snapshot(store).with_context(|| format!("reading {}", store.display()))?;
    let vars = visible_vars(&flat_plan);
    let options = EvalOptions { mutation };
    match engine {
        Engine::Flat => {
            let flat = flatten(&condensed);
            let result = eval_flat(&flat, &flat_plan)?;
            print!("{}", render_results(&result, &vars, flat.catalog(), format, expand)?);
        }
        Engine::Condensed => {
            let plan = translate(&flat_plan)?;
            let result = eval_condensed_with(&condensed, &plan, &options)?;
            print!("{}", render_results(&result, &vars, condensed.catalog(), format, expand)?);
        }
        Engine::Both => {
            let flat = flatten(&condensed);
            let plan = translate(&flat_plan)?;
            let result = eval_condensed_with(&condensed, &plan, &options)?;
            print!("{}", render_results(&result, &vars, condensed.catalog(), format, expand)?);
            let verdict = compare_engines(&flat, &condensed, &flat_plan, &options);
            eprintln!("{verdict}");
            if !verdict.is_equivalent() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fuzz(seed: u64, iters: u64, depth: usize, mutation: Option<Mutation>) -> Result<ExitCode> {
    let mut config = FuzzConfig::new(seed, iters);
    config.max_depth = depth;
    config.mutation = mutation;
    let report = fuzz(&config);
    println!(
        "seed {seed}: {} iterations, {} failures, {} skipped",
        report.iterations,
        report.failures.len(),
        report.skipped
    );
    if let Some(first) = report.failures.first() {
        println!("{first}");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(config: &BenchConfig, out: &Path, queries_out: Option<&Path>) -> Result<ExitCode> {
    if config.versions.is_empty() || config.steps.is_empty() {
        bail!("bench needs at least one versions value and one steps value");
    }
    let report = bench::run_bench(config)?;
    std::fs::write(out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = queries_out {
        std::fs::write(path, report.queries_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    for row in &report.rows {
        println!(
            "versions={} steps={}: {} flat rows, {} condensed entries (ratio {:.3})",
            row.versions,
            row.steps,
            row.flat_rows,
            row.condensed_entries,
            row.ratio()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(store: &Path) -> Result<ExitCode> {
    let d = load_snapshot(store).with_context(|| format!("reading {}", store.display()))?;
    let c = d.catalog();
    println!("{}", summary(&d));
    println!("{} dictionary terms, {} versioned IRIs", c.dictionary.len(), c.vi.len());
    println!("versions: {}", c.versions.labels().skip(1).collect::<Vec<_>>().join(" "));
    for g in c.vi.graphs() {
        let labels: Vec<&str> = c
            .vi
            .versions_of(g)
            .iter()
            .filter_map(|v| c.versions.label(v))
            .collect();
        println!("  {} in {}", c.term(g).lexical(), labels.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}
