use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use taxon::eval::{sample_relations, write_sample_tsv, Format};
use taxon::pipeline::{
    read_scores, read_store, run_aggregate, run_extract, write_store, ExtractConfig, Extractor, Methods, Report,
};
use taxon::{Error, FilterDictionaries, SupportPolicy};

const STORE_FILE: &str = "relations.tsv";
const SAMPLE_FILE: &str = "sample.tsv";

/// IS-A relation extraction from dependency-parsed Polish text.
#[derive(Parser, Debug)]
#[command(name = "taxon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract candidate relations from CoNLL files into shard files.
    Extract(ExtractArgs),
    /// Merge extraction shards into a relation store.
    Aggregate(AggregateArgs),
    /// Write support-level, pseudo-subclass and overlap tables for a store.
    Report(ReportArgs),
    /// Draw a reproducible random sample of accepted relations for scoring.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Copular,
    Hearst,
    Both,
}

impl From<MethodArg> for Methods {
    fn from(m: MethodArg) -> Methods {
        match m {
            MethodArg::Copular => Methods::Copular,
            MethodArg::Hearst => Methods::Hearst,
            MethodArg::Both => Methods::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Tsv,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// CoNLL input file; one shard is written per input.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "copular")]
    method: MethodArg,
    /// Catch-all class dictionary, one entry per line (bundled list if omitted).
    #[arg(long, value_name = "PATH")]
    catchall_dict: Option<PathBuf>,
    /// Referencing-word dictionary (bundled list if omitted).
    #[arg(long, value_name = "PATH")]
    reference_dict: Option<PathBuf>,
    /// Sentences held in memory per file.
    #[arg(long, default_value_t = 4096)]
    batch_size: usize,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AggregateArgs {
    /// Extraction shard, or a directory holding `*.extractions.tsv` shards.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PscArgs {
    /// Count pseudo-subclass boosts towards support (default).
    #[arg(long, overrides_with = "no_psc")]
    psc: bool,
    #[arg(long, overrides_with = "psc")]
    no_psc: bool,
}

impl PscArgs {
    fn enabled(&self) -> bool {
        !self.no_psc
    }
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Relation store written by `aggregate`, or the directory holding it.
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "support-level", value_name = "N", default_values_t = [1, 2, 3, 4])]
    support_levels: Vec<u64>,
    #[command(flatten)]
    psc: PscArgs,
    /// Scored sample (instance, class, 1/0) for precision rows.
    #[arg(long, value_name = "PATH")]
    scores: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "support-level", value_name = "N", default_value_t = 1)]
    support_level: u64,
    #[command(flatten)]
    psc: PscArgs,
    #[arg(long, default_value_t = 110)]
    sample_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) => 1,
        Error::Io { .. } => 2,
        Error::Data(_) => 3,
    }
}

fn create_dir(dir: &Path) -> taxon::Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, body: &str) -> taxon::Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// A directory argument stands for the store file inside it.
fn store_path(input: &Path) -> PathBuf {
    if input.is_dir() {
        input.join(STORE_FILE)
    } else {
        input.to_path_buf()
    }
}

fn shard_paths(inputs: &[PathBuf]) -> taxon::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if !input.is_dir() {
            out.push(input.clone());
            continue;
        }
        let entries = fs::read_dir(input).map_err(|e| Error::io(input, e))?;
        let mut found = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(input, e))?.path();
            if path.to_string_lossy().ends_with(".extractions.tsv") {
                found.push(path);
            }
        }
        found.sort();
        out.extend(found);
    }
    Ok(out)
}

fn extract(args: ExtractArgs) -> taxon::Result<()> {
    let dicts = FilterDictionaries::load(args.catchall_dict.as_deref(), args.reference_dict.as_deref())?;
    let extractor = Extractor::new(args.method.into(), dicts);
    let config = ExtractConfig {
        inputs: args.input,
        out_dir: args.out,
        batch_size: args.batch_size,
    };
    let summary = run_extract(&extractor, &config)?;
    println!("{}", summary.counters);
    Ok(())
}

fn aggregate(args: AggregateArgs) -> taxon::Result<()> {
    let shards = shard_paths(&args.input)?;
    let (store, counters) = run_aggregate(&shards)?;
    create_dir(&args.out)?;
    write_store(&store, &args.out.join(STORE_FILE))?;
    println!("shards\t{}", shards.len());
    println!("rows\t{}", counters.rows);
    println!("malformed rows\t{}", counters.malformed);
    println!("relations\t{}", store.len());
    Ok(())
}

fn report(args: ReportArgs) -> taxon::Result<()> {
    let store = read_store(&store_path(&args.input))?;
    let scores = args.scores.as_deref().map(read_scores).transpose()?;
    let report = Report::build(&store, &args.support_levels, args.psc.enabled(), scores.as_ref())?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let format = match args.format {
        FormatArg::Text => Format::Text,
        FormatArg::Tsv => Format::Tsv,
    };
    create_dir(&args.out)?;
    for (name, body) in report.render(format) {
        write_file(&args.out.join(&name), &body)?;
        println!("{name}");
    }
    Ok(())
}

fn sample(args: SampleArgs) -> taxon::Result<()> {
    let store = read_store(&store_path(&args.input))?;
    let policy = SupportPolicy::new(args.support_level, args.psc.enabled())?;
    let keys = sample_relations(&store, &policy, args.sample_size, args.seed).map_err(|e| Error::Data(e.to_string()))?;
    create_dir(&args.out)?;
    let path = args.out.join(SAMPLE_FILE);
    let mut body = Vec::new();
    write_sample_tsv(&mut body, &keys).map_err(|e| Error::io(&path, e))?;
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    println!("sampled\t{}", keys.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Extract(a) => extract(a),
        Command::Aggregate(a) => aggregate(a),
        Command::Report(a) => report(a),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
