//! End-to-end stages: extraction into shard files, aggregation of shards
//! into a relation store, and report generation.
//!
//! Sentences are read in batches and each batch is processed with rayon
//! when the `parallel` feature is on; results keep input order, so output
//! is identical with or without the feature.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::conll::{ConllReader, ReadError, Sentence};
use crate::copular::{suffix_diagnostic, match_promising, ConstructKind};
use crate::error::{Error, Result};
use crate::eval::{overlap_report, sweep, Format, Overlap, ScoredSample, SweepReport};
use crate::hearst::{extract_hearst_traced, HearstConfig, HearstOutcome};
use crate::phrase::{extract_copular, CopularOutcome, FilterDictionaries, RawExtraction};
use crate::store::{ClassToken, PartialStore, RelationStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Methods {
    Copular,
    Hearst,
    #[default]
    Both,
}

impl Methods {
    pub fn copular(self) -> bool {
        matches!(self, Methods::Copular | Methods::Both)
    }

    pub fn hearst(self) -> bool {
        matches!(self, Methods::Hearst | Methods::Both)
    }
}

/// Copular-path counters. Every read sentence is rejected, unmatched or
/// matched; every matched sentence is filtered or emitted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CopularCounters {
    pub unmatched: u64,
    pub matched_nom: u64,
    pub matched_inst_present: u64,
    pub matched_inst_past: u64,
    pub filtered_catchall: u64,
    pub filtered_reference: u64,
    pub emitted: u64,
}

impl CopularCounters {
    pub fn matched(&self) -> u64 {
        self.matched_nom + self.matched_inst_present + self.matched_inst_past
    }

    fn count_match(&mut self, kind: ConstructKind) {
        match kind {
            ConstructKind::NomCopula => self.matched_nom += 1,
            ConstructKind::InstPresent => self.matched_inst_present += 1,
            ConstructKind::InstPast => self.matched_inst_past += 1,
            ConstructKind::Hearst => unreachable!("copular path"),
        }
    }

    fn absorb(&mut self, o: &CopularCounters) {
        self.unmatched += o.unmatched;
        self.matched_nom += o.matched_nom;
        self.matched_inst_present += o.matched_inst_present;
        self.matched_inst_past += o.matched_inst_past;
        self.filtered_catchall += o.filtered_catchall;
        self.filtered_reference += o.filtered_reference;
        self.emitted += o.emitted;
    }
}

/// Enumeration-path counters, per sentence except `rows`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HearstCounters {
    pub unmatched: u64,
    pub matched: u64,
    pub no_list: u64,
    pub no_class: u64,
    pub filtered_catchall: u64,
    pub filtered_reference: u64,
    pub emitted: u64,
    pub rows: u64,
}

impl HearstCounters {
    fn absorb(&mut self, o: &HearstCounters) {
        self.unmatched += o.unmatched;
        self.matched += o.matched;
        self.no_list += o.no_list;
        self.no_class += o.no_class;
        self.filtered_catchall += o.filtered_catchall;
        self.filtered_reference += o.filtered_reference;
        self.emitted += o.emitted;
        self.rows += o.rows;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtractCounters {
    pub sentences_read: u64,
    pub rejected: u64,
    pub copular: CopularCounters,
    pub hearst: HearstCounters,
    pub tagger_warnings: u64,
    pub rows_written: u64,
}

impl ExtractCounters {
    pub fn absorb(&mut self, o: &ExtractCounters) {
        self.sentences_read += o.sentences_read;
        self.rejected += o.rejected;
        self.copular.absorb(&o.copular);
        self.hearst.absorb(&o.hearst);
        self.tagger_warnings += o.tagger_warnings;
        self.rows_written += o.rows_written;
    }
}

impl fmt::Display for ExtractCounters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.copular;
        let h = &self.hearst;
        writeln!(f, "sentences read\t{}", self.sentences_read)?;
        writeln!(f, "sentences rejected\t{}", self.rejected)?;
        writeln!(f, "copular unmatched\t{}", c.unmatched)?;
        writeln!(f, "copular matched nom\t{}", c.matched_nom)?;
        writeln!(f, "copular matched inst-present\t{}", c.matched_inst_present)?;
        writeln!(f, "copular matched inst-past\t{}", c.matched_inst_past)?;
        writeln!(f, "copular filtered catch-all\t{}", c.filtered_catchall)?;
        writeln!(f, "copular filtered reference\t{}", c.filtered_reference)?;
        writeln!(f, "copular emitted\t{}", c.emitted)?;
        writeln!(f, "hearst unmatched\t{}", h.unmatched)?;
        writeln!(f, "hearst matched\t{}", h.matched)?;
        writeln!(f, "hearst no list\t{}", h.no_list)?;
        writeln!(f, "hearst no class\t{}", h.no_class)?;
        writeln!(f, "hearst filtered catch-all\t{}", h.filtered_catchall)?;
        writeln!(f, "hearst filtered reference\t{}", h.filtered_reference)?;
        writeln!(f, "hearst emitted\t{}", h.emitted)?;
        writeln!(f, "hearst rows\t{}", h.rows)?;
        writeln!(f, "tagger warnings\t{}", self.tagger_warnings)?;
        write!(f, "rows written\t{}", self.rows_written)
    }
}

/// Everything one sentence produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SentenceOutput {
    pub extractions: Vec<RawExtraction>,
    pub counters: ExtractCounters,
    pub diagnostics: Vec<String>,
}

/// Stateless per-sentence extractor shared by all workers.
#[derive(Clone, Debug)]
pub struct Extractor {
    pub methods: Methods,
    pub dicts: FilterDictionaries,
    pub hearst: HearstConfig,
}

impl Extractor {
    pub fn new(methods: Methods, dicts: FilterDictionaries) -> Self {
        Extractor {
            methods,
            dicts,
            hearst: HearstConfig::default(),
        }
    }

    pub fn process(&self, sentence: &Sentence) -> SentenceOutput {
        let mut out = SentenceOutput::default();
        out.counters.sentences_read = 1;
        if self.methods.copular() {
            let c = &mut out.counters.copular;
            match extract_copular(sentence, &self.dicts) {
                CopularOutcome::NoMatch => c.unmatched += 1,
                CopularOutcome::CatchAll(k) => {
                    c.count_match(k);
                    c.filtered_catchall += 1;
                }
                CopularOutcome::Reference(k) => {
                    c.count_match(k);
                    c.filtered_reference += 1;
                }
                CopularOutcome::Extracted(x) => {
                    c.count_match(x.kind);
                    c.emitted += 1;
                    out.extractions.push(x);
                }
            }
            if let Some(diag) = match_promising(sentence).as_ref().and_then(suffix_diagnostic) {
                out.counters.tagger_warnings += 1;
                out.diagnostics.push(diag);
            }
        }
        if self.methods.hearst() {
            let h = &mut out.counters.hearst;
            match extract_hearst_traced(sentence, &self.dicts, &self.hearst) {
                HearstOutcome::NoTrigger => h.unmatched += 1,
                other => {
                    h.matched += 1;
                    match other {
                        HearstOutcome::NoList => h.no_list += 1,
                        HearstOutcome::NoClass => h.no_class += 1,
                        HearstOutcome::CatchAll => h.filtered_catchall += 1,
                        HearstOutcome::Reference => h.filtered_reference += 1,
                        HearstOutcome::Extracted(xs) => {
                            h.emitted += 1;
                            h.rows += xs.len() as u64;
                            out.extractions.extend(xs);
                        }
                        HearstOutcome::NoTrigger => unreachable!(),
                    }
                }
            }
        }
        out.extractions.sort_by(|a, b| {
            (a.instance.text(), a.class.text(), a.kind).cmp(&(b.instance.text(), b.class.text(), b.kind))
        });
        out
    }

    pub fn extract_batch_sequential(&self, batch: &[Sentence]) -> Vec<SentenceOutput> {
        batch.iter().map(|s| self.process(s)).collect()
    }

    #[cfg(feature = "parallel")]
    pub fn extract_batch_parallel(&self, batch: &[Sentence]) -> Vec<SentenceOutput> {
        batch.par_iter().with_min_len(64).map(|s| self.process(s)).collect()
    }

    /// Output order follows input order either way.
    pub fn extract_batch(&self, batch: &[Sentence]) -> Vec<SentenceOutput> {
        #[cfg(feature = "parallel")]
        {
            self.extract_batch_parallel(batch)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.extract_batch_sequential(batch)
        }
    }
}

/// One line of an extraction shard.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardRow {
    pub instance: String,
    pub class: Vec<ClassToken>,
    pub kind: ConstructKind,
    pub source_id: String,
}

impl ShardRow {
    pub fn from_extraction(x: &RawExtraction) -> Self {
        ShardRow {
            instance: x.instance.text().to_string(),
            class: x.class.tokens().iter().map(ClassToken::from).collect(),
            kind: x.kind,
            source_id: x.source_id.clone(),
        }
    }

    /// `instance TAB lemma/pos lemma/pos… TAB kind TAB source_id`
    pub fn to_line(&self) -> String {
        let class: Vec<String> = self
            .class
            .iter()
            .map(|t| format!("{}/{}", t.lemma, t.postag))
            .collect();
        format!("{}\t{}\t{}\t{}", self.instance, class.join(" "), self.kind, self.source_id)
    }

    pub fn parse(line: &str) -> Option<ShardRow> {
        let mut cols = line.split('\t');
        let (instance, class, kind, source_id) = (cols.next()?, cols.next()?, cols.next()?, cols.next()?);
        if cols.next().is_some() || instance.trim().is_empty() {
            return None;
        }
        let class = class
            .split(' ')
            .map(|t| {
                let (lemma, pos) = t.rsplit_once('/')?;
                (!lemma.is_empty() && !pos.is_empty()).then(|| ClassToken::new(lemma, pos))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(ShardRow {
            instance: instance.to_string(),
            class,
            kind: kind.parse().ok()?,
            source_id: source_id.to_string(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExtractConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub batch_size: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ExtractSummary {
    pub counters: ExtractCounters,
    pub shards: Vec<PathBuf>,
}

fn shard_stem(index: usize, input: &Path) -> String {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string());
    format!("{index:04}-{stem}")
}

/// Streams one CoNLL file through the extractor into a shard file and a
/// diagnostics log. Only one batch of sentences is resident at a time.
pub fn extract_file(
    extractor: &Extractor,
    input: &Path,
    shard: &Path,
    diagnostics: &Path,
    batch_size: usize,
) -> Result<ExtractCounters> {
    let file = File::open(input).map_err(|e| Error::io(input, e))?;
    let source = input.to_string_lossy().into_owned();
    let mut reader = ConllReader::new(BufReader::new(file), source);
    let mut rows = BufWriter::new(File::create(shard).map_err(|e| Error::io(shard, e))?);
    let mut diag = BufWriter::new(File::create(diagnostics).map_err(|e| Error::io(diagnostics, e))?);
    let mut counters = ExtractCounters::default();
    let batch_size = batch_size.max(1);

    let mut batch = Vec::with_capacity(batch_size);
    let mut done = false;
    while !done {
        batch.clear();
        while batch.len() < batch_size {
            match reader.next() {
                None => {
                    done = true;
                    break;
                }
                Some(Ok(s)) => batch.push(s),
                Some(Err(ReadError::Rejected(r))) => {
                    counters.sentences_read += 1;
                    counters.rejected += 1;
                    writeln!(diag, "{r}").map_err(|e| Error::io(diagnostics, e))?;
                }
                Some(Err(ReadError::Io(e))) => return Err(Error::io(input, e)),
            }
        }
        for out in extractor.extract_batch(&batch) {
            counters.absorb(&out.counters);
            for x in &out.extractions {
                writeln!(rows, "{}", ShardRow::from_extraction(x).to_line())
                    .map_err(|e| Error::io(shard, e))?;
                counters.rows_written += 1;
            }
            for d in &out.diagnostics {
                writeln!(diag, "{d}").map_err(|e| Error::io(diagnostics, e))?;
            }
        }
    }
    rows.flush().map_err(|e| Error::io(shard, e))?;
    diag.flush().map_err(|e| Error::io(diagnostics, e))?;
    Ok(counters)
}

/// Extracts every input into `<out>/<nnnn>-<stem>.extractions.tsv`, one
/// shard per input file. Files are processed concurrently.
pub fn run_extract(extractor: &Extractor, config: &ExtractConfig) -> Result<ExtractSummary> {
    if config.inputs.is_empty() {
        return Err(Error::Usage("no input files".into()));
    }
    for input in &config.inputs {
        if !input.is_file() {
            return Err(Error::io(
                input,
                std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
            ));
        }
    }
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;

    let job = |(i, input): (usize, &PathBuf)| -> Result<(PathBuf, ExtractCounters)> {
        let stem = shard_stem(i, input);
        let shard = config.out_dir.join(format!("{stem}.extractions.tsv"));
        let diag = config.out_dir.join(format!("{stem}.diagnostics.log"));
        let counters = extract_file(extractor, input, &shard, &diag, config.batch_size)?;
        Ok((shard, counters))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = config.inputs.par_iter().enumerate().map(job).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = config.inputs.iter().enumerate().map(job).collect();

    let mut summary = ExtractSummary::default();
    for r in results {
        let (shard, counters) = r?;
        summary.counters.absorb(&counters);
        summary.shards.push(shard);
    }
    Ok(summary)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AggregateCounters {
    pub rows: u64,
    pub malformed: u64,
}

/// Builds a partial store from one shard; malformed rows are skipped.
pub fn partial_store_from_shard<R: BufRead>(input: R) -> std::io::Result<(PartialStore, AggregateCounters)> {
    let mut store = PartialStore::new();
    let mut counters = AggregateCounters::default();
    for line in input.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        match ShardRow::parse(&line) {
            Some(row) if !row.class.is_empty() => {
                store.add(&row.instance, &row.class, row.kind);
                counters.rows += 1;
            }
            _ => counters.malformed += 1,
        }
    }
    Ok((store, counters))
}

/// Reduces shards into one store. The result does not depend on shard
/// order or on how rows were split between shards.
pub fn run_aggregate(shards: &[PathBuf]) -> Result<(RelationStore, AggregateCounters)> {
    if shards.is_empty() {
        return Err(Error::Usage("no extraction shards".into()));
    }
    let load = |path: &PathBuf| -> Result<(PartialStore, AggregateCounters)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        partial_store_from_shard(BufReader::new(file)).map_err(|e| Error::io(path, e))
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<_> = shards.par_iter().map(load).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<_> = shards.iter().map(load).collect();

    let mut store = PartialStore::new();
    let mut counters = AggregateCounters::default();
    for part in parts {
        let (p, c) = part?;
        store = crate::store::merge(store, p);
        counters.rows += c.rows;
        counters.malformed += c.malformed;
    }
    Ok((store.finalize(), counters))
}

pub fn write_store(store: &RelationStore, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    store
        .write_tsv(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_store(path: &Path) -> Result<RelationStore> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    RelationStore::read_tsv(BufReader::new(file))
}

pub fn read_scores(path: &Path) -> Result<ScoredSample> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ScoredSample::read_tsv(BufReader::new(file)).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

/// All report tables for one store.
#[derive(Clone, Debug)]
pub struct Report {
    pub sweep: SweepReport,
    pub overlap: Vec<Overlap>,
    pub warnings: Vec<String>,
    pub with_precision: bool,
}

impl Report {
    pub fn build(
        store: &RelationStore,
        levels: &[u64],
        enable_psc: bool,
        scores: Option<&ScoredSample>,
    ) -> Result<Report> {
        if levels.is_empty() || levels.contains(&0) {
            return Err(Error::Usage("support levels must be positive".into()));
        }
        let mut warnings = Vec::new();
        if !store.has_hearst() {
            warnings.push("store has no enumeration-pattern records; overlap is all zeros".to_string());
        }
        Ok(Report {
            sweep: sweep(store, levels, scores),
            overlap: levels.iter().map(|&t| overlap_report(store, t, enable_psc)).collect(),
            warnings,
            with_precision: scores.is_some(),
        })
    }

    /// `(file name, contents)` for every table.
    pub fn render(&self, format: Format) -> Vec<(String, String)> {
        let ext = match format {
            Format::Text => "txt",
            Format::Tsv => "tsv",
        };
        let mut files = vec![
            (format!("counts.{ext}"), self.sweep.render_counts(format)),
            (format!("psc-gain.{ext}"), self.sweep.render_psc(format)),
            (format!("overlap.{ext}"), crate::eval::render_overlap(&self.overlap, format)),
        ];
        if self.with_precision {
            files.push((format!("precision.{ext}"), self.sweep.render_precision(format)));
        }
        files
    }
}
