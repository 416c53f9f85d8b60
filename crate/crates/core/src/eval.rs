//! Precision estimation from manually scored samples, support-level sweeps,
//! boosting gain and overlap with enumeration-pattern extractions.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::store::{accept, accept_hearst, Breakdown, RelationKey, RelationStore, SupportPolicy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot sample {requested} relations, only {available} accepted")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("sample size must be positive")]
    EmptySample,
    #[error("no scored entries")]
    NoScoredEntries,
    #[error("duplicate relation in sample: {0}")]
    DuplicateKey(RelationKey),
    #[error("scores line {line}: {reason}")]
    BadScoreLine { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Correct,
    Erroneous,
    Unscored,
}

/// Relations with annotator verdicts; keys are unique.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScoredSample {
    entries: Vec<(RelationKey, Verdict)>,
}

impl ScoredSample {
    pub fn new(entries: Vec<(RelationKey, Verdict)>) -> Result<Self, EvalError> {
        let mut seen = HashSet::new();
        for (k, _) in &entries {
            if !seen.insert(k) {
                return Err(EvalError::DuplicateKey(k.clone()));
            }
        }
        Ok(ScoredSample { entries })
    }

    pub fn entries(&self) -> &[(RelationKey, Verdict)] {
        &self.entries
    }

    /// Reads `instance TAB class TAB verdict` lines, verdict `1`, `0` or
    /// blank (unscored). A missing third column also means unscored.
    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self, EvalError> {
        let mut entries = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let bad = |reason: String| EvalError::BadScoreLine { line: n + 1, reason };
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(inst), Some(class)) = (cols.next(), cols.next()) else {
                return Err(bad("expected instance and class columns".into()));
            };
            let verdict = match cols.next().map(str::trim) {
                None | Some("") => Verdict::Unscored,
                Some("1") => Verdict::Correct,
                Some("0") => Verdict::Erroneous,
                Some(other) => return Err(bad(format!("verdict must be 1, 0 or blank, got {other:?}"))),
            };
            let key = RelationKey::new(inst, class).ok_or_else(|| bad("blank relation".into()))?;
            entries.push((key, verdict));
        }
        ScoredSample::new(entries)
    }

    /// Restriction to the given keys.
    pub fn filter<F: Fn(&RelationKey) -> bool>(&self, keep: F) -> ScoredSample {
        ScoredSample {
            entries: self.entries.iter().filter(|(k, _)| keep(k)).cloned().collect(),
        }
    }
}

/// Writes keys as a scoring template with a blank verdict column.
pub fn write_sample_tsv<W: Write>(out: &mut W, keys: &[RelationKey]) -> std::io::Result<()> {
    for k in keys {
        writeln!(out, "{}\t{}\t", k.instance, k.class)?;
    }
    Ok(())
}

/// Uniform sample of `k` accepted relations without replacement,
/// reproducible for a given seed.
pub fn sample_relations(
    store: &RelationStore,
    policy: &SupportPolicy,
    k: usize,
    seed: u64,
) -> Result<Vec<RelationKey>, EvalError> {
    if k == 0 {
        return Err(EvalError::EmptySample);
    }
    let pool: Vec<&RelationKey> = store.accepted(policy).map(|r| &r.key).collect();
    if k > pool.len() {
        return Err(EvalError::SampleTooLarge {
            requested: k,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect())
}

/// `correct / (correct + erroneous)`; unscored entries are ignored.
pub fn estimate_precision(sample: &ScoredSample) -> Result<f64, EvalError> {
    let (mut tp, mut fp) = (0u64, 0u64);
    for (_, v) in &sample.entries {
        match v {
            Verdict::Correct => tp += 1,
            Verdict::Erroneous => fp += 1,
            Verdict::Unscored => {}
        }
    }
    if tp + fp == 0 {
        return Err(EvalError::NoScoredEntries);
    }
    Ok(tp as f64 / (tp + fp) as f64)
}

/// Percentage kept in hundredths of a percent, rounded half-up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(u64);

impl Percent {
    /// `part / whole × 100`, or `None` when `whole` is zero.
    pub fn ratio(part: u64, whole: u64) -> Option<Percent> {
        if whole == 0 {
            return None;
        }
        let num = part as u128 * 10_000 * 2 + whole as u128;
        Some(Percent((num / (2 * whole as u128)) as u64))
    }

    pub fn from_hundredths(h: u64) -> Percent {
        Percent(h)
    }

    pub fn hundredths(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}%", self.0 / 100, self.0 % 100)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PscGain {
    pub baseline: u64,
    pub additional: u64,
    /// Absent when nothing is accepted without boosting.
    pub gain: Option<Percent>,
}

impl PscGain {
    pub fn from_counts(baseline: u64, additional: u64) -> PscGain {
        PscGain {
            baseline,
            additional,
            gain: Percent::ratio(additional, baseline),
        }
    }
}

fn policies(t: u64) -> (SupportPolicy, SupportPolicy) {
    (
        SupportPolicy::new(t, false).expect("t >= 1"),
        SupportPolicy::new(t, true).expect("t >= 1"),
    )
}

/// Relations accepted only because of boosting, relative to the
/// unboosted total.
pub fn psc_gain(store: &RelationStore, t: u64) -> PscGain {
    let (off, on) = policies(t);
    let baseline = store.accepted(&off).count() as u64;
    let with = store.accepted(&on).count() as u64;
    PscGain::from_counts(baseline, with - baseline)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overlap {
    pub t: u64,
    pub hearst: u64,
    pub nom_hearst: u64,
    pub inst_hearst: u64,
    pub nom_inst_hearst: u64,
}

impl Overlap {
    pub fn nom_pct(&self) -> Option<Percent> {
        Percent::ratio(self.nom_hearst, self.hearst)
    }

    pub fn inst_pct(&self) -> Option<Percent> {
        Percent::ratio(self.inst_hearst, self.hearst)
    }

    pub fn nom_inst_pct(&self) -> Option<Percent> {
        Percent::ratio(self.nom_inst_hearst, self.hearst)
    }
}

/// Intersections of copular relations (by construct family) with
/// enumeration-pattern relations, both accepted at level `t`.
/// Percentages are relative to the enumeration-pattern count.
pub fn overlap_report(store: &RelationStore, t: u64, enable_psc: bool) -> Overlap {
    let policy = SupportPolicy::new(t, enable_psc).expect("t >= 1");
    let mut o = Overlap {
        t,
        ..Overlap::default()
    };
    for r in store.records().iter().filter(|r| accept_hearst(r, t)) {
        o.hearst += 1;
        if !accept(r, &policy) {
            continue;
        }
        let kinds = r.copular_kinds(enable_psc);
        let (nom, inst) = (kinds.has_nominative(), kinds.has_instrumental());
        o.nom_hearst += nom as u64;
        o.inst_hearst += inst as u64;
        o.nom_inst_hearst += (nom && inst) as u64;
    }
    o
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t: u64,
    /// Accepted without boosting.
    pub baseline: Breakdown,
    /// Accepted only with boosting, split by boosted kinds.
    pub psc_additional: Breakdown,
    pub gain: PscGain,
    pub precision_without_psc: Option<f64>,
    pub precision_with_psc: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

/// One row per support level. With scores, precision is estimated over the
/// scored relations accepted under each policy.
pub fn sweep(store: &RelationStore, levels: &[u64], scores: Option<&ScoredSample>) -> SweepReport {
    let rows = levels
        .iter()
        .map(|&t| {
            let (off, on) = policies(t);
            let mut extra = Breakdown::default();
            for r in store.accepted(&on).filter(|r| !accept(r, &off)) {
                let kinds = r.copular_kinds(true);
                match (kinds.has_nominative(), kinds.has_instrumental()) {
                    (true, false) => extra.nom_only += 1,
                    (false, true) => extra.inst_only += 1,
                    (true, true) => extra.nom_and_inst += 1,
                    (false, false) => continue,
                }
                extra.total += 1;
            }
            let precision = |policy: SupportPolicy| {
                scores.and_then(|s| {
                    let sub = s.filter(|k| store.get(k).is_some_and(|r| accept(r, &policy)));
                    estimate_precision(&sub).ok()
                })
            };
            SweepRow {
                t,
                baseline: store.construct_breakdown(&off),
                psc_additional: extra,
                gain: psc_gain(store, t),
                precision_without_psc: precision(off),
                precision_with_psc: precision(on),
            }
        })
        .collect();
    SweepReport { rows }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Tsv,
}

fn render(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        Format::Tsv => {
            out.push_str(&header.join("\t"));
            out.push('\n');
            for r in rows {
                out.push_str(&r.join("\t"));
                out.push('\n');
            }
        }
        Format::Text => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for r in rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
                let cells: Vec<String> = cells
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:>w$}"))
                    .collect();
                out.push_str(cells.join("  ").trim_end());
                out.push('\n');
            };
            line(&mut header.iter().copied(), &mut out);
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
            for r in rows {
                line(&mut r.iter().map(String::as_str), &mut out);
            }
        }
    }
    out
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn opt_precision(p: Option<f64>) -> String {
    p.map_or_else(|| "-".to_string(), |p| format!("{p:.4}"))
}

impl SweepReport {
    /// Accepted relations per level without boosting.
    pub fn render_counts(&self, format: Format) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.t.to_string(),
                    r.baseline.nom_only.to_string(),
                    r.baseline.inst_only.to_string(),
                    r.baseline.nom_and_inst.to_string(),
                    r.baseline.total.to_string(),
                ]
            })
            .collect();
        render(format, &["t", "nom", "inst", "nom&inst", "total"], &rows)
    }

    /// Relations gained through boosting per level.
    pub fn render_psc(&self, format: Format) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.t.to_string(),
                    r.psc_additional.nom_only.to_string(),
                    r.psc_additional.inst_only.to_string(),
                    r.psc_additional.nom_and_inst.to_string(),
                    r.gain.additional.to_string(),
                    opt(r.gain.gain),
                ]
            })
            .collect();
        render(format, &["t", "nom", "inst", "nom&inst", "total", "psc gain"], &rows)
    }

    pub fn render_precision(&self, format: Format) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.t.to_string(),
                    opt_precision(r.precision_without_psc),
                    opt_precision(r.precision_with_psc),
                ]
            })
            .collect();
        render(format, &["t", "precision without psc", "precision with psc"], &rows)
    }
}

pub fn render_overlap(rows: &[Overlap], format: Format) -> String {
    let cell = |n: u64, p: Option<Percent>| format!("{n} ({})", opt(p));
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|o| {
            vec![
                o.t.to_string(),
                o.hearst.to_string(),
                cell(o.nom_hearst, o.nom_pct()),
                cell(o.inst_hearst, o.inst_pct()),
                cell(o.nom_inst_hearst, o.nom_inst_pct()),
            ]
        })
        .collect();
    let mut out = render(
        format,
        &["t", "hrst", "nom&hrst", "inst&hrst", "nom&inst&hrst"],
        &rows,
    );
    if format == Format::Text && rows.is_empty() {
        let _ = writeln!(out, "(no levels)");
    }
    out
}
