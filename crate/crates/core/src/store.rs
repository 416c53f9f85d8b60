//! Aggregation of raw extractions into relation records, pseudo-subclass
//! boosting and support-level acceptance.
//!
//! Aggregation is map/reduce shaped: [`emit`] turns one extraction into a
//! direct record for `(I, C)` plus one boost record `(I, c)` for every
//! shorter class `c` that `C` refines. Partial stores built from disjoint
//! inputs are combined with [`merge`], which is associative and
//! commutative, so the final store does not depend on how the input was
//! split.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::copular::ConstructKind;
use crate::error::Error;
use crate::phrase::{PhraseToken, RawExtraction};

/// Lowercased, single-space-joined text.
pub fn canonical_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, w) in text.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&w.to_lowercase());
    }
    out
}

/// Aggregation key: canonical instance and class text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationKey {
    pub instance: String,
    pub class: String,
}

impl RelationKey {
    /// Canonicalizes both sides; `None` if either is blank.
    pub fn new(instance: &str, class: &str) -> Option<RelationKey> {
        let instance = canonical_text(instance);
        let class = canonical_text(class);
        (!instance.is_empty() && !class.is_empty()).then_some(RelationKey { instance, class })
    }
}

impl fmt::Display for RelationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} IS-A {}", self.instance, self.class)
    }
}

/// Per-construct counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct KindCounts([u64; 4]);

impl KindCounts {
    pub fn get(&self, kind: ConstructKind) -> u64 {
        self.0[kind.index()]
    }

    pub fn add(&mut self, kind: ConstructKind, n: u64) {
        self.0[kind.index()] += n;
    }

    pub fn absorb(&mut self, other: &KindCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }

    /// Sum over nominative and instrumental constructs.
    pub fn copular(&self) -> u64 {
        ConstructKind::ALL
            .into_iter()
            .filter(|k| k.is_copular())
            .map(|k| self.get(k))
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn kinds(&self) -> KindSet {
        ConstructKind::ALL
            .into_iter()
            .filter(|&k| self.get(k) > 0)
            .collect()
    }
}

/// Small set of construct kinds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct KindSet(u8);

impl KindSet {
    pub fn insert(&mut self, kind: ConstructKind) {
        self.0 |= 1 << kind.index();
    }

    pub fn contains(&self, kind: ConstructKind) -> bool {
        self.0 & (1 << kind.index()) != 0
    }

    pub fn union(self, other: KindSet) -> KindSet {
        KindSet(self.0 | other.0)
    }

    pub fn difference(self, other: KindSet) -> KindSet {
        KindSet(self.0 & !other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ConstructKind> {
        ConstructKind::ALL.into_iter().filter(move |&k| self.contains(k))
    }

    pub fn has_nominative(&self) -> bool {
        self.contains(ConstructKind::NomCopula)
    }

    /// Present and past instrumental both count.
    pub fn has_instrumental(&self) -> bool {
        self.contains(ConstructKind::InstPresent) || self.contains(ConstructKind::InstPast)
    }
}

impl FromIterator<ConstructKind> for KindSet {
    fn from_iter<I: IntoIterator<Item = ConstructKind>>(iter: I) -> Self {
        let mut set = KindSet::default();
        for k in iter {
            set.insert(k);
        }
        set
    }
}

impl fmt::Display for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(k.name())?;
        }
        Ok(())
    }
}

impl FromStr for KindSet {
    type Err = crate::copular::UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .filter(|p| !p.is_empty())
            .map(str::parse::<ConstructKind>)
            .collect()
    }
}

/// Lemma and POS of a class token; all that boosting needs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassToken {
    pub lemma: String,
    pub postag: String,
}

impl ClassToken {
    pub fn new(lemma: impl Into<String>, postag: impl Into<String>) -> Self {
        ClassToken {
            lemma: lemma.into(),
            postag: postag.into(),
        }
    }
}

impl From<&PhraseToken> for ClassToken {
    fn from(t: &PhraseToken) -> Self {
        ClassToken::new(t.lemma.clone(), t.postag.clone())
    }
}

fn tokens_text(tokens: &[ClassToken]) -> String {
    let words: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
    canonical_text(&words.join(" "))
}

/// Classes a class phrase refines: every proper token prefix, plus every
/// non-empty suffix left after stripping one or more leading adjectives.
/// The class itself is never included.
pub fn psc_variants(class_tokens: &[ClassToken]) -> Vec<String> {
    let n = class_tokens.len();
    let full = tokens_text(class_tokens);
    let mut out: Vec<String> = Vec::new();
    let mut push = |text: String| {
        if text != full && !out.contains(&text) {
            out.push(text);
        }
    };
    for len in 1..n {
        push(tokens_text(&class_tokens[..len]));
    }
    for skip in 1..n {
        if class_tokens[skip - 1].postag != "adj" {
            break;
        }
        push(tokens_text(&class_tokens[skip..]));
    }
    out
}

/// One map-phase record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emission {
    pub key: RelationKey,
    pub kind: ConstructKind,
    pub weight: u64,
    /// False for pseudo-subclass boosts.
    pub direct: bool,
}

/// Direct record for `(instance, class)` and a boost for every variant.
pub fn emit(instance: &str, class_tokens: &[ClassToken], kind: ConstructKind) -> Vec<Emission> {
    let instance = canonical_text(instance);
    let Some(key) = RelationKey::new(&instance, &tokens_text(class_tokens)) else {
        return Vec::new();
    };
    let mut out = vec![Emission {
        key,
        kind,
        weight: 1,
        direct: true,
    }];
    out.extend(psc_variants(class_tokens).into_iter().map(|class| Emission {
        key: RelationKey {
            instance: instance.clone(),
            class,
        },
        kind,
        weight: 1,
        direct: false,
    }));
    out
}

pub fn emit_extraction(x: &RawExtraction) -> Vec<Emission> {
    let tokens: Vec<ClassToken> = x.class.tokens().iter().map(ClassToken::from).collect();
    emit(x.instance.text(), &tokens, x.kind)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Tally {
    direct: KindCounts,
    psc: KindCounts,
    // Original-case (instance, class) text. Smallest wins on merge.
    display: Option<(String, String)>,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.direct.absorb(&other.direct);
        self.psc.absorb(&other.psc);
        self.display = match (self.display.take(), other.display) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Map-phase accumulator; may hold boost-only pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialStore {
    tallies: BTreeMap<RelationKey, Tally>,
}

impl PartialStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tallies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tallies.is_empty()
    }

    pub fn add_emission(&mut self, e: Emission) {
        let tally = self.tallies.entry(e.key).or_default();
        if e.direct {
            tally.direct.add(e.kind, e.weight);
        } else {
            tally.psc.add(e.kind, e.weight);
        }
    }

    /// Adds one observation, keeping the original-case text for display.
    pub fn add(&mut self, instance: &str, class_tokens: &[ClassToken], kind: ConstructKind) {
        let class_display: Vec<&str> = class_tokens.iter().map(|t| t.lemma.as_str()).collect();
        let display = (
            instance.split_whitespace().collect::<Vec<_>>().join(" "),
            class_display.join(" "),
        );
        for e in emit(instance, class_tokens, kind) {
            if e.direct {
                let tally = self.tallies.entry(e.key.clone()).or_default();
                tally.absorb(Tally {
                    display: Some(display.clone()),
                    ..Tally::default()
                });
            }
            self.add_emission(e);
        }
    }

    pub fn add_extraction(&mut self, x: &RawExtraction) {
        let tokens: Vec<ClassToken> = x.class.tokens().iter().map(ClassToken::from).collect();
        self.add(x.instance.text(), &tokens, x.kind);
    }

    pub fn merge_from(&mut self, other: PartialStore) {
        for (key, tally) in other.tallies {
            self.tallies.entry(key).or_default().absorb(tally);
        }
    }

    /// Drops boost-only pairs and freezes the result.
    pub fn finalize(self) -> RelationStore {
        let records = self
            .tallies
            .into_iter()
            .filter(|(_, t)| t.direct.total() > 0)
            .map(|(key, t)| {
                let (display_instance, display_class) = t
                    .display
                    .unwrap_or_else(|| (key.instance.clone(), key.class.clone()));
                RelationRecord {
                    display_instance,
                    display_class,
                    direct_counts: t.direct,
                    psc_count: t.psc.copular(),
                    psc_kinds: t.psc.kinds(),
                    key,
                }
            })
            .collect();
        RelationStore { records }
    }
}

/// Field-wise sum of two partial stores.
pub fn merge(a: PartialStore, b: PartialStore) -> PartialStore {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    big.merge_from(small);
    big
}

/// Aggregated evidence for one `(instance, class)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationRecord {
    pub key: RelationKey,
    pub display_instance: String,
    pub display_class: String,
    pub direct_counts: KindCounts,
    /// Boosts from copular extractions only.
    pub psc_count: u64,
    pub psc_kinds: KindSet,
}

impl RelationRecord {
    pub fn copular_direct(&self) -> u64 {
        self.direct_counts.copular()
    }

    pub fn hearst_count(&self) -> u64 {
        self.direct_counts.get(ConstructKind::Hearst)
    }

    /// Copular kinds supporting the record, boosted kinds included when
    /// `with_psc`.
    pub fn copular_kinds(&self, with_psc: bool) -> KindSet {
        let mut kinds = self.direct_counts.kinds();
        if with_psc {
            kinds = kinds.union(self.psc_kinds);
        }
        kinds.difference(std::iter::once(ConstructKind::Hearst).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportPolicy {
    t: u64,
    pub enable_psc: bool,
}

impl SupportPolicy {
    pub fn new(t: u64, enable_psc: bool) -> Result<Self, Error> {
        if t == 0 {
            return Err(Error::Usage("support level must be at least 1".into()));
        }
        Ok(SupportPolicy { t, enable_psc })
    }

    pub fn t(&self) -> u64 {
        self.t
    }
}

/// Copular acceptance: at least one direct copular observation and
/// support (direct, plus boosts when enabled) of at least `t`.
pub fn accept(record: &RelationRecord, policy: &SupportPolicy) -> bool {
    let direct = record.copular_direct();
    let support = if policy.enable_psc {
        direct + record.psc_count
    } else {
        direct
    };
    direct >= 1 && support >= policy.t
}

/// Enumeration-pattern acceptance; boosting does not apply.
pub fn accept_hearst(record: &RelationRecord, t: u64) -> bool {
    record.hearst_count() >= t
}

/// Accepted relations split by construct family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Breakdown {
    pub nom_only: u64,
    pub inst_only: u64,
    pub nom_and_inst: u64,
    pub total: u64,
}

impl Breakdown {
    fn count(&mut self, kinds: KindSet) {
        match (kinds.has_nominative(), kinds.has_instrumental()) {
            (true, false) => self.nom_only += 1,
            (false, true) => self.inst_only += 1,
            (true, true) => self.nom_and_inst += 1,
            (false, false) => return,
        }
        self.total += 1;
    }
}

/// Finalized, key-sorted relation records.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationStore {
    records: Vec<RelationRecord>,
}

const TSV_COLUMNS: usize = 8;

impl RelationStore {
    pub fn records(&self) -> &[RelationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &RelationKey) -> Option<&RelationRecord> {
        self.records
            .binary_search_by(|r| r.key.cmp(key))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn accepted<'a>(
        &'a self,
        policy: &'a SupportPolicy,
    ) -> impl Iterator<Item = &'a RelationRecord> + 'a {
        self.records.iter().filter(move |r| accept(r, policy))
    }

    pub fn has_hearst(&self) -> bool {
        self.records.iter().any(|r| r.hearst_count() > 0)
    }

    /// Counts accepted records by nominative/instrumental support. Boosted
    /// kinds count only when the policy enables boosting.
    pub fn construct_breakdown(&self, policy: &SupportPolicy) -> Breakdown {
        let mut b = Breakdown::default();
        for r in self.accepted(policy) {
            b.count(r.copular_kinds(policy.enable_psc));
        }
        b
    }

    /// One record per line: instance, class, nom, inst-present, inst-past,
    /// hearst, psc, kinds (comma-joined union of direct and boosted kinds).
    pub fn write_tsv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for r in &self.records {
            let c = &r.direct_counts;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.key.instance,
                r.key.class,
                c.get(ConstructKind::NomCopula),
                c.get(ConstructKind::InstPresent),
                c.get(ConstructKind::InstPast),
                c.get(ConstructKind::Hearst),
                r.psc_count,
                c.kinds().union(r.psc_kinds),
            )?;
        }
        Ok(())
    }

    /// Reads the TSV written by [`RelationStore::write_tsv`]. Boosted kinds
    /// that also have direct counts cannot be told apart in the file and
    /// load as direct only; the union is preserved.
    pub fn read_tsv<R: BufRead>(input: R) -> Result<RelationStore, Error> {
        let mut records = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Data(format!("store line {}: {e}", n + 1)))?;
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Data(format!("store line {}: {what}", n + 1));
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != TSV_COLUMNS {
                return Err(bad(&format!("expected {TSV_COLUMNS} columns, found {}", cols.len())));
            }
            let key = RelationKey::new(cols[0], cols[1]).ok_or_else(|| bad("blank key"))?;
            let num = |i: usize| cols[i].parse::<u64>().map_err(|_| bad(&format!("bad count {:?}", cols[i])));
            let mut direct = KindCounts::default();
            for (i, kind) in ConstructKind::ALL.into_iter().enumerate() {
                direct.add(kind, num(2 + i)?);
            }
            if direct.total() == 0 {
                return Err(bad("record without direct observations"));
            }
            let kinds: KindSet = cols[7].parse().map_err(|e| bad(&format!("{e}")))?;
            records.push(RelationRecord {
                display_instance: key.instance.clone(),
                display_class: key.class.clone(),
                direct_counts: direct,
                psc_count: num(6)?,
                psc_kinds: kinds.difference(direct.kinds()),
                key,
            });
        }
        records.sort_by(|a, b| a.key.cmp(&b.key));
        if records.windows(2).any(|w| w[0].key == w[1].key) {
            return Err(Error::Data("store has duplicate keys".into()));
        }
        Ok(RelationStore { records })
    }
}

impl FromIterator<RelationRecord> for RelationStore {
    fn from_iter<I: IntoIterator<Item = RelationRecord>>(iter: I) -> Self {
        let mut records: Vec<RelationRecord> = iter.into_iter().collect();
        records.sort_by(|a, b| a.key.cmp(&b.key));
        RelationStore { records }
    }
}
