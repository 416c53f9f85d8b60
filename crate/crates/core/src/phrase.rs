//! Instance and class phrase construction from a matched copular tree, and
//! the dictionary filters applied to the results.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use crate::conll::{InvalidTokenId, Sentence, Token, TokenId};
use crate::copular::{match_promising, ConstructKind, PatternMatch};
use crate::error::Error;

/// A lemmatized token of a phrase, with the tags needed by truncation and
/// pseudo-subclass generation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhraseToken {
    pub lemma: String,
    pub postag: String,
    pub deprel: String,
    pub conll_id: TokenId,
}

impl From<&Token> for PhraseToken {
    fn from(t: &Token) -> Self {
        PhraseToken {
            lemma: t.lemma.clone(),
            postag: t.postag.clone(),
            deprel: t.deprel.clone(),
            conll_id: t.id,
        }
    }
}

/// Non-empty run of lemmatized tokens in sentence order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Phrase {
    tokens: Vec<PhraseToken>,
    text: String,
}

impl Phrase {
    /// Returns `None` for an empty list or tokens out of id order.
    pub fn new(tokens: Vec<PhraseToken>) -> Option<Phrase> {
        if tokens.is_empty() || tokens.windows(2).any(|w| w[0].conll_id >= w[1].conll_id) {
            return None;
        }
        let text = join_lemmas(&tokens);
        Some(Phrase { tokens, text })
    }

    pub fn tokens(&self) -> &[PhraseToken] {
        &self.tokens
    }

    /// Lemmas joined by single spaces.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn head(&self) -> &PhraseToken {
        &self.tokens[0]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

pub(crate) fn join_lemmas(tokens: &[PhraseToken]) -> String {
    let mut text = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&t.lemma);
    }
    text
}

/// One IS-A observation from one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawExtraction {
    pub instance: Phrase,
    pub class: Phrase,
    pub kind: ConstructKind,
    pub source_id: String,
}

/// Side of the head that [`offspring`] serializes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Subtree tokens of `head_id` on one side of it, starting next to the head
/// and cut before the first punctuation token of the subtree. Returned in
/// ascending id order; the head itself is not included.
pub fn offspring(
    sentence: &Sentence,
    head_id: TokenId,
    side: Side,
) -> Result<Vec<PhraseToken>, InvalidTokenId> {
    if !sentence.contains(head_id) {
        return Err(InvalidTokenId {
            id: head_id,
            len: sentence.len(),
        });
    }
    let in_subtree = sentence.subtree_mask(head_id);
    let ids: Box<dyn Iterator<Item = TokenId>> = match side {
        Side::Left => Box::new((1..head_id).rev()),
        Side::Right => Box::new(head_id + 1..=sentence.len()),
    };
    let mut out = Vec::new();
    for id in ids.filter(|&id| in_subtree[id]) {
        let tok = sentence.token(id).expect("id in range");
        if tok.is_punctuation() {
            break;
        }
        out.push(PhraseToken::from(tok));
    }
    if side == Side::Left {
        out.reverse();
    }
    Ok(out)
}

const CLASS_TAIL_POS: [&str; 3] = ["adj", "subst", "ger"];
const CLASS_TAIL_DEPREL: [&str; 4] = ["adjunct", "app", "conjunct", "obj"];

fn truncated_len(tail: &[PhraseToken]) -> usize {
    tail.iter()
        .take_while(|t| {
            CLASS_TAIL_POS.contains(&t.postag.as_str())
                && CLASS_TAIL_DEPREL.contains(&t.deprel.as_str())
        })
        .count()
}

/// Longest prefix of a class tail made of nominal modifiers
/// (adj/subst/ger attached as adjunct/app/conjunct/obj).
pub fn truncate_class_tail(tail: &[PhraseToken]) -> Vec<PhraseToken> {
    tail[..truncated_len(tail)].to_vec()
}

/// Instance phrase: the whole N1H subtree on both sides, cut only at
/// punctuation.
pub fn build_instance(sentence: &Sentence, m: &PatternMatch<'_>) -> Phrase {
    let head = m.n1_head;
    let mut tokens = offspring(sentence, head, Side::Left).expect("match head is valid");
    tokens.push(PhraseToken::from(m.n1()));
    tokens.extend(offspring(sentence, head, Side::Right).expect("match head is valid"));
    Phrase::new(tokens).expect("head token makes the phrase non-empty")
}

/// Class phrase: N2H followed by the truncated right offspring. Left
/// dependents (degree words, quantifiers) are dropped.
pub fn build_class(sentence: &Sentence, m: &PatternMatch<'_>) -> Phrase {
    let mut tokens = vec![PhraseToken::from(m.n2())];
    let tail = offspring(sentence, m.n2_head, Side::Right).expect("match head is valid");
    let keep = truncated_len(&tail);
    tokens.extend(tail.into_iter().take(keep));
    Phrase::new(tokens).expect("head token makes the phrase non-empty")
}

/// Set of lowercase words and multi-word entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    words: HashSet<String>,
    phrases: Vec<Vec<String>>,
}

impl Lexicon {
    /// One entry per line; `#` starts a comment line; blank lines ignored.
    /// Multi-word entries are split on whitespace and matched token-wise.
    pub fn parse(text: &str) -> Lexicon {
        let mut lex = Lexicon::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            lex.insert(line);
        }
        lex.phrases.sort();
        lex.phrases.dedup();
        lex
    }

    pub fn insert(&mut self, entry: &str) {
        let parts: Vec<String> = entry.split_whitespace().map(str::to_lowercase).collect();
        match parts.len() {
            0 => {}
            1 => {
                self.words.extend(parts);
            }
            _ => self.phrases.push(parts),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len() + self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    fn any_phrase(&self, mut hit: impl FnMut(&[String]) -> bool) -> bool {
        self.phrases.iter().any(|p| hit(p))
    }
}

/// Catch-all classes and referencing words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterDictionaries {
    pub catchall: Lexicon,
    pub referencing: Lexicon,
}

const DEFAULT_CATCHALL: &str = include_str!("../data/catchall.txt");
const DEFAULT_REFERENCING: &str = include_str!("../data/referencing.txt");

impl FilterDictionaries {
    pub fn new(catchall: Lexicon, referencing: Lexicon) -> Self {
        FilterDictionaries {
            catchall,
            referencing,
        }
    }

    /// The bundled Polish seed lists.
    pub fn bundled() -> Self {
        FilterDictionaries::new(
            Lexicon::parse(DEFAULT_CATCHALL),
            Lexicon::parse(DEFAULT_REFERENCING),
        )
    }

    /// Loads either list from disk, falling back to the bundled one when
    /// the path is `None`.
    pub fn load(catchall: Option<&Path>, referencing: Option<&Path>) -> Result<Self, Error> {
        let read = |path: Option<&Path>, fallback: &str| -> Result<Lexicon, Error> {
            match path {
                Some(p) => std::fs::read_to_string(p)
                    .map(|t| Lexicon::parse(&t))
                    .map_err(|source| Error::io(p, source)),
                None => Ok(Lexicon::parse(fallback)),
            }
        };
        Ok(FilterDictionaries::new(
            read(catchall, DEFAULT_CATCHALL)?,
            read(referencing, DEFAULT_REFERENCING)?,
        ))
    }
}

fn lowercase_lemmas(p: &Phrase) -> Vec<String> {
    p.tokens().iter().map(|t| t.lemma.to_lowercase()).collect()
}

/// False when the class head lemma is a catch-all noun, or a multi-word
/// catch-all entry starts the class.
pub fn passes_catchall(class: &Phrase, dicts: &FilterDictionaries) -> bool {
    let lemmas = lowercase_lemmas(class);
    if dicts.catchall.contains_word(&lemmas[0]) {
        return false;
    }
    !dicts.catchall.any_phrase(|p| lemmas.starts_with(p))
}

/// False when any instance lemma is a referencing word, or a multi-word
/// referencing entry occurs in the instance.
pub fn passes_reference_filter(instance: &Phrase, dicts: &FilterDictionaries) -> bool {
    let lemmas = lowercase_lemmas(instance);
    if lemmas.iter().any(|l| dicts.referencing.contains_word(l)) {
        return false;
    }
    !dicts
        .referencing
        .any_phrase(|p| lemmas.windows(p.len()).any(|w| w == p))
}

/// What happened to one sentence on the copular path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CopularOutcome {
    NoMatch,
    CatchAll(ConstructKind),
    Reference(ConstructKind),
    Extracted(RawExtraction),
}

/// Match, class construction, catch-all filter, instance construction and
/// reference filter, in that order.
pub fn extract_copular(sentence: &Sentence, dicts: &FilterDictionaries) -> CopularOutcome {
    let Some(m) = match_promising(sentence) else {
        return CopularOutcome::NoMatch;
    };
    let class = build_class(sentence, &m);
    if !passes_catchall(&class, dicts) {
        return CopularOutcome::CatchAll(m.kind);
    }
    let instance = build_instance(sentence, &m);
    if !passes_reference_filter(&instance, dicts) {
        return CopularOutcome::Reference(m.kind);
    }
    CopularOutcome::Extracted(RawExtraction {
        instance,
        class,
        kind: m.kind,
        source_id: sentence.source_id().to_string(),
    })
}

pub fn extract(sentence: &Sentence, dicts: &FilterDictionaries) -> Option<RawExtraction> {
    match extract_copular(sentence, dicts) {
        CopularOutcome::Extracted(x) => Some(x),
        _ => None,
    }
}
