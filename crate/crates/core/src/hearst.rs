//! Enumeration patterns of the form "C, taki jak i1, i2 i i3".
//!
//! Class detection uses a part-of-speech run heuristic: the nominal run
//! directly left of the trigger (punctuation skipped) is the class. It sits
//! behind [`detect_class_left_of_trigger`] so a learned boundary model can
//! replace it.

use crate::conll::{Sentence, Token, TokenId};
use crate::copular::ConstructKind;
use crate::phrase::{
    passes_catchall, passes_reference_filter, FilterDictionaries, Phrase, PhraseToken,
    RawExtraction,
};

/// Inclusive token id range of "taki jak [na przykład | np.]".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriggerSpan {
    pub start: TokenId,
    pub end: TokenId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HearstConfig {
    /// Longest accepted list element, in tokens.
    pub max_segment_len: usize,
}

impl Default for HearstConfig {
    fn default() -> Self {
        HearstConfig { max_segment_len: 5 }
    }
}

const LIST_POS: [&str; 4] = ["subst", "adj", "ger", "num"];
const CLASS_POS: [&str; 3] = ["subst", "adj", "ger"];
const SENTENCE_END: [&str; 5] = [".", "!", "?", "…", "..."];

fn lemma_is(t: Option<&Token>, word: &str) -> bool {
    t.is_some_and(|t| t.lemma.to_lowercase() == word)
}

/// First occurrence of "taki jak", extended to the longest variant
/// ("taki jak na przykład", "taki jak np."). Matched on lemmas so any
/// inflection of "taki" qualifies.
pub fn find_enumeration_trigger(sentence: &Sentence) -> Option<TriggerSpan> {
    let tok = |id: TokenId| sentence.token(id);
    (1..sentence.len()).find_map(|id| {
        if !(lemma_is(tok(id), "taki") && lemma_is(tok(id + 1), "jak")) {
            return None;
        }
        let mut end = id + 1;
        if lemma_is(tok(end + 1), "na") && lemma_is(tok(end + 2), "przykład") {
            end += 2;
        } else if lemma_is(tok(end + 1), "np.") {
            end += 1;
        } else if lemma_is(tok(end + 1), "np") && tok(end + 2).is_some_and(|t| t.form == ".") {
            end += 2;
        }
        Some(TriggerSpan { start: id, end })
    })
}

fn is_conjunction(t: &Token) -> bool {
    let form = t.form.to_lowercase();
    form == "i" || form == "oraz"
}

/// Splits the words after the trigger into list elements.
///
/// The tail runs to the first sentence-final punctuation mark. Elements are
/// separated by commas, the last one optionally by "i"/"oraz". Every
/// element must hold 1..=`max_segment_len` nominal tokens
/// (subst/adj/ger/num), otherwise there is no list.
pub fn parse_enumeration_list(
    sentence: &Sentence,
    trigger: TriggerSpan,
    config: &HearstConfig,
) -> Option<Vec<Phrase>> {
    let tail = sentence.tokens()[trigger.end..]
        .iter()
        .take_while(|t| !(t.is_punctuation() && SENTENCE_END.contains(&t.form.as_str())));

    let mut segments: Vec<Vec<&Token>> = vec![Vec::new()];
    for t in tail {
        if t.form == "," {
            segments.push(Vec::new());
        } else {
            segments.last_mut().expect("never empty").push(t);
        }
    }
    let last = segments.pop().expect("never empty");
    match last.iter().position(|t| is_conjunction(t)) {
        Some(pos) => {
            segments.push(last[..pos].to_vec());
            segments.push(last[pos + 1..].to_vec());
        }
        None => segments.push(last),
    }

    segments
        .into_iter()
        .map(|seg| {
            let ok = !seg.is_empty()
                && seg.len() <= config.max_segment_len
                && seg.iter().all(|t| LIST_POS.contains(&t.postag.as_str()));
            if !ok {
                return None;
            }
            Phrase::new(seg.into_iter().map(PhraseToken::from).collect())
        })
        .collect()
}

/// Nominal run (subst/adj/ger, at least one subst) ending right before the
/// trigger, after skipping punctuation. Tokens keep sentence order.
pub fn detect_class_left_of_trigger(sentence: &Sentence, trigger: TriggerSpan) -> Option<Phrase> {
    let mut ids = (1..trigger.start)
        .rev()
        .skip_while(|&id| sentence.token(id).is_some_and(Token::is_punctuation))
        .peekable();
    let mut run = Vec::new();
    while let Some(t) = ids.peek().and_then(|&id| sentence.token(id)) {
        if !CLASS_POS.contains(&t.postag.as_str()) {
            break;
        }
        run.push(PhraseToken::from(t));
        ids.next();
    }
    if !run.iter().any(|t| t.postag == "subst") {
        return None;
    }
    run.reverse();
    Phrase::new(run)
}

/// What happened to one sentence on the enumeration path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HearstOutcome {
    NoTrigger,
    NoList,
    NoClass,
    CatchAll,
    Reference,
    Extracted(Vec<RawExtraction>),
}

pub fn extract_hearst_traced(
    sentence: &Sentence,
    dicts: &FilterDictionaries,
    config: &HearstConfig,
) -> HearstOutcome {
    let Some(trigger) = find_enumeration_trigger(sentence) else {
        return HearstOutcome::NoTrigger;
    };
    let Some(items) = parse_enumeration_list(sentence, trigger, config) else {
        return HearstOutcome::NoList;
    };
    let Some(class) = detect_class_left_of_trigger(sentence, trigger) else {
        return HearstOutcome::NoClass;
    };
    if !passes_catchall(&class, dicts) {
        return HearstOutcome::CatchAll;
    }
    if !items.iter().all(|i| passes_reference_filter(i, dicts)) {
        return HearstOutcome::Reference;
    }
    HearstOutcome::Extracted(
        items
            .into_iter()
            .map(|instance| RawExtraction {
                instance,
                class: class.clone(),
                kind: ConstructKind::Hearst,
                source_id: sentence.source_id().to_string(),
            })
            .collect(),
    )
}

/// One extraction per list element, or none if any stage fails.
pub fn extract_hearst(
    sentence: &Sentence,
    dicts: &FilterDictionaries,
    config: &HearstConfig,
) -> Vec<RawExtraction> {
    match extract_hearst_traced(sentence, dicts, config) {
        HearstOutcome::Extracted(xs) => xs,
        _ => Vec::new(),
    }
}
