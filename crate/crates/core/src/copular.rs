//! Selection of copular sentences ("X to Y", "X jest Y-inst",
//! "X był/była/było Y-inst") from dependency trees.

use std::fmt;
use std::str::FromStr;

use crate::conll::{Case, Gender, Number, Sentence, Token, TokenId};

/// Which construction produced an extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructKind {
    /// `NP1:nom to NP2:nom`
    NomCopula,
    /// `NP1:nom jest NP2:inst`
    InstPresent,
    /// `NP1:nom był|była|było NP2:inst`
    InstPast,
    /// Enumeration after "taki jak".
    Hearst,
}

impl ConstructKind {
    pub const ALL: [ConstructKind; 4] = [
        ConstructKind::NomCopula,
        ConstructKind::InstPresent,
        ConstructKind::InstPast,
        ConstructKind::Hearst,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstructKind::NomCopula => "nom",
            ConstructKind::InstPresent => "inst-present",
            ConstructKind::InstPast => "inst-past",
            ConstructKind::Hearst => "hearst",
        }
    }

    pub fn is_copular(self) -> bool {
        self != ConstructKind::Hearst
    }

    pub fn is_instrumental(self) -> bool {
        matches!(self, ConstructKind::InstPresent | ConstructKind::InstPast)
    }
}

impl fmt::Display for ConstructKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown construct kind {0:?}")]
pub struct UnknownKind(pub String);

impl FromStr for ConstructKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConstructKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// A sentence whose tree has a copular shape, with the heads of both noun
/// phrases located.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternMatch<'s> {
    pub sentence: &'s Sentence,
    pub kind: ConstructKind,
    pub pred_id: TokenId,
    /// Head of the instance-side phrase (subject).
    pub n1_head: TokenId,
    /// Head of the class-side phrase (predicative complement).
    pub n2_head: TokenId,
}

impl PatternMatch<'_> {
    pub fn n1(&self) -> &Token {
        self.sentence.token(self.n1_head).expect("n1_head is valid")
    }

    pub fn n2(&self) -> &Token {
        self.sentence.token(self.n2_head).expect("n2_head is valid")
    }

    /// Re-checks the structural conditions the match was built from.
    pub fn is_consistent(&self) -> bool {
        let root = self.sentence.root();
        let (Some(n1), Some(n2)) = (
            self.sentence.token(self.n1_head),
            self.sentence.token(self.n2_head),
        ) else {
            return false;
        };
        let want_case = match self.kind {
            ConstructKind::NomCopula => Case::Nom,
            ConstructKind::InstPresent | ConstructKind::InstPast => Case::Inst,
            ConstructKind::Hearst => return false,
        };
        root.id == self.pred_id
            && root.deprel == "pred"
            && n1.head == self.pred_id
            && n2.head == self.pred_id
            && n1.deprel == "subj"
            && n1.postag == "subst"
            && n2.deprel == "pd"
            && n2.postag == "subst"
            && n2.case() == Some(want_case)
    }
}

fn predicate_kind(root: &Token) -> Option<ConstructKind> {
    let form = root.form.to_lowercase();
    match form.as_str() {
        "to" => Some(ConstructKind::NomCopula),
        "jest" if root.postag == "fin" => Some(ConstructKind::InstPresent),
        "był" | "była" | "było" if root.postag == "praet" => Some(ConstructKind::InstPast),
        _ => None,
    }
}

/// Finds the copular structure rooted at the sentence predicate.
///
/// The root must carry `pred` and one of the predicate forms; among its
/// dependents the lowest-id `subj`/`subst` token becomes N1H and the
/// lowest-id `pd`/`subst` token with the required case becomes N2H. Other
/// dependents (punctuation, adverbs) are ignored.
pub fn match_promising(sentence: &Sentence) -> Option<PatternMatch<'_>> {
    let root = sentence.root();
    if root.deprel != "pred" {
        return None;
    }
    let kind = predicate_kind(root)?;
    let want_case = if kind == ConstructKind::NomCopula {
        Case::Nom
    } else {
        Case::Inst
    };

    let children = || {
        sentence
            .child_ids(root.id)
            .iter()
            .map(|&id| sentence.token(id).expect("child id is valid"))
    };
    let n1 = children().find(|t| t.deprel == "subj" && t.postag == "subst")?;
    let n2 = children()
        .find(|t| t.deprel == "pd" && t.postag == "subst" && t.case() == Some(want_case))?;

    Some(PatternMatch {
        sentence,
        kind,
        pred_id: root.id,
        n1_head: n1.id,
        n2_head: n2.id,
    })
}

/// Checks a lowercase surface form against the regular instrumental noun
/// endings: `-em` (singular masculine and neuter), `-ą` (singular
/// feminine), `-ami`/`-mi` (plural).
pub fn validate_instrumental_suffix(form: &str, number: Number, gender: Gender) -> bool {
    match (number, gender) {
        (Number::Singular, Gender::Masculine | Gender::Neuter) => form.ends_with("em"),
        (Number::Singular, Gender::Feminine) => form.ends_with('ą'),
        (Number::Plural, _) => form.ends_with("ami") || form.ends_with("mi"),
    }
}

/// Soft check of the class head's inflection for instrumental matches.
///
/// Returns a diagnostic line when the head declares number and gender but
/// its form lacks the expected ending. Never affects extraction.
pub fn suffix_diagnostic(m: &PatternMatch<'_>) -> Option<String> {
    if !m.kind.is_instrumental() {
        return None;
    }
    let n2 = m.n2();
    let (number, gender) = (n2.number()?, n2.gender()?);
    let form = n2.form.to_lowercase();
    if validate_instrumental_suffix(&form, number, gender) {
        None
    } else {
        Some(format!(
            "TAGGER {} token={} form={} unexpected-instrumental-suffix",
            m.sentence.source_id(),
            n2.id,
            n2.form
        ))
    }
}
