//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod synth;

use proptest::prelude::*;
use taxon::conll::{Sentence, Token};
use taxon::copular::ConstructKind;
use taxon::phrase::PhraseToken;
use taxon::store::{canonical_text, ClassToken};

pub const POS: [&str; 8] = ["subst", "adj", "ger", "interp", "fin", "prep", "num", "conj"];
pub const DEPRELS: [&str; 9] = [
    "subj", "pd", "adjunct", "app", "obj", "conjunct", "comp", "punct", "pred",
];
pub const LEMMAS: [&str; 8] = ["pies", "kot", "dom", "duży", "nowy", "być", ",", "w"];
pub const FEATS: [&[&str]; 6] = [
    &[],
    &["sg", "nom", "m2"],
    &["sg", "inst", "m2"],
    &["pl", "inst", "f"],
    &["sg", "gen", "n"],
    &["pl", "nom", "m1"],
];
pub const PREDICATES: [(&str, &str); 6] = [
    ("jest", "fin"),
    ("to", "pred"),
    ("był", "praet"),
    ("była", "praet"),
    ("jest", "praet"),
    ("ma", "fin"),
];

fn make_sentence(
    order: Vec<usize>,
    parents: Vec<u32>,
    pos: Vec<usize>,
    deprel: Vec<usize>,
    lemma: Vec<usize>,
    feats: Vec<usize>,
) -> Vec<Token> {
    let n = order.len();
    let mut heads = vec![0usize; n + 1];
    for k in 1..n {
        heads[order[k]] = order[parents[k] as usize % k];
    }
    (1..=n)
        .map(|id| Token {
            id,
            form: LEMMAS[lemma[id - 1]].to_string(),
            lemma: LEMMAS[lemma[id - 1]].to_string(),
            cpostag: POS[pos[id - 1]].to_string(),
            postag: POS[pos[id - 1]].to_string(),
            feats: FEATS[feats[id - 1]].iter().map(|s| s.to_string()).collect(),
            head: heads[id],
            deprel: DEPRELS[deprel[id - 1]].to_string(),
        })
        .collect()
}

fn raw_tree(max_len: usize) -> impl Strategy<Value = Vec<Token>> {
    (1..=max_len)
        .prop_flat_map(|n| {
            (
                Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(any::<u32>(), n),
                prop::collection::vec(0..POS.len(), n),
                prop::collection::vec(0..DEPRELS.len(), n),
                prop::collection::vec(0..LEMMAS.len(), n),
                prop::collection::vec(0..FEATS.len(), n),
            )
        })
        .prop_map(|(o, p, pos, d, l, f)| make_sentence(o, p, pos, d, l, f))
}

/// Random valid dependency tree of 1..=max_len tokens.
pub fn arb_sentence(max_len: usize) -> impl Strategy<Value = Sentence> {
    raw_tree(max_len).prop_map(|t| Sentence::new("gen#1", t).expect("generator builds trees"))
}

/// Random tree whose root is a (possibly wrong) copular predicate, so that
/// matches are frequent.
pub fn arb_copular_sentence(max_len: usize) -> impl Strategy<Value = Sentence> {
    (raw_tree(max_len), 0..PREDICATES.len(), any::<bool>()).prop_map(|(mut toks, p, pred)| {
        let root = toks.iter().position(|t| t.head == 0).unwrap();
        let (form, pos) = PREDICATES[p];
        toks[root].form = form.to_string();
        toks[root].postag = pos.to_string();
        toks[root].deprel = if pred { "pred" } else { "root" }.to_string();
        Sentence::new("gen#1", toks).unwrap()
    })
}

/// Subtree serialization performed literally: list the subtree, sort,
/// locate the head, cut at the first punctuation, sort back.
pub fn offspring_oracle(sentence: &Sentence, head: usize, left: bool) -> Vec<usize> {
    // 1. all nodes of the subtree
    let mut list: Vec<usize> = (1..=sentence.len())
        .filter(|&id| {
            let mut cur = id;
            loop {
                if cur == head {
                    return true;
                }
                if cur == 0 {
                    return false;
                }
                cur = sentence.token(cur).unwrap().head;
            }
        })
        .collect();
    // 2. sort by id, descending for the left side
    list.sort();
    if left {
        list.reverse();
    }
    // 3. head position
    let ih = list.iter().position(|&id| id == head).unwrap();
    // 4. from the head to the first punctuation or the end
    let mut sub = Vec::new();
    for &id in &list[ih + 1..] {
        if sentence.token(id).unwrap().postag == "interp" {
            break;
        }
        sub.push(id);
    }
    // 5. back to ascending order
    sub.sort();
    sub
}

pub fn arb_phrase_tokens(max_len: usize) -> impl Strategy<Value = Vec<PhraseToken>> {
    prop::collection::vec((0..POS.len(), 0..DEPRELS.len(), 0..LEMMAS.len()), 0..=max_len).prop_map(
        |v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (p, d, l))| PhraseToken {
                    lemma: LEMMAS[l].to_string(),
                    postag: POS[p].to_string(),
                    deprel: DEPRELS[d].to_string(),
                    conll_id: i + 1,
                })
                .collect()
        },
    )
}

/// A synthetic extraction: instance text, class tokens, construct kind.
#[derive(Clone, Debug)]
pub struct Obs {
    pub instance: String,
    pub class: Vec<ClassToken>,
    pub kind: ConstructKind,
}

const CLASS_VOCAB: [(&str, &str); 5] = [
    ("wielki", "adj"),
    ("stary", "adj"),
    ("choroba", "subst"),
    ("miasto", "subst"),
    ("genetyczny", "adj"),
];

pub fn arb_obs() -> impl Strategy<Value = Obs> {
    (
        0..3usize,
        prop::collection::vec(0..CLASS_VOCAB.len(), 1..=4),
        0..4usize,
    )
        .prop_map(|(i, class, k)| Obs {
            instance: ["Kraków", "mukowiscydoza", "pies"][i].to_string(),
            class: class
                .into_iter()
                .map(|c| ClassToken::new(CLASS_VOCAB[c].0, CLASS_VOCAB[c].1))
                .collect(),
            kind: ConstructKind::ALL[k],
        })
}

pub fn class_text(tokens: &[ClassToken]) -> String {
    let words: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
    canonical_text(&words.join(" "))
}

/// True when `longer` refines `shorter`: `shorter` is a proper token prefix
/// of `longer`, or equals `longer` after dropping one or more leading
/// adjectives.
pub fn refines(longer: &[ClassToken], shorter: &str) -> bool {
    let n = longer.len();
    let prefix = (1..n).any(|len| class_text(&longer[..len]) == shorter);
    let stripped = (1..n)
        .take_while(|&k| longer[..k].iter().all(|t| t.postag == "adj"))
        .any(|k| class_text(&longer[k..]) == shorter);
    prefix || stripped
}

/// Pairwise scan: copular boosts received by `(instance, class)`.
pub fn brute_psc(obs: &[Obs], instance: &str, class: &str) -> u64 {
    obs.iter()
        .filter(|o| o.kind.is_copular())
        .filter(|o| canonical_text(&o.instance) == instance)
        .filter(|o| refines(&o.class, class))
        .count() as u64
}
