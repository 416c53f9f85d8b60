mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use taxon::conll::{parse_conll_str, write_sentence, Sentence, Token};
use taxon::copular::{match_promising, suffix_diagnostic};
use taxon::eval::{estimate_precision, psc_gain, sweep, ScoredSample, Verdict};
use taxon::hearst::{extract_hearst, find_enumeration_trigger, parse_enumeration_list, HearstConfig};
use taxon::phrase::{build_class, build_instance, extract, offspring, FilterDictionaries, Lexicon, Side};
use taxon::store::{PartialStore, RelationKey, SupportPolicy};

use common::{arb_copular_sentence, arb_obs, arb_sentence};

fn serialize(s: &Sentence) -> String {
    let mut buf = Vec::new();
    write_sentence(&mut buf, s).unwrap();
    String::from_utf8(buf).unwrap()
}

/// Independent check of the tree invariants.
fn is_valid_tree(s: &Sentence) -> bool {
    let toks = s.tokens();
    let n = toks.len();
    let ids_ok = toks.iter().enumerate().all(|(i, t)| t.id == i + 1);
    let heads_ok = toks.iter().all(|t| t.head <= n && t.head != t.id);
    let one_root = toks.iter().filter(|t| t.head == 0).count() == 1;
    let acyclic = toks.iter().all(|t| {
        let mut cur = t.id;
        for _ in 0..=n {
            if cur == 0 {
                return true;
            }
            cur = toks[cur - 1].head;
        }
        false
    });
    ids_ok && heads_ok && one_root && acyclic
}

#[derive(Clone, Debug)]
enum Mutation {
    SetHead(usize, usize),
    DropLine(usize),
    SwapLines(usize, usize),
    Garble(usize),
}

fn arb_mutation() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        (any::<usize>(), 0..15usize).prop_map(|(l, h)| Mutation::SetHead(l, h)),
        any::<usize>().prop_map(Mutation::DropLine),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Mutation::SwapLines(a, b)),
        any::<usize>().prop_map(Mutation::Garble),
    ]
}

fn apply(text: &str, muts: &[Mutation]) -> String {
    let mut lines: Vec<String> = text.lines().filter(|l| !l.is_empty()).map(String::from).collect();
    for m in muts {
        if lines.is_empty() {
            break;
        }
        let n = lines.len();
        match *m {
            Mutation::SetHead(l, h) => {
                let mut cols: Vec<String> = lines[l % n].split('\t').map(String::from).collect();
                if cols.len() > 6 {
                    cols[6] = h.to_string();
                    lines[l % n] = cols.join("\t");
                }
            }
            Mutation::DropLine(l) => {
                lines.remove(l % n);
            }
            Mutation::SwapLines(a, b) => lines.swap(a % n, b % n),
            Mutation::Garble(l) => lines[l % n] = lines[l % n].replacen('\t', " x", 1),
        }
    }
    lines.join("\n") + "\n"
}

fn flat_sentence(words: &[(&str, &str)]) -> Sentence {
    let tokens = words
        .iter()
        .enumerate()
        .map(|(i, (lemma, pos))| Token {
            id: i + 1,
            form: lemma.to_string(),
            lemma: lemma.to_string(),
            cpostag: pos.to_string(),
            postag: pos.to_string(),
            feats: vec![],
            head: if i == 0 { 0 } else { 1 },
            deprel: "adjunct".to_string(),
        })
        .collect();
    Sentence::new("flat#1", tokens).unwrap()
}

const HEARST_VOCAB: [(&str, &str); 9] = [
    ("taki", "adj"),
    ("jak", "conj"),
    ("pies", "subst"),
    ("duży", "adj"),
    (",", "interp"),
    ("i", "conj"),
    ("biegać", "fin"),
    ("ten", "adj"),
    (".", "interp"),
];

fn arb_hearst_sentence() -> impl Strategy<Value = Sentence> {
    (
        prop::collection::vec(0..HEARST_VOCAB.len(), 0..6),
        prop::collection::vec(0..HEARST_VOCAB.len(), 0..8),
    )
        .prop_map(|(left, right)| {
            let mut words: Vec<(&str, &str)> = vec![("mieć", "fin")];
            words.extend(left.into_iter().map(|i| HEARST_VOCAB[i]));
            words.push(("taki", "adj"));
            words.push(("jak", "conj"));
            words.extend(right.into_iter().map(|i| HEARST_VOCAB[i]));
            flat_sentence(&words)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn conll_round_trip(s in arb_sentence(20)) {
        let text = serialize(&s);
        let (again, rejected) = parse_conll_str("gen", &text);
        prop_assert!(rejected.is_empty());
        prop_assert_eq!(&again[0], &s);
    }

    #[test]
    fn children_cover_every_token_once(s in arb_sentence(20)) {
        let mut seen = vec![s.root().id];
        for id in 1..=s.len() {
            seen.extend(s.children_of(id).unwrap().iter().map(|t| t.id));
        }
        seen.sort();
        prop_assert_eq!(seen, (1..=s.len()).collect::<Vec<_>>());
    }

    #[test]
    fn mutated_blocks_never_yield_invalid_trees(
        s in arb_sentence(12),
        muts in prop::collection::vec(arb_mutation(), 1..4),
    ) {
        let text = apply(&serialize(&s), &muts);
        let (sentences, rejections) = parse_conll_str("mut", &text);
        prop_assert!(sentences.len() + rejections.len() <= 1);
        for s in &sentences {
            prop_assert!(is_valid_tree(s));
        }
    }

    #[test]
    fn matches_are_self_consistent_and_pure(s in arb_copular_sentence(12)) {
        let a = match_promising(&s);
        let b = match_promising(&s);
        prop_assert_eq!(&a, &b);
        if let Some(m) = a {
            prop_assert!(m.is_consistent());
            // diagnostics never undo a match
            let _ = suffix_diagnostic(&m);
            prop_assert!(match_promising(&s).is_some());
        }
    }

    #[test]
    fn phrases_respect_their_construction(s in arb_copular_sentence(14)) {
        if let Some(m) = match_promising(&s) {
            let inst = build_instance(&s, &m);
            let class = build_class(&s, &m);
            for p in [&inst, &class] {
                let joined: Vec<&str> = p.tokens().iter().map(|t| t.lemma.as_str()).collect();
                prop_assert_eq!(p.text(), joined.join(" "));
                prop_assert!(p.tokens().windows(2).all(|w| w[0].conll_id < w[1].conll_id));
            }
            prop_assert_eq!(class.head().conll_id, m.n2_head);
            prop_assert!(class.tokens().iter().all(|t| t.conll_id >= m.n2_head));
            prop_assert!(inst.tokens().iter().any(|t| t.conll_id == m.n1_head));
        }
        let dicts = FilterDictionaries::new(Lexicon::parse("dom"), Lexicon::parse("nowy"));
        prop_assert_eq!(extract(&s, &dicts), extract(&s, &dicts));
    }

    #[test]
    fn offspring_stops_before_punctuation(s in arb_sentence(20), pick in any::<usize>()) {
        let head = pick % s.len() + 1;
        for side in [Side::Left, Side::Right] {
            let got = offspring(&s, head, side).unwrap();
            prop_assert!(got.iter().all(|t| t.postag != "interp"));
            // no kept token lies beyond a subtree punctuation mark on its side
            let first_interp = got.iter().map(|t| t.conll_id).collect::<Vec<_>>();
            let oracle = common::offspring_oracle(&s, head, side == Side::Left);
            prop_assert_eq!(first_interp, oracle);
        }
    }

    #[test]
    fn hearst_output_shape(s in arb_hearst_sentence()) {
        let dicts = FilterDictionaries::new(Lexicon::default(), Lexicon::parse("ten"));
        let cfg = HearstConfig::default();
        let xs = extract_hearst(&s, &dicts, &cfg);
        prop_assert_eq!(&xs, &extract_hearst(&s, &dicts, &cfg));
        if let Some(first) = xs.first() {
            prop_assert!(xs.iter().all(|x| x.class == first.class && x.kind == taxon::ConstructKind::Hearst));
            let t = find_enumeration_trigger(&s).unwrap();
            let list = parse_enumeration_list(&s, t, &cfg).unwrap();
            prop_assert_eq!(xs.len(), list.len());
        }
    }

    #[test]
    fn precision_is_a_permutation_invariant_fraction(
        verdicts in prop::collection::vec(0..3u8, 1..60),
        seed in any::<u64>(),
    ) {
        let entries: Vec<(RelationKey, Verdict)> = verdicts
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let v = [Verdict::Correct, Verdict::Erroneous, Verdict::Unscored][*v as usize];
                (RelationKey::new(&format!("i{i}"), "c").unwrap(), v)
            })
            .collect();
        let mut shuffled = entries.clone();
        let n = shuffled.len();
        for i in 0..n {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % n);
        }
        let a = estimate_precision(&ScoredSample::new(entries).unwrap());
        let b = estimate_precision(&ScoredSample::new(shuffled).unwrap());
        prop_assert_eq!(a.clone(), b);
        if let Ok(p) = a {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn gain_matches_set_difference_and_sweep_is_monotone(obs in prop::collection::vec(arb_obs(), 0..60)) {
        let mut p = PartialStore::new();
        for o in &obs {
            p.add(&o.instance, &o.class, o.kind);
        }
        let store = p.finalize();
        let levels = [1, 2, 3, 4, 5];
        let report = sweep(&store, &levels, None);
        for w in report.rows.windows(2) {
            prop_assert!(w[1].baseline.total <= w[0].baseline.total);
        }
        for t in levels {
            let off = SupportPolicy::new(t, false).unwrap();
            let on = SupportPolicy::new(t, true).unwrap();
            let off_set: HashSet<_> = store.accepted(&off).map(|r| &r.key).collect();
            let on_set: HashSet<_> = store.accepted(&on).map(|r| &r.key).collect();
            prop_assert_eq!(psc_gain(&store, t).additional as usize, on_set.difference(&off_set).count());
        }
    }
}
