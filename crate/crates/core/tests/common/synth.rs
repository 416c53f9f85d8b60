//! Synthetic CoNLL corpus with a skewed vocabulary, so that relations repeat
//! and support levels above 1 are populated.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ADJ: [&str; 6] = ["duży", "stary", "nowy", "genetyczny", "magiczny", "polski"];

fn skewed(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let r: f64 = rng.gen();
    ((r * r * r) * n as f64) as usize % n
}

struct Block {
    rows: Vec<String>,
}

impl Block {
    fn new() -> Self {
        Block { rows: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    fn tok(&mut self, form: &str, lemma: &str, pos: &str, feats: &str, head: usize, deprel: &str) -> usize {
        let id = self.rows.len() + 1;
        self.rows.push(format!("{id}\t{form}\t{lemma}\t{pos}\t{pos}\t{feats}\t{head}\t{deprel}"));
        id
    }

    fn write<W: Write>(&self, out: &mut W) -> io::Result<usize> {
        let mut n = 0;
        for r in &self.rows {
            writeln!(out, "{r}")?;
            n += r.len() + 1;
        }
        writeln!(out)?;
        Ok(n + 1)
    }
}

/// One copular sentence: `Instance <pred> Class [adj] .` with the predicate
/// at token 2 or 3.
fn copular(rng: &mut ChaCha8Rng) -> Block {
    let mut b = Block::new();
    let inst = skewed(rng, 3000);
    let class = skewed(rng, 300);
    let two_word = rng.gen_bool(0.3);
    let (pred_form, pred_pos, case) = match rng.gen_range(0..3) {
        0 => ("to", "pred", "nom"),
        1 => ("jest", "fin", "inst"),
        _ => ("był", "praet", "inst"),
    };
    let pred = if two_word { 3 } else { 2 };
    let name = format!("Obiekt{inst}");
    b.tok(&name, &name, "subst", "sg:nom:m3", pred, "subj");
    if two_word {
        b.tok("wielki", "wielki", "adj", "sg:nom:m3:pos", 1, "adjunct");
    }
    b.tok(pred_form, if pred_form == "to" { "to" } else { "być" }, pred_pos, "_", 0, "pred");
    let noun = format!("klasa{class}");
    let form = if case == "inst" { format!("{noun}em") } else { noun.clone() };
    let n2 = b.tok(&form, &noun, "subst", &format!("sg:{case}:m3"), pred, "pd");
    if rng.gen_bool(0.5) {
        let adj = ADJ[skewed(rng, ADJ.len())];
        b.tok(adj, adj, "adj", &format!("sg:{case}:m3:pos"), n2, "adjunct");
    }
    if rng.gen_bool(0.2) {
        let p = b.tok("w", "w", "prep", "loc", n2, "adjunct");
        b.tok("Polsce", "Polska", "subst", "sg:loc:f", p, "comp");
    }
    b.tok(".", ".", "interp", "_", pred, "punct");
    b
}

fn enumeration(rng: &mut ChaCha8Rng) -> Block {
    let mut b = Block::new();
    let class = skewed(rng, 300);
    let noun = format!("klasa{class}");
    b.tok("Lubię", "lubić", "fin", "sg:pri:imperf", 0, "pred");
    let c = b.tok(&noun, &noun, "subst", "pl:acc:m3", 1, "obj");
    let taki = b.tok("takie", "taki", "adj", "pl:acc:m3:pos", c, "adjunct");
    let jak = b.tok("jak", "jak", "conj", "_", taki, "adjunct");
    let items = rng.gen_range(1..=4);
    let mut prev = jak;
    for i in 0..items {
        if i > 0 {
            if i == items - 1 {
                b.tok("i", "i", "conj", "_", prev, "coord");
            } else {
                b.tok(",", ",", "interp", "_", prev, "punct");
            }
        }
        let name = format!("Obiekt{}", skewed(rng, 3000));
        prev = b.tok(&name, &name, "subst", "sg:nom:m3", prev, "conjunct");
    }
    b.tok(".", ".", "interp", "_", 1, "punct");
    b
}

fn filler(rng: &mut ChaCha8Rng) -> Block {
    let mut b = Block::new();
    b.tok("Kot", "kot", "subst", "sg:nom:m2", 2, "subj");
    b.tok("śpi", "spać", "fin", "sg:ter:imperf", 0, "pred");
    if rng.gen_bool(0.5) {
        let p = b.tok("w", "w", "prep", "loc", 2, "adjunct");
        b.tok("domu", "dom", "subst", "sg:loc:m3", p, "comp");
    }
    b.tok(".", ".", "interp", "_", 2, "punct");
    b
}

fn malformed() -> Block {
    let mut b = Block::new();
    b.tok("Zły", "zły", "adj", "_", 9, "adjunct");
    b.tok("blok", "blok", "subst", "_", 0, "pred");
    b
}

/// Writes `sentences` blocks and returns the number of bytes written.
pub fn write_corpus<W: Write>(out: &mut W, sentences: usize, seed: u64) -> io::Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bytes = 0;
    for _ in 0..sentences {
        let roll: f64 = rng.gen();
        let block = if roll < 0.55 {
            copular(&mut rng)
        } else if roll < 0.75 {
            enumeration(&mut rng)
        } else if roll < 0.99 {
            filler(&mut rng)
        } else {
            malformed()
        };
        bytes += block.write(out)?;
    }
    Ok(bytes)
}

pub fn corpus_string(sentences: usize, seed: u64) -> String {
    let mut buf = Vec::new();
    write_corpus(&mut buf, sentences, seed).unwrap();
    String::from_utf8(buf).unwrap()
}
