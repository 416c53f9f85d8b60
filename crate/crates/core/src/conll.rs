//! Reading and writing dependency-parsed sentences in CoNLL-X layout.
//!
//! Each non-blank line holds one token with the columns
//! `ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL`; extra trailing columns
//! (PHEAD, PDEPREL) are ignored. Sentences are separated by blank lines.
//! Input columns may be separated by any run of whitespace; output always
//! uses a single TAB.
//!
//! FEATS hold NKJP-style positional tags split on `:` (`sg:inst:m2`), with
//! `_` standing for an empty feature list.

use std::fmt;
use std::io::{self, BufRead, Write};

/// 1-based token position; 0 is reserved for the artificial root.
pub type TokenId = usize;

/// Grammatical case as it appears in NKJP feature tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Nom,
    Gen,
    Dat,
    Acc,
    Inst,
    Loc,
    Voc,
}

impl Case {
    pub fn from_tag(tag: &str) -> Option<Case> {
        Some(match tag {
            "nom" => Case::Nom,
            "gen" => Case::Gen,
            "dat" => Case::Dat,
            "acc" => Case::Acc,
            "inst" => Case::Inst,
            "loc" => Case::Loc,
            "voc" => Case::Voc,
            _ => return None,
        })
    }

    pub fn tag(self) -> &'static str {
        match self {
            Case::Nom => "nom",
            Case::Gen => "gen",
            Case::Dat => "dat",
            Case::Acc => "acc",
            Case::Inst => "inst",
            Case::Loc => "loc",
            Case::Voc => "voc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Number {
    Singular,
    Plural,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gender {
    Masculine,
    Neuter,
    Feminine,
}

/// One CoNLL row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub form: String,
    pub lemma: String,
    pub cpostag: String,
    pub postag: String,
    pub feats: Vec<String>,
    pub head: TokenId,
    pub deprel: String,
}

impl Token {
    /// First feature belonging to the closed set of case tags. Feature
    /// order differs between parts of speech, so position is not trusted.
    pub fn case(&self) -> Option<Case> {
        self.feats.iter().find_map(|f| Case::from_tag(f))
    }

    pub fn number(&self) -> Option<Number> {
        self.feats.iter().find_map(|f| match f.as_str() {
            "sg" => Some(Number::Singular),
            "pl" => Some(Number::Plural),
            _ => None,
        })
    }

    /// NKJP genders: m1/m2/m3 are masculine, n (n1/n2 in older tagsets) is
    /// neuter, f is feminine.
    pub fn gender(&self) -> Option<Gender> {
        self.feats.iter().find_map(|f| match f.as_str() {
            "m1" | "m2" | "m3" => Some(Gender::Masculine),
            "n" | "n1" | "n2" => Some(Gender::Neuter),
            "f" => Some(Gender::Feminine),
            _ => None,
        })
    }

    pub fn is_punctuation(&self) -> bool {
        self.postag == "interp"
    }
}

/// Case tag of a token, if its features carry one.
pub fn grammatical_case_of(token: &Token) -> Option<Case> {
    token.case()
}

/// Why a sentence block was dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    Empty,
    TooFewColumns { line: usize, found: usize },
    BadInteger { line: usize, column: &'static str, value: String },
    MultiwordRange { line: usize },
    EmptyFeature { line: usize },
    NonContiguousIds { expected: TokenId, found: TokenId },
    HeadOutOfRange { token: TokenId, head: TokenId },
    SelfLoop { token: TokenId },
    NoRoot,
    MultipleRoots { count: usize },
    Cycle { token: TokenId },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Empty => write!(f, "empty-sentence"),
            RejectReason::TooFewColumns { line, found } => {
                write!(f, "too-few-columns line={line} found={found}")
            }
            RejectReason::BadInteger {
                line,
                column,
                value,
            } => write!(f, "bad-integer line={line} column={column} value={value}"),
            RejectReason::MultiwordRange { line } => write!(f, "multiword-range line={line}"),
            RejectReason::EmptyFeature { line } => write!(f, "empty-feature line={line}"),
            RejectReason::NonContiguousIds { expected, found } => {
                write!(f, "non-contiguous-ids expected={expected} found={found}")
            }
            RejectReason::HeadOutOfRange { token, head } => {
                write!(f, "head-out-of-range token={token} head={head}")
            }
            RejectReason::SelfLoop { token } => write!(f, "self-loop token={token}"),
            RejectReason::NoRoot => write!(f, "no-root"),
            RejectReason::MultipleRoots { count } => write!(f, "multiple-roots count={count}"),
            RejectReason::Cycle { token } => write!(f, "cycle token={token}"),
        }
    }
}

/// A rejected sentence together with its source identifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub source_id: String,
    pub reason: RejectReason,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "REJECT {} {}", self.source_id, self.reason)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("token id {id} is not in a sentence of {len} tokens")]
pub struct InvalidTokenId {
    pub id: TokenId,
    pub len: usize,
}

/// A validated dependency tree.
///
/// Token ids are exactly `1..=n`, every head is 0 or a valid id, exactly one
/// token hangs from the artificial root and the head graph is acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    source_id: String,
    tokens: Vec<Token>,
    // children[h] lists dependents of h (0 = artificial root), ascending.
    children: Vec<Vec<TokenId>>,
    root: TokenId,
}

impl Sentence {
    pub fn new(source_id: impl Into<String>, tokens: Vec<Token>) -> Result<Sentence, RejectReason> {
        let n = tokens.len();
        if n == 0 {
            return Err(RejectReason::Empty);
        }
        let mut children = vec![Vec::new(); n + 1];
        for (i, tok) in tokens.iter().enumerate() {
            if tok.id != i + 1 {
                return Err(RejectReason::NonContiguousIds {
                    expected: i + 1,
                    found: tok.id,
                });
            }
            if tok.head > n {
                return Err(RejectReason::HeadOutOfRange {
                    token: tok.id,
                    head: tok.head,
                });
            }
            if tok.head == tok.id {
                return Err(RejectReason::SelfLoop { token: tok.id });
            }
            children[tok.head].push(tok.id);
        }
        let root = match children[0].len() {
            0 => return Err(RejectReason::NoRoot),
            1 => children[0][0],
            count => return Err(RejectReason::MultipleRoots { count }),
        };

        // 0 = unvisited, 1 = on current path, 2 = known to reach the root
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        let mut path = Vec::new();
        for start in 1..=n {
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                path.push(cur);
                cur = tokens[cur - 1].head;
            }
            if state[cur] == 1 {
                return Err(RejectReason::Cycle { token: cur });
            }
            for id in path.drain(..) {
                state[id] = 2;
            }
        }

        Ok(Sentence {
            source_id: source_id.into(),
            tokens,
            children,
            root,
        })
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn root(&self) -> &Token {
        &self.tokens[self.root - 1]
    }

    /// Token by 1-based id.
    pub fn token(&self, id: TokenId) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn contains(&self, id: TokenId) -> bool {
        id >= 1 && id <= self.tokens.len()
    }

    pub(crate) fn child_ids(&self, id: TokenId) -> &[TokenId] {
        &self.children[id]
    }

    /// Dependents of `id` in ascending id order.
    pub fn children_of(&self, id: TokenId) -> Result<Vec<&Token>, InvalidTokenId> {
        if !self.contains(id) {
            return Err(InvalidTokenId {
                id,
                len: self.len(),
            });
        }
        Ok(self.children[id]
            .iter()
            .map(|&c| &self.tokens[c - 1])
            .collect())
    }

    /// Marks every token of the subtree rooted at `id` (including `id`).
    /// Index 0 is unused.
    pub(crate) fn subtree_mask(&self, id: TokenId) -> Vec<bool> {
        let mut mask = vec![false; self.len() + 1];
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            mask[cur] = true;
            stack.extend_from_slice(&self.children[cur]);
        }
        mask
    }
}

/// Failure while reading a CoNLL stream.
#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    /// The underlying stream failed (including invalid UTF-8). Fatal.
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
    /// One sentence was malformed; reading can continue.
    #[error("{0}")]
    Rejected(Rejection),
}

impl ReadError {
    pub fn is_fatal(&self) -> bool {
        matches!(self, ReadError::Io(_))
    }
}

/// Lazily parses sentences from a buffered reader.
///
/// Source ids are `<source>#<n>` where `n` counts sentence blocks from 1,
/// rejected ones included.
pub struct ConllReader<R> {
    input: R,
    source: String,
    blocks: usize,
    line_no: usize,
    buf: String,
    rejected: usize,
    done: bool,
}

impl<R: BufRead> ConllReader<R> {
    pub fn new(input: R, source: impl Into<String>) -> Self {
        ConllReader {
            input,
            source: source.into(),
            blocks: 0,
            line_no: 0,
            buf: String::new(),
            rejected: 0,
            done: false,
        }
    }

    /// Sentence blocks seen so far, accepted or not.
    pub fn blocks_read(&self) -> usize {
        self.blocks
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    fn read_block(&mut self) -> io::Result<Option<(Vec<Token>, Option<RejectReason>)>> {
        let mut tokens = Vec::new();
        let mut error = None;
        let mut seen_any = false;
        loop {
            self.buf.clear();
            if self.input.read_line(&mut self.buf)? == 0 {
                break;
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                if seen_any {
                    break;
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            seen_any = true;
            if error.is_some() {
                continue;
            }
            match parse_token_line(line, self.line_no) {
                Ok(tok) => tokens.push(tok),
                Err(reason) => error = Some(reason),
            }
        }
        Ok(seen_any.then_some((tokens, error)))
    }
}

impl<R: BufRead> Iterator for ConllReader<R> {
    type Item = Result<Sentence, ReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let (tokens, error) = match self.read_block() {
            Ok(Some(block)) => block,
            Ok(None) => {
                self.done = true;
                return None;
            }
            Err(e) => {
                self.done = true;
                return Some(Err(ReadError::Io(e)));
            }
        };
        self.blocks += 1;
        let source_id = format!("{}#{}", self.source, self.blocks);
        let result = match error {
            Some(reason) => Err(reason),
            None => Sentence::new(source_id.clone(), tokens),
        };
        Some(result.map_err(|reason| {
            self.rejected += 1;
            ReadError::Rejected(Rejection { source_id, reason })
        }))
    }
}

/// Parses a whole stream into a lazy sequence of sentences.
pub fn parse_conll_stream<R: BufRead>(input: R, source: impl Into<String>) -> ConllReader<R> {
    ConllReader::new(input, source)
}

/// Parses an in-memory string, splitting accepted and rejected sentences.
pub fn parse_conll_str(source: &str, text: &str) -> (Vec<Sentence>, Vec<Rejection>) {
    let mut sentences = Vec::new();
    let mut rejections = Vec::new();
    for item in ConllReader::new(text.as_bytes(), source) {
        match item {
            Ok(s) => sentences.push(s),
            Err(ReadError::Rejected(r)) => rejections.push(r),
            Err(ReadError::Io(e)) => unreachable!("in-memory read failed: {e}"),
        }
    }
    (sentences, rejections)
}

fn parse_token_line(line: &str, line_no: usize) -> Result<Token, RejectReason> {
    let cols: Vec<&str> = line.split_whitespace().collect();
    if cols.len() < 8 {
        return Err(RejectReason::TooFewColumns {
            line: line_no,
            found: cols.len(),
        });
    }
    if cols[0].contains('-') {
        return Err(RejectReason::MultiwordRange { line: line_no });
    }
    let int = |column: &'static str, value: &str| {
        value.parse::<usize>().map_err(|_| RejectReason::BadInteger {
            line: line_no,
            column,
            value: value.to_string(),
        })
    };
    let id = int("ID", cols[0])?;
    if id == 0 {
        return Err(RejectReason::BadInteger {
            line: line_no,
            column: "ID",
            value: cols[0].to_string(),
        });
    }
    let head = int("HEAD", cols[6])?;
    let feats = if cols[5] == "_" {
        Vec::new()
    } else {
        let feats: Vec<String> = cols[5].split(':').map(str::to_string).collect();
        if feats.iter().any(String::is_empty) {
            return Err(RejectReason::EmptyFeature { line: line_no });
        }
        feats
    };
    Ok(Token {
        id,
        form: cols[1].to_string(),
        lemma: cols[2].to_string(),
        cpostag: cols[3].to_string(),
        postag: cols[4].to_string(),
        feats,
        head,
        deprel: cols[7].to_string(),
    })
}

/// Writes one sentence as TAB-separated rows followed by a blank line.
pub fn write_sentence<W: Write>(out: &mut W, sentence: &Sentence) -> io::Result<()> {
    for t in sentence.tokens() {
        let feats = if t.feats.is_empty() {
            "_".to_string()
        } else {
            t.feats.join(":")
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.id, t.form, t.lemma, t.cpostag, t.postag, feats, t.head, t.deprel
        )?;
    }
    writeln!(out)
}
