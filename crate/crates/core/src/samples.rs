//! Labeled example sets: alphabets, words, and the two text formats they are
//! read from.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use thiserror::Error;

/// Index of a letter in an [`Alphabet`].
pub type Letter = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("unknown symbol `{symbol}` on line {line}")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("word `{0}` is labeled both positive and negative")]
    ConflictingLabel(String),
    #[error("input contains no labeled words")]
    EmptyInput,
    #[error("duplicate letter `{0}` in alphabet")]
    DuplicateLetter(String),
    #[error("alphabet must contain at least one letter")]
    EmptyAlphabet,
    #[error("letter index {index} out of range for alphabet of size {size}")]
    LetterOutOfRange { index: usize, size: usize },
}

/// Ordered set of distinct letter names. The order fixes letter indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self, SampleError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet {
            letters: Vec::new(),
            index: HashMap::new(),
        };
        for letter in letters {
            let letter = letter.into();
            if out.index.contains_key(&letter) {
                return Err(SampleError::DuplicateLetter(letter));
            }
            out.push(letter);
        }
        if out.letters.is_empty() {
            return Err(SampleError::EmptyAlphabet);
        }
        Ok(out)
    }

    /// Letters named `0`..`size-1`, as used by the Abbadingo format.
    pub fn numeric(size: usize) -> Result<Self, SampleError> {
        Self::new((0..size).map(|i| i.to_string()))
    }

    /// Letters named `a`, `b`, ... (`l26`, `l27`, ... past `z`).
    pub fn lettered(size: usize) -> Result<Self, SampleError> {
        Self::new((0..size).map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("l{i}")
            }
        }))
    }

    fn push(&mut self, letter: String) -> Letter {
        let id = self.letters.len();
        self.index.insert(letter.clone(), id);
        self.letters.push(letter);
        id
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.letters[letter]
    }

    pub fn lookup(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    /// Renders a word for humans: letters are concatenated when every letter
    /// name is a single character, otherwise joined with `.`; the empty word
    /// is `ε`.
    pub fn display_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.letters.iter().all(|l| l.chars().count() == 1) {
            ""
        } else {
            "."
        };
        word.iter()
            .map(|&l| self.name(l))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// A finite sequence of letter indices; may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(symbols: Vec<Letter>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[Letter] {
        &self.0
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// Every prefix from ε up to the word itself.
    pub fn prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.0.len()).map(move |n| self.prefix(n))
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }
}

impl std::ops::Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Label of a sample word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

/// The two input formats understood by [`parse_samples`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleFormat {
    Abbadingo,
    Lines,
}

impl FromStr for SampleFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abbadingo" => Ok(SampleFormat::Abbadingo),
            "lines" => Ok(SampleFormat::Lines),
            other => Err(format!("unknown sample format `{other}`")),
        }
    }
}

/// The pair `(S⁺, S⁻)` over a fixed alphabet.
///
/// Words are kept in first-appearance order; duplicates within one polarity
/// are dropped, and a word with both polarities is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSamples {
    alphabet: Alphabet,
    entries: IndexMap<Word, Polarity>,
}

impl LabeledSamples {
    pub fn new<P, N>(alphabet: Alphabet, positives: P, negatives: N) -> Result<Self, SampleError>
    where
        P: IntoIterator<Item = Word>,
        N: IntoIterator<Item = Word>,
    {
        let entries = positives
            .into_iter()
            .map(|w| (w, Polarity::Positive))
            .chain(negatives.into_iter().map(|w| (w, Polarity::Negative)));
        Self::from_entries(alphabet, entries)
    }

    /// Builds samples from labeled words in the given order.
    pub fn from_entries<I>(alphabet: Alphabet, entries: I) -> Result<Self, SampleError>
    where
        I: IntoIterator<Item = (Word, Polarity)>,
    {
        let mut out = LabeledSamples {
            alphabet,
            entries: IndexMap::new(),
        };
        for (word, polarity) in entries {
            out.insert(word, polarity)?;
        }
        Ok(out)
    }

    fn insert(&mut self, word: Word, polarity: Polarity) -> Result<(), SampleError> {
        if let Some(&bad) = word.iter().find(|&&l| l >= self.alphabet.len()) {
            return Err(SampleError::LetterOutOfRange {
                index: bad,
                size: self.alphabet.len(),
            });
        }
        match self.entries.get(&word) {
            Some(&existing) if existing != polarity => Err(SampleError::ConflictingLabel(
                self.alphabet.display_word(&word),
            )),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(word, polarity);
                Ok(())
            }
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// All labeled words in sample order.
    pub fn entries(&self) -> impl Iterator<Item = (&Word, Polarity)> {
        self.entries.iter().map(|(w, &p)| (w, p))
    }

    pub fn positives(&self) -> impl Iterator<Item = &Word> {
        self.entries
            .iter()
            .filter(|(_, &p)| p == Polarity::Positive)
            .map(|(w, _)| w)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Word> {
        self.entries
            .iter()
            .filter(|(_, &p)| p == Polarity::Negative)
            .map(|(w, _)| w)
    }

    pub fn label_of(&self, word: &Word) -> Option<Polarity> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_positives(&self) -> usize {
        self.positives().count()
    }

    pub fn num_negatives(&self) -> usize {
        self.negatives().count()
    }

    /// Serializes in the `lines` format, in sample order.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (word, polarity) in self.entries() {
            out.push(match polarity {
                Polarity::Positive => '+',
                Polarity::Negative => '-',
            });
            for &l in word.iter() {
                out.push(' ');
                out.push_str(self.alphabet.name(l));
            }
            out.push('\n');
        }
        out
    }

    /// Serializes in the Abbadingo format. Letter indices are written as-is,
    /// so this is lossless only for alphabets built by [`Alphabet::numeric`].
    pub fn to_abbadingo(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.alphabet.len());
        for (word, polarity) in self.entries() {
            let label = match polarity {
                Polarity::Positive => 1,
                Polarity::Negative => 0,
            };
            out.push_str(&format!("{label} {}", word.len()));
            for &l in word.iter() {
                out.push_str(&format!(" {l}"));
            }
            out.push('\n');
        }
        out
    }
}

/// All prefixes of all sample words, including ε, ordered by length and then
/// lexicographically by letter index.
pub fn prefixes(samples: &LabeledSamples) -> Vec<Word> {
    let set: BTreeSet<(usize, Word)> = samples
        .entries()
        .flat_map(|(w, _)| w.prefixes())
        .map(|p| (p.len(), p))
        .collect();
    if set.is_empty() {
        return vec![Word::empty()];
    }
    set.into_iter().map(|(_, p)| p).collect()
}

pub fn parse_samples(text: &str, format: SampleFormat) -> Result<LabeledSamples, SampleError> {
    match format {
        SampleFormat::Abbadingo => parse_abbadingo(text),
        SampleFormat::Lines => parse_lines(text),
    }
}

fn parse_lines(text: &str) -> Result<LabeledSamples, SampleError> {
    let mut alphabet = Alphabet {
        letters: Vec::new(),
        index: HashMap::new(),
    };
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let polarity = match tokens.next() {
            Some("+") => Polarity::Positive,
            Some("-") => Polarity::Negative,
            Some(other) => {
                return Err(SampleError::MalformedLine {
                    line: line_no,
                    reason: format!("expected label `+` or `-`, found `{other}`"),
                })
            }
            None => unreachable!("non-empty line has a token"),
        };
        let word: Vec<Letter> = tokens
            .map(|t| alphabet.lookup(t).unwrap_or_else(|| alphabet.push(t.to_string())))
            .collect();
        entries.push((Word(word), polarity));
    }
    if entries.is_empty() {
        return Err(SampleError::EmptyInput);
    }
    if alphabet.is_empty() {
        // Only ε was seen; a complete DFA still needs some alphabet.
        alphabet.push("a".to_string());
    }
    LabeledSamples::from_entries(alphabet, entries)
}

fn parse_abbadingo(text: &str) -> Result<LabeledSamples, SampleError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or(SampleError::EmptyInput)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| SampleError::MalformedHeader(header.to_string()))
    };
    let (num_words, alphabet_size) = match fields.as_slice() {
        [w, a] => (parse_count(w)?, parse_count(a)?),
        _ => return Err(SampleError::MalformedHeader(header.to_string())),
    };
    if alphabet_size == 0 {
        return Err(SampleError::MalformedHeader(
            "alphabet size must be at least 1".to_string(),
        ));
    }
    let alphabet = Alphabet::numeric(alphabet_size)?;
    let mut entries = Vec::with_capacity(num_words);
    for (line_no, line) in lines {
        let malformed = |reason: String| SampleError::MalformedLine {
            line: line_no,
            reason,
        };
        let mut tokens = line.split_whitespace();
        let polarity = match tokens.next() {
            Some("1") => Polarity::Positive,
            Some("0") => Polarity::Negative,
            Some(other) => return Err(malformed(format!("expected label 0 or 1, found `{other}`"))),
            None => unreachable!("non-empty line has a token"),
        };
        let len: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| malformed("missing word length".to_string()))?;
        let mut word = Vec::with_capacity(len);
        for token in tokens {
            match token.parse::<usize>() {
                Ok(l) if l < alphabet_size => word.push(l),
                _ => {
                    return Err(SampleError::UnknownSymbol {
                        line: line_no,
                        symbol: token.to_string(),
                    })
                }
            }
        }
        if word.len() != len {
            return Err(malformed(format!(
                "declared length {len} but found {} symbols",
                word.len()
            )));
        }
        entries.push((Word(word), polarity));
    }
    if entries.len() != num_words {
        return Err(SampleError::MalformedHeader(format!(
            "header declares {num_words} words but {} were found",
            entries.len()
        )));
    }
    if entries.is_empty() {
        return Err(SampleError::EmptyInput);
    }
    LabeledSamples::from_entries(alphabet, entries)
}

impl fmt::Display for LabeledSamples {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lines())
    }
}
