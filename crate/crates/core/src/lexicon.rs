//! Word-list ingestion.
//!
//! A corpus file is UTF-8 text with one record per line and three TAB-separated
//! columns: `language_tag`, `meaning_id`, `word`. Lines starting with `#` are
//! comments and empty lines are skipped. CRLF is accepted on input; output always
//! uses LF.
//!
//! Words are normalized by [`normalize_word`] before they are stored, so every
//! [`Word`] in a [`Corpus`] is already lowercased and validated.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Size of the original Swadesh catalog.
pub const DEFAULT_M_CATALOG: u32 = 200;

/// Index of a meaning in the shared catalog, in `1..=m_catalog`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeaningId(u32);

impl MeaningId {
    pub fn new(id: u32, m_catalog: u32) -> Result<Self> {
        if id == 0 || id > m_catalog {
            return Err(Error::Range(format!(
                "meaning id {id} outside 1..={m_catalog}"
            )));
        }
        Ok(MeaningId(id))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for MeaningId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A normalized word. The unit of comparison is the Unicode scalar value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    surface: String,
    chars: Vec<char>,
}

impl Word {
    fn from_normalized(surface: String) -> Self {
        let chars = surface.chars().collect();
        Word { surface, chars }
    }

    /// Normalizes `raw` with the default policy.
    pub fn parse(raw: &str) -> Result<Self> {
        normalize_word(raw, &NormalizationPolicy::default())
    }

    pub fn as_str(&self) -> &str {
        &self.surface
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Length in Unicode scalar values.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

/// Which characters survive normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    /// Unicode alphabetic characters only.
    Letters,
    /// Anything that is not whitespace, a control character, or `#`.
    Printable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationPolicy {
    pub name: String,
    pub lowercase: bool,
    pub class: CharClass,
    /// Characters allowed in addition to `class`.
    pub extra: Vec<char>,
}

impl Default for NormalizationPolicy {
    /// Letters plus apostrophe and hyphen, lowercased.
    fn default() -> Self {
        NormalizationPolicy {
            name: "default".into(),
            lowercase: true,
            class: CharClass::Letters,
            extra: vec!['\'', '-'],
        }
    }
}

impl NormalizationPolicy {
    /// Any printable, non-whitespace character; still lowercased.
    pub fn permissive() -> Self {
        NormalizationPolicy {
            name: "permissive".into(),
            lowercase: true,
            class: CharClass::Printable,
            extra: Vec::new(),
        }
    }

    /// Letters only, no case folding.
    pub fn strict() -> Self {
        NormalizationPolicy {
            name: "strict".into(),
            lowercase: false,
            class: CharClass::Letters,
            extra: Vec::new(),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "permissive" => Ok(Self::permissive()),
            "strict" => Ok(Self::strict()),
            other => Err(Error::Config(format!(
                "unknown normalization policy `{other}` (expected default, permissive or strict)"
            ))),
        }
    }

    fn allows(&self, ch: char) -> bool {
        if ch.is_whitespace() || ch.is_control() {
            return false;
        }
        if self.extra.contains(&ch) {
            return true;
        }
        match self.class {
            CharClass::Letters => ch.is_alphabetic(),
            CharClass::Printable => ch != '#',
        }
    }
}

/// Trims, lowercases, and validates a raw word.
pub fn normalize_word(raw: &str, policy: &NormalizationPolicy) -> Result<Word> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptyWord);
    }
    let surface: String = if policy.lowercase {
        trimmed.chars().flat_map(char::to_lowercase).collect()
    } else {
        trimmed.to_owned()
    };
    if let Some(ch) = surface.chars().find(|&c| !policy.allows(c)) {
        return Err(Error::DisallowedChar {
            ch,
            word: trimmed.to_owned(),
        });
    }
    Ok(Word::from_normalized(surface))
}

/// One language's word list keyed by meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    tag: String,
    entries: BTreeMap<MeaningId, Word>,
}

impl Lexicon {
    pub fn new(tag: impl Into<String>) -> Self {
        Lexicon {
            tag: tag.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Builds a lexicon from `(meaning, word)` pairs, rejecting repeated meanings.
    pub fn from_entries<I>(tag: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MeaningId, Word)>,
    {
        let mut lex = Lexicon::new(tag);
        for (id, word) in entries {
            lex.insert(id, word)?;
        }
        Ok(lex)
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn insert(&mut self, id: MeaningId, word: Word) -> Result<()> {
        match self.entries.entry(id) {
            Entry::Occupied(_) => Err(Error::Duplicate {
                line: 0,
                language: self.tag.clone(),
                meaning: id.get(),
            }),
            Entry::Vacant(slot) => {
                slot.insert(word);
                Ok(())
            }
        }
    }

    /// Replaces (or adds) the word for `id`.
    pub fn set(&mut self, id: MeaningId, word: Word) {
        self.entries.insert(id, word);
    }

    pub fn get(&self, id: MeaningId) -> Option<&Word> {
        self.entries.get(&id)
    }

    /// Entries in ascending meaning order.
    pub fn entries(&self) -> impl Iterator<Item = (MeaningId, &Word)> + '_ {
        self.entries.iter().map(|(&id, w)| (id, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn with_tag(&self, tag: impl Into<String>) -> Self {
        Lexicon {
            tag: tag.into(),
            entries: self.entries.clone(),
        }
    }
}

/// Ordered collection of lexicons over a shared meaning catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    lexicons: Vec<Lexicon>,
    m_catalog: u32,
}

impl Corpus {
    /// Validates tag uniqueness and that every meaning id fits the catalog.
    pub fn new(lexicons: Vec<Lexicon>, m_catalog: u32) -> Result<Self> {
        if m_catalog == 0 {
            return Err(Error::Range("m_catalog must be at least 1".into()));
        }
        for (i, lex) in lexicons.iter().enumerate() {
            if lexicons[..i].iter().any(|other| other.tag == lex.tag) {
                return Err(Error::InvalidInput(format!(
                    "language tag `{}` appears twice",
                    lex.tag
                )));
            }
            if let Some((id, _)) = lex.entries.last_key_value() {
                if id.get() > m_catalog {
                    return Err(Error::Range(format!(
                        "language `{}` uses meaning {} beyond catalog size {}",
                        lex.tag, id, m_catalog
                    )));
                }
            }
        }
        Ok(Corpus {
            lexicons,
            m_catalog,
        })
    }

    pub fn lexicons(&self) -> &[Lexicon] {
        &self.lexicons
    }

    pub fn m_catalog(&self) -> u32 {
        self.m_catalog
    }

    pub fn len(&self) -> usize {
        self.lexicons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicons.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.lexicons.iter().map(|l| l.tag.clone()).collect()
    }

    pub fn get(&self, tag: &str) -> Option<&Lexicon> {
        self.lexicons.iter().find(|l| l.tag == tag)
    }

    /// Serializes to the word-list format, lexicons in corpus order and
    /// entries in ascending meaning order.
    pub fn to_word_list(&self) -> String {
        let mut out = String::new();
        for lex in &self.lexicons {
            for (id, word) in lex.entries() {
                out.push_str(&lex.tag);
                out.push('\t');
                out.push_str(&id.to_string());
                out.push('\t');
                out.push_str(word.as_str());
                out.push('\n');
            }
        }
        out
    }
}

/// Parses a word-list stream with the default normalization policy.
pub fn parse_corpus(input: &str, m_catalog: u32) -> Result<Corpus> {
    parse_corpus_with(input, m_catalog, &NormalizationPolicy::default())
}

pub fn parse_corpus_with(
    input: &str,
    m_catalog: u32,
    policy: &NormalizationPolicy,
) -> Result<Corpus> {
    if m_catalog == 0 {
        return Err(Error::Range("m_catalog must be at least 1".into()));
    }
    let mut lexicons: Vec<Lexicon> = Vec::new();
    for (idx, raw_line) in input.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 tab-separated columns, found {}", fields.len()),
            });
        }
        let tag = fields[0];
        if tag.is_empty() || tag.chars().any(|c| c.is_whitespace() || c == ',') {
            return Err(Error::Parse {
                line: line_no,
                message: format!("invalid language tag {tag:?}"),
            });
        }
        let id: u64 = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("meaning id {:?} is not a decimal integer", fields[1]),
        })?;
        if id == 0 || id > u64::from(m_catalog) {
            return Err(Error::MeaningOutOfRange {
                line: line_no,
                id,
                m_catalog,
            });
        }
        let meaning = MeaningId(id as u32);
        let word = normalize_word(fields[2], policy).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;

        let lex = match lexicons.iter().position(|l| l.tag == tag) {
            Some(pos) => &mut lexicons[pos],
            None => {
                lexicons.push(Lexicon::new(tag));
                lexicons.last_mut().unwrap()
            }
        };
        lex.insert(meaning, word).map_err(|_| Error::Duplicate {
            line: line_no,
            language: tag.to_owned(),
            meaning: meaning.get(),
        })?;
    }
    Corpus::new(lexicons, m_catalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn parses_two_languages_three_meanings() {
        let text = "# toy\nmer\t1\trano\nmer\t2\tafo\nmer\t3\tvato\nbet\t1\tranu\nbet\t2\tafu\nbet\t3\tvatu\n";
        let corpus = parse_corpus(text, 200).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.labels(), vec!["mer", "bet"]);
        assert!(corpus.lexicons().iter().all(|l| l.len() == 3));
        let mer = corpus.get("mer").unwrap();
        assert_eq!(mer.get(MeaningId(2)).unwrap().as_str(), "afo");
    }

    #[test]
    fn meaning_beyond_catalog_is_a_range_error() {
        let text = "a\t1\tx\na\t201\ty\n";
        match parse_corpus(text, 200) {
            Err(Error::MeaningOutOfRange { line, id, m_catalog }) => {
                assert_eq!((line, id, m_catalog), (2, 201, 200));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_corpus("a\t0\tx\n", 200).is_err());
    }

    #[test]
    fn duplicate_entry_names_language_and_meaning() {
        let text = "a\t1\tx\nb\t1\ty\na\t1\tz\n";
        let err = parse_corpus(text, 200).unwrap_err();
        assert_eq!(
            err,
            Error::Duplicate {
                line: 3,
                language: "a".into(),
                meaning: 1
            }
        );
        assert!(err.to_string().contains("`a`"));
    }

    #[test]
    fn wrong_column_count_reports_line() {
        let err = parse_corpus("a\t1\tx\na\t2\n", 200).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse_corpus("a\t1\tx\textra\n", 200).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn crlf_and_comments_accepted() {
        let corpus = parse_corpus("# c\r\na\t1\tRano\r\nb\t1\trano\r\n", 10).unwrap();
        assert_eq!(corpus.get("a").unwrap().get(MeaningId(1)), Some(&w("rano")));
        assert!(!corpus.to_word_list().contains('\r'));
    }

    #[test]
    fn bad_word_is_a_parse_error_with_line() {
        let err = parse_corpus("a\t1\tx\na\t2\ta b\n", 10).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn normalize_examples() {
        let p = NormalizationPolicy::default();
        assert_eq!(normalize_word("Rano ", &p).unwrap().as_str(), "rano");
        assert_eq!(normalize_word("", &p), Err(Error::EmptyWord));
        assert_eq!(normalize_word("   ", &p), Err(Error::EmptyWord));
        match normalize_word("a b", &p) {
            Err(Error::DisallowedChar { ch, .. }) => assert_eq!(ch, ' '),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(normalize_word("ALA-ALA", &p).unwrap().as_str(), "ala-ala");
        assert_eq!(normalize_word("m'ba", &p).unwrap().as_str(), "m'ba");
        assert!(normalize_word("a1", &p).is_err());
        assert_eq!(normalize_word("Tàny", &p).unwrap().len(), 4);
    }

    #[test]
    fn policies_by_name() {
        assert!(NormalizationPolicy::by_name("nope").is_err());
        let permissive = NormalizationPolicy::by_name("permissive").unwrap();
        assert_eq!(normalize_word("A1", &permissive).unwrap().as_str(), "a1");
        assert!(normalize_word("a#", &permissive).is_err());
        let strict = NormalizationPolicy::by_name("strict").unwrap();
        assert_eq!(normalize_word("Ab", &strict).unwrap().as_str(), "Ab");
        assert!(normalize_word("a-b", &strict).is_err());
    }

    #[test]
    fn corpus_rejects_duplicate_tags() {
        let a = Lexicon::from_entries("a", [(MeaningId(1), w("x"))]).unwrap();
        assert!(Corpus::new(vec![a.clone(), a], 10).is_err());
    }
}
