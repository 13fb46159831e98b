//! Loader for WordNet-style lexical databases in the WNDB distribution
//! format (`index.noun`/`data.noun` and friends), plus the synset queries
//! the augmenters need: lemma lookup, synonym listing, and gloss+example
//! signatures.
//!
//! Only the fields used here are parsed; pointer and frame sections are
//! skipped. Index entries keep their file order, so the position of a synset
//! in a lookup result is its sense rank (1 = most frequent sense).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::text::{is_stopword, tokenize};

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("missing WordNet file {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("index entry {lemma:?} ({pos}) points at unknown synset offset {offset}")]
    DanglingOffset {
        lemma: String,
        pos: WnPos,
        offset: u64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The four WordNet parts of speech. Adjective satellites (`s`) collapse
/// into [`WnPos::Adjective`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WnPos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl WnPos {
    pub const ALL: [WnPos; 4] = [WnPos::Noun, WnPos::Verb, WnPos::Adjective, WnPos::Adverb];

    fn file_suffix(self) -> &'static str {
        match self {
            WnPos::Noun => "noun",
            WnPos::Verb => "verb",
            WnPos::Adjective => "adj",
            WnPos::Adverb => "adv",
        }
    }

    fn from_ss_type(c: char) -> Option<WnPos> {
        match c {
            'n' => Some(WnPos::Noun),
            'v' => Some(WnPos::Verb),
            'a' | 's' => Some(WnPos::Adjective),
            'r' => Some(WnPos::Adverb),
            _ => None,
        }
    }
}

impl fmt::Display for WnPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_suffix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub pos: WnPos,
    pub offset: u64,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos)
    }
}

/// One set of synonymous lemmas with its definition and usage examples.
#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub examples: Vec<String>,
}

/// Whether Lesk signatures keep or drop stopwords. The default drops them;
/// overlap on stopwords carries no sense information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopwordPolicy {
    #[default]
    Drop,
    Keep,
}

/// Immutable lemma→synset index over a loaded WNDB directory.
#[derive(Debug)]
pub struct WordNetDb {
    synsets: HashMap<SynsetId, Synset>,
    index: HashMap<(String, WnPos), Vec<SynsetId>>,
}

impl WordNetDb {
    /// Loads the eight `index.*`/`data.*` files from a WordNet database
    /// directory.
    pub fn load(dir: &Path) -> Result<WordNetDb, WordNetError> {
        let mut db = WordNetDb {
            synsets: HashMap::new(),
            index: HashMap::new(),
        };
        for pos in WnPos::ALL {
            db.load_data(dir, pos)?;
        }
        for pos in WnPos::ALL {
            db.load_index(dir, pos)?;
        }
        for ((lemma, pos), ids) in &db.index {
            for id in ids {
                if !db.synsets.contains_key(id) {
                    return Err(WordNetError::DanglingOffset {
                        lemma: lemma.clone(),
                        pos: *pos,
                        offset: id.offset,
                    });
                }
            }
        }
        Ok(db)
    }

    fn load_data(&mut self, dir: &Path, pos: WnPos) -> Result<(), WordNetError> {
        let path = dir.join(format!("data.{}", pos.file_suffix()));
        let contents = read_db_file(&path)?;
        let file = path.display().to_string();
        for (line_no, line) in contents.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue; // license header
            }
            let synset = parse_data_line(line, &file, line_no + 1)?;
            self.synsets.insert(synset.id, synset);
        }
        Ok(())
    }

    fn load_index(&mut self, dir: &Path, pos: WnPos) -> Result<(), WordNetError> {
        let path = dir.join(format!("index.{}", pos.file_suffix()));
        let contents = read_db_file(&path)?;
        let file = path.display().to_string();
        for (line_no, line) in contents.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let (lemma, offsets) = parse_index_line(line, &file, line_no + 1)?;
            let ids = offsets
                .into_iter()
                .map(|offset| SynsetId { pos, offset })
                .collect();
            self.index.insert((lemma, pos), ids);
        }
        Ok(())
    }

    /// Synsets for a lemma, ordered by sense rank, optionally filtered by
    /// part of speech. When the exact lemma misses, inflectional variants
    /// (-s/-es/-ies/-ed/-ing, with -e restoration and consonant undoubling)
    /// are tried per part of speech. Absent lemmas yield an empty list.
    pub fn synsets(&self, lemma: &str, pos: Option<WnPos>) -> Vec<&Synset> {
        let key = normalize_lemma(lemma);
        let mut out = Vec::new();
        for p in pos.map_or_else(|| WnPos::ALL.to_vec(), |p| vec![p]) {
            for id in self.ids_with_fallback(&key, p) {
                out.push(&self.synsets[&id]);
            }
        }
        out
    }

    /// Exact-lemma lookup without morphological fallback.
    pub fn synsets_exact(&self, lemma: &str, pos: Option<WnPos>) -> Vec<&Synset> {
        let key = normalize_lemma(lemma);
        let mut out = Vec::new();
        for p in pos.map_or_else(|| WnPos::ALL.to_vec(), |p| vec![p]) {
            if let Some(ids) = self.index.get(&(key.clone(), p)) {
                out.extend(ids.iter().map(|id| &self.synsets[id]));
            }
        }
        out
    }

    fn ids_with_fallback(&self, key: &str, pos: WnPos) -> Vec<SynsetId> {
        if let Some(ids) = self.index.get(&(key.to_string(), pos)) {
            return ids.clone();
        }
        for candidate in morph_candidates(key) {
            if let Some(ids) = self.index.get(&(candidate, pos)) {
                return ids.clone();
            }
        }
        Vec::new()
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }
}

impl Synset {
    /// Lemmas of this synset minus the excluded word, with underscores
    /// rendered as spaces. Sorted and deduplicated so a seeded draw over the
    /// result is stable.
    pub fn synonyms(&self, exclude: &str) -> Vec<String> {
        let excluded = normalize_lemma(exclude);
        let mut out: Vec<String> = self
            .lemmas
            .iter()
            .filter(|lemma| normalize_lemma(lemma) != excluded)
            .map(|lemma| lemma.replace('_', " "))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Tokenized, lowercased union of the gloss and example words. With
    /// [`StopwordPolicy::Drop`], stopwords and punctuation are removed.
    pub fn signature(&self, policy: StopwordPolicy) -> BTreeSet<String> {
        let mut words = BTreeSet::new();
        let mut add = |chunk: &str| {
            for token in tokenize(chunk) {
                let token = token.to_lowercase();
                let drop = match policy {
                    StopwordPolicy::Drop => is_stopword(&token),
                    StopwordPolicy::Keep => !token.chars().any(char::is_alphanumeric),
                };
                if !drop && !token.is_empty() {
                    words.insert(token);
                }
            }
        };
        add(&self.gloss);
        for example in &self.examples {
            add(example);
        }
        words
    }
}

pub fn normalize_lemma(lemma: &str) -> String {
    lemma.to_lowercase().replace(' ', "_")
}

/// Inflectional fallbacks for a lemma missing from the index, in the order
/// they are tried.
pub fn morph_candidates(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |candidate: String| {
        if !candidate.is_empty() && !out.contains(&candidate) {
            out.push(candidate);
        }
    };
    if let Some(stem) = word.strip_suffix("ies") {
        push(format!("{stem}y"));
    }
    if let Some(stem) = word.strip_suffix("es") {
        push(stem.to_string());
    }
    if let Some(stem) = word.strip_suffix('s') {
        if !stem.ends_with('s') {
            push(stem.to_string());
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            push(stem.to_string());
            push(format!("{stem}e"));
            if let Some(undoubled) = undouble(stem) {
                push(undoubled);
            }
        }
    }
    out
}

fn undouble(stem: &str) -> Option<String> {
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n >= 3 && chars[n - 1] == chars[n - 2] && !"aeiou".contains(chars[n - 1]) {
        Some(chars[..n - 1].iter().collect())
    } else {
        None
    }
}

fn read_db_file(path: &Path) -> Result<String, WordNetError> {
    if !path.is_file() {
        return Err(WordNetError::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

fn malformed(file: &str, line: usize, message: impl Into<String>) -> WordNetError {
    WordNetError::Malformed {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

/// `lemma pos synset_cnt p_cnt [ptr...] sense_cnt tagsense_cnt offset...`
fn parse_index_line(line: &str, file: &str, line_no: usize) -> Result<(String, Vec<u64>), WordNetError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 6 {
        return Err(malformed(file, line_no, "index entry too short"));
    }
    let lemma = fields[0].to_lowercase();
    let synset_cnt: usize = fields[2]
        .parse()
        .map_err(|_| malformed(file, line_no, "bad synset_cnt"))?;
    let p_cnt: usize = fields[3]
        .parse()
        .map_err(|_| malformed(file, line_no, "bad p_cnt"))?;
    let offsets_start = 4 + p_cnt + 2; // skip pointer symbols, sense_cnt, tagsense_cnt
    if fields.len() < offsets_start + synset_cnt {
        return Err(malformed(file, line_no, "fewer synset offsets than synset_cnt"));
    }
    let mut offsets = Vec::with_capacity(synset_cnt);
    for raw in &fields[offsets_start..offsets_start + synset_cnt] {
        offsets.push(
            raw.parse::<u64>()
                .map_err(|_| malformed(file, line_no, format!("bad synset offset {raw:?}")))?,
        );
    }
    if offsets.is_empty() {
        return Err(malformed(file, line_no, "index entry with no synsets"));
    }
    Ok((lemma, offsets))
}

/// `offset lex_filenum ss_type w_cnt word lex_id [word lex_id...] ... | gloss`
fn parse_data_line(line: &str, file: &str, line_no: usize) -> Result<Synset, WordNetError> {
    let (head, gloss_raw) = line
        .split_once('|')
        .ok_or_else(|| malformed(file, line_no, "missing gloss separator '|'"))?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() < 6 {
        return Err(malformed(file, line_no, "data entry too short"));
    }
    let offset: u64 = fields[0]
        .parse()
        .map_err(|_| malformed(file, line_no, "bad synset offset"))?;
    let ss_type = fields[2]
        .chars()
        .next()
        .and_then(WnPos::from_ss_type)
        .ok_or_else(|| malformed(file, line_no, format!("unknown ss_type {:?}", fields[2])))?;
    let w_cnt = usize::from_str_radix(fields[3], 16)
        .map_err(|_| malformed(file, line_no, "bad hexadecimal w_cnt"))?;
    if w_cnt == 0 {
        return Err(malformed(file, line_no, "synset with no lemmas"));
    }
    if fields.len() < 4 + 2 * w_cnt {
        return Err(malformed(file, line_no, "fewer words than w_cnt"));
    }
    let mut lemmas = Vec::with_capacity(w_cnt);
    for k in 0..w_cnt {
        lemmas.push(strip_adj_marker(fields[4 + 2 * k]).to_string());
    }
    let (gloss, examples) = split_gloss(gloss_raw);
    if gloss.is_empty() {
        return Err(malformed(file, line_no, "empty gloss"));
    }
    Ok(Synset {
        id: SynsetId {
            pos: ss_type,
            offset,
        },
        lemmas,
        gloss,
        examples,
    })
}

/// Adjective lemmas may carry a syntactic marker such as `rude(a)`.
fn strip_adj_marker(lemma: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(stripped) = lemma.strip_suffix(marker) {
            return stripped;
        }
    }
    lemma
}

/// The WNDB gloss field holds the definition and quoted example sentences
/// separated by semicolons.
fn split_gloss(raw: &str) -> (String, Vec<String>) {
    let mut definition_parts = Vec::new();
    let mut examples = Vec::new();
    for part in raw.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(quoted) = part.strip_prefix('"') {
            examples.push(quoted.strip_suffix('"').unwrap_or(quoted).to_string());
        } else {
            definition_parts.push(part);
        }
    }
    (definition_parts.join("; "), examples)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fixture_db() -> WordNetDb {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/wndb");
        WordNetDb::load(&dir).expect("fixture db loads")
    }

    #[test]
    fn load_and_lookup_dog() {
        let db = fixture_db();
        let senses = db.synsets("dog", Some(WnPos::Noun));
        assert!(!senses.is_empty());
        assert!(senses[0].lemmas.iter().any(|l| l == "dog"));
    }

    #[test]
    fn missing_directory_errors() {
        let err = WordNetDb::load(Path::new("/nonexistent/wndb")).unwrap_err();
        assert!(matches!(err, WordNetError::MissingFile(_)));
    }

    #[test]
    fn empty_directory_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            WordNetDb::load(dir.path()),
            Err(WordNetError::MissingFile(_))
        ));
    }

    #[test]
    fn absent_lemma_is_empty() {
        let db = fixture_db();
        assert!(db.synsets("zzzqqq", None).is_empty());
    }

    #[test]
    fn post_has_multiple_noun_senses() {
        let db = fixture_db();
        let senses = db.synsets("post", Some(WnPos::Noun));
        assert!(senses.len() >= 3, "expected military/mail/message senses");
    }

    #[test]
    fn judging_finds_nouns_and_verbs() {
        let db = fixture_db();
        let senses = db.synsets("judging", None);
        let poses: BTreeSet<WnPos> = senses.iter().map(|s| s.id.pos).collect();
        assert!(poses.contains(&WnPos::Noun), "noun sense via direct entry");
        assert!(poses.contains(&WnPos::Verb), "verb sense via -ing fallback");
        let lemmas: Vec<&String> = senses.iter().flat_map(|s| s.lemmas.iter()).collect();
        assert!(lemmas.iter().any(|l| l.as_str() == "judgment"));
        assert!(lemmas.iter().any(|l| l.as_str() == "evaluate"));
    }

    #[test]
    fn synonyms_exclude_the_word_and_space_multiwords() {
        let db = fixture_db();
        let senses = db.synsets("u", Some(WnPos::Noun));
        let synonyms = senses[0].synonyms("u");
        assert!(synonyms.contains(&"atomic number 92".to_string()));
        assert!(!synonyms.iter().any(|s| s == "u"));
    }

    #[test]
    fn single_lemma_synset_has_no_synonyms() {
        let db = fixture_db();
        let senses = db.synsets("good", Some(WnPos::Adjective));
        assert!(senses[0].synonyms("good").is_empty());
    }

    #[test]
    fn delicious_synonyms_nonempty() {
        let db = fixture_db();
        let senses = db.synsets("delicious", Some(WnPos::Adjective));
        assert!(!senses[0].synonyms("delicious").is_empty());
    }

    #[test]
    fn signature_drops_stopwords() {
        let synset = Synset {
            id: SynsetId {
                pos: WnPos::Noun,
                offset: 1,
            },
            lemmas: vec!["eating".into()],
            gloss: "the act of eating".into(),
            examples: vec![],
        };
        let sig = synset.signature(StopwordPolicy::Drop);
        let expect: BTreeSet<String> = ["act", "eating"].iter().map(|s| s.to_string()).collect();
        assert_eq!(sig, expect);
    }

    #[test]
    fn signature_union_is_idempotent() {
        let base = Synset {
            id: SynsetId {
                pos: WnPos::Noun,
                offset: 2,
            },
            lemmas: vec!["x".into()],
            gloss: "a tart citrus fruit".into(),
            examples: vec!["a tart citrus fruit".into()],
        };
        let mut without_example = base.clone();
        without_example.examples.clear();
        assert_eq!(
            base.signature(StopwordPolicy::Drop),
            without_example.signature(StopwordPolicy::Drop)
        );
    }

    #[test]
    fn deterministic_load() {
        let a = fixture_db();
        let b = fixture_db();
        for lemma in ["food", "post", "rude", "quickly"] {
            let sa: Vec<_> = a.synsets(lemma, None).into_iter().cloned().collect();
            let sb: Vec<_> = b.synsets(lemma, None).into_iter().cloned().collect();
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn morph_candidates_restore_e_and_undouble() {
        assert!(morph_candidates("judging").contains(&"judge".to_string()));
        assert!(morph_candidates("stopped").contains(&"stop".to_string()));
        assert!(morph_candidates("parties").contains(&"party".to_string()));
        assert!(morph_candidates("us").contains(&"u".to_string()));
    }

    #[test]
    fn adjective_markers_are_stripped() {
        let db = fixture_db();
        let senses = db.synsets("previous", Some(WnPos::Adjective));
        assert!(senses[0].lemmas.iter().any(|l| l == "previous"));
    }
}
