use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use regex::Regex;

use super::{fold_word, MetricsError};
use crate::text::{parse_list, split_words, TextError};

/// Longest quoted span, in characters, that whitelists its contents.
pub const MAX_QUOTE_CHARS: usize = 300;

/// Letters of a target language as inclusive codepoint ranges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    ranges: Vec<(u32, u32)>,
}

fn parse_hex(s: &str) -> Option<u32> {
    let s = s.strip_prefix("U+").or_else(|| s.strip_prefix("0x")).unwrap_or(s);
    u32::from_str_radix(s, 16).ok()
}

impl Alphabet {
    pub fn from_ranges(ranges: impl IntoIterator<Item = (char, char)>) -> Self {
        let mut ranges: Vec<(u32, u32)> = ranges.into_iter().map(|(a, b)| (a as u32, b as u32)).collect();
        ranges.sort_unstable();
        Self { ranges }
    }

    /// Lines of `<start>[\t<end>]` in hex; further columns are ignored.
    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut ranges = Vec::new();
        for (line, entry) in parse_list(text) {
            let mut cols = entry.split('\t');
            let start = cols.next().and_then(parse_hex);
            let end = match cols
                .next()
                .map(str::trim)
                .filter(|c| !c.is_empty() && !c.starts_with('#'))
            {
                Some(c) => parse_hex(c),
                None => start,
            };
            match (start, end) {
                (Some(a), Some(b)) if a <= b => ranges.push((a, b)),
                _ => return Err((line, format!("bad codepoint range {entry:?}"))),
            }
        }
        ranges.sort_unstable();
        Ok(Self { ranges })
    }

    pub fn contains(&self, c: char) -> bool {
        let c = c as u32;
        self.ranges.iter().any(|&(a, b)| a <= c && c <= b)
    }
}

/// A whole-word regular expression.
#[derive(Debug, Clone)]
pub struct RegexRule {
    pub name: String,
    pub regex: Regex,
}

impl RegexRule {
    pub fn new(name: &str, pattern: &str) -> Result<Self, regex::Error> {
        Ok(Self {
            name: name.to_string(),
            regex: Regex::new(&format!("^(?:{pattern})$"))?,
        })
    }

    pub fn matches(&self, word: &str) -> bool {
        self.regex.is_match(word)
    }
}

/// Finds entities in a sentence given as a word list. Returns half-open
/// word index ranges.
pub trait EntityRecognizer: Send + Sync {
    fn name(&self) -> &str;
    fn spans(&self, words: &[&str]) -> Vec<(usize, usize)>;
}

fn phrase_key<'a>(words: impl IntoIterator<Item = &'a str>) -> String {
    words.into_iter().map(fold_word).collect::<Vec<_>>().join(" ")
}

/// A list of words and phrases, matched case-insensitively over word
/// sequences.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    pub name: String,
    phrases: HashSet<String>,
    max_words: usize,
}

impl Gazetteer {
    pub fn from_entries<I, S>(name: &str, entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut g = Self {
            name: name.to_string(),
            ..Self::default()
        };
        for e in entries {
            g.insert(e.as_ref());
        }
        g
    }

    pub fn insert(&mut self, entry: &str) {
        let words = split_words(entry);
        if words.is_empty() {
            return;
        }
        self.max_words = self.max_words.max(words.len());
        self.phrases.insert(phrase_key(words.texts()));
    }

    /// Distinct entries.
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.phrases.contains(&phrase_key(split_words(phrase).texts()))
    }
}

impl EntityRecognizer for Gazetteer {
    fn name(&self) -> &str {
        &self.name
    }

    /// Longest match first at each position, left to right.
    fn spans(&self, words: &[&str]) -> Vec<(usize, usize)> {
        let folded: Vec<String> = words.iter().map(|w| fold_word(w)).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < folded.len() {
            let longest = (1..=self.max_words.min(folded.len() - i))
                .rev()
                .find(|&n| self.phrases.contains(&folded[i..i + n].join(" ")));
            match longest {
                Some(n) => {
                    out.push((i, i + n));
                    i += n;
                }
                None => i += 1,
            }
        }
        out
    }
}

/// Whitelisting rules and the target alphabet of one language.
pub struct RulePack {
    pub language: String,
    pub alphabet: Alphabet,
    pub rules: Vec<RegexRule>,
    pub gazetteers: Vec<Gazetteer>,
    plugins: Vec<Box<dyn EntityRecognizer>>,
    pub max_quote_chars: usize,
}

impl std::fmt::Debug for RulePack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RulePack")
            .field("language", &self.language)
            .field("rules", &self.rules.len())
            .field(
                "gazetteers",
                &self.gazetteers.iter().map(|g| (&g.name, g.len())).collect::<Vec<_>>(),
            )
            .field("plugins", &self.plugins.len())
            .finish()
    }
}

fn read(path: &Path) -> Result<String, MetricsError> {
    let raw = std::fs::read(path).map_err(|e| TextError::io(path, e))?;
    String::from_utf8(raw).map_err(|e| {
        MetricsError::Text(TextError::Decode {
            offset: e.utf8_error().valid_up_to(),
        })
    })
}

fn data_err(path: &Path, line: usize, message: impl Into<String>) -> MetricsError {
    MetricsError::Data {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

impl RulePack {
    pub fn new(language: &str, alphabet: Alphabet) -> Self {
        Self {
            language: language.to_string(),
            alphabet,
            rules: Vec::new(),
            gazetteers: Vec::new(),
            plugins: Vec::new(),
            max_quote_chars: MAX_QUOTE_CHARS,
        }
    }

    /// Loads a pack directory. The language tag is the directory name.
    ///
    /// Layout: `alphabet.tsv`, `regex_rules.tsv` (`name<TAB>regex`),
    /// `gazetteers/*.txt` and `manifest.tsv` (`path<TAB>count` for every
    /// gazetteer, relative to the pack).
    pub fn load(dir: &Path) -> Result<Self, MetricsError> {
        let language = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let alpha_path = dir.join("alphabet.tsv");
        let alphabet = Alphabet::parse(&read(&alpha_path)?).map_err(|(l, m)| data_err(&alpha_path, l, m))?;
        let mut pack = Self::new(&language, alphabet);

        let rules_path = dir.join("regex_rules.tsv");
        for (line, entry) in parse_list(&read(&rules_path)?) {
            let (name, pattern) = entry
                .split_once('\t')
                .ok_or_else(|| data_err(&rules_path, line, "expected name<TAB>regex"))?;
            let rule = RegexRule::new(name.trim(), pattern.trim()).map_err(|e| MetricsError::Regex {
                path: rules_path.clone(),
                line,
                name: name.trim().to_string(),
                source: Box::new(e),
            })?;
            pack.rules.push(rule);
        }

        let manifest_path = dir.join("manifest.tsv");
        let mut manifest: BTreeMap<String, usize> = BTreeMap::new();
        for (line, entry) in parse_list(&read(&manifest_path)?) {
            let (file, count) = entry
                .split_once('\t')
                .ok_or_else(|| data_err(&manifest_path, line, "expected path<TAB>count"))?;
            let count = count
                .trim()
                .parse()
                .map_err(|_| data_err(&manifest_path, line, format!("bad count {count:?}")))?;
            manifest.insert(file.trim().to_string(), count);
        }

        let gaz_dir = dir.join("gazetteers");
        let mut files: Vec<PathBuf> = match std::fs::read_dir(&gaz_dir) {
            Ok(rd) => rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "txt"))
                .collect(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(TextError::io(&gaz_dir, e).into()),
        };
        files.sort();
        let mut seen = BTreeMap::new();
        for path in files {
            let key = format!("gazetteers/{}", path.file_name().unwrap().to_string_lossy());
            let text = read(&path)?;
            let entries: Vec<&str> = parse_list(&text).into_iter().map(|(_, e)| e).collect();
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            seen.insert(key, entries.len());
            pack.gazetteers.push(Gazetteer::from_entries(&name, entries));
        }
        for (file, &expected) in &manifest {
            let actual = seen.get(file).copied();
            if actual != Some(expected) {
                match actual {
                    Some(actual) => {
                        return Err(MetricsError::Manifest {
                            file: file.clone(),
                            expected,
                            actual,
                        })
                    }
                    None => return Err(TextError::io(&dir.join(file), std::io::ErrorKind::NotFound.into()).into()),
                }
            }
        }
        if let Some(file) = seen.keys().find(|f| !manifest.contains_key(*f)) {
            return Err(data_err(&manifest_path, 0, format!("{file} is not listed")));
        }
        Ok(pack)
    }

    /// Loads `<data_dir>/rulepacks/<tag>`.
    pub fn bundled(tag: &str, data_dir: &Path) -> Result<Self, MetricsError> {
        let dir = data_dir.join("rulepacks").join(tag);
        if tag.is_empty() || tag.contains(['/', '\\', '.']) || !dir.is_dir() {
            return Err(MetricsError::UnknownLanguage {
                tag: tag.to_string(),
                dir: data_dir.join("rulepacks"),
            });
        }
        Self::load(&dir)
    }

    pub fn add_recognizer(&mut self, r: Box<dyn EntityRecognizer>) {
        self.plugins.push(r);
    }

    pub fn recognizers(&self) -> impl Iterator<Item = &dyn EntityRecognizer> {
        self.gazetteers
            .iter()
            .map(|g| g as &dyn EntityRecognizer)
            .chain(self.plugins.iter().map(|p| p.as_ref()))
    }

    /// Name of the first regex rule matching the whole word.
    pub fn rule_for(&self, word: &str) -> Option<&str> {
        self.rules.iter().find(|r| r.matches(word)).map(|r| r.name.as_str())
    }

    pub fn gazetteer(&self, name: &str) -> Option<&Gazetteer> {
        self.gazetteers.iter().find(|g| g.name == name)
    }

    pub fn gazetteer_mut(&mut self, name: &str) -> Option<&mut Gazetteer> {
        self.gazetteers.iter_mut().find(|g| g.name == name)
    }
}

pub fn load_rulepack(dir: &Path) -> Result<RulePack, MetricsError> {
    RulePack::load(dir)
}
