//! Hand-crafted per-comment feature vectors and design matrices.
//!
//! The textual schema has seven features computed on emoji-stripped text:
//! word count, character count, stop-word ratio, question ratio, code
//! element ratio, Flesch reading ease, and the domain text sentiment. The
//! emoji schema appends emoji count, the two emoji sentiment sums, and the
//! unmatched-emoji count.

use std::collections::HashSet;
use std::io::{BufRead, BufReader};
use std::path::Path;

use indexmap::IndexMap;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use regex::Regex;

use crate::codec::NormalizedComment;
use crate::corpus::Dataset;
use crate::embeddings::embed_comment;
use crate::error::{Error, Result};
use crate::resources::ResourceBundle;
use crate::sentiment::SentimentChannels;
use crate::tokenize::{raw_tokens, sentences, syllables, word_tokens};

pub const TEXT_SCHEMA_ID: &str = "textual-v1";
pub const TEXT_EMOJI_SCHEMA_ID: &str = "textual+emoji-v1";

pub const TEXT_FEATURE_NAMES: [&str; 7] = [
    "word_count",
    "char_count",
    "stop_word_ratio",
    "question_ratio",
    "code_element_ratio",
    "flesch_reading_ease",
    "text_sentiment",
];

pub const EMOJI_FEATURE_NAMES: [&str; 4] =
    ["emoji_count", "g_e_sum", "cr_e_sum", "unmatched_count"];

/// Named feature values with a fixed key order under one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    schema_id: String,
    values: IndexMap<String, f64>,
}

impl FeatureVector {
    pub fn schema_id(&self) -> &str {
        &self.schema_id
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Concatenate, keeping this vector's features first.
    pub fn concat(&self, other: &FeatureVector, schema_id: &str) -> FeatureVector {
        let mut values = self.values.clone();
        for (k, v) in &other.values {
            values.insert(k.clone(), *v);
        }
        FeatureVector {
            schema_id: schema_id.to_string(),
            values,
        }
    }
}

/// One term per line, UTF-8, lowercased at load.
pub fn load_stoplist(path: &Path) -> Result<HashSet<String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let term = line.trim();
        if !term.is_empty() && !term.starts_with('#') {
            out.insert(term.to_lowercase());
        }
    }
    Ok(out)
}

static CAMEL_CASE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^[a-z][a-z0-9]*[A-Z][A-Za-z0-9]*$").unwrap());
static SNAKE_CASE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^[A-Za-z][A-Za-z0-9]*(_[A-Za-z0-9]+)+$").unwrap());
static CALL_SUFFIX: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^[A-Za-z_][A-Za-z0-9_.]*\(\)$").unwrap());
static DOTTED_PATH: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)+$").unwrap());

/// Identifier-shaped token: camelCase, snake_case, a `()` call suffix, or
/// a dotted path.
fn is_code_element(token: &str) -> bool {
    let trimmed = token.trim_matches(|c: char| matches!(c, '.' | ',' | ';' | ':' | '!' | '?'));
    if trimmed.is_empty() {
        return false;
    }
    CAMEL_CASE.is_match(trimmed)
        || SNAKE_CASE.is_match(trimmed)
        || CALL_SUFFIX.is_match(trimmed)
        || DOTTED_PATH.is_match(trimmed)
}

/// The seven textual features, computed on the stripped text.
/// `channels.cr_t` supplies the text sentiment value.
pub fn extract_text_features(
    nc: &NormalizedComment,
    stoplist: &HashSet<String>,
    channels: &SentimentChannels,
) -> FeatureVector {
    let stripped = nc.stripped();
    let words = word_tokens(stripped);
    let word_count = words.len();
    let char_count = stripped.chars().count();

    let stop_word_ratio = if word_count == 0 {
        0.0
    } else {
        words.iter().filter(|w| stoplist.contains(*w)).count() as f64 / word_count as f64
    };

    let sents = sentences(stripped);
    let question_ratio = if sents.is_empty() {
        0.0
    } else {
        sents.iter().filter(|s| s.is_question).count() as f64 / sents.len() as f64
    };

    let code_element_ratio = if word_count == 0 {
        0.0
    } else {
        let hits = raw_tokens(stripped)
            .iter()
            .filter(|t| is_code_element(t))
            .count();
        (hits as f64 / word_count as f64).min(1.0)
    };

    let flesch_reading_ease = if word_count == 0 || sents.is_empty() {
        0.0
    } else {
        let syllable_total: usize = words.iter().map(|w| syllables(w)).sum();
        206.835 - 1.015 * (word_count as f64 / sents.len() as f64)
            - 84.6 * (syllable_total as f64 / word_count as f64)
    };

    let mut values = IndexMap::with_capacity(7);
    values.insert("word_count".to_string(), word_count as f64);
    values.insert("char_count".to_string(), char_count as f64);
    values.insert("stop_word_ratio".to_string(), stop_word_ratio);
    values.insert("question_ratio".to_string(), question_ratio);
    values.insert("code_element_ratio".to_string(), code_element_ratio);
    values.insert("flesch_reading_ease".to_string(), flesch_reading_ease);
    values.insert("text_sentiment".to_string(), channels.cr_t);
    FeatureVector {
        schema_id: TEXT_SCHEMA_ID.to_string(),
        values,
    }
}

/// The four emoji features, straight from the computed channels.
pub fn extract_emoji_features(
    nc: &NormalizedComment,
    channels: &SentimentChannels,
) -> FeatureVector {
    let mut values = IndexMap::with_capacity(4);
    values.insert("emoji_count".to_string(), nc.emoji_tokens().len() as f64);
    values.insert("g_e_sum".to_string(), channels.g_e);
    values.insert("cr_e_sum".to_string(), channels.cr_e);
    values.insert(
        "unmatched_count".to_string(),
        channels.unmatched_emoji_count as f64,
    );
    FeatureVector {
        schema_id: "emoji-v1".to_string(),
        values,
    }
}

/// What the rows of a design matrix hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixMode {
    /// Textual features only: the feature-based baseline.
    TextFeatures,
    /// Textual plus emoji features.
    TextPlusEmojiFeatures,
    /// Mean word vector of the stripped text: the embedding baseline.
    TextEmbedding,
    /// Concatenated text and emoji vectors.
    FusedEmbedding,
}

impl MatrixMode {
    pub fn name(self) -> &'static str {
        match self {
            MatrixMode::TextFeatures => "text_features",
            MatrixMode::TextPlusEmojiFeatures => "text_plus_emoji_features",
            MatrixMode::TextEmbedding => "text_embedding",
            MatrixMode::FusedEmbedding => "fused_embedding",
        }
    }
}

/// Rows, labels, and column names for one training setup.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub mode: MatrixMode,
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// 1 = useful, aligned with `rows`.
    pub labels: Vec<u8>,
}

impl DesignMatrix {
    pub fn new(
        mode: MatrixMode,
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
    ) -> Self {
        debug_assert_eq!(rows.len(), labels.len());
        debug_assert!(rows.iter().all(|r| r.len() == feature_names.len()));
        DesignMatrix {
            mode,
            feature_names,
            rows,
            labels,
        }
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// CSV export: feature names plus a trailing `label` column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.feature_names.join(","));
        out.push_str(",label\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push_str(&format!(",{label}\n"));
        }
        out
    }
}

/// Build the design matrix for a dataset under one mode. Rows keep the
/// dataset order; the build is deterministic.
pub fn build_design_matrix(
    dataset: &Dataset,
    mode: MatrixMode,
    bundle: &ResourceBundle,
) -> Result<DesignMatrix> {
    if dataset.is_empty() {
        return Err(Error::InvalidInput(format!(
            "dataset `{}` has no rows",
            dataset.name()
        )));
    }
    let labels: Vec<u8> = dataset.records.iter().map(|r| r.useful).collect();

    let rows: Vec<Vec<f64>> = match mode {
        MatrixMode::TextFeatures | MatrixMode::TextPlusEmojiFeatures => dataset
            .records
            .par_iter()
            .map(|rec| {
                let nc = bundle.normalize(&rec.text);
                let channels = bundle.channels(&nc);
                let text = extract_text_features(&nc, &bundle.stoplist, &channels);
                match mode {
                    MatrixMode::TextFeatures => text.values(),
                    _ => {
                        let emoji = extract_emoji_features(&nc, &channels);
                        text.concat(&emoji, TEXT_EMOJI_SCHEMA_ID).values()
                    }
                }
            })
            .collect(),
        MatrixMode::TextEmbedding | MatrixMode::FusedEmbedding => {
            let word_table = bundle.word_vectors()?;
            let emoji_table = bundle.emoji_vectors()?;
            dataset
                .records
                .par_iter()
                .map(|rec| {
                    let nc = bundle.normalize(&rec.text);
                    let ce =
                        embed_comment(&nc, word_table, emoji_table, bundle.vector_aggregate)?;
                    Ok(match mode {
                        MatrixMode::TextEmbedding => ce.text_vec,
                        _ => ce.fused,
                    })
                })
                .collect::<Result<_>>()?
        }
    };

    let feature_names: Vec<String> = match mode {
        MatrixMode::TextFeatures => TEXT_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        MatrixMode::TextPlusEmojiFeatures => TEXT_FEATURE_NAMES
            .iter()
            .chain(EMOJI_FEATURE_NAMES.iter())
            .map(|s| s.to_string())
            .collect(),
        MatrixMode::TextEmbedding => (0..rows[0].len()).map(|i| format!("text_{i}")).collect(),
        MatrixMode::FusedEmbedding => {
            let dim_t = bundle.word_vectors()?.dim();
            (0..dim_t)
                .map(|i| format!("text_{i}"))
                .chain((0..rows[0].len() - dim_t).map(|i| format!("emoji_{i}")))
                .collect()
        }
    };

    Ok(DesignMatrix::new(mode, feature_names, rows, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{normalize_comment, CodecTables, EmojiRanges};
    use crate::sentiment::SentimentChannels;
    use std::collections::HashMap;

    fn tables() -> CodecTables {
        CodecTables::from_maps(
            HashMap::new(),
            HashMap::new(),
            EmojiRanges::new(vec![(0x1F300, 0x1FAFF)]),
        )
        .unwrap()
    }

    fn zero_channels() -> SentimentChannels {
        SentimentChannels {
            g_t: 0.0,
            cr_t: 0.0,
            g_e: 0.0,
            cr_e: 0.0,
            g_te: 0.0,
            unmatched_emoji_count: 0,
        }
    }

    #[test]
    fn empty_text_yields_zero_features() {
        let nc = normalize_comment("", &tables());
        let fv = extract_text_features(&nc, &HashSet::new(), &zero_channels());
        assert_eq!(fv.len(), 7);
        assert!(fv.values().iter().all(|&v| v == 0.0));
        assert_eq!(fv.schema_id(), TEXT_SCHEMA_ID);
    }

    #[test]
    fn question_ratio_and_word_count() {
        let nc = normalize_comment("Is this right?", &tables());
        let fv = extract_text_features(&nc, &HashSet::new(), &zero_channels());
        assert_eq!(fv.get("word_count"), Some(3.0));
        assert_eq!(fv.get("question_ratio"), Some(1.0));
    }

    #[test]
    fn code_element_ratio_counts_identifiers() {
        let nc = normalize_comment("call foo_bar() here", &tables());
        let fv = extract_text_features(&nc, &HashSet::new(), &zero_channels());
        let got = fv.get("code_element_ratio").unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn code_element_patterns() {
        for token in ["camelCase", "snake_case", "foo()", "a.b.c", "obj.method()"] {
            assert!(is_code_element(token), "{token}");
        }
        for token in ["plain", "Sentence", "don't", "(parens)", "()"] {
            assert!(!is_code_element(token), "{token}");
        }
    }

    #[test]
    fn stop_word_ratio_uses_stoplist() {
        let stop: HashSet<String> = ["the", "a"].iter().map(|s| s.to_string()).collect();
        let nc = normalize_comment("the fix works a treat", &tables());
        let fv = extract_text_features(&nc, &stop, &zero_channels());
        assert!((fv.get("stop_word_ratio").unwrap() - 2.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn flesch_matches_hand_computation() {
        let nc = normalize_comment("Is this right?", &tables());
        let fv = extract_text_features(&nc, &HashSet::new(), &zero_channels());
        // 3 words, 1 sentence, 3 syllables
        let expected = 206.835 - 1.015 * 3.0 - 84.6 * 1.0;
        assert!((fv.get("flesch_reading_ease").unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn emoji_features_from_channels() {
        let nc = normalize_comment("two \u{1F44D}\u{1F44D}", &tables());
        let channels = SentimentChannels {
            g_e: 1.32,
            cr_e: 1.8,
            unmatched_emoji_count: 1,
            ..zero_channels()
        };
        let fv = extract_emoji_features(&nc, &channels);
        assert_eq!(fv.get("emoji_count"), Some(2.0));
        assert_eq!(fv.get("g_e_sum"), Some(1.32));
        assert_eq!(fv.get("cr_e_sum"), Some(1.8));
        assert_eq!(fv.get("unmatched_count"), Some(1.0));
    }

    #[test]
    fn no_emoji_features_are_zero() {
        let nc = normalize_comment("plain", &tables());
        let fv = extract_emoji_features(&nc, &zero_channels());
        assert!(fv.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn concat_appends_emoji_features_last() {
        let nc = normalize_comment("ok", &tables());
        let text = extract_text_features(&nc, &HashSet::new(), &zero_channels());
        let emoji = extract_emoji_features(&nc, &zero_channels());
        let combined = text.concat(&emoji, TEXT_EMOJI_SCHEMA_ID);
        assert_eq!(combined.len(), 11);
        let names: Vec<&str> = combined.names().collect();
        assert_eq!(&names[..7], &TEXT_FEATURE_NAMES[..]);
        assert_eq!(&names[7..], &EMOJI_FEATURE_NAMES[..]);
    }

    #[test]
    fn ratios_stay_in_unit_interval() {
        for text in [
            "x() y() z()",
            "??? !!!",
            "the the the",
            "a.b c.d() e_f g",
        ] {
            let nc = normalize_comment(text, &tables());
            let stop: HashSet<String> = ["the"].iter().map(|s| s.to_string()).collect();
            let fv = extract_text_features(&nc, &stop, &zero_channels());
            for name in ["stop_word_ratio", "question_ratio", "code_element_ratio"] {
                let v = fv.get(name).unwrap();
                assert!((0.0..=1.0).contains(&v), "{name} = {v} for {text:?}");
            }
        }
    }
}
