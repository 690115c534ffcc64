//! Guideline-driven emoji suggestion, dataset augmentation, and
//! inter-annotator agreement.
//!
//! A rulebook is an ordered list of case-insensitive regex rules, each
//! tagged with an intent and an emoji. Suggestion evaluates rules in
//! `(priority, ordinal)` order; augmentation appends the top suggestion to
//! comments that lack emoji. Agreement between two annotators is measured
//! with Cohen's kappa, where "no emoji" is a first-class category.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader};
use std::path::Path;

use regex::RegexBuilder;

use crate::codec::{normalize_comment, CodecTables, NormalizedComment};
use crate::corpus::Dataset;
use crate::error::{Error, Result};

/// One pattern-to-emoji guideline entry.
#[derive(Debug, Clone)]
pub struct AugmentationRule {
    /// Lower fires first.
    pub priority: i64,
    /// Position in the rulebook file; breaks priority ties.
    pub ordinal: usize,
    pub pattern: regex::Regex,
    /// Free-form tag such as `question`, `praise`, `suggestion`.
    pub intent: String,
    pub glyph: String,
}

impl AugmentationRule {
    /// Stable identifier used in provenance columns.
    pub fn id(&self) -> String {
        format!("rule:{}", self.ordinal)
    }
}

/// Rules sorted by `(priority, ordinal)`; immutable after load.
#[derive(Debug, Clone, Default)]
pub struct Rulebook {
    rules: Vec<AugmentationRule>,
}

impl Rulebook {
    /// Load from CSV `priority,pattern,intent,glyph`. Patterns are regexes
    /// compiled case-insensitive; literal commas must be escaped `,`.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rules = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.splitn(4, ',').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    "expected `priority,pattern,intent,glyph`",
                ));
            }
            let priority: i64 = fields[0].trim().parse().map_err(|_| {
                Error::parse(path, idx + 1, format!("bad priority `{}`", fields[0]))
            })?;
            let raw_pattern = fields[1].replace("\\u002C", ",").replace("\\u002c", ",");
            let pattern = RegexBuilder::new(&raw_pattern)
                .case_insensitive(true)
                .build()
                .map_err(|e| Error::BadPattern {
                    pattern: raw_pattern.clone(),
                    source: e,
                })?;
            let glyph = fields[3].trim().to_string();
            if glyph.is_empty() {
                return Err(Error::parse(path, idx + 1, "empty glyph"));
            }
            rules.push(AugmentationRule {
                priority,
                ordinal: rules.len(),
                pattern,
                intent: fields[2].trim().to_string(),
                glyph,
            });
        }
        Ok(Self::from_rules(rules))
    }

    pub fn from_rules(mut rules: Vec<AugmentationRule>) -> Self {
        rules.sort_by_key(|r| (r.priority, r.ordinal));
        Rulebook { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[AugmentationRule] {
        &self.rules
    }
}

/// One suggested emoji with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    pub glyph: String,
    pub intent: String,
    pub rule_id: String,
}

/// First `top_n` distinct glyphs whose rules match the normalized text,
/// in rule order. Pure function of `(normalized text, rulebook)`.
pub fn suggest_emojis(nc: &NormalizedComment, rulebook: &Rulebook, top_n: usize) -> Vec<Suggestion> {
    let mut out: Vec<Suggestion> = Vec::new();
    for rule in &rulebook.rules {
        if out.len() >= top_n {
            break;
        }
        if out.iter().any(|s| s.glyph == rule.glyph) {
            continue;
        }
        if rule.pattern.is_match(&nc.normalized) {
            out.push(Suggestion {
                glyph: rule.glyph.clone(),
                intent: rule.intent.clone(),
                rule_id: rule.id(),
            });
        }
    }
    out
}

/// Append the top suggestion to each comment lacking emoji; comments that
/// already contain emoji stay untouched. Provenance records the rule id,
/// `original`, or `none`. Row count and labels are preserved.
pub fn augment_dataset(
    dataset: &Dataset,
    rulebook: &Rulebook,
    tables: &CodecTables,
    top_n: usize,
) -> Result<Dataset> {
    let mut records = Vec::with_capacity(dataset.records.len());
    for rec in &dataset.records {
        let nc = normalize_comment(&rec.text, tables);
        let mut out = rec.clone();
        if nc.has_emoji() {
            out.provenance = Some("original".to_string());
        } else {
            match suggest_emojis(&nc, rulebook, top_n).first() {
                Some(s) => {
                    out.text = format!("{} {}", rec.text, s.glyph);
                    out.provenance = Some(s.rule_id.clone());
                }
                None => out.provenance = Some("none".to_string()),
            }
        }
        records.push(out);
    }
    let name = format!("{}_plus", dataset.name());
    Dataset::from_records(&name, records, tables)
}

/// One annotator's emoji choice for one comment. An empty glyph means the
/// annotator chose no emoji, which is still a category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub comment_id: String,
    pub annotator_id: String,
    /// Empty string encodes NONE.
    pub glyph: String,
}

/// Load annotations from CSV `comment_id,annotator_id,glyph`.
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::parse(path, idx + 2, e.to_string()))?;
        if row.len() < 2 {
            return Err(Error::parse(
                path,
                idx + 2,
                "expected `comment_id,annotator_id,glyph`",
            ));
        }
        out.push(AnnotationRecord {
            comment_id: row.get(0).unwrap_or("").to_string(),
            annotator_id: row.get(1).unwrap_or("").to_string(),
            glyph: row.get(2).unwrap_or("").to_string(),
        });
    }
    Ok(out)
}

/// Chance-corrected agreement between two annotators.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub items: usize,
    /// `(comment_id, glyph_a, glyph_b)` for every disagreement.
    pub disagreements: Vec<(String, String, String)>,
}

/// Cohen's kappa over two annotation sets covering the same comments.
///
/// `p_o` is the fraction of comments with equal glyphs, `p_e` the chance
/// agreement from the two marginals, and `kappa = (p_o - p_e) / (1 - p_e)`.
pub fn cohen_kappa(a: &[AnnotationRecord], b: &[AnnotationRecord]) -> Result<AgreementReport> {
    let index = |records: &[AnnotationRecord], side: &str| -> Result<BTreeMap<String, String>> {
        let mut map = BTreeMap::new();
        for (row, rec) in records.iter().enumerate() {
            if map.insert(rec.comment_id.clone(), rec.glyph.clone()).is_some() {
                return Err(Error::DuplicateId {
                    id: format!("{side}:{}", rec.comment_id),
                    row: row + 1,
                });
            }
        }
        Ok(map)
    };
    let map_a = index(a, "a")?;
    let map_b = index(b, "b")?;
    if map_a.len() != map_b.len() || map_a.keys().ne(map_b.keys()) {
        let only_a: Vec<&String> = map_a.keys().filter(|k| !map_b.contains_key(*k)).collect();
        let only_b: Vec<&String> = map_b.keys().filter(|k| !map_a.contains_key(*k)).collect();
        return Err(Error::AnnotationMismatch(format!(
            "{} only in a, {} only in b",
            only_a.len(),
            only_b.len()
        )));
    }
    let n = map_a.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 annotated comments, got {n}"
        )));
    }

    let mut marg_a: HashMap<&str, usize> = HashMap::new();
    let mut marg_b: HashMap<&str, usize> = HashMap::new();
    let mut agree = 0usize;
    let mut disagreements = Vec::new();
    for (id, glyph_a) in &map_a {
        let glyph_b = &map_b[id];
        *marg_a.entry(glyph_a).or_insert(0) += 1;
        *marg_b.entry(glyph_b).or_insert(0) += 1;
        if glyph_a == glyph_b {
            agree += 1;
        } else {
            disagreements.push((id.clone(), glyph_a.clone(), glyph_b.clone()));
        }
    }
    let mut categories: Vec<&str> = marg_a.keys().chain(marg_b.keys()).copied().collect();
    categories.sort_unstable();
    categories.dedup();
    if categories.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 distinct categories across annotators".to_string(),
        ));
    }

    let nf = n as f64;
    let p_o = agree as f64 / nf;
    let p_e: f64 = categories
        .iter()
        .map(|c| {
            let pa = *marg_a.get(c).unwrap_or(&0) as f64 / nf;
            let pb = *marg_b.get(c).unwrap_or(&0) as f64 / nf;
            pa * pb
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-12 {
        return Err(Error::DegenerateAgreement);
    }
    Ok(AgreementReport {
        kappa: (p_o - p_e) / (1.0 - p_e),
        observed_agreement: p_o,
        expected_agreement: p_e,
        items: n,
        disagreements,
    })
}

/// Per-glyph occurrence counts across a dataset, descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiStats {
    pub dataset: String,
    pub size: usize,
    pub comments_with_emoji: usize,
    /// `(glyph, occurrences)` sorted by count descending, then glyph.
    pub counts: Vec<(String, usize)>,
}

impl EmojiStats {
    /// Cells rendered `glyph(count)` joined with commas.
    pub fn render_cells(&self) -> String {
        self.counts
            .iter()
            .map(|(g, c)| format!("{g}({c})"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Count emoji occurrences (not comments) per glyph across the dataset.
pub fn dataset_emoji_stats(dataset: &Dataset, tables: &CodecTables) -> EmojiStats {
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut comments_with_emoji = 0usize;
    for rec in &dataset.records {
        let nc = normalize_comment(&rec.text, tables);
        if nc.has_emoji() {
            comments_with_emoji += 1;
        }
        for tok in nc.emoji_tokens() {
            *counts.entry(tok.glyph.clone()).or_insert(0) += 1;
        }
    }
    let mut counts: Vec<(String, usize)> = counts.into_iter().collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    EmojiStats {
        dataset: dataset.name().to_string(),
        size: dataset.len(),
        comments_with_emoji,
        counts,
    }
}
