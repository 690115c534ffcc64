//! Verbal and non-verbal sentiment scoring.
//!
//! Five channels are computed per comment:
//!
//! * `g_t`  — general text sentiment of the emoji-stripped text
//! * `cr_t` — text sentiment with code-review domain overrides applied
//! * `g_e`  — aggregated general emoji sentiment
//! * `cr_e` — aggregated code-review emoji sentiment
//! * `g_te` — combined text+emoji sentiment from one shared pipeline
//!
//! Text scoring is rule-based: lexicon valences with a negation window and
//! intensifier adjustment, with the raw sum mapped through
//! `s / sqrt(s^2 + alpha)`. All constants live in [`ScoringConfig`].

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::codec::{EmojiToken, NormalizedComment};
use crate::error::{Error, Result};
use crate::tokenize::word_tokens;

/// Rule constants for the text scorer. Values are configuration, not code.
#[derive(Debug, Clone)]
pub struct ScoringConfig {
    /// How many preceding tokens are searched for a negator.
    pub negation_window: usize,
    /// Factor applied to a hit when a negator precedes it.
    pub negation_multiplier: f64,
    /// Normalization constant in `s / sqrt(s^2 + alpha)`.
    pub alpha: f64,
    /// Scale mapping emoji table scores into the lexicon valence band.
    pub emoji_valence_scale: f64,
    /// Aggregation for per-comment emoji scores.
    pub emoji_aggregate: AggregateOp,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            negation_window: 3,
            negation_multiplier: -0.74,
            alpha: 15.0,
            emoji_valence_scale: 4.0,
            emoji_aggregate: AggregateOp::Sum,
        }
    }
}

/// Sum keeps count information; mean is available behind the flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateOp {
    Sum,
    Mean,
}

/// A per-comment polarity score, finite and inside `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentScore(pub f64);

/// Word valence lexicon with negators, intensifiers, and optional
/// domain overrides that win over base entries.
#[derive(Debug, Clone, Default)]
pub struct ValenceLexicon {
    entries: HashMap<String, f64>,
    negators: HashSet<String>,
    intensifiers: HashMap<String, f64>,
    domain_overrides: HashMap<String, f64>,
}

impl ValenceLexicon {
    /// Load base valences (`term,valence`), negators (`term`), and
    /// intensifiers (`term[,multiplier]`).
    pub fn load(entries: &Path, negators: &Path, intensifiers: &Path) -> Result<Self> {
        let mut lex = ValenceLexicon::default();
        for (line_no, line) in read_data_lines(entries)? {
            let (term, valence) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(entries, line_no, "expected `term,valence`"))?;
            let v: f64 = valence.trim().parse().map_err(|_| {
                Error::parse(entries, line_no, format!("bad valence `{valence}`"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(entries, line_no, "valence must be finite"));
            }
            lex.entries.insert(term.trim().to_lowercase(), v);
        }
        for (_line_no, line) in read_data_lines(negators)? {
            let term = line.split(',').next().unwrap_or("").trim().to_lowercase();
            if !term.is_empty() {
                lex.negators.insert(term);
            }
        }
        for (line_no, line) in read_data_lines(intensifiers)? {
            let mut parts = line.splitn(2, ',');
            let term = parts.next().unwrap_or("").trim().to_lowercase();
            if term.is_empty() {
                continue;
            }
            let mult = match parts.next() {
                Some(m) if !m.trim().is_empty() => m.trim().parse::<f64>().map_err(|_| {
                    Error::parse(intensifiers, line_no, format!("bad multiplier `{m}`"))
                })?,
                _ => DEFAULT_INTENSIFIER,
            };
            if !(mult.is_finite() && mult > 0.0) {
                return Err(Error::parse(intensifiers, line_no, "multiplier must be positive"));
            }
            lex.intensifiers.insert(term, mult);
        }
        Ok(lex)
    }

    /// Overlay domain overrides (`term,valence`) on a copy of this lexicon.
    pub fn with_overrides_from(&self, path: &Path) -> Result<Self> {
        let mut lex = self.clone();
        for (line_no, line) in read_data_lines(path)? {
            let (term, valence) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(path, line_no, "expected `term,valence`"))?;
            let v: f64 = valence
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("bad valence `{valence}`")))?;
            if !v.is_finite() {
                return Err(Error::parse(path, line_no, "valence must be finite"));
            }
            lex.domain_overrides.insert(term.trim().to_lowercase(), v);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, term: &str, valence: f64) {
        self.entries.insert(term.to_lowercase(), valence);
    }

    pub fn insert_negator(&mut self, term: &str) {
        self.negators.insert(term.to_lowercase());
    }

    pub fn insert_intensifier(&mut self, term: &str, multiplier: f64) {
        self.intensifiers.insert(term.to_lowercase(), multiplier);
    }

    pub fn insert_override(&mut self, term: &str, valence: f64) {
        self.domain_overrides.insert(term.to_lowercase(), valence);
    }

    /// Overrides win over base entries.
    fn valence(&self, term: &str) -> Option<f64> {
        self.domain_overrides
            .get(term)
            .or_else(|| self.entries.get(term))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

const DEFAULT_INTENSIFIER: f64 = 1.15;

/// Which emoji sentiment table this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    General,
    CodeReview,
}

/// Occurrence counts behind a general-table score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccurrenceCounts {
    pub occurrences: u64,
    pub negative: u64,
    pub neutral: u64,
    pub positive: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmojiSentimentEntry {
    pub score: f64,
    /// Present for general-table entries only.
    pub counts: Option<OccurrenceCounts>,
}

/// Per-glyph sentiment scores.
#[derive(Debug, Clone)]
pub struct EmojiSentimentTable {
    pub kind: TableKind,
    entries: HashMap<String, EmojiSentimentEntry>,
}

impl EmojiSentimentTable {
    /// Load the general table: `glyph,occurrences,negative,neutral,positive,score`.
    ///
    /// The score is recomputed as `(positive - negative) / occurrences`; a
    /// score column, when present, must agree within 1e-9.
    pub fn load_general(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        for (line_no, line) in read_data_lines(path)? {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 5 {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected `glyph,occurrences,negative,neutral,positive[,score]`",
                ));
            }
            let glyph = fields[0].to_string();
            let nums: Vec<u64> = fields[1..5]
                .iter()
                .map(|f| f.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(path, line_no, "counts must be nonnegative integers"))?;
            let (occ, neg, neu, pos) = (nums[0], nums[1], nums[2], nums[3]);
            if occ == 0 {
                return Err(Error::parse(path, line_no, "occurrences must be positive"));
            }
            if neg + neu + pos != occ {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("counts {neg}+{neu}+{pos} do not sum to occurrences {occ}"),
                ));
            }
            let score = (pos as f64 - neg as f64) / occ as f64;
            if let Some(stated) = fields.get(5).filter(|s| !s.is_empty()) {
                let stated: f64 = stated
                    .parse()
                    .map_err(|_| Error::parse(path, line_no, "bad score"))?;
                if (stated - score).abs() > 1e-9 {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("stated score {stated} disagrees with computed {score}"),
                    ));
                }
            }
            entries.insert(
                glyph,
                EmojiSentimentEntry {
                    score,
                    counts: Some(OccurrenceCounts {
                        occurrences: occ,
                        negative: neg,
                        neutral: neu,
                        positive: pos,
                    }),
                },
            );
        }
        Ok(EmojiSentimentTable {
            kind: TableKind::General,
            entries,
        })
    }

    /// Load the code-review table: `glyph,score`.
    pub fn load_code_review(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        for (line_no, line) in read_data_lines(path)? {
            let (glyph, score) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(path, line_no, "expected `glyph,score`"))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, line_no, "bad score"))?;
            if !(score.is_finite() && (-1.0..=1.0).contains(&score)) {
                return Err(Error::parse(path, line_no, "score must be in [-1, 1]"));
            }
            entries.insert(
                glyph.trim().to_string(),
                EmojiSentimentEntry { score, counts: None },
            );
        }
        Ok(EmojiSentimentTable {
            kind: TableKind::CodeReview,
            entries,
        })
    }

    pub fn from_scores(kind: TableKind, scores: &[(&str, f64)]) -> Self {
        let entries = scores
            .iter()
            .map(|(g, s)| {
                (
                    g.to_string(),
                    EmojiSentimentEntry {
                        score: *s,
                        counts: None,
                    },
                )
            })
            .collect();
        EmojiSentimentTable { kind, entries }
    }

    /// Exact glyph match, then a retry with variation selectors stripped
    /// so `U+270F U+FE0F` and `U+270F` resolve to the same entry.
    pub fn score(&self, glyph: &str) -> Option<f64> {
        if let Some(e) = self.entries.get(glyph) {
            return Some(e.score);
        }
        let bare = strip_variation_selectors(glyph);
        if bare != glyph {
            return self.entries.get(&bare).map(|e| e.score);
        }
        None
    }

    pub fn entry(&self, glyph: &str) -> Option<&EmojiSentimentEntry> {
        self.entries.get(glyph)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn strip_variation_selectors(glyph: &str) -> String {
    glyph
        .chars()
        .filter(|c| !matches!(c, '\u{FE0E}' | '\u{FE0F}'))
        .collect()
}

/// The five per-comment sentiment channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentChannels {
    pub g_t: f64,
    pub cr_t: f64,
    /// Unclipped aggregate over the general emoji table.
    pub g_e: f64,
    /// Unclipped aggregate over the code-review emoji table.
    pub cr_e: f64,
    pub g_te: f64,
    /// Tokens without a general-table entry.
    pub unmatched_emoji_count: usize,
}

/// Everything `compute_channels` needs, immutable after load.
#[derive(Debug, Clone)]
pub struct SentimentResources {
    pub general_lexicon: ValenceLexicon,
    /// General lexicon with code-review overrides applied.
    pub cr_lexicon: ValenceLexicon,
    pub general_emoji: EmojiSentimentTable,
    pub cr_emoji: EmojiSentimentTable,
    pub config: ScoringConfig,
}

/// Score emoji-stripped text against a lexicon.
///
/// Tokens are lowercased Unicode words. A hit's valence is multiplied by
/// the intensifier factor of an immediately preceding intensifier and by
/// the negation multiplier when any token in the negation window before it
/// is a negator. The raw sum `s` maps to `s / sqrt(s^2 + alpha)`.
pub fn score_text(text: &str, lexicon: &ValenceLexicon, config: &ScoringConfig) -> SentimentScore {
    let stream: Vec<StreamToken> = word_tokens(text).into_iter().map(StreamToken::Word).collect();
    score_stream(&stream, lexicon, None, config)
}

/// Sum (or mean) of table scores over tokens with entries, plus the count
/// of tokens without one. Duplicates count per occurrence.
pub fn aggregate_emoji_sentiment(
    tokens: &[EmojiToken],
    table: &EmojiSentimentTable,
    op: AggregateOp,
) -> (f64, usize) {
    let mut sum = 0.0;
    let mut matched = 0usize;
    let mut unmatched = 0usize;
    for tok in tokens {
        match table.score(&tok.glyph) {
            Some(s) => {
                sum += s;
                matched += 1;
            }
            None => unmatched += 1,
        }
    }
    let score = match op {
        AggregateOp::Sum => sum,
        AggregateOp::Mean => {
            if matched == 0 {
                0.0
            } else {
                sum / matched as f64
            }
        }
    };
    (score, unmatched)
}

/// Text scorer with emoji glyphs participating as lexicon hits at
/// `emoji_valence_scale` times their general-table score.
pub fn score_combined(
    nc: &NormalizedComment,
    lexicon: &ValenceLexicon,
    general_emoji: &EmojiSentimentTable,
    config: &ScoringConfig,
) -> SentimentScore {
    let stream = mixed_stream(nc);
    score_stream(&stream, lexicon, Some(general_emoji), config)
}

/// All five channels for one normalized comment.
pub fn compute_channels(nc: &NormalizedComment, res: &SentimentResources) -> SentimentChannels {
    let stripped = nc.stripped();
    let g_t = score_text(stripped, &res.general_lexicon, &res.config).0;
    let cr_t = score_text(stripped, &res.cr_lexicon, &res.config).0;
    let (g_e, unmatched) =
        aggregate_emoji_sentiment(nc.emoji_tokens(), &res.general_emoji, res.config.emoji_aggregate);
    let (cr_e, _) =
        aggregate_emoji_sentiment(nc.emoji_tokens(), &res.cr_emoji, res.config.emoji_aggregate);
    let g_te = score_combined(nc, &res.general_lexicon, &res.general_emoji, &res.config).0;
    SentimentChannels {
        g_t,
        cr_t,
        g_e,
        cr_e,
        g_te,
        unmatched_emoji_count: unmatched,
    }
}

enum StreamToken {
    Word(String),
    Emoji(String),
}

/// Words of the inter-token segments interleaved with emoji glyphs, in
/// document order. Emoji occupy stream positions, so they take part in the
/// negation window like any other token.
fn mixed_stream(nc: &NormalizedComment) -> Vec<StreamToken> {
    let original = nc.original.as_str();
    let mut stream = Vec::new();
    let mut cursor = 0usize;
    for tok in nc.emoji_tokens() {
        for w in word_tokens(&original[cursor..tok.span.start]) {
            stream.push(StreamToken::Word(w));
        }
        stream.push(StreamToken::Emoji(tok.glyph.clone()));
        cursor = tok.span.end;
    }
    for w in word_tokens(&original[cursor..]) {
        stream.push(StreamToken::Word(w));
    }
    stream
}

fn score_stream(
    stream: &[StreamToken],
    lexicon: &ValenceLexicon,
    emoji_table: Option<&EmojiSentimentTable>,
    config: &ScoringConfig,
) -> SentimentScore {
    let mut sum = 0.0f64;
    for (idx, tok) in stream.iter().enumerate() {
        let base = match tok {
            StreamToken::Word(w) => lexicon.valence(w),
            StreamToken::Emoji(g) => emoji_table
                .and_then(|t| t.score(g))
                .map(|s| s * config.emoji_valence_scale),
        };
        let Some(mut v) = base else { continue };
        if idx > 0 {
            if let StreamToken::Word(prev) = &stream[idx - 1] {
                if let Some(mult) = lexicon.intensifiers.get(prev) {
                    v *= mult;
                }
            }
            let window_start = idx.saturating_sub(config.negation_window);
            let negated = stream[window_start..idx].iter().any(|t| match t {
                StreamToken::Word(w) => lexicon.negators.contains(w),
                StreamToken::Emoji(_) => false,
            });
            if negated {
                v *= config.negation_multiplier;
            }
        }
        sum += v;
    }
    let score = sum / (sum * sum + config.alpha).sqrt();
    SentimentScore(score.clamp(-1.0, 1.0))
}

fn read_data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if idx == 0 || line.trim().is_empty() {
            continue; // header or blank
        }
        out.push((idx + 1, line));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// correlation
// ---------------------------------------------------------------------------

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 2 observations, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "zero variance in a series".to_string(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Channel names reported by the correlation matrix, in output order.
pub const CHANNEL_NAMES: [&str; 7] = [
    "G_T", "CR_T", "G_E", "CR_E", "G_TE", "G_T+G_E", "CR_T+CR_E",
];

/// One comment's channels plus its labels, ready for correlation.
#[derive(Debug, Clone)]
pub struct ChannelRow {
    pub channels: SentimentChannels,
    /// Usefulness label as a real (1 useful, 0 not).
    pub usefulness: f64,
    /// Sentiment label as a real (-1, 0, 1) when annotated.
    pub sentiment: Option<f64>,
    pub has_emoji: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationTarget {
    Sentiment,
    Usefulness,
}

impl CorrelationTarget {
    pub fn name(self) -> &'static str {
        match self {
            CorrelationTarget::Sentiment => "sentiment",
            CorrelationTarget::Usefulness => "usefulness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetKind {
    All,
    EmojiOnly,
}

impl SubsetKind {
    pub fn name(self) -> &'static str {
        match self {
            SubsetKind::All => "all",
            SubsetKind::EmojiOnly => "emoji_only",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationCell {
    pub channel: &'static str,
    pub target: CorrelationTarget,
    pub subset: SubsetKind,
    /// `None` marks an undefined correlation (too few rows or zero variance).
    pub rho: Option<f64>,
    pub n: usize,
}

/// Channel-by-target correlation matrix over a dataset and its emoji-only
/// subset.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub cells: Vec<CorrelationCell>,
    /// True when sentiment labels were absent and only usefulness columns
    /// were produced.
    pub usefulness_only: bool,
}

fn channel_value(c: &SentimentChannels, name: &str) -> f64 {
    match name {
        "G_T" => c.g_t,
        "CR_T" => c.cr_t,
        "G_E" => c.g_e,
        "CR_E" => c.cr_e,
        "G_TE" => c.g_te,
        "G_T+G_E" => c.g_t + c.g_e,
        "CR_T+CR_E" => c.cr_t + c.cr_e,
        _ => unreachable!("unknown channel {name}"),
    }
}

/// Correlate every channel with sentiment and usefulness over the full
/// dataset and the emoji-only subset. Sentiment columns are produced only
/// when every row carries a sentiment label.
pub fn correlation_report(rows: &[ChannelRow]) -> CorrelationMatrix {
    let sentiment_available = !rows.is_empty() && rows.iter().all(|r| r.sentiment.is_some());
    let mut targets = Vec::new();
    if sentiment_available {
        targets.push(CorrelationTarget::Sentiment);
    }
    targets.push(CorrelationTarget::Usefulness);

    let mut cells = Vec::new();
    for &channel in CHANNEL_NAMES.iter() {
        for &target in &targets {
            for subset in [SubsetKind::All, SubsetKind::EmojiOnly] {
                let selected: Vec<&ChannelRow> = rows
                    .iter()
                    .filter(|r| subset == SubsetKind::All || r.has_emoji)
                    .collect();
                let xs: Vec<f64> = selected
                    .iter()
                    .map(|r| channel_value(&r.channels, channel))
                    .collect();
                let ys: Vec<f64> = selected
                    .iter()
                    .map(|r| match target {
                        CorrelationTarget::Sentiment => r.sentiment.unwrap_or(0.0),
                        CorrelationTarget::Usefulness => r.usefulness,
                    })
                    .collect();
                let rho = pearson(&xs, &ys).ok();
                cells.push(CorrelationCell {
                    channel,
                    target,
                    subset,
                    rho,
                    n: selected.len(),
                });
            }
        }
    }
    CorrelationMatrix {
        cells,
        usefulness_only: !sentiment_available,
    }
}

impl CorrelationMatrix {
    /// Rows as `channel,target,subset,rho,n` with `rho` empty when
    /// undefined.
    pub fn csv_rows(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|c| {
                let rho = c.rho.map(|r| format!("{:.6}", r)).unwrap_or_default();
                format!(
                    "{},{},{},{},{}",
                    c.channel,
                    c.target.name(),
                    c.subset.name(),
                    rho,
                    c.n
                )
            })
            .collect()
    }

    pub fn cell(&self, channel: &str, target: CorrelationTarget, subset: SubsetKind) -> Option<&CorrelationCell> {
        self.cells
            .iter()
            .find(|c| c.channel == channel && c.target == target && c.subset == subset)
    }
}
