//! Emoji extraction and normalization.
//!
//! Recognizes four emoji representations in comment text — Unicode glyphs,
//! `:shortcode:` aliases, ASCII emoticons, and codepoint notation like
//! `U+1F60A` (the variant `+U1F60A` is accepted too) — and rewrites them
//! all to canonical Unicode emoji while recording where each one came from.
//!
//! Glyph detection is driven by a configurable codepoint range table, and a
//! multi-codepoint sequence (skin tones, ZWJ families, flags) is always one
//! token: one visual emoji, one cue.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::ops::Range;
use std::path::Path;

use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};

/// How an emoji was written in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmojiForm {
    UnicodeGlyph,
    Shortcode,
    Emoticon,
    CodepointNotation,
}

/// One normalized emoji occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiToken {
    /// Canonical Unicode emoji sequence, one extended grapheme cluster.
    pub glyph: String,
    pub source_form: EmojiForm,
    /// Half-open byte range in the *original* text.
    pub span: Range<usize>,
    /// Exact original substring, equal to `original[span]`.
    pub source_text: String,
}

/// A comment after emoji normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedComment {
    pub original: String,
    /// Original text with every recognized form replaced by its glyph.
    pub normalized: String,
    tokens: Vec<EmojiToken>,
    /// Normalized text with emoji removed and whitespace collapsed.
    stripped: String,
}

impl NormalizedComment {
    /// Emoji tokens in document order, duplicates preserved.
    pub fn emoji_tokens(&self) -> &[EmojiToken] {
        &self.tokens
    }

    /// Emoji-free text: each token replaced by a space, whitespace runs
    /// collapsed to one space, ends trimmed.
    pub fn stripped(&self) -> &str {
        &self.stripped
    }

    pub fn has_emoji(&self) -> bool {
        !self.tokens.is_empty()
    }
}

/// Inclusive codepoint ranges that mark a scalar as emoji.
#[derive(Debug, Clone, Default)]
pub struct EmojiRanges {
    ranges: Vec<(u32, u32)>,
}

impl EmojiRanges {
    pub fn new(mut ranges: Vec<(u32, u32)>) -> Self {
        ranges.sort_unstable();
        // merge overlapping or touching ranges so lookup can binary-search
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(ranges.len());
        for (s, e) in ranges {
            match merged.last_mut() {
                Some((_, last_end)) if s <= last_end.saturating_add(1) => {
                    *last_end = (*last_end).max(e);
                }
                _ => merged.push((s, e)),
            }
        }
        EmojiRanges { ranges: merged }
    }

    /// Load from CSV with header `start_hex,end_hex`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut ranges = Vec::new();
        for (line_no, line) in read_lines(path)?.into_iter().enumerate() {
            if line_no == 0 || line.trim().is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(path, line_no + 1, "expected `start_hex,end_hex`"))?;
            let start = parse_hex(a.trim())
                .ok_or_else(|| Error::parse(path, line_no + 1, format!("bad hex `{a}`")))?;
            let end = parse_hex(b.trim())
                .ok_or_else(|| Error::parse(path, line_no + 1, format!("bad hex `{b}`")))?;
            if start > end {
                return Err(Error::parse(path, line_no + 1, "start above end"));
            }
            ranges.push((start, end));
        }
        Ok(Self::new(ranges))
    }

    pub fn contains(&self, c: char) -> bool {
        let cp = c as u32;
        self.ranges
            .binary_search_by(|&(s, e)| {
                if cp < s {
                    std::cmp::Ordering::Greater
                } else if cp > e {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn contains_any(&self, s: &str) -> bool {
        s.chars().any(|c| self.contains(c))
    }
}

/// Emoticon and shortcode maps plus the glyph detection ranges.
///
/// Immutable after load; safe to share across threads.
#[derive(Debug, Clone)]
pub struct CodecTables {
    emoticons: HashMap<String, String>,
    shortcodes: HashMap<String, String>,
    ranges: EmojiRanges,
    /// Characters that occur in any emoticon; used for boundary checks.
    emoticon_chars: Vec<char>,
    /// Emoticons sorted longest-first for greedy matching.
    emoticon_order: Vec<String>,
}

impl CodecTables {
    /// Load the emoticon table (`emoticon,shortcode`), the shortcode table
    /// (`shortcode,glyph`), and the glyph range table (`start_hex,end_hex`).
    ///
    /// Every emoticon target must resolve in the shortcode table, and every
    /// glyph must be a single self-contained grapheme cluster.
    pub fn load(emoticon_path: &Path, shortcode_path: &Path, ranges_path: &Path) -> Result<Self> {
        let ranges = EmojiRanges::load(ranges_path)?;

        let mut shortcodes = HashMap::new();
        for (line_no, line) in read_lines(shortcode_path)?.into_iter().enumerate() {
            if line_no == 0 || line.trim().is_empty() {
                continue;
            }
            let (code, glyph) = line.split_once(',').ok_or_else(|| {
                Error::parse(shortcode_path, line_no + 1, "expected `shortcode,glyph`")
            })?;
            let code = unescape_commas(code.trim());
            let glyph = unescape_commas(glyph.trim());
            if code.is_empty() || glyph.is_empty() {
                return Err(Error::parse(
                    shortcode_path,
                    line_no + 1,
                    "empty shortcode or glyph",
                ));
            }
            if !glyph_is_isolated_cluster(&glyph) {
                return Err(Error::InvalidGlyph {
                    shortcode: code,
                    glyph,
                });
            }
            shortcodes.insert(code, glyph);
        }

        let mut emoticons = HashMap::new();
        for (line_no, line) in read_lines(emoticon_path)?.into_iter().enumerate() {
            if line_no == 0 || line.trim().is_empty() {
                continue;
            }
            let (emoticon, target) = line.split_once(',').ok_or_else(|| {
                Error::parse(emoticon_path, line_no + 1, "expected `emoticon,shortcode`")
            })?;
            let emoticon = unescape_commas(emoticon.trim());
            let target = unescape_commas(target.trim());
            if emoticon.is_empty() || target.is_empty() {
                return Err(Error::parse(
                    emoticon_path,
                    line_no + 1,
                    "empty emoticon or target",
                ));
            }
            if !shortcodes.contains_key(&target) {
                return Err(Error::DanglingEmoticon {
                    emoticon,
                    shortcode: target,
                });
            }
            emoticons.insert(emoticon, target);
        }

        Ok(Self::assemble(emoticons, shortcodes, ranges))
    }

    /// Build tables from in-memory maps; emoticon targets must resolve.
    pub fn from_maps(
        emoticons: HashMap<String, String>,
        shortcodes: HashMap<String, String>,
        ranges: EmojiRanges,
    ) -> Result<Self> {
        for (emoticon, target) in &emoticons {
            if !shortcodes.contains_key(target) {
                return Err(Error::DanglingEmoticon {
                    emoticon: emoticon.clone(),
                    shortcode: target.clone(),
                });
            }
        }
        for (code, glyph) in &shortcodes {
            if !glyph_is_isolated_cluster(glyph) {
                return Err(Error::InvalidGlyph {
                    shortcode: code.clone(),
                    glyph: glyph.clone(),
                });
            }
        }
        Ok(Self::assemble(emoticons, shortcodes, ranges))
    }

    fn assemble(
        emoticons: HashMap<String, String>,
        shortcodes: HashMap<String, String>,
        ranges: EmojiRanges,
    ) -> Self {
        let mut emoticon_chars: Vec<char> = emoticons.keys().flat_map(|e| e.chars()).collect();
        emoticon_chars.sort_unstable();
        emoticon_chars.dedup();
        let mut emoticon_order: Vec<String> = emoticons.keys().cloned().collect();
        // longest first, then lexicographic for determinism
        emoticon_order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        CodecTables {
            emoticons,
            shortcodes,
            ranges,
            emoticon_chars,
            emoticon_order,
        }
    }

    pub fn ranges(&self) -> &EmojiRanges {
        &self.ranges
    }

    /// Glyph for an emoticon, resolved through the shortcode table.
    pub fn lookup_emoticon(&self, emoticon: &str) -> Option<&str> {
        let target = self.emoticons.get(emoticon)?;
        self.shortcodes.get(target).map(String::as_str)
    }

    pub fn lookup_shortcode(&self, code: &str) -> Option<&str> {
        self.shortcodes.get(code).map(String::as_str)
    }

    pub fn emoticon_count(&self) -> usize {
        self.emoticons.len()
    }

    pub fn shortcode_count(&self) -> usize {
        self.shortcodes.len()
    }

    fn is_emoticon_char(&self, c: char) -> bool {
        self.emoticon_chars.binary_search(&c).is_ok()
    }
}

/// Normalize a comment: recognize all four emoji forms and substitute
/// canonical glyphs.
///
/// At one scan position the precedence is codepoint notation, then
/// shortcode, then emoticon, then Unicode glyph; longest match wins within
/// a form. Unrecognized shortcodes and emoticons stay verbatim. A
/// substitution is rejected when the glyph would fuse with neighboring
/// text into a larger grapheme cluster, which keeps normalization
/// idempotent on adversarial input.
pub fn normalize_comment(text: &str, tables: &CodecTables) -> NormalizedComment {
    let mut out = String::with_capacity(text.len());
    let mut tokens: Vec<EmojiToken> = Vec::new();
    // Spans of substituted glyphs inside `out`, for building `stripped`.
    let mut out_spans: Vec<Range<usize>> = Vec::new();
    // Byte offset in `out` where its last grapheme cluster starts.
    let mut last_cluster = 0usize;

    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];

        let mut matched: Option<(usize, String, EmojiForm)> = None;
        if let Some((len, glyph)) = match_codepoint(rest, &tables.ranges) {
            matched = Some((len, glyph, EmojiForm::CodepointNotation));
        }
        if matched.is_none() {
            if let Some((len, glyph)) = match_shortcode(rest, tables) {
                matched = Some((len, glyph, EmojiForm::Shortcode));
            }
        }
        if matched.is_none() {
            if let Some((len, glyph)) = match_emoticon(text, i, tables) {
                matched = Some((len, glyph, EmojiForm::Emoticon));
            }
        }

        if let Some((len, glyph, form)) = matched {
            // Seam checks: the glyph must stay its own cluster against the
            // output built so far and against the upcoming original text.
            if seam_before_ok(&out, last_cluster, &glyph) && seam_after_ok(&glyph, &text[i + len..])
            {
                let start = out.len();
                push_tracked(&mut out, &glyph, &mut last_cluster);
                out_spans.push(start..out.len());
                tokens.push(EmojiToken {
                    glyph,
                    source_form: form,
                    span: i..i + len,
                    source_text: text[i..i + len].to_string(),
                });
                i += len;
                continue;
            }
        }

        // Unicode glyph: first grapheme cluster of the remainder.
        let cluster = rest.graphemes(true).next().unwrap_or(rest);
        if !cluster.is_empty() && tables.ranges.contains_any(cluster) {
            let start = out.len();
            push_tracked(&mut out, cluster, &mut last_cluster);
            out_spans.push(start..out.len());
            tokens.push(EmojiToken {
                glyph: cluster.to_string(),
                source_form: EmojiForm::UnicodeGlyph,
                span: i..i + cluster.len(),
                source_text: cluster.to_string(),
            });
            i += cluster.len();
            continue;
        }

        // Verbatim: copy one char.
        let ch = rest.chars().next().expect("loop bound keeps i in range");
        push_tracked_char(&mut out, ch, &mut last_cluster);
        i += ch.len_utf8();
    }

    let stripped = build_stripped(&out, &out_spans);
    NormalizedComment {
        original: text.to_string(),
        normalized: out,
        tokens,
        stripped,
    }
}

/// Tokens of a normalized comment, document order, duplicates preserved.
pub fn extract_emojis(nc: &NormalizedComment) -> &[EmojiToken] {
    nc.emoji_tokens()
}

/// Emoji-free text of a normalized comment.
pub fn strip_emojis(nc: &NormalizedComment) -> &str {
    nc.stripped()
}

// ---------------------------------------------------------------------------
// form matchers
// ---------------------------------------------------------------------------

/// `U+1F60A`, `+U1F60A`, or `+U+1F60A`, case-insensitive, 4-6 hex digits.
/// Only converts when the scalar is valid and inside the configured emoji
/// ranges; anything else stays verbatim.
fn match_codepoint(rest: &str, ranges: &EmojiRanges) -> Option<(usize, String)> {
    let bytes = rest.as_bytes();
    let mut pos = 0;
    let lead_plus = bytes.first() == Some(&b'+');
    if lead_plus {
        pos += 1;
    }
    if !matches!(bytes.get(pos), Some(b'U') | Some(b'u')) {
        return None;
    }
    pos += 1;
    let mid_plus = bytes.get(pos) == Some(&b'+');
    if mid_plus {
        pos += 1;
    }
    if !lead_plus && !mid_plus {
        return None; // bare `U1F60A` is an identifier, not notation
    }
    let hex_start = pos;
    while pos < bytes.len() && pos - hex_start < 6 && bytes[pos].is_ascii_hexdigit() {
        pos += 1;
    }
    let digits = pos - hex_start;
    if !(4..=6).contains(&digits) {
        return None;
    }
    if bytes.get(pos).is_some_and(|b| b.is_ascii_hexdigit()) {
        return None; // longer hex run, likely a hash
    }
    let value = u32::from_str_radix(&rest[hex_start..pos], 16).ok()?;
    let c = char::from_u32(value)?;
    if !ranges.contains(c) {
        return None;
    }
    Some((pos, c.to_string()))
}

/// `:alias:` where `alias` resolves in the shortcode table.
fn match_shortcode(rest: &str, tables: &CodecTables) -> Option<(usize, String)> {
    let bytes = rest.as_bytes();
    if bytes.first() != Some(&b':') {
        return None;
    }
    let mut pos = 1;
    while pos < bytes.len()
        && (bytes[pos].is_ascii_alphanumeric() || matches!(bytes[pos], b'_' | b'+' | b'-'))
    {
        pos += 1;
    }
    if pos == 1 || bytes.get(pos) != Some(&b':') {
        return None;
    }
    let glyph = tables.lookup_shortcode(&rest[1..pos])?;
    Some((pos + 1, glyph.to_string()))
}

/// Longest emoticon at `i`, required to sit at a token boundary: preceded
/// and followed by whitespace, the string edge, or punctuation that is not
/// itself an emoticon character. This keeps code like `(a):b` intact.
fn match_emoticon(text: &str, i: usize, tables: &CodecTables) -> Option<(usize, String)> {
    let rest = &text[i..];
    let before_ok = match text[..i].chars().next_back() {
        None => true,
        Some(c) => c.is_whitespace() || (!c.is_alphanumeric() && !tables.is_emoticon_char(c)),
    };
    if !before_ok {
        return None;
    }
    for emoticon in &tables.emoticon_order {
        if !rest.starts_with(emoticon.as_str()) {
            continue;
        }
        let after_ok = match rest[emoticon.len()..].chars().next() {
            None => true,
            Some(c) => c.is_whitespace() || (!c.is_alphanumeric() && !tables.is_emoticon_char(c)),
        };
        if !after_ok {
            continue;
        }
        let glyph = tables.lookup_emoticon(emoticon)?;
        return Some((emoticon.len(), glyph.to_string()));
    }
    None
}

// ---------------------------------------------------------------------------
// grapheme seam handling
// ---------------------------------------------------------------------------

/// True when `glyph` starts a fresh cluster after the output built so far.
fn seam_before_ok(out: &str, last_cluster: usize, glyph: &str) -> bool {
    if out.is_empty() {
        return true;
    }
    let prev = &out[last_cluster..];
    let probe: String = [prev, glyph].concat();
    has_boundary_at(&probe, prev.len())
}

/// True when `glyph` is still a closed cluster with `following` appended.
fn seam_after_ok(glyph: &str, following: &str) -> bool {
    let tail: String = following.chars().take(2).collect();
    if tail.is_empty() {
        return true;
    }
    let probe: String = [glyph, &tail].concat();
    has_boundary_at(&probe, glyph.len())
}

fn has_boundary_at(s: &str, at: usize) -> bool {
    if at == 0 || at == s.len() {
        return true;
    }
    s.grapheme_indices(true).any(|(i, _)| i == at)
}

/// A table glyph must be one cluster and must not fuse with an adjacent
/// letter, pictographic emoji, or regional indicator.
fn glyph_is_isolated_cluster(glyph: &str) -> bool {
    if glyph.is_empty() || glyph.graphemes(true).count() != 1 {
        return false;
    }
    for neighbor in ["a", "\u{1F44D}", "\u{1F1E6}"] {
        let lead: String = [neighbor, glyph].concat();
        if !has_boundary_at(&lead, neighbor.len()) {
            return false;
        }
        let trail: String = [glyph, neighbor].concat();
        if !has_boundary_at(&trail, glyph.len()) {
            return false;
        }
    }
    true
}

fn push_tracked(out: &mut String, addition: &str, last_cluster: &mut usize) {
    let base = *last_cluster;
    out.push_str(addition);
    retrack(out, base, last_cluster);
}

fn push_tracked_char(out: &mut String, c: char, last_cluster: &mut usize) {
    let base = *last_cluster;
    out.push(c);
    retrack(out, base, last_cluster);
}

fn retrack(out: &str, base: usize, last_cluster: &mut usize) {
    let rel = out[base..]
        .grapheme_indices(true)
        .last()
        .map(|(i, _)| i)
        .unwrap_or(0);
    *last_cluster = base + rel;
}

/// Replace glyph spans with spaces, collapse whitespace runs, trim.
fn build_stripped(normalized: &str, glyph_spans: &[Range<usize>]) -> String {
    let mut with_gaps = String::with_capacity(normalized.len());
    let mut cursor = 0;
    for span in glyph_spans {
        with_gaps.push_str(&normalized[cursor..span.start]);
        with_gaps.push(' ');
        cursor = span.end;
    }
    with_gaps.push_str(&normalized[cursor..]);

    let mut collapsed = String::with_capacity(with_gaps.len());
    let mut in_ws = false;
    for c in with_gaps.chars() {
        if c.is_whitespace() {
            in_ws = true;
        } else {
            if in_ws && !collapsed.is_empty() {
                collapsed.push(' ');
            }
            in_ws = false;
            collapsed.push(c);
        }
    }
    collapsed
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

fn parse_hex(s: &str) -> Option<u32> {
    let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    u32::from_str_radix(s, 16).ok()
}

fn unescape_commas(s: &str) -> String {
    s.replace("\\u002C", ",").replace("\\u002c", ",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_tables() -> CodecTables {
        let mut shortcodes = HashMap::new();
        shortcodes.insert("smile".to_string(), "\u{1F60A}".to_string());
        shortcodes.insert("thumbsup".to_string(), "\u{1F44D}".to_string());
        shortcodes.insert(
            "slightly_smiling_face".to_string(),
            "\u{1F642}".to_string(),
        );
        let mut emoticons = HashMap::new();
        emoticons.insert(":)".to_string(), "slightly_smiling_face".to_string());
        emoticons.insert(":-)".to_string(), "slightly_smiling_face".to_string());
        let ranges = EmojiRanges::new(vec![
            (0x2600, 0x27BF),
            (0x1F1E6, 0x1F1FF),
            (0x1F300, 0x1FAFF),
        ]);
        CodecTables::from_maps(emoticons, shortcodes, ranges).unwrap()
    }

    #[test]
    fn codepoint_notation_both_forms() {
        let t = test_tables();
        let nc = normalize_comment("nice +U1F60A", &t);
        assert_eq!(nc.normalized, "nice \u{1F60A}");
        assert_eq!(nc.emoji_tokens().len(), 1);
        assert_eq!(nc.emoji_tokens()[0].source_form, EmojiForm::CodepointNotation);
        assert_eq!(nc.emoji_tokens()[0].source_text, "+U1F60A");

        let nc = normalize_comment("ok U+1F60A done", &t);
        assert_eq!(nc.normalized, "ok \u{1F60A} done");
        let nc = normalize_comment("ok u+1f60a done", &t);
        assert_eq!(nc.normalized, "ok \u{1F60A} done");
    }

    #[test]
    fn codepoint_notation_outside_ranges_stays_verbatim() {
        let t = test_tables();
        let nc = normalize_comment("escape U+0041 please", &t);
        assert_eq!(nc.normalized, "escape U+0041 please");
        assert!(nc.emoji_tokens().is_empty());
    }

    #[test]
    fn bare_u_prefix_is_not_notation() {
        let t = test_tables();
        let nc = normalize_comment("var U1F60A here", &t);
        assert_eq!(nc.normalized, "var U1F60A here");
        // seven hex digits reads as a hash, not notation
        let nc = normalize_comment("U+1F60A1", &t);
        assert!(nc.emoji_tokens().is_empty());
    }

    #[test]
    fn empty_text_is_empty_comment() {
        let t = test_tables();
        let nc = normalize_comment("", &t);
        assert_eq!(nc.normalized, "");
        assert_eq!(nc.stripped(), "");
        assert!(nc.emoji_tokens().is_empty());
    }

    #[test]
    fn shortcode_twice_yields_two_tokens() {
        let t = test_tables();
        let nc = normalize_comment(":smile: twice :smile:", &t);
        assert_eq!(nc.normalized, "\u{1F60A} twice \u{1F60A}");
        assert_eq!(nc.emoji_tokens().len(), 2);
        assert!(nc
            .emoji_tokens()
            .iter()
            .all(|tok| tok.source_form == EmojiForm::Shortcode && tok.glyph == "\u{1F60A}"));
    }

    #[test]
    fn unknown_shortcode_left_verbatim() {
        let t = test_tables();
        let nc = normalize_comment("try :does_not_exist: now", &t);
        assert_eq!(nc.normalized, "try :does_not_exist: now");
        assert!(nc.emoji_tokens().is_empty());
    }

    #[test]
    fn adjacent_glyphs_have_adjacent_spans() {
        let t = test_tables();
        let nc = normalize_comment("a \u{1F44D}\u{1F44D} b", &t);
        let toks = nc.emoji_tokens();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].source_form, EmojiForm::UnicodeGlyph);
        assert_eq!(toks[0].span.end, toks[1].span.start);
        assert_eq!(nc.stripped(), "a b");
    }

    #[test]
    fn emoticon_needs_token_boundary() {
        let t = test_tables();
        let nc = normalize_comment("fine :)", &t);
        assert_eq!(nc.normalized, "fine \u{1F642}");
        assert_eq!(nc.emoji_tokens()[0].source_form, EmojiForm::Emoticon);

        // `(a):b` must not be corrupted: `:` preceded by `a`.
        let nc = normalize_comment("(a):b", &t);
        assert_eq!(nc.normalized, "(a):b");
        // `https://x` is code, not an emoticon context.
        let nc = normalize_comment("https://x", &t);
        assert_eq!(nc.normalized, "https://x");
    }

    #[test]
    fn longest_emoticon_wins() {
        let t = test_tables();
        let nc = normalize_comment("ok :-)", &t);
        assert_eq!(nc.emoji_tokens()[0].source_text, ":-)");
    }

    #[test]
    fn zwj_family_is_one_token() {
        let t = test_tables();
        let family = "\u{1F468}\u{200D}\u{1F469}\u{200D}\u{1F467}\u{200D}\u{1F466}";
        let text = format!("see {family} here");
        let nc = normalize_comment(&text, &t);
        assert_eq!(nc.emoji_tokens().len(), 1);
        assert_eq!(nc.emoji_tokens()[0].glyph, family);
        assert_eq!(nc.stripped(), "see here");
    }

    #[test]
    fn flag_pair_is_one_token() {
        let t = test_tables();
        let nc = normalize_comment("\u{1F1FA}\u{1F1F8}", &t);
        assert_eq!(nc.emoji_tokens().len(), 1);
    }

    #[test]
    fn span_soundness() {
        let t = test_tables();
        let text = "x :smile: +U1F44D :) \u{1F642}";
        let nc = normalize_comment(text, &t);
        assert_eq!(nc.emoji_tokens().len(), 4);
        for tok in nc.emoji_tokens() {
            assert_eq!(&text[tok.span.clone()], tok.source_text);
            assert!(!tok.span.is_empty());
        }
        for pair in nc.emoji_tokens().windows(2) {
            assert!(pair[0].span.end <= pair[1].span.start);
        }
    }

    #[test]
    fn idempotent_on_mixed_text() {
        let t = test_tables();
        for text in [
            "nice +U1F60A and :smile: and :) and \u{1F44D}",
            ":smile:\u{301}",                    // combining mark blocks the seam
            "\u{1F44D}\u{200D}:smile:",          // ZWJ tail blocks the seam
            "\u{1F1E6}\u{1F1E7}\u{1F1E8}:smile:",
        ] {
            let once = normalize_comment(text, &t);
            let twice = normalize_comment(&once.normalized, &t);
            assert_eq!(once.normalized, twice.normalized, "text: {text:?}");
            let g1: Vec<_> = once.emoji_tokens().iter().map(|x| &x.glyph).collect();
            let g2: Vec<_> = twice.emoji_tokens().iter().map(|x| &x.glyph).collect();
            assert_eq!(g1, g2, "text: {text:?}");
        }
    }

    #[test]
    fn stripped_collapses_interior_whitespace() {
        let t = test_tables();
        assert_eq!(normalize_comment("a \u{1F44D} b", &t).stripped(), "a b");
        assert_eq!(normalize_comment("looks good \u{1F44D}", &t).stripped(), "looks good");
        assert_eq!(normalize_comment("\u{1F44D}", &t).stripped(), "");
        assert_eq!(normalize_comment("foo\u{1F44D}bar", &t).stripped(), "foo bar");
    }

    #[test]
    fn dangling_emoticon_target_rejected() {
        let mut emoticons = HashMap::new();
        emoticons.insert(":)".to_string(), "missing".to_string());
        let err = CodecTables::from_maps(emoticons, HashMap::new(), EmojiRanges::default());
        assert!(matches!(err, Err(Error::DanglingEmoticon { .. })));
    }

    #[test]
    fn non_cluster_glyph_rejected() {
        let mut shortcodes = HashMap::new();
        shortcodes.insert("two".to_string(), "\u{1F60A}\u{1F60A}".to_string());
        let err = CodecTables::from_maps(HashMap::new(), shortcodes, EmojiRanges::default());
        assert!(matches!(err, Err(Error::InvalidGlyph { .. })));

        // a dangling-ZWJ cluster is one cluster but fuses rightward
        let mut shortcodes = HashMap::new();
        shortcodes.insert("dangling".to_string(), "\u{1F469}\u{200D}".to_string());
        let err = CodecTables::from_maps(HashMap::new(), shortcodes, EmojiRanges::default());
        assert!(matches!(err, Err(Error::InvalidGlyph { .. })));
    }

    #[test]
    fn empty_tables_are_valid() {
        let t = CodecTables::from_maps(HashMap::new(), HashMap::new(), EmojiRanges::default())
            .unwrap();
        assert_eq!(t.emoticon_count(), 0);
        assert_eq!(t.shortcode_count(), 0);
        let nc = normalize_comment(":) :smile: \u{1F44D}", &t);
        assert!(nc.emoji_tokens().is_empty());
        assert_eq!(nc.normalized, ":) :smile: \u{1F44D}");
    }
}
