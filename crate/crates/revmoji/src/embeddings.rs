//! Pre-trained vector tables and comment embeddings.
//!
//! Word and emoji vectors load from the standard text format (header line
//! `<count> <dim>`, then `<token> <v1> ... <vdim>`). A comment embeds as
//! the mean of its in-vocabulary word vectors; emoji embed as the mean of
//! their glyph vectors; the fused representation is the concatenation
//! `text ⊕ emoji`.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::codec::{EmojiToken, NormalizedComment};
use crate::error::{Error, Result};
use crate::tokenize::word_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    Word,
    Emoji,
}

/// Mean keeps comment-length invariance; sum is available behind the flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorAggregate {
    Mean,
    Sum,
}

/// A token-to-vector table with a fixed dimension.
///
/// Potentially large; load once and share.
#[derive(Debug, Clone)]
pub struct VectorTable {
    pub kind: VectorKind,
    dim: usize,
    entries: HashMap<String, Vec<f64>>,
    /// Duplicate tokens found at load (last one won).
    pub duplicate_count: usize,
    /// Header row count disagreed with the actual rows (tolerated).
    pub count_mismatch: bool,
}

impl VectorTable {
    /// Load a vector file. Rows with the wrong arity or non-finite values
    /// are errors; a header count that disagrees with the row count is
    /// tolerated and flagged.
    pub fn load(path: &Path, kind: VectorKind) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines().enumerate();

        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty vector file"))?;
        let header = header.map_err(|e| Error::io(path, e))?;
        let mut parts = header.split_whitespace();
        let declared: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(path, 1, "header must be `<count> <dim>`"))?;
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(path, 1, "header must be `<count> <dim>`"))?;
        if dim == 0 || parts.next().is_some() {
            return Err(Error::parse(path, 1, "header must be `<count> <dim>` with dim > 0"));
        }

        let mut entries: HashMap<String, Vec<f64>> = HashMap::new();
        let mut duplicate_count = 0usize;
        let mut rows = 0usize;
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields
                .next()
                .ok_or_else(|| Error::parse(path, idx + 1, "missing token"))?
                .to_string();
            let values: Vec<f64> = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(path, idx + 1, "bad vector component"))?;
            if values.len() != dim {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("expected {dim} components, got {}", values.len()),
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(path, idx + 1, "non-finite vector component"));
            }
            rows += 1;
            if entries.insert(token, values).is_some() {
                duplicate_count += 1;
            }
        }
        Ok(VectorTable {
            kind,
            dim,
            entries,
            duplicate_count,
            count_mismatch: rows != declared,
        })
    }

    pub fn from_entries(kind: VectorKind, dim: usize, entries: HashMap<String, Vec<f64>>) -> Self {
        debug_assert!(entries.values().all(|v| v.len() == dim));
        VectorTable {
            kind,
            dim,
            entries,
            duplicate_count: 0,
            count_mismatch: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        if let Some(v) = self.entries.get(token) {
            return Some(v);
        }
        // glyph lookups also try the variation-selector-stripped form
        let bare: String = token
            .chars()
            .filter(|c| !matches!(c, '\u{FE0E}' | '\u{FE0F}'))
            .collect();
        if bare != token {
            return self.entries.get(&bare).map(Vec::as_slice);
        }
        None
    }
}

/// A comment's text, emoji, and fused vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CommentEmbedding {
    pub text_vec: Vec<f64>,
    pub emoji_vec: Vec<f64>,
    /// `concat(text_vec, emoji_vec)`.
    pub fused: Vec<f64>,
    pub oov_words: usize,
    pub unmatched_emojis: usize,
}

/// Mean of vectors for in-vocabulary lowercased word tokens of the
/// stripped text. Fully out-of-vocabulary text embeds as the zero vector.
pub fn embed_text(
    nc: &NormalizedComment,
    word_table: &VectorTable,
    op: VectorAggregate,
) -> (Vec<f64>, usize) {
    let words = word_tokens(nc.stripped());
    aggregate_vectors(words.iter().map(String::as_str), word_table, op)
}

/// Mean of vectors over tokens present in the table, duplicates weighted
/// per occurrence. No matches embed as the zero vector.
pub fn embed_emojis(
    tokens: &[EmojiToken],
    emoji_table: &VectorTable,
    op: VectorAggregate,
) -> (Vec<f64>, usize) {
    aggregate_vectors(tokens.iter().map(|t| t.glyph.as_str()), emoji_table, op)
}

fn aggregate_vectors<'a>(
    tokens: impl Iterator<Item = &'a str>,
    table: &VectorTable,
    op: VectorAggregate,
) -> (Vec<f64>, usize) {
    let mut acc = vec![0.0f64; table.dim()];
    let mut matched = 0usize;
    let mut missed = 0usize;
    for tok in tokens {
        match table.get(tok) {
            Some(v) => {
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
                matched += 1;
            }
            None => missed += 1,
        }
    }
    if matched > 0 && op == VectorAggregate::Mean {
        let n = matched as f64;
        for a in &mut acc {
            *a /= n;
        }
    }
    (acc, missed)
}

/// Concatenate text and emoji vectors, in that fixed order. The inputs
/// must match the declared table dimensions.
pub fn fuse(text_vec: &[f64], emoji_vec: &[f64], dim_t: usize, dim_e: usize) -> Result<Vec<f64>> {
    if text_vec.len() != dim_t {
        return Err(Error::DimensionMismatch {
            expected: dim_t,
            got: text_vec.len(),
        });
    }
    if emoji_vec.len() != dim_e {
        return Err(Error::DimensionMismatch {
            expected: dim_e,
            got: emoji_vec.len(),
        });
    }
    let mut fused = Vec::with_capacity(dim_t + dim_e);
    fused.extend_from_slice(text_vec);
    fused.extend_from_slice(emoji_vec);
    Ok(fused)
}

/// Embed one comment end to end.
pub fn embed_comment(
    nc: &NormalizedComment,
    word_table: &VectorTable,
    emoji_table: &VectorTable,
    op: VectorAggregate,
) -> Result<CommentEmbedding> {
    let (text_vec, oov_words) = embed_text(nc, word_table, op);
    let (emoji_vec, unmatched_emojis) = embed_emojis(nc.emoji_tokens(), emoji_table, op);
    let fused = fuse(&text_vec, &emoji_vec, word_table.dim(), emoji_table.dim())?;
    Ok(CommentEmbedding {
        text_vec,
        emoji_vec,
        fused,
        oov_words,
        unmatched_emojis,
    })
}
