//! Loading and bundling of every file-backed resource the pipeline needs.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::augmentation::Rulebook;
use crate::codec::{normalize_comment, CodecTables, NormalizedComment};
use crate::embeddings::{VectorAggregate, VectorKind, VectorTable};
use crate::error::{Error, Result};
use crate::features::load_stoplist;
use crate::sentiment::{
    compute_channels, EmojiSentimentTable, ScoringConfig, SentimentChannels, SentimentResources,
    ValenceLexicon,
};

/// Paths to every resource file. Vector tables, the rulebook, and the
/// stoplist are optional; commands that need them check at use.
#[derive(Debug, Clone)]
pub struct ResourcePaths {
    pub emoticons: PathBuf,
    pub shortcodes: PathBuf,
    pub emoji_ranges: PathBuf,
    pub valence_lexicon: PathBuf,
    pub negators: PathBuf,
    pub intensifiers: PathBuf,
    pub cr_overrides: PathBuf,
    pub general_emoji_sentiment: PathBuf,
    pub cr_emoji_sentiment: PathBuf,
    pub stoplist: Option<PathBuf>,
    pub rulebook: Option<PathBuf>,
    pub word_vectors: Option<PathBuf>,
    pub emoji_vectors: Option<PathBuf>,
}

impl ResourcePaths {
    /// Error when any referenced path does not exist.
    pub fn validate(&self) -> Result<()> {
        let required: [(&str, &Path); 9] = [
            ("emoticons", &self.emoticons),
            ("shortcodes", &self.shortcodes),
            ("emoji_ranges", &self.emoji_ranges),
            ("valence_lexicon", &self.valence_lexicon),
            ("negators", &self.negators),
            ("intensifiers", &self.intensifiers),
            ("cr_overrides", &self.cr_overrides),
            ("general_emoji_sentiment", &self.general_emoji_sentiment),
            ("cr_emoji_sentiment", &self.cr_emoji_sentiment),
        ];
        for (key, path) in required {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "{key} path does not exist: {}",
                    path.display()
                )));
            }
        }
        for (key, path) in [
            ("stoplist", &self.stoplist),
            ("rulebook", &self.rulebook),
            ("word_vectors", &self.word_vectors),
            ("emoji_vectors", &self.emoji_vectors),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(Error::Config(format!(
                        "{key} path does not exist: {}",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Every loaded resource, immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct ResourceBundle {
    pub codec: CodecTables,
    pub sentiment: SentimentResources,
    pub stoplist: HashSet<String>,
    pub rulebook: Option<Rulebook>,
    pub word_vectors: Option<VectorTable>,
    pub emoji_vectors: Option<VectorTable>,
    pub vector_aggregate: VectorAggregate,
}

impl ResourceBundle {
    pub fn load(paths: &ResourcePaths) -> Result<Self> {
        paths.validate()?;
        let codec = CodecTables::load(&paths.emoticons, &paths.shortcodes, &paths.emoji_ranges)?;
        let general_lexicon =
            ValenceLexicon::load(&paths.valence_lexicon, &paths.negators, &paths.intensifiers)?;
        let cr_lexicon = general_lexicon.with_overrides_from(&paths.cr_overrides)?;
        let sentiment = SentimentResources {
            general_lexicon,
            cr_lexicon,
            general_emoji: EmojiSentimentTable::load_general(&paths.general_emoji_sentiment)?,
            cr_emoji: EmojiSentimentTable::load_code_review(&paths.cr_emoji_sentiment)?,
            config: ScoringConfig::default(),
        };
        let stoplist = match &paths.stoplist {
            Some(p) => load_stoplist(p)?,
            None => HashSet::new(),
        };
        let rulebook = paths.rulebook.as_deref().map(Rulebook::load).transpose()?;
        let word_vectors = paths
            .word_vectors
            .as_deref()
            .map(|p| VectorTable::load(p, VectorKind::Word))
            .transpose()?;
        let emoji_vectors = paths
            .emoji_vectors
            .as_deref()
            .map(|p| VectorTable::load(p, VectorKind::Emoji))
            .transpose()?;
        Ok(ResourceBundle {
            codec,
            sentiment,
            stoplist,
            rulebook,
            word_vectors,
            emoji_vectors,
            vector_aggregate: VectorAggregate::Mean,
        })
    }

    pub fn normalize(&self, text: &str) -> NormalizedComment {
        normalize_comment(text, &self.codec)
    }

    pub fn channels(&self, nc: &NormalizedComment) -> SentimentChannels {
        compute_channels(nc, &self.sentiment)
    }

    pub fn word_vectors(&self) -> Result<&VectorTable> {
        self.word_vectors
            .as_ref()
            .ok_or_else(|| Error::Config("word_vectors path not configured".to_string()))
    }

    pub fn emoji_vectors(&self) -> Result<&VectorTable> {
        self.emoji_vectors
            .as_ref()
            .ok_or_else(|| Error::Config("emoji_vectors path not configured".to_string()))
    }

    pub fn rulebook(&self) -> Result<&Rulebook> {
        self.rulebook
            .as_ref()
            .ok_or_else(|| Error::Config("rulebook path not configured".to_string()))
    }
}
