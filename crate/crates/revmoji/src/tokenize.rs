//! Shared tokenization helpers: word tokens, raw whitespace tokens,
//! sentence splitting, and syllable counting.

use unicode_segmentation::UnicodeSegmentation;

/// Lowercased word tokens per Unicode word segmentation.
///
/// Contractions ("don't") and joined identifiers ("foo_bar", "x.y") stay
/// single tokens, punctuation is dropped.
pub fn word_tokens(text: &str) -> Vec<String> {
    text.unicode_words().map(|w| w.to_lowercase()).collect()
}

/// Raw whitespace-delimited tokens, original casing preserved.
pub fn raw_tokens(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// A sentence and whether it ends with a question mark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence<'a> {
    pub text: &'a str,
    pub is_question: bool,
}

/// Split on `.`, `!`, `?`, and newline. Segments that are empty after
/// trimming are dropped; a trailing unterminated segment counts as a
/// sentence that is not a question.
pub fn sentences(text: &str) -> Vec<Sentence<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        if matches!(ch, '.' | '!' | '?' | '\n') {
            let seg = &text[start..i];
            if !seg.trim().is_empty() {
                out.push(Sentence {
                    text: seg,
                    is_question: ch == '?',
                });
            }
            start = i + ch.len_utf8();
        }
    }
    let tail = &text[start..];
    if !tail.trim().is_empty() {
        out.push(Sentence {
            text: tail,
            is_question: false,
        });
    }
    out
}

/// Syllables in a single word: maximal `[aeiouy]` runs, minus a silent
/// trailing `e`, floored at one.
pub fn syllables(word: &str) -> usize {
    let lower = word.to_lowercase();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut runs = 0usize;
    let mut in_run = false;
    for c in lower.chars() {
        if is_vowel(c) {
            if !in_run {
                runs += 1;
            }
            in_run = true;
        } else {
            in_run = false;
        }
    }
    if lower.ends_with('e') {
        runs = runs.saturating_sub(1);
    }
    runs.max(1)
}

/// Total syllables over the word tokens of `text`.
pub fn syllable_count(text: &str) -> usize {
    word_tokens(text).iter().map(|w| syllables(w)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_keep_contractions_and_identifiers() {
        assert_eq!(word_tokens("Don't break foo_bar or x.y"), vec![
            "don't", "break", "foo_bar", "or", "x.y"
        ]);
    }

    #[test]
    fn empty_text_has_no_words() {
        assert!(word_tokens("").is_empty());
        assert!(word_tokens("  \t ").is_empty());
    }

    #[test]
    fn sentence_split_marks_questions() {
        let s = sentences("Is this right? Yes. Maybe");
        assert_eq!(s.len(), 3);
        assert!(s[0].is_question);
        assert!(!s[1].is_question);
        assert!(!s[2].is_question);
    }

    #[test]
    fn repeated_terminators_yield_no_empty_sentences() {
        let s = sentences("a..b!!\n\n");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn syllable_heuristic() {
        assert_eq!(syllables("make"), 1);
        assert_eq!(syllables("the"), 1);
        assert_eq!(syllables("see"), 1);
        assert_eq!(syllables("right"), 1);
        assert_eq!(syllables("review"), 2);
        assert_eq!(syllables("variable"), 2);
        assert_eq!(syllables("x"), 1);
    }
}
