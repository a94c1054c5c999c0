//! Flesch-Kincaid grade level over sentence-bearing text.

use super::text::split_sentences;
use super::AnalysisError;

/// 0.39·(words/sentences) + 11.8·(syllables/words) − 15.59.
///
/// Words are whitespace tokens; sentences come from
/// [`split_sentences`]; syllables from the vowel-run heuristic in
/// [`syllables`]. Text without any sentence (or any word) has no grade.
pub fn fkgl(text: &str) -> Result<f64, AnalysisError> {
    let sentences = split_sentences(text);
    let words: Vec<&str> = text.split_whitespace().collect();
    if sentences.is_empty() || words.is_empty() {
        return Err(AnalysisError::NoSentences);
    }
    let syllable_total: usize = words.iter().map(|w| syllables(w)).sum();
    let w = words.len() as f64;
    let s = sentences.len() as f64;
    Ok(0.39 * (w / s) + 11.8 * (syllable_total as f64 / w) - 15.59)
}

/// Syllables of one word: the number of maximal `aeiouy` runs in its
/// alphabetic characters, minus one for a lone silent trailing `e`, never
/// below 1.
pub fn syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    if letters.is_empty() {
        return 1;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut runs = 0;
    let mut in_run = false;
    for &c in &letters {
        if is_vowel(c) {
            if !in_run {
                runs += 1;
            }
            in_run = true;
        } else {
            in_run = false;
        }
    }
    // silent trailing e: final run is exactly one 'e' and not the only run
    let n = letters.len();
    if runs > 1 && letters[n - 1] == 'e' && (n < 2 || !is_vowel(letters[n - 2])) {
        runs -= 1;
    }
    runs.max(1)
}
