//! Character-level Ratcliff/Obershelp similarity.
//!
//! `similarity_ratio` returns `round(100 · 2M / (|a| + |b|))` where `M` is
//! the total number of matched characters under recursive
//! longest-common-substring matching. The longest match is chosen by size,
//! ties broken by earliest start in the first string, then in the second.
//! Operands are put in a canonical order first so the ratio is symmetric.

use std::collections::HashMap;

/// Similarity in 0..=100. Both strings empty → 100; exactly one empty → 0.
pub fn similarity_ratio(a: &str, b: &str) -> u32 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 100;
    }
    // canonical operand order makes the ratio symmetric even when the
    // greedy matching has tie-dependent outcomes
    let (x, y) = if (a.len(), &a) <= (b.len(), &b) {
        (&a, &b)
    } else {
        (&b, &a)
    };
    let m = match_total(x, y);
    round_ratio(m, a.len() + b.len())
}

/// round(100 · 2m / total), half away from zero, in exact integer arithmetic.
fn round_ratio(m: usize, total: usize) -> u32 {
    debug_assert!(total > 0);
    ((200 * m as u64 + total as u64 / 2) / total as u64) as u32
}

/// Total matched characters: longest common substring, then recurse on both
/// sides of the match.
pub fn match_total(a: &[char], b: &[char]) -> usize {
    let b2j = build_b2j(b);
    let mut total = 0;
    // explicit work list; documents can be long and recursion depth is
    // bounded only by the number of matching blocks
    let mut stack = vec![(0usize, a.len(), 0usize, b.len())];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        let (i, j, size) = longest_match(a, &b2j, alo, ahi, blo, bhi);
        if size == 0 {
            continue;
        }
        total += size;
        stack.push((alo, i, blo, j));
        stack.push((i + size, ahi, j + size, bhi));
    }
    total
}

fn build_b2j(b: &[char]) -> HashMap<char, Vec<usize>> {
    let mut map: HashMap<char, Vec<usize>> = HashMap::new();
    for (j, &c) in b.iter().enumerate() {
        map.entry(c).or_default().push(j);
    }
    map
}

/// Longest block `a[i..i+size] == b[j..j+size]` within the given windows,
/// via a rolling run-length table keyed by position in `b`.
fn longest_match(
    a: &[char],
    b2j: &HashMap<char, Vec<usize>>,
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let (mut besti, mut bestj, mut bestsize) = (alo, blo, 0usize);
    let mut j2len: HashMap<usize, usize> = HashMap::new();
    for i in alo..ahi {
        let mut new_j2len: HashMap<usize, usize> = HashMap::new();
        if let Some(positions) = b2j.get(&a[i]) {
            let start = positions.partition_point(|&j| j < blo);
            for &j in &positions[start..] {
                if j >= bhi {
                    break;
                }
                let k = if j > blo {
                    j2len.get(&(j - 1)).copied().unwrap_or(0) + 1
                } else {
                    1
                };
                new_j2len.insert(j, k);
                if k > bestsize {
                    besti = i + 1 - k;
                    bestj = j + 1 - k;
                    bestsize = k;
                }
            }
        }
        j2len = new_j2len;
    }
    (besti, bestj, bestsize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings_are_100() {
        assert_eq!(similarity_ratio("abcd", "abcd"), 100);
        assert_eq!(similarity_ratio("", ""), 100);
        assert_eq!(similarity_ratio("privacy policy", "privacy policy"), 100);
    }

    #[test]
    fn one_empty_is_0() {
        assert_eq!(similarity_ratio("", "x"), 0);
        assert_eq!(similarity_ratio("x", ""), 0);
    }

    #[test]
    fn single_edit_on_abcd_is_75() {
        // M = 3 ("abc"), 2·3/8 = 0.75
        assert_eq!(similarity_ratio("abcd", "abce"), 75);
    }

    #[test]
    fn symmetric_by_construction() {
        let cases = [
            ("qabxcd", "abycdf"),
            ("private", "privacy"),
            ("aaab", "baaa"),
            ("xy", "yx"),
        ];
        for (a, b) in cases {
            assert_eq!(similarity_ratio(a, b), similarity_ratio(b, a), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn recursive_matching_counts_blocks_on_both_sides() {
        // longest block "ab"; remainders contribute "cd": M = 4 of 6+6
        assert_eq!(similarity_ratio("qabxcd", "abycdq"), 67);
    }

    #[test]
    fn unicode_counts_characters_not_bytes() {
        // one char differs out of 4+4
        assert_eq!(similarity_ratio("aäbc", "aäbd"), 75);
    }
}
