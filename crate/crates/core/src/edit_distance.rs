//! Levenshtein distance and its length-renormalized variant.
//!
//! All kernels work on Unicode scalar values with unit costs for insertion,
//! deletion and substitution. No transpositions.

use std::cmp::min;
use std::fmt;

use rayon::prelude::*;

use crate::lexicon::Word;

/// Renormalized word distance `d_L / max(len)`, always in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct WordDistance(f64);

impl WordDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<WordDistance> for f64 {
    fn from(d: WordDistance) -> f64 {
        d.0
    }
}

impl fmt::Display for WordDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn trim_common_affixes<'a>(a: &'a [char], b: &'a [char]) -> (&'a [char], &'a [char]) {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    (&a[..a.len() - suffix], &b[..b.len() - suffix])
}

/// Two-row dynamic program, `O(min(|a|, |b|))` memory.
pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = trim_common_affixes(a, b);
    // keep the row over the shorter string
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }

    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, &lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &sc) in short.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(lc != sc);
            row[j + 1] = min(min(above, row[j]) + 1, diag + cost);
            diag = above;
        }
    }
    row[short.len()]
}

/// Banded variant: returns `Some(d)` when `d <= max_distance`, otherwise `None`.
///
/// Only cells within `max_distance` of the main diagonal are evaluated.
pub fn levenshtein_bounded(a: &[char], b: &[char], max_distance: usize) -> Option<usize> {
    let (a, b) = trim_common_affixes(a, b);
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if long.len() - short.len() > max_distance {
        return None;
    }
    if short.is_empty() {
        return Some(long.len());
    }

    let k = max_distance;
    let inf = usize::MAX / 2;
    let width = short.len() + 1;
    let mut prev = vec![inf; width];
    let mut cur = vec![inf; width];
    for (j, cell) in prev.iter_mut().enumerate().take(min(k, short.len()) + 1) {
        *cell = j;
    }
    for i in 1..=long.len() {
        let lo = i.saturating_sub(k);
        let hi = min(short.len(), i + k);
        cur.fill(inf);
        if lo == 0 {
            cur[0] = i;
        }
        let mut row_min = if lo == 0 { i } else { inf };
        for j in lo.max(1)..=hi {
            let cost = usize::from(long[i - 1] != short[j - 1]);
            let v = min(min(prev[j], cur[j - 1]) + 1, prev[j - 1] + cost);
            cur[j] = v;
            row_min = min(row_min, v);
        }
        if row_min > k {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[short.len()];
    (d <= k).then_some(d)
}

/// Full `(|a|+1) x (|b|+1)` table. Kept as the reference the fast kernels are checked against.
pub fn levenshtein_full_matrix(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = table[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let del = table[i - 1][j] + 1;
            let ins = table[i][j - 1] + 1;
            table[i][j] = min(sub, min(del, ins));
        }
    }
    table[n][m]
}

pub fn levenshtein(w1: &Word, w2: &Word) -> usize {
    levenshtein_chars(w1.chars(), w2.chars())
}

/// `d_L(a, b) / max(len(a), len(b))`, lengths in scalar values.
pub fn normalized_chars(a: &[char], b: &[char]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein_chars(a, b) as f64 / longest as f64
}

pub fn word_distance(w1: &Word, w2: &Word) -> WordDistance {
    WordDistance(normalized_chars(w1.chars(), w2.chars()))
}

/// Word distances for many pairs, computed in parallel; output order matches input.
pub fn batch_word_distances(pairs: &[(Word, Word)]) -> Vec<WordDistance> {
    pairs
        .par_iter()
        .map(|(a, b)| word_distance(a, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashSet, VecDeque};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    /// Breadth-first search over whole strings, one edit per step.
    /// Intermediate strings never need to exceed the longer input, and only
    /// characters of the target are worth inserting or substituting.
    fn bfs_edit_distance(from: &[char], to: &[char]) -> usize {
        let max_len = from.len().max(to.len());
        let alphabet: Vec<char> = {
            let mut v: Vec<char> = to.to_vec();
            v.sort();
            v.dedup();
            v
        };
        let target = to.to_vec();
        let mut seen: HashSet<Vec<char>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(from.to_vec());
        queue.push_back((from.to_vec(), 0usize));
        while let Some((s, d)) = queue.pop_front() {
            if s == target {
                return d;
            }
            let mut next = Vec::new();
            for i in 0..s.len() {
                let mut t = s.clone();
                t.remove(i);
                next.push(t);
                for &c in &alphabet {
                    if c != s[i] {
                        let mut t = s.clone();
                        t[i] = c;
                        next.push(t);
                    }
                }
            }
            if s.len() < max_len {
                for i in 0..=s.len() {
                    for &c in &alphabet {
                        let mut t = s.clone();
                        t.insert(i, c);
                        next.push(t);
                    }
                }
            }
            for t in next {
                if seen.insert(t.clone()) {
                    queue.push_back((t, d + 1));
                }
            }
        }
        unreachable!("target is always reachable")
    }

    fn random_word(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> Vec<char> {
        let len = rng.random_range(0..=max_len);
        (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect()
    }

    #[test]
    fn unit_cost_examples() {
        assert_eq!(levenshtein(&w("rano"), &w("rano")), 0);
        assert_eq!(levenshtein(&w("ab"), &w("ax")), 1);
        assert_eq!(levenshtein(&w("abc"), &w("xyz")), 3);
        assert_eq!(levenshtein(&w("kitten"), &w("sitting")), 3);
        assert_eq!(levenshtein_chars(&[], &chars("abc")), 3);
        assert_eq!(levenshtein_chars(&chars("abc"), &[]), 3);
    }

    #[test]
    fn scalar_values_not_bytes() {
        // 'à' is two bytes in UTF-8 but one scalar value
        assert_eq!(levenshtein(&w("tàny"), &w("tany")), 1);
        assert_eq!(word_distance(&w("tàny"), &w("tany")).value(), 0.25);
    }

    #[test]
    fn renormalized_goldens_are_exact() {
        assert_eq!(word_distance(&w("ab"), &w("ax")).value(), 0.5);
        assert_eq!(word_distance(&w("abcdefgh"), &w("abcdefgx")).value(), 0.125);
        assert_eq!(word_distance(&w("rano"), &w("rano")).value(), 0.0);
        assert_eq!(word_distance(&w("abc"), &w("xyz")).value(), 1.0);
    }

    #[test]
    fn batch_preserves_order() {
        assert!(batch_word_distances(&[]).is_empty());
        let pairs = vec![(w("ab"), w("ax")), (w("abcdefgh"), w("abcdefgx"))];
        let got: Vec<f64> = batch_word_distances(&pairs)
            .into_iter()
            .map(f64::from)
            .collect();
        assert_eq!(got, vec![0.5, 0.125]);
    }

    #[test]
    fn batch_matches_sequential_on_ten_thousand_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alphabet: Vec<char> = "abcdefgh".chars().collect();
        let pairs: Vec<(Word, Word)> = (0..10_000)
            .map(|_| {
                let mut gen = || {
                    let mut s = random_word(&mut rng, &alphabet, 10);
                    if s.is_empty() {
                        s.push('a');
                    }
                    w(&s.into_iter().collect::<String>())
                };
                (gen(), gen())
            })
            .collect();
        let sequential: Vec<WordDistance> =
            pairs.iter().map(|(a, b)| word_distance(a, b)).collect();
        assert_eq!(batch_word_distances(&pairs), sequential);
    }

    #[test]
    fn kernels_agree_with_string_space_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alphabet: Vec<char> = "abcd".chars().collect();
        for _ in 0..300 {
            let a = random_word(&mut rng, &alphabet, 5);
            let b = random_word(&mut rng, &alphabet, 5);
            let expected = bfs_edit_distance(&a, &b);
            assert_eq!(levenshtein_chars(&a, &b), expected, "{a:?} {b:?}");
            assert_eq!(levenshtein_full_matrix(&a, &b), expected);
        }
    }

    #[test]
    fn banded_kernel_agrees_within_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alphabet: Vec<char> = "abcd".chars().collect();
        for _ in 0..5_000 {
            let a = random_word(&mut rng, &alphabet, 12);
            let b = random_word(&mut rng, &alphabet, 12);
            let exact = levenshtein_full_matrix(&a, &b);
            for k in 0..=13 {
                let expected = (exact <= k).then_some(exact);
                assert_eq!(levenshtein_bounded(&a, &b, k), expected, "{a:?} {b:?} k={k}");
            }
        }
    }
}
