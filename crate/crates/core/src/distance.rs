//! Lexical distance between languages: the mean renormalized word distance
//! over the meanings both lexicons attest.

use rayon::prelude::*;

use crate::condensed::{pair_count, Condensed};
use crate::edit_distance::word_distance;
use crate::error::{Error, Result};
use crate::lexicon::{Corpus, Lexicon};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceOptions {
    /// Minimum number of shared meanings required for a pair.
    pub min_shared: usize,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions { min_shared: 1 }
    }
}

/// Pairwise language distances with the number of meanings compared per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    distances: Condensed<f64>,
    coverage: Option<Condensed<u32>>,
}

impl DistanceMatrix {
    pub fn new(distances: Condensed<f64>, coverage: Option<Condensed<u32>>) -> Result<Self> {
        if let Some((i, j, v)) = distances
            .pairs()
            .find(|&(_, _, v)| !(0.0..=1.0).contains(&v))
        {
            return Err(Error::Range(format!(
                "distance {v} between `{}` and `{}` outside [0, 1]",
                distances.labels()[i],
                distances.labels()[j]
            )));
        }
        if let Some(cov) = &coverage {
            if cov.labels() != distances.labels() {
                return Err(Error::InvalidInput(
                    "coverage labels differ from distance labels".into(),
                ));
            }
        }
        Ok(DistanceMatrix {
            distances,
            coverage,
        })
    }

    /// Wraps a bare matrix read back from an export; coverage is unknown.
    pub fn from_distances(distances: Condensed<f64>) -> Result<Self> {
        DistanceMatrix::new(distances, None)
    }

    pub fn labels(&self) -> &[String] {
        self.distances.labels()
    }

    pub fn len(&self) -> usize {
        self.distances.order()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distances(&self) -> &Condensed<f64> {
        &self.distances
    }

    pub fn coverage(&self) -> Option<&Condensed<u32>> {
        self.coverage.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.distances.get(i, j)
    }

    pub fn to_csv(&self) -> String {
        self.distances.to_csv()
    }

    pub fn to_phylip(&self) -> String {
        self.distances.to_phylip()
    }

    /// Coverage as a square CSV with integer cells. The diagonal is left at 0.
    pub fn coverage_csv(&self) -> Option<String> {
        self.coverage
            .as_ref()
            .map(|c| c.to_csv_with(|v| v.to_string()))
    }
}

/// Mean word distance over shared meanings, summed in ascending meaning order.
///
/// Returns `(distance, shared)`.
pub fn language_distance(a: &Lexicon, b: &Lexicon, opts: &DistanceOptions) -> Result<(f64, usize)> {
    let mut left = a.entries().peekable();
    let mut right = b.entries().peekable();
    let mut sum = 0.0;
    let mut shared = 0usize;
    while let (Some(&(ia, wa)), Some(&(ib, wb))) = (left.peek(), right.peek()) {
        match ia.cmp(&ib) {
            std::cmp::Ordering::Less => {
                left.next();
            }
            std::cmp::Ordering::Greater => {
                right.next();
            }
            std::cmp::Ordering::Equal => {
                sum += word_distance(wa, wb).value();
                shared += 1;
                left.next();
                right.next();
            }
        }
    }
    let required = opts.min_shared.max(1);
    if shared < required {
        return Err(Error::InsufficientOverlap {
            a: a.tag().to_owned(),
            b: b.tag().to_owned(),
            shared,
            required,
        });
    }
    Ok((sum / shared as f64, shared))
}

/// All `N(N-1)/2` pairwise distances. Pairs are evaluated in parallel; each
/// entry is computed exactly as the sequential call would.
pub fn distance_matrix(corpus: &Corpus, opts: &DistanceOptions) -> Result<DistanceMatrix> {
    let lexicons = corpus.lexicons();
    let n = lexicons.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 languages, corpus has {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    debug_assert_eq!(pairs.len(), pair_count(n));
    let results: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(i, j)| language_distance(&lexicons[i], &lexicons[j], opts))
        .collect::<Result<_>>()?;

    let labels = corpus.labels();
    let distances = Condensed::new(labels.clone(), results.iter().map(|r| r.0).collect())?;
    let coverage = Condensed::new(labels, results.iter().map(|r| r.1 as u32).collect())?;
    DistanceMatrix::new(distances, Some(coverage))
}

/// One row of the distance-to-reference report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub dialect: String,
    pub reference: String,
    pub distance: f64,
}

/// Distance of every non-reference language to each reference language,
/// sorted by dialect then reference tag.
pub fn external_reference_report(
    matrix: &DistanceMatrix,
    references: &[String],
) -> Result<Vec<ReferenceRow>> {
    let mut refs: Vec<(usize, &String)> = Vec::with_capacity(references.len());
    for r in references {
        let idx = matrix
            .distances
            .index_of(r)
            .ok_or_else(|| Error::UnknownLabel(r.clone()))?;
        if !refs.iter().any(|&(i, _)| i == idx) {
            refs.push((idx, r));
        }
    }
    let mut rows = Vec::new();
    for (i, dialect) in matrix.labels().iter().enumerate() {
        if refs.iter().any(|&(r, _)| r == i) {
            continue;
        }
        for &(r, reference) in &refs {
            rows.push(ReferenceRow {
                dialect: dialect.clone(),
                reference: reference.clone(),
                distance: matrix.get(i, r),
            });
        }
    }
    rows.sort_by(|a, b| (&a.dialect, &a.reference).cmp(&(&b.dialect, &b.reference)));
    Ok(rows)
}

/// Convenience wrapper computing the matrix first.
pub fn corpus_reference_report(
    corpus: &Corpus,
    references: &[String],
    opts: &DistanceOptions,
) -> Result<Vec<ReferenceRow>> {
    for r in references {
        if corpus.get(r).is_none() {
            return Err(Error::UnknownLabel(r.clone()));
        }
    }
    external_reference_report(&distance_matrix(corpus, opts)?, references)
}

pub fn reference_report_csv(rows: &[ReferenceRow]) -> String {
    let mut out = String::from("dialect,reference,distance\n");
    for row in rows {
        out.push_str(&format!("{},{},{:.6}\n", row.dialect, row.reference, row.distance));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{parse_corpus, MeaningId, Word};

    fn lex(tag: &str, words: &[(u32, &str)]) -> Lexicon {
        Lexicon::from_entries(
            tag,
            words
                .iter()
                .map(|&(id, w)| (MeaningId::new(id, 200).unwrap(), Word::parse(w).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn identical_lexicons_are_at_zero() {
        let a = lex("a", &[(1, "rano"), (2, "afo"), (3, "vato")]);
        let b = a.with_tag("b");
        assert_eq!(language_distance(&a, &b, &DistanceOptions::default()).unwrap(), (0.0, 3));
    }

    #[test]
    fn mean_of_two_word_distances() {
        let a = lex("a", &[(1, "ab"), (2, "abcdefgh")]);
        let b = lex("b", &[(1, "ax"), (2, "abcdefgx")]);
        // (0.5 + 0.125) / 2
        assert_eq!(
            language_distance(&a, &b, &DistanceOptions::default()).unwrap(),
            (0.3125, 2)
        );
    }

    #[test]
    fn missing_meanings_average_over_intersection() {
        let a = lex("a", &[(1, "ab"), (2, "abcdefgh"), (3, "zz")]);
        let b = lex("b", &[(1, "ax"), (2, "abcdefgx"), (4, "q")]);
        assert_eq!(
            language_distance(&a, &b, &DistanceOptions::default()).unwrap(),
            (0.3125, 2)
        );
        let err = language_distance(&a, &b, &DistanceOptions { min_shared: 3 }).unwrap_err();
        assert!(matches!(err, Error::InsufficientOverlap { shared: 2, required: 3, .. }));
    }

    #[test]
    fn disjoint_lexicons_fail_with_both_names() {
        let a = lex("mer", &[(1, "rano")]);
        let b = lex("tan", &[(2, "afo")]);
        let err = language_distance(&a, &b, &DistanceOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mer") && msg.contains("tan"), "{msg}");
    }

    #[test]
    fn two_language_matrix_has_one_entry() {
        let corpus = parse_corpus("a\t1\tab\na\t2\tabcdefgh\nb\t1\tax\nb\t2\tabcdefgx\n", 200).unwrap();
        let m = distance_matrix(&corpus, &DistanceOptions::default()).unwrap();
        assert_eq!(m.distances().values(), &[0.3125]);
        assert_eq!(m.coverage().unwrap().values(), &[2]);
        assert_eq!(
            m.coverage_csv().unwrap(),
            "label,a,b\na,0,2\nb,2,0\n"
        );
    }

    #[test]
    fn matrix_propagates_overlap_errors() {
        let corpus = parse_corpus("a\t1\tab\nb\t1\tax\nc\t2\tzz\n", 200).unwrap();
        let err = distance_matrix(&corpus, &DistanceOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientOverlap { .. }));
        let single = parse_corpus("a\t1\tab\n", 200).unwrap();
        assert!(distance_matrix(&single, &DistanceOptions::default()).is_err());
    }

    #[test]
    fn reference_report_rows() {
        let corpus = parse_corpus(
            "d2\t1\tab\nd1\t1\tax\nmalay\t1\txx\nmaanyan\t1\tay\n",
            10,
        )
        .unwrap();
        let opts = DistanceOptions::default();
        let refs = vec!["malay".to_string(), "maanyan".to_string()];
        let rows = corpus_reference_report(&corpus, &refs, &opts).unwrap();
        let keys: Vec<(&str, &str)> = rows
            .iter()
            .map(|r| (r.dialect.as_str(), r.reference.as_str()))
            .collect();
        assert_eq!(
            keys,
            vec![("d1", "maanyan"), ("d1", "malay"), ("d2", "maanyan"), ("d2", "malay")]
        );
        assert_eq!(rows[0].distance, 0.5);
        assert!(corpus_reference_report(&corpus, &[], &opts).unwrap().is_empty());
        assert_eq!(
            corpus_reference_report(&corpus, &["nope".to_string()], &opts),
            Err(Error::UnknownLabel("nope".into()))
        );
        assert_eq!(
            reference_report_csv(&rows[..1]),
            "dialect,reference,distance\nd1,maanyan,0.500000\n"
        );
    }
}
