//! From lexical distances to years.
//!
//! Separation times follow a constant-rate replacement model on two
//! independent lineages,
//!
//! ```text
//! T(d) = -(tau / 2) * ln(1 - d / d_max)      d(T) = d_max * (1 - exp(-2 T / tau))
//! ```
//!
//! `T` is the total time separating two languages (the sum of both lineages
//! back to their common ancestor), which is what UPGMA halves into node
//! heights. `tau` is the characteristic replacement time and `d_max` the
//! distance reached by unrelated vocabularies.
//!
//! The module also holds the divergence simulator used to validate the whole
//! pipeline against known trees.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condensed::Condensed;
use crate::distance::DistanceMatrix;
use crate::edit_distance::word_distance;
use crate::error::{Error, Result};
use crate::lexicon::{normalize_word, Corpus, Lexicon, MeaningId, NormalizationPolicy, Word};
use crate::phylogeny::{upgma, Phylogeny};

pub const DEFAULT_TAU: f64 = 1000.0;
pub const DEFAULT_REFERENCE_YEAR: i32 = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChronologyModel {
    tau: f64,
    d_max: f64,
    k_var: f64,
    reference_year: i32,
}

impl Default for ChronologyModel {
    fn default() -> Self {
        ChronologyModel {
            tau: DEFAULT_TAU,
            d_max: 1.0,
            k_var: 1.0,
            reference_year: DEFAULT_REFERENCE_YEAR,
        }
    }
}

impl ChronologyModel {
    pub fn new(tau: f64, d_max: f64, k_var: f64, reference_year: i32) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Range(format!("tau must be positive, got {tau}")));
        }
        if !(d_max > 0.0 && d_max <= 1.0) {
            return Err(Error::Range(format!("d_max must lie in (0, 1], got {d_max}")));
        }
        if !(k_var.is_finite() && k_var > 0.0) {
            return Err(Error::Range(format!("k_var must be positive, got {k_var}")));
        }
        Ok(ChronologyModel {
            tau,
            d_max,
            k_var,
            reference_year,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn k_var(&self) -> f64 {
        self.k_var
    }

    pub fn reference_year(&self) -> i32 {
        self.reference_year
    }

    pub fn with_tau(self, tau: f64) -> Result<Self> {
        ChronologyModel::new(tau, self.d_max, self.k_var, self.reference_year)
    }

    pub fn with_d_max(self, d_max: f64) -> Result<Self> {
        ChronologyModel::new(self.tau, d_max, self.k_var, self.reference_year)
    }

    pub fn with_k_var(self, k_var: f64) -> Result<Self> {
        ChronologyModel::new(self.tau, self.d_max, k_var, self.reference_year)
    }

    pub fn with_reference_year(self, reference_year: i32) -> Self {
        ChronologyModel {
            reference_year,
            ..self
        }
    }
}

/// A distance-to-time transform. Implementations must scale linearly in `tau`
/// for [`calibrate_tau`] to be exact.
pub trait TimeRule {
    fn time(&self, d: f64, model: &ChronologyModel) -> Result<f64>;
    fn distance(&self, t: f64, model: &ChronologyModel) -> f64;
}

/// `T = -(tau/2) ln(1 - d/d_max)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogarithmicRule;

impl TimeRule for LogarithmicRule {
    fn time(&self, d: f64, model: &ChronologyModel) -> Result<f64> {
        if d.is_nan() || d < 0.0 {
            return Err(Error::Range(format!("distance {d} is negative")));
        }
        if d >= model.d_max {
            return Err(Error::Saturation {
                a: String::new(),
                b: String::new(),
                distance: d,
                d_max: model.d_max,
            });
        }
        Ok(-(model.tau / 2.0) * (-d / model.d_max).ln_1p())
    }

    fn distance(&self, t: f64, model: &ChronologyModel) -> f64 {
        -model.d_max * (-2.0 * t / model.tau).exp_m1()
    }
}

pub fn time_from_distance(d: f64, model: &ChronologyModel) -> Result<f64> {
    LogarithmicRule.time(d, model)
}

pub fn distance_from_time(t: f64, model: &ChronologyModel) -> f64 {
    LogarithmicRule.distance(t, model)
}

/// Pairwise separation times in years.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMatrix(Condensed<f64>);

impl TimeMatrix {
    pub fn new(times: Condensed<f64>) -> Result<Self> {
        if let Some((i, j, v)) = times.pairs().find(|&(_, _, v)| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "time {v} between `{}` and `{}` is not a finite non-negative number",
                times.labels()[i],
                times.labels()[j]
            )));
        }
        Ok(TimeMatrix(times))
    }

    pub fn as_condensed(&self) -> &Condensed<f64> {
        &self.0
    }

    pub fn labels(&self) -> &[String] {
        self.0.labels()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

pub fn time_matrix(dm: &DistanceMatrix, model: &ChronologyModel) -> Result<TimeMatrix> {
    time_matrix_with(dm, model, &LogarithmicRule)
}

pub fn time_matrix_with(
    dm: &DistanceMatrix,
    model: &ChronologyModel,
    rule: &dyn TimeRule,
) -> Result<TimeMatrix> {
    let labels = dm.labels();
    let mut values = Vec::with_capacity(dm.distances().values().len());
    for (i, j, d) in dm.distances().pairs() {
        let t = rule.time(d, model).map_err(|e| match e {
            Error::Saturation { distance, d_max, .. } => Error::Saturation {
                a: labels[i].clone(),
                b: labels[j].clone(),
                distance,
                d_max,
            },
            other => other,
        })?;
        values.push(t);
    }
    TimeMatrix::new(Condensed::new(labels.to_vec(), values)?)
}

/// Rescales `tau` so the UPGMA root of the time matrix sits at `anchor_root_age`.
///
/// Times are linear in `tau`, so one multiplicative step is exact.
pub fn calibrate_tau(
    dm: &DistanceMatrix,
    anchor_root_age: f64,
    model: &ChronologyModel,
) -> Result<ChronologyModel> {
    if !(anchor_root_age.is_finite() && anchor_root_age > 0.0) {
        return Err(Error::Range(format!(
            "anchor root age must be positive, got {anchor_root_age}"
        )));
    }
    let tree = upgma(&time_matrix(dm, model)?)?;
    let root = tree.root_height();
    if root.is_nan() || root <= 0.0 {
        return Err(Error::Calibration(
            "root height is zero (all distances vanish); nothing to scale".into(),
        ));
    }
    model.with_tau(model.tau * anchor_root_age / root)
}

/// Years elapsed since the breakup, `k_var * variance`.
pub fn date_from_variance(radial_variance: f64, model: &ChronologyModel) -> f64 {
    model.k_var * radial_variance
}

/// A year on the proleptic calendar without a year zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalendarYear {
    Ad(i64),
    Bc(i64),
}

impl CalendarYear {
    /// `reference_year - lag`, rounded to the nearest year.
    pub fn before(reference_year: i32, lag_years: f64) -> Self {
        let y = (f64::from(reference_year) - lag_years).round() as i64;
        if y >= 1 {
            CalendarYear::Ad(y)
        } else {
            CalendarYear::Bc(1 - y)
        }
    }
}

impl fmt::Display for CalendarYear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalendarYear::Ad(y) => write!(f, "A.D. {y}"),
            CalendarYear::Bc(y) => write!(f, "{y} B.C."),
        }
    }
}

/// Values read from a `key=value` chronology file. Unset keys stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChronologyConfig {
    pub tau: Option<f64>,
    pub d_max: Option<f64>,
    pub k_var: Option<f64>,
    pub reference_year: Option<i32>,
}

impl ChronologyConfig {
    /// Parses `key=value` lines; `#` starts a comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ChronologyConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value", idx + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let real = || -> Result<f64> {
                value.parse().map_err(|_| {
                    Error::Config(format!("line {}: `{value}` is not a number", idx + 1))
                })
            };
            match key {
                "tau" => cfg.tau = Some(real()?),
                "d_max" => cfg.d_max = Some(real()?),
                "k_var" => cfg.k_var = Some(real()?),
                "reference_year" => {
                    cfg.reference_year = Some(value.parse().map_err(|_| {
                        Error::Config(format!("line {}: `{value}` is not a year", idx + 1))
                    })?)
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}`",
                        idx + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Values set in `top` win.
    pub fn overlay(self, top: ChronologyConfig) -> Self {
        ChronologyConfig {
            tau: top.tau.or(self.tau),
            d_max: top.d_max.or(self.d_max),
            k_var: top.k_var.or(self.k_var),
            reference_year: top.reference_year.or(self.reference_year),
        }
    }

    /// Fills unset values from [`ChronologyModel::default`] and validates.
    pub fn resolve(&self) -> Result<ChronologyModel> {
        let d = ChronologyModel::default();
        ChronologyModel::new(
            self.tau.unwrap_or(d.tau),
            self.d_max.unwrap_or(d.d_max),
            self.k_var.unwrap_or(d.k_var),
            self.reference_year.unwrap_or(d.reference_year),
        )
        .map_err(|e| Error::Config(e.to_string()))
    }
}

/// Random word source for the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct WordGenerator {
    alphabet: Vec<char>,
    min_len: usize,
    max_len: usize,
}

impl Default for WordGenerator {
    /// Latin letters used in Malagasy orthography, lengths 3 to 7.
    fn default() -> Self {
        WordGenerator::new("abdefghijklmnoprstvyz", 3, 7).expect("valid default")
    }
}

impl WordGenerator {
    pub fn new(alphabet: &str, min_len: usize, max_len: usize) -> Result<Self> {
        let mut chars: Vec<char> = alphabet.chars().collect();
        chars.sort_unstable();
        chars.dedup();
        if chars.is_empty() || min_len == 0 || min_len > max_len {
            return Err(Error::InvalidInput(format!(
                "word generator needs a nonempty alphabet and 1 <= min_len <= max_len, got {min_len}..={max_len}"
            )));
        }
        let policy = NormalizationPolicy::default();
        for c in &chars {
            normalize_word(&c.to_string(), &policy)
                .map_err(|e| Error::InvalidInput(format!("alphabet: {e}")))?;
        }
        Ok(WordGenerator {
            alphabet: chars,
            min_len,
            max_len,
        })
    }

    pub fn word<R: Rng>(&self, rng: &mut R) -> Word {
        let len = rng.random_range(self.min_len..=self.max_len);
        let s: String = (0..len)
            .map(|_| self.alphabet[rng.random_range(0..self.alphabet.len())])
            .collect();
        Word::parse(&s).expect("alphabet validated at construction")
    }

    /// A complete lexicon of `m` random words.
    pub fn lexicon<R: Rng>(&self, tag: &str, m: u32, rng: &mut R) -> Lexicon {
        let mut lex = Lexicon::new(tag);
        for id in 1..=m {
            lex.set(MeaningId::new(id, m).expect("in range"), self.word(rng));
        }
        lex
    }
}

/// Monte-Carlo mean and standard error of the renormalized distance between
/// two independent generator words.
pub fn random_word_baseline(generator: &WordGenerator, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let a = generator.word(&mut rng);
        let b = generator.word(&mut rng);
        let d = word_distance(&a, &b).value();
        sum += d;
        sum_sq += d * d;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Evolves `ancestor` down `tree`.
///
/// On a branch of length `t` every word is independently replaced by a fresh
/// generator word with probability `1 - exp(-rate * t)`. Each branch draws
/// from its own ChaCha stream, and every (branch, meaning) consumes the same
/// random numbers whether or not a replacement happens, so runs with the same
/// seed on trees of equal shape are coupled: lengthening a branch only adds
/// replacements. Leaves come out in tree preorder.
pub fn simulate_divergence(
    ancestor: &Lexicon,
    tree: &Phylogeny,
    rate: f64,
    seed: u64,
    generator: &WordGenerator,
    m_catalog: u32,
) -> Result<Corpus> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Range(format!("replacement rate must be positive, got {rate}")));
    }
    let order = tree.preorder();
    let mut state: Vec<Option<Lexicon>> = vec![None; order.iter().max().map_or(0, |m| m + 1)];
    state[tree.root()] = Some(ancestor.clone());
    let mut leaves = Vec::new();
    for (ordinal, &id) in order.iter().enumerate() {
        if let Some(parent) = tree.node(id).parent {
            let mut lex = state[parent].clone().expect("parent visited first");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ordinal as u64);
            let p_replace = -(-rate * tree.branch_length(id)).exp_m1();
            let meanings: Vec<MeaningId> = lex.entries().map(|(m, _)| m).collect();
            for m in meanings {
                let u: f64 = rng.random();
                let fresh = generator.word(&mut rng);
                if u < p_replace {
                    lex.set(m, fresh);
                }
            }
            state[id] = Some(lex);
        }
        let node = tree.node(id);
        if node.is_leaf() {
            let label = node.label.clone().expect("validated leaf label");
            leaves.push(state[id].as_ref().unwrap().with_tag(label));
        }
    }
    Corpus::new(leaves, m_catalog)
}

/// Ancestor lexicon drawn from `seed` on a stream no branch uses.
pub fn random_ancestor(generator: &WordGenerator, m: u32, seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    generator.lexicon("ancestor", m, &mut rng)
}
