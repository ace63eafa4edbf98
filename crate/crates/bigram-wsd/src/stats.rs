//! Bigram contingency tables and association statistics.
//!
//! A bigram `(w1, w2)` is summarized against a corpus by a 2x2 table:
//!
//! ```text
//!              w2        not w2      totals
//! w1           n11       n12         n1+
//! not w1       n21       n22         n2+
//! totals       n+1       n+2         n++
//! ```
//!
//! `n11` counts occurrences of the bigram itself, `n1+` counts bigrams
//! whose first word is `w1`, and `n+1` counts bigrams whose second word
//! is `w2`. On top of the table this module provides the likelihood
//! ratio `G^2`, Pearson's `X^2`, a right-tailed Fisher's exact test,
//! pointwise mutual information, and the Dice coefficient, plus ranking
//! and the cross-test agreement protocol used for feature selection:
//! when the `G^2`, `X^2`, and Fisher rankings disagree, the Fisher
//! ranking is taken as canonical since it makes no distributional
//! assumptions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::corpus::Instance;
use crate::error::{Error, Result};

/// Bigram token counts for a corpus, with per-word marginals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BigramCounts {
    /// Joint count per bigram: `n11`.
    pub pairs: HashMap<(String, String), u64>,
    /// Bigrams with the given first word: `n1+`.
    pub first_marginal: HashMap<String, u64>,
    /// Bigrams with the given second word: `n+1`.
    pub second_marginal: HashMap<String, u64>,
    /// Total bigram tokens in the corpus: `n++`.
    pub total: u64,
}

/// Counts every adjacent token pair within each instance.
///
/// Pairs never span instance boundaries. An empty corpus yields
/// all-zero counts.
pub fn count_bigrams(instances: &[Instance]) -> BigramCounts {
    let mut counts = BigramCounts::default();
    for inst in instances {
        for pair in inst.tokens.windows(2) {
            counts.add(&pair[0], &pair[1]);
        }
    }
    counts
}

impl BigramCounts {
    fn add(&mut self, w1: &str, w2: &str) {
        *self
            .pairs
            .entry((w1.to_string(), w2.to_string()))
            .or_insert(0) += 1;
        *self.first_marginal.entry(w1.to_string()).or_insert(0) += 1;
        *self.second_marginal.entry(w2.to_string()).or_insert(0) += 1;
        self.total += 1;
    }

    /// Merges counts from another shard. Associative and commutative, so
    /// corpora may be counted in parallel and combined in any order.
    pub fn merge(mut self, other: BigramCounts) -> BigramCounts {
        for (pair, n) in other.pairs {
            *self.pairs.entry(pair).or_insert(0) += n;
        }
        for (w, n) in other.first_marginal {
            *self.first_marginal.entry(w).or_insert(0) += n;
        }
        for (w, n) in other.second_marginal {
            *self.second_marginal.entry(w).or_insert(0) += n;
        }
        self.total += other.total;
        self
    }

    /// Builds the 2x2 contingency table for `(w1, w2)`.
    ///
    /// The pair need not have been observed. Fails on an empty corpus or
    /// if the stored marginals are inconsistent with the joint count.
    pub fn contingency(&self, w1: &str, w2: &str) -> Result<ContingencyTable> {
        let n11 = self.pairs.get(&(w1.to_string(), w2.to_string())).copied().unwrap_or(0);
        let n1p = self.first_marginal.get(w1).copied().unwrap_or(0);
        let np1 = self.second_marginal.get(w2).copied().unwrap_or(0);
        let n12 = n1p.checked_sub(n11).ok_or_else(|| {
            Error::InvalidTable(format!("n11 > n1+ for ({w1}, {w2})"))
        })?;
        let n21 = np1.checked_sub(n11).ok_or_else(|| {
            Error::InvalidTable(format!("n11 > n+1 for ({w1}, {w2})"))
        })?;
        let n22 = self
            .total
            .checked_sub(n11 + n12 + n21)
            .ok_or_else(|| Error::InvalidTable(format!("marginals exceed total for ({w1}, {w2})")))?;
        ContingencyTable::new(n11, n12, n21, n22)
    }
}

/// A 2x2 table of observed bigram counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub n11: u64,
    pub n12: u64,
    pub n21: u64,
    pub n22: u64,
}

/// Cell counts expected under independence of the two words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedTable {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl ContingencyTable {
    /// Builds a table, rejecting the degenerate all-zero case.
    pub fn new(n11: u64, n12: u64, n21: u64, n22: u64) -> Result<Self> {
        if n11 + n12 + n21 + n22 == 0 {
            return Err(Error::InvalidTable("table is empty (n++ = 0)".to_string()));
        }
        Ok(ContingencyTable { n11, n12, n21, n22 })
    }

    pub fn n1p(&self) -> u64 {
        self.n11 + self.n12
    }

    pub fn n2p(&self) -> u64 {
        self.n21 + self.n22
    }

    pub fn np1(&self) -> u64 {
        self.n11 + self.n21
    }

    pub fn np2(&self) -> u64 {
        self.n12 + self.n22
    }

    pub fn npp(&self) -> u64 {
        self.n11 + self.n12 + self.n21 + self.n22
    }

    /// Swaps rows with columns.
    pub fn transpose(&self) -> Self {
        ContingencyTable {
            n11: self.n11,
            n12: self.n21,
            n21: self.n12,
            n22: self.n22,
        }
    }

    /// Expected counts `m_ij = n_i+ * n_+j / n_++`.
    pub fn expected(&self) -> ExpectedTable {
        let npp = self.npp() as f64;
        ExpectedTable {
            m11: self.n1p() as f64 * self.np1() as f64 / npp,
            m12: self.n1p() as f64 * self.np2() as f64 / npp,
            m21: self.n2p() as f64 * self.np1() as f64 / npp,
            m22: self.n2p() as f64 * self.np2() as f64 / npp,
        }
    }

    /// Likelihood ratio statistic `G^2 = 2 * sum n_ij * ln(n_ij / m_ij)`.
    ///
    /// Cells with `n_ij = 0` contribute nothing. Tiny negative rounding
    /// residue is clamped to zero.
    pub fn g_squared(&self) -> f64 {
        let m = self.expected();
        let cells = [
            (self.n11, m.m11),
            (self.n12, m.m12),
            (self.n21, m.m21),
            (self.n22, m.m22),
        ];
        let sum: f64 = cells
            .iter()
            .filter(|(n, _)| *n > 0)
            .map(|(n, m)| *n as f64 * (*n as f64 / m).ln())
            .sum();
        (2.0 * sum).max(0.0)
    }

    /// Pearson's statistic `X^2 = sum (n_ij - m_ij)^2 / m_ij`.
    ///
    /// A cell with `m_ij = 0` forces `n_ij = 0` (the marginals agree), and
    /// contributes nothing.
    pub fn x_squared(&self) -> f64 {
        let m = self.expected();
        let cells = [
            (self.n11, m.m11),
            (self.n12, m.m12),
            (self.n21, m.m21),
            (self.n22, m.m22),
        ];
        cells
            .iter()
            .map(|(n, m)| {
                if *m == 0.0 {
                    debug_assert_eq!(*n, 0, "m_ij = 0 with n_ij > 0 breaks marginal consistency");
                    0.0
                } else {
                    let d = *n as f64 - m;
                    d * d / m
                }
            })
            .sum()
    }

    /// Right-tailed Fisher's exact test: the probability, under the
    /// hypergeometric distribution with this table's marginals, of a
    /// joint count of `n11` or greater.
    pub fn fisher_exact(&self) -> f64 {
        self.fisher_exact_ln().exp().clamp(0.0, 1.0)
    }

    /// Natural log of the right-tailed Fisher p-value.
    ///
    /// Kept in log space so that rankings stay exact even when the
    /// p-value itself underflows to zero.
    pub fn fisher_exact_ln(&self) -> f64 {
        let n1p = self.n1p();
        let n2p = self.n2p();
        let np1 = self.np1();
        let k_max = n1p.min(np1);
        let ln_choose_npp = ln_choose(self.npp(), np1);
        let terms: Vec<f64> = (self.n11..=k_max)
            .map(|k| ln_choose(n1p, k) + ln_choose(n2p, np1 - k) - ln_choose_npp)
            .collect();
        log_sum_exp(&terms).min(0.0)
    }

    /// Pointwise mutual information `log2(n11 * n++ / (n+1 * n1+))`.
    ///
    /// Undefined for an unobserved bigram: `None` rather than negative
    /// infinity, so rankings never see it.
    pub fn pmi(&self) -> Option<f64> {
        if self.n11 == 0 {
            return None;
        }
        let ratio =
            self.n11 as f64 * self.npp() as f64 / (self.np1() as f64 * self.n1p() as f64);
        Some(ratio.log2())
    }

    /// Dice coefficient `2 * n11 / (n+1 + n1+)`, in `[0, 1]`.
    ///
    /// `None` when both marginals are zero (the words never occur in the
    /// relevant bigram positions at all).
    pub fn dice(&self) -> Option<f64> {
        let denom = self.np1() + self.n1p();
        if denom == 0 {
            return None;
        }
        Some(2.0 * self.n11 as f64 / denom as f64)
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Association measures available for scoring and ranking bigrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    G2,
    X2,
    Fisher,
    Dice,
    Pmi,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Measure::G2 => "g2",
            Measure::X2 => "x2",
            Measure::Fisher => "fisher",
            Measure::Dice => "dice",
            Measure::Pmi => "pmi",
        };
        f.write_str(s)
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g2" => Ok(Measure::G2),
            "x2" => Ok(Measure::X2),
            "fisher" => Ok(Measure::Fisher),
            "dice" => Ok(Measure::Dice),
            "pmi" => Ok(Measure::Pmi),
            other => Err(Error::InvalidInput(format!(
                "unknown measure {other:?} (expected g2, x2, fisher, dice, or pmi)"
            ))),
        }
    }
}

/// A bigram with its joint frequency and score under one measure.
///
/// For `fisher` the score is the p-value in `[0, 1]`; for every other
/// measure a larger score means stronger association.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredBigram {
    pub w1: String,
    pub w2: String,
    pub frequency: u64,
    pub score: f64,
    pub measure: Measure,
}

/// Scores and ranks all bigrams with frequency at least `min_freq`.
///
/// The result is sorted best-first (descending score, except ascending
/// p-value for `fisher`). Everything tied with the `top_k`-th score is
/// included, so the result may be longer than `top_k`; if fewer than
/// `top_k` bigrams qualify, all of them are returned. Within equal
/// scores the order is frequency descending, then `(w1, w2)` ascending,
/// which makes the output deterministic.
pub fn rank_bigrams(
    counts: &BigramCounts,
    measure: Measure,
    min_freq: u64,
    top_k: usize,
) -> Result<Vec<ScoredBigram>> {
    if min_freq < 1 {
        return Err(Error::InvalidInput("min_freq must be at least 1".to_string()));
    }
    if top_k < 1 {
        return Err(Error::InvalidInput("top_k must be at least 1".to_string()));
    }

    // rank_key is oriented so that larger is always better; for fisher it
    // is the negated log p-value, which stays informative long after the
    // p-value itself underflows to 0.
    let mut scored: Vec<(ScoredBigram, f64)> = Vec::new();
    for ((w1, w2), &freq) in &counts.pairs {
        if freq < min_freq {
            continue;
        }
        let table = counts.contingency(w1, w2)?;
        let (score, rank_key) = match measure {
            Measure::G2 => {
                let s = table.g_squared();
                (s, s)
            }
            Measure::X2 => {
                let s = table.x_squared();
                (s, s)
            }
            Measure::Fisher => {
                let ln_p = table.fisher_exact_ln();
                (ln_p.exp().clamp(0.0, 1.0), -ln_p)
            }
            Measure::Dice => {
                let s = table.dice().ok_or_else(|| {
                    Error::InvalidTable(format!("dice undefined for ({w1}, {w2})"))
                })?;
                (s, s)
            }
            Measure::Pmi => {
                let s = table.pmi().ok_or_else(|| {
                    Error::InvalidTable(format!("pmi undefined for ({w1}, {w2})"))
                })?;
                (s, s)
            }
        };
        scored.push((
            ScoredBigram {
                w1: w1.clone(),
                w2: w2.clone(),
                frequency: freq,
                score,
                measure,
            },
            rank_key,
        ));
    }

    scored.sort_unstable_by(|(a, ka), (b, kb)| {
        kb.partial_cmp(ka)
            .expect("scores are finite")
            .then_with(|| b.frequency.cmp(&a.frequency))
            .then_with(|| a.w1.cmp(&b.w1))
            .then_with(|| a.w2.cmp(&b.w2))
    });

    if scored.len() > top_k {
        let cutoff = scored[top_k - 1].1;
        let mut end = top_k;
        while end < scored.len() && scored[end].1 == cutoff {
            end += 1;
        }
        scored.truncate(end);
    }

    Ok(scored.into_iter().map(|(sb, _)| sb).collect())
}

/// Outcome of comparing the `G^2`, `X^2`, and Fisher rankings.
#[derive(Debug, Clone)]
pub struct AgreementReport {
    /// True when all three rankings select the same bigrams in the same order.
    pub agree: bool,
    /// Bigrams whose rank (or membership) differs between rankings, in
    /// `(w1, w2)` order.
    pub divergent: Vec<(String, String)>,
    /// The canonical power-divergence ranking: the Fisher ranking when any
    /// divergence was detected, the `G^2` ranking otherwise.
    pub canonical: Vec<ScoredBigram>,
}

/// Ranks the candidate set under `G^2`, `X^2`, and Fisher's exact test
/// and reports whether the induced top-`top_k` sets and orders coincide.
pub fn agreement_check(
    counts: &BigramCounts,
    min_freq: u64,
    top_k: usize,
) -> Result<AgreementReport> {
    let by_g2 = rank_bigrams(counts, Measure::G2, min_freq, top_k)?;
    let by_x2 = rank_bigrams(counts, Measure::X2, min_freq, top_k)?;
    let by_fisher = rank_bigrams(counts, Measure::Fisher, min_freq, top_k)?;

    let rank_of = |list: &[ScoredBigram]| -> HashMap<(String, String), usize> {
        list.iter()
            .enumerate()
            .map(|(i, s)| ((s.w1.clone(), s.w2.clone()), i))
            .collect()
    };
    let g2_ranks = rank_of(&by_g2);
    let x2_ranks = rank_of(&by_x2);
    let fisher_ranks = rank_of(&by_fisher);

    let mut all_keys: Vec<(String, String)> = g2_ranks
        .keys()
        .chain(x2_ranks.keys())
        .chain(fisher_ranks.keys())
        .cloned()
        .collect();
    all_keys.sort_unstable();
    all_keys.dedup();

    let mut divergent = Vec::new();
    for key in all_keys {
        let r_g2 = g2_ranks.get(&key);
        let r_x2 = x2_ranks.get(&key);
        let r_fisher = fisher_ranks.get(&key);
        if r_g2 != r_x2 || r_g2 != r_fisher {
            divergent.push(key);
        }
    }

    let agree = divergent.is_empty();
    let canonical = if agree { by_g2 } else { by_fisher };
    Ok(AgreementReport {
        agree,
        divergent,
        canonical,
    })
}
