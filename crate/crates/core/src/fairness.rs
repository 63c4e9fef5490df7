//! Fairness predicates on sharing matrices, decided exactly.
//!
//! Every predicate reports its worst instance as a [`Witness`]: the player
//! `i`, the index set `J` the defining inequality was evaluated on, and the
//! slack (left side minus right side). Ties go to the lexicographically
//! smallest `(i, sorted J)`. A notion holds iff the minimal slack is `≥ 0`
//! (or `> 0` for strong variants, `= 0` for equitability and exactness).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::divisions::SharingMatrix;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub player: usize,
    pub subset: Vec<usize>,
    pub slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// `None` only when the notion has no instances (e.g. envy with `n = 1`).
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FairnessError {
    #[error("k = {k} outside [{min}, {n}]")]
    KOutOfRange { k: usize, min: usize, n: usize },
    #[error("matrices have different sizes ({0} vs {1})")]
    DimensionMismatch(usize, usize),
}

fn rational(n: usize) -> Rational {
    Rational::from_integer((n as i64).into())
}

fn better(candidate: &Witness, best: &Option<Witness>) -> bool {
    match best {
        None => true,
        Some(b) => (&candidate.slack, candidate.player, &candidate.subset) < (&b.slack, b.player, &b.subset),
    }
}

fn verdict(best: Option<Witness>, strict: bool) -> Verdict {
    let holds = best.as_ref().is_none_or(|w| if strict { w.slack.is_positive() } else { !w.slack.is_negative() });
    Verdict { holds, witness: best }
}

/// Off-diagonal indices of row `i` ordered by decreasing value, ties by index.
fn ranked_others(m: &SharingMatrix, i: usize, descending: bool) -> Vec<usize> {
    let mut others: Vec<usize> = (0..m.n()).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| {
        let ord = m.get(i, a).cmp(m.get(i, b));
        let ord = if descending { ord.reverse() } else { ord };
        ord.then(a.cmp(&b))
    });
    others
}

/// Worst `J` for `k`-proportionality: for each player the `k − 1` largest
/// other entries of its row form the worst `J′`, and `J = J′ ∪ {i}`.
pub fn worst_k_witness(m: &SharingMatrix, k: usize) -> Result<Witness, FairnessError> {
    let n = m.n();
    if k < 2 || k > n {
        return Err(FairnessError::KOutOfRange { k, min: 2, n });
    }
    let mut best: Option<Witness> = None;
    for i in 0..n {
        let mut subset: Vec<usize> = ranked_others(m, i, true).into_iter().take(k - 1).collect();
        subset.push(i);
        subset.sort_unstable();
        let slack = subset_slack(m, i, &subset);
        let w = Witness { player: i, subset, slack };
        if better(&w, &best) {
            best = Some(w);
        }
    }
    Ok(best.expect("n ≥ 2"))
}

/// `M[i][i] − Σ_{j∈J} M[i][j] / |J|`: the slack of the defining inequality.
pub fn subset_slack(m: &SharingMatrix, i: usize, subset: &[usize]) -> Rational {
    let total: Rational = subset.iter().map(|&j| m.get(i, j)).sum();
    m.get(i, i) - total / rational(subset.len())
}

pub fn is_k_proportional(m: &SharingMatrix, k: usize) -> Result<Verdict, FairnessError> {
    Ok(verdict(Some(worst_k_witness(m, k)?), false))
}

pub fn is_strong_k_proportional(m: &SharingMatrix, k: usize) -> Result<Verdict, FairnessError> {
    Ok(verdict(Some(worst_k_witness(m, k)?), true))
}

fn proportional_witness(m: &SharingMatrix) -> Witness {
    let n = m.n();
    let share = Rational::from_integer(1.into()) / rational(n);
    let i = (0..n).min_by(|&a, &b| m.get(a, a).cmp(m.get(b, b)).then(a.cmp(&b))).unwrap();
    Witness { player: i, subset: (0..n).collect(), slack: m.get(i, i) - share }
}

pub fn is_proportional(m: &SharingMatrix) -> Verdict {
    verdict(Some(proportional_witness(m)), false)
}

pub fn is_strong_proportional(m: &SharingMatrix) -> Verdict {
    verdict(Some(proportional_witness(m)), true)
}

fn envy_witness(m: &SharingMatrix) -> Option<Witness> {
    let mut best = None;
    for i in 0..m.n() {
        if let Some(&j) = ranked_others(m, i, true).first() {
            let mut subset = vec![i, j];
            subset.sort_unstable();
            let w = Witness { player: i, subset, slack: m.get(i, i) - m.get(i, j) };
            if better(&w, &best) {
                best = Some(w);
            }
        }
    }
    best
}

pub fn is_envy_free(m: &SharingMatrix) -> Verdict {
    verdict(envy_witness(m), false)
}

pub fn is_strong_envy_free(m: &SharingMatrix) -> Verdict {
    verdict(envy_witness(m), true)
}

/// Witness: the player with the smallest diagonal value, `J` = {argmin,
/// argmax}, slack `min − max`.
pub fn is_equitable(m: &SharingMatrix) -> Verdict {
    let n = m.n();
    let lo = (0..n).min_by(|&a, &b| m.get(a, a).cmp(m.get(b, b)).then(a.cmp(&b))).unwrap();
    let hi = (0..n).max_by(|&a, &b| m.get(a, a).cmp(m.get(b, b)).then(b.cmp(&a))).unwrap();
    let mut subset = vec![lo, hi];
    subset.sort_unstable();
    subset.dedup();
    let slack = m.get(lo, lo) - m.get(hi, hi);
    Verdict { holds: slack.is_zero(), witness: Some(Witness { player: lo, subset, slack }) }
}

/// Witness: the entry `(i, j)` farthest from `1/n`, slack `−|M[i][j] − 1/n|`.
pub fn is_exact(m: &SharingMatrix) -> Verdict {
    let n = m.n();
    let share = Rational::from_integer(1.into()) / rational(n);
    let mut best: Option<Witness> = None;
    for i in 0..n {
        for j in 0..n {
            let w = Witness { player: i, subset: vec![j], slack: -(m.get(i, j) - &share).abs() };
            if better(&w, &best) {
                best = Some(w);
            }
        }
    }
    let best = best.unwrap();
    Verdict { holds: best.slack.is_zero(), witness: Some(best) }
}

/// Whether the diagonal of `dominator` weakly improves on that of `other`
/// for everyone and strictly for someone.
pub fn pareto_dominates(dominator: &SharingMatrix, other: &SharingMatrix) -> Result<bool, FairnessError> {
    if dominator.n() != other.n() {
        return Err(FairnessError::DimensionMismatch(dominator.n(), other.n()));
    }
    let n = dominator.n();
    let weak = (0..n).all(|i| dominator.get(i, i) >= other.get(i, i));
    let strict = (0..n).any(|i| dominator.get(i, i) > other.get(i, i));
    Ok(weak && strict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplementBound {
    /// `(n − |S|) / (n − |S| + 1)`
    Harmonic,
    /// `(n − |S|) / n`
    Linear,
}

impl ComplementBound {
    pub fn bound(self, n: usize, s: usize) -> Rational {
        match self {
            ComplementBound::Harmonic => rational(n - s) / rational(n - s + 1),
            ComplementBound::Linear => rational(n - s) / rational(n),
        }
    }
}

/// Checks `Σ_{j∉S} M[i][j] ≤ bound(|S|)` for every `S` with `|S| ≤ k` and
/// every `i ∈ S`. For fixed `i` and `|S|` the worst `S` adds the `|S| − 1`
/// smallest other entries of row `i`. Witness slack is `bound − outside`.
pub fn complement_bounded(m: &SharingMatrix, k: usize, kind: ComplementBound) -> Result<Verdict, FairnessError> {
    let n = m.n();
    if k < 1 || k > n {
        return Err(FairnessError::KOutOfRange { k, min: 1, n });
    }
    let mut best: Option<Witness> = None;
    for i in 0..n {
        let ranked = ranked_others(m, i, false);
        for s in 1..=k {
            let mut subset: Vec<usize> = ranked[..s - 1].to_vec();
            subset.push(i);
            subset.sort_unstable();
            let inside: Rational = subset.iter().map(|&j| m.get(i, j)).sum();
            let outside = Rational::from_integer(1.into()) - inside;
            let w = Witness { player: i, subset, slack: kind.bound(n, s) - outside };
            if better(&w, &best) {
                best = Some(w);
            }
        }
    }
    Ok(verdict(best, false))
}

pub fn is_chb(m: &SharingMatrix, k: usize) -> Result<Verdict, FairnessError> {
    complement_bounded(m, k, ComplementBound::Harmonic)
}

pub fn is_clb(m: &SharingMatrix, k: usize) -> Result<Verdict, FairnessError> {
    complement_bounded(m, k, ComplementBound::Linear)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KLevel {
    pub k: usize,
    pub proportional: Verdict,
    pub strong: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub n: usize,
    pub proportional: Verdict,
    pub strong_proportional: Verdict,
    pub envy_free: Verdict,
    pub strong_envy_free: Verdict,
    pub equitable: Verdict,
    pub exact: Verdict,
    /// `k = 2..=n`
    pub k_profile: Vec<KLevel>,
    /// `(k, verdict)` for `k = 1..=n`
    pub chb: Vec<(usize, Verdict)>,
    pub clb: Vec<(usize, Verdict)>,
}

impl FairnessReport {
    pub fn new(m: &SharingMatrix) -> Self {
        let n = m.n();
        let k_profile = (2..=n)
            .map(|k| KLevel {
                k,
                proportional: is_k_proportional(m, k).expect("k in range"),
                strong: is_strong_k_proportional(m, k).expect("k in range"),
            })
            .collect();
        FairnessReport {
            n,
            proportional: is_proportional(m),
            strong_proportional: is_strong_proportional(m),
            envy_free: is_envy_free(m),
            strong_envy_free: is_strong_envy_free(m),
            equitable: is_equitable(m),
            exact: is_exact(m),
            k_profile,
            chb: (1..=n).map(|k| (k, is_chb(m, k).expect("k in range"))).collect(),
            clb: (1..=n).map(|k| (k, is_clb(m, k).expect("k in range"))).collect(),
        }
    }

    pub fn k_level(&self, k: usize) -> Option<&KLevel> {
        self.k_profile.iter().find(|l| l.k == k)
    }
}
