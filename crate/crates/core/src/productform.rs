//! Exact computation of the product-form stationary laws of the
//! first-come-first-matched chains, the normalizing constant, and algebraic
//! verification of the reversibility identity and global balance.
//!
//! Everything here is exact rational arithmetic; a nonzero residual anywhere
//! is a bug, not a tolerance question.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::chain::{
    enumerate_admissible_backwards, is_admissible_backwards, DetailedLetter, DetailedWord,
};
use crate::error::{MatchError, Result};
use crate::graph::{CompatibilityGraph, Vertex, VertexSet};
use crate::input::{check_ncond, Measure};
use crate::policy::{self, PolicySpec, PreferenceList, QueueWord};
use crate::rational::{format_rational, Rational};

/// Stationary weight of a detailed word: the product of `mu(class)` over all
/// letters, bars ignored.
pub fn pi_b_weight(w: &DetailedWord, mu: &Measure) -> Rational {
    w.letters()
        .iter()
        .map(|l| mu.weight(l.class).clone())
        .product()
}

/// Unnormalized stationary weight of a queue word:
/// `prod_l mu(w_l) / mu(E({w_1..w_l}))`.
pub fn pi_w_weight(w: &QueueWord, mu: &Measure, g: &CompatibilityGraph) -> Result<Rational> {
    w.check_admissible(g)?;
    let mut support = VertexSet::EMPTY;
    let mut weight = Rational::one();
    for &letter in w.letters() {
        support.insert(letter);
        weight *= mu.weight(letter) / mu.mass(g.neighborhood(support)?);
    }
    Ok(weight)
}

/// The normalizing constant `alpha = 1/Z` with `Z` the exact sum of
/// unnormalized queue-word weights.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizingConstant {
    pub alpha_num: String,
    pub alpha_den: String,
    #[serde(skip)]
    pub alpha: Rational,
    #[serde(skip)]
    pub z: Rational,
}

/// Sum of `pi_w_weight(w) * t^{|w|}` over every admissible queue word, by
/// dynamic programming over independent-set support chains. Each chain step
/// introduces one new letter; repeats of letters already in the support `S`
/// form a geometric series with ratio `t * mu(S)/mu(E(S))`, finite under the
/// stability condition when `t = 1`.
fn z_series(g: &CompatibilityGraph, mu: &Measure, t: &Rational) -> Result<Rational> {
    fn recurse(
        g: &CompatibilityGraph,
        mu: &Measure,
        t: &Rational,
        support: VertexSet,
        memo: &mut HashMap<VertexSet, Rational>,
    ) -> Result<Rational> {
        if let Some(v) = memo.get(&support) {
            return Ok(v.clone());
        }
        let mut total = Rational::one();
        for b in g.vertices() {
            if support.contains(b) || g.neighbors(b).intersects(support) {
                continue;
            }
            let mut grown = support;
            grown.insert(b);
            let neighborhood_mass = mu.mass(g.neighborhood(grown)?);
            let ratio = t * mu.mass(grown) / neighborhood_mass.clone();
            if ratio >= Rational::one() {
                return Err(MatchError::NcondViolated);
            }
            let new_letter = t * mu.weight(b) / neighborhood_mass;
            let repeats = Rational::one() / (Rational::one() - ratio);
            let tail = recurse(g, mu, t, grown, memo)?;
            total += new_letter * repeats * tail;
        }
        memo.insert(support, total.clone());
        Ok(total)
    }
    recurse(g, mu, t, VertexSet::EMPTY, &mut HashMap::new())
}

/// Exact `Z` and `alpha = 1/Z`. Refuses when the stability condition fails,
/// since the series then diverges.
pub fn normalizing_constant(g: &CompatibilityGraph, mu: &Measure) -> Result<NormalizingConstant> {
    if !check_ncond(g, mu)?.satisfied {
        return Err(MatchError::NcondViolated);
    }
    let z = z_series(g, mu, &Rational::one())?;
    let alpha = Rational::one() / z.clone();
    Ok(NormalizingConstant {
        alpha_num: alpha.numer().to_string(),
        alpha_den: alpha.denom().to_string(),
        alpha,
        z,
    })
}

/// Direct sum of queue-word weights over words of length at most `max_len`.
pub fn z_truncated(g: &CompatibilityGraph, mu: &Measure, max_len: usize) -> Result<Rational> {
    fn extend(
        g: &CompatibilityGraph,
        mu: &Measure,
        support: VertexSet,
        weight: &Rational,
        remaining: usize,
        total: &mut Rational,
    ) {
        if remaining == 0 {
            return;
        }
        for b in g.vertices() {
            if g.neighbors(b).intersects(support) {
                continue;
            }
            let mut grown = support;
            grown.insert(b);
            let w = weight * mu.weight(b)
                / mu.mass(g.neighborhood(grown).expect("support within graph"));
            *total += w.clone();
            extend(g, mu, grown, &w, remaining - 1, total);
        }
    }
    let mut total = Rational::one();
    extend(g, mu, VertexSet::EMPTY, &Rational::one(), max_len, &mut total);
    Ok(total)
}

/// Upper bound on the weight the length-`max_len` truncation misses. With
/// `t > 1` such that `t * mu(S) < mu(E(S))` for every independent set `S`,
/// the tail is at most `Z(t) / t^{max_len + 1}`.
pub fn z_tail_bound(g: &CompatibilityGraph, mu: &Measure, max_len: usize) -> Result<Rational> {
    let mut max_ratio = Rational::zero();
    for ind in g.independent_sets() {
        let ratio = mu.mass(ind.members) / mu.mass(g.neighborhood(ind.members)?);
        if ratio >= Rational::one() {
            return Err(MatchError::NcondViolated);
        }
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    // Midpoint between 1 and 1/max_ratio.
    let t = (Rational::one() + Rational::one() / max_ratio) / Rational::from_integer(2.into());
    let z_t = z_series(g, mu, &t)?;
    let mut scale = Rational::one();
    for _ in 0..=max_len {
        scale *= t.clone();
    }
    Ok(z_t / scale)
}

/// Transition probabilities of the backwards detailed chain out of one
/// admissible state: one successor per arrival class.
///
/// From a non-empty state, an arrival incompatible with every unbarred
/// letter is appended; an arrival compatible with the oldest unbarred letter
/// matches it, dropping the head up to the next unbarred letter and
/// appending the matched class barred; an arrival whose oldest compatible
/// unbarred letter sits at position `k >= 2` replaces that letter by the
/// arrival's barred class and appends the matched class barred.
pub fn backwards_successors(
    w: &DetailedWord,
    g: &CompatibilityGraph,
    mu: &Measure,
) -> Vec<(DetailedWord, Rational)> {
    let mut out: Vec<(DetailedWord, Rational)> = Vec::new();
    let mut push = |word: DetailedWord, p: Rational| {
        for (existing, prob) in out.iter_mut() {
            if *existing == word {
                *prob += p;
                return;
            }
        }
        out.push((word, p));
    };

    if w.is_empty() {
        for a in g.vertices() {
            push(
                DetailedWord(vec![DetailedLetter::plain(a)]),
                mu.weight(a).clone(),
            );
        }
        return out;
    }

    let letters = w.letters();
    let head_class = letters[0].class;
    for a in g.vertices() {
        let oldest_compatible = letters
            .iter()
            .position(|l| !l.barred && g.adjacent(l.class, a));
        match oldest_compatible {
            None => {
                let mut grown = letters.to_vec();
                grown.push(DetailedLetter::plain(a));
                push(DetailedWord(grown), mu.weight(a).clone());
            }
            Some(0) => {
                // The arrival matches the oldest item; every such class leads
                // to the same successor, so the probabilities accumulate to
                // mu(E(head)).
                let next_unbarred = letters[1..].iter().position(|l| !l.barred);
                let successor = match next_unbarred {
                    None => DetailedWord::empty(),
                    Some(offset) => {
                        let mut tail = letters[1 + offset..].to_vec();
                        tail.push(DetailedLetter::barred(head_class));
                        DetailedWord(tail)
                    }
                };
                push(successor, mu.weight(a).clone());
            }
            Some(k) => {
                let mut grown = letters.to_vec();
                let matched_class = grown[k].class;
                grown[k] = DetailedLetter::barred(a);
                grown.push(DetailedLetter::barred(matched_class));
                push(DetailedWord(grown), mu.weight(a).clone());
            }
        }
    }
    out
}

/// Transition probability of the forwards detailed chain between two given
/// states, evaluated from the chain's definition.
///
/// A barred head is consumed with probability one. An unbarred head of class
/// `c` matches the first unbarred compatible letter in the tail when one
/// exists (probability one); otherwise its match lies past the current
/// horizon and the state grows by letters outside `E(c)` followed by the
/// barred copy of `c`, with probability `mu(b_1)...mu(b_s) mu(E(c))`.
pub fn forwards_transition_probability(
    from: &DetailedWord,
    to: &DetailedWord,
    g: &CompatibilityGraph,
    mu: &Measure,
) -> Rational {
    let neighborhood_mass = |c: Vertex| mu.mass(g.neighbors(c));

    // Growth tail shared by the empty and no-compatible cases: the suffix
    // must be unbarred letters outside E(c) followed by barred c.
    let growth_probability = |suffix: &[DetailedLetter], c: Vertex| -> Rational {
        let Some((last, body)) = suffix.split_last() else {
            return Rational::zero();
        };
        if *last != DetailedLetter::barred(c) {
            return Rational::zero();
        }
        let mut p = neighborhood_mass(c);
        for l in body {
            if l.barred || g.adjacent(l.class, c) {
                return Rational::zero();
            }
            p *= mu.weight(l.class);
        }
        p
    };

    let letters = from.letters();
    if letters.is_empty() {
        let target = to.letters();
        let Some(last) = target.last() else {
            return Rational::zero();
        };
        let c = last.class;
        return mu.weight(c) * growth_probability(target, c);
    }

    let head = letters[0];
    let tail = &letters[1..];
    if head.barred {
        return if to.letters() == tail {
            Rational::one()
        } else {
            Rational::zero()
        };
    }

    let c = head.class;
    match tail
        .iter()
        .position(|l| !l.barred && g.adjacent(l.class, c))
    {
        Some(offset) => {
            let mut expected = tail.to_vec();
            expected[offset] = DetailedLetter::barred(c);
            if to.letters() == expected {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
        None => {
            let target = to.letters();
            if target.len() <= tail.len() || target[..tail.len()] != *tail {
                return Rational::zero();
            }
            growth_probability(&target[tail.len()..], c)
        }
    }
}

/// A state set with exact outgoing transition rows. Rows always sum to one.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    pub states: Vec<DetailedWord>,
    pub rows: Vec<Vec<(DetailedWord, Rational)>>,
}

/// Builds the backwards-chain table over all admissible states up to
/// `max_len`, verifying that every row sums to exactly one and lands on
/// admissible states.
pub fn backwards_transition_table(
    g: &CompatibilityGraph,
    mu: &Measure,
    max_len: usize,
) -> Result<TransitionTable> {
    let states = enumerate_admissible_backwards(g, max_len)?;
    let mut rows = Vec::with_capacity(states.len());
    for state in &states {
        let row = backwards_successors(state, g, mu);
        let total: Rational = row.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(MatchError::Internal(format!(
                "transition row out of {} sums to {}",
                state.format(g),
                format_rational(&total)
            )));
        }
        for (successor, _) in &row {
            if is_admissible_backwards(successor, g).is_err() {
                return Err(MatchError::Internal(format!(
                    "inadmissible successor {} of {}",
                    successor.format(g),
                    state.format(g)
                )));
            }
        }
        rows.push(row);
    }
    Ok(TransitionTable { states, rows })
}

/// A failed exact identity, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualWitness {
    pub state: String,
    pub other: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KellyReport {
    pub states_checked: usize,
    pub checked_pairs: usize,
    pub max_residual_num: String,
    pub max_residual_den: String,
    pub witnesses: Vec<ResidualWitness>,
}

impl KellyReport {
    pub fn passed(&self) -> bool {
        self.max_residual_num == "0"
    }
}

/// Verifies, over every enumerated state against both its reachable
/// successors and every other enumerated state, the exact identity
/// `PiB(w) P_B(w -> w') = PiB(rd(w')) P_F(rd(w') -> rd(w))`, `rd` being the
/// reverse dual. Requires the stability condition; `max_len <= 6`.
pub fn verify_kelly(g: &CompatibilityGraph, mu: &Measure, max_len: usize) -> Result<KellyReport> {
    if max_len > 6 {
        return Err(MatchError::GuardExceeded(format!(
            "max_len {max_len} exceeds the reversibility-check guard of 6"
        )));
    }
    if !check_ncond(g, mu)?.satisfied {
        return Err(MatchError::NcondViolated);
    }
    let table = backwards_transition_table(g, mu, max_len)?;
    let mut checked_pairs = 0usize;
    let mut max_residual = Rational::zero();
    let mut witnesses = Vec::new();

    let mut check = |w: &DetailedWord, w2: &DetailedWord, p_b: &Rational| {
        let lhs = pi_b_weight(w, mu) * p_b;
        let rd_w2 = w2.reverse_dual();
        let p_f = forwards_transition_probability(&rd_w2, &w.reverse_dual(), g, mu);
        let rhs = pi_b_weight(&rd_w2, mu) * p_f;
        let residual = (lhs.clone() - rhs.clone()).abs();
        checked_pairs += 1;
        if !residual.is_zero() {
            if residual > max_residual {
                max_residual = residual.clone();
            }
            witnesses.push(ResidualWitness {
                state: w.format(g),
                other: w2.format(g),
                lhs: format_rational(&lhs),
                rhs: format_rational(&rhs),
            });
        }
    };

    for (state, row) in table.states.iter().zip(&table.rows) {
        // Positive transitions, including successors one letter longer than
        // the enumeration.
        for (successor, p) in row {
            check(state, successor, p);
        }
        // Zero transitions between enumerated states: the identity forces
        // the forwards probability to vanish as well.
        for other in &table.states {
            if row.iter().any(|(s, _)| s == other) {
                continue;
            }
            check(state, other, &Rational::zero());
        }
    }

    Ok(KellyReport {
        states_checked: table.states.len(),
        checked_pairs,
        max_residual_num: max_residual.numer().to_string(),
        max_residual_den: max_residual.denom().to_string(),
        witnesses,
    })
}

/// Enumerates admissible queue words up to `max_len`, by length then
/// lexicographically.
pub fn enumerate_queue_words(g: &CompatibilityGraph, max_len: usize) -> Vec<QueueWord> {
    let mut out = vec![QueueWord::empty()];
    let mut frontier: Vec<Vec<Vertex>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for word in &frontier {
            let support = VertexSet::from_iter(word.iter().copied());
            for c in g.vertices() {
                if g.neighbors(c).intersects(support) {
                    continue;
                }
                let mut grown = word.clone();
                grown.push(c);
                next.push(grown);
            }
        }
        out.extend(
            next.iter()
                .map(|w| QueueWord::from_letters_unchecked(w.clone())),
        );
        frontier = next;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub states_checked: usize,
    pub max_residual_num: String,
    pub max_residual_den: String,
    pub witnesses: Vec<ResidualWitness>,
}

impl BalanceReport {
    pub fn passed(&self) -> bool {
        self.max_residual_num == "0"
    }
}

/// Verifies global balance of the unnormalized product-form law under first
/// come first matched: for every admissible queue word up to `max_len`, the
/// weighted inflow over its complete predecessor set equals its own weight.
/// Predecessors either append the target's last letter or insert one letter
/// that the arrival then removes; both families are finite because a step
/// changes the length by exactly one.
pub fn verify_global_balance(
    g: &CompatibilityGraph,
    mu: &Measure,
    max_len: usize,
) -> Result<BalanceReport> {
    if max_len > 6 {
        return Err(MatchError::GuardExceeded(format!(
            "max_len {max_len} exceeds the balance-check guard of 6"
        )));
    }
    if !check_ncond(g, mu)?.satisfied {
        return Err(MatchError::NcondViolated);
    }
    let sigma = PreferenceList::canonical(g);
    let mut max_residual = Rational::zero();
    let mut witnesses = Vec::new();
    let words = enumerate_queue_words(g, max_len);
    for target in &words {
        // Candidate predecessors: one letter shorter (arrival appended) or
        // one letter longer (arrival removed the inserted letter).
        let mut candidates: Vec<Vec<Vertex>> = Vec::new();
        if !target.is_empty() {
            candidates.push(target.letters()[..target.len() - 1].to_vec());
        }
        for i in 0..=target.len() {
            for c in g.vertices() {
                let mut inserted = target.letters().to_vec();
                inserted.insert(i, c);
                if QueueWord::new(g, inserted.clone()).is_ok() && !candidates.contains(&inserted) {
                    candidates.push(inserted);
                }
            }
        }

        let mut inflow = Rational::zero();
        for candidate in &candidates {
            let w = QueueWord::from_letters_unchecked(candidate.clone());
            for v in g.vertices() {
                let mut letters = candidate.clone();
                policy::step_word(&mut letters, v, &sigma, &PolicySpec::Fcfm, g);
                if letters == target.letters() {
                    inflow += pi_w_weight(&w, mu, g)? * mu.weight(v);
                }
            }
        }

        let expected = pi_w_weight(target, mu, g)?;
        let residual = (inflow.clone() - expected.clone()).abs();
        if !residual.is_zero() {
            if residual > max_residual {
                max_residual = residual.clone();
            }
            witnesses.push(ResidualWitness {
                state: target.format(g),
                other: String::new(),
                lhs: format_rational(&inflow),
                rhs: format_rational(&expected),
            });
        }
    }
    Ok(BalanceReport {
        states_checked: words.len(),
        max_residual_num: max_residual.numer().to_string(),
        max_residual_den: max_residual.denom().to_string(),
        witnesses,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    pub states_checked: usize,
    pub enumerated_words: usize,
    pub max_residual_num: String,
    pub max_residual_den: String,
    pub witnesses: Vec<ResidualWitness>,
}

impl MarginalReport {
    pub fn passed(&self) -> bool {
        self.max_residual_num == "0"
    }
}

/// Checks that the queue-word law is the marginal of the detailed law. The
/// admissible detailed words restricting to a queue word `w` insert barred
/// letters slot by slot, each slot's alphabet being the complement of the
/// neighborhood of the prefix; summing the geometric slot series in closed
/// form must reproduce the queue-word weight exactly.
///
/// The slot alphabets are derived from the structural admissibility
/// conditions rather than assumed, and a finite enumeration (up to 3 barred
/// letters) confirms the partial sums stay below the closed form.
pub fn marginalize_check(
    g: &CompatibilityGraph,
    mu: &Measure,
    max_len: usize,
) -> Result<MarginalReport> {
    if !check_ncond(g, mu)?.satisfied {
        return Err(MatchError::NcondViolated);
    }
    let mut max_residual = Rational::zero();
    let mut witnesses = Vec::new();
    let mut enumerated_words = 0usize;
    let words = enumerate_queue_words(g, max_len);
    for w in &words {
        let q = w.len();
        // Slot alphabets from the admissibility conditions.
        let mut slot_alphabets: Vec<VertexSet> = Vec::with_capacity(q);
        for slot in 1..=q {
            let mut alphabet = VertexSet::EMPTY;
            for a in g.vertices() {
                let mut letters: Vec<DetailedLetter> = w.letters()[..slot]
                    .iter()
                    .map(|&c| DetailedLetter::plain(c))
                    .collect();
                letters.push(DetailedLetter::barred(a));
                letters.extend(w.letters()[slot..].iter().map(|&c| DetailedLetter::plain(c)));
                if is_admissible_backwards(&DetailedWord(letters), g).is_ok() {
                    alphabet.insert(a);
                }
            }
            let support = VertexSet::from_iter(w.letters()[..slot].iter().copied());
            let predicted = VertexSet(g.all_vertices().0 & !g.neighborhood(support)?.0);
            if alphabet != predicted {
                return Err(MatchError::Internal(format!(
                    "slot alphabet mismatch for {} at slot {slot}",
                    w.format(g)
                )));
            }
            slot_alphabets.push(alphabet);
        }

        // Closed-form marginal: each slot contributes 1/(1 - mu(alphabet)).
        let mut marginal = Rational::one();
        for (slot, alphabet) in slot_alphabets.iter().enumerate() {
            let slot_mass = mu.mass(*alphabet);
            marginal *= mu.weight(w.letters()[slot]) / (Rational::one() - slot_mass);
        }

        // Finite enumeration over per-slot bar counts with at most 3 bars.
        let mut partial = Rational::zero();
        let mut count = 0usize;
        let mut bar_counts = vec![0usize; q];
        'enumerate: loop {
            let mut weight: Rational = w
                .letters()
                .iter()
                .map(|&c| mu.weight(c).clone())
                .product();
            for (slot, &k) in bar_counts.iter().enumerate() {
                let mass = mu.mass(slot_alphabets[slot]);
                for _ in 0..k {
                    weight *= mass.clone();
                }
            }
            partial += weight;
            count += 1;
            if q == 0 {
                break;
            }
            let mut idx = 0;
            loop {
                bar_counts[idx] += 1;
                if bar_counts.iter().sum::<usize>() <= 3 {
                    break;
                }
                bar_counts[idx] = 0;
                idx += 1;
                if idx == q {
                    break 'enumerate;
                }
            }
        }
        enumerated_words += count;
        if q > 0 && partial >= marginal {
            return Err(MatchError::Internal(format!(
                "partial marginal sum is not below the closed form for {}",
                w.format(g)
            )));
        }

        let expected = pi_w_weight(w, mu, g)?;
        let residual = (marginal.clone() - expected.clone()).abs();
        if !residual.is_zero() {
            if residual > max_residual {
                max_residual = residual.clone();
            }
            witnesses.push(ResidualWitness {
                state: w.format(g),
                other: String::new(),
                lhs: format_rational(&marginal),
                rhs: format_rational(&expected),
            });
        }
    }
    Ok(MarginalReport {
        states_checked: words.len(),
        enumerated_words,
        max_residual_num: max_residual.numer().to_string(),
        max_residual_den: max_residual.denom().to_string(),
        witnesses,
    })
}
