//! Constructive erasing words and their verifiers.
//!
//! An erasing word of an even queue word `u` is an even word `z` that is
//! perfectly matchable on its own and together with `u`, for every
//! preference sequence the policy can draw. A strong erasing word works for
//! every non-adjacent two-letter prefix and has every even right sub-word
//! perfectly matchable; feeding one to any sub-additive policy shrinks any
//! buffer by at least two.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{MatchError, Result};
use crate::graph::{CompatibilityGraph, Vertex};
use crate::policy::{self, PolicySpec, PreferenceList, QueueWord};

/// Preference sequences exceeding this count are verified by sampling.
const EXHAUSTIVE_BUDGET: u64 = 10_000;
/// Sample size used above the exhaustive budget.
const SAMPLE_COUNT: u64 = 1_000;
/// Length cap for the fallback search over two-letter erasing words.
const PAIR_SEARCH_CAP: usize = 8;
/// Length cap for the strong-erasing-word search.
const STRONG_SEARCH_CAP: usize = 8;
/// Fixed seed for sampled verification, so certificates are reproducible.
const VERIFY_SEED: u64 = 0x5eed_e7a5;

/// How thoroughly a certificate was verified over preference draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Coverage {
    /// The policy draws a single fixed list; one replay is exhaustive.
    Deterministic,
    /// Every preference sequence was replayed.
    Exhaustive { sequences: u64 },
    /// A fixed-seed sample of sequences was replayed.
    Sampled { sequences: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Plain,
    Strong,
    Minimal,
}

/// A verified erasing word, with the replay-transcript hash for audit.
#[derive(Clone, Debug, Serialize)]
pub struct ErasingCertificate {
    pub target: String,
    pub word: String,
    pub kind: CertificateKind,
    pub coverage: Coverage,
    pub transcript_hash: String,
    #[serde(skip)]
    pub target_classes: Vec<Vertex>,
    #[serde(skip)]
    pub word_classes: Vec<Vertex>,
}

impl ErasingCertificate {
    fn new(
        g: &CompatibilityGraph,
        target: Vec<Vertex>,
        word: Vec<Vertex>,
        kind: CertificateKind,
        coverage: Coverage,
        transcript_hash: String,
    ) -> Self {
        ErasingCertificate {
            target: policy::format_classes(g, &target),
            word: policy::format_classes(g, &word),
            kind,
            coverage,
            transcript_hash,
            target_classes: target,
            word_classes: word,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialization cannot fail")
    }
}

fn all_permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in all_permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Per-position preference options relevant to a replay: only the arriving
/// class's entry is consulted, so each option is the canonical list with
/// that entry overridden. `None` when the policy's draws are deterministic.
fn per_position_options(
    policy: &PolicySpec,
    g: &CompatibilityGraph,
    classes: &[Vertex],
) -> Option<Vec<Vec<PreferenceList>>> {
    if policy.deterministic_preferences(g).is_some() {
        return None;
    }
    let canonical = PreferenceList::canonical(g);
    let with_override = |class: Vertex, order: Vec<Vertex>| {
        let mut prefs = canonical.clone();
        prefs.0[class] = order;
        prefs
    };
    let options = classes
        .iter()
        .map(|&class| match policy {
            PolicySpec::Ml | PolicySpec::Uniform => all_permutations(&g.neighbor_list(class))
                .into_iter()
                .map(|order| with_override(class, order))
                .collect(),
            PolicySpec::Random(r) => {
                let mut seen: Vec<Vec<Vertex>> = Vec::new();
                for (list, _) in &r.choices {
                    let order = list.order_for(class).to_vec();
                    if !seen.contains(&order) {
                        seen.push(order);
                    }
                }
                seen.into_iter()
                    .map(|order| with_override(class, order))
                    .collect()
            }
            _ => unreachable!("deterministic policies handled above"),
        })
        .collect();
    Some(options)
}

fn replay_leftover(
    g: &CompatibilityGraph,
    policy: &PolicySpec,
    classes: &[Vertex],
    prefs: &[&PreferenceList],
) -> usize {
    let mut word: Vec<Vertex> = Vec::new();
    for (&v, sigma) in classes.iter().zip(prefs) {
        policy::step_word(&mut word, v, sigma, policy, g);
    }
    word.len()
}

/// Checks `Q(classes) = empty` over the policy's preference draws, hashing
/// every replay into `hasher`. Returns the outcome and the coverage regime.
fn empties_under_coverage(
    g: &CompatibilityGraph,
    policy: &PolicySpec,
    classes: &[Vertex],
    hasher: &mut Sha256,
) -> (bool, Coverage) {
    hasher.update(policy::format_classes(g, classes).as_bytes());
    hasher.update(b"|");
    let mut record = |left: usize| {
        hasher.update(left.to_le_bytes());
    };

    let Some(options) = per_position_options(policy, g, classes) else {
        let prefs = policy
            .deterministic_preferences(g)
            .expect("deterministic policy");
        let refs: Vec<&PreferenceList> = classes.iter().map(|_| &prefs).collect();
        let left = replay_leftover(g, policy, classes, &refs);
        record(left);
        return (left == 0, Coverage::Deterministic);
    };

    let total: u64 = options
        .iter()
        .map(|o| o.len() as u64)
        .fold(1u64, |acc, n| acc.saturating_mul(n.max(1)));

    if total <= EXHAUSTIVE_BUDGET {
        let mut counter = vec![0usize; options.len()];
        loop {
            let prefs: Vec<&PreferenceList> = options
                .iter()
                .zip(&counter)
                .map(|(opts, &i)| &opts[i])
                .collect();
            let left = replay_leftover(g, policy, classes, &prefs);
            record(left);
            if left != 0 {
                return (false, Coverage::Exhaustive { sequences: total });
            }
            let mut idx = 0;
            loop {
                if idx == counter.len() {
                    return (true, Coverage::Exhaustive { sequences: total.max(1) });
                }
                counter[idx] += 1;
                if counter[idx] < options[idx].len() {
                    break;
                }
                counter[idx] = 0;
                idx += 1;
            }
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(VERIFY_SEED);
    for _ in 0..SAMPLE_COUNT {
        let prefs: Vec<&PreferenceList> = options
            .iter()
            .map(|opts| &opts[rng.gen_range(0..opts.len())])
            .collect();
        let left = replay_leftover(g, policy, classes, &prefs);
        record(left);
        if left != 0 {
            return (
                false,
                Coverage::Sampled {
                    sequences: SAMPLE_COUNT,
                },
            );
        }
    }
    (
        true,
        Coverage::Sampled {
            sequences: SAMPLE_COUNT,
        },
    )
}

/// The weaker of two coverage regimes, for certificates built from several
/// checks.
fn combine_coverage(a: Coverage, b: Coverage) -> Coverage {
    match (a, b) {
        (Coverage::Sampled { sequences: x }, Coverage::Sampled { sequences: y }) => {
            Coverage::Sampled {
                sequences: x.min(y),
            }
        }
        (s @ Coverage::Sampled { .. }, _) | (_, s @ Coverage::Sampled { .. }) => s,
        (Coverage::Exhaustive { sequences: x }, Coverage::Exhaustive { sequences: y }) => {
            Coverage::Exhaustive {
                sequences: x.max(y),
            }
        }
        (e @ Coverage::Exhaustive { .. }, _) | (_, e @ Coverage::Exhaustive { .. }) => e,
        (Coverage::Deterministic, Coverage::Deterministic) => Coverage::Deterministic,
    }
}

/// Detailed verification of the erasing property, returning the coverage and
/// the transcript hash.
fn verify_erases(
    g: &CompatibilityGraph,
    policy: &PolicySpec,
    target: &[Vertex],
    word: &[Vertex],
) -> (bool, Coverage, String) {
    let mut hasher = Sha256::new();
    hasher.update(b"erase|");
    let (alone_ok, alone_cov) = empties_under_coverage(g, policy, word, &mut hasher);
    let concatenated: Vec<Vertex> = target.iter().chain(word).copied().collect();
    let (joint_ok, joint_cov) = empties_under_coverage(g, policy, &concatenated, &mut hasher);
    let hash = format!("{:x}", hasher.finalize());
    (
        alone_ok && joint_ok,
        combine_coverage(alone_cov, joint_cov),
        hash,
    )
}

/// Whether `z` is an erasing word of `u`: both `z` and `u z` are perfectly
/// matched over the policy's preference coverage. `z` must have even length.
pub fn is_erasing_word(
    g: &CompatibilityGraph,
    u: &QueueWord,
    z: &[Vertex],
    policy: &PolicySpec,
) -> Result<bool> {
    if z.len() % 2 != 0 {
        return Err(MatchError::Precondition(
            "erasing words have even length".into(),
        ));
    }
    u.check_admissible(g)?;
    let (ok, _, _) = verify_erases(g, policy, u.letters(), z);
    Ok(ok)
}

/// All words of the given length over the vertex alphabet, lexicographic.
fn words_of_length(g: &CompatibilityGraph, len: usize) -> impl Iterator<Item = Vec<Vertex>> + '_ {
    let n = g.len();
    let count = n.checked_pow(len as u32).expect("search space in range");
    (0..count).map(move |mut code| {
        let mut word = vec![0; len];
        for slot in (0..len).rev() {
            word[slot] = code % n;
            code /= n;
        }
        word
    })
}

/// Breadth-first search for an erasing word of `u`, by increasing even
/// length up to `len_cap`.
fn search_erasing_word(
    g: &CompatibilityGraph,
    u: &QueueWord,
    policy: &PolicySpec,
    len_cap: usize,
) -> Option<(Vec<Vertex>, Coverage, String)> {
    let canonical = policy
        .deterministic_preferences(g)
        .unwrap_or_else(|| PreferenceList::canonical(g));
    for len in (0..=len_cap).step_by(2) {
        for candidate in words_of_length(g, len) {
            // Cheap canonical-preference precheck before full coverage.
            let refs: Vec<&PreferenceList> = candidate.iter().map(|_| &canonical).collect();
            if replay_leftover(g, policy, &candidate, &refs) != 0 {
                continue;
            }
            let joint: Vec<Vertex> = u.letters().iter().chain(&candidate).copied().collect();
            let refs: Vec<&PreferenceList> = joint.iter().map(|_| &canonical).collect();
            if replay_leftover(g, policy, &joint, &refs) != 0 {
                continue;
            }
            let (ok, coverage, hash) = verify_erases(g, policy, u.letters(), &candidate);
            if ok {
                return Some((candidate, coverage, hash));
            }
        }
    }
    None
}

/// The constructive erasing word for a two-letter target, built from the
/// path between the letters and, for even distances, a walk onto an induced
/// odd cycle. Every candidate is verified by replay; degenerate geometries
/// fall back to a bounded search.
pub fn two_letter_erasing_word(
    g: &CompatibilityGraph,
    i: Vertex,
    j: Vertex,
    policy: &PolicySpec,
) -> Result<ErasingCertificate> {
    if g.adjacent(i, j) {
        return Err(MatchError::Precondition(format!(
            "{} and {} are adjacent; the two-letter word is not a buffer state",
            g.name(i),
            g.name(j)
        )));
    }
    if g.is_bipartite() {
        return Err(MatchError::Precondition(
            "erasing words require a non-bipartite graph".into(),
        ));
    }
    let target = vec![i, j];
    for candidate in pair_candidates(g, i, j) {
        if candidate.is_empty() || candidate.len() % 2 != 0 {
            continue;
        }
        let (ok, coverage, hash) = verify_erases(g, policy, &target, &candidate);
        if ok {
            return Ok(ErasingCertificate::new(
                g,
                target,
                candidate,
                CertificateKind::Plain,
                coverage,
                hash,
            ));
        }
    }
    let u = QueueWord::new(g, target.clone())?;
    match search_erasing_word(g, &u, policy, PAIR_SEARCH_CAP) {
        Some((word, coverage, hash)) => Ok(ErasingCertificate::new(
            g,
            target,
            word,
            CertificateKind::Plain,
            coverage,
            hash,
        )),
        None => Err(MatchError::CapExceeded(format!(
            "no erasing word of {}{} within length {PAIR_SEARCH_CAP}",
            g.name(i),
            g.name(j)
        ))),
    }
}

/// Constructive candidates for the two-letter target, in the order they are
/// tried.
fn pair_candidates(g: &CompatibilityGraph, i: Vertex, j: Vertex) -> Vec<Vec<Vertex>> {
    let mut candidates = Vec::new();
    if i != j {
        let path = g.shortest_path(i, j);
        let distance = path.len() - 1;
        let interior: Vec<Vertex> = path[1..distance].to_vec();
        if distance % 2 == 1 {
            candidates.push(interior);
        } else {
            let anchor = path[distance - 1];
            let tail = cycle_tail(g, anchor);
            let mut doubled = interior.clone();
            doubled.push(anchor);
            let mut with_prefix = doubled;
            with_prefix.extend(tail.iter().copied());
            candidates.push(with_prefix);
            // When the anchor already sits on the cycle, the tail alone both
            // erases the target and matches itself.
            candidates.push(tail);
        }
    } else {
        candidates.push(cycle_tail(g, i));
    }
    candidates
}

/// The word `j1 j1 ... jq jq k1 k1 k2 k3 ... k_odd` walking from `anchor` to
/// the nearest vertex of an induced odd cycle and around it: doubled path
/// letters, a doubled cycle entry, then the rest of the cycle once.
fn cycle_tail(g: &CompatibilityGraph, anchor: Vertex) -> Vec<Vertex> {
    let Some(cycle) = g.shortest_odd_cycle() else {
        return Vec::new();
    };
    // Nearest cycle vertex (smallest index breaks ties).
    let entry = cycle
        .iter()
        .copied()
        .min_by_key(|&c| (g.distance(anchor, c), c))
        .expect("odd cycle is non-empty");
    let path = g.shortest_path(anchor, entry);
    let mut word = Vec::new();
    if path.len() >= 2 {
        for &p in &path[1..path.len() - 1] {
            word.push(p);
            word.push(p);
        }
    }
    word.push(entry);
    word.push(entry);
    let start = cycle.iter().position(|&c| c == entry).unwrap();
    for offset in 1..cycle.len() {
        word.push(cycle[(start + offset) % cycle.len()]);
    }
    word
}

/// Iteratively erases the last two letters of the running residual until the
/// whole buffer is matched, then verifies the concatenated word end to end.
/// Only sub-additive policies are accepted.
pub fn erasing_word(
    g: &CompatibilityGraph,
    u: &QueueWord,
    policy: &PolicySpec,
) -> Result<ErasingCertificate> {
    if !policy.is_subadditive() {
        return Err(MatchError::UnsupportedPolicy(policy.tag(g)));
    }
    u.check_admissible(g)?;
    if u.len() % 2 != 0 {
        return Err(MatchError::Precondition(
            "erasing targets have even length".into(),
        ));
    }
    if g.is_bipartite() && !u.is_empty() {
        return Err(MatchError::Precondition(
            "erasing words require a non-bipartite graph".into(),
        ));
    }

    let canonical = policy
        .deterministic_preferences(g)
        .unwrap_or_else(|| PreferenceList::canonical(g));
    let mut word: Vec<Vertex> = Vec::new();
    for _ in 0..=u.len() {
        let joint: Vec<Vertex> = u.letters().iter().chain(&word).copied().collect();
        let mut residual: Vec<Vertex> = Vec::new();
        for &v in &joint {
            policy::step_word(&mut residual, v, &canonical, policy, g);
        }
        if residual.is_empty() {
            break;
        }
        let (a, b) = (residual[residual.len() - 2], residual[residual.len() - 1]);
        let pair = two_letter_erasing_word(g, a, b, policy)?;
        word.extend(pair.word_classes);
    }

    let (ok, coverage, hash) = verify_erases(g, policy, u.letters(), &word);
    if ok {
        return Ok(ErasingCertificate::new(
            g,
            u.letters().to_vec(),
            word,
            CertificateKind::Plain,
            coverage,
            hash,
        ));
    }
    // The per-pair constructions hold for every draw, but the residual a
    // preference-dependent policy leaves can differ from the canonical one.
    // Fall back to a bounded search.
    match search_erasing_word(g, u, policy, PAIR_SEARCH_CAP) {
        Some((found, coverage, hash)) => Ok(ErasingCertificate::new(
            g,
            u.letters().to_vec(),
            found,
            CertificateKind::Plain,
            coverage,
            hash,
        )),
        None => Err(MatchError::CapExceeded(format!(
            "constructive route failed verification and no erasing word of {} was found within length {PAIR_SEARCH_CAP}",
            u.format(g)
        ))),
    }
}

/// Shortest erasing word of `u`, by exhaustive search over even lengths up
/// to `len_cap`. Also confirms the result is reduced: no proper split into
/// two erasing words of `u` exists, which minimality already forces.
pub fn minimal_erasing_word(
    g: &CompatibilityGraph,
    u: &QueueWord,
    policy: &PolicySpec,
    len_cap: usize,
) -> Result<Option<ErasingCertificate>> {
    u.check_admissible(g)?;
    if u.len() % 2 != 0 {
        return Err(MatchError::Precondition(
            "erasing targets have even length".into(),
        ));
    }
    let Some((word, coverage, hash)) = search_erasing_word(g, u, policy, len_cap) else {
        return Ok(None);
    };
    for split in (2..word.len()).step_by(2) {
        if is_erasing_word(g, u, &word[..split], policy)?
            && is_erasing_word(g, u, &word[split..], policy)?
        {
            return Err(MatchError::Internal(format!(
                "minimal-length erasing word {} of {} splits into two erasing words",
                policy::format_classes(g, &word),
                u.format(g)
            )));
        }
    }
    Ok(Some(ErasingCertificate::new(
        g,
        u.letters().to_vec(),
        word,
        CertificateKind::Minimal,
        coverage,
        hash,
    )))
}

fn verify_strong(
    g: &CompatibilityGraph,
    z: &[Vertex],
    policy: &PolicySpec,
) -> (bool, Coverage, String) {
    let mut hasher = Sha256::new();
    hasher.update(b"strong|");
    let mut coverage = Coverage::Deterministic;
    // Every even right sub-word is perfectly matchable.
    for start in (0..=z.len()).step_by(2) {
        let (ok, cov) = empties_under_coverage(g, policy, &z[start..], &mut hasher);
        coverage = combine_coverage(coverage, cov);
        if !ok {
            return (false, coverage, format!("{:x}", hasher.finalize()));
        }
    }
    // The word erases every admissible two-letter buffer.
    for i in g.vertices() {
        for j in g.vertices() {
            if g.adjacent(i, j) {
                continue;
            }
            let prefixed: Vec<Vertex> = [i, j].iter().chain(z).copied().collect();
            let (ok, cov) = empties_under_coverage(g, policy, &prefixed, &mut hasher);
            coverage = combine_coverage(coverage, cov);
            if !ok {
                return (false, coverage, format!("{:x}", hasher.finalize()));
            }
        }
    }
    (true, coverage, format!("{:x}", hasher.finalize()))
}

/// Whether `z` is a strong erasing word: it erases every non-adjacent
/// two-letter buffer and every even right sub-word of it is perfectly
/// matchable.
pub fn is_strong_erasing_word(
    g: &CompatibilityGraph,
    z: &[Vertex],
    policy: &PolicySpec,
) -> Result<bool> {
    if z.len() % 2 != 0 {
        return Err(MatchError::Precondition(
            "strong erasing words have even length".into(),
        ));
    }
    let (ok, _, _) = verify_strong(g, z, policy);
    Ok(ok)
}

/// Wraps a verified strong erasing word in a certificate.
pub fn certify_strong_erasing_word(
    g: &CompatibilityGraph,
    z: &[Vertex],
    policy: &PolicySpec,
) -> Result<Option<ErasingCertificate>> {
    if z.len() % 2 != 0 {
        return Err(MatchError::Precondition(
            "strong erasing words have even length".into(),
        ));
    }
    let (ok, coverage, hash) = verify_strong(g, z, policy);
    Ok(ok.then(|| {
        ErasingCertificate::new(
            g,
            Vec::new(),
            z.to_vec(),
            CertificateKind::Strong,
            coverage,
            hash,
        )
    }))
}

/// Whether a fixed priority list chases the given closed walk: every walk
/// vertex prioritizes its predecessor on the walk first.
fn priority_chases_walk(prefs: &PreferenceList, walk: &[Vertex]) -> bool {
    let n = walk.len();
    let mut required: Vec<Option<Vertex>> = vec![None; prefs.0.len()];
    for t in 0..n {
        let prev = walk[(t + n - 1) % n];
        match required[walk[t]] {
            Some(existing) if existing != prev => return false,
            _ => required[walk[t]] = Some(prev),
        }
    }
    required
        .iter()
        .enumerate()
        .all(|(v, req)| match req {
            Some(first) => prefs.order_for(v).first() == Some(first),
            None => true,
        })
}

/// Finds a strong erasing word for the graph and policy when one of the
/// constructions applies, otherwise falls back to a bounded search.
///
/// On separable graphs of order at least 3, a word with two letters per
/// maximal independent set (last two letters from different sets) works for
/// any policy. Under last-come-first-matched, and under priority lists that
/// chase the walk, the spanning odd closed walk repeated four times works.
/// `Ok(None)` reports an unsuccessful search honestly.
pub fn strong_erasing_word(
    g: &CompatibilityGraph,
    policy: &PolicySpec,
) -> Result<Option<ErasingCertificate>> {
    if g.is_bipartite() {
        return Err(MatchError::Precondition(
            "strong erasing words require a non-bipartite graph".into(),
        ));
    }

    if let Some((order, parts)) = g.separability_order() {
        if order >= 3 {
            let mut word = Vec::new();
            for part in &parts[..order - 2] {
                let m = part.iter().next().expect("parts are non-empty");
                word.push(m);
                word.push(m);
            }
            let a = parts[order - 2].iter().next().unwrap();
            let b = parts[order - 1].iter().next().unwrap();
            word.extend([a, b, a, b]);
            if let Some(cert) = certify_strong_erasing_word(g, &word, policy)? {
                return Ok(Some(cert));
            }
        }
    }

    let walk_applies = match policy {
        PolicySpec::Lcfm => true,
        PolicySpec::Priority(prefs) => g
            .spanning_odd_cycle()
            .map(|walk| priority_chases_walk(prefs, &walk))
            .unwrap_or(false),
        _ => false,
    };
    if walk_applies {
        let walk = g.spanning_odd_cycle().expect("non-bipartite graph");
        let word: Vec<Vertex> = std::iter::repeat(walk.iter().copied())
            .take(4)
            .flatten()
            .collect();
        if let Some(cert) = certify_strong_erasing_word(g, &word, policy)? {
            return Ok(Some(cert));
        }
    }

    for len in (2..=STRONG_SEARCH_CAP).step_by(2) {
        for candidate in words_of_length(g, len) {
            if let Some(cert) = certify_strong_erasing_word(g, &candidate, policy)? {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paw() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    fn weak6() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(
            6,
            &[
                (1, 2),
                (1, 3),
                (1, 5),
                (1, 6),
                (2, 3),
                (2, 4),
                (2, 6),
                (3, 4),
                (3, 5),
                (4, 5),
                (4, 6),
                (5, 6),
            ],
        )
        .unwrap()
    }

    fn classes(g: &CompatibilityGraph, text: &str) -> Vec<Vertex> {
        text.chars()
            .map(|c| g.vertex(&c.to_string()).unwrap())
            .collect()
    }

    #[test]
    fn replay_verifier_examples() {
        let g = paw();
        let u = QueueWord::parse(&g, "13").unwrap();
        assert!(is_erasing_word(&g, &u, &classes(&g, "2234"), &PolicySpec::Fcfm).unwrap());
        assert!(!is_erasing_word(&g, &u, &classes(&g, "22"), &PolicySpec::Fcfm).unwrap());
        assert!(is_erasing_word(
            &g,
            &QueueWord::empty(),
            &classes(&g, "34"),
            &PolicySpec::Fcfm
        )
        .unwrap());
        assert!(is_erasing_word(&g, &u, &[], &PolicySpec::Fcfm).is_ok());
        assert!(is_erasing_word(&g, &u, &classes(&g, "2"), &PolicySpec::Fcfm).is_err());
    }

    #[test]
    fn pair_construction_takes_cycle_branch_on_even_distance() {
        let g = paw();
        let (i, j) = (g.vertex("1").unwrap(), g.vertex("3").unwrap());
        assert_eq!(g.distance(i, j), 2);
        let cert = two_letter_erasing_word(&g, i, j, &PolicySpec::Fcfm).unwrap();
        assert_eq!(cert.word, "2234");
        assert!(is_erasing_word(
            &g,
            &QueueWord::parse(&g, "13").unwrap(),
            &cert.word_classes,
            &PolicySpec::Fcfm
        )
        .unwrap());
    }

    #[test]
    fn pair_construction_rejects_adjacent_targets() {
        let g = CompatibilityGraph::from_numbered(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(two_letter_erasing_word(&g, 0, 1, &PolicySpec::Fcfm).is_err());
    }

    #[test]
    fn whole_word_erasure_replays_to_empty() {
        let g = paw();
        for target in ["13", "1133", ""] {
            let u = QueueWord::parse(&g, target).unwrap();
            let cert = erasing_word(&g, &u, &PolicySpec::Fcfm).unwrap();
            assert!(
                is_erasing_word(&g, &u, &cert.word_classes, &PolicySpec::Fcfm).unwrap(),
                "target {target}: word {}",
                cert.word
            );
        }
        assert!(erasing_word(
            &g,
            &QueueWord::parse(&g, "13").unwrap(),
            &PolicySpec::Ms
        )
        .is_err());
    }

    #[test]
    fn minimal_word_for_double_two_is_length_two() {
        let g = paw();
        let u = QueueWord::parse(&g, "22").unwrap();
        let cert = minimal_erasing_word(&g, &u, &PolicySpec::Fcfm, 6)
            .unwrap()
            .unwrap();
        assert_eq!(cert.word_classes.len(), 2);
        assert_eq!(cert.word, "34");
    }

    #[test]
    fn minimal_word_for_empty_target_is_empty() {
        let g = paw();
        let cert = minimal_erasing_word(&g, &QueueWord::empty(), &PolicySpec::Fcfm, 4)
            .unwrap()
            .unwrap();
        assert!(cert.word_classes.is_empty());
    }

    #[test]
    fn minimal_word_respects_caps() {
        let g = paw();
        let u = QueueWord::parse(&g, "13").unwrap();
        let at_cap_0 = minimal_erasing_word(&g, &u, &PolicySpec::Fcfm, 0).unwrap();
        assert!(at_cap_0.is_none());
        // A length-2 erasing word of 13 exists: 2 removes the 1, 4 removes
        // the 3, and 24 alone is matched on arrival.
        let cert = minimal_erasing_word(&g, &u, &PolicySpec::Fcfm, 2)
            .unwrap()
            .unwrap();
        assert_eq!(cert.word, "24");
    }

    #[test]
    fn weak6_reference_words_are_strong() {
        let g = weak6();
        assert!(
            is_strong_erasing_word(&g, &classes(&g, "142356"), &PolicySpec::Fcfm).unwrap()
        );
        assert!(
            is_strong_erasing_word(&g, &classes(&g, "423561"), &PolicySpec::Fcfm).unwrap()
        );
    }

    #[test]
    fn separable_construction_verifies_on_weak6() {
        let g = weak6();
        let cert = strong_erasing_word(&g, &PolicySpec::Fcfm).unwrap().unwrap();
        assert_eq!(cert.kind, CertificateKind::Strong);
        assert!(is_strong_erasing_word(&g, &cert.word_classes, &PolicySpec::Fcfm).unwrap());
    }

    #[test]
    fn lcfm_walk_word_verifies_on_paw() {
        let g = paw();
        let cert = strong_erasing_word(&g, &PolicySpec::Lcfm).unwrap().unwrap();
        assert_eq!(cert.word_classes.len(), 20);
        assert!(is_strong_erasing_word(&g, &cert.word_classes, &PolicySpec::Lcfm).unwrap());
    }

    #[test]
    fn empty_word_is_not_strong_when_gaps_exist() {
        let g = paw();
        assert!(!is_strong_erasing_word(&g, &[], &PolicySpec::Fcfm).unwrap());
    }

    #[test]
    fn concatenation_of_erasing_words_still_erases() {
        let g = paw();
        let u = QueueWord::parse(&g, "13").unwrap();
        let z1 = classes(&g, "2234");
        let z2 = classes(&g, "24");
        let mut joined = z1.clone();
        joined.extend(&z2);
        assert!(is_erasing_word(&g, &u, &joined, &PolicySpec::Fcfm).unwrap());
    }
}
