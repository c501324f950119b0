//! Property-test engines for sub-additivity of the buffer size under input
//! concatenation and non-expansiveness of the class-detail update.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MatchError, Result};
use crate::graph::{CompatibilityGraph, Vertex};
use crate::policy::{self, apply_class, ClassDetail, PolicySpec, PreferenceList};

/// A replayable counterexample found by a property run.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyViolation {
    pub trial: u64,
    pub inputs: Vec<String>,
    pub lhs: u64,
    pub rhs: u64,
}

/// Outcome of a property run: every violation carries the trial index, so a
/// rerun with the same seed reproduces it.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub trials: u64,
    pub seed: u64,
    pub violations: Vec<PropertyViolation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_word<R: Rng>(g: &CompatibilityGraph, max_len: usize, rng: &mut R) -> Vec<Vertex> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..g.len())).collect()
}

/// Buffer size left by feeding `classes` with the given per-position
/// preference draws into an empty system.
fn leftover(
    classes: &[Vertex],
    prefs: &[PreferenceList],
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> usize {
    let mut word: Vec<Vertex> = Vec::new();
    for (v, sigma) in classes.iter().zip(prefs) {
        policy::step_word(&mut word, *v, sigma, policy, g);
    }
    word.len()
}

/// Samples word pairs `z', z''` and checks
/// `|Q(z'z'')| <= |Q(z')| + |Q(z'')|`, with one preference draw per arrival
/// position shared between the concatenated and the separate runs.
pub fn check_subadditive(
    policy: &PolicySpec,
    g: &CompatibilityGraph,
    trials: u64,
    max_word_len: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if trials == 0 {
        return Err(MatchError::Precondition("trials must be at least 1".into()));
    }
    let mut violations: Vec<PropertyViolation> = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let z1 = random_word(g, max_word_len, &mut rng);
            let z2 = random_word(g, max_word_len, &mut rng);
            let prefs: Vec<PreferenceList> = (0..z1.len() + z2.len())
                .map(|_| policy.draw_preferences(g, &mut rng))
                .collect();
            let separate_1 = leftover(&z1, &prefs[..z1.len()], policy, g);
            let separate_2 = leftover(&z2, &prefs[z1.len()..], policy, g);
            let concatenated: Vec<Vertex> = z1.iter().chain(&z2).copied().collect();
            let joint = leftover(&concatenated, &prefs, policy, g);
            if joint > separate_1 + separate_2 {
                Some(PropertyViolation {
                    trial,
                    inputs: vec![
                        policy::format_classes(g, &z1),
                        policy::format_classes(g, &z2),
                    ],
                    lhs: joint as u64,
                    rhs: (separate_1 + separate_2) as u64,
                })
            } else {
                None
            }
        })
        .collect();
    violations.sort_by_key(|v| v.trial);
    Ok(PropertyReport {
        trials,
        seed,
        violations,
    })
}

/// Random admissible class detail: counts on a random independent set, each
/// geometric and capped at 10.
fn random_class_detail<R: Rng>(g: &CompatibilityGraph, rng: &mut R) -> ClassDetail {
    let sets = g.independent_sets();
    let support = sets[rng.gen_range(0..sets.len())].members;
    let mut counts = vec![0u32; g.len()];
    for v in support.iter() {
        let mut n = 0u32;
        while n < 10 && rng.gen_bool(0.5) {
            n += 1;
        }
        counts[v] = n;
    }
    ClassDetail(counts)
}

/// Samples class-detail pairs, an arrival, and a common preference draw, and
/// checks the 1-Lipschitz bound
/// `||x' (+) (v,s) - x (+) (v,s)|| <= ||x' - x||` in the l1 norm.
pub fn check_nonexpansive(
    policy: &PolicySpec,
    g: &CompatibilityGraph,
    trials: u64,
    seed: u64,
) -> Result<PropertyReport> {
    if !policy.is_class_admissible() {
        return Err(MatchError::UnsupportedPolicy(policy.tag(g)));
    }
    if trials == 0 {
        return Err(MatchError::Precondition("trials must be at least 1".into()));
    }
    let mut violations: Vec<PropertyViolation> = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let x = random_class_detail(g, &mut rng);
            let x2 = random_class_detail(g, &mut rng);
            let v = rng.gen_range(0..g.len());
            let sigma = policy.draw_preferences(g, &mut rng);
            let y = apply_class(&x, v, &sigma, policy, g).expect("admissible by construction");
            let y2 = apply_class(&x2, v, &sigma, policy, g).expect("admissible by construction");
            let before = x.l1_distance(&x2);
            let after = y.l1_distance(&y2);
            if after > before {
                Some(PropertyViolation {
                    trial,
                    inputs: vec![
                        format!("{:?}", x.0),
                        format!("{:?}", x2.0),
                        g.name(v).to_string(),
                    ],
                    lhs: after,
                    rhs: before,
                })
            } else {
                None
            }
        })
        .collect();
    violations.sort_by_key(|v| v.trial);
    Ok(PropertyReport {
        trials,
        seed,
        violations,
    })
}

/// The fixed word-image expansion counterexamples on the paw graph: a single
/// common arrival doubles the class-detail distance under both
/// first-come-first-matched and last-come-first-matched.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub fcfm_before: u64,
    pub fcfm_after: u64,
    pub lcfm_before: u64,
    pub lcfm_after: u64,
}

impl ExpansionReport {
    /// Both cases show distance 4 after a common arrival at distance 2.
    pub fn reproduced(&self) -> bool {
        self.fcfm_before == 2
            && self.fcfm_after == 4
            && self.lcfm_before == 2
            && self.lcfm_after == 4
    }
}

/// Replays the fixed counterexamples showing the word policies are not
/// non-expansive. Requires the paw graph (vertices `1..4`, edges 1-2, 2-3,
/// 2-4, 3-4).
pub fn replay_word_expansion_counterexamples(g: &CompatibilityGraph) -> Result<ExpansionReport> {
    let expected =
        CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
    if *g != expected {
        return Err(MatchError::Precondition(
            "the word-expansion counterexamples are stated on the paw graph".into(),
        ));
    }
    let sigma = PreferenceList::canonical(g);
    let arrival = g.vertex("2")?;

    let distance_after = |a: &str, b: &str, policy: &PolicySpec| -> Result<(u64, u64)> {
        let wa = crate::policy::QueueWord::parse(g, a)?;
        let wb = crate::policy::QueueWord::parse(g, b)?;
        let before = wa
            .commutative_image(g)
            .l1_distance(&wb.commutative_image(g));
        let (ya, _) = policy::apply_word(&wa, arrival, &sigma, policy, g)?;
        let (yb, _) = policy::apply_word(&wb, arrival, &sigma, policy, g)?;
        let after = ya
            .commutative_image(g)
            .l1_distance(&yb.commutative_image(g));
        Ok((before, after))
    };

    let (fcfm_before, fcfm_after) = distance_after("133", "311", &PolicySpec::Fcfm)?;
    let (lcfm_before, lcfm_after) = distance_after("331", "113", &PolicySpec::Lcfm)?;
    Ok(ExpansionReport {
        fcfm_before,
        fcfm_after,
        lcfm_before,
        lcfm_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paw() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn ms_counterexample_is_found_when_injected() {
        let g = paw();
        let sigma = PreferenceList::canonical(&g);
        let z1: Vec<Vertex> = "11".chars().map(|c| g.vertex(&c.to_string()).unwrap()).collect();
        let z2: Vec<Vertex> = "133224"
            .chars()
            .map(|c| g.vertex(&c.to_string()).unwrap())
            .collect();
        let prefs = vec![sigma; 8];
        let separate_1 = leftover(&z1, &prefs[..2], &PolicySpec::Ms, &g);
        let separate_2 = leftover(&z2, &prefs[2..], &PolicySpec::Ms, &g);
        let concatenated: Vec<Vertex> = z1.iter().chain(&z2).copied().collect();
        let joint = leftover(&concatenated, &prefs, &PolicySpec::Ms, &g);
        assert_eq!((joint, separate_1, separate_2), (4, 2, 0));
    }

    #[test]
    fn empty_first_word_always_satisfies_the_bound() {
        let g = paw();
        let sigma = PreferenceList::canonical(&g);
        let z2: Vec<Vertex> = vec![0, 2, 3];
        let prefs = vec![sigma; 3];
        let alone = leftover(&z2, &prefs, &PolicySpec::Fcfm, &g);
        assert_eq!(alone, leftover(&z2, &prefs, &PolicySpec::Fcfm, &g));
    }

    #[test]
    fn fcfm_subadditive_on_random_trials() {
        let g = paw();
        let report = check_subadditive(&PolicySpec::Fcfm, &g, 2_000, 8, 17).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn ms_subadditivity_violated_by_random_search() {
        let g = paw();
        let report = check_subadditive(&PolicySpec::Ms, &g, 100_000, 8, 5).unwrap();
        assert!(
            !report.passed(),
            "expected the shortest-queue policy to fail sub-additivity"
        );
    }

    #[test]
    fn class_policies_nonexpansive_on_random_trials() {
        let g = paw();
        for policy in [
            PolicySpec::Ml,
            PolicySpec::Uniform,
            PolicySpec::Priority(PreferenceList::canonical(&g)),
        ] {
            let report = check_nonexpansive(&policy, &g, 2_000, 23).unwrap();
            assert!(
                report.passed(),
                "{}: {:?}",
                policy.tag(&g),
                report.violations
            );
        }
    }

    #[test]
    fn identical_states_stay_identical() {
        let g = paw();
        let report = check_nonexpansive(&PolicySpec::Ml, &g, 100, 3).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn word_policies_rejected_for_nonexpansiveness() {
        let g = paw();
        assert!(check_nonexpansive(&PolicySpec::Fcfm, &g, 10, 0).is_err());
    }

    #[test]
    fn expansion_counterexamples_reproduce() {
        let g = paw();
        let report = replay_word_expansion_counterexamples(&g).unwrap();
        assert!(report.reproduced(), "{report:?}");
        let k3 = CompatibilityGraph::from_numbered(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(replay_word_expansion_counterexamples(&k3).is_err());
    }

    #[test]
    fn reports_are_seed_reproducible() {
        let g = paw();
        let a = check_subadditive(&PolicySpec::Ms, &g, 20_000, 8, 41).unwrap();
        let b = check_subadditive(&PolicySpec::Ms, &g, 20_000, 8, 41).unwrap();
        assert_eq!(a.violations.len(), b.violations.len());
        for (x, y) in a.violations.iter().zip(&b.violations) {
            assert_eq!((x.trial, x.lhs, x.rhs), (y.trial, y.lhs, y.rhs));
            assert_eq!(x.inputs, y.inputs);
        }
    }
}
