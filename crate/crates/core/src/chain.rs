//! Trajectory engines for the natural chain and the backwards/forwards
//! detailed chains, word transforms, and admissibility of detailed states.

use serde::Serialize;

use crate::error::{MatchError, Result};
use crate::graph::{CompatibilityGraph, Vertex};
use crate::input::ArrivalEvent;
use crate::policy::{self, PolicySpec, QueueWord};

/// A letter over `V` or its barred copy. A barred letter records a matched
/// item by the class of its match.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetailedLetter {
    pub class: Vertex,
    pub barred: bool,
}

impl DetailedLetter {
    pub fn plain(class: Vertex) -> Self {
        DetailedLetter {
            class,
            barred: false,
        }
    }

    pub fn barred(class: Vertex) -> Self {
        DetailedLetter {
            class,
            barred: true,
        }
    }
}

/// A word over `V` and its barred copies, used by the backwards and forwards
/// detailed chains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DetailedWord(pub Vec<DetailedLetter>);

impl DetailedWord {
    pub fn empty() -> Self {
        DetailedWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[DetailedLetter] {
        &self.0
    }

    /// Flips every bar.
    pub fn dual(&self) -> DetailedWord {
        DetailedWord(
            self.0
                .iter()
                .map(|l| DetailedLetter {
                    class: l.class,
                    barred: !l.barred,
                })
                .collect(),
        )
    }

    /// Reverses the letter order.
    pub fn reversed(&self) -> DetailedWord {
        DetailedWord(self.0.iter().rev().copied().collect())
    }

    /// Reverse of the dual, the bijection between backwards- and
    /// forwards-admissible states.
    pub fn reverse_dual(&self) -> DetailedWord {
        self.dual().reversed()
    }

    /// The unbarred letters, in order.
    pub fn restrict_unbarred(&self) -> Vec<Vertex> {
        self.0
            .iter()
            .filter(|l| !l.barred)
            .map(|l| l.class)
            .collect()
    }

    /// The barred letters (keeping their bars), in order.
    pub fn restrict_barred(&self) -> DetailedWord {
        DetailedWord(self.0.iter().filter(|l| l.barred).copied().collect())
    }

    /// Parses a word like `"1~4~3"`: `~` marks the next class as barred.
    /// Multi-character vertex names use comma separation, e.g. `"a,~b"`.
    pub fn parse(g: &CompatibilityGraph, text: &str) -> Result<Self> {
        if text == "-" || text.is_empty() {
            return Ok(DetailedWord::empty());
        }
        let single = g.names().iter().all(|n| n.chars().count() == 1);
        let mut letters = Vec::new();
        if single && !text.contains(',') {
            let mut barred = false;
            for c in text.chars() {
                if c == '~' {
                    barred = true;
                    continue;
                }
                let class = g.vertex(&c.to_string())?;
                letters.push(DetailedLetter { class, barred });
                barred = false;
            }
        } else {
            for token in text.split(',') {
                let token = token.trim();
                let (barred, name) = match token.strip_prefix('~') {
                    Some(rest) => (true, rest),
                    None => (false, token),
                };
                letters.push(DetailedLetter {
                    class: g.vertex(name)?,
                    barred,
                });
            }
        }
        Ok(DetailedWord(letters))
    }

    /// Renders with `~` prefixes for barred letters, `"-"` for the empty
    /// word.
    pub fn format(&self, g: &CompatibilityGraph) -> String {
        if self.0.is_empty() {
            return "-".into();
        }
        let single = g.names().iter().all(|n| n.chars().count() == 1);
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                if l.barred {
                    format!("~{}", g.name(l.class))
                } else {
                    g.name(l.class).to_string()
                }
            })
            .collect();
        if single {
            parts.concat()
        } else {
            parts.join(",")
        }
    }
}

/// A word transform selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    Dual,
    Reverse,
    RestrictPlain,
    RestrictBarred,
}

/// Applies a transform, returning the result as a detailed word (restriction
/// to `V` yields a word with no bars).
pub fn transform(w: &DetailedWord, mode: Transform) -> DetailedWord {
    match mode {
        Transform::Dual => w.dual(),
        Transform::Reverse => w.reversed(),
        Transform::RestrictPlain => DetailedWord(
            w.restrict_unbarred()
                .into_iter()
                .map(DetailedLetter::plain)
                .collect(),
        ),
        Transform::RestrictBarred => w.restrict_barred(),
    }
}

/// Why a word fails backwards-chain admissibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdmissibilityViolation {
    /// Non-empty words must start with an unbarred letter.
    FirstLetterBarred,
    /// Two unbarred letters are adjacent (positions are 1-based).
    AdjacentUnbarredPair { left: usize, right: usize },
    /// An unbarred letter is adjacent to the class of a later barred letter.
    UnbarredBeforeAdjacentBarred { unbarred: usize, barred: usize },
}

/// Checks the two structural conditions characterizing states reachable by
/// the backwards chain: no two unbarred letters adjacent, and no unbarred
/// letter adjacent to the class of any barred letter to its right; the first
/// letter of a non-empty word must be unbarred.
pub fn is_admissible_backwards(
    w: &DetailedWord,
    g: &CompatibilityGraph,
) -> std::result::Result<(), AdmissibilityViolation> {
    if let Some(first) = w.0.first() {
        if first.barred {
            return Err(AdmissibilityViolation::FirstLetterBarred);
        }
    }
    for (i, a) in w.0.iter().enumerate() {
        if a.barred {
            continue;
        }
        for (j, b) in w.0.iter().enumerate().skip(i + 1) {
            if g.adjacent(a.class, b.class) {
                if b.barred {
                    return Err(AdmissibilityViolation::UnbarredBeforeAdjacentBarred {
                        unbarred: i + 1,
                        barred: j + 1,
                    });
                } else {
                    return Err(AdmissibilityViolation::AdjacentUnbarredPair {
                        left: i + 1,
                        right: j + 1,
                    });
                }
            }
        }
        // Adjacent barred letters to the left of an unbarred letter are
        // allowed; only unbarred pairs constrain both directions.
        for b in w.0.iter().take(i) {
            if !b.barred && g.adjacent(a.class, b.class) {
                unreachable!("covered by the forward scan");
            }
        }
    }
    Ok(())
}

/// All admissible backwards states up to `max_len`, in deterministic order:
/// by length, extending with unbarred letters (ascending class) before
/// barred ones. `max_len` is capped at 8.
pub fn enumerate_admissible_backwards(
    g: &CompatibilityGraph,
    max_len: usize,
) -> Result<Vec<DetailedWord>> {
    if max_len > 8 {
        return Err(MatchError::GuardExceeded(format!(
            "max_len {max_len} exceeds the enumeration guard of 8"
        )));
    }
    let mut out = vec![DetailedWord::empty()];
    let mut frontier = vec![DetailedWord::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for word in &frontier {
            for barred in [false, true] {
                for class in g.vertices() {
                    let mut letters = word.0.clone();
                    letters.push(DetailedLetter { class, barred });
                    let candidate = DetailedWord(letters);
                    if is_admissible_backwards(&candidate, g).is_ok() {
                        next.push(candidate);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// The pairing produced by running a policy over a finite input: matched
/// position pairs plus unmatched positions, all 0-based over items in
/// arrival order (initial-buffer letters first, then arrivals).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MatchingRecord {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched: Vec<usize>,
}

impl MatchingRecord {
    /// The partner of an item, if matched.
    pub fn partner(&self, idx: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(a, b)| {
            if a == idx {
                Some(b)
            } else if b == idx {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn is_perfect(&self) -> bool {
        self.unmatched.is_empty()
    }
}

/// One step of a recorded trajectory. `n` counts processed arrivals, so the
/// step with `n = k` holds the state just after the `k`-th arrival.
#[derive(Clone, Debug)]
pub struct TrajectoryStep {
    pub n: usize,
    pub event_class: Vertex,
    pub w: QueueWord,
    pub b: Option<DetailedWord>,
    /// `None` when the forwards state needs matches beyond the supplied
    /// input.
    pub f: Option<DetailedWord>,
    /// 0-based index of the item the arrival matched, if any.
    pub matched_with: Option<usize>,
}

/// A recorded run: per-step states plus the full matching.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub initial: QueueWord,
    pub steps: Vec<TrajectoryStep>,
    pub matching: MatchingRecord,
}

impl Trajectory {
    pub fn final_word(&self) -> &QueueWord {
        self.steps
            .last()
            .map(|s| &s.w)
            .unwrap_or(&self.initial)
    }
}

struct MatchEngine<'a> {
    g: &'a CompatibilityGraph,
    policy: &'a PolicySpec,
    /// Class of each item, by arrival index.
    classes: Vec<Vertex>,
    /// Queue of unmatched item indices, oldest first.
    queue: Vec<usize>,
    partner: Vec<Option<usize>>,
}

impl<'a> MatchEngine<'a> {
    fn new(g: &'a CompatibilityGraph, policy: &'a PolicySpec, initial: &QueueWord) -> Self {
        let classes: Vec<Vertex> = initial.letters().to_vec();
        MatchEngine {
            g,
            policy,
            queue: (0..classes.len()).collect(),
            partner: vec![None; classes.len()],
            classes,
        }
    }

    /// Feeds one arrival; returns the matched item's index, if any.
    fn push(&mut self, event: &ArrivalEvent) -> Option<usize> {
        let idx = self.classes.len();
        self.classes.push(event.class);
        self.partner.push(None);
        let mut word: Vec<Vertex> = self.queue.iter().map(|&i| self.classes[i]).collect();
        let matched = policy::step_word(&mut word, event.class, &event.prefs, self.policy, self.g);
        match matched {
            Some(pos) => {
                let other = self.queue.remove(pos - 1);
                self.partner[other] = Some(idx);
                self.partner[idx] = Some(other);
                Some(other)
            }
            None => {
                self.queue.push(idx);
                None
            }
        }
    }

    fn word(&self) -> QueueWord {
        QueueWord::from_letters_unchecked(self.queue.iter().map(|&i| self.classes[i]).collect())
    }

    fn record(&self) -> MatchingRecord {
        let mut pairs: Vec<(usize, usize)> = self
            .partner
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|j| (i.min(j), i.max(j))))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        MatchingRecord {
            pairs,
            unmatched: self
                .partner
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.is_none().then_some(i))
                .collect(),
        }
    }
}

/// Runs the natural chain from `w0` over the given arrivals, recording the
/// queue detail after every arrival and the induced matching.
pub fn run_natural(
    w0: &QueueWord,
    events: &[ArrivalEvent],
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Result<Trajectory> {
    w0.check_admissible(g)?;
    let mut engine = MatchEngine::new(g, policy, w0);
    let mut steps = Vec::with_capacity(events.len());
    for (k, event) in events.iter().enumerate() {
        let matched_with = engine.push(event);
        steps.push(TrajectoryStep {
            n: k + 1,
            event_class: event.class,
            w: engine.word(),
            b: None,
            f: None,
            matched_with,
        });
    }
    Ok(Trajectory {
        initial: w0.clone(),
        steps,
        matching: engine.record(),
    })
}

/// The backwards state at time `n`: classes of unmatched items from the
/// oldest one, with matched items replaced by the barred class of their
/// match.
fn backwards_state(
    n: usize,
    classes: &[Vertex],
    matched_by: &[Option<(usize, usize)>],
) -> DetailedWord {
    // matched_by[i] = (partner index, match time) when item i is matched.
    let oldest = (0..n).find(|&i| match matched_by[i] {
        None => true,
        Some((_, t)) => t > n,
    });
    let Some(start) = oldest else {
        return DetailedWord::empty();
    };
    let letters = (start..n)
        .map(|i| match matched_by[i] {
            Some((p, t)) if t <= n => DetailedLetter::barred(classes[p]),
            _ => DetailedLetter::plain(classes[i]),
        })
        .collect();
    DetailedWord(letters)
}

/// The forwards state at time `n`, or `None` when it needs matches beyond
/// the input window.
fn forwards_state(
    n: usize,
    classes: &[Vertex],
    matched_by: &[Option<(usize, usize)>],
) -> Option<DetailedWord> {
    // Complete iff every item up to n is matched within the window.
    if (0..n).any(|i| matched_by[i].is_none()) {
        return None;
    }
    let horizon = (0..n)
        .filter_map(|i| matched_by[i].map(|(p, _)| p + 1))
        .max()
        .unwrap_or(0);
    if horizon <= n {
        return Some(DetailedWord::empty());
    }
    let letters = (n..horizon)
        .map(|i| match matched_by[i] {
            Some((p, _)) if p < n => DetailedLetter::barred(classes[p]),
            _ => DetailedLetter::plain(classes[i]),
        })
        .collect();
    Some(DetailedWord(letters))
}

/// Runs the first-come-first-matched chain from an empty buffer and fills in
/// the backwards and forwards detailed states at every step. Forwards states
/// whose matches fall beyond the input are reported as `None`.
pub fn detailed_trajectories(
    events: &[ArrivalEvent],
    g: &CompatibilityGraph,
) -> Result<Trajectory> {
    let mut trajectory = run_natural(&QueueWord::empty(), events, &PolicySpec::Fcfm, g)?;
    let classes: Vec<Vertex> = events.iter().map(|e| e.class).collect();

    // Match time of each pair: the arrival index of its later item, 1-based.
    let mut matched_by: Vec<Option<(usize, usize)>> = vec![None; classes.len()];
    for &(a, b) in &trajectory.matching.pairs {
        let time = a.max(b) + 1;
        matched_by[a] = Some((b, time));
        matched_by[b] = Some((a, time));
    }

    for step in &mut trajectory.steps {
        step.b = Some(backwards_state(step.n, &classes, &matched_by));
        step.f = forwards_state(step.n, &classes, &matched_by);
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::PreferenceList;

    fn paw() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    fn k3() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(3, &[(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn events(g: &CompatibilityGraph, names: &[&str]) -> Vec<ArrivalEvent> {
        let prefs = PreferenceList::canonical(g);
        names
            .iter()
            .map(|n| ArrivalEvent {
                class: g.vertex(n).unwrap(),
                prefs: prefs.clone(),
            })
            .collect()
    }

    const FIG_ARRIVALS: [&str; 11] = ["1", "3", "4", "2", "3", "1", "3", "2", "2", "1", "4"];

    #[test]
    fn natural_chain_reference_trajectory() {
        let g = paw();
        let t = run_natural(
            &QueueWord::empty(),
            &events(&g, &FIG_ARRIVALS),
            &PolicySpec::Fcfm,
            &g,
        )
        .unwrap();
        let words: Vec<String> = t.steps.iter().take(8).map(|s| s.w.format(&g)).collect();
        assert_eq!(words, ["1", "13", "1", "-", "3", "31", "313", "13"]);
    }

    #[test]
    fn shortest_policy_empties_reference_input() {
        let g = paw();
        let t = run_natural(
            &QueueWord::empty(),
            &events(&g, &["1", "3", "3", "2", "2", "4"]),
            &PolicySpec::Ms,
            &g,
        )
        .unwrap();
        assert!(t.final_word().is_empty());
    }

    #[test]
    fn empty_input_gives_empty_trajectory() {
        let g = paw();
        let t = run_natural(&QueueWord::empty(), &[], &PolicySpec::Fcfm, &g).unwrap();
        assert!(t.steps.is_empty());
        assert!(t.final_word().is_empty());
    }

    #[test]
    fn detailed_chain_reference_values() {
        let g = paw();
        let t = detailed_trajectories(&events(&g, &FIG_ARRIVALS), &g).unwrap();
        let b = |n: usize| t.steps[n - 1].b.as_ref().unwrap().format(&g);
        let f = |n: usize| t.steps[n - 1].f.as_ref().unwrap().format(&g);

        assert_eq!(b(3), "1~4~3");
        assert_eq!(f(3), "~1");
        assert_eq!(b(4), "-");
        assert_eq!(f(4), "-");
        assert_eq!(b(7), "313");
        assert_eq!(f(7), "~3~11~3");
        assert_eq!(b(8), "13~3");
        assert_eq!(f(8), "~11~3");

        // The last two forwards states need matches beyond the window.
        assert!(t.steps[9].f.is_none());
        assert!(t.steps[10].f.is_none());
    }

    #[test]
    fn backwards_restriction_is_the_natural_state() {
        let g = paw();
        let t = detailed_trajectories(&events(&g, &FIG_ARRIVALS), &g).unwrap();
        for step in &t.steps {
            let b = step.b.as_ref().unwrap();
            assert_eq!(b.restrict_unbarred(), step.w.letters());
            assert!(is_admissible_backwards(b, &g).is_ok());
            if let Some(f) = &step.f {
                assert!(is_admissible_backwards(&f.reverse_dual(), &g).is_ok());
                if let Some(last) = f.letters().last() {
                    assert!(last.barred);
                }
            }
        }
    }

    #[test]
    fn transforms_worked_example() {
        // Word a b ~a c ~b ~c ~b d a over a path graph (adjacency is not
        // used by the transforms).
        let g = CompatibilityGraph::new(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d")],
        )
        .unwrap();
        let w = DetailedWord::parse(&g, "ab~ac~b~c~bda").unwrap();
        assert_eq!(
            transform(&w, Transform::RestrictPlain).format(&g),
            "abcda"
        );
        assert_eq!(w.dual().format(&g), "~a~ba~cbcb~d~a");
        assert_eq!(w.reversed().reversed(), w);
        assert_eq!(w.dual().dual(), w);
        assert_eq!(
            transform(&w, Transform::RestrictBarred).format(&g),
            "~a~b~c~b"
        );
    }

    #[test]
    fn admissibility_examples() {
        let g = paw();
        let ok = DetailedWord::parse(&g, "1~4~3").unwrap();
        assert!(is_admissible_backwards(&ok, &g).is_ok());

        let bad = DetailedWord::parse(&g, "2~1").unwrap();
        assert_eq!(
            is_admissible_backwards(&bad, &g),
            Err(AdmissibilityViolation::UnbarredBeforeAdjacentBarred {
                unbarred: 1,
                barred: 2
            })
        );

        let bad = DetailedWord::parse(&g, "12").unwrap();
        assert_eq!(
            is_admissible_backwards(&bad, &g),
            Err(AdmissibilityViolation::AdjacentUnbarredPair { left: 1, right: 2 })
        );

        let bad = DetailedWord::parse(&g, "~1").unwrap();
        assert_eq!(
            is_admissible_backwards(&bad, &g),
            Err(AdmissibilityViolation::FirstLetterBarred)
        );
    }

    #[test]
    fn enumeration_small_cases() {
        let g = paw();
        let words = enumerate_admissible_backwards(&g, 1).unwrap();
        assert_eq!(words.len(), 5); // empty word and four unbarred singletons
        assert!(words[0].is_empty());

        let g3 = k3();
        let words = enumerate_admissible_backwards(&g3, 2).unwrap();
        // Length 2: same-class pairs aa (two waiting items of one class) and
        // a~a (a waiting item before a barred same-class letter); any mixed
        // pair involves adjacent classes and is rejected.
        let len2: Vec<String> = words
            .iter()
            .filter(|w| w.len() == 2)
            .map(|w| w.format(&g3))
            .collect();
        assert_eq!(len2, vec!["11", "1~1", "22", "2~2", "33", "3~3"]);

        assert_eq!(enumerate_admissible_backwards(&g3, 0).unwrap().len(), 1);
        assert!(enumerate_admissible_backwards(&g3, 9).is_err());
    }

    #[test]
    fn matching_record_pairs_are_adjacent_and_fcfm() {
        let g = paw();
        let evs = events(&g, &FIG_ARRIVALS);
        let t = detailed_trajectories(&evs, &g).unwrap();
        for &(a, b) in &t.matching.pairs {
            assert!(g.adjacent(evs[a].class, evs[b].class));
        }
        // First-come property: when b matched a (a < b), no older compatible
        // item was still unmatched at time b.
        for &(a, b) in &t.matching.pairs {
            for c in 0..a {
                let free_at_b = t.matching.partner(c).map(|p| p.max(c) + 1 > b).unwrap_or(true);
                if free_at_b {
                    assert!(
                        !g.adjacent(evs[c].class, evs[b].class),
                        "older compatible item {c} was available when {b} matched {a}"
                    );
                }
            }
        }
    }
}
