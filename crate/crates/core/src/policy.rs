//! Matching policies as pure state-transition maps on queue words and
//! class-count vectors, with preference-list sampling.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{MatchError, Result};
use crate::graph::{CompatibilityGraph, Vertex};

/// One permutation of `E(i)` per vertex `i`: the order in which an arriving
/// `i`-item investigates its compatible classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceList(pub Vec<Vec<Vertex>>);

impl PreferenceList {
    /// Identity-ordered list: each `E(i)` ascending.
    pub fn canonical(g: &CompatibilityGraph) -> Self {
        PreferenceList(g.vertices().map(|v| g.neighbor_list(v)).collect())
    }

    /// Uniformly random element of the preference space (independent
    /// shuffles of each `E(i)`).
    pub fn uniform<R: Rng + ?Sized>(g: &CompatibilityGraph, rng: &mut R) -> Self {
        let mut lists = Vec::with_capacity(g.len());
        for v in g.vertices() {
            let mut order = g.neighbor_list(v);
            // Fisher-Yates
            for i in (1..order.len()).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            lists.push(order);
        }
        PreferenceList(lists)
    }

    /// Checks that each entry is a permutation of exactly `E(i)`.
    pub fn validate(&self, g: &CompatibilityGraph) -> Result<()> {
        if self.0.len() != g.len() {
            return Err(MatchError::Precondition(format!(
                "preference list covers {} vertices, graph has {}",
                self.0.len(),
                g.len()
            )));
        }
        for v in g.vertices() {
            let mut sorted = self.0[v].clone();
            sorted.sort_unstable();
            if sorted != g.neighbor_list(v) {
                return Err(MatchError::Precondition(format!(
                    "entry for {} is not a permutation of its neighborhood",
                    g.name(v)
                )));
            }
        }
        Ok(())
    }

    pub fn order_for(&self, v: Vertex) -> &[Vertex] {
        &self.0[v]
    }

    /// Parses `{"vertex": ["neighbor", ...], ...}`.
    pub fn from_json(text: &str, g: &CompatibilityGraph) -> Result<Self> {
        let map: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| MatchError::Parse(e.to_string()))?;
        let mut lists = vec![Vec::new(); g.len()];
        for (name, order) in &map {
            let v = g.vertex(name)?;
            lists[v] = order
                .iter()
                .map(|n| g.vertex(n))
                .collect::<Result<Vec<_>>>()?;
        }
        let prefs = PreferenceList(lists);
        prefs.validate(g)?;
        Ok(prefs)
    }

    pub fn to_json(&self, g: &CompatibilityGraph) -> String {
        let map: BTreeMap<String, Vec<String>> = g
            .vertices()
            .map(|v| {
                (
                    g.name(v).to_string(),
                    self.0[v].iter().map(|&u| g.name(u).to_string()).collect(),
                )
            })
            .collect();
        serde_json::to_string(&map).expect("preference serialization cannot fail")
    }
}

/// An explicit finite sampler over preference lists, for custom random
/// policies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomPreferences {
    pub choices: Vec<(PreferenceList, u32)>,
}

impl RandomPreferences {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &PreferenceList {
        let total: u64 = self.choices.iter().map(|(_, w)| *w as u64).sum();
        let mut u = rng.gen_range(0..total);
        for (list, w) in &self.choices {
            if u < *w as u64 {
                return list;
            }
            u -= *w as u64;
        }
        unreachable!("weights sum checked above")
    }
}

/// A matching policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicySpec {
    /// First come, first matched: the arriving item takes the oldest
    /// compatible item in line.
    Fcfm,
    /// Last come, first matched: the newest compatible item.
    Lcfm,
    /// Match the longest compatible queue; ties broken by the drawn list.
    Ml,
    /// Match the shortest non-empty compatible queue.
    Ms,
    /// Preference lists drawn uniformly on arrival.
    Uniform,
    /// A fixed preference list applied at every arrival.
    Priority(PreferenceList),
    /// Preference lists drawn from an explicit finite sampler.
    Random(RandomPreferences),
}

impl PolicySpec {
    /// Short serialization tag, `priority:` carrying its list inline.
    pub fn tag(&self, g: &CompatibilityGraph) -> String {
        match self {
            PolicySpec::Fcfm => "fcfm".into(),
            PolicySpec::Lcfm => "lcfm".into(),
            PolicySpec::Ml => "ml".into(),
            PolicySpec::Ms => "ms".into(),
            PolicySpec::Uniform => "uniform".into(),
            PolicySpec::Priority(p) => format!("priority:{}", p.to_json(g)),
            PolicySpec::Random(_) => "random".into(),
        }
    }

    pub fn parse(s: &str, g: &CompatibilityGraph) -> Result<Self> {
        match s {
            "fcfm" => Ok(PolicySpec::Fcfm),
            "lcfm" => Ok(PolicySpec::Lcfm),
            "ml" => Ok(PolicySpec::Ml),
            "ms" => Ok(PolicySpec::Ms),
            "uniform" => Ok(PolicySpec::Uniform),
            other => {
                if let Some(spec) = other.strip_prefix("priority:") {
                    Ok(PolicySpec::Priority(PreferenceList::from_json(spec, g)?))
                } else {
                    Err(MatchError::Parse(format!("unknown policy tag {other:?}")))
                }
            }
        }
    }

    /// Whether the policy is implementable from the class detail alone.
    pub fn is_class_admissible(&self) -> bool {
        !matches!(self, PolicySpec::Fcfm | PolicySpec::Lcfm)
    }

    /// Whether the policy satisfies the sub-additivity bound
    /// `|Q(z'z'')| <= |Q(z')| + |Q(z'')|` (match-the-shortest does not).
    pub fn is_subadditive(&self) -> bool {
        !matches!(self, PolicySpec::Ms)
    }

    /// The single preference list the policy ever uses, when its draws are
    /// deterministic. First/last come first matched ignore preferences
    /// entirely; match-the-shortest uses the canonical list for tie-breaks;
    /// priority always returns its fixed list.
    pub fn deterministic_preferences(&self, g: &CompatibilityGraph) -> Option<PreferenceList> {
        match self {
            PolicySpec::Fcfm | PolicySpec::Lcfm | PolicySpec::Ms => {
                Some(PreferenceList::canonical(g))
            }
            PolicySpec::Priority(p) => Some(p.clone()),
            PolicySpec::Ml | PolicySpec::Uniform | PolicySpec::Random(_) => None,
        }
    }

    /// Draws a preference list from the policy's list distribution.
    pub fn draw_preferences<R: Rng + ?Sized>(
        &self,
        g: &CompatibilityGraph,
        rng: &mut R,
    ) -> PreferenceList {
        match self {
            PolicySpec::Fcfm | PolicySpec::Lcfm | PolicySpec::Ms => PreferenceList::canonical(g),
            PolicySpec::Ml | PolicySpec::Uniform => PreferenceList::uniform(g, rng),
            PolicySpec::Priority(p) => p.clone(),
            PolicySpec::Random(r) => r.draw(rng).clone(),
        }
    }
}

/// A queue detail: the word of unmatched item classes in arrival order. Its
/// letters are pairwise non-adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QueueWord(Vec<Vertex>);

impl QueueWord {
    pub fn empty() -> Self {
        QueueWord(Vec::new())
    }

    pub fn new(g: &CompatibilityGraph, letters: Vec<Vertex>) -> Result<Self> {
        let w = QueueWord(letters);
        w.check_admissible(g)?;
        Ok(w)
    }

    /// Builds a word from concatenated vertex names, e.g. `"133"` on a graph
    /// whose vertices are named by single characters.
    pub fn parse(g: &CompatibilityGraph, text: &str) -> Result<Self> {
        let letters = parse_classes(g, text)?;
        QueueWord::new(g, letters)
    }

    pub fn check_admissible(&self, g: &CompatibilityGraph) -> Result<()> {
        for (i, &a) in self.0.iter().enumerate() {
            for &b in &self.0[i + 1..] {
                if g.adjacent(a, b) {
                    return Err(MatchError::InadmissibleWord(format!(
                        "letters {} and {} are adjacent",
                        g.name(a),
                        g.name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn letters(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.0.len() % 2 == 0
    }

    pub fn commutative_image(&self, g: &CompatibilityGraph) -> ClassDetail {
        let mut counts = vec![0u32; g.len()];
        for &v in &self.0 {
            counts[v] += 1;
        }
        ClassDetail(counts)
    }

    /// Renders the word with vertex names: concatenated when every name is a
    /// single character, comma-separated otherwise. Empty word prints `"-"`.
    pub fn format(&self, g: &CompatibilityGraph) -> String {
        format_classes(g, &self.0)
    }

    pub(crate) fn into_letters(self) -> Vec<Vertex> {
        self.0
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<Vertex>) -> Self {
        QueueWord(letters)
    }
}

pub(crate) fn parse_classes(g: &CompatibilityGraph, text: &str) -> Result<Vec<Vertex>> {
    if text == "-" || text.is_empty() {
        return Ok(Vec::new());
    }
    if text.contains(',') {
        text.split(',').map(|n| g.vertex(n.trim())).collect()
    } else {
        text.chars().map(|c| g.vertex(&c.to_string())).collect()
    }
}

pub(crate) fn format_classes(g: &CompatibilityGraph, letters: &[Vertex]) -> String {
    if letters.is_empty() {
        return "-".into();
    }
    let single = g.names().iter().all(|n| n.chars().count() == 1);
    let names: Vec<&str> = letters.iter().map(|&v| g.name(v)).collect();
    if single {
        names.concat()
    } else {
        names.join(",")
    }
}

/// A class detail: per-class counts of unmatched items. Counts of adjacent
/// classes are never simultaneously positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassDetail(pub Vec<u32>);

impl ClassDetail {
    pub fn zero(g: &CompatibilityGraph) -> Self {
        ClassDetail(vec![0; g.len()])
    }

    pub fn new(g: &CompatibilityGraph, counts: Vec<u32>) -> Result<Self> {
        let x = ClassDetail(counts);
        x.check_admissible(g)?;
        Ok(x)
    }

    pub fn check_admissible(&self, g: &CompatibilityGraph) -> Result<()> {
        if self.0.len() != g.len() {
            return Err(MatchError::Precondition(
                "class detail length does not match the graph".into(),
            ));
        }
        for u in g.vertices() {
            for v in g.neighbors(u).iter() {
                if self.0[u] > 0 && self.0[v] > 0 {
                    return Err(MatchError::InadmissibleWord(format!(
                        "adjacent classes {} and {} both have items in line",
                        g.name(u),
                        g.name(v)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn count(&self, v: Vertex) -> u32 {
        self.0[v]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `l1` distance between two class details.
    pub fn l1_distance(&self, other: &ClassDetail) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a as i64 - b as i64).unsigned_abs())
            .sum()
    }
}

/// The class an arriving `v`-item matches in class detail `x`, or `None`
/// when no compatible class has items in line.
pub fn match_class(
    x: &ClassDetail,
    v: Vertex,
    sigma: &PreferenceList,
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Result<Option<Vertex>> {
    if !policy.is_class_admissible() {
        return Err(MatchError::UnsupportedPolicy(policy.tag(g)));
    }
    x.check_admissible(g)?;
    Ok(match_class_unchecked(x, v, sigma, policy, g))
}

fn match_class_unchecked(
    x: &ClassDetail,
    v: Vertex,
    sigma: &PreferenceList,
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Option<Vertex> {
    let order = sigma.order_for(v);
    match policy {
        PolicySpec::Uniform | PolicySpec::Priority(_) | PolicySpec::Random(_) => {
            // First class in preference order with items in line.
            order.iter().copied().find(|&c| x.count(c) > 0)
        }
        PolicySpec::Ml => {
            let best = g.neighbors(v).iter().map(|c| x.count(c)).max().unwrap_or(0);
            if best == 0 {
                return None;
            }
            order.iter().copied().find(|&c| x.count(c) == best)
        }
        PolicySpec::Ms => {
            let best = g
                .neighbors(v)
                .iter()
                .map(|c| x.count(c))
                .filter(|&n| n > 0)
                .min()?;
            order.iter().copied().find(|&c| x.count(c) == best)
        }
        PolicySpec::Fcfm | PolicySpec::Lcfm => unreachable!("checked class-admissible"),
    }
}

/// The class-detail update `x (+) (v, sigma)`.
pub fn apply_class(
    x: &ClassDetail,
    v: Vertex,
    sigma: &PreferenceList,
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Result<ClassDetail> {
    let matched = match_class(x, v, sigma, policy, g)?;
    let mut counts = x.0.clone();
    match matched {
        None => counts[v] += 1,
        Some(c) => counts[c] -= 1,
    }
    Ok(ClassDetail(counts))
}

/// Core queue-word step, mutating in place. Returns the 1-based position of
/// the removed letter, or `None` when the arrival joined the queue.
///
/// Callers must pass an admissible word; the public [`apply_word`] checks.
pub(crate) fn step_word(
    letters: &mut Vec<Vertex>,
    v: Vertex,
    sigma: &PreferenceList,
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Option<usize> {
    let compatible = |&(_, &c): &(usize, &Vertex)| g.adjacent(c, v);
    let position = match policy {
        PolicySpec::Fcfm => letters.iter().enumerate().find(compatible).map(|(i, _)| i),
        PolicySpec::Lcfm => letters
            .iter()
            .enumerate()
            .rev()
            .find(compatible)
            .map(|(i, _)| i),
        _ => {
            let mut counts = vec![0u32; g.len()];
            for &c in letters.iter() {
                counts[c] += 1;
            }
            let x = ClassDetail(counts);
            match_class_unchecked(&x, v, sigma, policy, g).map(|class| {
                // Oldest item of the chosen class.
                letters
                    .iter()
                    .position(|&c| c == class)
                    .expect("chosen class has items in line")
            })
        }
    };
    match position {
        Some(i) => {
            letters.remove(i);
            Some(i + 1)
        }
        None => {
            letters.push(v);
            None
        }
    }
}

/// In-place word update for long simulations. The caller owns admissibility:
/// starting from an admissible word (the empty one qualifies), every update
/// preserves it.
pub fn apply_word_in_place(
    letters: &mut Vec<Vertex>,
    v: Vertex,
    sigma: &PreferenceList,
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Option<usize> {
    step_word(letters, v, sigma, policy, g)
}

/// The queue-word update `w (.) (v, sigma)`: append when nothing in line is
/// compatible, otherwise remove one compatible letter (oldest compatible for
/// first come first matched, newest for last come first matched, and the
/// oldest letter of the class chosen by [`match_class`] otherwise).
pub fn apply_word(
    w: &QueueWord,
    v: Vertex,
    sigma: &PreferenceList,
    policy: &PolicySpec,
    g: &CompatibilityGraph,
) -> Result<(QueueWord, Option<usize>)> {
    w.check_admissible(g)?;
    let mut letters = w.letters().to_vec();
    let matched = step_word(&mut letters, v, sigma, policy, g);
    Ok((QueueWord::from_letters_unchecked(letters), matched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn paw() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    fn k3() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(3, &[(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn v(g: &CompatibilityGraph, name: &str) -> Vertex {
        g.vertex(name).unwrap()
    }

    fn word(g: &CompatibilityGraph, text: &str) -> QueueWord {
        QueueWord::parse(g, text).unwrap()
    }

    #[test]
    fn word_admissibility() {
        let g = paw();
        assert!(QueueWord::parse(&g, "13").is_ok());
        assert!(QueueWord::parse(&g, "12").is_err());
        assert!(QueueWord::parse(&g, "313").is_ok());
    }

    #[test]
    fn fcfm_examples() {
        let g = paw();
        let sigma = PreferenceList::canonical(&g);
        let (w, m) = apply_word(&word(&g, "1"), v(&g, "3"), &sigma, &PolicySpec::Fcfm, &g).unwrap();
        assert_eq!(w.format(&g), "13");
        assert_eq!(m, None);

        let (w, m) =
            apply_word(&word(&g, "13"), v(&g, "4"), &sigma, &PolicySpec::Fcfm, &g).unwrap();
        assert_eq!(w.format(&g), "1");
        assert_eq!(m, Some(2));

        let (w, m) = apply_word(
            &QueueWord::empty(),
            v(&g, "2"),
            &sigma,
            &PolicySpec::Fcfm,
            &g,
        )
        .unwrap();
        assert_eq!(w.format(&g), "2");
        assert_eq!(m, None);
    }

    #[test]
    fn lcfm_removes_rightmost_compatible() {
        let g = paw();
        let sigma = PreferenceList::canonical(&g);
        let (w, m) =
            apply_word(&word(&g, "313"), v(&g, "4"), &sigma, &PolicySpec::Lcfm, &g).unwrap();
        assert_eq!(w.format(&g), "31");
        assert_eq!(m, Some(3));
    }

    #[test]
    fn class_policy_examples() {
        let g = paw();
        let sigma = PreferenceList::canonical(&g);

        // Longest line: class 3 uniquely holds the longest queue.
        let x = ClassDetail::new(&g, vec![0, 0, 2, 0]).unwrap();
        let out = apply_class(&x, v(&g, "2"), &sigma, &PolicySpec::Ml, &g).unwrap();
        assert_eq!(out.0, vec![0, 0, 1, 0]);

        // Shortest non-empty line.
        let x = ClassDetail::new(&g, vec![3, 0, 1, 0]).unwrap();
        let out = apply_class(&x, v(&g, "2"), &sigma, &PolicySpec::Ms, &g).unwrap();
        assert_eq!(out.0, vec![3, 0, 0, 0]);

        // Priority: first preferred class with items in line.
        let star = PreferenceList::from_json(
            r#"{"1": ["2"], "2": ["1", "3", "4"], "3": ["2", "4"], "4": ["2", "3"]}"#,
            &g,
        )
        .unwrap();
        let x = ClassDetail::new(&g, vec![1, 0, 2, 0]).unwrap();
        let out = apply_class(&x, v(&g, "2"), &star, &PolicySpec::Priority(star.clone()), &g)
            .unwrap();
        assert_eq!(out.0, vec![0, 0, 2, 0]);
    }

    #[test]
    fn match_class_tie_breaks() {
        let g = paw();
        // sigma(2) = (3,1,4): class 3 first among the available {1,3}.
        let sigma = PreferenceList::from_json(
            r#"{"1": ["2"], "2": ["3", "1", "4"], "3": ["2", "4"], "4": ["2", "3"]}"#,
            &g,
        )
        .unwrap();
        let x = ClassDetail::new(&g, vec![1, 0, 1, 0]).unwrap();
        let got = match_class(&x, v(&g, "2"), &sigma, &PolicySpec::Uniform, &g).unwrap();
        assert_eq!(got, Some(v(&g, "3")));

        // Tie at count 2 between classes 1 and 3; sigma order breaks it.
        let sigma = PreferenceList::from_json(
            r#"{"1": ["2"], "2": ["1", "3", "4"], "3": ["2", "4"], "4": ["2", "3"]}"#,
            &g,
        )
        .unwrap();
        let x = ClassDetail::new(&g, vec![2, 0, 2, 0]).unwrap();
        let got = match_class(&x, v(&g, "2"), &sigma, &PolicySpec::Ml, &g).unwrap();
        assert_eq!(got, Some(v(&g, "1")));

        let x = ClassDetail::zero(&g);
        let got = match_class(&x, v(&g, "2"), &sigma, &PolicySpec::Ml, &g).unwrap();
        assert_eq!(got, None);
    }

    #[test]
    fn word_only_policies_rejected_on_class_detail() {
        let g = paw();
        let sigma = PreferenceList::canonical(&g);
        let x = ClassDetail::zero(&g);
        assert!(matches!(
            match_class(&x, 0, &sigma, &PolicySpec::Fcfm, &g),
            Err(MatchError::UnsupportedPolicy(_))
        ));
        assert!(apply_class(&x, 0, &sigma, &PolicySpec::Lcfm, &g).is_err());
    }

    #[test]
    fn draw_preferences_point_mass_and_canonical() {
        let g = paw();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let star = PreferenceList::from_json(
            r#"{"1": ["2"], "2": ["4", "3", "1"], "3": ["4", "2"], "4": ["3", "2"]}"#,
            &g,
        )
        .unwrap();
        let policy = PolicySpec::Priority(star.clone());
        for _ in 0..5 {
            assert_eq!(policy.draw_preferences(&g, &mut rng), star);
        }
        assert_eq!(
            PolicySpec::Fcfm.draw_preferences(&g, &mut rng),
            PreferenceList::canonical(&g)
        );
    }

    #[test]
    fn uniform_preferences_cover_both_orders() {
        let g = k3();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let trials = 10_000;
        let mut first = 0usize;
        for _ in 0..trials {
            let prefs = PolicySpec::Uniform.draw_preferences(&g, &mut rng);
            if prefs.order_for(0) == [1, 2] {
                first += 1;
            }
        }
        let freq = first as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn commutation_with_class_detail() {
        let g = paw();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let policies = [
            PolicySpec::Ml,
            PolicySpec::Ms,
            PolicySpec::Uniform,
            PolicySpec::Priority(PreferenceList::canonical(&g)),
        ];
        for _ in 0..500 {
            let policy = &policies[rng.gen_range(0..policies.len())];
            // Random admissible word: letters from a random independent set.
            let sets = g.independent_sets();
            let support = &sets[rng.gen_range(0..sets.len())].members;
            let members: Vec<Vertex> = support.iter().collect();
            let len = rng.gen_range(0..6);
            let letters: Vec<Vertex> = (0..len)
                .map(|_| members[rng.gen_range(0..members.len())])
                .collect();
            let w = QueueWord::new(&g, letters).unwrap();
            let arrival = rng.gen_range(0..g.len());
            let sigma = PreferenceList::uniform(&g, &mut rng);

            let (w2, _) = apply_word(&w, arrival, &sigma, policy, &g).unwrap();
            let x2 = apply_class(&w.commutative_image(&g), arrival, &sigma, policy, &g).unwrap();
            assert_eq!(w2.commutative_image(&g), x2);
            w2.check_admissible(&g).unwrap();
            assert_eq!((w2.len() as i64 - w.len() as i64).abs(), 1);
        }
    }

    #[test]
    fn fcfm_lcfm_ignore_preferences() {
        let g = paw();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..200 {
            let w = word(&g, "313");
            let arrival = rng.gen_range(0..g.len());
            let s1 = PreferenceList::uniform(&g, &mut rng);
            let s2 = PreferenceList::uniform(&g, &mut rng);
            for policy in [PolicySpec::Fcfm, PolicySpec::Lcfm] {
                let a = apply_word(&w, arrival, &s1, &policy, &g).unwrap();
                let b = apply_word(&w, arrival, &s2, &policy, &g).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn policy_tags_round_trip() {
        let g = paw();
        let star = PreferenceList::canonical(&g);
        for policy in [
            PolicySpec::Fcfm,
            PolicySpec::Lcfm,
            PolicySpec::Ml,
            PolicySpec::Ms,
            PolicySpec::Uniform,
            PolicySpec::Priority(star),
        ] {
            let tag = policy.tag(&g);
            assert_eq!(PolicySpec::parse(&tag, &g).unwrap(), policy);
        }
        assert!(PolicySpec::parse("nope", &paw()).is_err());
    }
}
