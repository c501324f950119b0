//! Probability measures on the class set, the stability condition, and
//! reproducible arrival-stream generators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::{MatchError, Result};
use crate::graph::{CompatibilityGraph, Vertex, VertexSet};
use crate::policy::{PolicySpec, PreferenceList};
use crate::rational::{format_rational, Rational};

/// A full-support probability vector on the vertices, stored as exact
/// rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(MatchError::InvalidMeasure(
                "all weights must be strictly positive (full support)".into(),
            ));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(MatchError::InvalidMeasure(format!(
                "weights sum to {}, expected 1",
                format_rational(&total)
            )));
        }
        Ok(Measure { weights })
    }

    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(BigInt::one(), BigInt::from(n));
        Measure {
            weights: vec![w; n],
        }
    }

    /// Parses `{"vertex": "p/q" | float, ...}` against a graph's vertex set.
    pub fn from_json(text: &str, g: &CompatibilityGraph) -> Result<Self> {
        let map: BTreeMap<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| MatchError::Parse(e.to_string()))?;
        let mut weights = vec![Rational::zero(); g.len()];
        let mut seen = vec![false; g.len()];
        for (name, value) in &map {
            let v = g.vertex(name)?;
            let r = match value {
                serde_json::Value::String(s) => crate::rational::parse_rational(s)?,
                serde_json::Value::Number(n) => {
                    let f = n
                        .as_f64()
                        .ok_or_else(|| MatchError::Parse(format!("bad number for {name}")))?;
                    Rational::from_float(f)
                        .ok_or_else(|| MatchError::Parse(format!("non-finite weight for {name}")))?
                }
                other => {
                    return Err(MatchError::Parse(format!(
                        "weight for {name} must be a string or number, got {other}"
                    )))
                }
            };
            weights[v] = r;
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(MatchError::InvalidMeasure(format!(
                "missing weight for vertex {}",
                g.name(v)
            )));
        }
        Measure::new(weights)
    }

    pub fn to_json(&self, g: &CompatibilityGraph) -> String {
        let map: BTreeMap<String, String> = (0..self.len())
            .map(|v| (g.name(v).to_string(), format_rational(&self.weights[v])))
            .collect();
        serde_json::to_string(&map).expect("measure serialization cannot fail")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, v: Vertex) -> &Rational {
        &self.weights[v]
    }

    /// `mu(U)` for a vertex set.
    pub fn mass(&self, set: VertexSet) -> Rational {
        set.iter().map(|v| self.weights[v].clone()).sum()
    }

    /// Exact sampler over the common denominator of the weights.
    pub fn sampler(&self) -> Result<MeasureSampler> {
        let mut denom = BigInt::one();
        for w in &self.weights {
            denom = denom.lcm(w.denom());
        }
        let denom_u64 = denom
            .to_u64()
            .ok_or_else(|| MatchError::InvalidMeasure("common denominator exceeds u64".into()))?;
        let mut cum = Vec::with_capacity(self.weights.len());
        let mut acc = 0u64;
        for w in &self.weights {
            let scaled = (w * Rational::from_integer(denom.clone()))
                .to_integer()
                .to_u64()
                .expect("scaled weight fits after lcm");
            acc += scaled;
            cum.push(acc);
        }
        debug_assert_eq!(acc, denom_u64);
        Ok(MeasureSampler {
            cum,
            denom: denom_u64,
        })
    }
}

/// Draws classes exactly according to a rational measure.
#[derive(Clone, Debug)]
pub struct MeasureSampler {
    cum: Vec<u64>,
    denom: u64,
}

impl MeasureSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vertex {
        let u = rng.gen_range(0..self.denom);
        self.cum.partition_point(|&c| c <= u)
    }
}

/// One failing or tight independent set in the stability check.
#[derive(Clone, Debug, Serialize)]
pub struct NcondViolation {
    pub set: Vec<String>,
    pub mu_set: String,
    pub mu_neighborhood: String,
}

/// Result of the stability condition `mu(I) < mu(E(I))` over every
/// independent set.
#[derive(Clone, Debug, Serialize)]
pub struct NcondReport {
    pub satisfied: bool,
    pub violations: Vec<NcondViolation>,
}

/// Checks `mu(I) < mu(E(I))` strictly, with exact rational comparisons, for
/// every non-empty independent set of the graph.
pub fn check_ncond(g: &CompatibilityGraph, mu: &Measure) -> Result<NcondReport> {
    if mu.len() != g.len() {
        return Err(MatchError::InvalidMeasure(format!(
            "measure has {} weights for a {}-vertex graph",
            mu.len(),
            g.len()
        )));
    }
    let mut violations = Vec::new();
    for ind in g.independent_sets() {
        let m_set = mu.mass(ind.members);
        let m_nbr = mu.mass(g.neighborhood(ind.members)?);
        if m_set >= m_nbr {
            violations.push(NcondViolation {
                set: ind.members.iter().map(|v| g.name(v).to_string()).collect(),
                mu_set: format_rational(&m_set),
                mu_neighborhood: format_rational(&m_nbr),
            });
        }
    }
    Ok(NcondReport {
        satisfied: violations.is_empty(),
        violations,
    })
}

/// One arriving item: its class and the preference list drawn on arrival.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrivalEvent {
    pub class: Vertex,
    pub prefs: PreferenceList,
}

/// Two consecutive arrivals, as seen by the even-time chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedEvent {
    pub first: ArrivalEvent,
    pub second: ArrivalEvent,
}

/// Which arrivals of a stream are paired together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartParity {
    Even,
    Odd,
}

/// Specification of an arrival stream: iid draws from `mu` with preferences
/// from the policy's list distribution, or a deterministic periodic word.
#[derive(Clone, Debug)]
pub enum StreamSpec {
    Iid {
        measure: Measure,
        policy: PolicySpec,
        seed: u64,
    },
    Periodic {
        word: Vec<Vertex>,
        phase: usize,
    },
}

/// Per-index generator keyed by `(seed, index)`, so windows extended into the
/// past reuse the same draws for shared indices. Negative indices are the
/// backwards windows of the perfect sampler.
pub fn event_rng(seed: u64, index: i64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

impl StreamSpec {
    pub fn periodic(word: Vec<Vertex>, phase: usize) -> Result<Self> {
        if word.is_empty() {
            return Err(MatchError::Precondition("periodic word is empty".into()));
        }
        Ok(StreamSpec::Periodic { word, phase })
    }

    /// The arrival at stream index `n` (indices may be negative for
    /// backwards windows). Deterministic given the spec.
    pub fn event_at(&self, g: &CompatibilityGraph, n: i64) -> Result<ArrivalEvent> {
        match self {
            StreamSpec::Iid {
                measure,
                policy,
                seed,
            } => {
                let mut rng = event_rng(*seed, n);
                let sampler = measure.sampler()?;
                let class = sampler.draw(&mut rng);
                let prefs = policy.draw_preferences(g, &mut rng);
                Ok(ArrivalEvent { class, prefs })
            }
            StreamSpec::Periodic { word, phase } => {
                let len = word.len() as i64;
                let idx = (n + *phase as i64).rem_euclid(len) as usize;
                Ok(ArrivalEvent {
                    class: word[idx],
                    prefs: PreferenceList::canonical(g),
                })
            }
        }
    }

    /// The first `n` arrivals of the stream.
    pub fn generate(&self, g: &CompatibilityGraph, n: usize) -> Result<Vec<ArrivalEvent>> {
        (0..n as i64).map(|i| self.event_at(g, i)).collect()
    }
}

/// Pairs consecutive events. `Odd` drops the first event before pairing; a
/// trailing unpaired event is truncated and reported.
pub fn pair_events(
    stream: &[ArrivalEvent],
    start_parity: StartParity,
) -> (Vec<PairedEvent>, bool) {
    let events = match start_parity {
        StartParity::Even => stream,
        StartParity::Odd => {
            if stream.is_empty() {
                stream
            } else {
                &stream[1..]
            }
        }
    };
    let truncated = events.len() % 2 == 1;
    let pairs = events
        .chunks_exact(2)
        .map(|pair| PairedEvent {
            first: pair[0].clone(),
            second: pair[1].clone(),
        })
        .collect();
    (pairs, truncated)
}
