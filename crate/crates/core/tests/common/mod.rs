//! Shared fixtures for the integration suites: the two reference graphs of
//! the verification corpus plus the 6-vertex separable graph, and their
//! measures.

use matchkit::graph::CompatibilityGraph;
use matchkit::input::{ArrivalEvent, Measure};
use matchkit::policy::PreferenceList;
use matchkit::rational::from_ints;
use matchkit::Vertex;

/// Triangle with a pendant vertex: 1-2, 2-3, 2-4, 3-4.
pub fn paw() -> CompatibilityGraph {
    CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
}

pub fn k3() -> CompatibilityGraph {
    CompatibilityGraph::from_numbered(3, &[(1, 2), (1, 3), (2, 3)]).unwrap()
}

/// 6-vertex separable graph of order 3 (complete tripartite over the pairs
/// {1,4}, {2,5}, {3,6}).
pub fn weak6() -> CompatibilityGraph {
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

/// The stable reference measure on the paw graph.
pub fn paw_measure() -> Measure {
    Measure::new(vec![
        from_ints(1, 5),
        from_ints(3, 10),
        from_ints(1, 4),
        from_ints(1, 4),
    ])
    .unwrap()
}

pub fn classes(g: &CompatibilityGraph, text: &str) -> Vec<Vertex> {
    text.chars()
        .map(|c| g.vertex(&c.to_string()).unwrap())
        .collect()
}

pub fn events(g: &CompatibilityGraph, names: &str) -> Vec<ArrivalEvent> {
    let prefs = PreferenceList::canonical(g);
    classes(g, names)
        .into_iter()
        .map(|class| ArrivalEvent {
            class,
            prefs: prefs.clone(),
        })
        .collect()
}
