// probe: sampler bias + horizon consistency on paw
use matchkit::coupling::{perfect_sample, sample_at_horizon};
use matchkit::graph::CompatibilityGraph;
use matchkit::input::Measure;
use matchkit::policy::PolicySpec;
use matchkit::productform::{enumerate_queue_words, normalizing_constant, pi_w_weight};
use matchkit::rational::{from_ints, to_f64};
use std::collections::HashMap;

fn main() {
    let g = CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
    let mu = Measure::new(vec![from_ints(1,5), from_ints(3,10), from_ints(1,4), from_ints(1,4)]).unwrap();
    let policy = PolicySpec::Fcfm;
    let r: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let n: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(20000);

    let t0 = std::time::Instant::now();
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut horizon_sum = 0usize;
    let mut disagree = 0u64;
    let consistency_checks = 2000.min(n);
    for i in 0..n {
        let s = perfect_sample(&g, &mu, &policy, r, 1_000_000 + i, 1 << 22).unwrap();
        horizon_sum += s.horizon_used;
        *counts.entry(s.state.word().format(&g)).or_default() += 1;
        if i < consistency_checks {
            let deep = sample_at_horizon(&g, &mu, &policy, r, 1_000_000 + i, s.horizon_used).unwrap();
            let shallow = sample_at_horizon(&g, &mu, &policy, r, 1_000_000 + i, s.horizon_used / 2).unwrap();
            if deep.as_ref() != Some(&s.state) || shallow.as_ref() != Some(&s.state) { disagree += 1; }
        }
    }
    let dt = t0.elapsed();
    let nc = normalizing_constant(&g, &mu).unwrap();
    let mut tv = 0.0f64;
    let mut theory_mass = 0.0;
    let mut short_obs = 0u64;
    for w in enumerate_queue_words(&g, 4) {
        if !w.is_even() { continue; }
        let theory = 2.0 * to_f64(&(nc.alpha.clone() * pi_w_weight(&w, &mu, &g).unwrap()));
        theory_mass += theory;
        let obs = *counts.get(&w.format(&g)).unwrap_or(&0) as f64 / n as f64;
        short_obs += *counts.get(&w.format(&g)).unwrap_or(&0);
        tv += (obs - theory).abs();
    }
    tv += ((n - short_obs) as f64 / n as f64 - (1.0 - theory_mass)).abs();
    tv /= 2.0;
    println!("r={r} n={n} time={:?} per_sample={:.3}ms avg_horizon={:.1}", dt, dt.as_secs_f64()*1e3/n as f64, horizon_sum as f64 / n as f64);
    println!("TV(<=4 bins + other) = {tv:.4}");
    println!("P(empty): obs={:.4} theory={:.4}", *counts.get("-").unwrap_or(&0) as f64 / n as f64, 2.0*to_f64(&nc.alpha));
    println!("consistency disagreements: {disagree}/{consistency_checks}");
}
