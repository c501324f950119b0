//! Command-line experiments for the stochastic matching model. Every
//! subcommand reads its inputs from files or flags, writes a machine-readable
//! report to stdout (or `--out`), and exits 0 on success, 1 when a property
//! or verification fails, and 2 on usage errors.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use matchkit::chain::{detailed_trajectories, run_natural, Trajectory};
use matchkit::coupling::{
    exchange_and_reverse_check, perfect_sample, stationary_matching_window,
};
use matchkit::erasing::{
    certify_strong_erasing_word, erasing_word, is_erasing_word, minimal_erasing_word,
    strong_erasing_word,
};
use matchkit::graph::CompatibilityGraph;
use matchkit::input::{check_ncond, ArrivalEvent, Measure, StreamSpec};
use matchkit::policy::{PolicySpec, PreferenceList, QueueWord};
use matchkit::productform::{
    marginalize_check, normalizing_constant, pi_w_weight, verify_global_balance, verify_kelly,
    z_tail_bound, z_truncated,
};
use matchkit::properties::{check_nonexpansive, check_subadditive};
use matchkit::rational::{format_rational, to_f64};
use matchkit::Vertex;

#[derive(Parser)]
#[command(name = "matchkit", version, about = "Stochastic matching on compatibility graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file: {"vertices": [...], "edges": [[a,b], ...]}.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct StreamArgs {
    /// Inline arrival classes, e.g. `1,3,4,2`.
    #[arg(long)]
    arrivals: Option<String>,
    /// Preference-list file applied at every inline arrival (required for
    /// preference-dependent policies with --arrivals).
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Measure file for an iid stream.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Periodic arrival word, e.g. `142356`.
    #[arg(long)]
    periodic: Option<String>,
    /// Phase offset of the periodic word.
    #[arg(long, default_value_t = 0)]
    phase: usize,
    /// Number of arrivals to generate for stream inputs.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Structural analyses: independent sets, bipartiteness, separability,
    /// spanning odd cycle.
    AnalyzeGraph {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the stability condition mu(I) < mu(E(I)) over all independent
    /// sets. Exits 1 with witnesses when violated.
    Ncond {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one trajectory and emit per-step states (detailed chains under
    /// fcfm).
    Simulate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Normalizing constant with truncation bracket, marginalization check,
    /// and an empirical long-run comparison.
    VerifyProductForm {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        measure: PathBuf,
        /// Queue-word length for the marginalization check.
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// Length of the direct truncated sum bracketing the series.
        #[arg(long, default_value_t = 12)]
        truncate_len: usize,
        /// Arrivals simulated for the empirical comparison.
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        #[arg(long, default_value_t = 1_000)]
        burn_in: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Total-variation tolerance for the empirical comparison.
        #[arg(long, default_value_t = 0.05)]
        tv_tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact reversibility identity between the detailed chains.
    KellyCheck {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact global balance of the product-form law.
    BalanceCheck {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized property suites.
    Property {
        #[command(subcommand)]
        which: PropertyCommand,
    },
    /// Erasing-word construction, search and verification.
    Erasing {
        #[command(subcommand)]
        which: ErasingCommand,
    },
    /// Draw exact stationary even-time states by coupling from the past.
    PerfectSample {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Certified initial-condition size bound, in pairs.
        #[arg(long, default_value_t = 4)]
        r: usize,
        /// Horizon cap in paired events.
        #[arg(long, default_value_t = 1 << 20)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-window stationary matchings for both parities.
    MatchWindow {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exchange a perfectly matched block and verify its reverse-time
    /// matching.
    ReverseCheck {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        arrivals: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum PropertyCommand {
    /// Sub-additivity of the buffer size under concatenation.
    Subadd {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 8)]
        max_word_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Non-expansiveness of the class-detail update.
    Nonexp {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum ErasingCommand {
    /// Constructive erasing word for an even buffer.
    Find {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Strong erasing word for the graph and policy, when found.
    Strong {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Shortest erasing word by exhaustive search.
    Minimal {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify a given word as (strong) erasing.
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        policy: String,
        /// Target buffer (ignored with --strong).
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        strong: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn load_graph(path: &PathBuf) -> Result<CompatibilityGraph> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading graph file {}", path.display()))?;
    CompatibilityGraph::from_json(&text).map_err(|e| anyhow!("{e}"))
}

fn load_measure(path: &PathBuf, g: &CompatibilityGraph) -> Result<Measure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading measure file {}", path.display()))?;
    Measure::from_json(&text, g).map_err(|e| anyhow!("{e}"))
}

fn parse_policy(tag: &str, g: &CompatibilityGraph) -> Result<PolicySpec> {
    PolicySpec::parse(tag, g).map_err(|e| anyhow!("{e}"))
}

fn parse_arrival_classes(g: &CompatibilityGraph, text: &str) -> Result<Vec<Vertex>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| g.vertex(t.trim()).map_err(|e| anyhow!("{e}")))
        .collect()
}

fn parse_word(g: &CompatibilityGraph, text: &str) -> Result<QueueWord> {
    QueueWord::parse(g, text).map_err(|e| anyhow!("{e}"))
}

impl StreamArgs {
    fn events(&self, g: &CompatibilityGraph, policy: &PolicySpec) -> Result<Vec<ArrivalEvent>> {
        if let Some(arrivals) = &self.arrivals {
            let classes = parse_arrival_classes(g, arrivals)?;
            let prefs = match &self.sigma {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading sigma file {}", path.display()))?;
                    PreferenceList::from_json(&text, g).map_err(|e| anyhow!("{e}"))?
                }
                None => policy.deterministic_preferences(g).ok_or_else(|| {
                    anyhow!("policy {} draws random preference lists; pass --sigma with inline arrivals", policy.tag(g))
                })?,
            };
            let steps = self.steps.unwrap_or(classes.len()).min(classes.len());
            return Ok(classes[..steps]
                .iter()
                .map(|&class| ArrivalEvent {
                    class,
                    prefs: prefs.clone(),
                })
                .collect());
        }
        let steps = self
            .steps
            .ok_or_else(|| anyhow!("--steps is required with stream inputs"))?;
        let spec = if let Some(word) = &self.periodic {
            let classes = parse_arrival_classes(g, &word.chars().map(|c| c.to_string()).collect::<Vec<_>>().join(","))?;
            StreamSpec::periodic(classes, self.phase).map_err(|e| anyhow!("{e}"))?
        } else if let Some(measure) = &self.measure {
            StreamSpec::Iid {
                measure: load_measure(measure, g)?,
                policy: policy.clone(),
                seed: self.seed,
            }
        } else {
            bail!("provide --arrivals, --periodic or --measure");
        };
        spec.generate(g, steps).map_err(|e| anyhow!("{e}"))
    }
}

fn emit(output: &OutputArgs, content: String) -> Result<()> {
    let content = if content.ends_with('\n') {
        content
    } else {
        content + "\n"
    };
    match &output.out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn trajectory_report(
    t: &Trajectory,
    g: &CompatibilityGraph,
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("n,event_class,W,B,F,matched_with\n");
            for step in &t.steps {
                let b = step.b.as_ref().map(|w| w.format(g)).unwrap_or_default();
                let f = match &step.f {
                    Some(w) => w.format(g),
                    None if step.b.is_some() => "incomplete".into(),
                    None => String::new(),
                };
                let matched = step
                    .matched_with
                    .map(|i| i.to_string())
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    step.n,
                    g.name(step.event_class),
                    step.w.format(g),
                    b,
                    f,
                    matched
                ));
            }
            out
        }
        Format::Json => {
            let mut lines = Vec::new();
            for step in &t.steps {
                lines.push(
                    json!({
                        "n": step.n,
                        "event_class": g.name(step.event_class),
                        "W": step.w.format(g),
                        "B": step.b.as_ref().map(|w| w.format(g)),
                        "F": step.f.as_ref().map(|w| w.format(g)),
                        "f_incomplete": step.b.is_some() && step.f.is_none(),
                        "matched_with": step.matched_with,
                    })
                    .to_string(),
                );
            }
            lines.join("\n")
        }
    }
}

/// Long-run empirical law of the natural chain, compared in total variation
/// against the normalized product form over words up to `max_len` (longer
/// words pooled into one bin).
fn empirical_tv(
    g: &CompatibilityGraph,
    mu: &Measure,
    steps: usize,
    burn_in: usize,
    seed: u64,
    max_len: usize,
) -> Result<f64> {
    let sigma = PreferenceList::canonical(g);
    let mut word: Vec<Vertex> = Vec::new();
    let mut counts: HashMap<Vec<Vertex>, u64> = HashMap::new();
    let mut long_words = 0u64;
    let sampler = mu.sampler().map_err(|e| anyhow!("{e}"))?;
    let mut rng = matchkit::input::event_rng(seed, 0);
    for n in 0..burn_in + steps {
        let class = sampler.draw(&mut rng);
        matchkit::policy::apply_word_in_place(&mut word, class, &sigma, &PolicySpec::Fcfm, g);
        if n >= burn_in {
            if word.len() <= max_len {
                *counts.entry(word.clone()).or_default() += 1;
            } else {
                long_words += 1;
            }
        }
    }

    let nc = normalizing_constant(g, mu).map_err(|e| anyhow!("{e}"))?;
    let total = steps as f64;
    let mut tv = 0.0f64;
    let mut theory_mass = 0.0f64;
    for w in matchkit::productform::enumerate_queue_words(g, max_len) {
        let theory = to_f64(&(nc.alpha.clone() * pi_w_weight(&w, mu, g).map_err(|e| anyhow!("{e}"))?));
        theory_mass += theory;
        let observed = counts
            .get(w.letters())
            .copied()
            .unwrap_or(0) as f64
            / total;
        tv += (observed - theory).abs();
    }
    tv += (long_words as f64 / total - (1.0 - theory_mass)).abs();
    Ok(tv / 2.0)
}

fn run() -> Result<i32> {
    if let Ok(threads) = std::env::var("MATCHKIT_THREADS") {
        let n: usize = threads
            .parse()
            .map_err(|_| anyhow!("MATCHKIT_THREADS must be an integer"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }

    let cli = Cli::parse();
    match cli.command {
        Command::AnalyzeGraph { graph, output } => {
            let g = load_graph(&graph.graph)?;
            let sets: Vec<_> = g
                .independent_sets()
                .iter()
                .map(|s| {
                    json!({
                        "members": s.members.iter().map(|v| g.name(v)).collect::<Vec<_>>(),
                        "maximal": s.maximal,
                    })
                })
                .collect();
            let bipartition = g.bipartition();
            let separability = g.separability_order();
            let report = json!({
                "vertices": g.names(),
                "independent_sets": sets,
                "bipartite": bipartition.is_some(),
                "bipartition": bipartition,
                "separability_order": separability.as_ref().map(|(p, _)| p),
                "separable_partition": separability.as_ref().map(|(_, parts)| parts
                    .iter()
                    .map(|p| p.iter().map(|v| g.name(v)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()),
                "spanning_odd_cycle": g
                    .spanning_odd_cycle()
                    .map(|walk| walk.iter().map(|&v| g.name(v)).collect::<Vec<_>>()),
            });
            emit(&output, report.to_string())?;
            Ok(0)
        }
        Command::Ncond {
            graph,
            measure,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let mu = load_measure(&measure, &g)?;
            let report = check_ncond(&g, &mu).map_err(|e| anyhow!("{e}"))?;
            let ok = report.satisfied;
            emit(&output, serde_json::to_string(&report)?)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Simulate {
            graph,
            policy,
            stream,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let policy = parse_policy(&policy, &g)?;
            let events = stream.events(&g, &policy)?;
            let trajectory = if policy == PolicySpec::Fcfm {
                detailed_trajectories(&events, &g).map_err(|e| anyhow!("{e}"))?
            } else {
                run_natural(&QueueWord::empty(), &events, &policy, &g)
                    .map_err(|e| anyhow!("{e}"))?
            };
            emit(&output, trajectory_report(&trajectory, &g, output.format))?;
            Ok(0)
        }
        Command::VerifyProductForm {
            graph,
            measure,
            max_len,
            truncate_len,
            steps,
            burn_in,
            seed,
            tv_tol,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let mu = load_measure(&measure, &g)?;
            let nc = normalizing_constant(&g, &mu).map_err(|e| anyhow!("{e}"))?;
            let truncated = z_truncated(&g, &mu, truncate_len).map_err(|e| anyhow!("{e}"))?;
            let bound = z_tail_bound(&g, &mu, truncate_len).map_err(|e| anyhow!("{e}"))?;
            let bracket_ok = truncated <= nc.z && nc.z <= truncated.clone() + bound.clone();
            let marginal = marginalize_check(&g, &mu, max_len).map_err(|e| anyhow!("{e}"))?;
            let tv = empirical_tv(&g, &mu, steps, burn_in, seed, max_len)?;
            let passed = bracket_ok && marginal.passed() && tv <= tv_tol;
            let report = json!({
                "alpha": format!("{}/{}", nc.alpha_num, nc.alpha_den),
                "z": format_rational(&nc.z),
                "z_truncated": format_rational(&truncated),
                "z_tail_bound": format_rational(&bound),
                "bracket_ok": bracket_ok,
                "marginalization": marginal,
                "empirical_tv": tv,
                "tv_tol": tv_tol,
                "passed": passed,
            });
            emit(&output, report.to_string())?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::KellyCheck {
            graph,
            measure,
            max_len,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let mu = load_measure(&measure, &g)?;
            let report = verify_kelly(&g, &mu, max_len).map_err(|e| anyhow!("{e}"))?;
            let ok = report.passed();
            emit(&output, serde_json::to_string(&report)?)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::BalanceCheck {
            graph,
            measure,
            max_len,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let mu = load_measure(&measure, &g)?;
            let report = verify_global_balance(&g, &mu, max_len).map_err(|e| anyhow!("{e}"))?;
            let ok = report.passed();
            emit(&output, serde_json::to_string(&report)?)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Property { which } => match which {
            PropertyCommand::Subadd {
                graph,
                policy,
                trials,
                max_word_len,
                seed,
                output,
            } => {
                let g = load_graph(&graph.graph)?;
                let policy = parse_policy(&policy, &g)?;
                let report = check_subadditive(&policy, &g, trials, max_word_len, seed)
                    .map_err(|e| anyhow!("{e}"))?;
                let ok = report.passed();
                emit(&output, serde_json::to_string(&report)?)?;
                Ok(if ok { 0 } else { 1 })
            }
            PropertyCommand::Nonexp {
                graph,
                policy,
                trials,
                seed,
                output,
            } => {
                let g = load_graph(&graph.graph)?;
                let policy = parse_policy(&policy, &g)?;
                let report =
                    check_nonexpansive(&policy, &g, trials, seed).map_err(|e| anyhow!("{e}"))?;
                let ok = report.passed();
                emit(&output, serde_json::to_string(&report)?)?;
                Ok(if ok { 0 } else { 1 })
            }
        },
        Command::Erasing { which } => match which {
            ErasingCommand::Find {
                graph,
                policy,
                word,
                output,
            } => {
                let g = load_graph(&graph.graph)?;
                let policy = parse_policy(&policy, &g)?;
                let u = parse_word(&g, &word)?;
                let cert = erasing_word(&g, &u, &policy).map_err(|e| anyhow!("{e}"))?;
                emit(&output, cert.to_json())?;
                Ok(0)
            }
            ErasingCommand::Strong {
                graph,
                policy,
                output,
            } => {
                let g = load_graph(&graph.graph)?;
                let policy = parse_policy(&policy, &g)?;
                match strong_erasing_word(&g, &policy).map_err(|e| anyhow!("{e}"))? {
                    Some(cert) => {
                        emit(&output, cert.to_json())?;
                        Ok(0)
                    }
                    None => {
                        emit(&output, json!({"found": false}).to_string())?;
                        Ok(1)
                    }
                }
            }
            ErasingCommand::Minimal {
                graph,
                policy,
                word,
                cap,
                output,
            } => {
                let g = load_graph(&graph.graph)?;
                let policy = parse_policy(&policy, &g)?;
                let u = parse_word(&g, &word)?;
                match minimal_erasing_word(&g, &u, &policy, cap).map_err(|e| anyhow!("{e}"))? {
                    Some(cert) => {
                        emit(&output, cert.to_json())?;
                        Ok(0)
                    }
                    None => {
                        emit(&output, json!({"found": false, "cap": cap}).to_string())?;
                        Ok(1)
                    }
                }
            }
            ErasingCommand::Verify {
                graph,
                policy,
                word,
                z,
                strong,
                output,
            } => {
                let g = load_graph(&graph.graph)?;
                let policy = parse_policy(&policy, &g)?;
                let z_word = parse_arrival_classes(
                    &g,
                    &z.chars().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
                )?;
                let ok = if strong {
                    match certify_strong_erasing_word(&g, &z_word, &policy)
                        .map_err(|e| anyhow!("{e}"))?
                    {
                        Some(cert) => {
                            emit(&output, cert.to_json())?;
                            true
                        }
                        None => {
                            emit(&output, json!({"is_strong": false}).to_string())?;
                            false
                        }
                    }
                } else {
                    let u = parse_word(&g, &word)?;
                    let ok =
                        is_erasing_word(&g, &u, &z_word, &policy).map_err(|e| anyhow!("{e}"))?;
                    emit(&output, json!({"is_erasing": ok}).to_string())?;
                    ok
                };
                Ok(if ok { 0 } else { 1 })
            }
        },
        Command::PerfectSample {
            graph,
            measure,
            policy,
            samples,
            seed,
            r,
            cap,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let mu = load_measure(&measure, &g)?;
            let policy = parse_policy(&policy, &g)?;
            let mut lines = Vec::new();
            if output.format == Format::Csv {
                lines.push("seed,state,horizon_used".to_string());
            }
            for i in 0..samples {
                let s = seed.wrapping_add(i);
                let sample =
                    perfect_sample(&g, &mu, &policy, r, s, cap).map_err(|e| anyhow!("{e}"))?;
                let state = sample.state.word().format(&g);
                match output.format {
                    Format::Csv => lines.push(format!("{s},{state},{}", sample.horizon_used)),
                    Format::Json => lines.push(
                        json!({"seed": s, "state": state, "horizon_used": sample.horizon_used})
                            .to_string(),
                    ),
                }
            }
            emit(&output, lines.join("\n"))?;
            Ok(0)
        }
        Command::MatchWindow {
            graph,
            policy,
            stream,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let policy = parse_policy(&policy, &g)?;
            let events = stream.events(&g, &policy)?;
            let (even, odd) =
                stationary_matching_window(&events, &policy, &g).map_err(|e| anyhow!("{e}"))?;
            let window_json = |w: &matchkit::coupling::PerfectMatchingWindow| {
                json!({
                    "parity": match w.parity {
                        matchkit::coupling::Parity::Even => "even",
                        matchkit::coupling::Parity::Odd => "odd",
                    },
                    "construction_points": w.construction_points,
                    "pairs": w.blocks.iter().flat_map(|b| b.pairs.clone()).collect::<Vec<_>>(),
                    "states": w.states.iter().map(|s| s.format(&g)).collect::<Vec<_>>(),
                    "incomplete_tail_from": w.incomplete_tail_from,
                })
            };
            let report = json!({"even": window_json(&even), "odd": window_json(&odd)});
            emit(&output, report.to_string())?;
            Ok(0)
        }
        Command::ReverseCheck {
            graph,
            arrivals,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let classes = parse_arrival_classes(&g, &arrivals)?;
            let prefs = PreferenceList::canonical(&g);
            let events: Vec<ArrivalEvent> = classes
                .iter()
                .map(|&class| ArrivalEvent {
                    class,
                    prefs: prefs.clone(),
                })
                .collect();
            let t = run_natural(&QueueWord::empty(), &events, &PolicySpec::Fcfm, &g)
                .map_err(|e| anyhow!("{e}"))?;
            if !t.matching.is_perfect() {
                bail!(
                    "the arrivals are not perfectly matched under fcfm ({} left unmatched)",
                    t.matching.unmatched.len()
                );
            }
            let check = exchange_and_reverse_check(&classes, &t.matching, &g)
                .map_err(|e| anyhow!("{e}"))?;
            let ok = check.passed;
            emit(&output, serde_json::to_string(&check)?)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
