//! Synthetic data, the mock network, detection and sampling.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::time::Duration;

use banscope_core::epidemic::{plant_synthetic, SIParams};
use banscope_core::graph::{topology_summary, NodeId, PopulationDataset};
use banscope_core::ingest::{load_dataset, save_dataset, write_dataset};
use banscope_core::sampler::{crawl_population, InteractionSource, SampleError, SourceError, SyntheticSource};
use banscope_core::synth::{attach_synthetic_features, synthetic_topologies, TopologyConfig};
use banscope_osn::server::serve_until_interrupted;
use banscope_osn::{plant_scenario, DetectError, DetectionReport, Detector, DetectorConfig, GhostStatus, MockSource, Scenario};
use chrono::{DateTime, NaiveDate, Utc};
use serde::Serialize;
use serde_json::json;

use crate::args::{DetectArgs, SampleArgs, ServeArgs, SynthArgs};
use crate::error::{CliError, Result};
use crate::output::Run;

fn write_output(d: &PopulationDataset, output: &Path, run: &mut Run) -> Result<()> {
    if output.as_os_str() == "-" {
        let stdout = io::stdout();
        write_dataset(d, stdout.lock())?;
    } else {
        let path = run.path(&output.to_string_lossy());
        save_dataset(d, &path)?;
        run.produced(&path);
    }
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        Box::new(BufReader::new(fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?))
    };
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct SynthRow<'a> {
    landmark: &'a str,
    n: usize,
    edges: usize,
    s: usize,
}

pub fn synth(args: &SynthArgs, run: &mut Run) -> Result<()> {
    let seed = run.seed();
    let topologies = match &args.topology {
        Some(path) => load_dataset(path)?,
        None => {
            let mut cfg = TopologyConfig::random_population(args.graphs, seed);
            cfg.profile.users = args.users;
            synthetic_topologies(&cfg)
        }
    };
    let planted = match (args.p0, args.beta, args.uniform_mu) {
        (Some(p0), Some(beta), _) => plant_synthetic(&topologies, SIParams::new(p0, beta)?, seed.wrapping_add(1)),
        (_, _, Some(mu)) => plant_synthetic(&topologies, SIParams::uniform(mu)?, seed.wrapping_add(1)),
        _ => topologies,
    };
    let planted = match args.feature_shift {
        Some(shift) if shift >= 0.0 => attach_synthetic_features(&planted, shift, seed.wrapping_add(2)),
        Some(_) => return Err(CliError::Usage("--feature-shift must be non-negative".into())),
        None => planted,
    };
    write_output(&planted, &args.output, run)?;
    run.csv(
        "synth_graphs.csv",
        planted.graphs.iter().map(|g| SynthRow {
            landmark: g.landmark.as_str(),
            n: g.len(),
            edges: g.edges.len(),
            s: g.banned_count(),
        }),
    )?;
    let nodes = planted.total_nodes();
    run.json(
        "synth.json",
        &json!({
            "graphs": planted.graphs.len(),
            "nodes": nodes,
            "banned": planted.total_banned(),
            "banned_fraction": if nodes == 0 { 0.0 } else { planted.total_banned() as f64 / nodes as f64 },
            "topology": topology_summary(&planted).ok(),
            "ground_truth": planted.metadata.get("ground_truth"),
        }),
    )
}

pub fn serve(args: &ServeArgs, run: &mut Run) -> Result<()> {
    let scenario = if args.from_dataset {
        plant_scenario(&load_dataset(&args.input)?)
    } else if args.input.as_os_str() == "-" {
        Scenario::read(BufReader::new(io::stdin()))?
    } else {
        Scenario::load(&args.input)?
    };
    if let Some(path) = &args.write_scenario {
        scenario.save(path)?;
        run.produced(path);
    }
    let users = scenario.users.len();
    let addr = format!("{}:{}", args.host, args.port);
    serve_until_interrupted(scenario, &addr, |bound| {
        println!("listening on http://{bound} ({users} users)");
        let _ = io::stdout().flush();
    })
    .map_err(|e| CliError::Transport(format!("cannot serve on {addr}: {e}")))
}

fn parse_since(s: &str) -> Result<DateTime<Utc>> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).unwrap().and_utc());
    }
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| CliError::Usage(format!("bad --since {s:?}: {e}")))
}

fn detect_error(e: DetectError) -> CliError {
    if e.is_retryable() {
        CliError::Transport(e.to_string())
    } else {
        CliError::Data(e.to_string())
    }
}

#[derive(Serialize)]
struct DetectRow<'a> {
    user: &'a str,
    typeahead: Option<bool>,
    search: Option<bool>,
    ghost: Option<bool>,
    inactive: bool,
    banned: bool,
    complete: bool,
}

fn detector(args: &DetectArgs) -> Result<Detector> {
    Ok(Detector::new(
        &args.endpoint,
        DetectorConfig {
            since: parse_since(&args.since)?,
            ghost_sample: args.sample,
            full_scan: args.full_scan,
            timeout: Duration::from_secs(args.timeout_secs),
            retries: args.retries,
        },
    ))
}

fn write_reports(reports: &[DetectionReport], run: &mut Run) -> Result<()> {
    run.csv(
        "detect.csv",
        reports.iter().map(|r| DetectRow {
            user: &r.user,
            typeahead: r.typeahead,
            search: r.search,
            ghost: match r.ghost {
                Some(GhostStatus::Verdict(v)) => Some(v),
                _ => None,
            },
            inactive: r.inactive(),
            banned: r.banned(),
            complete: r.complete,
        }),
    )?;
    run.jsonl("detect_evidence.jsonl", reports)?;
    let count = |f: &dyn Fn(&DetectionReport) -> bool| reports.iter().filter(|r| f(r)).count();
    run.json(
        "detect.json",
        &json!({
            "users": reports.len(),
            "banned": count(&|r| r.banned()),
            "typeahead": count(&|r| r.typeahead == Some(true)),
            "search": count(&|r| r.search == Some(true)),
            "ghost": count(&|r| r.ghost == Some(GhostStatus::Verdict(true))),
            "inactive": count(&|r| r.inactive()),
            "incomplete": count(&|r| !r.complete),
        }),
    )
}

fn transport_check(reports: &[DetectionReport]) -> Result<()> {
    let failed = reports.iter().filter(|r| r.transport_error).count();
    if failed > 0 {
        return Err(CliError::Transport(format!("{failed} of {} users could not be fully tested", reports.len())));
    }
    Ok(())
}

pub fn detect(args: &DetectArgs, run: &mut Run) -> Result<()> {
    let det = detector(args)?;
    let mut users = args.users.clone();
    if let Some(path) = &args.users_file {
        users.extend(read_lines(path)?);
    }
    if args.all {
        users.extend(det.list_users().map_err(detect_error)?);
    }
    if users.is_empty() {
        return Err(CliError::Usage("no users to test: pass --user, --users-file or --all".into()));
    }
    let reports = det.detect_all(&users);
    write_reports(&reports, run)?;
    transport_check(&reports)
}

#[derive(Serialize)]
struct SampleRow<'a> {
    landmark: &'a str,
    nodes: usize,
    edges: usize,
    status: &'static str,
    error: String,
}

pub fn sample(args: &SampleArgs, run: &mut Run) -> Result<()> {
    let seed = run.seed();
    let mut landmarks: Vec<String> = args.landmarks.clone();
    if let Some(path) = &args.landmarks_file {
        landmarks.extend(read_lines(path)?);
    }
    let synthetic;
    let mock;
    let source: &dyn InteractionSource = match (&args.endpoint, args.synthetic) {
        (Some(url), false) => {
            if args.random_landmarks.is_some() {
                return Err(CliError::Usage("--random-landmarks needs the synthetic source".into()));
            }
            mock = MockSource::new(url);
            &mock
        }
        (None, true) => {
            let mut profile = banscope_core::synth::random_population_profile();
            profile.users = args.users;
            synthetic = SyntheticSource::new(profile, seed);
            if let Some(n) = args.random_landmarks {
                landmarks.extend(synthetic.landmarks(n, seed.wrapping_add(1)).into_iter().map(|l| l.0));
            }
            &synthetic
        }
        _ => return Err(CliError::Usage("choose exactly one of --endpoint or --synthetic".into())),
    };
    if landmarks.is_empty() {
        return Err(CliError::Usage("no landmarks: pass --landmark, --landmarks-file or --random-landmarks".into()));
    }
    let ids: Vec<NodeId> = landmarks.iter().map(|l| NodeId::from(l.as_str())).collect();
    let report = crawl_population(source, "SAMPLE", &ids, args.fanout, args.expand_depth);
    let mut dataset = report.dataset;
    dataset.crawl_campaign = if args.synthetic { "synthetic".into() } else { "mock".into() };

    let mut transport_failures = report
        .failures
        .iter()
        .filter(|(_, SampleError::UnresolvableLandmark(_, e))| matches!(e, SourceError::Transport(_)))
        .count();
    let mut detected = 0;
    if args.detect {
        let det = Detector::new(args.endpoint.as_deref().unwrap_or_default(), DetectorConfig::default());
        let mut distinct: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for n in dataset.graphs.iter().flat_map(|g| &g.nodes) {
            if !index.contains_key(n.id.as_str()) {
                index.insert(n.id.as_str().to_string(), distinct.len());
                distinct.push(n.id.as_str().to_string());
            }
        }
        let reports = det.detect_all(&distinct);
        transport_failures += reports.iter().filter(|r| r.transport_error).count();
        for n in dataset.graphs.iter_mut().flat_map(|g| g.nodes.iter_mut()) {
            n.bans = reports[index[n.id.as_str()]].profile();
        }
        detected = reports.len();
        write_reports(&reports, run)?;
    }
    write_output(&dataset, &args.output, run)?;

    let mut rows: Vec<SampleRow> = Vec::with_capacity(ids.len());
    let mut graphs = dataset.graphs.iter();
    let mut failures = report.failures.iter().peekable();
    for l in &ids {
        match failures.peek() {
            Some((f, e)) if f == l => {
                rows.push(SampleRow {
                    landmark: l.as_str(),
                    nodes: 0,
                    edges: 0,
                    status: "failed",
                    error: e.to_string(),
                });
                failures.next();
            }
            _ => {
                let g = graphs.next().expect("one graph per successful landmark");
                rows.push(SampleRow {
                    landmark: l.as_str(),
                    nodes: g.len(),
                    edges: g.edges.len(),
                    status: if g.len() == 1 { "singleton" } else { "ok" },
                    error: String::new(),
                });
            }
        }
    }
    run.csv("sample.csv", &rows)?;
    run.json(
        "sample.json",
        &json!({
            "landmarks": ids.len(),
            "graphs": dataset.graphs.len(),
            "singletons": report.singletons.len(),
            "failures": report.failures.len(),
            "nodes": dataset.total_nodes(),
            "detected_users": detected,
        }),
    )?;
    if transport_failures > 0 {
        return Err(CliError::Transport(format!("{transport_failures} lookups failed in transport")));
    }
    Ok(())
}
