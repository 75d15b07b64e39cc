use std::collections::HashMap;
use std::net::TcpListener;
use std::time::{Duration, Instant};

use banscope_core::graph::{BanProfile, EgoGraph, Node, NodeId, PopulationDataset};
use banscope_core::sampler::{sample_ego, GraphSource};
use banscope_osn::client::HttpClient;
use banscope_osn::scenario::{SimTweet, TweetKind};
use banscope_osn::{plant_scenario, DetectError, Detector, DetectorConfig, GhostStatus, MockServer, MockSource, Scenario};
use chrono::{TimeZone, Utc};

/// `graphs` graphs of `size` users each, ban combinations cycling through
/// all eight profiles, each node interacting with its two successors.
fn population(graphs: usize, size: usize) -> PopulationDataset {
    let combos: Vec<BanProfile> = BanProfile::all_combinations().collect();
    let mut out = Vec::new();
    for g in 0..graphs {
        let ids: Vec<NodeId> = (0..size).map(|i| NodeId::from(format!("user{}", g * size + i).as_str())).collect();
        let mut eg = EgoGraph::singleton(ids[0].clone());
        eg.nodes[0].bans = combos[(g * size) % 8];
        for (i, id) in ids.iter().enumerate().skip(1) {
            eg.nodes.push(Node::new(id.clone(), combos[(g * size + i) % 8]));
        }
        for i in 0..size {
            for d in 1..=2 {
                if i + d < size {
                    eg.edges.push((ids[i].clone(), ids[i + d].clone()));
                }
            }
        }
        out.push(eg);
    }
    PopulationDataset::new("MOCK", out)
}

fn start(d: &PopulationDataset) -> (MockServer, Scenario) {
    let s = plant_scenario(d);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.jsonl");
    s.save(&path).unwrap();
    let loaded = Scenario::load(&path).unwrap();
    assert_eq!(loaded, s);
    (MockServer::start(loaded, "127.0.0.1:0").unwrap(), s)
}

#[test]
fn ten_thousand_users_recovered_exactly() {
    let d = population(100, 100);
    let (server, scenario) = start(&d);
    let detector = Detector::new(&server.url(), DetectorConfig::default());
    let names: Vec<String> = scenario.users.iter().map(|u| u.screen_name.clone()).collect();
    assert_eq!(names.len(), 10_000);
    assert_eq!(detector.list_users().unwrap(), names);
    let reports = detector.detect_all(&names);

    let mut per_combo: HashMap<BanProfile, usize> = HashMap::new();
    let (mut false_pos, mut false_neg) = (0, 0);
    for (u, r) in scenario.users.iter().zip(&reports) {
        assert!(r.complete, "{:?}", r.errors);
        assert_eq!(r.user, u.screen_name);
        let got = r.profile();
        for (planted, found) in [(u.bans.typeahead, got.typeahead), (u.bans.search, got.search), (u.bans.ghost, got.ghost)] {
            false_pos += usize::from(found && !planted);
            false_neg += usize::from(planted && !found);
        }
        for ev in &r.evidence {
            assert_eq!(ev.response_digest.len(), 64);
        }
        *per_combo.entry(u.bans).or_default() += 1;
    }
    assert_eq!((false_pos, false_neg), (0, 0));
    assert_eq!(per_combo.len(), 8);
    assert!(per_combo.values().all(|&c| c == 1250), "{per_combo:?}");
}

#[test]
fn detection_is_idempotent_with_reproducible_evidence() {
    let d = population(2, 40);
    let (server, scenario) = start(&d);
    let detector = Detector::new(&server.url(), DetectorConfig::default());
    for u in scenario.users.iter().take(16) {
        let a = detector.detect(&u.screen_name);
        let b = detector.detect(&u.screen_name);
        assert_eq!(a, b);
        assert_eq!(a.profile(), u.bans);
        assert_eq!(a.banned(), u.bans.banned());
        // The deciding evidence carries the verdict it supports.
        assert_eq!(a.evidence.iter().map(|e| e.verdict).collect::<Vec<_>>(), [u.bans.typeahead, u.bans.search, u.bans.ghost]);
    }
    let full = Detector::new(
        &server.url(),
        DetectorConfig {
            full_scan: true,
            ..DetectorConfig::default()
        },
    );
    for u in scenario.users.iter().take(16) {
        assert_eq!(full.detect(&u.screen_name).profile(), u.bans);
    }
}

#[test]
fn inactive_user_is_not_judged() {
    let mut g = EgoGraph::singleton("quiet");
    g.nodes[0].bans = BanProfile::new(false, true, true);
    let mut s = plant_scenario(&PopulationDataset::new("T", vec![g]));
    let old = Utc.with_ymd_and_hms(2018, 6, 1, 0, 0, 0).unwrap();
    s.users[0].tweets = vec![SimTweet {
        id: 1,
        kind: TweetKind::Thread,
        in_reply_to: None,
        posted: old,
    }];
    let server = MockServer::start(s, "127.0.0.1:0").unwrap();
    let r = Detector::new(&server.url(), DetectorConfig::default()).detect("quiet");
    assert!(r.complete);
    assert!(r.inactive());
    assert_eq!(r.ghost, Some(GhostStatus::Inactive));
    // Profile-level tests do not depend on the timeline.
    assert_eq!(r.search, Some(true));
    assert_eq!(r.typeahead, Some(false));

    let mut s2 = plant_scenario(&PopulationDataset::new("T", vec![EgoGraph::singleton("silent")]));
    s2.users[0].tweets.clear();
    let server2 = MockServer::start(s2, "127.0.0.1:0").unwrap();
    let r2 = Detector::new(&server2.url(), DetectorConfig::default()).detect("silent");
    assert_eq!((r2.typeahead, r2.search, r2.ghost), (Some(false), Some(false), Some(GhostStatus::Inactive)));
}

#[test]
fn unknown_user_has_no_ghost_verdict() {
    let (server, _) = start(&population(1, 5));
    let det = Detector::new(&server.url(), DetectorConfig::default());
    assert_eq!(det.test_ghost("nobody").unwrap_err(), DetectError::UnknownUser("nobody".into()));
    let r = det.detect("nobody");
    assert!(!r.complete);
    assert!(!r.transport_error);
    assert_eq!(r.ghost, None);
}

#[test]
fn unreachable_endpoint_gives_transport_errors() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let det = Detector::new(
        &format!("http://127.0.0.1:{port}"),
        DetectorConfig {
            timeout: Duration::from_secs(2),
            retries: 0,
            ..DetectorConfig::default()
        },
    );
    let err = det.test_typeahead("anyone").unwrap_err();
    assert!(err.is_retryable(), "{err}");
    assert!(det.test_search("anyone").unwrap_err().is_retryable());
    assert!(det.test_ghost("anyone").unwrap_err().is_retryable());
    let r = det.detect("anyone");
    assert!(!r.complete);
    assert_eq!((r.typeahead, r.search, r.ghost), (None, None, None));
    assert!(r.evidence.is_empty());
    assert!(r.transport_error);
    assert_eq!(r.errors.len(), 3);
    assert!(!r.banned());
}

#[test]
fn server_stops_cleanly() {
    let (server, _) = start(&population(1, 3));
    let url = server.url();
    server.stop().unwrap();
    let det = Detector::new(
        &url,
        DetectorConfig {
            timeout: Duration::from_secs(2),
            retries: 0,
            ..DetectorConfig::default()
        },
    );
    assert!(det.test_search("user0").unwrap_err().is_retryable());
}

#[test]
fn median_lookup_under_a_millisecond() {
    let (server, scenario) = start(&population(100, 100));
    let client = HttpClient::new(&server.url(), Duration::from_secs(5), 0);
    let mut samples = Vec::new();
    for (i, u) in scenario.users.iter().step_by(7).take(600).enumerate() {
        let req = match i % 4 {
            0 => format!("/typeahead?q={}", u.screen_name),
            1 => format!("/search?q={}", u.screen_name),
            2 => format!("/user/{}/timeline?n=33", u.screen_name),
            _ => format!("/tweet/{}", u.tweets[0].id),
        };
        let t = Instant::now();
        let resp = client.get(&req).unwrap();
        samples.push(t.elapsed());
        assert_eq!(resp.status, 200, "{req}");
    }
    samples.sort();
    let median = samples[samples.len() / 2];
    assert!(median < Duration::from_millis(1), "median {median:?}");
}

#[test]
fn timeline_source_reproduces_ego_graphs() {
    let d = population(3, 30);
    let (server, _) = start(&d);
    let mock = MockSource::new(&server.url());
    let oracle = GraphSource::from_edges(d.graphs.iter().flat_map(|g| g.edges.iter().cloned()));
    for g in &d.graphs {
        let landmark = &g.nodes[0].id;
        let via_http = sample_ego(&mock, landmark, 33, 2).unwrap();
        let direct = sample_ego(&oracle, landmark, 33, 2).unwrap();
        assert_eq!(via_http.edges, direct.edges);
        let ids = |e: &EgoGraph| e.nodes.iter().map(|n| n.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&via_http), ids(&direct));
    }
    assert!(sample_ego(&mock, &NodeId::from("ghost-town"), 33, 2).is_err());
}
