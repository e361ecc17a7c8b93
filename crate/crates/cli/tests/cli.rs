mod common;

use std::fs;
use std::path::Path;

use common::*;
use serde_json::Value;

fn truth(dir: &Path) -> Value {
    json(&fs::read(dir.join("truth.json")).unwrap())
}

fn generate(dir: &Path, extra: &[&str]) {
    let mut args = vec!["generate", "--out", "corpus"];
    args.extend_from_slice(extra);
    ok(dir, &args);
}

#[test]
fn profile_matches_the_golden_report() {
    let dir = fixtures();
    let report = ok(&dir, &["profile", "corpus"]);
    let golden = dir.join("golden/profile.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden.parent().unwrap()).unwrap();
        fs::write(&golden, &report).unwrap();
    }
    assert_eq!(String::from_utf8(report).unwrap(), fs::read_to_string(&golden).unwrap());

    let r = json(&fs::read(&golden).unwrap());
    let t = truth(&dir.join("corpus"));
    assert_eq!(r["stats"]["quad_count"], t["quads"]);
    assert_eq!(r["stats"]["product_nodes"], t["product_nodes"]);
    assert_eq!(r["stats"]["node_validity"], t["node_validity"]);
    assert_eq!(r["stats"]["property_validity"], t["property_validity"]);
    assert_eq!(r["stats"]["entity_classes"], t["entity_classes"]);
    assert_eq!(r["stats"]["variations"], t["variations"]);
    assert_eq!(r["stats"]["pld_counts"], t["pld_counts"]);
}

#[test]
fn missing_or_empty_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    for args in [
        vec!["profile", "empty"],
        vec!["profile", "nope.nq"],
        vec!["profile"],
        vec!["windows", "empty", "--sample-rate", "0"],
    ] {
        let out = run(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let out = run(dir.path(), &["profile", "--identifier", "magic", "x.nq"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_exits_2_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "20"]);
    fs::write(dir.path().join("c.toml"), "[analysis]\nwindw = 3\n").unwrap();
    let out = run(dir.path(), &["profile", "corpus", "-c", "c.toml", "-o", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn failed_chunk_exits_3_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "40", "--chunks", "2"]);
    let mut bad = vec![0x1f, 0x8b, 8, 0, 0, 0, 0, 0, 0, 3];
    bad.extend_from_slice(b"this is not deflate data at all");
    fs::write(dir.path().join("corpus/chunk-0002.nq.gz"), bad).unwrap();
    let out = run(dir.path(), &["profile", "corpus", "-o", "r.json"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&fs::read(dir.path().join("r.json")).unwrap());
    let failed = r["extras"]["failed_chunks"].as_array().unwrap();
    assert_eq!(failed.len(), 1);
    assert!(failed[0]["path"].as_str().unwrap().ends_with("chunk-0002.nq.gz"));
    let t = truth(&dir.path().join("corpus"));
    assert_eq!(r["stats"]["product_nodes"], t["product_nodes"]);
}

#[test]
fn reports_do_not_depend_on_workers_or_repeats() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "600", "--chunks", "6", "--gzip"]);
    for cmd in ["profile", "validate", "languages", "windows", "normalize"] {
        let a = ok(dir.path(), &[cmd, "corpus", "-j", "1", "--identifier", "trigram"]);
        let b = ok(dir.path(), &[cmd, "corpus", "-j", "8", "--identifier", "trigram"]);
        let c = ok(dir.path(), &[cmd, "corpus", "-j", "8", "--identifier", "trigram"]);
        assert_eq!(a, b, "{cmd}");
        assert_eq!(b, c, "{cmd}");
    }
    for j in ["1", "8"] {
        ok(dir.path(), &["validate", "corpus", "-j", j, "--verdicts", &format!("v{j}.jsonl")]);
        ok(dir.path(), &["clean", "corpus", "-j", j, "--cleaned", &format!("c{j}.nq"), "--exclusions", &format!("x{j}.jsonl")]);
    }
    for (a, b) in [("v1.jsonl", "v8.jsonl"), ("c1.nq", "c8.nq"), ("x1.jsonl", "x8.jsonl")] {
        assert_eq!(fs::read(dir.path().join(a)).unwrap(), fs::read(dir.path().join(b)).unwrap(), "{a}");
    }
}

#[test]
fn cleaning_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "400", "--chunks", "2"]);
    ok(dir.path(), &["clean", "corpus", "--cleaned", "once.nq", "-o", "r1.json"]);
    ok(dir.path(), &["clean", "once.nq", "--cleaned", "twice.nq", "-o", "r2.json"]);
    let once = fs::read_to_string(dir.path().join("once.nq")).unwrap();
    assert_eq!(once, fs::read_to_string(dir.path().join("twice.nq")).unwrap());
    let r2 = json(&fs::read(dir.path().join("r2.json")).unwrap());
    assert_eq!(r2["extras"]["clean"]["quads_in"], r2["extras"]["clean"]["quads_out"]);
    assert_eq!(r2["extras"]["clean"]["canonicalized"], 0);
}

#[test]
fn exclusions_match_the_planted_invalid_nodes() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "1000", "--chunks", "3", "--valid-rate", "0.9", "--gzip"]);
    ok(dir.path(), &["clean", "corpus", "--cleaned", "out.nq.gz", "--exclusions", "ex.jsonl", "-o", "r.json"]);
    let t = truth(&dir.path().join("corpus"));
    let invalid = t["node_validity"]["invalid"].as_u64().unwrap();
    assert_eq!(invalid, 100);
    let log = fs::read_to_string(dir.path().join("ex.jsonl")).unwrap();
    let entries: Vec<Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let node_drops = entries.iter().filter(|e| e["stage"] == "node" && e["reason"] == "invalid-node").count() as u64;
    assert_eq!(node_drops, invalid);
    let r = json(&fs::read(dir.path().join("r.json")).unwrap());
    assert_eq!(r["extras"]["clean"]["dropped_nodes"]["invalid-node"], invalid);
    let planted_invalid: u64 = t["property_validity"].as_object().unwrap().values().map(|c| c["invalid"].as_u64().unwrap()).sum();
    let property_drops = entries.iter().filter(|e| e["stage"] == "property").count() as u64;
    assert!(property_drops <= planted_invalid);
}

#[test]
fn valid_only_corpus_cleans_to_its_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let rates: serde_json::Map<String, Value> = ["name", "description", "image", "url", "offers", "brand", "sku", "productid", "aggregaterating"]
        .iter()
        .map(|k| (k.to_string(), Value::from(1.0)))
        .collect();
    let spec = serde_json::json!({"nodes": 300, "valid_node_rate": 1.0, "validity_rates": rates, "seed": 4});
    fs::write(dir.path().join("spec.json"), spec.to_string()).unwrap();
    generate(dir.path(), &["--spec", "spec.json"]);
    let raw = String::from_utf8(ok(dir.path(), &["validate", "corpus"])).unwrap();
    assert!(raw.contains("\"valid_share\": 1.0000"));
    assert_eq!(json(raw.as_bytes())["summary"]["node_validity"]["valid_share"], 1.0);
    ok(dir.path(), &["clean", "corpus", "--cleaned", "clean.nq"]);
    ok(dir.path(), &["normalize", "corpus", "--cleaned", "canonical.nq"]);
    let clean = fs::read_to_string(dir.path().join("clean.nq")).unwrap();
    assert!(clean.lines().count() > 1000);
    assert_eq!(clean, fs::read_to_string(dir.path().join("canonical.nq")).unwrap());
}

#[test]
fn singleton_subjects_have_zero_windows() {
    let raw = String::from_utf8(ok(&fixtures(), &["windows", "singletons"])).unwrap();
    assert!(raw.contains("\"mean\": 0.0000"));
    let r = json(raw.as_bytes());
    let w = &r["summary"]["windows"];
    assert_eq!(w["nodes"], 12);
    assert_eq!(w["mean"], 0.0);
    assert_eq!(w["max"], 0);
}

#[test]
fn bounded_spread_gives_max_window_ten() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "500", "--max-spread", "10"]);
    let r = json(&ok(dir.path(), &["windows", "corpus"]));
    assert_eq!(r["summary"]["product_windows"]["max"], 10);
    assert_eq!(r["summary"]["windows"]["max"], 10);
}

#[test]
fn perfect_oracle_agreement_equals_the_plant() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "800", "--tag-correctness", "0.7"]);
    let raw = String::from_utf8(ok(
        dir.path(),
        &["languages", "corpus", "--identifier", "table", "--model", "corpus/truth.json", "--sample-rate", "1"],
    ))
    .unwrap();
    let r = json(raw.as_bytes());
    let agreement = r["summary"]["agreement"].as_object().unwrap();
    assert!(agreement.len() >= 5);
    assert_eq!(raw.matches("\"agree_share\": 0.7000").count(), agreement.len());
    for (code, line) in agreement {
        assert_eq!(line["agree_share"], 0.7, "{code}");
        assert_eq!(line["undetermined"], 0, "{code}");
    }
}

#[test]
fn seeds_change_the_corpus_but_not_its_rates() {
    let dir = tempfile::tempdir().unwrap();
    let mut shares = Vec::new();
    let mut bodies = Vec::new();
    for seed in ["1", "2"] {
        let out = format!("c{seed}");
        ok(dir.path(), &["generate", "--out", &out, "--nodes", "3000", "--seed", seed]);
        bodies.push(fs::read(dir.path().join(&out).join("chunk-0000.nq")).unwrap());
        let t = json(&fs::read(dir.path().join(&out).join("truth.json")).unwrap());
        let freq = t["property_frequency"].clone();
        shares.push((freq, t["node_validity"].clone()));
    }
    assert_ne!(bodies[0], bodies[1]);
    assert_eq!(shares[0].1, shares[1].1);
    let n = 3000.0;
    for (key, a) in shares[0].0.as_object().unwrap() {
        let (a, b) = (a.as_f64().unwrap() / n, shares[1].0[key].as_f64().unwrap() / n);
        let p = (a + b) / 2.0;
        let sd = (2.0 * p * (1.0 - p) / n).sqrt();
        assert!((a - b).abs() <= 4.0 * sd + 1e-9, "{key}: {a} vs {b}");
    }
}

#[test]
fn domains_offline_never_touches_the_network() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "300"]);
    let t = truth(&dir.path().join("corpus"));
    let mut csv = String::from("pld,rank\n");
    for (i, pld) in t["pld_counts"].as_object().unwrap().keys().enumerate().filter(|(i, _)| i % 2 == 0) {
        csv.push_str(&format!("{pld},{}\n", i % 10));
    }
    fs::write(dir.path().join("ranks.csv"), csv).unwrap();
    let server = MockServer::start(Vec::new(), rank_body);
    let out = bin()
        .current_dir(dir.path())
        .args(["domains", "corpus", "--offline", "ranks.csv", "--endpoint", &server.url])
        .args(["--trust-comparator", "higher-is-trusted", "--trust-threshold", "5", "--absent", "drop"])
        .env("WDCPROD_OPR_API_KEY", "k")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(server.count(), 0);
    let r = json(&out.stdout);
    let d = &r["extras"]["domains"];
    assert_eq!(d["network_requests"], 0);
    assert!(d["ranked"].as_u64().unwrap() > 0);
    assert!(d["absent"].as_u64().unwrap() > 0);
    let trust = &d["trust"];
    let total = trust["kept"].as_u64().unwrap() + trust["dropped"].as_u64().unwrap();
    assert_eq!(total, 300);
    assert_eq!(trust["quarantined"], 0);
}

#[test]
fn domains_uses_the_api_through_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "200"]);
    let server = MockServer::start(Vec::new(), rank_body);
    let lookup = |key: Option<&str>| {
        let mut cmd = bin();
        cmd.current_dir(dir.path())
            .args(["domains", "corpus", "--cache", "ranks-cache.csv", "--endpoint", &format!("{}/api", server.url)])
            .env_remove("WDCPROD_OPR_API_KEY");
        if let Some(k) = key {
            cmd.env("WDCPROD_OPR_API_KEY", k);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        json(&out.stdout)
    };
    let first = lookup(Some("key"));
    let requests = server.count();
    assert!(requests >= 1);
    assert!(first["extras"]["domains"]["ranked"].as_u64().unwrap() > 0);
    let second = lookup(None);
    assert_eq!(server.count(), requests);
    assert_eq!(second["extras"]["domains"]["ranked"], first["extras"]["domains"]["ranked"]);
    assert_eq!(second["extras"]["domains"]["network_requests"], 0);
}

#[test]
fn domains_without_a_rank_source_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "20"]);
    let out = run(dir.path(), &["domains", "corpus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["clean", "corpus", "--cleaned", "x.nq", "--trust-threshold", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("x.nq").exists());
}

#[test]
fn trust_filter_in_clean_drops_low_ranked_domains() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "300"]);
    let t = truth(&dir.path().join("corpus"));
    let plds: Vec<String> = t["pld_counts"].as_object().unwrap().keys().cloned().collect();
    let mut csv = String::from("pld,rank\n");
    for pld in &plds {
        csv.push_str(&format!("{pld},{}\n", if pld.starts_with("shop") { 9 } else { 1 }));
    }
    fs::write(dir.path().join("ranks.csv"), csv).unwrap();
    ok(
        dir.path(),
        &[
            "clean", "corpus", "--offline", "ranks.csv", "--trust-comparator", "higher-is-trusted", "--trust-threshold", "5",
            "--no-node-filter", "--no-property-filter", "--cleaned", "out.nq", "-o", "r.json",
        ],
    );
    let trusted: Vec<&String> = plds.iter().filter(|p| p.starts_with("shop")).collect();
    let cleaned = fs::read_to_string(dir.path().join("out.nq")).unwrap();
    assert!(!cleaned.is_empty());
    for line in cleaned.lines() {
        let graph = line.rsplit(' ').nth(1).unwrap();
        let host = graph.trim_start_matches("<http://").split('/').next().unwrap();
        assert!(trusted.iter().any(|p| host == p.as_str() || host.ends_with(&format!(".{p}"))), "{line}");
    }
    let r = json(&fs::read(dir.path().join("r.json")).unwrap());
    assert!(r["extras"]["clean"]["trust"]["dropped"].as_u64().unwrap() > 0);
}

#[test]
fn normalize_writes_the_canonical_map() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--nodes", "3000", "--seed", "8"]);
    let r = json(&ok(dir.path(), &["normalize", "corpus", "--map", "map.csv"]));
    let map = fs::read_to_string(dir.path().join("map.csv")).unwrap();
    assert!(map.starts_with("variant-host,cluster,variation,canonical-host\n"));
    assert!(map.contains("scheme.org,schema-org,sld-misspelling,schema.org"));
    let agreement = &r["extras"]["dbscan_agreement"];
    assert_eq!(agreement["agree"], agreement["hosts"]);
}

#[test]
fn tsv_reports_and_config_round_trip() {
    let dir = fixtures();
    let tsv = String::from_utf8(ok(&dir, &["profile", "corpus", "--format", "tsv"])).unwrap();
    assert!(tsv.starts_with("section\tkey\tfield\tvalue\n"));
    assert!(tsv.lines().all(|l| l.split('\t').count() == 4));
    let toml = String::from_utf8(ok(&dir, &["config", "corpus", "--window", "30", "-j", "3"])).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), &toml).unwrap();
    let again = ok(&dir, &["config", "-c", tmp.path().join("c.toml").to_str().unwrap()]);
    assert_eq!(String::from_utf8(again).unwrap(), toml);
    assert!(toml.contains("window = 30"));
}

#[test]
fn stamp_is_opt_in() {
    let dir = fixtures();
    let plain = json(&ok(&dir, &["windows", "corpus"]));
    assert!(plain["provenance"].get("generated_at").is_none());
    let stamped = json(&ok(&dir, &["windows", "corpus", "--stamp"]));
    assert!(stamped["provenance"]["generated_at"].as_str().unwrap().starts_with("unix:"));
}

#[test]
fn refresh_psl_downloads_and_checks_the_list() {
    let dir = tempfile::tempdir().unwrap();
    let list = "// ===BEGIN ICANN DOMAINS===\ncom\nuk\nco.uk\nde\nfr\n// ===END ICANN DOMAINS===\n";
    let server = MockServer::start(vec![Reply::ok(list), Reply::status(404)], |_| String::new());
    let url = format!("{}/psl.dat", server.url);
    ok(dir.path(), &["refresh-psl", "--url", &url, "--out", "psl.dat"]);
    assert_eq!(fs::read_to_string(dir.path().join("psl.dat")).unwrap(), list);
    let out = run(dir.path(), &["refresh-psl", "--url", &url, "--out", "psl.dat"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read_to_string(dir.path().join("psl.dat")).unwrap(), list);

    generate(dir.path(), &["--nodes", "50"]);
    fs::write(dir.path().join("ranks.csv"), "pld,rank\n").unwrap();
    let r = json(&ok(dir.path(), &["domains", "corpus", "--psl", "psl.dat", "--offline", "ranks.csv"]));
    assert!(r["summary"]["pld_count"].as_u64().unwrap() > 0);
}
