use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use wdcprod_core::domains::{
    fetch_ranks, load_offline_ranks, AbsentRank, HttpRequest, OpenPageRankClient, PublicSuffixList, RankCache,
    RankClientConfig, RankLookup, Transport, UreqTransport,
};
use wdcprod_core::language::LanguageIdentifier;
use wdcprod_core::locality::AssemblyConfig;
use wdcprod_core::nquads::{stream_chunk, StreamOptions};
use wdcprod_core::par::Execution;
use wdcprod_core::pipeline::{concat_parts, run_chunks, ChunkJob, CleanPlan, Context, PartKind, RunResult};
use wdcprod_core::stats::{ProfileStats, Report};
use wdcprod_core::synth::{generate, SyntheticSpec};
use wdcprod_core::validity::{ValidityConfig, Validator};
use wdcprod_core::vocab::{
    dbscan_string_clusters, split_host, write_canonical_map, CanonicalMapEntry, Cluster, Variation, VocabConfig,
    VocabNormalizer,
};

use crate::args::GenerateArgs;
use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::identifier;
use crate::inputs;
use crate::output::{read_maybe_gz, write_atomic, write_atomic_with};

pub const API_KEY_ENV: &str = "WDCPROD_OPR_API_KEY";

/// Everything a run needs, resolved from the config.
pub struct Session {
    pub config: PipelineConfig,
    pub files: Vec<PathBuf>,
    normalizer: VocabNormalizer,
    psl: Option<PublicSuffixList>,
    identifier: Option<Box<dyn LanguageIdentifier>>,
}

impl Session {
    pub fn open(config: PipelineConfig) -> Result<Session, CliError> {
        config.validate()?;
        let files = inputs::expand(&config.inputs)?;
        let normalizer = VocabNormalizer::new(VocabConfig {
            misspelling_threshold: config.analysis.misspelling_threshold,
            ..VocabConfig::default()
        });
        let psl = match &config.domains.psl {
            Some(path) => Some(PublicSuffixList::from_file(path).map_err(|e| CliError::Usage(e.to_string()))?),
            None => None,
        };
        let identifier = identifier::build(&config.identifier)?;
        Ok(Session { config, files, normalizer, psl, identifier })
    }

    fn context(&self) -> Context<'_> {
        let a = &self.config.analysis;
        let mut ctx = Context::new(&self.normalizer, self.psl.as_ref().unwrap_or_else(|| PublicSuffixList::bundled()));
        ctx.validator = Validator::new(ValidityConfig { null_match: a.null_match });
        ctx.assembly = AssemblyConfig { window: a.window, emit_incomplete: true, holdback: a.holdback };
        ctx.sample_rate = a.sample_rate;
        ctx.seed = a.seed;
        ctx.stream = StreamOptions::default();
        ctx.identifier = self.identifier.as_deref();
        ctx.window_horizon = a.horizon;
        ctx
    }

    fn run(&self, plan: Option<&CleanPlan>, kinds: &[PartKind], part_dir: Option<&Path>) -> RunResult {
        let jobs = ChunkJob::from_paths(self.files.clone());
        run_chunks(&jobs, &self.context(), plan, kinds, part_dir, Execution::from_workers(self.config.workers()))
    }

    fn report(&self, command: &str, run: &RunResult) -> Report {
        let inputs = self.files.iter().map(|p| p.display().to_string()).collect();
        let mut report = Report::new(command, run.stats.clone(), self.config.effective(), inputs);
        report.window = Some(self.config.analysis.window);
        report.window_offset = self.config.analysis.window_offset;
        report.percentiles = self.config.analysis.percentiles.clone();
        if self.config.output.stamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            report.provenance.generated_at = Some(format!("unix:{secs}"));
        }
        let failed: Vec<Value> = run
            .failed()
            .map(|c| json!({"index": c.index, "path": c.path.display().to_string(), "error": c.error}))
            .collect();
        if !failed.is_empty() {
            report.extras.insert("failed_chunks".into(), Value::Array(failed));
        }
        report
    }

    /// Writes the report and maps chunk failures to exit code 3.
    fn finish(&self, report: &Report, run: &RunResult) -> Result<ExitCode, CliError> {
        let bytes = report.render(self.config.format());
        match &self.config.output.report {
            Some(path) => write_atomic(path, &bytes)?,
            None => io::stdout().lock().write_all(&bytes)?,
        }
        let mut failed = 0;
        for c in run.failed() {
            eprintln!("chunk {} ({}) failed: {}", c.index, c.path.display(), c.error.as_deref().unwrap_or(""));
            failed += 1;
        }
        Ok(if failed > 0 { ExitCode::from(3) } else { ExitCode::SUCCESS })
    }
}

pub fn analyse(command: &str, config: PipelineConfig) -> Result<ExitCode, CliError> {
    let session = Session::open(config)?;
    let run = session.run(None, &[], None);
    let report = session.report(command, &run);
    session.finish(&report, &run)
}

pub fn validate(config: PipelineConfig, verdicts: Option<PathBuf>) -> Result<ExitCode, CliError> {
    let session = Session::open(config)?;
    let Some(target) = verdicts.or_else(|| session.config.output.verdicts.clone()) else {
        return analyse_session("validate", &session);
    };
    let parts = part_dir(&target)?;
    let run = session.run(None, &[PartKind::Verdicts], Some(parts.path()));
    write_atomic_with(&target, |w| concat_parts(parts.path(), PartKind::Verdicts, &run, w))?;
    let report = session.report("validate", &run);
    session.finish(&report, &run)
}

fn analyse_session(command: &str, session: &Session) -> Result<ExitCode, CliError> {
    let run = session.run(None, &[], None);
    let report = session.report(command, &run);
    session.finish(&report, &run)
}

fn part_dir(target: &Path) -> Result<tempfile::TempDir, CliError> {
    let dir = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    Ok(tempfile::tempdir_in(dir)?)
}

/// Resolves ranks from the offline snapshot, or else the cache and the API.
fn resolve_ranks(config: &PipelineConfig, plds: Vec<String>) -> Result<RankLookup, CliError> {
    let d = &config.domains;
    if let Some(path) = &d.offline {
        let snapshot = load_offline_ranks(path).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok(fetch_ranks::<UreqTransport>(plds, Some(&snapshot), None, None));
    }
    let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let ttl = d.cache_ttl_days.map(|days| Duration::from_secs(days * 86_400));
    let cache = match &d.cache {
        Some(path) => Some(Mutex::new(RankCache::open(path, ttl, now).map_err(|e| CliError::Usage(e.to_string()))?)),
        None => None,
    };
    if key.is_none() && cache.is_none() {
        return Err(CliError::Usage(format!("ranks need an offline snapshot (--offline), a cache, or {API_KEY_ENV}")));
    }
    let client = key.map(|k| {
        let config = RankClientConfig {
            endpoint: d.endpoint.clone(),
            batch_size: d.batch_size,
            max_in_flight: d.max_in_flight,
            ..RankClientConfig::new(k)
        };
        OpenPageRankClient::new(UreqTransport::default(), config)
    });
    Ok(fetch_ranks(plds, None, cache.as_ref(), client.as_ref()))
}

pub fn domains(config: PipelineConfig) -> Result<ExitCode, CliError> {
    let session = Session::open(config)?;
    let run = session.run(None, &[], None);
    let counts = &run.stats.pld_counts;
    let lookup = resolve_ranks(&session.config, counts.0.keys().cloned().collect())?;
    let values = lookup.values();
    let top: Vec<Value> = counts
        .top_k(session.config.domains.top)
        .into_iter()
        .map(|(pld, count)| json!({"pld": pld, "nodes": count, "rank": values.get(&pld)}))
        .collect();
    let mut section = json!({
        "ranked": values.len(),
        "absent": lookup.absent.len(),
        "network_requests": lookup.network_requests,
        "top": top,
    });
    if let Some(trust) = &session.config.trust {
        let policy = trust.policy();
        let (mut kept, mut dropped, mut quarantined) = (0u64, 0u64, 0u64);
        for (pld, n) in &counts.0 {
            match values.get(pld) {
                Some(&r) if policy.trusts(r) => kept += n,
                Some(_) => dropped += n,
                None => match policy.absent {
                    AbsentRank::Keep => kept += n,
                    AbsentRank::Drop => dropped += n,
                    AbsentRank::Quarantine => quarantined += n,
                },
            }
        }
        section["trust"] = json!({"kept": kept, "dropped": dropped, "quarantined": quarantined});
    }
    let mut report = session.report("domains", &run);
    report.extras.insert("domains".into(), section);
    session.finish(&report, &run)
}

pub struct CleanTargets {
    pub cleaned: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
}

/// Re-reads written N-Quads and fails on any malformed line.
fn self_check(path: &Path) -> Result<u64, CliError> {
    let reader = read_maybe_gz(path)?;
    let mut stream = stream_chunk(reader, false, StreamOptions::default());
    let mut quads = 0;
    for item in stream.by_ref() {
        item.map_err(|e| CliError::Failed(format!("self-check of {}: {e}", path.display())))?;
        quads += 1;
    }
    let report = stream.into_report();
    if report.malformed_lines > 0 {
        return Err(CliError::Failed(format!(
            "self-check of {}: {} malformed lines",
            path.display(),
            report.malformed_lines
        )));
    }
    Ok(quads)
}

pub fn clean(config: PipelineConfig, targets: CleanTargets) -> Result<ExitCode, CliError> {
    let session = Session::open(config)?;
    let c = &session.config;
    let cleaned = targets.cleaned.or_else(|| c.output.cleaned.clone());
    let exclusions = targets.exclusions.or_else(|| c.output.exclusions.clone());
    let Some(cleaned) = cleaned else {
        return Err(CliError::Usage("clean needs an output file (--cleaned)".into()));
    };
    if c.clean.language_filter && session.identifier.is_none() {
        return Err(CliError::Usage("the language filter needs an identifier".into()));
    }
    let trust = match &c.trust {
        Some(t) => {
            let ranks = if let Some(path) = &c.domains.offline {
                load_offline_ranks(path).map_err(|e| CliError::Usage(e.to_string()))?
            } else {
                let first = session.run(None, &[], None);
                resolve_ranks(c, first.stats.pld_counts.0.keys().cloned().collect())?.values()
            };
            Some((t.policy(), ranks))
        }
        None => None,
    };
    let plan = CleanPlan {
        language_filter: c.clean.language_filter,
        property_filter: c.clean.property_filter,
        node_filter: c.clean.node_filter,
        trust,
    };
    emit_cleaned("clean", &session, &plan, &cleaned, exclusions.as_deref(), |_, _| Ok(()))
}

fn emit_cleaned(
    command: &str,
    session: &Session,
    plan: &CleanPlan,
    cleaned: &Path,
    exclusions: Option<&Path>,
    extra: impl FnOnce(&RunResult, &mut Report) -> Result<(), CliError>,
) -> Result<ExitCode, CliError> {
    let parts = part_dir(cleaned)?;
    let mut kinds = vec![PartKind::Cleaned];
    if exclusions.is_some() {
        kinds.push(PartKind::Exclusions);
    }
    let run = session.run(Some(plan), &kinds, Some(parts.path()));
    // Checked before the rename so a bad file never replaces a good one.
    let staged = parts.path().join(match cleaned.extension() {
        Some(e) if e == "gz" => "staged.nq.gz",
        _ => "staged.nq",
    });
    write_atomic_with(&staged, |w| concat_parts(parts.path(), PartKind::Cleaned, &run, w))?;
    let written = self_check(&staged)?;
    std::fs::rename(&staged, cleaned).or_else(|_| std::fs::copy(&staged, cleaned).map(|_| ()))?;
    if let Some(path) = exclusions {
        write_atomic_with(path, |w| concat_parts(parts.path(), PartKind::Exclusions, &run, w))?;
    }
    let mut report = session.report(command, &run);
    if let Some(summary) = &run.clean {
        report.extras.insert("clean".into(), serde_json::to_value(summary).expect("summary serializes"));
        if summary.quads_out != written {
            return Err(CliError::Failed(format!("wrote {written} quads, expected {}", summary.quads_out)));
        }
    }
    extra(&run, &mut report)?;
    session.finish(&report, &run)
}

fn canonical_map(normalizer: &VocabNormalizer, stats: &ProfileStats) -> Vec<CanonicalMapEntry> {
    stats
        .variant_hosts
        .keys()
        .filter_map(|host| {
            let parts = split_host(&format!("http://{host}/")).ok()?;
            Some(CanonicalMapEntry::new(host.clone(), &normalizer.classify_host(&parts)))
        })
        .collect()
}

/// Compares threshold classification of misspelled hosts with DBSCAN
/// clusters over whole host names.
fn dbscan_agreement(normalizer: &VocabNormalizer, entries: &[CanonicalMapEntry]) -> Value {
    let eps = normalizer.config().misspelling_threshold;
    let rules = &normalizer.config().clusters;
    let bases: Vec<(String, Cluster)> = rules.iter().map(|r| (format!("{}.{}", r.second_level, r.top_level), r.cluster)).collect();
    let misspelled: Vec<&CanonicalMapEntry> = entries
        .iter()
        .filter(|e| matches!(e.variation, Variation::SldMisspelling | Variation::TldMisspelling))
        .collect();
    let hosts: BTreeSet<String> =
        bases.iter().map(|(h, _)| h.clone()).chain(misspelled.iter().map(|e| e.variant_host.clone())).collect();
    let Ok(clusters) = dbscan_string_clusters(&hosts, eps, 1) else {
        return Value::Null;
    };
    let mut agree = 0;
    let mut disagree = Vec::new();
    for e in &misspelled {
        let home = bases
            .iter()
            .find(|(h, _)| clusters.cluster_of(&e.variant_host).is_some_and(|m| m.contains(h)))
            .map_or(Cluster::Other, |(_, c)| *c);
        if home == e.cluster {
            agree += 1;
        } else {
            disagree.push(e.variant_host.clone());
        }
    }
    json!({"hosts": misspelled.len(), "agree": agree, "disagree": disagree})
}

pub fn normalize(config: PipelineConfig, map: Option<PathBuf>, cleaned: Option<PathBuf>) -> Result<ExitCode, CliError> {
    let session = Session::open(config)?;
    let map = map.or_else(|| session.config.output.canonical_map.clone());
    let attach = |run: &RunResult, report: &mut Report| -> Result<(), CliError> {
        let entries = canonical_map(&session.normalizer, &run.stats);
        if let Some(path) = &map {
            write_atomic_with(path, |w| write_canonical_map(entries.iter().cloned(), w).map_err(io::Error::other))?;
        }
        report.extras.insert("dbscan_agreement".into(), dbscan_agreement(&session.normalizer, &entries));
        report.extras.insert("canonical_map".into(), serde_json::to_value(&entries).expect("entries serialize"));
        Ok(())
    };
    match cleaned {
        Some(path) => {
            let plan = CleanPlan::default();
            emit_cleaned("normalize", &session, &plan, &path, None, attach)
        }
        None => {
            let run = session.run(None, &[], None);
            let mut report = session.report("normalize", &run);
            attach(&run, &mut report)?;
            session.finish(&report, &run)
        }
    }
}

pub fn print_config(config: PipelineConfig) -> Result<ExitCode, CliError> {
    config.validate()?;
    print!("{}", config.to_toml());
    Ok(ExitCode::SUCCESS)
}

fn load_spec(path: &Path) -> Result<SyntheticSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Usage(format!("invalid spec {}: {e}", path.display())))
}

pub fn generate_corpus(args: GenerateArgs) -> Result<ExitCode, CliError> {
    let mut spec = match &args.spec {
        Some(path) => load_spec(path)?,
        None => SyntheticSpec::default(),
    };
    if let Some(n) = args.nodes {
        spec.nodes = n;
    }
    if let Some(n) = args.chunks {
        spec.chunks = n;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(r) = args.valid_rate {
        spec.valid_node_rate = r;
    }
    if let Some(r) = args.tag_correctness {
        spec.tag_correctness = r;
    }
    if let Some(m) = args.max_spread {
        spec.spread.max_spread = m;
    }
    if let Some(r) = args.tail_rate {
        spec.spread.tail_rate = r;
    }
    let corpus = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::create_dir_all(&args.out)?;
    let ext = if args.gzip { "nq.gz" } else { "nq" };
    for c in 0..corpus.chunks.len() {
        let path = args.out.join(format!("chunk-{c:04}.{ext}"));
        write_atomic_with(&path, |mut w| corpus.write_chunk(c, &mut w))?;
    }
    let mut truth = serde_json::to_string_pretty(&corpus.truth).expect("truth serializes");
    truth.push('\n');
    write_atomic(&args.out.join("truth.json"), truth.as_bytes())?;
    eprintln!(
        "wrote {} chunks, {} quads, {} product nodes to {}",
        corpus.chunks.len(),
        corpus.truth.quads,
        corpus.truth.product_nodes,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn refresh_psl(url: &str, out: &Path, transport: &dyn Transport) -> Result<ExitCode, CliError> {
    let request = HttpRequest { url: url.to_string(), ..HttpRequest::default() };
    let response = transport.get(&request).map_err(|e| CliError::Failed(format!("download failed: {e}")))?;
    if response.status != 200 {
        return Err(CliError::Failed(format!("download failed: HTTP {}", response.status)));
    }
    PublicSuffixList::parse(&response.body).map_err(|e| CliError::Failed(format!("downloaded list is unusable: {e}")))?;
    let rules = response.body.lines().filter(|l| !l.trim().is_empty() && !l.starts_with("//")).count();
    write_atomic(out, response.body.as_bytes())?;
    eprintln!("wrote {rules} rules to {}", out.display());
    Ok(ExitCode::SUCCESS)
}
