use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::chunk::{open_chunk, process_chunk, ChunkSinks, Context};
use super::clean::{CleanPlan, CleanSummary};
use crate::nquads::ParseReport;
use crate::par::Execution;
use crate::stats::ProfileStats;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkJob {
    /// Position of the chunk in the sorted input list; selects the sampling
    /// stream and the order of merged outputs.
    pub index: u64,
    pub path: PathBuf,
}

impl ChunkJob {
    pub fn from_paths(paths: impl IntoIterator<Item = PathBuf>) -> Vec<ChunkJob> {
        paths
            .into_iter()
            .enumerate()
            .map(|(i, path)| ChunkJob { index: i as u64, path })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartKind {
    Verdicts,
    Cleaned,
    Exclusions,
}

impl PartKind {
    fn file_name(self, index: u64) -> String {
        let ext = match self {
            PartKind::Verdicts => "verdicts.jsonl",
            PartKind::Cleaned => "cleaned.nq",
            PartKind::Exclusions => "exclusions.jsonl",
        };
        format!("{index:06}.{ext}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChunkStatus {
    pub index: u64,
    pub path: PathBuf,
    pub parse: ParseReport,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunResult {
    /// Merged statistics of the chunks that completed.
    pub stats: ProfileStats,
    pub clean: Option<CleanSummary>,
    pub chunks: Vec<ChunkStatus>,
}

impl RunResult {
    pub fn failed(&self) -> impl Iterator<Item = &ChunkStatus> {
        self.chunks.iter().filter(|c| c.error.is_some())
    }
}

struct Parts {
    verdicts: Option<BufWriter<File>>,
    cleaned: Option<BufWriter<File>>,
    exclusions: Option<BufWriter<File>>,
}

impl Parts {
    fn create(dir: Option<&Path>, kinds: &[PartKind], index: u64) -> io::Result<Parts> {
        let open = |kind: PartKind| -> io::Result<Option<BufWriter<File>>> {
            match dir {
                Some(dir) if kinds.contains(&kind) => {
                    Ok(Some(BufWriter::new(File::create(dir.join(kind.file_name(index)))?)))
                }
                _ => Ok(None),
            }
        };
        Ok(Parts {
            verdicts: open(PartKind::Verdicts)?,
            cleaned: open(PartKind::Cleaned)?,
            exclusions: open(PartKind::Exclusions)?,
        })
    }

    fn flush(self) -> io::Result<()> {
        for w in [self.verdicts, self.cleaned, self.exclusions].into_iter().flatten() {
            w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        }
        Ok(())
    }
}

fn run_one(
    job: &ChunkJob,
    ctx: &Context<'_>,
    plan: Option<&CleanPlan>,
    kinds: &[PartKind],
    dir: Option<&Path>,
) -> (ChunkStatus, ProfileStats, Option<CleanSummary>) {
    let fail = |e: String| {
        (
            ChunkStatus {
                index: job.index,
                path: job.path.clone(),
                parse: ParseReport::default(),
                error: Some(e),
            },
            ProfileStats::default(),
            None,
        )
    };
    let (reader, compressed) = match open_chunk(&job.path) {
        Ok(x) => x,
        Err(e) => return fail(format!("cannot open: {e}")),
    };
    let mut parts = match Parts::create(dir, kinds, job.index) {
        Ok(p) => p,
        Err(e) => return fail(format!("cannot create output part: {e}")),
    };
    let outcome = {
        let mut sinks = ChunkSinks {
            verdicts: parts.verdicts.as_mut().map(|w| w as &mut dyn Write),
            cleaned: parts.cleaned.as_mut().map(|w| w as &mut dyn Write),
            exclusions: parts.exclusions.as_mut().map(|w| w as &mut dyn Write),
        };
        process_chunk(reader, compressed, job.index, ctx, plan, &mut sinks)
    };
    let mut error = outcome.error;
    if let Err(e) = parts.flush() {
        error.get_or_insert(format!("write failed: {e}"));
    }
    let status = ChunkStatus {
        index: job.index,
        path: job.path.clone(),
        parse: outcome.parse,
        error,
    };
    (status, outcome.stats, outcome.clean)
}

/// Processes every chunk and merges the results of those that completed.
/// Per-chunk outputs go to `part_dir` as `<index>.<kind>` files; join them
/// with [`concat_parts`].
pub fn run_chunks(
    jobs: &[ChunkJob],
    ctx: &Context<'_>,
    plan: Option<&CleanPlan>,
    kinds: &[PartKind],
    part_dir: Option<&Path>,
    execution: Execution,
) -> RunResult {
    let results = execution.map(jobs.iter().collect(), |job| run_one(job, ctx, plan, kinds, part_dir));
    let mut run = RunResult {
        clean: plan.map(|_| CleanSummary::default()),
        ..RunResult::default()
    };
    for (status, stats, clean) in results {
        if status.error.is_none() {
            run.stats.merge(&stats);
            if let (Some(total), Some(part)) = (run.clean.as_mut(), clean) {
                total.merge(&part);
            }
        }
        run.chunks.push(status);
    }
    run
}

/// Appends the parts of the completed chunks, in chunk order, to `out`.
pub fn concat_parts(dir: &Path, kind: PartKind, run: &RunResult, out: &mut dyn Write) -> io::Result<()> {
    for chunk in run.chunks.iter().filter(|c| c.error.is_none()) {
        let path = dir.join(kind.file_name(chunk.index));
        if path.exists() {
            io::copy(&mut File::open(path)?, out)?;
        }
    }
    Ok(())
}
