//! Curation stages over an output directory.
//!
//! ```text
//! <out>/corpus.json                    ingest
//! <out>/chunks.json                    chunk
//! <out>/stats/chunk_NN.tsv             score
//! <out>/candidates/chunk_NN.txt        score
//! <out>/candidates/chunk_NN.scores.tsv score
//! <out>/intersection.txt               intersect
//! <out>/intersection.txt.provenance.json
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use stopcur_core::candidates::{export_candidates_with, intersect_at_least, CandidateSet};
use stopcur_core::corpus::{chunk, chunk_stats, ingest, ChunkDescriptor, CorpusHandle};
use stopcur_core::tfidf::{bottom_k, score_terms, CandidateList, ScoringConfig};

pub const CANDIDATES_MAGIC: &str = "stopcur-candidates v1";

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn corpus(&self) -> PathBuf {
        self.root.join("corpus.json")
    }

    pub fn chunks(&self) -> PathBuf {
        self.root.join("chunks.json")
    }

    pub fn stats(&self, chunk: usize) -> PathBuf {
        self.root
            .join("stats")
            .join(format!("chunk_{chunk:02}.tsv"))
    }

    pub fn candidates(&self, chunk: usize) -> PathBuf {
        self.root
            .join("candidates")
            .join(format!("chunk_{chunk:02}.txt"))
    }

    pub fn scores(&self, chunk: usize) -> PathBuf {
        self.root
            .join("candidates")
            .join(format!("chunk_{chunk:02}.scores.tsv"))
    }

    pub fn intersection(&self) -> PathBuf {
        self.root.join("intersection.txt")
    }

    pub fn sessions(&self) -> PathBuf {
        self.root.join("sessions")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkPlan {
    pub corpus_sha256: String,
    pub n_sentences: u64,
    pub n_chunks: u64,
    pub chunks: Vec<ChunkDescriptor>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, hint: &str) -> Result<T> {
    let f = File::open(path)
        .with_context(|| format!("reading {} (run `{hint}` first)", path.display()))?;
    serde_json::from_reader(BufReader::new(f))
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn ingest_stage(layout: &Layout, corpus: &Path) -> Result<CorpusHandle> {
    let handle = ingest(corpus)?;
    write_json(&layout.corpus(), &handle)?;
    Ok(handle)
}

pub fn load_corpus(layout: &Layout) -> Result<CorpusHandle> {
    read_json(&layout.corpus(), "stopcur ingest")
}

pub fn chunk_stage(layout: &Layout, n_chunks: u64) -> Result<ChunkPlan> {
    let corpus = load_corpus(layout)?;
    let plan = ChunkPlan {
        corpus_sha256: corpus.checksum.clone(),
        n_sentences: corpus.n_sentences,
        n_chunks,
        chunks: chunk(&corpus, n_chunks)?,
    };
    write_json(&layout.chunks(), &plan)?;
    Ok(plan)
}

pub fn load_plan(layout: &Layout) -> Result<ChunkPlan> {
    read_json(&layout.chunks(), "stopcur chunk")
}

fn candidates_header(desc: &ChunkDescriptor, cfg: &ScoringConfig, checksum: &str) -> String {
    format!(
        "{CANDIDATES_MAGIC} chunk={} first_line={} last_line={} n_sentences={} k={} min_df={:?} corpus_sha256={checksum}",
        desc.index, desc.first_line, desc.last_line, desc.n_sentences, cfg.k, cfg.min_df
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreSummary {
    pub chunk: usize,
    pub vocabulary: usize,
    pub eligible: usize,
    pub kept: usize,
}

fn score_one(
    layout: &Layout,
    corpus: &CorpusHandle,
    desc: &ChunkDescriptor,
    cfg: &ScoringConfig,
) -> Result<ScoreSummary> {
    let stats = chunk_stats(corpus, desc)?;
    let stats_path = layout.stats(desc.index);
    fs::create_dir_all(stats_path.parent().expect("has parent"))?;
    stats
        .save(&stats_path, &corpus.checksum)
        .with_context(|| format!("writing {}", stats_path.display()))?;
    let ranked = score_terms(&stats, cfg)?;
    let kept = bottom_k(&ranked, cfg);
    let list = CandidateList::from_scores(desc.index, kept);

    let path = layout.candidates(desc.index);
    fs::create_dir_all(path.parent().expect("has parent"))?;
    let header = candidates_header(desc, cfg, &corpus.checksum);
    list.write_terms(BufWriter::new(File::create(&path)?), &header)
        .with_context(|| format!("writing {}", path.display()))?;
    let spath = layout.scores(desc.index);
    list.write_scores(BufWriter::new(File::create(&spath)?), kept)
        .with_context(|| format!("writing {}", spath.display()))?;
    Ok(ScoreSummary {
        chunk: desc.index,
        vocabulary: stats.vocabulary_size(),
        eligible: ranked.len(),
        kept: kept.len(),
    })
}

/// Scores `only` (or every chunk) with up to `jobs` worker threads.
pub fn score_stage(
    layout: &Layout,
    only: Option<usize>,
    cfg: &ScoringConfig,
    jobs: usize,
) -> Result<Vec<ScoreSummary>> {
    cfg.validate()?;
    let corpus = load_corpus(layout)?;
    let plan = load_plan(layout)?;
    ensure!(
        plan.corpus_sha256 == corpus.checksum,
        "{} was planned for a different corpus; rerun `stopcur chunk`",
        layout.chunks().display()
    );
    let todo: Vec<&ChunkDescriptor> = match only {
        Some(i) => vec![plan.chunks.get(i).ok_or_else(|| {
            anyhow!(
                "chunk {i} out of range (plan has {} chunks)",
                plan.chunks.len()
            )
        })?],
        None => plan.chunks.iter().collect(),
    };
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(todo.len()));
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, todo.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(desc) = todo.get(i) else { break };
                let r = score_one(layout, &corpus, desc, cfg)
                    .with_context(|| format!("chunk {}", desc.index));
                let failed = r.is_err();
                results.lock().expect("no poisoned workers").push(r);
                if failed {
                    // Let other workers drain quickly.
                    next.store(todo.len(), Ordering::Relaxed);
                }
            });
        }
    });
    let mut out = results
        .into_inner()
        .expect("no poisoned workers")
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|s| s.chunk);
    Ok(out)
}

fn parse_header(line: &str) -> Option<BTreeMap<&str, &str>> {
    let rest = line.strip_prefix("# ")?.strip_prefix(CANDIDATES_MAGIC)?;
    Some(
        rest.split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .collect(),
    )
}

fn read_candidate_list(layout: &Layout, chunk: usize) -> Result<(CandidateList, String)> {
    let path = layout.candidates(chunk);
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading {} (run `stopcur score` first)", path.display()))?;
    let header = text.lines().next().unwrap_or_default().to_owned();
    let mut list = CandidateList::read_terms(chunk, text.as_bytes())?;
    let spath = layout.scores(chunk);
    if spath.exists() {
        list.attach_scores(BufReader::new(File::open(&spath)?))
            .with_context(|| format!("reading {}", spath.display()))?;
    }
    Ok((list, header))
}

/// Intersects every planned chunk's list and writes the candidate file.
/// `min_chunks` defaults to all chunks.
pub fn intersect_stage(layout: &Layout, min_chunks: Option<usize>) -> Result<CandidateSet> {
    let plan = load_plan(layout)?;
    let mut lists = Vec::with_capacity(plan.chunks.len());
    let mut scoring: Option<(String, String)> = None;
    for desc in &plan.chunks {
        let (list, header) = read_candidate_list(layout, desc.index)?;
        let path = layout.candidates(desc.index);
        let fields = parse_header(&header)
            .ok_or_else(|| anyhow!("{}: missing candidates header", path.display()))?;
        let field = |k: &str| {
            fields
                .get(k)
                .map(|v| v.to_string())
                .ok_or_else(|| anyhow!("{}: header lacks {k}", path.display()))
        };
        ensure!(
            field("corpus_sha256")? == plan.corpus_sha256,
            "{} was scored on a different corpus",
            path.display()
        );
        let cfg = (field("k")?, field("min_df")?);
        match &scoring {
            None => scoring = Some(cfg),
            Some(prev) if *prev != cfg => bail!(
                "{} was scored with k={} min_df={}, other chunks with k={} min_df={}",
                path.display(),
                cfg.0,
                cfg.1,
                prev.0,
                prev.1
            ),
            Some(_) => {}
        }
        lists.push(list);
    }
    let min_chunks = min_chunks.unwrap_or(lists.len());
    let set = intersect_at_least(&lists, min_chunks)?;
    let (k, min_df) = scoring.unwrap_or_default();
    let meta: Map<String, Value> = json!({
        "corpus_sha256": plan.corpus_sha256,
        "n_sentences": plan.n_sentences,
        "n_chunks": plan.n_chunks,
        "k": k.parse::<u64>().ok(),
        "min_df": min_df.parse::<f64>().ok(),
        "min_chunks": min_chunks,
    })
    .as_object()
    .cloned()
    .expect("object literal");
    export_candidates_with(&set, &layout.intersection(), meta)?;
    Ok(set)
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineSummary {
    pub corpus_sha256: String,
    pub n_sentences: u64,
    pub chunks: Vec<ScoreSummary>,
    pub candidates: usize,
    pub intersection: PathBuf,
}

/// ingest, chunk, score, intersect in one pass; same files as running the
/// stages one by one.
pub fn run_pipeline(
    layout: &Layout,
    corpus: &Path,
    n_chunks: u64,
    cfg: &ScoringConfig,
    min_chunks: Option<usize>,
    jobs: usize,
) -> Result<PipelineSummary> {
    cfg.validate()?;
    let handle = ingest_stage(layout, corpus).context("ingest")?;
    chunk_stage(layout, n_chunks).context("chunk")?;
    let chunks = score_stage(layout, None, cfg, jobs).context("score")?;
    let set = intersect_stage(layout, min_chunks).context("intersect")?;
    Ok(PipelineSummary {
        corpus_sha256: handle.checksum,
        n_sentences: handle.n_sentences,
        chunks,
        candidates: set.len(),
        intersection: layout.intersection(),
    })
}

pub fn write_lines<W: Write>(mut w: W, lines: impl IntoIterator<Item = String>) -> Result<()> {
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}
