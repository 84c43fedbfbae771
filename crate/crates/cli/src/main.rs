mod pipeline;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stopcur_core::annotation::{create_session, SessionHandle, SessionStore};
use stopcur_core::candidates::load_candidates;
use stopcur_core::eval::{self, synth, LabeledDataset, SplitRatios};
use stopcur_core::stopwords::{categorize, PosMap, Provenance, StopwordList};
use stopcur_core::tfidf::ScoringConfig;

use pipeline::{Layout, PipelineSummary};

/// Fixed default for every seeded step.
pub const DEFAULT_SEED: u64 = 20;

#[derive(Parser)]
#[command(
    name = "stopcur",
    version,
    about = "Curate stopword lists from raw corpora"
)]
struct Cli {
    /// Directory for pipeline artifacts.
    #[arg(
        long,
        global = true,
        env = "STOPCUR_OUT_DIR",
        default_value = "stopcur-out"
    )]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Clone)]
struct ScoreArgs {
    /// Bottom-k list size per chunk.
    #[arg(long, default_value_t = 5000)]
    k: usize,
    /// Terms with document frequency below this are not candidates.
    #[arg(long, default_value_t = 0.001)]
    min_df: f64,
    /// Worker threads (defaults to available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

impl ScoreArgs {
    fn config(&self) -> Result<ScoringConfig> {
        Ok(ScoringConfig::new(self.k, self.min_df)?)
    }

    fn jobs(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan a one-sentence-per-line corpus and record its summary.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Split the ingested corpus into contiguous chunks.
    Chunk {
        #[arg(long, default_value_t = 20)]
        chunks: u64,
    },
    /// Collect term statistics and write each chunk's bottom-k list.
    Score {
        /// Only this chunk (0-based); default is every chunk.
        #[arg(long)]
        chunk: Option<usize>,
        #[command(flatten)]
        score: ScoreArgs,
    },
    /// Keep the terms present in every chunk's list.
    Intersect {
        /// Relax to terms present in at least this many lists.
        #[arg(long)]
        min_chunks: Option<usize>,
    },
    /// ingest, chunk, score and intersect in one run.
    Pipeline {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 20)]
        chunks: u64,
        #[command(flatten)]
        score: ScoreArgs,
        #[arg(long)]
        min_chunks: Option<usize>,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Review sessions.
    Session {
        #[command(subcommand)]
        command: SessionCommand,
    },
    /// Serve the review HTTP API.
    Serve {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Allow cross-origin requests (for a separately hosted UI).
        #[arg(long)]
        cors: bool,
    },
    /// Summarize votes into verdicts.
    Aggregate {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long)]
        session: Option<String>,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Stopword list files.
    List {
        #[command(subcommand)]
        command: ListCommand,
    },
    /// Remove stopwords from a text file, line by line.
    Remove {
        #[arg(long)]
        list: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Compare classifier accuracy with and without stopword removal.
    Eval(EvalArgs),
}

#[derive(Args)]
struct StoreArg {
    /// Session store directory (default: <out-dir>/sessions).
    #[arg(long)]
    store: Option<PathBuf>,
}

impl StoreArg {
    fn dir(&self, layout: &Layout) -> PathBuf {
        self.store.clone().unwrap_or_else(|| layout.sessions())
    }
}

#[derive(Subcommand)]
enum SessionCommand {
    /// Create a review session over a candidate file.
    New {
        /// Candidate file (default: <out-dir>/intersection.txt).
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Comma-separated reviewer ids.
        #[arg(long, value_delimiter = ',', default_value = "r1,r2,r3")]
        reviewers: Vec<String>,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// RFC 3339 timestamp recorded in the session (default: now).
        #[arg(long)]
        created_at: Option<DateTime<Utc>>,
        #[command(flatten)]
        store: StoreArg,
    },
}

#[derive(Subcommand)]
enum ListCommand {
    /// Write the resolved stopwords of a session as a list file.
    Export {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long)]
        session: Option<String>,
        #[arg(long = "out")]
        output: PathBuf,
        /// Include a provenance header and POS tags.
        #[arg(long)]
        structured: bool,
        /// Tab-separated word/tag file for the structured format.
        #[arg(long)]
        pos_map: Option<PathBuf>,
        /// Export even if some terms are unresolved.
        #[arg(long)]
        allow_partial: bool,
        #[arg(long)]
        created_at: Option<DateTime<Utc>>,
    },
    /// Count list words per POS tag.
    Categorize {
        #[arg(long)]
        list: PathBuf,
        #[arg(long)]
        pos_map: PathBuf,
        #[command(flatten)]
        fmt: FormatArg,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Labeled CSV with a `text,label` header; omit to use a generated corpus.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Stopword list (required with --data).
    #[arg(long)]
    list: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 0.8)]
    train_ratio: f64,
    #[arg(long, default_value_t = 0.1)]
    test_ratio: f64,
    /// Generated corpus size.
    #[arg(long, default_value_t = 2000)]
    docs: usize,
    /// Generated corpus class count.
    #[arg(long, default_value_t = 3)]
    classes: usize,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    fmt: FormatArg,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let layout = Layout::new(&cli.out_dir);
    match cli.command {
        Command::Ingest { corpus, fmt } => {
            let h = pipeline::ingest_stage(&layout, &corpus).context("ingest")?;
            match fmt.format {
                Format::Json => print_json(&h)?,
                Format::Text => {
                    println!("sentences  {}", h.n_sentences);
                    println!("bytes      {}", h.byte_len);
                    println!("blank      {}", h.n_blank_lines);
                    println!("sha256     {}", h.checksum);
                    println!("wrote      {}", layout.corpus().display());
                }
            }
        }
        Command::Chunk { chunks } => {
            let plan = pipeline::chunk_stage(&layout, chunks).context("chunk")?;
            let sizes: Vec<u64> = plan.chunks.iter().map(|c| c.n_sentences).collect();
            let (lo, hi) = (sizes.iter().min(), sizes.iter().max());
            println!(
                "{} chunks of {}..={} sentences -> {}",
                plan.n_chunks,
                lo.copied().unwrap_or(0),
                hi.copied().unwrap_or(0),
                layout.chunks().display()
            );
        }
        Command::Score { chunk, score } => {
            let cfg = score.config()?;
            let out = pipeline::score_stage(&layout, chunk, &cfg, score.jobs()).context("score")?;
            for s in out {
                println!(
                    "chunk {:>3}: vocabulary {}, eligible {}, kept {} -> {}",
                    s.chunk,
                    s.vocabulary,
                    s.eligible,
                    s.kept,
                    layout.candidates(s.chunk).display()
                );
            }
        }
        Command::Intersect { min_chunks } => {
            let set = pipeline::intersect_stage(&layout, min_chunks).context("intersect")?;
            println!(
                "{} candidates -> {}",
                set.len(),
                layout.intersection().display()
            );
        }
        Command::Pipeline {
            corpus,
            chunks,
            score,
            min_chunks,
            fmt,
        } => {
            let cfg = score.config()?;
            let summary =
                pipeline::run_pipeline(&layout, &corpus, chunks, &cfg, min_chunks, score.jobs())?;
            match fmt.format {
                Format::Json => print_json(&summary)?,
                Format::Text => print_pipeline(&summary),
            }
        }
        Command::Session {
            command:
                SessionCommand::New {
                    candidates,
                    reviewers,
                    samples,
                    seed,
                    created_at,
                    store,
                },
        } => new_session(
            &layout,
            candidates,
            &reviewers,
            samples,
            seed,
            created_at,
            &store.dir(&layout),
        )?,
        Command::Serve { store, addr, cors } => serve(&store.dir(&layout), addr, cors)?,
        Command::Aggregate {
            store,
            session,
            fmt,
        } => {
            let store = SessionStore::open(store.dir(&layout))?;
            let h = pick_session(&store, session.as_deref())?;
            let agg = h.aggregate();
            let progress = h.progress();
            match fmt.format {
                Format::Json => print_json(&serde_json::json!({
                    "progress": progress,
                    "aggregate": agg,
                }))?,
                Format::Text => {
                    println!("session      {}", progress.session);
                    println!("terms        {}", progress.total_terms);
                    for r in &progress.reviewers {
                        println!(
                            "  {:<10} voted {} remaining {}",
                            r.reviewer, r.voted, r.remaining
                        );
                    }
                    println!("stopword     {}", agg.stopwords.len());
                    println!("non_trivial  {}", agg.non_trivial.len());
                    println!("unresolved   {}", agg.unresolved.len());
                }
            }
        }
        Command::List { command } => match command {
            ListCommand::Export {
                store,
                session,
                output,
                structured,
                pos_map,
                allow_partial,
                created_at,
            } => {
                let store = SessionStore::open(store.dir(&layout))?;
                let h = pick_session(&store, session.as_deref())?;
                export_list(
                    &h,
                    &output,
                    structured,
                    pos_map.as_deref(),
                    allow_partial,
                    created_at,
                )?;
            }
            ListCommand::Categorize { list, pos_map, fmt } => {
                let list = StopwordList::load(&list)
                    .with_context(|| format!("loading {}", list.display()))?;
                let pos = PosMap::load(&pos_map)
                    .with_context(|| format!("loading {}", pos_map.display()))?;
                let counts = categorize(&list, &pos);
                match fmt.format {
                    Format::Json => print_json(&counts)?,
                    Format::Text => {
                        for (tag, n) in &counts {
                            println!("{tag}\t{n}");
                        }
                    }
                }
            }
        },
        Command::Remove {
            list,
            input,
            output,
        } => {
            let list =
                StopwordList::load(&list).with_context(|| format!("loading {}", list.display()))?;
            let r = BufReader::new(
                File::open(&input).with_context(|| format!("opening {}", input.display()))?,
            );
            let lines = r
                .lines()
                .map(|l| l.map(|l| list.remove_stopwords(&l)))
                .collect::<std::io::Result<Vec<_>>>()
                .with_context(|| format!("reading {}", input.display()))?;
            let w = BufWriter::new(
                File::create(&output).with_context(|| format!("creating {}", output.display()))?,
            );
            pipeline::write_lines(w, lines)?;
        }
        Command::Eval(args) => run_eval(args)?,
    }
    Ok(())
}

fn print_pipeline(s: &PipelineSummary) {
    println!(
        "corpus      {} sentences, sha256 {}",
        s.n_sentences, s.corpus_sha256
    );
    for c in &s.chunks {
        println!(
            "chunk {:>3}  vocabulary {}, eligible {}, kept {}",
            c.chunk, c.vocabulary, c.eligible, c.kept
        );
    }
    println!(
        "candidates  {} -> {}",
        s.candidates,
        s.intersection.display()
    );
}

fn new_session(
    layout: &Layout,
    candidates: Option<PathBuf>,
    reviewers: &[String],
    samples: usize,
    seed: u64,
    created_at: Option<DateTime<Utc>>,
    store_dir: &Path,
) -> Result<()> {
    let cpath = candidates.unwrap_or_else(|| layout.intersection());
    let (set, meta) =
        load_candidates(&cpath).with_context(|| format!("loading {}", cpath.display()))?;
    let corpus = pipeline::load_corpus(layout)?;
    if let Some(sum) = meta.get("corpus_sha256").and_then(|v| v.as_str()) {
        ensure!(
            sum == corpus.checksum,
            "{} came from a different corpus than {}",
            cpath.display(),
            layout.corpus().display()
        );
    }
    let session = create_session(
        &set,
        &corpus,
        reviewers,
        samples,
        seed,
        created_at.unwrap_or_else(Utc::now),
    )?;
    let store = SessionStore::open(store_dir)?;
    if let Ok(existing) = store.get(&session.id) {
        let mut same = session.clone();
        same.created_at = existing.session().created_at;
        ensure!(
            &same == existing.session(),
            "session {} exists with different contents",
            session.id
        );
        println!("{}", session.id);
        eprintln!("session already exists in {}", store_dir.display());
        return Ok(());
    }
    let id = session.id.clone();
    let unsampled = session.unsampled.len();
    store.insert(session)?;
    println!("{id}");
    eprintln!(
        "{} terms, {} reviewers, store {}",
        set.len(),
        reviewers.len(),
        store_dir.display()
    );
    if unsampled > 0 {
        eprintln!("warning: {unsampled} terms have no sample sentence");
    }
    Ok(())
}

fn pick_session(store: &SessionStore, id: Option<&str>) -> Result<Arc<SessionHandle>> {
    match id {
        Some(id) => Ok(store.get(id)?),
        None => {
            let ids = store.ids();
            match ids.as_slice() {
                [only] => Ok(store.get(only)?),
                [] => bail!("no sessions in {}", store.root().display()),
                _ => bail!(
                    "several sessions in store; pass --session ({})",
                    ids.join(", ")
                ),
            }
        }
    }
}

fn export_list(
    h: &SessionHandle,
    output: &Path,
    structured: bool,
    pos_map: Option<&Path>,
    allow_partial: bool,
    created_at: Option<DateTime<Utc>>,
) -> Result<()> {
    let agg = h.aggregate();
    if !agg.unresolved.is_empty() {
        ensure!(
            allow_partial,
            "{} terms are still unresolved; pass --allow-partial to export the resolved ones",
            agg.unresolved.len()
        );
        eprintln!(
            "warning: skipping {} unresolved terms",
            agg.unresolved.len()
        );
    }
    let s = h.session();
    let mut list = StopwordList::from_words(&agg.stopwords)?;
    let config: BTreeMap<String, String> = [
        ("reviewers", s.reviewers.join(",")),
        ("samples_per_term", s.samples_per_term.to_string()),
        ("seed", s.seed.to_string()),
        ("candidates", s.candidates.len().to_string()),
        ("non_trivial", agg.non_trivial.len().to_string()),
        ("unresolved", agg.unresolved.len().to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v))
    .collect();
    list.provenance = Provenance {
        session_id: Some(s.id.clone()),
        corpus_checksum: Some(s.corpus_checksum.clone()),
        config,
        created_at: Some(created_at.unwrap_or_else(Utc::now)),
    };
    if let Some(p) = pos_map {
        let pos = PosMap::load(p).with_context(|| format!("loading {}", p.display()))?;
        list.set_pos_tags(&pos);
    }
    if structured {
        list.save_structured(output)?;
    } else {
        list.save_plain(output)?;
    }
    eprintln!("{} stopwords -> {}", list.len(), output.display());
    Ok(())
}

fn serve(store_dir: &Path, addr: SocketAddr, cors: bool) -> Result<()> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        // Scripts read this line to find the port when binding to :0.
        println!("listening on http://{}", listener.local_addr()?);
        stopcur_server::serve_on(listener, store_dir, cors)
            .await
            .context("serve")
    })
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let ratios = SplitRatios {
        train: args.train_ratio,
        test: args.test_ratio,
    };
    let (dataset, list, source) = match &args.data {
        Some(path) => {
            let Some(lpath) = &args.list else {
                bail!("--list is required with --data");
            };
            let docs =
                eval::load_csv(path).with_context(|| format!("loading {}", path.display()))?;
            let list = StopwordList::load(lpath)
                .with_context(|| format!("loading {}", lpath.display()))?;
            let ds = LabeledDataset::with_random_split(docs, ratios, args.seed)?;
            (ds, list, path.display().to_string())
        }
        None => {
            let corpus = synth::generate(synth::SynthConfig {
                n_docs: args.docs,
                n_classes: args.classes,
                seed: args.seed,
                ..synth::SynthConfig::default()
            })?;
            // Re-split so the ratio flags apply to generated data too.
            let ds = LabeledDataset::with_random_split(
                corpus.dataset.docs().to_vec(),
                ratios,
                args.seed,
            )?;
            let list = match &args.list {
                Some(l) => {
                    StopwordList::load(l).with_context(|| format!("loading {}", l.display()))?
                }
                None => corpus.stopwords,
            };
            (ds, list, "generated".to_owned())
        }
    };
    let report = eval::compare(&dataset, &list)?;
    let json = serde_json::json!({
        "dataset": source,
        "seed": args.seed,
        "train_ratio": args.train_ratio,
        "test_ratio": args.test_ratio,
        "report": report,
    });
    if let Some(p) = &args.report {
        fs::write(p, serde_json::to_string_pretty(&json)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    match args.fmt.format {
        Format::Json => print_json(&json)?,
        Format::Text => {
            println!("dataset               {source} (seed {})", args.seed);
            println!("{report}");
        }
    }
    Ok(())
}
