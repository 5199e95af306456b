//! `lexplain`: command-line driver for the explanation pipeline.
//!
//! Subcommands mirror the pipeline stages: `ingest` turns a vertical file
//! into a binary token index, `grammar-check` vets a sketch grammar,
//! `cql`/`sketch`/`thesaurus` query an ingested corpus, `explain` composes
//! drafts for one headword or a whole list, and `evaluate` reports
//! indicator, quality and coverage tables over a batch.
//!
//! Contract shared by every subcommand:
//! * exit 0 on success, 1 on a usage error, 2 on a data-format error
//!   (malformed vertical file, index, grammar, config, annotations, …);
//! * diagnostics go to standard error, data to standard output or the
//!   `--output` file;
//! * output is deterministic — the same inputs and options produce the
//!   same bytes, regardless of `--jobs`.

use std::collections::HashMap;
use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::builder::ArgGroup;
use clap::{Args, Parser, Subcommand, ValueEnum};

use lexplain_core::config::{parse_config, Config};
use lexplain_core::corpus::{ingest_vertical, Attr, Corpus};
use lexplain_core::cql::{find_matches, parse_query};
use lexplain_core::evaluate::{
    aggregate_indicators, aggregate_quality, coverage_rate, detect_indicators, parse_annotations,
    IndicatorSet,
};
use lexplain_core::explain::{
    compose, parse_schema, render_structured, render_text, ComposeOptions, Explanation, Schema,
};
use lexplain_core::grammar::{parse_grammar, validate_against, Grammar};
use lexplain_core::pos::CoarsePos;
use lexplain_core::sketch::{build_sketches_with_mode, LemmaPos, SketchIndex};
use lexplain_core::thesaurus::similar;

fn main() {
    std::process::exit(run());
}

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_DATA: i32 = 2;

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            // Help and version requests arrive as "errors" but are
            // successful, deliberate invocations.
            let ok = matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if ok { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Data(message)) => {
            eprintln!("error: {message}");
            EXIT_DATA
        }
    }
}

/// A failed subcommand, split by exit code: `Usage` covers bad invocations
/// (unparseable query text, impossible option values), `Data` covers
/// malformed or mismatched input files.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Failure {
        Failure::Data(err.to_string())
    }
}

/// Attach the file name to an error that only knows its line number.
fn in_file(path: &Path, err: impl Display) -> Failure {
    Failure::Data(format!("{}: {err}", path.display()))
}

fn open_for_read(path: &Path) -> Result<BufReader<File>, Failure> {
    let file = File::open(path).map_err(|err| in_file(path, err))?;
    Ok(BufReader::new(file))
}

#[derive(Parser)]
#[command(
    name = "lexplain",
    version,
    about = "Draft word-meaning explanations from an annotated corpus",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Configuration file (flat `key = value`); defaults apply when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Cap on worker threads for sketch building and batch composition.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a vertical corpus file and write a binary token index.
    Ingest {
        /// Vertical input: `word<TAB>lemma<TAB>tag` lines and structure tags.
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Index destination; standard output when omitted.
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },

    /// Parse a sketch grammar and report problems.
    GrammarCheck {
        #[arg(long, value_name = "FILE")]
        grammar: PathBuf,
        /// Optional ingested index; when given, every tag pattern is
        /// checked for at least one match in the corpus.
        #[arg(long, value_name = "INDEX")]
        corpus: Option<PathBuf>,
    },

    /// Run one corpus query and list its matches.
    Cql {
        #[arg(long, value_name = "INDEX")]
        corpus: PathBuf,
        /// Query text, e.g. `1:[tag="N.*"] [word="of"] 2:[tag="N.*"]`.
        #[arg(long, value_name = "QUERY")]
        query: String,
        /// Print at most this many matches.
        #[arg(long, value_name = "N")]
        limit: Option<usize>,
        #[command(flatten)]
        render: RenderArgs,
    },

    /// Print the scored collocate groups of one headword.
    Sketch {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        head: HeadArgs,
        /// Restrict the listing to one relation.
        #[arg(long, value_name = "NAME")]
        relation: Option<String>,
        /// Print at most this many collocates per relation.
        #[arg(long, value_name = "N")]
        limit: Option<usize>,
        #[command(flatten)]
        render: RenderArgs,
    },

    /// Print the distributional neighbors of one headword.
    Thesaurus {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        head: HeadArgs,
        /// Print at most this many neighbors.
        #[arg(long, value_name = "N", default_value_t = 10)]
        limit: usize,
        #[command(flatten)]
        render: RenderArgs,
    },

    /// Compose explanation drafts for one headword or a headword list.
    #[command(group(ArgGroup::new("target").required(true).args(["head", "headlist"])))]
    Explain {
        #[command(flatten)]
        source: SourceArgs,
        /// Single headword lemma; requires --pos.
        #[arg(long, value_name = "LEMMA", requires = "pos", conflicts_with_all = ["outdir"])]
        head: Option<String>,
        /// Part of speech of --head (N, J or V).
        #[arg(long, value_name = "POS", requires = "head", value_parser = parse_pos)]
        pos: Option<CoarsePos>,
        /// Batch input: one `lemma POS` pair per line; requires --outdir.
        #[arg(long, value_name = "FILE", requires = "outdir", conflicts_with_all = ["output"])]
        headlist: Option<PathBuf>,
        /// Directory receiving one `<lemma>.<pos>.txt|json` file per headword.
        #[arg(long, value_name = "DIR", requires = "headlist")]
        outdir: Option<PathBuf>,
        #[command(flatten)]
        render: RenderArgs,
    },

    /// Compose a batch and report indicator, quality and coverage tables.
    Evaluate {
        #[command(flatten)]
        source: SourceArgs,
        /// Batch input: one `lemma POS` pair per line.
        #[arg(long, value_name = "FILE")]
        headlist: PathBuf,
        /// Tab-separated human judgments (headword, pos, quality, …).
        #[arg(long, value_name = "FILE")]
        annotations: Option<PathBuf>,
        #[command(flatten)]
        render: RenderArgs,
    },

    /// Print the effective configuration as a reloadable file.
    Config {
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },

    /// Print the version string.
    Version,
}

/// The two inputs every sketch-derived subcommand needs.
#[derive(Args)]
struct SourceArgs {
    /// Ingested corpus index (from `lexplain ingest`).
    #[arg(long, value_name = "INDEX")]
    corpus: PathBuf,
    /// Sketch grammar file.
    #[arg(long, value_name = "FILE")]
    grammar: PathBuf,
}

#[derive(Args)]
struct HeadArgs {
    /// Headword lemma.
    #[arg(long, value_name = "LEMMA")]
    head: String,
    /// Coarse part of speech: N, J, V, A or other.
    #[arg(long, value_name = "POS", value_parser = parse_pos)]
    pos: CoarsePos,
}

#[derive(Args)]
struct RenderArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write data here instead of standard output.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
        }
    }
}

fn parse_pos(text: &str) -> Result<CoarsePos, String> {
    text.parse().map_err(|err| format!("{err}"))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .map_err(|err| Failure::Usage(format!("--jobs: {err}")))?;
    }
    let config_path = cli.config.as_deref();
    match cli.command {
        Command::Ingest { input, output } => {
            let config = load_config(config_path)?;
            cmd_ingest(&config, &input, output.as_deref())
        }
        Command::GrammarCheck { grammar, corpus } => cmd_grammar_check(&grammar, corpus.as_deref()),
        Command::Cql {
            corpus,
            query,
            limit,
            render,
        } => cmd_cql(&corpus, &query, limit, &render),
        Command::Sketch {
            source,
            head,
            relation,
            limit,
            render,
        } => {
            let config = load_config(config_path)?;
            cmd_sketch(&config, &source, &head, relation.as_deref(), limit, &render)
        }
        Command::Thesaurus {
            source,
            head,
            limit,
            render,
        } => {
            let config = load_config(config_path)?;
            cmd_thesaurus(&config, &source, &head, limit, &render)
        }
        Command::Explain {
            source,
            head,
            pos,
            headlist,
            outdir,
            render,
        } => {
            let config = load_config(config_path)?;
            match (head, headlist) {
                (Some(lemma), None) => {
                    let pos = pos.expect("clap enforces --pos with --head");
                    cmd_explain_single(&config, &source, LemmaPos::new(lemma, pos), &render)
                }
                (None, Some(list)) => {
                    let outdir = outdir.expect("clap enforces --outdir with --headlist");
                    cmd_explain_batch(&config, &source, &list, &outdir, &render)
                }
                _ => unreachable!("clap enforces exactly one of --head/--headlist"),
            }
        }
        Command::Evaluate {
            source,
            headlist,
            annotations,
            render,
        } => {
            let config = load_config(config_path)?;
            cmd_evaluate(&config, &source, &headlist, annotations.as_deref(), &render)
        }
        Command::Config { output } => {
            let config = load_config(config_path)?;
            let mut out = open_output(output.as_deref())?;
            out.write_all(config.dump().as_bytes())?;
            out.flush()?;
            Ok(())
        }
        Command::Version => {
            println!("lexplain {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    match path {
        None => Ok(Config::default()),
        Some(path) => {
            let reader = open_for_read(path)?;
            parse_config(reader).map_err(|err| in_file(path, err))
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|err| in_file(path, err))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn read_corpus(path: &Path) -> Result<Corpus, Failure> {
    let mut reader = open_for_read(path)?;
    Corpus::read_index(&mut reader).map_err(|err| in_file(path, err))
}

fn read_grammar(path: &Path) -> Result<Grammar, Failure> {
    let text = fs::read_to_string(path).map_err(|err| in_file(path, err))?;
    parse_grammar(&text).map_err(|err| in_file(path, err))
}

fn build_index(config: &Config, source: &SourceArgs) -> Result<(Corpus, SketchIndex), Failure> {
    let corpus = read_corpus(&source.corpus)?;
    let grammar = read_grammar(&source.grammar)?;
    let index =
        build_sketches_with_mode(&corpus, &grammar, config.min_pair_freq, config.score_mode)
            .map_err(|err| Failure::Data(err.to_string()))?;
    Ok((corpus, index))
}

/// One `lemma POS` pair per line; `#` comments and blank lines are skipped.
fn read_headlist(path: &Path) -> Result<Vec<LemmaPos>, Failure> {
    let text = fs::read_to_string(path).map_err(|err| in_file(path, err))?;
    let mut heads = Vec::new();
    for (offset, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(lemma), Some(pos), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(in_file(
                path,
                format_args!("line {}: expected `lemma POS`", offset + 1),
            ));
        };
        let pos: CoarsePos = pos
            .parse()
            .map_err(|err| in_file(path, format_args!("line {}: {err}", offset + 1)))?;
        heads.push(LemmaPos::new(lemma, pos));
    }
    Ok(heads)
}

/// The composition schema for `pos`: the configured override file when one
/// is set, the embedded template otherwise.
fn schema_for(config: &Config, pos: CoarsePos) -> Result<Schema, Failure> {
    let override_path = match pos {
        CoarsePos::N => &config.template_noun,
        CoarsePos::J => &config.template_adjective,
        CoarsePos::V => &config.template_verb,
        _ => &None,
    };
    if let Some(path) = override_path {
        let text = fs::read_to_string(path).map_err(|err| in_file(path, err))?;
        return parse_schema(&text).map_err(|err| in_file(path, err));
    }
    Schema::for_pos(pos).cloned().ok_or_else(|| {
        Failure::Data(format!(
            "no explanation schema for part of speech {pos} (have N, J, V)"
        ))
    })
}

fn compose_options(config: &Config) -> ComposeOptions {
    ComposeOptions {
        relation_top_k: config.relation_top_k,
        thesaurus_top_k: config.thesaurus_top_k,
    }
}

fn compose_head(
    config: &Config,
    index: &SketchIndex,
    head: &LemmaPos,
) -> Result<Explanation, Failure> {
    let schema = schema_for(config, head.pos).map_err(|err| match err {
        Failure::Data(message) => {
            Failure::Data(format!("{} ({}): {message}", head.lemma, head.pos))
        }
        usage => usage,
    })?;
    compose(head, index, index, &schema, &compose_options(config))
        .map_err(|err| Failure::Data(err.to_string()))
}

fn cmd_ingest(config: &Config, input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let reader = open_for_read(input)?;
    let corpus =
        ingest_vertical(reader, config.pos_map.clone()).map_err(|err| in_file(input, err))?;
    let mut out = open_output(output)?;
    corpus
        .write_index(&mut out)
        .map_err(|err| Failure::Data(err.to_string()))?;
    out.flush()?;
    eprintln!(
        "{}: {} tokens, {} sentences, {} distinct lemmas",
        input.display(),
        corpus.token_count(),
        corpus.sentences().len(),
        corpus.values(Attr::Lemma).count()
    );
    Ok(())
}

fn cmd_grammar_check(grammar_path: &Path, corpus_path: Option<&Path>) -> Result<(), Failure> {
    let grammar = read_grammar(grammar_path)?;
    if let Some(path) = corpus_path {
        let corpus = read_corpus(path)?;
        for warning in validate_against(&grammar, &corpus) {
            eprintln!("warning: {warning}");
        }
    }
    let queries: usize = grammar.relations.iter().map(|r| r.queries.len()).sum();
    println!(
        "{}: {} relations, {} queries",
        grammar_path.display(),
        grammar.relations.len(),
        queries
    );
    Ok(())
}

fn cmd_cql(
    corpus_path: &Path,
    query_text: &str,
    limit: Option<usize>,
    render: &RenderArgs,
) -> Result<(), Failure> {
    let corpus = read_corpus(corpus_path)?;
    // The query arrived on the command line, so rejecting it is a usage
    // error, not a data error.
    let query = parse_query(query_text).map_err(|err| Failure::Usage(format!("--query: {err}")))?;
    let matches = find_matches(&query, &corpus);
    let total = matches.len();
    let shown = limit.unwrap_or(total).min(total);
    let mut out = open_output(render.output.as_deref())?;
    match render.format {
        Format::Text => {
            for m in matches.iter().take(shown) {
                let words: Vec<&str> = (m.start..m.end)
                    .map(|pos| corpus.token_value(Attr::Word, pos))
                    .collect();
                let bindings = if m.bindings.is_empty() {
                    "-".to_string()
                } else {
                    m.bindings
                        .iter()
                        .map(|(label, pos)| format!("{label}={pos}"))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    m.start,
                    m.end,
                    bindings,
                    words.join(" ")
                )?;
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = matches
                .iter()
                .take(shown)
                .map(|m| {
                    let words: Vec<&str> = (m.start..m.end)
                        .map(|pos| corpus.token_value(Attr::Word, pos))
                        .collect();
                    let bindings: serde_json::Map<String, serde_json::Value> = m
                        .bindings
                        .iter()
                        .map(|(label, pos)| (label.to_string(), serde_json::json!(pos)))
                        .collect();
                    serde_json::json!({
                        "start": m.start,
                        "end": m.end,
                        "bindings": bindings,
                        "words": words,
                    })
                })
                .collect();
            write_json(
                &mut out,
                &serde_json::json!({ "total": total, "matches": items }),
            )?;
        }
    }
    out.flush()?;
    eprintln!("{total} matches");
    Ok(())
}

fn cmd_sketch(
    config: &Config,
    source: &SourceArgs,
    head_args: &HeadArgs,
    relation: Option<&str>,
    limit: Option<usize>,
    render: &RenderArgs,
) -> Result<(), Failure> {
    let (_, index) = build_index(config, source)?;
    let head = LemmaPos::new(head_args.head.clone(), head_args.pos);
    let mut out = open_output(render.output.as_deref())?;
    let groups = index.sketch_of(&head);
    if groups.is_none() {
        eprintln!("no sketch data for {} ({})", head.lemma, head.pos);
    }
    let take = |entries: &[lexplain_core::sketch::CollocateEntry]| -> usize {
        limit.unwrap_or(entries.len()).min(entries.len())
    };
    match render.format {
        Format::Text => {
            writeln!(
                out,
                "{}\t{}\t{}",
                head.lemma,
                head.pos,
                index.marginal(&head)
            )?;
            if let Some(groups) = groups {
                for (name, entries) in groups {
                    if relation.is_some_and(|want| want != name.as_str()) {
                        continue;
                    }
                    for entry in &entries[..take(entries)] {
                        writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{:.4}",
                            name, entry.item.lemma, entry.item.pos, entry.pair_freq, entry.score
                        )?;
                    }
                }
            }
        }
        Format::Json => {
            let mut relations = serde_json::Map::new();
            if let Some(groups) = groups {
                for (name, entries) in groups {
                    if relation.is_some_and(|want| want != name.as_str()) {
                        continue;
                    }
                    let items: Vec<serde_json::Value> = entries[..take(entries)]
                        .iter()
                        .map(|entry| {
                            serde_json::json!({
                                "lemma": entry.item.lemma,
                                "pos": entry.item.pos,
                                "freq": entry.pair_freq,
                                "score": entry.score,
                            })
                        })
                        .collect();
                    relations.insert(name.clone(), serde_json::Value::Array(items));
                }
            }
            write_json(
                &mut out,
                &serde_json::json!({
                    "head": head.lemma,
                    "pos": head.pos,
                    "freq": index.marginal(&head),
                    "relations": relations,
                }),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_thesaurus(
    config: &Config,
    source: &SourceArgs,
    head_args: &HeadArgs,
    limit: usize,
    render: &RenderArgs,
) -> Result<(), Failure> {
    let (_, index) = build_index(config, source)?;
    let head = LemmaPos::new(head_args.head.clone(), head_args.pos);
    let neighbors = similar(&index, &head, limit);
    let mut out = open_output(render.output.as_deref())?;
    match render.format {
        Format::Text => {
            for result in &neighbors {
                writeln!(
                    out,
                    "{}\t{}\t{:.6}",
                    result.neighbor.lemma, result.neighbor.pos, result.similarity
                )?;
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = neighbors
                .iter()
                .map(|result| {
                    serde_json::json!({
                        "lemma": result.neighbor.lemma,
                        "pos": result.neighbor.pos,
                        "similarity": result.similarity,
                    })
                })
                .collect();
            write_json(
                &mut out,
                &serde_json::json!({
                    "head": head.lemma,
                    "pos": head.pos,
                    "neighbors": items,
                }),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_explain_single(
    config: &Config,
    source: &SourceArgs,
    head: LemmaPos,
    render: &RenderArgs,
) -> Result<(), Failure> {
    let (_, index) = build_index(config, source)?;
    let explanation = compose_head(config, &index, &head)?;
    let mut out = open_output(render.output.as_deref())?;
    out.write_all(render_explanation(&explanation, render.format).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn render_explanation(explanation: &Explanation, format: Format) -> String {
    match format {
        Format::Text => render_text(explanation),
        Format::Json => render_structured(explanation),
    }
}

fn cmd_explain_batch(
    config: &Config,
    source: &SourceArgs,
    headlist: &Path,
    outdir: &Path,
    render: &RenderArgs,
) -> Result<(), Failure> {
    let heads = read_headlist(headlist)?;
    let (_, index) = build_index(config, source)?;
    let explanations = compose_batch(config, &index, &heads)?;
    fs::create_dir_all(outdir).map_err(|err| in_file(outdir, err))?;
    for explanation in &explanations {
        let name = format!(
            "{}.{}.{}",
            explanation.headword,
            explanation.pos,
            render.format.extension()
        );
        let path = outdir.join(name);
        fs::write(&path, render_explanation(explanation, render.format))
            .map_err(|err| in_file(&path, err))?;
    }
    eprintln!(
        "wrote {} explanations to {}",
        explanations.len(),
        outdir.display()
    );
    Ok(())
}

/// Compose every headword of a batch, in input order. Composition runs in
/// parallel; results are collected back into order, so output is
/// independent of thread count.
fn compose_batch(
    config: &Config,
    index: &SketchIndex,
    heads: &[LemmaPos],
) -> Result<Vec<Explanation>, Failure> {
    use rayon::prelude::*;
    let results: Vec<Result<Explanation, Failure>> = heads
        .par_iter()
        .map(|head| compose_head(config, index, head))
        .collect();
    results.into_iter().collect()
}

fn cmd_evaluate(
    config: &Config,
    source: &SourceArgs,
    headlist: &Path,
    annotations: Option<&Path>,
    render: &RenderArgs,
) -> Result<(), Failure> {
    let heads = read_headlist(headlist)?;
    if heads.is_empty() {
        return Err(in_file(headlist, "no headwords listed"));
    }
    let (corpus, index) = build_index(config, source)?;
    let explanations = compose_batch(config, &index, &heads)?;

    let mut sets: Vec<IndicatorSet> = Vec::with_capacity(explanations.len());
    for explanation in &explanations {
        let set = detect_indicators(explanation, &corpus, config.infrequency_per_million)
            .map_err(|err| Failure::Data(err.to_string()))?;
        sets.push(set);
    }

    let quality = match annotations {
        Some(path) => {
            let records =
                parse_annotations(open_for_read(path)?).map_err(|err| in_file(path, err))?;
            let by_head: HashMap<(&str, CoarsePos), usize> = heads
                .iter()
                .enumerate()
                .map(|(i, head)| ((head.lemma.as_str(), head.pos), i))
                .collect();
            for record in &records {
                match by_head.get(&(record.headword.as_str(), record.pos)) {
                    Some(&i) => sets[i].apply_annotation(record),
                    None => eprintln!(
                        "warning: annotation for {} ({}) matches no batch headword",
                        record.headword, record.pos
                    ),
                }
            }
            Some(aggregate_quality(&records).map_err(|err| in_file(path, err))?)
        }
        None => None,
    };

    let indicators = aggregate_indicators(&sets);
    let coverage = coverage_rate(&explanations).map_err(|err| Failure::Data(err.to_string()))?;

    let mut out = open_output(render.output.as_deref())?;
    match render.format {
        Format::Text => {
            writeln!(out, "indicators")?;
            out.write_all(indicators.to_text().as_bytes())?;
            if let Some(quality) = &quality {
                writeln!(out)?;
                writeln!(out, "quality")?;
                out.write_all(quality.to_text().as_bytes())?;
            }
            writeln!(out)?;
            writeln!(
                out,
                "coverage: {}/{} ({}%)",
                coverage.numerator,
                coverage.denominator,
                coverage.percent_text()
            )?;
        }
        Format::Json => {
            let table_value = |table: &lexplain_core::evaluate::RatioTable| {
                serde_json::from_str::<serde_json::Value>(&table.to_json())
                    .expect("table JSON round-trips")
            };
            let mut document = serde_json::Map::new();
            document.insert("indicators".to_string(), table_value(&indicators));
            if let Some(quality) = &quality {
                document.insert("quality".to_string(), table_value(quality));
            }
            document.insert(
                "coverage".to_string(),
                serde_json::json!({
                    "covered": coverage.numerator,
                    "total": coverage.denominator,
                    "percent": coverage.percent_text(),
                }),
            );
            write_json(&mut out, &serde_json::Value::Object(document))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("value serializes to JSON");
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}
