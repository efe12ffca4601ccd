//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.
//! Diagnostics go to stderr; `measure` and `analyze` print their JSON report
//! on stdout.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cluster::{annotate_leaves, ward_cluster, DissimilarityMatrix, DEFAULT_CAP};
use crate::data::{load_csv, BinSpec, Dataset, MissingMode, MissingPolicy, DEFAULT_MISSING_MARKER};
use crate::error::Error;
use crate::prob::Estimator;
use crate::report::{attribute_entries, measure_entry, Report};
use crate::search::{
    conditional_scan, enumerate_interactions, score_interaction, star_scan, InteractionScore,
    RankBy, SearchSpec,
};
use crate::synth::{generate, GenKind, GenSpec, Sampling};
use crate::viz::{
    conditional_graph, information_graph, interaction_graph, render_dendrogram, render_dot,
    write_text, DendrogramFormat, DEFAULT_CONDITIONAL_THRESHOLD,
};

#[derive(Debug, Parser)]
#[command(
    name = "interinfo",
    version,
    about = "Entropy-based attribute interaction analysis"
)]
struct Cli {
    /// Worker threads for scoring (0 = one per core). Never affects output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full analysis: interaction graph, conditional graph, dendrogram and report.
    Analyze(AnalyzeArgs),
    /// Interaction graph of the top interactions with the label.
    Igraph(SearchArgs),
    /// Information graph of 2 to 4 attributes.
    Infograph(InfographArgs),
    /// Interactions conditioned on the label.
    Condgraph(CondgraphArgs),
    /// Interaction dendrogram.
    Dendrogram(DendrogramArgs),
    /// Write a synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Interaction information of one attribute subset.
    Measure(MeasureArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV with a header row.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Estimator: ml, laplace, dirichlet or dirichlet:ALPHA.
    #[arg(long, default_value = "ml")]
    estimator: String,
    /// Missing values: category keeps the marker as a value, drop removes rows.
    #[arg(long, default_value = "category")]
    missing: String,
    #[arg(long, default_value = DEFAULT_MISSING_MARKER)]
    missing_marker: String,
    /// Discretize a numeric column into equal-frequency bins: COL or COL:K.
    #[arg(long = "bin", value_name = "COL[:K]")]
    bins: Vec<String>,
}

#[derive(Debug, Args)]
struct LabelledInput {
    #[command(flatten)]
    input: InputArgs,
    /// Label (class) attribute.
    #[arg(long, required = true)]
    label: String,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    data: LabelledInput,
    /// Maximum interaction order.
    #[arg(short = 'k', default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 16)]
    top: usize,
    /// Ranking: magnitude or normed.
    #[arg(long, default_value = "magnitude")]
    rank: String,
    /// Significance level for flagging G-tests.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// Conditional interactions below this many bits are not drawn.
    #[arg(long, default_value_t = DEFAULT_CONDITIONAL_THRESHOLD)]
    threshold: f64,
    /// Also scan the interactions around this attribute.
    #[arg(long)]
    anchor: Option<String>,
    /// Pairs and triples kept by the anchor scan.
    #[arg(long, default_value_t = 5)]
    anchor_top: usize,
}

#[derive(Debug, Args)]
struct InfographArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated attribute names (2 to 4).
    #[arg(long, value_delimiter = ',', required = true)]
    attrs: Vec<String>,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CondgraphArgs {
    #[command(flatten)]
    data: LabelledInput,
    /// Maximum order, 2 or 3.
    #[arg(short = 'k', default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 64)]
    top: usize,
    #[arg(long, default_value = "magnitude")]
    rank: String,
    #[arg(long, default_value_t = DEFAULT_CONDITIONAL_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DendrogramArgs {
    #[command(flatten)]
    data: LabelledInput,
    /// newick or dot; both when omitted.
    #[arg(long)]
    format: Option<String>,
    /// Upper limit of the dissimilarity.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: f64,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// parity, triplicate, mixture, naive-bayes, synonym or polysemy.
    #[arg(long)]
    kind: String,
    #[arg(short = 'n', default_value_t = 1000)]
    n: usize,
    /// Sample with this seed; without it each cell is repeated exactly.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of free bits (parity).
    #[arg(long, default_value_t = 2)]
    bits: usize,
    /// Probability of the XOR event (mixture).
    #[arg(long, default_value_t = 0.773)]
    p1: f64,
    /// Flip probability (synonym, polysemy).
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Independent distractor attributes (synonym).
    #[arg(long, default_value_t = 2)]
    distractors: usize,
    /// Context probabilities (polysemy).
    #[arg(long, default_value_t = 0.3)]
    p_context1: f64,
    #[arg(long, default_value_t = 0.3)]
    p_context2: f64,
    /// Attribute count, cardinality, classes and strength (naive-bayes).
    #[arg(long, default_value_t = 4)]
    n_attrs: usize,
    #[arg(long, default_value_t = 3)]
    cardinality: usize,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    #[arg(long, default_value_t = 0.5)]
    strength: f64,
    /// Output CSV; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    label: Option<String>,
    /// Comma-separated attribute names, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    subset: Vec<String>,
    /// Comma-separated conditioning attributes.
    #[arg(long, value_delimiter = ',')]
    context: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Also write the report to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Runs the tool on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("Run with --help for usage.");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Igraph(a) => igraph(a),
        Command::Infograph(a) => infograph(a),
        Command::Condgraph(a) => condgraph(a),
        Command::Dendrogram(a) => dendrogram(a),
        Command::Synth(a) => synth(a),
        Command::Measure(a) => measure(a),
    }
}

struct Loaded {
    dataset: Dataset,
    estimator: Estimator,
    params: BTreeMap<String, String>,
}

fn load(input: &InputArgs, label: Option<&str>) -> CliResult<Loaded> {
    let estimator = Estimator::parse(&input.estimator).map_err(|e| usage(e.to_string()))?;
    let mode = match input.missing.as_str() {
        "category" => MissingMode::AsCategory,
        "drop" => MissingMode::DropRow,
        other => return Err(usage(format!("unknown missing-value policy {other:?}"))),
    };
    let mut bins = BinSpec::new();
    for directive in &input.bins {
        let (col, k) = BinSpec::parse_directive(directive).map_err(|e| usage(e.to_string()))?;
        bins = bins.with(col, k);
    }
    let missing = MissingPolicy {
        mode,
        marker: input.missing_marker.clone(),
    };
    let dataset = load_csv(&input.input, label, &missing, &bins)?;
    for w in dataset.warnings() {
        eprintln!("warning: {w}");
    }
    let file_name = input
        .input
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut params = BTreeMap::new();
    params.insert("input".to_string(), file_name);
    params.insert("estimator".to_string(), estimator.to_string());
    params.insert("missing".to_string(), input.missing.clone());
    if !input.bins.is_empty() {
        params.insert("bins".to_string(), input.bins.join(","));
    }
    if let Some(label) = label {
        params.insert("label".to_string(), label.to_string());
    }
    Ok(Loaded {
        dataset,
        estimator,
        params,
    })
}

fn header_params(params: &BTreeMap<String, String>) -> Vec<(String, String)> {
    params.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| {
        Failure::Data(Error::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}

fn emit(dir: &Path, name: &str, text: &str, report: &mut Report) -> CliResult<()> {
    write_text(&dir.join(name), text)?;
    report.diagrams.push(name.to_string());
    Ok(())
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn resolve(dataset: &Dataset, names: &[String]) -> CliResult<Vec<usize>> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(dataset.resolve(&refs)?)
}

fn search_spec(args: &SearchArgs, estimator: Estimator) -> CliResult<SearchSpec> {
    if args.k < 2 {
        return Err(usage(format!("-k must be at least 2, got {}", args.k)));
    }
    if args.top == 0 {
        return Err(usage("--top must be at least 1"));
    }
    check_alpha(args.alpha)?;
    Ok(SearchSpec {
        max_order: args.k,
        top_n: args.top,
        require_label: true,
        context: Vec::new(),
        rank_by: RankBy::parse(&args.rank).map_err(|e| usage(e.to_string()))?,
        estimator,
        low_order_gate: None,
    })
}

fn search_params(params: &mut BTreeMap<String, String>, args: &SearchArgs) {
    params.insert("k".into(), args.k.to_string());
    params.insert("top".into(), args.top.to_string());
    params.insert("rank".into(), args.rank.clone());
    params.insert("alpha".into(), args.alpha.to_string());
}

fn push_measures(
    report: &mut Report,
    dataset: &Dataset,
    group: &str,
    scores: &[InteractionScore],
    est: Estimator,
    alpha: f64,
) -> CliResult<()> {
    for s in scores {
        report
            .measures
            .push(measure_entry(dataset, group, s, est, alpha)?);
    }
    Ok(())
}

fn print_report(report: &Report) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.to_json().as_bytes());
}

fn analyze(args: AnalyzeArgs) -> CliResult<()> {
    let s = &args.search;
    let Loaded {
        dataset,
        estimator,
        mut params,
    } = load(&s.data.input, Some(&s.data.label))?;
    let spec = search_spec(s, estimator)?;
    if !(args.threshold >= 0.0) {
        return Err(usage("--threshold must be nonnegative"));
    }
    search_params(&mut params, s);
    params.insert("threshold".into(), args.threshold.to_string());
    if let Some(anchor) = &args.anchor {
        params.insert("anchor".into(), anchor.clone());
        params.insert("anchor_top".into(), args.anchor_top.to_string());
    }
    let header = header_params(&params);
    ensure_dir(&s.out)?;

    let mut report = Report::new("analyze", params.clone());
    report.warnings = dataset.warnings().to_vec();
    report.attributes = attribute_entries(&dataset, estimator)?;

    let scores = enumerate_interactions(&dataset, &spec)?;
    push_measures(
        &mut report,
        &dataset,
        "interaction",
        &scores,
        estimator,
        s.alpha,
    )?;
    let doc = interaction_graph(&dataset, &scores, estimator, &header)?;
    emit(&s.out, "interaction.dot", &render_dot(&doc), &mut report)?;

    let others = dataset.non_label_attributes().len();
    if others >= 2 {
        let cond = conditional_scan(
            &dataset,
            s.k.min(3).min(others),
            usize::MAX,
            spec.rank_by,
            estimator,
        )?;
        let kept: Vec<InteractionScore> = cond
            .into_iter()
            .filter(|c| c.magnitude.0 >= args.threshold)
            .collect();
        push_measures(
            &mut report,
            &dataset,
            "conditional",
            &kept,
            estimator,
            s.alpha,
        )?;
        let doc = conditional_graph(&dataset, &kept, args.threshold, estimator, &header)?;
        emit(&s.out, "conditional.dot", &render_dot(&doc), &mut report)?;

        let matrix = DissimilarityMatrix::from_dataset(&dataset, estimator, DEFAULT_CAP)?;
        let tree = annotate_leaves(&ward_cluster(&matrix), &dataset, estimator)?;
        for format in [DendrogramFormat::Newick, DendrogramFormat::Dot] {
            let name = format!("dendrogram.{}", format.extension());
            emit(
                &s.out,
                &name,
                &render_dendrogram(&tree, format, &header),
                &mut report,
            )?;
        }
    }

    if let Some(anchor) = &args.anchor {
        let a = resolve(&dataset, std::slice::from_ref(anchor))?[0];
        let star = star_scan(&dataset, a, args.anchor_top, args.anchor_top, estimator)?;
        push_measures(
            &mut report,
            &dataset,
            "star",
            &star.pairs,
            estimator,
            s.alpha,
        )?;
        push_measures(
            &mut report,
            &dataset,
            "star",
            &star.triples,
            estimator,
            s.alpha,
        )?;
    }

    report.diagrams.push("report.json".into());
    write_text(&s.out.join("report.json"), &report.to_json())?;
    print_report(&report);
    Ok(())
}

fn igraph(args: SearchArgs) -> CliResult<()> {
    let Loaded {
        dataset,
        estimator,
        mut params,
    } = load(&args.data.input, Some(&args.data.label))?;
    let spec = search_spec(&args, estimator)?;
    search_params(&mut params, &args);
    ensure_dir(&args.out)?;
    let scores = enumerate_interactions(&dataset, &spec)?;
    let doc = interaction_graph(&dataset, &scores, estimator, &header_params(&params))?;
    write_text(&args.out.join("interaction.dot"), &render_dot(&doc))?;
    Ok(())
}

fn infograph(args: InfographArgs) -> CliResult<()> {
    let Loaded {
        dataset,
        estimator,
        mut params,
    } = load(&args.input, None)?;
    if !(2..=4).contains(&args.attrs.len()) {
        return Err(usage(format!(
            "--attrs takes 2 to 4 names, got {}",
            args.attrs.len()
        )));
    }
    let attrs = resolve(&dataset, &args.attrs)?;
    params.insert("attrs".into(), args.attrs.join(","));
    ensure_dir(&args.out)?;
    let doc = information_graph(&dataset, &attrs, estimator, &header_params(&params))?;
    write_text(&args.out.join("information.dot"), &render_dot(&doc))?;
    Ok(())
}

fn condgraph(args: CondgraphArgs) -> CliResult<()> {
    let Loaded {
        dataset,
        estimator,
        mut params,
    } = load(&args.data.input, Some(&args.data.label))?;
    if !(2..=3).contains(&args.k) {
        return Err(usage(format!(
            "-k must be 2 or 3 for conditional graphs, got {}",
            args.k
        )));
    }
    if !(args.threshold >= 0.0) {
        return Err(usage("--threshold must be nonnegative"));
    }
    let rank = RankBy::parse(&args.rank).map_err(|e| usage(e.to_string()))?;
    params.insert("k".into(), args.k.to_string());
    params.insert("top".into(), args.top.to_string());
    params.insert("rank".into(), args.rank.clone());
    params.insert("threshold".into(), args.threshold.to_string());
    ensure_dir(&args.out)?;
    let scores = conditional_scan(&dataset, args.k, args.top.max(1), rank, estimator)?;
    let doc = conditional_graph(
        &dataset,
        &scores,
        args.threshold,
        estimator,
        &header_params(&params),
    )?;
    write_text(&args.out.join("conditional.dot"), &render_dot(&doc))?;
    Ok(())
}

fn dendrogram(args: DendrogramArgs) -> CliResult<()> {
    let formats = match &args.format {
        None => vec![DendrogramFormat::Newick, DendrogramFormat::Dot],
        Some(f) => vec![DendrogramFormat::parse(f).map_err(|e| usage(e.to_string()))?],
    };
    if !(args.cap > 0.0) {
        return Err(usage("--cap must be positive"));
    }
    let Loaded {
        dataset,
        estimator,
        mut params,
    } = load(&args.data.input, Some(&args.data.label))?;
    params.insert("cap".into(), args.cap.to_string());
    ensure_dir(&args.out)?;
    let matrix = DissimilarityMatrix::from_dataset(&dataset, estimator, args.cap)?;
    let tree = annotate_leaves(&ward_cluster(&matrix), &dataset, estimator)?;
    let header = header_params(&params);
    for format in formats {
        let path = args.out.join(format!("dendrogram.{}", format.extension()));
        write_text(&path, &render_dendrogram(&tree, format, &header))?;
    }
    Ok(())
}

fn synth(args: SynthArgs) -> CliResult<()> {
    let kind = match args.kind.as_str() {
        "parity" => GenKind::Parity { k: args.bits },
        "triplicate" => GenKind::Triplicate,
        "mixture" => GenKind::Mixture { p1: args.p1 },
        "naive-bayes" => GenKind::NaiveBayes {
            n_attrs: args.n_attrs,
            cardinality: args.cardinality,
            n_classes: args.classes,
            strength: args.strength,
        },
        "synonym" => GenKind::Synonym {
            noise: args.noise,
            n_distractors: args.distractors,
        },
        "polysemy" => GenKind::Polysemy {
            p_context1: args.p_context1,
            p_context2: args.p_context2,
            noise: args.noise,
        },
        other => return Err(usage(format!("unknown generator {other:?}"))),
    };
    let sampling = match args.seed {
        Some(seed) => Sampling::Random { seed },
        None => Sampling::Exhaustive,
    };
    let dataset = generate(&GenSpec {
        kind,
        n: args.n,
        sampling,
    })
    .map_err(|e| usage(e.to_string()))?;
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            dataset.write_csv(std::io::BufWriter::new(file))?;
        }
        None => dataset.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn measure(args: MeasureArgs) -> CliResult<()> {
    check_alpha(args.alpha)?;
    if args.subset.len() < 2 {
        return Err(usage("--subset needs at least two attributes"));
    }
    let Loaded {
        dataset,
        estimator,
        mut params,
    } = load(&args.input, args.label.as_deref())?;
    let subset = resolve(&dataset, &args.subset)?;
    let context = resolve(&dataset, &args.context)?;
    params.insert("subset".into(), args.subset.join(","));
    if !args.context.is_empty() {
        params.insert("context".into(), args.context.join(","));
    }
    params.insert("alpha".into(), args.alpha.to_string());
    let score = score_interaction(&dataset, &subset, &context, estimator)?;
    let mut report = Report::new("measure", params);
    report.warnings = dataset.warnings().to_vec();
    report.attributes = attribute_entries(&dataset, estimator)?;
    report.measures.push(measure_entry(
        &dataset, "measure", &score, estimator, args.alpha,
    )?);
    if let Some(path) = &args.out {
        write_text(path, &report.to_json())?;
    }
    print_report(&report);
    Ok(())
}
