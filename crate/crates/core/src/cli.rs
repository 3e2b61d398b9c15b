//! `hierdecode` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 oracle mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decode_node::{decode_leaf_bayes, NodeDecoder, DEFAULT_MATRIX_BUDGET};
use crate::decoder::{Decoder, DecoderSpec};
use crate::error::{Error, Result};
use crate::evalharness::synth::{balanced_tree, random_tree_with_leaves, rng, table1_shaped_tree};
use crate::evalharness::{
    agreement_map, bench, evaluate, load_dataset, parse_probs, smooth_sweep, synth_generate, SweepOptions,
};
use crate::heuristics::HeuristicKind;
use crate::hierarchy::Hierarchy;
use crate::metrics::{check_reasonable, CandidateSpace, CostMatrix, CostModel, MetricKind, Orientation};
use crate::prediction::Prediction;
use crate::verify::run_verification;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hierdecode", version, about = "Bayes-optimal decoding for hierarchical classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Hierarchy edge list (TSV, `parent<TAB>child` per line).
    #[arg(long)]
    hierarchy: Option<PathBuf>,
    /// Metric, e.g. `dl`, `dlc:0.5`, `wp`, `zhao`, `hf:2`.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report destination (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Add a stop leaf under `all` internal nodes or the listed ones.
    #[arg(long, value_name = "all|NAME,...")]
    add_stop_nodes: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a hierarchy and, optionally, the reasonableness of a metric or matrix.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Decode every row of a probability file.
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        probs: PathBuf,
        /// `optimal[:metric]`, `oracle[:metric]` or a heuristic name.
        #[arg(long, default_value = "optimal")]
        decoder: String,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Mean score of each decoder against labels.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Comma-separated decoder list.
        #[arg(long)]
        decoders: Option<String>,
    },
    /// Score gaps on rows mixed toward uniform.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        decoders: Option<String>,
        #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5")]
        lambdas: String,
        /// Keep the original labels instead of resampling from smoothed rows.
        #[arg(long)]
        keep_labels: bool,
    },
    /// Agreement of two decoders over the 3-leaf simplex (CSV).
    Agreement {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "optimal")]
        decoder_a: String,
        #[arg(long, default_value = "argmax")]
        decoder_b: String,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        /// Also write a PPM image of the map.
        #[arg(long)]
        ppm: Option<PathBuf>,
    },
    /// Per-sample decode latency on Dirichlet rows.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "optimal")]
        decoder: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Largest dense cost matrix (entries) built for node decoders.
        #[arg(long, default_value_t = DEFAULT_MATRIX_BUDGET)]
        budget: usize,
    },
    /// Oracle-labeled synthetic dataset; writes hierarchy.tsv, probs.csv and
    /// labels.txt into the output directory.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Generated tree when no hierarchy is given: `random:LEAVES[:MAX_CHILDREN]`,
        /// `balanced:BRANCHING:DEPTH` or `table1`.
        #[arg(long, default_value = "random:20:4")]
        tree: String,
    },
    /// Randomized oracle-equivalence suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct MatrixArgs {
    /// Explicit cost matrix (text or binary); rows are nodes or leaves.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value = "cost")]
    orientation: String,
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownMetric(_)
            | Error::UnknownDecoder(_)
            | Error::InvalidParam(_)
            | Error::InvalidTau(_)
            | Error::InvalidAlpha(_)
            | Error::InvalidLambda(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let threads = common(&cli.command).threads;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Validate { common, .. }
        | Command::Decode { common, .. }
        | Command::Eval { common, .. }
        | Command::Sweep { common, .. }
        | Command::Agreement { common, .. }
        | Command::Bench { common, .. }
        | Command::Synth { common, .. }
        | Command::Verify { common, .. } => common,
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

impl Common {
    fn metric(&self) -> Result<MetricKind> {
        self.metric.as_deref().unwrap_or("dl").parse()
    }

    fn hierarchy(&self) -> std::result::Result<Hierarchy, Failure> {
        let path = self
            .hierarchy
            .as_ref()
            .ok_or_else(|| usage("--hierarchy is required"))?;
        let h = Hierarchy::read_tsv(path)?;
        Ok(self.with_stop_nodes(h)?)
    }

    fn with_stop_nodes(&self, h: Hierarchy) -> Result<Hierarchy> {
        let Some(spec) = &self.add_stop_nodes else {
            return Ok(h);
        };
        let nodes = if spec.trim() == "all" {
            h.internal_nodes()
        } else {
            spec.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| h.node_by_name(s).ok_or_else(|| Error::UnknownNode(s.to_string())))
                .collect::<Result<_>>()?
        };
        h.augment_with_stop_nodes(&nodes)
    }

    fn emit(&self, text: &str, json: impl Serialize) -> Result<()> {
        let body = match self.format {
            Format::Text => text.to_string(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json).map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                s
            }
        };
        match &self.output {
            Some(p) => std::fs::write(p, body)?,
            None => std::io::stdout().lock().write_all(body.as_bytes())?,
        }
        Ok(())
    }
}

fn decoders(list: Option<&str>, metric: MetricKind) -> Result<Vec<DecoderSpec>> {
    match list {
        Some(s) => DecoderSpec::parse_list(s, metric),
        None => Ok(std::iter::once(DecoderSpec::Optimal(metric))
            .chain(HeuristicKind::ALL_DEFAULT.iter().map(|&k| DecoderSpec::Heuristic(k)))
            .collect()),
    }
}

fn prepare(specs: &[DecoderSpec], h: &Hierarchy) -> Result<Vec<Decoder>> {
    specs.iter().map(|&s| Decoder::prepare(s, h)).collect()
}

fn load_matrix(args: &MatrixArgs, h: &Hierarchy) -> Result<Option<CostModel>> {
    let Some(path) = &args.matrix else {
        return Ok(None);
    };
    let orientation: Orientation = args.orientation.parse()?;
    let m = CostMatrix::read(path)?;
    let space = if m.rows() == h.node_count() {
        CandidateSpace::Nodes
    } else {
        CandidateSpace::Leaves
    };
    CostModel::explicit(h, m, orientation, space).map(Some)
}

#[derive(Serialize)]
struct HierarchySummary {
    nodes: usize,
    leaves: usize,
    max_depth: u32,
    reasonableness: Option<String>,
}

#[derive(Serialize)]
struct SynthSummary {
    samples: usize,
    nodes: usize,
    leaves: usize,
    directory: PathBuf,
}

fn dispatch(cmd: &Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Validate { common, matrix } => {
            let metric = common.metric.as_deref().map(str::parse::<MetricKind>).transpose()?;
            if matrix.matrix.is_some() {
                matrix.orientation.parse::<Orientation>()?;
            }
            let h = common.hierarchy()?;
            let model = match load_matrix(matrix, &h)? {
                Some(m) => Some(m),
                None => match metric {
                    Some(k) if k.native_space() == CandidateSpace::Nodes => {
                        Some(CostModel::builtin_on(k, CandidateSpace::Nodes)?)
                    }
                    Some(k) => return Err(usage(format!("{k} is not a node-space metric"))),
                    None => None,
                },
            };
            if let Some(m) = &model {
                if m.space != CandidateSpace::Nodes {
                    return Err(Error::DimensionMismatch("reasonableness needs a node-by-leaf matrix".into()).into());
                }
            }
            let verdict = model.as_ref().map(|m| check_reasonable(m, &h).to_string());
            let summary = HierarchySummary {
                nodes: h.node_count(),
                leaves: h.leaf_count(),
                max_depth: h.max_depth(),
                reasonableness: verdict.clone(),
            };
            let mut text = format!(
                "hierarchy ok: {} nodes, {} leaves, max depth {}\n",
                summary.nodes, summary.leaves, summary.max_depth
            );
            if let Some(v) = verdict {
                text.push_str(&v);
                text.push('\n');
            }
            common.emit(&text, summary)?;
        }
        Command::Decode {
            common,
            probs,
            decoder,
            matrix,
        } => {
            let metric = common.metric()?;
            let spec = DecoderSpec::parse(decoder, metric)?;
            if matrix.matrix.is_some() {
                matrix.orientation.parse::<Orientation>()?;
            }
            let h = common.hierarchy()?;
            let rows = parse_probs(&h, &crate::error::read_text(probs)?)?;
            let preds: Vec<Prediction> = match load_matrix(matrix, &h)? {
                Some(model) if model.space == CandidateSpace::Nodes => {
                    let d = NodeDecoder::new(&h, model)?;
                    rows.iter().map(|p| d.decode(&h, p)).collect::<Result<_>>()?
                }
                Some(model) => rows
                    .iter()
                    .map(|p| decode_leaf_bayes(&model, &h, p))
                    .collect::<Result<_>>()?,
                None => {
                    let d = Decoder::prepare(spec, &h)?;
                    rows.iter().map(|p| d.decode(&h, p)).collect::<Result<_>>()?
                }
            };
            let names: Vec<Vec<String>> = preds
                .iter()
                .map(|p| p.antichain().iter().map(|&n| h.name(n).to_string()).collect())
                .collect();
            let text: String = names.iter().map(|n| n.join(" ") + "\n").collect();
            common.emit(&text, names)?;
        }
        Command::Eval {
            common,
            probs,
            labels,
            decoders: list,
        } => {
            let metric = common.metric()?;
            let specs = decoders(list.as_deref(), metric)?;
            let ds = load(common, probs, labels)?;
            let report = evaluate(&ds, metric, &prepare(&specs, &ds.hierarchy)?)?;
            common.emit(&report.to_text(), &report)?;
        }
        Command::Sweep {
            common,
            probs,
            labels,
            decoders: list,
            lambdas,
            keep_labels,
        } => {
            let metric = common.metric()?;
            let specs = decoders(list.as_deref(), metric)?;
            let lambdas = lambdas
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| usage(format!("bad lambda `{s}`"))))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let ds = load(common, probs, labels)?;
            let opts = SweepOptions {
                seed: common.seed,
                resample_labels: !keep_labels,
            };
            let report = smooth_sweep(&ds, metric, &prepare(&specs, &ds.hierarchy)?, &lambdas, opts)?;
            common.emit(&report.to_text(), &report)?;
        }
        Command::Agreement {
            common,
            decoder_a,
            decoder_b,
            resolution,
            ppm,
        } => {
            let metric = common.metric()?;
            let a = DecoderSpec::parse(decoder_a, metric)?;
            let b = DecoderSpec::parse(decoder_b, metric)?;
            let h = common.hierarchy()?;
            let grid = agreement_map(&h, &Decoder::prepare(a, &h)?, &Decoder::prepare(b, &h)?, *resolution)?;
            if let Some(path) = ppm {
                std::fs::write(path, grid.to_ppm()).map_err(Error::from)?;
            }
            common.emit(&grid.to_csv(), &grid)?;
        }
        Command::Bench {
            common,
            decoder,
            samples,
            alpha,
            budget,
        } => {
            let metric = common.metric()?;
            let spec = DecoderSpec::parse(decoder, metric)?;
            let h = common.hierarchy()?;
            let d = Decoder::prepare_with_budget(spec, &h, *budget)?;
            let report = bench(&h, &d, *samples, *alpha, common.seed)?;
            common.emit(&report.to_text(), &report)?;
        }
        Command::Synth { common, n, alpha, tree } => {
            let h = match &common.hierarchy {
                Some(_) => common.hierarchy()?,
                None => common.with_stop_nodes(generate_tree(tree, common.seed)?)?,
            };
            let ds = synth_generate(&h, *n, *alpha, common.seed)?;
            let dir = common.output.clone().unwrap_or_else(|| PathBuf::from("synth-out"));
            std::fs::create_dir_all(&dir).map_err(Error::from)?;
            std::fs::write(dir.join("hierarchy.tsv"), h.to_tsv()).map_err(Error::from)?;
            ds.write(dir.join("probs.csv"), Some(&dir.join("labels.txt")))?;
            let summary = SynthSummary {
                samples: ds.len(),
                nodes: h.node_count(),
                leaves: h.leaf_count(),
                directory: dir.clone(),
            };
            let text = format!(
                "wrote {} samples over {} leaves ({} nodes) to {}\n",
                summary.samples,
                summary.leaves,
                summary.nodes,
                dir.display()
            );
            print_summary(common.format, &text, &summary)?;
        }
        Command::Verify { common, trials } => {
            let report = run_verification(*trials, common.seed)?;
            common.emit(&report.to_text(), &report)?;
            if !report.passed() {
                return Err(Failure {
                    code: EXIT_MISMATCH,
                    msg: "decoder disagrees with the brute-force oracle".into(),
                });
            }
        }
    }
    Ok(())
}

fn load(common: &Common, probs: &Path, labels: &Path) -> std::result::Result<crate::evalharness::Dataset, Failure> {
    let path = common
        .hierarchy
        .as_ref()
        .ok_or_else(|| usage("--hierarchy is required"))?;
    if common.add_stop_nodes.is_some() {
        let h = common.hierarchy()?;
        let rows = parse_probs(&h, &crate::error::read_text(probs)?)?;
        let labels = crate::evalharness::parse_labels(&h, &crate::error::read_text(labels)?)?;
        return Ok(crate::evalharness::Dataset::new(h, rows, Some(labels))?);
    }
    Ok(load_dataset(path, probs, Some(labels))?)
}

/// Synth writes its data to the output directory, so the summary goes to stdout.
fn print_summary(format: Format, text: &str, json: impl Serialize) -> Result<()> {
    let body = match format {
        Format::Text => text.to_string(),
        Format::Json => serde_json::to_string_pretty(&json).map_err(|e| Error::Io(e.to_string()))? + "\n",
    };
    std::io::stdout().lock().write_all(body.as_bytes())?;
    Ok(())
}

fn generate_tree(spec: &str, seed: u64) -> Result<Hierarchy> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize, default: Option<usize>| -> Result<usize> {
        match parts.get(i) {
            Some(s) => s
                .parse()
                .map_err(|_| Error::InvalidParam(format!("bad number `{s}` in tree spec `{spec}`"))),
            None => default.ok_or_else(|| Error::InvalidParam(format!("incomplete tree spec `{spec}`"))),
        }
    };
    match parts[0] {
        "random" => {
            let leaves = num(1, None)?;
            let max_children = num(2, Some(4))?;
            if leaves < 2 || max_children < 2 {
                return Err(Error::InvalidParam("random trees need >= 2 leaves and max children >= 2".into()));
            }
            Ok(random_tree_with_leaves(&mut rng(seed), leaves, max_children))
        }
        "balanced" => {
            let (b, d) = (num(1, None)?, num(2, None)?);
            if b < 1 || d < 1 || (b as f64).powi(d as i32) > 1e7 {
                return Err(Error::InvalidParam(format!("unsupported balanced tree `{spec}`")));
            }
            Ok(balanced_tree(b, d as u32))
        }
        "table1" => Ok(table1_shaped_tree(seed)),
        _ => Err(Error::InvalidParam(format!("unknown tree spec `{spec}`"))),
    }
}
