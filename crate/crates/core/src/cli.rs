//! The `funcspace` command line.
//!
//! Every command resolves a [`RunConfig`] from an optional TOML file plus
//! flags (flags win), writes the resolved config to the output directory as
//! `config.toml`, and only then produces its artifacts. Running again with
//! `--config <out>/config.toml` reproduces the same outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::compose::CompositionKind;
use crate::corpus::{
    gen_synthetic_assignment, gen_synthetic_svo, load_tuples, AssignmentMode, GroupSchema, TupleDataset, Vocabulary,
};
use crate::error::{Error, Result};
use crate::eval::{
    ablate, ablation_csv, cluster_purity, event_similarity_eval, nearest_neighbors_multi, pseudo_disambiguation,
    reports_csv, thematic_fit_eval, EvalReport, Role, SimilarityDataset, ThematicFitDataset,
};
use crate::model::{Checkpoint, FrozenModel, Regime, Schedule, Sharing, TrainConfig, Trainer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub corpus: Option<PathBuf>,
    /// Comma-separated group labels.
    pub groups: String,
    pub min_count: u64,
    pub strict: bool,
    /// Fraction of records held out from training.
    pub held_out: f64,
    pub split_seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            groups: "S,V,O".into(),
            min_count: 1,
            strict: false,
            held_out: 0.0,
            split_seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub checkpoint: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub composition: String,
    /// `agent`, `patient` or empty for both.
    pub role: String,
    /// Groups corrupted by pseudo-disambiguation; empty means all.
    pub corrupt: Vec<String>,
    pub use_bias: bool,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            checkpoint: None,
            dataset: None,
            composition: "addition".into(),
            role: String::new(),
            corrupt: Vec::new(),
            use_bias: true,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryConfig {
    pub word: String,
    pub group: String,
    /// Target groups, ranked together.
    pub targets: Vec<String>,
    pub k: usize,
}

impl Default for QueryConfig {
    fn default() -> Self {
        Self {
            word: String::new(),
            group: "V".into(),
            targets: Vec::new(),
            k: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoConfig {
    pub items: usize,
    pub clusters: usize,
    pub data_seed: u64,
    pub epochs: u64,
    /// Smaller than the training default so that 2000 items still give a
    /// few thousand updates in 24 epochs.
    pub batch_size: usize,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            items: 2000,
            clusters: 3,
            data_seed: 7,
            epochs: 24,
            batch_size: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblateConfig {
    /// Regimes such as `sync+shared`; empty means all four.
    pub grid: Vec<String>,
    /// Train on the built-in synthetic S/V/O corpus instead of `data.corpus`.
    pub synthetic: bool,
    pub synthetic_seed: u64,
}

impl Default for AblateConfig {
    fn default() -> Self {
        Self {
            grid: Vec::new(),
            synthetic: false,
            synthetic_seed: 13,
        }
    }
}

/// Everything a run needs. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub out: PathBuf,
    pub data: DataConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub query: QueryConfig,
    pub demo: DemoConfig,
    pub ablate: AblateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            out: PathBuf::from("out"),
            data: DataConfig::default(),
            train: TrainConfig::default(),
            eval: EvalConfig::default(),
            query: QueryConfig::default(),
            demo: DemoConfig::default(),
            ablate: AblateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }

    pub fn schema(&self) -> Result<GroupSchema> {
        GroupSchema::parse(&self.data.groups)
    }

    fn write_resolved(&self) -> Result<()> {
        fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        let path = self.out.join("config.toml");
        fs::write(&path, self.to_toml()?).map_err(|e| Error::io(&path, e))
    }
}

#[derive(Debug, Parser)]
#[command(name = "funcspace", version, about = "Function-specific word vector spaces")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Training seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the vocabulary, train, and write checkpoint, vocab dumps and loss trace.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Evaluate a checkpoint.
    Eval {
        #[command(subcommand)]
        task: EvalTask,
    },
    /// Nearest neighbours of a word.
    Nn {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        word: Option<String>,
        /// Group of the query word.
        #[arg(long)]
        group: Option<String>,
        /// Comma-separated target groups (default: the query group).
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Write one text vector file per group.
    Export {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Train the three directionality variants on synthetic assignments.
    DemoDirectionality {
        #[arg(long)]
        items: Option<usize>,
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long)]
        data_seed: Option<u64>,
        #[arg(long)]
        epochs: Option<u64>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Train every regime on the same data and compare pseudo-disambiguation.
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Comma-separated regimes, e.g. `sync+shared,async+sep`.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<Regime>,
        /// Use the built-in synthetic S/V/O corpus.
        #[arg(long)]
        synthetic: bool,
        /// Comma-separated groups to corrupt.
        #[arg(long, value_delimiter = ',')]
        corrupt: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalTask {
    /// Held-out records against one corruption per role.
    Pseudo {
        #[command(flatten)]
        common: EvalArgs,
        /// Comma-separated groups to corrupt (default: all).
        #[arg(long, value_delimiter = ',')]
        corrupt: Vec<String>,
    },
    /// Spearman correlation with event similarity ratings.
    EventSim {
        #[command(flatten)]
        common: EvalArgs,
        #[arg(long)]
        composition: Option<CompositionKind>,
    },
    /// Spearman correlation with thematic fit ratings.
    Thematic {
        #[command(flatten)]
        common: EvalArgs,
        #[arg(long)]
        role: Option<Role>,
    },
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Dataset file (a tuple file for `pseudo`).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Drop bias terms from network scores.
    #[arg(long)]
    pub no_bias: bool,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Comma-separated group labels, e.g. `S,V,O,iO`.
    #[arg(long)]
    pub groups: Option<String>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub strict: bool,
    /// Fraction of records held out from training.
    #[arg(long)]
    pub held_out: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub epochs: Option<u64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub clip_norm: Option<f64>,
    #[arg(long)]
    pub schedule: Option<Schedule>,
    #[arg(long)]
    pub sharing: Option<Sharing>,
    /// Comma-separated directions to train, e.g. `S->V,V->S`.
    #[arg(long, value_delimiter = ',')]
    pub directions: Vec<String>,
}

impl DataArgs {
    fn apply(&self, c: &mut DataConfig) {
        if let Some(p) = &self.corpus {
            c.corpus = Some(p.clone());
        }
        if let Some(g) = &self.groups {
            c.groups = g.clone();
        }
        if let Some(m) = self.min_count {
            c.min_count = m;
        }
        if self.strict {
            c.strict = true;
        }
        if let Some(h) = self.held_out {
            c.held_out = h;
        }
    }
}

impl TrainArgs {
    fn apply(&self, c: &mut TrainConfig) {
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.clip_norm {
            c.clip_norm = v;
        }
        if let Some(v) = self.schedule {
            c.schedule = v;
        }
        if let Some(v) = self.sharing {
            c.sharing = v;
        }
        if !self.directions.is_empty() {
            c.directions = self.directions.clone();
        }
    }
}

impl EvalArgs {
    fn apply(&self, c: &mut EvalConfig) {
        if let Some(p) = &self.checkpoint {
            c.checkpoint = Some(p.clone());
        }
        if let Some(p) = &self.dataset {
            c.dataset = Some(p.clone());
        }
        if self.no_bias {
            c.use_bias = false;
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Train { .. } => "train",
        Command::Eval { task } => match task {
            EvalTask::Pseudo { .. } => "eval-pseudo",
            EvalTask::EventSim { .. } => "eval-event-sim",
            EvalTask::Thematic { .. } => "eval-thematic",
        },
        Command::Nn { .. } => "nn",
        Command::Export { .. } => "export",
        Command::DemoDirectionality { .. } => "demo-directionality",
        Command::Ablate { .. } => "ablate",
    }
}

/// Merges the config file (if any) with the flags of `cli`.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    c.command = command_name(&cli.command).into();
    if let Some(out) = &cli.out {
        c.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        c.train.seed = seed;
    }
    match &cli.command {
        Command::Train { data, train } => {
            data.apply(&mut c.data);
            train.apply(&mut c.train);
        }
        Command::Eval { task } => match task {
            EvalTask::Pseudo { common, corrupt } => {
                common.apply(&mut c.eval);
                if !corrupt.is_empty() {
                    c.eval.corrupt = corrupt.clone();
                }
            }
            EvalTask::EventSim { common, composition } => {
                common.apply(&mut c.eval);
                if let Some(k) = composition {
                    c.eval.composition = k.name().into();
                }
            }
            EvalTask::Thematic { common, role } => {
                common.apply(&mut c.eval);
                if let Some(r) = role {
                    c.eval.role = r.to_string();
                }
            }
        },
        Command::Nn {
            checkpoint,
            word,
            group,
            target,
            k,
        } => {
            if let Some(p) = checkpoint {
                c.eval.checkpoint = Some(p.clone());
            }
            if let Some(w) = word {
                c.query.word = w.clone();
            }
            if let Some(g) = group {
                c.query.group = g.clone();
            }
            if !target.is_empty() {
                c.query.targets = target.clone();
            }
            if let Some(k) = k {
                c.query.k = *k;
            }
        }
        Command::Export { checkpoint } => {
            if let Some(p) = checkpoint {
                c.eval.checkpoint = Some(p.clone());
            }
        }
        Command::DemoDirectionality {
            items,
            clusters,
            data_seed,
            epochs,
            dim,
        } => {
            if let Some(v) = items {
                c.demo.items = *v;
            }
            if let Some(v) = clusters {
                c.demo.clusters = *v;
            }
            if let Some(v) = data_seed {
                c.demo.data_seed = *v;
            }
            if let Some(v) = epochs {
                c.demo.epochs = *v;
            }
            if let Some(v) = dim {
                c.train.dim = *v;
            }
        }
        Command::Ablate {
            data,
            train,
            grid,
            synthetic,
            corrupt,
        } => {
            data.apply(&mut c.data);
            train.apply(&mut c.train);
            if !grid.is_empty() {
                c.ablate.grid = grid.iter().map(Regime::to_string).collect();
            }
            if *synthetic {
                c.ablate.synthetic = true;
            }
            if c.ablate.synthetic && c.data.held_out == 0.0 {
                c.data.held_out = 0.1;
            }
            if !corrupt.is_empty() {
                c.eval.corrupt = corrupt.clone();
            }
        }
    }
    Ok(c)
}

/// Parses arguments, runs the command and maps errors to a nonzero exit.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match resolve(&cli).and_then(|c| run(&c)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Runs a resolved configuration.
pub fn run(c: &RunConfig) -> Result<()> {
    match c.command.as_str() {
        "train" => cmd_train(c),
        "eval-pseudo" => cmd_eval_pseudo(c),
        "eval-event-sim" => cmd_eval_event_sim(c),
        "eval-thematic" => cmd_eval_thematic(c),
        "nn" => cmd_nn(c),
        "export" => cmd_export(c),
        "demo-directionality" => cmd_demo(c),
        "ablate" => cmd_ablate(c),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn required<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Config(format!("no {what} given")))
}

/// Vocabulary plus `(train, held_out)` datasets from `data.corpus`.
fn load_corpus(c: &RunConfig) -> Result<(Vocabulary, TupleDataset, TupleDataset)> {
    let schema = c.schema()?;
    let path = required(&c.data.corpus, "corpus (--corpus)")?;
    let loaded = load_tuples(path, &schema, c.data.strict)?;
    for r in loaded.rejections.iter().take(5) {
        log::warn!("{}:{}: {}", path.display(), r.line, r.reason);
    }
    if loaded.rejections.len() > 5 {
        log::warn!("{} lines rejected in total", loaded.rejections.len());
    }
    let vocab = Vocabulary::build(&schema, &loaded.tuples, c.data.min_count)?;
    let dataset = TupleDataset::encode(&loaded.tuples, &vocab);
    if dataset.is_empty() {
        return Err(Error::EmptyCorpus { path: path.into() });
    }
    log::info!(
        "{} records ({} dropped below min_count), vocab sizes {:?}",
        dataset.len(),
        dataset.dropped(),
        vocab.sizes()
    );
    let (train, held_out) = dataset.split(c.data.held_out, c.data.split_seed);
    Ok((vocab, train, held_out))
}

fn write_tuples(path: &Path, vocab: &Vocabulary, dataset: &TupleDataset) -> Result<()> {
    let mut text = String::new();
    for (i, rec) in dataset.records().enumerate() {
        let words: Vec<&str> = rec.iter().enumerate().map(|(g, &w)| vocab.group(g).word(w)).collect();
        text.push_str(&words.join("\t"));
        text.push_str(&format!("\t{}\n", dataset.count(i)));
    }
    write_file(path, &text)
}

fn cmd_train(c: &RunConfig) -> Result<()> {
    c.train.validate()?;
    let (vocab, train, held_out) = load_corpus(c)?;
    let mut trainer = Trainer::new(vocab.clone(), c.train.clone())?;
    let trace = trainer.run(&train)?;
    c.write_resolved()?;
    Checkpoint::save(&trainer, &c.out.join("checkpoint.json"))?;
    vocab.write_dump(&c.out.join("vocab"))?;
    trace.write_csv(&c.out.join("loss.csv"))?;
    if !held_out.is_empty() {
        write_tuples(&c.out.join("held_out.tsv"), &vocab, &held_out)?;
    }
    if let Some(last) = trace.epochs.last() {
        println!("trained {} epochs, final loss {}", trainer.epochs_completed, last.total);
    }
    Ok(())
}

fn load_frozen(c: &RunConfig) -> Result<FrozenModel> {
    let trainer = Checkpoint::load(required(&c.eval.checkpoint, "checkpoint (--checkpoint)")?)?;
    let mut model = trainer.model.frozen();
    model.use_bias = c.eval.use_bias;
    Ok(model)
}

fn finish_eval(c: &RunConfig, report: EvalReport) -> Result<()> {
    c.write_resolved()?;
    write_file(&c.out.join("report.csv"), &reports_csv(std::slice::from_ref(&report)))?;
    println!(
        "{} {} = {:.4} ({} items, {} skipped)",
        report.dataset, report.metric, report.value, report.items, report.skipped
    );
    Ok(())
}

fn corrupt_groups(schema: &GroupSchema, labels: &[String]) -> Result<Vec<usize>> {
    if labels.is_empty() {
        return Ok((0..schema.arity()).collect());
    }
    labels.iter().map(|l| schema.index_of(l)).collect()
}

fn cmd_eval_pseudo(c: &RunConfig) -> Result<()> {
    let model = load_frozen(c)?;
    let path = required(&c.eval.dataset, "test tuples (--dataset)")?;
    let loaded = load_tuples(path, model.schema(), c.data.strict)?;
    let test = TupleDataset::encode(&loaded.tuples, model.vocab());
    let roles = corrupt_groups(model.schema(), &c.eval.corrupt)?;
    let mut report = pseudo_disambiguation(&model, &test, &roles, c.eval.seed)?;
    report.skipped = test.dropped() * roles.len();
    finish_eval(c, report)
}

fn cmd_eval_event_sim(c: &RunConfig) -> Result<()> {
    let kind: CompositionKind = c.eval.composition.parse()?;
    let dataset = SimilarityDataset::load(required(&c.eval.dataset, "dataset (--dataset)")?)?;
    let model = load_frozen(c)?;
    finish_eval(c, event_similarity_eval(&model, &dataset, kind)?)
}

fn cmd_eval_thematic(c: &RunConfig) -> Result<()> {
    let mut dataset = ThematicFitDataset::load(required(&c.eval.dataset, "dataset (--dataset)")?)?;
    if !c.eval.role.is_empty() {
        dataset = dataset.filter_role(c.eval.role.parse()?);
    }
    let model = load_frozen(c)?;
    finish_eval(c, thematic_fit_eval(&model, &dataset)?)
}

fn cmd_nn(c: &RunConfig) -> Result<()> {
    if c.query.word.is_empty() {
        return Err(Error::Config("no query word (--word)".into()));
    }
    let model = load_frozen(c)?;
    let targets: Vec<&str> = if c.query.targets.is_empty() {
        vec![c.query.group.as_str()]
    } else {
        c.query.targets.iter().map(String::as_str).collect()
    };
    let found = nearest_neighbors_multi(&model, &c.query.word, &c.query.group, &targets, c.query.k)?;
    let mut text = String::from("rank\tword\tgroup\tcosine\n");
    for (i, n) in found.iter().enumerate() {
        text.push_str(&format!("{}\t{}\t{}\t{}\n", i + 1, n.word, n.group, n.score));
        println!("{:>3}  {} ({})  {:.4}", i + 1, n.word, n.group, n.score);
    }
    c.write_resolved()?;
    write_file(&c.out.join("nn.tsv"), &text)
}

/// `x` with 6 significant digits, in the shortest of fixed or exponent form.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        let (mantissa, _) = sci.split_at(sci.find('e').expect("exponent"));
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let fixed = format!("{:.*}", (5 - exp) as usize, x);
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

/// Text vectors: a `<rows> <d>` header, then `word f1 .. fd` per row.
pub fn vectors_text(words: &[&str], matrix: ndarray::ArrayView2<f64>) -> String {
    let mut text = format!("{} {}\n", matrix.nrows(), matrix.ncols());
    for (word, row) in words.iter().zip(matrix.rows()) {
        text.push_str(word);
        for x in row {
            text.push(' ');
            text.push_str(&format_sig6(*x));
        }
        text.push('\n');
    }
    text
}

/// Writes `<dir>/<label>.vectors.txt` for every group and returns the paths.
pub fn export_vectors(model: &FrozenModel, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for g in 0..model.schema().arity() {
        let space = model.space(g);
        let words: Vec<&str> = model.vocab().group(g).words().iter().map(String::as_str).collect();
        let path = dir.join(format!("{}.vectors.txt", space.label));
        write_file(&path, &vectors_text(&words, space.matrix.view()))?;
        paths.push(path);
    }
    Ok(paths)
}

fn cmd_export(c: &RunConfig) -> Result<()> {
    let model = load_frozen(c)?;
    c.write_resolved()?;
    for p in export_vectors(&model, &c.out.join("vectors"))? {
        println!("{}", p.display());
    }
    Ok(())
}

/// One trained variant of the directionality demo.
#[derive(Debug, Clone)]
pub struct DemoRow {
    pub variant: &'static str,
    pub directions: Vec<String>,
    pub purity: f64,
    pub model: FrozenModel,
}

/// Trains the item-to-cluster, cluster-to-item and multidirectional variants
/// on one synthetic assignment and measures item-vector purity for each.
pub fn demo_directionality(demo: &DemoConfig, base: &TrainConfig) -> Result<(crate::corpus::SyntheticAssignment, Vec<DemoRow>)> {
    let assignment = gen_synthetic_assignment(demo.items, demo.clusters, demo.data_seed, AssignmentMode::Uniform)?;
    let (vocab, dataset) = assignment.encode()?;
    let variants: [(&'static str, Vec<String>); 3] = [
        ("n-to-1", vec!["A->B".into()]),
        ("1-to-n", vec!["B->A".into()]),
        ("multidirectional", Vec::new()),
    ];
    let mut rows = Vec::new();
    for (variant, directions) in variants {
        let config = TrainConfig {
            epochs: demo.epochs,
            batch_size: demo.batch_size,
            schedule: Schedule::Sync,
            sharing: Sharing::Shared,
            directions: directions.clone(),
            ..base.clone()
        };
        let mut trainer = Trainer::new(vocab.clone(), config)?;
        trainer.run(&dataset)?;
        let model = trainer.model.frozen();
        let purity = cluster_purity(&model, &assignment, "A")?;
        log::info!("{variant}: purity {purity}");
        rows.push(DemoRow {
            variant,
            directions: if directions.is_empty() {
                vec!["A->B".into(), "B->A".into()]
            } else {
                directions
            },
            purity,
            model,
        });
    }
    Ok((assignment, rows))
}

fn cmd_demo(c: &RunConfig) -> Result<()> {
    c.train.validate()?;
    let (assignment, rows) = demo_directionality(&c.demo, &c.train)?;
    c.write_resolved()?;
    let mut table = String::from("variant,directions,purity\n");
    for row in &rows {
        table.push_str(&format!("{},{},{}\n", row.variant, row.directions.join(" "), row.purity));
        let items: Vec<&str> = assignment.item_words.iter().map(String::as_str).collect();
        let vocab = row.model.vocab().group(0);
        let ids = items.iter().map(|w| vocab.lookup(w)).collect::<Result<Vec<_>>>()?;
        let matrix = row.model.space(0).matrix.select(ndarray::Axis(0), &ids);
        write_file(&c.out.join(format!("vectors/{}.A.txt", row.variant)), &vectors_text(&items, matrix.view()))?;
        println!("{:<17} {:.4}", row.variant, row.purity);
    }
    let mut labels = String::from("item\tcluster\n");
    for (w, k) in assignment.item_words.iter().zip(&assignment.assignment) {
        labels.push_str(&format!("{w}\t{k}\n"));
    }
    write_file(&c.out.join("clusters.tsv"), &labels)?;
    write_file(&c.out.join("purity.csv"), &table)
}

fn cmd_ablate(c: &RunConfig) -> Result<()> {
    c.train.validate()?;
    let grid = if c.ablate.grid.is_empty() {
        Regime::ALL.to_vec()
    } else {
        c.ablate.grid.iter().map(|g| g.parse()).collect::<Result<Vec<Regime>>>()?
    };
    let (vocab, train, test) = if c.ablate.synthetic {
        let data = gen_synthetic_svo(50, 10, 40, 3, 20_000, c.ablate.synthetic_seed)?;
        let (train, test) = data.dataset.split(c.data.held_out, c.data.split_seed);
        (data.vocab, train, test)
    } else {
        load_corpus(c)?
    };
    if test.is_empty() {
        return Err(Error::Config("ablation needs held-out records (set held_out > 0)".into()));
    }
    let roles = corrupt_groups(vocab.schema(), &c.eval.corrupt)?;
    let rows = ablate(&train, &test, &vocab, &c.train, &grid, &roles, c.eval.seed);
    c.write_resolved()?;
    write_file(&c.out.join("ablation.csv"), &ablation_csv(&rows))?;
    for row in &rows {
        match &row.report {
            Ok(r) => println!("{:<13} {:.4}", row.regime, r.value),
            Err(e) => println!("{:<13} failed: {e}", row.regime),
        }
    }
    if rows.iter().all(|r| r.report.is_err()) {
        return Err(Error::Config("every ablation cell failed".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(-12.3456789), "-12.3457");
        assert_eq!(format_sig6(1.5e-7), "1.5e-7");
        assert_eq!(format_sig6(123456789.0), "1.23457e8");
        assert_eq!(format_sig6(0.00999999999), "0.01");
        for x in [0.0123456, -0.987654, 3.14159265, 1e-6 + 3e-12] {
            let back: f64 = format_sig6(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-6 * x.abs());
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        fs::write(&cfg, "[train]\nepochs = 7\ndim = 4\n[data]\ngroups = \"S,V\"\n").unwrap();
        let cli = Cli::try_parse_from([
            "funcspace",
            "--config",
            cfg.to_str().unwrap(),
            "train",
            "--epochs",
            "2",
            "--seed",
            "9",
        ])
        .unwrap();
        let c = resolve(&cli).unwrap();
        assert_eq!((c.train.epochs, c.train.dim, c.train.seed), (2, 4, 9));
        assert_eq!(c.data.groups, "S,V");
        assert_eq!(c.command, "train");
        assert_eq!(RunConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[train]\nepoch = 3\n").is_err());
        assert!(RunConfig::from_toml("colour = 1\n").is_err());
    }

    #[test]
    fn defaults_follow_the_training_recipe() {
        let c = RunConfig::default();
        assert_eq!(c.train.batch_size, 128);
        assert_eq!(c.train.learning_rate, 0.001);
        assert_eq!(c.train.clip_norm, 5.0);
        assert_eq!(c.train.dim, 25);
    }

    #[test]
    fn unknown_composition_lists_all_kinds() {
        let err = Cli::try_parse_from(["funcspace", "eval", "event-sim", "--composition", "tensor"]).unwrap_err();
        let msg = err.to_string();
        for k in CompositionKind::ALL {
            assert!(msg.contains(k.name()), "{msg}");
        }
    }

    #[test]
    fn export_layout() {
        let m = ndarray::array![[0.5, -1.25], [1e-7, 3.0], [0.1, 0.2]];
        let text = vectors_text(&["a", "b", "c"], m.view());
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next(), Some("3 2"));
        assert_eq!(text.lines().nth(2), Some("b 1e-7 3"));
    }
}
