use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poslens::corpus::Label;
use poslens::features::UposDenominator;
use poslens::model::{ClassWeighting, FeaturesPerSplit, MissingValues};
use serde::Serialize;

/// Part-of-speech analysis of two-group text corpora.
#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "poslens", version)]
pub struct RunConfig {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory that receives all outputs; created if missing.
    #[arg(long, global = true, default_value = "poslens-out")]
    pub out_dir: PathBuf,
    /// Format of `--input` corpora.
    #[arg(long, global = true, value_enum, default_value_t = InputFormat::Jsonl)]
    pub format: InputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Jsonl,
    EriskXml,
    Conllu,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tag a corpus and write it as CoNLL-U.
    Tag(CorpusArgs),
    /// Group statistics, keyness and Welch tests; writes the report tables.
    Analyze(AnalyzeArgs),
    /// Train a random forest on a feature matrix and evaluate it.
    TrainEval(TrainEvalArgs),
    /// Shapley attributions for a sample of feature rows.
    Explain(ExplainArgs),
    /// Generate a labeled synthetic corpus and a tagged treebank.
    Synth(SynthArgs),
    /// Train the part-of-speech tagger on a CoNLL-U treebank.
    TrainTagger(TrainTaggerArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tag(_) => "tag",
            Command::Analyze(_) => "analyze",
            Command::TrainEval(_) => "train-eval",
            Command::Explain(_) => "explain",
            Command::Synth(_) => "synth",
            Command::TrainTagger(_) => "train-tagger",
        }
    }
}

/// A corpus location, optionally prefixed with the label of all its
/// documents: `target=posts/` or `control=other.conllu`.
#[derive(Clone, Debug, PartialEq)]
pub struct InputSpec {
    pub label: Option<Label>,
    pub path: PathBuf,
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.is_empty() {
            return Err("empty input path".into());
        }
        if let Some((prefix, rest)) = s.split_once('=') {
            if let Ok(label) = prefix.parse::<Label>() {
                if rest.is_empty() {
                    return Err(format!("no path after '{prefix}='"));
                }
                return Ok(InputSpec {
                    label: Some(label),
                    path: rest.into(),
                });
            }
        }
        Ok(InputSpec {
            label: None,
            path: s.into(),
        })
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Some(l) => write!(f, "{l}={}", self.path.display()),
            None => write!(f, "{}", self.path.display()),
        }
    }
}

impl Serialize for InputSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CorpusArgs {
    /// Corpus file or directory, as PATH or LABEL=PATH. Repeatable.
    #[arg(long = "input", short = 'i', required = true)]
    pub inputs: Vec<InputSpec>,
    /// Tagger model; required unless the input is CoNLL-U.
    #[arg(long)]
    pub tagger: Option<PathBuf>,
    /// Only a verb directly after a modal counts as future.
    #[arg(long)]
    pub strict_md: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// Tokens other than punctuation, symbols, numbers and unknown.
    Content,
    /// Every token.
    AllTags,
}

impl From<Denominator> for UposDenominator {
    fn from(d: Denominator) -> Self {
        match d {
            Denominator::Content => UposDenominator::Content,
            Denominator::AllTags => UposDenominator::AllTags,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Average post features per user before comparing groups.
    #[arg(long)]
    pub per_user: bool,
    /// Minimum combined count for a word to enter the keyness lists.
    #[arg(long, default_value_t = poslens::stats::DEFAULT_MIN_TOTAL)]
    pub keyness_min_count: u64,
    /// Words kept per keyness list.
    #[arg(long, default_value_t = 20)]
    pub keyness_top_k: usize,
    /// Count lemmas instead of word forms where the input provides them.
    #[arg(long)]
    pub lemma: bool,
    /// Denominator of the part-of-speech frequencies.
    #[arg(long, value_enum, default_value_t = Denominator::Content)]
    pub denominator: Denominator,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TrainEvalArgs {
    /// Feature matrix written by `analyze`.
    #[arg(long)]
    pub train: PathBuf,
    /// Separate test matrix; without it a stratified split of `--train` is used.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 50)]
    pub n_trees: usize,
    #[arg(long, default_value_t = 15)]
    pub max_depth: usize,
    /// balanced or uniform.
    #[arg(long, default_value_t = ClassWeighting::Balanced)]
    pub class_weighting: ClassWeighting,
    /// sqrt, all, or a count.
    #[arg(long, default_value_t = FeaturesPerSplit::Sqrt)]
    pub features_per_split: FeaturesPerSplit,
    #[arg(long, default_value_t = 1)]
    pub min_samples_leaf: usize,
    /// median or drop-rows.
    #[arg(long, default_value_t = MissingValues::Median)]
    pub missing: MissingValues,
    /// Target is predicted when its probability reaches this value.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ExplainArgs {
    /// Forest written by `train-eval`.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature matrix to sample rows from.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, default_value_t = 1500)]
    pub sample_size: usize,
    /// Features kept in the per-post attribution export.
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    pub posts_per_group: usize,
    #[arg(long, default_value_t = 10)]
    pub posts_per_user: usize,
    #[arg(long, default_value_t = 150)]
    pub min_tokens: usize,
    #[arg(long, default_value_t = 250)]
    pub max_tokens: usize,
    /// Relative spread of per-post rates around the group rate.
    #[arg(long, default_value_t = 0.2)]
    pub jitter: f64,
    #[arg(long, default_value_t = 0.15)]
    pub target_first_singular: f64,
    #[arg(long, default_value_t = 0.08)]
    pub control_first_singular: f64,
    #[arg(long, default_value_t = 0.02)]
    pub target_propn: f64,
    #[arg(long, default_value_t = 0.06)]
    pub control_propn: f64,
    /// Past, present and future weights, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.4, 0.45, 0.15])]
    pub target_tense_mix: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.4, 0.45, 0.15])]
    pub control_tense_mix: Vec<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub target_adjective_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    pub control_adjective_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    pub target_pp_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    pub control_pp_prob: f64,
    /// Give Target the Control profile, so no difference is planted.
    #[arg(long)]
    pub no_separation: bool,
    /// Sentences in the gold treebank; 0 skips it.
    #[arg(long, default_value_t = 6000)]
    pub treebank_sentences: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TrainTaggerArgs {
    /// CoNLL-U file with gold XPOS tags.
    #[arg(long)]
    pub treebank: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    /// Share of sentences held out for the accuracy estimate.
    #[arg(long, default_value_t = 0.1)]
    pub holdout: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_spec_parsing() {
        let s: InputSpec = "target=a/b".parse().unwrap();
        assert_eq!(s.label, Some(Label::Target));
        assert_eq!(s.path, PathBuf::from("a/b"));
        assert_eq!(s.to_string(), "target=a/b");
        let s: InputSpec = "x=y.jsonl".parse().unwrap();
        assert_eq!(s.label, None);
        assert_eq!(s.path, PathBuf::from("x=y.jsonl"));
        assert!("control=".parse::<InputSpec>().is_err());
    }

    #[test]
    fn parses_defaults() {
        let c = RunConfig::try_parse_from(["poslens", "train-eval", "--train", "f.csv"]).unwrap();
        let Command::TrainEval(a) = c.command else {
            panic!()
        };
        assert_eq!((a.n_trees, a.max_depth, a.threshold), (50, 15, 0.5));
        assert_eq!(a.class_weighting, ClassWeighting::Balanced);
        assert_eq!(c.global.seed, 0);

        let c = RunConfig::try_parse_from([
            "poslens",
            "synth",
            "--seed",
            "4",
            "--control-tense-mix",
            "0.2,0.5,0.3",
        ])
        .unwrap();
        let Command::Synth(a) = c.command else {
            panic!()
        };
        assert_eq!(a.control_tense_mix, vec![0.2, 0.5, 0.3]);
        assert_eq!(c.global.seed, 4);
    }
}
