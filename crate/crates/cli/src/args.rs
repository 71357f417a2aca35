use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "humscribe", version, about = "Transcribe hummed melodies into notes")]
pub struct Cli {
    /// Worker threads for directory inputs (default: number of processors).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Repair onset/offset labels from the audio envelope, keeping files whose note count matches.
    Annotate(AnnotateArgs),
    /// Compute a log-affinity matrix from audio and store it as AFF1.
    Features(FeaturesArgs),
    /// Decode an AFF1 matrix into notes.
    Decode(DecodeArgs),
    /// Score estimated notes against references.
    Evaluate(EvaluateArgs),
    /// Render a JSON note list as a hum-like WAV file.
    Synth(SynthArgs),
    /// Run features and decoding, writing every intermediate file.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("counts_source").required(true).args(["counts", "counts_from_midi"])))]
pub struct AnnotateArgs {
    /// A WAV file or a directory of WAV files.
    #[arg(long)]
    pub wav: PathBuf,
    /// Lines of "filename count".
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Directory of reference MIDI files; each file's note count is used.
    #[arg(long)]
    pub counts_from_midi: Option<PathBuf>,
    /// Threshold fractions to try, in order.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50.0)]
    pub min_note_ms: f64,
    #[arg(long, default_value_t = 30.0)]
    pub min_silence_ms: f64,
    /// Write sample indices instead of seconds.
    #[arg(long)]
    pub emit_samples: bool,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub wav: PathBuf,
    #[arg(long, default_value_t = 32.70)]
    pub fmin_hz: f64,
    #[arg(long, default_value_t = 3)]
    pub bins_per_semitone: usize,
    #[arg(long, default_value_t = 7)]
    pub octaves: usize,
    /// Hop size in samples at the analysis rate.
    #[arg(long, default_value_t = 256)]
    pub hop: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,3,4,5,6,7")]
    pub harmonics: Vec<f64>,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub aff: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub min_note_frames: usize,
    /// Decode independently between silent stretches of at least this many frames.
    #[arg(long)]
    pub chunk_silence_frames: Option<usize>,
    /// Output `.mid` or `.json`; repeat to write both.
    #[arg(short = 'o', long = "output", required = true)]
    pub output: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Records,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Reference note file or directory.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Estimated note file or directory; files pair with references by stem.
    #[arg(long)]
    pub est: PathBuf,
    #[arg(long, default_value_t = 50.0)]
    pub onset_tol_ms: f64,
    #[arg(long, default_value_t = 1.0)]
    pub pitch_tol_cents: f64,
    #[arg(long)]
    pub octave_invariant: bool,
    /// Ignore onsets and match on pitch alone.
    #[arg(long)]
    pub notes_only: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub notes: PathBuf,
    /// Standard deviation of added white noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 22050)]
    pub sample_rate: u32,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// A WAV file or a directory of WAV files.
    #[arg(long)]
    pub wav: PathBuf,
    /// Reference notes (file, or directory paired by stem) to score against.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub min_note_frames: usize,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}
