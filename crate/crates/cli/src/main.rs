//! `supercap` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 classifier or transport
//! error. Log verbosity comes from `SUPERCAP_LOG` (env_logger syntax).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Parser, Subcommand};
use supercap::classifier::{wire, MemorizingModel, NextWordClassifier, SubprocessClassifier};
use supercap::dataset::{self, read_captions, select_all, tokenize, Vocabulary};
use supercap::fsutil::write_atomic;
use supercap::{compose, generate_caption, CompositionConfig, Error, GlyphFont, Raster};

const EXIT_INPUT: u8 = 2;
const EXIT_CLASSIFIER: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "supercap",
    version,
    about = "SuperCaptioning canvases, datasets and greedy decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compose one SuperCaptioning canvas and write it as PNG.
    Render {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        caption: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate labeled next-word training canvases from a caption file.
    Dataset {
        #[arg(long)]
        captions: PathBuf,
        #[arg(long)]
        images_dir: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write the vocabulary of the selected captions.
    Vocab {
        #[arg(long)]
        captions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Caption an image by greedy next-word decoding.
    #[command(group(ArgGroup::new("classifier").required(true).args(["nn_model", "classifier_cmd"])))]
    Decode {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        /// Dataset directory (labels.tsv + canvases/) to memorize.
        #[arg(long)]
        nn_model: Option<PathBuf>,
        /// External classifier speaking the wire protocol on stdin/stdout.
        #[arg(long)]
        classifier_cmd: Option<String>,
        /// Per-request classifier timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
    },
    /// Serve a memorizing classifier over the wire protocol on stdin/stdout.
    ServeNn {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        canvas_dir: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_classifier_failure() {
            EXIT_CLASSIFIER
        } else {
            EXIT_INPUT
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn require_file(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(input_error(format!(
            "{what} {} does not exist or is not a file",
            path.display()
        )))
    }
}

fn require_dir(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(input_error(format!(
            "{what} {} does not exist or is not a directory",
            path.display()
        )))
    }
}

fn require_parent(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => require_dir(p, "output directory"),
        _ => Ok(()),
    }
}

fn render(image: &Path, caption: &str, out: &Path) -> Result<(), Failure> {
    require_file(image, "image")?;
    require_parent(out)?;
    let config = CompositionConfig::default();
    let tokens = tokenize(caption);
    if tokens.len() > config.cut_length {
        return Err(input_error(format!(
            "caption has {} tokens; at most {} fit on the canvas",
            tokens.len(),
            config.cut_length
        )));
    }
    let image = Raster::load(image)?;
    let canvas = compose(&image, &tokens, &config, &GlyphFont::embedded())?;
    write_atomic(out, &canvas.encode_png()?)?;
    Ok(())
}

fn make_dataset(captions: &Path, images_dir: &Path, out_dir: &Path) -> Result<(), Failure> {
    require_file(captions, "caption file")?;
    require_dir(images_dir, "images directory")?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| input_error(format!("cannot create {}: {e}", out_dir.display())))?;
    let records = read_captions(captions)?;
    let summary = dataset::write_dataset(
        &records,
        images_dir,
        out_dir,
        &CompositionConfig::default(),
        &GlyphFont::embedded(),
    )?;
    println!(
        "images: {} kept, {} dropped, {} skipped; examples: {}; vocab size: {}",
        summary.images_kept,
        summary.images_dropped,
        summary.images_skipped,
        summary.examples_written,
        summary.vocab_size
    );
    Ok(())
}

fn make_vocab(captions: &Path, out: &Path) -> Result<(), Failure> {
    require_file(captions, "caption file")?;
    require_parent(out)?;
    let records = read_captions(captions)?;
    let (kept, dropped) = select_all(&records);
    let selected: Vec<Vec<String>> = kept.into_iter().map(|(_, t)| t).collect();
    let vocab = Vocabulary::build(&selected)?;
    write_atomic(out, vocab.to_file_string().as_bytes())?;
    println!(
        "images: {} kept, {dropped} dropped; vocab size: {}",
        selected.len(),
        vocab.len()
    );
    Ok(())
}

fn decode(
    image: &Path,
    vocab: &Path,
    nn_model: Option<&Path>,
    classifier_cmd: Option<&str>,
    timeout: Duration,
) -> Result<(), Failure> {
    require_file(image, "image")?;
    require_file(vocab, "vocab file")?;
    let vocab = Vocabulary::load(vocab)?;
    let image = Raster::load(image)?;
    let mut classifier: Box<dyn NextWordClassifier> = match (nn_model, classifier_cmd) {
        (Some(dir), None) => {
            require_dir(dir, "model directory")?;
            let (labels, canvases) = dataset::dataset_paths(dir);
            Box::new(MemorizingModel::from_labels(&labels, &canvases)?)
        }
        (None, Some(cmd)) => Box::new(
            SubprocessClassifier::spawn(cmd, vocab.len(), timeout).map_err(|e| match e {
                Error::InvalidArgument(m) => input_error(m),
                other => other.into(),
            })?,
        ),
        _ => {
            return Err(input_error(
                "give exactly one of --nn-model or --classifier-cmd",
            ))
        }
    };
    let result = generate_caption(
        &image,
        &mut classifier,
        &vocab,
        &CompositionConfig::default(),
        &GlyphFont::embedded(),
    )?;
    drop(classifier);
    log::info!(
        "decoded in {} steps, terminated by {:?}",
        result.steps,
        result.terminated_by
    );
    println!("{}", result.caption());
    Ok(())
}

fn serve_nn(labels: &Path, canvas_dir: &Path) -> Result<(), Failure> {
    require_file(labels, "labels file")?;
    require_dir(canvas_dir, "canvas directory")?;
    let model = MemorizingModel::from_labels(labels, canvas_dir)?;
    log::info!("serving {} memorized canvases", model.len());
    let served = wire::serve(
        &model,
        &mut std::io::stdin().lock(),
        &mut std::io::stdout().lock(),
    );
    match served {
        Ok(n) => {
            log::info!("served {n} requests");
            Ok(())
        }
        Err(e) => Err(Failure {
            code: EXIT_CLASSIFIER,
            message: e.to_string(),
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SUPERCAP_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Render {
            image,
            caption,
            out,
        } => render(image, caption, out),
        Command::Dataset {
            captions,
            images_dir,
            out_dir,
        } => make_dataset(captions, images_dir, out_dir),
        Command::Vocab { captions, out } => make_vocab(captions, out),
        Command::Decode {
            image,
            vocab,
            nn_model,
            classifier_cmd,
            timeout_secs,
        } => decode(
            image,
            vocab,
            nn_model.as_deref(),
            classifier_cmd.as_deref(),
            Duration::from_secs(*timeout_secs),
        ),
        Command::ServeNn { labels, canvas_dir } => serve_nn(labels, canvas_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("supercap: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
