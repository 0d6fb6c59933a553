//! Caption ingestion, caption selection, vocabulary construction and
//! generation of labeled next-word training examples.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::canvas::{Composer, CompositionConfig};
use crate::error::{Error, Result};
use crate::font::GlyphFont;
use crate::fsutil::write_atomic;
use crate::raster::Raster;

pub const EOS_TOKEN: &str = "</s>";
pub const EOS_INDEX: usize = 0;

/// Captions shorter than this many tokens are eligible for training.
pub const MAX_CAPTION_TOKENS_EXCLUSIVE: usize = 14;

pub const VOCAB_FILE: &str = "vocab.txt";
pub const LABELS_FILE: &str = "labels.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CANVAS_DIR: &str = "canvases";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptionRecord {
    pub image_id: String,
    pub captions: Vec<String>,
}

fn is_token_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '\'' || c == '-'
}

/// Split on whitespace and trim characters outside `[A-Za-z0-9'-]` from both
/// ends of each piece. Case is preserved; pieces that trim to nothing are
/// dropped.
pub fn tokenize(caption: &str) -> Vec<String> {
    caption
        .split_whitespace()
        .map(|piece| piece.trim_matches(|c: char| !is_token_char(c)))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Parse a Flickr30k-style token file: `<image_id>#<n>\t<caption>` per line.
///
/// Records come back in order of first appearance; captions within a record
/// are ordered by caption number.
pub fn parse_captions(text: &str, source: &Path) -> Result<Vec<CaptionRecord>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_id: HashMap<String, Vec<(u32, String)>> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let err = |msg: &str| Error::Parse {
            path: source.to_owned(),
            line: lineno + 1,
            msg: msg.to_owned(),
        };
        if line.trim().is_empty() {
            continue;
        }
        let (key, caption) = line
            .split_once('\t')
            .ok_or_else(|| err("missing tab separator"))?;
        let (image_id, number) = key
            .rsplit_once('#')
            .ok_or_else(|| err("missing '#<caption_number>'"))?;
        let number: u32 = number
            .parse()
            .map_err(|_| err("caption number is not an integer"))?;
        if image_id.is_empty() {
            return Err(err("empty image id"));
        }
        if image_id.contains(['/', '\\']) || image_id == "." || image_id == ".." {
            return Err(err("image id must be a plain file name"));
        }
        let entry = by_id.entry(image_id.to_owned()).or_insert_with(|| {
            order.push(image_id.to_owned());
            Vec::new()
        });
        entry.push((number, caption.to_owned()));
    }
    Ok(order
        .into_iter()
        .map(|image_id| {
            let mut caps = by_id.remove(&image_id).unwrap_or_default();
            caps.sort_by_key(|(n, _)| *n);
            CaptionRecord {
                image_id,
                captions: caps.into_iter().map(|(_, c)| c).collect(),
            }
        })
        .collect())
}

pub fn read_captions(path: &Path) -> Result<Vec<CaptionRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_captions(&text, path)
}

/// Longest caption with fewer than 14 tokens; the earliest wins a tie.
/// `None` means the image is dropped.
pub fn select_caption(record: &CaptionRecord) -> Option<Vec<String>> {
    let mut best: Option<Vec<String>> = None;
    for tokens in record.captions.iter().map(|c| tokenize(c)) {
        if tokens.len() >= MAX_CAPTION_TOKENS_EXCLUSIVE {
            continue;
        }
        if best.as_ref().is_none_or(|b| tokens.len() > b.len()) {
            best = Some(tokens);
        }
    }
    best
}

/// Class index ↔ token map. Index 0 is the end-of-sentence class, the rest
/// are corpus tokens in byte order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    fn from_sorted(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { tokens, index }
    }

    pub fn build<S: AsRef<str>>(captions: &[Vec<S>]) -> Result<Self> {
        if captions.is_empty() {
            return Err(Error::invalid(
                "cannot build a vocabulary from an empty corpus",
            ));
        }
        let mut distinct = BTreeSet::new();
        for token in captions.iter().flatten() {
            let token = token.as_ref();
            if token.is_empty() || token == EOS_TOKEN || token.contains(char::is_whitespace) {
                return Err(Error::invalid(format!(
                    "{token:?} cannot be a vocabulary token"
                )));
            }
            distinct.insert(token);
        }
        let tokens = std::iter::once(EOS_TOKEN)
            .chain(distinct)
            .map(str::to_owned)
            .collect();
        Ok(Self::from_sorted(tokens))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token_at(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// One token per line; the line number is the class index.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        for t in &self.tokens {
            s.push_str(t);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::Parse {
            path: source.to_owned(),
            line,
            msg: msg.to_owned(),
        };
        let tokens: Vec<String> = text.lines().map(str::to_owned).collect();
        match tokens.first() {
            Some(t) if t == EOS_TOKEN => {}
            _ => return Err(err(1, "first line must be the end-of-sentence token </s>")),
        }
        for (i, pair) in tokens[1..].windows(2).enumerate() {
            if pair[0] >= pair[1] {
                return Err(err(i + 3, "tokens must be unique and in byte order"));
            }
        }
        for (i, t) in tokens.iter().enumerate().skip(1) {
            if t.is_empty() || t == EOS_TOKEN || t.contains(char::is_whitespace) {
                return Err(err(i + 1, "invalid token"));
            }
        }
        Ok(Self::from_sorted(tokens))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrainingExample {
    pub image_id: String,
    pub prefix_len: usize,
    pub label_index: usize,
    pub label_token: String,
}

impl TrainingExample {
    pub fn canvas_filename(&self) -> String {
        canvas_filename(&self.image_id, self.prefix_len)
    }
}

pub fn canvas_filename(image_id: &str, prefix_len: usize) -> String {
    format!("{image_id}_{prefix_len}.png")
}

/// One example per prefix of `tokens`: the prefix of length `k` is labeled
/// with `tokens[k]`, and the full caption is labeled end-of-sentence.
pub fn generate_examples<S: AsRef<str>>(
    image_id: &str,
    tokens: &[S],
    vocab: &Vocabulary,
    cut_length: usize,
) -> Result<Vec<TrainingExample>> {
    if tokens.len() >= cut_length {
        return Err(Error::invalid(format!(
            "caption of {} tokens leaves no room for end-of-sentence within cut-length {cut_length}",
            tokens.len()
        )));
    }
    let labels = tokens
        .iter()
        .map(|t| t.as_ref())
        .chain(std::iter::once(EOS_TOKEN));
    labels
        .enumerate()
        .map(|(prefix_len, label)| {
            let label_index = vocab
                .index_of(label)
                .ok_or_else(|| Error::OutOfVocabulary(label.to_owned()))?;
            Ok(TrainingExample {
                image_id: image_id.to_owned(),
                prefix_len,
                label_index,
                label_token: label.to_owned(),
            })
        })
        .collect()
}

/// One line of the labels file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub canvas_filename: String,
    pub prefix_len: usize,
    pub label_index: usize,
    pub label_token: String,
}

impl LabelRow {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\n",
            self.canvas_filename, self.prefix_len, self.label_index, self.label_token
        )
    }
}

impl From<&TrainingExample> for LabelRow {
    fn from(e: &TrainingExample) -> Self {
        LabelRow {
            canvas_filename: e.canvas_filename(),
            prefix_len: e.prefix_len,
            label_index: e.label_index,
            label_token: e.label_token.clone(),
        }
    }
}

pub fn parse_labels(text: &str, source: &Path) -> Result<Vec<LabelRow>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let err = |msg: &str| Error::Parse {
                path: source.to_owned(),
                line: i + 1,
                msg: msg.to_owned(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let [file, prefix, index, token] = fields[..] else {
                return Err(err("expected 4 tab-separated fields"));
            };
            Ok(LabelRow {
                canvas_filename: file.to_owned(),
                prefix_len: prefix.parse().map_err(|_| err("bad prefix length"))?,
                label_index: index.parse().map_err(|_| err("bad label index"))?,
                label_token: token.to_owned(),
            })
        })
        .collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<LabelRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, path)
}

/// Selected captions of all records that survive the length filter, keyed by
/// image id, plus the number of dropped records.
pub fn select_all(records: &[CaptionRecord]) -> (Vec<(String, Vec<String>)>, usize) {
    let mut kept = Vec::new();
    let mut dropped = 0;
    for r in records {
        match select_caption(r) {
            Some(tokens) => kept.push((r.image_id.clone(), tokens)),
            None => dropped += 1,
        }
    }
    (kept, dropped)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DatasetSummary {
    pub images_total: usize,
    pub images_kept: usize,
    pub images_dropped: usize,
    pub images_skipped: usize,
    pub skipped_ids: Vec<String>,
    pub examples_written: usize,
    pub vocab_size: usize,
}

/// Compose and write every training canvas for the records that survive the
/// caption filter, together with `vocab.txt`, `labels.tsv` and
/// `manifest.json`. Canvases go to `<out_dir>/canvases/`.
///
/// The vocabulary is built from all selected captions before any image is
/// read. Images that fail to load are skipped with a warning. Output order is
/// by image id, so reruns produce identical bytes.
pub fn write_dataset(
    records: &[CaptionRecord],
    images_dir: &Path,
    out_dir: &Path,
    config: &CompositionConfig,
    font: &GlyphFont,
) -> Result<DatasetSummary> {
    config.validate()?;
    let (mut kept, dropped) = select_all(records);
    if kept.is_empty() {
        return Err(Error::invalid("no caption survives the length filter"));
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    let captions: Vec<Vec<String>> = kept.iter().map(|(_, t)| t.clone()).collect();
    let vocab = Vocabulary::build(&captions)?;

    let canvas_dir = out_dir.join(CANVAS_DIR);
    fs::create_dir_all(&canvas_dir).map_err(|e| Error::io(&canvas_dir, e))?;

    let outcomes: Vec<Result<Vec<LabelRow>>> = kept
        .par_iter()
        .map(|(image_id, tokens)| {
            let examples = generate_examples(image_id, tokens, &vocab, config.cut_length)?;
            let image = Raster::load(&images_dir.join(image_id))?;
            let composer = Composer::new(&image, config, font)?;
            examples
                .iter()
                .map(|ex| {
                    let canvas = composer.compose(&tokens[..ex.prefix_len])?;
                    write_atomic(
                        &canvas_dir.join(ex.canvas_filename()),
                        &canvas.encode_png()?,
                    )?;
                    Ok(LabelRow::from(ex))
                })
                .collect()
        })
        .collect();

    let mut summary = DatasetSummary {
        images_total: records.len(),
        images_dropped: dropped,
        vocab_size: vocab.len(),
        ..Default::default()
    };
    let mut labels = String::new();
    for ((image_id, _), outcome) in kept.iter().zip(outcomes) {
        match outcome {
            Ok(rows) => {
                summary.images_kept += 1;
                summary.examples_written += rows.len();
                rows.iter().for_each(|r| labels.push_str(&r.to_line()));
            }
            Err(e @ (Error::Image(_) | Error::Io { .. })) => {
                log::warn!("skipping {image_id}: {e}");
                summary.images_skipped += 1;
                summary.skipped_ids.push(image_id.clone());
            }
            Err(e) => return Err(e),
        }
    }

    write_atomic(&out_dir.join(VOCAB_FILE), vocab.to_file_string().as_bytes())?;
    write_atomic(&out_dir.join(LABELS_FILE), labels.as_bytes())?;
    let manifest = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_atomic(
        &out_dir.join(MANIFEST_FILE),
        format!("{manifest}\n").as_bytes(),
    )?;
    Ok(summary)
}

/// Resolve a canvas directory and labels file the way `write_dataset` lays
/// them out.
pub fn dataset_paths(out_dir: &Path) -> (PathBuf, PathBuf) {
    (out_dir.join(LABELS_FILE), out_dir.join(CANVAS_DIR))
}
