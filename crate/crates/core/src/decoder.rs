//! Greedy caption decoding.
//!
//! Starting from an empty caption, each step composes the canvas for the
//! caption so far, asks the classifier for the next word and appends it. The
//! loop ends when the classifier answers end-of-sentence or the caption
//! reaches the cut-length.

use crate::canvas::{Composer, CompositionConfig};
use crate::classifier::NextWordClassifier;
use crate::dataset::{Vocabulary, EOS_INDEX};
use crate::error::{Error, Result};
use crate::font::GlyphFont;
use crate::raster::Raster;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Eos,
    CutLength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub tokens: Vec<String>,
    pub terminated_by: Termination,
    /// Number of classifier calls made.
    pub steps: usize,
}

impl DecodeResult {
    pub fn caption(&self) -> String {
        self.tokens.join(" ")
    }
}

pub fn generate_caption<C: NextWordClassifier + ?Sized>(
    image: &Raster,
    classifier: &mut C,
    vocab: &Vocabulary,
    config: &CompositionConfig,
    font: &GlyphFont,
) -> Result<DecodeResult> {
    if vocab.is_empty() {
        return Err(Error::invalid("empty vocabulary"));
    }
    let composer = Composer::new(image, config, font)?;
    let mut tokens: Vec<String> = Vec::with_capacity(config.cut_length);
    let mut steps = 0;
    loop {
        let canvas = composer.compose(&tokens)?;
        let index = classifier.predict(&canvas)?;
        steps += 1;
        if index == EOS_INDEX {
            if tokens.is_empty() {
                log::warn!("classifier predicted end-of-sentence first; caption is empty");
            }
            return Ok(DecodeResult {
                tokens,
                terminated_by: Termination::Eos,
                steps,
            });
        }
        let token = vocab.token_at(index).ok_or(Error::IndexOutOfRange {
            index,
            size: vocab.len(),
        })?;
        log::debug!("step {steps}: {index} -> {token:?}");
        tokens.push(token.to_owned());
        if tokens.len() == config.cut_length {
            return Ok(DecodeResult {
                tokens,
                terminated_by: Termination::CutLength,
                steps,
            });
        }
    }
}
