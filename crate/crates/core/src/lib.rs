//! Deterministic SuperCaptioning toolkit.
//!
//! A caption is produced one word at a time. At each step the input photograph
//! is stretched into the top of a 224×224 canvas and the partial caption is
//! drawn below it, one Squared English Word (SEW) cell per token. The canvas is
//! handed to a next-word classifier and the predicted word is appended until
//! the classifier answers end-of-sentence or the cut-length is reached.
//!
//! Module map:
//!
//! * [`sew_layout`]: glyph-grid geometry of a word inside a square cell.
//! * [`canvas`]: canvas configuration, word rendering and composition.
//! * [`dataset`]: caption parsing, filtering, vocabulary and labeled examples.
//! * [`classifier`]: the next-word classifier port, a memorizing
//!   nearest-neighbor model and an external-process adapter.
//! * [`decoder`]: the greedy caption loop.

pub mod canvas;
pub mod classifier;
pub mod dataset;
pub mod decoder;
mod error;
pub mod font;
pub mod fsutil;
pub mod raster;
pub mod sew_layout;

pub use canvas::{compose, render_word, CompositionConfig};
pub use classifier::{MemorizingModel, NextWordClassifier, SubprocessClassifier};
pub use dataset::{TrainingExample, Vocabulary, EOS_INDEX, EOS_TOKEN};
pub use decoder::{generate_caption, DecodeResult, Termination};
pub use error::{Error, Result};
pub use font::GlyphFont;
pub use raster::{Canvas, Raster, Rgb};
pub use sew_layout::{GlyphPlacement, WordCell, WordLayout};
