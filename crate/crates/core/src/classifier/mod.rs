//! Next-word classifier port and its implementations.
//!
//! A classifier maps a composed canvas to one class index. The decoder only
//! sees this trait; behind it sit either the in-process [`MemorizingModel`]
//! or a [`SubprocessClassifier`] that forwards canvases to an external model
//! over the length-prefixed wire protocol in [`wire`].

mod memorizing;
mod subprocess;
pub mod wire;

pub use memorizing::{
    featurize, Features, MemorizingModel, FEATURE_BLOCK, FEATURE_LEN, FEATURE_SIDE,
};
pub use subprocess::{SubprocessClassifier, DEFAULT_TIMEOUT};

use crate::error::Result;
use crate::raster::Canvas;

pub trait NextWordClassifier {
    /// Class index of the next word for `canvas`.
    fn predict(&mut self, canvas: &Canvas) -> Result<usize>;
}

/// Adapts a closure into a classifier.
pub struct FnClassifier<F>(pub F);

impl<F> NextWordClassifier for FnClassifier<F>
where
    F: FnMut(&Canvas) -> Result<usize>,
{
    fn predict(&mut self, canvas: &Canvas) -> Result<usize> {
        (self.0)(canvas)
    }
}

impl<C: NextWordClassifier + ?Sized> NextWordClassifier for Box<C> {
    fn predict(&mut self, canvas: &Canvas) -> Result<usize> {
        (**self).predict(canvas)
    }
}
