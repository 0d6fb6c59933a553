use std::path::Path;

use rayon::prelude::*;

use super::NextWordClassifier;
use crate::dataset::read_labels;
use crate::error::{Error, Result};
use crate::raster::{Canvas, Raster};

pub const FEATURE_SIDE: u32 = 28;
pub const FEATURE_BLOCK: u32 = 8;
pub const FEATURE_LEN: usize = (FEATURE_SIDE * FEATURE_SIDE) as usize;

const CANVAS_SIDE: u32 = FEATURE_SIDE * FEATURE_BLOCK;

/// 28×28 grayscale thumbnail of a canvas, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Features(pub Box<[u8; FEATURE_LEN]>);

impl Features {
    pub fn squared_distance(&self, other: &Features) -> u64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| {
                let d = a as i64 - b as i64;
                (d * d) as u64
            })
            .sum()
    }
}

/// Area-average a 224×224 canvas over 8×8 blocks. Each feature is the block
/// mean of `(R+G+B)/3`, rounded half-up.
pub fn featurize(canvas: &Canvas) -> Result<Features> {
    if canvas.width() != CANVAS_SIDE || canvas.height() != CANVAS_SIDE {
        return Err(Error::invalid(format!(
            "featurize expects a {CANVAS_SIDE}x{CANVAS_SIDE} canvas, got {}x{}",
            canvas.width(),
            canvas.height()
        )));
    }
    let bytes = canvas.as_bytes();
    let mut sums = [0u32; FEATURE_LEN];
    for (y, row) in bytes.chunks_exact(CANVAS_SIDE as usize * 3).enumerate() {
        let block_row = y / FEATURE_BLOCK as usize * FEATURE_SIDE as usize;
        for (x, px) in row.chunks_exact(3).enumerate() {
            sums[block_row + x / FEATURE_BLOCK as usize] +=
                px[0] as u32 + px[1] as u32 + px[2] as u32;
        }
    }
    // 64 pixels × 3 channels per block
    let denom = FEATURE_BLOCK * FEATURE_BLOCK * 3;
    let mut out = Box::new([0u8; FEATURE_LEN]);
    for (o, s) in out.iter_mut().zip(sums) {
        *o = ((s + denom / 2) / denom) as u8;
    }
    Ok(Features(out))
}

/// Nearest-neighbor model that remembers every training canvas.
#[derive(Debug, Clone, Default)]
pub struct MemorizingModel {
    entries: Vec<(Features, usize)>,
}

impl MemorizingModel {
    pub fn train(examples: &[(Canvas, usize)]) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::invalid("cannot train on zero examples"));
        }
        let entries = examples
            .iter()
            .map(|(canvas, label)| Ok((featurize(canvas)?, *label)))
            .collect::<Result<_>>()?;
        Ok(MemorizingModel { entries })
    }

    pub fn from_features(entries: Vec<(Features, usize)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("cannot train on zero examples"));
        }
        Ok(MemorizingModel { entries })
    }

    /// Train on a labels file and its canvas directory, as written by
    /// [`crate::dataset::write_dataset`].
    pub fn from_labels(labels: &Path, canvas_dir: &Path) -> Result<Self> {
        let rows = read_labels(labels)?;
        let entries = rows
            .par_iter()
            .map(|row| {
                let canvas = Raster::load(&canvas_dir.join(&row.canvas_filename))?;
                Ok((featurize(&canvas)?, row.label_index))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_features(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Features, usize)] {
        &self.entries
    }

    /// Label of the closest stored entry; the earliest entry wins ties.
    pub fn nearest(&self, features: &Features) -> Result<usize> {
        let mut best: Option<(u64, usize)> = None;
        for (f, label) in &self.entries {
            let d = f.squared_distance(features);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, *label));
            }
        }
        best.map(|(_, l)| l)
            .ok_or_else(|| Error::invalid("model has no entries"))
    }

    pub fn classify(&self, canvas: &Canvas) -> Result<usize> {
        self.nearest(&featurize(canvas)?)
    }
}

impl NextWordClassifier for MemorizingModel {
    fn predict(&mut self, canvas: &Canvas) -> Result<usize> {
        self.classify(canvas)
    }
}

impl NextWordClassifier for &MemorizingModel {
    fn predict(&mut self, canvas: &Canvas) -> Result<usize> {
        self.classify(canvas)
    }
}
