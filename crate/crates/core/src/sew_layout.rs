//! Squared English Word geometry.
//!
//! Every word occupies the same square cell regardless of its length. A word
//! of `N` letters is drawn on a `g × g` grid with `g = ceil(sqrt(N))`, so each
//! letter gets a `1/g` share of the cell side. Letters are packed row-major
//! from the top-left; pixels left over by the integer division stay blank at
//! the right and bottom edges of the cell.

use crate::error::{Error, Result};

/// Square cell that holds one word, in canvas pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WordCell {
    pub x: u32,
    pub y: u32,
    pub side: u32,
}

impl WordCell {
    pub fn new(x: u32, y: u32, side: u32) -> Result<Self> {
        if side == 0 {
            return Err(Error::invalid("word cell side must be positive"));
        }
        Ok(WordCell { x, y, side })
    }

    pub fn contains(&self, px: u32, py: u32) -> bool {
        px >= self.x && px < self.x + self.side && py >= self.y && py < self.y + self.side
    }
}

/// One letter of a word and the square sub-cell it is drawn into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlyphPlacement {
    pub ch: char,
    pub x: u32,
    pub y: u32,
    pub size: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLayout {
    pub word: String,
    pub grid_side: u32,
    pub placements: Vec<GlyphPlacement>,
}

/// Side of the smallest square grid holding `n_letters` letters, `ceil(sqrt(n))`.
pub fn grid_side(n_letters: usize) -> Result<u32> {
    if n_letters == 0 {
        return Err(Error::invalid("grid side of an empty word"));
    }
    let n = n_letters as u64;
    let mut g = (n as f64).sqrt() as u64;
    // float sqrt may be off by one near perfect squares
    while g * g > n {
        g -= 1;
    }
    while g * g < n {
        g += 1;
    }
    u32::try_from(g).map_err(|_| Error::invalid("word too long"))
}

/// Place each letter of `word` on its SEW grid inside `cell`.
pub fn layout_word(word: &str, cell: WordCell) -> Result<WordLayout> {
    let letters: Vec<char> = word.chars().collect();
    if letters.is_empty() {
        return Err(Error::invalid("cannot lay out an empty word"));
    }
    let g = grid_side(letters.len())?;
    let size = cell.side / g;
    if size == 0 {
        return Err(Error::LayoutInfeasible {
            word: word.to_owned(),
            side: cell.side,
            grid: g,
        });
    }
    let placements = letters
        .iter()
        .enumerate()
        .map(|(i, &ch)| {
            let i = i as u32;
            GlyphPlacement {
                ch,
                x: cell.x + (i % g) * size,
                y: cell.y + (i / g) * size,
                size,
            }
        })
        .collect();
    Ok(WordLayout {
        word: word.to_owned(),
        grid_side: g,
        placements,
    })
}
