//! Embedded 8×8 monochrome bitmap font covering printable ASCII.
//!
//! Glyph data is the public-domain font8x8 basic set. Each glyph is eight row
//! bytes, top row first, with bit 0 as the leftmost pixel.

use font8x8::legacy::BASIC_LEGACY;

pub type Bitmap = [u8; 8];

pub const REPLACEMENT_GLYPH: Bitmap = [0xFF; 8];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphFont {
    glyphs: [Bitmap; 95],
    replacement: Bitmap,
}

impl Default for GlyphFont {
    fn default() -> Self {
        Self::embedded()
    }
}

impl GlyphFont {
    pub fn embedded() -> Self {
        let mut glyphs = [[0u8; 8]; 95];
        glyphs.copy_from_slice(&BASIC_LEGACY[32..127]);
        GlyphFont {
            glyphs,
            replacement: REPLACEMENT_GLYPH,
        }
    }

    pub fn supports(&self, ch: char) -> bool {
        (' '..='~').contains(&ch)
    }

    /// Bitmap for `ch`, or the solid replacement block when `ch` is not
    /// printable ASCII.
    pub fn glyph(&self, ch: char) -> &Bitmap {
        if self.supports(ch) {
            &self.glyphs[ch as usize - 32]
        } else {
            &self.replacement
        }
    }

    pub fn bit(bitmap: &Bitmap, col: u32, row: u32) -> bool {
        bitmap[row as usize] >> col & 1 == 1
    }
}
