//! SuperCaptioning canvas composition.
//!
//! The photograph is stretched into the top-left image region and each token
//! of the partial caption is drawn into its own word cell in the text band
//! below it.

use crate::error::{Error, Result};
use crate::font::GlyphFont;
use crate::raster::{resize_bilinear, Canvas, Raster, Rgb};
use crate::sew_layout::{layout_word, WordCell};

/// Canvas geometry. The defaults are a 224×224 canvas with a 224×150 image
/// region and fourteen 31px word cells, seven per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionConfig {
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub image_region_w: u32,
    pub image_region_h: u32,
    pub cell_side: u32,
    pub words_per_row: u32,
    pub rows: u32,
    pub left_margin: u32,
    pub cut_length: usize,
    pub background: Rgb,
    pub ink: Rgb,
}

impl Default for CompositionConfig {
    fn default() -> Self {
        CompositionConfig {
            canvas_w: 224,
            canvas_h: 224,
            image_region_w: 224,
            image_region_h: 150,
            cell_side: 31,
            words_per_row: 7,
            rows: 2,
            left_margin: 3,
            cut_length: 14,
            background: Rgb::WHITE,
            ink: Rgb::BLACK,
        }
    }
}

impl CompositionConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::invalid(format!("composition config: {msg}")));
        if self.canvas_w == 0
            || self.canvas_h == 0
            || self.image_region_w == 0
            || self.image_region_h == 0
        {
            return fail("dimensions must be positive");
        }
        if self.cell_side == 0 || self.words_per_row == 0 || self.rows == 0 {
            return fail("word grid must be non-empty");
        }
        if self.words_per_row as usize * self.rows as usize != self.cut_length {
            return fail("words_per_row * rows must equal cut_length");
        }
        if self.image_region_w > self.canvas_w {
            return fail("image region wider than canvas");
        }
        if self.left_margin + self.words_per_row * self.cell_side > self.canvas_w {
            return fail("word cells overflow canvas width");
        }
        if self.image_region_h + self.rows * self.cell_side > self.canvas_h {
            return fail("word cells overflow canvas height");
        }
        Ok(())
    }

    /// Top edge of the text band, directly below the image region.
    pub fn text_region_top(&self) -> u32 {
        self.image_region_h
    }

    /// The `cut_length` word cells in caption order, row-major.
    pub fn caption_cells(&self) -> Vec<WordCell> {
        (0..self.cut_length as u32)
            .map(|i| WordCell {
                x: self.left_margin + (i % self.words_per_row) * self.cell_side,
                y: self.text_region_top() + (i / self.words_per_row) * self.cell_side,
                side: self.cell_side,
            })
            .collect()
    }
}

/// Characters that had no glyph and were drawn as the replacement block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenderReport {
    pub replaced: Vec<char>,
}

/// Draw `word` into `cell`. Each letter's 8×8 glyph is scaled to its SEW
/// sub-cell by nearest neighbor; set bits are painted with `ink`, unset bits
/// leave the canvas untouched.
pub fn render_word(
    canvas: &mut Canvas,
    word: &str,
    cell: WordCell,
    font: &GlyphFont,
    ink: Rgb,
) -> Result<RenderReport> {
    if cell.x + cell.side > canvas.width() || cell.y + cell.side > canvas.height() {
        return Err(Error::invalid("word cell lies outside the canvas"));
    }
    let layout = layout_word(word, cell)?;
    let mut report = RenderReport::default();
    for p in &layout.placements {
        if !font.supports(p.ch) {
            report.replaced.push(p.ch);
        }
        let bitmap = font.glyph(p.ch);
        for py in 0..p.size {
            let row = py * 8 / p.size;
            for px in 0..p.size {
                if GlyphFont::bit(bitmap, px * 8 / p.size, row) {
                    canvas.set_pixel(p.x + px, p.y + py, ink);
                }
            }
        }
    }
    if !report.replaced.is_empty() {
        log::warn!(
            "word {word:?}: no glyph for {:?}, drew replacement block",
            report.replaced
        );
    }
    Ok(report)
}

/// Composes canvases for one photograph. The resize happens once; every
/// partial caption is then drawn over a copy of the same base.
#[derive(Debug, Clone)]
pub struct Composer<'a> {
    base: Canvas,
    config: &'a CompositionConfig,
    font: &'a GlyphFont,
    cells: Vec<WordCell>,
}

impl<'a> Composer<'a> {
    pub fn new(image: &Raster, config: &'a CompositionConfig, font: &'a GlyphFont) -> Result<Self> {
        config.validate()?;
        let mut base = Raster::filled(config.canvas_w, config.canvas_h, config.background)?;
        let resized = resize_bilinear(image, config.image_region_w, config.image_region_h)?;
        base.blit(&resized, 0, 0)?;
        Ok(Composer {
            base,
            config,
            font,
            cells: config.caption_cells(),
        })
    }

    pub fn compose<S: AsRef<str>>(&self, partial_caption: &[S]) -> Result<Canvas> {
        if partial_caption.len() > self.config.cut_length {
            return Err(Error::invalid(format!(
                "{} tokens exceed the cut-length of {}",
                partial_caption.len(),
                self.config.cut_length
            )));
        }
        if let Some(i) = partial_caption.iter().position(|t| t.as_ref().is_empty()) {
            return Err(Error::invalid(format!("token {i} is empty")));
        }
        let mut canvas = self.base.clone();
        for (token, cell) in partial_caption.iter().zip(&self.cells) {
            render_word(
                &mut canvas,
                token.as_ref(),
                *cell,
                self.font,
                self.config.ink,
            )?;
        }
        Ok(canvas)
    }
}

/// Build the SuperCaptioning image for `image` and `partial_caption`.
pub fn compose<S: AsRef<str>>(
    image: &Raster,
    partial_caption: &[S],
    config: &CompositionConfig,
    font: &GlyphFont,
) -> Result<Canvas> {
    Composer::new(image, config, font)?.compose(partial_caption)
}
