#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supercap::{Raster, Rgb};

pub const WORDS: [&str; 50] = [
    "A",
    "Two",
    "Four",
    "man",
    "woman",
    "child",
    "dog",
    "cat",
    "boat",
    "lake",
    "red",
    "blue",
    "black",
    "white",
    "orange",
    "green",
    "striped",
    "shirt",
    "coat",
    "umbrella",
    "is",
    "are",
    "walking",
    "riding",
    "running",
    "holding",
    "sitting",
    "in",
    "on",
    "with",
    "down",
    "a",
    "the",
    "of",
    "near",
    "grassy",
    "lawn",
    "street",
    "sidewalk",
    "mountains",
    "background",
    "ballet",
    "arms",
    "outstretched",
    "jackets",
    "life",
    "performers",
    "bright",
    "young",
    "people",
];

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_supercap"))
}

pub fn supercap(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("SUPERCAP_LOG", "warn")
        .output()
        .expect("run supercap")
}

/// Distinct synthetic photographs: solid fills with a per-image channel sum,
/// some overlaid with stripes or a checkerboard.
pub fn synthetic_image(i: usize) -> Raster {
    let (w, h) = (64 + 8 * (i as u32 % 4), 48 + 4 * (i as u32 % 3));
    let base = Rgb([(20 + 11 * i) as u8, (40 + 7 * i) as u8, (230 - 9 * i) as u8]);
    let mut r = Raster::filled(w, h, base).unwrap();
    let accent = Rgb([(250 - 5 * i) as u8, (10 * i) as u8, 128]);
    for y in 0..h {
        for x in 0..w {
            let hit = match i % 3 {
                1 => (y / 6) % 2 == 0,
                2 => ((x / 8) + (y / 8)) % 2 == 0,
                _ => false,
            };
            if hit {
                r.set_pixel(x, y, accent);
            }
        }
    }
    r
}

pub fn random_caption(rng: &mut ChaCha8Rng, min: usize, max: usize) -> Vec<String> {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| WORDS.choose(rng).unwrap().to_string())
        .collect()
}

pub fn corpus(n_images: usize, seed: u64) -> Vec<(Raster, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_images)
        .map(|i| (synthetic_image(i), random_caption(&mut rng, 1, 13)))
        .collect()
}

pub fn image_name(i: usize) -> String {
    format!("img{i:03}.png")
}

/// Write images and a Flickr30k-style caption file under `dir`. Each image
/// gets its caption plus a few distractor captions that are too long.
pub fn write_corpus(dir: &Path, corpus: &[(Raster, Vec<String>)]) -> (PathBuf, PathBuf) {
    let images = dir.join("images");
    fs::create_dir_all(&images).unwrap();
    let mut lines = String::new();
    for (i, (img, caption)) in corpus.iter().enumerate() {
        fs::write(images.join(image_name(i)), img.encode_png().unwrap()).unwrap();
        let too_long = vec!["word"; 14 + i % 3].join(" ");
        lines.push_str(&format!("{}#0\t{too_long}\n", image_name(i)));
        lines.push_str(&format!("{}#1\t{} .\n", image_name(i), caption.join(" ")));
        lines.push_str(&format!("{}#2\t{too_long} again\n", image_name(i)));
    }
    let captions = dir.join("captions.token");
    fs::write(&captions, lines).unwrap();
    (captions, images)
}
