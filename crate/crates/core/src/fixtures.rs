//! Small PGM images bundled with the crate.
//!
//! `fixtures/generate.py` regenerates them.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pgm;

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".pgm")))),*]
    };
}

const FILES: &[(&str, &str)] = bundle!(
    "alphabet",
    "cross",
    "face",
    "glyph_A",
    "glyph_C",
    "glyph_E",
    "glyph_H",
    "glyph_O",
    "glyph_U",
    "gradient",
    "hieroglyph",
    "sheet_OC",
    "square",
    "vbar",
    "x_pair",
);

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// Decodes the fixture called `name` (file stem, e.g. `glyph_A`).
pub fn load(name: &str) -> Result<Grid> {
    let (_, text) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no fixture `{name}`; have {}", names().collect::<Vec<_>>().join(", "))))?;
    pgm::decode(text.as_bytes())
}

/// Glyph letters with a dedicated fixture.
pub const GLYPHS: [char; 6] = ['O', 'C', 'E', 'H', 'U', 'A'];

pub fn glyph(letter: char) -> Result<Grid> {
    load(&format!("glyph_{letter}"))
}
