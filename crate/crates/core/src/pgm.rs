//! PGM (P2 ASCII and P5 binary) codec.
//!
//! `maxval` maps to `levels - 1`. Samples above 255 use two big-endian bytes in P5.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, Level};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`, whitespace separated decimal samples.
    Ascii,
    /// `P5`, raw samples.
    Binary,
}

struct Header {
    format: PgmFormat,
    width: usize,
    height: usize,
    maxval: u32,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Pgm(msg.into())
}

/// Splits the header, returning it along with the offset of the first sample byte.
fn parse_header(data: &[u8]) -> Result<(Header, usize)> {
    let format = match data.get(..2) {
        Some(b"P2") => PgmFormat::Ascii,
        Some(b"P5") => PgmFormat::Binary,
        _ => return Err(bad("missing P2/P5 magic")),
    };
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        // skip whitespace and comments
        loop {
            match data.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a number in header"));
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header number too large"))?;
    }
    // exactly one whitespace byte separates maxval from the raster
    match data.get(pos) {
        Some(c) if c.is_ascii_whitespace() => pos += 1,
        _ => return Err(bad("missing whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 65535 {
        return Err(bad(format!("maxval {maxval} outside 1..=65535")));
    }
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    Ok((
        Header {
            format,
            width: width as usize,
            height: height as usize,
            maxval: maxval as u32,
        },
        pos,
    ))
}

/// Decodes a P2 or P5 image.
pub fn decode(data: &[u8]) -> Result<Grid> {
    let (header, start) = parse_header(data)?;
    let count = header
        .width
        .checked_mul(header.height)
        .ok_or_else(|| bad("image too large"))?;
    let body = &data[start..];
    let cells: Vec<Level> = match header.format {
        PgmFormat::Binary => {
            let wide = header.maxval > 255;
            let need = count * if wide { 2 } else { 1 };
            if body.len() < need {
                return Err(bad(format!("expected {need} raster bytes, got {}", body.len())));
            }
            if wide {
                body[..need]
                    .chunks_exact(2)
                    .map(|b| u16::from_be_bytes([b[0], b[1]]))
                    .collect()
            } else {
                body[..need].iter().map(|&b| b as Level).collect()
            }
        }
        PgmFormat::Ascii => {
            let text = std::str::from_utf8(body).map_err(|_| bad("non-ASCII raster"))?;
            let mut cells = Vec::with_capacity(count);
            for tok in text
                .lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .flat_map(str::split_ascii_whitespace)
            {
                let v: u32 = tok.parse().map_err(|_| bad(format!("bad sample `{tok}`")))?;
                if v > 65535 {
                    return Err(bad(format!("sample {v} too large")));
                }
                cells.push(v as Level);
            }
            if cells.len() < count {
                return Err(bad(format!("expected {count} samples, got {}", cells.len())));
            }
            cells.truncate(count);
            cells
        }
    };
    if let Some(&v) = cells.iter().find(|&&v| v as u32 > header.maxval) {
        return Err(bad(format!("sample {v} exceeds maxval {}", header.maxval)));
    }
    Grid::from_cells(header.width, header.height, header.maxval + 1, cells)
}

/// Encodes `grid` with `maxval = levels - 1`.
pub fn encode(grid: &Grid, format: PgmFormat) -> Vec<u8> {
    let maxval = grid.levels() - 1;
    match format {
        PgmFormat::Binary => {
            let mut out = format!("P5\n{} {}\n{}\n", grid.width(), grid.height(), maxval).into_bytes();
            if maxval > 255 {
                for &v in grid.cells() {
                    out.extend_from_slice(&v.to_be_bytes());
                }
            } else {
                out.extend(grid.cells().iter().map(|&v| v as u8));
            }
            out
        }
        PgmFormat::Ascii => {
            let mut out = format!("P2\n{} {}\n{}\n", grid.width(), grid.height(), maxval);
            for row in grid.cells().chunks(grid.width()) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

pub fn read(path: impl AsRef<Path>) -> Result<Grid> {
    decode(&fs::read(path)?)
}

pub fn write(path: impl AsRef<Path>, grid: &Grid, format: PgmFormat) -> Result<()> {
    fs::write(path, encode(grid, format))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_with_comments() {
        let src = b"P2\n# made by hand\n3 2\n# max\n9\n0 1 2\n3 4 9 # tail\n";
        let g = decode(src).unwrap();
        assert_eq!((g.width(), g.height(), g.levels()), (3, 2, 10));
        assert_eq!(g.cells(), &[0, 1, 2, 3, 4, 9]);
    }

    #[test]
    fn binary_exact_bytes() {
        let g = Grid::from_rows(256, &[[0, 128, 255]]).unwrap();
        let bytes = encode(&g, PgmFormat::Binary);
        assert_eq!(bytes, b"P5\n3 1\n255\n\x00\x80\xff");
        assert_eq!(decode(&bytes).unwrap(), g);
    }

    #[test]
    fn sixteen_bit_samples() {
        let g = Grid::from_rows(1024, &[[0, 1023, 300]]).unwrap();
        let bytes = encode(&g, PgmFormat::Binary);
        assert_eq!(&bytes[bytes.len() - 6..], &[0, 0, 3, 255, 1, 44]);
        assert_eq!(decode(&bytes).unwrap(), g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode(b"P6\n1 1\n255\n\0\0\0").is_err());
        assert!(decode(b"P5\n2 2\n255\n\0").is_err());
        assert!(decode(b"P2\n2 1\n3\n1 7\n").is_err());
        assert!(decode(b"P2\n0 1\n3\n").is_err());
        assert!(decode(b"P5 1 1 0 \0").is_err());
    }

    fn arb_grid() -> impl Strategy<Value = Grid> {
        (1usize..6, 1usize..6, 2u32..=65536).prop_flat_map(|(w, h, levels)| {
            prop::collection::vec(0..levels, w * h).prop_map(move |cells| {
                Grid::from_cells(w, h, levels, cells.into_iter().map(|v| v as Level).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(g in arb_grid(), binary in any::<bool>()) {
            let format = if binary { PgmFormat::Binary } else { PgmFormat::Ascii };
            let bytes = encode(&g, format);
            let back = decode(&bytes).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(encode(&back, format), bytes);
        }
    }
}
