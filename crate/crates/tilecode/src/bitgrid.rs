//! Rectangular bit matrices: the carrier type for tiles, overlaps and
//! encoded surfaces.
//!
//! A [`BitMatrix`] is immutable once constructed; every editing operation
//! returns a new value. Equality is bitwise and dimension-wise, and the
//! ordering is lexicographic on `(height, width, row-major bits)`, which
//! makes sorted tile lists canonical.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Glyphs used by [`BitMatrix::render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    /// `█` for one, `·` for zero.
    Unicode,
    /// `#` for one, `.` for zero.
    Ascii,
}

/// A `width × height` matrix of bits, stored row-major, one byte per bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BitMatrix {
    /// Builds a matrix from row-major bits. Every entry must be 0 or 1 and
    /// the slice length must be exactly `width * height`.
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::Dimension(format!(
                "expected {} bits for a {width}x{height} matrix, got {}",
                width * height,
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Dimension(format!(
                "matrix entries must be 0 or 1, got {bad}"
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// All-zero matrix.
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
    }

    /// Builds a matrix by evaluating `f(row, col)` for every cell.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self::new(width, height, bits)
    }

    /// Parses rows of `'0'`/`'1'` characters; all rows must share a length.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("matrix needs at least one row".into()));
        }
        let width = rows[0].chars().count();
        let mut bits = Vec::with_capacity(width * rows.len());
        for row in rows {
            if row.chars().count() != width {
                return Err(Error::Dimension(format!(
                    "ragged rows: expected width {width}, got {:?}",
                    row
                )));
            }
            for ch in row.chars() {
                match ch {
                    '0' => bits.push(0),
                    '1' => bits.push(1),
                    other => {
                        return Err(Error::Format(format!(
                            "invalid matrix character {other:?} (expected 0 or 1)"
                        )))
                    }
                }
            }
        }
        Self::new(width, rows.len(), bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major bits, one byte per bit.
    pub fn as_bits(&self) -> &[u8] {
        &self.bits
    }

    /// Bit at `(row, col)`. Panics when out of range, like slice indexing.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        assert!(
            row < self.height && col < self.width,
            "bit index out of range"
        );
        self.bits[row * self.width + col]
    }

    /// One row as a slice of bits.
    #[inline]
    pub fn row(&self, row: usize) -> &[u8] {
        assert!(row < self.height, "row index out of range");
        &self.bits[row * self.width..(row + 1) * self.width]
    }

    /// Copies the `sub_h × sub_w` region whose top-left corner is
    /// `(top, left)`.
    pub fn submatrix(&self, top: usize, left: usize, sub_h: usize, sub_w: usize) -> Result<Self> {
        if sub_h == 0 || sub_w == 0 {
            return Err(Error::Dimension(
                "submatrix extents must be positive".into(),
            ));
        }
        if top + sub_h > self.height || left + sub_w > self.width {
            return Err(Error::Dimension(format!(
                "submatrix region ({top},{left})+{sub_h}x{sub_w} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut bits = Vec::with_capacity(sub_w * sub_h);
        for r in top..top + sub_h {
            bits.extend_from_slice(
                &self.bits[r * self.width + left..r * self.width + left + sub_w],
            );
        }
        Self::new(sub_w, sub_h, bits)
    }

    /// Returns a copy of `self` with the region at `(top, left)` replaced by
    /// `patch`.
    pub fn overlay(&self, patch: &BitMatrix, top: usize, left: usize) -> Result<Self> {
        if top + patch.height > self.height || left + patch.width > self.width {
            return Err(Error::Dimension(format!(
                "overlay region ({top},{left})+{}x{} exceeds {}x{}",
                patch.width, patch.height, self.width, self.height
            )));
        }
        let mut bits = self.bits.clone();
        for r in 0..patch.height {
            let dst = (top + r) * self.width + left;
            bits[dst..dst + patch.width]
                .copy_from_slice(&patch.bits[r * patch.width..(r + 1) * patch.width]);
        }
        Self::new(self.width, self.height, bits)
    }

    /// ASCII/Unicode art, one line per row.
    pub fn render(&self, style: RenderStyle) -> String {
        let (one, zero) = match style {
            RenderStyle::Unicode => ('█', '·'),
            RenderStyle::Ascii => ('#', '.'),
        };
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for r in 0..self.height {
            for &b in self.row(r) {
                out.push(if b == 1 { one } else { zero });
            }
            out.push('\n');
        }
        out
    }

    /// Serializes to plain PBM (`P1`): magic, `width height`, then one line
    /// of `0`/`1` digits per row. Deterministic, byte-exact.
    pub fn to_pbm(&self) -> String {
        let mut out = String::with_capacity(self.width * self.height + 16);
        out.push_str("P1\n");
        out.push_str(&format!("{} {}\n", self.width, self.height));
        for r in 0..self.height {
            for &b in self.row(r) {
                out.push(if b == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses plain PBM. Accepts arbitrary whitespace between tokens and
    /// `#` comments, per the format.
    pub fn from_pbm(text: &str) -> Result<Self> {
        let mut tokens = pbm_tokens(text);
        let magic = tokens
            .next()
            .ok_or_else(|| Error::Format("empty PBM input".into()))?;
        if magic != "P1" {
            return Err(Error::Format(format!(
                "expected PBM magic P1, got {magic:?}"
            )));
        }
        let width: usize = parse_pbm_number(tokens.next(), "width")?;
        let height: usize = parse_pbm_number(tokens.next(), "height")?;
        if width == 0 || height == 0 {
            return Err(Error::Format("PBM dimensions must be positive".into()));
        }
        let mut bits = Vec::with_capacity(width * height);
        for tok in tokens {
            // Raster digits may be packed without whitespace.
            for ch in tok.chars() {
                match ch {
                    '0' => bits.push(0),
                    '1' => bits.push(1),
                    other => {
                        return Err(Error::Format(format!(
                            "invalid PBM raster character {other:?}"
                        )))
                    }
                }
            }
            if bits.len() > width * height {
                return Err(Error::Format("PBM raster has too many bits".into()));
            }
        }
        if bits.len() != width * height {
            return Err(Error::Format(format!(
                "PBM raster has {} bits, expected {}",
                bits.len(),
                width * height
            )));
        }
        Self::new(width, height, bits)
    }
}

fn parse_pbm_number(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Format(format!("PBM header missing {what}")))?
        .parse()
        .map_err(|_| Error::Format(format!("PBM {what} is not a number")))
}

/// Whitespace-separated tokens with `#`-to-end-of-line comments stripped.
fn pbm_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split_whitespace())
}

impl PartialOrd for BitMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BitMatrix {
    /// Lexicographic on `(height, width, row-major bits)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.height
            .cmp(&other.height)
            .then(self.width.cmp(&other.width))
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

// Compact Debug: dimensions plus the rows as 0/1 strings.
impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{};", self.width, self.height)?;
        for r in 0..self.height {
            f.write_str(" ")?;
            for &b in self.row(r) {
                write!(f, "{b}")?;
            }
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_submatrix() {
        let a = m(&["0101", "1000", "0010"]);
        assert_eq!(a.submatrix(0, 0, a.height(), a.width()).unwrap(), a);
    }

    #[test]
    fn column_extraction() {
        let a = m(&["01", "10"]);
        let col = a.submatrix(0, 1, 2, 1).unwrap();
        assert_eq!(col, m(&["1", "0"]));
    }

    #[test]
    fn top_strip_of_example_tile() {
        // 4x4 tile with rows 0101/1000/0010/1000: its top 3 rows.
        let t = m(&["0101", "1000", "0010", "1000"]);
        assert_eq!(
            t.submatrix(0, 0, 3, 4).unwrap(),
            m(&["0101", "1000", "0010"])
        );
    }

    #[test]
    fn overlay_self_is_identity() {
        let a = m(&["0101", "1000", "0010", "1000"]);
        assert_eq!(a.overlay(&a, 0, 0).unwrap(), a);
    }

    #[test]
    fn overlay_single_cell() {
        let base = BitMatrix::zeros(4, 4).unwrap();
        let one = m(&["1"]);
        let out = base.overlay(&one, 3, 3).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(out.get(r, c), u8::from(r == 3 && c == 3));
            }
        }
    }

    #[test]
    fn overlay_then_submatrix_returns_patch() {
        let base = BitMatrix::zeros(3, 3).unwrap();
        let patch = m(&["11", "11"]);
        let out = base.overlay(&patch, 0, 0).unwrap();
        assert_eq!(out.submatrix(0, 0, 2, 2).unwrap(), patch);
    }

    #[test]
    fn out_of_range_region_errors() {
        let a = m(&["01", "10"]);
        assert!(matches!(a.submatrix(1, 1, 2, 1), Err(Error::Dimension(_))));
        assert!(matches!(
            a.overlay(&m(&["11"]), 0, 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn ordering_is_total_and_stable() {
        let mut v = vec![
            m(&["11"]),
            m(&["1", "1"]),
            m(&["00"]),
            m(&["10"]),
            m(&["0"]),
        ];
        v.sort();
        let once = v.clone();
        v.sort();
        assert_eq!(v, once);
        // height first, then width, then bits
        assert_eq!(v[0], m(&["0"]));
        assert_eq!(v[1], m(&["00"]));
        assert_eq!(v[2], m(&["10"]));
        assert_eq!(v[3], m(&["11"]));
        assert_eq!(v[4], m(&["1", "1"]));
    }

    #[test]
    fn pbm_round_trip_and_comments() {
        let a = m(&["0101", "1000", "0010", "1001"]);
        let text = a.to_pbm();
        assert!(text.starts_with("P1\n4 4\n"));
        assert_eq!(BitMatrix::from_pbm(&text).unwrap(), a);

        let spaced = "P1 # comment\n# more\n4 4\n0 1 0 1\n1000\n0010 1001\n";
        assert_eq!(BitMatrix::from_pbm(spaced).unwrap(), a);
    }

    #[test]
    fn pbm_rejects_bad_input() {
        assert!(BitMatrix::from_pbm("P4\n2 2\n0110").is_err());
        assert!(BitMatrix::from_pbm("P1\n2 2\n011").is_err());
        assert!(BitMatrix::from_pbm("P1\n2 2\n01102").is_err());
    }

    #[test]
    fn value_types_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<BitMatrix>();
        assert_send_sync::<crate::constraints::ConstraintSpec>();
        assert_send_sync::<crate::collection::TileCollection>();
        assert_send_sync::<crate::nom::NomCollection>();
    }

    #[test]
    fn render_styles() {
        let a = m(&["10", "01"]);
        assert_eq!(a.render(RenderStyle::Ascii), "#.\n.#\n");
        assert_eq!(a.render(RenderStyle::Unicode), "█·\n·█\n");
    }
}
