//! Forbidden-pattern constraints and validity scanning.
//!
//! A [`ConstraintSpec`] is a finite set of rectangular forbidden patterns.
//! A matrix is valid when no pattern occurs as a contiguous submatrix at
//! any position. The scan here is the deliberately naive double loop; it is
//! the reference every faster path in this crate is tested against.

use crate::bitgrid::BitMatrix;
use crate::error::{Error, Result};

/// A set of forbidden rectangular patterns plus the derived overlap
/// thickness `max(pattern width, pattern height) - 1` (at least 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSpec {
    forbidden: Vec<BitMatrix>,
    max_w: usize,
    max_h: usize,
    thickness: usize,
}

impl ConstraintSpec {
    pub fn new(forbidden: Vec<BitMatrix>) -> Result<Self> {
        if forbidden.is_empty() {
            return Err(Error::Parameter(
                "a constraint spec needs at least one forbidden pattern".into(),
            ));
        }
        let max_w = forbidden.iter().map(BitMatrix::width).max().unwrap();
        let max_h = forbidden.iter().map(BitMatrix::height).max().unwrap();
        // Thickness never drops below 1 so the overlap machinery stays
        // well-defined even for 1x1-only pattern sets.
        let thickness = max_w.max(max_h).saturating_sub(1).max(1);
        Ok(Self {
            forbidden,
            max_w,
            max_h,
            thickness,
        })
    }

    /// The four forbidden patterns of the two-dimensional (1,3)-RLL
    /// constraint: `11` and `0000`, horizontally and vertically.
    pub fn preset_rll13_2d() -> Self {
        Self::preset_rll_dk_2d(1, 3).expect("(1,3) is a valid (d,k) pair")
    }

    /// Two-dimensional (d,k)-RLL preset: between `d` and `k` zeros must
    /// separate consecutive ones, along rows and along columns.
    ///
    /// Forbidden set: `1 0^j 1` for each `0 <= j < d` plus the run `0^(k+1)`,
    /// each in both orientations.
    pub fn preset_rll_dk_2d(d: usize, k: usize) -> Result<Self> {
        if d >= k {
            return Err(Error::Parameter(format!(
                "(d,k)-RLL requires d < k, got d={d}, k={k}"
            )));
        }
        let mut forbidden = Vec::new();
        for j in 0..d {
            let mut run = vec![1u8];
            run.extend(std::iter::repeat_n(0, j));
            run.push(1);
            forbidden.push(BitMatrix::new(run.len(), 1, run.clone())?);
            forbidden.push(BitMatrix::new(1, run.len(), run)?);
        }
        let zeros = vec![0u8; k + 1];
        forbidden.push(BitMatrix::new(zeros.len(), 1, zeros.clone())?);
        forbidden.push(BitMatrix::new(1, zeros.len(), zeros)?);
        Self::new(forbidden)
    }

    pub fn forbidden(&self) -> &[BitMatrix] {
        &self.forbidden
    }

    pub fn max_pattern_width(&self) -> usize {
        self.max_w
    }

    pub fn max_pattern_height(&self) -> usize {
        self.max_h
    }

    /// Overlap thickness shared by neighbouring tiles.
    pub fn thickness(&self) -> usize {
        self.thickness
    }

    /// True when no forbidden pattern occurs anywhere in `m`. Patterns
    /// larger than `m` in either dimension cannot occur and are ignored.
    pub fn is_valid(&self, m: &BitMatrix) -> bool {
        for pat in &self.forbidden {
            if pattern_occurs(m, pat) {
                return false;
            }
        }
        true
    }

    /// Like [`is_valid`](Self::is_valid) but only counts pattern placements
    /// whose cells are all marked filled in `mask` (1 = filled). Used to
    /// check partially assigned matrices such as frames with a hole.
    pub fn is_valid_masked(&self, m: &BitMatrix, mask: &BitMatrix) -> bool {
        assert_eq!(
            (mask.width(), mask.height()),
            (m.width(), m.height()),
            "mask dimensions must match the matrix"
        );
        for pat in &self.forbidden {
            let (pw, ph) = (pat.width(), pat.height());
            if pw > m.width() || ph > m.height() {
                continue;
            }
            for top in 0..=m.height() - ph {
                'place: for left in 0..=m.width() - pw {
                    for r in 0..ph {
                        for c in 0..pw {
                            if mask.get(top + r, left + c) == 0
                                || m.get(top + r, left + c) != pat.get(r, c)
                            {
                                continue 'place;
                            }
                        }
                    }
                    return false;
                }
            }
        }
        true
    }

    /// Writes the textual constraint format: one pattern per block, rows of
    /// `0`/`1`, blocks separated by blank lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, pat) in self.forbidden.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for r in 0..pat.height() {
                for &b in pat.row(r) {
                    out.push(if b == 1 { '1' } else { '0' });
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parses the textual constraint format. Lines starting with `#` are
    /// comments; blank lines separate patterns.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut patterns = Vec::new();
        let mut block: Vec<&str> = Vec::new();
        for raw in text.lines().chain(std::iter::once("")) {
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if !block.is_empty() {
                    patterns.push(BitMatrix::from_rows(&block)?);
                    block.clear();
                }
            } else {
                block.push(line);
            }
        }
        Self::new(patterns)
    }
}

fn pattern_occurs(m: &BitMatrix, pat: &BitMatrix) -> bool {
    let (pw, ph) = (pat.width(), pat.height());
    if pw > m.width() || ph > m.height() {
        return false;
    }
    for top in 0..=m.height() - ph {
        'place: for left in 0..=m.width() - pw {
            for r in 0..ph {
                for c in 0..pw {
                    if m.get(top + r, left + c) != pat.get(r, c) {
                        continue 'place;
                    }
                }
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn rll13_preset_patterns() {
        let spec = ConstraintSpec::preset_rll13_2d();
        assert_eq!(spec.forbidden().len(), 4);
        assert_eq!(spec.forbidden()[0], m(&["11"]));
        assert_eq!(spec.forbidden()[1], m(&["1", "1"]));
        assert_eq!(spec.forbidden()[2], m(&["0000"]));
        assert_eq!(spec.forbidden()[3], m(&["0", "0", "0", "0"]));
        assert_eq!(spec.thickness(), 3);
        assert_eq!(spec.max_pattern_width(), 4);
        assert_eq!(spec.max_pattern_height(), 4);
    }

    #[test]
    fn dk_presets() {
        assert_eq!(
            ConstraintSpec::preset_rll_dk_2d(1, 3).unwrap(),
            ConstraintSpec::preset_rll13_2d()
        );

        let zero_one = ConstraintSpec::preset_rll_dk_2d(0, 1).unwrap();
        assert_eq!(zero_one.forbidden(), &[m(&["00"]), m(&["0", "0"])]);
        assert_eq!(zero_one.thickness(), 1);

        let two_four = ConstraintSpec::preset_rll_dk_2d(2, 4).unwrap();
        assert_eq!(
            two_four.forbidden(),
            &[
                m(&["11"]),
                m(&["1", "1"]),
                m(&["101"]),
                m(&["1", "0", "1"]),
                m(&["00000"]),
                m(&["0", "0", "0", "0", "0"]),
            ]
        );

        assert!(matches!(
            ConstraintSpec::preset_rll_dk_2d(3, 3),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn validity_examples() {
        let spec = ConstraintSpec::preset_rll13_2d();
        assert!(!spec.is_valid(&m(&["11"])));
        assert!(spec.is_valid(&m(&["0"])));
        assert!(spec.is_valid(&m(&["0101", "1000", "0010", "1000"])));
        assert!(!spec.is_valid(&m(&["0101", "1000", "0010", "0000"])));
    }

    #[test]
    fn submatrices_of_valid_are_valid() {
        let spec = ConstraintSpec::preset_rll13_2d();
        let v = m(&["0101", "1000", "0010", "1001"]);
        assert!(spec.is_valid(&v));
        for top in 0..4 {
            for left in 0..4 {
                for h in 1..=4 - top {
                    for w in 1..=4 - left {
                        assert!(spec.is_valid(&v.submatrix(top, left, h, w).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn masked_scan_with_full_mask_matches_plain_scan() {
        let spec = ConstraintSpec::preset_rll13_2d();
        // Deterministic LCG; 10k random matrices up to 12x12.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..10_000 {
            let w = (next() % 12 + 1) as usize;
            let h = (next() % 12 + 1) as usize;
            let bits: Vec<u8> = (0..w * h).map(|_| (next() & 1) as u8).collect();
            let mat = BitMatrix::new(w, h, bits).unwrap();
            let full = BitMatrix::new(w, h, vec![1; w * h]).unwrap();
            assert_eq!(spec.is_valid(&mat), spec.is_valid_masked(&mat, &full));
        }
    }

    #[test]
    fn masked_scan_ignores_unfilled_cells() {
        let spec = ConstraintSpec::preset_rll13_2d();
        let mat = m(&["11"]);
        let mask = m(&["10"]);
        assert!(spec.is_valid_masked(&mat, &mask));
        assert!(!spec.is_valid_masked(&mat, &m(&["11"])));
    }

    #[test]
    fn text_format_round_trip() {
        let spec = ConstraintSpec::preset_rll13_2d();
        let text = spec.to_text();
        let back = ConstraintSpec::from_text(&text).unwrap();
        assert_eq!(back, spec);

        let commented = "# 2D (0,1)-RLL\n00\n\n0\n0\n";
        let parsed = ConstraintSpec::from_text(commented).unwrap();
        assert_eq!(parsed, ConstraintSpec::preset_rll_dk_2d(0, 1).unwrap());

        assert!(ConstraintSpec::from_text("").is_err());
        assert!(ConstraintSpec::from_text("01\n2\n").is_err());
    }
}
