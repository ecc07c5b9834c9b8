//! Exhaustive enumeration of valid tiles.
//!
//! Cells are assigned in row-major order; after each assignment only the
//! forbidden-pattern placements whose bottom-right corner is the just-filled
//! cell are checked. Every placement region is then fully assigned, so the
//! pruning rejects a partial matrix only when a forbidden pattern genuinely
//! occurs, and each occurrence is detected exactly once, as early as
//! possible. Trying 0 before 1 at every cell yields the lexicographic
//! output order directly.

use crate::bitgrid::BitMatrix;
use crate::constraints::ConstraintSpec;
use crate::error::{Error, Result};

/// Default cap on visited search nodes (one node per cell assignment).
pub const DEFAULT_WORK_LIMIT: u64 = 1_000_000_000;

/// A valid `w × h` bit matrix used as the unit of surface coverage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tile {
    matrix: BitMatrix,
}

impl Tile {
    pub fn new(matrix: BitMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> BitMatrix {
        self.matrix
    }

    pub fn width(&self) -> usize {
        self.matrix.width()
    }

    pub fn height(&self) -> usize {
        self.matrix.height()
    }
}

/// The four thickness-wide boundary strips of a tile. For narrow or shallow
/// tiles (extent at most twice the thickness) opposite strips overlap each
/// other, which is fine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileBoundaries {
    /// `thickness` leftmost columns (a horizontal-overlap candidate).
    pub left: BitMatrix,
    /// `thickness` rightmost columns.
    pub right: BitMatrix,
    /// `thickness` top rows (a vertical-overlap candidate).
    pub top: BitMatrix,
    /// `thickness` bottom rows.
    pub bottom: BitMatrix,
}

/// Extracts the four boundary strips of `tile`.
pub fn boundaries(tile: &Tile, thickness: usize) -> TileBoundaries {
    let (w, h) = (tile.width(), tile.height());
    assert!(
        thickness >= 1 && thickness < w && thickness < h,
        "thickness must be positive and strictly smaller than both tile extents"
    );
    let m = tile.matrix();
    TileBoundaries {
        left: m.submatrix(0, 0, h, thickness).unwrap(),
        right: m.submatrix(0, w - thickness, h, thickness).unwrap(),
        top: m.submatrix(0, 0, thickness, w).unwrap(),
        bottom: m.submatrix(h - thickness, 0, thickness, w).unwrap(),
    }
}

/// Enumerates every valid `w × h` tile, in lexicographic order, under the
/// default work limit.
pub fn enumerate_valid_tiles(w: usize, h: usize, spec: &ConstraintSpec) -> Result<Vec<Tile>> {
    enumerate_valid_tiles_with_limit(w, h, spec, DEFAULT_WORK_LIMIT)
}

/// Enumerates every valid `w × h` tile with an explicit node budget.
pub fn enumerate_valid_tiles_with_limit(
    w: usize,
    h: usize,
    spec: &ConstraintSpec,
    limit: u64,
) -> Result<Vec<Tile>> {
    let min = spec.thickness() + 1;
    if w < min || h < min {
        return Err(Error::Parameter(format!(
            "tiles must strictly contain their overlaps: need at least {min}x{min} \
             for thickness {}, got {w}x{h}",
            spec.thickness()
        )));
    }
    Ok(enumerate_valid_matrices(w, h, spec, limit)?
        .into_iter()
        .map(Tile::new)
        .collect())
}

/// Enumerates every valid `w × h` matrix (no tile-minimum requirement), in
/// lexicographic order by row-major bits.
pub fn enumerate_valid_matrices(
    w: usize,
    h: usize,
    spec: &ConstraintSpec,
    limit: u64,
) -> Result<Vec<BitMatrix>> {
    if w == 0 || h == 0 {
        return Err(Error::Parameter(
            "matrix dimensions must be positive".into(),
        ));
    }
    let mut search = Search {
        w,
        h,
        spec,
        cells: vec![0u8; w * h],
        out: Vec::new(),
        nodes: 0,
        limit,
    };
    search.fill(0)?;
    debug_assert!(search.out.windows(2).all(|p| p[0] < p[1]));
    Ok(search.out)
}

struct Search<'a> {
    w: usize,
    h: usize,
    spec: &'a ConstraintSpec,
    cells: Vec<u8>,
    out: Vec<BitMatrix>,
    nodes: u64,
    limit: u64,
}

impl Search<'_> {
    fn fill(&mut self, pos: usize) -> Result<()> {
        if pos == self.cells.len() {
            self.out
                .push(BitMatrix::new(self.w, self.h, self.cells.clone()).expect("cells are bits"));
            return Ok(());
        }
        let (r, c) = (pos / self.w, pos % self.w);
        for bit in 0..=1u8 {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::WorkLimit {
                    nodes: self.nodes,
                    limit: self.limit,
                });
            }
            self.cells[pos] = bit;
            if !self.forbidden_at(r, c) {
                self.fill(pos + 1)?;
            }
        }
        Ok(())
    }

    /// Does any forbidden pattern sit with its bottom-right corner at
    /// `(r, c)`? All cells of such a placement are already assigned.
    fn forbidden_at(&self, r: usize, c: usize) -> bool {
        'pattern: for pat in self.spec.forbidden() {
            let (pw, ph) = (pat.width(), pat.height());
            if pw > c + 1 || ph > r + 1 {
                continue;
            }
            let (top, left) = (r + 1 - ph, c + 1 - pw);
            for pr in 0..ph {
                for pc in 0..pw {
                    if self.cells[(top + pr) * self.w + (left + pc)] != pat.get(pr, pc) {
                        continue 'pattern;
                    }
                }
            }
            return true;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: filter all 2^(w*h) matrices through the
    /// reference validity scan. Independent of the DFS path.
    fn brute_force(w: usize, h: usize, spec: &ConstraintSpec) -> Vec<BitMatrix> {
        let n = w * h;
        assert!(n <= 24, "oracle only meant for small shapes");
        let mut out = Vec::new();
        for code in 0u32..1 << n {
            let bits: Vec<u8> = (0..n).map(|i| ((code >> (n - 1 - i)) & 1) as u8).collect();
            let m = BitMatrix::new(w, h, bits).unwrap();
            if spec.is_valid(&m) {
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn four_by_four_rll13_has_236_tiles() {
        let spec = ConstraintSpec::preset_rll13_2d();
        let tiles = enumerate_valid_tiles(4, 4, &spec).unwrap();
        assert_eq!(tiles.len(), 236);

        let oracle = brute_force(4, 4, &spec);
        assert_eq!(oracle.len(), 236);
        let dfs: Vec<&BitMatrix> = tiles.iter().map(Tile::matrix).collect();
        assert_eq!(dfs, oracle.iter().collect::<Vec<_>>());
    }

    #[test]
    fn all_forbidden_spec_yields_nothing() {
        let zero = BitMatrix::from_rows(&["0"]).unwrap();
        let one = BitMatrix::from_rows(&["1"]).unwrap();
        let spec = ConstraintSpec::new(vec![zero, one]).unwrap();
        // thickness clamps to 1, so 4x4 satisfies the minimum.
        assert!(enumerate_valid_tiles(4, 4, &spec).unwrap().is_empty());
    }

    #[test]
    fn enumeration_matches_oracle_on_small_shapes() {
        let spec = ConstraintSpec::preset_rll13_2d();
        for (w, h) in [(1, 8), (2, 6), (3, 4), (4, 3), (5, 4), (2, 2)] {
            let dfs = enumerate_valid_matrices(w, h, &spec, DEFAULT_WORK_LIMIT).unwrap();
            let oracle = brute_force(w, h, &spec);
            assert_eq!(dfs, oracle, "shape {w}x{h}");
        }
    }

    #[test]
    fn dimensions_below_minimum_rejected() {
        let spec = ConstraintSpec::preset_rll13_2d();
        assert!(matches!(
            enumerate_valid_tiles(3, 4, &spec),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            enumerate_valid_tiles(4, 3, &spec),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn tiny_work_limit_reports_exhaustion() {
        let spec = ConstraintSpec::preset_rll13_2d();
        match enumerate_valid_tiles_with_limit(4, 4, &spec, 10) {
            Err(Error::WorkLimit { nodes, limit }) => {
                assert_eq!(limit, 10);
                assert!(nodes > limit);
            }
            other => panic!("expected work-limit error, got {other:?}"),
        }
    }

    #[test]
    fn boundary_strips_match_submatrices() {
        let spec = ConstraintSpec::preset_rll13_2d();
        let tile = Tile::new(BitMatrix::from_rows(&["0101", "1000", "0010", "1000"]).unwrap());
        let b = boundaries(&tile, spec.thickness());
        assert_eq!(
            b.top,
            BitMatrix::from_rows(&["0101", "1000", "0010"]).unwrap()
        );
        assert_eq!(b.left, tile.matrix().submatrix(0, 0, 4, 3).unwrap());
        assert_eq!(b.right, tile.matrix().submatrix(0, 1, 4, 3).unwrap());
        assert_eq!(b.bottom, tile.matrix().submatrix(1, 0, 3, 4).unwrap());
        // Narrow tile: left and right strips share w - 2 = 2 columns.
        assert_eq!(
            b.left.submatrix(0, 1, 4, 2).unwrap(),
            b.right.submatrix(0, 0, 4, 2).unwrap()
        );
    }
}
