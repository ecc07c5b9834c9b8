//! Encoding payload bits into valid matrices and back.
//!
//! The surface is covered left to right, top to bottom, one tile per grid
//! position at stride `tile extent − thickness`. At each position the
//! context (nothing / left overlap / top overlap / both) selects a
//! candidate list from the collection tables; with `k` candidates the next
//! `floor(log2 k)` payload bits, read big-endian, pick the tile. A position
//! with a single candidate embeds nothing. When the payload runs out the
//! remaining index bits are zero, so every matrix is completed; decoding
//! replays the same walk and recovers each index from the placed tile.
//!
//! Per position the encoder touches two table lookups and one tile write,
//! so the whole construction is linear in the matrix area.

use std::fmt;

use crate::bitgrid::BitMatrix;
use crate::collection::TileCollection;
use crate::error::{Error, Result};

/// A bit sequence packed most-significant-bit first.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    /// All bits of `bytes`, most significant first within each byte.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    /// The first `len` bits of `bytes`.
    pub fn from_bytes_truncated(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::Parameter(format!(
                "bit length {len} exceeds the {} available bits",
                bytes.len() * 8
            )));
        }
        let mut s = Self {
            bytes: bytes[..len.div_ceil(8)].to_vec(),
            len,
        };
        // Zero the tail so equality stays bitwise.
        if !len.is_multiple_of(8) {
            let last = s.bytes.len() - 1;
            s.bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Ok(s)
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut s = Self::new();
        for &b in bits {
            if b > 1 {
                return Err(Error::Parameter(format!("bits must be 0 or 1, got {b}")));
            }
            s.push(b == 1);
        }
        Ok(s)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index out of range");
        self.bytes[index / 8] & (0x80 >> (index % 8)) != 0
    }

    /// Packed bytes, zero-padded to a byte boundary.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bytes.clone()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: usize) -> BitString {
        assert!(n <= self.len);
        let mut out = BitString::new();
        for i in 0..n {
            out.push(self.get(i));
        }
        out
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({} bits;", self.len)?;
        for i in 0..self.len.min(64) {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        if self.len > 64 {
            write!(f, "…")?;
        }
        write!(f, ")")
    }
}

/// How a `W × H` matrix decomposes into a grid of overlapping tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TilingGeometry {
    pub width: usize,
    pub height: usize,
    /// Tile-grid dimensions.
    pub cols: usize,
    pub rows: usize,
    pub stride_x: usize,
    pub stride_y: usize,
    pub tile_w: usize,
    pub tile_h: usize,
}

impl TilingGeometry {
    pub fn positions(&self) -> usize {
        self.cols * self.rows
    }
}

/// Geometry for a collection's tile size.
pub fn plan_geometry(coll: &TileCollection, width: usize, height: usize) -> Result<TilingGeometry> {
    plan_geometry_dims(
        coll.tile_width(),
        coll.tile_height(),
        coll.thickness(),
        width,
        height,
    )
}

/// Geometry from raw tile dimensions: `W = w + (cols−1)·(w−t)` and likewise
/// for the height. Errors name the nearest expressible sizes.
pub fn plan_geometry_dims(
    tile_w: usize,
    tile_h: usize,
    thickness: usize,
    width: usize,
    height: usize,
) -> Result<TilingGeometry> {
    let stride_x = tile_w - thickness;
    let stride_y = tile_h - thickness;
    let cols = axis_steps("width", width, tile_w, stride_x)?;
    let rows = axis_steps("height", height, tile_h, stride_y)?;
    Ok(TilingGeometry {
        width,
        height,
        cols,
        rows,
        stride_x,
        stride_y,
        tile_w,
        tile_h,
    })
}

fn axis_steps(what: &str, extent: usize, tile: usize, stride: usize) -> Result<usize> {
    if extent < tile {
        return Err(Error::Geometry(format!(
            "{what} {extent} is smaller than the tile; nearest valid {what} is {tile}"
        )));
    }
    let rem = (extent - tile) % stride;
    if rem != 0 {
        let below = extent - rem;
        return Err(Error::Geometry(format!(
            "{what} {extent} is not expressible as {tile} plus a multiple of {stride}; \
             nearest valid {what}s are {below} and {}",
            below + stride
        )));
    }
    Ok((extent - tile) / stride + 1)
}

/// Per-position record of how many candidates were available and how many
/// payload bits the selection embedded.
#[derive(Debug, Clone)]
pub struct CodecTrace {
    cols: usize,
    rows: usize,
    counts: Vec<u32>,
    bits: Vec<u8>,
}

impl CodecTrace {
    fn with_capacity(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            counts: Vec::with_capacity(cols * rows),
            bits: Vec::with_capacity(cols * rows),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn candidate_count(&self, row: usize, col: usize) -> u32 {
        self.counts[row * self.cols + col]
    }

    pub fn bits_embedded(&self, row: usize, col: usize) -> u32 {
        self.bits[row * self.cols + col] as u32
    }

    /// Tab-separated grid of candidate counts, one tile-grid row per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    out.push('\t');
                }
                out.push_str(&self.candidate_count(r, c).to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Result of [`encode`].
#[derive(Debug, Clone)]
pub struct Encoded {
    pub matrix: BitMatrix,
    pub trace: CodecTrace,
    /// Payload bits actually consumed (the rest of the matrix is completed
    /// with zero index bits).
    pub bits_consumed: usize,
}

#[inline]
fn floor_log2(k: usize) -> u32 {
    debug_assert!(k >= 1);
    usize::BITS - 1 - k.leading_zeros()
}

/// Walks the tile grid in row-major order, tracking the interface ids each
/// placement leaves behind.
struct GridWalk<'a> {
    coll: &'a TileCollection,
    top_ids: Vec<u32>,
    left_id: u32,
}

impl<'a> GridWalk<'a> {
    fn new(coll: &'a TileCollection, geom: &TilingGeometry) -> Self {
        Self {
            coll,
            top_ids: vec![0; geom.cols],
            left_id: 0,
        }
    }

    #[inline]
    fn candidates(&self, row: usize, col: usize) -> &'a [u32] {
        let left = (col > 0).then_some(self.left_id);
        let top = (row > 0).then_some(self.top_ids[col]);
        self.coll.candidates_by_ids(left, top)
    }

    #[inline]
    fn advance(&mut self, col: usize, tile: u32) {
        let b = self.coll.boundary_ids(tile);
        self.left_id = b.right;
        self.top_ids[col] = b.bottom;
    }
}

/// Encodes `payload` into a valid `width × height` matrix.
pub fn encode(
    coll: &TileCollection,
    payload: &BitString,
    width: usize,
    height: usize,
) -> Result<Encoded> {
    let geom = plan_geometry(coll, width, height)?;
    let mut walk = GridWalk::new(coll, &geom);
    let mut trace = CodecTrace::with_capacity(geom.cols, geom.rows);
    let mut cells = vec![0u8; width * height];
    let mut cursor = 0usize;

    let (tile_w, tile_h) = (geom.tile_w, geom.tile_h);
    for row in 0..geom.rows {
        for col in 0..geom.cols {
            let cands = walk.candidates(row, col);
            let k = cands.len();
            if k == 0 {
                return Err(Error::Internal(format!(
                    "no candidate at tile position ({row}, {col}); the collection \
                     violates its progress invariant"
                )));
            }
            let b = floor_log2(k);
            let mut index = 0usize;
            for _ in 0..b {
                let bit = if cursor < payload.len() {
                    let v = payload.get(cursor);
                    cursor += 1;
                    v
                } else {
                    false
                };
                index = index << 1 | usize::from(bit);
            }
            let tile_id = cands[index];
            let tile = coll.tile(tile_id).matrix();

            let (y, x) = (row * geom.stride_y, col * geom.stride_x);
            debug_assert!(seams_agree(&cells, width, tile, y, x, col, row, &geom));
            for r in 0..tile_h {
                let dst = (y + r) * width + x;
                cells[dst..dst + tile_w]
                    .copy_from_slice(&tile.as_bits()[r * tile_w..(r + 1) * tile_w]);
            }

            trace.counts.push(k as u32);
            trace.bits.push(b as u8);
            walk.advance(col, tile_id);
        }
    }

    Ok(Encoded {
        matrix: BitMatrix::new(width, height, cells)?,
        trace,
        bits_consumed: cursor,
    })
}

/// Debug check: the tile agrees with everything already written under its
/// overlap strips.
#[allow(clippy::too_many_arguments)]
fn seams_agree(
    cells: &[u8],
    width: usize,
    tile: &BitMatrix,
    y: usize,
    x: usize,
    col: usize,
    row: usize,
    geom: &TilingGeometry,
) -> bool {
    let t_w = geom.tile_w - geom.stride_x;
    let t_h = geom.tile_h - geom.stride_y;
    if col > 0 {
        for r in 0..geom.tile_h {
            for c in 0..t_w {
                if cells[(y + r) * width + x + c] != tile.get(r, c) {
                    return false;
                }
            }
        }
    }
    if row > 0 {
        for r in 0..t_h {
            for c in 0..geom.tile_w {
                if cells[(y + r) * width + x + c] != tile.get(r, c) {
                    return false;
                }
            }
        }
    }
    true
}

/// Recovers the first `num_bits` payload bits from a matrix produced by
/// [`encode`] with the same collection.
pub fn decode(coll: &TileCollection, m: &BitMatrix, num_bits: usize) -> Result<BitString> {
    let geom = plan_geometry(coll, m.width(), m.height())?;
    let mut walk = GridWalk::new(coll, &geom);
    let mut out = BitString::new();

    'grid: for row in 0..geom.rows {
        for col in 0..geom.cols {
            if out.len() >= num_bits {
                break 'grid;
            }
            let cands = walk.candidates(row, col);
            let k = cands.len();
            if k == 0 {
                return Err(Error::Internal(format!(
                    "no candidate at tile position ({row}, {col}); the collection \
                     violates its progress invariant"
                )));
            }
            let b = floor_log2(k);

            let (y, x) = (row * geom.stride_y, col * geom.stride_x);
            let placed = m.submatrix(y, x, geom.tile_h, geom.tile_w)?;
            let tile_id = coll.tile_id(&placed).ok_or_else(|| Error::Corruption {
                row,
                col,
                reason: "the placed tile is not in the collection".into(),
            })?;
            let index = match cands.binary_search(&tile_id) {
                Ok(i) => i,
                Err(_) => {
                    return Err(Error::Corruption {
                        row,
                        col,
                        reason: "the placed tile does not match its context".into(),
                    })
                }
            };
            if index >= 1 << b {
                return Err(Error::Corruption {
                    row,
                    col,
                    reason: format!("candidate index {index} is unreachable with {b} index bits"),
                });
            }
            for i in (0..b).rev() {
                out.push(index >> i & 1 == 1);
            }
            walk.advance(col, tile_id);
        }
    }

    if out.len() < num_bits {
        return Err(Error::Parameter(format!(
            "requested {num_bits} bits but the matrix only carries {}",
            out.len()
        )));
    }
    Ok(out.prefix(num_bits))
}

/// Payload assumptions for [`capacity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadModel {
    /// Every selection takes index 0 (an all-zero payload).
    AllZeros,
    /// At each position, pick the candidate that minimizes the candidate
    /// count one step ahead in the walk. A pessimistic heuristic, not a
    /// proven lower bound over all payloads.
    WorstCaseGreedy,
}

/// Bits embeddable in a `width × height` matrix under a payload model.
pub fn capacity(
    coll: &TileCollection,
    width: usize,
    height: usize,
    model: PayloadModel,
) -> Result<usize> {
    let geom = plan_geometry(coll, width, height)?;
    let mut walk = GridWalk::new(coll, &geom);
    let mut total = 0usize;

    for row in 0..geom.rows {
        for col in 0..geom.cols {
            let cands = walk.candidates(row, col);
            let k = cands.len();
            if k == 0 {
                return Err(Error::Internal(format!(
                    "no candidate at tile position ({row}, {col})"
                )));
            }
            let b = floor_log2(k);
            total += b as usize;
            let choice = match model {
                PayloadModel::AllZeros => cands[0],
                PayloadModel::WorstCaseGreedy => {
                    if col + 1 < geom.cols {
                        // The next position sits right of us in the same
                        // row; its context is our right strip plus the
                        // already-fixed overlap above it.
                        let next_top = (row > 0).then(|| walk.top_ids[col + 1]);
                        *cands
                            .iter()
                            .min_by_key(|&&c| {
                                let right = coll.boundary_ids(c).right;
                                coll.candidates_by_ids(Some(right), next_top).len()
                            })
                            .unwrap()
                    } else {
                        // Last column: this choice does not constrain the
                        // next position (first of the next row).
                        cands[0]
                    }
                }
            };
            walk.advance(col, choice);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::elaborate;
    use crate::constraints::ConstraintSpec;
    use std::sync::OnceLock;

    fn coll4() -> &'static TileCollection {
        static C: OnceLock<TileCollection> = OnceLock::new();
        C.get_or_init(|| elaborate(4, 4, &ConstraintSpec::preset_rll13_2d(), 1).unwrap())
    }

    /// 7-bit ASCII codes, most significant bit first.
    fn ascii7(text: &str) -> BitString {
        let mut s = BitString::new();
        for ch in text.chars() {
            let code = ch as u32;
            assert!(code < 128);
            for i in (0..7).rev() {
                s.push(code >> i & 1 == 1);
            }
        }
        s
    }

    #[test]
    fn bitstring_basics() {
        let s = BitString::from_bytes(&[0b1010_0000, 0xff]);
        assert_eq!(s.len(), 16);
        assert!(s.get(0));
        assert!(!s.get(1));
        assert!(s.get(8));
        let p = s.prefix(3);
        assert_eq!(p.to_bytes(), vec![0b1010_0000]);
        let t = BitString::from_bytes_truncated(&[0xff], 3).unwrap();
        assert_eq!(t.to_bytes(), vec![0b1110_0000]);
        assert_eq!(t.len(), 3);
        assert!(BitString::from_bytes_truncated(&[0xff], 9).is_err());
    }

    #[test]
    fn geometry_examples() {
        let g = plan_geometry(coll4(), 30, 15).unwrap();
        assert_eq!((g.cols, g.rows), (27, 12));
        assert_eq!((g.stride_x, g.stride_y), (1, 1));

        let g = plan_geometry(coll4(), 4, 4).unwrap();
        assert_eq!((g.cols, g.rows), (1, 1));

        let g = plan_geometry_dims(7, 7, 3, 11, 11).unwrap();
        assert_eq!((g.cols, g.rows), (2, 2));

        match plan_geometry_dims(7, 7, 3, 12, 11) {
            Err(Error::Geometry(msg)) => {
                assert!(msg.contains("11") && msg.contains("15"), "{msg}");
            }
            other => panic!("expected geometry error, got {other:?}"),
        }
        assert!(plan_geometry(coll4(), 3, 15).is_err());
    }

    #[test]
    fn empty_payload_places_lexicographically_first_tile() {
        let enc = encode(coll4(), &BitString::new(), 4, 4).unwrap();
        assert_eq!(&enc.matrix, coll4().tile(0).matrix());
        assert_eq!(enc.bits_consumed, 0);
        assert_eq!(enc.trace.candidate_count(0, 0), 213);
        assert_eq!(enc.trace.bits_embedded(0, 0), 7);
        assert!(coll4().spec().is_valid(&enc.matrix));
    }

    #[test]
    fn hello_world_round_trip() {
        let payload = ascii7("Hello world!");
        assert_eq!(payload.len(), 84);
        let enc = encode(coll4(), &payload, 30, 15).unwrap();
        assert!(enc.bits_consumed >= 84);
        assert!(coll4().spec().is_valid(&enc.matrix));
        assert_eq!(enc.trace.candidate_count(0, 0), 213);
        let back = decode(coll4(), &enc.matrix, 84).unwrap();
        assert_eq!(back, payload);
    }

    #[test]
    fn trace_matches_context_shapes() {
        let enc = encode(coll4(), &ascii7("trace"), 30, 15).unwrap();
        let trace = &enc.trace;
        assert_eq!((trace.cols(), trace.rows()), (27, 12));
        for row in 0..trace.rows() {
            for col in 0..trace.cols() {
                let k = trace.candidate_count(row, col);
                match (row, col) {
                    (0, 0) => assert_eq!(k, 213),
                    (0, _) | (_, 0) => assert!(k >= 1),
                    _ => assert!((1..=2).contains(&k), "interior count {k}"),
                }
                assert_eq!(trace.bits_embedded(row, col), floor_log2(k as usize));
            }
        }
        let tsv = trace.to_tsv();
        assert_eq!(tsv.lines().count(), 12);
        assert!(tsv.starts_with("213\t"));
    }

    #[test]
    fn decode_of_empty_matrix_prefix() {
        let enc = encode(coll4(), &BitString::new(), 4, 4).unwrap();
        let bits = decode(coll4(), &enc.matrix, 0).unwrap();
        assert!(bits.is_empty());
    }

    #[test]
    fn decode_rejects_corruption() {
        let enc = encode(coll4(), &ascii7("corrupt me"), 30, 15).unwrap();
        // Flip one interior bit: either the tile leaves the collection or it
        // no longer matches its context.
        let mut bits = enc.matrix.as_bits().to_vec();
        bits[7 * 30 + 11] ^= 1;
        let bad = BitMatrix::new(30, 15, bits).unwrap();
        match decode(coll4(), &bad, 84) {
            Err(Error::Corruption { .. }) => {}
            other => panic!("expected corruption error, got {other:?}"),
        }
    }

    #[test]
    fn decode_rejects_excessive_num_bits() {
        let enc = encode(coll4(), &BitString::new(), 4, 4).unwrap();
        assert!(matches!(
            decode(coll4(), &enc.matrix, 8),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(coll4(), 4, 4, PayloadModel::AllZeros).unwrap(), 7);
        let z30 = capacity(coll4(), 30, 15, PayloadModel::AllZeros).unwrap();
        assert!(z30 >= 84, "all-zeros capacity {z30}");
        let g30 = capacity(coll4(), 30, 15, PayloadModel::WorstCaseGreedy).unwrap();
        assert!(g30 <= z30);
        // The all-zeros number matches a real encode of an all-zero payload.
        let enc = encode(coll4(), &BitString::from_bytes(&[0; 64]), 30, 15).unwrap();
        assert_eq!(enc.bits_consumed, z30.min(64 * 8));
    }

    #[test]
    fn round_trips_on_odd_geometries() {
        let payload = ascii7("The quick brown fox");
        for (w, h) in [(4, 4), (5, 7), (30, 4), (4, 30), (21, 18)] {
            let enc = encode(coll4(), &payload, w, h).unwrap();
            assert!(coll4().spec().is_valid(&enc.matrix), "{w}x{h}");
            let back = decode(coll4(), &enc.matrix, enc.bits_consumed).unwrap();
            assert_eq!(back, payload.prefix(enc.bits_consumed), "{w}x{h}");
        }
    }
}
