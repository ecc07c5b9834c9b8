//! The fixed-frame baseline codec.
//!
//! Every tile shares the same frame — corner, top/bottom edge, left/right
//! edge — and differs only in its centre. The shared frame makes all
//! overlaps identical, so any centre may follow any other at the fixed
//! stride and the code is fixed-rate: `floor(log2 N)` bits per tile
//! position, with the frame cells carrying no payload at all.
//!
//! The frame itself is found by a budgeted depth-first search over the
//! frame cells with incremental forbidden-pattern pruning, scored by the
//! number of admissible centres.

use std::collections::HashMap;

use crate::bitgrid::BitMatrix;
use crate::codec::{plan_geometry_dims, BitString, TilingGeometry};
use crate::collection::{parse_pattern_section, push_pattern_section};
use crate::constraints::ConstraintSpec;
use crate::error::{Error, Result};

/// Largest centre region the enumerator will brute-force.
const MAX_CENTER_AREA: usize = 20;

/// The shared tile frame: `corner` is stamped at all four corners,
/// `top_edge` along the top and bottom, `side_edge` along the left and
/// right. The centre hole is `(w−2t) × (h−2t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NomFrame {
    w: usize,
    h: usize,
    thickness: usize,
    corner: BitMatrix,
    top_edge: BitMatrix,
    side_edge: BitMatrix,
}

impl NomFrame {
    /// Validates part dimensions, frame validity (ignoring the hole), and
    /// self-tileability of a 2×2 frame composition at the overlap stride.
    pub fn new(
        spec: &ConstraintSpec,
        w: usize,
        h: usize,
        corner: BitMatrix,
        top_edge: BitMatrix,
        side_edge: BitMatrix,
    ) -> Result<Self> {
        let t = spec.thickness();
        if w < 2 * t + 1 || h < 2 * t + 1 {
            return Err(Error::Parameter(format!(
                "frame needs a non-empty centre: {w}x{h} is too small for thickness {t}"
            )));
        }
        if (corner.width(), corner.height()) != (t, t) {
            return Err(Error::Parameter(format!(
                "corner must be {t}x{t}, got {}x{}",
                corner.width(),
                corner.height()
            )));
        }
        if (top_edge.width(), top_edge.height()) != (w - 2 * t, t) {
            return Err(Error::Parameter(format!(
                "top edge must be {}x{t}, got {}x{}",
                w - 2 * t,
                top_edge.width(),
                top_edge.height()
            )));
        }
        if (side_edge.width(), side_edge.height()) != (t, h - 2 * t) {
            return Err(Error::Parameter(format!(
                "side edge must be {t}x{}, got {}x{}",
                h - 2 * t,
                side_edge.width(),
                side_edge.height()
            )));
        }
        let frame = Self {
            w,
            h,
            thickness: t,
            corner,
            top_edge,
            side_edge,
        };
        let (cells, mask) = frame.cells_and_mask();
        if !spec.is_valid_masked(&cells, &mask) {
            return Err(Error::Frame(
                "the assembled frame contains a forbidden pattern".into(),
            ));
        }
        let (cells2, mask2) = frame.composed_2x2(None, None, None, None)?;
        if !spec.is_valid_masked(&cells2, &mask2) {
            return Err(Error::Frame(
                "abutting two frames at the overlap stride creates a forbidden pattern".into(),
            ));
        }
        Ok(frame)
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn thickness(&self) -> usize {
        self.thickness
    }

    pub fn corner(&self) -> &BitMatrix {
        &self.corner
    }

    pub fn top_edge(&self) -> &BitMatrix {
        &self.top_edge
    }

    pub fn side_edge(&self) -> &BitMatrix {
        &self.side_edge
    }

    pub fn center_width(&self) -> usize {
        self.w - 2 * self.thickness
    }

    pub fn center_height(&self) -> usize {
        self.h - 2 * self.thickness
    }

    /// The frame as a full-tile matrix (hole zeroed) plus a mask marking
    /// the frame cells.
    pub fn cells_and_mask(&self) -> (BitMatrix, BitMatrix) {
        let t = self.thickness;
        let (w, h) = (self.w, self.h);
        let mut cells = BitMatrix::zeros(w, h).unwrap();
        for (part, y, x) in [
            (&self.corner, 0, 0),
            (&self.corner, 0, w - t),
            (&self.corner, h - t, 0),
            (&self.corner, h - t, w - t),
            (&self.top_edge, 0, t),
            (&self.top_edge, h - t, t),
            (&self.side_edge, t, 0),
            (&self.side_edge, t, w - t),
        ] {
            cells = cells.overlay(part, y, x).unwrap();
        }
        let mask = BitMatrix::from_fn(w, h, |r, c| {
            u8::from(!(r >= t && r < h - t && c >= t && c < w - t))
        })
        .unwrap();
        (cells, mask)
    }

    /// A complete tile with the given centre.
    pub fn tile_with_center(&self, center: &BitMatrix) -> Result<BitMatrix> {
        if (center.width(), center.height()) != (self.center_width(), self.center_height()) {
            return Err(Error::Parameter(format!(
                "centre must be {}x{}, got {}x{}",
                self.center_width(),
                self.center_height(),
                center.width(),
                center.height()
            )));
        }
        let (cells, _) = self.cells_and_mask();
        cells.overlay(center, self.thickness, self.thickness)
    }

    /// Four tiles composed at the overlap stride, in the layout
    /// `tl tr / bl br`. A `None` centre leaves that hole unfilled; the mask
    /// marks filled cells.
    fn composed_2x2(
        &self,
        tl: Option<&BitMatrix>,
        tr: Option<&BitMatrix>,
        bl: Option<&BitMatrix>,
        br: Option<&BitMatrix>,
    ) -> Result<(BitMatrix, BitMatrix)> {
        let t = self.thickness;
        let (sx, sy) = (self.w - t, self.h - t);
        let (big_w, big_h) = (self.w + sx, self.h + sy);
        let mut cells = BitMatrix::zeros(big_w, big_h).unwrap();
        let mut mask = BitMatrix::zeros(big_w, big_h).unwrap();
        let (frame_cells, frame_mask) = self.cells_and_mask();
        let full_mask = BitMatrix::from_fn(self.w, self.h, |_, _| 1).unwrap();
        for (center, y, x) in [(tl, 0, 0), (tr, 0, sx), (bl, sy, 0), (br, sy, sx)] {
            match center {
                Some(c) => {
                    let tile = self.tile_with_center(c)?;
                    cells = cells.overlay(&tile, y, x)?;
                    mask = mask.overlay(&full_mask, y, x)?;
                }
                None => {
                    cells = cells.overlay(&frame_cells, y, x)?;
                    mask = mask.overlay(&frame_mask, y, x)?;
                }
            }
        }
        Ok((cells, mask))
    }
}

/// A frame plus its admissible centres, in lexicographic order.
#[derive(Debug, Clone)]
pub struct NomCollection {
    spec: ConstraintSpec,
    frame: NomFrame,
    centers: Vec<BitMatrix>,
    index: HashMap<BitMatrix, u32>,
}

impl NomCollection {
    pub fn spec(&self) -> &ConstraintSpec {
        &self.spec
    }

    pub fn frame(&self) -> &NomFrame {
        &self.frame
    }

    pub fn centers(&self) -> &[BitMatrix] {
        &self.centers
    }

    /// Collection size N.
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Fixed payload width per tile position.
    pub fn bits_per_tile(&self) -> u32 {
        usize::BITS - 1 - self.centers.len().leading_zeros()
    }

    /// Serializes the fixed-frame collection file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("tilecode-nom v1\n");
        out.push_str(&format!(
            "tile {}x{} thickness {}\n",
            self.frame.w, self.frame.h, self.frame.thickness
        ));
        push_pattern_section(&mut out, "patterns", self.spec.forbidden());
        push_pattern_section(&mut out, "corner", std::slice::from_ref(&self.frame.corner));
        push_pattern_section(
            &mut out,
            "top_edge",
            std::slice::from_ref(&self.frame.top_edge),
        );
        push_pattern_section(
            &mut out,
            "side_edge",
            std::slice::from_ref(&self.frame.side_edge),
        );
        push_pattern_section(&mut out, "centers", &self.centers);
        out
    }

    /// Parses the fixed-frame collection format and re-derives the centre
    /// set, failing loudly when the stored centres do not match.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("tilecode-nom v1") {
            return Err(Error::Format(
                "expected header line `tilecode-nom v1`".into(),
            ));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::Format("missing tile metadata line".into()))?;
        let toks: Vec<&str> = meta.split_whitespace().collect();
        let (w, h, thickness): (usize, usize, usize) = match toks.as_slice() {
            ["tile", dims, "thickness", t] => {
                let (w, h) = dims
                    .split_once('x')
                    .ok_or_else(|| Error::Format(format!("malformed metadata {meta:?}")))?;
                (
                    w.parse()
                        .map_err(|_| Error::Format("bad tile width".into()))?,
                    h.parse()
                        .map_err(|_| Error::Format("bad tile height".into()))?,
                    t.parse()
                        .map_err(|_| Error::Format("bad thickness".into()))?,
                )
            }
            _ => return Err(Error::Format(format!("malformed metadata {meta:?}"))),
        };
        let rest: Vec<&str> = lines.collect();
        let (patterns, rest) = parse_pattern_section(&rest, "patterns")?;
        let (corners, rest) = parse_pattern_section(&rest, "corner")?;
        let (tops, rest) = parse_pattern_section(&rest, "top_edge")?;
        let (sides, rest) = parse_pattern_section(&rest, "side_edge")?;
        let (centers, _) = parse_pattern_section(&rest, "centers")?;
        let one = |mut v: Vec<BitMatrix>, what: &str| -> Result<BitMatrix> {
            if v.len() != 1 {
                return Err(Error::Format(format!("expected exactly one {what} block")));
            }
            Ok(v.remove(0))
        };
        let spec = ConstraintSpec::new(patterns)?;
        if spec.thickness() != thickness {
            return Err(Error::Format(format!(
                "declared thickness {thickness} does not match the patterns (derived {})",
                spec.thickness()
            )));
        }
        let frame = NomFrame::new(
            &spec,
            w,
            h,
            one(corners, "corner")?,
            one(tops, "top_edge")?,
            one(sides, "side_edge")?,
        )?;
        let coll = nom_enumerate_centers(&frame, &spec)?;
        if coll.centers != centers {
            return Err(Error::Verification(format!(
                "stored centre list ({}) does not match the {} admissible centres of this frame",
                centers.len(),
                coll.centers.len()
            )));
        }
        Ok(coll)
    }
}

/// Enumerates every centre whose tile is valid alone and under 2×2
/// composition with itself and with every other admissible centre.
pub fn nom_enumerate_centers(frame: &NomFrame, spec: &ConstraintSpec) -> Result<NomCollection> {
    let (cw, ch) = (frame.center_width(), frame.center_height());
    let area = cw * ch;
    if area > MAX_CENTER_AREA {
        return Err(Error::Parameter(format!(
            "centre region {cw}x{ch} is too large to enumerate (limit {MAX_CENTER_AREA} cells)"
        )));
    }

    // Individually valid, then self-composable.
    let mut centers: Vec<BitMatrix> = Vec::new();
    for code in 0u64..1 << area {
        let bits: Vec<u8> = (0..area)
            .map(|i| ((code >> (area - 1 - i)) & 1) as u8)
            .collect();
        let center = BitMatrix::new(cw, ch, bits)?;
        let tile = frame.tile_with_center(&center)?;
        if !spec.is_valid(&tile) {
            continue;
        }
        let (cells, mask) =
            frame.composed_2x2(Some(&center), Some(&center), Some(&center), Some(&center))?;
        debug_assert!(mask.as_bits().iter().all(|&b| b == 1));
        if spec.is_valid(&cells) {
            centers.push(center);
        }
    }

    // Pairwise seams. The overlap-thickness argument makes failures
    // impossible for well-formed frames; dropping the lexicographically
    // later centre keeps the result deterministic if one ever appears.
    'prune: loop {
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let (cells, _) = frame.composed_2x2(
                    Some(&centers[i]),
                    Some(&centers[j]),
                    Some(&centers[j]),
                    Some(&centers[i]),
                )?;
                if !spec.is_valid(&cells) {
                    centers.remove(j);
                    continue 'prune;
                }
            }
        }
        break;
    }

    if centers.is_empty() {
        return Err(Error::EmptyCollection(
            "no centre completes this frame validly".into(),
        ));
    }
    let index = centers
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i as u32))
        .collect();
    Ok(NomCollection {
        spec: spec.clone(),
        frame: frame.clone(),
        centers,
        index,
    })
}

/// Budgeted depth-first search for the frame admitting the most centres.
///
/// Deterministic given the budget: cells are assigned in a fixed order (0
/// before 1) and only a strictly larger centre count replaces the
/// incumbent. Exhausting the budget returns the best frame found so far;
/// finding none is a search failure.
pub fn nom_search_frame(
    w: usize,
    h: usize,
    spec: &ConstraintSpec,
    budget: u64,
) -> Result<NomFrame> {
    let t = spec.thickness();
    if w < 2 * t + 1 || h < 2 * t + 1 {
        return Err(Error::Parameter(format!(
            "the centre region would be empty: need at least {0}x{0} tiles for thickness {t}",
            2 * t + 1
        )));
    }

    // One slot per frame part cell; stamping maps each slot to its frame
    // positions.
    let mut slots: Vec<Vec<(usize, usize)>> = Vec::new();
    for r in 0..t {
        for c in 0..t {
            slots.push(vec![
                (r, c),
                (r, w - t + c),
                (h - t + r, c),
                (h - t + r, w - t + c),
            ]);
        }
    }
    let corner_slots = slots.len();
    for r in 0..t {
        for c in 0..w - 2 * t {
            slots.push(vec![(r, t + c), (h - t + r, t + c)]);
        }
    }
    let top_slots = slots.len() - corner_slots;
    for r in 0..h - 2 * t {
        for c in 0..t {
            slots.push(vec![(t + r, c), (t + r, w - t + c)]);
        }
    }

    let mut search = FrameSearch {
        spec,
        w,
        h,
        t,
        slots: &slots,
        corner_slots,
        top_slots,
        cells: vec![0u8; w * h],
        filled: vec![false; w * h],
        budget,
        nodes: 0,
        best: None,
    };
    search.descend(0);

    match search.best {
        Some((_, frame)) => Ok(frame),
        None if search.nodes > budget => Err(Error::SearchFailed(format!(
            "budget of {budget} nodes exhausted with no feasible frame"
        ))),
        None => Err(Error::SearchFailed(format!(
            "no {w}x{h} frame admits any centre under these constraints"
        ))),
    }
}

struct FrameSearch<'a> {
    spec: &'a ConstraintSpec,
    w: usize,
    h: usize,
    t: usize,
    slots: &'a [Vec<(usize, usize)>],
    corner_slots: usize,
    top_slots: usize,
    cells: Vec<u8>,
    filled: Vec<bool>,
    budget: u64,
    nodes: u64,
    best: Option<(usize, NomFrame)>,
}

impl FrameSearch<'_> {
    fn descend(&mut self, slot: usize) {
        if self.nodes > self.budget {
            return;
        }
        if slot == self.slots.len() {
            self.score_leaf();
            return;
        }
        for bit in 0..=1u8 {
            self.nodes += 1;
            if self.nodes > self.budget {
                return;
            }
            for &(r, c) in &self.slots[slot] {
                self.cells[r * self.w + c] = bit;
                self.filled[r * self.w + c] = true;
            }
            if self.slots[slot]
                .iter()
                .all(|&(r, c)| !self.forbidden_through(r, c))
            {
                self.descend(slot + 1);
            }
        }
        for &(r, c) in &self.slots[slot] {
            self.filled[r * self.w + c] = false;
        }
    }

    /// Any forbidden pattern fully inside the filled cells through (r, c)?
    fn forbidden_through(&self, r: usize, c: usize) -> bool {
        'pattern: for pat in self.spec.forbidden() {
            let (pw, ph) = (pat.width(), pat.height());
            if pw > self.w || ph > self.h {
                continue;
            }
            let top_lo = (r + 1).saturating_sub(ph);
            let left_lo = (c + 1).saturating_sub(pw);
            for top in top_lo..=r.min(self.h - ph) {
                'place: for left in left_lo..=c.min(self.w - pw) {
                    for pr in 0..ph {
                        for pc in 0..pw {
                            let idx = (top + pr) * self.w + (left + pc);
                            if !self.filled[idx] {
                                continue 'place;
                            }
                            if self.cells[idx] != pat.get(pr, pc) {
                                continue 'place;
                            }
                        }
                    }
                    return true;
                }
            }
            continue 'pattern;
        }
        false
    }

    fn score_leaf(&mut self) {
        let t = self.t;
        let corner = BitMatrix::from_fn(t, t, |r, c| self.cells[r * self.w + c]).unwrap();
        let mut it = self.slots[self.corner_slots..self.corner_slots + self.top_slots]
            .iter()
            .map(|ps| ps[0]);
        let top_edge = BitMatrix::from_fn(self.w - 2 * t, t, |_, _| {
            let (r, c) = it.next().unwrap();
            self.cells[r * self.w + c]
        })
        .unwrap();
        let mut it = self.slots[self.corner_slots + self.top_slots..]
            .iter()
            .map(|ps| ps[0]);
        let side_edge = BitMatrix::from_fn(t, self.h - 2 * t, |_, _| {
            let (r, c) = it.next().unwrap();
            self.cells[r * self.w + c]
        })
        .unwrap();

        let Ok(frame) = NomFrame::new(self.spec, self.w, self.h, corner, top_edge, side_edge)
        else {
            return;
        };
        let Ok(coll) = nom_enumerate_centers(&frame, self.spec) else {
            return;
        };
        let n = coll.len();
        if self.best.as_ref().is_none_or(|(best_n, _)| n > *best_n) {
            self.best = Some((n, frame));
        }
    }
}

/// Fixed-rate encoding: every tile position consumes exactly
/// `floor(log2 N)` payload bits.
pub fn nom_encode(
    coll: &NomCollection,
    payload: &BitString,
    width: usize,
    height: usize,
) -> Result<BitMatrix> {
    let geom = nom_geometry(coll, width, height)?;
    let b = coll.bits_per_tile();
    let mut cells = vec![0u8; width * height];
    let frame = &coll.frame;
    let mut cursor = 0usize;
    let mut tiles: HashMap<u32, BitMatrix> = HashMap::new();
    for row in 0..geom.rows {
        for col in 0..geom.cols {
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
            let tile = tiles
                .entry(index as u32)
                .or_insert_with(|| frame.tile_with_center(&coll.centers[index]).unwrap());
            let (y, x) = (row * geom.stride_y, col * geom.stride_x);
            for r in 0..geom.tile_h {
                let dst = (y + r) * width + x;
                cells[dst..dst + geom.tile_w]
                    .copy_from_slice(&tile.as_bits()[r * geom.tile_w..(r + 1) * geom.tile_w]);
            }
        }
    }
    BitMatrix::new(width, height, cells)
}

/// Inverse of [`nom_encode`]: reads each centre back by index.
pub fn nom_decode(coll: &NomCollection, m: &BitMatrix, num_bits: usize) -> Result<BitString> {
    let geom = nom_geometry(coll, m.width(), m.height())?;
    let b = coll.bits_per_tile();
    let t = coll.frame.thickness;
    let (cw, ch) = (coll.frame.center_width(), coll.frame.center_height());
    let mut out = BitString::new();
    'grid: for row in 0..geom.rows {
        for col in 0..geom.cols {
            if out.len() >= num_bits {
                break 'grid;
            }
            let (y, x) = (row * geom.stride_y, col * geom.stride_x);
            let center = m.submatrix(y + t, x + t, ch, cw)?;
            let index = coll
                .index
                .get(&center)
                .copied()
                .ok_or_else(|| Error::Corruption {
                    row,
                    col,
                    reason: "the centre is not in the collection".into(),
                })?;
            if u64::from(index) >= 1u64 << b {
                return Err(Error::Corruption {
                    row,
                    col,
                    reason: format!("centre index {index} is unreachable with {b} index bits"),
                });
            }
            for i in (0..b).rev() {
                out.push(index >> i & 1 == 1);
            }
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

/// Exact payload size of a `width × height` matrix: positions × bits/tile.
pub fn nom_capacity(coll: &NomCollection, width: usize, height: usize) -> Result<usize> {
    let geom = nom_geometry(coll, width, height)?;
    Ok(geom.positions() * coll.bits_per_tile() as usize)
}

fn nom_geometry(coll: &NomCollection, width: usize, height: usize) -> Result<TilingGeometry> {
    plan_geometry_dims(
        coll.frame.w,
        coll.frame.h,
        coll.frame.thickness,
        width,
        height,
    )
}
