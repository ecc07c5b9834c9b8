//! Tile collections: overlap sets, the C1/C2 invariants, and the offline
//! elaboration that establishes them.
//!
//! A context only ever confronts the encoder through interfaces that tiles
//! can actually produce: the left constraint is some tile's *right* strip,
//! the top constraint some tile's *bottom* strip. Elaboration therefore
//! searches for the largest tile set such that
//!
//! * every corner-compatible pair of producible interfaces has at least
//!   `min_candidates` tiles carrying it as their `(left, top)` strips,
//! * every producible right interface has at least `min_candidates` tiles
//!   consuming it as their left strip (top-row progress), and
//! * every producible bottom interface has at least `min_candidates`
//!   top-strip consumers (left-column progress).
//!
//! Interfaces lacking consumers force the eviction of their producers; an
//! uncovered compatible pair can be repaired by evicting either side, so
//! the elaborator branches on the choice and keeps the largest stable
//! result (branch and bound with memoized states, deterministic order).
//! This offline step is the expensive, possibly-failing part of the whole
//! technique; a work limit caps it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::bitgrid::BitMatrix;
use crate::constraints::ConstraintSpec;
use crate::error::{ElaborationStep, Error, Result};
use crate::tiles::{boundaries, enumerate_valid_tiles_with_limit, Tile, DEFAULT_WORK_LIMIT};

/// The admissible overlap strips: `horizontal` holds `thickness × h`
/// column strips shared by side-by-side neighbours, `vertical` holds
/// `w × thickness` row strips shared by stacked neighbours. Both are kept
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSets {
    horizontal: Vec<BitMatrix>,
    vertical: Vec<BitMatrix>,
}

impl OverlapSets {
    pub fn horizontal(&self) -> &[BitMatrix] {
        &self.horizontal
    }

    pub fn vertical(&self) -> &[BitMatrix] {
        &self.vertical
    }
}

/// The pair of overlaps constraining an interior tile position: `left` is
/// imposed by the left neighbour, `top` by the neighbour above. The pair is
/// compatible when the top `thickness × thickness` corner of `left` equals
/// the leftmost corner of `top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub left: BitMatrix,
    pub top: BitMatrix,
}

/// The four context shapes a tile position can have on the surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionContext {
    /// Top-left position: nothing constrains the choice.
    First,
    /// Top row: only the left neighbour constrains.
    TopRow(BitMatrix),
    /// Leftmost column: only the neighbour above constrains.
    LeftColumn(BitMatrix),
    /// Everywhere else.
    Interior(Context),
}

/// Boundary-strip ids of one tile, indexing into the collection's overlap
/// sets (`left`/`right` into horizontal, `top`/`bottom` into vertical).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryIds {
    pub left: u32,
    pub right: u32,
    pub top: u32,
    pub bottom: u32,
}

/// An elaborated collection: tiles, overlap sets, and the context-indexed
/// candidate tables the codec selects from in constant time.
#[derive(Debug, Clone)]
pub struct TileCollection {
    spec: ConstraintSpec,
    w: usize,
    h: usize,
    min_candidates: usize,
    tiles: Vec<Tile>,
    overlaps: OverlapSets,
    bounds: Vec<BoundaryIds>,
    h_corners: Vec<BitMatrix>,
    v_corners: Vec<BitMatrix>,
    tile_lookup: HashMap<BitMatrix, u32>,
    all: Vec<u32>,
    row_table: Vec<Vec<u32>>,
    column_table: Vec<Vec<u32>>,
    candidate_table: HashMap<(u32, u32), Vec<u32>>,
}

const EMPTY: &[u32] = &[];

impl TileCollection {
    pub fn spec(&self) -> &ConstraintSpec {
        &self.spec
    }

    pub fn tile_width(&self) -> usize {
        self.w
    }

    pub fn tile_height(&self) -> usize {
        self.h
    }

    pub fn thickness(&self) -> usize {
        self.spec.thickness()
    }

    pub fn min_candidates(&self) -> usize {
        self.min_candidates
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, index: u32) -> &Tile {
        &self.tiles[index as usize]
    }

    /// Collection size N.
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn overlaps(&self) -> &OverlapSets {
        &self.overlaps
    }

    pub fn boundary_ids(&self, tile: u32) -> BoundaryIds {
        self.bounds[tile as usize]
    }

    pub fn horizontal_id(&self, overlap: &BitMatrix) -> Option<u32> {
        self.overlaps
            .horizontal
            .binary_search(overlap)
            .ok()
            .map(|i| i as u32)
    }

    pub fn vertical_id(&self, overlap: &BitMatrix) -> Option<u32> {
        self.overlaps
            .vertical
            .binary_search(overlap)
            .ok()
            .map(|i| i as u32)
    }

    /// Index of a tile by its exact contents.
    pub fn tile_id(&self, matrix: &BitMatrix) -> Option<u32> {
        self.tile_lookup.get(matrix).copied()
    }

    /// Candidate tile indices for a context, in canonical (index) order.
    pub fn candidates(&self, ctx: &SelectionContext) -> Result<&[u32]> {
        match ctx {
            SelectionContext::First => Ok(&self.all),
            SelectionContext::TopRow(left) => {
                let id = self.horizontal_id(left).ok_or_else(|| {
                    Error::UnknownOverlap("left overlap is not in the horizontal set".into())
                })?;
                Ok(&self.row_table[id as usize])
            }
            SelectionContext::LeftColumn(top) => {
                let id = self.vertical_id(top).ok_or_else(|| {
                    Error::UnknownOverlap("top overlap is not in the vertical set".into())
                })?;
                Ok(&self.column_table[id as usize])
            }
            SelectionContext::Interior(Context { left, top }) => {
                let l = self.horizontal_id(left).ok_or_else(|| {
                    Error::UnknownOverlap("left overlap is not in the horizontal set".into())
                })?;
                let t = self.vertical_id(top).ok_or_else(|| {
                    Error::UnknownOverlap("top overlap is not in the vertical set".into())
                })?;
                if self.h_corners[l as usize] != self.v_corners[t as usize] {
                    return Err(Error::IncompatibleContext(
                        "left and top overlaps disagree on their shared corner".into(),
                    ));
                }
                Ok(self.interior_candidates(l, t))
            }
        }
    }

    /// Table lookups by overlap id; `None` means unconstrained on that side.
    pub fn candidates_by_ids(&self, left: Option<u32>, top: Option<u32>) -> &[u32] {
        match (left, top) {
            (None, None) => &self.all,
            (Some(l), None) => &self.row_table[l as usize],
            (None, Some(t)) => &self.column_table[t as usize],
            (Some(l), Some(t)) => self.interior_candidates(l, t),
        }
    }

    fn interior_candidates(&self, left: u32, top: u32) -> &[u32] {
        self.candidate_table
            .get(&(left, top))
            .map(Vec::as_slice)
            .unwrap_or(EMPTY)
    }

    /// Distinct `(left, top)` contexts realized by the tiles, sorted.
    /// These are the contexts of the candidate table.
    pub fn realized_contexts(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self.candidate_table.keys().copied().collect();
        out.sort_unstable();
        out
    }

    /// Horizontal-overlap ids that occur as some tile's right strip: the
    /// left constraints that can actually confront the encoder.
    pub fn producible_rights(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.bounds.iter().map(|b| b.right).collect();
        set.into_iter().collect()
    }

    /// Vertical-overlap ids that occur as some tile's bottom strip.
    pub fn producible_bottoms(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.bounds.iter().map(|b| b.bottom).collect();
        set.into_iter().collect()
    }

    /// Serializes the collection file format (only tiles are stored; the
    /// tables are rebuilt and re-verified on load).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("tilecode-collection v1\n");
        out.push_str(&format!(
            "tile {}x{} thickness {} min_candidates {}\n",
            self.w,
            self.h,
            self.thickness(),
            self.min_candidates
        ));
        push_pattern_section(&mut out, "patterns", self.spec.forbidden());
        let tile_ms: Vec<BitMatrix> = self.tiles.iter().map(|t| t.matrix().clone()).collect();
        push_pattern_section(&mut out, "tiles", &tile_ms);
        out
    }

    /// Parses the collection file format, rebuilds the tables, and fails
    /// loudly when any invariant does not hold.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().map(str::trim);
        if header != Some("tilecode-collection v1") {
            return Err(Error::Format(
                "expected header line `tilecode-collection v1`".into(),
            ));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::Format("missing tile metadata line".into()))?;
        let (w, h, thickness, min_candidates) = parse_meta_line(meta)?;
        let rest: Vec<&str> = lines.collect();
        let (patterns, rest) = parse_pattern_section(&rest, "patterns")?;
        let (tile_ms, rest) = parse_pattern_section(&rest, "tiles")?;
        if rest.iter().any(|l| !l.trim().is_empty()) {
            return Err(Error::Format("trailing content after tile blocks".into()));
        }
        let spec = ConstraintSpec::new(patterns)?;
        if spec.thickness() != thickness {
            return Err(Error::Format(format!(
                "declared thickness {thickness} does not match the patterns \
                 (derived {})",
                spec.thickness()
            )));
        }
        let tiles = tile_ms.into_iter().map(Tile::new).collect();
        let coll = assemble(spec, w, h, tiles, min_candidates)?;
        let report = verify_collection(&coll);
        if !report.passed() {
            return Err(Error::Verification(report.to_string()));
        }
        Ok(coll)
    }
}

pub(crate) fn push_pattern_section(out: &mut String, name: &str, items: &[BitMatrix]) {
    out.push_str(&format!("{name} {}\n", items.len()));
    for m in items {
        for r in 0..m.height() {
            for &b in m.row(r) {
                out.push(if b == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out.push('\n');
    }
}

fn parse_meta_line(line: &str) -> Result<(usize, usize, usize, usize)> {
    let bad = || Error::Format(format!("malformed tile metadata line {line:?}"));
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.as_slice() {
        ["tile", dims, "thickness", t, "min_candidates", m] => {
            let (w, h) = dims.split_once('x').ok_or_else(bad)?;
            Ok((
                w.parse().map_err(|_| bad())?,
                h.parse().map_err(|_| bad())?,
                t.parse().map_err(|_| bad())?,
                m.parse().map_err(|_| bad())?,
            ))
        }
        _ => Err(bad()),
    }
}

pub(crate) fn parse_pattern_section<'a>(
    lines: &[&'a str],
    name: &str,
) -> Result<(Vec<BitMatrix>, Vec<&'a str>)> {
    let mut it = lines.iter();
    let header = loop {
        match it.next() {
            Some(l) if l.trim().is_empty() => continue,
            Some(l) => break *l,
            None => return Err(Error::Format(format!("missing `{name}` section"))),
        }
    };
    let count: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        [n, c] if *n == name => c
            .parse()
            .map_err(|_| Error::Format(format!("bad `{name}` count")))?,
        _ => {
            return Err(Error::Format(format!(
                "expected `{name} <count>`, got {header:?}"
            )))
        }
    };
    let mut items = Vec::with_capacity(count);
    let mut block: Vec<&str> = Vec::new();
    let mut rest: Vec<&'a str> = Vec::new();
    for line in it.by_ref() {
        let l = line.trim();
        if items.len() == count {
            rest.push(line);
            continue;
        }
        if l.is_empty() {
            if !block.is_empty() {
                items.push(BitMatrix::from_rows(&block)?);
                block.clear();
            }
        } else {
            block.push(l);
        }
    }
    if !block.is_empty() && items.len() < count {
        items.push(BitMatrix::from_rows(&block)?);
    }
    if items.len() != count {
        return Err(Error::Format(format!(
            "`{name}` section declares {count} blocks but contains {}",
            items.len()
        )));
    }
    Ok((items, rest))
}

/// Builds a [`TileCollection`] from an explicit tile list, deriving the
/// overlap sets and tables. No C2 checking happens here; pair with
/// [`verify_collection`] when the tiles come from an untrusted source.
pub fn assemble(
    spec: ConstraintSpec,
    w: usize,
    h: usize,
    mut tiles: Vec<Tile>,
    min_candidates: usize,
) -> Result<TileCollection> {
    let t = spec.thickness();
    if min_candidates == 0 {
        return Err(Error::Parameter("min_candidates must be at least 1".into()));
    }
    if w < t + 1 || h < t + 1 {
        return Err(Error::Parameter(format!(
            "tile size {w}x{h} too small for thickness {t}"
        )));
    }
    for tile in &tiles {
        if tile.width() != w || tile.height() != h {
            return Err(Error::Parameter(format!(
                "tile size {}x{} does not match collection size {w}x{h}",
                tile.width(),
                tile.height()
            )));
        }
    }
    tiles.sort();
    tiles.dedup();

    let mut h_set: BTreeSet<BitMatrix> = BTreeSet::new();
    let mut v_set: BTreeSet<BitMatrix> = BTreeSet::new();
    let strips: Vec<_> = tiles.iter().map(|tile| boundaries(tile, t)).collect();
    for b in &strips {
        h_set.insert(b.left.clone());
        h_set.insert(b.right.clone());
        v_set.insert(b.top.clone());
        v_set.insert(b.bottom.clone());
    }
    let overlaps = OverlapSets {
        horizontal: h_set.into_iter().collect(),
        vertical: v_set.into_iter().collect(),
    };

    let h_id = |m: &BitMatrix| overlaps.horizontal.binary_search(m).unwrap() as u32;
    let v_id = |m: &BitMatrix| overlaps.vertical.binary_search(m).unwrap() as u32;
    let bounds: Vec<BoundaryIds> = strips
        .iter()
        .map(|b| BoundaryIds {
            left: h_id(&b.left),
            right: h_id(&b.right),
            top: v_id(&b.top),
            bottom: v_id(&b.bottom),
        })
        .collect();

    let h_corners: Vec<BitMatrix> = overlaps
        .horizontal
        .iter()
        .map(|m| m.submatrix(0, 0, t, t).unwrap())
        .collect();
    let v_corners: Vec<BitMatrix> = overlaps
        .vertical
        .iter()
        .map(|m| m.submatrix(0, 0, t, t).unwrap())
        .collect();

    let mut row_table = vec![Vec::new(); overlaps.horizontal.len()];
    let mut column_table = vec![Vec::new(); overlaps.vertical.len()];
    let mut candidate_table: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    let mut tile_lookup = HashMap::with_capacity(tiles.len());
    for (i, (tile, b)) in tiles.iter().zip(&bounds).enumerate() {
        let i = i as u32;
        row_table[b.left as usize].push(i);
        column_table[b.top as usize].push(i);
        candidate_table.entry((b.left, b.top)).or_default().push(i);
        tile_lookup.insert(tile.matrix().clone(), i);
    }

    Ok(TileCollection {
        all: (0..tiles.len() as u32).collect(),
        spec,
        w,
        h,
        min_candidates,
        tiles,
        overlaps,
        bounds,
        h_corners,
        v_corners,
        tile_lookup,
        row_table,
        column_table,
        candidate_table,
    })
}

/// Elaborates the largest collection of `w × h` tiles for `spec` under the
/// default work limit.
pub fn elaborate(
    w: usize,
    h: usize,
    spec: &ConstraintSpec,
    min_candidates: usize,
) -> Result<TileCollection> {
    elaborate_with_limit(w, h, spec, min_candidates, DEFAULT_WORK_LIMIT)
}

/// Elaborates with an explicit work budget, applied to the tile enumeration
/// (cell assignments) and to the eviction search (tiles scanned plus pairs
/// examined) separately. Oversized instances fail cleanly with a work-limit
/// error instead of running away.
pub fn elaborate_with_limit(
    w: usize,
    h: usize,
    spec: &ConstraintSpec,
    min_candidates: usize,
    limit: u64,
) -> Result<TileCollection> {
    if min_candidates == 0 {
        return Err(Error::Parameter("min_candidates must be at least 1".into()));
    }
    let tiles = enumerate_valid_tiles_with_limit(w, h, spec, limit)?;
    let survivors = search_max_collection(spec, tiles, min_candidates, limit)?;
    let coll = assemble(spec.clone(), w, h, survivors, min_candidates)?;
    let report = verify_collection(&coll);
    if !report.passed() {
        return Err(Error::Internal(format!(
            "elaborated collection failed verification: {report}"
        )));
    }
    Ok(coll)
}

/// Scratch view of one tile's strips as interned ids.
#[derive(Clone, Copy)]
struct StripIds {
    left: u32,
    right: u32,
    top: u32,
    bottom: u32,
}

/// Evicted producible interfaces; sorted for use as a memo key.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
struct Evictions {
    rights: Vec<u32>,
    bottoms: Vec<u32>,
}

impl Evictions {
    fn with_right(&self, h: u32) -> Self {
        let mut n = self.clone();
        if let Err(pos) = n.rights.binary_search(&h) {
            n.rights.insert(pos, h);
        }
        n
    }

    fn with_bottom(&self, v: u32) -> Self {
        let mut n = self.clone();
        if let Err(pos) = n.bottoms.binary_search(&v) {
            n.bottoms.insert(pos, v);
        }
        n
    }

    fn has_right(&self, h: u32) -> bool {
        self.rights.binary_search(&h).is_ok()
    }

    fn has_bottom(&self, v: u32) -> bool {
        self.bottoms.binary_search(&v).is_ok()
    }
}

struct EvictionSearch<'a> {
    tiles: &'a [StripIds],
    n_h: usize,
    n_v: usize,
    /// corner-compatible (horizontal, vertical) id pairs, ascending
    compat_pairs: Vec<(u32, u32)>,
    min: usize,
    /// budget in elementary steps (tiles scanned, pairs examined)
    budget: u64,
    work: u64,
    best: Option<Vec<usize>>,
    visited: HashSet<Evictions>,
}

enum Evaluation {
    Dead,
    Stable(Vec<usize>),
    /// first uncovered compatible pair after all forced evictions
    Uncovered(u32, u32),
}

impl EvictionSearch<'_> {
    fn survivors(&self, ev: &Evictions) -> Vec<usize> {
        (0..self.tiles.len())
            .filter(|&i| !ev.has_right(self.tiles[i].right) && !ev.has_bottom(self.tiles[i].bottom))
            .collect()
    }

    fn charge(&mut self, units: u64) -> Result<()> {
        self.work += units;
        if self.work > self.budget {
            return Err(Error::WorkLimit {
                nodes: self.work,
                limit: self.budget,
            });
        }
        Ok(())
    }

    /// Applies forced evictions until none remain, then reports either
    /// stability or the first uncovered pair (canonical order).
    fn evaluate(
        &mut self,
        ev: &mut Evictions,
        steps: Option<&mut Vec<ElaborationStep>>,
    ) -> Result<Evaluation> {
        let mut steps = steps;
        loop {
            self.charge((self.tiles.len() + self.compat_pairs.len()) as u64)?;
            let survivors = self.survivors(ev);
            if survivors.len() < self.min {
                return Ok(Evaluation::Dead);
            }
            let mut left_count = vec![0usize; self.n_h];
            let mut top_count = vec![0usize; self.n_v];
            let mut producible_r = vec![false; self.n_h];
            let mut producible_b = vec![false; self.n_v];
            let mut pair_count: HashMap<(u32, u32), usize> = HashMap::new();
            for &i in &survivors {
                let t = self.tiles[i];
                left_count[t.left as usize] += 1;
                top_count[t.top as usize] += 1;
                producible_r[t.right as usize] = true;
                producible_b[t.bottom as usize] = true;
                *pair_count.entry((t.left, t.top)).or_insert(0) += 1;
            }
            if let Some(steps) = steps.as_deref_mut() {
                steps.push(ElaborationStep {
                    iteration: steps.len(),
                    tiles: survivors.len(),
                    horizontal: producible_r.iter().filter(|x| **x).count(),
                    vertical: producible_b.iter().filter(|x| **x).count(),
                });
            }
            // Forced: a producible interface without enough consumers can
            // never be repaired by keeping it.
            let mut forced = false;
            for h in 0..self.n_h as u32 {
                if producible_r[h as usize] && left_count[h as usize] < self.min {
                    *ev = ev.with_right(h);
                    forced = true;
                }
            }
            for v in 0..self.n_v as u32 {
                if producible_b[v as usize] && top_count[v as usize] < self.min {
                    *ev = ev.with_bottom(v);
                    forced = true;
                }
            }
            if forced {
                continue;
            }
            for &(h, v) in &self.compat_pairs {
                if !producible_r[h as usize] || !producible_b[v as usize] {
                    continue;
                }
                if pair_count.get(&(h, v)).copied().unwrap_or(0) < self.min {
                    return Ok(Evaluation::Uncovered(h, v));
                }
            }
            return Ok(Evaluation::Stable(survivors));
        }
    }

    fn search(&mut self, mut ev: Evictions) -> Result<()> {
        match self.evaluate(&mut ev, None)? {
            Evaluation::Dead => Ok(()),
            Evaluation::Stable(survivors) => {
                if self.best.as_ref().is_none_or(|b| survivors.len() > b.len()) {
                    self.best = Some(survivors);
                }
                Ok(())
            }
            Evaluation::Uncovered(h, v) => {
                if self.visited.contains(&ev) {
                    return Ok(());
                }
                self.visited.insert(ev.clone());
                // Bound: evictions only shrink the survivor set.
                if let Some(best) = &self.best {
                    if self.survivors(&ev).len() <= best.len() {
                        return Ok(());
                    }
                }
                self.search(ev.with_right(h))?;
                self.search(ev.with_bottom(v))
            }
        }
    }
}

/// Finds the largest sub-collection whose producible contexts are all
/// covered. Deterministic: fixed branch order, strict improvement only.
fn search_max_collection(
    spec: &ConstraintSpec,
    tiles: Vec<Tile>,
    min: usize,
    budget: u64,
) -> Result<Vec<Tile>> {
    let t = spec.thickness();
    let strips: Vec<_> = tiles.iter().map(|tile| boundaries(tile, t)).collect();
    let mut h_items: Vec<BitMatrix> = strips
        .iter()
        .flat_map(|b| [b.left.clone(), b.right.clone()])
        .collect();
    h_items.sort();
    h_items.dedup();
    let mut v_items: Vec<BitMatrix> = strips
        .iter()
        .flat_map(|b| [b.top.clone(), b.bottom.clone()])
        .collect();
    v_items.sort();
    v_items.dedup();
    let hid = |m: &BitMatrix| h_items.binary_search(m).unwrap() as u32;
    let vid = |m: &BitMatrix| v_items.binary_search(m).unwrap() as u32;
    let strip_ids: Vec<StripIds> = strips
        .iter()
        .map(|b| StripIds {
            left: hid(&b.left),
            right: hid(&b.right),
            top: vid(&b.top),
            bottom: vid(&b.bottom),
        })
        .collect();

    let h_corners: Vec<BitMatrix> = h_items
        .iter()
        .map(|m| m.submatrix(0, 0, t, t).unwrap())
        .collect();
    let v_corners: Vec<BitMatrix> = v_items
        .iter()
        .map(|m| m.submatrix(0, 0, t, t).unwrap())
        .collect();
    let mut compat_pairs = Vec::new();
    for (hi, hc) in h_corners.iter().enumerate() {
        for (vi, vc) in v_corners.iter().enumerate() {
            if hc == vc {
                compat_pairs.push((hi as u32, vi as u32));
            }
        }
    }

    let mut search = EvictionSearch {
        tiles: &strip_ids,
        n_h: h_items.len(),
        n_v: v_items.len(),
        compat_pairs,
        min,
        budget,
        work: 0,
        best: None,
        visited: HashSet::new(),
    };
    search.search(Evictions::default())?;

    match search.best.take() {
        Some(indices) => Ok(indices.into_iter().map(|i| tiles[i].clone()).collect()),
        None => {
            // Re-run the forced cascade from the start for the trace. The
            // cascade is bounded by the interface count, so it gets a fresh
            // budget.
            search.work = 0;
            search.budget = u64::MAX;
            let mut steps = Vec::new();
            let mut ev = Evictions::default();
            let _ = search.evaluate(&mut ev, Some(&mut steps));
            Err(Error::ElaborationFailed {
                reason: format!(
                    "no sub-collection of the {} valid tiles keeps every producible \
                     context covered at floor {min}",
                    tiles.len()
                ),
                trace: steps,
            })
        }
    }
}

/// One invariant violation found by [`verify_collection`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyCollection,
    WrongTileSize {
        tile: usize,
    },
    InvalidTile {
        tile: usize,
    },
    UnsortedOrDuplicateTiles,
    MissingBoundary {
        tile: usize,
        side: &'static str,
    },
    StaleOverlap {
        axis: &'static str,
        index: usize,
    },
    ContextBelowFloor {
        left: usize,
        top: usize,
        count: usize,
    },
    RowBelowFloor {
        left: usize,
        count: usize,
    },
    ColumnBelowFloor {
        top: usize,
        count: usize,
    },
    TableMismatch {
        what: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyCollection => write!(f, "collection has no tiles"),
            Violation::WrongTileSize { tile } => write!(f, "tile {tile} has the wrong size"),
            Violation::InvalidTile { tile } => {
                write!(f, "tile {tile} contains a forbidden pattern")
            }
            Violation::UnsortedOrDuplicateTiles => {
                write!(f, "tile list is not strictly sorted")
            }
            Violation::MissingBoundary { tile, side } => {
                write!(
                    f,
                    "C1: {side} strip of tile {tile} is not in the overlap set"
                )
            }
            Violation::StaleOverlap { axis, index } => {
                write!(f, "{axis} overlap {index} is not a boundary of any tile")
            }
            Violation::ContextBelowFloor { left, top, count } => write!(
                f,
                "C2: producible context (left {left}, top {top}) has {count} candidates"
            ),
            Violation::RowBelowFloor { left, count } => {
                write!(
                    f,
                    "C2: producible left overlap {left} has {count} row candidates"
                )
            }
            Violation::ColumnBelowFloor { top, count } => {
                write!(
                    f,
                    "C2: producible top overlap {top} has {count} column candidates"
                )
            }
            Violation::TableMismatch { what } => write!(f, "table mismatch: {what}"),
        }
    }
}

/// Independent re-derivation of every invariant plus summary counts.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub tile_count: usize,
    pub horizontal_count: usize,
    pub vertical_count: usize,
    /// Number of distinct `(left, top)` contexts realized by the tiles.
    pub context_count: usize,
    /// candidate count -> number of realized contexts with it.
    pub histogram: BTreeMap<usize, usize>,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tiles={} |H|={} |V|={} contexts={} hist",
            self.tile_count, self.horizontal_count, self.vertical_count, self.context_count
        )?;
        for (count, contexts) in &self.histogram {
            write!(f, " {count}:{contexts}")?;
        }
        if self.violations.is_empty() {
            write!(f, " (all invariants hold)")?;
        } else {
            write!(f, " ({} violations)", self.violations.len())?;
            for v in self.violations.iter().take(20) {
                write!(f, "\n  {v}")?;
            }
            if self.violations.len() > 20 {
                write!(f, "\n  ... {} more", self.violations.len() - 20)?;
            }
        }
        Ok(())
    }
}

/// Re-derives boundaries, compatibility, and candidate sets from scratch
/// (never through the collection's own tables) and checks every invariant.
/// Violations are reported, not thrown.
///
/// The C2 floors are checked over producible interfaces: pairs whose left
/// member occurs as some tile's right strip and whose top member occurs as
/// some tile's bottom strip, since only those confront the encoder.
pub fn verify_collection(coll: &TileCollection) -> VerifyReport {
    let spec = coll.spec();
    let t = coll.thickness();
    let min = coll.min_candidates();
    let mut violations = Vec::new();

    if coll.is_empty() {
        violations.push(Violation::EmptyCollection);
    }
    if !coll
        .tiles()
        .windows(2)
        .all(|p| p[0].matrix() < p[1].matrix())
    {
        violations.push(Violation::UnsortedOrDuplicateTiles);
    }

    // Per-tile checks and from-scratch strips.
    let mut strips = Vec::with_capacity(coll.len());
    for (i, tile) in coll.tiles().iter().enumerate() {
        if tile.width() != coll.tile_width() || tile.height() != coll.tile_height() {
            violations.push(Violation::WrongTileSize { tile: i });
            strips.push(None);
            continue;
        }
        if !spec.is_valid(tile.matrix()) {
            violations.push(Violation::InvalidTile { tile: i });
        }
        strips.push(Some(boundaries(tile, t)));
    }

    // C1 plus "every overlap is some tile's boundary"; collect producible
    // interfaces along the way.
    let h_set = coll.overlaps().horizontal();
    let v_set = coll.overlaps().vertical();
    let mut h_used = vec![false; h_set.len()];
    let mut v_used = vec![false; v_set.len()];
    let mut producible_r = vec![false; h_set.len()];
    let mut producible_b = vec![false; v_set.len()];
    for (i, strip) in strips.iter().enumerate() {
        let Some(b) = strip else { continue };
        for (side, id) in [
            ("left", coll.horizontal_id(&b.left)),
            ("right", coll.horizontal_id(&b.right)),
        ] {
            match id {
                Some(id) => {
                    h_used[id as usize] = true;
                    if side == "right" {
                        producible_r[id as usize] = true;
                    }
                }
                None => violations.push(Violation::MissingBoundary { tile: i, side }),
            }
        }
        for (side, id) in [
            ("top", coll.vertical_id(&b.top)),
            ("bottom", coll.vertical_id(&b.bottom)),
        ] {
            match id {
                Some(id) => {
                    v_used[id as usize] = true;
                    if side == "bottom" {
                        producible_b[id as usize] = true;
                    }
                }
                None => violations.push(Violation::MissingBoundary { tile: i, side }),
            }
        }
    }
    for (idx, used) in h_used.iter().enumerate() {
        if !used {
            violations.push(Violation::StaleOverlap {
                axis: "horizontal",
                index: idx,
            });
        }
    }
    for (idx, used) in v_used.iter().enumerate() {
        if !used {
            violations.push(Violation::StaleOverlap {
                axis: "vertical",
                index: idx,
            });
        }
    }

    // Row / column lists, recomputed by direct filtering; floors apply to
    // producible interfaces only, table equality to every member.
    let matches_left = |hi: usize, b: &crate::tiles::TileBoundaries| b.left == h_set[hi];
    let matches_top = |vi: usize, b: &crate::tiles::TileBoundaries| b.top == v_set[vi];
    let mut row_lists: Vec<Vec<u32>> = vec![Vec::new(); h_set.len()];
    let mut col_lists: Vec<Vec<u32>> = vec![Vec::new(); v_set.len()];
    for (i, strip) in strips.iter().enumerate() {
        let Some(b) = strip else { continue };
        for (hi, list) in row_lists.iter_mut().enumerate() {
            if matches_left(hi, b) {
                list.push(i as u32);
            }
        }
        for (vi, list) in col_lists.iter_mut().enumerate() {
            if matches_top(vi, b) {
                list.push(i as u32);
            }
        }
    }
    for (hi, list) in row_lists.iter().enumerate() {
        if producible_r[hi] && list.len() < min {
            violations.push(Violation::RowBelowFloor {
                left: hi,
                count: list.len(),
            });
        }
        if coll.candidates_by_ids(Some(hi as u32), None) != list.as_slice() {
            violations.push(Violation::TableMismatch {
                what: format!("row table for left overlap {hi}"),
            });
        }
    }
    for (vi, list) in col_lists.iter().enumerate() {
        if producible_b[vi] && list.len() < min {
            violations.push(Violation::ColumnBelowFloor {
                top: vi,
                count: list.len(),
            });
        }
        if coll.candidates_by_ids(None, Some(vi as u32)) != list.as_slice() {
            violations.push(Violation::TableMismatch {
                what: format!("column table for top overlap {vi}"),
            });
        }
    }

    // Contexts, from scratch: corners recomputed here. Floors are checked
    // for every corner-compatible producible pair; the histogram covers the
    // realized contexts.
    let h_corners: Vec<BitMatrix> = h_set
        .iter()
        .map(|m| m.submatrix(0, 0, t, t).unwrap())
        .collect();
    let v_corners: Vec<BitMatrix> = v_set
        .iter()
        .map(|m| m.submatrix(0, 0, t, t).unwrap())
        .collect();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut context_count = 0;
    for (hi, hc) in h_corners.iter().enumerate() {
        for (vi, vc) in v_corners.iter().enumerate() {
            if hc != vc {
                continue;
            }
            let mut list = Vec::new();
            for (i, strip) in strips.iter().enumerate() {
                let Some(b) = strip else { continue };
                if matches_left(hi, b) && matches_top(vi, b) {
                    list.push(i as u32);
                }
            }
            if !list.is_empty() {
                context_count += 1;
                *histogram.entry(list.len()).or_insert(0) += 1;
            }
            if producible_r[hi] && producible_b[vi] && list.len() < min {
                violations.push(Violation::ContextBelowFloor {
                    left: hi,
                    top: vi,
                    count: list.len(),
                });
            }
            if coll.candidates_by_ids(Some(hi as u32), Some(vi as u32)) != list.as_slice() {
                violations.push(Violation::TableMismatch {
                    what: format!("candidate table for context ({hi}, {vi})"),
                });
            }
        }
    }

    VerifyReport {
        tile_count: coll.len(),
        horizontal_count: h_set.len(),
        vertical_count: v_set.len(),
        context_count,
        histogram,
        violations,
    }
}
