//! Browser bindings for the demo page: elaborate collections, embed text
//! into constrained matrices, and decode it back.
//!
//! Every function returns a JSON string; failures come back as
//! `{"error": "..."}` so the page can render them without exceptions.
//! Elaborated collections are cached per parameter set, which keeps
//! re-encoding interactive.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde_json::json;
use wasm_bindgen::prelude::*;

use tilecode::{
    analysis, capacity, codec, decode, elaborate, encode, verify_collection, BitMatrix, BitString,
    ConstraintSpec, PayloadModel, TileCollection,
};

type CollectionKey = (usize, usize, usize, usize, usize);

thread_local! {
    static CACHE: RefCell<HashMap<CollectionKey, Rc<TileCollection>>> =
        RefCell::new(HashMap::new());
}

fn collection(
    d: usize,
    k: usize,
    tile_w: usize,
    tile_h: usize,
    min_candidates: usize,
) -> Result<Rc<TileCollection>, tilecode::Error> {
    let key = (d, k, tile_w, tile_h, min_candidates);
    if let Some(found) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(found);
    }
    let spec = ConstraintSpec::preset_rll_dk_2d(d, k)?;
    let coll = Rc::new(elaborate(tile_w, tile_h, &spec, min_candidates)?);
    CACHE.with(|c| c.borrow_mut().insert(key, coll.clone()));
    Ok(coll)
}

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

fn matrix_rows(m: &BitMatrix) -> Vec<String> {
    (0..m.height())
        .map(|r| m.row(r).iter().map(|&b| char::from(b'0' + b)).collect())
        .collect()
}

/// Elaborates a collection for the 2D (d,k)-RLL constraint and reports its
/// statistics: size, contexts, choice histogram, and embedding traps along
/// both axes.
#[wasm_bindgen]
pub fn collection_info(
    d: usize,
    k: usize,
    tile_w: usize,
    tile_h: usize,
    min_candidates: usize,
) -> String {
    let coll = match collection(d, k, tile_w, tile_h, min_candidates) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let report = verify_collection(&coll);
    let row = analysis::build_row_automaton(&coll, analysis::Axis::Horizontal);
    let col = analysis::build_row_automaton(&coll, analysis::Axis::Vertical);
    json!({
        "tiles": coll.len(),
        "contexts": report.context_count,
        "histogram": report.histogram,
        "horizontal_overlaps": report.horizontal_count,
        "vertical_overlaps": report.vertical_count,
        "row_states": row.state_count(),
        "column_states": col.state_count(),
        "row_traps": analysis::find_embedding_traps(&row).len(),
        "column_traps": analysis::find_embedding_traps(&col).len(),
        "verified": report.passed(),
    })
    .to_string()
}

/// Embeds the UTF-8 bytes of `text` into a `width × height` matrix.
/// Returns the matrix rows, the per-position candidate counts, and how much
/// of the payload fit.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn encode_text(
    text: &str,
    d: usize,
    k: usize,
    tile_w: usize,
    tile_h: usize,
    min_candidates: usize,
    width: usize,
    height: usize,
) -> String {
    let coll = match collection(d, k, tile_w, tile_h, min_candidates) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let payload = BitString::from_bytes(text.as_bytes());
    let enc = match encode(&coll, &payload, width, height) {
        Ok(e) => e,
        Err(e) => return err_json(e),
    };
    let counts: Vec<Vec<u32>> = (0..enc.trace.rows())
        .map(|r| {
            (0..enc.trace.cols())
                .map(|c| enc.trace.candidate_count(r, c))
                .collect()
        })
        .collect();
    let zero_capacity = capacity(&coll, width, height, PayloadModel::AllZeros).unwrap_or(0);
    json!({
        "rows": matrix_rows(&enc.matrix),
        "counts": counts,
        "payload_bits": payload.len(),
        "bits_consumed": enc.bits_consumed,
        "capacity_all_zeros": zero_capacity,
        "valid": coll.spec().is_valid(&enc.matrix),
    })
    .to_string()
}

/// Decodes `num_bits` payload bits out of a matrix given as `0`/`1` rows
/// separated by newlines, returning the recovered bytes as text.
#[wasm_bindgen]
pub fn decode_text(
    matrix_rows_text: &str,
    num_bits: usize,
    d: usize,
    k: usize,
    tile_w: usize,
    tile_h: usize,
    min_candidates: usize,
) -> String {
    let coll = match collection(d, k, tile_w, tile_h, min_candidates) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let rows: Vec<&str> = matrix_rows_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    let matrix = match BitMatrix::from_rows(&rows) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let bits = match decode(&coll, &matrix, num_bits) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    let bytes = bits.to_bytes();
    let whole = &bytes[..num_bits / 8];
    json!({
        "text": String::from_utf8_lossy(whole),
        "bytes": whole,
    })
    .to_string()
}

/// Geometry helper for the page: the nearest encodable sizes around a
/// requested width and height.
#[wasm_bindgen]
pub fn geometry_info(
    d: usize,
    k: usize,
    tile_w: usize,
    tile_h: usize,
    width: usize,
    height: usize,
) -> String {
    let spec = match ConstraintSpec::preset_rll_dk_2d(d, k) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let t = spec.thickness();
    if tile_w <= t || tile_h <= t {
        return err_json("tile too small for this constraint");
    }
    let snap = |extent: usize, tile: usize, stride: usize| -> usize {
        if extent <= tile {
            tile
        } else {
            tile + (extent - tile) / stride * stride
        }
    };
    let w = snap(width, tile_w, tile_w - t);
    let h = snap(height, tile_h, tile_h - t);
    match codec::plan_geometry_dims(tile_w, tile_h, t, w, h) {
        Ok(g) => json!({
            "width": g.width,
            "height": g.height,
            "cols": g.cols,
            "rows": g.rows,
            "thickness": t,
        })
        .to_string(),
        Err(e) => err_json(e),
    }
}
