//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use tilecode::{
    analysis, capacity, decode, elaborate, encode, enumerate_valid_matrices, enumerate_valid_tiles,
    nom, verify_collection, BitMatrix, BitString, ConstraintSpec, Error, NomCollection,
    PayloadModel, TileCollection, DEFAULT_WORK_LIMIT,
};

fn rll13() -> ConstraintSpec {
    ConstraintSpec::preset_rll13_2d()
}

fn coll4() -> &'static TileCollection {
    static C: OnceLock<TileCollection> = OnceLock::new();
    C.get_or_init(|| elaborate(4, 4, &rll13(), 1).unwrap())
}

fn nom7() -> &'static NomCollection {
    static C: OnceLock<NomCollection> = OnceLock::new();
    C.get_or_init(|| {
        let frame = nom::nom_search_frame(7, 7, &rll13(), 10_000_000).unwrap();
        nom::nom_enumerate_centers(&frame, &rll13()).unwrap()
    })
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

/// Brute-force oracle: every w*h bit matrix that passes the reference
/// validity scan, in lexicographic order.
fn brute_force_valid(w: usize, h: usize, spec: &ConstraintSpec) -> Vec<BitMatrix> {
    let n = w * h;
    assert!(n <= 24);
    let mut out = Vec::new();
    for code in 0u32..1u32 << n {
        let bits: Vec<u8> = (0..n).map(|i| ((code >> (n - 1 - i)) & 1) as u8).collect();
        let m = BitMatrix::new(w, h, bits).unwrap();
        if spec.is_valid(&m) {
            out.push(m);
        }
    }
    out
}

#[test]
fn criterion_1_valid_tile_count() {
    let start = Instant::now();
    let tiles = enumerate_valid_tiles(4, 4, &rll13()).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(tiles.len(), 236);
    assert!(
        elapsed < Duration::from_secs(1),
        "enumeration took {elapsed:?}"
    );

    let oracle = brute_force_valid(4, 4, &rll13());
    assert_eq!(oracle.len(), 236);
    assert!(tiles.iter().map(|t| t.matrix()).eq(oracle.iter()));
    println!("PASS criterion 1: 236 valid 4x4 tiles, equal to the 65,536-matrix brute force, in {elapsed:?}");
}

#[test]
fn criterion_2_elaboration_golden_numbers() {
    let start = Instant::now();
    let coll = elaborate(4, 4, &rll13(), 1).unwrap();
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "elaboration took {elapsed:?}"
    );
    assert_eq!(coll.len(), 213);

    let report = verify_collection(&coll);
    assert!(report.passed(), "verification failed:\n{report}");
    assert_eq!(report.context_count, 195);
    assert_eq!(report.histogram.get(&1), Some(&177));
    assert_eq!(report.histogram.get(&2), Some(&18));
    assert_eq!(report.histogram.len(), 2);
    println!("PASS criterion 2: N=213 tiles, 195 contexts, histogram 1:177 2:18, in {elapsed:?}");
}

#[test]
fn criterion_3_hello_world_experiment() {
    let payload = ascii7("Hello world!");
    assert_eq!(payload.len(), 84);
    let coll = coll4();

    let start = Instant::now();
    let enc = encode(coll, &payload, 30, 15).unwrap();
    let back = decode(coll, &enc.matrix, 84).unwrap();
    let elapsed = start.elapsed();

    assert!(enc.bits_consumed >= 84);
    assert!(coll.spec().is_valid(&enc.matrix));
    assert_eq!(back, payload);
    assert_eq!(enc.trace.candidate_count(0, 0), 213);
    assert_eq!((enc.trace.cols(), enc.trace.rows()), (27, 12));
    for row in 1..enc.trace.rows() {
        for col in 1..enc.trace.cols() {
            assert!(enc.trace.candidate_count(row, col) <= 2);
        }
    }
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "PASS criterion 3: 84-bit payload embeds into 30x15 (top-left count 213, interior <= 2) \
         and decodes exactly, in {elapsed:?}"
    );
}

#[test]
fn criterion_4_round_trip_property_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7113c0de);
    let coll = coll4();
    let spec = rll13();

    for case in 0..1000 {
        let w = rng.gen_range(4..=60);
        let h = rng.gen_range(4..=60);
        let payload_bytes: Vec<u8> = (0..rng.gen_range(0..=64)).map(|_| rng.gen()).collect();
        let payload = BitString::from_bytes(&payload_bytes);
        let enc = encode(coll, &payload, w, h).unwrap();
        assert!(spec.is_valid(&enc.matrix), "case {case}: invalid {w}x{h}");
        let back = decode(coll, &enc.matrix, enc.bits_consumed).unwrap();
        assert_eq!(
            back,
            payload.prefix(enc.bits_consumed),
            "case {case}: round trip {w}x{h}"
        );
    }

    let nom_coll = nom7();
    for case in 0..1000 {
        let w = 7 + 4 * rng.gen_range(0..=13);
        let h = 7 + 4 * rng.gen_range(0..=13);
        let payload_bytes: Vec<u8> = (0..rng.gen_range(0..=64)).map(|_| rng.gen()).collect();
        let payload = BitString::from_bytes(&payload_bytes);
        let cap = nom::nom_capacity(nom_coll, w, h).unwrap();
        let m = nom::nom_encode(nom_coll, &payload, w, h).unwrap();
        assert!(spec.is_valid(&m), "nom case {case}: invalid {w}x{h}");
        let take = cap.min(payload.len());
        let back = nom::nom_decode(nom_coll, &m, take).unwrap();
        assert_eq!(back, payload.prefix(take), "nom case {case}: {w}x{h}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "PASS criterion 4: 1000 tile-codec and 1000 fixed-frame round trips up to 60x60, \
         all matrices fully re-scanned, zero failures, in {elapsed:?}"
    );
}

#[test]
fn criterion_5_oracle_equivalence() {
    let spec = rll13();
    let mut shapes = 0;
    for w in 1..=24usize {
        for h in 1..=24usize {
            if w * h > 24 {
                continue;
            }
            let dfs = enumerate_valid_matrices(w, h, &spec, DEFAULT_WORK_LIMIT).unwrap();
            let oracle = brute_force_valid(w, h, &spec);
            assert_eq!(dfs, oracle, "shape {w}x{h}");
            shapes += 1;
        }
    }

    // Candidate lists recomputed from scratch equal the tables for all
    // realized contexts.
    let coll = coll4();
    let t = coll.thickness();
    let contexts = coll.realized_contexts();
    assert_eq!(contexts.len(), 195);
    for &(hi, vi) in &contexts {
        let left = &coll.overlaps().horizontal()[hi as usize];
        let top = &coll.overlaps().vertical()[vi as usize];
        let mut direct = Vec::new();
        for (i, tile) in coll.tiles().iter().enumerate() {
            let m = tile.matrix();
            if &m.submatrix(0, 0, m.height(), t).unwrap() == left
                && &m.submatrix(0, 0, t, m.width()).unwrap() == top
            {
                direct.push(i as u32);
            }
        }
        assert_eq!(
            coll.candidates_by_ids(Some(hi), Some(vi)),
            direct.as_slice(),
            "context ({hi},{vi})"
        );
    }
    println!(
        "PASS criterion 5: DFS equals brute force on all {shapes} shapes with area <= 24; \
         all 195 candidate lists match scratch recomputation"
    );
}

#[test]
fn criterion_6_strengthened_collections() {
    match elaborate(4, 4, &rll13(), 2) {
        Err(Error::ElaborationFailed { reason, trace }) => {
            assert!(!trace.is_empty());
            println!(
                "PASS criterion 6: elaborate(4,4,rll13,2) fails as documented — no 4x4 \
                 collection sustains a two-candidate floor ({reason})"
            );
        }
        Ok(coll) => {
            // If a strengthened collection ever materializes it must honour
            // the floor and be trap-free; update the documented result.
            let report = verify_collection(&coll);
            assert!(report.passed(), "{report}");
            assert!(report.histogram.keys().all(|&k| k >= 2));
            for axis in [analysis::Axis::Horizontal, analysis::Axis::Vertical] {
                let automaton = analysis::build_row_automaton(&coll, axis);
                assert!(analysis::find_embedding_traps(&automaton).is_empty());
            }
            panic!(
                "criterion 6: a strengthened 4x4 collection now exists (N={}); \
                 the documented result must be updated",
                coll.len()
            );
        }
        Err(other) => panic!("expected elaboration-failed, got {other:?}"),
    }
}

#[test]
fn criterion_7_linear_time_encode() {
    let coll = coll4();
    let payload = BitString::new();

    // Small-surface rate, averaged over enough runs to measure stably.
    let small_geom = (30usize, 15usize);
    let small_positions = 27 * 12;
    let mut runs = 0u32;
    let start = Instant::now();
    while runs < 200 || start.elapsed() < Duration::from_millis(200) {
        let enc = encode(coll, &payload, small_geom.0, small_geom.1).unwrap();
        assert_eq!(enc.trace.cols() * enc.trace.rows(), small_positions);
        runs += 1;
    }
    let small_rate = start.elapsed().as_secs_f64() / (runs as f64 * small_positions as f64);

    // One large surface: 4003x4003 bits = 4000x4000 tile positions.
    let start = Instant::now();
    let enc = encode(coll, &payload, 4003, 4003).unwrap();
    let big_elapsed = start.elapsed();
    let big_positions = 4000usize * 4000;
    assert_eq!(enc.trace.cols() * enc.trace.rows(), big_positions);
    let big_rate = big_elapsed.as_secs_f64() / big_positions as f64;

    assert!(
        big_rate <= 10.0 * small_rate,
        "per-position rate degraded: small {small_rate:.3e}s vs big {big_rate:.3e}s"
    );
    println!(
        "PASS criterion 7: 16M-position encode at {big_rate:.3e}s/position \
         (small-surface rate {small_rate:.3e}s/position, {big_elapsed:?} total)"
    );
}

#[test]
fn criterion_8_nom_baseline_properties() {
    let spec = rll13();
    let coll = nom7();
    let n = coll.len();
    let b = coll.bits_per_tile();
    assert!(n >= 2, "searched frame admits {n} centers");

    // Fixed rate: consumed bits are exactly positions * floor(log2 N).
    let payload = BitString::from_bytes(&[0x5a; 40]);
    for (w, h) in [(7, 7), (19, 11), (27, 27)] {
        let cap = nom::nom_capacity(coll, w, h).unwrap();
        let cols = (w - 7) / 4 + 1;
        let rows = (h - 7) / 4 + 1;
        assert_eq!(cap, cols * rows * b as usize);
        let m = nom::nom_encode(coll, &payload, w, h).unwrap();
        assert!(spec.is_valid(&m));
        // Exactly cap bits in, and not one more.
        let take = cap.min(payload.len());
        assert_eq!(
            nom::nom_decode(coll, &m, take).unwrap(),
            payload.prefix(take)
        );
        if payload.len() >= cap {
            assert!(matches!(
                nom::nom_decode(coll, &m, cap + 1),
                Err(Error::Parameter(_))
            ));
        }
    }

    // Frame cells never change with the payload.
    let a = nom::nom_encode(coll, &BitString::from_bytes(&[0x00; 8]), 19, 19).unwrap();
    let z = nom::nom_encode(coll, &BitString::from_bytes(&[0xff; 8]), 19, 19).unwrap();
    let frame = coll.frame();
    let t = frame.thickness();
    for grid_row in 0..4usize {
        for grid_col in 0..4usize {
            let (y, x) = (grid_row * 4, grid_col * 4);
            for r in 0..7 {
                for c in 0..7 {
                    let in_hole = r >= t && r < 7 - t && c >= t && c < 7 - t;
                    if !in_hole {
                        assert_eq!(a.get(y + r, x + c), z.get(y + r, x + c));
                    }
                }
            }
        }
    }

    // N against an independent brute-force centre oracle built from
    // overlay compositions.
    let (cw, ch) = (frame.center_width(), frame.center_height());
    let area = cw * ch;
    let (sx, sy) = (frame.width() - t, frame.height() - t);
    let mut singles = Vec::new();
    for code in 0u64..1 << area {
        let bits: Vec<u8> = (0..area)
            .map(|i| ((code >> (area - 1 - i)) & 1) as u8)
            .collect();
        let center = BitMatrix::new(cw, ch, bits).unwrap();
        let tile = frame.tile_with_center(&center).unwrap();
        if spec.is_valid(&tile) {
            singles.push((center, tile));
        }
    }
    let mut oracle = Vec::new();
    'outer: for (center, tile) in &singles {
        for (_, other) in &singles {
            let base = BitMatrix::zeros(frame.width() + sx, frame.height() + sy).unwrap();
            let composed = base
                .overlay(tile, 0, 0)
                .unwrap()
                .overlay(other, 0, sx)
                .unwrap()
                .overlay(other, sy, 0)
                .unwrap()
                .overlay(tile, sy, sx)
                .unwrap();
            if !spec.is_valid(&composed) {
                continue 'outer;
            }
        }
        oracle.push(center.clone());
    }
    assert_eq!(coll.centers(), oracle.as_slice());
    assert_eq!(n, oracle.len());

    // Rate comparison with the variable-rate codec on the same surface,
    // reported (payload-dependence keeps it informational).
    let proposed = capacity(coll4(), 27, 27, PayloadModel::AllZeros).unwrap();
    let fixed = nom::nom_capacity(coll, 27, 27).unwrap();
    println!(
        "PASS criterion 8: searched 7x7 frame, N={n} ({b} bit/tile), fixed-rate, \
         frame cells payload-independent, centre oracle agrees; on 27x27 bits: \
         fixed-frame {fixed} bits vs proposed all-zeros path {proposed} bits"
    );
}
