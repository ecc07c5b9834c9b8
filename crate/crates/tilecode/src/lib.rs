//! Tile-based encoding of payload data into two-dimensional constrained
//! bit matrices.
//!
//! The pipeline: describe a constraint as a finite set of forbidden
//! rectangular patterns ([`constraints`]), enumerate every valid tile of a
//! chosen size ([`tiles`]), elaborate offline the maximal collection whose
//! overlap sets make left-to-right, top-to-bottom tiling always possible
//! ([`collection`]), then stream payload bits into tile selections over an
//! arbitrarily large surface and back out again in time linear in its area
//! ([`codec`]). The fixed-frame baseline lives in [`nom`]; diagnostics for
//! the one-dimensional selection processes live in [`analysis`].

pub mod analysis;
pub mod bitgrid;
pub mod codec;
pub mod collection;
pub mod constraints;
pub mod error;
pub mod nom;
pub mod tiles;

pub use analysis::{
    build_row_automaton, choice_histogram, find_embedding_traps, Axis, ContextAutomaton, Transition,
};
pub use bitgrid::{BitMatrix, RenderStyle};
pub use codec::{
    capacity, decode, encode, plan_geometry, plan_geometry_dims, BitString, CodecTrace, Encoded,
    PayloadModel, TilingGeometry,
};
pub use collection::{
    assemble, elaborate, elaborate_with_limit, verify_collection, BoundaryIds, Context,
    OverlapSets, SelectionContext, TileCollection, VerifyReport, Violation,
};
pub use constraints::ConstraintSpec;
pub use error::{ElaborationStep, Error, Result};
pub use nom::{
    nom_capacity, nom_decode, nom_encode, nom_enumerate_centers, nom_search_frame, NomCollection,
    NomFrame,
};
pub use tiles::{
    boundaries, enumerate_valid_matrices, enumerate_valid_tiles, enumerate_valid_tiles_with_limit,
    Tile, TileBoundaries, DEFAULT_WORK_LIMIT,
};
