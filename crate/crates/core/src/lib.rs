//! Discovery, labeling and evaluation of plot-pivotal ("Chekhov's gun")
//! entities in interactive fiction.
//!
//! The pipeline runs in stages:
//!
//! 1. [`engine`] drives a game (an external interpreter or the built-in mock
//!    world engine) with deterministic reset and replay.
//! 2. [`explorer`] enumerates locations and the command prefixes reaching
//!    them, from walkthroughs or seeded random walks.
//! 3. [`probe`] examines every candidate object in a location description and
//!    labels the ones the game reacts to.
//! 4. [`corpus`] serializes labeled locations, exports BIO, splits by game and
//!    ingests external transcripts and synopses.
//! 5. [`baseline`] is a lexicon tagger producing scored span predictions.
//! 6. [`eval`] computes span metrics, category ratios, action-target overlap
//!    and turning-point statistics.

pub mod baseline;
pub mod corpus;
pub mod engine;
pub mod eval;
pub mod explorer;
pub mod probe;
pub mod span;
pub mod text;

pub use span::Span;

/// Version string stamped into every corpus record.
pub const PIPELINE_VERSION: &str = concat!("chekhov-", env!("CARGO_PKG_VERSION"));
