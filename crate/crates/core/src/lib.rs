//! Drum-performance toolkit: MIDI drum-track ingestion, rhythmic contact
//! chains, song complexity metrics, a reward model and desk-scale simulator
//! for two-stick drumming, a baseline planner, and F1/correlation evaluation.

pub mod complexity;
pub mod drum;
pub mod error;
pub mod eval;
pub mod midi;
pub mod planner;
pub mod reward;
pub mod rhythm;
pub mod sim;
pub mod synth;
pub mod track;

pub use drum::{DrumId, DrumSet, Stick, StickSet, NUM_DRUMS};
pub use error::{Error, Result};
pub use track::DrumTrack;
