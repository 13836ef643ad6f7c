//! Finite Kripke models, assignments and their file formats.

mod events;
mod file;
mod kripke;
mod worldset;

pub use events::{parse_event_id, EventFileError};
pub use file::{validate, RawEventModel, RawModel, Violation};
pub use kripke::{Assignment, KripkeModel, LiftError, ModelError, PointedModel, Tuple, Vocab, WorldId};
pub use worldset::WorldSet;
