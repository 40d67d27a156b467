//! Finite-stage construction of an even Kakutani equivalence between the Morse
//! system and the binary odometer: words, towers, templates, partial interval
//! bijections, block reorderings, good sets, stage families and convergence probes.

pub mod error;
pub mod words;
pub mod towers;
pub mod templates;
pub mod pib;
pub mod block_reorder;
pub mod good_sets;
pub mod par;
pub mod report;
pub mod stage_builder;
pub mod convergence;

pub use error::{Error, Result};
pub use towers::{Level, MorseLevel, OdometerLevel, System};
pub use words::Word;
