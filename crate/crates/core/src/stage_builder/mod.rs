//! Stage families: the k-sequence, the explicit stage-2 maps, the stage-4 builder
//! (explicit and lazy), the stage-6 gluing analysis and the verification predicates.

pub mod kseq;
pub mod stage2;
pub mod stage4;
pub mod stage6;

pub use kseq::{build_k_sequence, SeqMode, StageParams};
