//! Window-relative duality computations and the exhaustive lemma checks.

pub mod killer;
pub mod lemmas;
pub mod polar;

pub use killer::{kill_sequence, KillRound, KillerOutput, Xs};
pub use lemmas::{verify_lemma1, verify_lemma_chain, verify_lqc_modification};
pub use polar::{is_quasiconvex_window, polar_window, qc_hull_window, Hull, QcVerdict};
