//! Standard, variational and iterative Schrieffer-Wolff transformations for
//! half-filled Hubbard dimers and rings, plus a Jordan-Wigner / Trotter
//! circuit simulator with depolarizing noise.
//!
//! Conventions used throughout:
//! * orbital `p = 2 * site + spin` (up = 0, down = 1); qubit `q` is orbital `q`;
//! * bit `p` of a basis index is the occupation of orbital `p`, and kets are
//!   written with orbital 0 leftmost (`|1001⟩` = orbitals 0 and 3 occupied);
//! * basis kets are `c†_{p1} c†_{p2} ... |vac⟩` with ascending `p`.

pub mod error;
pub mod exec;
pub mod fock;
pub mod linalg;
pub mod msw;
pub mod qsim;
pub mod recursion;
pub mod rings;
pub mod swgen;

pub use error::{Error, Result};
pub use exec::Exec;
