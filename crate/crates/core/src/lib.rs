//! Constacyclic codes over finite commutative chain rings, realized as
//! idempotent-generated ideals of the twisted group ring `R^{γ_λ} C_n`.
//!
//! The crate is organized bottom-up:
//!
//! * [`chain_ring`]: exact arithmetic in `Z_{p^m}`, `F_{p^s}` and `F_q + uF_q`,
//!   plus coefficient maps (automorphisms and the Hermitian power map).
//! * [`linalg`]: echelon forms, kernels and membership over chain rings.
//! * [`twisted`]: multiplication in `R^{γ_λ} C_n`, the classical involution,
//!   Galois forms and 2-cocycle standardization.
//! * [`idempotents`]: factoring `x^n - λ`, primitive idempotents and lifting.
//! * [`codes`]: code construction, LCD / self-orthogonality decisions, duals,
//!   minimum distance and classification.

pub mod chain_ring;
pub mod codes;
pub mod error;
pub mod gf;
pub mod idempotents;
pub mod linalg;
pub mod twisted;

pub use chain_ring::{CoefficientMap, Elem, MapKind, Ring, RingElement, RingSpec};
pub use error::{Error, Result};
