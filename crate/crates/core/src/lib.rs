//! Algebraic eigenstates of quadratic bosonic annihilation operators on
//! truncated Fock spaces.
//!
//! Two nonnormal operators are covered: the single-mode `F1 = a² + β a†²`
//! and the two-mode `F2 = ab + β a†b†`. Their eigenstates are built purely
//! algebraically: a canonical conjugate `G†` with `[F, G†] = 1` is
//! constructed in closed form on each invariant sector, and the eigenstate
//! with eigenvalue λ is `exp(λ𝒢†) exp(-β G†) |base⟩`. Everything is carried
//! out on a finite Fock ladder of `dim` retained levels; raising-operator
//! series terminate exactly there, and a `guard` band quantifies how far
//! truncation artifacts can creep in from the edge.
//!
//! Alongside the constructions, the crate evaluates the matching closed-form
//! overlaps (number states, coherent states, squeezed vacua, generalized
//! Caves-Schumaker states, position wavefunctions) and ships independent
//! brute-force oracles ([`oracle`]) so every closed form can be
//! cross-validated at runtime. The [`verify`] module bundles those
//! cross-checks into a single report.
//!
//! ```
//! use fockeig::fock::TruncationSpec;
//! use fockeig::f1::{F1Problem, f1_eigenstate, f1_operator};
//! use num_complex::Complex64 as C64;
//!
//! let trunc = TruncationSpec::new(64, 4)?;
//! let beta = C64::new(0.04, 0.0);
//! let lambda = C64::new(0.7, 0.0);
//! let prob = F1Problem::new(beta, lambda, C64::new(1.0, 0.0), C64::ZERO, trunc)?;
//! let psi = f1_eigenstate(&prob)?;
//! let residual = f1_operator(beta, trunc)?.apply(&psi)?;
//! let interior = trunc.interior_limit(2);
//! let max_err = (0..interior)
//!     .map(|n| (residual.coeff(n) - lambda * psi.coeff(n)).norm())
//!     .fold(0.0, f64::max);
//! assert!(max_err < 1e-10);
//! # Ok::<(), fockeig::Error>(())
//! ```

pub mod conjugates;
mod dd;
pub mod error;
pub mod f1;
pub mod f2;
pub mod fock;
pub mod oracle;
pub mod serial;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
