//! Finite-dimensional quantum observables as positive-operator-valued measures.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex operators, tensor products, partial traces,
//!   matrix exponentials and Hermitian eigendecompositions.
//! - [`povm`]: effects, states, discrete observables, state transformers,
//!   measurement schemes, and coexistence / complementarity predicates.
//! - [`spin`]: unsharp spin-½ effects, their joint measurability, and the
//!   covariant spin-phase observable.
//! - [`mzi`]: truncated Fock-space beam splitters and Mach-Zehnder statistics.
//! - [`kerrqnd`]: a Kerr-coupled probe monitoring the interferometer path.
//! - [`models`]: measurement models on a cyclic grid.

pub mod error;
pub mod kerrqnd;
pub mod linalg;
pub mod models;
pub mod mzi;
pub mod pauli;
pub mod povm;
pub mod sample;
pub mod spin;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{Operator, Vector, C64};
pub use povm::{DiscreteObservable, Effect, Label, MeasurementScheme, State, StateTransformer};
