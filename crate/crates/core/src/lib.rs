//! Correctable, recoverable and noiseless subsystems of finite-dimensional
//! quantum channels.
//!
//! Given a channel in Kraus form and a candidate subsystem `B` of
//! `H = (H_A ⊗ H_B) ⊕ K`, this crate
//!
//! - tests the Kraus-level correctability condition `P E_a†E_b P = F_ab ⊗ I_B`
//!   ([`correctability`]),
//! - builds an explicit unitary recovery and a full correction channel
//!   ([`recovery`]),
//! - decomposes fixed-point algebras `⊕_k M_{m_k} ⊗ I_{n_k}` and lists noiseless
//!   subsystems ([`algebra`]),
//! - and, for unital channels, finds the unitarily correctable subsystems as the
//!   noiseless subsystems of `E† ∘ E` ([`ucc`]).

pub mod algebra;
pub mod channel;
pub mod correctability;
pub mod demo;
pub mod error;
pub mod io;
pub mod linalg;
pub mod random;
pub mod recovery;
pub mod subsystem;
pub mod ucc;

pub use channel::{KrausChannel, Superoperator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Spectrum, DEFAULT_TOL};
pub use subsystem::{FactorOutcome, SubsystemDecomposition};
