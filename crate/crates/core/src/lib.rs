//! Square-tiled translation surfaces and the Kontsevich–Zorich cocycle.
//!
//! The crate computes exact homology data of origamis, the integer
//! symplectic monodromy of their `SL(2, ℤ)` orbits, Lyapunov spectra of the
//! resulting cocycle, a certified bounded (Forni) subspace, and the exact
//! transport identities of the parallel-transport connection.

pub mod dynamics;
pub mod envelope;
pub mod error;
pub mod exact;
pub mod forni;
pub mod connection;
pub mod corpus;
pub mod homology;
pub mod origami;
pub mod lyapunov;
pub mod perm;
pub mod report;
pub mod subspace;

pub use error::{Error, Result};
pub use origami::{stratum, Origami, StratumData};
