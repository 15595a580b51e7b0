//! The `SL(2, ℤ)` action on origamis and the Kontsevich–Zorich cocycle over
//! it.

pub mod cylinders;
pub mod moves;
pub mod orbit;
pub mod stream;

pub use cylinders::{cylinders, multitwist_matrix, Cylinder, Direction};
pub use moves::{act, act_s, act_t, CocycleMatrix, Move};
pub use orbit::{veech_orbit, veech_orbit_with, OrbitGraph, OrbitOptions};
pub use stream::{geodesic_cocycle_stream, GeodesicStream, StreamItem};
