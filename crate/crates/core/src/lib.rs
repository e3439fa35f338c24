//! Polar bodies, Santaló points and volume products of convex polytopes,
//! with the flag-polytope construction around the regular simplex and a
//! seeded experiment harness.

pub mod error;
pub mod experiments;
pub mod io;
pub mod numkit;
pub mod polarity;
pub mod polytope;
pub mod simplexflags;

pub use error::{GeomError, Result};
pub use numkit::{Matrix, Vector};
pub use polytope::{Halfspace, Polytope};
