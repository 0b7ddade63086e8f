//! Numerical kernel for polygon moduli in `S^2` and `dS^2`, hipped
//! hypersurfaces in anti-de Sitter and hyperbolic space, their holonomy and
//! dual complexes, and foot points of timelike unitary Killing fields.

pub mod check;
pub mod duality;
pub mod error;
pub mod forms;
pub mod hipped;
pub mod holonomy;
pub mod killing;
pub mod linalg;
pub mod obj;
pub mod polygons;
pub mod solvers;

pub use error::{Error, Result};
