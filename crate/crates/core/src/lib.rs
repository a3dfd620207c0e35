//! Translation geometry of Nil: distances, bisectors, circumspheres and
//! lattice coverings by translation balls.

pub mod bisector;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod nil;
pub mod optimize;
mod poly;
pub mod simplex;

pub use error::{NilError, Result};
pub use nil::{NilPoint, NilTranslation};
