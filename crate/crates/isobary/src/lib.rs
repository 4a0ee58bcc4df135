pub mod bounds;
pub mod compensated;
pub mod cube_slice;
pub mod error;
pub mod exactnum;
pub mod irwin_hall;
pub mod mc;
pub mod report;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
