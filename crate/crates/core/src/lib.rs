//! Exact arithmetic for exponential sums, L-functions and their Newton
//! polygons along Artin-Schreier-Witt towers of curves.

pub mod dwork;
pub mod eigencurve;
pub mod error;
pub mod expsum;
pub mod gf;
pub mod newton;
pub mod nt;
pub mod padic;
pub mod par;
pub mod series;
pub mod tower;

pub use error::{Error, ErrorKind, Result};
