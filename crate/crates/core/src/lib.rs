pub mod error;
pub mod field;
pub mod blowup;
pub mod derivation;
pub mod linalg;
pub mod parse;
pub mod quotient;
pub mod report;
pub mod series;
pub mod singclass;

pub use error::{Error, Result};
