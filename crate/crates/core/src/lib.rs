//! Prime-factor cyclotomic Fourier transforms over GF(2^l), 4 <= l <= 12.

pub mod binary;
pub mod cfft;
pub mod convolution;
pub mod cse;
pub mod error;
pub mod gf;
pub mod oracle;
pub mod pfcft;
pub mod planfile;
mod poly2;
pub mod reference;
pub mod structure;
mod text;

pub use error::{Error, Result};
pub use gf::{make_field, FieldCtx, FieldElement};
