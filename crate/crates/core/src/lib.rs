//! Matrix groups over finite commutative rings for non-commutative
//! public-key cryptography.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod homcrypt;
pub mod instance;
pub mod matrix;
pub mod ring;
pub mod rng;
pub mod protocol;
pub mod trapdoor;
pub mod words;

pub use error::{Error, Result};
