mod error;
pub mod adversary;
pub mod bounds;
pub mod channel;
pub mod entropy;
pub mod gf2;
pub mod hashing;
pub mod nqs;
pub mod numfmt;
pub mod oracle;
pub mod protocol;

pub use error::{Error, Result};
