//! K-groups of truncated polynomial rings k[x]/x^e with Z_p coefficients,
//! computed from closed forms and checked against syntomic band complexes.

pub mod cli;
pub mod error;
pub mod figures;
pub mod functoriality;
pub mod hyperrep;
pub mod kgroups;
pub mod linalg;
pub mod mult;
pub mod oracle;
pub mod padic;
pub mod verify;
pub mod witt;

pub use error::{Error, Result};
pub use padic::Prime;
