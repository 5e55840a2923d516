//! Free Lie conformal, free vertex and free associative conformal algebras,
//! built by rewriting over exact rationals.

pub mod assoc;
pub mod cli;
pub mod error;
pub mod fields;
pub mod hall;
pub mod lie;
pub mod linalg;
pub mod oracle;
pub mod rewrite;
pub mod terms;

pub use error::{Error, Result};
