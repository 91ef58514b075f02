//! Instanton bundles on the Segre threefold `X = P1 x P1 x P1`.
//!
//! Chow ring arithmetic, monads of line-bundle sums, exact sheaf cohomology
//! of monads by Čech complexes over `F_p` or `Q`, Ext groups, stability
//! checks and jumping lines.

pub mod chow;
pub mod cli;
pub mod error;
pub mod field;
pub mod hyperext;
pub mod kunneth;
pub mod linalg;
pub mod lines;
pub mod monad;
pub mod multipoly;
pub mod stability;
pub mod univariate;

pub use error::{Error, Result};
