//! Geometric quantifiers of quantum correlations in bipartite states: the
//! geometric discord, the measurement-induced geometric discord and the
//! discord of response, each for the trace, Hilbert-Schmidt, Bures and
//! Hellinger distances.

pub mod bounds;
pub mod channels;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod states;

pub use error::{Error, Result};
