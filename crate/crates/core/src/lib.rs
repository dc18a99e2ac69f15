//! Oversampled OFDM receiver simulation.

pub mod channel;
pub mod cli;
pub mod decode;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod io;
pub mod phy;
pub mod stream;
pub mod tx;

pub use error::{Error, Result};
pub use stream::SampleStream;
