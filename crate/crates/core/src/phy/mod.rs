//! Shared numerics and bit-level primitives.

pub mod config;
pub mod constellation;
pub mod conv;
pub mod crc;
pub mod fft;

pub use config::{Coding, FrameConfig, Mcs};
pub use constellation::{modulate_bits, nearest_point, Constellation, Scheme};
pub use conv::{conv_encode, viterbi_decode};
pub use crc::crc32;
pub use fft::{fft64, ifft64};
