//! Symbol copy extraction, KDE noise maps and frame decoders.

pub mod copies;
pub mod kde;
pub mod receiver;

pub use copies::{extract_copies, extract_ltf_copies, extract_window, window_shift, SymbolCopies};
pub use kde::{build_noise_map, decode_average_nn, decode_joint_ml, KdeBoundary, NoiseMap, NoiseMapMode, PhaseModel};
pub use receiver::{decode_baseline, decode_frame, decode_frame_tfi, DecodeResult, Genie, ReceiverKind, RxConfig};
