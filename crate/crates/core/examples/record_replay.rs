//! Record a received stream as a float32 sample file with its JSON sidecar,
//! then load and decode it again.
//!
//! cargo run --release --example record_replay [DIR]

use std::path::PathBuf;

use overclocked_ofdm::channel::{run_channel, ChannelConfig};
use overclocked_ofdm::decode::{decode_frame, ReceiverKind, RxConfig};
use overclocked_ofdm::io::{read_samples, write_samples, Sidecar};
use overclocked_ofdm::phy::{Coding, FrameConfig, Mcs, Scheme};
use overclocked_ofdm::tx::assemble_frame;

fn main() -> overclocked_ofdm::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let cfg = FrameConfig::default();
    let g = 4;
    let seed = 11;
    let frame = assemble_frame(b"recorded for later", Mcs::new(Scheme::Qam64, Coding::HalfRateConv), &cfg)?;
    let ch = ChannelConfig { oversampling: g, snr_db: Some(20.0), timing_pad: 100 * g, seed, ..Default::default() };
    let out = run_channel(&frame, &ch, &cfg)?;

    let path = dir.join("capture.f32");
    write_samples(&path, &out.stream)?;
    let mut side = Sidecar::new(&frame.meta, seed, g, &cfg);
    side.snr_db = ch.snr_db;
    side.write(&Sidecar::path_for(&path))?;
    println!("wrote {} ({} samples)", path.display(), out.stream.len());

    let side = Sidecar::read(&Sidecar::path_for(&path))?;
    let stream = read_samples(&path, side.rate)?;
    let r = decode_frame(&stream, &side.meta(), &cfg, &RxConfig::tfi(ReceiverKind::TfiJoint, side.oversampling))?;
    println!("replayed: crc_ok={} payload={:?}", r.crc_ok, String::from_utf8_lossy(&r.payload));
    Ok(())
}
