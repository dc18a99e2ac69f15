//! Transmit a packet and decode it over a noiseless channel with every
//! receiver, for every modulation.
//!
//! cargo run --release --example loopback

use overclocked_ofdm::channel::{run_channel, ChannelConfig};
use overclocked_ofdm::decode::{decode_frame, ReceiverKind, RxConfig};
use overclocked_ofdm::phy::{Coding, FrameConfig, Mcs, Scheme};
use overclocked_ofdm::tx::assemble_frame;

fn main() -> overclocked_ofdm::Result<()> {
    let cfg = FrameConfig::default();
    let payload: Vec<u8> = (0..100u8).map(|i| i.wrapping_mul(37)).collect();
    let g = 4;
    for scheme in Scheme::ALL {
        let mcs = Mcs::new(scheme, Coding::HalfRateConv);
        let frame = assemble_frame(&payload, mcs, &cfg)?;
        let ch = ChannelConfig { oversampling: g, cfo_hz: 1500.0, timing_pad: 200 * g, ..Default::default() };
        let rx_stream = run_channel(&frame, &ch, &cfg)?.stream;
        for kind in ReceiverKind::ALL {
            let (stream, rx) = match kind {
                ReceiverKind::Baseline => (rx_stream.decimate(g, 0), RxConfig::baseline()),
                _ => (rx_stream.clone(), RxConfig::tfi(kind, g)),
            };
            let r = decode_frame(&stream, &frame.meta, &cfg, &rx)?;
            println!(
                "{:>5} {:>9}: {} symbols, crc_ok={}, payload intact={}, cfo={:.1} Hz",
                scheme.label(),
                kind.label(),
                frame.meta.n_symbols,
                r.crc_ok,
                r.payload == payload,
                r.cfo.fine_hz
            );
        }
    }
    Ok(())
}
