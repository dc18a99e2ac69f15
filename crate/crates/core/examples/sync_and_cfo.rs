//! Acquisition step by step: packet detection, the switch to the fast
//! clock, timing synchronisation and the two frequency offset stages.
//!
//! cargo run --release --example sync_and_cfo

use overclocked_ofdm::channel::{run_channel, ChannelConfig};
use overclocked_ofdm::decode::window_shift;
use overclocked_ofdm::frontend::{
    build_reference_ltf, detect_packet, estimate_cfo_coarse, estimate_cfo_fine, mask_before, model_clock_switch, sync_timing,
    FineCfoInput, DEFAULT_THRESHOLD,
};
use overclocked_ofdm::phy::{Coding, FrameConfig, Mcs, Scheme};
use overclocked_ofdm::tx::assemble_frame;

fn main() -> overclocked_ofdm::Result<()> {
    let cfg = FrameConfig::default();
    let g = 8;
    let true_cfo = 0.013 * cfg.subcarrier_spacing() + 2000.0;
    let frame = assemble_frame(&[0x5a; 60], Mcs::new(Scheme::Qam16, Coding::HalfRateConv), &cfg)?;
    let ch = ChannelConfig { oversampling: g, snr_db: Some(10.0), cfo_hz: true_cfo, timing_pad: 200 * g + 3, seed: 42, ..Default::default() };
    let out = run_channel(&frame, &ch, &cfg)?;

    let det = detect_packet(&out.stream.decimate(g, 0), DEFAULT_THRESHOLD);
    println!("detected={} plateau starts at base sample {} (frame at {})", det.detected, det.coarse_start, out.truth.frame_start / g);

    let valid_from = model_clock_switch(&det, &cfg, g)?;
    let stream = mask_before(&out.stream, valid_from);
    let sync = sync_timing(&stream, &build_reference_ltf(&cfg, g), det.coarse_start, valid_from)?;
    println!(
        "clock valid from oversample {valid_from}; LTF found at {} (truth {}), peak {:.3}",
        sync.symbol_start, out.truth.ltf_start, sync.peak_value
    );

    let shift = window_shift(g, true);
    let coarse = estimate_cfo_coarse(&stream, sync.symbol_start - shift, g, &cfg)?;
    let fine = estimate_cfo_fine(&FineCfoInput::from_stream(&stream, sync.symbol_start, shift, g, &cfg)?, coarse, &cfg)?;
    let sp = cfg.subcarrier_spacing();
    println!("true CFO {true_cfo:.1} Hz");
    println!("coarse {coarse:.1} Hz (error {:.4} spacing)", (coarse - true_cfo).abs() / sp);
    println!("fine   {:.1} Hz (error {:.4} spacing)", fine.fine_hz, (fine.fine_hz - true_cfo).abs() / sp);
    Ok(())
}
