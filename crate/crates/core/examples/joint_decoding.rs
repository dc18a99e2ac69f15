//! Per-subcarrier noise maps from the training field and joint
//! maximum-likelihood decisions over all copies, compared with averaging the
//! copies first.
//!
//! cargo run --release --example joint_decoding

use overclocked_ofdm::channel::{run_channel, ChannelConfig, NoiseModel};
use overclocked_ofdm::decode::kde::estimate_channel;
use overclocked_ofdm::decode::{build_noise_map, decode_average_nn, decode_joint_ml, extract_copies, extract_ltf_copies, KdeBoundary, NoiseMapMode};
use overclocked_ofdm::phy::{Coding, FrameConfig, Mcs, Scheme};
use overclocked_ofdm::tx::assemble_frame;

fn main() -> overclocked_ofdm::Result<()> {
    let cfg = FrameConfig::default();
    let g = 4;
    let scheme = Scheme::Qam16;
    let frame = assemble_frame(&[7u8; 400], Mcs::new(scheme, Coding::Uncoded), &cfg)?;
    for noise_model in [NoiseModel::WhitePerSample, NoiseModel::BandLimited] {
        let ch = ChannelConfig { oversampling: g, snr_db: Some(8.0), noise_model, seed: 3, ..Default::default() };
        let out = run_channel(&frame, &ch, &cfg)?;
        let ltf_start = out.truth.ltf_start;
        let ltf = extract_ltf_copies(&out.stream, ltf_start, &cfg, g, true)?;
        let map = build_noise_map(&ltf, &cfg, NoiseMapMode::EqualizedResidual, KdeBoundary::ReflectWrap)?;
        let channel = estimate_channel(&ltf, &cfg);
        let k0 = &map.kdes[0];
        println!("{}: subcarrier {} bandwidths h_a={:.3} h_phi={:.3}", noise_model.label(), map.subcarriers[0], k0.h_a, k0.h_phi);

        let (mut joint_err, mut avg_err, mut total) = (0, 0, 0);
        for (i, sent) in frame.data_points.iter().enumerate() {
            let copies = extract_copies(&out.stream, ltf_start, i, &cfg, g, true)?;
            let truth: Vec<usize> = sent.iter().map(|p| nearest(*p, scheme)).collect();
            let joint = decode_joint_ml(&copies, &map, scheme, &cfg);
            let avg = decode_average_nn(&copies, &channel, scheme, &cfg);
            joint_err += joint.iter().zip(&truth).filter(|(a, b)| a != b).count();
            avg_err += avg.iter().zip(&truth).filter(|(a, b)| a != b).count();
            total += truth.len();
        }
        println!("  symbol error rate: joint ML {:.4}, averaged copies {:.4}", joint_err as f64 / total as f64, avg_err as f64 / total as f64);
    }
    Ok(())
}

fn nearest(p: num_complex::Complex64, scheme: Scheme) -> usize {
    let pts = scheme.points();
    (0..pts.len()).min_by(|&a, &b| (pts[a] - p).norm().total_cmp(&(pts[b] - p).norm())).unwrap_or(0)
}
