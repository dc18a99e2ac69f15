//! The oversampled channel: how the copies of one OFDM symbol relate, how
//! the noise variance is set and what the two noise models look like.
//!
//! cargo run --release --example channel_model

use num_complex::Complex64;
use overclocked_ofdm::channel::{cp_budget, generate_noise, oversample_frame, ChannelConfig, NoiseModel};
use overclocked_ofdm::decode::extract_copies;
use overclocked_ofdm::phy::{Coding, FrameConfig, Mcs, Scheme};
use overclocked_ofdm::tx::{assemble_frame, STF_LEN};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> overclocked_ofdm::Result<()> {
    let cfg = FrameConfig::default();
    let frame = assemble_frame(b"copies of one symbol", Mcs::new(Scheme::Qpsk, Coding::Uncoded), &cfg)?;
    for g in [1, 2, 4, 8] {
        let stream = oversample_frame(&frame, g);
        let copies = extract_copies(&stream, STF_LEN * g + 32 * g, 0, &cfg, g, true)?;
        let spread = cfg
            .data_subcarriers
            .iter()
            .map(|&k| {
                let b = cfg.bin(k);
                copies.copies.iter().map(|c| (c[b] - copies.copies[0][b]).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let sigma2 = ChannelConfig { oversampling: g, snr_db: Some(10.0), ..Default::default() }.noise_variance(&cfg);
        println!(
            "G={g}: {} copies, max copy spread {spread:.1e}, CP budget {} oversamples, noise variance at 10 dB {sigma2:.4}",
            copies.g(),
            cp_budget(&cfg, g)
        );
    }

    let g = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for model in [NoiseModel::WhitePerSample, NoiseModel::BandLimited] {
        let n = generate_noise(1 << 14, 1.0, model, g, &mut rng);
        let corr = |lag: usize| {
            let c: Complex64 = n.iter().zip(&n[lag..]).map(|(a, b)| a.conj() * b).sum();
            c.norm() / n.iter().map(|x| x.norm_sqr()).sum::<f64>()
        };
        println!("{:>11} noise at G={g}: |rho| lag1={:.2} lag2={:.2} lag{g}={:.2}", model.label(), corr(1), corr(2), corr(g));
    }
    Ok(())
}
