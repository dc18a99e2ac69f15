//! Transmit power saved by oversampling: the lowest SNR that reaches a
//! target packet reception ratio, per G, against the baseline receiver.
//!
//! cargo run --release --example power_savings

use overclocked_ofdm::decode::ReceiverKind;
use overclocked_ofdm::harness::{power_savings, run_sweep, savings_from_delta, theoretical_gain, SweepSpec, SyncMode};
use overclocked_ofdm::phy::FrameConfig;

fn main() -> overclocked_ofdm::Result<()> {
    let spec = SweepSpec {
        g: vec![1, 2, 4, 8],
        receivers: vec![ReceiverKind::Baseline, ReceiverKind::TfiAvg],
        sync: SyncMode::GenieChannel,
        trials: 60,
        seed: 7,
        ..SweepSpec::new((0..=16).map(f64::from).collect())
    };
    let report = run_sweep(&spec, &FrameConfig::default())?;
    let savings = power_savings(&report, 0.9, ReceiverKind::TfiAvg);
    print!("{}", savings.to_csv());
    for g in [2, 4, 8] {
        println!("ideal G={g}: {:.2} dB, {:.1}% saved", theoretical_gain(g), 100.0 * savings_from_delta(theoretical_gain(g)));
    }
    Ok(())
}
