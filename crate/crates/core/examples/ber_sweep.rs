//! A small Monte-Carlo sweep: BER and PRR against SNR for the baseline and
//! the oversampled receivers, printed as CSV.
//!
//! cargo run --release --example ber_sweep

use overclocked_ofdm::decode::ReceiverKind;
use overclocked_ofdm::harness::{run_sweep, SweepSpec};
use overclocked_ofdm::phy::{Coding, FrameConfig, Mcs, Scheme};

fn main() -> overclocked_ofdm::Result<()> {
    let spec = SweepSpec {
        g: vec![1, 2, 4, 8],
        mcs: vec![Mcs::new(Scheme::Qpsk, Coding::Uncoded)],
        receivers: vec![ReceiverKind::Baseline, ReceiverKind::TfiJoint, ReceiverKind::TfiAvg],
        trials: 40,
        packet_len: 200,
        seed: 2024,
        ..SweepSpec::new(vec![0.0, 3.0, 6.0, 9.0])
    };
    let report = run_sweep(&spec, &FrameConfig::default())?;
    print!("{}", report.to_csv());
    Ok(())
}
