//! Run a short sweep and render BER, PRR, timing error and savings figures.
//!
//! cargo run --release --example plot_report [DIR]

use std::path::PathBuf;

use overclocked_ofdm::cli::plot::{render, PlotKind};
use overclocked_ofdm::decode::ReceiverKind;
use overclocked_ofdm::harness::{run_sweep, SweepSpec};
use overclocked_ofdm::phy::FrameConfig;

fn main() -> overclocked_ofdm::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let spec = SweepSpec { g: vec![1, 2, 4], trials: 30, seed: 5, ..SweepSpec::new(vec![8.0, 10.0, 12.0, 14.0, 16.0]) };
    let report = run_sweep(&spec, &FrameConfig::default())?;
    for kind in [PlotKind::Ber, PlotKind::Prr, PlotKind::Sync, PlotKind::Savings] {
        let out = dir.join(format!("report_{}.svg", kind.label()));
        match render(&report, kind, &out, 0.9, ReceiverKind::TfiJoint) {
            Ok(()) => println!("wrote {}", out.display()),
            Err(e) => println!("{}: {e}", kind.label()),
        }
    }
    Ok(())
}
