use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::config::RunConfig;
use super::plot::{render, PlotKind};
use super::{EXIT_OK, EXIT_RUNTIME};
use crate::channel::{run_channel, ChannelConfig};
use crate::decode::{decode_frame, Genie, ReceiverKind};
use crate::error::{Error, Result};
use crate::frontend::detect_packet;
use crate::harness::{power_savings, run_sweep_with, SweepReport, SyncMode, SWEEP_HEADER};
use crate::io::{read_samples, write_constellation_csv, write_copies_csv, write_correlation_csv, write_samples, Sidecar};
use crate::tx::assemble_frame;

pub const SWEEP_CSV: &str = "sweep.csv";
pub const POWER_CSV: &str = "power.csv";
pub const CONFIG_ECHO: &str = "config.json";
pub const SINGLE_SAMPLES: &str = "single.f32";
pub const CORR_CSV: &str = "correlation.csv";
pub const COPIES_CSV: &str = "copies.csv";
pub const CONSTELLATION_CSV: &str = "constellation.csv";

fn load(config: &Path, overrides: &[String], verbose: u8) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(config, overrides)?;
    cfg.verbosity = cfg.verbosity.max(verbose);
    cfg.prepare_out_dir()?;
    std::fs::write(cfg.out_dir.join(CONFIG_ECHO), cfg.to_json())?;
    Ok(cfg)
}

/// Runs the sweep, appending rows as points finish and rewriting the file
/// sorted at the end. Also writes the power-savings CSV and echoes the
/// effective configuration.
pub fn cmd_sweep(config: &Path, overrides: &[String], verbose: u8) -> Result<i32> {
    let cfg = load(config, overrides, verbose)?;
    let csv_path = cfg.out_dir.join(SWEEP_CSV);
    let mut out = BufWriter::new(File::create(&csv_path)?);
    writeln!(out, "{SWEEP_HEADER}")?;
    out.flush()?;
    let spec = &cfg.sweep;
    let total = spec.mcs.len() * spec.noise_model.len() * spec.snr_db.len();
    let mut done = 0;
    let mut write_err = None;
    let report = run_sweep_with(spec, &cfg.frame, |rows| {
        done += 1;
        let res = rows.iter().try_for_each(|r| writeln!(out, "{}", r.to_csv())).and_then(|_| out.flush());
        if let Err(e) = res {
            write_err.get_or_insert(e);
        }
        if cfg.verbosity > 0 {
            if let Some(r) = rows.first() {
                eprintln!("[{done}/{total}] {} {} snr={:.2} dB", r.mcs.scheme.label(), r.noise_model.label(), r.snr_db);
            }
        }
    })?;
    drop(out);
    if let Some(e) = write_err {
        return Err(e.into());
    }
    std::fs::write(&csv_path, report.to_csv())?;
    println!("wrote {}", csv_path.display());
    if let Some(kind) = cfg.power_receiver() {
        let power = power_savings(&report, cfg.target_prr, kind);
        let path = cfg.out_dir.join(POWER_CSV);
        std::fs::write(&path, power.to_csv())?;
        println!("wrote {} ({} vs baseline)", path.display(), kind.label());
    }
    Ok(EXIT_OK)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SingleOptions {
    pub dump_corr: bool,
    pub dump_copies: bool,
    pub dump_constellation: bool,
    pub noiseless: bool,
}

/// One packet through the channel, decoded by every receiver point of the
/// config. The first MCS, noise model and SNR are used. The received stream
/// is saved with its sidecar; dumps come from the last receiver point.
pub fn cmd_single(config: &Path, overrides: &[String], opts: &SingleOptions, verbose: u8) -> Result<i32> {
    let cfg = load(config, overrides, verbose)?;
    let spec = &cfg.sweep;
    let frame_cfg = &cfg.frame;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let payload: Vec<u8> = (0..spec.packet_len).map(|_| rng.random()).collect();
    let mcs = spec.mcs[0];
    let frame = assemble_frame(&payload, mcs, frame_cfg)?;
    let gc = spec.channel_g();
    let cfo = spec.cfo_hz + if spec.cfo_spread_hz > 0.0 { rng.random_range(-spec.cfo_spread_hz..=spec.cfo_spread_hz) } else { 0.0 };
    let snr_db = (!opts.noiseless).then(|| spec.snr_db[0]);
    let ch = ChannelConfig {
        oversampling: gc,
        snr_db,
        cfo_hz: cfo,
        multipath_taps: spec.taps.clone(),
        timing_pad: spec.timing_pad * gc,
        noise_model: spec.noise_model[0],
        interpolation: spec.interpolation,
        seed: rng.next_u64(),
    };
    let out = run_channel(&frame, &ch, frame_cfg)?;

    let samples_path = cfg.out_dir.join(SINGLE_SAMPLES);
    write_samples(&samples_path, &out.stream)?;
    let mut side = Sidecar::new(&frame.meta, spec.seed, gc, frame_cfg);
    side.snr_db = snr_db;
    side.cfo_hz = cfo;
    side.write(&Sidecar::path_for(&samples_path))?;
    println!(
        "tx: {} {} payload={} bytes symbols={} snr={} cfo={:.1} Hz G={gc}",
        mcs.scheme.label(),
        mcs.coding.label(),
        spec.packet_len,
        frame.meta.n_symbols,
        snr_db.map_or_else(|| "none".to_string(), |s| format!("{s:.2} dB")),
        cfo
    );

    if opts.dump_corr {
        let det = detect_packet(&out.stream.decimate(gc, 0), spec.detect_threshold);
        let path = cfg.out_dir.join(CORR_CSV);
        write_correlation_csv(BufWriter::new(File::create(&path)?), &det.metric_trace)?;
        println!("wrote {}", path.display());
    }

    let points = spec.receiver_points();
    let want_copies = opts.dump_copies || opts.dump_constellation;
    let mut any_ok = false;
    for (i, &(kind, g)) in points.iter().enumerate() {
        let ratio = gc / g;
        let stream = out.stream.decimate(ratio, 0);
        let mut rx = spec.rx_config(kind, g);
        rx.keep_copies = want_copies && i + 1 == points.len();
        if spec.sync != SyncMode::Estimated {
            rx.genie = Genie { ltf_start: Some(out.truth.ltf_start / ratio), cfo_hz: Some(cfo), unit_channel: spec.sync == SyncMode::GenieChannel };
        }
        match decode_frame(&stream, &frame.meta, frame_cfg, &rx) {
            Ok(mut r) => {
                let errs = r.count_bit_errors(&frame.info_bits);
                any_ok |= r.crc_ok;
                println!(
                    "rx: {} G={g} crc_ok={} bit_errors={errs}/{} symbol_start={} cfo_hz={:.1}",
                    kind.label(),
                    r.crc_ok,
                    frame.info_bits.len(),
                    r.sync.symbol_start,
                    r.cfo.fine_hz
                );
                if rx.keep_copies {
                    if opts.dump_copies {
                        let path = cfg.out_dir.join(COPIES_CSV);
                        write_copies_csv(BufWriter::new(File::create(&path)?), &r.copies, &r.decisions, frame_cfg)?;
                        println!("wrote {}", path.display());
                    }
                    if opts.dump_constellation {
                        let path = cfg.out_dir.join(CONSTELLATION_CSV);
                        write_constellation_csv(BufWriter::new(File::create(&path)?), &r.copies, &r.decisions, frame_cfg)?;
                        println!("wrote {}", path.display());
                    }
                }
            }
            Err(e) => println!("rx: {} G={g} failed: {e}", kind.label()),
        }
    }
    if cfg.verbosity > 0 {
        eprintln!("any receiver decoded: {any_ok}");
    }
    println!("wrote {}", samples_path.display());
    Ok(EXIT_OK)
}

pub fn cmd_plot(csv: &Path, kind: PlotKind, out: Option<&Path>, target: f64, receiver: ReceiverKind) -> Result<i32> {
    let text = std::fs::read_to_string(csv).map_err(|e| Error::Schema(format!("{}: {e}", csv.display())))?;
    let report = SweepReport::from_csv(&text)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| default_plot_path(csv, kind));
    render(&report, kind, &out, target, receiver)?;
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}

fn default_plot_path(csv: &Path, kind: PlotKind) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    csv.with_file_name(format!("{stem}_{}.svg", kind.label()))
}

/// Receiver settings for replay: a run config without `snr_db` is accepted.
fn replay_config(path: Option<&Path>) -> Result<RunConfig> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    if let Some(obj) = value.as_object_mut() {
        obj.entry("snr_db").or_insert_with(|| Value::Array(vec![0.0.into()]));
    }
    RunConfig::from_value(value, &[], None)
}

/// Decodes a recorded stream. Exit 0 when the CRC checks, 1 otherwise.
pub fn cmd_replay(samples: &Path, sidecar: Option<&Path>, config: Option<&Path>, receiver: Option<ReceiverKind>) -> Result<i32> {
    let side_path = sidecar.map(Path::to_path_buf).unwrap_or_else(|| Sidecar::path_for(samples));
    let side = Sidecar::read(&side_path)?;
    let cfg = replay_config(config)?;
    let stream = read_samples(samples, side.rate).map_err(|e| match e {
        Error::Io(io) => Error::MalformedFile(format!("{}: {io}", samples.display())),
        other => other,
    })?;
    let kind = receiver.unwrap_or(if side.oversampling > 1 { ReceiverKind::TfiJoint } else { ReceiverKind::Baseline });
    let (g, stream) = match kind {
        ReceiverKind::Baseline => (1, stream.decimate(side.oversampling, 0)),
        _ => (side.oversampling, stream),
    };
    let rx = cfg.sweep.rx_config(kind, g);
    let r = decode_frame(&stream, &side.meta(), &cfg.frame, &rx)?;
    println!(
        "{} G={g} crc_ok={} payload_len={} symbols={} symbol_start={} cfo_hz={:.1}",
        kind.label(),
        r.crc_ok,
        side.payload_len,
        side.n_symbols,
        r.sync.symbol_start,
        r.cfo.fine_hz
    );
    if r.crc_ok {
        Ok(EXIT_OK)
    } else {
        println!("crc_fail");
        Ok(EXIT_RUNTIME)
    }
}
