//! SVG figures from sweep reports.

use std::collections::BTreeMap;
use std::path::Path;

use plotters::prelude::*;

use crate::decode::ReceiverKind;
use crate::error::{Error, Result};
use crate::harness::{power_savings, SweepReport, SweepRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Bit error rate against SNR, log-scaled.
    Ber,
    /// Packet reception ratio against SNR on [0, 1].
    Prr,
    /// Mean (line) and median (markers) timing error against SNR.
    Sync,
    /// Transmit power saved against G at a target PRR.
    Savings,
}

impl PlotKind {
    pub fn label(self) -> &'static str {
        match self {
            PlotKind::Ber => "ber",
            PlotKind::Prr => "prr",
            PlotKind::Sync => "sync",
            PlotKind::Savings => "savings",
        }
    }
}

type Series = BTreeMap<String, Vec<(f64, f64)>>;

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Plot(e.to_string())
}

/// One series per (receiver, G), qualified by MCS and noise model when the
/// report holds more than one of them.
fn series(report: &SweepReport, value: impl Fn(&SweepRow) -> f64) -> Series {
    let distinct = |f: &dyn Fn(&SweepRow) -> String| {
        let mut v: Vec<String> = report.rows.iter().map(f).collect();
        v.sort();
        v.dedup();
        v.len() > 1
    };
    let many_mcs = distinct(&|r| format!("{:?}", r.mcs));
    let many_noise = distinct(&|r| r.noise_model.label().to_string());
    let mut out = Series::new();
    for r in &report.rows {
        let mut name = format!("{} G={}", r.receiver.label(), r.g);
        if many_mcs {
            name = format!("{name} {} {}", r.mcs.scheme.label(), r.mcs.coding.label());
        }
        if many_noise {
            name = format!("{name} {}", r.noise_model.label());
        }
        let v = value(r);
        let entry = out.entry(name).or_default();
        if v.is_finite() {
            entry.push((r.snr_db, v));
        }
    }
    for pts in out.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn x_range(report: &SweepReport) -> (f64, f64) {
    let lo = report.rows.iter().map(|r| r.snr_db).fold(f64::INFINITY, f64::min);
    let hi = report.rows.iter().map(|r| r.snr_db).fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

pub fn render(report: &SweepReport, kind: PlotKind, out: &Path, target_prr: f64, receiver: ReceiverKind) -> Result<()> {
    if report.rows.is_empty() {
        return Err(Error::Schema("report has no rows".into()));
    }
    let root = SVGBackend::new(out, (960, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    match kind {
        PlotKind::Ber => {
            let s = series(report, |r| if r.ber > 0.0 { r.ber } else { f64::NAN });
            let min = s.values().flatten().map(|p| p.1).fold(1.0, f64::min);
            let y_lo = (min / 2.0).max(1e-9);
            let (x0, x1) = x_range(report);
            let mut chart = ChartBuilder::on(&root)
                .caption("BER vs SNR", ("sans-serif", 24))
                .margin(12)
                .x_label_area_size(40)
                .y_label_area_size(70)
                .build_cartesian_2d(x0..x1, (y_lo..1.0).log_scale())
                .map_err(plot_err)?;
            chart.configure_mesh().x_desc("SNR (dB)").y_desc("BER").draw().map_err(plot_err)?;
            draw_lines(&mut chart, &s)?;
        }
        PlotKind::Prr => {
            let s = series(report, |r| r.prr.clamp(0.0, 1.0));
            let (x0, x1) = x_range(report);
            let mut chart = ChartBuilder::on(&root)
                .caption("PRR vs SNR", ("sans-serif", 24))
                .margin(12)
                .x_label_area_size(40)
                .y_label_area_size(60)
                .build_cartesian_2d(x0..x1, 0.0..1.0)
                .map_err(plot_err)?;
            chart.configure_mesh().x_desc("SNR (dB)").y_desc("PRR").draw().map_err(plot_err)?;
            draw_lines(&mut chart, &s)?;
        }
        PlotKind::Sync => {
            let mean = series(report, |r| r.sync_err_mean);
            let median = series(report, |r| r.sync_err_median);
            let y_hi = mean.values().chain(median.values()).flatten().map(|p| p.1).fold(0.0, f64::max).max(1e-3) * 1.1;
            let (x0, x1) = x_range(report);
            let mut chart = ChartBuilder::on(&root)
                .caption("Timing error (base-rate samples)", ("sans-serif", 24))
                .margin(12)
                .x_label_area_size(40)
                .y_label_area_size(60)
                .build_cartesian_2d(x0..x1, 0.0..y_hi)
                .map_err(plot_err)?;
            chart.configure_mesh().x_desc("SNR (dB)").y_desc("|timing error|").draw().map_err(plot_err)?;
            draw_lines(&mut chart, &mean)?;
            for (i, pts) in median.values().enumerate() {
                let color = Palette99::pick(i).to_rgba();
                chart.draw_series(pts.iter().map(|&(x, y)| Circle::new((x, y), 4, color.filled()))).map_err(plot_err)?;
            }
        }
        PlotKind::Savings => {
            let power = power_savings(report, target_prr, receiver);
            let mut s = Series::new();
            for r in &power.rows {
                if let Some(v) = r.savings {
                    s.entry(format!("{} {}", r.mcs.scheme.label(), r.mcs.coding.label())).or_default().push((r.g as f64, 100.0 * v));
                }
            }
            if s.is_empty() {
                return Err(Error::Schema(format!("no {} rows reach PRR {target_prr}", receiver.label())));
            }
            let g_hi = power.rows.iter().map(|r| r.g).max().unwrap_or(1) as f64;
            let mut chart = ChartBuilder::on(&root)
                .caption(format!("TX power saved at PRR {target_prr}"), ("sans-serif", 24))
                .margin(12)
                .x_label_area_size(40)
                .y_label_area_size(60)
                .build_cartesian_2d(0.5..g_hi + 0.5, 0.0..100.0)
                .map_err(plot_err)?;
            chart.configure_mesh().x_desc("G").y_desc("savings (%)").draw().map_err(plot_err)?;
            draw_lines(&mut chart, &s)?;
        }
    }
    root.present().map_err(plot_err)?;
    Ok(())
}

fn draw_lines<'a, DB, X, Y>(chart: &mut ChartContext<'a, DB, Cartesian2d<X, Y>>, s: &Series) -> Result<()>
where
    DB: DrawingBackend + 'a,
    X: Ranged<ValueType = f64>,
    Y: Ranged<ValueType = f64>,
{
    for (i, (name, pts)) in s.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(name.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        chart.draw_series(pts.iter().map(|&(x, y)| Circle::new((x, y), 3, color.filled()))).map_err(plot_err)?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.85)).border_style(BLACK).draw().map_err(plot_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NoiseModel;
    use crate::phy::{Coding, Mcs, Scheme};

    fn row(g: usize, snr: f64, ber: f64, prr: f64) -> SweepRow {
        SweepRow {
            receiver: ReceiverKind::TfiJoint,
            mcs: Mcs::new(Scheme::Qpsk, Coding::Uncoded),
            g,
            noise_model: NoiseModel::WhitePerSample,
            snr_db: snr,
            trials: 10,
            bits: 1000,
            bit_errors: (ber * 1000.0) as usize,
            ber,
            packets: 10,
            packets_ok: (prr * 10.0) as usize,
            prr,
            sync_err_mean: 0.5,
            sync_err_median: 0.4,
            cfo_err_hz_rms: 10.0,
            wall_time_s: 0.0,
        }
    }

    fn report() -> SweepReport {
        let mut rows = Vec::new();
        for g in [1, 2, 4, 8] {
            for snr in [0.0, 5.0, 10.0] {
                rows.push(row(g, snr, 0.1 / (g as f64 * (1.0 + snr)), (snr / 10.0 + g as f64 / 10.0).min(1.0)));
            }
        }
        SweepReport { rows }
    }

    #[test]
    fn ber_plot_has_one_series_per_g() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("ber.svg");
        render(&report(), PlotKind::Ber, &out, 0.9, ReceiverKind::TfiJoint).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        for g in [1, 2, 4, 8] {
            assert_eq!(svg.lines().filter(|l| l.trim() == format!("tfi_joint G={g}")).count(), 1, "G={g}");
        }
    }

    #[test]
    fn every_kind_renders() {
        let dir = tempfile::tempdir().unwrap();
        for kind in [PlotKind::Prr, PlotKind::Sync, PlotKind::Savings] {
            let out = dir.path().join(format!("{}.svg", kind.label()));
            render(&report(), kind, &out, 0.5, ReceiverKind::TfiJoint).unwrap();
            assert!(std::fs::read_to_string(&out).unwrap().starts_with("<svg"));
        }
        let empty = SweepReport::default();
        assert!(matches!(render(&empty, PlotKind::Ber, &dir.path().join("x.svg"), 0.9, ReceiverKind::TfiJoint), Err(Error::Schema(_))));
    }
}
