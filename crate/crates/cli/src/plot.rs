//! Plot-ready tables derived from pipeline artifacts.

use clap::ValueEnum;
use std::fmt::Write as _;
use std::path::Path;

use hiflab_core::detector::run_detector;
use hiflab_core::signalgen::SignalRecord;
use hiflab_core::Settings;

use crate::error::CliResult;
use crate::stages::{from_toml, read_sweep, EvaluationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Record table: time and the six phase waveforms.
    Waveform,
    /// Detector bit trace of a record.
    BitTrace,
    /// Long-form `grid,channel,score` table of a sweep.
    ImportanceCurve,
    /// Classifier metrics from an evaluation report.
    MetricBar,
}

/// Render `input` as the CSV table for `kind`.
pub fn export(kind: PlotKind, input: &Path, settings: &Settings) -> CliResult<String> {
    match kind {
        PlotKind::Waveform => Ok(SignalRecord::read(input)?.to_csv()),
        PlotKind::BitTrace => {
            let rec = SignalRecord::read(input)?;
            Ok(run_detector(&rec, &settings.detector)?.trace_csv())
        }
        PlotKind::ImportanceCurve => {
            let r = read_sweep(input)?;
            let mut s = format!("{},channel,mdl_bits\n", r.dimension);
            for (g, row) in r.grid.iter().zip(&r.scores) {
                for (c, v) in r.channels.iter().zip(row) {
                    match v {
                        Some(v) => {
                            let _ = writeln!(s, "{g},{c},{v}");
                        }
                        None => {
                            let _ = writeln!(s, "{g},{c},");
                        }
                    }
                }
            }
            Ok(s)
        }
        PlotKind::MetricBar => {
            let ev: EvaluationReport = from_toml(input)?;
            Ok(ev.metric_bar_csv())
        }
    }
}
