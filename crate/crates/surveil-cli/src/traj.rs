//! SBS trajectory pipeline: decode airborne position lines, stream each
//! aircraft through the on-board processor, re-encode the optimized stream
//! and summarize the decisions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use surveil_core::mec::{self, MecConfig, PositionVector, ProcessedReport};
use surveil_core::sbs::{self, PositionReport};

use crate::CliError;

/// Decode an SBS file and run every aircraft's stream through the
/// processor. Returns the optimized SBS text and the stats summary.
pub fn process_sbs_file(
    input: &Path,
    window_n: usize,
    order_p: f64,
    degeneracy_threshold: f64,
) -> Result<(String, String), CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::io(&format!("reading {}", input.display()), e))?;
    process_sbs_text(&text, window_n, order_p, degeneracy_threshold)
}

pub fn process_sbs_text(
    text: &str,
    window_n: usize,
    order_p: f64,
    degeneracy_threshold: f64,
) -> Result<(String, String), CliError> {
    let config =
        MecConfig { window_capacity: window_n, order: order_p, degeneracy_threshold };
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;

    // Group reports per aircraft, keeping first-seen aircraft order.
    let mut order: Vec<u32> = Vec::new();
    let mut streams: BTreeMap<u32, Vec<PositionReport>> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let report = sbs::decode_sbs(line)
            .map_err(|e| CliError::Config(format!("line {}: {e}", idx + 1)))?;
        if !streams.contains_key(&report.hex_ident) {
            order.push(report.hex_ident);
        }
        streams.entry(report.hex_ident).or_default().push(report);
    }
    if order.is_empty() {
        return Err(CliError::Config("input carries no position messages".to_string()));
    }

    let mut optimized = String::new();
    let mut stats_text = String::new();
    let mut total_input = 0usize;
    let mut totals = mec::TrajectoryStats::default();
    let mut total_optimized = 0usize;

    for hex in order {
        let reports = &streams[&hex];
        let vectors: Vec<PositionVector> = reports
            .iter()
            .enumerate()
            .map(|(i, r)| PositionVector {
                lon: r.longitude,
                lat: r.latitude,
                alt: r.altitude as f64,
                source_id: r.hex_ident,
                sequence: i as u64,
            })
            .collect();
        let (stream, stats) = mec::run_trajectory(&vectors, &config).map_err(|e| {
            CliError::Config(format!("aircraft {hex:06X}: {e}"))
        })?;

        // Supplements interpolate between the packet that triggered them and
        // the previous accepted packet, which is the entry just emitted.
        let mut last_relayed: Option<&sbs::PositionReport> = None;
        for entry in &stream {
            let line = match entry {
                ProcessedReport::Relayed(v) => {
                    let report = &reports[v.sequence as usize];
                    last_relayed = Some(report);
                    sbs::encode_sbs(report)
                }
                ProcessedReport::Supplement(v) => {
                    let after = &reports[v.sequence as usize];
                    let before = last_relayed.expect("supplement follows an accepted report");
                    sbs::encode_sbs(&synthesize_report(v, before, after))
                }
            }
            .map_err(|e| CliError::Config(format!("aircraft {hex:06X}: {e}")))?;
            optimized.push_str(&line);
            optimized.push('\n');
        }

        let input = reports.len();
        let optimized_len = stream.len();
        total_input += input;
        total_optimized += optimized_len;
        totals.warmup_count += stats.warmup_count;
        totals.relayed_count += stats.relayed_count;
        totals.abandoned_count += stats.abandoned_count;
        totals.supplemented_count += stats.supplemented_count;
        append_stats(&mut stats_text, &format!("aircraft_{hex:06X}"), input, optimized_len, &stats);
    }
    append_stats(&mut stats_text, "total", total_input, total_optimized, &totals);
    Ok((optimized, stats_text))
}

fn append_stats(
    out: &mut String,
    label: &str,
    input: usize,
    optimized_len: usize,
    stats: &mec::TrajectoryStats,
) {
    let _ = writeln!(out, "{label}.input_count = {input}");
    let _ = writeln!(out, "{label}.warmup_count = {}", stats.warmup_count);
    let _ = writeln!(out, "{label}.relayed_count = {}", stats.relayed_count);
    let _ = writeln!(out, "{label}.abandoned_count = {}", stats.abandoned_count);
    let _ = writeln!(out, "{label}.supplement_count = {}", stats.supplemented_count);
    let _ = writeln!(out, "{label}.optimized_count = {optimized_len}");
    let _ = writeln!(out, "{label}.abandoned_fraction = {}", stats.abandoned_count as f64 / input as f64);
    let _ = writeln!(
        out,
        "{label}.supplement_fraction_of_optimized = {}",
        stats.supplemented_count as f64 / optimized_len as f64
    );
}

/// Build the synthetic report carried by a supplement: identity fields from
/// the bracketing reports, timestamps at the midpoint when the time format
/// is parseable (verbatim copies otherwise).
fn synthesize_report(
    v: &PositionVector,
    before: &PositionReport,
    after: &PositionReport,
) -> PositionReport {
    PositionReport {
        session_id: before.session_id,
        aircraft_id: before.aircraft_id,
        hex_ident: before.hex_ident,
        flight_id: before.flight_id,
        generated_date: before.generated_date.clone(),
        generated_time: midpoint_time(&before.generated_time, &after.generated_time),
        logged_date: before.logged_date.clone(),
        logged_time: midpoint_time(&before.logged_time, &after.logged_time),
        altitude: v.alt.round().clamp(i32::MIN as f64, i32::MAX as f64) as i32,
        latitude: v.lat.clamp(-90.0, 90.0),
        longitude: v.lon.clamp(-180.0, 180.0),
    }
}

fn parse_time_ms(text: &str) -> Option<i64> {
    let mut parts = text.split(':');
    let hours: i64 = parts.next()?.parse().ok()?;
    let minutes: i64 = parts.next()?.parse().ok()?;
    let seconds: f64 = parts.next()?.parse().ok()?;
    if parts.next().is_some() || !(0.0..60.0).contains(&seconds) {
        return None;
    }
    Some(hours * 3_600_000 + minutes * 60_000 + (seconds * 1000.0).round() as i64)
}

fn format_time_ms(ms: i64) -> String {
    let hours = ms / 3_600_000;
    let minutes = (ms / 60_000) % 60;
    let seconds = (ms / 1000) % 60;
    let millis = ms % 1000;
    format!("{hours:02}:{minutes:02}:{seconds:02}.{millis:03}")
}

fn midpoint_time(before: &str, after: &str) -> String {
    match (parse_time_ms(before), parse_time_ms(after)) {
        (Some(a), Some(b)) if b >= a => format_time_ms((a + b) / 2),
        _ => before.to_string(),
    }
}
