//! Codec for the BaseStation-style airborne position text message, the
//! on-wire carrier of position reports in this system.
//!
//! One line is 22 comma-separated fields: the literal `MSG`, transmission
//! type `3`, session / aircraft / flight record numbers, the aircraft hex
//! address, generation and logging date-time pairs, altitude, latitude and
//! longitude. Unused fields stay empty and the last four flags are fixed
//! `"0"` for this message type.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Number of comma-separated fields in one line.
pub const FIELD_COUNT: usize = 22;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SbsError {
    #[error("expected {FIELD_COUNT} fields, found {found}")]
    FieldCount { found: usize },
    #[error("field {index} must be the literal {expected:?}")]
    Literal { index: usize, expected: &'static str },
    #[error("field {index} is not a valid number")]
    Numeric { index: usize },
    #[error("field {index} out of range")]
    Range { index: usize },
    #[error("field {index} must be non-empty text without commas")]
    Text { index: usize },
}

/// One airborne position record.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionReport {
    /// Database session record number.
    pub session_id: u32,
    /// Database aircraft record number.
    pub aircraft_id: u32,
    /// Mode S address, 24 bits; serialized as six upper-case hex digits.
    pub hex_ident: u32,
    /// Database flight record number.
    pub flight_id: u32,
    /// Generation date and time, stored verbatim.
    pub generated_date: String,
    pub generated_time: String,
    /// Logging date and time, stored verbatim.
    pub logged_date: String,
    pub logged_time: String,
    /// Altitude in feet.
    pub altitude: i32,
    /// Latitude in decimal degrees.
    pub latitude: f64,
    /// Longitude in decimal degrees.
    pub longitude: f64,
}

impl PositionReport {
    pub fn validate(&self) -> Result<(), SbsError> {
        if self.hex_ident > 0xFF_FFFF {
            return Err(SbsError::Range { index: 4 });
        }
        for (index, text) in [
            (6, &self.generated_date),
            (7, &self.generated_time),
            (8, &self.logged_date),
            (9, &self.logged_time),
        ] {
            if text.is_empty() || text.contains(',') {
                return Err(SbsError::Text { index });
            }
        }
        if !(-90.0..=90.0).contains(&self.latitude) || !self.latitude.is_finite() {
            return Err(SbsError::Range { index: 14 });
        }
        if !(-180.0..=180.0).contains(&self.longitude) || !self.longitude.is_finite() {
            return Err(SbsError::Range { index: 15 });
        }
        Ok(())
    }
}

/// Serialize a report as one airborne position line.
pub fn encode_sbs(report: &PositionReport) -> Result<String, SbsError> {
    report.validate()?;
    Ok(format!(
        "MSG,3,{},{},{:06X},{},{},{},{},{},,{},,,{},{},,,0,0,0,0",
        report.session_id,
        report.aircraft_id,
        report.hex_ident,
        report.flight_id,
        report.generated_date,
        report.generated_time,
        report.logged_date,
        report.logged_time,
        report.altitude,
        report.latitude,
        report.longitude,
    ))
}

fn parse_u32(fields: &[&str], index: usize) -> Result<u32, SbsError> {
    fields[index].trim().parse().map_err(|_| SbsError::Numeric { index })
}

fn parse_f64(fields: &[&str], index: usize) -> Result<f64, SbsError> {
    fields[index].trim().parse().map_err(|_| SbsError::Numeric { index })
}

/// Parse one airborne position line.
///
/// Tolerant where safe: numeric fields may carry surrounding whitespace and
/// the unused fields are ignored. Field count, the `MSG`/`3` literals, the
/// fixed trailing flags and value ranges are enforced.
pub fn decode_sbs(line: &str) -> Result<PositionReport, SbsError> {
    let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split(',').collect();
    if fields.len() != FIELD_COUNT {
        return Err(SbsError::FieldCount { found: fields.len() });
    }
    if fields[0].trim() != "MSG" {
        return Err(SbsError::Literal { index: 0, expected: "MSG" });
    }
    if fields[1].trim() != "3" {
        return Err(SbsError::Literal { index: 1, expected: "3" });
    }
    for (index, field) in fields.iter().enumerate().take(22).skip(18) {
        if field.trim() != "0" {
            return Err(SbsError::Literal { index, expected: "0" });
        }
    }
    let hex_field = fields[4].trim();
    let hex_ident =
        u32::from_str_radix(hex_field, 16).map_err(|_| SbsError::Numeric { index: 4 })?;
    let report = PositionReport {
        session_id: parse_u32(&fields, 2)?,
        aircraft_id: parse_u32(&fields, 3)?,
        hex_ident,
        flight_id: parse_u32(&fields, 5)?,
        generated_date: fields[6].trim().to_string(),
        generated_time: fields[7].trim().to_string(),
        logged_date: fields[8].trim().to_string(),
        logged_time: fields[9].trim().to_string(),
        altitude: fields[11].trim().parse().map_err(|_| SbsError::Numeric { index: 11 })?,
        latitude: parse_f64(&fields, 14)?,
        longitude: parse_f64(&fields, 15)?,
    };
    report.validate()?;
    Ok(report)
}
