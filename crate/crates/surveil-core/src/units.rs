//! Unit conversions between decibel-style quantities and linear units.
//!
//! All channel math inside this crate runs in linear units (watts,
//! dimensionless gains). Conversions happen once, at the interface boundary.

/// Nominal speed of light in m/s.
///
/// The 3e8 value is the one used to derive the wavelengths quoted for the
/// simulated systems (0.0857 m at 3.5 GHz, 0.2752 m at 1090 MHz).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Vacuum permittivity in F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854e-12;

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}

/// Antenna gain in dBi to a dimensionless linear gain.
pub fn dbi_to_linear(dbi: f64) -> f64 {
    db_to_linear(dbi)
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * libm::log10(watts) + 30.0
}

/// Noise power spectral density in dBm/Hz to W/Hz.
pub fn dbm_per_hz_to_w_per_hz(dbm_per_hz: f64) -> f64 {
    dbm_to_watts(dbm_per_hz)
}

/// Wavelength in meters of a carrier at `frequency_hz`.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        for &db in &[-174.0, -14.0, 0.0, 3.0, 23.0] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
    }

    #[test]
    fn known_conversions() {
        assert!((db_to_linear(0.0) - 1.0).abs() < 1e-15);
        assert!((db_to_linear(3.0) - 1.9952623149688795).abs() < 1e-12);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        // Thermal noise floor used throughout the simulations.
        let n0 = dbm_per_hz_to_w_per_hz(-174.0);
        assert!((n0 - 3.9810717055349565e-21).abs() < 1e-33);
    }

    #[test]
    fn table_wavelengths() {
        assert!((wavelength(3.5e9) - 0.0857).abs() < 5e-5);
        assert!((wavelength(1.09e9) - 0.2752).abs() < 5e-5);
    }
}
