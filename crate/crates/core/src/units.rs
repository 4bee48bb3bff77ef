//! Unit conventions.
//!
//! Times are in microseconds and frequencies (Rabi frequencies, detunings,
//! spectral parameters) in megahertz, so that `MHz * us = 1` with no hidden
//! factors. Frequencies are angular: a Rabi frequency of 1 MHz rotates a
//! phase by 1 rad per microsecond. The coupling `g` carries MHz^2 and the
//! propagation coordinate is `zeta = z / c`, also in microseconds. Physical
//! lengths are recovered with the speed of light; velocities are reported
//! as `v / c`.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_8188e-12;

/// Seconds per microsecond.
pub const SECONDS_PER_US: f64 = 1e-6;
/// s^-1 per MHz.
pub const HZ_PER_MHZ: f64 = 1e6;

/// Converts a retarded length `zeta` (microseconds of light travel) to meters.
pub fn us_to_meters(zeta_us: f64) -> f64 {
    zeta_us * SECONDS_PER_US * SPEED_OF_LIGHT
}

/// Converts a length in meters to microseconds of light travel.
pub fn meters_to_us(length_m: f64) -> f64 {
    length_m / (SECONDS_PER_US * SPEED_OF_LIGHT)
}

/// Converts an SI rate squared (s^-2) to MHz^2.
pub fn per_second_sq_to_mhz_sq(value: f64) -> f64 {
    value / (HZ_PER_MHZ * HZ_PER_MHZ)
}

/// Converts an SI angular frequency (s^-1) to MHz.
pub fn per_second_to_mhz(value: f64) -> f64 {
    value / HZ_PER_MHZ
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_round_trip() {
        for &x in &[1e-9, 0.42059, 3.0, 1.7e4] {
            let back = us_to_meters(meters_to_us(x));
            assert!(((back - x) / x).abs() < 1e-12);
        }
    }

    #[test]
    fn one_microsecond_of_light() {
        assert!((us_to_meters(1.0) - 299.792_458).abs() < 1e-9);
    }
}
