//! Units policy.
//!
//! Everything inside the library is feet and seconds. Climb rates quoted in
//! feet per minute and accelerations quoted as fractions of `g` are converted
//! once, at ingestion, with the helpers below.

/// Standard gravity in ft/s².
pub const STANDARD_G: f64 = 32.174;

/// Seconds per minute.
const SECONDS_PER_MINUTE: f64 = 60.0;

/// Converts a rate in ft/min to ft/s.
///
/// ```
/// assert_eq!(acaslab::units::convert_rate(1500.0), 25.0);
/// ```
pub fn convert_rate(fpm: f64) -> f64 {
    fpm / SECONDS_PER_MINUTE
}

/// Converts a rate in ft/s back to ft/min.
pub fn fps_to_fpm(fps: f64) -> f64 {
    fps * SECONDS_PER_MINUTE
}

/// Converts an acceleration expressed in multiples of `g` to ft/s².
pub fn g_to_fps2(multiple: f64, g: f64) -> f64 {
    multiple * g
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rate_examples() {
        assert_eq!(convert_rate(1500.0), 25.0);
        assert_eq!(convert_rate(0.0), 0.0);
        assert_eq!(convert_rate(10000.0), 10000.0 / 60.0);
        assert!((convert_rate(10000.0) - 166.666_666_666_666_67).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn rate_round_trip_within_one_ulp(x in -1.0e6f64..1.0e6) {
            let back = fps_to_fpm(convert_rate(x));
            let ulp = f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
            prop_assert!((back - x).abs() <= ulp, "{x} -> {back}");
        }
    }
}
