//! Small conversions shared by the analysis modules.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Wraps an angle into `[0, 360)`.
#[inline]
pub fn wrap_360(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(-180, 180]`.
#[inline]
pub fn wrap_180(deg: f64) -> f64 {
    let w = 180.0 - (180.0 - deg).rem_euclid(360.0);
    if w <= -180.0 {
        w + 360.0
    } else {
        w
    }
}

/// Absolute circular distance between two azimuths, in `[0, 180]`.
#[inline]
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_180(a - b).abs()
}
