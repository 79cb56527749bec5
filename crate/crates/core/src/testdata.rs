//! Reference data used by unit tests.

/// Failure times (million revolutions) of 23 ball bearings.
pub const BALL_BEARINGS: [f64; 23] = [
    17.88, 28.92, 33.00, 41.52, 42.12, 45.60, 48.48, 51.84, 51.96, 54.12, 55.56, 67.80, 67.80,
    67.80, 68.88, 84.12, 93.12, 98.64, 105.12, 105.84, 127.92, 128.04, 173.40,
];
