//! Percentages reported against the ungated and best-case delays.

/// Relative delay degradation `100 * (d - d0) / d0`.
pub fn delta_d_over_d(d: f64, d0: f64) -> f64 {
    100.0 * (d - d0) / d0
}

/// Slow-down relative to the best-case gated delay, `100 * (d - d_bc) / d_bc`.
pub fn shift_from_dbc(d: f64, d_bc: f64) -> f64 {
    100.0 * (d - d_bc) / d_bc
}

/// Speed-up relative to the best-case gated delay, `100 * (d_bc - d) / d_bc`.
pub fn improvement_over_dbc(d: f64, d_bc: f64) -> f64 {
    100.0 * (d_bc - d) / d_bc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages() {
        assert!((delta_d_over_d(3.4112e-10, 2.3836e-10) - 43.11).abs() <= 0.01);
        assert!((delta_d_over_d(2.6052e-10, 2.3836e-10) - 9.29).abs() <= 0.01);
        assert_eq!(delta_d_over_d(1.0, 1.0), 0.0);
        assert!((shift_from_dbc(3.0060e-10, 2.6052e-10) - 15.38).abs() <= 0.01);
        assert!((shift_from_dbc(2.8091e-10, 2.6052e-10) - 7.82).abs() <= 0.01);
        assert_eq!(shift_from_dbc(2.0, 2.0), 0.0);
        assert!((improvement_over_dbc(2.5455e-10, 2.6052e-10) - 2.29).abs() <= 0.01);
        assert!((improvement_over_dbc(2.5871e-10, 2.6052e-10) - 0.69).abs() <= 0.01);
        assert_eq!(improvement_over_dbc(3.0, 3.0), 0.0);
    }
}
