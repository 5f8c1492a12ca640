//! Default technology: device parameters, calibration knobs and the
//! constraints every gating strategy is checked against.
//!
//! The `DEFAULT_*` values marked as calibrated are outputs of the routines
//! in [`crate::calibration`]; the tests there re-derive them.

use crate::device::DeviceParams;
use crate::power::PowerParams;

/// Velocity-saturation index from the delay-model fit (calibrated).
pub const DEFAULT_ALPHA: f64 = 1.0;
/// Logic threshold used by the gated-delay model (calibrated).
pub const DEFAULT_VTH_LOGIC: f64 = 0.124_066_709_694_171_55;

pub const DEFAULT_DEVICE: DeviceParams = DeviceParams {
    mu0_cox: 2e-4,
    vth0: 0.4,
    dvth: 0.0,
    m: 1.5,
    gamma_prime: 0.0,
    eta: 0.05,
    v_t: 0.0259,
    alpha: DEFAULT_ALPHA,
    vdd: 1.0,
};

/// Rail resistance between adjacent distributed-network rows.
pub const DEFAULT_R_RAIL: f64 = 100.0;
/// Sleep-transistor gate capacitance per metre of width (calibrated).
pub const DEFAULT_ST_CAP_PER_WIDTH: f64 = 4.476_351_352_256_006e-8;

/// Everything an analysis needs besides the circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Technology {
    pub device: DeviceParams,
    /// Threshold in the alpha-power delay terms (gate, gated and drop solve).
    pub vth_logic: f64,
    /// Design drop fraction used in the on-resistance coefficient beta.
    pub alpha_drop: f64,
    /// IR-drop limit as a fraction of Vdd.
    pub ir_frac: f64,
    /// Allowed delay relative to the best-case gated delay.
    pub delay_budget: f64,
    /// Sleep-transistor channel length.
    pub st_length: f64,
    /// Multiplier on summed cell peak currents when forming cluster currents.
    pub i_peak_scale: f64,
    /// Fixed sleep-transistor width of non-critical clusters.
    pub nc_width: f64,
    /// Unit width of the tunable cell (devices are 1..4 times this).
    pub w_unit: f64,
    pub r_rail: f64,
    pub power: PowerParams,
}

impl Default for Technology {
    fn default() -> Self {
        Technology {
            device: DEFAULT_DEVICE,
            vth_logic: DEFAULT_VTH_LOGIC,
            alpha_drop: 0.1,
            ir_frac: 0.1,
            delay_budget: 1.10,
            st_length: 45e-9,
            i_peak_scale: 1.0,
            nc_width: 270e-9,
            w_unit: 135e-9,
            r_rail: DEFAULT_R_RAIL,
            power: PowerParams::default(),
        }
    }
}

impl Technology {
    /// Same technology with different device parameters, keeping the supply
    /// of the power model in step.
    pub fn with_device(mut self, device: DeviceParams) -> Self {
        self.device = device;
        self.power.vdd = device.vdd;
        self
    }
}
