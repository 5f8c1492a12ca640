//! Closed-form MOSFET leakage, gate delay and sleep-transistor sizing.
//!
//! Everything here is a pure function of its arguments. Voltages are in
//! volts, currents in amperes, lengths in metres and times in seconds.

use alloc::format;

use crate::error::{Error, Result};

/// Analytical device parameters shared by the leakage and delay models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Transconductance factor `mu0 * Cox` (A/V^2).
    pub mu0_cox: f64,
    /// Zero-bias threshold voltage.
    pub vth0: f64,
    /// Threshold adjustment.
    pub dvth: f64,
    /// Sub-threshold swing coefficient.
    pub m: f64,
    /// Linearised body-effect coefficient.
    pub gamma_prime: f64,
    /// DIBL coefficient.
    pub eta: f64,
    /// Thermal voltage.
    pub v_t: f64,
    /// Velocity-saturation index, `1 <= alpha <= 2`.
    pub alpha: f64,
    /// Supply voltage.
    pub vdd: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        crate::tech::DEFAULT_DEVICE
    }
}

fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name,
            reason: format!("must be finite and > 0, got {v}"),
        })
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name,
            reason: format!("must be finite and >= 0, got {v}"),
        })
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        positive("mu0_cox", self.mu0_cox)?;
        positive("vth0", self.vth0)?;
        positive("m", self.m)?;
        positive("v_t", self.v_t)?;
        positive("alpha", self.alpha)?;
        positive("vdd", self.vdd)?;
        non_negative("dvth", self.dvth)?;
        non_negative("gamma_prime", self.gamma_prime)?;
        non_negative("eta", self.eta)?;
        if !(1.0..=2.0).contains(&self.alpha) {
            return Err(invalid("alpha", "must lie in [1, 2]"));
        }
        if self.vth0 >= self.vdd {
            return Err(invalid("vth0", "must be below vdd"));
        }
        Ok(())
    }
}

/// Channel geometry of a transistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Channel width.
    pub w: f64,
    /// Effective channel length.
    pub l: f64,
}

impl Geometry {
    pub const fn new(w: f64, l: f64) -> Self {
        Geometry { w, l }
    }

    pub fn validate(&self) -> Result<()> {
        positive("w", self.w)?;
        positive("l", self.l)
    }

    pub fn aspect(&self) -> f64 {
        self.w / self.l
    }
}

/// Terminal bias of an NMOS device, referenced to ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub vg: f64,
    pub vs: f64,
    pub vds: f64,
}

impl BiasPoint {
    pub const fn new(vg: f64, vs: f64, vds: f64) -> Self {
        BiasPoint { vg, vs, vds }
    }
}

fn finite(term: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { term })
    }
}

/// Sub-threshold drain current.
///
/// `A * exp((Vg - Vs - vth0 - gamma'*Vs + eta*Vds) / (m*vT)) * (1 - exp(-Vds/vT))`
/// with `A = mu0Cox * (W/L) * vT^2 * e^1.8 * exp(-dvth / (eta*vT))`.
///
/// The threshold-adjustment factor is taken as 1 when `dvth == 0`, which
/// also covers `eta == 0`.
pub fn subthreshold_current(p: &DeviceParams, g: &Geometry, b: &BiasPoint) -> Result<f64> {
    p.validate()?;
    g.validate()?;
    if !(b.vds >= 0.0) || !b.vg.is_finite() || !b.vs.is_finite() {
        return Err(invalid("bias", "requires finite terminals and vds >= 0"));
    }
    let adjust = if p.dvth == 0.0 {
        1.0
    } else {
        finite("threshold adjustment", libm::exp(-p.dvth / (p.eta * p.v_t)))?
    };
    let prefactor = finite(
        "prefactor",
        p.mu0_cox * g.aspect() * p.v_t * p.v_t * libm::exp(1.8) * adjust,
    )?;
    let arg = (b.vg - b.vs - p.vth0 - p.gamma_prime * b.vs + p.eta * b.vds) / (p.m * p.v_t);
    let channel = finite("exponent", libm::exp(arg))?;
    // -expm1(-x) keeps the drain factor accurate for small vds
    let drain = -libm::expm1(-b.vds / p.v_t);
    finite("current", prefactor * channel * drain)
}

/// Alpha-power propagation delay `C_L * Vdd / (K * (Vdd - Vth)^alpha)`.
pub fn gate_delay(cl: f64, k: f64, p: &DeviceParams, vth: f64) -> Result<f64> {
    non_negative("cl", cl)?;
    positive("k", k)?;
    if !(vth < p.vdd) {
        return Err(Error::ThresholdAboveSupply { vth, vdd: p.vdd });
    }
    finite(
        "delay",
        cl * p.vdd / (k * libm::pow(p.vdd - vth, p.alpha)),
    )
}

fn check_drop(vst: f64, vdd: f64, vth: f64) -> Result<()> {
    non_negative("vst", vst)?;
    if !(vth < vdd) {
        return Err(Error::ThresholdAboveSupply { vth, vdd });
    }
    if !(vst + vth < vdd) {
        return Err(Error::Starved { vst, vth, vdd });
    }
    Ok(())
}

/// Delay `d * ((Vdd - vth) / (Vdd - v_ST - vth))^alpha` of a block whose
/// virtual ground sits `vst` above ground.
pub fn gated_delay(d: f64, vst: f64, p: &DeviceParams, vth: f64) -> Result<f64> {
    gated_delay_with_alpha(d, vst, p.vdd, vth, p.alpha)
}

pub(crate) fn gated_delay_with_alpha(d: f64, vst: f64, vdd: f64, vth: f64, alpha: f64) -> Result<f64> {
    check_drop(vst, vdd, vth)?;
    if vst == 0.0 {
        return Ok(d);
    }
    Ok(d * libm::pow((vdd - vth) / (vdd - vst - vth), alpha))
}

/// First-order delay increase `d * v_ST / (Vdd - vth)`.
pub fn delay_degradation_linear(d: f64, vst: f64, p: &DeviceParams, vth: f64) -> Result<f64> {
    check_drop(vst, p.vdd, vth)?;
    Ok(d * vst / (p.vdd - vth))
}

/// Intermediate quantities of a sleep-transistor sizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleepSizing {
    /// Allowed on-resistance `Vdd * alpha_drop / I_ST`.
    pub r_st: f64,
    /// `1 / (mu0Cox * (Vdd - vth - Vdd*alpha_drop))`.
    pub beta: f64,
    /// Required aspect ratio `beta / R_ST`.
    pub aspect: f64,
    /// Width for the given channel length.
    pub width: f64,
}

/// Resistive-region coefficient beta; the on-resistance is `beta / (W/L)`.
pub fn sizing_beta(p: &DeviceParams, alpha_drop: f64, vth: f64) -> Result<f64> {
    if !(alpha_drop > 0.0 && alpha_drop < 1.0) {
        return Err(invalid("alpha_drop", "must lie in (0, 1)"));
    }
    positive("mu0_cox", p.mu0_cox)?;
    let overdrive = p.vdd - vth - p.vdd * alpha_drop;
    if !(overdrive > 0.0) {
        return Err(Error::DegenerateSizing { overdrive });
    }
    finite("beta", 1.0 / (p.mu0_cox * overdrive))
}

/// Sizes a footer sleep transistor so that `i_st` drops at most
/// `alpha_drop * Vdd` across it.
pub fn size_sleep_transistor(
    i_st: f64,
    alpha_drop: f64,
    p: &DeviceParams,
    vth: f64,
    l: f64,
) -> Result<SleepSizing> {
    positive("i_st", i_st)?;
    positive("l", l)?;
    let beta = sizing_beta(p, alpha_drop, vth)?;
    let r_st = p.vdd * alpha_drop / i_st;
    let aspect = beta / r_st;
    Ok(SleepSizing {
        r_st,
        beta,
        aspect,
        width: aspect * l,
    })
}

/// Linear-region on-resistance of a sleep transistor.
pub fn on_resistance(g: &Geometry, p: &DeviceParams, alpha_drop: f64, vth: f64) -> Result<f64> {
    g.validate()?;
    Ok(sizing_beta(p, alpha_drop, vth)? / g.aspect())
}
