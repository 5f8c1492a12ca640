//! Derivation of the calibrated defaults in [`crate::tech`] and
//! [`crate::library`].
//!
//! The order matters: the delay-model fit fixes the logic threshold and the
//! saturation index, which the drive factors, the peak-current scale and the
//! drop solve all depend on.

use crate::error::{Error, Result};
use crate::flow::{self, Request};
use crate::gating::{SleepTransistor, TuningWord};
use crate::library::{library_with, LibraryScales};
use crate::netlist::generate_multiplier4x4;
use crate::power;
use crate::tech::Technology;
use crate::timing::{self, fit_delay_model, DelayFit};

/// Measured reference behaviour the model is calibrated against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Targets {
    /// `(width, v_st, delay)` of the single-switch sweep.
    pub single_st: [(f64, f64, f64); 5],
    /// Ungated multiplier delay (s).
    pub d0: f64,
    /// Drop the widest single switch develops (V).
    pub vst_widest: f64,
    /// Ungated average power (W).
    pub p_ungated: f64,
    /// Average power with the tunable cell at the nominal word (W).
    pub p_tunable_nominal: f64,
}

pub const TARGETS: Targets = Targets {
    single_st: [
        (135e-9, 0.250, 3.4112e-10),
        (270e-9, 0.173, 2.9149e-10),
        (400e-9, 0.134, 2.7531e-10),
        (540e-9, 0.108, 2.6676e-10),
        (700e-9, 0.089, 2.6052e-10),
    ],
    d0: 2.3836e-10,
    vst_widest: 0.089,
    p_ungated: 1.3862e-5,
    p_tunable_nominal: 1.3638e-5,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub fit: DelayFit,
    pub scales: LibraryScales,
    pub st_cap_per_width: f64,
}

impl Calibration {
    pub fn technology(&self) -> Technology {
        let mut tech = Technology {
            vth_logic: self.fit.vth_fit,
            ..Technology::default()
        };
        tech.device.alpha = self.fit.alpha_fit;
        tech.power.st_cap_per_width = self.st_cap_per_width;
        tech
    }
}

pub fn fit_reference(t: &Targets, vdd: f64) -> Result<DelayFit> {
    let rows: alloc::vec::Vec<(f64, f64)> = t.single_st.iter().map(|&(_, v, d)| (v, d)).collect();
    fit_delay_model(&rows, t.d0, vdd)
}

/// Runs the full calibration on the generated multiplier. `base` supplies
/// everything that is not calibrated.
pub fn calibrate(t: &Targets, base: &Technology) -> Result<Calibration> {
    let fit = fit_reference(t, base.device.vdd)?;
    let mut tech = *base;
    tech.vth_logic = fit.vth_fit;
    tech.device.alpha = fit.alpha_fit;
    tech.power.st_cap_per_width = 0.0;
    let vdd = tech.device.vdd;

    // Every quantity below is linear in its scale, so one evaluation at
    // unit scale gives the factor in closed form.
    let unit = LibraryScales {
        cl_unit: 1e-15,
        delay_unit: 1e-12,
        ipeak_unit: 1e-6,
    };
    let c = generate_multiplier4x4(&library_with(&unit, &tech))?;

    let d_unit = timing::critical_path(&c, &tech.device, tech.vth_logic)?.d0;
    let delay_unit = unit.delay_unit * t.d0 / d_unit;

    let r = SleepTransistor::fixed(t.single_st[4].0, tech.st_length).on_resistance(&tech)?;
    let span = vdd - tech.vth_logic;
    let v = t.vst_widest;
    let i_needed = v / (r * libm::pow((span - v) / span, tech.device.alpha));
    let i_unit: f64 = (0..c.len()).map(|g| c.peak_current(g)).sum::<f64>() * tech.i_peak_scale;
    let ipeak_unit = unit.ipeak_unit * i_needed / i_unit;

    let pp = &tech.power;
    let leak = vdd * power::cell_leakage(&c);
    let cl_unit_sum: f64 = power::switched_capacitance(&c, None, pp);
    let swing = pp.duty_active * pp.activity * pp.freq * pp.vdd * pp.vdd;
    let dyn_needed = t.p_ungated - leak;
    if !(dyn_needed > 0.0) {
        return Err(Error::Infeasible("cell leakage alone exceeds the ungated power".into()));
    }
    let cl_unit = unit.cl_unit * dyn_needed / (swing * cl_unit_sum);

    let scales = LibraryScales {
        cl_unit,
        delay_unit,
        ipeak_unit,
    };
    let c = generate_multiplier4x4(&library_with(&scales, &tech))?;
    let out = flow::run(&c, &tech, &Request::Tunable { word: TuningWord::NOMINAL })?;
    let w_active = out.plan.total_active_width();
    let kappa = (t.p_tunable_nominal - out.power.p_avg) / (swing * w_active);
    if !(kappa > 0.0) {
        return Err(Error::Infeasible(alloc::format!(
            "nominal tunable power {} already below target",
            out.power.p_avg
        )));
    }
    Ok(Calibration {
        fit,
        scales,
        st_cap_per_width: kappa,
    })
}
