//! Secrecy rate of a single-antenna legitimate user (Bob) against a
//! single-antenna eavesdropper (Eve) under MRT-style beamforming.

use std::io::Write;

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beamforming::{apply, beamfocusing_vector, beamsteering_vector, Beamformer};
use crate::channel::{nusw_channel, planar_channel, ChannelModel};
use crate::error::{ensure, NfError, Result};
use crate::geometry::{ArrayGeometry, Carrier, PolarPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct PlsScenario {
    pub array: ArrayGeometry,
    pub carrier: Carrier,
    pub bob: PolarPoint,
    /// `None` removes the eavesdropper
    pub eve: Option<PolarPoint>,
    /// watts
    pub transmit_power: f64,
    /// watts
    pub noise_power: f64,
    /// `Nusw` for the exact model, `FarFieldPlanar` for the far-field
    /// approximation of every link
    pub channel_model: ChannelModel,
}

impl PlsScenario {
    pub fn new(
        array: ArrayGeometry,
        carrier: Carrier,
        bob: PolarPoint,
        eve: Option<PolarPoint>,
        transmit_power: f64,
        noise_power: f64,
    ) -> Result<Self> {
        let s = Self { array, carrier, bob, eve, transmit_power, noise_power, channel_model: ChannelModel::Nusw };
        s.validate()?;
        Ok(s)
    }

    /// Unit noise power and the transmit power that gives Bob `snr_db` under
    /// beamfocusing on the exact channel.
    pub fn with_bob_snr(
        array: ArrayGeometry,
        carrier: Carrier,
        bob: PolarPoint,
        eve: Option<PolarPoint>,
        snr_db: f64,
    ) -> Result<Self> {
        ensure(snr_db.is_finite(), || format!("SNR must be finite, got {snr_db}"))?;
        let w = beamfocusing_vector(&array, bob, carrier)?;
        let g = apply(&nusw_channel(&array, bob.to_cartesian(), carrier)?.vector(), &w.weights).norm_sqr();
        if g == 0.0 {
            return Err(NfError::DegenerateChannel("Bob's beamformed gain is zero".into()));
        }
        Self::new(array, carrier, bob, eve, 10f64.powf(snr_db / 10.0) / g, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.bob.distance > 0.0, || format!("Bob distance must be positive, got {}", self.bob.distance))?;
        if let Some(e) = self.eve {
            ensure(e.distance > 0.0, || format!("Eve distance must be positive, got {}", e.distance))?;
        }
        ensure(self.transmit_power > 0.0 && self.transmit_power.is_finite(), || {
            format!("transmit power must be positive, got {}", self.transmit_power)
        })?;
        ensure(self.noise_power > 0.0 && self.noise_power.is_finite(), || {
            format!("noise power must be positive, got {}", self.noise_power)
        })
    }

    pub fn with_eve(&self, eve: Option<PolarPoint>) -> Self {
        Self { eve, ..self.clone() }
    }

    pub fn with_model(&self, channel_model: ChannelModel) -> Self {
        Self { channel_model, ..self.clone() }
    }

    fn channel(&self, p: PolarPoint) -> Result<Array1<Complex64>> {
        let q = p.to_cartesian();
        match self.channel_model {
            ChannelModel::FarFieldPlanar => Ok(planar_channel(&self.array, q, self.carrier)?.vector()),
            ChannelModel::Nusw => Ok(nusw_channel(&self.array, q, self.carrier)?.vector()),
            ChannelModel::GreenOperator => {
                Err(NfError::InvalidArgument("secrecy rates need a point-to-array channel model".into()))
            }
        }
    }

    /// log2(1 + P·|hᵀw|²/σ²) at `p`.
    pub fn rate_at(&self, p: PolarPoint, beamformer: &Beamformer) -> Result<f64> {
        let h = self.channel(p)?;
        ensure(h.len() == beamformer.len(), || format!("{} weights for {} antennas", beamformer.len(), h.len()))?;
        let snr = self.transmit_power * apply(&h, &beamformer.weights).norm_sqr() / self.noise_power;
        Ok((1.0 + snr).log2())
    }
}

/// max(0, R_Bob − R_Eve) in bit/s/Hz.
pub fn secrecy_rate(scenario: &PlsScenario, beamformer: &Beamformer) -> Result<f64> {
    scenario.validate()?;
    ensure((beamformer.norm() - 1.0).abs() < 1e-9, || format!("beamformer norm is {}, expected 1", beamformer.norm()))?;
    let bob = scenario.rate_at(scenario.bob, beamformer)?;
    let eve = match scenario.eve {
        Some(e) => scenario.rate_at(e, beamformer)?,
        None => 0.0,
    };
    Ok((bob - eve).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// beamfocusing on Bob over exact spherical-wave channels
    NearFocus,
    /// beamsteering toward Bob's angle over far-field channels
    FarSteer,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::NearFocus => "near_focus",
            SweepMode::FarSteer => "far_steer",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyCurve {
    pub mode: SweepMode,
    pub eve_distances: Vec<f64>,
    pub rates: Vec<f64>,
}

impl SecrecyCurve {
    pub fn rate_at(&self, distance: f64) -> Option<f64> {
        self.eve_distances.iter().position(|&d| d == distance).map(|i| self.rates[i])
    }

    /// Distance of the smallest rate; the first one on ties.
    pub fn argmin(&self) -> f64 {
        let mut best = 0;
        for (i, &r) in self.rates.iter().enumerate() {
            if r < self.rates[best] {
                best = i;
            }
        }
        self.eve_distances[best]
    }
}

/// Secrecy rate with Eve at each distance along Bob's direction. The
/// template's Eve, if any, is ignored.
pub fn secrecy_sweep(template: &PlsScenario, eve_distances: &[f64], mode: SweepMode) -> Result<SecrecyCurve> {
    ensure(eve_distances.iter().all(|&d| d > 0.0 && d.is_finite()), || {
        "eavesdropper distances must be positive".into()
    })?;
    let (scenario, beamformer) = match mode {
        SweepMode::NearFocus => (
            template.with_model(ChannelModel::Nusw),
            beamfocusing_vector(&template.array, template.bob, template.carrier)?,
        ),
        SweepMode::FarSteer => (
            template.with_model(ChannelModel::FarFieldPlanar),
            beamsteering_vector(&template.array, template.bob.angle, template.carrier),
        ),
    };
    let rates = eve_distances
        .par_iter()
        .map(|&d| secrecy_rate(&scenario.with_eve(Some(PolarPoint::new(d, template.bob.angle))), &beamformer))
        .collect::<Result<Vec<_>>>()?;
    Ok(SecrecyCurve { mode, eve_distances: eve_distances.to_vec(), rates })
}

/// CSV `eve_distance_m,secrecy_bps_hz,mode`, one block per curve.
pub fn write_curves_csv<W: Write>(curves: &[SecrecyCurve], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["eve_distance_m", "secrecy_bps_hz", "mode"])?;
    for c in curves {
        for (d, r) in c.eve_distances.iter().zip(&c.rates) {
            w.write_record([d.to_string(), r.to_string(), c.mode.name().to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
