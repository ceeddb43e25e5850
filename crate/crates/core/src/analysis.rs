//! Received-power scaling, degrees of freedom and communication modes.
//!
//! Discrete arrays use maximum-ratio transmission, so the received power is
//! P_t·Σ|h_i|² = P_t·(λ/4π)²·Σ d_i⁻². Continuous apertures integrate the
//! Green's function: a patch of area A radiates like an aperture of gain
//! 4πA/λ², giving P = P_t·4π·Σ A_p·|G_p|². With this normalization a patch of
//! area λ²/4π is worth exactly one isotropic element.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::channel::{greens_function, greens_operator, nusw_channel, ChannelMatrix, ChannelModel};
use crate::error::{ensure, NfError, Result};
use crate::geometry::{aperture_for_rayleigh, ApertureSurface, ArrayGeometry, Carrier, Point3};
use crate::linalg::singular_values;

/// Relative singular-value cutoff for effective rank.
pub const DEFAULT_DOF_THRESHOLD: f64 = 0.01;

/// Relative singular-value cutoff for counting aperture communication modes.
pub const DEFAULT_MODE_THRESHOLD: f64 = 0.1;

/// P_t·‖h‖² for an N×1 channel under maximum-ratio transmission.
pub fn received_power_mrt(channel: &ChannelMatrix, transmit_power: f64) -> Result<f64> {
    ensure(transmit_power >= 0.0, || format!("transmit power must be nonnegative, got {transmit_power}"))?;
    let gain: f64 = channel.entries.iter().map(|h| h.norm_sqr()).sum();
    if gain == 0.0 {
        return Err(NfError::DegenerateChannel("channel is identically zero".into()));
    }
    Ok(transmit_power * gain)
}

/// How an array grows: elements sit on a fixed lattice y = i·spacing and are
/// added alternately at the two edges (i = 0, +1, -1, +2, -2, ...), so every
/// earlier element stays in place and each new one is at least as far from a
/// broadside receiver as the last.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRule {
    pub spacing: f64,
}

impl GrowthRule {
    pub fn new(spacing: f64) -> Result<Self> {
        ensure(spacing.is_finite() && spacing > 0.0, || format!("growth spacing must be positive, got {spacing}"))?;
        Ok(Self { spacing })
    }

    /// Lattice index of the n-th added element.
    pub fn lattice_index(n: usize) -> i64 {
        let half = n.div_ceil(2) as i64;
        if n % 2 == 1 {
            half
        } else {
            -half
        }
    }

    pub fn array(&self, n: usize) -> Result<ArrayGeometry> {
        ensure(n >= 1, || "array size must be at least 1".into())?;
        let elements = (0..n).map(|i| Point3::new(0.0, Self::lattice_index(i) as f64 * self.spacing, 0.0)).collect();
        ArrayGeometry::from_positions(elements)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingModel {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve {
    /// element count (discrete) or aperture volume in m³ (continuous)
    pub sizes: Vec<f64>,
    /// watts
    pub received_power: Vec<f64>,
    pub model: ScalingModel,
}

impl ScalingCurve {
    /// Power added per unit of size between consecutive points.
    pub fn marginal_gains(&self) -> Vec<f64> {
        self.sizes.windows(2).zip(self.received_power.windows(2)).map(|(s, p)| (p[1] - p[0]) / (s[1] - s[0])).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["size", "power"])?;
        for (s, p) in self.sizes.iter().zip(&self.received_power) {
            w.write_record([s.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    ensure(!sizes.is_empty(), || "size list is empty".into())?;
    ensure(sizes.windows(2).all(|w| w[1] > w[0]), || "sizes must be strictly increasing".into())
}

/// Received MRT power as the array grows under `rule`.
pub fn power_scaling_curve(
    rule: GrowthRule,
    receiver: Point3,
    carrier: Carrier,
    sizes: &[usize],
    transmit_power: f64,
) -> Result<ScalingCurve> {
    GrowthRule::new(rule.spacing)?;
    check_sizes(sizes)?;
    ensure(sizes[0] >= 1, || "array size must be at least 1".into())?;
    let received_power = sizes
        .iter()
        .map(|&n| received_power_mrt(&nusw_channel(&rule.array(n)?, receiver, carrier)?, transmit_power))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingCurve { sizes: sizes.iter().map(|&n| n as f64).collect(), received_power, model: ScalingModel::Discrete })
}

/// Limit of the MRT power of an infinite lattice with pitch `spacing`, the
/// receiver at broadside distance `distance` from lattice point 0:
/// P_t·(λ/4π)²·Σ_i 1/(d² + i²s²) = P_t·(λ/4π)²·(π/(s·d))·coth(π·d/s).
pub fn lattice_power_ceiling(spacing: f64, distance: f64, carrier: Carrier, transmit_power: f64) -> f64 {
    let lambda = carrier.wavelength();
    let x = PI * distance / spacing;
    transmit_power * (lambda / (4.0 * PI)).powi(2) * PI / (spacing * distance) / x.tanh()
}

/// Largest cube that keeps a receiver at `distance` in its far field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicVolume {
    /// cube side √(dλ/2), m
    pub side: f64,
    /// m³
    pub volume: f64,
}

pub fn characteristic_volume(distance: f64, carrier: Carrier) -> Result<CharacteristicVolume> {
    ensure(distance > 0.0 && distance.is_finite(), || format!("distance must be positive, got {distance}"))?;
    let side = aperture_for_rayleigh(distance, carrier.wavelength())?;
    Ok(CharacteristicVolume { side, volume: side.powi(3) })
}

/// A radiating patch: centre and area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    pub center: Point3,
    pub area: f64,
}

impl ApertureSurface {
    pub fn patches(&self) -> Vec<Patch> {
        let area = self.patch_area();
        self.patch_centers().into_iter().map(|center| Patch { center, area }).collect()
    }
}

/// P_t·4π·Σ A_p·|G(p, receiver)|²; zero for an empty aperture.
pub fn continuous_received_power(
    patches: &[Patch],
    receiver: Point3,
    carrier: Carrier,
    transmit_power: f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for p in patches {
        acc += p.area * greens_function(p.center, receiver, carrier)?.norm_sqr();
    }
    Ok(transmit_power * 4.0 * PI * acc)
}

/// Far-field Friis power of an aperture of area `area`: P_t·(4πA/λ²)·(λ/4πd)².
pub fn aperture_friis_power(area: f64, distance: f64, carrier: Carrier, transmit_power: f64) -> f64 {
    let lambda = carrier.wavelength();
    transmit_power * (4.0 * PI * area / (lambda * lambda)) * (lambda / (4.0 * PI * distance)).powi(2)
}

/// A continuous strip in the y-z plane that grows along y one patch at a
/// time, with the same alternating-edge order as [`GrowthRule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGrowth {
    /// length of each patch along y, m
    pub patch_length: f64,
    /// strip width along z, m
    pub width: f64,
}

impl StripGrowth {
    pub fn new(patch_length: f64, width: f64) -> Result<Self> {
        ensure(patch_length > 0.0 && width > 0.0, || {
            format!("strip patch length and width must be positive, got {patch_length}, {width}")
        })?;
        Ok(Self { patch_length, width })
    }

    pub fn patches(&self, n: usize) -> Vec<Patch> {
        (0..n)
            .map(|i| Patch {
                center: Point3::new(0.0, GrowthRule::lattice_index(i) as f64 * self.patch_length, 0.0),
                area: self.patch_length * self.width,
            })
            .collect()
    }
}

/// Received power as the strip grows; sizes are patch counts and the curve
/// records the aperture volume (area × unit depth). A size of 0 gives zero
/// power.
pub fn continuous_power_scaling(
    growth: StripGrowth,
    receiver: Point3,
    carrier: Carrier,
    sizes: &[usize],
    transmit_power: f64,
) -> Result<ScalingCurve> {
    StripGrowth::new(growth.patch_length, growth.width)?;
    check_sizes(sizes)?;
    let received_power = sizes
        .iter()
        .map(|&n| continuous_received_power(&growth.patches(n), receiver, carrier, transmit_power))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingCurve {
        sizes: sizes
            .iter()
            .map(|&n| n as f64 * growth.patch_length * growth.width * crate::geometry::UNIT_DEPTH)
            .collect(),
        received_power,
        model: ScalingModel::Continuous,
    })
}

/// Ceiling of an infinitely long strip of width `width` at broadside distance
/// `distance`: P_t·width·∫dy/(4π(d²+y²)) = P_t·width/(4d).
pub fn strip_power_ceiling(width: f64, distance: f64, transmit_power: f64) -> f64 {
    transmit_power * width / (4.0 * distance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofReport {
    pub empirical_dof: usize,
    /// Table-style analytic bound for the same geometry, when known.
    pub bound_dof: Option<f64>,
    /// nonincreasing
    pub singular_values: Vec<f64>,
}

impl DofReport {
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound_dof = Some(bound);
        self
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["index", "sigma"])?;
        for (i, s) in self.singular_values.iter().enumerate() {
            w.write_record([(i + 1).to_string(), s.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of singular values with σ_i ≥ threshold·σ_1 (at least 1).
pub fn count_above(singular_values: &[f64], threshold: f64) -> usize {
    let Some(&top) = singular_values.first() else { return 0 };
    singular_values.iter().filter(|&&s| s >= threshold * top).count().max(1)
}

pub fn effective_dof(channel: &ChannelMatrix, threshold: f64) -> Result<DofReport> {
    ensure(threshold > 0.0 && threshold < 1.0, || format!("threshold must lie in (0, 1), got {threshold}"))?;
    ensure(channel.nrows() > 0 && channel.ncols() > 0, || "empty channel matrix".into())?;
    let sv = singular_values(&channel.entries)?;
    if sv[0] == 0.0 {
        return Err(NfError::DegenerateChannel("channel matrix is zero".into()));
    }
    Ok(DofReport { empirical_dof: count_above(&sv, threshold), bound_dof: None, singular_values: sv })
}

fn check_positive(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        ensure(v.is_finite() && *v > 0.0, || format!("{name} must be positive, got {v}"))?;
    }
    Ok(())
}

/// min{N_T, N_R, 2·L_T²·L_R²/(d·λ)²}.
pub fn dof_bound_discrete(n_t: usize, n_r: usize, l_t: f64, l_r: f64, distance: f64, wavelength: f64) -> Result<f64> {
    ensure(n_t >= 1 && n_r >= 1, || "antenna counts must be at least 1".into())?;
    check_positive(&[("L_T", l_t), ("L_R", l_r), ("distance", distance), ("wavelength", wavelength)])?;
    let geometric = 2.0 * l_t.powi(2) * l_r.powi(2) / (distance * wavelength).powi(2);
    Ok((n_t as f64).min(n_r as f64).min(geometric))
}

/// 2·V_T·V_R/((d·λ)²·Δz_T·Δz_R).
pub fn dof_bound_continuous(v_t: f64, v_r: f64, distance: f64, wavelength: f64, dz_t: f64, dz_r: f64) -> Result<f64> {
    check_positive(&[
        ("V_T", v_t),
        ("V_R", v_r),
        ("distance", distance),
        ("wavelength", wavelength),
        ("Δz_T", dz_t),
        ("Δz_R", dz_r),
    ])?;
    Ok(2.0 * v_t * v_r / ((distance * wavelength).powi(2) * dz_t * dz_r))
}

/// Integer DoF reported for a real-valued bound: max(1, ⌊bound⌋).
pub fn integer_dof(bound: f64) -> usize {
    if bound.is_finite() && bound >= 1.0 {
        bound.floor() as usize
    } else {
        1
    }
}

/// Mode count of a Green's operator.
pub fn communication_modes(op: &ChannelMatrix, threshold: f64) -> Result<DofReport> {
    if op.model != ChannelModel::GreenOperator {
        return Err(NfError::InvalidArgument("communication modes need a Green's operator".into()));
    }
    effective_dof(op, threshold)
}

/// Builds the operator between two parallel surfaces, counts its modes and
/// attaches the continuous bound at their axial separation.
pub fn aperture_modes(
    tx: &ApertureSurface,
    rx: &ApertureSurface,
    carrier: Carrier,
    threshold: f64,
) -> Result<DofReport> {
    let op = greens_operator(tx, rx, carrier)?;
    let report = communication_modes(&op, threshold)?;
    let distance = (rx.origin.x - tx.origin.x).abs();
    let bound = dof_bound_continuous(tx.volume(), rx.volume(), distance, carrier.wavelength(), tx.depth(), rx.depth())?;
    Ok(report.with_bound(bound))
}
