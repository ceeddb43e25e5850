//! Beamsteering and beamfocusing vectors, polar radiation patterns, wideband
//! beam split, and TTD-based hybrid beamformers (FC, SC and HFN).
//!
//! Weights are transmit weights: the signal seen at a point with channel h is
//! hᵀw. Conjugating the NUSW phase exp(-j·k·d_n) therefore gives
//! exp(+j·k·d_n), and the steering vector conjugates the plane-wave response.

use std::f64::consts::TAU;
use std::ops::Range;

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{farfield_channel, nusw_channel, spherical_response, Band, WidebandChannelSet};
use crate::error::{ensure, NfError, Result};
use crate::geometry::{
    direction, rayleigh_distance, require_distinct, split_even, ArrayGeometry, Carrier, PolarPoint, SPEED_OF_LIGHT,
};
use crate::table::{PolarAxes, PolarGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BeamKind {
    Steering { angle: f64 },
    Focusing { distance: f64, angle: f64 },
    Hybrid,
    Matched,
}

/// Unit-norm transmit weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub weights: Array1<Complex64>,
    pub kind: BeamKind,
}

impl Beamformer {
    /// Normalizes `weights` to unit norm.
    pub fn new(weights: Array1<Complex64>, kind: BeamKind) -> Result<Self> {
        let n = crate::channel::norm(&weights);
        if !(n > 0.0 && n.is_finite()) {
            return Err(NfError::InvalidArgument("beamformer weights must be nonzero and finite".into()));
        }
        Ok(Self { weights: weights.mapv(|w| w / n), kind })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm(&self) -> f64 {
        crate::channel::norm(&self.weights)
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let r = Complex64::from_polar(1.0, phase);
        Self { weights: self.weights.mapv(|w| w * r), kind: self.kind }
    }

    /// Conjugate of a channel vector, i.e. maximum-ratio transmission.
    pub fn matched(channel: &Array1<Complex64>) -> Result<Self> {
        Self::new(channel.mapv(|h| h.conj()), BeamKind::Matched)
    }
}

/// hᵀw.
pub fn apply(channel: &Array1<Complex64>, weights: &Array1<Complex64>) -> Complex64 {
    channel.iter().zip(weights).map(|(h, w)| h * w).sum()
}

pub fn beamsteering_vector(array: &ArrayGeometry, angle: f64, carrier: Carrier) -> Beamformer {
    let scale = 1.0 / (array.len() as f64).sqrt();
    let weights = farfield_channel(array, angle, carrier).vector().mapv(|a| a.conj() * scale);
    Beamformer { weights, kind: BeamKind::Steering { angle } }
}

pub fn beamfocusing_vector(array: &ArrayGeometry, focus: PolarPoint, carrier: Carrier) -> Result<Beamformer> {
    let weights = spherical_response(array, focus.to_cartesian(), carrier)?.mapv(|a| a.conj());
    Ok(Beamformer { weights, kind: BeamKind::Focusing { distance: focus.distance, angle: focus.angle } })
}

/// Response vector used when rendering a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PatternResponse {
    /// unit-amplitude exp(-j·k·d_n)/√N; an aligned beam scores exactly 1
    #[default]
    PhaseOnly,
    /// NUSW channel scaled to unit norm (true matched-filter gain)
    AmplitudeWeighted,
}

pub fn pattern_value(
    beamformer: &Beamformer,
    array: &ArrayGeometry,
    point: PolarPoint,
    carrier: Carrier,
    response: PatternResponse,
) -> Result<f64> {
    ensure(beamformer.len() == array.len(), || {
        format!("beamformer has {} weights for {} elements", beamformer.len(), array.len())
    })?;
    let p = point.to_cartesian();
    let a = match response {
        PatternResponse::PhaseOnly => spherical_response(array, p, carrier)?,
        PatternResponse::AmplitudeWeighted => {
            let h = nusw_channel(array, p, carrier)?.vector();
            let n = crate::channel::norm(&h);
            h.mapv(|v| v / n)
        }
    };
    Ok(apply(&a, &beamformer.weights).norm_sqr())
}

pub fn radiation_pattern(
    beamformer: &Beamformer,
    array: &ArrayGeometry,
    axes: &PolarAxes,
    carrier: Carrier,
    response: PatternResponse,
) -> Result<PolarGrid> {
    ensure(beamformer.len() == array.len(), || {
        format!("beamformer has {} weights for {} elements", beamformer.len(), array.len())
    })?;
    axes.evaluate(|p| pattern_value(beamformer, array, p, carrier, response))
}

/// |a_N(p1)ᴴ a_N(p2)| for half-wavelength ULAs of each size.
pub fn asymptotic_orthogonality(sizes: &[usize], p1: PolarPoint, p2: PolarPoint, carrier: Carrier) -> Result<Vec<f64>> {
    sizes
        .iter()
        .map(|&n| {
            let array = crate::geometry::half_wavelength_ula(n, carrier)?;
            let a = spherical_response(&array, p1.to_cartesian(), carrier)?;
            let b = spherical_response(&array, p2.to_cartesian(), carrier)?;
            Ok(crate::channel::normalized_correlation(&a, &b))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridKind {
    FullyConnected,
    SubConnected,
    HybridFarNear,
}

/// One RF chain: a contiguous antenna block driven through PSs, grouped into
/// equal-as-possible TTD segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfChain {
    pub first_antenna: usize,
    pub antennas: usize,
    /// seconds, one per TTD segment
    pub ttd_delays: Vec<f64>,
    /// radians in [0, 2π), one per antenna of the block
    pub ps_phases: Vec<f64>,
}

impl RfChain {
    pub fn range(&self) -> Range<usize> {
        self.first_antenna..self.first_antenna + self.antennas
    }

    pub fn segments(&self) -> Vec<Range<usize>> {
        split_even(0..self.antennas, self.ttd_delays.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridStructure {
    pub kind: HybridKind,
    pub n_antennas: usize,
    pub n_ttd_per_rf: usize,
    /// seconds
    pub max_delay: f64,
    pub chains: Vec<RfChain>,
}

impl HybridStructure {
    pub fn n_rf(&self) -> usize {
        self.chains.len()
    }

    pub fn n_ps(&self) -> usize {
        self.chains.iter().map(|c| c.antennas).sum()
    }

    pub fn n_ttd(&self) -> usize {
        self.chains.iter().map(|c| c.ttd_delays.len()).sum()
    }

    /// Distinct antenna blocks in order of first antenna.
    pub fn partition(&self) -> Vec<Range<usize>> {
        let mut blocks: Vec<Range<usize>> = self.chains.iter().map(RfChain::range).collect();
        blocks.sort_by_key(|r| (r.start, r.end));
        blocks.dedup();
        blocks
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(NfError::Configuration(m));
        if self.chains.is_empty() {
            return cfg("hybrid structure has no RF chains".into());
        }
        if !(self.max_delay >= 0.0 && self.max_delay.is_finite()) {
            return cfg(format!("max_delay must be nonnegative, got {}", self.max_delay));
        }
        for (i, c) in self.chains.iter().enumerate() {
            if c.antennas == 0 || c.range().end > self.n_antennas {
                return cfg(format!("chain {i} covers antennas {:?} outside 0..{}", c.range(), self.n_antennas));
            }
            if c.ps_phases.len() != c.antennas {
                return cfg(format!("chain {i} has {} PS phases for {} antennas", c.ps_phases.len(), c.antennas));
            }
            if c.ttd_delays.is_empty() || c.ttd_delays.len() > c.antennas {
                return cfg(format!("chain {i} has {} TTDs for {} antennas", c.ttd_delays.len(), c.antennas));
            }
            if let Some(t) = c.ttd_delays.iter().find(|t| !(**t >= 0.0 && **t <= self.max_delay)) {
                return cfg(format!("chain {i} delay {t} s outside [0, {}] s", self.max_delay));
            }
            if let Some(p) = c.ps_phases.iter().find(|p| !(**p >= 0.0 && **p < TAU)) {
                return cfg(format!("chain {i} phase {p} outside [0, 2π)"));
            }
        }
        if self.kind != HybridKind::FullyConnected {
            let blocks = self.partition();
            let mut next = 0;
            for b in &blocks {
                if b.start != next {
                    return cfg(format!("partition {blocks:?} does not tile 0..{}", self.n_antennas));
                }
                next = b.end;
            }
            if next != self.n_antennas {
                return cfg(format!("partition {blocks:?} does not tile 0..{}", self.n_antennas));
            }
        }
        Ok(())
    }

    /// Effective N-vector of chain `index` at frequency `f`: PS phase minus
    /// the TTD phase 2π·f·τ of its segment, scaled to unit norm.
    pub fn chain_weights(&self, index: usize, f: f64) -> Result<Array1<Complex64>> {
        let chain = self.chains.get(index).ok_or_else(|| {
            NfError::InvalidArgument(format!("chain {index} out of range for {} chains", self.chains.len()))
        })?;
        let scale = 1.0 / (chain.antennas as f64).sqrt();
        let mut w = Array1::zeros(self.n_antennas);
        for (seg, &tau) in chain.segments().iter().zip(&chain.ttd_delays) {
            for i in seg.clone() {
                w[chain.first_antenna + i] = Complex64::from_polar(scale, chain.ps_phases[i] - TAU * f * tau);
            }
        }
        Ok(w)
    }

    pub fn chain(&self, index: usize) -> ChainWeights<'_> {
        ChainWeights { structure: self, index }
    }
}

/// Weights that may vary across subcarriers.
pub trait FrequencyWeights {
    fn weights_at(&self, frequency_hz: f64) -> Result<Array1<Complex64>>;
}

impl FrequencyWeights for Beamformer {
    fn weights_at(&self, _: f64) -> Result<Array1<Complex64>> {
        Ok(self.weights.clone())
    }
}

/// One RF chain of a hybrid structure viewed as a wideband beamformer.
#[derive(Debug, Clone, Copy)]
pub struct ChainWeights<'a> {
    structure: &'a HybridStructure,
    index: usize,
}

impl FrequencyWeights for ChainWeights<'_> {
    fn weights_at(&self, frequency_hz: f64) -> Result<Array1<Complex64>> {
        self.structure.validate()?;
        self.structure.chain_weights(self.index, frequency_hz)
    }
}

/// Per-subcarrier array gain |h_mᵀw(f_m)|²·M/(Σ|h_n|)², M the number of
/// driven antennas and the sum over them. This is 1 exactly when every
/// driven antenna is phase-aligned with the channel.
pub fn beam_split_gain<W: FrequencyWeights + ?Sized>(weights: &W, wideband: &WidebandChannelSet) -> Result<Vec<f64>> {
    wideband
        .frequencies
        .iter()
        .zip(&wideband.channels)
        .map(|(&f, ch)| {
            let h = ch.vector();
            let w = weights.weights_at(f)?;
            ensure(w.len() == h.len(), || format!("{} weights for {} antennas", w.len(), h.len()))?;
            let mut amplitude = 0.0;
            let mut support = 0usize;
            for (hn, wn) in h.iter().zip(&w) {
                if wn.norm_sqr() > 0.0 {
                    amplitude += hn.norm();
                    support += 1;
                }
            }
            if amplitude == 0.0 {
                return Err(NfError::DegenerateChannel("no driven antenna sees the channel".into()));
            }
            Ok(apply(&h, &w).norm_sqr() * support as f64 / (amplitude * amplitude))
        })
        .collect()
}

/// Default TTD range: twice the array's light-crossing time.
pub fn default_max_delay(array: &ArrayGeometry) -> f64 {
    2.0 * array.aperture() / SPEED_OF_LIGHT
}

/// Path-length model used to design one chain.
#[derive(Debug, Clone, Copy)]
enum PathModel {
    /// exact distance to the point
    Spherical(PolarPoint),
    /// plane wave from the block centre toward the point
    Planar(PolarPoint),
}

fn path_lengths(array: &ArrayGeometry, block: Range<usize>, model: PathModel) -> Result<Vec<f64>> {
    let elems = &array.elements()[block];
    match model {
        PathModel::Spherical(p) => {
            let q = p.to_cartesian();
            elems
                .iter()
                .map(|&e| {
                    let d = e.distance(q);
                    require_distinct(d, || format!("user {p:?} coincides with an element"))?;
                    Ok(d)
                })
                .collect()
        }
        PathModel::Planar(p) => {
            let centre = elems.iter().fold(crate::Point3::ORIGIN, |a, &e| a + e) * (1.0 / elems.len() as f64);
            let rel = p.to_cartesian() - centre;
            require_distinct(rel.norm(), || format!("user {p:?} coincides with a subarray centre"))?;
            let u = direction(rel.x.atan2(rel.y));
            Ok(elems.iter().map(|&e| -u.dot(e - centre)).collect())
        }
    }
}

/// Least-squares slope of y against x.
fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn design_chain(
    array: &ArrayGeometry,
    block: Range<usize>,
    n_ttd: usize,
    model: PathModel,
    band: Band,
    max_delay: f64,
) -> Result<RfChain> {
    let lengths = path_lengths(array, block.clone(), model)?;
    let fc = band.center_hz;
    let freqs = band.frequencies();
    let segments = split_even(0..lengths.len(), n_ttd);
    let wideband = band.subcarriers > 1 && band.bandwidth_hz > 0.0;

    // residual phase of each segment after the centre-frequency PS setting is
    // 2π(f - f_c)·ℓ_n/c; fit its segment mean against frequency
    let slopes: Vec<f64> = segments
        .iter()
        .map(|seg| {
            if !wideband {
                return 0.0;
            }
            let mean_len = lengths[seg.clone()].iter().sum::<f64>() / seg.len() as f64;
            let residual: Vec<f64> = freqs.iter().map(|f| TAU * (f - fc) * mean_len / SPEED_OF_LIGHT).collect();
            ls_slope(&freqs, &residual) / TAU
        })
        .collect();
    let top = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delays: Vec<f64> = slopes.iter().map(|s| (top - s).clamp(0.0, max_delay)).collect();

    let mut ps_phases = vec![0.0; lengths.len()];
    for (seg, &tau) in segments.iter().zip(&delays) {
        for i in seg.clone() {
            ps_phases[i] = (TAU * fc * lengths[i] / SPEED_OF_LIGHT + TAU * fc * tau).rem_euclid(TAU);
            if ps_phases[i] >= TAU {
                ps_phases[i] = 0.0;
            }
        }
    }
    Ok(RfChain { first_antenna: block.start, antennas: block.len(), ttd_delays: delays, ps_phases })
}

/// FC or SC TTD hybrid beamformer with one RF chain per beam. Chain i serves
/// user i mod #users. FC chains drive all antennas and focus on their user;
/// SC chains drive contiguous equal subarrays designed with the plane-wave
/// approximation.
pub fn design_ttd_hybrid(
    kind: HybridKind,
    array: &ArrayGeometry,
    users: &[PolarPoint],
    n_rf: usize,
    n_ttd_per_rf: usize,
    band: Band,
) -> Result<HybridStructure> {
    let n = array.len();
    let cfg = |m: String| Err(NfError::Configuration(m));
    if users.is_empty() {
        return cfg("at least one user is required".into());
    }
    if n_rf < users.len() {
        return cfg(format!("{n_rf} RF chains cannot serve {} users with dedicated beams", users.len()));
    }
    if n_ttd_per_rf == 0 {
        return cfg("need at least one TTD per RF chain".into());
    }
    let max_delay = default_max_delay(array);
    let chains = match kind {
        HybridKind::FullyConnected => {
            if !n.is_multiple_of(n_ttd_per_rf) {
                return cfg(format!("{n_ttd_per_rf} TTDs do not divide {n} antennas evenly"));
            }
            (0..n_rf)
                .map(|i| {
                    design_chain(
                        array,
                        0..n,
                        n_ttd_per_rf,
                        PathModel::Spherical(users[i % users.len()]),
                        band,
                        max_delay,
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
        HybridKind::SubConnected => {
            if !n.is_multiple_of(n_rf) || !(n / n_rf).is_multiple_of(n_ttd_per_rf) {
                return cfg(format!(
                    "{n} antennas cannot be split into {n_rf} subarrays of {n_ttd_per_rf} equal TTD segments"
                ));
            }
            split_even(0..n, n_rf)
                .into_iter()
                .enumerate()
                .map(|(i, block)| {
                    design_chain(array, block, n_ttd_per_rf, PathModel::Planar(users[i % users.len()]), band, max_delay)
                })
                .collect::<Result<Vec<_>>>()?
        }
        HybridKind::HybridFarNear => {
            return cfg("hybrid far/near structures are built by partition_hfn".into());
        }
    };
    let s = HybridStructure { kind, n_antennas: n, n_ttd_per_rf, max_delay, chains };
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qos {
    DelaySensitive,
    HighRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub location: PolarPoint,
    pub qos: Qos,
}

/// Number of leading elements whose Rayleigh distance does not exceed
/// `distance`; at least 1.
fn far_field_block(array: &ArrayGeometry, distance: f64, lambda: f64) -> Result<usize> {
    let elems = array.elements();
    let mut size = 1;
    for m in 2..=elems.len() {
        let d = elems[0].distance(elems[m - 1]);
        if rayleigh_distance(d, lambda)? <= distance {
            size = m;
        } else {
            break;
        }
    }
    Ok(size)
}

/// Hybrid far/near split. The small subarray is the largest leading block
/// that keeps every delay-sensitive user in its far field (capped so the
/// large subarray keeps a strict majority when high-rate users exist); it
/// gets one RF chain with a single TTD and steers to the first
/// delay-sensitive user. The remaining chains drive the large subarray and
/// focus on the high-rate users in turn.
pub fn partition_hfn(
    array: &ArrayGeometry,
    users: &[User],
    n_rf: usize,
    n_ttd_per_rf: usize,
    band: Band,
) -> Result<HybridStructure> {
    let cfg = |m: String| Err(NfError::Configuration(m));
    let n = array.len();
    let delay: Vec<PolarPoint> = users.iter().filter(|u| u.qos == Qos::DelaySensitive).map(|u| u.location).collect();
    let rate: Vec<PolarPoint> = users.iter().filter(|u| u.qos == Qos::HighRate).map(|u| u.location).collect();
    if users.is_empty() {
        return cfg("at least one user is required".into());
    }
    if n_rf == 0 || n_ttd_per_rf == 0 {
        return cfg("need at least one RF chain and one TTD per chain".into());
    }
    let lambda = Carrier::new(band.center_hz)?.wavelength();
    let max_delay = default_max_delay(array);

    let small = if delay.is_empty() {
        0
    } else {
        let nearest = delay.iter().map(|p| p.distance).fold(f64::INFINITY, f64::min);
        let pair = if n >= 2 { array.elements()[0].distance(array.elements()[1]) } else { 0.0 };
        if n >= 2 && rayleigh_distance(pair, lambda)? > nearest {
            return cfg(format!(
                "delay-sensitive user at {nearest} m is inside the near field of a 2-element subarray (Rayleigh distance {} m)",
                rayleigh_distance(pair, lambda)?
            ));
        }
        let block = far_field_block(array, nearest, lambda)?;
        if rate.is_empty() {
            block
        } else {
            block.min((n - 1) / 2)
        }
    };
    if !rate.is_empty() && small > 0 && n_rf < 2 {
        return cfg("serving both user classes needs at least 2 RF chains".into());
    }
    if !rate.is_empty() && small == 0 && !delay.is_empty() {
        return cfg(format!("array of {n} elements too small to split between user classes"));
    }

    let mut chains = Vec::new();
    if small > 0 {
        chains.push(design_chain(array, 0..small, 1, PathModel::Planar(delay[0]), band, max_delay)?);
    }
    if small < n {
        let large_users = if rate.is_empty() { &delay } else { &rate };
        let remaining = n_rf - usize::from(small > 0);
        for i in 0..remaining {
            let seg = n_ttd_per_rf.min(n - small);
            chains.push(design_chain(
                array,
                small..n,
                seg,
                PathModel::Spherical(large_users[i % large_users.len()]),
                band,
                max_delay,
            )?);
        }
    }
    let s = HybridStructure { kind: HybridKind::HybridFarNear, n_antennas: n, n_ttd_per_rf, max_delay, chains };
    s.validate()?;
    Ok(s)
}

/// Watts per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitPowers {
    pub rf_chain: f64,
    pub phase_shifter: f64,
    pub ttd: f64,
}

impl Default for UnitPowers {
    fn default() -> Self {
        Self { rf_chain: 0.3, phase_shifter: 0.02, ttd: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareCost {
    pub n_rf: usize,
    pub n_ttd: usize,
    pub n_ps: usize,
    pub power_w: f64,
}

/// FC: N·n_rf PSs; SC: N PSs; HFN: one PS per driven antenna per chain.
/// TTDs are counted per chain.
pub fn hardware_cost(structure: &HybridStructure, units: UnitPowers) -> Result<HardwareCost> {
    ensure(units.rf_chain >= 0.0 && units.phase_shifter >= 0.0 && units.ttd >= 0.0, || {
        format!("unit powers must be nonnegative, got {units:?}")
    })?;
    let (n_rf, n_ttd, n_ps) = (structure.n_rf(), structure.n_ttd(), structure.n_ps());
    let power_w = n_rf as f64 * units.rf_chain + n_ttd as f64 * units.ttd + n_ps as f64 * units.phase_shifter;
    Ok(HardwareCost { n_rf, n_ttd, n_ps, power_w })
}

/// Beam-split scenario gains for a PS-only focusing beamformer and the FC TTD
/// design on the same band, both focused on `focus`.
pub fn compare_beam_split(
    array: &ArrayGeometry,
    focus: PolarPoint,
    band: Band,
    n_ttd: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let carrier = Carrier::new(band.center_hz)?;
    let set = crate::channel::wideband_channels(array, focus.to_cartesian(), band)?;
    let ps = beamfocusing_vector(array, focus, carrier)?;
    let fc = design_ttd_hybrid(HybridKind::FullyConnected, array, &[focus], 1, n_ttd, band)?;
    Ok((beam_split_gain(&ps, &set)?, beam_split_gain(&fc.chain(0), &set)?))
}

pub fn min_gain(gains: &[f64]) -> f64 {
    gains.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
