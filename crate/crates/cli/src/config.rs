//! Scenario configuration: TOML text in, fully resolved config out.
//!
//! Every optional value is materialized during resolution, so serializing a
//! resolved config and parsing it again yields the same config.

use nfkit::beamforming::Qos;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_OUTPUT_DIR: &str = "nfkit-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Regions,
    Pattern,
    Scaling,
    Dof,
    Modes,
    Beamsplit,
    Hfn,
    Sense,
    Secrecy,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::Regions,
        ExperimentKind::Pattern,
        ExperimentKind::Scaling,
        ExperimentKind::Dof,
        ExperimentKind::Modes,
        ExperimentKind::Beamsplit,
        ExperimentKind::Hfn,
        ExperimentKind::Sense,
        ExperimentKind::Secrecy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Regions => "regions",
            ExperimentKind::Pattern => "pattern",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Dof => "dof",
            ExperimentKind::Modes => "modes",
            ExperimentKind::Beamsplit => "beamsplit",
            ExperimentKind::Hfn => "hfn",
            ExperimentKind::Sense => "sense",
            ExperimentKind::Secrecy => "secrecy",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentKind::Regions => "Fresnel and Rayleigh boundaries of a ULA, with probe points classified",
            ExperimentKind::Pattern => "steering and focusing radiation patterns over a polar grid",
            ExperimentKind::Scaling => "received power versus array size, discrete and continuous",
            ExperimentKind::Dof => "effective DoF of a ULA-to-ULA channel versus distance",
            ExperimentKind::Modes => "communication modes between two square apertures versus distance",
            ExperimentKind::Beamsplit => "per-subcarrier gain of phase-shifter and TTD focusing",
            ExperimentKind::Hfn => "hybrid far/near-field subarray partition and hardware cost",
            ExperimentKind::Sense => "near-field MUSIC spectrum and target estimates",
            ExperimentKind::Secrecy => "secrecy rate versus eavesdropper distance",
        }
    }

    /// Default element count, for experiments that use `[geometry]`.
    fn default_antennas(self) -> Option<usize> {
        match self {
            ExperimentKind::Regions | ExperimentKind::Pattern => Some(128),
            ExperimentKind::Beamsplit => Some(256),
            ExperimentKind::Hfn | ExperimentKind::Sense | ExperimentKind::Secrecy => Some(512),
            ExperimentKind::Scaling | ExperimentKind::Dof | ExperimentKind::Modes => None,
        }
    }

    fn uses_spacing(self) -> bool {
        !matches!(self, ExperimentKind::Dof | ExperimentKind::Modes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierConfig {
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub antennas: Option<usize>,
    /// defaults to half a wavelength
    pub spacing_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionsParams {
    pub probe_distances_m: Vec<f64>,
    pub probe_angle_deg: f64,
}

impl Default for RegionsParams {
    fn default() -> Self {
        Self { probe_distances_m: vec![20.0, 100.0, 1000.0], probe_angle_deg: 90.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseConfig {
    PhaseOnly,
    AmplitudeWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatternParams {
    pub steer_angle_deg: f64,
    pub focus_distance_m: f64,
    pub focus_angle_deg: f64,
    pub angle_start_deg: f64,
    pub angle_step_deg: f64,
    pub angle_count: usize,
    pub distance_start_m: f64,
    pub distances_per_octave: usize,
    pub distance_count: usize,
    pub response: ResponseConfig,
}

impl Default for PatternParams {
    fn default() -> Self {
        Self {
            steer_angle_deg: 45.0,
            focus_distance_m: 20.0,
            focus_angle_deg: 90.0,
            angle_start_deg: 0.9,
            angle_step_deg: 0.9,
            angle_count: 200,
            distance_start_m: 2.5,
            distances_per_octave: 20,
            distance_count: 200,
            response: ResponseConfig::PhaseOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingParams {
    pub receiver_distance_m: f64,
    pub sizes: Vec<usize>,
    pub transmit_power_w: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self { receiver_distance_m: 1.0, sizes: (0..13).map(|i| 1 << i).collect(), transmit_power_w: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DofParams {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub tx_length_m: f64,
    pub rx_length_m: f64,
    pub distances_m: Vec<f64>,
    pub threshold: f64,
}

impl Default for DofParams {
    fn default() -> Self {
        Self {
            tx_antennas: 16,
            rx_antennas: 16,
            tx_length_m: 1.0,
            rx_length_m: 1.0,
            distances_m: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 800.0],
            threshold: nfkit::analysis::DEFAULT_DOF_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModesParams {
    pub side_m: f64,
    pub distances_m: Vec<f64>,
    pub threshold: f64,
    /// patches per side = ceil(oversampling · side²/(λd)) + extra_patches
    pub oversampling: f64,
    pub extra_patches: usize,
}

impl Default for ModesParams {
    fn default() -> Self {
        Self {
            side_m: 0.3,
            distances_m: vec![2.0, 4.0, 8.0, 16.0],
            threshold: nfkit::analysis::DEFAULT_MODE_THRESHOLD,
            oversampling: 1.5,
            extra_patches: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamsplitParams {
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
    pub focus_distance_m: f64,
    pub focus_angle_deg: f64,
    pub ttd_per_rf: usize,
}

impl Default for BeamsplitParams {
    fn default() -> Self {
        Self { bandwidth_hz: 10e9, subcarriers: 129, focus_distance_m: 10.0, focus_angle_deg: 45.0, ttd_per_rf: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserConfig {
    pub distance_m: f64,
    pub angle_deg: f64,
    pub qos: Qos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HfnParams {
    pub users: Vec<UserConfig>,
    pub rf_chains: usize,
    pub ttd_per_rf: usize,
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
    pub rf_chain_w: f64,
    pub phase_shifter_w: f64,
    pub ttd_w: f64,
}

impl Default for HfnParams {
    fn default() -> Self {
        let units = nfkit::beamforming::UnitPowers::default();
        Self {
            users: vec![
                UserConfig { distance_m: 30.0, angle_deg: 60.0, qos: Qos::DelaySensitive },
                UserConfig { distance_m: 10.0, angle_deg: 45.0, qos: Qos::HighRate },
            ],
            rf_chains: 2,
            ttd_per_rf: 16,
            bandwidth_hz: 0.0,
            subcarriers: 1,
            rf_chain_w: units.rf_chain,
            phase_shifter_w: units.phase_shifter,
            ttd_w: units.ttd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub distance_m: f64,
    pub angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SenseParams {
    pub targets: Vec<TargetConfig>,
    pub snapshots: usize,
    pub snr_db: f64,
    pub angle_start_deg: f64,
    pub angle_step_deg: f64,
    pub angle_count: usize,
    pub distance_start_m: f64,
    pub distance_step_m: f64,
    pub distance_count: usize,
}

impl Default for SenseParams {
    fn default() -> Self {
        Self {
            targets: [10.0, 25.0, 40.0].iter().map(|&d| TargetConfig { distance_m: d, angle_deg: 45.0 }).collect(),
            snapshots: 100,
            snr_db: 10.0,
            angle_start_deg: 30.0,
            angle_step_deg: 0.5,
            angle_count: 61,
            distance_start_m: 0.5,
            distance_step_m: 0.5,
            distance_count: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SecrecyParams {
    pub bob_distance_m: f64,
    pub bob_angle_deg: f64,
    pub bob_snr_db: f64,
    pub eve_distances_m: Vec<f64>,
}

impl Default for SecrecyParams {
    fn default() -> Self {
        Self {
            bob_distance_m: 25.0,
            bob_angle_deg: 45.0,
            bob_snr_db: 10.0,
            eve_distances_m: (1..=10).map(|i| 5.0 * i as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: ExperimentKind,
    pub label: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<String>,
    pub carrier: CarrierConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<RegionsParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dof: Option<DofParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModesParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beamsplit: Option<BeamsplitParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hfn: Option<HfnParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sense: Option<SenseParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secrecy: Option<SecrecyParams>,
}

impl ScenarioConfig {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.experiment.name())
    }

    pub fn output_dir(&self) -> &str {
        self.output_dir.as_deref().unwrap_or(DEFAULT_OUTPUT_DIR)
    }

    pub fn wavelength(&self) -> f64 {
        nfkit::geometry::SPEED_OF_LIGHT / self.carrier.frequency_hz
    }

    pub fn antennas(&self) -> usize {
        self.geometry.as_ref().and_then(|g| g.antennas).unwrap_or(0)
    }

    pub fn spacing(&self) -> f64 {
        self.geometry.as_ref().and_then(|g| g.spacing_m).unwrap_or(self.wavelength() / 2.0)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses and resolves a config. The result has every default filled in.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let raw: ScenarioConfig = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    resolve(raw)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Dotted path of the key at `offset`: the nearest table header above it
/// plus the key itself.
fn key_path(text: &str, offset: usize) -> String {
    let start = offset.min(text.len());
    let key: String =
        text[start..].chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '-').collect();
    let header = text[..start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').to_string());
    match header {
        Some(h) if !h.is_empty() => format!("{h}.{key}"),
        _ => key,
    }
}

fn syntax_error(text: &str, e: &toml::de::Error) -> CliError {
    let span = e.span();
    let (line, column) = span.as_ref().map_or((0, 0), |s| line_col(text, s.start));
    let message = e.message().to_string();
    if message.starts_with("unknown field") {
        let key = span.map_or_else(String::new, |s| key_path(text, s.start));
        CliError::UnknownKey { key, line, column, message }
    } else {
        CliError::Syntax { line, column, message }
    }
}

fn out_of_range(key: &str, value: impl std::fmt::Display, bounds: &str) -> CliError {
    CliError::OutOfRange { key: key.to_string(), message: format!("{value} is outside {bounds}") }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(out_of_range(key, v, "(0, ∞)"))
    }
}

fn nonnegative(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(out_of_range(key, v, "[0, ∞)"))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(out_of_range(key, v, &format!("[{min}, ∞)")))
    }
}

fn angle(key: &str, v: f64) -> Result<(), CliError> {
    if (0.0..=180.0).contains(&v) {
        Ok(())
    } else {
        Err(out_of_range(key, v, "[0, 180] degrees"))
    }
}

fn finite(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(out_of_range(key, v, "finite values"))
    }
}

fn increasing(key: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(out_of_range(key, "[]", "nonempty lists"));
    }
    for (i, &x) in v.iter().enumerate() {
        positive(&format!("{key}[{i}]"), x)?;
    }
    if v.windows(2).all(|w| w[1] > w[0]) {
        Ok(())
    } else {
        Err(out_of_range(key, format!("{v:?}"), "strictly increasing lists"))
    }
}

fn resolve(mut c: ScenarioConfig) -> Result<ScenarioConfig, CliError> {
    let kind = c.experiment;
    positive("carrier.frequency_hz", c.carrier.frequency_hz)?;

    let label = c.label.take().unwrap_or_else(|| kind.name().to_string());
    if label.is_empty() || !label.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
        return Err(out_of_range("label", format!("{label:?}"), "nonempty [A-Za-z0-9_-] names"));
    }
    c.label = Some(label);
    if c.output_dir.as_deref() == Some("") {
        return Err(out_of_range("output_dir", "\"\"", "nonempty paths"));
    }
    c.output_dir.get_or_insert_with(|| DEFAULT_OUTPUT_DIR.to_string());

    let blocks = [
        (ExperimentKind::Regions, c.regions.is_some()),
        (ExperimentKind::Pattern, c.pattern.is_some()),
        (ExperimentKind::Scaling, c.scaling.is_some()),
        (ExperimentKind::Dof, c.dof.is_some()),
        (ExperimentKind::Modes, c.modes.is_some()),
        (ExperimentKind::Beamsplit, c.beamsplit.is_some()),
        (ExperimentKind::Hfn, c.hfn.is_some()),
        (ExperimentKind::Sense, c.sense.is_some()),
        (ExperimentKind::Secrecy, c.secrecy.is_some()),
    ];
    for (k, present) in blocks {
        if present && k != kind {
            return Err(CliError::UnknownKey {
                key: k.name().to_string(),
                line: 0,
                column: 0,
                message: format!("block [{}] does not apply to experiment {}", k.name(), kind.name()),
            });
        }
    }

    let lambda = nfkit::geometry::SPEED_OF_LIGHT / c.carrier.frequency_hz;
    let mut geometry = c.geometry.take().unwrap_or_default();
    match kind.default_antennas() {
        Some(n) => {
            let n = *geometry.antennas.get_or_insert(n);
            at_least("geometry.antennas", n, 1)?;
        }
        None if geometry.antennas.is_some() => {
            return Err(CliError::UnknownKey {
                key: "geometry.antennas".into(),
                line: 0,
                column: 0,
                message: format!("experiment {} does not take geometry.antennas", kind.name()),
            });
        }
        None => {}
    }
    if kind.uses_spacing() {
        positive("geometry.spacing_m", *geometry.spacing_m.get_or_insert(lambda / 2.0))?;
    } else if geometry.spacing_m.is_some() {
        return Err(CliError::UnknownKey {
            key: "geometry.spacing_m".into(),
            line: 0,
            column: 0,
            message: format!("experiment {} does not take geometry.spacing_m", kind.name()),
        });
    }
    c.geometry = (geometry != GeometryConfig::default()).then_some(geometry);

    match kind {
        ExperimentKind::Regions => {
            let p = c.regions.get_or_insert_with(Default::default);
            for (i, &d) in p.probe_distances_m.iter().enumerate() {
                positive(&format!("regions.probe_distances_m[{i}]"), d)?;
            }
            angle("regions.probe_angle_deg", p.probe_angle_deg)?;
        }
        ExperimentKind::Pattern => {
            let p = c.pattern.get_or_insert_with(Default::default);
            angle("pattern.steer_angle_deg", p.steer_angle_deg)?;
            angle("pattern.focus_angle_deg", p.focus_angle_deg)?;
            positive("pattern.focus_distance_m", p.focus_distance_m)?;
            finite("pattern.angle_start_deg", p.angle_start_deg)?;
            positive("pattern.angle_step_deg", p.angle_step_deg)?;
            at_least("pattern.angle_count", p.angle_count, 1)?;
            positive("pattern.distance_start_m", p.distance_start_m)?;
            at_least("pattern.distances_per_octave", p.distances_per_octave, 1)?;
            at_least("pattern.distance_count", p.distance_count, 1)?;
        }
        ExperimentKind::Scaling => {
            let p = c.scaling.get_or_insert_with(Default::default);
            positive("scaling.receiver_distance_m", p.receiver_distance_m)?;
            positive("scaling.transmit_power_w", p.transmit_power_w)?;
            if p.sizes.is_empty() || p.sizes[0] == 0 || !p.sizes.windows(2).all(|w| w[1] > w[0]) {
                return Err(out_of_range(
                    "scaling.sizes",
                    format!("{:?}", p.sizes),
                    "nonempty strictly increasing lists of positive sizes",
                ));
            }
        }
        ExperimentKind::Dof => {
            let p = c.dof.get_or_insert_with(Default::default);
            at_least("dof.tx_antennas", p.tx_antennas, 2)?;
            at_least("dof.rx_antennas", p.rx_antennas, 2)?;
            positive("dof.tx_length_m", p.tx_length_m)?;
            positive("dof.rx_length_m", p.rx_length_m)?;
            increasing("dof.distances_m", &p.distances_m)?;
            if !(p.threshold > 0.0 && p.threshold < 1.0) {
                return Err(out_of_range("dof.threshold", p.threshold, "(0, 1)"));
            }
        }
        ExperimentKind::Modes => {
            let p = c.modes.get_or_insert_with(Default::default);
            positive("modes.side_m", p.side_m)?;
            increasing("modes.distances_m", &p.distances_m)?;
            positive("modes.oversampling", p.oversampling)?;
            if !(p.threshold > 0.0 && p.threshold < 1.0) {
                return Err(out_of_range("modes.threshold", p.threshold, "(0, 1)"));
            }
        }
        ExperimentKind::Beamsplit => {
            let p = c.beamsplit.get_or_insert_with(Default::default);
            nonnegative("beamsplit.bandwidth_hz", p.bandwidth_hz)?;
            if p.bandwidth_hz / 2.0 >= c.carrier.frequency_hz {
                return Err(out_of_range("beamsplit.bandwidth_hz", p.bandwidth_hz, "[0, 2·carrier.frequency_hz)"));
            }
            at_least("beamsplit.subcarriers", p.subcarriers, 1)?;
            positive("beamsplit.focus_distance_m", p.focus_distance_m)?;
            angle("beamsplit.focus_angle_deg", p.focus_angle_deg)?;
            at_least("beamsplit.ttd_per_rf", p.ttd_per_rf, 1)?;
        }
        ExperimentKind::Hfn => {
            let p = c.hfn.get_or_insert_with(Default::default);
            if p.users.is_empty() {
                return Err(out_of_range("hfn.users", "[]", "nonempty lists"));
            }
            for (i, u) in p.users.iter().enumerate() {
                positive(&format!("hfn.users[{i}].distance_m"), u.distance_m)?;
                angle(&format!("hfn.users[{i}].angle_deg"), u.angle_deg)?;
            }
            at_least("hfn.rf_chains", p.rf_chains, 1)?;
            at_least("hfn.ttd_per_rf", p.ttd_per_rf, 1)?;
            nonnegative("hfn.bandwidth_hz", p.bandwidth_hz)?;
            if p.bandwidth_hz / 2.0 >= c.carrier.frequency_hz {
                return Err(out_of_range("hfn.bandwidth_hz", p.bandwidth_hz, "[0, 2·carrier.frequency_hz)"));
            }
            at_least("hfn.subcarriers", p.subcarriers, 1)?;
            nonnegative("hfn.rf_chain_w", p.rf_chain_w)?;
            nonnegative("hfn.phase_shifter_w", p.phase_shifter_w)?;
            nonnegative("hfn.ttd_w", p.ttd_w)?;
        }
        ExperimentKind::Sense => {
            let n = c.antennas();
            let p = c.sense.get_or_insert_with(Default::default);
            if p.targets.is_empty() || p.targets.len() >= n {
                return Err(out_of_range(
                    "sense.targets",
                    p.targets.len(),
                    &format!("[1, {}] targets", n.saturating_sub(1)),
                ));
            }
            for (i, t) in p.targets.iter().enumerate() {
                positive(&format!("sense.targets[{i}].distance_m"), t.distance_m)?;
                angle(&format!("sense.targets[{i}].angle_deg"), t.angle_deg)?;
            }
            at_least("sense.snapshots", p.snapshots, p.targets.len() + 1)?;
            if p.snr_db.is_nan() || p.snr_db == f64::NEG_INFINITY {
                return Err(out_of_range("sense.snr_db", p.snr_db, "(-∞, +∞]"));
            }
            finite("sense.angle_start_deg", p.angle_start_deg)?;
            positive("sense.angle_step_deg", p.angle_step_deg)?;
            at_least("sense.angle_count", p.angle_count, 1)?;
            positive("sense.distance_start_m", p.distance_start_m)?;
            positive("sense.distance_step_m", p.distance_step_m)?;
            at_least("sense.distance_count", p.distance_count, 1)?;
        }
        ExperimentKind::Secrecy => {
            let p = c.secrecy.get_or_insert_with(Default::default);
            positive("secrecy.bob_distance_m", p.bob_distance_m)?;
            angle("secrecy.bob_angle_deg", p.bob_angle_deg)?;
            finite("secrecy.bob_snr_db", p.bob_snr_db)?;
            for (i, &d) in p.eve_distances_m.iter().enumerate() {
                positive(&format!("secrecy.eve_distances_m[{i}]"), d)?;
            }
            if p.eve_distances_m.is_empty() {
                return Err(out_of_range("secrecy.eve_distances_m", "[]", "nonempty lists"));
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("experiment = \"pattern\"\n[carrier]\nfrequency_hz = 3e9\n").unwrap();
        assert_eq!(c.label(), "pattern");
        assert_eq!(c.output_dir(), DEFAULT_OUTPUT_DIR);
        assert_eq!(c.antennas(), 128);
        assert!((c.spacing() - c.wavelength() / 2.0).abs() < 1e-15);
        assert_eq!(c.pattern, Some(PatternParams::default()));
    }

    #[test]
    fn unknown_key_is_named_with_position() {
        let text = "experiment = \"pattern\"\n[carrier]\nfrequency_hz = 3e9\n[geometry]\nanttennas = 4\n";
        match parse_config(text).unwrap_err() {
            CliError::UnknownKey { key, line, column, .. } => {
                assert_eq!(key, "geometry.anttennas");
                assert_eq!((line, column), (5, 1));
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_config("experiment = \"pattern\"\n[carrier\n").unwrap_err() {
            CliError::Syntax { line, .. } => assert_eq!(line, 2),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn out_of_range_names_key() {
        let text = "experiment = \"secrecy\"\n[carrier]\nfrequency_hz = -1\n";
        match parse_config(text).unwrap_err() {
            CliError::OutOfRange { key, .. } => assert_eq!(key, "carrier.frequency_hz"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn foreign_block_rejected() {
        let text = "experiment = \"dof\"\n[carrier]\nfrequency_hz = 3e9\n[sense]\nsnapshots = 4\n";
        assert!(matches!(parse_config(text), Err(CliError::UnknownKey { .. })));
    }

    #[test]
    fn resolved_configs_round_trip() {
        for kind in ExperimentKind::ALL {
            let text = format!("experiment = \"{}\"\nseed = 9\n[carrier]\nfrequency_hz = 28e9\n", kind.name());
            let c = parse_config(&text).unwrap();
            let again = parse_config(&c.to_toml()).unwrap();
            assert_eq!(again, c, "{}", kind.name());
        }
    }
}
