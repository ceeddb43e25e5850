//! Experiment dispatch. Each experiment returns its CSV files in memory so
//! that nothing touches disk until the whole run has succeeded.

use std::io::Write;

use nfkit::analysis::{
    aperture_modes, continuous_power_scaling, dof_bound_discrete, effective_dof, power_scaling_curve, GrowthRule,
    StripGrowth,
};
use nfkit::beamforming::{
    beamfocusing_vector, beamsteering_vector, compare_beam_split, hardware_cost, partition_hfn, radiation_pattern,
    PatternResponse, UnitPowers, User,
};
use nfkit::channel::{nusw_channel, nusw_mimo_channel, Band};
use nfkit::geometry::{
    classify_point, fresnel_boundary, make_uniform_linear_array, rayleigh_distance, ApertureSurface, ArrayGeometry,
    Carrier, FieldRegion, Point3, PolarPoint,
};
use nfkit::pls::{secrecy_sweep, write_curves_csv, PlsScenario, SweepMode};
use nfkit::sensing::{estimate_targets, music_spectrum, simulate_snapshots, write_estimates_csv, Target};
use nfkit::table::{PolarAxes, ValueScale};

use crate::config::{ExperimentKind, ResponseConfig, ScenarioConfig};
use crate::error::{CliError, Context};

/// A named CSV produced by an experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

struct Outputs<'a> {
    config: &'a ScenarioConfig,
    files: Vec<OutputFile>,
}

impl Outputs<'_> {
    /// `<kind>_<label>[_suffix].csv`
    fn add(
        &mut self,
        suffix: Option<&str>,
        write: impl FnOnce(&mut Vec<u8>) -> nfkit::Result<()>,
    ) -> Result<(), CliError> {
        let mut name = format!("{}_{}", self.config.experiment.name(), self.config.label());
        if let Some(s) = suffix {
            name.push('_');
            name.push_str(s);
        }
        name.push_str(".csv");
        let mut contents = Vec::new();
        write(&mut contents).op(&format!("writing {name}"))?;
        self.files.push(OutputFile { name, contents });
        Ok(())
    }
}

fn table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> nfkit::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn carrier(c: &ScenarioConfig) -> Result<Carrier, CliError> {
    Carrier::new(c.carrier.frequency_hz).op("carrier")
}

fn ula(c: &ScenarioConfig) -> Result<ArrayGeometry, CliError> {
    make_uniform_linear_array(c.antennas(), c.spacing()).op("make_uniform_linear_array")
}

fn region_name(r: FieldRegion) -> &'static str {
    match r {
        FieldRegion::ReactiveNear => "reactive_near",
        FieldRegion::RadiatingNear => "radiating_near",
        FieldRegion::Far => "far",
    }
}

/// Runs the configured experiment and returns its CSV files.
pub fn run_experiment(c: &ScenarioConfig) -> Result<Vec<OutputFile>, CliError> {
    let mut out = Outputs { config: c, files: Vec::new() };
    match c.experiment {
        ExperimentKind::Regions => regions(c, &mut out)?,
        ExperimentKind::Pattern => pattern(c, &mut out)?,
        ExperimentKind::Scaling => scaling(c, &mut out)?,
        ExperimentKind::Dof => dof(c, &mut out)?,
        ExperimentKind::Modes => modes(c, &mut out)?,
        ExperimentKind::Beamsplit => beamsplit(c, &mut out)?,
        ExperimentKind::Hfn => hfn(c, &mut out)?,
        ExperimentKind::Sense => sense(c, &mut out)?,
        ExperimentKind::Secrecy => secrecy(c, &mut out)?,
    }
    Ok(out.files)
}

fn regions(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.regions.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let array = ula(c)?;
    let (d, lambda) = (array.aperture(), carrier.wavelength());
    let fresnel = fresnel_boundary(d, lambda).op("fresnel_boundary")?;
    let rayleigh = rayleigh_distance(d, lambda).op("rayleigh_distance")?;
    let row = vec![d.to_string(), lambda.to_string(), fresnel.to_string(), rayleigh.to_string()];
    out.add(None, |w| table(w, &["aperture_m", "wavelength_m", "fresnel_m", "rayleigh_m"], &[row]))?;

    let mut rows = Vec::new();
    for &r in &p.probe_distances_m {
        let q = PolarPoint::from_degrees(r, p.probe_angle_deg).to_cartesian() + array.centroid();
        let report = classify_point(&array, q, carrier).op("classify_point")?;
        rows.push(vec![r.to_string(), p.probe_angle_deg.to_string(), region_name(report.region).to_string()]);
    }
    out.add(Some("probes"), |w| table(w, &["distance_m", "angle_deg", "region"], &rows))
}

fn pattern(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.pattern.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let array = ula(c)?;
    let angles = PolarAxes::degrees(&PolarAxes::linear(p.angle_start_deg, p.angle_step_deg, p.angle_count));
    let distances = PolarAxes::geometric(p.distance_start_m, p.distances_per_octave, p.distance_count);
    let axes = PolarAxes::new(angles, distances).op("pattern grid")?;
    let response = match p.response {
        ResponseConfig::PhaseOnly => PatternResponse::PhaseOnly,
        ResponseConfig::AmplitudeWeighted => PatternResponse::AmplitudeWeighted,
    };

    let steer = beamsteering_vector(&array, p.steer_angle_deg.to_radians(), carrier);
    let grid = radiation_pattern(&steer, &array, &axes, carrier, response).op("steering radiation_pattern")?;
    out.add(Some("steering"), |w| grid.write_csv(w, ValueScale::Linear))?;

    let focus = PolarPoint::from_degrees(p.focus_distance_m, p.focus_angle_deg);
    let focus_bf = beamfocusing_vector(&array, focus, carrier).op("beamfocusing_vector")?;
    let grid = radiation_pattern(&focus_bf, &array, &axes, carrier, response).op("focusing radiation_pattern")?;
    out.add(Some("focusing"), |w| grid.write_csv(w, ValueScale::Linear))
}

fn scaling(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.scaling.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let receiver = Point3::new(p.receiver_distance_m, 0.0, 0.0);
    let s = c.spacing();

    let rule = GrowthRule::new(s).op("growth rule")?;
    let curve = power_scaling_curve(rule, receiver, carrier, &p.sizes, p.transmit_power_w).op("power_scaling_curve")?;
    out.add(Some("discrete"), |w| curve.write_csv(w))?;

    let strip = StripGrowth::new(s, s).op("strip growth")?;
    let curve = continuous_power_scaling(strip, receiver, carrier, &p.sizes, p.transmit_power_w)
        .op("continuous_power_scaling")?;
    out.add(Some("continuous"), |w| curve.write_csv(w))
}

fn dof(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.dof.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let line = |n: usize, l: f64| make_uniform_linear_array(n, l / (n - 1) as f64).op("make_uniform_linear_array");
    let tx = line(p.tx_antennas, p.tx_length_m)?;
    let rx0 = line(p.rx_antennas, p.rx_length_m)?;

    let mut summary = Vec::new();
    let mut sigma = Vec::new();
    for &d in &p.distances_m {
        let rx = rx0.translated(Point3::new(d, 0.0, 0.0));
        let h = nusw_mimo_channel(&tx, &rx, carrier).op("nusw_mimo_channel")?;
        let report = effective_dof(&h, p.threshold).op("effective_dof")?;
        let bound =
            dof_bound_discrete(p.tx_antennas, p.rx_antennas, p.tx_length_m, p.rx_length_m, d, carrier.wavelength())
                .op("dof_bound_discrete")?;
        summary.push(vec![d.to_string(), report.empirical_dof.to_string(), bound.to_string()]);
        for (i, s) in report.singular_values.iter().enumerate() {
            sigma.push(vec![d.to_string(), (i + 1).to_string(), s.to_string()]);
        }
    }
    out.add(None, |w| table(w, &["distance_m", "empirical_dof", "bound_dof"], &summary))?;
    out.add(Some("sigma"), |w| table(w, &["distance_m", "index", "sigma"], &sigma))
}

/// Patches per side for a square aperture of `side` at distance `d`.
pub fn mode_patches(side: f64, wavelength: f64, d: f64, oversampling: f64, extra: usize) -> usize {
    (oversampling * side * side / (wavelength * d)).ceil() as usize + extra
}

fn modes(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.modes.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let mut summary = Vec::new();
    let mut sigma = Vec::new();
    for &d in &p.distances_m {
        let n = mode_patches(p.side_m, carrier.wavelength(), d, p.oversampling, p.extra_patches);
        let tx = ApertureSurface::square(Point3::ORIGIN, p.side_m, n).op("transmit aperture")?;
        let rx = ApertureSurface::square(Point3::new(d, 0.0, 0.0), p.side_m, n).op("receive aperture")?;
        let report = aperture_modes(&tx, &rx, carrier, p.threshold).op("aperture_modes")?;
        let bound = report.bound_dof.unwrap_or(f64::NAN);
        summary.push(vec![d.to_string(), n.to_string(), report.empirical_dof.to_string(), bound.to_string()]);
        for (i, s) in report.singular_values.iter().enumerate() {
            sigma.push(vec![d.to_string(), (i + 1).to_string(), s.to_string()]);
        }
    }
    out.add(None, |w| table(w, &["distance_m", "patches_per_side", "modes", "bound_modes"], &summary))?;
    out.add(Some("sigma"), |w| table(w, &["distance_m", "index", "sigma"], &sigma))
}

fn beamsplit(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.beamsplit.clone().unwrap_or_default();
    let array = ula(c)?;
    let band = Band::new(c.carrier.frequency_hz, p.bandwidth_hz, p.subcarriers).op("band")?;
    let focus = PolarPoint::from_degrees(p.focus_distance_m, p.focus_angle_deg);
    let (ps, ttd) = compare_beam_split(&array, focus, band, p.ttd_per_rf).op("compare_beam_split")?;
    let rows: Vec<Vec<String>> = band
        .frequencies()
        .iter()
        .zip(ps.iter().zip(&ttd))
        .map(|(f, (a, b))| vec![f.to_string(), a.to_string(), b.to_string()])
        .collect();
    out.add(None, |w| table(w, &["frequency_hz", "ps_gain", "ttd_gain"], &rows))
}

fn hfn(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.hfn.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let array = ula(c)?;
    let band = if p.bandwidth_hz == 0.0 {
        Band::narrowband(c.carrier.frequency_hz)
    } else {
        Band::new(c.carrier.frequency_hz, p.bandwidth_hz, p.subcarriers)
    }
    .op("band")?;
    let users: Vec<User> = p
        .users
        .iter()
        .map(|u| User { location: PolarPoint::from_degrees(u.distance_m, u.angle_deg), qos: u.qos })
        .collect();
    let s = partition_hfn(&array, &users, p.rf_chains, p.ttd_per_rf, band).op("partition_hfn")?;

    let chains: Vec<Vec<String>> = s
        .chains
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            vec![i.to_string(), ch.first_antenna.to_string(), ch.antennas.to_string(), ch.ttd_delays.len().to_string()]
        })
        .collect();
    out.add(Some("chains"), |w| table(w, &["chain", "first_antenna", "antennas", "ttds"], &chains))?;

    // narrowband gain |hᵀw|²/‖h‖² of every chain toward every user
    let mut gains = Vec::new();
    for (u, user) in users.iter().enumerate() {
        let h = nusw_channel(&array, user.location.to_cartesian(), carrier).op("nusw_channel")?.vector();
        let hn = nfkit::channel::norm(&h).powi(2);
        for i in 0..s.n_rf() {
            let w = s.chain_weights(i, c.carrier.frequency_hz).op("chain_weights")?;
            let g = nfkit::beamforming::apply(&h, &w).norm_sqr() / hn;
            gains.push(vec![u.to_string(), i.to_string(), g.to_string()]);
        }
    }
    out.add(Some("gains"), |w| table(w, &["user", "chain", "gain"], &gains))?;

    let units = UnitPowers { rf_chain: p.rf_chain_w, phase_shifter: p.phase_shifter_w, ttd: p.ttd_w };
    let cost = hardware_cost(&s, units).op("hardware_cost")?;
    let row = vec![cost.n_rf.to_string(), cost.n_ttd.to_string(), cost.n_ps.to_string(), cost.power_w.to_string()];
    out.add(Some("cost"), |w| table(w, &["n_rf", "n_ttd", "n_ps", "power_w"], &[row]))
}

fn sense(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.sense.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let array = ula(c)?;
    let targets = p
        .targets
        .iter()
        .map(|t| Target::unit(t.distance_m, t.angle_deg))
        .collect::<nfkit::Result<Vec<_>>>()
        .op("target list")?;
    let snaps =
        simulate_snapshots(&array, &targets, p.snapshots, p.snr_db, c.seed, carrier).op("simulate_snapshots")?;
    let angles = PolarAxes::degrees(&PolarAxes::linear(p.angle_start_deg, p.angle_step_deg, p.angle_count));
    let distances = PolarAxes::linear(p.distance_start_m, p.distance_step_m, p.distance_count);
    let axes = PolarAxes::new(angles, distances).op("sensing grid")?;
    let spectrum = music_spectrum(&snaps, targets.len(), &axes, &array, carrier).op("music_spectrum")?;
    let estimates = estimate_targets(&spectrum, targets.len()).op("estimate_targets")?;
    out.add(Some("spectrum"), |w| spectrum.write_csv(w, ValueScale::Decibel))?;
    out.add(Some("estimates"), |w| write_estimates_csv(&estimates, w))
}

fn secrecy(c: &ScenarioConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = c.secrecy.clone().unwrap_or_default();
    let carrier = carrier(c)?;
    let array = ula(c)?;
    let bob = PolarPoint::from_degrees(p.bob_distance_m, p.bob_angle_deg);
    let template = PlsScenario::with_bob_snr(array, carrier, bob, None, p.bob_snr_db).op("secrecy scenario")?;
    let curves = [SweepMode::NearFocus, SweepMode::FarSteer]
        .into_iter()
        .map(|m| secrecy_sweep(&template, &p.eve_distances_m, m).op(&format!("secrecy_sweep ({})", m.name())))
        .collect::<Result<Vec<_>, _>>()?;
    out.add(None, |w| write_curves_csv(&curves, w))
}
