//! Near-field MUSIC: snapshot simulation, joint range-angle spectrum and peak
//! picking.

use std::io::Write;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::spherical_response;
use crate::error::{ensure, NfError, Result};
use crate::geometry::{ArrayGeometry, Carrier, PolarPoint};
use crate::linalg::hermitian_eigen;
use crate::table::{PolarAxes, PolarGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// meters
    pub range: f64,
    /// radians
    pub angle: f64,
    pub amplitude: Complex64,
}

impl Target {
    pub fn new(range: f64, angle: f64, amplitude: Complex64) -> Result<Self> {
        ensure(range > 0.0 && range.is_finite(), || format!("target range must be positive, got {range}"))?;
        ensure(amplitude.norm() > 0.0, || "target amplitude must be nonzero".into())?;
        Ok(Self { range, angle, amplitude })
    }

    pub fn unit(range: f64, angle_deg: f64) -> Result<Self> {
        Self::new(range, angle_deg.to_radians(), Complex64::new(1.0, 0.0))
    }

    pub fn location(&self) -> PolarPoint {
        PolarPoint::new(self.range, self.angle)
    }
}

/// N × L received samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub data: Array2<Complex64>,
    /// per-antenna noise power σ²
    pub noise_power: f64,
    pub seed: u64,
}

impl SnapshotSet {
    pub fn antennas(&self) -> usize {
        self.data.nrows()
    }

    pub fn snapshots(&self) -> usize {
        self.data.ncols()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { data: self.data.mapv(|v| v * factor), noise_power: self.noise_power * factor * factor, seed: self.seed }
    }

    /// (1/L)·Y·Yᴴ
    pub fn covariance(&self) -> Array2<Complex64> {
        let y = &self.data;
        let yh = y.t().mapv(|v| v.conj());
        y.dot(&yh).mapv(|v| v / self.snapshots() as f64)
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

/// y_l = Σ_k s_{k,l}·a_k·a(r_k, θ_k) + n_l with unit-norm spherical responses
/// a, unit noise power, and symbol power snr·N so that `snr_db` is the
/// per-antenna SNR of a unit-amplitude target. An infinite SNR gives
/// noiseless data. Snapshot l draws from stream l of a ChaCha8 generator
/// seeded with `seed`, so columns are generated independently.
pub fn simulate_snapshots(
    array: &ArrayGeometry,
    targets: &[Target],
    snapshots: usize,
    snr_db: f64,
    seed: u64,
    carrier: Carrier,
) -> Result<SnapshotSet> {
    ensure(snapshots >= 1, || "snapshot count must be at least 1".into())?;
    ensure(!snr_db.is_nan() && snr_db != f64::NEG_INFINITY, || format!("invalid SNR {snr_db} dB"))?;
    let n = array.len();
    let noiseless = snr_db == f64::INFINITY;
    let (noise_power, symbol_power) =
        if noiseless { (0.0, n as f64) } else { (1.0, 10f64.powf(snr_db / 10.0) * n as f64) };
    let responses = targets
        .iter()
        .map(|t| spherical_response(array, t.location().to_cartesian(), carrier).map(|a| a.mapv(|v| v * t.amplitude)))
        .collect::<Result<Vec<Array1<Complex64>>>>()?;
    let columns: Vec<Vec<Complex64>> = (0..snapshots)
        .into_par_iter()
        .map(|l| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(l as u64);
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for a in &responses {
                let s = complex_gaussian(&mut rng, symbol_power);
                for (c, v) in col.iter_mut().zip(a) {
                    *c += s * v;
                }
            }
            if !noiseless {
                for c in col.iter_mut() {
                    *c += complex_gaussian(&mut rng, noise_power);
                }
            }
            col
        })
        .collect();
    let data = Array2::from_shape_fn((n, snapshots), |(i, l)| columns[l][i]);
    Ok(SnapshotSet { data, noise_power, seed })
}

/// Eigen-split of the sample covariance into k signal and N−k noise
/// directions.
#[derive(Debug, Clone)]
pub struct Subspaces {
    /// nonincreasing
    pub eigenvalues: Vec<f64>,
    pub signal: Array2<Complex64>,
    pub noise: Array2<Complex64>,
}

/// Relative eigenvalue level below which a direction counts as empty.
const RANK_TOLERANCE: f64 = 1e-10;

pub fn subspaces(snapshots: &SnapshotSet, k: usize) -> Result<Subspaces> {
    let n = snapshots.antennas();
    ensure(k >= 1 && k < n, || format!("target count {k} must satisfy 1 ≤ k < N = {n}"))?;
    let (eigenvalues, vectors) = hermitian_eigen(&snapshots.covariance())?;
    let top = eigenvalues[0];
    if top.is_nan() || top <= 0.0 {
        return Err(NfError::Diagnostic("snapshot covariance is zero".into()));
    }
    if eigenvalues[k - 1] <= RANK_TOLERANCE * top {
        let rank = eigenvalues.iter().filter(|&&v| v > RANK_TOLERANCE * top).count();
        return Err(NfError::Diagnostic(format!(
            "covariance has numerical rank {rank}, fewer than the {k} requested signal directions"
        )));
    }
    let signal = vectors.slice(ndarray::s![.., ..k]).to_owned();
    let noise = vectors.slice(ndarray::s![.., k..]).to_owned();
    Ok(Subspaces { eigenvalues, signal, noise })
}

fn projection_norm_sqr(basis: &Array2<Complex64>, a: &Array1<Complex64>) -> f64 {
    basis.axis_iter(Axis(1)).map(|col| col.iter().zip(a).map(|(e, x)| e.conj() * x).sum::<Complex64>().norm_sqr()).sum()
}

/// ‖E_nᴴ a(p)‖ for the unit-norm response at `point`.
pub fn noise_projection_norm(
    sub: &Subspaces,
    array: &ArrayGeometry,
    point: PolarPoint,
    carrier: Carrier,
) -> Result<f64> {
    let a = spherical_response(array, point.to_cartesian(), carrier)?;
    Ok(projection_norm_sqr(&sub.noise, &a).sqrt())
}

/// Smallest admissible noise-subspace energy; keeps the spectrum finite.
const SPECTRUM_FLOOR: f64 = 1e-300;

/// MUSIC pseudo-spectrum 1/(aᴴ E_n E_nᴴ a), evaluated as 1/(1 − ‖E_sᴴa‖²)
/// since the eigenvectors are orthonormal and a has unit norm.
pub fn music_spectrum(
    snapshots: &SnapshotSet,
    k: usize,
    axes: &PolarAxes,
    array: &ArrayGeometry,
    carrier: Carrier,
) -> Result<PolarGrid> {
    ensure(snapshots.antennas() == array.len(), || {
        format!("{} snapshot rows for {} antennas", snapshots.antennas(), array.len())
    })?;
    let sub = subspaces(snapshots, k)?;
    axes.evaluate(|p| {
        let a = spherical_response(array, p.to_cartesian(), carrier)?;
        let residual = (1.0 - projection_norm_sqr(&sub.signal, &a)).max(SPECTRUM_FLOOR);
        Ok(1.0 / residual)
    })
}

/// The k strongest strict local maxima (8-neighbourhood), ties resolved
/// toward smaller range and then smaller angle, returned by ascending range.
pub fn estimate_targets(spectrum: &PolarGrid, k: usize) -> Result<Vec<PolarPoint>> {
    ensure(k >= 1, || "need at least one target".into())?;
    let (rows, cols) = spectrum.values.dim();
    let v = &spectrum.values;
    let mut peaks = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let x = v[(r, c)];
            let mut strict = true;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                    if rr < 0 || cc < 0 || rr >= rows as i64 || cc >= cols as i64 {
                        continue;
                    }
                    if v[(rr as usize, cc as usize)] >= x {
                        strict = false;
                    }
                }
            }
            if strict && (rows * cols > 1) {
                peaks.push((r, c));
            }
        }
    }
    if rows * cols == 1 {
        peaks.push((0, 0));
    }
    if peaks.len() < k {
        return Err(NfError::Diagnostic(format!("found {} strict local maxima, {k} requested", peaks.len())));
    }
    peaks.sort_by(|a, b| v[*b].total_cmp(&v[*a]).then(a.cmp(b)));
    peaks.truncate(k);
    peaks.sort();
    Ok(peaks.into_iter().map(|(r, c)| spectrum.axes.point(r, c)).collect())
}

/// CSV `rank,range_m,angle_deg` with rank counted from 1.
pub fn write_estimates_csv<W: Write>(estimates: &[PolarPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["rank", "range_m", "angle_deg"])?;
    for (i, p) in estimates.iter().enumerate() {
        w.write_record([(i + 1).to_string(), p.distance.to_string(), p.angle.to_degrees().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Peak-to-saddle ratio in dB along a range profile for two sources at
/// ranges `r1 < r2`: the weaker of the two values at their nearest cells over
/// the minimum strictly between them. Floored at 0 dB when the pair is not
/// resolved.
pub fn peak_to_saddle_db(profile: &[f64], distances: &[f64], r1: f64, r2: f64) -> Result<f64> {
    ensure(profile.len() == distances.len() && !profile.is_empty(), || "profile and axis lengths differ".into())?;
    ensure(r1 < r2, || format!("expected r1 < r2, got {r1} and {r2}"))?;
    let nearest = |r: f64| {
        (0..distances.len()).min_by(|&a, &b| (distances[a] - r).abs().total_cmp(&(distances[b] - r).abs())).unwrap_or(0)
    };
    let (i1, i2) = (nearest(r1), nearest(r2));
    ensure(i2 > i1 + 1, || format!("ranges {r1} and {r2} fall on adjacent grid cells"))?;
    let peak = profile[i1].min(profile[i2]);
    let saddle = profile[i1 + 1..i2].iter().copied().fold(f64::INFINITY, f64::min);
    Ok((10.0 * (peak / saddle).log10()).max(0.0))
}

/// max/min of a profile in dB.
pub fn profile_variation_db(profile: &[f64]) -> f64 {
    let max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = profile.iter().copied().fold(f64::INFINITY, f64::min);
    10.0 * (max / min).log10()
}
