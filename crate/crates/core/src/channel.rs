//! Line-of-sight channel generation: planar-wave, NUSW spherical-wave,
//! wideband per-subcarrier sets, and Green's-function aperture operators.

use std::f64::consts::PI;
use std::io::Write;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, NfError, Result};
use crate::geometry::{direction, require_distinct, ApertureSurface, ArrayGeometry, Carrier, Point3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelModel {
    FarFieldPlanar,
    Nusw,
    GreenOperator,
}

/// Complex transfer coefficients, receivers along rows and transmitters along
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: Array2<Complex64>,
    pub carrier: Carrier,
    pub model: ChannelModel,
}

impl ChannelMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    /// First column as a vector; the natural view of an N×1 channel.
    pub fn vector(&self) -> Array1<Complex64> {
        self.entries.column(0).to_owned()
    }

    pub fn transpose(&self) -> ChannelMatrix {
        ChannelMatrix { entries: self.entries.t().to_owned(), carrier: self.carrier, model: self.model }
    }

    /// CSV with columns `row,col,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["row", "col", "re", "im"])?;
        for ((r, c), v) in self.entries.indexed_iter() {
            w.write_record([r.to_string(), c.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn column(entries: Vec<Complex64>) -> Array2<Complex64> {
    let n = entries.len();
    Array2::from_shape_vec((n, 1), entries).expect("shape matches length")
}

/// exp(-j·phase) scaled by `amplitude`.
fn phasor(amplitude: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(amplitude, -phase)
}

/// Plane-wave array response toward polar angle `angle` with unit gain:
/// entry n is exp(+j·k·⟨u, p_n⟩), the far-field limit of exp(-j·k·d_n) once
/// the common range phase is dropped.
pub fn farfield_channel(array: &ArrayGeometry, angle: f64, carrier: Carrier) -> ChannelMatrix {
    let k = carrier.wavenumber();
    let u = direction(angle);
    let entries = array.elements().iter().map(|&p| Complex64::from_polar(1.0, k * u.dot(p))).collect();
    ChannelMatrix { entries: column(entries), carrier, model: ChannelModel::FarFieldPlanar }
}

/// Far-field model of the link to `receiver`: one Friis amplitude and range
/// phase for the whole array times the plane-wave response.
pub fn planar_channel(array: &ArrayGeometry, receiver: Point3, carrier: Carrier) -> Result<ChannelMatrix> {
    let rel = receiver - array.centroid();
    let r = rel.norm();
    require_distinct(r, || "receiver coincides with the array centre".into())?;
    let angle = rel.x.atan2(rel.y);
    let lambda = carrier.wavelength();
    let common = phasor(lambda / (4.0 * PI * r), carrier.wavenumber() * r);
    let mut ch = farfield_channel(array, angle, carrier);
    ch.entries.mapv_inplace(|v| v * common);
    Ok(ch)
}

fn nusw_entry(src: Point3, dst: Point3, lambda: f64, k: f64) -> Result<Complex64> {
    let d = src.distance(dst);
    require_distinct(d, || format!("element at {src:?} coincides with {dst:?}"))?;
    Ok(phasor(lambda / (4.0 * PI * d), k * d))
}

/// Spherical-wave channel from every element to one receiver:
/// (λ/(4π·d_n))·exp(-j·k·d_n).
pub fn nusw_channel(array: &ArrayGeometry, receiver: Point3, carrier: Carrier) -> Result<ChannelMatrix> {
    let (lambda, k) = (carrier.wavelength(), carrier.wavenumber());
    let entries = array.elements().iter().map(|&p| nusw_entry(p, receiver, lambda, k)).collect::<Result<Vec<_>>>()?;
    Ok(ChannelMatrix { entries: column(entries), carrier, model: ChannelModel::Nusw })
}

/// N_R × N_T spherical-wave MIMO channel.
pub fn nusw_mimo_channel(tx: &ArrayGeometry, rx: &ArrayGeometry, carrier: Carrier) -> Result<ChannelMatrix> {
    let (lambda, k) = (carrier.wavelength(), carrier.wavenumber());
    let mut entries = Array2::zeros((rx.len(), tx.len()));
    for (r, &q) in rx.elements().iter().enumerate() {
        for (t, &p) in tx.elements().iter().enumerate() {
            entries[(r, t)] = nusw_entry(p, q, lambda, k)?;
        }
    }
    Ok(ChannelMatrix { entries, carrier, model: ChannelModel::Nusw })
}

/// Unit-amplitude spherical response exp(-j·k·d_n)/√N used for pattern
/// evaluation and subspace estimation.
pub fn spherical_response(array: &ArrayGeometry, point: Point3, carrier: Carrier) -> Result<Array1<Complex64>> {
    let k = carrier.wavenumber();
    let scale = 1.0 / (array.len() as f64).sqrt();
    array
        .elements()
        .iter()
        .map(|&p| {
            let d = p.distance(point);
            require_distinct(d, || format!("point {point:?} coincides with an element"))?;
            Ok(phasor(scale, k * d))
        })
        .collect()
}

/// Scalar free-space Green's function exp(-j·k·d)/(4π·d).
pub fn greens_function(src: Point3, dst: Point3, carrier: Carrier) -> Result<Complex64> {
    let d = src.distance(dst);
    require_distinct(d, || "Green's function evaluated at zero distance".into())?;
    Ok(phasor(1.0 / (4.0 * PI * d), carrier.wavenumber() * d))
}

/// Patch-collocation discretization of the aperture-to-aperture Green's
/// operator, entry (q, p) = G(p, q)·√(A_p·A_q).
pub fn greens_operator(tx: &ApertureSurface, rx: &ApertureSurface, carrier: Carrier) -> Result<ChannelMatrix> {
    if tx.overlaps(rx) {
        return Err(NfError::SingularGeometry("transmit and receive apertures overlap".into()));
    }
    let src = tx.patch_centers();
    let dst = rx.patch_centers();
    let weight = (tx.patch_area() * rx.patch_area()).sqrt();
    let k = carrier.wavenumber();
    let rows: Vec<Vec<Complex64>> = dst
        .par_iter()
        .map(|&q| {
            src.iter()
                .map(|&p| {
                    let d = p.distance(q);
                    require_distinct(d, || "aperture patches coincide".into())?;
                    Ok(phasor(weight / (4.0 * PI * d), k * d))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    let entries = Array2::from_shape_vec((dst.len(), src.len()), flat).expect("row-major layout");
    Ok(ChannelMatrix { entries, carrier, model: ChannelModel::GreenOperator })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
}

impl Band {
    pub fn new(center_hz: f64, bandwidth_hz: f64, subcarriers: usize) -> Result<Self> {
        ensure(subcarriers >= 1, || "need at least one subcarrier".into())?;
        ensure(bandwidth_hz >= 0.0 && bandwidth_hz.is_finite(), || {
            format!("bandwidth must be nonnegative, got {bandwidth_hz}")
        })?;
        ensure(center_hz - bandwidth_hz / 2.0 > 0.0, || {
            format!("lowest subcarrier {} Hz is not positive", center_hz - bandwidth_hz / 2.0)
        })?;
        Ok(Self { center_hz, bandwidth_hz, subcarriers })
    }

    pub fn narrowband(center_hz: f64) -> Result<Self> {
        Self::new(center_hz, 0.0, 1)
    }

    /// f_m = f_c - B/2 + m·B/(M-1), or just f_c when M = 1.
    pub fn frequencies(&self) -> Vec<f64> {
        let m = self.subcarriers;
        if m == 1 {
            return vec![self.center_hz];
        }
        let step = self.bandwidth_hz / (m - 1) as f64;
        let low = self.center_hz - self.bandwidth_hz / 2.0;
        (0..m).map(|i| if 2 * i + 1 == m { self.center_hz } else { low + i as f64 * step }).collect()
    }

    pub fn center_index(&self) -> Option<usize> {
        (self.subcarriers % 2 == 1).then_some(self.subcarriers / 2)
    }
}

/// One NUSW channel per subcarrier, all for the same geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct WidebandChannelSet {
    pub frequencies: Vec<f64>,
    pub channels: Vec<ChannelMatrix>,
}

pub fn wideband_channels(array: &ArrayGeometry, receiver: Point3, band: Band) -> Result<WidebandChannelSet> {
    let frequencies = band.frequencies();
    let channels =
        frequencies.par_iter().map(|&f| nusw_channel(array, receiver, Carrier::new(f)?)).collect::<Result<Vec<_>>>()?;
    Ok(WidebandChannelSet { frequencies, channels })
}

/// |aᴴb| / (‖a‖‖b‖).
pub fn normalized_correlation(a: &Array1<Complex64>, b: &Array1<Complex64>) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    inner.norm() / (norm(a) * norm(b))
}

pub fn norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
