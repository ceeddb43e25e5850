//! Polar (angle, distance) sampling grids and their CSV form.

use std::io::Write;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::geometry::PolarPoint;

/// Sample positions of a polar grid. Both axes are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarAxes {
    /// radians
    pub angles: Vec<f64>,
    /// meters
    pub distances: Vec<f64>,
}

impl PolarAxes {
    pub fn new(angles: Vec<f64>, distances: Vec<f64>) -> Result<Self> {
        ensure(!angles.is_empty() && !distances.is_empty(), || "polar grid axes must be nonempty".into())?;
        ensure(angles.windows(2).all(|w| w[1] > w[0]), || "angles must be strictly ascending".into())?;
        ensure(distances.windows(2).all(|w| w[1] > w[0]), || "distances must be strictly ascending".into())?;
        ensure(distances[0] > 0.0, || "distances must be positive".into())?;
        Ok(Self { angles, distances })
    }

    /// Evenly spaced values `start + i·step`, i in 0..count.
    pub fn linear(start: f64, step: f64, count: usize) -> Vec<f64> {
        (0..count).map(|i| start + i as f64 * step).collect()
    }

    /// `start·2^(i/per_octave)`, i in 0..count. Every `per_octave`-th sample is
    /// an exact power-of-two multiple of `start`.
    pub fn geometric(start: f64, per_octave: usize, count: usize) -> Vec<f64> {
        (0..count).map(|i| start * 2f64.powf(i as f64 / per_octave as f64)).collect()
    }

    pub fn degrees(angles_deg: &[f64]) -> Vec<f64> {
        angles_deg.iter().map(|a| a.to_radians()).collect()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.distances.len(), self.angles.len())
    }

    pub fn point(&self, row: usize, col: usize) -> PolarPoint {
        PolarPoint::new(self.distances[row], self.angles[col])
    }

    /// Grid cell closest to `p` along each axis independently.
    pub fn nearest_cell(&self, p: PolarPoint) -> (usize, usize) {
        (nearest(&self.distances, p.distance), nearest(&self.angles, p.angle))
    }

    /// Evaluates `f` on every cell in parallel. Each cell is computed
    /// independently, so the result does not depend on the thread count.
    pub fn evaluate<F>(&self, f: F) -> Result<PolarGrid>
    where
        F: Fn(PolarPoint) -> Result<f64> + Sync,
    {
        let (rows, cols) = self.shape();
        let values =
            (0..rows * cols).into_par_iter().map(|i| f(self.point(i / cols, i % cols))).collect::<Result<Vec<_>>>()?;
        Ok(PolarGrid { axes: self.clone(), values: Array2::from_shape_vec((rows, cols), values).expect("grid shape") })
    }
}

fn nearest(axis: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, &v) in axis.iter().enumerate() {
        if (v - x).abs() < (axis[best] - x).abs() {
            best = i;
        }
    }
    best
}

/// Real values sampled on a polar grid; rows follow distance, columns angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub axes: PolarAxes,
    pub values: Array2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueScale {
    Linear,
    Decibel,
}

impl PolarGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[(row, col)]
    }

    /// Cell of the largest value; ties resolve to the first in row-major order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for ((r, c), &v) in self.values.indexed_iter() {
            if v > self.values[best] {
                best = (r, c);
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax()]
    }

    /// Column of values at angle index `col`, ordered by distance.
    pub fn distance_profile(&self, col: usize) -> Vec<f64> {
        self.values.column(col).to_vec()
    }

    /// CSV `angle_deg,distance_m,value` (or `value_db`), angle-major.
    pub fn write_csv<W: Write>(&self, out: W, scale: ValueScale) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let header = match scale {
            ValueScale::Linear => "value",
            ValueScale::Decibel => "value_db",
        };
        w.write_record(["angle_deg", "distance_m", header])?;
        for (c, angle) in self.axes.angles.iter().enumerate() {
            for (r, dist) in self.axes.distances.iter().enumerate() {
                let v = self.values[(r, c)];
                let v = match scale {
                    ValueScale::Linear => v,
                    ValueScale::Decibel => 10.0 * v.log10(),
                };
                w.write_record([angle.to_degrees().to_string(), dist.to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
