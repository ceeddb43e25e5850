//! Array and aperture construction, field-region boundaries and point
//! classification.
//!
//! Conventions used across the crate: linear arrays lie on the y-axis and are
//! centred at the origin, broadside is the +x direction, and polar angles are
//! measured from the array axis, so broadside is 90°.

use std::ops::{Add, Mul, Range, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, NfError, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// A location in the array's polar frame: range from the origin and angle
/// from the array axis, in the x-y plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub distance: f64,
    pub angle: f64,
}

impl PolarPoint {
    pub fn new(distance: f64, angle: f64) -> Self {
        Self { distance, angle }
    }

    pub fn from_degrees(distance: f64, angle_deg: f64) -> Self {
        Self::new(distance, angle_deg.to_radians())
    }

    pub fn to_cartesian(self) -> Point3 {
        Point3::new(self.distance * self.angle.sin(), self.distance * self.angle.cos(), 0.0)
    }
}

/// Unit vector pointing from the origin toward polar angle `angle`.
pub fn direction(angle: f64) -> Point3 {
    Point3::new(angle.sin(), angle.cos(), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    frequency_hz: f64,
}

impl Carrier {
    pub fn new(frequency_hz: f64) -> Result<Self> {
        ensure(frequency_hz.is_finite() && frequency_hz > 0.0, || {
            format!("carrier frequency must be positive, got {frequency_hz}")
        })?;
        Ok(Self { frequency_hz })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength()
    }
}

/// A set of discrete isotropic antenna elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    elements: Vec<Point3>,
    aperture: f64,
    spacing: Option<f64>,
}

impl ArrayGeometry {
    pub fn from_positions(elements: Vec<Point3>) -> Result<Self> {
        ensure(!elements.is_empty(), || "array needs at least one element".into())?;
        ensure(elements.iter().all(|p| p.is_finite()), || "array element positions must be finite".into())?;
        let aperture = max_pairwise_distance(&elements);
        Ok(Self { elements, aperture, spacing: None })
    }

    pub fn elements(&self) -> &[Point3] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Largest distance between any two elements (m).
    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    /// Element pitch for uniform layouts.
    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    pub fn centroid(&self) -> Point3 {
        let sum = self.elements.iter().fold(Point3::ORIGIN, |acc, &p| acc + p);
        sum * (1.0 / self.elements.len() as f64)
    }

    /// Contiguous block of elements, keeping the parent's spacing.
    pub fn subarray(&self, range: Range<usize>) -> Result<Self> {
        ensure(range.start < range.end && range.end <= self.len(), || {
            format!("subarray {range:?} out of bounds for {} elements", self.len())
        })?;
        let mut sub = Self::from_positions(self.elements[range].to_vec())?;
        sub.spacing = self.spacing;
        Ok(sub)
    }

    /// Rigid translation of every element.
    pub fn translated(&self, offset: Point3) -> Self {
        Self {
            elements: self.elements.iter().map(|&p| p + offset).collect(),
            aperture: self.aperture,
            spacing: self.spacing,
        }
    }
}

fn max_pairwise_distance(points: &[Point3]) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(a.distance(b));
        }
    }
    best
}

/// Uniform linear array on the y-axis, centred at the origin.
pub fn make_uniform_linear_array(n: usize, spacing: f64) -> Result<ArrayGeometry> {
    ensure(n >= 1, || "array element count must be at least 1".into())?;
    ensure(spacing.is_finite() && spacing > 0.0, || format!("element spacing must be positive, got {spacing}"))?;
    let mid = (n as f64 - 1.0) / 2.0;
    let elements = (0..n).map(|i| Point3::new(0.0, (i as f64 - mid) * spacing, 0.0)).collect();
    let mut array = ArrayGeometry::from_positions(elements)?;
    array.spacing = Some(spacing);
    Ok(array)
}

/// Half-wavelength ULA at the given carrier.
pub fn half_wavelength_ula(n: usize, carrier: Carrier) -> Result<ArrayGeometry> {
    make_uniform_linear_array(n, carrier.wavelength() / 2.0)
}

/// Uniform planar array in the y-z plane, centred at the origin. Elements are
/// stored row-major (z outer, y inner).
pub fn make_uniform_planar_array(rows: usize, cols: usize, spacing: f64) -> Result<ArrayGeometry> {
    ensure(rows >= 1 && cols >= 1, || "planar array needs at least one row and column".into())?;
    ensure(spacing.is_finite() && spacing > 0.0, || format!("element spacing must be positive, got {spacing}"))?;
    let mid_r = (rows as f64 - 1.0) / 2.0;
    let mid_c = (cols as f64 - 1.0) / 2.0;
    let mut elements = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            elements.push(Point3::new(0.0, (c as f64 - mid_c) * spacing, (r as f64 - mid_r) * spacing));
        }
    }
    let mut array = ArrayGeometry::from_positions(elements)?;
    array.spacing = Some(spacing);
    Ok(array)
}

/// A flat rectangular radiating surface parallel to the y-z plane, sampled by a
/// regular grid of patches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureSurface {
    pub origin: Point3,
    pub extent_y: f64,
    pub extent_z: f64,
    pub patches_y: usize,
    pub patches_z: usize,
}

/// Depth assigned to planar surfaces when they are booked as volumes.
pub const UNIT_DEPTH: f64 = 1.0;

impl ApertureSurface {
    /// `origin` is the centre of the surface.
    pub fn new(origin: Point3, extent_y: f64, extent_z: f64, patches_y: usize, patches_z: usize) -> Result<Self> {
        ensure(origin.is_finite(), || "aperture origin must be finite".into())?;
        ensure(extent_y > 0.0 && extent_z > 0.0 && extent_y.is_finite() && extent_z.is_finite(), || {
            format!("aperture extents must be positive, got {extent_y} x {extent_z}")
        })?;
        ensure(patches_y >= 1 && patches_z >= 1, || "aperture needs at least one patch per side".into())?;
        Ok(Self { origin, extent_y, extent_z, patches_y, patches_z })
    }

    /// Square surface with `patches` patches per side.
    pub fn square(origin: Point3, side: f64, patches: usize) -> Result<Self> {
        Self::new(origin, side, side, patches, patches)
    }

    pub fn patch_count(&self) -> usize {
        self.patches_y * self.patches_z
    }

    pub fn patch_area(&self) -> f64 {
        (self.extent_y / self.patches_y as f64) * (self.extent_z / self.patches_z as f64)
    }

    pub fn area(&self) -> f64 {
        self.extent_y * self.extent_z
    }

    /// Volume bookkeeping: area times [`UNIT_DEPTH`].
    pub fn volume(&self) -> f64 {
        self.area() * UNIT_DEPTH
    }

    /// Width along the propagation axis used by the continuous DoF law.
    pub fn depth(&self) -> f64 {
        UNIT_DEPTH
    }

    /// Patch centres, row-major (z outer, y inner).
    pub fn patch_centers(&self) -> Vec<Point3> {
        let dy = self.extent_y / self.patches_y as f64;
        let dz = self.extent_z / self.patches_z as f64;
        let mut out = Vec::with_capacity(self.patch_count());
        for iz in 0..self.patches_z {
            for iy in 0..self.patches_y {
                out.push(Point3::new(
                    self.origin.x,
                    self.origin.y - self.extent_y / 2.0 + (iy as f64 + 0.5) * dy,
                    self.origin.z - self.extent_z / 2.0 + (iz as f64 + 0.5) * dz,
                ));
            }
        }
        out
    }

    /// True when both surfaces lie in the same plane and their rectangles
    /// intersect with positive area.
    pub fn overlaps(&self, other: &ApertureSurface) -> bool {
        if self.origin.x != other.origin.x {
            return false;
        }
        let gap_y = (self.origin.y - other.origin.y).abs() * 2.0;
        let gap_z = (self.origin.z - other.origin.z).abs() * 2.0;
        gap_y < self.extent_y + other.extent_y && gap_z < self.extent_z + other.extent_z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldRegion {
    ReactiveNear,
    RadiatingNear,
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRegionReport {
    pub fresnel_boundary_m: f64,
    pub rayleigh_distance_m: f64,
    pub region: FieldRegion,
}

fn check_boundary_args(aperture_d: f64, wavelength: f64) -> Result<()> {
    ensure(wavelength.is_finite() && wavelength > 0.0, || format!("wavelength must be positive, got {wavelength}"))?;
    ensure(aperture_d.is_finite() && aperture_d >= 0.0, || format!("aperture must be nonnegative, got {aperture_d}"))
}

/// Near/far boundary 2D²/λ.
pub fn rayleigh_distance(aperture_d: f64, wavelength: f64) -> Result<f64> {
    check_boundary_args(aperture_d, wavelength)?;
    Ok(2.0 * aperture_d * aperture_d / wavelength)
}

/// Start of the radiating near field, 0.62·√(D³/λ).
pub fn fresnel_boundary(aperture_d: f64, wavelength: f64) -> Result<f64> {
    check_boundary_args(aperture_d, wavelength)?;
    Ok(0.62 * (aperture_d.powi(3) / wavelength).sqrt())
}

/// Aperture whose Rayleigh distance equals `distance`: √(dλ/2).
pub fn aperture_for_rayleigh(distance: f64, wavelength: f64) -> Result<f64> {
    ensure(distance > 0.0 && wavelength > 0.0, || {
        format!("distance and wavelength must be positive, got {distance}, {wavelength}")
    })?;
    Ok((distance * wavelength / 2.0).sqrt())
}

/// Region of `point` relative to the array centroid.
pub fn classify_point(array: &ArrayGeometry, point: Point3, carrier: Carrier) -> Result<FieldRegionReport> {
    ensure(point.is_finite(), || "observation point must be finite".into())?;
    let lambda = carrier.wavelength();
    let fresnel = fresnel_boundary(array.aperture(), lambda)?;
    let rayleigh = rayleigh_distance(array.aperture(), lambda)?;
    let r = point.distance(array.centroid());
    Ok(FieldRegionReport {
        fresnel_boundary_m: fresnel,
        rayleigh_distance_m: rayleigh,
        region: region_at(r, fresnel, rayleigh),
    })
}

fn region_at(r: f64, fresnel: f64, rayleigh: f64) -> FieldRegion {
    if r >= fresnel.max(rayleigh) {
        FieldRegion::Far
    } else if r < fresnel {
        FieldRegion::ReactiveNear
    } else {
        FieldRegion::RadiatingNear
    }
}

/// Split `range` into `parts` contiguous blocks whose sizes differ by at most
/// one, larger blocks first.
pub fn split_even(range: Range<usize>, parts: usize) -> Vec<Range<usize>> {
    let len = range.end - range.start;
    let parts = parts.max(1).min(len.max(1));
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = range.start;
    for i in 0..parts {
        let size = base + usize::from(i < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}

pub(crate) fn require_distinct(d: f64, what: impl FnOnce() -> String) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(NfError::SingularGeometry(what()))
    }
}
