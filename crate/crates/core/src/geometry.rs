//! Uniform linear array geometry.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A uniform linear array of `num_antennas` elements along one axis.
///
/// Antenna `n` (0-based) sits at offset `n * spacing` from antenna 0, which is
/// the phase and distance reference for every steering vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_antennas: usize,
    wavelength: f64,
    spacing: f64,
}

impl ArrayGeometry {
    pub fn new(num_antennas: usize, wavelength: f64, spacing: f64) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::invalid("array needs at least one antenna"));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid(format!("spacing must be > 0, got {spacing}")));
        }
        Ok(Self {
            num_antennas,
            wavelength,
            spacing,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(num_antennas: usize, wavelength: f64) -> Result<Self> {
        Self::new(num_antennas, wavelength, wavelength / 2.0)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// k = 2π/λ in rad/m.
    pub fn wave_number(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// D = (N − 1)·Δ in meters.
    pub fn aperture(&self) -> f64 {
        (self.num_antennas - 1) as f64 * self.spacing
    }

    /// Boundary between the near- and far-field regimes, 2D²/λ.
    pub fn rayleigh_distance(&self) -> f64 {
        let d = self.aperture();
        2.0 * d * d / self.wavelength
    }

    /// Euclidean distance from antenna `n` to a source at distance `r1` from
    /// antenna 0 and spatial angle `spatial_angle` (sine of the physical angle).
    pub fn element_distance(&self, spatial_angle: f64, r1: f64, n: usize) -> Result<f64> {
        check_angle(spatial_angle)?;
        if r1.is_nan() || r1 <= 0.0 {
            return Err(Error::invalid(format!("source distance must be > 0, got {r1}")));
        }
        if n >= self.num_antennas {
            return Err(Error::invalid(format!(
                "antenna index {n} out of range for {} antennas",
                self.num_antennas
            )));
        }
        Ok(self.element_distance_unchecked(spatial_angle, r1, n))
    }

    pub(crate) fn element_distance_unchecked(&self, spatial_angle: f64, r1: f64, n: usize) -> f64 {
        if n == 0 {
            return r1;
        }
        let offset = n as f64 * self.spacing;
        let disc = r1 * r1 + offset * offset - 2.0 * r1 * spatial_angle * offset;
        // (r1 - offset)^2 <= disc for |θ| <= 1; only rounding can push it below zero.
        debug_assert!(disc > -1e-9 * r1 * r1, "negative discriminant {disc}");
        disc.max(0.0).sqrt()
    }
}

pub(crate) fn check_angle(spatial_angle: f64) -> Result<()> {
    if spatial_angle.is_finite() && spatial_angle.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "spatial angle must lie in [-1, 1], got {spatial_angle}"
        )))
    }
}
