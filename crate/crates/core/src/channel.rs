//! Far- and near-field ULA channel synthesis and noisy pilot observations.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{check_angle, ArrayGeometry};
use crate::rng::complex_gaussian;

/// Complex length-N vector in the antenna domain (channel or observation).
pub type ChannelVector = DVector<Complex64>;

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub gain: Complex64,
    /// Distance from antenna 0, in meters.
    pub distance: f64,
    /// Sine of the arrival angle, in [-1, 1].
    pub spatial_angle: f64,
}

impl PathComponent {
    pub fn new(gain: Complex64, distance: f64, spatial_angle: f64) -> Result<Self> {
        let path = Self {
            gain,
            distance,
            spatial_angle,
        };
        path.validate()?;
        Ok(path)
    }

    fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::invalid(format!(
                "path distance must be > 0, got {}",
                self.distance
            )));
        }
        check_angle(self.spatial_angle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Planar wavefront.
    FarField,
    /// Exact spherical wavefront.
    NearField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScenario {
    paths: Vec<PathComponent>,
    regime: Regime,
}

impl ChannelScenario {
    pub fn new(paths: Vec<PathComponent>, regime: Regime) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::invalid("scenario needs at least one path"));
        }
        for p in &paths {
            p.validate()?;
        }
        Ok(Self { paths, regime })
    }

    pub fn paths(&self) -> &[PathComponent] {
        &self.paths
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Same geometry with every gain multiplied by `c`.
    pub fn scaled_gains(&self, c: Complex64) -> Self {
        let paths = self
            .paths
            .iter()
            .map(|p| PathComponent {
                gain: p.gain * c,
                ..*p
            })
            .collect();
        Self {
            paths,
            regime: self.regime,
        }
    }
}

/// Transmit and noise power, both linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConfig {
    transmit_power: f64,
    noise_power: f64,
}

impl SnrConfig {
    pub fn new(transmit_power: f64, noise_power: f64) -> Result<Self> {
        if !(transmit_power >= 0.0 && transmit_power.is_finite()) {
            return Err(Error::invalid(format!(
                "transmit power must be >= 0, got {transmit_power}"
            )));
        }
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return Err(Error::invalid(format!(
                "noise power must be >= 0, got {noise_power}"
            )));
        }
        Ok(Self {
            transmit_power,
            noise_power,
        })
    }

    /// Fixes the transmit power and sets σ² = p / 10^(snr_db/10).
    pub fn from_snr_db(transmit_power: f64, snr_db: f64) -> Result<Self> {
        if transmit_power.is_nan() || transmit_power <= 0.0 {
            return Err(Error::invalid("an SNR in dB needs a positive transmit power"));
        }
        if !snr_db.is_finite() {
            return Err(Error::invalid(format!("SNR must be finite, got {snr_db}")));
        }
        Self::new(transmit_power, transmit_power / 10f64.powf(snr_db / 10.0))
    }

    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn snr_db(&self) -> Result<f64> {
        if self.transmit_power == 0.0 && self.noise_power == 0.0 {
            return Err(Error::invalid("SNR undefined with zero signal and noise power"));
        }
        Ok(10.0 * (self.transmit_power / self.noise_power).log10())
    }
}

/// Planar-wave response `(1/√N)·exp(jπnθ)`, unit norm.
pub fn far_field_steering(geom: &ArrayGeometry, spatial_angle: f64) -> Result<ChannelVector> {
    check_angle(spatial_angle)?;
    Ok(far_field_steering_unchecked(geom, spatial_angle))
}

pub(crate) fn far_field_steering_unchecked(geom: &ArrayGeometry, spatial_angle: f64) -> ChannelVector {
    let n = geom.num_antennas();
    let scale = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |i, _| {
        Complex64::from_polar(scale, std::f64::consts::PI * i as f64 * spatial_angle)
    })
}

/// Spherical-wave response `(1/√N)·exp(−jk(r⁽ⁿ⁾ − r⁽⁰⁾))`, unit norm.
pub fn near_field_steering(geom: &ArrayGeometry, spatial_angle: f64, r1: f64) -> Result<ChannelVector> {
    check_angle(spatial_angle)?;
    if !(r1.is_finite() && r1 > 0.0) {
        return Err(Error::invalid(format!("source distance must be > 0, got {r1}")));
    }
    Ok(near_field_steering_unchecked(geom, spatial_angle, r1))
}

pub(crate) fn near_field_steering_unchecked(
    geom: &ArrayGeometry,
    spatial_angle: f64,
    r1: f64,
) -> ChannelVector {
    let n = geom.num_antennas();
    let k = geom.wave_number();
    let scale = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |i, _| {
        let delta = geom.element_distance_unchecked(spatial_angle, r1, i) - r1;
        Complex64::from_polar(scale, -k * delta)
    })
}

/// h = √(N/L)·Σ β_l·exp(−jk r_l)·v_l, with v_l the regime's steering vector.
pub fn synthesize_channel(geom: &ArrayGeometry, scenario: &ChannelScenario) -> Result<ChannelVector> {
    let n = geom.num_antennas();
    let k = geom.wave_number();
    let mut h = ChannelVector::zeros(n);
    for p in scenario.paths() {
        let steering = match scenario.regime() {
            Regime::FarField => far_field_steering(geom, p.spatial_angle)?,
            Regime::NearField => near_field_steering(geom, p.spatial_angle, p.distance)?,
        };
        let weight = p.gain * Complex64::from_polar(1.0, -k * p.distance);
        h.axpy(weight, &steering, Complex64::new(1.0, 0.0));
    }
    let norm = (n as f64 / scenario.num_paths() as f64).sqrt();
    h.scale_mut(norm);
    Ok(h)
}

/// Draws `num_paths` paths: β ~ CN(0,1), r ~ U[r_min, r_max], θ ~ U[−1, 1].
pub fn sample_scenario<R: Rng + ?Sized>(
    rng: &mut R,
    num_paths: usize,
    r_range: (f64, f64),
    regime: Regime,
) -> Result<ChannelScenario> {
    let (r_min, r_max) = r_range;
    if num_paths == 0 {
        return Err(Error::invalid("num_paths must be >= 1"));
    }
    if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
        return Err(Error::invalid(format!(
            "distance range must satisfy 0 < r_min <= r_max, got [{r_min}, {r_max}]"
        )));
    }
    let paths = (0..num_paths)
        .map(|_| {
            let gain = complex_gaussian(rng, 1.0);
            let distance = r_min + (r_max - r_min) * rng.random::<f64>();
            let spatial_angle = 2.0 * rng.random::<f64>() - 1.0;
            PathComponent {
                gain,
                distance,
                spatial_angle,
            }
        })
        .collect();
    ChannelScenario::new(paths, regime)
}

/// y = √p·h + n, n ~ CN(0, σ²I).
pub fn simulate_received_signal<R: Rng + ?Sized>(
    rng: &mut R,
    h: &ChannelVector,
    snr: &SnrConfig,
) -> ChannelVector {
    let amp = snr.transmit_power().sqrt();
    let var = snr.noise_power();
    h.map(|hi| {
        let signal = hi * amp;
        if var == 0.0 {
            signal
        } else {
            signal + complex_gaussian(rng, var)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_relative_eq;

    fn geom128() -> ArrayGeometry {
        ArrayGeometry::half_wavelength(128, 0.03).unwrap()
    }

    fn inner(a: &ChannelVector, b: &ChannelVector) -> Complex64 {
        a.dotc(b)
    }

    #[test]
    fn far_field_steering_examples() {
        let g = ArrayGeometry::half_wavelength(5, 0.03).unwrap();
        let a = far_field_steering(&g, 0.0).unwrap();
        for v in a.iter() {
            assert_relative_eq!(v.re, 1.0 / 5f64.sqrt(), epsilon = 1e-15);
            assert_eq!(v.im, 0.0);
        }
        let g2 = ArrayGeometry::half_wavelength(2, 0.03).unwrap();
        let a = far_field_steering(&g2, 1.0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_relative_eq!(a[0].re, s, epsilon = 1e-15);
        assert_relative_eq!(a[1].re, -s, epsilon = 1e-15);
        assert!(a[1].im.abs() < 1e-15);
        assert!(far_field_steering(&g2, 1.0 + 1e-9).is_err());
    }

    #[test]
    fn near_field_steering_examples() {
        let g1 = ArrayGeometry::half_wavelength(1, 0.03).unwrap();
        let b = near_field_steering(&g1, 0.3, 10.0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0], Complex64::new(1.0, 0.0));

        let g = geom128();
        let b = near_field_steering(&g, -0.7, 12.0).unwrap();
        assert_eq!(b[0], Complex64::new(1.0 / 128f64.sqrt(), 0.0));
        assert!(near_field_steering(&g, 0.0, 0.0).is_err());
        assert!(near_field_steering(&g, 0.0, -3.0).is_err());
    }

    #[test]
    fn near_field_matches_far_field_beyond_rayleigh_distance() {
        let g = geom128();
        let a = far_field_steering(&g, 0.4).unwrap();
        let far = near_field_steering(&g, 0.4, 1000.0 * g.rayleigh_distance()).unwrap();
        assert!(inner(&far, &a).norm() >= 0.999);
        let near = near_field_steering(&g, 0.4, 10.0).unwrap();
        assert!(inner(&near, &a).norm() < 0.9);
    }

    #[test]
    fn single_unit_path_norm() {
        let g = geom128();
        let path = PathComponent::new(Complex64::new(1.0, 0.0), 20.0, 0.25).unwrap();
        let s = ChannelScenario::new(vec![path], Regime::FarField).unwrap();
        let h = synthesize_channel(&g, &s).unwrap();
        assert_relative_eq!(h.norm(), 128f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn zero_gains_give_zero_channel() {
        let g = geom128();
        let paths = (0..3)
            .map(|i| PathComponent::new(Complex64::new(0.0, 0.0), 5.0 + i as f64, 0.1 * i as f64).unwrap())
            .collect();
        let s = ChannelScenario::new(paths, Regime::NearField).unwrap();
        assert!(synthesize_channel(&g, &s).unwrap().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn scenario_validation() {
        assert!(ChannelScenario::new(vec![], Regime::NearField).is_err());
        assert!(PathComponent::new(Complex64::new(1.0, 0.0), 0.0, 0.0).is_err());
        assert!(PathComponent::new(Complex64::new(1.0, 0.0), 1.0, -1.01).is_err());
        let mut rng = substream(1, 0, 0);
        assert!(sample_scenario(&mut rng, 0, (5.0, 50.0), Regime::NearField).is_err());
        assert!(sample_scenario(&mut rng, 2, (50.0, 5.0), Regime::NearField).is_err());
        assert!(sample_scenario(&mut rng, 2, (0.0, 5.0), Regime::NearField).is_err());
    }

    #[test]
    fn sample_scenario_is_deterministic() {
        let a = sample_scenario(&mut substream(9, 0, 3), 6, (5.0, 50.0), Regime::NearField).unwrap();
        let b = sample_scenario(&mut substream(9, 0, 3), 6, (5.0, 50.0), Regime::NearField).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_paths(), 6);
    }

    #[test]
    fn sample_scenario_moments() {
        let mut rng = substream(2024, 0, 0);
        let mut power = 0.0;
        let mut count = 0usize;
        for _ in 0..10_000 {
            let s = sample_scenario(&mut rng, 10, (5.0, 50.0), Regime::NearField).unwrap();
            for p in s.paths() {
                power += p.gain.norm_sqr();
                count += 1;
                assert!((5.0..=50.0).contains(&p.distance));
                assert!(p.spatial_angle.abs() <= 1.0);
            }
        }
        assert_relative_eq!(power / count as f64, 1.0, max_relative = 0.02);
    }

    #[test]
    fn synthesized_channel_power_is_n() {
        let g = geom128();
        let mut rng = substream(5, 0, 0);
        let draws = 10_000;
        let total: f64 = (0..draws)
            .map(|_| {
                let s = sample_scenario(&mut rng, 6, (5.0, 50.0), Regime::NearField).unwrap();
                synthesize_channel(&g, &s).unwrap().norm_squared()
            })
            .sum();
        assert_relative_eq!(total / draws as f64, 128.0, max_relative = 0.03);
    }

    #[test]
    fn received_signal_edge_cases() {
        let g = geom128();
        let mut rng = substream(3, 0, 0);
        let s = sample_scenario(&mut rng, 6, (5.0, 50.0), Regime::NearField).unwrap();
        let h = synthesize_channel(&g, &s).unwrap();

        let clean = simulate_received_signal(&mut rng, &h, &SnrConfig::new(4.0, 0.0).unwrap());
        assert_eq!(clean, h.map(|v| v * 2.0));

        let noise_a = simulate_received_signal(&mut substream(3, 1, 1), &h, &SnrConfig::new(0.0, 0.5).unwrap());
        let zero = ChannelVector::zeros(128);
        let noise_b = simulate_received_signal(&mut substream(3, 1, 1), &zero, &SnrConfig::new(1.0, 0.5).unwrap());
        assert_eq!(noise_a, noise_b);
    }

    #[test]
    fn noise_variance_matches() {
        let zero = ChannelVector::zeros(128);
        let snr = SnrConfig::new(1.0, 0.1).unwrap();
        let mut rng = substream(11, 0, 0);
        let draws = 10_000;
        let total: f64 = (0..draws)
            .map(|_| simulate_received_signal(&mut rng, &zero, &snr).norm_squared())
            .sum();
        assert_relative_eq!(total / (draws * 128) as f64, 0.1, max_relative = 0.03);
    }

    #[test]
    fn snr_config_from_db() {
        let s = SnrConfig::from_snr_db(1.0, 20.0).unwrap();
        assert_relative_eq!(s.noise_power(), 0.01, max_relative = 1e-12);
        assert_relative_eq!(s.snr_db().unwrap(), 20.0, max_relative = 1e-12);
        assert!(SnrConfig::new(0.0, 0.0).unwrap().snr_db().is_err());
        assert!(SnrConfig::new(-1.0, 0.0).is_err());
        assert!(SnrConfig::from_snr_db(0.0, 10.0).is_err());
    }
}
