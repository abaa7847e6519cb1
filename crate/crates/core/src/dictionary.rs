//! Sparsifying dictionaries: the unitary angular (DFT) matrix and the
//! overcomplete polar-domain matrix of near-field steering vectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::{far_field_steering_unchecked, near_field_steering_unchecked, ChannelVector};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// A dictionary whose columns (atoms) are unit-norm array responses.
pub trait Dictionary {
    fn matrix(&self) -> &DMatrix<Complex64>;

    fn num_antennas(&self) -> usize {
        self.matrix().nrows()
    }

    fn num_atoms(&self) -> usize {
        self.matrix().ncols()
    }
}

/// Angle grid θ_n = (2n − N + 1)/N shared by both dictionaries.
pub fn angle_grid(num_antennas: usize) -> Vec<f64> {
    let n = num_antennas as f64;
    (0..num_antennas)
        .map(|i| (2.0 * i as f64 - n + 1.0) / n)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngularDictionary {
    matrix: DMatrix<Complex64>,
    angles: Vec<f64>,
}

impl AngularDictionary {
    pub fn new(geom: &ArrayGeometry) -> Self {
        let angles = angle_grid(geom.num_antennas());
        let columns: Vec<_> = angles
            .iter()
            .map(|&theta| far_field_steering_unchecked(geom, theta))
            .collect();
        Self {
            matrix: DMatrix::from_columns(&columns),
            angles,
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

impl Dictionary for AngularDictionary {
    fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// How the per-angle distance samples of a polar grid are placed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceSampling {
    /// Uniform in 1/r from 0 (far-field atom) down to 1/r_min.
    InverseUniform { r_min: f64 },
    /// Centers of equal-width distance cells covering [r_min, r_max]; no
    /// far-field atom.
    RangeMidpoint { r_min: f64, r_max: f64 },
}

impl DistanceSampling {
    /// Distances for one angle, strictly decreasing.
    pub fn distances(&self, atoms_per_angle: usize) -> Result<Vec<f64>> {
        if atoms_per_angle == 0 {
            return Err(Error::invalid("atoms_per_angle must be >= 1"));
        }
        match *self {
            DistanceSampling::InverseUniform { r_min } => {
                if !(r_min.is_finite() && r_min > 0.0) {
                    return Err(Error::invalid(format!("r_min must be > 0, got {r_min}")));
                }
                let last = (atoms_per_angle - 1) as f64;
                Ok((0..atoms_per_angle)
                    .map(|q| {
                        if q == 0 {
                            f64::INFINITY
                        } else {
                            r_min * last / q as f64
                        }
                    })
                    .collect())
            }
            DistanceSampling::RangeMidpoint { r_min, r_max } => {
                if !(r_min.is_finite() && r_min > 0.0) {
                    return Err(Error::invalid(format!("r_min must be > 0, got {r_min}")));
                }
                if !(r_max.is_finite() && r_max >= r_min) || (atoms_per_angle > 1 && r_max == r_min) {
                    return Err(Error::invalid(format!(
                        "r_max must exceed r_min, got [{r_min}, {r_max}]"
                    )));
                }
                let width = (r_max - r_min) / atoms_per_angle as f64;
                Ok((0..atoms_per_angle)
                    .rev()
                    .map(|j| r_min + (j as f64 + 0.5) * width)
                    .collect())
            }
        }
    }
}

/// Sampled (angle, distance) pairs of a polar dictionary. `f64::INFINITY`
/// marks a far-field sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    angles: Vec<f64>,
    distances_per_angle: Vec<Vec<f64>>,
}

impl PolarGrid {
    pub fn new(angles: Vec<f64>, distances_per_angle: Vec<Vec<f64>>) -> Result<Self> {
        if angles.len() != distances_per_angle.len() {
            return Err(Error::DimensionMismatch {
                expected: angles.len(),
                actual: distances_per_angle.len(),
            });
        }
        for (&theta, dists) in angles.iter().zip(&distances_per_angle) {
            crate::geometry::check_angle(theta)?;
            if dists.is_empty() {
                return Err(Error::invalid("every angle needs at least one distance sample"));
            }
            if dists.iter().any(|&r| r.is_nan() || r <= 0.0) {
                return Err(Error::invalid("distance samples must be > 0"));
            }
            if dists.windows(2).any(|w| w[0].is_nan() || w[0] <= w[1]) {
                return Err(Error::invalid("distance samples must be strictly decreasing"));
            }
        }
        Ok(Self {
            angles,
            distances_per_angle,
        })
    }

    /// The same distance list at every angle of the geometry's angle grid.
    pub fn with_sampling(
        geom: &ArrayGeometry,
        atoms_per_angle: usize,
        sampling: DistanceSampling,
    ) -> Result<Self> {
        let dists = sampling.distances(atoms_per_angle)?;
        let angles = angle_grid(geom.num_antennas());
        let distances_per_angle = vec![dists; angles.len()];
        Self::new(angles, distances_per_angle)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn distances_per_angle(&self) -> &[Vec<f64>] {
        &self.distances_per_angle
    }

    pub fn total_atoms(&self) -> usize {
        self.distances_per_angle.iter().map(Vec::len).sum()
    }

    /// (angle, distance) of every atom in dictionary column order.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.angles
            .iter()
            .zip(&self.distances_per_angle)
            .flat_map(|(&theta, dists)| dists.iter().map(move |&r| (theta, r)))
    }

    /// Column index of sample `q` at angle `n`.
    pub fn atom_index(&self, n: usize, q: usize) -> Option<usize> {
        let dists = self.distances_per_angle.get(n)?;
        (q < dists.len())
            .then(|| self.distances_per_angle[..n].iter().map(Vec::len).sum::<usize>() + q)
    }
}

/// Polar grid with uniform inverse-distance sampling (far-field atom first,
/// `r_min` last) at each of the N grid angles.
pub fn build_polar_grid(geom: &ArrayGeometry, atoms_per_angle: usize, r_min: f64) -> Result<PolarGrid> {
    PolarGrid::with_sampling(geom, atoms_per_angle, DistanceSampling::InverseUniform { r_min })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarDictionary {
    matrix: DMatrix<Complex64>,
    grid: PolarGrid,
}

impl PolarDictionary {
    /// Columns ordered angle-major, distance-descending.
    pub fn new(geom: &ArrayGeometry, grid: PolarGrid) -> Result<Self> {
        if grid.angles().len() != geom.num_antennas() {
            return Err(Error::DimensionMismatch {
                expected: geom.num_antennas(),
                actual: grid.angles().len(),
            });
        }
        let columns: Vec<_> = grid
            .atoms()
            .map(|(theta, r)| {
                if r.is_infinite() {
                    far_field_steering_unchecked(geom, theta)
                } else {
                    near_field_steering_unchecked(geom, theta, r)
                }
            })
            .collect();
        Ok(Self {
            matrix: DMatrix::from_columns(&columns),
            grid,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }
}

impl Dictionary for PolarDictionary {
    fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Antenna domain to coefficient domain via the adjoint.
    Analysis,
    /// Coefficient domain to antenna domain.
    Synthesis,
}

/// Applies `dict` (Synthesis) or its conjugate transpose (Analysis).
///
/// Analysis is the exact inverse only for the unitary angular dictionary; for
/// the polar dictionary it is the matched-filter projection.
pub fn transform<D: Dictionary + ?Sized>(
    x: &DVector<Complex64>,
    dict: &D,
    direction: Direction,
) -> Result<ChannelVector> {
    let m = dict.matrix();
    let expected = match direction {
        Direction::Analysis => m.nrows(),
        Direction::Synthesis => m.ncols(),
    };
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(match direction {
        Direction::Analysis => m.ad_mul(x),
        Direction::Synthesis => m * x,
    })
}

/// Largest |⟨a_i, a_j⟩| over distinct columns.
pub fn mutual_coherence<D: Dictionary + ?Sized>(dict: &D) -> f64 {
    let m = dict.matrix();
    if m.ncols() < 2 {
        return 0.0;
    }
    let gram = m.ad_mul(m);
    let mut best = 0.0f64;
    for j in 0..gram.ncols() {
        for i in 0..j {
            best = best.max(gram[(i, j)].norm());
        }
    }
    best.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{far_field_steering, near_field_steering};
    use crate::rng::{complex_gaussian, substream};

    fn geom(n: usize) -> ArrayGeometry {
        ArrayGeometry::half_wavelength(n, 0.03).unwrap()
    }

    fn max_unitarity_error(m: &DMatrix<Complex64>) -> f64 {
        let g = m.ad_mul(m);
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn angle_grid_n2() {
        assert_eq!(angle_grid(2), vec![-0.5, 0.5]);
        assert_eq!(AngularDictionary::new(&geom(2)).angles(), &[-0.5, 0.5]);
    }

    #[test]
    fn angular_dictionary_is_unitary() {
        for n in [1, 2, 7, 64, 128, 512] {
            let f = AngularDictionary::new(&geom(n));
            assert!(max_unitarity_error(f.matrix()) <= 1e-10, "N = {n}");
        }
    }

    #[test]
    fn angular_columns_unit_norm_and_coherence_zero() {
        let f = AngularDictionary::new(&geom(128));
        for c in f.matrix().column_iter() {
            assert!((c.norm() - 1.0).abs() <= 1e-12);
        }
        assert!(mutual_coherence(&f) <= 1e-10);
    }

    #[test]
    fn inverse_uniform_grid_examples() {
        let g = geom(128);
        let grid = build_polar_grid(&g, 2, 5.0).unwrap();
        assert_eq!(grid.total_atoms(), 256);
        for d in grid.distances_per_angle() {
            assert_eq!(d, &vec![f64::INFINITY, 5.0]);
        }
        let grid = build_polar_grid(&g, 4, 5.0).unwrap();
        assert_eq!(grid.distances_per_angle()[17], vec![f64::INFINITY, 15.0, 7.5, 5.0]);
        assert!(build_polar_grid(&g, 2, 0.0).is_err());
        assert!(build_polar_grid(&g, 0, 5.0).is_err());
    }

    #[test]
    fn single_atom_grid_reduces_to_angular() {
        let g = geom(32);
        let d = PolarDictionary::new(&g, build_polar_grid(&g, 1, 5.0).unwrap()).unwrap();
        let f = AngularDictionary::new(&g);
        assert_eq!(d.matrix(), f.matrix());
    }

    #[test]
    fn range_midpoint_grid() {
        let s = DistanceSampling::RangeMidpoint {
            r_min: 5.0,
            r_max: 50.0,
        };
        assert_eq!(s.distances(2).unwrap(), vec![38.75, 16.25]);
        assert_eq!(s.distances(1).unwrap(), vec![27.5]);
        let bad = DistanceSampling::RangeMidpoint {
            r_min: 5.0,
            r_max: 5.0,
        };
        assert!(bad.distances(2).is_err());
        assert_eq!(bad.distances(1).unwrap(), vec![5.0]);
    }

    #[test]
    fn polar_grid_validation() {
        assert!(PolarGrid::new(vec![0.0], vec![vec![]]).is_err());
        assert!(PolarGrid::new(vec![0.0], vec![vec![5.0, 10.0]]).is_err());
        assert!(PolarGrid::new(vec![0.0], vec![vec![5.0, 5.0]]).is_err());
        assert!(PolarGrid::new(vec![0.0], vec![vec![-1.0]]).is_err());
        assert!(PolarGrid::new(vec![2.0], vec![vec![1.0]]).is_err());
        assert!(PolarGrid::new(vec![0.0, 0.5], vec![vec![1.0]]).is_err());
        let grid = PolarGrid::new(vec![0.0, 0.5], vec![vec![f64::INFINITY, 3.0], vec![4.0]]).unwrap();
        assert_eq!(grid.total_atoms(), 3);
        assert_eq!(grid.atom_index(1, 0), Some(2));
        assert_eq!(grid.atom_index(1, 1), None);
    }

    #[test]
    fn polar_dictionary_shape_and_atoms() {
        let g = geom(128);
        let grid = build_polar_grid(&g, 2, 5.0).unwrap();
        let d = PolarDictionary::new(&g, grid).unwrap();
        assert_eq!(d.matrix().shape(), (128, 256));
        let f = AngularDictionary::new(&g);
        for (col, (theta, r)) in d.grid().atoms().enumerate() {
            let c = d.matrix().column(col);
            assert!((c.norm() - 1.0).abs() <= 1e-12);
            if r.is_infinite() {
                let n = col / 2;
                assert_eq!(c, f.matrix().column(n));
                assert_eq!(c.clone_owned(), far_field_steering(&g, theta).unwrap());
            } else {
                assert_eq!(c.clone_owned(), near_field_steering(&g, theta, r).unwrap());
            }
        }
        let c = mutual_coherence(&d);
        assert!(c > 0.0 && c < 1.0, "coherence {c}");
    }

    #[test]
    fn polar_dictionary_rejects_mismatched_grid() {
        let grid = build_polar_grid(&geom(16), 2, 5.0).unwrap();
        assert!(PolarDictionary::new(&geom(32), grid).is_err());
    }

    #[test]
    fn dictionary_build_is_deterministic() {
        let g = geom(64);
        let a = PolarDictionary::new(&g, build_polar_grid(&g, 3, 5.0).unwrap()).unwrap();
        let b = PolarDictionary::new(&g, build_polar_grid(&g, 3, 5.0).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn transforms() {
        let g = geom(128);
        let f = AngularDictionary::new(&g);
        let mut rng = substream(1, 0, 0);
        for _ in 0..100 {
            let x = DVector::from_fn(128, |_, _| complex_gaussian(&mut rng, 1.0));
            let a = transform(&x, &f, Direction::Analysis).unwrap();
            let back = transform(&a, &f, Direction::Synthesis).unwrap();
            assert!((back - &x).norm() / x.norm() <= 1e-10);
        }

        let grid = build_polar_grid(&g, 2, 5.0).unwrap();
        let d = PolarDictionary::new(&g, grid).unwrap();
        let mut one_hot = DVector::zeros(256);
        one_hot[77] = Complex64::new(1.0, 0.0);
        let col = transform(&one_hot, &d, Direction::Synthesis).unwrap();
        assert_eq!(col, d.matrix().column(77).clone_owned());

        let y = DVector::from_fn(128, |_, _| complex_gaussian(&mut rng, 1.0));
        assert_eq!(transform(&y, &d, Direction::Analysis).unwrap().len(), 256);
        assert!(transform(&y, &d, Direction::Synthesis).is_err());
        assert!(transform(&one_hot, &d, Direction::Analysis).is_err());
    }

    #[test]
    fn matched_filter_peaks_at_true_atoms() {
        let g = geom(128);
        let grid = build_polar_grid(&g, 4, 5.0).unwrap();
        let d = PolarDictionary::new(&g, grid).unwrap();
        let mut rng = substream(42, 0, 0);
        // Angle indices far apart relative to the beam width.
        let support = [(10usize, 3usize), (45, 1), (80, 2), (115, 0)];
        let mut hp = DVector::zeros(d.num_atoms());
        for &(n, q) in &support {
            let g = complex_gaussian(&mut rng, 1.0);
            hp[d.grid().atom_index(n, q).unwrap()] = Complex64::from_polar(1.0, g.arg());
        }
        let h = transform(&hp, &d, Direction::Synthesis).unwrap();
        let proj = transform(&h, &d, Direction::Analysis).unwrap();
        for &(n, q) in &support {
            let block: Vec<f64> = (0..4)
                .map(|j| proj[d.grid().atom_index(n, j).unwrap()].norm())
                .collect();
            let best = block
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            assert_eq!(best, q, "angle {n}: {block:?}");
        }
    }
}
