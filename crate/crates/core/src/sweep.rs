//! Seeded Monte-Carlo NMSE-versus-SNR sweeps over the classical estimators.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{
    sample_scenario, simulate_received_signal, synthesize_channel, ChannelVector, Regime, SnrConfig,
};
use crate::dictionary::{AngularDictionary, DistanceSampling, PolarDictionary, PolarGrid};
use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::estimators::{ls_estimate, omp_estimate};
use crate::geometry::ArrayGeometry;
use crate::metrics::{nmse, to_db};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    LeastSquares,
    /// OMP over the angular dictionary.
    Omp,
    /// OMP over the polar dictionary.
    PolarOmp,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::LeastSquares, EstimatorKind::Omp, EstimatorKind::PolarOmp];

    pub fn id(&self) -> &'static str {
        match self {
            EstimatorKind::LeastSquares => "ls",
            EstimatorKind::Omp => "omp",
            EstimatorKind::PolarOmp => "pomp",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|e| e.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownEstimator(s.to_string()))
    }
}

/// Geometry and path statistics of the simulated link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub num_antennas: usize,
    pub wavelength: f64,
    pub spacing: f64,
    pub num_paths: usize,
    pub r_range: (f64, f64),
    pub regime: Regime,
    pub transmit_power: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            num_antennas: 128,
            wavelength: 0.03,
            spacing: 0.015,
            num_paths: 6,
            r_range: (5.0, 50.0),
            regime: Regime::NearField,
            transmit_power: 1.0,
        }
    }
}

impl ScenarioParams {
    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.num_antennas, self.wavelength, self.spacing)
    }

    /// Draws one (observation, channel) pair at `snr_db`.
    pub fn draw_sample<R: Rng + ?Sized>(
        &self,
        geom: &ArrayGeometry,
        snr_db: f64,
        rng: &mut R,
    ) -> Result<(ChannelVector, ChannelVector)> {
        let snr = SnrConfig::from_snr_db(self.transmit_power, snr_db)?;
        let scenario = sample_scenario(rng, self.num_paths, self.r_range, self.regime)?;
        let h = synthesize_channel(geom, &scenario)?;
        let y = simulate_received_signal(rng, &h, &snr);
        Ok((y, h))
    }
}

/// Polar dictionary layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DictionaryParams {
    pub atoms_per_angle: usize,
    pub sampling: DistanceSampling,
}

impl Default for DictionaryParams {
    fn default() -> Self {
        Self {
            atoms_per_angle: 2,
            sampling: DistanceSampling::RangeMidpoint {
                r_min: 5.0,
                r_max: 50.0,
            },
        }
    }
}

/// Dictionaries built once and shared read-only by every trial.
#[derive(Debug, Clone)]
pub struct EstimatorBank {
    angular: AngularDictionary,
    polar: PolarDictionary,
    sparsity: usize,
}

impl EstimatorBank {
    pub fn new(geom: &ArrayGeometry, dict: &DictionaryParams, sparsity: usize) -> Result<Self> {
        let grid = PolarGrid::with_sampling(geom, dict.atoms_per_angle, dict.sampling)?;
        let polar = PolarDictionary::new(geom, grid)?;
        let angular = AngularDictionary::new(geom);
        if sparsity == 0 || sparsity > angular.angles().len() {
            return Err(Error::invalid(format!(
                "sparsity must lie in 1..={}, got {sparsity}",
                angular.angles().len()
            )));
        }
        Ok(Self {
            angular,
            polar,
            sparsity,
        })
    }

    pub fn angular(&self) -> &AngularDictionary {
        &self.angular
    }

    pub fn polar(&self) -> &PolarDictionary {
        &self.polar
    }

    pub fn estimate(&self, kind: EstimatorKind, y: &ChannelVector, p: f64) -> Result<ChannelVector> {
        match kind {
            EstimatorKind::LeastSquares => ls_estimate(y, p),
            EstimatorKind::Omp => Ok(omp_estimate(y, &self.angular, self.sparsity, p)?.0),
            EstimatorKind::PolarOmp => Ok(omp_estimate(y, &self.polar, self.sparsity, p)?.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub snr_db_list: Vec<f64>,
    pub trials_per_point: usize,
    pub estimators: Vec<EstimatorKind>,
    pub master_seed: u64,
    pub scenario: ScenarioParams,
    pub dictionary: DictionaryParams,
    /// OMP iteration count; `None` uses the scenario's path count.
    pub sparsity: Option<usize>,
    /// Worker cap; 0 lets the thread pool decide.
    pub threads: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db_list: vec![0.0, 10.0, 20.0, 30.0],
            trials_per_point: 1000,
            estimators: vec![EstimatorKind::Omp, EstimatorKind::PolarOmp],
            master_seed: 0,
            scenario: ScenarioParams::default(),
            dictionary: DictionaryParams::default(),
            sparsity: None,
            threads: 0,
        }
    }
}

impl SweepConfig {
    pub fn sparsity(&self) -> usize {
        self.sparsity.unwrap_or(self.scenario.num_paths)
    }

    fn validate(&self) -> Result<()> {
        if self.snr_db_list.is_empty() {
            return Err(Error::invalid("SNR list is empty"));
        }
        if self.estimators.is_empty() {
            return Err(Error::invalid("estimator list is empty"));
        }
        if self.trials_per_point == 0 {
            return Err(Error::invalid("trials_per_point must be >= 1"));
        }
        if self.snr_db_list.len() > u32::MAX as usize || self.trials_per_point > u32::MAX as usize {
            return Err(Error::invalid("sweep too large for per-trial stream indexing"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmseRecord {
    pub estimator: EstimatorKind,
    pub snr_db: f64,
    pub trials: usize,
    pub mean_nmse: f64,
    pub mean_nmse_db: f64,
}

impl NmseRecord {
    pub fn new(estimator: EstimatorKind, snr_db: f64, trials: usize, mean_nmse: f64) -> Self {
        Self {
            estimator,
            snr_db,
            trials,
            mean_nmse,
            mean_nmse_db: to_db(mean_nmse),
        }
    }
}

/// Mean NMSE for every (SNR, estimator) pair, SNR-major.
///
/// Trial `t` at SNR index `s` draws from `substream(master_seed, s, t)` and
/// every estimator sees the same draw. Per-trial values are summed in trial
/// order, so the output does not depend on the worker count.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<NmseRecord>> {
    config.validate()?;
    let geom = config.scenario.geometry()?;
    let bank = EstimatorBank::new(&geom, &config.dictionary, config.sparsity())?;
    let p = config.scenario.transmit_power;

    let run = || -> Result<Vec<NmseRecord>> {
        let mut records = Vec::with_capacity(config.snr_db_list.len() * config.estimators.len());
        for (si, &snr_db) in config.snr_db_list.iter().enumerate() {
            let per_trial: Vec<Vec<f64>> = (0..config.trials_per_point)
                .into_par_iter()
                .map(|t| {
                    let mut rng = substream(config.master_seed, si as u32, t as u32);
                    let (y, h) = config.scenario.draw_sample(&geom, snr_db, &mut rng)?;
                    config
                        .estimators
                        .iter()
                        .map(|&kind| nmse(&h, &bank.estimate(kind, &y, p)?))
                        .collect()
                })
                .collect::<Result<_>>()?;
            for (ei, &kind) in config.estimators.iter().enumerate() {
                let total: f64 = per_trial.iter().map(|row| row[ei]).sum();
                records.push(NmseRecord::new(
                    kind,
                    snr_db,
                    config.trials_per_point,
                    total / config.trials_per_point as f64,
                ));
            }
        }
        Ok(records)
    };

    if config.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run)
    }
}

/// Mean NMSE of each estimator over stored samples, in file order.
pub fn evaluate_samples<I>(
    samples: I,
    bank: &EstimatorBank,
    estimators: &[EstimatorKind],
    transmit_power: f64,
    snr_db: f64,
) -> Result<Vec<NmseRecord>>
where
    I: IntoIterator<Item = Result<Sample>>,
{
    if estimators.is_empty() {
        return Err(Error::invalid("estimator list is empty"));
    }
    let mut totals = vec![0.0; estimators.len()];
    let mut count = 0usize;
    for sample in samples {
        let sample = sample?;
        let (y, h) = (sample.observation_f64(), sample.channel_f64());
        for (total, &kind) in totals.iter_mut().zip(estimators) {
            *total += nmse(&h, &bank.estimate(kind, &y, transmit_power)?)?;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("no samples to evaluate"));
    }
    Ok(estimators
        .iter()
        .zip(totals)
        .map(|(&kind, total)| NmseRecord::new(kind, snr_db, count, total / count as f64))
        .collect())
}

pub const CSV_HEADER: &str = "estimator,snr_db,trials,nmse,nmse_db";

/// Formats like C's `%.6g`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(records: &[NmseRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.estimator,
            format_sig6(r.snr_db),
            r.trials,
            format_sig6(r.mean_nmse),
            format_sig6(r.mean_nmse_db)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            snr_db_list: vec![0.0, 20.0],
            trials_per_point: 8,
            estimators: vec![EstimatorKind::LeastSquares, EstimatorKind::Omp, EstimatorKind::PolarOmp],
            master_seed: 3,
            scenario: ScenarioParams {
                num_antennas: 32,
                ..ScenarioParams::default()
            },
            ..SweepConfig::default()
        }
    }

    #[test]
    fn format_matches_percent_g() {
        assert_eq!(format_sig6(20.0), "20");
        assert_eq!(format_sig6(-6.831234), "-6.83123");
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e+06");
        assert_eq!(format_sig6(0.00001234), "1.234e-05");
        assert_eq!(format_sig6(0.0001234), "0.0001234");
        assert_eq!(format_sig6(999999.5), "1e+06");
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn estimator_ids() {
        assert_eq!("pomp".parse::<EstimatorKind>().unwrap(), EstimatorKind::PolarOmp);
        assert_eq!(" LS".parse::<EstimatorKind>().unwrap(), EstimatorKind::LeastSquares);
        assert!(matches!("mrdn".parse::<EstimatorKind>(), Err(Error::UnknownEstimator(_))));
    }

    #[test]
    fn row_count_and_order() {
        let recs = run_sweep(&small_config()).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(recs[0].estimator, EstimatorKind::LeastSquares);
        assert_eq!(recs[3].snr_db, 20.0);
        for r in &recs {
            assert_eq!(r.trials, 8);
            assert!(r.mean_nmse >= 0.0);
            assert_eq!(r.mean_nmse_db, 10.0 * r.mean_nmse.log10());
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let a = run_sweep(&small_config()).unwrap();
        let b = run_sweep(&small_config()).unwrap();
        let c = run_sweep(&SweepConfig {
            threads: 1,
            ..small_config()
        })
        .unwrap();
        let d = run_sweep(&SweepConfig {
            threads: 3,
            ..small_config()
        })
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
    }

    #[test]
    fn invalid_configs() {
        let mut c = small_config();
        c.snr_db_list.clear();
        assert!(run_sweep(&c).is_err());
        let mut c = small_config();
        c.trials_per_point = 0;
        assert!(run_sweep(&c).is_err());
        let mut c = small_config();
        c.estimators.clear();
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn csv_layout() {
        let recs = vec![NmseRecord::new(EstimatorKind::Omp, 20.0, 1000, 0.5)];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "estimator,snr_db,trials,nmse,nmse_db\nomp,20,1000,0.5,-3.0103\n"
        );
    }
}
