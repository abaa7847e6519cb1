use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use xlce::complexity::{theoretical_complexity, ComplexityParams, Scheme};
use xlce::dataset::{generate_dataset, read_dataset, DatasetConfig};
use xlce::dictionary::mutual_coherence;
use xlce::sweep::{
    evaluate_samples, format_sig6, run_sweep, write_csv, DictionaryParams, EstimatorBank, EstimatorKind,
    ScenarioParams, SweepConfig,
};
use xlce::{ArrayGeometry, DistanceSampling, PolarDictionary, PolarGrid, Regime};

use crate::snr::parse_snr_list;

pub const THREADS_ENV: &str = "XLCE_THREADS";

#[derive(Debug)]
pub enum CliError {
    Core(xlce::Error),
    Io(io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => write!(f, "I/O failure: {e}"),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<xlce::Error> for CliError {
    fn from(e: xlce::Error) -> Self {
        match e {
            xlce::Error::Io(io) => CliError::Io(io),
            other => CliError::Core(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Near-field XL-MIMO channel simulation and sparse channel estimation.
#[derive(Debug, Parser)]
#[command(name = "xlce", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a binary dataset of (observation, channel) pairs at one SNR.
    GenDataset(GenDatasetArgs),
    /// Monte-Carlo NMSE-versus-SNR sweep, written as CSV.
    Sweep(SweepArgs),
    /// Run estimators over a dataset file and print mean NMSE as CSV.
    Estimate(EstimateArgs),
    /// Print the polar sampling grid and its mutual coherence.
    GridInfo(GridInfoArgs),
    /// Print closed-form running-phase operation counts for every scheme.
    Complexity(ComplexityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Near,
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    /// Equal-width distance cells over [r-min, r-max], cell centers.
    Midpoint,
    /// Uniform in 1/r from the far-field atom down to r-min.
    Inverse,
}

#[derive(Debug, Args)]
pub struct ArrayArgs {
    /// Number of BS antennas N.
    #[arg(long = "n", default_value_t = 128)]
    pub num_antennas: usize,
    /// Carrier wavelength in meters.
    #[arg(long, default_value_t = 0.03)]
    pub wavelength: f64,
    /// Antenna spacing in meters [default: wavelength/2].
    #[arg(long)]
    pub spacing: Option<f64>,
}

impl ArrayArgs {
    fn spacing(&self) -> f64 {
        self.spacing.unwrap_or(self.wavelength / 2.0)
    }

    fn geometry(&self) -> CliResult<ArrayGeometry> {
        Ok(ArrayGeometry::new(self.num_antennas, self.wavelength, self.spacing())?)
    }
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Smallest path distance in meters (scenario and polar grid).
    #[arg(long, default_value_t = 5.0)]
    pub r_min: f64,
    /// Largest path distance in meters (scenario and midpoint grid).
    #[arg(long, default_value_t = 50.0)]
    pub r_max: f64,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    /// Number of propagation paths L.
    #[arg(long, default_value_t = 6)]
    pub paths: usize,
    /// Linear transmit power p.
    #[arg(long = "p", default_value_t = 1.0)]
    pub power: f64,
    /// Wavefront model of the simulated channel.
    #[arg(long, value_enum, default_value_t = RegimeArg::Near)]
    pub regime: RegimeArg,
}

impl ScenarioArgs {
    fn params(&self, range: &RangeArgs) -> ScenarioParams {
        ScenarioParams {
            num_antennas: self.array.num_antennas,
            wavelength: self.array.wavelength,
            spacing: self.array.spacing(),
            num_paths: self.paths,
            r_range: (range.r_min, range.r_max),
            regime: match self.regime {
                RegimeArg::Near => Regime::NearField,
                RegimeArg::Far => Regime::FarField,
            },
            transmit_power: self.power,
        }
    }
}

#[derive(Debug, Args)]
pub struct DictArgs {
    /// Distance samples per grid angle (Q = N x atoms-per-angle).
    #[arg(long, default_value_t = 2)]
    pub atoms_per_angle: usize,
    /// Distance sampling rule of the polar grid.
    #[arg(long, value_enum, default_value_t = GridArg::Midpoint)]
    pub grid: GridArg,
}

impl DictArgs {
    fn params(&self, range: &RangeArgs) -> DictionaryParams {
        let sampling = match self.grid {
            GridArg::Midpoint => DistanceSampling::RangeMidpoint {
                r_min: range.r_min,
                r_max: range.r_max,
            },
            GridArg::Inverse => DistanceSampling::InverseUniform { r_min: range.r_min },
        };
        DictionaryParams {
            atoms_per_angle: self.atoms_per_angle,
            sampling,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenDatasetArgs {
    /// Number of samples to write.
    #[arg(long)]
    pub samples: u64,
    /// SNR in dB shared by every sample.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub range: RangeArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated estimators (ls, omp, pomp).
    #[arg(long, default_value = "omp,pomp")]
    pub estimators: String,
    /// SNR points in dB: comma-separated values and/or start:step:stop ranges.
    #[arg(long, default_value = "0,10,20,30", allow_hyphen_values = true)]
    pub snr_db: String,
    /// Trials per SNR point.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// OMP iterations [default: number of paths].
    #[arg(long)]
    pub sparsity: Option<usize>,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub dict: DictArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Comma-separated estimators (ls, omp, pomp).
    #[arg(long, default_value = "pomp")]
    pub estimator: String,
    /// Dataset file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// OMP iterations [default: number of paths in the dataset header].
    #[arg(long)]
    pub sparsity: Option<usize>,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub dict: DictArgs,
}

#[derive(Debug, Args)]
pub struct GridInfoArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub dict: DictArgs,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// Antennas N.
    #[arg(long, default_value_t = 128)]
    pub n: u64,
    /// Polar atoms Q.
    #[arg(long, default_value_t = 256)]
    pub q: u64,
    /// Paths L.
    #[arg(long, default_value_t = 6)]
    pub l: u64,
    /// RDN blocks B.
    #[arg(long, default_value_t = 8)]
    pub b: u64,
    /// Layers per RDN M.
    #[arg(long, default_value_t = 6)]
    pub m: u64,
    /// Kernel extent K.
    #[arg(long, default_value_t = 3)]
    pub k: u64,
    /// Feature channels E.
    #[arg(long, default_value_t = 64)]
    pub e: u64,
}

pub fn run(cli: Cli) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::GenDataset(a) => gen_dataset(a, &mut out),
        Command::Sweep(a) => sweep(a, &mut out),
        Command::Estimate(a) => estimate(a, &mut out),
        Command::GridInfo(a) => grid_info(a, &mut out),
        Command::Complexity(a) => complexity(a, &mut out),
    }
}

fn parse_estimators(s: &str) -> CliResult<Vec<EstimatorKind>> {
    s.split(',')
        .map(|id| id.parse::<EstimatorKind>().map_err(CliError::from))
        .collect()
}

fn threads_from_env() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
    }
}

/// Writes through a sibling temporary file and renames it into place.
fn write_atomic<T>(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> CliResult<T>) -> CliResult<T> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("`{}` is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        let value = f(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(value)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn gen_dataset(a: GenDatasetArgs, out: &mut impl Write) -> CliResult {
    let config = DatasetConfig {
        scenario: a.scenario.params(&a.range),
        snr_db: a.snr_db,
        master_seed: a.seed,
    };
    let header = write_atomic(&a.out, |w| Ok(generate_dataset(&config, a.samples, w)?))?;
    writeln!(
        out,
        "wrote {} samples (N = {}, SNR = {} dB, seed = {}) to {}",
        header.sample_count,
        header.num_antennas,
        format_sig6(f64::from(header.snr_db)),
        header.master_seed,
        a.out.display()
    )?;
    Ok(())
}

fn sweep(a: SweepArgs, out: &mut impl Write) -> CliResult {
    let config = SweepConfig {
        snr_db_list: parse_snr_list(&a.snr_db).map_err(CliError::Usage)?,
        trials_per_point: a.trials,
        estimators: parse_estimators(&a.estimators)?,
        master_seed: a.seed,
        scenario: a.scenario.params(&a.range),
        dictionary: a.dict.params(&a.range),
        sparsity: a.sparsity,
        threads: threads_from_env()?,
    };
    let records = run_sweep(&config)?;
    write_atomic(&a.out, |w| Ok(write_csv(&records, w)?))?;
    writeln!(out, "wrote {} records to {}", records.len(), a.out.display())?;
    Ok(())
}

fn estimate(a: EstimateArgs, out: &mut impl Write) -> CliResult {
    let estimators = parse_estimators(&a.estimator)?;
    let reader = read_dataset(BufReader::new(File::open(&a.input)?))?;
    let header = *reader.header();
    let geom = ArrayGeometry::new(header.num_antennas as usize, header.wavelength, header.spacing)?;
    let sparsity = a.sparsity.unwrap_or(header.num_paths as usize);
    let bank = EstimatorBank::new(&geom, &a.dict.params(&a.range), sparsity)?;
    let records = evaluate_samples(
        reader,
        &bank,
        &estimators,
        f64::from(header.transmit_power),
        f64::from(header.snr_db),
    )?;
    write_csv(&records, out)?;
    Ok(())
}

fn grid_info(a: GridInfoArgs, out: &mut impl Write) -> CliResult {
    let geom = a.array.geometry()?;
    let params = a.dict.params(&a.range);
    let grid = PolarGrid::with_sampling(&geom, params.atoms_per_angle, params.sampling)?;
    let q = grid.total_atoms();
    let dict = PolarDictionary::new(&geom, grid)?;
    let sampling = match params.sampling {
        DistanceSampling::RangeMidpoint { r_min, r_max } => {
            format!("midpoint[{}, {}]", format_sig6(r_min), format_sig6(r_max))
        }
        DistanceSampling::InverseUniform { r_min } => format!("inverse[{}]", format_sig6(r_min)),
    };
    writeln!(out, "# N = {}", geom.num_antennas())?;
    writeln!(out, "# atoms_per_angle = {}", params.atoms_per_angle)?;
    writeln!(out, "# Q = {q}")?;
    writeln!(out, "# sampling = {sampling}")?;
    writeln!(out, "# rayleigh_distance_m = {}", format_sig6(geom.rayleigh_distance()))?;
    writeln!(out, "# mutual_coherence = {}", format_sig6(mutual_coherence(&dict)))?;
    writeln!(out, "angle_index,theta,distances_m")?;
    let grid = dict.grid();
    for (n, (theta, dists)) in grid.angles().iter().zip(grid.distances_per_angle()).enumerate() {
        let dists: Vec<String> = dists.iter().map(|&r| format_sig6(r)).collect();
        writeln!(out, "{n},{},{}", format_sig6(*theta), dists.join(";"))?;
    }
    Ok(())
}

fn complexity(a: ComplexityArgs, out: &mut impl Write) -> CliResult {
    let params = ComplexityParams {
        n: a.n,
        q: a.q,
        l: a.l,
        b: a.b,
        m: a.m,
        k: a.k,
        e: a.e,
    };
    for scheme in Scheme::ALL {
        writeln!(out, "{scheme}: {}", theoretical_complexity(scheme, &params)?)?;
    }
    Ok(())
}
