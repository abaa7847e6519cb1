//! Binary (observation, channel) dataset files.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "XLCE"
//!      4     2  u16 format version (1)
//!      6     2  u16 reserved (0)
//!      8     4  u32 N
//!     12     8  u64 sample count
//!     20     4  f32 SNR (dB)
//!     24     4  f32 transmit power
//!     28     8  f64 wavelength (m)
//!     36     8  f64 antenna spacing (m)
//!     44     4  u32 number of paths
//!     48     8  u64 master seed
//!     56        samples
//! ```
//!
//! Each sample is 2N f32 for y followed by 2N f32 for h, interleaved
//! (re, im) in ascending antenna order.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::{Complex32, Complex64};

use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::sweep::ScenarioParams;

pub const MAGIC: [u8; 4] = *b"XLCE";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: u64 = 56;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetHeader {
    pub num_antennas: u32,
    pub sample_count: u64,
    pub snr_db: f32,
    pub transmit_power: f32,
    pub wavelength: f64,
    pub spacing: f64,
    pub num_paths: u32,
    pub master_seed: u64,
}

impl DatasetHeader {
    pub fn sample_len(&self) -> u64 {
        16 * u64::from(self.num_antennas)
    }

    /// Exact size in bytes of a complete file with this header.
    pub fn file_len(&self) -> u64 {
        HEADER_LEN + self.sample_count * self.sample_len()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_u16::<LittleEndian>(FORMAT_VERSION)?;
        w.write_u16::<LittleEndian>(0)?;
        w.write_u32::<LittleEndian>(self.num_antennas)?;
        w.write_u64::<LittleEndian>(self.sample_count)?;
        w.write_f32::<LittleEndian>(self.snr_db)?;
        w.write_f32::<LittleEndian>(self.transmit_power)?;
        w.write_f64::<LittleEndian>(self.wavelength)?;
        w.write_f64::<LittleEndian>(self.spacing)?;
        w.write_u32::<LittleEndian>(self.num_paths)?;
        w.write_u64::<LittleEndian>(self.master_seed)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut raw = [0u8; HEADER_LEN as usize];
        read_exact_or(r, &mut raw, Error::TruncatedHeader)?;
        let magic: [u8; 4] = raw[..4].try_into().expect("4 bytes");
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        let mut cur = &raw[4..];
        let version = cur.read_u16::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let _reserved = cur.read_u16::<LittleEndian>()?;
        Ok(Self {
            num_antennas: cur.read_u32::<LittleEndian>()?,
            sample_count: cur.read_u64::<LittleEndian>()?,
            snr_db: cur.read_f32::<LittleEndian>()?,
            transmit_power: cur.read_f32::<LittleEndian>()?,
            wavelength: cur.read_f64::<LittleEndian>()?,
            spacing: cur.read_f64::<LittleEndian>()?,
            num_paths: cur.read_u32::<LittleEndian>()?,
            master_seed: cur.read_u64::<LittleEndian>()?,
        })
    }
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], on_eof: Error) -> Result<()> {
    match r.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(on_eof),
        Err(e) => Err(e.into()),
    }
}

/// One stored pair, kept at file precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub observation: Vec<Complex32>,
    pub channel: Vec<Complex32>,
}

impl Sample {
    fn from_f64(y: &ChannelVector, h: &ChannelVector) -> Self {
        let narrow = |v: &ChannelVector| {
            v.iter()
                .map(|c| Complex32::new(c.re as f32, c.im as f32))
                .collect()
        };
        Self {
            observation: narrow(y),
            channel: narrow(h),
        }
    }

    fn widen(v: &[Complex32]) -> ChannelVector {
        ChannelVector::from_iterator(
            v.len(),
            v.iter().map(|c| Complex64::new(f64::from(c.re), f64::from(c.im))),
        )
    }

    pub fn observation_f64(&self) -> ChannelVector {
        Self::widen(&self.observation)
    }

    pub fn channel_f64(&self) -> ChannelVector {
        Self::widen(&self.channel)
    }

    fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for c in self.observation.iter().chain(&self.channel) {
            w.write_f32::<LittleEndian>(c.re)?;
            w.write_f32::<LittleEndian>(c.im)?;
        }
        Ok(())
    }
}

/// Parameters of one dataset file: a fixed SNR and seed over a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetConfig {
    pub scenario: ScenarioParams,
    pub snr_db: f64,
    pub master_seed: u64,
}

impl DatasetConfig {
    fn header(&self, sample_count: u64) -> Result<DatasetHeader> {
        let to_u32 = |v: usize, what: &str| {
            u32::try_from(v).map_err(|_| Error::invalid(format!("{what} {v} does not fit in u32")))
        };
        Ok(DatasetHeader {
            num_antennas: to_u32(self.scenario.num_antennas, "antenna count")?,
            sample_count,
            snr_db: self.snr_db as f32,
            transmit_power: self.scenario.transmit_power as f32,
            wavelength: self.scenario.wavelength,
            spacing: self.scenario.spacing,
            num_paths: to_u32(self.scenario.num_paths, "path count")?,
            master_seed: self.master_seed,
        })
    }
}

/// Writes the header and `sample_count` independently drawn samples.
///
/// Sample `i` uses `substream(master_seed, 0, i)`, the same stream a
/// single-SNR sweep uses for trial `i`.
pub fn generate_dataset<W: Write>(config: &DatasetConfig, sample_count: u64, out: W) -> Result<DatasetHeader> {
    if sample_count == 0 {
        return Err(Error::invalid("sample_count must be >= 1"));
    }
    if sample_count > u64::from(u32::MAX) {
        return Err(Error::invalid("sample_count exceeds per-sample stream indexing"));
    }
    let header = config.header(sample_count)?;
    let geom = config.scenario.geometry()?;
    let mut out = io::BufWriter::new(out);
    header.write_to(&mut out)?;
    for i in 0..sample_count {
        let mut rng = substream(config.master_seed, 0, i as u32);
        let (y, h) = config.scenario.draw_sample(&geom, config.snr_db, &mut rng)?;
        Sample::from_f64(&y, &h).write_to(&mut out)?;
    }
    out.flush()?;
    Ok(header)
}

/// Streaming reader over a dataset file.
pub struct DatasetReader<R> {
    header: DatasetHeader,
    source: R,
    read: u64,
    failed: bool,
    buf: Vec<u8>,
}

impl<R: Read> DatasetReader<R> {
    pub fn header(&self) -> &DatasetHeader {
        &self.header
    }
}

/// Validates the header and returns an iterator over the samples.
///
/// The iterator yields every complete sample, then a single
/// [`Error::Truncated`] if the payload ends early.
pub fn read_dataset<R: Read>(mut source: R) -> Result<DatasetReader<R>> {
    let header = DatasetHeader::read_from(&mut source)?;
    let buf = vec![0u8; header.sample_len() as usize];
    Ok(DatasetReader {
        header,
        source,
        read: 0,
        failed: false,
        buf,
    })
}

impl<R: Read> Iterator for DatasetReader<R> {
    type Item = Result<Sample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.read >= self.header.sample_count {
            return None;
        }
        let truncated = Error::Truncated {
            expected: self.header.sample_count,
            complete: self.read,
        };
        if let Err(e) = read_exact_or(&mut self.source, &mut self.buf, truncated) {
            self.failed = true;
            return Some(Err(e));
        }
        let n = self.header.num_antennas as usize;
        let mut values = self
            .buf
            .chunks_exact(8)
            .map(|c| Complex32::new(
                f32::from_le_bytes(c[..4].try_into().expect("4 bytes")),
                f32::from_le_bytes(c[4..].try_into().expect("4 bytes")),
            ));
        let observation = values.by_ref().take(n).collect();
        let channel = values.collect();
        self.read += 1;
        Some(Ok(Sample {
            observation,
            channel,
        }))
    }
}
