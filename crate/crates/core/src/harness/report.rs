//! CSV results and run manifests.

use super::config::SimConfig;
use super::{PointResult, SweepResult};
use crate::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;

pub const CSV_HEADER: &str = "receiver,snr_db,xi,eps1,eps2,M,frames,bits,bit_errors,ber,frame_errors,mean_decoder_iters";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub receiver: String,
    pub snr_db: f64,
    pub xi: Option<f64>,
    pub eps1: f64,
    pub eps2: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frame_errors: u64,
    pub mean_decoder_iters: f64,
}

impl From<&PointResult> for CsvRow {
    fn from(p: &PointResult) -> Self {
        CsvRow {
            receiver: p.receiver.name().to_string(),
            snr_db: p.point.snr_db,
            xi: p.point.cfo.xi,
            eps1: p.point.cfo.schedule.base[0],
            eps2: p.point.cfo.schedule.base[1],
            m: p.point.iterations,
            frames: p.frames,
            bits: p.bits,
            bit_errors: p.bit_errors,
            ber: p.ber(),
            frame_errors: p.frame_errors,
            mean_decoder_iters: p.mean_decoder_iters(),
        }
    }
}

/// Writes one row per sweep point and receiver.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &result.points {
        w.serialize(CsvRow::from(p))?;
    }
    w.flush()?;
    Ok(())
}

/// Manifest recording what produced a result file.
pub fn manifest_text(config: &SimConfig, workers: usize) -> String {
    let canonical = config.to_toml();
    let hash = Sha256::digest(canonical.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!(
        "plnc-core {}\nconfig_sha256 = {hex}\nseed = {}\nworkers = {workers}\nparallel_feature = {}\nrng = ChaCha8 per frame, seed = splitmix64 fold of (seed, frame)\n\n[config]\n{canonical}",
        env!("CARGO_PKG_VERSION"),
        config.seed,
        cfg!(feature = "parallel"),
    )
}
