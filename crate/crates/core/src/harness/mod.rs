//! Experiment orchestration: seeded Monte Carlo frames, sweep aggregation,
//! CSV and manifest output, and the operation-count report.
//!
//! Frame `f` of a run draws its data, channels and unit-variance noise from
//! the stream `derive_seed(seed, [f])`, whichever point or worker runs it.
//! Per-point aggregation walks frames in index order, so the stopping rule
//! and every sum are independent of the worker count.

mod complexity;
mod config;
mod frame;
mod report;

pub use complexity::{complexity_report, ComplexityRow, FormulaCounts};
pub use config::{BootstrapName, CfoModeName, CfoPoint, CfoRuleName, CfoUpdateMode, SimConfig, SweepPoint};
pub use frame::{
    run_frame, run_frame_on, FrameOptions, FrameRealization, Setup, TrialResult, NOISELESS_NOISE_FLOOR,
};
pub use report::{manifest_text, write_csv, CsvRow, CSV_HEADER};

use crate::baselines::Receiver;
use crate::Result;

/// Aggregate of one receiver at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point: SweepPoint,
    pub receiver: Receiver,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub codewords: u64,
    pub decoder_iterations: u64,
    /// Per-frame moments `Σe_f²`, `Σe_f b_f`, `Σb_f²` for the clustered
    /// interval.
    pub frame_moments: [f64; 3],
}

impl PointResult {
    fn new(point: SweepPoint, receiver: Receiver) -> Self {
        PointResult {
            point,
            receiver,
            frames: 0,
            bits: 0,
            bit_errors: 0,
            frame_errors: 0,
            codewords: 0,
            decoder_iterations: 0,
            frame_moments: [0.0; 3],
        }
    }

    fn absorb(&mut self, t: &TrialResult) {
        self.frames += 1;
        self.bits += t.bits;
        self.bit_errors += t.bit_errors;
        self.frame_errors += u64::from(t.frame_error);
        self.codewords += t.codewords;
        self.decoder_iterations += t.decoder_iterations;
        let (e, b) = (t.bit_errors as f64, t.bits as f64);
        self.frame_moments[0] += e * e;
        self.frame_moments[1] += e * b;
        self.frame_moments[2] += b * b;
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    pub fn mean_decoder_iters(&self) -> f64 {
        if self.codewords == 0 {
            0.0
        } else {
            self.decoder_iterations as f64 / self.codewords as f64
        }
    }

    /// 95% Wilson interval of the BER, treating bits as independent.
    pub fn ber_interval(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.bits, 1.96)
    }

    /// Normal-approximation interval of the BER with frames as clusters
    /// (ratio estimator). Bit errors arrive in bursts of failed codewords,
    /// so this is the honest interval for comparing receivers.
    pub fn clustered_ber_interval(&self, z: f64) -> (f64, f64) {
        if self.frames < 2 || self.bits == 0 {
            return (0.0, 1.0);
        }
        let p = self.ber();
        let [e2, eb, b2] = self.frame_moments;
        let f = self.frames as f64;
        let spread = (e2 - 2.0 * p * eb + p * p * b2).max(0.0);
        let var = f / (f - 1.0) * spread / (self.bits as f64).powi(2);
        let half = z * var.sqrt();
        ((p - half).max(0.0), (p + half).min(1.0))
    }
}

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn get(&self, receiver: Receiver, pred: impl Fn(&SweepPoint) -> bool) -> Vec<&PointResult> {
        self.points
            .iter()
            .filter(|p| p.receiver == receiver && pred(&p.point))
            .collect()
    }
}

/// Worker pool used for frame batches.
pub struct Workers {
    #[cfg(feature = "parallel")]
    pool: rayon::ThreadPool,
}

impl Workers {
    /// `None` uses every available core. Without the `parallel` feature the
    /// count is ignored and frames run on the calling thread.
    pub fn new(count: Option<usize>) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let mut b = rayon::ThreadPoolBuilder::new();
            if let Some(n) = count {
                b = b.num_threads(n.max(1));
            }
            let pool = b.build().map_err(|e| crate::Error::config(format!("thread pool: {e}")))?;
            Ok(Workers { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = count;
            Ok(Workers {})
        }
    }

    pub fn sequential() -> Self {
        Workers::new(Some(1)).expect("single-thread pool")
    }

    pub fn count(&self) -> usize {
        #[cfg(feature = "parallel")]
        {
            self.pool.current_num_threads()
        }
        #[cfg(not(feature = "parallel"))]
        {
            1
        }
    }

    /// Maps `f` over `items`, results in input order.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            self.pool.install(|| items.par_iter().map(&f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }
}

/// Runs every sweep point of `setup.config`.
///
/// A receiver stops accumulating at the first frame where its bit errors
/// reach `min_errors`; a point ends when all receivers stopped or after
/// `frames` frames.
pub fn run_sweep(setup: &Setup, workers: &Workers) -> Result<SweepResult> {
    let cfg = &setup.config;
    let mut out = SweepResult::default();
    for (pi, point) in cfg.points().into_iter().enumerate() {
        let mut acc: Vec<PointResult> = setup.receivers.iter().map(|&r| PointResult::new(point, r)).collect();
        let done = |p: &PointResult| cfg.min_errors > 0 && p.bit_errors >= cfg.min_errors;
        let mut next = 0u64;
        while next < cfg.frames as u64 {
            let active: Vec<Receiver> = acc.iter().filter(|p| !done(p)).map(|p| p.receiver).collect();
            if active.is_empty() {
                break;
            }
            let end = (next + cfg.batch_frames as u64).min(cfg.frames as u64);
            let frames: Vec<u64> = (next..end).collect();
            let batch = workers.map(&frames, |&f| {
                run_frame(setup, &point, &active, setup.frame_seed(f), FrameOptions::default())
                    .map_err(|e| e.context(format!("sweep point {pi}, frame {f}")))
            });
            for trials in batch {
                for t in trials? {
                    let slot = acc.iter_mut().find(|p| p.receiver == t.receiver).expect("receiver slot");
                    if !done(slot) {
                        slot.absorb(&t);
                    }
                }
            }
            next = end;
        }
        out.points.extend(acc);
    }
    Ok(out)
}
