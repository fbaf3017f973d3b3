//! Experiment configuration.
//!
//! Configs are TOML documents with flat keys; list-valued keys are sweep
//! axes. Every key is optional and defaults to the reference setup
//! (128 subcarriers, 6-tap channels, 10-block frames, BPSK, two SAGE
//! iterations):
//!
//! ```toml
//! n = 128                 # subcarriers, power of two
//! k = 128                 # allocated subcarriers (spread evenly), default n
//! taps = 6                # channel taps per terminal
//! cp = 16                 # cyclic prefix length, taps <= cp <= n
//! blocks = 10             # payload blocks per frame (after one preamble)
//! code = "test-96"        # LDPC preset: test-96 | paper-scale
//! modulation = "bpsk"
//! snr_db = [15.0]         # sweep axis
//! cfo_mode = "constant"   # constant | sinusoidal | explicit
//! xi = [0.1]              # sweep axis for constant / sinusoidal
//! pairing = [-1.0, 1.0]   # ε = ξ · pairing
//! eps1 = 0.05             # explicit mode: fixed terminal-1 offset
//! eps2 = [0.05]           # explicit mode: sweep axis
//! receivers = ["proposed", "sync", "mean", "nocomp"]
//! sage_iterations = [2]   # sweep axis
//! frames = 100            # maximum frames per sweep point
//! min_errors = 200        # stop a receiver once it has this many bit errors (0: never)
//! seed = 1
//! cfo_update = "auto"          # auto | every-block | first-block-only
//! cfo_rule = "phase-aware"     # phase-aware | plain
//! bootstrap = "joint-pair"     # joint-pair | per-terminal
//! decoder_iters = 50
//! batch_frames = 16       # frames scheduled per parallel batch
//! ```

use crate::baselines::Receiver;
use crate::channel::CfoSchedule;
use crate::ldpc::CodePreset;
use crate::ofdm::{Constellation, SubcarrierAllocation};
use crate::sage::{CfoRule, SymbolBootstrap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfoModeName {
    Constant,
    Sinusoidal,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfoUpdateMode {
    /// First block only for time-invariant offsets, every block otherwise.
    Auto,
    EveryBlock,
    FirstBlockOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfoRuleName {
    PhaseAware,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BootstrapName {
    JointPair,
    PerTerminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub k: Option<usize>,
    pub taps: usize,
    pub cp: Option<usize>,
    pub blocks: usize,
    pub code: String,
    pub modulation: String,
    pub snr_db: Vec<f64>,
    pub cfo_mode: CfoModeName,
    pub xi: Vec<f64>,
    pub pairing: [f64; 2],
    pub eps1: f64,
    pub eps2: Vec<f64>,
    pub receivers: Vec<String>,
    pub sage_iterations: Vec<usize>,
    pub frames: usize,
    pub min_errors: u64,
    pub seed: u64,
    pub cfo_update: CfoUpdateMode,
    pub cfo_rule: CfoRuleName,
    pub bootstrap: BootstrapName,
    pub decoder_iters: usize,
    pub batch_frames: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 128,
            k: None,
            taps: 6,
            cp: None,
            blocks: 10,
            code: CodePreset::Test96.name().to_string(),
            modulation: "bpsk".to_string(),
            snr_db: vec![15.0],
            cfo_mode: CfoModeName::Constant,
            xi: vec![0.1],
            pairing: [-1.0, 1.0],
            eps1: 0.05,
            eps2: vec![0.05],
            receivers: Receiver::ALL.iter().map(|r| r.name().to_string()).collect(),
            sage_iterations: vec![2],
            frames: 100,
            min_errors: 200,
            seed: 1,
            cfo_update: CfoUpdateMode::Auto,
            cfo_rule: CfoRuleName::PhaseAware,
            bootstrap: BootstrapName::JointPair,
            decoder_iters: 50,
            batch_frames: 16,
        }
    }
}

/// CFO coordinates of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoPoint {
    /// `None` in explicit mode.
    pub xi: Option<f64>,
    pub schedule: CfoSchedule,
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub cfo: CfoPoint,
    pub iterations: usize,
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(format!("config {}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(self.n)
    }

    pub fn cp(&self) -> usize {
        self.cp.unwrap_or(self.n / 8)
    }

    /// Evenly spread allocation of `k` out of `n` subcarriers.
    pub fn allocation(&self) -> Result<SubcarrierAllocation> {
        let (n, k) = (self.n, self.k());
        SubcarrierAllocation::new(n, (0..k).map(|i| i * n / k).collect())
    }

    pub fn code_preset(&self) -> Result<CodePreset> {
        CodePreset::by_name(&self.code)
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::by_name(&self.modulation)
    }

    pub fn receiver_set(&self) -> Result<Vec<Receiver>> {
        let mut rs = self
            .receivers
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Receiver>>>()?;
        rs.sort();
        rs.dedup();
        Ok(rs)
    }

    pub fn cfo_rule(&self) -> CfoRule {
        match self.cfo_rule {
            CfoRuleName::PhaseAware => CfoRule::PhaseAware,
            CfoRuleName::Plain => CfoRule::Plain,
        }
    }

    pub fn bootstrap(&self) -> SymbolBootstrap {
        match self.bootstrap {
            BootstrapName::JointPair => SymbolBootstrap::JointPair,
            BootstrapName::PerTerminal => SymbolBootstrap::PerTerminal,
        }
    }

    pub fn cfo_points(&self) -> Vec<CfoPoint> {
        match self.cfo_mode {
            CfoModeName::Constant => self
                .xi
                .iter()
                .map(|&xi| CfoPoint {
                    xi: Some(xi),
                    schedule: CfoSchedule::constant(xi, self.pairing),
                })
                .collect(),
            CfoModeName::Sinusoidal => self
                .xi
                .iter()
                .map(|&xi| CfoPoint {
                    xi: Some(xi),
                    schedule: CfoSchedule::sinusoidal(xi, self.pairing),
                })
                .collect(),
            CfoModeName::Explicit => self
                .eps2
                .iter()
                .map(|&e2| CfoPoint {
                    xi: None,
                    schedule: CfoSchedule::fixed([self.eps1, e2]),
                })
                .collect(),
        }
    }

    /// Sweep grid in SNR-major, then CFO, then iteration-count order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &snr_db in &self.snr_db {
            for cfo in self.cfo_points() {
                for &iterations in &self.sage_iterations {
                    out.push(SweepPoint {
                        snr_db,
                        cfo,
                        iterations,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 4 {
            return Err(Error::config(format!("n = {} must be a power of two >= 4", self.n)));
        }
        if self.k() == 0 || self.k() > self.n {
            return Err(Error::config(format!("k = {} must lie in 1..=n", self.k())));
        }
        if self.taps == 0 || self.taps > self.cp() || self.cp() > self.n {
            return Err(Error::config(format!(
                "need 1 <= taps ({}) <= cp ({}) <= n ({})",
                self.taps,
                self.cp(),
                self.n
            )));
        }
        if self.blocks == 0 {
            return Err(Error::config("blocks must be at least 1"));
        }
        if self.frames == 0 || self.batch_frames == 0 || self.decoder_iters == 0 {
            return Err(Error::config("frames, batch_frames and decoder_iters must be positive"));
        }
        let bits = self.k() * self.blocks * self.constellation()?.bits_per_symbol();
        let code_len = self.code_preset()?.build()?.n();
        if code_len > bits {
            return Err(Error::config(format!(
                "a {code_len}-bit codeword does not fit in {bits} bits per frame"
            )));
        }
        if self.receiver_set()?.is_empty() {
            return Err(Error::config("no receivers selected"));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(Error::config("snr_db must list at least one number"));
        }
        if self.sage_iterations.is_empty() {
            return Err(Error::config("sage_iterations must not be empty"));
        }
        let cfo = self.cfo_points();
        if cfo.is_empty() {
            return Err(Error::config("the CFO axis is empty"));
        }
        for p in cfo {
            p.schedule
                .validate(self.blocks)
                .map_err(|e| e.context("CFO schedule"))?;
        }
        Ok(())
    }
}
