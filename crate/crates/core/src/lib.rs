//! Entanglement and distillability of N-qubit GHZ states after independent
//! single-qubit Pauli noise.
//!
//! * [`channel`]: the Pauli channel and its derived parameters `(a, b, c, d)`.
//! * [`cat_algebra`]: closed-form cat-basis populations, linear and log domain.
//! * [`criteria`]: per-cut NPPT verdicts, partition reports and thresholds.
//! * [`oracle`]: dense density-matrix simulation for small `N`.
//! * [`sweep`]: parameter sweeps, oracle campaigns and report serialization.

pub mod cat_algebra;
pub mod channel;
pub mod criteria;
pub mod error;
pub mod log_value;
pub mod oracle;
pub mod real_fmt;
pub mod sweep;

pub use cat_algebra::{CatCoefficients, CutSpec};
pub use channel::{ChannelFamily, DerivedParams, PauliChannel};
pub use criteria::{CutVerdict, ParityClass, PartitionReport, Verdict};
pub use error::{Error, Result};
pub use log_value::LogValue;
