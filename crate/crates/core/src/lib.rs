//! Latency evaluation for simultaneous translation.
//!
//! Computes Average Token Delay (ATD) alongside the established latency
//! metrics (AL, AL-ref, LAAL, DAL, AP, CW, Start/End Offset) and mean
//! Ear-Voice Span from READ/WRITE session traces, simulates wait-k and
//! chunk-k schedules, and correlates metric columns with Spearman's rho.
//!
//! ```
//! use simul_latency::{sim, step::{self, RatioMode, StepMetricInput}};
//!
//! let trace = sim::gen_chunk_k(19, 20, 20).unwrap();
//! let inp = StepMetricInput::from_session(&trace).unwrap();
//! assert_eq!(step::average_lagging(&inp, RatioMode::Hypothesis).unwrap(), 9.55);
//! assert_eq!(step::atd_steps(&inp).unwrap(), 19.0);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod cli;
pub mod error;
pub mod evs;
pub mod io;
pub mod metric;
pub mod report;
pub mod sim;
pub mod stats;
pub mod step;
pub mod timed;
pub mod trace;

pub use error::{Error, Result};
pub use evs::{mean_evs, AlignedPair, EvsMode};
pub use metric::Metric;
pub use stats::{spearman, spearman_pairwise, Correlation};
pub use step::{
    atd_steps, average_lagging, differentiable_average_lagging, RatioMode, StepMetricInput,
};
pub use timed::{atd_timed, build_nca_timeline, end_offset, start_offset};
pub use trace::{
    concat_sessions, regroup_tokens, subsegment_speech, Modality, SessionTrace, SubSegmentConfig,
    TimeBase, TimedToken, TimelineKind, TokenGranularity,
};
