//! Cluster-ensemble toolkit built around wise-crowd member selection.
//!
//! Base clustering algorithms produce candidate partitions under a
//! decentralization coefficient (more clusters than the final target); a
//! feedback loop admits candidates into the ensemble only if they are
//! independent (by initialization parameters) and diverse (by the A3
//! similarity) with respect to the crowd admitted so far; the crowd is then
//! aggregated through a co-association matrix, an average-linkage
//! dendrogram, and a final cut.
//!
//! The pieces compose as:
//!
//! ```
//! use wocce::base::default_roster;
//! use wocce::crowd::{build_crowd, ThresholdConfig};
//! use wocce::consensus::wocce_consensus;
//! use wocce::dataset::generate_half_ring;
//!
//! let ds = generate_half_ring(40, 0.1, 7).unwrap();
//! let cfg = ThresholdConfig::new(0.2, 0.06, 3, 2, 32).unwrap();
//! let crowd = build_crowd(&ds, &default_roster(), &cfg, 1).unwrap();
//! let result = wocce_consensus(&crowd, ds.n(), cfg.kb).unwrap();
//! assert_eq!(result.n(), 40);
//! ```

pub mod base;
pub mod consensus;
pub mod crowd;
pub mod dataset;
pub mod diversity;
pub mod error;
pub mod harness;
pub mod independence;
pub mod linkage;
pub mod metrics;

pub use error::{Result, WocceError};
