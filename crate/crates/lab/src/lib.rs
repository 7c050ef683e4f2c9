//! Experiment harness for random 2-complexes and cochain graphons.
//!
//! Every experiment draws replica `i` from a stream derived from the master
//! seed and `i` alone and merges results in index order, so output is the
//! same for any thread count.

pub mod certify;
pub mod cli;
pub mod config;
pub mod layers;
pub mod ldp;
pub mod models;
pub mod rng;
pub mod stats;
pub mod table;
pub mod trends;

pub use certify::{run_certification, CertificationReport, CertifyOptions};
pub use config::{ExperimentConfig, Model, Tolerances};
pub use layers::{run_layer_audit, LayerTable};
pub use ldp::{run_ldp_numerics, LdpReport};
pub use table::{Format, Table};
pub use trends::{run_betti_trend, run_ez1_trend};
