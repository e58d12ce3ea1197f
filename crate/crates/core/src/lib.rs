//! Tensor-free analytics for nonuniform hypergraphs.
//!
//! The order-`r` adjacency tensor of a hypergraph is never formed. TTSV1 and
//! TTSV2 products are evaluated edge by edge, either over unordered blowups
//! or through generating-function coefficients, and the eigenvector,
//! decomposition and clustering layers are written against those kernels.

pub mod combin;
pub mod decomp;
pub mod error;
pub mod exec;
pub mod genfn;
pub mod hypergraph;
pub mod spectral;
pub mod synth;
pub mod ttsv;

pub use error::{Error, Result};
pub use exec::{ExecConfig, StopFlag, Watchdog};
pub use hypergraph::{CliqueExpansion, Hypergraph, WeightScheme};
pub use ttsv::{Algorithm, Kernel, SymmetricMatrix};
