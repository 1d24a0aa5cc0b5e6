//! Power graphs of finite abelian groups, their weighted cluster quotients,
//! and constructive Hamiltonicity decisions with checkable certificates.

pub mod cert;
pub mod cluster;
pub mod decide;
pub mod error;
pub mod graph;
pub mod grid;
pub mod group;
pub mod oracle;
pub mod power_graph;
#[cfg(test)]
mod properties;
pub mod selftest;
pub mod weighted;

pub use cert::Certificate;
pub use decide::{decide_group, verify_certificate, GroupVerdict, Verdict};
pub use error::{Error, Result};
pub use graph::{strong_product, SimpleGraph};
pub use grid::{decide_grid, Grid, GridDecision};
pub use group::{crt_intersect, Element, FiniteAbelianGroup, ResidueClass};
pub use power_graph::{build_power_graph, DirectedPowerGraph};
pub use weighted::{WalkCertificate, WalkKind, WeightedGraph};
