//! Scenario loading, run metrics, and sweep analysis backing the
//! `windpath` command-line tool. Kept as a library so integration tests
//! drive the same code paths as the binary.

pub mod metrics;
pub mod scenario;
pub mod sweep;

pub use metrics::MetricsReport;
pub use scenario::ScenarioFile;
pub use sweep::SweepSpec;
