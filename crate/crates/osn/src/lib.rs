//! A mock social network with plantable shadow bans, a black-box detector
//! for the three ban types, and a timeline-backed interaction source.

pub mod client;
pub mod detector;
pub mod scenario;
pub mod server;
pub mod source;

pub use detector::{BanEvidence, BanTest, DetectError, DetectionReport, Detector, DetectorConfig, GhostStatus};
pub use scenario::{plant_scenario, Scenario, ScenarioError};
pub use server::{MockIndex, MockServer};
pub use source::MockSource;
