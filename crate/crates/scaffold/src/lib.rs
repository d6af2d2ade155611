//! File formats and the command-line front end for the cable-suspended
//! scaffold simulator. The physics lives in `scaffold-core`.

pub mod analysis;
pub mod cli;
pub mod scenario;
pub mod telemetry;
pub mod validate;
