//! Library surface of the `perorbit` command: job configuration, the
//! end-to-end pipeline, result serialization and the diagnostic renderer.

pub mod pipeline;
pub mod render;
pub mod report;

pub use pipeline::{run, Family, JobConfig, OutputFormat, RunOutput};
