//! Job configuration and the partition -> window -> enumerate -> solve
//! pipeline.

use num_complex::Complex64;

use perorbit_core::enumerator::{batch_solve, generate_itineraries, BatchReport};
use perorbit_core::function_model::{
    classify_preimage_components, FunctionSpec, PreimageComponentClass,
};
use perorbit_core::partition::{build_partition, DomainId, PartitionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Exp,
    Sin,
    ExpOverLinear,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exp" => Ok(Family::Exp),
            "sin" => Ok(Family::Sin),
            "expoverlinear" => Ok(Family::ExpOverLinear),
            other => Err(format!(
                "unknown family '{other}' (expected exp, sin or expoverlinear)"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Exp => "exp",
            Family::Sin => "sin",
            Family::ExpOverLinear => "expoverlinear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub family: Family,
    pub lambda: Complex64,
    pub pole: Complex64,
    pub radius: f64,
    pub delta_angle: f64,
    pub period: u32,
    pub window: u32,
    pub minimal_only: bool,
    pub tol: f64,
    pub max_iter: u32,
    pub output_format: OutputFormat,
    pub image_path: Option<String>,
}

/// Everything a serializer needs: the configuration, the built partition,
/// the classification metadata, the window actually used and the batch.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: JobConfig,
    pub spec: FunctionSpec,
    pub partition: PartitionSpec,
    pub components: Vec<PreimageComponentClass>,
    pub domains_used: Vec<DomainId>,
    pub report: BatchReport,
}

/// Runs the full pipeline. Errors are configuration errors with actionable
/// messages; individual itinerary failures are recorded in the report.
pub fn run(config: JobConfig) -> Result<RunOutput, String> {
    if config.period < 1 {
        return Err("period must be \u{2265} 1".into());
    }
    if config.window < 1 {
        return Err("window must be \u{2265} 1".into());
    }
    if config.tol.is_nan() || config.tol < 1e-14 {
        return Err("tol must be \u{2265} 1e-14".into());
    }
    if config.max_iter < 1 {
        return Err("max-iter must be \u{2265} 1".into());
    }
    if !config.radius.is_finite() || config.radius <= 0.0 {
        return Err("radius must be positive".into());
    }
    if !config.delta_angle.is_finite() {
        return Err("delta-angle must be finite".into());
    }

    let spec = match config.family {
        Family::Exp => FunctionSpec::exp_family(config.lambda),
        Family::Sin => FunctionSpec::sin_family(config.lambda),
        Family::ExpOverLinear => FunctionSpec::exp_over_linear(config.pole),
    }
    .map_err(|e| e.to_string())?;

    let partition =
        build_partition(&spec, config.radius, config.delta_angle).map_err(|e| e.to_string())?;
    let components =
        classify_preimage_components(&spec, config.radius).map_err(|e| e.to_string())?;
    let domains_used = partition.domain_window(config.window).map_err(|e| e.to_string())?;
    let itineraries = generate_itineraries(&domains_used, config.period, config.minimal_only);
    let report = batch_solve(&spec, &partition, &itineraries, config.tol, config.max_iter);

    Ok(RunOutput { config, spec, partition, components, domains_used, report })
}
