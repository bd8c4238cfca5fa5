//! JSON and CSV serialization of a pipeline run.
//!
//! Every floating-point field is written with 17 significant digits, which
//! round-trips `f64` bit-exactly through any correct parser.

use num_complex::Complex64;
use std::fmt::Write;

use perorbit_core::function_model::PreimageComponentClass;
use perorbit_core::partition::DomainId;
use perorbit_core::solver::Itinerary;

use crate::pipeline::{Family, OutputFormat, RunOutput};

/// 17 significant digits: one before the point, sixteen after.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_json(z: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", fmt_f64(z.re), fmt_f64(z.im))
}

fn domain_json(d: DomainId) -> String {
    format!("{{\"tract\":{},\"branch\":{}}}", d.tract, d.branch)
}

fn itinerary_json(s: &Itinerary) -> String {
    let parts: Vec<String> = s.domains().iter().map(|d| domain_json(*d)).collect();
    format!("[{}]", parts.join(","))
}

/// Compact itinerary label used by the CSV format: `tract:branch` pairs
/// joined with `|`, e.g. `0:1|0:-1`.
pub fn itinerary_label(s: &Itinerary) -> String {
    let parts: Vec<String> =
        s.domains().iter().map(|d| format!("{}:{}", d.tract, d.branch)).collect();
    parts.join("|")
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

pub fn to_json(out: &RunOutput) -> String {
    let cfg = &out.config;
    let mut s = String::new();
    s.push_str("{\n");

    // config
    let _ = writeln!(
        s,
        "  \"config\": {{\"family\":\"{}\",\"lambda\":{},\"pole\":{},\"radius\":{},\"delta_angle\":{},\"period\":{},\"window\":{},\"minimal_only\":{},\"tol\":{},\"max_iter\":{},\"format\":\"{}\"}},",
        cfg.family.name(),
        complex_json(cfg.lambda),
        if cfg.family == Family::ExpOverLinear { complex_json(cfg.pole) } else { "null".into() },
        fmt_f64(cfg.radius),
        fmt_f64(cfg.delta_angle),
        cfg.period,
        cfg.window,
        cfg.minimal_only,
        fmt_f64(cfg.tol),
        cfg.max_iter,
        match cfg.output_format {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        },
    );

    // partition: geometry, window actually used, classification metadata
    let domains: Vec<String> = out.domains_used.iter().map(|d| domain_json(*d)).collect();
    let components: Vec<String> = out
        .components
        .iter()
        .map(|c| match c {
            PreimageComponentClass::Tract => "{\"kind\":\"tract\"}".to_string(),
            PreimageComponentClass::PoleComponent { pole, order } => format!(
                "{{\"kind\":\"pole\",\"pole\":{},\"order\":{}}}",
                complex_json(*pole),
                order
            ),
        })
        .collect();
    let _ = writeln!(
        s,
        "  \"partition\": {{\"R\":{},\"delta_angle\":{},\"domains_used\":[{}],\"components\":[{}]}},",
        fmt_f64(out.partition.radius),
        fmt_f64(out.partition.delta_angle),
        domains.join(","),
        components.join(","),
    );

    // results
    s.push_str("  \"results\": [\n");
    for (i, r) in out.report.results.iter().enumerate() {
        let orbit: Vec<String> = r.orbit.iter().map(|z| complex_json(*z)).collect();
        let ratios: Vec<String> = r.step_ratios.iter().map(|x| fmt_f64(*x)).collect();
        let _ = writeln!(
            s,
            "    {{\"itinerary\":{},\"period\":{},\"point\":{},\"orbit\":[{}],\"multiplier\":{},\"multiplier_modulus\":{},\"residual\":{},\"iterations\":{},\"step_ratios\":[{}]}}{}",
            itinerary_json(&r.itinerary),
            r.itinerary.len(),
            complex_json(r.point),
            orbit.join(","),
            complex_json(r.multiplier),
            fmt_f64(r.multiplier_modulus),
            fmt_f64(r.residual),
            r.iterations,
            ratios.join(","),
            if i + 1 < out.report.results.len() { "," } else { "" },
        );
    }
    s.push_str("  ],\n");

    // failures
    s.push_str("  \"failures\": [\n");
    for (i, (it, err)) in out.report.failures.iter().enumerate() {
        let _ = writeln!(
            s,
            "    {{\"itinerary\":{},\"error\":\"{}\"}}{}",
            itinerary_json(it),
            escape_json(&err.to_string()),
            if i + 1 < out.report.failures.len() { "," } else { "" },
        );
    }
    s.push_str("  ],\n");

    // stats
    let min_dist = match out.report.min_pairwise_distance {
        Some(d) => fmt_f64(d),
        None => "null".to_string(),
    };
    let _ = writeln!(
        s,
        "  \"stats\": {{\"min_pairwise_distance\":{},\"minimal_count\":{}}}",
        min_dist, out.report.minimal_count
    );
    s.push_str("}\n");
    s
}

/// Fixed column order: itinerary, period, re(w), im(w), re(mult), im(mult),
/// |mult|, residual, iterations.
pub fn to_csv(out: &RunOutput) -> String {
    let mut s = String::from("itinerary,period,re(w),im(w),re(mult),im(mult),|mult|,residual,iterations\n");
    for r in &out.report.results {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            itinerary_label(&r.itinerary),
            r.itinerary.len(),
            fmt_f64(r.point.re),
            fmt_f64(r.point.im),
            fmt_f64(r.multiplier.re),
            fmt_f64(r.multiplier.im),
            fmt_f64(r.multiplier_modulus),
            fmt_f64(r.residual),
            r.iterations,
        );
    }
    s
}
