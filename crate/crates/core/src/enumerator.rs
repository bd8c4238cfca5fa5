//! Batch enumeration: generate all itineraries of a given length over a
//! domain window, solve them in parallel, and aggregate.

use rayon::prelude::*;

use crate::error::Error;
use crate::function_model::FunctionSpec;
use crate::partition::{DomainId, PartitionSpec};
use crate::solver::{self, is_proper_power, Itinerary, PeriodicPointResult};

/// Aggregated outcome of a batch run. `results` and `failures` partition the
/// input itineraries; both are in itinerary-lexicographic order.
#[derive(Debug, Clone)]
pub struct BatchReport {
    pub window: Vec<DomainId>,
    pub period: u32,
    pub results: Vec<PeriodicPointResult>,
    pub failures: Vec<(Itinerary, Error)>,
    /// Minimum Euclidean distance between converged points; `None` with
    /// fewer than two results.
    pub min_pairwise_distance: Option<f64>,
    /// Number of converged results whose itinerary is not a proper power.
    pub minimal_count: usize,
}

/// All `|window|^n` words over the window in lexicographic order; with
/// `minimal_only`, exactly those that are not proper powers.
pub fn generate_itineraries(window: &[DomainId], n: u32, minimal_only: bool) -> Vec<Itinerary> {
    assert!(n >= 1, "period must be >= 1");
    if window.is_empty() {
        return Vec::new();
    }
    let mut alphabet = window.to_vec();
    alphabet.sort();
    alphabet.dedup();

    let n = n as usize;
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let word: Vec<DomainId> = digits.iter().map(|&d| alphabet[d]).collect();
        let it = Itinerary::new(word).expect("n >= 1");
        if !minimal_only || !is_proper_power(&it) {
            out.push(it);
        }
        // Odometer, most significant digit first.
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < alphabet.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Solves every itinerary (fanning out across threads), then aggregates
/// distances and counts. Individual failures are recorded, not fatal.
pub fn batch_solve(
    spec: &FunctionSpec,
    part: &PartitionSpec,
    itineraries: &[Itinerary],
    tol: f64,
    max_iter: u32,
) -> BatchReport {
    let mut solved: Vec<(Itinerary, Result<PeriodicPointResult, Error>)> = itineraries
        .par_iter()
        .map(|s| (s.clone(), solver::solve_periodic(spec, part, s, tol, max_iter)))
        .collect();
    solved.sort_by(|a, b| a.0.cmp(&b.0));

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (s, outcome) in solved {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push((s, e)),
        }
    }

    let mut window: Vec<DomainId> = itineraries
        .iter()
        .flat_map(|s| s.domains().iter().copied())
        .collect();
    window.sort();
    window.dedup();

    let period = itineraries.first().map(|s| s.len() as u32).unwrap_or(0);
    let min_pairwise_distance = min_pairwise(&results);
    let minimal_count = results.iter().filter(|r| !is_proper_power(&r.itinerary)).count();

    BatchReport { window, period, results, failures, min_pairwise_distance, minimal_count }
}

fn min_pairwise(results: &[PeriodicPointResult]) -> Option<f64> {
    if results.len() < 2 {
        return None;
    }
    let mut min = f64::INFINITY;
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            min = min.min((results[i].point - results[j].point).norm());
        }
    }
    Some(min)
}
