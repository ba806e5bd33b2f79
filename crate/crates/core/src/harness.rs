//! Batch runner and benchmark post-processing.
//!
//! [`run_suite`] solves a list of problems under several solver variants and
//! produces one [`BenchRecord`] per (problem, variant) pair. The records
//! round-trip through CSV, and three comparisons can be derived from them:
//!
//! * [`performance_profile`] — for each variant, the fraction of problems
//!   solved within a factor `tau` of the best variant's cost, sampled on a
//!   dyadic `tau` grid joined with every observed ratio;
//! * [`outperforming_factors`] — per-problem pairwise log2 cost ratios,
//!   clipped to `[-2, 2]`;
//! * [`penalty_histogram`] — how far each variant drove the penalty
//!   parameter down, in fixed decade bins.
//!
//! Everything here is deterministic: problems run sequentially in the order
//! given and records are sorted by problem name and variant before they are
//! returned or written.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{self, SolverConfig};
use crate::suite::DenseProblem;

/// Outcome of one solve in a benchmark batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    /// Problem name.
    pub problem: String,
    /// Solver variant name.
    pub variant: String,
    /// Status flag: `opt`, `inf`, `itr`, `time`, or `err`.
    pub flag: String,
    /// Outer iterations.
    pub iters: usize,
    /// Objective/constraint evaluations.
    pub funcs: usize,
    /// Gradient/Jacobian evaluations.
    pub grads: usize,
    /// Wall time in seconds.
    pub time_s: f64,
    /// Final penalty parameter.
    pub mu_final: f64,
    /// Final max norm of the constraint values.
    pub c_inf: f64,
    /// Final max norm of the Lagrangian stationarity residual.
    pub fl_inf: f64,
}

impl BenchRecord {
    /// Whether this run ended in either convergence test.
    pub fn solved(&self) -> bool {
        self.flag == "opt" || self.flag == "inf"
    }
}

/// Header line of the records CSV.
pub const RECORD_CSV_HEADER: &str =
    "problem,variant,flag,iters,funcs,grads,time_s,mu_final,c_inf,fl_inf";

/// Solves every problem under every named variant and returns the records
/// sorted by `(problem, variant)`.
///
/// `base` supplies all numeric constants; each variant name only switches
/// the steering mode and globalization. Unknown variant names abort before
/// any solve. A failed solve (bad evaluation, broken invariant) is captured
/// as a record with flag `err` instead of aborting the rest of the batch;
/// its counters are zero and its final-state columns are NaN.
pub fn run_suite(
    problems: &[DenseProblem],
    variants: &[&str],
    base: &SolverConfig,
) -> Result<Vec<BenchRecord>> {
    let mut configs = Vec::with_capacity(variants.len());
    for &variant in variants {
        let mut cfg = base.clone();
        cfg.apply_variant_name(variant)?;
        configs.push(cfg);
    }

    let mut records = Vec::with_capacity(problems.len() * variants.len());
    for problem in problems {
        for (&variant, cfg) in variants.iter().zip(&configs) {
            let record = match solver::solve(problem, cfg, &problem.x0, &problem.y0) {
                Ok(report) => BenchRecord {
                    problem: problem.name.to_string(),
                    variant: variant.to_string(),
                    flag: report.status.flag().to_string(),
                    iters: report.iterations,
                    funcs: report.function_evals,
                    grads: report.gradient_evals,
                    time_s: report.wall_time_s,
                    mu_final: report.mu_final,
                    c_inf: report.c_inf,
                    fl_inf: report.fl_inf,
                },
                Err(_) => BenchRecord {
                    problem: problem.name.to_string(),
                    variant: variant.to_string(),
                    flag: "err".to_string(),
                    iters: 0,
                    funcs: 0,
                    grads: 0,
                    time_s: 0.0,
                    mu_final: f64::NAN,
                    c_inf: f64::NAN,
                    fl_inf: f64::NAN,
                },
            };
            records.push(record);
        }
    }
    records.sort_by(|a, b| (&a.problem, &a.variant).cmp(&(&b.problem, &b.variant)));
    Ok(records)
}

/// Writes records as CSV with the fixed [`RECORD_CSV_HEADER`].
pub fn write_records_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        writer
            .serialize(record)
            .map_err(|e| Error::Config(format!("cannot write records csv: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Config(format!("cannot flush records csv: {e}")))?;
    Ok(())
}

/// Reads records back from CSV produced by [`write_records_csv`].
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut records = Vec::new();
    for row in reader.deserialize() {
        let record: BenchRecord =
            row.map_err(|e| Error::Config(format!("bad records csv: {e}")))?;
        records.push(record);
    }
    Ok(records)
}

/// Which per-record cost a comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Outer iterations.
    Iterations,
    /// Objective/constraint evaluations.
    FunctionEvals,
    /// Gradient/Jacobian evaluations.
    GradientEvals,
    /// Wall time.
    Time,
}

impl Metric {
    /// Parses a metric name as used on the command line.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "iters" | "iterations" => Ok(Metric::Iterations),
            "funcs" | "functions" => Ok(Metric::FunctionEvals),
            "grads" | "gradients" => Ok(Metric::GradientEvals),
            "time" => Ok(Metric::Time),
            other => Err(Error::UnknownName(format!(
                "metric `{other}` (expected iters, funcs, grads, or time)"
            ))),
        }
    }

    /// The metric value of a record, floored at 1 so ratios stay finite;
    /// a floored zero marks a degenerate comparison.
    fn of(self, record: &BenchRecord) -> (f64, bool) {
        let raw = match self {
            Metric::Iterations => record.iters as f64,
            Metric::FunctionEvals => record.funcs as f64,
            Metric::GradientEvals => record.grads as f64,
            Metric::Time => record.time_s,
        };
        if raw > 0.0 {
            (raw, false)
        } else {
            (1.0, true)
        }
    }
}

/// One variant's performance-profile curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// Variant name.
    pub variant: String,
    /// `(log2 tau, fraction of problems solved within factor tau)` pairs,
    /// nondecreasing in both coordinates.
    pub points: Vec<(f64, f64)>,
}

/// Upper end of the profile grid: ratios above `2^16` count as failures.
const PROFILE_LOG2_MAX: f64 = 16.0;

/// Builds performance profiles over the given variants.
///
/// For each problem, every variant's cost is divided by the best cost among
/// the variants that solved it; unsolved runs get an infinite ratio.
/// Problems no variant solved are excluded. The curves are sampled on the
/// dyadic grid `2^0 .. 2^16` joined with all observed ratios.
pub fn performance_profile(
    records: &[BenchRecord],
    variants: &[&str],
    metric: Metric,
) -> Result<Vec<Profile>> {
    let mut problems: Vec<&str> = records.iter().map(|r| r.problem.as_str()).collect();
    problems.sort_unstable();
    problems.dedup();

    // ratios[v][p]: log2 of the cost ratio, or infinity when unsolved.
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); variants.len()];
    let mut counted = 0usize;
    for &problem in &problems {
        let mut costs = Vec::with_capacity(variants.len());
        for &variant in variants {
            let record = records
                .iter()
                .find(|r| r.problem == problem && r.variant == variant)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "profile needs a record for problem `{problem}` under \
                         variant `{variant}`"
                    ))
                })?;
            let (cost, _) = metric.of(record);
            costs.push((cost, record.solved()));
        }
        let best = costs
            .iter()
            .filter(|(_, solved)| *solved)
            .map(|(cost, _)| *cost)
            .fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            continue; // no variant solved it: excluded from the profile
        }
        counted += 1;
        for (slot, (cost, solved)) in ratios.iter_mut().zip(&costs) {
            slot.push(if *solved {
                (cost / best).log2().max(0.0)
            } else {
                f64::INFINITY
            });
        }
    }
    if counted == 0 {
        return Err(Error::Config(
            "profile is empty: no problem was solved by any variant".to_string(),
        ));
    }

    // Dyadic grid joined with the observed ratios.
    let mut grid: Vec<f64> = (0..=PROFILE_LOG2_MAX as i32).map(f64::from).collect();
    for slot in &ratios {
        for &r in slot {
            if r.is_finite() && r <= PROFILE_LOG2_MAX {
                grid.push(r);
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let total = counted as f64;
    Ok(variants
        .iter()
        .zip(ratios)
        .map(|(&variant, slot)| {
            let points = grid
                .iter()
                .map(|&tau| {
                    let hit = slot.iter().filter(|&&r| r <= tau).count();
                    (tau, hit as f64 / total)
                })
                .collect();
            Profile {
                variant: variant.to_string(),
                points,
            }
        })
        .collect())
}

/// Writes one profile curve as CSV with header `log2_tau,fraction`.
pub fn write_profile_csv<W: Write>(profile: &Profile, out: &mut W) -> Result<()> {
    writeln!(out, "log2_tau,fraction")?;
    for (tau, fraction) in &profile.points {
        writeln!(out, "{tau},{fraction}")?;
    }
    Ok(())
}

/// Pairwise comparison of two variants on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorEntry {
    /// Problem name.
    pub problem: String,
    /// `-log2(cost_a / cost_b)` clipped to `[-2, 2]`; positive favors the
    /// first variant.
    pub factor: f64,
    /// The same quantity before clipping.
    pub raw: f64,
    /// Whether the first variant solved the problem.
    pub a_solved: bool,
    /// Whether the second variant solved the problem.
    pub b_solved: bool,
    /// Set when a zero metric value had to be floored at 1.
    pub degenerate: bool,
}

/// Range the outperforming factors are clipped to.
pub const FACTOR_CLIP: f64 = 2.0;

/// Per-problem outperforming factors of `variant_a` over `variant_b`.
pub fn outperforming_factors(
    records: &[BenchRecord],
    variant_a: &str,
    variant_b: &str,
    metric: Metric,
) -> Result<Vec<FactorEntry>> {
    let mut problems: Vec<&str> = records.iter().map(|r| r.problem.as_str()).collect();
    problems.sort_unstable();
    problems.dedup();

    let mut entries = Vec::with_capacity(problems.len());
    for problem in problems {
        let lookup = |variant: &str| {
            records
                .iter()
                .find(|r| r.problem == problem && r.variant == variant)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "factors need a record for problem `{problem}` under \
                         variant `{variant}`"
                    ))
                })
        };
        let a = lookup(variant_a)?;
        let b = lookup(variant_b)?;
        let (ca, da) = metric.of(a);
        let (cb, db) = metric.of(b);
        // `+ 0.0` turns the negative zero of -log2(1) into plain zero.
        let raw = -(ca / cb).log2() + 0.0;
        let factor = raw.clamp(-FACTOR_CLIP, FACTOR_CLIP);
        entries.push(FactorEntry {
            problem: problem.to_string(),
            factor,
            raw,
            a_solved: a.solved(),
            b_solved: b.solved(),
            degenerate: da || db,
        });
    }
    Ok(entries)
}

/// Labels of the final-penalty histogram bins, largest first.
pub const PENALTY_BIN_LABELS: [&str; 8] = [
    "1",
    "[1e-1,1)",
    "[1e-2,1e-1)",
    "[1e-3,1e-2)",
    "[1e-4,1e-3)",
    "[1e-5,1e-4)",
    "[1e-6,1e-5)",
    "(0,1e-6)",
];

/// Histogram of final penalty values for one variant: bin 0 counts runs
/// that never reduced the penalty below 1, bins 1..7 successive decades.
/// Records without a final penalty (failed runs) are skipped.
pub fn penalty_histogram(records: &[BenchRecord], variant: &str) -> [usize; 8] {
    let mut bins = [0usize; 8];
    for record in records
        .iter()
        .filter(|r| r.variant == variant && r.mu_final.is_finite())
    {
        let mu = record.mu_final;
        let bin = if mu >= 1.0 {
            0
        } else if mu >= 1e-6 {
            // mu in [1e-k, 1e-(k-1)) lands in bin k for k = 1..6.
            let mut k = 1;
            while mu < 10f64.powi(-k) {
                k += 1;
            }
            k as usize
        } else {
            7
        };
        bins[bin] += 1;
    }
    bins
}

/// Per-variant aggregates over a record batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSummary {
    /// Variant name.
    pub variant: String,
    /// Records for this variant.
    pub total: usize,
    /// Runs ending in either convergence test.
    pub solved: usize,
    /// Runs per status flag, in flag order opt, inf, itr, time, err.
    pub opt: usize,
    /// See `opt`.
    pub inf: usize,
    /// See `opt`.
    pub itr: usize,
    /// See `opt`.
    pub time: usize,
    /// See `opt`.
    pub err: usize,
    /// Summed iterations.
    pub iters: usize,
    /// Summed function evaluations.
    pub funcs: usize,
    /// Summed gradient evaluations.
    pub grads: usize,
    /// Summed wall time in seconds.
    pub time_s: f64,
}

/// Aggregates records per variant, ordered by variant name.
pub fn summarize(records: &[BenchRecord]) -> Vec<VariantSummary> {
    let mut variants: Vec<&str> = records.iter().map(|r| r.variant.as_str()).collect();
    variants.sort_unstable();
    variants.dedup();
    variants
        .iter()
        .map(|&variant| {
            let mine: Vec<&BenchRecord> =
                records.iter().filter(|r| r.variant == variant).collect();
            let count = |flag: &str| mine.iter().filter(|r| r.flag == flag).count();
            VariantSummary {
                variant: variant.to_string(),
                total: mine.len(),
                solved: mine.iter().filter(|r| r.solved()).count(),
                opt: count("opt"),
                inf: count("inf"),
                itr: count("itr"),
                time: count("time"),
                err: count("err"),
                iters: mine.iter().map(|r| r.iters).sum(),
                funcs: mine.iter().map(|r| r.funcs).sum(),
                grads: mine.iter().map(|r| r.grads).sum(),
                time_s: mine.iter().map(|r| r.time_s).sum(),
            }
        })
        .collect()
}

/// Writes the per-variant summary as pretty-printed JSON.
pub fn write_summary_json<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let summaries = summarize(records);
    serde_json::to_writer_pretty(out, &summaries)
        .map_err(|e| Error::Config(format!("cannot write summary json: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::VARIANT_NAMES;
    use crate::suite::{self, Expected};

    fn record(problem: &str, variant: &str, flag: &str, funcs: usize, mu: f64) -> BenchRecord {
        BenchRecord {
            problem: problem.to_string(),
            variant: variant.to_string(),
            flag: flag.to_string(),
            iters: funcs / 2,
            funcs,
            grads: funcs / 2,
            time_s: 0.001 * funcs as f64,
            mu_final: mu,
            c_inf: 1e-9,
            fl_inf: 1e-7,
        }
    }

    #[test]
    fn full_registry_solves_cleanly_under_every_variant() {
        let problems = suite::registry();
        let records = run_suite(&problems, &VARIANT_NAMES, &SolverConfig::default()).unwrap();
        assert_eq!(records.len(), problems.len() * VARIANT_NAMES.len());
        let mut wrong = Vec::new();
        for record in &records {
            let problem = suite::problem(&record.problem).unwrap();
            let ok = match problem.expected {
                Expected::Solution { .. } => record.flag == "opt",
                // Safeguarded steering stops cutting the penalty at its
                // threshold, far above the floor the infeasibility test
                // needs, so those variants may run out of iterations
                // instead of certifying infeasibility.
                Expected::Infeasible { .. } => {
                    record.flag == "inf"
                        || (record.variant.ends_with("-safe") && record.flag == "itr")
                }
            };
            if !ok {
                wrong.push(format!(
                    "{} / {}: got {}",
                    record.problem, record.variant, record.flag
                ));
            }
        }
        assert!(wrong.is_empty(), "unexpected outcomes:\n{}", wrong.join("\n"));
        // Sorted by (problem, variant).
        for pair in records.windows(2) {
            assert!(
                (&pair[0].problem, &pair[0].variant) <= (&pair[1].problem, &pair[1].variant)
            );
        }
    }

    #[test]
    fn records_round_trip_through_csv() {
        let records = vec![
            record("a", "balls", "opt", 10, 0.1),
            record("b", "aalls", "inf", 20, 1e-9),
        ];
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(RECORD_CSV_HEADER));
        let back = read_records_csv(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn profile_matches_a_hand_computed_example() {
        // p1: a=2 b=4; p2: a=4 b=4; p3: a failed, b=8.
        let records = vec![
            record("p1", "a", "opt", 2, 0.1),
            record("p1", "b", "opt", 4, 0.1),
            record("p2", "a", "opt", 4, 0.1),
            record("p2", "b", "opt", 4, 0.1),
            record("p3", "a", "itr", 100, 0.1),
            record("p3", "b", "opt", 8, 0.1),
        ];
        let profiles =
            performance_profile(&records, &["a", "b"], Metric::FunctionEvals).unwrap();
        let at = |profile: &Profile, tau: f64| {
            profile
                .points
                .iter()
                .find(|(t, _)| *t == tau)
                .map(|(_, f)| *f)
                .unwrap()
        };
        let a = &profiles[0];
        let b = &profiles[1];
        // At tau = 1 (log2 = 0): a is best on p1 and ties on p2; b ties on
        // p2 and is alone on p3.
        assert_eq!(at(a, 0.0), 2.0 / 3.0);
        assert_eq!(at(b, 0.0), 2.0 / 3.0);
        // At tau = 2: b picks up p1; a never gets p3.
        assert_eq!(at(a, 1.0), 2.0 / 3.0);
        assert_eq!(at(b, 1.0), 1.0);
        assert_eq!(at(a, PROFILE_LOG2_MAX), 2.0 / 3.0);
        // Fractions never decrease.
        for profile in &profiles {
            for pair in profile.points.windows(2) {
                assert!(pair[0].0 < pair[1].0);
                assert!(pair[0].1 <= pair[1].1);
            }
        }
    }

    #[test]
    fn profile_excludes_problems_nobody_solved() {
        let records = vec![
            record("p1", "a", "opt", 2, 0.1),
            record("p1", "b", "opt", 2, 0.1),
            record("p2", "a", "itr", 50, 0.1),
            record("p2", "b", "err", 1, 0.1),
        ];
        let profiles =
            performance_profile(&records, &["a", "b"], Metric::FunctionEvals).unwrap();
        // Only p1 counts, and both solve it at the best cost.
        assert_eq!(profiles[0].points.last().unwrap().1, 1.0);
        assert_eq!(profiles[1].points.last().unwrap().1, 1.0);
    }

    #[test]
    fn factors_clip_and_flag_degenerate_metrics() {
        let records = vec![
            record("p1", "a", "opt", 2, 0.1),
            record("p1", "b", "opt", 8, 0.1),
            record("p2", "a", "opt", 64, 0.1),
            record("p2", "b", "opt", 2, 0.1),
            record("p3", "a", "opt", 0, 0.1),
            record("p3", "b", "opt", 4, 0.1),
        ];
        let entries =
            outperforming_factors(&records, "a", "b", Metric::FunctionEvals).unwrap();
        assert_eq!(entries[0].factor, 2.0); // -log2(2/8) = 2
        assert_eq!(entries[0].raw, 2.0);
        assert_eq!(entries[1].factor, -2.0); // -log2(64/2) = -5, clipped
        assert_eq!(entries[1].raw, -5.0); // ... with the raw value retained
        assert_eq!(entries[2].factor, 2.0); // floored 0 -> 1: -log2(1/4) = 2
        assert!(entries[2].degenerate);
        assert!(!entries[0].degenerate);
    }

    #[test]
    fn failed_solves_become_err_records_instead_of_aborting() {
        let mut problems = vec![suite::problem("hs6").unwrap(), suite::problem("hs7").unwrap()];
        // Break one problem's start point so its solve fails outright.
        problems[0].x0 = vec![1.0; 3];
        let records = run_suite(&problems, &["balls", "aalls"], &SolverConfig::default()).unwrap();
        assert_eq!(records.len(), 4);
        for record in &records {
            if record.problem == "hs6" {
                assert_eq!(record.flag, "err");
                assert!(!record.solved());
                assert_eq!(record.iters, 0);
                assert!(record.mu_final.is_nan());
            } else {
                assert_eq!(record.flag, "opt");
            }
        }
        // Failed runs carry no final penalty, so they are left out of the
        // histogram rather than dumped into the smallest bin.
        let bins = penalty_histogram(&records, "balls");
        assert_eq!(bins.iter().sum::<usize>(), 1);
        // An unknown variant name is still a caller error.
        assert!(run_suite(&problems, &["nope"], &SolverConfig::default()).is_err());
    }

    #[test]
    fn penalty_histogram_uses_decade_bins() {
        let records = vec![
            record("p1", "a", "opt", 2, 1.0),
            record("p2", "a", "opt", 2, 0.35),
            record("p3", "a", "opt", 2, 0.05),
            record("p4", "a", "inf", 2, 1e-9),
            record("p5", "b", "opt", 2, 1e-3),
        ];
        let bins = penalty_histogram(&records, "a");
        assert_eq!(bins, [1, 1, 1, 0, 0, 0, 0, 1]);
        assert_eq!(bins.iter().sum::<usize>(), 4);
        let bins_b = penalty_histogram(&records, "b");
        // 1e-3 is the left edge of [1e-3, 1e-2).
        assert_eq!(bins_b, [0, 0, 0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn summaries_aggregate_by_variant() {
        let records = vec![
            record("p1", "a", "opt", 2, 0.1),
            record("p2", "a", "itr", 4, 0.1),
            record("p1", "b", "inf", 6, 1e-9),
        ];
        let summaries = summarize(&records);
        assert_eq!(summaries.len(), 2);
        assert_eq!(summaries[0].variant, "a");
        assert_eq!(summaries[0].total, 2);
        assert_eq!(summaries[0].solved, 1);
        assert_eq!(summaries[0].itr, 1);
        assert_eq!(summaries[0].funcs, 6);
        assert_eq!(summaries[1].solved, 1);
        let mut buf = Vec::new();
        write_summary_json(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"variant\": \"a\""));
    }
}
