//! Parameter sweeps, region-of-interest analysis and the exhaustive oracle.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cse::{self, build_dag, eliminate_pairs};
use crate::error::{Error, Result};
use crate::expr::{AtomId, Expression, OpCount};
use crate::horner::{self, Direction, Scheme};
use crate::mcts::{self, Criterion, Schedule, SearchParams};

/// Number of equal-width `ln(cp)` bins used by [`roi`].
pub const ROI_BINS: usize = 50;

pub const DEFAULT_EPSILON: f64 = 0.05;

/// Exhaustive search refuses expressions with more variables than this.
pub const BRUTEFORCE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub cp_min: f64,
    pub cp_max: f64,
    pub samples: u64,
    pub n_updates: u64,
    pub criterion: Criterion,
    pub schedule: Schedule,
    pub direction: Direction,
    pub base_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cp_min > 0.0 && self.cp_min < self.cp_max && self.cp_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < cp_min < cp_max, got [{}, {}]",
                self.cp_min, self.cp_max
            )));
        }
        if self.samples == 0 || self.n_updates == 0 {
            return Err(Error::InvalidParameter(
                "samples and n_updates must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// The `C_p` of every sample, log-uniform in `[cp_min, cp_max]`. Drawn
    /// from stream 1 of the generator seeded with `base_seed`, so they do not
    /// overlap the search generators.
    pub fn cps(&self) -> Vec<f64> {
        let mut rng = mcts::rng_for(self.base_seed);
        rng.set_stream(1);
        let (lo, hi) = (libm::log(self.cp_min), libm::log(self.cp_max));
        (0..self.samples)
            .map(|_| libm::exp(lo + rng.gen::<f64>() * (hi - lo)))
            .collect()
    }
}

/// One MCTS run of a sweep; the field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sample: u64,
    pub cp: f64,
    pub criterion: Criterion,
    pub n_updates: u64,
    pub direction: Direction,
    pub seed: u64,
    pub ops_total: u64,
    pub ops_mul: u64,
    pub ops_add: u64,
    pub scheme: String,
}

pub const SWEEP_HEADER: &str =
    "sample,cp,criterion,n_updates,direction,seed,ops_total,ops_mul,ops_add,scheme";

/// Runs one single-repeat search per sample; sample `k` uses seed
/// `base_seed + k`. Rows come back in sample order.
pub fn run_sweep(e: &Expression, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    run_sweep_with(e, config, |_| {})
}

/// [`run_sweep`] with a callback after each finished row.
pub fn run_sweep_with(
    e: &Expression,
    config: &SweepConfig,
    mut on_row: impl FnMut(&SweepRow),
) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.samples as usize);
    for (k, cp) in config.cps().into_iter().enumerate() {
        let seed = config.base_seed.wrapping_add(k as u64);
        let params = SearchParams {
            cp,
            n_updates: config.n_updates,
            repeats: 1,
            criterion: config.criterion,
            schedule: config.schedule,
            direction: config.direction,
            seed,
        };
        let r = mcts::search(e, &params)?;
        let row = SweepRow {
            sample: k as u64,
            cp,
            criterion: config.criterion,
            n_updates: config.n_updates,
            direction: config.direction,
            seed,
            ops_total: r.best_delta.total(),
            ops_mul: r.best_delta.mul,
            ops_add: r.best_delta.add,
            scheme: r.best_scheme.to_text(e.atoms()),
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(SWEEP_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != SWEEP_HEADER {
        return Err(Error::InvalidParameter(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// The longest run of near-optimal `C_p` bins in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Roi {
    /// Width of the run in natural-log units of `C_p`.
    pub width: f64,
    /// `C_p` bounds of the run, if any bin qualified.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub global_min: u64,
    pub good_bins: usize,
    pub epsilon: f64,
}

/// Region of interest over `[cp_lo, cp_hi]`: the range is cut into
/// [`ROI_BINS`] equal bins of `ln(cp)`, a bin is good when its best run is
/// within `(1 + epsilon)` of the best run overall, and the longest contiguous
/// stretch of good bins is reported.
pub fn roi_in_range(rows: &[SweepRow], epsilon: f64, cp_lo: f64, cp_hi: f64) -> Roi {
    let global_min = rows.iter().map(|r| r.ops_total).min().unwrap_or(0);
    let empty = Roi {
        width: 0.0,
        lo: None,
        hi: None,
        global_min,
        good_bins: 0,
        epsilon,
    };
    if rows.is_empty() || !(cp_hi > cp_lo) {
        return empty;
    }
    let (lo, hi) = (libm::log(cp_lo), libm::log(cp_hi));
    let bin_width = (hi - lo) / ROI_BINS as f64;
    let mut bin_min = [u64::MAX; ROI_BINS];
    for r in rows {
        let b = (((libm::log(r.cp) - lo) / bin_width).floor().max(0.0) as usize).min(ROI_BINS - 1);
        bin_min[b] = bin_min[b].min(r.ops_total);
    }
    let threshold = (1.0 + epsilon) * global_min as f64;
    let good: Vec<bool> = bin_min
        .iter()
        .map(|&m| m != u64::MAX && m as f64 <= threshold)
        .collect();
    let (mut best_start, mut best_len, mut start) = (0, 0, 0);
    for i in 0..=ROI_BINS {
        if i < ROI_BINS && good[i] {
            continue;
        }
        if i - start > best_len {
            best_start = start;
            best_len = i - start;
        }
        start = i + 1;
    }
    if best_len == 0 {
        return Roi {
            good_bins: 0,
            ..empty
        };
    }
    Roi {
        width: best_len as f64 * bin_width,
        lo: Some(libm::exp(lo + best_start as f64 * bin_width)),
        hi: Some(libm::exp(lo + (best_start + best_len) as f64 * bin_width)),
        global_min,
        good_bins: good.iter().filter(|&&g| g).count(),
        epsilon,
    }
}

/// [`roi_in_range`] over the range of `C_p` values present in `rows`.
pub fn roi(rows: &[SweepRow], epsilon: f64) -> Roi {
    let lo = rows.iter().map(|r| r.cp).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.cp).fold(f64::NEG_INFINITY, f64::max);
    roi_in_range(rows, epsilon, lo, hi)
}

pub fn roi_width(rows: &[SweepRow], epsilon: f64) -> f64 {
    roi(rows, epsilon).width
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub best: OpCount,
    pub scheme: Scheme,
    pub evaluated: u64,
}

/// Scores every full ordering of the variables in lexicographic order of
/// atom ids and keeps the first minimum.
pub fn bruteforce(e: &Expression, direction: Direction) -> Result<BruteForceResult> {
    let mut order = e.variables();
    if order.is_empty() {
        return Err(Error::EmptyExpression);
    }
    if order.len() > BRUTEFORCE_LIMIT {
        return Err(Error::TooManyVariables {
            found: order.len(),
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut best: Option<(OpCount, Vec<AtomId>)> = None;
    let mut evaluated = 0;
    loop {
        let ops = cse::simplify(e, &Scheme::new(order.clone(), direction))?.ops;
        evaluated += 1;
        if best.as_ref().is_none_or(|(b, _)| ops.total() < b.total()) {
            best = Some((ops, order.clone()));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let (best, order) = best.unwrap();
    Ok(BruteForceResult {
        best,
        scheme: Scheme::new(order, direction),
        evaluated,
    })
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|x| *x > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Operation counts at each stage of the pipeline for one scheme.
#[derive(Debug, Clone)]
pub struct SimplifyReport {
    pub scheme: Scheme,
    pub naive: OpCount,
    pub horner: OpCount,
    pub cse: OpCount,
    pub horner_form: String,
    pub listing: String,
}

pub fn simplify_report(e: &Expression, scheme: &Scheme) -> Result<SimplifyReport> {
    let tree = horner::apply_scheme(e, scheme)?;
    let dag = eliminate_pairs(&build_dag(&tree));
    let horner_form = tree.display(e.atoms()).to_string();
    Ok(SimplifyReport {
        scheme: scheme.clone(),
        naive: e.naive_op_count(),
        horner: tree.op_count(),
        cse: dag.op_count(),
        horner_form,
        listing: dag.listing(e.atoms()),
    })
}
