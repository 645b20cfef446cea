//! Operation-count benchmarking.
//!
//! Each record runs the HD's two ephemeral E-multiplications,
//! `(C, Id) ⋆ β` and `(C', Id) ⋆ β'`, with an [`OpCount`] attached, and
//! stores the Artin lengths next to the count. A least-squares line through
//! (|β| + |β'|, ops) then tests linearity.

use std::time::Instant;

use rand::Rng;

use crate::emult::{emult_counted, EMultState, OpCount};
use crate::keygen::{HomeDeviceSecret, SystemParams};
use crate::protocol::{hd_new_session, ProtocolError, SessionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRecord {
    pub artin_length_beta: usize,
    pub artin_length_beta_prime: usize,
    pub field_op_count: u64,
    /// Largest op count charged to one letter in this run.
    pub max_ops_per_letter: u64,
    pub wall_time_ns: u128,
}

impl BenchRecord {
    pub fn total_length(&self) -> usize {
        self.artin_length_beta + self.artin_length_beta_prime
    }

    pub const CSV_HEADER: &'static str =
        "artin_length_beta,artin_length_beta_prime,field_op_count,max_ops_per_letter,wall_time_ns";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.artin_length_beta,
            self.artin_length_beta_prime,
            self.field_op_count,
            self.max_ops_per_letter,
            self.wall_time_ns
        )
    }
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `max |y - ŷ| / y` over the samples.
    pub max_relative_residual: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_relative_residual = points
        .iter()
        .map(|&(x, y)| ((y - (slope * x + intercept)) / y).abs())
        .fold(0.0, f64::max);
    Some(LineFit {
        slope,
        intercept,
        max_relative_residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub n: usize,
    pub records: Vec<BenchRecord>,
    pub ops: LineFit,
    /// Informational only; wall time is noisy.
    pub wall: LineFit,
}

impl BenchReport {
    /// `3N + 2`, the worst single-letter cost of the column update.
    pub fn per_letter_bound(&self) -> u64 {
        3 * self.n as u64 + 2
    }

    pub fn max_ops_per_letter(&self) -> u64 {
        self.records
            .iter()
            .map(|r| r.max_ops_per_letter)
            .max()
            .unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(BenchRecord::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// One instrumented session.
pub fn measure_session<R: Rng + ?Sized>(
    params: &SystemParams,
    hd: &HomeDeviceSecret,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<BenchRecord, ProtocolError> {
    let session = hd_new_session(hd, params, cfg, rng)?;
    let f = params.field();
    let mut count = OpCount::default();
    let start = Instant::now();
    emult_counted(
        f,
        &EMultState::from_matrix(session.c().clone()),
        session.beta(),
        &hd.tvals,
        &mut count,
    )?;
    emult_counted(
        f,
        &EMultState::from_matrix(session.c_prime().clone()),
        session.beta_prime(),
        &hd.tvals,
        &mut count,
    )?;
    let wall_time_ns = start.elapsed().as_nanos();
    Ok(BenchRecord {
        artin_length_beta: session.beta().len(),
        artin_length_beta_prime: session.beta_prime().len(),
        field_op_count: count.total(),
        max_ops_per_letter: count.max_per_letter,
        wall_time_ns,
    })
}

/// Sweeps total Artin length from `min_len` to `max_len` over `runs`
/// evenly spaced targets. Factor counts are scaled from a calibration run;
/// the fit uses the lengths actually produced.
pub fn run_sweep<R: Rng + ?Sized>(
    params: &SystemParams,
    hd: &HomeDeviceSecret,
    min_len: usize,
    max_len: usize,
    runs: usize,
    rng: &mut R,
) -> Result<BenchReport, ProtocolError> {
    if runs < 2 || min_len == 0 || max_len <= min_len {
        return Err(ProtocolError::Domain("degenerate sweep"));
    }
    // Total length is roughly affine in k for the (k, k/2) shape; calibrate both
    // coefficients since pure factors are shorter than mixed ones.
    let shape = |k: usize| SessionConfig {
        beta_factors: k,
        pure_insertions: (k / 2).max(1),
    };
    let mut calib = Vec::new();
    for k in [8, 64] {
        for _ in 0..4 {
            calib.push((
                k as f64,
                measure_session(params, hd, &shape(k), rng)?.total_length() as f64,
            ));
        }
    }
    let len_fit = fit_line(&calib).ok_or(ProtocolError::Domain("degenerate sweep"))?;
    let mut records = Vec::with_capacity(runs);
    for j in 0..runs {
        let target = min_len as f64 + (max_len - min_len) as f64 * j as f64 / (runs - 1) as f64;
        let k = (((target - len_fit.intercept) / len_fit.slope.max(1.0)).round() as usize).max(1);
        let cfg = shape(k);
        records.push(measure_session(params, hd, &cfg, rng)?);
    }
    let ops = fit_line(
        &records
            .iter()
            .map(|r| (r.total_length() as f64, r.field_op_count as f64))
            .collect::<Vec<_>>(),
    )
    .ok_or(ProtocolError::Domain("degenerate sweep"))?;
    let wall = fit_line(
        &records
            .iter()
            .map(|r| (r.total_length() as f64, r.wall_time_ns as f64))
            .collect::<Vec<_>>(),
    )
    .ok_or(ProtocolError::Domain("degenerate sweep"))?;
    Ok(BenchReport {
        n: params.n(),
        records,
        ops,
        wall,
    })
}
