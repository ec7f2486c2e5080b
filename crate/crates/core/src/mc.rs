//! Monte Carlo oracle for the analytic engines.
//!
//! Simulates growth-collapse trajectories and embedded chains, estimates raw
//! moments and plug-in cumulants with batch-means standard errors, and builds
//! analytic-vs-estimate comparison reports.
//!
//! Reproducibility contract: a fixed seed produces bit-identical estimates
//! across runs *and across thread counts*. Every sample index owns an
//! independent ChaCha stream (`set_stream(index)`), samples are grouped into
//! a fixed batch partition that does not depend on the worker count, batches
//! accumulate sequentially in sample order, and batch results are merged in
//! batch order. Floating-point addition order is therefore invariant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinatorics::cumulants_from_moments;
use crate::{Error, Result};

/// How a growth-collapse trajectory is evaluated.
///
/// Both methods consume the per-sample random stream identically and agree
/// pathwise up to float roundoff; they differ only in the arithmetic route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Accumulated-loss sum with backward product of retained fractions.
    SumFormula,
    /// Grow at unit slope; at each jump multiply the value by the cutoff.
    JumpRecursion,
}

/// Evaluation grid: times for the continuous process, jump indices for the
/// embedded chains.
#[derive(Debug, Clone)]
pub enum Grid {
    Times(Vec<f64>),
    Indices(Vec<usize>),
}

/// Simulation parameters. `seed` fixes every estimate bit-for-bit.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub lambda: f64,
    pub grid: Grid,
    pub samples: usize,
    pub seed: u64,
    /// Highest moment/cumulant order estimated (1..=8).
    pub n_max: usize,
    /// Batch count for batch-means standard errors (clamped to `samples`).
    pub batches: usize,
    pub method: Method,
}

impl SimConfig {
    pub fn new(lambda: f64, grid: Grid, samples: usize, seed: u64) -> Self {
        Self {
            lambda,
            grid,
            samples,
            seed,
            n_max: 4,
            batches: 100,
            method: Method::JumpRecursion,
        }
    }

    fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::InvalidConfig(m));
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return err(format!("lambda must be positive and finite, got {}", self.lambda));
        }
        if self.samples == 0 {
            return err("samples must be at least 1".into());
        }
        if self.n_max == 0 || self.n_max > 8 {
            return err(format!("n_max must be in 1..=8, got {}", self.n_max));
        }
        if self.batches == 0 {
            return err("batches must be at least 1".into());
        }
        match &self.grid {
            Grid::Times(t) => {
                if t.is_empty() {
                    return err("time grid must be nonempty".into());
                }
                if !t.iter().all(|x| x.is_finite() && *x >= 0.0) {
                    return err("time grid entries must be finite and nonnegative".into());
                }
                if t.windows(2).any(|w| w[0] > w[1]) {
                    return err("time grid must be sorted ascending".into());
                }
            }
            Grid::Indices(m) => {
                if m.is_empty() {
                    return err("index grid must be nonempty".into());
                }
                if m[0] == 0 {
                    return err("chain indices start at 1".into());
                }
                if m.windows(2).any(|w| w[0] >= w[1]) {
                    return err("index grid must be strictly ascending".into());
                }
            }
        }
        Ok(())
    }
}

/// Raw power sums `Σ x, Σ x², …` over one batch of samples.
#[derive(Debug, Clone)]
pub struct PowerSums {
    pub count: usize,
    /// `sums[j-1] = Σ x^j`, orders `1..=n_max`.
    pub sums: Vec<f64>,
}

impl PowerSums {
    fn zero(n_max: usize) -> Self {
        Self {
            count: 0,
            sums: vec![0.0; n_max],
        }
    }

    fn accumulate(&mut self, x: f64) {
        self.count += 1;
        let mut p = 1.0;
        for s in &mut self.sums {
            p *= x;
            *s += p;
        }
    }
}

/// Moment and cumulant estimates with standard errors at one grid point.
#[derive(Debug, Clone)]
pub struct PointEstimate {
    /// Grid coordinate (time, or chain index as a float).
    pub grid: f64,
    pub samples: usize,
    /// Raw moment estimates `μ̂_1..μ̂_n`.
    pub moments: Vec<f64>,
    pub moment_ses: Vec<f64>,
    /// Plug-in cumulants: the exact moment/cumulant inversion applied to `μ̂`.
    pub cumulants: Vec<f64>,
    pub cumulant_ses: Vec<f64>,
}

/// Estimates over a whole grid, plus any configuration warnings.
#[derive(Debug, Clone)]
pub struct EstimatedMoments {
    pub points: Vec<PointEstimate>,
    pub samples: usize,
    pub n_max: usize,
    pub warnings: Vec<String>,
}

/// Estimates for both embedded chains on a shared index grid.
#[derive(Debug, Clone)]
pub struct EmbeddedEstimates {
    pub y: EstimatedMoments,
    pub x: EstimatedMoments,
}

/// Cumulant (and moment) estimates from per-batch power sums.
#[derive(Debug, Clone)]
pub struct CumulantEstimate {
    pub count: usize,
    pub batches_used: usize,
    pub moments: Vec<f64>,
    pub moment_ses: Vec<f64>,
    pub cumulants: Vec<f64>,
    pub cumulant_ses: Vec<f64>,
}

/// Plug-in moments and cumulants with batch-means standard errors.
///
/// Full-sample moments come from the ordered sum of all batch sums; the
/// cumulants apply the exact moment/cumulant inversion to those moments.
/// Standard errors are the spread of the per-batch plug-in statistics:
/// `SE = sd(batch statistic)/√K` over the `K` nonempty batches (batch sizes
/// are equal up to one sample). With `K < 2` the standard errors are
/// infinite: one batch carries no spread information.
pub fn estimate_cumulants(batch_sums: &[PowerSums], n: usize) -> Result<CumulantEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("cumulant order must be >= 1".into()));
    }
    if batch_sums.iter().any(|b| b.sums.len() < n) {
        return Err(Error::InvalidArgument(format!(
            "power sums hold fewer than {n} orders"
        )));
    }
    let count: usize = batch_sums.iter().map(|b| b.count).sum();
    if count == 0 {
        return Err(Error::InvalidArgument(
            "cannot estimate from zero samples".into(),
        ));
    }
    let mut totals = vec![0.0; n];
    for b in batch_sums {
        for (t, s) in totals.iter_mut().zip(&b.sums) {
            *t += s;
        }
    }
    let moments: Vec<f64> = totals.iter().map(|s| s / count as f64).collect();
    let cumulants = cumulants_from_moments(&moments)?;

    let (batch_moments, batch_cumulants): (Vec<Vec<f64>>, Vec<Vec<f64>>) = batch_sums
        .iter()
        .filter(|b| b.count > 0)
        .map(|b| {
            let mu: Vec<f64> = b.sums[..n].iter().map(|s| s / b.count as f64).collect();
            let kappa = cumulants_from_moments(&mu).expect("nonempty moment list");
            (mu, kappa)
        })
        .unzip();
    let k = batch_moments.len();
    let spread = |rows: &[Vec<f64>], j: usize| -> f64 {
        if k < 2 {
            return f64::INFINITY;
        }
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / k as f64;
        let ss = rows
            .iter()
            .map(|r| {
                let d = r[j] - mean;
                d * d
            })
            .sum::<f64>();
        (ss / ((k * (k - 1)) as f64)).sqrt()
    };
    let moment_ses = (0..n).map(|j| spread(&batch_moments, j)).collect();
    let cumulant_ses = (0..n).map(|j| spread(&batch_cumulants, j)).collect();
    Ok(CumulantEstimate {
        count,
        batches_used: k,
        moments,
        moment_ses,
        cumulants,
        cumulant_ses,
    })
}

fn exp_draw(rng: &mut ChaCha8Rng, lambda: f64) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / lambda
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Writes `X_t` at each grid time for one trajectory into `out`.
fn gc_path(
    rng: &mut ChaCha8Rng,
    lambda: f64,
    times: &[f64],
    method: Method,
    jumps: &mut Vec<(f64, f64)>,
    out: &mut Vec<f64>,
) {
    out.clear();
    match method {
        Method::JumpRecursion => {
            let mut x = 0.0;
            let mut t_prev = 0.0;
            let mut g = 0;
            loop {
                let t_next = t_prev + exp_draw(rng, lambda);
                while g < times.len() && times[g] < t_next {
                    out.push(x + (times[g] - t_prev));
                    g += 1;
                }
                if g == times.len() {
                    return;
                }
                let u: f64 = rng.gen();
                x = (x + (t_next - t_prev)) * u;
                t_prev = t_next;
            }
        }
        Method::SumFormula => {
            let t_max = *times.last().unwrap();
            jumps.clear();
            let mut t = 0.0;
            loop {
                t += exp_draw(rng, lambda);
                if t > t_max {
                    break;
                }
                jumps.push((t, rng.gen()));
            }
            for &tg in times {
                let n = jumps.partition_point(|&(tj, _)| tj <= tg);
                let mut y = 0.0;
                let mut prod = 1.0;
                for &(tk, uk) in jumps[..n].iter().rev() {
                    y += tk * (1.0 - uk) * prod;
                    prod *= uk;
                }
                out.push(tg - y);
            }
        }
    }
}

/// One embedded-chain trajectory: `(T_m, Y(m))` at each requested index,
/// via the recursion `Y(m) = U_m·Y(m−1) + T_m·(1 − U_m)`.
fn embedded_path(
    rng: &mut ChaCha8Rng,
    lambda: f64,
    indices: &[usize],
    out: &mut Vec<(f64, f64)>,
) {
    out.clear();
    let m_max = *indices.last().unwrap();
    let mut t = 0.0;
    let mut y = 0.0;
    let mut gi = 0;
    for m in 1..=m_max {
        t += exp_draw(rng, lambda);
        let u: f64 = rng.gen();
        y = u * y + t * (1.0 - u);
        if gi < indices.len() && indices[gi] == m {
            out.push((t, y));
            gi += 1;
        }
    }
}

/// Fixed batch partition: sizes equal up to one sample, independent of the
/// worker count.
fn batch_ranges(samples: usize, batches: usize) -> Vec<(usize, usize)> {
    let k = batches.min(samples);
    let base = samples / k;
    let extra = samples % k;
    let mut ranges = Vec::with_capacity(k);
    let mut start = 0;
    for b in 0..k {
        let len = base + usize::from(b < extra);
        ranges.push((start, start + len));
        start += len;
    }
    ranges
}

fn clamp_warning(config: &SimConfig) -> Vec<String> {
    if config.samples < config.batches {
        vec![format!(
            "batch count reduced from {} to {} (fewer samples than batches)",
            config.batches, config.samples
        )]
    } else {
        Vec::new()
    }
}

fn assemble(
    grid_coords: &[f64],
    per_grid_batches: Vec<Vec<PowerSums>>,
    config: &SimConfig,
) -> Result<EstimatedMoments> {
    let mut points = Vec::with_capacity(grid_coords.len());
    for (coord, batches) in grid_coords.iter().zip(per_grid_batches) {
        let est = estimate_cumulants(&batches, config.n_max)?;
        points.push(PointEstimate {
            grid: *coord,
            samples: est.count,
            moments: est.moments,
            moment_ses: est.moment_ses,
            cumulants: est.cumulants,
            cumulant_ses: est.cumulant_ses,
        });
    }
    Ok(EstimatedMoments {
        points,
        samples: config.samples,
        n_max: config.n_max,
        warnings: clamp_warning(config),
    })
}

/// Simulates the growth-collapse process and estimates moments/cumulants of
/// `X_t` at each grid time.
pub fn simulate_gc(config: &SimConfig) -> Result<EstimatedMoments> {
    config.validate()?;
    let times = match &config.grid {
        Grid::Times(t) => t.clone(),
        Grid::Indices(_) => {
            return Err(Error::InvalidConfig(
                "simulate_gc needs a time grid, not chain indices".into(),
            ))
        }
    };
    let ranges = batch_ranges(config.samples, config.batches);
    // [batch][grid] accumulators, computed in parallel, merged in batch order.
    let per_batch: Vec<Vec<PowerSums>> = ranges
        .par_iter()
        .map(|&(start, end)| {
            let mut acc = vec![PowerSums::zero(config.n_max); times.len()];
            let mut jumps = Vec::new();
            let mut path = Vec::with_capacity(times.len());
            for i in start..end {
                let mut rng = sample_rng(config.seed, i);
                gc_path(&mut rng, config.lambda, &times, config.method, &mut jumps, &mut path);
                for (a, &x) in acc.iter_mut().zip(&path) {
                    a.accumulate(x);
                }
            }
            acc
        })
        .collect();
    let per_grid = transpose(per_batch, times.len());
    assemble(&times, per_grid, config)
}

/// Simulates the embedded chains and estimates moments/cumulants of both
/// `Y(m)` and `X(m) = T_m − Y(m)` at each requested index.
pub fn simulate_embedded(config: &SimConfig) -> Result<EmbeddedEstimates> {
    config.validate()?;
    let indices = match &config.grid {
        Grid::Indices(m) => m.clone(),
        Grid::Times(_) => {
            return Err(Error::InvalidConfig(
                "simulate_embedded needs chain indices, not a time grid".into(),
            ))
        }
    };
    let ranges = batch_ranges(config.samples, config.batches);
    let per_batch: Vec<(Vec<PowerSums>, Vec<PowerSums>)> = ranges
        .par_iter()
        .map(|&(start, end)| {
            let mut acc_y = vec![PowerSums::zero(config.n_max); indices.len()];
            let mut acc_x = vec![PowerSums::zero(config.n_max); indices.len()];
            let mut path = Vec::with_capacity(indices.len());
            for i in start..end {
                let mut rng = sample_rng(config.seed, i);
                embedded_path(&mut rng, config.lambda, &indices, &mut path);
                for (g, &(t, y)) in path.iter().enumerate() {
                    acc_y[g].accumulate(y);
                    acc_x[g].accumulate(t - y);
                }
            }
            (acc_y, acc_x)
        })
        .collect();
    let (batches_y, batches_x): (Vec<_>, Vec<_>) = per_batch.into_iter().unzip();
    let coords: Vec<f64> = indices.iter().map(|&m| m as f64).collect();
    Ok(EmbeddedEstimates {
        y: assemble(&coords, transpose(batches_y, indices.len()), config)?,
        x: assemble(&coords, transpose(batches_x, indices.len()), config)?,
    })
}

fn transpose(per_batch: Vec<Vec<PowerSums>>, grid_len: usize) -> Vec<Vec<PowerSums>> {
    let mut per_grid: Vec<Vec<PowerSums>> = (0..grid_len)
        .map(|_| Vec::with_capacity(per_batch.len()))
        .collect();
    for batch in per_batch {
        for (g, sums) in batch.into_iter().enumerate() {
            per_grid[g].push(sums);
        }
    }
    per_grid
}

/// Per-path trajectories `X_t` at each grid time (sequential; test scale).
pub fn gc_paths(config: &SimConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let times = match &config.grid {
        Grid::Times(t) => t.clone(),
        Grid::Indices(_) => {
            return Err(Error::InvalidConfig(
                "gc_paths needs a time grid, not chain indices".into(),
            ))
        }
    };
    let mut jumps = Vec::new();
    let mut out = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let mut rng = sample_rng(config.seed, i);
        let mut path = Vec::with_capacity(times.len());
        gc_path(&mut rng, config.lambda, &times, config.method, &mut jumps, &mut path);
        out.push(path);
    }
    Ok(out)
}

/// Per-path embedded trajectories `(T_m, Y(m))` at each requested index.
pub fn embedded_paths(config: &SimConfig) -> Result<Vec<Vec<(f64, f64)>>> {
    config.validate()?;
    let indices = match &config.grid {
        Grid::Indices(m) => m.clone(),
        Grid::Times(_) => {
            return Err(Error::InvalidConfig(
                "embedded_paths needs chain indices, not a time grid".into(),
            ))
        }
    };
    let mut out = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let mut rng = sample_rng(config.seed, i);
        let mut path = Vec::with_capacity(indices.len());
        embedded_path(&mut rng, config.lambda, &indices, &mut path);
        out.push(path);
    }
    Ok(out)
}

/// Analytic values on a grid, to be held against an estimate.
#[derive(Debug, Clone)]
pub struct GridValues {
    pub grid: f64,
    /// `κ⁽¹⁾..κ⁽ⁿ⁾` (or any statistics matching the estimate's cumulants).
    pub values: Vec<f64>,
}

/// One compared statistic at one grid point.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub grid: f64,
    pub statistic: String,
    pub analytic: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

/// Comparison verdict: every row must sit within `sigma` standard errors.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub sigma: f64,
    pub rows: Vec<CompareRow>,
    pub pass: bool,
}

/// Holds analytic cumulant values against estimated ones, point by point.
///
/// `z = (estimate − analytic)/stderr`; a zero standard error passes only on
/// exact agreement. Grids must match exactly.
pub fn compare(
    analytic: &[GridValues],
    estimated: &EstimatedMoments,
    sigma: f64,
) -> Result<CompareReport> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if analytic.len() != estimated.points.len() {
        return Err(Error::GridMismatch(format!(
            "analytic table has {} points, estimate has {}",
            analytic.len(),
            estimated.points.len()
        )));
    }
    let mut rows = Vec::new();
    for (a, e) in analytic.iter().zip(&estimated.points) {
        if a.grid != e.grid {
            return Err(Error::GridMismatch(format!(
                "analytic grid point {} vs estimated {}",
                a.grid, e.grid
            )));
        }
        if a.values.len() > e.cumulants.len() {
            return Err(Error::GridMismatch(format!(
                "analytic table holds {} statistics, estimate only {}",
                a.values.len(),
                e.cumulants.len()
            )));
        }
        for (j, &ana) in a.values.iter().enumerate() {
            let est = e.cumulants[j];
            let se = e.cumulant_ses[j];
            let diff = est - ana;
            let z = if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY * diff.signum()
            };
            let pass = z.is_finite() && z.abs() <= sigma;
            rows.push(CompareRow {
                grid: a.grid,
                statistic: format!("kappa_{}", j + 1),
                analytic: ana,
                estimate: est,
                stderr: se,
                z,
                pass,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(CompareReport { sigma, rows, pass })
}
