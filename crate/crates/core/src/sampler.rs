//! Monte Carlo oracle for the quadrature engine.
//!
//! Draws dependent uniform vectors from each copula family, pushes them
//! through marginal quantiles, and reduces the log-sum mod 1. Everything
//! is keyed by (seed, block) substreams of the counter RNG, so batches
//! are bit-reproducible and blocks can be generated in any order.

use rayon::prelude::*;

use crate::copulas::{CopulaSpec, SamplingMethod};
use crate::error::{Error, Result};
use crate::marginals::LogMarginal;
use crate::rng::CounterRng;

const BLOCK: usize = 8192;

/// Dependent uniform draws: `count` rows of dimension `n`.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub copula: CopulaSpec,
    pub seed: u64,
    pub count: usize,
    data: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.copula.dimension();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        let n = self.copula.dimension();
        self.data.iter().skip(j).step_by(n).copied()
    }
}

// one conditional-inversion draw: solve C_{2|1}(t | u1) = w for t
fn invert_conditional(copula: &CopulaSpec, u1: f64, w: f64) -> Result<f64> {
    let cond = |t: f64| -> Result<f64> { copula.conditional_cdf(&[u1, t], 1) };
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    let (mut flo, mut fhi) = (cond(lo)? - w, cond(hi)? - w);
    if flo >= 0.0 {
        return Ok(lo);
    }
    if fhi <= 0.0 {
        return Ok(hi);
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let fmid = cond(mid)? - w;
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid < 0.0 {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    // secant polish inside the bracket
    let mut x = lo - flo * (hi - lo) / (fhi - flo);
    for _ in 0..8 {
        if !(lo..=hi).contains(&x) {
            x = 0.5 * (lo + hi);
        }
        let fx = cond(x)? - w;
        if fx.abs() < 1e-13 {
            break;
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        x = lo - flo * (hi - lo) / (fhi - flo);
    }
    Ok(x.clamp(1e-12, 1.0 - 1e-12))
}

fn fill_block(copula: &CopulaSpec, rng: &mut CounterRng, rows: usize, out: &mut Vec<f64>) {
    let n = copula.dimension();
    let alpha = copula.alpha();
    match copula.sampling() {
        SamplingMethod::PlainUniform => {
            for _ in 0..rows * n {
                out.push(rng.uniform());
            }
        }
        SamplingMethod::GammaFrailty => {
            // Clayton, alpha > 0: U_i = (1 + E_i / W)^(-1/alpha) with
            // W ~ Gamma(1/alpha); psi here is the Laplace transform of W
            for _ in 0..rows {
                let w = rng.gamma(1.0 / alpha);
                for _ in 0..n {
                    let e = rng.exponential();
                    out.push((1.0 + e / w).powf(-1.0 / alpha));
                }
            }
        }
        SamplingMethod::ConditionalInversion => {
            for _ in 0..rows {
                let u1 = rng.uniform();
                let w = rng.uniform();
                let u2 = invert_conditional(copula, u1, w).unwrap_or(w);
                out.push(u1);
                out.push(u2);
            }
        }
        SamplingMethod::Unavailable => unreachable!("checked in sample_copula"),
    }
}

/// Draw `count` dependent uniform vectors; deterministic given `seed`.
pub fn sample_copula(copula: &CopulaSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Ok(SampleBatch {
            copula: *copula,
            seed,
            count: 0,
            data: Vec::new(),
        });
    }
    if copula.sampling() == SamplingMethod::Unavailable {
        return Err(Error::Unsupported(format!(
            "no validated sampler for {} alpha={} n={}; the quadrature path remains usable",
            copula.family_name(),
            copula.alpha(),
            copula.dimension()
        )));
    }
    let n = copula.dimension();
    let blocks = count.div_ceil(BLOCK);
    let chunks: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let rows = BLOCK.min(count - b * BLOCK);
            let mut rng = CounterRng::substream(seed, b as u64);
            let mut out = Vec::with_capacity(rows * n);
            fill_block(copula, &mut rng, rows, &mut out);
            out
        })
        .collect();
    let mut data = Vec::with_capacity(count * n);
    for c in chunks {
        data.extend_from_slice(&c);
    }
    Ok(SampleBatch {
        copula: *copula,
        seed,
        count,
        data,
    })
}

/// Wrapped log-significand samples of the product.
#[derive(Debug, Clone)]
pub struct ProductSamples {
    pub values: Vec<f64>,
    /// rows dropped because a marginal quantile failed to invert
    pub excluded: usize,
}

pub fn sample_products(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    count: usize,
    seed: u64,
) -> Result<ProductSamples> {
    if marginals.len() != copula.dimension() {
        return Err(Error::DimensionMismatch {
            expected: copula.dimension(),
            got: marginals.len(),
        });
    }
    let batch = sample_copula(copula, count, seed)?;
    let mut values = Vec::with_capacity(count);
    let mut excluded = 0;
    for i in 0..batch.count {
        let mut sum = 0.0;
        let mut ok = true;
        for (m, &u) in marginals.iter().zip(batch.row(i)) {
            match m.quantile(u) {
                Ok(x) => sum += x,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            values.push(sum.rem_euclid(1.0));
        } else {
            excluded += 1;
        }
    }
    Ok(ProductSamples { values, excluded })
}

/// Density-normalized histogram on [0,1): heights integrate to 1.
pub fn empirical_wrapped_pdf(samples: &[f64], bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "histogram needs >= 2 bins, got {bins}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples to histogram".into()));
    }
    let mut counts = vec![0u64; bins];
    for &s in samples {
        let b = ((s * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let scale = bins as f64 / samples.len() as f64;
    Ok(counts.iter().map(|&c| c as f64 * scale).collect())
}

/// Leading-digit counts of sampled wrapped log-significands.
pub fn digit_counts(samples: &[f64], base: u32) -> Vec<u64> {
    let mut counts = vec![0u64; (base - 1) as usize];
    let logb = (base as f64).ln();
    for &s in samples {
        // s = log_B significand, digit = floor(B^s)
        let d = ((s * logb).exp().floor() as u32).clamp(1, base - 1);
        counts[(d - 1) as usize] += 1;
    }
    counts
}

/// Kolmogorov-Smirnov distance of the sample from Uniform[0,1).
pub fn ks_uniform(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        d = d.max((x - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - x).abs());
    }
    d
}

// merge sort that counts inversions of `y`
fn count_inversions(y: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = y.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = y.split_at_mut(mid);
    let mut inv = count_inversions(left, buf) + count_inversions(right, buf);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            buf[k] = right[j];
            inv += (left.len() - i) as u64;
            j += 1;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    y.copy_from_slice(&buf[..n]);
    inv
}

/// Kendall's tau for continuous data (no tie handling).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let q = count_inversions(&mut ys, &mut buf);
    1.0 - 4.0 * q as f64 / (n as f64 * (n as f64 - 1.0))
}
