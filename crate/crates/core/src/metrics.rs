//! Distance-from-Benford metrics and chi-square diagnostics.
//!
//! The wrapped log-significand PDF of an exactly Benford product is
//! identically 1, so most metrics here measure departures from the
//! constant-1 density: the pointwise eps_s = |1 - pdf(s)|, its L1
//! integral, and two chi-square statistics (grid and leading-digit).
//! The copula-density L1 norm upper-bounds the L1 distance between the
//! dependent wrapped PDF and the independence-copula wrapped PDF of the
//! same marginals (which coincides with the Benford distance when some
//! marginal is exactly Benford); the Markov-inequality measure bound is
//! derived from that norm and checked against the same baseline.
//!
//! Chi-square verdicts are reported under two conventions. The source
//! convention compares the raw sum of squared grid deviations against
//! 2.6 (11 dof) and the digit statistic against 1.3 (8 dof); those cut
//! offs do not correspond to standard chi-square tables, so the standard
//! critical values at significance 0.005 are reported alongside.

use serde::Serialize;

use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::LogMarginal;
use crate::qmc;
use crate::rng::CounterRng;
use crate::special;
use crate::wrapped::WrappedPdfEstimate;

/// Source-convention thresholds (see module docs).
pub const SOURCE_GRID_THRESHOLD: f64 = 2.6;
pub const SOURCE_DIGIT_THRESHOLD: f64 = 1.3;
pub const STANDARD_SIGNIFICANCE: f64 = 0.005;

/// A chi-square statistic with verdicts under both threshold conventions.
#[derive(Debug, Clone, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    /// statistic / dof
    pub per_dof: f64,
    /// statistic / number of cells
    pub per_cell: f64,
    pub source_threshold: f64,
    pub below_source_threshold: bool,
    pub standard_critical: f64,
    pub below_standard_critical: bool,
    pub p_value: f64,
}

impl ChiSquare {
    fn new(statistic: f64, dof: usize, cells: usize, source_threshold: f64) -> Self {
        let standard_critical = special::chi2_critical(dof, STANDARD_SIGNIFICANCE);
        ChiSquare {
            statistic,
            dof,
            per_dof: statistic / dof as f64,
            per_cell: statistic / cells as f64,
            source_threshold,
            below_source_threshold: statistic <= source_threshold,
            standard_critical,
            below_standard_critical: statistic <= standard_critical,
            p_value: special::chi2_sf(statistic, dof),
        }
    }
}

/// P(leading digit = d) under Benford's law base B.
pub fn benford_digit_prob(d: u32, base: u32) -> Result<f64> {
    if base < 2 || d < 1 || d >= base {
        return Err(Error::InvalidParameter(format!(
            "digit must satisfy 1 <= d < B with B >= 2, got d={d} B={base}"
        )));
    }
    Ok(((d + 1) as f64 / d as f64).log(base as f64))
}

/// Pointwise distance eps_s = |1 - pdf(s_j)|.
pub fn epsilon_at(estimate: &WrappedPdfEstimate, s_index: usize) -> Result<f64> {
    estimate
        .values
        .get(s_index)
        .map(|&v| (1.0 - v).abs())
        .ok_or_else(|| Error::InvalidParameter(format!("grid index {s_index} out of range")))
}

/// L1 distance of the wrapped PDF from the Benford density, by the
/// periodic trapezoid rule on the estimate's grid.
pub fn l1_benford_distance(estimate: &WrappedPdfEstimate) -> f64 {
    let m = estimate.values.len() as f64;
    estimate.values.iter().map(|&v| (1.0 - v).abs()).sum::<f64>() / m
}

/// L1 norm of 1 - c over the unit cube by randomized QMC. By the change
/// of variables through the marginal CDFs this equals the marginal
/// weighted real-line integral, so it is marginal-independent. It upper
/// bounds the L1 distance between the dependent wrapped PDF and the one
/// obtained from the same marginals under independence; when a marginal
/// is exactly Benford the latter is identically 1 and the bound reads as
/// a distance from the Benford density.
pub fn l1_copula_norm(copula: &CopulaSpec, log2_points: u32, seed: u64) -> Result<qmc::QmcEstimate> {
    if copula.is_independence() {
        return Ok(qmc::QmcEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let n = copula.dimension();
    let est = qmc::integrate_unit_cube(
        |u| match copula.density(u) {
            Ok(c) => (1.0 - c).abs(),
            Err(_) => 0.0,
        },
        n,
        log2_points,
        8,
        seed,
    );
    if !est.value.is_finite() {
        return Err(Error::NonConvergent("copula norm integral diverged".into()));
    }
    Ok(est)
}

/// Plain Monte Carlo estimate of the same norm (dual-estimator oracle).
pub fn l1_copula_norm_mc(copula: &CopulaSpec, count: u64, seed: u64) -> Result<qmc::QmcEstimate> {
    let n = copula.dimension();
    let mut rng = CounterRng::substream(seed, 0x4d43);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut u = vec![0.0; n];
    for _ in 0..count {
        for slot in u.iter_mut() {
            *slot = rng.uniform();
        }
        let y = (1.0 - copula.density(&u)?).abs();
        sum += y;
        sum_sq += y * y;
    }
    let mean = sum / count as f64;
    let var = (sum_sq / count as f64 - mean * mean).max(0.0);
    Ok(qmc::QmcEstimate {
        value: mean,
        std_error: (var / count as f64).sqrt(),
    })
}

/// Markov bound on the measure of {s : eps_s >= eps}, capped at 1.
pub fn markov_bound_from_norm(norm: f64, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "markov bound needs eps > 0, got {eps}"
        )));
    }
    Ok((norm / eps).min(1.0))
}

pub fn markov_bound(copula: &CopulaSpec, eps: f64, seed: u64) -> Result<f64> {
    let norm = l1_copula_norm(copula, 15, seed)?;
    markov_bound_from_norm(norm.value, eps)
}

/// Grid statistic: sum over grid points of (pdf(s_j) - 1)^2, with m - 1
/// degrees of freedom.
pub fn chi_square_grid(estimate: &WrappedPdfEstimate) -> Result<ChiSquare> {
    let m = estimate.values.len();
    if m < 2 {
        return Err(Error::InvalidParameter("grid statistic needs m >= 2".into()));
    }
    let stat: f64 = estimate.values.iter().map(|&v| (v - 1.0) * (v - 1.0)).sum();
    Ok(ChiSquare::new(stat, m - 1, m, SOURCE_GRID_THRESHOLD))
}

/// Digit statistic on model proportions: Pearson sum of
/// (p_d - benford_d)^2 / benford_d over d = 1..B-1, with B - 2 dof.
pub fn chi_square_digits(digit_probs: &[f64], base: u32) -> Result<ChiSquare> {
    if base < 3 {
        return Err(Error::InvalidParameter(format!(
            "digit statistic needs base >= 3 (at least one degree of freedom), got {base}"
        )));
    }
    if digit_probs.len() != (base - 1) as usize {
        return Err(Error::DimensionMismatch {
            expected: (base - 1) as usize,
            got: digit_probs.len(),
        });
    }
    let mut stat = 0.0;
    for (d, &p) in digit_probs.iter().enumerate() {
        let e = benford_digit_prob(d as u32 + 1, base)?;
        stat += (p - e) * (p - e) / e;
    }
    let cells = (base - 1) as usize;
    Ok(ChiSquare::new(stat, cells - 1, cells, SOURCE_DIGIT_THRESHOLD))
}

/// Digit statistic on empirical counts (standard Pearson scaling).
pub fn chi_square_digit_counts(counts: &[u64], base: u32) -> Result<ChiSquare> {
    if base < 3 {
        return Err(Error::InvalidParameter(format!(
            "digit statistic needs base >= 3 (at least one degree of freedom), got {base}"
        )));
    }
    if counts.len() != (base - 1) as usize {
        return Err(Error::DimensionMismatch {
            expected: (base - 1) as usize,
            got: counts.len(),
        });
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter("empty digit counts".into()));
    }
    let mut stat = 0.0;
    for (d, &obs) in counts.iter().enumerate() {
        let e = total as f64 * benford_digit_prob(d as u32 + 1, base)?;
        stat += (obs as f64 - e) * (obs as f64 - e) / e;
    }
    let cells = (base - 1) as usize;
    Ok(ChiSquare::new(stat, cells - 1, cells, SOURCE_DIGIT_THRESHOLD))
}

/// Leading-digit probabilities from the wrapped PDF: integrals of the
/// piecewise-linear grid interpolant over [log_B d, log_B (d+1)).
pub fn digit_probs_from_pdf(estimate: &WrappedPdfEstimate, base: u32) -> Result<Vec<f64>> {
    if base < 2 {
        return Err(Error::InvalidParameter(format!("base {base} < 2")));
    }
    let m = estimate.values.len();
    let h = 1.0 / m as f64;
    // integral of the periodic linear interpolant from 0 to t
    let interp_integral = |t: f64| -> f64 {
        let mut acc = 0.0;
        let mut j = 0;
        while ((j + 1) as f64) * h <= t + 1e-15 {
            let v0 = estimate.values[j % m];
            let v1 = estimate.values[(j + 1) % m];
            acc += 0.5 * (v0 + v1) * h;
            j += 1;
        }
        let t0 = j as f64 * h;
        if t > t0 {
            let v0 = estimate.values[j % m];
            let v1 = estimate.values[(j + 1) % m];
            let frac = (t - t0) / h;
            let vt = v0 + (v1 - v0) * frac;
            acc += 0.5 * (v0 + vt) * (t - t0);
        }
        acc
    };
    let logb = (base as f64).ln();
    let mut probs = Vec::with_capacity((base - 1) as usize);
    let mut prev = 0.0;
    for d in 1..base {
        let hi = if d == base - 1 {
            interp_integral(1.0)
        } else {
            interp_integral(((d + 1) as f64).ln() / logb)
        };
        probs.push((hi - prev).max(0.0));
        prev = hi;
    }
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        for p in probs.iter_mut() {
            *p /= total;
        }
    }
    Ok(probs)
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovRow {
    pub eps: f64,
    pub bound: f64,
    /// fraction of grid points where the dependent wrapped PDF differs
    /// from the independence baseline by at least eps (the set the
    /// copula-norm Markov bound controls)
    pub measured: f64,
    /// fraction of grid points with eps_s = |1 - pdf(s)| >= eps
    pub measured_vs_benford: f64,
}

/// Full metric bundle for one analysis run.
#[derive(Debug, Clone, Serialize)]
pub struct BenfordReport {
    pub base: u32,
    pub eps_grid: Vec<(f64, f64)>,
    pub eps_max: f64,
    pub l1_distance: f64,
    /// L1 distance between the dependent wrapped PDF and the wrapped PDF
    /// of the same marginals under the independence copula; this is the
    /// quantity the copula-norm bound controls
    pub l1_vs_independence: f64,
    pub l1_copula_norm: f64,
    pub l1_copula_norm_std_error: f64,
    pub tol_total: f64,
    /// l1_copula_norm (+ error allowances) - l1_vs_independence; the
    /// bound inequality holds when this is >= 0
    pub l1_bound_slack: f64,
    pub markov: Vec<MarkovRow>,
    pub digit_probs: Vec<f64>,
    pub chi2_grid: ChiSquare,
    pub chi2_digit: ChiSquare,
    /// true when some marginal is exactly Benford, the case in which the
    /// L1 bound reads as a distance from Benford behavior
    pub benford_marginal_present: bool,
}

impl BenfordReport {
    /// Build the metric bundle for a wrapped-PDF estimate. `tol` and
    /// `settings` are the engine parameters the estimate was produced
    /// with; they are reused to evaluate the independence baseline that
    /// the copula-norm bound is checked against.
    pub fn from_estimate(
        copula: &CopulaSpec,
        marginals: &[LogMarginal],
        estimate: &WrappedPdfEstimate,
        base: u32,
        seed: u64,
        tol: f64,
        settings: &crate::wrapped::EngineSettings,
    ) -> Result<BenfordReport> {
        estimate.check_normalization()?;
        let eps_grid: Vec<(f64, f64)> = estimate
            .s_grid
            .iter()
            .zip(&estimate.values)
            .map(|(&s, &v)| (s, (1.0 - v).abs()))
            .collect();
        let eps_max = eps_grid.iter().map(|e| e.1).fold(0.0, f64::max);
        let l1_distance = l1_benford_distance(estimate);
        let norm = l1_copula_norm(copula, 15, seed)?;
        let tol_total = estimate.tol_total();
        let m = estimate.values.len() as f64;

        // independence baseline on the same grid: the copula-norm bound
        // controls |pdf - baseline|, not |pdf - 1|, unless a marginal is
        // exactly Benford (then the baseline is identically 1)
        let baseline: std::borrow::Cow<'_, WrappedPdfEstimate> = if copula.is_independence() {
            std::borrow::Cow::Borrowed(estimate)
        } else {
            let ind = CopulaSpec::independence(copula.dimension())?;
            std::borrow::Cow::Owned(crate::wrapped::wrapped_pdf_grid(
                &ind,
                marginals,
                estimate.values.len(),
                tol,
                settings,
            )?)
        };
        let gap_grid: Vec<f64> = estimate
            .values
            .iter()
            .zip(&baseline.values)
            .map(|(&v, &b)| (v - b).abs())
            .collect();
        let l1_vs_independence = gap_grid.iter().sum::<f64>() / m;
        let bound_allowance = tol_total + baseline.tol_total() + 3.0 * norm.std_error;

        let markov = [0.01, 0.05, 0.1]
            .iter()
            .map(|&eps| {
                let bound = markov_bound_from_norm(norm.value, eps)?;
                let measured = gap_grid.iter().filter(|&&g| g >= eps).count() as f64 / m;
                let measured_vs_benford =
                    eps_grid.iter().filter(|e| e.1 >= eps).count() as f64 / m;
                Ok(MarkovRow {
                    eps,
                    bound,
                    measured,
                    measured_vs_benford,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let digit_probs = digit_probs_from_pdf(estimate, base)?;
        let chi2_grid = chi_square_grid(estimate)?;
        let chi2_digit = chi_square_digits(&digit_probs, base)?;
        Ok(BenfordReport {
            base,
            eps_grid,
            eps_max,
            l1_distance,
            l1_vs_independence,
            l1_copula_norm: norm.value,
            l1_copula_norm_std_error: norm.std_error,
            tol_total,
            l1_bound_slack: norm.value + bound_allowance - l1_vs_independence,
            markov,
            digit_probs,
            chi2_grid,
            chi2_digit,
            benford_marginal_present: marginals.iter().any(|m| m.is_exactly_benford()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wrapped::TruncationWindow;
    use approx::assert_relative_eq;

    fn flat_estimate(values: Vec<f64>) -> WrappedPdfEstimate {
        let m = values.len();
        WrappedPdfEstimate {
            s_grid: (0..m).map(|j| j as f64 / m as f64).collect(),
            quad_err: vec![1e-12; m],
            values,
            window: TruncationWindow {
                a: vec![-10.0],
                b: vec![10.0],
                c1: -20,
                c2: 20,
                err_bound: 1e-15,
                last_lo: -10.0,
                last_hi: 10.0,
                density_sup: 1.0,
            },
            converged: true,
        }
    }

    #[test]
    fn digit_prob_reference_values() {
        assert_relative_eq!(
            benford_digit_prob(1, 10).unwrap(),
            0.3010300,
            epsilon = 1e-7
        );
        assert_relative_eq!(
            benford_digit_prob(9, 10).unwrap(),
            0.0457575,
            epsilon = 1e-7
        );
        assert_eq!(benford_digit_prob(1, 2).unwrap(), 1.0);
        let total: f64 = (1..10).map(|d| benford_digit_prob(d, 10).unwrap()).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert!(benford_digit_prob(0, 10).is_err());
        assert!(benford_digit_prob(10, 10).is_err());
    }

    #[test]
    fn flat_grid_gives_zero_metrics() {
        let est = flat_estimate(vec![1.0; 12]);
        assert_eq!(epsilon_at(&est, 3).unwrap(), 0.0);
        assert_eq!(l1_benford_distance(&est), 0.0);
        let chi = chi_square_grid(&est).unwrap();
        assert_eq!(chi.statistic, 0.0);
        assert_eq!(chi.dof, 11);
        assert!(chi.below_source_threshold && chi.below_standard_critical);
        let probs = digit_probs_from_pdf(&est, 10).unwrap();
        for (d, &p) in probs.iter().enumerate() {
            assert_relative_eq!(
                p,
                benford_digit_prob(d as u32 + 1, 10).unwrap(),
                epsilon = 1e-9
            );
        }
        let chi_d = chi_square_digits(&probs, 10).unwrap();
        assert!(chi_d.statistic < 1e-15);
        assert_eq!(chi_d.dof, 8);
    }

    #[test]
    fn grid_statistic_counts_squared_deviations() {
        let mut v = vec![1.0; 12];
        v[0] = 1.5;
        v[6] = 0.8;
        let chi = chi_square_grid(&flat_estimate(v)).unwrap();
        assert_relative_eq!(chi.statistic, 0.25 + 0.04, epsilon = 1e-12);
        assert_relative_eq!(chi.per_cell, 0.29 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn epsilon_and_l1_on_perturbed_grid() {
        let mut v = vec![1.0; 10];
        v[2] = 1.2;
        v[7] = 0.9;
        let est = flat_estimate(v);
        assert_relative_eq!(epsilon_at(&est, 2).unwrap(), 0.2, epsilon = 1e-12);
        assert_relative_eq!(l1_benford_distance(&est), 0.03, epsilon = 1e-12);
        assert!(epsilon_at(&est, 10).is_err());
    }

    #[test]
    fn copula_norm_independence_and_limit() {
        let ind = CopulaSpec::independence(2).unwrap();
        assert_eq!(l1_copula_norm(&ind, 12, 1).unwrap().value, 0.0);
        let weak = CopulaSpec::new("clayton", 1e-4, 2).unwrap();
        let norm = l1_copula_norm(&weak, 14, 1).unwrap();
        assert!(norm.value < 1e-3, "norm {}", norm.value);
    }

    #[test]
    fn copula_norm_dual_estimators_agree() {
        let cop = CopulaSpec::new("clayton", 2.0, 2).unwrap();
        let a = l1_copula_norm(&cop, 15, 3).unwrap();
        let b = l1_copula_norm_mc(&cop, 300_000, 9).unwrap();
        assert!(a.value > 0.1);
        let se = (a.std_error * a.std_error + b.std_error * b.std_error).sqrt();
        assert!(
            (a.value - b.value).abs() <= 3.0 * se.max(1e-4),
            "qmc {} mc {} se {}",
            a.value,
            b.value,
            se
        );
    }

    #[test]
    fn markov_bound_caps_at_one() {
        assert_eq!(markov_bound_from_norm(0.0, 0.05).unwrap(), 0.0);
        assert_eq!(markov_bound_from_norm(0.3, 0.3).unwrap(), 1.0);
        assert_eq!(markov_bound_from_norm(5.0, 0.01).unwrap(), 1.0);
        assert_relative_eq!(
            markov_bound_from_norm(0.02, 0.1).unwrap(),
            0.2,
            epsilon = 1e-12
        );
        assert!(markov_bound_from_norm(0.1, 0.0).is_err());
    }

    #[test]
    fn digit_probs_partition_unity_and_base_changes() {
        let mut v = vec![1.0; 50];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = 1.0 + 0.3 * (std::f64::consts::TAU * j as f64 / 50.0).sin();
        }
        let est = flat_estimate(v);
        for base in [2u32, 8, 10] {
            let probs = digit_probs_from_pdf(&est, base).unwrap();
            assert_eq!(probs.len(), (base - 1) as usize);
            let total: f64 = probs.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-9);
            assert!(probs.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn digit_count_statistic_matches_proportions_scaling() {
        // exact Benford counts at N=10^6 give a near-zero statistic
        let n = 1_000_000u64;
        let counts: Vec<u64> = (1..10)
            .map(|d| (n as f64 * benford_digit_prob(d, 10).unwrap()).round() as u64)
            .collect();
        let chi = chi_square_digit_counts(&counts, 10).unwrap();
        assert!(chi.statistic < 1e-4);
        assert!(chi_square_digit_counts(&[0; 9], 10).is_err());
    }

    #[test]
    fn standard_critical_values_match_tables() {
        let chi = chi_square_grid(&flat_estimate(vec![1.0; 12])).unwrap();
        assert_relative_eq!(chi.standard_critical, 26.756848916469632, epsilon = 1e-6);
        let probs: Vec<f64> = (1..10)
            .map(|d| benford_digit_prob(d, 10).unwrap())
            .collect();
        let chi_d = chi_square_digits(&probs, 10).unwrap();
        assert_relative_eq!(chi_d.standard_critical, 21.954954990659534, epsilon = 1e-6);
    }
}
