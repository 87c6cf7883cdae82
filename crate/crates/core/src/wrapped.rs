//! The wrapped log-significand PDF.
//!
//! For U_i = log_B X_i with joint dependence given by an Archimedean
//! copula, the density of (sum U_i) mod 1 at s is
//!
//!   sum_k  int c(F_1(u_1), .., F_n(u_n)) prod_i f_i(u_i) du_1..du_{n-1}
//!
//! with u_n = s + k - (u_1 + .. + u_{n-1}). The infinite sum and improper
//! integrals are truncated to a finite wrap-index range and box, and the
//! discarded mass is certified: the certificate multiplies a sampled
//! supremum of the copula density (inflated x10) by marginal tail masses,
//! assuming unimodal marginal densities with decaying tails.

use rayon::prelude::*;
use serde::Serialize;

use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::LogMarginal;
use crate::qmc;
use crate::quad;

/// Integration box, wrap-index range and certified truncation bound.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationWindow {
    /// Lower integration limits for u_1..u_{n-1}.
    pub a: Vec<f64>,
    /// Upper integration limits for u_1..u_{n-1}.
    pub b: Vec<f64>,
    /// Wrap-index range: k runs over c1..=c2.
    pub c1: i64,
    pub c2: i64,
    /// Upper bound on |E_{a,b,c}(s)| uniform over s in [0,1].
    pub err_bound: f64,
    /// Tail window of the constrained marginal U_n (used to skip k terms).
    pub last_lo: f64,
    pub last_hi: f64,
    /// Sampled supremum of the copula density (already inflated x10).
    pub density_sup: f64,
}

/// Quadrature/QMC configuration for the engine.
#[derive(Debug, Clone)]
pub struct EngineSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    pub qmc_log2_points: u32,
    pub qmc_shifts: u32,
    pub qmc_seed: u64,
}

impl Default for EngineSettings {
    fn default() -> Self {
        EngineSettings {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_intervals: 1500,
            qmc_log2_points: 16,
            qmc_shifts: 8,
            qmc_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PointEstimate {
    pub value: f64,
    pub quad_err: f64,
    /// false when adaptive refinement hit its subdivision cap.
    pub converged: bool,
}

/// PDF estimates on an equally spaced s-grid.
#[derive(Debug, Clone, Serialize)]
pub struct WrappedPdfEstimate {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub quad_err: Vec<f64>,
    pub window: TruncationWindow,
    pub converged: bool,
}

impl WrappedPdfEstimate {
    /// Trapezoid integral over the period (= grid mean for a periodic grid).
    pub fn grid_integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Total tolerance for the normalization invariant: truncation bound,
    /// worst quadrature error and a grid-discretization allowance. The
    /// allowance is the periodic-trapezoid curvature bound h^2/12 int|f''|,
    /// estimated from second differences, doubled for safety.
    pub fn tol_total(&self) -> f64 {
        let quad = self.quad_err.iter().cloned().fold(0.0, f64::max);
        let m = self.values.len();
        let mut dd = 0.0;
        for j in 0..m {
            let v0 = self.values[(j + m - 1) % m];
            let v1 = self.values[j];
            let v2 = self.values[(j + 1) % m];
            dd += (v2 - 2.0 * v1 + v0).abs();
        }
        let allowance = 2.0 * dd / 12.0;
        self.window.err_bound + quad + allowance + 1e-9
    }

    pub fn check_normalization(&self) -> Result<()> {
        let integral = self.grid_integral();
        let tol = self.tol_total();
        if (integral - 1.0).abs() > tol {
            return Err(Error::Internal(format!(
                "wrapped PDF grid integral {integral} deviates from 1 beyond tol {tol}"
            )));
        }
        if self.values.iter().any(|&v| v < -1e-12) {
            return Err(Error::Internal("negative wrapped PDF value".into()));
        }
        Ok(())
    }
}

fn check_setup(copula: &CopulaSpec, marginals: &[LogMarginal]) -> Result<()> {
    if marginals.len() != copula.dimension() {
        return Err(Error::DimensionMismatch {
            expected: copula.dimension(),
            got: marginals.len(),
        });
    }
    Ok(())
}

/// The integrand of the wrapped-sum formula at (u_1..u_{n-1}, s, k):
/// copula density composed with the marginal CDFs times the marginal
/// densities, evaluated at u_n = s + k - sum u_i.
pub fn integrand(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    uvec: &[f64],
    s: f64,
    k: i64,
) -> Result<f64> {
    let n = copula.dimension();
    if uvec.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: uvec.len(),
        });
    }
    let u_last = s + k as f64 - uvec.iter().sum::<f64>();
    let mut cube = Vec::with_capacity(n);
    let mut dens_prod = 1.0;
    for (i, m) in marginals.iter().enumerate() {
        let u = if i < n - 1 { uvec[i] } else { u_last };
        let f = m.pdf(u);
        if f == 0.0 {
            return Ok(0.0);
        }
        dens_prod *= f;
        let cdf = m.cdf(u);
        if cdf < 1e-290 {
            // far enough into the lower tail that the copula density can
            // overflow; the discarded mass is covered by the certificate
            return Ok(0.0);
        }
        cube.push(cdf.clamp(1e-290, 1.0 - 1e-16));
    }
    let c = copula.density(&cube)?;
    Ok(c * dens_prod)
}

fn probe_density_sup(copula: &CopulaSpec) -> Result<f64> {
    let n = copula.dimension();
    let mut sup = 0.0f64;
    let mut eval = |u: &[f64]| -> Result<()> {
        let c = copula.density(u)?;
        if !c.is_finite() {
            return Err(Error::NoCertificate(format!(
                "copula density not finite at probe point {u:?}"
            )));
        }
        sup = sup.max(c);
        Ok(())
    };
    if n == 2 {
        for i in 0..17 {
            for j in 0..17 {
                let u = [0.1 + 0.05 * i as f64, 0.1 + 0.05 * j as f64];
                eval(&u)?;
            }
        }
    } else {
        let mut sobol = qmc::Sobol::new(n);
        let shift = vec![0u32; n];
        let mut point = vec![0.0; n];
        for _ in 0..2048 {
            sobol.next_shifted(&shift, &mut point);
            let u: Vec<f64> = point.iter().map(|&x| 0.1 + 0.8 * x).collect();
            eval(&u)?;
        }
    }
    Ok(10.0 * sup)
}

fn pdf_sup(m: &LogMarginal) -> f64 {
    let (lo, hi) = m.tail_window(1e-6).expect("fixed eps");
    let mut sup = 0.0f64;
    for i in 0..=1000 {
        let u = lo + (hi - lo) * i as f64 / 1000.0;
        sup = sup.max(m.pdf(u));
    }
    sup * 1.05
}

/// Certify an explicitly chosen window: per-marginal tail windows
/// (n pairs), and the wrap-index range c1..=c2.
pub fn certify_window(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    windows: &[(f64, f64)],
    c1: i64,
    c2: i64,
) -> Result<TruncationWindow> {
    check_setup(copula, marginals)?;
    let n = copula.dimension();
    if windows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: windows.len(),
        });
    }
    if windows.iter().any(|&(lo, hi)| !(lo < hi)) || c1 >= c2 {
        return Err(Error::InvalidParameter(
            "truncation window needs lo < hi per marginal and c1 < c2".into(),
        ));
    }
    let m_sup = probe_density_sup(copula)?;
    let last = &marginals[n - 1];
    let f_last_sup = pdf_sup(last);

    let box_mass: f64 = marginals
        .iter()
        .zip(windows)
        .map(|(m, &(lo, hi))| m.cdf(lo) + (1.0 - m.cdf(hi)))
        .sum();
    let sum_lo: f64 = windows[..n - 1].iter().map(|w| w.0).sum();
    let sum_hi: f64 = windows[..n - 1].iter().map(|w| w.1).sum();
    // largest u_n reachable from dropped k below c1, smallest from above c2
    let t_lo = c1 as f64 - sum_lo - 1e-9;
    let t_hi = c2 as f64 + 1.0 - sum_hi + 1e-9;
    let k_lower = last.pdf(t_lo) + last.cdf(t_lo);
    let k_upper = last.pdf(t_hi) + (1.0 - last.cdf(t_hi));
    let err_bound = m_sup * (box_mass * (1.0 + f_last_sup) + k_lower + k_upper);
    Ok(TruncationWindow {
        a: windows[..n - 1].iter().map(|w| w.0).collect(),
        b: windows[..n - 1].iter().map(|w| w.1).collect(),
        c1,
        c2,
        err_bound,
        last_lo: windows[n - 1].0,
        last_hi: windows[n - 1].1,
        density_sup: m_sup,
    })
}

/// Choose a window automatically so that the certified bound is <= tol.
pub fn make_window(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    tol: f64,
) -> Result<TruncationWindow> {
    check_setup(copula, marginals)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "window tolerance must lie in (0,1), got {tol}"
        )));
    }
    let m_sup = probe_density_sup(copula)?;
    let n = copula.dimension() as f64;
    let mut eps = (tol / (m_sup * 8.0 * n)).min(1e-6);
    let mut last_err = f64::INFINITY;
    for _ in 0..8 {
        let windows: Vec<(f64, f64)> = marginals
            .iter()
            .map(|m| m.tail_window(eps))
            .collect::<Result<_>>()?;
        let sum_lo: f64 = windows.iter().map(|w| w.0).sum();
        let sum_hi: f64 = windows.iter().map(|w| w.1).sum();
        let c1 = sum_lo.floor() as i64;
        let c2 = sum_hi.ceil() as i64;
        let win = certify_window(copula, marginals, &windows, c1, c2.max(c1 + 1))?;
        if win.err_bound <= tol {
            return Ok(win);
        }
        last_err = win.err_bound;
        if eps <= 1e-280 {
            break;
        }
        eps = (eps * 1e-4).max(1e-290);
    }
    Err(Error::NoCertificate(format!(
        "could not certify truncation below tol {tol}; best bound {last_err:.3e} \
         (copula density supremum {m_sup:.3e})"
    )))
}

// interval of u_n values reachable for a given k with u in the box
fn k_reachable(window: &TruncationWindow, s: f64, k: i64) -> (f64, f64) {
    let sum_a: f64 = window.a.iter().sum();
    let sum_b: f64 = window.b.iter().sum();
    (s + k as f64 - sum_b, s + k as f64 - sum_a)
}

/// Single wrap-index term: the box integral at fixed k.
pub fn k_term(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    s: f64,
    k: i64,
    window: &TruncationWindow,
    settings: &EngineSettings,
) -> Result<PointEstimate> {
    check_setup(copula, marginals)?;
    let dim = copula.dimension() - 1;
    let (reach_lo, reach_hi) = k_reachable(window, s, k);
    if reach_hi < window.last_lo || reach_lo > window.last_hi {
        return Ok(PointEstimate {
            value: 0.0,
            quad_err: 0.0,
            converged: true,
        });
    }
    match dim {
        1 => {
            // restrict to u_1 with u_2 inside its own tail window
            let lo = window.a[0].max(s + k as f64 - window.last_hi);
            let hi = window.b[0].min(s + k as f64 - window.last_lo);
            if lo >= hi {
                return Ok(PointEstimate {
                    value: 0.0,
                    quad_err: 0.0,
                    converged: true,
                });
            }
            let r = quad::integrate(
                |u| integrand(copula, marginals, &[u], s, k).unwrap_or(0.0),
                lo,
                hi,
                settings.abs_tol,
                settings.rel_tol,
                settings.max_intervals,
            );
            Ok(PointEstimate {
                value: r.value,
                quad_err: r.error,
                converged: r.converged,
            })
        }
        2 => {
            let r = quad::integrate_2d(
                |u1, u2| integrand(copula, marginals, &[u1, u2], s, k).unwrap_or(0.0),
                [window.a[0], window.a[1]],
                [window.b[0], window.b[1]],
                settings.abs_tol,
                settings.rel_tol,
                settings.max_intervals,
            );
            Ok(PointEstimate {
                value: r.value,
                quad_err: r.error,
                converged: r.converged,
            })
        }
        _ => Err(Error::Unsupported(
            "k_term quadrature is for n-1 <= 2; higher dimensions use QMC".into(),
        )),
    }
}

fn pdf_at_quadrature(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    s: f64,
    window: &TruncationWindow,
    settings: &EngineSettings,
) -> Result<PointEstimate> {
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut quad_err = 0.0;
    let mut converged = true;
    for k in window.c1..=window.c2 {
        let t = k_term(copula, marginals, s, k, window, settings)?;
        let y = t.value - comp;
        let tv = value + y;
        comp = (tv - value) - y;
        value = tv;
        quad_err += t.quad_err;
        converged &= t.converged;
    }
    Ok(PointEstimate {
        value,
        quad_err,
        converged,
    })
}

fn pdf_at_qmc(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    s: f64,
    window: &TruncationWindow,
    settings: &EngineSettings,
) -> Result<PointEstimate> {
    let n = copula.dimension();
    let dim = n - 1;
    let last = &marginals[n - 1];
    // importance transform: u_i drawn from the marginal truncated to its
    // box, so the sampled weight is the product of the box masses
    let q_lo: Vec<f64> = marginals[..dim]
        .iter()
        .zip(window.a.iter())
        .map(|(m, &a)| m.cdf(a))
        .collect();
    let mass: Vec<f64> = marginals[..dim]
        .iter()
        .zip(window.a.iter().zip(&window.b))
        .map(|(m, (&a, &b))| m.cdf(b) - m.cdf(a))
        .collect();
    let weight: f64 = mass.iter().product();
    let est = qmc::integrate_unit_cube(
        |x| {
            let mut cube = Vec::with_capacity(n);
            let mut sum_u = 0.0;
            for i in 0..dim {
                let q = (q_lo[i] + x[i] * mass[i]).clamp(1e-300, 1.0 - 1e-16);
                let u = marginals[i].quantile(q).expect("q in (0,1)");
                sum_u += u;
                cube.push(q);
            }
            cube.push(0.5);
            let mut acc = 0.0;
            for k in window.c1..=window.c2 {
                let u_last = s + k as f64 - sum_u;
                if u_last < window.last_lo || u_last > window.last_hi {
                    continue;
                }
                let f = last.pdf(u_last);
                if f == 0.0 {
                    continue;
                }
                let cdf = last.cdf(u_last);
                if cdf < 1e-290 {
                    continue;
                }
                cube[dim] = cdf.clamp(1e-290, 1.0 - 1e-16);
                match copula.density(&cube) {
                    Ok(c) => acc += c * f,
                    Err(_) => continue,
                }
            }
            acc * weight
        },
        dim,
        settings.qmc_log2_points,
        settings.qmc_shifts,
        settings.qmc_seed,
    );
    Ok(PointEstimate {
        value: est.value,
        quad_err: 3.0 * est.std_error,
        converged: true,
    })
}

/// Wrapped-sum PDF at a single point s in [0, 1).
pub fn wrapped_pdf_at(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    s: f64,
    window: &TruncationWindow,
    settings: &EngineSettings,
) -> Result<PointEstimate> {
    check_setup(copula, marginals)?;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "wrapped PDF argument s must lie in [0,1), got {s}"
        )));
    }
    if copula.dimension() - 1 <= 2 {
        pdf_at_quadrature(copula, marginals, s, window, settings)
    } else {
        pdf_at_qmc(copula, marginals, s, window, settings)
    }
}

/// Wrapped-sum PDF on the grid s_j = j/m, j = 0..m-1.
pub fn wrapped_pdf_grid(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    m: usize,
    tol: f64,
    settings: &EngineSettings,
) -> Result<WrappedPdfEstimate> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid size must be >= 2, got {m}"
        )));
    }
    let window = make_window(copula, marginals, tol)?;
    wrapped_pdf_grid_with_window(copula, marginals, m, window, settings)
}

pub fn wrapped_pdf_grid_with_window(
    copula: &CopulaSpec,
    marginals: &[LogMarginal],
    m: usize,
    window: TruncationWindow,
    settings: &EngineSettings,
) -> Result<WrappedPdfEstimate> {
    let s_grid: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
    let points: Vec<PointEstimate> = s_grid
        .par_iter()
        .map(|&s| wrapped_pdf_at(copula, marginals, s, &window, settings))
        .collect::<Result<_>>()?;
    Ok(WrappedPdfEstimate {
        s_grid,
        values: points.iter().map(|p| p.value.max(0.0)).collect(),
        quad_err: points.iter().map(|p| p.quad_err).collect(),
        converged: points.iter().all(|p| p.converged),
        window,
    })
}

#[cfg(test)]
mod tests;
