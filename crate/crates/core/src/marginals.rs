//! Log-domain marginal distributions.
//!
//! A `LogMarginal` is the distribution of U = log_B X for a positive random
//! variable X. All of the wrapped-sum machinery works in the log domain, so
//! the marginals are stored there directly: "X ~ 10^N(0,1)" means U ~ N(0,1)
//! with base 10.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// JSON grammar for a marginal, as accepted by the CLI config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    Normal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    ParetoLog { xm: f64, shape: f64 },
    Uniform01,
    Custom { grid: Vec<f64>, cdf: Vec<f64> },
}

#[derive(Debug, Clone)]
enum Kind {
    Normal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    /// U = log_B X for X ~ Pareto(x_m, shape). Support starts at log_B x_m.
    ParetoLog { xm: f64, shape: f64 },
    Uniform01,
    Custom(MonotoneCubicCdf),
}

#[derive(Debug, Clone)]
pub struct LogMarginal {
    kind: Kind,
    base: u32,
}

impl LogMarginal {
    pub fn normal(mu: f64, sigma: f64, base: u32) -> Result<Self> {
        if !(sigma > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "normal marginal needs sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Self::checked(Kind::Normal { mu, sigma }, base)
    }

    pub fn exponential(lambda: f64, base: u32) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential marginal needs lambda > 0, got {lambda}"
            )));
        }
        Self::checked(Kind::Exponential { lambda }, base)
    }

    pub fn pareto_log(xm: f64, shape: f64, base: u32) -> Result<Self> {
        if !(xm > 0.0) || !(shape > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pareto_log marginal needs xm > 0 and shape > 0, got xm={xm}, shape={shape}"
            )));
        }
        Self::checked(Kind::ParetoLog { xm, shape }, base)
    }

    pub fn uniform01(base: u32) -> Result<Self> {
        Self::checked(Kind::Uniform01, base)
    }

    pub fn custom(grid: Vec<f64>, cdf: Vec<f64>, base: u32) -> Result<Self> {
        let interp = MonotoneCubicCdf::new(grid, cdf)?;
        Self::checked(Kind::Custom(interp), base)
    }

    pub fn from_spec(spec: &MarginalSpec, base: u32) -> Result<Self> {
        match spec {
            MarginalSpec::Normal { mu, sigma } => Self::normal(*mu, *sigma, base),
            MarginalSpec::Exponential { lambda } => Self::exponential(*lambda, base),
            MarginalSpec::ParetoLog { xm, shape } => Self::pareto_log(*xm, *shape, base),
            MarginalSpec::Uniform01 => Self::uniform01(base),
            MarginalSpec::Custom { grid, cdf } => Self::custom(grid.clone(), cdf.clone(), base),
        }
    }

    fn checked(kind: Kind, base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidParameter(format!(
                "base must be an integer >= 2, got {base}"
            )));
        }
        Ok(LogMarginal { kind, base })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Normal { mu, sigma } => format!("normal({mu},{sigma})"),
            Kind::Exponential { lambda } => format!("exponential({lambda})"),
            Kind::ParetoLog { xm, shape } => format!("pareto_log({xm},{shape})"),
            Kind::Uniform01 => "uniform01".to_string(),
            Kind::Custom(_) => "custom".to_string(),
        }
    }

    /// True for the exactly-Benford log-marginal (uniform on [0,1)).
    pub fn is_exactly_benford(&self) -> bool {
        matches!(self.kind, Kind::Uniform01)
    }

    /// CDF F(u). Total over the real line.
    pub fn cdf(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Normal { mu, sigma } => special::norm_cdf((u - mu) / sigma),
            Kind::Exponential { lambda } => {
                if u <= 0.0 {
                    0.0
                } else {
                    -(-lambda * u).exp_m1()
                }
            }
            Kind::ParetoLog { xm, shape } => {
                let ln_b = f64::from(self.base).ln();
                let lo = xm.ln() / ln_b;
                if u <= lo {
                    0.0
                } else {
                    // 1 - (xm B^-u)^p
                    1.0 - (shape * (xm.ln() - u * ln_b)).exp()
                }
            }
            Kind::Uniform01 => u.clamp(0.0, 1.0),
            Kind::Custom(c) => c.cdf(u),
        }
    }

    /// PDF f(u).
    pub fn pdf(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Normal { mu, sigma } => special::norm_pdf((u - mu) / sigma) / sigma,
            Kind::Exponential { lambda } => {
                if u < 0.0 {
                    0.0
                } else {
                    lambda * (-lambda * u).exp()
                }
            }
            Kind::ParetoLog { xm, shape } => {
                let ln_b = f64::from(self.base).ln();
                let lo = xm.ln() / ln_b;
                if u < lo {
                    0.0
                } else {
                    shape * ln_b * (shape * (xm.ln() - u * ln_b)).exp()
                }
            }
            Kind::Uniform01 => {
                if (0.0..1.0).contains(&u) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Custom(c) => c.pdf(u),
        }
    }

    /// Inverse CDF. `q` must lie strictly inside (0, 1).
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quantile needs q in (0,1), got {q}"
            )));
        }
        Ok(match &self.kind {
            Kind::Normal { mu, sigma } => mu + sigma * special::norm_quantile(q),
            Kind::Exponential { lambda } => -(-q).ln_1p() / lambda,
            Kind::ParetoLog { xm, shape } => {
                let ln_b = f64::from(self.base).ln();
                xm.ln() / ln_b - (-q).ln_1p() / (shape * ln_b)
            }
            Kind::Uniform01 => q,
            Kind::Custom(c) => c.quantile(q),
        })
    }

    /// Window (lo, hi) with F(lo) <= eps and 1 - F(hi) <= eps. Bounded
    /// support edges are returned exactly; unbounded sides get a safety
    /// margin (quantile at eps/100) so downstream certificates have slack.
    pub fn tail_window(&self, eps: f64) -> Result<(f64, f64)> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_window needs eps in (0,1), got {eps}"
            )));
        }
        let q = (eps / 100.0).max(1e-305);
        // upper tails are solved from the survival function directly;
        // quantile(1 - q) would lose q below 1e-16 to roundoff
        Ok(match &self.kind {
            Kind::Normal { mu, sigma } => {
                let z = special::norm_quantile(q);
                (mu + sigma * z, mu - sigma * z)
            }
            Kind::Exponential { lambda } => (0.0, -q.ln() / lambda),
            Kind::ParetoLog { xm, shape } => {
                let ln_b = f64::from(self.base).ln();
                (xm.ln() / ln_b, (xm.ln() - q.ln() / shape) / ln_b)
            }
            Kind::Uniform01 => (0.0, 1.0),
            Kind::Custom(c) => (c.lo(), c.hi()),
        })
    }
}

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant of a tabulated CDF.
#[derive(Debug, Clone)]
pub struct MonotoneCubicCdf {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubicCdf {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidParameter(
                "custom marginal needs matching grid/cdf arrays of length >= 2".into(),
            ));
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "custom marginal grid must be strictly increasing".into(),
            ));
        }
        if !y.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "custom marginal cdf must be nondecreasing".into(),
            ));
        }
        let n = x.len();
        if (y[0]).abs() > 1e-9 || (y[n - 1] - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "custom marginal cdf must run from 0 to 1".into(),
            ));
        }
        let mut secant = vec![0.0; n - 1];
        for i in 0..n - 1 {
            secant[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut slope = vec![0.0; n];
        slope[0] = secant[0];
        slope[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slope[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                // harmonic mean keeps the interpolant monotone
                2.0 / (1.0 / secant[i - 1] + 1.0 / secant[i])
            };
        }
        // Fritsch-Carlson limiter
        for i in 0..n - 1 {
            if secant[i] == 0.0 {
                slope[i] = 0.0;
                slope[i + 1] = 0.0;
            } else {
                let a = slope[i] / secant[i];
                let b = slope[i + 1] / secant[i];
                let s = a * a + b * b;
                if s > 9.0 {
                    let t = 3.0 / s.sqrt();
                    slope[i] = t * a * secant[i];
                    slope[i + 1] = t * b * secant[i];
                }
            }
        }
        Ok(MonotoneCubicCdf { x, y, slope })
    }

    fn lo(&self) -> f64 {
        self.x[0]
    }

    fn hi(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn segment(&self, u: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u <= self.lo() {
            return 0.0;
        }
        if u >= self.hi() {
            return 1.0;
        }
        let i = self.segment(u);
        let h = self.x[i + 1] - self.x[i];
        let t = (u - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    pub fn pdf(&self, u: f64) -> f64 {
        if u < self.lo() || u > self.hi() {
            return 0.0;
        }
        let i = self.segment(u);
        let h = self.x[i + 1] - self.x[i];
        let t = (u - self.x[i]) / h;
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        (dh00 * self.y[i] + dh10 * self.slope[i] + dh01 * self.y[i + 1] + dh11 * self.slope[i + 1])
            .max(0.0)
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let (mut lo, mut hi) = (self.lo(), self.hi());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
