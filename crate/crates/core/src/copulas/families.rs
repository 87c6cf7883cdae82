//! The built-in Archimedean families.

use super::{CopulaFamily, SamplingMethod};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Product copula. phi(t) = -ln t, psi(s) = exp(-s).
pub struct Independence;

impl CopulaFamily for Independence {
    fn name(&self) -> &'static str {
        "independence"
    }

    fn needs_alpha(&self) -> bool {
        false
    }

    fn check_alpha(&self, _alpha: f64) -> Result<()> {
        Ok(())
    }

    fn generator(&self, _alpha: f64, t: f64) -> f64 {
        -t.ln()
    }

    fn generator_deriv(&self, _alpha: f64, t: f64) -> f64 {
        -1.0 / t
    }

    fn generator_limit(&self, _alpha: f64) -> f64 {
        f64::INFINITY
    }

    fn inverse_generator(&self, _alpha: f64, s: f64) -> f64 {
        (-s).exp()
    }

    fn inverse_generator_jet(&self, _alpha: f64, s: f64, order: usize) -> Jet {
        Jet::variable(s, order).scale(-1.0).exp()
    }

    fn closed_form_density(&self, _alpha: f64, _u: &[f64]) -> Option<f64> {
        Some(1.0)
    }

    fn sampling(&self, _alpha: f64, _n: usize) -> SamplingMethod {
        SamplingMethod::PlainUniform
    }
}

/// Clayton family: phi(t) = (t^-alpha - 1)/alpha, psi(s) = (1 + alpha s)^(-1/alpha),
/// C(u) = (sum u_i^-alpha - n + 1)^(-1/alpha), alpha in [-1, inf) \ {0}.
pub struct Clayton;

impl CopulaFamily for Clayton {
    fn name(&self) -> &'static str {
        "clayton"
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        if alpha == 0.0 || alpha < -1.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "clayton alpha must lie in [-1,inf) excluding 0, got {alpha}"
            )));
        }
        Ok(())
    }

    fn generator(&self, alpha: f64, t: f64) -> f64 {
        (t.powf(-alpha) - 1.0) / alpha
    }

    fn generator_deriv(&self, alpha: f64, t: f64) -> f64 {
        -t.powf(-alpha - 1.0)
    }

    fn generator_limit(&self, alpha: f64) -> f64 {
        if alpha > 0.0 {
            f64::INFINITY
        } else {
            -1.0 / alpha
        }
    }

    fn inverse_generator(&self, alpha: f64, s: f64) -> f64 {
        let base = 1.0 + alpha * s;
        if base <= 0.0 {
            0.0
        } else {
            base.powf(-1.0 / alpha)
        }
    }

    fn inverse_generator_jet(&self, alpha: f64, s: f64, order: usize) -> Jet {
        let base = 1.0 + alpha * s;
        if base <= 0.0 {
            return Jet::constant(0.0, order);
        }
        Jet::variable(s, order)
            .scale(alpha)
            .add_scalar(1.0)
            .powf(-1.0 / alpha)
    }

    fn closed_form_density(&self, alpha: f64, u: &[f64]) -> Option<f64> {
        // prod_{k=0}^{n-1} (1 + k alpha) * (prod u_i)^(-alpha-1)
        //   * (sum u_i^-alpha - n + 1)^(-(n + 1/alpha))
        let n = u.len();
        let mut lead = 1.0;
        for k in 0..n {
            lead *= 1.0 + k as f64 * alpha;
        }
        let prod: f64 = u.iter().product();
        let s: f64 = u.iter().map(|&x| x.powf(-alpha)).sum::<f64>() - n as f64 + 1.0;
        if s <= 0.0 {
            return Some(0.0);
        }
        Some(lead * prod.powf(-alpha - 1.0) * s.powf(-(n as f64 + 1.0 / alpha)))
    }

    fn sampling(&self, alpha: f64, _n: usize) -> SamplingMethod {
        if alpha > 0.0 {
            SamplingMethod::GammaFrailty
        } else {
            SamplingMethod::Unavailable
        }
    }
}

/// Ali-Mikhail-Haq family: phi(t) = ln((1 - alpha(1-t))/t),
/// psi(s) = (1-alpha)/(e^s - alpha), alpha in [-1, 1).
pub struct Amh;

impl CopulaFamily for Amh {
    fn name(&self) -> &'static str {
        "amh"
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        if !(-1.0..1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "amh alpha must lie in [-1,1), got {alpha}"
            )));
        }
        Ok(())
    }

    fn generator(&self, alpha: f64, t: f64) -> f64 {
        ((1.0 - alpha * (1.0 - t)) / t).ln()
    }

    fn generator_deriv(&self, alpha: f64, t: f64) -> f64 {
        alpha / (1.0 - alpha * (1.0 - t)) - 1.0 / t
    }

    fn generator_limit(&self, _alpha: f64) -> f64 {
        f64::INFINITY
    }

    fn inverse_generator(&self, alpha: f64, s: f64) -> f64 {
        (1.0 - alpha) / (s.exp() - alpha)
    }

    fn inverse_generator_jet(&self, alpha: f64, s: f64, order: usize) -> Jet {
        Jet::variable(s, order)
            .exp()
            .add_scalar(-alpha)
            .recip()
            .scale(1.0 - alpha)
    }

    fn sampling(&self, _alpha: f64, n: usize) -> SamplingMethod {
        if n == 2 {
            SamplingMethod::ConditionalInversion
        } else {
            SamplingMethod::Unavailable
        }
    }
}

/// Gumbel-Barnett family: phi(t) = ln(1 - alpha ln t),
/// psi(s) = exp((1 - e^s)/alpha), alpha in (0, 1].
/// C(u,v) = uv exp(-alpha ln u ln v) in two dimensions.
pub struct GumbelBarnett;

impl CopulaFamily for GumbelBarnett {
    fn name(&self) -> &'static str {
        "gumbel_barnett"
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gumbel_barnett alpha must lie in (0,1], got {alpha}"
            )));
        }
        Ok(())
    }

    fn generator(&self, alpha: f64, t: f64) -> f64 {
        (1.0 - alpha * t.ln()).ln()
    }

    fn generator_deriv(&self, alpha: f64, t: f64) -> f64 {
        -alpha / (t * (1.0 - alpha * t.ln()))
    }

    fn generator_limit(&self, _alpha: f64) -> f64 {
        f64::INFINITY
    }

    fn inverse_generator(&self, alpha: f64, s: f64) -> f64 {
        ((1.0 - s.exp()) / alpha).exp()
    }

    fn inverse_generator_jet(&self, alpha: f64, s: f64, order: usize) -> Jet {
        Jet::variable(s, order)
            .exp()
            .scale(-1.0)
            .add_scalar(1.0)
            .scale(1.0 / alpha)
            .exp()
    }

    fn sampling(&self, _alpha: f64, n: usize) -> SamplingMethod {
        if n == 2 {
            SamplingMethod::ConditionalInversion
        } else {
            SamplingMethod::Unavailable
        }
    }
}
