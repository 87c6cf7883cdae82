//! Archimedean copula evaluation.
//!
//! Every family is a strategy behind the [`CopulaFamily`] trait and is
//! looked up by name in [`registry`]. A family supplies its generator
//! calculus (phi, phi', psi and the order-n jet of psi); the shared code
//! here assembles CDF, density and conditional CDF from those pieces:
//!
//!   C(u)  = psi(sum_i phi(u_i))
//!   c(u)  = psi^(n)(sum_i phi(u_i)) * prod_i phi'(u_i)

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jet::Jet;

mod families;
pub mod registry;

pub use families::{Amh, Clayton, GumbelBarnett, Independence};

/// How a family supports random sampling (used by the Monte Carlo oracle).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMethod {
    /// Independent uniforms.
    PlainUniform,
    /// Latent Gamma frailty mixture (Clayton, alpha > 0, any n).
    GammaFrailty,
    /// Sequential conditional inversion (n = 2 only).
    ConditionalInversion,
    /// No validated sampler; quadrature remains usable.
    Unavailable,
}

pub trait CopulaFamily: Sync + Send {
    fn name(&self) -> &'static str;

    fn needs_alpha(&self) -> bool {
        true
    }

    /// Validate the dependence parameter for this family.
    fn check_alpha(&self, alpha: f64) -> Result<()>;

    /// Generator phi(t) on (0, 1], with phi(1) = 0, decreasing.
    fn generator(&self, alpha: f64, t: f64) -> f64;

    /// phi'(t), strictly negative on (0, 1).
    fn generator_deriv(&self, alpha: f64, t: f64) -> f64;

    /// phi(0+); infinite for strict generators, finite for e.g. Clayton
    /// with negative alpha.
    fn generator_limit(&self, alpha: f64) -> f64;

    /// psi(s) = phi^{-1}(s) for s >= 0, extended by 0 past the generator
    /// range for non-strict generators.
    fn inverse_generator(&self, alpha: f64, s: f64) -> f64;

    /// Jet of psi at s carrying psi', .., psi^(order).
    fn inverse_generator_jet(&self, alpha: f64, s: f64, order: usize) -> Jet;

    /// Closed-form density, where the family has one (cross-check path).
    fn closed_form_density(&self, _alpha: f64, _u: &[f64]) -> Option<f64> {
        None
    }

    fn sampling(&self, alpha: f64, n: usize) -> SamplingMethod;
}

/// A fully specified copula: family, dimension and dependence parameter.
#[derive(Clone, Copy)]
pub struct CopulaSpec {
    family: &'static dyn CopulaFamily,
    n: usize,
    alpha: f64,
}

impl std::fmt::Debug for CopulaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CopulaSpec")
            .field("family", &self.family.name())
            .field("n", &self.n)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl CopulaSpec {
    /// Build a spec. `alpha` is ignored by the independence family. For
    /// family/dimension combinations whose n-dimensional extension is only
    /// conditionally a copula (AMH with negative alpha, Gumbel-Barnett with
    /// n >= 3) the density is probed for nonnegativity here and the spec is
    /// rejected if the probe fails.
    pub fn new(family_name: &str, alpha: f64, n: usize) -> Result<Self> {
        let family = registry::lookup(family_name).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown copula family '{family_name}' (known: {})",
                registry::names().join(", ")
            ))
        })?;
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "copula dimension must be >= 2, got {n}"
            )));
        }
        let alpha = if family.needs_alpha() { alpha } else { 0.0 };
        family.check_alpha(alpha)?;
        let spec = CopulaSpec { family, n, alpha };
        if spec.needs_positivity_probe() {
            spec.probe_density_nonnegative()?;
        }
        Ok(spec)
    }

    pub fn independence(n: usize) -> Result<Self> {
        Self::new("independence", 0.0, n)
    }

    pub fn family(&self) -> &'static dyn CopulaFamily {
        self.family
    }

    pub fn family_name(&self) -> &'static str {
        self.family.name()
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_independence(&self) -> bool {
        self.family.name() == "independence"
    }

    fn needs_positivity_probe(&self) -> bool {
        if self.n < 3 {
            return false;
        }
        match self.family.name() {
            "amh" => self.alpha < 0.0,
            "gumbel_barnett" => true,
            _ => false,
        }
    }

    fn probe_density_nonnegative(&self) -> Result<()> {
        let levels = [0.1, 0.3, 0.5, 0.7, 0.9];
        let mut idx = vec![0usize; self.n];
        let mut u = vec![0.0; self.n];
        loop {
            for (k, &i) in idx.iter().enumerate() {
                u[k] = levels[i];
            }
            let c = self.density_via_jet(&u)?;
            if c < -1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "{} with alpha={} is not a valid {}-copula: density {c:.3e} at {u:?}",
                    self.family.name(),
                    self.alpha,
                    self.n
                )));
            }
            // odometer
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < levels.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == self.n {
                    return Ok(());
                }
            }
        }
    }

    fn check_dim(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Copula CDF C(u) on the closed unit hypercube.
    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        for &x in u {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(format!(
                    "copula CDF argument {x} outside [0,1]"
                )));
            }
        }
        if u.iter().any(|&x| x == 0.0) {
            return Ok(0.0);
        }
        let s: f64 = u.iter().map(|&x| self.family.generator(self.alpha, x)).sum();
        let limit = self.family.generator_limit(self.alpha);
        if s >= limit {
            return Ok(0.0);
        }
        Ok(self.family.inverse_generator(self.alpha, s).clamp(0.0, 1.0))
    }

    /// Copula density c(u) on the open unit hypercube. Boundary points are
    /// rejected (the density may be unbounded there).
    pub fn density(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        if u.iter().any(|&x| x <= 0.0 || x >= 1.0) {
            return Err(Error::Boundary);
        }
        if self.is_independence() {
            return Ok(1.0);
        }
        self.density_via_jet(u)
    }

    /// The generator-calculus path: psi^(n)(sum phi) * prod phi'.
    pub fn density_via_jet(&self, u: &[f64]) -> Result<f64> {
        let s: f64 = u.iter().map(|&x| self.family.generator(self.alpha, x)).sum();
        let limit = self.family.generator_limit(self.alpha);
        if s >= limit {
            // outside the support of a non-strict generator
            return Ok(0.0);
        }
        let jet = self.family.inverse_generator_jet(self.alpha, s, self.n);
        let mut c = jet.derivative(self.n);
        for &x in u {
            c *= self.family.generator_deriv(self.alpha, x);
        }
        if c < 0.0 {
            if c > -1e-10 {
                return Ok(0.0);
            }
            return Err(Error::Internal(format!(
                "negative copula density {c:.3e} for {} alpha={} at {u:?}",
                self.family.name(),
                self.alpha
            )));
        }
        Ok(c)
    }

    /// P(U_{j+1} <= u[j] | U_1 = u[0], .., U_j = u[j-1]) via the ratio of
    /// psi^(j) evaluations. Supported for any family at n = 2 (j = 1) and
    /// for Clayton at any dimension.
    pub fn conditional_cdf(&self, u: &[f64], j: usize) -> Result<f64> {
        self.check_dim(u)?;
        if j == 0 || j >= self.n {
            return Err(Error::InvalidParameter(format!(
                "conditioning index must be in 1..{}, got {j}",
                self.n
            )));
        }
        if !(self.n == 2 || self.family.name() == "clayton" || self.is_independence()) {
            return Err(Error::Unsupported(format!(
                "conditional CDF for {} at n={} (n=2 only)",
                self.family.name(),
                self.n
            )));
        }
        let target = u[j];
        if target <= 0.0 {
            return Ok(0.0);
        }
        if target >= 1.0 {
            return Ok(1.0);
        }
        let s_given: f64 = u[..j]
            .iter()
            .map(|&x| self.family.generator(self.alpha, x))
            .sum();
        let s_full = s_given + self.family.generator(self.alpha, target);
        let d_given = self
            .family
            .inverse_generator_jet(self.alpha, s_given, j)
            .derivative(j);
        let limit = self.family.generator_limit(self.alpha);
        let d_full = if s_full >= limit {
            0.0
        } else {
            self.family
                .inverse_generator_jet(self.alpha, s_full, j)
                .derivative(j)
        };
        if d_given == 0.0 {
            return Ok(1.0);
        }
        Ok((d_full / d_given).clamp(0.0, 1.0))
    }

    pub fn sampling(&self) -> SamplingMethod {
        self.family.sampling(self.alpha, self.n)
    }
}

/// Serialized form matches the CLI config grammar:
/// `{"family":"clayton","alpha":2,"n":2}`.
#[derive(Debug, Serialize, Deserialize)]
struct CopulaSpecRepr {
    family: String,
    #[serde(default)]
    alpha: f64,
    n: usize,
}

impl Serialize for CopulaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CopulaSpecRepr {
            family: self.family.name().to_string(),
            alpha: self.alpha,
            n: self.n,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CopulaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CopulaSpecRepr::deserialize(d)?;
        CopulaSpec::new(&repr.family, repr.alpha, repr.n).map_err(D::Error::custom)
    }
}
