//! Truncated power-series (jet) arithmetic.
//!
//! A `Jet` stores the Taylor coefficients `c_k = f^(k)(x0) / k!` of a
//! function at an expansion point, up to a fixed order. Propagating jets
//! through arithmetic yields high-order derivatives exact to rounding,
//! which is how the mixed nth partial of an Archimedean copula CDF is
//! assembled from its inverse generator.

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    /// Constant jet: value `v`, all derivatives zero.
    pub fn constant(v: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        Jet { coeffs }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x0;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { coeffs }
    }

    pub fn from_taylor_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient c_k = f^(k)/k!.
    pub fn taylor_coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// The k-th derivative f^(k) at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order(), "derivative order {k} exceeds jet order");
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.coeffs[k] * fact
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.order(), rhs.order());
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order());
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.coeffs[j] * rhs.coeffs[k - j];
            }
            out[k] = acc;
        }
        Jet { coeffs: out }
    }

    /// 1 / self. Requires a nonzero leading coefficient.
    pub fn recip(&self) -> Jet {
        let n = self.coeffs.len();
        let a0 = self.coeffs[0];
        assert!(a0 != 0.0, "reciprocal of a jet with zero value");
        let mut out = vec![0.0; n];
        out[0] = 1.0 / a0;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out[k] = -acc / a0;
        }
        Jet { coeffs: out }
    }

    pub fn div(&self, rhs: &Jet) -> Jet {
        self.mul(&rhs.recip())
    }

    pub fn exp(&self) -> Jet {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * out[k - j];
            }
            out[k] = acc / k as f64;
        }
        Jet { coeffs: out }
    }

    /// Natural log. Requires a positive value coefficient.
    pub fn ln(&self) -> Jet {
        let n = self.coeffs.len();
        let a0 = self.coeffs[0];
        assert!(a0 > 0.0, "log of a jet with non-positive value");
        let mut out = vec![0.0; n];
        out[0] = a0.ln();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * out[j] * self.coeffs[k - j];
            }
            out[k] = (self.coeffs[k] - acc / k as f64) / a0;
        }
        Jet { coeffs: out }
    }

    /// self^p for real p. Uses the ODE recurrence, so it is valid for any
    /// real exponent as long as the value coefficient is positive.
    pub fn powf(&self, p: f64) -> Jet {
        let n = self.coeffs.len();
        let a0 = self.coeffs[0];
        assert!(a0 > 0.0, "powf of a jet with non-positive value");
        // b = a^p satisfies a * b' = p * a' * b
        let mut out = vec![0.0; n];
        out[0] = a0.powf(p);
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (p * j as f64 - (k - j) as f64) * self.coeffs[j] * out[k - j];
            }
            out[k] = acc / (k as f64 * a0);
        }
        Jet { coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rand_jet(seed: u64, order: usize, positive: bool) -> Jet {
        // small deterministic LCG is enough for identity checks
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut coeffs = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            coeffs.push(u * 2.0 - 1.0);
        }
        if positive {
            coeffs[0] = coeffs[0].abs() + 0.5;
        }
        Jet::from_taylor_coeffs(coeffs)
    }

    #[test]
    fn exp_of_variable() {
        let j = Jet::variable(0.0, 5).exp();
        for k in 0..=5 {
            let mut fact = 1.0;
            for i in 2..=k {
                fact *= i as f64;
            }
            assert_relative_eq!(j.taylor_coeff(k), 1.0 / fact, epsilon = 1e-14);
        }
    }

    #[test]
    fn exp_log_round_trip() {
        for seed in 0..50 {
            let j = rand_jet(seed, 6, true);
            let back = j.ln().exp();
            for k in 0..=6 {
                assert_relative_eq!(back.taylor_coeff(k), j.taylor_coeff(k), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn recip_mul_is_one() {
        for seed in 0..50 {
            let j = rand_jet(seed, 7, true);
            let prod = j.mul(&j.recip());
            assert_relative_eq!(prod.taylor_coeff(0), 1.0, epsilon = 1e-12);
            for k in 1..=7 {
                assert_relative_eq!(prod.taylor_coeff(k), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn powf_matches_exp_log() {
        for seed in 0..50 {
            let j = rand_jet(seed, 6, true);
            let p = -1.5 + (seed as f64) * 0.1;
            let a = j.powf(p);
            let b = j.ln().scale(p).exp();
            for k in 0..=6 {
                assert_relative_eq!(a.taylor_coeff(k), b.taylor_coeff(k), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn derivative_extraction() {
        // f(x) = (1+2x)^(-1/2) at x=0: f^(k) = (-1)^k (2k-1)!! * 2^k / 2^k ... check k=1,2
        let j = Jet::variable(0.0, 3).scale(2.0).add_scalar(1.0).powf(-0.5);
        assert_relative_eq!(j.derivative(0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(j.derivative(1), -1.0, epsilon = 1e-14);
        assert_relative_eq!(j.derivative(2), 3.0, epsilon = 1e-13);
        assert_relative_eq!(j.derivative(3), -15.0, epsilon = 1e-12);
    }
}
