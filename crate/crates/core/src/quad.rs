//! Adaptive one- and two-dimensional quadrature built on the 7-15
//! Gauss-Kronrod pair.

/// Kronrod abscissae for the 7-15 rule on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    /// false when the subdivision cap was hit before the tolerance.
    pub converged: bool,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut res_abs = WGK[7] * fc.abs();
    for i in 0..7 {
        let x = h * XGK[i];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kronrod += WGK[i] * (f1 + f2);
        res_abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let value = kronrod * h;
    let mut err = ((kronrod - gauss) * h).abs();
    // QUADPACK-style error rescaling
    if res_abs != 0.0 && err != 0.0 {
        let scale = (200.0 * err / (res_abs * h.abs())).powf(1.5);
        if scale < 1.0 {
            err = res_abs * h.abs() * scale;
        }
    }
    (value, err)
}

/// Globally adaptive integration of `f` over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    // (error, a, b, value), worst interval kept at the back
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&f, a, b);
    intervals.push((e, a, b, v));
    let mut converged = true;
    loop {
        let total_err: f64 = intervals.iter().map(|i| i.0).sum();
        let total_val: f64 = intervals.iter().map(|i| i.3).sum();
        if total_err <= abs_tol.max(rel_tol * total_val.abs()) {
            break;
        }
        if intervals.len() >= max_intervals {
            converged = false;
            break;
        }
        // split the interval with the largest error estimate
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
            .unwrap();
        let (_, lo, hi, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            converged = false;
            break;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((e1, lo, mid, v1));
        intervals.push((e2, mid, hi, v2));
    }
    // pairwise-stable summation order: sort by left endpoint
    intervals.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    let mut value = 0.0;
    let mut comp = 0.0;
    for &(_, _, _, v) in &intervals {
        // Kahan
        let y = v - comp;
        let t = value + y;
        comp = (t - value) - y;
        value = t;
    }
    QuadResult {
        value,
        error: intervals.iter().map(|i| i.0).sum(),
        converged,
    }
}

/// Iterated 2-d integration over the box [a0,b0] x [a1,b1]: the outer
/// adaptive pass integrates inner adaptive integrals.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    a: [f64; 2],
    b: [f64; 2],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let inner_tol = abs_tol / (b[0] - a[0]).abs().max(1.0) * 0.1;
    let err_cell = std::cell::Cell::new((0.0f64, true));
    let outer = integrate(
        |x| {
            let r = integrate(
                |y| f(x, y),
                a[1],
                b[1],
                inner_tol,
                rel_tol * 0.1,
                max_intervals,
            );
            let (m, c) = err_cell.get();
            err_cell.set((m.max(r.error), c && r.converged));
            r.value
        },
        a[0],
        b[0],
        abs_tol,
        rel_tol,
        max_intervals,
    );
    let (inner_err_max, inner_converged) = err_cell.get();
    QuadResult {
        value: outer.value,
        error: outer.error + inner_err_max * (b[0] - a[0]).abs(),
        converged: outer.converged && inner_converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        // 7-15 rule is exact for this cubic even without subdivision
        let r = integrate(|x| 3.0 * x * x + x, 0.0, 2.0, 1e-12, 1e-12, 100);
        assert_relative_eq!(r.value, 10.0, epsilon = 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(
            |x| (-0.5 * x * x).exp(),
            -10.0,
            10.0,
            1e-12,
            1e-12,
            500,
        );
        assert_relative_eq!(r.value, crate::special::SQRT_2PI, max_relative = 1e-12);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn integrable_kink() {
        let r = integrate(|x| x.abs().sqrt(), -1.0, 1.0, 1e-10, 1e-10, 2000);
        assert_relative_eq!(r.value, 4.0 / 3.0, max_relative = 1e-8);
    }

    #[test]
    fn cap_reports_non_convergence() {
        let r = integrate(|x| (1e6 * x).sin().abs(), 0.0, 1.0, 1e-14, 1e-14, 8);
        assert!(!r.converged);
    }

    #[test]
    fn two_dim_separable() {
        let r = integrate_2d(
            |x, y| (-0.5 * (x * x + y * y)).exp(),
            [-8.0, -8.0],
            [8.0, 8.0],
            1e-10,
            1e-10,
            400,
        );
        assert_relative_eq!(
            r.value,
            crate::special::SQRT_2PI * crate::special::SQRT_2PI,
            max_relative = 1e-9
        );
    }
}
