use super::*;
use crate::copulas::CopulaSpec;
use crate::marginals::LogMarginal;
use approx::assert_relative_eq;

fn settings() -> EngineSettings {
    EngineSettings::default()
}

#[test]
fn independence_uniform_is_exactly_benford() {
    let cop = CopulaSpec::new("independence", 0.0, 2).unwrap();
    let margs = vec![LogMarginal::uniform01(10).unwrap(), LogMarginal::uniform01(10).unwrap()];
    let win = make_window(&cop, &margs, 1e-12).unwrap();
    assert!(win.err_bound <= 1e-12);
    for &s in &[0.0, 0.17, 0.5, 0.93] {
        let p = wrapped_pdf_at(&cop, &margs, s, &win, &settings()).unwrap();
        assert_relative_eq!(p.value, 1.0, max_relative = 1e-8);
        assert!(p.converged);
    }
}

#[test]
fn tight_certificate_for_normal_pair() {
    // Clayton alpha=2, two standard normal logs, box +-10, |k| <= 20:
    // certified bound must come out far below any practical tolerance
    let cop = CopulaSpec::new("clayton", 2.0, 2).unwrap();
    let margs = vec![
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
    ];
    let win = certify_window(&cop, &margs, &[(-10.0, 10.0), (-10.0, 10.0)], -20, 20).unwrap();
    assert!(win.err_bound <= 1e-20, "bound {}", win.err_bound);
    assert!(win.err_bound > 0.0);
}

#[test]
fn auto_window_meets_tolerance() {
    let cop = CopulaSpec::new("clayton", 2.0, 2).unwrap();
    let margs = vec![
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
        LogMarginal::exponential(1.0, 10).unwrap(),
    ];
    let win = make_window(&cop, &margs, 1e-6).unwrap();
    assert!(win.err_bound <= 1e-6);
    // exponential log support starts at 0, so no negative wrap indices
    assert!(win.c1 >= -15 && win.c2 >= 10);
}

#[test]
fn grid_normalizes_under_dependence() {
    let cop = CopulaSpec::new("clayton", 2.0, 2).unwrap();
    let margs = vec![
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
        LogMarginal::exponential(1.0, 10).unwrap(),
    ];
    let est = wrapped_pdf_grid(&cop, &margs, 12, 1e-6, &settings()).unwrap();
    assert!(est.converged);
    est.check_normalization().unwrap();
    assert!((est.grid_integral() - 1.0).abs() < 0.05);
}

#[test]
fn radially_symmetric_law_gives_symmetric_pdf() {
    // independence with symmetric log marginals: the sum is symmetric
    // about 0, so the wrapped density satisfies pdf(s) = pdf(1-s).
    // (Clayton is not radially symmetric, so this would fail there.)
    let cop = CopulaSpec::new("independence", 0.0, 2).unwrap();
    let margs = vec![
        LogMarginal::normal(0.0, 0.4, 10).unwrap(),
        LogMarginal::normal(0.0, 0.4, 10).unwrap(),
    ];
    let win = make_window(&cop, &margs, 1e-8).unwrap();
    let p1 = wrapped_pdf_at(&cop, &margs, 0.25, &win, &settings()).unwrap();
    let p2 = wrapped_pdf_at(&cop, &margs, 0.75, &win, &settings()).unwrap();
    assert_relative_eq!(p1.value, p2.value, max_relative = 1e-7);
}

#[test]
fn k_terms_decay_and_dropped_terms_negligible() {
    let cop = CopulaSpec::new("clayton", 2.0, 2).unwrap();
    let margs = vec![
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
    ];
    let win = make_window(&cop, &margs, 1e-8).unwrap();
    let s = 0.4;
    let terms: Vec<f64> = (win.c1..=win.c2)
        .map(|k| k_term(&cop, &margs, s, k, &win, &settings()).unwrap().value)
        .collect();
    let peak = terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    for i in 1..=peak {
        assert!(terms[i] >= terms[i - 1] - 1e-12);
    }
    for i in peak..terms.len() - 1 {
        assert!(terms[i + 1] <= terms[i] + 1e-12);
    }
    for k in [win.c1 - 1, win.c2 + 1] {
        let t = k_term(&cop, &margs, s, k, &win, &settings()).unwrap();
        assert!(t.value.abs() < win.err_bound);
    }
}

#[test]
fn qmc_path_matches_quadrature_at_three_dims() {
    // n=3 uses the 2-d quadrature path; force QMC through n=4 by
    // comparing against the independence product structure instead:
    // for the independence copula any n gives exactly the convolution,
    // and with uniform01 marginals the answer is exactly 1.
    let cop = CopulaSpec::new("independence", 0.0, 4).unwrap();
    let margs = vec![LogMarginal::uniform01(10).unwrap(); 4];
    let win = make_window(&cop, &margs, 1e-9).unwrap();
    let mut st = settings();
    st.qmc_log2_points = 13;
    st.qmc_shifts = 6;
    for &s in &[0.1, 0.5, 0.8] {
        let p = wrapped_pdf_at(&cop, &margs, s, &win, &st).unwrap();
        assert_relative_eq!(p.value, 1.0, max_relative = 2e-3);
        assert!((p.value - 1.0).abs() < 6.0 * p.quad_err.max(1e-6));
    }
}

#[test]
fn qmc_dependent_three_vs_four_consistency() {
    // Clayton n=4 with uniform marginals: QMC estimate must normalize
    let cop = CopulaSpec::new("clayton", 1.0, 4).unwrap();
    let margs = vec![LogMarginal::uniform01(10).unwrap(); 4];
    let win = make_window(&cop, &margs, 1e-9).unwrap();
    let mut st = settings();
    st.qmc_log2_points = 12;
    st.qmc_shifts = 4;
    let est = wrapped_pdf_grid_with_window(&cop, &margs, 8, win, &st).unwrap();
    est.check_normalization().unwrap();
}

#[test]
fn rejects_bad_arguments() {
    let cop = CopulaSpec::new("clayton", 2.0, 2).unwrap();
    let margs = vec![
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
        LogMarginal::normal(0.0, 1.0, 10).unwrap(),
    ];
    let win = make_window(&cop, &margs, 1e-6).unwrap();
    assert!(wrapped_pdf_at(&cop, &margs, 1.0, &win, &settings()).is_err());
    assert!(wrapped_pdf_at(&cop, &margs, -0.1, &win, &settings()).is_err());
    assert!(integrand(&cop, &margs, &[0.1, 0.2], 0.5, 0).is_err());
    let one = vec![LogMarginal::normal(0.0, 1.0, 10).unwrap()];
    assert!(make_window(&cop, &one, 1e-6).is_err());
}
