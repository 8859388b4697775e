use steinzo::problems::{generate_synthetic_classification, CorrEntropyProblem, SkewedQuartic};
use steinzo::{Matrix, Objective, RandomStream, Vector};

fn eigen_extremes(m: &Matrix) -> (f64, f64) {
    let ev = m.clone().symmetric_eigen().eigenvalues;
    (ev.min(), ev.max())
}

#[test]
fn quartic_hessian_at_ones_has_condition_number_near_778() {
    let q = SkewedQuartic::new(20, 0.1).unwrap();
    let h = q.hessian(&Vector::from_element(20, 1.0));
    let (lo, hi) = eigen_extremes(&h);
    let cond = hi / lo;
    // The spectral norm is about 1.07, so only the condition number fits.
    assert!((cond / 778.0 - 1.0).abs() < 0.05, "condition number {cond}");
    assert!(hi < 2.0, "spectral norm {hi}");
}

#[test]
fn quartic_hessian_dominates_scaled_gram_matrix() {
    let q = SkewedQuartic::new(20, 0.0).unwrap();
    let a = q.a_matrix();
    let gram = a.transpose() * a;
    assert!((q.hessian(&Vector::zeros(20)) - &gram * 2.0).amax() < 1e-15);
    let (gram_min, _) = eigen_extremes(&gram);
    let mut s = RandomStream::new(31, 0);
    for _ in 0..20 {
        let theta = Vector::from_fn(20, |_, _| s.uniform(-10.0, 10.0));
        let h = q.hessian(&theta);
        let (h_min, _) = eigen_extremes(&h);
        assert!(h_min > 1.25 * gram_min, "{h_min} vs {}", 1.25 * gram_min);
        // Stronger form: H - 5/4 A^T A is positive semidefinite.
        let (gap, _) = eigen_extremes(&(h - &gram * 1.25));
        assert!(gap > -1e-12 * gram_min.max(1.0));
    }
}

#[test]
fn quartic_derivatives_match_finite_differences() {
    let q = SkewedQuartic::new(5, 0.0).unwrap();
    let mut s = RandomStream::new(32, 0);
    let h = 1e-6;
    for _ in 0..20 {
        let theta = Vector::from_fn(5, |_, _| s.uniform(-3.0, 3.0));
        let g = q.gradient(&theta);
        let hess = q.hessian(&theta);
        for i in 0..5 {
            let mut e = Vector::zeros(5);
            e[i] = h;
            let fd = (q.value(&(&theta + &e)) - q.value(&(&theta - &e))) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "grad {i}: {fd} vs {}", g[i]);
            let col = (q.gradient(&(&theta + &e)) - q.gradient(&(&theta - &e))) / (2.0 * h);
            for j in 0..5 {
                assert!((col[j] - hess[(j, i)]).abs() <= 1e-5 * hess[(j, i)].abs().max(1.0));
            }
        }
    }
}

#[test]
fn correntropy_derivatives_match_finite_differences() {
    let data = generate_synthetic_classification(6, 300, 1.5, &mut RandomStream::new(33, 0)).unwrap();
    let p = CorrEntropyProblem::new(&data, 3.0, 10).unwrap();
    let mut s = RandomStream::new(34, 0);
    let h = 1e-6;
    for _ in 0..20 {
        let theta = Vector::from_fn(6, |_, _| s.uniform(-1.0, 1.0));
        let g = p.gradient(&theta);
        let hess = p.hessian(&theta);
        for i in 0..6 {
            let mut e = Vector::zeros(6);
            e[i] = h;
            let fd = (p.full_loss(&(&theta + &e)) - p.full_loss(&(&theta - &e))) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "grad {i}: {fd} vs {}", g[i]);
            let col = (p.gradient(&(&theta + &e)) - p.gradient(&(&theta - &e))) / (2.0 * h);
            for j in 0..6 {
                assert!((col[j] - hess[(j, i)]).abs() <= 1e-5 * hess[(j, i)].abs().max(1.0));
            }
        }
    }
}

#[test]
fn minibatch_oracle_is_unbiased() {
    let data = generate_synthetic_classification(10, 1000, 5.0, &mut RandomStream::new(35, 0)).unwrap();
    let p = CorrEntropyProblem::new(&data, 10.0, 10).unwrap();
    let theta = Vector::from_element(10, 0.3);
    let full = p.full_loss(&theta);
    let mut noise = RandomStream::new(36, 0);
    let n = 10_000;
    let draws: Vec<f64> = (0..n).map(|_| p.observe(&theta, &mut noise)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - full).abs() < 4.0 * se, "mean {mean}, full {full}, se {se}");
}
