//! Acceptance checks AC1..AC9. Each test prints one `ACn PASS|FAIL` line
//! with the measured quantities, then asserts.

use std::sync::OnceLock;
use std::time::Instant;

use steinzo::analysis::{fit_rate_exponent, normality_check_quadratic, rms_error_curve, AggregateCurve};
use steinzo::estimators::{estimate_bundle_shared, estimate_gradient, estimate_hessian};
use steinzo::experiment::{compare_solvers, run_experiment, ExperimentConfig, RawConfig};
use steinzo::pdmap::{apply_pd_map, symmetric_lambda_min};
use steinzo::problems::{
    generate_synthetic_classification, parse_libsvm, write_libsvm, CorrEntropyProblem, LabeledData,
    QuadraticProblem, Sample, SkewedQuartic,
};
use steinzo::solvers::{estimate_2spsa_bundle, run_2spsa, run_first_order, run_stein_second_order, SecondPerturbation};
use steinzo::{
    DeltaFloor, EpsilonSchedule, FnOracle, GainSchedule, GradientEstimator, HessianEstimator, Matrix,
    NoisyOracle, ObjectiveOracle, ParameterVector, PdMap, RandomStream, RunTrace, SolverConfig,
    StreamPurpose, Vector, WeightSchedule,
};

fn report(id: &str, pass: bool, detail: impl AsRef<str>, started: Instant) -> bool {
    println!(
        "{id} {}: {} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref(),
        started.elapsed().as_secs_f64()
    );
    pass
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Least-squares slope of `log y` on `log x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Entrywise running mean and variance of matrix samples.
struct MatrixMoments {
    n: usize,
    sum: Matrix,
    sum_sq: Matrix,
}

impl MatrixMoments {
    fn new(p: usize) -> Self {
        Self { n: 0, sum: Matrix::zeros(p, p), sum_sq: Matrix::zeros(p, p) }
    }

    fn push(&mut self, m: &Matrix) {
        self.n += 1;
        self.sum += m;
        self.sum_sq += m.component_mul(m);
    }

    fn mean(&self) -> Matrix {
        &self.sum / self.n as f64
    }

    fn stderr(&self) -> Matrix {
        let n = self.n as f64;
        let mean = self.mean();
        (&self.sum_sq / n - mean.component_mul(&mean)).map(|v| (v.max(0.0) * n / (n - 1.0) / n).sqrt())
    }
}

/// Largest |mean - target| / stderr over entries.
fn max_z(m: &MatrixMoments, target: &Matrix) -> f64 {
    let (mean, se) = (m.mean(), m.stderr());
    let mut worst = 0.0f64;
    for i in 0..target.nrows() {
        for j in 0..target.ncols() {
            let d = (mean[(i, j)] - target[(i, j)]).abs();
            let z = if se[(i, j)] > 0.0 { d / se[(i, j)] } else if d == 0.0 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
        }
    }
    worst
}

#[test]
fn ac1_hessian_estimators_unbiased_on_quadratic() {
    let t = Instant::now();
    let problem = QuadraticProblem::diagonal(&[1.0, 2.0, 3.0], 0.0).unwrap();
    let h = problem.hessian().clone();
    let f = |x: &Vector| 0.5 * x.dot(&(&h * x));
    let theta = Vector::from_vec(vec![0.5, -1.0, 2.0]);
    let c = 0.1;
    let draws = 1_000_000;

    let mut oracle = FnOracle::new(3, f);
    let mut stream = RandomStream::new(101, 0);
    let mut stein = MatrixMoments::new(3);
    for _ in 0..draws {
        let u = stream.standard_normal_vector(3);
        stein.push(&estimate_hessian(HessianEstimator::ThreePoint, &mut oracle, &theta, c, &u).unwrap());
    }
    let z_stein = max_z(&stein, &h);

    let mut stream = RandomStream::new(102, 0);
    let mut spsa = MatrixMoments::new(3);
    for _ in 0..draws {
        let d = stream.rademacher_vector(3);
        let dt = stream.rademacher_vector(3);
        spsa.push(&estimate_2spsa_bundle(&mut oracle, &theta, c, c, &d, &dt).unwrap().hessian);
    }
    let z_spsa = max_z(&spsa, &h);
    let pass = z_stein < 4.0 && z_spsa < 4.0 && t.elapsed().as_secs() < 60;
    assert!(report(
        "AC1",
        pass,
        format!("max |mean - H| / SE: three-point Stein {z_stein:.2}, 2SPSA {z_spsa:.2} (limit 4, 1e6 draws each)"),
        t
    ));
}

const BIAS_CS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[test]
fn ac2_bias_order() {
    let t = Instant::now();
    let problem = SkewedQuartic::new(5, 0.0).unwrap();
    let theta = Vector::from_vec(vec![0.3, -0.2, 0.5, 0.1, -0.4]);
    let g = problem.gradient(&theta);
    let h = problem.hessian(&theta);
    let draws = 1_000_000;
    let mut oracle = FnOracle::new(5, |x: &Vector| problem.value(x));
    let mut grad_bias = Vec::new();
    let mut hess_bias = Vec::new();
    let mut grad_z = 0.0f64;
    for (ci, &c) in BIAS_CS.iter().enumerate() {
        // Control variates with known mean: (g.u) u has mean g, and
        // (u^T H u / 2)(u u^T - I) has mean H, so the corrected samples have
        // the bias as their mean and small variance.
        let mut stream = RandomStream::new(202, ci as u64);
        let mut gsum = Vector::zeros(5);
        let mut gsq = Vector::zeros(5);
        let mut hsum = Matrix::zeros(5, 5);
        for _ in 0..draws {
            let u = stream.standard_normal_vector(5);
            let ghat = estimate_gradient(GradientEstimator::TwoPointCentral, &mut oracle, &theta, c, &u).unwrap();
            let gd = ghat - &*u * g.dot(&u);
            gsq += gd.component_mul(&gd);
            gsum += gd;
            let hhat = estimate_hessian(HessianEstimator::ThreePoint, &mut oracle, &theta, c, &u).unwrap();
            let cv = (&*u * u.transpose() - Matrix::identity(5, 5)) * (0.5 * u.dot(&(&h * &*u)));
            hsum += hhat - cv;
        }
        let n = draws as f64;
        let gmean = &gsum / n;
        // Independent check of the measured gradient bias against the
        // closed-form c^2/6 E[f'''(u,u,u) u].
        let exact = problem.third_derivative_gaussian_moment(&theta) * (c * c / 6.0);
        let gse = (&gsq / n - gmean.component_mul(&gmean)).map(|v| (v / n).sqrt());
        for i in 0..5 {
            grad_z = grad_z.max((gmean[i] - exact[i]).abs() / gse[i]);
        }
        grad_bias.push(gmean.norm());
        hess_bias.push((&hsum / n).norm());
    }
    let gs = log_slope(&BIAS_CS, &grad_bias);
    let hs = log_slope(&BIAS_CS, &hess_bias);
    let pass = (1.7..=2.3).contains(&gs) && (1.6..=2.4).contains(&hs) && grad_z < 4.0 && t.elapsed().as_secs() < 300;
    assert!(report(
        "AC2",
        pass,
        format!(
            "bias slopes: gradient {gs:.3} (band [1.7, 2.3]), Hessian {hs:.3} (band [1.6, 2.4]); \
             gradient bias vs closed form max z {grad_z:.2}; |bias_g| {}, |bias_H| {}",
            sci(&grad_bias),
            sci(&hess_bias)
        ),
        t
    ));
}

#[test]
fn ac3_variance_order() {
    let t = Instant::now();
    let problem = SkewedQuartic::new(5, 0.1).unwrap();
    let theta = Vector::zeros(5);
    let draws = 1_000_000;
    let mut grad_m2 = Vec::new();
    let mut hess_m2: Vec<Matrix> = Vec::new();
    for (ci, &c) in BIAS_CS.iter().enumerate() {
        let mut oracle = ObjectiveOracle::seeded(&problem, 300 + ci as u64);
        let mut stream = RandomStream::new(303, ci as u64);
        let mut g2 = 0.0;
        let mut h2 = Matrix::zeros(5, 5);
        for _ in 0..draws {
            let u = stream.standard_normal_vector(5);
            let b = estimate_bundle_shared(&mut oracle, &theta, c, &u).unwrap();
            g2 += b.gradient.norm_squared();
            h2 += b.hessian.component_mul(&b.hessian);
        }
        grad_m2.push(g2 / draws as f64);
        hess_m2.push(h2 / draws as f64);
    }
    let gs = log_slope(&BIAS_CS, &grad_m2);
    let mut hmin = f64::INFINITY;
    let mut hmax = f64::NEG_INFINITY;
    for i in 0..5 {
        for j in 0..5 {
            let e: Vec<f64> = hess_m2.iter().map(|m| m[(i, j)]).collect();
            let s = log_slope(&BIAS_CS, &e);
            hmin = hmin.min(s);
            hmax = hmax.max(s);
        }
    }
    let pass = (-2.3..=-1.7).contains(&gs) && hmin >= -4.4 && hmax <= -3.6 && t.elapsed().as_secs() < 300;
    assert!(report(
        "AC3",
        pass,
        format!(
            "second-moment slopes: gradient {gs:.3} (band [-2.3, -1.7]); Hessian entries in [{hmin:.3}, {hmax:.3}] (band [-4.4, -3.6])"
        ),
        t
    ));
}

/// Quadratic testbed shared by AC4 and AC6.
struct StrongConvergence {
    problem: QuadraticProblem,
    theta0: ParameterVector,
    traces: Vec<RunTrace>,
    seconds: f64,
}

fn strong_convergence_runs() -> &'static StrongConvergence {
    static RUNS: OnceLock<StrongConvergence> = OnceLock::new();
    RUNS.get_or_init(|| {
        let t = Instant::now();
        let problem = QuadraticProblem::diagonal(&[1.0, 2.0, 3.0, 4.0], 0.01).unwrap();
        let theta0 = ParameterVector::from_element(4, 1.0).unwrap();
        let schedule = GainSchedule::new(2.0, 20.0, 1.0, 1.0, 1.0 / 6.0, WeightSchedule::Harmonic).unwrap();
        let config = SolverConfig::new(schedule, 50_000, 12).with_pd_map(PdMap::SqrtMap {
            epsilon: EpsilonSchedule::default(),
        });
        let traces = (0..10u64)
            .map(|r| {
                let mut oracle = ObjectiveOracle::new(
                    &problem,
                    RandomStream::for_replicate(404, r, StreamPurpose::Noise),
                    RandomStream::for_replicate(404, r, StreamPurpose::AuxNoise),
                );
                let mut stream = RandomStream::for_replicate(404, r, StreamPurpose::Perturbation);
                run_stein_second_order(&mut oracle, &config, &theta0, &mut stream).unwrap()
            })
            .collect();
        StrongConvergence { problem, theta0, traces, seconds: t.elapsed().as_secs_f64() }
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

#[test]
fn ac4_strong_convergence() {
    let t = Instant::now();
    let runs = strong_convergence_runs();
    let h = runs.problem.hessian();
    let start = runs.theta0.norm();
    let theta_ratio: Vec<f64> = runs.traces.iter().map(|tr| tr.final_theta().norm() / start).collect();
    let h_spec = |m: &Matrix| m.clone().symmetric_eigen().eigenvalues.amax();
    let h_ratio: Vec<f64> = runs.traces.iter().map(|tr| h_spec(&(&tr.final_hbar - h)) / h_spec(h)).collect();
    let h_ratio_fro: Vec<f64> = runs.traces.iter().map(|tr| (&tr.final_hbar - h).norm() / h.norm()).collect();
    let med_theta = median(theta_ratio.clone());
    let med_h = median(h_ratio.clone());
    let worst_h = h_ratio.iter().chain(&h_ratio_fro).copied().fold(0.0, f64::max);
    let pass = med_theta < 0.05 && med_h < 0.3 && worst_h < 0.3 && runs.seconds < 600.0;
    assert!(report(
        "AC4",
        pass,
        format!(
            "median |theta_K - theta*| / |theta_0 - theta*| = {med_theta:.3e} (< 0.05); median |H̄_K - H|/|H| = {med_h:.3e}, \
             worst over replicates and spectral/Frobenius norms {worst_h:.3e} (< 0.3); runs took {:.1}s",
            runs.seconds
        ),
        t
    ));
}

#[test]
fn ac5_stein_vs_2spsa_on_skewed_quartic() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = |solver: &str| {
        let mut raw = RawConfig::parse(
            "problem = skewed_quartic\ndim = 20\nnoise_variance = 0.1\niterations = 2000\nreplicates = 10\n\
             queries_per_iter = 12\nbase_seed = 1\ntheta0 = uniform:5\npd_map = sqrt\n",
        )
        .unwrap();
        raw.insert("solver", solver);
        raw.insert("output_dir", dir.path().join(solver).to_str().unwrap());
        ExperimentConfig::from_raw(&raw).unwrap()
    };
    let (cmp, _, _) = compare_solvers(&config("stein2"), &config("2spsa"), None).unwrap();
    let pass = cmp.mean_a <= cmp.mean_b && cmp.win_rate_a() >= 0.6 && t.elapsed().as_secs() < 900;
    println!("{}", cmp.render());
    assert!(report(
        "AC5",
        pass,
        format!(
            "mean final normalized distance: Stein {:.4e}, 2SPSA {:.4e}; Stein wins {}/{} paired replicates (need mean <= and >= 60%)",
            cmp.mean_a,
            cmp.mean_b,
            cmp.wins_a,
            cmp.pairs.len()
        ),
        t
    ));
}

#[test]
fn ac6_rms_rate_exponent() {
    let t = Instant::now();
    let runs = strong_convergence_runs();
    let curve = rms_error_curve(&runs.traces, &runs.problem.optimum()).unwrap();
    // Log-spaced fit grid over [1e3, 5e4].
    let mut grid: Vec<usize> = (0..=40).map(|i| (1e3 * 50f64.powf(i as f64 / 40.0)).round() as usize).collect();
    grid.dedup();
    let sub = AggregateCurve {
        x: grid.clone(),
        queries: grid.iter().map(|&k| curve.queries[k]).collect(),
        mean: grid.iter().map(|&k| curve.mean[k]).collect(),
        stderr: grid.iter().map(|&k| curve.stderr[k]).collect(),
        n_replicates: curve.n_replicates,
    };
    let slope = fit_rate_exponent(&sub, 1_000, 50_000).unwrap();
    let pass = (-0.45..=-0.22).contains(&slope);
    assert!(report(
        "AC6",
        pass,
        format!(
            "RMS error slope over k in [1e3, 5e4] = {slope:.3} (band [-0.45, -0.22], theory -1/3); RMS {:.3e} -> {:.3e}",
            curve.mean[1_000], curve.mean[50_000]
        ),
        t
    ));
}

#[test]
fn ac7_normality_moments() {
    let t = Instant::now();
    let problem = QuadraticProblem::diagonal(&[1.0, 2.0], 0.1).unwrap();
    let schedule = GainSchedule::new(2.0, 20.0, 1.0, 1.0, 1.0 / 6.0, WeightSchedule::Harmonic).unwrap();
    let config = SolverConfig::new(schedule, 20_000, 3).with_pd_map(PdMap::SqrtMap {
        epsilon: EpsilonSchedule::default(),
    });
    let theta0 = ParameterVector::from_element(2, 1.0).unwrap();
    let d = normality_check_quadratic(&problem, &config, &theta0, 200, 707).unwrap();
    let se = d.mean_stderr();
    let z: Vec<f64> = (0..2).map(|i| (d.empirical_mean[i] - d.predicted_mean[i]) / se[i]).collect();
    let ratio: Vec<f64> = (0..2).map(|i| d.empirical_cov[(i, i)] / d.predicted_cov[(i, i)]).collect();
    let pass = d.diverged == 0
        && z.iter().all(|z| z.abs() <= 4.0)
        && ratio.iter().all(|r| (0.6..=1.4).contains(r))
        && t.elapsed().as_secs() < 1200;
    assert!(report(
        "AC7",
        pass,
        format!(
            "tau = {:.4}; mean/SE per coordinate {z:.2?} (|z| <= 4); empirical/predicted variance {ratio:.3?} (within ±40%); \
             predicted diag {:.4?}; diverged {}",
            d.tau,
            d.predicted_cov.diagonal().as_slice(),
            d.diverged
        ),
        t
    ));
}

#[test]
fn ac8_classification_smoke() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut raw = RawConfig::parse(
        "problem = correntropy\ndim = 10\nsamples = 1000\nseparation = 5\nkappa = 10\nbatch = 10\n\
         solver = stein2\nqueries_per_iter = 12\niterations = 2000\nreplicates = 5\nbase_seed = 8\ntheta0 = ones\n",
    )
    .unwrap();
    raw.insert("output_dir", dir.path().to_str().unwrap());
    let config = ExperimentConfig::from_raw(&raw).unwrap();
    let summary = run_experiment(&config, None).unwrap();
    let start = summary.loss_curve.mean[0];
    let end = *summary.loss_curve.mean.last().unwrap();
    let reduction = 1.0 - end / start;
    let pass = summary.completed().count() == 5 && reduction >= 0.5 && t.elapsed().as_secs() < 300;
    assert!(report(
        "AC8",
        pass,
        format!("mean full loss {start:.4} -> {end:.4} over 5 replicates, reduction {:.1}% (need >= 50%)", 100.0 * reduction),
        t
    ));
}

fn random_symmetric(p: usize, scale: f64, s: &mut RandomStream) -> Matrix {
    let a = Matrix::from_fn(p, p, |_, _| scale * s.standard_normal());
    (&a + a.transpose()) * 0.5
}

fn fd_gradient(f: &dyn Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    Vector::from_fn(x.len(), |i, _| {
        let mut e = Vector::zeros(x.len());
        e[i] = h;
        (f(&(x + &e)) - f(&(x - &e))) / (2.0 * h)
    })
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    diff / b.iter().map(|v| v.abs()).fold(1e-12, f64::max)
}

#[test]
fn ac9_invariant_suites() {
    let t = Instant::now();
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("  AC9 {name}: {} {detail}", if ok { "ok" } else { "FAILED" });
        if !ok {
            failures.push(name.to_string());
        }
    };

    // Hessian-estimate symmetry, bit-exact.
    let quartic = SkewedQuartic::new(6, 0.1).unwrap();
    let mut oracle = ObjectiveOracle::seeded(&quartic, 9);
    let mut s = RandomStream::new(909, 0);
    let mut symmetric = true;
    for _ in 0..500 {
        let theta = s.standard_normal_vector(6);
        let u = s.standard_normal_vector(6);
        for kind in [
            HessianEstimator::OnePoint,
            HessianEstimator::TwoForward,
            HessianEstimator::TwoCentral,
            HessianEstimator::ThreePoint,
        ] {
            let m = estimate_hessian(kind, &mut oracle, &theta, 0.3, &u).unwrap();
            symmetric &= m == m.transpose();
        }
        let m = estimate_bundle_shared(&mut oracle, &theta, 0.3, &u).unwrap().hessian;
        symmetric &= m == m.transpose();
        let d = s.rademacher_vector(6);
        let dt = s.rademacher_vector(6);
        let m = estimate_2spsa_bundle(&mut oracle, &theta, 0.3, 0.2, &d, &dt).unwrap().hessian;
        symmetric &= m == m.transpose();
    }
    check("Hessian symmetry", symmetric, "(3000 estimates, exact equality with transpose)".into());

    // PD-map floor.
    let mut worst = f64::INFINITY;
    for i in 0..2000 {
        let p = 1 + i % 7;
        let h = random_symmetric(p, 3.0, &mut s);
        let delta = 10f64.powf(s.uniform(-6.0, 1.0));
        for map in [
            PdMap::EigenClamp { floor: DeltaFloor::absolute(delta) },
            PdMap::DampShift { floor: DeltaFloor::absolute(delta) },
        ] {
            let m = apply_pd_map(&map, &h, i).unwrap();
            worst = worst.min(symmetric_lambda_min(&m) - delta);
        }
        let eps = EpsilonSchedule::default();
        let m = apply_pd_map(&PdMap::SqrtMap { epsilon: eps }, &h, i).unwrap();
        worst = worst.min(symmetric_lambda_min(&m) - eps.at(i).sqrt());
    }
    check("PD floor", worst >= -1e-10, format!("(min lambda_min - floor = {worst:.3e})"));

    // Query ledger.
    let quad = QuadraticProblem::diagonal(&[1.0, 2.0, 3.0], 0.05).unwrap();
    let theta0 = ParameterVector::from_element(3, 1.0).unwrap();
    let sched = GainSchedule::new(0.5, 10.0, 0.602, 0.5, 0.101, WeightSchedule::Harmonic).unwrap();
    let sqrt = PdMap::SqrtMap { epsilon: EpsilonSchedule::default() };
    let mut ledger_ok = true;
    for (solver, qpi, blocking, warm) in [
        ("first_order", 2u64, None, 0usize),
        ("first_order", 6, Some(0.5), 0),
        ("stein2", 3, None, 0),
        ("stein2", 12, Some(1.0), 5),
        ("2spsa", 4, None, 0),
        ("2spsa", 12, Some(0.1), 3),
    ] {
        let k = 37;
        let mut config = SolverConfig::new(sched, k, qpi).with_pd_map(sqrt).with_warm_start(warm);
        if let Some(tol) = blocking {
            config = config.with_blocking(tol);
        }
        let mut o = ObjectiveOracle::seeded(&quad, 1);
        let mut st = RandomStream::new(2, 0);
        let trace = match solver {
            "first_order" => run_first_order(&mut o, &config, &theta0, &mut st),
            "stein2" => run_stein_second_order(&mut o, &config, &theta0, &mut st),
            _ => run_2spsa(&mut o, &config, &theta0, &mut st, SecondPerturbation { c: 0.5, gamma: 0.101 }),
        }
        .unwrap();
        let per_iter = qpi + if blocking.is_some() { 2 } else { 0 };
        let warm_cost = warm as u64 * 2 * (qpi / 2).max(1);
        let expected = k as u64 * per_iter + warm_cost;
        ledger_ok &= o.query_count() == expected && trace.last().queries == expected;
        ledger_ok &= trace.records.windows(2).all(|w| w[1].k == w[0].k + 1 && w[1].queries == w[0].queries + per_iter);
    }
    check("query ledger", ledger_ok, "(6 solver/budget/blocking/warm-start combinations)".into());

    // Determinism of written CSVs.
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let cfg = |dir: &std::path::Path, solver: &str| {
        let mut raw = RawConfig::parse(
            "problem = skewed_quartic\ndim = 8\niterations = 150\nreplicates = 4\nbase_seed = 77\ntheta0 = uniform:2\n",
        )
        .unwrap();
        raw.insert("solver", solver);
        raw.insert("output_dir", dir.join(solver).to_str().unwrap());
        ExperimentConfig::from_raw(&raw).unwrap()
    };
    let mut identical = true;
    for solver in ["first_order", "stein2", "2spsa"] {
        run_experiment(&cfg(d1.path(), solver), Some(1)).unwrap();
        run_experiment(&cfg(d2.path(), solver), Some(4)).unwrap();
        for f in ["trace_r0.csv", "trace_r3.csv", "summary.csv", "replicates.csv"] {
            let a = std::fs::read(d1.path().join(solver).join(f)).unwrap();
            let b = std::fs::read(d2.path().join(solver).join(f)).unwrap();
            identical &= a == b;
        }
    }
    check("determinism", identical, "(three solvers, 1 vs 4 workers, byte comparison)".into());

    // Analytic vs finite-difference derivatives.
    let quartic = SkewedQuartic::new(20, 0.0).unwrap();
    let mut fd_worst = 0.0f64;
    for _ in 0..5 {
        let x = Vector::from_fn(20, |_, _| s.uniform(-2.0, 2.0));
        let f = |y: &Vector| quartic.value(y);
        let g = quartic.gradient(&x);
        fd_worst = fd_worst.max(rel_err(fd_gradient(&f, &x, 1e-5).as_slice(), g.as_slice()));
        let hess = quartic.hessian(&x);
        let fd_h = Matrix::from_fn(20, 20, |i, j| {
            let mut e = Vector::zeros(20);
            e[j] = 1e-5;
            (quartic.gradient(&(&x + &e))[i] - quartic.gradient(&(&x - &e))[i]) / 2e-5
        });
        fd_worst = fd_worst.max(rel_err(fd_h.as_slice(), hess.as_slice()));
    }
    let data = generate_synthetic_classification(4, 200, 2.0, &mut RandomStream::new(5, 5)).unwrap();
    let ce = CorrEntropyProblem::new(&data, 2.0, 10).unwrap();
    for _ in 0..5 {
        let x = Vector::from_fn(4, |_, _| s.uniform(-1.0, 1.0));
        let f = |y: &Vector| ce.full_loss(y);
        fd_worst = fd_worst.max(rel_err(fd_gradient(&f, &x, 1e-5).as_slice(), ce.gradient(&x).as_slice()));
        let fd_h = Matrix::from_fn(4, 4, |i, j| {
            let mut e = Vector::zeros(4);
            e[j] = 1e-5;
            (ce.gradient(&(&x + &e))[i] - ce.gradient(&(&x - &e))[i]) / 2e-5
        });
        fd_worst = fd_worst.max(rel_err(fd_h.as_slice(), ce.hessian(&x).as_slice()));
    }
    check("finite differences", fd_worst < 1e-5, format!("(worst relative error {fd_worst:.2e})"));

    // LIBSVM round trip and rejections.
    let mut rt_ok = true;
    for trial in 0..50 {
        let dim = 1 + trial % 9;
        let samples = (0..1 + trial % 13)
            .map(|i| {
                let indices: Vec<usize> = (0..dim).filter(|_| s.uniform(0.0, 1.0) < 0.6).collect();
                let values = indices.iter().map(|_| s.standard_normal() * 10f64.powi((i % 5) as i32 - 2)).collect();
                Sample { label: if s.uniform(0.0, 1.0) < 0.5 { 1.0 } else { -1.0 }, indices, values }
            })
            .collect();
        let data = LabeledData { dim, samples };
        let mut buf = Vec::new();
        write_libsvm(&data, &mut buf).unwrap();
        rt_ok &= parse_libsvm(buf.as_slice(), Some(dim)).unwrap() == data;
    }
    let bad = [
        "+1 2:1 1:3\n",
        "+1 0:1\n",
        "+1 1:abc\n",
        "2 1:1\n",
        "+1 1:1 1:2\n",
        "+1 5:1\n",
        "+1 1\n",
        "x 1:1\n",
    ];
    let rejected = bad.iter().all(|b| parse_libsvm(b.as_bytes(), Some(3)).is_err());
    check(
        "LIBSVM",
        rt_ok && rejected,
        format!("(50 random round trips {}, {} malformed inputs rejected: {rejected})", if rt_ok { "exact" } else { "MISMATCH" }, bad.len()),
    );

    let pass = failures.is_empty();
    assert!(report(
        "AC9",
        pass,
        if pass { "all invariant suites hold".to_string() } else { format!("failed: {failures:?}") },
        t
    ));
}
