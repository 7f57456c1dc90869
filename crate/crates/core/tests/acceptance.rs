//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use dnlw_kam::dynamics::*;
use dnlw_kam::model::*;
use dnlw_kam::normal_form::*;
use dnlw_kam::qp::*;
use dnlw_kam::vf_algebra::random::*;
use dnlw_kam::vf_algebra::*;
use dnlw_kam::Cplx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn algebra_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sites = SiteSet::new([1, 3]).unwrap();
    let trunc = Truncation::new(16, 8, 3);
    let shape = RandomShape::new(3, 2);
    let xm = VectorField::<f64>::momentum_field(&sites, trunc);

    let mut adjoint_err = 0.0f64;
    let mut adjoint_keys_ok = true;
    for _ in 0..500 {
        let key = random_key(&mut rng, &sites, &trunc, shape);
        let c: Cplx<f64> = random_coeff(&mut rng);
        let m = VectorField::from_terms(sites.clone(), trunc, [(key.clone(), c)]).unwrap();
        let b = lie_bracket(&m, &xm).unwrap();
        let pi = momentum(&key, &sites).unwrap() as f64;
        let want = Cplx::new(0.0, pi) * c;
        adjoint_keys_ok &= b.terms().all(|(k, _)| *k == key);
        adjoint_err = adjoint_err.max((b.coeff(&key) - want).norm());
    }

    let mut anti_err = 0.0f64;
    for _ in 0..500 {
        let x: VectorField<f64> = random_field(&mut rng, &sites, trunc, 6, shape);
        let y: VectorField<f64> = random_field(&mut rng, &sites, trunc, 6, shape);
        let xy = lie_bracket(&x, &y).unwrap();
        let yx = lie_bracket(&y, &x).unwrap();
        anti_err = anti_err.max(xy.add(&yx).unwrap().max_abs_coeff());
    }

    // degree ≤ 1 keeps nested brackets inside the truncation
    let wide = Truncation::new(16, 24, 3);
    let low = RandomShape::new(1, 1);
    let mut jacobi_err = 0.0f64;
    for _ in 0..100 {
        let f = |rng: &mut ChaCha8Rng| random_field::<f64, _>(rng, &sites, wide, 4, low);
        let (x, y, z) = (f(&mut rng), f(&mut rng), f(&mut rng));
        let br = |a: &VectorField<f64>, b: &VectorField<f64>| lie_bracket(a, b).unwrap();
        let sum = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).unwrap().add(&br(&z, &br(&x, &y))).unwrap();
        jacobi_err = jacobi_err.max(sum.max_abs_coeff());
    }

    let mut violations = 0;
    for _ in 0..100 {
        let k = rng.gen_range(1..=12u64);
        let a = rng.gen_range(0.05..1.0);
        let a2 = rng.gen_range(0.0..a);
        let x: VectorField<f64> = random_field(&mut rng, &sites, trunc, 20, shape);
        let ctx = NormContext::new(0.5, 0.5, a, 0.1, 1.0).unwrap();
        let lhs = majorant_norm(&project_momentum(&x, k, MomentumMode::High), &ctx.with_weight(a2));
        let rhs = (-(k as f64) * (a - a2)).exp() * majorant_norm(&x, &ctx);
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
    }

    let elapsed = start.elapsed();
    outcome(
        adjoint_keys_ok
            && adjoint_err <= 1e-12
            && anti_err <= 1e-10
            && jacobi_err <= 1e-10
            && violations == 0
            && elapsed < Duration::from_secs(60),
        format!(
            "adjoint err {adjoint_err:.1e} keys {adjoint_keys_ok}, antisymmetry {anti_err:.1e}, \
             Jacobi {jacobi_err:.1e}, penalization violations {violations}/100, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn symmetrization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sites = SiteSet::new([1, 3]).unwrap();
    let trunc = Truncation::new(16, 6, 3);
    let mut worst = 0.0f64;
    let mut changed = 0;
    for _ in 0..20 {
        let x: VectorField<f64> = random_reversible_field(&mut rng, &sites, trunc, 12, RandomShape::new(3, 2));
        let sx = symmetrize(&x);
        if x.max_coeff_diff(&sx) > 0.0 {
            changed += 1;
        }
        for _ in 0..200 {
            let u = random_even_point(&mut rng, &sites, 16, 0.5);
            let d = evaluate(&x, &u).unwrap().max_diff(&evaluate(&sx, &u).unwrap());
            worst = worst.max(d);
        }
    }
    outcome(
        worst < 1e-12 && changed > 0,
        format!("max |X(u) − SX(u)| = {worst:.2e} over 4000 points of E, {changed}/20 fields moved by S"),
    )
}

fn homological() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let sites = SiteSet::new([1, 3]).unwrap();
    let trunc = Truncation::new(16, 6, 3);
    let nf = NormalForm::unperturbed(1.0, &sites, 16).unwrap();
    let ctx = NormContext::new(0.5, 0.5, 0.1, 0.1, 1.0).unwrap();
    let (mut worst_rel, mut worst_im) = (0.0f64, 0.0f64);
    let mut preserving = true;
    for _ in 0..50 {
        let p: VectorField<f64> = random_reversible_field(&mut rng, &sites, trunc, 15, RandomShape::new(3, 2));
        let sol = solve_homological(&nf, &p, DEFAULT_DIVISOR_FLOOR).unwrap();
        let r = homological_residual(&nf, &p, &sol, &ctx).unwrap();
        worst_rel = worst_rel.max(r / majorant_norm(&p, &ctx));
        preserving &= check_reversibility_preserving(&sol.generator);
        for (key, &c) in sol.correction.terms() {
            if let Component::Z(j) = key.component {
                if key.alpha == vec![(j, 1)] && key.beta.is_empty() {
                    worst_im = worst_im.max((Cplx::new(0.0, 1.0) * c).im.abs());
                }
            }
        }
    }
    outcome(
        worst_rel <= 1e-10 && worst_im <= 1e-12 && preserving,
        format!("residual/‖P‖ {worst_rel:.1e}, max |Im i·P^zz| {worst_im:.1e}, generators preserving {preserving}"),
    )
}

fn window(nf: &NormalForm<f64>) -> Vec<(i32, f64)> {
    (8..=32).filter_map(|j| nf.big_omega_of(j).map(|w| (j, w))).collect()
}

fn asymptotics() -> Outcome {
    let sites = SiteSet::new([1]).unwrap();
    let nf0 = NormalForm::unperturbed(1.0, &sites, 32).unwrap();
    let f0 = asymptotic_fit(&window(&nf0), 1.0).unwrap();
    let xi = 1e-3;
    let params = ModelParams::new(1.0, sites, vec![xi], 128, Truncation::new(32, 8, 3)).unwrap();
    let b = birkhoff_third_order(&params, &NonlinearitySpec::leading()).unwrap();
    let f1 = asymptotic_fit(&window(&b.normal_form_at(&[xi]).unwrap()), 1.0).unwrap();
    outcome(
        f0.a_const.abs() <= 1e-10
            && f0.sup_jr <= 0.015625
            && f1.a_const.is_finite()
            && f1.sup_jr < 10.0 * xi,
        format!(
            "ξ=0: a {:.1e}, sup|j r_j| {:.4e}; ξ=1e-3: a {:.3e}, sup|j r_j| {:.3e}",
            f0.a_const, f0.sup_jr, f1.a_const, f1.sup_jr
        ),
    )
}

fn qp_params(xi: f64) -> ModelParams<f64> {
    ModelParams::new(1.0, SiteSet::new([1]).unwrap(), vec![xi], 256, Truncation::new(32, 8, 3)).unwrap()
}

fn birkhoff_vs_newton() -> Outcome {
    let start = Instant::now();
    let g = NonlinearitySpec::leading();
    let b = birkhoff_third_order(&qp_params(1e-3), &g).unwrap();
    let mut pts = Vec::new();
    for xi in [1e-2, 3e-3, 1e-3] {
        let p = qp_params(xi);
        let (s, _) = newton_qp(&linear_solution(&p), &p, &g, &NewtonConfig::default()).unwrap();
        let diff = (s.omega[0] - b.omega_at(&[xi])[0]).abs();
        pts.push((xi.ln(), diff.ln(), diff / (xi * xi)));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    let ratios: Vec<String> = pts.iter().map(|p| format!("{:.4}", p.2)).collect();
    let elapsed = start.elapsed();
    outcome(
        r2 > 0.99 && (slope - 2.0).abs() < 0.1 && elapsed < Duration::from_secs(600),
        format!("slope {slope:.4}, R² {r2:.6}, |Δω|/ξ² [{}], {:.1}s", ratios.join(", "), elapsed.as_secs_f64()),
    )
}

fn quasi_periodic() -> Outcome {
    let g = NonlinearitySpec::leading();
    let p = qp_params(1e-3);
    let (s, rep) = newton_qp(&linear_solution(&p), &p, &g, &NewtonConfig::default()).unwrap();

    let t_end = 20.0 * TAU / s.omega[0];
    let n = 64;
    let st = s.state_at(0.0, n);
    let cfg = IntegratorConfig { dt: 0.01, t_end, record_every: usize::MAX, ..Default::default() };
    let tr = integrate(&st, &g, 1.0, &cfg).unwrap();
    let gap = tr.final_state.max_diff(&s.state_at(t_end, n));

    let lyap = lyapunov_exponent(&s, 1.0, &g, &LyapunovConfig::default()).unwrap();
    let chi: Vec<String> = lyap.points.iter().map(|q| format!("χ({:.0e})={:.1e}", q.t, q.chi)).collect();
    outcome(
        rep.residual < 1e-10 && gap < 1e-6 && lyap.consistent_with_zero,
        format!("residual {:.1e} in {} its, gap {gap:.1e}, {}", rep.residual, rep.iterations, chi.join(" ")),
    )
}

fn melnikov_trend() -> Outcome {
    let params = ModelParams::new(1.0, SiteSet::new([1]).unwrap(), vec![1e-3], 128, Truncation::new(32, 8, 3)).unwrap();
    let b = birkhoff_third_order(&params, &NonlinearitySpec::leading()).unwrap();
    let tau = default_tau(1);
    let dens: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&s| melnikov_density(&b, s, 1000, 5, 1e-2, tau, 4, 32).unwrap().density)
        .collect();
    let nondecreasing = dens.windows(2).all(|w| w[1] >= w[0]);
    outcome(
        nondecreasing && dens[2] > 0.9,
        format!("τ={tau}, densities at 1e-2/1e-3/1e-4: {dens:?}"),
    )
}

fn non_existence() -> Outcome {
    let cfg = IntegratorConfig { dt: 0.01, t_end: 10.0, keep_states: true, adaptive: false, ..Default::default() };
    let s_m = FieldState::from_fn(64, |x: f64| 0.3 * x.cos() + 0.1 * (2.0 * x).sin(), |x: f64| {
        0.2 * x.sin() - 0.1 * (3.0 * x).cos()
    });
    let gm = NonlinearitySpec::from_terms(vec![GTerm::new(1.0, 0, 3, 0)]);
    let rm = dm_dt_identity(&integrate(&s_m, &gm, 0.0, &cfg).unwrap(), 3).unwrap();

    let s_h = FieldState::from_fn(64, |x: f64| 0.1 * x.cos() + 0.05 * (2.0 * x).sin(), |x: f64| {
        0.1 * x.sin() - 0.05 * (3.0 * x).cos()
    });
    let gh = NonlinearitySpec::from_terms(vec![GTerm::new(1.0, 0, 0, 3)]);
    let rh = dh_dt_identity(&integrate(&s_h, &gh, 0.0, &cfg).unwrap(), 3).unwrap();

    let cos = FieldState::from_fn(64, |x: f64| x.cos(), |_| 0.0);
    let cos_flux = flux_m(&cos, 3);

    let s_b = FieldState::from_fn(64, |_| 0.0, |x: f64| 1.0 + 0.1 * x.cos());
    let gb = NonlinearitySpec::from_terms(vec![GTerm::new(1.0, 0, 0, 2)]);
    let cb = IntegratorConfig { dt: 0.01, t_end: 2.0, ..Default::default() };
    let blow = blow_up_certificate(&integrate(&s_b, &gb, 0.0, &cb).unwrap());
    let flag = blow.flag_time.unwrap_or(f64::INFINITY);

    outcome(
        rm.max_defect <= 1e-6
            && rh.max_defect <= 1e-6
            && rm.monotone
            && rh.monotone
            && (cos_flux - 0.75 * PI).abs() <= 1e-6
            && flag < 1.0
            && blow.holds,
        format!(
            "dM/dt defect {:.1e} monotone {}, dH/dt defect {:.1e} monotone {}, cos flux − 3π/4 = {:.1e}, \
             flag at t={flag:.4} bound holds {} (margin {:.1e})",
            rm.max_defect,
            rm.monotone,
            rh.max_defect,
            rh.monotone,
            cos_flux - 0.75 * PI,
            blow.holds,
            blow.min_margin
        ),
    )
}

fn integrator() -> Outcome {
    let s0 = FieldState::from_fn(32, |x: f64| 0.5 * x.cos() + 0.2 * (2.0 * x).cos(), |x: f64| 0.1 * x.sin());
    let cfg = IntegratorConfig { dt: 0.005, t_end: 100.0, record_every: 1000, ..Default::default() };
    let tr = integrate(&s0, &NonlinearitySpec::zero(), 1.0, &cfg).unwrap();
    let e0 = tr.diagnostics[0].energy;
    let drift = tr.diagnostics.iter().map(|d| ((d.energy - e0) / e0).abs()).fold(0.0, f64::max);

    let lam = 5f64.sqrt();
    let t = 10.0;
    let s0 = FieldState::from_fn(16, |x: f64| (2.0 * x).cos(), |_| 0.0);
    let want = FieldState::from_fn(16, |x: f64| (lam * t).cos() * (2.0 * x).cos(), |x: f64| {
        -lam * (lam * t).sin() * (2.0 * x).cos()
    });
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let cfg = IntegratorConfig { dt, t_end: t, error_estimate: false, adaptive: false, ..Default::default() };
            integrate(&s0, &NonlinearitySpec::zero(), 1.0, &cfg).unwrap().final_state.max_diff(&want)
        })
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    outcome(
        drift <= 1e-8 && ratios.iter().all(|r| (r / 16.0 - 1.0).abs() <= 0.2),
        format!("energy drift {drift:.1e}, halving ratios {:.2} {:.2}", ratios[0], ratios[1]),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("algebra suite", algebra_suite),
        ("symmetrization on E", symmetrization),
        ("homological solver", homological),
        ("frequency asymptotics", asymptotics),
        ("Birkhoff vs Newton", birkhoff_vs_newton),
        ("quasi-periodic solutions", quasi_periodic),
        ("Melnikov density trend", melnikov_trend),
        ("non-existence certificates", non_existence),
        ("integrator", integrator),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
