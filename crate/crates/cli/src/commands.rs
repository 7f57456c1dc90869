use std::io::Write;

use anyhow::Result;
use dnlw_kam::dynamics::{
    blow_up_certificate, dh_dt_identity, dm_dt_identity, integrate, mean_average_trajectory, IdentityReport,
    IntegratorConfig,
};
use dnlw_kam::model::{linear_solution, GTerm, ModelParams, NonlinearitySpec};
use dnlw_kam::normal_form::{
    asymptotic_fit, birkhoff_third_order, default_tau, homological_residual, melnikov_density, solve_homological,
    toeplitz_decompose, NormalForm,
};
use dnlw_kam::qp::{continuation, lyapunov_exponent, newton_qp, ContinuationConfig, QpSolution};
use dnlw_kam::vf_algebra::io::{from_text, to_json};
use dnlw_kam::vf_algebra::random::{random_reversible_field, RandomShape};
use dnlw_kam::vf_algebra::{majorant_norm, Component, NormContext, VectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, NormalFormChoice};
use crate::output::Artifacts;
use crate::{algebra, Invalid, NonexistenceKind};

/// Outcome of a command whose artifacts were produced.
pub enum Verdict {
    Pass,
    /// Artifacts are still written; the process exits with the numerical status.
    Fail(String),
}

pub fn algebra_check(cfg: &ExperimentConfig, seed: u64, out: &mut Artifacts) -> Result<Verdict> {
    let rep = algebra::run(&cfg.algebra, seed)?;
    out.json("algebra_check.json", &rep)?;
    Ok(if rep.passed { Verdict::Pass } else { Verdict::Fail("algebra property suite found violations".into()) })
}

fn normal_form_for(cfg: &ExperimentConfig, p: &ModelParams<f64>, choice: NormalFormChoice) -> Result<NormalForm<f64>> {
    Ok(match choice {
        NormalFormChoice::Unperturbed => NormalForm::unperturbed(p.mass(), p.sites(), p.truncation().j_max)?,
        NormalFormChoice::Birkhoff => {
            birkhoff_third_order(p, &cfg.g_or(NonlinearitySpec::leading()))?.normal_form_at(p.xi())?
        }
    })
}

#[derive(Serialize)]
struct BirkhoffSummary<'a> {
    twist: &'a [Vec<f64>],
    normal_shift: Vec<(i32, Vec<f64>)>,
    omega: Vec<f64>,
    twist_condition: f64,
    resonant_terms: usize,
    generator_terms: usize,
    near_resonances: usize,
    non_diagonal: usize,
    min_divisor: f64,
}

pub fn birkhoff(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Verdict> {
    let p = cfg.model()?;
    let b = birkhoff_third_order(p, &cfg.g_or(NonlinearitySpec::leading()))?;
    let nf = b.normal_form_at(p.xi())?;
    out.json(
        "birkhoff.json",
        &BirkhoffSummary {
            twist: &b.twist,
            normal_shift: b.normal_shift.iter().map(|(&j, r)| (j, r.clone())).collect(),
            omega: b.omega_at(p.xi()),
            twist_condition: nf.twist_condition(),
            resonant_terms: b.resonant.len(),
            generator_terms: b.generator.len(),
            near_resonances: b.near_resonances.len(),
            non_diagonal: b.non_diagonal,
            min_divisor: b.min_divisor,
        },
    )?;
    out.json_text("normal_form.json", nf.to_json()?);
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
struct HomologicalCase {
    terms: usize,
    norm: f64,
    residual: f64,
    resonant_terms: usize,
    skipped: usize,
    max_imag_correction: f64,
}

pub fn homological(cfg: &ExperimentConfig, seed: u64, out: &mut Artifacts) -> Result<Verdict> {
    let p = cfg.model()?;
    let h = &cfg.homological;
    let nf = normal_form_for(cfg, p, h.normal_form)?;
    let ctx = NormContext::new(0.5, 0.5, 0.1, 0.1, 1.0)?;
    let fields: Vec<VectorField<f64>> = match &h.field {
        Some(text) => vec![from_text(text, p.sites().clone(), *p.truncation())?],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = RandomShape::new(p.truncation().d_max, 2);
            (0..h.cases)
                .map(|_| random_reversible_field(&mut rng, p.sites(), *p.truncation(), h.terms, shape))
                .collect()
        }
    };
    let mut cases = Vec::new();
    let mut last = None;
    let mut ok = true;
    for f in &fields {
        let sol = solve_homological(&nf, f, h.floor)?;
        let norm = majorant_norm(f, &ctx);
        let residual = homological_residual(&nf, f, &sol, &ctx)?;
        let max_imag = sol
            .correction
            .terms()
            .filter(|(k, _)| matches!(k.component, Component::Z(j) if k.alpha == vec![(j, 1)] && k.beta.is_empty()))
            .map(|(_, c)| c.re.abs())
            .fold(0.0, f64::max);
        ok &= residual <= 1e-10 * norm && max_imag <= 1e-12;
        cases.push(HomologicalCase {
            terms: f.len(),
            norm,
            residual,
            resonant_terms: sol.resonant.len(),
            skipped: sol.skipped_count(),
            max_imag_correction: max_imag,
        });
        last = Some(sol);
    }
    out.json("homological.json", &cases)?;
    if let Some(sol) = last {
        out.json_text("generator.json", to_json(&sol.generator)?);
        out.json_text("correction.json", to_json(&sol.correction)?);
    }
    Ok(if ok { Verdict::Pass } else { Verdict::Fail("homological residual above 1e-10·‖P‖".into()) })
}

pub fn melnikov_scan(cfg: &ExperimentConfig, seed: u64, out: &mut Artifacts) -> Result<Verdict> {
    let p = cfg.model()?;
    let m = &cfg.melnikov;
    if m.scales.is_empty() {
        return Err(Invalid("melnikov.scales is empty".into()).into());
    }
    let b = birkhoff_third_order(p, &cfg.g_or(NonlinearitySpec::leading()))?;
    let tau = m.tau.unwrap_or_else(|| default_tau(p.sites().plus().len()));
    let j_max = m.j_max.unwrap_or(p.truncation().j_max);
    let points = m
        .scales
        .iter()
        .map(|&s| melnikov_density(&b, s, m.samples, seed, m.gamma, tau, m.k_max, j_max))
        .collect::<dnlw_kam::Result<Vec<_>>>()?;
    out.csv("melnikov.csv", |w| {
        writeln!(w, "scale,density")?;
        for d in &points {
            writeln!(w, "{:e},{:e}", d.scale, d.density)?;
        }
        Ok(())
    })?;
    out.json("melnikov.json", &serde_json::json!({ "tau": tau, "k_max": m.k_max, "j_max": j_max, "points": points }))?;
    Ok(Verdict::Pass)
}

pub fn asymptotics(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Verdict> {
    let p = cfg.model()?;
    let a = &cfg.asymptotics;
    let nf = normal_form_for(cfg, p, a.normal_form)?;
    let window: Vec<(i32, f64)> =
        (a.j_min..=a.j_max).filter_map(|j| nf.big_omega_of(j).map(|w| (j, w))).collect();
    let fit = asymptotic_fit(&window, p.mass())?;
    let toeplitz = toeplitz_decompose(&window)?;
    out.csv("asymptotics.csv", |w| {
        writeln!(w, "j,Omega,residual")?;
        for &(j, om, r) in &fit.rows {
            writeln!(w, "{j},{om:.17e},{r:e}")?;
        }
        Ok(())
    })?;
    out.json("asymptotics.json", &serde_json::json!({ "fit": fit, "toeplitz": toeplitz }))?;
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
struct QpReport {
    residual: f64,
    iterations: usize,
    residuals: Vec<f64>,
    quadratic_constant: Option<f64>,
    omega: Vec<f64>,
    linear_omega: Vec<f64>,
}

fn solve_qp(cfg: &ExperimentConfig) -> Result<(QpSolution<f64>, dnlw_kam::qp::NewtonReport)> {
    let p = cfg.model()?;
    Ok(newton_qp(&linear_solution(p), p, &cfg.g_or(NonlinearitySpec::leading()), &cfg.newton)?)
}

pub fn qp_solve(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Verdict> {
    let (sol, rep) = solve_qp(cfg)?;
    out.json_text("qp_solution.json", sol.to_json()?);
    out.json(
        "newton.json",
        &QpReport {
            residual: rep.residual,
            iterations: rep.iterations,
            residuals: rep.residuals,
            quadratic_constant: rep.quadratic_constant,
            omega: sol.omega.clone(),
            linear_omega: cfg.model()?.tangential_lambdas(),
        },
    )?;
    Ok(Verdict::Pass)
}

pub fn continuation_run(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Verdict> {
    let p = cfg.model()?;
    let c = &cfg.continuation;
    let d = p.sites().plus().len();
    let dir = c.direction.clone().unwrap_or_else(|| vec![1.0; d]);
    let cc = ContinuationConfig { newton: cfg.newton.clone(), max_halvings: c.max_halvings };
    let r = continuation(p, &cfg.g_or(NonlinearitySpec::leading()), &dir, &c.targets, &cc)?;
    out.csv("continuation.csv", |w| r.write_csv(w))?;
    out.json("continuation_failures.json", &r.failures)?;
    let reached = r.path.last().map(|q| q.s) == c.targets.last().copied();
    Ok(if reached { Verdict::Pass } else { Verdict::Fail("continuation stopped before the last target".into()) })
}

pub fn simulate(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Verdict> {
    let s = &cfg.simulate;
    let g = cfg.g_or(NonlinearitySpec::leading());
    let (state, mass, qp) = if s.from_qp {
        let (sol, _) = solve_qp(cfg)?;
        (sol.state_at(0.0, s.grid_n), cfg.model()?.mass(), Some(sol))
    } else {
        (s.initial_state(), s.mass, None)
    };
    let tr = integrate(&state, &g, mass, &cfg.integrator)?;
    out.csv("trajectory.csv", |w| tr.write_csv(w))?;
    out.csv("snapshot.csv", |w| tr.final_state.write_csv(w))?;
    let t_end = tr.times.last().copied().unwrap_or(0.0);
    let gap = qp.map(|sol| tr.final_state.max_diff(&sol.state_at(t_end, s.grid_n)));
    out.json(
        "simulate.json",
        &serde_json::json!({
            "t_end": t_end,
            "blowup_time": tr.blowup_time,
            "max_error_estimate": tr.max_error_estimate(),
            "qp_gap": gap,
        }),
    )?;
    Ok(Verdict::Pass)
}

pub fn lyapunov(cfg: &ExperimentConfig, seed: u64, out: &mut Artifacts) -> Result<Verdict> {
    let (sol, _) = solve_qp(cfg)?;
    let lc = dnlw_kam::qp::LyapunovConfig { seed, ..cfg.lyapunov.clone() };
    let rep = lyapunov_exponent(&sol, cfg.model()?.mass(), &cfg.g_or(NonlinearitySpec::leading()), &lc)?;
    out.csv("lyapunov.csv", |w| {
        writeln!(w, "t,chi,scale")?;
        for q in &rep.points {
            writeln!(w, "{:e},{:e},{:e}", q.t, q.chi, q.scale)?;
        }
        Ok(())
    })?;
    out.json("lyapunov.json", &rep)?;
    Ok(Verdict::Pass)
}

fn identity_csv(out: &mut Artifacts, rep: &IdentityReport) -> Result<()> {
    out.csv("identity.csv", |w| {
        writeln!(w, "t,numerical,analytic")?;
        for i in 0..rep.times.len() {
            writeln!(w, "{:e},{:.17e},{:.17e}", rep.times[i], rep.numerical[i], rep.analytic[i])?;
        }
        Ok(())
    })
}

pub fn nonexistence(cfg: &ExperimentConfig, kind: NonexistenceKind, out: &mut Artifacts) -> Result<Verdict> {
    let s = &cfg.simulate;
    let pw = cfg.nonexistence.p;
    let default_g = match kind {
        NonexistenceKind::M | NonexistenceKind::Average => GTerm::new(1.0, 0, pw, 0),
        NonexistenceKind::H => GTerm::new(1.0, 0, 0, pw),
        NonexistenceKind::Blowup => GTerm::new(1.0, 0, 0, 2),
    };
    let g = cfg.g_or(NonlinearitySpec::from_terms(vec![default_g]));
    let mut ic: IntegratorConfig = cfg.integrator.clone();
    if matches!(kind, NonexistenceKind::M | NonexistenceKind::H) {
        // difference quotients need uniformly spaced stored states
        ic.keep_states = true;
        ic.adaptive = false;
    }
    if kind == NonexistenceKind::Average {
        ic.keep_states = true;
    }
    let tr = integrate(&s.initial_state(), &g, s.mass, &ic)?;
    out.csv("trajectory.csv", |w| tr.write_csv(w))?;
    match kind {
        NonexistenceKind::M | NonexistenceKind::H => {
            let rep = if kind == NonexistenceKind::M { dm_dt_identity(&tr, pw)? } else { dh_dt_identity(&tr, pw)? };
            identity_csv(out, &rep)?;
            out.json("identity.json", &rep)?;
            if !rep.monotone {
                return Ok(Verdict::Fail("functional is not monotone along the run".into()));
            }
        }
        NonexistenceKind::Blowup => {
            let rep = blow_up_certificate(&tr);
            out.csv("blowup.csv", |w| {
                writeln!(w, "t,observed,bound")?;
                for r in &rep.rows {
                    writeln!(w, "{:e},{:.17e},{:.17e}", r.t, r.observed, r.bound)?;
                }
                Ok(())
            })?;
            out.json("blowup.json", &rep)?;
            if !rep.holds {
                return Ok(Verdict::Fail("comparison bound violated".into()));
            }
        }
        NonexistenceKind::Average => {
            let rep = mean_average_trajectory(&tr, pw, cfg.nonexistence.q)?;
            out.json("average.json", &rep)?;
        }
    }
    Ok(Verdict::Pass)
}
