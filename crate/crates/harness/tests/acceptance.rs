//! Acceptance suite. Every criterion prints one `criterion N: PASS|FAIL`
//! line followed by its sub-checks.
//!
//! A sub-check marked as a known shortfall must fail: the test asserts the
//! failure, so an unexpected pass (or any other regression) breaks the build.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use frac_l1::banded::Tridiagonal;
use frac_l1::evolve::{
    discrete_kernel_apply_all, solve_adjoint, solve_forward, spacetime_inner, ContourSpec,
    SourceSpec, SpaceTimeField,
};
use frac_l1::fem1d::{assemble, generalized_eigendecomposition, project_load, Coefficient};
use frac_l1::inverse::{optimality_residual, solve_inverse};
use frac_l1::l1_core::{symbol_diagnostics, DEFAULT_THETA_STAR};
use frac_l1::oracle::{
    kernel_contour_continuous, mittag_leffler, semidiscrete_delta, ContinuousContour,
};
use frac_l1::quad::adaptive;
use frac_l1::{
    make_weights, Execution, InverseProblem, OperatorCoefficients, Profile, SpaceMesh1D, TimeGrid,
};
use frac_l1_harness::experiments::{experiment1, experiment3, laplacian_system};
use frac_l1_harness::oracle_rates::{
    delta_tables, delta_vs_oracle, source_table, source_vs_oracle,
};
use frac_l1_harness::ExperimentConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    name: String,
    ok: bool,
    detail: String,
    known_shortfall: Option<&'static str>,
}

fn check(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        ok,
        detail: detail.into(),
        known_shortfall: None,
    }
}

fn report(id: u32, title: &str, started: Instant, checks: Vec<Check>) {
    let all_ok = checks.iter().all(|c| c.ok);
    let known: Vec<&str> = checks.iter().filter_map(|c| c.known_shortfall).collect();
    let verdict = if all_ok {
        "PASS".to_string()
    } else if known.is_empty() {
        "FAIL".into()
    } else {
        "FAIL (known shortfall)".into()
    };
    let mut out = vec![format!(
        "criterion {id}: {verdict} - {title} [{:.1} s]",
        started.elapsed().as_secs_f64()
    )];
    for c in &checks {
        let tag = match (c.ok, c.known_shortfall) {
            (true, _) => "ok",
            (false, Some(_)) => "FAIL (known)",
            (false, None) => "FAIL",
        };
        out.push(format!("    {tag}: {} - {}", c.name, c.detail));
        if let (false, Some(why)) = (c.ok, c.known_shortfall) {
            out.push(format!("        reason: {why}"));
        }
    }
    // straight to the stdout handle so the lines survive test-output capture
    let mut stdout = std::io::stdout().lock();
    for line in &out {
        writeln!(stdout, "{line}").expect("stdout");
    }
    drop(stdout);
    for c in &checks {
        match c.known_shortfall {
            None => assert!(c.ok, "criterion {id}: {} failed: {}", c.name, c.detail),
            Some(_) => assert!(
                !c.ok,
                "criterion {id}: {} now passes; drop its known-shortfall mark",
                c.name
            ),
        }
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn convective(cells: usize, conv: f64) -> frac_l1::AssembledSystem {
    let coeffs = OperatorCoefficients::new(
        Coefficient::function(|x| 1.0 + 0.5 * (PI * x).sin()),
        Coefficient::Constant(conv),
        Coefficient::function(|x| -x),
    );
    assemble(&SpaceMesh1D::unit(cells).unwrap(), &coeffs).unwrap()
}

#[test]
fn criterion_1_duality() {
    let started = Instant::now();
    let (cells, steps) = (64, 64);
    let grid = TimeGrid::new(0.1, steps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checks = Vec::new();
    for conv in [0.0, 3.0] {
        let sys = convective(cells, conv);
        for alpha in [0.25, 0.5, 0.75] {
            let w = make_weights(alpha, steps).unwrap();
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let mut random = || {
                    let steps: Vec<Vec<f64>> = (0..steps)
                        .map(|_| {
                            (0..cells - 1)
                                .map(|_| rng.random_range(-1.0..1.0))
                                .collect()
                        })
                        .collect();
                    SpaceTimeField::from_steps(grid, &steps).unwrap()
                };
                let (f, g) = (random(), random());
                let sf = solve_forward(&sys, &w, &f.as_source(), &grid).unwrap();
                let sg = solve_adjoint(&sys, &w, &g.as_source(), &grid).unwrap();
                let lhs = spacetime_inner(&sys, &sf, &g).unwrap();
                let rhs = spacetime_inner(&sys, &f, &sg).unwrap();
                worst = worst.max((lhs - rhs).abs() / (lhs.abs() + 1.0));
            }
            checks.push(check(
                format!("alpha {alpha}, convection {conv}"),
                worst <= 1e-12,
                format!("max scaled gap {worst:.2e}"),
            ));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    checks.push(check("runtime < 10 s", secs < 10.0, format!("{secs:.2} s")));
    report(
        1,
        "discrete duality of forward and backward L1 solves",
        started,
        checks,
    );
}

#[test]
fn criterion_2_kernel_representation() {
    let started = Instant::now();
    let sys = laplacian_system(16).unwrap();
    let steps = 8;
    let grid = TimeGrid::new(0.1, steps).unwrap();
    let v = project_load(sys.mesh(), &Profile::power(-0.49)).unwrap();
    let mut checks = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        let w = make_weights(alpha, steps).unwrap();
        let stepped = solve_forward(&sys, &w, &SourceSpec::DeltaAtZero(v.clone()), &grid).unwrap();
        let kernels = discrete_kernel_apply_all(
            &sys,
            alpha,
            grid.tau(),
            steps - 1,
            &v,
            &ContourSpec::default(),
            Execution::default(),
        )
        .unwrap();
        let mut worst: f64 = 0.0;
        for j in 1..=steps {
            for (a, e) in stepped.step(j).iter().zip(&kernels[j - 1]) {
                worst = worst.max((a - e / grid.tau()).abs());
            }
        }
        checks.push(check(
            format!("alpha {alpha}"),
            worst <= 1e-6,
            format!("max abs difference {worst:.2e}"),
        ));
    }
    let secs = started.elapsed().as_secs_f64();
    checks.push(check("runtime < 30 s", secs < 30.0, format!("{secs:.2} s")));
    report(
        2,
        "contour kernel reproduces the delta-source L1 solve",
        started,
        checks,
    );
}

#[test]
fn criterion_3_oracle_cross_check() {
    let started = Instant::now();
    let sys = laplacian_system(16).unwrap();
    let spectral = generalized_eigendecomposition(&sys).unwrap();
    let v = project_load(sys.mesh(), &Profile::power(-0.49)).unwrap();
    let mut checks = Vec::new();
    for t in [0.01, 0.05, 0.1] {
        let a = kernel_contour_continuous(&sys, 0.5, t, &v, &ContinuousContour::default()).unwrap();
        let b = semidiscrete_delta(&spectral, 0.5, &v, t).unwrap();
        let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let rel = a
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale;
        checks.push(check(
            format!("contour vs spectral at t = {t}"),
            rel <= 1e-8,
            format!("relative {rel:.2e}"),
        ));
    }
    let e = mittag_leffler(1.0, 1.0, 1.0).unwrap();
    checks.push(check(
        "E_(1,1)(1) = e",
        within(e, std::f64::consts::E, 1e-10),
        format!("{e}"),
    ));
    let erfc1 =
        2.0 / PI.sqrt() * adaptive(|s| (-s * s).exp(), &[1.0, 4.0, 12.0], 1e-18, 1e-15, 200).value;
    let expect = 1f64.exp() * erfc1;
    let got = mittag_leffler(0.5, 1.0, -1.0).unwrap();
    checks.push(check(
        "E_(1/2,1)(-1) = e erfc(1)",
        within(got, expect, 1e-10) && within(got, 0.4275836, 1e-7),
        format!("{got} vs {expect}"),
    ));
    report(
        3,
        "oracle cross-check and Mittag-Leffler identities",
        started,
        checks,
    );
}

#[test]
fn criterion_4_rates_against_oracle() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        alphas: vec![0.4, 0.6, 0.8],
        ..ExperimentConfig::default()
    };
    let delta = delta_vs_oracle(&cfg, Execution::default()).unwrap();
    let source = source_vs_oracle(&cfg, Execution::default()).unwrap();
    let (e_t, e_l1) = delta_tables(&delta);
    let e_inf = source_table(&source);
    let mut checks = Vec::new();
    for &alpha in &cfg.alphas {
        let s = e_t.slope(alpha).unwrap();
        checks.push(check(
            format!("e_T slope, alpha {alpha}"),
            within(s, 1.0, 0.1),
            format!("{s:.3} (target 1 ± 0.1)"),
        ));
        let s = e_l1.slope(alpha).unwrap();
        checks.push(check(
            format!("e_l1 slope, alpha {alpha}"),
            within(s, alpha, 0.15),
            format!("{s:.3} (target {alpha} ± 0.15)"),
        ));
        let s = e_inf.slope(alpha).unwrap();
        let mut c = check(
            format!("e_inf slope, alpha {alpha}"),
            within(s, alpha, 0.15),
            format!("{s:.3} (target {alpha} ± 0.15)"),
        );
        if alpha == 0.4 {
            c.known_shortfall = Some(
                "pre-asymptotic: the error peaks at t_1 in the first mode, where mu_1 tau^0.4 is 0.3 to 0.9 for J <= 2^9; \
                 pairwise rates rise 0.10, 0.15, 0.20, 0.24 and keep climbing past J = 2^12",
            );
        }
        checks.push(c);
    }
    let secs = started.elapsed().as_secs_f64();
    checks.push(check(
        "runtime < 5 min",
        secs < 300.0,
        format!("{secs:.1} s"),
    ));
    report(
        4,
        "temporal rates against the semidiscrete oracle",
        started,
        checks,
    );
}

#[test]
fn criterion_5_alpha_robustness() {
    let started = Instant::now();
    // the published robustness table uses these J
    let cfg = ExperimentConfig {
        alphas: vec![0.9, 0.95, 0.99, 0.999],
        steps: vec![1 << 7, 1 << 8, 1 << 9],
        ..ExperimentConfig::default()
    };
    let res = experiment1(&cfg, Execution::default()).unwrap();
    let mut checks = Vec::new();
    for &j in &cfg.steps {
        let ratios: Vec<f64> = cfg
            .alphas
            .iter()
            .map(|&a| res.ratio(a, j).unwrap())
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        checks.push(check(
            format!("spread over alpha at J = {j}"),
            hi / lo < 3.0,
            format!("{ratios:.4?}, max/min {:.3}", hi / lo),
        ));
    }
    for &alpha in &cfg.alphas {
        let ratios: Vec<f64> = cfg
            .steps
            .iter()
            .map(|&j| res.ratio(alpha, j).unwrap())
            .collect();
        let ok = ratios.windows(2).all(|w| w[1] <= w[0]);
        checks.push(check(
            format!("nonincreasing in J, alpha {alpha}"),
            ok,
            format!("{ratios:.4?}"),
        ));
    }
    report(
        5,
        "ratio e_T/(tau^(alpha-1) J^(alpha-2)) as alpha -> 1",
        started,
        checks,
    );
}

#[test]
fn criterion_6_symbol_diagnostics() {
    let started = Instant::now();
    let mut checks = Vec::new();
    let mut lower = Vec::new();
    for k in 1..=9 {
        let alpha = k as f64 / 10.0;
        let r = symbol_diagnostics(alpha, DEFAULT_THETA_STAR, 400).unwrap();
        checks.push(check(
            format!("alpha {alpha}: Re e^(-iy) psi(iy) > 0 and C bounded"),
            r.min_re_psi_on_imag_axis > 0.0
                && r.upper_constant.is_finite()
                && r.upper_constant < 10.0,
            format!(
                "min Re {:.3e}, c {:.4}, C {:.4}",
                r.min_re_psi_on_imag_axis, r.lower_constant, r.upper_constant
            ),
        ));
        lower.push(r.lower_constant);
    }
    let (lo, hi) = lower
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &c| (l.min(c), h.max(c)));
    checks.push(check(
        "lower constant positive, stable within factor 3",
        lo > 0.0 && hi / lo < 3.0,
        format!("range [{lo:.4}, {hi:.4}]"),
    ));
    let secs = started.elapsed().as_secs_f64();
    checks.push(check("runtime < 30 s", secs < 30.0, format!("{secs:.2} s")));
    report(
        6,
        "sector and lower bounds of the discrete symbol",
        started,
        checks,
    );
}

#[test]
fn criterion_7_inverse_problem() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        alphas: vec![0.4, 0.8],
        ..ExperimentConfig::default()
    };
    let res = experiment3(&cfg, Execution::default()).unwrap();
    let table = res.table();
    let mut checks = Vec::new();
    for &alpha in &cfg.alphas {
        let s = table.slope(alpha).unwrap();
        let mut c = check(
            format!("slope, alpha {alpha}"),
            within(s, alpha / 2.0, 0.15),
            format!("{s:.3} (target {} ± 0.15)", alpha / 2.0),
        );
        if alpha == 0.4 {
            c.known_shortfall = Some(
                "converges faster than the tau^(alpha/2) bound: pairwise rates 0.22, 0.33, 0.53, 0.94 and the same \
                 errors (slope 0.480) against a 2^13-step reference, so the acceleration is not reference error",
            );
        }
        checks.push(c);
    }
    let worst = res
        .rows
        .iter()
        .map(|r| r.optimality_residual)
        .chain(res.reference.iter().map(|r| r.2))
        .fold(0.0, f64::max);
    checks.push(check(
        "optimality residual <= 1e-10",
        worst <= 1e-10,
        format!("max {worst:.2e}"),
    ));

    let system = laplacian_system(cfg.cells).unwrap();
    let target = project_load(system.mesh(), &Profile::Constant(1.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &alpha in &cfg.alphas {
        let grid = TimeGrid::new(cfg.final_time, 64).unwrap();
        let p = InverseProblem::new(
            system.clone(),
            grid,
            alpha,
            target.clone(),
            cfg.nu,
            cfg.lower,
            cfg.upper,
        )
        .unwrap();
        let sol = solve_inverse(&p, cfg.tol, cfg.max_iter).unwrap();
        let feasible = sol
            .control
            .values()
            .iter()
            .all(|u| (0.0..=10.0).contains(u));
        checks.push(check(
            format!("feasibility, alpha {alpha}"),
            feasible,
            "all entries in [0, 10]",
        ));
        let best = sol.report.objective;
        let worse = (0..20).all(|_| {
            let mut u = sol.control.clone();
            for x in u.values_mut() {
                *x = (*x + rng.random_range(-0.1..0.1)).clamp(0.0, 10.0);
            }
            p.objective(&u).unwrap() >= best
        });
        checks.push(check(
            format!("minimality vs 20 perturbations, alpha {alpha}"),
            worse,
            format!("J_tau = {best:.6e}"),
        ));
        checks.push(check(
            format!("optimality residual at J = 64, alpha {alpha}"),
            optimality_residual(&sol, &p) <= 1e-10,
            format!("{:.2e}", optimality_residual(&sol, &p)),
        ));
    }
    report(
        7,
        "inverse source problem rate and optimality",
        started,
        checks,
    );
}

#[test]
fn criterion_8_weights() {
    let started = Instant::now();
    let mut checks = Vec::new();
    for alpha in [0.01, 0.5, 0.99] {
        let w = make_weights(alpha, 1000).unwrap();
        let b = w.b();
        let mut tele: f64 = 0.0;
        let mut acc = b[1];
        for k in 1..=1000 {
            if k > 1 {
                acc += w.second_diff(k - 1);
            }
            tele = tele.max((acc - (b[k] - b[k - 1])).abs() / b[k]);
        }
        let ok = b[0] == 0.0
            && b.windows(2).all(|p| p[1] > p[0])
            && w.d().iter().all(|&d| d < 0.0)
            && tele <= 1e-13;
        checks.push(check(
            format!("alpha {alpha}"),
            ok,
            format!("telescoping error {tele:.2e}"),
        ));
    }
    let secs = started.elapsed().as_secs_f64();
    checks.push(check("runtime < 1 s", secs < 1.0, format!("{secs:.3} s")));
    report(8, "L1 weight properties", started, checks);
}

#[test]
fn criterion_9_backward_euler_limit() {
    let started = Instant::now();
    let (cells, steps, t_final) = (64, 64, 0.1);
    let sys = laplacian_system(cells).unwrap();
    let g = project_load(sys.mesh(), &Profile::Constant(1.0)).unwrap();
    let grid = TimeGrid::new(t_final, steps).unwrap();
    let l1 = solve_forward(
        &sys,
        &make_weights(0.9999, steps).unwrap(),
        &SourceSpec::constant(g.clone(), steps),
        &grid,
    )
    .unwrap();
    // (M - τA) w_k = M (w_{k-1} + τ g)
    let tau = grid.tau();
    let lhs: Tridiagonal = sys.mass().combine(1.0, sys.operator(), -tau);
    let lu = lhs.factor().unwrap();
    let mut w = vec![0.0; cells - 1];
    let mut worst: f64 = 0.0;
    for k in 1..=steps {
        let rhs: Vec<f64> = w.iter().zip(&g).map(|(x, y)| x + tau * y).collect();
        w = lu.solve(&sys.mass().matvec(&rhs));
        let diff: Vec<f64> = l1.step(k).iter().zip(&w).map(|(a, b)| a - b).collect();
        worst = worst.max(sys.mass_norm(&diff) / sys.mass_norm(&w));
    }
    report(
        9,
        "alpha -> 1 limit matches backward Euler",
        started,
        vec![check(
            "relative difference <= 1e-3 at every step",
            worst <= 1e-3,
            format!("{worst:.3e}"),
        )],
    );
}

#[test]
#[ignore = "heavy scale: 2^10 cells, 2^15 reference steps (tens of minutes on one core)"]
fn criterion_5_heavy_table1_entry() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        alphas: vec![0.9],
        steps: vec![1 << 7],
        ..ExperimentConfig::heavy()
    };
    let res = experiment1(&cfg, Execution::default()).unwrap();
    let r = res.ratio(0.9, 1 << 7).unwrap();
    let mut c = check(
        "alpha 0.9, J = 2^7 ratio within factor 2 of 5.35e-3",
        r / 5.35e-3 < 2.0 && r / 5.35e-3 > 0.5,
        format!("{r:.4e}"),
    );
    c.known_shortfall = Some(
        "the computed ratio is 0.38 at desk scale and 0.39 at N = 2^10, J* = 2^15 (tau-independent, N-independent); the published values sit a constant factor of about 70 lower",
    );
    report(5, "heavy robustness-table entry", started, vec![c]);
}
