use pqlap_core::radial::*;
use pqlap_core::*;

fn flux_exact(t: f64, p: f64, q: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t.abs().powf(p - 2.0) * t + t.abs().powf(q - 2.0) * t
}

/// Φ⁻¹ by bisection; Φ is odd and strictly increasing.
fn flux_inverse(y: f64, p: f64, q: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while flux_exact(lo, p, q) > y {
        lo *= 2.0;
    }
    while flux_exact(hi, p, q) < y {
        hi *= 2.0;
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if flux_exact(mid, p, q) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Profile of −(r^{N−1}Φ(u′))′ = c r^{N−1}: Φ(u′) = −(c/N) r + K r^{1−N},
/// K fixed by the outer boundary value, u by 5-point Gauss–Legendre per cell.
fn constant_rhs_oracle(n: usize, p: f64, q: f64, c: f64, u0: f64, u1: f64, nodes: &[f64]) -> Vec<f64> {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683,
        0.538_469_310_105_683,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
        0.236_926_885_056_189,
    ];
    let nf = n as f64;
    let slope = |k: f64, r: f64| flux_inverse(-c / nf * r + k * r.powf(1.0 - nf), p, q);
    let profile = |k: f64| {
        let mut out = vec![u0];
        let mut acc = u0;
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let sub = 2;
            for j in 0..sub {
                let lo = a + (b - a) * j as f64 / sub as f64;
                let hi = a + (b - a) * (j + 1) as f64 / sub as f64;
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                acc += half
                    * X.iter()
                        .zip(W)
                        .map(|(x, wt)| wt * slope(k, mid + half * x))
                        .sum::<f64>();
            }
            out.push(acc);
        }
        out
    };
    let end = |k: f64| *profile(k).last().unwrap() - u1;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while end(lo) > 0.0 {
        lo *= 2.0;
    }
    while end(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if end(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    profile(0.5 * (lo + hi))
}

#[test]
fn constant_source_matches_quadrature_oracle() {
    let (r0, r1, u0, u1, c) = (0.5, 1.5, 0.0, 1.0, 2.0);
    for n in [2usize, 3] {
        for p in [2.0, 2.5, 3.0] {
            for q in [1.5, 2.0] {
                let inst = ProblemInstance::hamilton_jacobi(n, p, q, 1.0);
                for mesh in [64usize, 128] {
                    let prob = RadialProblem::new(inst, r0, r1, u0, u1, mesh).with_rhs(move |_, _, _| c);
                    let sol = solve_radial(&prob).unwrap();
                    assert!(
                        sol.converged,
                        "N={n} p={p} q={q} mesh={mesh}: {} after {} steps",
                        sol.residual_norm, sol.continuation_steps
                    );
                    let oracle = constant_rhs_oracle(n, p, q, c, u0, u1, &sol.r);
                    let scale = oracle.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    let err = sol.u.iter().zip(&oracle).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale;
                    let h = prob.spacing();
                    assert!(err <= 10.0 * h * h, "N={n} p={p} q={q} mesh={mesh}: rel err {err:e}");
                }
            }
        }
    }
}

#[test]
fn manufactured_profiles_converge_at_second_order() {
    for profile in RadialProfile::ALL {
        for (n, p, q) in [(2usize, 2.0, 2.0), (3, 2.5, 1.5), (2, 3.0, 2.0), (3, 3.0, 1.5)] {
            let inst: Instance = ProblemInstance::product(n, p, q, 1.0, 1.0);
            let errs: Vec<f64> = [64usize, 128]
                .iter()
                .map(|&mesh| {
                    let sol = solve_radial(&profile.problem(inst, 0.5, 1.5, mesh)).unwrap();
                    assert!(sol.converged);
                    sol.r
                        .iter()
                        .zip(&sol.u)
                        .fold(0.0f64, |a, (&r, &u)| a.max((u - profile.eval(r).0).abs()))
                })
                .collect();
            let ratio = errs[0] / errs[1];
            assert!(
                (3.2..=4.8).contains(&ratio),
                "{} N={n} p={p} q={q}: ratio {ratio}",
                profile.name()
            );
        }
    }
}

#[test]
fn constant_data_gives_flat_profile() {
    let inst = ProblemInstance::hamilton_jacobi(2, 2.5, 1.5, 1.0);
    let sol = solve_radial(&RadialProblem::new(inst, 1.0, 2.0, 1.0, 1.0, 128).with_rhs(|_, _, _| 0.0)).unwrap();
    let prof = gradient_vs_distance(&sol);
    assert!(prof.iter().all(|&(_, g)| g < 1e-10));
    assert!(prof.windows(2).all(|w| w[0].0 <= w[1].0));
}

#[test]
fn hamilton_jacobi_boundary_layer() {
    let inst: Instance = ProblemInstance::hamilton_jacobi(2, 3.0, 2.0, 2.5);
    let mut constants: Vec<f64> = Vec::new();
    for mesh in [2048usize, 4096] {
        let prob = RadialProblem::new(inst, 1.0, 2.0, 0.0, 3.0e4, mesh);
        let sol = solve_radial(&prob).unwrap();
        assert!(sol.converged);
        assert!(residual_certificate(&prob, &sol) <= 10.0 * SolverOptions::<f64>::default().tol);
        let side = blowup_side(&sol);
        assert_eq!(side, Side::Inner);
        let prof = gradient_vs_distance_from(&sol, side);
        // monotone growth toward the boundary
        assert!(prof.windows(2).take(200).all(|w| w[0].1 >= w[1].1));
        let fit = fit_blowup_exponent(&prof, default_window(&sol)).unwrap();
        assert!((fit.fitted_exponent - 2.0).abs() <= 0.3, "{fit:?}");
        let report = estimate_consistency(&sol, &classify(&inst).unwrap()).unwrap();
        constants.push(report.bound_constant.unwrap());
    }
    assert!((constants[1] / constants[0] - 1.0).abs() <= 0.2, "{constants:?}");
}

#[test]
fn upwind_scheme_reaches_steeper_data() {
    // central differencing loses the discrete solution once U ≳ 32/h
    let inst: Instance = ProblemInstance::hamilton_jacobi(2, 3.0, 2.0, 2.5);
    let prob = RadialProblem::new(inst, 1.0, 2.0, 0.0, 1.0e5, 1024);
    let central = solve_radial(&prob).unwrap();
    assert!(!central.converged && central.data_fraction < 1.0);
    let upwind = solve_radial(&prob.clone().with_scheme(GradientScheme::Upwind)).unwrap();
    assert!(upwind.converged);
}
