use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regime::{NonlinearityKind, ProblemInstance};
use crate::scalar::Scalar;

/// Scalar source term `f(r, u, u')` replacing the instance nonlinearity.
pub type RhsFn<T> = Arc<dyn Fn(T, T, T) -> T + Send + Sync>;

/// Discretization of the gradient inside the reaction term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientScheme {
    /// (u_{i+1} − u_{i−1}) / 2h; second order.
    #[default]
    Central,
    /// Monotone one-sided choice: |u′|² ≈ (D⁺u)₊² + (D⁻u)₋². First order,
    /// but keeps a discrete solution for arbitrarily steep boundary layers.
    Upwind,
}

/// Dirichlet problem `−(r^{N−1}Φ(u′))′ = r^{N−1} f(u, u′)` on `[r0, r1]`,
/// Φ(t) = |t|^{p−2}t + |t|^{q−2}t.
#[derive(Clone)]
pub struct RadialProblem<T: Scalar> {
    pub inst: ProblemInstance<T>,
    pub r0: T,
    pub r1: T,
    pub u_at_r0: T,
    pub u_at_r1: T,
    pub rhs_override: Option<RhsFn<T>>,
    pub mesh_n: usize,
    pub reg_eps: T,
    pub scheme: GradientScheme,
}

impl<T: Scalar> fmt::Debug for RadialProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProblem")
            .field("inst", &self.inst)
            .field("r0", &self.r0)
            .field("r1", &self.r1)
            .field("u_at_r0", &self.u_at_r0)
            .field("u_at_r1", &self.u_at_r1)
            .field("rhs_override", &self.rhs_override.as_ref().map(|_| "<fn>"))
            .field("mesh_n", &self.mesh_n)
            .field("reg_eps", &self.reg_eps)
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl<T: Scalar> RadialProblem<T> {
    pub fn new(inst: ProblemInstance<T>, r0: T, r1: T, u_at_r0: T, u_at_r1: T, mesh_n: usize) -> Self {
        Self {
            inst,
            r0,
            r1,
            u_at_r0,
            u_at_r1,
            rhs_override: None,
            mesh_n,
            reg_eps: T::lit(1e-8),
            scheme: GradientScheme::Central,
        }
    }

    pub fn with_scheme(mut self, scheme: GradientScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_rhs(mut self, f: impl Fn(T, T, T) -> T + Send + Sync + 'static) -> Self {
        self.rhs_override = Some(Arc::new(f));
        self
    }

    pub fn with_reg_eps(mut self, eps: T) -> Self {
        self.reg_eps = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.inst.validated()?;
        if !(self.r0 > T::zero() && self.r1 > self.r0) {
            return Err(Error::InvalidProblem(format!(
                "need 0 < r0 < r1, got r0 = {}, r1 = {}",
                self.r0, self.r1
            )));
        }
        if self.mesh_n < 64 {
            return Err(Error::InvalidProblem(format!(
                "mesh_n = {} must be at least 64",
                self.mesh_n
            )));
        }
        if !(self.reg_eps > T::zero() && self.reg_eps <= T::lit(1e-2)) {
            return Err(Error::InvalidProblem(format!(
                "reg_eps = {} not in (0, 1e-2]",
                self.reg_eps
            )));
        }
        if !self.u_at_r0.is_finite() || !self.u_at_r1.is_finite() {
            return Err(Error::InvalidProblem("boundary data must be finite".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> T {
        (self.r1 - self.r0) / T::of(self.mesh_n)
    }

    pub fn node(&self, i: usize) -> T {
        self.r0 + self.spacing() * T::of(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolverOptions<T> {
    /// Bound on the locally scaled residual.
    pub tol: T,
    pub max_newton: usize,
    pub max_damps: usize,
    pub eps_start: T,
    pub eps_factor: T,
    /// Boundary data are continued from data scaled to this magnitude.
    pub data_start: T,
    /// Halvings of a failed data increment before giving up.
    pub max_step_halvings: usize,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_newton: 60,
            max_damps: 40,
            eps_start: T::lit(1e-2),
            eps_factor: T::half(),
            data_start: T::one(),
            max_step_halvings: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RadialSolution<T> {
    pub r: Vec<T>,
    pub u: Vec<T>,
    /// Cell midpoints where `du` lives.
    pub r_half: Vec<T>,
    pub du: Vec<T>,
    pub residual_norm: T,
    pub newton_iters: usize,
    pub continuation_steps: usize,
    pub converged: bool,
    /// Fraction of the requested boundary data reached (1 when complete).
    pub data_fraction: T,
    pub reg_eps: T,
}

/// Φ_ε(t) = Σ_k (t² + ε²)^{(k−2)/2} t.
pub fn flux<T: Scalar>(t: T, eps: T, ks: [T; 2]) -> T {
    let z = t * t + eps * eps;
    ks.iter().fold(T::zero(), |acc, &k| acc + weight(z, k)) * t
}

/// Φ′_ε(t) = Σ_k (t² + ε²)^{(k−4)/2} [(k−1)t² + ε²].
pub fn flux_derivative<T: Scalar>(t: T, eps: T, ks: [T; 2]) -> T {
    let e2 = eps * eps;
    let z = t * t + e2;
    ks.iter().fold(T::zero(), |acc, &k| {
        let two = T::two();
        if k == two {
            acc + T::one()
        } else {
            acc + z.powf((k - T::lit(4.0)) / two) * ((k - T::one()) * t * t + e2)
        }
    })
}

fn weight<T: Scalar>(z: T, k: T) -> T {
    if k == T::two() {
        T::one()
    } else {
        z.powf((k - T::two()) / T::two())
    }
}

/// Reaction f and its partial derivatives in u and in the one-sided slopes
/// D⁺u, D⁻u.
struct Reaction<'a, T: Scalar> {
    prob: &'a RadialProblem<T>,
    eps: T,
}

struct ReactionValue<T> {
    f: T,
    f_u: T,
    f_plus: T,
    f_minus: T,
}

impl<T: Scalar> Reaction<'_, T> {
    fn eval(&self, r: T, u: T, d_plus: T, d_minus: T) -> ReactionValue<T> {
        let two = T::two();
        if let Some(f) = &self.prob.rhs_override {
            let du = (d_plus + d_minus) / two;
            let v = f(r, u, du);
            let hu = T::lit(1e-7) * (T::one() + u.abs());
            let hd = T::lit(1e-7) * (T::one() + du.abs());
            let fu = (f(r, u + hu, du) - f(r, u - hu, du)) / (two * hu);
            let fd = (f(r, u, du + hd) - f(r, u, du - hd)) / (two * hd);
            return ReactionValue {
                f: v,
                f_u: fu,
                f_plus: fd / two,
                f_minus: fd / two,
            };
        }
        let inst = &self.prob.inst;
        let (s, m) = (inst.s, inst.m);
        // z ≈ |u′|² + ε² and its slope derivatives
        let (sq, z_plus, z_minus) = match self.prob.scheme {
            GradientScheme::Central => {
                let c = (d_plus + d_minus) / two;
                (c * c, c, c)
            }
            GradientScheme::Upwind => {
                let a = d_plus.max(T::zero());
                let b = (-d_minus).max(T::zero());
                (a * a + b * b, two * a, -two * b)
            }
        };
        let z = sq + self.eps * self.eps;
        let (g, g_z) = if m == T::zero() {
            (T::one(), T::zero())
        } else {
            (z.powf(m / two), m / two * z.powf(m / two - T::one()))
        };
        let up = u.max(T::zero());
        let (h, h_u) = if s == T::zero() {
            (T::one(), T::zero())
        } else if up > T::zero() {
            (up.powf(s), s * up.powf(s - T::one()))
        } else {
            (T::zero(), T::zero())
        };
        let (f, f_u, f_g) = match inst.kind {
            NonlinearityKind::HamiltonJacobi => (g, T::zero(), T::one()),
            NonlinearityKind::Product => (h * g, h_u * g, h),
            NonlinearityKind::Sum => (h + inst.big_m * g, h_u, inst.big_m),
        };
        let gz = if g_z == T::zero() { T::zero() } else { f_g * g_z };
        ReactionValue {
            f,
            f_u,
            f_plus: gz * z_plus,
            f_minus: gz * z_minus,
        }
    }
}

/// Discrete operator on a fixed mesh.
struct Discretization<'a, T: Scalar> {
    prob: &'a RadialProblem<T>,
    h: T,
    ks: [T; 2],
    /// r^{N−1} at nodes and at cell midpoints.
    w_node: Vec<T>,
    w_half: Vec<T>,
}

struct Evaluation<T> {
    residual: Vec<T>,
    scale: Vec<T>,
    /// Tridiagonal Jacobian (sub, diag, sup).
    jacobian: (Vec<T>, Vec<T>, Vec<T>),
}

impl<'a, T: Scalar> Discretization<'a, T> {
    fn new(prob: &'a RadialProblem<T>) -> Self {
        let n = prob.mesh_n;
        let h = prob.spacing();
        let e = prob.inst.n as i32 - 1;
        let w_node = (0..=n).map(|i| prob.node(i).powi(e)).collect();
        let w_half = (0..n).map(|i| (prob.node(i) + h * T::half()).powi(e)).collect();
        Self {
            prob,
            h,
            ks: [prob.inst.p, prob.inst.q],
            w_node,
            w_half,
        }
    }

    /// Residual at interior nodes (index i − 1 for node i), its Jacobian,
    /// and the local magnitude each residual is measured against: the size
    /// of the flux and source terms plus |J|·|u|, so that a small scaled
    /// residual is a small componentwise backward error.
    fn evaluate(&self, u: &[T], eps: T) -> Evaluation<T> {
        let n = self.prob.mesh_n;
        let h = self.h;
        let h2 = h * h;
        let reaction = Reaction { prob: self.prob, eps };
        let slopes: Vec<T> = (0..n).map(|i| (u[i + 1] - u[i]) / h).collect();
        let fluxes: Vec<T> = (0..n).map(|i| self.w_half[i] * flux(slopes[i], eps, self.ks)).collect();
        let dflux: Vec<T> = (0..n)
            .map(|i| self.w_half[i] * flux_derivative(slopes[i], eps, self.ks))
            .collect();
        let mut residual = Vec::with_capacity(n - 1);
        let mut scale = Vec::with_capacity(n - 1);
        let mut sub = vec![T::zero(); n - 1];
        let mut diag = vec![T::zero(); n - 1];
        let mut sup = vec![T::zero(); n - 1];
        for i in 1..n {
            let rv = reaction.eval(self.prob.node(i), u[i], slopes[i], slopes[i - 1]);
            let w = self.w_node[i];
            let src = w * rv.f;
            let k = i - 1;
            sub[k] = -dflux[i - 1] / h2 + w * rv.f_minus / h;
            diag[k] = (dflux[i] + dflux[i - 1]) / h2 - w * (rv.f_u - rv.f_plus / h + rv.f_minus / h);
            sup[k] = -dflux[i] / h2 - w * rv.f_plus / h;
            let ju = sub[k].abs() * u[i - 1].abs() + diag[k].abs() * u[i].abs() + sup[k].abs() * u[i + 1].abs();
            let ju = if ju.is_finite() { ju } else { T::zero() };
            residual.push(-(fluxes[i] - fluxes[i - 1]) / h - src);
            scale.push((fluxes[i].abs() + fluxes[i - 1].abs()) / h + src.abs() + ju);
        }
        Evaluation {
            residual,
            scale,
            jacobian: (sub, diag, sup),
        }
    }
}

/// Thomas algorithm; fails on a vanishing or non-finite pivot.
fn solve_tridiagonal<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - sub[i] * c[i - 1];
        }
        if pivot == T::zero() || !pivot.is_finite() {
            return Err(Error::SingularJacobian(i + 1));
        }
        c[i] = sup[i] / pivot;
        d[i] = (rhs[i] - if i > 0 { sub[i] * d[i - 1] } else { T::zero() }) / pivot;
    }
    let mut x = vec![T::zero(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

fn scaled_max<T: Scalar>(ev: &Evaluation<T>) -> T {
    let floor = T::lit(1e-12) * ev.scale.iter().fold(T::zero(), |a, &s| a.max(s));
    ev.residual.iter().zip(&ev.scale).fold(T::zero(), |acc, (&r, &s)| {
        let denom = s.max(floor);
        acc.max(if denom > T::zero() { r.abs() / denom } else { r.abs() })
    })
}

fn norm2<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
}

struct Stage<T> {
    iters: usize,
    scaled: T,
    converged: bool,
}

/// Damped Newton at fixed ε and boundary data; `u` holds the data at both ends.
fn newton<T: Scalar>(disc: &Discretization<'_, T>, u: &mut [T], eps: T, opts: &SolverOptions<T>) -> Result<Stage<T>> {
    let n = disc.prob.mesh_n;
    let mut ev = disc.evaluate(u, eps);
    let mut scaled = scaled_max(&ev);
    for iter in 0..opts.max_newton {
        if scaled <= opts.tol {
            return Ok(Stage {
                iters: iter,
                scaled,
                converged: true,
            });
        }
        let (sub, diag, sup) = &ev.jacobian;
        let rhs: Vec<T> = ev.residual.iter().map(|&r| -r).collect();
        let step = solve_tridiagonal(sub, diag, sup, &rhs)?;
        let f0 = norm2(&ev.residual);
        let mut lambda = T::one();
        let mut trial = u.to_vec();
        let mut accepted = None;
        for _ in 0..=opts.max_damps {
            for i in 1..n {
                trial[i] = u[i] + lambda * step[i - 1];
            }
            let ev_try = disc.evaluate(&trial, eps);
            let f1 = norm2(&ev_try.residual);
            if f1.is_finite() && f1 <= (T::one() - T::lit(1e-4) * lambda) * f0 {
                accepted = Some(ev_try);
                break;
            }
            lambda = lambda * T::half();
        }
        match accepted {
            Some(next) => {
                u.copy_from_slice(&trial);
                ev = next;
                scaled = scaled_max(&ev);
            }
            None => {
                return Ok(Stage {
                    iters: iter + 1,
                    scaled,
                    converged: scaled <= opts.tol,
                })
            }
        }
    }
    Ok(Stage {
        iters: opts.max_newton,
        scaled,
        converged: scaled <= opts.tol,
    })
}

/// Solves with continuation in ε (geometric, from `eps_start` down to
/// `reg_eps`) and then in the boundary data (doubling from `data_start`,
/// halving a failed increment).
pub fn solve_radial<T: Scalar>(prob: &RadialProblem<T>) -> Result<RadialSolution<T>> {
    solve_radial_with(prob, &SolverOptions::default())
}

pub fn solve_radial_with<T: Scalar>(prob: &RadialProblem<T>, opts: &SolverOptions<T>) -> Result<RadialSolution<T>> {
    prob.validate()?;
    let n = prob.mesh_n;
    let disc = Discretization::new(prob);
    let data_mag = prob.u_at_r0.abs().max(prob.u_at_r1.abs());
    let mut lambda = if data_mag > opts.data_start {
        opts.data_start / data_mag
    } else {
        T::one()
    };

    let linear = |lam: T| -> Vec<T> {
        let (a, b) = (lam * prob.u_at_r0, lam * prob.u_at_r1);
        (0..=n).map(|i| a + (b - a) * T::of(i) / T::of(n)).collect()
    };
    let mut u = linear(lambda);
    let mut total_iters = 0;
    let mut steps = 0;

    // ε continuation at the initial data level.
    let mut eps = opts.eps_start.max(prob.reg_eps);
    let mut last;
    loop {
        let stage = newton(&disc, &mut u, eps, opts)?;
        total_iters += stage.iters;
        steps += 1;
        last = stage.scaled;
        if !stage.converged {
            if steps == 1 {
                return Err(Error::NewtonStalled(format!(
                    "first stage at eps = {eps}, scaled residual {last}"
                )));
            }
            return Ok(finish(prob, u, last, total_iters, steps, false, lambda, eps));
        }
        if eps <= prob.reg_eps {
            break;
        }
        eps = (eps * opts.eps_factor).max(prob.reg_eps);
    }

    // Data continuation at the regularization floor.
    let mut increment = T::two();
    while lambda < T::one() {
        let target = (lambda * increment).min(T::one());
        let mut trial = u.clone();
        let scale = target / lambda;
        for v in trial.iter_mut() {
            *v = *v * scale;
        }
        trial[0] = target * prob.u_at_r0;
        trial[n] = target * prob.u_at_r1;
        let stage = newton(&disc, &mut trial, eps, opts);
        steps += 1;
        match stage {
            Ok(s) if s.converged => {
                total_iters += s.iters;
                u = trial;
                lambda = target;
                last = s.scaled;
                increment = (increment * increment).min(T::two());
            }
            other => {
                if let Ok(s) = other {
                    total_iters += s.iters;
                }
                increment = increment.sqrt();
                if increment - T::one() < T::lit(2.0f64.powi(-(opts.max_step_halvings as i32))) {
                    return Ok(finish(prob, u, last, total_iters, steps, false, lambda, eps));
                }
            }
        }
    }
    Ok(finish(prob, u, last, total_iters, steps, true, lambda, eps))
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Scalar>(
    prob: &RadialProblem<T>,
    u: Vec<T>,
    residual: T,
    iters: usize,
    steps: usize,
    converged: bool,
    data_fraction: T,
    eps: T,
) -> RadialSolution<T> {
    let n = prob.mesh_n;
    let h = prob.spacing();
    RadialSolution {
        r: (0..=n).map(|i| prob.node(i)).collect(),
        r_half: (0..n).map(|i| prob.node(i) + h * T::half()).collect(),
        du: (0..n).map(|i| (u[i + 1] - u[i]) / h).collect(),
        u,
        residual_norm: residual,
        newton_iters: iters,
        continuation_steps: steps,
        converged,
        data_fraction,
        reg_eps: eps,
    }
}

/// Largest scaled residual of `sol` under the unregularized flux and
/// reaction, over interior nodes whose neighboring slopes all exceed
/// `10 · reg_eps` in magnitude.
pub fn residual_certificate<T: Scalar>(prob: &RadialProblem<T>, sol: &RadialSolution<T>) -> T {
    let disc = Discretization::new(prob);
    let ev = disc.evaluate(&sol.u, T::zero());
    let cut = T::lit(10.0) * prob.reg_eps;
    let h = prob.spacing();
    let mut worst = T::zero();
    for i in 1..prob.mesh_n {
        let central = (sol.u[i + 1] - sol.u[i - 1]) / (T::two() * h);
        if sol.du[i - 1].abs() > cut && sol.du[i].abs() > cut && central.abs() > cut {
            let s = ev.scale[i - 1];
            let r = ev.residual[i - 1].abs();
            worst = worst.max(if s > T::zero() { r / s } else { r });
        }
    }
    worst
}

/// Smooth radial profiles with strictly monotone derivative sign, for the
/// method of manufactured solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialProfile {
    /// e^r
    Exp,
    /// r³ + r
    Cubic,
    /// sin r (use with r1 < π/2)
    Sine,
}

impl RadialProfile {
    pub const ALL: [RadialProfile; 3] = [Self::Exp, Self::Cubic, Self::Sine];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exp => "exp",
            Self::Cubic => "cubic",
            Self::Sine => "sine",
        }
    }

    /// (u, u′, u″) at r.
    pub fn eval<T: Scalar>(self, r: T) -> (T, T, T) {
        match self {
            Self::Exp => (r.exp(), r.exp(), r.exp()),
            Self::Cubic => (r * r * r + r, T::lit(3.0) * r * r + T::one(), T::lit(6.0) * r),
            Self::Sine => (r.sin(), r.cos(), -r.sin()),
        }
    }

    /// f = −(r^{N−1}Φ(u′))′ / r^{N−1} with the unregularized flux.
    pub fn source<T: Scalar>(self, r: T, n: usize, p: T, q: T) -> T {
        let (_, d1, d2) = self.eval(r);
        let ks = [p, q];
        -(T::of(n - 1) / r * flux(d1, T::zero(), ks) + flux_derivative(d1, T::zero(), ks) * d2)
    }

    /// A problem whose exact solution is this profile.
    pub fn problem<T: Scalar>(self, inst: ProblemInstance<T>, r0: T, r1: T, mesh_n: usize) -> RadialProblem<T> {
        let (n, p, q) = (inst.n, inst.p, inst.q);
        RadialProblem::new(inst, r0, r1, self.eval(r0).0, self.eval(r1).0, mesh_n)
            .with_rhs(move |r, _, _| self.source(r, n, p, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hj() -> ProblemInstance<f64> {
        ProblemInstance::hamilton_jacobi(2, 3.0, 2.0, 2.5)
    }

    #[test]
    fn flux_derivative_matches_difference_quotient() {
        for (p, q) in [(3.0, 2.0), (2.5, 1.5), (2.0, 2.0)] {
            for t in [-1.3, -0.01, 0.0, 0.2, 4.0] {
                let eps = 1e-3;
                let h = 1e-6;
                let fd = (flux(t + h, eps, [p, q]) - flux(t - h, eps, [p, q])) / (2.0 * h);
                assert_relative_eq!(flux_derivative(t, eps, [p, q]), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn thomas_solves_small_system() {
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0]).unwrap();
        for v in x {
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
        assert_eq!(
            solve_tridiagonal(&[0.0], &[0.0], &[0.0], &[1.0]),
            Err(Error::SingularJacobian(1))
        );
    }

    #[test]
    fn invalid_problems_rejected() {
        let base = RadialProblem::new(hj(), 0.5, 1.5, 0.0, 1.0, 64);
        assert!(base.validate().is_ok());
        assert!(RadialProblem {
            mesh_n: 32,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RadialProblem {
            r1: 0.4,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(base.clone().with_reg_eps(0.1).validate().is_err());
    }

    #[test]
    fn constant_data_zero_rhs_is_constant() {
        let prob = RadialProblem::new(hj(), 0.5, 1.5, 2.0, 2.0, 64).with_rhs(|_, _, _| 0.0);
        let sol = solve_radial(&prob).unwrap();
        assert!(sol.converged);
        assert!(sol.u.iter().all(|&v| (v - 2.0).abs() < 1e-12));
        assert!(sol.du.iter().all(|&d| d.abs() < 1e-10));
    }

    #[test]
    fn manufactured_profile_recovered() {
        let inst = ProblemInstance::product(3, 2.5, 1.5, 1.0, 1.0);
        let mut errs = Vec::new();
        for n in [64usize, 128] {
            let prob = RadialProfile::Exp.problem(inst, 0.5, 1.5, n);
            let sol = solve_radial(&prob).unwrap();
            assert!(sol.converged);
            let err = sol
                .r
                .iter()
                .zip(&sol.u)
                .fold(0.0f64, |a, (&r, &u): (&f64, &f64)| a.max((u - r.exp()).abs()));
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}, errors {errs:?}");
    }

    #[test]
    fn hamilton_jacobi_moderate_data_converges() {
        let prob = RadialProblem::new(hj(), 1.0, 2.0, 0.0, 20.0, 256);
        let sol = solve_radial(&prob).unwrap();
        assert!(sol.converged, "{:?}", sol.residual_norm);
        assert_eq!(sol.data_fraction, 1.0);
        assert!(residual_certificate(&prob, &sol) <= 1e-9);
    }
}
