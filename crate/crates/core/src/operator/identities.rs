use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::grid::GridField;
use super::manufactured::Manufactured;
use super::stencil::{dot, flux_divergence, gradient, laplacian, pq_laplacian};

/// Pass threshold is `rel_error <= DEFAULT_TOL_FACTOR · h²`.
pub const DEFAULT_TOL_FACTOR: f64 = 25.0;

/// Share of nodes that may be dropped for a vanishing gradient.
pub const MAX_EXCLUDED_SHARE: f64 = 0.1;

/// Nodes with `z < DEGENERATE_REL · max z` count as degenerate.
pub const DEGENERATE_REL: f64 = 1e-8;

/// Pointwise weights of the change of variable `u = v^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AuxWeights<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "D")]
    pub d: T,
    #[serde(rename = "E")]
    pub e: T,
    pub frak_a: T,
    pub gamma: T,
    pub xi: T,
    pub upsilon: T,
}

impl<T: Scalar> AuxWeights<T> {
    /// Names of the violated bounds among A ≥ 1, q−1 ≤ E/A ≤ p−1,
    /// q−2 ≤ D/A ≤ p−2, 0 ≤ 𝔄 ≤ 1, the Γ interval, the Ξ upper bound and the
    /// Υ interval. `rel` is the relative slack allowed for rounding.
    pub fn bound_violations(&self, p: T, q: T, n: usize, rel: T) -> Vec<&'static str> {
        let one = T::one();
        let nf = T::of(n);
        let within = |lo: T, x: T, hi: T| {
            let mag = [lo, hi, x]
                .iter()
                .filter(|v| v.is_finite())
                .fold(T::zero(), |a, v| a.max(v.abs()));
            let slack = rel * (one + mag);
            x >= lo - slack && x <= hi + slack
        };
        let ea = self.e / self.a;
        let da = self.d / self.a;
        let gamma_hi = T::two() * (p - one) / nf + p - q;
        let ups_hi = (p - q) * (p - q + T::lit(4.0) * (p - one) / nf);
        let checks = [
            ("A >= 1", within(one, self.a, T::infinity())),
            ("q-1 <= E/A <= p-1", within(q - one, ea, p - one)),
            ("q-2 <= D/A <= p-2", within(q - T::two(), da, p - T::two())),
            ("0 <= frakA <= 1", within(T::zero(), self.frak_a, one)),
            (
                "2(q-1)/N <= Gamma <= 2(p-1)/N + p-q",
                within(T::two() * (q - one) / nf, self.gamma, gamma_hi),
            ),
            (
                "Xi <= (p-1)^2/N",
                within(T::neg_infinity(), self.xi, (p - one).powi(2) / nf),
            ),
            (
                "0 <= Upsilon <= (p-q)(p-q+4(p-1)/N)",
                within(T::zero(), self.upsilon, ups_hi),
            ),
        ];
        checks.into_iter().filter(|(_, ok)| !ok).map(|(name, _)| name).collect()
    }
}

/// A = 1 + |b|^{p−q} v^{(b−1)(p−q)} z^{(p−q)/2} and the quantities built on it.
pub fn aux_weights<T: Scalar>(b: T, v: T, z: T, p: T, q: T, n: usize) -> Result<AuxWeights<T>> {
    if !(v > T::zero()) || !(z > T::zero()) {
        return Err(Error::Domain(format!(
            "aux weights need v > 0 and z > 0, got v = {v}, z = {z}"
        )));
    }
    let one = T::one();
    let two = T::two();
    let nf = T::of(n);
    let pq = p - q;
    let a = one + b.abs().powf(pq) * v.powf((b - one) * pq) * z.powf(pq / two);
    let d = q - two + (p - two) * (a - one);
    let e = q - one + (p - one) * (a - one);
    let frak_a = (a - one) / a;
    let ea = e / a;
    let w = AuxWeights {
        a,
        d,
        e,
        frak_a,
        gamma: two / nf * ea + pq * frak_a,
        xi: ea * ea / nf - pq * pq * frak_a / a,
        upsilon: pq * pq * frak_a * frak_a + T::lit(4.0) / nf * (p - one) * pq * frak_a,
    };
    debug_assert!(
        w.bound_violations(p, q, n, T::lit(1e-9)).is_empty(),
        "aux weight bounds violated: {:?}",
        w.bound_violations(p, q, n, T::lit(1e-9))
    );
    Ok(w)
}

/// Comparison of two evaluations of one identity (or the slack of an
/// inequality) over the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IdentityReport<T> {
    pub name: String,
    pub max_abs_error: T,
    pub rel_error: T,
    pub observed_order: Option<T>,
    pub passed: bool,
    pub tolerance_used: T,
    pub spacing: T,
    pub nodes: usize,
    pub excluded_nodes: usize,
    /// Smallest LHS − RHS for inequality checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<T>,
    /// Smallest admissible constant for bound-form checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_constant: Option<T>,
}

impl<T: Scalar> IdentityReport<T> {
    fn from_errors(name: impl Into<String>, max_abs: T, scale: T, h: T, nodes: usize, excluded: usize) -> Self {
        let rel = if scale > T::zero() { max_abs / scale } else { max_abs };
        let tol = T::lit(DEFAULT_TOL_FACTOR) * h * h;
        Self {
            name: name.into(),
            max_abs_error: max_abs,
            rel_error: rel,
            observed_order: None,
            passed: rel <= tol,
            tolerance_used: tol,
            spacing: h,
            nodes,
            excluded_nodes: excluded,
            min_slack: None,
            bound_constant: None,
        }
    }

    /// Same report judged against `factor · h²`.
    pub fn with_tol_factor(mut self, factor: T) -> Self {
        self.tolerance_used = factor * self.spacing * self.spacing;
        self.passed = self.rel_error <= self.tolerance_used;
        self
    }

    /// Combines reports at spacings h and h/2: the result is the fine report
    /// with `observed_order = log2(err_h / err_{h/2})`, passing only if both do.
    pub fn refined(coarse: Self, fine: Self) -> Self {
        let order = if fine.max_abs_error > T::zero() && coarse.max_abs_error > T::zero() {
            Some((coarse.max_abs_error / fine.max_abs_error).log2())
        } else {
            None
        };
        Self {
            observed_order: order,
            passed: coarse.passed && fine.passed,
            ..fine
        }
    }
}

/// Compares Δ_p(v^b) + Δ_q(v^b), differenced directly, with the expansion
/// b|b|^{q−2} v^{(b−1)(q−1)} [z^{q/2−1} A Δv + (b−1) E z^{q/2}/v + (D/2) z^{(q−4)/2} ⟨∇z, ∇v⟩]
/// assembled from differences of `v` and `z = |∇v|²`.
pub fn change_of_variable_check<T: Scalar>(v: &GridField<T>, b: T, p: T, q: T) -> Result<IdentityReport<T>> {
    if b == T::zero() {
        return Err(Error::Domain("change of variable needs b != 0".into()));
    }
    if v.valid_indices().any(|i| !(v.values[i] > T::zero())) {
        return Err(Error::Domain("change of variable needs v > 0".into()));
    }
    let one = T::one();
    let two = T::two();
    let lhs = pq_laplacian(&v.map(|x| x.powf(b)), p, q)?;
    let grads = gradient(v);
    let lap = laplacian(v);
    let z = dot(&grads, &grads);
    let grad_z = gradient(&z);
    let zv = dot(&grad_z, &grads);
    let margin = zv.margin;

    let z_max = z.max_abs();
    let z_cut = T::lit(DEGENERATE_REL) * z_max;
    let prefactor = b * b.abs().powf(q - two);
    let mut nodes = 0;
    let mut excluded = 0;
    let mut max_err = T::zero();
    let mut scale = T::zero();
    for i in 0..v.len() {
        if !v.is_inside(i, margin) {
            continue;
        }
        nodes += 1;
        let zi = z.values[i];
        if !(zi > z_cut) || zi == T::zero() {
            excluded += 1;
            continue;
        }
        let vi = v.values[i];
        let w = aux_weights(b, vi, zi, p, q, v.ndim())?;
        let rhs = prefactor
            * vi.powf((b - one) * (q - one))
            * (zi.powf(q / two - one) * w.a * lap.values[i]
                + (b - one) * w.e * zi.powf(q / two) / vi
                + w.d / two * zi.powf((q - T::lit(4.0)) / two) * zv.values[i]);
        let l = lhs.values[i];
        max_err = max_err.max((l - rhs).abs());
        scale = scale.max(l.abs());
    }
    if nodes == 0 || T::of(excluded) > T::lit(MAX_EXCLUDED_SHARE) * T::of(nodes) {
        return Err(Error::DegenerateGradient { excluded, total: nodes });
    }
    let name = format!("change_of_variable(b={b}, p={p}, q={q})");
    Ok(IdentityReport::from_errors(
        name,
        max_err,
        scale,
        v.spacing,
        nodes - excluded,
        excluded,
    ))
}

/// Checks ½Δz ≥ (Δv)²/N + ⟨∇Δv, ∇v⟩ with `z = |∇v|²`. The deficit is
/// measured relative to max(1, max ½|Δz|).
pub fn bochner_check<T: Scalar>(v: &GridField<T>, n_param: usize) -> IdentityReport<T> {
    let grads = gradient(v);
    let lap = laplacian(v);
    let z = dot(&grads, &grads);
    let lap_z = laplacian(&z);
    let grad_lap = gradient(&lap);
    let cross = dot(&grad_lap, &grads);
    let margin = cross.margin.max(lap_z.margin);
    let nf = T::of(n_param);
    let half = T::half();
    let mut min_slack = T::infinity();
    let mut scale = T::zero();
    let mut nodes = 0;
    for i in 0..v.len() {
        if !v.is_inside(i, margin) {
            continue;
        }
        nodes += 1;
        let left = half * lap_z.values[i];
        let slack = left - lap.values[i].powi(2) / nf - cross.values[i];
        min_slack = min_slack.min(slack);
        scale = scale.max(left.abs());
    }
    let deficit = (-min_slack).max(T::zero());
    let scale = scale.max(T::one());
    let mut report = IdentityReport::from_errors(format!("bochner(N={n_param})"), deficit, scale, v.spacing, nodes, 0);
    report.min_slack = Some(min_slack);
    report
}

/// Checks Δ_p[k^α u(k·)](x) = k^{α(p−1)+p} (Δ_p u)(kx) on `[0, 1]^d`: the
/// left side is differenced from samples of the rescaled field, the right
/// side is the exact p-Laplacian of the catalog field.
pub fn scaling_check<T: Scalar>(
    u: Manufactured,
    d: usize,
    cells: usize,
    k: T,
    alpha: T,
    p: T,
) -> Result<IdentityReport<T>> {
    if !(k > T::zero()) {
        return Err(Error::Domain(format!("scaling factor k = {k} must be positive")));
    }
    let ka = k.powf(alpha);
    let scaled = GridField::sample_unit(d, cells, |x| {
        let kx: Vec<T> = x.iter().map(|&c| k * c).collect();
        ka * u.value(&kx)
    })?;
    let lhs = flux_divergence(&scaled, &[p])?;
    let factor = k.powf(alpha * (p - T::one()) + p);
    let mut max_err = T::zero();
    let mut scale = T::zero();
    let mut nodes = 0;
    let mut x = vec![T::zero(); d];
    for i in lhs.valid_indices() {
        lhs.coords_into(i, &mut x);
        let kx: Vec<T> = x.iter().map(|&c| k * c).collect();
        let rhs = factor * u.k_laplacian(&kx, p);
        max_err = max_err.max((lhs.values[i] - rhs).abs());
        scale = scale.max(rhs.abs());
        nodes += 1;
    }
    let name = format!("scaling({}, k={k}, alpha={alpha}, p={p})", u.name());
    Ok(IdentityReport::from_errors(name, max_err, scale, lhs.spacing, nodes, 0))
}

/// Change-of-variable check on a catalog field at `cells` and `2·cells`.
pub fn change_of_variable_study<T: Scalar>(
    v: Manufactured,
    d: usize,
    cells: usize,
    b: T,
    p: T,
    q: T,
) -> Result<IdentityReport<T>> {
    let coarse = change_of_variable_check(&v.sample_unit(d, cells)?, b, p, q)?;
    let fine = change_of_variable_check(&v.sample_unit(d, 2 * cells)?, b, p, q)?;
    Ok(IdentityReport::refined(coarse, fine))
}

/// Scaling check at `cells` and `2·cells`.
pub fn scaling_study<T: Scalar>(
    u: Manufactured,
    d: usize,
    cells: usize,
    k: T,
    alpha: T,
    p: T,
) -> Result<IdentityReport<T>> {
    let coarse = scaling_check(u, d, cells, k, alpha, p)?;
    let fine = scaling_check(u, d, 2 * cells, k, alpha, p)?;
    Ok(IdentityReport::refined(coarse, fine))
}

/// (p,q)-Laplacian of a catalog field against its exact value.
pub fn operator_check<T: Scalar>(u: Manufactured, d: usize, cells: usize, p: T, q: T) -> Result<IdentityReport<T>> {
    let field = u.sample_unit(d, cells)?;
    let lhs = pq_laplacian(&field, p, q)?;
    let mut max_err = T::zero();
    let mut scale = T::zero();
    let mut nodes = 0;
    let mut x = vec![T::zero(); d];
    for i in lhs.valid_indices() {
        lhs.coords_into(i, &mut x);
        let exact = u.pq_laplacian(&x, p, q);
        max_err = max_err.max((lhs.values[i] - exact).abs());
        scale = scale.max(exact.abs());
        nodes += 1;
    }
    let name = format!("pq_laplacian({}, p={p}, q={q})", u.name());
    Ok(IdentityReport::from_errors(
        name,
        max_err,
        scale,
        field.spacing,
        nodes,
        0,
    ))
}

pub fn operator_study<T: Scalar>(u: Manufactured, d: usize, cells: usize, p: T, q: T) -> Result<IdentityReport<T>> {
    let coarse = operator_check(u, d, cells, p, q)?;
    let fine = operator_check(u, d, 2 * cells, p, q)?;
    Ok(IdentityReport::refined(coarse, fine))
}
