//! Bernstein trinomials, the constructive choice of `(t*, b*, κ)`, a
//! brute-force grid oracle for it, and the Ishii–Lions parameter window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regime::{
    self, b_floor, b_of_t, beta1, beta2, beta2_limit, gamma_of, Condition, NonlinearityKind, ProblemInstance,
};
use crate::scalar::Scalar;

/// Grid size used by the oracle when the caller has no preference.
pub const DEFAULT_GRID_POINTS: usize = 100_001;

/// Largest exponent of the doubling schedule t ∈ {1, 2, 4, …, 2^60}.
pub const MAX_DOUBLINGS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrinomialSource {
    Product,
    Sum,
}

/// 𝓛̃(t) = L1 t² + L2 t + L3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrinomialCoeffs<T> {
    #[serde(rename = "L1")]
    pub l1: T,
    #[serde(rename = "L2")]
    pub l2: T,
    #[serde(rename = "L3")]
    pub l3: T,
    pub epsilon: T,
    pub source: TrinomialSource,
}

impl<T: Scalar> TrinomialCoeffs<T> {
    pub fn value(&self, t: T) -> T {
        (self.l1 * t + self.l2) * t + self.l3
    }

    /// −L2/(2L1), or `None` when L1 = 0.
    pub fn vertex(&self) -> Option<T> {
        (self.l1 != T::zero()).then(|| -self.l2 / (T::two() * self.l1))
    }

    /// 4 L1 L3 − L2².
    pub fn discriminant(&self) -> T {
        T::lit(4.0) * self.l1 * self.l3 - self.l2 * self.l2
    }
}

/// Deterministic majorant of the product-case Bernstein trinomial.
pub fn product_trinomial<T: Scalar>(inst: &ProblemInstance<T>, epsilon: T) -> Result<TrinomialCoeffs<T>> {
    let q_cal = inst.q_cal();
    if q_cal == T::zero() || !q_cal.is_finite() {
        return Err(Error::DegenerateQ(q_cal.as_f64()));
    }
    if !(epsilon >= T::zero()) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must be nonnegative")));
    }
    let one = T::one();
    let two = T::two();
    let four = T::lit(4.0);
    let twelve = T::lit(12.0);
    let n = inst.dim();
    let (p, q, s) = (inst.p, inst.q, inst.s);
    let r = inst.r_cal();
    let q2 = q_cal * q_cal;
    let sq = s / q_cal;

    let l1 = one - four * (q - one) / (n * q_cal) + r / q2 + epsilon * twelve * (p - one).powi(2) / (n * q2);
    let l2 = two * sq * (two * (p - one) / n + p - q) - four * (q - one) / (n * q_cal)
        + epsilon * twelve / q_cal * (p - one - two * sq * (q - one).powi(2) / n + two * sq * (p - q).powi(2));
    let l3 = sq * sq * r
        + four * (p - one) * sq / n
        + four
            * epsilon
            * (T::lit(3.0) * sq * (sq * (p - one).powi(2) / n - (q - one)) + (one / n - T::lit(3.0) * epsilon));
    Ok(TrinomialCoeffs {
        l1,
        l2,
        l3,
        epsilon,
        source: TrinomialSource::Product,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "case1_L1neg")]
    Case1L1Neg,
    #[serde(rename = "case2_L1zero")]
    Case2L1Zero,
    #[serde(rename = "case3_convex")]
    Case3Convex,
    #[serde(rename = "sum_large_tau")]
    SumLargeTau,
    #[serde(rename = "infeasible")]
    Infeasible,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Case1L1Neg => "case1_L1neg",
            Self::Case2L1Zero => "case2_L1zero",
            Self::Case3Convex => "case3_convex",
            Self::SumLargeTau => "sum_large_tau",
            Self::Infeasible => "infeasible",
        }
    }
}

/// Outcome of a constructive Bernstein selection.
///
/// For the sum nonlinearity `t_star` holds the parameter τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BSelection<T> {
    pub case_tag: CaseTag,
    pub t_star: Option<T>,
    pub b_star: Option<T>,
    pub kappa: Option<T>,
    pub epsilon_used: T,
    pub coeffs: Option<TrinomialCoeffs<T>>,
    pub trace: Vec<Condition>,
}

impl<T: Scalar> BSelection<T> {
    pub fn is_feasible(&self) -> bool {
        self.case_tag != CaseTag::Infeasible
    }

    /// Label of the first failing trace entry.
    pub fn failing_check(&self) -> Option<&str> {
        self.trace.iter().find(|c| !c.passed).map(|c| c.label.as_str())
    }

    pub fn summary(&self) -> String {
        match (self.t_star, self.b_star, self.kappa) {
            (Some(t), Some(b), Some(k)) => format!("t* = {t}, b* = {b}, kappa = {k}"),
            _ => format!("failed: {}", self.failing_check().unwrap_or("unknown")),
        }
    }

    fn infeasible(epsilon: T, coeffs: Option<TrinomialCoeffs<T>>, trace: Vec<Condition>) -> Self {
        Self {
            case_tag: CaseTag::Infeasible,
            t_star: None,
            b_star: None,
            kappa: None,
            epsilon_used: epsilon,
            coeffs,
            trace,
        }
    }
}

/// Constructive selection at ε = 0.
pub fn select_b_product<T: Scalar>(inst: &ProblemInstance<T>) -> Result<BSelection<T>> {
    select_b_product_eps(inst, T::zero())
}

/// Constructive selection on the ε-trinomial. Which case applies is decided
/// by the position of 𝒬 relative to 𝒬₁, 𝒬₂ (the ε = 0 factorization).
pub fn select_b_product_eps<T: Scalar>(inst: &ProblemInstance<T>, epsilon: T) -> Result<BSelection<T>> {
    let mut inst = inst.validated()?;
    inst.kind = NonlinearityKind::Product;
    let mut trace = Vec::new();
    let q_cal = inst.q_cal();
    trace.push(Condition::new("Q > 0", format!("{q_cal} > 0"), q_cal > T::zero()));
    if !(q_cal > T::zero()) {
        return Ok(BSelection::infeasible(epsilon, None, trace));
    }
    let th = regime::product_thresholds(&inst)?;
    let coeffs = product_trinomial(&inst, epsilon)?;
    trace.push(Condition::new(
        "4(q-1)^2 >= N^2 R",
        format!("discriminant_ok = {}", th.discriminant_ok),
        th.discriminant_ok,
    ));
    let (Some(q1), Some(q2)) = (th.q1, th.q2) else {
        return Ok(BSelection::infeasible(epsilon, Some(coeffs), trace));
    };

    if q1 < q_cal && q_cal < q2 {
        trace.push(Condition::new(
            "L1 < 0 (Q1 < Q < Q2)",
            format!("L1 = {}", coeffs.l1),
            true,
        ));
        Ok(doubling_search(&inst, coeffs, CaseTag::Case1L1Neg, trace))
    } else if q_cal == q1 || q_cal == q2 {
        trace.push(Condition::new(
            "L1 = 0 (Q in {Q1, Q2})",
            format!("L1 = {}", coeffs.l1),
            true,
        ));
        let s_thr = inst.s_threshold();
        let s_ok = inst.s < s_thr;
        trace.push(Condition::new(
            "s < (q-1)/(p-1+N(p-q)/2)",
            format!("{} < {s_thr}", inst.s),
            s_ok,
        ));
        let l2_ok = coeffs.l2 < T::zero();
        trace.push(Condition::new("L2 < 0", format!("L2 = {}", coeffs.l2), l2_ok));
        if !(s_ok && l2_ok) {
            return Ok(BSelection::infeasible(epsilon, Some(coeffs), trace));
        }
        Ok(doubling_search(&inst, coeffs, CaseTag::Case2L1Zero, trace))
    } else {
        Ok(convex_case(&inst, coeffs, trace))
    }
}

/// Cases 1 and 2: the first t = 2^k with 𝓛̃(t) ≤ −1, b(t) admissible and γ > 0.
fn doubling_search<T: Scalar>(
    inst: &ProblemInstance<T>,
    coeffs: TrinomialCoeffs<T>,
    tag: CaseTag,
    mut trace: Vec<Condition>,
) -> BSelection<T> {
    let floor = b_floor(inst);
    let kappa = T::one();
    let mut t = T::one();
    for _ in 0..=MAX_DOUBLINGS {
        let b = b_of_t(inst, t);
        let value = coeffs.value(t);
        if value <= -kappa && b > floor {
            let g = gamma_of(b, beta1(inst, b), beta2(inst, b));
            if g > T::zero() {
                trace.push(Condition::new(
                    "L(t) <= -kappa",
                    format!("L({t}) = {value} <= -1"),
                    true,
                ));
                trace.push(Condition::new("b > max{0, (m-q+1)/Q}", format!("{b} > {floor}"), true));
                trace.push(Condition::new("gamma > 0", format!("gamma({b}) = {g}"), true));
                return BSelection {
                    case_tag: tag,
                    t_star: Some(t),
                    b_star: Some(b),
                    kappa: Some(kappa),
                    epsilon_used: coeffs.epsilon,
                    coeffs: Some(coeffs),
                    trace,
                };
            }
        }
        t = t * T::two();
    }
    trace.push(Condition::new(
        "doubling schedule finds L(t) <= -1, b admissible, gamma > 0",
        format!("no t <= 2^{MAX_DOUBLINGS} qualifies"),
        false,
    ));
    BSelection::infeasible(coeffs.epsilon, Some(coeffs), trace)
}

/// Case 3: vertex of the convex trinomial.
fn convex_case<T: Scalar>(
    inst: &ProblemInstance<T>,
    coeffs: TrinomialCoeffs<T>,
    mut trace: Vec<Condition>,
) -> BSelection<T> {
    let eps = coeffs.epsilon;
    let checks = [
        ("L1 > 0", format!("L1 = {}", coeffs.l1), coeffs.l1 > T::zero()),
        ("L2 < 0", format!("L2 = {}", coeffs.l2), coeffs.l2 < T::zero()),
        (
            "4 L1 L3 < L2^2",
            format!("{} < {}", T::lit(4.0) * coeffs.l1 * coeffs.l3, coeffs.l2 * coeffs.l2),
            coeffs.discriminant() < T::zero(),
        ),
    ];
    for (label, formula, passed) in checks {
        trace.push(Condition::new(label, formula, passed));
        if !passed {
            return BSelection::infeasible(eps, Some(coeffs), trace);
        }
    }
    let t_star = -coeffs.l2 / (T::two() * coeffs.l1);
    let b_star = b_of_t(inst, t_star);
    let floor = b_floor(inst);
    trace.push(Condition::new("t* > 0", format!("t* = {t_star}"), t_star > T::zero()));
    trace.push(Condition::new(
        "b* > max{0, (m-q+1)/Q}",
        format!("{b_star} > {floor}"),
        b_star > floor,
    ));
    if !(t_star > T::zero() && b_star > floor) {
        return BSelection::infeasible(eps, Some(coeffs), trace);
    }

    // γ positivity follows the monotonicity argument: β1 increases in b when
    // m <= q, and β2 is monotone with direction set by the sign of ξ'.
    let (p, q, m) = (inst.p, inst.q, inst.m);
    let q_cal = inst.q_cal();
    trace.push(Condition::new(
        "beta1 increasing in b (m <= q)",
        format!("{m} <= {q}"),
        m <= q,
    ));
    if b_star > T::one() && p > q {
        let xi_dir = m - q + q_cal / (p - q) - q_cal;
        let path = if xi_dir <= T::zero() {
            format!(
                "xi decreasing ({xi_dir} <= 0): beta2(b*) >= lim beta2 = {}",
                beta2_limit(inst)
            )
        } else {
            format!(
                "xi increasing ({xi_dir} > 0): beta2(b*) >= beta1(1) = {}",
                beta1(inst, T::one())
            )
        };
        trace.push(Condition::new("beta2 monotonicity path", path, true));
    }
    let b1 = beta1(inst, b_star);
    let b2 = beta2(inst, b_star);
    let g = gamma_of(b_star, b1, b2);
    trace.push(Condition::new(
        "gamma(b*) > 0",
        format!("beta1 = {b1}, beta2 = {b2}, gamma = {g}"),
        g > T::zero(),
    ));
    if !(g > T::zero()) {
        return BSelection::infeasible(eps, Some(coeffs), trace);
    }
    let kappa = -coeffs.value(t_star);
    trace.push(Condition::new(
        "kappa = -L(t*) > 0",
        format!("kappa = {kappa}"),
        kappa > T::zero(),
    ));
    if !(kappa > T::zero()) {
        return BSelection::infeasible(eps, Some(coeffs), trace);
    }
    BSelection {
        case_tag: CaseTag::Case3Convex,
        t_star: Some(t_star),
        b_star: Some(b_star),
        kappa: Some(kappa),
        epsilon_used: eps,
        coeffs: Some(coeffs),
        trace,
    }
}

/// Grid minimizer of 𝓛̃ over `[0, t_max]` with `grid_points` uniform nodes;
/// ties go to the smaller `t`.
pub fn verify_negativity<T: Scalar>(coeffs: &TrinomialCoeffs<T>, t_max: T, grid_points: usize) -> (T, T) {
    grid_minimum(|t| coeffs.value(t), t_max, grid_points)
}

pub(crate) fn grid_minimum<T: Scalar>(f: impl Fn(T) -> T, t_max: T, grid_points: usize) -> (T, T) {
    let n = grid_points.max(2);
    let step = t_max / T::of(n - 1);
    let mut best = (T::zero(), f(T::zero()));
    for i in 1..n {
        let t = step * T::of(i);
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// 𝒯(τ) for one value of 𝔄 = (A−1)/A, with E/A = q − 1 + (p − q)𝔄 and
/// Ξ = (E/A)²/N − (p − q)²𝔄(1 − 𝔄).
pub fn sum_trinomial_at<T: Scalar>(inst: &ProblemInstance<T>, frak_a: T, tau: T) -> T {
    let n = inst.dim();
    let one = T::one();
    let (p, q, s) = (inst.p, inst.q, inst.s);
    let e = q - one + (p - q) * frak_a;
    let xi = e * e / n - (p - q).powi(2) * frak_a * (one - frak_a);
    let k = s - q + one;
    let head = (tau - q + one) * s - (tau - s) * (n + T::two()) / n * e;
    head * head - T::lit(4.0) / n * (tau - s) * k * ((tau - s) / k * xi + e)
}

/// Coefficients of τ ↦ 𝒯(τ) at fixed 𝔄 (exact, all orders).
pub fn sum_trinomial<T: Scalar>(inst: &ProblemInstance<T>, frak_a: T) -> TrinomialCoeffs<T> {
    let n = inst.dim();
    let one = T::one();
    let two = T::two();
    let four_n = T::lit(4.0) / n;
    let (p, q, s) = (inst.p, inst.q, inst.s);
    let e = q - one + (p - q) * frak_a;
    let xi = e * e / n - (p - q).powi(2) * frak_a * (one - frak_a);
    let k = s - q + one;
    let c = (n + two) / n * e;
    let lead = s - c;
    let tail = s * (c - q + one);
    TrinomialCoeffs {
        l1: lead * lead - four_n * xi,
        l2: two * lead * tail - four_n * (k * e - two * s * xi),
        l3: tail * tail - four_n * (s * s * xi - k * e * s),
        epsilon: T::zero(),
        source: TrinomialSource::Sum,
    }
}

/// sup over 𝔄 ∈ [0, 1] of 𝒯(τ; 𝔄). 𝒯 is quadratic in 𝔄, so three samples
/// determine it and the supremum is exact.
pub fn sum_trinomial_sup<T: Scalar>(inst: &ProblemInstance<T>, tau: T) -> T {
    let half = T::half();
    let f0 = sum_trinomial_at(inst, T::zero(), tau);
    let fh = sum_trinomial_at(inst, half, tau);
    let f1 = sum_trinomial_at(inst, T::one(), tau);
    // f(x) = a x² + b x + f0
    let a = T::two() * (f1 + f0 - T::two() * fh);
    let b = f1 - f0 - a;
    let mut sup = f0.max(f1);
    if a < T::zero() {
        let x = -b / (T::two() * a);
        if x > T::zero() && x < T::one() {
            sup = sup.max((a * x + b) * x + f0);
        }
    }
    sup
}

/// s² − 2s(N+2)(q−1)/N + (N+4)(p−1)²/N + 4(p−q)²/N, the uniform bound on the
/// leading τ² coefficient of 𝒯.
pub fn sum_leading_bound<T: Scalar>(inst: &ProblemInstance<T>) -> T {
    let n = inst.dim();
    let one = T::one();
    let (p, q, s) = (inst.p, inst.q, inst.s);
    s * s - T::two() * s * (n + T::two()) / n * (q - one)
        + (n + T::lit(4.0)) / n * (p - one).powi(2)
        + T::lit(4.0) / n * (p - q).powi(2)
}

/// Large-τ selection for the sum nonlinearity.
///
/// Walks τ ∈ {1, 2, 4, …} and accepts the first τ with b = (τ−q+1)/(s−q+1) > 1,
/// β₂(b) > 0 and sup_𝔄 𝒯(τ) ≤ −1.
pub fn sum_selection<T: Scalar>(inst: &ProblemInstance<T>) -> Result<BSelection<T>> {
    let inst = inst.validated()?;
    let one = T::one();
    let (q, s, m) = (inst.q, inst.s, inst.m);
    let mut trace = Vec::new();
    let k = s - q + one;
    let lead = sum_leading_bound(&inst);
    let m_max = (inst.dim() + T::two()) * (q - one) / inst.dim();
    let limit = one - (inst.p - q) * (one + s) / k;
    let pre = [
        ("s > q - 1", format!("{s} > {}", q - one), s > q - one),
        ("leading coefficient < 0", format!("{lead} < 0"), lead < T::zero()),
        ("m <= (N+2)(q-1)/N", format!("{m} <= {m_max}"), m <= m_max),
        (
            "lim beta2 = 1 - (p-q)(1+s)/(s-q+1) > 0",
            format!("{limit} > 0"),
            limit > T::zero(),
        ),
    ];
    for (label, formula, passed) in pre {
        trace.push(Condition::new(label, formula, passed));
        if !passed {
            return Ok(BSelection::infeasible(T::zero(), None, trace));
        }
    }

    let mut as_product = inst;
    as_product.m = T::zero();
    let kappa = one;
    let mut tau = one;
    for _ in 0..=MAX_DOUBLINGS {
        let b = (tau - q + one) / k;
        if b > one {
            let b2 = beta2(&as_product, b);
            let sup = sum_trinomial_sup(&inst, tau);
            if b2 > T::zero() && sup <= -kappa {
                trace.push(Condition::new("b > 1", format!("b = {b}"), true));
                trace.push(Condition::new("beta2(b) > 0", format!("beta2 = {b2}"), true));
                trace.push(Condition::new(
                    "sup_A T(tau) <= -kappa",
                    format!("T({tau}) <= {sup}"),
                    true,
                ));
                return Ok(BSelection {
                    case_tag: CaseTag::SumLargeTau,
                    t_star: Some(tau),
                    b_star: Some(b),
                    kappa: Some(kappa),
                    epsilon_used: T::zero(),
                    coeffs: None,
                    trace,
                });
            }
        }
        tau = tau * T::two();
    }
    trace.push(Condition::new(
        "doubling schedule finds tau with b > 1, beta2 > 0, T <= -1",
        format!("no tau <= 2^{MAX_DOUBLINGS} qualifies"),
        false,
    ));
    Ok(BSelection::infeasible(T::zero(), None, trace))
}

/// Admissible (γ, α) region of the Ishii–Lions argument with δ(r) = r^{−α}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ILWindow<T> {
    pub gamma_lo: Option<T>,
    pub gamma_hi: T,
    pub feasible: bool,
    /// α bounds at a few sample γ inside the window.
    pub alpha_bounds: Vec<AlphaBound<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AlphaBound<T> {
    pub gamma: T,
    pub alpha_lo: T,
    pub alpha_hi: T,
}

impl<T: Scalar> ILWindow<T> {
    /// α interval at `gamma`, `None` outside the γ window.
    pub fn alpha_bounds_at(&self, gamma: T, q: T, m: T) -> Option<AlphaBound<T>> {
        let lo = self.gamma_lo?;
        if !(gamma > lo && gamma < self.gamma_hi) {
            return None;
        }
        let k = m + T::one() - q;
        Some(AlphaBound {
            gamma,
            alpha_lo: (gamma - T::one() + T::one() / k).max(T::zero()),
            alpha_hi: gamma,
        })
    }
}

pub fn il_parameter_window<T: Scalar>(q: T, m: T) -> Result<ILWindow<T>> {
    if !(q > T::one()) || !(m > T::zero()) {
        return Err(Error::Domain(format!("need q > 1 and m > 0, got q = {q}, m = {m}")));
    }
    let one = T::one();
    if !(m > q) {
        return Ok(ILWindow {
            gamma_lo: None,
            gamma_hi: one,
            feasible: false,
            alpha_bounds: Vec::new(),
        });
    }
    let k = m + one - q;
    let lo = one - one / k;
    let mut window = ILWindow {
        gamma_lo: Some(lo),
        gamma_hi: one,
        feasible: true,
        alpha_bounds: Vec::new(),
    };
    for frac in [0.25, 0.5, 0.75] {
        let gamma = lo + (one - lo) * T::lit(frac);
        if let Some(bound) = window.alpha_bounds_at(gamma, q, m) {
            window.alpha_bounds.push(bound);
        }
    }
    Ok(window)
}

/// The raw constraints on (γ, α) before solving them: the two conditions
/// on γ and the three limits of δ(r) = r^{−α} as r → ∞ (δ → 0,
/// δ r^γ → ∞, δ r^{((γ−1)(m+1−q)+1)/(m+1−q)} → 0), with γ ∈ (0, 1).
pub fn il_constraints_hold<T: Scalar>(q: T, m: T, gamma: T, alpha: T) -> bool {
    let one = T::one();
    let k = m + one - q;
    let e = ((gamma - one) * k + one) / k;
    let gamma_ok = gamma > T::zero()
        && gamma < one
        && m - one - (one - gamma) * (q - one) > (q - one) * gamma
        && T::zero() < e
        && e < gamma;
    gamma_ok && alpha > T::zero() && gamma - alpha > T::zero() && e - alpha < T::zero()
}
