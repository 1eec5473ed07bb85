//! Threshold and exponent formulas from the theorem statements, and the
//! classifier that evaluates every hypothesis of each theorem literally.
//!
//! Strict inequalities use exact floating comparison; nothing is given an
//! epsilon of slack. Quantities that are undefined for a given instance
//! (division by `s = 0`, a negative discriminant) are `None`, never a
//! sentinel number.

use serde::{Deserialize, Serialize};

use crate::bernstein::{self, BSelection, CaseTag};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// `f = |∇u|^m`
    HamiltonJacobi,
    /// `f = u^s |∇u|^m`
    Product,
    /// `f = u^s + M |∇u|^m`
    Sum,
}

impl NonlinearityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::HamiltonJacobi => "hamilton_jacobi",
            Self::Product => "product",
            Self::Sum => "sum",
        }
    }
}

impl std::str::FromStr for NonlinearityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "hamilton_jacobi" | "hj" => Ok(Self::HamiltonJacobi),
            "product" => Ok(Self::Product),
            "sum" => Ok(Self::Sum),
            other => Err(Error::InvalidInstance(format!("unknown nonlinearity kind `{other}`"))),
        }
    }
}

/// One equation `-Δ_p u - Δ_q u = f(u, ∇u)` in dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProblemInstance<T> {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: T,
    pub q: T,
    pub s: T,
    pub m: T,
    #[serde(rename = "M")]
    pub big_m: T,
    pub kind: NonlinearityKind,
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn hamilton_jacobi(n: usize, p: T, q: T, m: T) -> Self {
        Self {
            n,
            p,
            q,
            s: T::zero(),
            m,
            big_m: T::zero(),
            kind: NonlinearityKind::HamiltonJacobi,
        }
    }

    pub fn product(n: usize, p: T, q: T, s: T, m: T) -> Self {
        Self {
            n,
            p,
            q,
            s,
            m,
            big_m: T::zero(),
            kind: NonlinearityKind::Product,
        }
    }

    pub fn sum(n: usize, p: T, q: T, s: T, m: T, big_m: T) -> Self {
        Self {
            n,
            p,
            q,
            s,
            m,
            big_m,
            kind: NonlinearityKind::Sum,
        }
    }

    /// Checks the structural invariants and zeroes the fields a kind ignores.
    pub fn validated(&self) -> Result<Self> {
        let fields = [
            ("p", self.p),
            ("q", self.q),
            ("s", self.s),
            ("m", self.m),
            ("M", self.big_m),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidInstance(format!("{name} is not finite")));
            }
        }
        if self.n < 2 {
            return Err(Error::InvalidInstance(format!("N = {} must be at least 2", self.n)));
        }
        if !(self.q > T::one()) {
            return Err(Error::InvalidInstance(format!("q = {} must exceed 1", self.q)));
        }
        if self.p < self.q {
            return Err(Error::InvalidInstance(format!(
                "p = {} must be at least q = {}",
                self.p, self.q
            )));
        }
        let mut out = *self;
        if self.kind == NonlinearityKind::HamiltonJacobi {
            out.s = T::zero();
            out.big_m = T::zero();
        }
        if out.s < T::zero() || out.m < T::zero() || out.big_m < T::zero() {
            return Err(Error::InvalidInstance("s, m and M must be nonnegative".into()));
        }
        Ok(out)
    }

    pub fn dim(&self) -> T {
        T::of(self.n)
    }

    /// 𝒬 = m + s − q + 1.
    pub fn q_cal(&self) -> T {
        self.m + self.s - self.q + T::one()
    }

    /// 𝓡 = (p − q)[p − q + 4(p − 1)/N].
    pub fn r_cal(&self) -> T {
        let d = self.p - self.q;
        d * (d + T::lit(4.0) * (self.p - T::one()) / self.dim())
    }

    /// (q − 1) / (p − 1 + N(p − q)/2), the upper bound on `s` in cases B and C.
    pub fn s_threshold(&self) -> T {
        (self.q - T::one()) / (self.p - T::one() + self.dim() * (self.p - self.q) / T::two())
    }
}

/// Derived thresholds for the product nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProductThresholds<T> {
    #[serde(rename = "R")]
    pub r: T,
    #[serde(rename = "Q")]
    pub q_cal: T,
    #[serde(rename = "Q1")]
    pub q1: Option<T>,
    #[serde(rename = "Q2")]
    pub q2: Option<T>,
    #[serde(rename = "Q3")]
    pub q3: Option<T>,
    pub a: Option<T>,
    pub discriminant_ok: bool,
}

impl<T: Scalar> ProductThresholds<T> {
    pub fn q3(&self) -> Result<T> {
        self.q3.ok_or(Error::ThresholdUndefined("Q3"))
    }

    pub fn a(&self) -> Result<T> {
        self.a.ok_or(Error::ThresholdUndefined("a"))
    }
}

/// Computes 𝓡, 𝒬, 𝒬₁, 𝒬₂, 𝒬₃ and `a`.
///
/// `Q1` is evaluated as `R / Q2` (same value as `2(q−1)/N − √(…)`, without
/// the cancellation). `Q3` and `a` are absent when `s = 0`; `a` is also
/// absent when its denominator `N s 𝓡 + 4(p−1)𝒬₁` vanishes (only at p = q).
pub fn product_thresholds<T: Scalar>(inst: &ProblemInstance<T>) -> Result<ProductThresholds<T>> {
    let inst = inst.validated()?;
    if inst.kind != NonlinearityKind::Product {
        return Err(Error::InvalidInstance("product thresholds need kind = product".into()));
    }
    let n = inst.dim();
    let (p, q, s) = (inst.p, inst.q, inst.s);
    let one = T::one();
    let four = T::lit(4.0);
    let r = inst.r_cal();
    let q_cal = inst.q_cal();
    let discriminant_ok = four * (q - one).powi(2) >= n * n * r;

    let mut out = ProductThresholds {
        r,
        q_cal,
        q1: None,
        q2: None,
        q3: None,
        a: None,
        discriminant_ok,
    };
    if !discriminant_ok {
        return Ok(out);
    }
    let c = T::two() * (q - one) / n;
    let root = (c * c - r).max(T::zero()).sqrt();
    let q2 = c + root;
    let q1 = if q2 > T::zero() { r / q2 } else { c - root };
    out.q1 = Some(q1);
    out.q2 = Some(q2);

    if s > T::zero() {
        let b = gap_numerator(&inst);
        out.q3 = Some(q2 + b * b / (s * (s * r / q2 + four * (p - one) / n)));
        let denom = n * s * r + four * (p - one) * q1;
        if denom != T::zero() {
            out.a = Some(n / s * b * b / denom);
        }
    }
    Ok(out)
}

/// 2(q−1)/N − s(2(p−1)/N + p − q): the bracket shared by 𝒬₃, `a` and L̃₂.
pub(crate) fn gap_numerator<T: Scalar>(inst: &ProblemInstance<T>) -> T {
    let n = inst.dim();
    let one = T::one();
    T::two() * (inst.q - one) / n - inst.s * (T::two() * (inst.p - one) / n + inst.p - inst.q)
}

/// Thresholds for the sum nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SumThresholds<T> {
    pub delta_pq: T,
    pub s_minus: Option<T>,
    pub s_plus: Option<T>,
    pub m_max: T,
    pub gap_ok: bool,
}

pub fn sum_thresholds<T: Scalar>(inst: &ProblemInstance<T>) -> Result<SumThresholds<T>> {
    let inst = inst.validated()?;
    if inst.kind != NonlinearityKind::Sum {
        return Err(Error::InvalidInstance("sum thresholds need kind = sum".into()));
    }
    let n = inst.dim();
    let one = T::one();
    let two = T::two();
    let four = T::lit(4.0);
    let (p, q) = (inst.p, inst.q);
    let np2 = n + two;
    let delta_pq = np2 * np2 * (q - one).powi(2) - n * (n + four) * (p - one).powi(2) - four * n * (p - q).powi(2);
    let (s_minus, s_plus) = if delta_pq > T::zero() {
        let root = delta_pq.sqrt();
        (Some((np2 * (q - one) - root) / n), Some((np2 * (q - one) + root) / n))
    } else {
        (None, None)
    };
    Ok(SumThresholds {
        delta_pq,
        s_minus,
        s_plus,
        m_max: np2 * (q - one) / n,
        gap_ok: n * (p - q) < two * (q - one),
    })
}

/// Exponents attached to a Bernstein parameter `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ExponentBundle<T> {
    pub b: T,
    pub t: T,
    pub beta1: T,
    pub beta2: T,
    pub gamma: T,
    /// `None` when the formula leaves (0, 2).
    pub theta: Option<T>,
}

/// t = (b − 1)(m − q + 1) + b s.
pub fn t_of_b<T: Scalar>(inst: &ProblemInstance<T>, b: T) -> T {
    (b - T::one()) * (inst.m - inst.q + T::one()) + b * inst.s
}

/// b = (t + m − q + 1)/𝒬.
pub fn b_of_t<T: Scalar>(inst: &ProblemInstance<T>, t: T) -> T {
    (t + inst.m - inst.q + T::one()) / inst.q_cal()
}

/// max{0, (m − q + 1)/𝒬}.
pub fn b_floor<T: Scalar>(inst: &ProblemInstance<T>) -> T {
    ((inst.m - inst.q + T::one()) / inst.q_cal()).max(T::zero())
}

/// β₁ = b𝒬/(b𝒬 + q − m) − (p − q).
pub fn beta1<T: Scalar>(inst: &ProblemInstance<T>, b: T) -> T {
    let bq = b * inst.q_cal();
    bq / (bq + inst.q - inst.m) - (inst.p - inst.q)
}

/// β₂ = β₁ + (b − 1)(p − q)(m − q)/(b𝒬 + q − m).
pub fn beta2<T: Scalar>(inst: &ProblemInstance<T>, b: T) -> T {
    let denom = b * inst.q_cal() + inst.q - inst.m;
    beta1(inst, b) + (b - T::one()) * (inst.p - inst.q) * (inst.m - inst.q) / denom
}

/// lim_{b→∞} β₂ = 1 − (p − q)(1 + s)/𝒬.
pub fn beta2_limit<T: Scalar>(inst: &ProblemInstance<T>) -> T {
    T::one() - (inst.p - inst.q) * (T::one() + inst.s) / inst.q_cal()
}

/// γ = min{1, χ_(0,1](b) β₁} + min{1, χ_(1,∞)(b) β₂}, evaluated with the
/// indicator functions as written: the inactive branch contributes min{1, 0} = 0.
pub fn gamma_of<T: Scalar>(b: T, beta1: T, beta2: T) -> T {
    let one = T::one();
    let chi_low = if b > T::zero() && b <= one { one } else { T::zero() };
    let chi_high = if b > one { one } else { T::zero() };
    one.min(chi_low * beta1) + one.min(chi_high * beta2)
}

/// Evaluates t, β₁, β₂, γ and θ at `b` for the product nonlinearity.
///
/// The sum nonlinearity reuses these formulas at `m = 0`: then `t` is the
/// parameter τ = b(s − q + 1) + q − 1 and β₂ is the sum-case exponent.
pub fn exponent_bundle<T: Scalar>(inst: &ProblemInstance<T>, b: T) -> Result<ExponentBundle<T>> {
    let inst = inst.validated()?;
    let q_cal = inst.q_cal();
    if !(q_cal > T::zero()) {
        return Err(Error::DegenerateQ(q_cal.as_f64()));
    }
    let floor = b_floor(&inst);
    if !(b > floor) {
        return Err(Error::BelowAdmissibleFloor {
            b: b.as_f64(),
            floor: floor.as_f64(),
        });
    }
    let t = t_of_b(&inst, b);
    let b1 = beta1(&inst, b);
    let b2 = beta2(&inst, b);
    let two = T::two();
    let theta = if b <= T::one() {
        two / (t + T::one())
    } else {
        (two * (b - T::one()) * (inst.p - inst.q) + two) / (t + T::one())
    };
    let theta = (theta > T::zero() && theta < two).then_some(theta);
    Ok(ExponentBundle {
        b,
        t,
        beta1: b1,
        beta2: b2,
        gamma: gamma_of(b, b1, b2),
        theta,
    })
}

/// Exponent bundle for the sum nonlinearity (product formulas at m = 0).
pub fn sum_exponent_bundle<T: Scalar>(inst: &ProblemInstance<T>, b: T) -> Result<ExponentBundle<T>> {
    let mut as_product = inst.validated()?;
    as_product.m = T::zero();
    as_product.kind = NonlinearityKind::Product;
    exponent_bundle(&as_product, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "thm_HJ")]
    HamiltonJacobi,
    #[serde(rename = "thm_product_A")]
    ProductA,
    #[serde(rename = "thm_product_B")]
    ProductB,
    #[serde(rename = "thm_product_C")]
    ProductC,
    #[serde(rename = "thm_IL")]
    IshiiLions,
    #[serde(rename = "thm_sum_growth")]
    SumGrowth,
    #[serde(rename = "thm_sum_liouville")]
    SumLiouville,
    #[serde(rename = "none")]
    None,
}

impl Theorem {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::HamiltonJacobi => "thm_HJ",
            Self::ProductA => "thm_product_A",
            Self::ProductB => "thm_product_B",
            Self::ProductC => "thm_product_C",
            Self::IshiiLions => "thm_IL",
            Self::SumGrowth => "thm_sum_growth",
            Self::SumLiouville => "thm_sum_liouville",
            Self::None => "none",
        }
    }

    pub fn is_product(self) -> bool {
        matches!(self, Self::ProductA | Self::ProductB | Self::ProductC)
    }

    /// Headline rank, lower wins. Product > sum > HJ > IL; IL only concerns
    /// bounded solutions, so any match without that restriction outranks it.
    fn rank(self) -> u8 {
        match self {
            Self::ProductA | Self::ProductB | Self::ProductC => 0,
            Self::SumLiouville => 1,
            Self::SumGrowth => 2,
            Self::HamiltonJacobi => 3,
            Self::IshiiLions => 4,
            Self::None => u8::MAX,
        }
    }

    /// Whether the conclusion includes constancy of entire solutions.
    pub fn yields_liouville(self) -> bool {
        !matches!(self, Self::SumGrowth | Self::None)
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub formula: String,
    pub passed: bool,
}

impl Condition {
    pub fn new(label: impl Into<String>, formula: impl Into<String>, passed: bool) -> Self {
        Self {
            label: label.into(),
            formula: formula.into(),
            passed,
        }
    }
}

/// All hypotheses of one theorem, evaluated on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub theorem: Theorem,
    pub conditions: Vec<Condition>,
    pub holds: bool,
}

impl TheoremCheck {
    fn new(theorem: Theorem, conditions: Vec<Condition>) -> Self {
        let holds = conditions.iter().all(|c| c.passed);
        Self {
            theorem,
            conditions,
            holds,
        }
    }
}

/// Which function a gradient estimate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum BoundedQuantity<T> {
    /// |∇u|
    GradU,
    /// |∇u^{1/b}|
    GradUPower { b: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RegimeDecision<T> {
    pub instance: ProblemInstance<T>,
    pub theorem: Theorem,
    pub liouville: bool,
    pub estimate_exponent: Option<T>,
    pub bounded_quantity: Option<BoundedQuantity<T>>,
    pub exponents: Option<ExponentBundle<T>>,
    /// Every theorem whose hypotheses all pass, in headline order.
    pub matched: Vec<Theorem>,
    pub checks: Vec<TheoremCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_thresholds: Option<ProductThresholds<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_thresholds: Option<SumThresholds<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<BSelection<T>>,
}

impl<T: Scalar> RegimeDecision<T> {
    /// Hypotheses of the headline theorem (the full trace when none matched).
    pub fn conditions(&self) -> Vec<&Condition> {
        match self.checks.iter().find(|c| c.theorem == self.theorem) {
            Some(check) => check.conditions.iter().collect(),
            None => self.checks.iter().flat_map(|c| c.conditions.iter()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Replace the literal (non-optimal) case C windows by the trinomial oracle.
    pub optimal_search: bool,
}

pub fn classify<T: Scalar>(inst: &ProblemInstance<T>) -> Result<RegimeDecision<T>> {
    classify_with(inst, ClassifyOptions::default())
}

pub fn classify_with<T: Scalar>(inst: &ProblemInstance<T>, opts: ClassifyOptions) -> Result<RegimeDecision<T>> {
    let inst = inst.validated()?;
    let mut checks = Vec::new();
    let mut product_th = None;
    let mut sum_th = None;
    let mut selection = None;

    match inst.kind {
        NonlinearityKind::HamiltonJacobi => {
            checks.push(hamilton_jacobi_check(&inst));
            checks.push(ishii_lions_check(&inst));
        }
        NonlinearityKind::Product => {
            let th = product_thresholds(&inst)?;
            let sel = bernstein::select_b_product(&inst)?;
            checks.extend(product_checks(&inst, &th, &sel, opts));
            checks.push(ishii_lions_check(&inst));
            product_th = Some(th);
            selection = Some(sel);
        }
        NonlinearityKind::Sum => {
            let th = sum_thresholds(&inst)?;
            let sel = bernstein::sum_selection(&inst)?;
            checks.push(sum_liouville_check(&inst, &th, &sel));
            checks.push(sum_growth_check(&inst));
            sum_th = Some(th);
            selection = Some(sel);
        }
    }

    let mut matched: Vec<Theorem> = checks.iter().filter(|c| c.holds).map(|c| c.theorem).collect();
    matched.sort_by_key(|t| t.rank());
    let theorem = matched.first().copied().unwrap_or(Theorem::None);

    let mut decision = RegimeDecision {
        instance: inst,
        theorem,
        liouville: theorem.yields_liouville(),
        estimate_exponent: None,
        bounded_quantity: None,
        exponents: None,
        matched,
        checks,
        product_thresholds: product_th,
        sum_thresholds: sum_th,
        selection,
    };

    let one = T::one();
    match theorem {
        Theorem::HamiltonJacobi => {
            decision.estimate_exponent = Some(one / (inst.m - inst.p + one));
            decision.bounded_quantity = Some(BoundedQuantity::GradU);
        }
        Theorem::SumGrowth => {
            decision.estimate_exponent = Some(one / (inst.m - inst.p + T::two()));
            decision.bounded_quantity = Some(BoundedQuantity::GradU);
        }
        t if t.is_product() || t == Theorem::SumLiouville => {
            let b = decision.selection.as_ref().and_then(|s| s.b_star);
            if let Some(b) = b {
                let bundle = if t == Theorem::SumLiouville {
                    sum_exponent_bundle(&inst, b)?
                } else {
                    exponent_bundle(&inst, b)?
                };
                decision.estimate_exponent = Some(T::two() / bundle.gamma);
                decision.bounded_quantity = Some(BoundedQuantity::GradUPower { b });
                decision.exponents = Some(bundle);
            }
        }
        _ => {}
    }
    Ok(decision)
}

/// Distance power of the gradient estimate carried by a decision, and the
/// function it bounds.
pub fn estimate_rate<T: Scalar>(decision: &RegimeDecision<T>) -> Result<(T, BoundedQuantity<T>)> {
    match decision.theorem {
        Theorem::IshiiLions => Err(Error::NoEstimate("thm_IL (constancy only, no rate)")),
        Theorem::None => Err(Error::NoEstimate("an instance matching no theorem")),
        _ => match (decision.estimate_exponent, decision.bounded_quantity) {
            (Some(rate), Some(q)) => Ok((rate, q)),
            _ => Err(Error::NoEstimate("a decision without exponents")),
        },
    }
}

fn hamilton_jacobi_check<T: Scalar>(inst: &ProblemInstance<T>) -> TheoremCheck {
    let (p, m) = (inst.p, inst.m);
    TheoremCheck::new(
        Theorem::HamiltonJacobi,
        vec![Condition::new(
            "m > p - 1",
            format!("{m} > {}", p - T::one()),
            m > p - T::one(),
        )],
    )
}

fn ishii_lions_check<T: Scalar>(inst: &ProblemInstance<T>) -> TheoremCheck {
    let (q, m) = (inst.q, inst.m);
    TheoremCheck::new(
        Theorem::IshiiLions,
        vec![
            Condition::new(
                "|f| <= g(u)|∇u|^m with g continuous",
                format!(
                    "g(u) = {}",
                    if inst.kind == NonlinearityKind::Product {
                        "u^s"
                    } else {
                        "1"
                    }
                ),
                inst.kind != NonlinearityKind::Sum,
            ),
            Condition::new("m > q > 1", format!("{m} > {q} > 1"), m > q && q > T::one()),
            Condition::new("solutions bounded (assumed)", "bounded solutions only", true),
        ],
    )
}

/// Hypotheses shared by every case of the product theorem. All three parts
/// of the β₂-limit condition are required for each case.
fn product_shared_conditions<T: Scalar>(inst: &ProblemInstance<T>, th: &ProductThresholds<T>) -> Vec<Condition> {
    let one = T::one();
    let (n, p, q, s, m) = (inst.dim(), inst.p, inst.q, inst.s, inst.m);
    let q_cal = th.q_cal;
    let limit = if q_cal > T::zero() {
        Some(beta2_limit(inst))
    } else {
        None
    };
    vec![
        Condition::new("s > 0", format!("{s} > 0"), s > T::zero()),
        Condition::new("m >= 0", format!("{m} >= 0"), m >= T::zero()),
        Condition::new(
            "1 - (p-q)(1+s)/(m+s-q+1) > 0",
            match limit {
                Some(l) => format!("{l} > 0"),
                None => format!("Q = {q_cal} <= 0"),
            },
            limit.is_some_and(|l| l > T::zero()),
        ),
        Condition::new("m + s > p - 1", format!("{} > {}", m + s, p - one), m + s > p - one),
        Condition::new(
            "4(q-1)^2 >= N^2 R",
            format!("{} >= {}", T::lit(4.0) * (q - one).powi(2), n * n * th.r),
            th.discriminant_ok,
        ),
    ]
}

fn product_checks<T: Scalar>(
    inst: &ProblemInstance<T>,
    th: &ProductThresholds<T>,
    sel: &BSelection<T>,
    opts: ClassifyOptions,
) -> Vec<TheoremCheck> {
    let shared = product_shared_conditions(inst, th);
    let q_cal = th.q_cal;
    let (p, q, s, m) = (inst.p, inst.q, inst.s, inst.m);
    let s_thr = inst.s_threshold();
    let s_cond = Condition::new("s < (q-1)/(p-1+N(p-q)/2)", format!("{s} < {s_thr}"), s < s_thr);
    let feasible = |tag: CaseTag| {
        Condition::new(
            "Bernstein selection feasible (b>0 bound, L(t) <= -kappa, gamma > 0)",
            format!("case {}: {}", sel.case_tag.as_str(), sel.summary()),
            sel.case_tag == tag,
        )
    };

    let (in_a, in_b, a_formula, b_formula) = match (th.q1, th.q2) {
        (Some(q1), Some(q2)) => (
            q1 < q_cal && q_cal < q2,
            q_cal == q1 || q_cal == q2,
            format!("{q1} < {q_cal} < {q2}"),
            format!("{q_cal} in {{{q1}, {q2}}}"),
        ),
        _ => (
            false,
            false,
            "Q1, Q2 undefined".to_string(),
            "Q1, Q2 undefined".to_string(),
        ),
    };

    let mut case_a = shared.clone();
    case_a.push(Condition::new("Q1 < Q < Q2", a_formula, in_a));
    case_a.push(feasible(CaseTag::Case1L1Neg));

    let mut case_b = shared.clone();
    case_b.push(Condition::new("Q in {Q1, Q2}", b_formula, in_b));
    case_b.push(s_cond.clone());
    case_b.push(feasible(CaseTag::Case2L1Zero));

    let mut case_c = shared;
    case_c.push(s_cond);
    case_c.push(Condition::new(
        "0 <= m <= q < p < m+1",
        format!("0 <= {m} <= {q} < {p} < {}", m + T::one()),
        m >= T::zero() && m <= q && q < p && p < m + T::one(),
    ));
    if opts.optimal_search {
        let (passed, formula) = match bernstein::product_trinomial(inst, T::zero()) {
            Ok(coeffs) if coeffs.l1 > T::zero() => {
                let vertex = -coeffs.l2 / (T::two() * coeffs.l1);
                let t_max = T::lit(4.0) * vertex.max(T::one());
                let (t_min, v_min) = bernstein::verify_negativity(&coeffs, t_max, bernstein::DEFAULT_GRID_POINTS);
                let outside = !(in_a || in_b) && th.discriminant_ok;
                (
                    outside && v_min < T::zero(),
                    format!("grid min L({t_min}) = {v_min} < 0"),
                )
            }
            Ok(coeffs) => (false, format!("L1 = {} is not positive", coeffs.l1)),
            Err(e) => (false, e.to_string()),
        };
        case_c.push(Condition::new(
            "trinomial oracle: min over t >= 0 of L(t) < 0",
            formula,
            passed,
        ));
    } else {
        case_c.push(case_c_window(inst, th));
    }
    case_c.push(feasible(CaseTag::Case3Convex));

    vec![
        TheoremCheck::new(Theorem::ProductA, case_a),
        TheoremCheck::new(Theorem::ProductB, case_b),
        TheoremCheck::new(Theorem::ProductC, case_c),
    ]
}

/// Q ∈ (Q2, Q3) ∪ lower window, the lower window depending on a ≤ 1 or a > 1.
fn case_c_window<T: Scalar>(inst: &ProblemInstance<T>, th: &ProductThresholds<T>) -> Condition {
    let label = "Q in (Q2, Q3) or the lower window (a <= 1 / a > 1 split)";
    let (Some(q1), Some(q2)) = (th.q1, th.q2) else {
        return Condition::new(label, "Q1, Q2 undefined", false);
    };
    let q_cal = th.q_cal;
    let n = inst.dim();
    let four_q1 = T::lit(4.0) * (inst.q - T::one());
    let upper = th
        .q3
        .map(|q3| (q2 < q_cal && q_cal < q3, format!("{q2} < {q_cal} < {q3}")));
    let lower = th.a.map(|a| {
        let lo = if a <= T::one() {
            n * ((T::one() - a) * q1 * q1 + th.r) / four_q1
        } else {
            th.r * n / four_q1
        };
        (lo < q_cal && q_cal < q1, format!("a = {a}: {lo} < {q_cal} < {q1}"))
    });
    let passed = upper.as_ref().is_some_and(|u| u.0) || lower.as_ref().is_some_and(|l| l.0);
    let render =
        |w: Option<(bool, String)>, name: &str| w.map(|(_, f)| f).unwrap_or_else(|| format!("{name} undefined"));
    Condition::new(
        label,
        format!("{} | {}", render(upper, "Q3"), render(lower, "a")),
        passed,
    )
}

fn sum_growth_check<T: Scalar>(inst: &ProblemInstance<T>) -> TheoremCheck {
    let one = T::one();
    let (p, q, s, m, big_m) = (inst.p, inst.q, inst.s, inst.m, inst.big_m);
    let s_lo = (q - one).max(one);
    let m_lo = (q * s / (s + one)).max(T::two() * s);
    TheoremCheck::new(
        Theorem::SumGrowth,
        vec![
            Condition::new("M > 0", format!("{big_m} > 0"), big_m > T::zero()),
            Condition::new(
                "m - p + 2 > 0",
                format!("{} > 0", m - p + T::two()),
                m - p + T::two() > T::zero(),
            ),
            Condition::new("s > max{q-1, 1}", format!("{s} > {s_lo}"), s > s_lo),
            Condition::new("m > max{qs/(s+1), 2s}", format!("{m} > {m_lo}"), m > m_lo),
        ],
    )
}

fn sum_liouville_check<T: Scalar>(
    inst: &ProblemInstance<T>,
    th: &SumThresholds<T>,
    sel: &BSelection<T>,
) -> TheoremCheck {
    let one = T::one();
    let (n, p, q, s, m, big_m) = (inst.dim(), inst.p, inst.q, inst.s, inst.m, inst.big_m);
    let s_window = match (th.s_minus, th.s_plus) {
        (Some(lo), Some(hi)) => {
            let lo = lo.max(p - one);
            Condition::new("max{S-, p-1} < s < S+", format!("{lo} < {s} < {hi}"), lo < s && s < hi)
        }
        _ => Condition::new("max{S-, p-1} < s < S+", "S-, S+ undefined (Delta <= 0)", false),
    };
    let denom = s - q + one;
    let limit = one - (p - q) * (one + s) / denom;
    TheoremCheck::new(
        Theorem::SumLiouville,
        vec![
            Condition::new("M > 0", format!("{big_m} > 0"), big_m > T::zero()),
            Condition::new(
                "N(p-q) < 2(q-1)",
                format!("{} < {}", n * (p - q), T::two() * (q - one)),
                th.gap_ok,
            ),
            Condition::new("Delta_pq > 0", format!("{} > 0", th.delta_pq), th.delta_pq > T::zero()),
            s_window,
            Condition::new(
                "1 - (p-q)(1+s)/(s-q+1) > 0",
                format!("{limit} > 0"),
                denom > T::zero() && limit > T::zero(),
            ),
            Condition::new(
                "0 < m <= (N+2)(q-1)/N",
                format!("0 < {m} <= {}", th.m_max),
                m > T::zero() && m <= th.m_max,
            ),
            Condition::new(
                "Bernstein selection feasible (large tau)",
                format!("case {}: {}", sel.case_tag.as_str(), sel.summary()),
                sel.case_tag == CaseTag::SumLargeTau,
            ),
        ],
    )
}
