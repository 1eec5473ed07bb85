use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::grid::GridField;

/// Analytic test fields with exact derivatives.
///
/// `ShiftedSinCos` is the positive, gradient-nonvanishing field used for the
/// change-of-variable identity on `[0, 1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manufactured {
    /// 1 + 0.7 x₁ − 1.3 x₂ (+ 0.4 x₃)
    Affine,
    /// x₁² − x₂²
    Saddle,
    /// |x|²
    SquaredNorm,
    /// sin x₁ cos x₂
    SinCos,
    /// 2 + 0.3 sin x₁ cos x₂
    ShiftedSinCos,
    /// sin x₁
    SinX1,
}

impl Manufactured {
    pub const ALL: [Manufactured; 6] = [
        Self::Affine,
        Self::Saddle,
        Self::SquaredNorm,
        Self::SinCos,
        Self::ShiftedSinCos,
        Self::SinX1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Affine => "affine",
            Self::Saddle => "saddle",
            Self::SquaredNorm => "squared_norm",
            Self::SinCos => "sin_cos",
            Self::ShiftedSinCos => "shifted_sin_cos",
            Self::SinX1 => "sin_x1",
        }
    }

    pub fn value<T: Scalar>(self, x: &[T]) -> T {
        let l = T::lit;
        match self {
            Self::Affine => {
                let mut v = T::one() + l(0.7) * x[0] - l(1.3) * x[1];
                if x.len() > 2 {
                    v = v + l(0.4) * x[2];
                }
                v
            }
            Self::Saddle => x[0] * x[0] - x[1] * x[1],
            Self::SquaredNorm => x.iter().fold(T::zero(), |a, &c| a + c * c),
            Self::SinCos => x[0].sin() * x[1].cos(),
            Self::ShiftedSinCos => T::two() + l(0.3) * x[0].sin() * x[1].cos(),
            Self::SinX1 => x[0].sin(),
        }
    }

    pub fn gradient<T: Scalar>(self, x: &[T]) -> Vec<T> {
        let l = T::lit;
        let mut g = vec![T::zero(); x.len()];
        match self {
            Self::Affine => {
                g[0] = l(0.7);
                g[1] = l(-1.3);
                if x.len() > 2 {
                    g[2] = l(0.4);
                }
            }
            Self::Saddle => {
                g[0] = T::two() * x[0];
                g[1] = -T::two() * x[1];
            }
            Self::SquaredNorm => {
                for (gi, &xi) in g.iter_mut().zip(x) {
                    *gi = T::two() * xi;
                }
            }
            Self::SinCos | Self::ShiftedSinCos => {
                let a = if self == Self::SinCos { T::one() } else { l(0.3) };
                g[0] = a * x[0].cos() * x[1].cos();
                g[1] = -a * x[0].sin() * x[1].sin();
            }
            Self::SinX1 => g[0] = x[0].cos(),
        }
        g
    }

    pub fn hessian<T: Scalar>(self, x: &[T]) -> Vec<Vec<T>> {
        let d = x.len();
        let mut h = vec![vec![T::zero(); d]; d];
        match self {
            Self::Affine => {}
            Self::Saddle => {
                h[0][0] = T::two();
                h[1][1] = -T::two();
            }
            Self::SquaredNorm => {
                for (k, row) in h.iter_mut().enumerate() {
                    row[k] = T::two();
                }
            }
            Self::SinCos | Self::ShiftedSinCos => {
                let a = if self == Self::SinCos { T::one() } else { T::lit(0.3) };
                let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
                h[0][0] = -a * s1 * c2;
                h[1][1] = -a * s1 * c2;
                h[0][1] = -a * c1 * s2;
                h[1][0] = h[0][1];
            }
            Self::SinX1 => h[0][0] = -x[0].sin(),
        }
        h
    }

    /// Exact Δ_k u = |∇u|^{k−2}(Δu + (k−2)⟨D²u ∇u, ∇u⟩/|∇u|²).
    pub fn k_laplacian<T: Scalar>(self, x: &[T], k: T) -> T {
        let g = self.gradient(x);
        let h = self.hessian(x);
        k_laplacian_from(&g, &h, k)
    }

    pub fn pq_laplacian<T: Scalar>(self, x: &[T], p: T, q: T) -> T {
        self.k_laplacian(x, p) + self.k_laplacian(x, q)
    }

    pub fn sample<T: Scalar>(self, dims: Vec<usize>, spacing: T, origin: Vec<T>) -> Result<GridField<T>> {
        GridField::sample(dims, spacing, origin, |x| self.value(x))
    }

    pub fn sample_unit<T: Scalar>(self, d: usize, cells: usize) -> Result<GridField<T>> {
        GridField::sample_unit(d, cells, |x| self.value(x))
    }
}

/// Δ_k of a function with gradient `g` and Hessian `h` at one point.
pub fn k_laplacian_from<T: Scalar>(g: &[T], h: &[Vec<T>], k: T) -> T {
    let z = g.iter().fold(T::zero(), |a, &c| a + c * c);
    let lap = (0..g.len()).fold(T::zero(), |a, i| a + h[i][i]);
    if k == T::two() {
        return lap;
    }
    if z == T::zero() {
        return T::zero();
    }
    let mut hgg = T::zero();
    for i in 0..g.len() {
        for j in 0..g.len() {
            hgg = hgg + h[i][j] * g[i] * g[j];
        }
    }
    z.powf((k - T::two()) / T::two()) * (lap + (k - T::two()) * hgg / z)
}

impl std::str::FromStr for Manufactured {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Domain(format!("unknown manufactured field `{s}`")))
    }
}
