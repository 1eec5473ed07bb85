use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::grid::GridField;

/// Relative size of the flux regularization, `ε_reg = REG_REL · max|u|`.
pub const REG_REL: f64 = 1e-10;

/// Central-difference gradient, one field per axis.
pub fn gradient<T: Scalar>(u: &GridField<T>) -> Vec<GridField<T>> {
    let margin = u.margin + 1;
    let two_h = T::two() * u.spacing;
    (0..u.ndim())
        .map(|axis| {
            let st = u.stride(axis);
            let mut out = u.zeros_like();
            out.margin = margin;
            for i in 0..u.len() {
                if u.is_inside(i, margin) {
                    out.values[i] = (u.values[i + st] - u.values[i - st]) / two_h;
                }
            }
            out
        })
        .collect()
}

/// Standard 5-point (2-D) or 7-point (3-D) Laplacian.
pub fn laplacian<T: Scalar>(u: &GridField<T>) -> GridField<T> {
    let margin = u.margin + 1;
    let h2 = u.spacing * u.spacing;
    let strides: Vec<usize> = (0..u.ndim()).map(|a| u.stride(a)).collect();
    let mut out = u.zeros_like();
    out.margin = margin;
    let centre = T::of(2 * u.ndim());
    for i in 0..u.len() {
        if u.is_inside(i, margin) {
            let mut acc = -centre * u.values[i];
            for &st in &strides {
                acc = acc + u.values[i + st] + u.values[i - st];
            }
            out.values[i] = acc / h2;
        }
    }
    out
}

/// Σ_a x_a y_a over component lists of equal length.
pub fn dot<T: Scalar>(x: &[GridField<T>], y: &[GridField<T>]) -> GridField<T> {
    let margin = x.iter().chain(y).map(|f| f.margin).max().unwrap_or(0);
    let mut out = x[0].zeros_like();
    out.margin = margin;
    for i in 0..out.len() {
        if out.is_inside(i, margin) {
            out.values[i] = x
                .iter()
                .zip(y)
                .fold(T::zero(), |acc, (a, b)| acc + a.values[i] * b.values[i]);
        }
    }
    out
}

/// div(Σ_k |∇u|^{k−2} ∇u) over the exponents `ks`, in flux form.
///
/// Fluxes live on the faces between neighbors. The normal derivative is
/// the one-sided difference across the face; tangential derivatives are
/// the average of the central differences at the two adjacent nodes.
/// Zero gradients are handled by `(|∇u|² + ε_reg²)^{(k−2)/2}`.
pub fn flux_divergence<T: Scalar>(u: &GridField<T>, ks: &[T]) -> Result<GridField<T>> {
    let margin = u.margin + 1;
    let d = u.ndim();
    let h = u.spacing;
    let four_h = T::lit(4.0) * h;
    let strides: Vec<usize> = (0..d).map(|a| u.stride(a)).collect();
    let scale = u.max_abs();
    let eps = T::lit(REG_REL) * if scale > T::zero() { scale } else { T::one() };
    let eps2 = eps * eps;
    let powers: Vec<T> = ks.iter().map(|&k| (k - T::two()) / T::two()).collect();
    let vals = &u.values;

    // Flux along `axis` through the face between `lo` and `lo + stride`.
    let face_flux = |lo: usize, axis: usize| -> T {
        let st = strides[axis];
        let hi = lo + st;
        let normal = (vals[hi] - vals[lo]) / h;
        let mut z = normal * normal;
        for (b, &sb) in strides.iter().enumerate() {
            if b != axis {
                let g = (vals[lo + sb] - vals[lo - sb] + vals[hi + sb] - vals[hi - sb]) / four_h;
                z = z + g * g;
            }
        }
        let coeff = powers.iter().fold(T::zero(), |acc, &e| {
            acc + if e == T::zero() { T::one() } else { (z + eps2).powf(e) }
        });
        coeff * normal
    };

    let mut out = u.zeros_like();
    out.margin = margin;
    for i in 0..u.len() {
        if u.is_inside(i, margin) {
            let mut acc = T::zero();
            for (axis, &st) in strides.iter().enumerate() {
                acc = acc + face_flux(i, axis) - face_flux(i - st, axis);
            }
            let value = acc / h;
            if !value.is_finite() {
                return Err(Error::FieldNotSmooth(h.as_f64()));
            }
            out.values[i] = value;
        }
    }
    Ok(out)
}

/// Δ_p u = div(|∇u|^{p−2}∇u).
pub fn p_laplacian<T: Scalar>(u: &GridField<T>, p: T) -> Result<GridField<T>> {
    flux_divergence(u, &[p])
}

/// Δ_p u + Δ_q u.
pub fn pq_laplacian<T: Scalar>(u: &GridField<T>, p: T, q: T) -> Result<GridField<T>> {
    flux_divergence(u, &[p, q])
}
