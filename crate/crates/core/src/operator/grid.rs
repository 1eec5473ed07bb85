use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scalar field on a uniform isotropic grid in 2 or 3 dimensions.
///
/// Values are row-major with the last axis fastest. Nodes within `margin`
/// layers of the boundary carry no data (an operator needs neighbors there
/// that do not exist); they hold zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridField<T> {
    pub dims: Vec<usize>,
    pub spacing: T,
    pub origin: Vec<T>,
    pub values: Vec<T>,
    pub margin: usize,
}

impl<T: Scalar> GridField<T> {
    pub fn new(dims: Vec<usize>, spacing: T, origin: Vec<T>, values: Vec<T>) -> Result<Self> {
        let field = Self {
            dims,
            spacing,
            origin,
            values,
            margin: 0,
        };
        field.check()?;
        Ok(field)
    }

    /// Grid with the same geometry as `self`, filled with zeros.
    pub fn zeros_like(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            spacing: self.spacing,
            origin: self.origin.clone(),
            values: vec![T::zero(); self.len()],
            margin: self.margin,
        }
    }

    fn check(&self) -> Result<()> {
        let d = self.dims.len();
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 2..=3")));
        }
        if self.dims.iter().any(|&n| n < 5) {
            return Err(Error::InvalidGrid(format!(
                "every axis needs at least 5 nodes, got {:?}",
                self.dims
            )));
        }
        if self.origin.len() != d {
            return Err(Error::InvalidGrid("origin length differs from dimension".into()));
        }
        if !(self.spacing > T::zero()) || !self.spacing.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing {} must be positive", self.spacing)));
        }
        let expected: usize = self.dims.iter().product();
        if self.values.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "{} values for {expected} nodes",
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value".into()));
        }
        Ok(())
    }

    /// Samples `f` at every node.
    pub fn sample(dims: Vec<usize>, spacing: T, origin: Vec<T>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let n: usize = dims.iter().product();
        let mut field = Self {
            dims,
            spacing,
            origin,
            values: Vec::with_capacity(n),
            margin: 0,
        };
        let mut x = vec![T::zero(); field.dims.len()];
        for idx in 0..n {
            field.coords_into(idx, &mut x);
            field.values.push(f(&x));
        }
        field.check()?;
        Ok(field)
    }

    /// Samples `f` on `[0, 1]^d` with `cells` intervals per axis.
    pub fn sample_unit(d: usize, cells: usize, f: impl Fn(&[T]) -> T) -> Result<Self> {
        Self::sample(vec![cells + 1; d], T::one() / T::of(cells), vec![T::zero(); d], f)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Offset between neighbors along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.dims[axis + 1..].iter().product()
    }

    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for axis in (0..self.ndim()).rev() {
            out[axis] = idx % self.dims[axis];
            idx /= self.dims[axis];
        }
    }

    pub fn coords_into(&self, idx: usize, out: &mut [T]) {
        let mut rem = idx;
        for axis in (0..self.ndim()).rev() {
            let i = rem % self.dims[axis];
            rem /= self.dims[axis];
            out[axis] = self.origin[axis] + self.spacing * T::of(i);
        }
    }

    pub fn coords(&self, idx: usize) -> Vec<T> {
        let mut x = vec![T::zero(); self.ndim()];
        self.coords_into(idx, &mut x);
        x
    }

    /// Whether every index of node `idx` lies at least `layers` from the edge.
    pub fn is_inside(&self, idx: usize, layers: usize) -> bool {
        let mut rem = idx;
        for axis in (0..self.ndim()).rev() {
            let i = rem % self.dims[axis];
            rem /= self.dims[axis];
            if i < layers || i + layers >= self.dims[axis] {
                return false;
            }
        }
        true
    }

    /// Node indices carrying data.
    pub fn valid_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_inside(i, self.margin))
    }

    pub fn max_abs(&self) -> T {
        self.valid_indices()
            .fold(T::zero(), |acc, i| acc.max(self.values[i].abs()))
    }

    /// Applies `f` node-wise, keeping geometry and margin.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let mut out = self.clone();
        for i in 0..out.len() {
            if out.is_inside(i, out.margin) {
                out.values[i] = f(out.values[i]);
            }
        }
        out
    }

    /// Little-endian layout: u64 ndim, u64 dims, f64 spacing, f64 origin,
    /// f64 payload (row-major).
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.ndim() as u64).to_le_bytes())?;
        for &n in &self.dims {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        w.write_all(&self.spacing.as_f64().to_le_bytes())?;
        for o in &self.origin {
            w.write_all(&o.as_f64().to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        fn u64_of<R: Read>(r: &mut R) -> Result<u64> {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf).map_err(|e| Error::InvalidGrid(e.to_string()))?;
            Ok(u64::from_le_bytes(buf))
        }
        fn f64_of<R: Read>(r: &mut R) -> Result<f64> {
            u64_of(r).map(f64::from_bits)
        }
        let d = u64_of(&mut r)? as usize;
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 2..=3")));
        }
        let dims = (0..d)
            .map(|_| u64_of(&mut r).map(|n| n as usize))
            .collect::<Result<Vec<_>>>()?;
        let spacing = T::lit(f64_of(&mut r)?);
        let origin = (0..d).map(|_| f64_of(&mut r).map(T::lit)).collect::<Result<Vec<_>>>()?;
        let n = dims.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k));
        let n = n.ok_or_else(|| Error::InvalidGrid("grid size overflows".into()))?;
        let values = (0..n).map(|_| f64_of(&mut r).map(T::lit)).collect::<Result<Vec<_>>>()?;
        Self::new(dims, spacing, origin, values)
    }

    /// One row per valid node: coordinates then value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = (1..=self.ndim()).map(|k| format!("x{k}")).collect();
        writeln!(w, "{},value", header.join(","))?;
        let mut x = vec![T::zero(); self.ndim()];
        for i in self.valid_indices() {
            self.coords_into(i, &mut x);
            let row: Vec<String> = x.iter().map(|c| c.as_f64().to_string()).collect();
            writeln!(w, "{},{}", row.join(","), self.values[i].as_f64())?;
        }
        Ok(())
    }
}
