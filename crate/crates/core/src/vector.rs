//! Finitely supported vectors of `l^2`, indexed from 1.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

/// A finitely supported vector; coordinate `j` multiplies the basis vector `e_j`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vector {
    entries: BTreeMap<usize, Complex64>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    /// The canonical basis vector `e_j` (`j >= 1`).
    pub fn basis(j: usize) -> Self {
        assert!(j >= 1, "basis vectors are indexed from 1");
        let mut entries = BTreeMap::new();
        entries.insert(j, Complex64::new(1.0, 0.0));
        Vector { entries }
    }

    /// Build from `(index, value)` pairs; repeated indices accumulate.
    pub fn from_entries<I: IntoIterator<Item = (usize, Complex64)>>(items: I) -> Result<Self> {
        let mut v = Vector::zero();
        for (j, z) in items {
            if j == 0 {
                return Err(Error::InvalidArgument("vector indices start at 1".into()));
            }
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(format!("vector entry {j}")));
            }
            *v.entries.entry(j).or_default() += z;
        }
        Ok(v)
    }

    /// Coordinates `x_1, ..., x_d` given as a dense slice.
    pub fn from_dense(coords: &[Complex64]) -> Self {
        let mut entries = BTreeMap::new();
        for (i, z) in coords.iter().enumerate() {
            if *z != Complex64::new(0.0, 0.0) {
                entries.insert(i + 1, *z);
            }
        }
        Vector { entries }
    }

    pub fn from_real(coords: &[f64]) -> Self {
        let c: Vec<Complex64> = coords.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_dense(&c)
    }

    pub fn from_dvector(v: &DVector<Complex64>) -> Self {
        Self::from_dense(v.as_slice())
    }

    pub fn get(&self, j: usize) -> Complex64 {
        self.entries.get(&j).copied().unwrap_or_default()
    }

    pub fn set(&mut self, j: usize, z: Complex64) {
        assert!(j >= 1);
        if z == Complex64::new(0.0, 0.0) {
            self.entries.remove(&j);
        } else {
            self.entries.insert(j, z);
        }
    }

    pub fn add_at(&mut self, j: usize, z: Complex64) {
        let e = self.entries.entry(j).or_default();
        *e += z;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.entries.iter().map(|(j, z)| (*j, *z))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Largest index carrying a stored entry (0 for the zero vector).
    pub fn support_max(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other> = sum_j self_j conj(other_j)`, linear in the first slot.
    pub fn inner(&self, other: &Vector) -> Complex64 {
        let (small, large, flip) = if self.nnz() <= other.nnz() { (self, other, false) } else { (other, self, true) };
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, z) in small.entries.iter() {
            if let Some(w) = large.entries.get(j) {
                acc += if flip { w * z.conj() } else { z * w.conj() };
            }
        }
        acc
    }

    pub fn scale(&self, alpha: Complex64) -> Vector {
        Vector { entries: self.entries.iter().map(|(j, z)| (*j, z * alpha)).collect() }
    }

    pub fn conj(&self) -> Vector {
        Vector { entries: self.entries.iter().map(|(j, z)| (*j, z.conj())).collect() }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: Complex64, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (j, z) in other.entries.iter() {
            out.add_at(*j, alpha * z);
        }
        out
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n > 0.0 {
            Some(self.scale(Complex64::new(1.0 / n, 0.0)))
        } else {
            None
        }
    }

    /// Dense coordinates `x_1..x_d`; entries beyond `d` are dropped.
    pub fn to_dense(&self, d: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (j, z) in self.entries.range(1..=d) {
            out[j - 1] = *z;
        }
        out
    }

    pub fn to_dvector(&self, d: usize) -> DVector<Complex64> {
        DVector::from_vec(self.to_dense(d))
    }

    /// Remap coordinates through `f(j)`; entries mapped to `None` are dropped.
    pub fn reindex<F: Fn(usize) -> Option<usize>>(&self, f: F) -> Vector {
        let mut out = Vector::zero();
        for (j, z) in self.entries.iter() {
            if let Some(k) = f(*j) {
                out.add_at(k, *z);
            }
        }
        out
    }

    /// Drop entries with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Vector {
        Vector { entries: self.entries.iter().filter(|(_, z)| z.norm() > tol).map(|(j, z)| (*j, *z)).collect() }
    }
}

impl Serialize for Vector {
    /// Serialised as a list of `[index, re, im]` triples.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (j, z) in self.entries.iter() {
            seq.serialize_element(&(j, z.re, z.im))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_slot() {
        let x = Vector::from_dense(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let y = Vector::from_dense(&[c(0.0, 1.0), c(1.0, 0.0)]);
        // <x, y> = 1 * conj(i) + i * conj(1) = -i + i = 0
        assert_eq!(x.inner(&y), c(0.0, 0.0));
        assert_eq!(x.inner(&x), c(2.0, 0.0));
        assert_eq!(y.inner(&x), x.inner(&y).conj());
    }

    #[test]
    fn dense_round_trip_and_support() {
        let v = Vector::from_dense(&[c(0.0, 0.0), c(2.0, -1.0), c(0.0, 0.0)]);
        assert_eq!(v.support_max(), 2);
        assert_eq!(v.to_dense(3), vec![c(0.0, 0.0), c(2.0, -1.0), c(0.0, 0.0)]);
        assert!((v.norm() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(Vector::from_entries([(0, c(1.0, 0.0))]).is_err());
        assert!(matches!(Vector::from_entries([(1, c(f64::NAN, 0.0))]), Err(Error::NonFinite(_))));
    }
}
