//! Tridiagonal matrices and their pivoted LU factorization, for real and
//! complex entries.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalars the tridiagonal kernels operate on.
pub trait Scalar:
    Copy
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Square tridiagonal matrix. `lower[i]` is entry (i+1, i), `upper[i]` is (i, i+1).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T = f64> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    pub fn new(lower: Vec<T>, diag: Vec<T>, upper: Vec<T>) -> Self {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(lower.len(), n - 1);
        assert_eq!(upper.len(), n - 1);
        Self { lower, diag, upper }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(
            vec![T::zero(); n - 1],
            vec![T::zero(); n],
            vec![T::zero(); n - 1],
        )
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.lower[j]
        } else if j == i + 1 {
            self.upper[i]
        } else {
            T::zero()
        }
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.upper.clone(), self.diag.clone(), self.lower.clone())
    }

    /// `a * self + b * other`, entrywise.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.dim(), other.dim());
        let zip = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&p, &q)| a * p + b * q).collect();
        Self::new(
            zip(&self.lower, &other.lower),
            zip(&self.diag, &other.diag),
            zip(&self.upper, &other.upper),
        )
    }

    pub fn matvec_into(&self, x: &[T], out: &mut [T]) {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s = s + self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s = s + self.upper[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.diag)
            .chain(&self.upper)
            .map(|v| v.modulus())
            .fold(0.0, f64::max)
    }

    /// LU factorization with partial (row) pivoting.
    pub fn factor(&self) -> Result<TridiagonalLu<T>> {
        TridiagonalLu::new(self)
    }
}

impl Tridiagonal<f64> {
    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper
    }

    pub fn to_complex(&self) -> Tridiagonal<Complex64> {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Tridiagonal::new(c(&self.lower), c(&self.diag), c(&self.upper))
    }

    /// x^T A y, real case.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.matvec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }
}

/// Factored tridiagonal matrix. Pivoting fills one extra super-diagonal.
#[derive(Debug, Clone)]
pub struct TridiagonalLu<T> {
    // U has bandwidth 2: diagonal, first and second super-diagonals.
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    // multipliers of the single sub-diagonal elimination step
    l: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagonalLu<T> {
    fn new(a: &Tridiagonal<T>) -> Result<Self> {
        let n = a.dim();
        let mut u0 = a.diag.clone();
        let mut u1: Vec<T> = a.upper.clone();
        u1.push(T::zero());
        let mut u2 = vec![T::zero(); n];
        let mut sub = a.lower.clone();
        let mut l = vec![T::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = a.max_abs().max(f64::MIN_POSITIVE);

        for k in 0..n.saturating_sub(1) {
            // rows k and k+1; row k+1 currently holds (sub[k], u0[k+1], u1[k+1])
            if sub[k].modulus() > u0[k].modulus() {
                swapped[k] = true;
                let (r0, r1, r2) = (u0[k], u1[k], u2[k]);
                u0[k] = sub[k];
                u1[k] = u0[k + 1];
                u2[k] = u1[k + 1];
                sub[k] = r0;
                u0[k + 1] = r1;
                u1[k + 1] = r2;
            }
            if u0[k].modulus() <= 1e-300 * scale {
                return Err(Error::Singular(format!("zero pivot at row {k}")));
            }
            let m = sub[k] / u0[k];
            l[k] = m;
            u0[k + 1] = u0[k + 1] - m * u1[k];
            if k + 1 < n - 1 {
                u1[k + 1] = u1[k + 1] - m * u2[k];
            }
        }
        if u0[n - 1].modulus() <= 1e-300 * scale || !u0[n - 1].modulus().is_finite() {
            return Err(Error::Singular(format!("zero pivot at row {}", n - 1)));
        }
        Ok(Self {
            u0,
            u1,
            u2,
            l,
            swapped,
        })
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                b.swap(k, k + 1);
            }
            b[k + 1] = b[k + 1] - self.l[k] * b[k];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s = s - self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s = s - self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual(a: &Tridiagonal<f64>, x: &[f64], b: &[f64]) -> f64 {
        a.matvec(x)
            .iter()
            .zip(b)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        let a = Tridiagonal::new(vec![1.0, 1.0], vec![0.0, 0.0, 1.0], vec![1.0, 2.0]);
        let b = vec![1.0, 2.0, 3.0];
        let x = a.factor().unwrap().solve(&b);
        assert!(residual(&a, &x, &b) < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = Tridiagonal::new(vec![1.0], vec![1.0, 1.0], vec![1.0]);
        assert!(matches!(a.factor(), Err(Error::Singular(_))));
    }

    #[test]
    fn complex_solve() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = Tridiagonal::new(
            vec![one, i],
            vec![i + 2.0, one * 3.0, one],
            vec![-one, one * 0.5],
        );
        let b = vec![one, i, one + i];
        let x = a.factor().unwrap().solve(&b);
        let r = a.matvec(&x);
        for (p, q) in r.iter().zip(&b) {
            assert!((p - q).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn lu_solve_has_small_residual(
            diag in proptest::collection::vec(-5.0f64..5.0, 12),
            off in proptest::collection::vec(-5.0f64..5.0, 22),
            rhs in proptest::collection::vec(-1.0f64..1.0, 12),
        ) {
            let a = Tridiagonal::new(off[..11].to_vec(), diag, off[11..].to_vec());
            if let Ok(lu) = a.factor() {
                let x = lu.solve(&rhs);
                let scale = a.max_abs() * x.iter().map(|v| v.abs()).fold(1.0, f64::max);
                prop_assume!(scale < 1e8);
                prop_assert!(residual(&a, &x, &rhs) <= 1e-11 * scale);
            }
        }
    }
}
