//! Dense complex matrices and a Hermitian eigensolver.
//!
//! The eigensolver reduces a Hermitian matrix to real symmetric tridiagonal
//! form with complex Householder reflectors, then runs implicit QL with
//! Wilkinson-style shifts on the tridiagonal matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self^power` by binary exponentiation, with `combine` as the product.
    pub fn power_with(
        &self,
        power: usize,
        mut combine: impl FnMut(&Self, &Self) -> Result<Self>,
    ) -> Result<Self> {
        if power == 0 {
            return Ok(Self::identity(self.rows));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut p = power;
        loop {
            if p & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => combine(&r, &base)?,
                });
            }
            p >>= 1;
            if p == 0 {
                break;
            }
            base = combine(&base, &base)?;
        }
        Ok(result.expect("power > 0"))
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .expect("non-empty");
            if a[(pivot, col)].norm() == 0.0 {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Computes the decomposition. The upper triangle is trusted; the caller
    /// is responsible for Hermiticity.
    pub fn new(matrix: &CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("eigensolver input"));
        }
        let n = matrix.rows();
        if n == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            });
        }
        let (diag, sub, q) = tridiagonalize(matrix);

        // Rotate the complex off-diagonal onto the positive real axis.
        let mut phases = vec![Complex64::new(1.0, 0.0); n];
        let mut off = vec![0.0; n];
        for k in 0..n - 1 {
            let e = sub[k];
            let r = e.norm();
            off[k] = r;
            phases[k + 1] = if r > 0.0 { phases[k] * (e / r) } else { phases[k] };
        }

        let mut d = diag;
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        tridiagonal_ql(&mut d, &mut off, &mut z, n)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

        // vectors = Q * diag(phases) * Z
        let mut qd = q;
        for i in 0..n {
            let row = qd.row_mut(i);
            for (v, ph) in row.iter_mut().zip(&phases) {
                *v *= ph;
            }
        }
        let mut vectors = CMatrix::zeros(n, n);
        for i in 0..n {
            let qrow = qd.row(i);
            for (out_col, &src) in order.iter().enumerate() {
                let mut acc = Complex64::zero();
                for k in 0..n {
                    acc += qrow[k] * z[k * n + src];
                }
                vectors[(i, out_col)] = acc;
            }
        }
        let values = order.iter().map(|&i| d[i]).collect();
        Ok(Self { values, vectors })
    }

    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn apply_function(&self, mut f: impl FnMut(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex64::zero();
            for k in 0..n {
                acc += v[(i, k)] * fv[k] * v[(j, k)].conj();
            }
            acc
        })
    }

    /// Matrix in the eigenbasis: `V† A V`.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> Result<CMatrix> {
        self.vectors.adjoint().matmul(a)?.matmul(&self.vectors)
    }

    /// Inverse of [`Self::to_eigenbasis`]: `V A V†`.
    pub fn from_eigenbasis(&self, a: &CMatrix) -> Result<CMatrix> {
        self.vectors.matmul(a)?.matmul(&self.vectors.adjoint())
    }
}

/// Householder reduction `A = Q T Q†` with `T` tridiagonal (complex
/// off-diagonal, real diagonal). Returns (diagonal, subdiagonal, Q).
fn tridiagonalize(matrix: &CMatrix) -> (Vec<f64>, Vec<Complex64>, CMatrix) {
    let n = matrix.rows();
    let mut a = matrix.clone();
    let mut q = CMatrix::identity(n);
    let mut sub = vec![Complex64::zero(); n.saturating_sub(1)];
    let mut u = vec![Complex64::zero(); n];
    let mut p = vec![Complex64::zero(); n];

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x0 = a[(k + 1, k)];
        let xnorm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if m == 1 || xnorm == 0.0 {
            sub[k] = x0;
            continue;
        }
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        for i in 0..m {
            u[i] = a[(k + 1 + i, k)];
        }
        u[0] -= alpha;
        let uhu: f64 = u[..m].iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / uhu;

        // p = tau * B u, with B the trailing block.
        for i in 0..m {
            let row = &a.row(k + 1 + i)[k + 1..];
            p[i] = row.iter().zip(&u[..m]).map(|(b, uj)| b * uj).sum::<Complex64>() * tau;
        }
        let uhp: Complex64 = u[..m].iter().zip(&p[..m]).map(|(ui, pi)| ui.conj() * pi).sum();
        let kk = 0.5 * tau * uhp.re;
        for i in 0..m {
            p[i] -= u[i] * kk;
        }
        // B -= u w† + w u†
        for i in 0..m {
            let ui = u[i];
            let wi = p[i];
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for j in 0..m {
                row[j] -= ui * p[j].conj() + wi * u[j].conj();
            }
        }
        sub[k] = alpha;
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = Complex64::zero();
            a[(k, i)] = Complex64::zero();
        }
        // Q <- Q (I - tau u u†)
        for r in 0..n {
            let row = &mut q.row_mut(r)[k + 1..];
            let s: Complex64 = row.iter().zip(&u[..m]).map(|(qv, uj)| qv * uj).sum();
            let s = s * tau;
            for j in 0..m {
                row[j] -= s * u[j].conj();
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, sub, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `off[k]` couples
/// `k` and `k+1`; eigenvectors accumulate into row-major `z`.
fn tridiagonal_ql(d: &mut [f64], off: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    let e = off;
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zi = z[k * n + i];
                    let zi1 = z[k * n + i + 1];
                    z[k * n + i + 1] = s * zi + c * zi1;
                    z[k * n + i] = c * zi - s * zi1;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (40, 5)] {
            let a = random_hermitian(n, seed);
            let eig = HermitianEigen::new(&a).unwrap();
            let rebuilt = eig.apply_function(|l| Complex64::new(l, 0.0));
            assert!(rebuilt.max_abs_diff(&a) < 1e-12, "n={n}");
            let gram = eig.vectors.adjoint().matmul(&eig.vectors).unwrap();
            assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigen_handles_diagonal_and_degenerate() {
        let a = CMatrix::from_diagonal(&[3.0, 1.0, 1.0, -2.0]);
        let eig = HermitianEigen::new(&a).unwrap();
        assert_eq!(eig.values, alloc::vec![-2.0, 1.0, 1.0, 3.0]);
    }

    #[test]
    fn eigen_of_pauli_y() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = Complex64::new(0.0, -1.0);
        a[(1, 0)] = Complex64::new(0.0, 1.0);
        let eig = HermitianEigen::new(&a).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        let a = random_hermitian(6, 9).add(&CMatrix::identity(6).scale(Complex64::new(5.0, 1.0))).unwrap();
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&CMatrix::identity(6)) < 1e-13);
        assert_eq!(CMatrix::zeros(2, 2).inverse(), Err(Error::Singular));
    }

    #[test]
    fn power_matches_repeated_product() {
        let a = random_hermitian(5, 11).scale(Complex64::new(0.3, 0.0));
        let p5 = a.power_with(5, |x, y| x.matmul(y)).unwrap();
        let mut direct = a.clone();
        for _ in 0..4 {
            direct = direct.matmul(&a).unwrap();
        }
        assert!(p5.max_abs_diff(&direct) < 1e-13);
    }
}
