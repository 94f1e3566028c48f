//! Dense complex linear-algebra kernels used by every other module:
//! Hermitian eigendecomposition, matrix exponential, matrix inverse and
//! Pfaffians of skew-symmetric matrices.
//!
//! Everything is double-precision and dense; the largest ambient operator
//! at desk scale stays below 512x512, so no sparse path exists.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Relative tolerance for the skew-symmetry precondition of [`pfaffian`].
pub const SKEW_REL_TOL: f64 = 1e-12;
/// Relative tolerance for the Hermiticity precondition of [`hermitian_eig`].
pub const HERM_REL_TOL: f64 = 1e-12;
/// Pivot threshold of [`ComplexMatrix::inverse`], relative to the max norm.
pub const PIVOT_REL_TOL: f64 = 1e-13;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|w| w * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub shape");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row_k = k * other.cols;
                let row_i = i * other.cols;
                for j in 0..other.cols {
                    out.data[row_i + j] += a * other.data[row_k + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..self.cols {
                    acc += self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator (spectral) norm via the largest eigenvalue of A*A.
    pub fn operator_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = self.adjoint().matmul(self);
        let (eigs, _) = hermitian_eig_unchecked(&gram);
        eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_norm()
    }

    /// Extracts the submatrix with the given row and column indices.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        Self::from_fn(row_idx.len(), col_idx.len(), |i, j| self[(row_idx[i], col_idx[j])])
    }

    /// Determinant via LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = a[(k, k)].norm();
            for i in k + 1..n {
                let mag = a[(i, k)].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot_row != k {
                a.swap_rows(k, pivot_row);
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        det
    }

    /// Matrix inverse via Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] when a pivot drops below
    /// `PIVOT_REL_TOL * max_norm`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let threshold = PIVOT_REL_TOL * self.max_norm();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = a[(k, k)].norm();
            for i in k + 1..n {
                let mag = a[(i, k)].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag <= threshold {
                return Err(Error::Singular { pivot: pivot_mag, threshold });
            }
            if pivot_row != k {
                a.swap_rows(k, pivot_row);
                inv.swap_rows(k, pivot_row);
            }
            let pivot = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= pivot;
                inv[(k, j)] /= pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let av = a[(k, j)];
                    let iv = inv[(k, j)];
                    a[(i, j)] -= f * av;
                    inv[(i, j)] -= f * iv;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Pfaffian of a skew-symmetric matrix of even order via Parlett-Reid
/// tridiagonalization with partial pivoting, O(N^3).
///
/// The precondition `|M + M^t| <= 1e-12 |M|` is enforced; callers that
/// assemble M from float arithmetic should symmetrize `(M - M^t)/2` first.
pub fn pfaffian(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch("pfaffian of non-square matrix".into()));
    }
    let n = m.rows();
    if n % 2 != 0 {
        return Err(Error::OddOrder(n));
    }
    let scale = m.max_norm();
    let skew_residual = m.add(&m.transpose()).max_norm();
    if skew_residual > SKEW_REL_TOL * scale && scale > 0.0 {
        return Err(Error::NotSkewSymmetric { residual: skew_residual, tolerance: SKEW_REL_TOL * scale });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let mut a = m.clone();
    let mut sign = Complex64::new(1.0, 0.0);
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        // pivot: largest |a[i][k]| for i > k
        let mut pivot_row = k + 1;
        let mut pivot_mag = a[(k + 1, k)].norm();
        for i in k + 2..n {
            let mag = a[(i, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot_row != k + 1 {
            // simultaneous row/column swap flips the Pfaffian sign
            a.swap_rows(k + 1, pivot_row);
            a.swap_cols(k + 1, pivot_row);
            sign = -sign;
        }
        let pivot = a[(k + 1, k)];
        // congruence update eliminating column k below row k+1 (and by
        // skew-symmetry row k right of column k+1)
        for i in k + 2..n {
            let f = a[(i, k)] / pivot;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in k..n {
                let v = a[(k + 1, j)];
                a[(i, j)] -= f * v;
            }
            for r in k..n {
                let v = a[(r, k + 1)];
                a[(r, i)] -= f * v;
            }
        }
        pf *= a[(k, k + 1)];
    }
    Ok(sign * pf)
}

/// Eigendecomposition of a Hermitian matrix: `A = U diag(w) U*` with the
/// eigenvalues `w` real and sorted ascending and `U` unitary.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("eig of non-square matrix".into()));
    }
    let scale = a.max_norm();
    let residual = a.hermiticity_residual();
    if residual > HERM_REL_TOL * scale && scale > 0.0 {
        return Err(Error::NotHermitian { residual, tolerance: HERM_REL_TOL * scale });
    }
    Ok(hermitian_eig_unchecked(a))
}

/// Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
///
/// Plain O(n^3)-per-sweep rotations; quadratic convergence keeps the sweep
/// count low and the eigenvector matrix unitary to machine precision at the
/// dimensions this crate works with (below ~500).
fn hermitian_eig_unchecked(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.rows();
    if n == 0 {
        return (vec![], ComplexMatrix::zeros(0, 0));
    }
    // symmetrize first, so float noise cannot leak in
    let mut b = a.add(&a.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);
    let scale = b.max_norm().max(f64::MIN_POSITIVE);
    let target = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(b[(p, q)].norm());
            }
        }
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let bpq = b[(p, q)];
                let abs_bpq = bpq.norm();
                if abs_bpq <= target * 1e-2 {
                    continue;
                }
                let app = b[(p, p)].re;
                let aqq = b[(q, q)].re;
                let phase = bpq / Complex64::new(abs_bpq, 0.0);
                let tau = (aqq - app) / (2.0 * abs_bpq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotation R = [[c, s u],[-s conj(u), c]] on the (p,q) plane,
                // chosen so that (R* B R)[p][q] = 0
                let su = Complex64::new(s, 0.0) * phase;
                let su_conj = su.conj();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let bkp = b[(k, p)];
                    let bkq = b[(k, q)];
                    let new_kp = bkp * c - bkq * su_conj;
                    let new_kq = bkp * su + bkq * c;
                    b[(k, p)] = new_kp;
                    b[(p, k)] = new_kp.conj();
                    b[(k, q)] = new_kq;
                    b[(q, k)] = new_kq.conj();
                }
                let app_new = c * c * app - 2.0 * s * c * abs_bpq + s * s * aqq;
                let aqq_new = s * s * app + 2.0 * s * c * abs_bpq + c * c * aqq;
                b[(p, p)] = Complex64::new(app_new, 0.0);
                b[(q, q)] = Complex64::new(aqq_new, 0.0);
                b[(p, q)] = Complex64::new(0.0, 0.0);
                b[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * su_conj;
                    v[(k, q)] = vkp * su + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[(i, i)].re.partial_cmp(&b[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| b[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (eigenvalues, vectors)
}

/// Applies a scalar function to a Hermitian matrix through its
/// eigendecomposition: `f(A) = U diag(f(w)) U*`.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    let (w, u) = hermitian_eig(a)?;
    let fw: Vec<Complex64> = w.iter().map(|&x| f(x)).collect();
    Ok(u.matmul(&ComplexMatrix::diagonal(&fw)).matmul(&u.adjoint()))
}

/// Matrix exponential.
///
/// Hermitian input goes through the eigendecomposition; the general case
/// uses scaling-and-squaring with a Taylor evaluation at `|A|/2^s <= 1/4`.
pub fn matrix_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("exp of non-square matrix".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let scale = a.max_norm();
    if scale == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    if a.hermiticity_residual() <= HERM_REL_TOL * scale {
        return hermitian_function(a, |x| Complex64::new(x.exp(), 0.0));
    }
    // crude norm bound: max_norm * n dominates the spectral radius
    let bound = a.frobenius_norm();
    let s = if bound > 0.25 { (bound / 0.25).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale(Complex64::new((0.5f64).powi(s as i32), 0.0));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=32 {
        term = term.matmul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.max_norm() < 1e-18 * sum.max_norm() {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// In-place complex dot product, antilinear in the first argument.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    assert_eq!(x.len(), y.len(), "dot length");
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    pub(crate) fn random_skew(rng: &mut StdRng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n);
        a.sub(&a.transpose()).scale(c(0.5, 0.0))
    }

    pub(crate) fn random_hermitian(rng: &mut StdRng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n);
        a.add(&a.adjoint()).scale(c(0.5, 0.0))
    }

    /// Brute-force Pfaffian by the permutation-sum definition,
    /// Pf(M) = (1/(2^N N!)) sum_pi sgn(pi) prod_j M[pi(2j-1), pi(2j)].
    fn pfaffian_permutation_sum(m: &ComplexMatrix) -> Complex64 {
        let n = m.rows();
        assert!(n % 2 == 0);
        let big_n = n / 2;
        let mut indices: Vec<usize> = (0..n).collect();
        let mut total = c(0.0, 0.0);
        fn sign_by_inversions(idx: &[usize]) -> f64 {
            let mut inversions = 0usize;
            for i in 0..idx.len() {
                for j in i + 1..idx.len() {
                    if idx[i] > idx[j] {
                        inversions += 1;
                    }
                }
            }
            if inversions % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        fn visit(pos: usize, idx: &mut Vec<usize>, m: &ComplexMatrix, big_n: usize, total: &mut Complex64) {
            if pos == idx.len() {
                let mut prod = Complex64::new(sign_by_inversions(idx), 0.0);
                for j in 0..big_n {
                    prod *= m[(idx[2 * j], idx[2 * j + 1])];
                }
                *total += prod;
                return;
            }
            for i in pos..idx.len() {
                idx.swap(pos, i);
                visit(pos + 1, idx, m, big_n, total);
                idx.swap(pos, i);
            }
        }
        visit(0, &mut indices, m, big_n, &mut total);
        let mut factorial = 1.0;
        for j in 1..=big_n {
            factorial *= j as f64;
        }
        total / Complex64::new(2f64.powi(big_n as i32) * factorial, 0.0)
    }

    #[test]
    fn pfaffian_two_by_two_is_upper_entry() {
        let m = ComplexMatrix::from_rows(2, 2, vec![c(0., 0.), c(5., 0.), c(-5., 0.), c(0., 0.)]).unwrap();
        let pf = pfaffian(&m).unwrap();
        assert!((pf - c(5., 0.)).norm() < 1e-14);
    }

    #[test]
    fn pfaffian_zero_matrix() {
        let m = ComplexMatrix::zeros(4, 4);
        assert_eq!(pfaffian(&m).unwrap(), c(0., 0.));
    }

    #[test]
    fn pfaffian_four_by_four_closed_form() {
        // upper entries (a, b, c, d, e, f) -> af - be + cd
        let (a, b, cc, d, e, f) =
            (c(1.3, 0.2), c(-0.4, 1.1), c(0.7, -0.3), c(2.1, 0.5), c(-1.2, 0.8), c(0.9, -1.4));
        let mut m = ComplexMatrix::zeros(4, 4);
        let upper = [(0, 1, a), (0, 2, b), (0, 3, cc), (1, 2, d), (1, 3, e), (2, 3, f)];
        for (i, j, v) in upper {
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        let expected = a * f - b * e + cc * d;
        let brute = pfaffian_permutation_sum(&m);
        assert!((brute - expected).norm() < 1e-12, "permutation sum disagrees with closed form");
        let pf = pfaffian(&m).unwrap();
        assert!((pf - expected).norm() < 1e-12);
    }

    #[test]
    fn pfaffian_matches_permutation_sum_small_orders() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [2usize, 4, 6, 8] {
            for _ in 0..5 {
                let m = random_skew(&mut rng, n);
                let fast = pfaffian(&m).unwrap();
                let brute = pfaffian_permutation_sum(&m);
                assert!(
                    (fast - brute).norm() <= 1e-10 * (1.0 + brute.norm()),
                    "order {n}: {fast} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in [2usize, 4, 6, 8, 10] {
            for _ in 0..8 {
                let m = random_skew(&mut rng, n);
                let pf = pfaffian(&m).unwrap();
                let det = m.determinant();
                assert!(
                    (pf * pf - det).norm() <= 1e-9 * (1.0 + det.norm()),
                    "order {n}: Pf^2 = {} vs det = {det}",
                    pf * pf
                );
            }
        }
    }

    #[test]
    fn pfaffian_swap_antisymmetry() {
        let mut rng = StdRng::seed_from_u64(13);
        let m = random_skew(&mut rng, 6);
        let pf = pfaffian(&m).unwrap();
        let mut swapped = m.clone();
        swapped.swap_rows(1, 4);
        swapped.swap_cols(1, 4);
        let pf_swapped = pfaffian(&swapped).unwrap();
        assert!((pf + pf_swapped).norm() < 1e-12 * (1.0 + pf.norm()));
    }

    #[test]
    fn pfaffian_rejects_odd_and_nonskew() {
        let m = ComplexMatrix::zeros(3, 3);
        assert!(matches!(pfaffian(&m), Err(Error::OddOrder(3))));
        let m = ComplexMatrix::identity(4);
        assert!(matches!(pfaffian(&m), Err(Error::NotSkewSymmetric { .. })));
    }

    #[test]
    fn hermitian_eig_diagonal() {
        let m = ComplexMatrix::diagonal(&[c(3., 0.), c(-1., 0.)]);
        let (w, _) = hermitian_eig(&m).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eig_identity_and_pauli_x() {
        let (w, u) = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-14);
        let residual = u.adjoint().matmul(&u).sub(&ComplexMatrix::identity(2)).max_norm();
        assert!(residual < 1e-12);

        let x = ComplexMatrix::from_rows(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let (w, _) = hermitian_eig(&x).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in [2usize, 5, 9] {
            let a = random_hermitian(&mut rng, n);
            let (w, u) = hermitian_eig(&a).unwrap();
            let lam = ComplexMatrix::diagonal(&w.iter().map(|&x| c(x, 0.)).collect::<Vec<_>>());
            let rebuilt = u.matmul(&lam).matmul(&u.adjoint());
            assert!(rebuilt.sub(&a).max_norm() <= 1e-10 * (1.0 + a.max_norm()));
            assert!(u.adjoint().matmul(&u).sub(&ComplexMatrix::identity(n)).max_norm() <= 1e-12);
        }
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(matrix_exp(&z).unwrap().sub(&ComplexMatrix::identity(3)).max_norm() < 1e-15);
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let e = matrix_exp(&d).unwrap();
        assert!((e[(0, 0)] - c(1f64.exp(), 0.)).norm() < 1e-12);
        assert!((e[(1, 1)] - c((-2f64).exp(), 0.)).norm() < 1e-12);
    }

    #[test]
    fn exp_hermitian_matches_eig_oracle() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 4);
        let e = matrix_exp(&a).unwrap();
        let (w, u) = hermitian_eig(&a).unwrap();
        let ew = ComplexMatrix::diagonal(&w.iter().map(|&x| c(x.exp(), 0.)).collect::<Vec<_>>());
        let oracle = u.matmul(&ew).matmul(&u.adjoint());
        assert!(e.sub(&oracle).max_norm() <= 1e-10 * oracle.max_norm());
    }

    #[test]
    fn exp_inverse_is_exp_of_negation() {
        let mut rng = StdRng::seed_from_u64(17);
        // general non-normal input exercises scaling-and-squaring
        let a = random_matrix(&mut rng, 5).scale(c(2.0, 0.0));
        let e = matrix_exp(&a).unwrap();
        let em = matrix_exp(&a.scale(c(-1.0, 0.0))).unwrap();
        let residual = e.matmul(&em).sub(&ComplexMatrix::identity(5)).max_norm();
        assert!(residual < 1e-9, "exp(A)exp(-A) residual {residual}");
    }

    #[test]
    fn inverse_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert!(i3.inverse().unwrap().sub(&i3).max_norm() < 1e-15);
        let d = ComplexMatrix::diagonal(&[c(2., 0.), c(4., 0.)]);
        let di = d.inverse().unwrap();
        assert!((di[(0, 0)] - c(0.5, 0.)).norm() < 1e-15);
        assert!((di[(1, 1)] - c(0.25, 0.)).norm() < 1e-15);

        let mut rng = StdRng::seed_from_u64(23);
        let a = random_matrix(&mut rng, 6).add(&ComplexMatrix::identity(6).scale(c(3.0, 0.0)));
        let inv = a.inverse().unwrap();
        let residual = a.matmul(&inv).sub(&ComplexMatrix::identity(6)).max_norm();
        assert!(residual <= 1e-10, "AA^-1 residual {residual}");
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = ComplexMatrix::zeros(2, 2);
        assert!(matches!(m.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn construction_rejects_non_finite() {
        let bad = vec![c(f64::NAN, 0.0); 4];
        assert!(matches!(ComplexMatrix::from_rows(2, 2, bad), Err(Error::NonFiniteEntry)));
    }
}
