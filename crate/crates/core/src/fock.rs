//! Exact Fock-space matrix representation of the self-dual CAR algebra.
//!
//! This is the ground truth every Grassmann identity is checked against:
//! generators are explicit 2^m x 2^m Jordan-Wigner matrices, states are
//! normalized traces, and nothing here ever touches Berezin calculus.
//!
//! Jordan-Wigner sign convention: `a_j = (sz x .. x sz) x s- x (1 x .. x 1)`
//! with `s- = [[0,1],[0,0]]`, mode order given by the columns of the
//! defining basis projection's range basis.

use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eig, hermitian_function, matrix_exp, ComplexMatrix};
use crate::selfdual::{BasisProjection, SelfDualOperator};
use num_complex::Complex64;
use std::sync::Arc;

/// Hard cap on the number of modes; larger requests thrash.
pub const MODE_CAP: usize = 10;
/// Absolute tolerance on the parity commutator for [`FockRep::is_even`].
pub const EVEN_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Explicit Fock representation of `sCAR(H, A)` fixed by a basis projection.
#[derive(Debug, Clone)]
pub struct FockRep {
    projection: BasisProjection,
    m: usize,
    annihilators: Vec<ComplexMatrix>,
    parity: ComplexMatrix,
}

impl FockRep {
    pub fn new(projection: BasisProjection) -> Result<Arc<Self>> {
        let m = projection.one_particle_dim();
        if m > MODE_CAP {
            return Err(Error::CapacityExceeded(format!("{m} modes exceed the cap of {MODE_CAP}")));
        }
        let sz = ComplexMatrix::from_rows(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])?;
        let sminus = ComplexMatrix::from_rows(2, 2, vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])?;
        let id2 = ComplexMatrix::identity(2);
        let mut annihilators = Vec::with_capacity(m);
        for j in 0..m {
            let mut op = ComplexMatrix::identity(1);
            for k in 0..m {
                let factor = if k < j {
                    &sz
                } else if k == j {
                    &sminus
                } else {
                    &id2
                };
                op = kron(&op, factor);
            }
            annihilators.push(op);
        }
        let mut parity = ComplexMatrix::identity(1);
        for _ in 0..m {
            parity = kron(&parity, &sz);
        }
        Ok(Arc::new(Self { projection, m, annihilators, parity }))
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn fock_dim(&self) -> usize {
        1 << self.m
    }

    pub fn projection(&self) -> &BasisProjection {
        &self.projection
    }

    pub fn annihilator(&self, j: usize) -> &ComplexMatrix {
        &self.annihilators[j]
    }

    pub fn parity_matrix(&self) -> &ComplexMatrix {
        &self.parity
    }

    pub fn identity(self: &Arc<Self>) -> FockOperator {
        FockOperator { rep: self.clone(), matrix: ComplexMatrix::identity(self.fock_dim()) }
    }

    pub fn operator(self: &Arc<Self>, matrix: ComplexMatrix) -> FockOperator {
        assert_eq!(matrix.rows(), self.fock_dim(), "operator dimension");
        assert_eq!(matrix.cols(), self.fock_dim(), "operator dimension");
        FockOperator { rep: self.clone(), matrix }
    }

    /// Field operator `B(phi) = a(P phi) + a*(A Pperp phi)` for an ambient
    /// vector `phi`.
    pub fn generator(self: &Arc<Self>, phi: &[Complex64]) -> FockOperator {
        let coords = self.projection.frame_coords(phi);
        let mut matrix = ComplexMatrix::zeros(self.fock_dim(), self.fock_dim());
        for j in 0..self.m {
            if coords[j].norm() > 0.0 {
                matrix = matrix.add(&self.annihilators[j].scale(coords[j].conj()));
            }
            let d = coords[self.m + j];
            if d.norm() > 0.0 {
                matrix = matrix.add(&self.annihilators[j].adjoint().scale(d.conj()));
            }
        }
        FockOperator { rep: self.clone(), matrix }
    }

    /// The bilinear element `<B, H B>` of an ambient operator `H`.
    pub fn bilinear_element(self: &Arc<Self>, h: &ComplexMatrix) -> Result<FockOperator> {
        let n = 2 * self.m;
        if h.rows() != n || h.cols() != n {
            return Err(Error::ShapeMismatch(format!("bilinear element expects {n}x{n}")));
        }
        let h_frame = self.projection.frame_matrix(h);
        // generator list in the frame basis: B_i = a_i for i < m, a*_{i-m} above
        let dim = self.fock_dim();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for i in 0..n {
            let bi_adj = self.frame_generator(i).adjoint();
            for j in 0..n {
                let coeff = h_frame[(i, j)];
                if coeff.norm() < 1e-300 {
                    continue;
                }
                total = total.add(&self.frame_generator(j).matmul(&bi_adj).scale(coeff));
            }
        }
        Ok(FockOperator { rep: self.clone(), matrix: total })
    }

    fn frame_generator(&self, i: usize) -> ComplexMatrix {
        if i < self.m {
            self.annihilators[i].clone()
        } else {
            self.annihilators[i - self.m].adjoint()
        }
    }

    /// Tracial state: the normalized trace `2^-m Tr`.
    pub fn tracial_state(&self, a: &FockOperator) -> Complex64 {
        a.matrix.trace() / c(self.fock_dim() as f64, 0.0)
    }

    /// Gibbs expectation of `A` in the state with weight
    /// `exp(beta/2 <B, H B>)`.
    pub fn gibbs_expectation(
        self: &Arc<Self>,
        h: &SelfDualOperator,
        beta: f64,
        a: &FockOperator,
    ) -> Result<Complex64> {
        let weight = self.gibbs_weight(h, beta)?;
        let denom = weight.trace();
        Ok(a.matrix.matmul(&weight).trace() / denom)
    }

    fn gibbs_weight(self: &Arc<Self>, h: &SelfDualOperator, beta: f64) -> Result<ComplexMatrix> {
        if !h.is_hamiltonian() {
            return Err(Error::NotSelfAdjoint(h.matrix().hermiticity_residual()));
        }
        let bil = self.bilinear_element(h.matrix())?;
        matrix_exp(&bil.matrix.scale(c(beta / 2.0, 0.0)))
    }

    /// Assembles the symbol of the state given by the density matrix `rho`
    /// from its two-point grid, checks `0 <= S <= 1` and `S + A S A = 1`,
    /// and returns it in ambient coordinates.
    pub fn quasifree_symbol(self: &Arc<Self>, density: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = 2 * self.m;
        let frame = self.projection.generator_frame();
        let space = self.projection.space();
        let expectation = |op: &ComplexMatrix| density.matmul(op).trace();
        let mut s_frame = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let col_i: Vec<Complex64> = (0..n).map(|r| frame[(r, i)]).collect();
            let bi = self.generator(&col_i);
            for j in 0..n {
                let col_j: Vec<Complex64> = (0..n).map(|r| frame[(r, j)]).collect();
                let bj = self.generator(&space.involute(&col_j));
                s_frame[(i, j)] = expectation(&bi.matrix.matmul(&bj.matrix));
            }
        }
        let s_amb = frame.matmul(&s_frame).matmul(&frame.adjoint());
        // symbol conditions
        let (w, _) = hermitian_eig(&s_amb.add(&s_amb.adjoint()).scale(c(0.5, 0.0)))?;
        if w.iter().any(|&x| x < -1e-10 || x > 1.0 + 1e-10) {
            return Err(Error::SymbolViolation(format!("spectrum outside [0,1]: {w:?}")));
        }
        let complement = ComplexMatrix::identity(n).sub(&s_amb);
        let residual = space.conjugate_by_involution(&s_amb).sub(&complement).max_norm();
        if residual > 1e-10 {
            return Err(Error::SymbolViolation(format!("S + A S A != 1, residual {residual:e}")));
        }
        Ok(s_amb)
    }

    /// Evenness under the parity automorphism `chi_{-1}`.
    pub fn is_even(&self, a: &FockOperator) -> bool {
        let conj = self.parity.matmul(&a.matrix).matmul(&self.parity);
        conj.sub(&a.matrix).max_norm() <= EVEN_TOL * a.matrix.max_norm().max(1.0)
    }

    /// Schatten norm `(tr |A|^s)^(1/s)` with the normalized trace;
    /// `s = infinity` (`None`) gives the operator norm.
    pub fn schatten_norm(&self, a: &FockOperator, s: Option<f64>) -> f64 {
        let gram = a.matrix.adjoint().matmul(&a.matrix);
        let (w, _) = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
        let singular: Vec<f64> = w.iter().map(|&x| x.max(0.0).sqrt()).collect();
        match s {
            None => singular.last().copied().unwrap_or(0.0),
            Some(p) => {
                assert!(p >= 1.0, "Schatten exponent must be >= 1");
                let dim = self.fock_dim() as f64;
                (singular.iter().map(|x| x.powf(p)).sum::<f64>() / dim).powf(1.0 / p)
            }
        }
    }

    /// The logarithmic moment generating function
    /// `ln tr(e^{beta(<B,HB>/2 - W)} e^{sK}) - ln tr(e^{beta <B,HB>/2})`
    /// by exact matrix exponentials. `W` and `K` must be even and
    /// self-adjoint.
    pub fn generating_function_exact(
        self: &Arc<Self>,
        h: &SelfDualOperator,
        w: &FockOperator,
        k: &FockOperator,
        beta: f64,
        s: f64,
    ) -> Result<f64> {
        for op in [w, k] {
            if !self.is_even(op) {
                let conj = self.parity.matmul(&op.matrix).matmul(&self.parity);
                return Err(Error::ParityViolation(conj.sub(&op.matrix).max_norm()));
            }
            let herm = op.matrix.hermiticity_residual();
            if herm > 1e-11 * op.matrix.max_norm().max(1.0) {
                return Err(Error::NotSelfAdjoint(herm));
            }
        }
        let bil = self.bilinear_element(h.matrix())?;
        let perturbed = bil.matrix.scale(c(0.5, 0.0)).sub(&w.matrix);
        let num_weight = matrix_exp(&perturbed.scale(c(beta, 0.0)))?;
        let obs = matrix_exp(&k.matrix.scale(c(s, 0.0)))?;
        let numerator = num_weight.matmul(&obs).trace();
        let denominator = matrix_exp(&bil.matrix.scale(c(beta / 2.0, 0.0)))?.trace();
        let ratio = numerator / denominator;
        if ratio.im.abs() > 1e-10 * ratio.norm().max(1.0) || ratio.re <= 0.0 {
            return Err(Error::BadLogArgument(format!("trace ratio {ratio}")));
        }
        Ok(ratio.re.ln())
    }
}

/// An element of the represented algebra: a 2^m x 2^m matrix tied to its
/// Fock representation.
#[derive(Debug, Clone)]
pub struct FockOperator {
    rep: Arc<FockRep>,
    matrix: ComplexMatrix,
}

impl FockOperator {
    pub fn rep(&self) -> &Arc<FockRep> {
        &self.rep
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { rep: self.rep.clone(), matrix: self.matrix.add(&other.matrix) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { rep: self.rep.clone(), matrix: self.matrix.sub(&other.matrix) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { rep: self.rep.clone(), matrix: self.matrix.matmul(&other.matrix) }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { rep: self.rep.clone(), matrix: self.matrix.scale(z) }
    }

    pub fn adjoint(&self) -> Self {
        Self { rep: self.rep.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn exp(&self) -> Result<Self> {
        Ok(Self { rep: self.rep.clone(), matrix: matrix_exp(&self.matrix)? })
    }

    pub fn pow(&self, exponent: usize) -> Self {
        let mut out = self.rep.identity();
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }

    /// Real power (A^t for self-adjoint positive A) via functional calculus.
    pub fn powf(&self, t: f64) -> Result<Self> {
        let matrix = hermitian_function(&self.matrix, |x| {
            if x <= 0.0 {
                c(0.0, 0.0)
            } else {
                c(x.powf(t), 0.0)
            }
        })?;
        Ok(Self { rep: self.rep.clone(), matrix })
    }
}

/// Random even self-adjoint element, for tests and convergence studies.
pub fn random_even_self_adjoint(rep: &Arc<FockRep>, rng: &mut impl rand::Rng) -> FockOperator {
    let dim = rep.fock_dim();
    let raw = ComplexMatrix::from_fn(dim, dim, |_, _| {
        c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let hermitian = raw.add(&raw.adjoint()).scale(c(0.5, 0.0));
    let parity = rep.parity_matrix();
    let projected = hermitian.add(&parity.matmul(&hermitian).matmul(parity)).scale(c(0.5, 0.0));
    rep.operator(projected)
}
