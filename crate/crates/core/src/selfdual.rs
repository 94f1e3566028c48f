//! Self-dual Hilbert spaces (H, A) with antiunitary involution, basis
//! projections, self-dual operators/Hamiltonians, the K map and Bogoliubov
//! transformations.
//!
//! Antilinear maps are represented as (unitary, conjugation) pairs: the
//! involution acts as `A(v) = J conj(v)` for a unitary `J` with
//! `J conj(J) = 1`, which keeps every operation inside plain complex
//! linear algebra.

use crate::error::{Error, Result};
use crate::numkernel::{dot, hermitian_eig, ComplexMatrix};
use num_complex::Complex64;

/// Tolerance for the defining identities of projections and involutions.
pub const PROJECTION_TOL: f64 = 1e-11;
/// Tolerance for the self-duality residual `|H* + A H A|`.
pub const SELF_DUAL_TOL: f64 = 1e-11;
/// Eigenvalues below this magnitude count as kernel in
/// [`diagonalizing_projection`].
pub const KERNEL_EIG_TOL: f64 = 1e-10;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// An even-dimensional complex inner-product space together with an
/// antiunitary involution `A(v) = J conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfDualSpace {
    dim: usize,
    involution: ComplexMatrix,
}

impl SelfDualSpace {
    pub fn new(involution: ComplexMatrix) -> Result<Self> {
        let n = involution.rows();
        if !involution.is_square() || n % 2 != 0 {
            return Err(Error::BadInvolution(format!("involution must be square of even order, got {n}")));
        }
        let id = ComplexMatrix::identity(n);
        let unitarity = involution.adjoint().matmul(&involution).sub(&id).max_norm();
        if unitarity > 1e-12 {
            return Err(Error::BadInvolution(format!("J not unitary, residual {unitarity:e}")));
        }
        let squares = involution.matmul(&involution.conj()).sub(&id).max_norm();
        if squares > 1e-12 {
            return Err(Error::BadInvolution(format!("J conj(J) != 1, residual {squares:e}")));
        }
        Ok(Self { dim: n, involution })
    }

    /// The canonical space `h (+) h*` of one-particle dimension `m`, with
    /// the involution swapping the two blocks.
    pub fn canonical(m: usize) -> Self {
        let n = 2 * m;
        let mut j = ComplexMatrix::zeros(n, n);
        for i in 0..m {
            j[(i, m + i)] = one();
            j[(m + i, i)] = one();
        }
        Self { dim: n, involution: j }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn involution_matrix(&self) -> &ComplexMatrix {
        &self.involution
    }

    /// Applies the involution to a vector: `A(v) = J conj(v)`.
    pub fn involute(&self, v: &[Complex64]) -> Vec<Complex64> {
        let cv: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        self.involution.matvec(&cv)
    }

    /// Matrix of the linear map `v -> A M A v`, namely `J conj(M) J*`.
    pub fn conjugate_by_involution(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.involution.matmul(&m.conj()).matmul(&self.involution.adjoint())
    }

    /// The linear map `K(H) = (H - A H* A)/2` projecting onto self-dual
    /// operators.
    pub fn kmap(&self, h: &ComplexMatrix) -> Result<SelfDualOperator> {
        if h.rows() != self.dim || h.cols() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "kmap expects {0}x{0}, got {1}x{2}",
                self.dim,
                h.rows(),
                h.cols()
            )));
        }
        let k = h.sub(&self.conjugate_by_involution(&h.adjoint())).scale(Complex64::new(0.5, 0.0));
        SelfDualOperator::new(self.clone(), k)
    }
}

/// Orthogonal projection P with `A P A = 1 - P`. Its range plays the role
/// of the one-particle Hilbert space and fixes annihilators and creators.
#[derive(Debug, Clone)]
pub struct BasisProjection {
    space: SelfDualSpace,
    matrix: ComplexMatrix,
    /// Orthonormal columns spanning ran P (dim/2 of them).
    range_basis: ComplexMatrix,
}

impl BasisProjection {
    pub fn from_matrix(space: SelfDualSpace, p: ComplexMatrix) -> Result<Self> {
        let n = space.dim();
        if p.rows() != n || p.cols() != n {
            return Err(Error::BadProjection("projection shape mismatch".into()));
        }
        Self::validate_projection(&space, &p)?;
        // range basis: eigenvectors of the Hermitian projector with
        // eigenvalue near 1
        let (w, u) = hermitian_eig(&p)?;
        let m = n / 2;
        let count_one = w.iter().filter(|&&x| x > 0.5).count();
        if count_one != m {
            return Err(Error::BadProjection(format!("rank {count_one} != dim/2 = {m}")));
        }
        let cols: Vec<usize> = (0..n).filter(|&i| w[i] > 0.5).collect();
        let range_basis = u.submatrix(&(0..n).collect::<Vec<_>>(), &cols);
        Ok(Self { space, matrix: p, range_basis })
    }

    /// Builds the projection from orthonormal columns spanning its range.
    pub fn from_range_basis(space: SelfDualSpace, range_basis: ComplexMatrix) -> Result<Self> {
        let n = space.dim();
        let m = n / 2;
        if range_basis.rows() != n || range_basis.cols() != m {
            return Err(Error::BadProjection("range basis shape mismatch".into()));
        }
        let gram = range_basis.adjoint().matmul(&range_basis);
        if gram.sub(&ComplexMatrix::identity(m)).max_norm() > PROJECTION_TOL {
            return Err(Error::BadProjection("range basis not orthonormal".into()));
        }
        let p = range_basis.matmul(&range_basis.adjoint());
        Self::validate_projection(&space, &p)?;
        Ok(Self { space, matrix: p, range_basis })
    }

    fn validate_projection(space: &SelfDualSpace, p: &ComplexMatrix) -> Result<()> {
        let idempotent = p.matmul(p).sub(p).max_norm();
        let hermitian = p.hermiticity_residual();
        if idempotent > PROJECTION_TOL || hermitian > PROJECTION_TOL {
            return Err(Error::BadProjection(format!(
                "P^2 = P = P* violated: idempotency {idempotent:e}, hermiticity {hermitian:e}"
            )));
        }
        let complement = ComplexMatrix::identity(space.dim()).sub(p);
        let basis_residual = space.conjugate_by_involution(p).sub(&complement).max_norm();
        if basis_residual > PROJECTION_TOL {
            return Err(Error::BadProjection(format!("A P A != 1 - P, residual {basis_residual:e}")));
        }
        Ok(())
    }

    /// The canonical projection of [`SelfDualSpace::canonical`], projecting
    /// onto the first block.
    pub fn canonical(space: SelfDualSpace) -> Self {
        let n = space.dim();
        let m = n / 2;
        let range_basis = ComplexMatrix::from_fn(n, m, |i, j| {
            if i == j {
                one()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let matrix = range_basis.matmul(&range_basis.adjoint());
        Self { space, matrix, range_basis }
    }

    pub fn space(&self) -> &SelfDualSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn complement_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.space.dim()).sub(&self.matrix)
    }

    pub fn range_basis(&self) -> &ComplexMatrix {
        &self.range_basis
    }

    pub fn one_particle_dim(&self) -> usize {
        self.space.dim() / 2
    }

    /// The unitary frame `[R | A R]` whose first half spans ran P and whose
    /// second half spans ran(1-P).
    pub fn generator_frame(&self) -> ComplexMatrix {
        let n = self.space.dim();
        let m = n / 2;
        let conj_basis = self.space.involution_matrix().matmul(&self.range_basis.conj());
        ComplexMatrix::from_fn(n, n, |i, j| {
            if j < m {
                self.range_basis[(i, j)]
            } else {
                conj_basis[(i, j - m)]
            }
        })
    }

    /// Coordinates of an ambient vector in the generator frame.
    pub fn frame_coords(&self, v: &[Complex64]) -> Vec<Complex64> {
        let frame = self.generator_frame();
        let n = self.space.dim();
        (0..n)
            .map(|j| {
                let col: Vec<Complex64> = (0..n).map(|i| frame[(i, j)]).collect();
                dot(&col, v)
            })
            .collect()
    }

    /// Matrix of an ambient operator in the generator frame: `G* M G`.
    pub fn frame_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let frame = self.generator_frame();
        frame.adjoint().matmul(m).matmul(&frame)
    }

    /// Ambient vector of generator-frame coordinates.
    pub fn ambient_vector(&self, coords: &[Complex64]) -> Vec<Complex64> {
        self.generator_frame().matvec(coords)
    }
}

/// Operator H with `H* = -A H A`; a self-dual Hamiltonian when also
/// self-adjoint. Self-dual operators always have zero trace.
#[derive(Debug, Clone)]
pub struct SelfDualOperator {
    space: SelfDualSpace,
    matrix: ComplexMatrix,
}

impl SelfDualOperator {
    pub fn new(space: SelfDualSpace, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(Error::ShapeMismatch("self-dual operator shape".into()));
        }
        let scale = matrix.max_norm().max(1.0);
        let residual = matrix
            .adjoint()
            .add(&space.conjugate_by_involution(&matrix))
            .max_norm();
        if residual > SELF_DUAL_TOL * scale {
            return Err(Error::NotSelfDual(residual));
        }
        let trace = matrix.trace().norm();
        if trace > 1e-10 * scale * space.dim() as f64 {
            return Err(Error::NotSelfDual(trace));
        }
        Ok(Self { space, matrix })
    }

    pub fn zero(space: SelfDualSpace) -> Self {
        let matrix = ComplexMatrix::zeros(space.dim(), space.dim());
        Self { space, matrix }
    }

    pub fn space(&self) -> &SelfDualSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_hamiltonian(&self) -> bool {
        let scale = self.matrix.max_norm().max(1.0);
        self.matrix.hermiticity_residual() <= SELF_DUAL_TOL * scale
    }

    pub fn operator_norm(&self) -> f64 {
        self.matrix.operator_norm()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
        }
    }
}

/// Basis projection `P = 1[H > 0] + P0` diagonalizing a self-dual
/// Hamiltonian, with `P0` a basis projection of the kernel built by pairing
/// kernel vectors `v` with `A v`.
pub fn diagonalizing_projection(h: &SelfDualOperator) -> Result<BasisProjection> {
    if !h.is_hamiltonian() {
        return Err(Error::NotSelfAdjoint(h.matrix().hermiticity_residual()));
    }
    let space = h.space().clone();
    let n = space.dim();
    let m = n / 2;
    let (w, u) = hermitian_eig(h.matrix())?;
    let scale = w.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let threshold = KERNEL_EIG_TOL * scale;

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for (idx, &eig) in w.iter().enumerate() {
        if eig > threshold {
            columns.push((0..n).map(|i| u[(i, idx)]).collect());
        }
    }
    let kernel: Vec<Vec<Complex64>> = (0..n)
        .filter(|&idx| w[idx].abs() <= threshold)
        .map(|idx| (0..n).map(|i| u[(i, idx)]).collect())
        .collect();
    if kernel.len() % 2 != 0 {
        return Err(Error::KernelPairingFailure(kernel.len() as f64));
    }

    // Greedy kernel pairing, ascending index order: for each kernel vector
    // not yet covered, project out the accepted pairs, then combine the
    // residual v with A v so that <u, A u> = 0.
    let mut accepted: Vec<Vec<Complex64>> = Vec::new(); // u_j, into ran P0
    let mut partners: Vec<Vec<Complex64>> = Vec::new(); // A u_j
    for v0 in &kernel {
        if accepted.len() == kernel.len() / 2 {
            break;
        }
        let mut v = v0.clone();
        for basis in accepted.iter().chain(partners.iter()) {
            let overlap = dot(basis, &v);
            for (vi, bi) in v.iter_mut().zip(basis) {
                *vi -= overlap * bi;
            }
        }
        let norm = crate::numkernel::vec_norm(&v);
        if norm < 1e-8 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= Complex64::new(norm, 0.0);
        }
        let av = space.involute(&v);
        // u = a v + b A v with a^2 conj(alpha) + 2ab + b^2 alpha = 0
        let alpha = dot(&v, &av);
        let (a_coef, b_coef) = if alpha.norm() < 1e-13 {
            (one(), Complex64::new(0.0, 0.0))
        } else {
            let disc = (1.0 - alpha.norm_sqr()).max(0.0).sqrt();
            if disc < 1e-6 {
                return Err(Error::KernelPairingFailure(alpha.norm()));
            }
            (one(), (Complex64::new(-1.0 + disc, 0.0)) / alpha)
        };
        let mut u_vec: Vec<Complex64> =
            v.iter().zip(&av).map(|(x, y)| a_coef * x + b_coef * y).collect();
        let u_norm = crate::numkernel::vec_norm(&u_vec);
        if u_norm < 1e-8 {
            return Err(Error::KernelPairingFailure(alpha.norm()));
        }
        for z in u_vec.iter_mut() {
            *z /= Complex64::new(u_norm, 0.0);
        }
        let partner = space.involute(&u_vec);
        accepted.push(u_vec);
        partners.push(partner);
    }
    if columns.len() + accepted.len() != m {
        return Err(Error::KernelPairingFailure((columns.len() + accepted.len()) as f64));
    }
    columns.extend(accepted);

    let range_basis = ComplexMatrix::from_fn(n, m, |i, j| columns[j][i]);
    BasisProjection::from_range_basis(space, range_basis)
}

/// Conjugates a basis projection by a Bogoliubov transformation:
/// `P -> U P U*`. Returns the new projection and `det(U)` rounded to +-1.
pub fn bogoliubov_transform(p: &BasisProjection, u: &ComplexMatrix) -> Result<(BasisProjection, f64)> {
    let space = p.space().clone();
    let n = space.dim();
    if u.rows() != n || u.cols() != n {
        return Err(Error::ShapeMismatch("Bogoliubov transform shape".into()));
    }
    let unitarity = u.adjoint().matmul(u).sub(&ComplexMatrix::identity(n)).max_norm();
    if unitarity > SELF_DUAL_TOL {
        return Err(Error::NotBogoliubov(format!("U not unitary, residual {unitarity:e}")));
    }
    // U A = A U as matrices: U J = J conj(U)
    let commute = u
        .matmul(space.involution_matrix())
        .sub(&space.involution_matrix().matmul(&u.conj()))
        .max_norm();
    if commute > SELF_DUAL_TOL {
        return Err(Error::NotBogoliubov(format!("U does not commute with A, residual {commute:e}")));
    }
    let det = u.determinant();
    let sign = round_orientation(det)?;
    let new_basis = u.matmul(p.range_basis());
    let projection = BasisProjection::from_range_basis(space, new_basis)?;
    Ok((projection, sign))
}

fn round_orientation(det: Complex64) -> Result<f64> {
    if (det - one()).norm() <= 1e-8 {
        Ok(1.0)
    } else if (det + one()).norm() <= 1e-8 {
        Ok(-1.0)
    } else {
        Err(Error::DegenerateOverlap(format!("det(U) = {det} is not +-1")))
    }
}

/// Relative orientation of two basis projections: the determinant of a
/// Bogoliubov transformation `U` with `P2 = U P1 U*`, built from the two
/// generator frames.
pub fn orientation_sign(p1: &BasisProjection, p2: &BasisProjection) -> Result<f64> {
    if p1.space() != p2.space() {
        return Err(Error::SpaceMismatch);
    }
    let u = p2.generator_frame().matmul(&p1.generator_frame().adjoint());
    // the frame construction guarantees U is Bogoliubov; conjugation is
    // re-checked here to catch degenerate inputs
    let n = p1.space().dim();
    let unitarity = u.adjoint().matmul(&u).sub(&ComplexMatrix::identity(n)).max_norm();
    if unitarity > 1e-8 {
        return Err(Error::DegenerateOverlap(format!("frame product not unitary: {unitarity:e}")));
    }
    round_orientation(u.determinant())
}

/// Lifts one-particle data (h, g) to the self-dual operator whose bilinear
/// element is `dGamma(h) + dUpsilon(g) - Tr(h)/2`, namely
/// `-(kappa(h) + kappa~(g))` on the canonical doubled space.
///
/// `h` must be Hermitian on the one-particle space; `g` is the matrix of an
/// antilinear pairing operator and must be antisymmetric.
pub fn lift_one_particle(h: &ComplexMatrix, g: &ComplexMatrix) -> Result<SelfDualOperator> {
    let m = h.rows();
    if !h.is_square() || !g.is_square() || g.rows() != m {
        return Err(Error::ShapeMismatch("lift expects square h, g of equal size".into()));
    }
    let scale_h = h.max_norm().max(1.0);
    if h.hermiticity_residual() > 1e-12 * scale_h {
        return Err(Error::NotHermitian { residual: h.hermiticity_residual(), tolerance: 1e-12 * scale_h });
    }
    let g_skew = g.add(&g.transpose()).max_norm();
    if g_skew > 1e-12 * g.max_norm().max(1.0) {
        return Err(Error::NotAntisymmetric(g_skew));
    }
    let space = SelfDualSpace::canonical(m);
    let n = 2 * m;
    // kappa(h) = diag(h, -conj(h))/2, kappa~(g) = [[0, g],[-conj(g), 0]]/2
    let mut k = ComplexMatrix::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            k[(i, j)] = h[(i, j)] * Complex64::new(0.5, 0.0) ;
            k[(m + i, m + j)] = -h[(i, j)].conj() * Complex64::new(0.5, 0.0);
            k[(i, m + j)] = g[(i, j)] * Complex64::new(0.5, 0.0);
            k[(m + i, j)] = -g[(i, j)].conj() * Complex64::new(0.5, 0.0);
        }
    }
    SelfDualOperator::new(space, k.scale(Complex64::new(-1.0, 0.0)))
}

/// Random self-dual Hamiltonian, for tests and sweeps.
pub fn random_self_dual_hamiltonian(
    space: &SelfDualSpace,
    rng: &mut impl rand::Rng,
) -> SelfDualOperator {
    let n = space.dim();
    let raw = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let hermitian = raw.add(&raw.adjoint()).scale(Complex64::new(0.5, 0.0));
    space.kmap(&hermitian).expect("K of a Hermitian matrix is a self-dual Hamiltonian")
}

/// Random Bogoliubov transformation, as the exponential of an
/// anti-Hermitian generator commuting with the involution.
pub fn random_bogoliubov(space: &SelfDualSpace, rng: &mut impl rand::Rng) -> ComplexMatrix {
    let n = space.dim();
    let raw = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let symmetrized = raw.add(&space.conjugate_by_involution(&raw)).scale(Complex64::new(0.5, 0.0));
    let generator = symmetrized.sub(&symmetrized.adjoint()).scale(Complex64::new(0.5, 0.0));
    crate::numkernel::matrix_exp(&generator).expect("exponential of a finite generator")
}
