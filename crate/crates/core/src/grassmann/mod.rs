//! Finite Grassmann algebra over copied self-dual spaces: wedge products,
//! Berezin derivatives and integrals, the Grassmann exponential and
//! bilinear elements.
//!
//! Generators are labeled by (copy, direction) pairs. Directions 0..m-1 are
//! the range basis of the declared reference projection, directions m..2m-1
//! their involutes; the canonical slot order is copy-major, directions
//! ascending. Every anticommutation sign in the crate flows from this single
//! total order.

mod circle;
mod gaussian;

pub use circle::{
    antisymmetrized_circle, chernoff_approx, circle_product, circle_product_literal, kappa_inv,
    kappa_iso, star_involution,
};
pub use gaussian::{
    gaussian_integral, gaussian_moment_pfaffian, quadratic_exponential_moment, quadratic_skew_matrix,
    GaussianWeight,
};

use crate::error::{Error, Result};
use crate::fock::FockRep;
use crate::numkernel::ComplexMatrix;
use crate::selfdual::BasisProjection;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// Hard cap on the number of generators (the coefficient table has 2^D
/// entries).
pub const GENERATOR_CAP: usize = 24;
/// Dense coefficient storage is used up to this generator count.
pub const DENSE_CAP: usize = 20;
/// Coefficients below this absolute value are pruned.
pub const PRUNE_TOL: f64 = 1e-15;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Labeled generator set: `copies` copies of a self-dual space, with slots
/// fixed by a reference basis projection.
#[derive(Debug)]
pub struct GrassmannSpace {
    reference: BasisProjection,
    copies: usize,
    fock: OnceLock<Arc<FockRep>>,
}

impl GrassmannSpace {
    pub fn new(reference: BasisProjection, copies: usize) -> Result<Arc<Self>> {
        let d = copies * reference.space().dim();
        if copies == 0 {
            return Err(Error::InvalidConfig("need at least one copy".into()));
        }
        if d > GENERATOR_CAP {
            return Err(Error::CapacityExceeded(format!(
                "{d} generators exceed the cap of {GENERATOR_CAP}"
            )));
        }
        Ok(Arc::new(Self { reference, copies, fock: OnceLock::new() }))
    }

    pub fn reference(&self) -> &BasisProjection {
        &self.reference
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Ambient dimension of one copy (2m).
    pub fn base_dim(&self) -> usize {
        self.reference.space().dim()
    }

    pub fn one_particle_dim(&self) -> usize {
        self.reference.one_particle_dim()
    }

    /// Total number of generators.
    pub fn generators(&self) -> usize {
        self.copies * self.base_dim()
    }

    pub fn slot(&self, copy: usize, dir: usize) -> usize {
        debug_assert!(copy < self.copies && dir < self.base_dim());
        copy * self.base_dim() + dir
    }

    /// Slot of the involuted generator: psi_i <-> A psi_i within a copy.
    pub fn partner_dir(&self, dir: usize) -> usize {
        let m = self.one_particle_dim();
        if dir < m {
            dir + m
        } else {
            dir - m
        }
    }

    /// Fock representation over the reference projection (single copy).
    pub fn fock_rep(&self) -> Result<Arc<FockRep>> {
        if let Some(rep) = self.fock.get() {
            return Ok(rep.clone());
        }
        let rep = FockRep::new(self.reference.clone())?;
        let _ = self.fock.set(rep.clone());
        Ok(self.fock.get().expect("just set").clone())
    }

    fn same_space(a: &Arc<GrassmannSpace>, b: &Arc<GrassmannSpace>) -> bool {
        if Arc::ptr_eq(a, b) {
            return true;
        }
        a.copies == b.copies
            && a.base_dim() == b.base_dim()
            && a.reference
                .range_basis()
                .sub(b.reference.range_basis())
                .max_norm()
                < 1e-12
    }
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<Complex64>),
    Sparse(HashMap<u32, Complex64>),
}

/// Element of the Grassmann algebra: a coefficient map over generator
/// subsets (bitmasks in canonical slot order).
#[derive(Debug, Clone)]
pub struct GrassmannElement {
    space: Arc<GrassmannSpace>,
    coeffs: Storage,
}

/// Sign of merging two disjoint ascending monomials into one, counting the
/// crossings of the second past the first.
pub(crate) fn merge_sign(first: u32, second: u32) -> f64 {
    let mut crossings = 0u32;
    let mut rest = second;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        crossings += (first >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if crossings % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl GrassmannElement {
    pub fn zero(space: &Arc<GrassmannSpace>) -> Self {
        let coeffs = if space.generators() <= DENSE_CAP {
            Storage::Dense(vec![czero(); 1usize << space.generators()])
        } else {
            Storage::Sparse(HashMap::new())
        };
        Self { space: space.clone(), coeffs }
    }

    pub fn scalar(space: &Arc<GrassmannSpace>, z: Complex64) -> Self {
        let mut out = Self::zero(space);
        out.set(0, z);
        out
    }

    /// Single generator, by copy and direction.
    pub fn generator(space: &Arc<GrassmannSpace>, copy: usize, dir: usize) -> Self {
        let mut out = Self::zero(space);
        out.set(1 << space.slot(copy, dir), Complex64::new(1.0, 0.0));
        out
    }

    /// Degree-1 element of an ambient vector placed on one copy.
    pub fn vector(space: &Arc<GrassmannSpace>, copy: usize, phi: &[Complex64]) -> Self {
        let coords = space.reference().frame_coords(phi);
        let mut out = Self::zero(space);
        for (dir, &c) in coords.iter().enumerate() {
            if c.norm() > PRUNE_TOL {
                out.set(1 << space.slot(copy, dir), c);
            }
        }
        out
    }

    pub fn space(&self) -> &Arc<GrassmannSpace> {
        &self.space
    }

    pub fn coefficient(&self, mask: u32) -> Complex64 {
        match &self.coeffs {
            Storage::Dense(v) => v[mask as usize],
            Storage::Sparse(m) => m.get(&mask).copied().unwrap_or_else(czero),
        }
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coefficient(0)
    }

    fn set(&mut self, mask: u32, value: Complex64) {
        match &mut self.coeffs {
            Storage::Dense(v) => v[mask as usize] = value,
            Storage::Sparse(m) => {
                if value.norm() <= PRUNE_TOL {
                    m.remove(&mask);
                } else {
                    m.insert(mask, value);
                }
            }
        }
    }

    fn accumulate(&mut self, mask: u32, value: Complex64) {
        match &mut self.coeffs {
            Storage::Dense(v) => v[mask as usize] += value,
            Storage::Sparse(m) => {
                let entry = m.entry(mask).or_insert_with(czero);
                *entry += value;
                if entry.norm() <= PRUNE_TOL {
                    m.remove(&mask);
                }
            }
        }
    }

    /// Iterates non-negligible (mask, coefficient) pairs.
    pub fn terms(&self) -> Vec<(u32, Complex64)> {
        match &self.coeffs {
            Storage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > PRUNE_TOL)
                .map(|(m, c)| (m as u32, *c))
                .collect(),
            Storage::Sparse(m) => {
                let mut out: Vec<(u32, Complex64)> =
                    m.iter().filter(|(_, c)| c.norm() > PRUNE_TOL).map(|(k, c)| (*k, *c)).collect();
                out.sort_by_key(|(k, _)| *k);
                out
            }
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms().len()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.terms().is_empty()
    }

    /// Largest coefficient difference against another element.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut best = 0.0f64;
        for (mask, c) in self.terms() {
            best = best.max((c - other.coefficient(mask)).norm());
        }
        for (mask, c) in other.terms() {
            best = best.max((c - self.coefficient(mask)).norm());
        }
        best
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !GrassmannSpace::same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for (mask, c) in other.terms() {
            out.accumulate(mask, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self::zero(&self.space);
        for (mask, c) in self.terms() {
            out.set(mask, c * z);
        }
        out
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if !GrassmannSpace::same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut out = Self::zero(&self.space);
        let left = self.terms();
        let right = other.terms();
        for (m1, c1) in &left {
            for (m2, c2) in &right {
                if m1 & m2 != 0 {
                    continue;
                }
                let sign = merge_sign(*m1, *m2);
                out.accumulate(m1 | m2, c1 * c2 * Complex64::new(sign, 0.0));
            }
        }
        Ok(out)
    }

    /// Berezin derivative along a single slot generator.
    pub fn derive_slot(&self, slot: usize) -> Self {
        let bit = 1u32 << slot;
        let below = bit - 1;
        let mut out = Self::zero(&self.space);
        for (mask, c) in self.terms() {
            if mask & bit == 0 {
                continue;
            }
            let sign = if (mask & below).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out.accumulate(mask & !bit, c * Complex64::new(sign, 0.0));
        }
        out
    }

    /// Berezin derivative `delta/delta phi` for an ambient vector tagged
    /// with a copy; antilinear in `phi`.
    pub fn derive_vector(&self, copy: usize, phi: &[Complex64]) -> Self {
        let coords = self.space.reference().frame_coords(phi);
        let mut out = Self::zero(&self.space);
        for (dir, coord) in coords.iter().enumerate() {
            if coord.norm() <= PRUNE_TOL {
                continue;
            }
            let part = self.derive_slot(self.space.slot(copy, dir)).scale(coord.conj());
            out = out.add(&part).expect("same space");
        }
        out
    }

    /// Grassmann exponential. The scalar part is factored out as exp(c);
    /// the nilpotent rest uses the commuting-factor product when every
    /// monomial has even degree, else the (terminating) power series.
    pub fn exp(&self) -> Self {
        let scalar = self.scalar_part();
        let mut rest = self.clone();
        rest.set(0, czero());
        let prefactor = Complex64::new(scalar.re.exp(), 0.0)
            * Complex64::new(scalar.im.cos(), scalar.im.sin());
        let terms = rest.terms();
        let all_even = terms.iter().all(|(mask, _)| mask.count_ones() % 2 == 0);
        if all_even {
            let mut out = Self::scalar(&self.space, prefactor);
            for (mask, c) in terms {
                // (1 + t) factors: each monomial squares to zero and even
                // monomials commute
                let mut next = out.clone();
                for (m0, c0) in out.terms() {
                    if m0 & mask != 0 {
                        continue;
                    }
                    let sign = merge_sign(m0, mask);
                    next.accumulate(m0 | mask, c0 * c * Complex64::new(sign, 0.0));
                }
                out = next;
            }
            out
        } else {
            let mut out = Self::scalar(&self.space, prefactor);
            let mut power = Self::scalar(&self.space, prefactor);
            let mut k = 1usize;
            loop {
                power = power.wedge(&rest).expect("same space");
                power = power.scale(Complex64::new(1.0 / k as f64, 0.0));
                if power.is_zero() || k > self.space.generators() {
                    break;
                }
                out = out.add(&power).expect("same space");
                k += 1;
            }
            out
        }
    }

    /// Restriction to monomials supported away from a copy (used after
    /// integrating that copy out).
    pub fn max_degree(&self) -> u32 {
        self.terms().iter().map(|(m, _)| m.count_ones()).max().unwrap_or(0)
    }
}

/// Bilinear Grassmann element `<H, M H>` of an ambient operator on one
/// copy: `sum_ij <psi_i, M psi_j> (A psi_j) ^ psi_i` over the generator
/// frame.
pub fn bilinear_grassmann(
    space: &Arc<GrassmannSpace>,
    copy: usize,
    m: &ComplexMatrix,
) -> Result<GrassmannElement> {
    let base = space.base_dim();
    if m.rows() != base || m.cols() != base {
        return Err(Error::ShapeMismatch(format!("bilinear element expects {base}x{base}")));
    }
    let frame = space.reference().frame_matrix(m);
    let mut out = GrassmannElement::zero(space);
    for i in 0..base {
        for j in 0..base {
            let coeff = frame[(i, j)];
            if coeff.norm() <= PRUNE_TOL {
                continue;
            }
            let a = space.slot(copy, space.partner_dir(j));
            let b = space.slot(copy, i);
            if a == b {
                continue;
            }
            // monomial gamma_a ^ gamma_b in that order
            let (mask, sign) = if a < b { (1u32 << a | 1 << b, 1.0) } else { (1u32 << a | 1 << b, -1.0) };
            out.accumulate(mask, coeff * Complex64::new(sign, 0.0));
        }
    }
    Ok(out)
}

/// Bilinear element of an operator on the full copied ambient space,
/// `<H^(n), M H^(n)>`.
pub fn bilinear_grassmann_extended(
    space: &Arc<GrassmannSpace>,
    m: &ComplexMatrix,
) -> Result<GrassmannElement> {
    let d = space.generators();
    if m.rows() != d || m.cols() != d {
        return Err(Error::ShapeMismatch(format!("extended bilinear expects {d}x{d}")));
    }
    let base = space.base_dim();
    let frame = space.reference().generator_frame();
    // frame matrix block by block: (I_n (x) G)* M (I_n (x) G)
    let mut frame_m = ComplexMatrix::zeros(d, d);
    for k1 in 0..space.copies() {
        for k2 in 0..space.copies() {
            let rows: Vec<usize> = (0..base).map(|i| k1 * base + i).collect();
            let cols: Vec<usize> = (0..base).map(|i| k2 * base + i).collect();
            let block = m.submatrix(&rows, &cols);
            let transformed = frame.adjoint().matmul(&block).matmul(&frame);
            for i in 0..base {
                for j in 0..base {
                    frame_m[(k1 * base + i, k2 * base + j)] = transformed[(i, j)];
                }
            }
        }
    }
    let mut out = GrassmannElement::zero(space);
    for gi in 0..d {
        for gj in 0..d {
            let coeff = frame_m[(gi, gj)];
            if coeff.norm() <= PRUNE_TOL {
                continue;
            }
            let (kj, dj) = (gj / base, gj % base);
            let a = space.slot(kj, space.partner_dir(dj));
            let b = gi;
            if a == b {
                continue;
            }
            let sign = if a < b { 1.0 } else { -1.0 };
            out.accumulate(1u32 << a | 1 << b, coeff * Complex64::new(sign, 0.0));
        }
    }
    Ok(out)
}

/// The pairing element `<h_P^(k), h_P^(l)> = sum_j (A psi_j)^(k) ^ psi_j^(l)`.
pub fn pairing_element(space: &Arc<GrassmannSpace>, k: usize, l: usize) -> GrassmannElement {
    let m = space.one_particle_dim();
    let mut out = GrassmannElement::zero(space);
    for j in 0..m {
        let a = space.slot(k, m + j);
        let b = space.slot(l, j);
        let sign = if a < b { 1.0 } else { -1.0 };
        out.accumulate(1u32 << a | 1 << b, Complex64::new(sign, 0.0));
    }
    out
}

/// Berezin integral over copy `k` with respect to a basis projection: the
/// composition of the 2m derivatives `prod_i d/d(psi'_i) d/d(A psi'_i)`
/// over an orthonormal basis of ran P'.
pub fn berezin_integral(
    projection: &BasisProjection,
    copy: usize,
    xi: &GrassmannElement,
) -> Result<GrassmannElement> {
    let space = xi.space();
    if projection.space().dim() != space.base_dim() {
        return Err(Error::SpaceMismatch);
    }
    if copy >= space.copies() {
        return Err(Error::SpaceMismatch);
    }
    let m = space.one_particle_dim();
    let involution = projection.space();
    let mut out = xi.clone();
    for i in 0..m {
        let n = space.base_dim();
        let psi: Vec<Complex64> = (0..n).map(|r| projection.range_basis()[(r, i)]).collect();
        let apsi = involution.involute(&psi);
        out = out.derive_vector(copy, &apsi);
        out = out.derive_vector(copy, &psi);
    }
    Ok(out)
}

/// Full Berezin integral over every copy, returning the resulting scalar.
pub fn berezin_integral_all(
    projection: &BasisProjection,
    xi: &GrassmannElement,
) -> Result<Complex64> {
    let mut out = xi.clone();
    for copy in 0..xi.space().copies() {
        out = berezin_integral(projection, copy, &out)?;
    }
    Ok(out.scalar_part())
}

/// The orientation constant of the slot convention: the full Berezin
/// integral of the ascending top monomial.
pub fn berezin_top_sign(space: &Arc<GrassmannSpace>) -> f64 {
    let d = space.generators();
    let mut top = GrassmannElement::zero(space);
    top.set(((1u64 << d) - 1) as u32, Complex64::new(1.0, 0.0));
    let val = berezin_integral_all(space.reference(), &top).expect("reference projection matches");
    val.re.signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfdual::{random_bogoliubov, BasisProjection, SelfDualSpace};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn canonical_space(m: usize, copies: usize) -> Arc<GrassmannSpace> {
        GrassmannSpace::new(BasisProjection::canonical(SelfDualSpace::canonical(m)), copies).unwrap()
    }

    pub(crate) fn random_element(
        space: &Arc<GrassmannSpace>,
        rng: &mut StdRng,
        max_degree: u32,
    ) -> GrassmannElement {
        let mut out = GrassmannElement::zero(space);
        let d = space.generators();
        for mask in 0u32..(1 << d) {
            if mask.count_ones() <= max_degree {
                out.set(mask, c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            }
        }
        out
    }

    #[test]
    fn wedge_is_anticommutative_on_generators() {
        let space = canonical_space(2, 1);
        let g0 = GrassmannElement::generator(&space, 0, 0);
        let g1 = GrassmannElement::generator(&space, 0, 1);
        assert!(g0.wedge(&g0).unwrap().is_zero());
        let ab = g0.wedge(&g1).unwrap();
        let ba = g1.wedge(&g0).unwrap();
        assert!(ab.add(&ba).unwrap().is_zero());
    }

    #[test]
    fn wedge_distributes_over_sums() {
        // (1 + phi1)(1 + phi2) = 1 + phi1 + phi2 + phi1 phi2
        let space = canonical_space(2, 1);
        let one = GrassmannElement::scalar(&space, c(1., 0.));
        let g0 = GrassmannElement::generator(&space, 0, 0);
        let g1 = GrassmannElement::generator(&space, 0, 1);
        let lhs = one.add(&g0).unwrap().wedge(&one.add(&g1).unwrap()).unwrap();
        let rhs = one
            .add(&g0)
            .unwrap()
            .add(&g1)
            .unwrap()
            .add(&g0.wedge(&g1).unwrap())
            .unwrap();
        assert!(lhs.distance(&rhs) < 1e-15);
    }

    #[test]
    fn wedge_is_associative_on_random_elements() {
        let space = canonical_space(2, 1);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..5 {
            let a = random_element(&space, &mut rng, 2);
            let b = random_element(&space, &mut rng, 2);
            let cc = random_element(&space, &mut rng, 2);
            let left = a.wedge(&b).unwrap().wedge(&cc).unwrap();
            let right = a.wedge(&b.wedge(&cc).unwrap()).unwrap();
            assert!(left.distance(&right) < 1e-12);
        }
    }

    #[test]
    fn derivative_of_generators() {
        let space = canonical_space(2, 1);
        let g0 = GrassmannElement::generator(&space, 0, 0);
        let g1 = GrassmannElement::generator(&space, 0, 1);
        // d/d(psi_i) psi_j = delta_ij
        let e0 = vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        let e1 = vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)];
        assert!((g0.derive_vector(0, &e0).scalar_part() - c(1., 0.)).norm() < 1e-15);
        assert!(g0.derive_vector(0, &e1).is_zero());
        // scalars die
        let one = GrassmannElement::scalar(&space, c(1., 0.));
        assert!(one.derive_vector(0, &e0).is_zero());
        // Leibniz signs: d/d(psi_0)(psi_0 psi_1) = psi_1,
        // d/d(psi_1)(psi_0 psi_1) = -psi_0
        let prod = g0.wedge(&g1).unwrap();
        assert!(prod.derive_vector(0, &e0).distance(&g1) < 1e-15);
        assert!(prod.derive_vector(0, &e1).distance(&g0.scale(c(-1., 0.))) < 1e-15);
    }

    #[test]
    fn derivatives_anticommute() {
        let space = canonical_space(2, 1);
        let mut rng = StdRng::seed_from_u64(5);
        let xi = random_element(&space, &mut rng, 4);
        let phi1: Vec<Complex64> = (0..4).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen())).collect();
        let phi2: Vec<Complex64> = (0..4).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen())).collect();
        let ab = xi.derive_vector(0, &phi2).derive_vector(0, &phi1);
        let ba = xi.derive_vector(0, &phi1).derive_vector(0, &phi2);
        assert!(ab.add(&ba).unwrap().max_coefficient() < 1e-12);
    }

    #[test]
    fn berezin_integral_of_top_and_scalar() {
        let space = canonical_space(2, 1);
        // the integral of the paired top monomial (A psi_1)psi_1 (A psi_2)psi_2
        // is +1 under the convention; the ascending-slot constant follows
        let p = space.reference().clone();
        let m = 2;
        let mut paired = GrassmannElement::scalar(&space, c(1., 0.));
        for i in 0..m {
            let a = GrassmannElement::generator(&space, 0, m + i);
            let b = GrassmannElement::generator(&space, 0, i);
            paired = paired.wedge(&a.wedge(&b).unwrap()).unwrap();
        }
        let val = berezin_integral_all(&p, &paired).unwrap();
        assert!((val - c(1., 0.)).norm() < 1e-14, "paired top integral {val}");
        // scalars integrate to zero
        let one = GrassmannElement::scalar(&space, c(1., 0.));
        assert!(berezin_integral_all(&p, &one).unwrap().norm() < 1e-15);
        // recorded convention constant for m = 2: the ascending top monomial
        // psi_1 psi_2 (A psi_1)(A psi_2) integrates to -1
        assert_eq!(berezin_top_sign(&space), -1.0);
    }

    #[test]
    fn berezin_integral_is_basis_invariant() {
        let base = SelfDualSpace::canonical(2);
        let p = BasisProjection::canonical(base.clone());
        let space = GrassmannSpace::new(p.clone(), 1).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        // rotate ran P by a unitary block (a Bogoliubov commuting with P)
        for _ in 0..5 {
            let xi = random_element(&space, &mut rng, 4);
            // unitary 2x2 block acting inside ran P
            let raw = ComplexMatrix::from_fn(2, 2, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let anti = raw.sub(&raw.adjoint()).scale(c(0.5, 0.0));
            let u_small = crate::numkernel::matrix_exp(&anti).unwrap();
            let rotated_basis = p.range_basis().matmul(&u_small);
            let q = BasisProjection::from_range_basis(base.clone(), rotated_basis).unwrap();
            let with_p = berezin_integral_all(&p, &xi).unwrap();
            let with_q = berezin_integral_all(&q, &xi).unwrap();
            assert!((with_p - with_q).norm() < 1e-12, "{with_p} vs {with_q}");
        }
    }

    #[test]
    fn berezin_orientation_flips_with_projection() {
        // the integrals for two projections differ by the orientation sign
        let base = SelfDualSpace::canonical(2);
        let p = BasisProjection::canonical(base.clone());
        let space = GrassmannSpace::new(p.clone(), 1).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let u = random_bogoliubov(&base, &mut rng);
            let (q, sign) = crate::selfdual::bogoliubov_transform(&p, &u).unwrap();
            let xi = random_element(&space, &mut rng, 4);
            let with_p = berezin_integral_all(&p, &xi).unwrap();
            let with_q = berezin_integral_all(&q, &xi).unwrap();
            assert!(
                (with_p - with_q * c(sign, 0.)).norm() < 1e-11,
                "orientation {sign}: {with_p} vs {with_q}"
            );
        }
    }

    #[test]
    fn exp_examples() {
        let space = canonical_space(2, 1);
        let zero = GrassmannElement::zero(&space);
        assert!(zero.exp().distance(&GrassmannElement::scalar(&space, c(1., 0.))) < 1e-15);

        // exp(c phi1 phi2) = 1 + c phi1 phi2
        let g0 = GrassmannElement::generator(&space, 0, 0);
        let g1 = GrassmannElement::generator(&space, 0, 1);
        let quad = g0.wedge(&g1).unwrap().scale(c(0.7, -0.2));
        let expected = GrassmannElement::scalar(&space, c(1., 0.)).add(&quad).unwrap();
        assert!(quad.exp().distance(&expected) < 1e-15);

        // exp(<h_P, h_P>) = prod_i (1 + (A psi_i) psi_i)
        let pair = pairing_element(&space, 0, 0);
        let mut product = GrassmannElement::scalar(&space, c(1., 0.));
        for i in 0..2 {
            let a = GrassmannElement::generator(&space, 0, 2 + i);
            let b = GrassmannElement::generator(&space, 0, i);
            let factor = GrassmannElement::scalar(&space, c(1., 0.)).add(&a.wedge(&b).unwrap()).unwrap();
            product = product.wedge(&factor).unwrap();
        }
        assert!(pair.exp().distance(&product) < 1e-14);

        // exp(xi) exp(-xi) = 1 for a general even element
        let mut rng = StdRng::seed_from_u64(13);
        let xi = {
            let raw = random_element(&space, &mut rng, 4);
            let mut even = GrassmannElement::zero(&space);
            for (mask, c0) in raw.terms() {
                if mask.count_ones() % 2 == 0 && mask != 0 {
                    even.set(mask, c0);
                }
            }
            even
        };
        let prod = xi.exp().wedge(&xi.scale(c(-1., 0.)).exp()).unwrap();
        assert!(prod.distance(&GrassmannElement::scalar(&space, c(1., 0.))) < 1e-12);
    }

    #[test]
    fn exp_series_and_product_paths_agree() {
        let space = canonical_space(2, 1);
        let mut rng = StdRng::seed_from_u64(17);
        // even element exercised through both code paths by adding a
        // negligible odd part for the series run
        let mut even = GrassmannElement::zero(&space);
        for (mask, c0) in random_element(&space, &mut rng, 4).terms() {
            if mask.count_ones() % 2 == 0 && mask != 0 {
                even.set(mask, c0);
            }
        }
        let fast = even.exp();
        let mut with_odd = even.clone();
        let odd_probe = GrassmannElement::generator(&space, 0, 0).scale(c(1e-300, 0.));
        with_odd = with_odd.add(&odd_probe).unwrap();
        let series = with_odd.exp();
        assert!(fast.distance(&series) < 1e-12);
    }

    #[test]
    fn bilinear_element_matches_pairing() {
        // <H, K(P) H> = <h_P, h_P> for the reference projection
        let space = canonical_space(2, 1);
        let p = space.reference().clone();
        let k_of_p = p
            .space()
            .kmap(p.matrix())
            .unwrap();
        let direct = bilinear_grassmann(&space, 0, k_of_p.matrix()).unwrap();
        let pairing = pairing_element(&space, 0, 0);
        assert!(direct.distance(&pairing) < 1e-12);
    }

    #[test]
    fn bilinear_element_is_basis_independent() {
        // assembling <H,MH> over a rotated orthonormal basis gives the same
        // element
        let space = canonical_space(2, 1);
        let mut rng = StdRng::seed_from_u64(19);
        let m = ComplexMatrix::from_fn(4, 4, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let reference = bilinear_grassmann(&space, 0, &m).unwrap();

        let raw = ComplexMatrix::from_fn(4, 4, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let anti = raw.sub(&raw.adjoint()).scale(c(0.5, 0.0));
        let u = crate::numkernel::matrix_exp(&anti).unwrap();
        let base = space.reference().space().clone();
        let mut resummed = GrassmannElement::zero(&space);
        for i in 0..4 {
            let chi_i: Vec<Complex64> = (0..4).map(|r| u[(r, i)]).collect();
            for j in 0..4 {
                let chi_j: Vec<Complex64> = (0..4).map(|r| u[(r, j)]).collect();
                let coeff = crate::numkernel::dot(&chi_i, &m.matvec(&chi_j));
                let left = GrassmannElement::vector(&space, 0, &base.involute(&chi_j));
                let right = GrassmannElement::vector(&space, 0, &chi_i);
                resummed = resummed.add(&left.wedge(&right).unwrap().scale(coeff)).unwrap();
            }
        }
        assert!(reference.distance(&resummed) < 1e-12);
    }

    #[test]
    fn capacity_cap_is_enforced() {
        let base = BasisProjection::canonical(SelfDualSpace::canonical(2));
        assert!(matches!(
            GrassmannSpace::new(base, 7),
            Err(Error::CapacityExceeded(_))
        ));
    }
}
