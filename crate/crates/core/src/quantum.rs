//! Entropies, Holevo quantities, density matrices and Gram embeddings.
//!
//! Eve's conditional states in every attack are finite mixtures of pure
//! (possibly unnormalised) vectors. The entropy of `sum_i |psi_i><psi_i|`
//! only depends on the Gram matrix `<psi_i|psi_j>`, whose nonzero spectrum
//! coincides with that of the mixture, so [`Ensemble`] never forms the dense
//! operator unless asked to. Members are sums of two-factor product vectors,
//! which keeps the four-pulse states of the two-pulse attacks cheap: their
//! inner products factorise.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{BoundsError, Result};
use crate::linalg::{self, eigh_jacobi, hermitian_eigenvalues, Amplitudes, CMatrix};
use crate::scalar::Real;

/// Binary entropy in bits. Arguments within `PROB_SLACK` of `[0, 1]` are clamped.
pub fn binary_entropy<T: Real>(p: T) -> Result<T> {
    let slack = T::c(T::PROB_SLACK);
    if !(p >= -slack && p <= T::one() + slack) {
        return Err(BoundsError::Domain(format!("binary entropy of {p}")));
    }
    Ok(h_clamped(p))
}

/// Binary entropy with the argument clamped to `[0, 1]`.
pub(crate) fn h_clamped<T: Real>(p: T) -> T {
    let p = p.max(T::zero()).min(T::one());
    let q = T::one() - p;
    let term = |x: T| if x > T::zero() { -x * x.log2() } else { T::zero() };
    term(p) + term(q)
}

/// `-sum l log2 l`, clipping eigenvalues in `[-PSD_SLACK, 0]`.
pub fn entropy_of_spectrum<T: Real>(eigenvalues: &[T]) -> Result<T> {
    let slack = T::c(T::PSD_SLACK);
    let mut s = T::zero();
    for &l in eigenvalues {
        if l < -slack {
            return Err(BoundsError::InvalidState(format!(
                "negative eigenvalue {l}"
            )));
        }
        if l > T::zero() {
            s = s - l * l.log2();
        }
    }
    Ok(s.max(T::zero()))
}

/// Holevo quantity of two equiprobable pure states with `|<a|b>| = overlap`.
pub fn pure_pair_chi<T: Real>(overlap: T) -> Result<T> {
    let slack = T::c(T::PROB_SLACK);
    if !(overlap >= -slack && overlap <= T::one() + slack) {
        return Err(BoundsError::Domain(format!("overlap modulus {overlap}")));
    }
    Ok(h_clamped((T::one() + overlap) * T::half()))
}

/// Unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Amplitudes<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amplitudes: Amplitudes<T>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(BoundsError::InvalidState("empty state vector".into()));
        }
        let norm = linalg::norm_sqr(&amplitudes).sqrt();
        if (norm - T::one()).abs() > T::c(T::NORM_TOL) {
            return Err(BoundsError::InvalidState(format!(
                "state vector norm {norm}"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(xs: &[T]) -> Result<Self> {
        Self::new(linalg::real_vec(xs))
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Amplitudes<T>) -> Result<Self> {
        let norm = linalg::norm_sqr(&amplitudes).sqrt();
        if !(norm > T::zero()) {
            return Err(BoundsError::InvalidState("zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Amplitudes<T> {
        self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(BoundsError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        DensityMatrix {
            matrix: CMatrix::from_outer_sum(self.dim(), T::one(), [&self.amplitudes]),
            weight: T::one(),
        }
    }
}

/// Hermitian positive semidefinite operator carrying trace `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
    weight: T,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, positivity and `trace == weight`.
    pub fn new(matrix: CMatrix<T>, weight: T) -> Result<Self> {
        let rho = Self { matrix, weight };
        rho.validate()?;
        Ok(rho)
    }

    /// Builds `sum_i w_i |v_i><v_i|` and records its trace as the weight.
    pub fn from_mixture<'a>(
        dim: usize,
        members: impl IntoIterator<Item = (T, &'a Amplitudes<T>)>,
    ) -> Result<Self> {
        let mut m = CMatrix::zeros(dim);
        for (w, v) in members {
            if v.len() != dim {
                return Err(BoundsError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            m.add_outer(w, v);
        }
        let weight = m.trace().re;
        Self::new(m, weight)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::from_usize(dim).unwrap();
        Self {
            matrix: CMatrix::from_real_diagonal(&vec![w; dim]),
            weight: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.matrix.hermitian_defect();
        if defect > T::c(T::HERMITIAN_TOL) {
            return Err(BoundsError::InvalidState(format!(
                "Hermiticity defect {defect}"
            )));
        }
        if self.weight < T::zero() {
            return Err(BoundsError::InvalidState(format!(
                "negative weight {}",
                self.weight
            )));
        }
        let tr = self.trace();
        if (tr - self.weight).abs() > T::c(T::TRACE_TOL) {
            return Err(BoundsError::InvalidState(format!(
                "trace {tr} differs from weight {}",
                self.weight
            )));
        }
        let min = self.min_eigenvalue();
        if min < -T::c(T::PSD_SLACK) {
            return Err(BoundsError::InvalidState(format!(
                "smallest eigenvalue {min}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or(T::zero())
    }

    /// Rescales to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > T::zero()) {
            return Err(BoundsError::InvalidState(format!(
                "cannot normalise trace {tr}"
            )));
        }
        Ok(Self {
            matrix: self.matrix.scaled(T::one() / tr),
            weight: T::one(),
        })
    }

    /// `a * self + b * other`, weights combined accordingly.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(BoundsError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            matrix: self.matrix.scaled(a).add(&other.matrix.scaled(b)),
            weight: a * self.weight + b * other.weight,
        })
    }

    /// Conjugation `U rho U^dagger`.
    pub fn conjugated(&self, u: &CMatrix<T>) -> Self {
        Self {
            matrix: u.matmul(&self.matrix).matmul(&u.adjoint()),
            weight: self.weight,
        }
    }
}

pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl<T: Real> Tensor for StateVector<T> {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

impl<T: Real> Tensor for DensityMatrix<T> {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
            weight: self.weight * other.weight,
        }
    }
}

pub fn tensor_product<X: Tensor>(a: &X, b: &X) -> X {
    a.tensor(b)
}

/// Von Neumann entropy in bits of a unit-trace state.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    if (rho.weight - T::one()).abs() > T::c(T::TRACE_TOL) {
        return Err(BoundsError::InvalidState(format!(
            "entropy of a state with weight {}",
            rho.weight
        )));
    }
    entropy_of_spectrum(&rho.eigenvalues())
}

/// `S((rho0 + rho1)/2) - S(rho0)/2 - S(rho1)/2` for unit-trace states.
pub fn holevo_binary<T: Real>(rho0: &DensityMatrix<T>, rho1: &DensityMatrix<T>) -> Result<T> {
    if rho0.dim() != rho1.dim() {
        return Err(BoundsError::DimensionMismatch {
            expected: rho0.dim(),
            found: rho1.dim(),
        });
    }
    let s0 = von_neumann_entropy(rho0)?;
    let s1 = von_neumann_entropy(rho1)?;
    let mix = rho0.combine(T::half(), rho1, T::half())?;
    let s = von_neumann_entropy(&mix)?;
    Ok((s - T::half() * (s0 + s1)).max(T::zero()))
}

/// Vector written as `sum_k c_k |a_k> (x) |b_k>`. Single-factor vectors use
/// a one-dimensional right factor.
#[derive(Debug, Clone)]
pub struct ProductSum<T> {
    terms: Vec<(Complex<T>, Amplitudes<T>, Amplitudes<T>)>,
}

impl<T: Real> ProductSum<T> {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn single(v: &[Complex<T>]) -> Self {
        Self::new().with(Complex::one(), v, &[Complex::one()])
    }

    pub fn with(mut self, c: Complex<T>, left: &[Complex<T>], right: &[Complex<T>]) -> Self {
        if let Some((_, l, r)) = self.terms.first() {
            assert!(
                l.len() == left.len() && r.len() == right.len(),
                "product term shape mismatch"
            );
        }
        self.terms.push((c, left.to_vec(), right.to_vec()));
        self
    }

    pub fn dim(&self) -> usize {
        self.terms
            .first()
            .map(|(_, l, r)| l.len() * r.len())
            .unwrap_or(0)
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::zero();
        for (c1, l1, r1) in &self.terms {
            for (c2, l2, r2) in &other.terms {
                acc = acc + c1.conj() * c2 * linalg::inner(l1, l2) * linalg::inner(r1, r2);
            }
        }
        acc
    }

    pub fn dense(&self) -> Amplitudes<T> {
        let mut out = vec![Complex::zero(); self.dim()];
        for (c, l, r) in &self.terms {
            for (o, x) in out.iter_mut().zip(linalg::kron_vec(l, r)) {
                *o = *o + c * x;
            }
        }
        out
    }
}

impl<T: Real> Default for ProductSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Weighted collection of pure vectors representing `sum_i w_i |psi_i><psi_i|`.
#[derive(Debug, Clone, Default)]
pub struct Ensemble<T> {
    members: Vec<(T, ProductSum<T>)>,
}

impl<T: Real> Ensemble<T> {
    pub fn new() -> Self {
        Self {
            members: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: T, state: ProductSum<T>) {
        self.members.push((weight, state));
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members.first().map(|(_, s)| s.dim()).unwrap_or(0)
    }

    /// `G_ij = sqrt(w_i w_j) <psi_i|psi_j>`; same nonzero spectrum as the mixture.
    pub fn weighted_gram(&self) -> CMatrix<T> {
        let n = self.members.len();
        let mut g = CMatrix::zeros(n);
        for i in 0..n {
            let (wi, si) = &self.members[i];
            for j in i..n {
                let (wj, sj) = &self.members[j];
                let z = si.inner(sj) * (*wi * *wj).sqrt();
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        for i in 0..n {
            g[(i, i)] = Complex::new(g[(i, i)].re, T::zero());
        }
        g
    }

    pub fn trace(&self) -> T {
        self.members
            .iter()
            .map(|(w, s)| *w * s.inner(s).re)
            .sum()
    }

    /// Dense operator in the ambient space.
    pub fn density_matrix(&self) -> Result<DensityMatrix<T>> {
        let dense: Vec<(T, Amplitudes<T>)> = self
            .members
            .iter()
            .map(|(w, s)| (*w, s.dense()))
            .collect();
        DensityMatrix::from_mixture(self.dim(), dense.iter().map(|(w, v)| (*w, v)))
    }

    /// Entropy of the mixture after normalising it to unit trace.
    pub fn normalized_entropy(&self) -> Result<T> {
        let g = self.weighted_gram();
        normalized_gram_entropy(&g)
    }
}

fn normalized_gram_entropy<T: Real>(g: &CMatrix<T>) -> Result<T> {
    let tr = g.trace().re;
    if !(tr > T::zero()) {
        return Err(BoundsError::InvalidState(format!("ensemble trace {tr}")));
    }
    let vals: Vec<T> = hermitian_eigenvalues(g).into_iter().map(|l| l / tr).collect();
    entropy_of_spectrum(&vals)
}

/// Holevo quantity between the two ensembles, each normalised to unit trace
/// and mixed with equal priors.
pub fn holevo_ensembles<T: Real>(e0: &Ensemble<T>, e1: &Ensemble<T>) -> Result<T> {
    if e0.dim() != e1.dim() {
        return Err(BoundsError::DimensionMismatch {
            expected: e0.dim(),
            found: e1.dim(),
        });
    }
    let g0 = e0.weighted_gram();
    let g1 = e1.weighted_gram();
    let t0 = g0.trace().re;
    let t1 = g1.trace().re;
    if !(t0 > T::zero() && t1 > T::zero()) {
        return Err(BoundsError::InvalidState(format!(
            "ensemble traces {t0}, {t1}"
        )));
    }
    let s0 = normalized_gram_entropy(&g0)?;
    let s1 = normalized_gram_entropy(&g1)?;

    let (n0, n1) = (e0.len(), e1.len());
    let scale: Vec<T> = std::iter::repeat_n((T::half() / t0).sqrt(), n0)
        .chain(std::iter::repeat_n((T::half() / t1).sqrt(), n1))
        .collect();
    let all: Vec<(&T, &ProductSum<T>)> = e0
        .members
        .iter()
        .chain(&e1.members)
        .map(|(w, s)| (w, s))
        .collect();
    let n = n0 + n1;
    let mut g = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = if i < n0 && j < n0 {
                g0[(i, j)]
            } else if i >= n0 && j >= n0 {
                g1[(i - n0, j - n0)]
            } else {
                all[i].1.inner(all[j].1) * (*all[i].0 * *all[j].0).sqrt()
            } * (scale[i] * scale[j]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    let s = normalized_gram_entropy(&g)?;
    Ok((s - T::half() * (s0 + s1)).max(T::zero()))
}

/// Pairwise inner-product requirements on a list of named unit vectors.
#[derive(Debug, Clone)]
pub struct GramSpec<T> {
    labels: Vec<String>,
    target: Vec<Vec<Option<Complex<T>>>>,
}

impl<T: Real> GramSpec<T> {
    /// `target[i][j] = None` leaves the entry free. The diagonal must be 1
    /// and constrained entries must be Hermitian-consistent.
    pub fn new(labels: Vec<String>, target: Vec<Vec<Option<Complex<T>>>>) -> Result<Self> {
        let n = labels.len();
        if target.len() != n || target.iter().any(|row| row.len() != n) {
            return Err(BoundsError::DimensionMismatch {
                expected: n,
                found: target.len(),
            });
        }
        let tol = T::c(T::HERMITIAN_TOL);
        for i in 0..n {
            match target[i][i] {
                Some(d) if (d - Complex::one()).norm() <= tol => {}
                _ => {
                    return Err(BoundsError::InvalidConfig(format!(
                        "diagonal entry of '{}' must be 1",
                        labels[i]
                    )))
                }
            }
            for j in (i + 1)..n {
                if let (Some(a), Some(b)) = (target[i][j], target[j][i]) {
                    if (a - b.conj()).norm() > tol {
                        return Err(BoundsError::InvalidConfig(format!(
                            "entries ({}, {}) are not conjugate",
                            labels[i], labels[j]
                        )));
                    }
                }
            }
        }
        Ok(Self { labels, target })
    }

    /// Fully constrained specification from a Hermitian matrix.
    pub fn from_matrix(labels: Vec<String>, m: &CMatrix<T>) -> Result<Self> {
        let n = m.dim();
        let target = (0..n)
            .map(|i| (0..n).map(|j| Some(m[(i, j)])).collect())
            .collect();
        Self::new(labels, target)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<Complex<T>> {
        self.target[i][j].or_else(|| self.target[j][i].map(|z| z.conj()))
    }

    /// Gram matrix with free entries set to zero.
    pub fn completed(&self) -> CMatrix<T> {
        let n = self.labels.len();
        CMatrix::from_fn(n, |i, j| self.entry(i, j).unwrap_or_else(Complex::zero))
    }
}

/// Realises a Gram specification with vectors of minimal dimension.
///
/// Free entries are completed with zero before factorising; the returned
/// vectors reproduce every constrained entry.
pub fn gram_embed<T: Real>(spec: &GramSpec<T>) -> Result<Vec<StateVector<T>>> {
    let g = spec.completed();
    let n = g.dim();
    let (vals, vecs) = eigh_jacobi(&g);
    if let Some(&min) = vals.first() {
        if min < -T::c(T::PSD_SLACK) {
            return Err(BoundsError::Infeasible(format!(
                "Gram matrix has eigenvalue {min}"
            )));
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&k| vals[k] > T::c(T::RANK_TOL)).collect();
    if keep.is_empty() {
        return Err(BoundsError::Infeasible("Gram matrix of rank zero".into()));
    }
    (0..n)
        .map(|j| {
            let amps: Amplitudes<T> = keep
                .iter()
                .rev()
                .map(|&k| vecs[(j, k)].conj() * vals[k].sqrt())
                .collect();
            StateVector::normalized(amps)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> StateVector<f64> {
        let amps = (0..dim)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        StateVector::normalized(amps).unwrap()
    }

    fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        let mut h = CMatrix::zeros(dim);
        for i in 0..dim {
            h[(i, i)] = c(rng.gen_range(-1.0..1.0));
            for j in (i + 1)..dim {
                let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let (_, u) = eigh_jacobi(&h);
        u
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0f64).unwrap(), 0.0);
        assert!((binary_entropy(0.5f64).unwrap() - 1.0).abs() < 1e-15);
        let p: f64 = 0.1838;
        let direct = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((binary_entropy(p).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(p).unwrap() - 0.6884).abs() < 1e-3);
        assert_eq!(binary_entropy(1.0 + 5e-13).unwrap(), 0.0);
        assert!(binary_entropy(1.0 + 1e-9).is_err());
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn von_neumann_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [1, 3, 6] {
            let v = random_unit(dim, &mut rng);
            assert!(von_neumann_entropy(&v.projector()).unwrap().abs() < 1e-10);
        }
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-14);
        let diag = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.75, 0.25]), 1.0).unwrap();
        let s = von_neumann_entropy(&diag).unwrap();
        assert!((s - binary_entropy(0.25f64).unwrap()).abs() < 1e-12);
        assert!((s - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn invalid_states_are_rejected() {
        let bad = CMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(bad, 1.0).is_err());
        let mut skew = CMatrix::<f64>::identity(2).scaled(0.5);
        skew[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(skew, 1.0).is_err());
        let half = DensityMatrix::new(CMatrix::<f64>::identity(2).scaled(0.25), 0.5).unwrap();
        assert!(von_neumann_entropy(&half).is_err());
        assert!(StateVector::from_real(&[1.0, 0.1]).is_err());
    }

    #[test]
    fn holevo_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_unit(3, &mut rng).projector();
        assert!(holevo_binary(&a, &a).unwrap().abs() < 1e-10);
        let e0 = StateVector::<f64>::from_real(&[1.0, 0.0]).unwrap().projector();
        let e1 = StateVector::from_real(&[0.0, 1.0]).unwrap().projector();
        assert!((holevo_binary(&e0, &e1).unwrap() - 1.0).abs() < 1e-12);

        let overlap: f64 = 0.6324;
        let b = StateVector::from_real(&[overlap, (1.0 - overlap * overlap).sqrt()]).unwrap();
        let chi = holevo_binary(&e0, &b.projector()).unwrap();
        assert!((chi - pure_pair_chi(overlap).unwrap()).abs() < 1e-10);
        assert!((chi - 0.6884).abs() < 1e-4);
        let three = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(holevo_binary(&e0, &three).is_err());
    }

    #[test]
    fn pure_pair_chi_examples() {
        assert!(pure_pair_chi(1.0f64).unwrap().abs() < 1e-15);
        assert!((pure_pair_chi(0.0f64).unwrap() - 1.0).abs() < 1e-15);
        let c = (-0.4583f64).exp();
        assert!((pure_pair_chi(c).unwrap() - 0.6884).abs() < 1e-4);
        assert!(pure_pair_chi(1.5).is_err());
    }

    #[test]
    fn holevo_matches_pure_pair_on_random_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e0 = StateVector::<f64>::from_real(&[1.0, 0.0]).unwrap().projector();
        for _ in 0..100 {
            let c: f64 = rng.gen_range(0.0..=1.0);
            let phase = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let b = StateVector::new(vec![phase * c, c_re((1.0 - c * c).max(0.0).sqrt())]).unwrap();
            let chi = holevo_binary(&e0, &b.projector()).unwrap();
            assert!((chi - pure_pair_chi(c).unwrap()).abs() < 1e-10, "c={c}");
        }
    }

    fn c_re(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let vs: Vec<_> = (0..3).map(|_| random_unit(4, &mut rng).into_amplitudes()).collect();
            let rho = DensityMatrix::from_mixture(4, vs.iter().map(|v| (1.0 / 3.0, v))).unwrap();
            let u = random_unitary(4, &mut rng);
            let s1 = von_neumann_entropy(&rho).unwrap();
            let s2 = von_neumann_entropy(&rho.conjugated(&u)).unwrap();
            assert!((s1 - s2).abs() < 1e-9);
        }
    }

    #[test]
    fn ensemble_entropy_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut e0 = Ensemble::new();
        let mut e1 = Ensemble::new();
        for k in 0..6 {
            let a = random_unit(3, &mut rng).into_amplitudes();
            let b = random_unit(3, &mut rng).into_amplitudes();
            let cpart = random_unit(3, &mut rng).into_amplitudes();
            let d = random_unit(3, &mut rng).into_amplitudes();
            let psi = ProductSum::new()
                .with(c(1.0), &a, &b)
                .with(c(-1.0), &cpart, &d);
            if k % 2 == 0 {
                e0.push(0.125, psi);
            } else {
                e1.push(0.25, psi);
            }
        }
        let r0 = e0.density_matrix().unwrap().normalized().unwrap();
        let r1 = e1.density_matrix().unwrap().normalized().unwrap();
        assert!((e0.trace() - e0.density_matrix().unwrap().trace()).abs() < 1e-12);
        let dense = holevo_binary(&r0, &r1).unwrap();
        let gram = holevo_ensembles(&e0, &e1).unwrap();
        assert!((dense - gram).abs() < 1e-10, "{dense} vs {gram}");
        let s = e0.normalized_entropy().unwrap();
        assert!((s - von_neumann_entropy(&r0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn gram_embed_examples() {
        let labels = |n: usize| (0..n).map(|i| format!("s{i}")).collect::<Vec<_>>();
        let id = GramSpec::from_matrix(labels(3), &CMatrix::<f64>::identity(3)).unwrap();
        let vs = gram_embed(&id).unwrap();
        assert_eq!(vs[0].dim(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vs[i].inner(&vs[j]).unwrap() - c(want)).norm() < 1e-10);
            }
        }

        let gamma = (-0.3f64).exp();
        let m = CMatrix::from_fn(2, |i, j| c(if i == j { 1.0 } else { gamma }));
        let vs = gram_embed(&GramSpec::from_matrix(labels(2), &m).unwrap()).unwrap();
        assert_eq!(vs[0].dim(), 2);
        let a = ((1.0 + gamma) / 2.0).sqrt();
        let b = ((1.0 - gamma) / 2.0).sqrt();
        // Up to a unitary, the pair is (a, b) and (a, -b): first components agree
        // in modulus with the symmetric/antisymmetric split.
        let mut comps: Vec<f64> = vs[0].amplitudes().iter().map(|z| z.norm()).collect();
        comps.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((comps[0] - b).abs() < 1e-10 && (comps[1] - a).abs() < 1e-10);
        assert!((vs[0].inner(&vs[1]).unwrap() - c(gamma)).norm() < 1e-10);

        let ones = CMatrix::from_fn(2, |_, _| c(1.0));
        let vs = gram_embed(&GramSpec::from_matrix(labels(2), &ones).unwrap()).unwrap();
        assert_eq!(vs[0].dim(), 1);
        assert!((vs[0].inner(&vs[1]).unwrap() - c(1.0)).norm() < 1e-10);

        let bad = CMatrix::from_fn(3, |i, j| c(if i == j { 1.0 } else { -0.9 }));
        assert!(matches!(
            gram_embed(&GramSpec::from_matrix(labels(3), &bad).unwrap()),
            Err(BoundsError::Infeasible(_))
        ));
    }

    #[test]
    fn gram_spec_free_entries_are_zero_completed() {
        let spec = GramSpec::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![Some(c(1.0)), Some(c(0.5)), None],
                vec![None, Some(c(1.0)), Some(c(0.5))],
                vec![None, None, Some(c(1.0))],
            ],
        )
        .unwrap();
        let vs = gram_embed(&spec).unwrap();
        assert!((vs[0].inner(&vs[1]).unwrap() - c(0.5)).norm() < 1e-10);
        assert!((vs[1].inner(&vs[2]).unwrap() - c(0.5)).norm() < 1e-10);
        assert!(vs[0].inner(&vs[2]).unwrap().norm() < 1e-10);
        let bad_diag = GramSpec::<f64>::new(vec!["a".into()], vec![vec![Some(c(0.9))]]);
        assert!(bad_diag.is_err());
    }

    #[test]
    fn gram_embed_reproduces_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let rank = rng.gen_range(1..=n);
            let vs: Vec<_> = (0..n).map(|_| random_unit(rank, &mut rng)).collect();
            let m = CMatrix::from_fn(n, |i, j| vs[i].inner(&vs[j]).unwrap());
            let labels = (0..n).map(|i| i.to_string()).collect();
            let out = gram_embed(&GramSpec::from_matrix(labels, &m).unwrap()).unwrap();
            assert!(out[0].dim() <= rank);
            for i in 0..n {
                for j in 0..n {
                    let got = out[i].inner(&out[j]).unwrap();
                    assert!((got - m[(i, j)]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn tensor_product_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (a, b, cc, d) = (
            random_unit(2, &mut rng),
            random_unit(3, &mut rng),
            random_unit(2, &mut rng),
            random_unit(3, &mut rng),
        );
        let ab = tensor_product(&a, &b);
        assert_eq!(ab.dim(), 6);
        assert!((linalg::norm_sqr(ab.amplitudes()) - 1.0).abs() < 1e-12);
        let lhs = ab.inner(&tensor_product(&cc, &d)).unwrap();
        let rhs = a.inner(&cc).unwrap() * b.inner(&d).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        let rho = DensityMatrix::<f64>::maximally_mixed(2).combine(0.5, &a.projector(), 0.0).unwrap();
        let sigma = b.projector();
        let t = tensor_product(&rho, &sigma);
        assert!((t.trace() - rho.trace() * sigma.trace()).abs() < 1e-12);
        assert!((t.weight() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn f32_entropy() {
        let rho = DensityMatrix::<f32>::new(CMatrix::from_real_diagonal(&[0.75, 0.25]), 1.0).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - 0.811_278).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn binary_entropy_symmetric_and_bounded(p in 0.0f64..=1.0) {
            let a = binary_entropy(p).unwrap();
            let b = binary_entropy(1.0 - p).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn pure_pair_chi_monotone(x in 0.0f64..1.0, dx in 0.0f64..0.5) {
            let y = (x + dx).min(1.0);
            prop_assert!(pure_pair_chi(y).unwrap() <= pure_pair_chi(x).unwrap() + 1e-15);
        }

        #[test]
        fn holevo_bounded(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vs: Vec<_> = (0..4).map(|_| random_unit(3, &mut rng).into_amplitudes()).collect();
            let r0 = DensityMatrix::from_mixture(3, vs[..2].iter().map(|v| (0.5, v))).unwrap();
            let r1 = DensityMatrix::from_mixture(3, vs[2..].iter().map(|v| (0.5, v))).unwrap();
            let chi = holevo_binary(&r0, &r1).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&chi));
        }
    }
}
