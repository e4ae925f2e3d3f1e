//! Small dense complex linear algebra.
//!
//! Two Hermitian eigensolvers live here: a cyclic Jacobi method that also
//! returns eigenvectors (used for Gram embeddings and explicit checks), and a
//! Householder tridiagonalisation followed by implicit QL that returns
//! eigenvalues only (used on the hot path of every entropy evaluation).
//! Complex Hermitian input to the QL path goes through the real symmetric
//! embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is the original one with
//! every eigenvalue doubled.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Complex amplitude vector, not necessarily normalised.
pub type Amplitudes<T> = Vec<Complex<T>>;

/// `<a|b>` with the physics convention (antilinear in the first slot).
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Amplitudes<T> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// `alpha * a + beta * b`
pub fn axpby<T: Real>(
    alpha: Complex<T>,
    a: &[Complex<T>],
    beta: Complex<T>,
    b: &[Complex<T>],
) -> Amplitudes<T> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

pub fn real_vec<T: Real>(xs: &[T]) -> Amplitudes<T> {
    xs.iter().map(|&x| Complex::new(x, T::zero())).collect()
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// `sum_i |v_i><v_i|` scaled by `weight`.
    pub fn from_outer_sum<'a>(
        n: usize,
        weight: T,
        vectors: impl IntoIterator<Item = &'a Amplitudes<T>>,
    ) -> Self {
        let mut m = Self::zeros(n);
        for v in vectors {
            m.add_outer(weight, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `self += w |v><v|`
    pub fn add_outer(&mut self, w: T, v: &[Complex<T>]) {
        assert_eq!(v.len(), self.n, "outer product dimension");
        for i in 0..self.n {
            let vi = v[i] * w;
            for (j, vj) in v.iter().enumerate() {
                self.data[i * self.n + j] = self.data[i * self.n + j] + vi * vj.conj();
            }
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.n, other.n);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `max_ij |A_ij - conj(A_ji)|`
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_imag(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.im.abs()))
    }

    pub fn column(&self, j: usize) -> Amplitudes<T> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()))
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of a unitary matrix. Only the Hermitian part of `h` is used.
pub fn eigh_jacobi<T: Real>(h: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = h.dim();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
    }
    let mut v = CMatrix::identity(n);
    let scale = a
        .data
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<T>()
        .sqrt()
        .max(T::min_positive_value());
    let eps = T::epsilon();

    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= eps * eps * scale {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (T::two() * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // U = D R with D = diag(.., 1, .., conj(phase), ..) and R the real rotation.
                let upp = Complex::new(c, T::zero());
                let upq = Complex::new(s, T::zero());
                let uqp = phase.conj() * (-s);
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a real symmetric matrix (row-major, `n x n`), ascending.
///
/// Householder reduction to tridiagonal form followed by the implicit QL
/// algorithm with Wilkinson-style shifts. The input buffer is overwritten.
pub fn symmetric_eigenvalues<T: Real>(a: &mut [T], n: usize) -> Vec<T> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[0]];
    }
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let at = |i: usize, j: usize| i * n + j;

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale: T = (0..=l).map(|k| a[at(i, k)].abs()).sum();
            if scale == T::zero() {
                e[i] = a[at(i, l)];
            } else {
                for k in 0..=l {
                    a[at(i, k)] = a[at(i, k)] / scale;
                    h = h + a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                a[at(i, l)] = f - g;
                let mut f = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g = g + a[at(j, k)] * a[at(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g = g + a[at(k, j)] * a[at(i, k)];
                    }
                    e[j] = g / h;
                    f = f + e[j] * a[at(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[at(j, k)] = a[at(j, k)] - (f * e[k] + g * a[at(i, k)]);
                    }
                }
            }
        } else {
            e[i] = a[at(i, l)];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[at(i, i)];
    }

    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d
}

/// Implicit QL on a symmetric tridiagonal matrix. `d` holds the diagonal,
/// `e[1..]` the sub-diagonal (as produced by the Householder stage).
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (T::two() * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m as isize - 1;
            let mut underflow = false;
            while i >= l as isize {
                let iu = i as usize;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == T::zero() {
                    d[iu + 1] = d[iu + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + T::two() * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                i -= 1;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending, via the QL path.
pub fn hermitian_eigenvalues<T: Real>(h: &CMatrix<T>) -> Vec<T> {
    let n = h.dim();
    if h.max_imag() == T::zero() {
        let mut a: Vec<T> = (0..n * n).map(|k| h.data[k].re).collect();
        return symmetric_eigenvalues(&mut a, n);
    }
    let m = 2 * n;
    let mut a = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(&mut a, m);
    doubled.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng, complex: bool) -> CMatrix<f64> {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
                let z = Complex::new(rng.gen_range(-1.0..1.0), im);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 9] {
            let h = random_hermitian(n, &mut rng, true);
            let (vals, vecs) = eigh_jacobi(&h);
            let rebuilt = vecs
                .matmul(&CMatrix::from_real_diagonal(&vals))
                .matmul(&vecs.adjoint());
            assert!(rebuilt.max_abs_diff(&h) < 1e-12, "n={n}");
            let gram = vecs.adjoint().matmul(&vecs);
            assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn ql_agrees_with_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 4, 8, 17, 32] {
            for complex in [false, true] {
                let h = random_hermitian(n, &mut rng, complex);
                let (jac, _) = eigh_jacobi(&h);
                let ql = hermitian_eigenvalues(&h);
                for (a, b) in jac.iter().zip(&ql) {
                    assert!((a - b).abs() < 1e-11, "n={n} complex={complex}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn ql_handles_degenerate_and_diagonal() {
        let mut a: Vec<f64> = vec![2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, -1.0];
        assert_eq!(symmetric_eigenvalues(&mut a, 3), vec![-1.0, 2.0, 2.0]);
        let rank_one = CMatrix::from_outer_sum(4, 1.0f64, [&real_vec(&[0.5, 0.5, 0.5, 0.5])]);
        let vals = hermitian_eigenvalues(&rank_one);
        assert!((vals[3] - 1.0).abs() < 1e-14);
        assert!(vals[..3].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn kron_inner_factorises() {
        let a = vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)];
        let b = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        let c = vec![Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)];
        let d = vec![Complex::new(0.6, 0.0), Complex::new(0.8, 0.0)];
        let lhs = inner(&kron_vec(&a, &b), &kron_vec(&c, &d));
        let rhs = inner(&a, &c) * inner(&b, &d);
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn f32_eigenvalues() {
        let mut a: Vec<f32> = vec![2.0, 1.0, 1.0, 2.0];
        let vals = symmetric_eigenvalues(&mut a, 2);
        assert!((vals[0] - 1.0).abs() < 1e-6 && (vals[1] - 3.0).abs() < 1e-6);
    }
}
