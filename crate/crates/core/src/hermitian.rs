//! Small dense complex Hermitian matrices, their spectra, and elementary
//! symmetric polynomials of eigenvalues (plain and polarized).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute Hermitian tolerance for matrices assembled from finite differences.
pub const FD_HERMITIAN_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-13;

/// An `n x n` complex Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a matrix and checks `a[j][k] == conj(a[k][j])` within `tolerance`.
    ///
    /// Pass `0.0` for analytically assembled matrices.
    pub fn new(dim: usize, entries: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let m = Self { dim, entries };
        let asym = m.max_asymmetry();
        if asym > tolerance {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
                tolerance,
            });
        }
        Ok(m)
    }

    /// Averages an arbitrary square matrix with its conjugate transpose.
    ///
    /// Returns the Hermitian part together with the max asymmetry of the input.
    pub fn symmetrize(dim: usize, entries: Vec<Complex64>) -> Result<(Self, f64)> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let raw = Self { dim, entries };
        let defect = raw.max_asymmetry();
        let mut out = raw.entries.clone();
        for j in 0..dim {
            for k in 0..dim {
                out[j * dim + k] = (raw.get(j, k) + raw.get(k, j).conj()) * 0.5;
            }
        }
        Ok((Self { dim, entries: out }, defect))
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(*v, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self.get(j, k) - self.get(k, j).conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Determinant via Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap_or(col);
            if a[pivot * n + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for c in 0..n {
                    a.swap(pivot * n + c, col * n + c);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in (col + 1)..n {
                let f = a[r * n + col] / d;
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] -= f * v;
                }
            }
        }
        det
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    s += self.get(j, k).norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// Real eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts `values` ascending.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl AsRef<[f64]> for Spectrum {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `a[p][q]` with a
/// diagonal unitary and then applies a real Givens rotation, so the
/// combined transform is unitary and the diagonal stays real.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<Spectrum> {
    let asym = m.max_asymmetry();
    if asym > FD_HERMITIAN_TOL * (1.0 + m.frobenius_norm()) {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
            tolerance: FD_HERMITIAN_TOL,
        });
    }
    let n = m.dim;
    let mut a = m.clone();
    for i in 0..n {
        let d = a.entries[i * n + i].re;
        a.entries[i * n + i] = Complex64::new(d, 0.0);
    }
    let threshold = JACOBI_REL_TOL * (1.0 + m.frobenius_norm());

    for _sweep in 0..MAX_SWEEPS {
        if a.off_diagonal_norm() < threshold {
            return Ok(Spectrum::from_unsorted(
                (0..n).map(|i| a.entries[i * n + i].re).collect(),
            ));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }
    let residual = a.off_diagonal_norm();
    if residual < threshold {
        return Ok(Spectrum::from_unsorted(
            (0..n).map(|i| a.entries[i * n + i].re).collect(),
        ));
    }
    Err(Error::NotConverged {
        sweeps: MAX_SWEEPS,
        residual,
    })
}

fn rotate(a: &mut HermitianMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.entries[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a.entries[p * n + p].re;
    let aqq = a.entries[q * n + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = D * G with D = diag(.., conj(phase) at q, ..) and G the real rotation.
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    // A <- A U
    for k in 0..n {
        let akp = a.entries[k * n + p];
        let akq = a.entries[k * n + q];
        a.entries[k * n + p] = akp * upp + akq * uqp;
        a.entries[k * n + q] = akp * upq + akq * uqq;
    }
    // A <- U^H A
    for k in 0..n {
        let apk = a.entries[p * n + k];
        let aqk = a.entries[q * n + k];
        a.entries[p * n + k] = upp.conj() * apk + uqp.conj() * aqk;
        a.entries[q * n + k] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a.entries[p * n + q] = Complex64::new(0.0, 0.0);
    a.entries[q * n + p] = Complex64::new(0.0, 0.0);
    let dp = a.entries[p * n + p].re;
    let dq = a.entries[q * n + q].re;
    a.entries[p * n + p] = Complex64::new(dp, 0.0);
    a.entries[q * n + q] = Complex64::new(dq, 0.0);
}

/// All elementary symmetric polynomials `e_0..=e_n` of `values`.
///
/// One pass of the coefficient recursion `e_k <- e_k + x * e_{k-1}`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// `sigma_k` of the given eigenvalues; `sigma_0 = 1`.
pub fn sigma(k: usize, values: &[f64]) -> Result<f64> {
    let n = values.len();
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    Ok(elementary_symmetric(values)[k])
}

/// Polarization of `sigma_m`: the symmetric multilinear form whose diagonal
/// is `sigma_m`.
///
/// The `m` eigenvalue vectors must be expressed in a common eigenbasis
/// (simultaneously diagonalizable Hessians); they are *not* sorted here.
pub fn polarized_sigma(vectors: &[&[f64]]) -> Result<f64> {
    let m = vectors.len();
    if m == 0 {
        return Err(Error::InvalidParameters(
            "polarized sigma needs at least one argument".into(),
        ));
    }
    let n = vectors[0].len();
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    if m > n {
        return Err(Error::IndexOutOfRange { k: m, n });
    }
    // Inclusion-exclusion over subsets S of the m slots.
    let mut total = 0.0;
    let mut sum = vec![0.0; n];
    for mask in 1u32..(1u32 << m) {
        sum.iter_mut().for_each(|x| *x = 0.0);
        for (i, v) in vectors.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (acc, x) in sum.iter_mut().zip(v.iter()) {
                    *acc += x;
                }
            }
        }
        let sign = if (m - mask.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += sign * elementary_symmetric(&sum)[m];
    }
    let m_factorial: f64 = (1..=m).map(|i| i as f64).product();
    Ok(total / m_factorial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let mut e = vec![c(0.0, 0.0); n * n];
        for j in 0..n {
            e[j * n + j] = c(rng.random_range(-2.0..2.0), 0.0);
            for k in (j + 1)..n {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                e[j * n + k] = z;
                e[k * n + j] = z.conj();
            }
        }
        HermitianMatrix::new(n, e, 0.0).unwrap()
    }

    fn subset_sigma(k: usize, x: &[f64]) -> f64 {
        let n = x.len();
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| {
                (0..n)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| x[i])
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        let s = eigenvalues(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
        let s = eigenvalues(&HermitianMatrix::diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(s.values(), &[-1.0, 2.0]);
    }

    #[test]
    fn two_by_two_with_imaginary_coupling() {
        // characteristic polynomial l^2 - 2l = 0
        let m = HermitianMatrix::new(
            2,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)],
            0.0,
        )
        .unwrap();
        let s = eigenvalues(&m).unwrap();
        assert!((s.values()[0] - 0.0).abs() < 1e-14);
        assert!((s.values()[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianMatrix::new(
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            0.0,
        )
        .unwrap_err();
        match err {
            Error::NotHermitian { max_asymmetry, .. } => assert_eq!(max_asymmetry, 1.0),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(2, &[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(sigma(2, &[1.0, 2.0, 3.0]).unwrap(), 11.0);
        assert_eq!(sigma(0, &[4.0, -7.0]).unwrap(), 1.0);
        assert!(matches!(
            sigma(3, &[1.0, 2.0]),
            Err(Error::IndexOutOfRange { k: 3, n: 2 })
        ));
    }

    #[test]
    fn sigma_of_ones_is_binomial() {
        for n in 0..=8usize {
            let ones = vec![1.0; n];
            let mut binom = 1.0;
            for k in 0..=n {
                assert_eq!(sigma(k, &ones).unwrap(), binom, "n={n} k={k}");
                binom = binom * (n - k) as f64 / (k + 1) as f64;
            }
        }
    }

    #[test]
    fn polarized_examples() {
        assert_eq!(polarized_sigma(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap(), 1.0);
        assert_eq!(polarized_sigma(&[&[3.0, 4.0]]).unwrap(), 7.0);
        assert_eq!(polarized_sigma(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap(), 0.5);
        assert!(polarized_sigma(&[&[1.0, 0.0], &[0.0, 1.0, 2.0]]).is_err());
    }

    #[test]
    fn random_spectra_reconstruct_trace_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            for _ in 0..10 {
                let m = random_hermitian(n, &mut rng);
                let s = eigenvalues(&m).unwrap();
                let tr = m.trace();
                assert!((s.sum() - tr).abs() <= 1e-10 * tr.abs().max(1.0));
                let det = m.determinant();
                assert!(det.im.abs() < 1e-10 * det.norm().max(1.0));
                let sn = sigma(n, s.values()).unwrap();
                assert!(
                    (sn - det.re).abs() <= 1e-8 * det.re.abs().max(1.0),
                    "n={n}: {sn} vs {}",
                    det.re
                );
            }
        }
    }

    proptest! {
        #[test]
        fn sigma_matches_subset_expansion(x in prop::collection::vec(-3.0f64..3.0, 1..7), k in 0usize..7) {
            prop_assume!(k <= x.len());
            let fast = sigma(k, &x).unwrap();
            let slow = subset_sigma(k, &x);
            prop_assert!((fast - slow).abs() <= 1e-10 * (1.0 + slow.abs()));
        }

        #[test]
        fn polarization_is_symmetric_and_multilinear(
            a in prop::collection::vec(-2.0f64..2.0, 3),
            b in prop::collection::vec(-2.0f64..2.0, 3),
            d in prop::collection::vec(-2.0f64..2.0, 3),
            e in prop::collection::vec(-2.0f64..2.0, 3),
            s in -3.0f64..3.0,
        ) {
            let tol = |x: f64| 1e-10 * (1.0 + x.abs());
            let abd = polarized_sigma(&[&a, &b, &d]).unwrap();
            for perm in [[&b, &a, &d], [&d, &b, &a], [&a, &d, &b]] {
                let v = polarized_sigma(&[perm[0], perm[1], perm[2]]).unwrap();
                prop_assert!((v - abd).abs() <= tol(abd));
            }
            let combo: Vec<f64> = a.iter().zip(&e).map(|(x, y)| s * x + y).collect();
            let lhs = polarized_sigma(&[&combo, &b, &d]).unwrap();
            let rhs = s * abd + polarized_sigma(&[&e, &b, &d]).unwrap();
            prop_assert!((lhs - rhs).abs() <= tol(rhs) * 10.0);
            let diag = polarized_sigma(&[&a, &a, &a]).unwrap();
            let direct = sigma(3, &a).unwrap();
            prop_assert!((diag - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }
}
