//! Hermitian matrices, their spectral decomposition, functional calculus and
//! the positive semidefinite order.
//!
//! Every operator that appears in an inequality check is a [`HermitianMatrix`].
//! The eigensolver is a cyclic complex Jacobi method: each rotation first
//! removes the phase of the pivot `a_pq` with a diagonal unitary, then applies
//! the usual real symmetric rotation. It is slow (O(n³) per sweep) but
//! unconditionally stable and deterministic, which is all the checks need at
//! n ≤ 64.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::matrix::{vector_norm, Matrix};

/// Sweep budget for the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;
/// Convergence when off-diagonal Frobenius mass falls below this times `‖A‖_F`.
pub const JACOBI_TOL: f64 = 1e-14;
/// Relative tolerance used when validating Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative factor of the default PSD tolerance, `1e-9 · (1 + ‖A‖₂)`.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: Matrix,
}

impl HermitianMatrix {
    /// Validates `m` as Hermitian within `1e-12 · (1 + max|entry|)` and
    /// symmetrizes it exactly by averaging with its adjoint.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(Error::Shape("Hermitian matrix must have n >= 1".into()));
        }
        let n = m.rows();
        let tolerance = HERMITIAN_TOL * (1.0 + m.max_abs());
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if defect > tolerance || defect.is_nan() {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages `m` with its adjoint without validating. Internal products
    /// that are Hermitian in exact arithmetic go through here.
    pub(crate) fn symmetrized(m: Matrix) -> Self {
        debug_assert!(m.is_square());
        let n = m.rows();
        let inner = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Self { inner }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_real_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: Matrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: Matrix::zeros(n, n),
        }
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn diag(values: &[f64]) -> Self {
        Self {
            inner: Matrix::diag_real(values),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn add(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(Self::symmetrized(self.inner.try_add(&rhs.inner)?))
    }

    pub fn sub(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(Self::symmetrized(self.inner.try_sub(&rhs.inner)?))
    }

    /// `A + c·I`
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.inner.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c;
        }
        Self { inner: m }
    }

    /// `A·A`
    pub fn square(&self) -> Self {
        Self::symmetrized(&self.inner * &self.inner)
    }

    /// `C* A C` for a (possibly rectangular) `C` with `rows(C) = dim(A)`.
    pub fn congruence(&self, c: &Matrix) -> Result<Self> {
        let ac = self.inner.matmul(c)?;
        Ok(Self::symmetrized(c.adjoint().matmul(&ac)?))
    }

    /// `B A B` for Hermitian `B`.
    pub fn sandwich(&self, b: &HermitianMatrix) -> Result<Self> {
        self.congruence(&b.inner)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    /// Spectral norm `max |λᵢ|`.
    pub fn spectral_norm(&self) -> Result<f64> {
        let s = self.eigh()?;
        Ok(s.eigenvalues.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs())))
    }

    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        Self {
            inner: self.inner.principal_submatrix(keep),
        }
    }

    pub fn direct_sum(blocks: &[&HermitianMatrix]) -> Self {
        let ms: Vec<&Matrix> = blocks.iter().map(|b| &b.inner).collect();
        Self {
            inner: Matrix::direct_sum(&ms),
        }
    }

    /// Rayleigh quotient `x* A x / x* x`.
    pub fn rayleigh(&self, x: &[Complex64]) -> f64 {
        let n = self.dim();
        let mut num = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                row += self.inner[(i, j)] * xj;
            }
            num += x[i].conj() * row;
        }
        num.re / vector_norm(x).powi(2)
    }

    /// Spectral decomposition `A = U Λ U*`, eigenvalues ascending.
    pub fn eigh(&self) -> Result<Spectrum> {
        eigh(self)
    }

    /// `U f(Λ) U*`, with eigenvalues snapped onto closed endpoints of `domain`
    /// when they sit within [`crate::domain::DOMAIN_SNAP`] outside it.
    pub fn apply_on_domain(&self, label: &str, domain: &Interval, f: impl Fn(f64) -> f64) -> Result<Self> {
        let spec = self.eigh()?;
        let mut mapped = Vec::with_capacity(spec.eigenvalues.len());
        for &l in &spec.eigenvalues {
            let t = domain.snap(l).ok_or_else(|| Error::Domain {
                function: label.to_string(),
                eigenvalue: l,
                domain: domain.to_string(),
            })?;
            mapped.push(f(t));
        }
        Ok(spec.recompose(&mapped))
    }

    /// `A^p` for PSD `A` (principal power on `[0, ∞)`).
    pub fn power(&self, p: f64) -> Result<Self> {
        let domain = if p > 0.0 {
            Interval::nonnegative()
        } else {
            Interval::positive()
        };
        self.apply_on_domain("power", &domain, |t| if p == 0.0 { 1.0 } else { t.powf(p) })
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.apply_on_domain("sqrt", &Interval::nonnegative(), f64::sqrt)
    }

    /// Default PSD tolerance `1e-9 · (1 + ‖A‖₂)`.
    pub fn default_tolerance(&self) -> Result<f64> {
        Ok(DEFAULT_PSD_TOL * (1.0 + self.spectral_norm()?))
    }
}

/// Eigenvalues (ascending) and a unitary matrix whose columns are the
/// corresponding orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub sweeps: usize,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("n >= 1")
    }

    /// `U diag(values) U*`.
    pub fn recompose(&self, values: &[f64]) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let n = u.rows();
        let mut out = Matrix::zeros(n, n);
        for (k, &v) in values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * v;
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::symmetrized(out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.recompose(&self.eigenvalues)
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
pub fn eigh(a: &HermitianMatrix) -> Result<Spectrum> {
    let n = a.dim();
    let mut w = a.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = w.frobenius_norm();
    if !scale.is_finite() {
        return Err(Error::NoConvergence {
            sweeps: 0,
            residual: f64::NAN,
        });
    }
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&w);
        if off <= JACOBI_TOL * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.total_cmp(&w[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| w[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Annihilates `w[p][q]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` acting
/// on the `(p, q)` plane, updating `w ← G* w G` and `v ← v G`.
fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    // signum(0) is 1 for +0.0, which is the conventional choice.
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -ph_conj * s;
    let g_qq = ph_conj * c;

    let n = w.rows();
    for k in 0..n {
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        w[(k, p)] = akp * g_pp + akq * g_qp;
        w[(k, q)] = akp * g_pq + akq * g_qq;

        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let apk = w[(p, k)];
        let aqk = w[(q, k)];
        w[(p, k)] = apk * g_pp.conj() + aqk * g_qp.conj();
        w[(q, k)] = apk * g_pq.conj() + aqk * g_qq.conj();
    }
    w[(p, q)] = Complex64::new(0.0, 0.0);
    w[(q, p)] = Complex64::new(0.0, 0.0);
    w[(p, p)] = Complex64::new(app - t * r, 0.0);
    w[(q, q)] = Complex64::new(aqq + t * r, 0.0);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Positive,
    Indefinite,
}

/// Outcome of a positivity check: `positive` iff `min_eigenvalue ≥ -tolerance_used`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdCertificate {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
    /// Unit eigenvector of the minimum eigenvalue.
    pub witness: Vec<Complex64>,
}

impl PsdCertificate {
    pub fn is_positive(&self) -> bool {
        self.verdict == Verdict::Positive
    }
}

pub fn symmetrized_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let ab = a.as_matrix().matmul(b.as_matrix())?;
    let ba = b.as_matrix().matmul(a.as_matrix())?;
    Ok(HermitianMatrix::symmetrized(&ab + &ba))
}

pub fn psd_check(a: &HermitianMatrix, tol: f64) -> Result<PsdCertificate> {
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be >= 0, got {tol}")));
    }
    let spec = a.eigh()?;
    let min_eigenvalue = spec.min();
    let verdict = if min_eigenvalue >= -tol {
        Verdict::Positive
    } else {
        Verdict::Indefinite
    };
    Ok(PsdCertificate {
        verdict,
        min_eigenvalue,
        tolerance_used: tol,
        witness: spec.eigenvectors.column(0),
    })
}

/// `psd_check` with tolerance `tol · (1 + ‖A‖₂)`, from a single decomposition.
pub fn psd_check_scaled(a: &HermitianMatrix, tol: f64) -> Result<PsdCertificate> {
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be >= 0, got {tol}")));
    }
    let spec = a.eigh()?;
    let norm = spec.min().abs().max(spec.max().abs());
    let tolerance_used = tol * (1.0 + norm);
    let min_eigenvalue = spec.min();
    Ok(PsdCertificate {
        verdict: if min_eigenvalue >= -tolerance_used {
            Verdict::Positive
        } else {
            Verdict::Indefinite
        },
        min_eigenvalue,
        tolerance_used,
        witness: spec.eigenvectors.column(0),
    })
}

/// `A ≤ B` in the Löwner order, i.e. `psd_check(B - A)`.
pub fn leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<PsdCertificate> {
    psd_check(&b.sub(a)?, tol)
}

/// `A (A + λI)^{-1}`, computed spectrally as `U diag(λᵢ/(λᵢ+λ)) U*`.
pub fn resolvent_product(a: &HermitianMatrix, lambda: f64) -> Result<HermitianMatrix> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    let spec = a.eigh()?;
    let tol = DEFAULT_PSD_TOL * (1.0 + spec.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs())));
    if spec.min() < -tol {
        return Err(Error::Precondition(format!(
            "resolvent_product needs A >= 0, min eigenvalue {}",
            spec.min()
        )));
    }
    let mapped: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| {
            let l = l.max(0.0);
            l / (l + lambda)
        })
        .collect();
    Ok(spec.recompose(&mapped))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigh_identity() {
        let s = HermitianMatrix::identity(3).eigh().unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!(s.eigenvectors.identity_defect() < 1e-15);
    }

    #[test]
    fn eigh_diagonal_sorted() {
        let s = HermitianMatrix::diag(&[2.0, -1.0]).eigh().unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 2.0]);
    }

    #[test]
    fn eigh_two_by_two_closed_form() {
        // trace 2, det -1: eigenvalues 1 ± √2
        let a = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = a.eigh().unwrap();
        let r2 = 2f64.sqrt();
        assert!(close(s.eigenvalues[0], 1.0 - r2, 1e-14));
        assert!(close(s.eigenvalues[1], 1.0 + r2, 1e-14));
    }

    #[test]
    fn eigh_complex_entries() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2.
        let m = Matrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let a = HermitianMatrix::new(m).unwrap();
        let s = a.eigh().unwrap();
        assert!(close(s.eigenvalues[0], 0.0, 1e-15));
        assert!(close(s.eigenvalues[1], 2.0, 1e-15));
        assert!((s.reconstruct().as_matrix() - a.as_matrix()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        let tiny = Matrix::from_real_rows(&[vec![1.0, 1.0 + 1e-13], vec![1.0, 1.0]]).unwrap();
        let h = HermitianMatrix::new(tiny).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0));
    }

    #[test]
    fn rejects_empty_and_rectangular() {
        assert!(HermitianMatrix::new(Matrix::zeros(0, 0)).is_err());
        assert!(HermitianMatrix::new(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn apply_function_examples() {
        let sq = HermitianMatrix::diag(&[1.0, 2.0])
            .apply_on_domain("t^2", &Interval::real_line(), |t| t * t)
            .unwrap();
        assert!((sq.as_matrix() - HermitianMatrix::diag(&[1.0, 4.0]).as_matrix()).max_abs() < 1e-15);

        let root = HermitianMatrix::scalar(2, 4.0).sqrt().unwrap();
        assert!((root.as_matrix() - HermitianMatrix::scalar(2, 2.0).as_matrix()).max_abs() < 1e-15);

        // [[2,1],[1,0]] + (√2-1)I has eigenvalues 0 and 2√2.
        let r2 = 2f64.sqrt();
        let a = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .shift(r2 - 1.0);
        let fa = a
            .apply_on_domain("t/(1+t)", &Interval::nonnegative(), |t| t / (1.0 + t))
            .unwrap();
        let ev = fa.eigh().unwrap().eigenvalues;
        assert!(close(ev[0], 0.0, 1e-14));
        assert!(close(ev[1], 2.0 * r2 / (1.0 + 2.0 * r2), 1e-14));
    }

    #[test]
    fn apply_function_domain_error() {
        let a = HermitianMatrix::diag(&[-1.0, 1.0]);
        let err = a.sqrt().unwrap_err();
        match err {
            Error::Domain { eigenvalue, .. } => assert_eq!(eigenvalue, -1.0),
            other => panic!("unexpected {other:?}"),
        }
        // Within snapping distance of 0.
        assert!(HermitianMatrix::diag(&[-1e-11, 1.0]).sqrt().is_ok());
    }

    #[test]
    fn symmetrized_product_examples() {
        let a = HermitianMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let b = HermitianMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let s = symmetrized_product(&a, &b).unwrap();
        let expected = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s, expected);

        let i = HermitianMatrix::identity(2);
        assert_eq!(symmetrized_product(&i, &i).unwrap(), HermitianMatrix::scalar(2, 2.0));

        let c = symmetrized_product(&HermitianMatrix::diag(&[1.0, 2.0]), &HermitianMatrix::diag(&[3.0, 4.0])).unwrap();
        assert_eq!(c, HermitianMatrix::diag(&[6.0, 16.0]));

        assert!(symmetrized_product(&i, &HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn psd_check_examples() {
        let c = psd_check(&HermitianMatrix::identity(3), 1e-9).unwrap();
        assert!(c.is_positive());
        assert!(close(c.min_eigenvalue, 1.0, 1e-15));

        let s = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = psd_check(&s, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::Indefinite);
        assert!(close(c.min_eigenvalue, 1.0 - 2f64.sqrt(), 1e-14));
        assert!(close(vector_norm(&c.witness), 1.0, 1e-14));
        assert!(close(s.rayleigh(&c.witness), c.min_eigenvalue, 1e-14));

        let z = psd_check(&HermitianMatrix::zeros(2), 1e-9).unwrap();
        assert!(z.is_positive());
        assert_eq!(z.min_eigenvalue, 0.0);

        assert!(psd_check(&HermitianMatrix::zeros(2), -1.0).is_err());
    }

    #[test]
    fn leq_examples() {
        let i = HermitianMatrix::identity(2);
        assert!(leq(&i, &i.scale(2.0), 1e-9).unwrap().is_positive());
        let c = leq(
            &HermitianMatrix::diag(&[0.0, 2.0]),
            &HermitianMatrix::diag(&[1.0, 1.0]),
            1e-9,
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Indefinite);
        let a = HermitianMatrix::diag(&[3.0, -2.0]);
        let c = leq(&a, &a, 1e-9).unwrap();
        assert!(c.is_positive());
        assert_eq!(c.min_eigenvalue, 0.0);
    }

    #[test]
    fn resolvent_product_examples() {
        let r = resolvent_product(&HermitianMatrix::identity(2), 1.0).unwrap();
        assert!((r.as_matrix() - HermitianMatrix::scalar(2, 0.5).as_matrix()).max_abs() < 1e-15);
        let z = resolvent_product(&HermitianMatrix::zeros(2), 5.0).unwrap();
        assert_eq!(z.as_matrix().max_abs(), 0.0);
        let d = resolvent_product(&HermitianMatrix::diag(&[1.0, 3.0]), 2.0).unwrap();
        assert!((d.as_matrix() - HermitianMatrix::diag(&[1.0 / 3.0, 0.6]).as_matrix()).max_abs() < 1e-15);
        assert!(matches!(
            resolvent_product(&HermitianMatrix::diag(&[-1.0, 1.0]), 1.0),
            Err(Error::Precondition(_))
        ));
    }
}
