//! Seeded generation of structured instances and counterexample shrinking.
//!
//! Unitaries come from the QR factorization of a complex Ginibre matrix with
//! the diagonal of `R` made positive (Gram–Schmidt does this directly), which
//! gives Haar-distributed `Q`. Every generated instance is re-checked
//! against its kind's defining predicate before it is returned.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{psd_check_scaled, symmetrized_product, HermitianMatrix};
use crate::matrix::{vector_norm, Matrix};

/// Generated instances satisfy their predicate within this relative tolerance.
pub const PREDICATE_TOL: f64 = 1e-10;
/// Generated matrices are scaled to spectral norm at most this.
pub const MAX_NORM: f64 = 10.0;
pub const MAX_DIM: usize = 64;
/// Shrinking gives up after this many candidate evaluations.
pub const SHRINK_BUDGET: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    Psd,
    PsdWindow {
        lo: f64,
        hi: f64,
    },
    /// `(B, B + P)`, lower first.
    OrderedPairLeq,
    /// `(A, B)` with `B² ≤ A²`.
    OrderedPairSqLeq,
    JordanPositivePair,
    JordanIndefinitePair,
    Isometry {
        rows: usize,
        cols: usize,
    },
    ResolutionOfIdentity {
        count: usize,
    },
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::Psd => "psd",
            InstanceKind::PsdWindow { .. } => "psd_window",
            InstanceKind::OrderedPairLeq => "ordered_pair_leq",
            InstanceKind::OrderedPairSqLeq => "ordered_pair_sq_leq",
            InstanceKind::JordanPositivePair => "jordan_positive_pair",
            InstanceKind::JordanIndefinitePair => "jordan_indefinite_pair",
            InstanceKind::Isometry { .. } => "isometry",
            InstanceKind::ResolutionOfIdentity { .. } => "resolution_of_identity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dim: usize,
    pub kind: InstanceKind,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(dim: usize, kind: InstanceKind, seed: u64) -> Self {
        Self { dim, kind, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Single(HermitianMatrix),
    Pair { a: HermitianMatrix, b: HermitianMatrix },
    Isometry(Matrix),
    Family(Vec<Matrix>),
}

impl Instance {
    pub fn single(&self) -> Option<&HermitianMatrix> {
        match self {
            Instance::Single(m) => Some(m),
            _ => None,
        }
    }

    pub fn pair(&self) -> Option<(&HermitianMatrix, &HermitianMatrix)> {
        match self {
            Instance::Pair { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn into_pair(self) -> Option<(HermitianMatrix, HermitianMatrix)> {
        match self {
            Instance::Pair { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Instance::Single(m) => m.dim(),
            Instance::Pair { a, .. } => a.dim(),
            Instance::Isometry(c) => c.rows(),
            Instance::Family(cs) => cs.first().map_or(0, Matrix::cols),
        }
    }

    fn map_hermitian(&self, f: impl Fn(&HermitianMatrix) -> Option<HermitianMatrix>) -> Option<Instance> {
        match self {
            Instance::Single(m) => Some(Instance::Single(f(m)?)),
            Instance::Pair { a, b } => Some(Instance::Pair { a: f(a)?, b: f(b)? }),
            _ => None,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(gaussian(rng) * s, gaussian(rng) * s)
}

fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Orthonormalizes the columns of `m` (rows ≥ cols) by modified Gram–Schmidt
/// with one reorthogonalization pass. The implied `R` has positive diagonal.
pub fn orthonormal_columns(m: &Matrix) -> Result<Matrix> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        return Err(Error::Shape(format!(
            "need rows >= cols for an isometry, got {rows}x{cols}"
        )));
    }
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column(j);
        for _ in 0..2 {
            for u in &q {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = vector_norm(&v);
        if !(norm > 1e-12) {
            return Err(Error::Generation {
                kind: "isometry".into(),
                reason: "rank-deficient Gaussian draw".into(),
            });
        }
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| q[j][i]))
}

pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> Result<Matrix> {
    orthonormal_columns(&ginibre(rng, n, n))
}

fn with_spectrum(u: &Matrix, eigenvalues: &[f64]) -> HermitianMatrix {
    let d = HermitianMatrix::diag(eigenvalues);
    d.congruence(&u.adjoint()).expect("square shapes agree")
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> Result<HermitianMatrix> {
    let u = haar_unitary(rng, n)?;
    let mut eig: Vec<f64> = (0..n).map(|_| gaussian(rng).abs()).collect();
    let top = eig.iter().fold(0.0_f64, |m, &x| m.max(x));
    if top > MAX_NORM {
        eig.iter_mut().for_each(|x| *x *= MAX_NORM / top);
    }
    Ok(with_spectrum(&u, &eig))
}

fn random_window(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Result<HermitianMatrix> {
    let u = haar_unitary(rng, n)?;
    let eig: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    Ok(with_spectrum(&u, &eig))
}

fn is_psd(m: &HermitianMatrix) -> Result<bool> {
    Ok(psd_check_scaled(m, PREDICATE_TOL)?.is_positive())
}

fn gen_error(kind: &InstanceKind, reason: impl Into<String>) -> Error {
    Error::Generation {
        kind: kind.name().into(),
        reason: reason.into(),
    }
}

/// Generates an instance. Pure function of `spec` (seed included).
pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    let n = spec.dim;
    if n == 0 || n > MAX_DIM {
        return Err(gen_error(&spec.kind, format!("dim must be in [1, {MAX_DIM}], got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rng = &mut rng;
    let instance = match &spec.kind {
        InstanceKind::Psd => Instance::Single(random_psd(rng, n)?),
        InstanceKind::PsdWindow { lo, hi } => {
            if !(0.0 <= *lo && lo <= hi && hi.is_finite()) {
                return Err(gen_error(&spec.kind, format!("invalid window [{lo}, {hi}]")));
            }
            Instance::Single(random_window(rng, n, *lo, *hi)?)
        }
        InstanceKind::OrderedPairLeq => {
            let b = random_psd(rng, n)?;
            let p = random_psd(rng, n)?;
            let upper = b.add(&p)?;
            let norm = upper.spectral_norm()?;
            let s = if norm > MAX_NORM { MAX_NORM / norm } else { 1.0 };
            Instance::Pair {
                a: b.scale(s),
                b: upper.scale(s),
            }
        }
        InstanceKind::OrderedPairSqLeq => {
            let a = random_psd(rng, n)?;
            // P = A Q A with 0 ≤ Q ≤ I gives P ≤ A², so A² − P = A(I − Q)A ≥ 0.
            let u = haar_unitary(rng, n)?;
            let keep: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
            let rest = with_spectrum(&u, &keep);
            let diff = rest.sandwich(&a)?;
            if !is_psd(&diff)? {
                return Err(gen_error(&spec.kind, "A² − P lost positivity"));
            }
            let b = diff.sqrt()?;
            Instance::Pair { a, b }
        }
        InstanceKind::JordanPositivePair => {
            let budget = 10 * n * n;
            let mut found = None;
            for _ in 0..budget {
                let a = random_psd(rng, n)?;
                let b = random_psd(rng, n)?;
                if is_psd(&symmetrized_product(&a, &b)?)? {
                    found = Some((a, b));
                    break;
                }
            }
            let (a, b) = match found {
                Some(pair) => pair,
                None => {
                    // Commuting PSD pairs always have AB + BA ≥ 0.
                    let u = haar_unitary(rng, n)?;
                    let da: Vec<f64> = (0..n).map(|_| gaussian(rng).abs().min(MAX_NORM)).collect();
                    let db: Vec<f64> = (0..n).map(|_| gaussian(rng).abs().min(MAX_NORM)).collect();
                    (with_spectrum(&u, &da), with_spectrum(&u, &db))
                }
            };
            Instance::Pair { a, b }
        }
        InstanceKind::JordanIndefinitePair => {
            let budget = (10 * n * n).max(1000);
            let mut found = None;
            let mut attempts = 0;
            while attempts < budget {
                attempts += 1;
                let a = random_psd(rng, n)?;
                let b = random_psd(rng, n)?;
                let scale = a.spectral_norm()? * b.spectral_norm()?;
                let s = symmetrized_product(&a, &b)?;
                if s.eigh()?.min() < -1e-3 * scale {
                    found = Some((a, b));
                    break;
                }
            }
            let (a, b) = found.ok_or_else(|| {
                gen_error(
                    &spec.kind,
                    format!("rejection budget exhausted: 0 of {attempts} proposals accepted"),
                )
            })?;
            Instance::Pair { a, b }
        }
        InstanceKind::Isometry { rows, cols } => {
            if rows < cols || *cols == 0 {
                return Err(gen_error(
                    &spec.kind,
                    format!("need rows >= cols >= 1, got {rows}x{cols}"),
                ));
            }
            Instance::Isometry(orthonormal_columns(&ginibre(rng, *rows, *cols))?)
        }
        InstanceKind::ResolutionOfIdentity { count } => {
            if *count == 0 {
                return Err(gen_error(&spec.kind, "count must be >= 1"));
            }
            let blocks: Vec<HermitianMatrix> = (0..*count)
                .map(|_| random_psd(rng, n).map(|r| r.shift(0.1)))
                .collect::<Result<_>>()?;
            let total = blocks.iter().skip(1).try_fold(blocks[0].clone(), |acc, r| acc.add(r))?;
            let inv_root = total.power(-0.5)?;
            let cs = blocks
                .iter()
                .map(|r| Ok(r.sandwich(&inv_root)?.sqrt()?.into_matrix()))
                .collect::<Result<Vec<_>>>()?;
            Instance::Family(cs)
        }
    };
    if !satisfies(&spec.kind, &instance)? {
        return Err(gen_error(
            &spec.kind,
            "generated instance failed its defining predicate",
        ));
    }
    Ok(instance)
}

/// Resolution defect `‖Σ Cᵢ*Cᵢ − I‖_F`.
pub fn resolution_defect(blocks: &[Matrix]) -> Result<f64> {
    let first = blocks.first().ok_or_else(|| Error::Shape("empty family".into()))?;
    let mut acc = Matrix::zeros(first.cols(), first.cols());
    for c in blocks {
        acc = acc.try_add(&c.adjoint().matmul(c)?)?;
    }
    Ok(acc.identity_defect())
}

/// Re-checks the defining predicate of `kind` on `instance`.
pub fn satisfies(kind: &InstanceKind, instance: &Instance) -> Result<bool> {
    Ok(match (kind, instance) {
        (InstanceKind::Psd, Instance::Single(m)) => is_psd(m)?,
        (InstanceKind::PsdWindow { lo, hi }, Instance::Single(m)) => {
            let s = m.eigh()?;
            let slack = PREDICATE_TOL * (1.0 + hi.abs());
            s.min() >= lo - slack && s.max() <= hi + slack
        }
        (InstanceKind::OrderedPairLeq, Instance::Pair { a, b }) => is_psd(a)? && is_psd(&b.sub(a)?)?,
        (InstanceKind::OrderedPairSqLeq, Instance::Pair { a, b }) => {
            is_psd(a)? && is_psd(b)? && is_psd(&a.square().sub(&b.square())?)?
        }
        (InstanceKind::JordanPositivePair, Instance::Pair { a, b }) => {
            is_psd(a)? && is_psd(b)? && is_psd(&symmetrized_product(a, b)?)?
        }
        (InstanceKind::JordanIndefinitePair, Instance::Pair { a, b }) => {
            let scale = a.spectral_norm()? * b.spectral_norm()?;
            is_psd(a)? && is_psd(b)? && symmetrized_product(a, b)?.eigh()?.min() < -1e-3 * scale
        }
        (InstanceKind::Isometry { .. }, Instance::Isometry(c)) => {
            c.adjoint().matmul(c)?.identity_defect() <= PREDICATE_TOL
        }
        (InstanceKind::ResolutionOfIdentity { .. }, Instance::Family(cs)) => resolution_defect(cs)? <= PREDICATE_TOL,
        _ => false,
    })
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

fn rounded(m: &HermitianMatrix, digits: i32) -> Option<HermitianMatrix> {
    let r = m
        .as_matrix()
        .map(|z| Complex64::new(round_to(z.re, digits), round_to(z.im, digits)));
    HermitianMatrix::new(r).ok()
}

fn toward_identity(m: &HermitianMatrix, s: f64) -> HermitianMatrix {
    m.scale(1.0 - s).shift(s)
}

/// Simplifies a failing `Single` or `Pair` instance while `failing` keeps
/// returning true: principal submatrices first, then rounding entries to short
/// decimals, then interpolation toward the identity. Each accepted step must
/// keep the predicate failing; at most [`SHRINK_BUDGET`] candidates are tried.
pub fn shrink(instance: &Instance, failing: impl Fn(&Instance) -> bool) -> Instance {
    let mut current = instance.clone();
    let mut steps = 0;
    let try_candidate = |cand: Option<Instance>, current: &mut Instance, steps: &mut usize| -> bool {
        let Some(cand) = cand else { return false };
        if cand == *current || *steps >= SHRINK_BUDGET {
            return false;
        }
        *steps += 1;
        if failing(&cand) {
            *current = cand;
            true
        } else {
            false
        }
    };
    'outer: while steps < SHRINK_BUDGET {
        let n = current.dim();
        if n > 1 {
            for drop in 0..n {
                let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
                let cand = current.map_hermitian(|m| Some(m.principal_submatrix(&keep)));
                if try_candidate(cand, &mut current, &mut steps) {
                    continue 'outer;
                }
            }
        }
        for digits in [0, 1, 2, 3, 4, 6] {
            let cand = current.map_hermitian(|m| rounded(m, digits));
            if try_candidate(cand, &mut current, &mut steps) {
                continue 'outer;
            }
        }
        for s in [0.5, 0.25, 0.1] {
            let cand = current.map_hermitian(|m| Some(toward_identity(m, s)));
            if try_candidate(cand, &mut current, &mut steps) {
                continue 'outer;
            }
        }
        break;
    }
    current
}
