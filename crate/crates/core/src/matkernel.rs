//! Small dense complex matrices and the Hermitian routines the rest of the
//! crate is built on.
//!
//! Matrices are square with dimension `1..=MAX_DIM`. Public model APIs only
//! ever hand out 2x2 matrices; larger sizes exist so the SLD solver can be
//! exercised on synthetic higher-dimensional states.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Relative tolerance for the Hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below `-PSD_TOL` reject a supposedly PSD input; values in
/// `[-PSD_TOL, 0)` are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense `n x n` complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    /// Builds a matrix from row-major entries. Fails on a non-square entry
    /// count, an unsupported dimension or non-finite entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim, (entries.len() as f64).sqrt() as usize));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Row-major 2x2 constructor for literals; panics only on non-finite input.
    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        let m = Self::from_row_major(2, &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]]);
        m.expect("finite 2x2 literal")
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = c(*v, 0.0);
        }
        m
    }

    /// Pauli matrices `sigma_x`, `sigma_y`, `sigma_z` for `axis` 0, 1, 2.
    pub fn pauli(axis: usize) -> Self {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        match axis {
            0 => Self::from_rows2([[z, o], [o, z]]),
            1 => Self::from_rows2([[z, -i], [i, z]]),
            2 => Self::from_rows2([[o, z], [z, -o]]),
            _ => panic!("pauli axis must be 0, 1 or 2"),
        }
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let n = a.len();
        assert_eq!(n, b.len(), "outer product of unequal lengths");
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn frob_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Checked product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    /// Checked sum.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(Self {
            inner: &self.inner + &rhs.inner,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(n, v.len(), "apply: vector length mismatch");
        (0..n)
            .map(|i| (0..n).map(|j| self.inner[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `‖H − H†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.inner - self.inner.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Hermitian within `tol` relative to `max(1, ‖H‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.frob_norm().max(1.0)
    }

    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()).map(|z| z * 0.5),
        }
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch(self.dim(), rhs.dim()));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.inner[idx]
    }
}

// Operator forms panic on mismatched dimensions; use the checked methods
// where dimensions come from user input.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -&self.inner,
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        write!(f, "ComplexMatrix[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                let z = self.inner[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvectors.dim();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[(i, k)] * v[(j, k)].conj() * fl;
                }
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi: unitary plane rotations annihilate each off-diagonal
/// pair in turn until a full sweep changes nothing. Returns the diagonal and
/// the accumulated rotations, unsorted.
fn jacobi_eigen(mut a: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut v = DMatrix::<C64>::identity(n, n);
    let floor = 1e-3 * f64::EPSILON * a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)].norm();
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                if g <= floor || g <= 0.5 * f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let phase = a[(p, q)] / g;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + tau.hypot(1.0))
                };
                let cs = 1.0 / t.hypot(1.0);
                let sn = t * cs;
                let (sp, spc) = (phase * sn, phase.conj() * sn);
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * cs - akq * spc;
                    a[(k, q)] = akp * sp + akq * cs;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * cs - aqk * sp;
                    a[(q, k)] = apk * spc + aqk * cs;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * cs - vkq * spc;
                    v[(k, q)] = vkp * sp + vkq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEig> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = h.hermitian_defect();
    let scale = h.frob_norm().max(1.0);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect / scale));
    }
    let n = h.dim();
    let (values, v) = jacobi_eigen(h.hermitian_part().inner);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut vecs = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, col)] = v[(i, k)];
        }
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Principal square root of a PSD Hermitian matrix.
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    let min = eig.eigenvalues[0];
    if min < -PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    // eigenvalues are only accurate to ~eps·‖H‖; below that they are zero,
    // and their square roots would otherwise inject ~1e-8 noise
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let floor = 8.0 * f64::EPSILON * top;
    Ok(eig.map_spectrum(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

pub fn trace(h: &ComplexMatrix) -> C64 {
    h.trace()
}

pub fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mul(b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn frob_norm(a: &ComplexMatrix) -> f64 {
    a.frob_norm()
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotates `v` by a global phase so that its first component with modulus
/// above `1e-12` (relative to `‖v‖`) has nonnegative real part, ties broken
/// by nonnegative imaginary part.
pub fn fix_phase(v: &mut [C64]) {
    let scale = vec_norm(v).max(f64::MIN_POSITIVE);
    let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-12 * scale) else {
        return;
    };
    let flip = lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0);
    if flip {
        for z in v.iter_mut() {
            *z = -*z;
        }
    }
}

/// Like [`fix_phase`] but removes the phase completely, making the leading
/// component real and positive.
pub fn fix_phase_real(v: &mut [C64]) {
    let scale = vec_norm(v).max(f64::MIN_POSITIVE);
    let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-12 * scale) else {
        return;
    };
    let phase = lead.conj() / lead.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}
