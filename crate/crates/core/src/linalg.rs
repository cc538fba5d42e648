//! Dense complex linear algebra for small dimensions.
//!
//! Everything here is sized for `2 <= n <= 16`: matrices are stored row-major in a
//! flat `Vec`, and the Hermitian eigensolver is a cyclic complex Jacobi iteration.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::Frame;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for the Hermitian and unitary predicates.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Default relative tolerance for grouping eigenvalues into degenerate blocks.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;
/// Sweep limit of the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A vector of `n` complex amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CVector(Vec<C64>);

impl CVector {
    pub fn new(entries: Vec<C64>) -> Self {
        CVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        CVector(vec![ZERO; n])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = ONE;
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        CVector(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[C64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> CVector {
        CVector(self.0.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &CVector) -> CVector {
        CVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        CVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: C64, other: &CVector) -> CVector {
        CVector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a * b);
            }
        }
        CVector(out)
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Rotates the global phase so the largest-magnitude entry is real and
    /// positive. Ties within `1e-9` resolve to the lowest index.
    pub fn canonical_phase(&self) -> CVector {
        let max = self.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        let pivot = self
            .0
            .iter()
            .position(|z| z.norm() >= max - 1e-9)
            .expect("max is attained");
        let z = self.0[pivot];
        let phase = z.conj() / z.norm();
        let mut out = self.scale(phase);
        out.0[pivot] = C64::new(out.0[pivot].norm(), 0.0);
        out
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

/// A square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[CVector]) -> Self {
        let n = columns.len();
        let mut m = Self::zeros(n);
        for (j, col) in columns.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// `|v><w|`
    pub fn outer(v: &CVector, w: &CVector) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector((0..self.n).map(|i| self[(i, j)]).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.n, v.len(), "apply dimension mismatch");
        CVector(
            (0..self.n)
                .map(|i| (0..self.n).fold(ZERO, |acc, j| acc + self[(i, j)] * v[j]))
                .collect(),
        )
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (a, b) = (self.n, other.n);
        let mut m = Self::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let s = self[(i, j)];
                for k in 0..b {
                    for l in 0..b {
                        m[(i * b + k, j * b + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// `<v|M|w>`
    pub fn sandwich(&self, v: &CVector, w: &CVector) -> C64 {
        v.inner(&self.apply(w))
    }

    /// `U^dagger M U`
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        u.dagger().matmul(self).matmul(u)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn unitary_residual(&self) -> f64 {
        self.dagger()
            .matmul(self)
            .max_abs_diff(&CMatrix::identity(self.n))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= STRUCTURE_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_residual() <= STRUCTURE_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let residual = self.hermitian_residual();
        if residual <= STRUCTURE_TOL && self.is_finite() {
            Ok(())
        } else {
            Err(Error::NotHermitian { residual })
        }
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let residual = self.unitary_residual();
        if residual <= STRUCTURE_TOL && self.is_finite() {
            Ok(())
        } else {
            Err(Error::NotUnitary { residual })
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// A square real matrix, row-major. Only what the phase-space checks need.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(n: usize) -> Self {
        RMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn matmul(&self, other: &RMatrix) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &RMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .expect("non-empty range");
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                if factor != 0.0 {
                    for j in col..n {
                        a[r * n + j] -= factor * a[col * n + j];
                    }
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// The real `2n x 2n` matrix `[[Re U, -Im U], [Im U, Re U]]` acting on `(x, y)`.
pub fn realify(u: &CMatrix) -> RMatrix {
    let n = u.dim();
    let mut m = RMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            m[(i, j)] = z.re;
            m[(i, j + n)] = -z.im;
            m[(i + n, j)] = z.im;
            m[(i + n, j + n)] = z.re;
        }
    }
    m
}

/// One eigenvalue together with the frame indices of its eigenspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBlock {
    pub eigenvalue: f64,
    pub indices: Vec<usize>,
}

/// `Σ_k o_k P_k` relative to an associated frame; eigenvalues strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralForm {
    pub blocks: Vec<SpectralBlock>,
}

impl SpectralForm {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.eigenvalue).collect()
    }

    /// Spectral projector of block `k` built from `frame`.
    pub fn projector(&self, frame: &Frame, k: usize) -> CMatrix {
        frame.projector(&self.blocks[k].indices)
    }

    pub fn reconstruct(&self, frame: &Frame) -> CMatrix {
        let n = frame.dim();
        self.blocks.iter().enumerate().fold(CMatrix::zeros(n), |acc, (k, b)| {
            acc.add(&self.projector(frame, k).scale(C64::new(b.eigenvalue, 0.0)))
        })
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Returns the eigenframe (ordered by ascending eigenvalue, each vector with its
/// largest-magnitude entry real positive) and the eigenvalues grouped into blocks
/// where `|λ_i - λ_j| <= group_tol * (1 + max|λ|)`.
pub fn jacobi_eigh(h: &CMatrix, group_tol: f64) -> Result<(Frame, SpectralForm)> {
    h.ensure_hermitian()?;
    let n = h.dim();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut a = h.add(&h.dagger()).scale(C64::new(0.5, 0.0));
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius();

    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0 || off_norm(&a) <= 1e-15 * scale;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_norm(&a) <= 1e-15 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors: Vec<CVector> = order
        .iter()
        .map(|&i| v.column(i).canonical_phase())
        .collect();

    let max_abs = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = group_tol * (1.0 + max_abs);
    let mut blocks: Vec<SpectralBlock> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || (values[i] - values[start]).abs() > tol {
            let indices: Vec<usize> = (start..i).collect();
            let eigenvalue = indices.iter().map(|&k| values[k]).sum::<f64>() / indices.len() as f64;
            blocks.push(SpectralBlock { eigenvalue, indices });
            start = i;
        }
    }
    Ok((Frame::from_trusted(vectors), SpectralForm { blocks }))
}

/// Zeroes `a[p][q]` with a unitary rotation in the `(p, q)` plane and
/// accumulates the rotation into the columns of `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = [[c, s e^{iφ}], [-s e^{-iφ}, c]] on the (p, q) plane; A <- G^† A G.
    let g_pq = phase * s;
    let g_qp = -phase.conj() * s;
    let cc = C64::new(c, 0.0);
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cc + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * cc;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = cc * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + cc * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cc + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * cc;
    }
}

/// A real function applied to eigenvalues.
///
/// Closures implement this directly. [`ValueTable`] is the exact alternative for
/// piecewise functions whose branch points sit on eigenvalues.
pub trait SpectralFn {
    fn eval(&self, x: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> f64> SpectralFn for F {
    fn eval(&self, x: f64) -> Result<f64> {
        Ok(self(x))
    }
}

/// A finite eigenvalue -> value table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueTable {
    pub entries: Vec<(f64, f64)>,
}

impl ValueTable {
    pub fn new(entries: Vec<(f64, f64)>) -> Self {
        ValueTable { entries }
    }

    /// Tabulates `f` on the given points.
    pub fn tabulate(points: &[f64], f: impl Fn(f64) -> f64) -> Self {
        ValueTable {
            entries: points.iter().map(|&x| (x, f(x))).collect(),
        }
    }
}

impl SpectralFn for ValueTable {
    fn eval(&self, x: f64) -> Result<f64> {
        self.entries
            .iter()
            .filter(|(k, _)| (k - x).abs() <= DEFAULT_GROUP_TOL * (1.0 + k.abs()))
            .min_by(|a, b| (a.0 - x).abs().total_cmp(&(b.0 - x).abs()))
            .map(|&(_, v)| v)
            .ok_or(Error::MissingTableEntry(x))
    }
}

/// `Σ_k f(o_k) P_k` over the spectral blocks of `o`.
pub fn apply_fn_spectral(o: &CMatrix, f: &dyn SpectralFn) -> Result<CMatrix> {
    let (frame, spectral) = jacobi_eigh(o, DEFAULT_GROUP_TOL)?;
    let mut out = CMatrix::zeros(o.dim());
    for (k, block) in spectral.blocks.iter().enumerate() {
        let value = f.eval(block.eigenvalue)?;
        out = out.add(&spectral.projector(&frame, k).scale(C64::new(value, 0.0)));
    }
    // Remove rounding asymmetry so the result is Hermitian to machine precision.
    Ok(out.add(&out.dagger()).scale(C64::new(0.5, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input_is_already_solved() {
        let (frame, spectral) = jacobi_eigh(&CMatrix::diag_real(&[1.0, 2.0, 3.0]), DEFAULT_GROUP_TOL).unwrap();
        assert_eq!(spectral.eigenvalues(), vec![1.0, 2.0, 3.0]);
        assert_eq!(spectral.blocks.len(), 3);
        for i in 0..3 {
            assert_eq!(frame.vector(i), &CVector::basis(3, i));
        }
    }

    #[test]
    fn remark_matrix_c_eigenpairs() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMatrix::from_real_rows(&[&[1.5, -0.5, 0.0], &[-0.5, 1.5, 0.0], &[0.0, 0.0, 3.0]]).unwrap();
        let (frame, spectral) = jacobi_eigh(&m, DEFAULT_GROUP_TOL).unwrap();
        let values = spectral.eigenvalues();
        for (got, want) in values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        for (i, &lambda) in values.iter().enumerate() {
            let v = frame.vector(i);
            let residual = m.apply(v).sub(&v.scale(c(lambda, 0.0))).norm();
            assert!(residual < 1e-12);
        }
        let expected = [
            CVector::from_real(&[h, h, 0.0]),
            CVector::from_real(&[h, -h, 0.0]),
            CVector::from_real(&[0.0, 0.0, 1.0]),
        ];
        for (i, e) in expected.iter().enumerate() {
            assert!(frame.vector(i).inner(e).norm() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn zz_has_two_double_blocks() {
        let z = CMatrix::diag_real(&[1.0, -1.0]);
        let (_, spectral) = jacobi_eigh(&z.kron(&z), DEFAULT_GROUP_TOL).unwrap();
        assert_eq!(spectral.blocks.len(), 2);
        assert_eq!(spectral.blocks[0].eigenvalue, -1.0);
        assert_eq!(spectral.blocks[0].indices.len(), 2);
        assert_eq!(spectral.blocks[1].indices.len(), 2);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(jacobi_eigh(&m, DEFAULT_GROUP_TOL), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = CMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, -1.0), c(0.5, 0.5)],
            vec![c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, -0.5), c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let (frame, spectral) = jacobi_eigh(&m, DEFAULT_GROUP_TOL).unwrap();
        assert!(spectral.reconstruct(&frame).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn remark_functions_on_tables() {
        let b = CMatrix::diag_real(&[1.0, 2.0, 3.0]);
        let f = ValueTable::tabulate(&[1.0, 2.0, 3.0], |x| if x < 3.0 { 2.0 } else { x });
        let fb = apply_fn_spectral(&b, &f).unwrap();
        assert!(fb.max_abs_diff(&CMatrix::diag_real(&[2.0, 2.0, 3.0])) < 1e-12);

        let cm = CMatrix::from_real_rows(&[&[1.5, -0.5, 0.0], &[-0.5, 1.5, 0.0], &[0.0, 0.0, 3.0]]).unwrap();
        let g = ValueTable::tabulate(&[1.0, 2.0, 3.0], |x| if x <= 2.0 { 2.0 } else { x });
        let gc = apply_fn_spectral(&cm, &g).unwrap();
        assert!(gc.max_abs_diff(&fb) < 1e-12);
    }

    #[test]
    fn identity_map_returns_input() {
        let m = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 2.0)], vec![c(0.0, -2.0), c(-3.0, 0.0)]]).unwrap();
        let out = apply_fn_spectral(&m, &|x: f64| x).unwrap();
        assert!(out.max_abs_diff(&m) < 1e-9);
    }

    #[test]
    fn missing_table_entry_is_an_error() {
        let table = ValueTable::new(vec![(1.0, 0.0)]);
        let r = apply_fn_spectral(&CMatrix::diag_real(&[1.0, 5.0]), &table);
        assert!(matches!(r, Err(Error::MissingTableEntry(_))));
    }

    #[test]
    fn realify_identity_and_i() {
        assert_eq!(realify(&CMatrix::identity(3)), RMatrix::identity(6));
        let i = CMatrix::identity(1).scale(c(0.0, 1.0));
        let m = realify(&i);
        assert_eq!((m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]), (0.0, -1.0, 1.0, 0.0));
    }

    #[test]
    fn determinant_of_permutation_and_scaling() {
        let mut p = RMatrix::zeros(3);
        p[(0, 1)] = 1.0;
        p[(1, 0)] = 1.0;
        p[(2, 2)] = 2.0;
        assert_eq!(p.determinant(), -2.0);
    }

    #[test]
    fn canonical_phase_handles_ties() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = CVector::new(vec![c(h, 0.0), c(0.0, h)]);
        let b = a.scale(c(0.0, 1.0));
        assert!(a.canonical_phase().max_abs_diff(&b.canonical_phase()) < 1e-15);
    }
}
