use crate::context::Frame;
use crate::linalg::{jacobi_eigh, CMatrix, CVector, SpectralFn, C64, DEFAULT_GROUP_TOL};
use crate::error::{Error, Result};

/// A Hermitian operator paired with its distinct eigenvalues.
///
/// The eigenvalue list is the set of values a value assignment may return. When it
/// comes from an exact table (integers, Pauli products) assigned values compare
/// with `==`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    spectrum: Vec<f64>,
}

impl Observable {
    /// Spectrum taken from the eigensolver, grouped at the default tolerance.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (_, spectral) = jacobi_eigh(&matrix, DEFAULT_GROUP_TOL)?;
        Ok(Observable {
            spectrum: spectral.eigenvalues(),
            matrix,
        })
    }

    /// Numerical eigenvalues are replaced by the nearest entry of `candidates`.
    /// Candidates that match no eigenvalue are dropped.
    pub fn with_spectrum(matrix: CMatrix, candidates: &[f64]) -> Result<Self> {
        let (_, spectral) = jacobi_eigh(&matrix, DEFAULT_GROUP_TOL)?;
        let mut spectrum = Vec::new();
        for numeric in spectral.eigenvalues() {
            let exact = candidates
                .iter()
                .copied()
                .filter(|c| (c - numeric).abs() <= DEFAULT_GROUP_TOL * (1.0 + c.abs()))
                .min_by(|a, b| (a - numeric).abs().total_cmp(&(b - numeric).abs()))
                .ok_or(Error::SpectrumMismatch(numeric))?;
            spectrum.push(exact);
        }
        spectrum.sort_by(f64::total_cmp);
        spectrum.dedup();
        Ok(Observable { matrix, spectrum })
    }

    /// `Σ_i values[i] |f_i><f_i|` for a frame `f`.
    pub fn diagonal_in(frame: &Frame, values: &[f64]) -> Result<Self> {
        if values.len() != frame.dim() {
            return Err(Error::DimensionMismatch {
                expected: frame.dim(),
                found: values.len(),
            });
        }
        let n = frame.dim();
        let mut matrix = CMatrix::zeros(n);
        for (v, &lambda) in frame.vectors().iter().zip(values) {
            matrix = matrix.add(&CMatrix::outer(v, v).scale(C64::new(lambda, 0.0)));
        }
        let matrix = matrix.add(&matrix.dagger()).scale(C64::new(0.5, 0.0));
        let mut spectrum = values.to_vec();
        spectrum.sort_by(f64::total_cmp);
        spectrum.dedup();
        Ok(Observable { matrix, spectrum })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Nearest eigenvalue to `x`.
    pub fn snap(&self, x: f64) -> f64 {
        self.spectrum
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .unwrap_or(x)
    }

    /// Eigenvalue on an eigenvector `v` (snapped from `<v|O|v>`).
    pub fn value_on(&self, v: &CVector) -> f64 {
        self.snap(self.matrix.sandwich(v, v).re)
    }

    /// `U^dagger O U`; the spectrum is unitarily invariant.
    pub fn pulled_back(&self, u: &CMatrix) -> Observable {
        let m = self.matrix.conjugate_by(u);
        Observable {
            matrix: m.add(&m.dagger()).scale(C64::new(0.5, 0.0)),
            spectrum: self.spectrum.clone(),
        }
    }

    /// `f(O)` with spectrum `f(spectrum)`.
    pub fn map(&self, f: &dyn SpectralFn) -> Result<Observable> {
        let matrix = crate::linalg::apply_fn_spectral(&self.matrix, f)?;
        let mut spectrum = self
            .spectrum
            .iter()
            .map(|&x| f.eval(x))
            .collect::<Result<Vec<_>>>()?;
        spectrum.sort_by(f64::total_cmp);
        spectrum.dedup();
        Self::with_spectrum(matrix, &spectrum)
    }

    /// `A + B` for commuting observables; candidate eigenvalues are pairwise sums.
    pub fn sum(&self, other: &Observable) -> Result<Observable> {
        let candidates = pairwise(&self.spectrum, &other.spectrum, |a, b| a + b);
        Self::with_spectrum(self.matrix.add(&other.matrix), &candidates)
    }

    /// `A B` for commuting observables; candidate eigenvalues are pairwise products.
    pub fn product(&self, other: &Observable) -> Result<Observable> {
        let candidates = pairwise(&self.spectrum, &other.spectrum, |a, b| a * b);
        let m = self.matrix.matmul(&other.matrix);
        let m = m.add(&m.dagger()).scale(C64::new(0.5, 0.0));
        Self::with_spectrum(m, &candidates)
    }
}

fn pairwise(a: &[f64], b: &[f64], op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| op(x, y)).collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ValueTable;

    #[test]
    fn exact_spectrum_replaces_numeric() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let o = Observable::with_spectrum(x, &[-1.0, 1.0, 7.0]).unwrap();
        assert_eq!(o.spectrum(), &[-1.0, 1.0]);
        assert_eq!(o.snap(0.999_999_999_9), 1.0);
    }

    #[test]
    fn spectrum_mismatch_detected() {
        let r = Observable::with_spectrum(CMatrix::diag_real(&[1.0, 2.0]), &[1.0]);
        assert!(matches!(r, Err(Error::SpectrumMismatch(_))));
    }

    #[test]
    fn map_keeps_exact_values() {
        let b = Observable::new(CMatrix::diag_real(&[1.0, 2.0, 3.0])).unwrap();
        let f = ValueTable::tabulate(b.spectrum(), |x| if x < 3.0 { 2.0 } else { x });
        let a = b.map(&f).unwrap();
        assert_eq!(a.spectrum(), &[2.0, 3.0]);
    }

    #[test]
    fn sum_and_product_of_commuting() {
        let a = Observable::new(CMatrix::diag_real(&[1.0, -1.0, 2.0])).unwrap();
        let b = Observable::new(CMatrix::diag_real(&[3.0, 3.0, -2.0])).unwrap();
        assert_eq!(a.sum(&b).unwrap().spectrum(), &[0.0, 2.0, 4.0]);
        assert_eq!(a.product(&b).unwrap().spectrum(), &[-4.0, -3.0, 3.0]);
    }
}
