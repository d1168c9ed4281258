//! Finite-dimensional complex linear algebra: pure states, unitaries and
//! Hermitian observables.
//!
//! All values are immutable once built. Operations return new values, so the
//! types can be shared freely between threads.

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::eigen::jacobi_hermitian;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionError { expected, actual })
    }
}

fn square_dim<T>(rows: &[Vec<Complex<T>>]) -> Result<usize> {
    let dim = rows.len();
    for row in rows {
        check_dim(dim, row.len())?;
    }
    if dim < 2 {
        return Err(Error::DomainError(format!("dimension must be at least 2, got {dim}")));
    }
    Ok(dim)
}

/// Normalized pure state over an `n ≥ 2` dimensional Hilbert space,
/// expanded in the computational basis `|0⟩ … |n-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Rescales `raw` to unit norm.
    pub fn normalize(raw: Vec<Complex<T>>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::DomainError(format!(
                "dimension must be at least 2, got {}",
                raw.len()
            )));
        }
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::DegenerateState);
        }
        let amplitudes = raw.into_iter().map(|z| z / norm).collect();
        Ok(Self { amplitudes })
    }

    /// Normalizes a real amplitude vector.
    pub fn from_real(raw: &[T]) -> Result<Self> {
        Self::normalize(raw.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DomainError(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut raw = vec![Complex::zero(); dim];
        raw[k] = Complex::one();
        Self::normalize(raw)
    }

    /// Real qubit state `cos θ |0⟩ + sin θ |1⟩`.
    pub fn qubit(theta: T) -> Self {
        Self {
            amplitudes: vec![
                Complex::new(theta.cos(), T::zero()),
                Complex::new(theta.sin(), T::zero()),
            ],
        }
    }

    /// Wraps amplitudes already known to be normalized (e.g. produced by a
    /// norm-preserving map).
    pub(crate) fn from_normalized_unchecked(amplitudes: Vec<Complex<T>>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex<T> {
        self.amplitudes[k]
    }

    /// Born probability `|⟨k|ψ⟩|²`.
    pub fn probability(&self, k: usize) -> T {
        self.amplitudes[k].norm_sqr()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩ = Σ conj(self_m) other_m`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: T) -> Self {
        let phase = Complex::from_polar(T::one(), phi);
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * phase).collect(),
        }
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
struct Matrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = square_dim(&rows)?;
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    fn identity(dim: usize) -> Self {
        let mut data = vec![Complex::zero(); dim * dim];
        for k in 0..dim {
            data[k * dim + k] = Complex::one();
        }
        Self { dim, data }
    }

    fn at(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim + c]
    }

    fn adjoint(&self) -> Self {
        let dim = self.dim;
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(self.at(c, r).conj());
            }
        }
        Self { dim, data }
    }

    fn mul(&self, other: &Self) -> Self {
        let dim = self.dim;
        let mut data = vec![Complex::zero(); dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..dim {
                    data[r * dim + c] = data[r * dim + c] + a * other.at(k, c);
                }
            }
        }
        Self { dim, data }
    }

    fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    fn max_deviation(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.dim).map(<[_]>::to_vec).collect()
    }
}

/// Unitary evolution operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T> {
    matrix: Matrix<T>,
}

impl<T: Real> Unitary<T> {
    /// Builds a unitary from its rows, checking `U†U = I` entrywise.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let matrix = Matrix::from_rows(rows)?;
        let deviation = matrix.adjoint().mul(&matrix).max_deviation(&Matrix::identity(matrix.dim));
        if !(deviation <= T::unitary_tolerance()) {
            return Err(Error::NotUnitary {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self { matrix })
    }

    /// Orthonormalizes the columns of `rows` (Gram-Schmidt, left to right).
    /// Handy for drawing random unitaries from random complex matrices.
    pub fn gram_schmidt(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let raw = Matrix::from_rows(rows)?;
        let dim = raw.dim;
        let mut columns: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut col: Vec<Complex<T>> = (0..dim).map(|r| raw.at(r, c)).collect();
            for q in &columns {
                let proj: Complex<T> = q.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in col.iter_mut().zip(q) {
                    *x = *x - proj * y;
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if !(norm > T::unitary_tolerance()) {
                return Err(Error::DegenerateState);
            }
            columns.push(col.into_iter().map(|z| z / norm).collect());
        }
        let rows = (0..dim).map(|r| (0..dim).map(|c| columns[c][r]).collect()).collect();
        Self::from_rows(rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Matrix::identity(dim),
        }
    }

    /// Real qubit rotation
    ///
    /// ```text
    /// U(γ) = | cos γ  -sin γ |
    ///        | sin γ   cos γ |
    /// ```
    ///
    /// so that `U†|0⟩ = cos γ |0⟩ - sin γ |1⟩`: postselecting `|0⟩` after
    /// `U(γ)` projects the pre-rotation state onto that vector.
    pub fn qubit_rotation(gamma: T) -> Self {
        let (s, c) = gamma.sin_cos();
        let z = T::zero();
        Self {
            matrix: Matrix {
                dim: 2,
                data: vec![
                    Complex::new(c, z),
                    Complex::new(-s, z),
                    Complex::new(s, z),
                    Complex::new(c, z),
                ],
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix.at(row, col)
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.matrix.rows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    /// `U|v⟩`. The norm is preserved up to the unitarity tolerance.
    pub fn apply(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        check_dim(self.dim(), v.dim())?;
        Ok(StateVector::from_normalized_unchecked(self.matrix.mul_vec(v.amplitudes())))
    }

    /// Max entrywise distance to `other`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.matrix.max_deviation(&other.matrix))
    }
}

/// Spectral decomposition of an [`Observable`]: eigenvalues ascending, one
/// normalized eigenvector per eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<StateVector<T>>,
}

/// Hermitian operator with a lazily computed eigendecomposition.
#[derive(Debug, Clone)]
pub struct Observable<T> {
    matrix: Matrix<T>,
    eigen: OnceLock<Eigen<T>>,
}

impl<T: Real> PartialEq for Observable<T> {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl<T: Real> Observable<T> {
    /// Builds an observable from its rows, checking Hermiticity entrywise.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let matrix = Matrix::from_rows(rows)?;
        let deviation = matrix.max_deviation(&matrix.adjoint());
        if !(deviation <= T::hermitian_tolerance()) {
            return Err(Error::HermiticityError {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self::from_matrix(matrix))
    }

    fn from_matrix(matrix: Matrix<T>) -> Self {
        Self {
            matrix,
            eigen: OnceLock::new(),
        }
    }

    /// Diagonal observable `Σ_l values[l] |l⟩⟨l|`.
    pub fn diagonal(values: &[T]) -> Result<Self> {
        let dim = values.len();
        if dim < 2 {
            return Err(Error::DomainError(format!("dimension must be at least 2, got {dim}")));
        }
        let mut data = vec![Complex::zero(); dim * dim];
        for (k, &v) in values.iter().enumerate() {
            data[k * dim + k] = Complex::new(v, T::zero());
        }
        Ok(Self::from_matrix(Matrix { dim, data }))
    }

    /// Projector `|k⟩⟨k|`; `projector(2, 1)` is the qubit population `n̂₁`.
    pub fn projector(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DomainError(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut values = vec![T::zero(); dim];
        values[k] = T::one();
        Self::diagonal(&values)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix.at(row, col)
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.matrix.rows()
    }

    /// `(A - offset·I) / scale`.
    pub fn affine(&self, scale: T, offset: T) -> Self {
        let dim = self.dim();
        let mut data = self.matrix.data.clone();
        for k in 0..dim {
            data[k * dim + k] = data[k * dim + k] - Complex::new(offset, T::zero());
        }
        let data = data.into_iter().map(|z| z / scale).collect();
        Self::from_matrix(Matrix { dim, data })
    }

    /// `A|v⟩`, unnormalized.
    pub fn apply_raw(&self, v: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        check_dim(self.dim(), v.dim())?;
        Ok(self.matrix.mul_vec(v.amplitudes()))
    }

    /// `⟨u|A|v⟩`.
    pub fn matrix_element(&self, u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
        check_dim(self.dim(), u.dim())?;
        let av = self.apply_raw(v)?;
        Ok(u.amplitudes().iter().zip(&av).map(|(a, b)| a.conj() * b).sum())
    }

    /// Real expectation value `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &StateVector<T>) -> Result<T> {
        let value = self.matrix_element(v, v)?;
        if !(value.im.abs() <= T::hermitian_tolerance()) {
            return Err(Error::HermiticityError {
                deviation: value.im.abs().as_f64(),
            });
        }
        Ok(value.re)
    }

    /// Eigendecomposition, computed on first use.
    ///
    /// Eigenvalues ascend. Within a degenerate block the eigenvectors are
    /// ordered by the index of their first significant amplitude, and every
    /// eigenvector is phased so that amplitude is real and positive.
    pub fn eigen(&self) -> &Eigen<T> {
        self.eigen.get_or_init(|| self.decompose())
    }

    fn decompose(&self) -> Eigen<T> {
        let dim = self.dim();
        let (values, v) = jacobi_hermitian(dim, &self.matrix.data);
        let significance = T::lit(1e-6);

        let mut pairs: Vec<(T, usize, StateVector<T>)> = (0..dim)
            .map(|col| {
                let mut amps: Vec<Complex<T>> = (0..dim).map(|r| v[r * dim + col]).collect();
                let lead = amps
                    .iter()
                    .position(|z| z.norm() > significance)
                    .unwrap_or(0);
                let phase = amps[lead].conj() / amps[lead].norm();
                for z in &mut amps {
                    *z = *z * phase;
                }
                let state = StateVector::normalize(amps).expect("Jacobi columns are unit vectors");
                (values[col], lead, state)
            })
            .collect();

        let tie = T::eigen_tolerance();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut start = 0;
        while start < pairs.len() {
            let mut end = start + 1;
            while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tie {
                end += 1;
            }
            pairs[start..end].sort_by_key(|p| p.1);
            start = end;
        }

        let (values, vectors) = pairs.into_iter().map(|(val, _, vec)| (val, vec)).unzip();
        Eigen { values, vectors }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn normalize_examples() {
        let s = StateVector::normalize(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let s = StateVector::normalize(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let h = 0.5f64.sqrt();
        assert!(close(s.amplitude(0), c(h, 0.0), 1e-15));
        assert!(close(s.amplitude(1), c(h, 0.0), 1e-15));

        let s = StateVector::normalize(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!(close(s.amplitude(0), c(0.6, 0.0), 1e-15));
        assert!(close(s.amplitude(1), c(0.0, 0.8), 1e-15));
    }

    #[test]
    fn normalize_rejects_zero_and_scalar() {
        assert_eq!(
            StateVector::<f64>::normalize(vec![c(0.0, 0.0); 3]),
            Err(Error::DegenerateState)
        );
        assert!(matches!(
            StateVector::<f64>::normalize(vec![c(1.0, 0.0)]),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn inner_examples() {
        let e0 = StateVector::<f64>::basis(2, 0).unwrap();
        let e1 = StateVector::<f64>::basis(2, 1).unwrap();
        assert_eq!(e0.inner(&e0).unwrap(), c(1.0, 0.0));
        assert_eq!(e0.inner(&e1).unwrap(), c(0.0, 0.0));

        let u = StateVector::qubit(FRAC_PI_6);
        let v = StateVector::from_real(&[FRAC_PI_6.cos(), -FRAC_PI_6.sin()]).unwrap();
        assert!(close(u.inner(&v).unwrap(), c(0.5, 0.0), 1e-15));
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = StateVector::<f64>::basis(2, 0).unwrap();
        let b = StateVector::<f64>::basis(3, 0).unwrap();
        assert_eq!(a.inner(&b), Err(Error::DimensionError { expected: 2, actual: 3 }));
        assert!(Unitary::identity(3).apply(&a).is_err());
    }

    #[test]
    fn rotation_examples() {
        let id = Unitary::<f64>::qubit_rotation(0.0);
        assert_eq!(id.distance(&Unitary::identity(2)).unwrap(), 0.0);

        let g = 0.37;
        let back = Unitary::qubit_rotation(g).compose(&Unitary::qubit_rotation(-g)).unwrap();
        assert!(back.distance(&Unitary::identity(2)).unwrap() < 1e-15);

        let e0 = StateVector::basis(2, 0).unwrap();
        let out = Unitary::qubit_rotation(g).apply(&e0).unwrap();
        assert!(close(out.amplitude(0), c(g.cos(), 0.0), 1e-15));
        assert!(close(out.amplitude(1), c(g.sin(), 0.0), 1e-15));

        let out = Unitary::qubit_rotation(FRAC_PI_2).apply(&StateVector::qubit(FRAC_PI_6)).unwrap();
        assert!(close(out.amplitude(0), c(-FRAC_PI_6.sin(), 0.0), 1e-15));
        assert!(close(out.amplitude(1), c(FRAC_PI_6.cos(), 0.0), 1e-15));

        // U†|0⟩ for γ = π/3 is orthogonal to (cos π/6, sin π/6)
        let f = Unitary::qubit_rotation(FRAC_PI_3).adjoint().apply(&e0).unwrap();
        assert!(f.inner(&StateVector::qubit(FRAC_PI_6)).unwrap().norm() < 1e-15);
        assert!(close(f.amplitude(1), c(-FRAC_PI_3.sin(), 0.0), 1e-15));
    }

    #[test]
    fn identity_leaves_state() {
        let s = StateVector::normalize(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.0, 0.7)]).unwrap();
        assert_eq!(Unitary::identity(3).apply(&s).unwrap(), s);
    }

    #[test]
    fn unitary_validation() {
        let bad = vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(Unitary::from_rows(bad), Err(Error::NotUnitary { .. })));
        let ragged = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0)]];
        assert!(matches!(Unitary::from_rows(ragged), Err(Error::DimensionError { .. })));
        let h = 0.5f64.sqrt();
        let hadamard = vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]];
        assert!(Unitary::from_rows(hadamard).is_ok());
    }

    #[test]
    fn expectation_examples() {
        let n1 = Observable::<f64>::projector(2, 1).unwrap();
        assert_eq!(n1.expectation(&StateVector::basis(2, 0).unwrap()).unwrap(), 0.0);
        assert_eq!(n1.expectation(&StateVector::basis(2, 1).unwrap()).unwrap(), 1.0);
        let v = n1.expectation(&StateVector::qubit(FRAC_PI_6)).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn observable_rejects_non_hermitian() {
        let rows = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(Observable::from_rows(rows), Err(Error::HermiticityError { .. })));
    }

    #[test]
    fn eigen_of_diagonal_is_sorted_basis() {
        let a = Observable::<f64>::diagonal(&[0.3, -1.0, 0.3]).unwrap();
        let e = a.eigen();
        assert_eq!(e.values, vec![-1.0, 0.3, 0.3]);
        assert_eq!(e.vectors[0], StateVector::basis(3, 1).unwrap());
        assert_eq!(e.vectors[1], StateVector::basis(3, 0).unwrap());
        assert_eq!(e.vectors[2], StateVector::basis(3, 2).unwrap());
    }

    #[test]
    fn eigen_reconstructs_and_is_phased() {
        let rows = vec![
            vec![c(1.0, 0.0), c(0.0, -2.0), c(0.5, 0.5)],
            vec![c(0.0, 2.0), c(-0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.5, -0.5), c(0.0, 0.0), c(2.0, 0.0)],
        ];
        let a = Observable::from_rows(rows).unwrap();
        let e = a.eigen();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for r in 0..3 {
            for col in 0..3 {
                let rebuilt: Complex<f64> = e
                    .values
                    .iter()
                    .zip(&e.vectors)
                    .map(|(val, vec)| vec.amplitude(r) * vec.amplitude(col).conj() * *val)
                    .sum();
                assert!(close(rebuilt, a.entry(r, col), 1e-8));
            }
        }
        for v in &e.vectors {
            let lead = v.amplitudes().iter().find(|z| z.norm() > 1e-6).unwrap();
            assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
        }
    }

    #[test]
    fn single_precision_rotation() {
        let s = Unitary::<f32>::qubit_rotation(0.5).apply(&StateVector::basis(2, 0).unwrap()).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < f32::norm_tolerance());
    }
}
