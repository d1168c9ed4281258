//! Cyclic Jacobi diagonalization of small dense Hermitian matrices.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Diagonalizes the row-major Hermitian matrix `a` of size `dim × dim`.
///
/// Returns the eigenvalues (in no particular order) and the matrix of
/// eigenvectors, also row-major, whose `k`-th column belongs to the `k`-th
/// eigenvalue.
pub(crate) fn jacobi_hermitian<T: Real>(dim: usize, a: &[Complex<T>]) -> (Vec<T>, Vec<Complex<T>>) {
    debug_assert_eq!(a.len(), dim * dim);
    let mut a = a.to_vec();
    let mut v = vec![Complex::<T>::zero(); dim * dim];
    for k in 0..dim {
        v[k * dim + k] = Complex::one();
    }

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let threshold = T::epsilon() * scale;

    let mut previous = T::infinity();
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(dim, &a);
        // stalled at roundoff
        if off <= threshold || off >= previous {
            break;
        }
        previous = off;
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate(dim, &mut a, &mut v, p, q);
            }
        }
    }

    let values = (0..dim).map(|k| a[k * dim + k].re).collect();
    (values, v)
}

fn off_diagonal_norm<T: Real>(dim: usize, a: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for r in 0..dim {
        for c in 0..dim {
            if r != c {
                acc = acc + a[r * dim + c].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Zeroes `a[p][q]` (and `a[q][p]`) with the similarity `A ← J† A J`,
/// accumulating `V ← V J`.
fn rotate<T: Real>(dim: usize, a: &mut [Complex<T>], v: &mut [Complex<T>], p: usize, q: usize) {
    let apq = a[p * dim + q];
    let magnitude = apq.norm();
    if magnitude == T::zero() {
        return;
    }
    // e^{-iθ} with a_pq = |a_pq| e^{iθ}
    let phase = apq.conj() / magnitude;
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;

    let tau = (aqq - app) / (T::lit(2.0) * magnitude);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let jpp = Complex::new(c, T::zero());
    let jpq = Complex::new(s, T::zero());
    let jqp = phase * (-s);
    let jqq = phase * c;

    for k in 0..dim {
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        a[k * dim + p] = akp * jpp + akq * jqp;
        a[k * dim + q] = akp * jpq + akq * jqq;

        let vkp = v[k * dim + p];
        let vkq = v[k * dim + q];
        v[k * dim + p] = vkp * jpp + vkq * jqp;
        v[k * dim + q] = vkp * jpq + vkq * jqq;
    }
    for k in 0..dim {
        let apk = a[p * dim + k];
        let aqk = a[q * dim + k];
        a[p * dim + k] = jpp.conj() * apk + jqp.conj() * aqk;
        a[q * dim + k] = jpq.conj() * apk + jqq.conj() * aqk;
    }

    a[p * dim + q] = Complex::zero();
    a[q * dim + p] = Complex::zero();
    a[p * dim + p] = Complex::new(a[p * dim + p].re, T::zero());
    a[q * dim + q] = Complex::new(a[q * dim + q].re, T::zero());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let y = [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let (mut values, _) = jacobi_hermitian(2, &y);
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((values[0] + 1.0).abs() < 1e-14);
        assert!((values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_3x3_reconstructs() {
        let a = [
            c(2.0, 0.0),
            c(1.0, -0.5),
            c(0.0, 0.3),
            c(1.0, 0.5),
            c(-1.0, 0.0),
            c(0.2, 0.0),
            c(0.0, -0.3),
            c(0.2, 0.0),
            c(0.5, 0.0),
        ];
        let (values, v) = jacobi_hermitian(3, &a);
        for r in 0..3 {
            for col in 0..3 {
                let mut acc = c(0.0, 0.0);
                for k in 0..3 {
                    acc += v[r * 3 + k] * values[k] * v[col * 3 + k].conj();
                }
                assert!((acc - a[r * 3 + col]).norm() < 1e-12);
            }
        }
    }
}
