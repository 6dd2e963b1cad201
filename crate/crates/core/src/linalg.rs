//! Small dense linear algebra on fixed-size matrices, generic over [`Real`].
//!
//! nalgebra's decompositions require `RealField`; the routines here only need
//! field arithmetic so they work for any [`Real`].

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use crate::real::Real;

pub fn norm<T: Real, const N: usize>(v: &SVector<T, N>) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Largest absolute entry.
pub fn max_abs<T: Real, const R: usize, const C: usize>(m: &SMatrix<T, R, C>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn frobenius<T: Real, const R: usize, const C: usize>(m: &SMatrix<T, R, C>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// `max_abs(a - b) / max(1, max_abs(a), max_abs(b))`.
pub fn rel_diff<T: Real, const R: usize, const C: usize>(a: &SMatrix<T, R, C>, b: &SMatrix<T, R, C>) -> T {
    let scale = T::one().max(max_abs(a)).max(max_abs(b));
    max_abs(&(a - b)) / scale
}

pub fn trace<T: Real, const N: usize>(m: &SMatrix<T, N, N>) -> T {
    (0..N).fold(T::zero(), |acc, i| acc + m[(i, i)])
}

pub fn outer<T: Real, const N: usize>(a: &SVector<T, N>, b: &SVector<T, N>) -> SMatrix<T, N, N> {
    SMatrix::<T, N, N>::from_fn(|i, j| a[i] * b[j])
}

pub fn symmetric_part<T: Real, const N: usize>(m: &SMatrix<T, N, N>) -> SMatrix<T, N, N> {
    (m + m.transpose()) * T::half()
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T: Real, const N: usize> {
    lu: SMatrix<T, N, N>,
    perm: [usize; N],
    sign: T,
}

impl<T: Real, const N: usize> Lu<T, N> {
    /// Returns `None` when a pivot is exactly zero.
    pub fn new(a: &SMatrix<T, N, N>) -> Option<Self> {
        let mut lu = *a;
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut sign = T::one();
        for k in 0..N {
            let mut piv = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..N {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return None;
            }
            if piv != k {
                lu.swap_rows(piv, k);
                perm.swap(piv, k);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in k + 1..N {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..N {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Some(Self { lu, perm, sign })
    }

    pub fn determinant(&self) -> T {
        (0..N).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &SVector<T, N>) -> SVector<T, N> {
        let mut x = SVector::<T, N>::from_fn(|i, _| b[self.perm[i]]);
        for i in 0..N {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..N).rev() {
            for j in i + 1..N {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> SMatrix<T, N, N> {
        let mut inv = SMatrix::<T, N, N>::zeros();
        for j in 0..N {
            let mut e = SVector::<T, N>::zeros();
            e[j] = T::one();
            inv.set_column(j, &self.solve(&e));
        }
        inv
    }
}

pub fn determinant<T: Real, const N: usize>(a: &SMatrix<T, N, N>) -> T {
    Lu::new(a).map_or(T::zero(), |lu| lu.determinant())
}

pub fn solve<T: Real, const N: usize>(a: &SMatrix<T, N, N>, b: &SVector<T, N>) -> Option<SVector<T, N>> {
    Lu::new(a).map(|lu| lu.solve(b))
}

pub fn inverse<T: Real, const N: usize>(a: &SMatrix<T, N, N>) -> Option<SMatrix<T, N, N>> {
    Lu::new(a).map(|lu| lu.inverse())
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real, const N: usize>(a: &SMatrix<T, N, N>) -> SVector<T, N> {
    let mut m = symmetric_part(a);
    let scale = max_abs(&m);
    if scale == T::zero() {
        return SVector::zeros();
    }
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..N {
            for j in i + 1..N {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= T::epsilon() * scale * T::lit(1e-2) {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..N {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..N).map(|i| m[(i, i)]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    SVector::<T, N>::from_iterator(ev)
}

/// Nearest orthogonal matrix by Björck–Bowie iteration `X <- X (3I - XᵀX) / 2`.
///
/// Converges quadratically for inputs already close to orthogonal, which is
/// the only situation it is used in (post-step correction of integrated
/// rotations).
pub fn orthonormalize<T: Real>(c: &Matrix3<T>) -> Matrix3<T> {
    let eye = Matrix3::<T>::identity();
    let three = T::lit(3.0);
    let mut x = *c;
    for _ in 0..16 {
        let gram = x.transpose() * x;
        let err = max_abs(&(gram - eye));
        if err <= T::epsilon() {
            break;
        }
        x = x * (eye * three - gram) * T::half();
    }
    x
}

/// `‖CᵀC − I‖_max`.
pub fn orthogonality_residual<T: Real>(c: &Matrix3<T>) -> T {
    max_abs(&(c.transpose() * c - Matrix3::identity()))
}

pub fn vec3<T: Real>(x: f64, y: f64, z: f64) -> Vector3<T> {
    Vector3::new(T::lit(x), T::lit(y), T::lit(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix4, Vector4};

    #[test]
    fn lu_solves_and_inverts() {
        let a = Matrix4::new(
            4.0, 1.0, 0.0, 2.0, 1.0, 3.0, 1.0, 0.0, 0.0, 1.0, 5.0, 1.0, 2.0, 0.0, 1.0, 6.0,
        );
        let b = Vector4::new(1.0, 2.0, 3.0, 4.0);
        let x = solve(&a, &b).unwrap();
        assert!(norm(&(a * x - b)) < 1e-13);
        let inv = inverse(&a).unwrap();
        assert!(rel_diff(&(a * inv), &Matrix4::identity()) < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_lu() {
        let a = Matrix3::<f64>::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0);
        assert!(Lu::new(&a).map_or(true, |lu| lu.determinant().abs() < 1e-14));
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        let a = Matrix3::<f64>::new(2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0);
        let ev = symmetric_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
        assert!((ev[2] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormalize_restores_rotation() {
        let (s, c) = 0.3f64.sin_cos();
        let r = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        let perturbed = r + Matrix3::from_element(1e-7);
        let fixed = orthonormalize(&perturbed);
        assert!(orthogonality_residual(&fixed) < 1e-15);
        assert!(max_abs(&(fixed - r)) < 1e-6);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix3::<f32>::new(2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 4.0);
        assert!((determinant(&a) - 24.0).abs() < 1e-5);
    }
}
