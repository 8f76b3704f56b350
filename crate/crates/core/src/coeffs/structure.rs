//! Complex matrix of an almost complex structure on ℂ² ≅ ℝ⁴.
//!
//! Coordinates are ordered `(x₁, y₁, x₂, y₂)`. The complex matrix `A` is the
//! unique ℂ-linear map with `A v = (J_st + J)⁻¹ (J_st − J) v̄`.

use num_complex::Complex;

use crate::coeffs::Triple;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub type RealMatrix4<T> = [[T; 4]; 4];
pub type ComplexMatrix2<T> = [[Complex<T>; 2]; 2];

/// Off-diagonal modulus below which `A` counts as lower triangular.
pub const TRIANGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum StructureMatrix<T: Real> {
    Triangular(Triple<Complex<T>>),
    Full(ComplexMatrix2<T>),
}

/// Multiplication by `i` on each complex coordinate.
pub fn standard_structure<T: Real>() -> RealMatrix4<T> {
    let (o, l) = (T::zero(), T::one());
    [[o, -l, o, o], [l, o, o, o], [o, o, o, -l], [o, o, l, o]]
}

fn identity<T: Real>() -> RealMatrix4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

fn mat_mul<T: Real>(a: &RealMatrix4<T>, b: &RealMatrix4<T>) -> RealMatrix4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).fold(T::zero(), |s, k| s + a[i][k] * b[k][j]);
        }
    }
    m
}

fn combine<T: Real>(a: &RealMatrix4<T>, b: &RealMatrix4<T>, sign: T) -> RealMatrix4<T> {
    let mut m = *a;
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i][j] + sign * b[i][j];
        }
    }
    m
}

/// Solves `lhs · X = rhs` by Gaussian elimination with partial pivoting.
fn solve4<T: Real>(lhs: &RealMatrix4<T>, rhs: &RealMatrix4<T>) -> Option<RealMatrix4<T>> {
    let mut a = *lhs;
    let mut b = *rhs;
    let scale = a.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() <= T::lit(1e-13) * scale.max(T::one()) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..4 {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in 0..4 {
                    a[row][k] = a[row][k] - f * a[col][k];
                    b[row][k] = b[row][k] - f * b[col][k];
                }
            }
        }
    }
    for row in 0..4 {
        let d = a[row][row];
        for k in 0..4 {
            b[row][k] = b[row][k] / d;
        }
    }
    Some(b)
}

/// Real matrix of `v ↦ A v̄`.
fn conjugate_linear_matrix<T: Real>(a: &ComplexMatrix2<T>) -> RealMatrix4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for r in 0..2 {
        for c in 0..2 {
            let (p, q) = (a[r][c].re, a[r][c].im);
            m[2 * r][2 * c] = p;
            m[2 * r][2 * c + 1] = q;
            m[2 * r + 1][2 * c] = q;
            m[2 * r + 1][2 * c + 1] = -p;
        }
    }
    m
}

/// Complex matrix `A` of the structure `j`.
pub fn complex_matrix<T: Real>(j: &RealMatrix4<T>) -> Result<ComplexMatrix2<T>> {
    let sq = mat_mul(j, j);
    let id = identity::<T>();
    let defect = (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).fold(T::zero(), |m, (r, c)| {
        m.max((sq[r][c] + id[r][c]).abs())
    });
    if defect > T::lit(1e-9) {
        return Err(Error::InvalidArgument(format!("J² ≠ −I (defect {defect:e})")));
    }
    let st = standard_structure::<T>();
    let l = solve4(&combine(&st, j, T::one()), &combine(&st, j, -T::one()))
        .ok_or_else(|| Error::Degenerate("det(J_st + J) = 0".into()))?;
    let mut a = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            a[r][c] = Complex::new(l[2 * r][2 * c], l[2 * r + 1][2 * c]);
        }
    }
    if !is_elliptic(&a) {
        return Err(Error::Degenerate("det(I − A·conj(A)) = 0".into()));
    }
    Ok(a)
}

/// Structure with complex matrix `a`: `J = J_st (I − M)(I + M)⁻¹`, `M v = A v̄`.
pub fn structure_from_matrix<T: Real>(a: &ComplexMatrix2<T>) -> Result<RealMatrix4<T>> {
    let m = conjugate_linear_matrix(a);
    let id = identity::<T>();
    let plus = combine(&id, &m, T::one());
    let minus = combine(&id, &m, -T::one());
    // X = (I − M)(I + M)⁻¹ ⇔ (I + M)ᵀ Xᵀ = (I − M)ᵀ
    let xt = solve4(&transpose(&plus), &transpose(&minus))
        .ok_or_else(|| Error::Degenerate("I + M is singular".into()))?;
    Ok(mat_mul(&standard_structure(), &transpose(&xt)))
}

fn transpose<T: Real>(a: &RealMatrix4<T>) -> RealMatrix4<T> {
    let mut t = *a;
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// `det(I − A·conj(A)) ≠ 0`.
pub fn is_elliptic<T: Real>(a: &ComplexMatrix2<T>) -> bool {
    let one = Complex::new(T::one(), T::zero());
    let ab = |r: usize, c: usize| a[r][0] * a[0][c].conj() + a[r][1] * a[1][c].conj();
    let det = (one - ab(0, 0)) * (one - ab(1, 1)) - ab(0, 1) * ab(1, 0);
    det.norm() > T::lit(1e-12)
}

/// Complex matrix of `j`, reported as a triple when it is lower triangular.
pub fn matrix_from_structure<T: Real>(j: &RealMatrix4<T>) -> Result<StructureMatrix<T>> {
    let a = complex_matrix(j)?;
    if a[0][1].norm() <= T::lit(TRIANGULAR_TOL) {
        Ok(StructureMatrix::Triangular(Triple { a: a[0][0], b: a[1][0], c: a[1][1] }))
    } else {
        Ok(StructureMatrix::Full(a))
    }
}

/// Like [`matrix_from_structure`] but insists on the triangular form.
pub fn triple_from_structure<T: Real>(j: &RealMatrix4<T>) -> Result<Triple<Complex<T>>> {
    match matrix_from_structure(j)? {
        StructureMatrix::Triangular(t) => Ok(t),
        StructureMatrix::Full(a) => {
            Err(Error::InvalidArgument(format!("complex matrix is not lower triangular (|A₁₂| = {:e})", a[0][1].norm())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;

    #[test]
    fn standard_structure_has_zero_matrix() {
        let a = complex_matrix(&standard_structure::<f64>()).unwrap();
        assert!(a.iter().flatten().all(|v| v.norm() == 0.0));
        let zero = [[C::new(0.0, 0.0); 2]; 2];
        assert_eq!(structure_from_matrix(&zero).unwrap(), standard_structure());
    }

    #[test]
    fn random_triangular_matrices_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let disc = |rng: &mut rand_chacha::ChaCha8Rng, r: f64| {
            C::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
        };
        for _ in 0..200 {
            let t = Triple { a: disc(&mut rng, 0.5), b: disc(&mut rng, 2.0), c: disc(&mut rng, 0.5) };
            let a = [[t.a, C::new(0.0, 0.0)], [t.b, t.c]];
            let j = structure_from_matrix(&a).unwrap();
            let sq = mat_mul(&j, &j);
            for r in 0..4 {
                for c in 0..4 {
                    let want = if r == c { -1.0 } else { 0.0 };
                    assert!((sq[r][c] - want).abs() < 1e-10);
                }
            }
            let back = triple_from_structure(&j).unwrap();
            assert!((back.a - t.a).norm() < 1e-10);
            assert!((back.b - t.b).norm() < 1e-10);
            assert!((back.c - t.c).norm() < 1e-10);
        }
    }

    #[test]
    fn recovered_map_is_complex_linear() {
        let a = [[C::new(0.2, 0.1), C::new(0.05, -0.3)], [C::new(0.4, 0.0), C::new(-0.1, 0.25)]];
        let j = structure_from_matrix(&a).unwrap();
        let st = standard_structure::<f64>();
        let l = solve4(&combine(&st, &j, 1.0), &combine(&st, &j, -1.0)).unwrap();
        // L(conj(i v)) = i L(conj v): L anticommutes with J_st.
        let lhs = mat_mul(&l, &st);
        let rhs = mat_mul(&st, &l);
        for r in 0..4 {
            for c in 0..4 {
                assert!((lhs[r][c] + rhs[r][c]).abs() < 1e-12);
            }
        }
        match matrix_from_structure(&j).unwrap() {
            StructureMatrix::Full(back) => assert!((back[0][1] - a[0][1]).norm() < 1e-12),
            StructureMatrix::Triangular(_) => panic!("expected a full matrix"),
        }
        assert!(triple_from_structure(&j).is_err());
    }

    #[test]
    fn degenerate_structure_is_rejected() {
        let st = standard_structure::<f64>();
        let mut neg = st;
        neg.iter_mut().flatten().for_each(|v| *v = -*v);
        assert!(matches!(complex_matrix(&neg), Err(Error::Degenerate(_))));
        let id = identity::<f64>();
        assert!(matches!(complex_matrix(&id), Err(Error::InvalidArgument(_))));
    }
}
