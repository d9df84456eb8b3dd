//! Levi-Civita connection, curvature and Ricci tensor of the left-invariant
//! metric, evaluated on left-invariant fields.
//!
//! Curvature convention: `R(X,Y)W = ∇_X ∇_Y W - ∇_Y ∇_X W - ∇_[X,Y] W`.

use nalgebra::DMatrix;

use crate::algebra::{AlgebraVector, NilpotentAlgebra};
use crate::error::{GeometryError, Result};

fn check(alg: &NilpotentAlgebra, vs: &[&AlgebraVector]) -> Result<()> {
    for v in vs {
        if v.len() != alg.dim_total() {
            return Err(GeometryError::DimensionMismatch { expected: alg.dim_total(), found: v.len() });
        }
    }
    Ok(())
}

/// `∇_a b` for left-invariant `a`, `b`:
/// `½[X_a, X_b] - ½J(Z_b)X_a - ½J(Z_a)X_b`.
pub fn connection(alg: &NilpotentAlgebra, a: &AlgebraVector, b: &AlgebraVector) -> Result<AlgebraVector> {
    check(alg, &[a, b])?;
    Ok(connection_raw(alg, a, b))
}

pub(crate) fn connection_raw(alg: &NilpotentAlgebra, a: &AlgebraVector, b: &AlgebraVector) -> AlgebraVector {
    let (av, bv) = (alg.v_part(a), alg.v_part(b));
    0.5 * alg.bracket_raw(&av, &bv) - 0.5 * alg.j_raw(b, &av) - 0.5 * alg.j_raw(a, &bv)
}

/// Curvature from the closed-form case table, extended trilinearly over
/// the `V`/`Z` split of each argument.
pub fn curvature(
    alg: &NilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
    w: &AlgebraVector,
) -> Result<AlgebraVector> {
    check(alg, &[x, y, w])?;
    Ok(curvature_raw(alg, x, y, w))
}

pub(crate) fn curvature_raw(
    alg: &NilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
    w: &AlgebraVector,
) -> AlgebraVector {
    let (xv, xz) = (alg.v_part(x), alg.z_part(x));
    let (yv, yz) = (alg.v_part(y), alg.z_part(y));
    let (wv, wz) = (alg.v_part(w), alg.z_part(w));
    let br = |a: &AlgebraVector, b: &AlgebraVector| alg.bracket_raw(a, b);
    let j = |z: &AlgebraVector, v: &AlgebraVector| alg.j_raw(z, v);

    // R(X,Y)X* = ½J([X,Y])X* - ¼J([Y,X*])X + ¼J([X,X*])Y
    let vvv = 0.5 * j(&br(&xv, &yv), &wv) - 0.25 * j(&br(&yv, &wv), &xv)
        + 0.25 * j(&br(&xv, &wv), &yv);
    // R(X,Y)Z = -¼[X,J(Z)Y] + ¼[Y,J(Z)X]
    let vvz = -0.25 * br(&xv, &j(&wz, &yv)) + 0.25 * br(&yv, &j(&wz, &xv));
    // R(X,Z)Y = -¼[X,J(Z)Y], and R(Z,X)Y = -R(X,Z)Y
    let vzv = -0.25 * br(&xv, &j(&yz, &wv));
    let zvv = 0.25 * br(&yv, &j(&xz, &wv));
    // R(X,Z)Z* = -¼J(Z)J(Z*)X, and R(Z,X)Z* = -R(X,Z)Z*
    let vzz = -0.25 * j(&yz, &j(&wz, &xv));
    let zvz = 0.25 * j(&xz, &j(&wz, &yv));
    // R(Z,Z*)X = -¼J(Z*)J(Z)X + ¼J(Z)J(Z*)X
    let zzv = -0.25 * j(&yz, &j(&xz, &wv)) + 0.25 * j(&xz, &j(&yz, &wv));
    vvv + vvz + vzv + zvv + vzz + zvz + zzv
}

/// Curvature straight from the definition, composing `connection` and
/// `bracket` on left-invariant fields.
pub fn curvature_oracle(
    alg: &NilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
    w: &AlgebraVector,
) -> Result<AlgebraVector> {
    check(alg, &[x, y, w])?;
    let nab = |a: &AlgebraVector, b: &AlgebraVector| connection_raw(alg, a, b);
    let xy = alg.bracket_raw(x, y);
    Ok(nab(x, &nab(y, w)) - nab(y, &nab(x, w)) - nab(&xy, w))
}

/// Ricci tensor in closed form:
/// `½ Σ_k <J(Z_k)² X, Y>` on `V`, `-¼ Tr(J(Z)J(Z*))` on `Z`, zero mixed.
pub fn ricci(alg: &NilpotentAlgebra, a: &AlgebraVector, b: &AlgebraVector) -> Result<f64> {
    check(alg, &[a, b])?;
    Ok(ricci_raw(alg, a, b))
}

pub(crate) fn ricci_raw(alg: &NilpotentAlgebra, a: &AlgebraVector, b: &AlgebraVector) -> f64 {
    let q = alg.dim_v();
    let av = a.rows(0, q);
    let bv = b.rows(0, q);
    let mut vv = 0.0;
    for k in 0..alg.dim_center() {
        let jk = alg.j_operator(k);
        vv += (jk * (jk * av)).dot(&bv);
    }
    let ja: DMatrix<f64> = alg.j_matrix(a);
    let jb: DMatrix<f64> = alg.j_matrix(b);
    0.5 * vv - 0.25 * (ja * jb).trace()
}

/// Ricci as the trace `Σ_i <R(e_i, a) b, e_i>` of the closed-form curvature.
pub fn ricci_trace(alg: &NilpotentAlgebra, a: &AlgebraVector, b: &AlgebraVector) -> Result<f64> {
    check(alg, &[a, b])?;
    Ok((0..alg.dim_total())
        .map(|i| {
            let e = alg.basis(i);
            curvature_raw(alg, &e, a, b)[i]
        })
        .sum())
}

/// `|Σ_i <J([x, X_i]) X_i, y> - 2 Ric(x, y)|` over a `V`-frame.
///
/// `frame` must be a Parseval frame of `V`: `Σ X_i X_iᵀ = Id_V`. An
/// orthonormal basis qualifies, and so does the list `X_1..X_q, X_{n+1}`
/// taken from an adapted frame, where `X_q` and `X_{n+1}` are parallel with
/// squared norms summing to one.
pub fn ricci_identity_check(
    alg: &NilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
    frame: &[AlgebraVector],
) -> Result<f64> {
    check(alg, &[x, y])?;
    let q = alg.dim_v();
    let mut gram = DMatrix::<f64>::zeros(q, q);
    for f in frame {
        check(alg, &[f])?;
        let fz = alg.z_part(f).norm();
        if fz > 1e-10 {
            return Err(GeometryError::NotInSubspace { subspace: "complement", norm: fz });
        }
        let fv = f.rows(0, q);
        gram += fv * fv.transpose();
    }
    let residual = (gram - DMatrix::identity(q, q)).amax();
    if residual > 1e-10 {
        return Err(GeometryError::FrameNotOrthonormal { residual });
    }
    let lhs: f64 = frame
        .iter()
        .map(|xi| alg.j_raw(&alg.bracket_raw(x, xi), xi).dot(y))
        .sum();
    Ok((lhs - 2.0 * ricci_raw(alg, x, y)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> NilpotentAlgebra {
        NilpotentAlgebra::heisenberg(1).unwrap()
    }

    #[test]
    fn connection_on_nil() {
        let a = h1();
        let (k, l, z) = (a.basis(0), a.basis(1), a.basis(2));
        assert_eq!(connection(&a, &k, &l).unwrap(), 0.5 * &z);
        assert_eq!(connection(&a, &z, &z).unwrap(), a.zero());
        assert_eq!(connection(&a, &k, &z).unwrap(), -0.5 * &l);
        assert_eq!(connection(&a, &z, &k).unwrap(), -0.5 * &l);
    }

    #[test]
    fn curvature_on_nil() {
        let a = h1();
        let (k, z) = (a.basis(0), a.basis(2));
        assert_eq!(curvature(&a, &k, &z, &z).unwrap(), 0.25 * &k);
        assert_eq!(curvature_oracle(&a, &k, &z, &z).unwrap(), 0.25 * &k);
        assert_eq!(curvature(&a, &z, &z, &z).unwrap(), a.zero());
        assert_eq!(curvature(&a, &k, &k, &z).unwrap(), a.zero());
    }

    #[test]
    fn ricci_values_on_heisenberg() {
        for m in 1..=3 {
            let a = NilpotentAlgebra::heisenberg(m).unwrap();
            let (k1, z) = (a.basis(0), a.basis(2 * m));
            assert!((ricci(&a, &k1, &k1).unwrap() + 0.5).abs() < 1e-12);
            assert!((ricci(&a, &z, &z).unwrap() - m as f64 / 2.0).abs() < 1e-12);
            assert_eq!(ricci(&a, &k1, &z).unwrap(), 0.0);
            assert!((ricci_trace(&a, &k1, &k1).unwrap() + 0.5).abs() < 1e-12);
            assert!((ricci_trace(&a, &z, &z).unwrap() - m as f64 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ricci_identity_standard_basis() {
        let a = h1();
        let frame = [a.basis(0), a.basis(1)];
        let k = a.basis(0);
        assert!(ricci_identity_check(&a, &k, &k, &frame).unwrap() < 1e-12);
        assert_eq!(ricci_identity_check(&a, &a.zero(), &k, &frame).unwrap(), 0.0);
        assert!(matches!(
            ricci_identity_check(&a, &k, &k, &[a.basis(0)]),
            Err(GeometryError::FrameNotOrthonormal { .. })
        ));
    }
}
