//! The adapted orthonormal frame at a surface point.
//!
//! Given the unit normal `η = X_{n+1} + Z_{n+1}` (split into its `V` and
//! `Z` parts) the tangent space is spanned by
//!
//! ```text
//! Y_i = X_i          i < q        (in V)
//! Y_q = X_q - Z_q                  X_q ∥ X_{n+1}, Z_q ∥ Z_{n+1}
//! Y_i = Z_i          q < i ≤ n    (in Z)
//! ```
//!
//! with `|X_q| = |Z_{n+1}|` and `|Z_q| = |X_{n+1}|`. When a part of the
//! normal vanishes the corresponding direction is free; it is then taken
//! from the lowest-index basis vector of that subspace. The remaining
//! vectors are completed by Gram-Schmidt in basis-index order.
//!
//! For algebras with one-dimensional center and `J(Z)² = -|Z|²` a second
//! construction pairs the `V` directions under `J(Z)`, which is the basis
//! in which the Heisenberg form of the Laplacian is written.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraVector, NilpotentAlgebra};
use crate::error::{GeometryError, Result};

/// Below this norm a part of the normal counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Generic,
    /// `X_{m+i} = J(Z)X_i`, `J(Z)X_m ∥ X_{2m}`, one-dimensional center.
    HeisenbergPaired,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame {
    pub kind: FrameKind,
    /// Dimension of `V`.
    pub q: usize,
    /// `Y_1..Y_{n+1}`; the last entry is the normal.
    pub y: Vec<AlgebraVector>,
    /// `X_1..X_q`.
    pub x: Vec<AlgebraVector>,
    /// `Z_q..Z_n`, stored at tangent indices `q-1..n-1`; earlier slots are zero.
    pub z: Vec<AlgebraVector>,
    pub x_normal: AlgebraVector,
    pub z_normal: AlgebraVector,
    pub lambda: f64,
    pub mu: f64,
    /// Unit central vector of the paired construction.
    pub center_unit: Option<AlgebraVector>,
}

impl AdaptedFrame {
    /// Number of tangent directions.
    pub fn n(&self) -> usize {
        self.y.len() - 1
    }

    pub fn normal(&self) -> &AlgebraVector {
        &self.y[self.n()]
    }

    pub fn x_q(&self) -> &AlgebraVector {
        &self.x[self.q - 1]
    }

    pub fn z_q(&self) -> &AlgebraVector {
        &self.z[self.q - 1]
    }

    /// `|X_{n+1}|`.
    pub fn normal_v_norm(&self) -> f64 {
        self.x_normal.norm()
    }

    /// `|Z_{n+1}|`.
    pub fn normal_z_norm(&self) -> f64 {
        self.z_normal.norm()
    }

    /// Max entry of `Gram(Y) - Id`.
    pub fn gram_residual(&self) -> f64 {
        let d = self.y.len();
        let m = DMatrix::from_fn(d, d, |i, j| self.y[i].dot(&self.y[j]));
        (m - DMatrix::identity(d, d)).amax()
    }

    /// `|J(Z_q)X_q - J(Z_{n+1})X_{n+1}|`.
    pub fn alignment_residual(&self, alg: &NilpotentAlgebra) -> f64 {
        (alg.j_raw(self.z_q(), self.x_q()) - alg.j_raw(&self.z_normal, &self.x_normal)).norm()
    }

    /// `X_1..X_q, X_{n+1}`: a Parseval frame of `V`.
    pub fn v_frame(&self) -> Vec<AlgebraVector> {
        let mut out = self.x.clone();
        out.push(self.x_normal.clone());
        out
    }

    /// Checks the structural conditions tying the frame to its normal.
    pub fn check(&self, alg: &NilpotentAlgebra, tol: f64) -> Result<()> {
        let residual = self.gram_residual();
        if residual > tol {
            return Err(GeometryError::FrameNotOrthonormal { residual });
        }
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let want = if i + 1 < self.q {
                self.x[i].clone()
            } else if i + 1 == self.q {
                &self.x[i] - &self.z[i]
            } else {
                self.z[i].clone()
            };
            worst = worst.max((&self.y[i] - want).amax());
        }
        for i in 0..self.q {
            worst = worst.max(alg.z_part(&self.x[i]).amax());
        }
        for zi in &self.z {
            worst = worst.max(alg.v_part(zi).amax());
        }
        worst = worst.max((self.x_q().norm() - self.normal_z_norm()).abs());
        worst = worst.max((self.z_q().norm() - self.normal_v_norm()).abs());
        if self.x_q().norm() > tol {
            worst = worst.max((&self.x_normal - self.lambda * self.x_q()).amax());
        }
        if self.z_q().norm() > tol {
            worst = worst.max((&self.z_normal - self.mu * self.z_q()).amax());
        }
        if worst > tol {
            return Err(GeometryError::WrongBasis(format!("adapted frame conditions violated by {worst:.3e}")));
        }
        Ok(())
    }

    /// Replaces the free directions by orthogonal recombinations:
    /// `X_1..X_{q-1}` by `v_rot` and `Z_{q+1}..Z_n` by `z_rot`.
    pub fn recomplete(&self, v_rot: &DMatrix<f64>, z_rot: &DMatrix<f64>) -> Result<AdaptedFrame> {
        let nv = self.q - 1;
        let nz = self.n() - self.q;
        for (m, k) in [(v_rot, nv), (z_rot, nz)] {
            if m.nrows() != k || m.ncols() != k {
                return Err(GeometryError::DimensionMismatch { expected: k, found: m.nrows() });
            }
            let residual = (m.transpose() * m - DMatrix::identity(k, k)).amax();
            if residual > 1e-10 {
                return Err(GeometryError::FrameNotOrthonormal { residual });
            }
        }
        let mut out = self.clone();
        out.kind = FrameKind::Generic;
        for i in 0..nv {
            let v = (0..nv).fold(self.x[0].clone() * 0.0, |acc, j| acc + v_rot[(i, j)] * &self.x[j]);
            out.x[i] = v.clone();
            out.y[i] = v;
        }
        for i in 0..nz {
            let v = (0..nz).fold(self.z[0].clone() * 0.0, |acc, j| acc + z_rot[(i, j)] * &self.z[self.q + j]);
            out.z[self.q + i] = v.clone();
            out.y[self.q + i] = v;
        }
        Ok(out)
    }
}

fn unit_or(v: &AlgebraVector, fallback: AlgebraVector) -> (AlgebraVector, f64) {
    let n = v.norm();
    if n > DEGENERATE_TOL {
        (v / n, n)
    } else {
        (fallback, n)
    }
}

/// Orthonormal completion in basis order: returns `count` unit vectors
/// from `candidates` orthogonal to `against` and to each other.
fn complete(candidates: impl Iterator<Item = AlgebraVector>, against: &[AlgebraVector], count: usize) -> Vec<AlgebraVector> {
    let mut basis: Vec<AlgebraVector> = against.to_vec();
    let mut out = Vec::with_capacity(count);
    for mut c in candidates {
        if out.len() == count {
            break;
        }
        for b in &basis {
            let p = c.dot(b);
            c -= p * b;
        }
        // second pass for numerical orthogonality
        for b in &basis {
            let p = c.dot(b);
            c -= p * b;
        }
        let norm = c.norm();
        if norm > 1e-6 {
            c /= norm;
            basis.push(c.clone());
            out.push(c);
        }
    }
    out
}

fn check_normal(alg: &NilpotentAlgebra, normal: &AlgebraVector) -> Result<()> {
    if normal.len() != alg.dim_total() {
        return Err(GeometryError::DimensionMismatch { expected: alg.dim_total(), found: normal.len() });
    }
    let residual = (normal.norm() - 1.0).abs();
    if residual > 1e-9 {
        return Err(GeometryError::FrameNotOrthonormal { residual });
    }
    Ok(())
}

/// Adapted frame for a unit normal. Uses the paired construction when the
/// algebra has a one-dimensional center and is of Heisenberg type, the
/// generic construction otherwise.
pub fn adapted_frame(alg: &NilpotentAlgebra, normal: &AlgebraVector) -> Result<AdaptedFrame> {
    if alg.dim_center() == 1 && alg.is_heisenberg_type(1e-10) {
        adapted_frame_paired(alg, normal)
    } else {
        adapted_frame_generic(alg, normal)
    }
}

/// Generic construction with Gram-Schmidt completion in index order.
pub fn adapted_frame_generic(alg: &NilpotentAlgebra, normal: &AlgebraVector) -> Result<AdaptedFrame> {
    check_normal(alg, normal)?;
    let d = alg.dim_total();
    let q = alg.dim_v();
    let n = d - 1;
    let x_normal = alg.v_part(normal);
    let z_normal = alg.z_part(normal);
    let (dir_x, a) = unit_or(&x_normal, alg.basis(0));
    let (dir_z, b) = unit_or(&z_normal, alg.basis(q));
    let x_q = b * &dir_x;
    let z_q = a * &dir_z;

    let xs = complete((0..q).map(|i| alg.basis(i)), std::slice::from_ref(&dir_x), q - 1);
    let zs = complete((q..d).map(|i| alg.basis(i)), std::slice::from_ref(&dir_z), n - q);

    let mut x = xs;
    x.push(x_q.clone());
    let mut z = vec![alg.zero(); q - 1];
    z.push(z_q.clone());
    z.extend(zs);

    let mut y: Vec<AlgebraVector> = x[..q - 1].to_vec();
    y.push(&x_q - &z_q);
    y.extend(z[q..].iter().cloned());
    y.push(normal.clone());

    Ok(AdaptedFrame {
        kind: FrameKind::Generic,
        q,
        y,
        x,
        z,
        lambda: if b > DEGENERATE_TOL { a / b } else { 0.0 },
        mu: if a > DEGENERATE_TOL { b / a } else { 0.0 },
        x_normal,
        z_normal,
        center_unit: None,
    })
}

/// Paired construction for a one-dimensional center of Heisenberg type.
///
/// With `Z` the unit central vector on the side of the normal and
/// `u = X_{n+1}/|X_{n+1}|`: `X_m = -J(Z)u`, `X_{2m} = |Z_{n+1}| u`,
/// `Z_{2m} = |X_{n+1}| Z` and `X_{m+i} = J(Z)X_i`. If the normal is
/// central, `X_m` is the first basis vector and `u = J(Z)X_m`.
pub fn adapted_frame_paired(alg: &NilpotentAlgebra, normal: &AlgebraVector) -> Result<AdaptedFrame> {
    check_normal(alg, normal)?;
    if alg.dim_center() != 1 || !alg.is_heisenberg_type(1e-10) {
        return Err(GeometryError::NotHeisenbergType);
    }
    let d = alg.dim_total();
    let q = alg.dim_v();
    let m = q / 2;
    let x_normal = alg.v_part(normal);
    let z_normal = alg.z_part(normal);
    let sign = if normal[q] < 0.0 { -1.0 } else { 1.0 };
    let zu = sign * alg.basis(q);
    let a = x_normal.norm();
    let b = z_normal.norm();
    let j = |v: &AlgebraVector| alg.j_raw(&zu, v);

    let (x_m, u) = if a > DEGENERATE_TOL {
        let u = &x_normal / a;
        (-j(&u), u)
    } else {
        let x_m = alg.basis(0);
        let u = j(&x_m);
        (x_m, u)
    };

    let mut firsts: Vec<AlgebraVector> = Vec::with_capacity(m - 1);
    let mut against = vec![x_m.clone(), u.clone()];
    for cand in (0..q).map(|i| alg.basis(i)) {
        if firsts.len() == m - 1 {
            break;
        }
        let got = complete(std::iter::once(cand), &against, 1);
        if let Some(w) = got.into_iter().next() {
            against.push(w.clone());
            against.push(j(&w));
            firsts.push(w);
        }
    }
    if firsts.len() != m - 1 {
        return Err(GeometryError::WrongBasis("could not complete a J-paired basis".into()));
    }
    let seconds: Vec<AlgebraVector> = firsts.iter().map(j).collect();
    let x_2m = b * &u;
    let z_2m = a * &zu;

    let mut x = firsts.clone();
    x.push(x_m);
    x.extend(seconds);
    x.push(x_2m.clone());
    let mut z = vec![alg.zero(); q - 1];
    z.push(z_2m.clone());

    let mut y: Vec<AlgebraVector> = x[..q - 1].to_vec();
    y.push(&x_2m - &z_2m);
    y.push(normal.clone());
    debug_assert_eq!(y.len(), d);

    Ok(AdaptedFrame {
        kind: FrameKind::HeisenbergPaired,
        q,
        y,
        x,
        z,
        lambda: if b > DEGENERATE_TOL { a / b } else { 0.0 },
        mu: if a > DEGENERATE_TOL { b / a } else { 0.0 },
        x_normal,
        z_normal,
        center_unit: Some(zu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BracketEntry;
    use nalgebra::DVector;

    fn leaf_normal(x: f64) -> AlgebraVector {
        DVector::from_vec(vec![0.0, x, 1.0]) / (1.0 + x * x).sqrt()
    }

    #[test]
    fn nil_leaf_frame() {
        let alg = NilpotentAlgebra::heisenberg(1).unwrap();
        for x in [0.0_f64, 0.5, 1.0, 2.0] {
            let s = (1.0 + x * x).sqrt();
            let mut frames = vec![adapted_frame(&alg, &leaf_normal(x)).unwrap()];
            if x > 0.0 {
                // at x = 0 the generic construction puts X_q on the first basis vector instead
                frames.push(adapted_frame_generic(&alg, &leaf_normal(x)).unwrap());
            }
            for f in frames {
                assert!(f.gram_residual() < 1e-14);
                f.check(&alg, 1e-12).unwrap();
                assert!((&f.y[0] - alg.basis(0)).amax() < 1e-15);
                let want = DVector::from_vec(vec![0.0, 1.0, -x]) / s;
                assert!((&f.y[1] - want).amax() < 1e-15);
                assert!((f.normal_v_norm() - x / s).abs() < 1e-15);
                assert!((f.x_q().norm() - 1.0 / s).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_normals() {
        for alg in [
            NilpotentAlgebra::heisenberg(1).unwrap(),
            NilpotentAlgebra::heisenberg(2).unwrap(),
            NilpotentAlgebra::quaternionic_heisenberg(),
        ] {
            let d = alg.dim_total();
            let q = alg.dim_v();
            let central = alg.basis(d - 1);
            let horizontal = alg.basis(0);
            for normal in [central.clone(), -central, horizontal.clone(), -horizontal] {
                for f in [adapted_frame(&alg, &normal).unwrap(), adapted_frame_generic(&alg, &normal).unwrap()] {
                    assert!(f.gram_residual() < 1e-10);
                    f.check(&alg, 1e-10).unwrap();
                    if alg.z_part(&normal).norm() == 0.0 {
                        // Y_q = -Z_q with |Z_q| = 1
                        assert!((f.z_q().norm() - 1.0).abs() < 1e-12);
                        assert!(f.x_q().norm() < 1e-12);
                    } else {
                        assert!(alg.z_part(&f.y[q - 1]).norm() < 1e-12);
                        assert_eq!(f.lambda, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn paired_basis_relations() {
        let alg = NilpotentAlgebra::heisenberg(3).unwrap();
        let normal = DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1, 0.4, -0.6, 0.7]).normalize();
        let f = adapted_frame(&alg, &normal).unwrap();
        assert_eq!(f.kind, FrameKind::HeisenbergPaired);
        f.check(&alg, 1e-12).unwrap();
        let zu = f.center_unit.clone().unwrap();
        let m = 3;
        for i in 0..m - 1 {
            assert!((alg.j_raw(&zu, &f.x[i]) - &f.x[m + i]).amax() < 1e-12);
        }
        let jxm = alg.j_raw(&zu, &f.x[m - 1]);
        assert!((jxm - &f.x[2 * m - 1] / f.normal_z_norm()).amax() < 1e-12);
        assert!(f.alignment_residual(&alg) < 1e-12);
    }

    #[test]
    fn generic_frame_on_non_h_type() {
        let alg = NilpotentAlgebra::from_brackets(
            5,
            2,
            &[BracketEntry { i: 1, j: 2, k: 4, c: 1.0 }, BracketEntry { i: 1, j: 3, k: 5, c: 1.0 }],
        )
        .unwrap();
        let normal = DVector::from_vec(vec![0.1, 0.7, -0.3, 0.5, 0.2]).normalize();
        let f = adapted_frame(&alg, &normal).unwrap();
        assert_eq!(f.kind, FrameKind::Generic);
        f.check(&alg, 1e-12).unwrap();
        assert!(f.lambda > 0.0 && f.mu > 0.0);
        assert!(f.alignment_residual(&alg) < 1e-12);
        let r = f.recomplete(&DMatrix::from_row_slice(2, 2, &[0.6, 0.8, -0.8, 0.6]), &DMatrix::identity(1, 1)).unwrap();
        r.check(&alg, 1e-12).unwrap();
    }

    #[test]
    fn rejects_non_unit_normal() {
        let alg = NilpotentAlgebra::heisenberg(1).unwrap();
        assert!(adapted_frame(&alg, &DVector::from_vec(vec![0.0, 0.0, 2.0])).is_err());
    }
}
