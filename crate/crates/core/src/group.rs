//! Coordinate realizations of the simply connected group.
//!
//! A [`CoordinateModel`] fixes global coordinates on `N` and expresses the
//! left-invariant frame as coordinate vector fields. Two models exist:
//!
//! * exponential coordinates for any 2-step algebra, with product
//!   `p·q = p + q + ½[p, q]` and left-invariant fields `e_a + ½[p, e_a]`;
//! * polarized coordinates on Nil, with `X = ∂x`, `Y = ∂y + x∂z`, `Z = ∂z`
//!   and product `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+xy')`.
//!
//! Frame fields are polynomial in the coordinates and are written against
//! [`Scalar`], so metric derivatives come out of forward-mode AD exactly.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::NilpotentAlgebra;
use crate::autodiff::{invert, Dual, Scalar};
use crate::error::{GeometryError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(rename = "exp")]
    Exponential,
    NilPolarized,
}

/// A point of `N` in model coordinates. It carries no reference to its
/// model; callers pair points with the right model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint(pub Vec<f64>);

impl GroupPoint {
    pub fn origin(dim: usize) -> Self {
        GroupPoint(vec![0.0; dim])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateModel {
    algebra: NilpotentAlgebra,
    kind: ModelKind,
}

/// Christoffel symbols `Γ^m_ij` of the coordinate metric at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffels {
    dim: usize,
    gamma: Vec<f64>,
}

impl Christoffels {
    pub fn get(&self, m: usize, i: usize, j: usize) -> f64 {
        self.gamma[(m * self.dim + i) * self.dim + j]
    }

    /// `Γ^m_ij a^i b^j`.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |m, _| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    s += self.get(m, i, j) * a[i] * b[j];
                }
            }
            s
        })
    }
}

impl CoordinateModel {
    /// Exponential coordinates for an arbitrary 2-step algebra.
    pub fn exp_model(algebra: NilpotentAlgebra) -> Self {
        CoordinateModel { algebra, kind: ModelKind::Exponential }
    }

    /// Polarized coordinates on Nil, over `heisenberg(1)` with basis `X, Y, Z`.
    pub fn nil_polarized() -> Self {
        CoordinateModel {
            algebra: NilpotentAlgebra::heisenberg(1).expect("m = 1"),
            kind: ModelKind::NilPolarized,
        }
    }

    pub fn new(kind: ModelKind, algebra: NilpotentAlgebra) -> Result<Self> {
        match kind {
            ModelKind::Exponential => Ok(Self::exp_model(algebra)),
            ModelKind::NilPolarized => {
                if algebra != NilpotentAlgebra::heisenberg(1)? {
                    return Err(GeometryError::Config(
                        "the nil_polarized model requires the heisenberg(1) algebra".into(),
                    ));
                }
                Ok(Self::nil_polarized())
            }
        }
    }

    pub fn algebra(&self) -> &NilpotentAlgebra {
        &self.algebra
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim_total()
    }

    /// Frame matrix: entry `[i][a]` is the `i`-th coordinate component of
    /// the left-invariant field extending `e_a`.
    pub fn frame_matrix<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        let d = self.dim();
        match self.kind {
            ModelKind::Exponential => (0..d)
                .map(|i| {
                    (0..d)
                        .map(|a| {
                            let mut acc = S::from_f64(if i == a { 1.0 } else { 0.0 });
                            for (j, pj) in p.iter().enumerate() {
                                let c = self.algebra.c(j, a, i);
                                if c != 0.0 {
                                    acc = acc + S::from_f64(0.5 * c) * pj.clone();
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect(),
            ModelKind::NilPolarized => {
                let zero = || S::from_f64(0.0);
                let one = || S::from_f64(1.0);
                vec![
                    vec![one(), zero(), zero()],
                    vec![zero(), one(), zero()],
                    vec![zero(), p[0].clone(), one()],
                ]
            }
        }
    }

    pub fn frame_field(&self, p: &GroupPoint) -> Result<DMatrix<f64>> {
        self.check(p)?;
        let f = self.frame_matrix(&p.0);
        Ok(DMatrix::from_fn(self.dim(), self.dim(), |i, a| f[i][a]))
    }

    /// Inverse of the frame matrix: maps coordinate vectors to algebra
    /// coordinates in the left-invariant frame.
    pub fn inverse_frame(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let f = self.frame_matrix(p);
        let m = DMatrix::from_fn(self.dim(), self.dim(), |i, a| f[i][a]);
        m.try_inverse().ok_or(GeometryError::Singular("frame matrix"))
    }

    pub fn multiply_generic<S: Scalar>(&self, p: &[S], q: &[S]) -> Vec<S> {
        match self.kind {
            ModelKind::Exponential => {
                let d = self.dim();
                let mut out: Vec<S> = p.iter().zip(q).map(|(a, b)| a.clone() + b.clone()).collect();
                for i in 0..d {
                    for j in 0..d {
                        for (k, o) in out.iter_mut().enumerate() {
                            let c = self.algebra.c(i, j, k);
                            if c != 0.0 {
                                *o = o.clone() + S::from_f64(0.5 * c) * p[i].clone() * q[j].clone();
                            }
                        }
                    }
                }
                out
            }
            ModelKind::NilPolarized => vec![
                p[0].clone() + q[0].clone(),
                p[1].clone() + q[1].clone(),
                p[2].clone() + q[2].clone() + p[0].clone() * q[1].clone(),
            ],
        }
    }

    pub fn multiply(&self, p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(GroupPoint(self.multiply_generic(&p.0, &q.0)))
    }

    /// Differential of left translation by `p`, evaluated at `q`.
    pub fn left_translation_differential(&self, p: &GroupPoint, q: &GroupPoint) -> Result<DMatrix<f64>> {
        self.check(p)?;
        self.check(q)?;
        let pd: Vec<Dual> = p.0.iter().map(|&v| Dual::constant(v)).collect();
        let out = self.multiply_generic(&pd, &Dual::seed(&q.0));
        Ok(DMatrix::from_fn(self.dim(), self.dim(), |i, j| out[i].partial(j)))
    }

    /// Coordinate metric `g = F⁻ᵀ F⁻¹` that makes the frame orthonormal.
    pub fn coordinate_metric(&self, p: &GroupPoint) -> Result<DMatrix<f64>> {
        self.check(p)?;
        let b = self.inverse_frame(&p.0)?;
        Ok(b.transpose() * b)
    }

    /// Christoffel symbols of the coordinate metric, with metric
    /// derivatives obtained by differentiating the frame field.
    pub fn christoffels(&self, p: &[f64]) -> Result<Christoffels> {
        let d = self.dim();
        if p.len() != d {
            return Err(GeometryError::DimensionMismatch { expected: d, found: p.len() });
        }
        let frame = self.frame_matrix(&Dual::seed(p));
        let inv = invert(&frame).ok_or(GeometryError::Singular("frame matrix"))?;
        // g_ij = Σ_a B_ai B_aj
        let mut g = vec![vec![Dual::constant(0.0); d]; d];
        for (i, gi) in g.iter_mut().enumerate() {
            for (j, gij) in gi.iter_mut().enumerate() {
                let mut s = Dual::constant(0.0);
                for row in &inv {
                    s = s + row[i].clone() * row[j].clone();
                }
                *gij = s;
            }
        }
        let gval = DMatrix::from_fn(d, d, |i, j| g[i][j].value);
        let ginv = gval.try_inverse().ok_or(GeometryError::Singular("coordinate metric"))?;
        let dg = |k: usize, i: usize, j: usize| g[i][j].partial(k);
        let mut gamma = vec![0.0; d * d * d];
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += ginv[(m, l)] * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
                    }
                    gamma[(m * d + i) * d + j] = 0.5 * s;
                }
            }
        }
        Ok(Christoffels { dim: d, gamma })
    }

    fn check(&self, p: &GroupPoint) -> Result<()> {
        if p.0.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: p.0.len() });
        }
        if p.0.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { u: p.0.clone() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_identity_at_origin() {
        for model in [
            CoordinateModel::nil_polarized(),
            CoordinateModel::exp_model(NilpotentAlgebra::heisenberg(2).unwrap()),
            CoordinateModel::exp_model(NilpotentAlgebra::quaternionic_heisenberg()),
        ] {
            let o = GroupPoint::origin(model.dim());
            assert_eq!(model.frame_field(&o).unwrap(), DMatrix::identity(model.dim(), model.dim()));
            assert_eq!(model.coordinate_metric(&o).unwrap(), DMatrix::identity(model.dim(), model.dim()));
        }
    }

    #[test]
    fn exp_model_frame_on_nil() {
        let model = CoordinateModel::exp_model(NilpotentAlgebra::heisenberg(1).unwrap());
        let f = model.frame_field(&GroupPoint(vec![1.0, 0.0, 0.0])).unwrap();
        // L field at a point on the K axis: L + ½[K, L] = L + ½Z
        assert_eq!(f.column(1).as_slice(), &[0.0, 1.0, 0.5]);
    }

    #[test]
    fn abelian_exp_frame_is_constant() {
        let model = CoordinateModel::exp_model(NilpotentAlgebra::abelian(3, 1).unwrap());
        let f = model.frame_field(&GroupPoint(vec![0.3, -2.0, 5.0])).unwrap();
        assert_eq!(f, DMatrix::identity(3, 3));
    }

    #[test]
    fn polarized_nil_frame_and_metric() {
        let model = CoordinateModel::nil_polarized();
        let x = 0.7;
        let p = GroupPoint(vec![x, -1.2, 3.0]);
        let f = model.frame_field(&p).unwrap();
        assert_eq!(f.column(1).as_slice(), &[0.0, 1.0, x]);
        let g = model.coordinate_metric(&p).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0 + x * x, -x, 0.0, -x, 1.0]);
        assert!((g - want).amax() < 1e-14);
        let f0 = model.frame_field(&GroupPoint(vec![0.0, 4.0, -2.0])).unwrap();
        assert_eq!(f0, DMatrix::identity(3, 3));
    }

    #[test]
    fn products() {
        let exp = CoordinateModel::exp_model(NilpotentAlgebra::heisenberg(1).unwrap());
        let pol = CoordinateModel::nil_polarized();
        let p = GroupPoint(vec![1.0, 0.0, 0.0]);
        let q = GroupPoint(vec![0.0, 1.0, 0.0]);
        assert_eq!(exp.multiply(&p, &q).unwrap().0, vec![1.0, 1.0, 0.5]);
        assert_eq!(pol.multiply(&p, &q).unwrap().0, vec![1.0, 1.0, 1.0]);
        let o = GroupPoint::origin(3);
        assert_eq!(pol.multiply(&p, &o).unwrap(), p);
        assert_eq!(exp.multiply(&o, &q).unwrap(), q);
    }

    #[test]
    fn christoffels_are_symmetric_and_vanish_for_abelian() {
        let model = CoordinateModel::exp_model(NilpotentAlgebra::heisenberg(2).unwrap());
        let g = model.christoffels(&[0.1, -0.4, 0.3, 0.9, 0.2]).unwrap();
        for m in 0..5 {
            for i in 0..5 {
                for j in 0..5 {
                    assert!((g.get(m, i, j) - g.get(m, j, i)).abs() < 1e-13);
                }
            }
        }
        let flat = CoordinateModel::exp_model(NilpotentAlgebra::abelian(3, 1).unwrap());
        let g = flat.christoffels(&[0.5, 0.5, 0.5]).unwrap();
        assert!(g.gamma.iter().all(|v| *v == 0.0));
    }
}
