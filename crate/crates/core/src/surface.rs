//! Parametric hypersurfaces in a coordinate model.
//!
//! A [`SurfaceChart`] is a map `u ↦ r(u)` from a box in `ℝⁿ` into model
//! coordinates, given by one expression per coordinate. Position, first and
//! second derivatives come from a single second-order AD pass, so the Gauss
//! map, induced metric and second fundamental form at a point are exact up
//! to rounding. Only derivatives of derived scalar fields (the mean
//! curvature, for instance) use finite differences.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraVector;
use crate::autodiff::Jet2;
use crate::error::{GeometryError, Result};
use crate::expr::{parse_expression, Expr};
use crate::frame::{adapted_frame, AdaptedFrame};
use crate::group::CoordinateModel;

/// Smallest admissible singular value of the chart Jacobian.
pub const RANK_TOL: f64 = 1e-8;
/// Largest admissible residual when writing a frame vector in chart directions.
pub const FRAME_TOL: f64 = 1e-8;

/// Central-difference settings: base step and number of Richardson levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_step() -> f64 {
    1e-4
}

fn default_levels() -> usize {
    2
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { step: default_step(), levels: default_levels() }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) || self.levels == 0 || self.levels > 6 {
            return Err(GeometryError::Config(format!(
                "finite-difference step must be positive and levels in 1..=6, got step {} and levels {}",
                self.step, self.levels
            )));
        }
        Ok(())
    }

    /// Central difference of `f` at offset 0, Richardson-extrapolated over
    /// steps `h, h/2, ...`.
    pub fn derivative<F>(&self, f: F) -> Result<DVector<f64>>
    where
        F: Fn(f64) -> Result<DVector<f64>>,
    {
        let mut table: Vec<DVector<f64>> = Vec::with_capacity(self.levels);
        let mut h = self.step;
        for _ in 0..self.levels {
            table.push((f(h)? - f(-h)?) / (2.0 * h));
            h /= 2.0;
        }
        let mut factor = 1.0;
        for k in 1..self.levels {
            factor *= 4.0;
            for j in (k..self.levels).rev() {
                table[j] = (factor * &table[j] - &table[j - 1]) / (factor - 1.0);
            }
        }
        Ok(table.pop().expect("at least one level"))
    }

    pub fn derivative_scalar<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        Ok(self.derivative(|t| f(t).map(|v| DVector::from_element(1, v)))?[0])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceChart {
    model: CoordinateModel,
    coords: Vec<Expr>,
    orientation: f64,
    domain: Vec<(f64, f64)>,
    fd: FdConfig,
}

/// Everything known about the chart at one parameter point.
#[derive(Clone, Debug)]
pub struct PointData {
    pub u: Vec<f64>,
    pub position: Vec<f64>,
    /// Columns are `∂_i r` in model coordinates.
    pub jacobian: DMatrix<f64>,
    /// Columns are the same tangent vectors in the left-invariant frame.
    pub tangents: DMatrix<f64>,
    /// Induced metric `γ_ij`.
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// Unit normal in the left-invariant frame: the Gauss map value.
    pub normal: AlgebraVector,
    /// Second fundamental form in chart coordinates, with respect to `normal`.
    pub second_form: DMatrix<f64>,
}

impl PointData {
    /// `n·H`, the trace of the second fundamental form.
    pub fn mean_curvature_n(&self) -> f64 {
        (&self.metric_inv * &self.second_form).trace()
    }

    pub fn sqrt_det_metric(&self) -> f64 {
        self.metric.determinant().sqrt()
    }

    /// Chart direction `c` with `Σ c_i ∂_i r = v`, for `v` in the tangent
    /// space written in the left-invariant frame.
    pub fn chart_direction(&self, v: &AlgebraVector) -> Result<DVector<f64>> {
        let c = &self.metric_inv * (self.tangents.transpose() * v);
        let mismatch = (&self.tangents * &c - v).amax();
        if mismatch > FRAME_TOL {
            return Err(GeometryError::FrameMismatch { mismatch });
        }
        Ok(c)
    }
}

/// Second fundamental form in the adapted frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData {
    /// `b_ij = <∇_{Y_i} Y_j, η>`.
    pub b: DMatrix<f64>,
    pub mean_curvature: f64,
    pub norm_b2: f64,
}

impl ShapeData {
    pub fn from_matrix(b: DMatrix<f64>) -> Self {
        let n = b.nrows() as f64;
        let mean_curvature = b.trace() / n;
        let norm_b2 = b.iter().map(|v| v * v).sum();
        ShapeData { b, mean_curvature, norm_b2 }
    }

    pub fn n(&self) -> usize {
        self.b.nrows()
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.b - self.b.transpose()).amax()
    }
}

impl SurfaceChart {
    /// Chart with one expression per model coordinate, over `u1..un` with
    /// `n = dim - 1`, on the box `domain`.
    pub fn new(model: CoordinateModel, coords: Vec<Expr>, domain: Vec<(f64, f64)>) -> Result<Self> {
        let d = model.dim();
        let n = d - 1;
        if coords.len() != d {
            return Err(GeometryError::DimensionMismatch { expected: d, found: coords.len() });
        }
        if domain.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: domain.len() });
        }
        if let Some(e) = coords.iter().find(|e| e.arity() > n) {
            return Err(GeometryError::Config(format!(
                "chart expression {e} uses parameter u{} but the surface has {n} parameters",
                e.arity()
            )));
        }
        for (lo, hi) in &domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeometryError::Config(format!("invalid domain interval [{lo}, {hi}]")));
            }
        }
        Ok(SurfaceChart { model, coords, orientation: 1.0, domain, fd: FdConfig::default() })
    }

    pub fn from_strings(model: CoordinateModel, coords: &[&str], domain: Vec<(f64, f64)>) -> Result<Self> {
        let exprs = coords.iter().map(|s| parse_expression(s)).collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(model, exprs, domain)
    }

    /// Selects the normal direction: `+1` keeps the generalized cross
    /// product of the tangents, `-1` flips it.
    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn model(&self) -> &CoordinateModel {
        &self.model
    }

    pub fn coords(&self) -> &[Expr] {
        &self.coords
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn fd(&self) -> FdConfig {
        self.fd
    }

    pub fn param_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.param_dim() && u.iter().zip(&self.domain).all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Errors unless every point `u ± t·dir` with `|t| ≤ reach` stays in the domain.
    pub fn check_stencil(&self, u: &[f64], dir: &DVector<f64>, reach: f64) -> Result<()> {
        let ok = u.iter().zip(&self.domain).enumerate().all(|(i, (x, (lo, hi)))| {
            let r = reach * dir[i].abs();
            x - r >= *lo && x + r <= *hi
        });
        if ok {
            Ok(())
        } else {
            Err(GeometryError::StencilOutOfDomain { u: u.to_vec(), reach })
        }
    }

    /// Evaluates position, derivatives, normal and second fundamental form.
    pub fn point(&self, u: &[f64]) -> Result<PointData> {
        let n = self.param_dim();
        let d = n + 1;
        if u.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: u.len() });
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { u: u.to_vec() });
        }
        if !self.contains(u) {
            return Err(GeometryError::StencilOutOfDomain { u: u.to_vec(), reach: 0.0 });
        }
        let seed = Jet2::seed(u);
        let jets: Vec<Jet2> = self.coords.iter().map(|e| e.eval(&seed)).collect();
        let position: Vec<f64> = jets.iter().map(|j| j.value).collect();
        let jacobian = DMatrix::from_fn(d, n, |a, i| jets[a].partial(i));
        let finite = position.iter().chain(jacobian.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(GeometryError::NonFinite { u: u.to_vec() });
        }
        let sigma_min = jacobian.clone().singular_values().min();
        if !(sigma_min > RANK_TOL) {
            return Err(GeometryError::RankDeficient { u: u.to_vec(), sigma_min });
        }
        let b_inv = self.model.inverse_frame(&position)?;
        let tangents = &b_inv * &jacobian;
        let metric = tangents.transpose() * &tangents;
        let metric_inv = metric.clone().try_inverse().ok_or(GeometryError::Singular("induced metric"))?;

        let mut normal = DVector::from_fn(d, |k, _| {
            let minor = tangents.clone().remove_row(k);
            let sign = if (k + n).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * minor.determinant()
        });
        let len = normal.norm();
        if !(len > 0.0) {
            return Err(GeometryError::RankDeficient { u: u.to_vec(), sigma_min });
        }
        normal *= self.orientation / len;

        let gamma = self.model.christoffels(&position)?;
        let mut second_form = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let rij = DVector::from_fn(d, |a, _| jets[a].second(i, j));
                let acc = rij + gamma.contract(&jacobian.column(i).into_owned(), &jacobian.column(j).into_owned());
                let h = (&b_inv * acc).dot(&normal);
                second_form[(i, j)] = h;
                second_form[(j, i)] = h;
            }
        }
        if second_form.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { u: u.to_vec() });
        }
        Ok(PointData { u: u.to_vec(), position, jacobian, tangents, metric, metric_inv, normal, second_form })
    }

    /// The Gauss map: the unit normal translated back to the identity.
    pub fn gauss_map(&self, u: &[f64]) -> Result<AlgebraVector> {
        Ok(self.point(u)?.normal)
    }

    pub fn induced_metric(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.point(u)?.metric)
    }

    pub fn mean_curvature(&self, u: &[f64]) -> Result<f64> {
        let p = self.point(u)?;
        Ok(p.mean_curvature_n() / self.param_dim() as f64)
    }

    /// Default adapted frame at `u`.
    pub fn frame_at(&self, u: &[f64]) -> Result<AdaptedFrame> {
        adapted_frame(self.model.algebra(), &self.gauss_map(u)?)
    }

    /// Second fundamental form in the tangent part of `frame`.
    pub fn shape_data(&self, u: &[f64], frame: &AdaptedFrame) -> Result<ShapeData> {
        let p = self.point(u)?;
        shape_data_at(&p, frame)
    }

    /// Derivative of `field` along the chart direction `dir`, by central
    /// differences on the normalized direction.
    pub fn directional_derivative<F>(&self, u: &[f64], dir: &DVector<f64>, field: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64>,
    {
        let len = dir.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        let unit = dir / len;
        self.check_stencil(u, &unit, self.fd.step)?;
        let d = self.fd.derivative_scalar(|t| {
            let shifted: Vec<f64> = u.iter().enumerate().map(|(i, x)| x + t * unit[i]).collect();
            field(&shifted)
        })?;
        Ok(len * d)
    }

    /// Derivative of `field` along the frame vector `v` (tangent, in the
    /// left-invariant frame).
    pub fn frame_directional_derivative<F>(&self, u: &[f64], field: F, v: &AlgebraVector) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64>,
    {
        let dir = self.point(u)?.chart_direction(v)?;
        self.directional_derivative(u, &dir, field)
    }

    /// `Y_k(nH)` for each tangent vector of `frame`.
    pub fn mean_curvature_derivatives(&self, u: &[f64], frame: &AdaptedFrame) -> Result<Vec<f64>> {
        let p = self.point(u)?;
        let field = |v: &[f64]| self.point(v).map(|q| q.mean_curvature_n());
        (0..frame.n())
            .map(|k| {
                let dir = p.chart_direction(&frame.y[k])?;
                self.directional_derivative(u, &dir, field)
            })
            .collect()
    }

    /// The same surface with parameters `u = A v + c`.
    pub fn reparametrized(&self, a: &DMatrix<f64>, c: &DVector<f64>, domain: Vec<(f64, f64)>) -> Result<Self> {
        let n = self.param_dim();
        if a.shape() != (n, n) || c.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: a.nrows() });
        }
        let repl: Vec<Expr> = (0..n)
            .map(|i| {
                (0..n).fold(Expr::Const(c[i]), |acc, j| {
                    Expr::Add(Box::new(acc), Box::new(Expr::Mul(Box::new(Expr::Const(a[(i, j)])), Box::new(Expr::Param(j)))))
                })
            })
            .collect();
        let coords = self.coords.iter().map(|e| e.substitute(&repl)).collect();
        let orientation = if a.determinant() < 0.0 { -self.orientation } else { self.orientation };
        Ok(SurfaceChart::new(self.model.clone(), coords, domain)?.with_orientation(orientation).with_fd(self.fd))
    }
}

/// `b_kl = c_kᵀ h c_l` where `c_k` writes `Y_k` in chart directions.
pub fn shape_data_at(p: &PointData, frame: &AdaptedFrame) -> Result<ShapeData> {
    let n = p.u.len();
    if frame.n() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, found: frame.n() });
    }
    let mismatch = (frame.normal() - &p.normal).amax();
    if mismatch > FRAME_TOL {
        return Err(GeometryError::FrameMismatch { mismatch });
    }
    let mut c = DMatrix::zeros(n, n);
    for k in 0..n {
        c.set_column(k, &p.chart_direction(&frame.y[k])?);
    }
    Ok(ShapeData::from_matrix(c.transpose() * &p.second_form * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::NilpotentAlgebra;

    fn leaf() -> SurfaceChart {
        SurfaceChart::from_strings(CoordinateModel::nil_polarized(), &["u1", "u2", "0.3"], vec![(-3.0, 3.0), (-3.0, 3.0)]).unwrap()
    }

    #[test]
    fn richardson_is_exact_on_quartics() {
        let fd = FdConfig::default();
        let d = fd.derivative_scalar(|t| Ok((1.0 + t).powi(4))).unwrap();
        assert!((d - 4.0).abs() < 1e-9);
    }

    #[test]
    fn leaf_gauss_map_and_shape() {
        let chart = leaf();
        for x in [0.0_f64, 0.5, 1.0, 2.0] {
            let g = chart.gauss_map(&[x, 0.4]).unwrap();
            let s = (1.0 + x * x).sqrt();
            assert!((g - DVector::from_vec(vec![0.0, x / s, 1.0 / s])).amax() < 1e-14);
            let frame = chart.frame_at(&[x, 0.4]).unwrap();
            let sh = chart.shape_data(&[x, 0.4], &frame).unwrap();
            let b12 = (x * x - 1.0) / (2.0 * (1.0 + x * x));
            assert!(sh.mean_curvature.abs() < 1e-14);
            assert!((sh.b[(0, 1)] - b12).abs() < 1e-14);
            assert!(sh.symmetry_residual() < 1e-14);
        }
    }

    #[test]
    fn vertical_plane() {
        let chart = SurfaceChart::from_strings(CoordinateModel::nil_polarized(), &["u1", "0", "u2"], vec![(-1.0, 1.0); 2])
            .unwrap()
            .with_orientation(-1.0);
        let p = chart.point(&[0.7, -0.2]).unwrap();
        assert!((p.normal.clone() - DVector::from_vec(vec![0.0, 1.0, 0.0])).amax() < 1e-15);
        assert!((p.metric.clone() - DMatrix::identity(2, 2)).amax() < 1e-15);
        let frame = chart.frame_at(&[0.7, -0.2]).unwrap();
        let sh = chart.shape_data(&[0.7, -0.2], &frame).unwrap();
        assert!((sh.norm_b2 - 0.5).abs() < 1e-14);
        assert!((sh.b[(1, 0)] - 0.5).abs() < 1e-14);
        assert_eq!(chart.directional_derivative(&[0.0, 0.0], &DVector::from_vec(vec![1.0, 1.0]), |_| Ok(3.0)).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let chart = SurfaceChart::from_strings(CoordinateModel::nil_polarized(), &["u1^2", "u2", "0"], vec![(-1.0, 1.0); 2]).unwrap();
        // ∂_1 r vanishes at u1 = 0
        assert!(matches!(chart.point(&[0.0, 0.0]), Err(GeometryError::RankDeficient { .. })));
        let chart = leaf();
        let frame = chart.frame_at(&[0.0, 0.0]).unwrap();
        let at_edge = chart.frame_at(&[3.0, 0.0]).unwrap();
        assert!(matches!(chart.mean_curvature_derivatives(&[3.0, 0.0], &at_edge), Err(GeometryError::StencilOutOfDomain { .. })));
        assert!(matches!(chart.shape_data(&[1.0, 0.0], &frame), Err(GeometryError::FrameMismatch { .. })));
        assert!(SurfaceChart::from_strings(CoordinateModel::nil_polarized(), &["u3", "u2", "0"], vec![(-1.0, 1.0); 2]).is_err());
    }

    #[test]
    fn flat_plane_is_totally_geodesic() {
        let model = CoordinateModel::exp_model(NilpotentAlgebra::abelian(3, 1).unwrap());
        let chart = SurfaceChart::from_strings(model, &["u1", "u2", "0.2*u1 - 0.5*u2 + 1"], vec![(-1.0, 1.0); 2]).unwrap();
        let frame = chart.frame_at(&[0.1, 0.2]).unwrap();
        assert!(chart.shape_data(&[0.1, 0.2], &frame).unwrap().b.amax() < 1e-15);
    }
}
