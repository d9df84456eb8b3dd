//! The Laplacian of the Gauss map.
//!
//! `ΔG(p)` is reported by its coefficients in the basis `Y_1(e)..Y_{n+1}(e)`
//! of the adapted frame at `p`. Three closed forms are available: the
//! general one for any 2-step algebra, its simplification for algebras of
//! Heisenberg type, and the Heisenberg form written in the `J`-paired
//! basis. All three take the same inputs: the frame, the second fundamental
//! form in that frame and the derivatives `Y_k(nH)`.
//!
//! [`laplacian_numeric`] is an independent check: it applies the
//! Laplace-Beltrami operator of the induced metric to each component of
//! `G` by nested central differences.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraVector, NilpotentAlgebra};
use crate::error::{GeometryError, Result};
use crate::frame::{AdaptedFrame, FrameKind};
use crate::invariant::{curvature_raw, ricci_raw};
use crate::surface::{shape_data_at, PointData, ShapeData, SurfaceChart};

/// Default threshold on the tangential part of `ΔG`.
pub const DEFAULT_HARMONIC_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    General,
    HType,
    Heisenberg,
    NumericOracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::General, Method::HType, Method::Heisenberg, Method::NumericOracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::General => "general",
            Method::HType => "h_type",
            Method::Heisenberg => "heisenberg",
            Method::NumericOracle => "numeric_oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianReport {
    pub method: Method,
    /// Coefficients of `ΔG` on `Y_1(e)..Y_{n+1}(e)`.
    pub coeffs: Vec<f64>,
    /// Named contributions to each coefficient; each coefficient is the sum
    /// of its map's values.
    pub terms: Vec<BTreeMap<String, f64>>,
    pub tangential_norm: f64,
    pub normal_coeff: f64,
}

impl LaplacianReport {
    fn from_terms(method: Method, terms: Vec<BTreeMap<String, f64>>) -> Self {
        let coeffs: Vec<f64> = terms.iter().map(|t| t.values().sum()).collect();
        Self::finish(method, coeffs, terms)
    }

    fn finish(method: Method, coeffs: Vec<f64>, terms: Vec<BTreeMap<String, f64>>) -> Self {
        let n = coeffs.len() - 1;
        let tangential_norm = coeffs[..n].iter().map(|c| c * c).sum::<f64>().sqrt();
        let normal_coeff = coeffs[n];
        LaplacianReport { method, coeffs, terms, tangential_norm, normal_coeff }
    }

    /// Largest coefficient gap to `other`.
    pub fn max_gap(&self, other: &LaplacianReport) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Largest gap relative to `max(abs, rel·|other|)`, per coefficient.
    /// A value at most one means agreement within tolerance.
    pub fn scaled_gap(&self, other: &LaplacianReport, abs: f64, rel: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs() / abs.max(rel * b.abs()))
            .fold(0.0, f64::max)
    }

    /// `ΔG` as an algebra vector.
    pub fn vector(&self, frame: &AdaptedFrame) -> AlgebraVector {
        frame.y.iter().zip(&self.coeffs).fold(frame.y[0].clone() * 0.0, |acc, (y, c)| acc + *c * y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityVerdict {
    pub defect: f64,
    pub harmonic: bool,
    pub energy_coeff: f64,
}

/// The Gauss map is harmonic at the point when `ΔG` is parallel to `G`.
pub fn harmonicity(report: &LaplacianReport, tol: f64) -> HarmonicityVerdict {
    HarmonicityVerdict {
        defect: report.tangential_norm,
        harmonic: report.tangential_norm < tol,
        energy_coeff: report.normal_coeff,
    }
}

fn check_inputs(alg: &NilpotentAlgebra, frame: &AdaptedFrame, shape: &ShapeData, dh: &[f64]) -> Result<()> {
    let n = alg.dim_total() - 1;
    if frame.n() != n || frame.q != alg.dim_v() {
        return Err(GeometryError::DimensionMismatch { expected: n, found: frame.n() });
    }
    if shape.n() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, found: shape.n() });
    }
    if dh.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, found: dh.len() });
    }
    Ok(())
}

fn terms(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// The second-fundamental-form sums shared by the general and
/// Heisenberg-type forms, against a target vector `t`:
/// `-2 Σ_{i≤q<j} b_ij <J(Z_j)X_i, t>` and `2 Σ_i b_iq <J(Z_q)X_i, t>`.
fn shape_sums(alg: &NilpotentAlgebra, frame: &AdaptedFrame, b: &DMatrix<f64>, t: &AlgebraVector) -> (f64, f64) {
    let q = frame.q;
    let n = frame.n();
    let mut central = 0.0;
    let mut along_q = 0.0;
    for i in 0..q {
        for j in q..n {
            central += b[(i, j)] * alg.j_raw(&frame.z[j], &frame.x[i]).dot(t);
        }
        along_q += b[(i, q - 1)] * alg.j_raw(frame.z_q(), &frame.x[i]).dot(t);
    }
    (-2.0 * central, 2.0 * along_q)
}

/// Closed form for an arbitrary 2-step algebra.
pub fn laplacian_general(
    alg: &NilpotentAlgebra,
    frame: &AdaptedFrame,
    shape: &ShapeData,
    dh: &[f64],
) -> Result<LaplacianReport> {
    check_inputs(alg, frame, shape, dh)?;
    let q = frame.q;
    let n = frame.n();
    let xn = &frame.x_normal;
    let zn = &frame.z_normal;
    let nh = n as f64 * shape.mean_curvature;
    let bracket = |t: &AlgebraVector| -> f64 {
        (0..q - 1).map(|j| alg.j_raw(&alg.bracket_raw(t, &frame.x[j]), &frame.x[j]).dot(xn)).sum()
    };
    let curvature = |t: &AlgebraVector| 4.0 * curvature_raw(alg, t, zn, zn).dot(xn);
    let jn = alg.j_raw(zn, xn);

    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        if k < q {
            let t = &frame.x[k];
            let (central, along_q) = shape_sums(alg, frame, &shape.b, t);
            out.push(terms(&[
                ("mean_derivative", -dh[k]),
                ("bracket", bracket(t)),
                ("curvature", curvature(t)),
                ("shape_central", central),
                ("shape_q", along_q),
                ("mean_curvature", nh * jn.dot(t)),
            ]));
        } else {
            out.push(terms(&[("mean_derivative", -dh[k])]));
        }
    }
    let (central, along_q) = shape_sums(alg, frame, &shape.b, xn);
    out.push(terms(&[
        ("bracket", bracket(xn)),
        ("curvature", curvature(xn)),
        ("shape_central", central),
        ("shape_q", along_q),
        ("norm_b2", -shape.norm_b2),
        ("ricci", -ricci_raw(alg, frame.normal(), frame.normal())),
    ]));
    Ok(LaplacianReport::from_terms(Method::General, out))
}

/// Closed form for algebras with `J(Z)² = -|Z|² Id`, where the bracket and
/// curvature terms collapse to multiples of `|X_{n+1}|` and `|Z_{n+1}|`.
pub fn laplacian_h_type(
    alg: &NilpotentAlgebra,
    frame: &AdaptedFrame,
    shape: &ShapeData,
    dh: &[f64],
) -> Result<LaplacianReport> {
    check_inputs(alg, frame, shape, dh)?;
    if !alg.is_heisenberg_type(1e-10) {
        return Err(GeometryError::NotHeisenbergType);
    }
    let q = frame.q;
    let n = frame.n();
    let (qf, nf) = (q as f64, n as f64);
    let xn = &frame.x_normal;
    let a = frame.normal_v_norm();
    let b = frame.normal_z_norm();
    let nh = nf * shape.mean_curvature;
    let jn = alg.j_raw(&frame.z_normal, xn);

    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        if k < q {
            let t = &frame.x[k];
            let (central, along_q) = shape_sums(alg, frame, &shape.b, t);
            let mut m = terms(&[
                ("mean_derivative", -dh[k]),
                ("shape_central", central),
                ("shape_q", along_q),
                ("mean_curvature", nh * jn.dot(t)),
            ]);
            if k == q - 1 {
                m.insert("bracket_curvature".into(), b * a * (qf - nf - 1.0 + b * b));
            }
            out.push(m);
        } else {
            out.push(terms(&[("mean_derivative", -dh[k])]));
        }
    }
    let (central, along_q) = shape_sums(alg, frame, &shape.b, xn);
    out.push(terms(&[
        ("shape_central", central),
        ("shape_q", along_q),
        ("norm_b2", -shape.norm_b2),
        ("center_part", -qf / 4.0 * b * b),
        ("complement_part", a * a * (0.5 * (qf - nf - 1.0) + b * b)),
    ]));
    Ok(LaplacianReport::from_terms(Method::HType, out))
}

/// Heisenberg form, valid in the `J`-paired basis for an algebra of
/// Heisenberg type with one-dimensional center (dimension `2m + 1`).
pub fn laplacian_heisenberg(
    alg: &NilpotentAlgebra,
    frame: &AdaptedFrame,
    shape: &ShapeData,
    dh: &[f64],
) -> Result<LaplacianReport> {
    check_inputs(alg, frame, shape, dh)?;
    if alg.dim_center() != 1 || !alg.is_heisenberg_type(1e-10) {
        return Err(GeometryError::NotHeisenbergType);
    }
    if frame.kind != FrameKind::HeisenbergPaired {
        return Err(GeometryError::WrongBasis("the Heisenberg form needs the J-paired frame".into()));
    }
    let m = frame.q / 2;
    let n = 2 * m;
    let x = frame.normal_v_norm();
    let z = frame.normal_z_norm();
    let nh = n as f64 * shape.mean_curvature;
    let bb = |i: usize, j: usize| shape.b[(i - 1, j - 1)];

    let mut out = vec![BTreeMap::new(); n + 1];
    for k in 1..m {
        out[k - 1] = terms(&[("mean_derivative", -dh[k - 1]), ("shape", -2.0 * bb(n, m + k) * x)]);
        out[m + k - 1] = terms(&[("mean_derivative", -dh[m + k - 1]), ("shape", 2.0 * bb(n, k) * x)]);
    }
    out[m - 1] = terms(&[
        ("mean_derivative", -dh[m - 1]),
        ("mean_curvature", -nh * x * z),
        ("shape", -2.0 * bb(n, n) * x * z),
    ]);
    out[n - 1] = terms(&[
        ("mean_derivative", -dh[n - 1]),
        ("normal_parts", -x.powi(3) * z),
        ("shape", 2.0 * bb(n, m) * x * z),
    ]);
    out[n] = terms(&[
        ("norm_b2", -shape.norm_b2),
        ("normal_parts", -(m as f64 / 2.0) * z * z + 0.5 * x * x - x.powi(4)),
        ("shape", 2.0 * bb(n, m) * x * x),
    ]);
    Ok(LaplacianReport::from_terms(Method::Heisenberg, out))
}

pub fn closed_form(
    method: Method,
    alg: &NilpotentAlgebra,
    frame: &AdaptedFrame,
    shape: &ShapeData,
    dh: &[f64],
) -> Result<LaplacianReport> {
    match method {
        Method::General => laplacian_general(alg, frame, shape, dh),
        Method::HType => laplacian_h_type(alg, frame, shape, dh),
        Method::Heisenberg => laplacian_heisenberg(alg, frame, shape, dh),
        Method::NumericOracle => Err(GeometryError::Config("numeric_oracle is not a closed form".into())),
    }
}

/// Frame, second fundamental form and mean-curvature derivatives at a point.
#[derive(Clone, Debug)]
pub struct SurfacePoint {
    pub point: PointData,
    pub frame: AdaptedFrame,
    pub shape: ShapeData,
    pub dh: Vec<f64>,
}

impl SurfacePoint {
    /// Uses the default adapted frame at `u`.
    pub fn evaluate(chart: &SurfaceChart, u: &[f64]) -> Result<Self> {
        let point = chart.point(u)?;
        let frame = crate::frame::adapted_frame(chart.model().algebra(), &point.normal)?;
        Self::with_frame(chart, point, frame)
    }

    pub fn with_frame(chart: &SurfaceChart, point: PointData, frame: AdaptedFrame) -> Result<Self> {
        let shape = shape_data_at(&point, &frame)?;
        let dh = chart.mean_curvature_derivatives(&point.u, &frame)?;
        Ok(SurfacePoint { point, frame, shape, dh })
    }

    pub fn laplacian(&self, chart: &SurfaceChart, method: Method) -> Result<LaplacianReport> {
        match method {
            Method::NumericOracle => laplacian_numeric_in(chart, &self.point.u, &self.frame),
            m => closed_form(m, chart.model().algebra(), &self.frame, &self.shape, &self.dh),
        }
    }
}

/// Laplace-Beltrami operator of the induced metric applied to a
/// vector-valued function of the point data,
/// `Δf = (1/√γ) ∂_i(√γ γ^{ij} ∂_j f)`, by nested central differences.
pub fn laplace_beltrami<F>(chart: &SurfaceChart, u: &[f64], f: F) -> Result<DVector<f64>>
where
    F: Fn(&PointData) -> DVector<f64>,
{
    let n = chart.param_dim();
    let fd = chart.fd();
    fd.validate()?;
    let center = chart.point(u)?;
    for i in 0..n {
        let e = DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        chart.check_stencil(u, &e, 2.0 * fd.step)?;
    }
    let shifted = |base: &[f64], i: usize, t: f64| -> Vec<f64> {
        let mut v = base.to_vec();
        v[i] += t;
        v
    };
    let flux = |v: &[f64], i: usize| -> Result<DVector<f64>> {
        let p = chart.point(v)?;
        let mut acc = f(&p) * 0.0;
        for j in 0..n {
            let dj = fd.derivative(|t| chart.point(&shifted(v, j, t)).map(|q| f(&q)))?;
            acc += p.metric_inv[(i, j)] * dj;
        }
        Ok(acc * p.sqrt_det_metric())
    };
    let mut total = f(&center) * 0.0;
    for i in 0..n {
        total += fd.derivative(|t| flux(&shifted(u, i, t), i))?;
    }
    Ok(total / center.sqrt_det_metric())
}

/// `ΔG` by finite differences, in the default adapted frame at `u`.
pub fn laplacian_numeric(chart: &SurfaceChart, u: &[f64]) -> Result<LaplacianReport> {
    let frame = chart.frame_at(u)?;
    laplacian_numeric_in(chart, u, &frame)
}

/// `ΔG` by finite differences, expressed in `frame`.
pub fn laplacian_numeric_in(chart: &SurfaceChart, u: &[f64], frame: &AdaptedFrame) -> Result<LaplacianReport> {
    let lap = laplace_beltrami(chart, u, |p| p.normal.clone())?;
    let coeffs: Vec<f64> = frame.y.iter().map(|y| y.dot(&lap)).collect();
    let terms = coeffs.iter().map(|c| terms(&[("numeric", *c)])).collect();
    Ok(LaplacianReport::finish(Method::NumericOracle, coeffs, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::adapted_frame;
    use crate::group::CoordinateModel;

    fn leaf() -> SurfaceChart {
        SurfaceChart::from_strings(CoordinateModel::nil_polarized(), &["u1", "u2", "0.3"], vec![(-3.0, 3.0), (-3.0, 3.0)]).unwrap()
    }

    fn leaf_expected(x: f64) -> [f64; 3] {
        let w = (1.0 + x * x).powi(2);
        [0.0, -x / w, -1.0 / w]
    }

    #[test]
    fn nil_leaf_closed_forms() {
        let chart = leaf();
        for x in [0.0, 0.5, 1.0, 2.0] {
            let sp = SurfacePoint::evaluate(&chart, &[x, 0.1]).unwrap();
            let want = leaf_expected(x);
            for method in [Method::General, Method::HType, Method::Heisenberg] {
                let r = sp.laplacian(&chart, method).unwrap();
                for k in 0..3 {
                    assert!((r.coeffs[k] - want[k]).abs() < 1e-8, "{method:?} x={x} k={k}: {:?}", r.coeffs);
                }
            }
        }
    }

    #[test]
    fn nil_leaf_numeric() {
        let chart = leaf();
        for x in [0.0, 1.0] {
            let r = laplacian_numeric(&chart, &[x, 0.1]).unwrap();
            let want = leaf_expected(x);
            for k in 0..3 {
                assert!((r.coeffs[k] - want[k]).abs() < 1e-6, "x={x} k={k}: {:?}", r.coeffs);
            }
        }
    }

    #[test]
    fn terms_sum_to_coeffs() {
        let sp = SurfacePoint::evaluate(&leaf(), &[0.7, 0.0]).unwrap();
        let r = sp.laplacian(&leaf(), Method::General).unwrap();
        for (c, t) in r.coeffs.iter().zip(&r.terms) {
            assert!((c - t.values().sum::<f64>()).abs() < 1e-12);
        }
        let v = harmonicity(&r, DEFAULT_HARMONIC_TOL);
        assert!(!v.harmonic);
        assert!((v.defect - 0.7 / 1.49f64.powi(2)).abs() < 1e-10);
    }

    #[test]
    fn abelian_plane_and_sphere() {
        let alg = NilpotentAlgebra::abelian(3, 1).unwrap();
        let model = CoordinateModel::exp_model(alg.clone());
        // upper unit hemisphere as a graph
        let chart = SurfaceChart::from_strings(model, &["u1", "u2", "sqrt(1 - u1^2 - u2^2)"], vec![(-0.6, 0.6); 2]).unwrap();
        let sp = SurfacePoint::evaluate(&chart, &[0.2, -0.1]).unwrap();
        let r = sp.laplacian(&chart, Method::General).unwrap();
        assert!(r.tangential_norm < 1e-6);
        assert!((r.normal_coeff + sp.shape.norm_b2).abs() < 1e-12);
        assert!((sp.shape.norm_b2 - 2.0).abs() < 1e-10);
        let num = laplacian_numeric(&chart, &[0.2, -0.1]).unwrap();
        assert!(num.max_gap(&r) < 1e-5);
    }

    #[test]
    fn rejects_wrong_inputs() {
        let alg = NilpotentAlgebra::heisenberg(1).unwrap();
        let normal = DVector::from_vec(vec![0.0, 0.6, 0.8]);
        let frame = crate::frame::adapted_frame_generic(&alg, &normal).unwrap();
        let shape = ShapeData::from_matrix(DMatrix::zeros(2, 2));
        assert!(matches!(laplacian_heisenberg(&alg, &frame, &shape, &[0.0, 0.0]), Err(GeometryError::WrongBasis(_))));
        assert!(laplacian_general(&alg, &frame, &shape, &[0.0]).is_err());
        let non_h = NilpotentAlgebra::quaternionic_heisenberg();
        let f = adapted_frame(&non_h, &non_h.basis(0)).unwrap();
        let shape = ShapeData::from_matrix(DMatrix::zeros(6, 6));
        assert!(matches!(laplacian_heisenberg(&non_h, &f, &shape, &[0.0; 6]), Err(GeometryError::NotHeisenbergType)));
    }
}
