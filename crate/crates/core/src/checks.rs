//! Checks built on top of the Laplacian: the second-fundamental-form
//! conditions for harmonicity in the Heisenberg group, the Jacobi equation
//! for `<G, v>`, constancy of `H` along central directions, and
//! Gauss-Codazzi residuals for surfaces in three-dimensional groups.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraVector;
use crate::error::{GeometryError, Result};
use crate::frame::{AdaptedFrame, FrameKind, DEGENERATE_TOL};
use crate::invariant::{connection_raw, curvature_raw, ricci_raw};
use crate::laplacian::{harmonicity, laplace_beltrami, Method, SurfacePoint};
use crate::surface::{PointData, ShapeData, SurfaceChart};

/// Residuals of the three conditions in the `J`-paired basis of the
/// `(2m+1)`-dimensional Heisenberg group that, together with constant
/// mean curvature, characterize a harmonic Gauss map:
///
/// 1. `b_{2m,k} = 0` for `k` in `1..m-1` and `m+1..2m-1`;
/// 2. `|Z_{2m+1}| (|X_{2m+1}|² - 2 b_{2m,m}) = 0`;
/// 3. `|Z_{2m+1}| (b_11 + ... + b_{2m-1,2m-1} + 3 b_{2m,2m}) = 0`.
pub fn prop3_residuals(shape: &ShapeData, frame: &AdaptedFrame) -> Result<[f64; 3]> {
    if frame.kind != FrameKind::HeisenbergPaired {
        return Err(GeometryError::WrongBasis("these conditions are stated in the J-paired frame".into()));
    }
    let n = frame.n();
    if shape.n() != n || !n.is_multiple_of(2) {
        return Err(GeometryError::DimensionMismatch { expected: n, found: shape.n() });
    }
    let m = n / 2;
    let b = |i: usize, j: usize| shape.b[(i - 1, j - 1)];
    let x = frame.normal_v_norm();
    let z = frame.normal_z_norm();
    let first = (1..m).chain(m + 1..n).map(|k| b(n, k).abs()).fold(0.0, f64::max);
    let second = (z * (x * x - 2.0 * b(n, m))).abs();
    let trace_head: f64 = (1..n).map(|k| b(k, k)).sum();
    let third = (z * (trace_head + 3.0 * b(n, n))).abs();
    Ok([first, second, third])
}

/// `‖B‖²` from chart data, independent of any frame.
fn norm_b2(p: &PointData) -> f64 {
    let s = &p.metric_inv * &p.second_form;
    (&s * &s).trace()
}

/// `(Δ + ‖B‖² + Ric(η,η)) w` at `u`, for `w = <G, v>`, together with `w(u)`.
pub fn jacobi_residual_at(chart: &SurfaceChart, u: &[f64], v: &AlgebraVector) -> Result<(f64, f64)> {
    let alg = chart.model().algebra();
    let p = chart.point(u)?;
    let w = p.normal.dot(v);
    let lap = laplace_beltrami(chart, u, |q| DVector::from_element(1, q.normal.dot(v)))?[0];
    let potential = norm_b2(&p) + ricci_raw(alg, &p.normal, &p.normal);
    Ok((lap + potential * w, w))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiSummary {
    pub max_residual: f64,
    pub min_w: f64,
    /// Largest tangential part of `ΔG` seen, from the general closed form.
    pub max_defect: f64,
    pub points: usize,
}

/// Jacobi residuals for `w = <G, v>` over `points`. A strictly positive
/// `min_w` together with small residuals exhibits a positive Jacobi field.
pub fn jacobi_check(chart: &SurfaceChart, points: &[Vec<f64>], v: &AlgebraVector) -> Result<JacobiSummary> {
    let mut out = JacobiSummary { max_residual: 0.0, min_w: f64::INFINITY, max_defect: 0.0, points: 0 };
    for u in points {
        let (r, w) = jacobi_residual_at(chart, u, v)?;
        let sp = SurfacePoint::evaluate(chart, u)?;
        let defect = sp.laplacian(chart, Method::General)?.tangential_norm;
        out.max_residual = out.max_residual.max(r.abs());
        out.min_w = out.min_w.min(w);
        out.max_defect = out.max_defect.max(defect);
        out.points += 1;
    }
    Ok(out)
}

/// Unit mean of the Gauss map over `points`: a natural choice of `v` when
/// the image lies in an open hemisphere.
pub fn mean_direction(chart: &SurfaceChart, points: &[Vec<f64>]) -> Result<AlgebraVector> {
    let d = chart.model().dim();
    let mut acc = DVector::zeros(d);
    for u in points {
        acc += chart.gauss_map(u)?;
    }
    let len = acc.norm();
    if !(len > 0.0) {
        return Err(GeometryError::Singular("mean of the Gauss map vanishes"));
    }
    Ok(acc / len)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CentralVerdict {
    /// The Gauss map is not harmonic at some sample, so nothing is claimed.
    Skipped { max_defect: f64 },
    Checked { max_variation: f64, curves: usize },
}

/// Tangent frame vectors lying in the center: `Y_k` for `k > q`, plus `Y_q`
/// when its complement part vanishes.
pub fn central_directions(frame: &AdaptedFrame) -> Vec<usize> {
    let mut out = Vec::new();
    if frame.x_q().norm() < 1e-8 {
        out.push(frame.q - 1);
    }
    out.extend(frame.q..frame.n());
    out
}

/// Follows the central tangent directions from each sample point by RK4 in
/// chart coordinates and records how much `H` changes along the way.
/// Skipped unless the Gauss map is harmonic (within `tol`) at every sample.
pub fn corollary1_check(chart: &SurfaceChart, points: &[Vec<f64>], tol: f64) -> Result<CentralVerdict> {
    let mut max_defect: f64 = 0.0;
    for u in points {
        let sp = SurfacePoint::evaluate(chart, u)?;
        let r = sp.laplacian(chart, Method::General)?;
        max_defect = max_defect.max(harmonicity(&r, tol).defect);
    }
    if max_defect >= tol {
        return Ok(CentralVerdict::Skipped { max_defect });
    }
    const STEPS: usize = 8;
    const STEP: f64 = 0.05;
    let margin = 2.0 * chart.fd().step;
    let inside = |u: &[f64]| {
        u.iter().zip(chart.domain()).all(|(x, (lo, hi))| *x >= lo + margin && *x <= hi - margin)
    };
    let mut max_variation: f64 = 0.0;
    let mut curves = 0;
    for u0 in points {
        let frame0 = chart.frame_at(u0)?;
        let h0 = chart.mean_curvature(u0)?;
        for k in central_directions(&frame0) {
            let velocity = |u: &[f64]| -> Result<DVector<f64>> {
                let p = chart.point(u)?;
                let f = crate::frame::adapted_frame(chart.model().algebra(), &p.normal)?;
                p.chart_direction(&f.y[k])
            };
            curves += 1;
            let mut u = DVector::from_column_slice(u0);
            // One RK4 step, or `None` once a stage would leave the domain.
            let step = |u: &DVector<f64>| -> Result<Option<DVector<f64>>> {
                let k1 = velocity(u.as_slice())?;
                let mut ks = vec![k1];
                for w in [0.5, 0.5, 1.0] {
                    let stage = u + w * STEP * ks.last().expect("nonempty");
                    if !inside(stage.as_slice()) {
                        return Ok(None);
                    }
                    ks.push(velocity(stage.as_slice())?);
                }
                let next = u + STEP / 6.0 * (&ks[0] + 2.0 * &ks[1] + 2.0 * &ks[2] + &ks[3]);
                Ok(inside(next.as_slice()).then_some(next))
            };
            for _ in 0..STEPS {
                let Some(next) = step(&u)? else { break };
                u = next;
                max_variation = max_variation.max((chart.mean_curvature(u.as_slice())? - h0).abs());
            }
        }
    }
    Ok(CentralVerdict::Checked { max_variation, curves })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GaussCodazzi {
    /// The normal is (numerically) purely central or purely horizontal.
    Skipped { a: f64, b: f64 },
    Checked {
        /// `|X_3|` and `|Z_3|`.
        a: f64,
        b: f64,
        /// Worse of the two Codazzi lines.
        codazzi: f64,
        /// `|K - det b - <R(F_1,F_2)F_2,F_1>|`.
        gauss: f64,
        /// `<R(F_1,F_2)F_1, η>`, equal to `ab` in Nil.
        curvature_normal: f64,
    },
}

/// Surface frame `F_1 = T_1`, `F_2 = b T_2 - a Z`, `η = a T_2 + b Z` with
/// `T_2` the unit complement part of `η` and `T_1` its quarter turn.
fn surface_frame(normal: &AlgebraVector) -> Option<[AlgebraVector; 3]> {
    let a = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
    let b = normal[2].abs();
    if a < DEGENERATE_TOL.sqrt() || b < DEGENERATE_TOL.sqrt() {
        return None;
    }
    let s = normal[2].signum();
    let t2 = DVector::from_vec(vec![normal[0] / a, normal[1] / a, 0.0]);
    let t1 = DVector::from_vec(vec![s * t2[1], -s * t2[0], 0.0]);
    let z = DVector::from_vec(vec![0.0, 0.0, s]);
    let f2 = b * &t2 - a * &z;
    Some([t1, f2, normal.clone()])
}

/// Codazzi and Gauss residuals at `u` for a surface in a three-dimensional
/// group with one-dimensional center, using the frame above. Derivatives
/// of frame-dependent quantities are taken by finite differences.
pub fn gauss_codazzi_residuals(chart: &SurfaceChart, u: &[f64]) -> Result<GaussCodazzi> {
    let alg = chart.model().algebra();
    if alg.dim_total() != 3 || alg.dim_center() != 1 {
        return Err(GeometryError::Config("Gauss-Codazzi residuals need a 3-dimensional group with 1-dimensional center".into()));
    }
    let p = chart.point(u)?;
    let a = (p.normal[0].powi(2) + p.normal[1].powi(2)).sqrt();
    let b = p.normal[2].abs();
    let Some(frame) = surface_frame(&p.normal) else {
        return Ok(GaussCodazzi::Skipped { a, b });
    };
    let fields = |v: &[f64]| -> Result<(PointData, [AlgebraVector; 3])> {
        let q = chart.point(v)?;
        let f = surface_frame(&q.normal).ok_or(GeometryError::Singular("surface frame degenerates near the point"))?;
        Ok((q, f))
    };
    let form = |q: &PointData, x: &AlgebraVector, y: &AlgebraVector| -> Result<f64> {
        Ok(q.chart_direction(x)?.dot(&(&q.second_form * q.chart_direction(y)?)))
    };
    // Ambient derivative of frame field `i` along frame vector `k` at `v`.
    let nabla = |v: &[f64], k: usize, i: usize| -> Result<AlgebraVector> {
        let (q, f) = fields(v)?;
        let dir = q.chart_direction(&f[k])?;
        let len = dir.norm();
        let unit = &dir / len;
        chart.check_stencil(v, &unit, chart.fd().step)?;
        let deriv = chart.fd().derivative(|t| {
            let w: Vec<f64> = v.iter().enumerate().map(|(j, x)| x + t * unit[j]).collect();
            fields(&w).map(|(_, g)| g[i].clone())
        })? * len;
        Ok(deriv + connection_raw(alg, &f[k], &f[i]))
    };
    let kappa1 = |v: &[f64]| -> Result<f64> { Ok(nabla(v, 0, 0)?.dot(&fields(v)?.1[1])) };
    let kappa2 = |v: &[f64]| -> Result<f64> { Ok(nabla(v, 1, 1)?.dot(&fields(v)?.1[0])) };

    let bmat = |v: &[f64], i: usize, j: usize| -> Result<f64> {
        let (q, f) = fields(v)?;
        form(&q, &f[i], &f[j])
    };
    // (∇_{F_k} B)(F_i, F_j)
    let cov_b = |k: usize, i: usize, j: usize| -> Result<f64> {
        let dir = p.chart_direction(&frame[k])?;
        let d = chart.directional_derivative(u, &dir, |v| bmat(v, i, j))?;
        let ni = nabla(u, k, i)?;
        let nj = nabla(u, k, j)?;
        let mut out = d;
        for (l, fl) in frame[..2].iter().enumerate() {
            out -= ni.dot(fl) * bmat(u, l, j)? + nj.dot(fl) * bmat(u, i, l)?;
        }
        Ok(out)
    };
    let r = |x: usize, y: usize, w: usize, t: &AlgebraVector| curvature_raw(alg, &frame[x], &frame[y], &frame[w]).dot(t);
    let eta = &frame[2];
    let codazzi1 = (r(0, 1, 0, eta) - cov_b(0, 1, 0)? + cov_b(1, 0, 0)?).abs();
    let codazzi2 = (r(1, 0, 1, eta) - cov_b(1, 0, 1)? + cov_b(0, 1, 1)?).abs();

    let k1 = kappa1(u)?;
    let k2 = kappa2(u)?;
    let f1_dir = p.chart_direction(&frame[0])?;
    let f2_dir = p.chart_direction(&frame[1])?;
    let gaussian = chart.directional_derivative(u, &f1_dir, kappa2)? + chart.directional_derivative(u, &f2_dir, kappa1)?
        - k1 * k1
        - k2 * k2;
    let det_b = bmat(u, 0, 0)? * bmat(u, 1, 1)? - bmat(u, 0, 1)?.powi(2);
    let gauss = (gaussian - det_b - r(0, 1, 1, &frame[0])).abs();
    Ok(GaussCodazzi::Checked { a, b, codazzi: codazzi1.max(codazzi2), gauss, curvature_normal: r(0, 1, 0, eta) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{nil_foliation_leaf, nil_vertical_plane};
    use crate::frame::adapted_frame;

    #[test]
    fn vertical_plane_conditions_hold() {
        let chart = nil_vertical_plane().unwrap();
        let sp = SurfacePoint::evaluate(&chart, &[0.2, 0.1]).unwrap();
        assert_eq!(prop3_residuals(&sp.shape, &sp.frame).unwrap(), [0.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let (r, w) = jacobi_residual_at(&chart, &[0.2, 0.1], &v).unwrap();
        assert!(r.abs() < 1e-8);
        assert_eq!(w, 1.0);
    }

    #[test]
    fn leaf_second_condition_fails() {
        let chart = nil_foliation_leaf(0.0).unwrap();
        let x: f64 = 0.7;
        let sp = SurfacePoint::evaluate(&chart, &[x, 0.0]).unwrap();
        let res = prop3_residuals(&sp.shape, &sp.frame).unwrap();
        let s = 1.0 + x * x;
        // |Z|(|X|² - 2 b_21) = (1/√s)(x²/s - (x² - 1)/s)
        assert!((res[1] - 1.0 / s.powf(1.5)).abs() < 1e-12);
        let wrong = crate::frame::adapted_frame_generic(chart.model().algebra(), &sp.frame.y[2]).unwrap();
        assert!(prop3_residuals(&sp.shape, &wrong).is_err());
    }

    #[test]
    fn codazzi_identity_on_leaf() {
        let chart = nil_foliation_leaf(0.0).unwrap();
        match gauss_codazzi_residuals(&chart, &[0.8, -0.3]).unwrap() {
            GaussCodazzi::Checked { a, b, codazzi, gauss, curvature_normal } => {
                assert!((curvature_normal - a * b).abs() < 1e-12);
                assert!(codazzi < 1e-6, "{codazzi}");
                assert!(gauss < 1e-6, "{gauss}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(gauss_codazzi_residuals(&chart, &[0.0, 0.0]).unwrap(), GaussCodazzi::Skipped { .. }));
    }

    #[test]
    fn central_direction_of_vertical_plane() {
        let alg = crate::algebra::NilpotentAlgebra::heisenberg(1).unwrap();
        let f = adapted_frame(&alg, &DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        assert_eq!(central_directions(&f), vec![1]);
        let chart = nil_vertical_plane().unwrap();
        let pts = vec![vec![0.0, 0.0], vec![0.5, -0.5]];
        match corollary1_check(&chart, &pts, 1e-3).unwrap() {
            CentralVerdict::Checked { max_variation, curves } => {
                assert!(max_variation < 1e-12);
                assert_eq!(curves, 2);
            }
            other => panic!("{other:?}"),
        }
        let leaf = nil_foliation_leaf(0.0).unwrap();
        assert!(matches!(corollary1_check(&leaf, &[vec![0.7, 0.0]], 1e-3).unwrap(), CentralVerdict::Skipped { .. }));
    }
}
