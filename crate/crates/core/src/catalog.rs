//! Built-in charts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::NilpotentAlgebra;
use crate::error::{GeometryError, Result};
use crate::expr::{parse_expression, Expr};
use crate::group::CoordinateModel;
use crate::surface::SurfaceChart;

/// Leaf `z = level` of the foliation of Nil tangent to `X` and `Y - xZ`,
/// in polarized coordinates. Its normal is `(xY + Z)/√(1 + x²)`.
pub fn nil_foliation_leaf(level: f64) -> Result<SurfaceChart> {
    SurfaceChart::new(
        CoordinateModel::nil_polarized(),
        vec![Expr::Param(0), Expr::Param(1), Expr::Const(level)],
        vec![(-3.0, 3.0), (-3.0, 3.0)],
    )
}

/// The plane `y = 0` in polarized Nil coordinates, oriented so that the
/// Gauss map is `+Y`.
pub fn nil_vertical_plane() -> Result<SurfaceChart> {
    Ok(SurfaceChart::new(
        CoordinateModel::nil_polarized(),
        vec![Expr::Param(0), Expr::Const(0.0), Expr::Param(1)],
        vec![(-3.0, 3.0), (-3.0, 3.0)],
    )?
    .with_orientation(-1.0))
}

/// The cylinder `(f1(s), f2(s), t)` over a plane curve, in polarized Nil
/// coordinates. `f1` and `f2` are expressions in `u1 = s`; `s_range` and
/// `t_range` give the domain. The normal is the profile normal rotated a
/// quarter turn counterclockwise from the velocity.
pub fn nil_cylinder(f1: &Expr, f2: &Expr, s_range: (f64, f64), t_range: (f64, f64)) -> Result<SurfaceChart> {
    if f1.arity() > 1 || f2.arity() > 1 {
        return Err(GeometryError::Config("cylinder profiles may only use u1".into()));
    }
    let chart = SurfaceChart::new(
        CoordinateModel::nil_polarized(),
        vec![f1.clone(), f2.clone(), Expr::Param(1)],
        vec![s_range, t_range],
    )?
    .with_orientation(-1.0);
    check_profile(f1, f2, s_range)?;
    Ok(chart)
}

pub fn nil_cylinder_str(f1: &str, f2: &str, s_range: (f64, f64), t_range: (f64, f64)) -> Result<SurfaceChart> {
    nil_cylinder(&parse_expression(f1)?, &parse_expression(f2)?, s_range, t_range)
}

fn check_profile(f1: &Expr, f2: &Expr, (lo, hi): (f64, f64)) -> Result<()> {
    use crate::autodiff::Dual;
    const SAMPLES: usize = 400;
    for i in 0..=SAMPLES {
        let s = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let v = [Dual::variable(s, 0, 1)];
        let (a, b) = (f1.eval(&v).partial(0), f2.eval(&v).partial(0));
        let speed2 = a * a + b * b;
        if !(speed2 > 1e-12) {
            return Err(GeometryError::DegenerateProfile { s, speed2 });
        }
    }
    Ok(())
}

/// Graph of `height` over the coordinates other than `axis`: coordinate
/// `axis` equals `height`, the others are `u1..un` in order.
pub fn graph(model: CoordinateModel, height: Expr, axis: usize, domain: Vec<(f64, f64)>) -> Result<SurfaceChart> {
    let d = model.dim();
    if axis >= d {
        return Err(GeometryError::Config(format!("graph axis {axis} out of range 0..{d}")));
    }
    let coords = (0..d)
        .map(|i| match i.cmp(&axis) {
            std::cmp::Ordering::Less => Expr::Param(i),
            std::cmp::Ordering::Equal => height.clone(),
            std::cmp::Ordering::Greater => Expr::Param(i - 1),
        })
        .collect();
    SurfaceChart::new(model, coords, domain)
}

/// A seeded random smooth graph in exponential coordinates: a quadratic
/// polynomial plus a sine wave with bounded coefficients, over a randomly
/// chosen axis, on `[-1, 1]ⁿ`.
pub fn random_graph(alg: &NilpotentAlgebra, seed: u64) -> Result<SurfaceChart> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = alg.dim_total();
    let n = d - 1;
    let mut c = |s: f64| rng.gen_range(-s..s);
    let mut text = format!("({:?})", c(0.5));
    for i in 1..=n {
        text += &format!(" + ({:?})*u{i}", c(0.6));
    }
    for i in 1..=n {
        for j in i..=n {
            text += &format!(" + ({:?})*u{i}*u{j}", c(0.4));
        }
    }
    let mut phase = format!("({:?})", c(1.5));
    for i in 1..=n {
        phase += &format!(" + ({:?})*u{i}", c(1.2));
    }
    text += &format!(" + ({:?})*sin({phase})", c(0.3));
    let height = parse_expression(&text)?;
    let axis = rng.gen_range(0..d);
    let orientation = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Ok(graph(CoordinateModel::exp_model(alg.clone()), height, axis, vec![(-1.0, 1.0); n])?.with_orientation(orientation))
}

/// `count` seeded points in the middle 60% of the chart's domain.
pub fn sample_points(chart: &SurfaceChart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            chart
                .domain()
                .iter()
                .map(|(lo, hi)| {
                    let mid = 0.5 * (lo + hi);
                    let half = 0.3 * (hi - lo);
                    rng.gen_range(mid - half..mid + half)
                })
                .collect()
        })
        .collect()
}

/// Regular grid with `res` points per axis, inset from the boundary by
/// `margin` on each side.
pub fn grid_points(domain: &[(f64, f64)], res: &[usize], margin: f64) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = domain
        .iter()
        .zip(res)
        .map(|((lo, hi), &r)| {
            let (a, b) = (lo + margin, hi - margin);
            if r <= 1 {
                vec![0.5 * (a + b)]
            } else {
                (0..r).map(|i| a + (b - a) * i as f64 / (r - 1) as f64).collect()
            }
        })
        .collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn vertical_plane_gauss_map() {
        let g = nil_vertical_plane().unwrap().gauss_map(&[0.4, -1.0]).unwrap();
        assert_eq!(g, DVector::from_vec(vec![0.0, 1.0, 0.0]));
    }

    #[test]
    fn straight_cylinder_is_the_vertical_plane() {
        let c = nil_cylinder_str("u1", "0", (-3.0, 3.0), (-3.0, 3.0)).unwrap();
        let p = nil_vertical_plane().unwrap();
        assert_eq!(c.gauss_map(&[0.3, 0.2]).unwrap(), p.gauss_map(&[0.3, 0.2]).unwrap());
    }

    #[test]
    fn degenerate_profile() {
        let e = nil_cylinder_str("u1^2", "u1^3", (-1.0, 1.0), (0.0, 1.0)).unwrap_err();
        assert!(matches!(e, GeometryError::DegenerateProfile { .. }));
    }

    #[test]
    fn random_graphs_are_deterministic() {
        let alg = NilpotentAlgebra::heisenberg(1).unwrap();
        assert_eq!(random_graph(&alg, 7).unwrap(), random_graph(&alg, 7).unwrap());
        assert_ne!(random_graph(&alg, 7).unwrap(), random_graph(&alg, 8).unwrap());
    }

    #[test]
    fn grid() {
        let g = grid_points(&[(0.0, 1.0), (0.0, 2.0)], &[2, 3], 0.0);
        assert_eq!(g.len(), 6);
        assert_eq!(g[5], vec![1.0, 2.0]);
    }
}
