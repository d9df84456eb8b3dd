use nalgebra::DVector;
use nilgauss::catalog::{graph, grid_points, nil_cylinder_str, nil_foliation_leaf, nil_vertical_plane};
use nilgauss::checks::{
    corollary1_check, gauss_codazzi_residuals, jacobi_check, jacobi_residual_at, prop3_residuals, CentralVerdict,
    GaussCodazzi,
};
use nilgauss::invariant::ricci;
use nilgauss::laplacian::{harmonicity, laplace_beltrami, Method, SurfacePoint};
use nilgauss::{parse_expression, CoordinateModel, NilpotentAlgebra};

const PROFILES: [(&str, &str); 4] = [
    ("u1", "0.5*u1"),
    ("2*cos(u1)", "2*sin(u1)"),
    ("-0.3 + 0.7*cos(2 - u1)", "0.1 + 0.7*sin(2 - u1)"),
    ("0.8*cos(u1 + 0.2*u1^3)", "0.8*sin(u1 + 0.2*u1^3)"),
];

/// Profiles satisfying the pairing conditions with constant `H` give a
/// harmonic Gauss map.
#[test]
fn pairing_conditions_imply_harmonicity() {
    for (f1, f2) in PROFILES {
        let chart = nil_cylinder_str(f1, f2, (0.2, 1.4), (-1.0, 1.0)).unwrap();
        let points = grid_points(chart.domain(), &[4, 3], 0.1);
        let h0 = chart.mean_curvature(&points[0]).unwrap();
        for u in &points {
            let sp = SurfacePoint::evaluate(&chart, u).unwrap();
            let residuals = prop3_residuals(&sp.shape, &sp.frame).unwrap();
            assert!(residuals.iter().all(|r| *r < 1e-6), "{f1}, {f2}: {residuals:?}");
            assert!((sp.shape.mean_curvature - h0).abs() < 1e-6);
            let oracle = sp.laplacian(&chart, Method::NumericOracle).unwrap();
            assert!(harmonicity(&oracle, 5e-4).harmonic, "{f1}, {f2}: {}", oracle.tangential_norm);
        }
    }
}

#[test]
fn leaf_breaks_the_second_pairing_condition() {
    let chart = nil_foliation_leaf(0.0).unwrap();
    for x in [0.5f64, 2.0] {
        let sp = SurfacePoint::evaluate(&chart, &[x, 0.0]).unwrap();
        let r = prop3_residuals(&sp.shape, &sp.frame).unwrap();
        let defect = sp.laplacian(&chart, Method::General).unwrap().tangential_norm;
        assert!(r[1] > 1e-3 && defect > 1e-3, "{r:?} {defect}");
    }
}

/// `Δ<G, v> = -(‖B‖² + Ric(η,η))<G, v>` on CMC charts with harmonic Gauss
/// map, for directions `v` that need not keep `w` positive.
#[test]
fn pointwise_jacobi_identity() {
    let v = DVector::from_vec(vec![0.6, -0.64, 0.48]);
    for (f1, f2) in PROFILES {
        let chart = nil_cylinder_str(f1, f2, (0.2, 1.4), (-1.0, 1.0)).unwrap();
        let alg = chart.model().algebra().clone();
        for u in grid_points(chart.domain(), &[3, 2], 0.15) {
            let p = chart.point(&u).unwrap();
            let lap = laplace_beltrami(&chart, &u, |q| DVector::from_element(1, q.normal.dot(&v))).unwrap()[0];
            let potential = SurfacePoint::evaluate(&chart, &u).unwrap().shape.norm_b2 + ricci(&alg, &p.normal, &p.normal).unwrap();
            let w = p.normal.dot(&v);
            assert!((lap + potential * w).abs() < 5e-4);
            assert!((jacobi_residual_at(&chart, &u, &v).unwrap().0 - (lap + potential * w)).abs() < 1e-12);
        }
    }
}

#[test]
fn jacobi_on_the_vertical_plane() {
    let chart = nil_vertical_plane().unwrap();
    let points = grid_points(chart.domain(), &[3, 3], 0.5);
    let along = jacobi_check(&chart, &points, &DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
    assert_eq!(along.min_w, 1.0);
    assert!(along.max_residual < 1e-12);
    let across = jacobi_check(&chart, &points, &DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
    assert_eq!(across.min_w, 0.0);
    assert!(across.max_residual < 1e-12);
}

#[test]
fn mean_curvature_is_constant_along_cylinder_rulings() {
    let chart = nil_cylinder_str("cos(u1)", "sin(u1)", (0.2, 1.4), (-1.0, 1.0)).unwrap();
    let points = grid_points(chart.domain(), &[3, 3], 0.2);
    match corollary1_check(&chart, &points, 1e-3).unwrap() {
        CentralVerdict::Checked { max_variation, curves } => {
            assert!(curves >= points.len());
            assert!(max_variation < 1e-8, "{max_variation:e}");
        }
        other => panic!("{other:?}"),
    }
}

/// The ruling `∂_t` of a cylinder is the central tangent of the frame.
#[test]
fn cylinder_rulings_are_central() {
    for (f1, f2) in PROFILES {
        let chart = nil_cylinder_str(f1, f2, (0.2, 1.4), (-1.0, 1.0)).unwrap();
        for u in grid_points(chart.domain(), &[3, 2], 0.1) {
            let sp = SurfacePoint::evaluate(&chart, &u).unwrap();
            let ruling = sp.point.tangents.column(1).into_owned();
            assert!((ruling.norm() - 1.0).abs() < 1e-12);
            assert!((ruling.dot(&sp.frame.y[1]).abs() - 1.0).abs() < 1e-12);
            assert!(ruling[0].abs() < 1e-12 && ruling[1].abs() < 1e-12);
        }
    }
}

#[test]
fn flat_gauss_codazzi() {
    let model = CoordinateModel::exp_model(NilpotentAlgebra::abelian(3, 1).unwrap());
    let chart = graph(model, parse_expression("0.4*sin(u1) + 0.3*u2^2 + 0.2*u1*u2").unwrap(), 1, vec![(-1.0, 1.0); 2]).unwrap();
    for u in [[0.3, 0.2], [-0.5, 0.4], [0.1, -0.6]] {
        match gauss_codazzi_residuals(&chart, &u).unwrap() {
            GaussCodazzi::Checked { codazzi, gauss, curvature_normal, .. } => {
                assert!(codazzi < 5e-6 && gauss < 5e-6, "{codazzi:e} {gauss:e}");
                assert_eq!(curvature_normal, 0.0);
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn shape_norm_expression_matches_the_leaf() {
    let chart = nil_foliation_leaf(0.0).unwrap();
    let e = parse_expression("(u1^2 - 1)^2 / (2*(1 + u1^2)^2)").unwrap();
    for x in [0.0, 0.3, 1.7] {
        let b2 = SurfacePoint::evaluate(&chart, &[x, 0.0]).unwrap().shape.norm_b2;
        assert!((e.eval(&[x]) - b2).abs() < 1e-12);
    }
}
